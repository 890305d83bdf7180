"""Proof-assistant expression renderers.

Both targets render against a small postulated prelude (emitted by the
statement generator): a unit type, a sigma former `Σ`/`Sig` with pairing
and projections, an ambient-explicit identity former `Id`, reflexivity
`rfl`, path composition, and a truncation former.  Keeping every former
a postulate with explicit ambient arguments means the emitted statements
never rely on inference or computation.
"""

from __future__ import annotations

from .typeexpr import (
    App,
    Base,
    Const,
    Fst,
    Id,
    Lam,
    Pair,
    PathComp,
    Pi,
    Refl,
    Sigma,
    Snd,
    Star,
    TeError,
    Trunc,
    TypeExpr,
    Unit,
    Var,
    display_name,
    is_arrow,
)


def _paren(s: str, need: bool) -> str:
    return f"({s})" if need else s


# ------------------------------------------------------------------ agda


def agda_type(e: TypeExpr, atom: bool = False) -> str:
    if isinstance(e, Unit):
        return "⊤"
    if isinstance(e, Base):
        return display_name(e.name, "agda")
    if isinstance(e, Trunc):
        return f"∥ {agda_type(e.inner)} ∥"
    if isinstance(e, Id):
        out = f"Id {agda_type(e.ambient, atom=True)} {agda_term(e.lhs, atom=True)} {agda_term(e.rhs, atom=True)}"
        return _paren(out, atom)
    if isinstance(e, Pi):
        if is_arrow(e):
            out = f"{agda_type(e.domain, atom=True)} → {agda_type(e.body)}"
        else:
            out = f"({display_name(e.binder, 'agda')} : {agda_type(e.domain)}) → {agda_type(e.body)}"
        return _paren(out, atom)
    if isinstance(e, Sigma):
        out = (
            f"Σ {agda_type(e.domain, atom=True)} "
            f"(λ {display_name(e.binder, 'agda')} → {agda_type(e.body)})"
        )
        return _paren(out, atom)
    raise TeError(f"unknown type node {e!r}")


def agda_term(e, atom: bool = False) -> str:
    if isinstance(e, Star):
        return "tt"
    if isinstance(e, (Var, Const)):
        return display_name(e.name, "agda")
    if isinstance(e, App):
        out = f"{agda_term(e.fun)} {agda_term(e.arg, atom=True)}"
        return _paren(out, atom)
    if isinstance(e, Lam):
        out = f"λ {display_name(e.binder, 'agda')} → {agda_term(e.body)}"
        return _paren(out, atom)
    if isinstance(e, Pair):
        return f"({agda_term(e.fst)} , {agda_term(e.snd)})"
    if isinstance(e, Fst):
        return _paren(f"fst {agda_term(e.pair, atom=True)}", atom)
    if isinstance(e, Snd):
        return _paren(f"snd {agda_term(e.pair, atom=True)}", atom)
    if isinstance(e, Refl):
        return _paren(f"rfl {agda_term(e.at, atom=True)}", atom)
    if isinstance(e, PathComp):
        return _paren(f"{agda_term(e.first, atom=True)} · {agda_term(e.second, atom=True)}", atom)
    raise TeError(f"unknown term node {e!r}")


# ------------------------------------------------------------------- coq


def coq_type(e: TypeExpr, atom: bool = False) -> str:
    if isinstance(e, Unit):
        return "unit"
    if isinstance(e, Base):
        return display_name(e.name, "coq")
    if isinstance(e, Trunc):
        return _paren(f"Trunc {coq_type(e.inner, atom=True)}", atom)
    if isinstance(e, Id):
        out = f"Id {coq_type(e.ambient, atom=True)} {coq_term(e.lhs, atom=True)} {coq_term(e.rhs, atom=True)}"
        return _paren(out, atom)
    if isinstance(e, Pi):
        if is_arrow(e):
            out = f"{coq_type(e.domain, atom=True)} -> {coq_type(e.body)}"
        else:
            out = f"forall {display_name(e.binder, 'coq')} : {coq_type(e.domain)}, {coq_type(e.body)}"
        return _paren(out, atom)
    if isinstance(e, Sigma):
        out = (
            f"Sig {coq_type(e.domain, atom=True)} "
            f"(fun {display_name(e.binder, 'coq')} => {coq_type(e.body)})"
        )
        return _paren(out, atom)
    raise TeError(f"unknown type node {e!r}")


def coq_term(e, atom: bool = False) -> str:
    if isinstance(e, Star):
        return "tt"
    if isinstance(e, (Var, Const)):
        return display_name(e.name, "coq")
    if isinstance(e, App):
        out = f"{coq_term(e.fun)} {coq_term(e.arg, atom=True)}"
        return _paren(out, atom)
    if isinstance(e, Lam):
        out = f"fun {display_name(e.binder, 'coq')} => {coq_term(e.body)}"
        return _paren(out, atom)
    if isinstance(e, Pair):
        return _paren(f"spair {coq_term(e.fst, atom=True)} {coq_term(e.snd, atom=True)}", atom)
    if isinstance(e, Fst):
        return _paren(f"sfst {coq_term(e.pair, atom=True)}", atom)
    if isinstance(e, Snd):
        return _paren(f"ssnd {coq_term(e.pair, atom=True)}", atom)
    if isinstance(e, Refl):
        return _paren(f"rfl {coq_term(e.at, atom=True)}", atom)
    if isinstance(e, PathComp):
        return _paren(f"pcomp {coq_term(e.first, atom=True)} {coq_term(e.second, atom=True)}", atom)
    raise TeError(f"unknown term node {e!r}")
