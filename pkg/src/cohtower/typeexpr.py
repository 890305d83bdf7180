"""Symbolic syntax for the small type-theory fragment.

Types: unit, base names, Sigma, Pi, identity types (with an explicit
ambient type), truncation.  Non-dependent arrows are Pi with the unused
binder "_".  Terms: variables, application, lambda, pairing with
projections, reflexivity, path composition, declared constants, and the
unit point.  A telescope is a dependency-ordered list of named types,
read as a nested Sigma.

There is deliberately no type checker.  Scope checking is syntactic;
every semantic obligation is discharged by the finite-groupoid oracle.

The unicode rendering is also the line format of certificate files, so
it annotates identity types with their ambient ("x =[A] y") and a
reference parser (`parse_type`, `parse_term`) can read it back.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

# ---------------------------------------------------------------- types


class TeError(Exception):
    pass


@dataclass(frozen=True)
class TypeExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Unit(TypeExpr):
    __slots__ = ()


@dataclass(frozen=True)
class Base(TypeExpr):
    name: str


@dataclass(frozen=True)
class Sigma(TypeExpr):
    binder: str
    domain: TypeExpr
    body: TypeExpr


@dataclass(frozen=True)
class Pi(TypeExpr):
    binder: str
    domain: TypeExpr
    body: TypeExpr


@dataclass(frozen=True)
class Id(TypeExpr):
    ambient: TypeExpr
    lhs: "Term"
    rhs: "Term"


@dataclass(frozen=True)
class Trunc(TypeExpr):
    inner: TypeExpr


def Arrow(domain: TypeExpr, codomain: TypeExpr) -> Pi:
    """Non-dependent function type, normalized to Pi with unused binder."""
    return Pi("_", domain, codomain)


def is_arrow(e: TypeExpr) -> bool:
    return isinstance(e, Pi) and e.binder not in free_vars(e.body)


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    fun: Term
    arg: Term


@dataclass(frozen=True)
class Lam(Term):
    binder: str
    body: Term


@dataclass(frozen=True)
class Pair(Term):
    fst: Term
    snd: Term


@dataclass(frozen=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True)
class Refl(Term):
    at: Term


@dataclass(frozen=True)
class PathComp(Term):
    first: Term
    second: Term


@dataclass(frozen=True)
class Const(Term):
    """A declared constant, e.g. the canonical cone components."""

    name: str


@dataclass(frozen=True)
class Star(Term):
    __slots__ = ()


def apply_all(fun: Term, args) -> Term:
    out = fun
    for a in args:
        out = App(out, a)
    return out


def lam_all(binders, body: Term) -> Term:
    for b in reversed(list(binders)):
        body = Lam(b, body)
    return body


def tuple_term(parts) -> Term:
    """Right-nested pairing; the empty tuple is the unit point."""
    parts = list(parts)
    if not parts:
        return Star()
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Pair(p, out)
    return out


# ------------------------------------------------------------- scoping


def free_vars(e) -> frozenset:
    if isinstance(e, (Unit, Base, Star, Const)):
        return frozenset()
    if isinstance(e, Var):
        return frozenset((e.name,))
    if isinstance(e, (Sigma, Pi)):
        return free_vars(e.domain) | (free_vars(e.body) - {e.binder})
    if isinstance(e, Id):
        return free_vars(e.ambient) | free_vars(e.lhs) | free_vars(e.rhs)
    if isinstance(e, Trunc):
        return free_vars(e.inner)
    if isinstance(e, App):
        return free_vars(e.fun) | free_vars(e.arg)
    if isinstance(e, Lam):
        return free_vars(e.body) - {e.binder}
    if isinstance(e, Pair):
        return free_vars(e.fst) | free_vars(e.snd)
    if isinstance(e, (Fst, Snd)):
        return free_vars(e.pair)
    if isinstance(e, Refl):
        return free_vars(e.at)
    if isinstance(e, PathComp):
        return free_vars(e.first) | free_vars(e.second)
    raise TeError(f"unknown node {e!r}")


def _fresh(name: str, avoid) -> str:
    if name not in avoid:
        return name
    base = name.rstrip("'")
    cand = base + "'"
    while cand in avoid:
        cand += "'"
    return cand


def subst(e, name: str, replacement: Term):
    """Capture-avoiding substitution of a term for a free variable."""
    if isinstance(e, (Unit, Base, Star, Const)):
        return e
    if isinstance(e, Var):
        return replacement if e.name == name else e
    if isinstance(e, Trunc):
        return Trunc(subst(e.inner, name, replacement))
    if isinstance(e, Id):
        return Id(
            subst(e.ambient, name, replacement),
            subst(e.lhs, name, replacement),
            subst(e.rhs, name, replacement),
        )
    if isinstance(e, (Sigma, Pi, Lam)):
        if isinstance(e, Lam):
            dom = None
        else:
            dom = subst(e.domain, name, replacement)
        if e.binder == name:
            body = e.body
        else:
            binder = e.binder
            body = e.body
            if binder in free_vars(replacement) and name in free_vars(body):
                newb = _fresh(binder, free_vars(replacement) | free_vars(body) | {name})
                body = subst(body, binder, Var(newb))
                binder = newb
            body = subst(body, name, replacement)
            if isinstance(e, Lam):
                return Lam(binder, body)
            return type(e)(binder, dom, body)
        if isinstance(e, Lam):
            return Lam(e.binder, body)
        return type(e)(e.binder, dom, body)
    if isinstance(e, App):
        return App(subst(e.fun, name, replacement), subst(e.arg, name, replacement))
    if isinstance(e, Pair):
        return Pair(subst(e.fst, name, replacement), subst(e.snd, name, replacement))
    if isinstance(e, Fst):
        return Fst(subst(e.pair, name, replacement))
    if isinstance(e, Snd):
        return Snd(subst(e.pair, name, replacement))
    if isinstance(e, Refl):
        return Refl(subst(e.at, name, replacement))
    if isinstance(e, PathComp):
        return PathComp(subst(e.first, name, replacement), subst(e.second, name, replacement))
    raise TeError(f"unknown node {e!r}")


def subst_many(e, mapping: dict):
    """Simultaneous substitution, applied via fresh intermediate names."""
    if not mapping:
        return e
    # two passes through throwaway names so entries cannot clobber each other
    temps = {}
    for i, name in enumerate(mapping):
        tmp = f"#subst{i}"
        temps[tmp] = mapping[name]
        e = subst(e, name, Var(tmp))
    for tmp, replacement in temps.items():
        e = subst(e, tmp, replacement)
    return e


def alpha_eq(x, y) -> bool:
    """Equality up to consistent binder renaming."""
    return _alpha(x, y, {}, {})


def _alpha(x, y, lx, ly) -> bool:
    if isinstance(x, (Unit, Star)) and type(x) is type(y):
        return True
    if isinstance(x, Base) and isinstance(y, Base):
        return x.name == y.name
    if isinstance(x, Const) and isinstance(y, Const):
        return x.name == y.name
    if isinstance(x, Var) and isinstance(y, Var):
        if x.name in lx or y.name in ly:
            return lx.get(x.name) == ly.get(y.name) and x.name in lx and y.name in ly
        return x.name == y.name
    if isinstance(x, (Sigma, Pi)) and type(x) is type(y):
        if not _alpha(x.domain, y.domain, lx, ly):
            return False
        mark = len(lx) + len(ly)
        return _alpha(x.body, y.body, {**lx, x.binder: mark}, {**ly, y.binder: mark})
    if isinstance(x, Lam) and isinstance(y, Lam):
        mark = len(lx) + len(ly)
        return _alpha(x.body, y.body, {**lx, x.binder: mark}, {**ly, y.binder: mark})
    if isinstance(x, Id) and isinstance(y, Id):
        return (
            _alpha(x.ambient, y.ambient, lx, ly)
            and _alpha(x.lhs, y.lhs, lx, ly)
            and _alpha(x.rhs, y.rhs, lx, ly)
        )
    if isinstance(x, Trunc) and isinstance(y, Trunc):
        return _alpha(x.inner, y.inner, lx, ly)
    if isinstance(x, App) and isinstance(y, App):
        return _alpha(x.fun, y.fun, lx, ly) and _alpha(x.arg, y.arg, lx, ly)
    if isinstance(x, Pair) and isinstance(y, Pair):
        return _alpha(x.fst, y.fst, lx, ly) and _alpha(x.snd, y.snd, lx, ly)
    if isinstance(x, (Fst, Snd)) and type(x) is type(y):
        return _alpha(x.pair, y.pair, lx, ly)
    if isinstance(x, Refl) and isinstance(y, Refl):
        return _alpha(x.at, y.at, lx, ly)
    if isinstance(x, PathComp) and isinstance(y, PathComp):
        return _alpha(x.first, y.first, lx, ly) and _alpha(x.second, y.second, lx, ly)
    return False


# ----------------------------------------------------------- telescopes


@dataclass(frozen=True)
class Telescope:
    """Dependency-ordered named components, read as a nested Sigma."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((n, t) for n, t in self.entries))

    def names(self) -> list:
        return [n for n, _ in self.entries]

    def types(self) -> list:
        return [t for _, t in self.entries]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __str__(self):
        return pretty_telescope(self, "unicode")


EMPTY_TELESCOPE = Telescope(())


@dataclass(frozen=True)
class ScopeIssue:
    entry: str
    variable: str

    def __str__(self):
        return f"entry {self.entry!r} mentions unbound {self.variable!r}"


def scope_check(t: Telescope, ambient=frozenset()):
    """None if every entry only uses earlier names; else the first offence."""
    bound = set(ambient)
    seen = set()
    for name, ty in t.entries:
        if name in seen:
            return ScopeIssue(name, name)
        loose = free_vars(ty) - bound
        if loose:
            return ScopeIssue(name, min(loose))
        seen.add(name)
        bound.add(name)
    return None


def scope_check_term(term: Term, ambient=frozenset()):
    loose = free_vars(term) - set(ambient)
    return None if not loose else min(loose)


class ReorderError(TeError):
    def __init__(self, entry, needs):
        self.entry, self.needs = entry, needs
        super().__init__(f"cannot move {entry!r} before {needs!r}, which it depends on")


def reorder(t: Telescope, perm) -> Telescope:
    """Permute entries; fails if a dependency would point forward."""
    perm = list(perm)
    if sorted(perm) != list(range(len(t))):
        raise TeError(f"{perm} is not a permutation of 0..{len(t) - 1}")
    entries = [t.entries[i] for i in perm]
    placed = set()
    names = {n for n, _ in entries}
    for name, ty in entries:
        for v in free_vars(ty):
            if v in names and v not in placed:
                raise ReorderError(name, v)
        placed.add(name)
    return Telescope(tuple(entries))


def telescope_to_sigma(t: Telescope, body: TypeExpr | None = None) -> TypeExpr:
    """Nested Sigma; the last entry becomes the body unless one is given."""
    entries = list(t.entries)
    if body is None:
        if not entries:
            return Unit()
        body = entries[-1][1]
        entries = entries[:-1]
    for name, ty in reversed(entries):
        body = Sigma(name, ty, body)
    return body


def alpha_eq_telescope(a: Telescope, b: Telescope) -> bool:
    if len(a) != len(b):
        return False
    return alpha_eq(telescope_to_sigma(a, Unit()), telescope_to_sigma(b, Unit()))


# ------------------------------------------------------------ printing


def _load_translit():
    with resources.files("cohtower").joinpath("data/translit.json").open(
        encoding="utf-8"
    ) as fh:
        return json.load(fh)


_TRANSLIT = _load_translit()
_FROM_DISPLAY = {disp: name for name, disp in _TRANSLIT["unicode"].items()}

_SUP = dict(zip("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹"))


def display_name(name: str, fmt: str) -> str:
    table = _TRANSLIT.get(fmt, {})
    if name in table:
        return table[name]
    if fmt == "latex":
        return name.replace("_", r"\_")
    return name


def sup(n: int) -> str:
    """Superscript digits, used for the tower notation."""
    return "".join(_SUP[c] for c in str(n))


_FMT = {
    "unicode": {
        "unit": "𝟙", "star": "⋆", "sigma": "Σ", "pi": "Π", "lam": "λ",
        "arrow": "→", "dot": ". ", "comp": " · ", "refl": "refl ",
        "fst": "fst ", "snd": "snd ", "trunc": ("∥", "∥"),
    },
    "latex": {
        "unit": r"\mathbf{1}", "star": r"\star", "sigma": r"\Sigma",
        "pi": r"\Pi", "lam": r"\lambda", "arrow": r"\to", "dot": ".\\ ",
        "comp": r" \cdot ", "refl": r"\mathsf{refl}\,", "fst": r"\mathsf{fst}\,",
        "snd": r"\mathsf{snd}\,", "trunc": (r"\lVert ", r"\rVert"),
    },
}


def pretty(e, fmt: str = "unicode") -> str:
    """Deterministic rendering of a type or term."""
    if fmt in ("unicode", "latex"):
        if isinstance(e, TypeExpr):
            return _pretty_type(e, fmt)
        return _pretty_term(e, fmt, 0)
    if fmt == "agda":
        from .emitters import agda_type, agda_term

        return agda_type(e) if isinstance(e, TypeExpr) else agda_term(e)
    if fmt == "coq":
        from .emitters import coq_type, coq_term

        return coq_type(e) if isinstance(e, TypeExpr) else coq_term(e)
    raise TeError(f"unknown format {fmt!r}")


def pretty_telescope(t: Telescope, fmt: str = "unicode") -> str:
    """Telescope as a nested Sigma, anonymous last component."""
    if fmt in ("agda", "coq"):
        from .emitters import agda_type, coq_type

        f = agda_type if fmt == "agda" else coq_type
        return f(telescope_to_sigma(t))
    if not t.entries:
        return _FMT[fmt]["unit"]
    s = _FMT[fmt]
    parts = []
    for name, ty in t.entries[:-1]:
        parts.append(f"{s['sigma']} ({display_name(name, fmt)} : {_pretty_type(ty, fmt)}){s['dot']}")
    parts.append(_pretty_type(t.entries[-1][1], fmt))
    return "".join(parts)


def _binder_group(e, fmt):
    """Collapse a run of same-flavor binders with alpha-equal domains."""
    kind = type(e)
    names = [e.binder]
    dom = e.domain
    body = e.body
    while (
        isinstance(body, kind)
        and body.binder != "_"
        and body.binder not in names
        and alpha_eq(body.domain, dom)
        and not (free_vars(body.domain) & set(names))
    ):
        names.append(body.binder)
        body = body.body
    return names, dom, body


def _pretty_type(e, fmt, atom=False) -> str:
    s = _FMT[fmt]
    if isinstance(e, Unit):
        return s["unit"]
    if isinstance(e, Base):
        return display_name(e.name, fmt)
    if isinstance(e, Trunc):
        o, c = s["trunc"]
        return f"{o}{_pretty_type(e.inner, fmt)}{c}"
    if isinstance(e, Id):
        amb = _pretty_type(e.ambient, fmt)
        l = _pretty_term(e.lhs, fmt, 0)
        r = _pretty_term(e.rhs, fmt, 0)
        if fmt == "latex":
            out = f"{l} =_{{{amb}}} {r}"
        else:
            out = f"{l} =[{amb}] {r}"
        return f"({out})" if atom else out
    if isinstance(e, Pi) and is_arrow(e):
        dom = _pretty_type(e.domain, fmt, atom=not isinstance(e.domain, (Unit, Base, Trunc)))
        cod = _pretty_type(e.body, fmt)
        out = f"{dom} {s['arrow']} {cod}"
        return f"({out})" if atom else out
    if isinstance(e, (Sigma, Pi)):
        names, dom, body = _binder_group(e, fmt)
        head = s["sigma"] if isinstance(e, Sigma) else s["pi"]
        shown = " ".join(display_name(n, fmt) for n in names)
        out = f"{head} ({shown} : {_pretty_type(dom, fmt)}){s['dot']}{_pretty_type(body, fmt)}"
        return f"({out})" if atom else out
    raise TeError(f"unknown type node {e!r}")


# term precedence levels: 0 lowest (path composition), 1 application, 2 atoms
def _pretty_term(e, fmt, level) -> str:
    s = _FMT[fmt]
    if isinstance(e, Star):
        return s["star"]
    if isinstance(e, Var):
        return display_name(e.name, fmt)
    if isinstance(e, Const):
        return display_name(e.name, fmt)
    if isinstance(e, Pair):
        return f"({_pretty_term(e.fst, fmt, 0)} , {_pretty_term(e.snd, fmt, 0)})"
    if isinstance(e, PathComp):
        out = f"{_pretty_term(e.first, fmt, 1)}{s['comp']}{_pretty_term(e.second, fmt, 1)}"
        return f"({out})" if level > 0 else out
    if isinstance(e, App):
        out = f"{_pretty_term(e.fun, fmt, 1)} {_pretty_term(e.arg, fmt, 2)}"
        return f"({out})" if level > 1 else out
    if isinstance(e, (Fst, Snd, Refl)):
        key = {Fst: "fst", Snd: "snd", Refl: "refl"}[type(e)]
        out = f"{s[key]}{_pretty_term(e.pair if not isinstance(e, Refl) else e.at, fmt, 2)}"
        return f"({out})" if level > 1 else out
    if isinstance(e, Lam):
        names = [e.binder]
        body = e.body
        while isinstance(body, Lam):
            names.append(body.binder)
            body = body.body
        shown = " ".join(display_name(n, fmt) for n in names)
        out = f"{s['lam']} {shown}{s['dot']}{_pretty_term(body, fmt, 0)}"
        return f"({out})" if level > 0 else out
    raise TeError(f"unknown term node {e!r}")


# ------------------------------------------------------------- parsing
#
# Reference parser for the unicode format, used by tests and by the
# certificate reader.  It accepts exactly what the printer emits.

_SYMBOLS = ("Σ", "Π", "λ", "→", "·", "𝟙", "⋆", "∥", "(", ")", "[", "]", "=", ":", ".", ",")
_NAME_EXTRA = "⁰¹²³⁴⁵⁶⁷⁸⁹₀₁₂₃₄₅₆₇₈₉'_̃"


class ParseError(TeError):
    pass


def _tokenize(text: str):
    toks = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _SYMBOLS:
            toks.append(c)
            i += 1
            continue
        if c.isalnum() or c in _NAME_EXTRA or ord(c) > 0x2100:
            j = i
            while j < len(text) and text[j] not in _SYMBOLS and (
                text[j].isalnum() or text[j] in _NAME_EXTRA or ord(text[j]) > 0x2100
            ):
                j += 1
            toks.append(text[i:j])
            i = j
            continue
        raise ParseError(f"unexpected character {c!r} at {i}")
    return toks


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self):
        return self.toks[self.pos] if self.pos < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input")
        self.pos += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def name(self):
        tok = self.next()
        if tok in _SYMBOLS:
            raise ParseError(f"expected a name, got {tok!r}")
        return _FROM_DISPLAY.get(tok, tok)

    # types

    def type_(self):
        tok = self.peek()
        if tok in ("Σ", "Π"):
            self.next()
            self.expect("(")
            names = [self.name()]
            while self.peek() != ":":
                names.append(self.name())
            self.expect(":")
            dom = self.type_()
            self.expect(")")
            self.expect(".")
            body = self.type_()
            cls = Sigma if tok == "Σ" else Pi
            for n in reversed(names):
                body = cls(n, dom, body)
            return body
        return self.arrow_type()

    def arrow_type(self):
        left = self.id_or_atom()
        if self.peek() == "→":
            self.next()
            return Arrow(left, self.type_())
        return left

    def id_or_atom(self):
        save = self.pos
        try:
            lhs = self.term(min_level=0)
            if self.peek() == "=":
                self.next()
                self.expect("[")
                amb = self.type_()
                self.expect("]")
                rhs = self.term(min_level=0)
                return Id(amb, lhs, rhs)
        except ParseError:
            pass
        self.pos = save
        return self.atom_type()

    def atom_type(self):
        tok = self.peek()
        if tok == "𝟙":
            self.next()
            return Unit()
        if tok == "∥":
            self.next()
            inner = self.type_()
            self.expect("∥")
            return Trunc(inner)
        if tok == "(":
            self.next()
            inner = self.type_()
            self.expect(")")
            return inner
        return Base(self.name())

    # terms

    def term(self, min_level=0):
        left = self.app_term()
        while min_level <= 0 and self.peek() == "·":
            self.next()
            left = PathComp(left, self.app_term())
        return left

    def app_term(self):
        out = self.atom_term()
        while True:
            tok = self.peek()
            if tok is None or tok in ("→", "·", "=", ")", "]", ",", "∥", ".", ":"):
                return out
            out = App(out, self.atom_term())

    def atom_term(self):
        tok = self.peek()
        if tok == "λ":
            self.next()
            names = [self.name()]
            while self.peek() != ".":
                names.append(self.name())
            self.expect(".")
            return lam_all(names, self.term())
        if tok == "⋆":
            self.next()
            return Star()
        if tok == "(":
            self.next()
            first = self.term()
            if self.peek() == ",":
                self.next()
                second = self.term()
                self.expect(")")
                return Pair(first, second)
            self.expect(")")
            return first
        if tok in ("fst", "snd", "refl"):
            self.next()
            arg = self.atom_term()
            return {"fst": Fst, "snd": Snd, "refl": Refl}[tok](arg)
        name = self.name()
        if name.startswith("etatilde") or name.startswith("eta"):
            return Const(name)
        return Var(name)


def parse_type(text: str) -> TypeExpr:
    p = _Parser(_tokenize(text))
    out = p.type_()
    if p.peek() is not None:
        raise ParseError(f"trailing input at token {p.pos}: {p.peek()!r}")
    return out


def parse_term(text: str) -> Term:
    p = _Parser(_tokenize(text))
    out = p.term()
    if p.peek() is not None:
        raise ParseError(f"trailing input at token {p.pos}: {p.peek()!r}")
    return out
