"""Symbolic towers and diagram fibers.

The fibrant replacement of the constant diagram at a base type B is
represented extensionally: the complete boundary at dimension n is a
telescope with one entry per nonempty proper subset of {0..n} (ordered
by cardinality, then lexicographically), and the entry for a subset is
the fiber expression of the appropriate lower dimension instantiated at
the entries for its own proper subsets.  The fiber at dimension n is

    Sigma (x : B). etatilde_n x =[ M_n ] (m-tuple)

with the n = 0 identity collapsing over the unit boundary.  The
constants etatilde_n / eta_n stay opaque except for their recorded
unfolding equations, which are only consulted when checking the
canonical (judgmentally constant) element.

Towers of constancy data are limits over downward-closed object sets of
the extended index category: the entry for an object <m, j> quantifies
over a power of A and instantiates the dimension-m fiber, routing each
boundary subset through the unique predecessor column and acting on the
argument tuple by pad-with-basepoint, reindex, drop.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .cats import (
    DcSubcat,
    HatMap,
    HatObj,
    IncrMap,
    SimplexObj,
    classify_map,
    spine,
)
from .typeexpr import (
    App,
    Arrow,
    Base,
    Const,
    Id,
    Lam,
    Pair,
    PathComp,
    Pi,
    Refl,
    Sigma,
    Star,
    Telescope,
    Term,
    TeError,
    TypeExpr,
    Unit,
    Var,
    alpha_eq,
    apply_all,
    subst,
    subst_many,
    telescope_to_sigma,
    tuple_term,
)


class DiagramError(Exception):
    pass


# ----------------------------------------------------- subset indexing


def proper_subsets(n: int) -> list:
    """Nonempty proper subsets of {0..n}, by cardinality then lex."""
    items = range(n + 1)
    out = []
    for r in range(1, n + 1):
        out.extend(tuple(c) for c in combinations(items, r))
    return out


def subset_entry_name(u) -> str:
    return "m" + "".join(str(d) for d in u)


def etatilde_const(n: int) -> Const:
    return Const(f"etatilde{n}")


def eta_const(n: int) -> Const:
    return Const(f"eta{n}")


# -------------------------------------------------- boundary telescopes


@lru_cache(maxsize=None)
def matching_telescope(n: int, base: str = "B") -> Telescope:
    """Boundary of the dimension-n cell as a telescope, 2^(n+1) - 2 entries."""
    if n < 0:
        raise DiagramError("dimension must be >= 0")
    entries = []
    for u in proper_subsets(n):
        k = len(u) - 1
        fib = equality_fiber(k, base)
        mapping = {
            subset_entry_name(v): Var(subset_entry_name(tuple(u[i] for i in v)))
            for v in proper_subsets(k)
        }
        entries.append((subset_entry_name(u), subst_many(fib, mapping)))
    return Telescope(tuple(entries))


@lru_cache(maxsize=None)
def equality_fiber(n: int, base: str = "B") -> TypeExpr:
    """Fiber of the dimension-n cell over its boundary.

    Free variables are the boundary entries of `matching_telescope(n)`;
    callers substitute them.
    """
    if n < 0:
        raise DiagramError("dimension must be >= 0")
    if n == 0:
        return Sigma("x", Base(base), Id(Unit(), Star(), Star()))
    boundary = matching_telescope(n, base)
    ambient = telescope_to_sigma(boundary)
    lhs = App(etatilde_const(n), Var("x"))
    rhs = tuple_term([Var(name) for name in boundary.names()])
    return Sigma("x", Base(base), Id(ambient, lhs, rhs))


def matching_type(n: int, base: str = "B") -> TypeExpr:
    """The boundary telescope as a single nested Sigma (unit at n = 0)."""
    if n == 0:
        return Unit()
    return telescope_to_sigma(matching_telescope(n, base))


def etatilde_unfolding(n: int, b: Term, base: str = "B") -> Term:
    """Recorded unfolding: the canonical boundary tuple of a point."""
    comps = []
    for u in proper_subsets(n):
        k = len(u) - 1
        comps.append(Pair(b, Refl(_etatilde_applied(k, b))))
    return tuple_term(comps)


def eta_unfolding(n: int, b: Term, base: str = "B") -> Term:
    """Recorded unfolding of the full cell of a point: (boundary, b, refl)."""
    inner = Pair(b, Refl(_etatilde_applied(n, b)))
    if n == 0:
        return inner
    return Pair(etatilde_unfolding(n, b, base), inner)


def _etatilde_applied(k: int, b: Term) -> Term:
    return Star() if k == 0 else App(etatilde_const(k), b)


# ------------------------------------------------------ trivial diagram


def trivial_act(f: HatMap, tup, a0: Term) -> list:
    """Contravariant action on argument tuples: pad, reindex, drop.

    `tup` is the value at the target <m, j> (length m + 1 - j); the
    result is the value at the source <k, i>: pad j basepoint copies in
    front, pick position f(x) for each x, drop the first i entries.
    """
    tup = list(tup)
    if len(tup) != f.dst.m + 1 - f.dst.j:
        raise DiagramError(
            f"tuple of length {len(tup)} does not match {f.dst} (want {f.dst.m + 1 - f.dst.j})"
        )
    padded = [a0] * f.dst.j + tup
    selected = [padded[f.map(x)] for x in range(f.src.m + 1)]
    return selected[f.src.j :]


# ------------------------------------------------------------- towers


def entry_name(x: HatObj) -> str:
    return f"t{x.m}" if x.j == 0 else f"t{x.m}c{x.j}"


def arg_names(count: int) -> list:
    return [f"a{i}" for i in range(1, count + 1)]


def hat_fiber(
    x: HatObj, dom: str = "A", base: str = "B", a0: Term = Var("a0")
) -> TypeExpr:
    """Tower component at <m, j>: functions from A^(m+1-j) into the
    dimension-m fiber, with the boundary assembled from predecessor
    entries via the pad/reindex/drop action."""
    m, j = x.m, x.j
    binders = arg_names(m + 1 - j)
    args = [Var(b) for b in binders]
    fib = equality_fiber(m, base)
    mapping = {}
    for u in proper_subsets(m):
        k = len(u) - 1
        f = IncrMap(SimplexObj(k), SimplexObj(m), u)
        i = classify_map(f, j)
        hm = HatMap(HatObj(k, i), x, f)
        acted = trivial_act(hm, args, a0)
        mapping[subset_entry_name(u)] = apply_all(Var(entry_name(HatObj(k, i))), acted)
    body = subst_many(fib, mapping)
    for b in reversed(binders):
        body = Pi(b, Base(dom), body)
    return body


def limit_telescope(
    D: DcSubcat, dom: str = "A", base: str = "B", a0: Term = Var("a0")
) -> Telescope:
    """Limit over a downward-closed object set, one entry per object."""
    return Telescope(
        tuple((entry_name(x), hat_fiber(x, dom, base, a0)) for x in D.sorted_objects())
    )


def raw_tower(n: int, dom: str = "A", base: str = "B") -> Telescope:
    """The tower of constancy data up to dimension n (empty for n = -1)."""
    if n < -1:
        raise DiagramError("tower index must be >= -1")
    if n == -1:
        return Telescope(())
    return limit_telescope(spine(n), dom, base)


def nice_tower(n: int, dom: str = "A", base: str = "B") -> Telescope:
    """Readable towers: function, constancy, coherence.  Stops at n = 2;
    there is no comparably simple closed form beyond triangles."""
    A, B = Base(dom), Base(base)
    f = Var("f")
    if n not in (0, 1, 2):
        raise DiagramError("nice towers exist only for n in {0, 1, 2}")
    entries = [("f", Arrow(A, B))]
    if n >= 1:
        const = Pi(
            "a1",
            A,
            Pi("a2", A, Id(B, App(f, Var("a1")), App(f, Var("a2")))),
        )
        entries.append(("c", const))
    if n >= 2:
        c = Var("c")

        def cc(i, j):
            return App(App(c, Var(f"a{i}")), Var(f"a{j}"))

        coh = Pi(
            "a1",
            A,
            Pi(
                "a2",
                A,
                Pi(
                    "a3",
                    A,
                    Id(
                        Id(B, App(f, Var("a1")), App(f, Var("a3"))),
                        PathComp(cc(1, 2), cc(2, 3)),
                        cc(1, 3),
                    ),
                ),
            ),
        )
        entries.append(("d", coh))
    return Telescope(tuple(entries))


# --------------------------------------------------- canonical element


def canonical_element(n: int, b: Term) -> Term:
    """The judgmentally constant inhabitant of the tower at a point."""
    if n < 0:
        raise DiagramError("need n >= 0")
    comps = [
        Lam("z", Pair(b, Refl(_etatilde_applied(k, b)))) for k in range(n + 1)
    ]
    return tuple_term(comps)


def beta_reduce(t: Term) -> Term:
    """Reduce lambda applications; the only unfolding this module does."""
    if isinstance(t, App):
        fun = beta_reduce(t.fun)
        arg = beta_reduce(t.arg)
        if isinstance(fun, Lam):
            return beta_reduce(subst(fun.body, fun.binder, arg))
        return App(fun, arg)
    if isinstance(t, Lam):
        return Lam(t.binder, beta_reduce(t.body))
    if isinstance(t, Pair):
        return Pair(beta_reduce(t.fst), beta_reduce(t.snd))
    if isinstance(t, Refl):
        return Refl(beta_reduce(t.at))
    if isinstance(t, PathComp):
        return PathComp(beta_reduce(t.first), beta_reduce(t.second))
    return t


def canonical_matches_unfolding(n: int, base: str = "B") -> bool:
    """Check the recorded equation: pushing the canonical element of the
    tower below dimension n through the boundary assembly yields the
    recorded unfolding of etatilde_n at the point."""
    b = Var("bpoint")
    comps = [Lam("z", Pair(b, Refl(_etatilde_applied(k, b)))) for k in range(n)]
    built = []
    for u in proper_subsets(n):
        k = len(u) - 1
        built.append(beta_reduce(App(comps[k], Star())))
    return alpha_eq(tuple_term(built), etatilde_unfolding(n, b, base))


# --------------------------------------------------- spec domain types


@dataclass(frozen=True)
class EqualityDiagram:
    """Dimension-indexed cells of equalities over a named base type."""

    base: str = "B"
    bound: int = 4

    def matching(self, n: int) -> Telescope:
        self._check(n)
        return matching_telescope(n, self.base)

    def fiber(self, n: int) -> TypeExpr:
        self._check(n)
        return equality_fiber(n, self.base)

    def level_telescope(self, n: int) -> Telescope:
        """Boundary plus top fiber: the whole dimension-n cell."""
        self._check(n)
        boundary = matching_telescope(n, self.base)
        return Telescope(tuple(boundary.entries) + (("top", self.fiber(n)),))

    def _check(self, n: int):
        if n > self.bound:
            raise DiagramError(f"dimension {n} above bound {self.bound}")


@dataclass(frozen=True)
class TrivialDiagram:
    """Powers of a base type with the pad/reindex/drop action."""

    base: str = "A"
    basepoint: str = "a0"

    def value_arity(self, x: HatObj) -> int:
        return x.m + 1 - x.j

    def act(self, f: HatMap, tup) -> list:
        return trivial_act(f, tup, Var(self.basepoint))


@dataclass(frozen=True)
class NatDiagram:
    """Componentwise transformations from powers of A into the cells of B."""

    domain: TrivialDiagram
    codomain: EqualityDiagram
    flavor: str = "hat"  # "plain" restricts to the spine
    bound: int = 4

    def fiber(self, x: HatObj) -> TypeExpr:
        if x.m > self.bound:
            raise DiagramError(f"{x} above bound {self.bound}")
        if self.flavor == "plain" and x.j != 0:
            raise DiagramError("plain towers only have spine components")
        return hat_fiber(x, self.domain.base, self.codomain.base, Var(self.domain.basepoint))

    def limit(self, D: DcSubcat) -> Telescope:
        if self.flavor == "plain" and any(x.j != 0 for x in D.objects):
            raise DiagramError("plain towers only have spine components")
        return limit_telescope(
            D, self.domain.base, self.codomain.base, Var(self.domain.basepoint)
        )
