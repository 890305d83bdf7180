"""Index-category combinatorics.

Two finite shape categories drive everything downstream:

* the category of finite nonempty ordinals ``[n] = {0, ..., n}`` with
  strictly increasing maps, and
* its extension whose objects are pairs ``<m, j>`` with ``0 <= j <= m + 1``,
  where a strictly increasing map ``f : [k] -> [m]`` counts as a morphism
  ``<k, i> -> <m, j>`` exactly when the column condition ``alpha`` holds.

Morphisms are stored covariantly (source level <= target level); diagram
code that walks the opposite category just swaps the roles of source and
target.  Downward-closed object sets of the (opposite) extension form the
lattice that expansion/contraction bookkeeping works in.

Everything here is pure and deterministic: hom-sets are enumerated in
lexicographic order of value sequences, object sets are ordered by (m, j).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations


class CatError(Exception):
    """Ill-formed categorical data (bad composition, bound mismatch, ...)."""


@dataclass(frozen=True, order=True)
class SimplexObj:
    """The ordinal ``[n] = {0, ..., n}``."""

    n: int

    def __post_init__(self):
        if self.n < 0:
            raise CatError(f"ordinal level must be >= 0, got {self.n}")

    def __str__(self):
        return f"[{self.n}]"


@dataclass(frozen=True)
class IncrMap:
    """A strictly increasing map ``[dom] -> [cod]``, given by its values."""

    dom: SimplexObj
    cod: SimplexObj
    values: tuple

    def __post_init__(self):
        vals = tuple(self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) != self.dom.n + 1:
            raise CatError(f"map needs {self.dom.n + 1} values, got {len(vals)}")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise CatError(f"values {vals} are not strictly increasing")
        if vals and (vals[0] < 0 or vals[-1] > self.cod.n):
            raise CatError(f"values {vals} leave the codomain [{self.cod.n}]")

    def __call__(self, x: int) -> int:
        return self.values[x]

    def is_identity(self) -> bool:
        return self.dom == self.cod and self.values == tuple(range(self.dom.n + 1))

    def __str__(self):
        return f"({','.join(map(str, self.values))}):{self.dom}->{self.cod}"


def identity_map(k: SimplexObj) -> IncrMap:
    return IncrMap(k, k, tuple(range(k.n + 1)))


@lru_cache(maxsize=None)
def enumerate_incr_maps(k: SimplexObj, m: SimplexObj) -> tuple:
    """All strictly increasing maps ``[k] -> [m]``, lexicographically.

    There are binomial(m + 1, k + 1) of them; the list is empty for k > m.
    """
    return tuple(
        IncrMap(k, m, vals) for vals in combinations(range(m.n + 1), k.n + 1)
    )


def compose_incr(f: IncrMap, g: IncrMap) -> IncrMap:
    """The composite ``g after f`` (first f, then g)."""
    if f.cod != g.dom:
        raise CatError(f"cannot compose {f} with {g}: codomain/domain mismatch")
    return IncrMap(f.dom, g.cod, tuple(g.values[v] for v in f.values))


@dataclass(frozen=True, order=True)
class HatObj:
    """An object ``<m, j>`` of the extended category, ``0 <= j <= m + 1``."""

    m: int
    j: int

    def __post_init__(self):
        if self.m < 0 or not (0 <= self.j <= self.m + 1):
            raise CatError(f"bad object <{self.m},{self.j}>")

    @property
    def rank(self) -> int:
        return self.m

    def token(self) -> str:
        return f"{self.m}:{self.j}"

    def __str__(self):
        return f"<{self.m},{self.j}>"


def parse_hat_token(tok: str) -> HatObj:
    m, _, j = tok.partition(":")
    return HatObj(int(m), int(j))


def alpha_holds(f: IncrMap, i: int, j: int) -> bool:
    """Column condition for ``f : [k] -> [m]`` to be a map ``<k,i> -> <m,j>``.

    i < j:  f fixes everything below i and strictly raises everything from i;
    i = j:  f fixes everything below i;
    i > j:  never.
    """
    if i > j:
        return False
    if any(f(x) != x for x in range(0, min(i, f.dom.n + 1))):
        return False
    if i < j:
        return all(f(x) > x for x in range(i, f.dom.n + 1))
    return True


def hat_hom(src: HatObj, dst: HatObj) -> tuple:
    """All extended-category morphisms ``src -> dst``."""
    k, m = SimplexObj(src.m), SimplexObj(dst.m)
    return tuple(
        HatMap(src, dst, f)
        for f in enumerate_incr_maps(k, m)
        if alpha_holds(f, src.j, dst.j)
    )


@dataclass(frozen=True)
class HatMap:
    """A morphism ``src -> dst`` of the extended category."""

    src: HatObj
    dst: HatObj
    map: IncrMap

    def __post_init__(self):
        if self.map.dom.n != self.src.m or self.map.cod.n != self.dst.m:
            raise CatError(f"underlying map {self.map} does not fit {self.src}->{self.dst}")
        if not alpha_holds(self.map, self.src.j, self.dst.j):
            raise CatError(f"{self.map} violates the column condition for {self.src}->{self.dst}")

    def __str__(self):
        return f"{self.map.values}:{self.src}->{self.dst}"


def compose_hat(f: HatMap, g: HatMap) -> HatMap:
    if f.dst != g.src:
        raise CatError(f"cannot compose {f} with {g}")
    return HatMap(f.src, g.dst, compose_incr(f.map, g.map))


def classify_map(f: IncrMap, j: int) -> int:
    """The unique column i with ``alpha(f, i, j)``.

    Existence and uniqueness witness that, for a fixed target column j,
    the plain hom-set ``[k] -> [m]`` is partitioned by source columns.
    A violation would mean the invariant broke, so it is raised hard.
    """
    hits = [i for i in range(f.dom.n + 2) if alpha_holds(f, i, j)]
    if len(hits) != 1:
        raise CatError(f"column classification of {f} at j={j} yielded {hits}")
    return hits[0]


@lru_cache(maxsize=None)
def predecessors(x: HatObj) -> frozenset:
    """All objects receiving a nonidentity arrow from x in the op-category.

    Nonidentity morphisms strictly decrease the level, so these are the
    ``y`` with ``y.m < x.m`` and a nonempty hom ``y -> x`` (covariantly).
    """
    out = set()
    for m in range(x.m):
        for j in range(m + 2):
            y = HatObj(m, j)
            if hat_hom(y, x):
                out.add(y)
    return frozenset(out)


@dataclass(frozen=True)
class DcSubcat:
    """A finite downward-closed full subcategory, capped at ``bound``.

    ``flavor`` records whether the object set lives in the extended
    category ("hat") or in its level-zero spine ("plain-simplex", all
    objects of the form <m, 0>).
    """

    bound: int
    objects: frozenset
    flavor: str = "hat"

    def __post_init__(self):
        objs = frozenset(self.objects)
        object.__setattr__(self, "objects", objs)
        if self.flavor not in ("hat", "plain-simplex"):
            raise CatError(f"unknown flavor {self.flavor!r}")
        if self.flavor == "plain-simplex" and any(x.j != 0 for x in objs):
            raise CatError("plain-simplex subcategories may only contain <m,0> objects")
        if any(x.m > self.bound for x in objs):
            raise CatError("object above the level bound")
        if not is_downwards_closed(objs):
            raise CatError(f"object set {sorted(objs)} is not downward closed")

    def sorted_objects(self) -> list:
        return sorted(self.objects)

    def tokens(self) -> list:
        """Serialization used by the certificate format."""
        return [x.token() for x in self.sorted_objects()]

    def __contains__(self, x: HatObj) -> bool:
        return x in self.objects

    def __len__(self):
        return len(self.objects)

    def add(self, *xs: HatObj) -> "DcSubcat":
        return DcSubcat(self.bound, self.objects | set(xs), self.flavor)

    def remove(self, *xs: HatObj) -> "DcSubcat":
        return DcSubcat(self.bound, self.objects - set(xs), self.flavor)


def _check_compatible(a: DcSubcat, b: DcSubcat):
    if a.bound != b.bound:
        raise CatError(f"bound mismatch: {a.bound} vs {b.bound}")
    if a.flavor != b.flavor:
        raise CatError(f"flavor mismatch: {a.flavor} vs {b.flavor}")


def dc_union(a: DcSubcat, b: DcSubcat) -> DcSubcat:
    _check_compatible(a, b)
    return DcSubcat(a.bound, a.objects | b.objects, a.flavor)


def dc_intersect(a: DcSubcat, b: DcSubcat) -> DcSubcat:
    _check_compatible(a, b)
    return DcSubcat(a.bound, a.objects & b.objects, a.flavor)


def dc_generated(x: HatObj, bound: int | None = None, flavor: str = "hat") -> DcSubcat:
    """The least downward-closed set containing x (transitive predecessors)."""
    seen = {x}
    frontier = [x]
    while frontier:
        y = frontier.pop()
        for z in predecessors(y):
            if z not in seen:
                seen.add(z)
                frontier.append(z)
    return DcSubcat(x.m if bound is None else bound, frozenset(seen), flavor)


def is_downwards_closed(objects) -> bool:
    objs = set(objects)
    return all(predecessors(x) <= objs for x in objs)


def spine(bound: int) -> DcSubcat:
    """The full level-zero column up to the bound, the copy of the plain category."""
    return DcSubcat(bound, frozenset(HatObj(m, 0) for m in range(bound + 1)))


def full_subcat(bound: int) -> DcSubcat:
    """Every object with level <= bound."""
    objs = frozenset(HatObj(m, j) for m in range(bound + 1) for j in range(m + 2))
    return DcSubcat(bound, objs)
