"""Horn decompositions and truncation-level arithmetic.

For a finite set s and a chosen k in s, the poset of nonempty subsets of
s minus its top set and the face opposite k is the "k-th horn".  The
chain built here fills a horn step by step: starting from {{k}}, each
step adjoins one k-free subset together with its k-extension, staying
downward closed throughout and touching every subset exactly once.  The
side condition recorded with each step says the part of the chain lying
inside the adjoined cell's subset poset is exactly that cell's own horn,
which is what lets each step be treated as a pullback of a smaller horn
filler.

The level arithmetic: over a codomain of truncation level n, the fiber
of the full cell over its complete boundary at dimension k has level
n - k, so everything from dimension n + 2 on is contractible and towers
stabilize at index n + 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations


class HornError(Exception):
    pass


def _powerset_nonempty(s: frozenset) -> set:
    items = sorted(s)
    out = set()
    for r in range(1, len(items) + 1):
        for combo in combinations(items, r):
            out.add(frozenset(combo))
    return out


def subset_key(u: frozenset):
    return (len(u), tuple(sorted(u)))


@dataclass(frozen=True)
class HornSpec:
    s: frozenset
    k: int

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))
        if self.k not in self.s:
            raise HornError(f"{self.k} is not in {sorted(self.s)}")


@dataclass(frozen=True)
class SubsetChain:
    """The filling sequence: states S_0 .. S_N and the pairs added."""

    start: frozenset
    steps: tuple  # of (alpha_i, alpha_i | {k})

    def states(self) -> list:
        out = [{self.start}]
        for a, ak in self.steps:
            out.append(out[-1] | {a, ak})
        return [frozenset(st) for st in out]


def horn_poset(h: HornSpec) -> set:
    """Nonempty subsets of s, minus s itself and s without k."""
    if len(h.s) < 2:
        raise HornError("horns need at least two vertices")
    full = _powerset_nonempty(h.s)
    return full - {h.s, h.s - {h.k}}


def alpha_sequence(h: HornSpec) -> list:
    """All nonempty subsets of s - k, cardinality nondecreasing.

    Ties are broken lexicographically so output order is reproducible;
    any cardinality-nondecreasing order works for the chain.
    """
    if len(h.s) < 2:
        raise HornError("need |s| >= 2")
    return sorted(_powerset_nonempty(h.s - {h.k}), key=subset_key)


def s_chain(h: HornSpec) -> SubsetChain:
    """The filling chain from {{k}} to the full subset poset of s."""
    steps = tuple((a, a | {h.k}) for a in alpha_sequence(h))
    return SubsetChain(frozenset({h.k}), steps)


def is_subset_downwards_closed(family) -> bool:
    fam = set(family)
    return all(
        v in fam
        for u in fam
        for v in _powerset_nonempty(u)
        if v != u
    )


def chain_side_condition(h: HornSpec, chain: SubsetChain) -> bool:
    """Each step meets the previous state in exactly the smaller horn.

    For step i adjoining (a_i, a_i + k), the intersection of S_{i-1}
    with the subset poset of a_i + k must be the k-horn of a_i + k.
    """
    states = chain.states()
    for (a, ak), before in zip(chain.steps, states):
        cell = _powerset_nonempty(ak)
        want = cell - {ak, a}
        if before & cell != want:
            return False
    return True


def fiber_level(n: int, k: int) -> int:
    """Truncation level of the dimension-k fiber over level-n codomain."""
    if n < -2 or k < 0:
        raise HornError("level out of range")
    return max(n - k, -2)


def contractible(n: int, k: int) -> bool:
    return fiber_level(n, k) <= -2


def stabilization_index(n: int) -> int:
    """First tower index from which all later projections are equivalences."""
    if n < -2:
        raise HornError("level out of range")
    return n + 1
