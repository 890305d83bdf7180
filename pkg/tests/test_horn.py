from itertools import combinations

import pytest

from cohtower.horn import (
    HornError,
    HornSpec,
    alpha_sequence,
    chain_side_condition,
    contractible,
    fiber_level,
    horn_poset,
    is_subset_downwards_closed,
    s_chain,
    stabilization_index,
)


def fs(*xs):
    return frozenset(xs)


def all_specs(universe=(0, 1, 2, 3, 4)):
    for r in range(2, len(universe) + 1):
        for combo in combinations(universe, r):
            for k in combo:
                yield HornSpec(fs(*combo), k)


def test_horn_poset_examples():
    assert horn_poset(HornSpec(fs(0, 1), 0)) == {fs(0)}
    got = horn_poset(HornSpec(fs(0, 1, 2), 0))
    assert got == {fs(0), fs(1), fs(2), fs(0, 1), fs(0, 2)}
    for spec in all_specs((0, 1, 2, 3)):
        assert spec.s not in horn_poset(spec)


def test_horn_poset_guards():
    with pytest.raises(HornError):
        HornSpec(fs(0, 1), 7)
    with pytest.raises(HornError):
        horn_poset(HornSpec(fs(0), 0))


def test_alpha_sequence_examples():
    assert alpha_sequence(HornSpec(fs(0, 1, 2), 0)) == [fs(1), fs(2), fs(1, 2)]
    assert alpha_sequence(HornSpec(fs(0, 1), 1)) == [fs(0)]
    for spec in all_specs():
        seq = alpha_sequence(spec)
        assert len(seq) == 2 ** (len(spec.s) - 1) - 1
        assert all(len(a) <= len(b) for a, b in zip(seq, seq[1:]))
        assert all(spec.k not in a for a in seq)


def test_s_chain_example():
    chain = s_chain(HornSpec(fs(0, 1, 2), 0))
    states = chain.states()
    assert states[0] == {fs(0)}
    assert states[1] == {fs(0), fs(1), fs(0, 1)}
    assert states[2] == {fs(0), fs(1), fs(0, 1), fs(2), fs(0, 2)}
    assert states[2] == horn_poset(HornSpec(fs(0, 1, 2), 0))
    assert states[3] == states[2] | {fs(1, 2), fs(0, 1, 2)}

    tiny = s_chain(HornSpec(fs(0, 1), 0))
    assert tiny.states() == [
        frozenset({fs(0)}),
        frozenset({fs(0), fs(1), fs(0, 1)}),
    ]


def test_s_chain_full_validation():
    # downward closure at every step, disjoint additions, single coverage,
    # endpoint identities, and the pullback side condition
    for spec in all_specs():
        chain = s_chain(spec)
        states = chain.states()
        assert len(chain.steps) == 2 ** (len(spec.s) - 1) - 1

        seen = set(states[0])
        for (a, ak), after in zip(chain.steps, states[1:]):
            assert a not in seen and ak not in seen
            seen |= {a, ak}
            assert is_subset_downwards_closed(after)
        assert len(seen) == 2 ** len(spec.s) - 1

        assert states[-1] == frozenset(
            frozenset(c)
            for r in range(1, len(spec.s) + 1)
            for c in combinations(sorted(spec.s), r)
        )
        assert states[-2] == horn_poset(spec)
        assert chain_side_condition(spec, chain)


def test_fiber_level_examples():
    for n in (-2, -1, 0, 1, 5):
        assert fiber_level(n, 0) == n
    assert fiber_level(0, 2) == -2
    assert contractible(0, 2)
    assert fiber_level(1, 2) == -1
    assert not contractible(1, 2)


def test_fiber_level_antitone_and_floor():
    for n in range(-2, 4):
        levels = [fiber_level(n, k) for k in range(0, 8)]
        assert all(a >= b for a, b in zip(levels, levels[1:]))
        for k in range(n + 2, 8):
            assert levels[k] == -2 if k >= 0 else True


def test_stabilization_index():
    assert stabilization_index(-1) == 0
    assert stabilization_index(0) == 1
    assert stabilization_index(1) == 2
