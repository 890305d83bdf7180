"""Coherence-tower toolkit.

Builds the finite towers of constancy/coherence data that replace the
plain universal property of propositional truncation when the codomain
is only known to be n-truncated, mechanically checks the equivalence
chains behind them with a telescope rewrite calculus, validates every
contractibility claim against a brute-force finite-groupoid model, and
emits the finite statement in proof-assistant syntax.
"""

__version__ = "0.1.0"
