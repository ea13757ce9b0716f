"""Numerical tolerances shared across the toolkit.

Every comparison threshold lives in one record so tests and callers agree on
what "equal" means. The defaults are deliberate: state norms are checked much
tighter than operator defects, and solver certificates sit well above both.
"""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    unit_norm: float = 1e-12        # allowed deviation of a state norm from 1
    phase_cutoff: float = 1e-12     # amplitude modulus below which phase fixing skips an entry
    state_equality: float = 1e-10   # componentwise gap between canonical representatives
    unitarity: float = 1e-10        # max-norm of U^dag U - I
    hermiticity: float = 1e-10      # max-norm of H - H^dag
    countering_slack: float = 1e-12 # slack in payoff comparisons for countering
    indifference: float = 1e-12     # contraction-vector norm below which a player is indifferent
    cycle_match: float = 1e-8       # per-factor distance under which two plays close a cycle
    solver_epsilon: float = 1e-8    # gain bound required of exact-solver certificates


DEFAULT_TOLS = Tolerances()
