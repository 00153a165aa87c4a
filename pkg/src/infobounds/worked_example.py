"""The 5 x 2 worked example: a two-level posterior for which the E_gamma list
bound is tight while the entropy-based bounds are loose."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

from .divergences import KL, conditional_entropy
from .listdecoding import (
    VariableListRule,
    ak_invert,
    brute_force_min_error,
    egamma_bound,
    equality_check,
    error_prob,
    expected_log_list,
    expected_posterior,
    optimize_gamma,
    refined_bound,
    top_l_rule,
)
from .prob import JointPMF, map_error

_A, _B, _C, _D = Fraction(1, 8), Fraction(1, 16), Fraction(1, 24), Fraction(3, 16)
EXAMPLE_PXY = (
    (_A, _C),
    (_A, _C),
    (_A, _C),
    (_B, _D),
    (_B, _D),
)
EXAMPLE_LISTS = ({0, 1, 2}, {3, 4})
EXAMPLE_GAMMA = 1.25


def example_joint() -> JointPMF:
    return JointPMF([[float(v) for v in row] for row in EXAMPLE_PXY], ("0", "1", "2", "3", "4"), ("0", "1"))


def example_rule() -> VariableListRule:
    return VariableListRule(tuple(frozenset(s) for s in EXAMPLE_LISTS))


def example_joint_json() -> dict:
    return {"x": ["0", "1", "2", "3", "4"], "y": ["0", "1"],
            "pxy": [[[v.numerator, v.denominator] for v in row] for row in EXAMPLE_PXY]}


def example_rule_json() -> dict:
    return {"lists": {"0": ["0", "1", "2"], "1": ["3", "4"]}}


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tol

    def as_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def reproduce_paper() -> list[Check]:
    """Recompute every reference value of the worked example."""
    J, rule = example_joint(), example_rule()
    h = conditional_entropy(J)
    inv = ak_invert(h, J.M, expected_log_list(J, rule), rule.max_size)
    witness = equality_check(J, rule, EXAMPLE_GAMMA)
    _, g_best = optimize_gamma(J, rule)
    kl_report = refined_bound(J, top_l_rule(J, 2), KL)
    checks = [
        Check("H(X|Y) [bits]", h / math.log(2), 2.1038, 5e-4),
        Check("H(X|Y) exact form [bits]", h / math.log(2), 2.5 - 0.25 * math.log2(3), 1e-12),
        Check("list error probability", error_prob(J, rule), 0.25, 1e-12),
        Check("E_gamma bound at gamma=5/4", egamma_bound(J, rule, EXAMPLE_GAMMA), 0.25, 1e-12),
        Check("E_gamma bound optimized over gamma", g_best, 0.25, 1e-12),
        Check("variable-list Fano bound", inv.p_general, 0.1206, 5e-4),
        Check("max-list Fano bound (N=3)", inv.p_maxlist, 0.0939, 5e-4),
        Check("equality condition satisfied", float(witness.satisfied), 1.0, 0.0),
        Check("alpha(0)", witness.alpha[0], 0.25, 1e-12),
        Check("alpha(1)", witness.alpha[1], 0.375, 1e-12),
        Check("MAP error", map_error(J), 11 / 16, 1e-12),
        Check("top-3 minimum error (exhaustive)", brute_force_min_error(J, 3)[1], 5 / 24, 1e-12),
        Check("xi1*", kl_report.xi1_star, 5 / 12, 1e-12),
        Check("xi2*", kl_report.xi2_star, 15 / 8, 1e-12),
        Check("m_f for kl", kl_report.m_f_used, 8 / 15, 1e-12),
        Check("E[P(X|Y)]", expected_posterior(J), 25 / 96, 1e-12),
    ]
    return checks
