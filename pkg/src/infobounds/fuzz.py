"""Seeded random instances and the invariant campaign run by ``infobounds fuzz``.

Trial ``t`` of a campaign with seed ``s`` draws from ``default_rng([s, t])``,
so every trial is reproducible on its own and the report does not depend on
the order in which trials run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .divergences import CHI2, KL, TV, FGenerator, conditional_entropy, egamma_generator, f_divergence
from .errors import InvalidArgument
from .listdecoding import (
    FixedListRule,
    VariableListRule,
    ak_invert,
    egamma_bound,
    error_prob,
    expected_log_list,
    fano_fixed_invert,
    gen_fano_check,
    gen_fano_invert,
    is_most_probable,
    optimize_gamma,
    refined_bound,
    refined_invert,
    top_l_rule,
)
from .prob import JointPMF, Kernel, ProbVector, push_forward
from .sourcecoding import CodeSpec, campbell_lengths, campbell_verify

TOL = 1e-9
GAMMA_GRID = (1.0, 1.25, 2.0, 4.0)
RHO_GRID = (0.25, 1.0, 4.0)


def registry_generators() -> tuple[FGenerator, ...]:
    return (KL, TV, CHI2, egamma_generator(1.5))


# -- instance generators ----------------------------------------------------------


def random_mass(rng: np.random.Generator, n: int, zeros: bool = True) -> np.ndarray:
    """A random pmf; sometimes sparse, sometimes with repeated values."""
    kind = rng.integers(6)
    if kind == 0:
        p = np.ones(n)
    elif kind == 1:
        # two levels, like the posteriors for which the E_gamma bound is tight
        k = rng.integers(1, n + 1)
        p = np.where(np.arange(n) < k, rng.uniform(1, 3), 1.0)
        rng.shuffle(p)
    else:
        p = rng.dirichlet(np.full(n, rng.choice([0.3, 1.0, 3.0])))
    if zeros and n > 1 and rng.random() < 0.2:
        p[rng.choice(n, size=rng.integers(1, n), replace=False)] = 0.0
    if p.sum() <= 0:
        p[rng.integers(n)] = 1.0
    return p / p.sum()


def random_pmf(rng: np.random.Generator, n: int, zeros: bool = True) -> ProbVector:
    return ProbVector(random_mass(rng, n, zeros))


def random_joint(rng: np.random.Generator, max_M: int = 8, max_ny: int = 4) -> JointPMF:
    M = int(rng.integers(2, max_M + 1))
    ny = int(rng.integers(1, max_ny + 1))
    post = np.column_stack([random_mass(rng, M) for _ in range(ny)])
    py = random_mass(rng, ny, zeros=False)
    return JointPMF(post * py)


def random_fixed_rule(rng: np.random.Generator, M: int, ny: int, L: int) -> FixedListRule:
    return FixedListRule(tuple(frozenset(rng.choice(M, size=L, replace=False).tolist()) for _ in range(ny)))


def random_variable_rule(rng: np.random.Generator, J: JointPMF, most_probable: bool = False) -> VariableListRule:
    lists = []
    for j in range(J.ny):
        size = int(rng.integers(1, J.M + 1))
        if most_probable:
            order = np.argsort(-J.cond[:, j], kind="stable")
            lists.append(frozenset(order[:size].tolist()))
        else:
            lists.append(frozenset(rng.choice(J.M, size=size, replace=False).tolist()))
    return VariableListRule(tuple(lists))


def random_kernel(rng: np.random.Generator, n_in: int, n_out: int) -> Kernel:
    return Kernel(np.vstack([random_mass(rng, n_out) for _ in range(n_in)]))


def random_kraft_lengths(rng: np.random.Generator, n: int, D: int, max_len: int = 8) -> CodeSpec:
    """Random integer lengths, lengthened until Kraft's inequality holds."""
    lengths = rng.integers(1, max_len + 1, size=n)
    while np.sum(float(D) ** -lengths) > 1.0:
        lengths[np.argmin(lengths)] += 1
    return CodeSpec(D, tuple(lengths.tolist()))


# -- campaign ---------------------------------------------------------------------


@dataclass
class SuiteStats:
    checks: int = 0
    violations: int = 0
    worst_margin: float = math.inf
    worst_trial: int = -1
    examples: list = field(default_factory=list)

    def record(self, margin: float, trial: int, what: str = "") -> None:
        """A margin >= -TOL is a pass; the most negative one is kept."""
        self.checks += 1
        if margin < self.worst_margin:
            self.worst_margin, self.worst_trial = float(margin), trial
        if margin < -TOL:
            self.violations += 1
            if len(self.examples) < 5:
                self.examples.append({"trial": trial, "check": what, "margin": float(margin)})

    def as_dict(self) -> dict:
        return {"checks": self.checks, "violations": self.violations, "worst_margin": self.worst_margin,
                "worst_trial": self.worst_trial, "examples": self.examples}


def _margin(a: float, b: float) -> float:
    """a - b with inf - inf read as a tie."""
    if math.isinf(a) and math.isinf(b) and a == b:
        return 0.0
    return a - b


def check_dpi(rng, trial, stats: dict[str, SuiteStats], max_n: int = 8) -> None:
    n = int(rng.integers(2, max_n + 1))
    m = int(rng.integers(1, max_n + 1))
    P, Q = random_pmf(rng, n), random_pmf(rng, n)
    K = random_kernel(rng, n, m)
    PK, QK = push_forward(P, K), push_forward(Q, K)
    for f in registry_generators():
        stats["dpi"].record(_margin(f_divergence(P, Q, f), f_divergence(PK, QK, f)), trial, f.name)


def check_fixed_list(rng, trial, stats: dict[str, SuiteStats], J: JointPMF) -> None:
    L = int(rng.integers(1, J.M))
    pl_top = None
    h = conditional_entropy(J)
    for rule in (top_l_rule(J, L), random_fixed_rule(rng, J.M, J.ny, L)):
        pl = error_prob(J, rule)
        top = is_most_probable(J, rule)
        if top:
            pl_top = pl
        for f in registry_generators():
            chk = gen_fano_check(J, rule, f)
            stats["gen_fano"].record(0.0 if chk.holds else chk.lhs - chk.rhs, trial, f"{f.name} inequality")
            stats["gen_fano"].record(pl - gen_fano_invert(chk.lhs, J.M, L, f).p, trial, f"{f.name} inversion")
        stats["fano_entropy"].record(pl - fano_fixed_invert(h, J.M, L).p, trial, "inversion")
        for f in (KL, CHI2):
            rep = refined_bound(J, rule, f)
            stats["refined_any_rule"].record(_margin(rep.lhs, rep.bound_a), trial, f"{f.name} inequality")
            stats["refined_any_rule"].record(pl - refined_invert(J, L, f, "a").p, trial, f"{f.name} inversion")
            if rep.bound_b is not None:
                stats["refined_top_rule"].record(_margin(rep.lhs, rep.bound_b), trial, f"{f.name} inequality")
    for f in (KL, CHI2):
        stats["refined_top_rule"].record(pl_top - refined_invert(J, L, f, "b").p, trial, f"{f.name} inversion")


def check_variable_list(rng, trial, stats: dict[str, SuiteStats], J: JointPMF) -> None:
    h = conditional_entropy(J)
    for rule in (random_variable_rule(rng, J), random_variable_rule(rng, J, most_probable=True)):
        pl = error_prob(J, rule)
        inv = ak_invert(h, J.M, expected_log_list(J, rule), rule.max_size)
        stats["variable_list"].record(pl - inv.p_general, trial, "general")
        stats["variable_list"].record(pl - inv.p_maxlist, trial, "max list")
        _, best = optimize_gamma(J, rule)
        stats["egamma"].record(pl - best, trial, "optimized gamma")
        for g in GAMMA_GRID:
            stats["egamma"].record(pl - egamma_bound(J, rule, g), trial, f"gamma={g}")
            stats["egamma"].record(best - egamma_bound(J, rule, g), trial, f"optimum dominates gamma={g}")


def check_campbell(rng, trial, stats: dict[str, SuiteStats], max_n: int = 10) -> None:
    n = int(rng.integers(1, max_n + 1))
    P = random_pmf(rng, n)
    D = int(rng.choice([2, 3]))
    spec = random_kraft_lengths(rng, n, D)
    positive = random_pmf(rng, n, zeros=False)
    for rho in RHO_GRID:
        stats["campbell_converse"].record(campbell_verify(P, spec, rho).converse_margin, trial, f"rho={rho}")
        tilted = campbell_verify(positive, campbell_lengths(positive, rho, D), rho)
        stats["campbell_converse"].record(tilted.converse_margin, trial, f"tilted code rho={rho}")
        stats["campbell_achievability"].record(tilted.slack - tilted.achievability_margin, trial, f"rho={rho}")


SUITES = ("dpi", "gen_fano", "fano_entropy", "refined_any_rule", "refined_top_rule", "variable_list", "egamma", "campbell_converse", "campbell_achievability")


def run_trial(seed: int, trial: int, stats: dict[str, SuiteStats], max_M: int = 8, max_ny: int = 4) -> None:
    rng = np.random.default_rng([seed, trial])
    check_dpi(rng, trial, stats)
    J = random_joint(rng, max_M, max_ny)
    check_fixed_list(rng, trial, stats, J)
    check_variable_list(rng, trial, stats, J)
    check_campbell(rng, trial, stats)


def fuzz_campaign(seed: int, trials: int, max_M: int = 8, max_ny: int = 4) -> dict:
    """Run every invariant suite on ``trials`` seeded instances."""
    if not isinstance(trials, (int, np.integer)) or trials < 1:
        raise InvalidArgument(f"trials must be a positive integer, got {trials!r}")
    if max_M < 2 or max_ny < 1:
        raise InvalidArgument("need max_M >= 2 and max_ny >= 1")
    stats = {name: SuiteStats() for name in SUITES}
    for t in range(int(trials)):
        run_trial(int(seed), t, stats, max_M, max_ny)
    return {
        "seed": int(seed),
        "trials": int(trials),
        "sizes": {"max_M": max_M, "max_ny": max_ny},
        "tolerance": TOL,
        "suites": {k: v.as_dict() for k, v in stats.items()},
        "total_violations": sum(v.violations for v in stats.values()),
    }
