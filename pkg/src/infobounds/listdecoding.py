"""Exact list-decoding error probabilities and their lower bounds.

A list rule maps every observation y to a set of candidate x-indices; an
error occurs when the true x is not in the list. Lower bounds come in three
families:

* f-divergence (generalized Fano) bounds for fixed list size L, with the
  curvature-refined version when f'' has a positive floor;
* entropy bounds for variable list size (``ak_invert``);
* the explicit E_gamma bound, which is tight for two-level posteriors.

Bounds stated as an inequality between a known quantity and a function of
the error probability are turned into lower bounds by monotone inversion.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np
from scipy.special import comb

from .divergences import FGenerator, binary_entropy, binary_kl, expected_div_to_uniform
from .errors import EnumerationLimit, Infeasible, InvalidArgument, NotApplicable, PreconditionError
from .prob import JointPMF

BISECT_TOL = 1e-12
BISECT_MAX_ITER = 200
BRUTE_FORCE_LIMIT = 10**6


@dataclass(frozen=True)
class VariableListRule:
    """One non-empty set of x-indices per observation, in y order."""

    lists: tuple[frozenset[int], ...]

    def __post_init__(self):
        lists = tuple(frozenset(int(x) for x in s) for s in self.lists)
        if not lists:
            raise InvalidArgument("a rule needs at least one observation")
        for j, s in enumerate(lists):
            if not s:
                raise InvalidArgument(f"list for observation {j} is empty")
        object.__setattr__(self, "lists", lists)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(s) for s in self.lists])

    @property
    def max_size(self) -> int:
        return int(self.sizes.max())

    def check_against(self, J: JointPMF) -> None:
        if len(self.lists) != J.ny:
            raise InvalidArgument(f"rule has {len(self.lists)} lists for {J.ny} observations")
        for j, s in enumerate(self.lists):
            if min(s) < 0 or max(s) >= J.M:
                raise InvalidArgument(f"list for observation {j} has an index outside 0..{J.M - 1}")


@dataclass(frozen=True)
class FixedListRule(VariableListRule):
    """A rule whose lists all have the same size L."""

    L: int = field(default=0)

    def __post_init__(self):
        super().__post_init__()
        sizes = {len(s) for s in self.lists}
        if len(sizes) != 1:
            raise InvalidArgument(f"fixed-size rule has lists of sizes {sorted(sizes)}")
        L = sizes.pop()
        if self.L and self.L != L:
            raise InvalidArgument(f"declared L={self.L} but lists have size {L}")
        object.__setattr__(self, "L", L)

    def check_against(self, J: JointPMF) -> None:
        super().check_against(J)
        if not self.L < J.M:
            raise InvalidArgument(f"fixed list size L={self.L} must be below M={J.M}")


Rule = Union[FixedListRule, VariableListRule]


def error_prob(J: JointPMF, rule: Rule) -> float:
    """P[X not in L(Y)]."""
    rule.check_against(J)
    covered = sum(J.mass[list(s), j].sum() for j, s in enumerate(rule.lists))
    return float(min(max(1.0 - covered, 0.0), 1.0))


def _top_indices(col: np.ndarray, L: int) -> list[int]:
    # stable sort on -p puts the lowest index first among ties
    return sorted(int(i) for i in np.argsort(-col, kind="stable")[:L])


def top_l_rule(J: JointPMF, L: int) -> FixedListRule:
    """Per observation, the L most probable x (ties go to the lowest index)."""
    if not isinstance(L, (int, np.integer)) or not 1 <= L < J.M:
        raise InvalidArgument(f"L must satisfy 1 <= L < M={J.M}, got {L!r}")
    return FixedListRule(tuple(frozenset(_top_indices(J.cond[:, j], int(L))) for j in range(J.ny)))


def is_most_probable(J: JointPMF, rule: Rule, tol: float = 1e-12) -> bool:
    """True iff every list holds |L(y)| most probable elements (any tie order)."""
    rule.check_against(J)
    for j, s in enumerate(rule.lists):
        col = J.cond[:, j]
        inside = col[list(s)]
        outside = np.delete(col, list(s))
        if outside.size and inside.min() < outside.max() - tol:
            return False
    return True


# -- fixed list size: generalized Fano ------------------------------------------


def fano_rhs(p: float, M: int, L: int, f: FGenerator) -> float:
    """Right side of the generalized Fano inequality at error probability p."""
    a = L / M
    t1 = M * (1.0 - p) / L
    t2 = M * p / (M - L)
    return _wsum(a, f(t1), 1.0 - a, f(t2))


def _wsum(w1: float, v1: float, w2: float, v2: float) -> float:
    # 0 * inf contributes nothing
    return (w1 * v1 if w1 else 0.0) + (w2 * v2 if w2 else 0.0)


@dataclass(frozen=True)
class FanoCheck:
    lhs: float
    rhs: float
    holds: bool
    error_prob: float


def gen_fano_check(J: JointPMF, rule: FixedListRule, f: FGenerator, tol: float = 1e-9) -> FanoCheck:
    """Evaluate both sides of the generalized Fano inequality for a fixed-size rule."""
    if not isinstance(rule, FixedListRule):
        raise InvalidArgument("generalized Fano needs a fixed-size rule")
    pl = error_prob(J, rule)
    lhs = expected_div_to_uniform(J, f)
    rhs = fano_rhs(pl, J.M, rule.L, f)
    holds = math.isinf(lhs) or lhs >= rhs - tol
    return FanoCheck(lhs, rhs, holds, pl)


def _bisect_first(pred: Callable[[float], bool], lo: float, hi: float) -> tuple[float, int]:
    """Smallest x in [lo, hi] with pred(x) true, for pred monotone false -> true.

    Returns (x, iterations); assumes pred(hi) is true and pred(lo) is false.
    """
    it = 0
    while hi - lo > BISECT_TOL and it < BISECT_MAX_ITER:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
        it += 1
    return hi, it


@dataclass(frozen=True)
class Inversion:
    """Lower bound on the error probability obtained by inverting a bound."""

    p: float
    iterations: int = 0


def _check_ml(M: int, L: int) -> None:
    if not (isinstance(M, (int, np.integer)) and isinstance(L, (int, np.integer)) and 1 <= L < M):
        raise InvalidArgument(f"need integers 1 <= L < M, got M={M!r}, L={L!r}")


def gen_fano_invert(lhs: float, M: int, L: int, f: FGenerator) -> Inversion:
    """Smallest p in [0, 1 - L/M] whose generalized-Fano right side is <= lhs.

    The right side is convex in p and vanishes at 1 - L/M, hence
    non-increasing on the search interval.
    """
    if not lhs >= -1e-12:
        raise InvalidArgument(f"divergence must be non-negative, got {lhs!r}")
    lhs = max(lhs, 0.0)
    _check_ml(M, L)
    p0 = 1.0 - L / M
    if math.isinf(lhs) or fano_rhs(0.0, M, L, f) <= lhs:
        return Inversion(0.0)
    p, it = _bisect_first(lambda p: fano_rhs(p, M, L, f) <= lhs, 0.0, p0)
    return Inversion(p, it)


def fano_fixed_invert(h_cond: float, M: int, L: int) -> Inversion:
    """Lower bound from H(X|Y) <= ln M - d(P_L || 1 - L/M), via the binary divergence."""
    if not h_cond >= 0:
        raise InvalidArgument(f"conditional entropy must be non-negative, got {h_cond!r}")
    _check_ml(M, L)
    q = 1.0 - L / M
    budget = math.log(M) - h_cond
    if binary_kl(0.0, q) <= budget:
        return Inversion(0.0)
    if budget <= 0.0:
        return Inversion(q)
    p, it = _bisect_first(lambda p: binary_kl(p, q) <= budget, 0.0, q)
    return Inversion(p, it)


# -- refined (curvature) bound ----------------------------------------------------


def expected_posterior(J: JointPMF) -> float:
    """E[P_{X|Y}(X|Y)] = sum_y P_Y(y) sum_x P_{X|Y}(x|y)^2."""
    return float(np.dot(J.p_y, (J.cond**2).sum(axis=0)))


@dataclass(frozen=True)
class RefinedBoundReport:
    xi1_star: float
    xi2_star: float
    m_f_used: float
    expected_posterior: float
    error_prob: float
    lhs: float
    base_rhs: float
    correction_a: float
    bound_a: float
    correction_b: Optional[float] = None
    bound_b: Optional[float] = None
    correction_b_nonnegative: Optional[bool] = None


def curvature_params(J: JointPMF, f: FGenerator) -> tuple[float, float, float]:
    """(xi1*, xi2*, m_f) for the refined bound; raises if m_f is not positive."""
    xi1 = J.M * float(J.cond.min())
    xi2 = J.M * float(J.cond.max())
    if f.curvature_floor is None:
        raise NotApplicable(f"generator {f.name!r} has no curvature floor")
    m_f = f.m_f(xi1, xi2)
    if not m_f > 0:
        raise NotApplicable(f"generator {f.name!r} has zero curvature floor on [{xi1:g}, {xi2:g}]")
    return xi1, xi2, m_f


def _correction_a(p: float, M: int, L: int, m_f: float, e_post: float) -> float:
    return 0.5 * m_f * M * max(e_post - (1.0 - p) / L - p / (M - L), 0.0)


def _correction_b(p: float, M: int, L: int, m_f: float, e_post: float) -> float:
    return 0.5 * m_f * M * (e_post - (1.0 - p) / L)


def refined_bound(J: JointPMF, rule: FixedListRule, f: FGenerator, part_b: Optional[bool] = None) -> RefinedBoundReport:
    """Curvature-refined generalized Fano bound, parts a) and b).

    Part b) needs the rule to list the L most probable elements for every y.
    With ``part_b=None`` it is evaluated only when that holds; ``part_b=True``
    raises :class:`PreconditionError` otherwise. The part b) correction is
    reported with its sign and may be negative.
    """
    if not isinstance(rule, FixedListRule):
        raise InvalidArgument("refined bound needs a fixed-size rule")
    xi1, xi2, m_f = curvature_params(J, f)
    chk = gen_fano_check(J, rule, f)
    M, L, pl = J.M, rule.L, chk.error_prob
    e_post = expected_posterior(J)
    ca = _correction_a(pl, M, L, m_f, e_post)
    report = dict(
        xi1_star=xi1, xi2_star=xi2, m_f_used=m_f, expected_posterior=e_post, error_prob=pl,
        lhs=chk.lhs, base_rhs=chk.rhs, correction_a=ca, bound_a=chk.rhs + ca,
    )
    top = is_most_probable(J, rule)
    if part_b and not top:
        raise PreconditionError("part b) needs a rule listing the L most probable elements")
    if top and part_b is not False:
        cb = _correction_b(pl, M, L, m_f, e_post)
        report.update(correction_b=cb, bound_b=chk.rhs + cb, correction_b_nonnegative=cb >= -1e-12)
    return RefinedBoundReport(**report)


def _convex_first_below(g: Callable[[float], float], level: float, lo: float, hi: float) -> tuple[Optional[float], int]:
    """Smallest x in [lo, hi] with g(x) <= level, for convex g; None if there is none."""
    if g(lo) <= level:
        return lo, 0
    # golden-section search for the minimizer
    a, b = lo, hi
    r = (math.sqrt(5) - 1) / 2
    c, d = b - r * (b - a), a + r * (b - a)
    gc, gd = g(c), g(d)
    it = 0
    while b - a > BISECT_TOL and it < BISECT_MAX_ITER:
        it += 1
        if gc <= gd:
            b, d, gd = d, c, gc
            c = b - r * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + r * (b - a)
            gd = g(d)
    xmin = min((a, b, c, d, hi), key=g)
    if g(xmin) > level:
        return None, it
    x, it2 = _bisect_first(lambda x: g(x) <= level, lo, xmin)
    return x, it + it2


def refined_invert(J: JointPMF, L: int, f: FGenerator, part: str = "a") -> Inversion:
    """Lower bound on P_L from the refined bound, for any fixed-size-L rule (part a)
    or for the most-probable-L rule (part b).

    Both right sides are convex in the error probability, so the feasible set
    is an interval and its left end is the bound.
    """
    _check_ml(J.M, L)
    _, _, m_f = curvature_params(J, f)
    M, e_post = J.M, expected_posterior(J)
    lhs = expected_div_to_uniform(J, f)
    if part == "a":
        corr = _correction_a
    elif part == "b":
        corr = _correction_b
    else:
        raise InvalidArgument(f"part must be 'a' or 'b', got {part!r}")
    if math.isinf(lhs):
        return Inversion(0.0)

    def g(p: float) -> float:
        return fano_rhs(p, M, L, f) + corr(p, M, L, m_f, e_post)

    # rounding allowance; a larger level only lowers the returned bound
    p, it = _convex_first_below(g, lhs + 1e-12, 0.0, 1.0)
    if p is None:
        raise Infeasible("refined bound excludes every error probability")
    return Inversion(p, it)


# -- variable list size -----------------------------------------------------------


def expected_log_list(J: JointPMF, rule: Rule) -> float:
    """E[ln |L(Y)|] in nats."""
    rule.check_against(J)
    return float(np.dot(J.p_y, np.log(rule.sizes)))


def expected_list_size(J: JointPMF, rule: Rule) -> float:
    rule.check_against(J)
    return float(np.dot(J.p_y, rule.sizes))


@dataclass(frozen=True)
class AKInversion:
    p_general: float
    p_maxlist: Optional[float]
    iterations: int = 0


def _increasing_invert(g: Callable[[float], float], target: float, cap: float) -> tuple[float, int]:
    if g(0.0) >= target:
        return 0.0, 0
    if g(cap) < target:
        raise Infeasible(f"no error probability below {cap:g} meets the bound")
    return _bisect_first(lambda p: g(p) >= target, 0.0, cap)


def ak_invert(h_cond: float, M: int, e_log_list: float, N: Optional[int] = None) -> AKInversion:
    """Invert the variable-list Fano bounds.

    ``p_general`` is the smallest p with h(p) + E[ln|L|] + p ln M >= H(X|Y);
    ``p_maxlist`` uses (1 - p) ln N in place of E[ln|L|]. Both left sides
    increase up to M/(M+1) and M/(M+N) respectively, which caps the search.
    """
    if not h_cond >= 0:
        raise InvalidArgument(f"conditional entropy must be non-negative, got {h_cond!r}")
    if not (isinstance(M, (int, np.integer)) and M >= 1):
        raise InvalidArgument(f"M must be a positive integer, got {M!r}")
    ln_m = math.log(M)

    def general(p):
        return binary_entropy(p) + e_log_list + p * ln_m

    pg, it = _increasing_invert(general, h_cond, M / (M + 1))
    pm = None
    if N is not None:
        if not (isinstance(N, (int, np.integer)) and 1 <= N <= M):
            raise InvalidArgument(f"N must satisfy 1 <= N <= M, got {N!r}")
        ln_n = math.log(N)

        def maxlist(p):
            return binary_entropy(p) + (1.0 - p) * ln_n + p * ln_m

        pm, it2 = _increasing_invert(maxlist, h_cond, M / (M + N))
        it += it2
    return AKInversion(pg, pm, it)


# -- E_gamma bound ----------------------------------------------------------------


def _check_gamma(gamma: float) -> None:
    if not gamma >= 1:
        raise InvalidArgument(f"gamma must be >= 1, got {gamma!r}")


def egamma_bound(J: JointPMF, rule: Rule, gamma: float) -> float:
    """(1+g)/2 - g E|L(Y)|/M - 1/2 E sum_x |P_{X|Y}(x|Y) - g/M|; may be negative."""
    _check_gamma(gamma)
    M = J.M
    spread = np.dot(J.p_y, np.abs(J.cond - gamma / M).sum(axis=0))
    return float((1.0 + gamma) / 2 - gamma * expected_list_size(J, rule) / M - 0.5 * spread)


def optimize_gamma(J: JointPMF, rule: Rule, tie_tol: float = 1e-12) -> tuple[float, float]:
    """Maximize the E_gamma bound over gamma >= 1.

    The objective is concave and piecewise linear with breakpoints M P_{X|Y}(x|y)
    and decreases beyond the last one, so the maximum sits at gamma = 1 or at a
    breakpoint above 1. Returns (gamma*, bound*) with the lowest gamma among
    ties.
    """
    bps = J.M * J.cond.ravel()
    cands = np.unique(np.concatenate([[1.0], bps[bps >= 1.0]]))
    vals = [egamma_bound(J, rule, g) for g in cands]
    best = max(vals)
    i = next(i for i, v in enumerate(vals) if v >= best - tie_tol)
    return float(cands[i]), float(best)


@dataclass(frozen=True)
class EqualityWitness:
    gamma: float
    alpha: tuple[float, ...]
    satisfied: bool
    violations: tuple[tuple[int, str], ...] = ()


def equality_check(J: JointPMF, rule: Rule, gamma: float, tol: float = 1e-12) -> EqualityWitness:
    """Certify the sufficient condition for the E_gamma bound to be tight.

    For each y: the list size is at most M/gamma, the list holds the most
    probable elements, the posterior takes one value alpha(y) on the list and
    one value off it, and gamma/M <= alpha(y) <= 1/|L(y)|.
    """
    _check_gamma(gamma)
    rule.check_against(J)
    M = J.M
    alphas = []
    bad: list[tuple[int, str]] = []
    for j, s in enumerate(rule.lists):
        col = J.cond[:, j]
        idx = sorted(s)
        n = len(idx)
        inside = col[idx]
        outside = np.delete(col, idx)
        alpha = float(inside.mean())
        alphas.append(alpha)
        if n > M / gamma + tol:
            bad.append((j, f"list size {n} exceeds M/gamma = {M / gamma:g}"))
        if outside.size and inside.min() < outside.max() - tol:
            bad.append((j, "list does not hold the most probable elements"))
        if np.max(np.abs(inside - alpha)) > tol:
            bad.append((j, "posterior is not constant on the list"))
        if outside.size:
            rest = (1.0 - alpha * n) / (M - n)
            if np.max(np.abs(outside - rest)) > tol:
                bad.append((j, "posterior is not uniform off the list"))
        if not (gamma / M - tol <= alpha <= 1.0 / n + tol):
            bad.append((j, f"alpha = {alpha:g} outside [gamma/M, 1/|L|] = [{gamma / M:g}, {1 / n:g}]"))
    return EqualityWitness(float(gamma), tuple(alphas), not bad, tuple(bad))


# -- exhaustive oracle ------------------------------------------------------------


def brute_force_min_error(J: JointPMF, L: int) -> tuple[FixedListRule, float]:
    """Minimum error probability over every fixed-size-L rule, by enumeration."""
    if not isinstance(L, (int, np.integer)) or not 1 <= L < J.M:
        raise InvalidArgument(f"L must satisfy 1 <= L < M={J.M}, got {L!r}")
    count = comb(J.M, L, exact=True) ** J.ny
    if count > BRUTE_FORCE_LIMIT:
        raise EnumerationLimit(f"{count} rules exceed the limit of {BRUTE_FORCE_LIMIT}")
    subsets = list(itertools.combinations(range(J.M), int(L)))
    best_rule, best = None, math.inf
    for choice in itertools.product(subsets, repeat=J.ny):
        covered = sum(J.mass[list(s), j].sum() for j, s in enumerate(choice))
        err = 1.0 - covered
        if err < best:
            best_rule, best = choice, err
    return FixedListRule(tuple(frozenset(s) for s in best_rule)), float(max(best, 0.0))
