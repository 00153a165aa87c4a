"""f-divergences, the E_gamma divergence, and Shannon/Renyi/binary entropies.

Every quantity is in nats. Extended reals are plain floats: ``math.inf``
stands for +infinity and propagates through sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import entr, rel_entr

from .errors import InvalidArgument
from .prob import JointPMF, ProbVector, uniform

CurvatureFloor = Callable[[float, float], float]

_GRID = np.logspace(-6, 6, 241)


@dataclass(frozen=True)
class FGenerator:
    """A convex function f on (0, inf) with f(1) = 0.

    ``func`` must accept numpy arrays of positive reals. ``f_at_zero`` is
    lim_{t->0} f(t) and ``slope_at_infinity`` is lim_{t->inf} f(t)/t; both may
    be ``math.inf``. ``curvature_floor(a, b)`` returns inf f'' over
    [a, b] intersected with (0, inf); without it the refined list-decoding
    bound is unavailable.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    f_at_zero: float
    slope_at_infinity: float
    curvature_floor: Optional[CurvatureFloor] = field(default=None, repr=False)
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if not self.check:
            return
        if abs(float(self.func(np.array([1.0]))[0])) > 1e-12:
            raise InvalidArgument(f"generator {self.name!r}: f(1) != 0")
        a, b = np.meshgrid(_GRID, _GRID)
        mid = self.func((a + b) / 2)
        chord = (self.func(a) + self.func(b)) / 2
        # relative slack: f(1e6) can be ~1e7 in magnitude
        slack = 1e-12 * (1.0 + np.abs(chord))
        if np.any(mid > chord + slack):
            raise InvalidArgument(f"generator {self.name!r} fails the midpoint convexity test")

    def __call__(self, t):
        """Evaluate f, extended to t = 0 by its limit."""
        if isinstance(t, (float, int)):
            return float(self.f_at_zero) if t == 0 else float(self.func(float(t)))
        t = np.asarray(t, dtype=float)
        out = np.empty_like(t)
        zero = t == 0
        out[zero] = self.f_at_zero
        if np.any(~zero):
            out[~zero] = self.func(t[~zero])
        return out if out.ndim else float(out)

    def m_f(self, xi1: float, xi2: float) -> float:
        """Curvature floor over [xi1, xi2] intersected with (0, inf)."""
        if self.curvature_floor is None:
            raise InvalidArgument(f"generator {self.name!r} has no curvature floor")
        if xi2 <= 0 or xi1 > xi2:
            raise InvalidArgument(f"empty curvature interval [{xi1}, {xi2}]")
        return float(self.curvature_floor(max(xi1, 0.0), xi2))


def _kl(t):
    return t * np.log(t)


def _tv(t):
    return 0.5 * np.abs(t - 1.0)


def _chi2(t):
    return (t - 1.0) ** 2


KL = FGenerator("kl", _kl, 0.0, math.inf, lambda a, b: 1.0 / b)
TV = FGenerator("tv", _tv, 0.5, 0.5, lambda a, b: 0.0)
CHI2 = FGenerator("chi2", _chi2, 1.0, math.inf, lambda a, b: 2.0)


@lru_cache(maxsize=64)
def egamma_generator(gamma: float) -> FGenerator:
    """Generator max(t - gamma, 0) of the E_gamma divergence."""
    if not gamma >= 1:
        raise InvalidArgument(f"E_gamma needs gamma >= 1, got {gamma!r}")
    g = float(gamma)
    return FGenerator(f"egamma:{g:g}", lambda t: np.maximum(t - g, 0.0), 0.0, 1.0, lambda a, b: 0.0)


REGISTRY = {"kl": KL, "tv": TV, "chi2": CHI2}


def generator(name: str) -> FGenerator:
    """Look up ``kl``, ``tv``, ``chi2`` or ``egamma:<gamma>``."""
    if name in REGISTRY:
        return REGISTRY[name]
    if name.startswith("egamma:"):
        try:
            gamma = float(name.split(":", 1)[1])
        except ValueError:
            raise InvalidArgument(f"bad E_gamma parameter in {name!r}") from None
        return egamma_generator(gamma)
    raise InvalidArgument(f"unknown generator {name!r}; use kl, tv, chi2 or egamma:<gamma>")


def _pair(P, Q) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(P, ProbVector) and isinstance(Q, ProbVector) and not P.same_atoms(Q):
        raise InvalidArgument("P and Q are defined on different atoms")
    p = np.asarray(P.mass if isinstance(P, ProbVector) else P, dtype=float)
    q = np.asarray(Q.mass if isinstance(Q, ProbVector) else Q, dtype=float)
    if p.shape != q.shape:
        raise InvalidArgument(f"P has {p.size} atoms, Q has {q.size}")
    return p, q


def f_divergence(P, Q, f: FGenerator) -> float:
    """D_f(P || Q) = sum_x Q(x) f(P(x)/Q(x)) with the usual boundary conventions."""
    p, q = _pair(P, Q)
    total = 0.0
    both = (p > 0) & (q > 0)
    if np.any(both):
        total += float(np.sum(q[both] * f.func(p[both] / q[both])))
    q_only = q[(p == 0) & (q > 0)].sum()
    if q_only > 0:
        total += q_only * f.f_at_zero
    p_only = p[(q == 0) & (p > 0)].sum()
    if p_only > 0:
        total += p_only * f.slope_at_infinity
    return total


def total_variation(P, Q) -> float:
    p, q = _pair(P, Q)
    return 0.5 * float(np.abs(p - q).sum())


def e_gamma(P, Q, gamma: float) -> float:
    """E_gamma(P || Q) = sum_x (P(x) - gamma Q(x))^+ for gamma >= 1."""
    if not gamma >= 1:
        raise InvalidArgument(f"E_gamma needs gamma >= 1, got {gamma!r}")
    p, q = _pair(P, Q)
    return float(np.maximum(p - gamma * q, 0.0).sum())


def _unit(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise InvalidArgument(f"{name} must lie in [0, 1], got {x!r}")
    return x


def binary_kl(p: float, q: float) -> float:
    """d(p || q) between Bernoulli(p) and Bernoulli(q), possibly +inf."""
    p, q = _unit(p, "p"), _unit(q, "q")
    return float(rel_entr(p, q) + rel_entr(1.0 - p, 1.0 - q))


def binary_entropy(p: float) -> float:
    p = _unit(p, "p")
    return float(entr(p) + entr(1.0 - p))


def _mass(P) -> np.ndarray:
    return np.asarray(P.mass if isinstance(P, ProbVector) else P, dtype=float)


def shannon_entropy(P) -> float:
    return float(entr(_mass(P)).sum())


def renyi_entropy(P, alpha: float) -> float:
    """Renyi entropy of order ``alpha`` > 0 (Shannon entropy at alpha = 1)."""
    if not alpha > 0:
        raise InvalidArgument(f"Renyi order must be positive, got {alpha!r}")
    p = _mass(P)
    p = p[p > 0]
    if alpha == 1:
        return float(entr(p).sum())
    log_p = np.log(p)
    s = np.max(alpha * log_p)
    log_sum = s + math.log(float(np.exp(alpha * log_p - s).sum()))
    return log_sum / (1.0 - alpha)


def conditional_entropy(J: JointPMF) -> float:
    """H(X|Y) in nats."""
    return float(np.dot(J.p_y, entr(J.cond).sum(axis=0)))


def expected_div_to_uniform(J: JointPMF, f: FGenerator) -> float:
    """E_Y[ D_f(P_{X|Y}(.|Y) || U_M) ]."""
    u = uniform(J.M).mass
    return float(sum(py * f_divergence(J.cond[:, j], u, f) for j, py in enumerate(J.p_y)))
