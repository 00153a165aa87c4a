"""Finite probability containers and the MAP error.

All containers are immutable: masses are stored in read-only numpy arrays
and renormalized once at construction so downstream sums are exact to
machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import InvalidArgument, InvalidPMF

DEFAULT_TOL = 1e-9


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(n))


def _check_labels(labels: Sequence, n: int, what: str) -> tuple[str, ...]:
    labels = tuple(str(s) for s in labels)
    if len(labels) != n:
        raise InvalidArgument(f"{what}: {len(labels)} labels for {n} atoms")
    if len(set(labels)) != n:
        raise InvalidArgument(f"{what}: labels are not distinct")
    return labels


def _normalized(raw, tolerance: float, what: str) -> np.ndarray:
    a = np.asarray(raw, dtype=float)
    if a.size == 0:
        raise InvalidPMF(f"{what}: empty mass vector")
    if not np.all(np.isfinite(a)):
        raise InvalidPMF(f"{what}: non-finite mass")
    if np.any(a < 0):
        raise InvalidPMF(f"{what}: negative mass {a.min()!r}")
    total = a.sum()
    if abs(total - 1.0) > tolerance:
        raise InvalidPMF(f"{what}: masses sum to {total!r}, not 1")
    return a / total


@dataclass(frozen=True, eq=False)
class ProbVector:
    """A probability mass function over labeled atoms."""

    mass: np.ndarray
    labels: tuple[str, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        a = np.asarray(self.mass, dtype=float)
        if a.ndim != 1:
            raise InvalidPMF("mass must be one-dimensional")
        a = _normalized(a, DEFAULT_TOL, "ProbVector")
        labels = _default_labels(a.size) if self.labels is None else self.labels
        object.__setattr__(self, "labels", _check_labels(labels, a.size, "ProbVector"))
        object.__setattr__(self, "mass", _frozen(a))

    def __len__(self) -> int:
        return self.mass.size

    def __repr__(self) -> str:
        body = ", ".join(f"{l}: {m:.6g}" for l, m in zip(self.labels, self.mass))
        return f"ProbVector({{{body}}})"

    def same_atoms(self, other: "ProbVector") -> bool:
        return self.labels == other.labels


@dataclass(frozen=True, eq=False)
class Kernel:
    """A row-stochastic map: one output pmf per input symbol.

    ``matrix[i, j]`` is the probability of output ``out_labels[j]`` given input
    ``in_labels[i]``.
    """

    matrix: np.ndarray
    in_labels: tuple[str, ...] = None  # type: ignore[assignment]
    out_labels: tuple[str, ...] = None  # type: ignore[assignment]
    tolerance: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        w = np.asarray(self.matrix, dtype=float)
        if w.ndim != 2 or w.shape[0] == 0 or w.shape[1] == 0:
            raise InvalidArgument("kernel must be a non-empty 2-D array")
        rows = np.vstack([_normalized(r, self.tolerance, f"kernel row {i}") for i, r in enumerate(w)])
        n_in, n_out = rows.shape
        in_labels = _default_labels(n_in) if self.in_labels is None else self.in_labels
        out_labels = _default_labels(n_out) if self.out_labels is None else self.out_labels
        object.__setattr__(self, "in_labels", _check_labels(in_labels, n_in, "kernel input"))
        object.__setattr__(self, "out_labels", _check_labels(out_labels, n_out, "kernel output"))
        object.__setattr__(self, "matrix", _frozen(rows))

    def row(self, i: int) -> ProbVector:
        return ProbVector(self.matrix[i], self.out_labels)


@dataclass(frozen=True, eq=False)
class JointPMF:
    """Joint pmf of (X, Y), stored as an M x |Y| matrix with x-indexed rows."""

    mass: np.ndarray
    x_labels: tuple[str, ...] = None  # type: ignore[assignment]
    y_labels: tuple[str, ...] = None  # type: ignore[assignment]
    tolerance: float = field(default=DEFAULT_TOL, repr=False)

    def __post_init__(self):
        a = np.asarray(self.mass, dtype=float)
        if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
            raise InvalidArgument("joint pmf must be a non-empty 2-D array")
        flat = _normalized(a.ravel(), self.tolerance, "JointPMF")
        a = flat.reshape(a.shape)
        if np.any(a.sum(axis=0) <= 0):
            bad = int(np.flatnonzero(a.sum(axis=0) <= 0)[0])
            raise InvalidPMF(f"JointPMF: column {bad} has zero mass (unobservable y)")
        M, ny = a.shape
        xl = _default_labels(M) if self.x_labels is None else self.x_labels
        yl = _default_labels(ny) if self.y_labels is None else self.y_labels
        object.__setattr__(self, "x_labels", _check_labels(xl, M, "JointPMF x"))
        object.__setattr__(self, "y_labels", _check_labels(yl, ny, "JointPMF y"))
        object.__setattr__(self, "mass", _frozen(a))

    @property
    def M(self) -> int:
        return self.mass.shape[0]

    @property
    def ny(self) -> int:
        return self.mass.shape[1]

    @cached_property
    def p_x(self) -> np.ndarray:
        return _frozen(self.mass.sum(axis=1))

    @cached_property
    def p_y(self) -> np.ndarray:
        return _frozen(self.mass.sum(axis=0))

    @cached_property
    def cond(self) -> np.ndarray:
        """P_{X|Y}(x|y) as an M x |Y| matrix; each column sums to one."""
        return _frozen(self.mass / self.p_y)

    @classmethod
    def from_product(cls, px: ProbVector, py: ProbVector) -> "JointPMF":
        return cls(np.outer(px.mass, py.mass), px.labels, py.labels)

    @classmethod
    def from_channel(cls, py: ProbVector, posterior: np.ndarray, x_labels=None) -> "JointPMF":
        """Build P_XY from P_Y and a posterior matrix whose column y is P_{X|Y}(.|y)."""
        return cls(np.asarray(posterior, dtype=float) * py.mass, x_labels, py.labels)


def uniform(M: int, labels: Sequence | None = None) -> ProbVector:
    """Equiprobable pmf on M atoms."""
    if not isinstance(M, (int, np.integer)) or M < 1:
        raise InvalidArgument(f"uniform needs a positive integer, got {M!r}")
    return ProbVector(np.full(int(M), 1.0 / M), labels)


def validate(raw, tolerance: float = DEFAULT_TOL, labels: Sequence | None = None) -> ProbVector:
    """Accept raw masses within ``tolerance`` of a pmf and renormalize them.

    Zeros stay zeros. Raises :class:`InvalidPMF` on a negative entry or when the
    total is further than ``tolerance`` from one.
    """
    a = np.asarray(raw, dtype=float).ravel()
    return ProbVector(_normalized(a, tolerance, "validate"), labels)


def decompose(J: JointPMF) -> tuple[ProbVector, ProbVector, Kernel]:
    """Split a joint pmf into P_X, P_Y and the posterior kernel y -> P_{X|Y}(.|y)."""
    px = ProbVector(J.p_x, J.x_labels)
    py = ProbVector(J.p_y, J.y_labels)
    post = Kernel(J.cond.T, J.y_labels, J.x_labels)
    return px, py, post


def push_forward(P: ProbVector, K: Kernel) -> ProbVector:
    """Output pmf of the channel ``K`` driven by ``P`` (row vector times matrix)."""
    if len(P) != K.matrix.shape[0]:
        raise InvalidArgument(f"pmf has {len(P)} atoms but kernel has {K.matrix.shape[0]} inputs")
    return ProbVector(P.mass @ K.matrix, K.out_labels)


def map_error(J: JointPMF) -> float:
    """Minimum single-guess error probability, attained by the MAP rule."""
    return float(1.0 - J.mass.max(axis=0).sum())
