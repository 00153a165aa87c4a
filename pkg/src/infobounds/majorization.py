"""Majorization, doubly-stochastic witnesses, and the extremal clustered pmf.

``majorizes(Q, P)`` means Q is *more concentrated* than P: every top-k
partial sum of Q dominates the corresponding sum of P. Equivalently P is the
output of some doubly-stochastic channel fed with Q, and ``ds_witness``
builds one explicitly as a product of T-transforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, NamedTuple, Optional, Sequence

import numpy as np

from .divergences import renyi_entropy
from .errors import EnumerationLimit, InvalidArgument, NotMajorized
from .prob import ProbVector, uniform

MAJ_TOL = 1e-12
ORACLE_MAX_N = 9


def _sorted_desc(a) -> np.ndarray:
    return np.sort(np.asarray(a.mass if isinstance(a, ProbVector) else a, dtype=float))[::-1]


def _padded(q: np.ndarray, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = max(q.size, p.size)
    return np.pad(q, (0, n - q.size)), np.pad(p, (0, n - p.size))


def majorizes(Q, P, tol: float = MAJ_TOL) -> bool:
    """True iff Q majorizes P (the shorter vector is padded with zeros)."""
    q, p = _padded(_sorted_desc(Q), _sorted_desc(P))
    return bool(np.all(np.cumsum(q) >= np.cumsum(p) - tol))


@dataclass(frozen=True, eq=False)
class DoublyStochasticMatrix:
    matrix: np.ndarray
    n_transforms: int = 0

    def __post_init__(self):
        w = np.array(self.matrix, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise InvalidArgument("doubly stochastic matrix must be square")
        if np.any(w < 0) or not (
            np.allclose(w.sum(axis=0), 1, rtol=0, atol=MAJ_TOL)
            and np.allclose(w.sum(axis=1), 1, rtol=0, atol=MAJ_TOL)
        ):
            raise InvalidArgument("matrix is not doubly stochastic")
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)


def _t_transform(n: int, i: int, k: int, lam: float) -> np.ndarray:
    t = np.eye(n)
    t[i, i] = t[k, k] = lam
    t[i, k] = t[k, i] = 1.0 - lam
    return t


def ds_witness(Q: ProbVector, P: ProbVector, tol: float = MAJ_TOL) -> DoublyStochasticMatrix:
    """Doubly-stochastic W with Q @ W = P, built from at most n-1 T-transforms.

    Works on the sorted vectors: at each step the first index i whose prefix
    sum strictly exceeds the target's is paired with the next index k that
    falls short, and mass min(x_i - y_i, y_k - x_k) moves from i to k.
    """
    q = np.asarray(Q.mass, dtype=float)
    p = np.asarray(P.mass, dtype=float)
    if q.size != p.size:
        raise InvalidArgument(f"witness needs equal lengths, got {q.size} and {p.size}")
    if not majorizes(q, p, tol):
        raise NotMajorized("Q does not majorize P")
    n = q.size
    oq = np.argsort(-q, kind="stable")
    op = np.argsort(-p, kind="stable")
    x = q[oq].copy()
    y = p[op]
    w = np.eye(n)
    eps = 1e-15
    steps = 0
    while steps < n - 1:
        d = x - y
        above = np.flatnonzero(d > eps)
        if above.size == 0:
            break
        i = int(above[0])
        below = np.flatnonzero(d[i + 1:] < -eps)
        if below.size == 0:
            break
        k = i + 1 + int(below[0])
        delta = min(d[i], -d[k])
        lam = 1.0 - delta / (x[i] - x[k])
        t = _t_transform(n, i, k, lam)
        x = x @ t
        w = w @ t
        steps += 1
    # back to the caller's atom order: Q = Q_sorted Pi_q^T, P_sorted = P Pi_p
    pq = np.eye(n)[:, oq]
    pp = np.eye(n)[:, op]
    full = pq @ w @ pp.T
    if np.max(np.abs(q @ full - p)) > tol:
        raise NotMajorized("T-transform construction did not reach P within tolerance")
    return DoublyStochasticMatrix(full, steps)


class TildeResult(NamedTuple):
    pmf: ProbVector
    n_star: Optional[int]
    order: tuple[int, ...]


def tilde_x_m(P: ProbVector, m: int) -> TildeResult:
    """Extremal m-atom pmf obtained from P.

    P is sorted into non-increasing order first (``order`` records the
    permutation). If the largest mass is below 1/m the result is uniform;
    otherwise the n* largest masses are kept and the rest is spread evenly
    over the remaining m - n* atoms. ``n_star`` is 1-based, None in the
    uniform branch.
    """
    n = len(P)
    if not isinstance(m, (int, np.integer)) or not 2 <= m <= n - 1:
        raise InvalidArgument(f"m must satisfy 2 <= m <= n-1 = {n - 1}, got {m!r}")
    m = int(m)
    order = tuple(int(i) for i in np.argsort(-P.mass, kind="stable"))
    p = P.mass[list(order)]
    labels = tuple(str(i) for i in range(1, m + 1))
    if p[0] < 1.0 / m:
        return TildeResult(uniform(m, labels), None, order)
    tails = np.cumsum(p[::-1])[::-1]  # tails[i] = sum_{j >= i} p[j], 0-based
    n_star = max(i for i in range(1, m) if p[i - 1] >= tails[i] / (m - i))
    spread = tails[n_star] / (m - n_star)
    out = np.concatenate([p[:n_star], np.full(m - n_star, spread)])
    return TildeResult(ProbVector(out, labels), n_star, order)


@dataclass(frozen=True)
class ClusterMap:
    """Surjective map from source labels onto cluster labels."""

    mapping: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "mapping", {str(k): str(v) for k, v in dict(self.mapping).items()})

    @property
    def clusters(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for v in self.mapping.values():
            seen.setdefault(v)
        return tuple(seen)

    @classmethod
    def from_groups(cls, labels: Sequence[str], groups: Sequence[Sequence[int]]) -> "ClusterMap":
        """Map built from groups of 0-based atom positions; cluster i is named str(i)."""
        mapping = {}
        for ci, g in enumerate(groups):
            for i in g:
                mapping[labels[i]] = str(ci)
        return cls(mapping)

    @classmethod
    def from_assignment(cls, labels: Sequence[str], assignment: Sequence[int]) -> "ClusterMap":
        return cls({lab: str(a) for lab, a in zip(labels, assignment)})


def induced_pmf(P: ProbVector, c: ClusterMap) -> ProbVector:
    """Pmf of f(X) when X ~ P and f is the cluster map ``c``."""
    missing = [lab for lab in P.labels if lab not in c.mapping]
    if missing:
        raise InvalidArgument(f"cluster map undefined on {missing}")
    extra = set(c.mapping) - set(P.labels)
    if extra:
        raise InvalidArgument(f"cluster map names unknown atoms {sorted(extra)}")
    clusters = c.clusters
    index = {name: j for j, name in enumerate(clusters)}
    out = np.zeros(len(clusters))
    for lab, m in zip(P.labels, P.mass):
        out[index[c.mapping[lab]]] += m
    return ProbVector(out, clusters)


def surjections(n: int, m: int) -> Iterator[tuple[int, ...]]:
    """Canonical surjections [n] -> [m], one per set partition into m blocks.

    Yields restricted-growth strings (block of atom i is at most one more
    than the largest block used before it) in lexicographic order. Any other
    surjection is one of these followed by a relabeling of the clusters, which
    leaves the induced pmf unchanged up to order.
    """
    a = [0] * n

    def rec(i: int, used: int) -> Iterator[tuple[int, ...]]:
        if n - i < m - used:
            return
        if i == n:
            if used == m:
                yield tuple(a)
            return
        for b in range(min(used + 1, m)):
            a[i] = b
            yield from rec(i + 1, max(used, b + 1))

    if n >= 1:
        a[0] = 0
        yield from rec(1, 1)


def cluster_oracle(P: ProbVector, m: int, alpha: float) -> tuple[ClusterMap, float]:
    """Exhaustive maximum of the Renyi entropy of f(X) over surjections f onto m clusters."""
    n = len(P)
    if n > ORACLE_MAX_N:
        raise EnumerationLimit(f"cluster oracle enumerates at most n = {ORACLE_MAX_N} atoms, got {n}")
    if not isinstance(m, (int, np.integer)) or not 2 <= m <= n - 1:
        raise InvalidArgument(f"m must satisfy 2 <= m <= n-1 = {n - 1}, got {m!r}")
    best: tuple[tuple[int, ...], float] | None = None
    for s in surjections(n, int(m)):
        sums = np.bincount(s, weights=P.mass, minlength=m)
        h = renyi_entropy(sums, alpha)
        if best is None or h > best[1]:
            best = (s, h)
    assert best is not None
    return ClusterMap.from_assignment(P.labels, best[0]), best[1]
