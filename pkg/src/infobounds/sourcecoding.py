"""Codeword-length analysis for uniquely-decodable codes on a memoryless source.

Lengths are in D-ary code symbols. The scaled cumulant generating function
of the lengths, Lambda_k(rho), is measured in log-D units per source symbol,
so that Lambda_k(rho)/rho is directly comparable with H_{1/(1+rho)}(X)/ln D
and with the average length.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from .divergences import renyi_entropy, shannon_entropy
from .errors import EnumerationLimit, InvalidArgument
from .majorization import ClusterMap, induced_pmf, tilde_x_m
from .prob import ProbVector

KRAFT_TOL = 1e-12
EXACT_LIMIT = 10**6
BAND_CONSTANT = 0.08607


@dataclass(frozen=True)
class CodeSpec:
    """Codeword lengths (one per source symbol) over a D-ary code alphabet."""

    D: int
    lengths: tuple[int, ...]
    labels: Optional[tuple[str, ...]] = None
    require_kraft: bool = field(default=False, repr=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.D, (int, np.integer)) or self.D < 2:
            raise InvalidArgument(f"code alphabet size must be an integer >= 2, got {self.D!r}")
        lengths = tuple(int(l) for l in self.lengths)
        if not lengths or any(l < 1 for l in lengths):
            raise InvalidArgument("codeword lengths must be positive integers")
        object.__setattr__(self, "lengths", lengths)
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != len(lengths):
                raise InvalidArgument("one label per codeword length is required")
            object.__setattr__(self, "labels", labels)
        if self.require_kraft and not self.feasible:
            raise InvalidArgument(f"Kraft sum {kraft_sum(self):.12g} exceeds 1")

    @property
    def feasible(self) -> bool:
        return kraft_sum(self) <= 1.0 + KRAFT_TOL

    def expected_length(self, P: ProbVector) -> float:
        _match(P, self)
        return float(np.dot(P.mass, self.lengths))


def _match(P: ProbVector, spec: CodeSpec) -> None:
    if len(P) != len(spec.lengths):
        raise InvalidArgument(f"pmf has {len(P)} atoms but code has {len(spec.lengths)} lengths")


def kraft_sum(spec: CodeSpec) -> float:
    return math.fsum(float(spec.D) ** -l for l in spec.lengths)


def huffman(P: ProbVector, D: int = 2) -> CodeSpec:
    """Optimal D-ary prefix code lengths.

    The first merge takes 2 + ((n - 2) mod (D - 1)) nodes so that every later
    merge is full. Priority ties go to the node created first.
    """
    if not isinstance(D, (int, np.integer)) or D < 2:
        raise InvalidArgument(f"code alphabet size must be an integer >= 2, got {D!r}")
    n = len(P)
    if n == 1:
        return CodeSpec(D, (1,), P.labels)
    depth = [0] * n
    counter = itertools.count()
    heap = [(float(p), next(counter), [i]) for i, p in enumerate(P.mass)]
    heapq.heapify(heap)
    take = 2 + (n - 2) % (D - 1)
    while len(heap) > 1:
        merged_p, members = 0.0, []
        for _ in range(min(take, len(heap))):
            p, _, leaves = heapq.heappop(heap)
            merged_p += p
            members.extend(leaves)
        for i in members:
            depth[i] += 1
        heapq.heappush(heap, (merged_p, next(counter), members))
        take = D
    return CodeSpec(D, tuple(depth), P.labels)


def campbell_lengths(P: ProbVector, rho: float, D: int = 2) -> CodeSpec:
    """Lengths ceil(log_D(T / P(x)^beta)) with beta = 1/(1+rho), T = sum P^beta.

    These come from the Shannon code of the tilted pmf P^beta / T and satisfy
    Kraft's inequality. Every atom needs positive mass.
    """
    if not rho > 0:
        raise InvalidArgument(f"rho must be positive, got {rho!r}")
    if np.any(P.mass <= 0):
        raise InvalidArgument("tilted Shannon lengths need every atom to have positive mass")
    beta = 1.0 / (1.0 + rho)
    log_p = np.log(P.mass)
    log_t = logsumexp(beta * log_p)
    raw = (log_t - beta * log_p) / math.log(D)
    # absorb rounding so integral values (e.g. log_2 4) are not pushed up by one
    lengths = np.maximum(np.ceil(raw - 1e-12), 1).astype(int)
    return CodeSpec(D, tuple(int(l) for l in lengths), P.labels)


def shannon_lengths(P: ProbVector, D: int = 2) -> CodeSpec:
    """ceil(-log_D P(x)); the rho -> 0 limit of :func:`campbell_lengths`."""
    if np.any(P.mass <= 0):
        raise InvalidArgument("Shannon lengths need every atom to have positive mass")
    raw = -np.log(P.mass) / math.log(D)
    return CodeSpec(D, tuple(int(l) for l in np.maximum(np.ceil(raw - 1e-12), 1)), P.labels)


def _log_moment(p: np.ndarray, lengths: np.ndarray, rho: float, D: int) -> float:
    """ln sum_x p(x) D^(rho l(x)), accurate for small rho."""
    a = rho * lengths * math.log(D)
    if a.max() < 700:
        return math.log1p(float(np.dot(p, np.expm1(a))))
    keep = p > 0
    return float(logsumexp(a[keep], b=p[keep]))


def cgf(P: ProbVector, spec: CodeSpec, rho: float, k: int = 1, mode: str = "product") -> float:
    """Lambda_k(rho) = (1/k) log_D sum_{x^k} P(x^k) D^(rho l(x^k)).

    ``product`` mode treats the block code as the concatenation of the
    per-symbol code; ``exact`` mode enumerates all n^k blocks.
    """
    _match(P, spec)
    if not rho > 0:
        raise InvalidArgument(f"rho must be positive, got {rho!r}")
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgument(f"block length must be a positive integer, got {k!r}")
    D = spec.D
    lengths = np.asarray(spec.lengths, dtype=float)
    if mode == "product":
        return _log_moment(P.mass, lengths, rho, D) / math.log(D)
    if mode != "exact":
        raise InvalidArgument(f"mode must be 'product' or 'exact', got {mode!r}")
    n = len(P)
    if n**k > EXACT_LIMIT:
        raise EnumerationLimit(f"{n}^{k} blocks exceed the limit of {EXACT_LIMIT}")
    block_p = np.ones(1)
    block_l = np.zeros(1)
    for _ in range(k):
        block_p = np.multiply.outer(block_p, P.mass).ravel()
        block_l = np.add.outer(block_l, lengths).ravel()
    return _log_moment(block_p, block_l, rho, D) / (k * math.log(D))


@dataclass(frozen=True)
class CampbellReport:
    """Converse and achievability margins; values in log-D units unless suffixed ``_nats``."""

    rho: float
    k: int
    D: int
    lambda_k: float
    normalized_cgf: float
    renyi_term: float
    converse_margin: float
    achievability_margin: float
    slack: float
    converse_holds: bool
    achievability_holds: bool

    @property
    def lambda_k_nats(self) -> float:
        return self.lambda_k * math.log(self.D)

    @property
    def converse_margin_nats(self) -> float:
        return self.converse_margin * math.log(self.D)

    @property
    def achievability_margin_nats(self) -> float:
        return self.achievability_margin * math.log(self.D)


def campbell_verify(P: ProbVector, spec: CodeSpec, rho: float, D: Optional[int] = None, k: int = 1,
                    mode: str = "product", tol: float = 1e-9) -> CampbellReport:
    """Compare Lambda_k(rho)/rho with H_{1/(1+rho)}(X)/ln D.

    The converse margin is the excess of Lambda_k(rho)/rho over the Renyi
    term (non-negative for every UD code); the achievability margin is the
    same excess, to be compared with the 1/k slack.
    """
    if D is not None and D != spec.D:
        raise InvalidArgument(f"D={D} disagrees with the code alphabet size {spec.D}")
    if not spec.feasible:
        raise InvalidArgument(f"Kraft sum {kraft_sum(spec):.12g} exceeds 1; the converse needs a UD code")
    lam = cgf(P, spec, rho, k, mode)
    normalized = lam / rho
    renyi = renyi_entropy(P, 1.0 / (1.0 + rho)) / math.log(spec.D)
    gap = normalized - renyi
    return CampbellReport(
        rho=float(rho), k=int(k), D=spec.D, lambda_k=lam, normalized_cgf=normalized,
        renyi_term=renyi, converse_margin=gap, achievability_margin=gap, slack=1.0 / k,
        converse_holds=gap >= -tol, achievability_holds=gap <= 1.0 / k + tol,
    )


@dataclass(frozen=True)
class ClusteringReport:
    m: int
    D: int
    k: int
    n_star: Optional[int]
    tilde_pmf: tuple[float, ...]
    induced_pmf: tuple[float, ...]
    source_lengths: tuple[int, ...]
    cluster_lengths: tuple[int, ...]
    avg_length_source: float
    avg_length_clustered: float
    entropy_source: float
    entropy_tilde: float
    entropy_induced: float
    delta: float
    band: tuple[float, float]
    in_band: bool
    renyi_reference: dict = field(default_factory=dict)


def band_upper(D: int) -> float:
    """Upper edge of the clustering band, 0.08607 log_D 2."""
    return BAND_CONSTANT * math.log(2) / math.log(D)


def clustering_report(P: ProbVector, m: int, c: ClusterMap, D: int = 2, k: int = 1,
                      rhos: Sequence[float] = (0.25, 1.0, 4.0)) -> ClusteringReport:
    """Average-length reduction from clustering, against the X~_m entropy gap.

    delta = (E l(X) - E l(f(X))) - (H(X) - H(X~_m))/ln D with Huffman codes for
    both sources applied symbol by symbol. Band membership is reported, never
    enforced. ``renyi_reference[rho]`` is rho (H_b(X) - H_b(X~_m))/ln D with
    b = 1/(1+rho).
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise InvalidArgument(f"block length must be a positive integer, got {k!r}")
    tilde = tilde_x_m(P, m)
    q = induced_pmf(P, c)
    if len(q) != m:
        raise InvalidArgument(f"cluster map has {len(q)} clusters, expected m={m}")
    code_x = huffman(P, D)
    code_y = huffman(q, D)
    ln_d = math.log(D)
    ex, ey = code_x.expected_length(P), code_y.expected_length(q)
    hx, ht, hq = shannon_entropy(P), shannon_entropy(tilde.pmf), shannon_entropy(q)
    delta = (ex - ey) - (hx - ht) / ln_d
    band = (-1.0 / k, band_upper(D))
    ref = {
        float(r): float(r * (renyi_entropy(P, 1 / (1 + r)) - renyi_entropy(tilde.pmf, 1 / (1 + r))) / ln_d)
        for r in rhos
    }
    return ClusteringReport(
        m=int(m), D=int(D), k=int(k), n_star=tilde.n_star, tilde_pmf=tuple(tilde.pmf.mass.tolist()),
        induced_pmf=tuple(q.mass.tolist()), source_lengths=code_x.lengths, cluster_lengths=code_y.lengths,
        avg_length_source=ex, avg_length_clustered=ey, entropy_source=hx, entropy_tilde=ht,
        entropy_induced=hq, delta=delta, band=band, in_band=band[0] <= delta <= band[1], renyi_reference=ref,
    )
