import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from infobounds import EnumerationLimit, InvalidArgument, NotMajorized
from infobounds.divergences import binary_entropy, renyi_entropy
from infobounds.fuzz import random_pmf
from infobounds.majorization import (
    ClusterMap,
    DoublyStochasticMatrix,
    cluster_oracle,
    ds_witness,
    induced_pmf,
    majorizes,
    surjections,
    tilde_x_m,
)
from infobounds.prob import ProbVector, uniform


def stirling2(n, m):
    return sum((-1) ** j * math.comb(m, j) * (m - j) ** n for j in range(m + 1)) // math.factorial(m)


def test_majorizes_examples():
    assert majorizes(ProbVector([1, 0, 0]), uniform(3))
    assert not majorizes(uniform(3), ProbVector([1, 0, 0]))
    assert majorizes(ProbVector([0.5, 0.3, 0.2]), ProbVector([0.2, 0.5, 0.3]))
    assert majorizes(ProbVector([0.6, 0.4]), uniform(3))
    assert not majorizes(ProbVector([0.5, 0.4, 0.1]), ProbVector([0.6, 0.2, 0.2]))
    assert not majorizes(ProbVector([0.6, 0.2, 0.2]), ProbVector([0.5, 0.4, 0.1]))


def test_majorizes_reflexive_and_extremes(rng):
    for _ in range(100):
        n = int(rng.integers(1, 9))
        P = random_pmf(rng, n)
        assert majorizes(P, P)
        assert majorizes(P, uniform(n))
        assert majorizes(ProbVector(np.eye(n)[0]), P)


def test_witness_two_atoms():
    W = ds_witness(ProbVector([1.0, 0.0]), uniform(2))
    np.testing.assert_allclose(W.matrix, [[0.5, 0.5], [0.5, 0.5]], atol=1e-15)
    assert W.n_transforms == 1


def test_witness_identity_when_equal():
    P = ProbVector([0.5, 0.3, 0.2])
    W = ds_witness(P, P)
    assert W.n_transforms == 0
    np.testing.assert_allclose(ProbVector([0.5, 0.3, 0.2]).mass @ W.matrix, P.mass, atol=1e-15)


def test_witness_permutation():
    Q, P = ProbVector([0.5, 0.3, 0.2]), ProbVector([0.2, 0.5, 0.3])
    W = ds_witness(Q, P)
    np.testing.assert_allclose(Q.mass @ W.matrix, P.mass, atol=1e-12)


def test_witness_rejects_non_majorized():
    with pytest.raises(NotMajorized):
        ds_witness(uniform(3), ProbVector([0.6, 0.3, 0.1]))
    with pytest.raises(InvalidArgument):
        ds_witness(uniform(3), uniform(4))


def _blend(rng, Q):
    """A pmf majorized by Q: push Q through a random convex mix of permutations."""
    n = len(Q)
    perms = [rng.permutation(n) for _ in range(3)]
    w = rng.dirichlet(np.ones(3))
    return ProbVector(sum(wi * Q.mass[p] for wi, p in zip(w, perms)))


def test_witness_random(rng):
    for _ in range(300):
        n = int(rng.integers(2, 9))
        Q = random_pmf(rng, n)
        P = _blend(rng, Q)
        W = ds_witness(Q, P)
        m = W.matrix
        assert np.all(m >= 0)
        np.testing.assert_allclose(m.sum(axis=0), 1, atol=1e-12)
        np.testing.assert_allclose(m.sum(axis=1), 1, atol=1e-12)
        assert np.max(np.abs(Q.mass @ m - P.mass)) <= 1e-12
        assert W.n_transforms <= n - 1


def test_doubly_stochastic_validation():
    with pytest.raises(InvalidArgument):
        DoublyStochasticMatrix(np.array([[1.0, 0.5], [0.0, 0.5]]))
    with pytest.raises(InvalidArgument):
        DoublyStochasticMatrix(np.ones((2, 3)) / 3)


def test_tilde_uniform_branch():
    res = tilde_x_m(ProbVector([0.4, 0.3, 0.3]), 2)
    assert res.n_star is None
    np.testing.assert_allclose(res.pmf.mass, [0.5, 0.5])
    assert res.pmf.labels == ("1", "2")


def test_tilde_kept_branch():
    res = tilde_x_m(ProbVector([0.2, 0.6, 0.2]), 2)
    assert res.n_star == 1
    assert res.order[0] == 1
    np.testing.assert_allclose(res.pmf.mass, [0.6, 0.4], atol=1e-15)


def test_tilde_several_kept():
    res = tilde_x_m(ProbVector([0.5, 0.3, 0.1, 0.05, 0.05]), 3)
    assert res.n_star == 2
    np.testing.assert_allclose(res.pmf.mass, [0.5, 0.3, 0.2], atol=1e-15)


def test_tilde_rejects_bad_m():
    for m in (1, 3, 2.0):
        with pytest.raises(InvalidArgument):
            tilde_x_m(uniform(3), m)


def test_tilde_majorizes_every_clustering(rng):
    """The extremal pmf dominates the pmf of f(X) for every f onto m clusters."""
    for _ in range(60):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(2, n))
        P = random_pmf(rng, n)
        T = tilde_x_m(P, m).pmf
        for s in surjections(n, m):
            sums = np.bincount(s, weights=P.mass, minlength=m)
            assert majorizes(sums, T.mass, tol=1e-12)


def test_tilde_entropy_bounds_oracle(rng):
    for _ in range(40):
        n = int(rng.integers(3, 7))
        m = int(rng.integers(2, n))
        P = random_pmf(rng, n)
        T = tilde_x_m(P, m).pmf
        for alpha in (0.5, 1.0, 2.0):
            assert cluster_oracle(P, m, alpha)[1] <= renyi_entropy(T, alpha) + 1e-12


def test_induced_pmf():
    P = ProbVector([0.1, 0.2, 0.3, 0.4], ("a", "b", "c", "d"))
    c = ClusterMap({"a": "x", "b": "y", "c": "x", "d": "y"})
    Q = induced_pmf(P, c)
    assert Q.labels == ("x", "y")
    np.testing.assert_allclose(Q.mass, [0.4, 0.6])
    g = ClusterMap.from_groups(P.labels, [[0, 3], [1], [2]])
    np.testing.assert_allclose(induced_pmf(P, g).mass, [0.5, 0.2, 0.3])


def test_induced_pmf_rejects_partial_maps():
    P = ProbVector([0.5, 0.5], ("a", "b"))
    with pytest.raises(InvalidArgument):
        induced_pmf(P, ClusterMap({"a": "x"}))
    with pytest.raises(InvalidArgument):
        induced_pmf(P, ClusterMap({"a": "x", "b": "x", "z": "y"}))


@pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 9) for m in range(1, n + 1)])
def test_surjection_count_is_stirling(n, m):
    got = list(surjections(n, m))
    assert len(got) == stirling2(n, m)
    assert len(set(got)) == len(got)
    assert all(len(set(s)) == m for s in got)


def test_surjections_cover_all_partitions():
    n, m = 5, 3
    canon = set()
    for f in itertools.product(range(m), repeat=n):
        if len(set(f)) == m:
            relabel = {}
            canon.add(tuple(relabel.setdefault(v, len(relabel)) for v in f))
    assert canon == set(surjections(n, m))


def test_cluster_oracle_values():
    _, h = cluster_oracle(ProbVector([0.6, 0.2, 0.2]), 2, 1.0)
    assert h == pytest.approx(binary_entropy(0.4), abs=1e-12)
    assert h == pytest.approx(0.673012, abs=1e-6)
    c, h = cluster_oracle(uniform(4), 2, 2.0)
    assert h == pytest.approx(math.log(2), abs=1e-12)
    np.testing.assert_allclose(induced_pmf(uniform(4), c).mass, [0.5, 0.5])


def test_cluster_oracle_limits():
    with pytest.raises(EnumerationLimit):
        cluster_oracle(uniform(10), 3, 1.0)
    with pytest.raises(InvalidArgument):
        cluster_oracle(uniform(4), 4, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=2, max_size=7).filter(lambda v: sum(v) > 1e-3))
def test_point_mass_and_uniform_bracket(raw):
    P = ProbVector(np.array(raw) / sum(raw))
    n = len(P)
    assert majorizes(ProbVector(np.eye(n)[0]), P)
    assert majorizes(P, uniform(n))
