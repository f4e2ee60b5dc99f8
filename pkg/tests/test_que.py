import math
from types import SimpleNamespace

import numpy as np
import pytest
from scipy import stats

from randwave.concentration import quadratic_form
from randwave.que import (
    block_deviation_experiment,
    direct_matrix_coefficient,
    ergodic_average,
    matrix_coefficient,
    que_threshold,
    recentered_diagonal,
    recentered_diagonals,
    sample_basis_diagonals,
    summability_check,
    to_eigenbasis,
)
from randwave.randmat import sample_haar_unitary
from randwave.rng import make_rng
from randwave.spectral import Observable, SpectralWindow, enumerate_block, project

from conftest import cos_block


def mixed_block(k=3):
    obs = Observable(2, {(0, 0): 0.4, (1, 0): 0.3 + 0.2j, (1, 2): -0.25j})
    return project(obs, enumerate_block(SpectralWindow.unit(k), 2))


def test_identity_observable_gives_kronecker():
    p = project(Observable.constant(2, 1.0), enumerate_block(SpectralWindow.unit(4), 2))
    v = sample_haar_unitary(p.dim, make_rng(1))
    for i, j in [(0, 0), (0, 1), (3, 3), (5, 2)]:
        assert abs(matrix_coefficient(p, v, i, j) - (i == j)) <= 1e-12
        assert recentered_diagonal(p, v, i) == pytest.approx(0.0, abs=1e-15)


def test_dim_one_block():
    p = project(Observable(2, {(0, 0): 0.3, (1, 0): 0.5}), enumerate_block(SpectralWindow(0, 1), 2))
    v = sample_haar_unitary(1, make_rng(2))
    assert matrix_coefficient(p, v, 0, 0) == pytest.approx(p.eigs[0])
    assert recentered_diagonal(p, v, 0) == 0.0


def test_zero_observable_direct():
    p = project(Observable(2, {(0, 0): 0.0}), enumerate_block(SpectralWindow.unit(2), 2))
    u = sample_haar_unitary(p.dim, make_rng(0))
    assert direct_matrix_coefficient(p, u, 1, 2) == 0


def test_direct_with_identity_reads_matrix():
    p = mixed_block()
    eye = np.eye(p.dim)
    for i, j in [(0, 0), (0, 1), (2, 5), (7, 3)]:
        assert direct_matrix_coefficient(p, eye, i, j) == p.matrix[j, i]


def test_direct_hand_summation_d3():
    rng = np.random.default_rng(0)
    z = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    h = (z + z.conj().T) / 2
    block = SimpleNamespace(window=SpectralWindow(0, 1), dim=3)
    p = SimpleNamespace(matrix=h, dim=3, block=block)
    u = sample_haar_unitary(3, make_rng(4)).entries
    for i in range(3):
        for j in range(3):
            hand = sum(np.conj(u[r, j]) * h[r, c] * u[c, i] for r in range(3) for c in range(3))
            assert abs(direct_matrix_coefficient(p, u, i, j) - hand) <= 1e-13


def test_reduction_matches_oracle_random():
    rng = make_rng(10)
    for trial in range(20):
        p = mixed_block(k=int(rng.integers(1, 5)))
        u = sample_haar_unitary(p.dim, rng)
        v = to_eigenbasis(p, u)
        i, j = (int(x) for x in rng.integers(0, p.dim, 2))
        assert abs(matrix_coefficient(p, v, i, j) - direct_matrix_coefficient(p, u, i, j)) <= 1e-10
        assert abs(matrix_coefficient(p, v, i, i).imag) <= 1e-12 * p.norm_bound


def test_exact_recentering_and_shared_kernel():
    p = mixed_block(4)
    v = sample_haar_unitary(p.dim, make_rng(3))
    all_cols = recentered_diagonals(p, v)
    for j in range(p.dim):
        r = recentered_diagonal(p, v, j)
        assert r + p.symbol_avg == pytest.approx(matrix_coefficient(p, v, j, j).real, abs=1e-12)
        assert r == pytest.approx(quadratic_form(p.eta, v, j), abs=1e-12)
        assert r == pytest.approx(all_cols[j], abs=1e-14)


def test_errors():
    p = mixed_block()
    v = sample_haar_unitary(p.dim, make_rng(0))
    with pytest.raises(IndexError):
        matrix_coefficient(p, v, p.dim, 0)
    with pytest.raises(ValueError):
        matrix_coefficient(p, np.eye(p.dim + 1), 0, 0)


class TestThreshold:
    def test_value(self):
        assert que_threshold(100, 2) == pytest.approx(0.09210340371976183, rel=1e-14)

    def test_monotone_and_linear(self):
        vals = [que_threshold(d, 4) for d in range(3, 200)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert que_threshold(50, 6) == pytest.approx(2 * que_threshold(50, 3))

    def test_domain(self):
        with pytest.raises(ValueError):
            que_threshold(1, 4)


class TestDeviationExperiment:
    def test_identity_observable(self):
        p = project(Observable.constant(2, 1.0), enumerate_block(SpectralWindow.unit(5), 2))
        rec = block_deviation_experiment(p, 20, 4.0, make_rng(0))
        assert rec.exceed_count == 0
        assert np.all(rec.sup_deviations == 0)
        assert rec.predicted_bound == 0.0

    def test_record_invariants_and_domination(self):
        p = cos_block(8)
        rec = block_deviation_experiment(p, 200, 4.0, make_rng(1))
        assert 0 <= rec.exceed_count <= rec.trial_count == 200
        assert np.all(rec.sup_deviations >= 0)
        assert np.all(rec.sup_deviations <= 2 * p.norm_bound)
        assert np.all(rec.sup_deviations <= np.abs(p.eta).sum())
        assert rec.alpha > 0
        assert rec.frequency <= rec.predicted_bound + 4 * rec.standard_error
        assert rec.diagonals.shape == (p.dim,)

    def test_deterministic_given_seed(self):
        p = cos_block(6)
        a = block_deviation_experiment(p, 30, 4.0, make_rng(5))
        b = block_deviation_experiment(p, 30, 4.0, make_rng(5))
        assert np.array_equal(a.sup_deviations, b.sup_deviations)

    def test_requires_d2(self):
        p = project(Observable.cosine(2), enumerate_block(SpectralWindow(0, 1), 2))
        with pytest.raises(ValueError):
            block_deviation_experiment(p, 10, 4.0, make_rng(0))

    def test_basis_choice_independence(self):
        p = cos_block(10)
        perm = make_rng(99).permutation(p.dim)
        q = project(p.observable, p.block.permuted(perm))
        np.testing.assert_allclose(q.eigs, p.eigs, atol=1e-12)
        a = block_deviation_experiment(p, 2000, 4.0, make_rng(1)).sup_deviations
        b = block_deviation_experiment(q, 2000, 4.0, make_rng(2)).sup_deviations
        assert stats.ks_2samp(a, b).pvalue > 1e-3


class TestErgodic:
    def test_exact_values(self):
        assert [e.cesaro_mean for e in ergodic_average([np.zeros(3), np.zeros(5)], [1, 4, 8])] == [0, 0, 0]
        out = ergodic_average([np.array([1.0, -1.0]), np.array([2.0])], [1, 2, 3])
        assert [e.cesaro_mean for e in out] == [1.0, 1.0, 2.0]

    def test_identity_observable(self):
        p = project(Observable.constant(2, 1.0), enumerate_block(SpectralWindow.unit(3), 2))
        diag = sample_basis_diagonals(p, make_rng(0))
        assert ergodic_average([diag], [p.dim])[0].cesaro_mean == 0.0

    def test_insufficient(self):
        with pytest.raises(ValueError):
            ergodic_average([np.zeros(3)], [4])


class TestSummability:
    def test_zero_bounds(self):
        recs = [SimpleNamespace(dim=d, predicted_bound=0.0) for d in (8, 16, 32, 64)]
        res = summability_check(recs)
        assert res.verdict and np.array_equal(res.partial_sums, np.zeros(4))

    def test_synthetic_power_law(self):
        recs = [SimpleNamespace(dim=k, predicted_bound=float(k) ** -3) for k in range(2, 12)]
        res = summability_check(recs)
        assert res.slope == pytest.approx(-3.0)
        assert res.verdict
        assert res.partial_sums[-1] == pytest.approx(sum(k**-3 for k in range(2, 12)))

    def test_slow_decay_rejected(self):
        recs = [SimpleNamespace(dim=k, predicted_bound=1.0 / k) for k in range(2, 12)]
        assert not summability_check(recs).verdict

    def test_needs_four(self):
        with pytest.raises(ValueError):
            summability_check([SimpleNamespace(dim=2, predicted_bound=0.1)] * 3)

    def test_recompute_with_C(self):
        p = cos_block(8)
        rec = block_deviation_experiment(p, 5, 4.0, make_rng(0))
        recs = [block_deviation_experiment(cos_block(k), 5, 4.0, make_rng(k)) for k in (5, 6, 7, 8)]
        res = summability_check(recs, C=4.0)
        assert res.partial_sums[0] == pytest.approx(recs[0].predicted_bound, rel=1e-12)
