import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcretain.covest import mle_covariance
from pcretain.matrixcore import EigenSpectrum, SymmetricMatrix
from pcretain.pca import DegenerateCovarianceError, pca_from_covariance, pca_from_spectrum, project_scores
from pcretain.retain import (
    RetentionConfig,
    cumulative_variance_rule,
    decide_all,
    kaiser_guttman,
    pareto_data,
    scree_largest_drop,
)
from pcretain.simkit import default_population


def spectrum_of(values):
    values = np.asarray(values, dtype=float)
    return EigenSpectrum(values, np.eye(values.size))


def random_orthogonal(p, seed):
    q, r = np.linalg.qr(np.random.default_rng(seed).standard_normal((p, p)))
    return q * np.sign(np.diag(r))


spectra = st.lists(st.floats(0.0, 100.0, allow_nan=False), min_size=2, max_size=10).filter(
    lambda v: sum(v) > 1e-3
).map(lambda v: sorted(v, reverse=True))


# ---------------------------------------------------------------- pca


def test_diag_ratios():
    res = pca_from_covariance(np.diag([4.0, 3.0, 2.0, 1.0]))
    np.testing.assert_allclose(res.explained_ratio, [0.4, 0.3, 0.2, 0.1])
    np.testing.assert_allclose(res.cumulative_ratio, [0.4, 0.7, 0.9, 1.0])
    assert res.total_variance == pytest.approx(10.0)


def test_population_cumulative_ratios():
    res = pca_from_covariance(default_population().sigma)
    np.testing.assert_allclose(res.cumulative_ratio[:4], [0.3906, 0.6075, 0.7581, 0.8358], atol=5e-4)


def test_identity_is_isotropic():
    np.testing.assert_allclose(pca_from_covariance(np.eye(10)).explained_ratio, 0.1)


def test_negative_eigenvalues_kept_raw_but_floored_in_ratios():
    res = pca_from_covariance(np.diag([3.0, 1.0, -1e-3]))
    assert res.spectrum.values[-1] == pytest.approx(-1e-3)
    np.testing.assert_allclose(res.explained_ratio, [0.75, 0.25, 0.0])


def test_degenerate_covariance():
    with pytest.raises(DegenerateCovarianceError, match="degenerate covariance"):
        pca_from_covariance(np.zeros((3, 3)))


@settings(max_examples=50, deadline=None)
@given(spectra)
def test_ratio_invariants(values):
    res = pca_from_spectrum(spectrum_of(values))
    assert np.all((res.explained_ratio >= 0) & (res.explained_ratio <= 1))
    assert abs(res.explained_ratio.sum() - 1) <= 1e-10
    assert np.all(np.diff(res.cumulative_ratio) >= -1e-15)
    assert abs(res.cumulative_ratio[-1] - 1) <= 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_ratios_invariant_under_rotation(seed):
    sigma = default_population().sigma.entries
    q = random_orthogonal(10, seed)
    a = pca_from_covariance(sigma)
    b = pca_from_covariance(q @ sigma @ q.T)
    np.testing.assert_allclose(b.cumulative_ratio, a.cumulative_ratio, atol=1e-8)


def test_ratios_invariant_under_scaling():
    sigma = default_population().sigma.entries
    a = pca_from_covariance(sigma).explained_ratio
    b = pca_from_covariance(7.25 * sigma).explained_ratio
    np.testing.assert_allclose(b, a, atol=1e-12)


def test_scores_full_rank_covariance(rng):
    x = rng.standard_normal((30, 4)) @ np.diag([3.0, 2.0, 1.0, 0.5])
    res = pca_from_covariance(mle_covariance(x))
    scores = project_scores(x, res, 4).values
    cov = scores.T @ scores / 30
    np.testing.assert_allclose(cov, np.diag(res.spectrum.values), atol=1e-8)


def test_scores_constant_rows():
    x = np.tile([1.0, 2.0, 3.0], (5, 1))
    res = pca_from_covariance(np.diag([3.0, 2.0, 1.0]))
    np.testing.assert_array_equal(project_scores(x, res, 2).values, 0.0)


def test_scores_collinear():
    t = np.linspace(-2, 2, 9)
    x = np.column_stack([t, t])
    res = pca_from_covariance(mle_covariance(x))
    s1 = project_scores(x, res, 1).values
    assert np.sum(s1 ** 2) == pytest.approx(np.sum((x - x.mean(0)) ** 2))
    s2 = project_scores(x, res, 2).values
    np.testing.assert_allclose(s2[:, 1], 0.0, atol=1e-12)


def test_scores_k_out_of_range():
    res = pca_from_covariance(np.eye(3))
    with pytest.raises(ValueError):
        project_scores(np.ones((4, 3)), res, 4)
    with pytest.raises(ValueError):
        project_scores(np.ones((4, 2)), res, 1)


# ---------------------------------------------------------------- retain


def test_population_decision():
    res = pca_from_covariance(default_population().sigma)
    assert kaiser_guttman(res.spectrum) == 8
    assert scree_largest_drop(res.spectrum) == 1
    assert cumulative_variance_rule(res, 0.80) == 4
    assert decide_all(res).as_tuple() == (8, 1, 4)


def test_kaiser_guttman_examples():
    assert kaiser_guttman(spectrum_of([0.5] * 6)) == 0
    assert kaiser_guttman(spectrum_of([2.0, 1.0, 0.5])) == 1  # strictly greater
    assert kaiser_guttman(spectrum_of([2.0, 1.0, 0.5]), threshold=0.9) == 2


def test_kaiser_guttman_rank_one_sample():
    spec = default_population()
    from pcretain.simkit import sample_mvn

    x = sample_mvn(spec, 2, seed=99)
    res = pca_from_covariance(mle_covariance(x))
    assert kaiser_guttman(res.spectrum) == 1


def test_scree_examples():
    assert scree_largest_drop(spectrum_of([5, 5, 5, 1])) == 3
    assert scree_largest_drop(spectrum_of([4, 2, 2, 0])) == 1
    with pytest.raises(ValueError):
        scree_largest_drop(spectrum_of([3.0]))


def test_cumvar_examples():
    res = pca_from_covariance(np.diag([4.0, 3.0, 2.0, 1.0]))
    assert cumulative_variance_rule(res, 1.0) == 4
    assert cumulative_variance_rule(res, 0.8) == 3
    assert cumulative_variance_rule(res, 0.7) == 2
    for bad in (0.0, 1.2, -0.5):
        with pytest.raises(ValueError):
            cumulative_variance_rule(res, bad)


def test_identity_decision():
    d = decide_all(pca_from_covariance(np.eye(10)))
    assert d.as_tuple() == (0, 1, 8)
    np.testing.assert_array_equal(d.gaps, 0.0)


def test_decision_records_thresholds():
    d = decide_all(pca_from_covariance(np.diag([4.0, 3.0, 2.0, 1.0])), RetentionConfig(2.5, 0.9))
    assert (d.kgc, d.cumvar, d.threshold_used, d.kgc_threshold) == (2, 3, 0.9, 2.5)
    np.testing.assert_allclose(d.gaps, [1, 1, 1])


@pytest.mark.parametrize("seed", range(5))
def test_criteria_permutation_invariant(seed):
    sigma = default_population().sigma.entries
    perm = np.random.default_rng(seed).permutation(10)
    a = decide_all(pca_from_covariance(sigma)).as_tuple()
    b = decide_all(pca_from_covariance(sigma[np.ix_(perm, perm)])).as_tuple()
    assert a == b


@settings(max_examples=60, deadline=None)
@given(spectra, st.floats(0.1, 50.0))
def test_scaling_statements(values, c):
    lam = np.asarray(values)
    scaled = c * lam
    assert kaiser_guttman(spectrum_of(scaled), threshold=c * 1.0) == kaiser_guttman(spectrum_of(lam), 1.0)
    gaps = lam[:-1] - lam[1:]
    # argmax is only stable under scaling when the top gap is unique by a margin
    top = np.sort(gaps)[::-1]
    if len(top) == 1 or top[0] - top[1] > 1e-9 * max(top[0], 1):
        assert scree_largest_drop(spectrum_of(scaled)) == scree_largest_drop(spectrum_of(lam))
    for t in (0.5, 0.8, 0.95):
        a = cumulative_variance_rule(pca_from_spectrum(spectrum_of(lam)), t)
        b = cumulative_variance_rule(pca_from_spectrum(spectrum_of(scaled)), t)
        assert a == b


@settings(max_examples=60, deadline=None)
@given(spectra, st.floats(0.01, 1.0), st.floats(0.01, 1.0))
def test_cumvar_monotone_in_threshold(values, t1, t2):
    t1, t2 = sorted((t1, t2))
    res = pca_from_spectrum(spectrum_of(values))
    assert cumulative_variance_rule(res, t1) <= cumulative_variance_rule(res, t2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 1000), min_size=2, max_size=10), st.integers(-50, 50))
def test_scree_shift_invariant(ints, shift):
    # integer-valued spectra keep the gaps exact under the shift
    lam = np.sort(np.asarray(ints, dtype=float))[::-1]
    assert scree_largest_drop(spectrum_of(lam + shift)) == scree_largest_drop(spectrum_of(lam))


# ---------------------------------------------------------------- pareto


def test_pareto_diag():
    data = pareto_data(pca_from_covariance(np.diag([4.0, 3.0, 2.0, 1.0])), 0.80)
    np.testing.assert_allclose(data.individual_percent, [40, 30, 20, 10])
    np.testing.assert_allclose(data.cumulative_percent, [40, 70, 90, 100])
    assert data.cutoff_index == 3
    assert data.component_ids == ("PC-1", "PC-2", "PC-3", "PC-4")
    assert data.cutoff_percent == pytest.approx(80.0)


def test_pareto_population():
    data = pareto_data(pca_from_covariance(default_population().sigma), 0.80)
    assert data.cutoff_index == 4
    assert data.cumulative_percent[3] == pytest.approx(83.58, abs=0.05)
    assert abs(data.cumulative_percent[-1] - 100) <= 1e-8


@pytest.mark.parametrize("cutoff", [0.05, 0.5, 0.99, 1.0])
def test_pareto_single_component(cutoff):
    data = pareto_data(pca_from_covariance(np.diag([5.0, 0.0, 0.0])), cutoff)
    assert data.cutoff_index == 1


def test_pareto_bad_cutoff():
    with pytest.raises(ValueError):
        pareto_data(pca_from_covariance(np.eye(2)), 0.0)


def test_symmetric_matrix_input_accepted():
    res = pca_from_covariance(SymmetricMatrix.diag([2.0, 1.0]))
    np.testing.assert_allclose(res.explained_ratio, [2 / 3, 1 / 3])
