"""Structural and distributional checks for the spectrum samplers."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from microlimit.ensembles import (
    Ensemble,
    HaarGroup,
    PointConfig,
    Spectrum,
    haar_matrix,
    microscopic_points,
    sample_gue_tridiag,
    sample_spectrum,
    symplectic_form,
)
from microlimit.errors import InputError
from microlimit.kernels import semicircle_density
from microlimit.seeds import derive_seed


def _wrap_half(a):
    return ((a + 0.5) % 1.0) - 0.5


# -------------------------------------------------------------- determinism


@pytest.mark.parametrize(
    "ensemble,n",
    [(Ensemble.CUE, 9), (Ensemble.SO, 8), (Ensemble.SO, 9), (Ensemble.SP, 10), (Ensemble.GUE, 12)],
)
def test_sampler_determinism(ensemble, n):
    a = sample_spectrum(ensemble, n, 12345)
    b = sample_spectrum(ensemble, n, 12345)
    c = sample_spectrum(ensemble, n, 12346)
    va = a.angles if a.angles is not None else a.levels
    vb = b.angles if b.angles is not None else b.levels
    vc = c.angles if c.angles is not None else c.levels
    assert np.array_equal(va, vb)
    assert not np.array_equal(va, vc)
    assert va.size == n


def test_tridiag_determinism():
    a = sample_gue_tridiag(40, 7)
    b = sample_gue_tridiag(40, 7)
    assert np.array_equal(a.levels, b.levels)
    assert np.all(np.diff(a.levels) >= 0)


# ---------------------------------------------------------------- structure


def test_so_odd_fixed_angle_zero():
    for seed in range(5):
        spec = sample_spectrum(Ensemble.SO, 5, seed)
        assert np.any(spec.angles == 0.0)


@pytest.mark.parametrize("ensemble,n", [(Ensemble.SO, 12), (Ensemble.SO, 13), (Ensemble.SP, 14)])
def test_negation_closure(ensemble, n):
    for seed in (0, 1, 2):
        spec = sample_spectrum(ensemble, n, seed)
        reflected = np.sort(_wrap_half(-spec.angles))
        assert_allclose(np.sort(spec.angles), reflected, atol=1e-9)


@pytest.mark.parametrize("ensemble,n", [(Ensemble.SO, 10), (Ensemble.SO, 11), (Ensemble.SP, 8)])
def test_angle_sum_vanishes_mod_one(ensemble, n):
    # det g = 1 means the eigenangles sum to an integer
    for seed in (3, 4):
        spec = sample_spectrum(ensemble, n, seed)
        total = float(np.sum(spec.angles))
        assert abs(total - round(total)) < 1e-8


def test_gue_levels_sorted_finite():
    spec = sample_spectrum(Ensemble.GUE, 30, 5)
    assert spec.levels is not None and spec.angles is None
    assert np.all(np.isfinite(spec.levels))
    assert np.all(np.diff(spec.levels) >= 0)


def test_sp_odd_dimension_rejected():
    with pytest.raises(InputError):
        sample_spectrum(Ensemble.SP, 7, 0)
    with pytest.raises(InputError):
        sample_spectrum(Ensemble.CUE, 1, 0)


@given(st.integers(min_value=0, max_value=2**63 - 1))
@settings(max_examples=10, deadline=None)
def test_negation_closure_random_seeds(seed):
    spec = sample_spectrum(Ensemble.SP, 6, seed)
    reflected = np.sort(_wrap_half(-spec.angles))
    assert_allclose(np.sort(spec.angles), reflected, atol=1e-9)


# -------------------------------------------------------------- haar_matrix


def test_haar_unitary_eigenvalues_on_circle():
    g = haar_matrix(HaarGroup.U, 8, 21)
    lam = np.linalg.eigvals(g)
    assert np.max(np.abs(np.abs(lam) - 1.0)) < 1e-10


def test_haar_so_membership():
    g = haar_matrix(HaarGroup.SO, 6, 2)
    assert np.max(np.abs(g @ g.T - np.eye(6))) < 1e-12
    assert np.linalg.det(g) == pytest.approx(1.0, abs=1e-10)


def test_haar_sp_membership():
    g = haar_matrix(HaarGroup.SP, 4, 9)
    j = symplectic_form(4)
    assert np.max(np.abs(g @ j @ g.T - j)) < 1e-12
    assert np.max(np.abs(g @ g.conj().T - np.eye(4))) < 1e-12


def test_haar_matrix_size_cap():
    with pytest.raises(InputError):
        haar_matrix(HaarGroup.U, 65, 0)
    with pytest.raises(InputError):
        haar_matrix(HaarGroup.SP, 5, 0)


@pytest.mark.parametrize(
    "group,ensemble,n",
    [(HaarGroup.U, Ensemble.CUE, 10), (HaarGroup.SO, Ensemble.SO, 9), (HaarGroup.SP, Ensemble.SP, 8)],
)
def test_haar_matrix_angles_match_sampler(group, ensemble, n):
    g = haar_matrix(group, n, 77)
    spec = sample_spectrum(ensemble, n, 77)
    raw = np.sort(_wrap_half(np.angle(np.linalg.eigvals(g)) / (2 * np.pi)))
    assert_allclose(np.sort(spec.angles), raw, atol=1e-8)


# ------------------------------------------------------------ distributional


def test_gue_trace_centered_both_samplers():
    # mean of trace over many small matrices is 0 within 3 standard errors
    m = 100_000
    for sampler in (sample_spectrum, sample_gue_tridiag):
        if sampler is sample_spectrum:
            totals = np.array(
                [np.sum(sampler(Ensemble.GUE, 2, derive_seed(42, r)).levels) for r in range(m)]
            )
        else:
            totals = np.array([np.sum(sampler(2, derive_seed(43, r)).levels) for r in range(m)])
        se = totals.std(ddof=1) / np.sqrt(m)
        assert abs(totals.mean()) < 3 * se


def test_tridiag_matches_dense_largest_eigenvalue():
    m = 2000
    n = 60
    top_dense = np.array(
        [sample_spectrum(Ensemble.GUE, n, derive_seed(7, r)).levels[-1] for r in range(m)]
    )
    top_tri = np.array([sample_gue_tridiag(n, derive_seed(8, r)).levels[-1] for r in range(m)])
    res = stats.ks_2samp(top_dense, top_tri, method="asymp")
    assert res.pvalue > 0.01


def test_gue_semicircle_histogram():
    n, m = 100, 500
    levels = np.concatenate(
        [sample_gue_tridiag(n, derive_seed(11, r)).levels for r in range(m)]
    )
    rescaled = levels / np.sqrt(n)
    edges = np.linspace(-2.0, 2.0, 21)
    hist, _ = np.histogram(rescaled, bins=edges)
    width = edges[1] - edges[0]
    density = hist / (n * m * width)
    centers = 0.5 * (edges[:-1] + edges[1:])
    fine = np.linspace(0, 1, 9)
    for k, c in enumerate(centers):
        xs = edges[k] + fine * width
        target = np.mean(semicircle_density(xs))
        assert abs(density[k] - target) <= 0.05


def test_gue_rescaled_range():
    bad = 0
    for seed in range(200):
        spec = sample_spectrum(Ensemble.GUE, 200, seed)
        if np.max(np.abs(spec.levels)) / np.sqrt(200) > 2.5:
            bad += 1
    assert bad <= 1


# -------------------------------------------------------------- microscopic


def test_microscopic_zero_radius_empty():
    spec = sample_spectrum(Ensemble.SO, 10, 3)
    cfg = microscopic_points(spec, 0.2, 0.0)
    assert isinstance(cfg, PointConfig)
    assert cfg.points.size == 0
    assert not cfg.degenerate


def test_microscopic_translate_count_matches_brute_force():
    spec = sample_spectrum(Ensemble.CUE, 6, 19)
    radius = 18.0
    cfg = microscopic_points(spec, 0.0, radius)
    n = spec.n
    brute = 0
    for th in spec.angles:
        for nu in range(-10, 11):
            if abs(n * (th + nu)) <= radius:
                brute += 1
    assert cfg.points.size == brute
    assert np.all(np.abs(cfg.points) <= radius)
    assert np.all(np.diff(cfg.points) >= 0)
    assert cfg.scalefactor == n


def test_microscopic_gue_linear_map():
    spec = sample_spectrum(Ensemble.GUE, 40, 23)
    E, radius = 0.5, 12.0
    cfg = microscopic_points(spec, E, radius)
    rho = semicircle_density(E)
    direct = 40 * rho * (spec.levels / np.sqrt(40) - E)
    direct = np.sort(direct[np.abs(direct) <= radius])
    assert_allclose(cfg.points, direct, rtol=1e-13)
    assert cfg.scalefactor == pytest.approx(40 * rho)


def test_microscopic_energy_validation():
    so = sample_spectrum(Ensemble.SO, 8, 1)
    with pytest.raises(InputError):
        microscopic_points(so, 0.0, 5.0)
    with pytest.raises(InputError):
        microscopic_points(so, 0.6, 5.0)
    gue = sample_spectrum(Ensemble.GUE, 10, 1)
    with pytest.raises(InputError):
        microscopic_points(gue, 2.0, 5.0)
    cue = sample_spectrum(Ensemble.CUE, 6, 1)
    cfg = microscopic_points(cue, 0.0, 6.0)
    assert np.all(np.abs(cfg.points) <= 6.0)


def test_microscopic_gue_mean_count():
    # interval [-20, 20] at E=0.5 carries about |I| = 40 points on average.
    # The window is macroscopically wide at n=100 (Lambda spans +-0.65), so
    # the exact mean is 39.18, off |I| by the curvature of the density; the
    # |I|^{8/9} slack of the count law covers that, 3 standard errors do not.
    m = 2000
    counts = np.empty(m)
    for r in range(m):
        spec = sample_gue_tridiag(100, derive_seed(31, r))
        counts[r] = microscopic_points(spec, 0.5, 20.0).points.size
    se = counts.std(ddof=1) / np.sqrt(m)
    assert abs(counts.mean() - 40.0) <= max(3 * se, 40.0 ** (8.0 / 9.0))
    # sharp check against the exact finite-n quadrature value, frozen from
    # scipy.integrate.quad of the kernel diagonal over the mapped window
    assert counts.mean() == pytest.approx(39.182676, abs=3.5 * se)


def test_spectrum_validation():
    with pytest.raises(InputError):
        Spectrum(Ensemble.GUE, 4, 0, angles=np.zeros(4))
    with pytest.raises(InputError):
        Spectrum(Ensemble.CUE, 4, 0, angles=np.zeros(3))
