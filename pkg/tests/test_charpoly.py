"""Ratio products of characteristic polynomials against determinant oracles.

The determinant route (slogdet of shifted matrices) and the spectrum
route (log-space products over eigenvalues) are built from different
primitives; their agreement is the main correctness check here.
"""

import numpy as np
import pytest

from microlimit.charpoly import (
    LocalizedRatio,
    det_oracle,
    gue_compensator,
    localized_gue,
    normalized_gue,
    ratio_statistic,
    truncated_product,
    xi_eval,
    xi_grid,
)
from microlimit.ensembles import (
    Ensemble,
    PointConfig,
    Spectrum,
    microscopic_points,
    sample_spectrum,
    sample_spectrum_fast,
)
from microlimit.errors import DegenerateSampleError, InputError
from microlimit.kernels import semicircle_density
from microlimit.seeds import derive_seed


def _cases(rng, count, ensemble):
    for k in range(count):
        n = int(rng.integers(4, 31))
        if ensemble is Ensemble.SP and n % 2:
            n += 1
        s = complex(rng.uniform(-3, 3), rng.uniform(-2, 2))
        if ensemble is Ensemble.CUE:
            energy = None
        elif ensemble is Ensemble.GUE:
            energy = float(rng.uniform(-1.5, 1.5)) or 0.3
        else:
            sign = 1.0 if rng.uniform() < 0.5 else -1.0
            energy = sign * float(rng.uniform(0.05, 0.45))
        yield n, int(rng.integers(0, 2**32)), s, energy


# ----------------------------------------------------------------- trivials


@pytest.mark.parametrize(
    "ensemble,n,energy",
    [
        (Ensemble.CUE, 9, None),
        (Ensemble.SO, 10, 0.25),
        (Ensemble.SO, 11, -0.2),
        (Ensemble.SP, 8, 0.25),
        (Ensemble.GUE, 12, 0.5),
    ],
)
def test_xi_at_zero_is_one(ensemble, n, energy):
    spectrum = sample_spectrum(ensemble, n, seed=14)
    assert xi_eval(spectrum, 0.0, energy=energy) == (1 + 0j)


def test_xi_grid_matches_scalar():
    spectrum = sample_spectrum(Ensemble.SP, 12, seed=3)
    grid = np.array([0.0, 0.5, 1.5 + 0.3j, -0.7j, 2.0 - 1.0j])
    cols = xi_grid(spectrum, grid, energy=0.25)
    for s, v in zip(grid, cols):
        assert xi_eval(spectrum, s, energy=0.25) == v


# ------------------------------------------------------- determinant oracle


@pytest.mark.parametrize(
    "ensemble", [Ensemble.CUE, Ensemble.SO, Ensemble.SP, Ensemble.GUE]
)
def test_xi_matches_det_oracle(ensemble):
    rng = np.random.default_rng(hash(ensemble.value) % 2**32)
    for n, seed, s, energy in _cases(rng, 50, ensemble):
        spectrum = sample_spectrum(ensemble, n, seed)
        via_spectrum = xi_eval(spectrum, s, energy=energy)
        via_det = det_oracle(ensemble, n, seed, s, energy=energy)
        assert via_spectrum == pytest.approx(via_det, rel=1e-8)


def test_det_oracle_size_cap():
    with pytest.raises(InputError):
        det_oracle(Ensemble.CUE, 65, 0, 0.5)


# ----------------------------------------------------------- zero structure


def test_xi_vanishes_at_rescaled_eigenangle():
    spectrum = sample_spectrum(Ensemble.CUE, 12, seed=8)
    s_zero = 12.0 * spectrum.angles[3]
    assert abs(xi_eval(spectrum, s_zero)) < 1e-6

    so = sample_spectrum(Ensemble.SO, 13, seed=8)
    energy = 0.25
    s_zero = 13.0 * (so.angles[9] - energy)
    assert abs(xi_eval(so, s_zero, energy=energy)) < 1e-6


def test_winding_counts_zeros_between_eigenangles():
    # the phase of xi winds once around each rescaled eigenangle, so the
    # boundary integral over a rectangle counts the zeros inside it
    for k in range(10):
        spectrum = sample_spectrum(Ensemble.CUE, 16, seed=derive_seed(90, k))
        zeros = np.sort(16.0 * spectrum.angles)
        lo = 0.5 * (zeros[4] + zeros[5])
        hi = 0.5 * (zeros[8] + zeros[9])
        top, bottom = 1.0, -1.0
        corners = [
            complex(lo, bottom),
            complex(hi, bottom),
            complex(hi, top),
            complex(lo, top),
            complex(lo, bottom),
        ]
        path = np.concatenate(
            [
                np.linspace(a, b, 400, endpoint=False)
                for a, b in zip(corners, corners[1:])
            ]
        )
        vals = xi_grid(spectrum, path)
        phases = np.angle(vals / np.roll(vals, 1))
        winding = phases.sum() / (2.0 * np.pi)
        assert winding == pytest.approx(4.0, abs=1e-6)


def test_gue_conjugation_symmetry():
    spectrum = sample_spectrum_fast(Ensemble.GUE, 80, seed=5)
    s = 0.9 + 0.7j
    a = xi_eval(spectrum, np.conj(s), energy=0.5)
    b = np.conj(xi_eval(spectrum, s, energy=0.5))
    assert a == pytest.approx(b, rel=1e-12)


# --------------------------------------------------------- degenerate poles


def test_pole_on_anchor_raises():
    so = Spectrum(
        Ensemble.SO, 4, 0, angles=np.array([-0.25, -0.1, 0.1, 0.25])
    )
    with pytest.raises(DegenerateSampleError):
        xi_eval(so, 0.5, energy=0.25)
    lv = np.array([-1.0, 0.5 * np.sqrt(3.0), 2.0])
    gue = Spectrum(Ensemble.GUE, 3, 0, levels=lv)
    with pytest.raises(DegenerateSampleError):
        xi_eval(gue, 0.5, energy=0.5)


def test_energy_validation():
    cue = sample_spectrum(Ensemble.CUE, 6, seed=0)
    with pytest.raises(InputError):
        xi_eval(cue, 0.5, energy=0.3)
    so = sample_spectrum(Ensemble.SO, 8, seed=0)
    with pytest.raises(InputError):
        xi_eval(so, 0.5, energy=0.0)
    with pytest.raises(InputError):
        xi_eval(so, 0.5)
    gue = sample_spectrum_fast(Ensemble.GUE, 8, seed=0)
    with pytest.raises(InputError):
        xi_eval(gue, 0.5, energy=2.5)


# --------------------------------------------------------- truncated product


def test_truncated_product_two_point_closed_form():
    config = PointConfig(np.array([-1.0, 1.0]), 0.0, 1.0, 2.0)
    for s in (0.3, 1.7, 0.4 + 1.1j, -2.0 - 0.5j):
        want = np.exp(1j * np.pi * s) * (1.0 - s * s)
        assert truncated_product(config, s) == pytest.approx(want, rel=1e-12)


def test_truncated_product_at_zero():
    config = PointConfig(np.array([-2.0, 0.7]), 0.0, 1.0, 4.0)
    assert truncated_product(config, 0.0) == (1 + 0j)


def test_truncated_product_cutoff():
    config = PointConfig(np.array([-3.0, 0.5, 2.8]), 0.0, 1.0, 4.0)
    s = 1.0 + 0.2j
    inner = truncated_product(config, s, cutoff=1.0)
    want = np.exp(1j * np.pi * s) * (1.0 - s / 0.5)
    assert inner == pytest.approx(want, rel=1e-12)
    with pytest.raises(InputError):
        truncated_product(config, s, cutoff=5.0)


def test_truncated_product_degenerate_point():
    config = PointConfig(np.array([0.0, 1.0]), 0.0, 1.0, 2.0)
    with pytest.raises(DegenerateSampleError):
        truncated_product(config, 0.5)


# ---------------------------------------------------------- GUE localization


def test_localized_covers_everything_equals_xi():
    spectrum = sample_spectrum_fast(Ensemble.GUE, 50, seed=17)
    full = xi_eval(spectrum, 1.2 + 0.4j, energy=0.5)
    loc = localized_gue(spectrum, 0.5, 1.2 + 0.4j, delta=5.0)
    assert isinstance(loc, LocalizedRatio)
    assert loc.count == 50
    assert loc.product == pytest.approx(full, rel=1e-13)


def test_localized_default_window_shrinks():
    spectrum = sample_spectrum_fast(Ensemble.GUE, 200, seed=23)
    loc = localized_gue(spectrum, 0.5, 1.0)
    assert loc.delta == pytest.approx(200.0 ** -0.1)
    assert 0 < loc.count < 200
    assert np.isfinite(loc.product.real) and np.isfinite(loc.product.imag)


def test_gue_compensator_value():
    want = np.exp(1.3 * 0.5 / (2.0 * semicircle_density(0.5)))
    assert gue_compensator(0.5, 1.3) == pytest.approx(want, rel=1e-14)


def test_normalized_gue_grid():
    spectrum = sample_spectrum_fast(Ensemble.GUE, 60, seed=2)
    grid = np.array([0.4, 1.0 + 0.5j])
    xi = xi_grid(spectrum, grid, energy=0.5)
    rho = semicircle_density(0.5)
    factor = np.exp(-grid * (0.5 / (2.0 * rho) - 1j * np.pi))
    got = normalized_gue(spectrum, 0.5, grid)
    np.testing.assert_allclose(got, xi * factor, rtol=1e-12)


# ------------------------------------------------------------ multipoint


def test_ratio_statistic_trivial_when_multisets_match():
    spectrum = sample_spectrum(Ensemble.CUE, 10, seed=4)
    alphas = np.array([0.5, 1.0 + 1j, -0.3])
    betas = np.array([1.0 + 1j, -0.3, 0.5])
    assert ratio_statistic(spectrum, alphas, betas) == (1 + 0j)


def test_ratio_statistic_matches_xi_quotient():
    spectrum = sample_spectrum(Ensemble.SP, 14, seed=6)
    alphas = np.array([0.4, 1.1 - 0.2j])
    betas = np.array([0.9j, 2.0])
    num = np.prod(xi_grid(spectrum, alphas, energy=0.2))
    den = np.prod(xi_grid(spectrum, betas, energy=0.2))
    got = ratio_statistic(spectrum, alphas, betas, energy=0.2)
    assert got == pytest.approx(num / den, rel=1e-10)
