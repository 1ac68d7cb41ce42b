"""Ratio products of characteristic polynomials over sampled spectra.

The shifted-over-anchored determinant ratio is evaluated from
eigenvalues as a log-space product; a slogdet route over the sampled
matrix itself serves as an independent oracle for moderate sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ensembles import (
    Ensemble,
    HaarGroup,
    PointConfig,
    Spectrum,
    _validate_energy,
    gue_matrix,
    haar_matrix,
)
from .errors import DegenerateSampleError, InputError
from .kernels import semicircle_density

# a ratio factor with its pole this close to a sampled point is treated
# as a degenerate draw rather than evaluated
_POLE_TOL = 1e-13

_GROUP_OF = {
    Ensemble.CUE: HaarGroup.U,
    Ensemble.SO: HaarGroup.SO,
    Ensemble.SP: HaarGroup.SP,
}


@dataclass(frozen=True)
class LocalizedRatio:
    """Ratio product restricted to zeros near the energy."""

    product: complex
    delta: float
    count: int
    compensator: complex


def _resolve_energy(ensemble: Ensemble, energy: float | None) -> float:
    if ensemble is Ensemble.CUE:
        if energy not in (None, 0.0):
            raise InputError("cue ratios are anchored at energy 0")
        return 0.0
    if energy is None:
        raise InputError(f"{ensemble.value} ratios need an explicit energy")
    _validate_energy(ensemble, energy)
    return float(energy)


def _microscopic_zeros(spectrum: Spectrum, energy: float) -> np.ndarray:
    n = spectrum.n
    return n * semicircle_density(energy) * (spectrum.levels / np.sqrt(n) - energy)


def _row_products(fac: np.ndarray) -> np.ndarray:
    # fac has one row per evaluation point; keeping the product reduction
    # on the contiguous last axis makes scalar and grid calls bit-equal
    out = np.empty(fac.shape[0], dtype=complex)
    dead = np.any(fac == 0.0, axis=1)
    out[dead] = 0.0
    if not dead.all():
        live = ~dead
        out[live] = np.exp(np.sum(np.log(fac[live]), axis=1))
    return out


def xi_grid(spectrum: Spectrum, sgrid, energy: float | None = None) -> np.ndarray:
    """Characteristic-polynomial ratio on a grid of shifts s.

    Compact ensembles evaluate det(e^{i2pi(E + s/n)} - g) / det(e^{i2pi E} - g)
    from the sampled eigenangles; GUE evaluates the product of
    (1 - s/x_i) over microscopic zeros x_i = n rho(E) (Lambda_i - E).
    """
    e = _resolve_energy(spectrum.ensemble, energy)
    s = np.atleast_1d(np.asarray(sgrid, dtype=complex))
    if spectrum.ensemble is Ensemble.GUE:
        x = _microscopic_zeros(spectrum, e)
        if np.min(np.abs(x)) < _POLE_TOL:
            raise DegenerateSampleError(
                "a microscopic zero sits on the reference energy; resample"
            )
        fac = 1.0 - s[:, None] / x[None, :]
    else:
        z = np.exp(2j * np.pi * spectrum.angles)
        den = np.exp(2j * np.pi * e) - z
        if np.min(np.abs(den)) < _POLE_TOL:
            raise DegenerateSampleError(
                "an eigenangle sits on the anchor energy; resample"
            )
        shift = np.exp(2j * np.pi * (e + s / spectrum.n))
        fac = (shift[:, None] - z[None, :]) / den[None, :]
    out = _row_products(fac)
    # complex division rounds z/z away from 1, so pin the anchor itself
    out[s == 0.0] = 1.0 + 0j
    return out


def xi_eval(spectrum: Spectrum, s, energy: float | None = None) -> complex:
    """Scalar convenience wrapper around xi_grid."""
    return complex(xi_grid(spectrum, np.asarray([s], dtype=complex), energy)[0])


def det_oracle(
    ensemble: Ensemble, n: int, seed: int, s, energy: float | None = None
) -> complex:
    """Same ratio through slogdet of the sampled matrix itself.

    Independent of the eigenvalue route: it redraws the matrix for
    (ensemble, n, seed) and never forms the spectrum.  Capped at n <= 64
    like haar_matrix; meant for cross-checks, not production sampling.
    """
    ensemble = Ensemble(ensemble)
    if n > 64:
        raise InputError("determinant oracle is capped at n <= 64")
    e = _resolve_energy(ensemble, energy)
    s = complex(s)
    eye = np.eye(n)
    if ensemble is Ensemble.GUE:
        m = gue_matrix(n, seed)
        root = np.sqrt(float(n))
        rho = semicircle_density(e)
        sign_a, log_a = np.linalg.slogdet(m - (root * e + s / (root * rho)) * eye)
        sign_b, log_b = np.linalg.slogdet(m - root * e * eye)
    else:
        g = haar_matrix(_GROUP_OF[ensemble], n, seed)
        sign_a, log_a = np.linalg.slogdet(
            np.exp(2j * np.pi * (e + s / n)) * eye - g
        )
        sign_b, log_b = np.linalg.slogdet(np.exp(2j * np.pi * e) * eye - g)
    return complex(sign_a / sign_b * np.exp(log_a - log_b))


def truncated_product(config: PointConfig, s, cutoff: float | None = None) -> complex:
    """e^{i pi s} times the product of (1 - s/x) over points with |x| <= cutoff.

    The finite-window approximation of the limiting ratio function; the
    phase factor compensates the principal-value pairing of far zeros.
    """
    b = config.windowradius if cutoff is None else float(cutoff)
    if not 0.0 < b <= config.windowradius:
        raise InputError("cutoff must lie in (0, windowradius]")
    pts = config.points[np.abs(config.points) <= b]
    if pts.size and np.min(np.abs(pts)) < _POLE_TOL:
        raise DegenerateSampleError("configuration point at the origin; resample")
    s = complex(s)
    fac = 1.0 - s / pts if pts.size else np.ones(0, dtype=complex)
    if np.any(fac == 0.0):
        return 0j
    return complex(np.exp(1j * np.pi * s + np.sum(np.log(fac))))


def gue_compensator(energy: float, s):
    """exp(s E / (2 rho_sc(E))), the deterministic far-zero factor."""
    s_arr = np.asarray(s, dtype=complex)
    out = np.exp(s_arr * energy / (2.0 * semicircle_density(energy)))
    return complex(out) if out.ndim == 0 else out


def localized_gue(
    spectrum: Spectrum, energy: float, s, delta: float | None = None
) -> LocalizedRatio:
    """Ratio product over zeros with |Lambda_i - E| <= delta.

    Default window n^{-1/10}.  product * compensator approximates the
    full ratio, sharpening as n grows.
    """
    if spectrum.ensemble is not Ensemble.GUE:
        raise InputError("localization applies to gue spectra")
    _validate_energy(Ensemble.GUE, energy)
    d = spectrum.n ** -0.1 if delta is None else float(delta)
    if not d > 0.0:
        raise InputError("delta must be positive")
    lam = spectrum.levels / np.sqrt(spectrum.n)
    mask = np.abs(lam - energy) <= d
    x = _microscopic_zeros(spectrum, float(energy))[mask]
    if x.size and np.min(np.abs(x)) < _POLE_TOL:
        raise DegenerateSampleError(
            "a microscopic zero sits on the reference energy; resample"
        )
    s = complex(s)
    fac = 1.0 - s / x if x.size else np.ones(0, dtype=complex)
    if np.any(fac == 0.0):
        product = 0j
    else:
        product = complex(np.exp(np.sum(np.log(fac))))
    return LocalizedRatio(product, d, int(mask.sum()), gue_compensator(energy, s))


def normalized_gue(spectrum: Spectrum, energy: float, sgrid):
    """Full GUE ratio rescaled by exp(-s (E / (2 rho) - i pi)).

    Removes the deterministic drift so the values are comparable with
    compact-group ratios at the same shifts.
    """
    s = np.atleast_1d(np.asarray(sgrid, dtype=complex))
    xi = xi_grid(spectrum, s, energy=energy)
    rho = semicircle_density(energy)
    out = xi * np.exp(-s * (energy / (2.0 * rho) - 1j * np.pi))
    return complex(out[0]) if np.ndim(sgrid) == 0 else out


def ratio_statistic(
    spectrum: Spectrum, alphas, betas, energy: float | None = None
) -> complex:
    """prod_k xi(alpha_k) / prod_k xi(beta_k).

    Equal shift multisets short-circuit to exactly 1 so cancellation can
    never turn an identity into round-off noise.
    """
    a = np.sort_complex(np.asarray(alphas, dtype=complex))
    b = np.sort_complex(np.asarray(betas, dtype=complex))
    if a.shape == b.shape and np.array_equal(a, b):
        return 1 + 0j
    num = np.prod(xi_grid(spectrum, np.asarray(alphas), energy))
    den = np.prod(xi_grid(spectrum, np.asarray(betas), energy))
    if den == 0:
        raise DegenerateSampleError("ratio statistic hits a zero of the denominator")
    return complex(num / den)
