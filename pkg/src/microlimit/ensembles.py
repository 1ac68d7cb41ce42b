"""Haar-distributed compact-group spectra, GUE spectra, and microscopic
rescaling of sampled configurations.

Every sampler is a pure function of (parameters, seed).  Eigenangles of
the structured groups are extracted through symmetrized eigenproblems
and then snapped/paired, so the exact group constraints (negation
closure, the fixed eigenvalue of odd special orthogonal matrices) hold
on every sample instead of merely up to eigensolver noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .errors import InputError
from .kernels import semicircle_density
from .seeds import rng_from

# above this dimension unitary eigenangles come from the Hermitian-part
# route (eigh + Rayleigh sines), which is several times faster than a
# general complex eigensolve and equally accurate after cluster repair
_DIRECT_EIG_MAX = 160

_SNAP = 1e-9


class Ensemble(Enum):
    CUE = "cue"
    SO = "so"
    SP = "sp"
    GUE = "gue"


class HaarGroup(Enum):
    U = "u"
    SO = "so"
    SP = "sp"


@dataclass(frozen=True)
class Spectrum:
    """One sampled eigenvalue configuration.

    Compact ensembles carry ``angles`` (eigenvalue = e^{i 2 pi theta},
    theta in [-1/2, 1/2), sorted); GUE carries ``levels`` (real
    eigenvalues, ascending).
    """

    ensemble: Ensemble
    n: int
    seed: int
    angles: np.ndarray | None = None
    levels: np.ndarray | None = None

    def __post_init__(self) -> None:
        compact = self.ensemble is not Ensemble.GUE
        data = self.angles if compact else self.levels
        wrong = self.levels if compact else self.angles
        if data is None or wrong is not None:
            raise InputError(
                f"{self.ensemble.value} spectra carry "
                f"{'angles' if compact else 'levels'} only"
            )
        if data.shape != (self.n,):
            raise InputError(f"expected {self.n} entries, got shape {data.shape}")


@dataclass(frozen=True)
class PointConfig:
    """Finite microscopic point configuration around a bulk energy."""

    points: np.ndarray
    center: float
    scalefactor: float
    windowradius: float
    degenerate: bool = False


def symplectic_form(n: int) -> np.ndarray:
    """The form J = [[0, I], [-I, 0]] preserved by Sp(n)."""
    if n % 2:
        raise InputError("symplectic form needs even dimension")
    m = n // 2
    j = np.zeros((n, n))
    j[:m, m:] = np.eye(m)
    j[m:, :m] = -np.eye(m)
    return j


# ------------------------------------------------------------------ sampling


def _haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def _haar_special_orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n))
    q, r = np.linalg.qr(a)
    q = q * np.where(np.diagonal(r) < 0.0, -1.0, 1.0)
    if np.linalg.slogdet(q)[0] < 0:
        # push the reflection coset onto SO(n) by a fixed left translation
        q[0, :] = -q[0, :]
    return q


def _haar_symplectic(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar element of Sp(2m) in the complex embedding.

    Gram-Schmidt over quaternions realized pairwise: each accepted
    column v brings its symplectic partner [-conj(v_bot); conj(v_top)],
    which is automatically orthogonal to v and to all earlier pairs.
    """
    d = 2 * m
    work = np.empty((d, d), dtype=np.complex128)
    k = 0
    for _ in range(m):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        cols = work[:, :k]
        # twice-iterated classical Gram-Schmidt keeps loss of
        # orthogonality at the 1e-15 level
        v = v - cols @ (cols.conj().T @ v)
        v = v - cols @ (cols.conj().T @ v)
        v = v / np.linalg.norm(v)
        w = np.concatenate([-np.conj(v[m:]), np.conj(v[:m])])
        w = w - cols @ (cols.conj().T @ w)
        w = w - v * (v.conj() @ w)
        w = w / np.linalg.norm(w)
        work[:, k] = v
        work[:, k + 1] = w
        k += 2
    out = np.empty_like(work)
    out[:, :m] = work[:, 0::2]
    out[:, m:] = work[:, 1::2]
    return out


def haar_matrix(group: HaarGroup, n: int, seed: int) -> np.ndarray:
    """Dense Haar-distributed matrix; capped at n <= 64.

    Consumes the same derived stream as sample_spectrum, so the
    eigenangles of the returned matrix match the sampled spectrum for
    the same (group, n, seed).
    """
    group = HaarGroup(group)
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    if n > 64:
        raise InputError("haar_matrix is for oracle-sized matrices (n <= 64)")
    rng = rng_from(seed)
    if group is HaarGroup.U:
        return _haar_unitary(rng, n)
    if group is HaarGroup.SO:
        return _haar_special_orthogonal(rng, n)
    if n % 2:
        raise InputError("symplectic matrices need even dimension")
    return _haar_symplectic(rng, n // 2)


# ----------------------------------------------------------- angle extraction


def _wrap_half(a: np.ndarray) -> np.ndarray:
    return ((a + 0.5) % 1.0) - 0.5


def _unitary_angles(u: np.ndarray) -> np.ndarray:
    """Eigenangles of a unitary matrix in [-1/2, 1/2), sorted."""
    n = u.shape[0]
    if n <= _DIRECT_EIG_MAX:
        theta = np.angle(np.linalg.eigvals(u)) / (2.0 * np.pi)
        return np.sort(_wrap_half(theta))
    h = (u + u.conj().T) / 2.0
    c, vec = np.linalg.eigh(h)
    s_part = (u - u.conj().T) * (-0.5j)
    sv = s_part @ vec
    s = np.einsum("ij,ij->j", vec.conj(), sv).real
    # Rayleigh quotients break down when cosines nearly coincide;
    # re-diagonalize u restricted to each such cluster
    gaps = np.diff(c)
    breaks = np.nonzero(gaps > 1e-9)[0]
    starts = np.concatenate([[0], breaks + 1])
    ends = np.concatenate([breaks + 1, [n]])
    for a, b in zip(starts, ends):
        if b - a >= 2:
            blk = vec[:, a:b]
            lam = np.linalg.eigvals(blk.conj().T @ (u @ blk))
            c[a:b] = lam.real
            s[a:b] = lam.imag
    theta = np.arctan2(s, c) / (2.0 * np.pi)
    return np.sort(_wrap_half(theta))


def _paired_halfangles(hermitian_part: np.ndarray, drop_fixed_one: bool) -> np.ndarray:
    """Half-angles from the cosine spectrum of a +/- paired matrix."""
    c = np.linalg.eigvalsh(hermitian_part)
    if drop_fixed_one:
        c = c[:-1]  # the fixed eigenvalue at angle 0 is the largest cosine
    avg = 0.5 * (c[0::2] + c[1::2])
    theta = np.arccos(np.clip(avg, -1.0, 1.0)) / (2.0 * np.pi)
    theta[theta < _SNAP] = 0.0
    theta[theta > 0.5 - _SNAP] = 0.5
    return theta


def _compact_angles(g: np.ndarray, ensemble: Ensemble) -> np.ndarray:
    n = g.shape[0]
    if ensemble is Ensemble.CUE:
        return _unitary_angles(g)
    if ensemble is Ensemble.SO:
        h = (g + g.T) / 2.0
        odd = bool(n % 2)
        half = _paired_halfangles(h, drop_fixed_one=odd)
        parts = [half, -half] + ([np.zeros(1)] if odd else [])
    else:
        h = (g + g.conj().T) / 2.0
        half = _paired_halfangles(h, drop_fixed_one=False)
        parts = [half, -half]
    return np.sort(_wrap_half(np.concatenate(parts)))


def sample_spectrum(ensemble: Ensemble, n: int, seed: int) -> Spectrum:
    """Sample one spectrum; deterministic given (ensemble, n, seed)."""
    ensemble = Ensemble(ensemble)
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    n = int(n)
    rng = rng_from(seed)
    if ensemble is Ensemble.CUE:
        angles = _compact_angles(_haar_unitary(rng, n), ensemble)
        return Spectrum(ensemble, n, seed, angles=angles)
    if ensemble is Ensemble.SO:
        angles = _compact_angles(_haar_special_orthogonal(rng, n), ensemble)
        return Spectrum(ensemble, n, seed, angles=angles)
    if ensemble is Ensemble.SP:
        if n % 2:
            raise InputError("symplectic matrices need even dimension")
        angles = _compact_angles(_haar_symplectic(rng, n // 2), ensemble)
        return Spectrum(ensemble, n, seed, angles=angles)
    levels = np.linalg.eigvalsh(gue_matrix(n, seed))
    return Spectrum(ensemble, n, seed, levels=levels)


def gue_matrix(n: int, seed: int) -> np.ndarray:
    """Dense GUE matrix; its eigvalsh equals sample_spectrum(GUE, n, seed)."""
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    n = int(n)
    rng = rng_from(seed)
    a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    return (a + a.conj().T) / np.sqrt(2.0)


def sample_gue_tridiag(n: int, seed: int) -> Spectrum:
    """GUE spectrum via the equal-in-law symmetric tridiagonal model.

    Diagonal: standard Gaussians; sub-diagonal: chi_{2(n-k)} / sqrt(2),
    k = 1..n-1.  RNG order: diagonal first, then the sub-diagonal.
    O(n^2) eigenvalues against O(n^3) for the dense route.
    """
    if int(n) != n or n < 2:
        raise InputError("n must be an integer >= 2")
    n = int(n)
    rng = rng_from(seed)
    diag = rng.standard_normal(n)
    dof = 2.0 * np.arange(n - 1, 0, -1)
    sub = np.sqrt(rng.chisquare(dof)) / np.sqrt(2.0)
    levels = eigvalsh_tridiagonal(diag, sub)
    return Spectrum(Ensemble.GUE, n, seed, levels=np.sort(levels))


def sample_spectrum_fast(ensemble: Ensemble, n: int, seed: int) -> Spectrum:
    """Same laws as sample_spectrum; GUE switches to the tridiagonal route.

    Monte Carlo drivers use this; the dense/tridiagonal agreement is
    itself under test, not assumed.
    """
    ensemble = Ensemble(ensemble)
    if ensemble is Ensemble.GUE:
        return sample_gue_tridiag(n, seed)
    return sample_spectrum(ensemble, n, seed)


# -------------------------------------------------------------- microscopic


def _validate_energy(ensemble: Ensemble, E: float) -> None:
    if not np.isfinite(E):
        raise InputError("E must be finite")
    if ensemble is Ensemble.GUE:
        if not -2.0 < E < 2.0:
            raise InputError(f"GUE bulk energies lie in (-2, 2), got {E!r}")
        return
    if not -0.5 < E < 0.5:
        raise InputError(f"compact-group energies lie in (-1/2, 1/2), got {E!r}")
    if ensemble in (Ensemble.SO, Ensemble.SP) and E == 0.0:
        raise InputError(
            "so/sp microscopic statistics need a fixed nonzero energy E in "
            "(-1/2, 1/2); the scaling limit is not the translation-invariant "
            "one at E = 0"
        )


def microscopic_points(spectrum: Spectrum, E: float, windowradius: float) -> PointConfig:
    """Pull the spectrum back to microscopic coordinates around E.

    Compact groups: all integer translates {n (theta_j - E + nu)} with
    magnitude <= windowradius.  GUE: {n rho_sc(E) (lambda_i / sqrt(n) - E)}.
    Points are sorted; duplicates within 1e-12 set the degenerate flag.
    """
    _validate_energy(spectrum.ensemble, E)
    if not np.isfinite(windowradius) or windowradius < 0:
        raise InputError("windowradius must be a nonnegative real")
    n = spectrum.n
    if spectrum.ensemble is Ensemble.GUE:
        scale = n * semicircle_density(E)
        pts = scale * (spectrum.levels / np.sqrt(n) - E)
        pts = pts[np.abs(pts) <= windowradius]
    else:
        scale = float(n)
        theta = spectrum.angles
        lo = E - windowradius / n
        hi = E + windowradius / n
        nu_lo = int(np.floor(lo - np.max(theta)))
        nu_hi = int(np.ceil(hi - np.min(theta)))
        nu = np.arange(nu_lo, nu_hi + 1)
        grid = n * (theta[:, None] - E + nu[None, :])
        pts = grid[np.abs(grid) <= windowradius]
    pts = np.sort(pts)
    degenerate = bool(pts.size >= 2 and np.any(np.diff(pts) < 1e-12))
    return PointConfig(pts, float(E), float(scale), float(windowradius), degenerate)
