"""Window-count statistics of the eigenvalue point processes.

Determinantal quadrature oracles for count means and variances, Monte
Carlo counterparts computed from sampled spectra, and an audit of
microscopic window counts across dyadic window sizes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ensembles import (
    Ensemble,
    Spectrum,
    _validate_energy,
    microscopic_points,
    sample_spectrum_fast,
)
from .errors import InputError
from .kernels import (
    KernelFamily,
    KernelSpec,
    kernel_diag,
    kernel_matrix,
    semicircle_density,
)
from .quadrature import panel_nodes
from .seeds import derive_seed

# entries held in one kernel_matrix block of the variance integral
_BLOCK_ENTRIES = 2_000_000


@dataclass(frozen=True)
class Interval:
    """Half-open counting window [lo, hi)."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lo) and np.isfinite(self.hi)):
            raise InputError("interval endpoints must be finite")
        if not self.hi > self.lo:
            raise InputError(f"empty interval [{self.lo}, {self.hi})")

    @property
    def length(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class CountSummary:
    """Monte Carlo count statistics for one window, with oracles if known."""

    ensemble: Ensemble
    n: int
    interval: Interval
    energy: float | None
    replicas: int
    mean: float
    variance: float
    stderr_mean: float
    stderr_var: float
    oracle_mean: float | None
    oracle_variance: float | None


@dataclass(frozen=True)
class AmenabilityReport:
    """Dyadic-window audit of microscopic counts around one energy.

    ``defects`` hold |mean(count[L,2L) - count[-2L,-L))| per length,
    floored at the standard error of that paired difference so the
    log-log slope stays defined when the defect is pure noise.
    """

    ensemble: Ensemble
    n: int
    energy: float
    lengths: tuple[float, ...]
    replicas: int
    means: tuple[float, ...]
    variances: tuple[float, ...]
    defects: tuple[float, ...]
    mean_slope: float
    var_slope: float
    symmetry_slope: float
    passed: bool


# ------------------------------------------------------------------ oracles


def _require_inside(spec: KernelSpec, interval: Interval) -> None:
    lo, hi = spec.domain
    if interval.lo < lo or interval.hi > hi:
        raise InputError(
            f"interval [{interval.lo}, {interval.hi}) leaves the "
            f"{spec.family.value} kernel domain [{lo}, {hi}]"
        )


def expected_count_quadrature(spec: KernelSpec, interval: Interval) -> float:
    """E X_I = integral of K(x, x) over the window."""
    _require_inside(spec, interval)
    if spec.family is KernelFamily.SINE:
        return interval.length
    x, w = panel_nodes(interval.lo, interval.hi, spec.oscillation_panel)
    return float(w @ kernel_diag(spec, x))


def variance_count_quadrature(spec: KernelSpec, interval: Interval) -> float:
    """Var X_I = E X_I - double integral of K(x, y)^2 over the window.

    Exact for these kernels because each is a projection.  The double
    integral runs on half-width panels (K^2 oscillates twice as fast)
    and is accumulated in row blocks to bound memory.
    """
    mean = expected_count_quadrature(spec, interval)
    x, w = panel_nodes(interval.lo, interval.hi, 0.5 * spec.oscillation_panel)
    step = max(1, _BLOCK_ENTRIES // x.size)
    acc = 0.0
    for i in range(0, x.size, step):
        blk = kernel_matrix(spec, x[i : i + step], x)
        acc += float(w[i : i + step] @ (blk * blk) @ w)
    return mean - acc


def _family_spec(ensemble: Ensemble, n: int) -> KernelSpec | None:
    if ensemble is Ensemble.SO:
        fam = KernelFamily.SO_EVEN if n % 2 == 0 else KernelFamily.SO_ODD
        return KernelSpec(fam, n // 2)
    if ensemble is Ensemble.SP:
        return KernelSpec(KernelFamily.SP, n // 2)
    if ensemble is Ensemble.GUE:
        return KernelSpec(KernelFamily.GUE, n)
    return None


def _oracle_pair(
    ensemble: Ensemble, n: int, energy: float | None, interval: Interval
) -> tuple[float | None, float | None]:
    spec = _family_spec(ensemble, n)
    if energy is None:
        if spec is None:
            return n * interval.length, None
        return (
            expected_count_quadrature(spec, interval),
            variance_count_quadrature(spec, interval),
        )
    if ensemble is Ensemble.GUE:
        root = np.sqrt(n)
        rho = semicircle_density(energy)
        mapped = Interval(
            root * energy + interval.lo / (root * rho),
            root * energy + interval.hi / (root * rho),
        )
        return (
            expected_count_quadrature(spec, mapped),
            variance_count_quadrature(spec, mapped),
        )
    if ensemble is Ensemble.CUE:
        # unit microscopic density at every energy; no finite-n kernel here
        return interval.length, None
    arc = (energy + interval.lo / n, energy + interval.hi / n)
    if not (0.0 < arc[0] and arc[1] < 0.5):
        # window wraps past an endpoint of the fundamental half-arc, where
        # raw counts mix the point process with its mirror image
        return None, None
    mapped = Interval(arc[0], arc[1])
    return (
        expected_count_quadrature(spec, mapped),
        variance_count_quadrature(spec, mapped),
    )


# --------------------------------------------------------------- empirical


def _raw_points(spectrum: Spectrum) -> np.ndarray:
    if spectrum.ensemble is Ensemble.GUE:
        return spectrum.levels
    if spectrum.ensemble is Ensemble.CUE:
        return np.sort(spectrum.angles)
    a = spectrum.angles
    return np.sort(a[a > 0.0])


def _check_raw_interval(ensemble: Ensemble, interval: Interval) -> None:
    if ensemble in (Ensemble.SO, Ensemble.SP):
        if interval.lo < 0.0 or interval.hi > 0.5:
            raise InputError("raw so/sp counting windows live inside [0, 1/2]")
    elif ensemble is Ensemble.CUE:
        if interval.lo < -0.5 or interval.hi > 0.5:
            raise InputError("raw cue counting windows live inside [-1/2, 1/2]")


def _count_sorted(pts: np.ndarray, intervals: tuple[Interval, ...]) -> np.ndarray:
    out = np.empty(len(intervals))
    for i, iv in enumerate(intervals):
        out[i] = np.searchsorted(pts, iv.hi, side="left") - np.searchsorted(
            pts, iv.lo, side="left"
        )
    return out


def count_table(
    ensemble: Ensemble,
    n: int,
    intervals,
    replicas: int,
    seed: int = 0,
    energy: float | None = None,
    workers: int | None = None,
) -> tuple[CountSummary, ...]:
    """Count statistics for several windows over one set of spectra.

    Every window is counted on the same ``replicas`` sampled spectra, so
    summaries for different windows are correlated but each is unbiased.
    With ``energy`` the windows are read in microscopic coordinates
    around it; otherwise they are raw angle/level windows.
    """
    ensemble = Ensemble(ensemble)
    intervals = tuple(
        iv if isinstance(iv, Interval) else Interval(*iv) for iv in intervals
    )
    if not intervals:
        raise InputError("need at least one counting window")
    if replicas < 2:
        raise InputError("need at least 2 replicas for variance estimates")
    radius = 0.0
    if energy is not None:
        _validate_energy(ensemble, energy)
        radius = max(max(abs(iv.lo), abs(iv.hi)) for iv in intervals)
        if ensemble is not Ensemble.GUE and 2.0 * radius >= n:
            raise InputError(
                f"microscopic window spans {2 * radius:g} >= one full period {n}"
            )
    else:
        for iv in intervals:
            _check_raw_interval(ensemble, iv)

    def _row(r: int) -> np.ndarray:
        spectrum = sample_spectrum_fast(ensemble, n, derive_seed(seed, r))
        if energy is None:
            pts = _raw_points(spectrum)
        else:
            pts = microscopic_points(spectrum, energy, radius).points
        return _count_sorted(pts, intervals)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, range(replicas)))
    else:
        rows = [_row(r) for r in range(replicas)]
    counts = np.stack(rows)

    out = []
    for j, iv in enumerate(intervals):
        col = counts[:, j]
        mean = float(col.mean())
        var = float(col.var(ddof=1))
        se_mean = float(col.std(ddof=1) / np.sqrt(replicas))
        m4 = float(np.mean((col - mean) ** 4))
        se_var = float(
            np.sqrt(
                max(m4 - var * var * (replicas - 3) / (replicas - 1), 0.0) / replicas
            )
        )
        om, ov = _oracle_pair(ensemble, n, energy, iv)
        out.append(
            CountSummary(
                ensemble, n, iv, energy, replicas, mean, var, se_mean, se_var, om, ov
            )
        )
    return tuple(out)


def empirical_count_stats(
    ensemble: Ensemble,
    n: int,
    interval: Interval,
    replicas: int,
    seed: int = 0,
    energy: float | None = None,
    workers: int | None = None,
) -> CountSummary:
    """Count statistics for one window; see count_table."""
    return count_table(ensemble, n, (interval,), replicas, seed, energy, workers)[0]


# -------------------------------------------------------------------- audit


def _loglog_slope(lengths: np.ndarray, values: np.ndarray) -> float:
    return float(np.polyfit(np.log(lengths), np.log(values), 1)[0])


def amenability_audit(
    ensemble: Ensemble,
    n: int,
    energy: float,
    lengths=(2.0, 4.0, 8.0, 16.0),
    replicas: int = 800,
    seed: int = 0,
    workers: int | None = None,
) -> AmenabilityReport:
    """Check that microscopic counts grow like translation-invariant ones.

    For each L the windows [L, 2L) and [-2L, -L) are counted on shared
    spectra.  PASS needs the log-log slope of the mean <= 1.1, of the
    variance < 1.9, and of the noise-floored left/right defect < 0.9.
    """
    ensemble = Ensemble(ensemble)
    lengths = tuple(sorted(float(L) for L in lengths))
    if len(lengths) < 3:
        raise InputError("need at least 3 window lengths for slopes")
    if lengths[0] <= 0.0:
        raise InputError("window lengths must be positive")
    _validate_energy(ensemble, energy)
    if replicas < 8:
        raise InputError("need at least 8 replicas")
    radius = 2.0 * lengths[-1]
    if ensemble is not Ensemble.GUE and 2.0 * radius >= n:
        raise InputError(
            f"largest window needs radius {radius:g}, more than half a period of {n}"
        )
    windows = tuple(
        Interval(L, 2.0 * L) for L in lengths
    ) + tuple(Interval(-2.0 * L, -L) for L in lengths)

    def _row(r: int) -> np.ndarray:
        spectrum = sample_spectrum_fast(ensemble, n, derive_seed(seed, r))
        pts = microscopic_points(spectrum, energy, radius).points
        return _count_sorted(pts, windows)

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_row, range(replicas)))
    else:
        rows = [_row(r) for r in range(replicas)]
    counts = np.stack(rows)

    k = len(lengths)
    plus, minus = counts[:, :k], counts[:, k:]
    means = plus.mean(axis=0)
    variances = plus.var(axis=0, ddof=1)
    if np.any(means <= 0.0) or np.any(variances <= 0.0):
        raise InputError("degenerate window counts; enlarge replicas or lengths")
    diff = plus - minus
    defect_se = diff.std(axis=0, ddof=1) / np.sqrt(replicas)
    defects = np.maximum(np.abs(diff.mean(axis=0)), defect_se)

    arr = np.asarray(lengths)
    mean_slope = _loglog_slope(arr, means)
    var_slope = _loglog_slope(arr, variances)
    symmetry_slope = _loglog_slope(arr, defects)
    passed = mean_slope <= 1.1 and var_slope < 1.9 and symmetry_slope < 0.9
    return AmenabilityReport(
        ensemble,
        n,
        float(energy),
        lengths,
        replicas,
        tuple(float(v) for v in means),
        tuple(float(v) for v in variances),
        tuple(float(v) for v in defects),
        mean_slope,
        var_slope,
        symmetry_slope,
        passed,
    )
