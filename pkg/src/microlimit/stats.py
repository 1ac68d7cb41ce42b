"""Two-sample distances between ratio laws and convergence sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import special

from .charpoly import normalized_gue, xi_grid
from .ensembles import Ensemble, sample_spectrum_fast
from .errors import DegenerateSampleError, InputError
from .seeds import derive_seed

_MIN_SAMPLES = 50
_MAX_RESAMPLE = 5


@dataclass(frozen=True)
class KSResult:
    """Two-sample Kolmogorov-Smirnov distance with asymptotic p-value."""

    statistic: float
    pvalue: float
    m1: int
    m2: int


class RatioFunctional(Enum):
    """Real-valued readouts of a complex ratio draw."""

    LOG_ABS = "log-abs"
    REAL = "real"
    IMAG = "imag"


@dataclass(frozen=True)
class ConvergenceRow:
    """One KS comparison; shift None marks the two-point sum readout."""

    ensemble: Ensemble
    n: int
    shift: complex | None
    functional: RatioFunctional
    statistic: float
    pvalue: float


@dataclass(frozen=True)
class ConvergenceTable:
    ensemble: Ensemble
    energy: float | None
    replicas: int
    reference_replicas: int
    rows: tuple[ConvergenceRow, ...]


def functional_values(values, functional) -> np.ndarray:
    """Apply one RatioFunctional elementwise."""
    v = np.asarray(values)
    functional = RatioFunctional(functional)
    if functional is RatioFunctional.LOG_ABS:
        mag = np.abs(v)
        if np.any(mag == 0.0):
            raise InputError("log-abs is undefined on an exact zero of the ratio")
        return np.log(mag)
    if functional is RatioFunctional.REAL:
        return np.real(v).astype(float)
    return np.imag(v).astype(float)


def ks_two_sample(a, b) -> KSResult:
    """KS distance of two empirical laws, p from the asymptotic tail.

    The supremum is taken over the pooled sample with right-continuous
    empirical CDFs, which handles ties exactly.
    """
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size < _MIN_SAMPLES or b.size < _MIN_SAMPLES:
        raise InputError(f"need at least {_MIN_SAMPLES} samples on each side")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise InputError("samples must be finite")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    en = np.sqrt(a.size * b.size / (a.size + b.size))
    return KSResult(d, float(special.kolmogorov(d * en)), a.size, b.size)


def ratio_batch(
    ensemble: Ensemble,
    n: int,
    shifts,
    replicas: int,
    seed: int = 0,
    energy: float | None = None,
    workers: int | None = None,
) -> np.ndarray:
    """Ratio draws on a shift grid, shape (replicas, len(shifts)).

    GUE rows come back drift-normalized so every ensemble targets the
    same limiting law.  Degenerate spectra are replaced, at most
    5 per replica slot.
    """
    ensemble = Ensemble(ensemble)
    s = np.atleast_1d(np.asarray(shifts, dtype=complex))
    if replicas < 1:
        raise InputError("need at least one replica")

    def _one(r: int) -> np.ndarray:
        for attempt in range(_MAX_RESAMPLE + 1):
            sd = derive_seed(seed, r) if attempt == 0 else derive_seed(seed, r, attempt)
            spectrum = sample_spectrum_fast(ensemble, n, sd)
            try:
                if ensemble is Ensemble.GUE:
                    return normalized_gue(spectrum, energy, s)
                return xi_grid(spectrum, s, energy=energy)
            except DegenerateSampleError:
                continue
        raise DegenerateSampleError(
            f"spectra stayed degenerate after {_MAX_RESAMPLE} replacements"
        )

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, range(replicas)))
    else:
        rows = [_one(r) for r in range(replicas)]
    return np.stack(rows)


def convergence_sweep(
    ensemble: Ensemble,
    sizes,
    shifts,
    energy: float | None,
    reference: np.ndarray,
    replicas: int,
    seed: int = 0,
    functionals=(RatioFunctional.LOG_ABS,),
    twopoint: bool = False,
    workers: int | None = None,
) -> ConvergenceTable:
    """KS distances between finite-size ratio draws and a reference batch.

    ``reference`` is a complex (m, len(shifts)) array such as
    cue_reference_batch output.  One row per (size, shift, functional);
    with ``twopoint`` also one row per size comparing the joint readout
    Re xi(s_0) + Re xi(s_1).
    """
    ensemble = Ensemble(ensemble)
    s = np.atleast_1d(np.asarray(shifts, dtype=complex))
    ref = np.asarray(reference)
    if ref.ndim != 2 or ref.shape[1] != s.size:
        raise InputError("reference must have shape (replicas, len(shifts))")
    functionals = tuple(RatioFunctional(f) for f in functionals)
    if not functionals:
        raise InputError("need at least one functional")
    if twopoint and s.size < 2:
        raise InputError("twopoint rows need at least two shifts")
    rows = []
    for i, n in enumerate(sizes):
        batch = ratio_batch(
            ensemble, int(n), s, replicas, derive_seed(seed, i), energy, workers
        )
        for j in range(s.size):
            for f in functionals:
                res = ks_two_sample(
                    functional_values(batch[:, j], f),
                    functional_values(ref[:, j], f),
                )
                rows.append(
                    ConvergenceRow(
                        ensemble, int(n), complex(s[j]), f, res.statistic, res.pvalue
                    )
                )
        if twopoint:
            res = ks_two_sample(
                batch[:, 0].real + batch[:, 1].real,
                ref[:, 0].real + ref[:, 1].real,
            )
            rows.append(
                ConvergenceRow(
                    ensemble,
                    int(n),
                    None,
                    RatioFunctional.REAL,
                    res.statistic,
                    res.pvalue,
                )
            )
    return ConvergenceTable(
        ensemble,
        None if energy is None else float(energy),
        int(replicas),
        int(ref.shape[0]),
        tuple(rows),
    )
