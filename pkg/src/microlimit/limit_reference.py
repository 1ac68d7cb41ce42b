"""Sine-process window sampling and limiting ratio-function references.

The window operator is discretized on Gauss-Legendre panels, split into
Bernoulli-selected projection modes, and sampled with the sequential
determinantal scheme.  Positions stay continuous: cells come from a
piecewise-linear density proposal on a fine grid, and mode features at
accepted positions are evaluated exactly through the quadrature rule.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

from .charpoly import truncated_product, xi_grid
from .ensembles import Ensemble, PointConfig, sample_spectrum
from .errors import DegenerateSampleError, InputError
from .kernels import KernelFamily, KernelSpec, kernel_matrix
from .quadrature import panel_nodes
from .seeds import derive_seed, rng_from

_QUAD_PER_UNIT = 8
_FINE_PER_UNIT = 40
_EIG_DROP = 1e-8
_MAX_RESAMPLE = 5


class SineWindowSampler:
    """Draws the sine point process restricted to [-B, B] at unit density."""

    def __init__(self, windowradius: float):
        b = float(windowradius)
        if not 1.0 <= b <= 64.0:
            raise InputError("window radius must lie in [1, 64]")
        self.windowradius = b
        spec = KernelSpec(KernelFamily.SINE)
        x, w = panel_nodes(-b, b, 1.0, order=_QUAD_PER_UNIT)
        root = np.sqrt(w)
        sym = root[:, None] * kernel_matrix(spec, x, x) * root[None, :]
        sym = 0.5 * (sym + sym.T)
        lam, vec = np.linalg.eigh(sym)
        if lam.min() < -1e-9 or lam.max() > 1.0 + 1e-9:
            raise InputError("window operator discretization left [0, 1]")
        lam = np.clip(lam, 0.0, 1.0)
        sel = np.nonzero(lam > _EIG_DROP)[0][::-1]
        self.eigenvalues = lam[sel]
        # phi_k(x_i) = vec[i, k] / sqrt(w_i); folding the weights and the
        # eigenvalue into one matrix turns any kernel row K(x, nodes)
        # into the exact feature vector at x
        phi = vec[:, sel] / root[:, None]
        self._spec = spec
        self._quadnodes = x
        self._nystrom = (w[:, None] * phi) / self.eigenvalues[None, :]
        count = int(round(2.0 * b * _FINE_PER_UNIT)) + 1
        self._fine = np.linspace(-b, b, count)
        self._step = self._fine[1] - self._fine[0]
        self._features0 = kernel_matrix(spec, self._fine, x) @ self._nystrom

    def _feature_at(self, x: float, active: np.ndarray) -> np.ndarray:
        row = kernel_matrix(self._spec, np.array([x]), self._quadnodes)[0]
        return row @ self._nystrom[:, active]

    def sample(self, seed: int) -> PointConfig:
        """One configuration; deterministic given the seed."""
        rng = rng_from(seed)
        active = rng.uniform(size=self.eigenvalues.size) < self.eigenvalues
        rank = int(active.sum())
        if rank == 0:
            return PointConfig(np.empty(0), 0.0, 1.0, self.windowradius, False)
        feats = self._features0[:, active].copy()
        used = np.empty((rank, rank))
        points = np.empty(rank)
        for t in range(rank):
            dens = np.clip(np.einsum("ij,ij->i", feats, feats), 0.0, None)
            cellmass = 0.5 * (dens[:-1] + dens[1:])
            cum = np.cumsum(cellmass)
            if cum[-1] <= 0.0:
                raise DegenerateSampleError("sequential density vanished early")
            for _ in range(1000):
                idx = int(
                    np.searchsorted(cum, rng.uniform() * cum[-1], side="right")
                )
                idx = min(idx, cellmass.size - 1)
                d0, d1 = dens[idx], dens[idx + 1]
                if d0 + d1 <= 0.0:
                    continue
                v = rng.uniform()
                if abs(d1 - d0) <= 1e-12 * (d0 + d1):
                    frac = v
                else:
                    # inverse CDF of the linear density d0 -> d1 on the cell
                    frac = (np.sqrt(d0 * d0 + v * (d1 * d1 - d0 * d0)) - d0) / (
                        d1 - d0
                    )
                xnew = self._fine[idx] + frac * self._step
                f = self._feature_at(xnew, active)
                if t:
                    f = f - used[:t].T @ (used[:t] @ f)
                norm2 = float(f @ f)
                if norm2 > 1e-12:
                    break
            else:
                raise DegenerateSampleError("sequential sampler starved")
            used[t] = f / np.sqrt(norm2)
            points[t] = xnew
            feats -= np.outer(feats @ used[t], used[t])
        points.sort()
        degenerate = bool(points.size >= 2 and np.any(np.diff(points) < 1e-12))
        return PointConfig(points, 0.0, 1.0, self.windowradius, degenerate)


@lru_cache(maxsize=8)
def sine_sampler(windowradius: float) -> SineWindowSampler:
    """Cached sampler; construction costs one dense eigh per window."""
    return SineWindowSampler(float(windowradius))


def sample_sine_process(windowradius: float, seed: int) -> PointConfig:
    """One sine-process draw on [-windowradius, windowradius]."""
    return sine_sampler(float(windowradius)).sample(seed)


def xi_infinity_draw(sgrid, windowradius: float, seed: int) -> np.ndarray:
    """One draw of the limiting ratio function on a grid of shifts.

    The product is truncated one unit inside the window, keeping the
    pairing of far zeros away from the hard edge.  The window must cover
    4 * max|s|; degenerate draws are replaced, at most 5 times.
    """
    s = np.atleast_1d(np.asarray(sgrid, dtype=complex))
    b = float(windowradius)
    if b < 2.0:
        raise InputError("ratio draws need a window radius of at least 2")
    if s.size and b < 4.0 * float(np.max(np.abs(s))):
        raise InputError("window radius must cover four times the largest |s|")
    for attempt in range(_MAX_RESAMPLE + 1):
        draw_seed = seed if attempt == 0 else derive_seed(seed, attempt)
        config = sample_sine_process(b, draw_seed)
        if config.degenerate:
            continue
        try:
            return np.array(
                [truncated_product(config, si, cutoff=b - 1.0) for si in s]
            )
        except DegenerateSampleError:
            continue
    raise DegenerateSampleError(
        f"window draws stayed degenerate after {_MAX_RESAMPLE} replacements"
    )


def xi_infinity_batch(
    sgrid, windowradius: float, replicas: int, seed: int = 0, workers: int | None = None
) -> np.ndarray:
    """Stack xi_infinity_draw over derived replica seeds, (replicas, grid)."""
    s = np.atleast_1d(np.asarray(sgrid, dtype=complex))
    if replicas < 1:
        raise InputError("need at least one replica")

    def _one(r: int) -> np.ndarray:
        return xi_infinity_draw(s, windowradius, derive_seed(seed, r))

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, range(replicas)))
    else:
        rows = [_one(r) for r in range(replicas)]
    return np.stack(rows)


def cue_reference_batch(
    n: int, sgrid, replicas: int, seed: int = 0, workers: int | None = None
) -> np.ndarray:
    """Finite-n unitary draws of the same ratio, (replicas, grid).

    The finite-size gap of the ratio law decays in n; sizes below 64 sit
    above the resolution of the two-sample tests this feeds.
    """
    if n < 64:
        raise InputError("reference ensembles start at n = 64")
    s = np.atleast_1d(np.asarray(sgrid, dtype=complex))
    if replicas < 1:
        raise InputError("need at least one replica")

    def _one(r: int) -> np.ndarray:
        for attempt in range(_MAX_RESAMPLE + 1):
            sd = derive_seed(seed, r) if attempt == 0 else derive_seed(seed, r, attempt)
            try:
                return xi_grid(sample_spectrum(Ensemble.CUE, n, sd), s)
            except DegenerateSampleError:
                continue
        raise DegenerateSampleError(
            f"unitary draws stayed degenerate after {_MAX_RESAMPLE} replacements"
        )

    if workers is not None and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_one, range(replicas)))
    else:
        rows = [_one(r) for r in range(replicas)]
    return np.stack(rows)
