"""Microscopic eigenvalue statistics of compact-group and GUE ensembles.

Determinantal kernels with quadrature count oracles, Haar/GUE spectrum
samplers, characteristic-polynomial ratio products, sine-process
reference sampling, and Kolmogorov-Smirnov convergence diagnostics.
"""

__version__ = "0.1.0"

from .errors import DegenerateSampleError, InputError
from .kernels import (
    HermiteEvalRow,
    KernelBoundReport,
    KernelFamily,
    KernelSpec,
    dirichlet_envelope,
    dirichlet_s,
    gue_quadrature_window,
    hermite_psi,
    kernel_eval,
    semicircle_density,
    stieltjes_pv,
    verify_kernel_bounds,
)
from .seeds import derive_seed

__all__ = [
    "DegenerateSampleError",
    "InputError",
    "HermiteEvalRow",
    "KernelBoundReport",
    "KernelFamily",
    "KernelSpec",
    "dirichlet_envelope",
    "dirichlet_s",
    "gue_quadrature_window",
    "hermite_psi",
    "kernel_eval",
    "semicircle_density",
    "stieltjes_pv",
    "verify_kernel_bounds",
    "derive_seed",
    "__version__",
]
