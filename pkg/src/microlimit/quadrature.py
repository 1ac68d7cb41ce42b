"""Panel Gauss-Legendre quadrature helpers.

All expectation/variance integrals in this package reduce to smooth
(or piecewise smooth) integrands on finite intervals, integrated with
fixed-order Gauss-Legendre rules on explicit panels.  Panel layout is
chosen by the caller to resolve the kernel's oscillation scale.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import InputError


@lru_cache(maxsize=32)
def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_nodes(a: float, b: float, max_panel: float, order: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on [a, b].

    The interval is split into equal panels no wider than ``max_panel``;
    each panel carries an ``order``-point rule.  Exact for polynomials
    of degree < 2*order on each panel.
    """
    if not (np.isfinite(a) and np.isfinite(b)) or b <= a:
        raise InputError(f"need finite a < b, got [{a}, {b}]")
    if max_panel <= 0:
        raise InputError("max_panel must be positive")
    npanel = max(1, int(np.ceil((b - a) / max_panel)))
    edges = np.linspace(a, b, npanel + 1)
    x0, w0 = _gl_rule(order)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def graded_nodes(a: float, b: float, grade_toward: str, first: float, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule on [a, b] with geometrically growing panels.

    The panel adjacent to the graded end has width ``first``; widths
    double away from that end until [a, b] is covered.  Used for
    integrands with a singularity just outside the graded end.
    """
    if b <= a:
        raise InputError(f"need a < b, got [{a}, {b}]")
    if grade_toward not in ("left", "right"):
        raise InputError("grade_toward must be 'left' or 'right'")
    span = b - a
    widths = []
    w = min(first, span)
    total = 0.0
    while total < span:
        w_eff = min(w, span - total)
        widths.append(w_eff)
        total += w_eff
        w *= 2.0
    widths = np.asarray(widths)
    if grade_toward == "left":
        edges = a + np.concatenate([[0.0], np.cumsum(widths)])
    else:
        edges = b - np.concatenate([[0.0], np.cumsum(widths)])[::-1]
    edges[0], edges[-1] = a, b
    x0, w0 = _gl_rule(order)
    half = np.diff(edges) / 2.0
    mid = (edges[:-1] + edges[1:]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights
