"""Composite Simpson quadrature with panel doubling."""

from __future__ import annotations

import numpy as np
from scipy.integrate import simpson


class QuadratureDidNotConverge(RuntimeError):
    pass


def simpson_doubling(f, a: float, b: float, tol: float = 1e-9, start_panels: int = 256,
                     max_panels: int = 1 << 20):
    """Integrate ``f`` over ``[a, b]``.

    ``f`` takes a 1-D array of abscissae and returns an array whose last axis
    runs over them, so a batch of integrands is integrated in one call.  The
    panel count doubles until every integral in the batch moves by less than
    ``tol`` between successive levels.
    """
    panels = start_panels
    prev = None
    while panels <= max_panels:
        t = np.linspace(a, b, panels + 1)
        cur = simpson(np.asarray(f(t), dtype=float), x=t, axis=-1)
        if prev is not None:
            # non-finite integrals (invalid batch members) are excluded from the check
            diff = np.abs(cur - prev)
            diff = diff[np.isfinite(diff)]
            if diff.size == 0 or diff.max() < tol:
                return cur
        prev = cur
        panels *= 2
    raise QuadratureDidNotConverge(f"no convergence to {tol} with {max_panels} panels")


def simpson_doubling_batch(f, n: int, a: float, b: float, tol: float = 1e-9, start_panels: int = 256,
                           max_panels: int = 1 << 20) -> np.ndarray:
    """Per-member panel doubling for a batch of ``n`` integrands.

    ``f(t, idx)`` returns an ``(len(idx), len(t))`` array for the batch
    members ``idx``.  Only members that have not yet converged are
    re-evaluated at the next level, so one hard integrand does not drag the
    whole batch to a fine grid.  Members that never converge (or are not
    finite) come back as NaN.
    """
    out = np.full(n, np.nan)
    active = np.arange(n)
    prev = None
    panels = start_panels
    while active.size and panels <= max_panels:
        t = np.linspace(a, b, panels + 1)
        cur = simpson(np.asarray(f(t, active), dtype=float).reshape(active.size, -1), x=t, axis=-1)
        if prev is not None:
            diff = np.abs(cur - prev)
            done = (diff < tol) | ~np.isfinite(diff)
            out[active[done]] = np.where(np.isfinite(diff[done]), cur[done], np.nan)
            active, cur = active[~done], cur[~done]
        prev = cur
        panels *= 2
    return out


def circle_average(f, tol: float = 1e-9, start_panels: int = 256):
    """(1/2pi) * integral of ``f`` over one full period [0, 2pi]."""
    return simpson_doubling(f, 0.0, 2 * np.pi, tol=tol * 2 * np.pi, start_panels=start_panels) / (2 * np.pi)


def quarter_circle_average(f, tol: float = 1e-9, start_panels: int = 256):
    """Circle average of an integrand with the symmetries of sin(t)**2.

    Integrates on [0, pi/2] only and rescales by 4 / (2 pi).
    """
    return simpson_doubling(f, 0.0, np.pi / 2, tol=tol * np.pi / 2, start_panels=start_panels) * 2 / np.pi
