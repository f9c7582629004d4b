"""Non-tangential (cone) and Hardy-Littlewood maximal functions on the torus.

Cones and averaging windows use the Chebyshev metric, so every window is
an axis-aligned box and the maxima separate into 1-D sliding-window passes.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .grid import GridField, HalfSpaceField, TLadder, lp_quasinorm
from .spectral import poisson_extend


@dataclass(frozen=True)
class ConeParams:
    """Cone ``{(y, t): |y - x|_inf <= aperture * t}``.

    A window half-width of N/2 cells or more already covers the whole torus,
    so large apertures simply saturate to the global maximum of a level.
    """

    aperture: float = 1.0

    def __post_init__(self):
        if not self.aperture >= 0:
            raise ValueError("aperture must be non-negative")

    def half_widths(self, ladder: TLadder, h: float) -> np.ndarray:
        """Window half-width in cells for each level."""
        return np.floor(self.aperture * ladder.levels / h * (1 + 1e-12)).astype(int)


def sliding_max_deque(values, half_width: int) -> list:
    """Periodic sliding-window maximum with a monotone deque.

    ``out[i] = max(values[i - w], ..., values[i + w])`` with indices mod len.
    Amortized O(1) per element. Reference implementation for
    :func:`window_max`.
    """
    n = len(values)
    if 2 * half_width + 1 >= n:
        return [max(values)] * n
    w = half_width
    # unroll the ring: positions -w .. n-1+w
    ext = [values[i % n] for i in range(-w, n + w)]
    out = []
    dq: deque[int] = deque()
    for j, v in enumerate(ext):
        while dq and ext[dq[-1]] <= v:
            dq.pop()
        dq.append(j)
        if dq[0] <= j - (2 * w + 1):
            dq.popleft()
        if j >= 2 * w:
            out.append(ext[dq[0]])
    return out


def window_max(a: np.ndarray, half_width: int, axes=None) -> np.ndarray:
    """Periodic box maximum of half-width ``half_width`` cells along ``axes``."""
    out = a
    axes = range(a.ndim) if axes is None else axes
    for ax in axes:
        n = a.shape[ax]
        if 2 * half_width + 1 >= n:
            out = np.broadcast_to(out.max(axis=ax, keepdims=True), out.shape)
        elif half_width > 0:
            out = ndimage.maximum_filter1d(out, 2 * half_width + 1, axis=ax, mode="wrap")
    return np.array(out)


def nontangential_max(u: HalfSpaceField, cone: ConeParams | None = None) -> GridField:
    """``Nf(x) = max_m max_{|y-x|_inf <= a t_m} |u(y, t_m)|``."""
    cone = ConeParams() if cone is None else cone
    spec = u.spec
    widths = cone.half_widths(u.ladder, spec.h)
    absu = np.abs(u.values)
    out = np.zeros(spec.shape)
    # levels sharing a window width are reduced first
    for w in np.unique(widths):
        level_max = absu[widths == w].max(axis=0)
        np.maximum(out, window_max(level_max, int(w)), out=out)
    return GridField(spec, out)


def dyadic_radii(points: int) -> list[int]:
    radii, r = [], 1
    while r <= points // 4:
        radii.append(r)
        r *= 2
    return radii


def box_mean(a: np.ndarray, half_width: int) -> np.ndarray:
    """Periodic average over the Chebyshev box of half-width ``half_width`` cells."""
    return ndimage.uniform_filter(a, size=2 * half_width + 1, mode="wrap")


def hl_max(f: GridField) -> GridField:
    """Dyadic Hardy-Littlewood maximal function of ``|f|``.

    Max over half-widths r in {1, 2, 4, ..., N/4} of box averages; within a
    factor 2^n of the all-radii version.
    """
    a = np.abs(f.samples)
    out = np.zeros_like(a)
    for r in dyadic_radii(f.spec.points):
        np.maximum(out, box_mean(a, r), out=out)
    return GridField(f.spec, out)


def hp_quasinorm(f: GridField, p: float, cone: ConeParams | None = None, ladder: TLadder | None = None) -> float:
    """``||N(P f)||_p``: the discrete maximal H^p quasi-norm."""
    if not p > 0:
        raise ValueError("exponent must be positive")
    ladder = TLadder.default(f.spec) if ladder is None else ladder
    return lp_quasinorm(nontangential_max(poisson_extend(f, ladder), cone), p)
