"""Fourier multipliers on the torus.

Conventions: ``fhat(xi) = sum_x f(x) exp(-i xi.x)`` over the grid with
``xi = 2 pi k / L`` and ``k`` in ``fftfreq`` order. A multiplier ``m(xi)``
acts by ``ifftn(m * fftn(f))``. Odd multipliers (Riesz transforms, first
derivatives in y) are zeroed on the Nyquist hyperplanes so that real input
maps to real output.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, special
from scipy.interpolate import CubicSpline

from .grid import GridField, GridSpec, HalfSpaceField, TLadder


@lru_cache(maxsize=16)
def wavenumbers(spec: GridSpec) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Per-axis angular wavenumbers (broadcastable) and the Euclidean ``|xi|`` array."""
    k = np.fft.fftfreq(spec.points, d=1.0 / spec.points)
    xi1 = 2 * np.pi * k / spec.period
    if spec.dim == 1:
        comps = (xi1,)
    else:
        comps = (xi1[:, None], xi1[None, :])
    norm = np.sqrt(sum(np.broadcast_to(c, spec.shape) ** 2 for c in comps))
    for a in (*comps, norm):
        a.setflags(write=False)
    return comps, norm


def _odd_component(spec: GridSpec, axis: int) -> np.ndarray:
    """``xi_axis`` broadcast to the grid, zero on its Nyquist hyperplane."""
    comps, _ = wavenumbers(spec)
    xi = np.broadcast_to(comps[axis], spec.shape).copy()
    k = np.fft.fftfreq(spec.points, d=1.0 / spec.points)
    nyq = np.broadcast_to((k == -spec.points // 2).reshape(comps[axis].shape), spec.shape)
    xi[nyq] = 0.0
    return xi


def _check_axis(spec: GridSpec, axis: int):
    if not 0 <= axis < spec.dim:
        raise ValueError(f"axis {axis} out of range for dim {spec.dim}")


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Complex weight per lattice frequency, stored in ``fftn`` order (zero mode included)."""

    spec: GridSpec
    weights: np.ndarray

    def apply(self, f: GridField) -> GridField:
        if f.spec != self.spec:
            raise ValueError("multiplier and field live on different grids")
        out = np.fft.ifftn(self.weights * np.fft.fftn(f.samples))
        return GridField(self.spec, out.real)

    @classmethod
    def riesz(cls, spec: GridSpec, axis: int) -> "MultiplierTable":
        _check_axis(spec, axis)
        _, norm = wavenumbers(spec)
        safe = np.where(norm > 0, norm, 1.0)
        return cls(spec, np.where(norm > 0, -1j * _odd_component(spec, axis) / safe, 0.0))

    @classmethod
    def poisson(cls, spec: GridSpec, t: float) -> "MultiplierTable":
        _, norm = wavenumbers(spec)
        return cls(spec, np.exp(-t * norm).astype(complex))

    @classmethod
    def laplacian(cls, spec: GridSpec) -> "MultiplierTable":
        _, norm = wavenumbers(spec)
        return cls(spec, (-(norm**2)).astype(complex))


def riesz(f: GridField, axis: int) -> GridField:
    """Riesz transform along ``axis`` (0-based), symbol ``-i xi_axis/|xi|``."""
    return MultiplierTable.riesz(f.spec, axis).apply(f)


def _check_ladder(ladder: TLadder):
    if not isinstance(ladder, TLadder):
        raise TypeError("ladder must be a TLadder")


def _extend(f: GridField, ladder: TLadder, symbol) -> HalfSpaceField:
    _check_ladder(ladder)
    fhat = np.fft.fftn(f.samples)
    t = ladder.levels.reshape((-1,) + (1,) * f.spec.dim)
    axes = tuple(range(1, f.spec.dim + 1))
    vals = np.fft.ifftn(symbol(t) * fhat, axes=axes).real
    return HalfSpaceField(f.spec, ladder, vals)


def _warn_mean(f: GridField):
    scale = float(np.sqrt(np.mean(f.samples**2)))
    if scale > 0 and abs(f.mean()) > 1e-12 * scale:
        warnings.warn("Poisson extension of a field with nonzero mean", RuntimeWarning, stacklevel=3)


def poisson_extend(f: GridField, ladder: TLadder) -> HalfSpaceField:
    """``u(., t_m) = f * P_{t_m}`` on every ladder level."""
    _warn_mean(f)
    _, norm = wavenumbers(f.spec)
    return _extend(f, ladder, lambda t: np.exp(-t * norm))


def dt_poisson(f: GridField, ladder: TLadder) -> HalfSpaceField:
    """``d/dt`` of the Poisson extension, symbol ``-|xi| exp(-t|xi|)``."""
    _warn_mean(f)
    _, norm = wavenumbers(f.spec)
    return _extend(f, ladder, lambda t: -norm * np.exp(-t * norm))


def grad_poisson(f: GridField, ladder: TLadder) -> list[HalfSpaceField]:
    """``(du/dt, du/dy_1, ..., du/dy_n)`` of the Poisson extension."""
    _warn_mean(f)
    _, norm = wavenumbers(f.spec)
    out = [_extend(f, ladder, lambda t: -norm * np.exp(-t * norm))]
    for axis in range(f.spec.dim):
        xi = _odd_component(f.spec, axis)
        out.append(_extend(f, ladder, lambda t, xi=xi: 1j * xi * np.exp(-t * norm)))
    return out


def conjugate_system(f: GridField, ladder: TLadder) -> list[HalfSpaceField]:
    """``(u, u_1, ..., u_n)`` with ``u_i`` the Poisson extension of ``R_i f``."""
    return [poisson_extend(f, ladder)] + [poisson_extend(riesz(f, i), ladder) for i in range(f.spec.dim)]


def poisson_eval(f: GridField, points: np.ndarray, heights: np.ndarray, derivative: bool = False) -> np.ndarray:
    """Evaluate ``u`` (or ``du/dt``) at arbitrary points of the half-space.

    Direct trigonometric sum over the nonzero Fourier modes of ``f``; exact
    for the trigonometric interpolant. ``points`` has shape ``(P, n)``.
    """
    spec = f.spec
    comps, norm = wavenumbers(spec)
    fhat = np.fft.fftn(f.samples) / spec.points**spec.dim
    keep = np.abs(fhat) > 1e-15 * max(np.abs(fhat).max(), 1e-300)
    coef = fhat[keep]
    xis = np.stack([np.broadcast_to(c, spec.shape)[keep] for c in comps], axis=1)
    r = norm[keep]
    points = np.atleast_2d(np.asarray(points, dtype=float)).reshape(-1, spec.dim)
    heights = np.asarray(heights, dtype=float).reshape(-1)
    out = np.empty(len(points))
    for lo in range(0, len(points), 512):
        sl = slice(lo, lo + 512)
        decay = np.exp(-heights[sl, None] * r[None, :])
        if derivative:
            decay = decay * -r[None, :]
        phase = np.exp(1j * points[sl] @ xis.T)
        out[sl] = ((phase * decay) @ coef).real
    return out


# ---------------------------------------------------------------------------
# Calderon kernel


def bump(r: np.ndarray) -> np.ndarray:
    """Radial bump ``exp(-1/(1 - 4 r^2))`` supported in ``|x| < 1/2``."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 0.5
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * r[inside] ** 2))
    return out


def bump_transform(s: np.ndarray, dim: int, nodes: int = 2000) -> np.ndarray:
    """Radial Fourier transform of :func:`bump` in dimension ``dim``."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    r = 0.25 * (x + 1.0)
    w = 0.25 * w * bump(r)
    s = np.asarray(s, dtype=float)
    flat = s.reshape(-1)
    out = np.empty(flat.shape)
    for lo in range(0, flat.size, 1024):
        arg = flat[lo : lo + 1024, None] * r[None, :]
        if dim == 1:
            out[lo : lo + 1024] = np.cos(arg) @ (2.0 * w)
        else:
            out[lo : lo + 1024] = special.j0(arg) @ (2.0 * np.pi * w * r)
    return out.reshape(s.shape)


def _table_nodes() -> np.ndarray:
    fine = np.linspace(0.0, 64.0, 4097)
    coarse = np.linspace(64.0, 2048.0, 7937)[1:]
    return np.concatenate([fine, coarse])


@dataclass(frozen=True, eq=False)
class CalderonKernel:
    """Radial profile of the normalized mean-zero kernel ``psi``.

    ``psi = scale * (phi - 2^n phi(2 .))`` with ``phi`` the bump of radius 1/2,
    so ``psi`` is supported in ``|x| < 1/2`` and ``psihat(0) = 0``. ``scale``
    makes ``-int_0^inf exp(-s) psihat(s) ds = 1``.
    """

    dim: int
    nodes: np.ndarray
    values: np.ndarray
    scale: float
    support_radius: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicSpline(self.nodes, self.values))

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    def __call__(self, s) -> np.ndarray:
        s = np.abs(np.asarray(s, dtype=float))
        out = np.zeros_like(s)
        inside = s <= self.r_max
        out[inside] = self._spline(s[inside])
        out[s == 0] = 0.0
        return out

    def calderon_integral(self) -> float:
        """``-int_0^inf exp(-s) psihat(s) ds``, by adaptive quadrature."""
        return -_laplace_integral(self._spline)


def _laplace_integral(profile) -> float:
    pts = [0.5, 1, 2, 4, 8, 16, 32]
    val, _ = integrate.quad(lambda s: math.exp(-s) * float(profile(s)), 0.0, 64.0, points=pts, limit=400, epsabs=1e-15, epsrel=1e-13)
    return val


@lru_cache(maxsize=4)
def build_psi(dim: int) -> CalderonKernel:
    """Normalized Calderon kernel for dimension ``dim`` (cached)."""
    if isinstance(dim, GridSpec):
        dim = dim.dim
    nodes = _table_nodes()
    raw = bump_transform(nodes, dim) - bump_transform(nodes / 2, dim)
    raw[0] = 0.0
    integral = _laplace_integral(CubicSpline(nodes, raw))
    if abs(integral) < 1e-6:
        raise ValueError("degenerate profile")
    scale = -1.0 / integral
    return CalderonKernel(dim, nodes, raw * scale, scale)


@lru_cache(maxsize=8)
def kernel_symbols(spec: GridSpec, ladder: TLadder) -> np.ndarray:
    """``psihat(t_m |xi|)`` for every ladder level, shape ``(M, *grid)``."""
    _, norm = wavenumbers(spec)
    kern = build_psi(spec.dim)
    out = np.stack([kern(t * norm) for t in ladder.levels])
    out.setflags(write=False)
    return out


@lru_cache(maxsize=8)
def kernel_stencils(spec: GridSpec, ladder: TLadder) -> np.ndarray:
    """Grid kernels of the multipliers ``psihat(t_m xi)`` (``ifftn`` of the symbols)."""
    axes = tuple(range(1, spec.dim + 1))
    out = np.fft.ifftn(kernel_symbols(spec, ladder), axes=axes).real
    out.setflags(write=False)
    return out


def _dense_region(region, ladder: TLadder, spec: GridSpec) -> np.ndarray:
    if hasattr(region, "ladder") and region.ladder != ladder:
        raise ValueError("region and field use different ladders")
    mask = region.dense() if hasattr(region, "dense") else np.asarray(region, dtype=bool)
    if mask.shape != (ladder.count, *spec.shape):
        raise ValueError(f"region shape {mask.shape} does not match grid x ladder")
    return mask


def masked_synthesis(dtu: HalfSpaceField, region, kernel: CalderonKernel | None = None) -> GridField:
    """``sum_m weight_m * ((1_region * du/dt)(., t_m) conv psi_{t_m})``.

    ``region`` is a boolean ``(M, *grid)`` array or any object with a
    ``dense()`` method returning one (e.g. a tent set).
    """
    spec, ladder = dtu.spec, dtu.ladder
    mask = _dense_region(region, ladder, spec)
    if kernel is not None and kernel.dim != spec.dim:
        raise ValueError("kernel dimension mismatch")
    active = np.flatnonzero(mask.reshape(ladder.count, -1).any(axis=1))
    if active.size == 0:
        return GridField.zeros(spec)
    axes = tuple(range(1, spec.dim + 1))
    data = np.where(mask[active], dtu.values[active], 0.0)
    spectra = np.fft.fftn(data, axes=axes)
    w = ladder.weights[active].reshape((-1,) + (1,) * spec.dim)
    acc = np.sum(w * kernel_symbols(spec, ladder)[active] * spectra, axis=0)
    return GridField(spec, np.fft.ifftn(acc).real)


def reproduction_weights(spec: GridSpec, ladder: TLadder) -> np.ndarray:
    """Per-frequency weight ``sum_m w_m (-|xi|) exp(-t_m|xi|) psihat(t_m xi)``; ideally 1."""
    _, norm = wavenumbers(spec)
    t = ladder.levels.reshape((-1,) + (1,) * spec.dim)
    w = ladder.weights.reshape(t.shape)
    return np.sum(w * -norm * np.exp(-t * norm) * kernel_symbols(spec, ladder), axis=0)


def band_mask(spec: GridSpec, band: float | None = None) -> np.ndarray:
    """Nonzero frequencies with ``|k| <= band`` (default ``N/3``), as a boolean grid."""
    _, norm = wavenumbers(spec)
    kk = norm * spec.period / (2 * np.pi)
    band = spec.points / 3 if band is None else band
    return (kk > 0) & (kk <= band + 1e-9)


def reproduction_defect(spec: GridSpec, ladder: TLadder, occupied: np.ndarray | None = None) -> float:
    """``max |1 - reproduction weight|`` over occupied frequencies."""
    occ = band_mask(spec) if occupied is None else occupied
    return float(np.max(np.abs(1.0 - reproduction_weights(spec, ladder)[occ])))


def square_function_constant(spec: GridSpec, ladder: TLadder) -> float:
    """``sup_xi sum_m w_m |psihat(t_m xi)|^2 / t_m`` (discrete Littlewood-Paley bound)."""
    t = ladder.levels.reshape((-1,) + (1,) * spec.dim)
    w = ladder.weights.reshape(t.shape)
    return float(np.max(np.sum(w * kernel_symbols(spec, ladder) ** 2 / t, axis=0)))
