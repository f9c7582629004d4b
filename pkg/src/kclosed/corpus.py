"""Test-function families and splittings of their Riesz transforms.

Every function is specified by Fourier coefficients on a fixed set of
integer frequencies (``|k| <= band``), so the same item sampled on N and 2N
points is the same trigonometric polynomial. The band is capped at N/3 to
keep the top third of the spectrum empty.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .grid import GridField, GridSpec
from .inputs import KInput
from .spectral import riesz

FAMILIES = ("trig", "bumps", "spikes")
SPLITS = ("threshold", "mask")
DEFAULT_BAND = 21
QUANTILES = (0.5, 0.95)
BOXES = (2, 6)
SIZE = (0.3, 0.6)
SPREAD = 0.25


def item_rng(seed: int, item: int) -> np.random.Generator:
    """Independent stream per (seed, item id)."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(item)]))


def _lattice(dim: int, band: int) -> np.ndarray:
    """Integer frequencies ``0 < |k| <= band`` as rows, in a fixed order."""
    r = np.arange(-band, band + 1)
    ks = np.stack(np.meshgrid(*([r] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    norm = np.sqrt(np.sum(ks**2, axis=1))
    return ks[(norm > 0) & (norm <= band)]


def _synthesize(spec: GridSpec, ks: np.ndarray, coef: np.ndarray) -> GridField:
    """Real part of ``sum_k coef_k exp(2 pi i k.x / L)`` on the grid, scaled to unit L^2 norm."""
    grid = np.zeros(spec.shape, complex)
    n = spec.points
    for k, c in zip(ks, coef):
        grid[tuple(k % n)] += c
    # hermitian part so the field is real
    flip = grid[tuple(np.ix_(*([(-np.arange(n)) % n] * spec.dim)))].conj()
    herm = 0.5 * (grid + flip)
    samples = np.fft.ifftn(herm).real * n**spec.dim
    # Parseval on the coefficient set: independent of N
    l2 = np.sqrt(spec.volume * np.sum(np.abs(herm) ** 2))
    return GridField(spec, samples / l2)


def _gauss_hat(ks: np.ndarray, sigma: float, center: np.ndarray, period: float) -> np.ndarray:
    """Fourier coefficients of a periodized Gaussian of width ``sigma`` at ``center``."""
    k2 = np.sum(ks**2, axis=1)
    phase = np.exp(-2j * np.pi * (ks @ center) / period)
    return np.exp(-2 * (np.pi * sigma / period) ** 2 * k2) * phase


def family_coefficients(family: str, dim: int, band: int, rng: np.random.Generator, period: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Frequencies and coefficients of one random member of ``family``."""
    ks = _lattice(dim, band)
    if family == "trig":
        low = min(band, 8)
        ks = ks[np.sqrt(np.sum(ks**2, axis=1)) <= low]
        modes = rng.choice(len(ks), size=min(len(ks), 6), replace=False)
        coef = np.zeros(len(ks), complex)
        coef[modes] = rng.normal(size=len(modes)) + 1j * rng.normal(size=len(modes))
        return ks, coef
    if family == "bumps":
        coef = np.zeros(len(ks), complex)
        for _ in range(2):
            sigma = period * rng.uniform(0.05, 0.1)
            a, b = rng.random(dim) * period, rng.random(dim) * period
            # equal masses: the zero mode cancels
            coef += _gauss_hat(ks, sigma, a, period) - _gauss_hat(ks, sigma * rng.uniform(0.7, 1.4), b, period)
        return ks, coef
    if family == "spikes":
        sigma = period * rng.uniform(0.02, 0.035)
        c = rng.random(dim) * period
        coef = _gauss_hat(ks, sigma, c, period) - _gauss_hat(ks, 3 * sigma, c, period)
        return ks, coef
    raise ValueError(f"unknown family {family!r}; valid: {', '.join(FAMILIES)}")


def family_field(family: str, spec: GridSpec, rng: np.random.Generator, band: int = DEFAULT_BAND) -> GridField:
    band = min(band, spec.points // 3)
    ks, coef = family_coefficients(family, spec.dim, band, rng, spec.period)
    return _synthesize(spec, ks, coef)


def split_threshold(rf: list[GridField], quantile: float, floor: float = 1e-2) -> list[GridField]:
    """``beta_i = clamp(R_i f, +-tau_i)``; returns alpha = remainder.

    ``tau_i`` is a quantile of ``|R_i f|`` over the cells where it exceeds
    ``floor * max|R_i f|``, so localized functions are not clamped to zero.
    """
    out = []
    for r in rf:
        a = np.abs(r.samples)
        tau = float(np.quantile(a[a >= floor * a.max()], quantile)) if a.max() > 0 else 0.0
        out.append(r - GridField(r.spec, np.clip(r.samples, -tau, tau)))
    return out


def random_boxes(spec: GridSpec, rng: np.random.Generator, count: int = 4, size=None, near=None, spread: float | None = None) -> np.ndarray:
    """Union of ``count`` periodic boxes given in physical coordinates.

    With ``near`` (a point), box centres are drawn within ``spread * L`` of it.
    """
    size = SIZE if size is None else size
    spread = SPREAD if spread is None else spread
    mask = np.zeros(spec.shape, bool)
    coords = [np.arange(spec.points) * spec.h] * spec.dim
    for _ in range(count):
        width = rng.uniform(*size, spec.dim) * spec.period
        if near is None:
            lo = rng.random(spec.dim) * spec.period
        else:
            lo = np.asarray(near) + rng.uniform(-spread, spread, spec.dim) * spec.period - width / 2
        inside = np.ones(spec.shape, bool)
        for ax in range(spec.dim):
            d = (coords[ax] - lo[ax]) % spec.period
            sh = [1] * spec.dim
            sh[ax] = -1
            inside &= (d < width[ax]).reshape(sh)
        mask |= inside
    return mask


def split_mask(rf: list[GridField], mask: np.ndarray) -> list[GridField]:
    """``beta_i = R_i f 1_E``; returns alpha = remainder."""
    return [GridField(r.spec, np.where(mask, 0.0, r.samples)) for r in rf]


@dataclass(frozen=True, eq=False)
class CorpusItem:
    id: int
    family: str
    split: str
    parameter: float
    kin: KInput

    @property
    def f(self) -> GridField:
        return self.kin.f

    def descriptor(self) -> str:
        return f"{self.split}:{self.parameter:.4f}"


def make_item(item: int, spec: GridSpec, seed: int, family: str, split: str, p1: float = 0.8, p2: float = 2.0, band: int = DEFAULT_BAND) -> CorpusItem:
    """One deterministic corpus item."""
    if split not in SPLITS:
        raise ValueError(f"unknown split {split!r}; valid: {', '.join(SPLITS)}")
    rng = item_rng(seed, item)
    f = family_field(family, spec, rng, band)
    rf = [riesz(f, i) for i in range(spec.dim)]
    if split == "threshold":
        q = float(rng.uniform(*QUANTILES))
        alpha = split_threshold(rf, q)
    else:
        q = float(rng.integers(*BOXES))
        peak = np.array(np.unravel_index(np.argmax(np.abs(f.samples)), spec.shape)) * spec.h
        alpha = split_mask(rf, random_boxes(spec, rng, int(q), near=peak))
    beta = [r - a for r, a in zip(rf, alpha)]
    return CorpusItem(item, family, split, q, KInput(f, tuple(alpha), tuple(beta), p1, p2))


def gen_corpus(spec: GridSpec, count: int = 50, seed: int = 42, families=FAMILIES, splits=SPLITS, p1: float = 0.8, p2: float = 2.0, band: int = DEFAULT_BAND) -> list[CorpusItem]:
    """``count`` items cycling through families, then splits."""
    for fam in families:
        if fam not in FAMILIES:
            raise ValueError(f"unknown family {fam!r}; valid: {', '.join(FAMILIES)}")
    out = []
    for i in range(count):
        fam = families[i % len(families)]
        spl = splits[(i // len(families)) % len(splits)]
        out.append(make_item(i, spec, seed, fam, spl, p1, p2, band))
    return out


def field_hash(f: GridField) -> str:
    return hashlib.sha256(np.ascontiguousarray(f.samples, dtype="<f8").tobytes()).hexdigest()
