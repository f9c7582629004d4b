"""Periodic grids, sampled fields and the (quasi-)norms used throughout.

The continuum domain R^n is replaced by the torus [0, L)^n sampled on a
uniform N^n grid. Every quantity here is an exact Riemann sum over that
grid, so integrals of trigonometric polynomials of degree < N/2 are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [0, period)^dim with ``points`` cells per axis."""

    dim: int
    points: int
    period: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        n = int(self.points)
        if n < 16 or n & (n - 1):
            raise ValueError(f"points per axis must be a power of two >= 16, got {self.points}")
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError(f"period must be positive, got {self.period}")
        object.__setattr__(self, "points", n)
        object.__setattr__(self, "period", float(self.period))

    @property
    def h(self) -> float:
        return self.period / self.points

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def volume(self) -> float:
        return self.period**self.dim

    def coordinates(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays (cell origins, ``ij`` indexing)."""
        x = np.arange(self.points) * self.h
        if self.dim == 1:
            return [x]
        return [x[:, None], x[None, :]]

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.dim, self.points * factor, self.period)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class GridField:
    """Real samples of a function on a :class:`GridSpec`. Immutable."""

    spec: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=np.float64)
        if a.shape != self.spec.shape:
            if a.size != self.spec.points**self.spec.dim:
                raise ValueError(f"expected {self.spec.points ** self.spec.dim} samples, got {a.size}")
            a = a.reshape(self.spec.shape)
        if not np.all(np.isfinite(a)):
            raise ValueError("field contains non-finite samples")
        object.__setattr__(self, "samples", _readonly(a))

    @classmethod
    def zeros(cls, spec: GridSpec) -> "GridField":
        return cls(spec, np.zeros(spec.shape))

    @classmethod
    def constant(cls, spec: GridSpec, value: float) -> "GridField":
        return cls(spec, np.full(spec.shape, float(value)))

    @classmethod
    def from_function(cls, spec: GridSpec, func) -> "GridField":
        return cls(spec, np.broadcast_to(func(*spec.coordinates()), spec.shape))

    def _check(self, other: "GridField"):
        if other.spec != self.spec:
            raise ValueError("fields live on different grids")

    def __add__(self, other: "GridField") -> "GridField":
        self._check(other)
        return GridField(self.spec, self.samples + other.samples)

    def __sub__(self, other: "GridField") -> "GridField":
        self._check(other)
        return GridField(self.spec, self.samples - other.samples)

    def __neg__(self) -> "GridField":
        return GridField(self.spec, -self.samples)

    def __mul__(self, c: float) -> "GridField":
        return GridField(self.spec, self.samples * float(c))

    __rmul__ = __mul__

    def abs(self) -> "GridField":
        return GridField(self.spec, np.abs(self.samples))

    def mean(self) -> float:
        return float(self.samples.mean())


@dataclass(frozen=True)
class TLadder:
    """Geometric ladder of heights ``t_m = t_min * ratio**m`` with midpoint weights.

    The weights are those of the midpoint rule in ``log t``:
    ``weight_m = t_m * log(ratio)``. For integrands that are analytic in
    ``log t`` and decay at both ends this converges geometrically in the
    step, which is what makes a 48-level ladder enough for the reproducing
    formula.
    """

    t_min: float
    ratio: float
    count: int

    def __post_init__(self):
        if not self.t_min > 0:
            raise ValueError("t_min must be positive")
        if not self.ratio > 1:
            raise ValueError("ratio must exceed 1")
        if self.count < 3:
            raise ValueError("ladder needs at least 3 levels")
        w = self.weights
        # covered interval of the log-midpoint cells
        span = self.t_min * (self.ratio**self.count - 1) / math.sqrt(self.ratio)
        if abs(w.sum() / span - 1) > 0.01:
            raise ValueError("ladder too coarse: weights do not cover the ladder span within 1%")

    @classmethod
    def geometric(cls, t_min: float, t_max: float, count: int) -> "TLadder":
        if not t_max > t_min:
            raise ValueError("t_max must exceed t_min")
        return cls(float(t_min), float((t_max / t_min) ** (1.0 / (count - 1))), int(count))

    @classmethod
    def default(cls, spec: GridSpec, count: int = 48) -> "TLadder":
        """Ladder from h/32 to 4L: wide enough to reproduce every mode below N/3."""
        return cls.geometric(spec.h / 32, 4 * spec.period, count)

    @property
    def levels(self) -> np.ndarray:
        return self.t_min * self.ratio ** np.arange(self.count)

    @property
    def weights(self) -> np.ndarray:
        return self.levels * math.log(self.ratio)

    @property
    def t_max(self) -> float:
        return float(self.levels[-1])

    def refined(self) -> "TLadder":
        """Same endpoints, ratio -> sqrt(ratio), count -> 2*count - 1."""
        return TLadder(self.t_min, math.sqrt(self.ratio), 2 * self.count - 1)

    def top_index(self, height: float) -> int:
        """Number of levels with ``t_m <= height`` (tolerant to rounding)."""
        return int(np.searchsorted(self.levels, height * (1 + 1e-12), side="right"))


@dataclass(frozen=True, eq=False)
class HalfSpaceField:
    """Samples ``u(y, t_m)`` on grid x ladder; ``values[m]`` is level ``m``."""

    spec: GridSpec
    ladder: TLadder
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.values, dtype=np.float64)
        if a.shape != (self.ladder.count, *self.spec.shape):
            raise ValueError(f"expected shape {(self.ladder.count, *self.spec.shape)}, got {a.shape}")
        object.__setattr__(self, "values", _readonly(a))

    def level(self, m: int) -> GridField:
        return GridField(self.spec, self.values[m])


def integrate(f: GridField) -> float:
    """Riemann sum h^n * sum(samples)."""
    if not np.all(np.isfinite(f.samples)):
        raise ValueError("cannot integrate non-finite samples")
    return float(f.spec.cell_volume * f.samples.sum())


def lp_quasinorm(f: GridField, p: float) -> float:
    """(h^n sum |f|^p)^(1/p); a quasi-norm for p < 1."""
    if not p > 0:
        raise ValueError(f"exponent must be positive, got {p}")
    a = np.abs(f.samples)
    m = a.max()
    if m == 0:
        return 0.0
    # scale out the maximum so that small p does not underflow
    return float(m * (f.spec.cell_volume * np.sum((a / m) ** p)) ** (1.0 / p))


def magnitude(fields: Sequence[GridField]) -> GridField:
    """Pointwise Euclidean magnitude of a tuple of fields."""
    if not fields:
        raise ValueError("empty field tuple")
    spec = fields[0].spec
    for g in fields[1:]:
        if g.spec != spec:
            raise ValueError("fields live on different grids")
    return GridField(spec, np.sqrt(sum(g.samples**2 for g in fields)))


def tuple_norm(fields: Sequence[GridField], p: float) -> float:
    """L^p quasi-norm of the pointwise Euclidean magnitude of ``fields``."""
    return lp_quasinorm(magnitude(fields), p)


def measure(mask: np.ndarray | GridField, spec: GridSpec | None = None) -> float:
    """Lebesgue measure of a grid set given as a boolean array."""
    if isinstance(mask, GridField):
        spec, mask = mask.spec, mask.samples != 0
    if spec is None:
        raise ValueError("a GridSpec is required for a raw mask")
    return float(spec.cell_volume * np.count_nonzero(mask))
