"""The data of a K-closedness problem: ``f`` and a splitting of its Riesz transforms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .grid import GridField, lp_quasinorm, magnitude
from .spectral import riesz


@dataclass(frozen=True, eq=False)
class KInput:
    """``f`` with ``R_i f = alpha[i] + beta[i]`` and exponents ``(n-1)/n < p1 < 1 < p2``.

    The tuple ``(f, R_1 f, ..., R_n f)`` is split as ``(f, alpha) + (0, beta)``;
    ``alpha_tilde`` and ``beta_tilde`` are the pointwise magnitudes of the two
    parts, and the scalar sizes are their L^p1 and L^p2 quasi-norms.
    """

    f: GridField
    alpha: tuple[GridField, ...]
    beta: tuple[GridField, ...]
    p1: float = 0.8
    p2: float = 2.0
    check: bool = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        if self.check:
            self.validate()

    @property
    def spec(self):
        return self.f.spec

    def validate(self):
        spec, n = self.f.spec, self.f.spec.dim
        if not (n - 1) / n < self.p1 < 1 < self.p2:
            raise ValueError(f"need (n-1)/n < p1 < 1 < p2, got p1={self.p1}, p2={self.p2}")
        if len(self.alpha) != n or len(self.beta) != n:
            raise ValueError(f"need {n} alpha and {n} beta components")
        for g in (*self.alpha, *self.beta):
            if g.spec != spec:
                raise ValueError("components live on a different grid than f")
        fnorm = lp_quasinorm(self.f, 2)
        if abs(self.f.mean()) > 1e-12 * max(fnorm, np.finfo(float).tiny):
            raise ValueError("f must have zero mean")
        for i in range(n):
            rf = riesz(self.f, i)
            err = np.abs(self.alpha[i].samples + self.beta[i].samples - rf.samples).max()
            if err > 1e-10 * max(lp_quasinorm(rf, 2), 1e-300):
                raise ValueError(f"alpha[{i}] + beta[{i}] differs from R_{i} f by {err:.3g}")

    @classmethod
    def from_alpha(cls, f: GridField, alpha, p1=0.8, p2=2.0) -> "KInput":
        """Complete a splitting by ``beta_i := R_i f - alpha_i``."""
        beta = [riesz(f, i) - a for i, a in enumerate(alpha)]
        return cls(f, tuple(alpha), tuple(beta), p1, p2)

    @cached_property
    def alpha_tilde(self) -> GridField:
        return magnitude([self.f, *self.alpha])

    @cached_property
    def beta_tilde(self) -> GridField:
        return magnitude(list(self.beta))

    @cached_property
    def alpha_norm(self) -> float:
        return lp_quasinorm(self.alpha_tilde, self.p1)

    @cached_property
    def beta_norm(self) -> float:
        return lp_quasinorm(self.beta_tilde, self.p2)

    def scaled(self, c: float) -> "KInput":
        return KInput(self.f * c, tuple(a * c for a in self.alpha), tuple(b * c for b in self.beta), self.p1, self.p2, False)
