"""The w/v split and the atomic decomposition of w.

Pipeline: sizes alpha, beta -> threshold lambda -> Poisson extension u and
du/dt -> cone maximal function Nf -> level sets A^k = {Nf > 2^k lambda}
with Whitney covers -> tents -> w from the tent region, v = f - w.

``w`` is realized as the sum of its localized atoms: each tent piece is
synthesized, restricted to the dilated cube 2Q and re-centred to zero
mean. What the restriction removes (kernel tails of the grid realization
of psi_t) is reported as ``localization`` and lands in v together with the
reproduction defect of the truncated t-ladder.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .grid import GridField, GridSpec, TLadder, lp_quasinorm, measure
from .inputs import KInput
from .io import write_field
from .maximal import ConeParams, nontangential_max
from .spectral import dt_poisson, kernel_stencils, kernel_symbols, masked_synthesis, poisson_extend
from .whitney import DyadicCube, TentPiece, TentRegions, WhitneyCover, covers_to_csv, tent_regions, whitney

log = logging.getLogger(__name__)

MAX_LEVELS = 64


class DegenerateSplit(ValueError):
    """alpha or beta vanishes; no threshold can be formed."""


def choose_lambda(alpha: float, beta: float, p1: float, p2: float) -> float:
    """``(beta^p2 / alpha^p1) ** (1 / (p2 - p1))``."""
    if not p2 > p1:
        raise ValueError("need p2 > p1")
    if alpha <= 0 or beta <= 0:
        raise DegenerateSplit("degenerate split")
    # log form keeps huge/small ratios finite
    return math.exp((p2 * math.log(beta) - p1 * math.log(alpha)) / (p2 - p1))


@dataclass(frozen=True, eq=False)
class LevelSets:
    lam: float
    nf: GridField
    masks: list[np.ndarray]
    covers: list[WhitneyCover]

    @property
    def top(self) -> int:
        """K: index of the last nonempty level set (-1 when A is empty)."""
        return len(self.masks) - 1

    def measures(self) -> list[float]:
        return [measure(m, self.nf.spec) for m in self.masks]


def level_sets(nf: GridField, lam: float) -> LevelSets:
    """``A^k = {Nf > 2^k lam}`` for k = 0..K with Whitney covers."""
    if not lam > 0:
        raise ValueError("threshold must be positive")
    masks = []
    for k in range(MAX_LEVELS + 1):
        m = nf.samples > lam * 2.0**k
        if not m.any():
            break
        masks.append(m)
    else:
        raise ValueError(f"more than {MAX_LEVELS} level sets")
    if masks and masks[0].all():
        raise ValueError("set A must be proper")
    return LevelSets(lam, nf, masks, [whitney(m) for m in masks])


@dataclass(frozen=True, eq=False)
class Atom:
    """Piece ``g_{j,k}`` (stored on its dilated cube 2Q) and its coefficient."""

    k: int
    j: int
    cube: DyadicCube
    spec: GridSpec
    local: np.ndarray = field(repr=False)
    coefficient: float

    @property
    def indices(self) -> tuple[np.ndarray, ...]:
        return self.cube.dilated_indices(self.spec.points)

    @property
    def g(self) -> GridField:
        out = np.zeros(self.spec.shape)
        out[np.ix_(*self.indices)] = self.local
        return GridField(self.spec, out)

    @property
    def normalized(self) -> GridField:
        return self.g * (1.0 / self.coefficient)

    def l2(self) -> float:
        return float(np.sqrt(self.spec.cell_volume * np.sum(self.local**2)))

    def support_measure(self) -> float:
        return self.cube.dilated_measure(self.spec)


def atom_violations(atom: Atom, p1: float) -> list[str]:
    """Check support in 2Q, zero mean and the L^2 size condition on the normalized atom."""
    out = []
    a = atom.normalized
    inside = np.zeros(atom.spec.shape, bool)
    inside[np.ix_(*atom.indices)] = True
    if np.any(a.samples[~inside] != 0):
        out.append("support leaves 2Q")
    l2 = lp_quasinorm(a, 2)
    if abs(a.samples.sum() * atom.spec.cell_volume) > 1e-8 * l2:
        out.append("mean not zero")
    bound = atom.support_measure() ** (0.5 - 1.0 / p1)
    if l2 > bound * (1 + 1e-10):
        out.append(f"L2 size {l2:.6g} exceeds {bound:.6g}")
    return out


def _offsets(lo: int, size: int) -> np.ndarray:
    """Signed offsets in [lo, lo + size) laid out in circular order mod size."""
    b = np.arange(size)
    return lo + (b - lo) % size


def _piece_on_dilated_cube(dtu_values, piece: TentPiece, spec: GridSpec, ladder: TLadder, cache: dict | None = None) -> np.ndarray:
    """Tent-piece synthesis restricted to 2Q (exact restriction of the global one)."""
    q = piece.cube
    region = piece.region.local
    top = region.shape[0]
    s, pad, s2 = q.side, q.dilation_pad, q.dilated_side()
    n, dim = spec.points, spec.dim
    data = np.where(region, dtu_values[(slice(0, top),) + q.slices()], 0.0)
    w = ladder.weights[:top].reshape((-1,) + (1,) * dim)
    axes = tuple(range(1, dim + 1))
    size = 1 << (s2 + s - 2).bit_length()
    if size >= n:
        full = np.zeros((top, *spec.shape))
        full[(slice(None),) + q.slices()] = data
        spectra = np.fft.fftn(full, axes=axes)
        acc = np.sum(w * kernel_symbols(spec, ladder)[:top] * spectra, axis=0)
        out = np.fft.ifftn(acc).real
        return out[np.ix_(*q.dilated_indices(n))]
    box = np.zeros((top,) + (size,) * dim)
    box[(slice(None),) + (slice(pad, pad + s),) * dim] = data
    key = (s, top)
    if cache is None or key not in cache:
        # weighted local kernel spectra depend only on the cube side and the tent height
        offs = _offsets(-(pad + s - 1), size) % n
        stencil = kernel_stencils(spec, ladder)[np.ix_(range(top), *([offs] * dim))]
        kern = w * np.fft.fftn(stencil, axes=axes)
        if cache is None:
            cache = {}
        cache[key] = kern
    acc = np.sum(cache[key] * np.fft.fftn(box, axes=axes), axis=0)
    return np.fft.ifftn(acc).real[(slice(0, s2),) * dim]


def atoms(dtu, pieces: list[TentPiece], lam: float, p1: float, localize: bool = True) -> list[Atom]:
    """Atoms from the tent differences.

    Each ``g`` is the synthesis over its piece, restricted to 2Q and shifted to
    zero mean there (``localize=False`` keeps the raw global synthesis,
    which only makes sense for checking linearity). The coefficient is
    ``||g||_2 * |2Q|^(1/p1 - 1/2)`` so the normalized atom meets the L^2 size
    condition with equality.
    """
    spec, ladder = dtu.spec, dtu.ladder
    out = []
    cache: dict = {}
    for piece in pieces:
        if piece.region.is_empty():
            continue
        q = piece.cube
        if localize:
            local = _piece_on_dilated_cube(dtu.values, piece, spec, ladder, cache)
            local = local - local.mean()
        else:
            full = masked_synthesis(dtu, piece.region).samples
            local = full[np.ix_(*q.dilated_indices(spec.points))]
        l2 = float(np.sqrt(spec.cell_volume * np.sum(local**2)))
        if l2 == 0:
            continue
        coef = l2 * q.dilated_measure(spec) ** (1.0 / p1 - 0.5)
        out.append(Atom(piece.k, piece.j, q, spec, local, coef))
    return out


def atom_sum(atom_list: list[Atom], spec: GridSpec) -> GridField:
    out = np.zeros(spec.shape)
    for a in atom_list:
        out[np.ix_(*a.indices)] += a.local
    return GridField(spec, out)


@dataclass
class SplitConfig:
    ladder: TLadder | None = None
    cone: ConeParams = field(default_factory=ConeParams)
    lambda_override: float | None = None
    localize: bool = True


@dataclass(eq=False)
class SplitResult:
    """``f = w + v`` with the atoms of w and diagnostics."""

    f: GridField
    w: GridField
    v: GridField
    residual: GridField
    localization: GridField
    atoms: list[Atom]
    levels: LevelSets | None
    regions: TentRegions | None
    diagnostics: dict
    ladder: TLadder
    cone: ConeParams
    u: object = field(default=None, repr=False)
    dtu: object = field(default=None, repr=False)

    @property
    def degenerate(self) -> str | None:
        return self.diagnostics.get("degenerate")

    def atomic_quasinorm(self, p1: float) -> float:
        return float(sum(a.coefficient**p1 for a in self.atoms) ** (1.0 / p1)) if self.atoms else 0.0

    def save(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        for name in ("f", "w", "v", "residual", "localization"):
            write_field(d / f"{name}.hsf", getattr(self, name))
        rows = ["k,j,level," + ",".join(f"anchor{i}" for i in range(self.f.spec.dim)) + ",coefficient,l2"]
        for a in self.atoms:
            rows.append(",".join(map(str, [a.k, a.j, a.cube.level, *a.cube.anchor])) + f",{a.coefficient!r},{a.l2()!r}")
        (d / "atoms.csv").write_text("\n".join(rows) + "\n")
        if self.levels is not None:
            (d / "covers.csv").write_text(covers_to_csv(self.levels.covers))
        (d / "diagnostics.json").write_text(json.dumps(self.diagnostics, indent=1, sort_keys=True))


def _l2(f: GridField) -> float:
    return lp_quasinorm(f, 2)


def split(kin: KInput, config: SplitConfig | None = None) -> SplitResult:
    """Split ``f = w + v`` with w atomic (H^p1) and v square-integrable."""
    config = SplitConfig() if config is None else config
    f, spec = kin.f, kin.spec
    ladder = TLadder.default(spec) if config.ladder is None else config.ladder
    zero = GridField.zeros(spec)
    alpha, beta = kin.alpha_norm, kin.beta_norm
    diag = {"alpha": alpha, "beta": beta, "p1": kin.p1, "p2": kin.p2, "dim": spec.dim, "points": spec.points, "aperture": config.cone.aperture, "lambda_override": config.lambda_override}

    def trivial(w, v, flag):
        diag.update(degenerate=flag, **{"lambda": None}, measures=[], atom_count=0)
        diag.update(norm_f=_l2(f), norm_w=_l2(w), norm_v=_l2(v), norm_residual=0.0, norm_localization=0.0)
        return SplitResult(f, w, v, zero, zero, [], None, None, diag, ladder, config.cone)

    if config.lambda_override is not None:
        lam = float(config.lambda_override)
    else:
        try:
            lam = choose_lambda(alpha, beta, kin.p1, kin.p2)
        except DegenerateSplit:
            # alpha = 0 forces f = 0; beta = 0 leaves everything on the H^p1 side
            return trivial(f, zero, "beta_zero") if alpha > 0 else trivial(zero, f, "alpha_zero")

    u = poisson_extend(f, ladder)
    dtu = dt_poisson(f, ladder)
    nf = nontangential_max(u, config.cone)
    if (nf.samples > lam).all():
        # on the torus |A| is capped by L^n; a full A means beta << alpha and f itself is the H^p1 part
        diag["max_nf"] = float(nf.samples.max())
        return trivial(f, zero, "A_full")
    ls = level_sets(nf, lam)
    full = masked_synthesis(dtu, np.ones((ladder.count, *spec.shape), bool))
    residual = f - full
    if ls.top < 0:
        w = w_raw = zero
        regions, atom_list = None, []
    else:
        regions = tent_regions(ls.covers, ladder, spec)
        w_raw = masked_synthesis(dtu, regions.hats[0])
        atom_list = atoms(dtu, regions.pieces, lam, kin.p1, localize=config.localize)
        w = atom_sum(atom_list, spec) if config.localize else w_raw
    v = f - w
    loc = w_raw - w
    diag.update(
        degenerate=None,
        measures=ls.measures(),
        K=ls.top,
        atom_count=len(atom_list),
        cube_counts=[len(c) for c in ls.covers],
        norm_f=_l2(f),
        norm_w=_l2(w),
        norm_v=_l2(v),
        norm_residual=_l2(residual),
        norm_localization=_l2(loc),
        max_nf=float(nf.samples.max()),
        **{"lambda": lam},
    )
    log.debug("split: lambda=%.4g K=%d atoms=%d", lam, ls.top, len(atom_list))
    return SplitResult(f, w, v, residual, loc, atom_list, ls, regions, diag, ladder, config.cone, u, dtu)
