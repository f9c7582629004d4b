"""Open-set geometry on the grid: distance transform, Whitney covers, tents.

All distances are Chebyshev distances in cell units, wrapped around the
torus. Dyadic cubes are anchored at cell 0 and never wrap; a set touching
the seam is simply covered by cubes on both sides of it.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .grid import GridSpec, TLadder

_BIG = 1 << 30


def _ring_distance_1d(mask: np.ndarray) -> np.ndarray:
    """Distance along axis 0 to the nearest False entry, periodic; vectorized over other axes."""
    n = mask.shape[0]
    dist = np.full(mask.shape, _BIG, dtype=np.int64)
    run = np.full(mask.shape[1:], _BIG, dtype=np.int64)
    # two laps forward then two laps backward settle every ring position
    for i in range(2 * n):
        r = i % n
        run = np.where(mask[r], np.minimum(run + 1, _BIG), 0)
        dist[r] = np.minimum(dist[r], run)
    run = np.full(mask.shape[1:], _BIG, dtype=np.int64)
    for i in range(2 * n - 1, -1, -1):
        r = i % n
        run = np.where(mask[r], np.minimum(run + 1, _BIG), 0)
        dist[r] = np.minimum(dist[r], run)
    return dist


def _envelope_linf(g: list[int]) -> list[int]:
    """Meijster's lower-envelope scan for ``min_i max(|x - i|, g[i])`` on a line."""
    m = len(g)

    def f(x, i):
        return max(abs(x - i), g[i])

    def sep(i, u):
        if g[i] <= g[u]:
            return max(i + g[u], (i + u) // 2)
        return min(u - g[i], (i + u) // 2)

    s = [0] * m
    t = [0] * m
    q = 0
    for u in range(1, m):
        while q >= 0 and f(t[q], s[q]) > f(t[q], u):
            q -= 1
        if q < 0:
            q = 0
            s[0] = u
        else:
            w = 1 + sep(s[q], u)
            if w < m:
                q += 1
                s[q] = u
                t[q] = w
    out = [0] * m
    for u in range(m - 1, -1, -1):
        out[u] = f(u, s[q])
        if u == t[q]:
            q -= 1
    return out


def distance_to_complement(mask: np.ndarray) -> np.ndarray:
    """Torus-wrapped Chebyshev distance (cells) from each True cell to the nearest False cell.

    Zero on False cells. Separable: a periodic 1-D pass along axis 0, then a
    lower-envelope pass along axis 1 on a thrice-tiled row.
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.all():
        raise ValueError("degenerate open set = whole torus")
    g = _ring_distance_1d(mask)
    if mask.ndim == 1:
        return g
    n = mask.shape[1]
    out = np.empty_like(g)
    for i in range(mask.shape[0]):
        row = g[i]
        if not row.any():
            out[i] = 0
            continue
        big = 4 * n
        vals = [int(v) if v < _BIG else big for v in row]
        env = _envelope_linf(vals * 3)
        out[i] = env[n : 2 * n]
    return out


@dataclass(frozen=True, order=True)
class DyadicCube:
    """Cube of ``2**level`` cells per side with anchor (lowest corner) divisible by the side."""

    level: int
    anchor: tuple[int, ...]

    def __post_init__(self):
        s = self.side
        if any(a % s for a in self.anchor):
            raise ValueError(f"anchor {self.anchor} not aligned to side {s}")

    @property
    def side(self) -> int:
        return 1 << self.level

    def physical_side(self, spec: GridSpec) -> float:
        return self.side * spec.h

    def slices(self) -> tuple[slice, ...]:
        return tuple(slice(a, a + self.side) for a in self.anchor)

    @property
    def dilation_pad(self) -> int:
        """Cells added on each side to form 2Q (rounded up to whole cells)."""
        return -(-self.side // 2)

    def dilated_indices(self, points: int) -> tuple[np.ndarray, ...]:
        """Per-axis cell indices (mod N) of 2Q: same center, twice the side."""
        p = self.dilation_pad
        return tuple(np.arange(a - p, a + self.side + p) % points for a in self.anchor)

    def dilated_side(self) -> int:
        return self.side + 2 * self.dilation_pad

    def dilated_measure(self, spec: GridSpec) -> float:
        return float((self.dilated_side() * spec.h) ** spec.dim)

    def measure(self, spec: GridSpec) -> float:
        return float((self.side * spec.h) ** spec.dim)


@dataclass(frozen=True, eq=False)
class WhitneyCover:
    """Dyadic cubes covering an open grid set."""

    shape: tuple[int, ...]
    cubes: tuple[DyadicCube, ...]

    def __len__(self):
        return len(self.cubes)

    def __iter__(self):
        return iter(self.cubes)

    def cell_mask(self) -> np.ndarray:
        m = np.zeros(self.shape, dtype=bool)
        for q in self.cubes:
            m[q.slices()] = True
        return m

    def violations(self, mask: np.ndarray) -> list[str]:
        """Every broken cover invariant, as human-readable strings (empty when valid)."""
        out = []
        count = np.zeros(self.shape, dtype=np.int64)
        for q in self.cubes:
            count[q.slices()] += 1
        if (count > 1).any():
            out.append(f"{int((count > 1).sum())} cells covered more than once")
        if not np.array_equal(count > 0, np.asarray(mask, bool)):
            out.append("cover union differs from the mask")
        if self.cubes:
            dist = distance_to_complement(mask)
            for q in self.cubes:
                d = int(dist[q.slices()].min())
                if not q.side <= d <= 4 * q.side:
                    out.append(f"cube {q}: dist {d} not in [{q.side}, {4 * q.side}]")
        return out

    def to_rows(self, k: int = 0) -> list[list]:
        return [[k, j, q.level, *q.anchor] for j, q in enumerate(self.cubes)]


def _block_reduce(a: np.ndarray, side: int, func) -> np.ndarray:
    n = a.shape[0] // side
    if a.ndim == 1:
        return func(a.reshape(n, side), axis=1)
    return func(a.reshape(n, side, n, side), axis=(1, 3))


def whitney(mask: np.ndarray) -> WhitneyCover:
    """Whitney cover by maximal admissible dyadic cubes.

    A cube is admissible when it lies inside the mask and
    ``side <= dist(Q, complement) <= 4 side`` (cells, Chebyshev). Cubes are
    visited top-down from side N/4, children in lexicographic order.
    """
    mask = np.asarray(mask, dtype=bool)
    shape = mask.shape
    if not mask.any():
        return WhitneyCover(shape, ())
    dist = distance_to_complement(mask)
    n = shape[0]
    top = (n // 4).bit_length() - 1
    dmin = {lvl: _block_reduce(dist, 1 << lvl, np.min) for lvl in range(top + 1)}
    dmax = {lvl: _block_reduce(dist, 1 << lvl, np.max) for lvl in range(top + 1)}
    cubes = []

    def visit(level, block):
        side = 1 << level
        if dmax[level][block] == 0:
            return
        d = dmin[level][block]
        if d >= 1 and (level == 0 or side <= d <= 4 * side):
            cubes.append(DyadicCube(level, tuple(b * side for b in block)))
            return
        for child in np.ndindex(*(2,) * len(block)):
            visit(level - 1, tuple(2 * b + c for b, c in zip(block, child)))

    for block in np.ndindex(*(n >> top,) * mask.ndim):
        visit(top, block)
    return WhitneyCover(shape, tuple(cubes))


@dataclass(frozen=True, eq=False)
class TentSet:
    """Boolean region of grid x ladder, stored on a bounding box.

    ``local[m, ...]`` covers levels ``0..local.shape[0]-1`` and the spatial
    box starting at ``origin``; everything outside the box is False.
    """

    ladder: TLadder
    shape: tuple[int, ...]
    origin: tuple[int, ...]
    local: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, ladder: TLadder, shape) -> "TentSet":
        return cls(ladder, tuple(shape), (0,) * len(shape), np.zeros((0,) + (0,) * len(shape), bool))

    @classmethod
    def full(cls, ladder: TLadder, shape) -> "TentSet":
        return cls(ladder, tuple(shape), (0,) * len(shape), np.ones((ladder.count, *shape), bool))

    @classmethod
    def from_dense(cls, ladder: TLadder, dense: np.ndarray) -> "TentSet":
        dense = np.asarray(dense, bool)
        return cls(ladder, dense.shape[1:], (0,) * (dense.ndim - 1), dense.copy())

    def _box(self) -> tuple[slice, ...]:
        return (slice(0, self.local.shape[0]),) + tuple(slice(o, o + s) for o, s in zip(self.origin, self.local.shape[1:]))

    def dense(self) -> np.ndarray:
        out = np.zeros((self.ladder.count, *self.shape), bool)
        if self.local.size:
            out[self._box()] = self.local
        return out

    def count(self) -> int:
        return int(np.count_nonzero(self.local))

    def is_empty(self) -> bool:
        return self.count() == 0

    def shadow(self) -> np.ndarray:
        """Spatial projection onto the grid."""
        return self.dense().any(axis=0)

    def __or__(self, other: "TentSet") -> "TentSet":
        return TentSet.from_dense(self.ladder, self.dense() | other.dense())

    def __and__(self, other: "TentSet") -> "TentSet":
        return TentSet.from_dense(self.ladder, self.dense() & other.dense())

    def __sub__(self, other: "TentSet") -> "TentSet":
        return TentSet.from_dense(self.ladder, self.dense() & ~other.dense())

    def complement(self) -> "TentSet":
        return TentSet.from_dense(self.ladder, ~self.dense())

    def boundary(self) -> np.ndarray:
        """Cells of the set with a grid-x-ladder neighbour outside it (t = 0 face included)."""
        d = self.dense()
        outside = np.zeros_like(d)
        for ax in range(1, d.ndim):
            outside |= ~np.roll(d, 1, axis=ax) | ~np.roll(d, -1, axis=ax)
        below = np.zeros_like(d)
        below[1:] = d[:-1]
        above = np.zeros_like(d)
        above[:-1] = d[1:]
        outside |= ~below | ~above
        return d & outside

    def rle(self) -> list[list[tuple[int, int]]]:
        """Per-level run-length encoding of the flattened mask: ``[(start, length), ...]``."""
        out = []
        for level in self.dense():
            flat = np.concatenate([[False], level.reshape(-1), [False]])
            edges = np.flatnonzero(flat[1:] != flat[:-1])
            out.append([(int(a), int(b - a)) for a, b in zip(edges[::2], edges[1::2])])
        return out


def tent(cube: DyadicCube, ladder: TLadder, spec: GridSpec) -> TentSet:
    """``{(y, t_m): y in Q, t_m <= side(Q)}``."""
    top = ladder.top_index(cube.physical_side(spec))
    local = np.ones((top,) + (cube.side,) * spec.dim, bool)
    return TentSet(ladder, spec.shape, cube.anchor, local)


@dataclass(frozen=True, eq=False)
class TentPiece:
    """One tent difference ``T_j^k`` with its home cube."""

    k: int
    j: int
    cube: DyadicCube
    region: TentSet


@dataclass(frozen=True, eq=False)
class TentRegions:
    hats: list[np.ndarray]
    pieces: list[TentPiece]


def _hat(cover: WhitneyCover, ladder: TLadder, spec: GridSpec) -> np.ndarray:
    out = np.zeros((ladder.count, *spec.shape), bool)
    for q in cover:
        top = ladder.top_index(q.physical_side(spec))
        out[(slice(0, top),) + q.slices()] = True
    return out


def tent_regions(covers: list[WhitneyCover], ladder: TLadder, spec: GridSpec) -> TentRegions:
    """Tent unions and the tent differences ``T_j^k = tent(Q_j^k) \\ hat^{k+1}``.

    Whitney tents of nested sets need not be nested, so each union is
    clipped to the previous one (``hat^k := hat^k & hat^{k-1}``); the
    differences then partition ``hat^0`` exactly.
    """
    masks = [c.cell_mask() for c in covers]
    for k in range(1, len(masks)):
        if (masks[k] & ~masks[k - 1]).any():
            raise ValueError(f"level set {k} is not contained in level set {k - 1}")
    hats = []
    for k, cover in enumerate(covers):
        h = _hat(cover, ladder, spec)
        if hats:
            h &= hats[-1]
        hats.append(h)
    pieces = []
    for k, cover in enumerate(covers):
        nxt = hats[k + 1] if k + 1 < len(hats) else None
        for j, q in enumerate(cover):
            top = ladder.top_index(q.physical_side(spec))
            box = (slice(0, top),) + q.slices()
            local = hats[k][box].copy()
            if nxt is not None:
                local &= ~nxt[box]
            pieces.append(TentPiece(k, j, q, TentSet(ladder, spec.shape, q.anchor, local)))
    return TentRegions(hats, pieces)


def covers_to_csv(covers: list[WhitneyCover]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    dim = len(covers[0].shape) if covers else 1
    w.writerow(["k", "j", "level"] + [f"anchor{d}" for d in range(dim)])
    for k, c in enumerate(covers):
        w.writerows(c.to_rows(k))
    return buf.getvalue()
