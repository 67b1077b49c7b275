"""Piecewise-constant catalog functions on the unit cube, with exact arithmetic.

A catalog function is a finite union of constant values on axis-aligned
half-open boxes tiling [0,1)^m.  Box bounds and values are stored as
`fractions.Fraction`, so integrals, overlays and cell averages are computed
in exact rational arithmetic; floats entering a catalog are embedded exactly
(every float is a rational).  This is what makes alignment statements like
"the projection reproduces the function exactly at level j" hold to the last
bit instead of to quadrature error.

The on-disk descriptor format is one box per line::

    value  x_lo  x_hi  [y_lo  y_hi]

with tokens parsed by ``Fraction`` (so ``1/3``, ``0.125`` and ``-2`` all
work).  Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .errors import InvalidCatalogFunction
from .spaces import DyadicGrid, SignedFunction

FractionLike = Fraction | int | float | str

_ZERO = Fraction(0)
_ONE = Fraction(1)


def _frac(x: FractionLike) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Box:
    """Half-open axis-aligned box with a constant value."""

    value: Fraction
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    @classmethod
    def make(cls, value: FractionLike, *bounds: FractionLike) -> "Box":
        if len(bounds) % 2 != 0 or not bounds:
            raise InvalidCatalogFunction(
                "a box needs an even, positive number of bounds"
            )
        lo = tuple(_frac(b) for b in bounds[0::2])
        hi = tuple(_frac(b) for b in bounds[1::2])
        return cls(_frac(value), lo, hi)

    @property
    def dimension(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> Fraction:
        v = _ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def intersects(self, other: "Box") -> bool:
        return all(
            max(a1, a2) < min(b1, b2)
            for a1, b1, a2, b2 in zip(self.lo, self.hi, other.lo, other.hi)
        )

    def intersection_bounds(
        self, other: "Box"
    ) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]] | None:
        lo = tuple(max(a1, a2) for a1, a2 in zip(self.lo, other.lo))
        hi = tuple(min(b1, b2) for b1, b2 in zip(self.hi, other.hi))
        if any(a >= b for a, b in zip(lo, hi)):
            return None
        return lo, hi

    def axis_moment(self, axis: int, power: int = 1) -> Fraction:
        """Exact integral of x_axis^power over the box."""
        a, b = self.lo[axis], self.hi[axis]
        m = (b ** (power + 1) - a ** (power + 1)) / Fraction(power + 1)
        for d, (lo, hi) in enumerate(zip(self.lo, self.hi)):
            if d != axis:
                m *= hi - lo
        return m


def _validate_tiling(boxes: list[Box], dimension: int) -> None:
    total = _ZERO
    for b in boxes:
        if b.dimension != dimension:
            raise InvalidCatalogFunction("boxes of mixed dimension")
        for a, c in zip(b.lo, b.hi):
            if not (_ZERO <= a < c <= _ONE):
                raise InvalidCatalogFunction(
                    f"box bounds [{a}, {c}) do not sit inside [0, 1)"
                )
        total += b.volume
    for i, b1 in enumerate(boxes):
        for b2 in boxes[i + 1 :]:
            if b1.intersects(b2):
                raise InvalidCatalogFunction(
                    f"overlapping boxes {b1.lo}-{b1.hi} and {b2.lo}-{b2.hi}"
                )
    if total != _ONE:
        raise InvalidCatalogFunction(
            f"boxes tile volume {total}, not the whole unit cube"
        )


@dataclass(frozen=True)
class BoxFunction:
    """Exact piecewise-constant function given by a disjoint box tiling."""

    dimension: int
    boxes: tuple[Box, ...]

    def __post_init__(self):
        _validate_tiling(list(self.boxes), self.dimension)

    @classmethod
    def from_rows(
        cls, dimension: int, rows: list[tuple[FractionLike, ...]]
    ) -> "BoxFunction":
        return cls(dimension, tuple(Box.make(r[0], *r[1:]) for r in rows))

    def integral(self) -> Fraction:
        return sum((b.value * b.volume for b in self.boxes), _ZERO)

    def square_integral(self) -> Fraction:
        return sum((b.value * b.value * b.volume for b in self.boxes), _ZERO)

    def moment(self, axis: int, power: int = 1) -> Fraction:
        """Exact integral of x_axis^power times the function."""
        return sum((b.value * b.axis_moment(axis, power) for b in self.boxes), _ZERO)

    def scaled(self, factor: FractionLike) -> "BoxFunction":
        f = _frac(factor)
        return BoxFunction(
            self.dimension,
            tuple(Box(b.value * f, b.lo, b.hi) for b in self.boxes),
        )

    def min_value(self) -> Fraction:
        return min(b.value for b in self.boxes)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Point values at an (N, m) float array (half-open box membership)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(pts.shape[0])
        for b in self.boxes:
            inside = np.ones(pts.shape[0], dtype=bool)
            for d in range(self.dimension):
                inside &= (pts[:, d] >= float(b.lo[d])) & (pts[:, d] < float(b.hi[d]))
            out[inside] = float(b.value)
        return out

    def cell_averages(self, grid: DyadicGrid) -> np.ndarray:
        """Exact per-cell averages on a dyadic grid, flattened in cell order."""
        if grid.dimension != self.dimension:
            raise InvalidCatalogFunction(
                "grid dimension does not match the catalog"
            )
        return project_regions(
            grid,
            [(b.lo, b.hi) for b in self.boxes],
            np.array([float(b.value) for b in self.boxes]),
        )


def _axis_overlaps(lo: Fraction, hi: Fraction, level: int) -> tuple[int, np.ndarray]:
    """Exact overlap lengths of [lo, hi) with the level-j cells it meets.

    Returns the first cell index and the vector of per-cell overlap lengths
    (converted to float after exact computation).
    """
    side = 1 << level
    first = math.floor(lo * side)
    last = math.ceil(hi * side) - 1
    lengths = []
    for k in range(first, last + 1):
        a = max(lo, Fraction(k, side))
        b = min(hi, Fraction(k + 1, side))
        lengths.append(float(b - a) if b > a else 0.0)
    return first, np.array(lengths)


def project_regions(
    grid: DyadicGrid,
    bounds: list[tuple[tuple[Fraction, ...], tuple[Fraction, ...]]],
    values: np.ndarray,
) -> np.ndarray:
    """Cell averages of sum_r values[r] * indicator(region r) on ``grid``.

    Regions are half-open boxes given by exact bounds.  Intersection volumes
    are computed exactly per axis and combined as an outer product, so for
    dyadically aligned regions the result is exact in floating point.
    """
    m = grid.dimension
    side = grid.side_count
    acc = np.zeros((side,) * m)
    for (lo, hi), val in zip(bounds, values):
        if val == 0.0:
            continue
        starts, overlaps = [], []
        for d in range(m):
            s, length = _axis_overlaps(lo[d], hi[d], grid.level)
            starts.append(s)
            overlaps.append(length)
        block = overlaps[0]
        for d in range(1, m):
            block = np.multiply.outer(block, overlaps[d])
        sl = tuple(slice(s, s + o.size) for s, o in zip(starts, overlaps))
        acc[sl] += val * block
    # divide by the cell volume (a power of two, exact)
    return acc.reshape(-1) * float(side**m)


def cell_average_projection(catalog: BoxFunction, grid: DyadicGrid) -> SignedFunction:
    """Project a catalog function onto a grid by exact cell averaging."""
    return SignedFunction(grid, catalog.cell_averages(grid))


@dataclass(frozen=True)
class OverlayRegion:
    """Common refinement cell of two catalogs: constant pair (f, g)."""

    f_value: Fraction
    g_value: Fraction
    lo: tuple[Fraction, ...]
    hi: tuple[Fraction, ...]

    @property
    def volume(self) -> Fraction:
        v = _ONE
        for a, b in zip(self.lo, self.hi):
            v *= b - a
        return v

    def axis_moment(self, axis: int, power: int = 1) -> Fraction:
        return Box(_ONE, self.lo, self.hi).axis_moment(axis, power)


def overlay(f: BoxFunction, g: BoxFunction) -> tuple[OverlayRegion, ...]:
    """Common box refinement of two catalogs on the same cube."""
    if f.dimension != g.dimension:
        raise InvalidCatalogFunction("catalogs of different dimension")
    regions = []
    for bf in f.boxes:
        for bg in g.boxes:
            inter = bf.intersection_bounds(bg)
            if inter is not None:
                regions.append(OverlayRegion(bf.value, bg.value, *inter))
    total = sum((r.volume for r in regions), _ZERO)
    if total != _ONE:
        raise InvalidCatalogFunction("overlay does not tile the unit cube")
    return tuple(regions)


def overlay_energy(f: BoxFunction, g: BoxFunction) -> Fraction:
    """Exact integral of g^2 / f (f must be nonzero on every region)."""
    total = _ZERO
    for r in overlay(f, g):
        if r.f_value == 0:
            raise InvalidCatalogFunction("division by a zero-valued f region")
        total += r.g_value * r.g_value / r.f_value * r.volume
    return total


def load_catalog(path: str | Path) -> BoxFunction:
    """Read a box catalog descriptor file (see module docstring)."""
    rows = []
    dimension = None
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) not in (3, 5):
            raise InvalidCatalogFunction(
                f"{path}:{lineno}: expected 'value x_lo x_hi [y_lo y_hi]'"
            )
        try:
            parsed = [Fraction(t) for t in tokens]
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidCatalogFunction(f"{path}:{lineno}: {exc}") from exc
        row_dim = (len(tokens) - 1) // 2
        if dimension is None:
            dimension = row_dim
        elif dimension != row_dim:
            raise InvalidCatalogFunction(f"{path}:{lineno}: mixed dimensions")
        rows.append(tuple(parsed))
    if not rows:
        raise InvalidCatalogFunction(f"{path}: empty catalog")
    return BoxFunction.from_rows(dimension, rows)
