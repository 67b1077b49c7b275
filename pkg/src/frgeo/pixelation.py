"""Dyadic pixelation of continuum geodesic data and weak-convergence errors.

Starting from exact box catalogs (f0, g0) on [0,1)^m satisfying

    f0 >= delta > 0,   integral f0 = 1,   integral g0 = 0,
    integral g0^2 / f0 = 1,

each level j produces discrete initial data by exact cell averaging:
f0_j = avg(f0), g0_j = avg(g0).  Averaging preserves the first two integrals
exactly but shrinks the energy, so the level restores it with the
renormalizer

    alpha_j = integral (g0_j)^2 / f0_j dmu_j,      g_j = g0_j / sqrt(alpha_j).

By the per-cell Cauchy-Schwarz inequality alpha_j <= 1, with equality iff
g0/f0 is constant on every cell; alpha_j increases to 1 under refinement.
Levels where alpha_j vanishes numerically are recorded as degenerate and
carry no geodesic state.

Weak errors compare the discrete flow with the exact continuum flow: the
continuum initial data is piecewise constant on the overlay of the two
catalogs, so alpha(x), beta(x) are exact per overlay region and the flowed
density is realized at a reference level J_ref by exact box/cell averaging
(no projection of the initial data is involved).  Test functions phi are
fixed once as a staircase at J_ref (midpoint sampling) and both integrals
are evaluated exactly against that staircase.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .boxes import BoxFunction, OverlayRegion, overlay, project_regions
from .errors import HypothesisViolation
from .geodesics import GeodesicState, UnitVelocity, geodesic_flow
from .spaces import DyadicGrid, FiniteDensity, SignedFunction

DEGENERATE_ALPHA = 1e-14
HYPOTHESIS_TOL = 1e-12
J_REF_OFFSET = 4


@dataclass(frozen=True)
class TentFunction:
    """Product of per-axis tents: prod_d max(0, 1 - |x_d - c_d| / r_d).

    Continuous, compactly supported with support strictly inside (0,1)^m,
    sup-norm one.
    """

    centers: tuple[float, ...]
    radii: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "centers", tuple(float(c) for c in self.centers))
        object.__setattr__(self, "radii", tuple(float(r) for r in self.radii))
        if len(self.centers) != len(self.radii) or not self.centers:
            raise ValueError("centers and radii must have equal positive length")
        for c, r in zip(self.centers, self.radii):
            if r <= 0 or c - r <= 0.0 or c + r >= 1.0:
                raise ValueError(
                    f"tent support [{c - r}, {c + r}] not strictly inside (0, 1)"
                )

    @property
    def dimension(self) -> int:
        return len(self.centers)

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.ones(pts.shape[0])
        for d, (c, r) in enumerate(zip(self.centers, self.radii)):
            out *= np.maximum(0.0, 1.0 - np.abs(pts[:, d] - c) / r)
        return out


def test_functions_1d() -> list[TentFunction]:
    """The fixed 1D test set: twelve tents, six centers at two widths.

    The centers probe both thirds breakpoints and the midpoint from either
    side with a common offset of 1/14.  Every support straddles a breakpoint,
    so none of the weak-error integrals degenerates to zero.
    """
    centers = [11 / 42, 17 / 42, 3 / 7, 4 / 7, 25 / 42, 31 / 42]
    radii = [1 / 5, 1 / 4]
    return [TentFunction((c,), (r,)) for r in radii for c in centers]


def test_functions_2d() -> list[TentFunction]:
    """The fixed 2D test set: 3 x 3 products of tents (one width)."""
    centers = [11 / 42, 1 / 2, 31 / 42]
    return [
        TentFunction((cx, cy), (1 / 5, 1 / 5)) for cx in centers for cy in centers
    ]


@dataclass(frozen=True)
class LadderLevel:
    """One pixelation level: projected data and its renormalized state."""

    level: int
    grid: DyadicGrid
    f_values: np.ndarray
    g_values: np.ndarray  # raw projection, before renormalization
    alpha: float
    degenerate: bool
    state: GeodesicState | None  # None iff degenerate


@dataclass(frozen=True)
class PixelationLadder:
    """Pixelations of one continuum initial datum across several levels."""

    dimension: int
    f0: BoxFunction
    g0: BoxFunction
    regions: tuple[OverlayRegion, ...]
    delta: float
    levels: dict[int, LadderLevel]

    @property
    def max_level(self) -> int:
        return max(self.levels)

    def grid(self, j: int) -> DyadicGrid:
        return self.levels[j].grid


def _check_hypotheses(f0: BoxFunction, g0: BoxFunction, delta) -> tuple:
    delta = Fraction(delta)
    if delta <= 0:
        raise HypothesisViolation("delta", "lower density bound must be positive")
    if f0.min_value() < delta:
        raise HypothesisViolation(
            "density-floor", f"min f0 = {float(f0.min_value())} below delta"
        )
    mass = f0.integral()
    if abs(mass - 1) > HYPOTHESIS_TOL:
        raise HypothesisViolation("unit-mass", f"integral f0 = {float(mass)}")
    mean = g0.integral()
    if abs(mean) > HYPOTHESIS_TOL:
        raise HypothesisViolation("zero-mean", f"integral g0 = {float(mean)}")
    regions = overlay(f0, g0)
    energy = sum(
        (r.g_value * r.g_value / r.f_value * r.volume for r in regions),
        Fraction(0),
    )
    if abs(energy - 1) > HYPOTHESIS_TOL:
        raise HypothesisViolation(
            "unit-energy", f"integral g0^2/f0 = {float(energy)}"
        )
    return regions


def build_ladder(
    f0: BoxFunction,
    g0: BoxFunction,
    levels: list[int],
    delta=Fraction(1, 1000),
) -> PixelationLadder:
    """Project (f0, g0) to each requested level and renormalize.

    The continuum hypotheses are verified exactly (box arithmetic) before
    any projection; violations raise HypothesisViolation naming the failed
    condition.  Levels whose projected velocity is numerically zero are
    recorded as degenerate.
    """
    if f0.dimension != g0.dimension:
        raise HypothesisViolation("dimension", "catalogs of different dimension")
    regions = _check_hypotheses(f0, g0, delta)
    out = {}
    for j in sorted(set(int(j) for j in levels)):
        grid = DyadicGrid(f0.dimension, j)
        f_vals = f0.cell_averages(grid)
        g_vals = g0.cell_averages(grid)
        fd = FiniteDensity(grid, f_vals)
        alpha = float(np.dot(g_vals**2 / f_vals, grid.weights))
        if alpha <= DEGENERATE_ALPHA:
            out[j] = LadderLevel(j, grid, f_vals, g_vals, alpha, True, None)
            continue
        g_unit = g_vals / math.sqrt(alpha)
        # second pass tightens the rounding of the first
        energy = float(np.dot(g_unit**2 / f_vals, grid.weights))
        g_unit = g_unit / math.sqrt(energy)
        state = geodesic_flow(fd, UnitVelocity(SignedFunction(grid, g_unit), fd))
        out[j] = LadderLevel(j, grid, f_vals, g_vals, alpha, False, state)
    return PixelationLadder(
        f0.dimension, f0, g0, tuple(regions), float(delta), out
    )


def alpha_sequence(ladder: PixelationLadder) -> list[tuple[int, float]]:
    """(level, alpha_j) pairs in increasing level order."""
    return [(j, ladder.levels[j].alpha) for j in sorted(ladder.levels)]


def phi_staircase(phi: TentFunction, dimension: int, j_ref: int) -> np.ndarray:
    """phi sampled at the cell midpoints of the level-j_ref grid."""
    if phi.dimension != dimension:
        raise ValueError("test function dimension mismatch")
    grid = DyadicGrid(dimension, j_ref)
    return phi(grid.centers())


def _coarsen_mean(values: np.ndarray, m: int, j_fine: int, j_coarse: int) -> np.ndarray:
    """Average a level-j_fine cell array over level-j_coarse cells."""
    if j_fine == j_coarse:
        return values
    side_c = 1 << j_coarse
    ratio = 1 << (j_fine - j_coarse)
    shaped = values.reshape((side_c, ratio) * m)
    # axes 1, 3, ... are the fine offsets inside each coarse cell
    return shaped.mean(axis=tuple(range(1, 2 * m, 2))).reshape(-1)


def region_flow_values(regions, t: float) -> np.ndarray:
    """Exact continuum flow value on each overlay region at time t."""
    f = np.array([float(r.f_value) for r in regions])
    g = np.array([float(r.g_value) for r in regions])
    alpha = (f * f + g * g) / f
    beta = np.arctan(g / f)
    c = np.cos(t / 2.0 - beta)
    return alpha * c * c


def continuum_cell_averages(
    ladder: PixelationLadder, t: float, j_ref: int
) -> np.ndarray:
    """Cell averages at level j_ref of the exact continuum flow at time t."""
    grid = DyadicGrid(ladder.dimension, j_ref)
    values = region_flow_values(ladder.regions, t)
    bounds = [(r.lo, r.hi) for r in ladder.regions]
    return project_regions(grid, bounds, values)


def weak_error(
    ladder: PixelationLadder,
    j: int,
    t: float,
    phi: TentFunction,
    j_ref: int | None = None,
) -> float:
    """|discrete minus continuum| pairing of the flow with a test function.

    Both sides integrate piecewise-constant densities against the same
    J_ref staircase of phi, so the only representation error left is phi's.
    Requires j_ref strictly above every ladder level (default: max + 4).
    """
    level = ladder.levels[j]
    if level.degenerate:
        raise HypothesisViolation(
            "degenerate-level", f"level {j} carries no geodesic state"
        )
    if j_ref is None:
        j_ref = ladder.max_level + J_REF_OFFSET
    if j_ref <= ladder.max_level:
        raise ValueError("j_ref must exceed the deepest ladder level")
    m = ladder.dimension
    stair = phi_staircase(phi, m, j_ref)
    phi_coarse = _coarsen_mean(stair, m, j_ref, j)

    state = level.state
    phase = t / 2.0 - state.beta
    disc_values = state.alpha * np.cos(phase) ** 2
    disc = float(np.dot(disc_values * phi_coarse, level.grid.weights))

    cont_values = continuum_cell_averages(ladder, t, j_ref)
    cont = float(np.dot(cont_values * stair, DyadicGrid(m, j_ref).weights))
    return abs(disc - cont)


def three_term_errors(
    ladder: PixelationLadder,
    j: int,
    phi: TentFunction,
    j_ref: int | None = None,
) -> tuple[float, float | None, float | None]:
    """Weak errors of the three building blocks at level j.

    e_f pairs f0_j against f0, e_g the renormalized velocity against g0,
    e_q the discrete kinetic ratio g_j^2/f0_j against g0^2/f0.  At a
    degenerate level only e_f is defined; the other two come back as None.
    """
    if j_ref is None:
        j_ref = ladder.max_level + J_REF_OFFSET
    if j_ref <= ladder.max_level:
        raise ValueError("j_ref must exceed the deepest ladder level")
    m = ladder.dimension
    level = ladder.levels[j]
    grid_ref = DyadicGrid(m, j_ref)
    stair = phi_staircase(phi, m, j_ref)
    phi_coarse = _coarsen_mean(stair, m, j_ref, j)
    bounds = [(r.lo, r.hi) for r in ladder.regions]

    def cont_pairing(region_values: np.ndarray) -> float:
        avg = project_regions(grid_ref, bounds, region_values)
        return float(np.dot(avg * stair, grid_ref.weights))

    f_region = np.array([float(r.f_value) for r in ladder.regions])
    g_region = np.array([float(r.g_value) for r in ladder.regions])

    disc_f = float(np.dot(level.f_values * phi_coarse, level.grid.weights))
    e_f = abs(disc_f - cont_pairing(f_region))
    if level.degenerate:
        return e_f, None, None

    g_unit = level.state.g0
    disc_g = float(np.dot(g_unit * phi_coarse, level.grid.weights))
    e_g = abs(disc_g - cont_pairing(g_region))

    disc_q = float(
        np.dot(g_unit**2 / level.f_values * phi_coarse, level.grid.weights)
    )
    e_q = abs(disc_q - cont_pairing(g_region**2 / f_region))
    return e_f, e_g, e_q


def ladder_summary_rows(
    ladder: PixelationLadder,
    phi: TentFunction,
    j_ref: int | None = None,
) -> list[dict]:
    """Per-level summary used by the CSV export (see write_ladder_csv)."""
    rows = []
    for j in sorted(ladder.levels):
        level = ladder.levels[j]
        e_f, e_g, e_q = three_term_errors(ladder, j, phi, j_ref)
        if level.degenerate:
            w0 = wpi2 = None
        else:
            w0 = weak_error(ladder, j, 0.0, phi, j_ref)
            wpi2 = weak_error(ladder, j, math.pi / 2.0, phi, j_ref)
        rows.append(
            {
                "j": j,
                "alpha_j": level.alpha,
                "degenerate": level.degenerate,
                "e_f": e_f,
                "e_g": e_g,
                "e_q": e_q,
                "weak_error_t0": w0,
                "weak_error_tpi2": wpi2,
            }
        )
    return rows


def write_ladder_csv(
    path: str | Path,
    ladder: PixelationLadder,
    phi: TentFunction,
    j_ref: int | None = None,
) -> None:
    """Ladder summary as CSV: j, alpha_j, degenerate, e_f, e_g, e_q,
    weak_error_t0, weak_error_tpi2 (empty fields at degenerate levels)."""
    rows = ladder_summary_rows(ladder, phi, j_ref)
    fields = [
        "j",
        "alpha_j",
        "degenerate",
        "e_f",
        "e_g",
        "e_q",
        "weak_error_t0",
        "weak_error_tpi2",
    ]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(fields)
        for row in rows:
            writer.writerow(
                [
                    row["j"],
                    f"{row['alpha_j']:.17g}",
                    str(row["degenerate"]).lower(),
                    *(
                        "" if row[k] is None else f"{row[k]:.17g}"
                        for k in ("e_f", "e_g", "e_q", "weak_error_t0", "weak_error_tpi2")
                    ),
                ]
            )
