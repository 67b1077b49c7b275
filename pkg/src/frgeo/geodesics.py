"""Closed-form geodesic flow of densities in the Fisher-Rao geometry.

Every atom of a finite measure space evolves independently: with initial
density value y0 > 0 and initial velocity value z0, the scalar problem
2 y y'' + y^2 - (y')^2 = 0 has the explicit solution

    y(t) = alpha cos^2(t/2 - beta),
    alpha = (y0^2 + z0^2) / y0,    beta = arctan(z0 / y0),

with derivative y'(t) = -alpha cos(t/2 - beta) sin(t/2 - beta) and kinetic
density (y')^2 / y = alpha sin^2(t/2 - beta), the last identity holding with
no division (stable through the zeros of y).

A density f0 together with a velocity g0 satisfying the two normalization
conditions

    (a)  integral g0 dmu = 0,
    (b)  integral g0^2 / f0 dmu = 1,

flows as f(x, t) = alpha(x) cos^2(t/2 - beta(x)).  Along the flow both the
total mass and the kinetic integral are conserved (= 1), the period is 2 pi,
and integral alpha dmu = 2.

The probability simplex is the special case of the counting measure on the
n+1 category probabilities; ``simplex_trajectory`` evaluates the same flow
in free coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import simplex as sx
from .errors import (
    BoundaryTouch,
    DegenerateVelocity,
    NonpositiveInitialDensity,
    NotCentered,
    NotUnitSpeed,
    SpaceMismatch,
    ZeroDirection,
)
from .spaces import FiniteDensity, FiniteMeasureSpace, SignedFunction, integrate

ALPHA_MASS_TOL = 1e-12
CENTERING_TOL = 1e-10
UNIT_SPEED_TOL = 1e-10
UNIT_VELOCITY_MEAN_TOL = 1e-12
DEGENERATE_ENERGY = 1e-14


@dataclass(frozen=True)
class UnitVelocity:
    """Velocity g with zero mean and unit energy against a companion f0."""

    g: SignedFunction
    f0: FiniteDensity

    def __post_init__(self):
        if self.g.space != self.f0.space:
            raise SpaceMismatch("velocity and density live on different spaces")
        mean = integrate(self.g)
        if abs(mean) > UNIT_VELOCITY_MEAN_TOL:
            raise NotCentered(f"velocity mean is {mean!r}, not 0")
        if self.f0.min_value <= 0.0:
            raise NonpositiveInitialDensity("companion density must be positive")
        energy = float(
            np.dot(self.g.values**2 / self.f0.values, self.g.space.weights)
        )
        if abs(energy - 1.0) > UNIT_SPEED_TOL:
            raise NotUnitSpeed(f"velocity energy is {energy!r}, not 1")

    @property
    def space(self) -> FiniteMeasureSpace:
        return self.g.space


@dataclass(frozen=True)
class GeodesicState:
    """Per-atom amplitude/phase representation of a flowing density."""

    space: FiniteMeasureSpace
    alpha: np.ndarray
    beta: np.ndarray
    f0: np.ndarray
    g0: np.ndarray

    def __post_init__(self):
        for name in ("alpha", "beta", "f0", "g0"):
            arr = np.atleast_1d(np.array(getattr(self, name), dtype=float))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
            if arr.shape != (self.space.n_points,):
                raise ValueError(f"{name} does not match the space")
        if np.any(self.alpha <= 0):
            raise ValueError("alpha must be strictly positive")
        mass = float(np.dot(self.alpha, self.space.weights))
        if abs(mass - 2.0) > ALPHA_MASS_TOL:
            raise ValueError(f"integral of alpha is {mass!r}, expected 2")
        # the amplitude/phase pair must reconstruct the initial data
        y0, z0, _ = evaluate_scalar(self.alpha, self.beta, 0.0)
        if np.max(np.abs(y0 - self.f0)) > ALPHA_MASS_TOL or np.max(
            np.abs(z0 - self.g0)
        ) > ALPHA_MASS_TOL:
            raise ValueError("(alpha, beta) do not reconstruct (f0, g0)")


def solve_scalar_ivp(y0: float, z0: float) -> tuple[float, float]:
    """Amplitude alpha and phase beta of the scalar geodesic through (y0, z0)."""
    if y0 <= 0.0:
        raise NonpositiveInitialDensity(f"initial density value {y0!r} <= 0")
    alpha = (y0 * y0 + z0 * z0) / y0
    beta = math.atan(z0 / y0)
    return alpha, beta


def evaluate_scalar(alpha, beta, t):
    """Value, derivative and kinetic density of scalar geodesics at time t.

    Accepts scalars or arrays (broadcast together).  Returns
    (y, y', (y')^2/y) with the kinetic term computed division-free as
    alpha sin^2(t/2 - beta).
    """
    phase = np.asarray(t) / 2.0 - np.asarray(beta)
    c = np.cos(phase)
    s = np.sin(phase)
    a = np.asarray(alpha)
    y = a * c * c
    ydot = -a * c * s
    kinetic = a * s * s
    return y, ydot, kinetic


def normalize_velocity(f0: FiniteDensity, g_raw: SignedFunction) -> UnitVelocity:
    """Scale a centered velocity candidate to unit energy against f0."""
    if g_raw.space != f0.space:
        raise SpaceMismatch("velocity candidate and density spaces differ")
    mean = integrate(g_raw)
    if abs(mean) > CENTERING_TOL:
        raise NotCentered(f"velocity mean is {mean!r}, not 0")
    if f0.min_value <= 0.0:
        raise NonpositiveInitialDensity("density must be strictly positive")
    w = f0.space.weights
    energy = float(np.dot(g_raw.values**2 / f0.values, w))
    if energy <= DEGENERATE_ENERGY:
        raise DegenerateVelocity(
            f"velocity energy {energy!r} too small to normalize"
        )
    g = g_raw.values / math.sqrt(energy)
    # one refinement pass tightens the float rounding of the first scaling
    energy2 = float(np.dot(g**2 / f0.values, w))
    g = g / math.sqrt(energy2)
    return UnitVelocity(SignedFunction(f0.space, g), f0)


def geodesic_flow(f0: FiniteDensity, g0: UnitVelocity) -> GeodesicState:
    """Amplitude/phase state of the geodesic through (f0, g0)."""
    if g0.space != f0.space:
        raise SpaceMismatch("density and velocity live on different spaces")
    if not np.array_equal(g0.f0.values, f0.values):
        raise SpaceMismatch("velocity was normalized against a different density")
    if f0.min_value <= 0.0:
        raise NonpositiveInitialDensity("initial density must be positive")
    energy = float(np.dot(g0.g.values**2 / f0.values, f0.space.weights))
    if abs(energy - 1.0) > UNIT_SPEED_TOL:
        raise NotUnitSpeed(f"velocity energy is {energy!r}, not 1")
    y0 = f0.values
    z0 = g0.g.values
    alpha = (y0 * y0 + z0 * z0) / y0
    beta = np.arctan(z0 / y0)
    return GeodesicState(f0.space, alpha, beta, y0.copy(), z0.copy())


def density_at(state: GeodesicState, t: float) -> FiniteDensity:
    """The flowing density at time t (period 2 pi, mass conserved)."""
    y, _, _ = evaluate_scalar(state.alpha, state.beta, t)
    return FiniteDensity(state.space, y)


def velocity_values_at(state: GeodesicState, t: float) -> np.ndarray:
    """Pointwise time derivative of the flowing density at time t."""
    _, ydot, _ = evaluate_scalar(state.alpha, state.beta, t)
    return ydot


def speed_density_at(state: GeodesicState, t: float) -> FiniteDensity:
    """Kinetic density (f')^2 / f at time t; integrates to one for all t."""
    _, _, kinetic = evaluate_scalar(state.alpha, state.beta, t)
    return FiniteDensity(state.space, kinetic)


# ---------------------------------------------------------------------------
# simplex specialization


def simplex_state(p0: sx.SimplexPoint, v0: sx.TangentVector) -> GeodesicState:
    """Geodesic state of the n+1 category probabilities under counting measure.

    Requires unit Fisher speed: sum_k v_k^2 / theta_k = 1 over all n+1
    coordinates (the expanded metric form).
    """
    if v0.v.size != p0.n:
        raise SpaceMismatch("velocity dimension does not match the point")
    space = FiniteMeasureSpace.counting(p0.n + 1)
    f0 = FiniteDensity(space, p0.full)
    speed2 = sx.metric_inner(p0, v0, v0)
    if abs(speed2 - 1.0) > UNIT_SPEED_TOL:
        raise NotUnitSpeed(f"Fisher speed squared is {speed2!r}, not 1")
    g0 = UnitVelocity(SignedFunction(space, v0.full), f0)
    return geodesic_flow(f0, g0)


def simplex_flow_samples(
    p0: sx.SimplexPoint, v0: sx.TangentVector, times: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Full-coordinate positions and velocities of a simplex geodesic.

    Returns arrays of shape (T, n+1); no boundary policing is applied, the
    closed form is global in time.
    """
    state = simplex_state(p0, v0)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    y, ydot, _ = evaluate_scalar(
        state.alpha[None, :], state.beta[None, :], times[:, None]
    )
    return y, ydot


def simplex_trajectory(
    p0: sx.SimplexPoint, v0: sx.TangentVector, times: np.ndarray
) -> list[sx.SimplexPoint]:
    """Closed-form geodesic through (p0, v0) sampled at the given times.

    theta_i(t) = theta_i cos^2(t/2) + (v_i^2 / theta_i) sin^2(t/2)
                 + v_i sin(t)   for i = 1..n+1,

    evaluated in the non-negative amplitude/phase form.  A sample where any
    coordinate falls below the boundary floor raises BoundaryTouch naming the
    coordinate; detection happens at the requested times only, no
    root-finding between samples.
    """
    times = np.atleast_1d(np.asarray(times, dtype=float))
    y, _ = simplex_flow_samples(p0, v0, times)
    bad = y < sx.BOUNDARY_FLOOR
    if np.any(bad):
        t_idx, k_idx = np.argwhere(bad)[0]
        raise BoundaryTouch(int(k_idx) + 1, float(times[t_idx]))
    return [sx.SimplexPoint(row[:-1]) for row in y]


def boundary_touch_time(p0: sx.SimplexPoint, v0: sx.TangentVector) -> float:
    """First positive time at which some coordinate of the flow vanishes.

    Coordinate k vanishes where cos(t/2 - beta_k) = 0, i.e. at
    t = pi + 2 beta_k (mod 2 pi); the minimum over coordinates is the exit
    time from the open simplex.  Always < pi for unit-speed data, because
    the velocity components sum to zero so some beta_k is negative.
    """
    th = p0.full
    v = v0.full
    beta = np.arctan(v / th)
    touches = np.pi + 2.0 * beta
    return float(np.min(touches))


def ellipsoid_tangent(p: sx.SimplexPoint, w_raw: np.ndarray) -> sx.TangentVector:
    """Scale a direction onto the unit Fisher sphere at p."""
    w = np.atleast_1d(np.asarray(w_raw, dtype=float))
    if not np.any(w != 0.0):
        raise ZeroDirection("cannot normalize the zero direction")
    cand = sx.TangentVector(w)
    norm2 = sx.metric_inner(p, cand, cand)
    return sx.TangentVector(w / math.sqrt(norm2))


def ellipse_param_n2(tau) -> np.ndarray:
    """Unit-speed velocities at the barycenter of the 2-simplex.

    At theta = (1/3, 1/3) the unit Fisher sphere is the ellipse
    v1^2 + v2^2 + v1 v2 = 1/6, parametrized by

        v1 = (sqrt(2)/6) (-sqrt(3) cos tau + sin tau),
        v2 = (sqrt(2)/6) ( sqrt(3) cos tau + sin tau).

    Vectorized over tau; returns shape (..., 2).
    """
    tau = np.asarray(tau, dtype=float)
    r = math.sqrt(2.0) / 6.0
    c = math.sqrt(3.0) * np.cos(tau)
    s = np.sin(tau)
    return np.stack([r * (-c + s), r * (c + s)], axis=-1)
