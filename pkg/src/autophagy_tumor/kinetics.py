"""Reaction kinetics of the two-population growth model.

Cell mass comes in two states: a normal population n1 that proliferates at a
nutrient-dependent rate G(c), and an autophagic population n2 that
proliferates at G(c) - D (self-digestion carries a fixed extra death rate D)
while releasing nutrient back at rate a per unit mass. Cells switch state at
nutrient-dependent rates K1(c) (normal -> autophagic) and K2(c) (autophagic
-> normal).

This module owns the pointwise rate laws, the equilibrium analysis of the
normal-cell fraction mu = n1/(n1+n2) for constant switch rates, the closed
form of the space-free fraction equation, and a fixed-step RK4 integrator
for the space-free (n1, n2, c) system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

__all__ = [
    "Proportional",
    "AffineDeath",
    "Logistic",
    "GrowthSpec",
    "LinearConsumption",
    "ConsumptionSpec",
    "ConstantTransitions",
    "HullTransitions",
    "RationalPairTransitions",
    "TransitionSpec",
    "ConstantFlux",
    "PeriodicFlux",
    "FluxSchedule",
    "QUASISTATIC",
    "NEUMANN",
    "ModelParameters",
    "ReactionEquilibrium",
    "OdeState",
    "eval_growth",
    "eval_consumption",
    "critical_concentration",
    "eval_transitions",
    "eval_flux",
    "reaction_rate_f",
    "equilibrium_roots",
    "mu_ode_closed_form",
    "wellmixed_pointwise_bound",
    "integrate_ode_model",
]


# ---------------------------------------------------------------------------
# rate-law variants

@dataclass(frozen=True)
class Proportional:
    """Growth proportional to nutrient: G(c) = g*c."""

    g: float


@dataclass(frozen=True)
class AffineDeath:
    """Growth with a constant maintenance cost: G(c) = c - delta."""

    delta: float


@dataclass(frozen=True)
class Logistic:
    """Crowding-limited growth: G(c, n) = g*(M - n)*c - delta."""

    g: float
    M: float
    delta: float


GrowthSpec = Union[Proportional, AffineDeath, Logistic]


@dataclass(frozen=True)
class LinearConsumption:
    """Nutrient consumption psi(c) = c."""


ConsumptionSpec = LinearConsumption


@dataclass(frozen=True)
class ConstantTransitions:
    K1: float
    K2: float


@dataclass(frozen=True)
class HullTransitions:
    """Sharp starvation switch around the threshold omega.

    K1(c) = k1max * omega^4 / (omega^4 + c^4)   (activates when starved)
    K2(c) = k2max * c^4 / (omega^4 + c^4)       (activates when fed)
    """

    k1max: float
    k2max: float
    omega: float


@dataclass(frozen=True)
class RationalPairTransitions:
    """Fixed rational pair K1(c) = max(0, (1-c)/(c+0.1)), K2(c) = 2c/(c+1)."""


TransitionSpec = Union[ConstantTransitions, HullTransitions, RationalPairTransitions]


@dataclass(frozen=True)
class ConstantFlux:
    value: float


@dataclass(frozen=True)
class PeriodicFlux:
    """On/off wall flux: `high` on the first half of each period, 0 after."""

    high: float
    period: float


FluxSchedule = Union[ConstantFlux, PeriodicFlux]


def eval_growth(spec: GrowthSpec, c, n=0.0):
    """Pointwise normal-cell growth rate; `c` and `n` may be scalars or arrays."""
    if isinstance(spec, Proportional):
        return spec.g * c
    if isinstance(spec, AffineDeath):
        return c - spec.delta
    if isinstance(spec, Logistic):
        return spec.g * (spec.M - n) * c - spec.delta
    raise TypeError(f"unknown growth spec {spec!r}")


def eval_consumption(spec: ConsumptionSpec, c):
    if isinstance(spec, LinearConsumption):
        return c
    raise TypeError(f"unknown consumption spec {spec!r}")


def critical_concentration(spec: ConsumptionSpec, a: float) -> float:
    """Concentration c0 at which consumption balances release: psi(c0) = a.

    The linear law is inverted directly; a non-monotone or bounded variant
    would need a bracketing root solve here instead.
    """
    if a < 0.0:
        raise ValueError(f"release rate a={a} is outside the range of the consumption law")
    if isinstance(spec, LinearConsumption):
        return float(a)
    raise TypeError(f"unknown consumption spec {spec!r}")


def eval_transitions(spec: TransitionSpec, c):
    """Return the switch-rate pair (K1(c), K2(c)), elementwise in c."""
    if isinstance(spec, ConstantTransitions):
        if np.ndim(c):
            shape = np.shape(c)
            return np.full(shape, spec.K1), np.full(shape, spec.K2)
        return spec.K1, spec.K2
    if isinstance(spec, HullTransitions):
        c4 = np.asarray(c, dtype=float) ** 4
        w4 = spec.omega**4
        frac = c4 / (w4 + c4)
        return spec.k1max * (1.0 - frac), spec.k2max * frac
    if isinstance(spec, RationalPairTransitions):
        ca = np.asarray(c, dtype=float)
        k1 = np.maximum(0.0, (1.0 - ca) / (ca + 0.1))
        k2 = 2.0 * ca / (ca + 1.0)
        return k1, k2
    raise TypeError(f"unknown transition spec {spec!r}")


def eval_flux(schedule: FluxSchedule, t: float) -> float:
    if isinstance(schedule, ConstantFlux):
        return schedule.value
    if isinstance(schedule, PeriodicFlux):
        phase = t % schedule.period
        return schedule.high if phase < 0.5 * schedule.period else 0.0
    raise TypeError(f"unknown flux schedule {schedule!r}")


# ---------------------------------------------------------------------------
# model parameter bundle

QUASISTATIC = "quasistatic_dirichlet"
NEUMANN = "dynamic_neumann"


@dataclass(frozen=True)
class ModelParameters:
    """All model constants and rate-law choices for one setup.

    nutrient_mode selects between the instantaneous-diffusion closure
    (Dirichlet value c_B outside the occupied region, epsilon = 0) and the
    time-dependent flux-driven nutrient equation on a fixed box
    (epsilon = 1, requires a lambda_schedule for the wall flux).
    """

    gamma: float
    D: float
    a: float
    c_B: float
    growth: GrowthSpec
    consumption: ConsumptionSpec = field(default_factory=LinearConsumption)
    transitions: TransitionSpec = ConstantTransitions(1.0, 1.0)
    nutrient_mode: str = QUASISTATIC
    lambda_schedule: FluxSchedule | None = None
    epsilon: int | None = None

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise ValueError(f"gamma must exceed 1, got {self.gamma}")
        if self.D < 0.0:
            raise ValueError(f"death-rate offset D must be >= 0, got {self.D}")
        if self.a < 0.0:
            raise ValueError(f"nutrient release rate a must be >= 0, got {self.a}")
        if not self.c_B > 0.0:
            raise ValueError(f"ambient nutrient level c_B must be > 0, got {self.c_B}")
        if self.nutrient_mode not in (QUASISTATIC, NEUMANN):
            raise ValueError(f"unknown nutrient_mode {self.nutrient_mode!r}")
        expected_eps = 0 if self.nutrient_mode == QUASISTATIC else 1
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", expected_eps)
        elif self.epsilon != expected_eps:
            raise ValueError(
                f"epsilon={self.epsilon} inconsistent with nutrient_mode={self.nutrient_mode!r}"
            )
        if self.nutrient_mode == NEUMANN and self.lambda_schedule is None:
            raise ValueError("dynamic_neumann mode needs a lambda_schedule")


# ---------------------------------------------------------------------------
# constant-rate equilibrium analysis of the fraction equation
#
# The normal fraction obeys d(mu)/dt = f(mu) with
#   f(mu) = -mu*K1 + (1-mu)*K2 + D*mu*(1-mu)
#         = -D*mu^2 + (D - K1 - K2)*mu + K2,
# a downward parabola with f(0) = K2 > 0 and f(1) = -K1 < 0, hence one root
# nu* < 0 and one stable root mu* in (0, 1).


def reaction_rate_f(mu, D: float, K1: float, K2: float):
    return -mu * K1 + (1.0 - mu) * K2 + D * mu * (1.0 - mu)


@dataclass(frozen=True)
class ReactionEquilibrium:
    nu_star: float  # negative root of f
    mu_star: float  # stable normal fraction, in (0, 1)
    E: float  # discriminant (D - K1 - K2)^2 + 4*D*K2
    decay_rate: float  # D*(mu_star - nu_star) = sqrt(E)
    uniform_A: float  # (mu_star - nu_star)/(-nu_star), prefactor of the sup bound


def equilibrium_roots(D: float, K1: float, K2: float) -> ReactionEquilibrium:
    """Roots and decay constants of the fraction equation for constant rates.

    Requires D, K1, K2 all strictly positive: D = 0 degenerates the parabola
    to a line, and the root ordering nu* < 0 < mu* < 1 needs f(0) = K2 > 0
    and f(1) = -K1 < 0.
    """
    if D <= 0.0:
        raise ValueError(f"degenerate: need D > 0, got D={D}")
    if K1 <= 0.0 or K2 <= 0.0:
        raise ValueError(f"root ordering needs K1, K2 > 0, got K1={K1}, K2={K2}")
    b = D - K1 - K2
    E = b * b + 4.0 * D * K2  # == D^2 + (K1+K2)^2 - 2*D*K1 + 2*D*K2
    s = math.sqrt(E)
    # evaluate the non-cancelling root directly, recover the other via Vieta
    # (product of roots = -K2/D)
    if b <= 0.0:
        nu = (b - s) / (2.0 * D)
        mu = -K2 / (D * nu)
    else:
        mu = (b + s) / (2.0 * D)
        nu = -K2 / (D * mu)
    return ReactionEquilibrium(
        nu_star=nu,
        mu_star=mu,
        E=E,
        decay_rate=s,
        uniform_A=(mu - nu) / (-nu),
    )


def mu_ode_closed_form(z0: float, t, eq: ReactionEquilibrium, D: float):
    """Exact solution z(t) of dz/dt = f(z), z(0) = z0, for constant rates.

    Uses the invariant (z - mu*)/(z - nu*) = exp(-D*(mu*-nu*)*t) * (z0 - mu*)/(z0 - nu*).
    `t` may be a scalar or an array. Valid for z0 > nu* (below the repelling
    root the solution escapes to -infinity in finite time).
    """
    if z0 <= eq.nu_star:
        raise ValueError(f"z0={z0} must exceed the negative root nu*={eq.nu_star}")
    w = np.exp(-D * (eq.mu_star - eq.nu_star) * np.asarray(t, dtype=float))
    w = w * ((z0 - eq.mu_star) / (z0 - eq.nu_star))
    # w < 1 always (the t=0 ratio is < 1 and decays), so no pole here
    z = (eq.mu_star - w * eq.nu_star) / (1.0 - w)
    return float(z) if np.ndim(t) == 0 else z


def wellmixed_pointwise_bound(z0: float, t, eq: ReactionEquilibrium, D: float):
    """Envelope for |z(t) - mu*|: coefficient * exp(-D*(mu*-nu*)*t) * |z0 - mu*|.

    The coefficient (max(z0, mu*) - nu*)/(z0 - nu*) equals 1 for z0 >= mu*.
    """
    if z0 <= eq.nu_star:
        raise ValueError(f"z0={z0} must exceed the negative root nu*={eq.nu_star}")
    coef = (max(z0, eq.mu_star) - eq.nu_star) / (z0 - eq.nu_star)
    return coef * np.exp(-D * (eq.mu_star - eq.nu_star) * np.asarray(t, dtype=float)) * abs(
        z0 - eq.mu_star
    )


# ---------------------------------------------------------------------------
# space-free three-variable model


@dataclass(frozen=True)
class OdeState:
    n1: float
    n2: float
    c: float
    t: float


def integrate_ode_model(
    s0: OdeState,
    p: ModelParameters,
    lambda_fn: Callable[[float], float],
    c_B_fn: Callable[[float], float],
    t_end: float,
    dt: float,
) -> list[OdeState]:
    """Fixed-step RK4 for the space-free system

        n1' = G(c, n)*n1 - K1(c)*n1 + K2(c)*n2
        n2' = (G(c, n) - D)*n2 + K1(c)*n1 - K2(c)*n2
        c'  = -lambda(t)*(c - c_B(t)) - psi(c)*(n1 + n2) + a*n2

    Returns the state at every step, s0 included. Raises ValueError naming
    the offending time if the solution leaves the physical range (NaN,
    infinity, or a clearly negative component).
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes initial time {s0.t}")

    def rhs(t, y):
        n1, n2, c = y
        n = n1 + n2
        G = eval_growth(p.growth, c, n)
        K1, K2 = eval_transitions(p.transitions, c)
        return np.array(
            [
                G * n1 - K1 * n1 + K2 * n2,
                (G - p.D) * n2 + K1 * n1 - K2 * n2,
                -lambda_fn(t) * (c - c_B_fn(t)) - eval_consumption(p.consumption, c) * n + p.a * n2,
            ]
        )

    n_steps = max(0, int(round((t_end - s0.t) / dt)))
    y = np.array([s0.n1, s0.n2, s0.c], dtype=float)
    out = [s0]
    t = s0.t
    for j in range(n_steps):
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * dt, y + 0.5 * dt * k1)
        k3 = rhs(t + 0.5 * dt, y + 0.5 * dt * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t = s0.t + (j + 1) * dt
        if not np.all(np.isfinite(y)) or np.min(y) < -1e-9:
            raise ValueError(f"state left the physical range at t={t}: {tuple(y)}")
        out.append(OdeState(n1=float(y[0]), n2=float(y[1]), c=float(y[2]), t=t))
    return out
