"""Support detection, composition-fraction norms, and theoretical bounds.

All diagnostics operate on the cell-centered fields of a solver state. The
occupied region ("support") is wherever the total density exceeds a small
threshold; composition diagnostics are only defined there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kinetics import (
    ConstantTransitions,
    ModelParameters,
    ReactionEquilibrium,
    eval_growth,
    Logistic,
)

__all__ = [
    "SupportInfo",
    "NormReport",
    "TimeSeries",
    "SERIES_CHANNELS",
    "support_info",
    "density_fraction_field",
    "sup_deviation",
    "l2n_deviation",
    "uniform_bound_at",
    "l2n_condition_and_rate",
    "nutrient_bound_check",
    "total_population",
    "norm_report",
]


@dataclass(frozen=True)
class SupportInfo:
    """Occupied-region summary: inclusive index ranges of the connected
    components, the largest |x| over occupied cells, and the mass they hold."""

    components: tuple[tuple[int, int], ...]
    radius: float
    total_mass: float


def _support_mask(state, threshold: float) -> np.ndarray:
    return (state.n1 + state.n2) > threshold


def support_info(state, threshold: float) -> SupportInfo:
    mask = _support_mask(state, threshold)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return SupportInfo(components=(), radius=0.0, total_mass=0.0)
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([0], breaks + 1))
    ends = np.concatenate((breaks, [idx.size - 1]))
    components = tuple((int(idx[s]), int(idx[e])) for s, e in zip(starts, ends))
    x = state.grid.cell_x
    radius = float(np.max(np.abs(x[idx])))
    total = float(state.grid.dx * np.sum((state.n1 + state.n2)[idx]))
    return SupportInfo(components=components, radius=radius, total_mass=total)


def density_fraction_field(state, threshold: float) -> np.ndarray:
    """Normal-cell fraction n1/(n1+n2), NaN off the support."""
    n = state.n1 + state.n2
    mask = n > threshold
    mu = np.full(n.shape, np.nan)
    mu[mask] = state.n1[mask] / n[mask]
    return mu


def sup_deviation(mu_field: np.ndarray, mu_star: float) -> float:
    """max |mu - mu*| over the support; errors on empty support."""
    finite = np.isfinite(mu_field)
    if not finite.any():
        raise ValueError("empty support: fraction deviation undefined")
    return float(np.max(np.abs(mu_field[finite] - mu_star)))


def l2n_deviation(mu_field: np.ndarray, mu_star: float, dx: float, n: int) -> float:
    """(dx * sum over support of (mu - mu*)^(2n))^(1/(2n))."""
    if n < 1:
        raise ValueError(f"norm index n must be a positive integer, got {n}")
    finite = np.isfinite(mu_field)
    if not finite.any():
        raise ValueError("empty support: fraction deviation undefined")
    dev = mu_field[finite] - mu_star
    return float((dx * np.sum(dev ** (2 * n))) ** (1.0 / (2 * n)))


def uniform_bound_at(t, initial_sup_dev: float, eq: ReactionEquilibrium):
    """Theoretical sup-deviation envelope A * exp(-decay_rate * t) * dev(0)."""
    return eq.uniform_A * initial_sup_dev * np.exp(-eq.decay_rate * np.asarray(t, dtype=float))


def l2n_condition_and_rate(
    n: int, params: ModelParameters, eq: ReactionEquilibrium, c0: float
) -> tuple[bool, float]:
    """Norm-decay condition and rate for the L^(2n) composition deviation.

    Returns (condition, C) where the condition is
    G(max(c_B, c0)) - D < 2n*K2 and

        C = (-nu*)/(1 - nu*) * K1 + (1/(2n)) * (2n*K2 - G(max(c_B, c0)) + D)

    is the decay rate of the norm when the condition holds. Only defined for
    constant switch rates and nutrient-only growth laws.
    """
    if n < 1:
        raise ValueError(f"norm index n must be a positive integer, got {n}")
    if not isinstance(params.transitions, ConstantTransitions):
        raise ValueError("norm-decay rate is not applicable: switch rates are not constant")
    if isinstance(params.growth, Logistic):
        raise ValueError("norm-decay rate is not applicable: growth depends on crowding")
    K1, K2 = params.transitions.K1, params.transitions.K2
    G_top = eval_growth(params.growth, max(params.c_B, c0))
    condition = (G_top - params.D) < 2 * n * K2
    C = (-eq.nu_star) / (1.0 - eq.nu_star) * K1 + (2 * n * K2 - G_top + params.D) / (2 * n)
    return bool(condition), float(C)


def nutrient_bound_check(
    c: np.ndarray, c_B: float, c0: float, support_mask: np.ndarray, tol: float = 1e-6
) -> tuple[bool, float]:
    """Check c <= max(c_B, c0) + tol on the support.

    Returns (ok, worst overshoot clipped at 0).
    """
    if not support_mask.any():
        return True, 0.0
    bound = max(c_B, c0)
    worst = float(np.max(c[support_mask]) - bound)
    return worst <= tol, max(worst, 0.0)


def total_population(state) -> tuple[float, float]:
    """(total mass, autophagic mass) over the whole grid."""
    dx = state.grid.dx
    return float(dx * np.sum(state.n1 + state.n2)), float(dx * np.sum(state.n2))


@dataclass(frozen=True)
class NormReport:
    sup_dev: float
    l2n_devs: dict[int, float]
    theoretical_sup_bound: float
    theoretical_l2n_rates: dict[int, float]


def norm_report(
    state,
    threshold: float,
    mu_star: float,
    eq: ReactionEquilibrium,
    params: ModelParameters,
    c0: float,
    t: float,
    initial_sup_dev: float,
) -> NormReport:
    mu = density_fraction_field(state, threshold)
    dx = state.grid.dx
    return NormReport(
        sup_dev=sup_deviation(mu, mu_star),
        l2n_devs={n: l2n_deviation(mu, mu_star, dx, n) for n in (1, 2, 4)},
        theoretical_sup_bound=float(uniform_bound_at(t, initial_sup_dev, eq)),
        theoretical_l2n_rates={
            n: l2n_condition_and_rate(n, params, eq, c0)[1] for n in (1, 2, 4)
        },
    )


# ---------------------------------------------------------------------------
# sampled time series (written by the solver loop, serialized by scenarios)

SERIES_CHANNELS = (
    "t",
    "radius",
    "mass_total",
    "mass_autophagic",
    "sup_dev",
    "l2_dev",
    "l4_dev",
    "l8_dev",
    "c_max",
    "neg_mass_clamped",
)


@dataclass
class TimeSeries:
    channels: tuple[str, ...]
    data: np.ndarray  # shape (n_samples, n_channels)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float).reshape(-1, len(self.channels))

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.channels.index(name)]

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(self.channels) + "\n")
            for row in self.data:
                fh.write(",".join("%.17g" % v for v in row) + "\n")
