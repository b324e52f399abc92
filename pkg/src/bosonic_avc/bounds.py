"""Closed-form capacity lower bounds and worst-case jammer search.

Formulas ``nu``, ``epsilon`` and ``delta_lower_bound`` are the published
expressions, evaluated as written. Where a published chain of inequalities
does not hold for the moment-derived channel, the module also exposes what
the channel actually achieves (grid minima) so callers can compare the two;
see :class:`BoundReport`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from .channel import (
    JammerStrategy,
    PowerBudget,
    bpsk_correct_probability,
    symmetrized_correct_probability,
)
from .errors import InvalidParameter
from .special import binary_entropy, erf

EPSILON_CAP = 0.5 - 1e-12
DEFAULT_RESOLUTION = 201
REFINE_FACTOR = 10

Objective = Callable[[np.ndarray, np.ndarray], np.ndarray]


class LowerBound(NamedTuple):
    value: float
    vacuous: bool


def nu(budget: PowerBudget) -> float:
    """``erf((sqrt E - sqrt P) / sqrt(P + 1)) / 4``, unclamped (negative when E < P)."""
    E, P = budget.E, budget.P
    return float(0.25 * erf((np.sqrt(E) - np.sqrt(P)) / np.sqrt(P + 1.0)))


def nu_clamped(budget: PowerBudget) -> float:
    return max(nu(budget), 0.0)


def capacity_lb_direct(budget: PowerBudget) -> LowerBound:
    """Lower bound on the deterministic-code capacity; vacuous unless ``E > P``."""
    if budget.E <= budget.P:
        return LowerBound(0.0, True)
    return LowerBound(nu_clamped(budget), False)


def epsilon(budget: PowerBudget) -> float:
    """``sqrt(E / (pi (1 + P))) * exp(-(sqrt E - sqrt P)^2)``."""
    E, P = budget.E, budget.P
    return float(np.sqrt(E) / np.sqrt(np.pi * (1.0 + P)) * np.exp(-((np.sqrt(E) - np.sqrt(P)) ** 2)))


def epsilon_clamped(budget: PowerBudget) -> float:
    return min(epsilon(budget), EPSILON_CAP)


def capacity_lb_cr(budget: PowerBudget) -> float:
    """``1 - h(1/2 + epsilon)`` with epsilon clamped below 1/2."""
    return float(1.0 - binary_entropy(0.5 + epsilon_clamped(budget)))


def delta_rho_bound(budget: PowerBudget) -> float:
    """``2 sqrt(E(E+2)) / sqrt((1+2E)(P+2E+2))`` as published; may exceed 1."""
    E, P = budget.E, budget.P
    return float(2.0 * np.sqrt(E * (E + 2.0)) / np.sqrt((1.0 + 2.0 * E) * (P + 2.0 * E + 2.0)))


def delta_lower_bound(budget: PowerBudget) -> float:
    """Published worst-case value ``|rho| exp(-|beta|^2 / (2(A+B)(1-rho^2))) / (2 pi)``.

    Substitutes ``|rho| -> delta_rho_bound``, ``A + B -> P/2 + (E+1)/2`` and
    ``|beta|^2 -> P``. Evaluated exactly as written, so it is not clipped
    when the published ``rho`` bound exceeds 1.
    """
    P = budget.P
    rho = delta_rho_bound(budget)
    a_plus_b = 0.5 * P + 0.5 * (budget.E + 1.0)
    one_m = 1.0 - rho * rho
    return float(rho / (2.0 * np.pi) * np.exp(-P / (2.0 * a_plus_b * one_m)))


def delta_certified(budget: PowerBudget) -> float:
    """A lower bound on ``lambda_c`` that holds for every feasible jammer.

    ``lambda_c = 4 |Phi2(t,0,rho) - Phi(t)/2|`` and the gap is bounded below
    by ``|rho| exp(-t^2 / (2(1-rho^2))) / (2 pi)``. In the moment picture
    ``rho^2 = s^2 / (c (c + 1 + 2N))`` and
    ``t^2 / (1-rho^2) = beta^2 / ((N+1/2)/2 + 1/(4c))`` with
    ``c = cosh 2r = 1 + 2E``, ``s = sinh 2r``; both are worst at the
    budget edge, which gives the closed form below.
    """
    E, P = budget.E, budget.P
    c = 1.0 + 2.0 * E
    s = np.sqrt(c * c - 1.0)
    rho_min = s / np.sqrt(c * (c + 1.0 + 2.0 * P))
    exponent = 2.0 * P * c / (c + 1.0)
    return float(4.0 * rho_min / (2.0 * np.pi) * np.exp(-exponent))


def capacity_lb_q(budget: PowerBudget, lambda_c: Optional[float] = None) -> float:
    """``1 - h(lambda_c * eps + (1 - lambda_c)/2)`` with ``lambda_c`` clamped to [0, 1].

    ``lambda_c`` defaults to :func:`delta_lower_bound`.
    """
    lam = delta_lower_bound(budget) if lambda_c is None else lambda_c
    lam = float(np.clip(lam, 0.0, 1.0))
    crossover = lam * epsilon_clamped(budget) + (1.0 - lam) * 0.5
    return float(1.0 - binary_entropy(crossover))


def symmetrization_error_bound(M: int) -> float:
    """Average error forced by the codeword-replay jammer on an ``M``-message code."""
    if M < 1:
        raise InvalidParameter("M must be >= 1")
    return 0.5 - 1.0 / (2.0 * M)


def _jammer_grid(P: float, beta_axis: np.ndarray, frac_axis: np.ndarray):
    beta, frac = np.meshgrid(beta_axis, frac_axis, indexing="ij")
    N = np.clip(frac * (P - beta * beta), 0.0, None)
    return beta, N


def worst_case_jammer(
    objective: Objective,
    P: float,
    resolution: int = DEFAULT_RESOLUTION,
    refine: bool = True,
) -> Tuple[JammerStrategy, float]:
    """Minimise ``objective(beta, N)`` over ``{beta real, N >= 0 : beta^2 + N <= P}``.

    The feasible set is sampled as ``beta`` on ``resolution`` points of
    ``[-sqrt P, sqrt P]`` times ``N = u (P - beta^2)`` for ``u`` on
    ``resolution`` points of ``[0, 1]``. One refinement pass then samples the
    two cells around the incumbent at ten times the resolution. Ties resolve
    to the first grid point in row-major order, so the result is
    deterministic.

    ``objective`` must broadcast over numpy arrays of ``beta`` and ``N``.
    """
    if resolution < 2:
        raise InvalidParameter("grid resolution must be >= 2")
    if not (np.isfinite(P) and P >= 0):
        raise InvalidParameter("P must be a finite non-negative number")
    root = np.sqrt(P)
    beta_axis = np.linspace(-root, root, resolution)
    frac_axis = np.linspace(0.0, 1.0, resolution)
    beta, N = _jammer_grid(P, beta_axis, frac_axis)
    values = np.broadcast_to(np.asarray(objective(beta, N), dtype=float), beta.shape)
    idx = np.unravel_index(int(np.argmin(values)), values.shape)
    best_beta, best_N, best = float(beta[idx]), float(N[idx]), float(values[idx])

    if refine and P > 0:
        step_b = beta_axis[1] - beta_axis[0]
        step_u = frac_axis[1] - frac_axis[0]
        fine = 2 * REFINE_FACTOR + 1
        b0, u0 = beta_axis[idx[0]], frac_axis[idx[1]]
        fine_b = np.clip(np.linspace(b0 - step_b, b0 + step_b, fine), -root, root)
        fine_u = np.clip(np.linspace(u0 - step_u, u0 + step_u, fine), 0.0, 1.0)
        fb, fN = _jammer_grid(P, fine_b, fine_u)
        fvals = np.broadcast_to(np.asarray(objective(fb, fN), dtype=float), fb.shape)
        fidx = np.unravel_index(int(np.argmin(fvals)), fvals.shape)
        if fvals[fidx] < best:
            best_beta, best_N, best = float(fb[fidx]), float(fN[fidx]), float(fvals[fidx])

    return JammerStrategy(best_beta, best_N), best


@dataclass(frozen=True)
class BoundReport:
    """All four capacity witnesses for one ``(E, P)`` pair.

    ``worst_jammers`` maps ``"nu"``, ``"epsilon"`` and ``"delta"`` to the grid
    minimiser of the quantity each bound controls (``P(X>0 | +sqrt E)``, its
    symmetrized version, and ``lambda_c``) together with the attained value.
    """

    E: float
    P: float
    nu: float
    nu_clamped: float
    epsilon: float
    epsilon_clamped: float
    delta: float
    delta_certified: float
    cap_direct: float
    cap_direct_vacuous: bool
    cap_cr: float
    cap_q: float
    worst_jammers: dict

    def to_dict(self) -> dict:
        return {
            "e": self.E,
            "p": self.P,
            "nu": self.nu,
            "nu_clamped": self.nu_clamped,
            "epsilon": self.epsilon,
            "epsilon_clamped": self.epsilon_clamped,
            "delta": self.delta,
            "delta_certified": self.delta_certified,
            "cap_direct": self.cap_direct,
            "cap_direct_vacuous": self.cap_direct_vacuous,
            "cap_cr": self.cap_cr,
            "cap_q_lb": self.cap_q,
            "worst_jammers": {
                name: {**jammer.to_dict(), "value": value}
                for name, (jammer, value) in self.worst_jammers.items()
            },
        }


CSV_COLUMNS = ("e", "p", "nu", "epsilon", "delta", "cap_direct", "cap_cr", "cap_q_lb")


def bound_report(budget: PowerBudget, resolution: int = DEFAULT_RESOLUTION) -> BoundReport:
    from .protocol import lambda_c_values

    E, P = budget.E, budget.P
    direct = capacity_lb_direct(budget)
    worst = {
        "nu": worst_case_jammer(lambda b, n: bpsk_correct_probability(1, E, b, n), P, resolution),
        "epsilon": worst_case_jammer(
            lambda b, n: symmetrized_correct_probability(E, b, n), P, resolution
        ),
        "delta": worst_case_jammer(lambda b, n: lambda_c_values(E, b, n), P, resolution),
    }
    return BoundReport(
        E=E,
        P=P,
        nu=nu(budget),
        nu_clamped=nu_clamped(budget),
        epsilon=epsilon(budget),
        epsilon_clamped=epsilon_clamped(budget),
        delta=delta_lower_bound(budget),
        delta_certified=delta_certified(budget),
        cap_direct=direct.value,
        cap_direct_vacuous=direct.vacuous,
        cap_cr=capacity_lb_cr(budget),
        cap_q=capacity_lb_q(budget),
        worst_jammers=worst,
    )
