"""Correlation distillation from jammed two-mode resources.

The sender prepares a correlated two-mode state (a TMSV or the classically
correlated ``S_N^(2)``), sends one mode through the jammed channel and keeps
the other. Both parties measure x and keep the sign. The resulting joint law
of ``(receiver bit, sender bit)`` is a :class:`QuadrantDistribution`.

Bits live in ``{-1, +1}``. Tables are indexed ``[0] <-> -1`` and
``[1] <-> +1``; XOR uses the map ``-1 -> 0``, ``+1 -> 1`` (see :func:`xor_pm`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from . import gaussian as g
from .bounds import DEFAULT_RESOLUTION, worst_case_jammer
from .channel import JammerStrategy, PowerBudget, channel_output, jammed_x_moments
from .errors import InvalidParameter
from .special import phi, phi2

RESOURCES = ("tmsv", "classical")
SUM_TOL = 1e-10
TRIANGLE_TOL = 1e-9


def xor_pm(a, b):
    """XOR on ``{-1, +1}`` under ``-1 -> 0``, ``+1 -> 1``."""
    return -np.asarray(a) * np.asarray(b)


def correlation_resource(E: float, resource: str = "tmsv") -> g.GaussianState:
    """Two-mode state whose transmitted marginal holds ``E`` thermal photons."""
    if resource == "tmsv":
        return g.make_tmsv(g.tmsv_squeezing_for_energy(E))
    if resource == "classical":
        return g.make_classically_correlated_thermal(E)
    raise InvalidParameter(f"unknown resource {resource!r}; expected one of {RESOURCES}")


@dataclass(frozen=True, eq=False)
class QuadrantDistribution:
    """Joint law of ``(receiver bit, sender bit)``; ``probs[i, j]`` for bits ``(2i-1, 2j-1)``."""

    probs: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        probs = np.array(self.probs, dtype=float).reshape(2, 2)
        if np.any(probs < -SUM_TOL):
            raise InvalidParameter("quadrant probabilities must be non-negative")
        if abs(probs.sum() - 1.0) > SUM_TOL:
            raise InvalidParameter(f"quadrant probabilities sum to {probs.sum()!r}, not 1")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def __call__(self, u: int, v: int) -> float:
        return float(self.probs[(u + 1) // 2, (v + 1) // 2])

    @property
    def det(self) -> float:
        p = self.probs
        return float(p[1, 1] * p[0, 0] - p[1, 0] * p[0, 1])

    def as_vector(self) -> np.ndarray:
        """Order ``(-1,-1), (-1,1), (1,-1), (1,1)``."""
        return self.probs.reshape(-1).copy()

    def to_dict(self) -> dict:
        return {
            "q_mm": self(-1, -1),
            "q_mp": self(-1, 1),
            "q_pm": self(1, -1),
            "q_pp": self(1, 1),
            "provenance": self.provenance,
        }


@dataclass(frozen=True, eq=False)
class BinaryChannel:
    """``w[x, y]`` = probability of output ``y`` given input ``x`` (indices as bits)."""

    w: np.ndarray

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=float).reshape(2, 2)
        if np.any(w < 0) or np.any(np.abs(w.sum(axis=1) - 1.0) > 1e-12):
            raise InvalidParameter("rows of a binary channel must be distributions")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)

    @classmethod
    def bsc(cls, p: float) -> "BinaryChannel":
        return cls([[1.0 - p, p], [p, 1.0 - p]])

    @property
    def crossover(self) -> float:
        """Input-averaged flip probability ``(w(1|-1) + w(-1|1)) / 2``."""
        return float(0.5 * (self.w[0, 1] + self.w[1, 0]))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return abs(self.w[0, 0] - self.w[1, 1]) <= tol

    def allclose(self, other: "BinaryChannel", atol: float = 1e-10) -> bool:
        return bool(np.allclose(self.w, other.w, atol=atol, rtol=0))


@dataclass(frozen=True)
class SimplexDecomposition:
    lambda_c: float
    lambda_minus: float
    lambda_plus: float
    residual: float

    @property
    def in_triangle(self) -> bool:
        return self.residual <= TRIANGLE_TOL and min(
            self.lambda_c, self.lambda_minus, self.lambda_plus
        ) >= -TRIANGLE_TOL

    def to_dict(self) -> dict:
        return {
            "lambda_c": self.lambda_c,
            "lambda_minus": self.lambda_minus,
            "lambda_plus": self.lambda_plus,
            "residual": self.residual,
            "in_triangle": self.in_triangle,
        }


# vertices of the triangle, as vectors in QuadrantDistribution.as_vector order
Q_CORRELATED = np.array([0.5, 0.0, 0.0, 0.5])
Q_MINUS = np.array([0.5, 0.5, 0.0, 0.0])
Q_PLUS = np.array([0.0, 0.0, 0.5, 0.5])
_VERTICES = np.stack([Q_CORRELATED, Q_MINUS, Q_PLUS], axis=1)
# least-squares solve is a fixed linear map of q
_LSTSQ = np.linalg.pinv(_VERTICES)
# lambda_c as a linear functional of the quadrant vector
LAMBDA_C_WEIGHTS = _LSTSQ[0].copy()


def joint_sign_law(E: float, jammer: JammerStrategy, resource: str = "tmsv") -> g.BivariateGaussian:
    """Law of ``(receiver x, sender x)`` after one jammed transmission."""
    out = channel_output(correlation_resource(E, resource), jammer.state(), transmit_mode=0)
    return g.homodyne_x_joint(out, [0, 1])


def _sign_statistics(E: float, beta, N, resource: str):
    means, covs = jammed_x_moments(correlation_resource(E, resource), beta, N, transmit_mode=0)
    var_r = covs[..., 0, 0]
    rho = covs[..., 0, 1] / np.sqrt(var_r * covs[..., 1, 1])
    t = -means[..., 0] / np.sqrt(var_r)
    return t, rho


def quadrant_probabilities(E: float, beta, N, resource: str = "tmsv"):
    """``(q(-1,-1), s)`` with ``s = P(receiver bit = -1)``; broadcasts over jammer grids."""
    t, rho = _sign_statistics(E, beta, N, resource)
    return phi2(t, 0.0, rho), phi(t)


def lambda_c_values(E: float, beta, N, resource: str = "tmsv"):
    """Weight on the correlated vertex, ``4 q(-1,-1) - 2 s``; broadcasts."""
    q, s = quadrant_probabilities(E, beta, N, resource)
    return 4.0 * q - 2.0 * s


def quadrant_distribution(
    E: float,
    jammer: JammerStrategy,
    resource: str = "tmsv",
    budget: Optional[PowerBudget] = None,
) -> QuadrantDistribution:
    """Quadrant law of the sign bits under ``jammer``.

    ``q(-1,-1) = Phi2(t, 0, rho)``, ``q(-1,1) = Phi(t) - q(-1,-1)``,
    ``q(1,-1) = 1/2 - q(-1,-1)`` and the rest by normalisation, where
    ``t = -Re(beta)/sigma_receiver`` and ``rho`` is the receiver/sender
    correlation of the x outcomes. Only ``Re beta`` enters.
    """
    if not (np.isfinite(E) and E > 0):
        raise InvalidParameter("E must be positive")
    if budget is not None:
        jammer.validate(budget)
    q, s = quadrant_probabilities(E, jammer.beta, jammer.N, resource)
    q, s = float(q), float(s)
    probs = np.array([[q, s - q], [0.5 - q, 0.5 - s + q]])
    return QuadrantDistribution(
        probs,
        provenance={"resource": resource, "E": E, "jammer": jammer.to_dict()},
    )


def decompose_on_triangle(q: QuadrantDistribution) -> SimplexDecomposition:
    """Least-squares weights on ``q_c``, ``delta_-1 (x) pi`` and ``delta_1 (x) pi``."""
    vec = q.as_vector()
    lam = _LSTSQ @ vec
    residual = float(np.linalg.norm(_VERTICES @ lam - vec))
    return SimplexDecomposition(float(lam[0]), float(lam[1]), float(lam[2]), residual)


def lambda_c_worst_case(
    E: float, P: float, resolution: int = DEFAULT_RESOLUTION, resource: str = "tmsv"
) -> Tuple[JammerStrategy, float]:
    """Grid minimum of ``lambda_c`` over jammers with ``|beta|^2 + N <= P``."""
    if not (np.isfinite(E) and E > 0):
        raise InvalidParameter("E must be positive")
    return worst_case_jammer(lambda b, n: lambda_c_values(E, b, n, resource), P, resolution)


def symmetrize_with_cr(w: BinaryChannel) -> BinaryChannel:
    """``w_c(y|x) = (1/2) sum_u w(y xor u | x xor u)``; always a BSC."""
    m = w.w
    return BinaryChannel(0.5 * (m + m[::-1, ::-1]))


def scramble_uncorrelated(w: BinaryChannel) -> BinaryChannel:
    """Output XORed with an independent uniform bit: BSC(1/2) for any ``w``."""
    m = w.w
    return BinaryChannel(0.5 * (m + m[:, ::-1]))


def effective_channel(w: BinaryChannel, q: QuadrantDistribution) -> BinaryChannel:
    """``sum_{x', y'} w(y xor y' | x xor x') q(x', y')``.

    The first coordinate of ``q`` scrambles the input and the second the
    output. For ``q`` in the triangle (uniform second marginal) this equals
    ``lambda_c * symmetrize_with_cr(w) + (1 - lambda_c) * BSC(1/2)``.
    """
    m, p = w.w, q.probs
    out = np.zeros((2, 2))
    for a in range(2):
        for b in range(2):
            shifted = m[np.ix_([x ^ a for x in range(2)], [y ^ b for y in range(2)])]
            out += p[a, b] * shifted
    return BinaryChannel(out)


def physical_effective_channel(w: BinaryChannel, q: QuadrantDistribution) -> BinaryChannel:
    """Channel seen when the sender XORs its own bit into the input and the receiver
    XORs its bit into the output.

    The sender's bit is ``q``'s second coordinate and is uniform, the
    receiver's bit may be biased by the jammer. The input-averaged crossover
    matches :func:`effective_channel` for ``q`` in the triangle; the two
    channels coincide when ``w`` is symmetric.
    """
    m, p = w.w, q.probs
    out = np.zeros((2, 2))
    for kr in range(2):
        for ks in range(2):
            shifted = m[np.ix_([x ^ ks for x in range(2)], [y ^ kr for y in range(2)])]
            out += p[kr, ks] * shifted
    return BinaryChannel(out)


def effective_crossover(lambda_c: float, p: float) -> float:
    """Flip probability ``lambda_c p + (1 - lambda_c)/2`` of the mixed BSC."""
    return lambda_c * p + (1.0 - lambda_c) * 0.5
