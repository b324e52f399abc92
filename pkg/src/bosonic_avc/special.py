"""Scalar special functions and the two inequality checks they support.

Everything here broadcasts over numpy arrays. ``phi2`` is evaluated by
integrating Plackett's identity

    d/drho Phi2(h, k, rho) = phi2_density(h, k, rho)

with fixed-order Gauss-Legendre quadrature. The substitution
``rho' = sin(theta)`` removes the inverse square-root singularity at
``|rho| -> 1``. For ``|rho| <= 0.9`` one 32-point panel integrates from 0
(where the CDF factorises) to ``rho``. Beyond that the integral runs back
from the degenerate limit at ``sign(rho)``. Near that endpoint the
integrand behaves like ``exp(-(h -+ k)^2 / (2 u^2))`` in the distance ``u``,
which switches on at the scale ``|h -+ k|``; 16-point panels graded
geometrically toward the endpoint resolve every such scale.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import special as _sp

from .errors import InvalidParameter

_GL_ORDER = 32
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
# map [-1, 1] -> [0, 1]
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS

RHO_LIMIT = 1.0 - 1e-12
_SWITCH_RHO = 0.9
_INV_2PI = 1.0 / (2.0 * np.pi)


def _graded_rule(order: int = 16, ratio: float = 0.25, levels: int = 12):
    """Composite Gauss-Legendre on [0, 1] with panel edges ``0, ratio^levels, ..., ratio, 1``."""
    x, w = np.polynomial.legendre.leggauss(order)
    x, w = 0.5 * (x + 1.0), 0.5 * w
    edges = np.concatenate([[0.0], ratio ** np.arange(levels, -1, -1, dtype=float)])
    width = np.diff(edges)
    nodes = (edges[:-1, None] + width[:, None] * x[None, :]).ravel()
    weights = (width[:, None] * w[None, :]).ravel()
    return nodes, weights


# nodes measured from the degenerate endpoint, so they crowd towards it
_NEAR_NODES, _NEAR_WEIGHTS = _graded_rule()


def erf(x):
    """Error function ``(2/sqrt(pi)) * int_0^x exp(-t^2) dt``."""
    return _sp.erf(x)


def phi(x):
    """Standard normal cumulative distribution function.

    Written as ``erfc(-x/sqrt(2))/2`` which equals ``(1 + erf(x/sqrt(2)))/2``
    but keeps full relative precision in the lower tail.
    """
    return 0.5 * _sp.erfc(-np.asarray(x, dtype=float) / np.sqrt(2.0))


def _check_rho(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)) or np.any(np.abs(rho) > 1.0):
        raise InvalidParameter("correlation must lie in [-1, 1]")
    return rho


def plackett_derivative(h, k, rho):
    """Partial derivative of ``phi2`` with respect to ``rho``.

    This is the bivariate standard normal density at ``(h, k)``; for
    ``k = 0`` it reduces to ``exp(-h^2 / (2(1-rho^2))) / (2 pi sqrt(1-rho^2))``.
    """
    h = np.asarray(h, dtype=float)
    k = np.asarray(k, dtype=float)
    rho = _check_rho(rho)
    if np.any(np.abs(rho) >= 1.0):
        raise InvalidParameter("Plackett derivative needs |rho| < 1")
    one_m = 1.0 - rho * rho
    return np.exp(-(h * h - 2.0 * rho * h * k + k * k) / (2.0 * one_m)) * (
        _INV_2PI / np.sqrt(one_m)
    )


def _plackett_integral(h, k, theta_from, theta_to, nodes, weights):
    """``int dPhi2/drho`` over ``rho = sin(theta)`` from ``theta_from`` to ``theta_to``."""
    span = theta_to - theta_from
    s = np.sin(theta_from[:, None] + span[:, None] * nodes[None, :])
    c2 = np.maximum(1.0 - s * s, np.finfo(float).tiny)
    hh, kk = h[:, None], k[:, None]
    with np.errstate(over="ignore"):
        integrand = np.exp(-(hh * hh - 2.0 * hh * kk * s + kk * kk) / (2.0 * c2))
    return span * _INV_2PI * (integrand @ weights)


def _plackett_tail(h, k, rho):
    """``|int| dPhi2/drho`` between ``rho`` and ``sign(rho)``, in ``u = pi/2 - |theta|``.

    With ``sigma = sign(rho)`` the exponent is
    ``((h - sigma k)^2 + 4 sigma h k sin^2(u/2)) / (2 sin^2 u)``, which keeps
    full precision as ``u -> 0``.
    """
    sigma = np.sign(rho)
    span = 0.5 * np.pi - np.arcsin(np.abs(rho))
    u = span[:, None] * _NEAR_NODES[None, :]
    hh, kk, ss = h[:, None], k[:, None], sigma[:, None]
    diff = hh - ss * kk
    half = np.sin(0.5 * u)
    num = diff * diff + 4.0 * ss * hh * kk * half * half
    den = 2.0 * np.maximum(np.sin(u) ** 2, np.finfo(float).tiny)
    with np.errstate(over="ignore"):
        integrand = np.exp(-num / den)
    return span * _INV_2PI * (integrand @ _NEAR_WEIGHTS)


def phi2(h, k, rho):
    """Bivariate standard normal CDF ``P(X <= h, Y <= k)`` with correlation ``rho``.

    Args:
        h, k: Upper integration limits; may be ``+-inf``.
        rho: Correlation in ``[-1, 1]``. For ``|rho| > 1 - 1e-12`` the
            degenerate limits ``min(Phi(h), Phi(k))`` (rho -> 1) and
            ``max(0, Phi(h) + Phi(k) - 1)`` (rho -> -1) are returned.

    Returns:
        Array (or float) broadcast over the inputs, absolute error below 1e-10.
    """
    h, k, rho = np.broadcast_arrays(
        np.asarray(h, dtype=float), np.asarray(k, dtype=float), _check_rho(rho)
    )
    ph, pk = phi(h), phi(k)
    out = ph * pk

    upper = rho > RHO_LIMIT
    lower = rho < -RHO_LIMIT
    out = np.where(upper, np.minimum(ph, pk), out)
    out = np.where(lower, np.maximum(0.0, ph + pk - 1.0), out)

    inner = ~(upper | lower) & (rho != 0.0) & np.isfinite(h) & np.isfinite(k)
    if np.any(inner):
        out = out.copy()
        hi, ki, ri = h[inner], k[inner], rho[inner]
        pi_, pk_ = ph[inner], pk[inner]
        near = np.abs(ri) > _SWITCH_RHO
        value = np.empty_like(ri)
        far = ~near
        value[far] = pi_[far] * pk_[far] + _plackett_integral(
            hi[far], ki[far], np.zeros(np.count_nonzero(far)), np.arcsin(ri[far]), _GL_NODES, _GL_WEIGHTS
        )
        if np.any(near):
            hn, kn, rn = hi[near], ki[near], ri[near]
            limit = np.where(
                rn > 0,
                np.minimum(pi_[near], pk_[near]),
                np.maximum(0.0, pi_[near] + pk_[near] - 1.0),
            )
            value[near] = limit - np.sign(rn) * _plackett_tail(hn, kn, rn)
        out[inner] = value

    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def binary_entropy(p):
    """Binary entropy in bits with ``0 log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    if np.any((p < 0.0) | (p > 1.0)) or np.any(np.isnan(p)):
        raise InvalidParameter("binary_entropy needs p in [0, 1]")
    out = -(_sp.xlogy(p, p) + _sp.xlogy(1.0 - p, 1.0 - p)) / np.log(2.0)
    return out[()] if out.ndim == 0 else out


def quadrant_det(q: np.ndarray) -> float:
    """``q(1,1) q(-1,-1) - q(1,-1) q(-1,1)`` for a 2x2 table indexed ``[-1, +1]``."""
    q = np.asarray(q, dtype=float)
    return float(q[1, 1] * q[0, 0] - q[1, 0] * q[0, 1])


@dataclass(frozen=True)
class LemmaReport:
    name: str
    evaluations: int
    violations: int
    max_violation: float
    min_slack: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "lemma": self.name,
            "evaluations": self.evaluations,
            "violations": self.violations,
            "max_violation": self.max_violation,
            "min_slack": self.min_slack,
            "passed": self.passed,
        }


def verify_lemma_l1_det(
    trials: int = 100_000, rng: Optional[np.random.Generator] = None, tol: float = 1e-12
) -> LemmaReport:
    """Check ``||p - q||_1 >= |det q|`` for random ``q`` and product ``p = v (x) w``.

    Half of the product distributions are drawn independently of ``q``; the
    other half are the product of ``q``'s own marginals, which is usually the
    closest product and therefore the hardest case.
    """
    if trials < 1:
        raise InvalidParameter("trials must be >= 1")
    rng = np.random.default_rng(0) if rng is None else rng
    q = rng.dirichlet(np.ones(4), size=trials).reshape(trials, 2, 2)
    v = rng.uniform(size=trials)
    w = rng.uniform(size=trials)
    own = np.arange(trials) % 2 == 1
    v = np.where(own, q[:, 0, :].sum(axis=1), v)
    w = np.where(own, q[:, :, 0].sum(axis=1), w)
    va = np.stack([v, 1.0 - v], axis=1)
    wa = np.stack([w, 1.0 - w], axis=1)
    p = va[:, :, None] * wa[:, None, :]

    l1 = np.abs(p - q).sum(axis=(1, 2))
    det = np.abs(q[:, 1, 1] * q[:, 0, 0] - q[:, 1, 0] * q[:, 0, 1])
    slack = l1 + tol - det
    return LemmaReport(
        name="l1det",
        evaluations=trials,
        violations=int(np.count_nonzero(slack < 0.0)),
        max_violation=float(np.max(-slack)),
        min_slack=float(np.min(l1 - det)),
    )


def plackett_gap(t, rho):
    """``|Phi2(t, 0, rho) - Phi(t)/2|`` together with its lower bound.

    Returns:
        ``(gap, bound)`` where ``bound = |rho| exp(-t^2 / (2(1-rho^2))) / (2 pi)``.
    """
    t = np.asarray(t, dtype=float)
    rho = _check_rho(rho)
    gap = np.abs(phi2(t, 0.0, rho) - 0.5 * phi(t))
    bound = np.abs(rho) * _INV_2PI * np.exp(-t * t / (2.0 * (1.0 - rho * rho)))
    return gap, bound


def verify_lemma_plackett(
    t_grid: Optional[Sequence[float]] = None,
    rho_grid: Optional[Sequence[float]] = None,
    tol: float = 1e-12,
) -> LemmaReport:
    """Sweep ``|Phi2(t,0,rho) - Phi(t)/2| >= |rho| exp(-t^2/(2(1-rho^2)))/(2 pi)``.

    Defaults: ``t`` in [-4, 4] step 0.1 and ``rho`` in [-0.99, 0.99] step 0.01.
    """
    t = np.round(np.arange(-40, 41) * 0.1, 12) if t_grid is None else np.asarray(t_grid, float)
    r = np.round(np.arange(-99, 100) * 0.01, 12) if rho_grid is None else np.asarray(rho_grid, float)
    if np.any(np.abs(r) > 0.999):
        raise InvalidParameter("Plackett sweep requires |rho| <= 0.999")
    tt, rr = np.meshgrid(t, r, indexing="ij")
    gap, bound = plackett_gap(tt, rr)
    slack = gap - bound
    return LemmaReport(
        name="plackett",
        evaluations=int(slack.size),
        violations=int(np.count_nonzero(slack + tol < 0.0)),
        max_violation=float(np.max(-(slack + tol))),
        min_slack=float(np.min(slack)),
    )
