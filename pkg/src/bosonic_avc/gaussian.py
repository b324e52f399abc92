"""First and second moments of the Gaussian states used by the channel model.

Conventions (used by every module and every matrix literal in the tests):

* quadratures are interleaved ``(x_0, p_0, x_1, p_1, ...)``;
* the vacuum covariance is ``I/2`` (hbar = 1);
* a coherent amplitude ``alpha`` has mean ``sqrt(2) * (Re alpha, Im alpha)``;
* modes are indexed from 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .errors import DegenerateCovariance, InvalidParameter

SYMMETRY_TOL = 1e-12
VACUUM_VARIANCE = 0.5


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of an ``m``-mode Gaussian state."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(-1)
        cov = np.array(self.cov, dtype=float)
        if mean.size == 0 or mean.size % 2:
            raise InvalidParameter(f"mean must have even positive length, got {mean.size}")
        if cov.shape != (mean.size, mean.size):
            raise InvalidParameter(
                f"cov shape {cov.shape} does not match mean length {mean.size}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidParameter("moments must be finite")
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL:
            raise InvalidParameter("covariance matrix is not symmetric")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def mode_count(self) -> int:
        return self.mean.size // 2

    def mode_mean(self, mode: int) -> np.ndarray:
        i = _check_mode(mode, self.mode_count)
        return self.mean[2 * i : 2 * i + 2]

    def mode_cov(self, mode: int) -> np.ndarray:
        i = _check_mode(mode, self.mode_count)
        return self.cov[2 * i : 2 * i + 2, 2 * i : 2 * i + 2]

    def mean_photon_number(self) -> float:
        """Total ``sum_i (tr V_i / 2 - 1/2) + |mean|^2 / 2`` over all modes."""
        diag = np.trace(self.cov) / 2.0 - 0.5 * self.mode_count
        return float(diag + self.mean @ self.mean / 2.0)

    def satisfies_uncertainty(self, tol: float = 1e-10) -> bool:
        """Check ``cov + (i/2) Omega >= 0``."""
        herm = self.cov + 0.5j * symplectic_form(self.mode_count)
        return bool(np.min(np.linalg.eigvalsh(herm)) >= -tol)

    def allclose(self, other: "GaussianState", atol: float = 1e-12) -> bool:
        return (
            self.mean.shape == other.mean.shape
            and np.allclose(self.mean, other.mean, atol=atol, rtol=0)
            and np.allclose(self.cov, other.cov, atol=atol, rtol=0)
        )

    def __repr__(self) -> str:
        return f"GaussianState(modes={self.mode_count}, mean={self.mean!r})"


@dataclass(frozen=True)
class UnivariateGaussian:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not self.variance > 0:
            raise InvalidParameter("variance must be positive")

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return np.exp(-0.5 * z * z) / (self.std * np.sqrt(2.0 * np.pi))

    def cdf(self, x):
        from .special import phi

        return phi((np.asarray(x, dtype=float) - self.mean) / self.std)

    def prob_positive(self) -> float:
        from .special import phi

        return float(phi(self.mean / self.std))


@dataclass(frozen=True, eq=False)
class BivariateGaussian:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self) -> None:
        mean = np.array(self.mean, dtype=float).reshape(2)
        cov = np.array(self.cov, dtype=float).reshape(2, 2)
        if not np.linalg.det(cov) > 0:
            raise InvalidParameter("bivariate covariance must be positive definite")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def correlation(self) -> float:
        return float(self.cov[0, 1] / np.sqrt(self.cov[0, 0] * self.cov[1, 1]))

    @property
    def inverse_cov(self) -> np.ndarray:
        return np.linalg.inv(self.cov)


def _check_mode(mode: int, mode_count: int) -> int:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < mode_count:
        raise InvalidParameter(f"mode index {mode!r} out of range for {mode_count} modes")
    return int(mode)


def _quadrature_rows(modes: Sequence[int]) -> np.ndarray:
    return np.array([[2 * m, 2 * m + 1] for m in modes], dtype=int).reshape(-1)


def symplectic_form(mode_count: int) -> np.ndarray:
    """Block-diagonal ``Omega`` with blocks ``[[0, 1], [-1, 0]]``."""
    return np.kron(np.eye(mode_count), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def vacuum(mode_count: int = 1) -> GaussianState:
    return GaussianState(np.zeros(2 * mode_count), VACUUM_VARIANCE * np.eye(2 * mode_count))


def make_displaced_thermal(alpha: complex, N: float) -> GaussianState:
    """Displaced thermal state ``S_N(alpha)``: mean ``sqrt(2)(Re a, Im a)``, cov ``(N+1/2) I``."""
    if not np.isfinite(N) or N < 0:
        raise InvalidParameter(f"thermal photon number must be >= 0, got {N}")
    alpha = complex(alpha)
    if not np.isfinite(alpha):
        raise InvalidParameter("amplitude must be finite")
    mean = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(mean, (N + 0.5) * np.eye(2))


def make_coherent(alpha: complex) -> GaussianState:
    return make_displaced_thermal(alpha, 0.0)


def make_tmsv(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing ``r``.

    ``cov = 1/2 [[cosh 2r I, sinh 2r Z], [sinh 2r Z, cosh 2r I]]`` with ``Z = diag(1, -1)``.
    """
    if not np.isfinite(r):
        raise InvalidParameter("squeezing parameter must be finite")
    z = np.diag([1.0, -1.0])
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    cov = 0.5 * np.block([[c * np.eye(2), s * z], [s * z, c * np.eye(2)]])
    return GaussianState(np.zeros(4), cov)


def tmsv_squeezing_for_energy(E: float) -> float:
    """Squeezing ``r`` whose marginal has ``E`` thermal photons, i.e. ``cosh 2r = 1 + 2E``."""
    if not np.isfinite(E) or E < 0:
        raise InvalidParameter("energy must be >= 0")
    return float(0.5 * np.arccosh(1.0 + 2.0 * E))


def make_classically_correlated_thermal(N: float) -> GaussianState:
    """Two modes sharing one random displacement: ``int p(a) |a/sqrt2><a/sqrt2|^(x)2 da``.

    ``a`` is complex Gaussian with ``E|a|^2 = 2N``, so each mode carries a
    displacement of variance ``N`` per quadrature on top of the vacuum and
    both modes carry the same one. The result is
    ``[[(N+1/2) I, N I], [N I, (N+1/2) I]]``.
    """
    if not np.isfinite(N) or N < 0:
        raise InvalidParameter(f"thermal photon number must be >= 0, got {N}")
    cov = np.block(
        [[(N + 0.5) * np.eye(2), N * np.eye(2)], [N * np.eye(2), (N + 0.5) * np.eye(2)]]
    )
    return GaussianState(np.zeros(4), cov)


def tensor_product(*states: GaussianState) -> GaussianState:
    if not states:
        raise InvalidParameter("tensor_product needs at least one state")
    mean = np.concatenate([s.mean for s in states])
    size = mean.size
    cov = np.zeros((size, size))
    offset = 0
    for s in states:
        n = s.mean.size
        cov[offset : offset + n, offset : offset + n] = s.cov
        offset += n
    return GaussianState(mean, cov)


def beam_splitter_matrix(
    mode_count: int, mode_a: int, mode_b: int, transmissivity: float = 0.5
) -> np.ndarray:
    """Symplectic matrix of a beam splitter between two modes.

    On the ``(a, b)`` block it is ``[[cos t I, sin t I], [-sin t I, cos t I]]``
    with ``cos^2 t = transmissivity``; at 1/2 this is ``(1/sqrt2)[[I, I], [-I, I]]``,
    so output ``a`` carries ``(in_a + in_b)/sqrt2``.
    """
    a = _check_mode(mode_a, mode_count)
    b = _check_mode(mode_b, mode_count)
    if a == b:
        raise InvalidParameter("beam splitter needs two distinct modes")
    if not 0.0 <= transmissivity <= 1.0:
        raise InvalidParameter(f"transmissivity must lie in [0, 1], got {transmissivity}")
    c, s = np.sqrt(transmissivity), np.sqrt(1.0 - transmissivity)
    S = np.eye(2 * mode_count)
    ia, ib = slice(2 * a, 2 * a + 2), slice(2 * b, 2 * b + 2)
    eye = np.eye(2)
    S[ia, ia] = c * eye
    S[ia, ib] = s * eye
    S[ib, ia] = -s * eye
    S[ib, ib] = c * eye
    return S


def apply_symplectic(state: GaussianState, S: np.ndarray) -> GaussianState:
    cov = S @ state.cov @ S.T
    # re-symmetrise: rounding in the triple product leaves ~1e-17 asymmetry
    return GaussianState(S @ state.mean, 0.5 * (cov + cov.T))


def apply_beam_splitter(
    state: GaussianState, mode_a: int, mode_b: int, transmissivity: float = 0.5
) -> GaussianState:
    S = beam_splitter_matrix(state.mode_count, mode_a, mode_b, transmissivity)
    return apply_symplectic(state, S)


def partial_trace(state: GaussianState, keep: Iterable[int]) -> GaussianState:
    """Restrict the moments to the modes in ``keep`` (in the given order)."""
    keep = list(keep)
    if not keep:
        raise InvalidParameter("keep must name at least one mode")
    if len(set(keep)) != len(keep):
        raise InvalidParameter("keep contains duplicate modes")
    for m in keep:
        _check_mode(m, state.mode_count)
    rows = _quadrature_rows(keep)
    return GaussianState(state.mean[rows], state.cov[np.ix_(rows, rows)])


def homodyne_x_joint(
    state: GaussianState, modes: Union[int, Sequence[int]]
) -> Union[UnivariateGaussian, BivariateGaussian]:
    """Joint law of the x-quadrature outcomes on one or two modes."""
    modes = [modes] if isinstance(modes, (int, np.integer)) else list(modes)
    if len(modes) not in (1, 2):
        raise InvalidParameter("homodyne_x_joint supports one or two modes")
    for m in modes:
        _check_mode(m, state.mode_count)
    rows = np.array([2 * m for m in modes])
    mean = state.mean[rows]
    cov = state.cov[np.ix_(rows, rows)]
    if len(modes) == 1:
        return UnivariateGaussian(float(mean[0]), float(cov[0, 0]))
    return BivariateGaussian(mean, cov)


def sample_homodyne(
    state: GaussianState,
    modes: Union[int, Sequence[int]],
    rng: np.random.Generator,
    size: Optional[int] = None,
) -> np.ndarray:
    """Draw x-quadrature outcomes from :func:`homodyne_x_joint`.

    Returns shape ``(k,)`` for ``size=None`` and ``(size, k)`` otherwise,
    where ``k`` is the number of modes.
    """
    law = homodyne_x_joint(state, modes)
    if isinstance(law, UnivariateGaussian):
        mean, cov = np.array([law.mean]), np.array([[law.variance]])
    else:
        mean, cov = law.mean, law.cov
    if np.min(np.linalg.eigvalsh(cov)) < 1e-12:
        raise DegenerateCovariance("homodyne covariance is numerically singular")
    chol = np.linalg.cholesky(cov)
    shape = (mean.size,) if size is None else (size, mean.size)
    z = rng.standard_normal(shape)
    return mean + z @ chol.T
