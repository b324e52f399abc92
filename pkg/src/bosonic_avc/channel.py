"""The jammed bosonic channel: sender and jammer mixed on a 50:50 beam splitter.

The jammer's mode is placed first and the sender's transmitted mode second;
the splitter ``(1/sqrt2)[[I, I], [-I, I]]`` sends ``(jammer + sender)/sqrt2``
to the receiver port (mode 0 of the output) and the other port is traced
out. Any modes the sender keeps (a TMSV idler, say) follow the receiver port
in their original order.

All output laws are computed from these moments. The receiver's x-outcome
for a coherent input ``a`` and jammer ``S_N(beta)`` is normal with mean
``Re a + Re beta`` and variance ``(N + 1)/2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from . import gaussian as g
from .errors import InfeasibleAttack, InfeasibleJammer, InvalidParameter
from .special import phi

FEASIBILITY_TOL = 1e-12


@dataclass(frozen=True)
class PowerBudget:
    """Per-symbol energy limits: ``E`` for the sender, ``P`` for the jammer."""

    E: float
    P: float

    def __post_init__(self) -> None:
        for name in ("E", "P"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidParameter(f"{name} must be a positive finite number, got {value}")


@dataclass(frozen=True)
class JammerStrategy:
    """One jamming symbol ``S_N(beta)``."""

    beta: complex = 0.0
    N: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "beta", complex(self.beta))
        if not np.isfinite(self.beta):
            raise InvalidParameter("jammer amplitude must be finite")
        if not (np.isfinite(self.N) and self.N >= 0):
            raise InvalidParameter(f"jammer thermal photon number must be >= 0, got {self.N}")

    @property
    def energy(self) -> float:
        return abs(self.beta) ** 2 + self.N

    def is_feasible(self, P: float) -> bool:
        return self.energy <= P + FEASIBILITY_TOL

    def validate(self, budget: PowerBudget) -> "JammerStrategy":
        if not self.is_feasible(budget.P):
            raise InfeasibleJammer(
                f"|beta|^2 + N = {self.energy:.6g} exceeds jammer budget P = {budget.P:.6g}"
            )
        return self

    def state(self) -> g.GaussianState:
        return g.make_displaced_thermal(self.beta, self.N)

    def reflected(self) -> "JammerStrategy":
        """The jammer after a phase rotation by pi (``beta -> -beta``)."""
        return JammerStrategy(-self.beta, self.N)

    def to_dict(self) -> dict:
        return {"beta_re": self.beta.real, "beta_im": self.beta.imag, "N": self.N}


@dataclass(frozen=True)
class SenderSymbol:
    """A letter of the sender's alphabet.

    ``coherent_bpsk`` and ``displaced_thermal`` are single-mode states
    ``S_N(alpha)``. ``tmsv_half`` transmits one half of a TMSV whose marginal
    holds ``E`` photons and keeps the other half (mode 1 of :meth:`state`).
    """

    kind: str
    alpha: complex = 0.0
    N: float = 0.0
    r: float = 0.0

    KINDS = ("coherent_bpsk", "displaced_thermal", "tmsv_half")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise InvalidParameter(f"unknown sender symbol kind {self.kind!r}")
        object.__setattr__(self, "alpha", complex(self.alpha))

    @classmethod
    def coherent_bpsk(cls, sign: int, E: float) -> "SenderSymbol":
        if sign not in (-1, 1):
            raise InvalidParameter("BPSK sign must be -1 or +1")
        return cls("coherent_bpsk", alpha=sign * np.sqrt(E))

    @classmethod
    def displaced_thermal(cls, alpha: complex, N: float) -> "SenderSymbol":
        return cls("displaced_thermal", alpha=alpha, N=N)

    @classmethod
    def tmsv_half(cls, E: float) -> "SenderSymbol":
        return cls("tmsv_half", r=g.tmsv_squeezing_for_energy(E))

    @property
    def energy(self) -> float:
        """Mean photon number of the transmitted mode."""
        if self.kind == "tmsv_half":
            return float(np.sinh(self.r) ** 2)
        return abs(self.alpha) ** 2 + self.N

    def validate(self, budget: PowerBudget) -> "SenderSymbol":
        if self.energy > budget.E + FEASIBILITY_TOL:
            raise InvalidParameter(
                f"sender energy {self.energy:.6g} exceeds budget E = {budget.E:.6g}"
            )
        return self

    def state(self) -> g.GaussianState:
        if self.kind == "tmsv_half":
            return g.make_tmsv(self.r)
        return g.make_displaced_thermal(self.alpha, self.N)

    def as_jammer(self) -> JammerStrategy:
        """The single-mode state a jammer would send to imitate this symbol."""
        if self.kind == "tmsv_half":
            return JammerStrategy(0.0, self.energy)
        return JammerStrategy(self.alpha, self.N)


def channel_output(
    sender: g.GaussianState, jammer: g.GaussianState, transmit_mode: int = 0
) -> g.GaussianState:
    """Receiver-side state after mixing ``jammer`` with one of the sender's modes.

    Returns a state whose mode 0 is the receiver port; remaining modes are
    the sender's untransmitted modes in their original order.
    """
    if jammer.mode_count != 1:
        raise InvalidParameter("the jammer must supply exactly one mode")
    if not 0 <= transmit_mode < sender.mode_count:
        raise InvalidParameter(
            f"transmit_mode {transmit_mode} out of range for a {sender.mode_count}-mode sender"
        )
    joint = g.tensor_product(jammer, sender)
    mixed = g.apply_beam_splitter(joint, 0, 1 + transmit_mode, 0.5)
    retained = [1 + i for i in range(sender.mode_count) if i != transmit_mode]
    return g.partial_trace(mixed, [0] + retained)


def jammed_x_moments(
    sender: g.GaussianState, beta, N, transmit_mode: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Batched x-quadrature moments of :func:`channel_output` over jammer grids.

    The output moments are affine in the jammer's mean and in ``N``, so they
    are assembled from the same beam-splitter matrix that
    :func:`channel_output` uses.

    Returns:
        ``(means, covs)`` with shapes ``batch + (k,)`` and ``batch + (k, k)``
        where ``k`` is the number of output modes.
    """
    beta = np.asarray(beta, dtype=complex)
    N = np.asarray(N, dtype=float)
    beta, N = np.broadcast_arrays(beta, N)
    base = channel_output(sender, g.vacuum(1), transmit_mode)
    S = g.beam_splitter_matrix(1 + sender.mode_count, 0, 1 + transmit_mode, 0.5)
    kept = [0] + [1 + i for i in range(sender.mode_count) if i != transmit_mode]
    xrows = np.array([2 * m for m in kept])
    S_x = S[xrows][:, 0:2]  # response of kept x-rows to the jammer quadratures
    mean_re = S_x[:, 0] * np.sqrt(2.0)
    mean_im = S_x[:, 1] * np.sqrt(2.0)
    dcov = S_x @ S_x.T

    base_x = np.arange(base.mode_count) * 2
    base_mean = base.mean[base_x]
    base_cov = base.cov[np.ix_(base_x, base_x)]
    means = base_mean + beta.real[..., None] * mean_re + beta.imag[..., None] * mean_im
    covs = base_cov + N[..., None, None] * dcov
    return means, covs


def bpsk_homodyne_density(
    sign: int, budget: PowerBudget, jammer: JammerStrategy
) -> g.UnivariateGaussian:
    """Law of the receiver's x-outcome when the sender transmits ``sign * sqrt(E)``."""
    jammer.validate(budget)
    sender = SenderSymbol.coherent_bpsk(sign, budget.E)
    out = channel_output(sender.state(), jammer.state())
    return g.homodyne_x_joint(out, 0)


def bpsk_correct_probability(sign: int, E: float, beta, N):
    """``P(sign * X > 0)`` for a BPSK symbol; broadcasts over jammer grids."""
    sender = SenderSymbol.coherent_bpsk(sign, E).state()
    means, covs = jammed_x_moments(sender, beta, N)
    return phi(sign * means[..., 0] / np.sqrt(covs[..., 0, 0]))


def bpsk_average_correct_probability(E: float, beta, N):
    """Success of the sign decoder averaged over a uniform bit."""
    return 0.5 * (bpsk_correct_probability(1, E, beta, N) + bpsk_correct_probability(-1, E, beta, N))


@dataclass(frozen=True)
class SymmetrizedDensity:
    """Equal mixture of normal laws; evaluable pointwise.

    For two components with means ``a +- b`` and common variance ``(N+1)/2``
    this equals ``exp(-((x-a)^2 + b^2)/(N+1)) cosh(2b(x-a)/(N+1)) / sqrt(pi(N+1))``,
    see :meth:`cosh_form`.
    """

    components: Tuple[g.UnivariateGaussian, ...] = field(default_factory=tuple)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return sum(c.pdf(x) for c in self.components) / len(self.components)

    def prob_positive(self) -> float:
        return float(np.mean([c.prob_positive() for c in self.components]))

    def prob_correct(self, sign: int) -> float:
        p = self.prob_positive()
        return p if sign > 0 else 1.0 - p

    def cosh_form(self, x):
        """Closed cosh form; only defined for two components of equal variance."""
        a_plus, a_minus = self.components
        if not np.isclose(a_plus.variance, a_minus.variance, rtol=0, atol=1e-15):
            raise InvalidParameter("cosh form needs equal component variances")
        x = np.asarray(x, dtype=float)
        centre = 0.5 * (a_plus.mean + a_minus.mean)
        shift = 0.5 * (a_plus.mean - a_minus.mean)
        two_var = 2.0 * a_plus.variance
        return (
            np.exp(-((x - centre) ** 2 + shift**2) / two_var)
            * np.cosh(2.0 * shift * (x - centre) / two_var)
            / np.sqrt(np.pi * two_var)
        )


def symmetrized_homodyne_density(
    sign: int, budget: PowerBudget, jammer: JammerStrategy
) -> SymmetrizedDensity:
    """Receiver law when shared randomness flips the jammer's phase half the time."""
    jammer.validate(budget)
    return SymmetrizedDensity(
        (
            bpsk_homodyne_density(sign, budget, jammer),
            bpsk_homodyne_density(sign, budget, jammer.reflected()),
        )
    )


def symmetrized_correct_probability(E: float, beta, N):
    """``P(X > 0)`` under the symmetrized law for ``+sqrt(E)``; broadcasts."""
    beta = np.asarray(beta, dtype=complex)
    return 0.5 * (bpsk_correct_probability(1, E, beta, N) + bpsk_correct_probability(1, E, -beta, N))


@dataclass(frozen=True)
class ReplayAttack:
    """Jammer that replays a uniformly chosen codeword of the code under attack."""

    codewords: Tuple[Tuple[JammerStrategy, ...], ...]

    @property
    def message_count(self) -> int:
        return len(self.codewords)

    @property
    def probabilities(self) -> np.ndarray:
        return np.full(self.message_count, 1.0 / self.message_count)

    def sample(self, rng: np.random.Generator) -> Tuple[int, Tuple[JammerStrategy, ...]]:
        if self.message_count == 1:
            return 0, self.codewords[0]
        index = int(rng.integers(self.message_count))
        return index, self.codewords[index]


def self_jamming_attack(
    code: Sequence[Sequence[SenderSymbol]], budget: PowerBudget
) -> ReplayAttack:
    """Build the codeword-replay jammer against ``code``.

    Raises:
        InfeasibleAttack: if ``P < E`` or a codeword symbol exceeds ``P``.
    """
    if budget.P < budget.E:
        raise InfeasibleAttack("the replay attack needs P >= E")
    if not code:
        raise InvalidParameter("code must contain at least one codeword")
    words: List[Tuple[JammerStrategy, ...]] = []
    for word in code:
        jam = tuple(symbol.as_jammer() for symbol in word)
        for j in jam:
            j.validate(budget)
        words.append(jam)
    return ReplayAttack(tuple(words))
