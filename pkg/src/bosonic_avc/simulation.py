"""Seeded Monte Carlo simulations of the jammed channel and its coding schemes.

Trials are split into fixed-size chunks. Chunk ``i`` draws from
``default_rng(SeedSequence([seed, i]))`` and returns integer counts, so the
merged report does not depend on how many worker threads ran the chunks.

Four simulators share this machinery:

* :func:`run_attack_sim` replays codewords of a BPSK code as jamming.
* :func:`run_bpsk_sim` sends uncoded BPSK symbols through a fixed jammer.
* :func:`run_tmsv_protocol_sim` distils shared bits from TMSV pairs and uses
  them to scramble a repetition-coded BPSK phase.
* :func:`run_classical_correlation_sim` does the same with the classically
  correlated resource.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import gaussian as g
from .bounds import (
    DEFAULT_RESOLUTION,
    delta_lower_bound,
    epsilon_clamped,
    nu,
    symmetrization_error_bound,
    worst_case_jammer,
)
from .channel import (
    JammerStrategy,
    PowerBudget,
    SenderSymbol,
    bpsk_average_correct_probability,
    channel_output,
    self_jamming_attack,
)
from .errors import InfeasibleAttack, InvalidParameter
from .protocol import (
    LAMBDA_C_WEIGHTS,
    correlation_resource,
    decompose_on_triangle,
    effective_crossover,
    lambda_c_values,
    quadrant_distribution,
)

THREADS_ENV = "BOSONIC_AVC_THREADS"
JAMMER_POLICIES = ("none", "fixed", "worst_grid", "replay_code")
REPLAY_MODES = ("uniform", "transmitted", "negated")
DEFAULT_CHUNK = 1000


def default_workers() -> int:
    """Worker count from ``BOSONIC_AVC_THREADS``, falling back to 1."""
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters shared by all simulators.

    Attributes:
        budget: Sender and jammer energy limits.
        n: Block length (repetition length, or symbols per trial for BPSK).
        M: Number of messages; only the attack uses ``M > 2``.
        trials: Independent trials (codeword transmissions).
        seed: Root seed; together with the chunk index it fixes every draw.
        jammer_policy: ``none``, ``fixed``, ``worst_grid`` or ``replay_code``.
        jammer: The strategy used by the ``fixed`` policy.
        replay_mode: Which codeword the replay jammer sends: ``uniform``
            (the attack proper), ``transmitted`` or ``negated``.
        resource_energy: Thermal photon number of the correlation resource;
            defaults to ``budget.E``.
        chunk_size: Trials per RNG chunk. Changing it changes the draws.
        workers: Threads used to run chunks; never changes the result.
        grid_resolution: Grid size for the ``worst_grid`` policy.
    """

    budget: PowerBudget
    n: int = 32
    M: int = 2
    trials: int = 10_000
    seed: int = 0
    jammer_policy: str = "worst_grid"
    jammer: Optional[JammerStrategy] = None
    replay_mode: str = "uniform"
    resource_energy: Optional[float] = None
    chunk_size: int = DEFAULT_CHUNK
    workers: int = field(default_factory=default_workers)
    grid_resolution: int = DEFAULT_RESOLUTION

    def __post_init__(self) -> None:
        for name in ("n", "M", "trials", "chunk_size", "workers"):
            if int(getattr(self, name)) < 1:
                raise InvalidParameter(f"{name} must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise InvalidParameter("seed must be a 64-bit unsigned integer")
        if self.jammer_policy not in JAMMER_POLICIES:
            raise InvalidParameter(f"jammer_policy must be one of {JAMMER_POLICIES}")
        if self.jammer_policy == "fixed" and self.jammer is None:
            raise InvalidParameter("the fixed policy needs a jammer")
        if self.replay_mode not in REPLAY_MODES:
            raise InvalidParameter(f"replay_mode must be one of {REPLAY_MODES}")
        if self.resource_energy is not None and not self.resource_energy >= 0:
            raise InvalidParameter("resource_energy must be non-negative")

    @property
    def chunks(self) -> List[Tuple[int, int]]:
        """``(chunk index, trials in chunk)`` in index order."""
        full, rest = divmod(self.trials, self.chunk_size)
        sizes = [self.chunk_size] * full + ([rest] if rest else [])
        return list(enumerate(sizes))

    def to_dict(self) -> dict:
        return {
            "e": self.budget.E,
            "p": self.budget.P,
            "n": self.n,
            "m": self.M,
            "trials": self.trials,
            "seed": int(self.seed),
            "jammer_policy": self.jammer_policy,
            "jammer": None if self.jammer is None else self.jammer.to_dict(),
            "replay_mode": self.replay_mode,
            "resource_energy": self.resource_energy,
            "chunk_size": self.chunk_size,
            "grid_resolution": self.grid_resolution,
        }


@dataclass
class SimulationReport:
    """Outcome of one simulation.

    ``wall_time`` is kept out of :meth:`to_json` by default so that reruns
    with the same seed serialise identically.
    """

    protocol: str
    empirical_error: float
    stderr: float
    diagnostics: dict
    checks: Dict[str, bool]
    config: SimulationConfig
    wall_time: float = 0.0
    trial_errors: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self, include_timing: bool = False) -> dict:
        out = {
            "protocol": self.protocol,
            "empirical_error": self.empirical_error,
            "stderr": self.stderr,
            "diagnostics": self.diagnostics,
            "checks": self.checks,
            "passed": self.passed,
            "config": self.config.to_dict(),
        }
        if include_timing:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_timing: bool = False) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True)


def binomial_stderr(p: float, count: int) -> float:
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / count))


def chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def _run_chunks(config: SimulationConfig, work: Callable[[np.random.Generator, int], dict]) -> List[dict]:
    """Run ``work(rng, size)`` on each chunk and return results in chunk order."""
    jobs = config.chunks

    def one(job):
        index, size = job
        return work(chunk_rng(config.seed, index), size)

    if config.workers == 1 or len(jobs) == 1:
        return [one(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(one, jobs))


def _merge(results: List[dict]) -> dict:
    merged: dict = {}
    for res in results:
        for key, value in res.items():
            if isinstance(value, np.ndarray):
                merged.setdefault(key, []).append(value)
            else:
                merged[key] = merged.get(key, 0) + value
    return {k: np.concatenate(v) if isinstance(v, list) else v for k, v in merged.items()}


class _ReceiverLaw:
    """Receiver x-outcome law for BPSK symbols ``+-sqrt(E)`` under one jammer."""

    def __init__(self, E: float, jammer: JammerStrategy):
        laws = [
            g.homodyne_x_joint(channel_output(SenderSymbol.coherent_bpsk(s, E).state(), jammer.state()), 0)
            for s in (-1, 1)
        ]
        self.means = np.array([law.mean for law in laws])
        self.std = laws[1].std

    def sample(self, symbols: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Outcomes for an array of ``+-1`` symbols."""
        mean = self.means[(symbols > 0).astype(int)]
        return mean + self.std * rng.standard_normal(symbols.shape)


def _decide(total: np.ndarray, coins: np.ndarray) -> np.ndarray:
    """Sign of ``total`` with fair-coin ties."""
    return np.where(total > 0, 1, np.where(total < 0, -1, coins))


def _fair_coins(rng: np.random.Generator, size: int) -> np.ndarray:
    return 2 * rng.integers(0, 2, size=size) - 1


# ---------------------------------------------------------------- attack


def replay_code(n: int, M: int, seed: int) -> np.ndarray:
    """``M x n`` sign matrix of a BPSK code.

    ``M = 2`` gives the antipodal repetition pair. Larger ``M`` adds random
    sign rows drawn from ``seed`` (the first row stays all ones).
    """
    if M == 2:
        return np.array([np.ones(n, dtype=int), -np.ones(n, dtype=int)])
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 2**32 - 1]))
    code = 2 * rng.integers(0, 2, size=(M, n)) - 1
    code[0] = 1
    return code


def run_attack_sim(config: SimulationConfig) -> SimulationReport:
    """Codeword-replay attack on a BPSK code with a maximum-correlation decoder.

    Each trial draws a message ``m`` uniformly. The jammer sends the coherent
    symbols of codeword ``l`` with ``l`` uniform (``replay_mode='uniform'``),
    ``l = m`` (``'transmitted'``), or the negation of codeword ``m``
    (``'negated'``). The receiver sees ``sqrt(E)(c_m + c_l)`` plus vacuum
    noise and decodes the codeword with the largest correlation.

    Raises:
        InfeasibleAttack: if ``P < E``.
        InvalidParameter: if ``M < 2``.
    """
    start = time.perf_counter()
    E, P = config.budget.E, config.budget.P
    if P < E:
        raise InfeasibleAttack("the replay attack needs P >= E")
    if config.M < 2:
        raise InvalidParameter("the attack needs M >= 2")
    code = replay_code(config.n, config.M, config.seed)
    words = [[SenderSymbol.coherent_bpsk(int(s), E) for s in row] for row in code]
    attack = self_jamming_attack(words, config.budget)

    # receiver mean is linear in the two amplitudes; read the gains off the moments
    root = np.sqrt(E)
    unit = JammerStrategy(root, 0.0)
    base = _ReceiverLaw(E, JammerStrategy(0.0, 0.0))
    shifted = _ReceiverLaw(E, unit)
    sender_gain = base.means[1] / root
    jammer_gain = (shifted.means[1] - base.means[1]) / root
    noise_std = base.std
    codef = code.astype(float)

    def work(rng, size):
        m = rng.integers(config.M, size=size)
        if config.replay_mode == "uniform":
            lidx = rng.integers(attack.message_count, size=size)
            jam = codef[lidx]
        elif config.replay_mode == "transmitted":
            jam = codef[m]
        else:
            jam = -codef[m]
        y = root * (sender_gain * codef[m] + jammer_gain * jam)
        y = y + noise_std * rng.standard_normal(y.shape)
        scores = y @ codef.T
        errors = np.argmax(scores, axis=1) != m
        return {"errors": int(errors.sum()), "trial_errors": errors}

    merged = _merge(_run_chunks(config, work))
    err = merged["errors"] / config.trials
    se = binomial_stderr(err, config.trials)
    bound = symmetrization_error_bound(config.M)
    checks = {}
    if config.replay_mode == "uniform":
        checks["error_at_least_symmetrization_bound"] = bool(err >= bound - 3.0 * se)
    return SimulationReport(
        protocol="attack",
        empirical_error=float(err),
        stderr=se,
        diagnostics={"symmetrization_bound": bound, "replay_mode": config.replay_mode},
        checks=checks,
        config=config,
        wall_time=time.perf_counter() - start,
        trial_errors=merged["trial_errors"],
    )


# ---------------------------------------------------------------- BPSK


def resolve_bpsk_jammer(config: SimulationConfig) -> Tuple[JammerStrategy, float]:
    """Jammer for the BPSK phase and the analytic bit-averaged success it allows."""
    E = config.budget.E
    if config.jammer_policy == "none":
        jammer = JammerStrategy(0.0, 0.0)
    elif config.jammer_policy == "fixed":
        jammer = config.jammer.validate(config.budget)
    elif config.jammer_policy == "worst_grid":
        jammer, _ = worst_case_jammer(
            lambda b, n: bpsk_average_correct_probability(E, b, n),
            config.budget.P,
            config.grid_resolution,
        )
    else:
        raise InvalidParameter("replay_code is only meaningful for the attack simulation")
    return jammer, float(bpsk_average_correct_probability(E, jammer.beta, jammer.N))


def run_bpsk_sim(config: SimulationConfig) -> SimulationReport:
    """Uncoded BPSK with the sign decoder; simulates ``trials * n`` symbols.

    Each symbol carries an independent uniform bit. ``empirical_error`` is the
    bit-flip rate. Checks: success agrees with the analytic value within 3
    standard errors, and (when ``E > P``) success is at least ``1/2 + nu``
    minus 3 standard errors.
    """
    start = time.perf_counter()
    E = config.budget.E
    jammer, analytic = resolve_bpsk_jammer(config)
    law = _ReceiverLaw(E, jammer)
    n = config.n

    def work(rng, size):
        bits = 2 * rng.integers(0, 2, size=(size, n)) - 1
        y = law.sample(bits, rng)
        flips = np.sign(y) != bits
        return {"flips": int(flips.sum()), "trial_errors": flips.mean(axis=1)}

    merged = _merge(_run_chunks(config, work))
    symbols = config.trials * n
    err = merged["flips"] / symbols
    se = binomial_stderr(err, symbols)
    success = 1.0 - err
    vacuous = E <= config.budget.P
    checks = {"success_matches_analytic": bool(abs(success - analytic) <= 3.0 * se)}
    if not vacuous:
        checks["success_at_least_half_plus_nu"] = bool(success >= 0.5 + nu(config.budget) - 3.0 * se)
    return SimulationReport(
        protocol="bpsk",
        empirical_error=float(err),
        stderr=se,
        diagnostics={
            "symbols": symbols,
            "empirical_success": float(success),
            "analytic_success": analytic,
            "half_plus_nu": 0.5 + nu(config.budget),
            "vacuous": vacuous,
            "jammer": jammer.to_dict(),
        },
        checks=checks,
        config=config,
        wall_time=time.perf_counter() - start,
        trial_errors=merged["trial_errors"],
    )


# ---------------------------------------------------------------- correlation protocol


def resolve_protocol_jammers(
    config: SimulationConfig, resource: str
) -> Tuple[JammerStrategy, JammerStrategy]:
    """Jammers for the correlation phase and the BPSK phase.

    ``worst_grid`` picks each phase's grid minimiser separately: the smallest
    ``lambda_c`` for phase one and the smallest bit-averaged BPSK success for
    phase two. Together they maximise ``lambda_c p + (1 - lambda_c)/2``.
    """
    if config.jammer_policy == "worst_grid":
        E_res = _resource_energy(config)
        first, _ = worst_case_jammer(
            lambda b, n: lambda_c_values(E_res, b, n, resource),
            config.budget.P,
            config.grid_resolution,
        )
        second, _ = resolve_bpsk_jammer(config)
        return first, second
    jammer, _ = resolve_bpsk_jammer(config)
    return jammer, jammer


def _resource_energy(config: SimulationConfig) -> float:
    return config.budget.E if config.resource_energy is None else float(config.resource_energy)


def _run_correlation_protocol(config: SimulationConfig, resource: str) -> SimulationReport:
    start = time.perf_counter()
    E = config.budget.E
    E_res = _resource_energy(config)
    n = config.n
    jam1, jam2 = resolve_protocol_jammers(config, resource)

    pair_state = channel_output(correlation_resource(E_res, resource), jam1.state(), transmit_mode=0)
    pair_law = g.homodyne_x_joint(pair_state, [0, 1])
    law2 = _ReceiverLaw(E, jam2)
    dither = np.where(np.arange(n) % 2 == 0, 1, -1)

    def work(rng, size):
        # phase 1: joint homodyne of receiver port (col 0) and retained mode (col 1)
        xy = g.sample_homodyne(pair_state, [0, 1], rng, size=size * n).reshape(size, n, 2)
        key_r = np.where(xy[..., 0] > 0, 1, -1)
        key_s = np.where(xy[..., 1] > 0, 1, -1)
        # phase 2: dithered repetition code scrambled by the sender's key
        message = 2 * rng.integers(0, 2, size=size) - 1
        codeword = message[:, None] * dither[None, :]
        sent = codeword * key_s
        y = law2.sample(sent, rng)
        unscrambled = np.where(y > 0, 1, -1) * key_r
        decoded = _decide((unscrambled * dither).sum(axis=1), _fair_coins(rng, size))
        errors = decoded != message
        counts = np.array(
            [
                np.count_nonzero((key_r == r) & (key_s == s))
                for r in (-1, 1)
                for s in (-1, 1)
            ]
        )
        return {
            "errors": int(errors.sum()),
            "flips": int(np.count_nonzero(unscrambled != codeword)),
            "channel_flips": int(np.count_nonzero(np.where(y > 0, 1, -1) != sent)),
            "q_counts": counts,
            "trial_errors": errors,
        }

    results = _run_chunks(config, work)
    q_counts = np.sum([r.pop("q_counts") for r in results], axis=0)
    merged = _merge(results)
    pairs = config.trials * n

    err = merged["errors"] / config.trials
    se = binomial_stderr(err, config.trials)

    q_hat = q_counts / pairs
    weights = LAMBDA_C_WEIGHTS
    lam_hat = float(weights @ q_hat)
    lam_se = float(np.sqrt(max(weights**2 @ q_hat - lam_hat**2, 0.0) / pairs))
    q_analytic = quadrant_distribution(E_res, jam1, resource) if E_res > 0 else None
    lam = decompose_on_triangle(q_analytic).lambda_c if q_analytic is not None else 0.0

    p_bar = 1.0 - float(bpsk_average_correct_probability(E, jam2.beta, jam2.N))
    cross_hat = merged["flips"] / pairs
    cross_se = binomial_stderr(cross_hat, pairs)
    cross = effective_crossover(lam, p_bar)
    bound = 0.5 - delta_lower_bound(config.budget) * (0.5 - epsilon_clamped(config.budget))

    checks = {
        "lambda_c_matches_analytic": bool(abs(lam_hat - lam) <= 4.0 * lam_se),
        "crossover_matches_analytic": bool(abs(cross_hat - cross) <= 4.0 * cross_se),
        "crossover_below_half": bool(cross_hat < 0.5 + 4.0 * cross_se) and cross < 0.5,
    }
    if resource == "classical" and E_res > 0:
        checks["lambda_c_positive"] = bool(lam_hat > 4.0 * lam_se)

    return SimulationReport(
        protocol="tmsv" if resource == "tmsv" else "classical",
        empirical_error=float(err),
        stderr=se,
        diagnostics={
            "resource": resource,
            "resource_energy": E_res,
            "pairs": pairs,
            "phase1_jammer": jam1.to_dict(),
            "phase2_jammer": jam2.to_dict(),
            "empirical_quadrants": q_hat.tolist(),
            "empirical_lambda_c": lam_hat,
            "lambda_c_stderr": lam_se,
            "analytic_lambda_c": float(lam),
            "correlation": pair_law.correlation,
            "channel_crossover": p_bar,
            "empirical_channel_crossover": merged["channel_flips"] / pairs,
            "empirical_crossover": float(cross_hat),
            "crossover_stderr": cross_se,
            "analytic_crossover": float(cross),
            "published_crossover_bound": float(bound),
        },
        checks=checks,
        config=config,
        wall_time=time.perf_counter() - start,
        trial_errors=merged["trial_errors"],
    )


def run_tmsv_protocol_sim(config: SimulationConfig) -> SimulationReport:
    """Two-phase protocol with a TMSV resource.

    Phase one: ``n`` TMSV pairs; the signal mode crosses the jammed splitter,
    both parties homodyne x and keep the signs as keys. Phase two: a message
    bit ``m`` becomes the codeword ``m (-1)^i``; symbol ``i`` is multiplied by
    the sender's key and sent as BPSK. The receiver multiplies its sign
    decisions by its own key, correlates with the alternating pattern and
    decides by sign, flipping a fair coin on ties.

    The alternating pattern makes every pair of positions see both inputs of
    the phase-two channel. Without it a biased jammer could push the error of
    one message above 1/2, because the receiver's key inherits the jammer's
    bias. The per-symbol flip rate is then ``lambda_c p + (1 - lambda_c)/2``
    with ``p`` the input-averaged BPSK crossover.
    """
    return _run_correlation_protocol(config, "tmsv")


def run_classical_correlation_sim(config: SimulationConfig) -> SimulationReport:
    """As :func:`run_tmsv_protocol_sim` with the classically correlated resource.

    ``config.resource_energy`` sets the resource's thermal photon number (the
    BPSK phase still uses ``budget.E``).
    """
    return _run_correlation_protocol(config, "classical")


SIMULATORS = {
    "attack": run_attack_sim,
    "bpsk": run_bpsk_sim,
    "tmsv": run_tmsv_protocol_sim,
    "classical": run_classical_correlation_sim,
}
