import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from bosonic_avc import gaussian as g
from bosonic_avc.bounds import nu, worst_case_jammer
from bosonic_avc.channel import (
    JammerStrategy,
    PowerBudget,
    SenderSymbol,
    bpsk_average_correct_probability,
    bpsk_correct_probability,
    bpsk_homodyne_density,
    channel_output,
    jammed_x_moments,
    self_jamming_attack,
    symmetrized_correct_probability,
    symmetrized_homodyne_density,
)
from bosonic_avc.errors import InfeasibleAttack, InfeasibleJammer, InvalidParameter

GRID = (0.25, 1.0, 4.0)


class TestTypes:
    def test_budget_must_be_positive(self):
        with pytest.raises(InvalidParameter):
            PowerBudget(0.0, 1.0)
        with pytest.raises(InvalidParameter):
            PowerBudget(1.0, -2.0)

    def test_jammer_feasibility(self):
        budget = PowerBudget(1.0, 1.0)
        assert JammerStrategy(0.6 + 0.6j, 0.28).validate(budget)
        with pytest.raises(InfeasibleJammer):
            JammerStrategy(1.0, 0.5).validate(budget)
        with pytest.raises(InvalidParameter):
            JammerStrategy(0.0, -1.0)

    def test_sender_symbols(self):
        s = SenderSymbol.coherent_bpsk(-1, 4.0)
        assert s.alpha == -2.0 and s.energy == pytest.approx(4.0)
        assert SenderSymbol.tmsv_half(1.5).energy == pytest.approx(1.5)
        with pytest.raises(InvalidParameter):
            SenderSymbol.coherent_bpsk(0, 1.0)
        with pytest.raises(InvalidParameter):
            SenderSymbol.displaced_thermal(1.0, 0.5).validate(PowerBudget(1.0, 1.0))

    def test_jammer_serialises(self):
        assert JammerStrategy(0.5 - 0.25j, 0.1).to_dict() == {"beta_re": 0.5, "beta_im": -0.25, "N": 0.1}


class TestChannelOutput:
    def test_vacuum(self):
        assert channel_output(g.vacuum(), g.vacuum()).allclose(g.vacuum())

    def test_coherent_and_thermal(self):
        E, beta, N = 2.0, 0.3 - 0.2j, 0.8
        out = channel_output(g.make_coherent(np.sqrt(E)), g.make_displaced_thermal(beta, N))
        assert out.mode_count == 1
        expected_mean = (np.sqrt(2) * np.array([np.sqrt(E) + beta.real, beta.imag])) / np.sqrt(2)
        assert np.allclose(out.mean, expected_mean)
        assert np.allclose(out.cov, (N + 1) / 2 * np.eye(2))

    def test_tmsv_half_gives_vg(self):
        out = channel_output(SenderSymbol.tmsv_half(1.0).state(), JammerStrategy(0.0, 0.0).state())
        law = g.homodyne_x_joint(out, [0, 1])
        assert np.allclose(law.cov, [[1.0, 1.0], [1.0, 1.5]])

    def test_rejects_multimode_jammer(self):
        with pytest.raises(InvalidParameter):
            channel_output(g.vacuum(), g.vacuum(2))
        with pytest.raises(InvalidParameter):
            channel_output(g.vacuum(), g.vacuum(), transmit_mode=1)

    @settings(max_examples=30)
    @given(st.floats(-2, 2), st.floats(-2, 2), st.floats(0, 2), st.floats(0, 2))
    def test_beam_splitter_symmetry(self, a, b, Na, Nb):
        s, j = g.make_displaced_thermal(a, Na), g.make_displaced_thermal(b, Nb)
        # the receiver port is the sum port, so swapping the inputs leaves it unchanged
        assert channel_output(s, j).allclose(channel_output(j, s))

    def test_batched_moments_match_channel_output(self):
        sender = SenderSymbol.tmsv_half(0.7).state()
        betas = np.array([0.0, 0.4 + 0.3j, -1.1])
        Ns = np.array([0.0, 0.2, 0.9])
        means, covs = jammed_x_moments(sender, betas, Ns)
        for b, n, m, c in zip(betas, Ns, means, covs):
            law = g.homodyne_x_joint(channel_output(sender, JammerStrategy(b, n).state()), [0, 1])
            assert np.allclose(m, law.mean) and np.allclose(c, law.cov)


class TestBpskDensity:
    def test_unjammed(self):
        law = bpsk_homodyne_density(1, PowerBudget(4.0, 1.0), JammerStrategy())
        assert law.mean > 0 and law.variance == pytest.approx(0.5)

    def test_worked_example(self):
        law = bpsk_homodyne_density(1, PowerBudget(4.0, 1.0), JammerStrategy(-1.0, 0.0))
        assert law.mean == pytest.approx(1.0) and law.variance == pytest.approx(0.5)

    def test_reflection_through_offset(self):
        budget, jam = PowerBudget(2.0, 1.0), JammerStrategy(0.4, 0.3)
        plus = bpsk_homodyne_density(1, budget, jam)
        minus = bpsk_homodyne_density(-1, budget, jam)
        assert plus.mean + minus.mean == pytest.approx(2 * 0.4)
        assert plus.variance == pytest.approx(minus.variance)

    def test_infeasible_jammer(self):
        with pytest.raises(InfeasibleJammer):
            bpsk_homodyne_density(1, PowerBudget(1.0, 1.0), JammerStrategy(1.0, 0.1))

    def test_worst_jammer_respects_nu(self):
        budget = PowerBudget(4.0, 1.0)
        _, value = worst_case_jammer(lambda b, n: bpsk_correct_probability(1, 4.0, b, n), 1.0)
        assert value >= 0.5 + nu(budget) - 1e-9

    def test_complex_beta_only_real_part_matters(self):
        for E in GRID:
            for re in np.linspace(-0.8, 0.8, 5):
                for im in np.linspace(-0.5, 0.5, 5):
                    full = bpsk_correct_probability(1, E, re + 1j * im, 0.1)
                    real = bpsk_correct_probability(1, E, re, 0.1)
                    assert full == pytest.approx(real, abs=1e-15)

    def test_average_probability(self):
        avg = bpsk_average_correct_probability(1.0, -1.0, 0.0)
        assert avg == pytest.approx(0.5 * (stats.norm.cdf(0.0) + stats.norm.cdf(2.0 / np.sqrt(0.5))))

    @pytest.mark.parametrize("seed,E,beta,N", [(0, 4.0, -1.0, 0.0), (1, 1.0, 0.5, 0.5), (2, 0.25, 0.0, 1.0), (3, 2.0, 0.7, 0.2), (4, 4.0, -2.0, 0.0)])
    def test_ks_against_samples(self, seed, E, beta, N):
        budget = PowerBudget(E, max(abs(beta) ** 2 + N, 1e-3))
        law = bpsk_homodyne_density(1, budget, JammerStrategy(beta, N))
        state = channel_output(SenderSymbol.coherent_bpsk(1, E).state(), JammerStrategy(beta, N).state())
        draws = g.sample_homodyne(state, 0, np.random.default_rng(seed), size=1_000_000)[:, 0]
        stat = stats.kstest(draws, law.cdf).statistic
        assert stat < 1.628 / np.sqrt(draws.size)  # 1% critical value


class TestSymmetrizedDensity:
    def test_zero_beta_reduces(self):
        budget = PowerBudget(1.0, 1.0)
        dens = symmetrized_homodyne_density(1, budget, JammerStrategy(0.0, 0.5))
        plain = bpsk_homodyne_density(1, budget, JammerStrategy(0.0, 0.5))
        x = np.linspace(-3, 3, 13)
        assert np.allclose(dens(x), plain.pdf(x))

    def test_reflection(self):
        budget, jam = PowerBudget(1.5, 1.0), JammerStrategy(0.6, 0.3)
        plus = symmetrized_homodyne_density(1, budget, jam)
        minus = symmetrized_homodyne_density(-1, budget, jam)
        x = np.linspace(-4, 4, 33)
        assert np.allclose(plus(x), minus(-x), atol=1e-15)

    def test_cosh_form(self):
        dens = symmetrized_homodyne_density(1, PowerBudget(1.0, 1.0), JammerStrategy(-0.7, 0.4))
        x = np.linspace(-4, 4, 33)
        assert np.allclose(dens(x), dens.cosh_form(x), atol=1e-14)

    def test_normalised(self):
        dens = symmetrized_homodyne_density(1, PowerBudget(1.0, 1.0), JammerStrategy(0.8, 0.2))
        total = integrate.quad(dens, -np.inf, np.inf, epsabs=1e-12)[0]
        assert abs(total - 1.0) <= 1e-9

    def test_prob_positive_matches_quadrature(self):
        for E in GRID:
            for P in GRID:
                root = np.sqrt(P)
                for beta in (0.0, root / 2, -root / 2, root, -root):
                    N = max(P - beta * beta, 0.0)
                    dens = symmetrized_homodyne_density(1, PowerBudget(E, P), JammerStrategy(beta, N))
                    quad = integrate.quad(dens, 0.0, np.inf, epsabs=1e-12, epsrel=1e-12)[0]
                    assert abs(dens.prob_positive() - quad) <= 1e-8
                    assert dens.prob_positive() == pytest.approx(
                        symmetrized_correct_probability(E, beta, N), abs=1e-15
                    )
                    assert dens.prob_correct(-1) == pytest.approx(1 - dens.prob_positive())


class TestReplayAttack:
    def code(self, E, M=2, n=4):
        return [[SenderSymbol.coherent_bpsk(s, E) for s in [1 - 2 * (m % 2)] * n] for m in range(M)]

    def test_single_codeword_is_deterministic(self):
        attack = self_jamming_attack(self.code(1.0, M=1), PowerBudget(1.0, 1.0))
        rng = np.random.default_rng(0)
        draws = {attack.sample(rng)[0] for _ in range(20)}
        assert draws == {0}

    def test_uniform_over_codewords(self):
        attack = self_jamming_attack(self.code(1.0, M=4), PowerBudget(1.0, 2.0))
        assert np.allclose(attack.probabilities, 0.25)
        rng = np.random.default_rng(1)
        counts = np.bincount([attack.sample(rng)[0] for _ in range(8000)], minlength=4)
        assert stats.chisquare(counts).pvalue > 0.001

    def test_replayed_symbols_match_code(self):
        attack = self_jamming_attack(self.code(2.0), PowerBudget(2.0, 2.0))
        assert attack.codewords[1][0] == JammerStrategy(-np.sqrt(2.0), 0.0)

    def test_infeasible(self):
        with pytest.raises(InfeasibleAttack):
            self_jamming_attack(self.code(2.0), PowerBudget(2.0, 1.0))
