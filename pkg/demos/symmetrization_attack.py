"""The codeword-replay attack when the jammer is as strong as the sender.

    python demos/symmetrization_attack.py
"""

from bosonic_avc import PowerBudget, SimulationConfig, run_attack_sim, symmetrization_error_bound


def main():
    budget = PowerBudget(1.0, 1.0)
    for M in (2, 4, 8):
        bound = symmetrization_error_bound(M)
        for mode in ("uniform", "transmitted", "negated"):
            cfg = SimulationConfig(budget, n=32, M=M, trials=10_000, seed=7, jammer_policy="replay_code", replay_mode=mode)
            report = run_attack_sim(cfg)
            print(f"M={M} {mode:>11}: error {report.empirical_error:.4f} +- {report.stderr:.4f}  (attack floor {bound:.3f})")
    # Only the uniform replay is the attack. Replaying the sent word reinforces
    # it, and replaying its negation cancels it.


if __name__ == "__main__":
    main()
