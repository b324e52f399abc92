"""Tour of the closed-form capacity lower bounds.

For a few (E, P) pairs this prints the three published witnesses next to
what the channel actually achieves against the worst grid jammer.

    python demos/bounds_tour.py
"""

from bosonic_avc import PowerBudget, bound_report

POINTS = [(4.0, 1.0), (1.0, 1.0), (1.0, 4.0), (0.25, 4.0)]


def main():
    print(f"{'E':>5} {'P':>5} {'nu':>9} {'eps':>9} {'delta':>9} {'cap_cr':>8}   worst P(X>0)  worst lambda_c")
    for E, P in POINTS:
        r = bound_report(PowerBudget(E, P), resolution=101)
        worst_nu = r.worst_jammers["nu"][1]
        worst_lam = r.worst_jammers["delta"][1]
        print(
            f"{E:5.2f} {P:5.2f} {r.nu:9.5f} {r.epsilon:9.5f} {r.delta:9.5f} {r.cap_cr:8.5f}"
            f"   {worst_nu:12.5f}  {worst_lam:14.5f}"
        )
    # The direct bound needs E > P. The common-randomness bound is positive everywhere.
    # Compare the delta column with the last one: the published delta is not
    # always below the true worst lambda_c; delta_certified is.


if __name__ == "__main__":
    main()
