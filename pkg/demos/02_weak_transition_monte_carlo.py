"""Locate the empirical weak phase transition and compare it to theory.

For a fixed sparsity ratio beta, basis pursuit flips from failing to
succeeding as the aspect ratio alpha = m/n crosses the weak threshold.
This script estimates the 50%-recovery alpha by Monte Carlo bisection at
n = 200 and prints it next to the analytic boundary; at this modest size
the two land within a few hundredths of each other.

Runtime: a couple of minutes per beta.
"""

from l1lab import weak_alpha_of_beta, weak_nonneg_alpha_of_beta
from l1lab.empirical import fifty_percent_alpha, weak_recovery_rate

N = 200
TRIALS = 100


def main():
    for nonneg in (False, True):
        tag = "nonnegative" if nonneg else "general"
        theory_fn = weak_nonneg_alpha_of_beta if nonneg else weak_alpha_of_beta
        print(f"\n=== {tag} unknowns ===")
        for beta in (0.05, 0.1, 0.2):
            theory = theory_fn(beta)
            mc = fifty_percent_alpha(beta, n=N, trials=TRIALS, nonneg=nonneg,
                                     seed=2024)
            print(f"beta={beta:4.2f}: theory alpha_w={theory:.4f}, "
                  f"MC 50% point={mc:.4f}, gap={abs(mc - theory):.4f}")

        # the transition is sharp: rates far below/above the boundary
        beta = 0.1
        theory = theory_fn(beta)
        for factor, side in ((0.85, "below"), (1.15, "above")):
            alpha = min(theory * factor, 0.99)
            rate = weak_recovery_rate(alpha, beta, N, 40, nonneg=nonneg,
                                      seed=77)
            print(f"  rate at alpha={alpha:.3f} ({side} the boundary): {rate:.2f}")


if __name__ == "__main__":
    main()
