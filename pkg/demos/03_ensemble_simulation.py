"""
Why an ensemble of imperfect evaluators helps
=============================================

Synthetic evaluators each rank the true best action first with a fixed
probability.  With two actions and equal credences the aggregate behaves
like a majority vote, whose accuracy is known in closed form.
"""

from math import comb

from mec import SynthConfig, run_experiment


def majority(p, n):
    return sum(comb(n, k) * p ** k * (1 - p) ** (n - k) for k in range(n // 2 + 1, n + 1))


print(f"{'n':>3} {'p':>5} {'best single':>12} {'MEC':>8} {'majority':>9}")
for n in (1, 3, 5, 7):
    for p in (0.6, 0.75, 0.9):
        report = run_experiment(SynthConfig(seed=7, trials=5000, n_evaluators=n,
                                            evaluator_accuracy=p))
        print(f"{n:>3} {p:>5.2f} {max(report.per_evaluator_accuracy):>12.4f} "
              f"{report.mec_accuracy:>8.4f} {majority(p, n):>9.4f}")

# More actions: MEC no longer reduces to a vote, but still pools evidence.
report = run_experiment(SynthConfig(seed=1, trials=5000, n_evaluators=3,
                                    evaluator_accuracy=0.75, n_actions=4))
print()
print(report.to_table())
