"""
Are the errors independent?
===========================

If models erred independently, their accuracies on n samples would be
binomially distributed.  Correlated errors make the models more alike, so
the observed spread of accuracies is smaller than the binomial one.  A
two-sided F-test on the two variances detects this.
"""

from multiplicity import (
    SynthConfig,
    analytic_ambiguity,
    f_test_variance,
    generate,
    model_accuracies,
    simulate_independent_accuracies,
)

# the closed-form estimate for near-perfect models
for m in (5, 50):
    print(f"independent-error ambiguity at p=0.991, M={m}: {analytic_ambiguity(0.991, m):.4f}")

for rho in (0.0, 0.9):
    rset = generate(SynthConfig(50, 200, 2, 0.9, rho, rng_seed=3, n_val_samples=5000))
    observed = model_accuracies(rset, "val")
    simulated = simulate_independent_accuracies(float(observed.mean()), 5000, 50, rng_seed=3)
    result = f_test_variance(observed, simulated.accuracies)
    print(f"rho={rho}: std observed {observed.std(ddof=1):.5f} "
          f"simulated {simulated.accuracies.std(ddof=1):.5f}  "
          f"F={result.f_statistic:.3f} p={result.p_value:.2e}")
