"""
Consensus ensembles and abstention
==================================

An ensemble that only answers when (nearly) all of its members agree trades
coverage for accuracy.  Two disjoint ensembles drawn from the same set also
agree with each other more often than two single models do.
"""

from multiplicity import (
    ConsensusRule,
    SynthConfig,
    expected_pairwise_agreement,
    generate,
    model_accuracies,
    selective_curve,
)

rset = generate(SynthConfig(40, 4000, num_classes=2, target_accuracy=0.85,
                            error_correlation=0.5, rng_seed=7))
print(f"mean single-model accuracy {model_accuracies(rset).mean():.4f}")

# coverage and accuracy of growing random ensembles under three thresholds
for tau in (0.8, 0.9, 1.0):
    curve = selective_curve(rset, "random", tau, repetitions=20, rng_seed=0, max_models=10)
    print(f"tau={tau}: k=5 coverage {curve.coverage_mean[4]:.3f} accuracy {curve.accuracy_mean[4]:.4f}"
          f" | k=10 coverage {curve.coverage_mean[9]:.3f} accuracy {curve.accuracy_mean[9]:.4f}")

# expected pairwise agreement between disjoint unanimity ensembles
for m in (1, 2, 5, 10):
    raw = expected_pairwise_agreement(rset, m, ConsensusRule(1.0), rng_seed=0)
    norm = expected_pairwise_agreement(rset, m, ConsensusRule(1.0), normalize=True, rng_seed=0)
    print(f"m={m:2d}: agreement {raw.mean_agreement:.4f}  normalized {norm.mean_agreement:.4f}"
          f"  joint coverage {raw.mean_coverage:.4f}")
