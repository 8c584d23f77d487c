"""
Calibrating a decision threshold
================================

A scalar utilitarian output has no natural cut point for a binary
"acceptable / not acceptable" label, so one is fitted on labeled examples.
Sign-valued outputs use a fixed rule: positive iff strictly above zero.
"""

import numpy as np

from mec import calibrate_threshold, classify

rng = np.random.default_rng(0)
labels = rng.integers(0, 2, 1000)
# model scores: acceptable actions sit higher on average, with overlap
scores = rng.normal(loc=np.where(labels == 1, 0.8, -0.2), scale=0.6)

threshold = calibrate_threshold(list(zip(scores.tolist(), labels.tolist())))
predicted = [classify(s, zero_rule=False, threshold=threshold) for s in scores]
print(f"fitted threshold: {threshold:.4f}")
print(f"training accuracy: {np.mean(np.array(predicted) == labels):.3f}")

zero_rule = [classify(s) for s in scores]
print(f"accuracy with the zero rule instead: {np.mean(np.array(zero_rule) == labels):.3f}")
print("zero is negative under the zero rule:", classify(0.0))
