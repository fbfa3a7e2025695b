"""
A tour of the Shiha lifetime distribution
=========================================

The model is a three-part mixture: Exp(omega), Exp(2 omega) and
Gamma(2, 2 omega), weighted in proportion to (omega, eta, 2 eta).
This script walks through the closed-form quantities the library
exposes. Run it with ``python demos/01_distribution_tour.py``.
"""

# %%
# Parameters and mixture weights
# ------------------------------
import numpy as np

from shihadist import shiha

p = shiha.ShihaParams(omega=1.0, eta=1.0)
w = shiha.mixture_weights(p)
print("weights:", round(w.p1, 4), round(w.p2, 4), round(w.p3, 4))

# %%
# Density, survival and hazard on a grid. The hazard starts at
# pdf(0) = omega (omega + 2 eta) / (omega + 3 eta), rises to a single peak and
# settles back to omega, the rate of the slowest component.
y = np.linspace(0.0, 6.0, 13)
table = np.column_stack([y, shiha.pdf(p, y), shiha.survival(p, y), shiha.hazard(p, y)])
print("      y      pdf      sf  hazard")
print(np.array2string(table, precision=4, suppress_small=True))

peak = shiha.hazard_peak(p)
print(f"hazard peak at y* = {peak.y_star:.6f} with h = {peak.h_max:.6f}")

# %%
# Quantiles
# ---------
# There is no closed-form inverse, so quantiles come from a bracketed solve.
probs = np.array([0.1, 0.25, 0.5, 0.75, 0.9])
q = shiha.quantile(p, probs)
print("quantiles:", np.round(q, 4))
print("round trip error:", np.max(np.abs(shiha.cdf(p, q) - probs)))

# %%
# Moments, shape and entropy
# --------------------------
d = shiha.descriptors(p)
print(f"mean {d.mean:.4f}  var {d.variance:.4f}  skew {d.skewness:.4f}  kurt {d.kurtosis:.4f}")
print("E[Y^k], k=1..4:", [round(shiha.raw_moment(p, k), 4) for k in range(1, 5)])

# As omega grows the Exp(omega) part dominates and the shape approaches
# the exponential values (skewness 2, kurtosis 9).
for omega in (1.0, 10.0, 1e3, 1e6):
    d = shiha.descriptors(shiha.ShihaParams(omega, 1.0))
    print(f"omega={omega:>9g}: skew {d.skewness:.4f}  kurt {d.kurtosis:.4f}")

# Entropy falls as omega increases.
for omega in (0.5, 1.0, 2.0, 4.0):
    print(f"H(omega={omega}, eta=1) = {shiha.entropy(shiha.ShihaParams(omega, 1.0)):.5f}")

# %%
# Stress-strength reliability
# ---------------------------
# R = P(strength > stress) has a closed form; check it against simulation.
strength = shiha.ShihaParams(0.5, 2.0)
stress = shiha.ShihaParams(1.5, 0.3)
rng = shiha.make_rng(42)
n = 200_000
mc = np.mean(shiha.sample_mixture(strength, n, rng) > shiha.sample_mixture(stress, n, rng))
print(f"R closed form {shiha.stress_strength(strength, stress):.5f}  simulated {mc:.5f}")

# %%
# Two samplers
# ------------
# Inverse-cdf and mixture sampling draw from the same law.
a = shiha.sample_inverse(p, 50_000, seed=1)
b = shiha.sample_mixture(p, 50_000, seed=2)
print("sample means:", round(a.mean(), 4), round(b.mean(), 4), "exact:", round(shiha.raw_moment(p, 1), 4))
