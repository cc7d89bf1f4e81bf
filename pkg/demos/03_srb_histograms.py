"""Independent orbits see the same physical measure.

Holonomy through a free quotient with two short hyperbolic generators has no
invariant measure on the circle, so leaves attract on average and every
orbit equidistributes toward one SRB measure.
"""
# %%
from folialab.cli import free_quotient_pair
from folialab.skewflow import FiberChart, detect_invariant_measure, srb_histogram, transverse_exponent
from folialab.surface_rep import bolza, free_quotient_rep, rotation_rep

B = bolza()
hol = free_quotient_rep(*free_quotient_pair(0.5, 0.4))
print("witness:", detect_invariant_measure(hol).kind.value)

e = transverse_exponent(B, hol, 1e4, seed=0)
print(f"lambda = {e.value:.5f} +- {e.stderr:.5f}")

# %% eight orbits, fiber recorded relative to the moving frame
m = srb_histogram(B, hol, 1e4, 8, 16, seed=0, chart=FiberChart.FRAME)
print("max pairwise TV:", round(float(m.tv.max()), 3))
print(m.normalized().round(3))

# %% rotations preserve Lebesgue measure: exponent exactly zero
rot = rotation_rep(2, [0.3, 0.7, 1.1, 0.2])
print(detect_invariant_measure(rot).kind.value, transverse_exponent(B, rot, 1e3).value)
