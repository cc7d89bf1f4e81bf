"""Leaves of the unit tangent bundle foliation attract each other at rate one.

Pairing the Bolza surface with its own holonomy gives the canonical foliation.
Its transverse exponent should be -1 for every Liouville-random orbit.
"""
# %%
from folialab.geoflow import closed_geodesic
from folialab.length_spectrum import marked_length
from folialab.skewflow import periodic_exponent, simulated_periodic_exponents, transverse_exponent
from folialab.surface_rep import Word, bolza, euler_number

B = bolza()
print("Euler number of the Bolza representation:", euler_number(B))
print("systole:", marked_length(B, [1]))

# %% one closed geodesic, one period of the skew product
w = Word([1, -2, 3])
orbit = closed_geodesic(B, w)
print(f"period of {w}: {orbit.length:.6f}")
print("exact exponents:    ", periodic_exponent(B, B, w))
print("simulated exponents:", simulated_periodic_exponents(B, B, w))

# %% time averages along random orbits
for seed in range(4):
    e = transverse_exponent(B, B, 1e4, seed=seed)
    print(f"seed {seed}: lambda = {e.value:+.5f} +- {e.stderr:.5f}")
