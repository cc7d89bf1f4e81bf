"""Domination bounds every periodic exponent.

When every closed geodesic is shorter for hol than for rho by a factor
kappa < 1, the exponent on each closed orbit is at most kappa in absolute
value.
"""
# %%
from folialab.cli import free_quotient_pair
from folialab.length_spectrum import domination_report, enumerate_classes
from folialab.skewflow import periodic_exponent
from folialab.surface_rep import bolza, free_quotient_rep, format_word, twist

B = bolza()
census = enumerate_classes(2, 6)
print("classes up to word length 6:", len(census))

for hol in (free_quotient_rep(*free_quotient_pair(0.5, 0.4)),
            free_quotient_rep(*free_quotient_pair(0.08, 0.06)), twist(B, 1)):
    r = domination_report(B, hol, 6, census)
    worst = max(abs(x) for w in census for x in periodic_exponent(B, hol, w))
    print(f"{hol.label:15s} kappa {r.kappa_hat:.5f} ({format_word(r.worst_class)})  "
          f"{r.verdict.value:18s} max |exponent| {worst:.5f}")
