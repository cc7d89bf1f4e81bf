"""Suspension foliations of hyperbolic surfaces and their foliated geodesic flows.

Modules:
    moebius          PSL(2, R) algebra and the action on RP^1
    surface_rep      surface groups, representations, Euler numbers
    length_spectrum  class census, marked lengths, domination
    geoflow          geodesic flow, Dirichlet domain reduction, closed geodesics
    skewflow         the projective skew product, exponents, SRB statistics
    fuchsian_pair    comparing two Fuchsian representations
    cli              batch front end
"""

__version__ = "0.1.0"
