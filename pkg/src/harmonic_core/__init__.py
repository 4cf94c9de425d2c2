"""Harmonic algebraic curve core library.

Numerical primitives for the curves C_theta(P) = {z : Im(e^{-i theta} P(z)) = 0}:
polynomials built from root multisets, the regular n-gon on the unit circle,
curve tracing, asymptote matchings, necklaces, root tangents and SVG rendering.
"""
