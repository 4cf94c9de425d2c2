HELP_TEXT = r'''
Harmonic curves CLI

Computes and draws the harmonic algebraic curves

    C_theta(P) = { z : Im(e^{-i theta} P(z)) = 0 },   P(z) = prod (z - z_i)

and checks that, for roots on the unit circle, the curve meets the circle in the
roots plus the vertices of a regular n-gon with phase

    Omega = (2 theta - sum Arg z_j) / n - pi.

Quick start

  # install (dev)
  python3 -m venv .venv
  source .venv/bin/activate
  pip install -U pip
  pip install -e .

  # one root at 1, theta = 0: the curve is the real axis
  harmonic verify --roots-angles 0 --theta 0

  # the hyperbola x^2 - y^2 = 1 and its asymptote matching
  harmonic matching --roots-angles 0 pi --theta pi/2

  # 7 random roots (seed 42), theta = 0, drawn to fig1.svg
  harmonic demo --seed 42 --out fig1.svg

Instances
- --roots FILE            JSON {"roots": [[re, im], ...], "multiplicities": [...]}
- --roots-angles A1 A2 .. roots e^{i A} on the unit circle
- --random N --seed S     N roots uniform on the circle from the built-in
                          xorshift64* generator (same on every platform)
- --theta T               curve parameter (default 0)

Angles are radians only: decimals or multiples of pi (pi/2, -3pi/4, 2*pi).
Values marked as degrees (90deg, 90°) are rejected.

Commands
- verify     circle zeros vs roots + gon (--batch N [--jobs J] for many instances)
- trace      marching-squares polylines of the curve (--format json|csv)
- matching   asymptote matching by continuation (--method grid for the grid oracle)
- necklace   critical thetas and the matching on each theta interval
- tangents   tangent directions at each root and the circle-tangency test
- render     SVG of an instance (--out, --asymptotes, --scene-json)
- demo       seeded n = 7 figure with embedded verification
- config     show/set persisted defaults

Exit codes
- 0 success, 1 verification failed, 2 usage or bad input, 3 numerical failure

Output
- stdout carries only the JSON (or SVG/CSV) result; floats use 17 significant digits.
- -v / -vv on the root command log INFO / DEBUG messages to stderr.
- --angle-range pi prints circle angles in (-pi, pi] instead of [0, 2*pi).

Local storage
- Config: ~/.harmonic/config.json

Environment variables
- HARMONIC_HOME: override ~/.harmonic
'''
