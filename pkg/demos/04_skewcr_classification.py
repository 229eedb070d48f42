"""Skew-CR classification of the 11-dimensional worked example.

The scenario "ex31" immerses a 5-manifold (plus the Reeb direction) into
flat R^11.  Its tangent bundle splits into an invariant plane, an
anti-invariant line and a slant plane whose angle depends on the
constant k -- the classifier reads all of this off the spectrum of
Q = T^2.
"""

import math

from contactgeo import builtin, classify, classify_normal, second_fundamental_form

for k in (0.5, 1.0, 2.0):
    s = builtin("ex31", constants={"k": k}, sample_count=10)
    p = s.immersion.sample_points(1, s.seed)[0]
    smp = second_fundamental_form(s.immersion, p)
    split = classify(smp)
    ns = classify_normal(smp, split)
    predicted = math.acos(k / math.sqrt(2 * (1 + k * k)))
    print(f"k = {k}")
    print(f"  label:        {split.label}")
    print(f"  dims:         {split.dims}  (+ the Reeb direction)")
    print(f"  slant angle:  {math.degrees(split.slant_angle):.6f} deg")
    print(f"  closed form:  {math.degrees(predicted):.6f} deg")
    print(f"  normal split: phi(D_perp) + F(D_theta) + mu = {ns.dims}")

# Eigenvalue -1 of Q marks the invariant block (phi rotates inside the
# tangent space), 0 the anti-invariant block (phi maps it into the normal
# bundle), and -cos^2(theta) in between gives the slant block.
