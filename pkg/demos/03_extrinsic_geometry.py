"""Second fundamental form on familiar surfaces.

The unit circle and a paraboloid make the sigma machinery easy to sanity
check by hand: curvature 1 for the circle, principal curvatures (2, 2)
for z = u^2 + v^2 at the origin.
"""

from contactgeo import flat_model, parse, second_fundamental_form
from contactgeo.immersion import (
    Immersion,
    mean_curvature,
    sff_norm2,
    shape_operator,
    umbilicity_residual,
)


def immerse(params, components, domain, model):
    exprs = tuple(parse(c, params) for c in components)
    return Immersion(params=tuple(params), components=exprs, domain=domain, ambient=model)


circle = immerse(["w"], ["cos(w)", "sin(w)", "0"], {"w": (0.0, 6.2)}, flat_model(1))
s = second_fundamental_form(circle, {"w": 1.0})
n1, n2 = sff_norm2(s)
print("unit circle:")
print("  ||sigma||^2 (two paths):", n1, n2)
print("  |H|:", s.gnorm(mean_curvature(s)))
print("  umbilicity residual:", umbilicity_residual(s))

paraboloid = immerse(
    ["u", "v"],
    ["u", "v", "0", "u^2+v^2", "0"],
    {"u": (-1, 1), "v": (-1, 1)},
    flat_model(2),
)
s = second_fundamental_form(paraboloid, {"u": 0.0, "v": 0.0})
n1, _ = sff_norm2(s)
print("paraboloid at the origin:")
print("  ||sigma||^2:", n1, " (expect 8 = 2^2 + 2^2)")
print("  |H|:", s.gnorm(mean_curvature(s)), " (expect 2)")

# The shape operator in the orthonormal tangent frame, for the normal
# direction carrying the curvature.
for N in s.normal_frame:
    A = shape_operator(s, N)
    if abs(A).max() > 1e-12:
        print("  shape operator for the curved normal direction:")
        print(" ", A.tolist())
