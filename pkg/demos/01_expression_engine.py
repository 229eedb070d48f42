"""Tour of the expression DSL and its forward-mode derivatives.

The whole library runs on exact first and second derivatives of small
scalar expressions; this script shows the parser, the derivative engine
and how close the exact values sit to finite differences.
"""

import numpy as np

from contactgeo import exprdsl

# Parsing: parameters are declared up front, named constants are folded in.
e = exprdsl.parse("sqrt(2*(u^2+v^2)) * cos(k*w)", ["u", "v", "w"], {"k": 0.5})
point = {"u": 1.0, "v": 1.0, "w": 0.3}

print("source:      ", e.source)
print("canonical:   ", exprdsl.to_source(e))
print("value:       ", exprdsl.evaluate(e, point))

# Exact gradient (one dual-number pass per parameter).
grad = exprdsl.gradient(e, point)
print("gradient:    ", grad)

# Exact Hessian (one hyper-dual pass per entry), symmetric by construction.
hess = exprdsl.hessian(e, point)
print("hessian:")
print(hess)

# Compare against central differences -- agreement is limited only by the
# finite-difference truncation error, not by the dual-number evaluation.
h = 1e-6
fd = np.zeros(3)
for i, name in enumerate(e.params):
    hi, lo = dict(point), dict(point)
    hi[name] += h
    lo[name] -= h
    fd[i] = (exprdsl.evaluate(e, hi) - exprdsl.evaluate(e, lo)) / (2 * h)
print("max |grad - fd|:", np.max(np.abs(grad - fd)))

# Domain rules are enforced: sqrt of a negative number is an error, not a nan.
bad = exprdsl.parse("sqrt(x)", ["x"])
try:
    exprdsl.evaluate(bad, {"x": -1.0})
except exprdsl.DomainError as exc:
    print("domain error caught:", exc)
