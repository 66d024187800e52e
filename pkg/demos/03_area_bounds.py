"""Envelope bounds on the area integral and the resulting certificates.

After y = x^(n - 1/2) the area integral is a multiple of
I(a) = int dy / sqrt(f(y)).  Two piecewise quadratic envelopes g1 >= f and
g2 <= f have arcsine integrals, which bound I(a) from below and above.
"""

import math

import numpy as np

from otsuki import bounds, geometry
from otsuki.geometry import ShapeParameter

n = 3
shape = ShapeParameter(n, 0.5 * geometry.critical_parameter(n))
p = bounds.envelope_params(shape)
print(f"y1 = {p.y1:.6f}, y_c = {p.y_c:.6f}, y2 = {p.y2:.6f}, A0 = {p.A0:.6f}")

# %% the envelopes bound f on a dense grid
min_h1, max_h2 = bounds.envelope_margins(p, 10_000)
print(f"min(g1 - f) = {min_h1:.2e}, max(g2 - f) = {max_h2:.2e}")
print("g1 at y_c from each side:", bounds.g1_eval(p, p.y_c, "left"), bounds.g1_eval(p, p.y_c, "right"))

# %% closed forms against quadrature
closed = bounds.closed_form_envelope_integrals(p)
quad = bounds.quadrature_envelope_integrals(p)
for name, c, q in zip(closed._fields, closed, quad):
    print(f"{name:>9}: closed {c:.15f}  quadrature {q:.15f}")
print(f"g1 left by the arcsine route: {bounds.g1_left_arcsine(p):.15f}")

# %% the sandwich for I(a)
I = bounds.y_integral(p)
print(f"{bounds.lower_bound_coefficient(p):.6f} A0 pi <= I = {I / (p.A0 * math.pi):.6f} A0 pi")

# %% certificates
reports = [bounds.certify_theorem1(n, np.geomspace(1e-6, 1 - 1e-6, 50) * p.a0)]
reports += [bounds.certify_corollary2(n), bounds.certify_theorem3(n), bounds.certify_theorem4(n)]
reports += bounds.certify_envelopes(n)
for r in reports:
    print(f"{r.claim:>12}  passed={r.passed}  margin={r.margin:.6g}")
