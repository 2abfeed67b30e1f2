"""Restricted rotation averages are convolutions with a grid density.

    python demos/convolution_identity.py
"""

from sumsetlab.averaging import SequenceFamily, measure_at, restrict
from sumsetlab.kronecker import TorusRotation, TrigPolynomial, restricted_average_vs_convolution

rot = TorusRotation.of("sqrt2")
f = TrigPolynomial.character(1)
for j in (10**3, 10**4, 10**5):
    eta = restrict(measure_at(SequenceFamily.interval(), j), lambda n: n % 5 <= 1)
    rep = restricted_average_vs_convolution(f, rot, eta, 256)
    print(f"j = {j:>6}  sup |phi - f*psi| = {rep.discrepancy:.2e}  "
          f"integral psi = {rep.integral_psi}  eta total = {eta.total}")
