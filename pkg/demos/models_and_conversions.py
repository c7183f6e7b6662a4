"""One subspace, several coordinate systems.

A 2-plane in R^4 is written as an orthonormal basis, a projection, a
reflection, a point of a general quadratic model, a full-rank frame and a
coset of O(4). Every route ends at the same projection.

Run: python3 demos/models_and_conversions.py
"""
from fractions import Fraction

import numpy as np

from grassnp import conversions as cv
from grassnp.manifolds import QuotientPoint, random_point, validate

y = random_point("V/O", 4, 2, seed=5)
p = cv.phi2(y)
print("projection from a basis:\n", np.round(p.P, 4))

w = cv.phi3(p, 1, -1)
print("reflection 2P - I squares to I:", np.allclose(w.W @ w.W, np.eye(4)))

q = cv.phi3(p, Fraction(3), Fraction(1, 2))
print("quadratic model (a, b) = (3, 1/2) valid:", validate(q) == [])
print("and back:", np.allclose(cv.phi3_inv(q).P, p.P))

s = cv.phi4(y)
frame = QuotientPoint(s.rep @ np.array([[2.0, 1.0], [0.0, -3.0]]), "St/GL", 4, 2)
print("rescaled frame is the same subspace:", cv.same_coset(s, frame))

o = cv.phi1_inv(y)
print("coset of O(4) gives the same projection:",
      np.allclose(cv.phi2(cv.phi1(o)).P, p.P))

path = cv.conversion_path("St/GL", "GL/P")
print("route from frames to flags:", " -> ".join(path))

# two different rotations in the same O(2) x O(1) coset
c, s_ = 0.6, 0.8
Q1 = np.array([[c, 0, -s_], [0, 1, 0], [s_, 0, c]])
Q2 = np.array([[c**3 - c * s_**2, -2 * c**2 * s_, -s_],
               [2 * c * s_, c**2 - s_**2, 0],
               [c**2 * s_ - s_**3, -2 * c * s_**2, c]])
print("distinct matrices, one coset:",
      cv.same_coset(QuotientPoint(Q1, "O/OxO", 3, 2), QuotientPoint(Q2, "O/OxO", 3, 2)))
