"""Legendre transform of a hyperboloid, its inverse, and the scaling rule."""

import numpy as np

from sigmakflow import RadialField
from sigmakflow.legendre import legendre_inverse, legendre_transform

a, c = 1.5, 0.5
u = RadialField.from_function(lambda x: c + np.sqrt(a * a + x * x), 10.0, 1000)
dual = legendre_transform(u, r=0.9, N=90)
closed = -a * np.sqrt(1 - dual.r ** 2) - c
print(f"transform vs closed form: sup {np.max(np.abs(dual.values - closed)):.2e}")

back = legendre_inverse(dual)
print(f"round trip on |x| <= {back.rmax:.3f}: sup {np.max(np.abs(back.values - (c + np.sqrt(a * a + back.r ** 2)))):.2e}")

A = 2.0
uA = RadialField.from_function(lambda x: A * (c + np.sqrt(a * a + (x / A) ** 2)), 20.0, 1000)
print(f"scaling rule T[A u(./A)] = A T[u]: sup {np.max(np.abs(legendre_transform(uA, r=0.9, N=90).values - A * dual.values)):.2e}")
