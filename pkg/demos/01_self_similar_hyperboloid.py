"""Watch a hyperboloid expand under the flow and compare with the exact solution.

The graph sqrt(a^2 + |x|^2) with the self-similar radius a is carried by the
flow into A(t) * sqrt(a^2 + |x/A(t)|^2). We run the dual flow on a ball and the
primal radial solver and report the sup error at a few times.
"""

import numpy as np

from sigmakflow import BallField2D, RadialField, SpeedParams, flow
from sigmakflow.expander import hyperboloid_radius

p = SpeedParams(2, 1, 1)
a = hyperboloid_radius(p)
print(f"self-similar radius a = {a:.12f}")

# Dual side: u* = -a w* on B_0.9, boundary stamped with A(t) u0*.
field = BallField2D.from_function(lambda x, y: -a * np.sqrt(1 - x * x - y * y), 0.9, 1 / 32)
state = flow.dual_state(field, p)
sup = field.support
for t in (0.25, 0.5, 1.0):
    state, steps = flow.integrate(state, t)
    exact = -a * state.A * np.sqrt(1 - field.rho[sup] ** 2)
    print(f"dual   t={t:4.2f}  A={state.A:.5f}  steps={steps:5d}  sup err={np.max(np.abs(state.field.values[sup] - exact)):.2e}")

# Primal side: radial profile with exact Dirichlet data at R.
R = 10.0
exact = lambda r, t: np.sqrt(a * a * flow.scale_factor(t, 1.0) ** 2 + np.asarray(r) ** 2)
state = flow.primal_state(RadialField.from_function(lambda r: exact(r, 0.0), R, 200), p)
for t in (0.25, 0.5, 1.0):
    state, _ = flow.integrate(state, t, boundary_provider=lambda s: exact(R, s))
    err = np.max(np.abs(state.field.values - exact(state.field.r, t)))
    print(f"primal t={t:4.2f}  sup err={err:.2e}")
