"""Run the maximum-principle monitors on a real flow and on a deliberately bad one."""

import numpy as np

from sigmakflow import RadialField, SpeedParams, flow
from sigmakflow import diagnostics as D

p = SpeedParams(2, 1, 1)
u0 = lambda s: -2.0 * np.sqrt(1 - s * s) - 1.0
state = flow.dual_state(RadialField.from_function(u0, 0.9, 90), p)
extremum = D.BoundaryExtremumMonitor()
state, _ = flow.integrate(state, 0.5, observer=extremum)
s = extremum.series()
print(f"{s.name}: worst relative excess {s.values.max():.2e}, verdict {'pass' if s.verdict else 'fail'}")

# A tampered history: the interior value of F x_{n+1} jumps above every boundary value.
bad = D.MonitorSeries("boundary_extremum_tampered", [0.0, 0.1, 0.2], [0.0, 3e-3, 0.0], "max_le", 1e-6)
print(f"{bad.name}: verdict {'pass' if bad.verdict else 'fail'}")
