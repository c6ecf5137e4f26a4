"""Scaling two-point functions and the ODE residuals they leave."""

import numpy as np

from planargeo.continuum import ScalingFunction, distance_probability, ode_for, scaling_two_point

fams = {"tetravalent": ScalingFunction.tetravalent(), "wronskian2": ScalingFunction.wronskian(2),
        "ising": ScalingFunction.ising()}
print(f"{'r':>5}" + "".join(f"{k:>24}" for k in fams))
for r in np.linspace(0.5, 4.0, 8):
    row = []
    for fam in fams.values():
        d = list(scaling_two_point(fam, float(r), 4).coefficients)
        row.append(f"{d[0]:>13.6e} ({abs(ode_for(fam).evaluate(d)):.0e})")
    print(f"{r:>5.2f}" + "".join(f"{c:>24}" for c in row))

print("\nP(r) for the tetravalent limit")
for r in (0.5, 1.0, 2.0, 3.0, 5.0):
    print(f"  P({r}) = {distance_probability(r):.6f}")
