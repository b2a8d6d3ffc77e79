"""
Where the food chain comes to rest
==================================

Closed-form equilibrium for bilinear responses, the fixed-point route for
Holling type II with k2 = 0, and what happens when the parameters push the
employer level negative.
"""
import numpy as np

from labordyn import (HOLLING, IntegrationConfig, ModelParams, equilibrium_holling_k2zero, equilibrium_lv,
                      integrate, verify_equilibrium)
from labordyn.errors import SingularEquilibrium

# Bilinear responses: v* = a/(alpha1 v0) = 5 with the defaults
lv = equilibrium_lv(ModelParams())
print("LV equilibrium:", np.round(lv.state, 6), "residual", lv.residual)

# Starting exactly there, nothing moves
traj = integrate(ModelParams(), lv.state, IntegrationConfig(0.0, 50.0, 0.01))
print("max drift over 50 units:", np.max(np.abs(traj.states - np.asarray(lv.state))))

# alpha2 = 2 makes alpha1*c equal alpha2*a and the closed form breaks down
try:
    equilibrium_lv(ModelParams(alpha2=2.0))
except SingularEquilibrium as exc:
    print("alpha2 = 2.0:", exc)

# Holling type II on both links, no saturation on the second one
holling = ModelParams(response1=HOLLING, response2=HOLLING, k2=0.0)
fp = equilibrium_holling_k2zero(holling, seed=(1.0, 1.0, 1.0))
print(f"Holling fixed point after {fp.iterations} iterations:", np.round(fp.state, 6), "residual", fp.residual)

# The system has a second interior root near v = 6.7, but the map is
# repelled by it: seeds on either side all land on v = 9.94
for v_seed in (2.0, 6.0, 15.0):
    other = equilibrium_holling_k2zero(holling, seed=(1.0, v_seed, 1.0))
    print(f"  seed v={v_seed}: {np.round(other.state, 4)} after {other.iterations} iterations")

# Strong worker decay (b above alpha1/k1) leaves no room for positive employers
heavy = ModelParams(response1=HOLLING, response2=HOLLING, b=5.0)
neg = equilibrium_holling_k2zero(heavy)
print("b = 5:", np.round(neg.state, 4), "negative components:", neg.negative_components)

print("derivative norm at (1,1,1):", verify_equilibrium(ModelParams(), (1.0, 1.0, 1.0)))
