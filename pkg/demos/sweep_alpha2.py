"""
Sweeping the prey-predator coupling
===================================

Four runs of the three-level food chain, one per value of alpha2, starting
from (1, 1, 1). For each run we count oscillation peaks, measure how much
the worker oscillation calms down in the second half, and estimate how far
employers trail workers. SVG overlays land in ``demo-output/``.
"""
from pathlib import Path

import numpy as np

from labordyn import (IntegrationConfig, ModelParams, PlotSpec, find_peaks, integrate, phase_lag,
                      relaxation_metric, render_svg)

out = Path("demo-output")
out.mkdir(exist_ok=True)

# 200 time units at dt = 0.01, keeping every 10th step
config = IntegrationConfig(t0=0.0, t_end=200.0, dt=0.01, record_every=10)

print(f"{'alpha2':>6} {'maxima v':>9} {'peaks v':>8} {'relax v':>9} {'lag v->w':>9}")
for alpha2 in (1.0, 1.4, 1.8, 2.0):
    params = ModelParams(alpha2=alpha2)
    traj = integrate(params, (1.0, 1.0, 1.0), config)

    # raw local maxima vs. peaks that survive the default 5% prominence filter
    raw = len(find_peaks(traj.v, smoothing_window=1, prominence_min=0.0))
    filtered = len(find_peaks(traj.v))

    ratio = relaxation_metric(traj.v).ratio
    lag = phase_lag(traj.v, traj.w, max_lag=30)
    print(f"{alpha2:6.1f} {raw:9d} {filtered:8d} {ratio:9.2e} {lag * 0.1:8.1f}t")

    svg = render_svg(traj, PlotSpec("timeseries_overlay", ("v", "w"), title=f"alpha2 = {alpha2}"))
    (out / f"overlay_alpha2_{alpha2}.svg").write_bytes(svg)

# At alpha2 = 2.0 the defaults sit exactly on alpha1*c = alpha2*a: there is
# no interior equilibrium to settle on, and the v-w portrait keeps cycling.
traj = integrate(ModelParams(alpha2=2.0), (1.0, 1.0, 1.0), config)
late = traj.times > 100
print("late-time v range:", np.ptp(traj.v[late]).round(3), " w range:", np.ptp(traj.w[late]).round(3))
(out / "portrait_vw_alpha2_2.0.svg").write_bytes(
    render_svg(traj, PlotSpec("phase_portrait_2d", ("v", "w"), title="v-w portrait, alpha2 = 2.0")))
