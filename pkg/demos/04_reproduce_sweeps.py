"""Run the canned experiment sweeps and skim their outputs.

Uses reduced grids so the whole script finishes in about a minute; drop the
overrides (or use `gaussnm reproduce --figure N`) for the full versions.
"""

import os
from dataclasses import replace

import numpy as np

from gaussnm.experiments import fig_defaults, format_config, run_experiment

OUT = "demo_sweeps"


def skim(path, n=3):
    with open(path) as fh:
        lines = fh.read().splitlines()
    print(f"--- {os.path.basename(path)} ({len(lines) - 1} rows)")
    for line in lines[: n + 1]:
        print("   ", line[:100])


# damping channel sweep, small alpha grid
cfg1 = replace(fig_defaults(1), alpha_points=5, workers=0)
paths = run_experiment(cfg1, OUT)
skim(paths[0])

# diffusion-coefficient curves (two frequencies, four temperatures)
cfg2 = replace(fig_defaults(2), n_steps=600, workers=0)
paths = run_experiment(cfg2, OUT)
skim(paths[0])
data = np.genfromtxt(paths[0], delimiter=",", names=True)
print("    low-T curve at omega0=6 dips to",
      round(float(data["delta_omega0_6_T02"].min()), 4))

# QBM squeezed sweep across temperatures, coarse grid
cfg5 = replace(fig_defaults(5), alpha_points=6, workers=0)
paths = run_experiment(cfg5, OUT)
skim(paths[0], n=6)
data = np.genfromtxt(paths[0], delimiter=",", names=True)
plateaus = [float(data[name][-1]) for name in data.dtype.names[1:]]
print("    plateaus increase with temperature:", [round(p, 4) for p in plateaus])

print("\nthe config format is plain key=value text:")
print(format_config(cfg5))
