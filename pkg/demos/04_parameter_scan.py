"""Where in (eta, lambda) the model matches the measured ground-state splittings.

Scans a coarse grid at several orbital reduction factors and draws the
triple-overlap region (Delta_GS, g_par, g_perp all within tolerance) as text.
Targets come from the shipped example config.
"""

import json
from pathlib import Path

import numpy as np

from tmspin.cli import RunConfig, normalize_config
from tmspin.fitting import GridSpec, scan

cfg = RunConfig.from_dict(normalize_config(json.loads((Path(__file__).parents[1] / "configs" / "v_alpha_4h.json").read_text())))
grid = GridSpec(-1.0, 0.0, 0.05, 0.0, 30.0, 1.0)

for k in (0.18, 0.3, 0.37):
    with np.errstate(invalid="ignore"):
        g = scan(cfg.model.with_(k=k), cfg.targets, grid, threads=4)
    print(f"\nk = {k}  (rows: eta from -1 to 0, columns: lambda 0..30 meV; # all three, + two, . one, blank none)")
    score = g.match_dgs.astype(int) + g.match_gpar + g.match_gperp
    for eta, row in zip(g.etas, score):
        print(f"{eta:6.2f} " + "".join(" .+#"[s] for s in row))
    c = g.centroid()
    print("centroid:", "none" if c is None else f"eta={c[0]:.3f}, lambda={c[1]:.2f} meV")
