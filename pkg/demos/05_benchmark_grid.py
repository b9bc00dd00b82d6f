"""End-to-end benchmark: config -> grid run -> CSV -> log-log slopes.

The same flow is available from the command line:

    dpsco run --config exp.json --out runs.csv
    dpsco slope --in runs.csv --group algo,eps,d
"""

import json
import tempfile
from pathlib import Path

from dpsco.bench.config import ExperimentConfig
from dpsco.bench.records import read_records, write_records
from dpsco.bench.runner import run_experiment
from dpsco.bench.slopes import fit_slope

doc = {
    "algorithm": "app_objp_sc",
    "loss": {"name": "mean_point", "domain_radius": 1.4, "constraint_radius": 1.0},
    "distribution": {"name": "ball_cloud", "mu_scale": 0.4, "spread": 1.0},
    "geometry": {"p": 2.0, "d": 10},
    "constraint": {"set": "l2", "radius": 1.0},
    "n_grid": [128, 256, 512, 1024, 2048],
    "eps_grid": [0.5, 1.0],
    "delta": 1e-5,
    "trials": 12,
    "base_seed": 2024,
    "evaluation": {"policy": "oracle"},
    "parallelism": 2,
}

cfg = ExperimentConfig.from_dict(doc)
records = run_experiment(cfg)

out = Path(tempfile.mkdtemp()) / "runs.csv"
write_records(records, out)
print(f"wrote {len(records)} records to {out}")

# Round-trip and summarize.
records = read_records(out)
by = {}
for r in records:
    by.setdefault((r.epsilon, r.n), []).append(r.excess_risk)
print("\neps    n      mean excess risk")
for (eps, n), vals in sorted(by.items()):
    print(f"{eps:<6} {n:<6} {sum(vals) / len(vals):.5f}")

print("\nfitted log-log slopes (excess risk vs n):")
for key, fit in fit_slope(records, ["algo", "eps"]).items():
    print(f"  {key}: slope {fit.slope:+.3f} (r2 {fit.r2:.3f}, cells {fit.n_cells})")

print("\nequivalent CLI config document:")
print(json.dumps(doc, indent=2)[:400] + " ...")
