"""Run records and their versioned CSV serialization.

The refusal reason is the last column and is parsed with a bounded split,
so it may contain commas.  ``without_timing`` strips the wall-clock field,
the one run-to-run nondeterministic value; everything else is a pure
function of (config, base seed).
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

SCHEMA_LINE = "#schema=1"
_COLUMNS = [
    "algorithm",
    "p",
    "d",
    "n",
    "epsilon",
    "delta",
    "trial",
    "seed",
    "excess_risk",
    "trunc_fraction",
    "wall_ms",
    "refused",
    "refusal_reason",
]


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one (algorithm, n, epsilon, trial) cell."""

    algorithm: str
    p: float
    d: int
    n: int
    epsilon: float
    delta: float
    trial: int
    seed: int
    excess_risk: Optional[float]
    trunc_fraction: Optional[float]
    wall_ms: float
    refused: bool = False
    refusal_reason: str = ""

    def __post_init__(self):
        if self.refused and self.excess_risk is not None:
            raise ValueError("refused cells must not carry an excess_risk value")


def without_timing(records):
    """Copies with wall_ms zeroed, for determinism comparisons."""
    return [replace(r, wall_ms=0.0) for r in records]


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_records(records, path):
    """Emit records as CSV, prefixed by the schema comment line."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCHEMA_LINE + "\n")
        fh.write(",".join(_COLUMNS) + "\n")
        for r in records:
            row = [
                r.algorithm,
                _fmt(r.p),
                _fmt(r.d),
                _fmt(r.n),
                _fmt(r.epsilon),
                _fmt(r.delta),
                _fmt(r.trial),
                _fmt(r.seed),
                _fmt(r.excess_risk),
                _fmt(r.trunc_fraction),
                _fmt(r.wall_ms),
                _fmt(r.refused),
                r.refusal_reason.replace("\n", " "),
            ]
            fh.write(",".join(row) + "\n")


def read_records(path):
    """Parse a CSV written by ``write_records``; round-trips field-for-field."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
        if first != SCHEMA_LINE:
            raise ValueError(f"unrecognized schema line: {first!r}")
        header = fh.readline().strip().split(",")
        if header != _COLUMNS:
            raise ValueError("CSV columns do not match schema 1")
        out = []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            f = line.split(",", len(_COLUMNS) - 1)
            out.append(
                RunRecord(
                    algorithm=f[0],
                    p=float(f[1]),
                    d=int(f[2]),
                    n=int(f[3]),
                    epsilon=float(f[4]),
                    delta=float(f[5]),
                    trial=int(f[6]),
                    seed=int(f[7]),
                    excess_risk=float(f[8]) if f[8] else None,
                    trunc_fraction=float(f[9]) if f[9] else None,
                    wall_ms=float(f[10]),
                    refused=f[11] == "1",
                    refusal_reason=f[12],
                )
            )
    return out
