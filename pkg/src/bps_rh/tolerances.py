"""Default tolerance table for the verification suites.

Set BPS_RH_TOL to the path of a JSON object to override individual entries.
"""
from __future__ import annotations

import json
import os

DEFAULTS = {
    "lemma31.recurrence": 1e-11,
    "lemma31.reflection": 1e-9,
    "lemma31.large_y": 1e-3,
    "thm32": 1e-6,
    "jumps": 1e-9,
    "limits.final": 1e-2,
    "growth.stability": 0.1,
    "flatness.residual": 1e-5,
    "flatness.ratio_lo": 3.0,
    "flatness.ratio_hi": 5.0,
    "flatness.gradient": 1e-8,
    "quadrature": 1e-9,
}


def load(path: str | None = None) -> dict:
    table = dict(DEFAULTS)
    path = path or os.environ.get("BPS_RH_TOL")
    if path:
        with open(path, encoding="utf-8") as fh:
            override = json.load(fh)
        unknown = set(override) - set(DEFAULTS)
        if unknown:
            raise KeyError(f"unknown tolerance keys: {sorted(unknown)}")
        table.update({k: float(v) for k, v in override.items()})
    return table
