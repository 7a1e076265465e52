"""Instrumented conjugate gradient experiments."""

import csv
import io
import json

from ._core import (
    ConfigError,
    Error,
    MonotonicityReport,
    RoundingModel,
    UsageError,
    scan_almost_monotonicity,
    theorem5_threshold,
)
from . import _core

__all__ = [
    "ConfigError",
    "Error",
    "MonotonicityReport",
    "RoundingModel",
    "UsageError",
    "compare",
    "parse_trace",
    "scan_almost_monotonicity",
    "solve",
    "theorem5_threshold",
    "verify",
]


def parse_trace(text):
    """Trace CSV to a list of dicts; empty cells become None."""
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rec = {}
        for key, cell in row.items():
            if cell == "":
                rec[key] = None
            elif key == "k":
                rec[key] = int(cell)
            else:
                rec[key] = float(cell)
        rows.append(rec)
    return rows


def solve(**config):
    """Runs one experiment. Keyword arguments are config keys
    (generator, matrix, precision, criteria, max_iters, ...).
    Returns (report, trace)."""
    report, trace = _core._solve(json.dumps(config))
    return json.loads(report), parse_trace(trace)


def compare(precisions, **config):
    return json.loads(_core._compare(json.dumps(config), list(precisions)))


def verify(suite):
    return json.loads(_core._verify(suite))
