"""Run-time configuration.

Precedence: explicit overrides (CLI flags) > the key=value file named by the
``L1LAB_CONFIG`` environment variable > built-in defaults.
"""

from __future__ import annotations

import dataclasses
import os

ENV_VAR = "L1LAB_CONFIG"


@dataclasses.dataclass(frozen=True)
class Config:
    # threshold bisection
    tol_beta: float = 1e-5
    feasibility_margin: float = 1e-9   # strict margin: feasible iff total < -margin
    # quadrature
    quad_rel_tol: float = 1e-9
    # local minimization
    minimize_max_iter: int = 4000
    minimize_restarts: int = 3
    # empirical verification
    recovery_tol: float = 1e-5
    bp_max_iter: int = 30000
    bp_tol: float = 1e-7
    # parallelism (None -> os.cpu_count())
    jobs: int | None = None

    def effective_jobs(self) -> int:
        return self.jobs if self.jobs else (os.cpu_count() or 1)


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(Config)}


def _coerce(name, raw):
    raw = raw.strip()
    if name in ("minimize_max_iter", "minimize_restarts", "bp_max_iter", "jobs"):
        return int(raw)
    return float(raw)


def load_config(overrides: dict | None = None) -> Config:
    """Build a Config from defaults, the L1LAB_CONFIG file, then overrides."""
    values = {}
    path = os.environ.get(ENV_VAR)
    if path:
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, _, raw = line.partition("=")
                key = key.strip()
                if key not in _FIELD_TYPES:
                    raise KeyError(f"unknown config key {key!r} in {path}")
                values[key] = _coerce(key, raw)
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _FIELD_TYPES:
            raise KeyError(f"unknown config key {key!r}")
        values[key] = val
    return Config(**values)


DEFAULT = Config()
