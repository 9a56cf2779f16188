"""Run configuration shared by the library and the CLI.

Every CLI invocation resolves one RunConfig and echoes it next to the
results, so an artifact can always be traced back to the exact settings
that produced it.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass


def thread_count() -> int:
    """Thread cap from TWISTLAB_THREADS, defaulting to the available cores."""
    v = os.environ.get("TWISTLAB_THREADS")
    if v:
        try:
            return max(1, int(v))
        except ValueError:
            pass
    return os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    # grid rule: R = grid_margin + 2*sqrt(mu), h <= min(pi/(osc_factor*sqrt(mu)), R/min_divisions)
    grid_margin: float = 4.0
    osc_factor: float = 4.0
    min_divisions: int = 64
    # memory/time budgets
    max_grid_points: int = 1 << 26
    max_conv_ops: float = 5e9
    # special function caps
    k_max: int = 2000
    # quadrature settings
    window_quadrature_points: int = 4096
    window_cutoff: float = 1e-12
    oscillatory_panel_phase: float = 10.0
    # reproducibility
    seed: int = 0
    threads: int = dataclasses.field(default_factory=thread_count)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def sha256(self) -> str:
        blob = json.dumps(self.as_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()


DEFAULT_CONFIG = RunConfig()
