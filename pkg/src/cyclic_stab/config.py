"""Workbench configuration.

Everything downstream is a pure function of immutable values, so the config
is a frozen dataclass threaded explicitly (no globals).
"""

from __future__ import annotations

import os
from dataclasses import dataclass

ENV_BOUND = "CYCLIC_STAB_BOUND"


@dataclass(frozen=True)
class Config:
    bound: int = 8            # total-degree truncation of the coefficient ring
    rcharge_scale: int = 2    # morphism degree of a weight-1 twist
    window: int = 2           # level window (in units of 1) for materialised lifts

    def __post_init__(self):
        if self.bound < 2:
            raise ValueError("truncation bound must be at least 2")
        if self.window < 0:
            raise ValueError("window must be nonnegative")


def config_from_env(base: Config | None = None) -> Config:
    """Apply the CYCLIC_STAB_BOUND override if present."""
    cfg = base or Config()
    raw = os.environ.get(ENV_BOUND)
    if raw is None:
        return cfg
    return Config(bound=int(raw), rcharge_scale=cfg.rcharge_scale, window=cfg.window)


DEFAULT_CONFIG = Config()
