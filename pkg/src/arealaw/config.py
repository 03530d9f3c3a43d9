"""Size caps and default constants.

All values are plain attributes of :data:`LIMITS` / :data:`CONSTANTS` so
callers (and the CLI) can override them for one run.
"""
from dataclasses import dataclass


@dataclass
class Limits:
    max_state_dim: int = 2**24
    oracle_cap: int = 4000
    operator_svd_cap: int = 256


@dataclass
class Constants:
    # unknown O(1) constants of the truncation schedule and rank estimate
    C1: float = 1.0
    C2: float = 1.0
    C: float = 1.0
    C_rank: float = 1.0
    k_max: int = 8


LIMITS = Limits()
CONSTANTS = Constants()
