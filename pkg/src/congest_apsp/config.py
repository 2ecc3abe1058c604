from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Config:
    """Tunable constants of a run.

    alpha scales the center count (alpha * sqrt(n) * ln n for APSP).
    bandwidth_factor sets the message budget B = factor * ceil(log2 n) bits.
    h overrides the hop bound when set. With las_vegas on, every scaling
    iteration is checked by the distributed verifier and redone on failure.
    """

    alpha: float = 1.0
    bandwidth_factor: int = 8
    weight_exponent: int = 2
    h: int | None = None
    las_vegas: bool = True
    max_attempts: int = 10
    check_oracle: bool = False
