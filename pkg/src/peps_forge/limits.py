"""Global-dimension cap for dense simulation.

Everything in this package stores states and operators densely, so the
product of register dimensions is capped. The default suits desk-scale
experiments; set ``PEPS_FORGE_DIM_CAP`` to override.
"""

from __future__ import annotations

import os

from .errors import CapacityError, InvalidInputError

DEFAULT_DIM_CAP = 4096

_ENV_VAR = "PEPS_FORGE_DIM_CAP"


def dim_cap() -> int:
    """Return the active global-dimension cap."""
    raw = os.environ.get(_ENV_VAR)
    if raw is None:
        return DEFAULT_DIM_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise InvalidInputError(f"{_ENV_VAR} must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise InvalidInputError(f"{_ENV_VAR} must be positive, got {cap}")
    return cap


def check_dim(dim: int, what: str) -> None:
    """Raise :class:`CapacityError` when ``dim`` exceeds the active cap."""
    cap = dim_cap()
    if dim > cap:
        raise CapacityError(
            f"{what} requires dimension {dim}, above the cap {cap} "
            f"(set {_ENV_VAR} to raise it)"
        )
