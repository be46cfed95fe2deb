"""Global numeric configuration: dense-size cap and tolerance hierarchy.

Two tolerance tiers are used throughout the package: CONSTRUCTION_TOL guards
model validity (unitarity, normalization) and ASSERT_TOL guards identities
that hold exactly up to floating-point rounding.
"""

import os

# Largest Hilbert-space dimension d**n for which dense matrices are built.
# 1024 = 10 qubits; override with the SCRAMBLE_DENSE_CAP env var or set_dense_cap.
DEFAULT_DENSE_CAP = 1024

CONSTRUCTION_TOL = 1e-9
ASSERT_TOL = 1e-12

_dense_cap_override: int | None = None


class DenseCapExceeded(Exception):
    """Requested dense matrix would exceed the configured size cap."""


def dense_cap() -> int:
    if _dense_cap_override is not None:
        return _dense_cap_override
    env = os.environ.get("SCRAMBLE_DENSE_CAP")
    if env:
        return int(env)
    return DEFAULT_DENSE_CAP


def set_dense_cap(cap: int | None) -> None:
    """Override the dense cap programmatically (None restores default/env)."""
    global _dense_cap_override
    _dense_cap_override = cap


def check_dense_cap(n: int, d: int = 2) -> None:
    if d**n > dense_cap():
        raise DenseCapExceeded(
            f"d**n = {d}**{n} = {d**n} exceeds the dense cap {dense_cap()}; "
            "raise SCRAMBLE_DENSE_CAP to override"
        )
