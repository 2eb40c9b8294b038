"""Python access to the space-time Trefftz DG solver."""

from ._core import (
    TtdgError,
    basis_report,
    energy_series,
    h_convergence,
    p_convergence,
    pitch_summary,
    ray_arrivals,
    trefftz_dims,
)

__all__ = [
    "TtdgError",
    "basis_report",
    "energy_series",
    "h_convergence",
    "p_convergence",
    "pitch_summary",
    "ray_arrivals",
    "trefftz_dims",
]
