"""Multi-coset ruler design and cooperative compressive power spectrum estimation."""

from ._core import (
    CosetPattern,
    DesignReport,
    RulerBank,
    SystemMatrix,
    are_non_overlapping,
    assemble_rx,
    build_system,
    check_full_column_rank,
    design_greedy,
    design_m2,
    difference_set,
    exact_spectrum,
    format_bank,
    is_circular_golomb,
    is_complete_circular_ruler,
    is_incomplete_circular_ruler,
    lower_bound_Z,
    nmse,
    parse_bank,
    power_spectrum,
    reconstruct_r0,
    reconstruct_r1,
    sweep,
    union_covers,
    verify_bank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
