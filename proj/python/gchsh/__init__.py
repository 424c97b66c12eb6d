"""Fidelity bounds for self-testing from generalized CHSH scores."""

from ._gchsh import (
    QUANTUM_BOUND,
    THETA_MAX,
    THETA_MIN,
    BoundCurve,
    InfeasibleScoreError,
    RegionError,
    SweepIncompleteError,
    SweepPoint,
    TableError,
    TableIncompleteError,
    bell_operator,
    bound_at,
    compute_curve,
    in_region,
    load_table,
    local_bound,
    min_fidelity_over_angles,
    normalize,
    run_cli,
    save_table,
    score_from_correlators,
    select,
    strength_g,
    strength_g_tilde,
    worst_case_fidelity,
)

__all__ = [name for name in dir() if not name.startswith("_")]
