"""Numerical lab for the symmetric minimal surface equation (C++ core)."""

from ._smelab import (
    BoundaryData,
    ContinuationSchedule,
    DomainError,
    Field,
    Grid,
    NumericalError,
    Params,
    ParseError,
    PreconditionError,
    SolveConfig,
    StructuralError,
    area_functional,
    area_gradient,
    blowup_slopes,
    continuation_run,
    gradient,
    holder_half_quotient,
    integrate_exterior,
    integrate_n1,
    mean_curvature_operator,
    radial_residual,
    read_field_csv,
    singular_set,
    slope_sup,
    sme_residual,
    solve_dirichlet,
    verify_corpus,
    weak_form_residual,
    weak_solution_check,
    write_field_csv,
)

__all__ = [name for name in dir() if not name.startswith("_")]
