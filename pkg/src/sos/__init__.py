"""
SOS S-lemma machinery: monomial bases, coefficient operators and the ellipsoid solve
"""
from src.sos.backend import ConicBackend, SolveOutcome
from src.sos.basis import MonomialBasis, monomial_basis
from src.sos.engine import (
    AssembledLmi,
    EllipsoidBound,
    EllipsoidFrame,
    EllipsoidObjective,
    SosCertificate,
    certificate_residual,
    dump_lmi,
    solve_min_volume_ellipsoid,
)
from src.sos.operators import (
    coefficient_operator,
    gram_operator,
    lift_product,
    placement_operator,
    polynomial_coefficients,
    shifted_form_operator,
)

__all__ = [
    "AssembledLmi",
    "ConicBackend",
    "EllipsoidBound",
    "EllipsoidFrame",
    "EllipsoidObjective",
    "MonomialBasis",
    "SolveOutcome",
    "SosCertificate",
    "certificate_residual",
    "coefficient_operator",
    "dump_lmi",
    "gram_operator",
    "lift_product",
    "monomial_basis",
    "placement_operator",
    "polynomial_coefficients",
    "shifted_form_operator",
    "solve_min_volume_ellipsoid",
]
