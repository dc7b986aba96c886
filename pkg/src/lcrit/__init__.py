"""Dirichlet characters, Dirichlet L-functions and numerical checks of ERH criteria."""

__version__ = "0.1.0"

from .characters import (  # noqa: E402
    Character,
    build_group,
    conductor,
    enumerate_characters,
    evaluate,
    is_primitive,
    primitive_characters,
)
from .lfunctions import (  # noqa: E402
    LContext,
    functional_equation_residual,
    g_value,
    lambda_value,
    l_value,
    make_context,
    psi_value,
    root_number,
)
from .special import HurwitzParams, gauss_sum, hurwitz_zeta, log_gamma  # noqa: E402

__all__ = [
    "Character",
    "HurwitzParams",
    "LContext",
    "build_group",
    "conductor",
    "enumerate_characters",
    "evaluate",
    "functional_equation_residual",
    "g_value",
    "gauss_sum",
    "hurwitz_zeta",
    "is_primitive",
    "l_value",
    "lambda_value",
    "log_gamma",
    "make_context",
    "primitive_characters",
    "psi_value",
    "root_number",
]
