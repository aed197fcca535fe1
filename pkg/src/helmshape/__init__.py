"""2D exterior-Helmholtz boundary-integral toolkit.

Nystrom discretization of Helmholtz layer potentials on smooth closed
curves, first-order shape-perturbation expansions of the boundary
operators and of the Dirichlet-to-Neumann / Neumann-to-Dirichlet maps,
and recovery of Fourier coefficients of a small normal deformation of a
disk from boundary measurements taken on the deformed shape.
"""

from .errors import (
    EvaluationError,
    GeometryError,
    ResonanceError,
    UnrecoverableModeError,
)
from .geometry import BoundaryCurve, PerturbationProfile, make_disk, make_smooth_curve, perturb_boundary
from .layerpot import (
    BoundaryDensity,
    OperatorMatrix,
    assemble_adjoint_double,
    assemble_double,
    assemble_hypersingular,
    assemble_single,
    eval_field,
    jump_check,
)
from .forward import IncidentField, ScatterSolution, disk_series_oracle, radiating_mode, solve_hard, solve_soft
from .perturb import assemble_A1, assemble_D1, assemble_K1, assemble_S1
from .measure import BracketResult, bracket, leading_term, order_study
from .dno_ndo import dno, dno_bracket_leading, dno_perturbed, ndo, ndo_bracket_leading, ndo_perturbed
from .recon import ModeCoefficient, ReconstructionResult, coeff_cnm, reconstruct, sigma1, synthesize_measurements

__all__ = [
    "BoundaryCurve",
    "BoundaryDensity",
    "BracketResult",
    "EvaluationError",
    "GeometryError",
    "IncidentField",
    "ModeCoefficient",
    "OperatorMatrix",
    "PerturbationProfile",
    "ReconstructionResult",
    "ResonanceError",
    "ScatterSolution",
    "UnrecoverableModeError",
    "assemble_A1",
    "assemble_D1",
    "assemble_K1",
    "assemble_S1",
    "assemble_adjoint_double",
    "assemble_double",
    "assemble_hypersingular",
    "assemble_single",
    "bracket",
    "coeff_cnm",
    "disk_series_oracle",
    "dno",
    "dno_bracket_leading",
    "dno_perturbed",
    "eval_field",
    "jump_check",
    "leading_term",
    "make_disk",
    "make_smooth_curve",
    "ndo",
    "ndo_bracket_leading",
    "ndo_perturbed",
    "order_study",
    "perturb_boundary",
    "radiating_mode",
    "reconstruct",
    "sigma1",
    "solve_hard",
    "solve_soft",
    "synthesize_measurements",
]

__version__ = "0.1.0"
