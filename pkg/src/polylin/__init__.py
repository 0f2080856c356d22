"""Linearizations of matrix polynomials, pencil duality and eigenvalue conditioning."""

from .duality import (
    BasisCompletion,
    DualityCertificate,
    bases_completion,
    dual_identity_block,
    equivalence_witness,
    left_dual_qr,
    right_dual_qr,
    verify_dual,
)
from .eigen import (
    PencilEigenSolution,
    companion_right_vector,
    companion_vectors_forward,
    match_eigenvalues,
    recover_w_vectors,
    residual_norm,
    solve_pencil,
)
from .conditioning import ConditionReport, pencil_eig_condition, poly_eig_condition, t_of_d, w_condition_bound
from .linearize import (
    WLinearization,
    companion_second_form,
    dl_pencil,
    fiedler_pencil,
    l2_residual,
    orthobasis_companion,
    w_linearization,
)
from .polycore import (
    EigenTriple,
    HomogeneousPoint,
    MatrixPolynomial,
    Pencil,
    chordal_distance,
    col_stack,
    evaluate,
    rev_poly,
    row_stack,
    scale_fan_lin_van_dooren,
)

__version__ = "0.1.0"
