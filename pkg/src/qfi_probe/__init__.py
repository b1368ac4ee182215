"""Quantum Fisher information for identifying the qudit depolarizing channel."""

__version__ = "0.1.0"

from .channels import (
    ParamFamily,
    SchemeSpec,
    depolarize,
    family,
    max_entangled_state,
    schmidt_state,
)
from .closed_form import (
    QfiPoint,
    g_eta,
    gain_e_over_o,
    qfi_h,
    qfi_quasiclassical,
    qfi_scheme,
    threshold_b_vs_o,
)
from .linalg import hermitian_eig, kron, solve_sld
from .oracle import (
    CrbReport,
    Povm,
    classical_fisher,
    crb_experiment,
    mle_theta,
    optimal_projectors,
    qfi_numeric,
    sample_outcomes,
)
from .partial import (
    build_a,
    build_matrices,
    build_omega,
    qfi_partial,
    score_diag_oracle,
    verify_max_eig,
)
