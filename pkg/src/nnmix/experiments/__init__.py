from .montecarlo import (
    CHUNK_SIZE,
    AgreementMatrix,
    Estimate,
    Method,
    TiePolicy,
    mc_conditional_success,
    mc_success_probability,
    rule_agreement_matrix,
    w_expectations,
)
from .conjecture import ConjectureResult, conjecture_integral, integration_window
from .oracles import (
    QuadratureError,
    owen_t_quad,
    pairwise_success_quad,
    phi_convolution_quad,
    product_phi_integral_quad,
    quad_success_probability,
)
from .sweeps import SWEEPS, catalog_densities, get_sweep, random_gaussian_scenarios
