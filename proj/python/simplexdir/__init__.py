"""Bayesian models of random directions attached to points on the 2-simplex."""

from ._core import (  # noqa: F401
    apply_direction,
    arctan_star,
    bessel_i_ratio,
    build_cov,
    circular_correlation,
    circular_summary,
    em_init,
    extract_direction,
    fit,
    generalized_inverse_logit,
    gp_conditional,
    log_posterior_predictive,
    logistic_expectation,
    logistic_product_bounds,
    pn2_circular_variance,
    pn2_density,
    projected_gp_sample,
    rotation_matrix,
    simulate_scenario,
    sqexp_kernel,
    svm_prior_moments,
    svmp2_prior_moments,
    svmp_prior_correlation,
    svmp_prior_moments,
    truncated_bivariate_terms,
    vm_log_density,
    vm_sample,
    wrap_angle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
