//! One checker per inequality. Every checker returns a [`CheckReport`]
//! carrying the numeric slack, so callers can assert both validity and
//! tightness. Checkers never fail on unmet preconditions; they report
//! [`Outcome::NotApplicable`] instead.

mod checks;
mod report;

pub use checks::{
    check_block_diag_sr, check_block_intdim, check_cholesky_intdim, check_cross_product,
    check_cross_product_grid, check_deletion, check_intdim_subadditive, check_perturbation,
    check_perturbation_grid, check_product_kappa, check_product_kappa_grid, check_rank1_addition,
    check_rank1_addition_grid, check_sum_subadditivity_proot, check_sum_subadditivity_proot_grid,
    check_weyl,
};
pub use report::{json_f64, json_f64_map, CheckReport, Outcome, SLACK_REL_TOL};
