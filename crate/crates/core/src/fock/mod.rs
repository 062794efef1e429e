//! Truncated Fock space `F^{≤N}` with `M` modes.
//!
//! Operators are sparse matrices in the occupation basis over a generic
//! [`Scalar`]: `Complex64` for float mode and [`Surd`] (exact sums of
//! rational multiples of square roots) for exact mode.

mod coeff;
mod generators;
mod ladder;
mod ln;
mod operator;
mod scalar;
mod space;
mod un;

pub use coeff::{symmetrize_v, CoefficientSet};
pub use generators::{
    bch_check, build_a, build_b, compute_d_eta, conjugation_report, cosh_sinh, d_eta_ratio,
    d_eta_sweep, exp_generator, growth_ratio, spectrum_shift, sweep_coefficients,
    top_singular_vector, unitarity_defect, verify_a_number_growth, verify_b_number_growth,
    BchCheck, ConjugationReport, DEtaEntry, DEtaTable, GrowthEntry, GrowthTable,
};
pub use ladder::{
    below_cap, build_ladder, contract, ladders, number_op, verify_b_commutators, verify_ccr,
    verify_contracted, IdentityReport, Ladder,
};
pub use ln::{
    build_hn, build_ln, gp_form_linear, sum_parts, verify_energy_identity, EnergyIdentityReport,
};
pub use operator::{deviation, FockOperator};
pub use scalar::{Scalar, Surd};
pub use space::{binomial, FockSpace, MAX_DIM};
pub use un::{build_un, gamma_q, verify_un};
