//! Numerical verification of cross-ratio distortion under polynomials whose
//! critical values lie in the closed unit disk, and of the growth,
//! coefficient and critical-value inequalities that follow from it.
//!
//! The crate is organized bottom-up:
//!
//! * [`poly`]: dense complex polynomials and an Aberth–Ehrlich root finder
//! * [`chebyshev`]: `T_n`, its coefficients and the inverse branch `x_P`
//! * [`moebius`]: extended points, cross ratios, linear fractional maps
//! * [`critical`]: critical values, class membership, critical-value bounds
//! * [`modulus`]: conformal modulus of two-slit domains, plus a grid oracle
//! * [`inequalities`]: one checker per inequality, all returning
//!   [`InequalityReport`]
//! * [`harness`]: verification from JSON, seeded fuzz campaigns, equality
//!   reproduction

mod compensated;

pub mod chebyshev;
pub mod critical;
pub mod harness;
pub mod inequalities;
pub mod modulus;
pub mod moebius;
pub mod poly;

pub use chebyshev::{cheb_coeffs, cheb_eval, cheb_eval_real, cheb_inverse_ray, largest_zero, x_of, ChebDegree};
pub use critical::{
    critical_profile, is_in_class, normalize_to_class, random_in_class, CriticalProfile, SamplingConfig,
};
pub use harness::{
    bounds_report, run_campaign, run_equality, verify, BoundsReport, CampaignConfig, CampaignSummary, EqualitySummary,
};
pub use inequalities::{
    corollary1_check, corollary2_check, corollary3_check, corollary4_check, corollary4_upper_check, corollary5_check,
    corollary5_d, eq8_check, eq8_ratio, remark1_check, theorem1_check, InequalityReport, Statement, Witnesses,
};
pub use modulus::{grotzsch_mu, modulus_oracle, two_slit_modulus, OracleConfig, OracleEstimate, TwoSlitDomain};
pub use moebius::{cross_ratio, make_quad, CollinearQuad, ExtReal, ExtendedPoint, Moebius};
pub use poly::{Polynomial, RootSet};

pub use num_complex::Complex64;
