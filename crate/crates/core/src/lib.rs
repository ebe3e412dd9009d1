//! Weighted discrete p-Hardy inequalities on finitely supported sequences.
//!
//! The crate builds Hardy weights from supersolution pairs `(v, φ)`,
//! evaluates the exact remainder that turns the weighted inequality into an
//! identity, and computes the constants that enter the quantitative
//! stability estimate for the classical inequality
//!
//! ```text
//! Σ_{n≥1} |u(n) - u(n-1)|^p >= ((p-1)/p)^p Σ_{n≥1} |u(n)|^p / n^p.
//! ```
//!
//! Everything is generic over the scalar ([`Real`] is implemented for `f32`
//! and `f64`); the aliases at the crate root fix it to `f64`.

pub mod cp;
pub mod error;
pub mod families;
pub mod numeric;
pub mod profile;
pub mod scalar;
pub mod sequence;
pub mod stability;
pub mod supersolution;

pub use num_complex::Complex;

pub use cp::{
    algebraic_identity_residual, c1_objective, c1_radial_profile, cp_lower_constant, cp_lower_constant_with_budget,
    cp_terms, cp_value, simplified_p2_residual, ConstantEstimate, EstimateMethod, Exponent, IdentityCheck,
    Tolerances, DEFAULT_ABS_TOL, DEFAULT_REL_TOL,
};
pub use error::{HardyError, Result};
pub use families::{
    classical_weight, copson_constant, copson_pair, copson_phi, copson_verify, copson_weight,
    copson_weight_comparison, fkp_weight, huang_ye_check, huang_ye_lhs, huang_ye_rhs, power_weight, CopsonPhi,
    FamilyParams, HuangYeCheck,
};
pub use profile::{FnProfile, Power, Profile, ShiftedPower, Tabulated};
pub use scalar::Real;
pub use sequence::FinSeq;
pub use stability::{
    critical_hardy_check, hardy_deficit, muckenhoupt_constant, optimal_shift, stability_report,
    stability_report_with, CriticalHardyCheck, MuckenhouptEstimate, ShiftOptimum, StabilityReport,
};
pub use supersolution::{
    check_condition, hardy_weight, pointwise_identity_residual, remainder, verify_identity, verify_inequality,
    ConditionSlack, IndexTerms, VerificationReport, WeightPair,
};

pub type Complex64 = Complex<f64>;
pub type Exponent64 = Exponent<f64>;
pub type FinSeq64 = FinSeq<f64>;
pub type WeightPair64 = WeightPair<f64>;
pub type ConstantEstimate64 = ConstantEstimate<f64>;
pub type VerificationReport64 = VerificationReport<f64>;
pub type StabilityReport64 = StabilityReport<f64>;
pub type MuckenhouptEstimate64 = MuckenhouptEstimate<f64>;
pub type FamilyParams64 = FamilyParams<f64>;
