//! Closed-form transition kernel, speed measures, semigroup action, joint law
//! and the numerical audits of the kernel bounds and scaling identities.

mod density;
mod joint;
mod params;
mod semigroup;
mod verify;

pub use density::{
    atom_probability, lebesgue_density, transition_cdf, transition_density, transition_quantile,
    u1, u2, v_rho,
};
pub(crate) use density::quantile_of_continuous;
pub use joint::{joint_density, joint_killed_density, JointLawPoint};
pub use params::{sgn, SkewStickyParams, SosBmParams, SpeedMeasure};
pub use semigroup::{gamma_n, semigroup_apply};
pub use verify::{
    kernel_ratio_bound, verify_kernel_bound, verify_scaling, verify_semigroup_bounds, ReportRow,
    SemigroupBoundReport, VerificationReport,
};
