//! Exact-in-law simulation of the skew-sticky and oscillating families on the
//! uniform sampling grid.

mod path;
mod simulate;
mod transition;

pub use path::{RngStream, SamplePath};
pub use simulate::{
    reference_local_time, sample_reflected, simulate_path, simulate_sos_path,
};
pub use transition::{rejection_envelope, sample_transition};
