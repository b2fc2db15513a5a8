//! Finite windows of ℕ: Sidon tests and generators, difference sets,
//! counting densities, and window-relative Furstenberg families.

mod density;
mod family;
mod sidon;
mod window;

pub use density::{
    difference_set, difference_set_within, lower_density, lower_density_tail, quadratic_sequence,
    verify_difference_density, DensityEstimate, DifferenceDensityReport,
};
pub use family::{classify_family, max_gap_with_ends, runs, thickened, FamilyClass, FamilyParams};
pub use sidon::{
    enumerate_sidon_supersets, is_sidon, jn_offsets, sidon_family_jn, sidon_violation, Quadruple,
    SidonSupersets,
};
pub use window::NatWindow;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NatError {
    #[error("element {element} lies beyond the horizon {horizon}")]
    BeyondHorizon { element: u64, horizon: u64 },
    #[error("elements must be strictly increasing ({previous} then {next})")]
    NotIncreasing { previous: u64, next: u64 },
    #[error("index {at} outside [1, {horizon}]")]
    IndexOutOfRange { at: u64, horizon: u64 },
    #[error("J_{n} has elements beyond the u64 range")]
    Overflow { n: u64 },
    #[error("window is empty")]
    EmptyWindow,
    #[error("growth bound n_k <= c k^2 fails first at k = {k} (n_k = {element})")]
    GrowthBoundViolated { k: u64, element: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
