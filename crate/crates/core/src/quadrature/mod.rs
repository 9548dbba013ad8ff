//! Profiles, kernel integrals and weighted norms.

mod gauss_legendre;
mod kernel_integral;
mod norm;
mod profile;
mod sum;

pub use gauss_legendre::GaussLegendre;
pub use kernel_integral::{integrate_kernel_profile, PRUNE_LOG_MARGIN};
pub use norm::{lp_norm, truncation_radius, NormSpec, TailBound, Weight};
pub use profile::{Form, GaussFactor, PowerFactor, RadialProfile, Segment};
pub use sum::pairwise_sum;

pub(crate) use kernel_integral::dirichlet_pair;
pub(crate) use norm::graded_mesh;
