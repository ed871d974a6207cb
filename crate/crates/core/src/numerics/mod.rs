//! Statistical primitives backing the resampler.

mod bvn;
mod correlation;
mod normal;
mod rng;

pub use bvn::bvn_cdf;
pub(crate) use bvn::bvn_lower;
pub use correlation::{
    cholesky_psd, nearest_correlation, CorrelationMatrix, EIGEN_FLOOR, PSD_TOLERANCE,
};
pub use normal::{std_normal_cdf, std_normal_pdf, std_normal_quantile};
pub(crate) use normal::quantile_open;
pub use rng::SeededRng;
