//! Quantitative features of painting images and the regression machinery to
//! price them.
//!
//! The crate has two halves. The image half turns a decoded painting into
//! numbers: [`image_io`] decodes and resamples to a uniform analysis grid,
//! [`infoquant`] measures the information quantity of the grayscale matrix
//! through the entropy of its normalized singular values, and [`color`]
//! computes the red/blue pixel shares. The data half prepares auction
//! catalogs ([`catalog`]) and fits dummy-encoded hedonic price regressions
//! with classical inference ([`hedonic`]).
//!
//! Numeric kernels are generic over [`Scalar`] so they run in `f32` or `f64`;
//! the aliases at the crate root pin the common instantiations. Catalog
//! ingestion is plain `f64` data plumbing.

pub mod catalog;
pub mod color;
pub mod hedonic;
pub mod image_io;
pub mod infoquant;
pub mod linalg;

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::Float;

/// Floating-point scalar the numeric kernels are generic over.
///
/// Implemented by `f32` and `f64` through the blanket impl; the bound set is
/// what the kernels actually need (arithmetic, comparisons, `sqrt`/`ln`-style
/// intrinsics via [`Float`], summation, and printable debug output).
pub trait Scalar: Float + Sum + Debug + Display + 'static {
    /// Converts an `f64` constant into the scalar type.
    ///
    /// Panics if the value is not representable, which cannot happen for the
    /// finite literals the crate feeds it.
    fn real(x: f64) -> Self {
        num_traits::cast(x).expect("finite f64 constant must convert to Scalar")
    }
}

impl<T> Scalar for T where T: Float + Sum + Debug + Display + 'static {}

pub type PixelImageF32 = image_io::PixelImage<f32>;
pub type PixelImageF64 = image_io::PixelImage<f64>;
pub type GrayMatrixF32 = image_io::GrayMatrix<f32>;
pub type GrayMatrixF64 = image_io::GrayMatrix<f64>;
pub type SingularSpectrumF32 = infoquant::SingularSpectrum<f32>;
pub type SingularSpectrumF64 = infoquant::SingularSpectrum<f64>;
pub type FitSummaryF32 = hedonic::FitSummary<f32>;
pub type FitSummaryF64 = hedonic::FitSummary<f64>;
