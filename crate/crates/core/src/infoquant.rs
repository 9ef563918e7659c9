//! Information quantity of a grayscale matrix via its singular spectrum.
//!
//! A grayscale image is a matrix, and its singular value decomposition
//! expresses it as a weighted sum of rank-one separable layers. Normalizing
//! the singular values by their plain sum turns the weights into a
//! distribution; the base-2 Shannon entropy of that distribution is the
//! image's information quantity. A monotone image concentrates all weight in
//! one layer (entropy 0) while an orthonormal matrix spreads it uniformly
//! (entropy log2 p, the maximum for p = min(rows, cols)).

use crate::image_io::GrayMatrix;
use crate::linalg::{self, Mat};
use crate::Scalar;

/// Normalized singular values, or the all-zero flag when there is nothing to
/// normalize (the zero matrix).
#[derive(Clone, Debug, PartialEq)]
pub enum SpectrumWeights<T> {
    Weights(Vec<T>),
    AllZero,
}

/// Full singular spectrum of a grayscale matrix.
///
/// `sigma` holds the p = min(m, n) singular values, nonincreasing, with
/// negative numerical noise clamped to zero. `sigma_bar` holds their
/// sum-normalized counterparts (summing to 1) unless every value is zero.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularSpectrum<T> {
    sigma: Vec<T>,
    sigma_bar: SpectrumWeights<T>,
}

impl<T: Scalar> SingularSpectrum<T> {
    /// Normalizes a raw spectrum. Values are clamped at zero and sorted
    /// nonincreasing so the type's invariants hold regardless of the solver
    /// that produced them.
    pub fn from_sigma(mut sigma: Vec<T>) -> Self {
        assert!(!sigma.is_empty(), "spectrum needs at least one value");
        for s in &mut sigma {
            assert!(s.is_finite(), "singular values must be finite");
            if *s < T::zero() {
                *s = T::zero();
            }
        }
        sigma.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
        let total: T = sigma.iter().copied().sum();
        let sigma_bar = if total == T::zero() {
            SpectrumWeights::AllZero
        } else {
            SpectrumWeights::Weights(sigma.iter().map(|&s| s / total).collect())
        };
        SingularSpectrum { sigma, sigma_bar }
    }

    pub fn sigma(&self) -> &[T] {
        &self.sigma
    }

    pub fn sigma_bar(&self) -> &SpectrumWeights<T> {
        &self.sigma_bar
    }

    pub fn is_all_zero(&self) -> bool {
        matches!(self.sigma_bar, SpectrumWeights::AllZero)
    }

    /// Base-2 Shannon entropy of the normalized spectrum, with 0 log 0 = 0.
    /// The all-zero spectrum is defined to carry zero entropy.
    pub fn entropy(&self) -> EntropyValue<T> {
        let bits = match &self.sigma_bar {
            SpectrumWeights::AllZero => T::zero(),
            SpectrumWeights::Weights(w) => {
                let sum: T = w
                    .iter()
                    .filter(|&&p| p > T::zero())
                    .map(|&p| p * p.log2())
                    .sum();
                (-sum).max(T::zero())
            }
        };
        EntropyValue { bits }
    }
}

/// SVD entropy in bits; nonnegative and at most log2 min(m, n).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct EntropyValue<T> {
    bits: T,
}

impl<T: Scalar> EntropyValue<T> {
    pub fn bits(&self) -> T {
        self.bits
    }
}

#[derive(Debug, thiserror::Error)]
pub enum InfoquantError {
    #[error("singular value iteration failed to converge")]
    DecompositionFailure,
    #[error("rank {rank} outside the valid range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },
}

/// Full singular spectrum of `m`, nonincreasing, with sum-normalized weights.
pub fn singular_values<T: Scalar>(
    m: &GrayMatrix<T>,
) -> Result<SingularSpectrum<T>, InfoquantError> {
    let sigma = linalg::singular_values(&m.to_mat())
        .map_err(|_| InfoquantError::DecompositionFailure)?;
    Ok(SingularSpectrum::from_sigma(sigma))
}

/// SVD entropy of `m`: base-2 entropy of the sum-normalized singular values.
pub fn svd_entropy<T: Scalar>(m: &GrayMatrix<T>) -> Result<EntropyValue<T>, InfoquantError> {
    Ok(singular_values(m)?.entropy())
}

/// Best rank-`r` approximation, the sum of the `r` leading singular layers.
///
/// Used for validation; the result is a plain real matrix, not clamped back
/// to grayscale range.
pub fn truncated_reconstruction<T: Scalar>(
    m: &GrayMatrix<T>,
    r: usize,
) -> Result<Mat<T>, InfoquantError> {
    let p = m.rows().min(m.cols());
    if r < 1 || r > p {
        return Err(InfoquantError::RankOutOfRange { rank: r, max: p });
    }
    let dec = linalg::svd(&m.to_mat()).map_err(|_| InfoquantError::DecompositionFailure)?;
    let mut out = Mat::zeros(m.rows(), m.cols());
    for k in 0..r {
        let s = dec.sigma[k];
        if s == T::zero() {
            break;
        }
        for i in 0..m.rows() {
            let us = dec.u[(i, k)] * s;
            for j in 0..m.cols() {
                out[(i, j)] = out[(i, j)] + us * dec.v[(j, k)];
            }
        }
    }
    Ok(out)
}
