use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Truncated, renormalized 1-D Gaussian. The isotropic 2-D surround is the
/// outer product of this kernel with itself.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel<T> {
    sigma: T,
    radius: usize,
    weights: Vec<T>,
}

impl<T: Scalar> GaussianKernel<T> {
    /// Radius is `ceil(3 * sigma)`; weights follow `exp(-d^2 / (2 sigma^2))`
    /// and are rescaled to sum to one.
    pub fn new(sigma: T) -> Result<Self> {
        if !sigma.is_finite() || sigma <= T::zero() {
            return Err(Error::InvalidSigma(sigma.to_f64_lossy()));
        }
        let radius = (T::lit(3.0) * sigma)
            .ceil()
            .to_usize()
            .ok_or(Error::InvalidSigma(sigma.to_f64_lossy()))?
            .max(1);
        let two_var = T::lit(2.0) * sigma * sigma;
        let r = radius as i64;
        let mut weights: Vec<T> = (-r..=r)
            .map(|d| {
                let d = T::lit(d as f64);
                (-(d * d) / two_var).exp()
            })
            .collect();
        let total: T = weights.iter().copied().sum();
        for w in &mut weights {
            *w = *w / total;
        }
        Ok(Self {
            sigma,
            radius,
            weights,
        })
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn center_weight(&self) -> T {
        self.weights[self.radius]
    }
}
