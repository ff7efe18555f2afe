//! Single-scale Retinex: the illumination estimate is the Gaussian-smoothed
//! scene `F * S`, and the reflectance is `log S - log(F * S)`.

mod blur;
mod kernel;

pub use blur::blur;
pub use kernel::GaussianKernel;

use crate::error::Result;
use crate::image::{GrayImage, Raster};
use crate::scalar::Scalar;

/// Offset added before taking logs so black pixels stay finite.
pub const LOG_EPSILON: f64 = 1.0;

/// Default surround width in pixels.
pub const DEFAULT_SIGMA: f64 = 80.0;

/// Smoothed scene, same shape and [0, 255] range as its source.
#[derive(Debug, Clone, PartialEq)]
pub struct IlluminationMap<T>(GrayImage<T>);

impl<T: Scalar> IlluminationMap<T> {
    pub(crate) fn from_image(image: GrayImage<T>) -> Self {
        Self(image)
    }

    pub fn as_image(&self) -> &GrayImage<T> {
        &self.0
    }

    pub fn into_image(self) -> GrayImage<T> {
        self.0
    }
}

impl<T: Scalar> Raster<T> for IlluminationMap<T> {
    fn width(&self) -> usize {
        self.0.width()
    }
    fn height(&self) -> usize {
        self.0.height()
    }
    fn pixels(&self) -> &[T] {
        self.0.pixels()
    }
}

/// Log-domain reflectance. Unbounded, but always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectanceMap<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Scalar> Raster<T> for ReflectanceMap<T> {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn pixels(&self) -> &[T] {
        &self.data
    }
}

/// Both halves of the decomposition for one frame.
#[derive(Debug, Clone)]
pub struct Decomposition<T> {
    pub illumination: IlluminationMap<T>,
    pub reflectance: ReflectanceMap<T>,
}

pub fn estimate_illumination<T: Scalar>(image: &GrayImage<T>, sigma: T) -> Result<IlluminationMap<T>> {
    let kernel = GaussianKernel::new(sigma)?;
    Ok(blur(image, &kernel))
}

pub fn estimate_reflectance<T: Scalar>(image: &GrayImage<T>, sigma: T) -> Result<ReflectanceMap<T>> {
    Ok(decompose(image, sigma)?.reflectance)
}

pub fn decompose<T: Scalar>(image: &GrayImage<T>, sigma: T) -> Result<Decomposition<T>> {
    let illumination = estimate_illumination(image, sigma)?;
    let reflectance = reflectance_from(image, &illumination);
    Ok(Decomposition {
        illumination,
        reflectance,
    })
}

fn reflectance_from<T: Scalar>(image: &GrayImage<T>, illumination: &IlluminationMap<T>) -> ReflectanceMap<T> {
    let eps = T::lit(LOG_EPSILON);
    let data = image
        .pixels()
        .iter()
        .zip(illumination.pixels())
        .map(|(&s, &l)| (s + eps).ln() - (l + eps).ln())
        .collect();
    ReflectanceMap {
        width: image.width(),
        height: image.height(),
        data,
    }
}
