//! Forward-mode automatic differentiation.
//!
//! [`Dual`] carries a value and up to [`MAX_PARAMS`] partial derivatives
//! stored inline. Every model in this crate writes its initial distribution,
//! transition matrix and emission weights once against the [`Scalar`]
//! trait; instantiating with `f64` gives the plain likelihood, with `Dual`
//! the likelihood and its gradient in one pass.

use core::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::HmmError;
use crate::math;

/// Width of the inline partials array.
pub const MAX_PARAMS: usize = 8;

/// Arithmetic needed by the forward pass and the model definitions.
pub trait Scalar:
    Copy
    + core::fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn constant(v: f64) -> Self;
    fn value(&self) -> f64;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn scale(self, k: f64) -> Self;
    /// Normal density at a fixed point `x` with differentiable mean and sd.
    fn gaussian_pdf(x: f64, mu: Self, sigma: Self) -> Self;
}

impl Scalar for f64 {
    #[inline]
    fn constant(v: f64) -> Self {
        v
    }
    #[inline]
    fn value(&self) -> f64 {
        *self
    }
    #[inline]
    fn ln(self) -> Self {
        math::log(self)
    }
    #[inline]
    fn exp(self) -> Self {
        math::exp(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        math::sqrt(self)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        math::pow(self, p)
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self * k
    }
    #[inline]
    fn gaussian_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
        let z = (x - mu) / sigma;
        math::exp(-0.5 * z * z) * math::INV_SQRT_2PI / sigma
    }
}

/// A value with its gradient with respect to the seeded parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub partials: [f64; MAX_PARAMS],
}

impl Dual {
    pub const fn new(value: f64, partials: [f64; MAX_PARAMS]) -> Self {
        Self { value, partials }
    }

    pub const fn constant(value: f64) -> Self {
        Self { value, partials: [0.0; MAX_PARAMS] }
    }

    /// The `index`-th independent variable.
    pub fn variable(value: f64, index: usize) -> Self {
        let mut partials = [0.0; MAX_PARAMS];
        partials[index] = 1.0;
        Self { value, partials }
    }

    /// Applies `f` with derivative `df` (both evaluated at `self.value`).
    #[inline]
    fn chain(self, f: f64, df: f64) -> Self {
        let mut partials = self.partials;
        for p in partials.iter_mut() {
            *p *= df;
        }
        Self { value: f, partials }
    }

    pub fn checked_ln(self) -> Result<Self, HmmError> {
        if self.value > 0.0 {
            Ok(Scalar::ln(self))
        } else {
            Err(HmmError::Domain { op: "ln", value: self.value })
        }
    }

    pub fn checked_sqrt(self) -> Result<Self, HmmError> {
        if self.value > 0.0 {
            Ok(Scalar::sqrt(self))
        } else {
            Err(HmmError::Domain { op: "sqrt", value: self.value })
        }
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self, HmmError> {
        if rhs.value != 0.0 {
            Ok(self / rhs)
        } else {
            Err(HmmError::Domain { op: "div", value: rhs.value })
        }
    }

    /// `self^exponent` for a differentiable exponent; needs `self > 0`.
    pub fn pow(self, exponent: Self) -> Result<Self, HmmError> {
        Ok(Scalar::exp(exponent * self.checked_ln()?))
    }

    pub fn checked_gaussian_pdf(x: f64, mu: Self, sigma: Self) -> Result<Self, HmmError> {
        if sigma.value > 0.0 {
            Ok(<Self as Scalar>::gaussian_pdf(x, mu, sigma))
        } else {
            Err(HmmError::Domain { op: "gaussian_pdf", value: sigma.value })
        }
    }
}

/// Seeds `theta` as independent variables: element `j` carries the `j`-th
/// unit vector as its partials.
///
/// Panics if `theta.len() > MAX_PARAMS`.
pub fn seed(theta: &[f64]) -> alloc::vec::Vec<Dual> {
    assert!(theta.len() <= MAX_PARAMS, "at most {MAX_PARAMS} parameters are supported");
    theta.iter().enumerate().map(|(j, &v)| Dual::variable(v, j)).collect()
}

impl Add for Dual {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self.value += rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a += b;
        }
        self
    }
}

impl Sub for Dual {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self.value -= rhs.value;
        for (a, b) in self.partials.iter_mut().zip(rhs.partials) {
            *a -= b;
        }
        self
    }
}

impl Mul for Dual {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut partials = [0.0; MAX_PARAMS];
        for k in 0..MAX_PARAMS {
            partials[k] = self.partials[k] * rhs.value + self.value * rhs.partials[k];
        }
        Self { value: self.value * rhs.value, partials }
    }
}

impl Div for Dual {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let value = self.value / rhs.value;
        let inv = 1.0 / rhs.value;
        let mut partials = [0.0; MAX_PARAMS];
        for k in 0..MAX_PARAMS {
            partials[k] = (self.partials[k] - value * rhs.partials[k]) * inv;
        }
        Self { value, partials }
    }
}

impl Neg for Dual {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        self.chain(-self.value, -1.0)
    }
}

impl Scalar for Dual {
    #[inline]
    fn constant(v: f64) -> Self {
        Dual::constant(v)
    }
    #[inline]
    fn value(&self) -> f64 {
        self.value
    }
    #[inline]
    fn ln(self) -> Self {
        self.chain(math::log(self.value), 1.0 / self.value)
    }
    #[inline]
    fn exp(self) -> Self {
        let e = math::exp(self.value);
        self.chain(e, e)
    }
    #[inline]
    fn sqrt(self) -> Self {
        let r = math::sqrt(self.value);
        self.chain(r, 0.5 / r)
    }
    #[inline]
    fn powf(self, p: f64) -> Self {
        self.chain(math::pow(self.value, p), p * math::pow(self.value, p - 1.0))
    }
    #[inline]
    fn scale(self, k: f64) -> Self {
        self.chain(self.value * k, k)
    }
    fn gaussian_pdf(x: f64, mu: Self, sigma: Self) -> Self {
        let s = sigma.value;
        let z = (x - mu.value) / s;
        let pdf = f64::gaussian_pdf(x, mu.value, s);
        let d_mu = pdf * z / s;
        let d_sigma = pdf * (z * z - 1.0) / s;
        let mut partials = [0.0; MAX_PARAMS];
        for k in 0..MAX_PARAMS {
            partials[k] = d_mu * mu.partials[k] + d_sigma * sigma.partials[k];
        }
        Self { value: pdf, partials }
    }
}
