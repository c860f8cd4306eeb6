use alloc::vec::Vec;

use crate::error::HmmError;

/// Per-coordinate box `lower[j] < upper[j]`; either side may be infinite.
#[derive(Clone, Debug, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, HmmError> {
        if lower.len() != upper.len() {
            return Err(HmmError::DimensionMismatch { expected: lower.len(), actual: upper.len() });
        }
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l < u) {
                return Err(HmmError::InvalidBounds { index, lower: l, upper: u });
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, l), u)| l <= v && v <= u)
    }

    pub fn check(&self, x: &[f64]) -> Result<(), HmmError> {
        if x.len() != self.dim() {
            return Err(HmmError::DimensionMismatch { expected: self.dim(), actual: x.len() });
        }
        for (index, ((&value, &lower), &upper)) in x.iter().zip(&self.lower).zip(&self.upper).enumerate() {
            if !(lower <= value && value <= upper) {
                return Err(HmmError::OutOfBounds { index, value, lower, upper });
            }
        }
        Ok(())
    }

    /// Clips each coordinate into the box. The result lies in the box exactly.
    pub fn clip(&self, x: &mut [f64]) {
        for ((v, &l), &u) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(l, u);
        }
    }
}

/// The parameter θ with its box.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    bounds: Bounds,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, bounds: Bounds) -> Result<Self, HmmError> {
        bounds.check(&values)?;
        Ok(Self { values, bounds })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn lower(&self) -> &[f64] {
        self.bounds.lower()
    }

    pub fn upper(&self) -> &[f64] {
        self.bounds.upper()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}
