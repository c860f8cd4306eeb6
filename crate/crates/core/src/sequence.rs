use alloc::format;
use alloc::vec::Vec;

use crate::error::HmmError;

/// Discrete code for a missing observation. It carries emission weight 1
/// in every state.
pub const MISSING: u8 = u8::MAX;

#[derive(Clone, Debug, PartialEq)]
pub enum Observations {
    /// Small integer codes indexing the model's alphabet, or [`MISSING`].
    Discrete(Vec<u8>),
    /// Real values; `NaN` marks a missing observation.
    Continuous(Vec<f64>),
}

/// An observed sequence `X_1..X_L` with optional genetic map positions
/// (centiMorgan) and per-position reference-allele frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct ObsSequence {
    observations: Observations,
    positions: Option<Vec<f64>>,
    allele_freq: Option<Vec<f64>>,
}

impl ObsSequence {
    pub fn discrete(codes: Vec<u8>) -> Result<Self, HmmError> {
        Self::new(Observations::Discrete(codes), None, None)
    }

    pub fn continuous(values: Vec<f64>) -> Result<Self, HmmError> {
        Self::new(Observations::Continuous(values), None, None)
    }

    pub fn new(
        observations: Observations,
        positions: Option<Vec<f64>>,
        allele_freq: Option<Vec<f64>>,
    ) -> Result<Self, HmmError> {
        let len = match &observations {
            Observations::Discrete(v) => v.len(),
            Observations::Continuous(v) => v.len(),
        };
        if len == 0 {
            return Err(HmmError::InvalidSequence("empty sequence".into()));
        }
        if let Some(p) = &positions {
            if p.len() != len {
                return Err(HmmError::DimensionMismatch { expected: len, actual: p.len() });
            }
            if let Some(i) = p.windows(2).position(|w| !(w[1] > w[0])) {
                return Err(HmmError::InvalidSequence(format!(
                    "positions must be strictly increasing (index {})",
                    i + 1
                )));
            }
        }
        if let Some(q) = &allele_freq {
            if q.len() != len {
                return Err(HmmError::DimensionMismatch { expected: len, actual: q.len() });
            }
            if let Some(i) = q.iter().position(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(HmmError::InvalidSequence(format!("allele frequency {i} outside [0, 1]")));
            }
        }
        Ok(Self { observations, positions, allele_freq })
    }

    pub fn len(&self) -> usize {
        match &self.observations {
            Observations::Discrete(v) => v.len(),
            Observations::Continuous(v) => v.len(),
        }
    }

    /// Always false: sequences are non-empty by construction.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn observations(&self) -> &Observations {
        &self.observations
    }

    pub fn positions(&self) -> Option<&[f64]> {
        self.positions.as_deref()
    }

    pub fn allele_freq(&self) -> Option<&[f64]> {
        self.allele_freq.as_deref()
    }

    /// Distance `d_i` between positions `i - 1` and `i` (`i ≥ 1`).
    pub fn distance(&self, i: usize) -> Option<f64> {
        self.positions.as_ref().map(|p| p[i] - p[i - 1])
    }

    pub fn is_missing(&self, i: usize) -> bool {
        match &self.observations {
            Observations::Discrete(v) => v[i] == MISSING,
            Observations::Continuous(v) => v[i].is_nan(),
        }
    }

    pub fn code(&self, i: usize) -> u8 {
        match &self.observations {
            Observations::Discrete(v) => v[i],
            Observations::Continuous(_) => panic!("code() on a continuous sequence"),
        }
    }

    pub fn value(&self, i: usize) -> f64 {
        match &self.observations {
            Observations::Continuous(v) => v[i],
            Observations::Discrete(_) => panic!("value() on a discrete sequence"),
        }
    }

    pub fn discrete_codes(&self) -> Option<&[u8]> {
        match &self.observations {
            Observations::Discrete(v) => Some(v),
            Observations::Continuous(_) => None,
        }
    }

    pub fn continuous_values(&self) -> Option<&[f64]> {
        match &self.observations {
            Observations::Continuous(v) => Some(v),
            Observations::Discrete(_) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn rejects_empty_and_unsorted_positions() {
        assert!(ObsSequence::discrete(vec![]).is_err());
        let obs = Observations::Discrete(vec![0, 1, 2]);
        assert!(ObsSequence::new(obs.clone(), Some(vec![0.0, 0.1, 0.1]), None).is_err());
        assert!(ObsSequence::new(obs.clone(), Some(vec![0.0, 0.1]), None).is_err());
        let s = ObsSequence::new(obs, Some(vec![0.0, 0.1, 0.3]), None).unwrap();
        assert!((s.distance(2).unwrap() - 0.2).abs() < 1e-15);
    }

    #[test]
    fn missing_markers() {
        let s = ObsSequence::discrete(vec![0, MISSING]).unwrap();
        assert!(!s.is_missing(0) && s.is_missing(1));
        let s = ObsSequence::continuous(vec![1.0, f64::NAN]).unwrap();
        assert!(s.is_missing(1));
    }
}
