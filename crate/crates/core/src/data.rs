//! Sequence transforms for the bundled datasets.

use alloc::format;
use alloc::vec::Vec;

use crate::error::HmmError;
use crate::models::{GeyserDisc, Umbrella};
use crate::sequence::{ObsSequence, Observations, MISSING};

/// Cut point, in minutes, between short and long eruptions.
pub const GEYSER_THRESHOLD_MIN: f64 = 3.0;

/// Maps durations to `Dinf3` (below `threshold`) or `Dsup3` (at or above).
/// Missing values stay missing.
pub fn dichotomise(seq: &ObsSequence, threshold: f64) -> Result<ObsSequence, HmmError> {
    let values = seq
        .continuous_values()
        .ok_or(HmmError::ObservationKind("dichotomise needs continuous observations"))?;
    let codes = values
        .iter()
        .map(|&x| match x {
            x if x.is_nan() => MISSING,
            x if x >= threshold => GeyserDisc::LONG,
            _ => GeyserDisc::SHORT,
        })
        .collect();
    ObsSequence::new(
        Observations::Discrete(codes),
        seq.positions().map(<[f64]>::to_vec),
        seq.allele_freq().map(<[f64]>::to_vec),
    )
}

/// Parses an umbrella diary such as `"UUNU-N"`: `U` umbrella, `N` none,
/// `-` or `?` missing. Whitespace is ignored.
pub fn parse_umbrella(diary: &str) -> Result<ObsSequence, HmmError> {
    let codes: Vec<u8> = diary
        .chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            'U' | 'u' => Ok(Umbrella::UMBRELLA),
            'N' | 'n' => Ok(Umbrella::NO_UMBRELLA),
            '-' | '?' => Ok(MISSING),
            other => Err(HmmError::InvalidSequence(format!("unexpected umbrella symbol `{other}`"))),
        })
        .collect::<Result<_, _>>()?;
    ObsSequence::discrete(codes)
}
