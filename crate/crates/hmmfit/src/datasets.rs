//! Bundled and default datasets for the four models.

use hmmfit_core::data::{dichotomise, GEYSER_THRESHOLD_MIN};
use hmmfit_core::models::ModelKind;
use hmmfit_core::sim::{simulate_discrete, simulate_hbd, HbdSimConfig};
use hmmfit_core::{ObsSequence, Umbrella};

use crate::error::Error;

const FAITHFUL_CSV: &str = include_str!("../data/faithful.csv");
pub const FAITHFUL_LEN: usize = 272;

/// Parameters and seed behind the default umbrella diary.
pub const UMBRELLA_TRUTH: [f64; 2] = [0.3, 0.2];
pub const UMBRELLA_DAYS: usize = 56;
pub const UMBRELLA_SEED: u64 = 56;

/// Seed of the default simulated HBD genome.
pub const HBD_SEED: u64 = 27;

/// Old Faithful eruption durations in minutes, in recorded order.
pub fn faithful() -> Result<ObsSequence, Error> {
    let mut reader = csv::Reader::from_reader(FAITHFUL_CSV.as_bytes());
    let mut values = Vec::with_capacity(FAITHFUL_LEN);
    for row in reader.deserialize::<(f64,)>() {
        values.push(row?.0);
    }
    if values.len() != FAITHFUL_LEN {
        return Err(Error::Corrupt(format!("faithful.csv has {} rows, expected {FAITHFUL_LEN}", values.len())));
    }
    Ok(ObsSequence::continuous(values)?)
}

/// Durations cut at three minutes.
pub fn faithful_dichotomised() -> Result<ObsSequence, Error> {
    Ok(dichotomise(&faithful()?, GEYSER_THRESHOLD_MIN)?)
}

/// A simulated 56-day umbrella diary.
pub fn umbrella() -> Result<ObsSequence, Error> {
    Ok(simulate_discrete(&Umbrella, &UMBRELLA_TRUTH, UMBRELLA_DAYS, UMBRELLA_SEED)?.sequence)
}

/// A simulated genome with f = 0.0625, a = 0.064 and 1050 markers 0.1 cM
/// apart.
pub fn hbd_genome(seed: u64) -> Result<ObsSequence, Error> {
    Ok(simulate_hbd(&HbdSimConfig { seed, ..HbdSimConfig::default() })?.sequence)
}

/// The dataset a model is benchmarked on when none is given.
pub fn default_for(kind: ModelKind) -> Result<ObsSequence, Error> {
    match kind {
        ModelKind::Umbrella => umbrella(),
        ModelKind::GeyserDisc => faithful_dichotomised(),
        ModelKind::GeyserCont => faithful(),
        ModelKind::Hbd => hbd_genome(HBD_SEED),
    }
}
