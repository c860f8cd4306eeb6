//! Sequence CSV files.
//!
//! Columns: `obs` (required; `duration_min` is accepted as an alias),
//! then optional `position_cM`, `pA` and `hidden_truth`. Discrete
//! observations may be written as codes (`0`, `1`, ...) or alphabet labels
//! (`U`, `Dsup3`, `Aa`, ...). An empty cell or `NA` marks a missing
//! observation; blank lines are skipped, so single-column files need `NA`. `hidden_truth` is ignored on reading.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use hmmfit_core::sim::Simulated;
use hmmfit_core::{HmmModel, ObsSequence, Observations, MISSING};

use crate::error::Error;

fn is_missing(cell: &str) -> bool {
    cell.is_empty() || cell.eq_ignore_ascii_case("na")
}

fn parse_code(cell: &str, alphabet: &[&str], row: usize) -> Result<u8, Error> {
    if is_missing(cell) {
        return Ok(MISSING);
    }
    if let Some(k) = alphabet.iter().position(|&a| a == cell) {
        return Ok(k as u8);
    }
    match cell.parse::<usize>() {
        Ok(k) if k < alphabet.len() => Ok(k as u8),
        _ => Err(Error::Corrupt(format!("row {row}: `{cell}` is not one of {alphabet:?}"))),
    }
}

fn parse_real(cell: &str, column: &str, row: usize) -> Result<f64, Error> {
    cell.parse::<f64>()
        .map_err(|_| Error::Corrupt(format!("row {row}: `{column}` value `{cell}` is not a number")))
}

/// Reads a sequence for `model` from CSV text.
pub fn read_sequence<R: Read, M: HmmModel>(reader: R, model: &M) -> Result<ObsSequence, Error> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let obs = col("obs")
        .or_else(|| col("duration_min"))
        .ok_or_else(|| Error::Corrupt("missing `obs` column".into()))?;
    let pos_col = col("position_cM");
    let freq_col = col("pA");

    let mut codes = Vec::new();
    let mut values = Vec::new();
    let mut positions = Vec::new();
    let mut freqs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let cell = rec.get(obs).unwrap_or("");
        match model.alphabet() {
            Some(alphabet) => codes.push(parse_code(cell, alphabet, row)?),
            None if is_missing(cell) => values.push(f64::NAN),
            None => values.push(parse_real(cell, "obs", row)?),
        }
        if let Some(c) = pos_col {
            positions.push(parse_real(rec.get(c).unwrap_or(""), "position_cM", row)?);
        }
        if let Some(c) = freq_col {
            freqs.push(parse_real(rec.get(c).unwrap_or(""), "pA", row)?);
        }
    }
    let observations = match model.alphabet() {
        Some(_) => Observations::Discrete(codes),
        None => Observations::Continuous(values),
    };
    let seq = ObsSequence::new(
        observations,
        pos_col.map(|_| positions),
        freq_col.map(|_| freqs),
    )?;
    model.validate(&seq)?;
    Ok(seq)
}

pub fn read_sequence_file<M: HmmModel>(path: &Path, model: &M) -> Result<ObsSequence, Error> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sequence(file, model)
}

/// Writes a sequence (and, for simulations, the hidden path) as CSV.
/// Discrete observations are written as codes.
pub fn write_sequence<W: Write>(writer: W, seq: &ObsSequence, hidden: Option<&[usize]>) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["obs"];
    if seq.positions().is_some() {
        header.push("position_cM");
    }
    if seq.allele_freq().is_some() {
        header.push("pA");
    }
    if hidden.is_some() {
        header.push("hidden_truth");
    }
    w.write_record(&header)?;
    for i in 0..seq.len() {
        let mut rec = Vec::with_capacity(header.len());
        rec.push(if seq.is_missing(i) {
            "NA".to_string()
        } else {
            match seq.observations() {
                Observations::Discrete(c) => c[i].to_string(),
                Observations::Continuous(v) => v[i].to_string(),
            }
        });
        if let Some(p) = seq.positions() {
            rec.push(format!("{:.6}", p[i]));
        }
        if let Some(q) = seq.allele_freq() {
            rec.push(format!("{:.6}", q[i]));
        }
        if let Some(h) = hidden {
            rec.push(h[i].to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<csv>", e))?;
    Ok(())
}

pub fn write_simulated(path: &Path, sim: &Simulated) -> Result<(), Error> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sequence(file, &sim.sequence, Some(&sim.hidden))
}
