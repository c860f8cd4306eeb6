//! Benchmark configuration and its flat TOML file form.
//!
//! ```toml
//! model = "geyser-disc"
//! dataset = "bundled"          # or "simulated", or a CSV path
//! optimizers = ["baum-welch", "squarem", "qn-box", "qnem"]
//! n_starts = 1000
//! seed = 1
//! reltol = 1.49e-8
//! max_iter = 500
//! armijo_c = 1e-4
//! backtrack_factor = 0.5
//! max_halvings = 30
//! squarem_max_halvings = 5
//! inverse_update = "bfgs"      # or "dfp"
//! box = "natural"              # or "narrow"
//! nll_bucket = 0.1
//! theta_tol = 0.01
//! ```
//!
//! Every key is optional.

use std::path::{Path, PathBuf};

use hmmfit_core::bench::BasinConfig;
use hmmfit_core::models::ModelKind;
use hmmfit_core::optim::InverseUpdate;
use hmmfit_core::{BoxKind, Optimizer, OptimizerConfig};
use serde::Deserialize;

use crate::error::Error;

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    /// The model's default dataset (bundled or simulated with a fixed seed).
    Default,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub model: ModelKind,
    pub dataset: DataSource,
    pub optimizers: Vec<Optimizer>,
    pub n_starts: usize,
    pub seed: u64,
    pub optim: OptimizerConfig,
    pub basins: BasinConfig,
}

impl BenchConfig {
    pub const DEFAULT_N_STARTS: usize = 1000;

    pub fn new(model: ModelKind) -> Self {
        BenchConfig {
            model,
            dataset: DataSource::Default,
            optimizers: Optimizer::ALL.to_vec(),
            n_starts: Self::DEFAULT_N_STARTS,
            seed: 1,
            optim: OptimizerConfig::default(),
            basins: BasinConfig::default(),
        }
    }

    /// Reads a config file; keys it omits keep the defaults for its model
    /// (`umbrella` when no model is given).
    pub fn from_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let file: ConfigFile =
            toml::from_str(&text).map_err(|e| Error::Config { path: path.into(), message: e.to_string() })?;
        let bad = |message: String| Error::Config { path: path.into(), message };
        let model = match &file.model {
            Some(m) => m.parse().map_err(|e: hmmfit_core::HmmError| bad(e.to_string()))?,
            None => ModelKind::Umbrella,
        };
        let mut cfg = BenchConfig::new(model);
        file.apply(&mut cfg).map_err(bad)?;
        Ok(cfg)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    model: Option<String>,
    dataset: Option<String>,
    optimizers: Option<Vec<String>>,
    n_starts: Option<usize>,
    seed: Option<u64>,
    reltol: Option<f64>,
    max_iter: Option<usize>,
    armijo_c: Option<f64>,
    backtrack_factor: Option<f64>,
    max_halvings: Option<usize>,
    squarem_max_halvings: Option<usize>,
    inverse_update: Option<String>,
    #[serde(rename = "box")]
    box_kind: Option<String>,
    nll_bucket: Option<f64>,
    theta_tol: Option<f64>,
}

pub fn parse_box(s: &str) -> Result<BoxKind, String> {
    match s {
        "natural" => Ok(BoxKind::Natural),
        "narrow" => Ok(BoxKind::Narrow),
        _ => Err(format!("unknown box `{s}` (expected natural or narrow)")),
    }
}

pub fn parse_inverse_update(s: &str) -> Result<InverseUpdate, String> {
    match s {
        "bfgs" => Ok(InverseUpdate::Bfgs),
        "dfp" => Ok(InverseUpdate::Dfp),
        _ => Err(format!("unknown inverse update `{s}` (expected bfgs or dfp)")),
    }
}

impl ConfigFile {
    fn apply(self, cfg: &mut BenchConfig) -> Result<(), String> {
        match self.dataset.as_deref() {
            None | Some("bundled") | Some("simulated") => {}
            Some(path) => cfg.dataset = DataSource::File(path.into()),
        }
        if let Some(list) = self.optimizers {
            cfg.optimizers = list
                .iter()
                .map(|s| s.parse::<Optimizer>().map_err(|e| e.to_string()))
                .collect::<Result<_, _>>()?;
        }
        if let Some(n) = self.n_starts {
            if n == 0 {
                return Err("n_starts must be at least 1".into());
            }
            cfg.n_starts = n;
        }
        let o = &mut cfg.optim;
        macro_rules! set {
            ($($field:ident => $target:expr),*) => {$(if let Some(v) = self.$field { $target = v; })*};
        }
        set!(seed => cfg.seed, reltol => o.reltol, max_iter => o.max_iter, armijo_c => o.armijo_c,
             backtrack_factor => o.backtrack_factor, max_halvings => o.max_halvings,
             squarem_max_halvings => o.squarem_max_halvings,
             nll_bucket => cfg.basins.nll_width, theta_tol => cfg.basins.theta_tol);
        if let Some(s) = self.inverse_update {
            o.inverse_update = parse_inverse_update(&s)?;
        }
        if let Some(s) = self.box_kind {
            o.box_kind = Some(parse_box(&s)?);
        }
        o.stop().map_err(|e| e.to_string())?;
        Ok(())
    }
}
