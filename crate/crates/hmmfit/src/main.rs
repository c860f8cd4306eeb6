use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use hmmfit::bench::{basin_table, run_bench, summary_table, write_reports, Format};
use hmmfit::config::{parse_box, BenchConfig, DataSource};
use hmmfit::{datasets, io, Error};
use hmmfit_core::bench::start_list;
use hmmfit_core::models::{AnyModel, ModelKind};
use hmmfit_core::sim::{simulate_discrete, simulate_hbd, HbdSimConfig};
use hmmfit_core::{BoxKind, HmmModel, ObsSequence, Optimizer, OptimizerConfig};

#[derive(Parser)]
#[command(name = "hmmfit", version, about = "Maximum-likelihood fitting of hidden Markov models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one model with one optimizer from one start.
    Fit(FitArgs),
    /// Run every optimizer from shared random starts and write reports.
    Bench(BenchArgs),
    /// Simulate a dataset and write it as CSV.
    Simulate(SimArgs),
}

#[derive(Args)]
struct Common {
    /// Model: umbrella, geyser-disc, geyser-cont or hbd.
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    /// Sequence CSV; defaults to the model's bundled or simulated dataset.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Relative log-likelihood tolerance of the stop test.
    #[arg(long)]
    reltol: Option<f64>,
    /// Parameter box: natural or narrow.
    #[arg(long = "box", value_parser = parse_box)]
    box_kind: Option<BoxKind>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: Common,
    /// baum-welch, squarem, qn-box or qnem.
    #[arg(long, value_parser = parse_optimizer, default_value = "qnem")]
    optimizer: Optimizer,
    /// Seed for the random start.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Explicit start, comma separated, in the model's parameter order.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    theta: Option<Vec<f64>>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Flat TOML config; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Optimizers to run (repeatable); all four by default.
    #[arg(long = "optimizer", value_parser = parse_optimizer)]
    optimizers: Vec<Optimizer>,
    #[arg(long)]
    n_starts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for the report files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Report all timings as zero so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
    /// Replaces the timestamp in report file names.
    #[arg(long)]
    stamp: Option<String>,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    length: Option<usize>,
    /// True parameters for umbrella and geyser-disc, comma separated.
    #[arg(long, value_delimiter = ',')]
    theta: Option<Vec<f64>>,
    /// HBD consanguinity coefficient.
    #[arg(long)]
    f: Option<f64>,
    /// HBD rate per cM.
    #[arg(long)]
    a: Option<f64>,
    /// HBD marker spacing in cM.
    #[arg(long)]
    spacing: Option<f64>,
    /// HBD genotyping error rate.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<ModelKind, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = ModelKind::ALL.iter().map(|k| k.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_optimizer(s: &str) -> Result<Optimizer, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = Optimizer::ALL.iter().map(|o| o.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

impl From<hmmfit_core::HmmError> for Failure {
    fn from(e: hmmfit_core::HmmError) -> Self {
        Failure::Data(e.into())
    }
}

fn load_sequence(model: &AnyModel, data: Option<&PathBuf>) -> Result<ObsSequence, Error> {
    match data {
        Some(path) => io::read_sequence_file(path, model),
        None => datasets::default_for(model.kind()),
    }
}

fn apply_common(common: &Common, optim: &mut OptimizerConfig) {
    if let Some(r) = common.reltol {
        optim.reltol = r;
    }
    if let Some(b) = common.box_kind {
        optim.box_kind = Some(b);
    }
    if let Some(m) = common.max_iter {
        optim.max_iter = m;
    }
}

fn fit(args: FitArgs) -> Result<(), Failure> {
    let kind = args.common.model.ok_or_else(|| Failure::Usage("--model is required".into()))?;
    let model = kind.build();
    let seq = load_sequence(&model, args.common.data.as_ref())?;
    let mut optim = OptimizerConfig::default();
    apply_common(&args.common, &mut optim);
    optim.stop()?;
    let theta0 = match args.theta {
        Some(t) => t,
        None => start_list(&model, 1, args.seed).remove(0),
    };
    let clock = Instant::now();
    let rec = args.optimizer.run(&model, &seq, &theta0, &optim)?;
    let elapsed = clock.elapsed().as_secs_f64();
    println!("model       {}", model.name());
    println!("optimizer   {}", args.optimizer.name());
    println!("box         {}", args.optimizer.box_kind(&model, &optim).name());
    for (name, v) in model.param_names().iter().zip(&rec.final_theta) {
        println!("{name:<11} {v:.6}");
    }
    println!("loglik      {:.6}", rec.final_loglik);
    println!("nll         {:.6}", rec.nll());
    println!("iterations  {}", rec.iterations);
    println!("forward     {}", rec.n_forward);
    println!("backward    {}", rec.n_backward);
    println!("stop        {}", rec.stop_reason.name());
    println!("time_s      {elapsed:.4}");
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let mut cfg = match &args.config {
        Some(path) => BenchConfig::from_file(path)?,
        None => {
            let kind = args.common.model.ok_or_else(|| Failure::Usage("--model or --config is required".into()))?;
            BenchConfig::new(kind)
        }
    };
    if let Some(kind) = args.common.model {
        cfg.model = kind;
    }
    if let Some(path) = &args.common.data {
        cfg.dataset = DataSource::File(path.clone());
    }
    if !args.optimizers.is_empty() {
        cfg.optimizers = args.optimizers.clone();
    }
    if let Some(n) = args.n_starts {
        if n == 0 {
            return Err(Failure::Usage("--n-starts must be at least 1".into()));
        }
        cfg.n_starts = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    apply_common(&args.common, &mut cfg.optim);
    cfg.optim.stop()?;
    let model = cfg.model.build();
    let data = match &cfg.dataset {
        DataSource::File(p) => Some(p),
        DataSource::Default => None,
    };
    let seq = load_sequence(&model, data)?;
    let report = run_bench(&cfg, &seq, !args.no_timing)?;
    let stamp = args.stamp.unwrap_or_else(|| {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0).to_string()
    });
    let files = write_reports(&report, &args.out, &stamp)?;
    print!("{}", summary_table(&report, Format::Markdown));
    println!();
    print!("{}", basin_table(&report, Format::Markdown));
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn simulate(args: SimArgs) -> Result<(), Failure> {
    let sim = match args.model {
        ModelKind::Hbd => {
            let d = HbdSimConfig::default();
            simulate_hbd(&HbdSimConfig {
                f: args.f.unwrap_or(d.f),
                a: args.a.unwrap_or(d.a),
                length: args.length.unwrap_or(d.length),
                spacing_cm: args.spacing.unwrap_or(d.spacing_cm),
                epsilon: args.epsilon.unwrap_or(d.epsilon),
                seed: args.seed,
                ..d
            })?
        }
        ModelKind::Umbrella | ModelKind::GeyserDisc => {
            let model = args.model.build();
            let theta = match (args.theta, args.model) {
                (Some(t), _) => t,
                (None, ModelKind::Umbrella) => datasets::UMBRELLA_TRUTH.to_vec(),
                (None, _) => return Err(Failure::Usage("--theta is required for geyser-disc".into())),
            };
            let length = args.length.unwrap_or(datasets::UMBRELLA_DAYS);
            simulate_discrete(&model, &theta, length, args.seed)?
        }
        ModelKind::GeyserCont => {
            return Err(Failure::Usage("simulate supports umbrella, geyser-disc and hbd".into()));
        }
    };
    match args.out {
        Some(path) => io::write_simulated(&path, &sim)?,
        None => io::write_sequence(std::io::stdout().lock(), &sim.sequence, Some(&sim.hidden))?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Bench(a) => bench(a),
        Command::Simulate(a) => simulate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
