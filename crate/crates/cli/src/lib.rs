//! `hillband` command-line front end: band structures, discriminant sweeps,
//! periodic/semiperiodic eigenvalues, truncation studies and a self-check.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage or input error.

mod output;
mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hillband::spectrum::{
    band_structure, convergence_study, periodic_eigenvalues, sample_discriminant, semiperiodic_eigenvalues,
};
use hillband::{Error, Parity, PotentialFile, PotentialSource, PrimitiveProfile, SearchConfig};

pub use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("verification failed: {0} check(s) did not pass")]
    Verification(usize),
    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Compute(_) | CliError::Verification(_) | CliError::Output(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        match err {
            Error::Potential(e) => CliError::Input(e.to_string()),
            Error::Spectrum(hillband::SpectrumError::InvalidConfig(msg)) => CliError::Usage(msg),
            Error::Propagation(hillband::PropagationError::InvalidConfig(msg)) => CliError::Usage(msg),
            other => CliError::Compute(other.to_string()),
        }
    }
}

impl From<hillband::SpectrumError> for CliError {
    fn from(err: hillband::SpectrumError) -> Self {
        Error::from(err).into()
    }
}

#[derive(Debug, Parser)]
#[command(name = "hillband", version, about = "Band-gap structure of Hill operators with distributional potentials")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Potential description (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub potential: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Relative tolerance of the integrator.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Absolute tolerance of the integrator.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Root tolerance in λ (relative above |λ| = 1).
    #[arg(long, global = true)]
    pub root_tol: Option<f64>,
    /// Scan grid spacing in √λ.
    #[arg(long, global = true)]
    pub s_step: Option<f64>,
    #[arg(long, global = true)]
    pub tangency_tol: Option<f64>,
    /// Physical λ to start endpoint scans from.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda_floor: Option<f64>,
    /// Overrides the seed of a random potential.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// For delta combs, integrate the truncated Fourier table instead of the exact sawtooth primitive.
    #[arg(long, global = true)]
    pub use_fourier: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Periodic,
    Semiperiodic,
}

impl From<ParityArg> for Parity {
    fn from(p: ParityArg) -> Self {
        match p {
            ParityArg::Periodic => Parity::Periodic,
            ParityArg::Semiperiodic => Parity::Semiperiodic,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Gap endpoints λ₀, λ₁⁻, λ₁⁺, … with parity and collapse flags.
    Bands {
        #[arg(long, default_value_t = 3)]
        gaps: usize,
    },
    /// Samples of the Floquet discriminant Δ(λ).
    Disc {
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Lowest periodic or semiperiodic eigenvalues on one period.
    Eigs {
        #[arg(long, default_value_t = 4)]
        count: usize,
        #[arg(long, value_enum, default_value_t = ParityArg::Periodic)]
        parity: ParityArg,
    },
    /// Endpoints of successive Fourier truncations.
    Converge {
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = 3)]
        gaps: usize,
    },
    /// Runs the built-in invariant suite, plus checks on --potential if given.
    Verify {
        #[arg(long, default_value_t = 3)]
        gaps: usize,
    },
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let config = match RunConfig::try_parse_from(argv) {
        Ok(config) => config,
        Err(err) => {
            let code = if err.use_stderr() { 2 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("hillband: {err}");
            err.exit_code()
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("HILLBAND_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("HILLBAND_THREADS must be a positive integer, got {value:?}")))?;
    // a pool may already exist when run() is called more than once in a process
    if let Err(err) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        log::debug!("keeping existing thread pool: {err}");
    }
    Ok(())
}

fn search_config(common: &CommonArgs, gaps: usize) -> Result<SearchConfig<f64>, CliError> {
    let mut cfg = SearchConfig::with_gaps(gaps.max(1));
    if let Some(v) = common.rel_tol {
        cfg.integrator.rel_tol = v;
    }
    if let Some(v) = common.abs_tol {
        cfg.integrator.abs_tol = v;
    }
    if let Some(v) = common.root_tol {
        cfg.root_tol = v;
    }
    if let Some(v) = common.s_step {
        cfg.s_step = v;
    }
    if let Some(v) = common.tangency_tol {
        cfg.tangency_tol = v;
    }
    cfg.lambda_floor = common.lambda_floor;
    if gaps == 0 {
        return Err(CliError::Usage("--gaps must be at least 1".into()));
    }
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(cfg)
}

fn load_potential(path: &Path, seed: Option<u64>) -> Result<PotentialSource<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut file = PotentialFile::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    if let Some(new_seed) = seed {
        match &mut file {
            PotentialFile::Random { seed, .. } => *seed = new_seed,
            _ => return Err(CliError::Usage("--seed applies to random potentials only".into())),
        }
    }
    let source = file.resolve::<f64>().map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    Ok(source)
}

fn required_potential(common: &CommonArgs) -> Result<PotentialSource<f64>, CliError> {
    let path = common.potential.as_deref().ok_or_else(|| CliError::Usage("--potential PATH is required".into()))?;
    load_potential(path, common.seed)
}

fn profile_of(source: &PotentialSource<f64>, common: &CommonArgs) -> PrimitiveProfile<f64> {
    if common.use_fourier {
        source.potential.primitive()
    } else {
        source.profile.clone()
    }
}

fn execute(config: &RunConfig) -> Result<(), CliError> {
    configure_threads()?;
    let common = &config.common;
    let format = common.format;
    let rendered = match &config.command {
        Command::Bands { gaps } => {
            let cfg = search_config(common, *gaps)?;
            let profile = profile_of(&required_potential(common)?, common);
            let bs = band_structure(&profile, &cfg)?;
            output::bands(&bs, format)?
        }
        Command::Disc { lambda_min, lambda_max, samples } => {
            let cfg = search_config(common, 1)?;
            let profile = profile_of(&required_potential(common)?, common);
            let samples = sample_discriminant(&profile, *lambda_min, *lambda_max, *samples, &cfg)
                .map_err(|e| match e {
                    hillband::SpectrumError::InvalidConfig(msg) => CliError::Usage(msg),
                    other => other.into(),
                })?;
            output::discriminant(&samples, format)?
        }
        Command::Eigs { count, parity } => {
            let cfg = search_config(common, 1)?;
            let profile = profile_of(&required_potential(common)?, common);
            let parity = Parity::from(*parity);
            let values = match parity {
                Parity::Periodic => periodic_eigenvalues(&profile, *count, &cfg)?,
                Parity::Semiperiodic => semiperiodic_eigenvalues(&profile, *count, &cfg)?,
            };
            output::eigenvalues(parity, &values, format)?
        }
        Command::Converge { n_list, gaps } => {
            let cfg = search_config(common, *gaps)?;
            let source = required_potential(common)?;
            let study = convergence_study(&source.potential, n_list, &cfg)?;
            output::convergence(&study, format)?
        }
        Command::Verify { gaps } => {
            let cfg = search_config(common, *gaps)?;
            let extra = match &common.potential {
                Some(path) => Some(profile_of(&load_potential(path, common.seed)?, common)),
                None => None,
            };
            let report = verify::run_suite(extra.as_ref(), &cfg);
            let text = output::verification(&report, format)?;
            write_output(common.out.as_deref(), &text)?;
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            return if failed == 0 { Ok(()) } else { Err(CliError::Verification(failed)) };
        }
    };
    write_output(common.out.as_deref(), &rendered)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, text)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}
