//! The `phonovec` command line: argument parsing, configuration merging and
//! dispatch. Exit codes: 0 success, 1 runtime failure, 2 usage or validation error.

mod commands;
pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use config::{LayerSelection, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

macro_rules! runtime_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.to_string())
            }
        }
    )*};
}

runtime_from!(
    crate::analogy::AnalogyError,
    crate::acoustics::AcousticError,
    crate::corpus::CorpusError,
    crate::features::FeatureError,
    crate::synth::SynthError,
    crate::vectors::VectorError,
    std::io::Error,
    serde_json::Error,
    csv::Error
);

#[derive(Debug, Parser)]
#[command(name = "phonovec", version, about = "Phonological analogy, vector and acoustic analyses over speech representation dumps")]
pub struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List canonical quadruplets over a vocabulary.
    Mine(MineArgs),
    /// Bootstrap analogy evaluation per layer and stratum.
    Eval(EvalArgs),
    /// Pair-consistency score per layer.
    Pcs(PcsArgs),
    /// Extract phonological vectors, their similarities and sample efficiency.
    Vectors(VectorsArgs),
    /// Add λ·v to sampled segments and write an edited dump.
    Edit(EditArgs),
    /// Correlate λ with acoustic change over paired audio.
    Correlate(CorrelateArgs),
    /// Acoustic Δ distributions for λ=0 resynthesis.
    Stability(StabilityArgs),
    /// Write synthetic corpora, the correlation audio rig and DSP test signals.
    GenSynthetic(GenArgs),
}

#[derive(Debug, Args, Default)]
pub struct InputArgs {
    /// Dump directory or multi-layer root (repeatable).
    #[arg(long = "dump", value_name = "DIR")]
    pub dumps: Vec<PathBuf>,
    /// Feature table TSV (defaults to the bundled table).
    #[arg(long = "table", value_name = "FILE")]
    pub table: Option<PathBuf>,
    /// Layers: `all`, `N`, `A-B`, or a comma list.
    #[arg(long)]
    pub layers: Option<String>,
}

#[derive(Debug, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma-separated phone labels.
    #[arg(long, conflicts_with = "vocab")]
    pub phones: Option<String>,
    /// File with one phone label per line.
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Evaluate these quadruplets (JSONL from `mine`) instead of mining each bank.
    #[arg(long, value_name = "FILE")]
    pub quads: Option<PathBuf>,
    /// Comma list of `all`, `cv`, `feat`, `dist`.
    #[arg(long)]
    pub strata: Option<String>,
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub n_replicates: Option<usize>,
    #[arg(long)]
    pub ci_level: Option<f64>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct PcsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Restrict to `consonant` or `vowel`.
    #[arg(long)]
    pub class: Option<String>,
}

#[derive(Debug, Args)]
pub struct VectorsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Comma list of `feature:class` targets (defaults to the standard eight).
    #[arg(long)]
    pub targets: Option<String>,
    /// Comma list of sample sizes.
    #[arg(long)]
    pub sample_sizes: Option<String>,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// `instance` or `phone-type`.
    #[arg(long)]
    pub weighting: Option<String>,
    #[arg(long)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct EditArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Serialized vector JSON; otherwise extracted from the dump.
    #[arg(long, value_name = "FILE", conflicts_with = "feature")]
    pub vector: Option<PathBuf>,
    #[arg(long, requires = "class")]
    pub feature: Option<String>,
    #[arg(long)]
    pub class: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    /// `edits.jsonl` describing each edit.
    #[arg(long, value_name = "FILE")]
    pub edits: Option<PathBuf>,
    /// Directory of `<utterance_id>.wav` originals (default: `orig` next to the edits file).
    #[arg(long, value_name = "DIR")]
    pub orig: Option<PathBuf>,
    /// Directory of `<edit_id>.wav` edited audio (default: `edited` next to the edits file).
    #[arg(long, value_name = "DIR")]
    pub edited: Option<PathBuf>,
    #[arg(long, conflicts_with = "no_svg")]
    pub svg: bool,
    #[arg(long)]
    pub no_svg: bool,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long, value_name = "FILE")]
    pub edits: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub orig: Option<PathBuf>,
    /// Directory of λ=0 resynthesized `<edit_id>.wav` files.
    #[arg(long, value_name = "DIR")]
    pub resynth: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// `exact`, `noisy`, `null`, `rig`, `signals` or `all`.
    #[arg(long, default_value = "all")]
    pub kind: String,
    /// Instances per phone for corpora.
    #[arg(long)]
    pub instances: Option<usize>,
    /// Noise standard deviation for the noisy corpus.
    #[arg(long)]
    pub noise_sd: Option<f64>,
    /// Utterances per feature in the audio rig.
    #[arg(long)]
    pub rig_n: Option<usize>,
}

/// Merge the config file (if any) with global flags.
fn base_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(j) = cli.jobs {
        cfg.jobs = j;
    }
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let cfg = base_config(&cli)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match cli.command {
        Command::Mine(a) => commands::mine(cfg, a),
        Command::Eval(a) => commands::eval(cfg, a),
        Command::Pcs(a) => commands::pcs(cfg, a),
        Command::Vectors(a) => commands::vectors(cfg, a),
        Command::Edit(a) => commands::edit(cfg, a),
        Command::Correlate(a) => commands::correlate(cfg, a),
        Command::Stability(a) => commands::stability(cfg, a),
        Command::GenSynthetic(a) => commands::gen_synthetic(cfg, a),
    })
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
