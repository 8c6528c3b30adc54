use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "fbod", version, about = "Fluctuation-based outlier detection")]
pub struct Cli {
    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    pub threads: Option<u16>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a dataset and write the ranked outlier factors.
    Detect(DetectArgs),
    /// Score a labelled dataset and report AUC, ACC, DR and FAR.
    Eval(EvalArgs),
    /// Evaluate over a grid of k and graph counts.
    Sweep(SweepArgs),
    /// Time detection on synthetic data of increasing size.
    Bench(BenchArgs),
    /// Generate a synthetic dataset.
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormalizeArg {
    None,
    Minmax,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// CSV file (one object per row) or directory of PGM frames.
    #[arg(long, short)]
    pub input: PathBuf,

    /// The CSV has no header row.
    #[arg(long)]
    pub no_header: bool,

    /// CSV column holding 0/1 labels, by header name or 0-based index.
    #[arg(long)]
    pub label_column: Option<String>,

    /// CSV field delimiter.
    #[arg(long, default_value = ",", value_parser = parse_delimiter)]
    pub delimiter: u8,

    /// File with one 0/1 label per object; overrides labels from the input.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Neighbors per object.
    #[arg(long, short, default_value_t = 10, value_parser = positive)]
    pub k: usize,

    /// Number of random graphs.
    #[arg(long, short = 't', default_value_t = 2, value_parser = positive)]
    pub graphs: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = NormalizeArg::None)]
    pub normalize: NormalizeArg,

    /// Smallest magnitude allowed for a propagated denominator.
    #[arg(long, default_value_t = fbod::DEFAULT_DENOM_GUARD)]
    pub guard: f64,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Objects to flag; defaults to the number of labelled outliers.
    #[arg(long, short = 'p')]
    pub top_p: Option<usize>,

    /// Where to write the score CSV.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Objects to flag; defaults to the number of labelled outliers.
    #[arg(long, short = 'p')]
    pub top_p: Option<usize>,

    /// Also write the key=value report here.
    #[arg(long)]
    pub report: Option<PathBuf>,

    /// Also write the metrics as a one-row CSV here.
    #[arg(long)]
    pub csv: Option<PathBuf>,

    /// Also write the score CSV here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub model: ModelArgs,

    /// Inclusive k grid as lo:hi:step; defaults to the single value of --k.
    #[arg(long)]
    pub k_range: Option<StepRange>,

    /// Inclusive graph-count grid as lo:hi:step; defaults to --graphs.
    #[arg(long)]
    pub t_range: Option<StepRange>,

    /// Objects to flag; defaults to the number of labelled outliers.
    #[arg(long, short = 'p')]
    pub top_p: Option<usize>,

    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Strictly increasing object counts.
    #[arg(long, value_delimiter = ',', default_value = "10000,100000")]
    pub sizes: Vec<usize>,

    #[arg(long, default_value_t = 8, value_parser = positive)]
    pub dim: usize,

    #[arg(long, short, default_value_t = 10, value_parser = positive)]
    pub k: usize,

    #[arg(long, short = 't', default_value_t = 2, value_parser = positive)]
    pub graphs: usize,

    /// Timed runs per size; the median is reported.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    pub reps: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// CSV destination; standard output when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum SynthCommand {
    /// Gaussian cluster with planted outliers, as CSV with a label column.
    Clusters(ClusterArgs),
    /// Frame sequence with patch anomalies, as a PGM directory.
    Frames(FrameArgs),
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, short)]
    pub output: PathBuf,

    #[arg(long, default_value_t = 16)]
    pub n_normal: usize,

    #[arg(long, default_value_t = 4)]
    pub n_outliers: usize,

    #[arg(long, default_value_t = 2, value_parser = positive)]
    pub dims: usize,

    /// Coordinate of the cluster center along every axis.
    #[arg(long, default_value_t = 100.0)]
    pub center: f64,

    #[arg(long, default_value_t = 2.0)]
    pub spread: f64,

    /// Minimum outlier distance from the center, in units of spread.
    #[arg(long, default_value_t = 20.0)]
    pub offset: f64,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Directory to create or fill.
    #[arg(long, short)]
    pub output: PathBuf,

    #[arg(long, default_value_t = 40)]
    pub width: usize,

    #[arg(long, default_value_t = 30)]
    pub height: usize,

    #[arg(long, default_value_t = 60)]
    pub n_normal: usize,

    #[arg(long, default_value_t = 3)]
    pub n_anomalous: usize,

    #[arg(long, default_value_t = 10.0)]
    pub noise: f64,

    /// Anomaly rectangle as x,y,width,height.
    #[arg(long, default_value = "15,10,10,10", value_parser = parse_patch)]
    pub patch: [usize; 4],

    /// Intensity shift inside the patch of anomalous frames.
    #[arg(long, default_value_t = 80, allow_hyphen_values = true)]
    pub delta: i32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Inclusive `lo:hi:step` grid; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRange {
    pub lo: usize,
    pub hi: usize,
    pub step: usize,
}

impl StepRange {
    pub fn single(v: usize) -> Self {
        Self { lo: v, hi: v, step: 1 }
    }

    pub fn values(self) -> impl Iterator<Item = usize> {
        (self.lo..=self.hi).step_by(self.step)
    }
}

impl FromStr for StepRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
        let range = Self {
            lo: num(lo)?,
            hi: num(hi)?,
            step: num(step)?,
        };
        if range.step == 0 {
            return Err("step must be positive".into());
        }
        Ok(range)
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn parse_delimiter(s: &str) -> Result<u8, String> {
    match s {
        "\\t" | "tab" => Ok(b'\t'),
        _ if s.len() == 1 && s.is_ascii() => Ok(s.as_bytes()[0]),
        _ => Err(format!("delimiter must be a single ASCII character, got {s:?}")),
    }
}

fn parse_patch(s: &str) -> Result<[usize; 4], String> {
    let v: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| format!("expected x,y,width,height, got {s:?}"))
}
