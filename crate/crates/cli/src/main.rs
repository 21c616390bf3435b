//! Command-line front end over the matching, entropy, and experiment
//! library. One subcommand per operation; results go to stdout or `--out`,
//! failures go to stderr as one JSON object `{"code", "message"}` with exit
//! status 1 (usage mistakes exit 2 via clap).
//!
//! Every subcommand is pure in its declared inputs: identical invocations
//! produce identical output bytes. Seeds are always explicit flags; no
//! environment variable is consulted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use runmatch_core::codec::{parse_raw_lines, rle_decode, rle_encode};
use runmatch_core::entropy::{
    h2_rle_bernoulli, h2_rle_markov2, h2_rle_markov_n, h2_rle_truncated, renyi_plugin_estimate,
    sample_rle_prefixes,
};
use runmatch_core::experiment::{render_report, run_experiment};
use runmatch_core::matching::{lcs_fast, lcs_rle, MatchResult};
use runmatch_core::numfmt::round_json_floats;
use runmatch_core::{
    Alphabet, BernoulliSpec, EntropyEstimate, Error, ExperimentConfig, MarkovSpec, ReportFormat,
    Result, RunSequence, Source, SymbolSequence, TargetMethod,
};

#[derive(Parser)]
#[command(
    name = "runmatch",
    version,
    about = "Run-length encoding, longest common blocks of encoded sequences, \
             collision entropy of the encoded process, and the match-length \
             growth experiment"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run-length encode a raw sequence file into run JSON.
    Encode(EncodeArgs),
    /// Decode a run JSON file back into raw text.
    Decode(DecodeArgs),
    /// Sample one realization of a memoryless or Markov source.
    Generate(GenerateArgs),
    /// Longest common block of two sequences, with first-occurrence
    /// witnesses.
    Lcs(LcsArgs),
    /// Collision entropy of the encoded process, by closed form,
    /// eigenvalue reduction, truncated oracle, or plug-in estimation.
    Entropy(EntropyArgs),
    /// Match-length growth experiment over a grid of run counts.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Raw sequence file: UTF-8 text, one character per symbol, exactly one
    /// line.
    input: PathBuf,
    /// Restrict symbols to this set, e.g. "01"; any other symbol is an
    /// error.
    #[arg(long)]
    alphabet: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Run sequence file: JSON array of [symbol, length] pairs.
    input: PathBuf,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelKind {
    /// Binary memoryless source over {'a', 'b'}; takes --p.
    Bernoulli,
    /// Two-state chain over {'a', 'b'} with self-loops --p and --q.
    Markov2,
    /// General chain from a --matrix JSON file.
    #[value(name = "markovN", alias = "markov-n")]
    MarkovN,
}

#[derive(Args)]
struct SourceArgs {
    /// Source family.
    #[arg(long, value_enum)]
    model: ModelKind,
    /// bernoulli: probability of 'a'; markov2: self-loop of the first
    /// state.
    #[arg(long)]
    p: Option<f64>,
    /// markov2: self-loop of the second state.
    #[arg(long)]
    q: Option<f64>,
    /// markovN: JSON file { "alphabet": [...], "transition": [[...], ...] }.
    #[arg(long, value_name = "JSON_FILE")]
    matrix: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// Number of symbols to emit.
    #[arg(long)]
    n: usize,
    /// RNG seed; required so runs are reproducible by construction.
    #[arg(long)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LcsArgs {
    /// First sequence file (raw text, or run JSON with --encoded).
    first: PathBuf,
    /// Second sequence file (raw text, or run JSON with --encoded).
    second: PathBuf,
    /// Treat both inputs as run JSON and match on run tokens.
    #[arg(long)]
    encoded: bool,
    /// Match only the first N runs of each raw input's encoding; the
    /// reported witnesses index into those run sequences.
    #[arg(long, value_name = "N", conflicts_with = "encoded")]
    n_runs: Option<usize>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodKind {
    /// Exact formula; bernoulli and markov2 only.
    Closed,
    /// Perron root of the reduced collision kernel.
    Eigen,
    /// Eigenvalue of the kernel restricted to runs of length <= --cap.
    Truncated,
    /// Empirical collision frequency of --samples sampled prefixes.
    Plugin,
}

#[derive(Args)]
struct EntropyArgs {
    #[command(flatten)]
    source: SourceArgs,
    /// How to compute the entropy.
    #[arg(long, value_enum)]
    method: MethodKind,
    /// Run-length cutoff for the truncated method.
    #[arg(long, required_if_eq("method", "truncated"))]
    cap: Option<usize>,
    /// Number of prefixes to sample for the plugin method.
    #[arg(long, required_if_eq("method", "plugin"))]
    samples: Option<usize>,
    /// Number of runs per sampled prefix for the plugin method.
    #[arg(long, required_if_eq("method", "plugin"))]
    m: Option<usize>,
    /// Entropy order k >= 2 (plugin only; the other methods are order-2).
    #[arg(long, default_value_t = 2)]
    order: u32,
    /// RNG seed for the plugin method.
    #[arg(long, required_if_eq("method", "plugin"))]
    seed: Option<u64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatKind {
    Csv,
    Json,
}

impl From<FormatKind> for ReportFormat {
    fn from(kind: FormatKind) -> Self {
        match kind {
            FormatKind::Csv => ReportFormat::Csv,
            FormatKind::Json => ReportFormat::Json,
        }
    }
}

#[derive(Args)]
struct ExperimentArgs {
    /// Full experiment configuration as JSON; conflicts with the inline
    /// source flags.
    #[arg(
        long,
        value_name = "JSON_FILE",
        conflicts_with_all = ["model", "p", "q", "matrix", "n_grid", "trials", "seed"]
    )]
    config: Option<PathBuf>,
    /// Source family (inline configuration).
    #[arg(long, value_enum, required_unless_present = "config")]
    model: Option<ModelKind>,
    /// bernoulli: probability of 'a'; markov2: self-loop of the first
    /// state.
    #[arg(long)]
    p: Option<f64>,
    /// markov2: self-loop of the second state.
    #[arg(long)]
    q: Option<f64>,
    /// markovN: JSON file { "alphabet": [...], "transition": [[...], ...] }.
    #[arg(long, value_name = "JSON_FILE")]
    matrix: Option<PathBuf>,
    /// Comma-separated, strictly increasing run-count grid, e.g.
    /// 1024,2048,4096.
    #[arg(long, value_delimiter = ',', required_unless_present = "config")]
    n_grid: Option<Vec<usize>>,
    /// Independent trials per grid point.
    #[arg(long, required_unless_present = "config")]
    trials: Option<usize>,
    /// Master RNG seed; trial t always reads streams 2t and 2t+1.
    #[arg(long, required_unless_present = "config")]
    seed: Option<u64>,
    /// Report format.
    #[arg(long, value_enum, default_value_t = FormatKind::Csv)]
    format: FormatKind,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({ "code": e.code(), "message": e.to_string() });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Encode(args) => encode(args),
        Command::Decode(args) => decode(args),
        Command::Generate(args) => generate(args),
        Command::Lcs(args) => lcs(args),
        Command::Entropy(args) => entropy(args),
        Command::Experiment(args) => experiment(args),
    }
}

/// Reads a file with the path worked into any I/O error message.
fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Sends `text` to `--out` or stdout; `text` already ends with a newline.
fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Pretty JSON with every float rounded to 12 significant digits.
fn render_json<T: serde::Serialize>(value: &T) -> Result<String> {
    let mut json = serde_json::to_value(value)?;
    round_json_floats(&mut json);
    Ok(format!("{json:#}\n"))
}

/// The single sequence in a raw text file.
fn read_raw_sequence(path: &Path) -> Result<SymbolSequence> {
    let text = read_file(path)?;
    let mut sequences = parse_raw_lines(&text);
    if sequences.len() != 1 {
        return Err(Error::Validation(format!(
            "{}: expected exactly one sequence line, found {}",
            path.display(),
            sequences.len()
        )));
    }
    Ok(sequences.remove(0))
}

fn read_run_sequence(path: &Path) -> Result<RunSequence> {
    RunSequence::from_json(&read_file(path)?)
}

fn require(flag: Option<f64>, name: &str, model: &str) -> Result<f64> {
    flag.ok_or_else(|| Error::Validation(format!("--model {model} requires --{name}")))
}

fn reject<T>(flag: &Option<T>, name: &str, model: &str) -> Result<()> {
    if flag.is_some() {
        return Err(Error::Validation(format!(
            "--{name} does not apply to --model {model}"
        )));
    }
    Ok(())
}

fn build_source(
    model: ModelKind,
    p: Option<f64>,
    q: Option<f64>,
    matrix: Option<&Path>,
) -> Result<Source> {
    let matrix_path = matrix.map(Path::to_path_buf);
    match model {
        ModelKind::Bernoulli => {
            reject(&q, "q", "bernoulli")?;
            reject(&matrix_path, "matrix", "bernoulli")?;
            let p = require(p, "p", "bernoulli")?;
            Ok(Source::Bernoulli(BernoulliSpec::binary(p)?))
        }
        ModelKind::Markov2 => {
            reject(&matrix_path, "matrix", "markov2")?;
            let p = require(p, "p", "markov2")?;
            let q = require(q, "q", "markov2")?;
            Ok(Source::Markov(MarkovSpec::two_state(p, q)?))
        }
        ModelKind::MarkovN => {
            reject(&p, "p", "markovN")?;
            reject(&q, "q", "markovN")?;
            let path = matrix_path
                .ok_or_else(|| Error::Validation("--model markovN requires --matrix".into()))?;
            let spec: MarkovSpec = serde_json::from_str(&read_file(&path)?)?;
            Ok(Source::Markov(spec))
        }
    }
}

fn source_from_args(args: &SourceArgs) -> Result<Source> {
    build_source(args.model, args.p, args.q, args.matrix.as_deref())
}

fn encode(args: EncodeArgs) -> Result<()> {
    let seq = read_raw_sequence(&args.input)?;
    if let Some(letters) = &args.alphabet {
        let alphabet = Alphabet::new(letters.chars())?;
        seq.check_alphabet(&alphabet)?;
    }
    let encoded = rle_encode(&seq);
    emit(args.out.as_deref(), &format!("{}\n", encoded.to_json()))
}

fn decode(args: DecodeArgs) -> Result<()> {
    let runs = read_run_sequence(&args.input)?;
    let seq = rle_decode(&runs)?;
    emit(args.out.as_deref(), &format!("{}\n", seq.to_text()))
}

fn generate(args: GenerateArgs) -> Result<()> {
    let source = source_from_args(&args.source)?;
    let symbols: Vec<char> = source.sampler(args.seed, 0).take(args.n).collect();
    let seq = SymbolSequence::new(symbols);
    emit(args.out.as_deref(), &format!("{}\n", seq.to_text()))
}

fn lcs(args: LcsArgs) -> Result<()> {
    let result: MatchResult = if args.encoded {
        let a = read_run_sequence(&args.first)?;
        let b = read_run_sequence(&args.second)?;
        lcs_fast(a.runs(), b.runs())
    } else {
        let x = read_raw_sequence(&args.first)?;
        let y = read_raw_sequence(&args.second)?;
        match args.n_runs {
            Some(n) => lcs_rle(&x, &y, n)?,
            None => lcs_fast(x.symbols(), y.symbols()),
        }
    };
    emit(args.out.as_deref(), &render_json(&result)?)
}

/// The spec of the encoded-chain routes: Markov as given, memoryless
/// sources embedded as a chain with identical rows.
fn markov_view(source: &Source) -> Result<MarkovSpec> {
    match source {
        Source::Bernoulli(spec) => MarkovSpec::from_bernoulli(spec),
        Source::Markov(spec) => Ok(spec.clone()),
    }
}

fn entropy(args: EntropyArgs) -> Result<()> {
    let source = source_from_args(&args.source)?;
    if args.method != MethodKind::Plugin {
        for (present, name) in [
            (args.samples.is_some(), "samples"),
            (args.m.is_some(), "m"),
            (args.seed.is_some(), "seed"),
        ] {
            if present {
                return Err(Error::Validation(format!(
                    "--{name} applies only to --method plugin"
                )));
            }
        }
        if args.order != 2 {
            return Err(Error::Unsupported(format!(
                "order {} requires --method plugin; closed forms and the \
                 eigenvalue reduction cover order 2 only",
                args.order
            )));
        }
    }
    if args.method != MethodKind::Truncated && args.cap.is_some() {
        return Err(Error::Validation(
            "--cap applies only to --method truncated".into(),
        ));
    }

    let estimate: EntropyEstimate = match args.method {
        MethodKind::Closed => match (&source, args.source.model) {
            (Source::Bernoulli(spec), _) => h2_rle_bernoulli(spec.probabilities()[0])?,
            (Source::Markov(spec), ModelKind::Markov2) => {
                h2_rle_markov2(spec.self_loop(0), spec.self_loop(1))?
            }
            (Source::Markov(_), _) => {
                return Err(Error::Unsupported(
                    "no closed form for general chains; use --method eigen".into(),
                ))
            }
        },
        MethodKind::Eigen => h2_rle_markov_n(&markov_view(&source)?)?,
        MethodKind::Truncated => {
            let cap = args.cap.expect("clap enforces --cap for truncated");
            h2_rle_truncated(&markov_view(&source)?, cap)?
        }
        MethodKind::Plugin => {
            let samples = args.samples.expect("clap enforces --samples for plugin");
            let m = args.m.expect("clap enforces --m for plugin");
            let seed = args.seed.expect("clap enforces --seed for plugin");
            let prefixes = sample_rle_prefixes(&source, m, samples, seed)?;
            renyi_plugin_estimate(&prefixes, m, args.order)?
        }
    };
    emit(args.out.as_deref(), &render_json(&estimate)?)
}

fn experiment(args: ExperimentArgs) -> Result<()> {
    let config: ExperimentConfig = match &args.config {
        Some(path) => serde_json::from_str(&read_file(path)?)?,
        None => {
            let model = args.model.expect("clap enforces --model without --config");
            let source = build_source(model, args.p, args.q, args.matrix.as_deref())?;
            ExperimentConfig {
                source,
                n_grid: args.n_grid.clone().expect("clap enforces --n-grid"),
                trials: args.trials.expect("clap enforces --trials"),
                seed: args.seed.expect("clap enforces --seed"),
                entropy_method: TargetMethod::Auto,
            }
        }
    };
    let report = run_experiment(&config)?;
    emit(args.out.as_deref(), &render_report(&report, args.format.into())?)
}
