//! `sucipad` — evaluate identifier-padding schemes on name-length data and
//! demonstrate padded SUCI concealment end to end.
//!
//! Exit codes: 0 on success, 1 on an expected failure (bad input data,
//! failed MAC, scheme precondition), 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::SeedableRng;

use sucipad::freqdist::FrequencyTable;
use sucipad::metrics;
use sucipad::padding::SchemeInstance;
use sucipad::suci::{conceal, reveal, ConcealmentScheme, HomeKeyPair, Nai, SuciMessage};
use sucipad::sweep::{
    self, emit, load_config, scatter_svg, ReportFormat, ScatterAxis, SweepReport,
};

#[derive(Parser)]
#[command(name = "sucipad", version, about, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load one column of a length-frequency CSV and print its summary.
    Ingest(IngestArgs),
    /// Evaluate one padding scheme on one dataset and print the metrics.
    Eval(EvalArgs),
    /// Run a full parameter sweep from a config file and write the reports.
    Sweep(SweepArgs),
    /// Re-emit a saved JSON report in another format.
    Report(ReportArgs),
    /// Conceal an NAI into SUCI wire text.
    Conceal(ConcealArgs),
    /// Recover the NAI from SUCI wire text.
    Reveal(RevealArgs),
    /// Generate a home-network X25519 key pair.
    Keygen(KeygenArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Length-frequency CSV file (`Length,<series>...` header).
    #[arg(long)]
    data: PathBuf,
    /// Count column to load.
    #[arg(long)]
    column: String,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    column: String,
    /// Scheme code, e.g. `taBlk-6-15-30`.
    #[arg(long)]
    scheme: String,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep config file (see the bundled `data/sweep.conf`).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for report.csv, report.json, alpha1_vs_beta.svg,
    /// alpha2_vs_beta.svg.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// A report.json written by `sweep`.
    #[arg(long)]
    input: PathBuf,
    /// csv, json, or svg-scatter.
    #[arg(long)]
    format: String,
    /// Write canonical file names here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConcealArgs {
    /// Identity to conceal, `username@realm`.
    #[arg(long)]
    nai: String,
    /// `null` or `profileA`.
    #[arg(long, default_value = "profileA")]
    scheme: String,
    /// Padding scheme code applied to the username.
    #[arg(long, default_value = "identity")]
    pad: String,
    /// Home-network public key file (raw 32 octets).
    #[arg(long)]
    home_key: PathBuf,
    #[arg(long, default_value_t = 0)]
    key_id: u8,
    /// Routing indicator, 1-4 digits.
    #[arg(long, default_value = "0")]
    routing: String,
    /// Seed for padding and ephemeral-key randomness (default: OS entropy).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct RevealArgs {
    /// SUCI wire text produced by `conceal`.
    #[arg(long)]
    wire: String,
    /// Padding scheme code the sender used.
    #[arg(long, default_value = "identity")]
    pad: String,
    /// Home-network private key file (raw 32 octets).
    #[arg(long)]
    home_key: PathBuf,
}

#[derive(Args)]
struct KeygenArgs {
    /// Directory for the key files.
    #[arg(long)]
    out: PathBuf,
    /// Base name: writes `<prefix>.pub` and `<prefix>.sec`.
    #[arg(long, default_value = "home")]
    prefix: String,
    /// Seed for key generation (default: OS entropy).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Report(args) => cmd_report(args),
        Command::Conceal(args) => cmd_conceal(args),
        Command::Reveal(args) => cmd_reveal(args),
        Command::Keygen(args) => cmd_keygen(args),
    }
}

fn load_table(data: &Path, column: &str) -> Result<FrequencyTable> {
    FrequencyTable::from_csv_path(data, column)
        .with_context(|| format!("cannot load column `{column}` from `{}`", data.display()))
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let table = load_table(&args.data, &args.column)?;
    let (min_class_length, min_class_count) = table.min_class()?;
    let summary = serde_json::json!({
        "label": table.label(),
        "population": table.population(),
        "distinct_lengths": table.distinct_lengths(),
        "min_length": table.min_length(),
        "max_length": table.max_length(),
        "hU": table.entropy(),
        "min_class_length": min_class_length,
        "min_class_count": min_class_count,
    });
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let table = load_table(&args.data, &args.column)?;
    let scheme = SchemeInstance::parse(&args.scheme)?;
    let record = metrics::evaluate(&table, &scheme)?;
    println!("{}", serde_json::to_string_pretty(&record)?);
    Ok(())
}

/// Honors `SUCI_PAD_THREADS` by running `body` inside a bounded thread
/// pool; an unset variable means rayon's default parallelism.
fn with_thread_cap<T>(body: impl FnOnce() -> T + Send) -> Result<T>
where
    T: Send,
{
    match std::env::var("SUCI_PAD_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(body()),
        Err(e) => usage_exit(format!("SUCI_PAD_THREADS is not valid unicode: {e}")),
        Ok(raw) => match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .context("cannot build sweep thread pool")?;
                Ok(pool.install(body))
            }
            _ => usage_exit(format!(
                "SUCI_PAD_THREADS must be a positive integer, got `{raw}`"
            )),
        },
    }
}

fn usage_exit<T>(message: String) -> Result<T> {
    eprintln!("error: {message}");
    std::process::exit(2);
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let cfg = load_config(&args.config)?;
    let report = with_thread_cap(|| sweep::evaluate_all(&cfg))??;
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create `{}`", args.out.display()))?;
    write_report_files(&report, &args.out, true, true)?;

    println!(
        "records: {} (skipped: {})",
        report.records.len(),
        report.skipped.len()
    );
    for summary in &report.datasets {
        if let Some(best) = report.winners.by_delta.get(&summary.label) {
            println!(
                "{}: best by delta = {} (delta={:.4}, beta={:.4})",
                summary.label,
                best.scheme.code(),
                best.delta,
                best.beta
            );
        }
        if let Some(best) = report.winners.by_threshold.get(&summary.label) {
            println!(
                "{}: best by threshold = {} (alpha2={}, beta={:.4})",
                summary.label,
                best.scheme.code(),
                best.alpha2,
                best.beta
            );
        }
    }
    Ok(())
}

/// Writes the canonical report files into `dir`.
fn write_report_files(report: &SweepReport, dir: &Path, tables: bool, plots: bool) -> Result<()> {
    let write = |name: &str, bytes: &[u8]| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, bytes)
            .with_context(|| format!("cannot write `{}`", path.display()))?;
        println!("wrote {}", path.display());
        Ok(())
    };
    if tables {
        write("report.csv", &emit(report, ReportFormat::Csv)?)?;
        write("report.json", &emit(report, ReportFormat::Json)?)?;
    }
    if plots {
        write(
            "alpha1_vs_beta.svg",
            scatter_svg(report, ScatterAxis::Alpha1).as_bytes(),
        )?;
        write(
            "alpha2_vs_beta.svg",
            scatter_svg(report, ScatterAxis::Alpha2Log10).as_bytes(),
        )?;
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let bytes = std::fs::read(&args.input)
        .with_context(|| format!("cannot read `{}`", args.input.display()))?;
    let report: SweepReport = serde_json::from_slice(&bytes)
        .with_context(|| format!("`{}` is not a sweep report", args.input.display()))?;

    match args.out {
        None => {
            let out = emit(&report, format)?;
            let mut stdout = std::io::stdout().lock();
            std::io::Write::write_all(&mut stdout, &out)?;
        }
        Some(dir) => {
            std::fs::create_dir_all(&dir)
                .with_context(|| format!("cannot create `{}`", dir.display()))?;
            match format {
                ReportFormat::Csv | ReportFormat::Json => {
                    let name = if format == ReportFormat::Csv {
                        "report.csv"
                    } else {
                        "report.json"
                    };
                    let path = dir.join(name);
                    std::fs::write(&path, emit(&report, format)?)
                        .with_context(|| format!("cannot write `{}`", path.display()))?;
                    println!("wrote {}", path.display());
                }
                ReportFormat::SvgScatter => write_report_files(&report, &dir, false, true)?,
            }
        }
    }
    Ok(())
}

fn read_key_file(path: &Path) -> Result<[u8; 32]> {
    let bytes = std::fs::read(path)
        .with_context(|| format!("cannot read key file `{}`", path.display()))?;
    let key: [u8; 32] = bytes.as_slice().try_into().map_err(|_| {
        anyhow::anyhow!(
            "key file `{}` must be exactly 32 octets, got {}",
            path.display(),
            bytes.len()
        )
    })?;
    Ok(key)
}

fn parse_concealment_scheme(token: &str) -> Result<ConcealmentScheme> {
    match token {
        "null" => Ok(ConcealmentScheme::Null),
        "profileA" => Ok(ConcealmentScheme::ProfileA),
        other => bail!("unknown concealment scheme `{other}` (expected null or profileA)"),
    }
}

fn seeded_rng(seed: Option<u64>) -> StdRng {
    match seed {
        Some(s) => StdRng::seed_from_u64(s),
        None => StdRng::from_entropy(),
    }
}

fn cmd_conceal(args: ConcealArgs) -> Result<()> {
    let nai = Nai::parse(&args.nai)?;
    let scheme = parse_concealment_scheme(&args.scheme)?;
    let pad = SchemeInstance::parse(&args.pad)?;
    let public = read_key_file(&args.home_key)?;
    let mut rng = seeded_rng(args.seed);
    let msg = conceal(
        &nai,
        scheme,
        &pad,
        &public,
        args.key_id,
        &args.routing,
        &mut rng,
    )?;
    println!("{}", msg.to_wire());
    Ok(())
}

fn cmd_reveal(args: RevealArgs) -> Result<()> {
    let msg = SuciMessage::from_wire(&args.wire)?;
    let pad = SchemeInstance::parse(&args.pad)?;
    let secret = read_key_file(&args.home_key)?;
    let nai = reveal(&msg, &pad, &secret)?;
    println!("{nai}");
    Ok(())
}

fn cmd_keygen(args: KeygenArgs) -> Result<()> {
    let mut rng = seeded_rng(args.seed);
    let keys = HomeKeyPair::generate(&mut rng);
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create `{}`", args.out.display()))?;
    let public_path = args.out.join(format!("{}.pub", args.prefix));
    let secret_path = args.out.join(format!("{}.sec", args.prefix));
    std::fs::write(&public_path, keys.public())
        .with_context(|| format!("cannot write `{}`", public_path.display()))?;
    std::fs::write(&secret_path, keys.secret())
        .with_context(|| format!("cannot write `{}`", secret_path.display()))?;
    println!("wrote {}", public_path.display());
    println!("wrote {}", secret_path.display());
    Ok(())
}
