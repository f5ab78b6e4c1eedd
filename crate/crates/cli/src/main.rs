use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use pairsel::data::{generate_synthetic_series, write_ohlcv_file, InstrumentId, InstrumentSource, SyntheticKind, SyntheticSpec};
use pairsel::meta::{RecordStore, SelectionMode};
use pairsel::models::ModelKind;
use pairsel::pipeline::{
    emit_reports, emit_walk_forward, predict_next, report_from_store, run_training_cycle, walk_forward, RunConfig,
};
use pairsel::seeding::derive_seed;
use pairsel::{Error, ErrorCategory, RunReport};

#[derive(Parser)]
#[command(name = "pairsel", version, about = "Train a model zoo per instrument and select profitable instrument-model pairs")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic OHLCV data.
    Synth(SynthArgs),
    /// One training cycle: train, evaluate, update the store, select, replay on test.
    Run(RunArgs),
    /// Walk-forward replay over consecutive test windows.
    Walkforward {
        #[command(flatten)]
        run: RunArgs,
        /// Number of test windows (overrides pipeline.windows).
        #[arg(long)]
        windows: Option<usize>,
    },
    /// Run a cycle, then print next-day directions for the traded pairs.
    PredictNext(RunArgs),
    /// Re-emit records.csv for a stored run.
    Report {
        #[arg(long)]
        store: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run to emit; defaults to the latest one in the store.
        #[arg(long)]
        run_id: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKindArg {
    PersistentSign,
    RandomWalk,
}

#[derive(Args)]
struct SynthArgs {
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Write the six-instrument planted-signal universe plus a config.toml.
    #[arg(long)]
    planted: bool,
    #[arg(long, default_value = "SYN")]
    symbol: String,
    #[arg(long, value_enum, default_value = "persistent-sign")]
    kind: SynthKindArg,
    #[arg(long, default_value_t = 2000)]
    length: usize,
    #[arg(long, default_value_t = 0.65)]
    persistence: f64,
    #[arg(long, default_value_t = 1.0)]
    volatility: f64,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record store file (default: <out>/records.store).
    #[arg(long)]
    store: Option<PathBuf>,
    /// best_single or profitable_list.
    #[arg(long)]
    mode: Option<String>,
    /// Comma-separated model kinds to enable.
    #[arg(long, value_delimiter = ',')]
    kinds: Option<Vec<String>>,
    /// Stay flat instead of shorting on a 0 prediction.
    #[arg(long)]
    long_only: bool,
}

impl RunArgs {
    fn config(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = Some(seed);
        }
        // flag paths are relative to the working directory, not the config
        let cwd = std::env::current_dir().context("reading current directory")?;
        if let Some(out) = &self.out {
            cfg.pipeline.out = Some(cwd.join(out));
        }
        if let Some(store) = &self.store {
            cfg.pipeline.store = Some(cwd.join(store));
        }
        if let Some(mode) = &self.mode {
            cfg.pipeline.selection_mode = mode.parse::<SelectionMode>()?;
        }
        if let Some(kinds) = &self.kinds {
            cfg.pipeline.enabled_kinds = kinds
                .iter()
                .map(|k| k.trim().parse::<ModelKind>())
                .collect::<Result<_, _>>()?;
        }
        if self.long_only {
            cfg.pipeline.short_on_down = false;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_summary(report: &RunReport) {
    let s = &report.summary;
    println!(
        "window {}/{}: {} pairs ok, {} failed, store {} records, traded {}",
        s.window_index + 1,
        s.window_count,
        s.pairs_ok,
        s.pairs_failed,
        s.store_records,
        s.traded
    );
    if let Some(note) = &report.note {
        println!("  {note}");
    }
    for p in &report.selected {
        println!(
            "  {} {} meta_score {:.4} test {:+.3}% vs nnp {:+.3}%",
            p.entry.instrument, p.entry.model, p.entry.meta_score, p.test.backtest_return_pct, p.test.nnp_pct
        );
    }
}

fn synth(args: &SynthArgs) -> anyhow::Result<()> {
    let spec_for = |kind: SyntheticKind, symbol: &str| SyntheticSpec {
        kind,
        persistence: args.persistence,
        volatility_pct: args.volatility,
        ..SyntheticSpec::persistent(args.length, args.persistence, derive_seed(args.seed, "synthetic", symbol))
    };
    let write = |kind: SyntheticKind, symbol: &str, path: &Path| -> anyhow::Result<()> {
        let series = generate_synthetic_series::<f64>(&spec_for(kind, symbol), InstrumentId::new(symbol)?)?;
        write_ohlcv_file(path, &series)?;
        println!("wrote {} ({} bars)", path.display(), series.len());
        Ok(())
    };
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if !args.planted {
        let kind = match args.kind {
            SynthKindArg::PersistentSign => SyntheticKind::PersistentSign,
            SynthKindArg::RandomWalk => SyntheticKind::RandomWalk,
        };
        let id = InstrumentId::new(args.symbol.as_str())?;
        return write(kind, &args.symbol, &args.out.join(format!("{}.csv", id.file_stem())));
    }
    let data = args.out.join("data");
    std::fs::create_dir_all(&data).with_context(|| format!("creating {}", data.display()))?;
    let mut cfg = RunConfig {
        seed: Some(args.seed),
        ..RunConfig::default()
    };
    for (i, kind) in [SyntheticKind::PersistentSign, SyntheticKind::RandomWalk]
        .into_iter()
        .flat_map(|k| std::iter::repeat_n(k, 3))
        .enumerate()
    {
        let symbol = match kind {
            SyntheticKind::PersistentSign => format!("PERS{}", i + 1),
            SyntheticKind::RandomWalk => format!("RW{}", i - 2),
        };
        write(kind, &symbol, &data.join(format!("{symbol}.csv")))?;
        cfg.instruments
            .push(InstrumentSource::csv(&symbol, format!("data/{symbol}.csv")));
    }
    cfg.pipeline.enabled_kinds = vec![
        ModelKind::LogisticRegression,
        ModelKind::DecisionTree,
        ModelKind::KNeighbors,
        ModelKind::GaussianNB,
    ];
    cfg.pipeline.windows = 4;
    cfg.pipeline.out = Some(PathBuf::from("out"));
    let path = args.out.join("config.toml");
    std::fs::write(&path, cfg.to_toml_string()?).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth(args) => synth(&args),
        Command::Run(args) => {
            let cfg = args.config()?;
            let report = run_training_cycle::<f64>(&cfg)?;
            emit_reports(&report, &cfg.out_dir()?)?;
            print_summary(&report);
            Ok(())
        }
        Command::Walkforward { run, windows } => {
            let cfg = run.config()?;
            let n = windows.unwrap_or(cfg.pipeline.windows);
            let reports = walk_forward::<f64>(&cfg, n)?;
            emit_walk_forward(&reports, &cfg.out_dir()?)?;
            reports.iter().for_each(print_summary);
            Ok(())
        }
        Command::PredictNext(args) => {
            let cfg = args.config()?;
            let (report, calls) = predict_next::<f64>(&cfg)?;
            emit_reports(&report, &cfg.out_dir()?)?;
            print_summary(&report);
            if calls.is_empty() {
                println!("no trade");
            }
            for c in calls {
                println!(
                    "{} {} after {}: {} (score {:.4})",
                    c.instrument,
                    c.model,
                    c.as_of,
                    if c.direction == 1 { "up" } else { "down" },
                    c.score
                );
            }
            Ok(())
        }
        Command::Report { store, out, run_id } => {
            let store = RecordStore::open(store);
            let (runs, path) = report_from_store::<f64>(&store, run_id.as_deref(), &out)?;
            println!("{} runs in store; wrote {}", runs.len(), path.display());
            Ok(())
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>().map(Error::category) {
        Some(ErrorCategory::Config) => 2,
        Some(ErrorCategory::Input) => 3,
        Some(ErrorCategory::Model) => 4,
        Some(ErrorCategory::Io) => 5,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .target(env_logger::Target::Stderr)
        .init();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
