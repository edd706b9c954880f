//! Command-line front end: synth, profile, evaluate-baselines, build-store,
//! recommend, evaluate and table.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};

use tsprops::baselines::{evaluate as evaluate_models, EvalConfig, ModelKind};
use tsprops::io::{read_json_lines, read_series, write_json_lines, write_series, CsvLayout};
use tsprops::props::{profile_set, ProfileConfig, ProfileRecord, PropertyProfile};
use tsprops::recommend::{recommend, validate, RecommendConfig, Recommendation, Validation};
use tsprops::series::{history_before_test, test_window_histories, SeriesSet, SplitSpec};
use tsprops::store::{
    aggregate_store_table, aggregate_table, ingest_log, write_log, Dimension, Store,
};
use tsprops::synth::{generate_dataset, SynthConfig};

pub const STORE_ENV: &str = "TSPROPS_STORE";

#[derive(Debug, Parser)]
#[command(
    name = "tsprops",
    version,
    about = "Property profiling, synthesis and forecaster recommendation"
)]
pub struct Cli {
    /// Worker threads; 0 uses all available cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Layout {
    Wide,
    Long,
}

impl From<Layout> for CsvLayout {
    fn from(l: Layout) -> Self {
        match l {
            Layout::Wide => CsvLayout::Wide,
            Layout::Long => CsvLayout::Long,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Segment {
    /// The whole series.
    Full,
    /// The history immediately before the test segment.
    History,
    /// The history of every test window, ids suffixed `@start`.
    Windows,
}

fn cut(set: SeriesSet, segment: Segment, split: &SplitArgs) -> anyhow::Result<SeriesSet> {
    let spec = split.spec()?;
    let parts = match segment {
        Segment::Full => return Ok(set),
        Segment::History => set
            .iter()
            .map(|s| history_before_test(s, &spec))
            .collect::<tsprops::Result<Vec<_>>>()?,
        Segment::Windows => set
            .iter()
            .flat_map(|s| test_window_histories(s, &spec))
            .collect(),
    };
    Ok(SeriesSet::from_series(parts)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Md,
}

#[derive(Clone, Debug, clap::Args)]
pub struct SplitArgs {
    #[arg(long, default_value_t = 336)]
    pub history: usize,
    #[arg(long, default_value_t = 336)]
    pub horizon: usize,
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Train, validation and test ratios.
    #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.7, 0.1, 0.2])]
    pub split: Vec<f64>,
}

impl SplitArgs {
    fn spec(&self) -> anyhow::Result<SplitSpec> {
        let r = &self.split;
        Ok(SplitSpec::new(
            (r[0], r[1], r[2]),
            self.history,
            self.horizon,
            self.stride,
        )?)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample series from random GP kernel compositions.
    Synth {
        #[arg(long, default_value_t = 200)]
        n: usize,
        #[arg(long, default_value_t = 1024)]
        length: usize,
        #[arg(long)]
        seed: u64,
        /// `.csv` for wide CSV, `.jsonl` for one series per line.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        provenance_out: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-6)]
        jitter: f64,
        #[arg(long, default_value_t = 3)]
        max_leaves: usize,
        /// Leave Matern out of the kernel bank.
        #[arg(long)]
        no_matern: bool,
    },
    /// Compute property profiles, one JSON object per series.
    Profile {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, alias = "profile-out")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Segment::Full)]
        segment: Segment,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_enum, default_value_t = Layout::Wide)]
        layout: Layout,
    },
    /// Score the local baselines on the test segment of every series.
    EvaluateBaselines {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "hi,naive,snaive,ar,linear"
        )]
        models: Vec<ModelKind>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = tsprops::baselines::models::DEFAULT_AR_ORDER)]
        ar_order: usize,
        /// Linear-window lookback; defaults to the history length.
        #[arg(long)]
        lookback: Option<usize>,
        #[arg(long, default_value_t = tsprops::baselines::models::DEFAULT_RIDGE)]
        ridge: f64,
        #[arg(long, value_enum, default_value_t = Layout::Wide)]
        layout: Layout,
    },
    /// Index a performance log by the property vectors of its series.
    BuildStore {
        #[arg(long)]
        profiles: PathBuf,
        #[arg(long)]
        log: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recommend forecasters for a query dataset.
    Recommend {
        #[arg(long, env = STORE_ENV)]
        store: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        seed: u64,
        /// JSON report path; the text report goes next to it with a `.txt` extension.
        #[arg(long)]
        report_out: PathBuf,
        /// Performance log of the query series, for validation.
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,10")]
        k: Vec<usize>,
        /// Which part of each query series to profile.
        #[arg(long, value_enum, default_value_t = Segment::Full)]
        segment: Segment,
        #[command(flatten)]
        split: SplitArgs,
        #[arg(long, value_enum, default_value_t = Layout::Wide)]
        layout: Layout,
    },
    /// Hit ratio and NDCG of a recommendation report against a truth log.
    Evaluate {
        #[arg(long)]
        recommended: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "3,5,7,10")]
        k: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-bin aggregate of a performance log for one property.
    Table {
        #[arg(long)]
        property: Dimension,
        #[arg(long, value_enum, default_value_t = TableFormat::Md)]
        format: TableFormat,
        /// Aggregate a built store.
        #[arg(long, conflicts_with_all = ["profiles", "log"])]
        store: Option<PathBuf>,
        #[arg(long, requires = "log")]
        profiles: Option<PathBuf>,
        #[arg(long, requires = "profiles")]
        log: Option<PathBuf>,
        /// Defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first) and runs it. Returns the exit code:
/// 0 on success, 1 on a domain error, 2 on a usage error.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()?;
    pool.install(|| dispatch(cli))
}

fn guard(path: &Path, force: bool) -> anyhow::Result<()> {
    if !force && path.exists() {
        bail!("{} exists; pass --force to overwrite", path.display());
    }
    Ok(())
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn load_series(path: &Path, layout: Layout) -> anyhow::Result<SeriesSet> {
    read_series(path, layout.into()).with_context(|| format!("reading {}", path.display()))
}

fn load_profiles(path: &Path) -> anyhow::Result<(BTreeMap<String, PropertyProfile>, String)> {
    let records: Vec<ProfileRecord> =
        read_json_lines(path).with_context(|| format!("reading {}", path.display()))?;
    let Some(first) = records.first() else {
        bail!("{} holds no profiles", path.display());
    };
    let hash = first.config_hash.clone();
    if let Some(r) = records.iter().find(|r| r.config_hash != hash) {
        bail!(
            "profile {} was computed with a different configuration",
            r.id
        );
    }
    Ok((
        records.into_iter().map(|r| (r.id, r.profile)).collect(),
        hash,
    ))
}

fn text_path(report: &Path) -> PathBuf {
    report.with_extension("txt")
}

fn dispatch(cli: &Cli) -> anyhow::Result<()> {
    let force = cli.force;
    match &cli.command {
        Command::Synth {
            n,
            length,
            seed,
            out,
            provenance_out,
            jitter,
            max_leaves,
            no_matern,
        } => {
            guard(out, force)?;
            if let Some(p) = provenance_out {
                guard(p, force)?;
            }
            let mut cfg = SynthConfig::new(*n, *length, *seed);
            cfg.jitter = *jitter;
            cfg.max_leaves = *max_leaves;
            cfg.matern_mix = !no_matern;
            let (set, prov) = generate_dataset(&cfg)?;
            write_series(out, &set)?;
            if let Some(p) = provenance_out {
                write_json_lines(&prov, create(p)?)?;
            }
            eprintln!("wrote {} series of length {}", set.len(), length);
        }
        Command::Profile {
            data,
            out,
            segment,
            split,
            layout,
        } => {
            guard(out, force)?;
            let set = load_series(data, *layout)?;
            let set = cut(set, *segment, split)?;
            let cfg = ProfileConfig::default();
            let hash = cfg.hash();
            let mut records = Vec::new();
            let mut failed = 0;
            for (id, r) in profile_set(&set, &cfg) {
                match r {
                    Ok(profile) => records.push(ProfileRecord {
                        id,
                        config_hash: hash.clone(),
                        profile,
                    }),
                    Err(e) => {
                        failed += 1;
                        eprintln!("skipped {id}: {e}");
                    }
                }
            }
            write_json_lines(&records, create(out)?)?;
            eprintln!("profiled {} series, skipped {failed}", records.len());
        }
        Command::EvaluateBaselines {
            data,
            split,
            models,
            out,
            ar_order,
            lookback,
            ridge,
            layout,
        } => {
            guard(out, force)?;
            let set = load_series(data, *layout)?;
            let mut cfg = EvalConfig::new(models.clone(), split.spec()?);
            cfg.ar_order = *ar_order;
            cfg.lookback = *lookback;
            cfg.ridge = *ridge;
            let report = evaluate_models(&set, &cfg)?;
            for (id, why) in &report.skipped {
                eprintln!("skipped {id}: {why}");
            }
            for r in report.results.iter().filter(|r| r.fallback.is_some()) {
                eprintln!(
                    "{} on {}: fallback {}",
                    r.model,
                    r.series_id,
                    r.fallback.as_deref().unwrap_or_default()
                );
            }
            write_log(&report.log_entries(), create(out)?)?;
            eprintln!(
                "evaluated {} rows, skipped {} series",
                report.results.len(),
                report.skipped.len()
            );
        }
        Command::BuildStore { profiles, log, out } => {
            guard(out, force)?;
            let (profiles, hash) = load_profiles(profiles)?;
            let log = ingest_log(log).with_context(|| format!("reading {}", log.display()))?;
            let store = Store::build(&profiles, &log, hash)?;
            store.save(out)?;
            eprintln!(
                "indexed {} series under {} keys, excluded {} stationary",
                store.bag_count(),
                store.index.len(),
                store.excluded_stationary
            );
        }
        Command::Recommend {
            store,
            data,
            tau,
            seed,
            report_out,
            truth,
            k,
            segment,
            split,
            layout,
        } => {
            let txt = text_path(report_out);
            guard(report_out, force)?;
            guard(&txt, force)?;
            let store =
                Store::load(store).with_context(|| format!("loading store {}", store.display()))?;
            let queries = cut(load_series(data, *layout)?, *segment, split)?;
            let cfg = RecommendConfig::new(*tau, *seed);
            let mut rec = recommend(&store, &queries, &cfg)?;
            if let Some(t) = truth {
                let log = ingest_log(t).with_context(|| format!("reading {}", t.display()))?;
                rec.validation = Some(validate(&rec, &log, k));
            }
            let mut w = create(report_out)?;
            serde_json::to_writer_pretty(&mut w, &rec)?;
            writeln!(w)?;
            w.flush()?;
            fs::write(&txt, rec.to_text())?;
        }
        Command::Evaluate {
            recommended,
            truth,
            k,
            out,
        } => {
            if let Some(o) = out {
                guard(o, force)?;
            }
            let rec: Recommendation = serde_json::from_reader(
                File::open(recommended)
                    .with_context(|| format!("reading {}", recommended.display()))?,
            )
            .with_context(|| format!("parsing {}", recommended.display()))?;
            let log = ingest_log(truth).with_context(|| format!("reading {}", truth.display()))?;
            let v = validate(&rec, &log, k);
            print!("{}", metrics_text(&v));
            if let Some(o) = out {
                let mut w = create(o)?;
                serde_json::to_writer_pretty(&mut w, &v)?;
                writeln!(w)?;
                w.flush()?;
            }
        }
        Command::Table {
            property,
            format,
            store,
            profiles,
            log,
            out,
        } => {
            let table = match (store, profiles, log) {
                (Some(s), _, _) => aggregate_store_table(&Store::load(s)?, *property)?,
                (None, Some(p), Some(l)) => {
                    aggregate_table(&load_profiles(p)?.0, &ingest_log(l)?, *property)?
                }
                _ => bail!("pass --store, or both --profiles and --log"),
            };
            let body = match format {
                TableFormat::Csv => table.to_csv(),
                TableFormat::Md => table.to_markdown(),
            };
            match out {
                Some(o) => {
                    guard(o, force)?;
                    fs::write(o, body)?;
                }
                None => print!("{body}"),
            }
        }
    }
    Ok(())
}

pub fn metrics_text(v: &Validation) -> String {
    let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |x| format!("{x:.4}"));
    let mut s = String::from("k\tHR_o\tNDCG_o\tHR_i\tNDCG_i\n");
    for m in &v.metrics {
        s.push_str(&format!(
            "{}\t{:.4}\t{:.4}\t{}\t{}\n",
            m.k,
            m.hit_ratio_o,
            m.ndcg_o,
            fmt(m.hit_ratio_i),
            fmt(m.ndcg_i)
        ));
    }
    s
}
