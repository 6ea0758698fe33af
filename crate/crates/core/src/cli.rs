//! Command-line front end.
//!
//! Every command reads an optional TOML run configuration; command-line flags
//! override file values, which override built-in defaults. Each command
//! writes a `run.json` next to its outputs recording the effective settings,
//! including the master seed.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::classify::{
    evaluate_split, leave_one_out, stratified_subsample, train_test_split, ClassificationReport,
    DEFAULT_K,
};
use crate::encoding::EncoderSpec;
use crate::error::{Error, Result};
use crate::event_model::{
    read_dataset, read_events, read_events_csv, write_dataset, write_events, write_sample, Micros,
};
use crate::metrics::MetricSpec;
use crate::optimize::{
    optimize_spatiotemporal, sweep_csv, sweep_delta_t, trials_csv, Bounds, SurrogateResult,
    SweepResult,
};
use crate::simulator::{
    artificial_grid_set, record_dataset, SensorModel, SlideKinematics, TextureSpec,
};
use crate::transduction::{fields_from_positions, transduce, TransducerConfig};

pub const DEFAULT_SEED: u64 = 2019;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EncoderName {
    Intensive,
    Spatial,
    Temporal,
    Spatiotemporal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum MetricName {
    Euclidean,
    VanRossum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Loocv,
    Split,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    DeltaT,
    Spatiotemporal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    pub epochs: usize,
    pub cos_theta_bounds: (f64, f64),
    pub tau_bounds_ms: (f64, f64),
    /// Samples per class used for each accuracy evaluation; all if unset.
    pub subsample_per_class: Option<usize>,
    pub delta_t_range_ms: (u32, u32),
    pub stride_ms: u32,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        let b = Bounds::default();
        OptimizeConfig {
            epochs: 100,
            cos_theta_bounds: b.cos_theta,
            tau_bounds_ms: b.tau_ms,
            subsample_per_class: None,
            delta_t_range_ms: (1, 200),
            stride_ms: 1,
        }
    }
}

/// Everything a run needs. Loaded from TOML; every field is optional there.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub runs: usize,
    pub textures: Vec<TextureSpec>,
    pub kinematics: SlideKinematics,
    pub sensor: SensorModel,
    pub transducer: TransducerConfig,
    pub encoder: Option<EncoderName>,
    pub metric: Option<MetricName>,
    pub delta_t_ms: Option<u32>,
    pub tau_ms: f64,
    pub cos_theta: f64,
    pub k: usize,
    pub protocol: Protocol,
    pub split_ratio: f64,
    /// Not recorded in `run.json`, so reruns into other directories match.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    pub optimize: OptimizeConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            runs: 20,
            textures: artificial_grid_set(),
            kinematics: SlideKinematics::default(),
            sensor: SensorModel::default(),
            transducer: TransducerConfig::default(),
            encoder: None,
            metric: None,
            delta_t_ms: None,
            tau_ms: 76.0,
            cos_theta: 0.4,
            k: DEFAULT_K,
            protocol: Protocol::Loocv,
            split_ratio: 0.8,
            out: PathBuf::from("out"),
            optimize: OptimizeConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for t in &self.textures {
            t.validate()?;
        }
        self.kinematics.validate()?;
        self.sensor.validate()?;
        self.transducer.validate()?;
        if self.k == 0 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        Ok(())
    }

    /// Encoder spec for the configured name; a temporal code without a
    /// window is a usage error.
    pub fn encoder_spec(&self) -> Result<EncoderSpec> {
        let name = self
            .encoder
            .ok_or_else(|| Error::Usage("no encoder given (use --encoder)".into()))?;
        Ok(match name {
            EncoderName::Intensive => EncoderSpec::Intensive,
            EncoderName::Spatial => EncoderSpec::Spatial,
            EncoderName::Temporal => EncoderSpec::Temporal {
                delta_t_ms: self.delta_t_ms.ok_or_else(|| {
                    Error::Usage("the temporal encoder needs --delta-t <ms>".into())
                })?,
            },
            EncoderName::Spatiotemporal => EncoderSpec::Spatiotemporal { tau_ms: self.tau_ms },
        })
    }

    /// Metric spec; defaults to the encoder's natural metric.
    pub fn metric_spec(&self, encoder: &EncoderSpec) -> MetricSpec {
        let name = self.metric.unwrap_or(match encoder {
            EncoderSpec::Spatiotemporal { .. } => MetricName::VanRossum,
            _ => MetricName::Euclidean,
        });
        match name {
            MetricName::Euclidean => MetricSpec::Euclidean,
            MetricName::VanRossum => MetricSpec::VanRossum {
                tau_s: self.tau_ms / 1e3,
                cos_theta: self.cos_theta,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "spiketex", version, about = "Tactile event-stream texture pipeline")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Default)]
pub struct Common {
    /// TOML run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub encoder: Option<EncoderName>,
    #[arg(long)]
    pub metric: Option<MetricName>,
    /// Temporal window in ms.
    #[arg(long = "delta-t")]
    pub delta_t: Option<u32>,
    /// Kernel time constant in ms.
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long = "cos-theta")]
    pub cos_theta: Option<f64>,
    /// Neighbour count.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate slides over textures and transduce them into a dataset.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Runs per texture.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Turn one event file (.ntev or .csv) into a sample.
    Transduce {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "")]
        label: String,
        /// Sample duration; defaults to the slide duration.
        #[arg(long = "duration-ms")]
        duration_ms: Option<u64>,
    },
    /// Classify a dataset and write a confusion matrix and summary.
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        protocol: Option<Protocol>,
        /// Training fraction for the split protocol.
        #[arg(long)]
        ratio: Option<f64>,
    },
    /// Search coding parameters.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        target: Target,
        /// Surrogate evaluations.
        #[arg(long)]
        epochs: Option<usize>,
        /// Sweep range as `lo,hi` in ms.
        #[arg(long, value_parser = parse_range)]
        range: Option<(u32, u32)>,
        #[arg(long)]
        stride: Option<u32>,
        /// Samples per class per evaluation.
        #[arg(long)]
        subsample: Option<usize>,
    },
    /// Render a classification report as a text table and SVG heatmap.
    Report {
        #[command(flatten)]
        common: Common,
        /// `report.json` or a confusion CSV, or a directory holding one.
        #[arg(long)]
        input: PathBuf,
    },
}

fn parse_range(s: &str) -> std::result::Result<(u32, u32), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let p = |v: &str| v.trim().parse::<u32>().map_err(|e| e.to_string());
    Ok((p(a)?, p(b)?))
}

/// Resolves file, then flag values.
fn resolve(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = common.seed {
        cfg.seed = v;
    }
    if let Some(v) = &common.out {
        cfg.out = v.clone();
    }
    if let Some(v) = common.encoder {
        cfg.encoder = Some(v);
    }
    if let Some(v) = common.metric {
        cfg.metric = Some(v);
    }
    if let Some(v) = common.delta_t {
        cfg.delta_t_ms = Some(v);
    }
    if let Some(v) = common.tau {
        cfg.tau_ms = v;
    }
    if let Some(v) = common.cos_theta {
        cfg.cos_theta = v;
    }
    if let Some(v) = common.k {
        cfg.k = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct RunRecord<'a, T: Serialize> {
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    details: Option<T>,
}

/// File name only, keeping run records independent of the directory layout.
fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn write_run_record<T: Serialize>(cfg: &RunConfig, command: &str, details: Option<T>) -> Result<()> {
    let record = RunRecord {
        command,
        seed: cfg.seed,
        config: cfg,
        details,
    };
    let json = serde_json::to_string_pretty(&record)?;
    write_file(&cfg.out.join("run.json"), json + "\n")
}

/// `events/<texture>_run<NNN>.ntev` per recording, `manifest.csv` and
/// `dataset.json`.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    if cfg.runs == 0 {
        return Err(Error::Parameter("runs must be at least 1".into()));
    }
    let (recordings, dataset) = record_dataset(
        &cfg.textures,
        cfg.runs,
        &cfg.kinematics,
        &cfg.sensor,
        &cfg.transducer,
        cfg.seed,
    )?;
    let events_dir = cfg.out.join("events");
    create_dir(&events_dir)?;
    let mut manifest = String::from("file,label,run,seed\n");
    for r in &recordings {
        let name = &cfg.textures[r.texture_index].name;
        let file = format!("events/{name}_run{:03}.ntev", r.run);
        write_events(&r.events, cfg.out.join(&file))?;
        let _ = writeln!(manifest, "{file},{name},{},{}", r.run, r.seed);
    }
    write_file(&cfg.out.join("manifest.csv"), manifest)?;
    write_dataset(&dataset, cfg.out.join("dataset.json"))?;
    write_run_record::<()>(cfg, "simulate", None)?;
    log::info!(
        "simulated {} recordings into {}",
        recordings.len(),
        cfg.out.display()
    );
    Ok(())
}

pub fn cmd_transduce(
    cfg: &RunConfig,
    input: &Path,
    label: &str,
    duration: Option<Micros>,
) -> Result<()> {
    let events = match input.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_events_csv(input)?,
        _ => read_events(input)?,
    };
    let fields = fields_from_positions(&cfg.sensor.taxel_layout, cfg.transducer.rf_diameter)?;
    let duration = duration.unwrap_or_else(|| cfg.kinematics.duration_us());
    let sample = transduce(&events, &fields, &cfg.transducer, duration)?.with_label(label);
    create_dir(&cfg.out)?;
    write_sample(&sample, cfg.out.join("sample.json"))?;
    write_run_record(cfg, "transduce", Some(file_name(input)))?;
    Ok(())
}

#[derive(Serialize)]
struct ClassifyDetails {
    dataset: String,
    encoder: EncoderSpec,
    metric: MetricSpec,
}

/// Writes `confusion.csv`, `summary.csv` and `report.json`.
pub fn cmd_classify(cfg: &RunConfig, dataset_path: &Path) -> Result<ClassificationReport> {
    let encoder = cfg.encoder_spec()?;
    let metric = cfg.metric_spec(&encoder);
    metric.validate()?;
    let dataset = read_dataset(dataset_path)?;
    let report = match cfg.protocol {
        Protocol::Loocv => leave_one_out(&dataset, &encoder, &metric, cfg.k)?,
        Protocol::Split => {
            let (train, test) = train_test_split(&dataset, cfg.split_ratio, cfg.seed)?;
            evaluate_split(&train, &test, &encoder, &metric, cfg.k)?
        }
    };
    create_dir(&cfg.out)?;
    write_file(&cfg.out.join("confusion.csv"), report.confusion_csv())?;
    write_file(&cfg.out.join("summary.csv"), report.summary_csv())?;
    write_file(
        &cfg.out.join("report.json"),
        serde_json::to_string_pretty(&report)? + "\n",
    )?;
    write_run_record(
        cfg,
        "classify",
        Some(ClassifyDetails {
            dataset: file_name(dataset_path),
            encoder,
            metric,
        }),
    )?;
    println!(
        "{} accuracy {:.1} +/- {:.1} ({} samples)",
        encoder.name(),
        report.accuracy_percent(),
        report.dispersion,
        report.total()
    );
    Ok(report)
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum OptimizeOutcome {
    Sweep(SweepResult),
    Surrogate(SurrogateResult),
}

/// Writes `trials.csv` and `best.json`.
pub fn cmd_optimize(cfg: &RunConfig, dataset_path: &Path, target: Target) -> Result<OptimizeOutcome> {
    let full = read_dataset(dataset_path)?;
    let opt = &cfg.optimize;
    let dataset = match opt.subsample_per_class {
        Some(n) => stratified_subsample(&full, n, cfg.seed),
        None => full,
    };
    create_dir(&cfg.out)?;
    let outcome = match target {
        Target::DeltaT => {
            let r = sweep_delta_t(&dataset, opt.delta_t_range_ms, opt.stride_ms, cfg.k)?;
            write_file(&cfg.out.join("trials.csv"), sweep_csv(&r))?;
            let best = serde_json::json!({ "delta_t_ms": r.best.0, "accuracy": r.best.1 });
            write_file(&cfg.out.join("best.json"), serde_json::to_string_pretty(&best)? + "\n")?;
            println!("best delta_t {} ms, accuracy {:.4}", r.best.0, r.best.1);
            OptimizeOutcome::Sweep(r)
        }
        Target::Spatiotemporal => {
            let bounds = Bounds {
                cos_theta: opt.cos_theta_bounds,
                tau_ms: opt.tau_bounds_ms,
            };
            let r = optimize_spatiotemporal(&dataset, &bounds, opt.epochs, cfg.seed, cfg.k)?;
            write_file(&cfg.out.join("trials.csv"), trials_csv(&r))?;
            write_file(
                &cfg.out.join("best.json"),
                serde_json::to_string_pretty(&r.best)? + "\n",
            )?;
            println!(
                "best cos_theta {:.4}, tau {:.2} ms, accuracy {:.4}",
                r.best.cos_theta, r.best.tau_ms, r.best.accuracy
            );
            OptimizeOutcome::Surrogate(r)
        }
    };
    write_run_record(cfg, "optimize", Some(file_name(dataset_path)))?;
    Ok(outcome)
}

/// Class names and confusion counts parsed from a report file.
pub fn load_confusion(path: &Path) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let path = if path.is_dir() {
        let json = path.join("report.json");
        if json.exists() {
            json
        } else {
            path.join("confusion.csv")
        }
    } else {
        path.to_path_buf()
    };
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    if text.trim().is_empty() {
        return Err(Error::Usage(format!("report {} is empty", path.display())));
    }
    let (classes, confusion) = if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        parse_confusion_csv(&text)?
    } else {
        let r: ClassificationReport = serde_json::from_str(&text)
            .map_err(|e| Error::Validation(format!("malformed report: {e}")))?;
        (r.classes, r.confusion)
    };
    if classes.is_empty() {
        return Err(Error::Usage(format!("report {} has no classes", path.display())));
    }
    if confusion.len() != classes.len() || confusion.iter().any(|r| r.len() != classes.len()) {
        return Err(Error::Validation("confusion matrix is not square".into()));
    }
    Ok((classes, confusion))
}

fn parse_confusion_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let bad = |e: csv::Error| Error::Validation(format!("malformed confusion csv: {e}"));
    let classes: Vec<String> = reader.headers().map_err(bad)?.iter().skip(1).map(String::from).collect();
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(bad)?;
        let row = rec
            .iter()
            .skip(1)
            .map(|v| {
                v.trim().parse::<usize>().map_err(|_| Error::Record {
                    index: i,
                    message: format!("non-integer count {v:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok((classes, rows))
}

/// Fixed-width confusion table with class names on both axes.
pub fn render_table(classes: &[String], confusion: &[Vec<usize>]) -> String {
    let name_w = classes.iter().map(String::len).max().unwrap_or(0).max("true".len());
    let max_count = confusion.iter().flatten().copied().max().unwrap_or(0);
    let cell_w = classes
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(1)
        .max(max_count.to_string().len());
    let mut out = format!("{:<name_w$}", "true");
    for c in classes {
        let _ = write!(out, " {c:>cell_w$}");
    }
    out.push('\n');
    for (c, row) in classes.iter().zip(confusion) {
        let _ = write!(out, "{c:<name_w$}");
        for v in row {
            let _ = write!(out, " {v:>cell_w$}");
        }
        out.push('\n');
    }
    out
}

/// Heatmap with one `class="cell"` rect per matrix entry, shaded by the
/// row-normalised count.
pub fn render_svg(classes: &[String], confusion: &[Vec<usize>]) -> String {
    const CELL: usize = 36;
    const MARGIN: usize = 110;
    let n = classes.len();
    let size = MARGIN + n * CELL + 10;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         font-family=\"sans-serif\" font-size=\"10\">\n"
    );
    for (i, row) in confusion.iter().enumerate() {
        let total: usize = row.iter().sum();
        for (j, &v) in row.iter().enumerate() {
            let frac = if total == 0 { 0.0 } else { v as f64 / total as f64 };
            let shade = (255.0 * (1.0 - frac)).round() as u8;
            let (x, y) = (MARGIN + j * CELL, MARGIN + i * CELL);
            let _ = writeln!(
                svg,
                "<rect class=\"cell\" x=\"{x}\" y=\"{y}\" width=\"{CELL}\" height=\"{CELL}\" \
                 fill=\"rgb({shade},{shade},255)\" stroke=\"#888\"><title>{} / {}: {v}</title></rect>",
                xml_escape(&classes[i]),
                xml_escape(&classes[j])
            );
            let colour = if frac > 0.5 { "white" } else { "black" };
            let _ = writeln!(
                svg,
                "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"{colour}\">{v}</text>",
                x + CELL / 2,
                y + CELL / 2 + 4
            );
        }
    }
    for (i, c) in classes.iter().enumerate() {
        let c = xml_escape(c);
        let mid = MARGIN + i * CELL + CELL / 2;
        let _ = writeln!(
            svg,
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\">{c}</text>",
            MARGIN - 4,
            mid + 4
        );
        let _ = writeln!(
            svg,
            "<text transform=\"translate({mid},{}) rotate(-60)\">{c}</text>",
            MARGIN - 4
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Writes `confusion.txt` and `confusion.svg`.
pub fn cmd_report(cfg: &RunConfig, input: &Path) -> Result<()> {
    let (classes, confusion) = load_confusion(input)?;
    create_dir(&cfg.out)?;
    let table = render_table(&classes, &confusion);
    write_file(&cfg.out.join("confusion.txt"), &table)?;
    write_file(&cfg.out.join("confusion.svg"), render_svg(&classes, &confusion))?;
    print!("{table}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate { common, runs } => {
            let mut cfg = resolve(&common)?;
            if let Some(r) = runs {
                cfg.runs = r;
            }
            cmd_simulate(&cfg)
        }
        Command::Transduce {
            common,
            input,
            label,
            duration_ms,
        } => {
            let cfg = resolve(&common)?;
            cmd_transduce(&cfg, &input, &label, duration_ms.map(|ms| ms * 1000))
        }
        Command::Classify {
            common,
            dataset,
            protocol,
            ratio,
        } => {
            let mut cfg = resolve(&common)?;
            if let Some(p) = protocol {
                cfg.protocol = p;
            }
            if let Some(r) = ratio {
                cfg.split_ratio = r;
            }
            cmd_classify(&cfg, &dataset).map(drop)
        }
        Command::Optimize {
            common,
            dataset,
            target,
            epochs,
            range,
            stride,
            subsample,
        } => {
            let mut cfg = resolve(&common)?;
            let opt = &mut cfg.optimize;
            if let Some(v) = epochs {
                opt.epochs = v;
            }
            if let Some(v) = range {
                opt.delta_t_range_ms = v;
            }
            if let Some(v) = stride {
                opt.stride_ms = v;
            }
            if let Some(v) = subsample {
                opt.subsample_per_class = Some(v);
            }
            cmd_optimize(&cfg, &dataset, target).map(drop)
        }
        Command::Report { common, input } => {
            let cfg = resolve(&common)?;
            cmd_report(&cfg, &input)
        }
    }
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("spiketex: {e}");
            e.exit_code()
        }
    }
}
