//! Command-line front end: `build`, `detect`, `scan`, `synth` and `eval`.
//!
//! Every option can also come from a flat JSON file given with `--config`;
//! flags win over the file, the file wins over defaults.

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sst_hotspot_core::eval::{compare, Flatten};
use sst_hotspot_core::stscan::{ScanResult, DEFAULT_ALPHA, DEFAULT_MAX_FRACTION};
use sst_hotspot_core::synth::{generate, SynthConfig};
use sst_hotspot_core::{
    run_sst_hotspot, CountTensor, HotspotReport, LikelyThreshold, NeighborMatrix, Orientation,
    SstConfig,
};

use crate::adjacency::{parse_adjacency, parse_centroids};
use crate::error::{Error, Result};
use crate::geojson::{write_geojson, RegionGeometry};
use crate::parallel::{scan_tensors, ScanOptions};
use crate::records::{build_pair, parse_records};
use crate::report::{
    read_report, read_scan, to_json, write_report, write_scan, write_text, ScanDocument,
    TensorDocument, KIND_TENSORS,
};
use crate::schema::RecordSchema;
use crate::synth_io::{write_synth, TruthDocument};
use crate::table::{comparison_csv, comparison_json};
use crate::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(name = "sst-hotspot", version, about = "Spatiotemporal hotspot detection on count tensors")]
pub struct Cli {
    /// Worker threads for Monte Carlo replicas (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// JSON file with default values for any option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build population and case tensors and write them as JSON.
    Build(BuildArgs),
    /// Run eigenvector-matching hotspot detection.
    Detect(DetectArgs),
    /// Run the space-time scan statistic.
    Scan(ScanArgs),
    /// Generate a synthetic data set with a known outbreak.
    Synth(SynthArgs),
    /// Score detect and scan outputs against ground truth.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdArg {
    St,
    Ds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrientationArg {
    CaseExcess,
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlattenArg {
    Members,
    Centers,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct InputArgs {
    /// Case records (CSV).
    #[arg(long)]
    pub cases: Option<PathBuf>,
    /// Population records (CSV).
    #[arg(long)]
    pub population: Option<PathBuf>,
    /// Record schema (JSON).
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Count column of the population file, if it differs from the schema's.
    #[arg(long)]
    pub population_count: Option<String>,
    /// Region adjacency pairs (CSV).
    #[arg(long)]
    pub adjacency: Option<PathBuf>,
    /// The adjacency file starts with a header row.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub adjacency_header: Option<bool>,
    /// Region centroids (CSV with region,x,y).
    #[arg(long)]
    pub centroids: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Eigenvectors kept per mode, comma separated (default 2,2,1,...).
    #[arg(long, value_delimiter = ',')]
    pub ranks: Option<Vec<usize>>,
    /// Spread bound for the likely cluster: std of ST or std of DS.
    #[arg(long, value_enum)]
    pub likely_threshold: Option<ThresholdArg>,
    /// Sign convention for the matched eigenvectors.
    #[arg(long, value_enum)]
    pub orientation: Option<OrientationArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a GeoJSON map (needs --geometry).
    #[arg(long)]
    pub geojson: Option<PathBuf>,
    /// Region polygons as a GeoJSON FeatureCollection.
    #[arg(long)]
    pub geometry: Option<PathBuf>,
    /// Feature property holding the region id (default `id`).
    #[arg(long)]
    pub geometry_id: Option<String>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputArgs,
    /// Score only cylinders with an elevated rate.
    #[arg(long, value_enum)]
    pub elevated_only: Option<Switch>,
    /// Monte Carlo replicas; 0 skips p-values.
    #[arg(long)]
    pub replications: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest share of the total baseline a disk may hold.
    #[arg(long)]
    pub max_fraction: Option<f64>,
    /// Significance level for the listed clusters.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Cylinders kept in the output, best first; 0 keeps all (default 1000).
    #[arg(long)]
    pub keep: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthArgs {
    /// Generator settings (JSON); defaults to a 5x5 grid.
    #[arg(long)]
    pub synth_config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub relative_risk: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalArgs {
    /// Output of `detect`.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Output of `scan`.
    #[arg(long)]
    pub scan: Option<PathBuf>,
    /// Ground truth, as written by `synth`.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Score cluster members or centers only.
    #[arg(long, value_enum)]
    pub flatten: Option<FlattenArg>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comparison table (CSV); printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comparison table as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Fills every unset field of `flags` from `config`.
pub fn merged<T: Serialize + DeserializeOwned>(flags: &T, config: Option<&Value>) -> Result<T> {
    let Some(Value::Object(base)) = config else {
        return Ok(serde_json::from_value(serde_json::to_value(flags)?)?);
    };
    let mut out = base.clone();
    if let Value::Object(set) = serde_json::to_value(flags)? {
        for (k, v) in set {
            if !v.is_null() {
                out.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(out)).map_err(|e| Error::Config(e.to_string()))
}

fn need<'a, T>(v: &'a Option<T>, flag: &str) -> Result<&'a T> {
    v.as_ref()
        .ok_or_else(|| Error::Config(format!("--{flag} is required")))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

/// Population and case tensors over shared categories.
pub fn load_tensors(input: &InputArgs) -> Result<(CountTensor, CountTensor, TensorDocument)> {
    let schema = RecordSchema::load(need(&input.schema, "schema")?)?;
    let cases = parse_records(open(need(&input.cases, "cases")?)?, &schema)?;
    let mut pop_schema = schema.clone();
    if let Some(c) = &input.population_count {
        pop_schema.count = Some(c.clone());
    }
    let population = parse_records(open(need(&input.population, "population")?)?, &pop_schema)?;
    let mut unknown = cases.unknown.clone();
    for (k, v) in &population.unknown {
        let e = unknown.entry(k.clone()).or_default();
        e.extend(v.iter().cloned());
        e.sort();
        e.dedup();
    }
    for (col, values) in &unknown {
        log::warn!("{col}: {} categories outside the declared list: {values:?}", values.len());
    }
    let (p, c) = build_pair(&population, &cases, &schema)?;
    let doc = TensorDocument {
        population: p.clone(),
        cases: c.clone(),
        unknown_categories: unknown,
    };
    Ok((p, c, doc))
}

fn regions(t: &CountTensor) -> &[String] {
    &t.modes()[t.space_mode()].categories
}

fn times(t: &CountTensor) -> &[String] {
    &t.modes()[t.time_mode()].categories
}

fn load_adjacency(input: &InputArgs, regions: &[String]) -> Result<NeighborMatrix> {
    let path = need(&input.adjacency, "adjacency")?;
    parse_adjacency(open(path)?, regions, input.adjacency_header.unwrap_or(false))
}

pub fn cmd_build(args: &BuildArgs) -> Result<()> {
    let (_, _, doc) = load_tensors(&args.input)?;
    if !doc.unknown_categories.is_empty() {
        log::warn!("unknown categories are listed in the output");
    }
    write_text(need(&args.out, "out")?, &to_json(KIND_TENSORS, &doc)?)
}

fn core_module(e: &sst_hotspot_core::Error) -> &'static str {
    use sst_hotspot_core::Error as E;
    match e {
        E::NonConvergence { .. }
        | E::DegenerateMode { .. }
        | E::RankExceedsDim { .. }
        | E::ZeroRank { .. }
        | E::ModeOutOfRange { .. } => "tensor-core",
        _ => "eigenmatch",
    }
}

pub fn detect(args: &DetectArgs) -> Result<HotspotReport> {
    let (p, c, _) = load_tensors(&args.input)?;
    let nb = load_adjacency(&args.input, regions(&p))?;
    let cfg = SstConfig {
        ranks: args.ranks.clone(),
        likely_threshold: match args.likely_threshold {
            Some(ThresholdArg::Ds) => LikelyThreshold::StdDs,
            _ => LikelyThreshold::StdSt,
        },
        orientation: match args.orientation {
            Some(OrientationArg::Canonical) => Orientation::Canonical,
            _ => Orientation::CaseExcess,
        },
        ..SstConfig::default()
    };
    run_sst_hotspot(&p, &c, &nb, &cfg).map_err(|e| Error::Core {
        module: core_module(&e),
        source: e,
    })
}

pub fn cmd_detect(args: &DetectArgs) -> Result<()> {
    let out = need(&args.out, "out")?;
    if args.geojson.is_some() && args.geometry.is_none() {
        return Err(Error::Config("--geojson needs --geometry".into()));
    }
    let report = detect(args)?;
    log::info!(
        "centers {:?}, temporal centers {:?}",
        report.center_labels(),
        report.temporal_center_labels()
    );
    write_report(&report, out)?;
    if let (Some(path), Some(geometry)) = (&args.geojson, &args.geometry) {
        let geo = RegionGeometry::load(geometry, args.geometry_id.as_deref().unwrap_or("id"))?;
        let g = write_geojson(&report, &geo, path)?;
        log::info!("{} features written, {} skipped", g.written, g.skipped.len());
    }
    Ok(())
}

pub fn scan_options(args: &ScanArgs) -> ScanOptions {
    ScanOptions {
        max_fraction: args.max_fraction.unwrap_or(DEFAULT_MAX_FRACTION),
        elevated_only: args.elevated_only != Some(Switch::Off),
        replications: args.replications.unwrap_or(999),
        seed: args.seed.unwrap_or(DEFAULT_SEED),
    }
}

pub fn scan(args: &ScanArgs) -> Result<ScanDocument> {
    let (p, c, _) = load_tensors(&args.input)?;
    let coords = match &args.input.centroids {
        Some(path) => Some(parse_centroids(open(path)?, regions(&p))?),
        None => None,
    };
    let nb = match (&coords, &args.input.adjacency) {
        (None, Some(_)) => Some(load_adjacency(&args.input, regions(&p))?),
        (None, None) => {
            return Err(Error::Config(
                "scan needs --centroids or --adjacency".into(),
            ))
        }
        _ => None,
    };
    let sr = scan_tensors(&p, &c, coords.as_deref(), nb.as_ref(), &scan_options(args))?;
    Ok(ScanDocument::new(
        sr,
        regions(&p).to_vec(),
        times(&p).to_vec(),
        args.alpha.unwrap_or(DEFAULT_ALPHA),
        args.keep.unwrap_or(1000),
    ))
}

pub fn cmd_scan(args: &ScanArgs) -> Result<()> {
    let out = need(&args.out, "out")?;
    let doc = scan(args)?;
    if let Some(top) = doc.result.top() {
        log::info!(
            "top cylinder at {} over {:?}, score {:.4}, p {:?}",
            doc.region_labels[top.center],
            top.window,
            top.score,
            top.p_value
        );
    }
    write_scan(&doc, out)
}

pub fn cmd_synth(args: &SynthArgs) -> Result<()> {
    let out = need(&args.out, "out")?;
    let mut cfg = match &args.synth_config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            serde_json::from_str::<SynthConfig>(&text)?
        }
        None => SynthConfig::grid_default(DEFAULT_SEED),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(rr) = args.relative_risk {
        cfg.injection.relative_risk = rr;
    }
    let data = generate(&cfg).map_err(Error::core("evalsynth"))?;
    write_synth(&data, out)?;
    Ok(())
}

/// Scan cylinders renumbered into the report's region order.
fn align_scan(doc: &ScanDocument, labels: &[String]) -> Result<ScanResult> {
    let map = doc
        .region_labels
        .iter()
        .map(|r| {
            labels
                .iter()
                .position(|l| l == r)
                .ok_or_else(|| Error::UnknownRegion {
                    context: "scan result".into(),
                    region: r.clone(),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut sr = doc.result.clone();
    // the top cylinder plus the significant ones is all the comparison reads
    let mut cylinders: Vec<_> = sr.cylinders.first().cloned().into_iter().collect();
    for c in &doc.significant {
        if cylinders.first() != Some(c) {
            cylinders.push(c.clone());
        }
    }
    for c in &mut cylinders {
        c.center = map[c.center];
        c.members = c.members.iter().map(|&m| map[m]).collect();
        c.members.sort_unstable();
    }
    sr.cylinders = cylinders;
    Ok(sr)
}

pub fn cmd_eval(args: &EvalArgs) -> Result<()> {
    let report = read_report(need(&args.report, "report")?)?;
    let doc = read_scan(need(&args.scan, "scan")?)?;
    let truth = TruthDocument::load(need(&args.truth, "truth")?)?
        .resolve(&report.region_labels, &report.time_labels)?;
    let sr = align_scan(&doc, &report.region_labels)?;
    let flatten = match args.flatten {
        Some(FlattenArg::Centers) => Flatten::Centers,
        _ => Flatten::Members,
    };
    let table = compare(&report, &sr, &truth, flatten, args.alpha.unwrap_or(doc.alpha));
    let csv = comparison_csv(&table, &report.region_labels)?;
    match &args.out {
        Some(path) => write_text(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.json {
        write_text(path, &comparison_json(&table, &report.region_labels)?)?;
    }
    Ok(())
}

fn load_config(path: Option<&PathBuf>) -> Result<Option<Value>> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v: Value = serde_json::from_str(&text)?;
    if !v.is_object() {
        return Err(Error::Config(format!("{}: expected a JSON object", path.display())));
    }
    Ok(Some(v))
}

fn dispatch(cli: &Cli) -> Result<()> {
    let config = load_config(cli.config.as_ref())?;
    let threads = cli.threads.or_else(|| {
        config
            .as_ref()
            .and_then(|c| c.get("threads"))
            .and_then(Value::as_u64)
            .map(|n| n as usize)
    });
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let c = config.as_ref();
    pool.install(|| match &cli.command {
        Command::Build(a) => cmd_build(&merged(a, c)?),
        Command::Detect(a) => cmd_detect(&merged(a, c)?),
        Command::Scan(a) => cmd_scan(&merged(a, c)?),
        Command::Synth(a) => cmd_synth(&merged(a, c)?),
        Command::Eval(a) => cmd_eval(&merged(a, c)?),
    })
}

/// Runs the parsed command; failures go to stderr as JSON.
pub fn run(cli: &Cli) -> u8 {
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

/// Parses `args` (program name first) and runs. Usage errors exit with 2.
pub fn main_with<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
