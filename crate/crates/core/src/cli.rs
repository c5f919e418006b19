//! Command-line surface: `fit`, `simulate`, `predict`, `summarize`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::chain::{run_chain_on_stream, Chain, HyperConfig};
use crate::data::{predict_prob, Dataset};
use crate::diagnostics::{effective_sample_size, EssEstimate};
use crate::error::{Error, Result};
use crate::gibbs::{ModelKind, PriorConfig};
use crate::io::{
    atomic_write, config_hash, load_features, load_matrix, load_ucr, plot_data_csv, read_text, samples_csv,
    write_dataset, LabelMap, PointEstimates, RunHeader, Standardization,
};
use crate::metrics::{auc, pr_auc, MetricTable, Rate};
use crate::simulation::{generate_dataset, run_experiment, BetaVariant, CaseSpec, ExperimentReport, Preset};
use crate::summary::{summarize_at, PosteriorSummary, FUSION_LEVEL, SELECTION_LEVEL};

#[derive(Parser, Debug)]
#[command(
    name = "fusedlogit",
    version,
    about = "Fused-lasso logistic regression by Gibbs sampling"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run chains on one dataset and write draws, summary and plot data.
    Fit(FitArgs),
    /// Replicated synthetic experiment; writes a metric table per model.
    Simulate(SimulateArgs),
    /// Predicted probabilities (and AUC / PR-AUC given labels) from a saved fit.
    Predict(PredictArgs),
    /// Recompute a summary from a samples file.
    Summarize(SummarizeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DataFormat {
    Ucr,
    Matrix,
}

#[derive(Args, Debug, Clone)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    /// Defaults to `matrix` when --response-col is given, else `ucr`.
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    /// Zero-based response column for matrix files.
    #[arg(long)]
    pub response_col: Option<usize>,
    /// UCR label map, e.g. "-1:0,1:1".
    #[arg(long, default_value = "-1:0,1:1")]
    pub labels: String,
}

impl DataArgs {
    fn format(&self) -> DataFormat {
        self.format.unwrap_or(if self.response_col.is_some() {
            DataFormat::Matrix
        } else {
            DataFormat::Ucr
        })
    }
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub burnin: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub thin: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub r1: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub r2: f64,
    #[arg(long, default_value_t = 0.01)]
    pub delta2: f64,
    #[arg(long, default_value_t = 1e6)]
    pub alpha: f64,
    #[arg(long, value_parser = parse_preset)]
    pub preset: Option<Preset>,
}

impl ChainArgs {
    fn hyper(&self) -> Result<HyperConfig> {
        let (pi, pb) = self.preset.map_or((10_000, 6000), Preset::iterations_burnin);
        let h = HyperConfig {
            prior: PriorConfig {
                r1: self.r1,
                delta1: self.delta1,
                r2: self.r2,
                delta2: self.delta2,
                alpha: self.alpha,
            },
            iterations: self.iters.unwrap_or(pi),
            burnin: self.burnin.unwrap_or(pb),
            thin: self.thin,
            seed: self.seed,
        };
        h.validate()?;
        Ok(h)
    }
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_variant(s: &str) -> std::result::Result<BetaVariant, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long, value_parser = parse_model)]
    pub model: ModelKind,
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Independent chains, pooled; chain k uses stream k of the seed.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Centre and scale each feature column.
    #[arg(long)]
    pub standardize: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Subset of samples, summary, plot-data.
    #[arg(long, value_delimiter = ',', default_value = "samples,summary,plot-data")]
    pub emit: Vec<String>,
    /// key=value file with the same keys as the flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long = "model", value_parser = parse_model, value_delimiter = ',', default_value = "lbfl,lbfh")]
    pub models: Vec<ModelKind>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub case: u8,
    #[arg(long, default_value_t = 0.0)]
    pub rho: f64,
    #[arg(long, value_parser = parse_variant)]
    pub beta_variant: Option<BetaVariant>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    pub test_size: usize,
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write each replication's train and test sets.
    #[arg(long)]
    pub dump_data: bool,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PredictArgs {
    /// summary.json written by `fit`.
    #[arg(long)]
    pub summary: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<DataFormat>,
    #[arg(long)]
    pub response_col: Option<usize>,
    #[arg(long, default_value = "-1:0,1:1")]
    pub labels: String,
    /// Feature-only file (matrix format without a response column).
    #[arg(long)]
    pub unlabeled: bool,
    /// Shift the intercept by logit(rate) − logit(training positive rate).
    #[arg(long)]
    pub prior_correction: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SummarizeArgs {
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value_t = SELECTION_LEVEL)]
    pub selection_level: f64,
    #[arg(long, default_value_t = FUSION_LEVEL)]
    pub fusion_level: f64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parse a key=value config file into flag arguments.
pub fn config_file_args(path: &Path) -> Result<Vec<OsString>> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse {
            path: path.display().to_string(),
            line: i + 1,
            msg: "expected key=value".into(),
        })?;
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        match v {
            "true" => out.push(format!("--{k}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{k}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

/// Splice config-file arguments in front of the command-line flags so that
/// explicit flags win.
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>> {
    let pos = args.iter().position(|a| a == "--config");
    let Some(pos) = pos else { return Ok(args) };
    let path = args
        .get(pos + 1)
        .ok_or_else(|| Error::Config("--config needs a path".into()))?;
    let file_args = config_file_args(Path::new(path))?;
    if args.len() < 2 {
        return Ok(args);
    }
    let mut out = args[..2].to_vec();
    out.extend(file_args);
    out.extend(args[2..pos].iter().cloned());
    out.extend(args[pos + 2..].iter().cloned());
    Ok(out)
}

fn load_training(args: &DataArgs, standardize: bool) -> Result<(Dataset, Option<Standardization>)> {
    match args.format() {
        DataFormat::Ucr => {
            let map: LabelMap = args.labels.parse()?;
            let mut data = load_ucr(&args.data, &map)?;
            if !standardize {
                return Ok((data, None));
            }
            let s = Standardization::fit(data.x())?;
            let mut x = data.x().clone();
            s.apply(&mut x)?;
            data = Dataset::new(x, data.y().to_vec())?;
            Ok((data, Some(s)))
        }
        DataFormat::Matrix => load_matrix(&args.data, args.response_col.unwrap_or(0), standardize),
    }
}

fn pool(chains: Vec<Chain>) -> Chain {
    let mut it = chains.into_iter();
    let mut pooled = it.next().expect("at least one chain");
    for c in it {
        pooled.iterations.extend(c.iterations);
        pooled.beta0_draws.extend(c.beta0_draws);
        pooled.beta_draws.extend(c.beta_draws);
        for (a, b) in pooled.hyper_draws.iter_mut().zip(c.hyper_draws) {
            a.extend(b);
        }
        pooled.loglik_draws.extend(c.loglik_draws);
        pooled.retained += c.retained;
        pooled.pd_retry_count += c.pd_retry_count;
    }
    pooled
}

#[derive(Serialize)]
struct EssReport {
    beta0: EssEstimate,
    beta: Vec<EssEstimate>,
    hyper: BTreeMap<String, EssEstimate>,
}

fn ess_report(chain: &Chain) -> Result<EssReport> {
    let beta = (0..chain.p())
        .map(|j| effective_sample_size(&chain.beta_column(j)))
        .collect::<Result<_>>()?;
    let hyper = chain
        .hyper_names
        .iter()
        .zip(&chain.hyper_draws)
        .map(|(n, d)| Ok((n.clone(), effective_sample_size(d)?)))
        .collect::<Result<_>>()?;
    Ok(EssReport {
        beta0: effective_sample_size(&chain.beta0_draws)?,
        beta,
        hyper,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    atomic_write(path, s.as_bytes())
}

fn summary_record(
    header: &RunHeader,
    hyper: &HyperConfig,
    chain: &Chain,
    summary: &PosteriorSummary,
    standardization: Option<Standardization>,
    data_shape: Option<(usize, usize, f64)>,
) -> Result<serde_json::Value> {
    let point = PointEstimates {
        beta0: summary.beta0_mean,
        beta: summary.beta_mean.clone(),
        standardization,
    };
    Ok(json!({
        "meta": header,
        "config": hyper,
        "data": data_shape.map(|(n, p, pos)| json!({"n": n, "p": p, "positive_fraction": pos})),
        "retained": chain.retained,
        "pd_retries": chain.pd_retry_count,
        "n_zero": summary.n_zero(),
        "n_groups": summary.n_groups(),
        "ess": ess_report(chain)?,
        "point_estimates": point,
        "summary": summary,
    }))
}

pub fn cmd_fit(args: &FitArgs) -> Result<()> {
    let started = Instant::now();
    let hyper = args.chain.hyper()?;
    if args.chains == 0 {
        return Err(Error::Config("--chains must be at least 1".into()));
    }
    for e in &args.emit {
        if !matches!(e.as_str(), "samples" | "summary" | "plot-data") {
            return Err(Error::Config(format!("unknown --emit item '{e}'")));
        }
    }
    let (data, standardization) = load_training(&args.data, args.standardize)?;
    let header = RunHeader {
        seed: hyper.seed,
        model: args.model.to_string(),
        config_hash: config_hash(&json!({
            "command": "fit",
            "model": args.model,
            "hyper": hyper,
            "chains": args.chains,
            "standardize": args.standardize,
            "data": args.data.data.display().to_string(),
            "format": format!("{:?}", args.data.format()),
            "response_col": args.data.response_col,
            "labels": args.data.labels,
        }))?,
    };
    log::info!("fitting {} on n={} p={}", args.model, data.n(), data.p());
    let chains = (0..args.chains as u64)
        .into_par_iter()
        .map(|k| run_chain_on_stream(args.model, &data, &hyper, k))
        .collect::<Result<Vec<_>>>()?;
    let chain = pool(chains);
    let summary = summarize_at(&chain, SELECTION_LEVEL, FUSION_LEVEL)?;

    let out = &args.out;
    fs::create_dir_all(out)?;
    let emit = |name: &str| args.emit.iter().any(|e| e == name);
    if emit("samples") {
        atomic_write(out.join("samples.csv"), samples_csv(&chain, &header).as_bytes())?;
    }
    if emit("summary") {
        let record = summary_record(
            &header,
            &hyper,
            &chain,
            &summary,
            standardization,
            Some((data.n(), data.p(), data.positive_fraction())),
        )?;
        write_json(&out.join("summary.json"), &record)?;
    }
    if emit("plot-data") {
        atomic_write(out.join("plot_data.csv"), plot_data_csv(&summary, &header).as_bytes())?;
    }
    write_json(
        &out.join("run_info.json"),
        &json!({"meta": header, "runtime_seconds": started.elapsed().as_secs_f64()}),
    )?;
    Ok(())
}

fn fmt_rate(r: &Rate) -> String {
    r.map_or_else(|| "NA".to_string(), |m| format!("{}", m.mean))
}

/// Columns MSE, EL, PV, PZV, AV, PF, PNF, AF (means) plus replication counts.
pub fn metric_table_csv(rows: &[(ModelKind, MetricTable)], header: &RunHeader) -> String {
    let mut s = header.comment_block();
    s.push_str("model,MSE,EL,PV,PZV,AV,PF,PNF,AF,completed,failed\n");
    for (m, t) in rows {
        let _ = writeln!(
            s,
            "{m},{},{},{},{},{},{},{},{},{},{}",
            t.mse.mean,
            t.el.mean,
            fmt_rate(&t.pv),
            fmt_rate(&t.pzv),
            t.av.mean,
            fmt_rate(&t.pf),
            fmt_rate(&t.pnf),
            t.af.mean,
            t.completed,
            t.failed
        );
    }
    s
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<()> {
    let started = Instant::now();
    let hyper = args.chain.hyper()?;
    let variant = args.beta_variant.unwrap_or(if args.case == 4 {
        BetaVariant::B4
    } else {
        BetaVariant::B1
    });
    let mut spec = CaseSpec::standard(args.case, variant, args.rho, hyper.seed);
    if let Some(n) = args.n {
        spec.n = n;
    }
    spec.replications = args
        .reps
        .or(args.chain.preset.map(Preset::replications))
        .unwrap_or(spec.replications);
    spec.test_size = args.test_size;
    spec.validate()?;

    let models_str = args.models.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("+");
    let header = RunHeader {
        seed: hyper.seed,
        model: models_str,
        config_hash: config_hash(&json!({
            "command": "simulate",
            "models": args.models,
            "spec": spec,
            "hyper": hyper,
        }))?,
    };
    fs::create_dir_all(&args.out)?;
    if args.dump_data {
        for k in 0..spec.replications {
            let (train, test) = generate_dataset(&spec, k)?;
            write_dataset(args.out.join(format!("train_rep{k}.csv")), &train, Some(&header))?;
            write_dataset(args.out.join(format!("test_rep{k}.csv")), &test, Some(&header))?;
        }
    }
    let mut reports: Vec<ExperimentReport> = Vec::new();
    for &m in &args.models {
        log::info!(
            "case {} {variant} {m}: {} replications",
            spec.case_id,
            spec.replications
        );
        reports.push(run_experiment(&spec, m, &hyper)?);
    }
    let rows: Vec<(ModelKind, MetricTable)> = reports.iter().map(|r| (r.model, r.table.clone())).collect();
    atomic_write(
        args.out.join("metrics.csv"),
        metric_table_csv(&rows, &header).as_bytes(),
    )?;
    write_json(
        &args.out.join("metrics.json"),
        &json!({"meta": header, "config": hyper, "reports": reports}),
    )?;
    write_json(
        &args.out.join("run_info.json"),
        &json!({"meta": header, "runtime_seconds": started.elapsed().as_secs_f64()}),
    )?;
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let record: serde_json::Value = serde_json::from_str(&read_text(&args.summary)?)?;
    let point: PointEstimates = serde_json::from_value(
        record
            .get("point_estimates")
            .cloned()
            .ok_or_else(|| Error::Config(format!("{} has no point_estimates", args.summary.display())))?,
    )?;
    let header: RunHeader =
        serde_json::from_value(record.get("meta").cloned().unwrap_or_default()).unwrap_or(RunHeader {
            seed: 0,
            model: "unknown".into(),
            config_hash: String::new(),
        });

    let format = args.format.unwrap_or(if args.response_col.is_some() || args.unlabeled {
        DataFormat::Matrix
    } else {
        DataFormat::Ucr
    });
    let (mut x, y): (DMatrix<f64>, Option<Vec<u8>>) = match (format, args.unlabeled) {
        (DataFormat::Ucr, _) => {
            let d = load_ucr(&args.data, &args.labels.parse()?)?;
            (d.x().clone(), Some(d.y().to_vec()))
        }
        (DataFormat::Matrix, true) => (load_features(&args.data)?, None),
        (DataFormat::Matrix, false) => {
            let (d, _) = load_matrix(&args.data, args.response_col.unwrap_or(0), false)?;
            (d.x().clone(), Some(d.y().to_vec()))
        }
    };
    if x.ncols() != point.beta.len() {
        return Err(Error::Dimension(format!(
            "fit has p={} but {} has {} feature columns",
            point.beta.len(),
            args.data.display(),
            x.ncols()
        )));
    }
    if let Some(s) = &point.standardization {
        s.apply(&mut x)?;
    }
    let beta0 = match args.prior_correction {
        None => point.beta0,
        Some(rate) => {
            let train_rate = record
                .pointer("/data/positive_fraction")
                .and_then(serde_json::Value::as_f64)
                .ok_or_else(|| Error::Config("summary has no training positive fraction".into()))?;
            point.beta0 + intercept_shift(rate, train_rate)?
        }
    };
    let probs: Vec<f64> = x
        .row_iter()
        .map(|r| predict_prob(beta0, &point.beta, r.transpose().as_slice()))
        .collect();

    let mut csv = header.comment_block();
    csv.push_str(if y.is_some() { "row,prob,label\n" } else { "row,prob\n" });
    for (i, p) in probs.iter().enumerate() {
        match &y {
            Some(y) => writeln!(csv, "{},{p},{}", i + 1, y[i]),
            None => writeln!(csv, "{},{p}", i + 1),
        }
        .expect("string write");
    }
    let out = &args.out;
    fs::create_dir_all(out)?;
    atomic_write(out.join("predictions.csv"), csv.as_bytes())?;
    if let Some(y) = &y {
        let a = auc(&probs, y)?;
        let pr = pr_auc(&probs, y)?;
        let pos = y.iter().filter(|v| **v == 1).count();
        write_json(
            &out.join("predict_metrics.json"),
            &json!({"meta": header, "n": y.len(), "positives": pos, "auc": a, "pr_auc": pr}),
        )?;
    }
    Ok(())
}

/// logit(target) − logit(train), both rates in (0, 1).
pub fn intercept_shift(target: f64, train: f64) -> Result<f64> {
    for r in [target, train] {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("positive rate must lie in (0,1), got {r}")));
        }
    }
    let logit = |r: f64| (r / (1.0 - r)).ln();
    Ok(logit(target) - logit(train))
}

/// Rebuild a [`Chain`] from a samples CSV.
pub fn read_samples(path: &Path) -> Result<(Chain, Option<RunHeader>)> {
    let text = read_text(path)?;
    let perr = |line: usize, msg: String| Error::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    let mut meta: BTreeMap<String, String> = BTreeMap::new();
    let mut lines = text.lines().enumerate().peekable();
    while let Some((_, l)) = lines.peek() {
        if let Some(rest) = l.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.insert(k.to_string(), v.to_string());
            }
            lines.next();
        } else {
            break;
        }
    }
    let (hline, cols) = lines.next().ok_or_else(|| perr(0, "missing header row".into()))?;
    let cols: Vec<&str> = cols.split(',').collect();
    if cols.len() < 3 || cols[0] != "iter" || cols[1] != "beta0" {
        return Err(perr(hline + 1, "expected columns iter,beta0,beta_1,...".into()));
    }
    let p = cols.iter().filter(|c| c.starts_with("beta_")).count();
    let hyper_names: Vec<String> = cols[2 + p..].iter().map(|s| s.to_string()).collect();
    let model: ModelKind = match meta.get("model") {
        Some(m) => m.parse()?,
        None => match hyper_names.first().map(String::as_str) {
            Some("lambda_sq") => ModelKind::Blasso,
            Some("tlambda1_sq") => ModelKind::Lbfh,
            _ => ModelKind::Lbfl,
        },
    };
    let mut chain = Chain {
        model,
        iterations: Vec::new(),
        beta0_draws: Vec::new(),
        beta_draws: Vec::new(),
        hyper_names: hyper_names.clone(),
        hyper_draws: vec![Vec::new(); hyper_names.len()],
        loglik_draws: Vec::new(),
        retained: 0,
        pd_retry_count: 0,
    };
    for (i, l) in lines {
        if l.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = l.split(',').collect();
        if f.len() != cols.len() {
            return Err(perr(
                i + 1,
                format!("expected {} fields, found {}", cols.len(), f.len()),
            ));
        }
        let nums = f
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| perr(i + 1, format!("'{v}' is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        chain.iterations.push(nums[0] as usize);
        chain.beta0_draws.push(nums[1]);
        chain.beta_draws.push(nums[2..2 + p].to_vec());
        for (c, v) in chain.hyper_draws.iter_mut().zip(&nums[2 + p..]) {
            c.push(*v);
        }
        chain.retained += 1;
    }
    let header = match (meta.get("seed"), meta.get("model"), meta.get("config_hash")) {
        (Some(s), Some(m), Some(h)) => Some(RunHeader {
            seed: s.parse().map_err(|_| perr(1, format!("bad seed '{s}'")))?,
            model: m.clone(),
            config_hash: h.clone(),
        }),
        _ => None,
    };
    Ok((chain, header))
}

pub fn cmd_summarize(args: &SummarizeArgs) -> Result<()> {
    let (chain, header) = read_samples(&args.samples)?;
    let summary = summarize_at(&chain, args.selection_level, args.fusion_level)?;
    let header = header.unwrap_or(RunHeader {
        seed: 0,
        model: chain.model.to_string(),
        config_hash: String::new(),
    });
    let levels = json!({"selection": args.selection_level, "fusion": args.fusion_level});
    let record = json!({
        "meta": header,
        "levels": levels,
        "retained": chain.retained,
        "n_zero": summary.n_zero(),
        "n_groups": summary.n_groups(),
        "ess": ess_report(&chain)?,
        "point_estimates": PointEstimates {
            beta0: summary.beta0_mean,
            beta: summary.beta_mean.clone(),
            standardization: None,
        },
        "summary": summary,
    });
    write_json(&args.out, &record)
}

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Summarize(a) => cmd_summarize(a),
    }
}

/// Machine-readable record for a failed run.
pub fn error_record(e: &Error) -> serde_json::Value {
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::Dimension(_) => "dimension",
        Error::NotPositiveDefinite => "not_positive_definite",
        Error::ChainAborted { .. } => "chain_aborted",
        Error::InsufficientDraws { .. } => "insufficient_draws",
        Error::UndefinedRate(_) => "undefined_rate",
        Error::Config(_) => "config",
        Error::Parse { .. } => "parse",
        Error::ZeroVariance(_) => "zero_variance",
        Error::File { .. } | Error::Io(_) => "io",
        Error::Json(_) => "json",
    };
    json!({"error": kind, "message": e.to_string()})
}
