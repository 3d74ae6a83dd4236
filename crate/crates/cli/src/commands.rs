use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use log::{error, info, warn};
use rayon::prelude::*;
use serde::Serialize;
use vocalfeat::io::{
    format_sig, load_feature_csv, load_manifest, load_signal, save_feature_csv, save_feature_json,
    FeatureRow, SignalFormat, CSV_DIGITS,
};
use vocalfeat::ml::{
    cross_validate, decision_grid, decision_strip, sweep, Bounds, CvConfig, CvReport, DecisionGrid,
    Matrix, ModelFile, Pipeline, PipelineConfig, SweepPoint,
};
use vocalfeat::stats::{correlation_map, grouped_boxplots};
use vocalfeat::synth::{write_surrogate_dataset, SurrogateConfig};
use vocalfeat::{extract_features, ConfigRecord, LabelKind, FEATURE_NAMES};

use crate::config::RunConfig;
use crate::svg;

/// Features shown as boxplot panels unless `--panels` says otherwise.
pub const DEFAULT_PANELS: [&str; 6] = ["spl_5k", "hnr_2k", "cpp_2k", "slope_2k", "hbi_5k", "alpha_5k"];

pub const DEFAULT_GRID_RESOLUTION: usize = 200;

/// Marks errors raised by a numerical solver, as opposed to bad input.
#[derive(Debug)]
pub struct SolverFailure(pub vocalfeat::Error);

impl std::fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "solver failure: {}", self.0)
    }
}

impl std::error::Error for SolverFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.0)
    }
}

fn fit_error(e: vocalfeat::Error) -> anyhow::Error {
    match e {
        vocalfeat::Error::NotConverged { .. } | vocalfeat::Error::Degenerate(_) => {
            SolverFailure(e).into()
        }
        other => other.into(),
    }
}

/// What a command achieved when it did not fail outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Complete,
    /// Some configurations could not be processed; the rest were written.
    Partial,
}

impl Outcome {
    fn and(self, other: Outcome) -> Outcome {
        if self == Outcome::Partial || other == Outcome::Partial {
            Outcome::Partial
        } else {
            Outcome::Complete
        }
    }
}

fn ensure_out(rc: &RunConfig) -> Result<()> {
    std::fs::create_dir_all(&rc.out)
        .with_context(|| format!("creating output directory {}", rc.out.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))?;
    info!("wrote {}", path.display());
    Ok(())
}

fn num(v: f64) -> String {
    format_sig(v, CSV_DIGITS)
}

fn feature_table(rc: &RunConfig, explicit: Option<&Path>) -> Result<Vec<FeatureRow>> {
    let path = explicit.map_or_else(|| rc.out_file("features.csv"), Path::to_path_buf);
    load_feature_csv(&path).with_context(|| format!("loading feature table {}", path.display()))
}

fn extract_one(rec: &ConfigRecord, rc: &RunConfig) -> Result<FeatureRow> {
    let format = SignalFormat::from_path(&rec.signal_path)?;
    let signal = load_signal(&rec.signal_path, format, rc.sample_rate)?;
    let features = extract_features(&signal, &rc.features)?;
    Ok(FeatureRow {
        id: rec.id.clone(),
        label: rec.label,
        features,
    })
}

pub fn extract(rc: &RunConfig) -> Result<Outcome> {
    let manifest = rc.manifest()?;
    let records = load_manifest(manifest)?;
    ensure_out(rc)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(rc.jobs.unwrap_or(0))
        .build()
        .context("starting worker threads")?;
    let results: Vec<Result<FeatureRow>> =
        pool.install(|| records.par_iter().map(|r| extract_one(r, rc)).collect());
    let mut rows = Vec::with_capacity(results.len());
    let mut failed = 0usize;
    for (rec, res) in records.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => {
                failed += 1;
                error!("{}: {e:#}", rec.id);
            }
        }
    }
    let csv = rc.out_file("features.csv");
    save_feature_csv(&rows, &csv)?;
    save_feature_json(&rows, &rc.out_file("features.json"))?;
    info!("wrote {} ({} rows)", csv.display(), rows.len());
    if failed > 0 {
        warn!("{failed} of {} configurations failed", records.len());
        Ok(Outcome::Partial)
    } else {
        Ok(Outcome::Complete)
    }
}

pub fn correlate(rc: &RunConfig, features: Option<&Path>) -> Result<Outcome> {
    let rows = feature_table(rc, features)?;
    let feats: Vec<_> = rows.iter().map(|r| r.features).collect();
    let labels: Vec<_> = rows.iter().map(|r| r.label).collect();
    let map = correlation_map(&feats, &labels)?;
    ensure_out(rc)?;
    let mut csv = String::from("variable");
    for v in &map.variables {
        let _ = write!(csv, ",{v}");
    }
    csv.push('\n');
    for (name, row) in map.variables.iter().zip(&map.matrix) {
        csv.push_str(name);
        for &r in row {
            let _ = write!(csv, ",{}", num(r));
        }
        csv.push('\n');
    }
    write(&rc.out_file("corr.csv"), &csv)?;
    if rc.figures {
        write(&rc.out_file("corr.svg"), &svg::correlation_heatmap(&map))?;
    }
    Ok(Outcome::Complete)
}

pub fn boxplot(
    rc: &RunConfig,
    features: Option<&Path>,
    group: LabelKind,
    panels: &[String],
) -> Result<Outcome> {
    let panels: Vec<String> = if panels.is_empty() {
        DEFAULT_PANELS.iter().map(|s| (*s).to_owned()).collect()
    } else {
        panels.to_vec()
    };
    let panel_idx = panels
        .iter()
        .map(|p| {
            FEATURE_NAMES
                .iter()
                .position(|n| n == p)
                .ok_or_else(|| anyhow!("unknown feature {p:?} in --panels"))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows = feature_table(rc, features)?;
    let feats: Vec<_> = rows.iter().map(|r| r.features).collect();
    let labels: Vec<_> = rows.iter().map(|r| r.label).collect();
    ensure_out(rc)?;
    let mut csv = String::from(
        "feature,group,n,median,q1,q3,whisker_low,whisker_high,n_outliers,outliers\n",
    );
    let mut per_feature = Vec::with_capacity(FEATURE_NAMES.len());
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        let boxes = grouped_boxplots(&feats, &labels, j, group)?;
        for b in &boxes {
            let outliers: Vec<String> = b.outliers.iter().map(|&v| num(v)).collect();
            let _ = writeln!(
                csv,
                "{name},{},{},{},{},{},{},{},{},{}",
                b.group,
                b.n,
                num(b.median),
                num(b.q1),
                num(b.q3),
                num(b.whisker_low),
                num(b.whisker_high),
                b.outliers.len(),
                outliers.join(";")
            );
        }
        per_feature.push(boxes);
    }
    write(&rc.out_file(&format!("boxplot_{group}.csv")), &csv)?;
    if rc.figures {
        for j in panel_idx {
            let name = FEATURE_NAMES[j];
            let doc = svg::boxplot_panel(name, group.column_name(), &per_feature[j]);
            write(&rc.out_file(&format!("boxplot_{group}_{name}.svg")), &doc)?;
        }
    }
    Ok(Outcome::Complete)
}

/// LDA output dimension per classification target.
pub fn lda_dims(target: LabelKind) -> usize {
    match target {
        LabelKind::Pressure | LabelKind::Gc => 2,
        LabelKind::Symmetry => 1,
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    pub target: LabelKind,
    pub sweep: bool,
    pub sweep_c: Vec<f64>,
    pub sweep_gamma: Vec<f64>,
    pub grid_resolution: usize,
}

#[derive(Debug, Serialize)]
struct ClassifyReport<'a> {
    target: String,
    n_samples: usize,
    classes: Vec<i64>,
    standardize: bool,
    lda_dims: usize,
    lda_eigenvalues: Vec<f64>,
    svm_c: f64,
    svm_gamma: f64,
    gamma_from_data: bool,
    training_score: f64,
    cv_mean_accuracy: f64,
    cross_validation: &'a CvReport,
    sweep: Option<&'a [SweepPoint]>,
}

pub fn default_sweep_c() -> Vec<f64> {
    vocalfeat::ml::cv::log_space(1e-2, 1e3, 6)
}

pub fn default_sweep_gamma() -> Vec<f64> {
    vocalfeat::ml::cv::log_space(1e-3, 1e2, 6)
}

pub fn classify(rc: &RunConfig, features: Option<&Path>, opts: &ClassifyOptions) -> Result<Outcome> {
    let target = opts.target;
    let rows = feature_table(rc, features)?;
    if rows.is_empty() {
        bail!("feature table is empty");
    }
    let arrays: Vec<[f64; 9]> = rows.iter().map(|r| r.features.to_array()).collect();
    let x = Matrix::from_rows(&arrays)?;
    let y: Vec<i64> = rows.iter().map(|r| r.label.value(target)).collect();
    let cfg = CvConfig {
        k: rc.folds,
        seed: rc.seed,
        pipeline: PipelineConfig {
            standardize: rc.standardize,
            lda_dims: Some(lda_dims(target)),
            svm: rc.svm,
        },
        shared_embedding: rc.paper_mode,
    };
    let report = cross_validate(&x, &y, &cfg).map_err(fit_error)?;
    let model = Pipeline::fit(&x, &y, &cfg.pipeline).map_err(fit_error)?;
    let z = model.embed(&x)?;
    let predicted = model.svm.predict(&z)?;

    let sweep_points = if opts.sweep {
        let cs = if opts.sweep_c.is_empty() { default_sweep_c() } else { opts.sweep_c.clone() };
        let gs = if opts.sweep_gamma.is_empty() {
            default_sweep_gamma()
        } else {
            opts.sweep_gamma.clone()
        };
        Some(sweep(&x, &y, &cfg, &cs, &gs).map_err(fit_error)?)
    } else {
        None
    };

    ensure_out(rc)?;
    let lda = model
        .embedding
        .lda
        .as_ref()
        .expect("classification always projects with LDA");
    let summary = ClassifyReport {
        target: target.to_string(),
        n_samples: y.len(),
        classes: model.svm.classes.clone(),
        standardize: rc.standardize,
        lda_dims: lda.out_dims(),
        lda_eigenvalues: lda.eigenvalues.clone(),
        svm_c: model.svm.c,
        svm_gamma: model.svm.gamma,
        gamma_from_data: rc.svm.gamma.is_none(),
        training_score: report.training_score,
        cv_mean_accuracy: report.mean_accuracy,
        cross_validation: &report,
        sweep: sweep_points.as_deref(),
    };
    let json = serde_json::to_string_pretty(&summary)? + "\n";
    write(&rc.out_file(&format!("cv_report_{target}.json")), &json)?;

    let file = ModelFile::new(
        target.to_string(),
        FEATURE_NAMES.iter().map(|s| (*s).to_owned()).collect(),
        cfg.pipeline.clone(),
        model.clone(),
    );
    write(&rc.out_file(&format!("model_{target}.json")), &(file.to_json() + "\n"))?;

    let mut weights = String::from("feature");
    for k in 0..lda.out_dims() {
        let _ = write!(weights, ",ld{}", k + 1);
    }
    weights.push('\n');
    for (j, name) in FEATURE_NAMES.iter().enumerate() {
        weights.push_str(name);
        for k in 0..lda.out_dims() {
            let _ = write!(weights, ",{}", num(lda.weights[(j, k)]));
        }
        weights.push('\n');
    }
    write(&rc.out_file(&format!("lda_weights_{target}.csv")), &weights)?;

    if let Some(points) = &sweep_points {
        let mut csv = String::from("c,gamma,training_score,cv_mean_accuracy\n");
        for p in points {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                num(p.c),
                num(p.gamma),
                num(p.training_score),
                num(p.cv_mean_accuracy)
            );
        }
        write(&rc.out_file(&format!("sweep_{target}.csv")), &csv)?;
    }

    let bounds = Bounds::of(&z)?;
    let grid: DecisionGrid = if z.cols() == 2 {
        decision_grid(&model.svm, &bounds, opts.grid_resolution, opts.grid_resolution)?
    } else {
        decision_strip(&model.svm, &bounds, opts.grid_resolution)?
    };
    let mut csv = String::from("x,y,label\n");
    if grid.ys.is_empty() {
        for (x, l) in grid.xs.iter().zip(&grid.labels) {
            let _ = writeln!(csv, "{},0,{l}", num(*x));
        }
    } else {
        for (iy, gy) in grid.ys.iter().enumerate() {
            for (ix, gx) in grid.xs.iter().enumerate() {
                let _ = writeln!(csv, "{},{},{}", num(*gx), num(*gy), grid.at(ix, iy));
            }
        }
    }
    write(&rc.out_file(&format!("grid_{target}.csv")), &csv)?;

    if rc.figures {
        let points: Vec<Vec<f64>> = z.iter_rows().map(<[f64]>::to_vec).collect();
        let title = format!(
            "{target}: training score {:.1}%, CV {:.1}%",
            100.0 * report.training_score,
            100.0 * report.mean_accuracy
        );
        let doc = svg::decision_scatter(&title, &model.svm.classes, &grid, &points, &y, &predicted);
        write(&rc.out_file(&format!("lda_svm_{target}.svg")), &doc)?;
    }
    println!(
        "{target}: training score {:.4}, cv mean accuracy {:.4} ({} folds{})",
        report.training_score,
        report.mean_accuracy,
        rc.folds,
        if rc.paper_mode { ", shared embedding" } else { "" }
    );
    Ok(Outcome::Complete)
}

pub fn synth(rc: &RunConfig) -> Result<Outcome> {
    ensure_out(rc)?;
    let records = write_surrogate_dataset(&rc.out, rc.seed, &SurrogateConfig::default())?;
    let manifest: PathBuf = rc.out_file("manifest.csv");
    println!("{} configurations written; manifest {}", records.len(), manifest.display());
    Ok(Outcome::Complete)
}

/// Extraction, correlation, all three groupings and all three targets.
pub fn run_all(rc: &RunConfig, grid_resolution: usize) -> Result<Outcome> {
    let mut outcome = extract(rc)?;
    outcome = outcome.and(correlate(rc, None)?);
    for kind in LabelKind::ALL {
        outcome = outcome.and(boxplot(rc, None, kind, &[])?);
    }
    for target in LabelKind::ALL {
        let opts = ClassifyOptions {
            target,
            sweep: false,
            sweep_c: vec![],
            sweep_gamma: vec![],
            grid_resolution,
        };
        outcome = outcome.and(classify(rc, None, &opts)?);
    }
    Ok(outcome)
}
