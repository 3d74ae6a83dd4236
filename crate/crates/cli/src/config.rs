//! Resolution of the run configuration from flags, an optional TOML file,
//! the environment and built-in defaults, in that order of precedence.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use vocalfeat::features::HnrMargin;
use vocalfeat::ml::SvmParams;
use vocalfeat::FeatureConfig;

use crate::GlobalArgs;

pub const OUT_ENV: &str = "VOCALFEAT_OUT";
pub const DEFAULT_OUT: &str = "vocalfeat-out";
pub const DEFAULT_FOLDS: usize = 5;

/// Keys of the TOML config file; identical to the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub manifest: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub sample_rate: Option<f64>,
    pub lp_secondary: Option<f64>,
    pub hnr_margin: Option<String>,
    pub svm_c: Option<f64>,
    pub svm_gamma: Option<f64>,
    pub folds: Option<usize>,
    pub paper_mode: Option<bool>,
    pub no_standardize: Option<bool>,
    pub no_figures: Option<bool>,
    /// Full feature-extraction parameter set; flags above override its fields.
    pub features: Option<FeatureConfig>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub manifest: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub sample_rate: Option<f64>,
    pub features: FeatureConfig,
    pub svm: SvmParams,
    pub folds: usize,
    pub paper_mode: bool,
    pub standardize: bool,
    pub figures: bool,
}

impl RunConfig {
    pub fn resolve(flags: &GlobalArgs, file: FileConfig, env_out: Option<PathBuf>) -> Result<Self> {
        let mut features = file.features.unwrap_or_default();
        if let Some(hz) = flags.lp_secondary.or(file.lp_secondary) {
            features.lp_secondary = hz;
        }
        match (&flags.hnr_margin, &file.hnr_margin) {
            (Some(m), _) => features.hnr_margin = *m,
            (None, Some(s)) => {
                features.hnr_margin = s
                    .parse::<HnrMargin>()
                    .with_context(|| "config key hnr-margin")?
            }
            (None, None) => {}
        }
        let mut svm = SvmParams::default();
        if let Some(c) = flags.svm_c.or(file.svm_c) {
            svm.c = c;
        }
        svm.gamma = flags.svm_gamma.or(file.svm_gamma);
        if !(svm.c > 0.0 && svm.c.is_finite()) {
            bail!("--svm-c must be positive, got {}", svm.c);
        }
        if let Some(g) = svm.gamma {
            if !(g > 0.0 && g.is_finite()) {
                bail!("--svm-gamma must be positive, got {g}");
            }
        }
        let folds = flags.folds.or(file.folds).unwrap_or(DEFAULT_FOLDS);
        if folds < 2 {
            bail!("--folds must be at least 2, got {folds}");
        }
        let jobs = flags.jobs.or(file.jobs);
        if jobs == Some(0) {
            bail!("--jobs must be at least 1");
        }
        let sample_rate = flags.sample_rate.or(file.sample_rate);
        if let Some(fs) = sample_rate {
            if !(fs > 0.0 && fs.is_finite()) {
                bail!("--sample-rate must be positive, got {fs}");
            }
        }
        Ok(Self {
            manifest: flags.manifest.clone().or(file.manifest),
            out: flags
                .out
                .clone()
                .or(file.out)
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            jobs,
            sample_rate,
            features,
            svm,
            folds,
            paper_mode: flags.paper_mode || file.paper_mode.unwrap_or(false),
            standardize: !(flags.no_standardize || file.no_standardize.unwrap_or(false)),
            figures: !(flags.no_figures || file.no_figures.unwrap_or(false)),
        })
    }

    pub fn manifest(&self) -> Result<&Path> {
        match &self.manifest {
            Some(p) => Ok(p),
            None => bail!("no manifest given (use --manifest or the config key `manifest`)"),
        }
    }

    pub fn out_file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}
