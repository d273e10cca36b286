//! JSON run-configuration file mirroring the CLI flags. Command-line
//! flags override file values; unknown keys are rejected.

use serde::Deserialize;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub n: Option<usize>,
    pub t: Option<f64>,
    pub x: Option<Vec<f64>>,
    pub y: Option<Vec<f64>>,
    pub deriv: Option<String>,
    pub i: Option<usize>,
    pub f: Option<String>,
    pub alpha: Option<f64>,
    pub bound: Option<String>,
    pub samples: Option<usize>,
    pub c: Option<f64>,
    pub seed: Option<u64>,
    pub sampler: Option<String>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub t_points: Option<usize>,
    pub t_count: Option<usize>,
    pub x_radius: Option<f64>,
    pub x_points: Option<usize>,
    pub y_radius: Option<f64>,
    pub restrict_radius: Option<f64>,
    pub refine: Option<bool>,
    pub estimator: Option<String>,
    pub pairs: Option<usize>,
    pub pair_radius: Option<f64>,
    pub r_max: Option<f64>,
    pub check: Option<bool>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub s_cut_low: Option<f64>,
    pub s_cut_high: Option<f64>,
    pub output: Option<String>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub trace: Option<String>,
}

impl FileConfig {
    pub fn load(path: &str) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {path}: {e}"))?;
        serde_json::from_str(&text).map_err(|e| format!("invalid config {path}: {e}"))
    }
}

/// Flag-over-file resolution.
pub fn pick<T: Clone>(cli: &Option<T>, file: &Option<T>, default: T) -> T {
    cli.clone().or_else(|| file.clone()).unwrap_or(default)
}

/// Flag-over-file resolution without a default.
pub fn pick_opt<T: Clone>(cli: &Option<T>, file: &Option<T>) -> Option<T> {
    cli.clone().or_else(|| file.clone())
}
