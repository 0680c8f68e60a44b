//! Run configuration: a TOML document, optionally based on a catalog preset.
//!
//! Every key is optional in the file. Resolution order is: catalog preset
//! (if `preset` is set), then explicit keys, then documented defaults. Each
//! default that had to be filled in is listed in
//! [`RunConfig::defaults_filled`] so the run manifest is self-describing.
//!
//! ```toml
//! preset = "test1-linear-table"   # optional catalog entry
//! experiment = "convergence"      # convergence | gpc-sweep | energy | long-time | perturbation
//! problem = "test1"               # test1 | test2
//! delta = 0.01
//! random_dims = 2                 # N
//! gpc_order = 4                   # P, M = binomial(N + P, N)
//! degree = 1                      # k
//! h = [0.5, 0.25, 0.125, 0.0625]
//! dt = 1.5625e-5                  # omit with suggest_dt = true to use the CFL estimate
//! final_time = 1.5625e-3
//! boundary = "exact"              # exact | homogeneous
//! flux = { x = "minus-plus", y = "minus-plus" }
//! y_nodes = 9                     # default P + 5
//! cell_quadrature = 3             # default k + 2
//! scaling = "domain-average"      # domain-average | absolute
//!
//! [output]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::NormScaling;
use crate::error::{Error, Result};
use crate::ldg::FluxConvention;
use crate::leapfrog::{suggest_dt, DEFAULT_CFL};
use crate::presets::build_preset;
use crate::simulation::{BoundaryKind, CaseSpec, Discretization};

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Errors and observed orders over a list of mesh sizes.
    Convergence,
    /// Errors over a list of gPC orders on one mesh.
    GpcSweep,
    /// Discrete energy trace with homogeneous boundary data.
    Energy,
    /// Error time series of a long run.
    LongTime,
    /// Distance between runs with `a^2` and `a^2 + eps`.
    Perturbation,
}

/// Output locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// CSV file name inside `dir`.
    #[serde(default = "default_csv")]
    pub csv: String,
    /// Manifest file name inside `dir`.
    #[serde(default = "default_manifest")]
    pub manifest: String,
}

fn default_csv() -> String {
    "results.csv".into()
}

fn default_manifest() -> String {
    "manifest.json".into()
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            csv: default_csv(),
            manifest: default_manifest(),
        }
    }
}

/// The configuration file as written; every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub preset: Option<String>,
    pub experiment: Option<ExperimentKind>,
    pub problem: Option<String>,
    pub delta: Option<f64>,
    pub random_dims: Option<usize>,
    pub gpc_order: Option<usize>,
    pub degree: Option<usize>,
    pub h: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub suggest_dt: Option<bool>,
    pub cfl: Option<f64>,
    pub final_time: Option<f64>,
    pub flux: Option<FluxConvention>,
    pub boundary: Option<BoundaryKind>,
    pub y_nodes: Option<usize>,
    pub cell_quadrature: Option<usize>,
    pub scaling: Option<NormScaling>,
    pub sweep_orders: Option<Vec<usize>>,
    pub sample_every: Option<usize>,
    pub perturbation_eps: Option<Vec<f64>>,
    pub output: Option<OutputConfig>,
}

impl ConfigFile {
    /// Keys set in `other` replace those in `self`.
    fn overlay(self, other: ConfigFile) -> ConfigFile {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigFile { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            preset,
            experiment,
            problem,
            delta,
            random_dims,
            gpc_order,
            degree,
            h,
            dt,
            suggest_dt,
            cfl,
            final_time,
            flux,
            boundary,
            y_nodes,
            cell_quadrature,
            scaling,
            sweep_orders,
            sample_every,
            perturbation_eps,
            output
        )
    }
}

/// A validated configuration with every value resolved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub name: String,
    pub experiment: ExperimentKind,
    pub problem: String,
    pub delta: f64,
    pub random_dims: usize,
    pub gpc_order: usize,
    pub degree: usize,
    pub h: Vec<f64>,
    pub dt: f64,
    pub final_time: f64,
    pub flux: FluxConvention,
    pub boundary: BoundaryKind,
    pub y_nodes: usize,
    pub cell_quadrature: usize,
    pub scaling: NormScaling,
    pub sweep_orders: Vec<usize>,
    pub sample_every: usize,
    pub perturbation_eps: Vec<f64>,
    pub output: OutputConfig,
    /// Keys that were filled from defaults rather than the file or preset.
    pub defaults_filled: Vec<String>,
}

impl RunConfig {
    /// Cells per direction for mesh size `h` on the problem's domain.
    pub fn cells_for(&self, h: f64) -> Result<usize> {
        let domain = build_preset(&self.problem, self.delta)?.domain;
        let width = domain.width(0).max(domain.width(1));
        let n = (width / h).round();
        if n < 1.0 || (n * h - width).abs() > 1e-9 * width {
            return Err(Error::config(
                "h",
                format!("{h} does not divide the domain width {width}"),
            ));
        }
        Ok(n as usize)
    }

    /// The per-mesh case description for mesh size `h`.
    pub fn case(&self, h: f64) -> Result<CaseSpec> {
        let mut spec = CaseSpec::new(
            &self.problem,
            self.delta,
            self.degree,
            self.gpc_order,
            self.cells_for(h)?,
            self.dt,
            self.final_time,
        );
        spec.random_dims = Some(self.random_dims);
        spec.y_nodes = Some(self.y_nodes);
        spec.cell_quadrature = Some(self.cell_quadrature);
        spec.flux = self.flux;
        spec.boundary = self.boundary;
        spec.scaling = self.scaling;
        Ok(spec)
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output.dir.join(&self.output.csv)
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.output.dir.join(&self.output.manifest)
    }
}

/// Names of the built-in presets.
pub const CATALOG: &[&str] = &[
    "test1-linear-table",
    "test1-cubic-table",
    "test2-linear-table",
    "test2-cubic-table",
    "test1-gpc-sweep",
    "test2-gpc-sweep",
    "test1-long-time-small-noise",
    "test1-long-time-large-noise",
    "test2-long-time-small-noise",
    "test2-long-time-large-noise",
    "energy-homogeneous",
    "perturbation",
];

const TABLE_H: [f64; 4] = [0.5, 0.25, 0.125, 0.0625];

/// The file-level settings of a catalog preset.
pub fn catalog_entry(name: &str) -> Result<ConfigFile> {
    let base = |experiment, problem: &str, delta, degree, gpc_order, h: &[f64], dt, t| ConfigFile {
        preset: Some(name.to_string()),
        experiment: Some(experiment),
        problem: Some(problem.to_string()),
        delta: Some(delta),
        random_dims: Some(2),
        gpc_order: Some(gpc_order),
        degree: Some(degree),
        h: Some(h.to_vec()),
        dt: Some(dt),
        final_time: Some(t),
        ..ConfigFile::default()
    };
    use ExperimentKind::*;
    let entry = match name {
        "test1-linear-table" => base(
            Convergence,
            "test1",
            0.01,
            1,
            4,
            &TABLE_H,
            1.5625e-5,
            1.5625e-3,
        ),
        "test1-cubic-table" => base(
            Convergence,
            "test1",
            0.001,
            3,
            4,
            &TABLE_H,
            1.5625e-5,
            1.5625e-3,
        ),
        "test2-linear-table" => base(
            Convergence,
            "test2",
            0.01,
            1,
            4,
            &TABLE_H,
            1.5625e-5,
            1.5625e-3,
        ),
        "test2-cubic-table" => base(Convergence, "test2", 0.001, 3, 4, &TABLE_H, 2.5e-8, 2.5e-6),
        "test1-gpc-sweep" => ConfigFile {
            sweep_orders: Some((0..=5).collect()),
            ..base(
                GpcSweep,
                "test1",
                0.01,
                3,
                5,
                &[0.125],
                1.5625e-5,
                1.5625e-3,
            )
        },
        "test2-gpc-sweep" => ConfigFile {
            sweep_orders: Some((0..=5).collect()),
            ..base(GpcSweep, "test2", 0.01, 3, 5, &[0.125], 2.5e-8, 2.5e-6)
        },
        // the published runs go to T = 125; these stop at T = 5
        "test1-long-time-small-noise" => {
            long_time(base(LongTime, "test1", 1e-6, 1, 1, &[0.25], 6.25e-5, 5.0))
        }
        "test1-long-time-large-noise" => {
            long_time(base(LongTime, "test1", 1e-2, 1, 1, &[0.25], 6.25e-5, 5.0))
        }
        "test2-long-time-small-noise" => {
            long_time(base(LongTime, "test2", 1e-6, 1, 1, &[0.25], 6.25e-5, 5.0))
        }
        "test2-long-time-large-noise" => {
            long_time(base(LongTime, "test2", 1e-2, 1, 1, &[0.25], 6.25e-5, 5.0))
        }
        "energy-homogeneous" => ConfigFile {
            boundary: Some(BoundaryKind::Homogeneous),
            ..base(Energy, "test1", 0.0, 1, 4, &[0.25], 1e-3, 1.0)
        },
        "perturbation" => ConfigFile {
            boundary: Some(BoundaryKind::Homogeneous),
            perturbation_eps: Some(vec![1e-3, 5e-4, 2.5e-4]),
            sample_every: Some(10),
            ..base(Perturbation, "test1", 0.01, 1, 1, &[0.25], 1e-3, 2.0)
        },
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(entry)
}

fn long_time(c: ConfigFile) -> ConfigFile {
    ConfigFile {
        sample_every: Some(800),
        ..c
    }
}

/// Parse TOML text into a validated configuration. `preset_override`
/// replaces the file's `preset` key.
pub fn parse_config(text: &str, preset_override: Option<&str>) -> Result<RunConfig> {
    let mut file: ConfigFile = toml::from_str(text)?;
    if let Some(p) = preset_override {
        file.preset = Some(p.to_string());
    }
    resolve(file)
}

/// Load a configuration from a path, or treat the argument as inline TOML
/// when no such file exists and it parses.
pub fn load_config(path_or_text: &str, preset_override: Option<&str>) -> Result<RunConfig> {
    let path = Path::new(path_or_text);
    let text = if path.is_file() {
        std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?
    } else if path_or_text.contains('=') || path_or_text.trim().is_empty() {
        path_or_text.to_string()
    } else {
        return Err(Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "configuration file not found",
            ),
        });
    };
    parse_config(&text, preset_override)
}

/// Configuration of a catalog preset with no further overrides.
pub fn preset_config(name: &str) -> Result<RunConfig> {
    parse_config("", Some(name))
}

/// Apply the preset, fill defaults and validate.
pub fn resolve(file: ConfigFile) -> Result<RunConfig> {
    let file = match &file.preset {
        Some(name) => {
            let mut base = catalog_entry(name)?;
            // an explicit request for the CFL step replaces the preset's step
            if file.suggest_dt == Some(true) && file.dt.is_none() {
                base.dt = None;
            }
            base.overlay(file)
        }
        None => file,
    };
    let mut filled = Vec::new();
    macro_rules! or_default {
        ($field:ident, $value:expr) => {
            match file.$field.clone() {
                Some(v) => v,
                None => {
                    filled.push(stringify!($field).to_string());
                    $value
                }
            }
        };
    }
    let experiment = or_default!(experiment, ExperimentKind::Convergence);
    let problem = or_default!(problem, "test1".to_string());
    let delta = or_default!(delta, 0.0);
    let random_dims = or_default!(random_dims, 2);
    let gpc_order = or_default!(gpc_order, 4);
    let degree = or_default!(degree, 1);
    let h = file
        .h
        .clone()
        .ok_or_else(|| Error::config("h", "at least one mesh size is required"))?;
    let final_time = file
        .final_time
        .ok_or_else(|| Error::config("final_time", "a final time is required"))?;
    let flux = or_default!(flux, FluxConvention::default());
    let boundary = or_default!(boundary, BoundaryKind::Exact);
    let y_nodes = or_default!(y_nodes, gpc_order + 5);
    let cell_quadrature = or_default!(cell_quadrature, degree + 2);
    let scaling = or_default!(scaling, NormScaling::DomainAverage);
    let sweep_orders = or_default!(sweep_orders, (0..=gpc_order).collect());
    let sample_every = or_default!(sample_every, 1);
    let perturbation_eps = or_default!(perturbation_eps, vec![1e-3, 5e-4, 2.5e-4]);
    let output = or_default!(output, OutputConfig::default());
    let name = file
        .preset
        .clone()
        .unwrap_or_else(|| format!("{problem}-{experiment:?}").to_lowercase());

    // validation
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::config(
            "delta",
            format!("must lie in [0, 1), got {delta}"),
        ));
    }
    build_preset(&problem, delta)
        .map_err(|_| Error::config("problem", format!("unknown problem `{problem}`")))?;
    if random_dims < 2 {
        return Err(Error::config(
            "random_dims",
            "the benchmark coefficients read two random variables",
        ));
    }
    if h.is_empty() {
        return Err(Error::config("h", "mesh list is empty"));
    }
    if let Some(bad) = h.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(Error::config(
            "h",
            format!("mesh sizes must be positive, got {bad}"),
        ));
    }
    if !(final_time.is_finite() && final_time > 0.0) {
        return Err(Error::config("final_time", "must be positive"));
    }
    if y_nodes < gpc_order + 1 {
        return Err(Error::config(
            "y_nodes",
            format!("needs at least P + 1 = {}", gpc_order + 1),
        ));
    }
    if cell_quadrature < degree + 1 {
        return Err(Error::config(
            "cell_quadrature",
            format!("needs at least k + 1 = {}", degree + 1),
        ));
    }
    if sample_every == 0 {
        return Err(Error::config("sample_every", "must be at least 1"));
    }
    if experiment == ExperimentKind::Energy && boundary != BoundaryKind::Homogeneous {
        return Err(Error::config(
            "boundary",
            "energy runs need homogeneous boundary data",
        ));
    }
    if experiment == ExperimentKind::GpcSweep && sweep_orders.is_empty() {
        return Err(Error::config("sweep_orders", "no orders to sweep"));
    }
    if experiment == ExperimentKind::Perturbation && perturbation_eps.is_empty() {
        return Err(Error::config("perturbation_eps", "no perturbation levels"));
    }
    if let Some(c) = file.cfl {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::config("cfl", "must be positive"));
        }
    }

    let mut config = RunConfig {
        name,
        experiment,
        problem,
        delta,
        random_dims,
        gpc_order,
        degree,
        h,
        dt: 0.0,
        final_time,
        flux,
        boundary,
        y_nodes,
        cell_quadrature,
        scaling,
        sweep_orders,
        sample_every,
        perturbation_eps,
        output,
        defaults_filled: Vec::new(),
    };
    for &h in &config.h {
        config.cells_for(h)?;
    }
    config.dt = match (file.dt, file.suggest_dt.unwrap_or(false)) {
        (Some(dt), _) => {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config("dt", format!("must be positive, got {dt}")));
            }
            dt
        }
        (None, true) => {
            filled.push("dt".into());
            if file.cfl.is_none() {
                filled.push("cfl".into());
            }
            suggested_dt(&config, file.cfl.unwrap_or(DEFAULT_CFL))?
        }
        (None, false) => {
            return Err(Error::config("dt", "missing; set it or enable suggest_dt"));
        }
    };
    if config.final_time < config.dt {
        return Err(Error::config(
            "final_time",
            "must be at least one time step",
        ));
    }
    config.defaults_filled = filled;
    Ok(config)
}

/// CFL-based step for the finest mesh of `config`.
fn suggested_dt(config: &RunConfig, cfl: f64) -> Result<f64> {
    let finest = config.h.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut spec = config.case(finest)?;
    spec.dt = 1.0;
    spec.boundary = BoundaryKind::Homogeneous;
    let disc = Discretization::build(&spec)?;
    Ok(suggest_dt(&disc.op, cfl))
}
