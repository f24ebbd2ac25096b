//! Command implementations behind the `sbpsat` binary. Each returns a
//! [`CommandResult`] whose pass flag maps to the exit status.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::analysis::{self, AnalysisError, RunOptions};
use crate::assembly::{self, presets, AssemblyError, RunConfig};
use crate::coupling::Scheme;
use crate::interp::{self, InterpError};
use crate::report::Certificate;
use crate::sbp::{self, SbpError};
use crate::sparse::Csr;
use crate::timestep::TimeError;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error(transparent)]
    Sbp(#[from] SbpError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    /// Failed runs are acceptance failures; everything else is configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Analysis(AnalysisError::Time(TimeError::NanDetected { .. })) => EXIT_FAIL,
            CliError::Analysis(AnalysisError::Level { source, .. }) if matches!(**source, AnalysisError::Time(TimeError::NanDetected { .. })) => EXIT_FAIL,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CommandResult {
    pub pass: bool,
    pub summary: String,
    pub files: Vec<PathBuf>,
}

impl CommandResult {
    pub fn exit_code(&self) -> i32 {
        if self.pass {
            EXIT_PASS
        } else {
            EXIT_FAIL
        }
    }
}

/// Where a config comes from and what to override.
#[derive(Clone, Debug, Default)]
pub struct ConfigSource {
    pub preset: Option<String>,
    pub config: Option<PathBuf>,
    pub order: Option<usize>,
    pub scheme: Option<String>,
    pub full: bool,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl ConfigSource {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match (&self.preset, &self.config) {
            (Some(_), Some(_)) => return Err(CliError::Config("give either --preset or --config, not both".into())),
            (None, None) => return Err(CliError::Config("one of --preset or --config is required".into())),
            (Some(name), None) => match name.as_str() {
                "extreme-interface-longtime" => presets::extreme_interface_longtime(self.full),
                "gentle-interface-longtime" => presets::gentle_interface_longtime(6, self.full),
                _ => presets::by_name(name)
                    .ok_or_else(|| CliError::Config(format!("unknown preset '{name}' (known: {})", presets::NAMES.join(", "))))?,
            },
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
                RunConfig::from_toml(&text)?
            }
        };
        if let Some(order) = self.order {
            cfg.order = order;
        }
        if let Some(s) = &self.scheme {
            let scheme = Scheme::parse(s).ok_or_else(|| CliError::Config(format!("unknown scheme '{s}'")))?;
            cfg = cfg.with_scheme(scheme);
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(t) = self.t_end {
            cfg.t_end = t;
        }
        Ok(cfg)
    }
}

fn write(dir: &Path, name: &str, text: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.into(), source })?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|source| CliError::Io { path: path.clone(), source })?;
    files.push(path);
    Ok(())
}

/// Certifies the SBP sets and the 1:2 interpolation pair of one order at
/// `n ∈ ns`, and reports whether the pair is norm-contracting. `d1_file`
/// replaces the first-derivative operator with a triplet file.
pub fn verify_ops(order: usize, ns: &[usize], d1_file: Option<&Path>, out: &Path) -> Result<CommandResult, CliError> {
    let mut files = Vec::new();
    let mut all = Certificate::new(format!("operators order {order}"));
    let injected = match d1_file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io { path: p.into(), source })?;
            Some(sbp::parse_triplets(&text).map_err(CliError::Config)?)
        }
        None => None,
    };
    for &n in ns {
        let mut set = sbp::build_sbp_set::<f64>(order, sbp::Grid1D::unit(n)?)?;
        if let Some(d1) = &injected {
            if d1.nrows != n || d1.ncols != n {
                return Err(CliError::Config(format!("injected D1 is {}×{}, grid has {n} nodes", d1.nrows, d1.ncols)));
            }
            set.d1 = d1.clone();
            set.q = d1.scale_rows(&set.h);
        }
        let c = sbp::verify_sbp_identities(&set);
        write(out, &format!("sbp_order{order}_n{n}.txt"), &c.to_kv(), &mut files)?;
        all.merge(&format!("sbp_n{n}"), c);
        let x = set.grid.nodes();
        let b = sbp::random_smooth_coefficient(&x, n as u64);
        let c = sbp::verify_variable_d2(&sbp::build_variable_d2(order, sbp::Grid1D::unit(n)?, b)?);
        write(out, &format!("variable_d2_order{order}_n{n}.txt"), &c.to_kv(), &mut files)?;
        all.merge(&format!("variable_d2_n{n}"), c);
        let pair = interp::build_interp_pair::<f64>(order, n)?;
        let c = interp::certify_pair(&pair);
        write(out, &format!("interp_order{order}_n{n}.txt"), &c.to_kv(), &mut files)?;
        all.merge(&format!("interp_n{n}"), c);
        let contraction = interp::check_norm_contracting(&pair);
        write(out, &format!("contraction_order{order}_n{n}.txt"), &contraction.to_kv(), &mut files)?;
        all.meta(format!("contracting_n{n}"), contraction.contracting);
    }
    let summary = all.to_kv();
    write(out, &format!("certificate_order{order}.txt"), &summary, &mut files)?;
    Ok(CommandResult { pass: all.passed(), summary, files })
}

/// Dense spectrum of `D`. Fails when `expect_stable` is set and the
/// eigenvalues leave `Re λ ≤ 10⁻⁸ρ`, `|Im λ| ≤ 10⁻⁶ρ`.
pub fn spectrum(cfg: &RunConfig, expect_stable: bool, out: &Path) -> Result<CommandResult, CliError> {
    let mut files = Vec::new();
    let sys = assembly::assemble_system(cfg)?;
    let rep = analysis::spectrum(&sys, 0)?;
    let hash = cfg.hash();
    write(out, "config.toml", &cfg.to_toml(), &mut files)?;
    write(out, "spectrum.csv", &rep.to_csv(&hash), &mut files)?;
    let stable = rep.is_stable(1e-8, 1e-6);
    let mut summary = format!("config_hash = {hash}\n");
    for ia in &sys.interfaces {
        summary.push_str(&ia.tau.to_kv());
    }
    summary.push_str(&rep.to_kv());
    summary.push_str(&format!("stable = {stable}\n"));
    write(out, "spectrum.txt", &summary, &mut files)?;
    Ok(CommandResult { pass: stable || !expect_stable, summary, files })
}

/// Time integration with L2 error and energy logs.
pub fn run(cfg: &RunConfig, out: &Path, step_budget: f64) -> Result<CommandResult, CliError> {
    if cfg.t_end <= 0.0 {
        return Err(CliError::Config("t_end must be positive for a run".into()));
    }
    let mut files = Vec::new();
    let sys = assembly::assemble_system(cfg)?;
    let opts = RunOptions { dt: None, cadence: cfg.cadence, track_energy: true, step_budget };
    let rep = analysis::run_system(&sys, cfg, &opts)?;
    let hash = cfg.hash();
    write(out, "config.toml", &cfg.to_toml(), &mut files)?;
    write(out, "errors.csv", &rep.errors_csv(&hash), &mut files)?;
    write(out, "energy.csv", &rep.energy.to_csv(&hash), &mut files)?;
    let summary = format!("config_hash = {hash}\n{}", rep.to_kv());
    write(out, "run.txt", &summary, &mut files)?;
    Ok(CommandResult { pass: rep.errors.iter().all(|e| e.1.is_finite()), summary, files })
}

/// Convergence study over `levels` refinements; with `expect_rate` the
/// observed rate must lie within 0.25 of it.
pub fn converge(cfg: &RunConfig, levels: usize, expect_rate: Option<f64>, out: &Path) -> Result<CommandResult, CliError> {
    let mut files = Vec::new();
    let table = analysis::convergence_study(cfg, levels)?;
    let hash = cfg.hash();
    write(out, "config.toml", &cfg.to_toml(), &mut files)?;
    write(out, "rates.csv", &table.to_csv(&hash), &mut files)?;
    let mut summary = format!("config_hash = {hash}\n{}", table.to_text());
    let pass = match expect_rate {
        Some(r) => {
            let ok = (table.rate - r).abs() <= 0.25;
            summary.push_str(&format!("expected rate = {r} ± 0.25: {}\n", if ok { "pass" } else { "FAIL" }));
            ok
        }
        None => true,
    };
    write(out, "rates.txt", &summary, &mut files)?;
    Ok(CommandResult { pass, summary, files })
}

/// Exports a matrix as triplet text.
pub fn export_matrix(m: &Csr<f64>, path: &Path) -> Result<(), CliError> {
    fs::write(path, sbp::triplet_text(m)).map_err(|source| CliError::Io { path: path.into(), source })
}
