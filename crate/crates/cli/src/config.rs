//! JSON run configuration.
//!
//! Every field has a default, so `{}` is a valid configuration. A manifest
//! written by a previous run is accepted as well: its `config` member is
//! the resolved configuration of that run.

use std::fs;
use std::path::{Path, PathBuf};

use lorentz_wire_core::interp::MonotoneCubic;
use lorentz_wire_core::potential::Waveform;
use lorentz_wire_core::{FieldModel, PhysParams, Profile};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::io::read_columns;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub params: PhysParams,
    pub field: FieldSource,
    pub tolerances: Tolerances,
    pub output: Output,
    pub period_map: PeriodMapSettings,
    pub potential: PotentialSettings,
    pub melnikov: MelnikovSettings,
    pub orbits: OrbitSettings,
    pub simulate: SimulateSettings,
    pub verify: VerifySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: PhysParams::canonical(),
            field: FieldSource::default(),
            tolerances: Tolerances::default(),
            output: Output::default(),
            period_map: PeriodMapSettings::default(),
            potential: PotentialSettings::default(),
            melnikov: MelnikovSettings::default(),
            orbits: OrbitSettings::default(),
            simulate: SimulateSettings::default(),
            verify: VerifySettings::default(),
        }
    }
}

/// Where the modulation `a(t, r)` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldSource {
    Constant,
    /// `−(π/2)·Y0(ω1 r)·sin(ω1 t)`.
    #[default]
    SineAnsatz,
    /// Full retarded potential of `I1 = sin(ω1 t)`.
    RetardedSine,
    /// `I1 = Σ cos_m·cos(mω1t) + sin_m·sin(mω1t)`, harmonics from 1.
    Harmonics {
        cos: Vec<f64>,
        sin: Vec<f64>,
    },
    /// CSV of `t, I1` over one period on a uniform grid; the mean is removed.
    Samples {
        file: PathBuf,
    },
    /// Tabulated radial profiles `r, D(r)` for the sine and optional cosine phase.
    ProfileTable {
        sine_file: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cosine_file: Option<PathBuf>,
    },
}

impl FieldSource {
    /// Makes relative file names absolute against `base`.
    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match self {
            FieldSource::Samples { file } => fix(file),
            FieldSource::ProfileTable {
                sine_file,
                cosine_file,
            } => {
                fix(sine_file);
                if let Some(f) = cosine_file {
                    fix(f);
                }
            }
            _ => {}
        }
    }

    pub fn build(&self, params: &PhysParams) -> CliResult<FieldModel> {
        Ok(match self {
            FieldSource::Constant => FieldModel::Constant,
            FieldSource::SineAnsatz => FieldModel::sine_ansatz(),
            FieldSource::RetardedSine => FieldModel::retarded_sine(),
            FieldSource::Harmonics { .. } | FieldSource::Samples { .. } => FieldModel::Tabulated {
                waveform: self.waveform(params)?,
            },
            FieldSource::ProfileTable {
                sine_file,
                cosine_file,
            } => FieldModel::Harmonic {
                sine: profile_table(sine_file)?,
                cosine: match cosine_file {
                    Some(f) => profile_table(f)?,
                    None => Profile::Zero,
                },
            },
        })
    }

    /// Current waveform for the retarded-potential quadrature.
    pub fn waveform(&self, params: &PhysParams) -> CliResult<Waveform> {
        let t1 = params.drive_period;
        match self {
            FieldSource::SineAnsatz | FieldSource::RetardedSine => Ok(Waveform::sine(t1)?),
            FieldSource::Harmonics { cos, sin } => {
                Waveform::from_harmonics(t1, cos.clone(), sin.clone()).map_err(|e| CliError::Config(e.to_string()))
            }
            FieldSource::Samples { file } => waveform_samples(file, t1),
            FieldSource::Constant | FieldSource::ProfileTable { .. } => Err(CliError::Config(
                "this subcommand needs a current waveform: sine_ansatz, retarded_sine, harmonics or samples".into(),
            )),
        }
    }

    /// Files the source reads.
    pub fn files(&self) -> Vec<&Path> {
        match self {
            FieldSource::Samples { file } => vec![file],
            FieldSource::ProfileTable {
                sine_file,
                cosine_file,
            } => {
                let mut v = vec![sine_file.as_path()];
                v.extend(cosine_file.as_deref());
                v
            }
            _ => Vec::new(),
        }
    }
}

/// One period of `t, I1` samples on a uniform grid, end point excluded.
fn waveform_samples(path: &Path, t1: f64) -> CliResult<Waveform> {
    let mut cols = read_columns(path, 2)?;
    let current = cols.pop().unwrap_or_default();
    let times = cols.pop().unwrap_or_default();
    let bad = |why: &str| CliError::Config(format!("{}: {why}", path.display()));
    if times.len() < 3 {
        return Err(bad("at least three samples required"));
    }
    let dt = times[1] - times[0];
    let uniform = times
        .windows(2)
        .all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(f64::MIN_POSITIVE));
    if !(dt > 0.0 && uniform) {
        return Err(bad("sample times must be increasing and uniformly spaced"));
    }
    if ((times.len() as f64 * dt) - t1).abs() > 1e-9 * t1 {
        return Err(bad("samples must cover exactly one driving period T1"));
    }
    let (w, mean) = Waveform::from_samples(&current, t1).map_err(|e| bad(&e.to_string()))?;
    let amp = current.iter().fold(0.0f64, |a, s| a.max(s.abs()));
    if mean.abs() > 1e-6 * amp {
        eprintln!(
            "lorentz-wire: warning: subtracted mean {mean:e} from {}",
            path.display()
        );
    }
    Ok(w)
}

fn profile_table(path: &Path) -> CliResult<Profile> {
    let mut cols = read_columns(path, 2)?;
    let ys = cols.pop().unwrap_or_default();
    let xs = cols.pop().unwrap_or_default();
    let table = MonotoneCubic::new(xs, ys)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Profile::Table(table))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Local error tolerance of the Runge-Kutta integrator.
    pub integration: f64,
    /// Relative agreement of successive quadrature refinements.
    pub quadrature: f64,
    /// Closure residual at which Newton shooting stops.
    pub newton: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            integration: 1e-12,
            quadrature: 1e-9,
            newton: 1e-11,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

/// Format of tables; reports are always JSON.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PeriodMapSettings {
    /// Largest energy of the table; `H0 + 5` when absent.
    pub h_max: Option<f64>,
    pub points: usize,
}

impl Default for PeriodMapSettings {
    fn default() -> Self {
        Self {
            h_max: None,
            points: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSettings {
    pub r_min: f64,
    pub r_max: f64,
    /// Radii in the grid.
    pub points: usize,
    /// Times per driving period.
    pub times: usize,
}

impl Default for PotentialSettings {
    fn default() -> Self {
        Self {
            r_min: 0.5,
            r_max: 10.0,
            points: 20,
            times: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MelnikovSettings {
    pub n: usize,
    /// Samples of `M_n(t0)` written next to the Fourier data.
    pub samples: usize,
}

impl Default for MelnikovSettings {
    fn default() -> Self {
        Self { n: 1, samples: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSettings {
    pub n_max: usize,
    /// Modulation amplitude of the search.
    pub k: f64,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        Self {
            n_max: 4,
            k: 1e-3,
            h_min: None,
            h_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateSettings {
    pub r0: f64,
    pub pr0: f64,
    pub t_end: f64,
    /// Uniform output samples, end point included.
    pub points: usize,
    /// Also write the reconstructed 3D motion.
    pub full: bool,
}

impl Default for SimulateSettings {
    fn default() -> Self {
        Self {
            r0: 2.0,
            pr0: 0.0,
            t_end: 70.0,
            points: 1000,
            full: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    pub tol: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self { tol: 1e-9 }
    }
}

impl RunConfig {
    /// Reads a configuration or a manifest from `path`.
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
                return Err(CliError::MissingFile(path.into()))
            }
            Err(e) => return Err(CliError::Config(format!("{}: {e}", path.display()))),
        };
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let body = match value {
            serde_json::Value::Object(mut map) if map.contains_key("manifest_version") => {
                map.remove("config").unwrap_or_default()
            }
            v => v,
        };
        serde_json::from_value(body)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        self.params
            .validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.integration", t.integration),
            ("tolerances.quadrature", t.quadrature),
            ("tolerances.newton", t.newton),
            ("verify.tol", self.verify.tol),
        ] {
            if !(1e-13..=1e-3).contains(&v) {
                return Err(CliError::Config(format!(
                    "{name} = {v:e} lies outside [1e-13, 1e-3]"
                )));
            }
        }
        if t.integration > 1e-6 {
            return Err(CliError::Config(
                "tolerances.integration must not exceed 1e-6".into(),
            ));
        }
        if self.melnikov.n == 0 || self.orbits.n_max == 0 {
            return Err(CliError::Config("resonance orders start at 1".into()));
        }
        if self.period_map.points < 2 || self.potential.points == 0 || self.potential.times == 0 {
            return Err(CliError::Config("grid sizes must be positive".into()));
        }
        if !(self.potential.r_min > 0.0 && self.potential.r_max >= self.potential.r_min) {
            return Err(CliError::Config(
                "potential radii must satisfy 0 < r_min <= r_max".into(),
            ));
        }
        for f in self.field.files() {
            if !f.is_file() {
                return Err(CliError::MissingFile(f.into()));
            }
        }
        if !(self.simulate.t_end > 0.0 && self.simulate.r0 > 0.0 && self.simulate.points >= 1) {
            return Err(CliError::Config(
                "simulate needs r0 > 0, t_end > 0 and points >= 1".into(),
            ));
        }
        Ok(())
    }
}
