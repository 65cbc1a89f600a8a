//! Run configuration: TOML files whose physical keys carry a unit suffix,
//! layered over named presets.
//!
//! Layers apply in order: the `fig2-text` base, the preset of the selected
//! figure, the named preset (`--preset` or `preset = ...`), the config file,
//! then command-line flags. Every value is converted to SI (rad/s for rates)
//! when parsed.
//!
//! ```toml
//! preset = "fig2-caption"
//!
//! [units]            # both units
//! power_mw = 10
//! temperature_uk = 50
//!
//! [unit2]            # overrides [units] for unit 2
//! omega_m_khz = 900
//!
//! [bath]
//! r = 1.5
//! ```

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;
use toml::{Table, Value};

use crate::model::SqueezedBath;
use crate::sweep::figures::{FigureBase, FigureId};
use crate::sweep::{Axis, OptimizeSpec, Quantity, Range, ReducedParams, Scale, Scenario};
use crate::{MirrorParams, ResonatorParams, SystemParams, Unit};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

pub const BASE_PRESET: &str = "fig2-text";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}: {message}")]
    Syntax { origin: String, message: String },
    #[error("{origin}: unknown section [{section}]")]
    UnknownSection { origin: String, section: String },
    #[error("{origin}: unknown key '{key}' in {section}")]
    UnknownKey {
        origin: String,
        section: String,
        key: String,
    },
    #[error("{origin}: '{quantity}' given more than once in {section}")]
    Duplicate {
        origin: String,
        section: String,
        quantity: String,
    },
    #[error("{origin}: bad value for '{key}': {reason}")]
    BadValue {
        origin: String,
        key: String,
        reason: String,
    },
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("missing value for {0}")]
    Missing(String),
    #[error("{0}")]
    Invalid(String),
}

/// A physical key: a base name and its accepted suffixes with the factor to SI.
struct Field {
    name: &'static str,
    suffixes: &'static [(&'static str, f64, f64)],
}

// (suffix, multiplier, divisor): dividing by an exact power of ten keeps
// decimal inputs such as 50 uK correctly rounded
const RATE: &[(&str, f64, f64)] = &[("_rad_s", 1.0, 1.0), ("_hz", TWO_PI, 1.0), ("_khz", TWO_PI * 1e3, 1.0)];
const LENGTH: &[(&str, f64, f64)] = &[("_m", 1.0, 1.0), ("_mm", 1.0, 1e3)];
const POWER: &[(&str, f64, f64)] = &[("_w", 1.0, 1.0), ("_mw", 1.0, 1e3), ("_uw", 1.0, 1e6)];
const MASS: &[(&str, f64, f64)] = &[("_kg", 1.0, 1.0), ("_g", 1.0, 1e3), ("_ng", 1.0, 1e12)];
const TEMPERATURE: &[(&str, f64, f64)] = &[("_k", 1.0, 1.0), ("_mk", 1.0, 1e3), ("_uk", 1.0, 1e6)];
const PURE: &[(&str, f64, f64)] = &[("", 1.0, 1.0)];

const UNIT_FIELDS: [Field; 9] = [
    Field {
        name: "omega_r",
        suffixes: RATE,
    },
    Field {
        name: "omega_l",
        suffixes: RATE,
    },
    Field {
        name: "kappa",
        suffixes: RATE,
    },
    Field {
        name: "length",
        suffixes: LENGTH,
    },
    Field {
        name: "power",
        suffixes: POWER,
    },
    Field {
        name: "omega_m",
        suffixes: RATE,
    },
    Field {
        name: "gamma",
        suffixes: RATE,
    },
    Field {
        name: "mass",
        suffixes: MASS,
    },
    Field {
        name: "temperature",
        suffixes: TEMPERATURE,
    },
];

const REDUCED_FIELDS: [Field; 4] = [
    Field {
        name: "cooperativity",
        suffixes: PURE,
    },
    Field {
        name: "n_th",
        suffixes: PURE,
    },
    Field {
        name: "gamma_over_kappa",
        suffixes: PURE,
    },
    Field {
        name: "kappa",
        suffixes: RATE,
    },
];

/// One configuration layer; `None` leaves the value of lower layers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    pub preset: Option<String>,
    /// SI values of [`UNIT_FIELDS`] for unit 1 and unit 2.
    pub units: [[Option<f64>; 9]; 2],
    pub r: Option<f64>,
    pub reduced: [Option<f64>; 4],
    pub figure: Option<String>,
    pub axis: Option<String>,
    pub range: Option<String>,
    pub max_errors: Option<u64>,
    pub opt_axis: Option<String>,
    pub opt_lo: Option<f64>,
    pub opt_hi: Option<f64>,
    pub opt_tolerance: Option<f64>,
    pub opt_scale: Option<String>,
    pub regime: Option<String>,
    pub pair: Option<String>,
    pub threshold_quantity: Option<String>,
}

fn over<T: Clone>(dst: &mut Option<T>, src: &Option<T>) {
    if src.is_some() {
        dst.clone_from(src);
    }
}

impl Layer {
    /// Applies `top` over `self`.
    pub fn merge(&mut self, top: &Layer) {
        over(&mut self.preset, &top.preset);
        for u in 0..2 {
            for i in 0..UNIT_FIELDS.len() {
                over(&mut self.units[u][i], &top.units[u][i]);
            }
        }
        over(&mut self.r, &top.r);
        for i in 0..REDUCED_FIELDS.len() {
            over(&mut self.reduced[i], &top.reduced[i]);
        }
        over(&mut self.figure, &top.figure);
        over(&mut self.axis, &top.axis);
        over(&mut self.range, &top.range);
        over(&mut self.max_errors, &top.max_errors);
        over(&mut self.opt_axis, &top.opt_axis);
        over(&mut self.opt_lo, &top.opt_lo);
        over(&mut self.opt_hi, &top.opt_hi);
        over(&mut self.opt_tolerance, &top.opt_tolerance);
        over(&mut self.opt_scale, &top.opt_scale);
        over(&mut self.regime, &top.regime);
        over(&mut self.pair, &top.pair);
        over(&mut self.threshold_quantity, &top.threshold_quantity);
    }

    pub fn parse(text: &str, origin: &str) -> Result<Layer, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax {
            origin: origin.to_string(),
            message: e.message().to_string(),
        })?;
        let mut p = Parser {
            origin,
            layer: Layer::default(),
        };
        // [units] first so that [unit1]/[unit2] override it
        let mut sections: Vec<(&String, &Value)> = table.iter().collect();
        sections.sort_by_key(|(k, _)| k.as_str() != "units");
        for (key, value) in sections {
            match value {
                Value::Table(t) => p.section(key, t)?,
                v if key == "preset" => p.layer.preset = Some(p.string("top level", key, v)?),
                _ => return Err(p.unknown("top level", key)),
            }
        }
        Ok(p.layer)
    }
}

struct Parser<'a> {
    origin: &'a str,
    layer: Layer,
}

impl Parser<'_> {
    fn unknown(&self, section: &str, key: &str) -> ConfigError {
        ConfigError::UnknownKey {
            origin: self.origin.into(),
            section: section.into(),
            key: key.into(),
        }
    }

    fn bad(&self, key: &str, reason: impl Into<String>) -> ConfigError {
        ConfigError::BadValue {
            origin: self.origin.into(),
            key: key.into(),
            reason: reason.into(),
        }
    }

    fn number(&self, key: &str, v: &Value) -> Result<f64, ConfigError> {
        let x = match v {
            Value::Float(x) => *x,
            Value::Integer(i) => *i as f64,
            _ => return Err(self.bad(key, "expected a number")),
        };
        if x.is_finite() {
            Ok(x)
        } else {
            Err(self.bad(key, "must be finite"))
        }
    }

    fn string(&self, _section: &str, key: &str, v: &Value) -> Result<String, ConfigError> {
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| self.bad(key, "expected a string"))
    }

    /// Matches `key` against `fields`, storing the SI value.
    fn physical(
        &self,
        section: &str,
        fields: &[Field],
        out: &mut [Option<f64>],
        seen: &mut [bool],
        key: &str,
        v: &Value,
    ) -> Result<(), ConfigError> {
        for (i, f) in fields.iter().enumerate() {
            let Some(suffix) = key.strip_prefix(f.name) else {
                continue;
            };
            let Some(&(_, mul, div)) = f.suffixes.iter().find(|(s, _, _)| *s == suffix) else {
                continue;
            };
            if seen[i] {
                return Err(ConfigError::Duplicate {
                    origin: self.origin.into(),
                    section: section.into(),
                    quantity: f.name.into(),
                });
            }
            seen[i] = true;
            out[i] = Some(self.number(key, v)? * mul / div);
            return Ok(());
        }
        Err(self.unknown(section, key))
    }

    fn section(&mut self, name: &str, t: &Table) -> Result<(), ConfigError> {
        let section = format!("[{name}]");
        match name {
            "units" | "unit1" | "unit2" => {
                let mut vals = [None; 9];
                let mut seen = [false; 9];
                for (k, v) in t {
                    self.physical(&section, &UNIT_FIELDS, &mut vals, &mut seen, k, v)?;
                }
                let targets: &[usize] = match name {
                    "units" => &[0, 1],
                    "unit1" => &[0],
                    _ => &[1],
                };
                for &u in targets {
                    for i in 0..vals.len() {
                        over(&mut self.layer.units[u][i], &vals[i]);
                    }
                }
            }
            "bath" => {
                for (k, v) in t {
                    match k.as_str() {
                        "r" => self.layer.r = Some(self.number(k, v)?),
                        _ => return Err(self.unknown(&section, k)),
                    }
                }
            }
            "reduced" => {
                let mut vals = [None; 4];
                let mut seen = [false; 4];
                for (k, v) in t {
                    self.physical(&section, &REDUCED_FIELDS, &mut vals, &mut seen, k, v)?;
                }
                self.layer.reduced = vals;
            }
            "sweep" => {
                for (k, v) in t {
                    match k.as_str() {
                        "figure" => self.layer.figure = Some(self.string(&section, k, v)?),
                        "axis" => self.layer.axis = Some(self.string(&section, k, v)?),
                        "range" => self.layer.range = Some(self.string(&section, k, v)?),
                        "max_errors" => {
                            let n = v
                                .as_integer()
                                .filter(|n| *n >= 0)
                                .ok_or_else(|| self.bad(k, "expected a non-negative integer"))?;
                            self.layer.max_errors = Some(n as u64);
                        }
                        _ => return Err(self.unknown(&section, k)),
                    }
                }
            }
            "optimize" => {
                for (k, v) in t {
                    match k.as_str() {
                        "axis" => self.layer.opt_axis = Some(self.string(&section, k, v)?),
                        "lo" => self.layer.opt_lo = Some(self.number(k, v)?),
                        "hi" => self.layer.opt_hi = Some(self.number(k, v)?),
                        "tolerance" => self.layer.opt_tolerance = Some(self.number(k, v)?),
                        "scale" => self.layer.opt_scale = Some(self.string(&section, k, v)?),
                        _ => return Err(self.unknown(&section, k)),
                    }
                }
            }
            "evaluate" => {
                for (k, v) in t {
                    match k.as_str() {
                        "regime" => self.layer.regime = Some(self.string(&section, k, v)?),
                        "pair" => self.layer.pair = Some(self.string(&section, k, v)?),
                        _ => return Err(self.unknown(&section, k)),
                    }
                }
            }
            "threshold" => {
                for (k, v) in t {
                    match k.as_str() {
                        "quantity" => self.layer.threshold_quantity = Some(self.string(&section, k, v)?),
                        _ => return Err(self.unknown(&section, k)),
                    }
                }
            }
            _ => {
                return Err(ConfigError::UnknownSection {
                    origin: self.origin.into(),
                    section: name.into(),
                })
            }
        }
        Ok(())
    }
}

const FIG2_TEXT: &str = r#"
[units]
omega_r_hz = 5.64e14
omega_l_hz = 2.82e14
kappa_khz = 215
length_mm = 25
power_mw = 10
omega_m_khz = 947
gamma_hz = 140
mass_ng = 145
temperature_uk = 50

[bath]
r = 1
"#;

const FIG2_CAPTION: &str = r#"
[units]
omega_r_hz = 5.26e14
length_mm = 125
"#;

const FIG3: &str = r#"
[units]
omega_r_hz = 2.82e14
temperature_uk = 50
"#;

const FIG4: &str = r#"
[bath]
r = 1
"#;

const FIG5: &str = r#"
[units]
temperature_mk = 0.25

[bath]
r = 2
"#;

const FIG6: &str = r#"
[units]
temperature_mk = 0.25
power_mw = 11

[bath]
r = 2
"#;

const FIG8: &str = r#"
[reduced]
n_th = 5

[bath]
r = 2
"#;

const FIG9: &str = r#"
[reduced]
n_th = 5
gamma_over_kappa = 6.5e-4
"#;

/// Names of the built-in presets.
pub const PRESETS: [&str; 10] = [
    "fig2-text",
    "fig2-caption",
    "fig3",
    "fig4",
    "fig5a",
    "fig5b",
    "fig6a",
    "fig6b",
    "fig8",
    "fig9",
];

fn builtin(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2-text" => FIG2_TEXT,
        "fig2-caption" => FIG2_CAPTION,
        "fig3" => FIG3,
        "fig4" => FIG4,
        "fig5" | "fig5a" | "fig5b" => FIG5,
        "fig6" | "fig6a" | "fig6b" => FIG6,
        "fig8" => FIG8,
        "fig9" => FIG9,
        _ => return None,
    })
}

fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Loads preset `name`, preferring `<preset_dir>/<name>.toml` when present.
pub fn load_preset(name: &str, preset_dir: Option<&Path>) -> Result<Layer, ConfigError> {
    if let Some(dir) = preset_dir {
        let path = dir.join(format!("{name}.toml"));
        if path.is_file() {
            let layer = Layer::parse(&read(&path)?, &path.display().to_string())?;
            if layer.preset.is_some() {
                return Err(ConfigError::Invalid(format!(
                    "{}: presets cannot name another preset",
                    path.display()
                )));
            }
            return Ok(layer);
        }
    }
    let text = builtin(name).ok_or_else(|| ConfigError::UnknownPreset(name.to_string()))?;
    Ok(Layer::parse(text, name).expect("built-in presets parse"))
}

/// Where the layers come from.
#[derive(Debug, Clone, Default)]
pub struct Sources {
    pub config: Option<PathBuf>,
    pub preset: Option<String>,
    pub preset_dir: Option<PathBuf>,
    /// Values given as command-line flags; applied last.
    pub flags: Layer,
}

/// The merged configuration with physical parameters resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub layer: Layer,
    pub figure: Option<FigureId>,
    pub system: SystemParams,
    pub reduced: ReducedParams,
}

fn invalid(e: impl std::fmt::Display) -> ConfigError {
    ConfigError::Invalid(e.to_string())
}

pub fn resolve(src: &Sources) -> Result<Resolved, ConfigError> {
    let file = match &src.config {
        Some(path) => Layer::parse(&read(path)?, &path.display().to_string())?,
        None => Layer::default(),
    };
    let mut top = file.clone();
    top.merge(&src.flags);

    let figure = top
        .figure
        .as_deref()
        .map(str::parse::<FigureId>)
        .transpose()
        .map_err(invalid)?;
    let preset = src.preset.clone().or_else(|| file.preset.clone());
    let dir = src.preset_dir.as_deref();

    let mut layer = load_preset(BASE_PRESET, dir)?;
    if let Some(id) = figure {
        if builtin(id.name()).is_some() || dir.is_some_and(|d| d.join(format!("{}.toml", id.name())).is_file()) {
            layer.merge(&load_preset(id.name(), dir)?);
        }
    }
    if let Some(name) = &preset {
        layer.merge(&load_preset(name, dir)?);
    }
    layer.merge(&top);
    layer.preset = preset;

    let unit = |u: usize| -> Result<Unit, ConfigError> {
        let v = |i: usize| {
            layer.units[u][i].ok_or_else(|| ConfigError::Missing(format!("unit{}.{}", u + 1, UNIT_FIELDS[i].name)))
        };
        let unit = Unit {
            resonator: ResonatorParams {
                omega_r: v(0)?,
                omega_l: v(1)?,
                kappa: v(2)?,
                length: v(3)?,
                power: v(4)?,
            },
            mirror: MirrorParams {
                omega_m: v(5)?,
                gamma: v(6)?,
                mass: v(7)?,
                temperature: v(8)?,
            },
        };
        unit.validate()
            .map_err(|e| ConfigError::Invalid(format!("unit{}: {e}", u + 1)))?;
        Ok(unit)
    };
    let r = layer.r.ok_or_else(|| ConfigError::Missing("bath.r".into()))?;
    let system = SystemParams {
        unit1: unit(0)?,
        unit2: unit(1)?,
        bath: SqueezedBath::new(r).map_err(invalid)?,
    };
    let mut reduced = ReducedParams::from_system(&system);
    let [c, n, gk, kappa] = layer.reduced;
    reduced.cooperativity = c.unwrap_or(reduced.cooperativity);
    reduced.n_th = n.unwrap_or(reduced.n_th);
    reduced.gamma_over_kappa = gk.unwrap_or(reduced.gamma_over_kappa);
    reduced.kappa = kappa.unwrap_or(reduced.kappa);
    reduced.validate().map_err(invalid)?;

    Ok(Resolved {
        layer,
        figure,
        system,
        reduced,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Adiabatic,
    Nonadiabatic,
    Oracle,
}

impl Resolved {
    pub fn axis(&self) -> Result<Option<Axis>, ConfigError> {
        self.layer.axis.as_deref().map(str::parse).transpose().map_err(invalid)
    }

    pub fn range(&self) -> Result<Option<Range>, ConfigError> {
        self.layer.range.as_deref().map(str::parse).transpose().map_err(invalid)
    }

    /// Reduced when any `[reduced]` key is set or the scanned axis only
    /// exists in reduced form.
    pub fn is_reduced(&self) -> Result<bool, ConfigError> {
        let axis_reduced = self.axis()?.is_some_and(|a| a.is_reduced_only());
        let opt_reduced = self
            .layer
            .opt_axis
            .as_deref()
            .map(str::parse::<Axis>)
            .transpose()
            .map_err(invalid)?
            .is_some_and(|a| a.is_reduced_only());
        Ok(self.layer.reduced.iter().any(Option::is_some) || axis_reduced || opt_reduced)
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        Ok(if self.is_reduced()? {
            Scenario::Reduced(ReducedParams {
                r: self.system.bath.r(),
                ..self.reduced
            })
        } else {
            Scenario::Physical(self.system)
        })
    }

    pub fn figure_base(&self) -> FigureBase {
        FigureBase {
            system: self.system,
            reduced: ReducedParams {
                r: self.system.bath.r(),
                ..self.reduced
            },
        }
    }

    pub fn regime(&self) -> Result<Regime, ConfigError> {
        match self.layer.regime.as_deref().unwrap_or("adiabatic") {
            "adiabatic" => Ok(Regime::Adiabatic),
            "nonadiabatic" => Ok(Regime::Nonadiabatic),
            "oracle" => Ok(Regime::Oracle),
            other => Err(invalid(format!(
                "unknown regime '{other}' (adiabatic, nonadiabatic, oracle)"
            ))),
        }
    }

    pub fn quantity(&self) -> Result<Quantity, ConfigError> {
        let field = match self.layer.pair.as_deref().unwrap_or("mirror") {
            "mirror" => false,
            "field" => true,
            other => return Err(invalid(format!("unknown pair '{other}' (mirror, field)"))),
        };
        Ok(match (self.regime()?, field) {
            (Regime::Adiabatic, false) => Quantity::MirrorDuanAdiabatic,
            (Regime::Nonadiabatic, false) => Quantity::MirrorDuanNonadiabatic,
            (Regime::Nonadiabatic, true) => Quantity::FieldDuan,
            (Regime::Oracle, false) => Quantity::OracleDuan,
            (Regime::Oracle, true) => Quantity::OracleFieldDuan,
            (Regime::Adiabatic, true) => {
                return Err(invalid(
                    "no adiabatic field expression; use --regime nonadiabatic or oracle with --pair field",
                ))
            }
        })
    }

    pub fn optimize(&self) -> Result<Option<OptimizeSpec>, ConfigError> {
        let Some(axis) = &self.layer.opt_axis else {
            let stray = self.layer.opt_lo.is_some()
                || self.layer.opt_hi.is_some()
                || self.layer.opt_tolerance.is_some()
                || self.layer.opt_scale.is_some();
            return if stray {
                Err(ConfigError::Missing("optimize.axis".into()))
            } else {
                Ok(None)
            };
        };
        let axis: Axis = axis.parse().map_err(invalid)?;
        let lo = self
            .layer
            .opt_lo
            .ok_or_else(|| ConfigError::Missing("optimize.lo".into()))?;
        let hi = self
            .layer
            .opt_hi
            .ok_or_else(|| ConfigError::Missing("optimize.hi".into()))?;
        let mut spec = OptimizeSpec::new(axis, lo, hi);
        if let Some(t) = self.layer.opt_tolerance {
            spec.tolerance = t;
        }
        spec.scale = match self.layer.opt_scale.as_deref() {
            None | Some("linear") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(other) => return Err(invalid(format!("unknown optimize scale '{other}' (linear, log)"))),
        };
        spec.validate().map_err(invalid)?;
        Ok(Some(spec))
    }

    pub fn max_errors(&self) -> u64 {
        self.layer.max_errors.unwrap_or(0)
    }
}

/// TOML rendering of resolved values. Floats use the shortest
/// representation that parses back to the same `f64`.
#[derive(Debug, Default)]
pub struct Dump {
    lines: Vec<String>,
}

fn toml_str(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

impl Dump {
    pub fn new(preset: Option<&str>) -> Self {
        let mut d = Self::default();
        if let Some(p) = preset {
            d.lines.push(format!("preset = {}", toml_str(p)));
        }
        d
    }

    fn section(&mut self, name: &str) {
        self.lines.push(format!("[{name}]"));
    }

    fn float(&mut self, key: &str, v: f64) {
        self.lines.push(format!("{key} = {v:e}"));
    }

    fn text(&mut self, key: &str, v: &str) {
        self.lines.push(format!("{key} = {}", toml_str(v)));
    }

    pub fn system(&mut self, sys: &SystemParams) {
        for (name, u) in [("unit1", &sys.unit1), ("unit2", &sys.unit2)] {
            self.section(name);
            let vals = [
                u.resonator.omega_r,
                u.resonator.omega_l,
                u.resonator.kappa,
                u.resonator.length,
                u.resonator.power,
                u.mirror.omega_m,
                u.mirror.gamma,
                u.mirror.mass,
                u.mirror.temperature,
            ];
            for (f, v) in UNIT_FIELDS.iter().zip(vals) {
                self.float(&format!("{}{}", f.name, f.suffixes[0].0), v);
            }
        }
        self.section("bath");
        self.float("r", sys.bath.r());
    }

    pub fn reduced(&mut self, p: &ReducedParams) {
        self.section("reduced");
        let vals = [p.cooperativity, p.n_th, p.gamma_over_kappa, p.kappa];
        for (f, v) in REDUCED_FIELDS.iter().zip(vals) {
            self.float(&format!("{}{}", f.name, f.suffixes[0].0), v);
        }
    }

    pub fn sweep_figure(&mut self, figure: FigureId, max_errors: u64) {
        self.section("sweep");
        self.text("figure", figure.name());
        self.lines.push(format!("max_errors = {max_errors}"));
    }

    pub fn sweep_axis(&mut self, axis: Axis, range: &Range, max_errors: u64) {
        self.section("sweep");
        self.text("axis", &axis.to_string());
        self.text("range", &range.to_string());
        self.lines.push(format!("max_errors = {max_errors}"));
    }

    pub fn optimize(&mut self, o: &OptimizeSpec) {
        self.section("optimize");
        self.text("axis", &o.axis.to_string());
        self.float("lo", o.lo);
        self.float("hi", o.hi);
        self.float("tolerance", o.tolerance);
        self.text("scale", if o.scale == Scale::Log { "log" } else { "linear" });
    }

    pub fn evaluate(&mut self, regime: &str, pair: &str) {
        self.section("evaluate");
        self.text("regime", regime);
        self.text("pair", pair);
    }

    pub fn threshold(&mut self, quantity: &str) {
        self.section("threshold");
        self.text("quantity", quantity);
    }

    /// Free-form note that survives as a TOML comment.
    pub fn note(&mut self, text: &str) {
        self.lines.push(format!("# {text}"));
    }

    pub fn into_lines(self) -> Vec<String> {
        self.lines
    }

    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            writeln!(s, "{l}").expect("writing to a String");
        }
        s
    }
}
