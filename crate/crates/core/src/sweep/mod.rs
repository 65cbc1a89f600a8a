//! One-dimensional parameter scans, scalar minimization over a parameter,
//! and the datasets behind the figures.
//!
//! A scan evaluates one [`Quantity`] on a [`Scenario`] at every point of a
//! [`Range`] along an [`Axis`]. Points are independent and evaluated in
//! parallel; rows always come back in axis order.

pub mod figures;
pub mod optimize;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::closedform::{
    duan_sum_adiabatic_general, duan_sum_adiabatic_identical, duan_sum_nonadiabatic, field_sum_nonadiabatic,
    AdiabaticRates, ClosedFormError,
};
use crate::model::ModelError;
use crate::oracle::{lyapunov_duan, unit_rates, OracleError, Pair};
use crate::{DuanResult, SqueezedBath, SystemParams, UnitRates};

pub use figures::{figure_dataset, FigureDataset, FigureId};
pub use optimize::{minimize_scalar, Minimum, OptimizeSpec};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Relative tolerance for treating the two units as identical.
const IDENTICAL_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("unknown axis '{0}'")]
    UnknownAxis(String),
    #[error("unknown quantity '{0}'")]
    UnknownQuantity(String),
    #[error("unknown figure '{0}'")]
    UnknownFigure(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("axis {axis} does not apply to a {scenario} scenario")]
    AxisNotApplicable { axis: Axis, scenario: &'static str },
    #[error("{quantity} needs identical units; use oracle-duan for asymmetric systems")]
    NonIdenticalUnits { quantity: Quantity },
    #[error("no interior minimum on [{lo}, {hi}]; best grid point at {at}")]
    BracketFailure { lo: f64, hi: f64, at: f64 },
    #[error("non-finite result")]
    NonFinite,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    ClosedForm(#[from] ClosedFormError),
}

impl SweepError {
    /// Short tag written into tables in place of a failed value.
    pub fn code(&self) -> &'static str {
        match self {
            SweepError::UnknownAxis(_)
            | SweepError::UnknownQuantity(_)
            | SweepError::UnknownFigure(_)
            | SweepError::InvalidRange(_)
            | SweepError::AxisNotApplicable { .. }
            | SweepError::NonIdenticalUnits { .. } => "invalid",
            SweepError::BracketFailure { .. } => "bracket",
            SweepError::NonFinite => "nonfinite",
            SweepError::Model(ModelError::InvalidParameter { .. }) => "invalid",
            SweepError::Model(ModelError::NonConvergence { .. }) => "nonconvergence",
            SweepError::Oracle(OracleError::UnstableDrift { .. }) => "unstable",
            SweepError::Oracle(OracleError::RwaViolation { .. }) => "rwa",
            SweepError::Oracle(OracleError::QuadratureFailure { .. }) => "quadrature",
            SweepError::Oracle(OracleError::Model(_)) => "invalid",
            SweepError::ClosedForm(ClosedFormError::DegenerateSqueeze) => "degenerate",
            SweepError::ClosedForm(ClosedFormError::InvalidArgument { .. }) => "invalid",
        }
    }
}

/// Identical units described by dimensionless numbers instead of hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    pub cooperativity: f64,
    pub r: f64,
    pub n_th: f64,
    pub gamma_over_kappa: f64,
    /// rad/s; only sets the overall time scale.
    pub kappa: f64,
}

impl ReducedParams {
    /// The dimensionless numbers of unit 1 of `system` on the red sideband.
    pub fn from_system(system: &SystemParams) -> Self {
        let s = system.unit1.red_sideband_steady_state();
        Self {
            cooperativity: s.cooperativity,
            r: system.bath.r(),
            n_th: s.n_th,
            gamma_over_kappa: system.unit1.mirror.gamma / system.unit1.resonator.kappa,
            kappa: system.unit1.resonator.kappa,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma_over_kappa * self.kappa
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let checks: [(&'static str, f64, bool); 5] = [
            ("cooperativity", self.cooperativity, self.cooperativity >= 0.0),
            ("r", self.r, self.r >= 0.0),
            ("n_th", self.n_th, self.n_th >= 0.0),
            ("gamma_over_kappa", self.gamma_over_kappa, self.gamma_over_kappa > 0.0),
            ("kappa", self.kappa, self.kappa > 0.0),
        ];
        for (name, value, ok) in checks {
            if !ok || !value.is_finite() {
                return Err(ModelError::InvalidParameter {
                    name,
                    value,
                    reason: "out of range",
                }
                .into());
            }
        }
        Ok(())
    }

    fn rates(&self) -> [UnitRates; 2] {
        [UnitRates::from_cooperativity(self.cooperativity, self.gamma(), self.kappa, self.n_th); 2]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    /// Two units given by hardware parameters, each driven on its red sideband.
    Physical(SystemParams),
    Reduced(ReducedParams),
}

impl Scenario {
    pub fn kind(&self) -> &'static str {
        match self {
            Scenario::Physical(_) => "physical",
            Scenario::Reduced(_) => "reduced",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    MirrorDuanAdiabatic,
    MirrorDuanNonadiabatic,
    FieldDuan,
    OracleDuan,
    OracleFieldDuan,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [
        Quantity::MirrorDuanAdiabatic,
        Quantity::MirrorDuanNonadiabatic,
        Quantity::FieldDuan,
        Quantity::OracleDuan,
        Quantity::OracleFieldDuan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::MirrorDuanAdiabatic => "mirror-duan-adiabatic",
            Quantity::MirrorDuanNonadiabatic => "mirror-duan-nonadiabatic",
            Quantity::FieldDuan => "field-duan",
            Quantity::OracleDuan => "oracle-duan",
            Quantity::OracleFieldDuan => "oracle-field-duan",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| SweepError::UnknownQuantity(s.to_string()))
    }
}

/// Which unit a hardware axis acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Both,
    Unit1,
    Unit2,
}

/// A scanned parameter. Axis values are in the unit named by the path
/// suffix, e.g. mW for `unit2.power_mw`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    PowerMw(Target),
    TemperatureUk(Target),
    /// Mechanical frequency `omega_m / 2pi` in kHz.
    OmegaMKhz(Target),
    SqueezeR,
    Cooperativity,
    ThermalOccupation,
    GammaOverKappa,
}

impl Axis {
    /// Axes that only exist for [`Scenario::Reduced`].
    pub fn is_reduced_only(self) -> bool {
        matches!(
            self,
            Axis::Cooperativity | Axis::ThermalOccupation | Axis::GammaOverKappa
        )
    }

    /// Copy of `scenario` with this parameter set to `value`.
    pub fn apply(self, scenario: &Scenario, value: f64) -> Result<Scenario, SweepError> {
        let not_applicable = || SweepError::AxisNotApplicable {
            axis: self,
            scenario: scenario.kind(),
        };
        match (*scenario, self) {
            (Scenario::Physical(mut sys), axis) => {
                let (target, set): (Target, fn(&mut crate::Unit, f64)) = match axis {
                    Axis::SqueezeR => {
                        sys.bath = SqueezedBath::new(value)?;
                        return Ok(Scenario::Physical(sys));
                    }
                    Axis::PowerMw(t) => (t, |u, v| u.resonator.power = v * 1e-3),
                    Axis::TemperatureUk(t) => (t, |u, v| u.mirror.temperature = v * 1e-6),
                    Axis::OmegaMKhz(t) => (t, |u, v| u.mirror.omega_m = TWO_PI * v * 1e3),
                    _ => return Err(not_applicable()),
                };
                if target != Target::Unit2 {
                    set(&mut sys.unit1, value);
                }
                if target != Target::Unit1 {
                    set(&mut sys.unit2, value);
                }
                sys.validate()?;
                Ok(Scenario::Physical(sys))
            }
            (Scenario::Reduced(mut p), axis) => {
                match axis {
                    Axis::SqueezeR => p.r = value,
                    Axis::Cooperativity => p.cooperativity = value,
                    Axis::ThermalOccupation => p.n_th = value,
                    Axis::GammaOverKappa => p.gamma_over_kappa = value,
                    _ => return Err(not_applicable()),
                }
                p.validate()?;
                Ok(Scenario::Reduced(p))
            }
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = |t: &Target| match t {
            Target::Both => "",
            Target::Unit1 => "unit1.",
            Target::Unit2 => "unit2.",
        };
        match self {
            Axis::PowerMw(t) => write!(f, "{}power_mw", prefix(t)),
            Axis::TemperatureUk(t) => write!(f, "{}temperature_uk", prefix(t)),
            Axis::OmegaMKhz(t) => write!(f, "{}omega_m_khz", prefix(t)),
            Axis::SqueezeR => f.write_str("bath.r"),
            Axis::Cooperativity => f.write_str("cooperativity"),
            Axis::ThermalOccupation => f.write_str("n_th"),
            Axis::GammaOverKappa => f.write_str("gamma_over_kappa"),
        }
    }
}

impl FromStr for Axis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (target, rest) = match s.split_once('.') {
            Some(("unit1", rest)) => (Some(Target::Unit1), rest),
            Some(("unit2", rest)) => (Some(Target::Unit2), rest),
            Some(("bath", "r")) => return Ok(Axis::SqueezeR),
            Some(_) => return Err(SweepError::UnknownAxis(s.to_string())),
            None => (None, s),
        };
        let t = target.unwrap_or(Target::Both);
        let axis = match rest {
            "power_mw" => Axis::PowerMw(t),
            "temperature_uk" => Axis::TemperatureUk(t),
            "omega_m_khz" => Axis::OmegaMKhz(t),
            "r" if target.is_none() => Axis::SqueezeR,
            "cooperativity" if target.is_none() => Axis::Cooperativity,
            "n_th" if target.is_none() => Axis::ThermalOccupation,
            "gamma_over_kappa" if target.is_none() => Axis::GammaOverKappa,
            _ => return Err(SweepError::UnknownAxis(s.to_string())),
        };
        Ok(axis)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Linear,
    Log,
}

/// `count` points from `min` to `max`, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

impl Range {
    pub fn new(min: f64, max: f64, count: usize, scale: Scale) -> Result<Self, SweepError> {
        let range = Self { min, max, count, scale };
        range.validate()?;
        Ok(range)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |why: &str| Err(SweepError::InvalidRange(format!("{self}: {why}")));
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite");
        }
        if self.min >= self.max {
            return bad("min must be below max");
        }
        if self.count < 2 {
            return bad("count must be at least 2");
        }
        if self.scale == Scale::Log && self.min <= 0.0 {
            return bad("log spacing needs min > 0");
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i == 0 {
                    return self.min;
                }
                if i == self.count - 1 {
                    return self.max;
                }
                let t = i as f64 / last;
                match self.scale {
                    Scale::Linear => self.min + (self.max - self.min) * t,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)?;
        if self.scale == Scale::Log {
            f.write_str(":log")?;
        }
        Ok(())
    }
}

impl FromStr for Range {
    type Err = SweepError;

    /// Parses `MIN:MAX:COUNT[:log|:lin]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SweepError::InvalidRange(format!("'{s}' is not MIN:MAX:COUNT[:log]"));
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let max: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let scale = match parts.get(3).map(|p| p.trim()) {
            None | Some("lin") => Scale::Linear,
            Some("log") => Scale::Log,
            Some(_) => return Err(bad()),
        };
        Range::new(min, max, count, scale)
    }
}

/// Result of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub duan: DuanResult,
    /// Cooperativity of each unit.
    pub cooperativity: [f64; 2],
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= IDENTICAL_RTOL * a.abs().max(b.abs())
}

fn identical(rates: &[UnitRates; 2]) -> bool {
    let [a, b] = rates;
    same(a.coupling, b.coupling) && same(a.gamma, b.gamma) && same(a.kappa, b.kappa) && same(a.n_th, b.n_th)
}

/// Evaluates `quantity` for `scenario`.
pub fn evaluate(scenario: &Scenario, quantity: Quantity) -> Result<Evaluation, SweepError> {
    let out = match scenario {
        Scenario::Reduced(p) => {
            p.validate()?;
            let duan = match quantity {
                Quantity::MirrorDuanAdiabatic => duan_sum_adiabatic_identical(p.cooperativity, p.r, p.n_th),
                Quantity::MirrorDuanNonadiabatic => {
                    duan_sum_nonadiabatic(p.cooperativity, p.r, p.n_th, p.gamma(), p.kappa)
                }
                Quantity::FieldDuan => field_sum_nonadiabatic(p.cooperativity, p.r, p.n_th, p.gamma(), p.kappa),
                Quantity::OracleDuan => lyapunov_duan(&p.rates(), &SqueezedBath::new(p.r)?, Pair::Mirror)?,
                Quantity::OracleFieldDuan => lyapunov_duan(&p.rates(), &SqueezedBath::new(p.r)?, Pair::Field)?,
            };
            Evaluation {
                duan,
                cooperativity: [p.cooperativity; 2],
            }
        }
        Scenario::Physical(sys) => {
            sys.validate()?;
            let s1 = sys.unit1.red_sideband_steady_state();
            let s2 = sys.unit2.red_sideband_steady_state();
            let rates = unit_rates(sys, [&s1, &s2])?;
            let r = sys.bath.r();
            let symmetric = |f: fn(f64, f64, f64, f64, f64) -> DuanResult| {
                if !identical(&rates) {
                    return Err(SweepError::NonIdenticalUnits { quantity });
                }
                let u = &rates[0];
                Ok(f(u.cooperativity(), r, u.n_th, u.gamma, u.kappa))
            };
            let duan = match quantity {
                Quantity::MirrorDuanAdiabatic => {
                    duan_sum_adiabatic_general(&AdiabaticRates::from_steady_states(&s1, &s2), &sys.bath)
                }
                Quantity::MirrorDuanNonadiabatic => symmetric(duan_sum_nonadiabatic)?,
                Quantity::FieldDuan => symmetric(field_sum_nonadiabatic)?,
                Quantity::OracleDuan => lyapunov_duan(&rates, &sys.bath, Pair::Mirror)?,
                Quantity::OracleFieldDuan => lyapunov_duan(&rates, &sys.bath, Pair::Field)?,
            };
            Evaluation {
                duan,
                cooperativity: [s1.cooperativity, s2.cooperativity],
            }
        }
    };
    let d = &out.duan;
    if ![d.total, d.var_x, d.var_y, out.cooperativity[0], out.cooperativity[1]]
        .iter()
        .all(|x| x.is_finite())
    {
        return Err(SweepError::NonFinite);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: Axis,
    pub range: Range,
    pub quantity: Quantity,
    /// When set, every row reports the minimum over this second parameter.
    pub optimize: Option<OptimizeSpec>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        self.range.validate()?;
        // surface a wrong axis/scenario pairing before evaluating anything
        self.axis
            .apply(&self.base, self.range.min)
            .map(|_| ())
            .or_else(|e| match e {
                SweepError::AxisNotApplicable { .. } => Err(e),
                _ => Ok(()),
            })?;
        if let Some(opt) = &self.optimize {
            opt.validate()?;
            match opt.axis.apply(&self.base, opt.lo) {
                Err(e @ SweepError::AxisNotApplicable { .. }) => return Err(e),
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    /// Optimized parameter value when the sweep carries an [`OptimizeSpec`].
    pub argmin: Option<f64>,
    pub result: Result<Evaluation, SweepError>,
}

impl SweepRow {
    pub fn is_error(&self) -> bool {
        self.result.is_err()
    }
}

/// Evaluates `quantity` at `scenario` or, with `optimize`, at the best value
/// of the optimized parameter.
pub fn evaluate_point(
    scenario: &Scenario,
    quantity: Quantity,
    optimize: Option<&OptimizeSpec>,
) -> Result<(Evaluation, Option<f64>), SweepError> {
    match optimize {
        None => Ok((evaluate(scenario, quantity)?, None)),
        Some(opt) => {
            let objective = |x: f64| evaluate(&opt.axis.apply(scenario, x)?, quantity).map(|e| e.duan.total);
            let best = minimize_scalar(objective, opt)?;
            let at = evaluate(&opt.axis.apply(scenario, best.argmin)?, quantity)?;
            Ok((at, Some(best.argmin)))
        }
    }
}

/// Runs the scan. Only an invalid spec fails as a whole; a point that cannot
/// be evaluated becomes an error row.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, SweepError> {
    spec.validate()?;
    let rows = spec
        .range
        .points()
        .into_par_iter()
        .map(|x| {
            let outcome = spec
                .axis
                .apply(&spec.base, x)
                .and_then(|s| evaluate_point(&s, spec.quantity, spec.optimize.as_ref()));
            match outcome {
                Ok((e, argmin)) => SweepRow {
                    axis_value: x,
                    argmin,
                    result: Ok(e),
                },
                Err(e) => SweepRow {
                    axis_value: x,
                    argmin: None,
                    result: Err(e),
                },
            }
        })
        .collect();
    Ok(rows)
}
