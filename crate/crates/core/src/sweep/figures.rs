//! Curve families behind each figure, with the caption parameters as
//! defaults.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use super::{evaluate_point, Axis, OptimizeSpec, Quantity, Range, ReducedParams, Scale, Scenario, SweepError, Target};
use crate::{MirrorParams, ResonatorParams, SqueezedBath, SystemParams, Unit};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
    Fig6a,
    Fig6b,
    Fig8,
    Fig9,
}

impl FigureId {
    pub const ALL: [FigureId; 9] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5a,
        FigureId::Fig5b,
        FigureId::Fig6a,
        FigureId::Fig6b,
        FigureId::Fig8,
        FigureId::Fig9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
            FigureId::Fig6a => "fig6a",
            FigureId::Fig6b => "fig6b",
            FigureId::Fig8 => "fig8",
            FigureId::Fig9 => "fig9",
        }
    }

    /// Figures plotted against dimensionless numbers rather than hardware.
    pub fn is_reduced(self) -> bool {
        matches!(self, FigureId::Fig4 | FigureId::Fig8 | FigureId::Fig9)
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fig5" => Ok(FigureId::Fig5a),
            "fig6" => Ok(FigureId::Fig6a),
            _ => FigureId::ALL
                .into_iter()
                .find(|f| f.name() == s)
                .ok_or_else(|| SweepError::UnknownFigure(s.to_string())),
        }
    }
}

/// Hardware of the experiment the parameters come from: P = 10 mW,
/// T = 50 uK, r = 1, L = 25 mm, omega_r = 2 omega_L.
pub fn text_system() -> SystemParams {
    let unit = Unit {
        resonator: ResonatorParams {
            omega_r: TWO_PI * 5.64e14,
            omega_l: TWO_PI * 2.82e14,
            kappa: TWO_PI * 215e3,
            length: 25e-3,
            power: 10e-3,
        },
        mirror: MirrorParams {
            omega_m: TWO_PI * 947e3,
            gamma: TWO_PI * 140.0,
            mass: 145e-12,
            temperature: 50e-6,
        },
    };
    SystemParams {
        unit1: unit,
        unit2: unit,
        bath: SqueezedBath::new(1.0).expect("r = 1 is valid"),
    }
}

/// The Fig. 2 caption variant: L = 125 mm, omega_r = 2pi 5.26e14 Hz.
pub fn caption_system() -> SystemParams {
    let mut sys = text_system();
    for u in [&mut sys.unit1, &mut sys.unit2] {
        u.resonator.omega_r = TWO_PI * 5.26e14;
        u.resonator.length = 125e-3;
    }
    sys
}

/// The power-scan configuration: T = 50 uK, omega_r = 2pi 2.82e14 Hz.
pub fn fig3_system() -> SystemParams {
    let mut sys = text_system();
    for u in [&mut sys.unit1, &mut sys.unit2] {
        u.resonator.omega_r = TWO_PI * 2.82e14;
        u.mirror.temperature = 50e-6;
    }
    sys
}

fn with_units(mut sys: SystemParams, f: impl Fn(&mut Unit)) -> SystemParams {
    f(&mut sys.unit1);
    f(&mut sys.unit2);
    sys
}

/// Base parameters a figure is drawn from. Physical figures read `system`,
/// the others `reduced`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureBase {
    pub system: SystemParams,
    pub reduced: ReducedParams,
}

impl FigureBase {
    pub fn from_system(system: SystemParams) -> Self {
        Self {
            system,
            reduced: ReducedParams::from_system(&system),
        }
    }

    /// Caption parameters of `id`. Curve parameters (the quantity that
    /// differs between curves) are set per curve and not included.
    pub fn caption(id: FigureId) -> Self {
        let text = text_system();
        let mut base = Self::from_system(text);
        let set_bath = |b: &mut Self, r: f64| b.system.bath = SqueezedBath::new(r).expect("valid r");
        match id {
            FigureId::Fig2 => {}
            FigureId::Fig3 => base = Self::from_system(fig3_system()),
            FigureId::Fig4 => base.reduced.r = 1.0,
            FigureId::Fig5a | FigureId::Fig5b => {
                base.system = with_units(text, |u| u.mirror.temperature = 0.25e-3);
                set_bath(&mut base, 2.0);
            }
            FigureId::Fig6a | FigureId::Fig6b => {
                base.system = with_units(text, |u| {
                    u.mirror.temperature = 0.25e-3;
                    u.resonator.power = 11e-3;
                });
                set_bath(&mut base, 2.0);
            }
            FigureId::Fig8 => {
                set_bath(&mut base, 2.0);
                base.reduced.n_th = 5.0;
                base.reduced.r = 2.0;
            }
            FigureId::Fig9 => {
                base.reduced.n_th = 5.0;
                base.reduced.gamma_over_kappa = 6.5e-4;
            }
        }
        base
    }
}

/// One plotted curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    /// Column label, `name=value` of what distinguishes the curve.
    pub label: String,
    pub scenario: Scenario,
    pub quantity: Quantity,
    pub optimize: Option<OptimizeSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub axis: Axis,
    pub range: Range,
    pub curves: Vec<Curve>,
}

fn curve(label: String, scenario: Scenario, quantity: Quantity) -> Curve {
    Curve {
        label,
        scenario,
        quantity,
        optimize: None,
    }
}

fn range(min: f64, max: f64, count: usize, scale: Scale) -> Range {
    Range::new(min, max, count, scale).expect("figure ranges are valid")
}

/// Axis, range and curves of `id` drawn on `base`.
pub fn figure_spec(id: FigureId, base: &FigureBase) -> Result<FigureSpec, SweepError> {
    let phys = Scenario::Physical(base.system);
    let red = Scenario::Reduced(base.reduced);
    let set = |s: &Scenario, axis: Axis, v: f64| axis.apply(s, v);
    let adiabatic = Quantity::MirrorDuanAdiabatic;
    let both_t = Axis::TemperatureUk(Target::Both);

    let r_curves = |s: &Scenario| -> Result<Vec<Curve>, SweepError> {
        [0.5, 1.0, 2.0]
            .into_iter()
            .map(|r| Ok(curve(format!("r={r}"), set(s, Axis::SqueezeR, r)?, adiabatic)))
            .collect()
    };
    let temperature_curves = |opt: OptimizeSpec| -> Result<Vec<Curve>, SweepError> {
        [0.25, 0.5, 1.0]
            .into_iter()
            .map(|t_mk| {
                Ok(Curve {
                    label: format!("t_mk={t_mk}"),
                    scenario: set(&phys, both_t, t_mk * 1e3)?,
                    quantity: adiabatic,
                    optimize: Some(opt),
                })
            })
            .collect()
    };

    let (axis, rng, curves) = match id {
        FigureId::Fig2 => (both_t, range(1.0, 1e6, 121, Scale::Log), r_curves(&phys)?),
        FigureId::Fig3 => (
            Axis::PowerMw(Target::Both),
            range(1e-4, 10.0, 101, Scale::Log),
            r_curves(&phys)?,
        ),
        FigureId::Fig4 => (
            Axis::Cooperativity,
            range(0.0, 20.0, 201, Scale::Linear),
            [1.0, 5.0, 10.0]
                .into_iter()
                .map(|n| {
                    Ok(curve(
                        format!("n_th={n}"),
                        set(&red, Axis::ThermalOccupation, n)?,
                        adiabatic,
                    ))
                })
                .collect::<Result<_, SweepError>>()?,
        ),
        FigureId::Fig5a => (
            Axis::PowerMw(Target::Unit2),
            range(0.0, 30.0, 121, Scale::Linear),
            [5.0, 10.0, 15.0]
                .into_iter()
                .map(|p| {
                    Ok(curve(
                        format!("p1_mw={p}"),
                        set(&phys, Axis::PowerMw(Target::Unit1), p)?,
                        adiabatic,
                    ))
                })
                .collect::<Result<_, SweepError>>()?,
        ),
        FigureId::Fig5b => (
            Axis::PowerMw(Target::Unit1),
            range(1.0, 30.0, 59, Scale::Linear),
            temperature_curves(OptimizeSpec::new(Axis::PowerMw(Target::Unit2), 0.0, 60.0))?,
        ),
        FigureId::Fig6a => (
            Axis::OmegaMKhz(Target::Unit2),
            range(100.0, 3000.0, 146, Scale::Linear),
            [700.0, 947.0, 1200.0]
                .into_iter()
                .map(|w| {
                    let s = set(&phys, Axis::OmegaMKhz(Target::Unit1), w)?;
                    Ok(curve(format!("omega_m1_khz={w}"), s, adiabatic))
                })
                .collect::<Result<_, SweepError>>()?,
        ),
        FigureId::Fig6b => (
            Axis::OmegaMKhz(Target::Unit1),
            range(300.0, 2000.0, 69, Scale::Linear),
            temperature_curves(OptimizeSpec::new(Axis::OmegaMKhz(Target::Unit2), 20.0, 20000.0).log())?,
        ),
        FigureId::Fig8 => {
            let mut curves = vec![curve("adiabatic".into(), red, adiabatic)];
            for gk in [0.01, 0.05] {
                let s = set(&red, Axis::GammaOverKappa, gk)?;
                curves.push(curve(
                    format!("gamma_over_kappa={gk}"),
                    s,
                    Quantity::MirrorDuanNonadiabatic,
                ));
            }
            (Axis::Cooperativity, range(1.0, 100.0, 100, Scale::Linear), curves)
        }
        FigureId::Fig9 => {
            let mut curves = Vec::new();
            for c in [15.0, 30.0, 90.0] {
                let s = set(&red, Axis::Cooperativity, c)?;
                curves.push(curve(format!("mirror_c={c}"), s, Quantity::MirrorDuanNonadiabatic));
            }
            let s = set(&red, Axis::Cooperativity, 15.0)?;
            curves.push(curve("field_c=15".into(), s, Quantity::FieldDuan));
            (Axis::SqueezeR, range(0.0, 2.0, 101, Scale::Linear), curves)
        }
    };
    Ok(FigureSpec {
        id,
        axis,
        range: rng,
        curves,
    })
}

/// Table with the axis column and one column of variance sums per curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureDataset {
    pub id: FigureId,
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub columns: Vec<String>,
    /// `cells[row][curve]`.
    pub cells: Vec<Vec<Result<f64, SweepError>>>,
    pub metadata: Vec<(String, String)>,
}

impl FigureDataset {
    pub fn column(&self, label: &str) -> Option<Vec<Result<f64, SweepError>>> {
        let j = self.columns.iter().position(|c| c == label)?;
        Some(self.cells.iter().map(|row| row[j].clone()).collect())
    }

    pub fn error_count(&self) -> usize {
        self.cells.iter().flatten().filter(|c| c.is_err()).count()
    }
}

/// Resolved parameters of `scenario` in SI units, rad/s for rates.
pub fn scenario_metadata(scenario: &Scenario) -> Vec<(String, String)> {
    let mut out = Vec::new();
    match scenario {
        Scenario::Physical(sys) => {
            for (name, u) in [("unit1", &sys.unit1), ("unit2", &sys.unit2)] {
                let fields = [
                    ("omega_r_rad_s", u.resonator.omega_r),
                    ("omega_l_rad_s", u.resonator.omega_l),
                    ("kappa_rad_s", u.resonator.kappa),
                    ("length_m", u.resonator.length),
                    ("power_w", u.resonator.power),
                    ("omega_m_rad_s", u.mirror.omega_m),
                    ("gamma_rad_s", u.mirror.gamma),
                    ("mass_kg", u.mirror.mass),
                    ("temperature_k", u.mirror.temperature),
                ];
                for (k, v) in fields {
                    out.push((format!("{name}.{k}"), format!("{v:e}")));
                }
            }
            out.push(("bath.r".into(), format!("{:e}", sys.bath.r())));
        }
        Scenario::Reduced(p) => {
            for (k, v) in [
                ("cooperativity", p.cooperativity),
                ("n_th", p.n_th),
                ("gamma_over_kappa", p.gamma_over_kappa),
                ("kappa_rad_s", p.kappa),
            ] {
                out.push((format!("reduced.{k}"), format!("{v:e}")));
            }
            out.push(("bath.r".into(), format!("{:e}", p.r)));
        }
    }
    out
}

/// Evaluates every curve of `spec` on its axis grid.
pub fn run_figure(spec: &FigureSpec, base: &FigureBase) -> FigureDataset {
    let xs = spec.range.points();
    let cells: Vec<Vec<Result<f64, SweepError>>> = xs
        .par_iter()
        .map(|&x| {
            spec.curves
                .iter()
                .map(|c| {
                    let s = spec.axis.apply(&c.scenario, x)?;
                    Ok(evaluate_point(&s, c.quantity, c.optimize.as_ref())?.0.duan.total)
                })
                .collect()
        })
        .collect();

    let mut metadata = vec![
        ("figure".to_string(), spec.id.to_string()),
        ("axis".to_string(), spec.axis.to_string()),
        ("range".to_string(), spec.range.to_string()),
    ];
    let scenario = if spec.id.is_reduced() {
        Scenario::Reduced(base.reduced)
    } else {
        Scenario::Physical(base.system)
    };
    metadata.extend(scenario_metadata(&scenario));
    for (i, c) in spec.curves.iter().enumerate() {
        let mut desc = format!("{} quantity={}", c.label, c.quantity);
        if let Some(o) = &c.optimize {
            let scale = if o.scale == Scale::Log { " log" } else { "" };
            desc.push_str(&format!(" minimized over {} in [{}, {}]{scale}", o.axis, o.lo, o.hi));
        }
        metadata.push((format!("curve.{}", i + 1), desc));
    }

    FigureDataset {
        id: spec.id,
        axis: spec.axis,
        axis_values: xs,
        columns: spec.curves.iter().map(|c| c.label.clone()).collect(),
        cells,
        metadata,
    }
}

/// Dataset of figure `id`, drawn on `base` or on the caption parameters.
pub fn figure_dataset(id: &str, base: Option<&FigureBase>) -> Result<FigureDataset, SweepError> {
    let id: FigureId = id.parse()?;
    let base = base.copied().unwrap_or_else(|| FigureBase::caption(id));
    let spec = figure_spec(id, &base)?;
    Ok(run_figure(&spec, &base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::optimize::minimize_scalar;
    use crate::sweep::{evaluate, Quantity};

    fn totals(ds: &FigureDataset, label: &str) -> Vec<f64> {
        ds.column(label).unwrap().into_iter().map(|c| c.unwrap()).collect()
    }

    #[test]
    fn unknown_figures() {
        for id in ["fig1", "fig7", "fig10", "Fig2", ""] {
            assert!(
                matches!(figure_dataset(id, None), Err(SweepError::UnknownFigure(_))),
                "{id}"
            );
        }
        assert_eq!("fig5".parse::<FigureId>().unwrap(), FigureId::Fig5a);
    }

    #[test]
    fn every_figure_evaluates_cleanly() {
        for id in FigureId::ALL {
            let ds = figure_dataset(id.name(), None).unwrap();
            assert_eq!(ds.error_count(), 0, "{id}");
            assert!(ds.cells.iter().all(|r| r.len() == ds.columns.len()));
        }
    }

    #[test]
    fn fig4_has_three_curves() {
        let ds = figure_dataset("fig4", None).unwrap();
        assert_eq!(ds.columns, ["n_th=1", "n_th=5", "n_th=10"]);
    }

    #[test]
    fn fig8_dissipation_ordering() {
        let ds = figure_dataset("fig8", None).unwrap();
        let a = totals(&ds, "adiabatic");
        let b = totals(&ds, "gamma_over_kappa=0.01");
        let c = totals(&ds, "gamma_over_kappa=0.05");
        for i in 0..a.len() {
            assert!(a[i] <= b[i] && b[i] <= c[i], "C = {}", ds.axis_values[i]);
        }
    }

    /// Temperature where a decreasing-then-increasing curve first reaches 2.
    fn crossing(xs: &[f64], ys: &[f64]) -> f64 {
        let i = ys
            .windows(2)
            .position(|w| w[0] < 2.0 && w[1] >= 2.0)
            .expect("curve crosses 2");
        let t = (2.0 - ys[i]) / (ys[i + 1] - ys[i]);
        xs[i] + t * (xs[i + 1] - xs[i])
    }

    #[test]
    fn fig2_crossing_temperature_grows_with_squeezing() {
        for base in [
            FigureBase::caption(FigureId::Fig2),
            FigureBase::from_system(caption_system()),
        ] {
            let ds = figure_dataset("fig2", Some(&base)).unwrap();
            let t: Vec<f64> = ["r=0.5", "r=1", "r=2"]
                .iter()
                .map(|l| crossing(&ds.axis_values, &totals(&ds, l)))
                .collect();
            assert!(t[0] < t[1] && t[1] < t[2], "{t:?}");
        }
    }

    #[test]
    fn fig6a_has_interior_optimum() {
        let base = FigureBase::caption(FigureId::Fig6a);
        let axis = Axis::OmegaMKhz(Target::Unit2);
        let opt = OptimizeSpec::new(axis, 100.0, 3000.0);
        let m = minimize_scalar(
            |x| {
                let s = axis.apply(&Scenario::Physical(base.system), x)?;
                Ok(evaluate(&s, Quantity::MirrorDuanAdiabatic)?.duan.total)
            },
            &opt,
        )
        .unwrap();
        assert!(m.argmin > 100.0 && m.argmin < 3000.0);
    }

    #[test]
    fn fig6b_optimum_weakens_with_frequency() {
        let ds = figure_dataset("fig6b", None).unwrap();
        for label in &ds.columns {
            let y = totals(&ds, label);
            assert!(y.windows(2).all(|w| w[1] >= w[0] - 1e-9), "{label}");
            assert!(y.last().unwrap() > y.first().unwrap());
        }
    }

    #[test]
    fn fig5b_optimum_weakens_with_temperature() {
        let ds = figure_dataset("fig5b", None).unwrap();
        let cols: Vec<Vec<f64>> = ds.columns.iter().map(|l| totals(&ds, l)).collect();
        for i in 0..ds.axis_values.len() {
            assert!(cols[0][i] < cols[1][i] && cols[1][i] < cols[2][i]);
        }
    }
}
