//! Numerical self-check suite: agreement between the closed forms and both
//! oracles, limiting cases, and the published figure properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closedform::{
    duan_sum_adiabatic_identical, duan_sum_nonadiabatic, field_sum_nonadiabatic, minimum_power, threshold_cooperativity,
};
use crate::model::{thermal_occupation, Mat8};
use crate::oracle::lyapunov::solve_continuous_lyapunov;
use crate::oracle::{
    build_drift_diffusion, duan_from_covariance, solve_lyapunov, spectral_duan_sum, Pair, QuadratureConfig,
};
use crate::sweep::figures::{fig3_system, FigureBase, FigureId};
use crate::sweep::{evaluate, minimize_scalar, Axis, OptimizeSpec, Quantity, Scenario, Target};
use crate::{MirrorParams, ResonatorParams, SqueezedBath, SystemParams, Unit, UnitRates};

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;
pub const KAPPA: f64 = TWO_PI * 215e3;

pub const GRID_C: [f64; 4] = [0.5, 2.0, 15.0, 90.0];
pub const GRID_R: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
pub const GRID_N: [f64; 4] = [0.0, 1.0, 5.0, 10.0];
pub const GRID_GK: [f64; 3] = [6.5e-4, 0.01, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Passes when `measured <= tolerance`.
    AtMost,
    /// Passes when `measured >= tolerance`.
    AtLeast,
}

struct Check {
    name: &'static str,
    tolerance: f64,
    bound: Bound,
    measure: fn() -> f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl CheckReport {
    /// `check=... status=... measured=... tolerance=... bound=...`
    pub fn line(&self) -> String {
        format!(
            "check={} status={} measured={:e} tolerance={:e} bound={}",
            self.name,
            if self.passed { "pass" } else { "fail" },
            self.measured,
            self.tolerance,
            if self.bound == Bound::AtMost { "max" } else { "min" },
        )
    }
}

/// Visits every point of the agreement grid.
fn grid(mut f: impl FnMut(f64, f64, f64, f64)) {
    for c in GRID_C {
        for r in GRID_R {
            for n in GRID_N {
                for gk in GRID_GK {
                    f(c, r, n, gk);
                }
            }
        }
    }
}

fn identical(c: f64, n: f64, gk: f64) -> [UnitRates; 2] {
    [UnitRates::from_cooperativity(c, gk * KAPPA, KAPPA, n); 2]
}

fn bath(r: f64) -> SqueezedBath {
    SqueezedBath::new(r).expect("grid r >= 0")
}

fn worse(acc: &mut f64, x: f64) {
    // NaN must win so that a broken evaluation fails the check
    if x.is_nan() || x > *acc {
        *acc = x;
    }
}

pub fn lyapunov_agreement() -> f64 {
    let mut worst = 0.0;
    grid(|c, r, n, gk| {
        let exact = duan_sum_nonadiabatic(c, r, n, gk * KAPPA, KAPPA).total;
        let got = crate::oracle::lyapunov_duan(&identical(c, n, gk), &bath(r), Pair::Mirror)
            .map_or(f64::INFINITY, |d| d.total);
        worse(&mut worst, ((got - exact) / exact).abs());
    });
    worst
}

pub fn spectral_agreement() -> f64 {
    let mut worst = 0.0;
    let cfg = QuadratureConfig::default();
    grid(|c, r, n, gk| {
        let exact = duan_sum_nonadiabatic(c, r, n, gk * KAPPA, KAPPA).total;
        let got =
            spectral_duan_sum(&identical(c, n, gk), &bath(r), Pair::Mirror, &cfg).map_or(f64::INFINITY, |d| d.total);
        worse(&mut worst, ((got - exact) / exact).abs());
    });
    worst
}

pub fn adiabatic_reduction() -> f64 {
    let mut worst = 0.0;
    grid(|c, r, n, _| {
        let a = duan_sum_nonadiabatic(c, r, n, 1e-6 * KAPPA, KAPPA).total;
        let b = duan_sum_adiabatic_identical(c, r, n).total;
        worse(&mut worst, (a - b).abs());
    });
    worst
}

pub fn threshold_value() -> f64 {
    threshold_cooperativity(1.0f64, 1.0).map_or(f64::INFINITY, |c| (c - 2.313035).abs())
}

pub fn threshold_boundary() -> f64 {
    threshold_cooperativity(1.0f64, 1.0).map_or(f64::INFINITY, |c| {
        (duan_sum_adiabatic_identical(c, 1.0, 1.0).total - 2.0).abs()
    })
}

/// A random valid unit spanning several decades in every parameter.
pub fn random_unit(rng: &mut impl Rng) -> Unit {
    let mut decades = |lo: f64, hi: f64| 10f64.powf(rng.random_range(lo..hi));
    Unit {
        resonator: ResonatorParams {
            omega_r: TWO_PI * decades(14.0, 15.0),
            omega_l: TWO_PI * decades(14.0, 15.0),
            kappa: TWO_PI * decades(4.0, 6.5),
            length: decades(-2.5, -0.5),
            power: decades(-6.0, -1.0),
        },
        mirror: MirrorParams {
            omega_m: TWO_PI * decades(5.0, 6.7),
            gamma: TWO_PI * decades(0.0, 4.0),
            mass: decades(-14.0, -10.0),
            temperature: decades(-6.0, -1.0),
        },
    }
}

pub const SEPARABILITY_SAMPLES: usize = 10_000;

/// Largest amount by which an unsqueezed system dips below 2.
pub fn separability_floor() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = f64::NEG_INFINITY;
    for _ in 0..SEPARABILITY_SAMPLES {
        let sys = SystemParams {
            unit1: random_unit(&mut rng),
            unit2: random_unit(&mut rng),
            bath: SqueezedBath::vacuum(),
        };
        for q in [Quantity::MirrorDuanAdiabatic, Quantity::OracleDuan] {
            // points outside the model's validity (RWA, instability) say nothing about separability
            if let Ok(e) = evaluate(&Scenario::Physical(sys), q) {
                worse(&mut worst, 2.0 - e.duan.total);
            }
        }
    }
    worst.max(0.0)
}

pub fn quadrature_symmetry() -> f64 {
    let mut worst = 0.0;
    grid(|c, r, n, gk| {
        let d = crate::oracle::lyapunov_duan(&identical(c, n, gk), &bath(r), Pair::Mirror);
        worse(&mut worst, d.map_or(f64::INFINITY, |d| (d.var_x - d.var_y).abs()));
    });
    worst
}

pub fn strong_coupling() -> f64 {
    let c = 1e6;
    let mut worst = 0.0;
    for r in [0.5f64, 1.0, 2.0] {
        for n in [1.0f64, 5.0, 10.0] {
            let exact = duan_sum_adiabatic_identical(c, r, n).total;
            worse(&mut worst, (exact - (2.0 * (-2.0 * r).exp() + 4.0 * n / c)).abs());
        }
    }
    worst
}

pub fn symmetric_optimum() -> f64 {
    let base = Scenario::Physical(FigureBase::caption(FigureId::Fig5a).system);
    let p2 = Axis::PowerMw(Target::Unit2);
    let mut worst = 0.0;
    for p1 in [5.0, 10.0, 15.0] {
        let Ok(s) = Axis::PowerMw(Target::Unit1).apply(&base, p1) else {
            return f64::INFINITY;
        };
        let objective = |x: f64| Ok(evaluate(&p2.apply(&s, x)?, Quantity::MirrorDuanAdiabatic)?.duan.total);
        let rel = minimize_scalar(objective, &OptimizeSpec::new(p2, 0.0, 60.0))
            .map_or(f64::INFINITY, |m| (m.argmin / p1 - 1.0).abs());
        worse(&mut worst, rel);
    }
    worst
}

const FIG9_GK: f64 = 6.5e-4;

pub fn field_insensitivity() -> f64 {
    let f = |c: f64| field_sum_nonadiabatic(c, 1.0, 5.0, FIG9_GK * KAPPA, KAPPA).total;
    (f(90.0) - f(15.0)).abs()
}

pub fn mirror_sensitivity() -> f64 {
    let m = |c: f64| duan_sum_nonadiabatic(c, 1.0, 5.0, FIG9_GK * KAPPA, KAPPA).total;
    m(15.0) - m(90.0)
}

/// Largest violation of adiabatic <= nonadiabatic(0.01) <= nonadiabatic(0.05).
pub fn dissipation_ordering() -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..=990 {
        let c = 1.0 + 0.1 * i as f64;
        let a = duan_sum_adiabatic_identical(c, 2.0, 5.0).total;
        let b = duan_sum_nonadiabatic(c, 2.0, 5.0, 0.01 * KAPPA, KAPPA).total;
        let d = duan_sum_nonadiabatic(c, 2.0, 5.0, 0.05 * KAPPA, KAPPA).total;
        worse(&mut worst, (a - b).max(b - d));
    }
    worst
}

pub fn thermal_figures() -> f64 {
    let wm = TWO_PI * 947e3;
    let mut worst = 0.0;
    for (t, n) in [(62.2e-6, 1.0), (236e-6, 5.0), (452e-6, 10.0)] {
        worse(&mut worst, (thermal_occupation(wm, t) / n - 1.0).abs());
    }
    worst
}

pub fn constructed_lyapunov() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0;
    for _ in 0..200 {
        let m = Mat8::<f64>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let shift = m.norm() + rng.random_range(0.01..1.0);
        let a = m - Mat8::identity() * shift;
        let b = Mat8::<f64>::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let v0 = b * b.transpose() + Mat8::identity() * 1e-3;
        let d = -(a * v0 + v0 * a.transpose());
        let err = solve_continuous_lyapunov(&a, &d).map_or(f64::INFINITY, |v| (v - v0).norm() / v0.norm());
        worse(&mut worst, err);
    }
    worst
}

/// Largest `1/4 - Var(q) Var(p)` over all modes of the grid.
pub fn uncertainty() -> f64 {
    let mut worst = f64::NEG_INFINITY;
    grid(
        |c, r, n, gk| match solve_lyapunov(&build_drift_diffusion(&identical(c, n, gk), &bath(r))) {
            Ok(cov) => {
                for pair in [Pair::Mirror, Pair::Field] {
                    for unit in 0..2 {
                        worse(&mut worst, 0.25 - cov.uncertainty_product(pair, unit));
                    }
                }
                // keep the Duan extraction exercised on the same covariances
                worse(&mut worst, -duan_from_covariance(&cov, Pair::Mirror).total);
            }
            Err(_) => worst = f64::INFINITY,
        },
    );
    worst
}

pub const POWER_R: [f64; 3] = [0.5, 1.0, 2.0];

/// `P_min` of the power-scan configuration for each r in [`POWER_R`].
pub fn power_thresholds() -> Vec<Result<f64, String>> {
    let sys = fig3_system();
    POWER_R
        .iter()
        .map(|&r| minimum_power(&sys.unit1, r, sys.unit1.mirror.temperature).map_err(|e| e.to_string()))
        .collect()
}

pub fn power_threshold_root() -> f64 {
    let sys = fig3_system();
    let mut worst = 0.0;
    for (r, p) in POWER_R.iter().zip(power_thresholds()) {
        let Ok(p) = p else { return f64::INFINITY };
        let mut s = sys;
        s.unit1.resonator.power = p;
        s.unit2.resonator.power = p;
        s.bath = bath(*r);
        let total =
            evaluate(&Scenario::Physical(s), Quantity::MirrorDuanAdiabatic).map_or(f64::INFINITY, |e| e.duan.total);
        worse(&mut worst, (total - 2.0).abs());
    }
    worst
}

/// Largest increase of `P_min` from one r to the next (W); negative when
/// strictly decreasing.
pub fn power_monotone() -> f64 {
    let ps = power_thresholds();
    let mut worst = f64::NEG_INFINITY;
    for w in ps.windows(2) {
        match (&w[0], &w[1]) {
            (Ok(a), Ok(b)) => worse(&mut worst, b - a),
            _ => return f64::INFINITY,
        }
    }
    worst
}

fn determinism() -> f64 {
    let run = || {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = super::run(["squeezelink", "sweep", "--figure", "fig2"], &mut out, &mut err);
        (code, out)
    };
    let (a, b) = (run(), run());
    if a.0 == 0 && a == b {
        0.0
    } else {
        1.0
    }
}

const CHECKS: [Check; 18] = [
    Check {
        name: "lyapunov",
        tolerance: 1e-6,
        bound: Bound::AtMost,
        measure: lyapunov_agreement,
    },
    Check {
        name: "spectral",
        tolerance: 1e-6,
        bound: Bound::AtMost,
        measure: spectral_agreement,
    },
    Check {
        name: "adiabatic-reduction",
        tolerance: 1e-4,
        bound: Bound::AtMost,
        measure: adiabatic_reduction,
    },
    Check {
        name: "threshold",
        tolerance: 1e-5,
        bound: Bound::AtMost,
        measure: threshold_value,
    },
    Check {
        name: "threshold-boundary",
        tolerance: 1e-10,
        bound: Bound::AtMost,
        measure: threshold_boundary,
    },
    Check {
        name: "separability",
        tolerance: 1e-12,
        bound: Bound::AtMost,
        measure: separability_floor,
    },
    Check {
        name: "symmetry",
        tolerance: 1e-10,
        bound: Bound::AtMost,
        measure: quadrature_symmetry,
    },
    Check {
        name: "strong-coupling",
        tolerance: 1e-4,
        bound: Bound::AtMost,
        measure: strong_coupling,
    },
    Check {
        name: "symmetric-optimum",
        tolerance: 1e-3,
        bound: Bound::AtMost,
        measure: symmetric_optimum,
    },
    Check {
        name: "field-insensitivity",
        tolerance: 2e-3,
        bound: Bound::AtMost,
        measure: field_insensitivity,
    },
    Check {
        name: "mirror-sensitivity",
        tolerance: 0.05,
        bound: Bound::AtLeast,
        measure: mirror_sensitivity,
    },
    Check {
        name: "dissipation-ordering",
        tolerance: 0.0,
        bound: Bound::AtMost,
        measure: dissipation_ordering,
    },
    Check {
        name: "thermal-occupation",
        tolerance: 0.1,
        bound: Bound::AtMost,
        measure: thermal_figures,
    },
    Check {
        name: "lyapunov-constructed",
        tolerance: 1e-9,
        bound: Bound::AtMost,
        measure: constructed_lyapunov,
    },
    Check {
        name: "uncertainty",
        tolerance: 1e-10,
        bound: Bound::AtMost,
        measure: uncertainty,
    },
    Check {
        name: "power-threshold",
        tolerance: 1e-8,
        bound: Bound::AtMost,
        measure: power_threshold_root,
    },
    Check {
        name: "power-monotone",
        tolerance: 0.0,
        bound: Bound::AtMost,
        measure: power_monotone,
    },
    Check {
        name: "determinism",
        tolerance: 0.0,
        bound: Bound::AtMost,
        measure: determinism,
    },
];

pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Runs the checks named in `only` (all when empty). `tolerance` replaces
/// the tolerance of every upper-bound check.
pub fn run_checks(only: &[String], tolerance: Option<f64>) -> Result<Vec<CheckReport>, String> {
    if let Some(bad) = only.iter().find(|n| !CHECKS.iter().any(|c| c.name == n.as_str())) {
        return Err(format!("unknown check '{bad}'; known: {}", check_names().join(", ")));
    }
    Ok(CHECKS
        .iter()
        .filter(|c| only.is_empty() || only.iter().any(|n| n == c.name))
        .map(|c| {
            let tol = match (c.bound, tolerance) {
                (Bound::AtMost, Some(t)) => t,
                _ => c.tolerance,
            };
            let measured = (c.measure)();
            let passed = match c.bound {
                Bound::AtMost => measured <= tol,
                Bound::AtLeast => measured >= tol,
            };
            CheckReport {
                name: c.name,
                measured,
                tolerance: tol,
                bound: c.bound,
                passed,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheap_checks_pass() {
        let only: Vec<String> = [
            "threshold",
            "threshold-boundary",
            "strong-coupling",
            "field-insensitivity",
            "mirror-sensitivity",
            "dissipation-ordering",
            "thermal-occupation",
            "power-threshold",
            "power-monotone",
        ]
        .map(String::from)
        .to_vec();
        for r in run_checks(&only, None).unwrap() {
            assert!(r.passed, "{}", r.line());
        }
    }

    #[test]
    fn tight_tolerance_fails_with_residual() {
        let r = run_checks(&["lyapunov".to_string()], Some(1e-300)).unwrap();
        assert_eq!(r.len(), 1);
        assert!(!r[0].passed);
        assert!(r[0].measured > 0.0);
        assert!(r[0].line().starts_with("check=lyapunov status=fail measured="));
    }

    #[test]
    fn unknown_check_is_rejected() {
        assert!(run_checks(&["nope".to_string()], None).is_err());
    }

    #[test]
    fn nan_fails_both_bounds() {
        let mut acc = 0.0;
        worse(&mut acc, f64::NAN);
        assert!(acc.is_nan());
        assert!(!(acc <= 1.0) && !(acc >= 1.0));
    }
}
