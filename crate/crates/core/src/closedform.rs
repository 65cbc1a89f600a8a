//! Closed-form variance sums of the EPR-type quadratures and the thresholds
//! derived from them.
//!
//! Mirror quadratures: `X = X1 - X2`, `Y = Y1 + Y2`. Field quadratures use the
//! same combination of the intracavity modes. A sum below 2 certifies
//! entanglement; every expression here has `var(X) = var(Y)`.

use thiserror::Error;

use crate::model::{SqueezedBath, SteadyState, Unit};
use crate::scalar::Scalar;

/// Separability bound on the variance sum.
pub const SEPARABLE_BOUND: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClosedFormError {
    #[error("squeeze parameter r = 0: no finite threshold, the mirrors cannot entangle")]
    DegenerateSqueeze,
    #[error("invalid argument {name} = {value}")]
    InvalidArgument { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DuanResult<T> {
    pub var_x: T,
    pub var_y: T,
    pub total: T,
    pub entangled: bool,
}

impl<T: Scalar> DuanResult<T> {
    pub fn from_variances(var_x: T, var_y: T) -> Self {
        let total = var_x + var_y;
        Self {
            var_x,
            var_y,
            total,
            entangled: is_entangled(total),
        }
    }

    /// Splits a total evenly between the two quadratures.
    pub fn symmetric(total: T) -> Self {
        let half = total * T::half();
        Self {
            var_x: half,
            var_y: half,
            total,
            entangled: is_entangled(total),
        }
    }
}

/// Strict Duan test; a sum of exactly 2 is separable.
pub fn is_entangled<T: Scalar>(total: T) -> bool {
    total < T::lit(SEPARABLE_BOUND)
}

/// Effective mirror damping after eliminating the cavity fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticRates<T> {
    pub gamma_a1: T,
    pub gamma_a2: T,
    pub gamma_1: T,
    pub gamma_2: T,
    pub n_th1: T,
    pub n_th2: T,
}

impl<T: Scalar> AdiabaticRates<T> {
    pub fn from_steady_states(s1: &SteadyState<T>, s2: &SteadyState<T>) -> Self {
        Self {
            gamma_a1: s1.gamma_a,
            gamma_a2: s2.gamma_a,
            gamma_1: s1.gamma_total,
            gamma_2: s2.gamma_total,
            n_th1: s1.n_th,
            n_th2: s2.n_th,
        }
    }

    /// Builds rates from radiation-pressure damping, intrinsic damping and
    /// thermal occupation of each mirror.
    pub fn from_parts(gamma_a: [T; 2], gamma: [T; 2], n_th: [T; 2]) -> Self {
        Self {
            gamma_a1: gamma_a[0],
            gamma_a2: gamma_a[1],
            gamma_1: gamma_a[0] + gamma[0],
            gamma_2: gamma_a[1] + gamma[1],
            n_th1: n_th[0],
            n_th2: n_th[1],
        }
    }
}

/// Mirror variance sum for two arbitrary units in the adiabatic regime.
pub fn duan_sum_adiabatic_general<T: Scalar>(rates: &AdiabaticRates<T>, bath: &SqueezedBath<T>) -> DuanResult<T> {
    let (n, m_corr) = (bath.n(), bath.m_corr());
    let one = T::one();
    let two = T::two();
    let AdiabaticRates {
        gamma_a1,
        gamma_a2,
        gamma_1,
        gamma_2,
        n_th1,
        n_th2,
    } = *rates;
    let squeezed = (two * n + one) * (gamma_a1 / gamma_1 + gamma_a2 / gamma_2);
    let correlated = T::lit(8.0) * (gamma_a1 * gamma_a2).sqrt() * m_corr / (gamma_1 + gamma_2);
    // gamma_j / Gamma_j written as 1 - Gamma_a_j / Gamma_j
    let thermal = (one - gamma_a1 / gamma_1) * (two * n_th1 + one) + (one - gamma_a2 / gamma_2) * (two * n_th2 + one);
    DuanResult::symmetric(squeezed - correlated + thermal)
}

/// Identical units, adiabatic regime:
/// `2C/(C+1) e^{-2r} + 2(1+2 n_th)/(C+1)`.
pub fn duan_sum_adiabatic_identical<T: Scalar>(c: T, r: T, n_th: T) -> DuanResult<T> {
    let one = T::one();
    let two = T::two();
    let total = two * c / (c + one) * (-two * r).exp() + two * (one + two * n_th) / (c + one);
    DuanResult::symmetric(total)
}

/// `C >> 1` approximation `2 e^{-2r} + 4 n_th / C`.
pub fn duan_sum_strong_coupling_approx<T: Scalar>(c: T, r: T, n_th: T) -> T {
    T::two() * (-T::two() * r).exp() + T::four() * n_th / c
}

/// `C << 1` approximation `2 + 2 C e^{-2r} + 4 n_th`.
pub fn duan_sum_weak_coupling_approx<T: Scalar>(c: T, r: T, n_th: T) -> T {
    T::two() + T::two() * c * (-T::two() * r).exp() + T::four() * n_th
}

/// Identical units without adiabatic elimination.
pub fn duan_sum_nonadiabatic<T: Scalar>(c: T, r: T, n_th: T, gamma: T, kappa: T) -> DuanResult<T> {
    let one = T::one();
    let two = T::two();
    let sq = two * c / (c + one) * kappa * (-two * r).exp() / (kappa + gamma);
    let th = two * (two * n_th + one) / (c + one) * (one + c * gamma / (kappa + gamma));
    DuanResult::symmetric(sq + th)
}

/// Field-field variance sum for identical units.
pub fn field_sum_nonadiabatic<T: Scalar>(c: T, r: T, n_th: T, gamma: T, kappa: T) -> DuanResult<T> {
    let one = T::one();
    let two = T::two();
    let loss = gamma / (gamma + kappa);
    let thermal = two * c * (two * n_th + one) / (c + one) * loss;
    let squeezed = two * (kappa / (kappa + gamma) + loss / (one + c)) * (-two * r).exp();
    DuanResult::symmetric(thermal + squeezed)
}

/// Field-field sum for `C >> 1`: `2(2 n_th + 1) gamma/(gamma+kappa) + 2 e^{-2r}`.
pub fn field_sum_strong_coupling_limit<T: Scalar>(r: T, n_th: T, gamma: T, kappa: T) -> T {
    let two = T::two();
    two * (two * n_th + T::one()) * gamma / (gamma + kappa) + two * (-two * r).exp()
}

/// Cooperativity above which identical mirrors entangle: `2 n_th / (1 - e^{-2r})`.
pub fn threshold_cooperativity<T: Scalar>(r: T, n_th: T) -> Result<T, ClosedFormError> {
    if r.is_nan() || r < T::zero() {
        return Err(ClosedFormError::InvalidArgument {
            name: "r",
            value: r.as_f64(),
        });
    }
    if r == T::zero() {
        return Err(ClosedFormError::DegenerateSqueeze);
    }
    Ok(T::two() * n_th / -(-T::two() * r).exp_m1())
}

fn at_temperature<T: Scalar>(unit: &Unit<T>, temperature: T, power: T) -> Unit<T> {
    let mut u = *unit;
    u.mirror.temperature = temperature;
    u.resonator.power = power;
    u
}

/// Smallest drive power (W) at which two copies of `unit`, driven on the red
/// sideband with bath temperature `temperature`, become entangled.
///
/// Uses that the cooperativity is linear in power at fixed detuning.
pub fn minimum_power<T: Scalar>(unit: &Unit<T>, r: T, temperature: T) -> Result<T, ClosedFormError> {
    if temperature.is_nan() || temperature < T::zero() {
        return Err(ClosedFormError::InvalidArgument {
            name: "temperature",
            value: temperature.as_f64(),
        });
    }
    let reference = at_temperature(unit, temperature, T::one());
    let s = reference.red_sideband_steady_state();
    let c_min = threshold_cooperativity(r, s.n_th)?;
    Ok(c_min / s.cooperativity)
}

/// The prefactor `alpha = gamma omega_l M L^2 omega_m [(kappa/2)^2 + omega_m^2] / (2 omega_r^2)`
/// of the textbook power-threshold formula, with the unqualified frequency
/// read as the laser frequency.
pub fn threshold_alpha<T: Scalar>(unit: &Unit<T>) -> T {
    let res = &unit.resonator;
    let mir = &unit.mirror;
    let hk = res.kappa * T::half();
    mir.gamma * res.omega_l * mir.mass * res.length * res.length * mir.omega_m * (hk * hk + mir.omega_m * mir.omega_m)
        / (T::two() * res.omega_r * res.omega_r)
}

/// Power threshold from [`threshold_alpha`]:
/// `alpha / ((1 - e^{-2r}) (exp(hbar omega_m / k_B T) - 1))`. Reported next to
/// [`minimum_power`] as a diagnostic; the two differ by a constant factor.
pub fn alpha_power_threshold<T: Scalar>(unit: &Unit<T>, r: T, temperature: T) -> Result<T, ClosedFormError> {
    if r == T::zero() {
        return Err(ClosedFormError::DegenerateSqueeze);
    }
    let n_th = crate::model::thermal_occupation(unit.mirror.omega_m, temperature);
    Ok(threshold_alpha(unit) * n_th / -(-T::two() * r).exp_m1())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn identical_rates(gamma_a: f64, gamma: f64, n_th: f64) -> AdiabaticRates<f64> {
        AdiabaticRates::from_parts([gamma_a; 2], [gamma; 2], [n_th; 2])
    }

    fn bath(r: f64) -> SqueezedBath<f64> {
        SqueezedBath::new(r).unwrap()
    }

    #[test]
    fn vacuum_inputs_give_vacuum_variance() {
        let d = duan_sum_adiabatic_general(&identical_rates(3.0, 1.0, 0.0), &SqueezedBath::vacuum());
        assert_relative_eq!(d.total, 2.0, max_relative = 1e-15);
        assert!(!d.entangled);
    }

    #[test]
    fn general_reduces_to_identical() {
        for &(c, r, n) in &[(0.5, 0.3, 1.0), (15.0, 1.0, 5.0), (90.0, 2.0, 10.0)] {
            let gamma = 3.7;
            let b = bath(r);
            let g = duan_sum_adiabatic_general(&identical_rates(c * gamma, gamma, n), &b);
            let i = duan_sum_adiabatic_identical(c, r, n);
            assert!((g.total - i.total).abs() <= 1e-12 * i.total.max(1.0));
        }
    }

    #[test]
    fn asymmetric_drive_is_worse() {
        let b = bath(2.0);
        let gamma = 1.0;
        let mean = 1e4;
        let sym = duan_sum_adiabatic_general(&identical_rates(mean, gamma, 0.0), &b).total;
        // same mean radiation-pressure damping split 4:2
        let asym = AdiabaticRates::from_parts([4.0 / 3.0 * mean, 2.0 / 3.0 * mean], [gamma; 2], [0.0; 2]);
        let asym = duan_sum_adiabatic_general(&asym, &b).total;
        assert!(asym > sym, "{asym} <= {sym}");
        // brute-force scan over the split: symmetric point is the minimum
        let best = (1..200)
            .map(|k| {
                let f = k as f64 / 100.0;
                let rates = AdiabaticRates::from_parts([f * mean, (2.0 - f) * mean], [gamma; 2], [0.0; 2]);
                (f, duan_sum_adiabatic_general(&rates, &b).total)
            })
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        assert!((best.0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_known_values() {
        for (c, n) in [(0.0, 0.0), (3.0, 2.0), (40.0, 7.0)] {
            assert_relative_eq!(
                duan_sum_adiabatic_identical(c, 0.0, n).total,
                2.0 + 4.0 * n / (c + 1.0),
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(
            duan_sum_adiabatic_identical(0.0_f64, 1.3, 4.0).total,
            18.0,
            max_relative = 1e-14
        );
        // 2*15/16 e^-2 + 2*11/16
        let d = duan_sum_adiabatic_identical(15.0_f64, 1.0, 5.0);
        assert!((d.total - 1.628754).abs() < 1e-6);
        assert_eq!(d.var_x, d.var_y);
        assert!(d.entangled);
    }

    #[test]
    fn coupling_approximations() {
        assert_relative_eq!(
            duan_sum_strong_coupling_approx(1e300_f64, 1.0, 3.0),
            2.0 * (-2.0f64).exp()
        );
        let exact = duan_sum_adiabatic_identical(1e6_f64, 1.0, 5.0).total;
        assert!((duan_sum_strong_coupling_approx(1e6_f64, 1.0, 5.0) - exact).abs() < 1e-4);
        let near = duan_sum_strong_coupling_approx(2.3_f64, 1.0, 1.0);
        assert!((near - 2.0094).abs() < 1e-3, "{near}");

        assert_eq!(duan_sum_weak_coupling_approx(0.0_f64, 1.0, 2.5), 12.0);
        // the approximation keeps the squeezing term but drops -2C(1 + 2 n_th)
        for (c, n) in [(0.01_f64, 0.0), (1e-3, 2.0)] {
            let exact = duan_sum_adiabatic_identical(c, 1.0, n).total;
            let gap = duan_sum_weak_coupling_approx(c, 1.0, n) - exact;
            assert!((gap - 2.0 * c * (1.0 + 2.0 * n)).abs() < 10.0 * c * c * (1.0 + 2.0 * n));
        }
    }

    #[test]
    fn nonadiabatic_values() {
        let kappa = 1.0;
        let d = duan_sum_nonadiabatic(15.0_f64, 2.0, 5.0, 0.01 * kappa, kappa);
        assert!((d.total - 1.613210).abs() < 1e-6, "{}", d.total);
        let a = duan_sum_nonadiabatic(15.0_f64, 2.0, 5.0, 0.01, 1.0).total;
        let b = duan_sum_nonadiabatic(15.0_f64, 2.0, 5.0, 0.05, 1.0).total;
        assert!(b > a);
        let lim = duan_sum_nonadiabatic(15.0_f64, 1.0, 5.0, 1e-9, 1.0).total;
        assert!((lim - duan_sum_adiabatic_identical(15.0_f64, 1.0, 5.0).total).abs() < 1e-7);
    }

    #[test]
    fn field_values() {
        let f = field_sum_nonadiabatic(15.0_f64, 1.0, 5.0, 6.5e-4, 1.0).total;
        assert!((f - 0.283903).abs() < 1e-6, "{f}");
        assert_relative_eq!(
            field_sum_nonadiabatic(15.0_f64, 1.0, 5.0, 0.0, 1.0).total,
            2.0 * (-2.0f64).exp()
        );
        let hi = field_sum_nonadiabatic(90.0_f64, 1.0, 5.0, 6.5e-4, 1.0).total;
        assert!((hi - f).abs() <= 1e-3);

        assert_relative_eq!(
            field_sum_strong_coupling_limit(0.7_f64, 3.0, 0.0, 1.0),
            2.0 * (-1.4f64).exp()
        );
        // the limit also assumes gamma << kappa
        let lim = field_sum_strong_coupling_limit(1.0_f64, 5.0, 1e-6, 1.0);
        assert!((lim - field_sum_nonadiabatic(1e6_f64, 1.0, 5.0, 1e-6, 1.0).total).abs() < 1e-5);
        let lim = field_sum_strong_coupling_limit(1.0_f64, 5.0, 6.5e-4, 1.0);
        assert!((lim - 0.2849).abs() < 1e-4, "{lim}");
    }

    #[test]
    fn threshold_values() {
        let c = threshold_cooperativity(1.0_f64, 1.0).unwrap();
        assert!((c - 2.313035).abs() < 1e-6);
        assert_eq!(threshold_cooperativity(0.8_f64, 0.0).unwrap(), 0.0);
        assert_eq!(
            threshold_cooperativity(0.0_f64, 1.0),
            Err(ClosedFormError::DegenerateSqueeze)
        );
        let at = duan_sum_adiabatic_identical(c, 1.0, 1.0).total;
        assert!((at - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn entanglement_boundary() {
        assert!(is_entangled(0.0));
        assert!(!is_entangled(2.0));
        assert!(is_entangled(1.9999));
    }

    #[test]
    fn f32_formulas_agree() {
        let a = duan_sum_nonadiabatic(15.0f32, 1.0, 5.0, 0.01, 1.0).total as f64;
        let b = duan_sum_nonadiabatic(15.0f64, 1.0, 5.0, 0.01, 1.0).total;
        assert!((a - b).abs() < 1e-5);
    }

    proptest! {
        #[test]
        fn identical_decreasing_in_cooperativity(
            c in 0.0f64..1e3, dc in 1e-3f64..1e2, r in 0.0f64..3.0, n in 0.0f64..20.0,
        ) {
            prop_assume!(r > 1e-6 || n > 1e-6);
            let a = duan_sum_adiabatic_identical(c, r, n).total;
            let b = duan_sum_adiabatic_identical(c + dc, r, n).total;
            prop_assert!(b < a);
        }

        #[test]
        fn threshold_separates(r in 0.05f64..3.0, n in 0.01f64..20.0, f in 0.05f64..0.95) {
            let c = threshold_cooperativity(r, n).unwrap();
            prop_assert!(duan_sum_adiabatic_identical(c * (1.0 + f), r, n).total < 2.0);
            prop_assert!(duan_sum_adiabatic_identical(c * (1.0 - f), r, n).total >= 2.0);
        }
    }
}
