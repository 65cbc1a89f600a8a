//! Frequency-domain route to the stationary correlators.
//!
//! Fourier transforming the quadrature equations of one unit gives, with
//! `d(w) = G^2 + (gamma/2 + iw)(kappa/2 + iw)`,
//!
//! ```text
//! X(w) = [(kappa/2 + iw) sqrt(gamma) f_X + G sqrt(kappa) F_x] / d(w)
//! x(w) = [-G sqrt(gamma) f_X + (gamma/2 + iw) sqrt(kappa) F_x] / d(w)
//! ```
//!
//! and the same for the momentum-like quadratures. Each stationary
//! correlator is `(1/2pi) ∫ h_a(w) S h_b(w)^† dw` over the real line. The
//! integrand is even, so only `[0, inf)` is integrated, compactified by
//! `w = tan(theta)` after rescaling all rates to order one.

use num_complex::Complex;

use super::quadrature::{integrate, QuadratureConfig};
use super::{unit_rates, OracleError, Pair, UnitRates};
use crate::closedform::DuanResult;
use crate::model::{SqueezedBath, SteadyState, SystemParams};
use crate::scalar::Scalar;

/// Stationary symmetrized correlators of one pair of modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralCorrelators<T> {
    /// `<q1^2>`, `<q2^2>`, `<q1 q2>` for the position-like quadratures.
    pub q11: T,
    pub q22: T,
    pub q12: T,
    /// `<p1^2>`, `<p2^2>`, `<p1 p2>` for the momentum-like quadratures.
    pub p11: T,
    pub p22: T,
    pub p12: T,
    pub error: T,
    pub intervals: usize,
}

impl<T: Scalar> SpectralCorrelators<T> {
    pub fn duan(&self) -> DuanResult<T> {
        DuanResult::from_variances(
            self.q11 + self.q22 - T::two() * self.q12,
            self.p11 + self.p22 + T::two() * self.p12,
        )
    }
}

/// Transfer coefficients of the chosen quadrature of one unit onto its
/// (mirror bath, squeezed port) noise inputs.
fn transfer<T: Scalar>(u: &UnitRates<T>, pair: Pair, w: T) -> [Complex<T>; 2] {
    let iw = Complex::new(T::zero(), w);
    let hg = Complex::new(u.gamma * T::half(), T::zero()) + iw;
    let hk = Complex::new(u.kappa * T::half(), T::zero()) + iw;
    let d = hg * hk + Complex::new(u.coupling * u.coupling, T::zero());
    let sg = u.gamma.sqrt();
    let sk = u.kappa.sqrt();
    match pair {
        Pair::Mirror => [hk * sg / d, Complex::new(u.coupling * sk, T::zero()) / d],
        Pair::Field => [Complex::new(-u.coupling * sg, T::zero()) / d, hg * sk / d],
    }
}

fn breakpoints<T: Scalar>(units: &[UnitRates<T>; 2]) -> Vec<T> {
    let mut out = Vec::new();
    for u in units {
        let quarter = (u.kappa - u.gamma) / T::four();
        let split = (u.coupling * u.coupling - quarter * quarter).abs().sqrt();
        for w in [
            u.gamma * T::half(),
            u.kappa * T::half(),
            u.coupling,
            (u.gamma + u.kappa) / T::four(),
            split,
        ] {
            if w > T::zero() && w.is_finite() {
                out.push(w.atan());
            }
        }
    }
    out
}

/// Integrates the six correlators of `pair` numerically.
pub fn spectral_correlators<T: Scalar>(
    units: &[UnitRates<T>; 2],
    bath: &SqueezedBath<T>,
    pair: Pair,
    cfg: &QuadratureConfig,
) -> Result<SpectralCorrelators<T>, OracleError> {
    let scale = units
        .iter()
        .flat_map(|u| [u.coupling, u.gamma, u.kappa])
        .fold(T::zero(), |m, x| m.max(x));
    let scaled = units.map(|u| UnitRates {
        coupling: u.coupling / scale,
        gamma: u.gamma / scale,
        kappa: u.kappa / scale,
        n_th: u.n_th,
    });

    let half = T::half();
    let s_bath = [scaled[0].n_th + half, scaled[1].n_th + half];
    let s_sq = bath.n() + half;
    let m = bath.m_corr();

    let integrand = |theta: T| -> [T; 6] {
        let w = theta.tan();
        let jac = T::one() + w * w;
        let h1 = transfer(&scaled[0], pair, w);
        let h2 = transfer(&scaled[1], pair, w);
        let auto = |h: &[Complex<T>; 2], sb: T| h[0].norm_sqr() * sb + h[1].norm_sqr() * s_sq;
        // only the squeezed ports are correlated across units
        let cross = (h1[1] * h2[1].conj()).re * m;
        let (a1, a2) = (auto(&h1, s_bath[0]), auto(&h2, s_bath[1]));
        let out = [a1, a2, cross, a1, a2, -cross];
        let norm = jac / T::PI();
        out.map(|x| {
            let v = x * norm;
            if v.is_finite() {
                v
            } else {
                T::zero()
            }
        })
    };

    let outcome = integrate(integrand, T::zero(), T::FRAC_PI_2(), &breakpoints(&scaled), cfg);
    if !outcome.converged {
        return Err(OracleError::QuadratureFailure {
            error: outcome.error.as_f64(),
            intervals: outcome.intervals,
        });
    }
    let [q11, q22, q12, p11, p22, p12] = outcome.value;
    Ok(SpectralCorrelators {
        q11,
        q22,
        q12,
        p11,
        p22,
        p12,
        error: outcome.error,
        intervals: outcome.intervals,
    })
}

pub fn spectral_duan_sum<T: Scalar>(
    units: &[UnitRates<T>; 2],
    bath: &SqueezedBath<T>,
    pair: Pair,
    cfg: &QuadratureConfig,
) -> Result<DuanResult<T>, OracleError> {
    Ok(spectral_correlators(units, bath, pair, cfg)?.duan())
}

/// [`spectral_duan_sum`] for a physical system linearized at `steady`.
pub fn spectral_duan_sum_for_system<T: Scalar>(
    system: &SystemParams<T>,
    steady: [&SteadyState<T>; 2],
    pair: Pair,
    cfg: &QuadratureConfig,
) -> Result<DuanResult<T>, OracleError> {
    spectral_duan_sum(&unit_rates(system, steady)?, &system.bath, pair, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::duan_sum_nonadiabatic;

    const KAPPA: f64 = 2.0 * std::f64::consts::PI * 215e3;

    #[test]
    fn thermal_lorentzian() {
        let u = UnitRates {
            coupling: 0.0,
            gamma: 1e-3 * KAPPA,
            kappa: KAPPA,
            n_th: 4.0,
        };
        let c = spectral_correlators(
            &[u; 2],
            &SqueezedBath::vacuum(),
            Pair::Mirror,
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((c.q11 - 4.5).abs() < 1e-8);
        assert!(c.q12.abs() < 1e-12);
    }

    #[test]
    fn adiabatic_cross_correlator() {
        let bath = SqueezedBath::new(1.0).unwrap();
        let gamma = 1e-7 * KAPPA;
        let units = [
            UnitRates::from_cooperativity(20.0, gamma, KAPPA, 1.0),
            UnitRates::from_cooperativity(20.0, gamma, KAPPA, 1.0),
        ];
        let c = spectral_correlators(&units, &bath, Pair::Mirror, &QuadratureConfig::default()).unwrap();
        let ga = 4.0 * units[0].coupling.powi(2) / KAPPA;
        let big = ga + gamma;
        let expect = 2.0 * ga * bath.m_corr() / (2.0 * big);
        assert!((c.q12 - expect).abs() < 1e-4 * expect, "{} vs {expect}", c.q12);
    }

    #[test]
    fn matches_closed_form() {
        let bath = SqueezedBath::new(2.0).unwrap();
        let gk = 0.05;
        let units = [UnitRates::from_cooperativity(15.0, gk * KAPPA, KAPPA, 5.0); 2];
        let d = spectral_duan_sum(&units, &bath, Pair::Mirror, &QuadratureConfig::default()).unwrap();
        let e = duan_sum_nonadiabatic(15.0, 2.0, 5.0, gk * KAPPA, KAPPA).total;
        assert!((d.total - e).abs() <= 1e-6 * e);
    }

    #[test]
    fn tight_budget_fails() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-30,
            max_intervals: 8,
        };
        let units = [UnitRates::from_cooperativity(15.0, 0.01 * KAPPA, KAPPA, 5.0); 2];
        let err = spectral_duan_sum(&units, &SqueezedBath::new(1.0).unwrap(), Pair::Mirror, &cfg);
        assert!(matches!(err, Err(OracleError::QuadratureFailure { .. })));
    }
}
