//! Numerical ground truth for the closed forms.
//!
//! In the frame rotating at each mirror frequency and on the red sideband,
//! each unit's quadratures obey
//!
//! ```text
//! dX/dt = -gamma/2 X + G x + sqrt(gamma) f_X      dx/dt = -kappa/2 x - G X + sqrt(kappa) F_x
//! dY/dt = -gamma/2 Y + G y + sqrt(gamma) f_Y      dy/dt = -kappa/2 y - G Y + sqrt(kappa) F_y
//! ```
//!
//! The squeezed inputs are white in that frame: the two-photon resonance at
//! `omega_M1 + omega_M2` is exactly the sum of the two rotation frequencies,
//! so `<F1 F2>` loses its time dependence. Symmetrized noise spectra are
//! `(2 n_th + 1)/2` for the mirror baths, `(2N + 1)/2` for each squeezed port,
//! `+M` between `F_x1, F_x2` and `-M` between `F_y1, F_y2`.
//!
//! Two routes evaluate the stationary covariance from these equations: the
//! Lyapunov equation ([`solve_lyapunov`]) and frequency-domain integration of
//! the transfer functions ([`spectral`]).

pub mod lyapunov;
pub mod quadrature;
pub mod spectral;

use thiserror::Error;

use crate::closedform::DuanResult;
use crate::model::{stability_check, Mat8, ModelError, SqueezedBath, SteadyState, SystemParams};
use crate::scalar::Scalar;

pub use quadrature::QuadratureConfig;
pub use spectral::{spectral_correlators, spectral_duan_sum, SpectralCorrelators};

/// Relative tolerance on `delta_eff = -omega_m` for the red-sideband drift.
pub const RWA_RTOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("drift matrix is not stable (max Re(eigenvalue) = {max_real_part:.6e})")]
    UnstableDrift { max_real_part: f64 },
    #[error(
        "unit {unit}: effective detuning {delta_eff:.6e} rad/s is not the red sideband \
         -omega_m = {target:.6e} rad/s; the rotating-wave drift does not apply"
    )]
    RwaViolation { unit: usize, delta_eff: f64, target: f64 },
    #[error("spectral integration did not reach tolerance: error {error:.3e} after {intervals} intervals")]
    QuadratureFailure { error: f64, intervals: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Fixed index map of the 8 quadratures: mirror then field, unit 1 then
/// unit 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrdering;

impl QuadratureOrdering {
    pub const MIRROR_X1: usize = 0;
    pub const MIRROR_Y1: usize = 1;
    pub const FIELD_X1: usize = 2;
    pub const FIELD_Y1: usize = 3;
    pub const MIRROR_X2: usize = 4;
    pub const MIRROR_Y2: usize = 5;
    pub const FIELD_X2: usize = 6;
    pub const FIELD_Y2: usize = 7;

    /// (position-like, momentum-like) indices of a mode.
    pub fn mode(pair: Pair, unit: usize) -> (usize, usize) {
        let base = 4 * unit + if pair == Pair::Field { 2 } else { 0 };
        (base, base + 1)
    }
}

/// Which two modes the EPR quadratures are built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pair {
    Mirror,
    Field,
}

/// Rates of one unit in the linearized red-sideband dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRates<T> {
    /// Many-photon coupling `G`.
    pub coupling: T,
    pub gamma: T,
    pub kappa: T,
    pub n_th: T,
}

impl<T: Scalar> UnitRates<T> {
    /// Rates giving cooperativity `c = 4 G^2 / (gamma kappa)`.
    pub fn from_cooperativity(c: T, gamma: T, kappa: T, n_th: T) -> Self {
        Self {
            coupling: (c * gamma * kappa / T::four()).sqrt(),
            gamma,
            kappa,
            n_th,
        }
    }

    pub fn cooperativity(&self) -> T {
        T::four() * self.coupling * self.coupling / (self.gamma * self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftDiffusion<T> {
    pub drift: Mat8<T>,
    pub diffusion: Mat8<T>,
}

/// Drift and diffusion of the red-sideband quadrature equations.
pub fn build_drift_diffusion<T: Scalar>(units: &[UnitRates<T>; 2], bath: &SqueezedBath<T>) -> DriftDiffusion<T> {
    let mut a = Mat8::<T>::zeros();
    let mut d = Mat8::<T>::zeros();
    let one = T::one();
    for (j, u) in units.iter().enumerate() {
        let (mx, my) = QuadratureOrdering::mode(Pair::Mirror, j);
        let (fx, fy) = QuadratureOrdering::mode(Pair::Field, j);
        for (m, f) in [(mx, fx), (my, fy)] {
            a[(m, m)] = -u.gamma * T::half();
            a[(f, f)] = -u.kappa * T::half();
            a[(m, f)] = u.coupling;
            a[(f, m)] = -u.coupling;
            d[(m, m)] = u.gamma * (T::two() * u.n_th + one) * T::half();
            d[(f, f)] = u.kappa * (T::two() * bath.n() + one) * T::half();
        }
    }
    let cross = (units[0].kappa * units[1].kappa).sqrt() * bath.m_corr();
    let (x1, y1) = QuadratureOrdering::mode(Pair::Field, 0);
    let (x2, y2) = QuadratureOrdering::mode(Pair::Field, 1);
    d[(x1, x2)] = cross;
    d[(x2, x1)] = cross;
    d[(y1, y2)] = -cross;
    d[(y2, y1)] = -cross;
    DriftDiffusion { drift: a, diffusion: d }
}

/// Per-unit rates of a physical system linearized at `steady`. Both units
/// must sit on the red sideband.
pub fn unit_rates<T: Scalar>(
    system: &SystemParams<T>,
    steady: [&SteadyState<T>; 2],
) -> Result<[UnitRates<T>; 2], OracleError> {
    system.validate()?;
    let units = [&system.unit1, &system.unit2];
    let mut out = [UnitRates {
        coupling: T::zero(),
        gamma: T::one(),
        kappa: T::one(),
        n_th: T::zero(),
    }; 2];
    for j in 0..2 {
        let target = -units[j].mirror.omega_m;
        let s = steady[j];
        if (s.delta_eff - target).abs() > T::lit(RWA_RTOL) * target.abs() {
            return Err(OracleError::RwaViolation {
                unit: j + 1,
                delta_eff: s.delta_eff.as_f64(),
                target: target.as_f64(),
            });
        }
        out[j] = UnitRates {
            coupling: s.coupling,
            gamma: units[j].mirror.gamma,
            kappa: units[j].resonator.kappa,
            n_th: s.n_th,
        };
    }
    Ok(out)
}

pub fn build_rwa_drift_diffusion<T: Scalar>(
    system: &SystemParams<T>,
    steady: [&SteadyState<T>; 2],
) -> Result<DriftDiffusion<T>, OracleError> {
    Ok(build_drift_diffusion(&unit_rates(system, steady)?, &system.bath))
}

/// Stationary symmetrized covariance `V_ij = <u_i u_j + u_j u_i> / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix<T> {
    pub v: Mat8<T>,
    /// `||A V + V A^T + D||_F / ||D||_F`.
    pub relative_residual: T,
}

impl<T: Scalar> CovarianceMatrix<T> {
    pub fn get(&self, i: usize, j: usize) -> T {
        self.v[(i, j)]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let v: Mat8<f64> = self.v.map(|x| x.as_f64());
        v.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Var(position) * Var(momentum)` of one mode.
    pub fn uncertainty_product(&self, pair: Pair, unit: usize) -> T {
        let (p, q) = QuadratureOrdering::mode(pair, unit);
        self.v[(p, p)] * self.v[(q, q)]
    }
}

pub fn solve_lyapunov<T: Scalar>(dd: &DriftDiffusion<T>) -> Result<CovarianceMatrix<T>, OracleError> {
    let stability = stability_check(&dd.drift);
    if !stability.stable {
        return Err(OracleError::UnstableDrift {
            max_real_part: stability.max_real_part,
        });
    }
    let v = lyapunov::solve_continuous_lyapunov(&dd.drift, &dd.diffusion).ok_or(OracleError::UnstableDrift {
        max_real_part: stability.max_real_part,
    })?;
    let res = lyapunov::lyapunov_residual(&dd.drift, &v, &dd.diffusion);
    let norm_d = lyapunov::frobenius(&dd.diffusion);
    let relative_residual = if norm_d > T::zero() {
        lyapunov::frobenius(&res) / norm_d
    } else {
        lyapunov::frobenius(&res)
    };
    Ok(CovarianceMatrix { v, relative_residual })
}

/// Variances of `q1 - q2` and `p1 + p2` for the chosen pair.
pub fn duan_from_covariance<T: Scalar>(cov: &CovarianceMatrix<T>, pair: Pair) -> DuanResult<T> {
    let (x1, y1) = QuadratureOrdering::mode(pair, 0);
    let (x2, y2) = QuadratureOrdering::mode(pair, 1);
    let v = &cov.v;
    let var_x = v[(x1, x1)] + v[(x2, x2)] - T::two() * v[(x1, x2)];
    let var_y = v[(y1, y1)] + v[(y2, y2)] + T::two() * v[(y1, y2)];
    DuanResult::from_variances(var_x, var_y)
}

/// Lyapunov-route variance sum for the given rates.
pub fn lyapunov_duan<T: Scalar>(
    units: &[UnitRates<T>; 2],
    bath: &SqueezedBath<T>,
    pair: Pair,
) -> Result<DuanResult<T>, OracleError> {
    let cov = solve_lyapunov(&build_drift_diffusion(units, bath))?;
    Ok(duan_from_covariance(&cov, pair))
}
