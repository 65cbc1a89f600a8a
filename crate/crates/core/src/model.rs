//! Physical parameters of the two optomechanical units, the squeezed bath,
//! and the classical steady state around which the quantum fluctuations are
//! linearized.
//!
//! Every frequency and rate is an angular frequency in rad/s. Rates such as
//! `kappa` and `gamma` are the full energy damping rates that appear as
//! `kappa/2` and `gamma/2` in the amplitude equations of motion.

use nalgebra::SMatrix;
use num_complex::Complex;
use thiserror::Error;

use crate::scalar::Scalar;

/// Reduced Planck constant, J·s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K (CODATA 2018, exact).
pub const K_B: f64 = 1.380_649e-23;

/// Ratio below which `omega_r / kappa` or `omega_l / kappa` triggers a
/// [`ParamWarning::FrequencyRatio`].
pub const MIN_FREQUENCY_RATIO: f64 = 1e3;

/// Maximum number of damped fixed-point steps before falling back to
/// bracketing.
pub const MAX_PICARD_STEPS: usize = 10_000;
const PICARD_DAMPING: f64 = 0.5;
const FIXED_POINT_RTOL: f64 = 1e-9;

pub type Mat8<T> = SMatrix<T, 8, 8>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error(
        "effective detuning did not converge after {steps} damped steps; \
         {branches} steady-state branch(es) found by bracketing"
    )]
    NonConvergence { steps: usize, branches: usize },
}

/// Non-fatal diagnostics about a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    /// An optical frequency is not much larger than the cavity linewidth.
    FrequencyRatio { name: &'static str, ratio: f64 },
    /// `kappa` does not dominate `gamma` and `G`; only the nonadiabatic
    /// expressions apply.
    NonAdiabatic { kappa: f64, gamma: f64, coupling: f64 },
    /// `G` or `kappa` reaches `omega_m`, so the dropped counter-rotating
    /// terms are no longer fast.
    Unresolved { omega_m: f64, kappa: f64, coupling: f64 },
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::FrequencyRatio { name, ratio } => {
                write!(f, "{name}/kappa = {ratio:.3e} is below {MIN_FREQUENCY_RATIO:e}")
            }
            ParamWarning::NonAdiabatic { kappa, gamma, coupling } => write!(
                f,
                "adiabatic elimination not justified: kappa = {kappa:.4e}, \
                 gamma = {gamma:.4e}, G = {coupling:.4e} rad/s"
            ),
            ParamWarning::Unresolved {
                omega_m,
                kappa,
                coupling,
            } => write!(
                f,
                "rotating-wave approximation doubtful: omega_m = {omega_m:.4e} does not exceed \
                 kappa = {kappa:.4e} and G = {coupling:.4e} rad/s"
            ),
        }
    }
}

fn require<T: Scalar>(name: &'static str, value: T, ok: bool, reason: &'static str) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value: value.as_f64(),
            reason,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    pub hbar: T,
    pub k_b: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn codata() -> Self {
        Self {
            hbar: T::lit(HBAR),
            k_b: T::lit(K_B),
        }
    }
}

/// Optical side of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonatorParams<T> {
    pub omega_r: T,
    pub omega_l: T,
    pub kappa: T,
    pub length: T,
    /// Drive power in W. Zero is allowed and describes an undriven cavity.
    pub power: T,
}

impl<T: Scalar> ResonatorParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        let zero = T::zero();
        require("omega_r", self.omega_r, self.omega_r > zero, "must be > 0")?;
        require("omega_l", self.omega_l, self.omega_l > zero, "must be > 0")?;
        require("kappa", self.kappa, self.kappa > zero, "must be > 0")?;
        require("length", self.length, self.length > zero, "must be > 0")?;
        require("power", self.power, self.power >= zero, "must be >= 0")
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        let mut out = Vec::new();
        for (name, omega) in [("omega_r", self.omega_r), ("omega_l", self.omega_l)] {
            let ratio = (omega / self.kappa).as_f64();
            if ratio < MIN_FREQUENCY_RATIO {
                out.push(ParamWarning::FrequencyRatio { name, ratio });
            }
        }
        out
    }
}

/// Mechanical side of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirrorParams<T> {
    pub omega_m: T,
    pub gamma: T,
    pub mass: T,
    /// Bath temperature in K.
    pub temperature: T,
}

impl<T: Scalar> MirrorParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        let zero = T::zero();
        require("omega_m", self.omega_m, self.omega_m > zero, "must be > 0")?;
        require("gamma", self.gamma, self.gamma > zero, "must be > 0")?;
        require("mass", self.mass, self.mass > zero, "must be > 0")?;
        require(
            "temperature",
            self.temperature,
            self.temperature >= zero,
            "must be >= 0",
        )
    }

    pub fn thermal_occupation(&self) -> T {
        thermal_occupation(self.omega_m, self.temperature)
    }
}

/// One optomechanical unit: a driven cavity with a movable mirror.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unit<T> {
    pub resonator: ResonatorParams<T>,
    pub mirror: MirrorParams<T>,
}

impl<T: Scalar> Unit<T> {
    pub fn new(resonator: ResonatorParams<T>, mirror: MirrorParams<T>) -> Result<Self, ModelError> {
        let unit = Self { resonator, mirror };
        unit.validate()?;
        Ok(unit)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        self.resonator.validate()?;
        self.mirror.validate()
    }

    pub fn single_photon_coupling(&self) -> T {
        single_photon_coupling(
            self.resonator.omega_r,
            self.resonator.length,
            self.mirror.mass,
            self.mirror.omega_m,
        )
    }

    pub fn drive_amplitude(&self) -> T {
        drive_amplitude(self.resonator.power, self.resonator.kappa, self.resonator.omega_l)
    }

    /// Steady state at the red-sideband operating point `delta_eff = -omega_m`.
    pub fn red_sideband_steady_state(&self) -> SteadyState<T> {
        mean_fields_from_effective_detuning(self, -self.mirror.omega_m)
    }
}

/// Broadband two-mode squeezed vacuum feeding both cavities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezedBath<T> {
    r: T,
    n: T,
    m_corr: T,
}

impl<T: Scalar> SqueezedBath<T> {
    pub fn new(r: T) -> Result<Self, ModelError> {
        require("r", r, r >= T::zero(), "squeeze parameter must be >= 0")?;
        let (s, c) = (r.sinh(), r.cosh());
        Ok(Self {
            r,
            n: s * s,
            m_corr: s * c,
        })
    }

    pub fn vacuum() -> Self {
        Self {
            r: T::zero(),
            n: T::zero(),
            m_corr: T::zero(),
        }
    }

    /// A bath with the occupation of a squeezed vacuum but no inter-mode
    /// correlation. Not a physical two-mode squeezed state; used to show that
    /// the correlations, not the extra noise, carry the entanglement.
    pub fn uncorrelated(r: T) -> Result<Self, ModelError> {
        let mut bath = Self::new(r)?;
        bath.m_corr = T::zero();
        Ok(bath)
    }

    pub fn r(&self) -> T {
        self.r
    }

    /// Mean occupation `sinh^2 r`.
    pub fn n(&self) -> T {
        self.n
    }

    /// Cross-correlation `sinh r cosh r`.
    pub fn m_corr(&self) -> T {
        self.m_corr
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams<T> {
    pub unit1: Unit<T>,
    pub unit2: Unit<T>,
    pub bath: SqueezedBath<T>,
}

impl<T: Scalar> SystemParams<T> {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.unit1.validate()?;
        self.unit2.validate()
    }

    /// Same system with the unit labels exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            unit1: self.unit2,
            unit2: self.unit1,
            bath: self.bath,
        }
    }
}

/// Linearization point of one unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
    pub n_bar: T,
    pub delta_eff: T,
    pub delta_bare: T,
    /// Drive phase that makes `alpha` purely negative-imaginary.
    pub phi: T,
    pub g: T,
    /// Many-photon coupling `G = g sqrt(n_bar)`.
    pub coupling: T,
    /// Radiation-pressure damping `4 G^2 / kappa`.
    pub gamma_a: T,
    /// `gamma_a + gamma`.
    pub gamma_total: T,
    pub cooperativity: T,
    pub n_th: T,
}

impl<T: Scalar> SteadyState<T> {
    /// Warns when the cavity does not adiabatically follow the mirror.
    pub fn adiabaticity_warning(&self, unit: &Unit<T>) -> Option<ParamWarning> {
        let kappa = unit.resonator.kappa.as_f64();
        let gamma = unit.mirror.gamma.as_f64();
        let coupling = self.coupling.as_f64();
        (kappa < 10.0 * gamma.max(coupling)).then_some(ParamWarning::NonAdiabatic { kappa, gamma, coupling })
    }

    /// Warns when the sidebands are not resolved at this drive strength.
    pub fn rotating_wave_warning(&self, unit: &Unit<T>) -> Option<ParamWarning> {
        let omega_m = unit.mirror.omega_m.as_f64();
        let kappa = unit.resonator.kappa.as_f64();
        let coupling = self.coupling.as_f64();
        (kappa.max(coupling) >= omega_m).then_some(ParamWarning::Unresolved {
            omega_m,
            kappa,
            coupling,
        })
    }
}

/// Bose-Einstein occupation of a mechanical mode; exactly zero at `T = 0`.
pub fn thermal_occupation<T: Scalar>(omega_m: T, temperature: T) -> T {
    if temperature <= T::zero() {
        return T::zero();
    }
    let k = PhysicalConstants::<T>::codata();
    let x = k.hbar * omega_m / (k.k_b * temperature);
    T::one() / x.exp_m1()
}

/// Single-photon optomechanical coupling `(omega_r / L) sqrt(hbar / (M omega_m))`.
pub fn single_photon_coupling<T: Scalar>(omega_r: T, length: T, mass: T, omega_m: T) -> T {
    let k = PhysicalConstants::<T>::codata();
    omega_r / length * (k.hbar / (mass * omega_m)).sqrt()
}

/// Drive amplitude `sqrt(2 kappa P / (hbar omega_l))`.
pub fn drive_amplitude<T: Scalar>(power: T, kappa: T, omega_l: T) -> T {
    let k = PhysicalConstants::<T>::codata();
    (T::two() * kappa * power / (k.hbar * omega_l)).sqrt()
}

fn mechanical_shift_strength<T: Scalar>(unit: &Unit<T>) -> T {
    // delta_bare - delta_eff = -K / ((kappa/2)^2 + delta_eff^2)
    let g = unit.single_photon_coupling();
    let eps = unit.drive_amplitude();
    let half_gamma = unit.mirror.gamma * T::half();
    let wm = unit.mirror.omega_m;
    T::two() * g * g * eps * eps * wm / (half_gamma * half_gamma + wm * wm)
}

/// Mean fields when the effective (displacement-shifted) detuning is chosen
/// directly.
pub fn mean_fields_from_effective_detuning<T: Scalar>(unit: &Unit<T>, delta_eff: T) -> SteadyState<T> {
    let res = &unit.resonator;
    let mir = &unit.mirror;
    let i = Complex::new(T::zero(), T::one());

    let eps = unit.drive_amplitude();
    let half_kappa = res.kappa * T::half();
    let phi = -(T::two() * delta_eff / res.kappa).atan();
    let drive = Complex::from_polar(eps, phi);
    let alpha = -i * drive / Complex::new(half_kappa, -delta_eff);
    let n_bar = eps * eps / (half_kappa * half_kappa + delta_eff * delta_eff);

    let g = unit.single_photon_coupling();
    let beta = -i * Complex::new(g * n_bar, T::zero()) / Complex::new(mir.gamma * T::half(), mir.omega_m);
    let delta_bare = delta_eff + g * (beta + beta.conj()).re;

    let coupling = g * n_bar.sqrt();
    let gamma_a = T::four() * coupling * coupling / res.kappa;
    SteadyState {
        alpha,
        beta,
        n_bar,
        delta_eff,
        delta_bare,
        phi,
        g,
        coupling,
        gamma_a,
        gamma_total: gamma_a + mir.gamma,
        cooperativity: gamma_a / mir.gamma,
        n_th: mir.thermal_occupation(),
    }
}

/// All self-consistent steady states for a given bare laser detuning.
#[derive(Debug, Clone, PartialEq)]
pub struct DetuningBranches<T> {
    /// Ascending in `delta_eff`.
    pub branches: Vec<SteadyState<T>>,
    /// Index of the branch reached by damped iteration, if it converged.
    pub picard: Option<usize>,
}

impl<T: Scalar> DetuningBranches<T> {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    /// The operating point when it is unambiguous: the iterated fixed point,
    /// or the only bracketed root. Several roots without a convergent
    /// iteration mean the unit sits in its bistable region.
    pub fn unique(&self) -> Result<&SteadyState<T>, ModelError> {
        match (self.picard, self.branches.len()) {
            (Some(idx), _) => Ok(&self.branches[idx]),
            (None, 1) => Ok(&self.branches[0]),
            (None, n) => Err(ModelError::NonConvergence {
                steps: MAX_PICARD_STEPS,
                branches: n,
            }),
        }
    }

    /// Branch whose effective detuning is closest to `target`.
    pub fn nearest(&self, target: T) -> Option<&SteadyState<T>> {
        self.branches.iter().min_by(|a, b| {
            (a.delta_eff - target)
                .abs()
                .partial_cmp(&(b.delta_eff - target).abs())
                .expect("finite detunings")
        })
    }
}

/// Solves `delta_eff = delta_bare - g (beta + beta*)` for `delta_eff`.
///
/// With `K = 2 g^2 eps^2 omega_m / ((gamma/2)^2 + omega_m^2)` the fixed-point
/// map is `delta_eff -> delta_bare + K / ((kappa/2)^2 + delta_eff^2)`, whose
/// roots all lie in `[delta_bare, delta_bare + K / (kappa/2)^2]`. The residual
/// has at most two turning points, so bisecting between them finds every root.
pub fn mean_fields_from_bare_detuning<T: Scalar>(
    unit: &Unit<T>,
    delta_bare: T,
) -> Result<DetuningBranches<T>, ModelError> {
    unit.validate()?;
    require("delta_bare", delta_bare, true, "must be finite")?;

    let strength = mechanical_shift_strength(unit);
    let half_kappa = unit.resonator.kappa * T::half();
    let q = half_kappa * half_kappa;
    let map = |x: T| delta_bare + strength / (q + x * x);
    let residual = |x: T| x - map(x);
    let tol = |x: T| T::lit(FIXED_POINT_RTOL) * x.abs().max(unit.resonator.kappa);

    if strength == T::zero() {
        let state = mean_fields_from_effective_detuning(unit, delta_bare);
        return Ok(DetuningBranches {
            branches: vec![state],
            picard: Some(0),
        });
    }

    let damping = T::lit(PICARD_DAMPING);
    let mut x = delta_bare;
    let mut picard_root = None;
    for _ in 0..MAX_PICARD_STEPS {
        let next = x + damping * (map(x) - x);
        if !next.is_finite() {
            break;
        }
        x = next;
        if residual(x).abs() <= tol(x) {
            picard_root = Some(x);
            break;
        }
    }

    let lo = delta_bare;
    let hi = delta_bare + strength / q;
    let mut edges = vec![lo];
    for c in residual_turning_points(strength, q) {
        if c > lo && c < hi {
            edges.push(c);
        }
    }
    edges.push(hi);

    let mut roots: Vec<T> = Vec::new();
    for pair in edges.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ra, rb) = (residual(a), residual(b));
        if ra == T::zero() {
            roots.push(a);
        } else if rb == T::zero() {
            roots.push(b);
        } else if (ra < T::zero()) != (rb < T::zero()) {
            roots.push(bisect(&residual, a, b));
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    roots.dedup_by(|a, b| (*a - *b).abs() <= tol(*b));
    roots.retain(|&r| residual(r).abs() <= tol(r));

    let picard = picard_root.map(
        |p| match roots.iter().position(|&r| (r - p).abs() <= T::lit(1e3) * tol(p)) {
            Some(idx) => idx,
            None => {
                roots.push(p);
                roots.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
                roots.iter().position(|&r| r == p).expect("just inserted")
            }
        },
    );

    if roots.is_empty() {
        return Err(ModelError::NonConvergence {
            steps: MAX_PICARD_STEPS,
            branches: 0,
        });
    }

    let branches = roots
        .into_iter()
        .map(|d| {
            let mut state = mean_fields_from_effective_detuning(unit, d);
            state.delta_bare = delta_bare;
            state
        })
        .collect();
    Ok(DetuningBranches { branches, picard })
}

/// Zeros of `(q + x^2)^2 + 2 K x`, where the residual's slope vanishes.
fn residual_turning_points<T: Scalar>(strength: T, q: T) -> Vec<T> {
    let p = |x: T| (q + x * x).powi(2) + T::two() * strength * x;
    let dp = |x: T| T::four() * x * (q + x * x) + T::two() * strength;

    // dp is strictly increasing with dp(0) > 0; its zero is p's minimum.
    let mut left = -(strength.cbrt() + q.sqrt());
    while dp(left) > T::zero() {
        left *= T::two();
    }
    let x_min = bisect(&dp, left, T::zero());
    if p(x_min) >= T::zero() {
        return Vec::new();
    }
    let mut far = x_min * T::two() - T::one();
    while p(far) < T::zero() {
        far *= T::two();
    }
    vec![bisect(&p, far, x_min), bisect(&p, x_min, T::zero())]
}

/// Bisection to machine precision on a sign-changing interval.
fn bisect<T: Scalar>(f: &impl Fn(T) -> T, mut a: T, mut b: T) -> T {
    let mut fa = f(a);
    for _ in 0..400 {
        let mid = a + (b - a) * T::half();
        if mid == a || mid == b {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return mid;
        }
        if (fm < T::zero()) == (fa < T::zero()) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stability {
    pub stable: bool,
    pub max_real_part: f64,
}

/// Checks that every eigenvalue of the drift matrix has negative real part.
pub fn stability_check<T: Scalar>(drift: &Mat8<T>) -> Stability {
    let a: Mat8<f64> = drift.map(|x| x.as_f64());
    let max_real_part = a
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    Stability {
        stable: max_real_part < 0.0,
        max_real_part,
    }
}
