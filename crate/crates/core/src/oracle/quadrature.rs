//! Globally adaptive 7/15-point Gauss-Kronrod quadrature for vector-valued
//! integrands on a finite interval.

#![allow(clippy::excessive_precision)]

use crate::scalar::Scalar;

// Kronrod abscissae on [0, 1]; odd indices are the Gauss-Legendre points.
// Tabulated to 33 digits, as published.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance on each component of the integral.
    pub abs_tol: f64,
    /// Subinterval budget.
    pub max_intervals: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_intervals: 20_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome<T, const K: usize> {
    pub value: [T; K],
    /// Largest per-component error estimate.
    pub error: T,
    pub intervals: usize,
    pub converged: bool,
}

struct Segment<T, const K: usize> {
    a: T,
    b: T,
    value: [T; K],
    error: [T; K],
}

fn gk15<T: Scalar, const K: usize>(f: &impl Fn(T) -> [T; K], a: T, b: T) -> Segment<T, K> {
    let center = (a + b) * T::half();
    let half = (b - a) * T::half();
    let fc = f(center);
    let mut kron = [T::zero(); K];
    let mut gauss = [T::zero(); K];
    for k in 0..K {
        kron[k] = fc[k] * T::lit(WGK[7]);
        gauss[k] = fc[k] * T::lit(WG[3]);
    }
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for k in 0..K {
            let sum = f1[k] + f2[k];
            kron[k] += T::lit(WGK[j]) * sum;
            if j % 2 == 1 {
                gauss[k] += T::lit(WG[j / 2]) * sum;
            }
        }
    }
    let mut value = [T::zero(); K];
    let mut error = [T::zero(); K];
    for k in 0..K {
        value[k] = kron[k] * half;
        error[k] = ((kron[k] - gauss[k]) * half).abs();
    }
    Segment { a, b, value, error }
}

fn worst<T: Scalar, const K: usize>(e: &[T; K]) -> T {
    e.iter().fold(T::zero(), |m, &x| m.max(x))
}

/// Integrates `f` over `[a, b]`, pre-split at `breaks` (points outside the
/// open interval are ignored), bisecting the worst subinterval until the
/// summed error estimate of every component is below `abs_tol`.
pub fn integrate<T: Scalar, const K: usize>(
    f: impl Fn(T) -> [T; K],
    a: T,
    b: T,
    breaks: &[T],
    cfg: &QuadratureConfig,
) -> QuadratureOutcome<T, K> {
    let mut edges: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    edges.push(a);
    edges.push(b);
    edges.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    edges.dedup();

    let mut segments: Vec<Segment<T, K>> = edges.windows(2).map(|w| gk15(&f, w[0], w[1])).collect();
    let tol = T::lit(cfg.abs_tol);

    loop {
        let mut total_err = [T::zero(); K];
        for s in &segments {
            for k in 0..K {
                total_err[k] += s.error[k];
            }
        }
        let err = worst(&total_err);
        let converged = err <= tol;
        if converged || segments.len() >= cfg.max_intervals {
            let mut value = [T::zero(); K];
            for s in &segments {
                for k in 0..K {
                    value[k] += s.value[k];
                }
            }
            return QuadratureOutcome {
                value,
                error: err,
                intervals: segments.len(),
                converged,
            };
        }
        let (idx, _) =
            segments
                .iter()
                .enumerate()
                .map(|(i, s)| (i, worst(&s.error)))
                .fold(
                    (0, T::neg_infinity()),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        let seg = segments.swap_remove(idx);
        let mid = (seg.a + seg.b) * T::half();
        if mid <= seg.a || mid >= seg.b {
            // interval cannot shrink further; keep it and report what we have
            segments.push(seg);
            let mut value = [T::zero(); K];
            for s in &segments {
                for k in 0..K {
                    value[k] += s.value[k];
                }
            }
            return QuadratureOutcome {
                value,
                error: err,
                intervals: segments.len(),
                converged: false,
            };
        }
        segments.push(gk15(&f, seg.a, mid));
        segments.push(gk15(&f, mid, seg.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let out = integrate(|x: f64| [x.powi(5), 1.0], -1.0, 2.0, &[], &QuadratureConfig::default());
        assert!((out.value[0] - (64.0 - 1.0) / 6.0).abs() < 1e-13);
        assert!((out.value[1] - 3.0).abs() < 1e-14);
        assert!(out.converged);
    }

    #[test]
    fn lorentzian_on_compactified_line() {
        // int_0^inf w/(w^2/4 + x^2) dx = pi, via x = tan(t)
        let w = 1e-3;
        let f = |t: f64| {
            let x = t.tan();
            let jac = 1.0 + x * x;
            [w / (w * w / 4.0 + x * x) * jac]
        };
        let brk = [(w / 2.0).atan()];
        let out = integrate(f, 0.0, PI / 2.0, &brk, &QuadratureConfig::default());
        assert!(out.converged);
        assert!((out.value[0] - PI).abs() < 1e-9, "{}", out.value[0]);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let cfg = QuadratureConfig {
            abs_tol: 1e-300,
            max_intervals: 4,
        };
        let out = integrate(|x: f64| [x.sqrt()], 0.0, 1.0, &[], &cfg);
        assert!(!out.converged);
        assert_eq!(out.intervals, 4);
    }
}
