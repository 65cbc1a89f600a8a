//! Golden-section minimization of a scalar objective along one axis.

use super::{Axis, Scale, SweepError};

/// Grid points used to locate the minimum before refining.
const BRACKET_POINTS: usize = 41;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizeSpec {
    pub axis: Axis,
    pub lo: f64,
    pub hi: f64,
    /// Final bracket width as a fraction of `hi - lo` (of `ln hi - ln lo`
    /// for log scale).
    pub tolerance: f64,
    pub scale: Scale,
}

impl OptimizeSpec {
    pub const DEFAULT_TOLERANCE: f64 = 1e-6;

    pub fn new(axis: Axis, lo: f64, hi: f64) -> Self {
        Self {
            axis,
            lo,
            hi,
            tolerance: Self::DEFAULT_TOLERANCE,
            scale: Scale::Linear,
        }
    }

    pub fn log(mut self) -> Self {
        self.scale = Scale::Log;
        self
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |why: &str| Err(SweepError::InvalidRange(format!("optimize over {}: {why}", self.axis)));
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return bad("need finite lo < hi");
        }
        if self.scale == Scale::Log && self.lo <= 0.0 {
            return bad("log scale needs lo > 0");
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad("tolerance must lie in (0, 1)");
        }
        Ok(())
    }

    fn to_u(&self, x: f64) -> f64 {
        match self.scale {
            Scale::Linear => x,
            Scale::Log => x.ln(),
        }
    }

    fn from_u(&self, u: f64) -> f64 {
        match self.scale {
            Scale::Linear => u,
            Scale::Log => u.exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub argmin: f64,
    pub value: f64,
    pub evaluations: usize,
}

/// Minimizes `f` on `[spec.lo, spec.hi]`.
///
/// A uniform grid first brackets the minimum; if the best grid point is an
/// endpoint there is no interior minimum and [`SweepError::BracketFailure`]
/// is returned. Golden-section search then shrinks the bracket below
/// `spec.tolerance` of the full interval.
pub fn minimize_scalar(f: impl Fn(f64) -> Result<f64, SweepError>, spec: &OptimizeSpec) -> Result<Minimum, SweepError> {
    spec.validate()?;
    let (u_lo, u_hi) = (spec.to_u(spec.lo), spec.to_u(spec.hi));
    let mut evaluations = 0;
    let mut eval = |u: f64| -> Result<f64, SweepError> {
        evaluations += 1;
        // the grid ends map back exactly, avoiding exp(ln(x)) drift
        let x = if u == u_lo {
            spec.lo
        } else if u == u_hi {
            spec.hi
        } else {
            spec.from_u(u)
        };
        let y = f(x)?;
        if y.is_nan() {
            return Err(SweepError::NonFinite);
        }
        Ok(y)
    };

    let last = (BRACKET_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..BRACKET_POINTS)
        .map(|i| match i {
            0 => u_lo,
            i if i == BRACKET_POINTS - 1 => u_hi,
            i => u_lo + (u_hi - u_lo) * i as f64 / last,
        })
        .collect();
    let values = grid.iter().map(|&u| eval(u)).collect::<Result<Vec<_>, _>>()?;
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v < values[b] { i } else { b });
    if best == 0 || best == BRACKET_POINTS - 1 {
        return Err(SweepError::BracketFailure {
            lo: spec.lo,
            hi: spec.hi,
            at: spec.from_u(grid[best]),
        });
    }

    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let width = spec.tolerance * (u_hi - u_lo);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c)?;
    let mut fd = eval(d)?;
    while b - a > width {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }

    // never report worse than the grid point that seeded the bracket
    let (mut u_best, mut f_best) = (grid[best], values[best]);
    for (u, v) in [(c, fc), (d, fd)] {
        if v < f_best {
            u_best = u;
            f_best = v;
        }
    }
    Ok(Minimum {
        argmin: spec.from_u(u_best),
        value: f_best,
        evaluations,
    })
}
