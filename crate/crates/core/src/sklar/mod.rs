//! From unit-interval results to random variables with continuous marginals.
//!
//! For `X ~ F`, `Y ~ G` and a link `S`, the probability `P(Y <= S(X))` under a copula
//! equals the copula mass of the endograph of `T = G . S . F^-`.

mod kernel;
mod marginal;

pub use kernel::{kernel_to_real, kernel_to_unit, CdfKernel, Scale};
pub use marginal::Marginal;

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::endograph::{max_endograph_mass, optimal_map, EndographReport};
use crate::error::{Error, Result};
use crate::pushforward::MeasurePreservingMap;
use crate::transform::{Knot, UnitFunction};

/// Uniform draws are generated in chunks of this size; chunk `c` uses the ChaCha8 stream
/// `c` of the generator seeded with `seed`, so results do not depend on thread count.
pub const CHUNK: usize = 65_536;

/// A measurable map `S` of the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkFunction {
    Identity,
    Affine { slope: f64, intercept: f64 },
    /// Linear interpolation through `(breakpoints[i], values[i])`, constant outside.
    GriddedReal { breakpoints: Vec<f64>, values: Vec<f64> },
    /// `sum c_k x^k`.
    Polynomial { coefficients: Vec<f64> },
}

impl LinkFunction {
    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope.is_finite() && intercept.is_finite()) {
            return Err(Error::Invalid("affine link needs finite coefficients".into()));
        }
        Ok(LinkFunction::Affine { slope, intercept })
    }

    pub fn gridded(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::Invalid("gridded link needs matching, nonempty breakpoints and values".into()));
        }
        if breakpoints.iter().chain(&values).any(|v| !v.is_finite())
            || breakpoints.windows(2).any(|w| !(w[0] < w[1]))
        {
            return Err(Error::Invalid("gridded link needs finite, strictly increasing breakpoints".into()));
        }
        Ok(LinkFunction::GriddedReal { breakpoints, values })
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Invalid("polynomial link needs finite coefficients".into()));
        }
        Ok(LinkFunction::Polynomial { coefficients })
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            LinkFunction::Identity => x,
            LinkFunction::Affine { slope, intercept } => {
                if *slope == 0.0 {
                    *intercept
                } else {
                    slope * x + intercept
                }
            }
            LinkFunction::GriddedReal { breakpoints, values } => {
                let i = breakpoints.partition_point(|&b| b <= x);
                if i == 0 {
                    return values[0];
                }
                if i == breakpoints.len() {
                    return values[i - 1];
                }
                let (x0, x1) = (breakpoints[i - 1], breakpoints[i]);
                values[i - 1] + (values[i] - values[i - 1]) * (x - x0) / (x1 - x0)
            }
            LinkFunction::Polynomial { coefficients } => {
                coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
            }
        }
    }

    /// Conservative: `false` unless monotonicity is evident from the representation.
    pub fn is_nondecreasing(&self) -> bool {
        match self {
            LinkFunction::Identity => true,
            LinkFunction::Affine { slope, .. } => *slope >= 0.0,
            LinkFunction::GriddedReal { values, .. } => values.windows(2).all(|w| w[0] <= w[1]),
            LinkFunction::Polynomial { coefficients } => {
                coefficients.len() <= 1 || (coefficients.len() == 2 && coefficients[1] >= 0.0)
            }
        }
    }
}

/// `T = G . S . F^-` on `(0, 1)` with `T(0) = 0` and `T(1) = 1`.
///
/// Exponential/exponential with a linear link through the origin gives the closed form
/// `1 - (1 - x)^theta`; uniform/uniform with an affine link gives a piecewise linear map.
pub fn unit_transform(f: &Marginal, g: &Marginal, s: &LinkFunction) -> UnitFunction {
    let linear = match s {
        LinkFunction::Identity => Some((1.0, 0.0)),
        LinkFunction::Affine { slope, intercept } => Some((*slope, *intercept)),
        LinkFunction::Polynomial { coefficients } if coefficients.len() <= 2 => {
            Some((coefficients.get(1).copied().unwrap_or(0.0), coefficients[0]))
        }
        _ => None,
    };
    match (f, g, linear) {
        (Marginal::Exponential { rate: r1 }, Marginal::Exponential { rate: r2 }, Some((a, c))) if a > 0.0 && c == 0.0 => {
            UnitFunction::ExpRatio { theta: a * r2 / r1 }
        }
        (Marginal::Uniform { a: a1, b: b1 }, Marginal::Uniform { a: a2, b: b2 }, Some((s, c))) => {
            // T(x) = clamp(alpha + beta x)
            let beta = s * (b1 - a1) / (b2 - a2);
            let alpha = (s * a1 + c - a2) / (b2 - a2);
            clamped_line(alpha, beta)
        }
        _ => UnitFunction::pullback(f.clone(), g.clone(), s.clone()),
    }
}

/// `clamp(alpha + beta x, 0, 1)` on `[0, 1)` and 1 at `x = 1`.
fn clamped_line(alpha: f64, beta: f64) -> UnitFunction {
    let line = |x: f64| (alpha + beta * x).clamp(0.0, 1.0);
    let mut xs = vec![0.0];
    if beta != 0.0 {
        for level in [0.0, 1.0] {
            let x = (level - alpha) / beta;
            if x > 0.0 && x < 1.0 {
                xs.push(x);
            }
        }
    }
    xs.push(1.0);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut knots: Vec<Knot> = xs.iter().map(|&x| Knot::continuous(x, line(x))).collect();
    let last = knots.last_mut().unwrap();
    last.right = 1.0;
    UnitFunction::PiecewiseLinear { knots }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefaultsOptimum {
    pub transform: UnitFunction,
    pub report: EndographReport,
    /// Optimal map; `(F^-(U), G^-(h(U)))` maximizes `P(Y <= S(X))`.
    pub map: MeasurePreservingMap,
}

impl DefaultsOptimum {
    pub fn mbar(&self) -> f64 {
        self.report.mbar
    }

    pub fn mlow(&self) -> f64 {
        self.report.mlow
    }
}

/// Extremes of `P(Y <= S(X))` over all couplings of `F` and `G`.
pub fn max_prob_no_early_default(f: &Marginal, g: &Marginal, s: &LinkFunction) -> DefaultsOptimum {
    let transform = unit_transform(f, g, s);
    let report = max_endograph_mass(&transform);
    let map = optimal_map(&transform);
    DefaultsOptimum { transform, report, map }
}

/// `n` pairs `(F^-(U_i), G^-(h(U_i)))`, reproducible from `seed`.
pub fn sample_coupling(
    f: &Marginal,
    g: &Marginal,
    h: &MeasurePreservingMap,
    n: usize,
    seed: u64,
) -> Vec<(f64, f64)> {
    map_uniforms(n, seed, |u| (f.quantile(u), g.quantile(h.apply(u))))
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_len(n: usize, chunk: usize) -> usize {
    CHUNK.min(n - chunk * CHUNK)
}

/// `op` applied to `n` open-interval uniforms, in draw order.
pub(crate) fn map_uniforms<T, F>(n: usize, seed: u64, op: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let run = |c: usize| {
        let mut rng = chunk_rng(seed, c);
        (0..chunk_len(n, c)).map(|_| op(rng.sample(Open01))).collect::<Vec<T>>()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).collect::<Vec<_>>().into_iter().flatten().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).flat_map(run).collect()
    }
}

/// Number of the `n` uniforms (same stream as [`map_uniforms`]) satisfying `pred`.
pub(crate) fn count_uniforms<F>(n: usize, seed: u64, pred: F) -> usize
where
    F: Fn(f64) -> bool + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let run = |c: usize| {
        let mut rng = chunk_rng(seed, c);
        (0..chunk_len(n, c)).filter(|_| pred(rng.sample(Open01))).count()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..chunks).into_par_iter().map(run).sum()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..chunks).map(run).sum()
    }
}
