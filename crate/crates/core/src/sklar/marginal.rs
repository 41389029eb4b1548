use rand::distributions::Open01;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// A continuous distribution on the real line.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Marginal {
    Exponential { rate: f64 },
    Uniform { a: f64, b: f64 },
    /// Linear between `(x, p)` nodes with `x` strictly increasing and `p` running from 0
    /// up to 1.
    PiecewiseLinearCdf { nodes: Vec<(f64, f64)> },
    /// Sorted distinct sample; the distribution function interpolates linearly from 0 at
    /// the smallest to 1 at the largest point.
    EmpiricalContinuous { sample: Vec<f64> },
}

impl Marginal {
    pub fn exponential(rate: f64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Invalid(format!("exponential rate must be positive, got {rate}")));
        }
        Ok(Marginal::Exponential { rate })
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a < b && a.is_finite() && b.is_finite()) {
            return Err(Error::Invalid(format!("uniform needs a < b, got [{a}, {b}]")));
        }
        Ok(Marginal::Uniform { a, b })
    }

    pub fn piecewise_linear_cdf(nodes: Vec<(f64, f64)>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Invalid("piecewise linear cdf needs at least two nodes".into()));
        }
        if nodes.iter().any(|&(x, p)| !x.is_finite() || !(0.0..=1.0).contains(&p)) {
            return Err(Error::Invalid("piecewise linear cdf nodes must be finite with p in [0, 1]".into()));
        }
        if nodes.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            // equal x with different p would be an atom
            return Err(Error::Invalid("piecewise linear cdf needs strictly increasing x (no atoms)".into()));
        }
        if nodes.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(Error::Invalid("piecewise linear cdf must be nondecreasing".into()));
        }
        if nodes[0].1 != 0.0 || nodes[nodes.len() - 1].1 != 1.0 {
            return Err(Error::Invalid("piecewise linear cdf must run from 0 to 1".into()));
        }
        Ok(Marginal::PiecewiseLinearCdf { nodes })
    }

    pub fn empirical(mut sample: Vec<f64>) -> Result<Self> {
        if sample.len() < 2 || sample.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("empirical marginal needs at least two finite points".into()));
        }
        sample.sort_by(f64::total_cmp);
        if sample.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invalid("empirical marginal has repeated points (atoms)".into()));
        }
        Ok(Marginal::EmpiricalContinuous { sample })
    }

    /// `F(x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Marginal::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Marginal::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Marginal::PiecewiseLinearCdf { nodes } => {
                let i = nodes.partition_point(|n| n.0 <= x);
                if i == 0 {
                    return 0.0;
                }
                if i == nodes.len() {
                    return 1.0;
                }
                let ((x0, p0), (x1, p1)) = (nodes[i - 1], nodes[i]);
                p0 + (p1 - p0) * (x - x0) / (x1 - x0)
            }
            Marginal::EmpiricalContinuous { sample } => {
                let n = sample.len();
                let i = sample.partition_point(|&s| s <= x);
                if i == 0 {
                    return 0.0;
                }
                if i == n {
                    return 1.0;
                }
                let (x0, x1) = (sample[i - 1], sample[i]);
                ((i - 1) as f64 + (x - x0) / (x1 - x0)) / (n - 1) as f64
            }
        }
    }

    /// `F^-(q) = inf { x : F(x) >= q }`; `-inf` for `q <= 0`, and `+inf` above the
    /// support.
    pub fn quantile(&self, q: f64) -> f64 {
        if q <= 0.0 {
            return f64::NEG_INFINITY;
        }
        if q > 1.0 {
            return f64::INFINITY;
        }
        match self {
            Marginal::Exponential { rate } => {
                if q >= 1.0 {
                    f64::INFINITY
                } else {
                    -(-q).ln_1p() / rate
                }
            }
            Marginal::Uniform { a, b } => a + q * (b - a),
            Marginal::PiecewiseLinearCdf { nodes } => {
                let i = nodes.partition_point(|n| n.1 < q).min(nodes.len() - 1);
                let ((x0, p0), (x1, p1)) = (nodes[i - 1], nodes[i]);
                x0 + (q - p0) / (p1 - p0) * (x1 - x0)
            }
            Marginal::EmpiricalContinuous { sample } => {
                let t = q * (sample.len() - 1) as f64;
                let i = (t.ceil() as usize).clamp(1, sample.len() - 1);
                let frac = t - (i - 1) as f64;
                sample[i - 1] + frac * (sample[i] - sample[i - 1])
            }
        }
    }

    /// One draw `F^-(U)` with `U` uniform on the open interval.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.sample(Open01))
    }
}
