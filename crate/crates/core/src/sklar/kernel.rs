use crate::error::{Error, Result};
use crate::pushforward::MeasurePreservingMap;
use crate::sklar::Marginal;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Unit,
    Real,
}

/// A Markov kernel given through its conditional distribution functions
/// `(x, y) -> K(x, (-inf, y])`.
#[derive(Debug, Clone, PartialEq)]
pub enum CdfKernel {
    /// `K(x, .)` is the point mass at `h(x)` (unit scale).
    Deterministic(MeasurePreservingMap),
    /// `K(x, [0, y]) = y` (unit scale).
    Independence,
    /// `K(x, (-inf, y]) = base(F(x), [0, G(y)])`.
    ToReal { base: Box<CdfKernel>, f: Marginal, g: Marginal },
    /// `K(x, [0, y)) = base(F^-(x), (-inf, G^-(y)))`.
    ToUnit { base: Box<CdfKernel>, f: Marginal, g: Marginal },
}

impl CdfKernel {
    pub fn scale(&self) -> Scale {
        match self {
            CdfKernel::Deterministic(_) | CdfKernel::Independence | CdfKernel::ToUnit { .. } => Scale::Unit,
            CdfKernel::ToReal { .. } => Scale::Real,
        }
    }

    /// `K(x, (-inf, y])`.
    pub fn cdf(&self, x: f64, y: f64) -> f64 {
        match self {
            CdfKernel::Deterministic(h) => (h.apply(x) <= y) as u8 as f64,
            CdfKernel::Independence => y.clamp(0.0, 1.0),
            CdfKernel::ToReal { base, f, g } => base.cdf(f.cdf(x), g.cdf(y)),
            CdfKernel::ToUnit { base, f, g } => {
                if y < 0.0 {
                    0.0
                } else if y >= 1.0 {
                    1.0
                } else {
                    base.cdf(f.quantile(x), g.quantile(y))
                }
            }
        }
    }

    /// `K(x, (-inf, y))`.
    pub fn cdf_open(&self, x: f64, y: f64) -> f64 {
        match self {
            CdfKernel::Deterministic(h) => (h.apply(x) < y) as u8 as f64,
            CdfKernel::Independence => y.clamp(0.0, 1.0),
            CdfKernel::ToReal { base, f, g } => base.cdf_open(f.cdf(x), g.cdf(y)),
            CdfKernel::ToUnit { base, f, g } => {
                if y <= 0.0 {
                    0.0
                } else if y > 1.0 {
                    1.0
                } else {
                    base.cdf_open(f.quantile(x), g.quantile(y))
                }
            }
        }
    }
}

/// Kernel of `(X, Y)` with `X ~ F`, `Y ~ G` and copula kernel `k`.
pub fn kernel_to_real(k: &CdfKernel, f: &Marginal, g: &Marginal) -> Result<CdfKernel> {
    if k.scale() != Scale::Unit {
        return Err(Error::Contract("kernel_to_real expects a unit-scale kernel".into()));
    }
    Ok(CdfKernel::ToReal { base: Box::new(k.clone()), f: f.clone(), g: g.clone() })
}

/// Copula kernel of a real-scale kernel with marginals `F` and `G`.
pub fn kernel_to_unit(k: &CdfKernel, f: &Marginal, g: &Marginal) -> Result<CdfKernel> {
    if k.scale() != Scale::Real {
        return Err(Error::Contract("kernel_to_unit expects a real-scale kernel".into()));
    }
    Ok(CdfKernel::ToUnit { base: Box::new(k.clone()), f: f.clone(), g: g.clone() })
}
