//! Independent checks of the closed-form extremes.
//!
//! On an `n x n` grid, any permutation `sigma` gives a copula spreading mass `1/n`
//! uniformly over the cells `(i, sigma(i))`; its endograph mass is a lower bound for the
//! maximum. Conversely every copula's cell masses form a doubly stochastic matrix, so an
//! assignment over the "cell meets the endograph" indicator bounds the maximum from
//! above. The minimum is bracketed the same way with the roles swapped.

mod hungarian;
mod weights;

pub use hungarian::{solve_max, solve_min};
pub use weights::CellWeights;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pushforward::MeasurePreservingMap;
use crate::sklar::{count_uniforms, LinkFunction, Marginal};
use crate::transform::UnitFunction;

pub const MIN_GRID: usize = 2;
pub const MAX_GRID: usize = 4096;
pub const MAX_EXHAUSTIVE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    /// False when cell weights were estimated by sampling.
    pub rigorous: bool,
}

impl Bracket {
    pub fn contains(&self, v: f64, tol: f64) -> bool {
        self.lower - tol <= v && v <= self.upper + tol
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridOptimum {
    pub max: f64,
    pub min: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub ci_halfwidth: f64,
    pub n: usize,
    pub seed: u64,
}

fn check_grid(n: usize) -> Result<()> {
    if !(MIN_GRID..=MAX_GRID).contains(&n) {
        return Err(Error::Config(format!("grid size must be in [{MIN_GRID}, {MAX_GRID}], got {n}")));
    }
    Ok(())
}

/// `(1/n) sum_i w[i, p[i]]`, summed in row order.
fn score(n: usize, w: &[f64], p: &[usize]) -> f64 {
    p.iter().enumerate().map(|(i, &j)| w[i * n + j]).sum::<f64>() / n as f64
}

/// Bracket around the largest endograph mass.
pub fn assignment_bounds(t: &UnitFunction, n: usize) -> Result<Bracket> {
    check_grid(n)?;
    Ok(max_bracket(&CellWeights::new(t, n)))
}

pub fn max_bracket(w: &CellWeights) -> Bracket {
    let n = w.n;
    let lower = score(n, &w.inner, &solve_max(n, &w.inner));
    let upper = score(n, &w.outer, &solve_max(n, &w.outer));
    Bracket { lower, upper, n, rigorous: w.rigorous }
}

/// Bracket around the smallest endograph mass.
pub fn min_assignment_bounds(t: &UnitFunction, n: usize) -> Result<Bracket> {
    check_grid(n)?;
    Ok(min_bracket(&CellWeights::new(t, n)))
}

pub fn min_bracket(w: &CellWeights) -> Bracket {
    let n = w.n;
    let lower = score(n, &w.contained, &solve_min(n, &w.contained));
    let upper = score(n, &w.inner, &solve_min(n, &w.inner));
    Bracket { lower, upper, n, rigorous: w.rigorous }
}

/// Exact grid optimum over all `n!` permutations, for a step function on `n` equal
/// cells with values on the `1/n` grid.
pub fn exhaustive_small(t: &UnitFunction, n: usize) -> Result<GridOptimum> {
    if n == 0 || n > MAX_EXHAUSTIVE {
        return Err(Error::Config(format!("exhaustive search needs 1 <= n <= {MAX_EXHAUSTIVE}, got {n}")));
    }
    let values: Vec<f64> = match t {
        UnitFunction::Gridded { values } if values.len() == n => values.clone(),
        UnitFunction::Step { cuts, values }
            if values.len() == n
                && cuts.iter().enumerate().all(|(i, &c)| (c - i as f64 / n as f64).abs() < 1e-12) =>
        {
            values.clone()
        }
        _ => return Err(Error::Invalid(format!("exhaustive search needs a step function on {n} equal cells"))),
    };
    if values.iter().any(|v| (v * n as f64 - (v * n as f64).round()).abs() > 1e-9) {
        return Err(Error::Invalid("exhaustive search needs values on the 1/n grid".into()));
    }
    let w = CellWeights::new(t, n);
    let (mut max, mut min) = (f64::NEG_INFINITY, f64::INFINITY);
    for p in (0..n).permutations(n) {
        let s = score(n, &w.inner, &p);
        max = max.max(s);
        min = min.min(s);
    }
    Ok(GridOptimum { max, min })
}

/// Monte Carlo estimate of `P(Y <= S(X))` for `(X, Y) = (F^-(U), G^-(h(U)))`, with a
/// three-sigma binomial half-width.
pub fn mc_estimate(
    f: &Marginal,
    g: &Marginal,
    s: &LinkFunction,
    h: &MeasurePreservingMap,
    n: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    let hits = count_uniforms(n, seed, |u| g.quantile(h.apply(u)) <= s.eval(f.quantile(u)));
    let p = hits as f64 / n as f64;
    Ok(McEstimate {
        estimate: p,
        ci_halfwidth: 3.0 * (p * (1.0 - p) / n as f64).sqrt(),
        n,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_range_is_enforced() {
        let t = UnitFunction::identity();
        assert!(matches!(assignment_bounds(&t, 1), Err(Error::Config(_))));
        assert!(matches!(assignment_bounds(&t, 4097), Err(Error::Config(_))));
        assert!(matches!(exhaustive_small(&t, 9), Err(Error::Config(_))));
    }

    #[test]
    fn identity_brackets() {
        let t = UnitFunction::identity();
        let b = assignment_bounds(&t, 64).unwrap();
        assert_eq!(b.upper, 1.0);
        assert!(b.contains(1.0, 0.0));
        let m = min_assignment_bounds(&t, 64).unwrap();
        assert_eq!(m.lower, 0.0);
    }

    #[test]
    fn constant_brackets() {
        let t = UnitFunction::constant(0.3).unwrap();
        let m = min_assignment_bounds(&t, 100).unwrap();
        assert!((m.lower - 0.3).abs() <= 0.01 && (m.upper - 0.3).abs() <= 0.01);
    }

    #[test]
    fn two_cell_step() {
        let t = UnitFunction::step_uniform(vec![0.5, 1.0]).unwrap();
        let e = exhaustive_small(&t, 2).unwrap();
        assert_eq!(e.max, 1.0);
        assert_eq!(assignment_bounds(&t, 2).unwrap().lower, e.max);
        let c = UnitFunction::step_uniform(vec![0.25; 4]).unwrap();
        let e = exhaustive_small(&c, 4).unwrap();
        assert_eq!(e.max, e.min);
    }

    #[test]
    fn exhaustive_rejects_off_grid_values() {
        let t = UnitFunction::step_uniform(vec![0.3, 1.0]).unwrap();
        assert!(matches!(exhaustive_small(&t, 2), Err(Error::Invalid(_))));
    }

    #[test]
    fn mc_trivial_case() {
        let u = Marginal::uniform(0.0, 1.0).unwrap();
        let r = mc_estimate(&u, &u, &LinkFunction::Identity, &MeasurePreservingMap::identity(), 10_000, 1)
            .unwrap();
        assert_eq!(r.estimate, 1.0);
        assert_eq!(r.ci_halfwidth, 0.0);
    }
}
