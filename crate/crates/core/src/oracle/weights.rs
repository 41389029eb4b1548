use crate::endograph::crossing;
use crate::quadrature;
use crate::transform::{Curvature, Piece, UnitFunction};

/// Per-cell weights of the endograph on an `n x n` grid. Row `i` is the x-cell
/// `[i/n, (i+1)/n]`, column `j` the y-cell `[j/n, (j+1)/n]`; matrices are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CellWeights {
    pub n: usize,
    /// Fraction of the cell's area lying below the graph of `T`.
    pub inner: Vec<f64>,
    /// 1 when the cell meets the endograph in positive measure (`ess sup T > j/n` on
    /// the row), else 0.
    pub outer: Vec<f64>,
    /// 1 when the cell lies inside the endograph (`ess inf T >= (j+1)/n` on the row).
    pub contained: Vec<f64>,
    /// False when some row range had to be estimated by sampling.
    pub rigorous: bool,
}

const SUBCELLS: usize = 32;
/// Areas within this distance of 0 or 1 are snapped, keeping integer instances exact.
const SNAP: f64 = 1e-12;

impl CellWeights {
    pub fn new(t: &UnitFunction, n: usize) -> Self {
        let pieces = t.pieces();
        let monotone = t.is_nondecreasing();
        let rows: Vec<(Vec<f64>, Vec<f64>, Vec<f64>, bool)> = {
            let row = |i: usize| row_weights(t, pieces.as_deref(), monotone, n, i);
            #[cfg(feature = "parallel")]
            {
                use rayon::prelude::*;
                (0..n).into_par_iter().map(row).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(row).collect()
            }
        };
        let mut w = CellWeights {
            n,
            inner: Vec::with_capacity(n * n),
            outer: Vec::with_capacity(n * n),
            contained: Vec::with_capacity(n * n),
            rigorous: true,
        };
        for (inner, outer, contained, rigorous) in rows {
            w.inner.extend(inner);
            w.outer.extend(outer);
            w.contained.extend(contained);
            w.rigorous &= rigorous;
        }
        w
    }

    pub fn inner_at(&self, i: usize, j: usize) -> f64 {
        self.inner[i * self.n + j]
    }
}

fn row_weights(
    t: &UnitFunction,
    pieces: Option<&[Piece]>,
    monotone: bool,
    n: usize,
    i: usize,
) -> (Vec<f64>, Vec<f64>, Vec<f64>, bool) {
    let nf = n as f64;
    let (a, b) = (i as f64 / nf, (i + 1) as f64 / nf);
    let range = t.range_on(a, b);
    let mut outer = vec![0.0; n];
    let mut contained = vec![0.0; n];
    let mut inner = vec![0.0; n];
    for j in 0..n {
        let (ylo, yhi) = (j as f64 / nf, (j + 1) as f64 / nf);
        if range.hi > ylo {
            outer[j] = 1.0;
        }
        if range.lo >= yhi {
            contained[j] = 1.0;
            inner[j] = 1.0;
        }
    }
    // columns the graph passes through
    let jlo = ((range.lo * nf).floor() as usize).min(n - 1);
    let jhi = ((range.hi * nf).ceil() as usize).min(n);
    let mut rigorous = range.rigorous;
    for j in jlo..jhi {
        if contained[j] == 1.0 {
            continue;
        }
        let area = match pieces {
            Some(pieces) => pieces
                .iter()
                .filter(|p| p.hi > a && p.lo < b)
                .map(|p| piece_area(p, a.max(p.lo), b.min(p.hi), n, j))
                .sum::<f64>()
                * nf,
            None => {
                // lower sum over sub-cells; a lower bound when T is nondecreasing
                rigorous &= monotone;
                (0..SUBCELLS)
                    .map(|s| {
                        let x = a + (b - a) * s as f64 / SUBCELLS as f64;
                        (nf * t.eval(x) - j as f64).clamp(0.0, 1.0)
                    })
                    .sum::<f64>()
                    / SUBCELLS as f64
            }
        };
        inner[j] = snap(area.min(outer[j]));
    }
    (inner, outer, contained, rigorous)
}

fn snap(v: f64) -> f64 {
    if v < SNAP {
        0.0
    } else if v > 1.0 - SNAP {
        1.0
    } else {
        v
    }
}

/// `integral over [a, b] of clamp(n P(x) - j, 0, 1) dx` for one piece.
fn piece_area(p: &Piece, a: f64, b: f64, n: usize, j: usize) -> f64 {
    let nf = n as f64;
    let level = |x: f64| nf * p.value(x) - j as f64;
    if b <= a {
        return 0.0;
    }
    if p.curvature() == Curvature::Linear {
        return clamped_linear_integral(level(a), level(b), b - a);
    }
    let mut xs = vec![a, b];
    if a < 0.5 && 0.5 < b {
        // the only non-monotone curve is the parabola, with its vertex at 1/2
        xs.push(0.5);
    }
    xs.sort_by(f64::total_cmp);
    let mut breaks = xs.clone();
    for w in xs.windows(2) {
        for target in [0.0, 1.0] {
            if let Some(x) = crossing(|x| level(x) - target, w[0], w[1]) {
                breaks.push(x);
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    quadrature::integrate(|x| level(x).clamp(0.0, 1.0), &breaks, 1e-13, 1_000_000).unwrap_or_else(|_| {
        // fall back to a plain midpoint sum; never hit for the closed-form curves
        let m = 4096;
        (0..m)
            .map(|k| level(a + (b - a) * (k as f64 + 0.5) / m as f64).clamp(0.0, 1.0))
            .sum::<f64>()
            * (b - a)
            / m as f64
    })
}

/// `integral of clamp(L, 0, 1)` over an interval of length `len` on which `L` runs
/// linearly from `l0` to `l1`.
fn clamped_linear_integral(l0: f64, l1: f64, len: f64) -> f64 {
    let anti = |s: f64| {
        if s <= 0.0 {
            0.0
        } else if s <= 1.0 {
            0.5 * s * s
        } else {
            s - 0.5
        }
    };
    if (l1 - l0).abs() < 1e-9 {
        return len * (0.5 * (l0 + l1)).clamp(0.0, 1.0);
    }
    len * (anti(l1) - anti(l0)) / (l1 - l0)
}
