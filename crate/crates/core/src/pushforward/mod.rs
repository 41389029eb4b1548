//! Push-forward of Lebesgue measure under `T`: its distribution function `F_T`, the
//! nondecreasing rearrangement `T*` and a measure-preserving `phi` with `T* . phi = T`.

mod cdf;
mod map;

pub use cdf::{Cdf, Method};
pub use map::{AffineSegment, MeasurePreservingMap};

use crate::transform::{Knot, Segment, UnitFunction};
use crate::DEFAULT_GRID;

/// `T*` and `phi` with `T* . phi = T` almost everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Rearrangement {
    pub tstar: UnitFunction,
    pub phi: MeasurePreservingMap,
    /// Largest `|T*(phi(x)) - T(x)|` over the validation grid, away from breakpoints.
    pub residual: f64,
    pub method: Method,
}

/// Distribution function of `lambda^T`.
pub fn cdf_of(t: &UnitFunction) -> Cdf {
    if let Some(segs) = t.segments() {
        return Cdf::from_nodes(cdf::nodes_of_segments(&segs), Method::Exact, 0.0);
    }
    if t.sublevel(0.5, true).is_some() {
        let bound = if uses_bisection(t) { 1e-12 } else { 0.0 };
        return Cdf { form: cdf::CdfForm::Analytic(t.clone()), method: Method::Exact, error_bound: bound };
    }
    cdf_of_grid(t, DEFAULT_GRID)
}

/// Empirical distribution of `T` at the midpoints of `n` equal cells, with the
/// heuristic bound `2/n`.
pub fn cdf_of_grid(t: &UnitFunction, n: usize) -> Cdf {
    let n = n.max(1);
    let mut values: Vec<f64> = (0..n).map(|i| t.eval((i as f64 + 0.5) / n as f64)).collect();
    values.sort_by(f64::total_cmp);
    let grid = UnitFunction::Gridded { values };
    let segs = grid.segments().unwrap();
    Cdf::from_nodes(cdf::nodes_of_segments(&segs), Method::Grid(n), 2.0 / n as f64)
}

fn uses_bisection(t: &UnitFunction) -> bool {
    match t {
        UnitFunction::Pullback { .. } => true,
        UnitFunction::Mapped { inner, .. } => uses_bisection(inner),
        _ => false,
    }
}

/// Nondecreasing rearrangement of `T` together with a map `phi` realizing it.
pub fn rearrange(t: &UnitFunction) -> Rearrangement {
    let (tstar, phi, method) = rearrange_parts(t);
    let residual = residual(t, &tstar, &phi, 10_000);
    Rearrangement { tstar, phi, residual, method }
}

fn rearrange_parts(t: &UnitFunction) -> (UnitFunction, MeasurePreservingMap, Method) {
    if let Some(segs) = t.segments() {
        let cdf = cdf_of(t);
        let nodes = cdf.nodes().expect("piecewise kinds have node distributions");
        return (tstar_from_nodes(nodes), phi_from_segments(&segs, nodes), Method::Exact);
    }
    match t {
        UnitFunction::Parabola => (
            UnitFunction::Power { p: 2.0 },
            MeasurePreservingMap::PiecewiseAffine {
                segments: vec![
                    AffineSegment { x0: 0.0, x1: 0.5, u0: 1.0, u1: 0.0 },
                    AffineSegment { x0: 0.5, x1: 1.0, u0: 0.0, u1: 1.0 },
                ],
            },
            Method::Exact,
        ),
        UnitFunction::Mapped { inner, scale, offset, flip } => {
            if *scale == 0.0 {
                return (t.clone(), MeasurePreservingMap::identity(), Method::Exact);
            }
            let (bstar, phi_b, method) = rearrange_parts(inner);
            let tstar = UnitFunction::Mapped {
                inner: Box::new(bstar),
                scale: *scale,
                offset: *offset,
                flip: *scale < 0.0,
            };
            let mut maps = Vec::new();
            if *flip {
                maps.push(MeasurePreservingMap::Reflect);
            }
            maps.push(phi_b);
            if *scale < 0.0 {
                maps.push(MeasurePreservingMap::Reflect);
            }
            (tstar, composite(maps), method)
        }
        _ if t.is_nondecreasing() => (t.clone(), MeasurePreservingMap::identity(), Method::Exact),
        _ => {
            let (tstar, phi, _) = rearrange_parts(&t.to_grid(DEFAULT_GRID));
            (tstar, phi, Method::Grid(DEFAULT_GRID))
        }
    }
}

/// Composite of `maps` with identities dropped and nesting flattened.
pub(crate) fn composite(maps: Vec<MeasurePreservingMap>) -> MeasurePreservingMap {
    let mut flat = Vec::new();
    for m in maps {
        match m {
            MeasurePreservingMap::Composite { maps } => flat.extend(maps),
            m if m.is_identity() => {}
            m => flat.push(m),
        }
    }
    match flat.len() {
        0 => MeasurePreservingMap::identity(),
        1 => flat.pop().unwrap(),
        _ => MeasurePreservingMap::Composite { maps: flat },
    }
}

/// Quasi-inverse of a node distribution, as a piecewise linear function.
fn tstar_from_nodes(nodes: &[Knot]) -> UnitFunction {
    // (u, y) points along the graph of F read sideways
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * nodes.len());
    for k in nodes {
        pts.push((k.left, k.x));
        pts.push((k.right, k.x));
    }
    let mut knots: Vec<Knot> = Vec::with_capacity(nodes.len());
    for (u, y) in pts {
        match knots.last_mut() {
            Some(last) if last.x == u => last.right = y,
            _ => knots.push(Knot { x: u, left: y, right: y }),
        }
    }
    knots[0].x = 0.0;
    let last = knots.last_mut().unwrap();
    if last.x < 1.0 {
        let y = last.right;
        knots.push(Knot::continuous(1.0, y));
    } else {
        // the quasi-inverse is left-continuous; at 1 there is no right side to follow
        last.right = last.left;
    }
    UnitFunction::PiecewiseLinear { knots }
}

/// `phi(x) = F(T(x))` off the level sets of positive measure; each such level set is
/// spread increasingly, cell by cell from the left, over `(F(c-), F(c)]`.
fn phi_from_segments(segs: &[Segment], nodes: &[Knot]) -> MeasurePreservingMap {
    let idx = |y: f64| nodes.partition_point(|k| k.x < y);
    let mut consumed = vec![0.0; nodes.len()];
    let mut out = Vec::with_capacity(segs.len());
    for s in segs {
        let len = s.x1 - s.x0;
        if s.y0 == s.y1 {
            let k = idx(s.y0);
            let base = nodes[k].left + consumed[k];
            consumed[k] += len;
            out.push(AffineSegment { x0: s.x0, x1: s.x1, u0: base, u1: (base + len).min(1.0) });
            continue;
        }
        let at = |y: f64| s.x0 + (y - s.y0) / (s.y1 - s.y0) * len;
        let (k0, k1) = (idx(s.y0), idx(s.y1));
        let mut pieces: Vec<AffineSegment> = Vec::new();
        if k0 < k1 {
            for k in k0..k1 {
                pieces.push(AffineSegment {
                    x0: at(nodes[k].x),
                    x1: at(nodes[k + 1].x),
                    u0: nodes[k].right,
                    u1: nodes[k + 1].left,
                });
            }
        } else {
            for k in (k1 + 1..=k0).rev() {
                pieces.push(AffineSegment {
                    x0: at(nodes[k].x),
                    x1: at(nodes[k - 1].x),
                    u0: nodes[k].left,
                    u1: nodes[k - 1].right,
                });
            }
        }
        // pin the ends to the segment so the pieces tile [0, 1] exactly
        if let Some(p) = pieces.first_mut() {
            p.x0 = s.x0;
        }
        if let Some(p) = pieces.last_mut() {
            p.x1 = s.x1;
        }
        out.extend(pieces.into_iter().filter(|p| p.x1 > p.x0));
    }
    for w in 1..out.len() {
        out[w].x0 = out[w - 1].x1;
    }
    MeasurePreservingMap::PiecewiseAffine { segments: out }
}

fn residual(t: &UnitFunction, tstar: &UnitFunction, phi: &MeasurePreservingMap, n: usize) -> f64 {
    let mut breaks: Vec<f64> = phi.affine_pieces().iter().map(|p| p.x0).collect();
    if let Some(pieces) = t.pieces() {
        breaks.extend(pieces.iter().map(|p| p.lo));
    }
    breaks.sort_by(f64::total_cmp);
    let margin = 5.0 / n as f64;
    let near = |x: f64| {
        let i = breaks.partition_point(|&b| b < x);
        (i < breaks.len() && breaks[i] - x < margin) || (i > 0 && x - breaks[i - 1] < margin)
    };
    (0..n)
        .map(|i| (i as f64 + 0.5) / n as f64)
        .filter(|&x| !near(x))
        .map(|x| (tstar.eval(phi.apply(x)) - t.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Kolmogorov-Smirnov distance between `{h((i - 1/2)/n)}` and the uniform law.
pub fn verify_measure_preserving(h: &MeasurePreservingMap, n: usize) -> f64 {
    let n = n.max(1);
    let mut v: Vec<f64> = (0..n).map(|i| h.apply((i as f64 + 0.5) / n as f64)).collect();
    v.sort_by(f64::total_cmp);
    let nf = n as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / nf - x).max(x - i as f64 / nf))
        .fold(0.0, f64::max)
}
