//! Extremal copula mass of the endograph `{(x, y) : y <= T(x)}`.
//!
//! With `F` the distribution function of `T` under Lebesgue measure, the largest mass is
//! `1 + min_y (y - F(y))` and the smallest is `max_y (y - F(y-))`. The maximum is
//! attained by the completely dependent copula of `x -> phi(x) + mbar mod 1`, where `phi`
//! realizes the nondecreasing rearrangement of `T`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pushforward::{cdf_of, composite, rearrange, Cdf, MeasurePreservingMap, Method};
use crate::quadrature;
use crate::transform::{Curvature, Piece, UnitFunction};

const GOLDEN_TOL: f64 = 1e-12;
const ROOT_TOL: f64 = 1e-14;
/// Slack when comparing `h(x) <= T(x)`, so that exact ties survive rounding.
const TIE_SLACK: f64 = 1e-13;
const CANDIDATE_GRID: usize = 10_000;
const MASS_GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EndographReport {
    pub mbar: f64,
    pub mlow: f64,
    /// Minimizer of `y - F(y)`.
    pub argmin_x: f64,
    /// Maximizer of `y - F(y-)`.
    pub argmax_x: f64,
    pub method: Method,
    pub error_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneOptimum {
    pub mbar: f64,
    pub argmin_x: f64,
    pub rotation: MeasurePreservingMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassEstimate {
    pub value: f64,
    pub error_bound: f64,
    pub method: Method,
}

/// Largest mass any copula puts on the endograph of `T`. Both extremes are filled in.
pub fn max_endograph_mass(t: &UnitFunction) -> EndographReport {
    report_from_cdf(&cdf_of(t))
}

/// Smallest mass any copula puts on the endograph of `T`. Both extremes are filled in.
pub fn min_endograph_mass(t: &UnitFunction) -> EndographReport {
    report_from_cdf(&cdf_of(t))
}

pub(crate) fn report_from_cdf(cdf: &Cdf) -> EndographReport {
    let below = |y: f64| y - cdf.value(y);
    let below_open = |y: f64| y - cdf.left_limit(y);

    let mut candidates = cdf.breakpoints();
    if cdf.is_analytic() {
        candidates.extend((0..=CANDIDATE_GRID).map(|k| k as f64 / CANDIDATE_GRID as f64));
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
    }
    let (mut argmin, mut vmin) = (0.0, f64::INFINITY);
    let (mut argmax, mut vmax) = (0.0, f64::NEG_INFINITY);
    let (mut imin, mut imax) = (0, 0);
    for (i, &y) in candidates.iter().enumerate() {
        let a = below(y);
        if a < vmin {
            (argmin, vmin, imin) = (y, a, i);
        }
        let b = below_open(y);
        if b > vmax {
            (argmax, vmax, imax) = (y, b, i);
        }
    }
    if cdf.is_analytic() {
        let bracket = |i: usize| {
            (candidates[i.saturating_sub(1)], candidates[(i + 1).min(candidates.len() - 1)])
        };
        let (a, b) = bracket(imin);
        let (y, v) = golden_min(below, a, b);
        if v < vmin {
            (argmin, vmin) = (y, v);
        }
        let (a, b) = bracket(imax);
        let (y, v) = golden_min(|y| -below_open(y), a, b);
        if -v > vmax {
            (argmax, vmax) = (y, -v);
        }
    }
    EndographReport {
        mbar: (1.0 + vmin).clamp(0.0, 1.0),
        mlow: vmax.clamp(0.0, 1.0),
        argmin_x: argmin,
        argmax_x: argmax,
        method: cdf.method,
        error_bound: cdf.error_bound,
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`; returns the best point seen.
pub(crate) fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    const R: f64 = 0.618_033_988_749_894_8;
    let mut best = if f(a) <= f(b) { (a, f(a)) } else { (b, f(b)) };
    let mut c = b - R * (b - a);
    let mut d = a + R * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - R * (b - a);
            fc = f(c);
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + R * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// `1 + inf (T(x) - x)` for nondecreasing `T`, with the rotation attaining it.
pub fn monotone_max(t: &UnitFunction) -> Result<MonotoneOptimum> {
    if !t.is_nondecreasing() {
        return Err(Error::Contract("monotone_max requires a nondecreasing function".into()));
    }
    let (argmin, v) = match t.pieces() {
        Some(pieces) => pieces
            .iter()
            .map(piece_gap_min)
            .fold((0.0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc }),
        None => {
            let gap = |x: f64| t.eval(x) - x;
            let n = CANDIDATE_GRID;
            let k = (0..=n)
                .min_by(|&i, &j| gap(i as f64 / n as f64).total_cmp(&gap(j as f64 / n as f64)))
                .unwrap();
            let a = k.saturating_sub(1) as f64 / n as f64;
            let b = (k + 1).min(n) as f64 / n as f64;
            let grid_best = (k as f64 / n as f64, gap(k as f64 / n as f64));
            let refined = golden_min(gap, a, b);
            if refined.1 < grid_best.1 {
                refined
            } else {
                grid_best
            }
        }
    };
    let mbar = (1.0 + v).clamp(0.0, 1.0);
    Ok(MonotoneOptimum { mbar, argmin_x: argmin, rotation: MeasurePreservingMap::rotation(mbar) })
}

/// Infimum of `clamp(P(x)) - x` over a monotone piece, one-sided limits included.
fn piece_gap_min(p: &Piece) -> (f64, f64) {
    let gap = |x: f64| p.value(x).clamp(0.0, 1.0) - x;
    let mut xs = vec![p.lo];
    for level in [0.0, 1.0] {
        if let Some(x) = crossing(|x| p.value(x) - level, p.lo, p.hi) {
            xs.push(x);
        }
    }
    xs.push(p.hi);
    xs.sort_by(f64::total_cmp);
    let mut best = (p.lo, gap(p.lo));
    for w in xs.windows(2) {
        for (x, v) in [(w[0], gap(w[0])), (w[1], gap(w[1]))] {
            if v < best.1 {
                best = (x, v);
            }
        }
        if p.curvature() == Curvature::Convex && w[1] > w[0] {
            let c = golden_min(gap, w[0], w[1]);
            if c.1 < best.1 {
                best = c;
            }
        }
    }
    best
}

/// A sign change of `f` strictly inside `[a, b]`, by bisection.
pub(crate) fn crossing<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> Option<f64> {
    let (fa, fb) = (f(a), f(b));
    if !(fa * fb < 0.0) {
        return None;
    }
    let up = fa < 0.0;
    while b - a > ROOT_TOL {
        let m = 0.5 * (a + b);
        if (f(m) < 0.0) == up {
            a = m;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// A measure-preserving `h` with `lambda { h <= T }` equal to the maximal mass.
pub fn optimal_map(t: &UnitFunction) -> MeasurePreservingMap {
    let r = rearrange(t);
    let mbar = max_endograph_mass(&r.tstar).mbar;
    composite(vec![r.phi, MeasurePreservingMap::rotation(mbar)])
}

/// `lambda { x : h(x) <= T(x) }`, the mass the completely dependent copula of `h` puts
/// on the endograph.
pub fn achieved_mass(h: &MeasurePreservingMap, t: &UnitFunction) -> MassEstimate {
    let Some(pieces) = t.pieces() else {
        let n = MASS_GRID;
        let hits = (0..n)
            .filter(|&i| {
                let x = (i as f64 + 0.5) / n as f64;
                h.apply(x) <= t.eval(x)
            })
            .count();
        return MassEstimate {
            value: hits as f64 / n as f64,
            error_bound: 2.0 / n as f64,
            method: Method::Grid(n),
        };
    };
    let hp = h.affine_pieces();
    let mut breaks: Vec<f64> = hp.iter().map(|s| s.x0).chain(pieces.iter().map(|p| p.lo)).collect();
    breaks.push(1.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut total = 0.0;
    let mut cells = 0usize;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        cells += 1;
        let mid = 0.5 * (a + b);
        let s = &hp[hp.partition_point(|s| s.x1 <= mid).min(hp.len() - 1)];
        let p = &pieces[pieces.partition_point(|p| p.hi <= mid).min(pieces.len() - 1)];
        total += superlevel_length(|x| p.value(x) - s.line(x) + TIE_SLACK, p.curvature(), a, b);
    }
    MassEstimate {
        value: total.clamp(0.0, 1.0),
        error_bound: cells as f64 * 1e-12,
        method: Method::Exact,
    }
}

/// `lambda { x in [a, b] : d(x) >= 0 }` for `d` affine, convex or concave.
fn superlevel_length<F: Fn(f64) -> f64>(d: F, shape: Curvature, a: f64, b: f64) -> f64 {
    let (da, db) = (d(a), d(b));
    match shape {
        Curvature::Linear => match (da >= 0.0, db >= 0.0) {
            (true, true) => b - a,
            (false, false) => 0.0,
            _ => {
                let r = crossing(&d, a, b).unwrap_or(a);
                if da >= 0.0 {
                    r - a
                } else {
                    b - r
                }
            }
        },
        Curvature::Convex => {
            let (m, dm) = golden_min(&d, a, b);
            if dm >= 0.0 {
                return b - a;
            }
            let left = if da >= 0.0 { crossing(&d, a, m).unwrap_or(a) - a } else { 0.0 };
            let right = if db >= 0.0 { b - crossing(&d, m, b).unwrap_or(b) } else { 0.0 };
            left + right
        }
        Curvature::Concave => {
            let (m, neg) = golden_min(|x| -d(x), a, b);
            if -neg < 0.0 {
                return 0.0;
            }
            let lo = if da >= 0.0 { a } else { crossing(&d, a, m).unwrap_or(m) };
            let hi = if db >= 0.0 { b } else { crossing(&d, m, b).unwrap_or(m) };
            (hi - lo).max(0.0)
        }
    }
}

/// A measure-preserving map whose endograph mass is within `eps` of the minimum.
///
/// Built as `1 - g` with `g` optimal for `max(1 - T - eps/2, 0)`.
pub fn epsilon_min_map(t: &UnitFunction, eps: f64) -> Result<MeasurePreservingMap> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Invalid(format!("eps must lie in (0, 1), got {eps}")));
    }
    let shifted = t.reflect().shift_down(eps / 2.0);
    let g = optimal_map(&shifted);
    Ok(composite(vec![g, MeasurePreservingMap::Reflect]))
}

/// Largest copula mass of the graph of an increasing `T` whose distribution has a
/// density `f`: the integral of `min(1, 1/f(T(x)))`.
pub fn max_graph_mass_monotone(t: &UnitFunction) -> Result<f64> {
    if !t.is_nondecreasing() {
        return Err(Error::Contract("graph mass formula requires a nondecreasing function".into()));
    }
    if !cdf_of(t).jumps().is_empty() {
        return Err(Error::Contract("graph mass formula requires an atomless image distribution".into()));
    }
    if let Some(segs) = t.segments() {
        return Ok(segs
            .iter()
            .map(|s| {
                let len = s.x1 - s.x0;
                len * ((s.y1 - s.y0) / len).min(1.0)
            })
            .sum());
    }
    let mut breaks = vec![0.0, 1.0];
    match t {
        UnitFunction::ExpRatio { theta } if *theta != 1.0 => {
            breaks.push(1.0 - theta.powf(1.0 / (1.0 - theta)));
        }
        UnitFunction::Power { p } if *p != 1.0 => breaks.push(p.powf(-1.0 / (p - 1.0))),
        UnitFunction::ExGegen { n } => {
            breaks.extend([0.5, 0.75]);
            if *n > 1 {
                let n = *n as f64;
                breaks.push(0.5 + n.powf(-n / (n - 1.0)) / 4.0);
            }
        }
        _ => {}
    }
    if t.derivative(0.5).is_none() {
        return Err(Error::Contract(
            "graph mass formula needs a closed-form derivative of T".into(),
        ));
    }
    breaks.retain(|b| (0.0..=1.0).contains(b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let integrand = |x: f64| {
        let d = t.derivative(x).unwrap_or(f64::INFINITY);
        if d.is_nan() {
            1.0
        } else {
            d.min(1.0)
        }
    };
    quadrature::integrate(integrand, &breaks, 1e-8, 1_000_000)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed_form(theta: f64) -> f64 {
        if theta >= 1.0 {
            1.0
        } else {
            1.0 + theta.powf(1.0 / (1.0 - theta)) - theta.powf(theta / (1.0 - theta))
        }
    }

    #[test]
    fn max_examples() {
        let t = UnitFunction::exp_ratio(0.5).unwrap();
        assert!((max_endograph_mass(&t).mbar - 0.75).abs() < 1e-12);
        assert_eq!(max_endograph_mass(&UnitFunction::exp_ratio(2.0).unwrap()).mbar, 1.0);
        let q = UnitFunction::exp_ratio(0.25).unwrap();
        assert!((max_endograph_mass(&q).mbar - closed_form(0.25)).abs() < 1e-12);
        assert!((closed_form(0.25) - 0.52753).abs() < 1e-5);
        for n in [1, 2, 10, 50] {
            let r = max_endograph_mass(&UnitFunction::ex_gegen(n).unwrap());
            assert!((r.mbar - 0.75).abs() < 1e-12, "n={n}");
        }
        let c = UnitFunction::constant(0.3).unwrap();
        assert!((max_endograph_mass(&c).mbar - 0.3).abs() < 1e-15);
    }

    #[test]
    fn min_examples() {
        assert_eq!(min_endograph_mass(&UnitFunction::identity()).mlow, 0.0);
        assert!(min_endograph_mass(&UnitFunction::parabola()).mlow.abs() < 1e-15);
        let c = UnitFunction::constant(0.3).unwrap();
        assert!((min_endograph_mass(&c).mlow - 0.3).abs() < 1e-15);
    }

    #[test]
    fn report_is_self_consistent() {
        let t = UnitFunction::piecewise_linear(&[(0.0, 0.9), (0.4, 0.1), (1.0, 0.6)]).unwrap();
        let r = max_endograph_mass(&t);
        let f = cdf_of(&t);
        assert!((r.mbar - (1.0 + r.argmin_x - f.value(r.argmin_x))).abs() <= 1e-15);
        assert!(r.mlow <= r.mbar);
    }

    #[test]
    fn monotone_examples() {
        let m = monotone_max(&UnitFunction::exp_ratio(0.5).unwrap()).unwrap();
        assert!((m.mbar - 0.75).abs() < 1e-12);
        let m = monotone_max(&UnitFunction::identity()).unwrap();
        assert_eq!(m.mbar, 1.0);
        assert!(m.rotation.is_identity());
        let m = monotone_max(&UnitFunction::power(2.0).unwrap()).unwrap();
        assert!((m.mbar - 0.75).abs() < 1e-12);
        assert!(matches!(monotone_max(&UnitFunction::parabola()), Err(Error::Contract(_))));
    }

    #[test]
    fn optimal_map_examples() {
        let h = optimal_map(&UnitFunction::parabola());
        for k in 0..100 {
            let x = (k as f64 + 0.5) / 100.0;
            let want = ((2.0 * x - 1.0).abs() + 0.75) % 1.0;
            assert!((h.apply(x) - want).abs() < 1e-12);
        }
        assert!(optimal_map(&UnitFunction::identity()).is_identity());
        let g = UnitFunction::ex_gegen(10).unwrap();
        let m = achieved_mass(&optimal_map(&g), &g);
        assert!((m.value - 0.75).abs() < 1e-9);
    }

    #[test]
    fn achieved_mass_examples() {
        let t = UnitFunction::exp_ratio(0.5).unwrap();
        let m = achieved_mass(&MeasurePreservingMap::rotation(0.75), &t);
        assert!((m.value - 0.75).abs() < 1e-9);
        let id = UnitFunction::identity();
        assert_eq!(achieved_mass(&MeasurePreservingMap::identity(), &id).value, 1.0);
        let p = UnitFunction::parabola();
        let phi = rearrange(&p).phi;
        assert!(achieved_mass(&phi, &p).value < 1e-9);
    }

    #[test]
    fn epsilon_minimizers() {
        let id = UnitFunction::identity();
        let h = epsilon_min_map(&id, 0.01).unwrap();
        assert!(achieved_mass(&h, &id).value <= 0.01);
        let p = UnitFunction::parabola();
        assert!(achieved_mass(&epsilon_min_map(&p, 0.1).unwrap(), &p).value <= 0.1);
        let c = UnitFunction::constant(0.3).unwrap();
        assert!(achieved_mass(&epsilon_min_map(&c, 0.05).unwrap(), &c).value <= 0.35 + 1e-12);
        assert!(epsilon_min_map(&id, 0.0).is_err());
    }

    #[test]
    fn graph_mass_examples() {
        let t = UnitFunction::exp_ratio(0.5).unwrap();
        assert!((max_graph_mass_monotone(&t).unwrap() - 0.75).abs() < 1e-8);
        assert!((max_graph_mass_monotone(&UnitFunction::identity()).unwrap() - 1.0).abs() < 1e-15);
        let v: Vec<f64> = [10, 50, 200]
            .iter()
            .map(|&n| max_graph_mass_monotone(&UnitFunction::ex_gegen(n).unwrap()).unwrap())
            .collect();
        assert!(v[0] > 0.5 && v[0] < 0.75);
        assert!(v[0] > v[1] && v[1] > v[2] && v[2] > 0.5);
        let step = UnitFunction::step_uniform(vec![0.2, 0.7]).unwrap();
        assert!(matches!(max_graph_mass_monotone(&step), Err(Error::Contract(_))));
    }
}
