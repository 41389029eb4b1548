//! Measurable transformations of the unit interval.
//!
//! [`UnitFunction`] covers the piecewise families (piecewise linear with jumps, step,
//! gridded), a handful of closed-form families, value/domain reflections of those, and
//! the pull-back `G . S . F^-` of a link function through two continuous marginals.

use serde::Serialize;

use crate::error::{check_unit, Error, Result};
use crate::sklar::{LinkFunction, Marginal};


/// A breakpoint of a piecewise linear function. `left` is the limit from the left,
/// `right` the value at `x` (and, below `x = 1`, the limit from the right).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Knot {
    pub x: f64,
    pub left: f64,
    pub right: f64,
}

impl Knot {
    pub fn continuous(x: f64, y: f64) -> Self {
        Knot { x, left: y, right: y }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Monotonicity {
    NonDecreasing,
    /// Monotone between the listed breakpoints.
    PiecewiseMonotone(Vec<f64>),
    General,
}

/// A measurable map `[0, 1] -> [0, 1]`.
///
/// Build values through the validating constructors; the variants are public so that
/// callers can inspect a representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UnitFunction {
    /// Linear between knots; the first knot sits at 0 and the last at 1.
    PiecewiseLinear { knots: Vec<Knot> },
    /// Constant on `[cuts[i], cuts[i + 1])`, the last cell closed at 1.
    Step { cuts: Vec<f64>, values: Vec<f64> },
    /// `1 - (1 - x)^theta`.
    ExpRatio { theta: f64 },
    /// Increasing homeomorphism `x/2` on `[0, 1/2]`, `1/4 + (4x - 2)^(1/n) / 4` on
    /// `(1/2, 3/4)` and `2x - 1` on `[3/4, 1]`.
    ExGegen { n: u32 },
    /// `4 (x - 1/2)^2`.
    Parabola,
    /// `x^p`.
    Power { p: f64 },
    /// Constant on each of `values.len()` equal cells.
    Gridded { values: Vec<f64> },
    /// `clamp(scale * inner(x') + offset, 0, 1)` with `x' = 1 - x` when `flip` is set.
    /// `inner` is never itself `Mapped`.
    Mapped {
        inner: Box<UnitFunction>,
        scale: f64,
        offset: f64,
        flip: bool,
    },
    /// `G(S(F^-(x)))` on `(0, 1)`, with `T(0) = 0` and `T(1) = 1`.
    Pullback {
        f: Marginal,
        g: Marginal,
        link: LinkFunction,
    },
}

/// One linear (possibly constant) segment of a piecewise linear or step function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Segment {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Segment {
    pub fn at(&self, x: f64) -> f64 {
        if self.x1 == self.x0 {
            return self.y0;
        }
        let s = ((x - self.x0) / (self.x1 - self.x0)).clamp(0.0, 1.0);
        self.y0 + (self.y1 - self.y0) * s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Curvature {
    Linear,
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Curve {
    Segment(Segment),
    ExpRatio(f64),
    Power(f64),
    Parabola,
    GegenMiddle(u32),
}

impl Curve {
    fn eval(self, x: f64) -> f64 {
        match self {
            Curve::Segment(s) => s.at(x),
            Curve::ExpRatio(theta) => 1.0 - (1.0 - x).max(0.0).powf(theta),
            Curve::Power(p) => x.max(0.0).powf(p),
            Curve::Parabola => 4.0 * (x - 0.5) * (x - 0.5),
            Curve::GegenMiddle(n) => 0.25 + 0.25 * (4.0 * x - 2.0).max(0.0).powf(1.0 / n as f64),
        }
    }

    fn curvature(self) -> Curvature {
        match self {
            Curve::Segment(_) => Curvature::Linear,
            Curve::ExpRatio(1.0) => Curvature::Linear,
            Curve::ExpRatio(t) if t < 1.0 => Curvature::Convex,
            Curve::ExpRatio(_) => Curvature::Concave,
            Curve::Power(1.0) => Curvature::Linear,
            Curve::Power(p) if p > 1.0 => Curvature::Convex,
            Curve::Power(_) => Curvature::Concave,
            Curve::Parabola => Curvature::Convex,
            Curve::GegenMiddle(1) => Curvature::Linear,
            Curve::GegenMiddle(_) => Curvature::Concave,
        }
    }
}

/// A piece of a function on `[lo, hi]` on which the function agrees (up to clamping to
/// `[0, 1]`) with a closed-form curve that is affine, convex or concave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub lo: f64,
    pub hi: f64,
    curve: Curve,
    scale: f64,
    offset: f64,
    flip: bool,
}

impl Piece {
    fn plain(lo: f64, hi: f64, curve: Curve) -> Self {
        Piece { lo, hi, curve, scale: 1.0, offset: 0.0, flip: false }
    }

    /// Unclamped value of the piece's curve.
    pub fn value(&self, x: f64) -> f64 {
        let t = if self.flip { 1.0 - x } else { x };
        self.scale * self.curve.eval(t) + self.offset
    }

    pub fn curvature(&self) -> Curvature {
        match (self.curve.curvature(), self.scale < 0.0) {
            (Curvature::Linear, _) => Curvature::Linear,
            (c, false) => c,
            (Curvature::Convex, true) => Curvature::Concave,
            (Curvature::Concave, true) => Curvature::Convex,
        }
    }

    /// Bounds of the unclamped value over `[a, b]`, assumed inside the piece.
    fn range_on(&self, a: f64, b: f64) -> (f64, f64) {
        let mut lo = self.value(a).min(self.value(b));
        let mut hi = self.value(a).max(self.value(b));
        if self.curve == Curve::Parabola {
            // the vertex sits at 1/2 with or without the domain flip
            if a < 0.5 && 0.5 < b {
                let v = self.value(0.5);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        (lo, hi)
    }
}

/// Lower and upper bound of a function over an interval, with a flag telling whether the
/// bounds are guaranteed or were estimated by sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct RangeBound {
    pub lo: f64,
    pub hi: f64,
    pub rigorous: bool,
}

fn check_values(what: &str, values: &[f64]) -> Result<()> {
    for &v in values {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Invalid(format!("{what} value {v} is outside [0, 1]")));
        }
    }
    Ok(())
}

fn check_partition(what: &str, xs: &[f64]) -> Result<()> {
    if xs.len() < 2 || xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
        return Err(Error::Invalid(format!("{what} must start at 0 and end at 1")));
    }
    if xs.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Invalid(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

impl UnitFunction {
    pub fn piecewise_linear(points: &[(f64, f64)]) -> Result<Self> {
        Self::piecewise_linear_knots(points.iter().map(|&(x, y)| Knot::continuous(x, y)).collect())
    }

    pub fn piecewise_linear_knots(knots: Vec<Knot>) -> Result<Self> {
        let xs: Vec<f64> = knots.iter().map(|k| k.x).collect();
        check_partition("piecewise linear knots", &xs)?;
        let ys: Vec<f64> = knots.iter().flat_map(|k| [k.left, k.right]).collect();
        check_values("piecewise linear", &ys)?;
        Ok(UnitFunction::PiecewiseLinear { knots })
    }

    pub fn step(cuts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_partition("step cuts", &cuts)?;
        if values.len() + 1 != cuts.len() {
            return Err(Error::Invalid(format!(
                "step function has {} cuts but {} values",
                cuts.len(),
                values.len()
            )));
        }
        check_values("step", &values)?;
        Ok(UnitFunction::Step { cuts, values })
    }

    /// Step function on `values.len()` equal cells.
    pub fn step_uniform(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("step function needs at least one value".into()));
        }
        let n = values.len();
        let cuts = (0..=n).map(|i| i as f64 / n as f64).collect();
        Self::step(cuts, values)
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::step(vec![0.0, 1.0], vec![c])
    }

    pub fn identity() -> Self {
        UnitFunction::PiecewiseLinear {
            knots: vec![Knot::continuous(0.0, 0.0), Knot::continuous(1.0, 1.0)],
        }
    }

    pub fn exp_ratio(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Invalid(format!("exp_ratio needs theta > 0, got {theta}")));
        }
        Ok(UnitFunction::ExpRatio { theta })
    }

    pub fn ex_gegen(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("ex_gegen needs n >= 1".into()));
        }
        Ok(UnitFunction::ExGegen { n })
    }

    pub fn parabola() -> Self {
        UnitFunction::Parabola
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::Invalid(format!("power needs p > 0, got {p}")));
        }
        Ok(UnitFunction::Power { p })
    }

    pub fn gridded(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Invalid("gridded function needs at least one value".into()));
        }
        check_values("gridded", &values)?;
        Ok(UnitFunction::Gridded { values })
    }

    pub(crate) fn pullback(f: Marginal, g: Marginal, link: LinkFunction) -> Self {
        UnitFunction::Pullback { f, g, link }
    }

    /// `T(x)`, with a domain check.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        check_unit("x", x)?;
        Ok(self.eval(x))
    }

    /// `T(x)` for `x` already known to be in `[0, 1]`.
    pub(crate) fn eval(&self, x: f64) -> f64 {
        match self {
            UnitFunction::PiecewiseLinear { knots } => {
                let i = knots.partition_point(|k| k.x <= x);
                if i == 0 {
                    return knots[0].right;
                }
                if i == knots.len() {
                    return knots[i - 1].right;
                }
                let (a, b) = (&knots[i - 1], &knots[i]);
                if x == a.x {
                    return a.right;
                }
                Segment { x0: a.x, x1: b.x, y0: a.right, y1: b.left }.at(x)
            }
            UnitFunction::Step { cuts, values } => {
                let i = cuts.partition_point(|&c| c <= x).saturating_sub(1);
                values[i.min(values.len() - 1)]
            }
            UnitFunction::Gridded { values } => values[grid_cell(x, values.len())],
            UnitFunction::ExpRatio { theta } => Curve::ExpRatio(*theta).eval(x),
            UnitFunction::Power { p } => Curve::Power(*p).eval(x),
            UnitFunction::Parabola => Curve::Parabola.eval(x),
            UnitFunction::ExGegen { n } => {
                if x <= 0.5 {
                    x / 2.0
                } else if x < 0.75 {
                    Curve::GegenMiddle(*n).eval(x)
                } else {
                    2.0 * x - 1.0
                }
            }
            UnitFunction::Mapped { inner, scale, offset, flip } => {
                let t = if *flip { 1.0 - x } else { x };
                (scale * inner.eval(t) + offset).clamp(0.0, 1.0)
            }
            UnitFunction::Pullback { f, g, link } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    g.cdf(link.eval(f.quantile(x))).clamp(0.0, 1.0)
                }
            }
        }
    }

    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            UnitFunction::PiecewiseLinear { knots } => {
                let mut seq = Vec::with_capacity(2 * knots.len());
                for (i, k) in knots.iter().enumerate() {
                    if i > 0 {
                        seq.push(k.left);
                    }
                    seq.push(k.right);
                }
                if seq.windows(2).all(|w| w[0] <= w[1]) {
                    Monotonicity::NonDecreasing
                } else {
                    Monotonicity::PiecewiseMonotone(
                        knots[1..knots.len() - 1].iter().map(|k| k.x).collect(),
                    )
                }
            }
            UnitFunction::Step { cuts, values } => {
                if values.windows(2).all(|w| w[0] <= w[1]) {
                    Monotonicity::NonDecreasing
                } else {
                    Monotonicity::PiecewiseMonotone(cuts[1..cuts.len() - 1].to_vec())
                }
            }
            UnitFunction::Gridded { values } => {
                if values.windows(2).all(|w| w[0] <= w[1]) {
                    Monotonicity::NonDecreasing
                } else {
                    let n = values.len();
                    Monotonicity::PiecewiseMonotone((1..n).map(|i| i as f64 / n as f64).collect())
                }
            }
            UnitFunction::ExpRatio { .. } | UnitFunction::ExGegen { .. } | UnitFunction::Power { .. } => {
                Monotonicity::NonDecreasing
            }
            UnitFunction::Parabola => Monotonicity::PiecewiseMonotone(vec![0.5]),
            UnitFunction::Mapped { inner, scale, flip, .. } => {
                if *scale == 0.0 {
                    return Monotonicity::NonDecreasing;
                }
                match inner.monotonicity() {
                    Monotonicity::NonDecreasing if (*scale > 0.0) != *flip => {
                        Monotonicity::NonDecreasing
                    }
                    Monotonicity::NonDecreasing => Monotonicity::PiecewiseMonotone(vec![]),
                    Monotonicity::PiecewiseMonotone(bs) => Monotonicity::PiecewiseMonotone(if *flip {
                        bs.iter().rev().map(|b| 1.0 - b).collect()
                    } else {
                        bs
                    }),
                    Monotonicity::General => Monotonicity::General,
                }
            }
            UnitFunction::Pullback { link, .. } => {
                if link.is_nondecreasing() {
                    Monotonicity::NonDecreasing
                } else {
                    Monotonicity::General
                }
            }
        }
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.monotonicity() == Monotonicity::NonDecreasing
    }

    /// `inf { x : T(x) >= q }`, or 1 when no such `x` exists. Requires `T` nondecreasing.
    pub fn quasi_inverse(&self, q: f64) -> Result<f64> {
        check_unit("q", q)?;
        if !self.is_nondecreasing() {
            return Err(Error::Contract("quasi-inverse requires a nondecreasing function".into()));
        }
        Ok(match self {
            UnitFunction::ExpRatio { theta } => 1.0 - (1.0 - q).powf(1.0 / theta),
            UnitFunction::Power { p } => q.powf(1.0 / p),
            UnitFunction::ExGegen { n } => {
                if q <= 0.25 {
                    2.0 * q
                } else if q <= 0.5 {
                    0.5 + (4.0 * q - 1.0).powi(*n as i32) / 4.0
                } else {
                    (q + 1.0) / 2.0
                }
            }
            UnitFunction::PiecewiseLinear { knots } => {
                if knots[0].right >= q {
                    return Ok(0.0);
                }
                for w in knots.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    if b.left >= q {
                        // a.right < q <= b.left on an increasing segment
                        return Ok(a.x + (q - a.right) / (b.left - a.right) * (b.x - a.x));
                    }
                    if b.x < 1.0 && b.right >= q {
                        return Ok(b.x);
                    }
                }
                1.0
            }
            UnitFunction::Step { cuts, values } => values
                .iter()
                .position(|&v| v >= q)
                .map_or(1.0, |i| cuts[i]),
            UnitFunction::Gridded { values } => values
                .iter()
                .position(|&v| v >= q)
                .map_or(1.0, |i| i as f64 / values.len() as f64),
            _ => {
                if self.eval(0.0) >= q {
                    return Ok(0.0);
                }
                if self.eval(1.0) < q {
                    return Ok(1.0);
                }
                bisect(|x| self.eval(x) >= q, 0.0, 1.0).1
            }
        })
    }

    /// `x -> 1 - T(x)`. Piecewise kinds stay in their class; other kinds are wrapped.
    pub fn reflect(&self) -> UnitFunction {
        match self {
            UnitFunction::PiecewiseLinear { knots } => UnitFunction::PiecewiseLinear {
                knots: knots
                    .iter()
                    .map(|k| Knot { x: k.x, left: 1.0 - k.left, right: 1.0 - k.right })
                    .collect(),
            },
            UnitFunction::Step { cuts, values } => UnitFunction::Step {
                cuts: cuts.clone(),
                values: values.iter().map(|v| 1.0 - v).collect(),
            },
            UnitFunction::Gridded { values } => UnitFunction::Gridded {
                values: values.iter().map(|v| 1.0 - v).collect(),
            },
            UnitFunction::Mapped { inner, scale, offset, flip } => {
                // 1 - clamp(w) == clamp(1 - w)
                let (scale, offset) = (-scale, 1.0 - offset);
                if scale == 1.0 && offset == 0.0 && !flip {
                    return (**inner).clone();
                }
                UnitFunction::Mapped { inner: inner.clone(), scale, offset, flip: *flip }
            }
            other => UnitFunction::Mapped {
                inner: Box::new(other.clone()),
                scale: -1.0,
                offset: 1.0,
                flip: false,
            },
        }
    }

    /// `x -> max(T(x) - delta, 0)` for `delta >= 0`.
    pub fn shift_down(&self, delta: f64) -> UnitFunction {
        let sub = |v: f64| (v - delta).max(0.0);
        match self {
            UnitFunction::PiecewiseLinear { knots } => shift_down_knots(knots, delta),
            UnitFunction::Step { cuts, values } => UnitFunction::Step {
                cuts: cuts.clone(),
                values: values.iter().map(|&v| sub(v)).collect(),
            },
            UnitFunction::Gridded { values } => UnitFunction::Gridded {
                values: values.iter().map(|&v| sub(v)).collect(),
            },
            UnitFunction::Mapped { inner, scale, offset, flip } => {
                // Composing offsets is exact while the upper clamp is inactive.
                if offset.max(scale + offset) <= 1.0 {
                    UnitFunction::Mapped {
                        inner: inner.clone(),
                        scale: *scale,
                        offset: offset - delta,
                        flip: *flip,
                    }
                } else {
                    self.to_grid(crate::DEFAULT_GRID).shift_down(delta)
                }
            }
            other => UnitFunction::Mapped {
                inner: Box::new(other.clone()),
                scale: 1.0,
                offset: -delta,
                flip: false,
            },
        }
    }

    /// `x -> T(1 - x)`. Piecewise kinds are reversed in place, which moves values at
    /// breakpoints only (a null set).
    pub fn flipped(&self) -> UnitFunction {
        match self {
            UnitFunction::PiecewiseLinear { knots } => {
                let mut knots: Vec<Knot> = knots
                    .iter()
                    .rev()
                    .map(|k| Knot { x: 1.0 - k.x, left: k.right, right: k.left })
                    .collect();
                let last = knots.last_mut().unwrap();
                last.right = last.left;
                UnitFunction::PiecewiseLinear { knots }
            }
            UnitFunction::Step { cuts, values } => UnitFunction::Step {
                cuts: cuts.iter().rev().map(|c| 1.0 - c).collect(),
                values: values.iter().rev().copied().collect(),
            },
            UnitFunction::Gridded { values } => UnitFunction::Gridded {
                values: values.iter().rev().copied().collect(),
            },
            UnitFunction::Mapped { inner, scale, offset, flip } => {
                if *scale == 1.0 && *offset == 0.0 && *flip {
                    return (**inner).clone();
                }
                UnitFunction::Mapped { inner: inner.clone(), scale: *scale, offset: *offset, flip: !flip }
            }
            other => UnitFunction::Mapped {
                inner: Box::new(other.clone()),
                scale: 1.0,
                offset: 0.0,
                flip: true,
            },
        }
    }

    /// Values at the midpoints of `n` equal cells.
    pub fn to_grid(&self, n: usize) -> UnitFunction {
        let n = n.max(1);
        UnitFunction::Gridded {
            values: (0..n).map(|i| self.eval((i as f64 + 0.5) / n as f64)).collect(),
        }
    }

    /// Linear segments covering `[0, 1]`, for the piecewise kinds.
    pub(crate) fn segments(&self) -> Option<Vec<Segment>> {
        match self {
            UnitFunction::PiecewiseLinear { knots } => Some(
                knots
                    .windows(2)
                    .map(|w| Segment { x0: w[0].x, x1: w[1].x, y0: w[0].right, y1: w[1].left })
                    .collect(),
            ),
            UnitFunction::Step { cuts, values } => Some(
                cuts.windows(2)
                    .zip(values)
                    .map(|(w, &v)| Segment { x0: w[0], x1: w[1], y0: v, y1: v })
                    .collect(),
            ),
            UnitFunction::Gridded { values } => {
                let n = values.len() as f64;
                Some(
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| Segment {
                            x0: i as f64 / n,
                            x1: (i + 1) as f64 / n,
                            y0: v,
                            y1: v,
                        })
                        .collect(),
                )
            }
            _ => None,
        }
    }

    /// Pieces with closed-form, affine/convex/concave curves, when available.
    pub(crate) fn pieces(&self) -> Option<Vec<Piece>> {
        if let Some(segs) = self.segments() {
            return Some(segs.into_iter().map(|s| Piece::plain(s.x0, s.x1, Curve::Segment(s))).collect());
        }
        match self {
            UnitFunction::ExpRatio { theta } => Some(vec![Piece::plain(0.0, 1.0, Curve::ExpRatio(*theta))]),
            UnitFunction::Power { p } => Some(vec![Piece::plain(0.0, 1.0, Curve::Power(*p))]),
            UnitFunction::Parabola => Some(vec![Piece::plain(0.0, 1.0, Curve::Parabola)]),
            UnitFunction::ExGegen { n } => Some(vec![
                Piece::plain(0.0, 0.5, Curve::Segment(Segment { x0: 0.0, x1: 0.5, y0: 0.0, y1: 0.25 })),
                Piece::plain(0.5, 0.75, Curve::GegenMiddle(*n)),
                Piece::plain(0.75, 1.0, Curve::Segment(Segment { x0: 0.75, x1: 1.0, y0: 0.5, y1: 1.0 })),
            ]),
            UnitFunction::Mapped { inner, scale, offset, flip } => {
                let mut out: Vec<Piece> = inner
                    .pieces()?
                    .into_iter()
                    .map(|p| Piece {
                        lo: if *flip { 1.0 - p.hi } else { p.lo },
                        hi: if *flip { 1.0 - p.lo } else { p.hi },
                        curve: p.curve,
                        scale: scale * p.scale,
                        offset: scale * p.offset + offset,
                        flip: p.flip != *flip,
                    })
                    .collect();
                if *flip {
                    out.reverse();
                }
                Some(out)
            }
            _ => None,
        }
    }

    /// Bounds of `T` over `[a, b]` ignoring null sets.
    pub(crate) fn range_on(&self, a: f64, b: f64) -> RangeBound {
        if let Some(pieces) = self.pieces() {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for p in pieces.iter().filter(|p| p.hi > a && p.lo < b) {
                let (l, h) = p.range_on(a.max(p.lo), b.min(p.hi));
                lo = lo.min(l);
                hi = hi.max(h);
            }
            if lo.is_finite() {
                return RangeBound { lo: lo.clamp(0.0, 1.0), hi: hi.clamp(0.0, 1.0), rigorous: true };
            }
            let v = self.eval(a);
            return RangeBound { lo: v, hi: v, rigorous: true };
        }
        if self.is_nondecreasing() {
            return RangeBound { lo: self.eval(a), hi: self.eval(b), rigorous: true };
        }
        let (lo, hi) = (0..=64)
            .map(|k| self.eval(a + (b - a) * k as f64 / 64.0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        RangeBound { lo, hi, rigorous: false }
    }

    /// `lambda { x : T(x) <= y }` (or `< y` when `inclusive` is false) for the analytic
    /// kinds; `None` for piecewise kinds and non-monotone pull-backs.
    pub(crate) fn sublevel(&self, y: f64, inclusive: bool) -> Option<f64> {
        if inclusive && y >= 1.0 || !inclusive && y > 1.0 {
            return Some(1.0);
        }
        if inclusive && y < 0.0 || !inclusive && y <= 0.0 {
            return Some(0.0);
        }
        match self {
            UnitFunction::ExpRatio { theta } => Some(1.0 - (1.0 - y).powf(1.0 / theta)),
            UnitFunction::Power { p } => Some(y.powf(1.0 / p)),
            UnitFunction::Parabola => Some(y.sqrt().min(1.0)),
            UnitFunction::ExGegen { n } => Some(if y <= 0.25 {
                2.0 * y
            } else if y < 0.5 {
                0.5 + (4.0 * y - 1.0).powi(*n as i32) / 4.0
            } else {
                (y + 1.0) / 2.0
            }),
            UnitFunction::Mapped { inner, scale, offset, .. } => {
                // For y in [0, 1): clamp(v) <= y iff v <= y; for y in (0, 1]: clamp(v) < y iff v < y.
                if *scale == 0.0 {
                    let v = offset.clamp(0.0, 1.0);
                    return Some(if inclusive { (v <= y) as u8 as f64 } else { (v < y) as u8 as f64 });
                }
                let level = (y - offset) / scale;
                if *scale > 0.0 {
                    inner.sublevel(level, inclusive)
                } else {
                    inner.sublevel(level, !inclusive).map(|m| 1.0 - m)
                }
            }
            UnitFunction::Pullback { .. } if self.is_nondecreasing() => {
                let hit = |x: f64| {
                    let v = self.eval(x);
                    if inclusive {
                        v <= y
                    } else {
                        v < y
                    }
                };
                Some(bisect(|x| !hit(x), 0.0, 1.0).0)
            }
            _ => None,
        }
    }

    /// Levels at which the analytic distribution function has kinks or atoms.
    pub(crate) fn cdf_breakpoints(&self) -> Vec<f64> {
        match self {
            UnitFunction::ExGegen { .. } => vec![0.25, 0.5],
            UnitFunction::Mapped { inner, scale, offset, .. } => inner
                .cdf_breakpoints()
                .into_iter()
                .map(|y| (scale * y + offset).clamp(0.0, 1.0))
                .chain([offset.clamp(0.0, 1.0), (scale + offset).clamp(0.0, 1.0)])
                .collect(),
            UnitFunction::Pullback { .. } => {
                // flat stretches of T are atoms of its distribution
                let n = 4096;
                let vals: Vec<f64> = (0..=n).map(|k| self.eval(k as f64 / n as f64)).collect();
                let mut out: Vec<f64> = vals.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
                out.dedup();
                out
            }
            _ => Vec::new(),
        }
    }

    /// Derivative of `T` for the kinds where it is available in closed form.
    pub(crate) fn derivative(&self, x: f64) -> Option<f64> {
        match self {
            UnitFunction::ExpRatio { theta } => Some(theta * (1.0 - x).powf(theta - 1.0)),
            UnitFunction::Power { p } => Some(p * x.powf(p - 1.0)),
            UnitFunction::ExGegen { n } => Some(if x <= 0.5 {
                0.5
            } else if x < 0.75 {
                let n = *n as f64;
                (4.0 * x - 2.0).powf(1.0 / n - 1.0) / n
            } else {
                2.0
            }),
            _ => None,
        }
    }
}

/// Shrinks `[lo, hi]`, with `pred(lo)` false and `pred(hi)` true, down to adjacent
/// floating-point numbers (well below the 1e-12 target tolerance).
pub(crate) fn bisect<F: Fn(f64) -> bool>(pred: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return (lo, hi);
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

pub(crate) fn grid_cell(x: f64, n: usize) -> usize {
    ((x * n as f64).floor() as usize).min(n - 1)
}

fn shift_down_knots(knots: &[Knot], delta: f64) -> UnitFunction {
    let sub = |v: f64| (v - delta).max(0.0);
    let mut out: Vec<Knot> = Vec::with_capacity(knots.len() + 4);
    for (i, k) in knots.iter().enumerate() {
        if i > 0 {
            let a = &knots[i - 1];
            // insert a knot where the segment crosses the level delta
            let (y0, y1) = (a.right, k.left);
            if (y0 - delta) * (y1 - delta) < 0.0 {
                let x = a.x + (delta - y0) / (y1 - y0) * (k.x - a.x);
                if x > a.x && x < k.x {
                    out.push(Knot::continuous(x, 0.0));
                }
            }
        }
        out.push(Knot { x: k.x, left: sub(k.left), right: sub(k.right) });
    }
    UnitFunction::PiecewiseLinear { knots: out }
}
