use serde::Serialize;

/// A linear piece `u0 + (u1 - u0)(x - x0)/(x1 - x0)` on `[x0, x1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineSegment {
    pub x0: f64,
    pub x1: f64,
    pub u0: f64,
    pub u1: f64,
}

impl AffineSegment {
    /// Linear formula of the segment, extended beyond its ends.
    pub(crate) fn line(&self, x: f64) -> f64 {
        if self.x1 == self.x0 {
            return self.u0;
        }
        self.u0 + (self.u1 - self.u0) * (x - self.x0) / (self.x1 - self.x0)
    }

    fn slope(&self) -> f64 {
        (self.u1 - self.u0) / (self.x1 - self.x0)
    }

    /// `x` at which the line takes the value `u`.
    fn solve(&self, u: f64) -> f64 {
        self.x0 + (u - self.u0) / self.slope()
    }
}

/// A Lebesgue-measure-preserving map of the unit interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeasurePreservingMap {
    /// `x + z mod 1`.
    Rotation { z: f64 },
    /// `1 - x`.
    Reflect,
    /// The maps applied in order, first element first.
    Composite { maps: Vec<MeasurePreservingMap> },
    /// Affine on each segment; the segments partition `[0, 1]` in order.
    PiecewiseAffine { segments: Vec<AffineSegment> },
}

impl MeasurePreservingMap {
    pub fn identity() -> Self {
        MeasurePreservingMap::PiecewiseAffine {
            segments: vec![AffineSegment { x0: 0.0, x1: 1.0, u0: 0.0, u1: 1.0 }],
        }
    }

    pub fn rotation(z: f64) -> Self {
        MeasurePreservingMap::Rotation { z }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            MeasurePreservingMap::Rotation { z } => z.fract() == 0.0,
            MeasurePreservingMap::PiecewiseAffine { segments } => {
                segments.iter().all(|s| s.x0 == s.u0 && s.x1 == s.u1)
            }
            MeasurePreservingMap::Composite { maps } => maps.iter().all(|m| m.is_identity()),
            MeasurePreservingMap::Reflect => false,
        }
    }

    /// `h(x)`.
    pub fn apply(&self, x: f64) -> f64 {
        match self {
            MeasurePreservingMap::Rotation { z } => {
                let v = x + (z - z.floor());
                if v >= 1.0 {
                    v - 1.0
                } else {
                    v
                }
            }
            MeasurePreservingMap::Reflect => 1.0 - x,
            MeasurePreservingMap::Composite { maps } => maps.iter().fold(x, |v, m| m.apply(v)),
            MeasurePreservingMap::PiecewiseAffine { segments } => {
                let i = segments.partition_point(|s| s.x1 <= x).min(segments.len() - 1);
                segments[i].line(x).clamp(0.0, 1.0)
            }
        }
    }

    /// The map as a list of affine pieces covering `[0, 1]` in order.
    pub fn affine_pieces(&self) -> Vec<AffineSegment> {
        match self {
            MeasurePreservingMap::Rotation { z } => {
                let z = z - z.floor();
                if z == 0.0 {
                    return vec![AffineSegment { x0: 0.0, x1: 1.0, u0: 0.0, u1: 1.0 }];
                }
                vec![
                    AffineSegment { x0: 0.0, x1: 1.0 - z, u0: z, u1: 1.0 },
                    AffineSegment { x0: 1.0 - z, x1: 1.0, u0: 0.0, u1: z },
                ]
            }
            MeasurePreservingMap::Reflect => vec![AffineSegment { x0: 0.0, x1: 1.0, u0: 1.0, u1: 0.0 }],
            MeasurePreservingMap::PiecewiseAffine { segments } => segments.clone(),
            MeasurePreservingMap::Composite { maps } => {
                let mut acc = MeasurePreservingMap::identity().affine_pieces();
                for m in maps {
                    acc = compose(&acc, &m.affine_pieces());
                }
                acc
            }
        }
    }
}

/// Pieces of `outer . inner`.
fn compose(inner: &[AffineSegment], outer: &[AffineSegment]) -> Vec<AffineSegment> {
    let outer_at = |u: f64| outer.partition_point(|s| s.x1 <= u).min(outer.len() - 1);
    let mut out = Vec::with_capacity(inner.len() + outer.len());
    for a in inner {
        let (ulo, uhi) = (a.u0.min(a.u1), a.u0.max(a.u1));
        // x positions where the inner piece crosses a breakpoint of the outer map
        let mut xs = vec![a.x0];
        if ulo < uhi {
            let mut cross: Vec<f64> = outer
                .iter()
                .map(|s| s.x1)
                .filter(|&b| ulo < b && b < uhi)
                .map(|b| a.solve(b).clamp(a.x0, a.x1))
                .collect();
            if a.u1 < a.u0 {
                cross.reverse();
            }
            xs.extend(cross);
        }
        xs.push(a.x1);
        for w in xs.windows(2) {
            if w[1] <= w[0] {
                continue;
            }
            let mid = a.line(0.5 * (w[0] + w[1]));
            let b = &outer[outer_at(mid)];
            out.push(AffineSegment {
                x0: w[0],
                x1: w[1],
                u0: b.line(a.line(w[0])),
                u1: b.line(a.line(w[1])),
            });
        }
    }
    out
}
