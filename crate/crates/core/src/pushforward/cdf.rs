use serde::Serialize;

use crate::transform::{bisect, Knot, UnitFunction};

/// How a distribution function (and quantities derived from it) was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exact,
    /// Built from the values of `T` at the midpoints of `n` equal cells.
    Grid(usize),
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Exact => write!(f, "exact"),
            Method::Grid(n) => write!(f, "grid({n})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum CdfForm {
    /// Piecewise linear between nodes; `left`/`right` are the one-sided values at each
    /// node, so atoms show up as `right > left`.
    Nodes(Vec<Knot>),
    /// `y -> lambda { T <= y }` evaluated in closed form (or by bisection for pull-backs).
    Analytic(UnitFunction),
}

/// Distribution function of the image of Lebesgue measure under `T`, on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cdf {
    pub(crate) form: CdfForm,
    pub method: Method,
    /// Guaranteed sup-norm accuracy (heuristic for the grid fallback on general `T`).
    pub error_bound: f64,
}

impl Cdf {
    pub(crate) fn from_nodes(nodes: Vec<Knot>, method: Method, error_bound: f64) -> Self {
        Cdf { form: CdfForm::Nodes(nodes), method, error_bound }
    }

    /// `F(y)`.
    pub fn value(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        if y >= 1.0 {
            return 1.0;
        }
        match &self.form {
            CdfForm::Nodes(nodes) => node_value(nodes, y),
            CdfForm::Analytic(t) => t.sublevel(y, true).unwrap_or(f64::NAN),
        }
    }

    /// `F(y-)`.
    pub fn left_limit(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        if y > 1.0 {
            return 1.0;
        }
        match &self.form {
            CdfForm::Nodes(nodes) => {
                let i = nodes.partition_point(|k| k.x < y);
                if i < nodes.len() && nodes[i].x == y {
                    nodes[i].left
                } else {
                    node_value(nodes, y)
                }
            }
            CdfForm::Analytic(t) => t.sublevel(y, false).unwrap_or(f64::NAN),
        }
    }

    /// `inf { y : F(y) >= q }`, ties on flat stretches resolving to the left end.
    pub fn quantile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        match &self.form {
            CdfForm::Nodes(nodes) => {
                if nodes[0].right >= q {
                    return 0.0;
                }
                for w in nodes.windows(2) {
                    let (a, b) = (&w[0], &w[1]);
                    if b.left >= q {
                        return a.x + (q - a.right) / (b.left - a.right) * (b.x - a.x);
                    }
                    if b.right >= q {
                        return b.x;
                    }
                }
                1.0
            }
            CdfForm::Analytic(t) => match t {
                UnitFunction::Parabola => q * q,
                UnitFunction::ExpRatio { .. } | UnitFunction::ExGegen { .. } | UnitFunction::Power { .. } => {
                    t.eval(q)
                }
                _ => {
                    if self.value(0.0) >= q {
                        return 0.0;
                    }
                    bisect(|y| self.value(y) >= q, 0.0, 1.0).1
                }
            },
        }
    }

    /// Atoms as `(level, mass)` pairs.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        match &self.form {
            CdfForm::Nodes(nodes) => nodes
                .iter()
                .filter(|k| k.right > k.left)
                .map(|k| (k.x, k.right - k.left))
                .collect(),
            CdfForm::Analytic(_) => self
                .breakpoints()
                .into_iter()
                .map(|y| (y, self.value(y) - self.left_limit(y)))
                .filter(|&(_, m)| m > 0.0)
                .collect(),
        }
    }

    /// Levels where `F` may fail to be smooth: nodes, atoms and kinks.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = match &self.form {
            CdfForm::Nodes(nodes) => nodes.iter().map(|k| k.x).collect(),
            CdfForm::Analytic(t) => {
                let mut v = t.cdf_breakpoints();
                v.extend([0.0, 1.0]);
                v
            }
        };
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    pub(crate) fn nodes(&self) -> Option<&[Knot]> {
        match &self.form {
            CdfForm::Nodes(nodes) => Some(nodes),
            CdfForm::Analytic(_) => None,
        }
    }

    pub(crate) fn is_analytic(&self) -> bool {
        matches!(self.form, CdfForm::Analytic(_))
    }
}

fn node_value(nodes: &[Knot], y: f64) -> f64 {
    let i = nodes.partition_point(|k| k.x <= y);
    if i == 0 {
        return nodes[0].right;
    }
    if i == nodes.len() {
        return nodes[i - 1].right;
    }
    let (a, b) = (&nodes[i - 1], &nodes[i]);
    if y == a.x {
        return a.right;
    }
    let s = (y - a.x) / (b.x - a.x);
    (a.right + (b.left - a.right) * s).clamp(a.right, b.left.max(a.right))
}

/// Distribution of `T` for piecewise linear / step / gridded `T`, by sweeping the
/// levels where segments start or stop contributing.
pub(crate) fn nodes_of_segments(segs: &[crate::transform::Segment]) -> Vec<Knot> {
    let mut levels: Vec<f64> = segs.iter().flat_map(|s| [s.y0, s.y1]).chain([0.0, 1.0]).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let idx = |y: f64| levels.partition_point(|&l| l < y);
    let m = levels.len();
    let mut atom = vec![0.0; m];
    let mut slope_delta = vec![0.0; m];
    for s in segs {
        let len = s.x1 - s.x0;
        if s.y0 == s.y1 {
            atom[idx(s.y0)] += len;
        } else {
            let (lo, hi) = (s.y0.min(s.y1), s.y0.max(s.y1));
            let slope = len / (hi - lo);
            slope_delta[idx(lo)] += slope;
            slope_delta[idx(hi)] -= slope;
        }
    }
    let mut out = Vec::with_capacity(m);
    let mut f = 0.0f64;
    let mut slope = 0.0;
    for k in 0..m {
        if k > 0 {
            f += slope * (levels[k] - levels[k - 1]);
        }
        let left = f.min(1.0);
        f += atom[k];
        let right = f.min(1.0);
        out.push(Knot { x: levels[k], left, right });
        slope += slope_delta[k];
    }
    // the total is 1 by construction; pin it against rounding drift
    let last = out.last_mut().unwrap();
    last.right = 1.0;
    last.left = last.left.min(1.0);
    for k in 1..out.len() {
        let prev = out[k - 1].right;
        let node = &mut out[k];
        node.left = node.left.max(prev);
        node.right = node.right.max(node.left);
    }
    out
}
