//! Browser bindings. Every export returns a JSON string; errors come back as
//! `{"error": "..."}` so the page only has one shape to handle.

use endomass::oracle::{assignment_bounds, mc_estimate};
use endomass::sklar::{sample_coupling, unit_transform};
use endomass::{
    achieved_mass, max_endograph_mass, optimal_map, LinkFunction, Marginal, UnitFunction,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

const MAX_POINTS: usize = 20_000;
const MAX_ORACLE_GRID: usize = 512;
const MAX_SAMPLES: usize = 2_000_000;
const SCATTER_POINTS: usize = 1500;

fn transform(kind: &str, param: f64) -> endomass::Result<UnitFunction> {
    match kind {
        "exp_ratio" => UnitFunction::exp_ratio(param),
        "ex_gegen" => UnitFunction::ex_gegen(param.round().max(0.0) as u32),
        "power" => UnitFunction::power(param),
        "parabola" => Ok(UnitFunction::parabola()),
        "identity" => Ok(UnitFunction::identity()),
        "constant" => UnitFunction::constant(param),
        other => Err(endomass::Error::Invalid(format!("unknown transform kind {other:?}"))),
    }
}

fn render(r: endomass::Result<Value>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e.to_string() })).to_string()
}

/// `T`, the optimal map `h` and the extremes on `points` midpoints.
#[wasm_bindgen]
pub fn explore(kind: &str, param: f64, points: usize) -> String {
    render((|| {
        let t = transform(kind, param)?;
        let r = max_endograph_mass(&t);
        let h = optimal_map(&t);
        let n = points.clamp(2, MAX_POINTS);
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let ts = xs.iter().map(|&x| t.evaluate(x)).collect::<endomass::Result<Vec<_>>>()?;
        let hs: Vec<f64> = xs.iter().map(|&x| h.apply(x)).collect();
        Ok(json!({
            "mbar": r.mbar,
            "mlow": r.mlow,
            "argmin_x": r.argmin_x,
            "method": r.method.to_string(),
            "achieved": achieved_mass(&h, &t).value,
            "x": xs,
            "t": ts,
            "h": hs,
        }))
    })())
}

/// Assignment-oracle bracket on an `n x n` grid next to the formula value.
#[wasm_bindgen]
pub fn oracle_bracket(kind: &str, param: f64, n: usize) -> String {
    render((|| {
        let t = transform(kind, param)?;
        let b = assignment_bounds(&t, n.min(MAX_ORACLE_GRID))?;
        let mbar = max_endograph_mass(&t).mbar;
        Ok(json!({ "lower": b.lower, "upper": b.upper, "n": b.n, "mbar": mbar, "contains": b.contains(mbar, 1e-9) }))
    })())
}

/// `X ~ Exp(rate_x)`, `Y ~ Exp(rate_y)` coupled optimally for `P(Y <= X)`.
#[wasm_bindgen]
pub fn simulate_defaults(rate_x: f64, rate_y: f64, n: usize, seed: u64) -> String {
    render((|| {
        let f = Marginal::exponential(rate_x)?;
        let g = Marginal::exponential(rate_y)?;
        let s = LinkFunction::Identity;
        let t = unit_transform(&f, &g, &s);
        let h = optimal_map(&t);
        let n = n.clamp(1, MAX_SAMPLES);
        let m = mc_estimate(&f, &g, &s, &h, n, seed)?;
        let pairs = sample_coupling(&f, &g, &h, n.min(SCATTER_POINTS), seed);
        Ok(json!({
            "mbar": max_endograph_mass(&t).mbar,
            "estimate": m.estimate,
            "ci_halfwidth": m.ci_halfwidth,
            "pairs": pairs,
        }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn explore_exp_ratio() {
        let v = parse(&explore("exp_ratio", 0.5, 100));
        assert_eq!(v["mbar"], 0.75);
        assert_eq!(v["h"].as_array().unwrap().len(), 100);
    }

    #[test]
    fn errors_are_json() {
        let v = parse(&explore("nope", 0.0, 10));
        assert!(v["error"].as_str().unwrap().contains("nope"));
        assert!(parse(&simulate_defaults(-1.0, 1.0, 10, 0))["error"].is_string());
    }

    #[test]
    fn oracle_and_simulation() {
        assert_eq!(parse(&oracle_bracket("parabola", 0.0, 64))["contains"], true);
        let v = parse(&simulate_defaults(2.0, 1.0, 100_000, 1));
        assert!((v["estimate"].as_f64().unwrap() - 0.75).abs() < 0.01);
        assert_eq!(v["pairs"].as_array().unwrap().len(), 1500);
    }
}
