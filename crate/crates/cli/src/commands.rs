use endomass::oracle::{max_bracket, mc_estimate, min_bracket, CellWeights, McEstimate};
use endomass::pushforward::rearrange;
use endomass::{
    achieved_mass, epsilon_min_map, max_endograph_mass, min_endograph_mass, optimal_map,
    EndographReport, MeasurePreservingMap, UnitFunction,
};
use serde_json::json;

use crate::config::{FigureG, ScenarioConfig};
use crate::report::{csv_number, Report};
use crate::CliError;

/// Slack for comparing a formula value against an oracle bracket.
const BRACKET_TOL: f64 = 1e-9;

/// What a command produced: the file contents and whether its checks passed.
#[derive(Debug)]
pub struct Output {
    pub contents: String,
    pub passed: bool,
}

impl Output {
    fn ok(contents: String) -> Self {
        Output { contents, passed: true }
    }
}

fn header(cfg: &ScenarioConfig, command: &str, t: &UnitFunction) -> Report {
    let mut r = Report::new();
    r.set("command", command);
    r.set("config", cfg);
    r.set("seed", cfg.seed);
    r.set("version", env!("CARGO_PKG_VERSION"));
    r.set("transform", t);
    r
}

fn checked(r: EndographReport) -> Result<EndographReport, CliError> {
    let values = [r.mbar, r.mlow, r.argmin_x, r.argmax_x, r.error_bound];
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Numerical(format!("non-finite result: {r:?}")));
    }
    Ok(r)
}

fn formula(report: &mut Report, r: &EndographReport) {
    report.set("mbar", r.mbar);
    report.set("mlow", r.mlow);
    report.set("argmin_x", r.argmin_x);
    report.set("argmax_x", r.argmax_x);
    report.set("method", r.method.to_string());
    report.set("error_bound", r.error_bound);
}

fn mc_block(m: &McEstimate, target: f64, tol: f64) -> (serde_json::Value, bool) {
    let consistent = (m.estimate - target).abs() <= m.ci_halfwidth + tol;
    let block = json!({
        "estimate": m.estimate,
        "ci": [m.estimate - m.ci_halfwidth, m.estimate + m.ci_halfwidth],
        "ci_halfwidth": m.ci_halfwidth,
        "n": m.n,
        "seed": m.seed,
        "consistent": consistent,
    });
    (block, consistent)
}

pub fn cmd_max(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let t = cfg.unit_function()?;
    let r = checked(max_endograph_mass(&t))?;
    let h = optimal_map(&t);
    let mut report = header(cfg, "max", &t);
    formula(&mut report, &r);
    report.set("attained", achieved_mass(&h, &t));
    if cfg.include_map {
        report.set("map", &h);
    }
    Ok(Output::ok(report.to_json()))
}

pub fn cmd_min(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let t = cfg.unit_function()?;
    let r = checked(min_endograph_mass(&t))?;
    let g = epsilon_min_map(&t, cfg.eps)?;
    // eps -> 0 limit of the eps-minimizers; it attains the infimum unless it ties with T
    // on a set of positive measure
    let limit = MeasurePreservingMap::Composite { maps: vec![optimal_map(&t.reflect()), MeasurePreservingMap::Reflect] };
    let at_limit = achieved_mass(&limit, &t);
    let attained = at_limit.value <= r.mlow + at_limit.error_bound + r.error_bound + BRACKET_TOL;
    let mut report = header(cfg, "min", &t);
    formula(&mut report, &r);
    report.set("eps", cfg.eps);
    report.set("eps_mass", achieved_mass(&g, &t));
    report.set("attained", attained);
    let note = if attained {
        "limiting map reaches the infimum within the numerical error bound"
    } else {
        "infimum not attained by the limiting map; eps-minimizer reported"
    };
    report.set("notes", [note]);
    if cfg.include_map {
        report.set("eps_map", &g);
        if attained {
            report.set("map", &limit);
        }
    }
    Ok(Output::ok(report.to_json()))
}

pub fn cmd_defaults(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let (f, g, s) = cfg.marginals()?;
    let opt = endomass::sklar::max_prob_no_early_default(&f, &g, &s);
    let r = checked(opt.report)?;
    let mut report = header(cfg, "defaults", &opt.transform);
    formula(&mut report, &r);
    if let UnitFunction::ExpRatio { theta } = opt.transform {
        report.set("theta", theta);
    }
    report.set("attained", achieved_mass(&opt.map, &opt.transform));
    if cfg.include_map {
        report.set("map", &opt.map);
    }
    let mut passed = true;
    if cfg.samples > 0 {
        let m = mc_estimate(&f, &g, &s, &opt.map, cfg.samples, cfg.seed)?;
        let (block, ok) = mc_block(&m, r.mbar, r.error_bound);
        report.set("mc", block);
        passed = ok;
    }
    Ok(Output { contents: report.to_json(), passed })
}

pub fn cmd_oracle(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let t = cfg.unit_function()?;
    let r = checked(max_endograph_mass(&t))?;
    let w = CellWeights::new(&t, cfg.grid_n);
    let (hi, lo) = (max_bracket(&w), min_bracket(&w));
    let mut passed = hi.contains(r.mbar, r.error_bound + BRACKET_TOL) && lo.contains(r.mlow, r.error_bound + BRACKET_TOL);
    let mut report = header(cfg, "oracle", &t);
    formula(&mut report, &r);
    let mut notes = Vec::new();
    if !w.rigorous {
        notes.push("cell weights of a non-monotone pull-back are lower sums; the bracket is not rigorous");
    }
    if cfg.marginals.is_some() && cfg.samples > 0 {
        let (f, g, s) = cfg.marginals()?;
        let m = mc_estimate(&f, &g, &s, &optimal_map(&t), cfg.samples, cfg.seed)?;
        let (block, ok) = mc_block(&m, r.mbar, r.error_bound);
        report.set("mc", block);
        passed &= ok;
    }
    let verdict = if passed { "PASS" } else { "FAIL" };
    report.set(
        "oracle",
        json!({
            "lower": hi.lower,
            "upper": hi.upper,
            "min_lower": lo.lower,
            "min_upper": lo.upper,
            "n": hi.n,
            "rigorous": hi.rigorous,
            "verdict": verdict,
        }),
    );
    report.set("verdict", verdict);
    report.set("notes", notes);
    Ok(Output { contents: report.to_json(), passed })
}

/// CSV with columns `x, T, h[, g]` at the midpoints of `figure_points` equal cells.
pub fn cmd_figure(cfg: &ScenarioConfig) -> Result<Output, CliError> {
    let t = cfg.unit_function()?;
    let h = optimal_map(&t);
    let g = match cfg.figure_g {
        FigureG::None => None,
        FigureG::EpsMin => Some(epsilon_min_map(&t, cfg.eps)?),
        FigureG::Phi => Some(rearrange(&t).phi),
        FigureG::Auto => Some(rearrange(&t).phi).filter(|p| !p.is_identity()),
    };
    let n = cfg.figure_points;
    let mut out = String::with_capacity(n * 64);
    out.push_str(if g.is_some() { "x,T,h,g\n" } else { "x,T,h\n" });
    for i in 0..n {
        let x = (i as f64 + 0.5) / n as f64;
        let tx = t.evaluate(x)?;
        out.push_str(&format!("{},{},{}", csv_number(x), csv_number(tx), csv_number(h.apply(x))));
        if let Some(g) = &g {
            out.push(',');
            out.push_str(&csv_number(g.apply(x)));
        }
        out.push('\n');
    }
    Ok(Output::ok(out))
}
