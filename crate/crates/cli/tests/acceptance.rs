//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use endomass::oracle::{assignment_bounds, exhaustive_small, mc_estimate, solve_max, solve_min, CellWeights};
use endomass::pushforward::rearrange;
use endomass::sklar::{kernel_to_real, kernel_to_unit};
use endomass::{
    achieved_mass, epsilon_min_map, max_endograph_mass, max_graph_mass_monotone, min_endograph_mass,
    monotone_max, optimal_map, CdfKernel, LinkFunction, Marginal, MeasurePreservingMap, Method, UnitFunction,
};
use endomass_cli::commands::cmd_min;
use endomass_cli::config::{ScenarioConfig, TransformSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn exp_ratio_formula(theta: f64) -> f64 {
    1.0 + theta.powf(1.0 / (1.0 - theta)) - theta.powf(theta / (1.0 - theta))
}

/// Piecewise linear on `k` equal cells, `k` in 1..=8, with uniform knot values.
fn random_pl(rng: &mut ChaCha8Rng) -> UnitFunction {
    let k = rng.gen_range(1..=8);
    let pts: Vec<(f64, f64)> = (0..=k).map(|i| (i as f64 / k as f64, rng.gen::<f64>())).collect();
    UnitFunction::piecewise_linear(&pts).unwrap()
}

fn random_monotone_pl(rng: &mut ChaCha8Rng) -> UnitFunction {
    let k = rng.gen_range(1..=8);
    let mut ys: Vec<f64> = (0..=k).map(|_| rng.gen()).collect();
    ys.sort_by(f64::total_cmp);
    let pts: Vec<(f64, f64)> = ys.iter().enumerate().map(|(i, &y)| (i as f64 / k as f64, y)).collect();
    UnitFunction::piecewise_linear(&pts).unwrap()
}

fn c1_exp_ratio() -> Outcome {
    let r = max_endograph_mass(&UnitFunction::exp_ratio(0.5).unwrap());
    ensure!(r.method == Method::Exact, "theta=1/2 took the {} path", r.method);
    ensure!((r.mbar - 0.75).abs() <= 1e-9, "theta=1/2: mbar={}", r.mbar);
    let r = max_endograph_mass(&UnitFunction::exp_ratio(2.0).unwrap());
    ensure!(r.mbar == 1.0, "theta=2: mbar={}", r.mbar);
    let mut worst = 0.0f64;
    for k in 1..=20 {
        let theta = k as f64 / 21.0;
        let m = max_endograph_mass(&UnitFunction::exp_ratio(theta).unwrap()).mbar;
        worst = worst.max((m - exp_ratio_formula(theta)).abs());
    }
    ensure!(worst <= 1e-9, "max deviation from closed form {worst:e}");
    Ok(format!("max deviation over 20 thetas {worst:.1e}"))
}

fn c2_graph_mass() -> Outcome {
    let mut worst = 0.0f64;
    for theta in [0.25, 0.5, 0.75] {
        let t = UnitFunction::exp_ratio(theta).unwrap();
        let g = max_graph_mass_monotone(&t).map_err(|e| e.to_string())?;
        worst = worst.max((g - max_endograph_mass(&t).mbar).abs());
    }
    ensure!(worst <= 1e-6, "graph vs endograph deviation {worst:e}");
    Ok(format!("max deviation {worst:.1e}"))
}

fn c3_ex_gegen() -> Outcome {
    for n in [2, 10, 50] {
        let m = max_endograph_mass(&UnitFunction::ex_gegen(n).unwrap()).mbar;
        ensure!((m - 0.75).abs() <= 1e-6, "n={n}: mbar={m}");
    }
    let mut g = Vec::new();
    for n in [10, 50, 200] {
        g.push(max_graph_mass_monotone(&UnitFunction::ex_gegen(n).unwrap()).map_err(|e| e.to_string())?);
    }
    ensure!(g[0] > g[1] && g[1] > g[2], "graph mass not decreasing: {g:?}");
    ensure!(g[2] <= 0.60, "graph mass at n=200 is {}", g[2]);
    Ok(format!("graph mass at n=10,50,200: {:.4}, {:.4}, {:.4}", g[0], g[1], g[2]))
}

fn c4_parabola() -> Outcome {
    let t = UnitFunction::parabola();
    let r = max_endograph_mass(&t);
    ensure!((r.mbar - 0.75).abs() <= 1e-9 && r.mlow.abs() <= 1e-9, "mbar={} mlow={}", r.mbar, r.mlow);
    let re = rearrange(&t);
    for k in 0..1000 {
        let x = (k as f64 + 0.5) / 1000.0;
        let ts = re.tstar.evaluate(x).map_err(|e| e.to_string())?;
        ensure!((ts - x * x).abs() <= 1e-9, "T*({x}) = {ts}");
        let p = re.phi.apply(x);
        ensure!((p - (2.0 * x - 1.0).abs()).abs() <= 1e-9, "phi({x}) = {p}");
    }
    let hi = achieved_mass(&optimal_map(&t), &t).value;
    let lo = achieved_mass(&re.phi, &t).value;
    ensure!((hi - 0.75).abs() <= 1e-6, "optimal map achieves {hi}");
    ensure!(lo.abs() <= 1e-6, "phi achieves {lo}");
    Ok(format!("achieved {hi:.9} / {lo:.1e}"))
}

fn c5_identity() -> Outcome {
    let t = UnitFunction::identity();
    let r = min_endograph_mass(&t);
    ensure!(r.mlow == 0.0, "mlow={}", r.mlow);
    let g = epsilon_min_map(&t, 0.01).map_err(|e| e.to_string())?;
    let m = achieved_mass(&g, &t).value;
    ensure!(m <= 0.01, "eps-minimizer achieves {m}");
    let cfg = ScenarioConfig { transform: Some(TransformSpec::Identity), ..Default::default() };
    let report: serde_json::Value =
        serde_json::from_str(&cmd_min(&cfg).map_err(|e| e.to_string())?.contents).unwrap();
    ensure!(report["attained"] == false, "report does not flag non-attainment");
    let note = report["notes"][0].as_str().unwrap_or_default();
    ensure!(note.contains("not attained"), "note: {note}");
    Ok(format!("eps-minimizer mass {m:.4}"))
}

fn c6_oracle() -> Outcome {
    // (transform, Lipschitz)
    let mut cases: Vec<(String, UnitFunction, bool)> = vec![
        ("identity".into(), UnitFunction::identity(), true),
        ("constant 0.3".into(), UnitFunction::constant(0.3).unwrap(), true),
        ("parabola".into(), UnitFunction::parabola(), true),
        ("power 2".into(), UnitFunction::power(2.0).unwrap(), true),
        ("power 0.5".into(), UnitFunction::power(0.5).unwrap(), false),
    ];
    for theta in [0.25, 0.5, 0.75] {
        cases.push((format!("exp_ratio {theta}"), UnitFunction::exp_ratio(theta).unwrap(), false));
    }
    cases.push(("exp_ratio 2".into(), UnitFunction::exp_ratio(2.0).unwrap(), true));
    for n in [2, 10, 50] {
        cases.push((format!("ex_gegen {n}"), UnitFunction::ex_gegen(n).unwrap(), false));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    for i in 0..50 {
        cases.push((format!("random pl #{i}"), random_pl(&mut rng), true));
    }
    let mut widest = 0.0f64;
    for (name, t, lipschitz) in &cases {
        let mbar = max_endograph_mass(t).mbar;
        let b = assignment_bounds(t, 256).map_err(|e| e.to_string())?;
        ensure!(b.contains(mbar, 1e-9), "{name}: {mbar} not in [{}, {}]", b.lower, b.upper);
        if *lipschitz {
            ensure!(b.width() <= 0.02, "{name}: bracket width {}", b.width());
            widest = widest.max(b.width());
        }
    }
    let mut checked = 0;
    for n in 1..=8 {
        for _ in 0..20 {
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=n) as f64 / n as f64).collect();
            let t = UnitFunction::step_uniform(values).unwrap();
            let e = exhaustive_small(&t, n).map_err(|e| e.to_string())?;
            let w = CellWeights::new(&t, n);
            let score = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| w.inner_at(i, j)).sum::<f64>() / n as f64;
            let (hmax, hmin) = (score(&solve_max(n, &w.inner)), score(&solve_min(n, &w.inner)));
            ensure!(hmax == e.max && hmin == e.min, "n={n}: hungarian {hmax}/{hmin} vs exhaustive {}/{}", e.max, e.min);
            checked += 1;
        }
    }
    Ok(format!("{} transforms bracketed, widest Lipschitz bracket {widest:.4}, {checked} exhaustive checks", cases.len()))
}

fn c7_monte_carlo() -> Outcome {
    let e2 = Marginal::exponential(2.0).unwrap();
    let e1 = Marginal::exponential(1.0).unwrap();
    let s = LinkFunction::Identity;
    let h = optimal_map(&endomass::sklar::unit_transform(&e2, &e1, &s));
    let one = mc_estimate(&e2, &e1, &s, &h, 1_000_000, 7).map_err(|e| e.to_string())?;
    ensure!((one.estimate - 0.75).abs() <= 0.003, "seed 7: estimate {}", one.estimate);
    let mut covered = 0;
    for seed in 0..100 {
        let m = mc_estimate(&e2, &e1, &s, &h, 1_000_000, seed).map_err(|e| e.to_string())?;
        covered += ((m.estimate - 0.75).abs() <= m.ci_halfwidth) as usize;
    }
    ensure!(covered >= 99, "0.75 inside the 3-sigma interval for {covered}/100 seeds");
    Ok(format!("estimate {:.5}, covered {covered}/100", one.estimate))
}

fn c8_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in 0..50 {
        let t = random_monotone_pl(&mut rng);
        let general = max_endograph_mass(&t).mbar;
        let mono = monotone_max(&t).map_err(|e| e.to_string())?.mbar;
        ensure!((general - mono).abs() <= 1e-9, "monotone-consistency #{i}: {general} vs {mono}");
    }
    for i in 0..50 {
        let k = 16;
        let a: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
        let mut b = a.clone();
        let changed = rng.gen_range(1..=k);
        for v in b.iter_mut().take(changed) {
            *v = rng.gen();
        }
        let (ta, tb) = (UnitFunction::step_uniform(a).unwrap(), UnitFunction::step_uniform(b).unwrap());
        let d = (max_endograph_mass(&ta).mbar - max_endograph_mass(&tb).mbar).abs();
        ensure!(d <= changed as f64 / k as f64 + 1e-12, "sensitivity #{i}: {d} > {changed}/{k}");
    }
    for i in 0..50 {
        let t = random_pl(&mut rng);
        let delta = rng.gen_range(0.0..0.5);
        let (before, after) = (max_endograph_mass(&t).mbar, max_endograph_mass(&t.shift_down(delta)).mbar);
        ensure!(after >= before - delta - 1e-12, "shift bound #{i}: {after} < {before} - {delta}");
    }
    for i in 0..50 {
        let t = random_pl(&mut rng);
        let s = min_endograph_mass(&t).mlow + max_endograph_mass(&t.reflect()).mbar;
        ensure!((s - 1.0).abs() <= 1e-9, "reflection duality #{i}: sum {s}");
    }
    for i in 0..50 {
        let t = random_pl(&mut rng);
        let mbar = max_endograph_mass(&t).mbar;
        let got = achieved_mass(&optimal_map(&t), &t).value;
        ensure!(got >= mbar - 1e-3, "attainment #{i}: {got} < {mbar}");
    }
    Ok("5 suites x 50 instances".into())
}

fn c9_kernels() -> Outcome {
    let e = Marginal::exponential(1.0).unwrap();
    let maps = [
        MeasurePreservingMap::identity(),
        MeasurePreservingMap::rotation(0.3),
        MeasurePreservingMap::Reflect,
        optimal_map(&UnitFunction::parabola()),
    ];
    let pts: Vec<(f64, f64)> =
        (0..100).flat_map(|i| (0..100).map(move |j| ((i as f64 + 0.5) / 100.0, (j as f64 + 0.25) / 100.0))).collect();
    for h in maps {
        let k = CdfKernel::Deterministic(h);
        let back = kernel_to_unit(&kernel_to_real(&k, &e, &e).unwrap(), &e, &e).unwrap();
        for &(x, y) in &pts {
            ensure!(back.cdf(x, y) == k.cdf(x, y), "deterministic kernel differs at ({x}, {y})");
        }
    }
    let k = CdfKernel::Independence;
    let back = kernel_to_unit(&kernel_to_real(&k, &e, &e).unwrap(), &e, &e).unwrap();
    let worst = pts.iter().map(|&(x, y)| (back.cdf(x, y) - k.cdf(x, y)).abs()).fold(0.0, f64::max);
    ensure!(worst <= 1e-9, "independence kernel deviation {worst:e}");
    Ok(format!("{} points, independence deviation {worst:.1e}", pts.len()))
}

fn run_cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_endomass")).args(args).output().map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Ok(String::from_utf8(out.stdout).unwrap())
}

/// Kolmogorov-Smirnov distance of a sample from the uniform distribution.
fn ks_uniform(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &u)| (u - i as f64 / n).abs().max(((i + 1) as f64 / n - u).abs()))
        .fold(0.0, f64::max)
}

fn c10_figures() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scenarios = [
        ("exp_ratio", r#"{"transform": {"kind": "exp_ratio", "theta": 0.5}}"#, false),
        ("ex_gegen", r#"{"transform": {"kind": "ex_gegen", "n_param": 10}}"#, false),
        ("parabola", r#"{"transform": {"kind": "parabola"}}"#, true),
    ];
    let mut summary = Vec::new();
    for (name, json, with_g) in scenarios {
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, json).unwrap();
        let cfg = path.to_str().unwrap();
        let report: serde_json::Value = serde_json::from_str(&run_cli(&["max", "--config", cfg])?).unwrap();
        let mbar = report["mbar"].as_f64().ok_or("report has no mbar")?;
        let csv = run_cli(&["figure", "--config", cfg])?;
        let mut lines = csv.lines();
        let header = lines.next().unwrap_or_default();
        ensure!(header == if with_g { "x,T,h,g" } else { "x,T,h" }, "{name}: header {header}");
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
        ensure!(rows.len() == 1000, "{name}: {} rows", rows.len());
        let ks = ks_uniform(rows.iter().map(|r| r[2]).collect());
        ensure!(ks <= 0.005, "{name}: KS of h column {ks}");
        if with_g {
            let ks_g = ks_uniform(rows.iter().map(|r| r[3]).collect());
            ensure!(ks_g <= 0.005, "{name}: KS of g column {ks_g}");
        }
        let below = rows.iter().filter(|r| r[2] <= r[1]).count() as f64 / rows.len() as f64;
        ensure!((below - mbar).abs() <= 0.005, "{name}: fraction {below} vs mbar {mbar}");
        summary.push(format!("{name} {below:.3}"));
    }
    Ok(summary.join(", "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 10] = [
        ("exponential lifetimes", c1_exp_ratio, Duration::from_secs(1)),
        ("graph vs endograph mass", c2_graph_mass, Duration::from_secs(1)),
        ("counterexample family", c3_ex_gegen, Duration::from_secs(5)),
        ("parabola scenario", c4_parabola, Duration::from_secs(1)),
        ("identity scenario", c5_identity, Duration::from_secs(1)),
        ("oracle bracketing", c6_oracle, Duration::from_secs(60)),
        ("monte carlo consistency", c7_monte_carlo, Duration::from_secs(30)),
        ("property suites", c8_properties, Duration::from_secs(30)),
        ("kernel round trip", c9_kernels, Duration::from_secs(5)),
        ("figure reproduction", c10_figures, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|msg| {
            if elapsed > *budget {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            } else {
                Ok(msg)
            }
        });
        match outcome {
            Ok(msg) => println!("PASS  {:>2} {name} ({elapsed:.2?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL  {:>2} {name} ({elapsed:.2?}): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
