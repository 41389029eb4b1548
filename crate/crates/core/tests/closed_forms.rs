use endomass::pushforward::rearrange;
use endomass::sklar::{kernel_to_real, kernel_to_unit, max_prob_no_early_default};
use endomass::{
    achieved_mass, max_endograph_mass, max_graph_mass_monotone, min_endograph_mass, optimal_map,
    CdfKernel, LinkFunction, Marginal, MeasurePreservingMap, UnitFunction,
};

/// `1 + min_y (y - F(y))` and `max_y (y - F(y-))` from `n` midpoint samples of `T`,
/// with `F` the empirical distribution of the sorted samples. Accurate to about `1/n`
/// plus the modulus of continuity of `T` at scale `1/n`.
fn brute_extremes(t: &UnitFunction, n: usize) -> (f64, f64) {
    let mut v: Vec<f64> = (0..n).map(|i| t.evaluate((i as f64 + 0.5) / n as f64).unwrap()).collect();
    v.sort_by(f64::total_cmp);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (k, &y) in v.iter().enumerate() {
        // F jumps from k/n to (k+1)/n at y
        lo = lo.min(y - (k + 1) as f64 / n as f64);
        hi = hi.max(y - k as f64 / n as f64);
    }
    (1.0 + lo.min(0.0), hi.max(0.0))
}

fn exp_ratio_formula(theta: f64) -> f64 {
    1.0 + theta.powf(1.0 / (1.0 - theta)) - theta.powf(theta / (1.0 - theta))
}

#[test]
fn exp_ratio_matches_closed_form() {
    assert!((max_endograph_mass(&UnitFunction::exp_ratio(0.5).unwrap()).mbar - 0.75).abs() <= 1e-9);
    assert_eq!(max_endograph_mass(&UnitFunction::exp_ratio(2.0).unwrap()).mbar, 1.0);
    for k in 1..=20 {
        let theta = k as f64 / 21.0;
        let r = max_endograph_mass(&UnitFunction::exp_ratio(theta).unwrap());
        assert!((r.mbar - exp_ratio_formula(theta)).abs() <= 1e-9, "theta={theta}");
    }
}

#[test]
fn agrees_with_sorted_samples() {
    let cases = [
        UnitFunction::exp_ratio(0.3).unwrap(),
        UnitFunction::exp_ratio(3.0).unwrap(),
        UnitFunction::parabola(),
        UnitFunction::ex_gegen(4).unwrap(),
        UnitFunction::power(0.4).unwrap(),
        UnitFunction::piecewise_linear(&[(0.0, 0.9), (0.2, 0.1), (0.7, 0.6), (1.0, 0.0)]).unwrap(),
        UnitFunction::exp_ratio(0.6).unwrap().reflect(),
        UnitFunction::parabola().shift_down(0.2),
    ];
    for t in &cases {
        let (mbar, mlow) = brute_extremes(t, 400_000);
        let r = max_endograph_mass(t);
        assert!((r.mbar - mbar).abs() <= 1e-4, "{t:?}: {} vs {mbar}", r.mbar);
        assert!((r.mlow - mlow).abs() <= 1e-4, "{t:?}: {} vs {mlow}", r.mlow);
    }
}

#[test]
fn ex_gegen_family() {
    for n in [2, 10, 50] {
        let t = UnitFunction::ex_gegen(n).unwrap();
        assert!((max_endograph_mass(&t).mbar - 0.75).abs() <= 1e-6, "n={n}");
    }
    let g: Vec<f64> = [10, 50, 200]
        .iter()
        .map(|&n| max_graph_mass_monotone(&UnitFunction::ex_gegen(n).unwrap()).unwrap())
        .collect();
    assert!(g[0] > g[1] && g[1] > g[2] && g[2] <= 0.6, "{g:?}");
}

#[test]
fn graph_mass_equals_endograph_mass_for_exp_ratio() {
    for theta in [0.25, 0.5, 0.75] {
        let t = UnitFunction::exp_ratio(theta).unwrap();
        let g = max_graph_mass_monotone(&t).unwrap();
        assert!((g - max_endograph_mass(&t).mbar).abs() <= 1e-6, "theta={theta}");
    }
}

#[test]
fn parabola_scenario() {
    let t = UnitFunction::parabola();
    let r = min_endograph_mass(&t);
    assert!((r.mbar - 0.75).abs() <= 1e-9 && r.mlow.abs() <= 1e-9);
    let re = rearrange(&t);
    for k in 0..1000 {
        let x = (k as f64 + 0.5) / 1000.0;
        assert!((re.tstar.evaluate(x).unwrap() - x * x).abs() <= 1e-9);
        assert!((re.phi.apply(x) - (2.0 * x - 1.0).abs()).abs() <= 1e-9);
    }
    assert!((achieved_mass(&optimal_map(&t), &t).value - 0.75).abs() <= 1e-6);
    assert!(achieved_mass(&re.phi, &t).value.abs() <= 1e-6);
}

#[test]
fn exponential_defaults() {
    let e2 = Marginal::exponential(2.0).unwrap();
    let e1 = Marginal::exponential(1.0).unwrap();
    let opt = max_prob_no_early_default(&e2, &e1, &LinkFunction::Identity);
    assert!((opt.mbar() - 0.75).abs() <= 1e-9);
    let opt = max_prob_no_early_default(&e1, &e2, &LinkFunction::Identity);
    assert_eq!(opt.mbar(), 1.0);
}

#[test]
fn kernel_round_trip() {
    let e = Marginal::exponential(1.0).unwrap();
    let dep = CdfKernel::Deterministic(MeasurePreservingMap::rotation(0.3));
    let back = kernel_to_unit(&kernel_to_real(&dep, &e, &e).unwrap(), &e, &e).unwrap();
    let ind = CdfKernel::Independence;
    let back_ind = kernel_to_unit(&kernel_to_real(&ind, &e, &e).unwrap(), &e, &e).unwrap();
    for i in 0..100 {
        for j in 0..100 {
            let (x, y) = ((i as f64 + 0.5) / 100.0, (j as f64 + 0.37) / 100.0);
            assert_eq!(back.cdf(x, y), dep.cdf(x, y));
            assert!((back_ind.cdf(x, y) - y).abs() <= 1e-9);
        }
    }
}
