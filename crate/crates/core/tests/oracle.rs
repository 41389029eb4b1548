use endomass::oracle::{assignment_bounds, exhaustive_small, min_assignment_bounds, solve_max, solve_min, CellWeights};
use endomass::{max_endograph_mass, UnitFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn exhaustive_agrees_with_hungarian() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=8 {
        for _ in 0..10 {
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0..=n) as f64 / n as f64).collect();
            let t = UnitFunction::step_uniform(values).unwrap();
            let e = exhaustive_small(&t, n).unwrap();
            let w = CellWeights::new(&t, n);
            let score = |p: &[usize]| p.iter().enumerate().map(|(i, &j)| w.inner_at(i, j)).sum::<f64>() / n as f64;
            assert_eq!(score(&solve_max(n, &w.inner)), e.max);
            assert_eq!(score(&solve_min(n, &w.inner)), e.min);
        }
    }
}

#[test]
fn brackets_parametric_families() {
    let cases = [
        UnitFunction::identity(),
        UnitFunction::exp_ratio(0.5).unwrap(),
        UnitFunction::exp_ratio(2.0).unwrap(),
        UnitFunction::parabola(),
        UnitFunction::ex_gegen(10).unwrap(),
        UnitFunction::power(0.5).unwrap(),
    ];
    for t in &cases {
        let r = max_endograph_mass(t);
        let b = assignment_bounds(t, 128).unwrap();
        assert!(b.contains(r.mbar, 1e-9), "{t:?}: {} not in {b:?}", r.mbar);
        let m = min_assignment_bounds(t, 128).unwrap();
        assert!(m.contains(r.mlow, 1e-9), "{t:?}: {} not in {m:?}", r.mlow);
    }
}
