use dnls_trains::fixedpoint::{
    build_w_h, duhamel_apply, picard_solve, synthesize, xnorm, PairTrajectory, PicardOptions,
};
use dnls_trains::gauge::{relation_defect, GaugePair};
use dnls_trains::profiles::{scaled_family, EquationVariant, SolitonParams, TrainSpec};
use dnls_trains::spectral::{Field, Grid, C64, I};

fn family() -> TrainSpec {
    let s = scaled_family(EquationVariant::Dnls1, &[-1.0, -2.0], &[1.0, 1.0], 8.0, 0.0).unwrap();
    TrainSpec::new(EquationVariant::Dnls1, 0.0, s)
}

fn family_grid() -> Grid {
    Grid::centered(256.0, 2048, -84.0).unwrap()
}

fn single() -> (TrainSpec, Grid) {
    let p = SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0);
    (TrainSpec::new(p.variant, p.b, vec![p]), Grid::centered(80.0, 2048, 0.0).unwrap())
}

fn pair_l2(p: &GaugePair) -> f64 {
    p.first.l2_norm() + p.second.l2_norm()
}

/// Adaptive Simpson on a complex integrand.
fn simpson(f: &dyn Fn(f64) -> C64, a: f64, b: f64, tol: f64) -> C64 {
    fn rec(f: &dyn Fn(f64) -> C64, a: f64, b: f64, fa: C64, fm: C64, fb: C64, whole: C64, tol: f64, depth: u32) -> C64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        if depth == 0 || (left + right - whole).norm() <= 15.0 * tol {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

fn single_mode(grid: &Grid, times: &[f64], k: f64, g: impl Fn(f64) -> C64) -> PairTrajectory {
    let pairs = times
        .iter()
        .map(|&t| {
            let f = Field::from_fn(grid, t, |x| g(t) * C64::from_polar(1.0, k * x)).unwrap();
            GaugePair::new(f.clone(), f.scale(I), EquationVariant::Dnls1).unwrap()
        })
        .collect();
    PairTrajectory::new(times.to_vec(), pairs).unwrap()
}

#[test]
fn single_member_has_no_forcing_and_a_trivial_fixed_point() {
    let (spec, grid) = single();
    let times = PairTrajectory::nodes(0.0, 1.0, 0.25).unwrap();
    let (w, h) = build_w_h(&spec, &times, &grid).unwrap();
    assert!(h.pairs.iter().all(|p| pair_l2(p) == 0.0));
    for p in &w.pairs {
        assert!(relation_defect(p) < 1e-10, "defect {}", relation_defect(p));
    }

    let (eta, report) = picard_solve(&spec, &grid, 0.0, 1.0, 0.25, PicardOptions::default()).unwrap();
    assert_eq!(report.iterates, 1);
    assert!(report.ratios.is_empty());
    assert_eq!(report.final_defect, 0.0);
    assert_eq!(xnorm(&eta, 0.3), 0.0);
    let syn = synthesize(&spec, &eta).unwrap();
    assert!(syn.distance.iter().all(|d| *d <= 1e-10));
}

#[test]
fn profile_pair_satisfies_relation_and_weighted_forcing_is_bounded() {
    let spec = family();
    let grid = family_grid();
    let times = PairTrajectory::nodes(3.0, 9.0, 0.5).unwrap();
    let (w, h) = build_w_h(&spec, &times, &grid).unwrap();
    for p in &w.pairs {
        assert!(relation_defect(p) < 1e-10, "defect {}", relation_defect(p));
    }
    let weighted: Vec<f64> = times.iter().zip(&h.pairs).map(|(t, p)| (0.5 * t).exp() * pair_l2(p)).collect();
    let sup_w = w.pairs.iter().map(|p| p.first.sup_norm() + p.second.sup_norm()).fold(0.0, f64::max);
    let bound = sup_w + weighted.iter().copied().fold(0.0, f64::max);
    assert!(bound.is_finite() && bound < 10.0, "C1 = {bound}");
}

#[test]
fn duhamel_single_mode_matches_adaptive_quadrature() {
    let grid = Grid::centered(4.0 * std::f64::consts::PI, 16, 0.0).unwrap();
    let (k, tmax) = (0.5, 2.0);
    let g = |s: f64| C64::new((-s).exp(), 0.3 * s);
    let times = PairTrajectory::nodes(0.0, tmax, 1e-4).unwrap();
    let out = duhamel_apply(&single_mode(&grid, &times, k, g));
    for n in (0..times.len()).step_by(2500) {
        let t = times[n];
        let integrand = |s: f64| C64::from_polar(1.0, -k * k * (t - s)) * g(s);
        let exact = -I * simpson(&integrand, t, tmax, 1e-13);
        // mode amplitude at x = grid point 0
        let got = out.pairs[n].first.values()[0] * C64::from_polar(1.0, -k * grid.x(0));
        assert!((got - exact).norm() < 1e-8, "t = {t}: {got} vs {exact}");
    }
}

#[test]
fn duhamel_splits_at_an_interior_node() {
    let grid = Grid::centered(2.0 * std::f64::consts::PI, 32, 0.0).unwrap();
    let times = PairTrajectory::nodes(0.0, 2.0, 0.01).unwrap();
    let g = single_mode(&grid, &times, 2.0, |s| C64::new(s.cos(), 1.0))
        .add(&single_mode(&grid, &times, 5.0, |s| C64::new(0.0, (-s).exp())));
    let whole = duhamel_apply(&g);

    let m = 120;
    let tail = PairTrajectory::new(times[m..].to_vec(), g.pairs[m..].to_vec()).unwrap();
    let head = PairTrajectory::new(times[..=m].to_vec(), g.pairs[..=m].to_vec()).unwrap();
    let tail_out = duhamel_apply(&tail);
    let head_out = duhamel_apply(&head);
    let boundary = &tail_out.pairs[0];
    for n in 0..=m {
        let tau = times[n] - times[m];
        let joined_first = &head_out.pairs[n].first + &boundary.first.free_propagate(tau);
        let joined_second = &head_out.pairs[n].second + &boundary.second.free_propagate(tau);
        let err = (&joined_first - &whole.pairs[n].first).l2_norm() + (&joined_second - &whole.pairs[n].second).l2_norm();
        assert!(err < 1e-12, "node {n}: {err}");
    }
}

#[test]
fn contraction_improves_with_later_start() {
    let spec = family();
    let grid = family_grid();
    let max_ratio = |t0: f64| {
        let (_, r) = picard_solve(&spec, &grid, t0, 8.0, 0.01, PicardOptions::default()).unwrap();
        assert!(r.converged);
        r.ratios.iter().copied().fold(0.0, f64::max)
    };
    let (early, late) = (max_ratio(3.0), max_ratio(4.0));
    assert!(late <= early || late <= 0.5, "T0 = 3: {early}, T0 = 4: {late}");
}

#[test]
fn truncation_moves_the_early_solution_by_little() {
    let spec = family();
    // room for the faster member until t = 13
    let grid = Grid::centered(320.0, 4096, -110.0).unwrap();
    let lambda = 0.5;
    let run = |tmax: f64| picard_solve(&spec, &grid, 3.0, tmax, 0.01, PicardOptions::default()).unwrap();
    let (short, report) = run(9.0);
    let (long, _) = run(9.0 + 2.0 / lambda);
    // nodes of [T0, Tmax - 2/λ] = [3, 5]
    let window = |e: &PairTrajectory| PairTrajectory::new(e.times[..=200].to_vec(), e.pairs[..=200].to_vec()).unwrap();
    let change = xnorm(&window(&short).sub(&window(&long)), lambda);
    assert!(
        change < 0.1 * report.final_defect,
        "change {change:e}, final defect {:e}, |eta|_X {:e}",
        report.final_defect,
        xnorm(&short, lambda)
    );
}

#[test]
fn synthesized_solution_solves_the_field_equation() {
    use dnls_trains::dynamics::{DeviationEquation, Integrator};

    let spec = family();
    let grid = family_grid();
    let (eta, _) = picard_solve(&spec, &grid, 3.0, 9.0, 0.01, PicardOptions::default()).unwrap();
    let syn = synthesize(&spec, &eta).unwrap();

    // evolve w = u - R from the synthesized w(3) to t = 4
    let integ = Integrator::new(DeviationEquation::new(&spec, &grid).unwrap(), 0.001);
    let mut state = vec![syn.deviation[0].spectrum()];
    for s in 0..1000 {
        integ.step(3.0 + s as f64 * 0.001, &mut state).unwrap();
    }
    let evolved = Field::from_spectrum(&grid, 4.0, &state[0]);
    let target = &syn.deviation[100];
    let mismatch = (&evolved - target).h1_norm();
    // starting from w = 0 instead leaves the deviation at the size of the forcing
    assert!(
        mismatch < 1e-3 * syn.distance[0],
        "mismatch {mismatch:e}, |w(4)| = {:e}, |w(3)| = {:e}",
        syn.distance[100],
        syn.distance[0]
    );
}
