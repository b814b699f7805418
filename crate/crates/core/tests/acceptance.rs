//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dnls_trains::dynamics::{evolve, step, EvolveOptions};
use dnls_trains::fixedpoint::{picard_solve, synthesize, PicardOptions};
use dnls_trains::gauge::{from_gauge, nonlinearity, profile_sources, relation_defect, to_gauge};
use dnls_trains::profiles::{
    halfkink_phi, scaled_family, separation_lhs, soliton_field, soliton_phi, v_star, EquationVariant, KinkParams,
    Orientation, SolitonParams, TrainSpec,
};
use dnls_trains::spectral::{Field, Grid, C64, I};
use dnls_trains::trains::residual_decay;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {what}", if ok { "ok  " } else { "FAIL" }));
    }
}

type Check = fn() -> dnls_trains::Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, Check); 8] = [
        ("profile exactness", profile_exactness),
        ("solver correctness", solver_correctness),
        ("gauge integrity", gauge_integrity),
        ("residual decay", residual_decay_rates),
        ("source boundedness", source_boundedness),
        ("picard contraction", picard_contraction),
        ("synthesized solution", synthesized_solution),
        ("separation scaling", separation_scaling),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let clock = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome {
            pass: false,
            lines: vec![format!("FAIL error: {e}")],
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {} ({name}): {verdict} [{:.1?}]", n + 1, clock.elapsed());
        for line in &outcome.lines {
            println!("    {line}");
        }
        failed += usize::from(!outcome.pass);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn sup(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn stationary_residual(p: &SolitonParams, grid: &Grid) -> dnls_trains::Result<f64> {
    let phi = soliton_phi(p, grid)?;
    let d1 = phi.derivative(1)?;
    let d2 = phi.derivative(2)?;
    let res: Vec<C64> = (0..grid.len())
        .map(|j| {
            let (f, fx, fxx) = (phi.values()[j], d1.values()[j], d2.values()[j]);
            let derivative_term = match p.variant {
                EquationVariant::Dnls1 => I * f.norm_sqr() * fx,
                EquationVariant::Dnls2 => I * f * f * fx.conj(),
            };
            -fxx + p.omega * f + I * p.c * fx - derivative_term - p.b * f.norm_sqr().powi(2) * f
        })
        .collect();
    Ok(sup(&res))
}

fn draw_soliton(rng: &mut ChaCha8Rng, variant: EquationVariant) -> SolitonParams {
    loop {
        let (b, omega) = match variant {
            EquationVariant::Dnls1 => (rng.gen_range(-0.1..0.3), rng.gen_range(0.5..2.5)),
            EquationVariant::Dnls2 => (rng.gen_range(-0.2..0.2), rng.gen_range(0.5..2.5)),
        };
        let edge = 2.0 * f64::sqrt(omega);
        let p = SolitonParams::new(variant, omega, rng.gen_range(-edge..edge), b)
            .with_phase(rng.gen_range(0.0..6.0));
        // fast enough decay to sit inside the box at tail tolerance
        if p.validate().is_valid() && p.h() >= 1.3 {
            return p;
        }
    }
}

fn profile_exactness() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let grid = Grid::centered(80.0, 2048, 0.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for variant in [EquationVariant::Dnls1, EquationVariant::Dnls2] {
        let mut worst = 0.0f64;
        for _ in 0..10 {
            let p = draw_soliton(&mut rng, variant);
            worst = worst.max(stationary_residual(&p, &grid)?);
        }
        out.check(worst < 1e-6, format!("{variant}: worst stationary residual over 10 draws {worst:.3e} < 1e-6"));
    }

    let kp = KinkParams::new(1.0, 0.0, Orientation::Falling);
    let grid = Grid::centered(200.0, 4096, 0.0)?;
    let phi = halfkink_phi(&kp, &grid)?;
    let zeta = f64::sqrt(2.0 * 1.0 / (5.0 / 3.0));
    // subtracting a ramp from the plateau to zero makes the samples periodic
    let ramp = |x: f64| zeta * (1.0 - (x - grid.left()) / grid.length());
    let detrended = Field::new(
        &grid,
        0.0,
        (0..grid.len()).map(|j| phi.values()[j] - ramp(grid.x(j))).collect(),
    )?;
    let d2 = detrended.derivative(2)?;
    let (c, gamma, wt) = (1.0, 5.0 / 3.0, kp.omega_tilde());
    let interior = grid.len() / 10..grid.len() - grid.len() / 10;
    let mut ode = 0.0f64;
    for j in interior {
        let f = phi.values()[j].re;
        let r = -d2.values()[j].re + wt * f - 0.5 * c * f.powi(3) + 3.0 / 16.0 * gamma * f.powi(5);
        ode = ode.max(r.abs());
    }
    out.check(ode < 1e-8, format!("kink ODE residual {ode:.3e} < 1e-8"));
    let plateau = (phi.values()[0].re - zeta).abs();
    out.check(plateau < 1e-8, format!("kink plateau |Φ(-100) - ζ| = {plateau:.3e} < 1e-8"));
    Ok(out)
}

fn solver_correctness() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let cases = [
        (SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0), Grid::centered(80.0, 1024, 1.25)?, 0.0005),
        (SolitonParams::new(EquationVariant::Dnls2, 1.0, 1.8, 0.125), Grid::centered(160.0, 2048, 4.5)?, 0.002),
    ];
    for (p, grid, dt) in &cases {
        let spec = TrainSpec::new(p.variant, p.b, vec![*p]);
        let u0 = soliton_field(p, 0.0, grid)?;
        let traj = evolve(&u0, 0.0, 5.0, *dt, p.variant, p.b, Some(&spec), EvolveOptions { record_every: 50 })?;
        let track = traj.max_distance().unwrap_or(f64::INFINITY);
        out.check(track <= 1e-6, format!("{}: H1 self-tracking over [0,5] {track:.3e} <= 1e-6", p.variant));
        let drift = traj.mass_drift();
        out.check(drift <= 1e-9, format!("{}: relative mass drift {drift:.3e} <= 1e-9", p.variant));
    }

    let grid = Grid::centered(2.0 * std::f64::consts::PI, 32, 0.0)?;
    let (amp, k, b, dt) = (0.7f64, 3.0, 0.3, 0.01);
    for variant in [EquationVariant::Dnls1, EquationVariant::Dnls2] {
        let sigma = match variant {
            EquationVariant::Dnls1 => k * k + amp * amp * k - b * amp.powi(4),
            EquationVariant::Dnls2 => k * k - amp * amp * k - b * amp.powi(4),
        };
        let u0 = Field::from_fn(&grid, 0.0, |x| amp * C64::from_polar(1.0, k * x))?;
        let u1 = step(&u0, dt, variant, b)?;
        let err = sup(&(&u1 - &u0.scale(C64::from_polar(1.0, -sigma * dt))).values().to_vec());
        out.check(err <= 1e-10, format!("{variant}: plane-wave phase error per step {err:.3e} <= 1e-10"));
    }

    let (p, grid, _) = &cases[0];
    let u0 = soliton_field(p, 0.0, grid)?;
    let one_step_error = |dt: f64| -> dnls_trains::Result<f64> {
        let coarse = step(&u0, dt, p.variant, p.b)?;
        let mut fine = u0.clone();
        for _ in 0..64 {
            fine = step(&fine, dt / 64.0, p.variant, p.b)?;
        }
        Ok((&coarse - &fine).l2_norm())
    };
    let ratio = one_step_error(0.05)? / one_step_error(0.025)?;
    out.check(ratio >= 12.0, format!("one-step error ratio under dt halving {ratio:.2} >= 12"));
    Ok(out)
}

fn gauged_system_residual(p: &SolitonParams, grid: &Grid, t: f64) -> dnls_trains::Result<f64> {
    let pair = to_gauge(&soliton_field(p, t, grid)?, p.variant)?;
    let f = nonlinearity(&pair, p.b);
    let mut worst = 0.0f64;
    // gauged soliton components are e^{iωt} times a wave moving at speed c
    for (comp, src) in [(&pair.first, &f.first), (&pair.second, &f.second)] {
        let d1 = comp.derivative(1)?;
        let d2 = comp.derivative(2)?;
        let res: Vec<C64> = (0..grid.len())
            .map(|j| {
                let v = comp.values()[j];
                -p.omega * v - I * p.c * d1.values()[j] + d2.values()[j] - src.values()[j]
            })
            .collect();
        worst = worst.max(sup(&res));
    }
    Ok(worst)
}

fn gauge_integrity() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let grid = Grid::centered(80.0, 2048, 0.0)?;
    let solitons = [
        SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.1).with_phase(0.4).with_offset(-3.0),
        SolitonParams::new(EquationVariant::Dnls2, 1.5, 2.0, 0.05).with_phase(1.1).with_offset(2.0),
    ];
    for p in &solitons {
        let u = soliton_field(p, 0.7, &grid)?;
        let pair = to_gauge(&u, p.variant)?;
        let back = from_gauge(&pair)?;
        let trip = (&back - &u).h1_norm();
        out.check(trip <= 1e-12, format!("{}: gauge round trip H1 error {trip:.3e} <= 1e-12", p.variant));
        let defect = relation_defect(&pair);
        out.check(defect <= 1e-12, format!("{}: fresh relation defect {defect:.3e} <= 1e-12", p.variant));
        let res = gauged_system_residual(p, &grid, 0.7)?;
        out.check(res <= 1e-6, format!("{}: gauged-system residual on soliton {res:.3e} <= 1e-6", p.variant));
    }
    Ok(out)
}

fn family(m: f64) -> dnls_trains::Result<TrainSpec> {
    let solitons = scaled_family(EquationVariant::Dnls1, &[-1.0, -2.0], &[1.0, 1.0], m, 0.0)?;
    Ok(TrainSpec::new(EquationVariant::Dnls1, 0.0, solitons))
}

fn kink_train() -> dnls_trains::Result<TrainSpec> {
    let soliton = scaled_family(EquationVariant::Dnls2, &[1.0], &[1.0], 8.0, 0.0)?;
    Ok(TrainSpec::new(EquationVariant::Dnls2, 0.0, soliton).with_kink(KinkParams::new(1.0, 0.0, Orientation::Falling)))
}

fn residual_decay_rates() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let times: Vec<f64> = (0..=16).map(|i| 2.0 + 0.25 * i as f64).collect();
    let runs = [
        ("dnls1 M=8 family", family(8.0)?, Grid::centered(192.0, 4096, -64.0)?),
        ("dnls2 kink + soliton", kink_train()?, Grid::centered(192.0, 4096, 32.0)?),
    ];
    for (name, spec, grid) in &runs {
        let d = residual_decay(spec, grid, &times)?;
        let floor = d.v_star / 16.0;
        out.check(
            d.fit.rate >= floor && d.fit.rsquared >= 0.98,
            format!("{name}: fitted rate {:.4} >= v*/16 = {floor:.4}, r2 {:.6} >= 0.98", d.fit.rate, d.fit.rsquared),
        );
        match d.t0 {
            Some(t0) => {
                let held = times
                    .iter()
                    .zip(&d.h2)
                    .filter(|(t, _)| **t >= t0)
                    .all(|(t, s)| *s <= (-floor * t).exp());
                out.check(held, format!("{name}: s(t) <= exp(-v* t/16) for all sampled t >= T0 = {t0}"));
            }
            None => out.check(false, format!("{name}: no sampled T0 with s(t) <= exp(-v* t/16)")),
        }
    }
    Ok(out)
}

fn source_boundedness() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let spec = family(8.0)?;
    let grid = Grid::centered(256.0, 4096, -72.0)?;
    let mut values = Vec::new();
    for i in 0..=12 {
        let t = 2.0 + 0.5 * i as f64;
        let src = profile_sources(&spec, t, &grid)?;
        values.push(src.m.h1_norm() + src.n.h1_norm());
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    out.check(
        max / min < 10.0,
        format!("|m|_H1 + |n|_H1 over [2,8]: max {max:.3e}, min {min:.3e}, ratio {:.3e} < 10", max / min),
    );
    Ok(out)
}

const PICARD_GRID: (f64, usize, f64) = (256.0, 2048, -84.0);

fn picard_run() -> dnls_trains::Result<(TrainSpec, dnls_trains::fixedpoint::PairTrajectory, dnls_trains::fixedpoint::PicardReport)> {
    let spec = family(8.0)?;
    let grid = Grid::centered(PICARD_GRID.0, PICARD_GRID.1, PICARD_GRID.2)?;
    let (eta, report) = picard_solve(&spec, &grid, 3.0, 9.0, 0.01, PicardOptions::default())?;
    Ok((spec, eta, report))
}

fn picard_contraction() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let (_, eta, report) = picard_run()?;
    out.check(report.converged, format!("converged after {} iterates", report.iterates));
    let worst = report.ratios.iter().copied().fold(0.0, f64::max);
    out.check(worst <= 0.5, format!("largest contraction ratio {worst:.4} <= 0.5"));
    out.check(
        report.final_defect <= 1e-6,
        format!("final Duhamel defect {:.3e} <= 1e-6", report.final_defect),
    );
    let ball = eta
        .times
        .iter()
        .zip(&eta.pairs)
        .map(|(t, p)| {
            let norms = [&p.first, &p.second].map(|f| f.l2_norm() + f.dx().l2_norm());
            (report.lambda * t).exp() * (norms[0] + norms[1])
        })
        .fold(0.0, f64::max);
    out.check(ball <= 1.0, format!("ball bound max e^(λt)(|η| + |∂η|) = {ball:.3e} <= 1"));
    Ok(out)
}

fn synthesized_solution() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let (spec, eta, report) = picard_run()?;
    let syn = synthesize(&spec, &eta)?;
    let lambda = report.lambda;
    let to = 9.0 - 2.0 / lambda;
    let (fit, kappa) = syn.fit(3.0, to, lambda)?;
    let bounded = syn
        .times
        .iter()
        .zip(&syn.distance)
        .filter(|(t, _)| **t <= to + 1e-12)
        .all(|(t, d)| *d <= kappa * (-lambda * t).exp() * (1.0 + 1e-12));
    out.check(
        bounded && fit.rsquared >= 0.95,
        format!("|u - R|_H1 <= κ e^(-λt) on [3, {to}] with κ = {kappa:.3e}, log-linear r2 {:.6} >= 0.95", fit.rsquared),
    );
    let defect = syn.relation_defect.iter().copied().fold(0.0, f64::max);
    out.check(defect <= 1e-6, format!("relation defect of synthesized pair {defect:.3e} <= 1e-6"));
    Ok(out)
}

fn separation_scaling() -> dnls_trains::Result<Outcome> {
    let mut out = Outcome::new();
    let times = [1.0, 2.0, 3.0];
    let mut lhs = Vec::new();
    let mut vs = Vec::new();
    for (m, grid) in [(8.0, Grid::centered(160.0, 8192, -32.0)?), (16.0, Grid::centered(320.0, 16384, -64.0)?)] {
        let spec = family(m)?;
        lhs.push(separation_lhs(&spec, &grid, &times)?);
        vs.push(v_star(&spec)?);
    }
    let ratio = lhs[1] / lhs[0];
    out.check(
        ratio <= 1.1,
        format!("LHS(16)/LHS(8) = {:.6}/{:.6} = {ratio:.4} <= 1.1", lhs[1], lhs[0]),
    );
    let doubled = (vs[1] - 2.0 * vs[0]).abs() <= 1e-12 * vs[1];
    out.check(doubled, format!("v*(16) = {} is twice v*(8) = {}", vs[1], vs[0]));
    Ok(out)
}
