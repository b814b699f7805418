//! Integrating-factor RK4 time stepping.
//!
//! States are lists of normalized Fourier coefficient vectors. The linear
//! part `i∂_xx` is integrated exactly by the free group `S(τ)`; the rest of
//! the right-hand side is treated explicitly by the classical RK4 tableau
//! in the interaction picture (Lawson's scheme).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::GaugePair;
use crate::nonlinear::{field_nonlinearity, gauged_system, PairPolynomial};
use crate::profiles::{EquationVariant, TrainSpec};
use crate::spectral::{sobolev_norm_of_spectrum, Dealiaser, Field, Grid, C64, I, TAIL_TOLERANCE};
use crate::trains::{step_count, TrainSamples};

/// The part of `∂_t(state)` that is not `i∂_xx`, in spectral form.
pub trait System: Sync {
    fn grid(&self) -> &Grid;

    fn components(&self) -> usize;

    fn nonlinear(&self, t: f64, state: &[Vec<C64>]) -> Result<Vec<Vec<C64>>>;
}

fn spectral_derivative(grid: &Grid, coeffs: &[C64]) -> Vec<C64> {
    let mut d: Vec<C64> = coeffs.iter().zip(grid.wavenumbers()).map(|(&c, &k)| c * I * k).collect();
    d[grid.nyquist_index()] = C64::new(0.0, 0.0);
    d
}

/// `u_t = iu_xx + iN(u, u_x)` for `iu_t + u_xx + N = 0`.
#[derive(Debug, Clone)]
pub struct FieldEquation {
    poly: PairPolynomial,
    de: Dealiaser,
}

impl FieldEquation {
    pub fn new(variant: EquationVariant, b: f64, grid: &Grid) -> Self {
        FieldEquation {
            poly: field_nonlinearity(variant, b),
            de: Dealiaser::new(grid),
        }
    }
}

impl System for FieldEquation {
    fn grid(&self) -> &Grid {
        self.de.base()
    }

    fn components(&self) -> usize {
        1
    }

    fn nonlinear(&self, _t: f64, state: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let grid = self.de.base();
        let u = self.de.lift_spectrum(&state[0]);
        let ux = self.de.lift_spectrum(&spectral_derivative(grid, &state[0]));
        let n: Vec<C64> = self.poly.eval_slices(&u, &ux).into_iter().map(|v| I * v).collect();
        Ok(vec![self.de.project_spectrum(&n)])
    }
}

/// `φ_t = iφ_xx - iP`, `ψ_t = iψ_xx - iQ`.
#[derive(Debug, Clone)]
pub struct GaugedEquation {
    p: PairPolynomial,
    q: PairPolynomial,
    de: Dealiaser,
}

impl GaugedEquation {
    pub fn new(variant: EquationVariant, b: f64, grid: &Grid) -> Self {
        let (p, q) = gauged_system(variant, b);
        GaugedEquation {
            p,
            q,
            de: Dealiaser::new(grid),
        }
    }
}

impl System for GaugedEquation {
    fn grid(&self) -> &Grid {
        self.de.base()
    }

    fn components(&self) -> usize {
        2
    }

    fn nonlinear(&self, _t: f64, state: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let a = self.de.lift_spectrum(&state[0]);
        let b = self.de.lift_spectrum(&state[1]);
        let p: Vec<C64> = self.p.eval_slices(&a, &b).into_iter().map(|v| -I * v).collect();
        let q: Vec<C64> = self.q.eval_slices(&a, &b).into_iter().map(|v| -I * v).collect();
        Ok(vec![self.de.project_spectrum(&p), self.de.project_spectrum(&q)])
    }
}

/// Deviation `w = u - R` from a train:
/// `w_t = iw_xx + i[N(R + w) - N(R)] + iχ(t)`,
/// with `R`, `R_x` and `χ` evaluated analytically on the padded grid at
/// every stage time.
#[derive(Debug, Clone)]
pub struct DeviationEquation {
    spec: TrainSpec,
    poly: PairPolynomial,
    de: Dealiaser,
}

impl DeviationEquation {
    pub fn new(spec: &TrainSpec, grid: &Grid) -> Result<Self> {
        spec.validate()?;
        Ok(DeviationEquation {
            spec: spec.clone(),
            poly: field_nonlinearity(spec.variant, spec.b),
            de: Dealiaser::new(grid),
        })
    }
}

impl System for DeviationEquation {
    fn grid(&self) -> &Grid {
        self.de.base()
    }

    fn components(&self) -> usize {
        1
    }

    fn nonlinear(&self, t: f64, state: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let grid = self.de.base();
        let samples = TrainSamples::new(&self.spec, t, self.de.fine(), TAIL_TOLERANCE)?;
        let (v, vx) = (samples.value(), samples.dx());
        let (c1, c2) = samples.chi();
        let w = self.de.lift_spectrum(&state[0]);
        let wx = self.de.lift_spectrum(&spectral_derivative(grid, &state[0]));
        let out: Vec<C64> = (0..w.len())
            .map(|j| I * (self.poly.eval_difference(v[j], vx[j], w[j], wx[j]) + c1[j] + c2[j]))
            .collect();
        Ok(vec![self.de.project_spectrum(&out)])
    }
}

/// Fixed-step Lawson RK4 for a [`System`].
#[derive(Debug, Clone)]
pub struct Integrator<S> {
    system: S,
    dt: f64,
    half: Vec<C64>,
    full: Vec<C64>,
}

impl<S: System> Integrator<S> {
    pub fn new(system: S, dt: f64) -> Self {
        let k = system.grid().wavenumbers();
        let half = k.iter().map(|&k| C64::from_polar(1.0, -k * k * 0.5 * dt)).collect();
        let full = k.iter().map(|&k| C64::from_polar(1.0, -k * k * dt)).collect();
        Integrator { system, dt, half, full }
    }

    pub fn system(&self) -> &S {
        &self.system
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `state` from `t` to `t + dt` in place.
    pub fn step(&self, t: f64, state: &mut [Vec<C64>]) -> Result<()> {
        let h = self.dt;
        let sys = &self.system;
        let prop = |e: &[C64], v: &[C64]| -> Vec<C64> { v.iter().zip(e).map(|(a, b)| a * b).collect() };
        let axpy = |x: &[C64], a: f64, y: &[C64]| -> Vec<C64> { x.iter().zip(y).map(|(x, y)| x + a * y).collect() };

        let k1 = sys.nonlinear(t, state)?;
        let s2: Vec<Vec<C64>> = state.iter().zip(&k1).map(|(u, k)| prop(&self.half, &axpy(u, 0.5 * h, k))).collect();
        let k2 = sys.nonlinear(t + 0.5 * h, &s2)?;
        let s3: Vec<Vec<C64>> = state.iter().zip(&k2).map(|(u, k)| axpy(&prop(&self.half, u), 0.5 * h, k)).collect();
        let k3 = sys.nonlinear(t + 0.5 * h, &s3)?;
        let s4: Vec<Vec<C64>> = state
            .iter()
            .zip(&k3)
            .map(|(u, k)| axpy(&prop(&self.full, u), h, &prop(&self.half, k)))
            .collect();
        let k4 = sys.nonlinear(t + h, &s4)?;
        for c in 0..state.len() {
            let u = &mut state[c];
            for j in 0..u.len() {
                let lin = self.full[j] * u[j];
                u[j] = lin
                    + h / 6.0 * (self.full[j] * k1[c][j] + 2.0 * self.half[j] * (k2[c][j] + k3[c][j]) + k4[c][j]);
            }
            if u.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::Divergence { time: t + h });
            }
        }
        Ok(())
    }
}

/// Full right-hand side `u_t = iu_xx + iN(u, u_x)`.
pub fn rhs(u: &Field, variant: EquationVariant, b: f64) -> Field {
    let sys = FieldEquation::new(variant, b, u.grid());
    let coeffs = u.spectrum();
    let mut n = sys.nonlinear(u.t(), &[coeffs.clone()]).expect("field rhs is infallible");
    for ((v, c), &k) in n[0].iter_mut().zip(&coeffs).zip(u.grid().wavenumbers()) {
        *v += -I * k * k * c;
    }
    Field::from_spectrum(u.grid(), u.t(), &n[0])
}

/// `(iφ_xx - iP, iψ_xx - iQ)`.
pub fn rhs_gauged(pair: &GaugePair, b: f64) -> GaugePair {
    let grid = pair.first.grid();
    let sys = GaugedEquation::new(pair.variant, b, grid);
    let state = [pair.first.spectrum(), pair.second.spectrum()];
    let mut n = sys.nonlinear(pair.t(), &state).expect("gauged rhs is infallible");
    for (out, c) in n.iter_mut().zip(&state) {
        for ((v, c), &k) in out.iter_mut().zip(c).zip(grid.wavenumbers()) {
            *v += -I * k * k * c;
        }
    }
    GaugePair::from_parts(
        Field::from_spectrum(grid, pair.t(), &n[0]),
        Field::from_spectrum(grid, pair.t(), &n[1]),
        pair.variant,
    )
}

/// One IF-RK4 step of the field equation.
pub fn step(u: &Field, dt: f64, variant: EquationVariant, b: f64) -> Result<Field> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive (got {dt})")));
    }
    let integ = Integrator::new(FieldEquation::new(variant, b, u.grid()), dt);
    let mut state = vec![u.spectrum()];
    integ.step(u.t(), &mut state)?;
    Ok(Field::from_spectrum(u.grid(), u.t() + dt, &state[0]))
}

/// One IF-RK4 step of the gauged system.
pub fn step_gauged(pair: &GaugePair, dt: f64, b: f64) -> Result<GaugePair> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!("dt must be positive (got {dt})")));
    }
    let grid = pair.first.grid();
    let integ = Integrator::new(GaugedEquation::new(pair.variant, b, grid), dt);
    let mut state = vec![pair.first.spectrum(), pair.second.spectrum()];
    integ.step(pair.t(), &mut state)?;
    let t = pair.t() + dt;
    Ok(GaugePair::from_parts(
        Field::from_spectrum(grid, t, &state[0]),
        Field::from_spectrum(grid, t, &state[1]),
        pair.variant,
    ))
}

/// `∫|f|² = ‖f‖²_{L²}`.
pub fn mass(f: &Field) -> f64 {
    f.l2_norm().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observables {
    pub mass: f64,
    pub h1: f64,
    /// `‖u(t) - R(t)‖_{H¹}` when a reference train is given.
    pub distance: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Field>,
    pub observables: Vec<Observables>,
}

impl Trajectory {
    pub fn last(&self) -> &Field {
        self.states.last().expect("trajectories hold the initial state")
    }

    /// Largest `|mass(t)/mass(t₀) - 1|` over the record.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.observables[0].mass;
        self.observables
            .iter()
            .map(|o| if m0 == 0.0 { o.mass } else { (o.mass / m0 - 1.0).abs() })
            .fold(0.0, f64::max)
    }

    pub fn max_distance(&self) -> Option<f64> {
        self.observables
            .iter()
            .map(|o| o.distance)
            .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    /// Record every this many steps (the final step is always recorded).
    pub record_every: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { record_every: 1 }
    }
}

/// Evolves the field equation from `u0` at `t0` to `t1`.
#[allow(clippy::too_many_arguments)]
pub fn evolve(
    u0: &Field,
    t0: f64,
    t1: f64,
    dt: f64,
    variant: EquationVariant,
    b: f64,
    reference: Option<&TrainSpec>,
    opts: EvolveOptions,
) -> Result<Trajectory> {
    if !(t1 > t0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "evolve needs t1 > t0 and dt > 0 (t0 = {t0}, t1 = {t1}, dt = {dt})"
        )));
    }
    if let Some(spec) = reference {
        spec.validate()?;
    }
    let steps = step_count(t0, t1, dt)?;
    let grid = u0.grid().clone();
    let observe = |state: &[C64], t: f64| -> Result<(Field, Observables)> {
        let f = Field::from_spectrum(&grid, t, state);
        let distance = match reference {
            Some(spec) => {
                let r = spec.profile_field(t, &grid, TAIL_TOLERANCE)?;
                let diff: Vec<C64> = state.iter().zip(r.spectrum()).map(|(a, b)| a - b).collect();
                Some(sobolev_norm_of_spectrum(&grid, &diff, 1))
            }
            None => None,
        };
        let obs = Observables {
            mass: grid.length() * state.iter().map(|c| c.norm_sqr()).sum::<f64>(),
            h1: sobolev_norm_of_spectrum(&grid, state, 1),
            distance,
        };
        Ok((f, obs))
    };

    let integ = Integrator::new(FieldEquation::new(variant, b, &grid), dt);
    let mut state = vec![u0.spectrum()];
    let (f, o) = observe(&state[0], t0)?;
    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![f],
        observables: vec![o],
    };
    let every = opts.record_every.max(1);
    for s in 0..steps {
        integ.step(t0 + s as f64 * dt, &mut state)?;
        if (s + 1) % every == 0 || s + 1 == steps {
            let t = t0 + (s + 1) as f64 * dt;
            let (f, o) = observe(&state[0], t)?;
            traj.times.push(t);
            traj.states.push(f);
            traj.observables.push(o);
        }
    }
    Ok(traj)
}

/// Evolves the gauged system from `pair` to `t1`, returning the final pair.
pub fn evolve_gauged(pair: &GaugePair, t1: f64, dt: f64, b: f64) -> Result<GaugePair> {
    let t0 = pair.t();
    let steps = step_count(t0, t1, dt)?;
    let grid = pair.first.grid();
    let integ = Integrator::new(GaugedEquation::new(pair.variant, b, grid), dt);
    let mut state = vec![pair.first.spectrum(), pair.second.spectrum()];
    for s in 0..steps {
        integ.step(t0 + s as f64 * dt, &mut state)?;
    }
    Ok(GaugePair::from_parts(
        Field::from_spectrum(grid, t1, &state[0]),
        Field::from_spectrum(grid, t1, &state[1]),
        pair.variant,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;
    use std::f64::consts::PI;

    fn plane_wave(grid: &Grid, a: f64, k: f64) -> Field {
        Field::from_fn(grid, 0.0, |x| C64::from_polar(a, k * x)).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = make_grid(2.0 * PI, 16).unwrap();
        let z = Field::zeros(&g, 0.0);
        for v in [EquationVariant::Dnls1, EquationVariant::Dnls2] {
            assert_eq!(rhs(&z, v, 0.7).sup_norm(), 0.0);
            assert_eq!(step(&z, 0.1, v, 0.7).unwrap().sup_norm(), 0.0);
        }
    }

    #[test]
    fn plane_wave_rhs_is_dispersion_relation() {
        let g = make_grid(2.0 * PI, 32).unwrap();
        let (a, k, b) = (0.8, 3.0, 0.4);
        let u = plane_wave(&g, a, k);
        for (variant, sigma) in [
            (EquationVariant::Dnls1, k * k + a * a * k - b * a.powi(4)),
            (EquationVariant::Dnls2, k * k - a * a * k - b * a.powi(4)),
        ] {
            let r = rhs(&u, variant, b);
            for (x, y) in r.values().iter().zip(u.values()) {
                assert!((x - (-I * sigma) * y).norm() < 1e-12);
            }
        }
    }

    struct Free(Grid);

    impl System for Free {
        fn grid(&self) -> &Grid {
            &self.0
        }
        fn components(&self) -> usize {
            1
        }
        fn nonlinear(&self, _t: f64, state: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
            Ok(vec![vec![C64::new(0.0, 0.0); state[0].len()]])
        }
    }

    #[test]
    fn linear_step_is_free_propagation() {
        let g = make_grid(10.0, 64).unwrap();
        let u = Field::from_fn(&g, 0.0, |x| C64::new((-x * x).exp(), 0.3 * (-x * x).exp())).unwrap();
        let integ = Integrator::new(Free(g.clone()), 0.05);
        let mut state = vec![u.spectrum()];
        integ.step(0.0, &mut state).unwrap();
        let s = Field::from_spectrum(&g, 0.05, &state[0]);
        let f = u.free_propagate(0.05);
        for (x, y) in s.values().iter().zip(f.values()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn gauged_rhs_vanishes_on_zero() {
        let g = make_grid(2.0 * PI, 16).unwrap();
        let z = GaugePair::from_parts(Field::zeros(&g, 0.0), Field::zeros(&g, 0.0), EquationVariant::Dnls1);
        let r = rhs_gauged(&z, 0.3);
        assert_eq!(r.first.sup_norm() + r.second.sup_norm(), 0.0);
    }

    #[test]
    fn mass_of_constant() {
        let g = make_grid(4.0, 16).unwrap();
        let f = Field::from_fn(&g, 0.0, |_| C64::new(1.0, 0.0)).unwrap();
        assert!((mass(&f) - 4.0).abs() < 1e-14);
    }
}
