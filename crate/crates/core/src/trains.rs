//! Train profiles, interaction residuals and their decay, and the drift
//! experiment.
//!
//! Every member of a train is an exact traveling solution, so the residual
//! `iR_t + R_xx + N(R)` of the sum reduces to `N(ΣR_j) - ΣN(R_j)`. Expanding
//! each monomial of `N` over member tuples and dropping the tuples that use a
//! single member gives that difference directly as a sum of products. Nothing
//! cancels, so residuals far below the size of the profile keep their full
//! relative accuracy.

use serde::Serialize;

use crate::dynamics::{DeviationEquation, Integrator};
use crate::error::{Error, Result};
use crate::nonlinear::{field_nonlinearity, Monomial, Var};
use crate::profiles::{lambda_of, separation_lhs, v_star, EquationVariant, MemberColumns, MemberProfile, TrainSpec};
use crate::spectral::{
    cumulative_integral_corrected, sobolev_norm_of_spectrum, Anchor, Dealiaser, Field, Grid, C64,
    TAIL_TOLERANCE,
};

/// Member columns of a train sampled on one grid at one time.
#[derive(Debug, Clone)]
pub struct TrainSamples {
    grid: Grid,
    t: f64,
    variant: EquationVariant,
    b: f64,
    profiles: Vec<MemberProfile>,
    members: Vec<MemberColumns>,
}

impl TrainSamples {
    /// Evaluates every member on `grid`, failing if a member has not decayed
    /// below `tail` at a boundary where it should vanish.
    pub fn new(spec: &TrainSpec, t: f64, grid: &Grid, tail: f64) -> Result<Self> {
        let profiles = spec.member_profiles()?;
        let labels = spec.members();
        let first = usize::from(spec.kink.is_none());
        let xs = grid.points();
        let mut members = Vec::with_capacity(profiles.len());
        for (j, p) in profiles.iter().enumerate() {
            let cols = p.columns(t, &xs);
            p.check_tails(&cols.value, tail, &labels[j].label(j + first))?;
            members.push(cols);
        }
        Ok(TrainSamples {
            grid: grid.clone(),
            t,
            variant: spec.variant,
            b: spec.b,
            profiles,
            members,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn members(&self) -> &[MemberColumns] {
        &self.members
    }

    fn summed(&self, pick: impl Fn(&MemberColumns) -> &Vec<C64>) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for m in &self.members {
            for (o, v) in out.iter_mut().zip(pick(m)) {
                *o += v;
            }
        }
        out
    }

    pub fn value(&self) -> Vec<C64> {
        self.summed(|m| &m.value)
    }

    pub fn dx(&self) -> Vec<C64> {
        self.summed(|m| &m.dx)
    }

    pub fn dxx(&self) -> Vec<C64> {
        self.summed(|m| &m.dxx)
    }

    pub fn dt(&self) -> Vec<C64> {
        self.summed(|m| &m.dt)
    }

    /// `∫_{-∞}^x |R|²`: closed-form member masses plus the integrated
    /// cross terms. Only meaningful for dnls1, whose gauge is anchored at
    /// -∞.
    pub fn mass_phase(&self) -> Result<Vec<f64>> {
        self.require_left_anchor()?;
        let xs = self.grid.points();
        let mut cross = vec![0.0; xs.len()];
        for (a, ma) in self.members.iter().enumerate() {
            for mb in &self.members[a + 1..] {
                for (c, (u, v)) in cross.iter_mut().zip(ma.value.iter().zip(&mb.value)) {
                    *c += 2.0 * (u * v.conj()).re;
                }
            }
        }
        let mut out = cumulative_integral_corrected(&self.grid, &cross, Anchor::Left, TAIL_TOLERANCE)?;
        for p in &self.profiles {
            for (o, &x) in out.iter_mut().zip(&xs) {
                *o += p.anchored_mass(self.t, x);
            }
        }
        Ok(out)
    }

    /// `∂_t ∫_{-∞}^x |R|² = ∫_{-∞}^x 2 Re(R̄ R_t)`.
    pub fn mass_phase_rate(&self) -> Result<Vec<f64>> {
        self.require_left_anchor()?;
        let mut cross = vec![0.0; self.grid.len()];
        for (a, ma) in self.members.iter().enumerate() {
            for (b, mb) in self.members.iter().enumerate() {
                if a != b {
                    for (c, (u, v)) in cross.iter_mut().zip(ma.value.iter().zip(&mb.dt)) {
                        *c += 2.0 * (u.conj() * v).re;
                    }
                }
            }
        }
        let mut out = cumulative_integral_corrected(&self.grid, &cross, Anchor::Left, TAIL_TOLERANCE)?;
        // a translating member carries its own mass along: ∂_t of its part is -c|R_j|²
        for (p, m) in self.profiles.iter().zip(&self.members) {
            for (o, v) in out.iter_mut().zip(&m.value) {
                *o -= p.speed() * v.norm_sqr();
            }
        }
        Ok(out)
    }

    fn require_left_anchor(&self) -> Result<()> {
        if self.variant != EquationVariant::Dnls1 {
            return Err(Error::InvalidArgument(
                "the mass phase is anchored at -∞ and only defined for dnls1 trains".into(),
            ));
        }
        Ok(())
    }

    /// Cross-term expansion of the residual on this grid: `(χ₁, χ₂)` with
    /// `χ₂` already weighted by `b`.
    pub fn chi(&self) -> (Vec<C64>, Vec<C64>) {
        let n = self.grid.len();
        let mut chi1 = vec![C64::new(0.0, 0.0); n];
        let mut chi2 = vec![C64::new(0.0, 0.0); n];
        for mono in field_nonlinearity(self.variant, self.b).terms() {
            let out = if mono.vars().len() == 3 { &mut chi1 } else { &mut chi2 };
            accumulate_cross_terms(mono, &self.members, out);
        }
        (chi1, chi2)
    }
}

fn column(m: &MemberColumns, v: Var) -> (&[C64], bool) {
    match v {
        Var::A => (&m.value, false),
        Var::ConjA => (&m.value, true),
        Var::B => (&m.dx, false),
        Var::ConjB => (&m.dx, true),
    }
}

/// Adds `coeff · Π x_{i_s}` over every member tuple `(i_1, …, i_d)` that is
/// not constant.
fn accumulate_cross_terms(mono: &Monomial, members: &[MemberColumns], out: &mut [C64]) {
    let vars = mono.vars();
    let k = members.len();
    if k < 2 {
        return;
    }
    let d = vars.len();
    let mut idx = vec![0usize; d];
    loop {
        if idx.iter().any(|&i| i != idx[0]) {
            let cols: Vec<(&[C64], bool)> = idx.iter().zip(vars).map(|(&i, &v)| column(&members[i], v)).collect();
            for (p, o) in out.iter_mut().enumerate() {
                let mut acc = mono.coeff;
                for &(col, conj) in &cols {
                    acc *= if conj { col[p].conj() } else { col[p] };
                }
                *o += acc;
            }
        }
        // odometer over k^d tuples
        let mut pos = 0;
        loop {
            if pos == d {
                return;
            }
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// `R(t) = Σ R_j` on `grid`.
pub fn train_profile(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<Field> {
    spec.validate()?;
    spec.profile_field(t, grid, TAIL_TOLERANCE)
}

/// `(χ₁, χ₂)` on `grid`: products formed on the padded grid from analytic
/// member values and truncated to the base band.
pub fn residual_chi(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<(Field, Field)> {
    spec.validate()?;
    let de = Dealiaser::new(grid);
    let samples = TrainSamples::new(spec, t, de.fine(), TAIL_TOLERANCE)?;
    let (c1, c2) = samples.chi();
    Ok((de.project(&c1, t), de.project(&c2, t)))
}

/// `‖χ₁‖_{H²} + ‖χ₂‖_{H²}`.
pub fn residual_norm(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<f64> {
    let (c1, c2) = residual_chi(spec, t, grid)?;
    Ok(sobolev_norm_of_spectrum(grid, &c1.spectrum(), 2) + sobolev_norm_of_spectrum(grid, &c2.spectrum(), 2))
}

/// `Σ_{i=1,2} (‖χ_i‖∞ + ‖∂χ_i‖∞ + ‖∂²χ_i‖∞)`.
pub fn residual_sup_norm(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<f64> {
    let (c1, c2) = residual_chi(spec, t, grid)?;
    let mut total = 0.0;
    for c in [c1, c2] {
        total += c.sup_norm() + c.derivative(1)?.sup_norm() + c.derivative(2)?.sup_norm();
    }
    Ok(total)
}

/// Log-linear fit `s(t) ≈ amplitude · e^{-rate·t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub rsquared: f64,
    pub window: (f64, f64),
}

/// Least squares of `ln s` against `t`.
pub fn fit_decay(times: &[f64], values: &[f64]) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::InvalidArgument("times and values differ in length".into()));
    }
    if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("decay fit needs increasing times".into()));
    }
    if let Some((t, v)) = times.iter().zip(values).find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::DegenerateFit(format!("series value {v:e} at t = {t} has no logarithm")));
    }
    let n = times.len() as f64;
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let tm = times.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let stt: f64 = times.iter().map(|t| (t - tm).powi(2)).sum();
    let sty: f64 = times.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let syy: f64 = ys.iter().map(|y| (y - ym).powi(2)).sum();
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let rsquared = if syy == 0.0 { 1.0 } else { (sty * sty) / (stt * syy) };
    Ok(DecayFit {
        rate: -slope,
        amplitude: intercept.exp(),
        rsquared,
        window: (times[0], times[times.len() - 1]),
    })
}

/// Earliest sampled time from which `s(t) ≤ e^{-λt}` holds at every later
/// sample.
pub fn empirical_t0(times: &[f64], values: &[f64], lambda: f64) -> Option<f64> {
    let mut t0 = None;
    for (t, v) in times.iter().zip(values).rev() {
        if *v <= (-lambda * t).exp() {
            t0 = Some(*t);
        } else {
            break;
        }
    }
    t0
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualDecay {
    pub times: Vec<f64>,
    /// `‖χ₁‖_{H²} + ‖χ₂‖_{H²}`
    pub h2: Vec<f64>,
    /// `W^{2,∞}` counterpart of `h2`
    pub sup: Vec<f64>,
    pub fit: DecayFit,
    pub sup_fit: DecayFit,
    pub v_star: f64,
    pub lambda: f64,
    pub t0: Option<f64>,
}

/// Samples the residual norms at `times` and fits their decay.
pub fn residual_decay(spec: &TrainSpec, grid: &Grid, times: &[f64]) -> Result<ResidualDecay> {
    if times.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "residual decay needs at least 4 times (got {})",
            times.len()
        )));
    }
    spec.validate()?;
    let mut h2 = Vec::with_capacity(times.len());
    let mut sup = Vec::with_capacity(times.len());
    for &t in times {
        h2.push(residual_norm(spec, t, grid)?);
        sup.push(residual_sup_norm(spec, t, grid)?);
    }
    let fit = fit_decay(times, &h2)?;
    let sup_fit = fit_decay(times, &sup)?;
    let v_star = v_star(spec)?;
    let lambda = v_star / 16.0;
    Ok(ResidualDecay {
        times: times.to_vec(),
        t0: empirical_t0(times, &h2, lambda),
        h2,
        sup,
        fit,
        sup_fit,
        v_star,
        lambda,
    })
}

/// Default bound on `separation_lhs / v*` below which a train counts as
/// well separated.
pub const SEPARATION_GATE: f64 = 0.2;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SeparationGate {
    pub ratio: Option<f64>,
    pub threshold: f64,
    pub passed: bool,
}

/// `separation_lhs / v*` over `times` against `threshold`. Single-member
/// specs have no `v*` and pass trivially.
pub fn separation_gate(spec: &TrainSpec, grid: &Grid, times: &[f64], threshold: f64) -> Result<SeparationGate> {
    if spec.len() < 2 {
        return Ok(SeparationGate {
            ratio: None,
            threshold,
            passed: true,
        });
    }
    let ratio = separation_lhs(spec, grid, times)? / v_star(spec)?;
    Ok(SeparationGate {
        ratio: Some(ratio),
        threshold,
        passed: ratio < threshold,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct DriftOptions {
    pub record_every: usize,
    pub gate_threshold: f64,
}

impl Default for DriftOptions {
    fn default() -> Self {
        DriftOptions {
            record_every: 10,
            gate_threshold: SEPARATION_GATE,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftResult {
    pub times: Vec<f64>,
    /// `‖u(t) - R(t)‖_{H¹}`
    pub distance: Vec<f64>,
    pub gate: SeparationGate,
    /// `‖χ₁‖_{H²} + ‖χ₂‖_{H²}` at the start time
    pub residual_at_start: f64,
    pub lambda: Option<f64>,
}

/// Evolves `u` from `u(t0) = R(t0)` to `t1` and records `‖u - R‖_{H¹}`.
///
/// The run integrates the deviation `w = u - R`, whose forcing is the
/// cross-term residual, so kinks (non-periodic) and exponentially small
/// distances are both handled. A failed separation gate is recorded, not
/// fatal.
pub fn drift_experiment(
    spec: &TrainSpec,
    grid: &Grid,
    t0: f64,
    t1: f64,
    dt: f64,
    opts: DriftOptions,
) -> Result<DriftResult> {
    spec.validate()?;
    if !(t1 > t0) || !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "drift needs t1 > t0 and dt > 0 (t0 = {t0}, t1 = {t1}, dt = {dt})"
        )));
    }
    let steps = step_count(t0, t1, dt)?;
    let gate_times: Vec<f64> = (0..=4).map(|i| t0 + (t1 - t0) * i as f64 / 4.0).collect();
    let gate = separation_gate(spec, grid, &gate_times, opts.gate_threshold)?;
    let residual_at_start = if spec.len() > 1 { residual_norm(spec, t0, grid)? } else { 0.0 };

    let system = DeviationEquation::new(spec, grid)?;
    let integ = Integrator::new(system, dt);
    let mut state = vec![vec![C64::new(0.0, 0.0); grid.len()]];
    let mut times = vec![t0];
    let mut distance = vec![0.0];
    let every = opts.record_every.max(1);
    for s in 0..steps {
        let t = t0 + s as f64 * dt;
        integ.step(t, &mut state)?;
        if (s + 1) % every == 0 || s + 1 == steps {
            let tn = t0 + (s + 1) as f64 * dt;
            times.push(tn);
            distance.push(sobolev_norm_of_spectrum(grid, &state[0], 1));
        }
    }
    Ok(DriftResult {
        times,
        distance,
        gate,
        residual_at_start,
        lambda: if spec.len() > 1 { Some(lambda_of(spec)?) } else { None },
    })
}

/// Number of steps of size `dt` covering `[t0, t1]`; the ratio must be an
/// integer up to rounding.
pub(crate) fn step_count(t0: f64, t1: f64, dt: f64) -> Result<usize> {
    let ratio = (t1 - t0) / dt;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "(t1 - t0)/dt = {ratio} is not a positive integer"
        )));
    }
    Ok(n as usize)
}
