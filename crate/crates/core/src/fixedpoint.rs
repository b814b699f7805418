//! Backward Duhamel quadrature and Picard iteration for the correction `η`
//! to a gauged train profile.
//!
//! With `W = (h, k)` the gauged profile, `f = (P, Q)` and
//! `L W - f(W) = e^{-λt}(m, n) = H`, a solution `W + η` of `L(W + η) = f(W + η)`
//! needs `Lη = f(W + η) - f(W) - H`. Imposing `η → 0` as `t → ∞` gives
//!
//! ```text
//! η(t) = -i ∫_t^∞ S(t - s) G(s) ds,    G = H - [f(W + η) - f(W)],
//! ```
//!
//! truncated at `Tmax` with `η(Tmax) = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gauge::{gauged_profile, profile_sources, residual_weight, GaugePair};
use crate::nonlinear::gauged_system;
use crate::profiles::{EquationVariant, TrainSpec};
use crate::spectral::{propagate_spectrum, sobolev_norm_of_spectrum, Dealiaser, Field, Grid, C64, I, TAIL_TOLERANCE};
use crate::trains::{fit_decay, step_count, DecayFit, TrainSamples};

/// Pairs on a uniform time grid.
#[derive(Debug, Clone)]
pub struct PairTrajectory {
    pub times: Vec<f64>,
    pub pairs: Vec<GaugePair>,
}

impl PairTrajectory {
    /// Uniform nodes `t0, t0 + dt, …, t1`.
    pub fn nodes(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>> {
        let n = step_count(t0, t1, dt)?;
        Ok((0..=n).map(|j| t0 + j as f64 * dt).collect())
    }

    pub fn zeros(grid: &Grid, times: &[f64], variant: EquationVariant) -> Self {
        PairTrajectory {
            times: times.to_vec(),
            pairs: times
                .iter()
                .map(|&t| GaugePair::from_parts(Field::zeros(grid, t), Field::zeros(grid, t), variant))
                .collect(),
        }
    }

    pub fn new(times: Vec<f64>, pairs: Vec<GaugePair>) -> Result<Self> {
        if times.len() != pairs.len() || times.is_empty() {
            return Err(Error::InvalidArgument("one pair per time node is required".into()));
        }
        if times.len() > 1 {
            let dt = times[1] - times[0];
            let uniform = times.windows(2).all(|w| ((w[1] - w[0]) - dt).abs() <= 1e-9 * dt.abs().max(1.0));
            if !(dt > 0.0) || !uniform {
                return Err(Error::InvalidArgument("time nodes must be uniform and increasing".into()));
            }
        }
        let grid = pairs[0].grid();
        if pairs.iter().any(|p| p.grid() != grid) {
            return Err(Error::InvalidArgument("all pairs must share one grid".into()));
        }
        Ok(PairTrajectory { times, pairs })
    }

    pub fn grid(&self) -> &Grid {
        self.pairs[0].grid()
    }

    pub fn variant(&self) -> EquationVariant {
        self.pairs[0].variant
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    fn zip_with(&self, other: &PairTrajectory, f: impl Fn(C64, C64) -> C64 + Copy) -> PairTrajectory {
        let pairs = self
            .pairs
            .iter()
            .zip(&other.pairs)
            .map(|(a, b)| {
                GaugePair::from_parts(a.first.zip_map(&b.first, f), a.second.zip_map(&b.second, f), a.variant)
            })
            .collect();
        PairTrajectory {
            times: self.times.clone(),
            pairs,
        }
    }

    pub fn sub(&self, other: &PairTrajectory) -> PairTrajectory {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &PairTrajectory) -> PairTrajectory {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, s: C64) -> PairTrajectory {
        PairTrajectory {
            times: self.times.clone(),
            pairs: self
                .pairs
                .iter()
                .map(|p| GaugePair::from_parts(p.first.scale(s), p.second.scale(s), p.variant))
                .collect(),
        }
    }
}

/// Per-iterate record of a Picard solve.
#[derive(Debug, Clone, Default, Serialize)]
pub struct PicardReport {
    pub iterates: usize,
    /// `‖η^l‖_X` for each computed iterate.
    pub xnorms: Vec<f64>,
    /// `‖η^{l+1} - η^l‖_X / ‖η^l - η^{l-1}‖_X`
    pub ratios: Vec<f64>,
    /// `‖η - Φ(η)‖_X` at the returned iterate.
    pub final_defect: f64,
    pub converged: bool,
    pub lambda: f64,
}

/// Sup over nodes of `e^{λt}(‖η‖_{L²×L²} + ‖∂η‖_{L²×L²})`.
pub fn xnorm(eta: &PairTrajectory, lambda: f64) -> f64 {
    let grid = eta.grid();
    eta.times
        .iter()
        .zip(&eta.pairs)
        .map(|(&t, p)| (lambda * t).exp() * pair_weighted_norm(grid, p))
        .fold(0.0, f64::max)
}

fn pair_weighted_norm(grid: &Grid, p: &GaugePair) -> f64 {
    let mut total = 0.0;
    for f in [&p.first, &p.second] {
        let c = f.spectrum();
        total += sobolev_norm_of_spectrum(grid, &c, 0);
        let d: f64 = c
            .iter()
            .zip(grid.wavenumbers())
            .enumerate()
            .filter(|(j, _)| *j != grid.nyquist_index())
            .map(|(_, (c, &k))| k * k * c.norm_sqr())
            .sum();
        total += (grid.length() * d).sqrt();
    }
    total
}

/// `-i ∫_t^{Tmax} S(t - s) G(s) ds` by the backward trapezoid recursion
/// `J_n = S(-Δ)(J_{n+1} + (Δ/2)G_{n+1}) + (Δ/2)G_n`, `J(Tmax) = 0`.
pub fn duhamel_apply(g: &PairTrajectory) -> PairTrajectory {
    let grid = g.grid().clone();
    let nodes = g.len();
    let dt = if nodes > 1 { g.times[1] - g.times[0] } else { 0.0 };
    let mut out: Vec<Option<GaugePair>> = vec![None; nodes];
    let mut acc = [vec![C64::new(0.0, 0.0); grid.len()], vec![C64::new(0.0, 0.0); grid.len()]];
    let spectra = |p: &GaugePair| [p.first.spectrum(), p.second.spectrum()];
    let mut next = spectra(&g.pairs[nodes - 1]);
    let emit = |acc: &[Vec<C64>; 2], t: f64, variant| {
        let f = |c: &Vec<C64>| Field::from_spectrum(&grid, t, &c.iter().map(|v| -I * v).collect::<Vec<_>>());
        GaugePair::from_parts(f(&acc[0]), f(&acc[1]), variant)
    };
    out[nodes - 1] = Some(emit(&acc, g.times[nodes - 1], g.variant()));
    for n in (0..nodes - 1).rev() {
        let here = spectra(&g.pairs[n]);
        for c in 0..2 {
            for (a, v) in acc[c].iter_mut().zip(&next[c]) {
                *a += 0.5 * dt * v;
            }
            propagate_spectrum(&grid, &mut acc[c], -dt);
            for (a, v) in acc[c].iter_mut().zip(&here[c]) {
                *a += 0.5 * dt * v;
            }
        }
        out[n] = Some(emit(&acc, g.times[n], g.variant()));
        next = here;
    }
    PairTrajectory {
        times: g.times.clone(),
        pairs: out.into_iter().map(|p| p.expect("every node is filled")).collect(),
    }
}

/// `W` on the base grid and `H = e^{-λt}(m, n)` at each node.
pub fn build_w_h(spec: &TrainSpec, times: &[f64], grid: &Grid) -> Result<(PairTrajectory, PairTrajectory)> {
    spec.validate()?;
    let lambda = residual_weight(spec)?;
    let built: Result<Vec<(GaugePair, GaugePair)>> = times
        .par_iter()
        .map(|&t| {
            let src = profile_sources(spec, t, grid)?;
            let decay = C64::new((-lambda * t).exp(), 0.0);
            Ok((src.profile(), GaugePair::from_parts(src.m.scale(decay), src.n.scale(decay), spec.variant)))
        })
        .collect();
    let (w, h): (Vec<_>, Vec<_>) = built?.into_iter().unzip();
    Ok((PairTrajectory::new(times.to_vec(), w)?, PairTrajectory::new(times.to_vec(), h)?))
}

/// `W` sampled on the padded grid at each node.
struct FineProfile {
    first: Vec<Vec<C64>>,
    second: Vec<Vec<C64>>,
}

impl FineProfile {
    fn build(spec: &TrainSpec, times: &[f64], de: &Dealiaser) -> Result<Self> {
        let cols: Result<Vec<(Vec<C64>, Vec<C64>)>> =
            times.par_iter().map(|&t| gauged_profile(spec, t, de.fine())).collect();
        let (first, second) = cols?.into_iter().unzip();
        Ok(FineProfile { first, second })
    }
}

/// The Picard map `η ↦ duhamel_apply(H - [f(W + η) - f(W)])`.
struct PicardMap {
    de: Dealiaser,
    w: FineProfile,
    h: PairTrajectory,
    p: crate::nonlinear::PairPolynomial,
    q: crate::nonlinear::PairPolynomial,
}

impl PicardMap {
    fn forcing(&self, eta: &PairTrajectory) -> PairTrajectory {
        let pairs: Vec<GaugePair> = (0..eta.len())
            .into_par_iter()
            .map(|n| {
                let e = &eta.pairs[n];
                let t = eta.times[n];
                let (a, b) = (&self.w.first[n], &self.w.second[n]);
                let da = self.de.lift(&e.first);
                let db = self.de.lift(&e.second);
                let dp = self.p.difference_slices(a, b, &da, &db);
                let dq = self.q.difference_slices(a, b, &da, &db);
                let hp = &self.h.pairs[n];
                let first = hp.first.zip_map(&self.de.project(&dp, t), |h, d| h - d);
                let second = hp.second.zip_map(&self.de.project(&dq, t), |h, d| h - d);
                GaugePair::from_parts(first, second, e.variant)
            })
            .collect();
        PairTrajectory {
            times: eta.times.clone(),
            pairs,
        }
    }

    fn apply(&self, eta: &PairTrajectory) -> PairTrajectory {
        duhamel_apply(&self.forcing(eta))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PicardOptions {
    pub max_iters: usize,
    /// Stop once `‖η^{l+1} - η^l‖_X ≤ tol · ‖η^{l+1}‖_X`.
    pub tol: f64,
}

impl Default for PicardOptions {
    fn default() -> Self {
        PicardOptions { max_iters: 30, tol: 1e-10 }
    }
}

/// Iterates the Picard map from `η⁰ = 0` on the nodes of `[t0, tmax]`.
///
/// Two consecutive contraction ratios at or above one abort the solve with
/// [`Error::ContractionFailure`]; running out of iterations is reported with
/// `converged = false`.
pub fn picard_solve(
    spec: &TrainSpec,
    grid: &Grid,
    t0: f64,
    tmax: f64,
    dt_s: f64,
    opts: PicardOptions,
) -> Result<(PairTrajectory, PicardReport)> {
    spec.validate()?;
    let times = PairTrajectory::nodes(t0, tmax, dt_s)?;
    let lambda = residual_weight(spec)?;
    let de = Dealiaser::new(grid);
    let (_, h) = build_w_h(spec, &times, grid)?;
    let (p, q) = gauged_system(spec.variant, spec.b);
    let map = PicardMap {
        w: FineProfile::build(spec, &times, &de)?,
        de,
        h,
        p,
        q,
    };

    let mut report = PicardReport {
        lambda,
        ..PicardReport::default()
    };
    let mut eta = PairTrajectory::zeros(grid, &times, spec.variant);
    let mut prev_diff: Option<f64> = None;
    let mut strikes = 0;
    for _ in 0..opts.max_iters.max(1) {
        let next = map.apply(&eta);
        let diff = xnorm(&next.sub(&eta), lambda);
        let size = xnorm(&next, lambda);
        report.iterates += 1;
        report.xnorms.push(size);
        if let Some(d) = prev_diff {
            let ratio = if d == 0.0 { 0.0 } else { diff / d };
            report.ratios.push(ratio);
            strikes = if ratio >= 1.0 { strikes + 1 } else { 0 };
        }
        prev_diff = Some(diff);
        eta = next;
        if diff == 0.0 || diff <= opts.tol * size {
            report.converged = true;
            break;
        }
        if strikes >= 2 {
            report.final_defect = xnorm(&eta.sub(&map.apply(&eta)), lambda);
            return Err(Error::ContractionFailure {
                report: Box::new(report),
            });
        }
    }
    report.final_defect = xnorm(&eta.sub(&map.apply(&eta)), lambda);
    Ok((eta, report))
}

/// Synthesized solution compared with the train profile.
#[derive(Debug, Clone, Serialize)]
pub struct Synthesis {
    pub times: Vec<f64>,
    /// `‖u(t) - R(t)‖_{H¹}`
    pub distance: Vec<f64>,
    /// Relation defect of `(first + h, second + k)` at each node.
    pub relation_defect: Vec<f64>,
    /// `u(t) - R(t)` at each node.
    #[serde(skip)]
    pub deviation: Vec<Field>,
}

impl Synthesis {
    /// Log-linear fit of the distance over nodes in `[from, to]`, and the
    /// smallest `κ` with `distance ≤ κ e^{-λt}` there.
    pub fn fit(&self, from: f64, to: f64, lambda: f64) -> Result<(DecayFit, f64)> {
        let (t, d): (Vec<f64>, Vec<f64>) = self
            .times
            .iter()
            .zip(&self.distance)
            .filter(|(t, _)| **t >= from - 1e-12 && **t <= to + 1e-12)
            .map(|(t, d)| (*t, *d))
            .unzip();
        let fit = fit_decay(&t, &d)?;
        let kappa = t.iter().zip(&d).map(|(t, d)| d * (lambda * t).exp()).fold(0.0, f64::max);
        Ok((fit, kappa))
    }
}

/// Builds `u` from `W + η` and measures it against the profile.
///
/// dnls1: with `I_R = ∫|R|²` and `ΔI = ∫(2Re(h̄φ̃) + |φ̃|²)`,
/// `u - R = e^{-(i/2)(I_R + ΔI)}φ̃ + (e^{-(i/2)ΔI} - 1)R`, so the difference
/// is formed without subtracting two O(1) fields. dnls2: `u - V = ũ`.
pub fn synthesize(spec: &TrainSpec, eta: &PairTrajectory) -> Result<Synthesis> {
    spec.validate()?;
    let grid = eta.grid().clone();
    let s = match spec.variant {
        EquationVariant::Dnls1 => -1.0,
        EquationVariant::Dnls2 => 1.0,
    };
    let rows: Result<Vec<(Field, f64)>> = eta
        .times
        .par_iter()
        .zip(&eta.pairs)
        .map(|(&t, e)| {
            let samples = TrainSamples::new(spec, t, &grid, TAIL_TOLERANCE)?;
            let r = samples.value();
            let (h, _) = gauged_profile(spec, t, &grid)?;
            let et = e.first.values();
            let diff: Vec<C64> = match spec.variant {
                EquationVariant::Dnls1 => {
                    let ir = samples.mass_phase()?;
                    let dens: Vec<f64> = (0..grid.len())
                        .map(|j| 2.0 * (h[j].conj() * et[j]).re + et[j].norm_sqr())
                        .collect();
                    let di = crate::spectral::cumulative_integral_corrected(
                        &grid,
                        &dens,
                        crate::spectral::Anchor::Left,
                        f64::INFINITY,
                    )?;
                    (0..grid.len())
                        .map(|j| {
                            let back = C64::from_polar(1.0, -0.5 * (ir[j] + di[j]));
                            let q = 0.25 * di[j];
                            let em1 = -2.0 * I * q.sin() * C64::from_polar(1.0, -q);
                            back * et[j] + em1 * r[j]
                        })
                        .collect()
                }
                EquationVariant::Dnls2 => et.to_vec(),
            };
            let deviation = Field::from_parts(&grid, t, diff);
            // ψ̃ - φ̃_x ∓ (i/2)(|h + φ̃|²(h + φ̃) - |h|²h); the profile part vanishes identically
            let ex = e.first.dx();
            let defect: Vec<C64> = (0..grid.len())
                .map(|j| {
                    let (hj, d) = (h[j], et[j]);
                    let full = hj + d;
                    let cubic = full.norm_sqr() * d + (full.norm_sqr() - hj.norm_sqr()) * hj;
                    e.second.values()[j] - ex.values()[j] - s * 0.5 * I * cubic
                })
                .collect();
            Ok((deviation, Field::from_parts(&grid, t, defect).l2_norm()))
        })
        .collect();
    let (deviation, relation_defect): (Vec<Field>, Vec<f64>) = rows?.into_iter().unzip();
    Ok(Synthesis {
        times: eta.times.clone(),
        distance: deviation.iter().map(Field::h1_norm).collect(),
        relation_defect,
        deviation,
    })
}
