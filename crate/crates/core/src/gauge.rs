//! Gauge transforms, the gauged nonlinearities `(P, Q)`, the source terms
//! `(m, n)` generated by a train profile, and the relation defect.
//!
//! dnls1: `φ = e^{(i/2)∫_{-∞}^x |u|²} u`, `ψ = φ_x - (i/2)|φ|²φ`.
//! dnls2: `u` is kept and `v = u_x + (i/2)|u|²u`.
//! In both cases `L = i∂_t + ∂_xx` maps the pair to `(P, Q)`.

use crate::error::{Boundary, Error, Result};
use crate::nonlinear::gauged_system;
use crate::profiles::{lambda_of, EquationVariant, TrainSpec};
use crate::spectral::{cumulative_integral_corrected, Anchor, Dealiaser, Field, Grid, C64, I, TAIL_TOLERANCE};
use crate::trains::TrainSamples;

/// `(φ, ψ)` for dnls1 or `(u, v)` for dnls2; also used for `W`, `H`, `η`.
#[derive(Debug, Clone)]
pub struct GaugePair {
    pub first: Field,
    pub second: Field,
    pub variant: EquationVariant,
}

impl GaugePair {
    pub fn new(first: Field, second: Field, variant: EquationVariant) -> Result<Self> {
        if first.grid() != second.grid() {
            return Err(Error::InvalidArgument("pair components live on different grids".into()));
        }
        if first.t() != second.t() {
            return Err(Error::InvalidArgument(format!(
                "pair components carry different times ({} and {})",
                first.t(),
                second.t()
            )));
        }
        Ok(GaugePair { first, second, variant })
    }

    pub(crate) fn from_parts(first: Field, second: Field, variant: EquationVariant) -> Self {
        GaugePair { first, second, variant }
    }

    pub fn grid(&self) -> &Grid {
        self.first.grid()
    }

    pub fn t(&self) -> f64 {
        self.first.t()
    }

    /// `‖first‖_{H^s} + ‖second‖_{H^s}`.
    pub fn sobolev_norm(&self, s: u32) -> Result<f64> {
        Ok(self.first.sobolev_norm(s)? + self.second.sobolev_norm(s)?)
    }
}

/// `+1` for dnls2 (`v = u_x + (i/2)|u|²u`), `-1` for dnls1.
fn relation_sign(variant: EquationVariant) -> f64 {
    match variant {
        EquationVariant::Dnls1 => -1.0,
        EquationVariant::Dnls2 => 1.0,
    }
}

fn left_tail(u: &Field, what: &str) -> Result<()> {
    let v = u.values()[0].norm();
    if v > TAIL_TOLERANCE || !v.is_finite() {
        return Err(Error::DecayViolation {
            what: what.to_string(),
            boundary: Boundary::Left,
            value: v,
            tolerance: TAIL_TOLERANCE,
        });
    }
    Ok(())
}

/// `∫_{-∞}^x |f|²` on the grid of `f`.
fn left_mass(f: &Field, what: &str) -> Result<Vec<f64>> {
    left_tail(f, what)?;
    cumulative_integral_corrected(f.grid(), &f.abs_sq(), Anchor::Left, f64::INFINITY)
}

fn rotate(f: &Field, phase: &[f64], scale: f64) -> Field {
    let v = f
        .values()
        .iter()
        .zip(phase)
        .map(|(z, p)| z * C64::from_polar(1.0, scale * p))
        .collect();
    Field::from_parts(f.grid(), f.t(), v)
}

/// `second = ∂first ± (i/2)|first|²first`.
fn second_from_first(first: &Field, variant: EquationVariant) -> Field {
    let s = relation_sign(variant);
    first.dx().zip_map(first, |d, f| d + s * 0.5 * I * f.norm_sqr() * f)
}

pub fn to_gauge(u: &Field, variant: EquationVariant) -> Result<GaugePair> {
    let first = match variant {
        EquationVariant::Dnls1 => rotate(u, &left_mass(u, "gauge phase")?, 0.5),
        EquationVariant::Dnls2 => u.clone(),
    };
    let second = second_from_first(&first, variant);
    Ok(GaugePair::from_parts(first, second, variant))
}

pub fn from_gauge(pair: &GaugePair) -> Result<Field> {
    match pair.variant {
        EquationVariant::Dnls1 => Ok(rotate(&pair.first, &left_mass(&pair.first, "inverse gauge phase")?, -0.5)),
        EquationVariant::Dnls2 => Ok(pair.first.clone()),
    }
}

/// Pointwise `(P, Q)` formed on the padded grid.
pub fn nonlinearity(pair: &GaugePair, b: f64) -> GaugePair {
    let (p, q) = gauged_system(pair.variant, b);
    let de = Dealiaser::new(pair.grid());
    let a = de.lift(&pair.first);
    let s = de.lift(&pair.second);
    GaugePair::from_parts(
        de.project(&p.eval_slices(&a, &s), pair.t()),
        de.project(&q.eval_slices(&a, &s), pair.t()),
        pair.variant,
    )
}

/// `‖second - (∂first ± (i/2)|first|²first)‖_{L²}`.
pub fn relation_defect(pair: &GaugePair) -> f64 {
    (&pair.second - &second_from_first(&pair.first, pair.variant)).l2_norm()
}

/// Gauged profile `W = (h, k)` sampled on `grid`.
///
/// dnls1: `h = e^{(i/2)I}R` with `I = ∫_{-∞}^x |R|²`, and
/// `k = h_x - (i/2)|h|²h = e^{(i/2)I}R_x`. dnls2: `h = V`,
/// `k = V_x + (i/2)|V|²V`. Derivatives come from the member formulas, so the
/// grid may be the padded one and kinks are allowed.
pub fn gauged_profile(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<(Vec<C64>, Vec<C64>)> {
    let samples = TrainSamples::new(spec, t, grid, TAIL_TOLERANCE)?;
    gauged_from_samples(&samples, spec.variant)
}

fn gauged_from_samples(samples: &TrainSamples, variant: EquationVariant) -> Result<(Vec<C64>, Vec<C64>)> {
    let (r, rx) = (samples.value(), samples.dx());
    Ok(match variant {
        EquationVariant::Dnls1 => {
            let mass = samples.mass_phase()?;
            let rot: Vec<C64> = mass.iter().map(|m| C64::from_polar(1.0, 0.5 * m)).collect();
            (
                r.iter().zip(&rot).map(|(a, b)| a * b).collect(),
                rx.iter().zip(&rot).map(|(a, b)| a * b).collect(),
            )
        }
        EquationVariant::Dnls2 => {
            let k = r.iter().zip(&rx).map(|(v, d)| d + 0.5 * I * v.norm_sqr() * v).collect();
            (r, k)
        }
    })
}

/// Residual amplitude and source terms of a train at time `t`.
#[derive(Debug, Clone)]
pub struct ProfileSources {
    /// `e^{λt}(χ₁ + χ₂)`
    pub v_res: Field,
    pub m: Field,
    pub n: Field,
    /// Gauged profile `W = (h, k)` on the same grid.
    pub h: Field,
    pub k: Field,
    pub lambda: f64,
    pub variant: EquationVariant,
}

impl ProfileSources {
    /// `(m, n)` as a pair.
    pub fn sources(&self) -> GaugePair {
        GaugePair::from_parts(self.m.clone(), self.n.clone(), self.variant)
    }

    /// `W = (h, k)` as a pair.
    pub fn profile(&self) -> GaugePair {
        GaugePair::from_parts(self.h.clone(), self.k.clone(), self.variant)
    }
}

/// The residual weight `λ` of a spec; single-member specs carry no residual
/// and get `0`.
pub fn residual_weight(spec: &TrainSpec) -> Result<f64> {
    if spec.len() < 2 {
        Ok(0.0)
    } else {
        lambda_of(spec)
    }
}

/// `v_res`, `m` and `n` of the profile equations
/// `L h - P(h, k) = e^{-λt} m`, `L k - Q(h, k) = e^{-λt} n`.
///
/// dnls1: `m = v_res e^{(i/2)I} - h ∫_{-∞}^x Im(v_res R̄)`,
/// `n = m_x - i|h|²m + (i/2)h²m̄`. dnls2: `m = v_res`,
/// `n = m_x + i|h|²m - (i/2)h²m̄`.
pub fn profile_sources(spec: &TrainSpec, t: f64, grid: &Grid) -> Result<ProfileSources> {
    spec.validate()?;
    let lambda = residual_weight(spec)?;
    let de = Dealiaser::new(grid);
    let fine = TrainSamples::new(spec, t, de.fine(), TAIL_TOLERANCE)?;
    let (c1, c2) = fine.chi();
    let weight = (lambda * t).exp();
    let chi: Vec<C64> = c1.iter().zip(&c2).map(|(a, b)| (a + b) * weight).collect();
    let v_res = de.project(&chi, t);

    let base = TrainSamples::new(spec, t, grid, TAIL_TOLERANCE)?;
    let (h, k) = gauged_from_samples(&base, spec.variant)?;
    let m = match spec.variant {
        EquationVariant::Dnls1 => {
            let r = base.value();
            let mass = base.mass_phase()?;
            let im: Vec<f64> = v_res.values().iter().zip(&r).map(|(v, r)| (v * r.conj()).im).collect();
            let acc = cumulative_integral_corrected(grid, &im, Anchor::Left, f64::INFINITY)?;
            (0..grid.len())
                .map(|j| v_res.values()[j] * C64::from_polar(1.0, 0.5 * mass[j]) - h[j] * acc[j])
                .collect()
        }
        EquationVariant::Dnls2 => v_res.values().to_vec(),
    };
    let m = Field::from_parts(grid, t, m);
    let s = relation_sign(spec.variant);
    let mx = m.dx();
    let n: Vec<C64> = (0..grid.len())
        .map(|j| {
            let (hj, mj) = (h[j], m.values()[j]);
            mx.values()[j] - s * I * hj.norm_sqr() * mj + s * 0.5 * I * hj * hj * mj.conj()
        })
        .collect();
    Ok(ProfileSources {
        v_res,
        n: Field::from_parts(grid, t, n),
        m,
        h: Field::from_parts(grid, t, h),
        k: Field::from_parts(grid, t, k),
        lambda,
        variant: spec.variant,
    })
}
