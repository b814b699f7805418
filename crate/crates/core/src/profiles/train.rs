use serde::{Deserialize, Serialize};

use super::{invalid, EquationVariant, KinkParams, KinkProfile, Orientation, SolitonParams};
use super::{SolitonProfile, Validation};
use crate::error::{Boundary, Error, Result};
use crate::spectral::{Field, Grid, C64, I};

/// One building block of a train.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Member {
    Soliton(SolitonParams),
    Kink(KinkParams),
}

impl Member {
    pub fn omega(&self) -> f64 {
        match self {
            Member::Soliton(p) => p.omega,
            Member::Kink(k) => k.omega0,
        }
    }

    pub fn speed(&self) -> f64 {
        match self {
            Member::Soliton(p) => p.c,
            Member::Kink(k) => k.c0,
        }
    }

    /// `√(4ω - c²)`; for a kink this is `c₀/√γ`.
    pub fn h(&self) -> f64 {
        match self {
            Member::Soliton(p) => p.h(),
            Member::Kink(k) => k.h(),
        }
    }

    pub fn label(&self, index: usize) -> String {
        match self {
            Member::Soliton(_) => format!("soliton {index}"),
            Member::Kink(_) => "kink".to_string(),
        }
    }

    pub fn profile(&self) -> Result<MemberProfile> {
        let shape = match self {
            Member::Soliton(p) => Shape::Soliton(p.profile()?),
            Member::Kink(k) => {
                if k.orientation != Orientation::Falling {
                    return Err(Error::UnsupportedOrientation(
                        "kink fields need the plateau at -∞ (falling orientation)".into(),
                    ));
                }
                Shape::Kink(k.profile()?)
            }
        };
        let (theta, x0) = match self {
            Member::Soliton(p) => (p.theta, p.x0),
            Member::Kink(k) => (k.theta0, k.x0),
        };
        Ok(MemberProfile {
            shape,
            omega: self.omega(),
            c: self.speed(),
            theta,
            x0,
        })
    }

    /// Samples the member on `grid` at time `t`, checking that it has decayed
    /// below `tail` at each boundary where it is expected to vanish.
    pub fn field(&self, t: f64, grid: &Grid, tail: f64) -> Result<Field> {
        let prof = self.profile()?;
        let values: Vec<C64> = grid.points().iter().map(|&x| prof.eval(t, x).value).collect();
        prof.check_tails(&values, tail, "member")?;
        Field::new(grid, t, values)
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Soliton(SolitonProfile),
    Kink(KinkProfile),
}

/// Member evaluated at a point: value and analytic derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MemberSample {
    pub value: C64,
    pub dx: C64,
    pub dxx: C64,
    pub dt: C64,
}

/// Columns of [`MemberSample`] over a set of points.
#[derive(Debug, Clone, Default)]
pub struct MemberColumns {
    pub value: Vec<C64>,
    pub dx: Vec<C64>,
    pub dxx: Vec<C64>,
    pub dt: Vec<C64>,
}

/// A member ready for pointwise evaluation.
#[derive(Debug, Clone, Copy)]
pub struct MemberProfile {
    shape: Shape,
    omega: f64,
    c: f64,
    theta: f64,
    x0: f64,
}

impl MemberProfile {
    pub fn is_kink(&self) -> bool {
        matches!(self.shape, Shape::Kink(_))
    }

    pub fn center(&self, t: f64) -> f64 {
        self.x0 + self.c * t
    }

    /// `R = e^{i(θ + ωt)} φ(x - x₀ - ct)`, with `R_t = iωR - cR_x`.
    pub fn eval(&self, t: f64, x: f64) -> MemberSample {
        let y = x - self.center(t);
        let s = match &self.shape {
            Shape::Soliton(p) => p.sample(y),
            Shape::Kink(k) => k.sample(y),
        };
        let rot = C64::from_polar(1.0, self.theta + self.omega * t);
        let value = rot * s.value;
        let dx = rot * s.d1;
        MemberSample {
            value,
            dx,
            dxx: rot * s.d2,
            dt: I * self.omega * value - self.c * dx,
        }
    }

    /// Mass integral of the member anchored where it decays: from -∞ for
    /// dnls1 solitons, from +∞ for dnls2 solitons and kinks.
    pub fn anchored_mass(&self, t: f64, x: f64) -> f64 {
        let y = x - self.center(t);
        match &self.shape {
            Shape::Soliton(p) => p.anchored_mass(y),
            Shape::Kink(k) => k.anchored_mass(y),
        }
    }

    pub fn speed(&self) -> f64 {
        self.c
    }

    pub fn columns(&self, t: f64, xs: &[f64]) -> MemberColumns {
        let mut out = MemberColumns {
            value: Vec::with_capacity(xs.len()),
            dx: Vec::with_capacity(xs.len()),
            dxx: Vec::with_capacity(xs.len()),
            dt: Vec::with_capacity(xs.len()),
        };
        for &x in xs {
            let s = self.eval(t, x);
            out.value.push(s.value);
            out.dx.push(s.dx);
            out.dxx.push(s.dxx);
            out.dt.push(s.dt);
        }
        out
    }

    pub(crate) fn check_tails(&self, values: &[C64], tail: f64, what: &str) -> Result<()> {
        let (first, last) = (values[0].norm(), values[values.len() - 1].norm());
        if !self.is_kink() && first > tail {
            return Err(Error::DecayViolation {
                what: what.to_string(),
                boundary: Boundary::Left,
                value: first,
                tolerance: tail,
            });
        }
        if last > tail {
            return Err(Error::DecayViolation {
                what: what.to_string(),
                boundary: Boundary::Right,
                value: last,
                tolerance: tail,
            });
        }
        Ok(())
    }
}

/// An optional kink (index 0) followed by `K ≥ 1` solitons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSpec {
    pub variant: EquationVariant,
    pub b: f64,
    #[serde(default)]
    pub kink: Option<KinkParams>,
    pub solitons: Vec<SolitonParams>,
}

impl TrainSpec {
    pub fn new(variant: EquationVariant, b: f64, solitons: Vec<SolitonParams>) -> Self {
        TrainSpec {
            variant,
            b,
            kink: None,
            solitons,
        }
    }

    pub fn with_kink(mut self, kink: KinkParams) -> Self {
        self.kink = Some(kink);
        self
    }

    pub fn members(&self) -> Vec<Member> {
        self.kink
            .iter()
            .map(|k| Member::Kink(*k))
            .chain(self.solitons.iter().map(|s| Member::Soliton(*s)))
            .collect()
    }

    pub fn member_profiles(&self) -> Result<Vec<MemberProfile>> {
        self.members().iter().map(Member::profile).collect()
    }

    pub fn len(&self) -> usize {
        self.solitons.len() + usize::from(self.kink.is_some())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn gamma(&self) -> f64 {
        self.variant.gamma(self.b)
    }

    pub fn validate(&self) -> Result<()> {
        if self.solitons.is_empty() {
            return Err(invalid("a train needs at least one soliton"));
        }
        for (j, s) in self.solitons.iter().enumerate() {
            let j = j + 1;
            if s.variant != self.variant {
                return Err(invalid(format!("soliton {j} has variant {}, train has {}", s.variant, self.variant)));
            }
            if s.b != self.b {
                return Err(invalid(format!("soliton {j} has b = {}, train has b = {}", s.b, self.b)));
            }
            match s.validate() {
                Validation::Valid => {}
                Validation::Algebraic => {
                    return Err(invalid(format!(
                        "soliton {j} is algebraic (c = 2√ω) and cannot join a train"
                    )))
                }
                Validation::Violation(msg) => return Err(invalid(format!("soliton {j}: {msg}"))),
            }
            if s.c == 0.0 {
                return Err(invalid(format!("soliton {j} has zero speed")));
            }
        }
        let members = self.members();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                if members[a].speed() == members[b].speed() {
                    return Err(invalid(format!(
                        "members {a} and {b} share speed {}",
                        members[a].speed()
                    )));
                }
            }
        }
        if let Some(k) = &self.kink {
            if self.variant != EquationVariant::Dnls2 {
                return Err(invalid("kink trains exist only for dnls2"));
            }
            if k.b != self.b {
                return Err(invalid(format!("kink has b = {}, train has b = {}", k.b, self.b)));
            }
            k.validate()?;
            if k.orientation != Orientation::Falling {
                return Err(Error::UnsupportedOrientation(
                    "trains need the kink plateau at -∞ (falling orientation)".into(),
                ));
            }
            if let Some((j, s)) = self.solitons.iter().enumerate().find(|(_, s)| s.c <= k.c0) {
                return Err(invalid(format!(
                    "soliton {} speed {} must exceed the kink speed {}",
                    j + 1,
                    s.c,
                    k.c0
                )));
            }
        }
        Ok(())
    }

    /// Sum of member fields on `grid` at time `t`, with a tail check per
    /// member.
    pub fn profile_field(&self, t: f64, grid: &Grid, tail: f64) -> Result<Field> {
        let xs = grid.points();
        let mut sum = vec![C64::new(0.0, 0.0); xs.len()];
        let first = usize::from(self.kink.is_none());
        for (j, (m, p)) in self.members().iter().zip(self.member_profiles()?).enumerate() {
            let col: Vec<C64> = xs.iter().map(|&x| p.eval(t, x).value).collect();
            p.check_tails(&col, tail, &m.label(j + first))?;
            for (s, v) in sum.iter_mut().zip(col) {
                *s += v;
            }
        }
        Field::new(grid, t, sum)
    }

    /// Value and `x`-derivative of the summed profile at the points `xs`.
    pub fn profile_with_derivative(&self, t: f64, xs: &[f64]) -> Result<(Vec<C64>, Vec<C64>)> {
        let profiles = self.member_profiles()?;
        let mut v = vec![C64::new(0.0, 0.0); xs.len()];
        let mut d = vec![C64::new(0.0, 0.0); xs.len()];
        for p in &profiles {
            for (j, &x) in xs.iter().enumerate() {
                let s = p.eval(t, x);
                v[j] += s.value;
                d[j] += s.dx;
            }
        }
        Ok((v, d))
    }
}

/// `v* = min_{j≠k} h_j |c_j - c_k|` over ordered pairs, kink included.
pub fn v_star(spec: &TrainSpec) -> Result<f64> {
    let members = spec.members();
    if members.len() < 2 {
        return Err(Error::InsufficientMembers(members.len()));
    }
    let mut best = f64::INFINITY;
    for (j, a) in members.iter().enumerate() {
        for (k, b) in members.iter().enumerate() {
            if j != k {
                best = best.min(a.h() * (a.speed() - b.speed()).abs());
            }
        }
    }
    Ok(best)
}

/// `λ = v*/16`.
pub fn lambda_of(spec: &TrainSpec) -> Result<f64> {
    Ok(v_star(spec)? / 16.0)
}

/// `c_j = M d_j`, `ω_j = (h_j² + M²d_j²)/4`.
pub fn scaled_family(
    variant: EquationVariant,
    d: &[f64],
    h: &[f64],
    m: f64,
    b: f64,
) -> Result<Vec<SolitonParams>> {
    if d.len() != h.len() || d.is_empty() {
        return Err(Error::InvalidFamily(format!(
            "need equal nonempty d and h lists (got {} and {})",
            d.len(),
            h.len()
        )));
    }
    if !(m > 0.0) {
        return Err(Error::InvalidFamily(format!("scale M must be positive (got {m})")));
    }
    for (j, &dj) in d.iter().enumerate() {
        if dj == 0.0 || !dj.is_finite() {
            return Err(Error::InvalidFamily(format!("d[{j}] = {dj} must be finite and nonzero")));
        }
        if variant == EquationVariant::Dnls2 && dj < 0.0 {
            return Err(Error::InvalidFamily(format!("dnls2 families need d > 0 (d[{j}] = {dj})")));
        }
        if !(h[j] > 0.0) {
            return Err(Error::InvalidFamily(format!("h[{j}] = {} must be positive", h[j])));
        }
        if d[..j].contains(&dj) {
            return Err(Error::InvalidFamily(format!("duplicate speed ratio d = {dj}")));
        }
    }
    Ok(d.iter()
        .zip(h)
        .map(|(&dj, &hj)| {
            let c = m * dj;
            SolitonParams::new(variant, 0.25 * (hj * hj + c * c), c, b)
        })
        .collect())
}

/// `(1 + ‖R_x‖∞)(1 + ‖R‖∞) + ‖R‖∞⁴`, with sup norms taken over the grid and
/// all sampled times.
pub fn separation_lhs(spec: &TrainSpec, grid: &Grid, times: &[f64]) -> Result<f64> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("separation_lhs needs at least one time".into()));
    }
    spec.validate()?;
    let xs = grid.points();
    let (mut r, mut rx) = (0.0f64, 0.0f64);
    for &t in times {
        spec.profile_field(t, grid, crate::spectral::TAIL_TOLERANCE)?;
        let (v, d) = spec.profile_with_derivative(t, &xs)?;
        r = v.iter().fold(r, |m, z| m.max(z.norm()));
        rx = d.iter().fold(rx, |m, z| m.max(z.norm()));
    }
    Ok((1.0 + rx) * (1.0 + r) + r.powi(4))
}
