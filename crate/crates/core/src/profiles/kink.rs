//! Half-kink profiles for dnls2.
//!
//! With `f(s) = (c/2)s³ - (3/16)γs⁵` and `F(s) = (c/8)s⁴ - (γ/32)s⁶`, the
//! zero-energy first integral of `-Φ'' + ω̃Φ - f(Φ) = 0` reads
//! `(Φ')² = Φ²(ω̃ - (c/4)Φ² + (γ/16)Φ⁴)`. At `ω̃ = ω̃₁ = c²/(4γ)` the
//! quadratic in `y = Φ²` is `(γ/16)(y - ζ²)²` with `ζ² = 2c/γ`, so
//! `y' = ±(√γ/2) y (ζ² - y)`: a logistic equation whose solution through
//! `y(x₀) = ζ²/2` is `ζ² / (1 + e^{∓κ(x - x₀)})` with `κ = c/√γ`.

use serde::{Deserialize, Serialize};

use super::{EquationVariant, ProfileSample};
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Zero at -∞, plateau ζ at +∞.
    Rising,
    /// Plateau ζ at -∞, zero at +∞.
    Falling,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinkParams {
    pub omega0: f64,
    pub c0: f64,
    #[serde(default)]
    pub theta0: f64,
    #[serde(default)]
    pub x0: f64,
    pub b: f64,
    pub orientation: Orientation,
}

impl KinkParams {
    /// Kink with speed `c0`; the frequency is fixed by `ω₀ = c₀²/4 + ω̃₁`.
    pub fn new(c0: f64, b: f64, orientation: Orientation) -> Self {
        let gamma = EquationVariant::Dnls2.gamma(b);
        KinkParams {
            omega0: 0.25 * c0 * c0 + c0 * c0 / (4.0 * gamma),
            c0,
            theta0: 0.0,
            x0: 0.0,
            b,
            orientation,
        }
    }

    pub fn with_phase(mut self, theta0: f64) -> Self {
        self.theta0 = theta0;
        self
    }

    pub fn with_offset(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    /// `γ = 5/3 - 16b/3`.
    pub fn gamma(&self) -> f64 {
        EquationVariant::Dnls2.gamma(self.b)
    }

    /// `ω̃₁ = c₀²/(4γ)`.
    pub fn omega_tilde(&self) -> f64 {
        self.c0 * self.c0 / (4.0 * self.gamma())
    }

    /// Plateau height `ζ = √(2c₀/γ)`.
    pub fn zeta(&self) -> f64 {
        (2.0 * self.c0 / self.gamma()).sqrt()
    }

    /// Logistic rate `κ = c₀/√γ` of `Φ²`.
    pub fn kappa(&self) -> f64 {
        self.c0 / self.gamma().sqrt()
    }

    /// `h₀ = √(4ω₀ - c₀²)`, the kink's weight in v*.
    pub fn h(&self) -> f64 {
        (4.0 * self.omega0 - self.c0 * self.c0).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        let gamma = self.gamma();
        if !(gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half-kink needs γ > 0 (γ = {gamma})"
            )));
        }
        if !(self.c0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "half-kink needs c₀ > 0 (c₀ = {})",
                self.c0
            )));
        }
        let want = 0.25 * self.c0 * self.c0 + self.omega_tilde();
        if !((self.omega0 - want).abs() <= 1e-12 * want.max(1.0)) {
            return Err(Error::InvalidParameter(format!(
                "ω₀ = {} is inconsistent with c₀²/4 + ω̃₁ = {want}",
                self.omega0
            )));
        }
        if ![self.theta0, self.x0, self.b].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("kink parameters must be finite".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Result<KinkProfile> {
        self.validate()?;
        Ok(KinkProfile { params: *self })
    }
}

/// Closed-form evaluation of a centered half-kink `φ(y)` (`y = 0` at the
/// half-height point).
#[derive(Debug, Clone, Copy)]
pub struct KinkProfile {
    params: KinkParams,
}

impl KinkProfile {
    pub fn params(&self) -> &KinkParams {
        &self.params
    }

    fn signed(&self, y: f64) -> f64 {
        match self.params.orientation {
            Orientation::Rising => y,
            Orientation::Falling => -y,
        }
    }

    /// `Φ²(y)`, evaluated without overflow in either tail.
    pub fn modulus_sq(&self, y: f64) -> f64 {
        let z2 = self.params.zeta().powi(2);
        let s = self.params.kappa() * self.signed(y);
        if s >= 0.0 {
            z2 / (1.0 + (-s).exp())
        } else {
            let e = s.exp();
            z2 * e / (1.0 + e)
        }
    }

    /// `Φ(y)` and `Φ'(y)`; `Φ' = ±(√γ/4)Φ(ζ² - Φ²)`.
    pub fn modulus_with_derivative(&self, y: f64) -> (f64, f64) {
        let y2 = self.modulus_sq(y);
        let phi = y2.sqrt();
        let z2 = self.params.zeta().powi(2);
        let s = self.params.kappa() * self.signed(y);
        // ζ² - Φ² = ζ² / (1 + e^{s})
        let gap = if s <= 0.0 {
            z2 / (1.0 + s.exp())
        } else {
            let e = (-s).exp();
            z2 * e / (1.0 + e)
        };
        let sign = match self.params.orientation {
            Orientation::Rising => 1.0,
            Orientation::Falling => -1.0,
        };
        (phi, sign * 0.25 * self.params.gamma().sqrt() * phi * gap)
    }

    /// `Φ'' = ω̃₁Φ - (c/2)Φ³ + (3/16)γΦ⁵`.
    pub fn modulus_second_derivative(&self, phi: f64) -> f64 {
        let p = &self.params;
        p.omega_tilde() * phi - 0.5 * p.c0 * phi.powi(3) + 3.0 / 16.0 * p.gamma() * phi.powi(5)
    }

    /// `∫_{+∞}^y Φ²`; defined only for the falling orientation.
    pub fn anchored_mass(&self, y: f64) -> f64 {
        let z2 = self.params.zeta().powi(2);
        let k = self.params.kappa();
        // -(ζ²/κ) ln(1 + e^{-κy})
        let s = -k * y;
        let log1pexp = if s > 0.0 { s + (-s).exp().ln_1p() } else { s.exp().ln_1p() };
        -(z2 / k) * log1pexp
    }

    /// `φ = Φ exp(i(c/2)y - (i/4)∫_{+∞}^y Φ²)` and its first two
    /// derivatives.
    pub fn sample(&self, y: f64) -> ProfileSample {
        let c = self.params.c0;
        let (phi, dphi) = self.modulus_with_derivative(y);
        let ddphi = self.modulus_second_derivative(phi);
        let theta = 0.5 * c * y - 0.25 * self.anchored_mass(y);
        let dtheta = 0.5 * c - 0.25 * phi * phi;
        let ddtheta = -0.5 * phi * dphi;
        let rot = C64::from_polar(1.0, theta);
        ProfileSample {
            value: rot * phi,
            d1: rot * C64::new(dphi, dtheta * phi),
            d2: rot * C64::new(ddphi - dtheta * dtheta * phi, 2.0 * dtheta * dphi + ddtheta * phi),
        }
    }
}

/// Tolerances for the adaptive integration in [`halfkink_phi`].
const ODE_RTOL: f64 = 1e-13;
const ODE_ATOL: f64 = 1e-15;

/// Real samples of the half-kink modulus `Φ₀(x)` on `grid`, obtained by
/// integrating the reduced first-order equation for `y = Φ²` outward from
/// `y(x₀) = ζ²/2` with an adaptive Dormand–Prince 5(4) method.
pub fn halfkink_phi(kp: &KinkParams, grid: &Grid) -> Result<Field> {
    kp.validate()?;
    let z2 = kp.zeta().powi(2);
    let rate = 0.5 * kp.gamma().sqrt();
    // rising profile in the reflected coordinate s; falling maps x ↦ 2x₀ - x
    let rhs = move |y: f64| rate * y * (z2 - y);
    let coords: Vec<f64> = grid
        .points()
        .iter()
        .map(|&x| match kp.orientation {
            Orientation::Rising => x - kp.x0,
            Orientation::Falling => kp.x0 - x,
        })
        .collect();

    let mut values = vec![0.0; coords.len()];
    let mut order: Vec<usize> = (0..coords.len()).collect();
    order.sort_by(|&a, &b| coords[a].total_cmp(&coords[b]));
    let split = order.partition_point(|&j| coords[j] < 0.0);

    let mut forward = Dopri5::new(0.0, 0.5 * z2);
    for &j in &order[split..] {
        values[j] = forward.advance_to(coords[j], &rhs).sqrt();
    }
    let mut backward = Dopri5::new(0.0, 0.5 * z2);
    for &j in order[..split].iter().rev() {
        values[j] = backward.advance_to(coords[j], &rhs).sqrt();
    }
    Field::from_real(grid, 0.0, &values)
}

/// Minimal scalar Dormand–Prince 5(4) stepper with step-size control that
/// lands exactly on requested output points.
struct Dopri5 {
    x: f64,
    y: f64,
    h: f64,
}

impl Dopri5 {
    fn new(x: f64, y: f64) -> Self {
        Dopri5 { x, y, h: 1e-3 }
    }

    fn advance_to(&mut self, target: f64, f: &impl Fn(f64) -> f64) -> f64 {
        const A: [[f64; 6]; 6] = [
            [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
            [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
            [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
            [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
            [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
        ];
        const E: [f64; 7] = [
            71.0 / 57600.0,
            0.0,
            -71.0 / 16695.0,
            71.0 / 1920.0,
            -17253.0 / 339200.0,
            22.0 / 525.0,
            -1.0 / 40.0,
        ];
        let dir = if target >= self.x { 1.0 } else { -1.0 };
        self.h = dir * self.h.abs();
        while (target - self.x) * dir > 0.0 {
            let remaining = target - self.x;
            let mut h = self.h;
            let last = h.abs() >= remaining.abs();
            if last {
                h = remaining;
            }
            let mut k = [0.0; 7];
            k[0] = f(self.y);
            for s in 0..6 {
                let inc: f64 = (0..=s).map(|j| A[s][j] * k[j]).sum();
                k[s + 1] = f(self.y + h * inc);
            }
            // 5th-order solution is the last stage point (FSAL)
            let y5 = self.y + h * (0..6).map(|j| A[5][j] * k[j]).sum::<f64>();
            let err = h * (0..7).map(|j| E[j] * k[j]).sum::<f64>();
            let scale = ODE_ATOL + ODE_RTOL * self.y.abs().max(y5.abs());
            let ratio = (err / scale).abs();
            if ratio <= 1.0 {
                self.x = if last { target } else { self.x + h };
                self.y = y5;
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            if !last || ratio > 1.0 {
                self.h = h * factor;
            }
        }
        self.y
    }
}

/// Traveling half-kink `e^{i(θ₀ + ω₀t)} φ(x - x₀ - c₀t)` on `grid`.
///
/// Only the falling orientation is supported, since the phase integral is
/// anchored at +∞. The tail check applies to the decaying (right) end.
pub fn kink_field(kp: &KinkParams, t: f64, grid: &Grid) -> Result<Field> {
    if kp.orientation != Orientation::Falling {
        return Err(Error::UnsupportedOrientation(
            "kink fields need the plateau at -∞ (falling orientation)".into(),
        ));
    }
    let member = super::Member::Kink(*kp);
    member.field(t, grid, crate::spectral::TAIL_TOLERANCE)
}
