use serde::{Deserialize, Serialize};

use super::{EquationVariant, ProfileSample};
use crate::error::{Error, Result};
use crate::spectral::C64;

/// Parameters of one soliton `e^{iθ} e^{iωt} φ_{ω,c}(x - x₀ - ct)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolitonParams {
    pub variant: EquationVariant,
    pub omega: f64,
    pub c: f64,
    #[serde(default)]
    pub theta: f64,
    #[serde(default)]
    pub x0: f64,
    pub b: f64,
}

/// Outcome of checking a soliton against its existence window.
#[derive(Debug, Clone, PartialEq)]
pub enum Validation {
    Valid,
    /// `c = 2√ω` with γ > 0 (dnls1): the profile exists but decays only
    /// algebraically, so it may not join a train.
    Algebraic,
    Violation(String),
}

impl Validation {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validation::Valid)
    }
}

const ALGEBRAIC_TOL: f64 = 1e-12;

impl SolitonParams {
    pub fn new(variant: EquationVariant, omega: f64, c: f64, b: f64) -> Self {
        SolitonParams {
            variant,
            omega,
            c,
            theta: 0.0,
            x0: 0.0,
            b,
        }
    }

    pub fn with_phase(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_offset(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn gamma(&self) -> f64 {
        self.variant.gamma(self.b)
    }

    /// Width parameter `h = √(4ω - c²)`.
    pub fn h(&self) -> f64 {
        (4.0 * self.omega - self.c * self.c).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Validation {
        validate_soliton(self)
    }

    pub fn profile(&self) -> Result<SolitonProfile> {
        SolitonProfile::new(self)
    }
}

/// Checks `(ω, c)` against the existence window for the variant and the
/// sign of γ, naming the inequality that fails.
pub fn validate_soliton(p: &SolitonParams) -> Validation {
    let finite = [p.omega, p.c, p.theta, p.x0, p.b].iter().all(|v| v.is_finite());
    if !finite {
        return Validation::Violation("parameters must be finite".into());
    }
    if p.omega <= 0.0 {
        return Validation::Violation(format!("ω > 0 fails (ω = {})", p.omega));
    }
    let gamma = p.gamma();
    let edge = 2.0 * p.omega.sqrt();
    let c = p.c;
    match p.variant {
        EquationVariant::Dnls1 if gamma > 0.0 => {
            if c <= -edge {
                Validation::Violation(format!("-2√ω < c fails (c = {c}, 2√ω = {edge})"))
            } else if (c - edge).abs() <= ALGEBRAIC_TOL * edge {
                Validation::Algebraic
            } else if c > edge {
                Validation::Violation(format!("c ≤ 2√ω fails (c = {c}, 2√ω = {edge})"))
            } else {
                Validation::Valid
            }
        }
        EquationVariant::Dnls1 => {
            let s_star = (-gamma / (1.0 - gamma)).sqrt();
            if c <= -edge {
                Validation::Violation(format!("-2√ω < c fails (c = {c}, 2√ω = {edge})"))
            } else if c >= -2.0 * s_star * p.omega.sqrt() {
                Validation::Violation(format!(
                    "c < -2s*√ω fails for γ = {gamma} ≤ 0 (c = {c}, -2s*√ω = {})",
                    -2.0 * s_star * p.omega.sqrt()
                ))
            } else {
                Validation::Valid
            }
        }
        EquationVariant::Dnls2 => {
            if gamma <= 0.0 {
                return Validation::Violation(format!(
                    "γ > 0 fails (γ = {gamma}); dnls2 solitons need b < 5/16"
                ));
            }
            let s_star = (gamma / (1.0 + gamma)).sqrt();
            let lower = 2.0 * s_star * p.omega.sqrt();
            if c >= edge {
                Validation::Violation(format!("c < 2√ω fails (c = {c}, 2√ω = {edge})"))
            } else if c <= lower {
                Validation::Violation(format!("c > 2s*√ω fails (c = {c}, 2s*√ω = {lower})"))
            } else {
                Validation::Valid
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    /// `Φ² = 4h²E / (A(1+E²) + 2σcE)`, `E = e^{-h|y|}`; σ = -1 for dnls1,
    /// +1 for dnls2.
    Hyperbolic { a: f64, sigma: f64 },
    /// `Φ² = 4c / ((cy)² + γ)`.
    Algebraic,
}

/// Closed-form evaluation of a centered soliton profile `φ_{ω,c}(y)`.
///
/// The modulus, its derivatives and the phase integral are all evaluated
/// from closed forms, so samples can be taken at arbitrary points (padded
/// grids, translated frames) without quadrature error.
#[derive(Debug, Clone, Copy)]
pub struct SolitonProfile {
    variant: EquationVariant,
    omega: f64,
    c: f64,
    h: f64,
    gamma: f64,
    shape: Shape,
    /// Half of the total mass `∫Φ²`.
    half_mass: f64,
}

impl SolitonProfile {
    pub fn new(p: &SolitonParams) -> Result<Self> {
        let algebraic = match validate_soliton(p) {
            Validation::Valid => false,
            Validation::Algebraic => true,
            Validation::Violation(msg) => return Err(Error::InvalidParameter(msg)),
        };
        let gamma = p.gamma();
        let h = p.h();
        let c = p.c;
        let (shape, half_mass) = if algebraic {
            (Shape::Algebraic, 2.0 * std::f64::consts::PI / gamma.sqrt())
        } else {
            let sigma = match p.variant {
                EquationVariant::Dnls1 => -1.0,
                EquationVariant::Dnls2 => 1.0,
            };
            // A² = c² - σγh²  (dnls1: c² + γh², dnls2: c² - γh²)
            let a2 = c * c - sigma * gamma * h * h;
            if a2 <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "profile coefficient c² ∓ γh² = {a2} must be positive"
                )));
            }
            let a = a2.sqrt();
            let shape = Shape::Hyperbolic { a, sigma };
            let prof = SolitonProfile {
                variant: p.variant,
                omega: p.omega,
                c,
                h,
                gamma,
                shape,
                half_mass: 0.0,
            };
            (shape, prof.odd_mass(f64::INFINITY))
        };
        Ok(SolitonProfile {
            variant: p.variant,
            omega: p.omega,
            c,
            h,
            gamma,
            shape,
            half_mass,
        })
    }

    pub fn variant(&self) -> EquationVariant {
        self.variant
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn speed(&self) -> f64 {
        self.c
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_algebraic(&self) -> bool {
        matches!(self.shape, Shape::Algebraic)
    }

    /// Total mass `∫ Φ² dy`.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.half_mass
    }

    /// `Φ(y)` and `Φ'(y)`.
    pub fn modulus_with_derivative(&self, y: f64) -> (f64, f64) {
        match self.shape {
            Shape::Hyperbolic { a, sigma } => {
                let h = self.h;
                let e = (-h * y.abs()).exp();
                let g = a * (1.0 + e * e) + 2.0 * sigma * self.c * e;
                let phi = (4.0 * h * h * e / g).sqrt();
                let dphi = -y.signum() * h * h * a * (1.0 - e * e) * e.sqrt() / g.powf(1.5);
                (phi, dphi)
            }
            Shape::Algebraic => {
                let c = self.c;
                let q = (c * y).powi(2) + self.gamma;
                let phi = 2.0 * c.sqrt() / q.sqrt();
                let dphi = -2.0 * c.sqrt() * c * c * y / q.powf(1.5);
                (phi, dphi)
            }
        }
    }

    pub fn modulus(&self, y: f64) -> f64 {
        self.modulus_with_derivative(y).0
    }

    /// `Φ''` from the stationary profile equation:
    /// dnls1 `Φ'' = ω̃Φ + (c/2)Φ³ - (3/16)γΦ⁵`,
    /// dnls2 `Φ'' = ω̃Φ - (c/2)Φ³ + (3/16)γΦ⁵`, with `ω̃ = ω - c²/4`.
    pub fn modulus_second_derivative(&self, phi: f64) -> f64 {
        let wt = self.omega - 0.25 * self.c * self.c;
        let s = match self.variant {
            EquationVariant::Dnls1 => 1.0,
            EquationVariant::Dnls2 => -1.0,
        };
        wt * phi + s * (0.5 * self.c * phi.powi(3) - 3.0 / 16.0 * self.gamma * phi.powi(5))
    }

    /// Odd antiderivative `T(y) = ∫_0^y Φ²`.
    fn odd_mass(&self, y: f64) -> f64 {
        match self.shape {
            Shape::Hyperbolic { a, sigma } => {
                // ∫ 2h² dy / (A cosh(hy) + σc), substituting t = tanh(hy/2)
                let h = self.h;
                let cc = sigma * self.c;
                let th = (0.5 * h * y).tanh();
                let gap = a * a - cc * cc;
                if gap.abs() <= 1e-14 * a * a {
                    // γ = 0: Φ² = (h²/A) sech²(hy/2)
                    2.0 * h / a * th
                } else if gap > 0.0 {
                    let q = ((a - cc) / (a + cc)).sqrt();
                    4.0 * h / gap.sqrt() * (q * th).atan()
                } else {
                    let q = ((cc - a) / (cc + a)).sqrt();
                    4.0 * h / (-gap).sqrt() * (q * th).atanh()
                }
            }
            Shape::Algebraic => {
                let rg = self.gamma.sqrt();
                4.0 / rg * (self.c * y / rg).atan()
            }
        }
    }

    /// Anchored mass integral entering the phase: dnls1 `∫_{-∞}^y Φ²`,
    /// dnls2 `∫_{+∞}^y Φ² = -∫_y^∞ Φ²`.
    pub fn anchored_mass(&self, y: f64) -> f64 {
        match self.variant {
            EquationVariant::Dnls1 => self.odd_mass(y) + self.half_mass,
            EquationVariant::Dnls2 => self.odd_mass(y) - self.half_mass,
        }
    }

    /// Phase `θ(y) = (c/2)y - (1/4)·anchored mass`.
    pub fn phase(&self, y: f64) -> f64 {
        0.5 * self.c * y - 0.25 * self.anchored_mass(y)
    }

    /// `φ(y)`, `φ'(y)` and `φ''(y)`.
    pub fn sample(&self, y: f64) -> ProfileSample {
        let (phi, dphi) = self.modulus_with_derivative(y);
        let ddphi = self.modulus_second_derivative(phi);
        let theta = self.phase(y);
        let dtheta = 0.5 * self.c - 0.25 * phi * phi;
        let ddtheta = -0.5 * phi * dphi;
        let rot = C64::from_polar(1.0, theta);
        let value = rot * phi;
        let d1 = rot * C64::new(dphi, dtheta * phi);
        let d2 = rot
            * C64::new(
                ddphi - dtheta * dtheta * phi,
                2.0 * dtheta * dphi + ddtheta * phi,
            );
        ProfileSample { value, d1, d2 }
    }
}
