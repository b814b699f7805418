//! Soliton and half-kink profiles, train specifications and the
//! separation quantities `v*` and `λ`.

mod kink;
mod soliton;
mod train;

use serde::{Deserialize, Serialize};

pub use kink::{halfkink_phi, kink_field, KinkParams, KinkProfile, Orientation};
pub use soliton::{validate_soliton, SolitonParams, SolitonProfile, Validation};
pub use train::{
    lambda_of, scaled_family, separation_lhs, v_star, Member, MemberColumns, MemberProfile,
    MemberSample, TrainSpec,
};

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquationVariant {
    /// `iu_t + u_xx + i|u|²u_x + b|u|⁴u = 0`
    Dnls1,
    /// `iu_t + u_xx + iu²ū_x + b|u|⁴u = 0`
    Dnls2,
}

impl EquationVariant {
    pub fn gamma(self, b: f64) -> f64 {
        match self {
            EquationVariant::Dnls1 => 1.0 + 16.0 * b / 3.0,
            EquationVariant::Dnls2 => 5.0 / 3.0 - 16.0 * b / 3.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EquationVariant::Dnls1 => "dnls1",
            EquationVariant::Dnls2 => "dnls2",
        }
    }
}

impl std::fmt::Display for EquationVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub fn gamma_of(variant: EquationVariant, b: f64) -> f64 {
    variant.gamma(b)
}

/// A complex profile value with its first two spatial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSample {
    pub value: C64,
    pub d1: C64,
    pub d2: C64,
}

/// Real modulus `Φ(x)` of a centered soliton.
pub fn capital_phi(p: &SolitonParams, x: f64) -> Result<f64> {
    Ok(p.profile()?.modulus(x))
}

/// Centered profile `φ_{ω,c}` (no phase, offset or time) on `grid`.
pub fn soliton_phi(p: &SolitonParams, grid: &Grid) -> Result<Field> {
    let centered = SolitonParams {
        theta: 0.0,
        x0: 0.0,
        ..*p
    };
    Member::Soliton(centered).field(0.0, grid, crate::spectral::TAIL_TOLERANCE)
}

/// `R(t, x) = e^{i(θ + ωt)} φ(x - x₀ - ct)` on `grid`.
pub fn soliton_field(p: &SolitonParams, t: f64, grid: &Grid) -> Result<Field> {
    Member::Soliton(*p).field(t, grid, crate::spectral::TAIL_TOLERANCE)
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_of(EquationVariant::Dnls1, 0.0), 1.0);
        assert!(gamma_of(EquationVariant::Dnls1, -3.0 / 16.0).abs() < 1e-15);
        assert!((gamma_of(EquationVariant::Dnls2, 1.0 / 8.0) - 1.0).abs() < 1e-15);
        let bs = [-0.5, -0.1, 0.0, 0.2, 0.7];
        for w in bs.windows(2) {
            assert!(gamma_of(EquationVariant::Dnls1, w[1]) > gamma_of(EquationVariant::Dnls1, w[0]));
            assert!(gamma_of(EquationVariant::Dnls2, w[1]) < gamma_of(EquationVariant::Dnls2, w[0]));
        }
    }

    #[test]
    fn variant_serde_names() {
        #[derive(Deserialize)]
        struct Wrap {
            v: EquationVariant,
        }
        let w: Wrap = toml::from_str("v = \"dnls2\"").unwrap();
        assert_eq!(w.v, EquationVariant::Dnls2);
    }

    #[test]
    fn modulus_of_phi_matches_capital_phi() {
        let grid = make_grid(80.0, 1024).unwrap();
        let p = SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0);
        let f = soliton_phi(&p, &grid).unwrap();
        for (j, v) in f.values().iter().enumerate() {
            assert!((v.norm() - capital_phi(&p, grid.x(j)).unwrap()).abs() < 1e-14);
        }
    }

    #[test]
    fn algebraic_peak() {
        let p = SolitonParams::new(EquationVariant::Dnls1, 1.0, 2.0, 0.0);
        assert_eq!(p.validate(), Validation::Algebraic);
        assert!((capital_phi(&p, 0.0).unwrap().powi(2) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn field_covariance() {
        let grid = make_grid(80.0, 1024).unwrap();
        let p = SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0).with_phase(0.3);
        let (t, s) = (1.0, 0.64);
        let a = soliton_field(&p, t + s, &grid).unwrap();
        let shifted = SolitonParams {
            x0: p.x0 + p.c * s,
            ..p
        };
        let b = soliton_field(&shifted, t, &grid).unwrap();
        let rot = C64::from_polar(1.0, p.omega * s);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - rot * y).norm() < 1e-12);
        }
        // peak transport
        let peak = a
            .values()
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
            .unwrap()
            .0;
        assert!((grid.x(peak) - p.c * (t + s)).abs() <= grid.dx());
    }
}
