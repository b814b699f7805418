//! Pseudospectral laboratory for multi-soliton and kink-soliton trains of
//! two derivative nonlinear Schrödinger equations,
//!
//! ```text
//! dnls1:  iu_t + u_xx + i|u|²u_x + b|u|⁴u = 0
//! dnls2:  iu_t + u_xx + iu²ū_x  + b|u|⁴u = 0
//! ```
//!
//! on a periodic box standing in for the real line.

pub mod dynamics;
pub mod error;
pub mod fixedpoint;
pub mod gauge;
pub mod harness;
pub mod nonlinear;
pub mod profiles;
pub mod spectral;
pub mod trains;

pub use error::{Error, Result};
