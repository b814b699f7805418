//! A plane wave A e^{i(kx - σt)} solves both equations with
//! σ = k² ± A²k - bA⁴. Evolves one period of the phase and compares.

use dnls_trains::dynamics::{evolve, EvolveOptions};
use dnls_trains::profiles::EquationVariant;
use dnls_trains::spectral::{Field, Grid, C64};
use std::f64::consts::PI;

fn main() -> dnls_trains::Result<()> {
    let (a, k, b) = (0.7f64, 3.0, 0.3);
    let grid = Grid::new(2.0 * PI, 32)?;
    let u0 = Field::from_fn(&grid, 0.0, |x| C64::from_polar(a, k * x))?;
    for (variant, sign) in [(EquationVariant::Dnls1, 1.0), (EquationVariant::Dnls2, -1.0)] {
        let sigma = k * k + sign * a * a * k - b * a.powi(4);
        let t1 = 1.0;
        let traj = evolve(&u0, 0.0, t1, 0.01, variant, b, None, EvolveOptions { record_every: 100 })?;
        let exact = Field::from_fn(&grid, t1, |x| C64::from_polar(a, k * x - sigma * t1))?;
        println!("{variant}: σ = {sigma:.6}  error at t = {t1}: {:.2e}", (traj.last() - &exact).sup_norm());
    }
    Ok(())
}
