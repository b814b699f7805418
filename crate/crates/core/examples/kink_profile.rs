//! Samples a falling dnls2 kink: the modulus climbs from 0 to the plateau
//! ζ on the left, and the phase winds at the rate set by c₀.

use dnls_trains::profiles::{kink_field, KinkParams, Orientation};
use dnls_trains::spectral::Grid;

fn main() -> dnls_trains::Result<()> {
    let c0: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let kp = KinkParams::new(c0, 0.0, Orientation::Falling);
    kp.validate()?;
    println!("c0 = {c0}  ω0 = {}  γ = {}  ζ = {:.15}  κ = {:.6}", kp.omega0, kp.gamma(), kp.zeta(), kp.kappa());

    let prof = kp.profile()?;
    for y in [-40.0, -20.0, -10.0, -5.0, 0.0, 5.0, 10.0, 20.0] {
        let s = prof.sample(y);
        println!("  y = {y:6.1}  |φ| = {:.12}  |φ'| = {:.3e}", s.value.norm(), s.d1.norm());
    }

    let grid = Grid::centered(200.0, 4096, 0.0)?;
    let u = kink_field(&kp, 0.0, &grid)?;
    let left = u.values()[0].norm();
    println!("left edge of a {}-point box: |u| = {left:.15} (plateau error {:.2e})", grid.len(), (left - kp.zeta()).abs());
    Ok(())
}
