//! Evolves a single soliton and measures how far the numerical solution
//! strays from the exact traveling wave.

use dnls_trains::dynamics::{evolve, EvolveOptions};
use dnls_trains::profiles::{soliton_field, EquationVariant, SolitonParams, TrainSpec};
use dnls_trains::spectral::Grid;

fn main() -> dnls_trains::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (n, dt) = match args.as_slice() {
        [n, dt, ..] => (*n as usize, *dt),
        _ => (1024, 0.002),
    };
    let cases = [
        (SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0), Grid::centered(80.0, n, 1.25)?),
        (SolitonParams::new(EquationVariant::Dnls2, 1.0, 1.8, 0.125), Grid::centered(160.0, 2 * n, 4.5)?),
    ];
    for (p, grid) in &cases {
        let spec = TrainSpec::new(p.variant, p.b, vec![*p]);
        let u0 = soliton_field(p, 0.0, grid)?;
        let traj = evolve(&u0, 0.0, 5.0, dt, p.variant, p.b, Some(&spec), EvolveOptions { record_every: 100 })?;
        println!("{} (N = {}, dt = {dt}):", p.variant, grid.len());
        for (t, o) in traj.times.iter().zip(&traj.observables) {
            println!("  t = {t:4.2}  mass = {:.15}  |u - R|_H1 = {:.3e}", o.mass, o.distance.unwrap_or(f64::NAN));
        }
        println!("  relative mass drift {:.3e}", traj.mass_drift());
    }
    Ok(())
}
