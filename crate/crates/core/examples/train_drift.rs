//! Starts the equation on an M = 8 two-soliton train and follows how far
//! the solution wanders from the train profile.

use dnls_trains::profiles::{scaled_family, EquationVariant, TrainSpec};
use dnls_trains::spectral::Grid;
use dnls_trains::trains::{drift_experiment, DriftOptions};

fn main() -> dnls_trains::Result<()> {
    let solitons = scaled_family(EquationVariant::Dnls1, &[-1.0, -2.0], &[1.0, 1.0], 8.0, 0.0)?;
    let spec = TrainSpec::new(EquationVariant::Dnls1, 0.0, solitons);
    let grid = Grid::centered(192.0, 4096, -64.0)?;
    let opts = DriftOptions { record_every: 250, ..Default::default() };
    let r = drift_experiment(&spec, &grid, 2.0, 6.0, 0.002, opts)?;
    println!("χ(T0) = {:.3e}  λ = {:?}", r.residual_at_start, r.lambda);
    if !r.gate.passed {
        println!("separation gate ratio {:?} exceeds {}", r.gate.ratio, r.gate.threshold);
    }
    for (t, d) in r.times.iter().zip(&r.distance) {
        println!("  t = {t:4.1}  |u - R|_H1 = {d:.3e}");
    }
    Ok(())
}
