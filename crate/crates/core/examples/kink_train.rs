//! A falling dnls2 kink followed by a faster soliton: derived constants,
//! residual decay, and the separation diagnostic.

use dnls_trains::profiles::{scaled_family, separation_lhs, v_star, EquationVariant, KinkParams, Orientation, TrainSpec};
use dnls_trains::spectral::Grid;
use dnls_trains::trains::residual_decay;

fn main() -> dnls_trains::Result<()> {
    let variant = EquationVariant::Dnls2;
    let solitons = scaled_family(variant, &[1.0], &[1.0], 8.0, 0.0)?;
    let spec = TrainSpec::new(variant, 0.0, solitons).with_kink(KinkParams::new(1.0, 0.0, Orientation::Falling));
    spec.validate()?;
    let grid = Grid::centered(192.0, 4096, 32.0)?;

    for (i, m) in spec.members().iter().enumerate() {
        println!("{:10} ω = {:8.4}  c = {:5.2}  h = {:.6}", m.label(i), m.omega(), m.speed(), m.h());
    }
    let times: Vec<f64> = (0..=8).map(|i| 2.0 + 0.5 * i as f64).collect();
    let d = residual_decay(&spec, &grid, &times)?;
    println!("v* = {:.6}  λ = {:.6}  fitted rate {:.4}", d.v_star, d.lambda, d.fit.rate);
    let lhs = separation_lhs(&spec, &grid, &times[..3])?;
    println!("separation lhs {lhs:.4}, ratio to v* {:.4}", lhs / v_star(&spec)?);
    Ok(())
}
