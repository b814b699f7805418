//! Interaction residual of a two-soliton family for growing scale M. The
//! fitted exponential rate should grow like M/16.

use dnls_trains::profiles::{scaled_family, EquationVariant, TrainSpec};
use dnls_trains::spectral::Grid;
use dnls_trains::trains::residual_decay;

fn main() -> dnls_trains::Result<()> {
    let times: Vec<f64> = (0..=8).map(|i| 2.0 + 0.25 * i as f64).collect();
    let grid = Grid::centered(320.0, 8192, -96.0)?;
    for m in [8.0, 12.0, 16.0] {
        let solitons = scaled_family(EquationVariant::Dnls1, &[-1.0, -2.0], &[1.0, 1.0], m, 0.0)?;
        let spec = TrainSpec::new(EquationVariant::Dnls1, 0.0, solitons);
        let d = residual_decay(&spec, &grid, &times)?;
        println!(
            "M = {m:4}  v* = {:5.2}  λ = {:.4}  fitted rate {:.4} (R² = {:.6})  χ(2) = {:.3e}  χ(4) = {:.3e}",
            d.v_star,
            d.lambda,
            d.fit.rate,
            d.fit.rsquared,
            d.h2[0],
            d.h2[times.len() - 1]
        );
    }
    Ok(())
}
