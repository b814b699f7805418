//! Gauges a soliton into the (φ, ψ) system, checks the relation between the
//! components, and inverts the gauge.

use dnls_trains::gauge::{from_gauge, relation_defect, to_gauge};
use dnls_trains::profiles::{soliton_field, EquationVariant, SolitonParams};
use dnls_trains::spectral::Grid;

fn main() -> dnls_trains::Result<()> {
    let cases = [
        (SolitonParams::new(EquationVariant::Dnls1, 1.0, 0.5, 0.0), Grid::centered(80.0, 2048, 0.0)?),
        (SolitonParams::new(EquationVariant::Dnls2, 1.0, 1.8, 0.125), Grid::centered(160.0, 4096, 0.0)?),
    ];
    for (p, grid) in &cases {
        let (p, variant) = (p.with_phase(0.7), p.variant);
        let u = soliton_field(&p, 0.0, grid)?;
        let pair = to_gauge(&u, variant)?;
        let back = from_gauge(&pair)?;
        println!(
            "{variant}: |u - G⁻¹G u|_H1 = {:.2e}  relation defect = {:.2e}  |ψ|_L2 = {:.6}",
            (&back - &u).h1_norm(),
            relation_defect(&pair),
            pair.second.l2_norm()
        );
    }
    Ok(())
}
