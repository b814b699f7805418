//! Picard iteration for the correction around an eight-fold dnls1 train,
//! followed by synthesis of `u` and its distance to the profile.

use std::time::Instant;

use dnls_trains::fixedpoint::{picard_solve, synthesize, PicardOptions};
use dnls_trains::profiles::{scaled_family, EquationVariant, TrainSpec};
use dnls_trains::spectral::Grid;

fn main() -> dnls_trains::Result<()> {
    let solitons = scaled_family(EquationVariant::Dnls1, &[-1.0, -2.0], &[1.0, 1.0], 8.0, 0.0)?;
    let spec = TrainSpec::new(EquationVariant::Dnls1, 0.0, solitons);
    let (t0, tmax) = (3.0, 9.0);
    // both members travel left at speeds 8 and 16
    let grid = Grid::centered(256.0, 2048, -84.0)?;

    let clock = Instant::now();
    let (eta, report) = match picard_solve(&spec, &grid, t0, tmax, 0.01, PicardOptions::default()) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("picard failed: {e}");
            if let dnls_trains::Error::ContractionFailure { report } = &e {
                eprintln!("{report:#?}");
            }
            return Err(e);
        }
    };
    println!("lambda {:.6}, {} iterates in {:.1?}", report.lambda, report.iterates, clock.elapsed());
    for (l, x) in report.xnorms.iter().enumerate() {
        let r = if l == 0 { String::new() } else { format!("  ratio {:.3e}", report.ratios[l - 1]) };
        println!("  iterate {:2}: |eta|_X = {x:.6e}{r}", l + 1);
    }
    println!("final defect {:.3e}, converged {}", report.final_defect, report.converged);

    let syn = synthesize(&spec, &eta)?;
    for (n, t) in syn.times.iter().enumerate().step_by(50) {
        println!("t = {t:4.1}  |u - R|_H1 = {:.6e}  defect = {:.3e}", syn.distance[n], syn.relation_defect[n]);
    }
    let (fit, kappa) = syn.fit(t0, tmax - 2.0 / report.lambda, report.lambda)?;
    println!("distance fit: rate {:.4} r2 {:.5} kappa {kappa:.4e}", fit.rate, fit.rsquared);
    Ok(())
}
