//! Classifies soliton parameters against the existence window and prints
//! peak amplitude and mass for the admissible ones.

use dnls_trains::profiles::{validate_soliton, EquationVariant, SolitonParams, Validation};

fn main() -> dnls_trains::Result<()> {
    let cases = [
        (EquationVariant::Dnls1, 1.0, 0.5, 0.0),
        (EquationVariant::Dnls1, 1.0, 2.0, 0.0),
        (EquationVariant::Dnls1, 1.0, -1.9, 0.3),
        (EquationVariant::Dnls1, 1.0, 2.5, 0.0),
        (EquationVariant::Dnls2, 1.0, 1.8, 0.125),
        (EquationVariant::Dnls2, 1.0, 0.5, 0.0),
    ];
    for (variant, omega, c, b) in cases {
        let p = SolitonParams::new(variant, omega, c, b);
        print!("{variant} ω = {omega} c = {c:5.2} b = {b:5.3}  γ = {:6.3}  ", p.gamma());
        match validate_soliton(&p) {
            Validation::Valid => {
                let prof = p.profile()?;
                println!("h = {:.6}  |φ(0)| = {:.6}  mass = {:.6}", prof.h(), prof.modulus(0.0), prof.total_mass());
            }
            Validation::Algebraic => println!("algebraic decay, excluded from trains"),
            Validation::Violation(why) => println!("rejected: {why}"),
        }
    }
    Ok(())
}
