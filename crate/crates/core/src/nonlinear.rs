//! Polynomial nonlinearities in a pair of complex variables and their
//! conjugates.
//!
//! Every nonlinearity in this crate is a short sum of monomials of degree
//! three or five in `(a, ā, b, b̄)`. Differences `p(a+δa, b+δb) - p(a, b)`
//! are evaluated by telescoping each monomial, so every term carries at
//! least one perturbation factor and small perturbations keep full
//! relative accuracy next to an O(1) background.

use crate::profiles::EquationVariant;
use crate::spectral::{C64, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    A,
    ConjA,
    B,
    ConjB,
}

const MAX_DEGREE: usize = 5;

#[derive(Debug, Clone)]
pub struct Monomial {
    pub coeff: C64,
    factors: [Var; MAX_DEGREE],
    degree: usize,
}

impl Monomial {
    pub fn new(coeff: C64, vars: &[Var]) -> Self {
        assert!(vars.len() <= MAX_DEGREE, "monomial degree above {MAX_DEGREE}");
        let mut factors = [Var::A; MAX_DEGREE];
        factors[..vars.len()].copy_from_slice(vars);
        Monomial {
            coeff,
            factors,
            degree: vars.len(),
        }
    }

    pub fn vars(&self) -> &[Var] {
        &self.factors[..self.degree]
    }
}

#[inline]
fn pick(v: Var, a: C64, b: C64) -> C64 {
    match v {
        Var::A => a,
        Var::ConjA => a.conj(),
        Var::B => b,
        Var::ConjB => b.conj(),
    }
}

#[derive(Debug, Clone, Default)]
pub struct PairPolynomial {
    terms: Vec<Monomial>,
}

impl PairPolynomial {
    pub fn new(terms: Vec<Monomial>) -> Self {
        PairPolynomial { terms }
    }

    /// Drops monomials with a zero coefficient.
    fn pruned(mut self) -> Self {
        self.terms.retain(|m| m.coeff != C64::new(0.0, 0.0));
        self
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    #[inline]
    pub fn eval(&self, a: C64, b: C64) -> C64 {
        self.terms
            .iter()
            .map(|m| m.vars().iter().fold(m.coeff, |acc, &v| acc * pick(v, a, b)))
            .sum()
    }

    /// `p(a + da, b + db) - p(a, b)` without forming either value.
    #[inline]
    pub fn eval_difference(&self, a: C64, b: C64, da: C64, db: C64) -> C64 {
        let mut total = C64::new(0.0, 0.0);
        for m in &self.terms {
            let vars = m.vars();
            let n = vars.len();
            // suffix[i] = Π_{j >= i} x_j
            let mut suffix = [C64::new(1.0, 0.0); MAX_DEGREE + 1];
            for i in (0..n).rev() {
                suffix[i] = suffix[i + 1] * pick(vars[i], a, b);
            }
            let mut prefix = C64::new(1.0, 0.0);
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..n {
                let delta = pick(vars[i], da, db);
                acc += prefix * delta * suffix[i + 1];
                prefix *= pick(vars[i], a + da, b + db);
            }
            total += m.coeff * acc;
        }
        total
    }

    pub fn eval_slices(&self, a: &[C64], b: &[C64]) -> Vec<C64> {
        a.iter().zip(b).map(|(&x, &y)| self.eval(x, y)).collect()
    }

    pub fn difference_slices(&self, a: &[C64], b: &[C64], da: &[C64], db: &[C64]) -> Vec<C64> {
        (0..a.len())
            .map(|j| self.eval_difference(a[j], b[j], da[j], db[j]))
            .collect()
    }
}

/// `(P, Q)` of the gauged system `L first = P`, `L second = Q` with
/// `L = i∂_t + ∂_xx`.
///
/// dnls1 (`first = φ`, `second = ψ = φ_x - (i/2)|φ|²φ`):
/// `P = iφ²ψ̄ - b|φ|⁴φ`, `Q = -iψ²φ̄ - 3b|φ|⁴ψ - 2b|φ|²φ²ψ̄`.
///
/// dnls2 (`first = u`, `second = v = u_x + (i/2)|u|²u`):
/// `P = -iu²v̄ + (1/2 - b)|u|⁴u`,
/// `Q = iv²ū + (3/2 - 3b)|u|⁴v + (1 - 2b)|u|²u²v̄`.
pub fn gauged_system(variant: EquationVariant, b: f64) -> (PairPolynomial, PairPolynomial) {
    use Var::*;
    let re = |x: f64| C64::new(x, 0.0);
    let (p, q) = match variant {
        EquationVariant::Dnls1 => (
            vec![
                Monomial::new(I, &[A, A, ConjB]),
                Monomial::new(re(-b), &[A, A, A, ConjA, ConjA]),
            ],
            vec![
                Monomial::new(-I, &[B, B, ConjA]),
                Monomial::new(re(-3.0 * b), &[A, A, ConjA, ConjA, B]),
                Monomial::new(re(-2.0 * b), &[A, A, A, ConjA, ConjB]),
            ],
        ),
        EquationVariant::Dnls2 => (
            vec![
                Monomial::new(-I, &[A, A, ConjB]),
                Monomial::new(re(0.5 - b), &[A, A, A, ConjA, ConjA]),
            ],
            vec![
                Monomial::new(I, &[B, B, ConjA]),
                Monomial::new(re(1.5 - 3.0 * b), &[A, A, ConjA, ConjA, B]),
                Monomial::new(re(1.0 - 2.0 * b), &[A, A, A, ConjA, ConjB]),
            ],
        ),
    };
    (PairPolynomial::new(p).pruned(), PairPolynomial::new(q).pruned())
}

/// Nonlinear part `N(u, u_x)` of `iu_t + u_xx + N = 0`:
/// dnls1 `i|u|²u_x + b|u|⁴u`, dnls2 `iu²ū_x + b|u|⁴u`.
pub fn field_nonlinearity(variant: EquationVariant, b: f64) -> PairPolynomial {
    use Var::*;
    let quintic = Monomial::new(C64::new(b, 0.0), &[A, A, A, ConjA, ConjA]);
    let cubic = match variant {
        EquationVariant::Dnls1 => Monomial::new(I, &[A, ConjA, B]),
        EquationVariant::Dnls2 => Monomial::new(I, &[A, A, ConjB]),
    };
    PairPolynomial::new(vec![cubic, quintic]).pruned()
}
