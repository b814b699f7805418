//! Periodic pseudospectral substrate.
//!
//! A [`Grid`] samples a box of length `L` with `N` equispaced points and
//! owns the FFT plans for that size. A [`Field`] is a set of complex samples
//! on a grid at one time instant. Fourier coefficients are normalized as
//! `c_k = (1/N) Σ_n f(x_n) e^{-i k (x_n - x_0)}`, so the band-limited
//! interpolant is `f(x) = Σ_k c_k e^{i k (x - x_0)}`; all norms and Fourier
//! multipliers are insensitive to the origin `x_0`.
//!
//! Wavenumbers are stored in FFT order: index `j` carries `2πj/L` for
//! `j < N/2` and `2π(j-N)/L` otherwise, so the single Nyquist mode sits at
//! `j = N/2` with the negative sign.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Boundary, Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// Default tail tolerance for decay preconditions on the box ends.
pub const TAIL_TOLERANCE: f64 = 1e-10;

/// Zero-padding factor used for dealiased nonlinear products.
pub const PADDING_FACTOR: usize = 3;

struct GridInner {
    length: f64,
    n: usize,
    center: f64,
    dx: f64,
    k: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic grid on `[center - L/2, center + L/2)`.
#[derive(Clone)]
pub struct Grid(Arc<GridInner>);

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("length", &self.0.length)
            .field("n", &self.0.n)
            .field("center", &self.0.center)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.length == other.0.length
                && self.0.n == other.0.n
                && self.0.center == other.0.center)
    }
}

impl Grid {
    /// Grid on `[-L/2, L/2)`. `N` must be a power of two, at least 16.
    pub fn new(length: f64, n: usize) -> Result<Self> {
        Self::centered(length, n, 0.0)
    }

    /// Grid on `[center - L/2, center + L/2)`.
    pub fn centered(length: f64, n: usize, center: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "domain length must be positive, got {length}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "sample count must be a power of two >= 16, got {n}"
            )));
        }
        if !center.is_finite() {
            return Err(Error::InvalidArgument("grid center must be finite".into()));
        }
        Ok(Self::build(length, n, center))
    }

    fn build(length: f64, n: usize, center: f64) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let k = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / length
            })
            .collect();
        Grid(Arc::new(GridInner {
            length,
            n,
            center,
            dx: length / n as f64,
            k,
            forward,
            inverse,
        }))
    }

    /// Same box sampled `factor` times more finely. Used for dealiasing, so
    /// the power-of-two restriction does not apply.
    pub fn refined(&self, factor: usize) -> Self {
        Self::build(self.0.length, self.0.n * factor, self.0.center)
    }

    pub fn length(&self) -> f64 {
        self.0.length
    }

    pub fn len(&self) -> usize {
        self.0.n
    }

    pub fn is_empty(&self) -> bool {
        self.0.n == 0
    }

    pub fn dx(&self) -> f64 {
        self.0.dx
    }

    pub fn center(&self) -> f64 {
        self.0.center
    }

    pub fn left(&self) -> f64 {
        self.0.center - 0.5 * self.0.length
    }

    pub fn x(&self, j: usize) -> f64 {
        self.left() + j as f64 * self.0.dx
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.0.n).map(|j| self.x(j)).collect()
    }

    /// Wavenumbers in FFT order.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.0.k
    }

    /// Index of the Nyquist mode in FFT order.
    pub fn nyquist_index(&self) -> usize {
        self.0.n / 2
    }

    fn fft_forward(&self, buf: &mut [C64]) {
        self.0.forward.process(buf);
    }

    fn fft_inverse(&self, buf: &mut [C64]) {
        self.0.inverse.process(buf);
    }

    /// Normalized Fourier coefficients of raw samples.
    pub fn spectrum_of(&self, values: &[C64]) -> Vec<C64> {
        debug_assert_eq!(values.len(), self.len());
        let mut buf = values.to_vec();
        self.fft_forward(&mut buf);
        let scale = 1.0 / self.len() as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        buf
    }

    /// Samples of the band-limited interpolant with the given coefficients.
    pub fn samples_of(&self, coeffs: &[C64]) -> Vec<C64> {
        debug_assert_eq!(coeffs.len(), self.len());
        let mut buf = coeffs.to_vec();
        self.fft_inverse(&mut buf);
        buf
    }
}

/// Shorthand for [`Grid::new`].
pub fn make_grid(length: f64, n: usize) -> Result<Grid> {
    Grid::new(length, n)
}

/// Complex samples on a grid at one time instant.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    t: f64,
    values: Vec<C64>,
}

impl Field {
    pub fn new(grid: &Grid, t: f64, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "field has {} samples, grid has {}",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidArgument(format!("non-finite sample at index {j}")));
        }
        Ok(Self::from_parts(grid, t, values))
    }

    /// Skips the finiteness scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: &Grid, t: f64, values: Vec<C64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field {
            grid: grid.clone(),
            t,
            values,
        }
    }

    pub fn zeros(grid: &Grid, t: f64) -> Self {
        Self::from_parts(grid, t, vec![C64::new(0.0, 0.0); grid.len()])
    }

    pub fn from_fn(grid: &Grid, t: f64, f: impl Fn(f64) -> C64) -> Result<Self> {
        let values = (0..grid.len()).map(|j| f(grid.x(j))).collect();
        Self::new(grid, t, values)
    }

    pub fn from_real(grid: &Grid, t: f64, values: &[f64]) -> Result<Self> {
        Self::new(grid, t, values.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn from_spectrum(grid: &Grid, t: f64, coeffs: &[C64]) -> Self {
        Self::from_parts(grid, t, grid.samples_of(coeffs))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn spectrum(&self) -> Vec<C64> {
        self.grid.spectrum_of(&self.values)
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Field {
        Self::from_parts(&self.grid, self.t, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(C64, C64) -> C64) -> Field {
        debug_assert!(self.grid == other.grid);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::from_parts(&self.grid, self.t, values)
    }

    pub fn scale(&self, s: C64) -> Field {
        self.map(|v| v * s)
    }

    pub fn abs_sq(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Spectral derivative of order 1, 2 or 3; the Nyquist mode is dropped
    /// for odd orders.
    pub fn derivative(&self, order: u32) -> Result<Field> {
        if !(1..=3).contains(&order) {
            return Err(Error::InvalidArgument(format!(
                "derivative order must be 1, 2 or 3, got {order}"
            )));
        }
        let mut coeffs = self.spectrum();
        let k = self.grid.wavenumbers();
        for (c, &kj) in coeffs.iter_mut().zip(k) {
            *c *= (I * kj).powu(order);
        }
        if order % 2 == 1 {
            coeffs[self.grid.nyquist_index()] = C64::new(0.0, 0.0);
        }
        Ok(Self::from_spectrum(&self.grid, self.t, &coeffs))
    }

    /// First spectral derivative.
    pub fn dx(&self) -> Field {
        self.derivative(1).expect("order 1 is valid")
    }

    /// Discrete `H^s` norm, `sqrt(L Σ_k (1+k²)^s |c_k|²)`, for `s` in 0..=2.
    pub fn sobolev_norm(&self, s: u32) -> Result<f64> {
        if s > 2 {
            return Err(Error::InvalidArgument(format!(
                "regularity index must be 0, 1 or 2, got {s}"
            )));
        }
        Ok(sobolev_norm_of_spectrum(&self.grid, &self.spectrum(), s))
    }

    pub fn h1_norm(&self) -> f64 {
        self.sobolev_norm(1).expect("s = 1 is valid")
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0).expect("s = 0 is valid")
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Free Schrödinger group `S(τ)`: `c_k ← e^{-i k² τ} c_k`.
    pub fn free_propagate(&self, tau: f64) -> Field {
        if tau == 0.0 {
            return self.clone();
        }
        let mut coeffs = self.spectrum();
        propagate_spectrum(&self.grid, &mut coeffs, tau);
        Self::from_spectrum(&self.grid, self.t, &coeffs)
    }
}

pub(crate) fn sobolev_norm_of_spectrum(grid: &Grid, coeffs: &[C64], s: u32) -> f64 {
    let sum: f64 = coeffs
        .iter()
        .zip(grid.wavenumbers())
        .map(|(c, &k)| (1.0 + k * k).powi(s as i32) * c.norm_sqr())
        .sum();
    (grid.length() * sum).sqrt()
}

pub(crate) fn propagate_spectrum(grid: &Grid, coeffs: &mut [C64], tau: f64) {
    if tau == 0.0 {
        return;
    }
    for (c, &k) in coeffs.iter_mut().zip(grid.wavenumbers()) {
        *c *= C64::from_polar(1.0, -k * k * tau);
    }
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<C64> for &Field {
    type Output = Field;
    fn mul(self, rhs: C64) -> Field {
        self.scale(rhs)
    }
}

pub fn derivative(f: &Field, order: u32) -> Result<Field> {
    f.derivative(order)
}

pub fn sobolev_norm(f: &Field, s: u32) -> Result<f64> {
    f.sobolev_norm(s)
}

pub fn sup_norm(f: &Field) -> f64 {
    f.sup_norm()
}

pub fn free_propagate(f: &Field, tau: f64) -> Field {
    f.free_propagate(tau)
}

/// Boundary a cumulative integral is anchored at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    /// `∫_{x_0}^{x} f`
    Left,
    /// `-∫_{x}^{x_max} f`
    Right,
}

fn check_anchor_tail(grid: &Grid, f: &[f64], anchor: Anchor, tail_tol: f64) -> Result<()> {
    let (boundary, value) = match anchor {
        Anchor::Left => (Boundary::Left, f[0]),
        Anchor::Right => (Boundary::Right, f[grid.len() - 1]),
    };
    if value.abs() > tail_tol || !value.is_finite() {
        return Err(Error::DecayViolation {
            what: "cumulative integral".into(),
            boundary,
            value: value.abs(),
            tolerance: tail_tol,
        });
    }
    Ok(())
}

/// Trapezoid cumulative integral of real samples from the anchored end.
/// The integrand must have decayed below `tail_tol` at the anchor.
pub fn cumulative_integral(
    grid: &Grid,
    f: &[f64],
    anchor: Anchor,
    tail_tol: f64,
) -> Result<Vec<f64>> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument("sample count mismatch".into()));
    }
    check_anchor_tail(grid, f, anchor, tail_tol)?;
    Ok(trapezoid(grid.dx(), f, anchor))
}

fn trapezoid(dx: f64, f: &[f64], anchor: Anchor) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    match anchor {
        Anchor::Left => {
            for j in 1..n {
                out[j] = out[j - 1] + 0.5 * dx * (f[j - 1] + f[j]);
            }
        }
        Anchor::Right => {
            for j in (0..n - 1).rev() {
                out[j] = out[j + 1] - 0.5 * dx * (f[j] + f[j + 1]);
            }
        }
    }
    out
}

/// Cumulative integral from the anchored end through the band-limited
/// interpolant: the mean contributes a linear ramp and every other mode
/// integrates exactly. Accurate to spectral precision when the integrand
/// decays at both ends of the box; only the anchored end is checked.
pub fn cumulative_integral_corrected(
    grid: &Grid,
    f: &[f64],
    anchor: Anchor,
    tail_tol: f64,
) -> Result<Vec<f64>> {
    if f.len() != grid.len() {
        return Err(Error::InvalidArgument("sample count mismatch".into()));
    }
    check_anchor_tail(grid, f, anchor, tail_tol)?;
    let n = grid.len();
    let mut coeffs = grid.spectrum_of(&f.iter().map(|&v| C64::new(v, 0.0)).collect::<Vec<_>>());
    let mean = coeffs[0].re;
    coeffs[0] = C64::new(0.0, 0.0);
    coeffs[grid.nyquist_index()] = C64::new(0.0, 0.0);
    for (c, &k) in coeffs.iter_mut().zip(grid.wavenumbers()) {
        if k != 0.0 {
            *c /= I * k;
        }
    }
    let periodic: Vec<f64> = grid.samples_of(&coeffs).iter().map(|v| v.re).collect();
    let x0 = grid.x(0);
    let mut out: Vec<f64> = (0..n)
        .map(|j| mean * (grid.x(j) - x0) + periodic[j] - periodic[0])
        .collect();
    if anchor == Anchor::Right {
        let end = out[n - 1];
        for v in &mut out {
            *v -= end;
        }
    }
    Ok(out)
}

/// Moves fields onto a `PADDING_FACTOR`-times finer grid for pointwise
/// products and truncates the result back to the base band.
///
/// With factor 3 products of up to five band-limited factors project
/// back without aliasing.
#[derive(Clone, Debug)]
pub struct Dealiaser {
    base: Grid,
    fine: Grid,
}

impl Dealiaser {
    pub fn new(base: &Grid) -> Self {
        Dealiaser {
            base: base.clone(),
            fine: base.refined(PADDING_FACTOR),
        }
    }

    pub fn base(&self) -> &Grid {
        &self.base
    }

    pub fn fine(&self) -> &Grid {
        &self.fine
    }

    fn fine_index(&self, j: usize) -> usize {
        let n = self.base.len();
        if j < n / 2 {
            j
        } else {
            self.fine.len() - (n - j)
        }
    }

    /// Fine-grid samples of the interpolant with base coefficients `coeffs`.
    pub fn lift_spectrum(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut padded = vec![C64::new(0.0, 0.0); self.fine.len()];
        for (j, &c) in coeffs.iter().enumerate() {
            padded[self.fine_index(j)] = c;
        }
        self.fine.samples_of(&padded)
    }

    pub fn lift(&self, f: &Field) -> Vec<C64> {
        self.lift_spectrum(&f.spectrum())
    }

    /// Fine samples of `f` and of its first derivative (Nyquist dropped).
    pub fn lift_with_derivative(&self, f: &Field) -> (Vec<C64>, Vec<C64>) {
        let coeffs = f.spectrum();
        let mut dcoeffs: Vec<C64> = coeffs
            .iter()
            .zip(self.base.wavenumbers())
            .map(|(&c, &k)| c * I * k)
            .collect();
        dcoeffs[self.base.nyquist_index()] = C64::new(0.0, 0.0);
        (self.lift_spectrum(&coeffs), self.lift_spectrum(&dcoeffs))
    }

    /// Base-band coefficients of fine-grid samples.
    pub fn project_spectrum(&self, fine_values: &[C64]) -> Vec<C64> {
        let fine_coeffs = self.fine.spectrum_of(fine_values);
        (0..self.base.len())
            .map(|j| fine_coeffs[self.fine_index(j)])
            .collect()
    }

    pub fn project(&self, fine_values: &[C64], t: f64) -> Field {
        Field::from_spectrum(&self.base, t, &self.project_spectrum(fine_values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn grid_definition() {
        let g = make_grid(2.0 * PI, 16).unwrap();
        assert!(close(g.dx(), PI / 8.0, 1e-15));
        let mut ks: Vec<i64> = g.wavenumbers().iter().map(|k| k.round() as i64).collect();
        ks.sort();
        assert_eq!(ks, (-8..=7).collect::<Vec<_>>());
        assert_eq!(g.wavenumbers()[g.nyquist_index()], -8.0);

        assert!(make_grid(2.0 * PI, 15).is_err());
        assert!(make_grid(-1.0, 16).is_err());
        assert!(make_grid(1.0, 8).is_err());
        assert_eq!(make_grid(80.0, 1024).unwrap().dx(), 0.078125);
    }

    #[test]
    fn wavenumber_table_symmetric_except_nyquist() {
        let g = make_grid(10.0, 64).unwrap();
        let k = g.wavenumbers();
        for j in 1..32 {
            assert_eq!(k[j], -k[64 - j]);
        }
        assert_eq!(k[0], 0.0);
    }

    #[test]
    fn derivative_examples() {
        let g = make_grid(2.0 * PI, 32).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| C64::from_polar(1.0, x)).unwrap();
        let df = f.derivative(1).unwrap();
        for (j, v) in df.values().iter().enumerate() {
            let want = I * C64::from_polar(1.0, g.x(j));
            assert!((v - want).norm() < 1e-13);
        }
        let c = Field::from_fn(&g, 0.0, |_| C64::new(3.0, -1.0)).unwrap();
        assert!(c.derivative(2).unwrap().sup_norm() < 1e-13);
        let cos2 = Field::from_fn(&g, 0.0, |x| C64::new((2.0 * x).cos(), 0.0)).unwrap();
        let d2 = cos2.derivative(2).unwrap();
        for (j, v) in d2.values().iter().enumerate() {
            assert!((v - C64::new(-4.0 * (2.0 * g.x(j)).cos(), 0.0)).norm() < 1e-12);
        }
        assert!(f.derivative(0).is_err());
        assert!(f.derivative(4).is_err());
    }

    #[test]
    fn odd_derivative_drops_nyquist() {
        let g = make_grid(2.0 * PI, 16).unwrap();
        let nyq = Field::from_fn(&g, 0.0, |x| C64::new((8.0 * (x + PI)).cos(), 0.0)).unwrap();
        assert!(nyq.derivative(1).unwrap().sup_norm() < 1e-12);
        assert!(nyq.derivative(3).unwrap().sup_norm() < 1e-12);
        assert!(nyq.derivative(2).unwrap().sup_norm() > 1.0);
    }

    #[test]
    fn sobolev_examples() {
        let g = make_grid(4.0, 16).unwrap();
        let one = Field::from_fn(&g, 0.0, |_| C64::new(1.0, 0.0)).unwrap();
        assert!(close(one.sobolev_norm(1).unwrap(), 2.0, 1e-14));

        let l = 4.0;
        let k0 = 2.0 * PI / l;
        let wave = Field::from_fn(&g, 0.0, |x| C64::from_polar(1.0, k0 * x)).unwrap();
        let want = ((1.0 + k0 * k0) * l).sqrt();
        assert!(close(wave.sobolev_norm(1).unwrap(), want, 1e-14));
        assert!(wave.sobolev_norm(3).is_err());
    }

    #[test]
    fn sup_norm_examples() {
        let g = make_grid(1.0, 16).unwrap();
        let f = Field::from_fn(&g, 0.0, |_| C64::new(0.0, 3.0)).unwrap();
        assert_eq!(f.sup_norm(), 3.0);
        assert_eq!(Field::zeros(&g, 0.0).sup_norm(), 0.0);
    }

    #[test]
    fn free_propagation_examples() {
        let g = make_grid(2.0 * PI, 32).unwrap();
        let f = Field::from_fn(&g, 0.0, |x| C64::from_polar(1.0, 2.0 * x)).unwrap();
        let p = f.free_propagate(PI / 4.0);
        for (a, b) in p.values().iter().zip(f.values()) {
            assert!((a + b).norm() < 1e-13);
        }
        let q = f.free_propagate(0.0);
        assert_eq!(q.values(), f.values());
    }

    #[test]
    fn cumulative_integral_examples() {
        let g = make_grid(20.0, 64).unwrap();
        let zero = vec![0.0; 64];
        let out = cumulative_integral(&g, &zero, Anchor::Left, TAIL_TOLERANCE).unwrap();
        assert!(out.iter().all(|&v| v == 0.0));
        let ones = vec![1.0; 64];
        match cumulative_integral(&g, &ones, Anchor::Left, TAIL_TOLERANCE) {
            Err(Error::DecayViolation { boundary, .. }) => assert_eq!(boundary, Boundary::Left),
            other => panic!("expected decay violation, got {other:?}"),
        }
        match cumulative_integral(&g, &ones, Anchor::Right, TAIL_TOLERANCE) {
            Err(Error::DecayViolation { boundary, .. }) => assert_eq!(boundary, Boundary::Right),
            other => panic!("expected decay violation, got {other:?}"),
        }
    }

    #[test]
    fn right_anchor_is_negative_tail_integral() {
        let g = make_grid(40.0, 256).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (-x * x).exp()).collect();
        let left = cumulative_integral(&g, &f, Anchor::Left, TAIL_TOLERANCE).unwrap();
        let right = cumulative_integral(&g, &f, Anchor::Right, TAIL_TOLERANCE).unwrap();
        let total = left[255];
        for j in 0..256 {
            assert!((left[j] - total - right[j]).abs() < 1e-13);
        }
        assert_eq!(right[255], 0.0);
        assert!((total - PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn corrected_integral_is_high_order() {
        // ∫_{-∞}^{x} sech²(s) ds = tanh(x) + 1
        let g = make_grid(60.0, 512).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| 1.0 / x.cosh().powi(2)).collect();
        let plain = cumulative_integral(&g, &f, Anchor::Left, TAIL_TOLERANCE).unwrap();
        let corr = cumulative_integral_corrected(&g, &f, Anchor::Left, TAIL_TOLERANCE).unwrap();
        let err = |v: &[f64]| {
            v.iter()
                .zip(g.points())
                .map(|(a, x)| (a - (x.tanh() + 1.0)).abs())
                .fold(0.0, f64::max)
        };
        assert!(err(&plain) > 1e-4);
        assert!(err(&corr) < 1e-10, "corrected error {}", err(&corr));

        let corr_r = cumulative_integral_corrected(&g, &f, Anchor::Right, TAIL_TOLERANCE).unwrap();
        let err_r = corr_r
            .iter()
            .zip(g.points())
            .map(|(a, x)| (a - (x.tanh() - 1.0)).abs())
            .fold(0.0, f64::max);
        assert!(err_r < 1e-10);
    }

    #[test]
    fn dealiased_cubic_matches_exact_product() {
        // cos(x)³ = (3cos x + cos 3x)/4 is resolved on 16 points.
        let g = make_grid(2.0 * PI, 16).unwrap();
        let d = Dealiaser::new(&g);
        let f = Field::from_fn(&g, 0.0, |x| C64::new(x.cos(), 0.0)).unwrap();
        let fine = d.lift(&f);
        let cube: Vec<C64> = fine.iter().map(|v| v * v * v).collect();
        let p = d.project(&cube, 0.0);
        for (j, v) in p.values().iter().enumerate() {
            assert!((v.re - g.x(j).cos().powi(3)).abs() < 1e-14);
        }
        // A quintic whose top modes would alias on the base grid.
        let h = Field::from_fn(&g, 0.0, |x| C64::from_polar(1.0, 3.0 * x)).unwrap();
        let fine = d.lift(&h);
        let q: Vec<C64> = fine.iter().map(|v| v * v * v * v * v).collect();
        let p = d.project(&q, 0.0);
        assert!(p.sup_norm() < 1e-13, "e^(15ix) is outside the band");
    }
}
