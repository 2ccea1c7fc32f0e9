//! Incompressible Euler on the periodic square `[0, 2π)²`.
//!
//! The velocity is kept as two coefficient arrays indexed by `k = (k₁, k₂)`,
//! `|k_i| <= N`. Pressure is never formed: every tendency is Leray projected
//! mode by mode. The spectral variant forms `u ⊗ u` on a padded grid, so it is
//! the exact truncated product; the 2/3 variant smooths with the radial
//! mollifier `σ(|k|/N)` and multiplies on the unpadded `(2N+1)²` grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Result, SpecError};
use crate::fourier::{forward_plan, inverse_plan, mollifier};
use crate::timestepping::OdeState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficients of a real scalar field on the torus, `k₁, k₂ = -N..=N`,
/// stored row-major in `k₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField2D {
    degree: usize,
    coeffs: Vec<Complex64>,
}

impl SpectralField2D {
    pub fn zeros(degree: usize) -> Self {
        let side = 2 * degree + 1;
        Self {
            degree,
            coeffs: vec![ZERO; side * side],
        }
    }

    pub fn from_fn(degree: usize, mut f: impl FnMut(i64, i64) -> Complex64) -> Self {
        let n = degree as i64;
        let mut coeffs = Vec::with_capacity((2 * degree + 1).pow(2));
        for k1 in -n..=n {
            for k2 in -n..=n {
                coeffs.push(f(k1, k2));
            }
        }
        Self { degree, coeffs }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    fn index(&self, k1: i64, k2: i64) -> Option<usize> {
        let n = self.degree as i64;
        if k1.abs() > n || k2.abs() > n {
            None
        } else {
            Some(((k1 + n) * (2 * n + 1) + (k2 + n)) as usize)
        }
    }

    /// `û(k₁, k₂)`; zero outside the band.
    #[inline]
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.index(k1, k2).map_or(ZERO, |i| self.coeffs[i])
    }

    pub fn set(&mut self, k1: i64, k2: i64, c: Complex64) {
        let i = self.index(k1, k2).expect("mode outside band");
        self.coeffs[i] = c;
    }

    /// Iterates `((k₁, k₂), û)` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = ((i64, i64), Complex64)> + '_ {
        let n = self.degree as i64;
        let side = 2 * n + 1;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| ((i as i64 / side - n, i as i64 % side - n), *c))
    }

    pub fn map_modes(&self, mut f: impl FnMut(i64, i64, Complex64) -> Complex64) -> Self {
        Self::from_fn(self.degree, |k1, k2| f(k1, k2, self.coeff(k1, k2)))
    }

    /// Replaces each pair by its Hermitian average.
    pub fn symmetrize(&mut self) {
        let n = self.degree as i64;
        for k1 in -n..=n {
            for k2 in -n..=n {
                let a = self.coeff(k1, k2);
                let b = self.coeff(-k1, -k2).conj();
                let avg = 0.5 * (a + b);
                self.set(k1, k2, avg);
                self.set(-k1, -k2, avg.conj());
            }
        }
    }

    pub fn resized(&self, degree: usize) -> Self {
        Self::from_fn(degree, |k1, k2| self.coeff(k1, k2))
    }

    /// `∫ f g dx` over the torus, `(2π)² Σ Re(conj f̂ ĝ)`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.degree, other.degree);
        4.0 * PI * PI * self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a.conj() * b).re).sum::<f64>()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, a: f64, x: &Self) {
        for (y, x) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *y += a * x;
        }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// `∂/∂x_axis`, `axis ∈ {0, 1}`.
    pub fn derivative(&self, axis: usize) -> Self {
        self.map_modes(|k1, k2, c| c * Complex64::new(0.0, if axis == 0 { k1 } else { k2 } as f64))
    }
}

fn fft_rows(buf: &mut [Complex64], len: usize, forward: bool) {
    let plan = if forward { forward_plan(len) } else { inverse_plan(len) };
    let scratch_len = plan.get_inplace_scratch_len();
    buf.par_chunks_mut(len * 8).for_each_init(
        || vec![ZERO; scratch_len],
        |scratch, rows| plan.process_with_scratch(rows, scratch),
    );
}

fn transpose(buf: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; buf.len()];
    out.par_chunks_mut(len).enumerate().for_each(|(j, row)| {
        for (i, v) in row.iter_mut().enumerate() {
            *v = buf[i * len + j];
        }
    });
    out
}

fn fft2(buf: Vec<Complex64>, len: usize, forward: bool) -> Vec<Complex64> {
    let mut buf = buf;
    fft_rows(&mut buf, len, forward);
    let mut t = transpose(&buf, len);
    fft_rows(&mut t, len, forward);
    transpose(&t, len)
}

/// Values on the `len × len` grid, `values[i·len + j] = f(x_i, y_j)`.
pub fn evaluate_on_grid2(spec: &SpectralField2D, len: usize) -> Vec<f64> {
    let mut buf = vec![ZERO; len * len];
    let l = len as i64;
    for ((k1, k2), c) in spec.modes() {
        buf[(k1.rem_euclid(l) * l + k2.rem_euclid(l)) as usize] += c;
    }
    fft2(buf, len, false).into_iter().map(|c| c.re).collect()
}

/// Discrete coefficients of `len × len` samples, truncated to `degree`.
pub fn analyze_samples2(values: &[f64], len: usize, degree: usize) -> SpectralField2D {
    assert_eq!(values.len(), len * len);
    assert!(2 * degree < len, "degree {degree} not resolved by {len} points");
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let spec = fft2(buf, len, true);
    let inv = 1.0 / (len * len) as f64;
    let l = len as i64;
    let mut out = SpectralField2D::from_fn(degree, |k1, k2| spec[(k1.rem_euclid(l) * l + k2.rem_euclid(l)) as usize] * inv);
    out.symmetrize();
    out
}

/// Radial multiplier `σ_k` on the `(2N+1)²` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile2D {
    pub degree: usize,
    factors: SpectralField2D,
}

impl Profile2D {
    pub fn from_radial(degree: usize, rule: impl Fn(f64) -> f64) -> Self {
        let factors =
            SpectralField2D::from_fn(degree, |k1, k2| Complex64::new(rule(((k1 * k1 + k2 * k2) as f64).sqrt()), 0.0));
        Self { degree, factors }
    }

    /// `σ(|k|₂ / N)` with the 2/3 mollifier.
    pub fn two_thirds(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(SpecError::InvalidArgument(format!("2/3 mollifier needs N >= 3, got {degree}")));
        }
        Ok(Self::from_radial(degree, |r| mollifier(r / degree as f64)))
    }

    /// `((|k|₂/N)^{2r} - 1/N)_+`.
    pub fn spectral_viscosity(degree: usize, order: u32) -> Result<Self> {
        if degree < 2 || order < 1 {
            return Err(SpecError::InvalidArgument(format!(
                "SV profile needs N >= 2 and r >= 1, got N = {degree}, r = {order}"
            )));
        }
        let n = degree as f64;
        Ok(Self::from_radial(degree, |r| ((r / n).powi(2 * order as i32) - 1.0 / n).max(0.0)))
    }

    #[inline]
    pub fn factor(&self, k1: i64, k2: i64) -> f64 {
        self.factors.coeff(k1, k2).re
    }

    pub fn apply(&self, f: &SpectralField2D) -> SpectralField2D {
        f.map_modes(|k1, k2, c| c * self.factor(k1, k2))
    }
}

/// A velocity field `(u₁, u₂)` of degree `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField2D {
    pub u1: SpectralField2D,
    pub u2: SpectralField2D,
}

impl VelocityField2D {
    pub fn new(u1: SpectralField2D, u2: SpectralField2D) -> Result<Self> {
        if u1.degree() != u2.degree() {
            return Err(SpecError::DegreeMismatch {
                expected: u1.degree(),
                got: u2.degree(),
            });
        }
        Ok(Self { u1, u2 })
    }

    pub fn zeros(degree: usize) -> Self {
        Self {
            u1: SpectralField2D::zeros(degree),
            u2: SpectralField2D::zeros(degree),
        }
    }

    /// Samples both components on the `(2·degree+1)²` grid after analysis of
    /// the given point functions.
    pub fn from_fns(degree: usize, f1: impl Fn(f64, f64) -> f64, f2: impl Fn(f64, f64) -> f64) -> Self {
        let len = 2 * degree + 1;
        let h = 2.0 * PI / len as f64;
        let sample = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
            (0..len * len).map(|i| f((i / len) as f64 * h, (i % len) as f64 * h)).collect()
        };
        Self {
            u1: analyze_samples2(&sample(&f1), len, degree),
            u2: analyze_samples2(&sample(&f2), len, degree),
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.u1.degree()
    }

    pub fn component(&self, i: usize) -> &SpectralField2D {
        if i == 0 {
            &self.u1
        } else {
            &self.u2
        }
    }

    pub fn map(&self, f: impl Fn(&SpectralField2D) -> SpectralField2D) -> Self {
        Self {
            u1: f(&self.u1),
            u2: f(&self.u2),
        }
    }

    pub fn inner(&self, other: &Self) -> f64 {
        self.u1.inner(&other.u1) + self.u2.inner(&other.u2)
    }

    /// `∫|u|² dx`.
    pub fn l2_norm_sq(&self) -> f64 {
        self.inner(self)
    }

    /// `(2π)² Σ σ_k |û_k|²`.
    pub fn weighted_norm_sq(&self, prof: &Profile2D) -> f64 {
        self.inner(&self.map(|c| prof.apply(c)))
    }

    /// Kinetic energy `½∫|u|² dx`.
    pub fn energy(&self) -> f64 {
        0.5 * self.l2_norm_sq()
    }

    pub fn resized(&self, degree: usize) -> Self {
        self.map(|c| c.resized(degree))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// `max_k |k · û(k)|`.
    pub fn max_divergence(&self) -> f64 {
        divergence(self).max_abs_coeff()
    }
}

impl OdeState for VelocityField2D {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u1.axpy(a, &x.u1);
        self.u2.axpy(a, &x.u2);
    }
    fn is_finite(&self) -> bool {
        self.u1.is_finite() && self.u2.is_finite()
    }
}

/// Applies `P(k) = I - k kᵀ/|k|²` to a pair of coefficients.
#[inline]
fn leray_mode(k1: i64, k2: i64, a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    if k1 == 0 && k2 == 0 {
        return (a, b);
    }
    let (x, y) = (k1 as f64, k2 as f64);
    let dot = (a * x + b * y) / (x * x + y * y);
    (a - dot * x, b - dot * y)
}

/// Leray projection onto divergence-free fields; the mean mode is untouched.
pub fn leray_project(v: &VelocityField2D) -> VelocityField2D {
    let n = v.degree();
    let mut out = VelocityField2D::zeros(n);
    for ((k1, k2), a) in v.u1.modes() {
        let (p, q) = leray_mode(k1, k2, a, v.u2.coeff(k1, k2));
        out.u1.set(k1, k2, p);
        out.u2.set(k1, k2, q);
    }
    out
}

/// `∇·u`, modally `i k·û(k)`.
pub fn divergence(u: &VelocityField2D) -> SpectralField2D {
    let mut d = u.u1.derivative(0);
    d.axpy(1.0, &u.u2.derivative(1));
    d
}

/// `ω = ∂₁u₂ - ∂₂u₁`.
pub fn vorticity(u: &VelocityField2D) -> SpectralField2D {
    let mut w = u.u2.derivative(0);
    w.axpy(-1.0, &u.u1.derivative(1));
    w
}

/// `∇φ` of a scalar potential.
pub fn gradient(phi: &SpectralField2D) -> VelocityField2D {
    VelocityField2D {
        u1: phi.derivative(0),
        u2: phi.derivative(1),
    }
}

/// Products `u_i u_j` (`11, 12, 22`) sampled on a `len²` grid and analyzed back to `degree`.
fn tensor_products(u: &VelocityField2D, len: usize, degree: usize) -> [SpectralField2D; 3] {
    let a = evaluate_on_grid2(&u.u1, len);
    let b = evaluate_on_grid2(&u.u2, len);
    let prod = |f: &dyn Fn(f64, f64) -> f64| -> SpectralField2D {
        let vals: Vec<f64> = a.iter().zip(&b).map(|(x, y)| f(*x, *y)).collect();
        analyze_samples2(&vals, len, degree)
    };
    [prod(&|x, _| x * x), prod(&|x, y| x * y), prod(&|_, y| y * y)]
}

/// `-P ∇·T` for the symmetric tensor `T = (t11, t12, t22)`.
fn projected_flux_divergence(t: &[SpectralField2D; 3]) -> VelocityField2D {
    let [t11, t12, t22] = t;
    let n = t11.degree();
    let mut out = VelocityField2D::zeros(n);
    let n = n as i64;
    for k1 in -n..=n {
        for k2 in -n..=n {
            let (x, y) = (Complex64::new(0.0, k1 as f64), Complex64::new(0.0, k2 as f64));
            let f1 = x * t11.coeff(k1, k2) + y * t12.coeff(k1, k2);
            let f2 = x * t12.coeff(k1, k2) + y * t22.coeff(k1, k2);
            let (p, q) = leray_mode(k1, k2, -f1, -f2);
            out.u1.set(k1, k2, p);
            out.u2.set(k1, k2, q);
        }
    }
    out
}

/// Grid size of the padded product: `4N+1`, more than the `3N+1` needed for
/// the truncated square to be exact.
pub fn padded_len(degree: usize) -> usize {
    4 * degree + 1
}

/// `-P ∇·S_N(u ⊗ u)` with the exact truncated product.
pub fn rhs_spectral(u: &VelocityField2D) -> VelocityField2D {
    let n = u.degree();
    projected_flux_divergence(&tensor_products(u, padded_len(n), n))
}

/// `-P ∇·I_N(S_R u ⊗ S_R u)` on the `(2N+1)²` grid.
pub fn rhs_two_thirds(u: &VelocityField2D, prof: &Profile2D) -> Result<VelocityField2D> {
    let n = u.degree();
    if prof.degree != n {
        return Err(SpecError::DegreeMismatch {
            expected: n,
            got: prof.degree,
        });
    }
    let um = u.map(|c| prof.apply(c));
    Ok(projected_flux_divergence(&tensor_products(&um, 2 * n + 1, n)))
}

/// Which nonlinear term an Euler run uses, with an optional SV filter
/// `-N σ_SV(|k|/N) û` added to the tendency.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerScheme {
    pub smoothing: Option<Profile2D>,
    pub viscosity: Option<Profile2D>,
}

impl EulerScheme {
    pub fn spectral() -> Self {
        Self {
            smoothing: None,
            viscosity: None,
        }
    }

    pub fn two_thirds(degree: usize) -> Result<Self> {
        Ok(Self {
            smoothing: Some(Profile2D::two_thirds(degree)?),
            viscosity: None,
        })
    }

    pub fn with_viscosity(mut self, degree: usize, order: u32) -> Result<Self> {
        self.viscosity = Some(Profile2D::spectral_viscosity(degree, order)?);
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match (&self.smoothing, &self.viscosity) {
            (None, None) => "spectral",
            (Some(_), None) => "two-thirds",
            (None, Some(_)) => "spectral+sv",
            (Some(_), Some(_)) => "two-thirds+sv",
        }
    }

    pub fn rhs(&self, u: &VelocityField2D) -> Result<VelocityField2D> {
        let mut out = match &self.smoothing {
            None => rhs_spectral(u),
            Some(p) => rhs_two_thirds(u, p)?,
        };
        if let Some(sv) = &self.viscosity {
            let n = u.degree() as f64;
            out.axpy(-n, &u.map(|c| sv.apply(c)));
        }
        Ok(out)
    }

    /// The conserved quadratic form: `‖u‖²` or `‖u‖²_σ`.
    pub fn conserved(&self, u: &VelocityField2D) -> f64 {
        match &self.smoothing {
            None => u.l2_norm_sq(),
            Some(p) => u.weighted_norm_sq(p),
        }
    }
}

/// Named verification flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExactFlow {
    /// `(sin x₁ cos x₂, -cos x₁ sin x₂)`, a steady solution.
    TaylorGreen,
    /// `u₁ = tanh(3 cos x₂)` truncated to 64 modes, `u₂ = 0.05 sin x₁`.
    ShearLayerSmooth,
}

impl ExactFlow {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TaylorGreen => "taylor_green",
            Self::ShearLayerSmooth => "shear_layer_smooth",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "taylor_green" => Some(Self::TaylorGreen),
            "shear_layer_smooth" => Some(Self::ShearLayerSmooth),
            _ => None,
        }
    }
}

/// The flow at time `t` on degree `N`. Taylor–Green does not depend on `t`;
/// the shear layer is initial data only and ignores `t`.
pub fn exact_flows(flow: ExactFlow, degree: usize, _t: f64) -> VelocityField2D {
    match flow {
        ExactFlow::TaylorGreen => {
            let mut u = VelocityField2D::zeros(degree);
            // sin x₁ cos x₂ = Σ over (±1, ±1) with coefficients ∓i/4
            for (k1, k2) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
                if degree >= 1 {
                    u.u1.set(k1, k2, Complex64::new(0.0, -0.25 * k1 as f64));
                    u.u2.set(k1, k2, Complex64::new(0.0, 0.25 * k2 as f64));
                }
            }
            u
        }
        ExactFlow::ShearLayerSmooth => {
            let m = 64.min(degree);
            // tanh(3 cos y) is odd in cos y, so only odd k₂ appear
            let len = 1025;
            let line: Vec<f64> = crate::fourier::grid(len).map(|y| (3.0 * y.cos()).tanh()).collect();
            let shear = crate::fourier::analyze_samples(&line, m);
            let mut u = VelocityField2D::zeros(degree);
            for (k, c) in shear.modes() {
                u.u1.set(0, k, c);
            }
            if degree >= 1 {
                u.u2.set(1, 0, Complex64::new(0.0, -0.025));
                u.u2.set(-1, 0, Complex64::new(0.0, 0.025));
            }
            u
        }
    }
}

/// Seeded divergence-free field with `|û(k)| ~ (1+|k|)^{-2}`, random phases,
/// Leray projected; the mean is zero.
pub fn random_divergence_free(degree: usize, seed: u64) -> VelocityField2D {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |k1: i64, k2: i64| {
        if k1 == 0 && k2 == 0 {
            return ZERO;
        }
        let amp = (1.0 + ((k1 * k1 + k2 * k2) as f64).sqrt()).powi(-2);
        Complex64::from_polar(amp * rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI))
    };
    let mut u1 = SpectralField2D::from_fn(degree, &mut draw);
    let mut u2 = SpectralField2D::from_fn(degree, &mut draw);
    u1.symmetrize();
    u2.symmetrize();
    leray_project(&VelocityField2D { u1, u2 })
}

/// `∫ Σ_{α,β} u_α u_β ((I - S_R) ∂_α u_β) dx` evaluated exactly on a padded grid.
pub fn cancellation_integral(um: &VelocityField2D, prof: &Profile2D) -> f64 {
    let n = um.degree();
    let len = 3 * n + 1;
    let vals: Vec<Vec<f64>> = (0..2).map(|a| evaluate_on_grid2(um.component(a), len)).collect();
    let mut total = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let d = um.component(b).derivative(a).map_modes(|k1, k2, c| c * (1.0 - prof.factor(k1, k2)));
            let dv = evaluate_on_grid2(&d, len);
            total += (0..len * len).map(|i| vals[a][i] * vals[b][i] * dv[i]).sum::<f64>();
        }
    }
    total * (2.0 * PI / len as f64).powi(2)
}

/// Vorticity rows `x1,x2,omega` on the `(2N+1)²` grid.
pub fn write_vorticity_csv<W: std::io::Write>(u: &VelocityField2D, mut w: W) -> std::io::Result<()> {
    let len = 2 * u.degree() + 1;
    let vals = evaluate_on_grid2(&vorticity(u), len);
    let h = 2.0 * PI / len as f64;
    writeln!(w, "x1,x2,omega")?;
    for (i, v) in vals.iter().enumerate() {
        writeln!(w, "{:e},{:e},{:e}", (i / len) as f64 * h, (i % len) as f64 * h, v)?;
    }
    Ok(())
}
