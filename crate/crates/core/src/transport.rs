//! Semi-discretizations of `u_t + (q(x) u)_x = 0`.
//!
//! Three variants: the spectral (Galerkin) method, the pseudo-spectral
//! (collocation) method and the 2/3 smoothed pseudo-spectral method. For
//! `q = sin x` with purely imaginary data the collocation method reduces to a
//! real tridiagonal system for `b_k = Im ũ_k`, exposed as [`SinxModel`].

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::coefficient::PeriodicFn;
use crate::error::{Result, SpecError};
use crate::fourier::{
    analyze_samples, apply_profile, differentiate, evaluate_on_grid, grid, truncated_product, ProfileKind,
    SmoothingProfile, SpectralField,
};
use crate::timestepping::OdeState;

#[derive(Clone, Debug)]
pub struct TransportProblem {
    pub q: PeriodicFn,
    pub degree: usize,
}

impl TransportProblem {
    pub fn new(q: PeriodicFn, degree: usize) -> Self {
        Self { q, degree }
    }

    fn need_coeffs(&self, needed: usize) -> Result<()> {
        let available = self.q.available_degree();
        if available < needed {
            return Err(SpecError::MissingCoefficients { needed, available });
        }
        Ok(())
    }
}

/// `-∂_x S_N[q u_N]`, with the product formed exactly from `q̂(p)`, `|p| <= 2N`.
pub fn rhs_spectral(u: &SpectralField, prob: &TransportProblem) -> Result<SpectralField> {
    let n = u.degree();
    prob.need_coeffs(2 * n)?;
    let q = prob.q.coeffs_to(2 * n);
    let qu = truncated_product(&q, u, n);
    Ok(differentiate(&qu).scaled(-1.0))
}

/// `-∂_x I_N[q u_N]`: pointwise product with `q(x_ν)` on the `2N+1` grid.
pub fn rhs_pseudospectral(u: &SpectralField, prob: &TransportProblem) -> Result<SpectralField> {
    let n = u.degree();
    let len = 2 * n + 1;
    let mut vals = evaluate_on_grid(u, len);
    for (v, x) in vals.iter_mut().zip(grid(len)) {
        *v *= prob.q.eval(x);
    }
    Ok(differentiate(&analyze_samples(&vals, n)).scaled(-1.0))
}

/// `-∂_x I_N[q S_R u_N]` with a 2/3 smoothing profile.
pub fn rhs_two_thirds(u: &SpectralField, prob: &TransportProblem, prof: &SmoothingProfile) -> Result<SpectralField> {
    prof.require("two_thirds", prof.kind() == ProfileKind::TwoThirds)?;
    rhs_pseudospectral(&apply_profile(u, prof)?, prob)
}

/// `∫ u_N ∂_x A_N[q u_N] dx`, the energy production of the aliasing error,
/// evaluated from the image sums `Σ_{ℓ≠0} q̂(m + ℓ(2N+1))`.
pub fn aliasing_functional(u: &SpectralField, prob: &TransportProblem) -> Result<f64> {
    let n = u.degree() as i64;
    prob.need_coeffs(4 * u.degree() + 2)?;
    let period = 2 * n + 1;
    let top = prob.q.coeffs().degree() as i64;
    // images[m + 2n] = Σ_{ℓ≠0} q̂(m + ℓ(2N+1)), |m| <= 2N
    let images: Vec<Complex64> = (-2 * n..=2 * n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut l = 1;
            loop {
                let (a, b) = (m + l * period, m - l * period);
                if a.abs() > top && b.abs() > top {
                    break;
                }
                acc += prob.q.coeff(a) + prob.q.coeff(b);
                l += 1;
            }
            acc
        })
        .collect();
    let mut s = Complex64::new(0.0, 0.0);
    for (j, uj) in u.modes() {
        if uj == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for (k, uk) in u.modes() {
            inner += uk * images[(j - k + 2 * n) as usize];
        }
        s += uj.conj() * inner * (j as f64);
    }
    Ok((Complex64::new(0.0, 2.0 * PI) * s).re)
}

/// Imaginary parts `b_k = Im ũ_k`, `k = 1..=N`, of an odd real field.
#[derive(Clone, Debug, PartialEq)]
pub struct ImagModeState {
    pub b: Vec<f64>,
}

impl ImagModeState {
    pub fn new(b: Vec<f64>) -> Self {
        Self { b }
    }

    pub fn degree(&self) -> usize {
        self.b.len()
    }

    /// `b_k`, 1-based.
    pub fn get(&self, k: usize) -> f64 {
        self.b[k - 1]
    }

    pub fn last(&self) -> f64 {
        *self.b.last().unwrap_or(&0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.b.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn norm(&self) -> f64 {
        self.b.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// The odd real field with `ũ_k = i b_k`, `ũ_{-k} = -i b_k`.
    pub fn to_field(&self) -> SpectralField {
        let n = self.degree();
        SpectralField::from_fn(n, |k| match k {
            0 => Complex64::new(0.0, 0.0),
            k if k > 0 => Complex64::new(0.0, self.b[k as usize - 1]),
            k => Complex64::new(0.0, -self.b[(-k) as usize - 1]),
        })
    }

    pub fn from_field(u: &SpectralField) -> Self {
        Self {
            b: (1..=u.degree() as i64).map(|k| u.coeff(k).im).collect(),
        }
    }
}

impl OdeState for ImagModeState {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.b.axpy(a, &x.b)
    }
    fn is_finite(&self) -> bool {
        self.b.iter().all(|v| v.is_finite())
    }
}

/// `db_k/dt = (k/2)(b_{k-1} - b_{k+1})` with `b_0 = 0` and the aliasing closure
/// `b_{N+1} = -b_N`.
pub fn rhs_sinx_imag(b: &ImagModeState) -> ImagModeState {
    SinxModel::default().rhs(b)
}

/// The imaginary-mode system, optionally with the top mode held at zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SinxModel {
    pub zero_last_mode: bool,
}

impl SinxModel {
    pub fn rhs(&self, state: &ImagModeState) -> ImagModeState {
        let b = &state.b;
        let n = b.len();
        let at = |k: usize| -> f64 {
            if k == 0 {
                0.0
            } else if k == n + 1 {
                -b[n - 1]
            } else {
                b[k - 1]
            }
        };
        let mut out: Vec<f64> = (1..=n).map(|k| 0.5 * k as f64 * (at(k - 1) - at(k + 1))).collect();
        if self.zero_last_mode && n > 0 {
            out[n - 1] = 0.0;
        }
        ImagModeState { b: out }
    }

    /// Applies the constraint to initial data.
    pub fn constrain(&self, mut state: ImagModeState) -> ImagModeState {
        if self.zero_last_mode {
            if let Some(last) = state.b.last_mut() {
                *last = 0.0;
            }
        }
        state
    }
}

/// Under-resolved data `b_k(0) = x_k³(π - x_k)³/20`, `x_k = πk/N`.
pub fn bump_modes(n: usize) -> ImagModeState {
    ImagModeState::new(
        (1..=n)
            .map(|k| {
                let x = PI * k as f64 / n as f64;
                x.powi(3) * (PI - x).powi(3) / 20.0
            })
            .collect(),
    )
}

/// Resolved data `b_k(0) = k^{-3}`.
pub fn cubic_decay_modes(n: usize) -> ImagModeState {
    ImagModeState::new((1..=n).map(|k| (k as f64).powi(-3)).collect())
}

/// Step size of the per-point characteristic integration.
pub const CHARACTERISTIC_DT: f64 = 1e-4;

/// Exact solution by characteristics: `u(x,t) = u₀(X₀) ∂X₀/∂x`, where `X₀` is the
/// foot of the characteristic `X' = q(X)` through `(x, t)`. The backward
/// characteristic and its Jacobian are integrated with RK4.
pub fn exact_linear_solution(q: &PeriodicFn, u0: &PeriodicFn, t: f64, points: &[f64]) -> Result<Vec<f64>> {
    if t < 0.0 {
        return Err(SpecError::InvalidArgument(format!("t must be >= 0, got {t}")));
    }
    points
        .par_iter()
        .map(|&x| {
            let (x0, jac) = backward_characteristic(q, x, t);
            if !(x0.is_finite() && jac.is_finite()) {
                return Err(SpecError::RootSolve { x });
            }
            Ok(u0.eval(x0) * jac)
        })
        .collect()
}

/// Foot `X₀(x, t)` and Jacobian `∂X₀/∂x` of the characteristic through `(x, t)`.
pub fn backward_characteristic(q: &PeriodicFn, x: f64, t: f64) -> (f64, f64) {
    if t == 0.0 {
        return (x, 1.0);
    }
    let steps = (t / CHARACTERISTIC_DT).ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let f = |y: [f64; 2]| [-q.eval(y[0]), -q.eval_derivative(y[0]) * y[1]];
    let mut y = [x, 1.0];
    for _ in 0..steps {
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    (y[0], y[1])
}

/// Closed-form foot of the characteristic for `q = sin x`:
/// `tan(X₀/2) = e^{-t} tan(x/2)`, continued across `x = π`.
pub fn sine_backward_map(x: f64, t: f64) -> (f64, f64) {
    // reduce to (-π, π]
    let shift = ((x + PI) / (2.0 * PI)).floor() * 2.0 * PI;
    let xr = x - shift;
    let (s, c) = (0.5 * xr).sin_cos();
    let e = (-t).exp();
    // atan2 keeps the branch continuous through x = ±π
    let x0 = 2.0 * (e * s).atan2(c);
    let jac = e / (c * c + e * e * s * s);
    (x0 + shift, jac)
}
