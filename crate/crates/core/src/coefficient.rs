//! Periodic coefficient functions together with their Fourier data.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::fourier::{analyze_samples, evaluate_on_grid, grid, SpectralField};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A smooth 2π-periodic function with its exact (or quadrature) Fourier
/// coefficients up to some degree, its derivative, and `max |q'|`.
#[derive(Clone)]
pub struct PeriodicFn {
    name: String,
    value: RealFn,
    derivative: RealFn,
    coeffs: SpectralField,
    band_limited: bool,
    derivative_max: f64,
}

impl fmt::Debug for PeriodicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicFn")
            .field("name", &self.name)
            .field("degree", &self.coeffs.degree())
            .finish()
    }
}

impl PeriodicFn {
    pub fn constant(c: f64) -> Self {
        Self {
            name: format!("{c}"),
            value: Arc::new(move |_| c),
            derivative: Arc::new(|_| 0.0),
            coeffs: SpectralField::real_mode(0, 0, Complex64::new(c, 0.0)),
            band_limited: true,
            derivative_max: 0.0,
        }
    }

    /// `a sin x` with closed-form coefficients `∓ia/2` at `k = ±1`.
    pub fn sine(a: f64) -> Self {
        Self {
            name: format!("{a}*sin(x)"),
            value: Arc::new(move |x| a * x.sin()),
            derivative: Arc::new(move |x| a * x.cos()),
            coeffs: SpectralField::real_mode(1, 1, Complex64::new(0.0, -0.5 * a)),
            band_limited: true,
            derivative_max: a.abs(),
        }
    }

    /// A trigonometric polynomial given by its coefficients.
    pub fn trig_polynomial(name: &str, coeffs: SpectralField) -> Self {
        let c1 = coeffs.clone();
        let c2 = coeffs.clone();
        let eval = move |c: &SpectralField, x: f64, deriv: bool| {
            c.modes()
                .map(|(k, a)| {
                    let e = Complex64::from_polar(1.0, k as f64 * x);
                    let w = if deriv { Complex64::new(0.0, k as f64) } else { Complex64::new(1.0, 0.0) };
                    (a * w * e).re
                })
                .sum::<f64>()
        };
        let n = coeffs.degree();
        let dmax = derivative_sup(&|x| eval(&c2, x, true), n.max(1));
        Self {
            name: name.to_string(),
            value: Arc::new(move |x| eval(&c1, x, false)),
            derivative: Arc::new(move |x| eval(&c2, x, true)),
            coeffs,
            band_limited: true,
            derivative_max: dmax,
        }
    }

    /// A smooth function whose coefficients up to `degree` are computed by
    /// trapezoidal quadrature on a grid four times finer than `degree`.
    pub fn from_fn<F, D>(name: &str, f: F, df: D, degree: usize) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let len = 8 * degree + 1;
        let samples: Vec<f64> = grid(len).map(&f).collect();
        let coeffs = analyze_samples(&samples, degree);
        let dmax = derivative_sup(&df, degree);
        Self {
            name: name.to_string(),
            value: Arc::new(f),
            derivative: Arc::new(df),
            coeffs,
            band_limited: false,
            derivative_max: dmax,
        }
    }

    /// `sin(x) · g(x)` with `g` the 2π-periodized Gaussian of width `width`
    /// centered at `center`.
    pub fn sine_times_gaussian(center: f64, width: f64, degree: usize) -> Self {
        let g = move |x: f64| -> (f64, f64) {
            let mut v = 0.0;
            let mut dv = 0.0;
            for j in -4..=4 {
                let y = x - center + 2.0 * PI * j as f64;
                let e = (-(y * y) / (2.0 * width * width)).exp();
                v += e;
                dv += -y / (width * width) * e;
            }
            (v, dv)
        };
        Self::from_fn(
            "sin(x)*gauss",
            move |x| x.sin() * g(x).0,
            move |x| {
                let (v, dv) = g(x);
                x.cos() * v + x.sin() * dv
            },
            degree,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    #[inline]
    pub fn eval_derivative(&self, x: f64) -> f64 {
        (self.derivative)(x)
    }

    /// Stored Fourier coefficients.
    pub fn coeffs(&self) -> &SpectralField {
        &self.coeffs
    }

    /// True when the stored coefficients are the complete spectrum.
    pub fn is_band_limited(&self) -> bool {
        self.band_limited
    }

    /// Highest degree for which coefficients are known (unbounded when band-limited).
    pub fn available_degree(&self) -> usize {
        if self.band_limited {
            usize::MAX
        } else {
            self.coeffs.degree()
        }
    }

    /// `q̂(p)`, zero beyond the stored band.
    #[inline]
    pub fn coeff(&self, p: i64) -> Complex64 {
        self.coeffs.coeff(p)
    }

    /// Coefficients resized to `degree` (zero-padded or truncated).
    pub fn coeffs_to(&self, degree: usize) -> SpectralField {
        self.coeffs.resized(degree)
    }

    pub fn derivative_max(&self) -> f64 {
        self.derivative_max
    }

    /// `S_N` of the function: exact coefficients when band-limited, otherwise
    /// trapezoidal quadrature on a grid sixteen times finer than `N`.
    pub fn projection(&self, degree: usize) -> SpectralField {
        if self.band_limited || degree <= self.coeffs.degree() / 2 {
            self.coeffs.resized(degree)
        } else {
            analyze_samples(&self.sample(16 * degree + 1), degree)
        }
    }

    /// Samples `f(x_ν)` on the `len` point grid.
    pub fn sample(&self, len: usize) -> Vec<f64> {
        grid(len).map(|x| self.eval(x)).collect()
    }
}

fn derivative_sup(df: &dyn Fn(f64) -> f64, degree: usize) -> f64 {
    grid(64 * degree.max(16) + 1).map(|x| df(x).abs()).fold(0.0, f64::max)
}

/// Evaluates a spectral field at arbitrary points by direct summation.
pub fn eval_at(field: &SpectralField, x: f64) -> f64 {
    field
        .modes()
        .map(|(k, c)| (c * Complex64::from_polar(1.0, k as f64 * x)).re)
        .sum()
}

/// Samples of a field on an `oversample · (2N+1)` grid.
pub fn oversampled(field: &SpectralField, oversample: usize) -> Vec<f64> {
    evaluate_on_grid(field, oversample * (2 * field.degree() + 1))
}
