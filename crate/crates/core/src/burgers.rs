//! Inviscid Burgers `u_t + (u²/2)_x = 0`: spectral, 2/3 de-aliased and
//! spectral-viscosity semi-discretizations, the smooth and entropy-solution
//! references, and the post-shock instability diagnostics.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::coefficient::PeriodicFn;
use crate::diagnostics::periodic_tv;
use crate::error::{Result, SpecError};
use crate::fourier::{
    analyze_samples, apply_profile, differentiate, evaluate_on_grid, grid, interpolated_product, product,
    truncated_product, ProfileKind, SmoothingProfile, SpectralField,
};

/// Which semi-discretization to run.
#[derive(Clone, Debug, PartialEq)]
pub enum BurgersScheme {
    Spectral,
    TwoThirds(SmoothingProfile),
    SpectralViscosity(SmoothingProfile),
}

impl BurgersScheme {
    pub fn two_thirds(degree: usize) -> Result<Self> {
        Ok(Self::TwoThirds(SmoothingProfile::two_thirds(degree)?))
    }

    pub fn spectral_viscosity(degree: usize, order: u32) -> Result<Self> {
        Ok(Self::SpectralViscosity(SmoothingProfile::spectral_viscosity(degree, order)?))
    }

    pub fn rhs(&self, u: &SpectralField) -> Result<SpectralField> {
        match self {
            Self::Spectral => Ok(rhs_spectral(u)),
            Self::TwoThirds(p) => rhs_two_thirds(u, p),
            Self::SpectralViscosity(p) => rhs_sv(u, p),
        }
    }

    /// Smoothing that defines the weighted norm and `u_m`; identity for the
    /// spectral and SV schemes.
    pub fn smoothing(&self, degree: usize) -> SmoothingProfile {
        match self {
            Self::TwoThirds(p) => p.clone(),
            _ => SmoothingProfile::identity(degree),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectral => "spectral",
            Self::TwoThirds(_) => "two-thirds",
            Self::SpectralViscosity(_) => "sv",
        }
    }
}

#[derive(Clone, Debug)]
pub struct BurgersProblem {
    pub u0: PeriodicFn,
    pub degree: usize,
    pub scheme: BurgersScheme,
}

impl BurgersProblem {
    pub fn initial_field(&self) -> SpectralField {
        self.u0.projection(self.degree)
    }
}

fn flux_derivative(square: &SpectralField) -> SpectralField {
    differentiate(square).scaled(-0.5)
}

/// `-½ ∂_x S_N[u_N²]`, the square formed exactly before truncation.
pub fn rhs_spectral(u: &SpectralField) -> SpectralField {
    flux_derivative(&truncated_product(u, u, u.degree()))
}

/// `-½ ∂_x I_N[(S_R u_N)²]` on the `2N+1` grid.
pub fn rhs_two_thirds(u: &SpectralField, prof: &SmoothingProfile) -> Result<SpectralField> {
    prof.require("two_thirds", prof.kind() == ProfileKind::TwoThirds)?;
    let um = apply_profile(u, prof)?;
    Ok(flux_derivative(&interpolated_product(&um, &um)))
}

/// `-½ ∂_x I_N[u_N²] - N Σ σ_k û_k e^{ikx}` with SV factors `σ_k`.
pub fn rhs_sv(u: &SpectralField, svprof: &SmoothingProfile) -> Result<SpectralField> {
    svprof.require("sv", matches!(svprof.kind(), ProfileKind::SpectralViscosity { .. }))?;
    if svprof.degree() != u.degree() {
        return Err(SpecError::DegreeMismatch {
            expected: u.degree(),
            got: svprof.degree(),
        });
    }
    let mut out = flux_derivative(&interpolated_product(u, u));
    out.axpy(-1.0, &sv_term(u, svprof));
    Ok(out)
}

/// `N Σ σ_k û_k e^{ikx}` (the damping subtracted by the SV scheme).
pub fn sv_term(u: &SpectralField, svprof: &SmoothingProfile) -> SpectralField {
    let n = u.degree() as f64;
    SpectralField::from_fn(u.degree(), |k| u.coeff(k) * (n * svprof.factor(k)))
}

/// `T_c = -1 / min u₀'`, by scanning `u₀'` on `10⁵` points; infinite when `u₀' >= 0`.
pub fn critical_time(u0: &PeriodicFn) -> f64 {
    let min = grid(100_000).map(|x| u0.eval_derivative(x)).fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

/// Residual tolerance of the implicit characteristic solve.
pub const SMOOTH_RESIDUAL_TOL: f64 = 1e-12;

/// Exact smooth solution: solves `u = u₀(x - u t)` pointwise with Newton's
/// method, falling back to bisection on `[min u₀, max u₀]`.
pub fn exact_smooth_solution(u0: &PeriodicFn, t: f64, points: &[f64]) -> Result<Vec<f64>> {
    let tc = critical_time(u0);
    if t >= tc {
        return Err(SpecError::PastCriticalTime { t, critical: tc });
    }
    if t == 0.0 {
        return Ok(points.iter().map(|&x| u0.eval(x)).collect());
    }
    let samples = u0.sample(4096);
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min) - 1e-3;
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 1e-3;
    points.iter().map(|&x| solve_characteristic(u0, x, t, lo, hi)).collect()
}

fn solve_characteristic(u0: &PeriodicFn, x: f64, t: f64, lo: f64, hi: f64) -> Result<f64> {
    // g is increasing in u for t < T_c
    let g = |u: f64| u - u0.eval(x - u * t);
    let (mut a, mut b) = (lo, hi);
    if g(a) > 0.0 || g(b) < 0.0 {
        return Err(SpecError::RootSolve { x });
    }
    let mut u = u0.eval(x).clamp(a, b);
    for _ in 0..200 {
        let r = g(u);
        if r.abs() <= SMOOTH_RESIDUAL_TOL {
            return Ok(u);
        }
        if r > 0.0 {
            b = u;
        } else {
            a = u;
        }
        let dg = 1.0 + t * u0.eval_derivative(x - u * t);
        let newton = u - r / dg;
        u = if dg > 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        if b - a < 1e-16 {
            break;
        }
    }
    if g(u).abs() <= SMOOTH_RESIDUAL_TOL {
        Ok(u)
    } else {
        Err(SpecError::RootSolve { x })
    }
}

/// Cell averages of the Godunov entropy solution on `M` uniform cells.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReference {
    pub cells: usize,
    pub t: f64,
    pub values: Vec<f64>,
}

impl EntropyReference {
    pub fn cell_width(&self) -> f64 {
        2.0 * PI / self.cells as f64
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> {
        let h = self.cell_width();
        (0..self.cells).map(move |i| (i as f64 + 0.5) * h)
    }

    pub fn total_variation(&self) -> f64 {
        periodic_tv(&self.values)
    }

    /// `∫|a - b| dx` against another reference on the same or a finer grid,
    /// the finer one averaged down.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let (coarse, fine) = if self.cells <= other.cells { (self, other) } else { (other, self) };
        let r = fine.cells / coarse.cells;
        assert_eq!(r * coarse.cells, fine.cells, "grids must nest");
        coarse
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let avg = fine.values[i * r..(i + 1) * r].iter().sum::<f64>() / r as f64;
                (v - avg).abs()
            })
            .sum::<f64>()
            * coarse.cell_width()
    }
}

pub const GODUNOV_CFL: f64 = 0.45;

/// Exact Riemann (Godunov) flux for `f(u) = u²/2`.
#[inline]
pub fn godunov_flux(ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        if ul > 0.0 {
            0.5 * ul * ul
        } else if ur < 0.0 {
            0.5 * ur * ur
        } else {
            0.0
        }
    } else {
        // shock: upwind by the sign of the speed (ul + ur)/2
        0.5 * (ul * ul).max(ur * ur)
    }
}

/// First-order Godunov solution at time `t` on `M` cells, CFL 0.45.
pub fn godunov_reference(u0: &PeriodicFn, t: f64, cells: usize) -> Result<EntropyReference> {
    if cells < 128 {
        return Err(SpecError::InvalidArgument(format!("need at least 128 cells, got {cells}")));
    }
    let h = 2.0 * PI / cells as f64;
    // three-point Gauss–Legendre cell averages
    let gauss = [(-(0.6f64).sqrt(), 5.0 / 18.0), (0.0, 8.0 / 18.0), ((0.6f64).sqrt(), 5.0 / 18.0)];
    let mut u: Vec<f64> = (0..cells)
        .map(|i| {
            let xc = (i as f64 + 0.5) * h;
            gauss.iter().map(|(p, w)| w * u0.eval(xc + 0.5 * h * p)).sum()
        })
        .collect();
    let mut flux = vec![0.0; cells];
    let mut time = 0.0;
    while time < t {
        let vmax = u.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
        let mut dt = GODUNOV_CFL * h / vmax;
        if time + dt > t {
            dt = t - time;
        }
        // flux[i] sits at the right face of cell i
        for i in 0..cells {
            flux[i] = godunov_flux(u[i], u[(i + 1) % cells]);
        }
        let r = dt / h;
        for i in 0..cells {
            let left = flux[(i + cells - 1) % cells];
            u[i] -= r * (flux[i] - left);
        }
        time += dt;
    }
    Ok(EntropyReference { cells, t, values: u })
}


/// `max|u_m|`, `TV(u_m)` and `max|u_m| · TV²` on an oversampled grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstabilityReport {
    pub maxabs: f64,
    pub tv: f64,
    pub product: f64,
    /// `product / √m` with `m = 2N/3`.
    pub product_over_sqrt_m: f64,
}

pub fn instability_functional(um: &SpectralField, oversample: usize) -> Result<InstabilityReport> {
    if oversample < 8 {
        return Err(SpecError::InvalidArgument(format!("oversample must be >= 8, got {oversample}")));
    }
    let n = um.degree();
    let vals = evaluate_on_grid(um, oversample * (2 * n + 1));
    let maxabs = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let tv = periodic_tv(&vals);
    let product = maxabs * tv * tv;
    let m = 2.0 * n as f64 / 3.0;
    Ok(InstabilityReport {
        maxabs,
        tv,
        product,
        product_over_sqrt_m: product / m.sqrt(),
    })
}

/// `½ ∫ u_m ∂_x (Id - S_R)[u_m²] dx` from exact modal inner products.
pub fn energy_production(um: &SpectralField, prof: &SmoothingProfile) -> Result<f64> {
    if prof.degree() != um.degree() {
        return Err(SpecError::DegreeMismatch {
            expected: um.degree(),
            got: prof.degree(),
        });
    }
    let sq = product(um, um);
    let s: f64 = um
        .modes()
        .map(|(k, c)| {
            let w = sq.coeff(k) * (1.0 - prof.factor(k));
            (c.conj() * Complex64::new(0.0, k as f64) * w).re
        })
        .sum();
    Ok(0.5 * 2.0 * PI * s)
}

/// Evaluates a field at the cell centers of a reference and returns the
/// discrete `L²` distance `(Σ h |u - ref|²)^{1/2}`.
pub fn l2_distance_to_reference(u: &SpectralField, reference: &EntropyReference) -> f64 {
    let h = reference.cell_width();
    // cell centers are a half-cell shift of a uniform grid
    let shifted = shift(u, 0.5 * h);
    let vals = evaluate_on_grid(&shifted, reference.cells.max(2 * u.degree() + 1));
    assert_eq!(vals.len(), reference.cells, "reference grid too coarse for degree {}", u.degree());
    (vals
        .iter()
        .zip(&reference.values)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        * h)
        .sqrt()
}

/// `u(x + a)` as a spectral field.
pub fn shift(u: &SpectralField, a: f64) -> SpectralField {
    SpectralField::from_fn(u.degree(), |k| u.coeff(k) * Complex64::from_polar(1.0, k as f64 * a))
}

/// Samples of the exact square `u²` as a cross-check of the padded product.
pub fn padded_square(u: &SpectralField) -> SpectralField {
    let n = u.degree();
    let len = 8 * n + 1;
    let v = evaluate_on_grid(u, len);
    let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
    analyze_samples(&sq, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(n: usize, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = SpectralField::from_fn(n, |k| {
            let amp = 1.0 / (1.0 + k.abs() as f64);
            c(rng.gen_range(-1.0..1.0) * amp, rng.gen_range(-1.0..1.0) * amp)
        });
        f.symmetrize();
        f
    }

    fn close(a: &SpectralField, b: &SpectralField, tol: f64) -> bool {
        a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| (x - y).norm() <= tol)
    }

    fn direct_square(u: &SpectralField) -> SpectralField {
        let n = u.degree() as i64;
        SpectralField::from_fn(2 * u.degree(), |m| (-n..=n).map(|j| u.coeff(j) * u.coeff(m - j)).sum())
    }

    #[test]
    fn spectral_rhs_examples() {
        let flat = SpectralField::real_mode(6, 0, c(0.7, 0.0));
        assert!(rhs_spectral(&flat).max_abs_coeff() < 1e-14);
        // -½ ∂_x[(1 - cos 2x)/2] = -½ sin 2x
        let sine = SpectralField::real_mode(4, 1, c(0.0, -0.5));
        let want = SpectralField::real_mode(4, 2, c(0.0, 0.25));
        assert!(close(&rhs_spectral(&sine), &want, 1e-15));
    }

    #[test]
    fn spectral_square_matches_padded_grid() {
        let u = random_field(20, 1);
        let sq = truncated_product(&u, &u, 20);
        assert!(close(&sq, &padded_square(&u), 1e-12));
        assert!(close(&sq, &direct_square(&u).resized(20), 1e-13));
    }

    #[test]
    fn two_thirds_examples() {
        let n = 30;
        let prof = SmoothingProfile::two_thirds(n).unwrap();
        // modes within N/6, so the square stays inside the untouched band
        let low = SpectralField::from_fn(n, |k| if k.abs() <= 5 { random_field(n, 2).coeff(k) } else { c(0.0, 0.0) });
        assert!(close(&rhs_two_thirds(&low, &prof).unwrap(), &rhs_spectral(&low), 1e-14));
        let top = SpectralField::real_mode(n, n as i64, c(0.4, 0.1));
        assert_eq!(rhs_two_thirds(&top, &prof).unwrap().max_abs_coeff(), 0.0);
        let wrong = SmoothingProfile::identity(n);
        assert!(matches!(rhs_two_thirds(&top, &wrong), Err(SpecError::WrongProfile { .. })));
    }

    #[test]
    fn two_thirds_square_is_alias_free() {
        let n = 32;
        let prof = SmoothingProfile::two_thirds(n).unwrap();
        for seed in 0..10 {
            let um = apply_profile(&random_field(n, seed), &prof).unwrap();
            let via_grid = apply_profile(&interpolated_product(&um, &um), &prof).unwrap();
            let exact = apply_profile(&direct_square(&um).resized(n), &prof).unwrap();
            assert!(close(&via_grid, &exact, 1e-12));
        }
    }

    #[test]
    fn sv_examples() {
        let n = 64;
        let prof = SmoothingProfile::spectral_viscosity(n, 1).unwrap();
        let low = SpectralField::from_fn(n, |k| if k.abs() <= 8 { c(1.0, 0.0) } else { c(0.0, 0.0) });
        assert_eq!(sv_term(&low, &prof).max_abs_coeff(), 0.0);
        assert_eq!(rhs_sv(&SpectralField::zeros(n), &prof).unwrap().max_abs_coeff(), 0.0);
        assert!(rhs_sv(&low, &SmoothingProfile::two_thirds(n).unwrap()).is_err());
        assert!(rhs_sv(&low, &SmoothingProfile::spectral_viscosity(n + 1, 1).unwrap()).is_err());
    }

    #[test]
    fn sv_energy_budget() {
        // d/dt ½‖u‖² = -⟨u, SV term⟩ + ⟨u, -½∂ I_N[u²]⟩
        let n = 24;
        let prof = SmoothingProfile::spectral_viscosity(n, 1).unwrap();
        let u = random_field(n, 7).scaled(0.3);
        let budget = -u.inner(&sv_term(&u, &prof)) + u.inner(&flux_derivative(&interpolated_product(&u, &u)));
        assert!(u.inner(&sv_term(&u, &prof)) >= 0.0);
        let h = 1e-4;
        let step = |v: &SpectralField, dt: f64| {
            let mut w = v.clone();
            let k1 = rhs_sv(v, &prof).unwrap();
            let mut tmp = v.clone();
            tmp.axpy(0.5 * dt, &k1);
            let k2 = rhs_sv(&tmp, &prof).unwrap();
            let mut tmp = v.clone();
            tmp.axpy(0.5 * dt, &k2);
            let k3 = rhs_sv(&tmp, &prof).unwrap();
            let mut tmp = v.clone();
            tmp.axpy(dt, &k3);
            let k4 = rhs_sv(&tmp, &prof).unwrap();
            w.axpy(dt / 6.0, &k1);
            w.axpy(dt / 3.0, &k2);
            w.axpy(dt / 3.0, &k3);
            w.axpy(dt / 6.0, &k4);
            w
        };
        let fwd = step(&u, h).l2_norm_sq();
        let back = step(&u, -h).l2_norm_sq();
        let rate = 0.5 * (fwd - back) / (2.0 * h);
        assert!((rate - budget).abs() <= 1e-6 * budget.abs().max(1.0), "{rate} vs {budget}");
    }

    #[test]
    fn critical_time_of_sine() {
        for a in [0.5, 1.0, 2.0] {
            assert!((critical_time(&PeriodicFn::sine(a)) - 1.0 / a).abs() < 1e-9);
        }
        assert!(critical_time(&PeriodicFn::constant(1.0)).is_infinite());
    }

    #[test]
    fn smooth_solution_basics() {
        let u0 = PeriodicFn::sine(0.5);
        let pts: Vec<f64> = grid(33).collect();
        let at0 = exact_smooth_solution(&u0, 0.0, &pts).unwrap();
        for (x, v) in pts.iter().zip(&at0) {
            assert_eq!(*v, u0.eval(*x));
        }
        let at1 = exact_smooth_solution(&u0, 1.5, &pts).unwrap();
        for (x, v) in pts.iter().zip(&at1) {
            assert!((v - u0.eval(x - v * 1.5)).abs() <= SMOOTH_RESIDUAL_TOL);
        }
        assert!(matches!(exact_smooth_solution(&u0, 2.5, &pts), Err(SpecError::PastCriticalTime { .. })));
    }

    #[test]
    fn godunov_basics() {
        let flat = godunov_reference(&PeriodicFn::constant(0.3), 1.0, 128).unwrap();
        assert!(flat.values.iter().all(|v| (v - 0.3).abs() < 1e-14));
        assert!(godunov_reference(&PeriodicFn::constant(0.3), 1.0, 64).is_err());
        assert_eq!(godunov_flux(-1.0, 1.0), 0.0);
        assert_eq!(godunov_flux(2.0, 1.0), 2.0);
        assert_eq!(godunov_flux(1.0, -3.0), 4.5);
        let r = godunov_reference(&PeriodicFn::sine(1.0), 2.0, 1024).unwrap();
        assert!(r.total_variation() <= 4.0);
        // N-wave: increasing away from the shock at π, one downward jump there
        let drops: Vec<usize> = (0..r.cells)
            .filter(|&i| r.values[(i + 1) % r.cells] - r.values[i] < -0.2)
            .collect();
        assert_eq!(drops.len(), 1);
        assert!((r.centers().nth(drops[0]).unwrap() - PI).abs() < 2.0 * r.cell_width());
    }

    #[test]
    fn instability_functional_examples() {
        let flat = SpectralField::real_mode(8, 0, c(-2.0, 0.0));
        let rep = instability_functional(&flat, 8).unwrap();
        assert!((rep.maxabs - 2.0).abs() < 1e-14 && rep.tv < 1e-13 && rep.product < 1e-12);
        let sine = SpectralField::real_mode(8, 1, c(0.0, -0.5));
        let rep = instability_functional(&sine, 16).unwrap();
        assert!((rep.maxabs - 1.0).abs() < 0.01);
        assert!((rep.tv - 4.0).abs() < 0.04);
        assert!((rep.product - 16.0).abs() < 0.16);
        assert!(instability_functional(&sine, 4).is_err());
    }

    fn quadrature_production(um: &SpectralField, prof: &SmoothingProfile) -> f64 {
        let n = um.degree() as i64;
        let sq = direct_square(um);
        let len = 8 * um.degree();
        let h = 2.0 * PI / len as f64;
        (0..len)
            .map(|i| {
                let x = i as f64 * h;
                let u: f64 = (-n..=n).map(|k| (um.coeff(k) * Complex64::from_polar(1.0, k as f64 * x)).re).sum();
                let d: f64 = (-2 * n..=2 * n)
                    .map(|k| {
                        let w = 1.0 - prof.factor(k);
                        (sq.coeff(k) * w * Complex64::new(0.0, k as f64) * Complex64::from_polar(1.0, k as f64 * x)).re
                    })
                    .sum();
                0.5 * u * d * h
            })
            .sum()
    }

    #[test]
    fn energy_production_examples() {
        let n = 32;
        let prof = SmoothingProfile::two_thirds(n).unwrap();
        assert_eq!(energy_production(&SpectralField::zeros(n), &prof).unwrap(), 0.0);
        let low = SpectralField::from_fn(n, |k| if k.abs() <= 5 { random_field(n, 3).coeff(k) } else { c(0.0, 0.0) });
        assert!(energy_production(&low, &prof).unwrap().abs() < 1e-15);
        for seed in 0..4 {
            let um = apply_profile(&random_field(n, seed), &prof).unwrap();
            let fast = energy_production(&um, &prof).unwrap();
            let slow = quadrature_production(&um, &prof);
            assert!((fast - slow).abs() < 1e-10, "{fast} vs {slow}");
        }
        assert!(energy_production(&low, &SmoothingProfile::identity(n - 1)).is_err());
    }

    #[test]
    fn shift_moves_the_profile() {
        let sine = SpectralField::real_mode(3, 1, c(0.0, -0.5));
        let moved = shift(&sine, 0.4);
        assert!((eval_at(&moved, 1.0) - (1.4f64).sin()).abs() < 1e-15);
    }

    use crate::coefficient::eval_at;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn semi_discrete_conservation(seed in any::<u64>(), n in 8usize..48) {
            let u = random_field(n, seed);
            let scale = u.l2_norm_sq();
            prop_assert!(u.inner(&rhs_spectral(&u)).abs() <= 1e-13 * scale);
            let prof = SmoothingProfile::two_thirds(n).unwrap();
            let um = apply_profile(&u, &prof).unwrap();
            prop_assert!(um.inner(&rhs_two_thirds(&u, &prof).unwrap()).abs() <= 1e-13 * scale);
        }

        #[test]
        fn sv_modal_sum_nonpositive(seed in any::<u64>(), n in 4usize..64, r in 1u32..4) {
            let u = random_field(n, seed);
            let prof = SmoothingProfile::spectral_viscosity(n, r).unwrap();
            prop_assert!(-u.inner(&sv_term(&u, &prof)) <= 0.0);
        }
    }
}
