use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::{NodalField, SpectralField};
use super::profile::SmoothingProfile;
use crate::error::{Result, SpecError};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

pub(crate) fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

pub(crate) fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

/// Relative tolerance on Hermitian symmetry accepted by [`synthesize`].
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Discrete coefficients `ũ_k = (1/L) Σ_ν w(x_ν) e^{-ik x_ν}` of samples on an
/// arbitrary `L`-point grid, truncated to `degree` (requires `2·degree < L`).
pub fn analyze_samples(values: &[f64], degree: usize) -> SpectralField {
    let len = values.len();
    assert!(2 * degree < len, "degree {degree} not resolved by {len} samples");
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_plan(len).process(&mut buf);
    let inv = 1.0 / len as f64;
    let mut out = SpectralField::from_fn(degree, |k| buf[k.rem_euclid(len as i64) as usize] * inv);
    out.symmetrize();
    out
}

/// Evaluates a trigonometric polynomial on the `len`-point grid. Modes above
/// the grid's Nyquist band fold onto their images. Only the real part is returned.
pub fn evaluate_on_grid(spec: &SpectralField, len: usize) -> Vec<f64> {
    assert!(len > 0);
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (k, c) in spec.modes() {
        buf[k.rem_euclid(len as i64) as usize] += c;
    }
    inverse_plan(len).process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Discrete Fourier coefficients of nodal data (the interpolant `I_N`).
pub fn analyze(nodal: &NodalField) -> SpectralField {
    analyze_samples(nodal.values(), nodal.degree())
}

/// Grid values of a real trigonometric polynomial; rejects non-Hermitian input.
pub fn synthesize(spec: &SpectralField) -> Result<NodalField> {
    let defect = spec.hermitian_defect();
    if defect > HERMITIAN_TOL * spec.max_abs_coeff().max(1.0) {
        return Err(SpecError::NotHermitian { asymmetry: defect });
    }
    let n = spec.degree();
    NodalField::new(n, evaluate_on_grid(spec, 2 * n + 1))
}

/// Spectral projection `S_M`: keeps modes `|k| <= M`.
pub fn project(spec: &SpectralField, m: usize) -> Result<SpectralField> {
    if m > spec.degree() {
        return Err(SpecError::ProjectionDegree {
            from: spec.degree(),
            to: m,
        });
    }
    Ok(spec.resized(m))
}

/// Aliasing error `A_N[w]` of a function known through its exact coefficients up to
/// degree `M_big`: for `|k| <= N`, the sum of all modes `k + j(2N+1)`, `j != 0`.
pub fn aliasing_error(exact: &SpectralField, n: usize) -> Result<SpectralField> {
    let big = exact.degree();
    if big < n {
        return Err(SpecError::ProjectionDegree { from: big, to: n });
    }
    let period = (2 * n + 1) as i64;
    let big = big as i64;
    Ok(SpectralField::from_fn(n, |k| {
        let mut acc = Complex64::new(0.0, 0.0);
        // images above and below, until they leave the known band
        let mut j = 1;
        loop {
            let up = k + j * period;
            let down = k - j * period;
            if up.abs() > big && down.abs() > big {
                break;
            }
            acc += exact.coeff(up) + exact.coeff(down);
            j += 1;
        }
        acc
    }))
}

/// `∂_x`: multiplies mode `k` by `ik`.
pub fn differentiate(spec: &SpectralField) -> SpectralField {
    SpectralField::from_fn(spec.degree(), |k| spec.coeff(k) * Complex64::new(0.0, k as f64))
}

/// Multiplies mode `k` by the profile factor `σ_k`.
pub fn apply_profile(spec: &SpectralField, prof: &SmoothingProfile) -> Result<SpectralField> {
    if prof.degree() != spec.degree() {
        return Err(SpecError::DegreeMismatch {
            expected: spec.degree(),
            got: prof.degree(),
        });
    }
    Ok(SpectralField::from_fn(spec.degree(), |k| spec.coeff(k) * prof.factor(k)))
}

/// Exact product of two trigonometric polynomials, of degree `deg(a) + deg(b)`.
/// Evaluated on a grid fine enough that no product mode aliases.
pub fn product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    let degree = a.degree() + b.degree();
    let len = 2 * degree + 1;
    let va = evaluate_on_grid(a, len);
    let vb = evaluate_on_grid(b, len);
    let prod: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    analyze_samples(&prod, degree)
}

/// `S_N[a·b]`: the exact product truncated to degree `n`. Uses the smallest grid
/// on which modes above `n` cannot fold back into `|k| <= n`.
pub fn truncated_product(a: &SpectralField, b: &SpectralField, n: usize) -> SpectralField {
    let top = a.degree() + b.degree();
    if top <= n {
        return product(a, b).resized(n);
    }
    let len = top + n + 1;
    let va = evaluate_on_grid(a, len);
    let vb = evaluate_on_grid(b, len);
    let prod: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    analyze_samples(&prod, n)
}

/// `I_N[a·b]`: pointwise product on the `2N+1` grid, `N = deg(a) = deg(b)`.
pub fn interpolated_product(a: &SpectralField, b: &SpectralField) -> SpectralField {
    debug_assert_eq!(a.degree(), b.degree());
    let n = a.degree();
    let len = 2 * n + 1;
    let va = evaluate_on_grid(a, len);
    let vb = evaluate_on_grid(b, len);
    let prod: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    analyze_samples(&prod, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::grid;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_dft(values: &[f64], n: usize) -> Vec<Complex64> {
        let len = values.len() as f64;
        (-(n as i64)..=n as i64)
            .map(|k| {
                values
                    .iter()
                    .zip(grid(values.len()))
                    .map(|(v, x)| Complex64::from_polar(*v, -(k as f64) * x))
                    .sum::<Complex64>()
                    / len
            })
            .collect()
    }

    fn hermitian(n: usize, raw: &[(f64, f64)]) -> SpectralField {
        let mut f = SpectralField::from_fn(n, |k| {
            let (re, im) = raw[k.unsigned_abs() as usize % raw.len()];
            if k == 0 {
                c(re, 0.0)
            } else if k > 0 {
                c(re, im)
            } else {
                c(re, -im)
            }
        });
        f.symmetrize();
        f
    }

    #[test]
    fn constant_and_cosine() {
        let n = 5;
        let f = analyze(&NodalField::from_fn(n, |_| 2.5));
        for (k, v) in f.modes() {
            assert!((v - c(if k == 0 { 2.5 } else { 0.0 }, 0.0)).norm() < 1e-15);
        }
        let f = analyze(&NodalField::from_fn(n, f64::cos));
        for (k, v) in f.modes() {
            let want = if k.abs() == 1 { 0.5 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-15, "k={k}");
        }
    }

    #[test]
    fn matches_direct_sum() {
        let n = 8;
        let nodal = NodalField::from_fn(n, |x| x.sin().exp());
        let fast = analyze(&nodal);
        let slow = brute_dft(nodal.values(), n);
        for (a, b) in fast.coeffs().iter().zip(&slow) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn synthesize_simple_modes() {
        let one = SpectralField::real_mode(3, 0, c(1.0, 0.0));
        assert!(synthesize(&one).unwrap().values().iter().all(|v| (v - 1.0).abs() < 1e-15));
        let sine = SpectralField::real_mode(3, 1, c(0.0, -0.5));
        let nodal = synthesize(&sine).unwrap();
        for (v, x) in nodal.values().iter().zip(nodal.points()) {
            assert!((v - x.sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut f = SpectralField::zeros(2);
        f.set(1, c(1.0, 0.0));
        assert!(matches!(synthesize(&f), Err(SpecError::NotHermitian { .. })));
    }

    #[test]
    fn projection() {
        let f = SpectralField::from_fn(6, |k| c(1.0 / (1 + k.abs()) as f64, 0.0));
        assert_eq!(project(&f, 6).unwrap(), f);
        let five = SpectralField::real_mode(6, 5, c(1.0, 1.0));
        assert_eq!(project(&five, 4).unwrap(), SpectralField::zeros(4));
        assert!(project(&f, 7).is_err());
        let p = project(&f, 3).unwrap();
        assert_eq!(project(&p, 3).unwrap(), p);
    }

    #[test]
    fn projection_tail_matches_sum() {
        let big = 4000;
        let w = SpectralField::from_fn(big, |k| if k == 0 { c(0.0, 0.0) } else { c((k.abs() as f64).powi(-3), 0.0) });
        let m = 10;
        let tail = w.sub(&project(&w, m).unwrap().resized(big)).l2_norm();
        let direct = (2.0 * PI * 2.0 * ((m + 1)..=big).map(|k| (k as f64).powi(-6)).sum::<f64>()).sqrt();
        assert!((tail - direct).abs() < 1e-14);
    }

    use std::f64::consts::PI;

    #[test]
    fn aliasing_examples() {
        let n = 6;
        let band = SpectralField::from_fn(n, |k| c(k as f64, 0.5));
        assert_eq!(aliasing_error(&band.resized(3 * n), n).unwrap(), SpectralField::zeros(n));
        let single = SpectralField::real_mode(3 * n, n as i64 + 1, c(0.3, -0.7));
        let a = aliasing_error(&single, n).unwrap();
        assert_eq!(a.coeff(-(n as i64)), c(0.3, -0.7));
        assert_eq!(a.coeff(n as i64), c(0.3, 0.7));
        assert!(aliasing_error(&single.resized(4), n).is_err());
    }

    #[test]
    fn poisson_summation() {
        let big = 64;
        let n = 8;
        let w = SpectralField::from_fn(big, |k| if k == 0 { c(1.0, 0.0) } else { c((k * k) as f64, 0.0).inv() });
        let samples = evaluate_on_grid(&w, 2 * n + 1);
        let lhs = analyze_samples(&samples, n);
        let mut rhs = project(&w, n).unwrap();
        rhs.axpy(1.0, &aliasing_error(&w, n).unwrap());
        for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_against_finite_differences() {
        let n = 24;
        let f = analyze(&NodalField::from_fn(n, |x| x.sin().exp()));
        assert_eq!(differentiate(&SpectralField::real_mode(n, 0, c(3.0, 0.0))), SpectralField::zeros(n));
        let d = evaluate_on_grid(&differentiate(&f), 10_000);
        let h = 2.0 * PI / 10_000.0;
        for (i, x) in grid(10_000).enumerate() {
            let fd = (((x + h).sin()).exp() - ((x - h).sin()).exp()) / (2.0 * h);
            assert!((d[i] - fd).abs() < 1e-6);
        }
        let cos = differentiate(&SpectralField::real_mode(4, 1, c(0.0, -0.5)));
        assert!((cos.coeff(1) - c(0.5, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn profile_application() {
        let n = 12;
        let f = SpectralField::from_fn(n, |k| c(1.0, k as f64));
        assert_eq!(apply_profile(&f, &SmoothingProfile::identity(n)).unwrap(), f);
        let prof = SmoothingProfile::two_thirds(n).unwrap();
        let low = SpectralField::from_fn(n, |k| if k.abs() <= 4 { c(1.0, k as f64) } else { c(0.0, 0.0) });
        assert_eq!(apply_profile(&low, &prof).unwrap(), low);
        let top = SpectralField::real_mode(n, n as i64, c(1.0, 2.0));
        assert_eq!(apply_profile(&top, &prof).unwrap(), SpectralField::zeros(n));
        assert!(apply_profile(&f, &SmoothingProfile::identity(n + 1)).is_err());
    }

    #[test]
    fn products_agree_with_convolution() {
        let a = hermitian(5, &[(0.3, 0.0), (0.7, -0.2), (-0.1, 0.4)]);
        let b = hermitian(5, &[(1.0, 0.0), (0.2, 0.5), (0.3, 0.1), (-0.6, 0.2)]);
        let full = product(&a, &b);
        for m in -10..=10i64 {
            let conv: Complex64 = (-5..=5).map(|j| a.coeff(j) * b.coeff(m - j)).sum();
            assert!((full.coeff(m) - conv).norm() < 1e-14);
        }
        assert_eq!(truncated_product(&a, &b, 5).degree(), 5);
        for (x, y) in truncated_product(&a, &b, 5).coeffs().iter().zip(full.resized(5).coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
        let i = interpolated_product(&a, &b);
        let mut expect = full.resized(5);
        expect.axpy(1.0, &aliasing_error(&full, 5).unwrap());
        for (x, y) in i.coeffs().iter().zip(expect.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    fn coeff_strategy() -> impl Strategy<Value = (usize, Vec<(f64, f64)>)> {
        prop::sample::select(vec![8usize, 32, 128, 512])
            .prop_flat_map(|n| (Just(n), prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n + 1)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn round_trip_and_parseval((n, raw) in coeff_strategy()) {
            let f = hermitian(n, &raw);
            let nodal = synthesize(&f).unwrap();
            let back = analyze(&nodal);
            let scale = f.max_abs_coeff();
            for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
            let again = synthesize(&back).unwrap();
            let vmax = nodal.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, b) in again.values().iter().zip(nodal.values()) {
                prop_assert!((a - b).abs() <= 1e-12 * vmax);
            }
            let nodal_energy: f64 = nodal.values().iter().map(|v| v * v).sum::<f64>() / (2 * n + 1) as f64;
            let modal_energy: f64 = f.coeffs().iter().map(|c| c.norm_sqr()).sum();
            prop_assert!((nodal_energy - modal_energy).abs() <= 1e-12 * modal_energy);
        }

        #[test]
        fn poisson_identity((n, raw) in coeff_strategy(), extra in 3usize..5) {
            let n = n.min(128);
            let big = extra * n;
            let w = hermitian(big, &raw);
            let lhs = analyze_samples(&evaluate_on_grid(&w, 2 * n + 1), n);
            let mut rhs = project(&w, n).unwrap();
            rhs.axpy(1.0, &aliasing_error(&w, n).unwrap());
            let scale = w.coeffs().iter().map(|c| c.norm()).sum::<f64>();
            for (a, b) in lhs.coeffs().iter().zip(rhs.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-12 * scale);
            }
        }

        #[test]
        fn projection_idempotent((n, raw) in coeff_strategy(), m in 1usize..8) {
            let f = hermitian(n, &raw);
            let p = project(&f, m).unwrap();
            prop_assert_eq!(project(&p, m).unwrap(), p);
        }

        #[test]
        fn two_thirds_idempotent_on_low_band((n, raw) in coeff_strategy()) {
            let third = n / 3;
            let f = SpectralField::from_fn(n, |k| if k.unsigned_abs() as usize <= third { hermitian(n, &raw).coeff(k) } else { c(0.0, 0.0) });
            let prof = SmoothingProfile::two_thirds(n).unwrap();
            let once = apply_profile(&f, &prof).unwrap();
            prop_assert_eq!(&once, &f);
            prop_assert_eq!(apply_profile(&once, &prof).unwrap(), once);
        }
    }
}
