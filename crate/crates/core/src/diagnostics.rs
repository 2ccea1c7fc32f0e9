//! Norms and convergence-rate fits shared by the solvers.

use std::f64::consts::PI;

use crate::error::{Result, SpecError};
use crate::fourier::{evaluate_on_grid, SmoothingProfile, SpectralField};

/// Oversampling factor for the grid-based norms (`L∞`, `L⁶`, TV).
pub const TV_OVERSAMPLE: usize = 16;

/// Sum of absolute differences around the periodic sample loop.
pub fn periodic_tv(values: &[f64]) -> f64 {
    let n = values.len();
    (0..n).map(|i| (values[(i + 1) % n] - values[i]).abs()).sum()
}

/// Total variation of a trigonometric polynomial on an `oversample·(2N+1)` grid.
pub fn total_variation(field: &SpectralField, oversample: usize) -> f64 {
    periodic_tv(&evaluate_on_grid(field, oversample * (2 * field.degree() + 1)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    /// `(∫ (S_R w) w dx)^{1/2}`, when a profile was given.
    pub weighted_l2: Option<f64>,
    pub linf: f64,
    pub l6: f64,
    pub tv: f64,
    /// `(s, ‖w‖_{H^s})` with weights `(1+k²)^s` on `|ŵ_k|²`.
    pub hs: Vec<(f64, f64)>,
}

/// All norms of `field`. `L²`, weighted `L²` and `H^s` come from the
/// coefficients; `L∞`, `L⁶` and TV from a 16× oversampled grid.
pub fn norms(field: &SpectralField, profile: Option<&SmoothingProfile>, sobolev: &[f64]) -> Result<NormReport> {
    let weighted_l2 = match profile {
        None => None,
        Some(p) => {
            if p.degree() != field.degree() {
                return Err(SpecError::DegreeMismatch {
                    expected: field.degree(),
                    got: p.degree(),
                });
            }
            Some(weighted_norm_sq(field, p).sqrt())
        }
    };
    let len = TV_OVERSAMPLE * (2 * field.degree() + 1);
    let vals = evaluate_on_grid(field, len);
    let linf = vals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let l6 = (vals.iter().map(|v| v.powi(6)).sum::<f64>() * 2.0 * PI / len as f64).powf(1.0 / 6.0);
    let hs = sobolev.iter().map(|&s| (s, sobolev_norm(field, s))).collect();
    Ok(NormReport {
        l2: field.l2_norm(),
        weighted_l2,
        linf,
        l6,
        tv: periodic_tv(&vals),
        hs,
    })
}

/// `2π Σ σ_k |ŵ_k|²`.
pub fn weighted_norm_sq(field: &SpectralField, profile: &SmoothingProfile) -> f64 {
    2.0 * PI * field.modes().map(|(k, c)| profile.factor(k) * c.norm_sqr()).sum::<f64>()
}

/// `(2π Σ (1+k²)^s |ŵ_k|²)^{1/2}`.
pub fn sobolev_norm(field: &SpectralField, s: f64) -> f64 {
    (2.0 * PI * field.modes().map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr()).sum::<f64>()).sqrt()
}

/// Least-squares fit of `error ≈ C N^{-p}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateFit {
    /// The `(N, error)` pairs used in the fit.
    pub points: Vec<(f64, f64)>,
    /// The exponent `p`.
    pub slope: f64,
    /// Root-mean-square residual of the fit in `ln error`.
    pub residual: f64,
}

/// Fits `ln e = ln C - p ln N`. Non-positive errors are dropped with a
/// warning; at least three points must remain.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    let mut points = Vec::with_capacity(pairs.len());
    for &(n, e) in pairs {
        if e > 0.0 && e.is_finite() && n > 0.0 {
            points.push((n, e));
        } else {
            log::warn!("dropping point N = {n}, error = {e} from rate fit");
        }
    }
    if points.len() < 3 {
        return Err(SpecError::InvalidArgument(format!(
            "rate fit needs at least 3 positive errors, got {}",
            points.len()
        )));
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - xbar).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    let b = sxy / sxx;
    let a = ybar - b * xbar;
    let residual = (xs.iter().zip(&ys).map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>() / m).sqrt();
    Ok(RateFit {
        points,
        slope: -b,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn sine(n: usize) -> SpectralField {
        SpectralField::real_mode(n, 1, Complex64::new(0.0, -0.5))
    }

    #[test]
    fn zero_field() {
        let r = norms(&SpectralField::zeros(5), Some(&SmoothingProfile::identity(5)), &[1.0]).unwrap();
        assert_eq!((r.l2, r.weighted_l2, r.linf, r.l6, r.tv), (0.0, Some(0.0), 0.0, 0.0, 0.0));
        assert_eq!(r.hs, vec![(1.0, 0.0)]);
    }

    #[test]
    fn sine_norms() {
        let r = norms(&sine(8), None, &[0.0, 1.0]).unwrap();
        assert!((r.l2 - PI.sqrt()).abs() < 1e-15);
        assert!((r.linf - 1.0).abs() < 1e-3);
        assert!((r.tv - 4.0).abs() < 1e-2);
        // ∫ sin⁶ = 5π/8
        assert!((r.l6 - (5.0 * PI / 8.0).powf(1.0 / 6.0)).abs() < 1e-14);
        assert!((r.hs[0].1 - r.l2).abs() < 1e-15);
        assert!((r.hs[1].1 - (2.0 * PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weighted_norm_of_top_mode() {
        let n = 9;
        let top = SpectralField::real_mode(n, n as i64, Complex64::new(1.0, 0.0));
        let r = norms(&top, Some(&SmoothingProfile::two_thirds(n).unwrap()), &[]).unwrap();
        assert_eq!(r.weighted_l2, Some(0.0));
        assert!(norms(&top, Some(&SmoothingProfile::identity(3)), &[]).is_err());
    }

    #[test]
    fn parseval_matches_nodal_quadrature() {
        let f = SpectralField::from_fn(12, |k| Complex64::new(1.0 / (1 + k * k) as f64, 0.0));
        let vals = evaluate_on_grid(&f, 25);
        let nodal = (vals.iter().map(|v| v * v).sum::<f64>() * 2.0 * PI / 25.0).sqrt();
        assert!((nodal - f.l2_norm()).abs() < 1e-12 * nodal);
    }

    #[test]
    fn tv_oversampling_converged() {
        let f = SpectralField::from_fn(20, |k| Complex64::new(0.0, if k == 0 { 0.0 } else { -0.5 / k as f64 }));
        let (a, b) = (total_variation(&f, 8), total_variation(&f, 16));
        assert!((a - b).abs() <= 0.01 * b);
    }

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [8.0f64, 16.0, 32.0, 64.0].iter().map(|&n| (n, n.powi(-4))).collect();
        let fit = fit_rate(&pairs).unwrap();
        assert!((fit.slope - 4.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn exponential_decay_steepens() {
        let fit = |ns: &[f64]| fit_rate(&ns.iter().map(|&n| (n, 3.0 * (-n).exp())).collect::<Vec<_>>()).unwrap().slope;
        let low = fit(&[2.0, 4.0, 8.0]);
        let high = fit(&[8.0, 16.0, 32.0]);
        assert!(high > 2.0 * low);
    }

    #[test]
    fn bad_points_dropped() {
        let fit = fit_rate(&[(4.0, 0.0), (8.0, 1.0 / 64.0), (16.0, 1.0 / 256.0), (32.0, 1.0 / 1024.0)]).unwrap();
        assert_eq!(fit.points.len(), 3);
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit_rate(&[(4.0, 1.0), (8.0, -1.0), (16.0, 0.5)]).is_err());
    }
}
