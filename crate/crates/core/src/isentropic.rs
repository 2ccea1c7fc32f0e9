//! The 1D isentropic system in Lagrangian coordinates,
//! `u_t + q(v)_x = 0`, `v_t + u_x = 0`, `q' > 0`, and its spectral scheme.
//!
//! The scheme evolves `∂_t u_N = -∂_x S_N[q(v_N)]`, `∂_t v_N = -∂_x u_N`, with
//! `q(v_N)` sampled on a `4N+1` grid before truncation.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Result, SpecError};
use crate::fourier::{analyze_samples, differentiate, evaluate_on_grid, SpectralField};
use crate::timestepping::OdeState;

/// Pressure law `q(v)` with antiderivative `Q`, `Q' = q`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PressureLaw {
    /// `q = v`: the linear wave equation.
    Linear,
    /// `q = e^v`.
    Exponential,
    /// `q = -v^{-γ}`, defined for `v > 0`.
    Gamma(f64),
}

impl fmt::Display for PressureLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear => f.write_str("linear"),
            Self::Exponential => f.write_str("exp"),
            Self::Gamma(g) => write!(f, "gamma:{g}"),
        }
    }
}

impl PressureLaw {
    /// Parses `linear`, `exp` or `gamma:<γ>`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(Self::Linear),
            "exp" => Some(Self::Exponential),
            _ => {
                let g: f64 = s.strip_prefix("gamma:")?.parse().ok()?;
                (g > 1.0).then_some(Self::Gamma(g))
            }
        }
    }

    pub fn in_domain(&self, v: f64) -> bool {
        match self {
            Self::Gamma(_) => v > 0.0 && v.is_finite(),
            _ => v.is_finite(),
        }
    }

    pub fn q(&self, v: f64) -> f64 {
        match self {
            Self::Linear => v,
            Self::Exponential => v.exp(),
            Self::Gamma(g) => -v.powf(-g),
        }
    }

    pub fn dq(&self, v: f64) -> f64 {
        match self {
            Self::Linear => 1.0,
            Self::Exponential => v.exp(),
            Self::Gamma(g) => g * v.powf(-g - 1.0),
        }
    }

    /// `Q` with `Q' = q`.
    pub fn big_q(&self, v: f64) -> f64 {
        match self {
            Self::Linear => 0.5 * v * v,
            Self::Exponential => v.exp(),
            Self::Gamma(g) => v.powf(1.0 - g) / (g - 1.0),
        }
    }

    fn sample(&self, v: &SpectralField, len: usize) -> Result<Vec<f64>> {
        evaluate_on_grid(v, len)
            .into_iter()
            .map(|x| if self.in_domain(x) { Ok(self.q(x)) } else { Err(SpecError::OutOfDomain { v: x }) })
            .collect()
    }
}

/// Velocity `u` and specific volume `v`, both of degree `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsentropicState {
    pub u: SpectralField,
    pub v: SpectralField,
}

impl IsentropicState {
    pub fn new(u: SpectralField, v: SpectralField) -> Result<Self> {
        if u.degree() != v.degree() {
            return Err(SpecError::DegreeMismatch {
                expected: u.degree(),
                got: v.degree(),
            });
        }
        Ok(Self { u, v })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.u.degree()
    }
}

impl OdeState for IsentropicState {
    fn axpy(&mut self, a: f64, x: &Self) {
        self.u.axpy(a, &x.u);
        self.v.axpy(a, &x.v);
    }
    fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite()
    }
}

/// `S_N[q(v_N)]` from samples on the `4N+1` grid.
pub fn projected_pressure(v: &SpectralField, law: PressureLaw) -> Result<SpectralField> {
    let n = v.degree();
    let len = 4 * n + 1;
    Ok(analyze_samples(&law.sample(v, len)?, n))
}

/// `(-∂_x S_N q(v_N), -∂_x u_N)`.
pub fn rhs_spectral(state: &IsentropicState, law: PressureLaw) -> Result<IsentropicState> {
    let q = projected_pressure(&state.v, law)?;
    Ok(IsentropicState {
        u: differentiate(&q).scaled(-1.0),
        v: differentiate(&state.u).scaled(-1.0),
    })
}

/// `∫ (½u_N² + Q(v_N)) dx` on an `8N+1` point grid.
pub fn total_entropy(state: &IsentropicState, law: PressureLaw) -> Result<f64> {
    let len = 8 * state.degree() + 1;
    let u = evaluate_on_grid(&state.u, len);
    let v = evaluate_on_grid(&state.v, len);
    let mut sum = 0.0;
    for (a, b) in u.iter().zip(&v) {
        if !law.in_domain(*b) {
            return Err(SpecError::OutOfDomain { v: *b });
        }
        sum += 0.5 * a * a + law.big_q(*b);
    }
    Ok(sum * 2.0 * PI / len as f64)
}

/// Semi-discrete entropy rate `⟨u_N, ∂_t u_N⟩ + ⟨S_N q(v_N), ∂_t v_N⟩`; zero up
/// to round-off since the two pairings are negatives of each other.
pub fn entropy_rate(state: &IsentropicState, law: PressureLaw) -> Result<f64> {
    let q = projected_pressure(&state.v, law)?;
    let rhs = rhs_spectral(state, law)?;
    Ok(state.u.inner(&rhs.u) + q.inner(&rhs.v))
}

/// Exact solution of the linear law by d'Alembert: `u ± v` travel with speed `±1`.
pub fn dalembert(initial: &IsentropicState, t: f64) -> IsentropicState {
    let n = initial.degree();
    let shift = |k: i64, dir: f64| Complex64::from_polar(1.0, -dir * k as f64 * t);
    let plus = |k: i64| (initial.u.coeff(k) + initial.v.coeff(k)) * shift(k, 1.0);
    let minus = |k: i64| (initial.u.coeff(k) - initial.v.coeff(k)) * shift(k, -1.0);
    IsentropicState {
        u: SpectralField::from_fn(n, |k| 0.5 * (plus(k) + minus(k))),
        v: SpectralField::from_fn(n, |k| 0.5 * (plus(k) - minus(k))),
    }
}

/// Tendency of the wave equation written directly in modes:
/// `û' = -ik v̂`, `v̂' = -ik û`.
pub fn rhs_wave_modal(state: &IsentropicState) -> IsentropicState {
    IsentropicState {
        u: differentiate(&state.v).scaled(-1.0),
        v: differentiate(&state.u).scaled(-1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficient::PeriodicFn;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn laws() {
        for law in [PressureLaw::Linear, PressureLaw::Exponential, PressureLaw::Gamma(1.4)] {
            assert_eq!(PressureLaw::parse(&law.to_string()), Some(law));
            for v in [0.5, 1.0, 2.0] {
                let h = 1e-5;
                let dq = (law.q(v + h) - law.q(v - h)) / (2.0 * h);
                assert!((dq - law.dq(v)).abs() < 1e-8);
                assert!(law.dq(v) > 0.0);
                let dbig = (law.big_q(v + h) - law.big_q(v - h)) / (2.0 * h);
                assert!((dbig - law.q(v)).abs() < 1e-8);
            }
        }
        assert!(!PressureLaw::Gamma(2.0).in_domain(-0.1));
        assert_eq!(PressureLaw::parse("gamma:1"), None);
        assert_eq!(PressureLaw::parse("cubic"), None);
    }

    #[test]
    fn constant_state_is_steady() {
        let n = 8;
        let s = IsentropicState::new(SpectralField::zeros(n), SpectralField::real_mode(n, 0, c(0.7, 0.0))).unwrap();
        for law in [PressureLaw::Linear, PressureLaw::Exponential, PressureLaw::Gamma(1.4)] {
            let r = rhs_spectral(&s, law).unwrap();
            assert!(r.u.max_abs_coeff() < 1e-15 && r.v.max_abs_coeff() == 0.0);
        }
    }

    #[test]
    fn entropy_values() {
        let n = 6;
        let s = IsentropicState::new(SpectralField::zeros(n), SpectralField::real_mode(n, 0, c(0.3, 0.0))).unwrap();
        let e = total_entropy(&s, PressureLaw::Exponential).unwrap();
        assert!((e - 2.0 * PI * (0.3f64).exp()).abs() < 1e-13);
        // ∫ ½ sin² x dx = π/2
        let s = IsentropicState::new(PeriodicFn::sine(1.0).projection(n), SpectralField::zeros(n)).unwrap();
        assert!((total_entropy(&s, PressureLaw::Linear).unwrap() - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn out_of_domain_rejected() {
        let n = 4;
        let s = IsentropicState::new(SpectralField::zeros(n), PeriodicFn::sine(1.0).projection(n)).unwrap();
        assert!(matches!(rhs_spectral(&s, PressureLaw::Gamma(1.4)), Err(SpecError::OutOfDomain { .. })));
        assert!(total_entropy(&s, PressureLaw::Gamma(1.4)).is_err());
    }

    #[test]
    fn entropy_rate_vanishes() {
        let n = 16;
        let u = SpectralField::from_fn(n, |k| c(0.1 / (1 + k * k) as f64, 0.0));
        let mut v = SpectralField::from_fn(n, |k| c(0.0, 0.05 * k as f64 / (1 + k.pow(4)) as f64));
        v.set(0, c(1.0, 0.0));
        let s = IsentropicState::new(u, v).unwrap();
        for law in [PressureLaw::Linear, PressureLaw::Exponential, PressureLaw::Gamma(1.4)] {
            assert!(entropy_rate(&s, law).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn linear_law_is_the_wave_equation() {
        let n = 10;
        let u = PeriodicFn::sine(0.3).projection(n);
        let v = SpectralField::real_mode(n, 2, c(0.1, 0.05));
        let s = IsentropicState::new(u, v).unwrap();
        let a = rhs_spectral(&s, PressureLaw::Linear).unwrap();
        let b = rhs_wave_modal(&s);
        for (x, y) in a.u.coeffs().iter().zip(b.u.coeffs()).chain(a.v.coeffs().iter().zip(b.v.coeffs())) {
            assert!((x - y).norm() < 1e-15);
        }
        // d'Alembert at t = 2π is the identity
        let back = dalembert(&s, 2.0 * PI);
        for (x, y) in back.u.coeffs().iter().zip(s.u.coeffs()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
