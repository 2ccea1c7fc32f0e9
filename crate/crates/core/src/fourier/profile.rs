use std::fmt;

use crate::error::{Result, SpecError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    Identity,
    TwoThirds,
    /// Spectral viscosity multiplier of order `2r`.
    SpectralViscosity { order: u32 },
    /// Any other multiplier sequence (e.g. a last-mode cut).
    General,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileKind::Identity => f.write_str("identity"),
            ProfileKind::TwoThirds => f.write_str("two_thirds"),
            ProfileKind::SpectralViscosity { order } => write!(f, "sv(r={order})"),
            ProfileKind::General => f.write_str("general"),
        }
    }
}

/// Symmetric multiplier sequence `σ_k`, `k = -N..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothingProfile {
    degree: usize,
    factors: Vec<f64>,
    kind: ProfileKind,
}

/// `φ(t) = e^{-1/t}` for `t > 0`, zero otherwise.
fn bump_half(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// The `C^∞` 2/3 mollifier: `1` on `[0, 1/3]`, `0` on `[2/3, ∞)`, and
/// `φ(1-s) / (φ(s) + φ(1-s))` with `s = 3ξ - 1` in between.
pub fn mollifier(xi: f64) -> f64 {
    let xi = xi.abs();
    if xi <= 1.0 / 3.0 {
        return 1.0;
    }
    if xi >= 2.0 / 3.0 {
        return 0.0;
    }
    let s = 3.0 * xi - 1.0;
    let a = bump_half(1.0 - s);
    let b = bump_half(s);
    a / (a + b)
}

impl SmoothingProfile {
    /// `σ_k ≡ 1`.
    pub fn identity(degree: usize) -> Self {
        Self {
            degree,
            factors: vec![1.0; 2 * degree + 1],
            kind: ProfileKind::Identity,
        }
    }

    /// `σ_k = σ(|k|/N)` with the smooth 2/3 mollifier.
    pub fn two_thirds(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(SpecError::InvalidArgument(format!(
                "2/3 mollifier needs N >= 3, got {degree}"
            )));
        }
        Ok(Self::from_rule(degree, ProfileKind::TwoThirds, |k| {
            mollifier(k.unsigned_abs() as f64 / degree as f64)
        }))
    }

    /// Sharp 2/3 truncation: `σ_k = 1` for `|k| <= 2N/3`, zero above.
    pub fn sharp_two_thirds(degree: usize) -> Self {
        Self::from_rule(degree, ProfileKind::TwoThirds, |k| {
            if 3 * k.unsigned_abs() as usize <= 2 * degree {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Spectral viscosity factors `((|k|/N)^{2r} - 1/N)_+`.
    pub fn spectral_viscosity(degree: usize, order: u32) -> Result<Self> {
        if degree < 2 || order < 1 {
            return Err(SpecError::InvalidArgument(format!(
                "SV profile needs N >= 2 and r >= 1, got N = {degree}, r = {order}"
            )));
        }
        let n = degree as f64;
        let p = 2 * order as i32;
        // (|k|^{2r} - N^{2r-1}) / N^{2r}: exact in integers at the cutoff
        Ok(Self::from_rule(degree, ProfileKind::SpectralViscosity { order }, |k| {
            ((k.unsigned_abs() as f64).powi(p) - n.powi(p - 1)).max(0.0) / n.powi(p)
        }))
    }

    /// Zeroes the single highest mode `|k| = N`.
    pub fn last_mode_cut(degree: usize) -> Self {
        Self::from_rule(degree, ProfileKind::General, |k| {
            if k.unsigned_abs() as usize == degree {
                0.0
            } else {
                1.0
            }
        })
    }

    /// A general symmetric profile from `σ(|k|)`; factors must lie in `[0, 1]`.
    pub fn general(degree: usize, rule: impl Fn(usize) -> f64) -> Result<Self> {
        let prof = Self::from_rule(degree, ProfileKind::General, |k| rule(k.unsigned_abs() as usize));
        if let Some(bad) = prof.factors.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(SpecError::InvalidArgument(format!("smoothing factor {bad} outside [0, 1]")));
        }
        Ok(prof)
    }

    fn from_rule(degree: usize, kind: ProfileKind, rule: impl Fn(i64) -> f64) -> Self {
        let n = degree as i64;
        Self {
            degree,
            factors: (-n..=n).map(rule).collect(),
            kind,
        }
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// `σ_k`; zero outside `|k| <= N`.
    #[inline]
    pub fn factor(&self, k: i64) -> f64 {
        let n = self.degree as i64;
        if k.abs() > n {
            0.0
        } else {
            self.factors[(k + n) as usize]
        }
    }

    /// Largest `|k|` with a nonzero factor, if any.
    pub fn support(&self) -> Option<usize> {
        (0..=self.degree).rev().find(|&k| self.factor(k as i64) != 0.0)
    }

    pub fn require(&self, expected: &'static str, ok: bool) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(SpecError::WrongProfile {
                expected,
                found: self.kind.to_string(),
            })
        }
    }
}

/// `build_mollifier(N)`: the smooth 2/3 profile.
pub fn build_mollifier(degree: usize) -> Result<SmoothingProfile> {
    SmoothingProfile::two_thirds(degree)
}

/// `build_sv_profile(N, r)`: the spectral viscosity multiplier.
pub fn build_sv_profile(degree: usize, order: u32) -> Result<SmoothingProfile> {
    SmoothingProfile::spectral_viscosity(degree, order)
}
