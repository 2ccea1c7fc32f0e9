//! Fourier algebra on the odd `2N+1` point grid.
//!
//! Coefficients are stored centered (`k = -N..=N`). The discrete transform
//! pair is `ũ_k = (h/2π) Σ_ν u(x_ν) e^{-ik x_ν}` and
//! `u(x_ν) = Σ_k ũ_k e^{ik x_ν}` with `h = 2π/(2N+1)`.

mod field;
mod profile;
mod transform;

pub use field::{grid, NodalField, SpectralField};
pub use profile::{build_mollifier, build_sv_profile, mollifier, ProfileKind, SmoothingProfile};
pub use transform::{
    aliasing_error, analyze, analyze_samples, apply_profile, differentiate, evaluate_on_grid,
    interpolated_product, product, project, synthesize, truncated_product, HERMITIAN_TOL,
};
pub(crate) use transform::{forward_plan, inverse_plan};
