//! Fixed-step classical RK4 for the semi-discrete systems.

use std::f64::consts::PI;

use crate::error::{Result, SpecError};
use crate::fourier::SpectralField;

/// A state vector the integrator can combine linearly.
pub trait OdeState: Clone {
    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self);
    fn is_finite(&self) -> bool;
}

impl OdeState for SpectralField {
    fn axpy(&mut self, a: f64, x: &Self) {
        SpectralField::axpy(self, a, x)
    }
    fn is_finite(&self) -> bool {
        SpectralField::is_finite(self)
    }
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl {
    pub dt: f64,
    pub t_end: f64,
    pub cfl: f64,
}

pub const DEFAULT_CFL: f64 = 0.5;

impl StepControl {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let c = Self {
            dt,
            t_end,
            cfl: DEFAULT_CFL,
        };
        c.validate()?;
        Ok(c)
    }

    /// `dt = cfl · 2π / ((2N+1) V)` with `V = max(1, max_speed)`.
    pub fn auto(degree: usize, max_speed: f64, t_end: f64, cfl: f64) -> Result<Self> {
        let c = Self {
            dt: default_dt(degree, max_speed, cfl),
            t_end,
            cfl,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SpecError::InvalidArgument(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(SpecError::InvalidArgument(format!("t_end must be >= 0, got {}", self.t_end)));
        }
        Ok(())
    }

    /// Step sizes covering `[0, t_end]`; the last one lands exactly on `t_end`.
    pub fn step_count(&self) -> usize {
        if self.t_end == 0.0 {
            return 0;
        }
        ((self.t_end / self.dt) - 1e-9).ceil().max(1.0) as usize
    }
}

pub fn default_dt(degree: usize, max_speed: f64, cfl: f64) -> f64 {
    let v = max_speed.abs().max(1.0);
    cfl * 2.0 * PI / ((2 * degree + 1) as f64 * v)
}

/// One classical four-stage Runge–Kutta step.
pub fn rk4_step<S, F>(state: &S, t: f64, dt: f64, rhs: &mut F) -> Result<S>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
{
    let check = |k: &S, t: f64| if k.is_finite() { Ok(()) } else { Err(SpecError::NonFinite { t }) };

    let k1 = rhs(state)?;
    check(&k1, t)?;
    let mut y = state.clone();
    y.axpy(0.5 * dt, &k1);
    let k2 = rhs(&y)?;
    check(&k2, t)?;
    let mut y = state.clone();
    y.axpy(0.5 * dt, &k2);
    let k3 = rhs(&y)?;
    check(&k3, t)?;
    let mut y = state.clone();
    y.axpy(dt, &k3);
    let k4 = rhs(&y)?;
    check(&k4, t)?;

    let mut out = state.clone();
    out.axpy(dt / 6.0, &k1);
    out.axpy(dt / 3.0, &k2);
    out.axpy(dt / 3.0, &k3);
    out.axpy(dt / 6.0, &k4);
    if !out.is_finite() {
        return Err(SpecError::NonFinite { t: t + dt });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Outcome {
    Completed,
    /// Non-finite values appeared during the step starting at `t`.
    BlowUp { t: f64 },
}

#[derive(Clone, Debug)]
pub struct Integration<S> {
    /// Last finite state reached.
    pub state: S,
    pub t: f64,
    pub steps: usize,
    pub outcome: Outcome,
}

/// When observers fire during [`integrate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub enum ObserveAt {
    /// Only at `t = 0` and at the final time.
    #[default]
    Ends,
    /// Every `n` steps, plus both ends.
    EverySteps(usize),
}

/// Advances `state` from `t = 0` to `control.t_end`, calling `observe(t, state)`
/// according to `when`. Blow-up ends the run and is reported in the outcome.
pub fn integrate<S, F, O>(
    state: S,
    rhs: &mut F,
    control: &StepControl,
    when: &ObserveAt,
    mut observe: O,
) -> Result<Integration<S>>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
    O: FnMut(f64, &S),
{
    control.validate()?;
    let steps = control.step_count();
    let mut state = state;
    let mut t = 0.0;
    observe(t, &state);
    for i in 0..steps {
        let dt = if i + 1 == steps {
            control.t_end - t
        } else {
            control.dt
        };
        match rk4_step(&state, t, dt, rhs) {
            Ok(next) => state = next,
            Err(SpecError::NonFinite { t: tb }) => {
                return Ok(Integration {
                    state,
                    t,
                    steps: i,
                    outcome: Outcome::BlowUp { t: tb },
                })
            }
            Err(e) => return Err(e),
        }
        t = if i + 1 == steps {
            control.t_end
        } else {
            (i + 1) as f64 * control.dt
        };
        let last = i + 1 == steps;
        let fire = match when {
            ObserveAt::Ends => last,
            ObserveAt::EverySteps(n) => last || (i + 1) % (*n).max(1) == 0,
        };
        if fire {
            observe(t, &state);
        }
    }
    Ok(Integration {
        state,
        t,
        steps,
        outcome: Outcome::Completed,
    })
}
