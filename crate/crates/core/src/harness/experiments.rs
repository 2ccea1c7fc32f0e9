//! The registered experiments. Each runs a sweep over `variants × N`, one
//! worker per member, and assembles per-run and summary tables.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{Experiment, ExperimentConfig, Variant};
use super::record::{Cell, RunOutcome, RunRecord, Table};
use crate::burgers::{self, BurgersScheme, EntropyReference};
use crate::coefficient::PeriodicFn;
use crate::diagnostics::{fit_rate, norms, total_variation, TV_OVERSAMPLE};
use crate::error::{Result, SpecError};
use crate::euler2d::{self, evaluate_on_grid2, EulerScheme, ExactFlow, VelocityField2D};
use crate::fourier::{analyze_samples, apply_profile, evaluate_on_grid, grid, SmoothingProfile, SpectralField};
use crate::isentropic::{self, IsentropicState, PressureLaw};
use crate::timestepping::{default_dt, integrate, ObserveAt, OdeState, Outcome, StepControl};
use crate::transport::{self, TransportProblem};

/// Integrates through `times` (which start at 0), calling `observe` at each
/// of them and `step` after every step. Returns the last finite state and the
/// blow-up time, if any.
fn run_segments<S, F, O, H>(state: S, mut rhs: F, dt: f64, times: &[f64], mut observe: O, mut step: H) -> Result<(S, Option<f64>)>
where
    S: OdeState,
    F: FnMut(&S) -> Result<S>,
    O: FnMut(f64, &S) -> Result<()>,
    H: FnMut(&S),
{
    observe(times[0], &state)?;
    let mut s = state;
    for w in times.windows(2) {
        let control = StepControl::new(dt, w[1] - w[0])?;
        let r = integrate(s, &mut rhs, &control, &ObserveAt::EverySteps(1), |_, u| step(u))?;
        s = r.state;
        if let Outcome::BlowUp { t } = r.outcome {
            return Ok((s, Some(w[0] + t)));
        }
        observe(w[1], &s)?;
    }
    Ok((s, None))
}

fn label(v: Variant, n: usize) -> String {
    format!("{v}_N{n}")
}

fn step_size(cfg: &ExperimentConfig, n: usize, speed: f64) -> f64 {
    cfg.dt.unwrap_or_else(|| default_dt(n, speed, cfg.cfl))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Output of one sweep member.
struct Member {
    label: String,
    tables: Vec<Table>,
    summary: Vec<Vec<Cell>>,
    blowup: Option<f64>,
}

fn mode_table(name: String) -> Table {
    Table::new(name, &["t", "k", "re", "im"])
}

fn push_modes(t: &mut Table, time: f64, u: &SpectralField) {
    for k in 0..=u.degree() as i64 {
        let c = u.coeff(k);
        t.push(vec![time.into(), k.into(), c.re.into(), c.im.into()]);
    }
}

fn sine_amplitude(initial: &str, prefix: &str) -> Option<f64> {
    initial.strip_prefix(prefix)?.parse::<f64>().ok().filter(|a| a.is_finite())
}

/// Validates `initial` (and the law's domain) for the configured experiment.
pub(crate) fn check_initial(cfg: &ExperimentConfig) -> Result<()> {
    let ok = match cfg.experiment {
        Experiment::LinearWeakInstability | Experiment::LinearResolvedDecay => matches!(cfg.initial.as_str(), "bump" | "cubic"),
        Experiment::BurgersSmoothRate | Experiment::BurgersPostshockTv | Experiment::BurgersSv => sine_amplitude(&cfg.initial, "sin:").is_some(),
        Experiment::Euler2dConserve | Experiment::Euler2dTaylorGreen => {
            cfg.initial == "random" || ExactFlow::parse(&cfg.initial).is_some()
        }
        Experiment::IsentropicEntropy => match sine_amplitude(&cfg.initial, "wave:") {
            Some(a) => cfg.law.in_domain(1.0 - a.abs()) && cfg.law.in_domain(1.0 + a.abs()),
            None => false,
        },
    };
    if ok {
        Ok(())
    } else {
        let expected = match cfg.experiment {
            Experiment::LinearWeakInstability | Experiment::LinearResolvedDecay => "bump or cubic",
            Experiment::BurgersSmoothRate | Experiment::BurgersPostshockTv | Experiment::BurgersSv => "sin:<a>",
            Experiment::Euler2dConserve | Experiment::Euler2dTaylorGreen => "taylor_green, shear_layer_smooth or random",
            Experiment::IsentropicEntropy => "wave:<a> with 1 ± a inside the domain of the law",
        };
        Err(SpecError::Config(format!("initial = {}: expected {expected}", cfg.initial)))
    }
}

/// Runs the configured sweep. Members execute in parallel; tables come out in
/// sweep order, so the output does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    cfg.validate()?;
    let start = Instant::now();
    let members: Vec<(Variant, usize)> = cfg
        .variants
        .iter()
        .flat_map(|&v| cfg.n_list.iter().map(move |&n| (v, n)))
        .collect();
    let times = cfg.snapshot_times();

    let reference = if cfg.experiment == Experiment::BurgersSv {
        let u0 = PeriodicFn::sine(sine_amplitude(&cfg.initial, "sin:").unwrap_or(1.0));
        Some(burgers::godunov_reference(&u0, cfg.t_end, cfg.reference_cells)?)
    } else {
        None
    };

    let results: Vec<Result<Member>> = members
        .par_iter()
        .map(|&(v, n)| match cfg.experiment {
            Experiment::LinearWeakInstability | Experiment::LinearResolvedDecay => linear_member(cfg, v, n, &times),
            Experiment::BurgersSmoothRate | Experiment::BurgersPostshockTv | Experiment::BurgersSv => {
                burgers_member(cfg, v, n, &times, reference.as_ref())
            }
            Experiment::Euler2dConserve | Experiment::Euler2dTaylorGreen => euler_member(cfg, v, n, &times),
            Experiment::IsentropicEntropy => isentropic_member(cfg, n, &times),
        })
        .collect();

    let mut summary = Table::new("summary.csv", summary_columns(cfg.experiment));
    let mut tables = Vec::new();
    let mut outcome = RunOutcome::Completed;
    for r in results {
        let m = r?;
        if m.blowup.is_none() {
            for row in m.summary {
                summary.push(row);
            }
        }
        tables.extend(m.tables);
        if let (Some(t), RunOutcome::Completed) = (m.blowup, &outcome) {
            log::warn!("{} blew up at t = {t}", m.label);
            outcome = RunOutcome::BlowUp { run: m.label, t };
        }
    }
    let mut extra = Vec::new();
    if cfg.experiment == Experiment::BurgersSmoothRate {
        extra.push(rate_table(cfg, &summary));
    }
    if let Some(r) = &reference {
        let mut t = Table::new("reference.csv", &["x", "value"]);
        for (x, v) in r.centers().zip(&r.values) {
            t.push(vec![x.into(), (*v).into()]);
        }
        extra.push(t);
    }
    let mut all = vec![summary];
    all.extend(extra);
    all.extend(tables);
    Ok(RunRecord {
        config: cfg.clone(),
        tables: all,
        outcome,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

fn summary_columns(e: Experiment) -> &'static [&'static str] {
    match e {
        Experiment::LinearWeakInstability | Experiment::LinearResolvedDecay => {
            &["variant", "N", "dt", "max_abs_b", "b_N", "norm_b", "max_abs_b0", "norm_b0"]
        }
        Experiment::BurgersSmoothRate => &["variant", "N", "dt", "error", "error_um"],
        Experiment::BurgersPostshockTv => &["variant", "N", "dt", "maxabs", "tv", "product", "product_over_sqrt_m", "tv_uN", "l6"],
        Experiment::BurgersSv => &["variant", "N", "dt", "l2_error", "tv", "reference_tv"],
        Experiment::Euler2dConserve | Experiment::Euler2dTaylorGreen => &[
            "variant",
            "N",
            "dt",
            "conserved0",
            "conserved_end",
            "relative_drift",
            "l2_deviation",
            "max_divergence",
        ],
        Experiment::IsentropicEntropy => &["law", "N", "dt", "entropy0", "entropy_end", "relative_drift", "dalembert_error"],
    }
}

fn rate_table(cfg: &ExperimentConfig, summary: &Table) -> Table {
    let mut t = Table::new("rate.csv", &["variant", "slope", "residual", "points"]);
    for v in &cfg.variants {
        let rows = summary.filter("variant", v.name());
        let pairs: Vec<(f64, f64)> = rows.column("N").into_iter().zip(rows.column("error")).collect();
        match fit_rate(&pairs) {
            Ok(fit) => t.push(vec![v.name().into(), fit.slope.into(), fit.residual.into(), fit.points.len().into()]),
            Err(e) => log::warn!("no rate fit for {v}: {e}"),
        }
    }
    t
}

fn linear_member(cfg: &ExperimentConfig, v: Variant, n: usize, times: &[f64]) -> Result<Member> {
    // with q = -sin x the imaginary parts obey db_k/dt = (k/2)(b_{k-1} - b_{k+1})
    let prob = TransportProblem::new(PeriodicFn::sine(-1.0), n);
    let modes = match cfg.initial.as_str() {
        "bump" => transport::bump_modes(n),
        _ => transport::cubic_decay_modes(n),
    };
    let mut u0 = modes.to_field();
    let top = n as i64;
    let zero = Complex64::new(0.0, 0.0);
    if v == Variant::LastModeZero {
        u0.set(top, zero);
        u0.set(-top, zero);
    }
    let profile = match v {
        Variant::TwoThirds => SmoothingProfile::two_thirds(n)?,
        Variant::LastModeZero => SmoothingProfile::last_mode_cut(n),
        _ => SmoothingProfile::identity(n),
    };
    let rhs = |u: &SpectralField| -> Result<SpectralField> {
        match v {
            Variant::Spectral => transport::rhs_spectral(u, &prob),
            Variant::TwoThirds => transport::rhs_two_thirds(u, &prob, &profile),
            Variant::LastModeZero => {
                let mut r = transport::rhs_pseudospectral(u, &prob)?;
                r.set(top, zero);
                r.set(-top, zero);
                Ok(r)
            }
            _ => transport::rhs_pseudospectral(u, &prob),
        }
    };
    let speed = max_abs(&evaluate_on_grid(&u0, 4 * n + 1)).max(1.0);
    let dt = step_size(cfg, n, speed);
    let name = label(v, n);
    let mut series = Table::new(format!("{name}_series.csv"), &["t", "l2", "l2_sigma", "linf", "tv"]);
    let mut history = mode_table(format!("{name}_modes.csv"));
    let (u, blowup) = run_segments(
        u0.clone(),
        rhs,
        dt,
        times,
        |t, u| {
            let r = norms(u, Some(&profile), &[])?;
            series.push(vec![t.into(), r.l2.into(), r.weighted_l2.unwrap_or(0.0).into(), r.linf.into(), r.tv.into()]);
            push_modes(&mut history, t, u);
            Ok(())
        },
        |_| {},
    )?;
    let b = transport::ImagModeState::from_field(&u);
    let b0 = transport::ImagModeState::from_field(&u0);
    let row = vec![
        v.name().into(),
        n.into(),
        dt.into(),
        b.max_abs().into(),
        b.last().into(),
        b.norm().into(),
        b0.max_abs().into(),
        b0.norm().into(),
    ];
    Ok(Member {
        label: name,
        tables: vec![series, history],
        summary: vec![row],
        blowup,
    })
}

fn burgers_member(cfg: &ExperimentConfig, v: Variant, n: usize, times: &[f64], reference: Option<&EntropyReference>) -> Result<Member> {
    let a = sine_amplitude(&cfg.initial, "sin:").unwrap_or(1.0);
    let u0 = PeriodicFn::sine(a);
    let scheme = match v {
        Variant::TwoThirds => BurgersScheme::two_thirds(n)?,
        Variant::Sv => BurgersScheme::spectral_viscosity(n, cfg.order)?,
        _ => BurgersScheme::Spectral,
    };
    let smoothing = scheme.smoothing(n);
    let f0 = u0.projection(n);
    let speed = max_abs(&evaluate_on_grid(&f0, 16 * n + 1));
    let dt = step_size(cfg, n, speed);
    let name = label(v, n);
    let mut series = Table::new(
        format!("{name}_series.csv"),
        &["t", "l2", "l2_sigma", "l6", "maxabs", "tv", "tv_product_over_sqrt_m", "energy_production"],
    );
    let mut history = mode_table(format!("{name}_modes.csv"));
    let (u, blowup) = run_segments(
        f0,
        |u: &SpectralField| scheme.rhs(u),
        dt,
        times,
        |t, u| {
            let um = apply_profile(u, &smoothing)?;
            let r = norms(u, Some(&smoothing), &[])?;
            let m = norms(&um, None, &[])?;
            let inst = burgers::instability_functional(&um, TV_OVERSAMPLE)?;
            let prod = burgers::energy_production(&um, &smoothing)?;
            series.push(vec![
                t.into(),
                r.l2.into(),
                r.weighted_l2.unwrap_or(0.0).into(),
                m.l6.into(),
                inst.maxabs.into(),
                inst.tv.into(),
                inst.product_over_sqrt_m.into(),
                prod.into(),
            ]);
            push_modes(&mut history, t, u);
            Ok(())
        },
        |_| {},
    )?;
    if blowup.is_some() {
        return Ok(Member {
            label: name,
            tables: vec![series, history],
            summary: vec![],
            blowup,
        });
    }
    let um = apply_profile(&u, &smoothing)?;
    let row: Vec<Cell> = match cfg.experiment {
        Experiment::BurgersSmoothRate => {
            let big = 8 * n;
            let pts: Vec<f64> = grid(2 * big + 1).collect();
            let exact = analyze_samples(&burgers::exact_smooth_solution(&u0, cfg.t_end, &pts)?, big);
            let err = exact.sub(&u.resized(big)).l2_norm();
            let err_m = exact.sub(&um.resized(big)).l2_norm();
            vec![v.name().into(), n.into(), dt.into(), err.into(), err_m.into()]
        }
        Experiment::BurgersPostshockTv => {
            let inst = burgers::instability_functional(&um, TV_OVERSAMPLE)?;
            let l6 = norms(&um, None, &[])?.l6;
            vec![
                v.name().into(),
                n.into(),
                dt.into(),
                inst.maxabs.into(),
                inst.tv.into(),
                inst.product.into(),
                inst.product_over_sqrt_m.into(),
                total_variation(&u, TV_OVERSAMPLE).into(),
                l6.into(),
            ]
        }
        _ => {
            let r = reference.expect("reference computed for burgers-sv");
            vec![
                v.name().into(),
                n.into(),
                dt.into(),
                burgers::l2_distance_to_reference(&u, r).into(),
                total_variation(&u, TV_OVERSAMPLE).into(),
                r.total_variation().into(),
            ]
        }
    };
    Ok(Member {
        label: name,
        tables: vec![series, history],
        summary: vec![row],
        blowup,
    })
}

fn euler_member(cfg: &ExperimentConfig, v: Variant, n: usize, times: &[f64]) -> Result<Member> {
    let scheme = match v {
        Variant::TwoThirds => EulerScheme::two_thirds(n)?,
        Variant::Sv => EulerScheme::spectral().with_viscosity(n, cfg.order)?,
        _ => EulerScheme::spectral(),
    };
    let u0 = match ExactFlow::parse(&cfg.initial) {
        Some(flow) => euler2d::exact_flows(flow, n, 0.0),
        None => euler2d::random_divergence_free(n, cfg.seed),
    };
    let len = 2 * n + 1;
    let (g1, g2) = (evaluate_on_grid2(&u0.u1, len), evaluate_on_grid2(&u0.u2, len));
    let speed = g1.iter().zip(&g2).map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
    let dt = step_size(cfg, n, speed);
    let name = label(v, n);
    let mut series = Table::new(format!("{name}_series.csv"), &["t", "energy", "conserved", "enstrophy", "max_divergence"]);
    let mut max_div = u0.max_divergence();
    let (u, blowup) = run_segments(
        u0.clone(),
        |u: &VelocityField2D| scheme.rhs(u),
        dt,
        times,
        |t, u| {
            let enstrophy = 0.5 * euler2d::vorticity(u).l2_norm_sq();
            series.push(vec![
                t.into(),
                u.energy().into(),
                scheme.conserved(u).into(),
                enstrophy.into(),
                u.max_divergence().into(),
            ]);
            Ok(())
        },
        |u| max_div = max_div.max(u.max_divergence()),
    )?;
    let mut vort = Table::new(format!("{name}_vorticity.csv"), &["x1", "x2", "omega"]);
    let h = 2.0 * PI / len as f64;
    for (i, w) in evaluate_on_grid2(&euler2d::vorticity(&u), len).into_iter().enumerate() {
        vort.push(vec![((i / len) as f64 * h).into(), ((i % len) as f64 * h).into(), w.into()]);
    }
    let (q0, q1) = (scheme.conserved(&u0), scheme.conserved(&u));
    let row = vec![
        v.name().into(),
        n.into(),
        dt.into(),
        q0.into(),
        q1.into(),
        ((q1 - q0) / q0).abs().into(),
        u.sub(&u0).l2_norm_sq().sqrt().into(),
        max_div.into(),
    ];
    Ok(Member {
        label: name,
        tables: vec![series, vort],
        summary: vec![row],
        blowup,
    })
}

fn isentropic_member(cfg: &ExperimentConfig, n: usize, times: &[f64]) -> Result<Member> {
    let a = sine_amplitude(&cfg.initial, "wave:").unwrap_or(0.1);
    let law = cfg.law;
    let u = PeriodicFn::sine(a).projection(n);
    let mut v = SpectralField::real_mode(n, 1, Complex64::new(0.5 * a, 0.0));
    v.set(0, Complex64::new(1.0, 0.0));
    let s0 = IsentropicState::new(u, v)?;
    let grid_v = evaluate_on_grid(&s0.v, 4 * n + 1);
    let wave = grid_v
        .iter()
        .filter(|x| law.in_domain(**x))
        .map(|x| law.dq(*x).sqrt())
        .fold(0.0, f64::max);
    let speed = max_abs(&evaluate_on_grid(&s0.u, 4 * n + 1)) + wave;
    let dt = step_size(cfg, n, speed);
    let name = format!("{law}_N{n}").replace(':', "");
    let mut series = Table::new(format!("{name}_series.csv"), &["t", "l2_u", "l2_v", "total_entropy"]);
    let (s, blowup) = run_segments(
        s0.clone(),
        |s: &IsentropicState| isentropic::rhs_spectral(s, law),
        dt,
        times,
        |t, s| {
            let e = isentropic::total_entropy(s, law)?;
            series.push(vec![t.into(), s.u.l2_norm().into(), s.v.l2_norm().into(), e.into()]);
            Ok(())
        },
        |_| {},
    )?;
    let (e0, e1) = (isentropic::total_entropy(&s0, law)?, isentropic::total_entropy(&s, law)?);
    let dalembert = if law == PressureLaw::Linear {
        let exact = isentropic::dalembert(&s0, cfg.t_end);
        (exact.u.sub(&s.u).l2_norm_sq() + exact.v.sub(&s.v).l2_norm_sq()).sqrt()
    } else {
        f64::NAN
    };
    let row = vec![
        law.to_string().into(),
        n.into(),
        dt.into(),
        e0.into(),
        e1.into(),
        ((e1 - e0) / e0).abs().into(),
        dalembert.into(),
    ];
    Ok(Member {
        label: name,
        tables: vec![series],
        summary: vec![row],
        blowup,
    })
}
