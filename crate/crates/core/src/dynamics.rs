//! Geodesics of the Petrov family through the Arnold–Euler equation, and the
//! closed timelike curve witness.
//!
//! A geodesic through the identity with initial velocity `u(0)` is governed by
//! an ODE on the Lie algebra. For the rotation-plus-diagonal matrix it reads
//!
//! ```text
//! u̇₁ = u_n(αu₁ - βu₂)      u̇₂ = u_n(βu₁ + αu₂)      u̇_i = λ_i u_n u_i
//! u̇_n = α(u₁² - u₂²) - 2βu₁u₂ - Σ λ_i u_i²
//! ```
//!
//! and conserves `Q = -u₁² + u₂² + ... + u_n²`.

use std::f64::consts::{PI, TAU};
use std::io::{Read, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::petrov::PetrovSolution;

pub fn conserved_quantity(u: &[f64]) -> f64 {
    -u[0] * u[0] + u[1..].iter().map(|x| x * x).sum::<f64>()
}

fn rhs_into(sol: &PetrovSolution, u: &[f64], du: &mut [f64]) {
    let (a, b) = (sol.alpha(), sol.beta());
    let n = u.len();
    let un = u[n - 1];
    du[0] = un * (a * u[0] - b * u[1]);
    du[1] = un * (b * u[0] + a * u[1]);
    let mut last = a * (u[0] * u[0] - u[1] * u[1]) - 2.0 * b * u[0] * u[1];
    for (i, l) in sol.lambdas().iter().enumerate() {
        du[i + 2] = l * un * u[i + 2];
        last -= l * u[i + 2] * u[i + 2];
    }
    du[n - 1] = last;
}

/// Right-hand side with `(u₁, u₂) = (0, 0)` removed: `v = (u₃, ..., u_n)`.
fn reduced_rhs_into(sol: &PetrovSolution, v: &[f64], dv: &mut [f64]) {
    let m = v.len();
    let vn = v[m - 1];
    let mut last = 0.0;
    for (i, l) in sol.lambdas().iter().enumerate() {
        dv[i] = l * vn * v[i];
        last -= l * v[i] * v[i];
    }
    dv[m - 1] = last;
}

pub fn arnold_euler_rhs(sol: &PetrovSolution, u: &[f64]) -> Result<Vec<f64>> {
    check_len(sol, u)?;
    let mut du = vec![0.0; u.len()];
    rhs_into(sol, u, &mut du);
    Ok(du)
}

fn check_len(sol: &PetrovSolution, u: &[f64]) -> Result<()> {
    if u.len() != sol.dim() {
        return Err(Error::Input(format!(
            "velocity must have {} components, got {}",
            sol.dim(),
            u.len()
        )));
    }
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Input("velocity components must be finite".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicState {
    pub t: f64,
    pub u: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub min_step: f64,
    pub max_step: f64,
}

/// Reported when the trajectory starts with `(u₁, u₂) = (0, 0)` and lives on
/// the sphere `u₃² + ... + u_n² = const`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SphereReport {
    pub radius_sq: f64,
    pub max_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GeodesicTrajectory {
    pub samples: Vec<GeodesicState>,
    #[serde(skip)]
    derivs: Vec<Vec<f64>>,
    pub q0: f64,
    pub max_q_drift: f64,
    pub stats: StepStats,
    pub sphere: Option<SphereReport>,
}

impl GeodesicTrajectory {
    /// Cubic Hermite interpolation between accepted steps.
    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        let first = self
            .samples
            .first()
            .expect("trajectory has at least one sample");
        let last = self
            .samples
            .last()
            .expect("trajectory has at least one sample");
        let (lo, hi) = if first.t <= last.t {
            (first.t, last.t)
        } else {
            (last.t, first.t)
        };
        if !(lo..=hi).contains(&t) {
            return Err(Error::Input(format!("t = {t} outside [{lo}, {hi}]")));
        }
        if self.samples.len() == 1 {
            return Ok(first.u.clone());
        }
        let forward = last.t >= first.t;
        let k = self
            .samples
            .partition_point(|s| if forward { s.t <= t } else { s.t >= t })
            .clamp(1, self.samples.len() - 1);
        let (s0, s1) = (&self.samples[k - 1], &self.samples[k]);
        let (f0, f1) = (&self.derivs[k - 1], &self.derivs[k]);
        let h = s1.t - s0.t;
        let th = (t - s0.t) / h;
        let h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
        let h10 = th * (1.0 - th) * (1.0 - th);
        let h01 = th * th * (3.0 - 2.0 * th);
        let h11 = th * th * (th - 1.0);
        Ok((0..s0.u.len())
            .map(|i| h00 * s0.u[i] + h10 * h * f0[i] + h01 * s1.u[i] + h11 * h * f1[i])
            .collect())
    }
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

struct Solution {
    ts: Vec<f64>,
    ys: Vec<Vec<f64>>,
    fs: Vec<Vec<f64>>,
    stats: StepStats,
}

/// Adaptive Dormand–Prince integration with `atol = rtol = tol`. `max_step`
/// bounds the step length at the current state.
fn dopri5(
    f: impl Fn(&[f64], &mut [f64]),
    max_step: impl Fn(&[f64]) -> f64,
    y0: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<Solution> {
    let dim = y0.len();
    let dir = if t_end < 0.0 { -1.0 } else { 1.0 };
    let span = t_end.abs();
    let mut t = 0.0_f64;
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 7];
    f(&y, &mut k[0]);
    let mut out = Solution {
        ts: vec![0.0],
        ys: vec![y.clone()],
        fs: vec![k[0].clone()],
        stats: StepStats {
            min_step: f64::INFINITY,
            ..StepStats::default()
        },
    };
    if span == 0.0 {
        out.stats.min_step = 0.0;
        return Ok(out);
    }

    let norm = |v: &[f64]| (v.iter().map(|x| x * x).sum::<f64>() / dim as f64).sqrt();
    let (d0, d1) = (norm(&y), norm(&k[0]));
    let mut h = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h = h.min(span);

    let mut tmp = vec![0.0; dim];
    let mut y_new = vec![0.0; dim];
    loop {
        let remaining = span - t.abs();
        if remaining <= 0.0 {
            break;
        }
        h = h.min(max_step(&y)).min(remaining);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Integration(format!(
                "step size underflow (h = {h:e}) at t = {}; this contradicts completeness",
                dir * t.abs()
            )));
        }
        let hs = dir * h;
        for s in 1..7 {
            for i in 0..dim {
                tmp[i] = y[i] + hs * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            f(&tmp, &mut k[s]);
        }
        // Stage 7 is evaluated at the 5th-order solution (FSAL).
        let mut err = 0.0;
        for i in 0..dim {
            y_new[i] = y[i] + hs * (0..7).map(|j| B5[j] * k[j][i]).sum::<f64>();
            let e = hs * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>();
            let sc = tol + tol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        err = (err / dim as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Integration(format!(
                "non-finite state at t = {}",
                dir * t.abs()
            )));
        }
        if err <= 1.0 {
            t = if h == remaining { span } else { t.abs() + h };
            y.copy_from_slice(&y_new);
            let last = k[6].clone();
            k[0].copy_from_slice(&last);
            out.ts.push(dir * t);
            out.ys.push(y.clone());
            out.fs.push(last);
            out.stats.accepted += 1;
            out.stats.min_step = out.stats.min_step.min(h);
            out.stats.max_step = out.stats.max_step.max(h);
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            out.stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }
    Ok(out)
}

/// Integrates from `t = 0` to `t_end`. Samples are the accepted steps; the
/// step is capped so that `θ` changes by less than `π/4` per step.
pub fn integrate_geodesic(
    sol: &PetrovSolution,
    u0: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<GeodesicTrajectory> {
    check_len(sol, u0)?;
    if !(tol > 0.0) || !t_end.is_finite() {
        return Err(Error::Input("need tol > 0 and finite t_end".into()));
    }
    let n = sol.dim();
    let beta = sol.beta();
    let q0 = conserved_quantity(u0);
    let reduced = u0[0] == 0.0 && u0[1] == 0.0;

    let (samples, derivs, stats) = if reduced {
        let v0 = &u0[2..];
        let s = dopri5(
            |v, dv| reduced_rhs_into(sol, v, dv),
            |_| f64::INFINITY,
            v0,
            t_end,
            tol,
        )?;
        let embed = |v: &Vec<f64>| {
            let mut u = vec![0.0, 0.0];
            u.extend_from_slice(v);
            u
        };
        let samples =
            s.ts.iter()
                .zip(&s.ys)
                .map(|(t, v)| GeodesicState { t: *t, u: embed(v) })
                .collect();
        (samples, s.fs.iter().map(embed).collect(), s.stats)
    } else {
        let cap = move |u: &[f64]| {
            let rate = beta * u[n - 1].abs();
            if rate > 0.0 {
                PI / (4.0 * rate)
            } else {
                f64::INFINITY
            }
        };
        let s = dopri5(|u, du| rhs_into(sol, u, du), cap, u0, t_end, tol)?;
        let samples =
            s.ts.iter()
                .zip(s.ys)
                .map(|(t, u)| GeodesicState { t: *t, u })
                .collect();
        (samples, s.fs, s.stats)
    };

    let samples: Vec<GeodesicState> = samples;
    let max_q_drift = samples
        .iter()
        .map(|s| (conserved_quantity(&s.u) - q0).abs())
        .fold(0.0, f64::max);
    let sphere = reduced.then(|| {
        let r2 = |u: &[f64]| u[2..].iter().map(|x| x * x).sum::<f64>();
        let radius_sq = r2(u0);
        SphereReport {
            radius_sq,
            max_drift: samples
                .iter()
                .map(|s| (r2(&s.u) - radius_sq).abs())
                .fold(0.0, f64::max),
        }
    });
    Ok(GeodesicTrajectory {
        samples,
        derivs,
        q0,
        max_q_drift,
        stats,
        sphere,
    })
}

/// Independent trajectories integrated in parallel.
pub fn integrate_ensemble(
    sol: &PetrovSolution,
    initial: &[Vec<f64>],
    t_end: f64,
    tol: f64,
) -> Vec<Result<GeodesicTrajectory>> {
    initial
        .par_iter()
        .map(|u0| integrate_geodesic(sol, u0, t_end, tol))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarReport {
    /// `max |r - r₀ exp{(α/β)(θ - θ₀)}| / r` over the samples.
    pub max_relative_residual: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    /// Steps over which `u_n` kept its sign but `θ` moved against it.
    pub monotonicity_violations: usize,
}

/// Checks `r = r₀ exp{(α/β)(θ - θ₀)}` along the trajectory, with
/// `u₁ = r cos θ`, `u₂ = r sin θ` and `θ` unwrapped.
pub fn polar_diagnostics(traj: &GeodesicTrajectory, sol: &PetrovSolution) -> Result<PolarReport> {
    let beta = sol.beta();
    if !(beta > 0.0) {
        return Err(Error::Domain("polar diagnostics need beta > 0".into()));
    }
    let n = sol.dim();
    let polar = |u: &[f64]| (u[0].hypot(u[1]), u[1].atan2(u[0]));
    let (r0, mut prev_raw) = polar(&traj.samples[0].u);
    if r0 == 0.0 {
        return Err(Error::Domain(
            "(u1, u2) = (0, 0): the polar form does not apply (reduced system)".into(),
        ));
    }
    let theta0 = prev_raw;
    let mut theta = theta0;
    let mut report = PolarReport {
        max_relative_residual: 0.0,
        r_min: r0,
        r_max: r0,
        theta_min: theta0,
        theta_max: theta0,
        monotonicity_violations: 0,
    };
    for w in traj.samples.windows(2) {
        let (r, raw) = polar(&w[1].u);
        if r == 0.0 {
            return Err(Error::Domain(format!(
                "trajectory reached (u1, u2) = (0, 0) at t = {}",
                w[1].t
            )));
        }
        let mut d = raw - prev_raw;
        if d > PI {
            d -= TAU;
        } else if d < -PI {
            d += TAU;
        }
        prev_raw = raw;
        theta += d;
        let (a, b) = (w[0].u[n - 1], w[1].u[n - 1]);
        let dt = w[1].t - w[0].t;
        if a * b > 0.0 && d * a.signum() * dt.signum() < -1e-12 {
            report.monotonicity_violations += 1;
        }
        let predicted = r0 * ((sol.alpha() / beta) * (theta - theta0)).exp();
        report.max_relative_residual = report.max_relative_residual.max((r - predicted).abs() / r);
        report.r_min = report.r_min.min(r);
        report.r_max = report.r_max.max(r);
        report.theta_min = report.theta_min.min(theta);
        report.theta_max = report.theta_max.max(theta);
    }
    Ok(report)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "the closed timelike curve needs beta > 0, got {beta}"
        )))
    }
}

/// `c(t) = (1/β)(3 sin t, -sin 2t, 0, ..., 0, (π/2)(1 - cos t))` in `ℝⁿ`.
pub fn ctc_curve(t: f64, beta: f64, n: usize) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let mut x = vec![0.0; n];
    x[0] = 3.0 * t.sin() / beta;
    x[1] = -(2.0 * t).sin() / beta;
    x[n - 1] = 0.5 * PI * (1.0 - t.cos()) / beta;
    Ok(x)
}

pub fn ctc_velocity(t: f64, beta: f64, n: usize) -> Result<Vec<f64>> {
    check_beta(beta)?;
    let mut v = vec![0.0; n];
    v[0] = 3.0 * t.cos() / beta;
    v[1] = -2.0 * (2.0 * t).cos() / beta;
    v[n - 1] = 0.5 * PI * t.sin() / beta;
    Ok(v)
}

/// `f(t) = cos(π cos t)(9cos²t - 4cos²2t) + 12 sin(π cos t) cos 2t cos t`.
pub fn ctc_f(t: f64) -> f64 {
    let (c, c2) = (t.cos(), (2.0 * t).cos());
    (PI * c).cos() * (9.0 * c * c - 4.0 * c2 * c2) + 12.0 * (PI * c).sin() * c2 * c
}

/// `g(c'(t), c'(t))` from the closed form in `f`.
pub fn ctc_velocity_norm(t: f64, sol: &PetrovSolution) -> Result<f64> {
    let beta = sol.beta();
    check_beta(beta)?;
    let growth = (PI * sol.alpha().abs() / beta * (1.0 - t.cos())).exp();
    Ok((growth * ctc_f(t) + 0.25 * PI * PI * t.sin().powi(2)) / (beta * beta))
}

/// `c'(t)ᵀ g(c(t)) c'(t)` with the coordinate metric of the solution.
pub fn ctc_velocity_norm_direct(t: f64, sol: &PetrovSolution) -> Result<f64> {
    let n = sol.dim();
    let x = ctc_curve(t, sol.beta(), n)?;
    let v = ctc_velocity(t, sol.beta(), n)?;
    let g = sol.metric_at(&x)?;
    Ok((0..n)
        .map(|i| (0..n).map(|j| v[i] * g[(i, j)] * v[j]).sum::<f64>())
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FMax {
    pub t_star: f64,
    pub f_star: f64,
}

pub const F_MAX_GRID: usize = 16384;

/// Maximum of `f` over one period: dense grid, then golden-section search on
/// the bracketing cell down to `search_tol`.
pub fn f_max(search_tol: f64) -> Result<FMax> {
    if !(search_tol > 0.0) {
        return Err(Error::Input("search tolerance must be positive".into()));
    }
    let step = TAU / F_MAX_GRID as f64;
    let best = (0..F_MAX_GRID)
        .map(|k| k as f64 * step)
        .max_by(|a, b| ctc_f(*a).total_cmp(&ctc_f(*b)))
        .expect("grid is nonempty");
    let (mut lo, mut hi) = (best - step, best + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (ctc_f(x1), ctc_f(x2));
    while hi - lo > search_tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = ctc_f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = ctc_f(x1);
        }
    }
    let t = 0.5 * (lo + hi);
    let (t_star, f_star) = [(t, ctc_f(t)), (best, ctc_f(best))]
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    Ok(FMax {
        t_star: t_star.rem_euclid(TAU),
        f_star,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtcSample {
    pub t: f64,
    pub point: Vec<f64>,
    pub velocity: Vec<f64>,
    pub norm: f64,
    /// The same norm by direct contraction with the coordinate metric.
    pub norm_direct: f64,
}

pub const MIN_CTC_SAMPLES: usize = 1000;

/// `samples` uniform parameters on `[0, 2π]` (both ends included).
pub fn ctc_scan(sol: &PetrovSolution, samples: usize) -> Result<Vec<CtcSample>> {
    if samples < MIN_CTC_SAMPLES {
        return Err(Error::Input(format!(
            "need at least {MIN_CTC_SAMPLES} samples, got {samples}"
        )));
    }
    check_beta(sol.beta())?;
    let n = sol.dim();
    (0..samples)
        .into_par_iter()
        .map(|k| {
            let t = TAU * k as f64 / (samples - 1) as f64;
            Ok(CtcSample {
                t,
                point: ctc_curve(t, sol.beta(), n)?,
                velocity: ctc_velocity(t, sol.beta(), n)?,
                norm: ctc_velocity_norm(t, sol)?,
                norm_direct: ctc_velocity_norm_direct(t, sol)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CtcReport {
    pub samples: usize,
    pub all_timelike: bool,
    pub worst_norm: f64,
    pub worst_t: f64,
    /// Largest `|closed form - direct contraction|`.
    pub max_form_mismatch: f64,
    pub f_max: FMax,
    /// `(f* + π²/4)/β²`, an upper bound for every norm when negative.
    pub analytic_bound: f64,
    pub analytic_bound_negative: bool,
    pub bound_respected: bool,
}

pub fn verify_ctc(sol: &PetrovSolution, samples: usize) -> Result<CtcReport> {
    let scan = ctc_scan(sol, samples)?;
    Ok(ctc_report(sol, &scan))
}

pub fn ctc_report(sol: &PetrovSolution, scan: &[CtcSample]) -> CtcReport {
    let worst = scan
        .iter()
        .max_by(|a, b| a.norm.total_cmp(&b.norm))
        .expect("scan is nonempty");
    let fm = f_max(1e-12).expect("positive tolerance");
    let bound = (fm.f_star + 0.25 * PI * PI) / sol.beta().powi(2);
    CtcReport {
        samples: scan.len(),
        all_timelike: scan.iter().all(|s| s.norm < 0.0 && s.norm_direct < 0.0),
        worst_norm: worst.norm,
        worst_t: worst.t,
        max_form_mismatch: scan
            .iter()
            .map(|s| (s.norm - s.norm_direct).abs())
            .fold(0.0, f64::max),
        f_max: fm,
        analytic_bound: bound,
        analytic_bound_negative: bound < 0.0,
        bound_respected: worst.norm <= bound,
    }
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Input(format!("csv: {e}"))
}

/// Columns `t,u1,...,un,Q`.
pub fn write_trajectory_csv<W: Write>(w: W, samples: &[GeodesicState]) -> Result<()> {
    let n = samples.first().map_or(0, |s| s.u.len());
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("u{i}")));
    header.push("Q".into());
    wr.write_record(&header).map_err(csv_err)?;
    for s in samples {
        let mut row = vec![fmt(s.t)];
        row.extend(s.u.iter().map(|x| fmt(*x)));
        row.push(fmt(conserved_quantity(&s.u)));
        wr.write_record(&row).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::Input(e.to_string()))
}

pub fn read_trajectory_csv<R: Read>(r: R) -> Result<Vec<GeodesicState>> {
    let mut rd = csv::Reader::from_reader(r);
    let width = rd.headers().map_err(csv_err)?.len();
    if width < 3 {
        return Err(Error::Input(
            "trajectory csv needs t, u columns and Q".into(),
        ));
    }
    rd.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let vals: Vec<f64> = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|e| Error::Input(format!("bad number {f:?}: {e}")))
                })
                .collect::<Result<_>>()?;
            Ok(GeodesicState {
                t: vals[0],
                u: vals[1..width - 1].to_vec(),
            })
        })
        .collect()
}

/// Columns `t,x1,...,xn,norm`.
pub fn write_ctc_csv<W: Write>(w: W, samples: &[CtcSample]) -> Result<()> {
    let n = samples.first().map_or(0, |s| s.point.len());
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.push("norm".into());
    wr.write_record(&header).map_err(csv_err)?;
    for s in samples {
        let mut row = vec![fmt(s.t)];
        row.extend(s.point.iter().map(|x| fmt(*x)));
        row.push(fmt(s.norm));
        wr.write_record(&row).map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::Input(e.to_string()))
}

/// Writes named columns, one row per index.
pub fn write_columns<W: Write>(w: W, names: &[&str], columns: &[Vec<f64>]) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(names).map_err(csv_err)?;
    let rows = columns.first().map_or(0, Vec::len);
    for k in 0..rows {
        wr.write_record(columns.iter().map(|c| fmt(c[k])))
            .map_err(csv_err)?;
    }
    wr.flush().map_err(|e| Error::Input(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn petrov(l: &[f64]) -> PetrovSolution {
        PetrovSolution::build(l).unwrap()
    }

    fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        let v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / norm).collect()
    }

    #[test]
    fn rhs_examples() {
        let p = petrov(&[1.0]);
        assert_eq!(
            arnold_euler_rhs(&p, &[0.0, 0.0, 0.0, 1.0]).unwrap(),
            vec![0.0; 4]
        );
        assert_eq!(
            arnold_euler_rhs(&p, &[1.0, 0.0, 0.0, 0.0]).unwrap(),
            vec![0.0, 0.0, 0.0, -0.5]
        );
        let du = arnold_euler_rhs(&p, &[0.0, 0.0, 0.7, 0.2]).unwrap();
        let mut dv = [0.0; 2];
        reduced_rhs_into(&p, &[0.7, 0.2], &mut dv);
        assert_eq!(du, vec![0.0, 0.0, dv[0], dv[1]]);
        assert!(arnold_euler_rhs(&p, &[1.0]).is_err());
    }

    #[test]
    fn rhs_preserves_q_infinitesimally() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for lambdas in [vec![1.0], vec![1.0, -1.0], vec![3.0, 2.0, 1.0]] {
            let p = petrov(&lambdas);
            for _ in 0..10_000 / 3 {
                let u: Vec<f64> = (0..p.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let du = arnold_euler_rhs(&p, &u).unwrap();
                let dq =
                    -2.0 * u[0] * du[0] + (1..u.len()).map(|i| 2.0 * u[i] * du[i]).sum::<f64>();
                let scale = p.beta().max(1.0) * 64.0;
                assert!(dq.abs() < 1e-12 * scale, "{dq}");
            }
        }
    }

    #[test]
    fn dopri_solves_exponential_decay() {
        let s = dopri5(|y, dy| dy[0] = -y[0], |_| f64::INFINITY, &[1.0], 5.0, 1e-10).unwrap();
        let y = s.ys.last().unwrap()[0];
        assert!((y - (-5.0f64).exp()).abs() < 1e-9);
        assert_eq!(*s.ts.last().unwrap(), 5.0);
        let back = dopri5(
            |y, dy| dy[0] = -y[0],
            |_| f64::INFINITY,
            &[1.0],
            -2.0,
            1e-10,
        )
        .unwrap();
        assert!((back.ys.last().unwrap()[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn dopri_reports_blow_up() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let r = dopri5(
            |y, dy| dy[0] = y[0] * y[0],
            |_| f64::INFINITY,
            &[1.0],
            2.0,
            1e-10,
        );
        assert!(matches!(r, Err(Error::Integration(_))));
    }

    #[test]
    fn fixed_point_trajectory() {
        let p = petrov(&[1.0]);
        let tr = integrate_geodesic(&p, &[0.0, 0.0, 0.0, 1.0], 10.0, 1e-10).unwrap();
        assert_eq!(tr.max_q_drift, 0.0);
        assert!(tr.samples.iter().all(|s| s.u == vec![0.0, 0.0, 0.0, 1.0]));
        assert_eq!(tr.samples.last().unwrap().t, 10.0);
        assert!(tr.sphere.is_some());
    }

    #[test]
    fn reduced_trajectory_stays_on_sphere() {
        let p = petrov(&[3.0, 2.0, 1.0]);
        let tr = integrate_geodesic(&p, &[0.0, 0.0, 0.5, -0.3, 0.6, 0.2], 50.0, 1e-10).unwrap();
        let sphere = tr.sphere.clone().unwrap();
        assert!((sphere.radius_sq - 0.74).abs() < 1e-15);
        assert!(sphere.max_drift < 1e-8, "{sphere:?}");
        assert!(tr.samples.iter().all(|s| s.u[0] == 0.0 && s.u[1] == 0.0));
        assert!(polar_diagnostics(&tr, &p).is_err());
    }

    #[test]
    fn random_unit_states_conserve_q() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for lambdas in [vec![1.0], vec![1.0, -1.0], vec![3.0, 2.0, 1.0]] {
            let p = petrov(&lambdas);
            for _ in 0..3 {
                let u0 = unit(&mut rng, p.dim());
                let tr = integrate_geodesic(&p, &u0, 100.0, 1e-10).unwrap();
                assert!(tr.max_q_drift < 1e-7, "{lambdas:?}: {}", tr.max_q_drift);
                let pr = polar_diagnostics(&tr, &p).unwrap();
                assert!(pr.max_relative_residual < 1e-6, "{pr:?}");
                assert_eq!(pr.monotonicity_violations, 0);
            }
        }
    }

    #[test]
    fn polar_radius_constant_when_alpha_zero() {
        let p = petrov(&[1.0, -1.0]);
        assert_eq!(p.alpha(), 0.0);
        let tr = integrate_geodesic(&p, &[1.0, 0.0, 0.0, 0.0, 0.1], 30.0, 1e-10).unwrap();
        let pr = polar_diagnostics(&tr, &p).unwrap();
        assert!(pr.max_relative_residual < 1e-8);
        assert!((pr.r_max - pr.r_min) < 1e-8);
    }

    #[test]
    fn polar_residual_from_simple_start() {
        let p = petrov(&[1.0]);
        let tr = integrate_geodesic(&p, &[1.0, 0.0, 0.0, 0.1], 40.0, 1e-10).unwrap();
        assert!(polar_diagnostics(&tr, &p).unwrap().max_relative_residual < 1e-6);
    }

    #[test]
    fn hermite_interpolation() {
        let p = petrov(&[2.0, 1.0]);
        let u0 = [0.3, 0.2, -0.5, 0.4, 0.6];
        let tr = integrate_geodesic(&p, &u0, 5.0, 1e-11).unwrap();
        assert_eq!(tr.interpolate(0.0).unwrap(), u0.to_vec());
        let mid = tr.interpolate(2.5).unwrap();
        let direct = integrate_geodesic(&p, &u0, 2.5, 1e-11).unwrap();
        let end = &direct.samples.last().unwrap().u;
        let diff = mid
            .iter()
            .zip(end)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
        assert!(tr.interpolate(6.0).is_err());
    }

    #[test]
    fn ctc_curve_examples() {
        assert_eq!(ctc_curve(0.0, 0.8, 4).unwrap(), vec![0.0; 4]);
        let c = ctc_curve(PI, 1.0, 5).unwrap();
        assert!(c[0].abs() < 1e-15 && c[1].abs() < 1e-15);
        assert_eq!(c[4], PI);
        for t in [0.3, 1.7, 4.0] {
            let a = ctc_curve(t, 0.9, 4).unwrap();
            let b = ctc_curve(t + TAU, 0.9, 4).unwrap();
            assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-14));
        }
        assert!(matches!(ctc_curve(0.0, 0.0, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn ctc_velocity_is_derivative_and_regular() {
        for k in 0..1000 {
            let t = TAU * k as f64 / 1000.0;
            let v = ctc_velocity(t, 0.7, 4).unwrap();
            let h = 1e-6;
            let (a, b) = (
                ctc_curve(t + h, 0.7, 4).unwrap(),
                ctc_curve(t - h, 0.7, 4).unwrap(),
            );
            for i in 0..4 {
                assert!(((a[i] - b[i]) / (2.0 * h) - v[i]).abs() < 1e-7);
            }
            assert!(v.iter().map(|x| x * x).sum::<f64>() > 0.1);
        }
    }

    #[test]
    fn f_examples() {
        assert!((ctc_f(0.0) + 5.0).abs() < 1e-14);
        assert!((ctc_f(PI / 2.0) + 4.0).abs() < 1e-14);
        let p = petrov(&[1.0]);
        assert!((p.beta().powi(2) * ctc_velocity_norm(0.0, &p).unwrap() + 5.0).abs() < 1e-14);
    }

    #[test]
    fn f_max_value() {
        let fm = f_max(1e-12).unwrap();
        assert!((fm.f_star + 2.72).abs() < 0.01, "{fm:?}");
        assert!(fm.f_star < -0.25 * PI * PI);
        for k in 0..F_MAX_GRID {
            assert!(ctc_f(TAU * k as f64 / F_MAX_GRID as f64) <= fm.f_star);
        }
        assert!(f_max(0.0).is_err());
    }

    #[test]
    fn ctc_timelike_for_examples() {
        for lambdas in [vec![1.0], vec![1.0, -1.0], vec![3.0, 2.0, 1.0]] {
            let p = petrov(&lambdas);
            let r = verify_ctc(&p, 10_000).unwrap();
            assert!(r.all_timelike, "{lambdas:?}");
            assert!(
                r.max_form_mismatch < 1e-12,
                "{lambdas:?}: {}",
                r.max_form_mismatch
            );
            assert!(r.analytic_bound_negative && r.bound_respected);
        }
        assert!(matches!(
            verify_ctc(&petrov(&[1.0]), 10),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let p = petrov(&[2.0, 1.0]);
        let tr = integrate_geodesic(&p, &[0.3, 0.2, -0.5, 0.4, 0.6], 3.0, 1e-10).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &tr.samples).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,u1,u2,u3,u4,u5,Q\n"));
        let back = read_trajectory_csv(buf.as_slice()).unwrap();
        assert_eq!(back.len(), tr.samples.len());
        for (a, b) in back.iter().zip(&tr.samples) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert!(a
                .u
                .iter()
                .zip(&b.u)
                .all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn ctc_csv_header() {
        let scan = ctc_scan(&petrov(&[1.0]), 1000).unwrap();
        let mut buf = Vec::new();
        write_ctc_csv(&mut buf, &scan).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,x1,x2,x3,x4,norm\n"));
        assert_eq!(text.lines().count(), 1001);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_bit_exact(vals in proptest::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 4..40)) {
            let samples: Vec<GeodesicState> = vals
                .chunks_exact(4)
                .map(|c| GeodesicState { t: c[0], u: c[1..].to_vec() })
                .collect();
            prop_assume!(!samples.is_empty());
            let mut buf = Vec::new();
            write_trajectory_csv(&mut buf, &samples).unwrap();
            let back = read_trajectory_csv(buf.as_slice()).unwrap();
            prop_assert_eq!(back.len(), samples.len());
            for (a, b) in back.iter().zip(&samples) {
                prop_assert_eq!(a.t.to_bits(), b.t.to_bits());
                for (x, y) in a.u.iter().zip(&b.u) {
                    prop_assert_eq!(x.to_bits(), y.to_bits());
                }
            }
        }
    }
}
