//! Time integration with invariant monitoring and relaxation detection.
//!
//! The default integrator is an adaptive Dormand-Prince 5(4) pair with
//! tolerances tight enough that conservation checks probe the model rather
//! than the scheme; a fixed-step classical RK4 is available for exactly
//! reproducible runs and convergence-order checks. The Log generator's
//! domain boundary is handled by truncating the trajectory at the last
//! admissible state instead of aborting.

use crate::error::{Error, Result};
use crate::models::{
    entropy_production, frb_rhs, heavy_top_rhs, observables, Generator, Observables, TopParams,
};

/// Integration scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// Adaptive Dormand-Prince 5(4) with PI-free step control.
    Rk45Adaptive,
    /// Classical fixed-step RK4; the last step is shortened to land
    /// exactly on t_final.
    Rk4Fixed,
}

/// Step control and recording policy for `integrate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorOptions {
    pub method: Method,
    /// Step size for Rk4Fixed; ignored by the adaptive method.
    pub dt: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub t_final: f64,
    /// Record a sample only after at least this many accepted steps...
    pub record_every: usize,
    /// ...and at least this much simulated time since the last sample;
    /// both must be met, so the coarser stride wins.
    pub record_dt: f64,
    /// Hard cap on step attempts, guarding against pathological inputs.
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::Rk45Adaptive,
            dt: 1e-3,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            t_final: 10.0,
            record_every: 100,
            record_dt: 0.01,
            max_steps: 50_000_000,
        }
    }
}

impl IntegratorOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.dt > 0.0
            && self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.t_final > 0.0
            && self.record_dt >= 0.0
            && self.dt.is_finite()
            && self.t_final.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::NonFinite("integrator options"))
        }
    }
}

/// Things that can happen to a run besides finishing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// The flow reached the generator's domain boundary (Log generator,
    /// casimir crossing zero); the trajectory was truncated at the last
    /// admissible state.
    DomainTruncation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
}

/// Recorded samples of one integration. All sequences share a length and
/// times are strictly increasing; the first sample is the initial state and
/// the last is the final accepted state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub observables: Vec<Observables>,
    pub events: Vec<Event>,
}

/// Result of `detect_relaxation`: the settling time and the aligned values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Relaxation {
    pub t: f64,
    pub l3: f64,
    pub g3: f64,
}

/// Per-step entropy decreases beyond this are treated as violations of
/// monotonicity rather than roundoff.
pub const STEP_MONOTONICITY_TOL: f64 = 1e-9;

/// Conservation and monotonicity summary of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorReport {
    /// max |H(t) - H(0)| / |H(0)| over recorded samples.
    pub max_h_drift: f64,
    /// max |c2(t) - c2(0)| / c2(0) over recorded samples.
    pub max_c2_drift: f64,
    /// Smallest S(t_{k+1}) - S(t_k) over recorded steps.
    pub min_delta_s: f64,
    /// min_delta_s >= -STEP_MONOTONICITY_TOL.
    pub s_monotone: bool,
    /// Smallest c1(t_{k+1}) - c1(t_k) over recorded steps.
    pub min_delta_c1: f64,
    /// min_delta_c1 >= -STEP_MONOTONICITY_TOL; meaningful whenever C' > 0
    /// along the run (Linear and Log generators).
    pub c1_monotone: bool,
}

fn rhs(params: &TopParams, gen: &Generator, z: &[f64]) -> Result<Vec<f64>> {
    if z.len() == 3 {
        frb_rhs(params, gen, z)
    } else {
        heavy_top_rhs(params, gen, z)
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

struct Recorder<'a> {
    params: &'a TopParams,
    gen: &'a Generator,
    record_every: usize,
    record_dt: f64,
    steps_since: usize,
    traj: Trajectory,
}

impl<'a> Recorder<'a> {
    fn new(params: &'a TopParams, gen: &'a Generator, opts: &IntegratorOptions) -> Self {
        Recorder {
            params,
            gen,
            record_every: opts.record_every.max(1),
            record_dt: opts.record_dt,
            steps_since: 0,
            traj: Trajectory {
                times: Vec::new(),
                states: Vec::new(),
                observables: Vec::new(),
                events: Vec::new(),
            },
        }
    }

    fn push(&mut self, t: f64, z: &[f64]) -> Result<()> {
        let obs = observables(self.params, self.gen, z)?;
        self.traj.times.push(t);
        self.traj.states.push(z.to_vec());
        self.traj.observables.push(obs);
        self.steps_since = 0;
        Ok(())
    }

    fn after_step(&mut self, t: f64, z: &[f64]) -> Result<()> {
        self.steps_since += 1;
        let since = t - self.traj.times.last().copied().unwrap_or(0.0);
        if self.steps_since >= self.record_every && since >= self.record_dt {
            self.push(t, z)?;
        }
        Ok(())
    }

    fn finish(mut self, t: f64, z: &[f64]) -> Result<Trajectory> {
        if self.traj.times.last().copied() != Some(t) {
            self.push(t, z)?;
        }
        Ok(self.traj)
    }
}

// Dormand-Prince 5(4) tableau.
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// Difference between the 5th and embedded 4th order weights.
const ERR: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine(y: &[f64], h: f64, ks: &[&Vec<f64>], ws: &[f64]) -> Vec<f64> {
    let mut out = y.to_vec();
    for (k, w) in ks.iter().zip(ws) {
        for (o, kv) in out.iter_mut().zip(k.iter()) {
            *o += h * w * kv;
        }
    }
    out
}

fn integrate_adaptive(
    params: &TopParams,
    gen: &Generator,
    z0: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let mut rec = Recorder::new(params, gen, opts);
    let mut t = 0.0;
    let mut y = z0.to_vec();
    let mut k1 = rhs(params, gen, &y)?;
    rec.push(0.0, &y)?;

    let floor = 1e-14 * opts.t_final.max(1.0);
    let mut h = (0.01 / (1.0 + inf_norm(&k1))).min(opts.t_final / 10.0);
    let mut attempts = 0usize;

    while opts.t_final - t > floor {
        attempts += 1;
        if attempts > opts.max_steps {
            return Err(Error::StepBudgetExhausted {
                t,
                max_steps: opts.max_steps,
            });
        }
        h = h.min(opts.t_final - t);

        let stages = (|| -> Result<(Vec<f64>, Vec<f64>, f64)> {
            let k2 = rhs(params, gen, &combine(&y, h, &[&k1], &A2))?;
            let k3 = rhs(params, gen, &combine(&y, h, &[&k1, &k2], &A3))?;
            let k4 = rhs(params, gen, &combine(&y, h, &[&k1, &k2, &k3], &A4))?;
            let k5 = rhs(params, gen, &combine(&y, h, &[&k1, &k2, &k3, &k4], &A5))?;
            let k6 = rhs(params, gen, &combine(&y, h, &[&k1, &k2, &k3, &k4, &k5], &A6))?;
            let y5 = combine(&y, h, &[&k1, &k2, &k3, &k4, &k5, &k6], &B5);
            let k7 = rhs(params, gen, &y5)?;
            // RMS of the component errors scaled by the mixed tolerance.
            let mut acc = 0.0;
            for i in 0..y.len() {
                let e = h
                    * (ERR[0] * k1[i]
                        + ERR[2] * k3[i]
                        + ERR[3] * k4[i]
                        + ERR[4] * k5[i]
                        + ERR[5] * k6[i]
                        + ERR[6] * k7[i]);
                let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y5[i].abs());
                acc += (e / scale) * (e / scale);
            }
            let err = (acc / y.len() as f64).sqrt();
            Ok((y5, k7, err))
        })();

        match stages {
            Ok((y5, k7, err)) => {
                if !err.is_finite() {
                    h *= 0.2;
                    if h < floor {
                        return Err(Error::NonFinite("adaptive step"));
                    }
                    continue;
                }
                if err <= 1.0 {
                    t += h;
                    y = y5;
                    k1 = k7;
                    rec.after_step(t, &y)?;
                    let grow = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h *= grow;
                } else {
                    h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
                    if h < floor {
                        return Err(Error::StepSizeUnderflow { t, h });
                    }
                }
            }
            Err(Error::GeneratorDomain(_)) => {
                h *= 0.5;
                if h < floor {
                    rec.traj.events.push(Event {
                        t,
                        kind: EventKind::DomainTruncation,
                    });
                    return rec.finish(t, &y);
                }
            }
            Err(e) => return Err(e),
        }
    }
    rec.finish(opts.t_final, &y)
}

fn rk4_step(params: &TopParams, gen: &Generator, y: &[f64], h: f64) -> Result<Vec<f64>> {
    let k1 = rhs(params, gen, y)?;
    let k2 = rhs(params, gen, &combine(y, h, &[&k1], &[0.5]))?;
    let k3 = rhs(params, gen, &combine(y, h, &[&k2], &[0.5]))?;
    let k4 = rhs(params, gen, &combine(y, h, &[&k3], &[1.0]))?;
    let sixth = h / 6.0;
    Ok(y.iter()
        .enumerate()
        .map(|(i, v)| v + sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

fn integrate_fixed(
    params: &TopParams,
    gen: &Generator,
    z0: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    let mut rec = Recorder::new(params, gen, opts);
    let mut t = 0.0;
    let mut y = z0.to_vec();
    rhs(params, gen, &y)?;
    rec.push(0.0, &y)?;

    let floor = 1e-14 * opts.t_final.max(1.0);
    let mut attempts = 0usize;
    while opts.t_final - t > floor {
        attempts += 1;
        if attempts > opts.max_steps {
            return Err(Error::StepBudgetExhausted {
                t,
                max_steps: opts.max_steps,
            });
        }
        let h = opts.dt.min(opts.t_final - t);
        match rk4_step(params, gen, &y, h) {
            Ok(ynew) => {
                if inf_norm(&ynew).is_infinite() || ynew.iter().any(|v| v.is_nan()) {
                    return Err(Error::NonFinite("fixed step"));
                }
                t += h;
                y = ynew;
                rec.after_step(t, &y)?;
            }
            Err(Error::GeneratorDomain(_)) => {
                rec.traj.events.push(Event {
                    t,
                    kind: EventKind::DomainTruncation,
                });
                return rec.finish(t, &y);
            }
            Err(e) => return Err(e),
        }
    }
    rec.finish(opts.t_final, &y)
}

/// Integrate the model from z0 (length 3 for the rigid body, 6 for the
/// heavy top) and record a thinned trajectory. A Log-domain crossing
/// truncates the run at the last admissible state and records an event;
/// everything else that goes wrong is an error.
pub fn integrate(
    params: &TopParams,
    gen: &Generator,
    z0: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    if z0.len() != 3 && z0.len() != 6 {
        return Err(Error::DimensionMismatch {
            expected: 6,
            got: z0.len(),
        });
    }
    match opts.method {
        Method::Rk45Adaptive => integrate_adaptive(params, gen, z0, opts),
        Method::Rk4Fixed => integrate_fixed(params, gen, z0, opts),
    }
}

/// Find the first recorded time after which the transverse components
/// (L^1, L^2, Gamma^1, Gamma^2) stay below tol times the initial magnitude
/// for the rest of the trajectory. Returns the settling time and the final
/// aligned values; None if the trajectory never settles.
pub fn detect_relaxation(traj: &Trajectory, tol: f64) -> Option<Relaxation> {
    let first = traj.states.first()?;
    let dim6 = first.len() == 6;
    let norm3 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let scale = if dim6 {
        norm3(&first[..3]).max(norm3(&first[3..]))
    } else {
        norm3(first)
    };
    let threshold = tol * scale;
    let transverse = |z: &Vec<f64>| {
        if dim6 {
            z[0].abs().max(z[1].abs()).max(z[3].abs()).max(z[4].abs())
        } else {
            z[0].abs().max(z[1].abs())
        }
    };
    let mut settled_from = 0;
    for (idx, z) in traj.states.iter().enumerate() {
        if transverse(z) > threshold {
            settled_from = idx + 1;
        }
    }
    if settled_from >= traj.states.len() {
        return None;
    }
    let last = traj.states.last()?;
    Some(Relaxation {
        t: traj.times[settled_from],
        l3: last[2],
        g3: if dim6 { last[5] } else { 0.0 },
    })
}

/// Summarize conservation of H and c2 and monotonicity of S and c1 over
/// the recorded samples.
pub fn monitor_report(traj: &Trajectory) -> MonitorReport {
    let mut max_h_drift = 0.0_f64;
    let mut max_c2_drift = 0.0_f64;
    let mut min_delta_s = 0.0_f64;
    let mut min_delta_c1 = 0.0_f64;
    if let Some(first) = traj.observables.first() {
        let h_den = if first.h.abs() > 0.0 { first.h.abs() } else { 1.0 };
        let c2_den = if first.c2.abs() > 0.0 {
            first.c2.abs()
        } else {
            1.0
        };
        min_delta_s = f64::INFINITY;
        min_delta_c1 = f64::INFINITY;
        for pair in traj.observables.windows(2) {
            min_delta_s = min_delta_s.min(pair[1].s - pair[0].s);
            min_delta_c1 = min_delta_c1.min(pair[1].c1 - pair[0].c1);
        }
        if traj.observables.len() < 2 {
            min_delta_s = 0.0;
            min_delta_c1 = 0.0;
        }
        for obs in &traj.observables {
            max_h_drift = max_h_drift.max((obs.h - first.h).abs() / h_den);
            max_c2_drift = max_c2_drift.max((obs.c2 - first.c2).abs() / c2_den);
        }
    }
    MonitorReport {
        max_h_drift,
        max_c2_drift,
        min_delta_s,
        s_monotone: min_delta_s >= -STEP_MONOTONICITY_TOL,
        min_delta_c1,
        c1_monotone: min_delta_c1 >= -STEP_MONOTONICITY_TOL,
    }
}

/// Entropy production integrated along the recorded samples with the
/// trapezoid rule; a cheap cross-check that S(t) - S(0) matches the
/// closed-form production rate.
pub fn integrated_entropy_production(
    params: &TopParams,
    gen: &Generator,
    traj: &Trajectory,
) -> Result<f64> {
    let mut total = 0.0;
    for i in 1..traj.times.len() {
        let a = entropy_production(params, gen, &traj.states[i - 1])?;
        let b = entropy_production(params, gen, &traj.states[i])?;
        total += 0.5 * (a + b) * (traj.times[i] - traj.times[i - 1]);
    }
    Ok(total)
}
