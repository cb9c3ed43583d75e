//! Independent checks: adaptive IVP integration of `u' = v, v' = -g(u)`
//! with event location, brute-force time-to-zero, energy drift, symmetric
//! shooting and finite-difference residuals of sampled profiles.

pub mod dopri;
mod residual;
pub mod shooting;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Params;
use dopri::{Control, DenseStep, State, StepOptions};

pub use residual::{residual, residual_with, ResidualOptions, ResidualReport};
pub use shooting::{
    classical_window_by_shooting, shoot_classical, solve_classical_by_shooting, Shot,
};

/// Relative tolerance used by [`time_to_zero`].
pub const ORACLE_TOL: f64 = 1e-13;
/// Radius of the non-uniqueness ball in the scaled norm `(u/u_H, v/(u_H/T_H))`.
pub const TOL_ORIGIN: f64 = 1e-9;
/// Event times are located to this absolute accuracy (times are O(L)).
pub const EVENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    /// `u` changes sign.
    HitZeroU,
    /// `v` changes sign (a turning point).
    HitZeroV,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub state: State,
}

/// When to stop before `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    #[default]
    Never,
    FirstZeroU,
    /// After the `n`-th `HitZeroV` event.
    ZeroV(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    pub tol: f64,
    pub stop: StopRule,
    /// Allow the state to approach the origin on the zero-energy level.
    pub allow_origin: bool,
}

impl IntegrateOptions {
    pub fn new(tol: f64) -> Self {
        IntegrateOptions {
            tol,
            stop: StopRule::Never,
            allow_origin: false,
        }
    }

    pub fn stop(mut self, stop: StopRule) -> Self {
        self.stop = stop;
        self
    }

    pub fn allow_origin(mut self) -> Self {
        self.allow_origin = true;
        self
    }
}

/// Accepted steps of an integration, with their dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub events: Vec<Event>,
    steps: Vec<DenseStep>,
}

impl Trajectory {
    pub fn start(&self) -> State {
        self.states[0]
    }

    pub fn end(&self) -> (f64, State) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }

    /// State at `t` from the dense output (clamped to the covered range).
    pub fn eval(&self, t: f64) -> State {
        if self.steps.is_empty() {
            return self.states[0];
        }
        let i = self
            .steps
            .partition_point(|s| s.t1() < t)
            .min(self.steps.len() - 1);
        self.steps[i].eval(t)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }
}

/// Vector field of the sublinear problem.
pub fn field(params: &Params) -> impl Fn(State) -> State + '_ {
    move |y: State| [y[1], -params.force(y[0])]
}

/// Integrates from `(u0, v0)` at `x = 0` up to `x_max`.
pub fn integrate(
    u0: f64,
    v0: f64,
    params: &Params,
    x_max: f64,
    opts: IntegrateOptions,
) -> Result<Trajectory> {
    let eq = params.equilibria();
    let (u_s, v_s) = (eq.u_h, eq.velocity_scale());
    let u_start = u0.abs().max(u_s);
    let v_start = v0.abs().max(v_s);
    let step_opts = StepOptions::new(
        opts.tol,
        [opts.tol * 1e-3 * u_start, opts.tol * 1e-3 * v_start],
    );
    let e_scale = params.energy(u_start, v_start).abs().max(0.5 * v_s * v_s);
    let in_ball = |y: State| {
        (y[0] / u_s).hypot(y[1] / v_s) < TOL_ORIGIN
            && params.energy(y[0], y[1]).abs() <= TOL_ORIGIN * e_scale
    };
    if !opts.allow_origin && in_ball([u0, v0]) {
        return Err(Error::EnteredNonUniquenessBall { t: 0.0 });
    }

    let mut traj = Trajectory {
        times: vec![0.0],
        states: vec![[u0, v0]],
        events: Vec::new(),
        steps: Vec::new(),
    };
    if x_max <= 0.0 {
        return Ok(traj);
    }
    let f = field(params);
    let mut v_zeros = 0usize;
    dopri::integrate(&f, 0.0, [u0, v0], x_max, &step_opts, |step| {
        let mut stop_at: Option<f64> = None;
        let t_tol = EVENT_TOL * step.t1().abs().max(1.0);
        let mut found: Vec<Event> = Vec::new();
        for (idx, kind) in [(0, EventKind::HitZeroU), (1, EventKind::HitZeroV)] {
            if let Some(t) = step.locate_zero(idx, t_tol) {
                found.push(Event {
                    time: t,
                    kind,
                    state: step.eval(t),
                });
            }
        }
        found.sort_by(|a, b| a.time.total_cmp(&b.time));
        for e in found {
            traj.events.push(e);
            match (opts.stop, e.kind) {
                (StopRule::FirstZeroU, EventKind::HitZeroU) => stop_at = Some(e.time),
                (StopRule::ZeroV(n), EventKind::HitZeroV) => {
                    v_zeros += 1;
                    if v_zeros >= n {
                        stop_at = Some(e.time);
                    }
                }
                _ => {}
            }
            if stop_at.is_some() {
                break;
            }
        }
        if let Some(t) = stop_at {
            let (t, y) = match opts.stop {
                StopRule::FirstZeroU => refine_zero_u(&f, step, t, &step_opts)?,
                _ => (t, step.eval(t)),
            };
            if let Some(e) = traj.events.last_mut() {
                e.time = t;
                e.state = y;
            }
            let mut cut = DenseStep::truncated(step, t);
            cut.y1 = y;
            traj.times.push(t);
            traj.states.push(y);
            traj.steps.push(cut);
            return Ok(Control::Stop);
        }
        if !opts.allow_origin && in_ball(step.y1) {
            return Err(Error::EnteredNonUniquenessBall { t: step.t1() });
        }
        traj.times.push(step.t1());
        traj.states.push(step.y1);
        traj.steps.push(*step);
        Ok(Control::Continue)
    })?;
    Ok(traj)
}

/// The step containing a zero of `u` also samples the field beyond it, where
/// `|u|^p` is not smooth. Re-integrate up to the zero from the step start and
/// correct the zero with Newton steps on `u`.
fn refine_zero_u<F: dopri::PlanarField>(
    f: &F,
    step: &DenseStep,
    t_guess: f64,
    opts: &StepOptions,
) -> Result<(f64, State)> {
    let mut t = t_guess;
    let mut y = step.eval(t);
    for _ in 0..4 {
        y = if t > step.t0 {
            dopri::integrate(f, step.t0, step.y0, t, opts, |_| Ok(Control::Continue))?.1
        } else {
            step.y0
        };
        if y[1] == 0.0 {
            break;
        }
        let dt = -y[0] / y[1];
        if dt.abs() <= EVENT_TOL * t.abs().max(1.0) {
            break;
        }
        t += dt;
    }
    Ok((t, y))
}

/// First time the orbit from `(c, 0)` reaches `u = 0`, by direct integration.
pub fn time_to_zero(c: f64, params: &Params) -> Result<f64> {
    let u_h = params.equilibria().u_h;
    if !(c > u_h) {
        return Err(Error::AmplitudeBelowHomoclinic { c, u_h });
    }
    // T(c) < T_H, so one extinction time is always enough.
    let x_max = 1.5 * params.equilibria().t_h;
    let traj = integrate(
        c,
        0.0,
        params,
        x_max,
        IntegrateOptions::new(ORACLE_TOL).stop(StopRule::FirstZeroU),
    )?;
    traj.first_event(EventKind::HitZeroU)
        .map(|e| e.time)
        .ok_or(Error::NoEvent { t_max: x_max })
}

/// `max |E(u, v) - E(u₀, v₀)|` over the stored states.
pub fn energy_drift(traj: &Trajectory, params: &Params) -> f64 {
    let [u0, v0] = traj.start();
    let e0 = params.energy(u0, v0);
    traj.states
        .iter()
        .fold(0.0, |m, &[u, v]| m.max((params.energy(u, v) - e0).abs()))
}
