//! Time integration of the reduced system.
//!
//! A single adaptive engine ([`rkv65`]) produces [`Trajectory`] values that
//! keep every accepted step, so the solution can be evaluated anywhere and
//! the step grid can be replayed for smooth finite differences.

pub mod rkv65;

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{
    equilibrium, instantaneous_energy, vector_field, FieldModel, PhysParams, RadialState,
};
use crate::roots::newton_bisect;

pub use rkv65::{Step, StepControl};

/// A sampled solution.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitSample {
    pub times: Vec<f64>,
    pub states: Vec<RadialState>,
    /// Hamiltonian at the first sample.
    pub energy: f64,
    /// Period of the closed orbit, when known.
    pub period: Option<f64>,
}

/// Dense solution made of accepted steps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    steps: Vec<Step>,
    start: RadialState,
    t0: f64,
    energy: f64,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(self.t0, Step::t_end)
    }

    pub fn start(&self) -> RadialState {
        self.start
    }

    pub fn end(&self) -> RadialState {
        self.steps.last().map_or(self.start, |s| to_state(s.y1))
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Step boundaries, starting at `t_start` and ending at `t_end`.
    pub fn grid(&self) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.steps.len() + 1);
        g.push(self.t0);
        g.extend(self.steps.iter().map(Step::t_end));
        g
    }

    /// Dense output at `t` inside the integrated interval.
    pub fn eval(&self, t: f64) -> Result<RadialState> {
        let (lo, hi) = ordered(self.t0, self.t_end());
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange(
                "trajectory evaluated outside its time span",
            ));
        }
        if self.steps.is_empty() {
            return Ok(self.start);
        }
        let forward = self.t_end() >= self.t0;
        // first step whose end lies at or beyond t
        let idx = self
            .steps
            .partition_point(|s| {
                if forward {
                    s.t_end() < t
                } else {
                    s.t_end() > t
                }
            })
            .min(self.steps.len() - 1);
        Ok(to_state(self.steps[idx].eval(t)))
    }

    /// States at the step boundaries.
    pub fn sample(&self) -> OrbitSample {
        let mut states = Vec::with_capacity(self.steps.len() + 1);
        states.push(self.start);
        states.extend(self.steps.iter().map(|s| to_state(s.y1)));
        OrbitSample {
            times: self.grid(),
            states,
            energy: self.energy,
            period: None,
        }
    }

    /// `n` samples at `t_start + j·span/n`, `j = 0..n`; the end point is
    /// excluded so that periodic data can be summed with the trapezoid rule.
    pub fn uniform(&self, n: usize) -> Result<OrbitSample> {
        let span = self.t_end() - self.t0;
        let mut times = Vec::with_capacity(n);
        let mut states = Vec::with_capacity(n);
        for j in 0..n {
            let t = self.t0 + span * j as f64 / n as f64;
            times.push(t);
            states.push(self.eval(t)?);
        }
        Ok(OrbitSample {
            times,
            states,
            energy: self.energy,
            period: None,
        })
    }
}

fn ordered(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn to_state(y: rkv65::State) -> RadialState {
    RadialState { r: y[0], pr: y[1] }
}

fn rhs<'a>(
    params: &'a PhysParams,
    field: &'a FieldModel,
) -> impl FnMut(f64, &rkv65::State) -> Result<rkv65::State> + 'a {
    move |t, y| {
        let (a, b) = vector_field(t, RadialState { r: y[0], pr: y[1] }, params, field)?;
        Ok([a, b])
    }
}

/// Integrates from `t0` to `t1 > t0` with local error tolerance `tol`.
pub fn integrate(
    initial: RadialState,
    t0: f64,
    t1: f64,
    params: &PhysParams,
    field: &FieldModel,
    tol: f64,
) -> Result<Trajectory> {
    if !(t1 > t0) {
        return Err(Error::InvalidParameter {
            name: "t1",
            reason: "must exceed t0",
        });
    }
    if !(1e-13..=1e-6).contains(&tol) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must lie in [1e-13, 1e-6]",
        });
    }
    integrate_with(initial, t0, t1, params, field, StepControl::new(tol))
}

/// As [`integrate`], in either time direction and with full step control.
pub fn integrate_with(
    initial: RadialState,
    t0: f64,
    t1: f64,
    params: &PhysParams,
    field: &FieldModel,
    control: StepControl,
) -> Result<Trajectory> {
    params.validate()?;
    field.check(params)?;
    let start = RadialState::new(initial.r, initial.pr)?;
    let energy = instantaneous_energy(t0, start, params, field)?;
    let mut steps = Vec::new();
    if t1 != t0 {
        let dir = (t1 - t0).signum();
        let mut stepper = rkv65::Stepper::new(
            rhs(params, field),
            t0,
            [start.r, start.pr],
            dir,
            t1 - t0,
            control,
        )?;
        while stepper.time() != t1 {
            steps.push(stepper.step(t1)?);
        }
    }
    Ok(Trajectory {
        steps,
        start,
        t0,
        energy,
    })
}

/// Flow along a prescribed time grid with the fixed sixth-order formula.
pub fn flow_on_grid(
    initial: RadialState,
    grid: &[f64],
    params: &PhysParams,
    field: &FieldModel,
) -> Result<RadialState> {
    Ok(to_state(rkv65::replay(
        rhs(params, field),
        grid,
        [initial.r, initial.pr],
    )?))
}

/// First return of an unperturbed orbit to the section `pr = 0`, crossing in
/// the same direction as it leaves `initial`.
pub fn return_time(initial: RadialState, params: &PhysParams, tol: f64) -> Result<f64> {
    Ok(closed_orbit(initial, params, tol)?.0)
}

/// [`return_time`] together with the trajectory over exactly one period.
pub fn closed_orbit(
    initial: RadialState,
    params: &PhysParams,
    tol: f64,
) -> Result<(f64, Trajectory)> {
    if params.modulation != 0.0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "return times are defined for the unperturbed system",
        });
    }
    let start = RadialState::new(initial.r, initial.pr)?;
    if start.pr.abs() > 1e-12 {
        return Err(Error::InvalidParameter {
            name: "initial state",
            reason: "must lie on the section pr = 0",
        });
    }
    let field = FieldModel::Constant;
    let eq = equilibrium(params)?;
    let (_, force) = vector_field(0.0, start, params, &field)?;
    if force == 0.0 {
        return Err(Error::OutOfRange(
            "return time requested at the equilibrium",
        ));
    }
    let dir = force.signum();
    let horizon = 1000.0 * eq.t0_lin;
    let control = StepControl {
        h_max: Some(eq.t0_lin / 8.0),
        ..StepControl::new(tol)
    };
    let energy = instantaneous_energy(0.0, start, params, &field)?;
    let mut stepper = rkv65::Stepper::new(
        rhs(params, &field),
        0.0,
        [start.r, start.pr],
        1.0,
        eq.t0_lin,
        control,
    )?;
    let mut steps = Vec::new();
    while stepper.time() < horizon {
        let step = stepper.step(horizon)?;
        let before = step.y0[1] * dir;
        let after = step.y1[1] * dir;
        if before < 0.0 && after >= 0.0 {
            let t = locate_crossing(&step)?;
            let mut last = step;
            last.truncate(t);
            steps.push(last);
            let traj = Trajectory {
                steps,
                start,
                t0: 0.0,
                energy,
            };
            return Ok((t, traj));
        }
        steps.push(step);
    }
    Err(Error::NoReturn { horizon })
}

// pr(t) = 0 inside the step, polished on the interpolant to 1e-12 in time
fn locate_crossing(step: &Step) -> Result<f64> {
    let g = |t: f64| (step.eval(t)[1], step.eval_derivative(t)[1]);
    let t = newton_bisect(
        g,
        step.t,
        step.t_end(),
        1e-12 / step.t_end().abs().max(1.0),
        200,
    )?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian;
    use core::f64::consts::PI;

    fn st(r: f64, pr: f64) -> RadialState {
        RadialState { r, pr }
    }

    #[test]
    fn equilibrium_stays_put() {
        let p = PhysParams::canonical();
        let tr = integrate(st(1.0, 0.0), 0.0, 50.0, &p, &FieldModel::Constant, 1e-10).unwrap();
        for s in tr.sample().states {
            assert!((s.r - 1.0).abs() < 1e-12 && s.pr.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        let p = PhysParams::canonical();
        assert!(integrate(st(1.2, 0.0), 1.0, 1.0, &p, &FieldModel::Constant, 1e-10).is_err());
        assert!(integrate(st(1.2, 0.0), 0.0, 1.0, &p, &FieldModel::Constant, 1e-3).is_err());
        assert!(integrate(st(-1.2, 0.0), 0.0, 1.0, &p, &FieldModel::Constant, 1e-10).is_err());
    }

    #[test]
    fn forward_then_backward_returns_home() {
        let p = PhysParams::canonical();
        let f = FieldModel::Constant;
        let tol = 1e-11;
        let fwd = integrate(st(1.0, 1.0), 0.0, 20.0, &p, &f, tol).unwrap();
        let back = integrate_with(fwd.end(), 20.0, 0.0, &p, &f, StepControl::new(tol)).unwrap();
        let e = back.end();
        assert!(e.distance(&st(1.0, 1.0)) < 10.0 * tol, "{e:?}");
    }

    #[test]
    fn dense_eval_matches_step_ends() {
        let p = PhysParams::canonical();
        let tr = integrate(st(1.5, 0.0), 0.0, 10.0, &p, &FieldModel::Constant, 1e-11).unwrap();
        for s in tr.steps() {
            let y = tr.eval(s.t_end()).unwrap();
            // interpolant weights reach 2e4 in magnitude, so rounding is ~1e-13
            assert!(
                (y.r - s.y1[0]).abs() < 1e-12 && (y.pr - s.y1[1]).abs() < 1e-12,
                "{y:?} {:?}",
                s.y1
            );
        }
        assert!(tr.eval(10.5).is_err());
    }

    #[test]
    fn return_time_is_symmetric_and_closes() {
        let p = PhysParams::canonical();
        let (t, orbit) = closed_orbit(st(1.9190, 0.0), &p, 1e-11).unwrap();
        let end = orbit.end();
        assert!(
            (end.r - 1.9190).abs() < 1e-8 && end.pr.abs() < 1e-9,
            "{end:?}"
        );
        // the same orbit seen from its inner turning point
        let h = hamiltonian(st(1.9190, 0.0), &p).unwrap();
        let mid = orbit.eval(0.5 * t).unwrap();
        assert!(mid.pr.abs() < 1e-8);
        let t_inner = return_time(st(mid.r, 0.0), &p, 1e-11).unwrap();
        assert!((t - t_inner).abs() < 1e-9, "{t} vs {t_inner}");
        assert!((hamiltonian(mid, &p).unwrap() - h).abs() < 1e-10);
    }

    #[test]
    fn return_time_near_center_approaches_linear_period() {
        let p = PhysParams::canonical();
        let t = return_time(st(1.001, 0.0), &p, 1e-12).unwrap();
        assert!((t - 2.0 * PI).abs() < 1e-3);
    }

    #[test]
    fn return_time_preconditions() {
        let p = PhysParams::canonical();
        assert!(return_time(st(1.0, 0.0), &p, 1e-10).is_err());
        assert!(return_time(st(1.3, 0.1), &p, 1e-10).is_err());
        assert!(return_time(st(1.3, 0.0), &p.with_modulation(1e-3), 1e-10).is_err());
    }

    // Implicit midpoint rule: symmetric, fixed step, used only as an oracle.
    fn midpoint_flow(p: &PhysParams, y0: RadialState, t_end: f64, n: usize) -> RadialState {
        let h = t_end / n as f64;
        let f = |y: RadialState| vector_field(0.0, y, p, &FieldModel::Constant).unwrap();
        let mut y = y0;
        for _ in 0..n {
            let mut next = y;
            for _ in 0..100 {
                let mid = st(0.5 * (y.r + next.r), 0.5 * (y.pr + next.pr));
                let (a, b) = f(mid);
                let cand = st(y.r + h * a, y.pr + h * b);
                let done = cand.distance(&next) < 1e-15;
                next = cand;
                if done {
                    break;
                }
            }
            y = next;
        }
        y
    }

    #[test]
    fn agrees_with_symmetric_fixed_step_oracle() {
        let p = PhysParams::canonical();
        let y0 = st(1.0, 1.0);
        let tr = integrate(y0, 0.0, 5.0, &p, &FieldModel::Constant, 1e-12).unwrap();
        let a = midpoint_flow(&p, y0, 5.0, 4000);
        let b = midpoint_flow(&p, y0, 5.0, 8000);
        // Richardson on the second-order oracle
        let rich = st((4.0 * b.r - a.r) / 3.0, (4.0 * b.pr - a.pr) / 3.0);
        assert!(
            tr.end().distance(&rich) < 1e-9,
            "{:?} vs {rich:?}",
            tr.end()
        );
    }

    #[test]
    fn grid_replay_reproduces_adaptive_end_point() {
        let p = PhysParams::canonical().with_modulation(1e-3);
        let f = FieldModel::sine_ansatz();
        let tr = integrate(st(1.4, 0.2), 0.0, 7.0, &p, &f, 1e-11).unwrap();
        let y = flow_on_grid(st(1.4, 0.2), &tr.grid(), &p, &f).unwrap();
        // the grid differences t_{i+1} − t_i round the step sizes
        assert!(y.distance(&tr.end()) < 1e-12, "{}", y.distance(&tr.end()));
    }
}
