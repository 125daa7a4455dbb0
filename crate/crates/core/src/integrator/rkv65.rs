//! Verner's 6(5) embedded pair with a fifth-order continuous extension.
//!
//! The ninth stage is evaluated at the new point, so it is reused as the
//! first stage of the next step. One extra stage at `c = 1/2` feeds the
//! interpolant.

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

pub type State = [f64; 2];

const C: [f64; 9] = [
    0.0,
    0.06,
    0.09593333333333333,
    0.1439,
    0.4973,
    0.9725,
    0.9995,
    1.0,
    1.0,
];
const A: [[f64; 9]; 9] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.06, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        0.019239962962962962,
        0.07669337037037037,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [0.035975, 0.0, 0.107925, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        1.3186834152331484,
        0.0,
        -5.042058063628562,
        4.220674648395414,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -41.872591664327516,
        0.0,
        159.4325621631375,
        -122.11921356501003,
        5.531743066200054,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        -54.430156935316504,
        0.0,
        207.06725136501848,
        -158.61081378459,
        6.991816585950242,
        -0.018597231062203234,
        0.0,
        0.0,
        0.0,
    ],
    [
        -54.66374178728198,
        0.0,
        207.95280625538936,
        -159.2889574744995,
        7.018743740796944,
        -0.018338785905045722,
        -0.0005119484997882099,
        0.0,
        0.0,
    ],
    [
        0.03438957868357036,
        0.0,
        0.0,
        0.2582624555633503,
        0.4209371189673537,
        4.40539646966931,
        -176.48311902429865,
        172.36413340141507,
        0.0,
    ],
];
const B: [f64; 9] = [
    0.03438957868357036,
    0.0,
    0.0,
    0.2582624555633503,
    0.4209371189673537,
    4.40539646966931,
    -176.48311902429865,
    172.36413340141507,
    0.0,
];
const B_LOW: [f64; 9] = [
    0.0490996764838249,
    0.0,
    0.0,
    0.22511122295165242,
    0.4694682253029562,
    0.8065792249988868,
    0.0,
    -0.607119489177796,
    0.056861139440475696,
];
const C_DENSE: f64 = 0.5;
const A_DENSE: [f64; 9] = [
    0.016524159013572806,
    0.0,
    0.0,
    0.3053128187514179,
    0.2071200938201979,
    -1.293879140655123,
    57.11988411588149,
    -55.87979207510932,
    0.024830028297766014,
];
const B_DENSE_RAW: [[f64; 6]; 10] = [
    [
        1.0,
        -5.308169607103577,
        10.18168044895868,
        -7.520036991611715,
        0.9340485368631161,
        0.746867191577065,
    ],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        0.0,
        6.272050253212501,
        -16.02618147467746,
        12.844356324519618,
        -1.1487945044767591,
        -1.6831681430145498,
    ],
    [
        0.0,
        6.876491702846304,
        -24.635767260846333,
        33.21078648379717,
        -17.49461528263644,
        2.4640414758066496,
    ],
    [
        0.0,
        -35.5444517105996,
        165.7016170190242,
        -385.4635395491143,
        442.43241370157017,
        -182.7206429912112,
    ],
    [
        0.0,
        1918.6548566980114,
        -9268.121508966042,
        20858.33702877255,
        -22645.82767158481,
        8960.474176055992,
    ],
    [
        0.0,
        -1883.0698021327182,
        9101.025187200634,
        -20473.188551959534,
        22209.765551256532,
        -8782.1682509635,
    ],
    [
        0.0,
        0.11902479635123643,
        -0.12502696705039376,
        1.7799569193949991,
        -4.660932123043763,
        2.886977374347921,
    ],
    [0.0, -8.0, 32.0, -40.0, 16.0, 0.0],
];

// Interpolant rows adjusted in their last digit so that the interpolant
// reproduces the step end point exactly.
const B_DENSE: [[f64; 6]; 10] = {
    let mut table = B_DENSE_RAW;
    let mut i = 0;
    while i < 10 {
        let mut sum = 0.0;
        let mut j = 0;
        while j < 5 {
            sum += table[i][j];
            j += 1;
        }
        table[i][5] = if i < 9 { B[i] } else { 0.0 } - sum;
        i += 1;
    }
    table
};

/// Step-size control settings. The error test is mixed: a component passes
/// when its estimate is below `tol·(1 + |y|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepControl {
    pub tol: f64,
    /// Upper bound on `|h|`; `None` lets the controller decide.
    pub h_max: Option<f64>,
    pub max_steps: usize,
}

impl StepControl {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h_max: None,
            max_steps: 5_000_000,
        }
    }
}

/// One accepted step together with the stage derivatives needed to
/// interpolate inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    /// Start time.
    pub t: f64,
    /// Signed step used by the formula.
    pub h: f64,
    /// End of the interval this step covers; `t + h` unless truncated.
    pub t_end: f64,
    pub y0: State,
    /// State at `t_end`.
    pub y1: State,
    k: [State; 10],
}

impl Step {
    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    /// Restricts the step to `[t, t_end]`, keeping its interpolant.
    pub fn truncate(&mut self, t_end: f64) {
        self.y1 = self.eval(t_end);
        self.t_end = t_end;
    }

    /// Dense output at `t`; exact at both ends of the step up to rounding.
    pub fn eval(&self, t: f64) -> State {
        let s = (t - self.t) / self.h;
        let mut out = self.y0;
        for (k, row) in self.k.iter().zip(&B_DENSE) {
            // s·(b0 + b1 s + … + b5 s⁵)
            let mut w = 0.0;
            for &b in row.iter().rev() {
                w = w * s + b;
            }
            w *= s * self.h;
            out[0] += w * k[0];
            out[1] += w * k[1];
        }
        out
    }

    /// Time derivative of the interpolant.
    pub fn eval_derivative(&self, t: f64) -> State {
        let s = (t - self.t) / self.h;
        let mut out = [0.0; 2];
        for (k, row) in self.k.iter().zip(&B_DENSE) {
            // d/ds of Σ b_j s^{j+1}
            let mut w = 0.0;
            for (j, &b) in row.iter().enumerate().rev() {
                w = w * s + (j + 1) as f64 * b;
            }
            out[0] += w * k[0];
            out[1] += w * k[1];
        }
        out
    }
}

/// Adaptive stepper for a two-dimensional system `y' = f(t, y)` whose first
/// component must stay positive.
pub struct Stepper<F> {
    rhs: F,
    t: f64,
    y: State,
    f0: State,
    h: f64,
    dir: f64,
    control: StepControl,
    steps: usize,
}

impl<F> Stepper<F>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    /// `direction` is the sign of the time increments; `span` is a typical
    /// integration length used to bound the first step.
    pub fn new(
        mut rhs: F,
        t0: f64,
        y0: State,
        direction: f64,
        span: f64,
        control: StepControl,
    ) -> Result<Self> {
        if !(control.tol > 0.0 && control.tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: "must be positive",
            });
        }
        let f0 = rhs(t0, &y0)?;
        let dir = if direction < 0.0 { -1.0 } else { 1.0 };
        let h = initial_step(&mut rhs, t0, &y0, &f0, dir, span.abs(), &control)?;
        Ok(Self {
            rhs,
            t: t0,
            y: y0,
            f0,
            h,
            dir,
            control,
            steps: 0,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn state(&self) -> State {
        self.y
    }

    /// Takes one accepted step that does not pass `t_stop`.
    pub fn step(&mut self, t_stop: f64) -> Result<Step> {
        let remaining = (t_stop - self.t) * self.dir;
        if !(remaining > 0.0) {
            return Err(Error::OutOfRange("stepper already at its stop time"));
        }
        let h_max = self.control.h_max.unwrap_or(f64::INFINITY);
        let mut h = self.h.abs().min(h_max);
        loop {
            if self.steps >= self.control.max_steps {
                return Err(Error::TooManySteps { t: self.t });
            }
            self.steps += 1;
            let mut last = false;
            if h >= remaining * (1.0 - 1e-12) {
                h = remaining;
                last = true;
            }
            if h <= 1e-14 * self.t.abs().max(1.0) {
                return Err(if self.y[0] <= 0.0 || h_collapse(self.y[0]) {
                    Error::RadiusCollapse { t: self.t }
                } else {
                    Error::StepUnderflow { t: self.t }
                });
            }
            let hs = h * self.dir;
            match attempt(&mut self.rhs, self.t, &self.y, &self.f0, hs) {
                Ok((y1, k, err)) => {
                    let e = error_norm(&self.y, &y1, &err, self.control.tol);
                    if e <= 1.0 {
                        let factor = if e == 0.0 {
                            5.0
                        } else {
                            (0.9 * e.powf(-1.0 / 6.0)).clamp(0.2, 5.0)
                        };
                        let t_next = if last { t_stop } else { self.t + hs };
                        let mut k = k;
                        k[9] = dense_stage(&mut self.rhs, self.t, &self.y, &k, hs)?;
                        let step = Step {
                            t: self.t,
                            h: hs,
                            t_end: t_next,
                            y0: self.y,
                            y1,
                            k,
                        };
                        self.t = t_next;
                        self.y = y1;
                        self.f0 = k[8];
                        self.h = (h * factor).min(h_max);
                        return Ok(step);
                    }
                    h *= (0.9 * e.powf(-1.0 / 6.0)).clamp(0.1, 0.9);
                }
                Err(Error::NonPositiveRadius(_)) => h *= 0.25,
                Err(other) => return Err(other),
            }
        }
    }
}

fn h_collapse(r: f64) -> bool {
    r < 1e-8
}

// y1, the stage derivatives (dense stage left empty) and the embedded error
fn attempt<F>(
    rhs: &mut F,
    t: f64,
    y: &State,
    f0: &State,
    h: f64,
) -> Result<(State, [State; 10], State)>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let mut k = [[0.0; 2]; 10];
    k[0] = *f0;
    for i in 1..9 {
        let mut yi = *y;
        for j in 0..i {
            let a = A[i][j];
            if a != 0.0 {
                yi[0] += h * a * k[j][0];
                yi[1] += h * a * k[j][1];
            }
        }
        if !(yi[0] > 0.0) {
            return Err(Error::NonPositiveRadius(yi[0]));
        }
        k[i] = rhs(t + C[i] * h, &yi)?;
    }
    // the last stage sits at y1 itself
    let mut y1 = *y;
    let mut err = [0.0; 2];
    for j in 0..9 {
        y1[0] += h * B[j] * k[j][0];
        y1[1] += h * B[j] * k[j][1];
        let d = B[j] - B_LOW[j];
        err[0] += h * d * k[j][0];
        err[1] += h * d * k[j][1];
    }
    if !(y1[0] > 0.0) {
        return Err(Error::NonPositiveRadius(y1[0]));
    }
    if !(y1[0].is_finite() && y1[1].is_finite()) {
        return Err(Error::NonFinite("integration step"));
    }
    Ok((y1, k, err))
}

fn dense_stage<F>(rhs: &mut F, t: f64, y: &State, k: &[State; 10], h: f64) -> Result<State>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let mut yd = *y;
    for j in 0..9 {
        yd[0] += h * A_DENSE[j] * k[j][0];
        yd[1] += h * A_DENSE[j] * k[j][1];
    }
    rhs(t + C_DENSE * h, &yd)
}

fn error_norm(y0: &State, y1: &State, err: &State, tol: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..2 {
        let scale = tol * (1.0 + y0[i].abs().max(y1[i].abs()));
        acc += (err[i] / scale).powi(2);
    }
    (acc / 2.0).sqrt()
}

fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y0: &State,
    f0: &State,
    dir: f64,
    span: f64,
    control: &StepControl,
) -> Result<f64>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let scale = |i: usize| control.tol * (1.0 + y0[i].abs());
    let d0 = ((y0[0] / scale(0)).powi(2) + (y0[1] / scale(1)).powi(2)).sqrt();
    let d1 = ((f0[0] / scale(0)).powi(2) + (f0[1] / scale(1)).powi(2)).sqrt();
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0
        .min(span.max(f64::MIN_POSITIVE))
        .min(control.h_max.unwrap_or(f64::INFINITY));
    let y1 = [y0[0] + dir * h0 * f0[0], y0[1] + dir * h0 * f0[1]];
    if !(y1[0] > 0.0) {
        return Ok(h0 * 1e-3);
    }
    let f1 = rhs(t0 + dir * h0, &y1)?;
    let d2 =
        (((f1[0] - f0[0]) / scale(0)).powi(2) + ((f1[1] - f0[1]) / scale(1)).powi(2)).sqrt() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 6.0)
    };
    Ok((100.0 * h0).min(h1).min(span.max(f64::MIN_POSITIVE)))
}

/// Re-runs the sixth-order formula on a fixed grid of times without error
/// control. Used to difference nearby trajectories on identical steps.
pub fn replay<F>(mut rhs: F, grid: &[f64], y0: State) -> Result<State>
where
    F: FnMut(f64, &State) -> Result<State>,
{
    let mut y = y0;
    for w in grid.windows(2) {
        let f0 = rhs(w[0], &y)?;
        let (y1, _, _) = attempt(&mut rhs, w[0], &y, &f0, w[1] - w[0])?;
        y = y1;
    }
    Ok(y)
}
