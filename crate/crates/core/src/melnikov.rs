//! Melnikov functions of the resonant unperturbed orbits.
//!
//! For the orbit `Γ_n` of period `n·T1` the wedge `F1·G2 − F2·G1` is a
//! smooth `n·T1`-periodic function of time, so
//!
//! ```text
//! M_n(t0) = ∫_0^{nT1} W(t)·sin(ω1(t − t0)) dt = (nT1/2)·(b·cos ω1t0 − a·sin ω1t0)
//! ```
//!
//! where `a`, `b` are its Fourier coefficients at frequency `ω1`. Uniform
//! samples and the trapezoid rule integrate such data spectrally.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::integrator::{integrate, OrbitSample, Trajectory};
use crate::model::{
    axial_kinetic, coefficient_factors, hamiltonian, vector_field, FieldModel, PhysParams,
    RadialState,
};
use crate::periodmap::PeriodMap;

const FIRST_SAMPLES: usize = 4096;
const MAX_SAMPLES: usize = 1 << 20;
const ORBIT_TOL: f64 = 1e-12;

/// Where on the section the resonant orbit starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPoint {
    Outer,
    Inner,
}

/// Unperturbed closed orbit of period `n·T1`.
#[derive(Debug, Clone)]
pub struct ResonantOrbit {
    pub n: usize,
    pub energy: f64,
    pub period: f64,
    pub start: RadialState,
    trajectory: Trajectory,
}

impl ResonantOrbit {
    /// `Γ_n(t)` for any `t`, reduced modulo the period.
    pub fn state_at(&self, t: f64) -> Result<RadialState> {
        let s = t - self.period * (t / self.period).floor();
        self.trajectory.eval(s.min(self.period))
    }

    /// `|Γ_n(nT1) − Γ_n(0)|`.
    pub fn closure_residual(&self) -> f64 {
        self.trajectory.end().distance(&self.start)
    }

    /// `m` samples uniform in time over one period, end point excluded.
    pub fn sample(&self, m: usize) -> Result<OrbitSample> {
        let mut s = self.trajectory.uniform(m)?;
        s.period = Some(self.period);
        Ok(s)
    }

    pub fn trajectory(&self) -> &Trajectory {
        &self.trajectory
    }
}

/// The closed unperturbed orbit with `T(H_n) = n·T1` starting at `(r_b, 0)`.
pub fn resonant_orbit(n: usize, params: &PhysParams) -> Result<ResonantOrbit> {
    resonant_orbit_from(n, params, StartPoint::Outer)
}

pub fn resonant_orbit_from(
    n: usize,
    params: &PhysParams,
    start: StartPoint,
) -> Result<ResonantOrbit> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "resonance order must be at least 1",
        });
    }
    let unperturbed = params.with_modulation(0.0);
    let mut map = PeriodMap::new(&unperturbed)?;
    map.quad_tol = 1e-13;
    let period = n as f64 * params.drive_period;
    let energy = map.invert_period(period)?;
    let tp = map.turning_points(energy)?;
    let r0 = match start {
        StartPoint::Outer => tp.r_b,
        StartPoint::Inner => tp.r_a,
    };
    let start = RadialState { r: r0, pr: 0.0 };
    let trajectory = integrate(
        start,
        0.0,
        period,
        &unperturbed,
        &FieldModel::Constant,
        ORBIT_TOL,
    )?;
    Ok(ResonantOrbit {
        n,
        energy,
        period,
        start,
        trajectory,
    })
}

/// `F1·G2 − F2·G1` for the sine profile `D` of `field`, in closed form.
pub fn wedge_integrand(state: RadialState, params: &PhysParams, field: &FieldModel) -> Result<f64> {
    Ok(wedge_pair(state, params, field)?[0])
}

/// Wedge values for the sine and the cosine profile.
pub fn wedge_pair(state: RadialState, params: &PhysParams, field: &FieldModel) -> Result<[f64; 2]> {
    let [(d, dd), (e, de)] = field.harmonic_profiles(state.r, params)?;
    Ok([
        wedge_closed_form(state, params, d, dd)?,
        wedge_closed_form(state, params, e, de)?,
    ])
}

/// `−[m²·I0·D/r + m·(pz + m·I0·ln r)·D']·pr/H²` with `m = μ0/2π`.
pub fn wedge_closed_form(state: RadialState, params: &PhysParams, d: f64, dd: f64) -> Result<f64> {
    let h = hamiltonian(state, params)?;
    let m = params.field_scale();
    let c = params.coupling();
    let p = axial_kinetic(state.r, params);
    Ok(-m * (c * d / state.r + p * dd) * state.pr / (h * h))
}

/// The same wedge assembled from the vector field and the first-order
/// coefficients.
pub fn wedge_assembled(state: RadialState, params: &PhysParams, d: f64, dd: f64) -> Result<f64> {
    let unperturbed = params.with_modulation(0.0);
    let (f1, f2) = vector_field(0.0, state, &unperturbed, &FieldModel::Constant)?;
    let (g1, g2) = coefficient_factors(state, params, d, dd)?;
    Ok(f1 * g2 - f2 * g1)
}

/// Fourier data of `M_n` and its zero set.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MelnikovResult {
    pub n: usize,
    #[cfg_attr(feature = "serde", serde(rename = "H_n"))]
    pub h_n: f64,
    /// Cosine coefficient at `ω1` (sine and folded-in cosine profile).
    pub a: f64,
    /// Sine coefficient at `ω1`.
    pub b: f64,
    /// `(nT1/2)·√(a² + b²)`.
    pub amplitude: f64,
    /// `φ` with `sin φ ∝ b`, `cos φ ∝ −a`.
    pub phase: f64,
    /// Zeros of `M_n` in `[0, nT1)`.
    pub zeros: Vec<f64>,
    pub simple: bool,
}

impl MelnikovResult {
    /// `M_n(t0)` from the closed form.
    pub fn eval(&self, t0: f64, omega1: f64) -> f64 {
        let (s, c) = (omega1 * t0).sin_cos();
        let half = self.amplitude / (self.a.hypot(self.b)).max(f64::MIN_POSITIVE);
        half * (self.b * c - self.a * s)
    }
}

/// Resonant orbit plus uniformly sampled wedge values, shared by all `t0`.
#[derive(Debug, Clone)]
pub struct Melnikov {
    orbit: ResonantOrbit,
    params: PhysParams,
    times: Vec<f64>,
    wedge: Vec<[f64; 2]>,
}

impl Melnikov {
    /// Samples the wedge on the resonant orbit, doubling the sample count
    /// until the Fourier pair is stable to `1e-9` relative.
    pub fn new(n: usize, params: &PhysParams, field: &FieldModel) -> Result<Self> {
        Self::with_orbit(resonant_orbit(n, params)?, params, field)
    }

    pub fn with_orbit(
        orbit: ResonantOrbit,
        params: &PhysParams,
        field: &FieldModel,
    ) -> Result<Self> {
        field.check(params)?;
        let mut m = FIRST_SAMPLES;
        let mut current = Self::sampled(&orbit, params, field, m)?;
        loop {
            let next = Self::sampled(&orbit, params, field, 2 * m)?;
            let (a0, b0) = current.coefficients();
            let (a1, b1) = next.coefficients();
            let scale = a1.hypot(b1).max(1e-10 * next.l2_scale());
            if (a1 - a0).hypot(b1 - b0) <= 1e-9 * scale {
                return Ok(next);
            }
            m *= 2;
            if m >= MAX_SAMPLES {
                return Err(Error::Quadrature {
                    spread: (a1 - a0).hypot(b1 - b0),
                });
            }
            current = next;
        }
    }

    fn sampled(
        orbit: &ResonantOrbit,
        params: &PhysParams,
        field: &FieldModel,
        m: usize,
    ) -> Result<Self> {
        let sample = orbit.sample(m)?;
        let wedge = sample
            .states
            .iter()
            .map(|s| wedge_pair(*s, params, field))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            orbit: orbit.clone(),
            params: *params,
            times: sample.times,
            wedge,
        })
    }

    pub fn orbit(&self) -> &ResonantOrbit {
        &self.orbit
    }

    pub fn samples(&self) -> usize {
        self.times.len()
    }

    /// `(t_j, W_D(t_j), W_E(t_j))`.
    pub fn wedge_samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.times
            .iter()
            .zip(&self.wedge)
            .map(|(t, w)| (*t, w[0], w[1]))
    }

    fn omega1(&self) -> f64 {
        self.params.omega1()
    }

    /// Effective `(a, b)` with the cosine profile folded in.
    pub fn coefficients(&self) -> (f64, f64) {
        let w = self.omega1();
        let scale = 2.0 / self.times.len() as f64;
        let (mut ad, mut bd, mut ae, mut be) = (0.0, 0.0, 0.0, 0.0);
        for (t, v) in self.times.iter().zip(&self.wedge) {
            let (s, c) = (w * t).sin_cos();
            ad += v[0] * c;
            bd += v[0] * s;
            ae += v[1] * c;
            be += v[1] * s;
        }
        // ∫W_E·cos(ω1(t − t0)) = (nT1/2)·(a_E·cos ω1t0 + b_E·sin ω1t0)
        ((ad - be) * scale, (bd + ae) * scale)
    }

    /// `∫|W|` scale of the integrand: `nT1·rms(W)`.
    pub fn l2_scale(&self) -> f64 {
        let n = self.times.len() as f64;
        let ms = self
            .wedge
            .iter()
            .map(|v| v[0] * v[0] + v[1] * v[1])
            .sum::<f64>()
            / n;
        self.orbit.period * ms.sqrt()
    }

    /// Direct trapezoidal evaluation of `M_n(t0)`.
    pub fn value(&self, t0: f64) -> f64 {
        let w = self.omega1();
        let dt = self.orbit.period / self.times.len() as f64;
        self.times
            .iter()
            .zip(&self.wedge)
            .map(|(t, v)| {
                let (s, c) = (w * (t - t0)).sin_cos();
                v[0] * s + v[1] * c
            })
            .sum::<f64>()
            * dt
    }

    pub fn result(&self) -> MelnikovResult {
        let (a, b) = self.coefficients();
        let n = self.orbit.n;
        let norm = a.hypot(b);
        let amplitude = 0.5 * self.orbit.period * norm;
        let phase = b.atan2(-a);
        let simple = amplitude > 1e-10 * self.l2_scale();
        let w = self.omega1();
        let mut zeros = Vec::new();
        if simple {
            let k_min = (phase / PI).ceil() as i64 - 1;
            for k in k_min..k_min + 2 * n as i64 + 3 {
                let t0 = (k as f64 * PI - phase) / w;
                if t0 >= 0.0 && t0 < self.orbit.period {
                    zeros.push(t0);
                }
            }
        }
        MelnikovResult {
            n,
            h_n: self.orbit.energy,
            a,
            b,
            amplitude,
            phase,
            zeros,
            simple,
        }
    }
}

pub fn melnikov_value(n: usize, t0: f64, params: &PhysParams, field: &FieldModel) -> Result<f64> {
    Ok(Melnikov::new(n, params, field)?.value(t0))
}

pub fn melnikov_fourier(
    n: usize,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<MelnikovResult> {
    Ok(Melnikov::new(n, params, field)?.result())
}

/// Least-squares fit `v ≈ C + A·sin(ωt) + B·cos(ωt)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    pub sin: f64,
    pub cos: f64,
    /// Largest absolute residual.
    pub max_residual: f64,
}

impl SinusoidFit {
    pub fn amplitude(&self) -> f64 {
        self.sin.hypot(self.cos)
    }
}

pub fn fit_sinusoid(times: &[f64], values: &[f64], omega: f64) -> Result<SinusoidFit> {
    if times.len() != values.len() || times.len() < 3 {
        return Err(Error::InvalidParameter {
            name: "sinusoid fit",
            reason: "need at least three paired samples",
        });
    }
    let mut ata = [[0.0f64; 3]; 3];
    let mut atb = [0.0f64; 3];
    for (&t, &v) in times.iter().zip(values) {
        let (s, c) = (omega * t).sin_cos();
        let row = [1.0, s, c];
        for i in 0..3 {
            atb[i] += row[i] * v;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let x = solve3(ata, atb).ok_or(Error::InvalidParameter {
        name: "sinusoid fit",
        reason: "sample times do not resolve the frequency",
    })?;
    let max_residual = times
        .iter()
        .zip(values)
        .map(|(&t, &v)| {
            let (s, c) = (omega * t).sin_cos();
            (v - x[0] - x[1] * s - x[2] * c).abs()
        })
        .fold(0.0, f64::max);
    Ok(SinusoidFit {
        offset: x[0],
        sin: x[1],
        cos: x[2],
        max_residual,
    })
}

// Gaussian elimination with partial pivoting
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = b[i];
        for k in i + 1..3 {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Profile;

    fn params() -> PhysParams {
        PhysParams::canonical()
    }

    #[test]
    fn resonant_orbit_closes() {
        let orbit = resonant_orbit(1, &params()).unwrap();
        assert!(
            orbit.closure_residual() <= 1e-9,
            "{}",
            orbit.closure_residual()
        );
        assert!(resonant_orbit(1, &params().with_drive_period(6.0)).is_err());
        let e: Vec<f64> = (1..=3)
            .map(|n| resonant_orbit(n, &params()).unwrap().energy)
            .collect();
        assert!(e[0] < e[1] && e[1] < e[2]);
    }

    #[test]
    fn wedge_closed_form_matches_assembly() {
        let p = params();
        let field = FieldModel::retarded_sine();
        let mut seed = 12345u64;
        let mut next = || {
            seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..100 {
            let s = RadialState {
                r: 0.2 + 4.0 * next(),
                pr: 4.0 * next() - 2.0,
            };
            let [(d, dd), _] = field.harmonic_profiles(s.r, &p).unwrap();
            let closed = wedge_closed_form(s, &p, d, dd).unwrap();
            let assembled = wedge_assembled(s, &p, d, dd).unwrap();
            assert!((closed - assembled).abs() <= 1e-10 * (1.0 + closed.abs()));
            let flipped = wedge_closed_form(RadialState { pr: -s.pr, ..s }, &p, d, dd).unwrap();
            assert_eq!(flipped, -closed);
        }
        assert_eq!(
            wedge_integrand(RadialState { r: 1.3, pr: 0.0 }, &p, &field).unwrap(),
            0.0
        );
    }

    #[test]
    fn melnikov_is_a_sinusoid_with_2n_zeros() {
        let p = params();
        let field = FieldModel::sine_ansatz();
        for n in 1..=2 {
            let mel = Melnikov::new(n, &p, &field).unwrap();
            let res = mel.result();
            assert!(res.simple);
            assert_eq!(res.zeros.len(), 2 * n);
            for w in res.zeros.windows(2) {
                assert!((w[1] - w[0] - 0.5 * p.drive_period).abs() < 1e-9);
            }
            for &z in &res.zeros {
                assert!(mel.value(z).abs() <= 1e-8 * res.amplitude);
            }
            for j in 0..16 {
                let t0 = 0.37 * j as f64;
                let direct = mel.value(t0);
                assert!((direct - res.eval(t0, p.omega1())).abs() <= 1e-9 * res.amplitude);
                assert!((mel.value(t0 + p.drive_period) - direct).abs() <= 1e-10 * res.amplitude);
            }
        }
    }

    #[test]
    fn only_the_resonant_mode_contributes() {
        let p = params();
        let mel = Melnikov::new(2, &p, &FieldModel::sine_ansatz()).unwrap();
        let res = mel.result();
        let w = p.omega1();
        let samples: Vec<(f64, f64, f64)> = mel.wedge_samples().collect();
        let dt = mel.orbit().period / samples.len() as f64;
        for j in 0..8 {
            let t0 = 1.7 * j as f64;
            // the wedge replaced by its projection onto cos/sin(ω1 t)
            let projected: f64 = samples
                .iter()
                .map(|&(t, _, _)| {
                    (res.a * (w * t).cos() + res.b * (w * t).sin()) * (w * (t - t0)).sin()
                })
                .sum::<f64>()
                * dt;
            assert!((projected - mel.value(t0)).abs() <= 1e-9 * res.amplitude);
        }
    }

    #[test]
    fn cosine_profile_shifts_phase_only() {
        let p = params();
        let sine_only = FieldModel::Harmonic {
            sine: Profile::CylinderSine,
            cosine: Profile::Zero,
        };
        let cosine_only = FieldModel::Harmonic {
            sine: Profile::Zero,
            cosine: Profile::CylinderSine,
        };
        let a = Melnikov::new(1, &p, &sine_only).unwrap().result();
        let b = Melnikov::new(1, &p, &cosine_only).unwrap().result();
        // cos(ω1(t − t0)) = sin(ω1(t − t0 + T1/4)), so M_E(t0) = M_D(t0 − T1/4)
        assert!((a.amplitude - b.amplitude).abs() < 1e-10 * a.amplitude);
        let shift = (a.phase - b.phase).rem_euclid(2.0 * PI);
        assert!((shift - 0.5 * PI).abs() < 1e-9, "{shift}");
    }

    #[test]
    fn amplitude_does_not_depend_on_start_point() {
        let p = params();
        let field = FieldModel::sine_ansatz();
        let outer = Melnikov::with_orbit(
            resonant_orbit_from(2, &p, StartPoint::Outer).unwrap(),
            &p,
            &field,
        )
        .unwrap();
        let inner = Melnikov::with_orbit(
            resonant_orbit_from(2, &p, StartPoint::Inner).unwrap(),
            &p,
            &field,
        )
        .unwrap();
        let (ro, ri) = (outer.result(), inner.result());
        assert!((ro.amplitude - ri.amplitude).abs() <= 1e-9 * ro.amplitude);
    }

    #[test]
    fn sinusoid_fit_recovers_coefficients() {
        let w = 0.9;
        let t: Vec<f64> = (0..64).map(|i| 0.1 * i as f64).collect();
        let v: Vec<f64> = t
            .iter()
            .map(|&x| 0.5 + 2.0 * (w * x).sin() - 1.5 * (w * x).cos())
            .collect();
        let fit = fit_sinusoid(&t, &v, w).unwrap();
        assert!(
            (fit.offset - 0.5).abs() < 1e-12
                && (fit.sin - 2.0).abs() < 1e-12
                && (fit.cos + 1.5).abs() < 1e-12
        );
        assert!(fit.max_residual < 1e-12);
    }
}
