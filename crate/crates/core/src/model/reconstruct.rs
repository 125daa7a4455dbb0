//! Recovery of the 3D motion `(r, θ, z)` from a radial trajectory.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

use super::{check_radius, instantaneous_energy, FieldModel, PhysParams, RadialState};

/// One sample of the reconstructed motion in cylindrical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FullState {
    pub t: f64,
    pub r: f64,
    pub theta: f64,
    pub z: f64,
    pub r_dot: f64,
    pub theta_dot: f64,
    pub z_dot: f64,
    /// Lorentz factor, equal to the instantaneous Hamiltonian.
    pub gamma: f64,
}

impl FullState {
    pub fn speed_squared(&self) -> f64 {
        self.r_dot * self.r_dot + (self.r * self.theta_dot).powi(2) + self.z_dot * self.z_dot
    }
}

/// Velocities from the momenta `γ·ṙ = pr`, `γ·r²θ̇ = L`, `γ·ż = pz − A`, and
/// `θ, z` by cumulative trapezoidal quadrature starting at zero.
pub fn reconstruct_full_motion(
    times: &[f64],
    states: &[RadialState],
    params: &PhysParams,
    field: &FieldModel,
) -> Result<Vec<FullState>> {
    if times.len() != states.len() {
        return Err(Error::InvalidParameter {
            name: "radial series",
            reason: "times and states differ in length",
        });
    }
    let m = params.field_scale();
    let mut out: Vec<FullState> = Vec::with_capacity(times.len());
    for (&t, s) in times.iter().zip(states) {
        check_radius(s.r)?;
        let h = instantaneous_energy(t, *s, params, field)?;
        let a = if params.modulation == 0.0 {
            0.0
        } else {
            field.modulation(t, s.r, params)?.0
        };
        let kin =
            params.axial_momentum + m * (params.base_current * s.r.ln() + params.modulation * a);
        let mut fs = FullState {
            t,
            r: s.r,
            theta: 0.0,
            z: 0.0,
            r_dot: s.pr / h,
            theta_dot: params.angular_momentum / (s.r * s.r * h),
            z_dot: kin / h,
            gamma: h,
        };
        let v2 = fs.speed_squared();
        if !(v2 < 1.0) {
            return Err(Error::Superluminal(v2.sqrt()));
        }
        if let Some(prev) = out.last() {
            let dt = t - prev.t;
            fs.theta = prev.theta + 0.5 * dt * (prev.theta_dot + fs.theta_dot);
            fs.z = prev.z + 0.5 * dt * (prev.z_dot + fs.z_dot);
        }
        out.push(fs);
    }
    Ok(out)
}
