//! Physical parameters, the reduced Hamiltonian system and its equilibrium.
//!
//! With `m = μ0/2π` and `c = m·I0` the vector potential is
//! `A(t, r) = −m·(I0·ln r + k·a(t, r))` and the reduced Hamiltonian is
//!
//! ```text
//! H = √(1 + (pz − A)² + pr² + L²/r²)
//! ```
//!
//! so that `ṙ = pr/H` and `ṗr = (L²/r³ + (pz − A)·∂r A)/H`.

mod field;
mod reconstruct;

use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

pub use field::{FieldModel, Profile};
pub use reconstruct::{reconstruct_full_motion, FullState};

use crate::error::{Error, Result};
use crate::roots::{bracket_increasing, newton_bisect};

/// Physical constants and conserved momenta.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PhysParams {
    /// Steady current `I0`.
    #[cfg_attr(feature = "serde", serde(rename = "I0"))]
    pub base_current: f64,
    /// Modulation amplitude `k`.
    #[cfg_attr(feature = "serde", serde(rename = "k"))]
    pub modulation: f64,
    /// Driving period `T1`.
    #[cfg_attr(feature = "serde", serde(rename = "T1"))]
    pub drive_period: f64,
    #[cfg_attr(feature = "serde", serde(rename = "mu0"))]
    pub mu0: f64,
    /// Angular momentum `L`.
    #[cfg_attr(feature = "serde", serde(rename = "L"))]
    pub angular_momentum: f64,
    /// Axial momentum `pz`.
    #[cfg_attr(feature = "serde", serde(rename = "pz"))]
    pub axial_momentum: f64,
}

impl Default for PhysParams {
    fn default() -> Self {
        Self::canonical()
    }
}

impl PhysParams {
    /// `μ0 = 2π, I0 = 1, L = 1, pz = 1, T1 = 7, k = 0`: equilibrium at `r = 1`.
    pub fn canonical() -> Self {
        Self {
            base_current: 1.0,
            modulation: 0.0,
            drive_period: 7.0,
            mu0: 2.0 * PI,
            angular_momentum: 1.0,
            axial_momentum: 1.0,
        }
    }

    pub fn new(
        base_current: f64,
        modulation: f64,
        drive_period: f64,
        mu0: f64,
        angular_momentum: f64,
        axial_momentum: f64,
    ) -> Result<Self> {
        let p = Self {
            base_current,
            modulation,
            drive_period,
            mu0,
            angular_momentum,
            axial_momentum,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let checks: [(&'static str, f64, bool, &'static str); 6] = [
            (
                "I0",
                self.base_current,
                self.base_current > 0.0,
                "must be positive",
            ),
            (
                "k",
                self.modulation,
                self.modulation >= 0.0,
                "must be non-negative",
            ),
            (
                "T1",
                self.drive_period,
                self.drive_period > 0.0,
                "must be positive",
            ),
            ("mu0", self.mu0, self.mu0 > 0.0, "must be positive"),
            (
                "L",
                self.angular_momentum,
                self.angular_momentum > 0.0,
                "must be positive",
            ),
            ("pz", self.axial_momentum, true, ""),
        ];
        for (name, value, ok, reason) in checks {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: "must be finite",
                });
            }
            if !ok {
                return Err(Error::InvalidParameter { name, reason });
            }
        }
        Ok(())
    }

    pub fn omega1(&self) -> f64 {
        2.0 * PI / self.drive_period
    }

    /// `μ0/2π`.
    pub fn field_scale(&self) -> f64 {
        self.mu0 / (2.0 * PI)
    }

    /// `c = μ0·I0/2π`.
    pub fn coupling(&self) -> f64 {
        self.field_scale() * self.base_current
    }

    pub fn with_modulation(&self, k: f64) -> Self {
        Self {
            modulation: k,
            ..*self
        }
    }

    pub fn with_drive_period(&self, t1: f64) -> Self {
        Self {
            drive_period: t1,
            ..*self
        }
    }
}

/// Constants of the substituted form of the monotonicity argument.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DerivedParams {
    pub c: f64,
    /// `I = c²`.
    pub i_sub: f64,
    /// `K = L²·exp(2·pz/c)`.
    pub k_sub: f64,
    /// Root of `K = I·x0²·ln x0` with `x0 > 1`.
    pub x0: f64,
    /// `ln x0`.
    pub a_sub: f64,
}

pub fn derived_constants(params: &PhysParams) -> Result<DerivedParams> {
    params.validate()?;
    let c = params.coupling();
    let i_sub = c * c;
    let ln_k = 2.0 * params.angular_momentum.ln() + 2.0 * params.axial_momentum / c;
    let target = ln_k - i_sub.ln();
    // ln I + 2a + ln a = ln K with a = ln x0 = e^b, increasing in b
    let psi = |b: f64| 2.0 * b.exp() + b - target;
    let (lo, hi) = bracket_increasing(psi, 0.0, 1.0)?;
    let b = if lo == hi {
        lo
    } else {
        newton_bisect(|b| (psi(b), 2.0 * b.exp() + 1.0), lo, hi, 1e-16, 200)?
    };
    let a_sub = b.exp();
    if !(a_sub > 0.0 && a_sub.is_finite()) {
        return Err(Error::Bracketing(
            "no root x0 > 1 of the substitution relation",
        ));
    }
    let x0 = a_sub.exp();
    Ok(DerivedParams {
        c,
        i_sub,
        k_sub: ln_k.exp(),
        x0,
        a_sub,
    })
}

/// Phase point `(r, p_r)` of the reduced system.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialState {
    pub r: f64,
    pub pr: f64,
}

impl RadialState {
    pub fn new(r: f64, pr: f64) -> Result<Self> {
        check_radius(r)?;
        if !pr.is_finite() {
            return Err(Error::NonFinite("radial momentum"));
        }
        Ok(Self { r, pr })
    }

    pub fn distance(&self, other: &RadialState) -> f64 {
        (self.r - other.r).hypot(self.pr - other.pr)
    }
}

/// `pz + c·ln r`, the axial kinetic momentum of the unperturbed system.
pub fn axial_kinetic(r: f64, params: &PhysParams) -> f64 {
    params.axial_momentum + params.coupling() * r.ln()
}

/// Unperturbed Hamiltonian `√(1 + (pz + c·ln r)² + pr² + L²/r²)`.
pub fn hamiltonian(state: RadialState, params: &PhysParams) -> Result<f64> {
    check_radius(state.r)?;
    let p = axial_kinetic(state.r, params);
    let l = params.angular_momentum / state.r;
    Ok((1.0 + p * p + state.pr * state.pr + l * l).sqrt())
}

/// Instantaneous Hamiltonian of the modulated system.
pub fn instantaneous_energy(
    t: f64,
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<f64> {
    check_radius(state.r)?;
    let (kin, _) = kinetic_and_gradient(t, state.r, params, field)?;
    let l = params.angular_momentum / state.r;
    Ok((1.0 + kin * kin + state.pr * state.pr + l * l).sqrt())
}

// (pz − A, ∂r A) with the full potential
fn kinetic_and_gradient(
    t: f64,
    r: f64,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<(f64, f64)> {
    let m = params.field_scale();
    let k = params.modulation;
    let (a, ar) = if k == 0.0 {
        (0.0, 0.0)
    } else {
        field.modulation(t, r, params)?
    };
    let kin = axial_kinetic(r, params) + m * k * a;
    let grad = -m * (params.base_current / r + k * ar);
    Ok((kin, grad))
}

/// Right-hand side `(ṙ, ṗr)` of the reduced system with the full potential.
pub fn vector_field(
    t: f64,
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<(f64, f64)> {
    check_radius(state.r)?;
    let r = state.r;
    let (kin, grad) = kinetic_and_gradient(t, r, params, field)?;
    let l2 = params.angular_momentum * params.angular_momentum;
    let h = (1.0 + kin * kin + state.pr * state.pr + l2 / (r * r)).sqrt();
    let out = (state.pr / h, (l2 / (r * r * r) + kin * grad) / h);
    if !(out.0.is_finite() && out.1.is_finite()) {
        return Err(Error::NonFinite("vector field"));
    }
    Ok(out)
}

/// First-order coefficients `(G1, G2)` of the vector field in `k` for a
/// modulation with value `a` and radial derivative `a_r` at `state.r`.
pub fn coefficient_factors(
    state: RadialState,
    params: &PhysParams,
    a: f64,
    a_r: f64,
) -> Result<(f64, f64)> {
    check_radius(state.r)?;
    let r = state.r;
    let m = params.field_scale();
    let c = params.coupling();
    let p = axial_kinetic(r, params);
    let h = hamiltonian(state, params)?;
    let h3 = h * h * h;
    let l2 = params.angular_momentum * params.angular_momentum;
    let numerator = l2 / (r * r * r) - c * p / r;
    let g1 = -m * state.pr * p * a / h3;
    let g2 = -m * (c * a / r + p * a_r) / h - numerator * m * p * a / h3;
    Ok((g1, g2))
}

/// `(∂F1/∂k, ∂F2/∂k)` at `k = 0`.
pub fn perturbation_coefficients(
    t: f64,
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<(f64, f64)> {
    check_radius(state.r)?;
    let (a, ar) = field.modulation(t, state.r, params)?;
    coefficient_factors(state, params, a, ar)
}

/// Pure-profile factors: `[(G1, G2) of the sine profile, (G1, G2) of the cosine profile]`.
pub fn harmonic_factors(
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
) -> Result<[(f64, f64); 2]> {
    let [(d, dd), (e, de)] = field.harmonic_profiles(state.r, params)?;
    Ok([
        coefficient_factors(state, params, d, dd)?,
        coefficient_factors(state, params, e, de)?,
    ])
}

/// The center of the unperturbed system.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Equilibrium {
    pub r_bar: f64,
    #[cfg_attr(feature = "serde", serde(rename = "H0"))]
    pub h0: f64,
    pub omega_lin: f64,
    /// `2π/ω_lin`, the minimal period of the unperturbed orbits.
    #[cfg_attr(feature = "serde", serde(rename = "T0_lin"))]
    pub t0_lin: f64,
    /// The closed-form minimal period stated alongside the monotonicity
    /// argument; `None` when its radicand is not positive.
    #[cfg_attr(feature = "serde", serde(rename = "T0_lemma3"))]
    pub t0_lemma3: Option<f64>,
}

/// Solves `pz + c·ln r̄ = (L²/c)·r̄⁻²` in `w = ln r̄`.
pub fn equilibrium(params: &PhysParams) -> Result<Equilibrium> {
    params.validate()?;
    let c = params.coupling();
    let pz = params.axial_momentum;
    let l2 = params.angular_momentum * params.angular_momentum;
    let phi = |w: f64| pz + c * w - l2 / c * (-2.0 * w).exp();
    let dphi = |w: f64| c + 2.0 * l2 / c * (-2.0 * w).exp();
    let (lo, hi) = bracket_increasing(phi, 0.0, 1.0)?;
    let w = if lo == hi {
        lo
    } else {
        newton_bisect(|w| (phi(w), dphi(w)), lo, hi, 1e-16, 200)?
    };
    let r_bar = w.exp();
    let p = axial_kinetic(r_bar, params);
    let rhs = l2 / (c * r_bar * r_bar);
    let residual = (p - rhs).abs() / p.abs().max(rhs).max(pz.abs());
    if !(residual <= 1e-12) {
        return Err(Error::NoConvergence("equilibrium residual above 1e-12"));
    }
    let h0 = (1.0 + p * p + l2 / (r_bar * r_bar)).sqrt();
    let curvature = c * c / (r_bar * r_bar) + 2.0 * l2 / r_bar.powi(4);
    let omega_lin = curvature.sqrt() / h0;
    Ok(Equilibrium {
        r_bar,
        h0,
        omega_lin,
        t0_lin: 2.0 * PI / omega_lin,
        t0_lemma3: display_period(params, r_bar, h0),
    })
}

// verbatim: √(2π²H0² / ((c − pz − c·ln r̄)·c·r̄⁻² + 3L²r̄⁻⁴))
fn display_period(params: &PhysParams, r_bar: f64, h0: f64) -> Option<f64> {
    let c = params.coupling();
    let l2 = params.angular_momentum * params.angular_momentum;
    let denom = (c - params.axial_momentum - c * r_bar.ln()) * c / (r_bar * r_bar)
        + 3.0 * l2 / r_bar.powi(4);
    (denom > 0.0).then(|| (2.0 * PI * PI * h0 * h0 / denom).sqrt())
}

pub(crate) fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    fn st(r: f64, pr: f64) -> RadialState {
        RadialState { r, pr }
    }

    #[test]
    fn derived_constants_examples() {
        let d = derived_constants(&PhysParams::canonical()).unwrap();
        assert!((d.c - 1.0).abs() < 1e-15);
        assert!((d.i_sub - 1.0).abs() < 1e-15);
        assert!((d.k_sub - E * E).abs() < 1e-13);

        let p = PhysParams {
            angular_momentum: E,
            axial_momentum: 0.0,
            ..PhysParams::canonical()
        };
        let d = derived_constants(&p).unwrap();
        assert!((d.x0 - E).abs() < 1e-13);
        assert!((d.a_sub - 1.0).abs() < 1e-14);

        let p = PhysParams {
            base_current: 2.0,
            axial_momentum: 0.0,
            ..PhysParams::canonical()
        };
        let d = derived_constants(&p).unwrap();
        assert!((d.c - 2.0).abs() < 1e-15);
        // independent bisection on 4x²ln x = 1
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if 4.0 * mid * mid * mid.ln() > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((d.x0 - lo).abs() < 1e-12);
        let rel = (d.i_sub * d.x0 * d.x0 * d.x0.ln() - d.k_sub) / d.k_sub;
        assert!(rel.abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_examples() {
        let p = PhysParams::canonical();
        assert!((hamiltonian(st(1.0, 0.0), &p).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((hamiltonian(st(1.0, 1.0), &p).unwrap() - 2.0).abs() < 1e-15);
        assert!(hamiltonian(st(0.0, 1.0), &p).is_err());
        assert!(hamiltonian(st(-1.0, 1.0), &p).is_err());
    }

    #[test]
    fn vector_field_examples() {
        let p = PhysParams::canonical();
        let f = FieldModel::Constant;
        assert_eq!(vector_field(0.0, st(1.0, 0.0), &p, &f).unwrap(), (0.0, 0.0));
        let (a, b) = vector_field(0.0, st(1.0, 1.0), &p, &f).unwrap();
        assert!((a - 0.5).abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = vector_field(0.0, st(E, 0.0), &p, &f).unwrap();
        // (e⁻³ − 2/e)/√(5 + e⁻²)
        let expected = ((-3.0f64).exp() - 2.0 / E) / (5.0 + (-2.0f64).exp()).sqrt();
        assert_eq!(a, 0.0);
        assert!((b - expected).abs() < 1e-15);
        assert!((b + 0.302707).abs() < 5e-7);
    }

    #[test]
    fn vector_field_matches_hamiltonian_gradient() {
        let p = PhysParams {
            axial_momentum: -0.4,
            base_current: 1.7,
            ..PhysParams::canonical()
        };
        let h = 1e-6;
        for &(r, pr) in &[(0.5, 0.3), (2.0, -1.0), (1.2, 0.0)] {
            let (rd, prd) = vector_field(0.0, st(r, pr), &p, &FieldModel::Constant).unwrap();
            let dh_dpr = (hamiltonian(st(r, pr + h), &p).unwrap()
                - hamiltonian(st(r, pr - h), &p).unwrap())
                / (2.0 * h);
            let dh_dr = (hamiltonian(st(r + h, pr), &p).unwrap()
                - hamiltonian(st(r - h, pr), &p).unwrap())
                / (2.0 * h);
            assert!((rd - dh_dpr).abs() < 1e-9);
            assert!((prd + dh_dr).abs() < 1e-9);
        }
    }

    #[test]
    fn perturbation_coefficient_spot_value() {
        // D ≡ 1, D' = 0, t = T1/4; the bracket L²r⁻³ − c·P/r vanishes at the center
        let p = PhysParams::canonical();
        let f = FieldModel::Harmonic {
            sine: Profile::Constant(1.0),
            cosine: Profile::Zero,
        };
        let (g1, g2) =
            perturbation_coefficients(p.drive_period / 4.0, st(1.0, 0.0), &p, &f).unwrap();
        assert_eq!(g1, 0.0);
        assert!((g2 + 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_examples() {
        let e = equilibrium(&PhysParams::canonical()).unwrap();
        assert_eq!(e.r_bar, 1.0);
        assert!((e.h0 - 3f64.sqrt()).abs() < 1e-15);
        assert!((e.t0_lin - 2.0 * PI).abs() < 1e-14);
        assert!((e.t0_lemma3.unwrap() - PI * 2f64.sqrt()).abs() < 1e-14);

        let p = PhysParams {
            angular_momentum: E,
            axial_momentum: 0.0,
            ..PhysParams::canonical()
        };
        assert!((equilibrium(&p).unwrap().r_bar - E).abs() < 1e-14);

        let p = PhysParams {
            axial_momentum: 0.0,
            ..PhysParams::canonical()
        };
        let r = equilibrium(&p).unwrap().r_bar;
        assert!((r * r * r.ln() - 1.0).abs() < 1e-13);
        assert!((r - 1.5316).abs() < 1e-4);
    }

    #[test]
    fn display_period_denominator_matches_linearization() {
        // both are c²r̄⁻² + 2L²r̄⁻⁴ once the equilibrium relation is used
        for &(i0, l, pz) in &[(1.0, 1.0, 1.0), (2.0, 0.7, -0.3), (0.5, 3.0, 2.0)] {
            let p = PhysParams {
                base_current: i0,
                angular_momentum: l,
                axial_momentum: pz,
                ..PhysParams::canonical()
            };
            let e = equilibrium(&p).unwrap();
            let ratio = e.t0_lin / e.t0_lemma3.unwrap();
            assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let bad = [
            PhysParams {
                angular_momentum: 0.0,
                ..PhysParams::canonical()
            },
            PhysParams {
                base_current: -1.0,
                ..PhysParams::canonical()
            },
            PhysParams {
                drive_period: 0.0,
                ..PhysParams::canonical()
            },
            PhysParams {
                modulation: -1e-3,
                ..PhysParams::canonical()
            },
            PhysParams {
                axial_momentum: f64::NAN,
                ..PhysParams::canonical()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err());
            assert!(equilibrium(&p).is_err());
        }
        assert!(PhysParams::new(1.0, 0.0, 7.0, 2.0 * PI, 0.0, 1.0).is_err());
    }

    #[test]
    fn omega_times_period_is_two_pi() {
        for &t1 in &[0.3, 7.0, 123.456] {
            let p = PhysParams::canonical().with_drive_period(t1);
            assert!((p.omega1() * p.drive_period - 2.0 * PI).abs() < 1e-14);
        }
    }
}
