//! Vector potential of the wire.
//!
//! The steady part is `a0(r) = I0·ln r`. The modulation part is the retarded
//! integral
//!
//! ```text
//! a(t, r) = ∫_r^∞ I1(t − u) / √(u² − r²) du
//! ```
//!
//! which converges only conditionally because `I1` has zero mean. It is
//! evaluated as: a `u = r·cosh s` segment on `[r, 2r]` that removes the
//! endpoint singularity, whole-period Gauss-Legendre blocks beyond `2r`, and
//! extrapolation of the block partial sums in `1/N`.

pub mod bessel;
mod waveform;

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

pub use waveform::Waveform;

use crate::error::{Error, Result};
use crate::model::PhysParams;
use crate::quad::{extrapolate_to_zero, GaussLegendre};

/// `a(t, r)` together with `∂r a(t, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentialSample {
    pub t: f64,
    pub r: f64,
    pub value: f64,
    pub dvalue_dr: f64,
}

/// Controls for the retarded-potential quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PotentialQuadrature {
    /// Number of block-count doublings fed to the extrapolation.
    pub levels: usize,
    /// Relative agreement required between the last two extrapolants.
    pub tol: f64,
}

impl Default for PotentialQuadrature {
    fn default() -> Self {
        Self {
            levels: 8,
            tol: 1e-9,
        }
    }
}

/// `a0(r) = I0·ln r`.
pub fn log_potential(r: f64, params: &PhysParams) -> Result<f64> {
    check_radius(r)?;
    Ok(params.base_current * r.ln())
}

/// `a0'(r) = I0 / r`.
pub fn log_potential_dr(r: f64, params: &PhysParams) -> Result<f64> {
    check_radius(r)?;
    Ok(params.base_current / r)
}

/// Retarded potential of a zero-mean periodic modulation at `(t, r)`.
pub fn delayed_potential(
    t: f64,
    r: f64,
    waveform: &Waveform,
    opts: &PotentialQuadrature,
) -> Result<PotentialSample> {
    check_radius(r)?;
    if !t.is_finite() {
        return Err(Error::NonFinite("potential time"));
    }
    let harmonics = waveform.highest_harmonic();
    if harmonics == 0 {
        return Ok(PotentialSample {
            t,
            r,
            value: 0.0,
            dvalue_dr: 0.0,
        });
    }
    let period = waveform.period();
    let rule = GaussLegendre::new(16 + 8 * harmonics.min(60));

    // near segment u = r cosh s, s ∈ [0, acosh 2]
    let s_end = 2f64.acosh();
    let pieces = ((harmonics as f64 * r / period).ceil() as usize).max(1);
    let ds = s_end / pieces as f64;
    let mut value = 0.0;
    let mut deriv = 0.0;
    for p in 0..pieces {
        let (a, b) = (p as f64 * ds, (p + 1) as f64 * ds);
        value += rule.integrate(a, b, |s| waveform.value(t - r * s.cosh()));
        deriv -= rule.integrate(a, b, |s| {
            let c = s.cosh();
            c * waveform.eval(t - r * c).1
        });
    }
    // boundary term of the integration by parts on [2r, ∞)
    deriv -= 2.0 / 3f64.sqrt() * waveform.value(t - 2.0 * r) / r;

    let levels = opts.levels.max(2);
    let first = ((16.0 * r / period).ceil() as usize).max(4);
    let u0 = 2.0 * r;
    let mut hs = Vec::with_capacity(levels);
    let mut vals = Vec::with_capacity(levels);
    let mut ders = Vec::with_capacity(levels);
    let mut done = 0usize;
    for level in 0..levels {
        let target = first << level;
        while done < target {
            let a = u0 + done as f64 * period;
            let b = a + period;
            value += rule.integrate(a, b, |u| waveform.value(t - u) / (u * u - r * r).sqrt());
            deriv += rule.integrate(a, b, |u| {
                let w = u * u - r * r;
                waveform.value(t - u) * r / (w * w.sqrt())
            });
            done += 1;
        }
        hs.push(1.0 / target as f64);
        vals.push(value);
        ders.push(deriv);
    }
    let (v_best, v_prev) = extrapolate_to_zero(&hs, &vals);
    let (d_best, d_prev) = extrapolate_to_zero(&hs, &ders);
    let amp: f64 = waveform.harmonics().map(|(_, c, s)| c.hypot(s)).sum();
    let spread_v = (v_best - v_prev).abs();
    let spread_d = (d_best - d_prev).abs();
    if spread_v > opts.tol * v_best.abs().max(amp) || spread_d > opts.tol * d_best.abs().max(amp) {
        return Err(Error::Quadrature {
            spread: spread_v.max(spread_d),
        });
    }
    if !(v_best.is_finite() && d_best.is_finite()) {
        return Err(Error::NonFinite("delayed potential"));
    }
    Ok(PotentialSample {
        t,
        r,
        value: v_best,
        dvalue_dr: d_best,
    })
}

/// Evaluates [`delayed_potential`] on a tensor grid, ordered by `(t, r)` index.
pub fn potential_grid(
    times: &[f64],
    radii: &[f64],
    waveform: &Waveform,
    opts: &PotentialQuadrature,
) -> Result<Vec<PotentialSample>> {
    let mut out = Vec::with_capacity(times.len() * radii.len());
    for &t in times {
        for &r in radii {
            out.push(delayed_potential(t, r, waveform, opts)?);
        }
    }
    Ok(out)
}

/// Radial profiles of the retarded potential of `I1 = sin(ωt)`:
/// `a = D(r)·sin(ωt) + E(r)·cos(ωt)` with `D = −(π/2)·Y0(ωr)` and
/// `E = −(π/2)·J0(ωr)`. Returns `(D, E)`.
pub fn harmonic_profiles(omega: f64, r: f64) -> Result<(f64, f64)> {
    let x = profile_argument(omega, r)?;
    Ok((-FRAC_PI_2 * bessel::y0(x), -FRAC_PI_2 * bessel::j0(x)))
}

/// Radial derivatives `(D'(r), E'(r))` of [`harmonic_profiles`].
pub fn harmonic_profile_derivatives(omega: f64, r: f64) -> Result<(f64, f64)> {
    let x = profile_argument(omega, r)?;
    Ok((
        FRAC_PI_2 * omega * bessel::y1(x),
        FRAC_PI_2 * omega * bessel::j1(x),
    ))
}

fn profile_argument(omega: f64, r: f64) -> Result<f64> {
    let x = omega * r;
    if !(omega > 0.0 && r > 0.0 && x.is_finite()) {
        return Err(Error::OutOfRange("cylinder profiles need ω > 0 and r > 0"));
    }
    Ok(x)
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveRadius(r))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sine(omega: f64) -> Waveform {
        Waveform::sine(2.0 * PI / omega).unwrap()
    }

    #[test]
    fn log_potential_values() {
        let p = PhysParams::canonical();
        assert_eq!(log_potential(1.0, &p).unwrap(), 0.0);
        let p2 = PhysParams {
            base_current: 2.0,
            ..PhysParams::canonical()
        };
        assert!((log_potential(core::f64::consts::E, &p2).unwrap() - 2.0).abs() < 1e-15);
        assert!(log_potential(0.0, &p).is_err());
        let h = 1e-6;
        for &r in &[0.3, 1.0, 4.0] {
            let fd = (log_potential(r + h, &p2).unwrap() - log_potential(r - h, &p2).unwrap())
                / (2.0 * h);
            assert!((fd - log_potential_dr(r, &p2).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_waveform_gives_zero_potential() {
        let w = Waveform::from_harmonics(1.0, alloc::vec![0.0], alloc::vec![0.0]).unwrap();
        let s = delayed_potential(0.3, 2.0, &w, &PotentialQuadrature::default()).unwrap();
        assert_eq!((s.value, s.dvalue_dr), (0.0, 0.0));
    }

    #[test]
    fn spot_value_at_unit_radius() {
        let s = delayed_potential(0.0, 1.0, &sine(1.0), &PotentialQuadrature::default()).unwrap();
        // −(π/2)·J0(1)
        assert!((s.value + 1.2019697153172065).abs() < 1e-10);
    }

    #[test]
    fn periodic_in_time() {
        let w = sine(1.3);
        let opts = PotentialQuadrature::default();
        for &(t, r) in &[(0.2, 0.7), (1.9, 3.1), (-0.4, 6.0)] {
            let a = delayed_potential(t, r, &w, &opts).unwrap();
            let b = delayed_potential(t + w.period(), r, &w, &opts).unwrap();
            assert!((a.value - b.value).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_radius() {
        assert!(delayed_potential(0.0, -1.0, &sine(1.0), &PotentialQuadrature::default()).is_err());
        assert!(harmonic_profiles(1.0, 0.0).is_err());
        assert!(harmonic_profiles(-1.0, 1.0).is_err());
    }
}
