//! The modulation part `a(t, r)` of the vector potential.

use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::interp::MonotoneCubic;
use crate::potential::{bessel, Waveform};

use super::PhysParams;

/// Radial profile multiplying one phase of the modulation.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(
    feature = "serde",
    serde(rename_all = "snake_case", tag = "kind", content = "value")
)]
pub enum Profile {
    #[default]
    Zero,
    Constant(f64),
    /// `−(π/2)·Y0(ω1·r)`, the sine profile of the retarded potential of `sin(ω1 t)`.
    CylinderSine,
    /// `−(π/2)·J0(ω1·r)`, its cosine profile.
    CylinderCosine,
    Table(MonotoneCubic),
}

impl Profile {
    /// `(D(r), D'(r))` for drive frequency `omega`.
    pub fn eval(&self, r: f64, omega: f64) -> Result<(f64, f64)> {
        match self {
            Profile::Zero => Ok((0.0, 0.0)),
            Profile::Constant(v) => Ok((*v, 0.0)),
            Profile::CylinderSine => {
                let x = omega * r;
                Ok((
                    -FRAC_PI_2 * bessel::y0(x),
                    FRAC_PI_2 * omega * bessel::y1(x),
                ))
            }
            Profile::CylinderCosine => {
                let x = omega * r;
                Ok((
                    -FRAC_PI_2 * bessel::j0(x),
                    FRAC_PI_2 * omega * bessel::j1(x),
                ))
            }
            Profile::Table(t) => t.eval(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Zero) || matches!(self, Profile::Constant(v) if *v == 0.0)
    }
}

/// How `a(t, r)` is produced.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case", tag = "kind"))]
pub enum FieldModel {
    /// Steady current: `a ≡ 0`.
    #[default]
    Constant,
    /// `a(t, r) = D(r)·sin(ω1 t) + E(r)·cos(ω1 t)`.
    Harmonic { sine: Profile, cosine: Profile },
    /// Retarded potential of an arbitrary zero-mean periodic waveform, summed
    /// harmonic by harmonic with cylinder-function profiles.
    Tabulated { waveform: Waveform },
}

impl FieldModel {
    /// The pure-sine ansatz with the cylinder-function profile.
    pub fn sine_ansatz() -> Self {
        FieldModel::Harmonic {
            sine: Profile::CylinderSine,
            cosine: Profile::Zero,
        }
    }

    /// Both phases of the retarded potential of `I1 = sin(ω1 t)`.
    pub fn retarded_sine() -> Self {
        FieldModel::Harmonic {
            sine: Profile::CylinderSine,
            cosine: Profile::CylinderCosine,
        }
    }

    pub fn check(&self, params: &PhysParams) -> Result<()> {
        if let FieldModel::Tabulated { waveform } = self {
            if (waveform.period() - params.drive_period).abs() > 1e-12 * params.drive_period {
                return Err(Error::InvalidParameter {
                    name: "waveform period",
                    reason: "must equal the driving period T1",
                });
            }
        }
        Ok(())
    }

    /// `(a(t, r), ∂r a(t, r))`.
    pub fn modulation(&self, t: f64, r: f64, params: &PhysParams) -> Result<(f64, f64)> {
        let omega = params.omega1();
        match self {
            FieldModel::Constant => Ok((0.0, 0.0)),
            FieldModel::Harmonic { sine, cosine } => {
                let (s, c) = (omega * t).sin_cos();
                let (d, dd) = sine.eval(r, omega)?;
                let (e, de) = cosine.eval(r, omega)?;
                Ok((d * s + e * c, dd * s + de * c))
            }
            FieldModel::Tabulated { waveform } => {
                let mut value = 0.0;
                let mut deriv = 0.0;
                for (m, cm, sm) in waveform.harmonics() {
                    if cm == 0.0 && sm == 0.0 {
                        continue;
                    }
                    let w = m as f64 * waveform.omega();
                    let x = w * r;
                    let (j0, j1, y0, y1) =
                        (bessel::j0(x), bessel::j1(x), bessel::y0(x), bessel::y1(x));
                    let (s, c) = (w * t).sin_cos();
                    // sin(wt) ↦ −(π/2)(Y0 sin + J0 cos); cos(wt) ↦ −(π/2)(Y0 cos − J0 sin)
                    value -= FRAC_PI_2 * (sm * (y0 * s + j0 * c) + cm * (y0 * c - j0 * s));
                    deriv += FRAC_PI_2 * w * (sm * (y1 * s + j1 * c) + cm * (y1 * c - j1 * s));
                }
                Ok((value, deriv))
            }
        }
    }

    /// Sine and cosine profiles `((D, D'), (E, E'))` at `r` for the
    /// single-harmonic kinds.
    pub fn harmonic_profiles(&self, r: f64, params: &PhysParams) -> Result<[(f64, f64); 2]> {
        let omega = params.omega1();
        match self {
            FieldModel::Constant => Ok([(0.0, 0.0); 2]),
            FieldModel::Harmonic { sine, cosine } => {
                Ok([sine.eval(r, omega)?, cosine.eval(r, omega)?])
            }
            FieldModel::Tabulated { waveform } => {
                if waveform.highest_harmonic() > 1 {
                    return Err(Error::UnsupportedField(
                        "waveform has harmonics above the drive frequency",
                    ));
                }
                let (cm, sm) = waveform
                    .harmonics()
                    .next()
                    .map(|(_, c, s)| (c, s))
                    .unwrap_or((0.0, 0.0));
                let x = omega * r;
                let (j0, j1, y0, y1) = (bessel::j0(x), bessel::j1(x), bessel::y0(x), bessel::y1(x));
                let sine = (
                    -FRAC_PI_2 * (sm * y0 - cm * j0),
                    FRAC_PI_2 * omega * (sm * y1 - cm * j1),
                );
                let cosine = (
                    -FRAC_PI_2 * (sm * j0 + cm * y0),
                    FRAC_PI_2 * omega * (sm * j1 + cm * y1),
                );
                Ok([sine, cosine])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{delayed_potential, PotentialQuadrature};
    use core::f64::consts::PI;

    #[test]
    fn tabulated_sine_matches_harmonic_kind() {
        let p = PhysParams {
            drive_period: 5.0,
            ..PhysParams::canonical()
        };
        let tab = FieldModel::Tabulated {
            waveform: Waveform::sine(5.0).unwrap(),
        };
        let harm = FieldModel::retarded_sine();
        for &(t, r) in &[(0.0, 1.0), (1.3, 0.4), (3.9, 6.5)] {
            let a = tab.modulation(t, r, &p).unwrap();
            let b = harm.modulation(t, r, &p).unwrap();
            assert!((a.0 - b.0).abs() < 1e-14 && (a.1 - b.1).abs() < 1e-14);
        }
    }

    #[test]
    fn tabulated_two_harmonics_match_quadrature() {
        let period = 2.0 * PI;
        let w = Waveform::from_harmonics(period, alloc::vec![0.3, -0.2], alloc::vec![1.0, 0.5])
            .unwrap();
        let p = PhysParams {
            drive_period: period,
            ..PhysParams::canonical()
        };
        let field = FieldModel::Tabulated {
            waveform: w.clone(),
        };
        for &(t, r) in &[(0.4, 0.8), (2.0, 3.0)] {
            let (a, ar) = field.modulation(t, r, &p).unwrap();
            let q = delayed_potential(t, r, &w, &PotentialQuadrature::default()).unwrap();
            assert!((a - q.value).abs() < 1e-8, "{a} vs {}", q.value);
            assert!((ar - q.dvalue_dr).abs() < 1e-8);
        }
    }

    #[test]
    fn single_harmonic_table_splits_into_profiles() {
        let period = 7.0;
        let w = Waveform::from_harmonics(period, alloc::vec![0.4], alloc::vec![0.9]).unwrap();
        let p = PhysParams {
            drive_period: period,
            ..PhysParams::canonical()
        };
        let field = FieldModel::Tabulated { waveform: w };
        let r = 1.7;
        let [(d, dd), (e, de)] = field.harmonic_profiles(r, &p).unwrap();
        for &t in &[0.0, 1.1, 4.2] {
            let (s, c) = (p.omega1() * t).sin_cos();
            let (a, ar) = field.modulation(t, r, &p).unwrap();
            assert!((a - (d * s + e * c)).abs() < 1e-14);
            assert!((ar - (dd * s + de * c)).abs() < 1e-14);
        }
    }

    #[test]
    fn mismatched_waveform_period_is_rejected() {
        let field = FieldModel::Tabulated {
            waveform: Waveform::sine(3.0).unwrap(),
        };
        assert!(field.check(&PhysParams::canonical()).is_err());
    }
}
