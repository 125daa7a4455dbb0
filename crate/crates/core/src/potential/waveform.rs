//! Zero-mean periodic current modulations `I1(t)` stored as trigonometric
//! series.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// `I1(t) = Σ_m [cos_m·cos(mωt) + sin_m·sin(mωt)]`, `m = 1..=M`, `ω = 2π/period`.
/// The constant mode is absent by construction.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Waveform {
    period: f64,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Waveform {
    /// `I1(t) = sin(2πt/period)`.
    pub fn sine(period: f64) -> Result<Self> {
        Self::from_harmonics(period, alloc::vec![0.0], alloc::vec![1.0])
    }

    pub fn from_harmonics(period: f64, cos: Vec<f64>, sin: Vec<f64>) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "waveform period",
                reason: "must be positive and finite",
            });
        }
        if cos.len() != sin.len() {
            return Err(Error::InvalidParameter {
                name: "waveform harmonics",
                reason: "cosine and sine coefficient counts differ",
            });
        }
        if cos.iter().chain(&sin).any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("waveform harmonics"));
        }
        Ok(Self { period, cos, sin })
    }

    /// Trigonometric interpolant of one period of uniformly spaced samples
    /// `samples[j] = I1(j·period/N)`. The sample mean is removed and returned
    /// alongside the waveform.
    pub fn from_samples(samples: &[f64], period: f64) -> Result<(Self, f64)> {
        let n = samples.len();
        if n < 3 {
            return Err(Error::InvalidParameter {
                name: "waveform samples",
                reason: "at least three samples per period required",
            });
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(Error::NonFinite("waveform samples"));
        }
        let nf = n as f64;
        let mean = samples.iter().sum::<f64>() / nf;
        let m_max = n / 2;
        let mut cos = alloc::vec![0.0; m_max];
        let mut sin = alloc::vec![0.0; m_max];
        for m in 1..=m_max {
            let (mut c, mut s) = (0.0, 0.0);
            for (j, y) in samples.iter().enumerate() {
                let phase = 2.0 * PI * ((m * j) % n) as f64 / nf;
                c += (y - mean) * phase.cos();
                s += (y - mean) * phase.sin();
            }
            let nyquist = n.is_multiple_of(2) && m == m_max;
            let scale = if nyquist { 1.0 / nf } else { 2.0 / nf };
            cos[m - 1] = c * scale;
            sin[m - 1] = if nyquist { 0.0 } else { s * scale };
        }
        Ok((Self::from_harmonics(period, cos, sin)?, mean))
    }

    /// As [`Waveform::from_samples`], but rejects samples whose mean exceeds
    /// `tol` times the peak amplitude.
    pub fn from_zero_mean_samples(samples: &[f64], period: f64, tol: f64) -> Result<Self> {
        let (w, mean) = Self::from_samples(samples, period)?;
        let amp = samples.iter().fold(0.0f64, |a, s| a.max(s.abs()));
        if mean.abs() > tol * amp.max(f64::MIN_POSITIVE) {
            return Err(Error::NonZeroMean(mean));
        }
        Ok(w)
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI / self.period
    }

    pub fn harmonics(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.cos
            .iter()
            .zip(&self.sin)
            .enumerate()
            .map(|(i, (c, s))| (i + 1, *c, *s))
    }

    pub fn highest_harmonic(&self) -> usize {
        self.harmonics()
            .filter(|(_, c, s)| *c != 0.0 || *s != 0.0)
            .map(|(m, _, _)| m)
            .max()
            .unwrap_or(0)
    }

    /// Multiplies every coefficient by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            period: self.period,
            cos: self.cos.iter().map(|c| c * factor).collect(),
            sin: self.sin.iter().map(|s| s * factor).collect(),
        }
    }

    /// `(I1(t), I1'(t))`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let omega = self.omega();
        let theta = omega * (t - self.period * (t / self.period).floor());
        let (s1, c1) = theta.sin_cos();
        let (mut cm, mut sm) = (c1, s1);
        let mut value = 0.0;
        let mut deriv = 0.0;
        for (m, a, b) in self.harmonics() {
            let mf = m as f64;
            value += a * cm + b * sm;
            deriv += mf * omega * (b * cm - a * sm);
            let next_c = cm * c1 - sm * s1;
            sm = sm * c1 + cm * s1;
            cm = next_c;
        }
        (value, deriv)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_of_a_trig_polynomial_are_recovered_exactly() {
        let period = 3.0;
        let w = 2.0 * PI / period;
        let f =
            |t: f64| 0.4 + (w * t).sin() - 0.25 * (3.0 * w * t).cos() + 0.1 * (2.0 * w * t).sin();
        let samples: Vec<f64> = (0..16).map(|j| f(j as f64 * period / 16.0)).collect();
        let (wave, mean) = Waveform::from_samples(&samples, period).unwrap();
        assert!((mean - 0.4).abs() < 1e-14);
        for i in 0..50 {
            let t = 0.137 * i as f64;
            assert!((wave.value(t) - (f(t) - 0.4)).abs() < 1e-13);
            let d = 1e-6;
            let fd = (wave.value(t + d) - wave.value(t - d)) / (2.0 * d);
            assert!((wave.eval(t).1 - fd).abs() < 1e-7);
        }
    }

    #[test]
    fn strict_constructor_rejects_offset_samples() {
        let samples = [1.0, 2.0, 1.5, 1.2];
        assert!(matches!(
            Waveform::from_zero_mean_samples(&samples, 1.0, 1e-6),
            Err(Error::NonZeroMean(_))
        ));
    }

    #[test]
    fn sine_has_single_harmonic() {
        let w = Waveform::sine(2.0).unwrap();
        assert_eq!(w.highest_harmonic(), 1);
        assert!((w.value(0.5) - 1.0).abs() < 1e-15);
    }
}
