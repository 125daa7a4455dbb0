//! Turning points and the energy-period map of the unperturbed system.
//!
//! Everything is written in `u = ln(r/r̄)` around the center. With
//! `K̄ = L²/r̄²` the energy excess becomes
//!
//! ```text
//! g = (f − H0²)/2 = ½·[c²u² + K̄·(e^{−2u} − 1 + 2u)]
//! ```
//!
//! which has no cancellation near `r̄`. The period integral
//! `T = 2∫ H/√(H² − f) dr` is mapped by `2g(r) = z²`, `z = y·√(H² − H0²)`
//! onto a Chebyshev-weighted integral over `y ∈ (−1, 1)` with a smooth
//! integrand.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{axial_kinetic, check_radius, equilibrium, Equilibrium, PhysParams};
use crate::quad::chebyshev_nodes;
use crate::roots::{bracket_increasing, newton_bisect};

const FIRST_NODES: usize = 16;
const MAX_NODES: usize = 1 << 17;

/// Inner and outer turning radii at energy `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TurningPoints {
    pub r_a: f64,
    pub r_b: f64,
    #[cfg_attr(feature = "serde", serde(rename = "H"))]
    pub h: f64,
}

/// `g` and its first three radial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GDerivatives {
    pub g: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// One row of the period table.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodEntry {
    #[cfg_attr(feature = "serde", serde(rename = "H"))]
    pub h: f64,
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub t: f64,
    pub r_a: f64,
    pub r_b: f64,
}

/// `H ↦ T(H)` sampled on a grid geometric in `H − H0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PeriodMapTable {
    pub entries: Vec<PeriodEntry>,
    #[cfg_attr(feature = "serde", serde(rename = "H0"))]
    pub h0: f64,
    /// The linearized minimal period.
    #[cfg_attr(feature = "serde", serde(rename = "T0"))]
    pub t0: f64,
}

/// Period-map evaluator with the equilibrium computed once.
#[derive(Debug, Clone, Copy)]
pub struct PeriodMap {
    params: PhysParams,
    eq: Equilibrium,
    c2: f64,
    kbar: f64,
    /// Relative agreement of successive node counts.
    pub quad_tol: f64,
}

impl PeriodMap {
    pub fn new(params: &PhysParams) -> Result<Self> {
        let eq = equilibrium(params)?;
        let c = params.coupling();
        let l = params.angular_momentum / eq.r_bar;
        Ok(Self {
            params: *params,
            eq,
            c2: c * c,
            kbar: l * l,
            quad_tol: 1e-9,
        })
    }

    pub fn equilibrium(&self) -> &Equilibrium {
        &self.eq
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    /// `g(u)` and `q(u) = dg/du`.
    fn g_u(&self, u: f64) -> (f64, f64) {
        let x = -2.0 * u;
        let g = 0.5 * (self.c2 * u * u + self.kbar * expm1_minus_x(x));
        let q = self.c2 * u - self.kbar * x.exp_m1();
        (g, q)
    }

    /// `f(r) = 1 + (pz + c·ln r)² + L²/r²`.
    pub fn f(&self, r: f64) -> Result<f64> {
        profile_f(r, &self.params)
    }

    /// `g(r) = (f(r) − H0²)/2` with analytic derivatives.
    pub fn g(&self, r: f64) -> Result<GDerivatives> {
        check_radius(r)?;
        let u = (r / self.eq.r_bar).ln();
        let (g, q) = self.g_u(u);
        let e = (-2.0 * u).exp();
        let q1 = self.c2 + 2.0 * self.kbar * e;
        let q2 = -4.0 * self.kbar * e;
        Ok(GDerivatives {
            g,
            g1: q / r,
            g2: (q1 - q) / (r * r),
            g3: (q2 - 3.0 * q1 + 2.0 * q) / (r * r * r),
        })
    }

    fn check_energy(&self, h: f64) -> Result<f64> {
        let excess = (h - self.eq.h0) * (h + self.eq.h0);
        if !(h > self.eq.h0 && excess > 0.0 && h.is_finite()) {
            return Err(Error::BelowMinimumEnergy {
                energy: h,
                minimum: self.eq.h0,
            });
        }
        Ok(excess)
    }

    // u with g(u) = level on the side `side` (±1)
    fn level_root(&self, level: f64, side: f64, guess: f64) -> Result<f64> {
        if level == 0.0 {
            return Ok(0.0);
        }
        let phi = |v: f64| self.g_u(side * v).0 - level;
        let (lo, hi) = bracket_increasing(phi, 0.0, guess.max(1e-300))?;
        let v = newton_bisect(
            |v| {
                let (g, q) = self.g_u(side * v);
                (g - level, side * q)
            },
            lo,
            hi,
            4.0 * f64::EPSILON,
            400,
        )?;
        Ok(side * v)
    }

    pub fn turning_points(&self, h: f64) -> Result<TurningPoints> {
        let excess = self.check_energy(h)?;
        let level = 0.5 * excess;
        let guess = (2.0 * level / (self.c2 + 2.0 * self.kbar)).sqrt();
        let ua = self.level_root(level, -1.0, guess)?;
        let ub = self.level_root(level, 1.0, guess)?;
        Ok(TurningPoints {
            r_a: self.eq.r_bar * ua.exp(),
            r_b: self.eq.r_bar * ub.exp(),
            h,
        })
    }

    /// `T(H)` by Gauss-Chebyshev quadrature, doubling the node count until
    /// two successive values agree to `quad_tol`.
    pub fn period(&self, h: f64) -> Result<f64> {
        let excess = self.check_energy(h)?;
        let zmax = excess.sqrt();
        let slope0 = (self.c2 + 2.0 * self.kbar).sqrt();
        let integrand = |y: f64| -> Result<f64> {
            let z = zmax * y;
            let side = if z < 0.0 { -1.0 } else { 1.0 };
            let u = self.level_root(0.5 * z * z, side, z.abs() / slope0)?;
            let (_, q) = self.g_u(u);
            // z·r/q → r̄/√(c² + 2K̄) as z → 0
            let ratio = if q == 0.0 { 1.0 / slope0 } else { z / q };
            Ok(ratio * self.eq.r_bar * u.exp())
        };
        let mut n = FIRST_NODES;
        let mut prev = sum_nodes(n, &integrand)?;
        loop {
            n *= 2;
            let next = sum_nodes(n, &integrand)?;
            let t_prev = 2.0 * h * prev * PI / (n / 2) as f64;
            let t_next = 2.0 * h * next * PI / n as f64;
            if (t_next - t_prev).abs() <= self.quad_tol * t_next {
                return Ok(t_next);
            }
            if n >= MAX_NODES {
                return Err(Error::Quadrature {
                    spread: (t_next - t_prev).abs(),
                });
            }
            prev = next;
        }
    }

    /// Unique energy with `T(H) = period`.
    pub fn invert_period(&self, period: f64) -> Result<f64> {
        if !(period > self.eq.t0_lin && period.is_finite()) {
            return Err(Error::BelowMinimumPeriod {
                period,
                minimum: self.eq.t0_lin,
            });
        }
        let h0 = self.eq.h0;
        let scale = h0.max(1.0);
        // x = ln((H − H0)/scale)
        let energy = |x: f64| h0 + scale * x.exp();
        let mismatch = |x: f64| -> Result<f64> { Ok(self.period(energy(x))? / period - 1.0) };
        let mut lo = -6.0f64;
        while mismatch(lo)? > 0.0 {
            lo -= 6.0;
            if lo < -60.0 {
                return Err(Error::Bracketing("period too close to the minimal period"));
            }
        }
        let mut hi = lo + 1.0;
        while mismatch(hi)? < 0.0 {
            lo = hi;
            hi += 2.0 * (hi - lo).max(1.0);
            if hi > 60.0 {
                return Err(Error::Bracketing(
                    "period map does not reach the requested period",
                ));
            }
        }
        let mut failure = None;
        let dx = 1e-5;
        let x = newton_bisect(
            |x| {
                let eval = || -> Result<(f64, f64)> {
                    let m = mismatch(x)?;
                    let d = (mismatch(x + dx)? - mismatch(x - dx)?) / (2.0 * dx);
                    Ok((m, d))
                };
                eval().unwrap_or_else(|e| {
                    failure = Some(e);
                    (f64::NAN, f64::NAN)
                })
            },
            lo,
            hi,
            1e-13,
            200,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(energy(x?))
    }

    /// Table of `(H, T, r_a, r_b)` on `n_points` energies up to `h_max`.
    pub fn build_table(&self, h_max: f64, n_points: usize) -> Result<PeriodMapTable> {
        let h0 = self.eq.h0;
        let span = h_max - h0;
        if !(span > 0.0 && span.is_finite()) {
            return Err(Error::BelowMinimumEnergy {
                energy: h_max,
                minimum: h0,
            });
        }
        if n_points < 2 {
            return Err(Error::InvalidParameter {
                name: "n_points",
                reason: "at least two table entries required",
            });
        }
        let first = 1e-4 * span.min(1.0);
        let ratio = span / first;
        let mut entries: Vec<PeriodEntry> = Vec::with_capacity(n_points);
        for i in 0..n_points {
            let delta = if i + 1 == n_points {
                span
            } else {
                first * ratio.powf(i as f64 / (n_points - 1) as f64)
            };
            let h = h0 + delta;
            let tp = self.turning_points(h)?;
            let t = self.period(h)?;
            if let Some(prev) = entries.last() {
                if !(t > prev.t) {
                    return Err(Error::NotMonotone {
                        h_lo: prev.h,
                        t_lo: prev.t,
                        h_hi: h,
                        t_hi: t,
                    });
                }
            }
            entries.push(PeriodEntry {
                h,
                t,
                r_a: tp.r_a,
                r_b: tp.r_b,
            });
        }
        Ok(PeriodMapTable {
            entries,
            h0,
            t0: self.eq.t0_lin,
        })
    }
}

fn sum_nodes<F>(n: usize, integrand: &F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    chebyshev_nodes(n).try_fold(0.0, |acc, y| Ok(acc + integrand(y)?))
}

// e^x − 1 − x without cancellation for small |x|
fn expm1_minus_x(x: f64) -> f64 {
    if x.abs() < 0.5 {
        let mut term = x * x / 2.0;
        let mut sum = term;
        for k in 3..40 {
            term *= x / k as f64;
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `f(r) = 1 + (pz + c·ln r)² + L²/r²`.
pub fn profile_f(r: f64, params: &PhysParams) -> Result<f64> {
    check_radius(r)?;
    let p = axial_kinetic(r, params);
    let l = params.angular_momentum / r;
    Ok(1.0 + p * p + l * l)
}

pub fn turning_points(h: f64, params: &PhysParams) -> Result<TurningPoints> {
    PeriodMap::new(params)?.turning_points(h)
}

pub fn period(h: f64, params: &PhysParams) -> Result<f64> {
    PeriodMap::new(params)?.period(h)
}

/// `(T0_lin, T0_lemma3)`.
pub fn min_period(params: &PhysParams) -> Result<(f64, Option<f64>)> {
    let eq = equilibrium(params)?;
    Ok((eq.t0_lin, eq.t0_lemma3))
}

pub fn invert_period(t: f64, params: &PhysParams) -> Result<f64> {
    PeriodMap::new(params)?.invert_period(t)
}

pub fn build_table(params: &PhysParams, h_max: f64, n_points: usize) -> Result<PeriodMapTable> {
    PeriodMap::new(params)?.build_table(h_max, n_points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrator::return_time;
    use crate::model::RadialState;

    fn canon() -> PeriodMap {
        PeriodMap::new(&PhysParams::canonical()).unwrap()
    }

    #[test]
    fn profile_and_g_at_center() {
        let m = canon();
        assert!((m.f(1.0).unwrap() - 3.0).abs() < 1e-15);
        let g = m.g(1.0).unwrap();
        assert_eq!(g.g, 0.0);
        assert_eq!(g.g1, 0.0);
        assert!((g.g2 - 3.0).abs() < 1e-14);
        assert!((g.g3 + 13.0).abs() < 1e-13);
        assert!(m.f(0.0).is_err());
    }

    #[test]
    fn g_matches_direct_formula_and_finite_differences() {
        let p = PhysParams {
            base_current: 1.3,
            angular_momentum: 0.8,
            axial_momentum: -0.2,
            ..PhysParams::canonical()
        };
        let m = PeriodMap::new(&p).unwrap();
        let h0sq = m.equilibrium().h0.powi(2);
        for &r in &[0.2, 0.7, 1.5, 4.0, 20.0] {
            let g = m.g(r).unwrap();
            assert!((g.g - 0.5 * (profile_f(r, &p).unwrap() - h0sq)).abs() < 1e-12 * (1.0 + g.g));
            let h = 1e-3 * r;
            let gg = |x: f64| m.g(x).unwrap();
            let d = |f: &dyn Fn(GDerivatives) -> f64| {
                (f(gg(r - 2.0 * h)) - 8.0 * f(gg(r - h)) + 8.0 * f(gg(r + h)) - f(gg(r + 2.0 * h)))
                    / (12.0 * h)
            };
            let fd1 = d(&|v| v.g);
            let fd2 = d(&|v| v.g1);
            let fd3 = d(&|v| v.g2);
            assert!((fd1 - g.g1).abs() < 1e-6 * (1.0 + g.g1.abs()));
            assert!((fd2 - g.g2).abs() < 1e-6 * (1.0 + g.g2.abs()));
            assert!((fd3 - g.g3).abs() < 1e-6 * (1.0 + g.g3.abs()), "r={r}");
        }
    }

    #[test]
    fn canonical_turning_points_at_h2() {
        let tp = canon().turning_points(2.0).unwrap();
        // independent bisection on f(r) = 4 on each side of r̄ = 1
        let f = |r: f64| profile_f(r, &PhysParams::canonical()).unwrap() - 4.0;
        let bis = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if (f(mid) > 0.0) == (f(lo) > 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        };
        assert!((tp.r_a - bis(0.1, 1.0)).abs() < 1e-12);
        assert!((tp.r_b - bis(1.0, 10.0)).abs() < 1e-12);
        assert!((tp.r_a - 0.6023).abs() < 1e-4 && (tp.r_b - 1.9190).abs() < 1e-4);
    }

    #[test]
    fn energy_at_or_below_minimum_is_rejected() {
        let m = canon();
        let h0 = m.equilibrium().h0;
        assert!(m.turning_points(h0).is_err());
        assert!(m.period(h0 - 0.1).is_err());
        assert!(m.invert_period(m.equilibrium().t0_lin).is_err());
    }

    #[test]
    fn period_near_center_is_linear_period() {
        let m = canon();
        let t = m.period(m.equilibrium().h0 + 1e-4).unwrap();
        assert!((t / (2.0 * PI) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn period_matches_return_time() {
        let p = PhysParams::canonical();
        let m = PeriodMap::new(&p).unwrap();
        let tp = m.turning_points(2.0).unwrap();
        let t_quad = m.period(2.0).unwrap();
        let t_ode = return_time(RadialState { r: tp.r_b, pr: 0.0 }, &p, 1e-12).unwrap();
        assert!(
            (t_quad - t_ode).abs() < 1e-6 * t_quad,
            "{t_quad} vs {t_ode}"
        );
    }

    #[test]
    fn inversion_round_trip() {
        let m = canon();
        let t = m.invert_period(4.0 * PI).unwrap();
        assert!((m.period(t).unwrap() - 4.0 * PI).abs() < 1e-9 * 4.0 * PI);
        for &h in &[1.74, 2.0, 3.5, 6.0] {
            let back = m.invert_period(m.period(h).unwrap()).unwrap();
            assert!((back - h).abs() < 1e-8, "{h} -> {back}");
        }
    }

    #[test]
    fn table_is_monotone_and_above_chord_bound() {
        let m = canon();
        let h0 = m.equilibrium().h0;
        let table = m.build_table(h0 + 5.0, 40).unwrap();
        assert_eq!(table.entries.len(), 40);
        assert!((table.entries[0].t - table.t0).abs() < 1e-3 * table.t0);
        for w in table.entries.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for e in &table.entries {
            assert!(e.t >= 2.0 * (e.r_b - e.r_a));
        }
        assert!((table.entries[39].h - (h0 + 5.0)).abs() < 1e-12);
    }

    #[test]
    fn series_branch_is_continuous() {
        for &x in &[0.4999999, -0.4999999] {
            let a = expm1_minus_x(x);
            let b = x.exp_m1() - x;
            assert!((a - b).abs() < 1e-15);
        }
        assert!((expm1_minus_x(1e-9) / 5e-19 - 1.0).abs() < 1e-9);
    }
}
