//! Periodic orbits of the forced system as fixed points of the stroboscopic
//! map, located by Newton shooting and classified by their Floquet
//! multipliers.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent methods win when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::integrator::{flow_on_grid, integrate, Trajectory};
use crate::melnikov::{Melnikov, ResonantOrbit};
use crate::model::{equilibrium, vector_field, FieldModel, PhysParams, RadialState};

/// Tolerances of the orbit search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FinderOptions {
    /// Local error tolerance of every flow evaluation.
    pub integration_tol: f64,
    /// Newton stops once the closure residual falls below this.
    pub newton_tol: f64,
    /// A converged orbit must close to this.
    pub accept_tol: f64,
    pub max_iterations: usize,
    /// Finite-difference step relative to `max(1, |state|)`.
    pub fd_step: f64,
    /// Phase-space distance below which two fixed points are one orbit.
    pub dedup_tol: f64,
    /// Closure residual that counts as periodic at a smaller multiple.
    pub lock_tol: f64,
    /// Largest modulation amplitude accepted.
    pub max_k: f64,
}

impl Default for FinderOptions {
    fn default() -> Self {
        Self {
            integration_tol: 1e-12,
            newton_tol: 1e-11,
            accept_tol: 1e-9,
            max_iterations: 50,
            fd_step: 1e-6,
            dedup_tol: 1e-6,
            lock_tol: 1e-8,
            max_k: 1e-2,
        }
    }
}

/// One eigenvalue of the monodromy matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Multiplier {
    pub re: f64,
    pub im: f64,
}

impl Multiplier {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum OrbitKind {
    Elliptic,
    Hyperbolic,
    Parabolic,
}

impl OrbitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OrbitKind::Elliptic => "elliptic",
            OrbitKind::Hyperbolic => "hyperbolic",
            OrbitKind::Parabolic => "parabolic",
        }
    }
}

/// Linearization of a stroboscopic map.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Monodromy {
    /// Row-major `∂(r, pr)_out / ∂(r, pr)_in`.
    pub matrix: [[f64; 2]; 2],
}

impl Monodromy {
    pub fn trace(&self) -> f64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    pub fn determinant(&self) -> f64 {
        self.matrix[0][0] * self.matrix[1][1] - self.matrix[0][1] * self.matrix[1][0]
    }

    pub fn multipliers(&self) -> [Multiplier; 2] {
        let half = 0.5 * self.trace();
        let disc = half * half - self.determinant();
        if disc >= 0.0 {
            let s = disc.sqrt();
            // the smaller root from the product avoids cancellation
            let big = half + half.signum() * s;
            let small = if big != 0.0 {
                self.determinant() / big
            } else {
                half - s
            };
            [
                Multiplier { re: big, im: 0.0 },
                Multiplier { re: small, im: 0.0 },
            ]
        } else {
            let s = (-disc).sqrt();
            [
                Multiplier { re: half, im: s },
                Multiplier { re: half, im: -s },
            ]
        }
    }

    /// Classification with a dead band of `1e-9` on the discriminant.
    pub fn kind(&self) -> OrbitKind {
        let half = 0.5 * self.trace();
        let disc = half * half - self.determinant();
        if disc > 1e-9 {
            OrbitKind::Hyperbolic
        } else if disc < -1e-9 {
            OrbitKind::Elliptic
        } else {
            OrbitKind::Parabolic
        }
    }
}

/// A located periodic orbit of the forced system.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OrbitRecord {
    pub n: usize,
    /// Section point at phase `t = 0`.
    pub fixed_point: RadialState,
    /// `|Φ_n(x) − x|` with a fresh adaptive integration.
    pub residual: f64,
    pub floquet: [Multiplier; 2],
    pub kind: OrbitKind,
    pub distance_to_unperturbed: f64,
    pub k: f64,
    pub iterations: usize,
    pub jacobian_determinant: f64,
    /// Smallest `m ≤ n` with `|Φ_m(x) − x| ≤ lock_tol`.
    pub minimal_multiple: usize,
    /// `|Φ_m(x) − x|` for `m = 1, …, n − 1`.
    pub lower_residuals: Vec<f64>,
}

impl OrbitRecord {
    /// Newton converged onto an orbit whose period is a proper divisor of `n·T1`.
    pub fn lower_period(&self) -> bool {
        self.minimal_multiple < self.n
    }
}

fn check_search(params: &PhysParams, opts: &FinderOptions) -> Result<()> {
    params.validate()?;
    if params.modulation == 0.0 {
        return Err(Error::DegenerateFamily);
    }
    if params.modulation.abs() > opts.max_k {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "outside the perturbative range of the orbit finder",
        });
    }
    Ok(())
}

fn flow(
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
    n: usize,
    tol: f64,
) -> Result<Trajectory> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "map iterate must be at least 1",
        });
    }
    integrate(
        state,
        0.0,
        n as f64 * params.drive_period,
        params,
        field,
        tol,
    )
}

/// `Φ_n`: the flow of the forced system from `t = 0` to `t = n·T1`.
pub fn stroboscopic_map(
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
    n: usize,
) -> Result<RadialState> {
    if params.modulation < 0.0 {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: "must be non-negative",
        });
    }
    Ok(flow(
        state,
        params,
        field,
        n,
        FinderOptions::default().integration_tol,
    )?
    .end())
}

/// Central-difference Jacobian of `Φ_n` at `state`, replaying the time grid
/// of the base trajectory so the derivative sees a smooth map.
pub fn map_jacobian(
    state: RadialState,
    params: &PhysParams,
    field: &FieldModel,
    n: usize,
    opts: &FinderOptions,
) -> Result<(RadialState, Monodromy)> {
    let base = flow(state, params, field, n, opts.integration_tol)?;
    let grid = base.grid();
    let h = opts.fd_step * state.r.hypot(state.pr).max(1.0);
    let mut matrix = [[0.0; 2]; 2];
    for j in 0..2 {
        let shift = |s: f64| {
            let mut x = state;
            if j == 0 {
                x.r += s;
            } else {
                x.pr += s;
            }
            x
        };
        let plus = flow_on_grid(shift(h), &grid, params, field)?;
        let minus = flow_on_grid(shift(-h), &grid, params, field)?;
        matrix[0][j] = (plus.r - minus.r) / (2.0 * h);
        matrix[1][j] = (plus.pr - minus.pr) / (2.0 * h);
    }
    Ok((base.end(), Monodromy { matrix }))
}

/// Newton shooting for a fixed point of `Φ_n` near `seed`.
pub fn find_orbit(
    n: usize,
    params: &PhysParams,
    field: &FieldModel,
    seed: RadialState,
) -> Result<OrbitRecord> {
    let opts = FinderOptions::default();
    check_search(params, &opts)?;
    let gamma = crate::melnikov::resonant_orbit(n, params)?;
    find_orbit_with(n, params, field, seed, &gamma, &opts)
}

/// [`find_orbit`] against a precomputed `Γ_n` and explicit options.
pub fn find_orbit_with(
    n: usize,
    params: &PhysParams,
    field: &FieldModel,
    seed: RadialState,
    gamma: &ResonantOrbit,
    opts: &FinderOptions,
) -> Result<OrbitRecord> {
    check_search(params, opts)?;
    let mut x = RadialState::new(seed.r, seed.pr)?;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        let (image, jac) = map_jacobian(x, params, field, n, opts)?;
        let fr = image.r - x.r;
        let fp = image.pr - x.pr;
        residual = fr.hypot(fp);
        if residual <= opts.newton_tol {
            break;
        }
        let m = jac.matrix;
        let (a, b, c, d) = (m[0][0] - 1.0, m[0][1], m[1][0], m[1][1] - 1.0);
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::DegenerateFamily);
        }
        let dr = (d * fr - b * fp) / det;
        let dp = (a * fp - c * fr) / det;
        // damp steps that would leave the half-plane r > 0
        let mut scale = 1.0;
        while x.r - scale * dr <= 0.0 {
            scale *= 0.5;
        }
        x.r -= scale * dr;
        x.pr -= scale * dp;
        iterations += 1;
        if (scale * dr).hypot(scale * dp) <= 1e-14 * x.r.hypot(x.pr).max(1.0) {
            break;
        }
    }
    let (image, jac) = map_jacobian(x, params, field, n, opts)?;
    let final_residual = image.distance(&x);
    if final_residual > opts.accept_tol {
        return Err(Error::NewtonFailed {
            iterations,
            residual: final_residual.max(residual),
        });
    }
    let mut lower_residuals = Vec::with_capacity(n.saturating_sub(1));
    let mut minimal_multiple = n;
    if n > 1 {
        let traj = flow(x, params, field, n - 1, opts.integration_tol)?;
        for m in 1..n {
            let r = traj.eval(m as f64 * params.drive_period)?.distance(&x);
            if r <= opts.lock_tol && minimal_multiple == n {
                minimal_multiple = m;
            }
            lower_residuals.push(r);
        }
    }
    let traj = flow(x, params, field, n, opts.integration_tol)?;
    Ok(OrbitRecord {
        n,
        fixed_point: x,
        residual: final_residual,
        floquet: jac.multipliers(),
        kind: jac.kind(),
        distance_to_unperturbed: sup_distance(&traj, gamma, params, 256 * n)?,
        k: params.modulation,
        iterations,
        jacobian_determinant: jac.determinant(),
        minimal_multiple,
        lower_residuals,
    })
}

/// Largest distance from `samples` uniform points of `traj` to the curve `Γ_n`.
pub fn sup_distance(
    traj: &Trajectory,
    gamma: &ResonantOrbit,
    params: &PhysParams,
    samples: usize,
) -> Result<f64> {
    let unperturbed = params.with_modulation(0.0);
    let curve = gamma.sample(4096)?;
    let dt = gamma.period / curve.times.len() as f64;
    let mut worst: f64 = 0.0;
    for s in traj.uniform(samples)?.states {
        let (i, _) = curve
            .states
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.distance(&s)))
            .fold(
                (0, f64::INFINITY),
                |acc, v| if v.1 < acc.1 { v } else { acc },
            );
        // Gauss-Newton on the foot point parameter
        let mut tau = curve.times[i];
        for _ in 0..8 {
            let g = gamma.state_at(tau)?;
            let (vr, vp) = vector_field(0.0, g, &unperturbed, &FieldModel::Constant)?;
            let step = ((s.r - g.r) * vr + (s.pr - g.pr) * vp) / (vr * vr + vp * vp);
            let step = step.clamp(-dt, dt);
            tau += step;
            if step.abs() < 1e-14 * gamma.period {
                break;
            }
        }
        worst = worst.max(gamma.state_at(tau)?.distance(&s));
    }
    Ok(worst)
}

/// A seed that did not converge.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedFailure {
    pub n: usize,
    pub seed_index: usize,
    pub seed: RadialState,
    pub error: Error,
}

/// Search results for one resonance order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub n: usize,
    /// `None` when `n·T1` does not exceed the minimal period or `H_n` is
    /// outside the annulus.
    pub energy: Option<f64>,
    pub melnikov_zeros: usize,
    pub seeds: usize,
    pub orbits: Vec<OrbitRecord>,
    pub failures: Vec<SeedFailure>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Catalogue {
    pub entries: Vec<ScanEntry>,
}

impl Catalogue {
    pub fn orbits(&self) -> impl Iterator<Item = &OrbitRecord> {
        self.entries.iter().flat_map(|e| e.orbits.iter())
    }
}

/// For each `n ≤ n_max`, Newton-polishes seeds on `Γ_n` at the Melnikov zero
/// phases and keeps one record per distinct physical orbit.
pub fn scan_orbits(
    n_max: usize,
    params: &PhysParams,
    field: &FieldModel,
    annulus: (f64, f64),
) -> Result<Catalogue> {
    scan_orbits_with(n_max, params, field, annulus, &FinderOptions::default())
}

pub fn scan_orbits_with(
    n_max: usize,
    params: &PhysParams,
    field: &FieldModel,
    annulus: (f64, f64),
    opts: &FinderOptions,
) -> Result<Catalogue> {
    check_search(params, opts)?;
    let t0_lin = equilibrium(&params.with_modulation(0.0))?.t0_lin;
    let mut catalogue = Catalogue::default();
    // section points of every accepted orbit under the time-T1 map
    let mut known: Vec<RadialState> = Vec::new();
    for n in 1..=n_max {
        let mut entry = ScanEntry {
            n,
            energy: None,
            melnikov_zeros: 0,
            seeds: 0,
            orbits: Vec::new(),
            failures: Vec::new(),
        };
        if n as f64 * params.drive_period <= t0_lin {
            catalogue.entries.push(entry);
            continue;
        }
        let mel = Melnikov::new(n, params, field)?;
        let gamma = mel.orbit().clone();
        if gamma.energy < annulus.0 || gamma.energy > annulus.1 {
            catalogue.entries.push(entry);
            continue;
        }
        entry.energy = Some(gamma.energy);
        let result = mel.result();
        entry.melnikov_zeros = result.zeros.len();
        entry.seeds = result.zeros.len();
        for (i, &t0) in result.zeros.iter().enumerate() {
            let seed = gamma.state_at(t0)?;
            if known.iter().any(|p| p.distance(&seed) <= opts.dedup_tol) {
                continue;
            }
            match find_orbit_with(n, params, field, seed, &gamma, opts) {
                Ok(record) => {
                    let x = record.fixed_point;
                    if known.iter().any(|p| p.distance(&x) <= opts.dedup_tol) {
                        continue;
                    }
                    let traj = flow(
                        x,
                        params,
                        field,
                        record.minimal_multiple,
                        opts.integration_tol,
                    )?;
                    known.push(x);
                    for m in 1..record.minimal_multiple {
                        known.push(traj.eval(m as f64 * params.drive_period)?);
                    }
                    entry.orbits.push(record);
                }
                Err(error) => entry.failures.push(SeedFailure {
                    n,
                    seed_index: i,
                    seed,
                    error,
                }),
            }
        }
        catalogue.entries.push(entry);
    }
    Ok(catalogue)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::melnikov::resonant_orbit;

    fn perturbed(k: f64) -> PhysParams {
        PhysParams::canonical().with_modulation(k)
    }

    #[test]
    fn unperturbed_map_fixes_the_equilibrium_and_gamma1() {
        let p = PhysParams::canonical();
        let field = FieldModel::Constant;
        let eq = RadialState { r: 1.0, pr: 0.0 };
        assert!(stroboscopic_map(eq, &p, &field, 1).unwrap().distance(&eq) <= 1e-12);
        let gamma = resonant_orbit(1, &p).unwrap();
        for &t in &[0.0, 1.3, 4.4] {
            let x = gamma.state_at(t).unwrap();
            assert!(stroboscopic_map(x, &p, &field, 1).unwrap().distance(&x) <= 1e-9);
        }
    }

    #[test]
    fn map_preserves_area() {
        let p = perturbed(1e-3);
        let field = FieldModel::retarded_sine();
        let (_, jac) = map_jacobian(
            RadialState { r: 2.0, pr: 0.3 },
            &p,
            &field,
            1,
            &FinderOptions::default(),
        )
        .unwrap();
        assert!(
            (jac.determinant() - 1.0).abs() <= 1e-6,
            "{}",
            jac.determinant()
        );
    }

    #[test]
    fn multipliers_of_model_matrices() {
        let rot = Monodromy {
            matrix: [[0.6, -0.8], [0.8, 0.6]],
        };
        assert_eq!(rot.kind(), OrbitKind::Elliptic);
        assert!(rot
            .multipliers()
            .iter()
            .all(|m| (m.modulus() - 1.0).abs() < 1e-15));
        let hyp = Monodromy {
            matrix: [[2.0, 0.0], [0.0, 0.5]],
        };
        assert_eq!(hyp.kind(), OrbitKind::Hyperbolic);
        let m = hyp.multipliers();
        assert!((m[0].re * m[1].re - 1.0).abs() < 1e-15);
        let shear = Monodromy {
            matrix: [[1.0, 3.0], [0.0, 1.0]],
        };
        assert_eq!(shear.kind(), OrbitKind::Parabolic);
    }

    #[test]
    fn zero_modulation_is_rejected() {
        let p = PhysParams::canonical();
        let seed = RadialState { r: 2.0, pr: 0.0 };
        assert_eq!(
            find_orbit(1, &p, &FieldModel::sine_ansatz(), seed),
            Err(Error::DegenerateFamily)
        );
    }

    #[test]
    fn harmonic_orbit_scales_with_k() {
        let field = FieldModel::sine_ansatz();
        let p = perturbed(1e-3);
        let mel = Melnikov::new(1, &p, &field).unwrap();
        let zeros = mel.result().zeros;
        let seed = mel.orbit().state_at(zeros[0]).unwrap();
        let a = find_orbit(1, &p, &field, seed).unwrap();
        let b = find_orbit(1, &perturbed(5e-4), &field, seed).unwrap();
        assert!(a.iterations <= 15, "{}", a.iterations);
        assert!(a.residual <= 1e-9);
        assert!((a.jacobian_determinant - 1.0).abs() <= 1e-6);
        let ratio = b.distance_to_unperturbed / a.distance_to_unperturbed;
        assert!((0.3..=0.7).contains(&ratio), "{ratio}");
    }
}
