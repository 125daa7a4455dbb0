//! The subcommands. Each writes its files through [`io::write_atomic`] and
//! returns their names for the manifest.

use std::path::PathBuf;

use lorentz_wire_core::melnikov::Melnikov;
use lorentz_wire_core::model::{equilibrium, instantaneous_energy, reconstruct_full_motion};
use lorentz_wire_core::orbitfinder::{
    scan_orbits_with, Catalogue, FinderOptions, OrbitKind, OrbitRecord,
};
use lorentz_wire_core::periodmap::PeriodMap;
use lorentz_wire_core::potential::{potential_grid, PotentialQuadrature};
use lorentz_wire_core::verify::{audit_chain, verify_appendix};
use lorentz_wire_core::{integrator, RadialState};
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliResult;
use crate::io::{fmt_f64, to_json, write_atomic, Table};

/// Files written by a subcommand and the number of failed checks.
#[derive(Debug, Default)]
pub struct Outcome {
    pub outputs: Vec<PathBuf>,
    pub failures: usize,
}

impl Outcome {
    fn write(&mut self, cfg: &RunConfig, name: &str, bytes: &[u8]) -> CliResult<()> {
        let path = write_atomic(&cfg.output.dir, name, bytes)?;
        println!("wrote {}", path.display());
        self.outputs.push(path);
        Ok(())
    }

    /// A table as CSV or as JSON, by the configured format.
    fn table<T: Serialize + ?Sized>(
        &mut self,
        cfg: &RunConfig,
        stem: &str,
        csv: Table,
        json: &T,
    ) -> CliResult<()> {
        match cfg.output.format {
            Format::Csv => self.write(cfg, &format!("{stem}.csv"), &csv.to_bytes()?),
            Format::Json => self.write(cfg, &format!("{stem}.json"), &to_json(json)?),
        }
    }
}

fn row<const N: usize>(values: [f64; N]) -> Vec<String> {
    values.iter().map(|&v| fmt_f64(v)).collect()
}

pub fn equilibrium_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let eq = equilibrium(&cfg.params)?;
    println!("r_bar     = {}", fmt_f64(eq.r_bar));
    println!("H0        = {}", fmt_f64(eq.h0));
    println!("T0_lin    = {}", fmt_f64(eq.t0_lin));
    match eq.t0_lemma3 {
        Some(t) => println!("T0_lemma3 = {}", fmt_f64(t)),
        None => println!("T0_lemma3 = undefined"),
    }
    let mut out = Outcome::default();
    out.write(cfg, "equilibrium.json", &to_json(&eq)?)?;
    Ok(out)
}

pub fn period_map_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let mut map = PeriodMap::new(&cfg.params)?;
    map.quad_tol = cfg.tolerances.quadrature;
    let h_max = cfg.period_map.h_max.unwrap_or(map.equilibrium().h0 + 5.0);
    let table = map.build_table(h_max, cfg.period_map.points)?;
    let mut csv = Table::new(&["H", "T", "r_a", "r_b"]);
    for e in &table.entries {
        csv.push(row([e.h, e.t, e.r_a, e.r_b]));
    }
    let mut out = Outcome::default();
    out.table(cfg, "period_map", csv, &table)?;
    Ok(out)
}

pub fn potential_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let s = &cfg.potential;
    let waveform = cfg.field.waveform(&cfg.params)?;
    let t1 = cfg.params.drive_period;
    let times: Vec<f64> = (0..s.times)
        .map(|j| t1 * j as f64 / s.times as f64)
        .collect();
    let radii: Vec<f64> = (0..s.points)
        .map(|j| match s.points {
            1 => s.r_min,
            n => s.r_min + (s.r_max - s.r_min) * j as f64 / (n - 1) as f64,
        })
        .collect();
    let opts = PotentialQuadrature {
        tol: cfg.tolerances.quadrature,
        ..PotentialQuadrature::default()
    };
    let grid = potential_grid(&times, &radii, &waveform, &opts)?;
    let mut csv = Table::new(&["t", "r", "a", "da_dr"]);
    for p in &grid {
        csv.push(row([p.t, p.r, p.value, p.dvalue_dr]));
    }
    let mut out = Outcome::default();
    out.table(cfg, "potential", csv, &grid)?;
    Ok(out)
}

pub fn melnikov_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let n = cfg.melnikov.n;
    let field = cfg.field.build(&cfg.params)?;
    let m = Melnikov::new(n, &cfg.params, &field)?;
    let result = m.result();
    let omega1 = cfg.params.omega1();
    let span = n as f64 * cfg.params.drive_period;
    let samples = cfg.melnikov.samples;
    let mut csv = Table::new(&["t0", "M_fourier", "M_quadrature"]);
    let mut curve = Vec::with_capacity(samples);
    for j in 0..samples {
        let t0 = span * j as f64 / samples as f64;
        let (f, q) = (result.eval(t0, omega1), m.value(t0));
        csv.push(row([t0, f, q]));
        curve.push([t0, f, q]);
    }
    println!(
        "n = {n}: H_n = {}, amplitude = {}, {} zeros, simple = {}",
        fmt_f64(result.h_n),
        fmt_f64(result.amplitude),
        result.zeros.len(),
        result.simple
    );
    let mut out = Outcome::default();
    out.write(cfg, "melnikov.json", &to_json(&result)?)?;
    out.table(cfg, "melnikov_curve", csv, &curve)?;
    Ok(out)
}

#[derive(Serialize)]
struct ScanSummary {
    n: usize,
    #[serde(rename = "H_n")]
    energy: Option<f64>,
    melnikov_zeros: usize,
    seeds: usize,
    orbits: usize,
    elliptic: usize,
    hyperbolic: usize,
    failures: Vec<SeedFailureReport>,
}

#[derive(Serialize)]
struct SeedFailureReport {
    seed_index: usize,
    seed: RadialState,
    error: String,
}

fn summarize(catalogue: &Catalogue) -> Vec<ScanSummary> {
    catalogue
        .entries
        .iter()
        .map(|e| {
            let count = |k: OrbitKind| e.orbits.iter().filter(|o| o.kind == k).count();
            ScanSummary {
                n: e.n,
                energy: e.energy,
                melnikov_zeros: e.melnikov_zeros,
                seeds: e.seeds,
                orbits: e.orbits.len(),
                elliptic: count(OrbitKind::Elliptic),
                hyperbolic: count(OrbitKind::Hyperbolic),
                failures: e
                    .failures
                    .iter()
                    .map(|f| SeedFailureReport {
                        seed_index: f.seed_index,
                        seed: f.seed,
                        error: f.error.to_string(),
                    })
                    .collect(),
            }
        })
        .collect()
}

pub fn find_orbits_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let o = &cfg.orbits;
    let params = cfg.params.with_modulation(o.k);
    let field = cfg.field.build(&params)?;
    let defaults = FinderOptions::default();
    let opts = FinderOptions {
        integration_tol: cfg.tolerances.integration,
        newton_tol: cfg.tolerances.newton,
        accept_tol: defaults.accept_tol.max(cfg.tolerances.newton),
        ..defaults
    };
    let annulus = (o.h_min.unwrap_or(0.0), o.h_max.unwrap_or(f64::INFINITY));
    let catalogue = scan_orbits_with(o.n_max, &params, &field, annulus, &opts)?;
    let records: Vec<&OrbitRecord> = catalogue.orbits().collect();
    let mut csv = Table::new(&[
        "n",
        "r_fixed",
        "pr_fixed",
        "residual",
        "|floquet_1|",
        "kind",
        "distance",
        "k",
    ]);
    for r in &records {
        let mut cells = vec![r.n.to_string()];
        cells.extend(row([
            r.fixed_point.r,
            r.fixed_point.pr,
            r.residual,
            r.floquet[0].modulus(),
        ]));
        cells.push(r.kind.as_str().to_string());
        cells.extend(row([r.distance_to_unperturbed, r.k]));
        csv.push(cells);
    }
    let summary = summarize(&catalogue);
    for s in &summary {
        let energy = s.energy.map_or_else(|| "none".to_string(), fmt_f64);
        println!(
            "n = {}: H_n = {energy}, {} zeros, {} orbits ({} elliptic, {} hyperbolic), {} failed seeds",
            s.n,
            s.melnikov_zeros,
            s.orbits,
            s.elliptic,
            s.hyperbolic,
            s.failures.len()
        );
    }
    let mut out = Outcome::default();
    out.write(cfg, "orbits.json", &to_json(&records)?)?;
    out.write(cfg, "orbits.csv", &csv.to_bytes()?)?;
    out.write(cfg, "orbits_scan.json", &to_json(&summary)?)?;
    Ok(out)
}

pub fn simulate_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let s = &cfg.simulate;
    let params = &cfg.params;
    let field = cfg.field.build(params)?;
    let start = RadialState::new(s.r0, s.pr0)?;
    let traj = integrator::integrate(
        start,
        0.0,
        s.t_end,
        params,
        &field,
        cfg.tolerances.integration,
    )?;
    let times: Vec<f64> = (0..s.points)
        .map(|j| match s.points {
            1 => 0.0,
            n => s.t_end * j as f64 / (n - 1) as f64,
        })
        .collect();
    let states = times
        .iter()
        .map(|&t| traj.eval(t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = Table::new(&["t", "r", "pr", "H"]);
    let mut rows = Vec::with_capacity(times.len());
    for (&t, &st) in times.iter().zip(&states) {
        let h = instantaneous_energy(t, st, params, &field)?;
        csv.push(row([t, st.r, st.pr, h]));
        rows.push([t, st.r, st.pr, h]);
    }
    let mut out = Outcome::default();
    out.table(cfg, "trajectory", csv, &rows)?;
    if s.full {
        let full = reconstruct_full_motion(&times, &states, params, &field)?;
        let mut csv = Table::new(&[
            "t",
            "r",
            "theta",
            "z",
            "r_dot",
            "theta_dot",
            "z_dot",
            "gamma",
        ]);
        for f in &full {
            csv.push(row([
                f.t,
                f.r,
                f.theta,
                f.z,
                f.r_dot,
                f.theta_dot,
                f.z_dot,
                f.gamma,
            ]));
        }
        out.table(cfg, "full_motion", csv, &full)?;
    }
    Ok(out)
}

pub fn verify_cmd(cfg: &RunConfig) -> CliResult<Outcome> {
    let tol = cfg.verify.tol;
    let reports = verify_appendix(tol)?;
    let audit = audit_chain(tol)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        println!(
            "FAIL {} on {}: min {}",
            r.claim,
            r.grid,
            fmt_f64(r.min_value)
        );
    }
    println!("{} checks, {} failed", reports.len(), failed.len());
    let audit_failed = audit.iter().filter(|r| !r.pass).count();
    println!(
        "chain audit: {} checks, {audit_failed} intermediate claims do not hold",
        audit.len()
    );
    let mut out = Outcome::default();
    out.write(cfg, "verify.json", &to_json(&reports)?)?;
    out.write(cfg, "verify_audit.json", &to_json(&audit)?)?;
    out.failures = failed.len();
    Ok(out)
}
