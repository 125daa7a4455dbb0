//! Property tests of the model invariants.

use lorentz_wire_core::model::{
    derived_constants, equilibrium, hamiltonian, perturbation_coefficients, vector_field,
};
use lorentz_wire_core::orbitfinder::{Monodromy, OrbitKind};
use lorentz_wire_core::periodmap::PeriodMap;
use lorentz_wire_core::potential::{delayed_potential, PotentialQuadrature, Waveform};
use lorentz_wire_core::verify::{p_function, p_polynomial};
use lorentz_wire_core::{integrator, FieldModel, PhysParams, RadialState};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = PhysParams> {
    (0.3f64..3.0, 0.2f64..3.0, -2.0f64..2.0, 1.0f64..4.0).prop_map(|(i0, l, pz, mu_scale)| {
        PhysParams {
            base_current: i0,
            angular_momentum: l,
            axial_momentum: pz,
            mu0: 2.0 * std::f64::consts::PI * mu_scale,
            ..PhysParams::canonical()
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn equilibrium_is_a_critical_point(p in params()) {
        let eq = equilibrium(&p).unwrap();
        let c = p.coupling();
        let l2 = p.angular_momentum * p.angular_momentum;
        let kin = p.axial_momentum + c * eq.r_bar.ln();
        let residual = kin * c * eq.r_bar * eq.r_bar - l2;
        prop_assert!(residual.abs() <= 1e-12 * (l2 + (kin * c * eq.r_bar * eq.r_bar).abs()));
        let (_, force) = vector_field(0.0, RadialState { r: eq.r_bar, pr: 0.0 }, &p, &FieldModel::Constant).unwrap();
        prop_assert!(force.abs() <= 1e-12);
    }

    #[test]
    fn hamiltonian_exceeds_rest_energy(p in params(), r in 0.01f64..50.0, pr in -5.0f64..5.0) {
        let h = hamiltonian(RadialState { r, pr }, &p).unwrap();
        prop_assert!(h > 1.0);
    }

    #[test]
    fn unperturbed_field_is_reversible(p in params(), r in 0.05f64..20.0, pr in -5.0f64..5.0) {
        let f = FieldModel::Constant;
        let (a, b) = vector_field(0.0, RadialState { r, pr }, &p, &f).unwrap();
        let (c, d) = vector_field(0.0, RadialState { r, pr: -pr }, &p, &f).unwrap();
        prop_assert_eq!((c, d), (-a, b));
    }

    #[test]
    fn coefficients_are_k_derivatives(p in params(), r in 0.2f64..8.0, pr in -2.0f64..2.0, t in 0.0f64..7.0) {
        let field = FieldModel::retarded_sine();
        let s = RadialState { r, pr };
        let (g1, g2) = perturbation_coefficients(t, s, &p, &field).unwrap();
        let h = 1e-5;
        let plus = vector_field(t, s, &p.with_modulation(h), &field).unwrap();
        let minus = vector_field(t, s, &p.with_modulation(-h), &field).unwrap();
        prop_assert!(((plus.0 - minus.0) / (2.0 * h) - g1).abs() <= 1e-6 * (1.0 + g1.abs()));
        prop_assert!(((plus.1 - minus.1) / (2.0 * h) - g2).abs() <= 1e-6 * (1.0 + g2.abs()));
    }

    #[test]
    fn substitution_constants_are_related(p in params()) {
        let d = derived_constants(&p).unwrap();
        prop_assert!(d.k_sub > 0.0 && d.a_sub > 0.0);
        let rel = (d.i_sub * d.x0 * d.x0 * d.x0.ln() - d.k_sub) / d.k_sub;
        prop_assert!(rel.abs() <= 1e-12);
    }

    #[test]
    fn collected_polynomial_matches_products(x in -20.0f64..20.0, a in 1e-3f64..50.0) {
        let (poly, scale) = p_polynomial(x, a).unwrap();
        let direct = p_function(x, a).unwrap();
        prop_assert!((poly - direct).abs() <= 1e-9 * scale);
    }

    #[test]
    fn period_increases_and_bounds_the_chord(p in params(), d1 in 1e-3f64..3.0, d2 in 1e-3f64..3.0) {
        prop_assume!((d1 - d2).abs() > 1e-6);
        let map = PeriodMap::new(&p).unwrap();
        let h0 = map.equilibrium().h0;
        let (lo, hi) = (h0 + d1.min(d2), h0 + d1.max(d2));
        let (tl, th) = (map.period(lo).unwrap(), map.period(hi).unwrap());
        prop_assert!(th > tl);
        for (h, t) in [(lo, tl), (hi, th)] {
            let tp = map.turning_points(h).unwrap();
            prop_assert!(t >= 2.0 * (tp.r_b - tp.r_a));
        }
    }

    #[test]
    fn symplectic_matrices_have_reciprocal_multipliers(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
        prop_assume!(a.abs() > 0.1);
        // det = 1 by construction
        let m = Monodromy { matrix: [[a, b], [c, (1.0 + b * c) / a]] };
        let [l1, l2] = m.multipliers();
        match m.kind() {
            OrbitKind::Hyperbolic => prop_assert!((l1.re * l2.re - 1.0).abs() <= 1e-9),
            OrbitKind::Elliptic => {
                prop_assert!((l1.modulus() - 1.0).abs() <= 1e-9 && (l2.modulus() - 1.0).abs() <= 1e-9);
            }
            OrbitKind::Parabolic => prop_assert!((m.trace().abs() - 2.0).abs() <= 1e-8),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn potential_is_linear_in_the_current(alpha in -3.0f64..3.0, t in 0.0f64..7.0, r in 0.1f64..6.0) {
        prop_assume!(alpha.abs() > 1e-3);
        let w = Waveform::sine(7.0).unwrap();
        let opts = PotentialQuadrature::default();
        let one = delayed_potential(t, r, &w, &opts).unwrap();
        let scaled = delayed_potential(t, r, &w.scaled(alpha), &opts).unwrap();
        prop_assert!((scaled.value - alpha * one.value).abs() <= 1e-10 * (alpha * one.value).abs().max(1e-12));
    }

    #[test]
    fn half_orbit_reflects_onto_the_second_half(delta in 0.05f64..2.0) {
        let p = PhysParams::canonical();
        let map = PeriodMap::new(&p).unwrap();
        let h = map.equilibrium().h0 + delta;
        let tp = map.turning_points(h).unwrap();
        let tol = 1e-11;
        let (period, traj) = integrator::closed_orbit(RadialState { r: tp.r_b, pr: 0.0 }, &p, tol).unwrap();
        for i in 1..16 {
            let s = 0.5 * period * i as f64 / 16.0;
            let a = traj.eval(s).unwrap();
            let b = traj.eval(period - s).unwrap();
            prop_assert!((a.r - b.r).abs() <= 10.0 * tol * (1.0 + a.r) && (a.pr + b.pr).abs() <= 10.0 * tol * (1.0 + a.pr.abs()));
        }
    }

    #[test]
    fn zero_modulation_matches_unperturbed_flow(r in 0.5f64..3.0, pr in -1.0f64..1.0) {
        let p = PhysParams::canonical();
        let start = RadialState { r, pr };
        let a = integrator::integrate(start, 0.0, 10.0, &p, &FieldModel::Constant, 1e-11).unwrap().end();
        let b = integrator::integrate(start, 0.0, 10.0, &p, &FieldModel::retarded_sine(), 1e-11).unwrap().end();
        prop_assert!(a.distance(&b) <= 1e-10);
    }
}
