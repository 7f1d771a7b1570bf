//! Property tests over randomly drawn inputs.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use vortexgate::chsh::{self, Axis, ChshSettings, MajoranaRegister, Mzm, Qubit};
use vortexgate::cli::parse_angle;
use vortexgate::potential::{self, wrap_angle};
use vortexgate::protocol::{self, DeviceGraph, Side, Switch};
use vortexgate::spectral::{build_hamiltonian, ChargeBasis, Gauge};
use vortexgate::{instanton, CircuitParams, Error};

fn valid_params() -> impl Strategy<Value = CircuitParams> {
    (0.0..0.2f64, 1.2..4.0f64, 0.1..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(
        |(eps, alpha, e_c, qp, qm)| CircuitParams::symmetric(eps, alpha, e_c).with_gate_charges(qp, qm),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrap_angle_range(x in -100.0..100.0f64) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI - 1e-12 && w <= PI + 1e-12);
        prop_assert!(((x - w) / TAU - ((x - w) / TAU).round()).abs() < 1e-9);
    }

    #[test]
    fn potential_is_periodic(p in valid_params(), a in -PI..PI, b in -PI..PI, f in 0.0..TAU) {
        let v = potential::potential_energy(&p, a, b, f);
        prop_assert!((v - potential::potential_energy(&p, a + TAU, b, f)).abs() < 1e-12);
        prop_assert!((v - potential::potential_energy(&p, a, b - TAU, f)).abs() < 1e-12);
        // a full flux quantum is a relabelling of the phases in the split gauge
        let shifted = potential::potential_energy(&p, a - PI, b + PI, f);
        prop_assert!((shifted - potential::potential_energy(&p, a, b, f + TAU)).abs() < 1e-12);
    }

    #[test]
    fn slice_lower_bounds_potential(p in valid_params(), d in -PI..PI, bar in -PI..PI, f in 0.0..TAU) {
        let (_, e) = potential::landscape_slice(&p, f, &[d])[0];
        let phi1 = bar + 0.5 * d;
        let phi2 = bar - 0.5 * d;
        prop_assert!(potential::potential_energy(&p, phi1, phi2, f) >= e - 1e-12);
    }

    #[test]
    fn hamiltonian_hermitian_and_periodic(p in valid_params(), f in 0.0..TAU, q in 0u8..2) {
        let basis = ChargeBasis::new(3);
        for g in Gauge::ALL {
            let h = build_hamiltonian(&p, f, q, basis, g);
            let h2 = build_hamiltonian(&p, f + TAU, q, basis, g);
            for i in 0..h.dim() {
                for j in 0..h.dim() {
                    prop_assert!((h.get(i, j) - h.get(j, i).conj()).norm() < 1e-14);
                    prop_assert!((h.get(i, j) - h2.get(i, j)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn transition_probabilities_sum(d in 0.0..5.0f64, beta in -PI..PI) {
        let (pe, po) = instanton::transition_probabilities(d, beta);
        prop_assert!(pe >= 0.0 && po >= 0.0);
        // parallelogram law for |1 + z| and |1 - z|
        prop_assert!((pe * pe + po * po - 2.0 * (1.0 + (-2.0 * d).exp())).abs() < 1e-12);
    }

    #[test]
    fn unitary_encodes_gate_phase(d in 0.01..5.0f64, beta in 0.1..3.0f64) {
        let u = instanton::gate_unitary_from(d, beta).unwrap();
        let rel = wrap_angle(u[0].arg() - u[1].arg());
        prop_assert!(wrap_angle(rel - instanton::gate_phase(d, beta).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn gate_phase_inverse_round_trips(target in 0.05..1.5f64) {
        let template = CircuitParams::default();
        match instanton::solve_epsilon_for_phase(target, &template) {
            Ok(eps) => {
                let got = instanton::predict(&template.with_epsilon(eps)).unwrap().gate_phase_2theta;
                prop_assert!((got - target).abs() < 1e-9);
            }
            Err(Error::Unattainable { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn chsh_matches_curve(theta in -PI..PI) {
        prop_assert!((chsh::chsh_exact(theta).unwrap() - chsh::chsh_curve(theta)).abs() < 1e-10);
    }

    #[test]
    fn operations_preserve_norm_and_total_parity(
        ops in prop::collection::vec((0usize..3, 0usize..6, 1usize..6, any::<bool>()), 0..25),
        seed in any::<u64>(),
    ) {
        let mut rng = chsh::stream(seed, 0);
        let mut reg = MajoranaRegister::bell(&mut rng).unwrap();
        let total = reg.algebra().total_parity();
        for (kind, a, shift, flag) in ops {
            let (a, b) = (Mzm(a), Mzm((a + shift) % 6));
            match kind {
                0 => reg.braid(a, b, if flag { 1 } else { -1 }),
                1 => { reg.measure_parity(a, b, None, &mut rng).unwrap(); }
                _ => reg.phase_gate(0.3, if flag { Qubit::Lower } else { Qubit::Upper }, Axis::Y),
            }
            prop_assert!((reg.norm() - 1.0).abs() < 1e-12);
            prop_assert!((reg.expectation(&total) - 1.0).abs() < 1e-12);
        }
        prop_assert!(reg.chsh_value(ChshSettings::default()).abs() <= 2.0 * 2f64.sqrt() + 1e-10);
    }

    #[test]
    fn clifford_sequences_respect_bound(seed in any::<u64>()) {
        let v = chsh::clifford_ceiling_search(20, seed, chsh::OpPool::Clifford).unwrap();
        prop_assert!(v <= 2.0 + 1e-10);
    }

    #[test]
    fn partition_is_consistent(mask in 0u32..(1 << 11)) {
        let d = DeviceGraph::chsh_device();
        let ids = d.adjustable();
        let states: BTreeMap<u32, Switch> = d
            .junctions
            .iter()
            .map(|j| {
                let on = match ids.iter().position(|x| *x == j.id) {
                    Some(k) => mask >> k & 1 == 1,
                    None => true,
                };
                (j.id, if on { Switch::On } else { Switch::Off })
            })
            .collect();
        match protocol::partition(&d, &states) {
            Ok(p) => {
                prop_assert_eq!(p.len(), d.islands.len());
                // any on junction joins islands with equal labels
                for j in &d.junctions {
                    if states[&j.id] != Switch::On {
                        continue;
                    }
                    let side = |n: &str| {
                        if n == d.bus { Some(Side::Bus) } else if n == d.ground { Some(Side::Ground) } else { p.get(n).copied() }
                    };
                    prop_assert_eq!(side(&j.between[0]), side(&j.between[1]));
                }
            }
            Err(Error::ShortCircuit(ids)) => prop_assert!(!ids.is_empty()),
            Err(e) => prop_assert!(false, "{e}"),
        }
    }

    #[test]
    fn angle_parser_round_trip(num in 1i32..16, den in 1i32..33) {
        let v = parse_angle(&format!("{num}pi/{den}")).unwrap();
        prop_assert!((v - f64::from(num) * PI / f64::from(den)).abs() < 1e-15);
        prop_assert_eq!(parse_angle(&format!("{v}")), Some(v));
    }
}
