//! Charge-basis spectrum against the phase-grid discretisation.

mod common;

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::phase_grid::{lobpcg, PhaseGrid};
use vortexgate::spectral::{build_hamiltonian, ground_snapshot, ChargeBasis, Gauge};
use vortexgate::CircuitParams;

fn charge_basis_levels(p: &CircuitParams, flux: f64, q: u8) -> (f64, f64) {
    let h = build_hamiltonian(p, flux, q, ChargeBasis::default(), Gauge::FluxOnJ2);
    let s = ground_snapshot(&h, flux).unwrap();
    (s.ground_energy, s.first_gap)
}

#[test]
fn ground_energies_match_phase_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for point in 0..10 {
        let eps = rng.random_range(0.0..0.1);
        let alpha = rng.random_range(1.5..3.0);
        let e_c = rng.random_range(0.25..0.6);
        let p = CircuitParams::symmetric(eps, alpha, e_c)
            .with_gate_charges(rng.random_range(0.0..1.0), rng.random_range(-0.5..0.5));
        let flux = rng.random_range(0.0..TAU);
        let q = rng.random_range(0..2u8);
        let (e0, _) = charge_basis_levels(&p, flux, q);
        let grid = lobpcg(&PhaseGrid::new(&p, flux, q), 2, point);
        let diff = (grid[0] - e0).abs();
        println!("point {point}: charge {e0:.12} grid {:.12} diff {diff:.2e}", grid[0]);
        assert!(diff < 1e-6 * p.j(), "point {point}: {e0} vs {}", grid[0]);
    }
}

#[test]
fn gap_at_half_flux_matches_phase_grid() {
    let p = CircuitParams::default().with_epsilon(0.05);
    for q in [0, 1] {
        let (e0, gap) = charge_basis_levels(&p, PI, q);
        let grid = lobpcg(&PhaseGrid::new(&p, PI, q), 3, 7 + u64::from(q));
        println!("q={q}: gap charge {gap:.12} grid {:.12}", grid[1] - grid[0]);
        assert!((grid[0] - e0).abs() < 1e-6 * p.j());
        assert!((grid[1] - grid[0] - gap).abs() < 1e-6 * p.j());
    }
}
