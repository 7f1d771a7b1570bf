use nalgebra::{DMatrix, SymmetricEigen};

use super::*;

fn small() -> ChargeBasis {
    ChargeBasis::new(6)
}

fn dense_spectrum(h: &BandedHermitian) -> Vec<f64> {
    let d = h.to_dense();
    let n = d.len();
    let m = DMatrix::from_fn(n, n, |i, j| d[i][j]);
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

fn params() -> CircuitParams {
    CircuitParams::default().with_epsilon(0.05)
}

#[test]
fn hamiltonian_is_hermitian() {
    let h = build_hamiltonian(&params(), 1.3, 1, small(), Gauge::FluxOnJ1);
    let d = h.to_dense();
    for i in 0..d.len() {
        for j in 0..d.len() {
            assert!((d[i][j] - d[j][i].conj()).norm() < 1e-15);
        }
    }
}

#[test]
fn mul_vec_matches_dense() {
    let h = build_hamiltonian(&params(), 0.7, 0, small(), Gauge::FluxOnJ2);
    let d = h.to_dense();
    let x: Vec<Complex64> = (0..h.dim())
        .map(|i| Complex64::new((i as f64).sin(), (0.3 * i as f64).cos()))
        .collect();
    let mut y = vec![Complex64::default(); h.dim()];
    h.mul_vec(&x, &mut y);
    for i in 0..h.dim() {
        let r: Complex64 = (0..h.dim()).map(|j| d[i][j] * x[j]).sum();
        assert!((r - y[i]).norm() < 1e-12);
    }
}

#[test]
fn gauges_share_spectrum() {
    for flux in [0.0, 0.9, PI, 4.0] {
        let spectra: Vec<Vec<f64>> = Gauge::ALL
            .iter()
            .map(|&g| dense_spectrum(&build_hamiltonian(&params(), flux, 1, small(), g)))
            .collect();
        for s in &spectra[1..] {
            for (a, b) in s.iter().zip(&spectra[0]).take(10) {
                assert!((a - b).abs() < 1e-10, "flux {flux}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn flux_periodicity() {
    let a = build_hamiltonian(&params(), 0.4, 0, small(), Gauge::FluxOnJ3).to_dense();
    let b = build_hamiltonian(&params(), 0.4 + TAU, 0, small(), Gauge::FluxOnJ3).to_dense();
    for (ra, rb) in a.iter().zip(&b) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).norm() < 1e-12);
        }
    }
}

#[test]
fn pure_charging_ground_state() {
    let mut p = params().with_gate_charges(0.7, 0.1);
    p.j1 = 1e-12;
    p.j2 = 1e-12;
    p.j3 = 1e-12;
    let basis = small();
    let h = build_hamiltonian(&p, 0.0, 0, basis, Gauge::FluxOnJ3);
    let s = ground_snapshot(&h, 0.0).unwrap();
    let (at, _) = s
        .ground_state
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
        .unwrap();
    let (n1, n2) = basis.charges(at);
    assert_eq!((n1, n2), (p.q_gate_1.round() as i64, p.q_gate_2.round() as i64));
}

#[test]
fn snapshot_matches_dense() {
    let h = build_hamiltonian(&params(), 2.0, 1, small(), Gauge::FluxOnJ1);
    let s = ground_snapshot(&h, 2.0).unwrap();
    let d = dense_spectrum(&h);
    assert!((s.ground_energy - d[0]).abs() < 1e-10);
    assert!((s.first_gap - (d[1] - d[0])).abs() < 1e-8);
}

#[test]
fn grid_contains_refinement_window() {
    let g = SweepConfig::default().flux_grid();
    assert!(g.windows(2).all(|w| w[0] < w[1]));
    assert!(g.iter().any(|f| (f - PI).abs() < 1e-12));
    let inside = g.iter().filter(|f| (*f - PI).abs() <= 0.2 + 1e-12).count();
    assert!(inside >= 129);
    assert_eq!(SweepConfig::uniform(64).flux_grid().len(), 64);
    assert!(SweepConfig::uniform(8).validate().is_err());
}

fn quick_sweep() -> SweepConfig {
    SweepConfig {
        n_steps: 64,
        refinement_window: Some(RefinementWindow { steps: 32, width: 0.4 }),
        ..SweepConfig::default()
    }
}

#[test]
fn reverse_sweep_negates_phase() {
    let p = params();
    let fwd = berry_phase(&p, 1, &quick_sweep(), small()).unwrap().phase;
    let rev_cfg = SweepConfig {
        direction: Direction::Reverse,
        ..quick_sweep()
    };
    let rev = berry_phase(&p, 1, &rev_cfg, small()).unwrap().phase;
    assert!(wrap_angle(fwd + rev).abs() < 1e-10, "{fwd} {rev}");
}

#[test]
fn qubit_phase_gauge_invariant_small_basis() {
    let p = params();
    let phases: Vec<f64> = Gauge::ALL
        .iter()
        .map(|&g| qubit_phase(&p, &quick_sweep().with_gauge(g), small()).unwrap())
        .collect();
    for x in &phases[1..] {
        assert!((x - phases[0]).abs() < 1e-8, "{phases:?}");
    }
}

#[test]
fn decoupled_flux_phase_is_charge_expectation() {
    // with j2 -> 0 the state no longer depends on flux; only the frame
    // rotation exp(-i flux n2) of the J2 gauge is left, so the phase is
    // 2 pi <n2> up to third-cumulant corrections of order step^2
    let p = CircuitParams::default().with_epsilon(1.0 - 1e-9);
    let sweep = quick_sweep().with_gauge(Gauge::FluxOnJ2);
    let ps = sweep_parity(&p, 0, &sweep, small()).unwrap();
    let psi = &ps.snapshots[0].ground_state;
    let n2: f64 = psi
        .iter()
        .enumerate()
        .map(|(i, c)| c.norm_sqr() * small().charges(i).1 as f64)
        .sum();
    let b = ps.berry_phase(Direction::Forward).unwrap();
    assert!(wrap_angle(b.phase - TAU * n2).abs() < 1e-3, "{} vs {}", b.phase, TAU * n2);
}

#[test]
fn dynamical_phase_scales_inversely_with_rate() {
    let run = CircuitRun::new(&params(), &quick_sweep(), small()).unwrap();
    let a = run.dynamical_phase(0.01).unwrap();
    let b = run.dynamical_phase(0.02).unwrap();
    assert!((a - 2.0 * b).abs() < 1e-12 * a.abs().max(1.0));
    assert!(run.dynamical_phase(0.0).is_err());
    let r = run.dynamic_range();
    assert!(r.zeta > 0.0 && r.min_gap > 0.0);
}
