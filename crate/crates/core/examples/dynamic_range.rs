//! Dynamic range of the flux sweep over gate charge, with the resonance
//! where the parity splitting at half a flux quantum vanishes.
//!
//! Usage: `cargo run --release --example dynamic_range`

use vortexgate::spectral::{dynamic_range_table, locate_resonance, ChargeBasis, SweepConfig};
use vortexgate::CircuitParams;

fn main() -> vortexgate::Result<()> {
    let template = CircuitParams::symmetric(0.05, 2.0, 0.4);
    let sweep = SweepConfig::uniform(64);
    let basis = ChargeBasis::default();
    let settings: Vec<(f64, f64)> = [0.10, 0.20, 0.25].iter().map(|&qp| (0.05, qp)).collect();
    println!("{:>6} {:>10} {:>12} {:>12}", "Q+", "zeta", "min gap", "max split");
    for row in dynamic_range_table(&template, &settings, &sweep, basis, 1)? {
        println!(
            "{:>6.3} {:>10.3} {:>12.6} {:>12.3e}",
            row.q_plus, row.range.zeta, row.range.min_gap, row.range.max_splitting
        );
    }
    let grid: Vec<f64> = (0..=15).map(|k| 0.20 + 0.01 * f64::from(k)).collect();
    let res = locate_resonance(&template, &grid, &sweep, basis)?;
    println!(
        "resonance at Q+ {:.5}: zeta {:.1} (bracketed {})",
        res.q_plus, res.range.zeta, res.bracketed
    );
    Ok(())
}
