//! Minima of the two-island potential at a few fluxes, and the closed-form
//! degenerate pair at half a flux quantum.
//!
//! Usage: `cargo run --release --example potential_landscape`

use std::f64::consts::PI;

use vortexgate::potential::{degenerate_minima_closed_form, minimize_potential, two_path_condition};
use vortexgate::CircuitParams;

fn main() -> vortexgate::Result<()> {
    let params = CircuitParams::symmetric(0.05, 2.0, 0.4);
    println!("two-path condition holds: {}", two_path_condition(&params));
    for flux in [0.0, PI / 2.0, PI] {
        println!("flux {flux:.4}");
        for m in minimize_potential(&params, flux, 256)? {
            println!(
                "  phi1 {:>9.6} phi2 {:>9.6} delta {:>9.6} V {:>10.6} degenerate {}",
                m.phi1, m.phi2, m.delta_phi, m.v_min_numeric, m.degenerate
            );
        }
    }
    let closed = degenerate_minima_closed_form(&params)?;
    println!(
        "closed form at pi: delta_phi +-{:.6}, phi_bar {:.6} / {:.6}, V_min {:.6}",
        closed.delta_phi, closed.phi_bar, closed.phi_bar_partner, closed.v_min_formula
    );
    Ok(())
}
