//! Instanton gate phase against junction asymmetry, and the inverse problem:
//! the asymmetry that yields a pi/4 phase gate.
//!
//! Usage: `cargo run --release --example instanton_design`

use std::f64::consts::PI;

use vortexgate::instanton::{predict, solve_epsilon_for_phase};
use vortexgate::CircuitParams;

fn main() -> vortexgate::Result<()> {
    let template = CircuitParams::symmetric(0.0, 2.0, 0.4).with_gate_charges(0.25, 0.0);
    println!("{:>6} {:>10} {:>10} {:>10} {:>8}", "eps", "d", "2theta", "p_odd", "regime");
    for k in 0..=8 {
        let eps = 0.01 * f64::from(k);
        let pred = predict(&template.with_epsilon(eps))?;
        println!(
            "{:>6.3} {:>10.5} {:>10.6} {:>10.6} {:>8}",
            eps, pred.d, pred.gate_phase_2theta, pred.p_odd, pred.in_regime
        );
    }
    let eps = solve_epsilon_for_phase(PI / 4.0, &template)?;
    let check = predict(&template.with_epsilon(eps))?.gate_phase_2theta;
    println!("pi/4 gate needs eps = {eps:.6} (phase {check:.9})");
    Ok(())
}
