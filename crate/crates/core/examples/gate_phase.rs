//! Gate phase from the exact adiabatic sweep next to the instanton
//! estimate, at the symmetric point and for a few charging energies.
//!
//! Usage: `cargo run --release --example gate_phase`

use vortexgate::spectral::{ChargeBasis, CircuitRun, SweepConfig};
use vortexgate::{instanton, CircuitParams};

fn main() -> vortexgate::Result<()> {
    let sweep = SweepConfig::default();
    println!("{:>6} {:>6} {:>12} {:>12} {:>10}", "E_C", "eps", "numeric", "instanton", "overlap");
    for e_c in [0.4, 0.2, 0.1] {
        for eps in [0.0, 0.02] {
            let params = CircuitParams::symmetric(eps, 2.0, e_c).with_gate_charges(0.25, 0.0);
            let n_cutoff = 15;
            let run = CircuitRun::new(&params, &sweep, ChargeBasis::new(n_cutoff))?;
            let predicted = instanton::predict(&params)?.gate_phase_2theta;
            println!(
                "{:>6.3} {:>6.3} {:>12.6} {:>12.6} {:>10.6}",
                e_c,
                eps,
                run.qubit_phase()?,
                predicted,
                run.min_overlap()?
            );
        }
    }
    Ok(())
}
