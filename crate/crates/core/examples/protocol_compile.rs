//! Compiles every named measurement of the two-qubit device, the RAMM word
//! `XIZ`, and the full CHSH script at theta = pi/8.

use std::f64::consts::PI;

use vortexgate::protocol::{chsh_script, compile_measurement, compile_pauli_product, DeviceGraph};
use vortexgate::CircuitParams;

fn main() -> vortexgate::Result<()> {
    let device = DeviceGraph::chsh_device();
    for t in &device.targets {
        let c = compile_measurement(&device, &t.label)?;
        let bus: Vec<_> = c.partition.iter().filter(|(_, s)| **s == vortexgate::protocol::Side::Bus).map(|(k, _)| k.as_str()).collect();
        println!("{:<7} on {:?}  bus islands {:?}", t.label, c.on_set(), bus);
    }
    let ramm = DeviceGraph::ramm_device();
    let xiz = compile_pauli_product(&ramm, "XIZ")?;
    println!("XIZ     on {:?}  sign {:+}", xiz.config.on_set(), xiz.sign);

    let script = chsh_script(&device, PI / 8.0, &CircuitParams::default(), 0)?;
    println!(
        "script: {} steps, epsilon {:.6}, simulated CHSH {:.12}",
        script.steps.len(),
        script.epsilon,
        script.simulated_chsh
    );
    Ok(())
}
