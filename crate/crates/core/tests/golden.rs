//! Compiled configurations against checked-in JSON. Set
//! `VORTEXGATE_BLESS=1` to rewrite the files after an intended change.

use std::path::PathBuf;

use vortexgate::protocol::{compile_measurement, compile_pauli_product, DeviceGraph};

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn check(name: &str, actual: &str) {
    let path = golden_dir().join(format!("{name}.json"));
    if std::env::var_os("VORTEXGATE_BLESS").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(actual, expected, "{name} differs from golden file");
}

#[test]
fn chsh_device_targets() {
    let d = DeviceGraph::chsh_device();
    for label in ["tare", "init-1", "init-2", "upperX", "upperZ", "lowerx", "lowerz"] {
        check(label, &compile_measurement(&d, label).unwrap().to_json());
    }
}

#[test]
fn ramm_xiz() {
    let d = DeviceGraph::ramm_device();
    let m = compile_pauli_product(&d, "XIZ").unwrap();
    let mut s = serde_json::to_string_pretty(&m).unwrap();
    s.push('\n');
    check("ramm_XIZ", &s);
}
