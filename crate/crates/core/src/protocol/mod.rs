//! Compiles parity and Pauli measurements into junction settings and emits
//! the full CHSH experiment as an ordered list of steps.
//!
//! A configuration measures the joint parity of the modes whose islands are
//! connected to the bus. The complementary set on the phase ground is read
//! indirectly: once the total parity has been recorded by a tare run, the
//! ground parity is `sign * tare * bus`.

mod device;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

pub use device::{DeviceGraph, Island, Junction, JunctionKind, QubitModes, Side, Target};

use crate::chsh::{self, Axis, ChshSettings, MajoranaRegister, Mzm, Qubit};
use crate::error::{Error, Result};
use crate::instanton;
use crate::params::CircuitParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Switch {
    On,
    Off,
}

/// State of one junction in a protocol step; tunable junctions carry a
/// Josephson energy during the gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum JunctionSetting {
    Switch(Switch),
    Coupling(f64),
}

/// Junction states plus the induced island partition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementConfig {
    pub label: String,
    pub side: Side,
    pub mzms: Vec<String>,
    pub junction_states: BTreeMap<u32, Switch>,
    pub partition: BTreeMap<String, Side>,
}

impl MeasurementConfig {
    pub fn on_set(&self) -> Vec<u32> {
        self.junction_states
            .iter()
            .filter(|(_, s)| **s == Switch::On)
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }
}

/// Parity read out by a configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledOperator {
    pub label: String,
    pub side: Side,
    /// Modes of the reported parity, in device order.
    pub mzms: Vec<String>,
    pub bus_mzms: Vec<String>,
    /// `s` in `P_ground = s * P_bus * P_all`; only set for ground readout.
    pub tare_sign: Option<i8>,
}

/// Outcome of measuring the total parity with every island on the bus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TareRecord {
    pub outcome: i8,
}

impl TareRecord {
    /// Records `outcome` after checking that `config` really puts every mode
    /// on the bus.
    pub fn new(device: &DeviceGraph, config: &MeasurementConfig, outcome: i8) -> Result<Self> {
        let p = partition(device, &config.junction_states)?;
        if bus_modes(device, &p).len() != device.mzms.len() {
            return Err(Error::Device(format!("{} is not a tare configuration", config.label)));
        }
        Ok(Self {
            outcome: outcome.signum(),
        })
    }

    /// Ground-side outcome implied by a bus outcome.
    pub fn infer_ground(&self, op: &CompiledOperator, bus_outcome: i8) -> Result<i8> {
        let s = op.tare_sign.ok_or(Error::TareMissing)?;
        Ok(s * self.outcome * bus_outcome)
    }
}

fn states_from_on(device: &DeviceGraph, on: &[u32]) -> BTreeMap<u32, Switch> {
    device
        .junctions
        .iter()
        .map(|j| {
            let s = if j.kind == JunctionKind::FixedStrong || on.contains(&j.id) {
                Switch::On
            } else {
                Switch::Off
            };
            (j.id, s)
        })
        .collect()
}

/// Labels every island by the reservoir it connects to.
pub fn partition(device: &DeviceGraph, states: &BTreeMap<u32, Switch>) -> Result<BTreeMap<String, Side>> {
    let mut on = Vec::new();
    for j in &device.junctions {
        match states.get(&j.id) {
            Some(Switch::On) => on.push(j.id),
            Some(Switch::Off) if j.kind == JunctionKind::FixedStrong => {
                return Err(Error::Device(format!("junction {} cannot be switched off", j.id)))
            }
            Some(Switch::Off) => {}
            None if j.kind == JunctionKind::FixedStrong => on.push(j.id),
            None => return Err(Error::Device(format!("junction {} has no state", j.id))),
        }
    }
    partition_on(device, &on)
}

fn partition_on(device: &DeviceGraph, on: &[u32]) -> Result<BTreeMap<String, Side>> {
    let uf = device.components(on);
    let bus = uf.root(device.bus_index());
    let ground = uf.root(device.ground_index());
    if bus == ground {
        let shorted = device
            .junctions
            .iter()
            .filter(|j| {
                (j.kind == JunctionKind::FixedStrong || on.contains(&j.id))
                    && uf.root(device.node_index(&j.between[0])) == bus
            })
            .map(|j| j.id)
            .collect();
        return Err(Error::ShortCircuit(shorted));
    }
    Ok(device
        .islands
        .iter()
        .map(|i| {
            let r = uf.root(device.node_index(&i.name));
            let side = if r == bus {
                Side::Bus
            } else if r == ground {
                Side::Ground
            } else {
                Side::Floating
            };
            (i.name.clone(), side)
        })
        .collect())
}

fn modes_on(device: &DeviceGraph, p: &BTreeMap<String, Side>, side: Side) -> Vec<String> {
    let mut v: Vec<String> = device
        .islands
        .iter()
        .filter(|i| p[&i.name] == side)
        .flat_map(|i| i.mzms.iter().cloned())
        .collect();
    sort_modes(device, &mut v);
    v
}

fn bus_modes(device: &DeviceGraph, p: &BTreeMap<String, Side>) -> Vec<String> {
    modes_on(device, p, Side::Bus)
}

fn sort_modes(device: &DeviceGraph, v: &mut [String]) {
    v.sort_by_key(|m| device.mode_index(m).expect("validated mode"));
}

/// Sign of the permutation that sorts `seq` (distinct entries).
fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inversions = 0;
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            if seq[a] > seq[b] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Parity operator measured by `config`, read on `readout`.
pub fn measured_operator(
    device: &DeviceGraph,
    config: &MeasurementConfig,
    readout: Side,
    tare: Option<&TareRecord>,
) -> Result<CompiledOperator> {
    let p = partition(device, &config.junction_states)?;
    let bus = bus_modes(device, &p);
    if bus.len() % 2 == 1 {
        return Err(Error::OddSet(bus));
    }
    let (mzms, tare_sign) = match readout {
        Side::Bus => (bus.clone(), None),
        Side::Ground => {
            if tare.is_none() {
                return Err(Error::TareMissing);
            }
            let floating = modes_on(device, &p, Side::Floating);
            if !floating.is_empty() {
                return Err(Error::OddSet(floating));
            }
            let ground = modes_on(device, &p, Side::Ground);
            if ground.len() % 2 == 1 {
                return Err(Error::OddSet(ground));
            }
            let seq = device.mode_indices(&[bus.clone(), ground.clone()].concat())?;
            (ground, Some(permutation_sign(&seq)))
        }
        Side::Floating => {
            return Err(Error::Device("floating islands cannot be read out".into()));
        }
    };
    Ok(CompiledOperator {
        label: config.label.clone(),
        side: readout,
        mzms,
        bus_mzms: bus,
        tare_sign,
    })
}

/// Searches every on/off assignment of the adjustable junctions for one that
/// reads `target`. Every mode-carrying island must sit on the bus or the
/// ground. Among the valid assignments the one with the fewest junctions on
/// wins, ties broken by the lexicographically smallest sorted on-set.
pub fn compile_target(device: &DeviceGraph, target: &Target) -> Result<MeasurementConfig> {
    if target.side == Side::Floating {
        return Err(Error::Unreachable(format!("{}: floating readout", target.label)));
    }
    let mut want = target.mzms.clone();
    sort_modes(device, &mut want);
    let ids = device.adjustable();
    if ids.len() > 24 {
        return Err(Error::Device("too many junctions for exhaustive search".into()));
    }
    let mut best: Option<Vec<u32>> = None;
    let mut on = Vec::with_capacity(ids.len());
    for mask in 0u32..(1 << ids.len()) {
        let count = mask.count_ones() as usize;
        if best.as_ref().is_some_and(|b| count > b.len()) {
            continue;
        }
        on.clear();
        on.extend(ids.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, id)| *id));
        let Ok(p) = partition_on(device, &on) else {
            continue;
        };
        let floating = device
            .islands
            .iter()
            .any(|i| !i.mzms.is_empty() && p[&i.name] == Side::Floating);
        if floating || modes_on(device, &p, target.side) != want {
            continue;
        }
        let mut cand = on.clone();
        cand.sort_unstable();
        let better = match &best {
            None => true,
            Some(b) => (cand.len(), &cand) < (b.len(), b),
        };
        if better {
            best = Some(cand);
        }
    }
    let on = best.ok_or_else(|| Error::Unreachable(target.label.clone()))?;
    let junction_states = states_from_on(device, &on);
    let partition = partition_on(device, &on)?;
    Ok(MeasurementConfig {
        label: target.label.clone(),
        side: target.side,
        mzms: want,
        junction_states,
        partition,
    })
}

/// Looks up a named target of the device and compiles it.
pub fn compile_measurement(device: &DeviceGraph, label: &str) -> Result<MeasurementConfig> {
    compile_target(device, device.target(label)?)
}

/// A Pauli word compiled to a bus-side parity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PauliMeasurement {
    pub word: String,
    /// `+1` if the bus parity equals the Pauli product, `-1` if it is minus it.
    pub sign: i8,
    pub config: MeasurementConfig,
}

/// Compiles a word such as `XIZ` over the device's qubits. Identity factors
/// leave that qubit's islands on the ground.
pub fn compile_pauli_product(device: &DeviceGraph, word: &str) -> Result<PauliMeasurement> {
    let letters: Vec<char> = word.trim().to_ascii_uppercase().chars().collect();
    if letters.len() != device.qubits.len() {
        return Err(Error::InvalidParams(format!(
            "word {word} has {} letters, device has {} qubits",
            letters.len(),
            device.qubits.len()
        )));
    }
    let mut seq: Vec<String> = Vec::new();
    for (c, q) in letters.iter().zip(&device.qubits) {
        match c {
            'I' => {}
            'X' => seq.extend(q.x.iter().cloned()),
            'Y' => seq.extend(q.y.iter().cloned()),
            'Z' => seq.extend(q.z.iter().cloned()),
            other => return Err(Error::InvalidParams(format!("unknown Pauli letter {other}"))),
        }
    }
    if seq.is_empty() {
        return Err(Error::InvalidParams("word acts trivially on every qubit".into()));
    }
    let sign = permutation_sign(&device.mode_indices(&seq)?);
    let label: String = letters.iter().collect();
    let target = Target {
        label: label.clone(),
        mzms: seq,
        side: Side::Bus,
    };
    Ok(PauliMeasurement {
        word: label,
        sign,
        config: compile_target(device, &target)?,
    })
}

/// One entry of an experiment script.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub step_type: StepType,
    pub junction_states: BTreeMap<u32, JunctionSetting>,
    pub expected_operator: Option<String>,
    /// Simulated expectation value, when one is meaningful.
    pub expected_value: Option<f64>,
    pub notes: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepType {
    Tare,
    Initialize,
    PhaseGate,
    GateRelease,
    Measure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProtocolScript {
    pub theta_rad: f64,
    pub epsilon: f64,
    pub j1: f64,
    pub j2: f64,
    pub gate_phase_rad: f64,
    pub steps: Vec<Step>,
    /// The four correlators in CHSH order.
    pub correlators: [f64; 4],
    pub simulated_chsh: f64,
}

impl ProtocolScript {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("plain data");
        s.push('\n');
        s
    }
}

fn describe(device: &DeviceGraph, op: &CompiledOperator, meaning: &str) -> String {
    let names = op.mzms.join(" ");
    match op.side {
        Side::Ground => format!(
            "parity(i^n {names}) on ground = {:+} * tare * parity(bus {}) -> {meaning} [{}]",
            op.tare_sign.unwrap_or(1),
            op.bus_mzms.join(" "),
            device.name
        ),
        _ => format!("parity(i^n {names}) on bus -> {meaning} [{}]", device.name),
    }
}

fn switches(states: &BTreeMap<u32, Switch>) -> BTreeMap<u32, JunctionSetting> {
    states.iter().map(|(k, v)| (*k, JunctionSetting::Switch(*v))).collect()
}

fn chsh_modes(names: &[String]) -> Result<Vec<Mzm>> {
    names
        .iter()
        .map(|n| Mzm::from_name(n).ok_or_else(|| Error::Device(format!("{n} is not a CHSH mode"))))
        .collect()
}

fn axis_label(qubit: Qubit, axis: Axis) -> &'static str {
    match (qubit, axis) {
        (Qubit::Lower, Axis::X) => "lowerx",
        (Qubit::Lower, Axis::Y) => "lowery",
        (Qubit::Lower, Axis::Z) => "lowerz",
        (Qubit::Upper, Axis::X) => "upperX",
        (Qubit::Upper, Axis::Y) => "upperY",
        (Qubit::Upper, Axis::Z) => "upperZ",
    }
}

const MAX_INIT_ATTEMPTS: usize = 1000;

/// Full CHSH experiment on the two-qubit device, simulated step by step.
///
/// The gate asymmetry comes from the instanton inversion for `2 theta`;
/// `template` fixes every other circuit parameter. The simulation draws
/// measurement outcomes from `seed`.
pub fn chsh_script(
    device: &DeviceGraph,
    theta: f64,
    template: &CircuitParams,
    seed: u64,
) -> Result<ProtocolScript> {
    let epsilon = instanton::solve_epsilon_for_phase(2.0 * theta, template)?;
    let gate_params = template.with_epsilon(epsilon);
    let prediction = instanton::predict(&gate_params)?;
    let mut rng = chsh::stream(seed, 0);
    let mut reg = MajoranaRegister::vacuum();
    let alg = reg.algebra().clone();
    let mut steps = Vec::new();

    let tare_cfg = compile_measurement(device, "tare")?;
    let tare_op = measured_operator(device, &tare_cfg, Side::Bus, None)?;
    let (tare_outcome, _) = reg.project(&alg.parity(&chsh_modes(&tare_op.mzms)?), None, &mut rng)?;
    let tare = TareRecord::new(device, &tare_cfg, tare_outcome)?;
    steps.push(Step {
        step_type: StepType::Tare,
        junction_states: switches(&tare_cfg.junction_states),
        expected_operator: Some(describe(device, &tare_op, "total parity")),
        expected_value: Some(f64::from(tare_outcome)),
        notes: "every island on the bus; the outcome is stored for ground-side inference".into(),
    });

    for (label, spare) in [("init-1", (Mzm::BETA1, Mzm::BETA3)), ("init-2", (Mzm::BETA2, Mzm::BETA3))] {
        let cfg = compile_measurement(device, label)?;
        let op = measured_operator(device, &cfg, Side::Bus, None)?;
        let pair = alg.parity(&chsh_modes(&op.mzms)?);
        let mut attempts = 0;
        loop {
            let (o, _) = reg.project(&pair, None, &mut rng)?;
            if o == -1 {
                break;
            }
            attempts += 1;
            if attempts >= MAX_INIT_ATTEMPTS {
                return Err(Error::NonTermination(attempts));
            }
            reg.measure_parity(spare.0, spare.1, None, &mut rng)?;
        }
        steps.push(Step {
            step_type: StepType::Initialize,
            junction_states: switches(&cfg.junction_states),
            expected_operator: Some(describe(device, &op, "entangling parity, target -1")),
            expected_value: Some(-1.0),
            notes: format!(
                "repeat until the outcome is -1; after a +1 outcome measure i {} {} and retry",
                spare.0.name(),
                spare.1.name()
            ),
        });
    }

    // gate: 2 and 3 off opens the lower loop; 7 and 8 carry the weak junctions
    let gate_states: BTreeMap<u32, JunctionSetting> = device
        .junctions
        .iter()
        .map(|j| {
            let s = match (j.id, j.kind) {
                (2 | 3, _) => JunctionSetting::Switch(Switch::Off),
                (7, JunctionKind::Tunable) => JunctionSetting::Coupling(gate_params.j1),
                (8, JunctionKind::Tunable) => JunctionSetting::Coupling(gate_params.j2),
                _ => JunctionSetting::Switch(Switch::On),
            };
            (j.id, s)
        })
        .collect();
    let mut release = gate_states.clone();
    release.insert(8, JunctionSetting::Coupling(0.0));
    let theta_gate = 0.5 * prediction.gate_phase_2theta;
    reg.phase_gate(theta_gate, Qubit::Lower, Axis::Y);
    steps.push(Step {
        step_type: StepType::PhaseGate,
        junction_states: gate_states,
        expected_operator: Some("exp(i theta y), y = i alpha1 alpha3".into()),
        expected_value: Some(theta_gate),
        notes: format!(
            "ramp the loop flux from 0 to {:.6} rad adiabatically; epsilon = {epsilon:.9}",
            2.0 * PI
        ),
    });
    steps.push(Step {
        step_type: StepType::GateRelease,
        junction_states: release,
        expected_operator: None,
        expected_value: None,
        notes: "ramp junction 8 to zero coupling, then restore measurement settings".into(),
    });

    let mut correlators = [0.0; 4];
    let mut simulated = 0.0;
    for (k, (sign, la, ua)) in ChshSettings::default().terms().into_iter().enumerate() {
        let lcfg = compile_measurement(device, axis_label(Qubit::Lower, la))?;
        let ucfg = compile_measurement(device, axis_label(Qubit::Upper, ua))?;
        let lop = measured_operator(device, &lcfg, Side::Ground, Some(&tare))?;
        let uop = measured_operator(device, &ucfg, Side::Bus, None)?;
        let l_sign = i8::from(chsh::PauliDictionary::orientation(Qubit::Lower, la))
            * lop.tare_sign.ok_or(Error::TareMissing)?
            * tare.outcome;
        let u_sign = chsh::PauliDictionary::orientation(Qubit::Upper, ua);
        let product = alg.parity(&chsh_modes(&lop.bus_mzms)?) * alg.parity(&chsh_modes(&uop.mzms)?);
        let value = f64::from(l_sign * u_sign) * reg.expectation(&product);
        correlators[k] = value;
        simulated += sign * value;
        steps.push(Step {
            step_type: StepType::Measure,
            junction_states: switches(&lcfg.junction_states),
            expected_operator: Some(describe(device, &lop, &format!("{:?} lower", la).to_lowercase())),
            expected_value: None,
            notes: format!("round {} of 4, lower setting", k + 1),
        });
        steps.push(Step {
            step_type: StepType::Measure,
            junction_states: switches(&ucfg.junction_states),
            expected_operator: Some(describe(device, &uop, &format!("{:?} upper", ua))),
            expected_value: Some(value),
            notes: format!(
                "round {} of 4, upper setting; expected value is the correlator, weight {sign:+}",
                k + 1
            ),
        });
    }

    Ok(ProtocolScript {
        theta_rad: theta,
        epsilon,
        j1: gate_params.j1,
        j2: gate_params.j2,
        gate_phase_rad: prediction.gate_phase_2theta,
        steps,
        correlators,
        simulated_chsh: simulated,
    })
}
