//! Declarative device description.
//!
//! A device is a set of superconducting islands, each hosting zero or more
//! Majorana modes, joined to each other and to the two reservoirs (the
//! readout bus and the phase ground) by numbered junctions.
//!
//! JSON fields:
//! - `name`: free-form identifier.
//! - `bus`, `ground`: node names of the two reservoirs.
//! - `mzms`: every Majorana mode, in the order that fixes parity signs.
//! - `islands`: `{name, mzms}`; a trijunction counts as one effective mode.
//! - `junctions`: `{id, between: [node, node], kind}` with `kind` one of
//!   `switchable`, `tunable`, `fixed-strong`. Fixed-strong junctions are
//!   always on.
//! - `targets`: named parity measurements `{label, mzms, side}`; `side` says
//!   whether the set is read directly on the bus or inferred on the ground.
//! - `qubits`: optional three-mode qubits `{name, x, y, z}`, each axis an
//!   ordered pair `[a, b]` standing for `i a b`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JunctionKind {
    Switchable,
    Tunable,
    FixedStrong,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Junction {
    pub id: u32,
    pub between: [String; 2],
    pub kind: JunctionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub name: String,
    pub mzms: Vec<String>,
}

/// Reservoir a component is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Bus,
    Ground,
    Floating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub label: String,
    pub mzms: Vec<String>,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QubitModes {
    pub name: String,
    pub x: [String; 2],
    pub y: [String; 2],
    pub z: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviceGraph {
    pub name: String,
    pub bus: String,
    pub ground: String,
    pub mzms: Vec<String>,
    pub islands: Vec<Island>,
    pub junctions: Vec<Junction>,
    #[serde(default)]
    pub targets: Vec<Target>,
    #[serde(default)]
    pub qubits: Vec<QubitModes>,
}

const CHSH_DEVICE: &str = include_str!("../../fixtures/chsh_device.json");
const RAMM_DEVICE: &str = include_str!("../../fixtures/ramm_device.json");

impl DeviceGraph {
    /// Two three-mode qubits with the bus, phase ground and the tunable
    /// loop used by the phase gate.
    pub fn chsh_device() -> Self {
        Self::from_json(CHSH_DEVICE).expect("bundled fixture is valid")
    }

    /// Three qubits, every mode on its own island with one bus and one
    /// ground junction.
    pub fn ramm_device() -> Self {
        Self::from_json(RAMM_DEVICE).expect("bundled fixture is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: DeviceGraph =
            serde_json::from_str(text).map_err(|e| Error::Device(format!("bad device JSON: {e}")))?;
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Device(m));
        if self.bus == self.ground {
            return bad("bus and ground must be distinct nodes".into());
        }
        let mut nodes = BTreeSet::from([self.bus.as_str(), self.ground.as_str()]);
        for i in &self.islands {
            if !nodes.insert(&i.name) {
                return bad(format!("duplicate node {}", i.name));
            }
        }
        let declared: BTreeSet<&str> = self.mzms.iter().map(String::as_str).collect();
        if declared.len() != self.mzms.len() {
            return bad("duplicate Majorana mode".into());
        }
        let mut hosted = BTreeSet::new();
        for m in self.islands.iter().flat_map(|i| &i.mzms) {
            if !declared.contains(m.as_str()) || !hosted.insert(m.as_str()) {
                return bad(format!("mode {m} undeclared or hosted twice"));
            }
        }
        if hosted != declared {
            return bad("every declared mode must sit on an island".into());
        }
        let mut ids = BTreeSet::new();
        for j in &self.junctions {
            if !ids.insert(j.id) {
                return bad(format!("duplicate junction id {}", j.id));
            }
            for end in &j.between {
                if !nodes.contains(end.as_str()) {
                    return bad(format!("junction {} touches unknown node {end}", j.id));
                }
            }
            if j.between[0] == j.between[1] {
                return bad(format!("junction {} is a self loop", j.id));
            }
        }
        // every island must be able to reach a reservoir
        let all_on: Vec<u32> = self.junctions.iter().map(|j| j.id).collect();
        let uf = self.components(&all_on);
        for i in &self.islands {
            let r = uf.root(self.node_index(&i.name));
            if r != uf.root(self.bus_index()) && r != uf.root(self.ground_index()) {
                return bad(format!("island {} cannot reach bus or ground", i.name));
            }
        }
        for t in &self.targets {
            self.mode_indices(&t.mzms)?;
        }
        for q in &self.qubits {
            for pair in [&q.x, &q.y, &q.z] {
                self.mode_indices(pair)?;
            }
        }
        Ok(())
    }

    pub fn target(&self, label: &str) -> Result<&Target> {
        self.targets
            .iter()
            .find(|t| t.label == label)
            .ok_or_else(|| Error::Unreachable(label.to_string()))
    }

    pub fn junction(&self, id: u32) -> Option<&Junction> {
        self.junctions.iter().find(|j| j.id == id)
    }

    /// Junctions whose state a configuration chooses.
    pub fn adjustable(&self) -> Vec<u32> {
        self.junctions
            .iter()
            .filter(|j| j.kind != JunctionKind::FixedStrong)
            .map(|j| j.id)
            .collect()
    }

    pub fn mode_index(&self, name: &str) -> Result<usize> {
        self.mzms
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::Device(format!("unknown Majorana mode {name}")))
    }

    pub fn mode_indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.mode_index(n.as_ref())).collect()
    }

    // node numbering: islands in order, then bus, then ground
    pub(crate) fn node_index(&self, name: &str) -> usize {
        if name == self.bus {
            self.bus_index()
        } else if name == self.ground {
            self.ground_index()
        } else {
            self.islands
                .iter()
                .position(|i| i.name == name)
                .expect("validated node name")
        }
    }

    pub(crate) fn bus_index(&self) -> usize {
        self.islands.len()
    }

    pub(crate) fn ground_index(&self) -> usize {
        self.islands.len() + 1
    }

    /// Connectivity with the given junctions on; fixed-strong ones are
    /// always included.
    pub(crate) fn components(&self, on: &[u32]) -> UnionFind {
        let mut uf = UnionFind::new(self.islands.len() + 2);
        for j in &self.junctions {
            if j.kind == JunctionKind::FixedStrong || on.contains(&j.id) {
                uf.union(self.node_index(&j.between[0]), self.node_index(&j.between[1]));
            }
        }
        uf
    }
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn root(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.root(a), self.root(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}
