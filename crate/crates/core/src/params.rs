//! Circuit parameters shared by every engine.
//!
//! Energies are measured in units of the mean weak-junction energy
//! `J = (j1 + j2) / 2`. Gate charges are in Cooper-pair units. Capacitance
//! combinations are dimensionless, relative to `2e^2 / E_C`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Full parameter set of the two-island circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CircuitParams {
    pub j1: f64,
    pub j2: f64,
    pub j3: f64,
    pub e_c: f64,
    pub q_gate_1: f64,
    pub q_gate_2: f64,
    /// `C1 + C2 - 2 C3`.
    pub c_bar: f64,
    /// `C1 - C2`.
    pub c_tilde: f64,
    /// `C1 + C2 + 2 C3`.
    pub c_delta: f64,
    /// Fermion parity of the island carrying the Majorana wire.
    pub q_parity: u8,
}

impl CircuitParams {
    /// `j1 = (1+eps)`, `j2 = (1-eps)`, `j3 = alpha` with unit mean weak coupling,
    /// equal island capacitances and zero gate charge.
    pub fn symmetric(epsilon: f64, alpha: f64, e_c: f64) -> Self {
        Self {
            j1: 1.0 + epsilon,
            j2: 1.0 - epsilon,
            j3: alpha,
            e_c,
            q_gate_1: 0.0,
            q_gate_2: 0.0,
            c_bar: 2.0,
            c_tilde: 0.0,
            c_delta: 2.0,
            q_parity: 0,
        }
    }

    /// Sets the gate charges from `Q+ = Q1 + Q2` and `Q- = Q1 - Q2`.
    pub fn with_gate_charges(mut self, q_plus: f64, q_minus: f64) -> Self {
        self.q_gate_1 = 0.5 * (q_plus + q_minus);
        self.q_gate_2 = 0.5 * (q_plus - q_minus);
        self
    }

    pub fn with_parity(mut self, q: u8) -> Self {
        self.q_parity = q;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        let j = self.j();
        self.j1 = (1.0 + epsilon) * j;
        self.j2 = (1.0 - epsilon) * j;
        self
    }

    /// Mean weak-junction energy, the energy unit.
    pub fn j(&self) -> f64 {
        0.5 * (self.j1 + self.j2)
    }

    /// Junction asymmetry `(j1 - j2) / (j1 + j2)`.
    pub fn epsilon(&self) -> f64 {
        (self.j1 - self.j2) / (self.j1 + self.j2)
    }

    /// Strong-junction ratio `j3 / J`.
    pub fn alpha(&self) -> f64 {
        self.j3 / self.j()
    }

    pub fn q_plus(&self) -> f64 {
        self.q_gate_1 + self.q_gate_2
    }

    pub fn q_minus(&self) -> f64 {
        self.q_gate_1 - self.q_gate_2
    }

    /// Gate charge on island 1 including the half-Cooper-pair shift from an
    /// odd wire parity.
    pub fn q1_effective(&self) -> f64 {
        self.q_gate_1 + 0.5 * f64::from(self.q_parity)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.j1,
            self.j2,
            self.j3,
            self.e_c,
            self.q_gate_1,
            self.q_gate_2,
            self.c_bar,
            self.c_tilde,
            self.c_delta,
        ]
        .iter()
        .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if self.j1 <= 0.0 || self.j2 <= 0.0 || self.j3 <= 0.0 {
            return Err(Error::InvalidParams("Josephson energies must be positive".into()));
        }
        if self.e_c <= 0.0 {
            return Err(Error::InvalidParams("charging energy must be positive".into()));
        }
        let eps = self.epsilon();
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidParams(format!(
                "asymmetry {eps} outside [0, 1) (require j1 >= j2)"
            )));
        }
        if self.c_bar <= 0.0 || self.c_delta <= 0.0 {
            return Err(Error::InvalidParams(
                "capacitance matrix must be positive definite".into(),
            ));
        }
        if self.q_parity > 1 {
            return Err(Error::InvalidParams(format!(
                "parity must be 0 or 1, got {}",
                self.q_parity
            )));
        }
        Ok(())
    }
}

impl Default for CircuitParams {
    /// `alpha = 2`, `E_C = 0.4`, `Q+ = 0.25`, symmetric junctions.
    fn default() -> Self {
        Self::symmetric(0.0, 2.0, 0.4).with_gate_charges(0.25, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_charge_round_trip() {
        let p = CircuitParams::default().with_gate_charges(0.3, -0.1);
        assert!((p.q_plus() - 0.3).abs() < 1e-15);
        assert!((p.q_minus() + 0.1).abs() < 1e-15);
    }

    #[test]
    fn derived_ratios() {
        let p = CircuitParams::symmetric(0.05, 2.0, 0.4);
        assert!((p.epsilon() - 0.05).abs() < 1e-15);
        assert!((p.alpha() - 2.0).abs() < 1e-15);
        assert_eq!(p.j(), 1.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(CircuitParams::symmetric(-0.1, 2.0, 0.4).validate().is_err());
        assert!(CircuitParams::symmetric(0.1, 2.0, 0.0).validate().is_err());
        assert!(CircuitParams::symmetric(0.1, -1.0, 0.4).validate().is_err());
        assert!(CircuitParams::default().with_parity(2).validate().is_err());
        let mut p = CircuitParams::default();
        p.c_bar = 0.0;
        assert!(p.validate().is_err());
        assert!(CircuitParams::default().validate().is_ok());
    }
}
