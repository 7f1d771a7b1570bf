//! Charge-basis Hamiltonian of the two-island loop.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::CircuitParams;

/// Truncated charge basis `n1, n2 in [-n_cutoff, n_cutoff]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChargeBasis {
    pub n_cutoff: usize,
}

impl Default for ChargeBasis {
    fn default() -> Self {
        Self { n_cutoff: 15 }
    }
}

impl ChargeBasis {
    pub fn new(n_cutoff: usize) -> Self {
        Self { n_cutoff }
    }

    /// States per island.
    pub fn side(&self) -> usize {
        2 * self.n_cutoff + 1
    }

    pub fn dimension(&self) -> usize {
        self.side() * self.side()
    }

    pub fn index(&self, n1: i64, n2: i64) -> usize {
        let c = self.n_cutoff as i64;
        ((n1 + c) as usize) * self.side() + (n2 + c) as usize
    }

    /// Charges `(n1, n2)` of basis state `i`.
    pub fn charges(&self, i: usize) -> (i64, i64) {
        let c = self.n_cutoff as i64;
        ((i / self.side()) as i64 - c, (i % self.side()) as i64 - c)
    }
}

/// Junction whose phase carries the external flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Gauge {
    FluxOnJ1,
    FluxOnJ2,
    FluxOnJ3,
}

impl Gauge {
    pub const ALL: [Gauge; 3] = [Gauge::FluxOnJ1, Gauge::FluxOnJ2, Gauge::FluxOnJ3];

    /// Per-basis-state generator `W` relating this gauge to flux-on-J3:
    /// `psi_J3 = exp(-i flux W) psi_gauge` up to a global phase.
    pub(crate) fn frame_charge(self, n1: i64, n2: i64) -> f64 {
        match self {
            Gauge::FluxOnJ1 => -(n1 as f64),
            Gauge::FluxOnJ2 => n2 as f64,
            Gauge::FluxOnJ3 => 0.0,
        }
    }
}

/// Hermitian matrix stored as its lower band, row by row.
///
/// Row `i` holds `H[i][j]` for `j in i-bw ..= i` at offset `j - i + bw`.
#[derive(Debug, Clone)]
pub struct BandedHermitian {
    n: usize,
    bw: usize,
    data: Vec<Complex64>,
}

impl BandedHermitian {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self {
            n,
            bw,
            data: vec![Complex64::new(0.0, 0.0); n * (bw + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bw
    }

    /// Entry `(i, j)` with `j <= i`, `i - j <= bw`.
    pub fn lower(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * (self.bw + 1) + j + self.bw - i]
    }

    pub fn set_lower(&mut self, i: usize, j: usize, v: Complex64) {
        assert!(j <= i && i - j <= self.bw);
        self.data[i * (self.bw + 1) + j + self.bw - i] = v;
    }

    pub(crate) fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * (self.bw + 1)..(i + 1) * (self.bw + 1)]
    }

    /// Full entry `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if j <= i {
            if i - j > self.bw {
                Complex64::new(0.0, 0.0)
            } else {
                self.lower(i, j)
            }
        } else {
            self.get(j, i).conj()
        }
    }

    pub fn diagonal(&self, i: usize) -> f64 {
        self.lower(i, i).re
    }

    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        let bw = self.bw;
        for i in 0..self.n {
            let row = self.row(i);
            let j0 = i.saturating_sub(bw);
            let mut acc = Complex64::new(0.0, 0.0);
            for j in j0..i {
                let h = row[j + bw - i];
                if h.re != 0.0 || h.im != 0.0 {
                    acc += h * x[j];
                    y[j] += h.conj() * x[i];
                }
            }
            acc += row[bw].re * x[i];
            y[i] += acc;
        }
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j)).collect()).collect()
    }
}

/// `H = E_C [(n1 - Q1_eff)^2 + (n2 - Q2)^2] - J1 cos(phi1) - J2 cos(phi2) - J3 cos(phi1 - phi2)`
/// with the flux attached to the junction selected by `gauge`:
/// `cos(phi1 - flux)`, `cos(phi2 + flux)` or `cos(phi1 - phi2 + flux)`.
/// The parity `q` shifts the island-1 gate charge by half a Cooper pair.
pub fn build_hamiltonian(
    params: &CircuitParams,
    flux: f64,
    q_parity: u8,
    basis: ChargeBasis,
    gauge: Gauge,
) -> BandedHermitian {
    let side = basis.side();
    let c = basis.n_cutoff as i64;
    let q1 = params.q_gate_1 + 0.5 * f64::from(q_parity);
    let q2 = params.q_gate_2;
    let mut h = BandedHermitian::zeros(basis.dimension(), side);
    let twist = Complex64::from_polar(1.0, flux);
    let one = Complex64::new(1.0, 0.0);
    let (t1, t2, t3) = match gauge {
        Gauge::FluxOnJ1 => (twist.conj(), one, one),
        Gauge::FluxOnJ2 => (one, twist, one),
        Gauge::FluxOnJ3 => (one, one, twist),
    };
    for n1 in -c..=c {
        for n2 in -c..=c {
            let i = basis.index(n1, n2);
            let e = params.e_c * ((n1 as f64 - q1).powi(2) + (n2 as f64 - q2).powi(2));
            h.set_lower(i, i, Complex64::new(e, 0.0));
            // raising terms land below the diagonal
            if n1 < c {
                h.set_lower(basis.index(n1 + 1, n2), i, -0.5 * params.j1 * t1);
            }
            if n2 < c {
                h.set_lower(basis.index(n1, n2 + 1), i, -0.5 * params.j2 * t2);
            }
            if n1 < c && n2 > -c {
                h.set_lower(basis.index(n1 + 1, n2 - 1), i, -0.5 * params.j3 * t3);
            }
        }
    }
    h
}
