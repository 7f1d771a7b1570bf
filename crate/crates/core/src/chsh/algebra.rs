//! Six Majorana operators on three fermion modes.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

type C = Complex64;

pub const DIM: usize = 8;

/// Index of a Majorana mode in the order `alpha1, alpha2, alpha3, beta1, beta2, beta3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mzm(pub usize);

impl Mzm {
    pub const ALPHA1: Mzm = Mzm(0);
    pub const ALPHA2: Mzm = Mzm(1);
    pub const ALPHA3: Mzm = Mzm(2);
    pub const BETA1: Mzm = Mzm(3);
    pub const BETA2: Mzm = Mzm(4);
    pub const BETA3: Mzm = Mzm(5);

    pub const NAMES: [&'static str; 6] = ["alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"];

    pub fn name(self) -> &'static str {
        Self::NAMES[self.0]
    }

    pub fn from_name(name: &str) -> Option<Mzm> {
        Self::NAMES.iter().position(|n| *n == name).map(Mzm)
    }
}

/// Dense 8x8 operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Op(pub [[C; DIM]; DIM]);

impl Op {
    pub fn zero() -> Self {
        Op([[C::new(0.0, 0.0); DIM]; DIM])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            m.0[i][i] = C::new(1.0, 0.0);
        }
        m
    }

    pub fn scale(&self, s: C) -> Self {
        let mut m = *self;
        m.0.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..DIM {
            for j in 0..DIM {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn apply(&self, v: &[C; DIM]) -> [C; DIM] {
        let mut out = [C::new(0.0, 0.0); DIM];
        for (o, row) in out.iter_mut().zip(&self.0) {
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        out
    }

    /// Largest entry-wise deviation from `other`.
    pub fn distance(&self, other: &Op) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Mul for Op {
    type Output = Op;
    fn mul(self, rhs: Op) -> Op {
        let mut m = Op::zero();
        for i in 0..DIM {
            for k in 0..DIM {
                let a = self.0[i][k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for j in 0..DIM {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl Add for Op {
    type Output = Op;
    fn add(self, rhs: Op) -> Op {
        let mut m = self;
        m.0.iter_mut().flatten().zip(rhs.0.iter().flatten()).for_each(|(a, b)| *a += b);
        m
    }
}

impl Sub for Op {
    type Output = Op;
    fn sub(self, rhs: Op) -> Op {
        self + rhs.scale(C::new(-1.0, 0.0))
    }
}

fn pauli(k: u8) -> [[C; 2]; 2] {
    let (o, z) = (C::new(1.0, 0.0), C::new(0.0, 0.0));
    let i = C::new(0.0, 1.0);
    match k {
        0 => [[o, z], [z, o]],
        1 => [[z, o], [o, z]],
        2 => [[z, -i], [i, z]],
        _ => [[o, z], [z, -o]],
    }
}

/// Tensor product of three single-mode Pauli factors (0=I, 1=X, 2=Y, 3=Z),
/// mode 0 being the most significant bit.
fn pauli_string(f: [u8; 3]) -> Op {
    let mats = f.map(pauli);
    let mut m = Op::zero();
    for r in 0..DIM {
        for c in 0..DIM {
            let mut v = C::new(1.0, 0.0);
            for (k, p) in mats.iter().enumerate() {
                let shift = 2 - k;
                v *= p[(r >> shift) & 1][(c >> shift) & 1];
            }
            m.0[r][c] = v;
        }
    }
    m
}

/// Jordan-Wigner representation of the six Majorana operators.
#[derive(Debug, Clone)]
pub struct MajoranaAlgebra {
    pub gamma: [Op; 6],
}

impl Default for MajoranaAlgebra {
    fn default() -> Self {
        Self::new()
    }
}

impl MajoranaAlgebra {
    pub fn new() -> Self {
        let gamma = std::array::from_fn(|a| {
            let mode = a / 2;
            let mut f = [0u8; 3];
            for s in f.iter_mut().take(mode) {
                *s = 3;
            }
            f[mode] = if a % 2 == 0 { 1 } else { 2 };
            pauli_string(f)
        });
        Self { gamma }
    }

    /// `i gamma_a gamma_b`.
    pub fn bilinear(&self, a: Mzm, b: Mzm) -> Op {
        (self.gamma[a.0] * self.gamma[b.0]).scale(C::new(0.0, 1.0))
    }

    /// Parity of an even set of modes: `i^(m) gamma_s1 ... gamma_s2m` with the
    /// modes in ascending order. For a pair this is `i gamma_a gamma_b`.
    pub fn parity(&self, set: &[Mzm]) -> Op {
        let mut s: Vec<Mzm> = set.to_vec();
        s.sort();
        let mut m = Op::identity();
        for g in &s {
            m = m * self.gamma[g.0];
        }
        let pairs = s.len() / 2;
        let phase = [C::new(1.0, 0.0), C::new(0.0, 1.0), C::new(-1.0, 0.0), C::new(0.0, -1.0)][pairs % 4];
        m.scale(phase)
    }

    /// Total fermion parity `prod_k (-i gamma_2k-1 gamma_2k)`; `+1` on the
    /// Jordan-Wigner vacuum.
    pub fn total_parity(&self) -> Op {
        (0..3).fold(Op::identity(), |acc, k| {
            acc * (self.gamma[2 * k] * self.gamma[2 * k + 1]).scale(C::new(0.0, -1.0))
        })
    }
}

/// Which three-mode qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Qubit {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Map from qubit axes to Majorana bilinears `sigma = i gamma_a gamma_b`.
///
/// Lower qubit: `z = i a1 a2`, `y = i a1 a3`, `x = i a2 a3`.
/// Upper qubit: `Z = i b2 b1`, `X = i b2 b3`, `Y = i b3 b1`.
/// Both triples satisfy `sigma_x sigma_y = i sigma_z`.
pub struct PauliDictionary;

impl PauliDictionary {
    pub fn pair(qubit: Qubit, axis: Axis) -> (Mzm, Mzm) {
        match (qubit, axis) {
            (Qubit::Lower, Axis::Z) => (Mzm::ALPHA1, Mzm::ALPHA2),
            (Qubit::Lower, Axis::Y) => (Mzm::ALPHA1, Mzm::ALPHA3),
            (Qubit::Lower, Axis::X) => (Mzm::ALPHA2, Mzm::ALPHA3),
            (Qubit::Upper, Axis::Z) => (Mzm::BETA2, Mzm::BETA1),
            (Qubit::Upper, Axis::X) => (Mzm::BETA2, Mzm::BETA3),
            (Qubit::Upper, Axis::Y) => (Mzm::BETA3, Mzm::BETA1),
        }
    }

    pub fn operator(alg: &MajoranaAlgebra, qubit: Qubit, axis: Axis) -> Op {
        let (a, b) = Self::pair(qubit, axis);
        alg.bilinear(a, b)
    }

    /// `+1` when the dictionary bilinear equals the ascending-order parity of
    /// its pair, `-1` otherwise.
    pub fn orientation(qubit: Qubit, axis: Axis) -> i8 {
        let (a, b) = Self::pair(qubit, axis);
        if a < b {
            1
        } else {
            -1
        }
    }
}
