//! Exact state-vector engine for two three-Majorana qubits.
//!
//! Preparation uses parity measurements only; a wrong outcome is undone by
//! measuring the offending mode together with a spare mode of its own qubit
//! and retrying. The CHSH combination is
//! `<x X> - <x Z> + <z X> + <z Z>`.

mod algebra;

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use algebra::{Axis, MajoranaAlgebra, Mzm, Op, PauliDictionary, Qubit, DIM};

use crate::error::{Error, Result};

type C = Complex64;

const MAX_ATTEMPTS: usize = 1000;
const IMPOSSIBLE: f64 = 1e-14;

/// Seeded generator for one independent random stream.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(index);
    r
}

/// Normalised state of the six modes with its total-parity sector.
#[derive(Debug, Clone)]
pub struct MajoranaRegister {
    alg: MajoranaAlgebra,
    state: [C; DIM],
    total_parity: i8,
}

impl Default for MajoranaRegister {
    fn default() -> Self {
        Self::vacuum()
    }
}

impl MajoranaRegister {
    /// Empty fermion modes; total parity `+1`.
    pub fn vacuum() -> Self {
        let mut state = [C::new(0.0, 0.0); DIM];
        state[0] = C::new(1.0, 0.0);
        Self {
            alg: MajoranaAlgebra::new(),
            state,
            total_parity: 1,
        }
    }

    /// Vacuum followed by [`prepare_bell`](Self::prepare_bell).
    pub fn bell<R: Rng>(rng: &mut R) -> Result<Self> {
        let mut r = Self::vacuum();
        r.prepare_bell(rng)?;
        Ok(r)
    }

    pub fn algebra(&self) -> &MajoranaAlgebra {
        &self.alg
    }

    pub fn state(&self) -> &[C; DIM] {
        &self.state
    }

    pub fn total_parity(&self) -> i8 {
        self.total_parity
    }

    pub fn norm(&self) -> f64 {
        self.state.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn expectation(&self, op: &Op) -> f64 {
        let w = op.apply(&self.state);
        self.state.iter().zip(&w).map(|(a, b)| a.conj() * b).sum::<C>().re
    }

    pub fn apply(&mut self, u: &Op) {
        self.state = u.apply(&self.state);
    }

    /// Projects onto the `outcome` eigenspace of `i gamma_a gamma_b`, sampling
    /// the outcome by the Born rule when not forced. Returns the outcome and
    /// its probability before the projection.
    pub fn measure_parity<R: Rng>(
        &mut self,
        a: Mzm,
        b: Mzm,
        outcome: Option<i8>,
        rng: &mut R,
    ) -> Result<(i8, f64)> {
        if a == b {
            return Err(Error::InvalidParams("parity pair needs two distinct modes".into()));
        }
        let op = self.alg.bilinear(a, b);
        self.project(&op, outcome, rng)
    }

    /// Measurement of an arbitrary operator with eigenvalues `+-1`.
    pub fn project<R: Rng>(&mut self, op: &Op, outcome: Option<i8>, rng: &mut R) -> Result<(i8, f64)> {
        let p_plus = (0.5 * (1.0 + self.expectation(op))).clamp(0.0, 1.0);
        let s = match outcome {
            Some(s) => s.signum(),
            None => {
                if rng.random::<f64>() < p_plus {
                    1
                } else {
                    -1
                }
            }
        };
        let p = if s == 1 { p_plus } else { 1.0 - p_plus };
        if p < IMPOSSIBLE {
            return Err(Error::ImpossibleOutcome {
                outcome: s,
                probability: p,
            });
        }
        let proj = (Op::identity() + op.scale(C::new(f64::from(s), 0.0))).scale(C::new(0.5, 0.0));
        self.state = proj.apply(&self.state);
        let n = self.norm();
        self.state.iter_mut().for_each(|c| *c /= n);
        Ok((s, p))
    }

    /// Drives the state into the `-1` eigenspaces of `i a1 b1` and `i a2 b2`,
    /// repeating each measurement until it succeeds.
    pub fn prepare_bell<R: Rng>(&mut self, rng: &mut R) -> Result<()> {
        let steps = [
            ((Mzm::ALPHA1, Mzm::BETA1), (Mzm::BETA1, Mzm::BETA3)),
            ((Mzm::ALPHA2, Mzm::BETA2), (Mzm::BETA2, Mzm::BETA3)),
        ];
        for ((a, b), (c, d)) in steps {
            let mut attempts = 0;
            loop {
                let (o, _) = self.measure_parity(a, b, None, rng)?;
                if o == -1 {
                    break;
                }
                attempts += 1;
                if attempts >= MAX_ATTEMPTS {
                    return Err(Error::NonTermination(attempts));
                }
                self.measure_parity(c, d, None, rng)?;
            }
        }
        Ok(())
    }

    /// Exchange `exp(direction * pi/4 * gamma_a gamma_b)`.
    pub fn braid(&mut self, a: Mzm, b: Mzm, direction: i8) {
        let u = braid_unitary(&self.alg, a, b, direction);
        self.apply(&u);
    }

    /// `exp(i theta sigma)` for the chosen qubit axis.
    pub fn phase_gate(&mut self, theta: f64, qubit: Qubit, axis: Axis) {
        let u = phase_gate_unitary(&self.alg, theta, qubit, axis);
        self.apply(&u);
    }

    pub fn correlator(&self, lower: Axis, upper: Axis) -> f64 {
        let a = PauliDictionary::operator(&self.alg, Qubit::Lower, lower);
        let b = PauliDictionary::operator(&self.alg, Qubit::Upper, upper);
        self.expectation(&(a * b))
    }

    pub fn chsh_value(&self, settings: ChshSettings) -> f64 {
        settings
            .terms()
            .iter()
            .map(|&(sign, l, u)| sign * self.correlator(l, u))
            .sum()
    }
}

pub fn braid_unitary(alg: &MajoranaAlgebra, a: Mzm, b: Mzm, direction: i8) -> Op {
    let s = f64::from(direction.signum()) * std::f64::consts::FRAC_1_SQRT_2;
    Op::identity().scale(C::new(std::f64::consts::FRAC_1_SQRT_2, 0.0))
        + (alg.gamma[a.0] * alg.gamma[b.0]).scale(C::new(s, 0.0))
}

pub fn phase_gate_unitary(alg: &MajoranaAlgebra, theta: f64, qubit: Qubit, axis: Axis) -> Op {
    let sigma = PauliDictionary::operator(alg, qubit, axis);
    Op::identity().scale(C::new(theta.cos(), 0.0)) + sigma.scale(C::new(0.0, theta.sin()))
}

/// Two settings per qubit; the combination is
/// `<a0 b0> - <a0 b1> + <a1 b0> + <a1 b1>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChshSettings {
    pub lower: [Axis; 2],
    pub upper: [Axis; 2],
}

impl Default for ChshSettings {
    fn default() -> Self {
        Self {
            lower: [Axis::X, Axis::Z],
            upper: [Axis::X, Axis::Z],
        }
    }
}

impl ChshSettings {
    /// `(sign, lower axis, upper axis)` for the four correlators.
    pub fn terms(&self) -> [(f64, Axis, Axis); 4] {
        [
            (1.0, self.lower[0], self.upper[0]),
            (-1.0, self.lower[0], self.upper[1]),
            (1.0, self.lower[1], self.upper[0]),
            (1.0, self.lower[1], self.upper[1]),
        ]
    }
}

/// `2 sqrt(2) cos(2 theta - pi/4)`.
pub fn chsh_curve(theta: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * (2.0 * theta - FRAC_PI_4).cos()
}

/// Bell state followed by a lower-qubit `y` rotation by `theta`.
pub fn gated_bell(theta: f64, seed: u64) -> Result<MajoranaRegister> {
    let mut r = MajoranaRegister::bell(&mut stream(seed, 0))?;
    r.phase_gate(theta, Qubit::Lower, Axis::Y);
    Ok(r)
}

/// Exact CHSH value after the rotation.
pub fn chsh_exact(theta: f64) -> Result<f64> {
    Ok(gated_bell(theta, 0)?.chsh_value(ChshSettings::default()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChshReport {
    pub theta_rad: f64,
    pub exact_value: f64,
    pub sampled_estimate: f64,
    pub standard_error: f64,
    pub shots: u64,
    pub seed: u64,
}

/// Finite-shot estimate: a quarter of the shots per correlator, each shot a
/// Born-rule draw of the `+-1` product outcome.
pub fn chsh_sampled(register: &MajoranaRegister, shots: u64, seed: u64) -> Result<(f64, f64)> {
    if shots < 4 {
        return Err(Error::InvalidParams("need at least 4 shots".into()));
    }
    let per = shots / 4;
    let mut estimate = 0.0;
    let mut var = 0.0;
    for (k, (sign, l, u)) in ChshSettings::default().terms().into_iter().enumerate() {
        let e = register.correlator(l, u);
        let p_plus = (0.5 * (1.0 + e)).clamp(0.0, 1.0);
        let mut rng = stream(seed, 1 + k as u64);
        let plus = (0..per).filter(|_| rng.random::<f64>() < p_plus).count() as f64;
        let mean = (2.0 * plus - per as f64) / per as f64;
        estimate += sign * mean;
        var += (1.0 - mean * mean) / per as f64;
    }
    Ok((estimate, var.sqrt()))
}

pub fn chsh_report(theta: f64, shots: u64, seed: u64) -> Result<ChshReport> {
    let reg = gated_bell(theta, seed)?;
    let (sampled_estimate, standard_error) = chsh_sampled(&reg, shots, seed)?;
    Ok(ChshReport {
        theta_rad: theta,
        exact_value: reg.chsh_value(ChshSettings::default()),
        sampled_estimate,
        standard_error,
        shots,
        seed,
    })
}

/// Operations drawn by [`clifford_ceiling_search`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpPool {
    /// Braids and parity measurements only.
    Clifford,
    /// Adds a `pi/8` rotation about the lower `y` axis.
    WithMagic,
}

const MAX_SEQUENCE: usize = 20;

/// Largest CHSH value reached by random operation sequences (length up to
/// 20) applied to the Bell state.
pub fn clifford_ceiling_search(n_trials: usize, seed: u64, pool: OpPool) -> Result<f64> {
    clifford_ceiling_search_with(n_trials, seed, pool, MAX_SEQUENCE)
}

pub fn clifford_ceiling_search_with(
    n_trials: usize,
    seed: u64,
    pool: OpPool,
    max_len: usize,
) -> Result<f64> {
    if n_trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let base = MajoranaRegister::bell(&mut stream(seed, 0))?;
    let kinds = match pool {
        OpPool::Clifford => 2,
        OpPool::WithMagic => 3,
    };
    let mut best = f64::NEG_INFINITY;
    for t in 0..n_trials {
        let mut rng = stream(seed, 1 + t as u64);
        let mut reg = base.clone();
        let len = rng.random_range(0..=max_len);
        for _ in 0..len {
            let a = rng.random_range(0..6);
            let mut b = rng.random_range(0..5);
            if b >= a {
                b += 1;
            }
            let (a, b) = (Mzm(a), Mzm(b));
            match rng.random_range(0..kinds) {
                0 => reg.braid(a, b, if rng.random::<bool>() { 1 } else { -1 }),
                1 => {
                    reg.measure_parity(a, b, None, &mut rng)?;
                }
                _ => reg.phase_gate(std::f64::consts::PI / 8.0, Qubit::Lower, Axis::Y),
            }
        }
        best = best.max(reg.chsh_value(ChshSettings::default()));
    }
    Ok(best)
}
