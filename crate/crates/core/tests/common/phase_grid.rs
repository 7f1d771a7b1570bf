//! Independent discretisation of the circuit Hamiltonian.
//!
//! The Hamiltonian is discretised on a 256 x 256 periodic phase grid
//! with eighth-order central differences and its lowest states are found by
//! block LOBPCG, preconditioned by the inverse kinetic operator applied with
//! FFTs.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use vortexgate::CircuitParams;

type C = Complex64;

const N: usize = 256;
// eighth-order central stencils, offsets 1..=4
const D1: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];
const D2_0: f64 = -205.0 / 72.0;
const D2: [f64; 4] = [8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];

pub struct PhaseGrid {
    e_c: f64,
    q1: f64,
    q2: f64,
    potential: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl PhaseGrid {
    pub fn new(p: &CircuitParams, flux: f64, q_parity: u8) -> Self {
        let h = TAU / N as f64;
        let mut potential = vec![0.0; N * N];
        for a in 0..N {
            for b in 0..N {
                let (f1, f2) = (h * a as f64, h * b as f64);
                potential[a * N + b] =
                    -p.j1 * f1.cos() - p.j2 * (f2 + flux).cos() - p.j3 * (f1 - f2).cos();
            }
        }
        let mut planner = FftPlanner::new();
        Self {
            e_c: p.e_c,
            q1: p.q_gate_1 + 0.5 * f64::from(q_parity),
            q2: p.q_gate_2,
            potential,
            fwd: planner.plan_fft_forward(N),
            inv: planner.plan_fft_inverse(N),
        }
    }

    /// `E_C [(-i d1 - Q1)^2 + (-i d2 - Q2)^2] + V`.
    fn apply(&self, x: &[C], y: &mut [C]) {
        let h = TAU / N as f64;
        let (inv_h, inv_h2) = (1.0 / h, 1.0 / (h * h));
        let w = |i: usize, k: isize| (i as isize + k).rem_euclid(N as isize) as usize;
        let iu = C::new(0.0, 1.0);
        for a in 0..N {
            for b in 0..N {
                let at = |da: isize, db: isize| x[w(a, da) * N + w(b, db)];
                let c = x[a * N + b];
                let (mut d1a, mut d2a, mut d1b, mut d2b) = (C::default(), c * D2_0, C::default(), c * D2_0);
                for (k, (&g1, &g2)) in D1.iter().zip(&D2).enumerate() {
                    let s = k as isize + 1;
                    let (ap, am) = (at(s, 0), at(-s, 0));
                    let (bp, bm) = (at(0, s), at(0, -s));
                    d1a += (ap - am) * g1;
                    d2a += (ap + am) * g2;
                    d1b += (bp - bm) * g1;
                    d2b += (bp + bm) * g2;
                }
                let kin1 = -d2a * inv_h2 + iu * (2.0 * self.q1 * inv_h) * d1a + c * (self.q1 * self.q1);
                let kin2 = -d2b * inv_h2 + iu * (2.0 * self.q2 * inv_h) * d1b + c * (self.q2 * self.q2);
                y[a * N + b] = (kin1 + kin2) * self.e_c + c * self.potential[a * N + b];
            }
        }
    }

    fn fft2(&self, x: &mut [C], forward: bool) {
        let plan = if forward { &self.fwd } else { &self.inv };
        plan.process(x);
        let mut t = vec![C::default(); N * N];
        for a in 0..N {
            for b in 0..N {
                t[b * N + a] = x[a * N + b];
            }
        }
        plan.process(&mut t);
        for a in 0..N {
            for b in 0..N {
                x[a * N + b] = t[b * N + a];
            }
        }
    }

    /// `(T + s)^-1` with the exact Fourier kinetic energy.
    fn precondition(&self, r: &[C], shift: f64) -> Vec<C> {
        let mut z = r.to_vec();
        self.fft2(&mut z, true);
        let freq = |k: usize| if k < N / 2 { k as f64 } else { k as f64 - N as f64 };
        for a in 0..N {
            for b in 0..N {
                let t = self.e_c * ((freq(a) - self.q1).powi(2) + (freq(b) - self.q2).powi(2));
                z[a * N + b] /= (t + shift) * (N * N) as f64;
            }
        }
        self.fft2(&mut z, false);
        z
    }
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn axpy(y: &mut [C], alpha: C, x: &[C]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Orthonormalises `vs` in place (two Gram-Schmidt passes), dropping
/// columns that become numerically dependent.
fn orthonormalise(vs: Vec<Vec<C>>) -> Vec<Vec<C>> {
    let mut out: Vec<Vec<C>> = Vec::new();
    for mut v in vs {
        let n0 = dot(&v, &v).re.sqrt();
        for _ in 0..2 {
            for q in &out {
                let c = dot(q, &v);
                axpy(&mut v, -c, q);
            }
        }
        let n = dot(&v, &v).re.sqrt();
        if n > 1e-10 * n0.max(1e-300) {
            v.iter_mut().for_each(|c| *c /= n);
            out.push(v);
        }
    }
    out
}

/// Lowest `m` eigenvalues of the grid operator.
pub fn lobpcg(grid: &PhaseGrid, m: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Vec<C>> = (0..m)
        .map(|_| {
            let mut v: Vec<C> = (0..N * N).map(|_| C::new(rng.random::<f64>() - 0.5, 0.0)).collect();
            // bias towards smooth functions
            v = grid.precondition(&v, 1.0);
            v
        })
        .collect();
    let mut x = orthonormalise(start);
    let mut p: Vec<Vec<C>> = Vec::new();
    let mut values = vec![0.0; m];
    for _ in 0..400 {
        let mut basis = x.clone();
        let hx: Vec<Vec<C>> = x
            .iter()
            .map(|v| {
                let mut y = vec![C::default(); N * N];
                grid.apply(v, &mut y);
                y
            })
            .collect();
        let mut worst: f64 = 0.0;
        let mut residuals = Vec::new();
        for k in 0..x.len() {
            let lam = dot(&x[k], &hx[k]).re;
            let mut r = hx[k].clone();
            axpy(&mut r, C::new(-lam, 0.0), &x[k]);
            worst = worst.max(dot(&r, &r).re.sqrt());
            residuals.push(grid.precondition(&r, 1.0));
        }
        if worst < 1e-9 {
            break;
        }
        basis.extend(residuals);
        basis.extend(p.iter().cloned());
        let s = orthonormalise(basis);
        let hs: Vec<Vec<C>> = s
            .iter()
            .map(|v| {
                let mut y = vec![C::default(); N * N];
                grid.apply(v, &mut y);
                y
            })
            .collect();
        let k = s.len();
        let mut a = DMatrix::<C>::zeros(k, k);
        for i in 0..k {
            for j in i..k {
                let v = dot(&s[i], &hs[j]);
                a[(i, j)] = v;
                a[(j, i)] = v.conj();
            }
            a[(i, i)] = C::new(a[(i, i)].re, 0.0);
        }
        let eig = SymmetricEigen::new(a);
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let mut new_x = Vec::with_capacity(m);
        let mut new_p = Vec::with_capacity(m);
        for (slot, &col) in order.iter().take(m).enumerate() {
            values[slot] = eig.eigenvalues[col];
            let mut v = vec![C::default(); N * N];
            let mut q = vec![C::default(); N * N];
            for i in 0..k {
                let c = eig.eigenvectors[(i, col)];
                axpy(&mut v, c, &s[i]);
                if i >= x.len() {
                    axpy(&mut q, c, &s[i]);
                }
            }
            new_x.push(v);
            new_p.push(q);
        }
        x = orthonormalise(new_x);
        p = new_p;
    }
    values
}

