//! Exact simulation of the adiabatic flux sweep in the charge basis.
//!
//! For each wire parity the ground state is followed around a closed flux
//! loop. The difference of the two geometric phases is the gate phase; the
//! parity splitting and the excitation gap bound the usable sweep rates.

mod eigen;
mod hamiltonian;

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use eigen::{lowest_pairs, lowest_pairs_near, LowestPairs};
pub use hamiltonian::{build_hamiltonian, BandedHermitian, ChargeBasis, Gauge};

use crate::error::{Error, Result};
use crate::instanton;
use crate::parallel;
use crate::params::CircuitParams;
use crate::potential::wrap_angle;

const COLLAPSE_OVERLAP: f64 = 0.5;
const ZETA_CAP: f64 = 1e15;

/// Extra flux points packed around half a flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementWindow {
    pub steps: usize,
    pub width: f64,
}

impl Default for RefinementWindow {
    fn default() -> Self {
        Self {
            steps: 128,
            width: 0.4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub n_steps: usize,
    pub gauge: Gauge,
    pub refinement_window: Option<RefinementWindow>,
    pub direction: Direction,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            n_steps: 256,
            gauge: Gauge::FluxOnJ3,
            refinement_window: Some(RefinementWindow::default()),
            direction: Direction::Forward,
        }
    }
}

impl SweepConfig {
    pub fn uniform(n_steps: usize) -> Self {
        Self {
            n_steps,
            refinement_window: None,
            ..Self::default()
        }
    }

    pub fn with_gauge(mut self, gauge: Gauge) -> Self {
        self.gauge = gauge;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps < 16 {
            return Err(Error::InvalidParams(format!(
                "sweep needs at least 16 steps, got {}",
                self.n_steps
            )));
        }
        if let Some(w) = self.refinement_window {
            if w.steps == 0 || !(w.width > 0.0 && w.width < TAU) {
                return Err(Error::InvalidParams("bad refinement window".into()));
            }
        }
        Ok(())
    }

    /// Sorted flux points in `[0, 2 pi)`; the loop closes back onto `0`.
    pub fn flux_grid(&self) -> Vec<f64> {
        let mut g: Vec<f64> = (0..self.n_steps)
            .map(|k| TAU * k as f64 / self.n_steps as f64)
            .collect();
        if let Some(w) = self.refinement_window {
            let a = PI - 0.5 * w.width;
            g.extend((0..=w.steps).map(|j| a + w.width * j as f64 / w.steps as f64));
        }
        g.sort_by(f64::total_cmp);
        g.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        g
    }
}

/// Ground state and first gap at one flux value.
#[derive(Debug, Clone)]
pub struct SpectralSnapshot {
    pub flux: f64,
    pub ground_energy: f64,
    pub first_gap: f64,
    pub ground_state: Vec<Complex64>,
    /// Set when the gap is below `1e-13` of the energy scale.
    pub degenerate: bool,
}

fn gershgorin_floor(h: &BandedHermitian) -> f64 {
    let n = h.dim();
    let mut off = vec![0.0; n];
    for i in 0..n {
        for j in i.saturating_sub(h.bandwidth())..i {
            let a = h.lower(i, j).norm();
            off[i] += a;
            off[j] += a;
        }
    }
    (0..n).map(|i| h.diagonal(i) - off[i]).fold(f64::INFINITY, f64::min)
}

/// Lowest eigenpair of `h` with the first excitation gap.
///
/// The largest-magnitude component of the returned vector is real and
/// positive.
pub fn ground_snapshot(h: &BandedHermitian, flux: f64) -> Result<SpectralSnapshot> {
    snapshot_near(h, flux, None).map(|(s, _)| s)
}

fn snapshot_near(
    h: &BandedHermitian,
    flux: f64,
    seed: Option<&LowestPairs>,
) -> Result<(SpectralSnapshot, LowestPairs)> {
    let floor = gershgorin_floor(h);
    let bound = floor - 1e-3 * (1.0 + floor.abs());
    let low = lowest_pairs_near(h, bound, seed)?;
    let mut v = low.ground.clone();
    let (mut best, mut at) = (0.0, 0);
    for (i, c) in v.iter().enumerate() {
        if c.norm() > best * (1.0 + 1e-12) {
            best = c.norm();
            at = i;
        }
    }
    let phase = v[at].conj() / v[at].norm();
    v.iter_mut().for_each(|c| *c *= phase);
    let gap = (low.values[1] - low.values[0]).max(0.0);
    let snap = SpectralSnapshot {
        flux,
        ground_energy: low.values[0],
        first_gap: gap,
        ground_state: v,
        degenerate: gap < 1e-13 * (1.0 + low.values[0].abs()),
    };
    Ok((snap, low))
}

/// Ground states of one parity sector along the flux grid.
#[derive(Debug, Clone)]
pub struct ParitySweep {
    pub q_parity: u8,
    pub gauge: Gauge,
    pub basis: ChargeBasis,
    pub snapshots: Vec<SpectralSnapshot>,
}

pub fn sweep_parity(
    params: &CircuitParams,
    q_parity: u8,
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<ParitySweep> {
    params.validate()?;
    sweep.validate()?;
    // sequential in flux order: each point seeds the solver at the next
    let mut seed: Option<LowestPairs> = None;
    let mut snapshots = Vec::new();
    for f in sweep.flux_grid() {
        let h = build_hamiltonian(params, f, q_parity, basis, sweep.gauge);
        let (snap, low) = snapshot_near(&h, f, seed.as_ref())?;
        snapshots.push(snap);
        seed = Some(low);
    }
    Ok(ParitySweep {
        q_parity,
        gauge: sweep.gauge,
        basis,
        snapshots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BerryPhaseResult {
    pub phase: f64,
    pub min_overlap_magnitude: f64,
    pub n_steps: usize,
}

impl ParitySweep {
    /// Gauge-covariant overlap `<psi_a| exp(-i (flux_b - flux_a) W) |psi_b>`,
    /// which equals the plain overlap of the flux-on-J3 representatives.
    fn link(&self, a: (f64, &[Complex64]), b: (f64, &[Complex64])) -> Complex64 {
        let df = b.0 - a.0;
        if self.gauge == Gauge::FluxOnJ3 {
            return a.1.iter().zip(b.1).map(|(x, y)| x.conj() * y).sum();
        }
        a.1.iter()
            .zip(b.1)
            .enumerate()
            .map(|(i, (x, y))| {
                let (n1, n2) = self.basis.charges(i);
                let w = self.gauge.frame_charge(n1, n2);
                x.conj() * y * Complex64::from_polar(1.0, -df * w)
            })
            .sum()
    }

    /// Geometric phase `-arg prod <psi_k|psi_k+1>` of the closed loop.
    pub fn berry_phase(&self, direction: Direction) -> Result<BerryPhaseResult> {
        let s = &self.snapshots;
        let first = (TAU, s[0].ground_state.as_slice());
        let mut path: Vec<(f64, &[Complex64])> = s
            .iter()
            .map(|x| (x.flux, x.ground_state.as_slice()))
            .collect();
        path.push(first);
        if direction == Direction::Reverse {
            path.reverse();
        }
        let mut prod = Complex64::new(1.0, 0.0);
        let mut min_overlap = f64::INFINITY;
        let mut worst = 0.0;
        for w in path.windows(2) {
            let l = self.link(w[0], w[1]);
            if l.norm() < min_overlap {
                min_overlap = l.norm();
                worst = w[0].0;
            }
            prod *= l;
            prod /= prod.norm();
        }
        if min_overlap < COLLAPSE_OVERLAP {
            return Err(Error::OverlapCollapse {
                min_overlap,
                flux: worst,
            });
        }
        Ok(BerryPhaseResult {
            phase: wrap_angle(-prod.arg()),
            min_overlap_magnitude: min_overlap,
            n_steps: s.len(),
        })
    }
}

/// Ground-state Berry phase of one parity sector.
pub fn berry_phase(
    params: &CircuitParams,
    q_parity: u8,
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<BerryPhaseResult> {
    sweep_parity(params, q_parity, sweep, basis)?.berry_phase(sweep.direction)
}

/// One flux point of the parity-splitting profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplittingRow {
    pub flux: f64,
    pub energy_q0: f64,
    pub energy_q1: f64,
    pub gap_q0: f64,
    pub gap_q1: f64,
    /// Smaller of the two gaps.
    pub first_gap: f64,
    /// `E(flux, 1) - E(flux, 0)`.
    pub splitting: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicRange {
    pub zeta: f64,
    pub min_gap: f64,
    pub max_splitting: f64,
    /// Set when the splitting vanishes and `zeta` holds the cap value.
    pub infinite: bool,
}

/// Both parity sectors swept over the same flux grid.
#[derive(Debug, Clone)]
pub struct CircuitRun {
    pub params: CircuitParams,
    pub sweep: SweepConfig,
    pub even: ParitySweep,
    pub odd: ParitySweep,
}

impl CircuitRun {
    pub fn new(params: &CircuitParams, sweep: &SweepConfig, basis: ChargeBasis) -> Result<Self> {
        Ok(Self {
            params: *params,
            sweep: *sweep,
            even: sweep_parity(params, 0, sweep, basis)?,
            odd: sweep_parity(params, 1, sweep, basis)?,
        })
    }

    /// `theta_Berry(q=1) - theta_Berry(q=0)` in `(-pi, pi]`.
    pub fn qubit_phase(&self) -> Result<f64> {
        let b0 = self.even.berry_phase(self.sweep.direction)?;
        let b1 = self.odd.berry_phase(self.sweep.direction)?;
        Ok(wrap_angle(b1.phase - b0.phase))
    }

    pub fn min_overlap(&self) -> Result<f64> {
        let b0 = self.even.berry_phase(self.sweep.direction)?;
        let b1 = self.odd.berry_phase(self.sweep.direction)?;
        Ok(b0.min_overlap_magnitude.min(b1.min_overlap_magnitude))
    }

    pub fn splitting_profile(&self) -> Vec<SplittingRow> {
        self.even
            .snapshots
            .iter()
            .zip(&self.odd.snapshots)
            .map(|(a, b)| SplittingRow {
                flux: a.flux,
                energy_q0: a.ground_energy,
                energy_q1: b.ground_energy,
                gap_q0: a.first_gap,
                gap_q1: b.first_gap,
                first_gap: a.first_gap.min(b.first_gap),
                splitting: b.ground_energy - a.ground_energy,
            })
            .collect()
    }

    /// `min_flux E_gap / max_flux |E(flux, 1) - E(flux, 0)|`.
    pub fn dynamic_range(&self) -> DynamicRange {
        let rows = self.splitting_profile();
        let min_gap = rows.iter().map(|r| r.first_gap).fold(f64::INFINITY, f64::min);
        let max_splitting = rows.iter().map(|r| r.splitting.abs()).fold(0.0, f64::max);
        let infinite = max_splitting < 1e-15 * self.params.j();
        DynamicRange {
            zeta: if infinite { ZETA_CAP } else { min_gap / max_splitting },
            min_gap,
            max_splitting,
            infinite,
        }
    }

    /// `integral dflux (E(flux, 1) - E(flux, 0)) / rate` around the loop.
    pub fn dynamical_phase(&self, sweep_rate: f64) -> Result<f64> {
        if !(sweep_rate > 0.0) {
            return Err(Error::InvalidParams(format!(
                "sweep rate must be positive, got {sweep_rate}"
            )));
        }
        let rows = self.splitting_profile();
        let mut acc = 0.0;
        for (k, r) in rows.iter().enumerate() {
            let (f1, s1) = match rows.get(k + 1) {
                Some(n) => (n.flux, n.splitting),
                None => (TAU, rows[0].splitting),
            };
            acc += 0.5 * (r.splitting + s1) * (f1 - r.flux);
        }
        Ok(acc / sweep_rate)
    }
}

pub fn qubit_phase(params: &CircuitParams, sweep: &SweepConfig, basis: ChargeBasis) -> Result<f64> {
    CircuitRun::new(params, sweep, basis)?.qubit_phase()
}

pub fn qubit_splitting_profile(
    params: &CircuitParams,
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<Vec<SplittingRow>> {
    Ok(CircuitRun::new(params, sweep, basis)?.splitting_profile())
}

pub fn dynamical_range(
    params: &CircuitParams,
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<DynamicRange> {
    Ok(CircuitRun::new(params, sweep, basis)?.dynamic_range())
}

pub fn dynamical_phase(
    params: &CircuitParams,
    sweep_rate: f64,
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<f64> {
    CircuitRun::new(params, sweep, basis)?.dynamical_phase(sweep_rate)
}

/// Parity splitting `E(flux, 1) - E(flux, 0)` at a single flux value.
pub fn splitting_at(params: &CircuitParams, flux: f64, basis: ChargeBasis) -> Result<f64> {
    let e = |q| {
        ground_snapshot(&build_hamiltonian(params, flux, q, basis, Gauge::FluxOnJ3), flux)
            .map(|s| s.ground_energy)
    };
    Ok(e(1)? - e(0)?)
}

/// One row of a gate-phase sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasePoint {
    pub epsilon: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub phase: f64,
    /// Instanton estimate, absent where the two-path picture does not apply.
    pub instanton_phase: Option<f64>,
    pub relative_deviation: Option<f64>,
    pub min_overlap: f64,
    pub zeta: f64,
}

/// Gate phase over a grid of junction asymmetries for a fixed gate-charge
/// setting, with the matching instanton estimates.
pub fn phase_vs_epsilon_sweep(
    template: &CircuitParams,
    epsilon_grid: &[f64],
    sweep: &SweepConfig,
    basis: ChargeBasis,
    threads: usize,
) -> Result<Vec<PhasePoint>> {
    if let Some(e) = epsilon_grid.iter().find(|e| !(0.0..=0.15).contains(*e)) {
        return Err(Error::InvalidParams(format!("epsilon {e} outside [0, 0.15]")));
    }
    parallel::map(epsilon_grid, threads, |&eps| {
        let p = template.with_epsilon(eps);
        let run = CircuitRun::new(&p, sweep, basis)?;
        let phase = run.qubit_phase()?;
        let instanton_phase = instanton::predict(&p).ok().map(|x| x.gate_phase_2theta);
        Ok(PhasePoint {
            epsilon: eps,
            q_plus: p.q_plus(),
            q_minus: p.q_minus(),
            phase,
            instanton_phase,
            relative_deviation: instanton_phase.map(|t| ((phase - t) / phase).abs()),
            min_overlap: run.min_overlap()?,
            zeta: run.dynamic_range().zeta,
        })
    })
    .into_iter()
    .collect()
}

/// One row of a dynamic-range table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaPoint {
    pub epsilon: f64,
    pub q_plus: f64,
    pub q_minus: f64,
    pub range: DynamicRange,
}

/// Dynamic range over a list of `(epsilon, Q+)` settings sharing `Q-`.
pub fn dynamic_range_table(
    template: &CircuitParams,
    settings: &[(f64, f64)],
    sweep: &SweepConfig,
    basis: ChargeBasis,
    threads: usize,
) -> Result<Vec<ZetaPoint>> {
    let q_minus = template.q_minus();
    parallel::map(settings, threads, |&(eps, qp)| {
        let p = template.with_epsilon(eps).with_gate_charges(qp, q_minus);
        let range = CircuitRun::new(&p, sweep, basis)?.dynamic_range();
        Ok(ZetaPoint {
            epsilon: eps,
            q_plus: qp,
            q_minus,
            range,
        })
    })
    .into_iter()
    .collect()
}

/// Resonance of the dynamic range in `Q+`: the gate charge at which the
/// parity splitting at half a flux quantum changes sign, bracketed by the
/// scan grid and refined by bisection. Falls back to the largest scanned
/// dynamic range when no sign change is found.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resonance {
    pub q_plus: f64,
    pub range: DynamicRange,
    /// True when located from a sign change rather than the scan maximum.
    pub bracketed: bool,
}

pub fn locate_resonance(
    template: &CircuitParams,
    q_plus_grid: &[f64],
    sweep: &SweepConfig,
    basis: ChargeBasis,
) -> Result<Resonance> {
    let q_minus = template.q_minus();
    let at = |qp: f64| template.with_gate_charges(qp, q_minus);
    let split: Vec<f64> = q_plus_grid
        .iter()
        .map(|&qp| splitting_at(&at(qp), PI, basis))
        .collect::<Result<_>>()?;
    let bracket = split
        .windows(2)
        .position(|w| w[0] == 0.0 || w[0].signum() != w[1].signum());
    if let Some(k) = bracket {
        let (mut lo, mut hi) = (q_plus_grid[k], q_plus_grid[k + 1]);
        let mut s_lo = split[k];
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            let s = splitting_at(&at(mid), PI, basis)?;
            if s == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if s.signum() == s_lo.signum() {
                lo = mid;
                s_lo = s;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-12 {
                break;
            }
        }
        let qp = 0.5 * (lo + hi);
        let range = CircuitRun::new(&at(qp), sweep, basis)?.dynamic_range();
        return Ok(Resonance {
            q_plus: qp,
            range,
            bracketed: true,
        });
    }
    let mut best: Option<Resonance> = None;
    for &qp in q_plus_grid {
        let range = CircuitRun::new(&at(qp), sweep, basis)?.dynamic_range();
        if best.map_or(true, |b| range.zeta > b.range.zeta) {
            best = Some(Resonance {
                q_plus: qp,
                range,
                bracketed: false,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidParams("empty gate-charge grid".into()))
}

pub fn phase_csv(points: &[PhasePoint]) -> String {
    let mut s = String::from("# epsilon,q_plus_2e,q_minus_2e,phase_rad\n");
    for p in points {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.epsilon, p.q_plus, p.q_minus, p.phase
        ));
    }
    s
}

pub fn zeta_csv(points: &[ZetaPoint]) -> String {
    let mut s = String::from("# epsilon,q_plus_2e,q_minus_2e,zeta\n");
    for p in points {
        s.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}\n",
            p.epsilon, p.q_plus, p.q_minus, p.range.zeta
        ));
    }
    s
}

#[cfg(test)]
mod tests;
