//! Closed-form instanton predictions for the vortex phase gate.
//!
//! A vortex entering the loop tunnels along two paths whose actions differ by
//! `i(S+ - S-) = i pi q + i beta - d`. The interference of the two paths sets
//! the relative phase of the two wire-parity sectors.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::CircuitParams;
use crate::potential::two_path_condition;

const DEGENERATE_TOL: f64 = 1e-14;

/// Damping and Abelian phase of the path-action difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ActionDifference {
    pub d: f64,
    pub beta: f64,
    /// False when `epsilon >= eta`; the prediction is then outside the
    /// regime where the two-path picture is controlled.
    pub in_regime: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InstantonPrediction {
    pub eta: f64,
    pub d: f64,
    #[serde(rename = "beta_rad")]
    pub beta: f64,
    #[serde(rename = "gate_phase_rad")]
    pub gate_phase_2theta: f64,
    pub p_even: f64,
    pub p_odd: f64,
    #[serde(skip)]
    pub in_regime: bool,
}

/// Single-qubit result of the idealised interferometer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferometerGate {
    /// `exp(i phi sigma_z)` as a 2x2 matrix.
    pub unitary: [[Complex64; 2]; 2],
    /// Whether the transmission probability is independent of the qubit.
    pub qubit_independent: bool,
}

/// `eta = (1 - eps^2) / (2 alpha)`.
pub fn eta(params: &CircuitParams) -> f64 {
    let eps = params.epsilon();
    (1.0 - eps * eps) / (2.0 * params.alpha())
}

/// `d = pi sqrt(c_bar J eta / E_C) (2 eps / eta + eta c_tilde / c_bar)`.
///
/// For equal island capacitances (`c_bar = 2`, `c_tilde = 0`) this is
/// `4 pi eps sqrt(alpha J / (E_C (1 - eps^2)))`.
fn damping(params: &CircuitParams) -> f64 {
    let eps = params.epsilon();
    let eta = eta(params);
    let cb = params.c_bar;
    PI * (cb * params.j() * eta / params.e_c).sqrt() * (2.0 * eps / eta + eta * params.c_tilde / cb)
}

/// Abelian phase `2 pi (Q1 + Q2)` in `[0, 2 pi)`.
fn abelian_phase(params: &CircuitParams) -> f64 {
    (TAU * params.q_plus()).rem_euclid(TAU)
}

pub fn action_difference(params: &CircuitParams) -> Result<ActionDifference> {
    params.validate()?;
    if !two_path_condition(params) {
        return Err(Error::ConditionViolated(format!(
            "j1={}, j2={}, j3={}",
            params.j1, params.j2, params.j3
        )));
    }
    Ok(ActionDifference {
        d: damping(params),
        beta: abelian_phase(params),
        in_regime: params.epsilon() < eta(params),
    })
}

/// `2 theta = arg(sinh d + i sin beta)`.
pub fn gate_phase(d: f64, beta: f64) -> Result<f64> {
    let (re, im) = (d.sinh(), beta.sin());
    if re.abs() < DEGENERATE_TOL && im.abs() < DEGENERATE_TOL {
        return Err(Error::Degenerate);
    }
    Ok(im.atan2(re))
}

/// `(|1 + e^{-d + i beta}|, |1 - e^{-d + i beta}|)`.
pub fn transition_probabilities(d: f64, beta: f64) -> (f64, f64) {
    let z = Complex64::from_polar((-d).exp(), beta);
    ((1.0 + z).norm(), (1.0 - z).norm())
}

/// Diagonal gate `diag(e^{i theta_0}, e^{i theta_1})` with
/// `theta_q = arg(1 + (-1)^q e^{-d + i beta})`, so that
/// `theta_0 - theta_1 = gate_phase(d, beta)`.
pub fn gate_unitary_from(d: f64, beta: f64) -> Result<[Complex64; 2]> {
    gate_phase(d, beta)?;
    let z = Complex64::from_polar((-d).exp(), beta);
    let t0 = (1.0 + z).arg();
    let t1 = (1.0 - z).arg();
    Ok([Complex64::from_polar(1.0, t0), Complex64::from_polar(1.0, t1)])
}

pub fn gate_unitary(params: &CircuitParams) -> Result<[Complex64; 2]> {
    let a = action_difference(params)?;
    gate_unitary_from(a.d, a.beta)
}

pub fn predict(params: &CircuitParams) -> Result<InstantonPrediction> {
    let a = action_difference(params)?;
    let (p_even, p_odd) = transition_probabilities(a.d, a.beta);
    Ok(InstantonPrediction {
        eta: eta(params),
        d: a.d,
        beta: a.beta,
        gate_phase_2theta: gate_phase(a.d, a.beta)?,
        p_even,
        p_odd,
        in_regime: a.in_regime,
    })
}

/// Amplitudes `amp_above` and `amp_below` for passing either side of the
/// qubit pair combine into `A sigma_z + B`. When `Re(A conj(B)) = 0` the
/// transmission is qubit independent and the normalised operator is
/// `exp(i phi sigma_z)` with `phi = arctan(|A| / |B|)`, signed by
/// `Im(A conj(B))`.
pub fn interferometer_gate(amp_above: Complex64, amp_below: Complex64) -> InterferometerGate {
    let cross = amp_above * amp_below.conj();
    let scale = amp_above.norm_sqr() + amp_below.norm_sqr();
    let qubit_independent = cross.re.abs() <= 1e-12 * scale;
    let sign = if cross.im < 0.0 { -1.0 } else { 1.0 };
    let phi = sign * amp_above.norm().atan2(amp_below.norm());
    let zero = Complex64::new(0.0, 0.0);
    InterferometerGate {
        unitary: [
            [Complex64::from_polar(1.0, phi), zero],
            [zero, Complex64::from_polar(1.0, -phi)],
        ],
        qubit_independent,
    }
}

/// Asymmetry that produces the requested gate phase, keeping every other
/// parameter of `template` fixed.
pub fn solve_epsilon_for_phase(target_2theta: f64, template: &CircuitParams) -> Result<f64> {
    let beta = abelian_phase(template);
    let at = |eps: f64| {
        let p = template.with_epsilon(eps);
        damping(&p)
    };
    let phase = |eps: f64| beta.sin().atan2(at(eps).sinh());
    // eps < eta(eps) <=> eps^2 + 2 alpha eps - 1 < 0
    let alpha = template.alpha();
    let eps_max = -alpha + (alpha * alpha + 1.0).sqrt();
    let unattainable = Error::Unattainable {
        target: target_2theta,
        eta: eps_max,
    };
    let top = phase(0.0);
    if beta.sin().abs() < DEGENERATE_TOL {
        return Err(unattainable);
    }
    if (target_2theta - top).abs() < 1e-12 {
        return Ok(0.0);
    }
    let bottom = phase(eps_max);
    let (lo_val, hi_val) = if top > bottom { (bottom, top) } else { (top, bottom) };
    if !(target_2theta > lo_val && target_2theta < hi_val) {
        return Err(unattainable);
    }
    let (mut lo, mut hi) = (0.0, eps_max);
    let increasing = bottom > top;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let above = phase(mid) > target_2theta;
        if above != increasing {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let eps = 0.5 * (lo + hi);
    debug_assert!((phase(eps) - target_2theta).abs() < 1e-10);
    Ok(eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn base(eps: f64) -> CircuitParams {
        CircuitParams::symmetric(eps, 2.0, 0.4).with_gate_charges(0.25, 0.0)
    }

    #[test]
    fn symmetric_junctions_have_no_damping() {
        let a = action_difference(&base(0.0)).unwrap();
        assert_eq!(a.d, 0.0);
        assert!((a.beta - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn reduced_damping_formula() {
        for &eps in &[0.01, 0.03, 0.08] {
            let p = base(eps);
            let expect = 4.0 * PI * eps * (2.0 / (0.4 * (1.0 - eps * eps))).sqrt();
            assert!((action_difference(&p).unwrap().d - expect).abs() < 1e-13);
        }
    }

    #[test]
    fn magic_phase_from_asinh_one() {
        let d = 1f64.asinh();
        assert!((gate_phase(d, FRAC_PI_2).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(gate_phase(0.0, FRAC_PI_2).unwrap(), FRAC_PI_2);
        assert!(gate_phase(40.0, FRAC_PI_2).unwrap() < 1e-16);
        assert_eq!(gate_phase(0.0, 0.0), Err(Error::Degenerate));
    }

    #[test]
    fn probabilities() {
        let (a, b) = transition_probabilities(0.0, 0.0);
        assert!((a - 2.0).abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = transition_probabilities(1.0, 0.0);
        let e = (-1f64).exp();
        assert!((a - (1.0 + e)).abs() < 1e-15 && (b - (1.0 - e)).abs() < 1e-15);
        let (a, b) = transition_probabilities(0.7, FRAC_PI_2);
        assert!((a - b).abs() < 1e-15);
        assert!((a - (1.0 + (-1.4f64).exp()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn unitary_relative_phase() {
        let u = gate_unitary_from(1f64.asinh(), FRAC_PI_2).unwrap();
        assert!(((u[0] / u[1]).arg() - FRAC_PI_4).abs() < 1e-15);
        let u = gate_unitary_from(0.0, FRAC_PI_2).unwrap();
        assert!(((u[0] / u[1]).arg() - FRAC_PI_2).abs() < 1e-15);
        assert!((u[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn interferometer_examples() {
        let c = |re, im| Complex64::new(re, im);
        let g = interferometer_gate(c(0.0, 1.0), c(1.0, 0.0));
        assert!(g.qubit_independent);
        assert!((g.unitary[0][0] - Complex64::from_polar(1.0, FRAC_PI_4)).norm() < 1e-15);
        let g = interferometer_gate(c(0.0, 0.0), c(1.0, 0.0));
        assert!(g.qubit_independent);
        assert!((g.unitary[0][0] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(!interferometer_gate(c(1.0, 0.0), c(1.0, 0.0)).qubit_independent);
    }

    #[test]
    fn inverse_design() {
        let eps = solve_epsilon_for_phase(FRAC_PI_4, &base(0.0)).unwrap();
        assert!((eps - 0.031351).abs() < 2e-6, "{eps}");
        let d = action_difference(&base(eps)).unwrap().d;
        assert!((d - 1f64.asinh()).abs() < 1e-9);
        assert_eq!(solve_epsilon_for_phase(FRAC_PI_2, &base(0.0)).unwrap(), 0.0);
        assert!(matches!(
            solve_epsilon_for_phase(0.9 * PI, &base(0.0)),
            Err(Error::Unattainable { .. })
        ));
    }

    #[test]
    fn regime_flag() {
        assert!(action_difference(&base(0.1)).unwrap().in_regime);
        // beyond eps = eta the lower two-path inequality fails as well
        assert!(matches!(
            action_difference(&base(0.3)),
            Err(Error::ConditionViolated(_))
        ));
    }
}
