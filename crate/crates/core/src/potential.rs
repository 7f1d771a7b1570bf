//! Josephson potential landscape of the two-island loop.
//!
//! The flux is split symmetrically across the two weak junctions:
//! `V = -j1 cos(phi1 - flux/2) - j2 cos(phi2 + flux/2) - j3 cos(phi1 - phi2)`.
//! Minima are reported in the centre-of-mass coordinates
//! `delta_phi = phi1 - phi2` and `phi_bar = (phi1 + phi2) / 2`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::CircuitParams;

const DEDUP_TOL: f64 = 1e-6;
const GRADIENT_TOL: f64 = 1e-10;
const DEGENERACY_TOL: f64 = 1e-9;

/// A local minimum of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimaReport {
    pub phi1: f64,
    pub phi2: f64,
    pub delta_phi: f64,
    pub phi_bar: f64,
    pub v_min_numeric: f64,
    /// Closed-form minimum energy; only defined at half a flux quantum when
    /// the two-path condition holds.
    pub v_min_formula: Option<f64>,
    pub degenerate: bool,
}

/// Closed-form location and depth of the two degenerate minima at `flux = pi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormMinima {
    pub cos_delta_phi: f64,
    /// Positive branch; the partner minimum sits at `-delta_phi`.
    pub delta_phi: f64,
    pub phi_bar: f64,
    /// Centre-of-mass phase of the partner minimum at `-delta_phi`.
    pub phi_bar_partner: f64,
    pub v_min_formula: f64,
}

/// Maps an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

pub fn potential_energy(params: &CircuitParams, phi1: f64, phi2: f64, flux: f64) -> f64 {
    -params.j1 * (phi1 - 0.5 * flux).cos()
        - params.j2 * (phi2 + 0.5 * flux).cos()
        - params.j3 * (phi1 - phi2).cos()
}

fn gradient(p: &CircuitParams, phi1: f64, phi2: f64, flux: f64) -> [f64; 2] {
    let s1 = p.j1 * (phi1 - 0.5 * flux).sin();
    let s2 = p.j2 * (phi2 + 0.5 * flux).sin();
    let s3 = p.j3 * (phi1 - phi2).sin();
    [s1 + s3, s2 - s3]
}

fn hessian(p: &CircuitParams, phi1: f64, phi2: f64, flux: f64) -> [[f64; 2]; 2] {
    let c1 = p.j1 * (phi1 - 0.5 * flux).cos();
    let c2 = p.j2 * (phi2 + 0.5 * flux).cos();
    let c3 = p.j3 * (phi1 - phi2).cos();
    [[c1 + c3, -c3], [-c3, c2 + c3]]
}

/// `J3 (J1 + J2) >= J1 J2 >= J3 (J1 - J2) >= 0`.
pub fn two_path_condition(params: &CircuitParams) -> bool {
    let (j1, j2, j3) = (params.j1, params.j2, params.j3);
    j3 * (j1 + j2) >= j1 * j2 && j1 * j2 >= j3 * (j1 - j2) && j3 * (j1 - j2) >= 0.0
}

/// Location and energy of the degenerate minima at half a flux quantum.
///
/// The minimum energy is `-J3 (J1^2 + J2^2) / (2 J1 J2) - J1 J2 / (2 J3)`.
/// The variant with the first term positive does not match direct
/// minimisation and is not used.
pub fn degenerate_minima_closed_form(params: &CircuitParams) -> Result<ClosedFormMinima> {
    if !two_path_condition(params) {
        return Err(Error::ConditionViolated(format!(
            "j1={}, j2={}, j3={}",
            params.j1, params.j2, params.j3
        )));
    }
    let (j1, j2, j3) = (params.j1, params.j2, params.j3);
    let cos_delta = ((j1 * j1 + j2 * j2) / (2.0 * j1 * j2) - j1 * j2 / (2.0 * j3 * j3)).clamp(-1.0, 1.0);
    let delta = cos_delta.acos();
    let (s, c) = (0.5 * delta).sin_cos();
    let phi_bar = ((j1 - j2) * c).atan2((j1 + j2) * s);
    let phi_bar_partner = ((j1 - j2) * c).atan2(-(j1 + j2) * s);
    let v_min = -j3 * (j1 * j1 + j2 * j2) / (2.0 * j1 * j2) - j1 * j2 / (2.0 * j3);
    Ok(ClosedFormMinima {
        cos_delta_phi: cos_delta,
        delta_phi: delta,
        phi_bar,
        phi_bar_partner,
        v_min_formula: v_min,
    })
}

/// Converts `(phi1, phi2)` to `(delta_phi, phi_bar)`, both in `(-pi, pi]`,
/// keeping `phi1 = phi_bar + delta_phi/2` consistent modulo `2 pi`.
pub fn centre_of_mass(phi1: f64, phi2: f64) -> (f64, f64) {
    let raw_delta = phi1 - phi2;
    let delta = wrap_angle(raw_delta);
    let turns = ((raw_delta - delta) / TAU).round();
    let phi_bar = wrap_angle(0.5 * (phi1 + phi2) - PI * turns);
    (delta, phi_bar)
}

fn refine(p: &CircuitParams, mut x: [f64; 2], flux: f64) -> Option<[f64; 2]> {
    let scale = p.j1 + p.j2 + p.j3;
    let v = |y: [f64; 2]| potential_energy(p, y[0], y[1], flux);
    for _ in 0..500 {
        let g = gradient(p, x[0], x[1], flux);
        let h = hessian(p, x[0], x[1], flux);
        let (a, b, d) = (h[0][0], h[0][1], h[1][1]);
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let lam_min = mid - rad;
        if g[0].hypot(g[1]) < GRADIENT_TOL {
            if lam_min > 0.0 {
                return Some(x);
            }
            // stalled on a saddle: step off along the softest direction
            let e = if b.abs() > 1e-300 { [b, lam_min - a] } else if a <= d { [1.0, 0.0] } else { [0.0, 1.0] };
            let n = e[0].hypot(e[1]);
            let e = [0.1 * e[0] / n, 0.1 * e[1] / n];
            let plus = [x[0] + e[0], x[1] + e[1]];
            let minus = [x[0] - e[0], x[1] - e[1]];
            x = if v(plus) <= v(minus) { plus } else { minus };
            continue;
        }
        // Newton step on H + mu I, shifted to stay positive definite
        let mu = (-lam_min).max(0.0) + if lam_min > 1e-8 * scale { 0.0 } else { 1e-3 * scale };
        let (a, d) = (a + mu, d + mu);
        let det = a * d - b * b;
        let step = [-(d * g[0] - b * g[1]) / det, -(a * g[1] - b * g[0]) / det];
        let v0 = v(x);
        let g0 = g[0].hypot(g[1]);
        let slope = g[0] * step[0] + g[1] * step[1];
        let mut t = 1.0;
        loop {
            let y = [x[0] + t * step[0], x[1] + t * step[1]];
            // near convergence energy differences drown in rounding, so a
            // shrinking gradient also counts as progress
            let gy = gradient(p, y[0], y[1], flux);
            let shrinks = lam_min > 0.0 && gy[0].hypot(gy[1]) < 0.5 * g0;
            if v(y) <= v0 + 1e-4 * t * slope || shrinks || t < 1e-10 {
                x = y;
                break;
            }
            t *= 0.5;
        }
    }
    None
}

/// All local minima on the torus, sorted by energy.
pub fn minimize_potential(
    params: &CircuitParams,
    flux: f64,
    grid_resolution: usize,
) -> Result<Vec<MinimaReport>> {
    if grid_resolution < 64 {
        return Err(Error::ResolutionTooCoarse(grid_resolution));
    }
    let n = grid_resolution;
    let h = TAU / n as f64;
    let angle = |i: usize| -PI + h * i as f64;
    let mut grid = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            grid[i * n + j] = potential_energy(params, angle(i), angle(j), flux);
        }
    }

    let mut found: Vec<[f64; 2]> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = grid[i * n + j];
            let is_min = (-1i64..=1).all(|di| {
                (-1i64..=1).all(|dj| {
                    if di == 0 && dj == 0 {
                        return true;
                    }
                    let ii = (i as i64 + di).rem_euclid(n as i64) as usize;
                    let jj = (j as i64 + dj).rem_euclid(n as i64) as usize;
                    v <= grid[ii * n + jj]
                })
            });
            if !is_min {
                continue;
            }
            let x = refine(params, [angle(i), angle(j)], flux).ok_or(Error::RefinementFailed {
                phi1: angle(i),
                phi2: angle(j),
            })?;
            let x = [wrap_angle(x[0]), wrap_angle(x[1])];
            let hs = hessian(params, x[0], x[1], flux);
            if hs[0][0] * hs[1][1] - hs[0][1] * hs[1][0] <= 0.0 {
                continue;
            }
            let dup = found.iter().any(|y| {
                wrap_angle(x[0] - y[0]).abs() < DEDUP_TOL && wrap_angle(x[1] - y[1]).abs() < DEDUP_TOL
            });
            if !dup {
                found.push(x);
            }
        }
    }

    let at_half_flux = wrap_angle(flux - PI).abs() < 1e-12;
    let formula = if at_half_flux {
        degenerate_minima_closed_form(params).ok().map(|c| c.v_min_formula)
    } else {
        None
    };
    let mut out: Vec<MinimaReport> = found
        .into_iter()
        .map(|x| {
            let (delta_phi, phi_bar) = centre_of_mass(x[0], x[1]);
            MinimaReport {
                phi1: x[0],
                phi2: x[1],
                delta_phi,
                phi_bar,
                v_min_numeric: potential_energy(params, x[0], x[1], flux),
                v_min_formula: formula,
                degenerate: false,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.v_min_numeric
            .total_cmp(&b.v_min_numeric)
            .then(b.delta_phi.total_cmp(&a.delta_phi))
    });
    if at_half_flux && out.len() >= 2 {
        let tol = DEGENERACY_TOL * params.j();
        let e0 = out[0].v_min_numeric;
        let count = out.iter().filter(|m| m.v_min_numeric - e0 < tol).count();
        if count >= 2 {
            for m in out.iter_mut().take(count) {
                m.degenerate = true;
            }
        }
    }
    Ok(out)
}

/// Potential minimised over `phi_bar` at each `delta_phi`.
pub fn landscape_slice(params: &CircuitParams, flux: f64, delta_phi_grid: &[f64]) -> Vec<(f64, f64)> {
    let (j1, j2, j3) = (params.j1, params.j2, params.j3);
    delta_phi_grid
        .iter()
        .map(|&d| {
            let amp = (j1 * j1 + j2 * j2 + 2.0 * j1 * j2 * (d - flux).cos()).max(0.0).sqrt();
            (d, -amp - j3 * d.cos())
        })
        .collect()
}

/// `n` points covering `(-pi, pi]`.
pub fn delta_phi_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|k| -PI + TAU * k as f64 / n as f64).collect()
}

/// CSV rendering of a slice, energies divided by `J`.
pub fn slice_csv(params: &CircuitParams, rows: &[(f64, f64)]) -> String {
    let j = params.j();
    let mut s = String::from("# delta_phi_rad,energy_over_J\n");
    for (d, e) in rows {
        s.push_str(&format!("{:.16e},{:.16e}\n", d, e / j));
    }
    s
}
