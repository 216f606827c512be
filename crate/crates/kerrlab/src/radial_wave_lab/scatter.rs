//! Stationary scattering: v″ + (ω² − V)v = 0 with horizon-going data.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::tortoise::inverse_tortoise;
use super::ModeSpec;
use crate::error::{KerrError, Result};
use crate::kerr_geometry::BlackHoleParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterOptions {
    pub r_star_min: f64,
    pub r_star_max: f64,
    /// RK4 steps on the first pass; doubled on each refinement.
    pub steps: usize,
    pub max_refinements: u32,
    /// Stop refining once the flux residual is below this.
    pub target_residual: f64,
}

impl Default for ScatterOptions {
    fn default() -> Self {
        Self {
            r_star_min: -60.0,
            r_star_max: 60.0,
            steps: 4000,
            max_refinements: 5,
            target_residual: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScatterResult {
    pub omega: f64,
    /// Horizon wavenumber ω + m_az ω_H.
    pub k: f64,
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub flux_residual: f64,
    /// ω also satisfies Λ₀² ≥ 2|a m_az ω|.
    pub admissible: bool,
    pub steps: usize,
}

impl ScatterResult {
    pub fn r2(&self) -> f64 {
        self.reflection.norm_sqr()
    }
    pub fn t2(&self) -> f64 {
        self.transmission.norm_sqr()
    }
}

/// Solution with v = e^{−ik r*} at the left end, sampled at the RK4 nodes.
pub fn stationary_solution(
    p: &BlackHoleParams,
    mode: &ModeSpec,
    omega: f64,
    x0: f64,
    x1: f64,
    steps: usize,
) -> Result<(Vec<f64>, Vec<Complex64>, Vec<Complex64>)> {
    let k = mode.k_horizon(p, omega);
    let h = (x1 - x0) / steps as f64;
    // r at every half step
    let rr = (0..=2 * steps)
        .map(|j| inverse_tortoise(p, x0 + 0.5 * h * j as f64))
        .collect::<Result<Vec<_>>>()?;
    let q = |j: usize| omega * omega - mode.potential(p, rr[j], omega);
    let mut v = Complex64::from_polar(1.0, -k * x0);
    let mut dv = -I * k * v;
    let mut xs = Vec::with_capacity(steps + 1);
    let mut vs = Vec::with_capacity(steps + 1);
    let mut dvs = Vec::with_capacity(steps + 1);
    xs.push(x0);
    vs.push(v);
    dvs.push(dv);
    for s in 0..steps {
        let (q0, qm, q1) = (q(2 * s), q(2 * s + 1), q(2 * s + 2));
        let k1 = (dv, -q0 * v);
        let k2 = (dv + 0.5 * h * k1.1, -qm * (v + 0.5 * h * k1.0));
        let k3 = (dv + 0.5 * h * k2.1, -qm * (v + 0.5 * h * k2.0));
        let k4 = (dv + h * k3.1, -q1 * (v + h * k3.0));
        v += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        dv += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        xs.push(x0 + h * (s + 1) as f64);
        vs.push(v);
        dvs.push(dv);
    }
    Ok((xs, vs, dvs))
}

fn solve_once(p: &BlackHoleParams, mode: &ModeSpec, omega: f64, o: &ScatterOptions, steps: usize) -> Result<ScatterResult> {
    let (x0, x1) = (o.r_star_min, o.r_star_max);
    let (_, vs, dvs) = stationary_solution(p, mode, omega, x0, x1, steps)?;
    let (v, dv) = (vs[steps], dvs[steps]);
    // v = A_in e^{−iωx} + A_out e^{iωx}
    let a_in = 0.5 * (v - dv / (I * omega)) * Complex64::from_polar(1.0, omega * x1);
    let a_out = 0.5 * (v + dv / (I * omega)) * Complex64::from_polar(1.0, -omega * x1);
    let reflection = a_out / a_in;
    let transmission = 1.0 / a_in;
    let k = mode.k_horizon(p, omega);
    let r2 = reflection.norm_sqr();
    let flux_residual = (omega * (1.0 - r2) - k * transmission.norm_sqr()).abs() / (omega.abs() * (1.0 + r2));
    Ok(ScatterResult {
        omega,
        k,
        reflection,
        transmission,
        flux_residual,
        admissible: mode.admits(p, omega),
        steps,
    })
}

/// Reflection and transmission amplitudes at frequency ω, normalized to unit
/// horizon amplitude and unit incident amplitude at the right end.
pub fn scattering_oracle(p: &BlackHoleParams, mode: &ModeSpec, omega: f64, o: &ScatterOptions) -> Result<ScatterResult> {
    mode.check()?;
    if omega == 0.0 || !omega.is_finite() {
        return Err(KerrError::InvalidParameter(format!("omega = {omega}")));
    }
    if !(o.r_star_max > o.r_star_min) || o.steps < 2 {
        return Err(KerrError::InvalidParameter("bad scattering domain".into()));
    }
    let mut steps = o.steps;
    let mut res = solve_once(p, mode, omega, o, steps)?;
    for _ in 0..o.max_refinements {
        if res.flux_residual < o.target_residual {
            break;
        }
        steps *= 2;
        res = solve_once(p, mode, omega, o, steps)?;
    }
    if !(res.flux_residual <= 1e-4) {
        return Err(KerrError::StiffFailure {
            residual: res.flux_residual,
        });
    }
    Ok(res)
}

/// Oracle over a list of frequencies, in parallel when enabled.
pub fn scan(p: &BlackHoleParams, mode: &ModeSpec, omegas: &[f64], o: &ScatterOptions) -> Result<Vec<ScatterResult>> {
    crate::par::map(omegas.len(), |i| scattering_oracle(p, mode, omegas[i], o))
        .into_iter()
        .collect()
}
