use serde::Serialize;

use std::collections::BTreeMap;

use crate::diffpoly::{CompiledPoly, DiffPoly, DiffSymbol, SymbolKind};

use super::system::{Env, OdeSystem};
use super::trajectory::Trajectory;
use super::NumericsError;

/// Max and RMS of a residual series against a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    pub rms: f64,
    pub n_samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    /// Any non-finite sample makes `max_abs` infinite and the report fail.
    pub fn from_values(values: &[f64], tolerance: f64) -> Self {
        let n = values.len();
        let mut max_abs: f64 = 0.0;
        let mut sq = 0.0;
        for v in values {
            let a = if v.is_finite() { v.abs() } else { f64::INFINITY };
            max_abs = max_abs.max(a);
            sq += a * a;
        }
        let rms = if n == 0 { 0.0 } else { (sq / n as f64).sqrt().min(max_abs) };
        ResidualReport { max_abs, rms, n_samples: n, tolerance, pass: max_abs <= tolerance }
    }

    /// Combines reports on the same tolerance (worst max, pooled RMS).
    pub fn merge(reports: &[ResidualReport], tolerance: f64) -> Self {
        let n: usize = reports.iter().map(|r| r.n_samples).sum();
        let max_abs = reports.iter().map(|r| r.max_abs).fold(0.0, f64::max);
        let sq: f64 = reports.iter().map(|r| r.rms * r.rms * r.n_samples as f64).sum();
        let rms = if n == 0 { 0.0 } else { (sq / n as f64).sqrt().min(max_abs) };
        ResidualReport { max_abs, rms, n_samples: n, tolerance, pass: max_abs <= tolerance }
    }
}

/// `p` evaluated at every sample of `traj`, which must have been produced by
/// `system` (same state layout). Jets above the state come from the system.
pub fn residual_series(
    p: &DiffPoly,
    traj: &Trajectory,
    system: &OdeSystem,
    env: &Env,
) -> Result<Vec<f64>, NumericsError> {
    if traj.names != system.state_names() {
        return Err(NumericsError::Layout(format!(
            "trajectory components {:?} do not match system state {:?}",
            traj.names,
            system.state_names()
        )));
    }
    let ev = system.compile(std::slice::from_ref(p), env)?;
    Ok(ev.eval_along(traj).into_iter().map(|v| v[0]).collect())
}

pub fn residual(
    p: &DiffPoly,
    traj: &Trajectory,
    system: &OdeSystem,
    env: &Env,
    tolerance: f64,
) -> Result<ResidualReport, NumericsError> {
    Ok(ResidualReport::from_values(&residual_series(p, traj, system, env)?, tolerance))
}

/// Maps a column label such as `u2` or `psi` to the dependent jet symbol it
/// names (trailing digits are the derivative order).
pub fn column_symbol(name: &str) -> DiffSymbol {
    let split = name.trim_end_matches(|c: char| c.is_ascii_digit()).len();
    let order = name[split..].parse().unwrap_or(0);
    DiffSymbol::dependent(&name[..split], order)
}

/// Evaluates `p` on the columns of `traj`, each read as a dependent jet via
/// [`column_symbol`]; coefficient jets come from `env`.
pub fn residual_columns_series(p: &DiffPoly, traj: &Trajectory, env: &Env) -> Result<Vec<f64>, NumericsError> {
    let mut slots = vec![DiffSymbol::independent()];
    slots.extend(traj.names.iter().map(|n| column_symbol(n)));
    let mut coeffs: BTreeMap<String, u32> = BTreeMap::new();
    for s in p.symbols() {
        if s.kind() == SymbolKind::Coefficient {
            let e = coeffs.entry(s.base().to_string()).or_insert(0);
            *e = (*e).max(s.order());
        }
    }
    let mut specs = Vec::new();
    for (base, m) in &coeffs {
        let spec = env.coeffs.get(base).ok_or_else(|| NumericsError::MissingCoefficient(base.clone()))?;
        slots.extend((0..=*m).map(|j| DiffSymbol::coefficient(base, j)));
        specs.push((spec, *m as usize));
    }
    let compiled =
        CompiledPoly::new(p, &slots, &env.const_map()).map_err(|e| NumericsError::MissingSymbol(e.to_string()))?;
    let mut buf = Vec::with_capacity(slots.len());
    Ok(traj
        .grid
        .iter()
        .zip(&traj.states)
        .map(|(x, s)| {
            buf.clear();
            buf.push(*x);
            buf.extend_from_slice(s);
            for (spec, m) in &specs {
                buf.extend(spec.jet(*x, *m));
            }
            compiled.eval(&buf)
        })
        .collect())
}

pub fn residual_columns(
    p: &DiffPoly,
    traj: &Trajectory,
    env: &Env,
    tolerance: f64,
) -> Result<ResidualReport, NumericsError> {
    Ok(ResidualReport::from_values(&residual_columns_series(p, traj, env)?, tolerance))
}
