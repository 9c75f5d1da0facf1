use std::collections::BTreeSet;
use std::f64::consts::TAU;

use riccati_core::diffpoly::{parse, SymbolKind};
use riccati_core::numerics::{
    hill_system, pvf_system, uniform_grid, Env, IntegratorOptions, NumericsError, OdeSystem, Trajectory,
};
use riccati_core::painleve::{hamiltonian_system, pii_system, DEFAULT_POLE_THRESHOLD};
use riccati_core::projective::cdis_system;
use riccati_core::superposition::riccati_system;

use crate::{CliError, Params};

pub const DEFAULT_SAMPLES: usize = 512;

/// CSV text and, when a pole cut the run short, where it happened.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrateOutput {
    pub csv: String,
    pub truncated_at: Option<f64>,
}

struct Problem {
    system: OdeSystem,
    env: Env,
    default_ics: String,
}

fn problem(equation: &str, params: &Params) -> Result<Problem, CliError> {
    let mut s = params.scope();
    let k = s.real("k", 1.0)?;
    let alpha = s.real("alpha", 0.0)?;
    let mut env = Env::new().with_const("k", k).with_const("alpha", alpha);
    for name in ["v", "w"] {
        if s.is_set(name) {
            env = env.with_coeff(name, s.spec(name, "")?);
        }
    }
    let hill_v = |env: Env, s: &mut crate::params::Scope| -> Result<Env, CliError> {
        Ok(env.with_coeff("v", s.spec("v", "trig:1;0.3,0")?))
    };
    let (system, env, ics) = match equation {
        "hill" => (hill_system(k), hill_v(env, &mut s)?, "1,0"),
        "pvf" => (pvf_system(k), hill_v(env, &mut s)?, "1,0,-4"),
        "riccati" => (riccati_system(), hill_v(env, &mut s)?, "0"),
        "pii" => (pii_system(), env, "0,1"),
        "pii-hamiltonian" => (hamiltonian_system(), env, "0,1"),
        "cdis" => (cdis_system(), env, "0.8,0.3,-0.2"),
        text => {
            let p = parse(text).map_err(|e| CliError::Usage(format!("unknown equation {text:?}: {e}")))?;
            let bases: BTreeSet<String> = p
                .symbols()
                .into_iter()
                .filter(|s| s.kind() == SymbolKind::Dependent)
                .map(|s| s.base().to_string())
                .collect();
            let base = match bases.len() {
                1 => bases.into_iter().next().unwrap(),
                n => return Err(CliError::Usage(format!("equation must have one dependent variable, found {n}"))),
            };
            let sys = OdeSystem::from_monic(&p, &base).map_err(|e| CliError::Usage(e.to_string()))?;
            (sys, env, "")
        }
    };
    Ok(Problem { system, env, default_ics: ics.to_string() })
}

fn csv_text(traj: &Trajectory, truncated_at: Option<f64>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["x".to_string()];
    header.extend((0..traj.dim()).map(|i| format!("y{i}")));
    w.write_record(&header).map_err(|e| CliError::Io(e.into()))?;
    for (x, s) in traj.grid.iter().zip(&traj.states) {
        let row = std::iter::once(x).chain(s).map(|v| v.to_string());
        w.write_record(row).map_err(|e| CliError::Io(e.into()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let mut text = String::from_utf8(bytes).expect("ascii csv");
    if let Some(x) = truncated_at {
        text.push_str(&format!("# truncated at x={x}\n"));
    }
    Ok(text)
}

pub fn run(equation: &str, params: &Params) -> Result<IntegrateOutput, CliError> {
    let prob = problem(equation, params)?;
    let mut s = params.scope();
    let ics = s.reals("ics", &prob.default_ics)?;
    let (x0, x1) = s.domain((0.0, TAU))?;
    let n = s.grid(DEFAULT_SAMPLES)?;
    if ics.len() != prob.system.dim() {
        return Err(CliError::Usage(format!(
            "--ics: {} values given, the system {:?} needs {}",
            ics.len(),
            prob.system.state_names(),
            prob.system.dim()
        )));
    }
    let opts = IntegratorOptions::default().with_blowup(DEFAULT_POLE_THRESHOLD);
    let grid = uniform_grid(x0, x1, n);
    match prob.system.integrate(&prob.env, &ics, &grid, &opts) {
        Ok(t) => Ok(IntegrateOutput { csv: csv_text(&t, None)?, truncated_at: None }),
        Err(NumericsError::Integration(e)) if e.is_pole() => {
            let x = e.last_x().expect("pole location");
            let t = e.partial().expect("partial trajectory");
            Ok(IntegrateOutput { csv: csv_text(t, Some(x))?, truncated_at: Some(x) })
        }
        Err(NumericsError::MissingCoefficient(c)) => Err(CliError::Usage(format!("coefficient {c} needs --{c}"))),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, &str)]) -> Params {
        let mut p = Params::new();
        for (k, v) in pairs {
            p.set(k, v).unwrap();
        }
        p
    }

    #[test]
    fn hill_shape() {
        let out = run("hill", &params(&[])).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], "x,y0,y1");
        assert_eq!(lines.len(), 513);
        assert!(lines[1].starts_with("0,1,0"));
        assert!(out.truncated_at.is_none());
    }

    #[test]
    fn pii_pole_is_reported() {
        let out = run("pii", &params(&[("ics", "0,1"), ("domain", "0,10")])).unwrap();
        let x = out.truncated_at.expect("pole");
        assert!(x < 10.0);
        assert!(out.csv.trim_end().lines().last().unwrap().starts_with("# truncated at x="));
    }

    #[test]
    fn text_equation() {
        // y'' = -y from (0, 1) gives sin
        let out = run("y2 + y", &params(&[("ics", "0,1"), ("domain", "0,1"), ("grid", "3")])).unwrap();
        let last: Vec<f64> = out.csv.lines().last().unwrap().split(',').map(|t| t.parse().unwrap()).collect();
        assert!((last[1] - 1f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn usage_errors() {
        assert!(matches!(run("y2 + y", &params(&[("ics", "1")])), Err(CliError::Usage(_))));
        assert!(matches!(run("y2*z + y", &params(&[("ics", "1,0")])), Err(CliError::Usage(_))));
        assert!(matches!(run("y1 + v*y", &params(&[("ics", "1")])), Err(CliError::Usage(_))));
        assert!(matches!(run("((", &params(&[])), Err(CliError::Usage(_))));
    }
}
