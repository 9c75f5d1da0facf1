//! Solutions built from particular solutions: the cross-ratio and
//! three-point rule for first-order Riccati equations, and closed-form rules
//! (Pinney, Kummer-Schwarz, Reid, Thomas) built from a linear fundamental pair.

use std::fmt;

use crate::diffpoly::parse;
use crate::numerics::{
    longest_run, uniform_grid, Env, FunctionSpec, IntegratorOptions, LinearPair, NumericsError, OdeSystem,
    ResidualReport, Taylor, Trajectory,
};

/// Default distance from zero required of denominators and forms.
pub const DEFAULT_MARGIN: f64 = 1e-3;

#[derive(Clone, Debug, thiserror::Error)]
pub enum SuperpositionError {
    #[error("denominator vanishes at x = {x}")]
    DenominatorVanishes { x: f64 },
    #[error("constraint violated: {0}")]
    ConstraintViolated(String),
    #[error("no subinterval where the construction is admissible: {0}")]
    NonPositiveForm(String),
    #[error("fundamental pair has zero Wronskian")]
    ZeroWronskian,
    #[error("input trajectories do not share a grid")]
    GridMismatch,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `(u - u1)(u3 - u2) / ((u - u2)(u3 - u1))` at every sample, from the first
/// column of each trajectory.
///
/// `u` may coincide with `u1` (the series is then 0), but every other pair
/// must stay apart by `margin`.
pub fn cross_ratio_series(sols: [&Trajectory; 4], margin: f64) -> Result<Vec<f64>, SuperpositionError> {
    let n = sols[0].len();
    if sols.iter().any(|t| t.len() != n || t.grid != sols[0].grid) {
        return Err(SuperpositionError::GridMismatch);
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let [u, u1, u2, u3] = sols.map(|t| t.states[k][0]);
        let gaps = [u - u2, u3 - u1, u3 - u2, u1 - u2, u - u3];
        if gaps.iter().any(|g| g.abs() < margin) {
            return Err(SuperpositionError::DenominatorVanishes { x: sols[0].grid[k] });
        }
        out.push((u - u1) * (u3 - u2) / ((u - u2) * (u3 - u1)));
    }
    Ok(out)
}

/// Mean, standard deviation and `stddev / |mean|` of a series.
pub fn constancy(series: &[f64]) -> (f64, f64, f64) {
    let n = series.len() as f64;
    let mean = series.iter().sum::<f64>() / n;
    let var = series.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    let rel = if mean == 0.0 { if sd == 0.0 { 0.0 } else { f64::INFINITY } } else { sd / mean.abs() };
    (mean, sd, rel)
}

/// Three-point rule `u = (u1 (u3 - u2) + k u2 (u1 - u3)) / (u3 - u2 + k (u1 - u3))`.
///
/// Columns shared by all three inputs are treated as jets (`u, u1, u2, ...`)
/// and carried through by Taylor arithmetic, so the output has the same
/// derivative columns.
pub fn lie_scheffers(sols: [&Trajectory; 3], kappa: f64) -> Result<Trajectory, SuperpositionError> {
    let n = sols[0].len();
    if sols.iter().any(|t| t.len() != n || t.grid != sols[0].grid) {
        return Err(SuperpositionError::GridMismatch);
    }
    let cols = sols.iter().map(|t| t.dim()).min().unwrap_or(0);
    let mut states = Vec::with_capacity(n);
    for k in 0..n {
        let [a, b, c] = sols.map(|t| Taylor::from_derivatives(&t.states[k][..cols]));
        let den = &(&c - &b) + &(&a - &c).scale(kappa);
        if den.value().abs() < 1e-14 * (1.0 + kappa.abs()) {
            return Err(SuperpositionError::DenominatorVanishes { x: sols[0].grid[k] });
        }
        let num = &(&a * &(&c - &b)) + &(&b * &(&a - &c)).scale(kappa);
        states.push((&num / &den).derivatives());
    }
    Ok(Trajectory::from_samples(sols[0].names[..cols].to_vec(), sols[0].grid.clone(), states))
}

/// First-order Riccati equation `u' = u^2 + v` as a system in `u`.
pub fn riccati_system() -> OdeSystem {
    OdeSystem::from_monic(&parse("u1 - u^2 - v").unwrap(), "u").expect("monic")
}

/// Integrates `u' = u^2 + v` from each initial value on a shared uniform grid
/// over `[x0, x1]`, stopping all solutions `backoff` before the first pole.
/// Every returned trajectory carries `u, u1`.
pub fn riccati_solutions(
    v: &FunctionSpec,
    ics: &[f64],
    domain: (f64, f64),
    n: usize,
    backoff: f64,
    opts: &IntegratorOptions,
) -> Result<(Vec<Trajectory>, Option<f64>), SuperpositionError> {
    let sys = riccati_system();
    let env = Env::new().with_coeff("v", v.clone());
    let grid = uniform_grid(domain.0, domain.1, n);
    let opts = IntegratorOptions { blowup: opts.blowup.or(Some(1e6)), ..opts.clone() };
    let mut pole: Option<f64> = None;
    let mut raw = Vec::new();
    for &u0 in ics {
        match sys.integrate(&env, &[u0], &grid, &opts) {
            Ok(t) => raw.push(t),
            Err(NumericsError::Integration(e)) if e.is_pole() => {
                let x = e.last_x().unwrap();
                pole = Some(pole.map_or(x, |p| p.min(x)));
                raw.push(e.partial().unwrap().clone());
            }
            Err(e) => return Err(e.into()),
        }
    }
    let x_max = pole.map_or(domain.1, |p| p - backoff);
    let mut out = Vec::new();
    for t in raw {
        out.push(sys.extend_jets(&t.truncated(x_max), &env, 1)?);
    }
    Ok((out, pole))
}

/// A closed-form superposition rule and its parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum SuperpositionRule {
    /// `Psi = sqrt(A psi1^2 + 2B psi1 psi2 + C psi2^2)` for
    /// `Psi'' + v Psi = sigma / Psi^3`.
    Pinney { a: f64, b: f64, c: f64 },
    /// `f = 1 / (A psi1^2 + 2B psi1 psi2 + C psi2^2)`; `sigma`, when given, is
    /// checked against `(AC - B^2) W^2`.
    KummerSchwarz { a: f64, b: f64, c: f64, sigma: Option<f64> },
    /// `Psi = (psi1^m + c / ((m - 1) W^2) psi2^m)^(1/m)`.
    Reid1971 { m: f64, c: f64 },
    /// `Psi = (A psi1^m + B psi2^m)^(1/m)` for `y'' + r y' + q y = ...`.
    Reid1973 { a: f64, b: f64, m: f64 },
    /// `Psi = (psi1 psi2)^(k/2)` with `k l = 1`.
    Thomas { k: f64, l: f64 },
}

impl SuperpositionRule {
    pub fn name(&self) -> &'static str {
        match self {
            SuperpositionRule::Pinney { .. } => "PINNEY",
            SuperpositionRule::KummerSchwarz { .. } => "KUMMER_SCHWARZ",
            SuperpositionRule::Reid1971 { .. } => "REID_1971",
            SuperpositionRule::Reid1973 { .. } => "REID_1973",
            SuperpositionRule::Thomas { .. } => "THOMAS",
        }
    }

    /// Thomas rule with `l = 1/k`.
    pub fn thomas(k: f64) -> Self {
        SuperpositionRule::Thomas { k, l: 1.0 / k }
    }

    /// Parameter constraints that do not depend on the fundamental pair.
    pub fn validate(&self) -> Result<(), SuperpositionError> {
        let bad = |s: String| Err(SuperpositionError::ConstraintViolated(s));
        match *self {
            SuperpositionRule::Reid1971 { m, .. } if m == 0.0 || m == 1.0 => bad(format!("m = {m} is excluded")),
            SuperpositionRule::Reid1973 { m: 0.0, .. } => bad("m = 0 is excluded".into()),
            SuperpositionRule::Thomas { k, l } if k == 0.0 || (k * l - 1.0).abs() > 1e-12 => {
                bad(format!("k l = {} but must be 1", k * l))
            }
            SuperpositionRule::Pinney { a, b, c } | SuperpositionRule::KummerSchwarz { a, b, c, .. }
                if !(a.is_finite() && b.is_finite() && c.is_finite()) =>
            {
                bad("non-finite quadratic form".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SuperpositionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Output of [`build_solution`].
#[derive(Clone, Debug)]
pub struct Construction {
    /// `y, y1, y2` of the constructed solution on the admissible window.
    pub solution: Trajectory,
    pub report: ResidualReport,
    /// Right-hand-side constant where the rule has one.
    pub sigma: Option<f64>,
    pub wronskian: f64,
    pub notes: Vec<String>,
}

fn power(t: &Taylor, p: f64) -> Taylor {
    if p.fract() == 0.0 && p >= 0.0 {
        t.powi(p as u32)
    } else if p.fract() == 0.0 {
        t.powi((-p) as u32).recip()
    } else {
        t.powf(p)
    }
}

/// `psi^m` needs positive bases for non-integer `m`; `(psi1 psi2)^(m-2)`
/// needs a nonzero product when the exponent is negative.
fn powers_defined(m: f64, p1: &Taylor, p2: &Taylor, margin: f64) -> bool {
    let prod = p1.value() * p2.value();
    if m.fract() != 0.0 {
        p1.value() > margin && p2.value() > margin
    } else {
        m >= 2.0 || prod.abs() > margin
    }
}

/// Builds the rule's solution from the pair and evaluates the residual of its
/// target equation at every sample of the longest window where the
/// construction stays `margin` away from singular values.
///
/// The pair's coefficient `q` plays the role of `v` (Hill case `r = 0`).
pub fn build_solution(
    rule: &SuperpositionRule,
    pair: &LinearPair,
    margin: f64,
    tolerance: f64,
) -> Result<Construction, SuperpositionError> {
    rule.validate()?;
    let w0 = pair.wronskian(0);
    if w0.abs() < 1e-12 {
        return Err(SuperpositionError::ZeroWronskian);
    }
    let q = pair.env.coeffs.get("q").cloned().unwrap_or(FunctionSpec::Constant(0.0));
    let r = pair.env.coeffs.get("r").cloned().unwrap_or(FunctionSpec::Constant(0.0));
    let grid = pair.grid();
    let mut notes = Vec::new();

    let quad_sigma = |a: f64, b: f64, c: f64| (a * c - b * b) * w0 * w0;
    let sigma = match *rule {
        SuperpositionRule::Pinney { a, b, c } => Some(quad_sigma(a, b, c)),
        SuperpositionRule::KummerSchwarz { a, b, c, sigma } => {
            let s = quad_sigma(a, b, c);
            if let Some(given) = sigma {
                if (given - s).abs() > 1e-9 * (1.0 + s.abs()) {
                    return Err(SuperpositionError::ConstraintViolated(format!(
                        "B^2 = AC - sigma W^-2 fails: sigma = {given}, (AC - B^2) W^2 = {s}"
                    )));
                }
            }
            Some(s)
        }
        _ => None,
    };

    // Per sample: solution jet (y, y', y''), residual, and its alternative
    // sign variant for Kummer-Schwarz.
    let mut samples: Vec<Option<([f64; 3], f64, f64)>> = Vec::with_capacity(pair.len());
    for (k, &x) in grid.iter().enumerate() {
        let p1 = pair.taylor(0, k, 2);
        let p2 = pair.taylor(1, k, 2);
        let qv = q.value(x);
        let rv = r.value(x);
        let wk = pair.wronskian(k);
        let ok_pos = |t: &Taylor| t.value() > margin;
        let sample = match *rule {
            SuperpositionRule::Pinney { a, b, c } => {
                let form = &(&p1.powi(2).scale(a) + &(&p1 * &p2).scale(2.0 * b)) + &p2.powi(2).scale(c);
                ok_pos(&form).then(|| {
                    let y = form.sqrt();
                    let s = sigma.unwrap();
                    let res = y.derivative(2) + qv * y.value() - s / y.value().powi(3);
                    (y, res, 0.0)
                })
            }
            SuperpositionRule::KummerSchwarz { a, b, c, .. } => {
                let form = &(&p1.powi(2).scale(a) + &(&p1 * &p2).scale(2.0 * b)) + &p2.powi(2).scale(c);
                (form.value().abs() > margin).then(|| {
                    let f = form.recip();
                    let (f0, f1, f2) = (f.value(), f.derivative(1), f.derivative(2));
                    let s = sigma.unwrap();
                    let core = 0.5 * f2 / f0 - 0.75 * (f1 / f0).powi(2) + s * f0 * f0;
                    (f, core - qv, core + qv)
                })
            }
            SuperpositionRule::Reid1971 { m, c } => {
                let lam = c / ((m - 1.0) * w0 * w0);
                let base = &power(&p1, m) + &power(&p2, m).scale(lam);
                let ok = ok_pos(&base) && powers_defined(m, &p1, &p2, margin);
                ok.then(|| {
                    let y = base.powf(1.0 / m);
                    let prod = (p1.value() * p2.value()).powf(m - 2.0);
                    let res = y.derivative(2) + qv * y.value() - c * prod / y.value().powf(2.0 * m - 1.0);
                    (y, res, 0.0)
                })
            }
            SuperpositionRule::Reid1973 { a, b, m } => {
                let base = &power(&p1, m).scale(a) + &power(&p2, m).scale(b);
                let ok = ok_pos(&base) && powers_defined(m, &p1, &p2, margin);
                ok.then(|| {
                    let y = base.powf(1.0 / m);
                    let prod = (p1.value() * p2.value()).powf(m - 2.0);
                    let rhs = a * b * (m - 1.0) * prod * wk * wk / y.value().powf(2.0 * m - 1.0);
                    let res = y.derivative(2) + rv * y.derivative(1) + qv * y.value() - rhs;
                    (y, res, 0.0)
                })
            }
            SuperpositionRule::Thomas { k: kk, l } => {
                let prod = &p1 * &p2;
                ok_pos(&prod).then(|| {
                    let y = prod.powf(kk / 2.0);
                    let (y0, y1, y2) = (y.value(), y.derivative(1), y.derivative(2));
                    let res = y2 + rv * y1 + kk * qv * y0 - (1.0 - l) * y1 * y1 / y0
                        + 0.25 * kk * wk * wk * y0.powf(1.0 - 4.0 * l);
                    (y, res, 0.0)
                })
            }
        };
        samples.push(sample.map(|(y, res, alt)| ([y.value(), y.derivative(1), y.derivative(2)], res, alt)));
    }

    let mask: Vec<bool> = samples.iter().map(|s| s.is_some()).collect();
    let run = longest_run(&mask).filter(|r| r.len() >= 2).ok_or_else(|| {
        SuperpositionError::NonPositiveForm(format!("{} construction degenerates everywhere on the grid", rule.name()))
    })?;
    if run.len() < grid.len() {
        notes.push(format!("domain trimmed to [{}, {}] ({} of {} samples)", grid[run.start], grid[run.end - 1], run.len(), grid.len()));
    }
    let window: Vec<_> = samples[run.clone()].iter().map(|s| s.unwrap()).collect();
    let residuals: Vec<f64> = window.iter().map(|s| s.1).collect();
    let report = ResidualReport::from_values(&residuals, tolerance);
    if matches!(rule, SuperpositionRule::KummerSchwarz { .. }) {
        let alt = window.iter().map(|s| s.2.abs()).fold(0.0, f64::max);
        notes.push(format!("residual with +v in place of -v: max_abs = {alt:.3e}"));
    }
    let solution = Trajectory::from_samples(
        vec!["y".into(), "y1".into(), "y2".into()],
        grid[run].to_vec(),
        window.iter().map(|s| s.0.to_vec()).collect(),
    );
    Ok(Construction { solution, report, sigma, wronskian: w0, notes })
}

/// Residual of the Gambier-type equation `F F'' - F'^2/2 + 2 v F^2 - sigma/2`
/// for `F = -Psi^2 / 2` built from a Pinney construction.
pub fn gambier_residual(c: &Construction, v: &FunctionSpec, tolerance: f64) -> ResidualReport {
    let s = c.sigma.unwrap_or(0.0);
    let vals: Vec<f64> = c
        .solution
        .grid
        .iter()
        .zip(&c.solution.states)
        .map(|(x, st)| {
            let psi = Taylor::from_derivatives(st);
            let f = psi.powi(2).scale(-0.5);
            let (f0, f1, f2) = (f.value(), f.derivative(1), f.derivative(2));
            f0 * f2 - 0.5 * f1 * f1 + 2.0 * v.value(*x) * f0 * f0 - 0.5 * s
        })
        .collect();
    ResidualReport::from_values(&vals, tolerance)
}
