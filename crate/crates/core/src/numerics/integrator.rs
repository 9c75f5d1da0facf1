//! Dormand-Prince 5(4) with PI step control and fourth-order dense output.

use super::trajectory::{IntegratorMeta, Trajectory};

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h0: Option<f64>,
    pub max_steps: usize,
    /// Stop with [`IntegrationError::Blowup`] once any component exceeds this
    /// magnitude.
    pub blowup: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions { rtol: 1e-10, atol: 1e-12, h0: None, max_steps: 1_000_000, blowup: None }
    }
}

impl IntegratorOptions {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        IntegratorOptions { rtol, atol, ..Default::default() }
    }

    pub fn with_blowup(mut self, threshold: f64) -> Self {
        self.blowup = Some(threshold);
        self
    }
}

/// Abnormal termination. Variants that carry `partial` keep every grid sample
/// produced before the failure.
#[derive(Clone, Debug, thiserror::Error)]
pub enum IntegrationError {
    #[error("step size underflow at x = {x}")]
    StepSizeUnderflow { x: f64, partial: Box<Trajectory> },
    #[error("solution exceeded the blow-up threshold at x = {x}")]
    Blowup { x: f64, partial: Box<Trajectory> },
    #[error("too many steps, stopped at x = {x}")]
    TooManySteps { x: f64, partial: Box<Trajectory> },
    #[error("non-finite right-hand side at x = {x}")]
    NonFinite { x: f64 },
    #[error("invalid integration request: {0}")]
    InvalidInput(String),
}

impl IntegrationError {
    /// Last `x` the integrator reached.
    pub fn last_x(&self) -> Option<f64> {
        match self {
            IntegrationError::StepSizeUnderflow { x, .. }
            | IntegrationError::Blowup { x, .. }
            | IntegrationError::TooManySteps { x, .. }
            | IntegrationError::NonFinite { x } => Some(*x),
            IntegrationError::InvalidInput(_) => None,
        }
    }

    pub fn partial(&self) -> Option<&Trajectory> {
        match self {
            IntegrationError::StepSizeUnderflow { partial, .. }
            | IntegrationError::Blowup { partial, .. }
            | IntegrationError::TooManySteps { partial, .. } => Some(partial),
            _ => None,
        }
    }

    /// `true` for the outcomes that signal a singularity of the solution.
    pub fn is_pole(&self) -> bool {
        matches!(self, IntegrationError::StepSizeUnderflow { .. } | IntegrationError::Blowup { .. })
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn all_finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

struct Rhs<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(f64, &[f64], &mut [f64])> Rhs<F> {
    fn call(&mut self, x: f64, y: &[f64], dy: &mut [f64]) {
        self.evals += 1;
        (self.f)(x, y, dy)
    }
}

fn initial_step<F: FnMut(f64, &[f64], &mut [f64])>(
    rhs: &mut Rhs<F>,
    x: f64,
    y: &[f64],
    f0: &[f64],
    span: f64,
    opts: &IntegratorOptions,
) -> f64 {
    let n = y.len() as f64;
    let sk: Vec<f64> = y.iter().map(|v| opts.atol + opts.rtol * v.abs()).collect();
    let dnf = (f0.iter().zip(&sk).map(|(f, s)| (f / s).powi(2)).sum::<f64>() / n).sqrt();
    let dny = (y.iter().zip(&sk).map(|(v, s)| (v / s).powi(2)).sum::<f64>() / n).sqrt();
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
    h = h.min(span);
    let y1: Vec<f64> = y.iter().zip(f0).map(|(v, f)| v + h * f).collect();
    let mut f1 = vec![0.0; y.len()];
    rhs.call(x + h, &y1, &mut f1);
    if !all_finite(&f1) {
        return (h * 1e-3).max(1e-12 * span);
    }
    let der2 = (f1.iter().zip(f0).zip(&sk).map(|((a, b), s)| ((a - b) / s).powi(2)).sum::<f64>() / n).sqrt() / h;
    let der12 = der2.max(dnf);
    let h1 = if der12 <= 1e-15 { (h * 1e-3).max(1e-6) } else { (0.01 / der12).powf(0.2) };
    (100.0 * h).min(h1).min(span)
}

/// Integrates `y' = f(x, y)` from `grid[0]` to the last grid point and
/// returns the solution sampled on `grid` by dense output.
///
/// `grid` must be strictly increasing with at least one point; `y0` is the
/// state at `grid[0]`.
pub fn integrate<F>(
    f: F,
    y0: &[f64],
    grid: &[f64],
    names: Vec<String>,
    opts: &IntegratorOptions,
) -> Result<Trajectory, IntegrationError>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    if grid.is_empty() || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(IntegrationError::InvalidInput("grid must be non-empty and strictly increasing".into()));
    }
    if names.len() != y0.len() {
        return Err(IntegrationError::InvalidInput("state names and initial state differ in length".into()));
    }
    if !(opts.rtol > 0.0 && opts.atol > 0.0) {
        return Err(IntegrationError::InvalidInput("tolerances must be positive".into()));
    }
    let n = y0.len();
    let x0 = grid[0];
    let x_end = *grid.last().unwrap();
    let meta = IntegratorMeta { rtol: opts.rtol, atol: opts.atol, ..Default::default() };
    let mut traj = Trajectory::new(names, meta);
    let mut rhs = Rhs { f, evals: 0 };

    let mut x = x0;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    rhs.call(x, &y, &mut k1);
    if !all_finite(&y) || !all_finite(&k1) {
        return Err(IntegrationError::NonFinite { x });
    }
    traj.push(x0, y.clone());
    let mut next_out = 1;
    if grid.len() == 1 {
        traj.meta.evaluations = rhs.evals;
        return Ok(traj);
    }

    let span = x_end - x0;
    let mut h = match opts.h0 {
        Some(h) => h.min(span),
        None => initial_step(&mut rhs, x, &y, &k1, span, opts),
    };
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ys = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut rcont = vec![vec![0.0; n]; 5];
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    let mut steps = 0usize;

    let fail = |kind: fn(f64, Box<Trajectory>) -> IntegrationError, x: f64, traj: &mut Trajectory, evals: usize| {
        traj.meta.evaluations = evals;
        kind(x, Box::new(traj.clone()))
    };

    while next_out < grid.len() {
        if steps >= opts.max_steps {
            return Err(fail(|x, p| IntegrationError::TooManySteps { x, partial: p }, x, &mut traj, rhs.evals));
        }
        if h.abs() <= 16.0 * f64::EPSILON * x.abs().max(1e-300) || h < 1e-300 {
            return Err(fail(|x, p| IntegrationError::StepSizeUnderflow { x, partial: p }, x, &mut traj, rhs.evals));
        }
        let last = x + 1.01 * h >= x_end;
        if last {
            h = x_end - x;
        }
        steps += 1;

        for i in 0..n {
            ys[i] = y[i] + h * A21 * k1[i];
        }
        rhs.call(x + C2 * h, &ys, &mut k2);
        for i in 0..n {
            ys[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs.call(x + C3 * h, &ys, &mut k3);
        for i in 0..n {
            ys[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs.call(x + C4 * h, &ys, &mut k4);
        for i in 0..n {
            ys[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs.call(x + C5 * h, &ys, &mut k5);
        for i in 0..n {
            ys[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let xph = x + h;
        rhs.call(xph, &ys, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        rhs.call(xph, &y_new, &mut k7);

        let mut err = 0.0;
        for i in 0..n {
            let sk = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            err += (e / sk).powi(2);
        }
        err = (err / n as f64).sqrt();

        if !err.is_finite() || !all_finite(&y_new) || !all_finite(&k7) {
            traj.meta.rejected += 1;
            h *= 0.1;
            last_rejected = true;
            continue;
        }

        let fac11 = err.powf(0.17);
        let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
        let mut h_new = h / fac;

        if err <= 1.0 {
            facold = err.max(1e-4);
            traj.meta.accepted += 1;
            for i in 0..n {
                let ydiff = y_new[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k7[i] - bspl;
                rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let x_old = x;
            x = if last { x_end } else { xph };
            while next_out < grid.len() && grid[next_out] <= x {
                let xo = grid[next_out];
                let state = if xo == x {
                    y_new.clone()
                } else {
                    let theta = (xo - x_old) / h;
                    let theta1 = 1.0 - theta;
                    (0..n)
                        .map(|i| {
                            rcont[0][i]
                                + theta
                                    * (rcont[1][i]
                                        + theta1 * (rcont[2][i] + theta * (rcont[3][i] + theta1 * rcont[4][i])))
                        })
                        .collect()
                };
                traj.push(xo, state);
                next_out += 1;
            }
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            if let Some(limit) = opts.blowup {
                if y.iter().any(|v| v.abs() > limit) {
                    return Err(fail(|x, p| IntegrationError::Blowup { x, partial: p }, x, &mut traj, rhs.evals));
                }
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / (fac11 / 0.9).min(5.0);
            traj.meta.rejected += 1;
            last_rejected = true;
        }
        h = h_new;
    }
    traj.meta.evaluations = rhs.evals;
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;
    use std::f64::consts::PI;

    fn oscillator(_: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_oscillator_quarter_period() {
        let grid = uniform_grid(0.0, PI / 2.0, 9);
        let t = integrate(oscillator, &[0.0, 1.0], &grid, vec!["y".into(), "y1".into()], &Default::default()).unwrap();
        assert_eq!(t.len(), 9);
        assert!((t.states[8][0] - 1.0).abs() < 1e-9);
        for (x, s) in t.grid.iter().zip(&t.states) {
            assert!((s[0] - x.sin()).abs() < 1e-9, "dense output at {x}");
        }
    }

    #[test]
    fn blowup_reports_underflow_near_one() {
        let grid = uniform_grid(0.0, 2.0, 201);
        let r = integrate(|_, y, dy| dy[0] = y[0] * y[0], &[1.0], &grid, vec!["u".into()], &Default::default());
        match r {
            Err(IntegrationError::StepSizeUnderflow { x, partial }) => {
                assert!((x - 1.0).abs() < 1e-3, "x = {x}");
                assert!(partial.x1() < 1.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn blowup_threshold() {
        let grid = uniform_grid(0.0, 2.0, 201);
        let opts = IntegratorOptions::default().with_blowup(1e6);
        let r = integrate(|_, y, dy| dy[0] = y[0] * y[0], &[1.0], &grid, vec!["u".into()], &opts);
        match r {
            Err(e @ IntegrationError::Blowup { .. }) => {
                assert!(e.is_pole());
                assert!((e.last_x().unwrap() - 1.0).abs() < 1e-5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tolerance_ladder_is_monotone() {
        let grid = [0.0, 10.0];
        let mut prev = f64::INFINITY;
        for k in 6..=12 {
            let tol = 10f64.powi(-k);
            let opts = IntegratorOptions::with_tol(tol, tol * 1e-2);
            let t = integrate(oscillator, &[0.0, 1.0], &grid, vec!["y".into(), "y1".into()], &opts).unwrap();
            let e = (t.states[1][0] - 10f64.sin()).abs();
            assert!(e < prev, "tol 1e-{k}: {e} >= {prev}");
            prev = e;
        }
    }

    #[test]
    fn invalid_requests() {
        let o = IntegratorOptions::default();
        assert!(integrate(oscillator, &[0.0, 1.0], &[1.0, 0.0], vec!["a".into(), "b".into()], &o).is_err());
        assert!(integrate(oscillator, &[0.0, 1.0], &[0.0, 1.0], vec!["a".into()], &o).is_err());
        let r = integrate(|_, _, dy| dy[0] = f64::NAN, &[0.0], &[0.0, 1.0], vec!["a".into()], &o);
        assert!(matches!(r, Err(IntegrationError::NonFinite { .. })));
    }
}
