//! Painlevé II: Airy-seeded special solutions, the Hamiltonian system and
//! the second-degree equation for its Hamiltonian function.
//!
//! Movable poles are handled by windowing. A blow-up or step-size collapse
//! ends the integration and every check runs on `[x0, pole - POLE_BACKOFF]`.

use crate::diffpoly::{parse, parse_with, DiffPoly, DiffSymbol, SymbolTable};
use crate::numerics::{
    uniform_grid, Env, IntegratorOptions, NumericsError, OdeSystem, ResidualReport, Taylor, Trajectory,
};
use crate::superposition::DEFAULT_MARGIN;

/// Distance kept from a detected pole.
pub const POLE_BACKOFF: f64 = 0.2;
/// Distance kept from a root of an Airy seed.
pub const ROOT_BACKOFF: f64 = 0.05;
/// Default `|u|` at which an integration is declared to have hit a pole.
pub const DEFAULT_POLE_THRESHOLD: f64 = 1e6;

#[derive(Clone, Debug, thiserror::Error)]
pub enum PainleveError {
    #[error("denominator vanishes near x = {x}")]
    ZeroDenominator { x: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("window before the pole at x = {pole} is too short")]
    EmptyWindow { pole: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Initial data for PII, either `(u, u')` or Hamiltonian `(u, w)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PiiIcs {
    Direct { u: f64, du: f64 },
    Hamiltonian { u: f64, w: f64 },
}

impl PiiIcs {
    /// `(u, w)` at `x0`, using `w = u' + u^2 + x/2`.
    pub fn hamiltonian(self, x0: f64) -> (f64, f64) {
        match self {
            PiiIcs::Direct { u, du } => (u, du + u * u + x0 / 2.0),
            PiiIcs::Hamiltonian { u, w } => (u, w),
        }
    }

    /// `(u, u')` at `x0`.
    pub fn direct(self, x0: f64) -> (f64, f64) {
        match self {
            PiiIcs::Direct { u, du } => (u, du),
            PiiIcs::Hamiltonian { u, w } => (u, w - u * u - x0 / 2.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiiProblem {
    pub alpha: f64,
    pub ics: PiiIcs,
    pub domain: (f64, f64),
    pub samples: usize,
    pub pole_threshold: f64,
}

impl PiiProblem {
    pub fn new(alpha: f64, ics: PiiIcs, domain: (f64, f64), samples: usize) -> Self {
        PiiProblem { alpha, ics, domain, samples, pole_threshold: DEFAULT_POLE_THRESHOLD }
    }

    fn validate(&self) -> Result<(), PainleveError> {
        let ok = self.domain.0.is_finite()
            && self.domain.1.is_finite()
            && self.domain.0 < self.domain.1
            && self.samples >= 2
            && self.pole_threshold > 0.0
            && self.alpha.is_finite();
        if ok {
            Ok(())
        } else {
            Err(PainleveError::InvalidInput(format!("{self:?}")))
        }
    }

    fn env(&self) -> Env {
        Env::new().with_const("alpha", self.alpha)
    }
}

/// Integrates on `grid`; a pole ends the run and the result is cut back by
/// `POLE_BACKOFF`. Returns the window and the pole location, if any.
fn integrate_windowed(
    sys: &OdeSystem,
    env: &Env,
    y0: &[f64],
    grid: &[f64],
    opts: &IntegratorOptions,
    threshold: f64,
) -> Result<(Trajectory, Option<f64>), PainleveError> {
    let opts = IntegratorOptions { blowup: Some(threshold), ..opts.clone() };
    match sys.integrate(env, y0, grid, &opts) {
        Ok(t) => Ok((t, None)),
        Err(NumericsError::Integration(e)) if e.is_pole() => {
            let pole = e.last_x().unwrap_or(grid[0]);
            let t = e.partial().expect("pole errors carry the partial trajectory").truncated(pole - POLE_BACKOFF);
            if t.len() < 2 {
                return Err(PainleveError::EmptyWindow { pole });
            }
            Ok((t, Some(pole)))
        }
        Err(e) => Err(e.into()),
    }
}

/// `u'' = 2u^3 + x u + alpha`.
pub fn pii_system() -> OdeSystem {
    OdeSystem::from_monic(&parse("u2 - 2*u^3 - x*u - alpha").unwrap(), "u").expect("monic")
}

/// Parses with `w` as the momentum rather than a coefficient function.
fn parse_hamiltonian(src: &str) -> DiffPoly {
    parse_with(src, &SymbolTable::default().with_dependent("w").with_constant("delta")).expect("static expression")
}

/// `H(x, u, w) = w^2/2 - (u^2 + x/2) w - (alpha + 1/2) u`.
pub fn hamiltonian() -> DiffPoly {
    parse_hamiltonian("1/2*w^2 - u^2*w - 1/2*x*w - alpha*u - 1/2*u")
}

/// `u' = w - u^2 - x/2`, `w' = 2u w + alpha + 1/2` in dependent bases `u, w`.
pub fn hamiltonian_system() -> OdeSystem {
    let u1 = parse_hamiltonian("w - u^2 - 1/2*x");
    let w1 = parse_hamiltonian("2*u*w + alpha + 1/2");
    OdeSystem::new(vec![("u", 1, u1), ("w", 1, w1)]).expect("valid system")
}

/// Equations of `hamiltonian_system` with extra ones appended.
fn hamiltonian_with(extra: Vec<(&str, u32, DiffPoly)>) -> Result<OdeSystem, NumericsError> {
    let ham = hamiltonian_system();
    let mut eqs: Vec<(&str, u32, DiffPoly)> =
        ["u", "w"].into_iter().map(|b| (b, 1, ham.lifted(&DiffSymbol::dependent(b, 1)))).collect();
    eqs.extend(extra);
    OdeSystem::new(eqs)
}

/// Seed equation `psi'' + x psi = 0` or its mirror `psi'' - x psi = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AirySign {
    Plus,
    Minus,
}

impl AirySign {
    fn s(self) -> f64 {
        match self {
            AirySign::Plus => 1.0,
            AirySign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AiryRiccati {
    /// `u, u1` for `u = psi'/psi`.
    pub solution: Trajectory,
    /// `u' + u^2 + s x`.
    pub report: ResidualReport,
    /// First root of `psi` inside the requested domain.
    pub root: Option<f64>,
}

fn airy_system(sign: AirySign) -> OdeSystem {
    let rhs = DiffPoly::x() * DiffPoly::dep("psi", 0);
    OdeSystem::new(vec![("psi", 2, rhs.scale(&crate::numerics::rat_of(-sign.s())))]).expect("valid system")
}

/// Integrates the Airy seed from `(psi0, psi0')` at the left end of
/// `domain`, trims the domain to `root - ROOT_BACKOFF` if `psi` vanishes, and
/// checks that `u = psi'/psi` solves `u' + u^2 + s x = 0`.
pub fn airy_riccati(
    ics: [f64; 2],
    domain: (f64, f64),
    samples: usize,
    sign: AirySign,
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<AiryRiccati, PainleveError> {
    if domain.0.partial_cmp(&domain.1) != Some(std::cmp::Ordering::Less) || samples < 2 {
        return Err(PainleveError::InvalidInput(format!("domain {domain:?}, {samples} samples")));
    }
    if ics[0].abs() < DEFAULT_MARGIN {
        return Err(PainleveError::ZeroDenominator { x: domain.0 });
    }
    let sys = airy_system(sign);
    let env = Env::new();
    let scout = sys.integrate(&env, &ics, &uniform_grid(domain.0, domain.1, 4 * samples), opts)?;
    let root = scout.states.windows(2).zip(scout.grid.windows(2)).find_map(|(s, x)| {
        (s[0][0].signum() != s[1][0].signum() || s[1][0] == 0.0).then(|| {
            // one Newton step from the nearer end
            let (xa, sa) = if s[0][0].abs() < s[1][0].abs() { (x[0], &s[0]) } else { (x[1], &s[1]) };
            xa - sa[0] / sa[1]
        })
    });
    let end = root.map_or(domain.1, |r| r - ROOT_BACKOFF);
    if end <= domain.0 {
        return Err(PainleveError::ZeroDenominator { x: root.unwrap_or(domain.0) });
    }
    let t = sys.integrate(&env, &ics, &uniform_grid(domain.0, end, samples), opts)?;
    let mut states = Vec::with_capacity(t.len());
    let mut residual = Vec::with_capacity(t.len());
    let s = sign.s();
    for (x, st) in t.grid.iter().zip(&t.states) {
        if st[0].abs() < DEFAULT_MARGIN {
            return Err(PainleveError::ZeroDenominator { x: *x });
        }
        let psi = Taylor::from_derivatives(&[st[0], st[1], -s * x * st[0]]);
        let dpsi = psi.differentiate();
        let u = &dpsi / &Taylor::from_derivatives(&st[..2]);
        let (u0, u1) = (u.value(), u.derivative(1));
        states.push(vec![u0, u1]);
        residual.push(u1 + u0 * u0 + s * x);
    }
    let solution = Trajectory::from_samples(vec!["u".into(), "u1".into()], t.grid.clone(), states);
    Ok(AiryRiccati { solution, report: ResidualReport::from_values(&residual, tol), root })
}

/// Scaling constants `(mu, lambda)` with `mu^3 = 2`, `lambda mu = 1`.
pub fn pii_scaling() -> (f64, f64) {
    let mu = 2f64.cbrt();
    (mu, 1.0 / mu)
}

#[derive(Clone, Debug)]
pub struct PiiFromAiry {
    /// `u, u1` as functions of `xbar = mu x`.
    pub solution: Trajectory,
    /// `u'' - (2/lambda^2) u^3 - 2x u + lambda` for `u = lambda u1`, in `x`.
    pub intermediate: ResidualReport,
    /// `max |u - u_direct|` against PII with `alpha = -1/2` in `xbar`.
    pub deviation: ResidualReport,
    pub mu: f64,
    pub lambda: f64,
    /// `|mu^3 - 2|` and `|lambda mu - 1|`.
    pub scaling_error: (f64, f64),
    pub root: Option<f64>,
}

/// Rescales the Airy-seeded Riccati solution to PII with `alpha = -1/2` and
/// compares with a direct integration from matched data.
pub fn pii_from_airy(
    ics: [f64; 2],
    domain: (f64, f64),
    samples: usize,
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<PiiFromAiry, PainleveError> {
    let airy = airy_riccati(ics, domain, samples, AirySign::Plus, opts, tol)?;
    let (mu, lambda) = pii_scaling();
    let scaling_error = ((mu.powi(3) - 2.0).abs(), (lambda * mu - 1.0).abs());

    let mut intermediate = Vec::new();
    let mut xbar = Vec::new();
    let mut states = Vec::new();
    for (x, s) in airy.solution.grid.iter().zip(&airy.solution.states) {
        let (u1, du1) = (s[0], s[1]);
        // u1'' from differentiating u1' = -u1^2 - x
        let ddu1 = -2.0 * u1 * du1 - 1.0;
        let (u, du, ddu) = (lambda * u1, lambda * du1, lambda * ddu1);
        intermediate.push(ddu - 2.0 / (lambda * lambda) * u.powi(3) - 2.0 * x * u + lambda);
        xbar.push(mu * x);
        states.push(vec![u, du / mu]);
    }
    let solution = Trajectory::from_samples(vec!["u".into(), "u1".into()], xbar.clone(), states);

    let env = Env::new().with_const("alpha", -0.5);
    let direct = pii_system().integrate(&env, &solution.states[0], &xbar, opts)?;
    let dev: Vec<f64> = direct.states.iter().zip(&solution.states).map(|(d, s)| d[0] - s[0]).collect();
    Ok(PiiFromAiry {
        solution,
        intermediate: ResidualReport::from_values(&intermediate, tol),
        deviation: ResidualReport::from_values(&dev, tol),
        mu,
        lambda,
        scaling_error,
        root: airy.root,
    })
}

#[derive(Clone, Debug)]
pub struct PiiHamiltonian {
    /// `u, w` on the pole-free window.
    pub trajectory: Trajectory,
    /// `u'' - 2u^3 - x u - alpha` with `u''` lifted through the system.
    pub pii: ResidualReport,
    /// `u` against a direct integration of PII from matched data.
    pub direct: ResidualReport,
    /// `H(x) - H(x0) - int_{x0}^x (-w/2)`, the quadrature integrated alongside.
    pub energy: ResidualReport,
    pub pole: Option<f64>,
}

/// Integrates the Hamiltonian system and checks PII for `u`.
pub fn pii_hamiltonian(
    prob: &PiiProblem,
    opts: &IntegratorOptions,
    tol: f64,
    energy_tol: f64,
) -> Result<PiiHamiltonian, PainleveError> {
    prob.validate()?;
    let env = prob.env();
    let x0 = prob.domain.0;
    let (u0, w0) = prob.ics.hamiltonian(x0);
    let grid = uniform_grid(prob.domain.0, prob.domain.1, prob.samples);

    let with_quad = hamiltonian_with(vec![("hq", 1, DiffPoly::rat(-1, 2) * DiffPoly::dep("w", 0))])?;
    let (t, pole) = integrate_windowed(&with_quad, &env, &[u0, w0, 0.0], &grid, opts, prob.pole_threshold)?;

    let pii = parse("u2 - 2*u^3 - x*u - alpha").unwrap();
    let ev = with_quad.compile(&[pii, hamiltonian()], &env)?;
    let vals = ev.eval_along(&t);
    let h0 = vals[0][1];
    let pii_res: Vec<f64> = vals.iter().map(|v| v[0]).collect();
    let energy: Vec<f64> = vals.iter().zip(&t.states).map(|(v, s)| v[1] - h0 - s[2]).collect();

    let (_, du0) = prob.ics.direct(x0);
    let direct = pii_system().integrate(&env, &[u0, du0], &t.grid, &IntegratorOptions { blowup: None, ..opts.clone() })?;
    let dev: Vec<f64> = direct.states.iter().zip(&t.states).map(|(d, s)| d[0] - s[0]).collect();

    let trajectory = Trajectory {
        grid: t.grid.clone(),
        states: t.states.iter().map(|s| s[..2].to_vec()).collect(),
        names: vec!["u".into(), "w".into()],
        meta: t.meta.clone(),
    };
    Ok(PiiHamiltonian {
        trajectory,
        pii: ResidualReport::from_values(&pii_res, tol),
        direct: ResidualReport::from_values(&dev, tol),
        energy: ResidualReport::from_values(&energy, energy_tol),
        pole,
    })
}

/// `h = H(x, u(x), w(x))` and its derivatives along a Hamiltonian
/// trajectory, with the source `u, w` kept for comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct HFunction {
    pub alpha: f64,
    pub grid: Vec<f64>,
    pub h: Vec<f64>,
    pub h1: Vec<f64>,
    pub h2: Vec<f64>,
    pub h3: Vec<f64>,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

impl HFunction {
    /// Copy with `delta` added to `h'` (negative controls).
    pub fn perturbed(&self, delta: f64) -> HFunction {
        HFunction { h1: self.h1.iter().map(|v| v + delta).collect(), ..self.clone() }
    }
}

/// Builds `h` along `traj` (columns `u, w`) and evaluates
/// `h''^2 + 4h'^3 + 2h'(x h' - h) - (alpha + 1/2)^2 / 4`.
///
/// `h'` is the chain rule `H_x + H_u u' + H_w w'` evaluated numerically; the
/// returned `consistency` report compares it with `-w/2`.
pub fn sd_pii_check(
    traj: &Trajectory,
    alpha: f64,
    tol: f64,
    consistency_tol: f64,
) -> Result<(HFunction, ResidualReport, ResidualReport), PainleveError> {
    if traj.names != ["u", "w"] {
        return Err(PainleveError::InvalidInput(format!("expected columns [u, w], got {:?}", traj.names)));
    }
    let a = alpha + 0.5;
    let n = traj.len();
    let mut hf = HFunction {
        alpha,
        grid: traj.grid.clone(),
        h: Vec::with_capacity(n),
        h1: Vec::with_capacity(n),
        h2: Vec::with_capacity(n),
        h3: Vec::with_capacity(n),
        u: traj.component(0),
        w: traj.component(1),
    };
    let mut relation = Vec::with_capacity(n);
    let mut consistency = Vec::with_capacity(n);
    for (x, s) in traj.grid.iter().zip(&traj.states) {
        let (u, w) = (s[0], s[1]);
        let du = w - u * u - x / 2.0;
        let dw = 2.0 * u * w + a;
        let ddw = 2.0 * du * w + 2.0 * u * dw;
        let h = w * w / 2.0 - (u * u + x / 2.0) * w - a * u;
        let (hx, hu, hw) = (-w / 2.0, -2.0 * u * w - a, w - u * u - x / 2.0);
        let h1 = hx + hu * du + hw * dw;
        let h2 = -dw / 2.0;
        consistency.push(h1 + w / 2.0);
        relation.push(h2 * h2 + 4.0 * h1.powi(3) + 2.0 * h1 * (x * h1 - h) - a * a / 4.0);
        hf.h.push(h);
        hf.h1.push(h1);
        hf.h2.push(h2);
        hf.h3.push(-ddw / 2.0);
    }
    Ok((hf, ResidualReport::from_values(&relation, tol), ResidualReport::from_values(&consistency, consistency_tol)))
}

#[derive(Clone, Debug)]
pub struct Recovery {
    /// Recovered `u, w`.
    pub solution: Trajectory,
    /// `max(|u - u_src|, |w - w_src|)` pointwise.
    pub deviation: ResidualReport,
    /// Both Hamiltonian equations for the recovered pair, pointwise maximum.
    pub system: ResidualReport,
    /// `max |u_alt - u|` for `u_alt = (2h'' + alpha + x/2) / (4h')`.
    pub alternative_mismatch: f64,
    pub notes: Vec<String>,
}

/// `u = (2h'' + alpha + 1/2) / (4h')`, `w = -2h'`.
pub fn sd_pii_recover(hf: &HFunction, tol: f64) -> Result<Recovery, PainleveError> {
    let a = hf.alpha + 0.5;
    let n = hf.grid.len();
    let mut states = Vec::with_capacity(n);
    let mut dev = Vec::with_capacity(n);
    let mut sys = Vec::with_capacity(n);
    let mut alt: f64 = 0.0;
    for i in 0..n {
        let x = hf.grid[i];
        let (h1, h2, h3) = (hf.h1[i], hf.h2[i], hf.h3[i]);
        if h1.abs() < DEFAULT_MARGIN {
            return Err(PainleveError::ZeroDenominator { x });
        }
        let u = (2.0 * h2 + a) / (4.0 * h1);
        let w = -2.0 * h1;
        let du = (2.0 * h3 * 4.0 * h1 - (2.0 * h2 + a) * 4.0 * h2) / (16.0 * h1 * h1);
        let dw = -2.0 * h2;
        sys.push((du - (w - u * u - x / 2.0)).abs().max((dw - (2.0 * u * w + a)).abs()));
        dev.push((u - hf.u[i]).abs().max((w - hf.w[i]).abs()));
        alt = alt.max(((2.0 * h2 + hf.alpha + x / 2.0) / (4.0 * h1) - u).abs());
        states.push(vec![u, w]);
    }
    let notes = vec![format!("x/2 recovery variant mismatch: {alt:.3e}")];
    Ok(Recovery {
        solution: Trajectory::from_samples(vec!["u".into(), "w".into()], hf.grid.clone(), states),
        deviation: ResidualReport::from_values(&dev, tol),
        system: ResidualReport::from_values(&sys, tol),
        alternative_mismatch: alt,
        notes,
    })
}

#[derive(Clone, Debug)]
pub struct HillFromH {
    /// `w - (u' + u^2 + x/2)` with `u = y'/y` and `w` the source momentum.
    pub report: ResidualReport,
    /// `|y'/y - u_src|`.
    pub deviation: ResidualReport,
    pub notes: Vec<String>,
}

/// Integrates `y'' + (2h' + x/2) y = 0` from `y = 1`, `y' = u(x0)` and
/// checks `-2h' = w = u' + u^2 + x/2` for `u = y'/y` against the source `w`.
///
/// Between grid points `h'` is `-w/2 + delta` with `w` re-integrated from
/// the source data and `delta = hf.h1 + hf.w/2` at `x0`, so an offset in the
/// input `h'` carries into the Hill equation.
pub fn hill_from_h(hf: &HFunction, opts: &IntegratorOptions, tol: f64) -> Result<HillFromH, PainleveError> {
    if hf.grid.len() < 2 {
        return Err(PainleveError::InvalidInput("HFunction needs at least two samples".into()));
    }
    let mut notes = Vec::new();
    let delta = hf.h1[0] + hf.w[0] / 2.0;
    let y1_0 = match sd_pii_recover(hf, f64::INFINITY) {
        Ok(r) => r.solution.states[0][0],
        Err(_) => {
            notes.push("h' vanishes; y'(x0) taken from the source u".into());
            hf.u[0]
        }
    };
    let joint = hamiltonian_with(vec![("y", 2, parse_hamiltonian("w*y - 2*delta*y - 1/2*x*y"))])?;
    let env = Env::new().with_const("alpha", hf.alpha).with_const("delta", delta);
    let t = joint.integrate(&env, &[hf.u[0], hf.w[0], 1.0, y1_0], &hf.grid, opts)?;
    let mut res = Vec::with_capacity(t.len());
    let mut dev = Vec::with_capacity(t.len());
    for (i, (x, s)) in t.grid.iter().zip(&t.states).enumerate() {
        let (w, y, y1) = (s[1], s[2], s[3]);
        if y.abs() < DEFAULT_MARGIN {
            return Err(PainleveError::ZeroDenominator { x: *x });
        }
        let y2 = (w - 2.0 * delta - x / 2.0) * y;
        let u = y1 / y;
        let du = y2 / y - u * u;
        res.push(hf.w[i] - (du + u * u + x / 2.0));
        dev.push(u - hf.u[i]);
    }
    Ok(HillFromH {
        report: ResidualReport::from_values(&res, tol),
        deviation: ResidualReport::from_values(&dev, tol),
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn airy_seed_and_root_trimming() {
        let r = airy_riccati([1.0, 0.0], (0.0, 5.0), 101, AirySign::Plus, &Default::default(), 1e-7).unwrap();
        let root = r.root.unwrap();
        // first zero of the even Airy-type solution
        assert!((root - 1.986).abs() < 0.01, "{root}");
        assert!(r.report.pass, "{:?}", r.report);
        assert_eq!(r.solution.states[0][0], 0.0);
        assert!((r.solution.x1() - (root - ROOT_BACKOFF)).abs() < 1e-12);
        assert!(matches!(
            airy_riccati([0.0, 1.0], (0.0, 1.0), 11, AirySign::Plus, &Default::default(), 1e-7),
            Err(PainleveError::ZeroDenominator { x }) if x == 0.0
        ));
    }

    #[test]
    fn airy_quotient_is_scale_free() {
        let a = airy_riccati([1.0, 0.0], (0.0, 1.5), 51, AirySign::Plus, &Default::default(), 1e-7).unwrap();
        let b = airy_riccati([3.0, 0.0], (0.0, 1.5), 51, AirySign::Plus, &Default::default(), 1e-7).unwrap();
        for (p, q) in a.solution.states.iter().zip(&b.solution.states) {
            assert!((p[0] - q[0]).abs() < 1e-9);
        }
    }

    #[test]
    fn mirrored_seed() {
        let r = airy_riccati([1.0, 0.5], (0.0, 2.0), 51, AirySign::Minus, &Default::default(), 1e-7).unwrap();
        assert!(r.root.is_none());
        assert!(r.report.pass);
    }

    #[test]
    fn rescaled_airy_solves_pii() {
        let r = pii_from_airy([1.0, 0.0], (0.0, 5.0), 101, &Default::default(), 1e-6).unwrap();
        assert!(r.intermediate.pass, "{:?}", r.intermediate);
        assert!(r.deviation.pass, "{:?}", r.deviation);
        assert!(r.scaling_error.0 < 1e-15 && r.scaling_error.1 < 1e-15);
    }

    #[test]
    fn w_zero_is_invariant_for_alpha_minus_half() {
        let prob = PiiProblem::new(-0.5, PiiIcs::Hamiltonian { u: 0.3, w: 0.0 }, (0.0, 1.0), 21);
        let r = pii_hamiltonian(&prob, &Default::default(), 1e-6, 1e-7).unwrap();
        assert!(r.trajectory.states.iter().all(|s| s[1] == 0.0));
        assert!(r.pii.pass && r.direct.pass && r.energy.pass);
    }

    fn alpha0() -> PiiHamiltonian {
        let prob = PiiProblem::new(0.0, PiiIcs::Hamiltonian { u: 0.0, w: 1.0 }, (0.0, 2.0), 101);
        pii_hamiltonian(&prob, &Default::default(), 1e-6, 1e-7).unwrap()
    }

    #[test]
    fn hamiltonian_pii_and_energy() {
        let r = alpha0();
        // movable pole near 1.736 inside [0, 2]
        let pole = r.pole.unwrap();
        assert!((pole - 1.736).abs() < 1e-2, "{pole}");
        assert!(r.trajectory.x1() <= pole - POLE_BACKOFF);
        assert!(r.pii.pass, "{:?}", r.pii);
        assert!(r.direct.pass, "{:?}", r.direct);
        assert!(r.energy.pass, "{:?}", r.energy);
    }

    #[test]
    fn pole_windowing() {
        // u' = -u^2 - x/2 from u = -1 reaches a pole before x = 1
        let prob = PiiProblem::new(-0.5, PiiIcs::Hamiltonian { u: -1.0, w: 0.0 }, (0.0, 3.0), 301);
        let r = pii_hamiltonian(&prob, &Default::default(), 1e-6, 1e-7).unwrap();
        let pole = r.pole.expect("pole");
        assert!(pole < 1.0);
        assert!(r.trajectory.x1() <= pole - POLE_BACKOFF);
        assert!(r.pii.pass);
    }

    #[test]
    fn second_degree_relation_and_recovery() {
        let r = alpha0();
        let (hf, rel, cons) = sd_pii_check(&r.trajectory, 0.0, 1e-6, 1e-9).unwrap();
        assert!(rel.pass, "{rel:?}");
        assert!(cons.pass, "{cons:?}");
        let rec = sd_pii_recover(&hf, 1e-6).unwrap();
        assert!(rec.deviation.pass && rec.system.pass, "{:?} {:?}", rec.deviation, rec.system);
        assert!(rec.alternative_mismatch > 1e-3);
        for (s, w) in rec.solution.states.iter().zip(&hf.w) {
            assert!((s[1] - w).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_h() {
        let prob = PiiProblem::new(-0.5, PiiIcs::Hamiltonian { u: 0.3, w: 0.0 }, (0.0, 1.0), 21);
        let r = pii_hamiltonian(&prob, &Default::default(), 1e-6, 1e-7).unwrap();
        let (hf, rel, _) = sd_pii_check(&r.trajectory, -0.5, 1e-6, 1e-9).unwrap();
        assert_eq!(rel.max_abs, 0.0);
        assert!(hf.h.iter().all(|h| (h - hf.h[0]).abs() < 1e-12));
        assert!(matches!(sd_pii_recover(&hf, 1e-6), Err(PainleveError::ZeroDenominator { .. })));
        let hill = hill_from_h(&hf, &Default::default(), 1e-6).unwrap();
        assert!(hill.report.pass && hill.deviation.pass);
        assert_eq!(hill.notes.len(), 1);
    }

    #[test]
    fn hill_equation_from_h() {
        let r = alpha0();
        let (hf, _, _) = sd_pii_check(&r.trajectory, 0.0, 1e-6, 1e-9).unwrap();
        let hill = hill_from_h(&hf, &Default::default(), 1e-6).unwrap();
        assert!(hill.report.pass, "{:?}", hill.report);
        assert!(hill.deviation.pass, "{:?}", hill.deviation);
        let bad = hill_from_h(&hf.perturbed(0.1), &Default::default(), 1e-6).unwrap();
        assert!(bad.report.max_abs > 1e-2, "{:?}", bad.report);
    }

    #[test]
    fn hamiltonian_symbols() {
        let sys = hamiltonian_system();
        assert_eq!(sys.state_names(), vec!["u", "w"]);
        let u2 = sys.lifted(&DiffSymbol::dependent("u", 2));
        let pii = parse("2*u^3 + x*u + alpha").unwrap();
        assert_eq!(sys.reduce(&u2), pii);
    }
}
