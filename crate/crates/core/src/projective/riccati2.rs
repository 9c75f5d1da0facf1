use std::fmt;
use std::str::FromStr;

use crate::diffpoly::{d_total, parse, substitute, DiffPoly};
use crate::numerics::{
    pvf_system, rat_of, Env, FunctionSpec, IntegratorOptions, NumericsError, OdeSystem, ResidualReport, Trajectory,
};
use crate::superposition::DEFAULT_MARGIN;

use super::{ProjectiveError, PvfProblem};

/// `u'' + 3k u u' + k^2 u^3 + 4k v u + 2k v'` with `k` a constant symbol.
pub fn second_order_riccati() -> DiffPoly {
    parse("u2 + 3*k*u*u1 + k^2*u^3 + 4*k*v*u + 2*k*v1").expect("static expression")
}

/// How the candidate solution of the second-order Riccati equation is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Riccati2Kind {
    /// `u = f' / (k f)` for `f` solving the projective vector field
    /// equation; initial data `(f, f', f'')`.
    FromF,
    /// `u = 2 zeta` for `zeta' + k zeta^2 + k v = 0`; initial data `(zeta)`.
    Doubling,
    /// `u = 2 Psi' / Psi` for `Psi'' + v Psi = sigma / Psi^3`; initial data
    /// `(Psi, Psi', sigma)`. Needs `k = 1`.
    MilnePinney,
    /// Direct integration of `u'' + 3u u' + u^3 + alpha u = 0` with
    /// `alpha = 4v`, `v` constant; initial data `(u, u')`. Needs `k = 1`.
    ModEmden,
}

impl Riccati2Kind {
    pub const ALL: [Riccati2Kind; 4] =
        [Riccati2Kind::FromF, Riccati2Kind::Doubling, Riccati2Kind::MilnePinney, Riccati2Kind::ModEmden];

    pub fn as_str(self) -> &'static str {
        match self {
            Riccati2Kind::FromF => "FROM_F",
            Riccati2Kind::Doubling => "DOUBLING",
            Riccati2Kind::MilnePinney => "MILNE_PINNEY",
            Riccati2Kind::ModEmden => "MOD_EMDEN",
        }
    }

    /// Number of initial values expected.
    pub fn arity(self) -> usize {
        match self {
            Riccati2Kind::FromF | Riccati2Kind::MilnePinney => 3,
            Riccati2Kind::Doubling => 1,
            Riccati2Kind::ModEmden => 2,
        }
    }
}

impl fmt::Display for Riccati2Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Riccati2Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let norm = s.to_ascii_uppercase().replace('-', "_");
        Riccati2Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == norm)
            .ok_or_else(|| format!("unknown construction {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct Riccati2Result {
    /// `u, u1, u2` of the constructed solution.
    pub solution: Trajectory,
    pub report: ResidualReport,
    pub notes: Vec<String>,
}

/// Integrates, mapping a blow-up of a reciprocal state to a vanishing
/// denominator.
fn integrate_guarded(
    sys: &OdeSystem,
    env: &Env,
    y0: &[f64],
    grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<Trajectory, ProjectiveError> {
    let opts = IntegratorOptions { blowup: opts.blowup.or(Some(1e8)), ..opts.clone() };
    match sys.integrate(env, y0, grid, &opts) {
        Err(NumericsError::Integration(e)) if e.is_pole() => {
            Err(ProjectiveError::ZeroDenominator { x: e.last_x().unwrap_or(grid[0]) })
        }
        other => Ok(other?),
    }
}

fn guard_away_from_zero(traj: &Trajectory, col: usize) -> Result<(), ProjectiveError> {
    match traj.states.iter().position(|s| s[col].abs() < DEFAULT_MARGIN) {
        Some(i) => Err(ProjectiveError::ZeroDenominator { x: traj.grid[i] }),
        None => Ok(()),
    }
}

/// `u, u', u''` and the second-order Riccati residual of the expression `u`
/// along `traj`.
fn evaluate(
    sys: &OdeSystem,
    env: &Env,
    traj: &Trajectory,
    u: &DiffPoly,
    tol: f64,
) -> Result<(Trajectory, ResidualReport), ProjectiveError> {
    let du = d_total(u);
    let ddu = d_total(&du);
    let op = substitute(&second_order_riccati(), "u", u);
    let values = sys.compile(&[u.clone(), du, ddu, op], env)?.eval_along(traj);
    let residual: Vec<f64> = values.iter().map(|v| v[3]).collect();
    let states = values.into_iter().map(|mut v| {
        v.truncate(3);
        v
    });
    let names = ["u", "u1", "u2"].iter().map(|s| s.to_string()).collect();
    let solution = Trajectory::from_samples(names, traj.grid.clone(), states.collect());
    Ok((solution, ResidualReport::from_values(&residual, tol)))
}

/// The projective vector field equation together with `z = 1/y`.
fn pvf_with_reciprocal(k: f64) -> OdeSystem {
    let pvf = pvf_system(k);
    let top = pvf.lifted(&crate::diffpoly::DiffSymbol::dependent("y", 3));
    let z = -(DiffPoly::dep("y", 1) * DiffPoly::dep("z", 0).pow(2));
    OdeSystem::new(vec![("y", 3, top), ("z", 1, z)]).expect("valid system")
}

/// Builds `u` per `kind` and evaluates the second-order Riccati residual.
pub fn riccati2_residual(
    kind: Riccati2Kind,
    prob: &PvfProblem,
    ics: &[f64],
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<Riccati2Result, ProjectiveError> {
    prob.validate()?;
    if ics.len() != kind.arity() {
        return Err(ProjectiveError::InvalidInput(format!(
            "{kind} takes {} initial values, got {}",
            kind.arity(),
            ics.len()
        )));
    }
    if matches!(kind, Riccati2Kind::MilnePinney | Riccati2Kind::ModEmden) && prob.k != 1.0 {
        return Err(ProjectiveError::InvalidInput(format!("{kind} needs k = 1")));
    }
    let grid = prob.grid();
    let mut env = prob.env();
    let k = prob.k;
    let mut notes = Vec::new();
    let (solution, report) = match kind {
        Riccati2Kind::FromF => {
            if ics[0].abs() < DEFAULT_MARGIN {
                return Err(ProjectiveError::ZeroDenominator { x: prob.x0() });
            }
            let sys = pvf_with_reciprocal(k);
            let t = integrate_guarded(&sys, &env, &[ics[0], ics[1], ics[2], 1.0 / ics[0]], &grid, opts)?;
            guard_away_from_zero(&t, 0)?;
            let u = (DiffPoly::dep("y", 1) * DiffPoly::dep("z", 0)).scale(&rat_of(1.0 / k));
            if k != 1.0 {
                let expect = grid.iter().map(|x| 2.0 * (k - 1.0) * prob.v.jet(*x, 1)[1]).fold(0.0, |m: f64, r| m.max(r.abs()));
                notes.push(format!("k != 1: residual is 2(k-1) v', max {expect:.3e}"));
            }
            evaluate(&sys, &env, &t, &u, tol)?
        }
        Riccati2Kind::Doubling => {
            let rhs = (DiffPoly::dep("zeta", 0).pow(2) + DiffPoly::coef("v", 0)).scale(&rat_of(-k));
            let sys = OdeSystem::new(vec![("zeta", 1, rhs)])?;
            let t = integrate_guarded(&sys, &env, &[ics[0]], &grid, opts)?;
            let out = evaluate(&sys, &env, &t, &(DiffPoly::int(2) * DiffPoly::dep("zeta", 0)), tol)?;
            if k != 1.0 {
                let expect = out
                    .0
                    .grid
                    .iter()
                    .zip(&out.0.states)
                    .map(|(x, s)| 4.0 * k * (1.0 - k) * prob.v.value(*x) * s[0])
                    .fold(0.0, |m: f64, r| m.max(r.abs()));
                notes.push(format!("k != 1: residual is 4k(1-k) v u, max {expect:.3e}"));
            }
            out
        }
        Riccati2Kind::MilnePinney => {
            if ics[0] < DEFAULT_MARGIN {
                return Err(ProjectiveError::ZeroDenominator { x: prob.x0() });
            }
            env = env.with_const("sigma", ics[2]);
            let psi2 = parse("-v*psi + sigma*z^3").unwrap();
            let z1 = -(DiffPoly::dep("psi", 1) * DiffPoly::dep("z", 0).pow(2));
            let sys = OdeSystem::new(vec![("psi", 2, psi2), ("z", 1, z1)])?;
            let t = integrate_guarded(&sys, &env, &[ics[0], ics[1], 1.0 / ics[0]], &grid, opts)?;
            guard_away_from_zero(&t, 0)?;
            let u = DiffPoly::int(2) * DiffPoly::dep("psi", 1) * DiffPoly::dep("z", 0);
            evaluate(&sys, &env, &t, &u, tol)?
        }
        Riccati2Kind::ModEmden => {
            if !prob.v.is_constant() {
                return Err(ProjectiveError::InvalidInput("MOD_EMDEN needs a constant potential".into()));
            }
            let alpha = 4.0 * prob.v.value(prob.x0());
            env = env.with_const("alpha", alpha);
            let sys = OdeSystem::from_monic(&parse("u2 + 3*u*u1 + u^3 + alpha*u").unwrap(), "u")?;
            let t = integrate_guarded(&sys, &env, ics, &grid, opts)?;
            let out = evaluate(&sys, &env, &t, &DiffPoly::dep("u", 0), tol)?;

            // Cross-check against u = f'/f with matching initial data.
            let (u0, u1) = (ics[0], ics[1]);
            let via_f = pvf_with_reciprocal(1.0);
            let tf = integrate_guarded(&via_f, &env, &[1.0, u0, u1 + u0 * u0, 1.0], &grid, opts)?;
            let dev = tf
                .states
                .iter()
                .zip(&t.states)
                .map(|(f, u)| (f[1] * f[3] - u[0]).abs())
                .fold(0.0, f64::max);
            notes.push(format!("max |u - f'/f| against the projective construction: {dev:.3e}"));
            out
        }
    };
    Ok(Riccati2Result { solution, report, notes })
}

/// The `(u1, u2)` system in bases `ua, ub`, plus `z = 1/K` where
/// `K = sign (u2 - w + 2v)`.
pub fn g5_system(sign: f64) -> (OdeSystem, DiffPoly) {
    let ua1 = parse("ub - 1/2*ua^2 - w").unwrap();
    let ub1 = parse("2*w*ua - 4*v*ua - 2*ua*ub - 2*v1 + w1").unwrap();
    let core = OdeSystem::new(vec![("ua", 1, ua1.clone()), ("ub", 1, ub1.clone())]).expect("valid system");
    let kk = parse("ub - w + 2*v").unwrap().scale(&rat_of(sign));
    let dk = core.reduce(&d_total(&kk));
    let z1 = -(dk * DiffPoly::dep("z", 0).pow(2));
    let sys = OdeSystem::new(vec![("ua", 1, ua1), ("ub", 1, ub1), ("z", 1, z1)]).expect("valid system");
    (sys, kk)
}

/// Result of [`u1u2_g5`].
#[derive(Clone, Debug)]
pub struct G5Check {
    /// `u1, u2` on the grid.
    pub solution: Trajectory,
    /// Residual of `f = exp(int u1)` in the projective vector field equation,
    /// divided by `f`.
    pub pvf: ResidualReport,
    /// `p'' - 3/4 p'^2/p + 4v p + 2 sign` for `p = -1/K`.
    pub g5: ResidualReport,
    /// `u1 + K' / (2K)`.
    pub relation: ResidualReport,
}

/// Integrates the `(u1, u2)` system from `ics` at `x0` and runs the three
/// checks. `prob.k` is ignored.
pub fn u1u2_g5(
    prob: &PvfProblem,
    w: &FunctionSpec,
    ics: [f64; 2],
    sign: f64,
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<G5Check, ProjectiveError> {
    prob.validate()?;
    if sign != 1.0 && sign != -1.0 {
        return Err(ProjectiveError::InvalidInput(format!("sign must be +1 or -1, got {sign}")));
    }
    let (sys, kk) = g5_system(sign);
    let env = Env::new().with_coeff("v", prob.v.clone()).with_coeff("w", w.clone()).with_const("k", 1.0);
    let x0 = prob.x0();
    let k0 = sign * (ics[1] - w.value(x0) + 2.0 * prob.v.value(x0));
    if k0.abs() < DEFAULT_MARGIN {
        return Err(ProjectiveError::ZeroDenominator { x: x0 });
    }
    let grid = prob.grid();
    let t = integrate_guarded(&sys, &env, &[ics[0], ics[1], 1.0 / k0], &grid, opts)?;

    let ua = DiffPoly::dep("ua", 0);
    let z = DiffPoly::dep("z", 0);
    let pvf = substitute(&second_order_riccati(), "u", &ua);
    let p = -z.clone();
    let dp = d_total(&p);
    let g5 = d_total(&dp)
        + parse("3/4").unwrap() * &kk * dp.pow(2)
        + DiffPoly::int(4) * DiffPoly::coef("v", 0) * &p
        + DiffPoly::constant(rat_of(2.0 * sign));
    let relation = ua + parse("1/2").unwrap() * d_total(&kk) * z;
    let values = sys.compile(&[pvf, g5, relation], &env)?.eval_along(&t);
    let column = |j: usize| values.iter().map(|v| v[j]).collect::<Vec<f64>>();
    let names = vec!["u1".to_string(), "u2".to_string()];
    let solution = Trajectory::from_samples(names, t.grid.clone(), t.states.iter().map(|s| s[..2].to_vec()).collect());
    Ok(G5Check {
        solution,
        pvf: ResidualReport::from_values(&column(0), tol),
        g5: ResidualReport::from_values(&column(1), tol),
        relation: ResidualReport::from_values(&column(2), tol),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prob(v: FunctionSpec, domain: (f64, f64)) -> PvfProblem {
        PvfProblem::new(v, domain, 101)
    }

    #[test]
    fn from_f_on_a_positive_combination() {
        // f = 3 cos^2 x + sin^2 x
        let p = prob(FunctionSpec::Constant(1.0), (0.0, 6.0));
        let r = riccati2_residual(Riccati2Kind::FromF, &p, &[3.0, 0.0, -4.0], &Default::default(), 1e-6).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
        for (x, s) in r.solution.grid.iter().zip(&r.solution.states) {
            let expect = -2.0 * (2.0 * x).sin() / (2.0 + (2.0 * x).cos());
            assert!((s[0] - expect).abs() < 1e-8);
        }
    }

    #[test]
    fn from_f_rejects_a_vanishing_f() {
        let p = prob(FunctionSpec::Constant(1.0), (0.0, 3.0));
        // f = cos 2x vanishes at pi/4
        let r = riccati2_residual(Riccati2Kind::FromF, &p, &[1.0, 0.0, -4.0], &Default::default(), 1e-6);
        match r {
            Err(ProjectiveError::ZeroDenominator { x }) => assert!((x - std::f64::consts::FRAC_PI_4).abs() < 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn doubling_of_tangent() {
        let p = prob(FunctionSpec::Constant(1.0), (-1.0, 1.0));
        let r = riccati2_residual(Riccati2Kind::Doubling, &p, &[1f64.tan()], &Default::default(), 1e-6).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
        for (x, s) in r.solution.grid.iter().zip(&r.solution.states) {
            assert!((s[0] + 2.0 * x.tan()).abs() < 1e-8);
        }
    }

    #[test]
    fn doubling_with_trig_potential() {
        let p = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 1.0));
        let r = riccati2_residual(Riccati2Kind::Doubling, &p, &[0.2], &Default::default(), 1e-6).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
        assert!(r.notes.is_empty());
    }

    fn noted_max(notes: &[String]) -> f64 {
        notes[0].rsplit(' ').next().unwrap().parse().unwrap()
    }

    #[test]
    fn coupling_other_than_one_leaves_the_predicted_defect() {
        let p = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 1.0)).with_k(0.5);
        let r = riccati2_residual(Riccati2Kind::Doubling, &p, &[0.2], &Default::default(), 1e-6).unwrap();
        assert!(!r.report.pass);
        assert!((r.report.max_abs - noted_max(&r.notes)).abs() < 1e-3 * r.report.max_abs);

        let p = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 2.0)).with_k(1.5);
        let r = riccati2_residual(Riccati2Kind::FromF, &p, &[2.0, 0.1, -0.3], &Default::default(), 1e-6).unwrap();
        assert!((r.report.max_abs - noted_max(&r.notes)).abs() < 1e-3 * r.report.max_abs, "{:?} {:?}", r.report, r.notes);
    }

    #[test]
    fn milne_pinney_constant_solution() {
        let p = prob(FunctionSpec::Constant(1.0), (0.0, 2.0));
        let r = riccati2_residual(Riccati2Kind::MilnePinney, &p, &[1.0, 0.0, 1.0], &Default::default(), 1e-12).unwrap();
        assert_eq!(r.report.max_abs, 0.0);
        let p = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 6.0));
        let r = riccati2_residual(Riccati2Kind::MilnePinney, &p, &[1.2, 0.1, 0.8], &Default::default(), 1e-6).unwrap();
        assert!(r.report.pass, "{:?}", r.report);
    }

    #[test]
    fn modified_emden_matches_projective_construction() {
        let p = prob(FunctionSpec::Constant(0.25), (0.0, 2.0));
        let r = riccati2_residual(Riccati2Kind::ModEmden, &p, &[0.3, -0.1], &Default::default(), 1e-6).unwrap();
        assert!(r.report.pass);
        let dev = noted_max(&r.notes);
        assert!(dev < 1e-8, "{}", r.notes[0]);
        let bad = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 2.0));
        assert!(riccati2_residual(Riccati2Kind::ModEmden, &bad, &[0.3, -0.1], &Default::default(), 1e-6).is_err());
    }

    #[test]
    fn kinds_parse() {
        for k in Riccati2Kind::ALL {
            assert_eq!(k.as_str().parse::<Riccati2Kind>().unwrap(), k);
        }
        assert_eq!("milne-pinney".parse::<Riccati2Kind>().unwrap(), Riccati2Kind::MilnePinney);
    }

    #[test]
    fn g5_reduction_both_signs() {
        let p = prob(FunctionSpec::Constant(1.0), (0.0, 1.0));
        let zero = FunctionSpec::Constant(0.0);
        for sign in [1.0, -1.0] {
            let c = u1u2_g5(&p, &zero, [0.1, 0.2], sign, &Default::default(), 1e-6).unwrap();
            assert!(c.pvf.pass, "{:?}", c.pvf);
            assert!(c.g5.pass, "sign {sign}: {:?}", c.g5);
            assert!(c.relation.max_abs < 1e-8, "{:?}", c.relation);
        }
    }

    #[test]
    fn g5_with_varying_coefficients() {
        let p = prob(FunctionSpec::cosine(1.0, 0.3), (0.0, 0.6));
        let w = FunctionSpec::Affine(0.2, -0.1);
        let c = u1u2_g5(&p, &w, [0.3, -0.4], -1.0, &Default::default(), 1e-6).unwrap();
        assert!(c.pvf.pass && c.g5.pass && c.relation.pass);
    }

    #[test]
    fn g5_zero_k() {
        let p = prob(FunctionSpec::Constant(1.0), (0.0, 1.0));
        let zero = FunctionSpec::Constant(0.0);
        assert!(matches!(
            u1u2_g5(&p, &zero, [0.1, -2.0], 1.0, &Default::default(), 1e-6),
            Err(ProjectiveError::ZeroDenominator { .. })
        ));
    }
}
