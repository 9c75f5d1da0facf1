use crate::diffpoly::{DiffPoly, DiffSymbol};
use crate::numerics::{pvf_system, Env, FunctionSpec, IntegratorOptions, OdeSystem, ResidualReport, Trajectory};

use super::{ProjectiveError, PvfProblem};

/// Returns `traj` with the columns in `needed`, lifting missing ones one
/// order through `sys` when `traj` has exactly its state layout.
fn with_top_jets(
    traj: &Trajectory,
    sys: &OdeSystem,
    env: &Env,
    needed: &[&str],
) -> Result<Trajectory, ProjectiveError> {
    if needed.iter().all(|n| traj.index_of(n).is_some()) {
        return Ok(traj.clone());
    }
    if traj.names != sys.state_names() {
        return Err(ProjectiveError::InvalidInput(format!(
            "need columns {needed:?} or exactly {:?}, got {:?}",
            sys.state_names(),
            traj.names
        )));
    }
    Ok(sys.extend_jets(traj, env, 1)?)
}

fn columns(traj: &Trajectory, names: &[&str]) -> Vec<usize> {
    names.iter().map(|n| traj.index_of(n).expect("column present")).collect()
}

/// Determining equation of the point symmetry `f(x) d/dx + g(x, u) d/du`,
/// `g = -f' u - f''/2`, of `u' = u^2 + v`, over `grid x u_grid`.
///
/// `f_source` carries `y, y1, y2` and optionally `y3`; without `y3` it must
/// be a trajectory of the projective vector field equation, whose lift
/// supplies the third derivative.
pub fn symmetry_residual(
    f_source: &Trajectory,
    v: &FunctionSpec,
    u_grid: &[f64],
    tol: f64,
) -> Result<ResidualReport, ProjectiveError> {
    let env = Env::new().with_coeff("v", v.clone());
    let t = with_top_jets(f_source, &pvf_system(1.0), &env, &["y", "y1", "y2", "y3"])?;
    let idx = columns(&t, &["y", "y1", "y2", "y3"]);
    let mut values = Vec::with_capacity(t.len() * u_grid.len());
    for (x, s) in t.grid.iter().zip(&t.states) {
        let [f, f1, f2, f3] = [s[idx[0]], s[idx[1]], s[idx[2]], s[idx[3]]];
        let vj = v.jet(*x, 1);
        for &u in u_grid {
            let g = -f1 * u - 0.5 * f2;
            let gx = -f2 * u - 0.5 * f3;
            let gu = -f1;
            let flow = u * u + vj[0];
            values.push(gx + flow * gu - f * vj[1] - 2.0 * g * u - flow * f1);
        }
    }
    Ok(ResidualReport::from_values(&values, tol))
}

/// Projective vector field equation (`k = 1`) in `y` with the quadrature
/// `quad' = v y'`.
pub fn lax_system() -> OdeSystem {
    let pvf = pvf_system(1.0);
    let y3 = pvf.lifted(&DiffSymbol::dependent("y", 3));
    let quad = DiffPoly::coef("v", 0) * DiffPoly::dep("y", 1);
    OdeSystem::new(vec![("y", 3, y3), ("quad", 1, quad)]).expect("valid system")
}

/// Integrates [`lax_system`] from `(f, f', f'')`, starting the quadrature at
/// `-(f'' + 2v f)/2`.
pub fn lax_state(prob: &PvfProblem, ics: [f64; 3], opts: &IntegratorOptions) -> Result<Trajectory, ProjectiveError> {
    prob.validate()?;
    if prob.k != 1.0 {
        return Err(ProjectiveError::InvalidInput("the Lax pair is stated for k = 1".into()));
    }
    let i0 = -(ics[2] + 2.0 * prob.v.value(prob.x0()) * ics[0]) / 2.0;
    let y0 = [ics[0], ics[1], ics[2], i0];
    Ok(lax_system().integrate(&prob.env(), &y0, &prob.grid(), opts)?)
}

/// Max Frobenius norm of `P' - [Q, P]` with `P = [[f'/2, -I], [-f, -f'/2]]`
/// and `Q = [[0, v], [-1, 0]]`.
///
/// `f_source` carries `y, y1, y2, quad` and optionally `quad1`; when that is
/// missing it comes from [`lax_system`].
pub fn lax_residual(f_source: &Trajectory, v: &FunctionSpec, tol: f64) -> Result<ResidualReport, ProjectiveError> {
    let env = Env::new().with_coeff("v", v.clone());
    let needed = ["y", "y1", "y2", "quad", "quad1"];
    let t = with_top_jets(f_source, &lax_system(), &env, &needed)?;
    let idx = columns(&t, &needed);
    let values: Vec<f64> = t
        .grid
        .iter()
        .zip(&t.states)
        .map(|(x, s)| {
            let [f, f1, f2, i, i1] = [0, 1, 2, 3, 4].map(|j| s[idx[j]]);
            let vv = v.value(*x);
            let a = f1 / 2.0;
            let dp = [f2 / 2.0, -i1, -f1, -f2 / 2.0];
            let comm = [-vv * f - i, -2.0 * a * vv, -2.0 * a, i + f * vv];
            dp.iter().zip(&comm).map(|(p, c)| (p - c).powi(2)).sum::<f64>().sqrt()
        })
        .collect();
    Ok(ResidualReport::from_values(&values, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;
    use std::f64::consts::TAU;

    fn explicit(grid: &[f64], jets: impl Fn(f64) -> Vec<f64>, names: &[&str]) -> Trajectory {
        Trajectory::from_samples(
            names.iter().map(|s| s.to_string()).collect(),
            grid.to_vec(),
            grid.iter().map(|x| jets(*x)).collect(),
        )
    }

    #[test]
    fn symmetry_of_cos_2x() {
        let prob = PvfProblem::new(FunctionSpec::Constant(1.0), (0.0, TAU), 101);
        let f = prob.integrate([1.0, 0.0, -4.0], &Default::default()).unwrap();
        let u = uniform_grid(-2.0, 2.0, 21);
        let r = symmetry_residual(&f, &prob.v, &u, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.n_samples, 101 * 21);
    }

    #[test]
    fn symmetry_zero_and_negative_control() {
        let grid = uniform_grid(0.0, TAU, 101);
        let u = uniform_grid(-2.0, 2.0, 21);
        let one = FunctionSpec::Constant(1.0);
        let zero = explicit(&grid, |_| vec![0.0; 4], &["y", "y1", "y2", "y3"]);
        assert_eq!(symmetry_residual(&zero, &one, &u, 1e-6).unwrap().max_abs, 0.0);
        let c3 = explicit(
            &grid,
            |x| {
                let (s, c) = (3.0 * x).sin_cos();
                vec![c, -3.0 * s, -9.0 * c, 27.0 * s]
            },
            &["y", "y1", "y2", "y3"],
        );
        let r = symmetry_residual(&c3, &one, &u, 1e-6).unwrap();
        assert!(r.max_abs > 1e-2);
        assert!((r.max_abs - 7.5).abs() < 1e-2, "{r:?}");
    }

    #[test]
    fn lax_pair_on_pvf_solutions() {
        let prob = PvfProblem::new(FunctionSpec::Constant(1.0), (0.0, TAU), 101);
        let t = lax_state(&prob, [1.0, 0.0, -4.0], &Default::default()).unwrap();
        assert!(lax_residual(&t, &prob.v, 1e-6).unwrap().pass);
        let prob = PvfProblem::new(FunctionSpec::cosine(1.0, 0.3), (0.0, TAU), 101);
        let t = lax_state(&prob, [0.4, 1.1, -0.3], &Default::default()).unwrap();
        let r = lax_residual(&t, &prob.v, 1e-6).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn lax_constant_and_negative_control() {
        let prob = PvfProblem::new(FunctionSpec::Constant(0.0), (0.0, 1.0), 11);
        let t = lax_state(&prob, [2.5, 0.0, 0.0], &Default::default()).unwrap();
        assert_eq!(lax_residual(&t, &prob.v, 1e-12).unwrap().max_abs, 0.0);

        let grid = uniform_grid(0.0, TAU, 101);
        let names = ["y", "y1", "y2", "quad", "quad1"];
        // I' = v f' with I(0) = -(f''(0) + 2 f(0))/2 = 3.5
        let t = explicit(
            &grid,
            |x| {
                let (s, c) = (3.0 * x).sin_cos();
                vec![c, -3.0 * s, -9.0 * c, c + 2.5, -3.0 * s]
            },
            &names,
        );
        let r = lax_residual(&t, &FunctionSpec::Constant(1.0), 1e-6).unwrap();
        assert!(r.max_abs > 1e-2, "{r:?}");
    }

    #[test]
    fn lax_diagonal_is_the_integrated_equation() {
        let sys = lax_system();
        // diagonal entry f''/2 + v f + I
        let diag = crate::diffpoly::parse("1/2*y2 + v*y + quad").unwrap();
        let d = crate::diffpoly::d_total(&diag);
        let reduced = sys.reduce(&d);
        assert!(reduced.is_zero(), "{reduced}");
    }

    #[test]
    fn layout_errors() {
        let t = Trajectory::from_samples(vec!["u".into()], vec![0.0], vec![vec![1.0]]);
        assert!(symmetry_residual(&t, &FunctionSpec::Constant(1.0), &[0.0], 1.0).is_err());
        assert!(lax_residual(&t, &FunctionSpec::Constant(1.0), 1.0).is_err());
    }
}
