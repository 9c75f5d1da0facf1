use crate::diffpoly::{DiffPoly, DiffSymbol};

use super::integrator::IntegratorOptions;
use super::system::{Env, OdeSystem};
use super::trajectory::Trajectory;
use super::NumericsError;
use super::function::FunctionSpec;
use super::taylor::Taylor;

fn coeff_name(j: usize) -> String {
    format!("a_{j}")
}

/// `y^(n) + a_(n-1) y^(n-1) + ... + a_0 y = 0` in base `y`, with coefficient
/// functions named `a_0, ..., a_(n-1)`.
pub fn linear_system(n: usize) -> OdeSystem {
    let mut rhs = DiffPoly::zero();
    for j in 0..n {
        rhs -= DiffPoly::var(DiffSymbol::coefficient(&coeff_name(j), 0)) * DiffPoly::dep("y", j as u32);
    }
    OdeSystem::new(vec![("y", n as u32, rhs)]).expect("valid linear system")
}

/// Fundamental system of the monic linear equation with coefficients
/// `coeffs = [a_0, ..., a_(n-1)]`: solution `i` has initial jet `e_i` at
/// `grid[0]`. Each trajectory carries `y, y1, ..., y(n-1)`.
pub fn linear_basis(
    coeffs: &[FunctionSpec],
    grid: &[f64],
    opts: &IntegratorOptions,
) -> Result<(Vec<Trajectory>, OdeSystem, Env), NumericsError> {
    let n = coeffs.len();
    if n == 0 {
        return Err(NumericsError::Layout("linear equation needs order >= 1".into()));
    }
    let sys = linear_system(n);
    let env = coeffs.iter().enumerate().fold(Env::new(), |env, (j, c)| env.with_coeff(&coeff_name(j), c.clone()));
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut y0 = vec![0.0; n];
        y0[i] = 1.0;
        out.push(sys.integrate(&env, &y0, grid, opts)?);
    }
    Ok((out, sys, env))
}

/// Fundamental pair of `y'' + r y' + q y = 0` with canonical initial jets
/// `(1, 0)` and `(0, 1)`, together with derivatives up to [`LinearPair::DEPTH`]
/// at every grid point.
#[derive(Clone, Debug)]
pub struct LinearPair {
    pub basis: [Trajectory; 2],
    pub system: OdeSystem,
    pub env: Env,
    jets: Vec<[Vec<f64>; 2]>,
}

impl LinearPair {
    /// Highest derivative order kept per sample.
    pub const DEPTH: usize = 6;

    /// `psi'' + k v psi = 0`.
    pub fn hill(v: &FunctionSpec, k: f64, grid: &[f64], opts: &IntegratorOptions) -> Result<Self, NumericsError> {
        LinearPair::new(None, &v.scaled(k), grid, opts)
    }

    /// `y'' + r y' + q y = 0`; `r = None` means `r = 0`.
    pub fn new(
        r: Option<&FunctionSpec>,
        q: &FunctionSpec,
        grid: &[f64],
        opts: &IntegratorOptions,
    ) -> Result<Self, NumericsError> {
        let mut rhs = -(DiffPoly::coef("q", 0) * DiffPoly::dep("y", 0));
        let mut env = Env::new().with_coeff("q", q.clone());
        if let Some(r) = r {
            rhs -= DiffPoly::coef("r", 0) * DiffPoly::dep("y", 1);
            env = env.with_coeff("r", r.clone());
        }
        let system = OdeSystem::new(vec![("y", 2, rhs)])?;
        let b1 = system.integrate(&env, &[1.0, 0.0], grid, opts)?;
        let b2 = system.integrate(&env, &[0.0, 1.0], grid, opts)?;
        let exprs: Vec<DiffPoly> =
            (0..=Self::DEPTH as u32).map(|j| system.lifted(&DiffSymbol::dependent("y", j))).collect();
        let ev = system.compile(&exprs, &env)?;
        let jets = b1
            .grid
            .iter()
            .zip(b1.states.iter().zip(&b2.states))
            .map(|(x, (s1, s2))| [ev.eval(*x, s1), ev.eval(*x, s2)])
            .collect();
        Ok(LinearPair { basis: [b1, b2], system, env, jets })
    }

    pub fn grid(&self) -> &[f64] {
        &self.basis[0].grid
    }

    pub fn len(&self) -> usize {
        self.jets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.jets.is_empty()
    }

    /// `[psi_i, psi_i', ..., psi_i^(DEPTH)]` at sample `k`; `i` is 0 or 1.
    pub fn jets(&self, i: usize, k: usize) -> &[f64] {
        &self.jets[k][i]
    }

    /// Taylor expansion of `psi_i` at sample `k`, truncated at `order`.
    pub fn taylor(&self, i: usize, k: usize, order: usize) -> Taylor {
        Taylor::from_derivatives(&self.jets[k][i][..=order])
    }

    /// `psi_1 psi_2' - psi_2 psi_1'` at sample `k`.
    pub fn wronskian(&self, k: usize) -> f64 {
        let [a, b] = &self.jets[k];
        a[0] * b[1] - b[0] * a[1]
    }
}

/// Determinant of the `n x n` matrix of jets `[traj_i state_j]` at sample `k`.
pub fn wronskian_at(basis: &[Trajectory], k: usize) -> f64 {
    let n = basis.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |row, col| basis[col].states[k][row]);
    m.determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::uniform_grid;
    use std::f64::consts::TAU;

    #[test]
    fn hill_constant_potential_gives_cos_sin() {
        let grid = uniform_grid(0.0, TAU, 65);
        let (b, _, _) = linear_basis(&[FunctionSpec::Constant(1.0), FunctionSpec::Constant(0.0)], &grid, &Default::default()).unwrap();
        for (k, x) in grid.iter().enumerate() {
            assert!((b[0].states[k][0] - x.cos()).abs() < 1e-9);
            assert!((b[1].states[k][0] - x.sin()).abs() < 1e-9);
        }
    }

    #[test]
    fn pair_jets_follow_the_equation() {
        let grid = uniform_grid(0.0, 2.0, 17);
        let v = FunctionSpec::cosine(1.0, 0.3);
        let p = LinearPair::hill(&v, 1.0, &grid, &Default::default()).unwrap();
        for (k, &x) in grid.iter().enumerate() {
            let vj = v.jet(x, 1);
            for i in 0..2 {
                let j = p.jets(i, k);
                assert!((j[2] + vj[0] * j[0]).abs() < 1e-14);
                assert!((j[3] + vj[1] * j[0] + vj[0] * j[1]).abs() < 1e-14);
            }
            assert!((p.wronskian(k) - 1.0).abs() < 1e-9);
        }
        assert!((p.taylor(0, 0, 2).derivative(2) + 1.3).abs() < 1e-14);
    }

    #[test]
    fn airy_wronskian_is_one() {
        let grid = uniform_grid(0.0, 5.0, 65);
        let (b, _, _) = linear_basis(&[FunctionSpec::Affine(1.0, 0.0), FunctionSpec::Constant(0.0)], &grid, &Default::default()).unwrap();
        for k in 0..grid.len() {
            assert!((wronskian_at(&b, k) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn pvf_basis_contains_cos_2x() {
        // y''' + 4 y' = 0
        let coeffs = [FunctionSpec::Constant(0.0), FunctionSpec::Constant(4.0), FunctionSpec::Constant(0.0)];
        let grid = uniform_grid(0.0, TAU, 65);
        let (b, _, _) = linear_basis(&coeffs, &grid, &Default::default()).unwrap();
        // cos 2x has initial jet (1, 0, -4).
        for (k, x) in grid.iter().enumerate() {
            let y = b[0].states[k][0] - 4.0 * b[2].states[k][0];
            assert!((y - (2.0 * x).cos()).abs() < 1e-9);
        }
    }
}
