use nalgebra::{DMatrix, DVector};

use crate::numerics::{FunctionSpec, IntegratorOptions, LinearPair};

use super::ProjectiveError;

/// Coefficients `(c_n, ..., c_0)` of the order-`n+1` equation satisfied by
/// the `n`-th symmetric power of `psi'' + v psi = 0`, from the jet
/// `[v, v', v'', v''']` at a point.
pub fn expected_power_coefficients(n: usize, v: &[f64]) -> Option<Vec<f64>> {
    match n {
        3 => Some(vec![0.0, 10.0 * v[0], 10.0 * v[1], 9.0 * v[0] * v[0] + 3.0 * v[2]]),
        4 => Some(vec![
            0.0,
            20.0 * v[0],
            30.0 * v[1],
            18.0 * v[2] + 64.0 * v[0] * v[0],
            4.0 * v[3] + 64.0 * v[0] * v[1],
        ]),
        _ => None,
    }
}

/// Pointwise-solved coefficients of the monic order-`n+1` equation spanned
/// by `psi1^a psi2^(n-a)`, compared with [`expected_power_coefficients`].
#[derive(Clone, Debug)]
pub struct SymmetricPower {
    pub n: usize,
    pub grid: Vec<f64>,
    /// `coefficients[i] = (c_n, ..., c_0)` at `grid[i]`.
    pub coefficients: Vec<Vec<f64>>,
    pub expected: Vec<Vec<f64>>,
    /// Per coefficient, `max |c - e| / max(1, |e|)` over the grid.
    pub max_rel_err: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl SymmetricPower {
    pub fn worst(&self) -> f64 {
        self.max_rel_err.iter().cloned().fold(0.0, f64::max)
    }
}

pub fn symmetric_power(
    n: usize,
    v: &FunctionSpec,
    grid: &[f64],
    opts: &IntegratorOptions,
    tol: f64,
) -> Result<SymmetricPower, ProjectiveError> {
    if !(n == 3 || n == 4) {
        return Err(ProjectiveError::InvalidInput(format!("symmetric power {n} is not supported (3 or 4)")));
    }
    let pair = LinearPair::hill(v, 1.0, grid, opts)?;
    let m = n + 1;
    let mut coefficients = Vec::with_capacity(grid.len());
    let mut expected = Vec::with_capacity(grid.len());
    let mut max_rel_err = vec![0.0f64; m];
    for (i, &x) in grid.iter().enumerate() {
        let a = pair.taylor(0, i, m);
        let b = pair.taylor(1, i, m);
        let products: Vec<Vec<f64>> = (0..=n)
            .map(|e| (&a.powi(e as u32) * &b.powi((n - e) as u32)).derivatives())
            .collect();
        let mat = DMatrix::from_fn(m, m, |row, j| products[row][j]);
        let rhs = DVector::from_fn(m, |row, _| -products[row][m]);
        let sol = mat.lu().solve(&rhs).filter(|s| s.iter().all(|c| c.is_finite()));
        let sol = sol.ok_or(ProjectiveError::SingularSystem { x })?;
        let desc: Vec<f64> = sol.iter().rev().cloned().collect();
        let exp = expected_power_coefficients(n, &v.jet(x, 3)).expect("supported order");
        for (j, (c, e)) in desc.iter().zip(&exp).enumerate() {
            max_rel_err[j] = max_rel_err[j].max((c - e).abs() / e.abs().max(1.0));
        }
        coefficients.push(desc);
        expected.push(exp);
    }
    let pass = max_rel_err.iter().all(|e| *e <= tol);
    Ok(SymmetricPower { n, grid: grid.to_vec(), coefficients, expected, max_rel_err, tolerance: tol, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{uniform_grid, Taylor};

    fn product_jet(a: &Taylor, b: &Taylor, p: u32, q: u32) -> Vec<f64> {
        (&a.powi(p) * &b.powi(q)).derivatives()
    }

    #[test]
    fn cube_with_constant_potential() {
        let grid = uniform_grid(0.0, 3.0, 31);
        let s = symmetric_power(3, &FunctionSpec::Constant(1.0), &grid, &Default::default(), 1e-6).unwrap();
        assert!(s.pass, "{:?}", s.max_rel_err);
        for c in &s.coefficients {
            for (got, want) in c.iter().zip([0.0, 10.0, 0.0, 9.0]) {
                assert!((got - want).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn cube_with_trig_potential() {
        let grid = uniform_grid(0.0, std::f64::consts::TAU, 64);
        let v: FunctionSpec = "trig:1;0.3,0".parse().unwrap();
        let s = symmetric_power(3, &v, &grid, &Default::default(), 1e-6).unwrap();
        assert!(s.pass, "{:?}", s.max_rel_err);
    }

    #[test]
    fn fourth_power_constant_potential() {
        // roots of the characteristic polynomial are 0, +-2i, +-4i
        let grid = uniform_grid(0.0, 1.0, 11);
        let s = symmetric_power(4, &FunctionSpec::Constant(1.0), &grid, &Default::default(), 1e-6).unwrap();
        for c in &s.coefficients {
            for (got, want) in c.iter().zip([0.0, 20.0, 0.0, 64.0, 0.0]) {
                assert!((got - want).abs() < 1e-6, "{c:?}");
            }
        }
    }

    #[test]
    fn products_span() {
        let x0 = 0.4f64;
        let a = Taylor::from_derivatives(&[x0.cos(), -x0.sin(), -x0.cos(), x0.sin(), x0.cos()]);
        let b = Taylor::from_derivatives(&[x0.sin(), x0.cos(), -x0.sin(), -x0.cos(), x0.sin()]);
        // cos^2 - sin^2 = cos 2x
        let c2 = product_jet(&a, &b, 2, 0);
        let s2 = product_jet(&a, &b, 0, 2);
        assert!((c2[3] - s2[3] - 8.0 * (2.0 * x0).sin()).abs() < 1e-12);
    }

    #[test]
    fn unsupported_order() {
        let grid = uniform_grid(0.0, 1.0, 3);
        assert!(symmetric_power(2, &FunctionSpec::Constant(1.0), &grid, &Default::default(), 1e-6).is_err());
    }
}
