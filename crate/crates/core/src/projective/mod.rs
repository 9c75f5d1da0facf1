//! The projective vector field equation `y''' + 4k v y' + 2k v' y = 0` and
//! what hangs off it: the Hill product basis, first integrals, second-order
//! Riccati reductions, the (u1, u2) system, symmetry and Lax checks, and
//! symmetric powers of the Hill operator.

mod power;
mod riccati2;
mod symmetry;

pub use power::{expected_power_coefficients, symmetric_power, SymmetricPower};
pub use riccati2::{
    g5_system, riccati2_residual, second_order_riccati, u1u2_g5, G5Check, Riccati2Kind, Riccati2Result,
};
pub use symmetry::{lax_residual, lax_state, lax_system, symmetry_residual};

use std::fmt;
use std::str::FromStr;

use crate::diffpoly::{parse, DiffPoly};
use crate::numerics::{
    pvf_system, residual_columns, residual_columns_series, uniform_grid, wronskian_at, Env, FunctionSpec,
    IntegratorOptions, LinearPair, NumericsError, OdeSystem, ResidualReport, Taylor, Trajectory,
};

#[derive(Clone, Debug, thiserror::Error)]
pub enum ProjectiveError {
    #[error("denominator vanishes near x = {x}")]
    ZeroDenominator { x: f64 },
    #[error("pointwise linear system is singular at x = {x}")]
    SingularSystem { x: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Potential, coupling and sampling for the projective vector field
/// equation. Initial data are given at the left end of `domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct PvfProblem {
    pub v: FunctionSpec,
    pub k: f64,
    pub domain: (f64, f64),
    pub samples: usize,
}

impl PvfProblem {
    pub fn new(v: FunctionSpec, domain: (f64, f64), samples: usize) -> Self {
        PvfProblem { v, k: 1.0, domain, samples }
    }

    pub fn with_k(mut self, k: f64) -> Self {
        self.k = k;
        self
    }

    pub fn x0(&self) -> f64 {
        self.domain.0
    }

    pub fn grid(&self) -> Vec<f64> {
        uniform_grid(self.domain.0, self.domain.1, self.samples)
    }

    pub fn env(&self) -> Env {
        Env::new().with_coeff("v", self.v.clone()).with_const("k", self.k)
    }

    fn validate(&self) -> Result<(), ProjectiveError> {
        if self.domain.0.partial_cmp(&self.domain.1) != Some(std::cmp::Ordering::Less) || self.samples < 2 || !self.k.is_finite() || self.k == 0.0 {
            return Err(ProjectiveError::InvalidInput(format!(
                "domain {:?}, {} samples, k = {}",
                self.domain, self.samples, self.k
            )));
        }
        Ok(())
    }

    /// Integrates the equation from `(y, y', y'')` at `x0`; columns `y, y1, y2`.
    pub fn integrate(&self, ics: [f64; 3], opts: &IntegratorOptions) -> Result<Trajectory, ProjectiveError> {
        self.validate()?;
        Ok(pvf_system(self.k).integrate(&self.env(), &ics, &self.grid(), opts)?)
    }
}

/// `W[psi1^2, psi1 psi2, psi2^2]` against `2 (psi1 psi2' - psi2 psi1')^3`.
#[derive(Clone, Debug, PartialEq)]
pub struct WronskianReport {
    pub lhs_at_x0: f64,
    pub rhs_at_x0: f64,
    pub max_rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Products of a Hill fundamental pair, each with columns `y, y1, y2, y3`.
#[derive(Clone, Debug)]
pub struct PvfBasis {
    pub pair: LinearPair,
    pub products: [Trajectory; 3],
    pub residuals: [ResidualReport; 3],
    pub residual: ResidualReport,
    pub wronskian: WronskianReport,
}

impl PvfBasis {
    /// `A psi1^2 + 2B psi1 psi2 + C psi2^2` with the same columns.
    pub fn combination(&self, a: f64, b: f64, c: f64) -> Trajectory {
        let [p, q, r] = &self.products;
        let states = (0..p.len())
            .map(|i| (0..p.dim()).map(|j| a * p.states[i][j] + 2.0 * b * q.states[i][j] + c * r.states[i][j]).collect())
            .collect();
        Trajectory::from_samples(p.names.clone(), p.grid.clone(), states)
    }
}

/// `y3 + 4k v y1 + 2k v1 y` with `k` a constant symbol.
pub fn pvf_operator() -> DiffPoly {
    parse("y3 + 4*k*v*y1 + 2*k*v1*y").expect("static expression")
}

/// Integrates `psi'' + k v psi = 0` for the canonical pair, forms the three
/// products with Taylor arithmetic and checks each against the projective
/// vector field equation and the Wronskian identity.
pub fn pvf_basis_from_hill(
    prob: &PvfProblem,
    opts: &IntegratorOptions,
    tol: f64,
    wronskian_tol: f64,
) -> Result<PvfBasis, ProjectiveError> {
    prob.validate()?;
    let grid = prob.grid();
    let pair = LinearPair::hill(&prob.v, prob.k, &grid, opts)?;
    let names: Vec<String> = ["y", "y1", "y2", "y3"].iter().map(|s| s.to_string()).collect();
    let mut cols: [Vec<Vec<f64>>; 3] = Default::default();
    for i in 0..pair.len() {
        let a = pair.taylor(0, i, 3);
        let b = pair.taylor(1, i, 3);
        let prods: [Taylor; 3] = [&a * &a, &a * &b, &b * &b];
        for (c, p) in cols.iter_mut().zip(prods) {
            c.push(p.derivatives());
        }
    }
    let products = cols.map(|states| Trajectory::from_samples(names.clone(), grid.clone(), states));
    let env = prob.env();
    let op = pvf_operator();
    let mut residuals = Vec::with_capacity(3);
    for p in &products {
        residuals.push(residual_columns(&op, p, &env, tol)?);
    }
    let residuals: [ResidualReport; 3] = residuals.try_into().expect("three products");
    let residual = ResidualReport::merge(&residuals, tol);

    let mut max_rel_err: f64 = 0.0;
    let (mut lhs0, mut rhs0) = (0.0, 0.0);
    for i in 0..grid.len() {
        let lhs = wronskian_at(&products, i);
        let rhs = 2.0 * pair.wronskian(i).powi(3);
        if i == 0 {
            (lhs0, rhs0) = (lhs, rhs);
        }
        let err = (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE);
        max_rel_err = max_rel_err.max(if err.is_finite() { err } else { f64::INFINITY });
    }
    let wronskian = WronskianReport {
        lhs_at_x0: lhs0,
        rhs_at_x0: rhs0,
        max_rel_err,
        tolerance: wronskian_tol,
        pass: max_rel_err <= wronskian_tol,
    };
    Ok(PvfBasis { pair, products, residuals, residual, wronskian })
}

/// Which first integral [`conserved_series`] evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConservedKind {
    /// `2v y^2 - y'^2/2 + y y''` along the projective vector field equation.
    PvfPhi,
    /// `2a y + 6y^3 w + y^6 - w^2` with `(y, w, a) = (y, y', y'')` along
    /// [`cdis_system`].
    CdisPhi,
}

impl ConservedKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConservedKind::PvfPhi => "PVF_PHI",
            ConservedKind::CdisPhi => "CDIS_PHI",
        }
    }

    pub fn expression(self) -> DiffPoly {
        let src = match self {
            ConservedKind::PvfPhi => "2*v*y^2 - 1/2*y1^2 + y*y2",
            ConservedKind::CdisPhi => "2*y2*y + 6*y^3*y1 + y^6 - y1^2",
        };
        parse(src).expect("static expression")
    }
}

impl fmt::Display for ConservedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ConservedKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().replace('-', "_").as_str() {
            "PVF_PHI" => Ok(ConservedKind::PvfPhi),
            "CDIS_PHI" => Ok(ConservedKind::CdisPhi),
            _ => Err(format!("unknown first integral {s:?}")),
        }
    }
}

/// Stationary CDIS flow as a third-order system in `y`:
/// `y''' = -(3y^2 y'' + 9y y'^2 + 3y^4 y')`.
pub fn cdis_system() -> OdeSystem {
    OdeSystem::from_monic(&parse("y3 + 3*y^2*y2 + 9*y*y1^2 + 3*y^4*y1").unwrap(), "y").expect("monic")
}

/// The first integral along `traj` (columns `y, y1, y2`) and a drift report
/// on `Phi - Phi(x0)`. For `k != 1` pass `k v` as the potential.
pub fn conserved_series(
    kind: ConservedKind,
    traj: &Trajectory,
    v: &FunctionSpec,
    tol: f64,
) -> Result<(Vec<f64>, ResidualReport), ProjectiveError> {
    if traj.is_empty() {
        return Err(ProjectiveError::InvalidInput("empty trajectory".into()));
    }
    let env = Env::new().with_coeff("v", v.clone());
    let phi = residual_columns_series(&kind.expression(), traj, &env)?;
    let drift: Vec<f64> = phi.iter().map(|p| p - phi[0]).collect();
    Ok((phi, ResidualReport::from_values(&drift, tol)))
}
