//! Coefficient functions, adaptive integration and residual evaluation of
//! differential polynomials along numerical solutions.

mod function;
mod integrator;
mod linear;
mod residual;
mod system;
mod taylor;
mod trajectory;

pub use function::{FunctionSpec, SpecError};
pub use integrator::{integrate, IntegrationError, IntegratorOptions};
pub use linear::{linear_basis, linear_system, wronskian_at, LinearPair};
pub use residual::{
    column_symbol, residual, residual_columns, residual_columns_series, residual_series, ResidualReport,
};
pub use system::{hill_system, pvf_system, rat_of, Env, Evaluator, OdeSystem};
pub use taylor::Taylor;
pub use trajectory::{longest_run, uniform_grid, IntegratorMeta, Trajectory};

/// Derivatives `[f, f', ..., f^(m)]` of a coefficient function at `x`.
pub fn eval_fn_jet(spec: &FunctionSpec, x: f64, m: usize) -> Vec<f64> {
    spec.jet(x, m)
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum NumericsError {
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error("no function given for coefficient {0}")]
    MissingCoefficient(String),
    #[error("{0}")]
    MissingSymbol(String),
    #[error("symbol {0} is not part of the system state")]
    UnknownSymbol(String),
    #[error("equation is not monic in its highest derivative: {0}")]
    NotMonic(String),
    #[error("{0}")]
    Layout(String),
}
