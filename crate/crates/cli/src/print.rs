use clap::Subcommand;

use riccati_core::diffpoly::parse;
use riccati_core::hierarchy::{kdv_gradients, lenard_j, pii_n};
use riccati_core::riccati_chain::{chain, f_xvi_template};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq, Subcommand)]
pub enum PrintKind {
    /// R^n(u) for R = D + k u; `k` is a rational or a symbol (default 1).
    Chain { n: u32, k: Option<String> },
    /// The n-th member of the PII hierarchy in `v`, with constant `beta`.
    PiiHierarchy { n: usize },
    /// J_n of the Lenard recursion.
    LenardJ { n: usize },
    /// g_n, the n-th KdV gradient (n >= 2).
    KdvGradients { n: usize },
    /// Fourth-order chain equation with free coefficients A..E.
    FXviTemplate,
}

pub fn render(kind: &PrintKind) -> Result<String, CliError> {
    let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
    Ok(match kind {
        PrintKind::Chain { n, k } => {
            let k = parse(k.as_deref().unwrap_or("1")).map_err(|e| usage(&e))?;
            chain(*n, &k).to_string()
        }
        PrintKind::PiiHierarchy { n } => pii_n(*n, "beta").map_err(|e| usage(&e))?.to_string(),
        PrintKind::LenardJ { n } => {
            let js = lenard_j(*n).map_err(|e| usage(&e))?;
            js.get(*n).expect("n-th member").to_string()
        }
        PrintKind::KdvGradients { n } => {
            let gs = kdv_gradients(*n).map_err(|e| usage(&e))?;
            gs.get(*n).expect("n-th gradient").to_string()
        }
        PrintKind::FXviTemplate => format!("{} = 0", f_xvi_template()),
    })
}
