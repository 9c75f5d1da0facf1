//! The `verify` checks. Each check reads its parameters through a
//! [`Scope`](crate::params::Scope) and returns one or more report entries.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use riccati_core::numerics::IntegratorOptions;

use crate::report::{sort_entries, Entry};
use crate::{CliError, Params};

mod painleve;
mod projective;
mod superposition;
mod symbolic;

pub type CheckFn = fn(&Params) -> Result<Vec<Entry>, CliError>;

pub struct Check {
    pub name: &'static str,
    pub run: CheckFn,
}

/// Every check, in report order.
pub const CHECKS: &[Check] = &[
    Check { name: "chain", run: symbolic::chain },
    Check { name: "chain-identities", run: symbolic::chain_identities },
    Check { name: "cross-ratio", run: superposition::cross_ratio },
    Check { name: "first-integrals", run: projective::first_integrals },
    Check { name: "g5", run: projective::g5 },
    Check { name: "hill-from-h", run: painleve::hill_from_h },
    Check { name: "lax", run: projective::lax },
    Check { name: "lenard", run: symbolic::lenard },
    Check { name: "lie-scheffers", run: superposition::lie_scheffers },
    Check { name: "pii-airy", run: painleve::pii_airy },
    Check { name: "pii-hamiltonian", run: painleve::pii_hamiltonian },
    Check { name: "pii-hierarchy", run: symbolic::pii_hierarchy },
    Check { name: "pinney", run: superposition::pinney },
    Check { name: "pvf-basis", run: projective::pvf_basis },
    Check { name: "riccati2", run: projective::riccati2 },
    Check { name: "sd-pii", run: painleve::sd_pii },
    Check { name: "superposition-rules", run: superposition::rules },
    Check { name: "symmetric-power", run: projective::symmetric_power },
    Check { name: "symmetry", run: projective::symmetry },
];

pub fn names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// Resolves names (or `all`) before anything runs; duplicates collapse.
pub fn select(requested: &[String]) -> Result<Vec<&'static Check>, CliError> {
    let mut out: Vec<&'static Check> = Vec::new();
    for name in requested {
        if name == "all" {
            out = CHECKS.iter().collect();
            continue;
        }
        let c = CHECKS.iter().find(|c| c.name == name).ok_or_else(|| {
            CliError::Usage(format!("unknown check {name:?}; known: all, {}", names().join(", ")))
        })?;
        if !out.iter().any(|o| o.name == c.name) {
            out.push(c);
        }
    }
    out.sort_by_key(|c| c.name);
    out.dedup_by_key(|c| c.name);
    Ok(out)
}

#[derive(Debug)]
pub struct Outcome {
    pub entries: Vec<Entry>,
    pub numerical_failure: bool,
}

/// Runs the checks on separate threads; the report order does not depend on
/// completion order.
pub fn run_checks(checks: &[&Check], params: &Params) -> Outcome {
    let results: Vec<(&str, Result<Vec<Entry>, CliError>)> = std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| (c.name, s.spawn(move || (c.run)(params)))).collect();
        handles
            .into_iter()
            .map(|(name, h)| {
                let r = h.join().unwrap_or_else(|_| Err(CliError::Numerical("check panicked".into())));
                (name, r)
            })
            .collect()
    });
    let mut entries = Vec::new();
    let mut numerical_failure = false;
    for (name, r) in results {
        match r {
            Ok(es) => entries.extend(es),
            Err(e) => {
                numerical_failure = true;
                entries.push(Entry::failed(name, e.to_string()));
            }
        }
    }
    sort_entries(&mut entries);
    Outcome { entries, numerical_failure }
}

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub(crate) fn opts() -> IntegratorOptions {
    IntegratorOptions::default()
}

pub(crate) const DEFAULT_V: &str = "trig:1;0.3,0";
pub(crate) const DEFAULT_SEED: u64 = 0;
