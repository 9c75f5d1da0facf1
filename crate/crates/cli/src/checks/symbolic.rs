use riccati_core::diffpoly::{parse, parse_with, substitute, DiffPoly, DiffSymbol, SymbolTable};
use riccati_core::hierarchy::{kdv_flow_rhs, kdv_gradients, lenard_j, miura, pii_n};
use riccati_core::numerics::{residual_columns, uniform_grid, Env, Taylor, Trajectory};
use riccati_core::painleve::pii_system;
use riccati_core::riccati_chain::{chain as chain_n, chain1, chain_equation, check_identity, IdentityName};

use crate::report::Entry;
use crate::{CliError, Params};

/// Displayed forms of `R^1 .. R^4` for `k = 1`.
pub const CHAIN_DISPLAYS: [&str; 4] = [
    "u1 + u^2",
    "u2 + 3*u*u1 + u^3",
    "u3 + 4*u*u2 + 3*u1^2 + 6*u^2*u1 + u^4",
    "u4 + 5*u*u3 + 10*u1*u2 + 15*u*u1^2 + 10*u^2*u2 + 10*u^3*u1 + u^5",
];

fn p(s: &str) -> DiffPoly {
    parse(s).expect("static expression")
}

fn pv(s: &str) -> DiffPoly {
    parse_with(s, &SymbolTable::default().with_dependent("v").with_constant("beta")).expect("static expression")
}

fn tagged(check: &str, tag: &str, value: impl ToString, diff: &DiffPoly) -> Entry {
    let mut params = std::collections::BTreeMap::new();
    params.insert(tag.to_string(), value.to_string());
    Entry::exact(check, params, diff)
}

/// Displayed chain members, the chain equation examples, and the
/// linearization `u = y'/(k y)` for polynomial `y` of degree `n`.
pub fn chain(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (i, display) in CHAIN_DISPLAYS.iter().enumerate() {
        let n = i + 1;
        out.push(tagged("chain", "n", n, &(chain1(n as u32) - p(display))));
    }

    let one = DiffPoly::one();
    let airy = chain_equation(&[DiffPoly::x(), DiffPoly::zero(), one.clone()], &one).expect("monic");
    out.push(tagged("chain", "equation", "airy", &(airy.lhs - p("u1 + u^2 + x"))));
    let pvf = chain_equation(&[p("2*v1"), p("4*v"), DiffPoly::zero(), one.clone()], &one).expect("monic");
    out.push(tagged("chain", "equation", "pvf", &(pvf.lhs - p("u2 + 3*u*u1 + u^3 + 4*v*u + 2*v1"))));

    let mut s = params.scope();
    let k = s.real("k", 1.0)?;
    let tol = s.tol()?;
    let grid = uniform_grid(0.0, 2.0, 41);
    let n = 3usize;
    s.fixed("n", n);
    // y = 1 + x + x^2/2 + x^3/6 stays positive on the grid
    let names: Vec<String> = std::iter::once("u".to_string()).chain((1..=n).map(|j| format!("u{j}"))).collect();
    let states = grid
        .iter()
        .map(|&x| {
            let y = Taylor::from_derivatives(&[1.0 + x + x * x / 2.0 + x.powi(3) / 6.0, 1.0 + x + x * x / 2.0, 1.0 + x, 1.0, 0.0]);
            let base = Taylor::from_derivatives(&y.derivatives()[..=n]);
            (&y.differentiate() / &base).scale(1.0 / k).derivatives()
        })
        .collect();
    let traj = Trajectory::from_samples(names, grid.clone(), states);
    let env = Env::new().with_const("k", k);
    let r = residual_columns(&chain_n(n as u32, &DiffPoly::sym("k")), &traj, &env, tol)?;
    out.push(Entry::numeric("chain", s.params_with(&[("equation", "linearization".into())]), &grid, &r));
    Ok(out)
}

pub fn chain_identities(_: &Params) -> Result<Vec<Entry>, CliError> {
    Ok(IdentityName::ALL
        .iter()
        .map(|name| tagged("chain-identities", "identity", name, &check_identity(*name)))
        .collect())
}

/// Lenard recursions, the flow, the Miura map and the rescaling that links
/// the two recursions.
pub fn lenard(_: &Params) -> Result<Vec<Entry>, CliError> {
    let g = kdv_gradients(5)?;
    let j = lenard_j(4)?;
    let mut out = vec![
        tagged("lenard", "member", "g3", &(g.get(3).unwrap() - &p("1/2*u^2 + u2"))),
        tagged("lenard", "member", "J2", &(j.get(2).unwrap() - &p("u2 + 3*u^2"))),
        tagged("lenard", "member", "J3", &(j.get(3).unwrap() - &p("u4 + 10*u*u2 + 5*u1^2 + 10*u^3"))),
        tagged("lenard", "member", "flow2", &(kdv_flow_rhs(2)? - p("u3 + u*u1"))),
        tagged("lenard", "member", "miura-u", &(miura(&p("u")) - pv("v1 - v^2"))),
    ];
    let six_u = DiffPoly::int(6) * DiffPoly::dep("u", 0);
    for m in 1..=3 {
        let diff = substitute(g.get(m + 1).unwrap(), "u", &six_u) - DiffPoly::int(6) * j.get(m).unwrap();
        out.push(tagged("lenard", "rescaling", m, &diff));
    }
    let consistent = g.is_consistent() && j.is_consistent();
    let flag = if consistent { DiffPoly::zero() } else { DiffPoly::one() };
    out.push(tagged("lenard", "member", "recursion", &flag));
    Ok(out)
}

pub fn pii_hierarchy(_: &Params) -> Result<Vec<Entry>, CliError> {
    let p1 = pii_n(1, "beta")?;
    let mut out = vec![tagged("pii-hierarchy", "n", 1, &(&p1 - &pv("v2 - 2*v^3 - x*v - beta")))];

    // renamed to u and alpha it is the equation the painleve module integrates
    let renamed = substitute(&p1, "v", &DiffPoly::dep("u", 0))
        .replace_symbol(&DiffSymbol::constant("beta"), &DiffPoly::sym("alpha"));
    let pii = DiffPoly::dep("u", 2) - pii_system().lifted(&DiffSymbol::dependent("u", 2));
    out.push(tagged("pii-hierarchy", "n", "1-vs-pii", &(renamed - pii)));

    let p2 = pii_n(2, "beta")?;
    let top = DiffSymbol::dependent("v", 4);
    let lead = p2.partial(&top) - DiffPoly::one();
    let order = if p2.max_order("v") == Some(4) { lead } else { DiffPoly::one() };
    out.push(tagged("pii-hierarchy", "n", 2, &order).note(format!("pii_2 = {p2}")));
    Ok(out)
}
