use std::collections::BTreeMap;

use rand::Rng;

use riccati_core::numerics::ResidualReport;
use riccati_core::painleve::{
    airy_riccati, hill_from_h as hill_check, pii_from_airy, pii_hamiltonian as pii_ham, sd_pii_check,
    sd_pii_recover, AirySign, HFunction, PiiHamiltonian, PiiIcs, PiiProblem,
};

use super::{opts, rng, DEFAULT_SEED};
use crate::params::Scope;
use crate::report::Entry;
use crate::{CliError, Params};

const CONSISTENCY_TOL: f64 = 1e-9;

fn with(base: &BTreeMap<String, String>, extra: &[(&str, &str)]) -> BTreeMap<String, String> {
    let mut p = base.clone();
    for (k, v) in extra {
        p.insert(k.to_string(), v.to_string());
    }
    p
}

fn pole_note(r: &PiiHamiltonian) -> Option<String> {
    r.pole.map(|p| format!("pole near x = {p:.6}; window ends at {}", r.trajectory.x1()))
}

/// Airy seed, its rescaling to PII with alpha = -1/2, and the comparison
/// with a direct integration.
pub fn pii_airy(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let ics = s.reals_n::<2>("ics", "1,0")?;
    let domain = s.domain((0.0, 5.0))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let mut out = Vec::new();
    for sign in s.signs()? {
        let (sg, label) = if sign > 0.0 { (AirySign::Plus, "+1") } else { (AirySign::Minus, "-1") };
        let a = airy_riccati(ics, domain, n, sg, &opts(), tol)?;
        let mut e = Entry::numeric("pii-airy", with(&s.params(), &[("part", "airy"), ("sign", label)]), &a.solution.grid, &a.report);
        if let Some(root) = a.root {
            e = e.note(format!("psi vanishes near x = {root:.6}; domain trimmed"));
        }
        out.push(e);
    }
    let r = pii_from_airy(ics, domain, n, &opts(), tol)?;
    let base = s.params();
    let scaling = format!("|mu^3 - 2| = {:.1e}, |lambda mu - 1| = {:.1e}", r.scaling_error.0, r.scaling_error.1);
    out.push(Entry::numeric("pii-airy", with(&base, &[("part", "intermediate")]), &r.solution.grid, &r.intermediate).note(scaling));
    out.push(
        Entry::numeric("pii-airy", with(&base, &[("part", "direct")]), &r.solution.grid, &r.deviation)
            .note("max |u - u_direct| against PII with alpha = -1/2"),
    );
    Ok(out)
}

/// Ten seeded `(alpha, u, w)` runs plus the run given by the flags.
pub fn pii_hamiltonian(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let alpha = s.real("alpha", 0.0)?;
    let ics = s.reals_n::<2>("ics", "0,1")?;
    let domain = s.domain((0.0, 2.0))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let seed = s.seed(DEFAULT_SEED)?;
    let base = s.params();

    let prob = PiiProblem::new(alpha, PiiIcs::Hamiltonian { u: ics[0], w: ics[1] }, domain, n);
    let r = pii_ham(&prob, &opts(), tol, tol)?;
    let grid = r.trajectory.grid.clone();
    let mut out = Vec::new();
    for (part, rep) in [("pii", &r.pii), ("direct", &r.direct), ("energy", &r.energy)] {
        let e = Entry::numeric("pii-hamiltonian", with(&base, &[("part", part), ("run", "given")]), &grid, rep);
        out.push(e.notes(pole_note(&r)));
    }

    let mut g = rng(seed);
    let mut parts: [Vec<ResidualReport>; 3] = Default::default();
    let mut poles = 0;
    for _ in 0..10 {
        let a = g.random_range(-1.0..1.0);
        let (u, w) = (g.random_range(-0.5..0.5), g.random_range(-0.5..0.5));
        let p = PiiProblem::new(a, PiiIcs::Hamiltonian { u, w }, domain, n);
        let r = pii_ham(&p, &opts(), tol, tol)?;
        poles += usize::from(r.pole.is_some());
        parts[0].push(r.pii);
        parts[1].push(r.direct);
        parts[2].push(r.energy);
    }
    let seeded = with(&base, &[("run", "seeded")]);
    for (part, reps) in ["pii", "direct", "energy"].iter().zip(&parts) {
        let t = reps[0].tolerance;
        let e = Entry::numeric("pii-hamiltonian", with(&seeded, &[("part", part)]), &grid, &ResidualReport::merge(reps, t))
            .note(format!("10 seeded runs, {poles} windowed before a pole; grid shown is the given run's"));
        out.push(e);
    }
    Ok(out)
}

fn h_function(s: &mut Scope, tol: f64) -> Result<(HFunction, ResidualReport, ResidualReport, PiiHamiltonian), CliError> {
    let alpha = s.real("alpha", 0.0)?;
    let ics = s.reals_n::<2>("ics", "0,1")?;
    let domain = s.domain((0.0, 2.0))?;
    let n = s.grid(101)?;
    let prob = PiiProblem::new(alpha, PiiIcs::Hamiltonian { u: ics[0], w: ics[1] }, domain, n);
    let r = pii_ham(&prob, &opts(), tol, tol)?;
    let (hf, rel, cons) = sd_pii_check(&r.trajectory, alpha, tol, CONSISTENCY_TOL)?;
    Ok((hf, rel, cons, r))
}

/// Second-degree relation for `h`, the chain-rule consistency of `h'`, and
/// recovery of `(u, w)` from `h`.
pub fn sd_pii(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let tol = s.tol()?;
    let (hf, rel, cons, r) = h_function(&mut s, tol)?;
    let base = s.params();
    let grid = &hf.grid;
    let mut out = vec![
        Entry::numeric("sd-pii", with(&base, &[("part", "relation")]), grid, &rel).notes(pole_note(&r)),
        Entry::numeric("sd-pii", with(&base, &[("part", "consistency")]), grid, &cons)
            .note("chain-rule h' against -w/2"),
    ];
    match sd_pii_recover(&hf, tol) {
        Ok(rec) => {
            let discrepancy = format!(
                "recovery uses (2h'' + alpha + 1/2)/(4h'); the variant with x/2 in place of 1/2 differs by max {:.3e}",
                rec.alternative_mismatch
            );
            out.push(
                Entry::numeric("sd-pii", with(&base, &[("part", "recovery")]), grid, &rec.deviation)
                    .note(discrepancy)
                    .notes(rec.notes),
            );
            out.push(Entry::numeric("sd-pii", with(&base, &[("part", "recovery-system")]), grid, &rec.system));
        }
        Err(e) => {
            let note = format!("recovery not possible: {e}");
            out.push(Entry { params: with(&base, &[("part", "recovery")]), ..Entry::failed("sd-pii", note) });
        }
    }
    Ok(out)
}

/// Hill equation built from `h'`, with a shifted `h'` as negative control.
pub fn hill_from_h(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let tol = s.tol()?;
    let (hf, _, _, _) = h_function(&mut s, tol)?;
    let base = s.params();
    let good = hill_check(&hf, &opts(), tol)?;
    let bad = hill_check(&hf.perturbed(0.1), &opts(), tol)?;
    Ok(vec![
        Entry::numeric("hill-from-h", with(&base, &[("part", "momentum")]), &hf.grid, &good.report).notes(good.notes),
        Entry::numeric("hill-from-h", with(&base, &[("part", "quotient")]), &hf.grid, &good.deviation),
        Entry::control("hill-from-h", with(&base, &[("control", "h'+0.1")]), &hf.grid, &bad.report, 1e-2),
    ])
}
