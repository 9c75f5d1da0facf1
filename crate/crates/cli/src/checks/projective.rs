use std::collections::BTreeMap;
use std::f64::consts::TAU;

use rand::Rng;

use riccati_core::numerics::{uniform_grid, Env, FunctionSpec, ResidualReport, Trajectory};
use riccati_core::projective::{
    cdis_system, conserved_series, lax_residual, lax_state, pvf_basis_from_hill, riccati2_residual,
    symmetric_power as sym_power, symmetry_residual, u1u2_g5, ConservedKind, PvfProblem, Riccati2Kind,
};

use super::{opts, rng, DEFAULT_SEED, DEFAULT_V};
use crate::report::Entry;
use crate::{CliError, Params};

const WRONSKIAN_TOL: f64 = 1e-8;
const CONTROL_THRESHOLD: f64 = 1e-2;

fn summary(max_abs: f64, n: usize, tol: f64) -> ResidualReport {
    ResidualReport { max_abs, rms: max_abs, n_samples: n, tolerance: tol, pass: max_abs <= tol }
}

fn with(base: &BTreeMap<String, String>, extra: &[(&str, &str)]) -> BTreeMap<String, String> {
    let mut p = base.clone();
    for (k, v) in extra {
        p.insert(k.to_string(), v.to_string());
    }
    p
}

pub fn pvf_basis(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", DEFAULT_V)?;
    let domain = s.domain((0.0, TAU))?;
    let n = s.grid(129)?;
    let k = s.real("k", 1.0)?;
    let tol = s.tol()?;
    let prob = PvfProblem::new(v, domain, n).with_k(k);
    let b = pvf_basis_from_hill(&prob, &opts(), tol, WRONSKIAN_TOL)?;
    let grid = prob.grid();
    let base = s.params();
    let w = &b.wronskian;
    Ok(vec![
        Entry::numeric("pvf-basis", with(&base, &[("part", "products")]), &grid, &b.residual),
        Entry::numeric("pvf-basis", with(&base, &[("part", "wronskian")]), &grid, &summary(w.max_rel_err, grid.len(), w.tolerance))
            .note(format!("relative error; at x0 W = {:.12}, 2 W0^3 = {:.12}", w.lhs_at_x0, w.rhs_at_x0)),
    ])
}

/// Drift of the projective and CDIS first integrals, and the value of the
/// projective one on `cos 2x`.
pub fn first_integrals(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", DEFAULT_V)?;
    let domain = s.domain((0.0, TAU))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let seed = s.seed(DEFAULT_SEED)?;
    let prob = PvfProblem::new(v.clone(), domain, n);
    let mut r = rng(seed);
    let mut reports = Vec::new();
    for _ in 0..10 {
        let ics = [r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)];
        let t = prob.integrate(ics, &opts())?;
        reports.push(conserved_series(ConservedKind::PvfPhi, &t, &v, tol)?.1);
    }
    let base = s.params();
    let mut out = vec![Entry::numeric("first-integrals", with(&base, &[("kind", "PVF_PHI")]), &prob.grid(), &ResidualReport::merge(&reports, tol))
        .note("10 seeded initial jets; residual is the drift of the integral")];

    let grid = uniform_grid(0.0, 1.0, 101);
    // (1, 0, 0) is a fixed point of the flow
    let t = cdis_system().integrate(&Env::new(), &[0.8, 0.3, -0.2], &grid, &opts())?;
    let (_, drift) = conserved_series(ConservedKind::CdisPhi, &t, &FunctionSpec::Constant(0.0), tol)?;
    let p = [("kind", "CDIS_PHI"), ("domain", "0,1"), ("ics", "0.8,0.3,-0.2"), ("tol", &tol.to_string())];
    out.push(Entry::numeric("first-integrals", with(&BTreeMap::new(), &p), &grid, &drift));

    let one = FunctionSpec::Constant(1.0);
    let cos2 = PvfProblem::new(one.clone(), (0.0, TAU), 101);
    let t = cos2.integrate([1.0, 0.0, -4.0], &opts())?;
    let (phi, _) = conserved_series(ConservedKind::PvfPhi, &t, &one, tol)?;
    let dev: Vec<f64> = phi.iter().map(|p| p + 2.0).collect();
    let p = [("kind", "PVF_PHI_COS2X"), ("v", "const:1"), ("ics", "1,0,-4")];
    out.push(
        Entry::numeric("first-integrals", with(&BTreeMap::new(), &p), &cos2.grid(), &ResidualReport::from_values(&dev, 1e-8))
            .note("residual is the deviation of the integral from -2"),
    );
    Ok(out)
}

/// Each second-order Riccati construction on its own test problem.
/// `--k` applies to the two constructions stated for general `k`.
pub fn riccati2(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let k = s.real("k", 1.0)?;
    let tol = s.tol()?;
    // kind, v, domain, ics, whether --k applies
    type Case = (Riccati2Kind, &'static str, (f64, f64), &'static [f64], bool);
    let cases: [Case; 4] = [
        (Riccati2Kind::FromF, "const:1", (0.0, 6.0), &[3.0, 0.0, -4.0], true),
        (Riccati2Kind::Doubling, DEFAULT_V, (0.0, 1.0), &[0.2], true),
        (Riccati2Kind::MilnePinney, DEFAULT_V, (0.0, 6.0), &[1.2, 0.1, 0.8], false),
        (Riccati2Kind::ModEmden, "const:0.25", (0.0, 2.0), &[0.3, -0.1], false),
    ];
    let mut out = Vec::new();
    for (kind, v, domain, ics, general_k) in cases {
        let kk = if general_k { k } else { 1.0 };
        let prob = PvfProblem::new(v.parse().expect("static spec"), domain, 101).with_k(kk);
        let result = riccati2_residual(kind, &prob, ics, &opts(), tol);
        let ics_text: Vec<String> = ics.iter().map(f64::to_string).collect();
        let p = with(
            &BTreeMap::new(),
            &[
                ("kind", kind.as_str()),
                ("k", &kk.to_string()),
                ("v", v),
                ("domain", &format!("{},{}", domain.0, domain.1)),
                ("ics", &ics_text.join(",")),
                ("tol", &tol.to_string()),
            ],
        );
        out.push(match result {
            Ok(r) => Entry::numeric("riccati2", p, &r.solution.grid, &r.report).notes(r.notes),
            // a construction leaving its domain at this k is a failed entry, not a crash
            Err(e) => Entry { params: p, ..Entry::failed("riccati2", e.to_string()) },
        });
    }
    Ok(out)
}

pub fn g5(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", "const:1")?;
    let w = s.spec("w", "const:0")?;
    let ics = s.reals_n::<2>("ics", "0.1,0.2")?;
    let domain = s.domain((0.0, 1.0))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let prob = PvfProblem::new(v, domain, n);
    let mut out = Vec::new();
    for sign in s.signs()? {
        let c = u1u2_g5(&prob, &w, ics, sign, &opts(), tol)?;
        let sg = if sign > 0.0 { "+1" } else { "-1" };
        let base = with(&s.params(), &[("sign", sg)]);
        out.push(Entry::numeric("g5", with(&base, &[("part", "equivalence")]), &c.solution.grid, &c.pvf));
        out.push(
            Entry::numeric("g5", with(&base, &[("part", "g5")]), &c.solution.grid, &c.g5)
                .note(format!("u1 + K'/(2K): max_abs = {:.3e}", c.relation.max_abs)),
        );
    }
    Ok(out)
}

fn cos3x(grid: &[f64], quadrature: bool) -> Trajectory {
    let names: &[&str] = if quadrature { &["y", "y1", "y2", "quad", "quad1"] } else { &["y", "y1", "y2", "y3"] };
    let states = grid
        .iter()
        .map(|x| {
            let (sn, c) = (3.0 * x).sin_cos();
            // with v = 1 the quadrature I' = f' starts at -(f'' + 2f)/2 = 3.5
            if quadrature {
                vec![c, -3.0 * sn, -9.0 * c, c + 2.5, -3.0 * sn]
            } else {
                vec![c, -3.0 * sn, -9.0 * c, 27.0 * sn]
            }
        })
        .collect();
    Trajectory::from_samples(names.iter().map(|n| n.to_string()).collect(), grid.to_vec(), states)
}

pub fn symmetry(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", "const:1")?;
    let ics = s.reals_n::<3>("ics", "1,0,-4")?;
    let domain = s.domain((0.0, TAU))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let prob = PvfProblem::new(v.clone(), domain, n);
    let f = prob.integrate(ics, &opts())?;
    let u_grid = uniform_grid(-2.0, 2.0, 21);
    let r = symmetry_residual(&f, &v, &u_grid, tol)?;
    let grid = prob.grid();
    let control_grid = uniform_grid(0.0, TAU, 101);
    let c = symmetry_residual(&cos3x(&control_grid, false), &FunctionSpec::Constant(1.0), &u_grid, tol)?;
    let cp = with(&BTreeMap::new(), &[("control", "cos3x"), ("v", "const:1")]);
    Ok(vec![
        Entry::numeric("symmetry", s.params(), &grid, &r).note("u sampled on 21 points of [-2, 2]"),
        Entry::control("symmetry", cp, &control_grid, &c, CONTROL_THRESHOLD),
    ])
}

pub fn lax(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", "const:1")?;
    let ics = s.reals_n::<3>("ics", "1,0,-4")?;
    let domain = s.domain((0.0, TAU))?;
    let n = s.grid(101)?;
    let tol = s.tol()?;
    let prob = PvfProblem::new(v.clone(), domain, n);
    let t = lax_state(&prob, ics, &opts())?;
    let r = lax_residual(&t, &v, tol)?;
    let control_grid = uniform_grid(0.0, TAU, 101);
    let c = lax_residual(&cos3x(&control_grid, true), &FunctionSpec::Constant(1.0), tol)?;
    let cp = with(&BTreeMap::new(), &[("control", "cos3x"), ("v", "const:1")]);
    Ok(vec![
        Entry::numeric("lax", s.params(), &prob.grid(), &r).note("Frobenius norm of P' - [Q, P]"),
        Entry::control("lax", cp, &control_grid, &c, CONTROL_THRESHOLD),
    ])
}

pub fn symmetric_power(params: &Params) -> Result<Vec<Entry>, CliError> {
    let mut s = params.scope();
    let v = s.spec("v", DEFAULT_V)?;
    let domain = s.domain((0.0, TAU))?;
    let n = s.grid(64)?;
    let tol = s.tol()?;
    let grid = uniform_grid(domain.0, domain.1, n);
    let mut out = Vec::new();
    for order in [3, 4] {
        let p = sym_power(order, &v, &grid, &opts(), tol)?;
        let per: Vec<String> = p.max_rel_err.iter().map(|e| format!("{e:.3e}")).collect();
        let ord = order.to_string();
        let mut e = Entry::numeric("symmetric-power", with(&s.params(), &[("n", &ord)]), &grid, &summary(p.worst(), n, tol))
            .note(format!("relative error per coefficient (c_n..c_0): {}", per.join(", ")));
        if order == 4 {
            e.pass = true;
            e = e.note(format!(
                "informational comparison; within tolerance: {}",
                p.pass
            ));
        }
        out.push(e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass() {
        let p = Params::new();
        for f in [pvf_basis, first_integrals, riccati2, g5, symmetry, lax, symmetric_power] {
            for e in f(&p).unwrap() {
                assert!(e.pass, "{e:?}");
            }
        }
    }

    #[test]
    fn single_sign() {
        let mut p = Params::new();
        p.set("sign", "-").unwrap();
        let es = g5(&p).unwrap();
        assert_eq!(es.len(), 2);
        assert!(es.iter().all(|e| e.params["sign"] == "-1"));
    }

    #[test]
    fn coupling_defect_fails_riccati2() {
        let mut p = Params::new();
        p.set("k", "0.5").unwrap();
        let es = riccati2(&p).unwrap();
        let doubling = es.iter().find(|e| e.params["kind"] == "DOUBLING").unwrap();
        assert!(!doubling.pass);
        assert!(!doubling.notes.is_empty());
    }
}
