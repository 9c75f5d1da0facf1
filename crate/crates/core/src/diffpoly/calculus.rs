//! The total derivative and the operations built on it: substitution of a
//! dependent variable, the Euler (variational) operator and formal
//! integration.

use std::collections::{BTreeMap, BTreeSet};

use super::monomial::Monomial;
use super::poly::{int, DiffPoly};
use super::symbol::{DiffSymbol, SymbolKind};
use super::DiffPolyError;

/// Total derivative `D = d/dx` acting on jet coordinates:
/// `D(u_j) = u_{j+1}`, `D(v_j) = v_{j+1}`, `D(x) = 1`, `D(k) = 0`.
pub fn d_total(p: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        for (sym, e) in m.factors() {
            let shifted = match sym.kind() {
                SymbolKind::Constant => continue,
                SymbolKind::Independent => Monomial::one(),
                SymbolKind::Coefficient | SymbolKind::Dependent => Monomial::var(sym.next().unwrap()),
            };
            let (_, rest) = m.split_off(sym);
            let reduced = rest.mul(&Monomial::power(sym.clone(), e - 1)).mul(&shifted);
            out.add_term(c * int(*e as i64), reduced);
        }
    }
    out
}

/// `D^n(p)`.
pub fn d_total_n(p: &DiffPoly, n: u32) -> DiffPoly {
    (0..n).fold(p.clone(), |acc, _| d_total(&acc))
}

fn jet_symbols_of<'a>(p: &'a DiffPoly, base: &'a str) -> impl Iterator<Item = DiffSymbol> + 'a {
    p.symbols().into_iter().filter(move |s| s.kind().is_jet() && s.base() == base)
}

/// Replaces every `base_j` in `p` by `D^j(q)`.
///
/// The replacement is simultaneous: `q` is fixed before the pass and is never
/// substituted into itself, so `q` may mention `base` freely.
pub fn substitute(p: &DiffPoly, base: &str, q: &DiffPoly) -> DiffPoly {
    let max = match jet_symbols_of(p, base).map(|s| s.order()).max() {
        Some(m) => m,
        None => return p.clone(),
    };
    let mut derivs = vec![q.clone()];
    for j in 1..=max as usize {
        let next = d_total(&derivs[j - 1]);
        derivs.push(next);
    }
    let mut powers: BTreeMap<(u32, u32), DiffPoly> = BTreeMap::new();
    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        let mut rest = Monomial::one();
        let mut product = DiffPoly::one();
        for (sym, e) in m.factors() {
            if sym.kind().is_jet() && sym.base() == base {
                let key = (sym.order(), *e);
                let pw = powers
                    .entry(key)
                    .or_insert_with(|| derivs[sym.order() as usize].pow(*e))
                    .clone();
                product = &product * &pw;
            } else {
                rest = rest.mul(&Monomial::power(sym.clone(), *e));
            }
        }
        out += &product.mul_monomial(c, &rest);
    }
    out
}

/// Variational derivative `sum_j (-D)^j (dp / d base_j)`.
pub fn euler(p: &DiffPoly, base: &str) -> DiffPoly {
    let mut out = DiffPoly::zero();
    for sym in jet_symbols_of(p, base).collect::<Vec<_>>() {
        let mut term = p.partial(&sym);
        for _ in 0..sym.order() {
            term = -&d_total(&term);
        }
        out += &term;
    }
    out
}

/// Bases of every jet variable (dependent or coefficient) appearing in `p`.
pub fn jet_bases(p: &DiffPoly) -> BTreeSet<String> {
    p.symbols().into_iter().filter(|s| s.kind().is_jet()).map(|s| s.base().to_string()).collect()
}

/// `true` when every Euler image of `p` vanishes, i.e. `p` is a total
/// derivative.
pub fn is_total_derivative(p: &DiffPoly) -> bool {
    jet_bases(p).iter().all(|b| euler(p, b).is_zero())
}

/// Integrates `p` with respect to a single symbol treated as a polynomial
/// variable: `s^e -> s^(e+1)/(e+1)`.
fn integrate_in(p: &DiffPoly, sym: &DiffSymbol) -> DiffPoly {
    p.map_terms(|m, c| {
        let (e, rest) = m.split_off(sym);
        let m2 = rest.mul(&Monomial::power(sym.clone(), e + 1));
        DiffPoly::term(c / int(e as i64 + 1), m2)
    })
}

/// Formal antiderivative: returns `q` with `D(q) = p` and no constant term.
///
/// The leading jet variable is stripped greedily: if `p` is linear in its top
/// coordinate `s_N` with coefficient `A` (free of order-`N` jets), `A` is
/// integrated in `s_{N-1}`, the derivative of that piece is subtracted and
/// the process repeats. Jet-free remainders are integrated in `x`.
pub fn anti_d(p: &DiffPoly) -> Result<DiffPoly, DiffPolyError> {
    let not_exact = || DiffPolyError::NotExact { poly: p.to_string() };
    let mut rem = p.clone();
    let mut acc = DiffPoly::zero();
    let mut eliminated: BTreeSet<DiffSymbol> = BTreeSet::new();
    let mut level = u32::MAX;

    loop {
        let top = rem
            .symbols()
            .into_iter()
            .filter(|s| s.kind().is_jet())
            .max_by(|a, b| a.order().cmp(&b.order()).then(a.cmp(b)));
        let top = match top {
            None => break,
            Some(t) => t,
        };
        if top.order() == 0 {
            return Err(not_exact());
        }
        if top.order() != level {
            level = top.order();
            eliminated.clear();
        }
        if !eliminated.insert(top.clone()) || rem.degree_in(&top) > 1 {
            return Err(not_exact());
        }
        let a = rem.partial(&top);
        if a.symbols().iter().any(|s| s.kind().is_jet() && s.order() >= level) {
            return Err(not_exact());
        }
        let piece = integrate_in(&a, &top.with_order(level - 1));
        rem -= &d_total(&piece);
        acc += &piece;
    }

    // Only x and constants remain.
    let x = DiffSymbol::independent();
    let piece = integrate_in(&rem, &x);
    acc += &piece;

    let check = d_total(&acc);
    if check != *p {
        return Err(not_exact());
    }
    // Every integrated piece carries at least one symbol, so `acc` has no
    // additive constant.
    Ok(acc)
}

/// Applies the linear differential operator `sum_j c_j D^j` to `p`, where
/// `coeffs[j] = c_j`.
pub fn apply_operator(coeffs: &[DiffPoly], p: &DiffPoly) -> DiffPoly {
    let mut out = DiffPoly::zero();
    let mut dj = p.clone();
    for (j, c) in coeffs.iter().enumerate() {
        if j > 0 {
            dj = d_total(&dj);
        }
        if !c.is_zero() {
            out += &(c * &dj);
        }
    }
    out
}

/// `(D + a)` applied to `p`.
pub fn shifted_derivative(a: &DiffPoly, p: &DiffPoly) -> DiffPoly {
    &d_total(p) + &(a * p)
}
