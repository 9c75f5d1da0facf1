use std::collections::{BTreeSet, HashMap};

use num_traits::ToPrimitive;

use super::poly::DiffPoly;
use super::symbol::{DiffSymbol, SymbolKind};
use super::DiffPolyError;

fn lookup(sym: &DiffSymbol, jet: &HashMap<DiffSymbol, f64>, consts: &HashMap<String, f64>) -> Option<f64> {
    if let Some(v) = jet.get(sym) {
        return Some(*v);
    }
    match sym.kind() {
        SymbolKind::Constant | SymbolKind::Independent => consts.get(sym.base()).copied(),
        _ => None,
    }
}

/// Evaluates `p` at a point of jet space.
///
/// Jet coordinates and `x` are looked up in `jet`; constants (and `x`, as a
/// fallback) in `consts` by name. Coefficients are converted to `f64` only
/// after the monomial has been evaluated.
pub fn eval_jet(
    p: &DiffPoly,
    jet: &HashMap<DiffSymbol, f64>,
    consts: &HashMap<String, f64>,
) -> Result<f64, DiffPolyError> {
    let missing: BTreeSet<String> =
        p.symbols().iter().filter(|s| lookup(s, jet, consts).is_none()).map(|s| s.to_string()).collect();
    if !missing.is_empty() {
        return Err(DiffPolyError::MissingSymbol(missing.into_iter().collect()));
    }
    let mut total = 0.0;
    for (m, c) in p.terms() {
        let mut v = 1.0;
        for (s, e) in m.factors() {
            v *= lookup(s, jet, consts).unwrap().powi(*e as i32);
        }
        total += c.to_f64().unwrap_or(f64::NAN) * v;
    }
    Ok(total)
}

/// A [`DiffPoly`] lowered to flat `f64` form over a fixed slot layout.
///
/// Constants are folded in at compile time; every remaining symbol must be
/// one of `slots`, and [`CompiledPoly::eval`] takes values in that order.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &DiffPoly, slots: &[DiffSymbol], consts: &HashMap<String, f64>) -> Result<Self, DiffPolyError> {
        let index: HashMap<&DiffSymbol, usize> = slots.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut missing = BTreeSet::new();
        let mut terms = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut coef = c.to_f64().unwrap_or(f64::NAN);
            let mut factors = Vec::new();
            for (s, e) in m.factors() {
                if let Some(&i) = index.get(s) {
                    factors.push((i, *e as i32));
                } else if let Some(v) = lookup(s, &HashMap::new(), consts) {
                    coef *= v.powi(*e as i32);
                } else {
                    missing.insert(s.to_string());
                }
            }
            terms.push((coef, factors));
        }
        if !missing.is_empty() {
            return Err(DiffPolyError::MissingSymbol(missing.into_iter().collect()));
        }
        Ok(CompiledPoly { terms })
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, fs)| fs.iter().fold(*c, |acc, &(i, e)| acc * if e == 1 { values[i] } else { values[i].powi(e) }))
            .sum()
    }
}
