//! KdV and PII hierarchies: Lenard recursions on gradients, the Miura map
//! and the PII hierarchy members.

use crate::diffpoly::{
    anti_d, apply_operator, d_total, is_total_derivative, shifted_derivative, substitute, DiffPoly, DiffPolyError,
    DiffSymbol,
};

#[derive(Clone, Debug, thiserror::Error)]
pub enum HierarchyError {
    #[error("{0}")]
    InvalidOrder(String),
    #[error("Lenard step is not a total derivative: {0}")]
    NotExact(String),
    #[error(transparent)]
    DiffPoly(#[from] DiffPolyError),
}

fn u(j: u32) -> DiffPoly {
    DiffPoly::dep("u", j)
}

/// `D^3 + (2/3) u D + (1/3) u1` as coefficients of `D^0..D^3`.
pub fn gradient_operator() -> [DiffPoly; 4] {
    [DiffPoly::rat(1, 3) * u(1), DiffPoly::rat(2, 3) * u(0), DiffPoly::zero(), DiffPoly::one()]
}

/// `D^3 + 4u D + 2u1`.
pub fn j_operator() -> [DiffPoly; 4] {
    [DiffPoly::int(2) * u(1), DiffPoly::int(4) * u(0), DiffPoly::zero(), DiffPoly::one()]
}

/// One exact Lenard step: the antiderivative of `op(p)`, after checking
/// that the image is a total derivative.
fn lenard_step(op: &[DiffPoly], p: &DiffPoly) -> Result<DiffPoly, HierarchyError> {
    let image = apply_operator(op, p);
    if !is_total_derivative(&image) {
        return Err(HierarchyError::NotExact(image.to_string()));
    }
    Ok(anti_d(&image)?)
}

/// Gradients `g_2 = u, g_3, ..., g_n` of the KdV conserved densities.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientSequence {
    gradients: Vec<DiffPoly>,
}

impl GradientSequence {
    /// `g_m` for `2 <= m <= n`.
    pub fn get(&self, m: usize) -> Option<&DiffPoly> {
        m.checked_sub(2).and_then(|i| self.gradients.get(i))
    }

    /// Highest stored index `n`.
    pub fn last_index(&self) -> usize {
        self.gradients.len() + 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DiffPoly)> {
        self.gradients.iter().enumerate().map(|(i, g)| (i + 2, g))
    }

    /// Checks `D g_(m+1) = (D^3 + (2/3) u D + (1/3) u1) g_m` for all stored pairs.
    pub fn is_consistent(&self) -> bool {
        let op = gradient_operator();
        self.gradients.windows(2).all(|w| d_total(&w[1]) == apply_operator(&op, &w[0]))
    }
}

pub fn kdv_gradients(n: usize) -> Result<GradientSequence, HierarchyError> {
    if n < 2 {
        return Err(HierarchyError::InvalidOrder(format!("kdv_gradients needs n >= 2, got {n}")));
    }
    let op = gradient_operator();
    let mut gradients = vec![u(0)];
    while gradients.len() < n - 1 {
        let next = lenard_step(&op, gradients.last().unwrap())?;
        gradients.push(next);
    }
    Ok(GradientSequence { gradients })
}

/// `J_1 = u, J_2, ..., J_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct JSequence {
    members: Vec<DiffPoly>,
}

impl JSequence {
    /// `J_m` for `1 <= m <= n`.
    pub fn get(&self, m: usize) -> Option<&DiffPoly> {
        m.checked_sub(1).and_then(|i| self.members.get(i))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &DiffPoly)> {
        self.members.iter().enumerate().map(|(i, j)| (i + 1, j))
    }

    /// Checks `D J_(m+1) = (D^3 + 4u D + 2u1) J_m` for all stored pairs.
    pub fn is_consistent(&self) -> bool {
        let op = j_operator();
        self.members.windows(2).all(|w| d_total(&w[1]) == apply_operator(&op, &w[0]))
    }
}

pub fn lenard_j(n: usize) -> Result<JSequence, HierarchyError> {
    if n < 1 {
        return Err(HierarchyError::InvalidOrder("lenard_j needs n >= 1".into()));
    }
    let op = j_operator();
    let mut members = vec![u(0)];
    while members.len() < n {
        let next = lenard_step(&op, members.last().unwrap())?;
        members.push(next);
    }
    Ok(JSequence { members })
}

/// `v1 - v^2` with `v` a dependent variable.
pub fn miura_map() -> DiffPoly {
    DiffPoly::dep("v", 1) - DiffPoly::dep("v", 0).pow(2)
}

/// Substitutes `u = v1 - v^2` into `p`.
pub fn miura(p: &DiffPoly) -> DiffPoly {
    substitute(p, "u", &miura_map())
}

/// `(D + 2v) J_n(v1 - v^2) - x v - beta`.
pub fn pii_n(n: usize, beta: &str) -> Result<DiffPoly, HierarchyError> {
    if n < 1 {
        return Err(HierarchyError::InvalidOrder("pii_n needs n >= 1".into()));
    }
    let js = lenard_j(n)?;
    let v = DiffPoly::dep("v", 0);
    let jn = miura(js.get(n).unwrap());
    let beta = DiffPoly::var(DiffSymbol::constant(beta));
    Ok(shifted_derivative(&(DiffPoly::int(2) * &v), &jn) - DiffPoly::x() * v - beta)
}

/// Right-hand side `D g_(n+1)` of the `n`-th KdV flow.
pub fn kdv_flow_rhs(n: usize) -> Result<DiffPoly, HierarchyError> {
    if n < 2 {
        return Err(HierarchyError::InvalidOrder(format!("kdv_flow_rhs needs n >= 2, got {n}")));
    }
    Ok(d_total(kdv_gradients(n + 1)?.get(n + 1).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::{euler, parse, parse_with, SymbolTable};

    fn p(s: &str) -> DiffPoly {
        parse(s).unwrap()
    }

    fn pv(s: &str) -> DiffPoly {
        parse_with(s, &SymbolTable::default().with_dependent("v").with_constant("beta")).unwrap()
    }

    #[test]
    fn gradients() {
        let g = kdv_gradients(5).unwrap();
        assert_eq!(g.get(2), Some(&p("u")));
        assert_eq!(g.get(3), Some(&p("1/2*u^2 + u2")));
        assert_eq!(g.last_index(), 5);
        assert!(g.get(1).is_none() && g.get(6).is_none());
        assert!(g.is_consistent());
        // g_3 is the gradient of the density u^3/6 - u1^2/2
        assert_eq!(euler(&p("1/6*u^3 - 1/2*u1^2"), "u"), p("1/2*u^2 + u2"));
        assert!(kdv_gradients(1).is_err());
    }

    #[test]
    fn flows() {
        assert_eq!(kdv_flow_rhs(2).unwrap(), p("u3 + u*u1"));
        let f3 = kdv_flow_rhs(3).unwrap();
        assert_eq!(f3.max_order("u"), Some(5));
        assert!(is_total_derivative(&f3));
    }

    #[test]
    fn j_sequence() {
        let j = lenard_j(3).unwrap();
        assert_eq!(j.get(1), Some(&p("u")));
        assert_eq!(j.get(2), Some(&p("u2 + 3*u^2")));
        assert_eq!(j.get(3), Some(&p("u4 + 10*u*u2 + 5*u1^2 + 10*u^3")));
        assert!(j.is_consistent());
        assert_eq!(j.len(), 3);
    }

    #[test]
    fn rescaling_links_the_recursions() {
        let g = kdv_gradients(5).unwrap();
        let j = lenard_j(4).unwrap();
        let six_u = DiffPoly::int(6) * u(0);
        for m in 1..=3 {
            let lhs = substitute(g.get(m + 1).unwrap(), "u", &six_u);
            assert_eq!(lhs, DiffPoly::int(6) * j.get(m).unwrap(), "m = {m}");
        }
        // the operators themselves
        let probe = p("u2*u + u1^3");
        let scaled: Vec<DiffPoly> = gradient_operator().iter().map(|c| substitute(c, "u", &six_u)).collect();
        assert_eq!(apply_operator(&scaled, &probe), apply_operator(&j_operator(), &probe));
    }

    #[test]
    fn miura_examples() {
        assert_eq!(miura(&p("u")), pv("v1 - v^2"));
        assert_eq!(miura(&p("u2")), pv("v3 - 2*v1^2 - 2*v*v2"));
        let j2 = lenard_j(2).unwrap();
        assert_eq!(miura(j2.get(2).unwrap()), pv("v3 - 2*v1^2 - 2*v*v2 + 3*(v1 - v^2)^2"));
    }

    #[test]
    fn pii_members() {
        let p1 = pii_n(1, "beta").unwrap();
        assert_eq!(p1, pv("v2 - 2*v^3 - x*v - beta"));
        // PII u'' = 2u^3 + x u + alpha after renaming v -> u, beta -> alpha
        let renamed = substitute(&p1, "v", &u(0))
            .replace_symbol(&DiffSymbol::constant("beta"), &DiffPoly::var(DiffSymbol::constant("alpha")));
        assert_eq!(renamed, p("u2 - 2*u^3 - x*u - alpha"));
        let p2 = pii_n(2, "beta").unwrap();
        let top = DiffSymbol::dependent("v", 4);
        assert_eq!(p2.max_order("v"), Some(4));
        assert_eq!(p2.partial(&top), DiffPoly::one());
        assert!(pii_n(0, "beta").is_err());
    }
}
