use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::Monomial;
use super::symbol::DiffSymbol;
use super::Rational;

/// Polynomial in jet symbols with exact rational coefficients.
///
/// The term map never stores a zero coefficient, so structural equality is
/// equality of polynomials.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        DiffPoly::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        DiffPoly::constant(rat(n, d))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        DiffPoly { terms }
    }

    pub fn var(sym: DiffSymbol) -> Self {
        DiffPoly::term(Rational::one(), Monomial::var(sym))
    }

    /// `x`
    pub fn x() -> Self {
        DiffPoly::var(DiffSymbol::independent())
    }

    /// Dependent jet variable `name_order`.
    pub fn dep(name: &str, order: u32) -> Self {
        DiffPoly::var(DiffSymbol::dependent(name, order))
    }

    /// Coefficient jet variable `name_order`.
    pub fn coef(name: &str, order: u32) -> Self {
        DiffPoly::var(DiffSymbol::coefficient(name, order))
    }

    /// Constant symbol `name`.
    pub fn sym(name: &str) -> Self {
        DiffPoly::var(DiffSymbol::constant(name))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient magnitudes as floats, in term order.
    pub fn coefficient_magnitudes(&self) -> Vec<f64> {
        self.terms.values().map(|c| c.abs().to_f64().unwrap_or(f64::INFINITY)).collect()
    }

    /// The coefficient of the empty monomial.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn add_term(&mut self, c: Rational, m: Monomial) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(t, k)| (t.mul(m), k * c)).collect() }
    }

    pub fn pow(&self, exp: u32) -> DiffPoly {
        let mut out = DiffPoly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        out
    }

    pub fn symbols(&self) -> BTreeSet<DiffSymbol> {
        self.terms.keys().flat_map(|m| m.symbols().cloned()).collect()
    }

    /// Highest derivative order of `base` appearing, if any.
    pub fn max_order(&self, base: &str) -> Option<u32> {
        self.symbols().iter().filter(|s| s.kind().is_jet() && s.base() == base).map(|s| s.order()).max()
    }

    pub fn contains(&self, sym: &DiffSymbol) -> bool {
        self.terms.keys().any(|m| m.exponent(sym) > 0)
    }

    /// Degree in a single symbol.
    pub fn degree_in(&self, sym: &DiffSymbol) -> u32 {
        self.terms.keys().map(|m| m.exponent(sym)).max().unwrap_or(0)
    }

    /// Partial derivative with respect to one jet coordinate.
    pub fn partial(&self, sym: &DiffSymbol) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(sym);
            if e > 0 {
                let m2 = rest.mul(&Monomial::power(sym.clone(), e - 1));
                out.add_term(c * int(e as i64), m2);
            }
        }
        out
    }

    /// Replaces every occurrence of `sym` by `q` (no derivatives taken).
    pub fn replace_symbol(&self, sym: &DiffSymbol, q: &DiffPoly) -> DiffPoly {
        let mut powers: Vec<DiffPoly> = vec![DiffPoly::one()];
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            let (e, rest) = m.split_off(sym);
            if e == 0 {
                out.add_term(c.clone(), rest);
                continue;
            }
            while powers.len() <= e as usize {
                let next = powers.last().unwrap() * q;
                powers.push(next);
            }
            out += &powers[e as usize].mul_monomial(c, &rest);
        }
        out
    }

    /// Applies a symbol-wise map and re-canonicalises.
    pub fn map_terms(&self, mut f: impl FnMut(&Monomial, &Rational) -> DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in &self.terms {
            out += &f(m, c);
        }
        out
    }

    /// Multiplies each monomial by `(-1)^(total derivative order)`: the
    /// action of the reflection `x -> -x` on a polynomial free of `x`.
    pub fn reflect(&self) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    let c = if m.derivative_weight() % 2 == 1 { -c.clone() } else { c.clone() };
                    (m.clone(), c)
                })
                .collect(),
        }
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl From<i64> for DiffPoly {
    fn from(n: i64) -> Self {
        DiffPoly::int(n)
    }
}

impl From<DiffSymbol> for DiffPoly {
    fn from(s: DiffSymbol) -> Self {
        DiffPoly::var(s)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(c.clone(), m.clone());
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(-c.clone(), m.clone());
        }
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;
    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ca * cb, ma.mul(mb));
            }
        }
        out
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&DiffPoly> for DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: &DiffPoly) -> DiffPoly {
                (&self).$method(rhs)
            }
        }
        impl $tr<DiffPoly> for &DiffPoly {
            type Output = DiffPoly;
            fn $method(self, rhs: DiffPoly) -> DiffPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for DiffPoly {
    type Output = DiffPoly;
    fn neg(self) -> DiffPoly {
        -&self
    }
}

impl AddAssign<DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        *self += &rhs;
    }
}

impl SubAssign<DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        *self -= &rhs;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let u = DiffPoly::dep("u", 0);
        let p = &u + &DiffPoly::int(1);
        let q = &p - &u;
        assert_eq!(q, DiffPoly::one());
        assert!((&p - &p).is_zero());
        assert_eq!((&p - &p).len(), 0);
    }

    #[test]
    fn binomial_square() {
        let u = DiffPoly::dep("u", 0);
        let u1 = DiffPoly::dep("u", 1);
        let s = (&u + &u1).pow(2);
        let expected = &(&u * &u + &(&u * &u1).scale(&int(2))) + &(&u1 * &u1);
        assert_eq!(s, expected);
    }

    #[test]
    fn partial_and_replace() {
        let u = DiffSymbol::dependent("u", 0);
        let p = DiffPoly::var(u.clone()).pow(3).scale(&rat(1, 6));
        assert_eq!(p.partial(&u), DiffPoly::var(u.clone()).pow(2).scale(&rat(1, 2)));
        let r = p.replace_symbol(&u, &DiffPoly::int(2));
        assert_eq!(r, DiffPoly::rat(4, 3));
    }

    #[test]
    fn reflection_flips_odd_weights() {
        let u1 = DiffPoly::dep("u", 1);
        let u2 = DiffPoly::dep("u", 2);
        let p = &u1 + &u2;
        assert_eq!(p.reflect(), &u2 - &u1);
    }
}
