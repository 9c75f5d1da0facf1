use std::cmp::Ordering;
use std::fmt;

use super::symbol::DiffSymbol;

/// A power product of jet symbols, stored sorted by symbol with positive
/// exponents only.
///
/// Monomials are ordered lexicographically with the largest symbol compared
/// first, which puts `u3` ahead of `u*u2` ahead of `u1^2` ahead of `u^4`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial {
    factors: Vec<(DiffSymbol, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(sym: DiffSymbol) -> Self {
        Monomial { factors: vec![(sym, 1)] }
    }

    pub fn power(sym: DiffSymbol, exp: u32) -> Self {
        if exp == 0 {
            Monomial::one()
        } else {
            Monomial { factors: vec![(sym, exp)] }
        }
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (DiffSymbol, u32)>) -> Self {
        factors.into_iter().fold(Monomial::one(), |m, (s, e)| m.mul(&Monomial::power(s, e)))
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(DiffSymbol, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, sym: &DiffSymbol) -> u32 {
        self.factors
            .binary_search_by(|(s, _)| s.cmp(sym))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, ea) = &self.factors[i];
            let (b, eb) = &other.factors[j];
            match a.cmp(b) {
                Ordering::Less => {
                    out.push((a.clone(), *ea));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b.clone(), *eb));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.clone(), ea + eb));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { factors: out }
    }

    /// Returns `(e, m)` with `self = sym^e * m` and `m` free of `sym`.
    pub fn split_off(&self, sym: &DiffSymbol) -> (u32, Monomial) {
        match self.factors.binary_search_by(|(s, _)| s.cmp(sym)) {
            Ok(i) => {
                let mut rest = self.factors.clone();
                let (_, e) = rest.remove(i);
                (e, Monomial { factors: rest })
            }
            Err(_) => (0, self.clone()),
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = &DiffSymbol> {
        self.factors.iter().map(|(s, _)| s)
    }

    /// Sum over factors of derivative order times exponent (the weight used by
    /// the `x -> -x` grading).
    pub fn derivative_weight(&self) -> u32 {
        self.factors.iter().map(|(s, e)| s.order() * e).sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let mut a = self.factors.iter().rev();
        let mut b = other.factors.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb).then(ea.cmp(eb)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                },
            }
        }
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(j: u32) -> DiffSymbol {
        DiffSymbol::dependent("u", j)
    }

    #[test]
    fn lex_order_matches_printing_order() {
        let u3 = Monomial::var(u(3));
        let uu2 = Monomial::var(u(0)).mul(&Monomial::var(u(2)));
        let u1sq = Monomial::power(u(1), 2);
        let u2u1 = Monomial::power(u(0), 2).mul(&Monomial::var(u(1)));
        let u4 = Monomial::power(u(0), 4);
        assert!(u3 > uu2 && uu2 > u1sq && u1sq > u2u1 && u2u1 > u4);
        assert!(u4 > Monomial::one());
    }

    #[test]
    fn mul_merges_exponents() {
        let a = Monomial::from_factors([(u(0), 1), (u(1), 2)]);
        let b = Monomial::from_factors([(u(1), 1), (DiffSymbol::constant("k"), 1)]);
        let p = a.mul(&b);
        assert_eq!(p.exponent(&u(1)), 3);
        assert_eq!(p.to_string(), "k*u*u1^3");
        let (e, rest) = p.split_off(&u(1));
        assert_eq!(e, 3);
        assert_eq!(rest.to_string(), "k*u");
    }
}
