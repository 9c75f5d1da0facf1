//! The Riccati chain `R^n(u)` with `R = D + k u`, and the exact identities
//! derived from it.

use std::fmt;

use crate::diffpoly::{d_total, substitute, DiffPoly, DiffSymbol, SymbolKind};

/// `R^n(u)`: `R^0 = u`, `R^n = D R^(n-1) + k u R^(n-1)`.
pub fn chain(n: u32, k: &DiffPoly) -> DiffPoly {
    let ku = k * &DiffPoly::dep("u", 0);
    let mut r = DiffPoly::dep("u", 0);
    for _ in 0..n {
        r = &d_total(&r) + &(&ku * &r);
    }
    r
}

/// `chain(n, 1)`.
pub fn chain1(n: u32) -> DiffPoly {
    chain(n, &DiffPoly::one())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ChainError {
    #[error("no coefficients given")]
    EmptyCoefficients,
    #[error("leading coefficient must be the literal 1, got {0}")]
    NotMonic(String),
}

/// The Riccati-chain image of a monic linear equation
/// `a_0 y + a_1 y' + ... + a_(n-1) y^(n-1) + y^(n) = 0` under `y' = k u y`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainEquation {
    /// Order `n` of the linear equation; the equation in `u` has order `n - 1`.
    pub order: u32,
    pub lhs: DiffPoly,
    /// Coefficient-function bases that occur in `lhs`.
    pub coefficients: Vec<String>,
}

impl ChainEquation {
    /// Highest derivative of `u` present (always `order - 1`).
    pub fn u_order(&self) -> u32 {
        self.order - 1
    }
}

impl fmt::Display for ChainEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = 0", self.lhs)
    }
}

/// Builds `a_0 + sum_{j=1..n} a_j R^(j-1)(u)` from `coeffs = [a_0, ..., a_n]`
/// where `a_n` must be the literal 1.
pub fn chain_equation(coeffs: &[DiffPoly], k: &DiffPoly) -> Result<ChainEquation, ChainError> {
    let (last, rest) = coeffs.split_last().ok_or(ChainError::EmptyCoefficients)?;
    if rest.is_empty() {
        return Err(ChainError::EmptyCoefficients);
    }
    if *last != DiffPoly::one() {
        return Err(ChainError::NotMonic(last.to_string()));
    }
    let n = rest.len() as u32;
    let ku = k * &DiffPoly::dep("u", 0);
    let mut lhs = rest[0].clone();
    let mut r = DiffPoly::dep("u", 0);
    for (j, a) in coeffs.iter().enumerate().skip(1) {
        if j > 1 {
            r = &d_total(&r) + &(&ku * &r);
        }
        lhs += &(a * &r);
    }
    let coefficients = lhs
        .symbols()
        .into_iter()
        .filter(|s| s.kind() == SymbolKind::Coefficient)
        .map(|s| s.base().to_string())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(ChainEquation { order: n, lhs, coefficients })
}

/// Identities between chain members and named third- and fourth-order
/// equations. Each one evaluates to the zero polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum IdentityName {
    ChazyIv,
    ChazyXiiSub,
    GenChazyReflect,
    FXii,
    CdisAsPvf,
}

impl IdentityName {
    pub const ALL: [IdentityName; 5] = [
        IdentityName::ChazyIv,
        IdentityName::ChazyXiiSub,
        IdentityName::GenChazyReflect,
        IdentityName::FXii,
        IdentityName::CdisAsPvf,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IdentityName::ChazyIv => "CHAZY_IV",
            IdentityName::ChazyXiiSub => "CHAZY_XII_SUB",
            IdentityName::GenChazyReflect => "GEN_CHAZY_REFLECT",
            IdentityName::FXii => "F_XII",
            IdentityName::CdisAsPvf => "CDIS_AS_PVF",
        }
    }
}

impl fmt::Display for IdentityName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IdentityName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        IdentityName::ALL
            .into_iter()
            .find(|n| n.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown identity {s}"))
    }
}

fn u(j: u32) -> DiffPoly {
    DiffPoly::dep("u", j)
}

fn f(j: u32) -> DiffPoly {
    DiffPoly::dep("f", j)
}

fn v(j: u32) -> DiffPoly {
    DiffPoly::coef("v", j)
}

fn c(n: i64) -> DiffPoly {
    DiffPoly::int(n)
}

/// Left-hand side of the third-order Riccati equation attached to the
/// symmetric cube of a Hill equation (`k = 1`):
/// `R^3(u) + 10 v (u1 + u^2) + 10 v1 u + 9 v^2 + 3 v2`.
pub fn third_order_riccati() -> DiffPoly {
    chain1(3) + c(10) * v(0) * (u(1) + u(0).pow(2)) + c(10) * v(1) * u(0) + c(9) * v(0).pow(2) + c(3) * v(2)
}

/// Left-hand side of the fourth-order Riccati equation attached to the
/// symmetric fourth power of a Hill equation (`k = 1`).
pub fn fourth_order_riccati() -> DiffPoly {
    chain1(4)
        + c(20) * v(0) * chain1(2)
        + c(30) * v(1) * chain1(1)
        + c(18) * v(2) * u(0)
        + c(64) * v(0).pow(2) * u(0)
        + c(4) * v(3)
        + c(64) * v(0) * v(1)
}

/// The generalized Chazy left-hand side `u3 - 2 u u2 + 3 u1^2 - (1/8)(6 u1 - u^2)^2`.
pub fn generalized_chazy() -> DiffPoly {
    u(3) - c(2) * u(0) * u(2) + c(3) * u(1).pow(2)
        - DiffPoly::rat(1, 8) * (c(6) * u(1) - u(0).pow(2)).pow(2)
}

/// Evaluates an identity as `lhs - rhs`.
pub fn check_identity(name: IdentityName) -> DiffPoly {
    match name {
        IdentityName::ChazyIv => {
            d_total(&chain1(2)) - (u(3) + c(3) * u(0) * u(2) + c(3) * u(1).pow(2) + c(3) * u(0).pow(2) * u(1))
        }
        IdentityName::ChazyXiiSub => {
            substitute(&third_order_riccati(), "v", &u(0).pow(2))
                - (u(3) + c(10) * u(0) * u(2) + c(9) * u(1).pow(2) + c(36) * u(0).pow(2) * u(1) + c(20) * u(0).pow(4))
        }
        IdentityName::GenChazyReflect => {
            let doubled = substitute(&generalized_chazy(), "u", &(c(2) * u(0)));
            doubled.reflect() + c(2) * chain1(3)
        }
        IdentityName::FXii => {
            chain1(4)
                - u(0) * chain1(3)
                - (u(4)
                    + c(4) * u(0) * u(3)
                    + c(6) * u(0).pow(2) * u(2)
                    + c(4) * u(0).pow(3) * u(1)
                    + c(12) * u(0) * u(1).pow(2)
                    + c(10) * u(1) * u(2))
        }
        IdentityName::CdisAsPvf => {
            let pvf = f(3) + c(4) * v(0) * f(1) + c(2) * v(1) * f(0);
            let stab = DiffPoly::rat(3, 2) * f(0) * f(1) + DiffPoly::rat(1, 4) * f(0).pow(4);
            substitute(&pvf, "v", &stab)
                - (f(3) + c(3) * f(0).pow(2) * f(2) + c(9) * f(0) * f(1).pow(2) + c(3) * f(0).pow(4) * f(1))
        }
    }
}

/// The fourth-order family obtained by combining chain members with free
/// coefficient functions `A(x), ..., E(x)`:
/// `R^4 + A R^3 + B R^2 + C R^1 + D R^0 + E`.
///
/// Only a template; nothing is asserted about it.
pub fn f_xvi_template() -> DiffPoly {
    let names = ["D", "C", "B", "A"];
    let mut out = chain1(4) + DiffPoly::var(DiffSymbol::coefficient("E", 0));
    for (j, name) in names.iter().enumerate() {
        out += DiffPoly::var(DiffSymbol::coefficient(name, 0)) * chain1(j as u32);
    }
    out
}

/// Common weight of all terms when `u_j` (and any jet `s_j`) has weight
/// `j + 1`; `None` if `p` is not homogeneous. `R^n(u)` has weight `n + 1`.
pub fn weight(p: &DiffPoly) -> Option<u32> {
    let mut w = None;
    for (m, _) in p.terms() {
        let mw: u32 = m.factors().iter().map(|(s, e)| (s.order() + 1) * e).sum();
        match w {
            None => w = Some(mw),
            Some(prev) if prev != mw => return None,
            _ => {}
        }
    }
    w
}
