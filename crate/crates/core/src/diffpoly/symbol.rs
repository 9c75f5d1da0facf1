use std::fmt;
use std::sync::Arc;

/// Role a symbol plays under the total derivative.
///
/// The variant order is the canonical symbol order: independent < constants
/// < coefficients < dependents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// The independent variable `x`; `D(x) = 1`.
    Independent,
    /// A parameter such as `k`, `alpha`, `sigma`; `D(c) = 0`.
    Constant,
    /// A known coefficient function (`v`, `w`, ...); `D(v_j) = v_{j+1}`.
    Coefficient,
    /// An unknown function (`u`, `y`, `f`, ...); `D(u_j) = u_{j+1}`.
    Dependent,
}

impl SymbolKind {
    /// Jet variables are the kinds that pick up a derivative order under `D`.
    pub fn is_jet(self) -> bool {
        matches!(self, SymbolKind::Coefficient | SymbolKind::Dependent)
    }
}

/// A jet coordinate: a base name together with a derivative count.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DiffSymbol {
    kind: SymbolKind,
    base: Arc<str>,
    order: u32,
}

impl DiffSymbol {
    pub fn independent() -> Self {
        DiffSymbol { kind: SymbolKind::Independent, base: Arc::from("x"), order: 0 }
    }

    pub fn constant(name: &str) -> Self {
        DiffSymbol { kind: SymbolKind::Constant, base: Arc::from(name), order: 0 }
    }

    pub fn coefficient(name: &str, order: u32) -> Self {
        DiffSymbol { kind: SymbolKind::Coefficient, base: Arc::from(name), order }
    }

    pub fn dependent(name: &str, order: u32) -> Self {
        DiffSymbol { kind: SymbolKind::Dependent, base: Arc::from(name), order }
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Same base and kind, different derivative order. Only meaningful for jet
    /// variables; constants and `x` are returned unchanged.
    pub fn with_order(&self, order: u32) -> Self {
        if self.kind.is_jet() {
            DiffSymbol { kind: self.kind, base: self.base.clone(), order }
        } else {
            self.clone()
        }
    }

    /// The next jet coordinate, `D(s_j) = s_{j+1}`. `None` for `x` and constants.
    pub fn next(&self) -> Option<Self> {
        self.kind.is_jet().then(|| self.with_order(self.order + 1))
    }
}

impl fmt::Display for DiffSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 0 {
            write!(f, "{}", self.base)
        } else {
            write!(f, "{}{}", self.base, self.order)
        }
    }
}

/// Decides the [`SymbolKind`] of a bare name when parsing.
///
/// The default table treats `x` as independent; `k`, `alpha`, `beta`, `sigma`,
/// `lambda`, `mu`, `c`, `m`, `l` and every capitalised name as constants;
/// `v`, `w`, `r`, `q`, `a`, `b` as coefficient functions; everything else is a
/// dependent variable.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    independent: String,
    constants: Vec<String>,
    coefficients: Vec<String>,
    dependents: Vec<String>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        let owned = |names: &[&str]| names.iter().map(|s| s.to_string()).collect();
        SymbolTable {
            independent: "x".into(),
            constants: owned(&["k", "alpha", "beta", "sigma", "lambda", "mu", "c", "m", "l"]),
            coefficients: owned(&["v", "w", "r", "q", "a", "b"]),
            dependents: Vec::new(),
        }
    }
}

impl SymbolTable {
    /// Forces `name` to be read as a dependent variable (e.g. `v` in mKdV/PII).
    pub fn with_dependent(mut self, name: &str) -> Self {
        self.coefficients.retain(|c| c != name);
        self.constants.retain(|c| c != name);
        self.dependents.push(name.to_string());
        self
    }

    pub fn with_coefficient(mut self, name: &str) -> Self {
        self.dependents.retain(|c| c != name);
        self.constants.retain(|c| c != name);
        self.coefficients.push(name.to_string());
        self
    }

    pub fn with_constant(mut self, name: &str) -> Self {
        self.dependents.retain(|c| c != name);
        self.coefficients.retain(|c| c != name);
        self.constants.push(name.to_string());
        self
    }

    pub fn kind_of(&self, name: &str) -> SymbolKind {
        let has = |list: &[String]| list.iter().any(|s| s == name);
        if name == self.independent {
            SymbolKind::Independent
        } else if has(&self.dependents) {
            SymbolKind::Dependent
        } else if has(&self.coefficients) {
            SymbolKind::Coefficient
        } else if has(&self.constants) || name.starts_with(|c: char| c.is_ascii_uppercase()) {
            SymbolKind::Constant
        } else {
            SymbolKind::Dependent
        }
    }

    /// Builds the symbol for `name` with derivative count `order`; `None` when a
    /// derivative order is attached to a constant or to `x`.
    pub fn symbol(&self, name: &str, order: u32) -> Option<DiffSymbol> {
        match self.kind_of(name) {
            SymbolKind::Independent if order == 0 => Some(DiffSymbol::independent_named(name)),
            SymbolKind::Constant if order == 0 => Some(DiffSymbol::constant(name)),
            SymbolKind::Coefficient => Some(DiffSymbol::coefficient(name, order)),
            SymbolKind::Dependent => Some(DiffSymbol::dependent(name, order)),
            _ => None,
        }
    }
}

impl DiffSymbol {
    fn independent_named(name: &str) -> Self {
        DiffSymbol { kind: SymbolKind::Independent, base: Arc::from(name), order: 0 }
    }
}
