//! Explicit polynomial ODE systems `s^(N_s) = F_s(x, jets, coefficients)`.
//!
//! The same symbolic right-hand sides drive integration and supply every
//! higher derivative needed by residual checks: `s^(N+1)` is obtained by
//! differentiating `F_s` and substituting the equations back in.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::diffpoly::{d_total, CompiledPoly, DiffPoly, DiffSymbol, SymbolKind};

use super::function::FunctionSpec;
use super::integrator::{integrate, IntegratorOptions};
use super::trajectory::Trajectory;
use super::NumericsError;

/// Values for coefficient functions and constant symbols.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Env {
    pub coeffs: BTreeMap<String, FunctionSpec>,
    pub consts: BTreeMap<String, f64>,
}

impl Env {
    pub fn new() -> Self {
        Env::default()
    }

    pub fn with_coeff(mut self, name: &str, spec: FunctionSpec) -> Self {
        self.coeffs.insert(name.to_string(), spec);
        self
    }

    pub fn with_const(mut self, name: &str, value: f64) -> Self {
        self.consts.insert(name.to_string(), value);
        self
    }

    pub fn const_map(&self) -> HashMap<String, f64> {
        self.consts.iter().map(|(k, v)| (k.clone(), *v)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
struct Equation {
    base: String,
    order: u32,
    rhs: DiffPoly,
}

/// A system of explicit equations, one per dependent base.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeSystem {
    eqs: Vec<Equation>,
    state: Vec<DiffSymbol>,
}

impl OdeSystem {
    /// `equations[i] = (base, N, F)` means `base^(N) = F`.
    pub fn new(equations: Vec<(&str, u32, DiffPoly)>) -> Result<Self, NumericsError> {
        let orders: BTreeMap<&str, u32> = equations.iter().map(|(b, n, _)| (*b, *n)).collect();
        if orders.len() != equations.len() {
            return Err(NumericsError::Layout("duplicate equation for one base".into()));
        }
        for (base, n, rhs) in &equations {
            if *n == 0 {
                return Err(NumericsError::Layout(format!("equation for {base} has order 0")));
            }
            for s in rhs.symbols() {
                if s.kind() == SymbolKind::Dependent {
                    match orders.get(s.base()) {
                        Some(&m) if s.order() < m => {}
                        Some(_) => {
                            return Err(NumericsError::Layout(format!(
                                "right-hand side for {base} contains {s}, which is not a state variable"
                            )))
                        }
                        None => return Err(NumericsError::UnknownSymbol(s.to_string())),
                    }
                }
            }
        }
        let mut state = Vec::new();
        let mut eqs = Vec::new();
        for (base, n, rhs) in equations {
            state.extend((0..n).map(|j| DiffSymbol::dependent(base, j)));
            eqs.push(Equation { base: base.to_string(), order: n, rhs });
        }
        Ok(OdeSystem { eqs, state })
    }

    /// Solves `p = 0` for the highest derivative of `base`; `p` must contain
    /// it linearly with coefficient 1.
    pub fn from_monic(p: &DiffPoly, base: &str) -> Result<Self, NumericsError> {
        let n = p.max_order(base).ok_or_else(|| NumericsError::NotMonic(format!("{p} does not contain {base}")))?;
        let top = DiffSymbol::dependent(base, n);
        if p.degree_in(&top) != 1 || p.partial(&top) != DiffPoly::one() || n == 0 {
            return Err(NumericsError::NotMonic(p.to_string()));
        }
        let rest = p - &DiffPoly::var(top);
        OdeSystem::new(vec![(base, n, -rest)])
    }

    /// Jet coordinates carried in the integration state, in order.
    pub fn state_symbols(&self) -> &[DiffSymbol] {
        &self.state
    }

    pub fn state_names(&self) -> Vec<String> {
        self.state.iter().map(|s| s.to_string()).collect()
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    fn order_of(&self, base: &str) -> Option<u32> {
        self.eqs.iter().find(|e| e.base == base).map(|e| e.order)
    }

    /// Expresses any jet of a system base through state jets, `x` and
    /// coefficient jets.
    pub fn lifted(&self, sym: &DiffSymbol) -> DiffPoly {
        match (sym.kind(), self.eqs.iter().find(|e| e.base == sym.base())) {
            (SymbolKind::Dependent, Some(eq)) if sym.order() >= eq.order => {
                let mut expr = eq.rhs.clone();
                for _ in eq.order..sym.order() {
                    expr = self.reduce(&d_total(&expr));
                }
                expr
            }
            _ => DiffPoly::var(sym.clone()),
        }
    }

    /// Replaces every non-state jet of a system base in `p` by its lifted
    /// expression.
    pub fn reduce(&self, p: &DiffPoly) -> DiffPoly {
        let mut out = p.clone();
        for s in p.symbols() {
            if s.kind() == SymbolKind::Dependent && self.order_of(s.base()).is_some_and(|n| s.order() >= n) {
                out = out.replace_symbol(&s, &self.lifted(&s));
            }
        }
        out
    }

    /// Compiles expressions in state jets for repeated evaluation.
    pub fn compile(&self, exprs: &[DiffPoly], env: &Env) -> Result<Evaluator, NumericsError> {
        let reduced: Vec<DiffPoly> = exprs.iter().map(|p| self.reduce(p)).collect();
        let mut coeff_orders: BTreeMap<String, u32> = BTreeMap::new();
        let mut unknown = BTreeSet::new();
        for p in &reduced {
            for s in p.symbols() {
                match s.kind() {
                    SymbolKind::Coefficient => {
                        if !env.coeffs.contains_key(s.base()) {
                            unknown.insert(s.base().to_string());
                        }
                        let e = coeff_orders.entry(s.base().to_string()).or_insert(0);
                        *e = (*e).max(s.order());
                    }
                    SymbolKind::Dependent if !self.state.contains(&s) => {
                        return Err(NumericsError::UnknownSymbol(s.to_string()))
                    }
                    _ => {}
                }
            }
        }
        if let Some(name) = unknown.into_iter().next() {
            return Err(NumericsError::MissingCoefficient(name));
        }
        let mut slots = vec![DiffSymbol::independent()];
        slots.extend(self.state.iter().cloned());
        let mut coeffs = Vec::new();
        for (base, m) in &coeff_orders {
            slots.extend((0..=*m).map(|j| DiffSymbol::coefficient(base, j)));
            coeffs.push((env.coeffs[base].clone(), *m as usize));
        }
        let consts = env.const_map();
        let compiled = reduced
            .iter()
            .map(|p| CompiledPoly::new(p, &slots, &consts))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| NumericsError::MissingSymbol(e.to_string()))?;
        Ok(Evaluator { compiled, coeffs, dim: self.state.len(), n_slots: slots.len() })
    }

    /// First-order right-hand side in state order.
    pub fn rhs(&self, env: &Env) -> Result<impl Fn(f64, &[f64], &mut [f64]), NumericsError> {
        let tops: Vec<DiffPoly> = self.eqs.iter().map(|e| e.rhs.clone()).collect();
        let ev = self.compile(&tops, env)?;
        let mut layout = Vec::new();
        let mut offset = 0;
        for e in &self.eqs {
            layout.push((offset, e.order as usize));
            offset += e.order as usize;
        }
        Ok(move |x: f64, y: &[f64], dy: &mut [f64]| {
            let tops = ev.eval(x, y);
            for (k, &(off, n)) in layout.iter().enumerate() {
                for j in 0..n - 1 {
                    dy[off + j] = y[off + j + 1];
                }
                dy[off + n - 1] = tops[k];
            }
        })
    }

    pub fn integrate(
        &self,
        env: &Env,
        y0: &[f64],
        grid: &[f64],
        opts: &IntegratorOptions,
    ) -> Result<Trajectory, NumericsError> {
        if y0.len() != self.dim() {
            return Err(NumericsError::Layout(format!("expected {} initial values, got {}", self.dim(), y0.len())));
        }
        let f = self.rhs(env)?;
        Ok(integrate(f, y0, grid, self.state_names(), opts)?)
    }

    /// Copy of `traj` with the next `depth` derivatives of every base
    /// appended as extra columns (named like the symbols, e.g. `u1`, `u2`).
    pub fn extend_jets(&self, traj: &Trajectory, env: &Env, depth: u32) -> Result<Trajectory, NumericsError> {
        let mut syms = Vec::new();
        for e in &self.eqs {
            syms.extend((e.order..e.order + depth).map(|j| DiffSymbol::dependent(&e.base, j)));
        }
        let exprs: Vec<DiffPoly> = syms.iter().map(|s| self.lifted(s)).collect();
        let values = self.compile(&exprs, env)?.eval_along(traj);
        let names: Vec<String> = syms.iter().map(|s| s.to_string()).collect();
        let mut out = traj.clone();
        out.names.extend(names);
        for (s, v) in out.states.iter_mut().zip(values) {
            s.extend(v);
        }
        Ok(out)
    }

    /// Values of all jets of every system base up to `depth` orders above the
    /// state, at one point: `result[base][j] = base^(j)(x)`.
    pub fn jet_lift(
        &self,
        env: &Env,
        x: f64,
        state: &[f64],
        depth: u32,
    ) -> Result<BTreeMap<String, Vec<f64>>, NumericsError> {
        let mut exprs = Vec::new();
        for e in &self.eqs {
            for j in 0..e.order + depth {
                exprs.push(self.lifted(&DiffSymbol::dependent(&e.base, j)));
            }
        }
        let vals = self.compile(&exprs, env)?.eval(x, state);
        let mut out = BTreeMap::new();
        let mut it = vals.into_iter();
        for e in &self.eqs {
            out.insert(e.base.clone(), it.by_ref().take((e.order + depth) as usize).collect());
        }
        Ok(out)
    }
}

/// Compiled expressions over `[x, state..., coefficient jets...]`.
#[derive(Clone, Debug)]
pub struct Evaluator {
    compiled: Vec<CompiledPoly>,
    coeffs: Vec<(FunctionSpec, usize)>,
    dim: usize,
    n_slots: usize,
}

impl Evaluator {
    pub fn eval(&self, x: f64, state: &[f64]) -> Vec<f64> {
        debug_assert_eq!(state.len(), self.dim);
        let mut slots = Vec::with_capacity(self.n_slots);
        slots.push(x);
        slots.extend_from_slice(state);
        for (spec, m) in &self.coeffs {
            slots.extend(spec.jet(x, *m));
        }
        self.compiled.iter().map(|c| c.eval(&slots)).collect()
    }

    /// Evaluates along every sample of a trajectory; `out[i][k]` is
    /// expression `k` at grid point `i`.
    pub fn eval_along(&self, traj: &Trajectory) -> Vec<Vec<f64>> {
        traj.grid.iter().zip(&traj.states).map(|(x, s)| self.eval(*x, s)).collect()
    }
}

/// Hill equation `psi'' + k v psi = 0` in base `psi`.
pub fn hill_system(k: f64) -> OdeSystem {
    let rhs = DiffPoly::coef("v", 0) * DiffPoly::dep("psi", 0);
    let rhs = rhs.scale(&rat_of(-k));
    OdeSystem::new(vec![("psi", 2, rhs)]).expect("valid Hill system")
}

/// Projective vector field equation `y''' + 4 k v y' + 2 k v' y = 0`.
pub fn pvf_system(k: f64) -> OdeSystem {
    let rhs = DiffPoly::int(4) * DiffPoly::coef("v", 0) * DiffPoly::dep("y", 1)
        + DiffPoly::int(2) * DiffPoly::coef("v", 1) * DiffPoly::dep("y", 0);
    OdeSystem::new(vec![("y", 3, rhs.scale(&rat_of(-k)))]).expect("valid PVF system")
}

/// Exact rational for a finite `f64`.
pub fn rat_of(x: f64) -> crate::diffpoly::Rational {
    crate::diffpoly::Rational::from_float(x).expect("finite value")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffpoly::{parse, parse_with, SymbolTable};
    use crate::numerics::uniform_grid;

    #[test]
    fn lift_examples() {
        let riccati = OdeSystem::from_monic(&parse("u1 - u^2 - v").unwrap(), "u").unwrap();
        assert_eq!(riccati.lifted(&DiffSymbol::dependent("u", 2)), parse("2*u^3 + 2*v*u + v1").unwrap());

        let hill = hill_system(1.0);
        assert_eq!(hill.lifted(&DiffSymbol::dependent("psi", 3)), parse("-v1*psi - v*psi1").unwrap());

        let pvf = pvf_system(1.0);
        let y4 = pvf.lifted(&DiffSymbol::dependent("y", 4));
        let expect = parse_with("-4*v*y2 - 6*v1*y1 - 2*v2*y", &SymbolTable::default()).unwrap();
        assert_eq!(y4, expect);
    }

    #[test]
    fn monic_check() {
        assert!(OdeSystem::from_monic(&parse("2*u1 - u").unwrap(), "u").is_err());
        assert!(OdeSystem::from_monic(&parse("u1^2 - u").unwrap(), "u").is_err());
        assert!(OdeSystem::from_monic(&parse("k").unwrap(), "u").is_err());
        assert!(OdeSystem::new(vec![("u", 1, parse("y1 + u").unwrap())]).is_err());
        assert!(OdeSystem::new(vec![("u", 1, parse("u1").unwrap())]).is_err());
    }

    #[test]
    fn missing_coefficient_is_reported() {
        let sys = hill_system(1.0);
        match sys.rhs(&Env::new()) {
            Err(NumericsError::MissingCoefficient(name)) => assert_eq!(name, "v"),
            Err(e) => panic!("{e}"),
            Ok(_) => panic!("expected error"),
        }
    }

    #[test]
    fn hill_integration_and_lift() {
        let env = Env::new().with_coeff("v", FunctionSpec::Constant(1.0));
        let sys = hill_system(1.0);
        let grid = uniform_grid(0.0, 3.0, 31);
        let t = sys.integrate(&env, &[1.0, 0.0], &grid, &Default::default()).unwrap();
        for (x, s) in t.grid.iter().zip(&t.states) {
            assert!((s[0] - x.cos()).abs() < 1e-9);
            let jets = sys.jet_lift(&env, *x, s, 2).unwrap();
            let psi = &jets["psi"];
            assert!((psi[2] + x.cos()).abs() < 1e-9);
            assert!((psi[3] - x.sin()).abs() < 1e-9);
        }
    }
}
