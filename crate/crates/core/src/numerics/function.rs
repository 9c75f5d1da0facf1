use std::fmt;
use std::str::FromStr;

/// Closed-form coefficient function with derivatives of every order.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSpec {
    Constant(f64),
    /// `a*x + b`
    Affine(f64, f64),
    /// `c0 + c1 x + c2 x^2 + ...`
    Polynomial(Vec<f64>),
    /// `a0 + sum_j a_j cos(j w x) + b_j sin(j w x)`
    Trig { a0: f64, pairs: Vec<(f64, f64)>, omega: f64 },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad function spec {text:?}: {reason}")]
pub struct SpecError {
    pub text: String,
    pub reason: String,
}

impl FunctionSpec {
    pub fn constant(c: f64) -> Self {
        FunctionSpec::Constant(c)
    }

    /// `a0 + a1 cos x`, the usual test potential.
    pub fn cosine(a0: f64, a1: f64) -> Self {
        FunctionSpec::Trig { a0, pairs: vec![(a1, 0.0)], omega: 1.0 }
    }

    pub fn value(&self, x: f64) -> f64 {
        self.jet(x, 0)[0]
    }

    /// `[f(x), f'(x), ..., f^(m)(x)]`.
    pub fn jet(&self, x: f64, m: usize) -> Vec<f64> {
        let mut out = vec![0.0; m + 1];
        match self {
            FunctionSpec::Constant(c) => out[0] = *c,
            FunctionSpec::Affine(a, b) => {
                out[0] = a * x + b;
                if m >= 1 {
                    out[1] = *a;
                }
            }
            FunctionSpec::Polynomial(cs) => {
                let mut coeffs = cs.clone();
                for slot in out.iter_mut() {
                    *slot = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
                    coeffs = coeffs.iter().enumerate().skip(1).map(|(i, c)| c * i as f64).collect();
                }
            }
            FunctionSpec::Trig { a0, pairs, omega } => {
                out[0] = *a0;
                for (j, (a, b)) in pairs.iter().enumerate() {
                    let w = (j + 1) as f64 * omega;
                    let (s, c) = (w * x).sin_cos();
                    // d^d/dt^d of (cos, sin) cycles through (cos, sin), (-sin, cos), ...
                    let mut scale = 1.0;
                    for (d, slot) in out.iter_mut().enumerate() {
                        let (dc, ds) = match d % 4 {
                            0 => (c, s),
                            1 => (-s, c),
                            2 => (-c, -s),
                            _ => (s, -c),
                        };
                        *slot += scale * (a * dc + b * ds);
                        scale *= w;
                    }
                }
            }
        }
        out
    }

    /// The same function with every value multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        match self {
            FunctionSpec::Constant(c) => FunctionSpec::Constant(s * c),
            FunctionSpec::Affine(a, b) => FunctionSpec::Affine(s * a, s * b),
            FunctionSpec::Polynomial(cs) => FunctionSpec::Polynomial(cs.iter().map(|c| s * c).collect()),
            FunctionSpec::Trig { a0, pairs, omega } => FunctionSpec::Trig {
                a0: s * a0,
                pairs: pairs.iter().map(|(a, b)| (s * a, s * b)).collect(),
                omega: *omega,
            },
        }
    }

    /// `true` when the function does not depend on `x`.
    pub fn is_constant(&self) -> bool {
        match self {
            FunctionSpec::Constant(_) => true,
            FunctionSpec::Affine(a, _) => *a == 0.0,
            FunctionSpec::Polynomial(cs) => cs.iter().skip(1).all(|c| *c == 0.0),
            FunctionSpec::Trig { pairs, .. } => pairs.iter().all(|(a, b)| *a == 0.0 && *b == 0.0),
        }
    }
}

fn numbers(text: &str, body: &str, sep: char) -> Result<Vec<f64>, SpecError> {
    body.split(sep)
        .map(|t| {
            t.trim().parse::<f64>().map_err(|_| SpecError { text: text.into(), reason: format!("not a number: {t:?}") })
        })
        .collect()
}

impl FromStr for FunctionSpec {
    type Err = SpecError;

    /// `const:c`, `affine:a,b`, `poly:c0,c1,...`, `trig:a0;a1,b1;...@omega`.
    fn from_str(text: &str) -> Result<Self, SpecError> {
        let err = |reason: &str| SpecError { text: text.into(), reason: reason.into() };
        let (kind, body) = text.split_once(':').ok_or_else(|| err("missing ':'"))?;
        match kind.trim() {
            "const" => match numbers(text, body, ',')?.as_slice() {
                [c] => Ok(FunctionSpec::Constant(*c)),
                _ => Err(err("const takes one value")),
            },
            "affine" => match numbers(text, body, ',')?.as_slice() {
                [a, b] => Ok(FunctionSpec::Affine(*a, *b)),
                _ => Err(err("affine takes two values")),
            },
            "poly" => Ok(FunctionSpec::Polynomial(numbers(text, body, ',')?)),
            "trig" => {
                let (body, omega) = match body.split_once('@') {
                    Some((b, w)) => (b, numbers(text, w, ',')?),
                    None => (body, vec![1.0]),
                };
                let omega = match omega.as_slice() {
                    [w] if *w > 0.0 => *w,
                    _ => return Err(err("omega must be a single positive number")),
                };
                let mut parts = body.split(';');
                let a0 = numbers(text, parts.next().unwrap_or(""), ',')?;
                let a0 = match a0.as_slice() {
                    [a] => *a,
                    _ => return Err(err("trig needs a single constant term")),
                };
                let mut pairs = Vec::new();
                for part in parts {
                    match numbers(text, part, ',')?.as_slice() {
                        [a, b] => pairs.push((*a, *b)),
                        _ => return Err(err("trig harmonics are a,b pairs")),
                    }
                }
                Ok(FunctionSpec::Trig { a0, pairs, omega })
            }
            _ => Err(err("unknown kind (expected const, affine, poly or trig)")),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[f64]| xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        match self {
            FunctionSpec::Constant(c) => write!(f, "const:{c}"),
            FunctionSpec::Affine(a, b) => write!(f, "affine:{a},{b}"),
            FunctionSpec::Polynomial(cs) => write!(f, "poly:{}", join(cs)),
            FunctionSpec::Trig { a0, pairs, omega } => {
                write!(f, "trig:{a0}")?;
                for (a, b) in pairs {
                    write!(f, ";{a},{b}")?;
                }
                if *omega != 1.0 {
                    write!(f, "@{omega}")?;
                }
                Ok(())
            }
        }
    }
}
