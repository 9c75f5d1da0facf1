//! Truncated Taylor series arithmetic.
//!
//! A [`Taylor`] of length `n + 1` stores normalized coefficients
//! `c_j = f^(j)(x0) / j!`. Arithmetic propagates all of them exactly (up to
//! rounding), so derivatives of composite expressions such as
//! `sqrt(A psi1^2 + C psi2^2)` come out without finite differencing.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug, PartialEq)]
pub struct Taylor {
    c: Vec<f64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

impl Taylor {
    pub fn constant(v: f64, order: usize) -> Self {
        let mut c = vec![0.0; order + 1];
        c[0] = v;
        Taylor { c }
    }

    /// The identity `x` expanded about `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut t = Taylor::constant(x0, order);
        if order >= 1 {
            t.c[1] = 1.0;
        }
        t
    }

    /// From `[f, f', f'', ...]`.
    pub fn from_derivatives(d: &[f64]) -> Self {
        Taylor { c: d.iter().enumerate().map(|(j, v)| v / factorial(j)).collect() }
    }

    pub fn derivatives(&self) -> Vec<f64> {
        self.c.iter().enumerate().map(|(j, v)| v * factorial(j)).collect()
    }

    /// `f^(j)(x0)`.
    pub fn derivative(&self, j: usize) -> f64 {
        self.c[j] * factorial(j)
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn order(&self) -> usize {
        self.c.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    fn zip(&self, other: &Taylor, f: impl Fn(f64, f64) -> f64) -> Taylor {
        assert_eq!(self.c.len(), other.c.len(), "Taylor orders differ");
        Taylor { c: self.c.iter().zip(&other.c).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn scale(&self, s: f64) -> Taylor {
        Taylor { c: self.c.iter().map(|v| v * s).collect() }
    }

    pub fn recip(&self) -> Taylor {
        Taylor::constant(1.0, self.order()) / self
    }

    /// `self^p` for real `p`; needs `self.value() > 0` unless `p` is a
    /// non-negative integer.
    pub fn powf(&self, p: f64) -> Taylor {
        if p.fract() == 0.0 && (0.0..=16.0).contains(&p) {
            return self.powi(p as u32);
        }
        let n = self.c.len();
        let b = &self.c;
        let mut a = vec![0.0; n];
        a[0] = b[0].powf(p);
        for k in 1..n {
            let mut s = 0.0;
            for j in 0..k {
                s += (p * (k - j) as f64 - j as f64) * b[k - j] * a[j];
            }
            a[k] = s / (k as f64 * b[0]);
        }
        Taylor { c: a }
    }

    pub fn powi(&self, e: u32) -> Taylor {
        let mut out = Taylor::constant(1.0, self.order());
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn sqrt(&self) -> Taylor {
        self.powf(0.5)
    }

    pub fn exp(&self) -> Taylor {
        let n = self.c.len();
        let mut a = vec![0.0; n];
        a[0] = self.c[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.c[j] * a[k - j]).sum();
            a[k] = s / k as f64;
        }
        Taylor { c: a }
    }

    pub fn ln(&self) -> Taylor {
        let n = self.c.len();
        let b = &self.c;
        let mut a = vec![0.0; n];
        a[0] = b[0].ln();
        for k in 1..n {
            let s: f64 = (1..k).map(|j| j as f64 * a[j] * b[k - j]).sum();
            a[k] = (b[k] - s / k as f64) / b[0];
        }
        Taylor { c: a }
    }

    /// Formal derivative, one order shorter.
    pub fn differentiate(&self) -> Taylor {
        let c: Vec<f64> = self.c.iter().enumerate().skip(1).map(|(j, v)| v * j as f64).collect();
        Taylor { c: if c.is_empty() { vec![0.0] } else { c } }
    }
}

impl Add for &Taylor {
    type Output = Taylor;
    fn add(self, rhs: &Taylor) -> Taylor {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for &Taylor {
    type Output = Taylor;
    fn sub(self, rhs: &Taylor) -> Taylor {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for &Taylor {
    type Output = Taylor;
    fn mul(self, rhs: &Taylor) -> Taylor {
        assert_eq!(self.c.len(), rhs.c.len(), "Taylor orders differ");
        let n = self.c.len();
        let c = (0..n).map(|k| (0..=k).map(|j| self.c[j] * rhs.c[k - j]).sum()).collect();
        Taylor { c }
    }
}

impl Div for &Taylor {
    type Output = Taylor;
    fn div(self, rhs: &Taylor) -> Taylor {
        assert_eq!(self.c.len(), rhs.c.len(), "Taylor orders differ");
        let n = self.c.len();
        let mut q = vec![0.0; n];
        for k in 0..n {
            let s: f64 = (0..k).map(|j| q[j] * rhs.c[k - j]).sum();
            q[k] = (self.c[k] - s) / rhs.c[0];
        }
        Taylor { c: q }
    }
}

impl Neg for &Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        self.scale(-1.0)
    }
}

macro_rules! owned {
    ($tr:ident, $m:ident) => {
        impl $tr<Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Taylor> for Taylor {
            type Output = Taylor;
            fn $m(self, rhs: &Taylor) -> Taylor {
                (&self).$m(rhs)
            }
        }
        impl $tr<Taylor> for &Taylor {
            type Output = Taylor;
            fn $m(self, rhs: Taylor) -> Taylor {
                self.$m(&rhs)
            }
        }
    };
}

owned!(Add, add);
owned!(Sub, sub);
owned!(Mul, mul);
owned!(Div, div);

impl Neg for Taylor {
    type Output = Taylor;
    fn neg(self) -> Taylor {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn trig_identity() {
        let x0: f64 = 0.7;
        let s = Taylor::from_derivatives(&[x0.sin(), x0.cos(), -x0.sin(), -x0.cos(), x0.sin(), x0.cos()]);
        let c = Taylor::from_derivatives(&[x0.cos(), -x0.sin(), -x0.cos(), x0.sin(), x0.cos(), -x0.sin()]);
        let one = &s * &s + &c * &c;
        close(one.coefficients(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0], 1e-14);
        let tan = &s / &c;
        let sec2 = c.powi(2).recip();
        close(&tan.differentiate().coefficients()[..4], &sec2.coefficients()[..4], 1e-13);
    }

    #[test]
    fn power_exp_ln() {
        let x = Taylor::variable(2.0, 5);
        let r = x.powf(1.5);
        let d = r.derivatives();
        let expect = [
            2f64.powf(1.5),
            1.5 * 2f64.powf(0.5),
            0.75 * 2f64.powf(-0.5),
            -0.375 * 2f64.powf(-1.5),
        ];
        close(&d[..4], &expect, 1e-13);
        let back = x.ln().exp();
        close(back.coefficients(), x.coefficients(), 1e-14);
        let sq = x.sqrt();
        close((&sq * &sq).coefficients(), x.coefficients(), 1e-14);
    }
}
