//! Second-order jets: a complex value together with its gradient and
//! Hessian with respect to up to four real chart coordinates.
//!
//! Arithmetic propagates derivatives exactly by the chain rule, so any
//! field written in terms of [`Jet`] operations carries exact first and
//! second partials. `order` records how many derivative levels are still
//! trustworthy: differentiating a jet shifts its data down one level.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64 as C64;

use crate::error::{GcxError, Result};
use crate::multilinear::{Coeff, MAX_DIM};

const N: usize = MAX_DIM;
const Z: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub v: C64,
    pub g: [C64; N],
    pub h: [[C64; N]; N],
    pub order: u8,
}

impl Jet {
    pub fn constant(v: C64) -> Self {
        Jet { v, g: [Z; N], h: [[Z; N]; N], order: 2 }
    }

    pub fn real(v: f64) -> Self {
        Self::constant(C64::new(v, 0.0))
    }

    /// The coordinate function `x_i` evaluated at `value`.
    pub fn var(i: usize, value: f64) -> Self {
        let mut j = Self::real(value);
        j.g[i] = C64::new(1.0, 0.0);
        j
    }

    /// Seed jets for a point: one coordinate function per entry.
    pub fn seed(point: &[f64]) -> Vec<Jet> {
        point.iter().enumerate().map(|(i, &x)| Jet::var(i, x)).collect()
    }

    /// Apply a scalar function given its value and first two derivatives at `self.v`.
    pub fn chain(self, f: C64, df: C64, d2f: C64) -> Self {
        let mut out = Jet { v: f, g: [Z; N], h: [[Z; N]; N], order: self.order };
        for i in 0..N {
            out.g[i] = df * self.g[i];
            for j in 0..N {
                out.h[i][j] = df * self.h[i][j] + d2f * self.g[i] * self.g[j];
            }
        }
        out
    }

    /// `∂_i` of this jet, one order lower.
    pub fn partial(&self, i: usize) -> Result<Self> {
        if self.order == 0 {
            return Err(GcxError::MissingJet(format!("no derivative data left for ∂_{}", i + 1)));
        }
        let mut g = [Z; N];
        g.copy_from_slice(&self.h[i]);
        Ok(Jet { v: self.g[i], g, h: [[Z; N]; N], order: self.order - 1 })
    }

    /// Compose with inner jets: `self` is a jet in variables `y`, `inner[k]`
    /// is `y_k` as a jet in variables `x`. Returns `self ∘ y` in `x`.
    pub fn compose(&self, inner: &[Jet]) -> Self {
        let mut out = Jet { v: self.v, g: [Z; N], h: [[Z; N]; N], order: self.order };
        for (k, yk) in inner.iter().enumerate() {
            out.order = out.order.min(yk.order);
            for i in 0..N {
                out.g[i] += self.g[k] * yk.g[i];
                for j in 0..N {
                    out.h[i][j] += self.g[k] * yk.h[i][j];
                }
            }
            for (l, yl) in inner.iter().enumerate() {
                let c = self.h[k][l];
                if c == Z {
                    continue;
                }
                for i in 0..N {
                    for j in 0..N {
                        out.h[i][j] += c * yk.g[i] * yl.g[j];
                    }
                }
            }
        }
        out
    }

    pub fn re(&self) -> f64 {
        self.v.re
    }

    pub fn recip(self) -> Self {
        let v = self.v;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.v;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Jet { order: self.order, ..Jet::real(1.0) },
            1 => self,
            _ => {
                let v = self.v;
                let nf = n as f64;
                self.chain(v.powi(n), nf * v.powi(n - 1), nf * (nf - 1.0) * v.powi(n - 2))
            }
        }
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.v;
        self.chain(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    pub fn scale_re(self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Hessian is symmetric up to `tol` (in absolute terms).
    pub fn hessian_symmetric(&self, tol: f64) -> bool {
        (0..N).all(|i| (0..N).all(|j| (self.h[i][j] - self.h[j][i]).norm() <= tol))
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        let mut out = self;
        out.v += o.v;
        for i in 0..N {
            out.g[i] += o.g[i];
            for j in 0..N {
                out.h[i][j] += o.h[i][j];
            }
        }
        out.order = self.order.min(o.order);
        out
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        self + (-o)
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        let mut out = Jet { v: self.v * o.v, g: [Z; N], h: [[Z; N]; N], order: self.order.min(o.order) };
        for i in 0..N {
            out.g[i] = self.v * o.g[i] + o.v * self.g[i];
            for j in 0..N {
                out.h[i][j] = self.v * o.h[i][j]
                    + o.v * self.h[i][j]
                    + self.g[i] * o.g[j]
                    + o.g[i] * self.g[j];
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet) -> Jet {
        self * o.recip()
    }
}

impl Coeff for Jet {
    fn zero() -> Self {
        Jet::real(0.0)
    }
    fn one() -> Self {
        Jet::real(1.0)
    }
    fn from_c64(z: C64) -> Self {
        Jet::constant(z)
    }
    fn scale(self, s: C64) -> Self {
        let mut out = self;
        out.v *= s;
        for i in 0..N {
            out.g[i] *= s;
            for j in 0..N {
                out.h[i][j] *= s;
            }
        }
        out
    }
}
