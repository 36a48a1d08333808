//! Expression trees for fields read from JSON.
//!
//! Vocabulary: constants, coordinates (1-based), sums, products, powers,
//! `exp`, `log`, and `sin`/`cos` with unit period, so `sin(x)` means
//! `sin(2πx)`.
//!
//! ```json
//! {"op": "mul", "args": [{"op": "const", "re": 2.0}, {"op": "coord", "index": 1}]}
//! ```

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::chart::{FormField, FormJet, VectorField, VectorJet};
use crate::error::{check_dim, GcxError, Result};
use crate::jet::Jet;
use crate::multilinear::{mask_from_indices, Coeff, Form, GcVec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    Coord {
        index: usize,
    },
    Add {
        args: Vec<Expr>,
    },
    Mul {
        args: Vec<Expr>,
    },
    Pow {
        base: Box<Expr>,
        exp: f64,
    },
    Exp {
        arg: Box<Expr>,
    },
    Log {
        arg: Box<Expr>,
    },
    Sin {
        arg: Box<Expr>,
    },
    Cos {
        arg: Box<Expr>,
    },
}

impl Expr {
    pub fn real(x: f64) -> Self {
        Expr::Const { re: x, im: 0.0 }
    }

    pub fn coord(index: usize) -> Self {
        Expr::Coord { index }
    }

    pub fn add(args: Vec<Expr>) -> Self {
        Expr::Add { args }
    }

    pub fn mul(args: Vec<Expr>) -> Self {
        Expr::Mul { args }
    }

    pub fn pow(base: Expr, exp: f64) -> Self {
        Expr::Pow { base: Box::new(base), exp }
    }

    pub fn exp(arg: Expr) -> Self {
        Expr::Exp { arg: Box::new(arg) }
    }

    pub fn log(arg: Expr) -> Self {
        Expr::Log { arg: Box::new(arg) }
    }

    pub fn sin(arg: Expr) -> Self {
        Expr::Sin { arg: Box::new(arg) }
    }

    pub fn cos(arg: Expr) -> Self {
        Expr::Cos { arg: Box::new(arg) }
    }

    /// Largest coordinate index used (1-based), 0 for constants.
    pub fn max_coord(&self) -> usize {
        match self {
            Expr::Const { .. } => 0,
            Expr::Coord { index } => *index,
            Expr::Add { args } | Expr::Mul { args } => args.iter().map(Expr::max_coord).max().unwrap_or(0),
            Expr::Pow { base, .. } => base.max_coord(),
            Expr::Exp { arg } | Expr::Log { arg } | Expr::Sin { arg } | Expr::Cos { arg } => arg.max_coord(),
        }
    }

    pub fn eval(&self, x: &[Jet]) -> Result<Jet> {
        Ok(match self {
            Expr::Const { re, im } => Jet::constant(C64::new(*re, *im)),
            Expr::Coord { index } => {
                if *index == 0 || *index > x.len() {
                    return Err(GcxError::Parse(format!("coordinate index {index} out of range 1..={}", x.len())));
                }
                x[index - 1]
            }
            Expr::Add { args } => args.iter().try_fold(Jet::zero(), |acc, a| Ok::<_, GcxError>(acc + a.eval(x)?))?,
            Expr::Mul { args } => args.iter().try_fold(Jet::one(), |acc, a| Ok::<_, GcxError>(acc * a.eval(x)?))?,
            Expr::Pow { base, exp } => {
                let b = base.eval(x)?;
                if exp.fract() == 0.0 && exp.abs() <= i32::MAX as f64 {
                    let n = *exp as i32;
                    if n < 0 {
                        if b.v.norm() == 0.0 {
                            return Err(GcxError::OutOfDomain("negative power of zero".into()));
                        }
                        b.recip().powi(-n)
                    } else {
                        b.powi(n)
                    }
                } else {
                    b.powf(*exp)
                }
            }
            Expr::Exp { arg } => arg.eval(x)?.exp(),
            Expr::Log { arg } => {
                let a = arg.eval(x)?;
                if a.v.norm() == 0.0 {
                    return Err(GcxError::OutOfDomain("log of zero".into()));
                }
                a.ln()
            }
            Expr::Sin { arg } => arg.eval(x)?.scale_re(TAU).sin(),
            Expr::Cos { arg } => arg.eval(x)?.scale_re(TAU).cos(),
        })
    }

    /// Random real polynomial of total degree at most `degree` with
    /// `terms` monomials and coefficients in `[-1, 1]`.
    pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize, terms: usize) -> Self {
        let monomials = (0..terms)
            .map(|_| {
                let d = rng.random_range(0..=degree);
                let mut factors = vec![Expr::real(rng.random_range(-1.0..=1.0))];
                factors.extend((0..d).map(|_| Expr::coord(rng.random_range(1..=dim))));
                Expr::mul(factors)
            })
            .collect();
        Expr::add(monomials)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormTerm {
    pub indices: Vec<usize>,
    pub coeff: Expr,
}

/// A differential form with expression coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormExpr {
    pub dim: usize,
    pub terms: Vec<FormTerm>,
}

impl FormExpr {
    pub fn zero(dim: usize) -> Self {
        FormExpr { dim, terms: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        Form::<Jet>::zero(self.dim)?;
        for t in &self.terms {
            mask_from_indices(self.dim, &t.indices)?;
            if t.coeff.max_coord() > self.dim {
                return Err(GcxError::Parse(format!("coordinate index {} exceeds dim {}", t.coeff.max_coord(), self.dim)));
            }
        }
        Ok(())
    }

    /// Random form with polynomial coefficients in every basis slot of the
    /// given degrees.
    pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, degrees: &[usize], degree: usize) -> Self {
        let terms = crate::multilinear::ordered_masks(dim)
            .into_iter()
            .filter(|m| degrees.contains(&(m.count_ones() as usize)))
            .map(|m| FormTerm {
                indices: crate::multilinear::indices_from_mask(m),
                coeff: Expr::random_polynomial(rng, dim, degree, 3),
            })
            .collect();
        FormExpr { dim, terms }
    }
}

impl FormField for FormExpr {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        check_dim(self.dim, p.len())?;
        let x = Jet::seed(p);
        let mut out = FormJet::zero(self.dim)?;
        for t in &self.terms {
            let mask = mask_from_indices(self.dim, &t.indices)?;
            out.set(mask, out.coeff(mask) + t.coeff.eval(&x)?);
        }
        Ok(out)
    }
}

/// A generalized vector field `X + ξ` with expression components.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorExpr {
    pub dim: usize,
    pub vec: Vec<Expr>,
    pub cov: Vec<Expr>,
}

impl VectorExpr {
    pub fn validate(&self) -> Result<()> {
        check_dim(self.dim, self.vec.len())?;
        check_dim(self.dim, self.cov.len())?;
        Form::<Jet>::zero(self.dim)?;
        if let Some(e) = self.vec.iter().chain(&self.cov).find(|e| e.max_coord() > self.dim) {
            return Err(GcxError::Parse(format!("coordinate index {} exceeds dim {}", e.max_coord(), self.dim)));
        }
        Ok(())
    }

    pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, dim: usize, degree: usize) -> Self {
        let mut gen = || (0..dim).map(|_| Expr::random_polynomial(rng, dim, degree, 3)).collect::<Vec<_>>();
        let vec = gen();
        let cov = gen();
        VectorExpr { dim, vec, cov }
    }
}

impl VectorField for VectorExpr {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, p: &[f64]) -> Result<VectorJet> {
        check_dim(self.dim, p.len())?;
        let x = Jet::seed(p);
        let eval = |es: &[Expr]| es.iter().map(|e| e.eval(&x)).collect::<Result<Vec<_>>>();
        GcVec::new(eval(&self.vec)?, eval(&self.cov)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip() {
        let e = Expr::add(vec![
            Expr::mul(vec![Expr::real(2.0), Expr::coord(1)]),
            Expr::pow(Expr::coord(2), -1.0),
            Expr::sin(Expr::coord(3)),
        ]);
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains(r#""op":"add""#));
        let back: Expr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);

        let parsed: Expr = serde_json::from_str(r#"{"op":"const","re":1.5}"#).unwrap();
        assert_eq!(parsed, Expr::real(1.5));
        assert!(serde_json::from_str::<Expr>(r#"{"op":"tan","arg":{"op":"coord","index":1}}"#).is_err());
    }

    #[test]
    fn unit_period_trig() {
        let x = Jet::seed(&[0.25]);
        let s = Expr::sin(Expr::coord(1)).eval(&x).unwrap();
        assert!((s.v.re - 1.0).abs() < 1e-15);
        assert!(s.g[0].norm() < 1e-14);
        let c = Expr::cos(Expr::coord(1)).eval(&x).unwrap();
        assert!((c.g[0].re + TAU).abs() < 1e-14);
    }

    #[test]
    fn eval_matches_direct_jets() {
        let p = [0.7, 1.3, -0.2, 0.4];
        let x = Jet::seed(&p);
        let e = Expr::mul(vec![Expr::exp(Expr::coord(3)), Expr::log(Expr::coord(2)), Expr::pow(Expr::coord(1), -2.0)]);
        let got = e.eval(&x).unwrap();
        let want = x[2].exp() * x[1].ln() / (x[0] * x[0]);
        assert!((got.v - want.v).norm() < 1e-14);
        for i in 0..4 {
            assert!((got.g[i] - want.g[i]).norm() < 1e-13);
            for j in 0..4 {
                assert!((got.h[i][j] - want.h[i][j]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn bad_fields_rejected() {
        assert!(Expr::coord(5).eval(&Jet::seed(&[0.0; 4])).is_err());
        assert!(Expr::log(Expr::real(0.0)).eval(&[]).is_err());
        let f = FormExpr { dim: 4, terms: vec![FormTerm { indices: vec![2, 1], coeff: Expr::real(1.0) }] };
        assert!(f.validate().is_err());
        let v = VectorExpr { dim: 4, vec: vec![Expr::real(0.0); 3], cov: vec![Expr::real(0.0); 4] };
        assert!(v.validate().is_err());
    }

    #[test]
    fn random_fields_are_reproducible() {
        let a = VectorExpr::random_polynomial(&mut ChaCha8Rng::seed_from_u64(7), 4, 2);
        let b = VectorExpr::random_polynomial(&mut ChaCha8Rng::seed_from_u64(7), 4, 2);
        assert_eq!(a, b);
        a.validate().unwrap();
        let f = FormExpr::random_polynomial(&mut ChaCha8Rng::seed_from_u64(1), 4, &[2], 2);
        assert_eq!(f.terms.len(), 6);
        f.validate().unwrap();
    }
}
