//! Graded exterior algebra on an n-dimensional cotangent space (n <= 4),
//! the Clifford action of `T + T*` on forms, and the split-signature pairing.
//!
//! Basis elements are subsets of `{1..n}` stored as bitmasks: bit `i` set
//! means `dx^{i+1}` is a factor, and factors are always taken in ascending
//! order. All product signs come from counting transpositions.
//!
//! [`Form`] and [`GcVec`] are generic over the coefficient ring so that the
//! same code runs on plain complex numbers and on jets (values carrying
//! derivatives); [`Multiform`] and [`GcVector`] are the pointwise aliases.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, GcxError, Result};

pub const MAX_DIM: usize = 4;

/// Coefficient ring for forms.
pub trait Coeff:
    Copy
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_c64(z: C64) -> Self;
    fn scale(self, s: C64) -> Self;
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z
    }
    fn scale(self, s: C64) -> Self {
        self * s
    }
}

/// Sign of `e_a ∧ e_b` relative to `e_{a∪b}`, or 0 when the factors overlap.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut swaps = 0;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    if swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `i_{∂_j} e_s` relative to `e_{s∖{j}}`, or 0 when `j ∉ s`.
pub fn interior_sign(j: usize, s: u32) -> i32 {
    if s & (1 << j) == 0 {
        return 0;
    }
    if (s & ((1u32 << j) - 1)).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn degree(mask: u32) -> usize {
    mask.count_ones() as usize
}

fn check_supported(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(GcxError::UnsupportedDimension(dim))
    }
}

/// Mixed-degree exterior form with `2^dim` coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Form<T> {
    dim: usize,
    coeffs: Vec<T>,
}

pub type Multiform = Form<C64>;

impl<T: Coeff> Form<T> {
    pub fn zero(dim: usize) -> Result<Self> {
        check_supported(dim)?;
        Ok(Form { dim, coeffs: vec![T::zero(); 1 << dim] })
    }

    /// The constant form `1`.
    pub fn one(dim: usize) -> Result<Self> {
        let mut f = Self::zero(dim)?;
        f.coeffs[0] = T::one();
        Ok(f)
    }

    /// A single basis element `c · e_mask`.
    pub fn monomial(dim: usize, mask: u32, c: T) -> Result<Self> {
        let mut f = Self::zero(dim)?;
        if mask as usize >= f.coeffs.len() {
            return Err(GcxError::InvalidArgument(format!("basis mask {mask} out of range")));
        }
        f.coeffs[mask as usize] = c;
        Ok(f)
    }

    /// Build a basis element from 1-based ascending indices.
    pub fn from_indices(dim: usize, indices: &[usize], c: T) -> Result<Self> {
        Self::monomial(dim, mask_from_indices(dim, indices)?, c)
    }

    pub fn from_coeffs(dim: usize, coeffs: Vec<T>) -> Result<Self> {
        check_supported(dim)?;
        check_dim(1 << dim, coeffs.len())?;
        Ok(Form { dim, coeffs })
    }

    /// The 1-form `Σ ξ_i dx^i`.
    pub fn one_form(xi: &[T]) -> Result<Self> {
        let mut f = Self::zero(xi.len())?;
        for (i, &c) in xi.iter().enumerate() {
            f.coeffs[1 << i] = c;
        }
        Ok(f)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, mask: u32) -> T {
        self.coeffs[mask as usize]
    }

    pub fn set(&mut self, mask: u32, c: T) {
        self.coeffs[mask as usize] = c;
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> Form<U> {
        Form { dim: self.dim, coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    /// Projection onto the degree-k part.
    pub fn grade(&self, k: usize) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, &c)| if degree(m as u32) == k { c } else { T::zero() })
            .collect();
        Form { dim: self.dim, coeffs }
    }

    pub fn scale(&self, s: C64) -> Self {
        self.map(|c| c.scale(s))
    }

    /// Multiply every coefficient by a ring element.
    pub fn mul_coeff(&self, s: T) -> Self {
        self.map(|c| s * c)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a + b).collect();
        Ok(Form { dim: self.dim, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| a - b).collect();
        Ok(Form { dim: self.dim, coeffs })
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut out = vec![T::zero(); self.coeffs.len()];
        for (a, &ca) in self.coeffs.iter().enumerate() {
            for (b, &cb) in other.coeffs.iter().enumerate() {
                match wedge_sign(a as u32, b as u32) {
                    0 => {}
                    1 => out[a | b] = out[a | b] + ca * cb,
                    _ => out[a | b] = out[a | b] - ca * cb,
                }
            }
        }
        Ok(Form { dim: self.dim, coeffs: out })
    }

    /// Interior product `i_X` with `X = Σ x_j ∂_j`.
    pub fn interior(&self, x: &[T]) -> Result<Self> {
        check_dim(self.dim, x.len())?;
        let mut out = vec![T::zero(); self.coeffs.len()];
        for (s, &c) in self.coeffs.iter().enumerate() {
            let s = s as u32;
            for (j, &xj) in x.iter().enumerate() {
                match interior_sign(j, s) {
                    0 => {}
                    1 => {
                        let t = (s & !(1 << j)) as usize;
                        out[t] = out[t] + xj * c;
                    }
                    _ => {
                        let t = (s & !(1 << j)) as usize;
                        out[t] = out[t] - xj * c;
                    }
                }
            }
        }
        Ok(Form { dim: self.dim, coeffs: out })
    }

    /// `Σ_j b^{∧j}/j!` without validating the degrees of `b`.
    pub(crate) fn exp_wedge_unchecked(&self) -> Self {
        let mut result = Form { dim: self.dim, coeffs: vec![T::zero(); self.coeffs.len()] };
        result.coeffs[0] = T::one();
        let mut term = result.clone();
        for j in 1..=self.dim {
            term = term.wedge(self).expect("same dim").scale(C64::new(1.0 / j as f64, 0.0));
            result = result.try_add(&term).expect("same dim");
        }
        result
    }

    /// Iterate over `(mask, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.coeffs.iter().enumerate().map(|(m, &c)| (m as u32, c))
    }
}

impl Multiform {
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |acc, c| acc.max(c.norm()))
    }

    /// Largest coefficient-wise difference.
    pub fn dist(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }

    /// Euclidean norm over all coefficients.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn re(&self) -> Self {
        self.map(|c| C64::new(c.re, 0.0))
    }

    pub fn im(&self) -> Self {
        self.map(|c| C64::new(c.im, 0.0))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.im.abs() <= tol)
    }

    /// True when every nonzero coefficient sits in degree `k`.
    pub fn is_homogeneous(&self, k: usize) -> bool {
        self.terms().all(|(m, c)| degree(m) == k || c == C64::new(0.0, 0.0))
    }

    /// Lowest degree carrying a coefficient above `tol · max|coefficient|`.
    pub fn lowest_degree(&self, tol: f64) -> Option<usize> {
        let threshold = tol * self.max_abs();
        if self.max_abs() == 0.0 {
            return None;
        }
        self.terms()
            .filter(|(_, c)| c.norm() > threshold)
            .map(|(m, _)| degree(m))
            .min()
    }

    /// Top-degree coefficient (of `dx^1 ∧ ... ∧ dx^n`).
    pub fn top(&self) -> C64 {
        self.coeffs[(1 << self.dim) - 1]
    }

    /// `Σ_j b^{∧j}/j!` for an even form with no scalar part.
    pub fn exp_wedge(&self) -> Result<Self> {
        for (m, c) in self.terms() {
            let d = degree(m);
            if (d == 0 || d % 2 == 1) && c != C64::new(0.0, 0.0) {
                return Err(GcxError::InvalidArgument(format!(
                    "exp_wedge needs an even form without scalar part; found degree {d} term"
                )));
            }
        }
        Ok(self.exp_wedge_unchecked())
    }
}

impl fmt::Display for Multiform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for m in ordered_masks(self.dim) {
            let c = self.coeff(m);
            if c.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i)", c.re, c.im)?;
            if m != 0 {
                let names: Vec<String> = indices_from_mask(m).iter().map(|i| format!("dx{i}")).collect();
                write!(f, " {}", names.join("^"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Masks ordered by degree, then lexicographically by index list.
pub fn ordered_masks(dim: usize) -> Vec<u32> {
    let mut masks: Vec<u32> = (0..(1u32 << dim)).collect();
    masks.sort_by_key(|&m| (degree(m), indices_from_mask(m)));
    masks
}

/// 1-based ascending indices of a mask.
pub fn indices_from_mask(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).map(|i| i + 1).collect()
}

pub fn mask_from_indices(dim: usize, indices: &[usize]) -> Result<u32> {
    let mut mask = 0u32;
    let mut prev = 0;
    for &i in indices {
        if i == 0 || i > dim {
            return Err(GcxError::InvalidArgument(format!("index {i} outside 1..={dim}")));
        }
        if i <= prev {
            return Err(GcxError::InvalidArgument(format!("indices must be strictly ascending: {indices:?}")));
        }
        prev = i;
        mask |= 1 << (i - 1);
    }
    Ok(mask)
}

/// Element `X + ξ` of `T ⊕ T*` (complexified when `T = C64`).
#[derive(Debug, Clone, PartialEq)]
pub struct GcVec<T> {
    pub vec: Vec<T>,
    pub cov: Vec<T>,
}

pub type GcVector = GcVec<C64>;

impl<T: Coeff> GcVec<T> {
    pub fn new(vec: Vec<T>, cov: Vec<T>) -> Result<Self> {
        check_dim(vec.len(), cov.len())?;
        check_supported(vec.len())?;
        Ok(GcVec { vec, cov })
    }

    pub fn zero(dim: usize) -> Result<Self> {
        Self::new(vec![T::zero(); dim], vec![T::zero(); dim])
    }

    /// The `k`-th element of the basis `(∂_1..∂_n, dx^1..dx^n)`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        let mut v = Self::zero(dim)?;
        if k < dim {
            v.vec[k] = T::one();
        } else if k < 2 * dim {
            v.cov[k - dim] = T::one();
        } else {
            return Err(GcxError::InvalidArgument(format!("basis index {k} out of range")));
        }
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    /// Coordinates `(X, ξ)` as one vector of length `2n`.
    pub fn coords(&self) -> Vec<T> {
        self.vec.iter().chain(&self.cov).copied().collect()
    }

    pub fn from_coords(dim: usize, coords: &[T]) -> Result<Self> {
        check_dim(2 * dim, coords.len())?;
        Self::new(coords[..dim].to_vec(), coords[dim..].to_vec())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dim(self.dim(), other.dim())?;
        Ok(GcVec {
            vec: self.vec.iter().zip(&other.vec).map(|(&a, &b)| a + b).collect(),
            cov: self.cov.iter().zip(&other.cov).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        GcVec {
            vec: self.vec.iter().map(|&c| c.scale(s)).collect(),
            cov: self.cov.iter().map(|&c| c.scale(s)).collect(),
        }
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(T) -> U) -> GcVec<U> {
        GcVec { vec: self.vec.iter().map(|&c| f(c)).collect(), cov: self.cov.iter().map(|&c| f(c)).collect() }
    }

    /// The covector part as a 1-form.
    pub fn cov_form(&self) -> Form<T> {
        Form::one_form(&self.cov).expect("supported dim")
    }

    /// B-field action `X + ξ ↦ X + ξ + i_X B`.
    pub fn b_field(&self, b: &Form<T>) -> Result<Self> {
        check_dim(self.dim(), b.dim())?;
        let shift = b.grade(2).interior(&self.vec)?;
        let cov = (0..self.dim()).map(|i| self.cov[i] + shift.coeff(1 << i)).collect();
        Ok(GcVec { vec: self.vec.clone(), cov })
    }
}

impl GcVector {
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.vec.iter().chain(&self.cov).all(|c| c.im.abs() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.vec.iter().chain(&self.cov).fold(0.0, |acc, c| acc.max(c.norm()))
    }

    pub fn dist(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }
}

/// Clifford action `(X + ξ)·ρ = i_X ρ + ξ ∧ ρ`.
pub fn clifford<T: Coeff>(v: &GcVec<T>, rho: &Form<T>) -> Result<Form<T>> {
    check_dim(v.dim(), rho.dim())?;
    let inner = rho.interior(&v.vec)?;
    let outer = v.cov_form().wedge(rho)?;
    inner.try_add(&outer)
}

/// Split-signature pairing `⟨X+ξ, Y+η⟩ = ½(η(X) + ξ(Y))`.
pub fn pairing<T: Coeff>(u: &GcVec<T>, v: &GcVec<T>) -> Result<T> {
    check_dim(u.dim(), v.dim())?;
    let mut acc = T::zero();
    for i in 0..u.dim() {
        acc = acc + v.cov[i] * u.vec[i] + u.cov[i] * v.vec[i];
    }
    Ok(acc.scale(C64::new(0.5, 0.0)))
}

/// Matrix `W` of the map `X ↦ i_X β` for a 2-form `β`: `(i_X β)_j = Σ_i W[j][i] X_i`.
pub fn contraction_matrix(beta: &Multiform) -> Vec<Vec<C64>> {
    let n = beta.dim();
    let mut w = vec![vec![C64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[i] = C64::new(1.0, 0.0);
        let col = beta.grade(2).interior(&e).expect("dims match");
        for (j, row) in w.iter_mut().enumerate() {
            row[i] = col.coeff(1 << j);
        }
    }
    w
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    indices: Vec<usize>,
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct MultiformJson {
    dim: usize,
    terms: Vec<TermJson>,
}

impl Serialize for Multiform {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let terms = ordered_masks(self.dim)
            .into_iter()
            .filter(|&m| self.coeff(m) != C64::new(0.0, 0.0))
            .map(|m| {
                let c = self.coeff(m);
                TermJson { indices: indices_from_mask(m), re: c.re, im: c.im }
            })
            .collect();
        MultiformJson { dim: self.dim, terms }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Multiform {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = MultiformJson::deserialize(d)?;
        if !(2..=MAX_DIM).contains(&raw.dim) {
            return Err(D::Error::custom(format!("dim {} outside 2..=4", raw.dim)));
        }
        let mut f = Multiform::zero(raw.dim).map_err(D::Error::custom)?;
        for t in raw.terms {
            let m = mask_from_indices(raw.dim, &t.indices).map_err(D::Error::custom)?;
            f.set(m, f.coeff(m) + C64::new(t.re, t.im));
        }
        Ok(f)
    }
}

#[derive(Serialize, Deserialize)]
struct GcVectorJson {
    dim: usize,
    vec: Vec<[f64; 2]>,
    cov: Vec<[f64; 2]>,
}

impl Serialize for GcVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GcVectorJson {
            dim: self.dim(),
            vec: self.vec.iter().map(|c| [c.re, c.im]).collect(),
            cov: self.cov.iter().map(|c| [c.re, c.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GcVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let raw = GcVectorJson::deserialize(d)?;
        if raw.vec.len() != raw.dim || raw.cov.len() != raw.dim {
            return Err(D::Error::custom("vec/cov length must equal dim"));
        }
        let conv = |v: &[[f64; 2]]| v.iter().map(|p| C64::new(p[0], p[1])).collect::<Vec<_>>();
        GcVec::new(conv(&raw.vec), conv(&raw.cov)).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn basis_form(dim: usize, idx: &[usize]) -> Multiform {
        Multiform::from_indices(dim, idx, c(1.0, 0.0)).unwrap()
    }

    /// Independent sign oracle: sort the concatenated index list by adjacent
    /// swaps and count them.
    fn bubble_sign(a: &[usize], b: &[usize]) -> i32 {
        let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
        let mut sign = 1;
        for i in 0..v.len() {
            for j in 0..v.len() - 1 - i {
                if v[j] == v[j + 1] {
                    return 0;
                }
                if v[j] > v[j + 1] {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            0
        } else {
            sign
        }
    }

    #[test]
    fn wedge_sign_matches_bubble_sort_exhaustively() {
        for a in 0..16u32 {
            for b in 0..16u32 {
                let ia = indices_from_mask(a);
                let ib = indices_from_mask(b);
                assert_eq!(wedge_sign(a, b), bubble_sign(&ia, &ib), "a={a} b={b}");
            }
        }
    }

    #[test]
    fn clifford_examples() {
        let e1 = GcVector::basis(4, 0).unwrap();
        assert_eq!(clifford(&e1, &basis_form(4, &[1])).unwrap(), Multiform::one(4).unwrap());

        let dx1 = GcVector::basis(4, 4).unwrap();
        assert_eq!(clifford(&dx1, &Multiform::one(4).unwrap()).unwrap(), basis_form(4, &[1]));

        // v = (∂2, dx1), ρ = dx1∧dx2: interior gives −dx1, wedge gives 0
        let v = GcVector::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let out = clifford(&v, &basis_form(4, &[1, 2])).unwrap();
        assert_eq!(out, basis_form(4, &[1]).scale(c(-1.0, 0.0)));
    }

    #[test]
    fn clifford_rejects_mixed_dims() {
        let v = GcVector::basis(3, 0).unwrap();
        assert!(matches!(
            clifford(&v, &basis_form(4, &[1])),
            Err(GcxError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn pairing_examples() {
        let u = GcVector::new(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(pairing(&u, &u).unwrap(), c(1.0, 0.0));

        let a = GcVector::basis(4, 0).unwrap();
        let b = GcVector::basis(4, 1).unwrap();
        assert_eq!(pairing(&a, &b).unwrap(), c(0.0, 0.0));

        let u = GcVector::new(
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let v = GcVector::new(
            vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        assert_eq!(pairing(&u, &v).unwrap(), c(2.5, 0.0));
    }

    #[test]
    fn exp_wedge_examples() {
        let zero = Multiform::zero(4).unwrap();
        assert_eq!(zero.exp_wedge().unwrap(), Multiform::one(4).unwrap());

        let b = basis_form(4, &[1, 2]);
        let expected = Multiform::one(4).unwrap().try_add(&b).unwrap();
        assert_eq!(b.exp_wedge().unwrap(), expected);

        // series oracle: 1 + ω0 + ω0∧ω0/2, and ω0∧ω0 = 2 dx1234
        let w0 = basis_form(4, &[1, 2]).try_add(&basis_form(4, &[3, 4])).unwrap();
        let expected = Multiform::one(4)
            .unwrap()
            .try_add(&w0)
            .unwrap()
            .try_add(&basis_form(4, &[1, 2, 3, 4]))
            .unwrap();
        assert_eq!(w0.exp_wedge().unwrap(), expected);
    }

    #[test]
    fn exp_wedge_rejects_bad_degrees() {
        assert!(Multiform::one(4).unwrap().exp_wedge().is_err());
        assert!(basis_form(4, &[2]).exp_wedge().is_err());
        assert!(basis_form(4, &[1, 2, 3]).exp_wedge().is_err());
    }

    #[test]
    fn graded_commutativity() {
        for a in 0..16u32 {
            for b in 0..16u32 {
                let fa = Multiform::monomial(4, a, c(1.0, 0.0)).unwrap();
                let fb = Multiform::monomial(4, b, c(1.0, 0.0)).unwrap();
                let ab = fa.wedge(&fb).unwrap();
                let ba = fb.wedge(&fa).unwrap();
                let s = if (degree(a) * degree(b)).is_multiple_of(2) { 1.0 } else { -1.0 };
                assert_eq!(ab, ba.scale(c(s, 0.0)));
            }
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let text = r#"{"dim": 4, "terms": [{"indices": [1,2], "re": 0.0, "im": 1.0}, {"indices": [], "re": 2.0, "im": 0.0}]}"#;
        let f: Multiform = serde_json::from_str(text).unwrap();
        assert_eq!(f.coeff(0b11), c(0.0, 1.0));
        assert_eq!(f.coeff(0), c(2.0, 0.0));
        let back: Multiform = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);

        let bad = r#"{"dim": 4, "terms": [{"indices": [2,1], "re": 1.0, "im": 0.0}]}"#;
        assert!(serde_json::from_str::<Multiform>(bad).is_err());
        let bad = r#"{"dim": 5, "terms": []}"#;
        assert!(serde_json::from_str::<Multiform>(bad).is_err());
    }

    #[test]
    fn b_field_shifts_covector() {
        let b = basis_form(4, &[1, 2]);
        let v = GcVector::basis(4, 0).unwrap().b_field(&b).unwrap();
        assert_eq!(v.cov[1], c(1.0, 0.0));
        let w = contraction_matrix(&b);
        assert_eq!(w[1][0], c(1.0, 0.0));
        assert_eq!(w[0][1], c(-1.0, 0.0));
    }
}
