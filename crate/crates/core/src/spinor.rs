//! Pointwise pure-spinor theory: annihilators, purity, the normal form
//! `e^{B+iω} ∧ Ω`, type, nondegeneracy, B-transforms and the generalized
//! complex endomorphism `J`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{GcxError, Result};
use crate::linalg;
use crate::multilinear::{clifford, contraction_matrix, degree, pairing, GcVector, Multiform};

/// Default relative pivot threshold for rank decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Round-trip tolerance above which `normal_form` reports an internal failure.
const RECONSTRUCTION_TOL: f64 = 1e-8;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Basis of `L = {v : v·ρ = 0}`.
#[derive(Debug, Clone)]
pub struct AnnihilatorBasis {
    pub dim: usize,
    pub vectors: Vec<GcVector>,
    pub tol: f64,
}

impl AnnihilatorBasis {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Largest `|⟨u, v⟩|` over pairs of (max-normalized) basis vectors.
    pub fn isotropy_defect(&self) -> f64 {
        let unit: Vec<GcVector> = self
            .vectors
            .iter()
            .map(|v| v.scale(C64::new(1.0 / v.max_abs(), 0.0)))
            .collect();
        let mut worst: f64 = 0.0;
        for a in &unit {
            for b in &unit {
                worst = worst.max(pairing(a, b).expect("same dim").norm());
            }
        }
        worst
    }

    /// Columns are the basis vectors in `(X, ξ)` coordinates.
    pub fn matrix(&self) -> DMatrix<C64> {
        let n2 = 2 * self.dim;
        let mut m = DMatrix::from_element(n2, self.vectors.len(), ZERO);
        for (j, v) in self.vectors.iter().enumerate() {
            for (i, c) in v.coords().into_iter().enumerate() {
                m[(i, j)] = c;
            }
        }
        m
    }
}

/// The `2^n × 2n` matrix of `v ↦ v·ρ` in the basis `(∂_1..∂_n, dx^1..dx^n)`.
pub fn action_matrix(rho: &Multiform) -> DMatrix<C64> {
    let n = rho.dim();
    let mut a = DMatrix::from_element(1 << n, 2 * n, ZERO);
    for k in 0..2 * n {
        let e = GcVector::basis(n, k).expect("valid basis index");
        let col = clifford(&e, rho).expect("same dim");
        for (m, c) in col.terms() {
            a[(m as usize, k)] = c;
        }
    }
    a
}

pub fn annihilator(rho: &Multiform, tol: f64) -> Result<AnnihilatorBasis> {
    if rho.max_abs() == 0.0 {
        return Err(GcxError::ZeroSpinor("the zero form is annihilated by everything".into()));
    }
    let n = rho.dim();
    let vectors = linalg::kernel(&action_matrix(rho), tol)
        .into_iter()
        .map(|v| GcVector::from_coords(n, v.as_slice()).expect("2n coordinates"))
        .collect();
    Ok(AnnihilatorBasis { dim: n, vectors, tol })
}

pub fn is_pure(rho: &Multiform, tol: f64) -> Result<bool> {
    let ann = annihilator(rho, tol)?;
    if ann.len() != rho.dim() {
        return Ok(false);
    }
    let defect = ann.isotropy_defect();
    if defect > 1e-6 {
        return Err(GcxError::Internal(format!("maximal annihilator is not isotropic (defect {defect:e})")));
    }
    Ok(true)
}

/// Decomposition `ρ = e^{B+iω} ∧ Ω` of a pure spinor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    #[serde(rename = "type")]
    pub k: usize,
    pub omega0: Multiform,
    #[serde(rename = "B")]
    pub b: Multiform,
    pub omega: Multiform,
    /// False when `B + iω` was only fixed up to a gauge (minimal-norm choice).
    pub gauge_unique: bool,
}

impl NormalForm {
    /// `B + iω` as one complex 2-form.
    pub fn beta(&self) -> Multiform {
        self.b.try_add(&self.omega.scale(C64::new(0.0, 1.0))).expect("same dim")
    }

    /// `e^{B+iω} ∧ Ω`.
    pub fn reconstruct(&self) -> Multiform {
        self.beta().exp_wedge().expect("pure 2-form").wedge(&self.omega0).expect("same dim")
    }
}

pub fn normal_form(rho: &Multiform, tol: f64) -> Result<NormalForm> {
    let n = rho.dim();
    if !is_pure(rho, tol)? {
        let kernel_dim = annihilator(rho, tol)?.len();
        return Err(GcxError::NotPure { kernel_dim, expected: n });
    }
    let k = rho.lowest_degree(tol).expect("nonzero spinor");
    let omega0 = rho.grade(k);
    let (beta, gauge_unique) = if k == 0 {
        (rho.grade(2).scale(1.0 / rho.coeff(0)), true)
    } else if k + 2 <= n {
        (min_norm_beta(&omega0, &rho.grade(k + 2), tol), false)
    } else {
        (Multiform::zero(n)?, false)
    };
    let nf = NormalForm { k, omega0, b: beta.re(), omega: beta.im(), gauge_unique };
    let err = nf.reconstruct().dist(rho)? / rho.max_abs();
    if err > RECONSTRUCTION_TOL {
        return Err(GcxError::Internal(format!("normal form does not reproduce the spinor (relative error {err:e})")));
    }
    Ok(nf)
}

/// Minimal-norm complex 2-form `β` with `β ∧ Ω = target`.
fn min_norm_beta(omega0: &Multiform, target: &Multiform, tol: f64) -> Multiform {
    let n = omega0.dim();
    let two_forms: Vec<u32> = (0..(1u32 << n)).filter(|&m| degree(m) == 2).collect();
    let rows: Vec<u32> = (0..(1u32 << n)).filter(|&m| degree(m) == degree_of(target)).collect();
    let mut m = DMatrix::from_element(rows.len(), two_forms.len(), ZERO);
    for (j, &b) in two_forms.iter().enumerate() {
        let e = Multiform::monomial(n, b, C64::new(1.0, 0.0)).expect("valid mask");
        let img = e.wedge(omega0).expect("same dim");
        for (i, &r) in rows.iter().enumerate() {
            m[(i, j)] = img.coeff(r);
        }
    }
    let rhs = DVector::from_iterator(rows.len(), rows.iter().map(|&r| target.coeff(r)));
    // β = M^H y with M M^H y = rhs is the minimal-norm solution
    let mmh = &m * m.adjoint();
    let (y, _) = linalg::least_squares(&mmh, &rhs, tol);
    let coeffs = m.adjoint() * y;
    let mut beta = Multiform::zero(n).expect("supported dim");
    for (j, &b) in two_forms.iter().enumerate() {
        beta.set(b, coeffs[j]);
    }
    beta
}

fn degree_of(f: &Multiform) -> usize {
    f.terms().find(|(_, c)| *c != ZERO).map(|(m, _)| degree(m)).unwrap_or(0)
}

/// Nondegeneracy `Ω ∧ Ω̄ ∧ ω^{n-k} ≠ 0`, with `2n` the real dimension.
/// `Ω` is rescaled to unit max coefficient before the top term is compared
/// against `tol`.
pub fn check_nondegenerate(nf: &NormalForm, tol: f64) -> bool {
    let dim = nf.omega0.dim();
    if dim % 2 == 1 {
        return false;
    }
    let half = dim / 2;
    if nf.k > half {
        return false;
    }
    let scale = nf.omega0.max_abs();
    if scale == 0.0 {
        return false;
    }
    let om = nf.omega0.scale(C64::new(1.0 / scale, 0.0));
    let mut acc = om.wedge(&om.conj()).expect("same dim");
    for _ in 0..(half - nf.k) {
        acc = acc.wedge(&nf.omega).expect("same dim");
    }
    acc.top().norm() > tol
}

fn require_real_two_form(b: &Multiform, what: &str) -> Result<()> {
    if !b.is_homogeneous(2) {
        return Err(GcxError::InvalidArgument(format!("{what} must be a 2-form")));
    }
    if !b.is_real(1e-14 * b.max_abs().max(1.0)) {
        return Err(GcxError::InvalidArgument(format!("{what} must be real")));
    }
    Ok(())
}

/// `e^B ∧ ρ` for a real 2-form `B`.
pub fn b_transform(b: &Multiform, rho: &Multiform) -> Result<Multiform> {
    require_real_two_form(b, "B")?;
    b.exp_wedge()?.wedge(rho)
}

/// `e^{iω}` for a real nondegenerate 2-form.
pub fn from_symplectic(omega: &Multiform, tol: f64) -> Result<Multiform> {
    require_real_two_form(omega, "ω")?;
    let n = omega.dim();
    if n % 2 == 1 {
        return Err(GcxError::Degenerate("no symplectic form in odd dimension".into()));
    }
    let mut power = Multiform::one(n)?;
    for _ in 0..n / 2 {
        power = power.wedge(omega)?;
    }
    let top = power.top().norm();
    if top <= tol {
        return Err(GcxError::Degenerate(format!("top power of ω is {top:e}")));
    }
    omega.scale(C64::new(0.0, 1.0)).exp_wedge()
}

/// Canonical spinor of an almost complex structure `I` on `T`: the wedge of
/// a basis of `(1,0)`-covectors, i.e. solutions of `ξ ∘ I = iξ`, normalized so
/// that the first largest coefficient equals 1.
pub fn from_complex(i_mat: &DMatrix<f64>) -> Result<Multiform> {
    let n = i_mat.nrows();
    if i_mat.ncols() != n || n % 2 == 1 {
        return Err(GcxError::InvalidArgument("I must be an even square matrix".into()));
    }
    let sq = i_mat * i_mat + DMatrix::<f64>::identity(n, n);
    if sq.amax() > 1e-9 {
        return Err(GcxError::InvalidArgument(format!("I² ≠ -1 (defect {:e})", sq.amax())));
    }
    let it = i_mat.transpose().map(|x| C64::new(x, 0.0));
    let shifted = it - DMatrix::<C64>::identity(n, n) * C64::new(0.0, crate::conventions::HOLOMORPHIC_EIGEN_SIGN);
    let covectors = linalg::kernel(&shifted, DEFAULT_TOL);
    if covectors.len() != n / 2 {
        return Err(GcxError::Internal(format!("found {} (1,0)-covectors, expected {}", covectors.len(), n / 2)));
    }
    let mut omega = Multiform::one(n)?;
    for xi in &covectors {
        omega = omega.wedge(&Multiform::one_form(xi.as_slice())?)?;
    }
    let max = omega.max_abs();
    let lead = omega
        .terms()
        .find(|(_, c)| c.norm() >= max * (1.0 - 1e-12))
        .map(|(_, c)| c)
        .expect("nonzero wedge");
    Ok(omega.scale(1.0 / lead))
}

/// Real endomorphism of `T ⊕ T*` in `(X, ξ)` coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct GcEndomorphism {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
}

impl GcEndomorphism {
    /// `max |J² + 1|`.
    pub fn square_defect(&self) -> f64 {
        let n2 = 2 * self.dim;
        (&self.matrix * &self.matrix + DMatrix::<f64>::identity(n2, n2)).amax()
    }

    /// `max |JᵀGJ - G|` with `G` the pairing Gram matrix.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = gram_matrix(self.dim);
        (self.matrix.transpose() * &g * &self.matrix - g).amax()
    }
}

/// Gram matrix of the pairing on the real basis `(∂_i, dx^i)`.
pub fn gram_matrix(dim: usize) -> DMatrix<f64> {
    let mut g = DMatrix::zeros(2 * dim, 2 * dim);
    for i in 0..dim {
        g[(i, dim + i)] = 0.5;
        g[(dim + i, i)] = 0.5;
    }
    g
}

/// Matrix of the B-field action `X + ξ ↦ X + ξ + i_X B`.
pub fn b_field_matrix(b: &Multiform) -> DMatrix<f64> {
    let n = b.dim();
    let w = contraction_matrix(b);
    let mut e = DMatrix::<f64>::identity(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            e[(n + j, i)] = w[j][i].re;
        }
    }
    e
}

/// The structure acting as `+i` on `annihilator(ρ)` and `-i` on its conjugate.
pub fn j_endomorphism(rho: &Multiform, tol: f64) -> Result<GcEndomorphism> {
    let n = rho.dim();
    let ann = annihilator(rho, tol)?;
    if ann.len() != n {
        return Err(GcxError::NotPure { kernel_dim: ann.len(), expected: n });
    }
    let l = ann.matrix();
    let mut p = DMatrix::from_element(2 * n, 2 * n, ZERO);
    p.view_mut((0, 0), (2 * n, n)).copy_from(&l);
    p.view_mut((0, n), (2 * n, n)).copy_from(&l.map(|c| c.conj()));
    if linalg::rank(&p, tol) < 2 * n {
        return Err(GcxError::Degenerate("degenerate spinor, no J exists (L ∩ L̄ ≠ 0)".into()));
    }
    let p_inv = linalg::inverse(&p, tol)?;
    let mut d = DMatrix::from_element(2 * n, 2 * n, ZERO);
    for i in 0..n {
        d[(i, i)] = C64::new(0.0, 1.0);
        d[(n + i, n + i)] = C64::new(0.0, -1.0);
    }
    let j = &p * d * p_inv;
    let imag = j.iter().fold(0.0f64, |acc, c| acc.max(c.im.abs()));
    let scale = j.iter().fold(1.0f64, |acc, c| acc.max(c.re.abs()));
    if imag > 1e-8 * scale {
        return Err(GcxError::Internal(format!("J is not real (imaginary part {imag:e})")));
    }
    Ok(GcEndomorphism { dim: n, matrix: j.map(|c| c.re) })
}

/// Standard objects on `R^4` with coordinates `(x1, y1, x2, y2)`.
pub mod standard {
    use super::*;

    /// `ω0 = dx^1∧dx^2 + dx^3∧dx^4`.
    pub fn omega0() -> Multiform {
        let a = Multiform::from_indices(4, &[1, 2], C64::new(1.0, 0.0)).expect("valid");
        let b = Multiform::from_indices(4, &[3, 4], C64::new(1.0, 0.0)).expect("valid");
        a.try_add(&b).expect("same dim")
    }

    /// `dz^1 = dx^1 + i dx^2`.
    pub fn dz1() -> Multiform {
        Multiform::one_form(&[C64::new(1.0, 0.0), C64::new(0.0, 1.0), ZERO, ZERO]).expect("valid")
    }

    /// `dz^2 = dx^3 + i dx^4`.
    pub fn dz2() -> Multiform {
        Multiform::one_form(&[ZERO, ZERO, C64::new(1.0, 0.0), C64::new(0.0, 1.0)]).expect("valid")
    }

    pub fn dz1_dz2() -> Multiform {
        dz1().wedge(&dz2()).expect("same dim")
    }

    /// `I ∂x = ∂y`, `I ∂y = -∂x` on each coordinate pair.
    pub fn complex_structure(dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for p in 0..dim / 2 {
            m[(2 * p + 1, 2 * p)] = 1.0;
            m[(2 * p, 2 * p + 1)] = -1.0;
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;
    use crate::multilinear::GcVec;

    const TOL: f64 = DEFAULT_TOL;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn dx(idx: &[usize]) -> Multiform {
        Multiform::from_indices(4, idx, c(1.0, 0.0)).unwrap()
    }

    /// Does the annihilator span contain `v`? Checked by rank.
    fn spans(ann: &AnnihilatorBasis, v: &GcVector) -> bool {
        let m = ann.matrix();
        let mut ext = DMatrix::from_element(m.nrows(), m.ncols() + 1, ZERO);
        ext.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(&m);
        for (i, x) in v.coords().into_iter().enumerate() {
            ext[(i, m.ncols())] = x;
        }
        linalg::rank(&ext, 1e-9) == m.ncols()
    }

    #[test]
    fn annihilator_of_symplectic_spinor() {
        let w = omega0();
        let rho = from_symplectic(&w, TOL).unwrap();
        let ann = annihilator(&rho, TOL).unwrap();
        assert_eq!(ann.len(), 4);
        let wm = contraction_matrix(&w);
        for j in 0..4 {
            let mut x = vec![ZERO; 4];
            x[j] = c(1.0, 0.0);
            let cov: Vec<C64> = (0..4).map(|r| wm[r][j] * c(0.0, -1.0)).collect();
            assert!(spans(&ann, &GcVec::new(x, cov).unwrap()));
        }
        assert!(ann.isotropy_defect() <= 1e-12);
    }

    #[test]
    fn annihilator_of_complex_spinor() {
        let ann = annihilator(&dz1_dz2(), TOL).unwrap();
        assert_eq!(ann.len(), 4);
        // T^{0,1} is spanned by ∂x + i∂y on each pair
        let zbar1 = GcVec::new(vec![c(1.0, 0.0), c(0.0, 1.0), ZERO, ZERO], vec![ZERO; 4]).unwrap();
        let zbar2 = GcVec::new(vec![ZERO, ZERO, c(1.0, 0.0), c(0.0, 1.0)], vec![ZERO; 4]).unwrap();
        assert!(spans(&ann, &zbar1));
        assert!(spans(&ann, &zbar2));
        let d1 = GcVec::new(vec![ZERO; 4], vec![c(1.0, 0.0), c(0.0, 1.0), ZERO, ZERO]).unwrap();
        let d2 = GcVec::new(vec![ZERO; 4], vec![ZERO, ZERO, c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(spans(&ann, &d1));
        assert!(spans(&ann, &d2));
    }

    #[test]
    fn annihilator_of_dx1_by_brute_force() {
        let ann = annihilator(&dx(&[1]), TOL).unwrap();
        assert_eq!(ann.len(), 4);
        for v in &ann.vectors {
            assert!(v.vec[0].norm() < 1e-15);
            assert!(v.cov[1..].iter().all(|c| c.norm() < 1e-15));
        }
        assert!(annihilator(&Multiform::zero(4).unwrap(), TOL).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!(is_pure(&from_symplectic(&omega0(), TOL).unwrap(), TOL).unwrap());
        assert!(!is_pure(&omega0(), TOL).unwrap());
        assert!(is_pure(&Multiform::one(4).unwrap(), TOL).unwrap());
    }

    #[test]
    fn normal_form_of_local_model_value() {
        // z1 + dz1∧dz2 at z1 = 1
        let rho = Multiform::one(4).unwrap().try_add(&dz1_dz2()).unwrap();
        let nf = normal_form(&rho, TOL).unwrap();
        assert_eq!(nf.k, 0);
        assert_eq!(nf.omega0.coeff(0), c(1.0, 0.0));
        assert!(nf.beta().dist(&dz1_dz2()).unwrap() < 1e-15);
        assert!(nf.gauge_unique);

        let nf = normal_form(&dz1_dz2(), TOL).unwrap();
        assert_eq!(nf.k, 2);
        assert_eq!(nf.omega0, dz1_dz2());
        assert!(!nf.gauge_unique);

        let nf = normal_form(&from_symplectic(&omega0(), TOL).unwrap(), TOL).unwrap();
        assert_eq!(nf.k, 0);
        assert!(nf.b.max_abs() < 1e-15);
        assert!(nf.omega.dist(&omega0()).unwrap() < 1e-15);
    }

    #[test]
    fn normal_form_rejects_impure() {
        assert!(matches!(normal_form(&omega0(), TOL), Err(GcxError::NotPure { .. })));
    }

    #[test]
    fn nondegeneracy_examples() {
        let nf = normal_form(&from_symplectic(&omega0(), TOL).unwrap(), TOL).unwrap();
        assert!(check_nondegenerate(&nf, TOL));

        let om = Multiform::one_form(&[c(1.0, 0.0), c(0.0, 1.0), ZERO, ZERO]).unwrap();
        let nf = NormalForm {
            k: 1,
            omega0: om.clone(),
            b: Multiform::zero(4).unwrap(),
            omega: Multiform::zero(4).unwrap(),
            gauge_unique: false,
        };
        // Ω∧Ω̄ = -2i dx1∧dx2 but ω = 0 kills the top term
        assert_eq!(om.wedge(&om.conj()).unwrap().coeff(0b11), c(0.0, -2.0));
        assert!(!check_nondegenerate(&nf, TOL));

        let rho = Multiform::one(4).unwrap().try_add(&dz1_dz2()).unwrap();
        assert!(check_nondegenerate(&normal_form(&rho, TOL).unwrap(), TOL));
        assert!(check_nondegenerate(&normal_form(&dz1_dz2(), TOL).unwrap(), TOL));
    }

    #[test]
    fn b_transform_examples() {
        let rho = from_symplectic(&omega0(), TOL).unwrap();
        assert_eq!(b_transform(&Multiform::zero(4).unwrap(), &rho).unwrap(), rho);

        let b = dx(&[1, 3]).try_add(&dx(&[2, 4]).scale(c(-0.5, 0.0))).unwrap();
        let lhs = b_transform(&b, &rho).unwrap();
        let rhs = b.try_add(&omega0().scale(c(0.0, 1.0))).unwrap().exp_wedge().unwrap();
        assert!(lhs.dist(&rhs).unwrap() < 1e-15);

        let t = b_transform(&dx(&[1, 3]), &dz1_dz2()).unwrap();
        assert_eq!(normal_form(&t, TOL).unwrap().k, 2);

        assert!(b_transform(&dx(&[1]), &rho).is_err());
        assert!(b_transform(&dx(&[1, 2]).scale(c(0.0, 1.0)), &rho).is_err());
    }

    #[test]
    fn from_symplectic_examples() {
        let rho = from_symplectic(&omega0(), TOL).unwrap();
        let expected = Multiform::one(4)
            .unwrap()
            .try_add(&omega0().scale(c(0.0, 1.0)))
            .unwrap()
            .try_sub(&dx(&[1, 2, 3, 4]))
            .unwrap();
        assert!(rho.dist(&expected).unwrap() < 1e-15);
        assert_eq!(normal_form(&rho, TOL).unwrap().k, 0);
        assert!(matches!(from_symplectic(&dx(&[1, 2]), TOL), Err(GcxError::Degenerate(_))));
    }

    #[test]
    fn from_complex_examples() {
        let i = complex_structure(4);
        let rho = from_complex(&i).unwrap();
        assert!(rho.dist(&dz1_dz2()).unwrap() < 1e-14);
        assert_eq!(normal_form(&rho, TOL).unwrap().k, 4 / 2);

        let j = j_endomorphism(&rho, TOL).unwrap();
        let mut expected = DMatrix::zeros(8, 8);
        expected.view_mut((0, 0), (4, 4)).copy_from(&(-&i));
        expected.view_mut((4, 4), (4, 4)).copy_from(&i.transpose());
        assert!((j.matrix - expected).amax() < 1e-12);

        let mut bad = complex_structure(4);
        bad[(0, 0)] = 1.0;
        assert!(from_complex(&bad).is_err());
    }

    #[test]
    fn j_of_symplectic_spinor() {
        let w = omega0();
        let rho = from_symplectic(&w, TOL).unwrap();
        let j = j_endomorphism(&rho, TOL).unwrap();
        let wm = DMatrix::from_fn(4, 4, |r, c| contraction_matrix(&w)[r][c].re);
        let w_inv = wm.clone().try_inverse().unwrap();
        let mut expected = DMatrix::zeros(8, 8);
        expected.view_mut((0, 4), (4, 4)).copy_from(&(-w_inv));
        expected.view_mut((4, 0), (4, 4)).copy_from(&wm);
        assert!((j.matrix.clone() - expected).amax() < 1e-12);
        assert!(j.square_defect() < 1e-12);
        assert!(j.orthogonality_defect() < 1e-12);
    }

    #[test]
    fn j_rejects_real_spinor() {
        // dx1∧dx2 is pure but L = L̄
        let err = j_endomorphism(&dx(&[1, 2]), TOL).unwrap_err();
        assert!(matches!(err, GcxError::Degenerate(_)));
    }

    #[test]
    fn normal_form_json_shape() {
        let nf = normal_form(&dz1_dz2(), TOL).unwrap();
        let v: serde_json::Value = serde_json::to_value(&nf).unwrap();
        assert_eq!(v["type"], 2);
        assert_eq!(v["gauge_unique"], false);
        assert!(v["B"]["terms"].is_array());
        assert!(v["omega0"]["dim"] == 4);
    }
}
