//! Calculus on coordinate charts.
//!
//! Fields are evaluated as jets at a point (value plus exact first and
//! second partials, see [`Jet`]). On top of that this module provides the
//! exterior derivative, the `H`-twisted Courant bracket, pullback along
//! chart maps, and the least-squares integrability witness for
//! `dρ + H∧ρ = v·ρ`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};

use crate::error::{check_dim, GcxError, Result};
use crate::jet::Jet;
use crate::linalg;
use crate::multilinear::{Coeff, Form, GcVec, GcVector, Multiform};
use crate::spinor::action_matrix;

pub type FormJet = Form<Jet>;
pub type VectorJet = GcVec<Jet>;

/// A point in a named chart. Coordinates flagged periodic are angles with
/// unit period and are stored reduced to `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    pub chart: String,
    pub coords: Vec<f64>,
    pub periodic: u8,
}

impl ChartPoint {
    pub fn new(chart: impl Into<String>, coords: Vec<f64>, periodic: u8) -> Self {
        let coords = coords
            .into_iter()
            .enumerate()
            .map(|(i, x)| if periodic & (1 << i) != 0 { reduce_angle(x) } else { x })
            .collect();
        ChartPoint { chart: chart.into(), coords, periodic }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate-wise distance, measured modulo 1 on periodic coordinates.
    pub fn distance(&self, other: &ChartPoint) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .enumerate()
            .map(|(i, (a, b))| {
                let d = (a - b).abs();
                if self.periodic & (1 << i) != 0 {
                    d.min(1.0 - d)
                } else {
                    d
                }
            })
            .fold(0.0, f64::max)
    }
}

impl Serialize for ChartPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

/// Reduce an angle with unit period into `[0, 1)`.
pub fn reduce_angle(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

pub trait FormJetExt {
    fn value(&self) -> Multiform;
    fn partial(&self, i: usize) -> Result<FormJet>;
    fn order(&self) -> u8;
}

impl FormJetExt for FormJet {
    fn value(&self) -> Multiform {
        self.map(|j| j.v)
    }

    fn partial(&self, i: usize) -> Result<FormJet> {
        let coeffs = self.coeffs().iter().map(|j| j.partial(i)).collect::<Result<Vec<_>>>()?;
        Form::from_coeffs(self.dim(), coeffs)
    }

    fn order(&self) -> u8 {
        self.coeffs().iter().map(|j| j.order).min().unwrap_or(2)
    }
}

pub trait VectorJetExt {
    fn value(&self) -> GcVector;
}

impl VectorJetExt for VectorJet {
    fn value(&self) -> GcVector {
        self.map(|j| j.v)
    }
}

/// A form-valued field on a chart.
pub trait FormField: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, p: &[f64]) -> Result<FormJet>;

    fn value(&self, p: &[f64]) -> Result<Multiform> {
        Ok(self.jet(p)?.value())
    }
}

/// A field of (complexified) generalized vectors `X + ξ`.
pub trait VectorField: Send + Sync {
    fn dim(&self) -> usize;
    fn jet(&self, p: &[f64]) -> Result<VectorJet>;
}

type FormFn = dyn Fn(&[Jet]) -> Result<FormJet> + Send + Sync;
type VectorFn = dyn Fn(&[Jet]) -> Result<VectorJet> + Send + Sync;

/// A form field given by a closure over coordinate jets.
#[derive(Clone)]
pub struct FnForm {
    dim: usize,
    f: Arc<FormFn>,
}

impl FnForm {
    pub fn new(dim: usize, f: impl Fn(&[Jet]) -> Result<FormJet> + Send + Sync + 'static) -> Self {
        FnForm { dim, f: Arc::new(f) }
    }

    /// The same form at every point.
    pub fn constant(value: Multiform) -> Self {
        let dim = value.dim();
        FnForm::new(dim, move |_| Ok(value.map(Jet::constant)))
    }

    /// The zero form.
    pub fn zero(dim: usize) -> Self {
        FnForm::constant(Multiform::zero(dim).expect("supported dim"))
    }
}

impl fmt::Debug for FnForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnForm(dim={})", self.dim)
    }
}

impl FormField for FnForm {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        check_dim(self.dim, p.len())?;
        let out = (self.f)(&Jet::seed(p))?;
        check_dim(self.dim, out.dim())?;
        Ok(out)
    }
}

#[derive(Clone)]
pub struct FnVector {
    dim: usize,
    f: Arc<VectorFn>,
}

impl FnVector {
    pub fn new(dim: usize, f: impl Fn(&[Jet]) -> Result<VectorJet> + Send + Sync + 'static) -> Self {
        FnVector { dim, f: Arc::new(f) }
    }

    pub fn constant(value: GcVector) -> Self {
        let dim = value.dim();
        FnVector::new(dim, move |_| Ok(value.map(Jet::constant)))
    }
}

impl VectorField for FnVector {
    fn dim(&self) -> usize {
        self.dim
    }

    fn jet(&self, p: &[f64]) -> Result<VectorJet> {
        check_dim(self.dim, p.len())?;
        (self.f)(&Jet::seed(p))
    }
}

/// `dα = Σ_i dx^i ∧ ∂_i α` on jets. The result is one derivative order lower.
pub fn d_jet(alpha: &FormJet) -> Result<FormJet> {
    let n = alpha.dim();
    let mut out = FormJet::zero(n)?;
    for i in 0..n {
        let dxi = FormJet::monomial(n, 1 << i, Jet::one())?;
        out = out.try_add(&dxi.wedge(&alpha.partial(i)?)?)?;
    }
    Ok(out)
}

/// Exterior derivative of a field at a point.
pub fn exterior_derivative(alpha: &dyn FormField, p: &ChartPoint) -> Result<Multiform> {
    Ok(d_jet(&alpha.jet(&p.coords)?)?.value())
}

/// The field `dα`.
pub struct Exterior<F>(pub F);

impl<F: FormField> FormField for Exterior<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        d_jet(&self.0.jet(p)?)
    }
}

/// Wedge product of two fields.
pub struct WedgeField<A, B>(pub A, pub B);

impl<A: FormField, B: FormField> FormField for WedgeField<A, B> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        self.0.jet(p)?.wedge(&self.1.jet(p)?)
    }
}

impl<T: FormField + ?Sized> FormField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        (**self).jet(p)
    }
}

impl<T: FormField + ?Sized> FormField for Arc<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        (**self).jet(p)
    }
}

impl<T: FormField + ?Sized> FormField for Box<T> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        (**self).jet(p)
    }
}

/// The section `E_B u = X + ξ + i_X B`.
pub struct BShift<V, B> {
    pub field: V,
    pub b: B,
}

impl<V: VectorField, B: FormField> VectorField for BShift<V, B> {
    fn dim(&self) -> usize {
        self.field.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<VectorJet> {
        self.field.jet(p)?.b_field(&self.b.jet(p)?)
    }
}

impl<T: VectorField + ?Sized> VectorField for &T {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn jet(&self, p: &[f64]) -> Result<VectorJet> {
        (**self).jet(p)
    }
}

/// `[X+ξ, Y+η]_H = [X,Y] + L_X η - L_Y ξ - ½ d(η(X) - ξ(Y)) + i_Y i_X H`
/// from first-order jets of the two sections and the value of `H`.
pub fn courant_bracket_jets(u: &VectorJet, v: &VectorJet, h: &Multiform) -> Result<GcVector> {
    let n = u.dim();
    check_dim(n, v.dim())?;
    check_dim(n, h.dim())?;
    let (x, y) = (&u.vec, &v.vec);

    // Lie bracket [X, Y]^j = X^i ∂_i Y^j - Y^i ∂_i X^j
    let mut lie = vec![C64::new(0.0, 0.0); n];
    for (j, l) in lie.iter_mut().enumerate() {
        for i in 0..n {
            *l += x[i].v * y[j].g[i] - y[i].v * x[j].g[i];
        }
    }

    let xi = u.cov_form();
    let eta = v.cov_form();
    let eta_x = eta.interior(x)?.coeff(0);
    let xi_y = xi.interior(y)?.coeff(0);
    let xv: Vec<C64> = x.iter().map(|j| j.v).collect();
    let yv: Vec<C64> = y.iter().map(|j| j.v).collect();

    // Cartan: L_X η = i_X dη + d(i_X η)
    let lie_x_eta = d_jet(&eta)?.value().interior(&xv)?.try_add(&gradient_form(n, &eta_x)?)?;
    let lie_y_xi = d_jet(&xi)?.value().interior(&yv)?.try_add(&gradient_form(n, &xi_y)?)?;
    let exact = gradient_form(n, &(eta_x - xi_y))?.scale(C64::new(0.5, 0.0));
    let twist = h.grade(3).interior(&xv)?.interior(&yv)?;

    let cov = lie_x_eta.try_sub(&lie_y_xi)?.try_sub(&exact)?.try_add(&twist)?;
    GcVec::new(lie, (0..n).map(|i| cov.coeff(1 << i)).collect())
}

/// `df` as a pointwise 1-form.
fn gradient_form(n: usize, f: &Jet) -> Result<Multiform> {
    if f.order == 0 {
        return Err(GcxError::MissingJet("gradient of an order-0 jet".into()));
    }
    Multiform::one_form(&f.g[..n])
}

pub fn courant_bracket(
    u: &dyn VectorField,
    v: &dyn VectorField,
    h: &dyn FormField,
    p: &ChartPoint,
) -> Result<GcVector> {
    check_dim(p.dim(), u.dim())?;
    courant_bracket_jets(&u.jet(&p.coords)?, &v.jet(&p.coords)?, &h.value(&p.coords)?)
}

type MapFn = dyn Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync;

/// A smooth map between charts given by jet-valued component functions.
#[derive(Clone)]
pub struct ChartMap {
    pub source: String,
    pub target: String,
    pub source_periodic: u8,
    pub target_periodic: u8,
    dim: usize,
    forward: Arc<MapFn>,
    inverse: Option<Arc<MapFn>>,
}

impl fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChartMap({} -> {})", self.source, self.target)
    }
}

impl ChartMap {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        dim: usize,
        forward: impl Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static,
    ) -> Self {
        ChartMap {
            source: source.into(),
            target: target.into(),
            source_periodic: 0,
            target_periodic: 0,
            dim,
            forward: Arc::new(forward),
            inverse: None,
        }
    }

    pub fn with_inverse(mut self, inverse: impl Fn(&[Jet]) -> Result<Vec<Jet>> + Send + Sync + 'static) -> Self {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn with_periodic(mut self, source: u8, target: u8) -> Self {
        self.source_periodic = source;
        self.target_periodic = target;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component jets of the map at `p` (derivatives in source coordinates).
    pub fn jets(&self, p: &[f64]) -> Result<Vec<Jet>> {
        check_dim(self.dim, p.len())?;
        let out = (self.forward)(&Jet::seed(p))?;
        check_dim(self.dim, out.len())?;
        Ok(out)
    }

    pub fn apply(&self, p: &ChartPoint) -> Result<ChartPoint> {
        let y = self.jets(&p.coords)?;
        Ok(ChartPoint::new(self.target.clone(), y.iter().map(|j| j.v.re).collect(), self.target_periodic))
    }

    pub fn apply_inverse(&self, q: &ChartPoint) -> Result<ChartPoint> {
        let inv = self
            .inverse
            .as_ref()
            .ok_or_else(|| GcxError::InvalidArgument(format!("{self:?} has no inverse")))?;
        let x = inv(&Jet::seed(&q.coords))?;
        Ok(ChartPoint::new(self.source.clone(), x.iter().map(|j| j.v.re).collect(), self.source_periodic))
    }

    /// The inverse as a map of its own.
    pub fn inverse_map(&self) -> Result<ChartMap> {
        let inv = self
            .inverse
            .clone()
            .ok_or_else(|| GcxError::InvalidArgument(format!("{self:?} has no inverse")))?;
        Ok(ChartMap {
            source: self.target.clone(),
            target: self.source.clone(),
            source_periodic: self.target_periodic,
            target_periodic: self.source_periodic,
            dim: self.dim,
            forward: inv,
            inverse: Some(self.forward.clone()),
        })
    }

    /// Real Jacobian `∂y_i/∂x_j`.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let y = self.jets(p)?;
        Ok(DMatrix::from_fn(self.dim, self.dim, |i, j| y[i].g[j].re))
    }

    /// Distance between `p` and `inverse(forward(p))`.
    pub fn round_trip_error(&self, p: &ChartPoint) -> Result<f64> {
        let back = self.apply_inverse(&self.apply(p)?)?;
        Ok(back.distance(p))
    }
}

/// Jets of `φ*α` at `p`, valid to first order.
pub fn pullback_jet(phi: &ChartMap, alpha: &dyn FormField, p: &[f64]) -> Result<FormJet> {
    let n = phi.dim();
    check_dim(n, alpha.dim())?;
    let y = phi.jets(p)?;
    let yv: Vec<f64> = y.iter().map(|j| j.v.re).collect();
    let a = alpha.jet(&yv)?;
    let dy: Vec<FormJet> = y
        .iter()
        .map(|yk| {
            let comps = (0..n).map(|i| yk.partial(i)).collect::<Result<Vec<_>>>()?;
            FormJet::one_form(&comps)
        })
        .collect::<Result<_>>()?;
    let mut out = FormJet::zero(n)?;
    for (mask, coeff) in a.terms() {
        let composed = coeff.compose(&y);
        let mut term = FormJet::one(n)?.mul_coeff(composed);
        for (k, dyk) in dy.iter().enumerate() {
            if mask & (1 << k) != 0 {
                term = term.wedge(dyk)?;
            }
        }
        out = out.try_add(&term)?;
    }
    Ok(out)
}

pub fn pullback(phi: &ChartMap, alpha: &dyn FormField, p: &ChartPoint) -> Result<Multiform> {
    Ok(pullback_jet(phi, alpha, &p.coords)?.value())
}

/// The field `φ*α`.
pub struct Pullback<F> {
    pub map: ChartMap,
    pub field: F,
}

impl<F: FormField> FormField for Pullback<F> {
    fn dim(&self) -> usize {
        self.map.dim()
    }

    fn jet(&self, p: &[f64]) -> Result<FormJet> {
        pullback_jet(&self.map, &self.field, p)
    }
}

/// Least-squares witness for `dρ + H∧ρ = v·ρ` at a point.
#[derive(Debug, Clone)]
pub struct IntegrabilityWitness {
    pub v: GcVector,
    pub residual: f64,
}

/// Relative pivot threshold for the witness least squares.
pub const LSQ_TOL: f64 = 1e-9;

pub fn integrability_residual(rho: &dyn FormField, h: &dyn FormField, p: &ChartPoint) -> Result<IntegrabilityWitness> {
    let rj = rho.jet(&p.coords)?;
    let value = rj.value();
    if value.max_abs() == 0.0 {
        return Err(GcxError::ZeroSpinor("evaluate off the zero locus".into()));
    }
    let lhs = d_jet(&rj)?.value().try_add(&h.value(&p.coords)?.wedge(&value)?)?;
    let a = action_matrix(&value);
    let b = DVector::from_column_slice(lhs.coeffs());
    let (v, residual) = linalg::least_squares(&a, &b, LSQ_TOL);
    Ok(IntegrabilityWitness { v: GcVector::from_coords(value.dim(), v.as_slice())?, residual })
}
