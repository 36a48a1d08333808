//! Closed-form geometric models.
//!
//! Charts and coordinate order:
//! * `cplane`: `(x₁, y₁, x₂, y₂)` with `z_j = x_j + i y_j`.
//! * `polar`: `(r, θ₁, θ₂, θ₃)` on `D²×T²`, angles with unit period.
//! * `quotient`: `(r′, θ₁′, θ₂′, θ₃′)`, the cover of the logarithmic quotient.
//! * `tube`: `(r̃, θ̃₁, θ̃₂, θ̃₃)` on the Weinstein tube.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::chart::{ChartMap, ChartPoint, FnForm, FormField, FormJet};
use crate::conventions::TWIST_FROM_B_SIGN;
use crate::error::{GcxError, Result};
use crate::jet::Jet;
use crate::multilinear::{Coeff, GcVector};

pub const CPLANE: &str = "cplane";
pub const POLAR: &str = "polar";
pub const QUOTIENT: &str = "quotient";
pub const TUBE: &str = "tube";

/// Angles `θ₁, θ₂, θ₃` are periodic in the polar, quotient and tube charts.
pub const ANGLES: u8 = 0b1110;

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn form(terms: &[(u32, Jet)]) -> Result<FormJet> {
    let mut f = FormJet::zero(4)?;
    for &(mask, c) in terms {
        f.set(mask, f.coeff(mask) + c);
    }
    Ok(f)
}

fn radius_guard(r: &Jet, min: f64, what: &str) -> Result<()> {
    if r.v.re < min {
        return Err(GcxError::OutOfDomain(format!("{what} = {} below {min}", r.v.re)));
    }
    Ok(())
}

/// `ρ = z₁ + dz₁∧dz₂` on `ℂ²`.
pub fn local_model_spinor() -> FnForm {
    FnForm::new(4, |x| {
        let z1 = x[0] + x[1].scale(I);
        let one = Jet::one();
        // dz₁∧dz₂ = dx₁∧dx₂ + i dx₁∧dy₂ + i dy₁∧dx₂ - dy₁∧dy₂
        form(&[(0, z1), (0b0101, one), (0b1001, one.scale(I)), (0b0110, one.scale(I)), (0b1010, -one)])
    })
}

/// Degree-0 part `z₁²` of a spinor whose zero set is degenerate.
pub fn degenerate_fixture() -> FnForm {
    FnForm::new(4, |x| {
        let z1 = x[0] + x[1].scale(I);
        let one = Jet::one();
        form(&[(0, z1 * z1), (0b0101, one), (0b1001, one.scale(I)), (0b0110, one.scale(I)), (0b1010, -one)])
    })
}

/// `v = -∂_{z₂} = -½(∂_{x₂} - i∂_{y₂})`, the section with `dρ = v·ρ`.
pub fn local_model_witness() -> GcVector {
    let z = C64::new(0.0, 0.0);
    GcVector::new(vec![z, z, C64::new(-0.5, 0.0), C64::new(0.0, 0.5)], vec![z; 4]).expect("dim 4")
}

/// `Φ(r, θ) = (r cos 2πθ₁, r sin 2πθ₁, θ₂, θ₃)` from the polar chart to `ℂ²`.
pub fn polar_to_cplane() -> ChartMap {
    ChartMap::new(POLAR, CPLANE, 4, |x| {
        let a = x[1].scale_re(TAU);
        Ok(vec![x[0] * a.cos(), x[0] * a.sin(), x[2], x[3]])
    })
    .with_periodic(ANGLES, 0)
}

/// Polar rescaling `(r, θ₁, θ₂, θ₃) ↦ (r, 2πθ₁, θ₂, θ₃)`. Pulling the polar
/// forms back along it gives the ℂ² model written with `z₁ = r e^{2πiθ₁}`.
pub fn angle_rescale() -> ChartMap {
    ChartMap::new(POLAR, POLAR, 4, |x| Ok(vec![x[0], x[1].scale_re(TAU), x[2], x[3]]))
}

/// `B = dlog r∧dθ₂ - dθ₁∧dθ₃`.
pub fn polar_b(r_min: f64) -> FnForm {
    FnForm::new(4, move |x| {
        radius_guard(&x[0], r_min, "r")?;
        form(&[(0b0101, x[0].recip()), (0b1010, -Jet::one())])
    })
}

/// `ω = dlog r∧dθ₃ + dθ₁∧dθ₂`.
pub fn polar_omega(r_min: f64) -> FnForm {
    FnForm::new(4, move |x| {
        radius_guard(&x[0], r_min, "r")?;
        form(&[(0b1001, x[0].recip()), (0b0110, Jet::one())])
    })
}

/// `e^{B+iω}` for the polar forms.
pub fn polar_spinor(r_min: f64) -> FnForm {
    let (b, w) = (polar_b(r_min), polar_omega(r_min));
    FnForm::new(4, move |x| exp_b_iw(&b, &w, x))
}

fn exp_b_iw(b: &FnForm, w: &FnForm, x: &[Jet]) -> Result<FormJet> {
    let p: Vec<f64> = x.iter().map(|j| j.v.re).collect();
    let bw = b.jet(&p)?.try_add(&w.jet(&p)?.scale(I))?;
    Ok(bw.exp_wedge_unchecked())
}

/// Multiplicity and twist of the `ℤ_m` action, `gcd(k, m) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogModelParams {
    pub m: u32,
    pub k: i64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl LogModelParams {
    pub fn new(m: u32, k: i64) -> Result<Self> {
        if m == 0 {
            return Err(GcxError::InvalidArgument("m must be a positive integer".into()));
        }
        if gcd(k.unsigned_abs(), m as u64) != 1 {
            return Err(GcxError::InvalidArgument(format!("k = {k} is not coprime with m = {m}")));
        }
        Ok(LogModelParams { m, k })
    }

    fn mf(&self) -> f64 {
        self.m as f64
    }

    fn kf(&self) -> f64 {
        self.k as f64
    }
}

/// `B′ = dlog r′∧(dθ₂′ + (k/m)dθ₁′) - (1/m)dθ₁′∧dθ₃′`.
pub fn log_model_b(params: LogModelParams, r_min: f64) -> FnForm {
    let (m, k) = (params.mf(), params.kf());
    let floor = r_min.powf(m);
    FnForm::new(4, move |x| {
        radius_guard(&x[0], floor, "r'")?;
        let inv = x[0].recip();
        form(&[(0b0101, inv), (0b0011, inv.scale_re(k / m)), (0b1010, Jet::real(-1.0 / m))])
    })
}

/// `ω′ = (1/m)(dlog r′∧dθ₃′ + dθ₁′∧dθ₂′)`.
pub fn log_model_omega(params: LogModelParams, r_min: f64) -> FnForm {
    let m = params.mf();
    let floor = r_min.powf(m);
    FnForm::new(4, move |x| {
        radius_guard(&x[0], floor, "r'")?;
        form(&[(0b1001, x[0].recip().scale_re(1.0 / m)), (0b0110, Jet::real(1.0 / m))])
    })
}

pub fn log_model_spinor(params: LogModelParams, r_min: f64) -> FnForm {
    let (b, w) = (log_model_b(params, r_min), log_model_omega(params, r_min));
    FnForm::new(4, move |x| exp_b_iw(&b, &w, x))
}

/// `(r, θ) ↦ (rᵐ, mθ₁, θ₂ - kθ₁, θ₃)` from the polar chart to the quotient chart.
pub fn log_cover_map(params: LogModelParams) -> ChartMap {
    let (m, k) = (params.mf(), params.kf());
    let mi = params.m as i32;
    ChartMap::new(POLAR, QUOTIENT, 4, move |x| {
        Ok(vec![x[0].powi(mi), x[1].scale_re(m), x[2] - x[1].scale_re(k), x[3]])
    })
    .with_periodic(ANGLES, ANGLES)
}

/// `(m - 1) dlog r∧dθ₂`, the difference between the pulled-back `B′` and `B`.
pub fn b_discrepancy(params: LogModelParams, r_min: f64) -> FnForm {
    let c = params.mf() - 1.0;
    FnForm::new(4, move |x| {
        radius_guard(&x[0], r_min, "r")?;
        form(&[(0b0101, x[0].recip().scale_re(c))])
    })
}

/// `(r, θ₁ + 1/m, θ₂ + k/m, θ₃)`.
pub fn deck_action(params: LogModelParams, p: &ChartPoint) -> ChartPoint {
    let (m, k) = (params.mf(), params.kf());
    let c = &p.coords;
    ChartPoint::new(p.chart.clone(), vec![c[0], c[1] + 1.0 / m, c[2] + k / m, c[3]], p.periodic)
}

/// The deck transformation as a chart map on the polar chart.
pub fn deck_map(params: LogModelParams) -> ChartMap {
    let (m, k) = (params.mf(), params.kf());
    ChartMap::new(POLAR, POLAR, 4, move |x| {
        Ok(vec![x[0], x[1] + Jet::real(1.0 / m), x[2] + Jet::real(k / m), x[3]])
    })
    .with_periodic(ANGLES, ANGLES)
}

/// Orbit of `p` under the deck group. At `r = 0` only `(θ₂, θ₃)` are
/// meaningful, so `θ₁` is dropped there.
pub fn deck_orbit(params: LogModelParams, p: &ChartPoint) -> Vec<ChartPoint> {
    let mut out = vec![p.clone()];
    for _ in 1..params.m {
        let next = deck_action(params, out.last().expect("nonempty"));
        out.push(next);
    }
    if p.coords[0] == 0.0 {
        for q in &mut out {
            q.coords[1] = 0.0;
        }
    }
    out
}

/// `σ = r̃ dr̃∧dθ̃₁ + dθ̃₂∧dθ̃₃`.
pub fn tube_symplectic() -> FnForm {
    FnForm::new(4, |x| form(&[(0b0011, x[0]), (0b1100, Jet::one())]))
}

/// `e^{iσ}`.
pub fn tube_spinor() -> FnForm {
    let s = tube_symplectic();
    FnForm::new(4, move |x| {
            let p: Vec<f64> = x.iter().map(|j| j.v.re).collect();
        Ok(s.jet(&p)?.scale(I).exp_wedge_unchecked())
    })
}

/// Inner radius of the annulus `D² ∖ D²_{1/√e}`.
pub fn annulus_inner() -> f64 {
    (-0.5f64).exp()
}

/// `ψ(r, θ₁, θ₂, θ₃) = (√(1 + 2 log r), θ₃, θ₂, -θ₁)` with inverse
/// `r = e^{(r̃² - 1)/2}`, `θ = (-θ̃₃, θ̃₂, θ̃₁)`.
pub fn gluing_map() -> ChartMap {
    let lo = annulus_inner();
    ChartMap::new(POLAR, TUBE, 4, move |x| {
        let r = x[0].v.re;
        if !(r > lo && r <= 1.0) {
            return Err(GcxError::OutOfDomain(format!("r = {r} outside the annulus ({lo}, 1]")));
        }
        Ok(vec![(x[0].ln().scale_re(2.0) + Jet::one()).sqrt(), x[3], x[2], -x[1]])
    })
    .with_inverse(|y| {
        let rt = y[0].v.re;
        if !(rt > 0.0 && rt <= 1.0) {
            return Err(GcxError::OutOfDomain(format!("tube radius {rt} outside (0, 1]")));
        }
        Ok(vec![((y[0] * y[0] - Jet::one()).scale_re(0.5)).exp(), -y[3], y[2], y[1]])
    })
    .with_periodic(ANGLES, ANGLES)
}

/// `ψ` with the tube radius shifted by `delta`; a negative control.
pub fn perturbed_gluing_map(delta: f64) -> ChartMap {
    let psi = gluing_map();
    ChartMap::new(POLAR, TUBE, 4, move |x| {
        let p: Vec<f64> = x.iter().map(|j| j.v.re).collect();
        let mut y = psi.jets(&p)?;
        y[0] = y[0] + Jet::real(delta);
        Ok(y)
    })
    .with_periodic(ANGLES, ANGLES)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BumpProfile {
    /// `e^{-1/t}` ratio, flat to all orders at both junctions.
    #[default]
    Smooth,
    /// Degree-7 smoothstep, flat to third order.
    Septic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurgeryGeometry {
    pub r_min: f64,
    pub r_out: f64,
    pub profile: BumpProfile,
}

impl Default for SurgeryGeometry {
    fn default() -> Self {
        SurgeryGeometry { r_min: 0.05, r_out: 2.0, profile: BumpProfile::Smooth }
    }
}

impl SurgeryGeometry {
    pub fn new(r_min: f64, r_out: f64, profile: BumpProfile) -> Result<Self> {
        let g = SurgeryGeometry { r_min, r_out, profile };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min.is_finite()) {
            return Err(GcxError::InvalidArgument(format!("r_min must be positive, got {}", self.r_min)));
        }
        if !(self.r_out > 1.0 && self.r_out.is_finite()) {
            return Err(GcxError::InvalidArgument(format!("R_out must exceed 1, got {}", self.r_out)));
        }
        Ok(())
    }

    /// Lower end of the annulus sampled for the gluing map.
    pub fn annulus_min(&self) -> f64 {
        annulus_inner().max(self.r_min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpValue {
    pub f: f64,
    pub df: f64,
    pub d2f: f64,
}

/// `e^{-1/t}` and its first two derivatives, zero for `t ≤ 0`.
fn flat(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let h = (-1.0 / t).exp();
    let t2 = t * t;
    (h, h / t2, h * (1.0 - 2.0 * t) / (t2 * t2))
}

/// Transition from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
fn smooth_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let (a, a1, a2) = flat(t);
    let (b, b1, b2) = flat(1.0 - t);
    let (b1, b2) = (-b1, b2);
    let s = a + b;
    let s1 = a1 + b1;
    let n = a1 * b - a * b1;
    let n1 = a2 * b - a * b2;
    (a / s, n / (s * s), (n1 * s - 2.0 * n * s1) / (s * s * s))
}

fn septic_step(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    if t >= 1.0 {
        return (1.0, 0.0, 0.0);
    }
    let t3 = t * t * t;
    let f = t3 * t * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
    let df = 140.0 * t3 * (1.0 - t).powi(3);
    let d2f = 420.0 * t * t * (1.0 - t).powi(2) * (1.0 - 2.0 * t);
    (f, df, d2f)
}

/// `f(r̃)`: 1 on `[0, 1]`, 0 on `[R_out, ∞)`, monotone in between.
pub fn bump(geometry: &SurgeryGeometry, rt: f64) -> BumpValue {
    let w = geometry.r_out - 1.0;
    let t = (geometry.r_out - rt) / w;
    let (f, df, d2f) = match geometry.profile {
        BumpProfile::Smooth => smooth_step(t),
        BumpProfile::Septic => septic_step(t),
    };
    BumpValue { f, df: -df / w, d2f: d2f / (w * w) }
}

fn bump_jet(geometry: &SurgeryGeometry, rt: Jet) -> Jet {
    let b = bump(geometry, rt.v.re);
    rt.chain(C64::new(b.f, 0.0), C64::new(b.df, 0.0), C64::new(b.d2f, 0.0))
}

/// `(ψ⁻¹)*B = r̃ dr̃∧dθ̃₂ - dθ̃₁∧dθ̃₃` in tube coordinates.
pub fn tube_b() -> FnForm {
    FnForm::new(4, |x| form(&[(0b0101, x[0]), (0b1010, -Jet::one())]))
}

/// `B̃ = f(r̃)·(ψ⁻¹)*B`.
pub fn b_extension(geometry: SurgeryGeometry) -> FnForm {
    FnForm::new(4, move |x| {
        radius_guard(&x[0], geometry.r_min, "tube radius")?;
        let f = bump_jet(&geometry, x[0]);
        form(&[(0b0101, f * x[0]), (0b1010, -f)])
    })
}

/// The twist `H` under which `e^{B̃+iσ}` is integrable:
/// `H = s·dB̃ = -s·f′(r̃) dr̃∧dθ̃₁∧dθ̃₃` with `s` the frozen twist sign.
/// `sign = -1` flips it, for negative controls.
pub fn h_field(geometry: SurgeryGeometry, sign: f64) -> FnForm {
    FnForm::new(4, move |x| {
        radius_guard(&x[0], geometry.r_min, "tube radius")?;
        let df = bump_jet(&geometry, x[0]).partial(0)?;
        form(&[(0b1011, df.scale_re(-TWIST_FROM_B_SIGN * sign))])
    })
}

/// `e^{B̃ + iσ}`.
pub fn glued_spinor(geometry: SurgeryGeometry) -> FnForm {
    let (b, s) = (b_extension(geometry), tube_symplectic());
    FnForm::new(4, move |x| exp_b_iw(&b, &s, x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{exterior_derivative, integrability_residual, pullback, Exterior, Pullback};
    use crate::multilinear::{clifford, Multiform};
    use crate::spinor::{check_nondegenerate, normal_form, DEFAULT_TOL};

    fn polar(c: [f64; 4]) -> ChartPoint {
        ChartPoint::new(POLAR, c.to_vec(), ANGLES)
    }

    fn cpt(c: [f64; 4]) -> ChartPoint {
        ChartPoint::new(CPLANE, c.to_vec(), 0)
    }

    #[test]
    fn local_model_examples() {
        let rho = local_model_spinor();
        let on_locus = rho.value(&[0.0, 0.0, 0.3, 0.7]).unwrap();
        assert_eq!(on_locus.coeff(0), C64::new(0.0, 0.0));
        assert_eq!(normal_form(&on_locus, DEFAULT_TOL).unwrap().k, 2);
        assert!(on_locus.dist(&crate::spinor::standard::dz1_dz2()).unwrap() == 0.0);

        let nf = normal_form(&rho.value(&[1.0, 0.0, 0.2, 0.1]).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(nf.k, 0);
        let bw = nf.b.try_add(&nf.omega.scale(I)).unwrap();
        assert!(bw.dist(&crate::spinor::standard::dz1_dz2()).unwrap() < 1e-12);

        let p = cpt([0.4, -0.1, 0.3, 0.2]);
        let wit = integrability_residual(&rho, &FnForm::zero(4), &p).unwrap();
        assert!(wit.residual < 1e-12);
        let d = exterior_derivative(&rho, &p).unwrap();
        let v_rho = clifford(&local_model_witness(), &rho.value(&p.coords).unwrap()).unwrap();
        assert!(d.dist(&v_rho).unwrap() < 1e-15);
    }

    #[test]
    fn polar_forms() {
        let (b, w) = (polar_b(0.05), polar_omega(0.05));
        let p = polar([0.5, 0.1, 0.7, 0.3]);
        assert!(exterior_derivative(&b, &p).unwrap().max_abs() < 1e-15);
        assert!(exterior_derivative(&w, &p).unwrap().max_abs() < 1e-15);
        let wv = w.value(&p.coords).unwrap();
        // ω∧ω = 2 (1/r) dr∧dθ₁∧dθ₂∧dθ₃ up to sign
        assert!((wv.wedge(&wv).unwrap().top().norm() - 4.0).abs() < 1e-14);
        let nf = normal_form(&polar_spinor(0.05).value(&p.coords).unwrap(), DEFAULT_TOL).unwrap();
        assert_eq!(nf.k, 0);
        assert!(check_nondegenerate(&nf, DEFAULT_TOL));
        assert!(matches!(b.value(&[0.01, 0.0, 0.0, 0.0]), Err(GcxError::OutOfDomain(_))));
    }

    #[test]
    fn polar_matches_cplane_model() {
        // pull ρ back to polar coordinates, divide by ρ₀, compare with the
        // rescaled polar forms
        let to_c = polar_to_cplane();
        let rho = Pullback { map: to_c, field: local_model_spinor() };
        let target = Pullback { map: angle_rescale(), field: polar_spinor(0.01) };
        for c in [[0.5, 0.1, 0.7, 0.3], [0.93, 0.77, 0.2, 0.9], [0.2, 0.45, 0.05, 0.6]] {
            let p = polar(c);
            let v = rho.value(&p.coords).unwrap();
            let scaled = v.scale(1.0 / v.coeff(0));
            assert!(scaled.dist(&target.value(&p.coords).unwrap()).unwrap() < 1e-12);
        }
    }

    #[test]
    fn log_model_identities() {
        for (m, k) in [(1, 0), (2, 1), (3, 2), (5, 2)] {
            let params = LogModelParams::new(m, k).unwrap();
            let cover = log_cover_map(params);
            let p = polar([0.6, 0.3, 0.8, 0.15]);
            let wp = pullback(&cover, &log_model_omega(params, 0.05), &p).unwrap();
            assert!(wp.dist(&polar_omega(0.05).value(&p.coords).unwrap()).unwrap() < 1e-13);
            let bp = pullback(&cover, &log_model_b(params, 0.05), &p).unwrap();
            let diff = bp.try_sub(&polar_b(0.05).value(&p.coords).unwrap()).unwrap();
            assert!(diff.dist(&b_discrepancy(params, 0.05).value(&p.coords).unwrap()).unwrap() < 1e-13);
        }
        assert!(LogModelParams::new(4, 2).is_err());
        assert!(LogModelParams::new(0, 1).is_err());
        assert!(LogModelParams::new(3, -1).is_ok());
    }

    #[test]
    fn deck_examples() {
        let p21 = LogModelParams::new(2, 1).unwrap();
        let q = deck_action(p21, &polar([0.5, 0.1, 0.2, 0.3]));
        assert!(q.distance(&polar([0.5, 0.6, 0.7, 0.3])) < 1e-15);
        let id = LogModelParams::new(1, 0).unwrap();
        let p = polar([0.5, 0.1, 0.2, 0.3]);
        assert!(deck_action(id, &p).distance(&p) < 1e-15);

        let p52 = LogModelParams::new(5, 2).unwrap();
        let orbit = deck_orbit(p52, &polar([0.0, 0.4, 0.1, 0.3]));
        assert_eq!(orbit.len(), 5);
        for i in 0..5 {
            for j in 0..i {
                assert!(orbit[i].distance(&orbit[j]) > 0.1);
            }
        }
        let start = polar([0.3, 0.4, 0.1, 0.3]);
        let back = (0..5).fold(start.clone(), |q, _| deck_action(p52, &q));
        assert!(back.distance(&start) < 1e-12);
    }

    #[test]
    fn tube_examples() {
        let s = tube_symplectic();
        let p = ChartPoint::new(TUBE, vec![1.0, 0.1, 0.2, 0.3], ANGLES);
        assert_eq!(exterior_derivative(&s, &p).unwrap().max_abs(), 0.0);
        let sv = s.value(&p.coords).unwrap();
        assert!((sv.wedge(&sv).unwrap().top().norm() - 2.0).abs() < 1e-15);
        let rho = crate::spinor::from_symplectic(&sv, DEFAULT_TOL).unwrap();
        assert_eq!(normal_form(&rho, DEFAULT_TOL).unwrap().k, 0);
    }

    #[test]
    fn gluing_examples() {
        let psi = gluing_map();
        let img = psi.apply(&polar([1.0, 0.1, 0.2, 0.3])).unwrap();
        assert!(img.distance(&ChartPoint::new(TUBE, vec![1.0, 0.3, 0.2, -0.1], ANGLES)) < 1e-15);
        let img = psi.apply(&polar([(-0.25f64).exp(), 0.0, 0.0, 0.0])).unwrap();
        assert!((img.coords[0] - 0.5f64.sqrt()).abs() < 1e-15);
        let p = polar([0.8, 0.1, 0.2, 0.3]);
        assert!(psi.round_trip_error(&p).unwrap() < 1e-12);
        let w = pullback(&psi, &tube_symplectic(), &p).unwrap();
        assert!(w.dist(&polar_omega(0.05).value(&p.coords).unwrap()).unwrap() < 1e-14);
        assert!(psi.apply(&polar([0.5, 0.0, 0.0, 0.0])).is_err());
        assert!(psi.apply(&polar([1.1, 0.0, 0.0, 0.0])).is_err());

        // (ψ⁻¹)*B in tube coordinates
        let inv = psi.inverse_map().unwrap();
        let q = ChartPoint::new(TUBE, vec![0.7, 0.2, 0.4, 0.9], ANGLES);
        let pulled = pullback(&inv, &polar_b(0.05), &q).unwrap();
        assert!(pulled.dist(&tube_b().value(&q.coords).unwrap()).unwrap() < 1e-14);
    }

    fn fd(g: &SurgeryGeometry, r: f64) -> (f64, f64) {
        let h = 1e-5;
        let d1 = (bump(g, r + h).f - bump(g, r - h).f) / (2.0 * h);
        let d2 = (bump(g, r + h).df - bump(g, r - h).df) / (2.0 * h);
        (d1, d2)
    }

    #[test]
    fn bump_profiles() {
        for profile in [BumpProfile::Smooth, BumpProfile::Septic] {
            let g = SurgeryGeometry::new(0.05, 2.0, profile).unwrap();
            let b = bump(&g, 0.5);
            assert_eq!((b.f, b.df), (1.0, 0.0));
            assert_eq!(bump(&g, 3.0).f, 0.0);
            let mut prev = 1.0;
            for i in 0..=200 {
                let r = 1.0 + i as f64 / 200.0;
                let b = bump(&g, r);
                assert!(b.f <= prev + 1e-15);
                prev = b.f;
                if i > 0 && i < 200 {
                    let (d1, d2) = fd(&g, r);
                    assert!((b.df - d1).abs() < 1e-7, "{profile:?} f' at {r}");
                    assert!((b.d2f - d2).abs() < 1e-6, "{profile:?} f'' at {r}");
                }
            }
            for edge in [1.0, 2.0] {
                let (lo, hi) = (bump(&g, edge - 1e-9), bump(&g, edge + 1e-9));
                assert!((lo.df - hi.df).abs() < 1e-10);
                assert!((lo.d2f - hi.d2f).abs() < 1e-10 || profile == BumpProfile::Septic && (lo.d2f - hi.d2f).abs() < 1e-6);
            }
        }
        assert!(SurgeryGeometry::new(0.05, 0.9, BumpProfile::Smooth).is_err());
        assert!(SurgeryGeometry::new(0.0, 2.0, BumpProfile::Smooth).is_err());
    }

    #[test]
    fn h_matches_assembled_db() {
        let g = SurgeryGeometry::default();
        let assembled = Exterior(b_extension(g));
        let h = h_field(g, 1.0);
        for r in [0.5, 1.0, 1.2, 1.5, 1.9, 2.0, 2.5] {
            let p = [r, 0.3, 0.6, 0.1];
            let db = assembled.value(&p).unwrap().scale(C64::new(TWIST_FROM_B_SIGN, 0.0));
            let hv = h.value(&p).unwrap();
            assert!(db.dist(&hv).unwrap() < 1e-12, "r = {r}");
            if r <= 1.0 || r >= 2.0 {
                assert_eq!(hv.max_abs(), 0.0);
            }
        }
        let hv = h.value(&[1.5, 0.0, 0.0, 0.0]).unwrap();
        let expected = Multiform::monomial(4, 0b1011, C64::new(bump(&g, 1.5).df * -TWIST_FROM_B_SIGN, 0.0)).unwrap();
        assert!(hv.dist(&expected).unwrap() < 1e-15);
        assert!(bump(&g, 1.5).df < 0.0);
    }

    #[test]
    fn glued_structure_integrable() {
        let g = SurgeryGeometry::default();
        let rho = glued_spinor(g);
        for r in [0.3, 1.0, 1.3, 1.7, 2.4] {
            let p = ChartPoint::new(TUBE, vec![r, 0.1, 0.5, 0.8], ANGLES);
            let good = integrability_residual(&rho, &h_field(g, 1.0), &p).unwrap().residual;
            assert!(good < 1e-12, "r = {r}: {good}");
            let bad = integrability_residual(&rho, &h_field(g, -1.0), &p).unwrap().residual;
            if r > 1.05 && r < 1.95 {
                assert!(bad > 1e-3, "r = {r}: {bad}");
            }
        }
    }
}
