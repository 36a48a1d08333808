//! Check runners: seeded sampling, parallel evaluation, deterministic
//! max-residual reports.
//!
//! Points are drawn sequentially from a ChaCha8 stream derived from the seed
//! and the check name, evaluated in parallel on the current rayon pool, and
//! reduced in sample order, so a report depends only on its inputs.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::chart::{
    courant_bracket, courant_bracket_jets, d_jet, integrability_residual, pullback, pullback_jet, BShift, ChartPoint,
    Exterior, FnForm, FormField, FormJetExt, VectorField,
};
use crate::conventions::{self, BRACKET_B_SIGN, TWIST_FROM_B_SIGN};
use crate::error::{GcxError, Result};
use crate::expr::{FormExpr, VectorExpr};
use crate::jet::Jet;
use crate::linalg;
use crate::models::{self, LogModelParams, SurgeryGeometry, ANGLES, CPLANE, POLAR, QUOTIENT, TUBE};
use crate::multilinear::{clifford, pairing, Coeff, GcVector, Multiform};
use crate::spinor::{self, annihilator, normal_form, standard, DEFAULT_TOL};

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub check: String,
    pub params: BTreeMap<String, Value>,
    pub samples: usize,
    pub max_residual: f64,
    pub worst_point: Vec<f64>,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Parameters shared by all checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub seed: u64,
    pub samples: usize,
    /// Tolerance for first-derivative identities.
    pub tol: f64,
    /// Tolerance for identities that use second derivatives.
    pub tol2: f64,
    pub geometry: SurgeryGeometry,
    pub quotients: Vec<LogModelParams>,
}

pub const DEFAULT_QUOTIENTS: [(u32, i64); 4] = [(1, 0), (2, 1), (3, 2), (5, 2)];

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            seed: 42,
            samples: 1000,
            tol: 1e-9,
            tol2: 1e-8,
            geometry: SurgeryGeometry::default(),
            quotients: DEFAULT_QUOTIENTS.iter().map(|&(m, k)| LogModelParams { m, k }).collect(),
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(GcxError::InvalidArgument("samples must be at least 1".into()));
        }
        for (name, t) in [("tol", self.tol), ("tol2", self.tol2)] {
            if !(t > 0.0 && t.is_finite()) {
                return Err(GcxError::InvalidArgument(format!("{name} must be positive, got {t}")));
            }
        }
        self.geometry.validate()?;
        for q in &self.quotients {
            LogModelParams::new(q.m, q.k)?;
        }
        Ok(())
    }

    fn base_params(&self, tol: f64) -> BTreeMap<String, Value> {
        let mut p = BTreeMap::new();
        p.insert("seed".into(), json!(self.seed));
        p.insert("samples".into(), json!(self.samples));
        p.insert("tol".into(), json!(tol));
        p
    }

    fn geometry_params(&self, tol: f64) -> BTreeMap<String, Value> {
        let mut p = self.base_params(tol);
        p.insert("r_min".into(), json!(self.geometry.r_min));
        p.insert("r_out".into(), json!(self.geometry.r_out));
        p.insert("profile".into(), json!(self.geometry.profile));
        p
    }
}

/// Deterministic sampler: one ChaCha8 stream per check name.
pub struct Sampler {
    rng: ChaCha8Rng,
}

fn stream_id(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3))
}

impl Sampler {
    pub fn new(seed: u64, check: &str) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id(check));
        Sampler { rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return lo;
        }
        self.rng.random_range(lo..hi)
    }

    pub fn point(&mut self, chart: &str, ranges: &[(f64, f64)], periodic: u8) -> ChartPoint {
        let coords = ranges.iter().map(|&(lo, hi)| self.uniform(lo, hi)).collect();
        ChartPoint::new(chart, coords, periodic)
    }

    pub fn complex(&mut self) -> C64 {
        C64::new(self.uniform(-1.0, 1.0), self.uniform(-1.0, 1.0))
    }
}

/// Sample-order max reduction; the first index attaining the max wins.
#[derive(Debug, Clone)]
struct Reduction {
    max: f64,
    worst: Option<usize>,
    errors: Vec<(usize, String)>,
}

fn reduce(values: &[Result<f64>]) -> Reduction {
    let mut out = Reduction { max: 0.0, worst: None, errors: Vec::new() };
    for (i, v) in values.iter().enumerate() {
        match v {
            Ok(r) if r.is_nan() => {
                out.errors.push((i, "residual is NaN".into()));
                out.max = f64::INFINITY;
                out.worst.get_or_insert(i);
            }
            Ok(r) => {
                if out.worst.is_none() || *r > out.max {
                    out.max = *r;
                    out.worst = Some(i);
                }
            }
            Err(e) => {
                if out.max.is_finite() {
                    out.worst = Some(i);
                }
                out.max = f64::INFINITY;
                out.errors.push((i, e.to_string()));
            }
        }
    }
    out
}

fn evaluate<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<f64> + Sync + Send) -> Vec<Result<f64>> {
    items.par_iter().map(f).collect()
}

/// Report under construction.
struct Builder {
    check: String,
    params: BTreeMap<String, Value>,
    samples: usize,
    tol: f64,
    max_residual: f64,
    worst_point: Vec<f64>,
    subs_ok: bool,
    notes: Vec<String>,
}

fn sci(x: f64) -> String {
    format!("{x:.3e}")
}

impl Builder {
    fn new(check: &str, params: BTreeMap<String, Value>, tol: f64) -> Self {
        let samples = params.get("samples").and_then(Value::as_u64).unwrap_or(0) as usize;
        Builder {
            check: check.into(),
            params,
            samples,
            tol,
            max_residual: 0.0,
            worst_point: Vec::new(),
            subs_ok: true,
            notes: Vec::new(),
        }
    }

    /// Fold a batch of residuals evaluated at `points` into the report.
    fn absorb(&mut self, label: &str, points: &[Vec<f64>], values: &[Result<f64>]) {
        let red = reduce(values);
        if let Some(i) = red.worst {
            if self.worst_point.is_empty() || red.max > self.max_residual {
                self.max_residual = red.max;
                self.worst_point = points[i].clone();
            }
        }
        if let Some((i, e)) = red.errors.first() {
            self.notes.push(format!("{label}: {} sample(s) failed to evaluate, first at sample {i}: {e}", red.errors.len()));
        }
        self.notes.push(format!("{label}: max residual {} over {} samples", sci(red.max), values.len()));
    }

    fn absorb_points(&mut self, label: &str, points: &[ChartPoint], values: &[Result<f64>]) {
        let coords: Vec<Vec<f64>> = points.iter().map(|p| p.coords.clone()).collect();
        self.absorb(label, &coords, values);
    }

    fn sub(&mut self, name: &str, ok: bool, detail: String) {
        self.subs_ok &= ok;
        self.notes.push(format!("{name}: {detail} [{}]", if ok { "ok" } else { "FAILED" }));
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    fn finish(self) -> CheckReport {
        let pass = self.subs_ok && self.max_residual.is_finite() && self.max_residual <= self.tol;
        CheckReport {
            check: self.check,
            params: self.params,
            samples: self.samples,
            max_residual: self.max_residual,
            worst_point: self.worst_point,
            pass,
            notes: self.notes,
        }
    }
}

fn index_points(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| vec![i as f64]).collect()
}

// ---------------------------------------------------------------- algebra

fn random_vector(s: &mut Sampler) -> GcVector {
    let c: Vec<C64> = (0..8).map(|_| s.complex()).collect();
    GcVector::from_coords(4, &c).expect("8 coordinates")
}

fn random_form(s: &mut Sampler) -> Multiform {
    Multiform::from_coeffs(4, (0..16).map(|_| s.complex()).collect()).expect("16 coefficients")
}

fn random_real_two_form(s: &mut Sampler) -> Multiform {
    let mut f = Multiform::zero(4).expect("dim 4");
    for m in crate::multilinear::ordered_masks(4).into_iter().filter(|m| m.count_ones() == 2) {
        f.set(m, C64::new(s.uniform(-1.0, 1.0), 0.0));
    }
    f
}

/// `e^{B+iω} ∧ θ₁∧…∧θ_k` with random real `B`, `ω` and complex `θ_j`.
pub fn random_pure_spinor(s: &mut Sampler, k: usize) -> Multiform {
    let beta = random_real_two_form(s).try_add(&random_real_two_form(s).scale(C64::new(0.0, 1.0))).expect("dim 4");
    let mut omega0 = Multiform::one(4).expect("dim 4");
    for _ in 0..k {
        let theta: Vec<C64> = (0..4).map(|_| s.complex()).collect();
        omega0 = omega0.wedge(&Multiform::one_form(&theta).expect("dim 4")).expect("dim 4");
    }
    beta.exp_wedge().expect("even form").wedge(&omega0).expect("dim 4")
}

/// Signature `(positive, negative)` of the pairing Gram matrix.
pub fn gram_signature(dim: usize) -> (usize, usize) {
    let eig = SymmetricEigen::new(spinor::gram_matrix(dim));
    let pos = eig.eigenvalues.iter().filter(|&&e| e > 1e-12).count();
    let neg = eig.eigenvalues.iter().filter(|&&e| e < -1e-12).count();
    (pos, neg)
}

/// Clifford relation `v·(v·ρ) = ⟨v,v⟩ρ` on random pairs, relative to `|v|²|ρ|`.
pub fn check_clifford(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "clifford-relation";
    let mut b = Builder::new(name, cfg.base_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let pairs: Vec<(GcVector, Multiform)> = (0..cfg.samples).map(|_| (random_vector(&mut s), random_form(&mut s))).collect();
    let values = evaluate(&pairs, |(v, rho)| {
        let lhs = clifford(v, &clifford(v, rho)?)?;
        let rhs = rho.scale(pairing(v, v)?);
        let vn: f64 = v.coords().iter().map(|c| c.norm_sqr()).sum();
        Ok(lhs.try_sub(&rhs)?.norm() / (vn * rho.norm()))
    });
    b.absorb(name, &index_points(pairs.len()), &values);
    let sig = gram_signature(4);
    b.sub("pairing signature", sig == (4, 4), format!("{sig:?}"));
    b.note("worst_point is the sample index");
    Ok(b.finish())
}

/// Annihilator dimensions and isotropy for the standard examples, plus the
/// normal-form round trip on random pure spinors of every type.
pub fn check_annihilators(cfg: &CheckConfig, iso_tol: f64, tol: f64) -> Result<CheckReport> {
    let name = "annihilators";
    let mut params = cfg.base_params(tol);
    params.insert("isotropy_tol".into(), json!(iso_tol));
    let mut b = Builder::new(name, params, tol);

    let examples = [
        ("e^(i omega0)", spinor::from_symplectic(&standard::omega0(), DEFAULT_TOL)?),
        ("dz1^dz2", standard::dz1_dz2()),
        ("dx1", Multiform::from_indices(4, &[1], C64::new(1.0, 0.0))?),
    ];
    for (label, rho) in &examples {
        let ann = annihilator(rho, DEFAULT_TOL)?;
        let iso = ann.isotropy_defect();
        b.sub(&format!("annihilator of {label}"), ann.len() == 4 && iso <= iso_tol, format!("dim {}, isotropy {}", ann.len(), sci(iso)));
    }

    let mut s = Sampler::new(cfg.seed, name);
    let spinors: Vec<(usize, Multiform)> = (0..cfg.samples)
        .map(|i| {
            let k = i % 3;
            (k, random_pure_spinor(&mut s, k))
        })
        .collect();
    let values = evaluate(&spinors, |(k, rho)| {
        let nf = normal_form(rho, DEFAULT_TOL)?;
        if nf.k != *k {
            return Err(GcxError::Internal(format!("type {} found, {k} built", nf.k)));
        }
        Ok(nf.reconstruct().dist(rho)? / rho.max_abs())
    });
    b.absorb("normal-form round trip", &index_points(spinors.len()), &values);
    b.note("worst_point is the sample index; types cycle through 0, 1, 2");
    Ok(b.finish())
}

// ------------------------------------------------------------ local model

fn cplane_point(s: &mut Sampler, on_locus: bool) -> ChartPoint {
    let mut p = s.point(CPLANE, &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 0);
    if on_locus {
        p.coords[0] = 0.0;
        p.coords[1] = 0.0;
    }
    p
}

/// `ρ = z₁ + dz₁∧dz₂`: integrability with `H = 0`, witness `-∂₂`, and type
/// 2 exactly on `z₁ = 0`. Every tenth sample is placed on the locus.
pub fn check_local_model(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "local-model";
    let mut b = Builder::new(name, cfg.base_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let points: Vec<ChartPoint> = (0..cfg.samples).map(|i| cplane_point(&mut s, i % 10 == 0)).collect();
    let rho = models::local_model_spinor();
    let zero = FnForm::zero(4);
    let witness = models::local_model_witness();

    let values = evaluate(&points, |p| {
        let value = rho.value(&p.coords)?;
        let wit = integrability_residual(&rho, &zero, p)?;
        let v_rho = clifford(&witness, &value)?;
        let recovered = clifford(&wit.v, &value)?;
        Ok(wit.residual.max(recovered.dist(&v_rho)?))
    });
    b.absorb_points("integrability and witness", &points, &values);

    let types: Vec<Result<(bool, usize)>> = points
        .par_iter()
        .map(|p| {
            let on = p.coords[0] == 0.0 && p.coords[1] == 0.0;
            Ok((on, normal_form(&rho.value(&p.coords)?, DEFAULT_TOL)?.k))
        })
        .collect();
    let mut wrong = 0;
    let mut on_count = 0;
    for t in &types {
        match t {
            Ok((on, k)) => {
                on_count += *on as usize;
                wrong += (*k != if *on { 2 } else { 0 }) as usize;
            }
            Err(_) => wrong += 1,
        }
    }
    b.sub("type 2 exactly on z1 = 0, type 0 elsewhere", wrong == 0, format!("{wrong} mismatches, {on_count} points on the locus"));
    Ok(b.finish())
}

/// `Φ*ρ / ρ₀` in polar coordinates against the polar forms rescaled by
/// `θ₁ ↦ 2πθ₁`.
pub fn check_polar_compat(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "polar-compat";
    let mut b = Builder::new(name, cfg.geometry_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let r_min = cfg.geometry.r_min;
    let points: Vec<ChartPoint> =
        (0..cfg.samples).map(|_| s.point(POLAR, &[(r_min, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], ANGLES)).collect();
    let rho = crate::chart::Pullback { map: models::polar_to_cplane(), field: models::local_model_spinor() };
    let target = crate::chart::Pullback { map: models::angle_rescale(), field: models::polar_spinor(r_min) };
    let values = evaluate(&points, |p| {
        let v = rho.value(&p.coords)?;
        let scaled = v.scale(1.0 / v.coeff(0));
        scaled.dist(&target.value(&p.coords)?)
    });
    b.absorb_points(name, &points, &values);
    b.note("z1 = r e^(2 pi i theta1): B + i omega of the complex model equals the polar forms with d theta1 scaled by 2 pi, up to the scalar rho0");
    Ok(b.finish())
}

// ---------------------------------------------------------------- surgery

/// `ψ*σ = ω` on the annulus, with `det Dψ ≠ 0` and `ψ⁻¹∘ψ = id`; a
/// perturbed `ψ` must fail.
pub fn check_symplectomorphism(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "symplectomorphism";
    let mut b = Builder::new(name, cfg.geometry_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let lo = cfg.geometry.annulus_min();
    let mut points: Vec<ChartPoint> = (0..cfg.samples)
        .map(|_| {
            // (lo, 1]
            let r = 1.0 - s.uniform(0.0, 1.0 - lo);
            let mut p = s.point(POLAR, &[(0.0, 0.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], ANGLES);
            p.coords[0] = r;
            p
        })
        .collect();
    if let Some(first) = points.first_mut() {
        first.coords[0] = 1.0;
    }
    let psi = models::gluing_map();
    let sigma = models::tube_symplectic();
    let omega = models::polar_omega(cfg.geometry.r_min);

    let values = evaluate(&points, |p| {
        let pulled = pullback(&psi, &sigma, p)?;
        Ok(pulled.dist(&omega.value(&p.coords)?)?.max(psi.round_trip_error(p)?))
    });
    b.absorb_points("psi* sigma = omega", &points, &values);

    let dets: Vec<f64> = points.par_iter().map(|p| psi.jacobian(&p.coords).map(|j| j.determinant().abs()).unwrap_or(0.0)).collect();
    let min_det = dets.iter().cloned().fold(f64::INFINITY, f64::min);
    b.sub("det D psi nonzero", min_det > 1e-8, format!("min |det| {}", sci(min_det)));

    let bad = models::perturbed_gluing_map(0.01);
    let neg = evaluate(&points, |p| pullback(&bad, &sigma, p)?.dist(&omega.value(&p.coords)?));
    let neg_max = reduce(&neg).max;
    b.sub("negative control (tube radius shifted by 0.01)", neg_max > 1e-3, format!("max residual {}", sci(neg_max)));
    Ok(b.finish())
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Integral of `H` over `{θ̃₂ = const}` for `r̃ ∈ [lo, hi]`, oriented by
/// `dr̃∧dθ̃₁∧dθ̃₃`, by product quadrature.
pub fn slice_integral(geometry: SurgeryGeometry, lo: f64, hi: f64, theta2: f64) -> Result<f64> {
    let h = models::h_field(geometry, 1.0);
    let n_ang = 4;
    let mut total = 0.0;
    let first_err = std::cell::RefCell::new(None);
    for i in 0..n_ang {
        for j in 0..n_ang {
            let (t1, t3) = ((i as f64 + 0.5) / n_ang as f64, (j as f64 + 0.5) / n_ang as f64);
            let coeff = |r: f64| match h.value(&[r, t1, theta2, t3]) {
                Ok(v) => v.coeff(0b1011).re,
                Err(e) => {
                    first_err.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            };
            total += simpson(coeff, lo, hi, 2000) / (n_ang * n_ang) as f64;
        }
    }
    match first_err.into_inner() {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Tolerance on `|∫H| = 1` over the slice.
pub const SLICE_TOL: f64 = 1e-6;

/// `dH = 0`, `H = 0` off the bump window, closed form against `s·dB̃`, and
/// the slice integral.
pub fn check_h_properties(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "h-properties";
    h_properties_for(cfg, cfg.geometry, name, tol)
}

fn h_properties_for(cfg: &CheckConfig, g: SurgeryGeometry, name: &str, tol: f64) -> Result<CheckReport> {
    let mut params = cfg.base_params(tol);
    params.insert("r_min".into(), json!(g.r_min));
    params.insert("r_out".into(), json!(g.r_out));
    params.insert("profile".into(), json!(g.profile));
    params.insert("slice_tol".into(), json!(SLICE_TOL));
    let mut b = Builder::new(name, params, tol);
    let mut s = Sampler::new(cfg.seed, name);
    let hi = g.r_out + 1.0;
    let points: Vec<ChartPoint> =
        (0..cfg.samples).map(|_| s.point(TUBE, &[(g.r_min, hi), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], ANGLES)).collect();
    let h = models::h_field(g, 1.0);
    let dh = Exterior(h.clone());
    let db = Exterior(models::b_extension(g));

    let values = evaluate(&points, |p| {
        let assembled = db.value(&p.coords)?.scale(C64::new(TWIST_FROM_B_SIGN, 0.0));
        let hv = h.value(&p.coords)?;
        Ok(dh.value(&p.coords)?.max_abs().max(assembled.dist(&hv)?))
    });
    b.absorb_points("dH and H = s dB~", &points, &values);

    let outside: Vec<&ChartPoint> = points.iter().filter(|p| p.coords[0] <= 1.0 || p.coords[0] >= g.r_out).collect();
    let mut leak = 0.0f64;
    for p in &outside {
        leak = leak.max(h.value(&p.coords)?.max_abs());
    }
    for r in [g.r_min, 0.5, 1.0, g.r_out, g.r_out + 0.5] {
        leak = leak.max(h.value(&[r, 0.25, 0.5, 0.75])?.max_abs());
    }
    b.sub("H vanishes for r~ <= 1 and r~ >= R_out", leak == 0.0, format!("max |H| {} at {} points", sci(leak), outside.len() + 5));

    let integral = slice_integral(g, 1.0, g.r_out, 0.0)?;
    b.sub("slice integral", (integral.abs() - 1.0).abs() <= SLICE_TOL, format!("integral of H over theta~2 = const is {integral:.9}"));
    let outer = slice_integral(g, g.r_out, g.r_out + 1.0, 0.0)?;
    b.sub("slice integral beyond R_out", outer == 0.0, format!("{outer:.3e}"));
    b.note(format!(
        "H = {:+} f'(r~) dr~^dth~1^dth~3 = {:+} dB~; slice integral sign {:+}",
        -TWIST_FROM_B_SIGN,
        TWIST_FROM_B_SIGN,
        integral.signum()
    ));
    Ok(b.finish())
}

/// Regions for the integrability check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Cplane,
    Polar,
    Bump,
    Outer,
    Quotient(LogModelParams),
}

impl Region {
    pub fn name(&self) -> String {
        match self {
            Region::Cplane => "integrability-cplane".into(),
            Region::Polar => "integrability-polar".into(),
            Region::Bump => "integrability-bump".into(),
            Region::Outer => "integrability-outer".into(),
            Region::Quotient(p) => format!("integrability-quotient-m{}-k{}", p.m, p.k),
        }
    }
}

/// Max of `‖dρ + H∧ρ − v·ρ‖` over the region with the frozen `H`.
pub fn check_integrability(cfg: &CheckConfig, region: Region, tol: f64) -> Result<CheckReport> {
    integrability_for(cfg, cfg.geometry, region, &region.name(), tol)
}

fn integrability_for(cfg: &CheckConfig, g: SurgeryGeometry, region: Region, name: &str, tol: f64) -> Result<CheckReport> {
    let mut params = cfg.base_params(tol);
    params.insert("region".into(), json!(region.name().trim_start_matches("integrability-")));
    if matches!(region, Region::Polar | Region::Bump | Region::Outer) {
        params.insert("r_min".into(), json!(g.r_min));
        params.insert("r_out".into(), json!(g.r_out));
        params.insert("profile".into(), json!(g.profile));
    }
    if let Region::Quotient(q) = region {
        params.insert("m".into(), json!(q.m));
        params.insert("k".into(), json!(q.k));
    }
    let mut b = Builder::new(name, params, tol);
    let mut s = Sampler::new(cfg.seed, name);
    let angles = [(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)];
    let sample = |s: &mut Sampler, chart: &str, lo: f64, hi: f64| {
        let mut ranges = vec![(lo, hi)];
        ranges.extend(angles);
        s.point(chart, &ranges, ANGLES)
    };
    let zero = FnForm::zero(4);
    let (rho, h, points): (FnForm, FnForm, Vec<ChartPoint>) = match region {
        Region::Cplane => (
            models::local_model_spinor(),
            zero.clone(),
            (0..cfg.samples).map(|i| cplane_point(&mut s, i % 10 == 0)).collect(),
        ),
        Region::Polar => (
            models::polar_spinor(g.r_min),
            zero.clone(),
            (0..cfg.samples).map(|_| sample(&mut s, POLAR, g.r_min, 1.0)).collect(),
        ),
        Region::Bump => (
            models::glued_spinor(g),
            models::h_field(g, 1.0),
            (0..cfg.samples).map(|_| sample(&mut s, TUBE, 1.0, g.r_out)).collect(),
        ),
        Region::Outer => (
            models::glued_spinor(g),
            models::h_field(g, 1.0),
            (0..cfg.samples).map(|_| sample(&mut s, TUBE, g.r_out, g.r_out + 1.0)).collect(),
        ),
        Region::Quotient(q) => (
            models::log_model_spinor(q, g.r_min),
            zero.clone(),
            (0..cfg.samples).map(|_| sample(&mut s, QUOTIENT, g.r_min.powi(q.m as i32), 1.0)).collect(),
        ),
    };
    let values = evaluate(&points, |p| {
        let wit = integrability_residual(&rho, &h, p)?;
        if region == Region::Outer {
            return Ok(wit.residual.max(wit.v.max_abs()));
        }
        Ok(wit.residual)
    });
    b.absorb_points(name, &points, &values);

    match region {
        Region::Outer => b.note("outer region: residual includes |v|, the witness must vanish"),
        Region::Bump => {
            let flipped = models::h_field(g, -1.0);
            let neg = evaluate(&points, |p| Ok(integrability_residual(&rho, &flipped, p)?.residual));
            let neg_max = reduce(&neg).max;
            b.sub("negative control (opposite H sign)", neg_max > 1e-3, format!("max residual {}", sci(neg_max)));
            b.note(format!("frozen twist: H = {:+} dB~", TWIST_FROM_B_SIGN));
        }
        _ => {}
    }
    Ok(b.finish())
}

/// The surgery run on several disjoint tori at once: one window per torus,
/// each with its own outer radius, all required to pass.
pub fn check_simultaneous(cfg: &CheckConfig, tol: f64, tol2: f64) -> Result<CheckReport> {
    let name = "simultaneous-surgery";
    let windows = [1.5, cfg.geometry.r_out, cfg.geometry.r_out + 1.0];
    let mut params = cfg.geometry_params(tol);
    params.insert("tol2".into(), json!(tol2));
    params.insert("windows".into(), json!(windows));
    let mut b = Builder::new(name, params, 1.0);
    let mut worst = 0.0f64;
    for (i, &r_out) in windows.iter().enumerate() {
        let g = SurgeryGeometry { r_out, ..cfg.geometry };
        let h = h_properties_for(cfg, g, &format!("{name}-h-{i}"), tol2)?;
        let int = integrability_for(cfg, g, Region::Bump, &format!("{name}-bump-{i}"), tol)?;
        for r in [&h, &int] {
            let scaled = r.max_residual / r.params["tol"].as_f64().unwrap_or(1.0);
            if scaled > worst || b.worst_point.is_empty() {
                worst = scaled;
                b.worst_point = r.worst_point.clone();
            }
            b.sub(&format!("torus {i} (R_out = {r_out}) {}", r.check), r.pass, format!("max residual {}", sci(r.max_residual)));
        }
    }
    b.max_residual = worst;
    b.note("max_residual is the largest residual divided by its tolerance; pass requires it <= 1");
    Ok(b.finish())
}

// --------------------------------------------------------------- quotient

/// Deck invariance, `ω′` pullback, the `B′` discrepancy, orbit freeness and
/// integrability of the quotient model.
pub fn check_quotient(cfg: &CheckConfig, q: LogModelParams, tol: f64, tol_b: f64) -> Result<CheckReport> {
    LogModelParams::new(q.m, q.k)?;
    let name = format!("quotient-m{}-k{}", q.m, q.k);
    let mut params = cfg.base_params(tol);
    params.insert("m".into(), json!(q.m));
    params.insert("k".into(), json!(q.k));
    params.insert("r_min".into(), json!(cfg.geometry.r_min));
    params.insert("tol_b".into(), json!(tol_b));
    let mut b = Builder::new(&name, params, tol);
    let mut s = Sampler::new(cfg.seed, &name);
    let r_min = cfg.geometry.r_min;
    let points: Vec<ChartPoint> =
        (0..cfg.samples).map(|_| s.point(POLAR, &[(r_min, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, 1.0)], ANGLES)).collect();

    let (bf, wf) = (models::polar_b(r_min), models::polar_omega(r_min));
    let deck = models::deck_map(q);
    let cover = models::log_cover_map(q);
    let (b_q, w_q) = (models::log_model_b(q, r_min), models::log_model_omega(q, r_min));

    let values = evaluate(&points, |p| {
        let inv_b = pullback(&deck, &bf, p)?.dist(&bf.value(&p.coords)?)?;
        let inv_w = pullback(&deck, &wf, p)?.dist(&wf.value(&p.coords)?)?;
        let w_pull = pullback(&cover, &w_q, p)?.dist(&wf.value(&p.coords)?)?;
        Ok(inv_b.max(inv_w).max(w_pull))
    });
    b.absorb_points("deck invariance and omega' pullback", &points, &values);

    let expected = models::b_discrepancy(q, r_min);
    let disc: Vec<Result<(f64, f64)>> = points
        .par_iter()
        .map(|p| {
            let jet = pullback_jet(&cover, &b_q, &p.coords)?.try_sub(&bf.jet(&p.coords)?)?;
            let mismatch = jet.value().dist(&expected.value(&p.coords)?)?;
            let closed = d_jet(&jet)?.value().max_abs();
            Ok((mismatch, closed))
        })
        .collect();
    let (mut mismatch, mut closed) = (0.0f64, 0.0f64);
    for d in disc {
        let (m, c) = d?;
        mismatch = mismatch.max(m);
        closed = closed.max(c);
    }
    b.sub(
        "B' discrepancy equals (m-1) dlog r ^ d theta2",
        mismatch <= tol_b && closed <= tol_b,
        format!("coefficient mismatch {}, |d(discrepancy)| {}", sci(mismatch), sci(closed)),
    );
    b.note(format!(
        "pullback of B' differs from B by {} dlog r ^ d theta2 (closed); reported, not corrected",
        q.m - 1
    ));

    let orbit_ok = [0.0, 0.5].iter().all(|&r| {
        let start = ChartPoint::new(POLAR, vec![r, 0.1, 0.2, 0.3], ANGLES);
        let orbit = models::deck_orbit(q, &start);
        let distinct = (0..orbit.len()).all(|i| (0..i).all(|j| orbit[i].distance(&orbit[j]) > 1e-9));
        let back = (0..q.m).fold(start.clone(), |p, _| models::deck_action(q, &p));
        orbit.len() == q.m as usize && distinct && back.distance(&start) < 1e-12
    });
    b.sub("deck orbits have exactly m points, also at r = 0", orbit_ok, format!("m = {}", q.m));

    let int = integrability_for(cfg, cfg.geometry, Region::Quotient(q), &format!("{name}-integrability"), tol)?;
    b.sub("integrability of exp(B' + i omega') with H = 0", int.pass, format!("max residual {}", sci(int.max_residual)));
    Ok(b.finish())
}

// ------------------------------------------------------------------ locus

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub sv_tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-12, sv_tol: 1e-4, max_iter: 50 }
    }
}

/// A point found on the zero set of `ρ₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocusPoint {
    pub location: ChartPoint,
    pub converged: bool,
    pub iterations: usize,
    pub residuals: Vec<f64>,
    pub nondegenerate: bool,
    pub min_singular_value: f64,
    /// Real basis of the tangent space of the locus.
    pub tangent: Vec<[f64; 4]>,
}

/// Value and real Jacobian of `(Re ρ₀, Im ρ₀)`.
fn rho0_and_jacobian(rho: &dyn FormField, p: &[f64]) -> Result<(C64, DMatrix<f64>)> {
    let r0 = rho.jet(p)?.coeff(0);
    let jac = DMatrix::from_fn(2, 4, |i, j| if i == 0 { r0.g[j].re } else { r0.g[j].im });
    Ok((r0.v, jac))
}

fn singular_values_2x4(j: &DMatrix<f64>) -> (f64, f64) {
    let g = j * j.transpose();
    let (a, b, d) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
    let mean = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    ((mean + disc).max(0.0).sqrt(), (mean - disc).max(0.0).sqrt())
}

fn real_kernel(j: &DMatrix<f64>) -> Vec<[f64; 4]> {
    linalg::kernel(&j.map(|x| C64::new(x, 0.0)), DEFAULT_TOL)
        .into_iter()
        .map(|v| {
            let n = v.norm();
            [v[0].re / n, v[1].re / n, v[2].re / n, v[3].re / n]
        })
        .collect()
}

/// Newton iteration on `(Re ρ₀, Im ρ₀)` with the Jacobian pseudo-inverse.
pub fn locate_type_change(rho: &dyn FormField, seeds: &[ChartPoint], opts: NewtonOptions) -> Result<Vec<LocusPoint>> {
    seeds.par_iter().map(|seed| newton(rho, seed, opts)).collect()
}

fn newton(rho: &dyn FormField, seed: &ChartPoint, opts: NewtonOptions) -> Result<LocusPoint> {
    let mut x = DVector::from_column_slice(&seed.coords);
    let mut residuals = Vec::new();
    let mut iterations = 0;
    loop {
        let (f, jac) = rho0_and_jacobian(rho, x.as_slice())?;
        residuals.push(f.norm());
        if f.norm() <= opts.tol || iterations == opts.max_iter {
            let (_, smin) = singular_values_2x4(&jac);
            let converged = f.norm() <= opts.tol;
            return Ok(LocusPoint {
                location: ChartPoint::new(seed.chart.clone(), x.iter().cloned().collect(), seed.periodic),
                converged,
                iterations,
                residuals,
                nondegenerate: converged && smin >= opts.sv_tol,
                min_singular_value: smin,
                tangent: real_kernel(&jac),
            });
        }
        let jjt = &jac * jac.transpose();
        let Some(inv) = jjt.try_inverse() else {
            return Ok(LocusPoint {
                location: ChartPoint::new(seed.chart.clone(), x.iter().cloned().collect(), seed.periodic),
                converged: false,
                iterations,
                residuals,
                nondegenerate: false,
                min_singular_value: 0.0,
                tangent: Vec::new(),
            });
        };
        let rhs = DVector::from_vec(vec![f.re, f.im]);
        x -= jac.transpose() * inv * rhs;
        iterations += 1;
    }
}

/// `r_{i+1} ≤ C r_i² + floor` along the residual history.
pub fn quadratic_decay(residuals: &[f64], c: f64, floor: f64) -> bool {
    residuals.windows(2).all(|w| w[1] <= c * w[0] * w[0] + floor)
}

/// Complex structure on the locus and its Teichmüller parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct LocusStructure {
    /// `max |dρ₀(X)| / |X|` over a basis of `T^{0,1}`.
    pub annihilation_defect: f64,
    /// Distance of `I·t` from the tangent plane, and of the lattice from it.
    pub invariance_defect: f64,
    pub i_matrix: DMatrix<f64>,
    pub tau: C64,
}

/// Reduce `τ` (upper half plane) to the standard fundamental domain.
pub fn reduce_tau(mut tau: C64) -> C64 {
    for _ in 0..100 {
        tau.re -= tau.re.round();
        if tau.norm_sqr() < 1.0 - 1e-14 {
            tau = -1.0 / tau;
        } else {
            break;
        }
    }
    if tau.re >= 0.5 {
        tau.re -= 1.0;
    }
    tau
}

/// The complex structure from `ρ₂` at a nondegenerate locus point, checks
/// against `dρ₀`, and `τ` of the given lattice (two vectors in the locus
/// tangent plane).
pub fn locus_complex_structure(rho: &dyn FormField, lp: &LocusPoint, lattice: [[f64; 4]; 2]) -> Result<LocusStructure> {
    if !lp.nondegenerate {
        return Err(GcxError::Degenerate("locus point is degenerate".into()));
    }
    let jet = rho.jet(&lp.location.coords)?;
    let rho2 = jet.value().grade(2);
    let zero = C64::new(0.0, 0.0);
    let mut m = DMatrix::from_element(16, 4, zero);
    for j in 0..4 {
        let mut x = vec![zero; 4];
        x[j] = C64::new(1.0, 0.0);
        for (mask, c) in rho2.interior(&x)?.terms() {
            m[(mask as usize, j)] = c;
        }
    }
    let t01 = linalg::kernel(&m, DEFAULT_TOL);
    if t01.len() != 2 {
        return Err(GcxError::Degenerate(format!("rho2 has a {}-dimensional kernel, expected 2", t01.len())));
    }
    let g = jet.coeff(0).g;
    let annihilation_defect = t01
        .iter()
        .map(|x| (0..4).map(|i| g[i] * x[i]).sum::<C64>().norm() / x.norm())
        .fold(0.0, f64::max);

    let mut p = DMatrix::from_element(4, 4, zero);
    let mut d = DMatrix::from_element(4, 4, zero);
    for (k, x) in t01.iter().enumerate() {
        p.set_column(k, x);
        p.set_column(k + 2, &x.map(|c| c.conj()));
        d[(k, k)] = C64::new(0.0, -1.0);
        d[(k + 2, k + 2)] = C64::new(0.0, 1.0);
    }
    let i_c = &p * d * linalg::inverse(&p, DEFAULT_TOL)?;
    let i_matrix = i_c.map(|c| c.re);

    let tangent = DMatrix::from_fn(4, lp.tangent.len(), |r, c| C64::new(lp.tangent[c][r], 0.0));
    let in_plane = |v: &DVector<f64>| linalg::least_squares(&tangent, &v.map(|x| C64::new(x, 0.0)), DEFAULT_TOL).1;
    let mut invariance_defect = 0.0f64;
    for t in &lp.tangent {
        invariance_defect = invariance_defect.max(in_plane(&(&i_matrix * DVector::from_column_slice(t))));
    }
    let (t1, t2) = (DVector::from_column_slice(&lattice[0]), DVector::from_column_slice(&lattice[1]));
    invariance_defect = invariance_defect.max(in_plane(&t1)).max(in_plane(&t2));

    let it1 = &i_matrix * &t1;
    let basis = DMatrix::from_fn(4, 2, |r, c| C64::new(if c == 0 { t1[r] } else { it1[r] }, 0.0));
    let (ab, _) = linalg::least_squares(&basis, &t2.map(|x| C64::new(x, 0.0)), DEFAULT_TOL);
    let mut tau = C64::new(ab[0].re, ab[1].re);
    if tau.im < 0.0 {
        tau = -tau;
    }
    Ok(LocusStructure { annihilation_defect, invariance_defect, i_matrix, tau: reduce_tau(tau) })
}

/// `ρ₀ = z₁ + z₁²/2 + z₁z₂/4` with `dz₁∧dz₂` on top: same zero set near
/// the origin as the local model, but Newton takes several steps.
pub fn warped_fixture() -> FnForm {
    let top = standard::dz1_dz2();
    FnForm::new(4, move |x| {
        let i = C64::new(0.0, 1.0);
        let z1 = x[0] + x[1].scale(i);
        let z2 = x[2] + x[3].scale(i);
        let r0 = z1 + (z1 * z1).scale_re(0.5) + (z1 * z2).scale_re(0.25);
        let mut f = top.map(Jet::constant);
        f.set(0, r0);
        Ok(f)
    })
}

fn locus_seed(s: &mut Sampler) -> ChartPoint {
    let rad = 0.5 * s.uniform(0.0, 1.0).sqrt();
    let ang = s.uniform(0.0, 1.0);
    let (x2, y2) = (s.uniform(0.0, 1.0), s.uniform(0.0, 1.0));
    ChartPoint::new(CPLANE, vec![rad * (TAU * ang).cos(), rad * (TAU * ang).sin(), x2, y2], 0)
}

/// Constant in the quadratic decay test.
pub const QUADRATIC_C: f64 = 10.0;

/// Newton location of `z₁ = 0`, nondegeneracy, the induced complex
/// structure and `τ`, and the degenerate fixture.
pub fn check_locus(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "locus";
    let mut b = Builder::new(name, cfg.base_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let seeds: Vec<ChartPoint> = (0..cfg.samples).map(|_| locus_seed(&mut s)).collect();
    let opts = NewtonOptions::default();
    let rho = models::local_model_spinor();
    let lattice = [[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

    let found = locate_type_change(&rho, &seeds, opts)?;
    let values: Vec<Result<f64>> = found
        .par_iter()
        .map(|lp| {
            if !lp.converged {
                return Err(GcxError::Degenerate("Newton did not converge".into()));
            }
            let st = locus_complex_structure(&rho, lp, lattice)?;
            let tau_err = (st.tau - C64::new(0.0, 1.0)).norm();
            Ok(lp.residuals.last().copied().unwrap_or(0.0).max(st.annihilation_defect).max(st.invariance_defect).max(tau_err))
        })
        .collect();
    let points: Vec<ChartPoint> = found.iter().map(|lp| lp.location.clone()).collect();
    b.absorb_points("locus, d rho0 on T01, J-invariance, tau - i", &points, &values);

    let all_nondeg = found.iter().all(|lp| lp.converged && lp.nondegenerate);
    b.sub("all located points nondegenerate", all_nondeg, format!("{} seeds", found.len()));
    let quad = found.iter().all(|lp| quadratic_decay(&lp.residuals, QUADRATIC_C, 1e-14));
    b.sub("quadratic residual decay (local model)", quad, format!("max iterations {}", found.iter().map(|l| l.iterations).max().unwrap_or(0)));

    let warped = warped_fixture();
    let wf = locate_type_change(&warped, &seeds, opts)?;
    let w_ok = wf.iter().all(|lp| lp.converged && lp.nondegenerate && quadratic_decay(&lp.residuals, QUADRATIC_C, 1e-14));
    let w_iter = wf.iter().map(|l| l.iterations).max().unwrap_or(0);
    b.sub("quadratic residual decay (warped fixture)", w_ok, format!("max iterations {w_iter}"));

    let degenerate = locate_type_change(&models::degenerate_fixture(), &seeds[..seeds.len().min(10)], opts)?;
    let flagged = degenerate.iter().all(|lp| !lp.nondegenerate);
    b.sub("rho0 = z1^2 flagged degenerate", flagged, format!("{} seeds", degenerate.len()));

    let on = locate_type_change(&rho, &[ChartPoint::new(CPLANE, vec![0.0, 0.0, 0.3, 0.6], 0)], opts)?;
    b.sub("seed on the locus takes 0 iterations", on[0].iterations == 0, format!("{} iterations", on[0].iterations));

    if let Some(lp) = found.first() {
        let changed = locus_complex_structure(&rho, lp, [[0.0, 0.0, 2.0, 1.0], [0.0, 0.0, 1.0, 1.0]])?;
        let d = (changed.tau - C64::new(0.0, 1.0)).norm();
        b.sub("tau invariant under a unimodular change of lattice basis", d <= tol, format!("|tau - i| = {}", sci(d)));
        for q in &cfg.quotients {
            let quotient_lattice = [[0.0, 0.0, 1.0 / q.m as f64, 0.0], [0.0, 0.0, 0.0, 1.0]];
            let st = locus_complex_structure(&rho, lp, quotient_lattice)?;
            let expected = reduce_tau(C64::new(0.0, q.m as f64));
            let d = (st.tau - expected).norm();
            b.sub(
                &format!("quotient fibre (m = {}) tau = {}i", q.m, q.m),
                d <= tol,
                format!("tau = {:.12} + {:.12}i", st.tau.re, st.tau.im),
            );
        }
    }
    Ok(b.finish())
}

// ----------------------------------------------------------------- bfield

fn bracket_points(s: &mut Sampler, n: usize) -> Vec<(ChartPoint, VectorExpr, VectorExpr, FormExpr, FormExpr, FormExpr)> {
    (0..n)
        .map(|_| {
            let p = s.point("bfield", &[(-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0), (-1.0, 1.0)], 0);
            let u = VectorExpr::random_polynomial(s.rng(), 4, 2);
            let v = VectorExpr::random_polynomial(s.rng(), 4, 2);
            let h = FormExpr::random_polynomial(s.rng(), 4, &[3], 1);
            let a = FormExpr::random_polynomial(s.rng(), 4, &[1], 2);
            let b = FormExpr::random_polynomial(s.rng(), 4, &[2], 2);
            (p, u, v, h, a, b)
        })
        .collect()
}

/// Closed `B = dA + B₀` commutes with the bracket; non-closed `B` shifts
/// `H` by the frozen sign times `dB`.
pub fn check_bfield(cfg: &CheckConfig, tol: f64) -> Result<CheckReport> {
    let name = "bfield";
    let mut b = Builder::new(name, cfg.base_params(tol), tol);
    let mut s = Sampler::new(cfg.seed, name);
    let cases = bracket_points(&mut s, cfg.samples);
    let b0 = FnForm::constant(random_real_two_form(&mut s));

    let closed = evaluate(&cases, |(p, u, v, h, a, _)| {
        let da = Exterior(a);
        let bc = FnForm::new(4, {
            let b0 = b0.clone();
            let a = a.clone();
            move |x| {
                let pt: Vec<f64> = x.iter().map(|j| j.v.re).collect();
                d_jet(&a.jet(&pt)?)?.try_add(&b0.jet(&pt)?)
            }
        });
        let lhs = courant_bracket(&BShift { field: u, b: &bc }, &BShift { field: v, b: &bc }, h, p)?;
        let rhs = courant_bracket(u, v, h, p)?.b_field(&bc.value(&p.coords)?)?;
        let closedness = Exterior(&da).value(&p.coords)?.max_abs();
        Ok(lhs.dist(&rhs)?.max(closedness))
    });
    b.absorb_points("closed B equivariance", &cases.iter().map(|c| c.0.clone()).collect::<Vec<_>>(), &closed);

    let shift = |sign: f64| {
        evaluate(&cases, move |(p, u, v, h, _, bf)| {
            let lhs = courant_bracket(&BShift { field: u, b: bf }, &BShift { field: v, b: bf }, h, p)?;
            let db = d_jet(&bf.jet(&p.coords)?)?.value();
            let twisted = h.value(&p.coords)?.try_add(&db.scale(C64::new(sign, 0.0)))?;
            let inner = courant_bracket_jets(&u.jet(&p.coords)?, &v.jet(&p.coords)?, &twisted)?;
            lhs.dist(&inner.b_field(&bf.value(&p.coords)?)?)
        })
    };
    let points: Vec<ChartPoint> = cases.iter().map(|c| c.0.clone()).collect();
    b.absorb_points("non-closed B shift with frozen sign", &points, &shift(BRACKET_B_SIGN));
    let neg_max = reduce(&shift(-BRACKET_B_SIGN)).max;
    b.sub("opposite sign rejected", neg_max > 1e-3, format!("max residual {}", sci(neg_max)));
    b.note(format!("frozen: [E_B u, E_B v]_H = E_B [u, v]_(H {:+} dB)", BRACKET_B_SIGN));
    Ok(b.finish())
}

// ----------------------------------------------------------------- groups

/// Check groups selectable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Algebra,
    LocalModel,
    Surgery,
    Quotient,
    Locus,
    Bfield,
}

impl Group {
    pub const ALL: [Group; 6] = [Group::Algebra, Group::LocalModel, Group::Surgery, Group::Quotient, Group::Locus, Group::Bfield];

    pub fn name(&self) -> &'static str {
        match self {
            Group::Algebra => "algebra",
            Group::LocalModel => "local-model",
            Group::Surgery => "surgery",
            Group::Quotient => "quotient",
            Group::Locus => "locus",
            Group::Bfield => "bfield",
        }
    }

    pub fn parse(s: &str) -> Result<Vec<Group>> {
        if s == "all" {
            return Ok(Group::ALL.to_vec());
        }
        Group::ALL
            .iter()
            .find(|g| g.name() == s)
            .map(|g| vec![*g])
            .ok_or_else(|| GcxError::InvalidArgument(format!("unknown check group '{s}'")))
    }
}

/// Run one group; stops at the first check that fails to run and returns
/// the reports completed so far alongside the error.
pub fn run_group(cfg: &CheckConfig, group: Group) -> std::result::Result<Vec<CheckReport>, (Vec<CheckReport>, GcxError)> {
    let mut out = Vec::new();
    let steps: Vec<Box<dyn Fn() -> Result<CheckReport>>> = match group {
        Group::Algebra => vec![
            Box::new(|| check_clifford(cfg, 1e-12)),
            Box::new(|| check_annihilators(cfg, 1e-12, cfg.tol)),
        ],
        Group::LocalModel => vec![
            Box::new(|| check_local_model(cfg, cfg.tol)),
            Box::new(|| check_polar_compat(cfg, cfg.tol)),
            Box::new(|| check_integrability(cfg, Region::Cplane, cfg.tol)),
            Box::new(|| check_integrability(cfg, Region::Polar, cfg.tol)),
        ],
        Group::Surgery => vec![
            Box::new(|| check_symplectomorphism(cfg, cfg.tol)),
            Box::new(|| check_h_properties(cfg, cfg.tol2)),
            Box::new(|| check_integrability(cfg, Region::Bump, cfg.tol)),
            Box::new(|| check_integrability(cfg, Region::Outer, cfg.tol)),
            Box::new(|| check_simultaneous(cfg, cfg.tol, cfg.tol2)),
        ],
        Group::Quotient => cfg
            .quotients
            .iter()
            .map(|&q| Box::new(move || check_quotient(cfg, q, cfg.tol, cfg.tol)) as Box<dyn Fn() -> Result<CheckReport>>)
            .collect(),
        Group::Locus => vec![Box::new(|| check_locus(cfg, cfg.tol))],
        Group::Bfield => vec![Box::new(|| check_bfield(cfg, cfg.tol2))],
    };
    for step in steps {
        match step() {
            Ok(r) => out.push(r),
            Err(e) => return Err((out, e)),
        }
    }
    Ok(out)
}

/// Conventions note attached to every run.
pub fn conventions_note() -> String {
    conventions::summary()
}
