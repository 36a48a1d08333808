//! Frozen sign conventions. Each constant is pinned by a test that checks
//! both candidates and fails if the other one starts to fit.

/// Orientation of a chart is `dx¹∧…∧dxⁿ`; basis forms are indexed by
/// bitmasks with bit `i` for `dx^{i+1}`, ascending.
pub const ORIENTATION: &str = "dx1^...^dxn";

/// `[E_B u, E_B v]_H = E_B [u, v]_{H + s·dB}` with `E_B(X+ξ) = X + ξ + i_X B`.
pub const BRACKET_B_SIGN: f64 = 1.0;

/// If `dρ = v·ρ` then `e^B∧ρ` satisfies `dρ' + H∧ρ' = v'·ρ'` with `H = s·dB`.
pub const TWIST_FROM_B_SIGN: f64 = -1.0;

/// The annihilator of `e^B∧ρ` is `E_{sB}` applied to the annihilator of `ρ`.
pub const ANNIHILATOR_B_SIGN: f64 = -1.0;

/// `(1,0)`-covectors of a complex structure `I` satisfy `ξ∘I = s·iξ`.
pub const HOLOMORPHIC_EIGEN_SIGN: f64 = 1.0;

/// One-line summary used in report notes.
pub fn summary() -> String {
    format!(
        "orientation {ORIENTATION}; [E_B u,E_B v]_H = E_B[u,v]_(H{:+}dB); e^B twists H by {:+}dB; L(e^B rho) = E_({:+}B) L(rho)",
        BRACKET_B_SIGN, TWIST_FROM_B_SIGN, ANNIHILATOR_B_SIGN
    )
}
