//! Fresnel reflection amplitudes on the imaginary frequency axis and the
//! (t, u) integrand of the sphere–plate force.

use crate::dielectric::Permittivity;

/// TE and TM amplitudes. TE ∈ [0, 1], TM ∈ [−1, 0]; products of the same
/// polarisation from two surfaces are therefore non-negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub te: f64,
    pub tm: f64,
}

impl Reflection {
    pub const PERFECT: Reflection = Reflection { te: 1.0, tm: -1.0 };

    /// r_TE = (s − p)/(s + p), r_TM = (s − pε)/(s + pε), s = √(ε − 1 + p²).
    ///
    /// Both numerators are rewritten to factor out (ε − 1) so that ε → 1 and
    /// p ≫ 1 do not cancel catastrophically.
    pub fn new(eps: Permittivity, p: f64) -> Reflection {
        let e = match eps {
            Permittivity::Infinite => return Self::PERFECT,
            Permittivity::Finite(e) => e,
        };
        let em1 = e - 1.0;
        let s = (em1 + p * p).sqrt();
        let te = em1 / ((s + p) * (s + p));
        let tm = -em1 * (p * p * (e + 1.0) - 1.0) / ((s + p * e) * (s + p * e));
        Reflection { te, tm }
    }
}

/// u·[ln(1 − r_TE,1 r_TE,2 e^{−u}) + ln(1 − r_TM,1 r_TM,2 e^{−u})].
///
/// Non-positive; the force is the magnitude of its double integral.
pub fn integrand(a: Reflection, b: Reflection, u: f64) -> f64 {
    let decay = (-u).exp();
    let te = a.te * b.te * decay;
    let tm = a.tm * b.tm * decay;
    u * ((-te).ln_1p() + (-tm).ln_1p())
}
