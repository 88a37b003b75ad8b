//! Cylinder disentangling growth law.
//!
//! For the canonical gate `V_φ` acting on `Cyl(r_A) ⊗ Cyl(r_B)`, the output is
//! `Cyl(R_A), Cyl(R_B)`-separable iff the shrink ratios `f = r/R` satisfy the
//! determinant condition evaluated by [`lemma1_determinant`]. In the symmetric
//! case the minimal inflation `λ(φ) = R/r` is `√(T + 1)` where `T` is the unique
//! positive root of `t³ + αt + α` with `α = 4(cos φ − 1)`.

use crate::error::{Error, Result};
use crate::roots::brent;
use crate::scalar::Real;

/// Shrink ratios `f_A = r_A/R_A`, `f_B = r_B/R_B` and the canonical phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthQuery<T> {
    pub f_a: T,
    pub f_b: T,
    pub phi: T,
}

impl<T: Real> GrowthQuery<T> {
    pub fn new(f_a: T, f_b: T, phi: T) -> Result<Self> {
        if !(f_a > T::zero() && f_b > T::zero()) || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "shrink ratios must be positive (got f_a={f_a}, f_b={f_b})"
            )));
        }
        Ok(Self { f_a, f_b, phi })
    }

    pub fn symmetric(f: T, phi: T) -> Result<Self> {
        Self::new(f, f, phi)
    }
}

/// `α = 4(cos φ − 1)`; zero exactly when the gate is the identity.
pub fn alpha<T: Real>(phi: T) -> T {
    T::lit(4.0) * (phi.cos() - T::one())
}

/// True when `V_φ` is the identity to working precision.
pub fn is_identity_phase<T: Real>(phi: T) -> bool {
    alpha(phi) == T::zero()
}

/// `(1+f_A⁴)(1+f_B⁴) − 2(f_A²+f_B²) + 2(2−f_A²−f_B²) f_A² f_B² cos φ`.
///
/// Evaluated as `(1−f_A²)²(1−f_B²)² − 4(2−f_A²−f_B²) f_A² f_B² sin²(φ/2)`, which is
/// the same polynomial without the cancellation near the separability boundary.
pub fn lemma1_determinant<T: Real>(q: &GrowthQuery<T>) -> T {
    let one = T::one();
    let a2 = q.f_a * q.f_a;
    let b2 = q.f_b * q.f_b;
    let ua = one - a2;
    let ub = one - b2;
    let s = (q.phi * T::lit(0.5)).sin();
    ua * ua * ub * ub - T::lit(4.0) * (ua + ub) * a2 * b2 * s * s
}

/// Reduced symmetric form `(1−f²)³ + 4(cos φ − 1) f⁴`; the full determinant at
/// `f_A = f_B = f` is `(1 − f²)` times this.
pub fn symmetric_reduced_determinant<T: Real>(f: T, phi: T) -> T {
    let f2 = f * f;
    let u = T::one() - f2;
    let s = (phi * T::lit(0.5)).sin();
    u * u * u - T::lit(8.0) * s * s * f2 * f2
}

/// Default determinant slack: a few ulps, the evaluation's own rounding scale.
pub fn default_det_tol<T: Real>() -> T {
    T::epsilon() * T::lit(16.0)
}

/// Separability verdict at the exact boundary, up to rounding (`det ≥ −16ε`).
pub fn is_cyl_separable<T: Real>(q: &GrowthQuery<T>) -> bool {
    is_cyl_separable_tol(q, default_det_tol())
}

/// Separability verdict accepting `det ≥ −tol`.
pub fn is_cyl_separable_tol<T: Real>(q: &GrowthQuery<T>, tol: T) -> bool {
    let one = T::one();
    if is_identity_phase(q.phi) {
        return q.f_a <= one && q.f_b <= one;
    }
    q.f_a < one && q.f_b < one && lemma1_determinant(q) >= -tol
}

/// The growth cubic `t³ + αt + α`.
pub fn growth_cubic<T: Real>(t: T, alpha: T) -> T {
    t * t * t + alpha * t + alpha
}

/// Unique positive root `T(φ)` of the growth cubic, or zero for the identity gate.
pub fn growth_root<T: Real>(phi: T) -> T {
    let a = alpha(phi);
    if a == T::zero() {
        return T::zero();
    }
    let mut hi = T::one();
    while growth_cubic(hi, a) <= T::zero() {
        hi = hi * T::lit(2.0);
    }
    brent(|t| growth_cubic(t, a), T::zero(), hi).expect("cubic changes sign on (0, hi]")
}

/// Disentangling growth rate `λ(φ) = √(T(φ) + 1)`.
pub fn lambda_of_phi<T: Real>(phi: T) -> T {
    (growth_root(phi) + T::one()).sqrt()
}

fn check_degree(d: u32) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidArgument("D must be at least 1".into()));
    }
    Ok(())
}

/// Largest simulatable input cylinder radius `λ(φ)^{−D}`.
pub fn region_r_max<T: Real>(phi: T, d: u32) -> Result<T> {
    check_degree(d)?;
    Ok(lambda_of_phi(phi).powi(-(d as i32)))
}

/// Thermal excitation probability `e^{−1/T} / (1 + e^{−1/T})` (`k_B = 1`).
pub fn thermal_excitation<T: Real>(temperature: T) -> Result<T> {
    if !(temperature >= T::zero()) {
        return Err(Error::InvalidArgument(format!("temperature must be >= 0 (got {temperature})")));
    }
    if temperature == T::zero() {
        return Ok(T::zero());
    }
    Ok(T::one() / (T::one() + (T::one() / temperature).exp()))
}

/// Factor `1 − 2p_T` by which thermal noise shrinks a Bloch vector.
pub fn thermal_shrink<T: Real>(temperature: T) -> Result<T> {
    Ok(T::one() - T::lit(2.0) * thermal_excitation(temperature)?)
}

/// Upper bound on the polar angle of simulatable inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaBound<T> {
    /// Inputs with `θ ≤ theta` are inside the proven region.
    Bounded(T),
    /// The arcsin argument `ratio` exceeds one: every polar angle is covered.
    Saturated { ratio: T },
}

impl<T: Real> ThetaBound<T> {
    pub fn theta(&self) -> Option<T> {
        match *self {
            ThetaBound::Bounded(t) => Some(t),
            ThetaBound::Saturated { .. } => None,
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self, ThetaBound::Saturated { .. })
    }
}

/// `arcsin(λ(φ)^{−D} / (1 − 2p_T))`, with the thermal divisor only when a temperature is given.
pub fn region_theta_max<T: Real>(phi: T, d: u32, temperature: Option<T>) -> Result<ThetaBound<T>> {
    let r = region_r_max(phi, d)?;
    let ratio = match temperature {
        None => r,
        Some(t) => r / thermal_shrink(t)?,
    };
    if ratio > T::one() {
        Ok(ThetaBound::Saturated { ratio })
    } else {
        Ok(ThetaBound::Bounded(ratio.asin()))
    }
}

pub fn curve_lambda<T: Real>(grid: &[T]) -> Vec<(T, T)> {
    grid.iter().map(|&phi| (phi, lambda_of_phi(phi))).collect()
}

pub fn curve_region<T: Real>(d: u32, grid: &[T], temperature: Option<T>) -> Result<Vec<(T, ThetaBound<T>)>> {
    grid.iter()
        .map(|&phi| Ok((phi, region_theta_max(phi, d, temperature)?)))
        .collect()
}

/// `steps` evenly spaced points from `lo` to `hi` inclusive (`steps ≥ 2`), or `[lo]` for one step.
pub fn linspace<T: Real>(lo: T, hi: T, steps: usize) -> Vec<T> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        n => {
            let h = (hi - lo) / T::from_usize(n - 1).unwrap();
            (0..n).map(|k| if k + 1 == n { hi } else { lo + h * T::from_usize(k).unwrap() }).collect()
        }
    }
}
