//! One- and two-qubit normalized operators in the Pauli coefficient convention.
//!
//! A single-qubit operator `[x, y, z]` stands for `(I + xX + yY + zZ)/2`. A
//! two-qubit operator is the 4×4 real matrix `ρ_ij` of
//! `(1/4) Σ ρ_ij σ_i ⊗ σ_j` with `σ = (I, X, Y, Z)` and `ρ_00 = 1`.
//!
//! Computational basis index of `|ab⟩` is `2a + b`, qubit A first.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{wrap_angle, Real};

pub type Mat2<T> = [[Complex<T>; 2]; 2];
pub type Mat4<T> = [[Complex<T>; 4]; 4];

/// Normalized single-qubit operator as a Bloch 3-vector.
///
/// The transverse radius may exceed one (the operator need not be positive),
/// but `|z| ≤ 1` always holds.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochOp<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> BlochOp<T> {
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::NonFinite);
        }
        if z.abs() > T::one() + T::epsilon() * T::lit(8.0) {
            return Err(Error::ZOutOfRange(z.to_f64_lossy()));
        }
        Ok(Self { x, y, z: z.max(-T::one()).min(T::one()) })
    }

    /// Builds `[ρ cos a, ρ sin a, z]`.
    pub fn from_polar(radius: T, azimuth: T, z: T) -> Result<Self> {
        Self::new(radius * azimuth.cos(), radius * azimuth.sin(), z)
    }

    /// Pure state at polar angle `theta` and azimuth `azimuth`.
    pub fn pure(theta: T, azimuth: T) -> Self {
        let s = theta.sin();
        Self { x: s * azimuth.cos(), y: s * azimuth.sin(), z: theta.cos() }
    }

    pub fn maximally_mixed() -> Self {
        Self { x: T::zero(), y: T::zero(), z: T::zero() }
    }

    /// Transverse radius `√(x² + y²)`.
    pub fn radius(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn azimuth(&self) -> T {
        self.y.atan2(self.x)
    }

    /// `(1, x, y, z)`.
    pub fn coeffs(&self) -> [T; 4] {
        [T::one(), self.x, self.y, self.z]
    }

    /// Conjugation by `diag(1, e^{iγ})`, which rotates the azimuth by `+γ`.
    pub fn rotate_z(&self, gamma: T) -> Self {
        let (s, c) = gamma.sin_cos();
        Self { x: c * self.x - s * self.y, y: s * self.x + c * self.y, z: self.z }
    }

    /// Uniform scaling of all three components, as thermal noise does.
    pub fn shrink(&self, factor: T) -> Self {
        Self { x: self.x * factor, y: self.y * factor, z: self.z * factor }
    }

    pub fn dist(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }

    /// Computational-basis matrix `(I + xX + yY + zZ)/2`.
    pub fn to_matrix(&self) -> Mat2<T> {
        let h = T::lit(0.5);
        [
            [Complex::new(h * (T::one() + self.z), T::zero()), Complex::new(h * self.x, -h * self.y)],
            [Complex::new(h * self.x, h * self.y), Complex::new(h * (T::one() - self.z), T::zero())],
        ]
    }

    /// Born value `(1 + m·n)/2` of the projector onto the `+1` eigenspace of `m·σ`.
    pub fn born_plus(&self, axis: [T; 3]) -> T {
        T::lit(0.5) * (T::one() + axis[0] * self.x + axis[1] * self.y + axis[2] * self.z)
    }
}

/// Index helpers for the Pauli matrices `I, X, Y, Z` as 2×2 complex matrices.
pub fn pauli<T: Real>(i: usize) -> Mat2<T> {
    let z = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let im = Complex::new(T::zero(), T::one());
    match i {
        0 => [[one, z], [z, one]],
        1 => [[z, one], [one, z]],
        2 => [[z, -im], [im, z]],
        3 => [[one, z], [z, -one]],
        _ => panic!("pauli index {i} out of range"),
    }
}

/// Pauli coefficient matrix of a normalized two-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliCoeffMatrix<T> {
    m: [[T; 4]; 4],
}

impl<T: Real> PauliCoeffMatrix<T> {
    /// Validates `ρ_00 = 1` to a few ulps.
    pub fn new(m: [[T; 4]; 4]) -> Result<Self> {
        if m.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if (m[0][0] - T::one()).abs() > T::epsilon() * T::lit(64.0) {
            return Err(Error::NotNormalized(m[0][0].to_f64_lossy()));
        }
        let mut m = m;
        m[0][0] = T::one();
        Ok(Self { m })
    }

    /// Wraps a matrix without the normalization check.
    pub fn from_raw(m: [[T; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        m[0][0] = T::one();
        Self { m }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.m[i][j]
    }

    pub fn as_array(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    pub fn is_normalized(&self) -> bool {
        (self.m[0][0] - T::one()).abs() <= T::epsilon() * T::lit(64.0)
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        let mut d = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }

    /// `(1/4) Σ ρ_ij σ_i ⊗ σ_j` in the computational basis.
    pub fn to_computational(&self) -> Mat4<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let quarter = T::lit(0.25);
        let mut out = [[zero; 4]; 4];
        for i in 0..4 {
            let si = pauli::<T>(i);
            for j in 0..4 {
                let c = self.m[i][j];
                if c == T::zero() {
                    continue;
                }
                let sj = pauli::<T>(j);
                for (a, ap, b, bp) in quad_indices() {
                    out[2 * a + b][2 * ap + bp] += si[a][ap] * sj[b][bp] * (c * quarter);
                }
            }
        }
        out
    }

    /// Inverse of [`to_computational`](Self::to_computational): `ρ_ij = Tr(M σ_i ⊗ σ_j)`.
    ///
    /// Only the Hermitian part of `m` contributes; imaginary residues are dropped.
    pub fn from_computational(m: &Mat4<T>) -> Self {
        let mut out = [[T::zero(); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            let si = pauli::<T>(i);
            for (j, entry) in row.iter_mut().enumerate() {
                let sj = pauli::<T>(j);
                let mut acc = Complex::new(T::zero(), T::zero());
                // Tr(M P) = Σ_{k,l} M[k][l] P[l][k]
                for (a, ap, b, bp) in quad_indices() {
                    acc += m[2 * a + b][2 * ap + bp] * si[ap][a] * sj[bp][b];
                }
                *entry = acc.re;
            }
        }
        Self { m: out }
    }

    /// Applies independent Z-rotations `diag(1, e^{iα})` on A and `diag(1, e^{iβ})` on B.
    pub fn rotate_z(&self, alpha: T, beta: T) -> Self {
        let ra = rotation_block(alpha);
        let rb = rotation_block(beta);
        let mut out = [[T::zero(); 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                let mut acc = T::zero();
                for k in 0..4 {
                    if ra[i][k] == T::zero() {
                        continue;
                    }
                    for l in 0..4 {
                        acc += ra[i][k] * self.m[k][l] * rb[j][l];
                    }
                }
                *entry = acc;
            }
        }
        Self { m: out }
    }

    /// Convex combination accumulator: `self + w · other`.
    pub fn add_scaled(&mut self, w: T, other: &Self) {
        for i in 0..4 {
            for j in 0..4 {
                self.m[i][j] += w * other.m[i][j];
            }
        }
    }

    pub fn zeros() -> Self {
        Self { m: [[T::zero(); 4]; 4] }
    }
}

fn quad_indices() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|k| (k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1))
}

/// 4×4 action of a Z-rotation on the coefficient vector `(1, x, y, z)`.
fn rotation_block<T: Real>(gamma: T) -> [[T; 4]; 4] {
    let (s, c) = gamma.sin_cos();
    let o = T::zero();
    let l = T::one();
    [[l, o, o, o], [o, c, -s, o], [o, s, c, o], [o, o, o, l]]
}

/// Product operator `a ⊗ b`: `ρ_ij = a_i b_j` with `a_0 = b_0 = 1`.
pub fn product_matrix<T: Real>(a: &BlochOp<T>, b: &BlochOp<T>) -> PauliCoeffMatrix<T> {
    let va = a.coeffs();
    let vb = b.coeffs();
    let mut m = [[T::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = va[i] * vb[j];
        }
    }
    PauliCoeffMatrix { m }
}

/// Two-qubit diagonal unitary `diag(e^{iφ1}, e^{iφ2}, e^{iφ3}, e^{iφ4})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalGate<T> {
    phases: [T; 4],
    phi: T,
}

/// Canonical phase plus the local diagonal phases that strip the raw gate down to `V_φ`.
///
/// `(diag(1, e^{-iγ_a}) ⊗ diag(1, e^{-iγ_b})) · g = e^{iφ1} V_φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalGate<T> {
    pub phi: T,
    pub local_a: T,
    pub local_b: T,
}

impl<T: Real> DiagonalGate<T> {
    pub fn from_phases(phases: [T; 4]) -> Result<Self> {
        if phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite);
        }
        let phases = phases.map(wrap_angle);
        let phi = wrap_angle(phases[3] + phases[0] - phases[1] - phases[2]);
        Ok(Self { phases, phi })
    }

    /// `V_φ = diag(1, 1, 1, e^{iφ})`.
    pub fn canonical(phi: T) -> Self {
        let phi = wrap_angle(phi);
        Self { phases: [T::zero(), T::zero(), T::zero(), phi], phi }
    }

    pub fn phases(&self) -> [T; 4] {
        self.phases
    }

    pub fn phi(&self) -> T {
        self.phi
    }

    pub fn diagonal(&self) -> [Complex<T>; 4] {
        self.phases.map(|p| Complex::new(p.cos(), p.sin()))
    }
}

pub fn canonicalize_gate<T: Real>(g: &DiagonalGate<T>) -> CanonicalGate<T> {
    let [p1, p2, p3, _] = g.phases;
    CanonicalGate {
        phi: g.phi,
        local_a: wrap_angle(p3 - p1),
        local_b: wrap_angle(p2 - p1),
    }
}

/// Coefficients of `V_φ M V_φ†`, by exact conjugation in the computational basis.
pub fn apply_gate<T: Real>(phi: T, m: &PauliCoeffMatrix<T>) -> PauliCoeffMatrix<T> {
    conjugate_diagonal(&DiagonalGate::canonical(phi).diagonal(), m)
}

/// Conjugation by an arbitrary diagonal two-qubit unitary.
pub fn conjugate_diagonal<T: Real>(d: &[Complex<T>; 4], m: &PauliCoeffMatrix<T>) -> PauliCoeffMatrix<T> {
    let mut c = m.to_computational();
    for (k, row) in c.iter_mut().enumerate() {
        for (l, e) in row.iter_mut().enumerate() {
            *e = d[k] * *e * d[l].conj();
        }
    }
    let mut out = PauliCoeffMatrix::from_computational(&c);
    out.m[0][0] = m.m[0][0];
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn op(x: f64, y: f64, z: f64) -> BlochOp<f64> {
        BlochOp::new(x, y, z).unwrap()
    }

    #[test]
    fn z_out_of_range_rejected() {
        assert!(matches!(BlochOp::new(0.0, 0.0, 1.01), Err(Error::ZOutOfRange(_))));
        assert!(BlochOp::new(5.0, -3.0, 1.0).is_ok());
        assert!(matches!(BlochOp::new(f64::NAN, 0.0, 0.0), Err(Error::NonFinite)));
    }

    #[test]
    fn unnormalized_matrix_rejected() {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 0.5;
        assert!(matches!(PauliCoeffMatrix::new(m), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn canonicalize_examples() {
        let cz = DiagonalGate::from_phases([0.0, 0.0, 0.0, PI]).unwrap();
        assert_abs_diff_eq!(canonicalize_gate(&cz).phi, PI, epsilon = 1e-15);

        let g = DiagonalGate::from_phases([PI / 2.0, PI / 4.0, PI / 4.0, PI / 2.0]).unwrap();
        assert_abs_diff_eq!(g.phi(), PI / 2.0, epsilon = 1e-12);

        let raw = [0.3, 1.1, 2.0, 5.9];
        let c = 0.77;
        let a = DiagonalGate::from_phases(raw).unwrap();
        let b = DiagonalGate::from_phases(raw.map(|p| p + c)).unwrap();
        assert_abs_diff_eq!(a.phi(), b.phi(), epsilon = 1e-12);
    }

    #[test]
    fn canonical_locals_strip_raw_gate() {
        let raw = [0.4, 2.2, 1.3, 3.7];
        let g = DiagonalGate::from_phases(raw).unwrap();
        let cg = canonicalize_gate(&g);
        let d = g.diagonal();
        // diag(1, e^{-iγa}) ⊗ diag(1, e^{-iγb}) applied to g, divided by e^{iφ1}
        let loc = |bit: usize, gamma: f64| if bit == 1 { Complex::from_polar(1.0, -gamma) } else { Complex::new(1.0, 0.0) };
        let global = Complex::from_polar(1.0, -raw[0]);
        for k in 0..4 {
            let v = loc(k >> 1, cg.local_a) * loc(k & 1, cg.local_b) * d[k] * global;
            let want = if k == 3 { Complex::from_polar(1.0, cg.phi) } else { Complex::new(1.0, 0.0) };
            assert!((v - want).norm() < 1e-12, "k={k}: {v} vs {want}");
        }
    }

    #[test]
    fn product_matrix_examples() {
        let m = product_matrix(&op(0.0, 0.0, 0.0), &op(0.0, 0.0, 0.0));
        assert_eq!(m, PauliCoeffMatrix::identity());

        let m = product_matrix(&op(1.0, 0.0, 0.0), &op(0.0, 0.0, 1.0));
        let mut want = [[0.0; 4]; 4];
        want[0][0] = 1.0;
        want[1][0] = 1.0;
        want[1][3] = 1.0;
        want[0][3] = 1.0;
        assert_eq!(m.as_array(), &want);
    }

    #[test]
    fn cz_on_cylinder_extrema_matches_displayed_matrix() {
        let (ra, rb) = (0.3, 0.7);
        let out = apply_gate(PI, &product_matrix(&op(ra, 0.0, 1.0), &op(rb, 0.0, 1.0)));
        let want = [
            [1.0, rb, 0.0, 1.0],
            [ra, 0.0, 0.0, ra],
            [0.0, 0.0, ra * rb, 0.0],
            [1.0, rb, 0.0, 1.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(out.get(i, j), want[i][j], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn general_phi_matches_displayed_matrix() {
        for &phi in &[PI / 2.0, 0.4, 2.9, 4.4] {
            let (ra, rb) = (0.8, 0.55);
            let out = apply_gate(phi, &product_matrix(&op(ra, 0.0, 1.0), &op(rb, 0.0, 1.0)));
            let (s, c) = phi.sin_cos();
            let want = [
                [1.0, rb, 0.0, 1.0],
                [ra, ra * rb * (c + 1.0) / 2.0, ra * rb * s / 2.0, ra],
                [0.0, ra * rb * s / 2.0, ra * rb * (1.0 - c) / 2.0, 0.0],
                [1.0, rb, 0.0, 1.0],
            ];
            for i in 0..4 {
                for j in 0..4 {
                    assert_abs_diff_eq!(out.get(i, j), want[i][j], epsilon = 1e-12);
                }
            }
        }
        let out = apply_gate(PI / 2.0, &product_matrix(&op(1.0, 0.0, 1.0), &op(1.0, 0.0, 1.0)));
        assert_abs_diff_eq!(out.get(1, 1), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.get(1, 2), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.get(2, 1), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(out.get(2, 2), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn identity_gate_is_noop() {
        let m = product_matrix(&op(0.2, -0.4, 0.1), &op(1.3, 0.5, -0.9));
        assert!(apply_gate(0.0, &m).max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn works_in_single_precision() {
        let out = apply_gate(std::f32::consts::PI, &product_matrix(
            &BlochOp::new(0.5_f32, 0.0, 1.0).unwrap(),
            &BlochOp::new(0.5_f32, 0.0, 1.0).unwrap(),
        ));
        assert!((out.get(2, 2) - 0.25).abs() < 1e-6);
        assert!(out.get(1, 1).abs() < 1e-6);
    }

    fn arb_matrix() -> impl Strategy<Value = PauliCoeffMatrix<f64>> {
        prop::array::uniform16(-2.0..2.0f64).prop_map(|v| {
            let mut m = [[0.0; 4]; 4];
            for (k, x) in v.iter().enumerate() {
                m[k / 4][k % 4] = *x;
            }
            m[0][0] = 1.0;
            PauliCoeffMatrix::new(m).unwrap()
        })
    }

    proptest! {
        #[test]
        fn computational_round_trip(m in arb_matrix()) {
            let back = PauliCoeffMatrix::from_computational(&m.to_computational());
            prop_assert!(back.max_abs_diff(&m) <= 1e-12);
        }

        #[test]
        fn gate_inverse(m in arb_matrix(), phi in 0.0..std::f64::consts::TAU) {
            let back = apply_gate(-phi, &apply_gate(phi, &m));
            prop_assert!(back.max_abs_diff(&m) <= 1e-12);
        }

        #[test]
        fn gate_commutes_with_z_rotations(m in arb_matrix(), phi in 0.0..6.28f64, a in -4.0..4.0f64, b in -4.0..4.0f64) {
            let lhs = apply_gate(phi, &m.rotate_z(a, b));
            let rhs = apply_gate(phi, &m).rotate_z(a, b);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }

        #[test]
        fn z_only_entries_fixed(m in arb_matrix(), phi in 0.0..6.28f64) {
            let out = apply_gate(phi, &m);
            for &i in &[0usize, 3] {
                for &j in &[0usize, 3] {
                    prop_assert!((out.get(i, j) - m.get(i, j)).abs() <= 1e-12);
                }
            }
        }

        #[test]
        fn rotate_z_matches_bloch_rotation(x in -1.5..1.5f64, y in -1.5..1.5f64, z in -1.0..1.0f64,
                                           u in -1.0..1.0f64, a in -4.0..4.0f64, b in -4.0..4.0f64) {
            let p = op(x, y, z);
            let q = op(u, x, y.clamp(-1.0, 1.0));
            let lhs = product_matrix(&p, &q).rotate_z(a, b);
            let rhs = product_matrix(&p.rotate_z(a), &q.rotate_z(b));
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }
}
