//! Dense quantum ground truth for small instances.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::BlochOp;
use crate::sampler::{GraphSpec, Instance, MeasurementProgram};

/// Largest qubit counts for the dense simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleCaps {
    pub pure: usize,
    pub mixed: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        Self { pure: 12, mixed: 8 }
    }
}

/// Eigenvalues above `-PSD_TOL` count as nonnegative.
pub const PSD_TOL: f64 = 1e-10;
const PURITY_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cis(a: f64) -> Complex64 {
    Complex64::from_polar(1.0, a)
}

/// Bit of qubit `q` in basis index `k`; qubit 0 is the most significant.
fn bit(k: usize, q: usize, n: usize) -> usize {
    (k >> (n - 1 - q)) & 1
}

/// Product of all gate diagonals, one phase factor per basis state.
fn total_diagonal(inst: &Instance) -> Vec<Complex64> {
    let n = inst.ids.len();
    (0..1usize << n)
        .map(|k| {
            let phase: f64 = inst.gates.iter().map(|g| g.raw.phases()[2 * bit(k, g.a, n) + bit(k, g.b, n)]).sum();
            cis(phase)
        })
        .collect()
}

fn pure_amplitudes(p: &BlochOp<f64>) -> [Complex64; 2] {
    let theta = p.z.clamp(-1.0, 1.0).acos();
    [c((theta / 2.0).cos(), 0.0), cis(p.y.atan2(p.x)) * (theta / 2.0).sin()]
}

fn is_pure(p: &BlochOp<f64>) -> bool {
    (p.x * p.x + p.y * p.y + p.z * p.z - 1.0).abs() <= PURITY_TOL
}

/// `(I + m·σ)/2` for outcome bit 0, `(I − m·σ)/2` for bit 1.
fn projector(m: [f64; 3], outcome: u8) -> [[Complex64; 2]; 2] {
    let s = if outcome == 0 { 0.5 } else { -0.5 };
    [[c(0.5 + s * m[2], 0.0), c(s * m[0], -s * m[1])], [c(s * m[0], s * m[1]), c(0.5 - s * m[2], 0.0)]]
}

enum Dense {
    Pure(Vec<Complex64>),
    Mixed(DMatrix<Complex64>),
}

impl Dense {
    fn weight(&self) -> f64 {
        match self {
            Dense::Pure(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Dense::Mixed(m) => m.trace().re,
        }
    }

    fn project(&self, q: usize, n: usize, p: &[[Complex64; 2]; 2]) -> Dense {
        let stride = 1usize << (n - 1 - q);
        match self {
            Dense::Pure(v) => {
                let mut out = v.clone();
                for k in (0..v.len()).filter(|&k| k & stride == 0) {
                    let (a0, a1) = (v[k], v[k | stride]);
                    out[k] = p[0][0] * a0 + p[0][1] * a1;
                    out[k | stride] = p[1][0] * a0 + p[1][1] * a1;
                }
                Dense::Pure(out)
            }
            Dense::Mixed(m) => {
                let dim = m.nrows();
                let apply_left = |m: &DMatrix<Complex64>, p: &[[Complex64; 2]; 2]| {
                    let mut out = m.clone();
                    for k in (0..dim).filter(|&k| k & stride == 0) {
                        for l in 0..dim {
                            let (a0, a1) = (m[(k, l)], m[(k | stride, l)]);
                            out[(k, l)] = p[0][0] * a0 + p[0][1] * a1;
                            out[(k | stride, l)] = p[1][0] * a0 + p[1][1] * a1;
                        }
                    }
                    out
                };
                // P ρ P with P Hermitian: (P (P ρ)†)† = P ρ P
                let left = apply_left(m, p);
                Dense::Mixed(apply_left(&left.adjoint(), p).adjoint())
            }
        }
    }
}

fn prepare_state(inst: &Instance, caps: OracleCaps) -> Result<Dense> {
    let n = inst.ids.len();
    let diag = total_diagonal_checked(inst, n, caps)?;
    if !inst.thermal && inst.inputs.iter().all(is_pure) {
        let singles: Vec<[Complex64; 2]> = inst.inputs.iter().map(pure_amplitudes).collect();
        let v = (0..1usize << n)
            .map(|k| (0..n).fold(c(1.0, 0.0), |acc, q| acc * singles[q][bit(k, q, n)]) * diag[k])
            .collect();
        Ok(Dense::Pure(v))
    } else {
        if n > caps.mixed {
            return Err(Error::CapExceeded { n, cap: caps.mixed });
        }
        if let Some(p) = inst.inputs.iter().find(|p| p.x * p.x + p.y * p.y + p.z * p.z > 1.0 + PURITY_TOL) {
            return Err(Error::InvalidArgument(format!("input {p:?} is not a quantum state")));
        }
        let singles: Vec<[[Complex64; 2]; 2]> = inst.inputs.iter().map(|p| projector([p.x, p.y, p.z], 0)).collect();
        let dim = 1usize << n;
        let m = DMatrix::from_fn(dim, dim, |k, l| {
            (0..n).fold(c(1.0, 0.0), |acc, q| acc * singles[q][bit(k, q, n)][bit(l, q, n)]) * diag[k] * diag[l].conj()
        });
        Ok(Dense::Mixed(m))
    }
}

fn total_diagonal_checked(inst: &Instance, n: usize, caps: OracleCaps) -> Result<Vec<Complex64>> {
    if n > caps.pure {
        return Err(Error::CapExceeded { n, cap: caps.pure });
    }
    Ok(total_diagonal(inst))
}

/// Exact outcome distribution over program-order bitstrings, by walking the
/// full adaptive branch tree.
pub fn exact_distribution(g: &GraphSpec, prog: &MeasurementProgram, caps: OracleCaps) -> Result<BTreeMap<String, f64>> {
    let inst = g.prepare()?;
    let targets = prog.resolve(&inst)?;
    let n = inst.ids.len();
    let state = prepare_state(&inst, caps)?;
    let mut out = BTreeMap::new();
    let mut bits = Vec::with_capacity(targets.len());
    walk(&state, prog, &targets, n, &mut bits, &mut out);
    let total: f64 = out.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total - 1.0));
    }
    Ok(out)
}

fn walk(state: &Dense, prog: &MeasurementProgram, targets: &[usize], n: usize, bits: &mut Vec<u8>, out: &mut BTreeMap<String, f64>) {
    let k = bits.len();
    if k == targets.len() {
        let key: String = bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        out.insert(key, state.weight());
        return;
    }
    let (m, _) = prog.steps[k].axis(bits);
    for outcome in [0u8, 1] {
        let next = state.project(targets[k], n, &projector(m, outcome));
        bits.push(outcome);
        walk(&next, prog, targets, n, bits, out);
        bits.pop();
    }
}

/// `(I + f_A X)⊗(I + f_B X) + f_A f_B (e^{−iφ}−1)|00⟩⟨11| + h.c.`, divided by 4.
pub fn eq15_operator(fa: f64, fb: f64, phi: f64) -> Matrix4<Complex64> {
    let one = |f: f64| [[c(1.0, 0.0), c(f, 0.0)], [c(f, 0.0), c(1.0, 0.0)]];
    let (a, b) = (one(fa), one(fb));
    let mut m = Matrix4::from_fn(|k, l| a[k >> 1][l >> 1] * b[k & 1][l & 1]);
    let off = (cis(-phi) - 1.0) * fa * fb;
    m[(0, 3)] += off;
    m[(3, 0)] += off.conj();
    m / c(4.0, 0.0)
}

fn partial_transpose_b(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    Matrix4::from_fn(|k, l| m[((k & 2) | (l & 1), (l & 2) | (k & 1))])
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    e.sort_by(|a, b| a.partial_cmp(b).unwrap());
    e
}

pub fn eq15_min_eigenvalue(fa: f64, fb: f64, phi: f64) -> f64 {
    let m = eq15_operator(fa, fb, phi);
    hermitian_eigenvalues(DMatrix::from_iterator(4, 4, m.iter().copied()))[0]
}

/// PPT test on the gate-output operator; for two qubits this is separability.
pub fn ppt_separability_check(fa: f64, fb: f64, phi: f64) -> bool {
    let m = eq15_operator(fa, fb, phi);
    let pt = partial_transpose_b(&m);
    let lo = |x: Matrix4<Complex64>| hermitian_eigenvalues(DMatrix::from_iterator(4, 4, x.iter().copied()))[0];
    lo(m).min(lo(pt)) >= -PSD_TOL
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HamiltonianReport {
    pub n: usize,
    pub theta: f64,
    pub phi: f64,
    /// Identity shift fitted by matching traces; expected `N/2`.
    pub identity_shift: f64,
    pub max_form_difference: f64,
    pub ground_energy: f64,
    pub fidelity: f64,
    pub pass: bool,
}

/// Build the parent Hamiltonian twice (conjugated projector sum and explicit
/// neighbour form) and check the gated product state is its zero-energy ground state.
pub fn hamiltonian_check(g: &GraphSpec) -> Result<HamiltonianReport> {
    let inst = g.prepare()?;
    let n = inst.ids.len();
    if n > 8 {
        return Err(Error::CapExceeded { n, cap: 8 });
    }
    if n == 0 {
        return Err(Error::Graph("empty graph".into()));
    }
    let theta = match g.nodes[0].theta {
        Some(t) => t,
        None => return Err(Error::Graph("hamiltonian check needs theta inputs".into())),
    };
    if g.nodes.iter().any(|v| v.theta != Some(theta) || v.azimuth != 0.0 || v.bloch.is_some() || v.is_thermal()) {
        return Err(Error::Graph("hamiltonian check needs uniform pure inputs at azimuth 0".into()));
    }
    let phi = inst.gates.first().map_or(0.0, |e| e.canonical.phi);
    if inst.gates.iter().any(|e| e.raw.phases() != [0.0, 0.0, 0.0, phi]) {
        return Err(Error::Graph("hamiltonian check needs a uniform canonical edge phase".into()));
    }
    let dim = 1usize << n;
    let diag = total_diagonal(&inst);
    let (s, co) = theta.sin_cos();

    // (a) V (Σ A_n) V†, A_n = (I − sinθ X_n − cosθ Z_n)/2
    let mut sum_a = DMatrix::<Complex64>::zeros(dim, dim);
    for q in 0..n {
        let stride = 1usize << (n - 1 - q);
        for k in 0..dim {
            let z = if k & stride == 0 { 1.0 } else { -1.0 };
            sum_a[(k, k)] += c(0.5 * (1.0 - co * z), 0.0);
            sum_a[(k, k ^ stride)] += c(-0.5 * s, 0.0);
        }
    }
    let ha = DMatrix::from_fn(dim, dim, |k, l| diag[k] * sum_a[(k, l)] * diag[l].conj());

    // (b) −½ Σ_n [sinθ (|0⟩⟨1|_n ⊗ U_n(−φ) + |1⟩⟨0|_n ⊗ U_n(φ)) + cosθ Z_n]
    let mut hb = DMatrix::<Complex64>::zeros(dim, dim);
    for q in 0..n {
        let stride = 1usize << (n - 1 - q);
        for k in (0..dim).filter(|&k| k & stride == 0) {
            let hits: usize = inst
                .gates
                .iter()
                .filter_map(|e| match (e.a == q, e.b == q) {
                    (true, _) => Some(bit(k, e.b, n)),
                    (_, true) => Some(bit(k, e.a, n)),
                    _ => None,
                })
                .sum();
            let u = cis(-phi * hits as f64);
            hb[(k, k | stride)] += u * (-0.5 * s);
            hb[(k | stride, k)] += u.conj() * (-0.5 * s);
            hb[(k, k)] += c(-0.5 * co, 0.0);
            hb[(k | stride, k | stride)] += c(0.5 * co, 0.0);
        }
    }
    let shift = (ha.trace() - hb.trace()).re / dim as f64;
    let mut max_diff: f64 = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let want = hb[(k, l)] + if k == l { c(shift, 0.0) } else { c(0.0, 0.0) };
            max_diff = max_diff.max((ha[(k, l)] - want).norm());
        }
    }

    let eig = SymmetricEigen::new(ha);
    let (imin, ground_energy) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    let gs = eig.eigenvectors.column(imin);
    let psi = match prepare_state(&inst, OracleCaps::default())? {
        Dense::Pure(v) => v,
        Dense::Mixed(_) => unreachable!("uniform theta inputs are pure"),
    };
    let overlap: Complex64 = (0..dim).map(|k| gs[k].conj() * psi[k]).sum();
    let fidelity = overlap.norm_sqr();
    let pass = max_diff <= 1e-9 && ground_energy.abs() <= 1e-9 && fidelity >= 1.0 - 1e-9;
    Ok(HamiltonianReport { n, theta, phi, identity_shift: shift, max_form_difference: max_diff, ground_energy, fidelity, pass })
}
