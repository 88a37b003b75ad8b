//! Generalized-separable decompositions by LP feasibility over products of
//! discretized extremals, plus the radius searches built on them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::lambda_of_phi;
use crate::lp::FeasibilityLp;
use crate::pauli::{apply_gate, product_matrix, BlochOp, PauliCoeffMatrix};
use crate::scalar::Real;
use crate::state_spaces::{cylinder_extremals, spindle_extremals, symmetrize, Discretization, Spindle};

/// Default LP slack: feasible iff the phase-one optimum is at most this.
pub fn default_lp_eps<T: Real>() -> T {
    T::lit(1e-9).max(T::lit(16.0) * T::epsilon().powf(T::lit(0.75)))
}

fn weight_sum_tol<T: Real>() -> T {
    T::lit(1e-9).max(T::lit(64.0) * T::epsilon())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedProduct<T> {
    pub weight: T,
    pub a: BlochOp<T>,
    pub b: BlochOp<T>,
}

/// `Σ p_i a_i ⊗ b_i` standing in for `target`, with max-entry error `residual`.
#[derive(Debug, Clone)]
pub struct SepDecomposition<T> {
    pub terms: Vec<WeightedProduct<T>>,
    pub target: PauliCoeffMatrix<T>,
    pub residual: T,
}

impl<T: Real> SepDecomposition<T> {
    pub fn weight_sum(&self) -> T {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn reconstruct(&self) -> PauliCoeffMatrix<T> {
        let mut m = PauliCoeffMatrix::zeros();
        for t in &self.terms {
            m.add_scaled(t.weight, &product_matrix(&t.a, &t.b));
        }
        m
    }

    /// Recompute the reconstruction error from scratch.
    pub fn reconstruction_error(&self) -> T {
        self.reconstruct().max_abs_diff(&self.target)
    }

    /// Check weights form a probability vector and the stated residual is honest.
    pub fn verify(&self) -> Result<()> {
        if let Some(t) = self.terms.iter().find(|t| !(t.weight >= T::zero())) {
            return Err(Error::InvalidArgument(format!("negative weight {}", t.weight)));
        }
        let s = self.weight_sum();
        if (s - T::one()).abs() > weight_sum_tol() {
            return Err(Error::NotNormalized((s - T::one()).to_f64_lossy()));
        }
        let err = self.reconstruction_error();
        if err > self.residual + T::lit(8.0) * T::epsilon() {
            return Err(Error::MarginTooSmall { residual: err.to_f64_lossy() });
        }
        Ok(())
    }

    /// Draw a term index from the weights using a uniform `u ∈ [0, 1)`.
    pub fn pick(&self, u: T) -> usize {
        let mut acc = T::zero();
        let target = u * self.weight_sum();
        for (i, t) in self.terms.iter().enumerate() {
            acc += t.weight;
            if target < acc {
                return i;
            }
        }
        self.terms.len() - 1
    }
}

#[derive(Debug, Clone)]
pub enum Decomposition<T> {
    Feasible(SepDecomposition<T>),
    /// Phase-one optimum `min ‖A x − b‖₁` when it exceeds the slack.
    Infeasible { objective: T },
}

impl<T> Decomposition<T> {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Decomposition::Feasible(_))
    }

    pub fn feasible(self) -> Option<SepDecomposition<T>> {
        match self {
            Decomposition::Feasible(d) => Some(d),
            Decomposition::Infeasible { .. } => None,
        }
    }
}

/// LP over all products `a_i ⊗ b_j` of two output discretizations: 16 equality
/// rows (the normalization `ρ_00 = 1` plus 15 Pauli coefficients), one column per pair.
#[derive(Debug, Clone)]
pub struct ProductBasis<T> {
    a: Discretization<T>,
    b: Discretization<T>,
    lp: FeasibilityLp<T>,
}

fn flatten<T: Real>(m: &PauliCoeffMatrix<T>) -> Vec<T> {
    m.as_array().iter().flat_map(|row| row.iter().copied()).collect()
}

impl<T: Real> ProductBasis<T> {
    pub fn new(a: &Discretization<T>, b: &Discretization<T>) -> Self {
        let mut lp = FeasibilityLp::with_capacity(vec![T::zero(); 16], a.len() * b.len());
        for pa in a.points() {
            for pb in b.points() {
                lp.push_column(&flatten(&product_matrix(pa, pb)));
            }
        }
        Self { a: a.clone(), b: b.clone(), lp }
    }

    pub fn variable_count(&self) -> usize {
        self.lp.cols()
    }

    fn solve(&self, target: &PauliCoeffMatrix<T>) -> Result<crate::lp::LpSolution<T>> {
        if !target.is_normalized() {
            return Err(Error::NotNormalized((target.get(0, 0) - T::one()).to_f64_lossy()));
        }
        let mut lp = self.lp.clone();
        lp.set_rhs(flatten(target));
        Ok(lp.solve())
    }

    /// Phase-one optimum for `target`; zero exactly when separable over this basis.
    pub fn residual(&self, target: &PauliCoeffMatrix<T>) -> Result<T> {
        Ok(self.solve(target)?.residual_l1)
    }

    pub fn decompose(&self, target: &PauliCoeffMatrix<T>, eps: T) -> Result<Decomposition<T>> {
        if !(eps >= T::zero()) {
            return Err(Error::InvalidArgument(format!("eps must be >= 0 (got {eps})")));
        }
        let sol = self.solve(target)?;
        if sol.residual_l1 > eps {
            return Ok(Decomposition::Infeasible { objective: sol.residual_l1 });
        }
        let nb = self.b.len();
        // round-off weights are pruned; the residual below is recomputed regardless
        let floor = T::lit(64.0) * T::epsilon();
        let kept: Vec<(usize, T)> = sol.support.iter().copied().filter(|&(_, w)| w > floor).collect();
        let total: T = kept.iter().map(|&(_, w)| w).sum();
        let terms = kept
            .iter()
            .map(|&(k, w)| WeightedProduct { weight: w / total, a: self.a.points()[k / nb], b: self.b.points()[k % nb] })
            .collect();
        let mut d = SepDecomposition { terms, target: *target, residual: T::zero() };
        d.residual = d.reconstruction_error();
        if d.residual > eps {
            return Ok(Decomposition::Infeasible { objective: d.residual });
        }
        d.verify()?;
        Ok(Decomposition::Feasible(d))
    }
}

/// One-shot LP decomposition of `target` over `space_a × space_b`.
pub fn decompose<T: Real>(
    target: &PauliCoeffMatrix<T>,
    space_a: &Discretization<T>,
    space_b: &Discretization<T>,
    eps: T,
) -> Result<Decomposition<T>> {
    ProductBasis::new(space_a, space_b).decompose(target, eps)
}

/// Closed form for `V_φ (a ⊗ b) V_φ†` when either factor lies on the z axis.
///
/// `[0, 0, z] = ((1+z)/2)·[0, 0, 1] + ((1−z)/2)·[0, 0, −1]`, and the gate only
/// rotates the partner's azimuth by `φ` on the `|1⟩` branch.
pub fn axis_decomposition<T: Real>(a: &BlochOp<T>, b: &BlochOp<T>, phi: T) -> Option<SepDecomposition<T>> {
    let half = T::lit(0.5);
    let up = BlochOp { x: T::zero(), y: T::zero(), z: T::one() };
    let down = BlochOp { x: T::zero(), y: T::zero(), z: -T::one() };
    let raw = if a.radius() == T::zero() {
        [(half * (T::one() + a.z), up, *b), (half * (T::one() - a.z), down, b.rotate_z(phi))]
    } else if b.radius() == T::zero() {
        [(half * (T::one() + b.z), *a, up), (half * (T::one() - b.z), a.rotate_z(phi), down)]
    } else {
        return None;
    };
    let terms = raw
        .into_iter()
        .filter(|&(w, _, _)| w > T::zero())
        .map(|(weight, a, b)| WeightedProduct { weight, a, b })
        .collect();
    let mut d = SepDecomposition { terms, target: apply_gate(phi, &product_matrix(a, b)), residual: T::zero() };
    d.residual = d.reconstruction_error();
    Some(d)
}

/// Input pairs that must be checked, reduced to orbit representatives where the
/// output sets share the inputs' rotation symmetry (diagonal gates commute with
/// local Z rotations).
fn input_pairs<T: Real>(
    in_a: &Discretization<T>,
    in_b: &Discretization<T>,
    out_a: &Discretization<T>,
    out_b: &Discretization<T>,
) -> Vec<(BlochOp<T>, BlochOp<T>)> {
    let side = |input: &Discretization<T>, out: &Discretization<T>| -> Vec<BlochOp<T>> {
        if input.symmetry_order() > 1 && out.symmetry_order() % input.symmetry_order() == 0 {
            input.representatives().copied().collect()
        } else {
            input.points().to_vec()
        }
    };
    let a = side(in_a, out_a);
    let b = side(in_b, out_b);
    a.iter().flat_map(|pa| b.iter().map(move |pb| (*pa, *pb))).collect()
}

/// Whether every gated extremal input product is separable over `out_a × out_b`.
pub fn all_separable<T: Real>(
    in_a: &Discretization<T>,
    in_b: &Discretization<T>,
    out_a: &Discretization<T>,
    out_b: &Discretization<T>,
    phi: T,
    eps: T,
) -> Result<bool> {
    let basis = ProductBasis::new(out_a, out_b);
    let pairs = input_pairs(in_a, in_b, out_a, out_b);
    pairs.par_iter().try_fold(|| true, |ok, (a, b)| {
        if !ok {
            return Ok(false);
        }
        Ok(basis.residual(&apply_gate(phi, &product_matrix(a, b)))? <= eps)
    })
    .try_reduce(|| true, |x, y| Ok(x && y))
}

/// Smallest `x` in `[lo, hi]` with `pred(x)`, assuming monotonicity, to within `tol`.
fn bisect_min<T: Real>(lo: T, hi: T, tol: T, mut pred: impl FnMut(T) -> Result<bool>) -> Result<T> {
    if !(lo <= hi) || !(tol > T::zero()) {
        return Err(Error::InvalidArgument(format!("bad bracket [{lo}, {hi}] / tol {tol}")));
    }
    if !pred(hi)? {
        return Err(Error::NoFeasibleRadius { lo: lo.to_f64_lossy(), hi: hi.to_f64_lossy() });
    }
    if pred(lo)? {
        return Ok(lo);
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > tol {
        let mid = T::lit(0.5) * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Knobs shared by the radius searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions<T> {
    /// Sample angles per output circle.
    pub n_angles: usize,
    /// Absolute precision of the output-radius (or scale) bisection.
    pub tol: T,
    /// LP slack.
    pub eps: T,
}

impl<T: Real> Default for SearchOptions<T> {
    fn default() -> Self {
        Self { n_angles: crate::state_spaces::DEFAULT_N_ANGLES, tol: T::lit(1e-5), eps: default_lp_eps() }
    }
}

/// Smallest `R ∈ [lo, hi]` such that every gated extremal product of the inputs
/// decomposes over `Cyl(R) × Cyl(R)`.
pub fn min_output_radius<T: Real>(
    in_a: &Discretization<T>,
    in_b: &Discretization<T>,
    phi: T,
    bracket: (T, T),
    opts: &SearchOptions<T>,
) -> Result<T> {
    bisect_min(bracket.0, bracket.1, opts.tol, |r| {
        let out = cylinder_extremals(r, opts.n_angles, T::zero())?;
        all_separable(in_a, in_b, &out, &out, phi, opts.eps)
    })
}

/// Default search bracket for the first-gate output radius given largest input radius `r`.
pub fn default_radius_bracket<T: Real>(r: T, phi: T) -> (T, T) {
    (T::zero(), lambda_of_phi(phi) * r * T::lit(1.05) + T::lit(1e-9))
}

/// Input state-space family for [`max_simulatable_r`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// `Cyl(r)`.
    Cylinder,
    /// `B(r, √(1 − r²))`, the tightest spindle around pure states of radius `r`.
    Spindle,
}

impl Family {
    pub fn extremals<T: Real>(self, r: T, n_angles: usize) -> Result<Discretization<T>> {
        match self {
            Family::Cylinder => cylinder_extremals(r, n_angles, T::zero()),
            Family::Spindle => {
                let s = Spindle::pure_envelope(r)?;
                spindle_extremals(s.r, s.h, n_angles, T::zero())
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Cylinder => "cylinder",
            Family::Spindle => "spindle",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(Family::Cylinder),
            "spindle" => Ok(Family::Spindle),
            _ => Err(Error::InvalidArgument(format!("unknown family {s:?} (expected cylinder or spindle)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploreOptions<T> {
    pub search: SearchOptions<T>,
    /// Precision of the bisection on the input radius.
    pub r_tol: T,
    /// Output-radius margin applied to the `D − 1` later gate layers.
    pub eta: T,
}

impl<T: Real> Default for ExploreOptions<T> {
    fn default() -> Self {
        Self { search: SearchOptions::default(), r_tol: T::lit(1e-4), eta: T::zero() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceStep<T> {
    pub r: T,
    /// First-gate output radius.
    pub r1: T,
    /// `R_1 · (λ(1+η))^{D−1}`.
    pub final_radius: T,
    pub admitted: bool,
}

/// Result of [`max_simulatable_r`], serialized as the `explore` output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExploreReport<T> {
    pub family: Family,
    pub phi: T,
    #[serde(rename = "D")]
    pub d: u32,
    pub n_angles: usize,
    pub eta: T,
    pub r_max: T,
    pub bisection_trace: Vec<TraceStep<T>>,
}

/// Largest input radius `r` (to `r_tol`) whose first-gate output radius `R_1`
/// still fits the budget after `D − 1` further layers: `R_1 (λ(φ)(1+η))^{D−1} ≤ 1`.
pub fn max_simulatable_r<T: Real>(family: Family, phi: T, d: u32, opts: &ExploreOptions<T>) -> Result<ExploreReport<T>> {
    if d == 0 {
        return Err(Error::InvalidArgument("D must be >= 1".into()));
    }
    let growth = (lambda_of_phi(phi) * (T::one() + opts.eta)).powi(d as i32 - 1);
    let mut trace = Vec::new();
    let mut step = |r: T| -> Result<bool> {
        let input = family.extremals(r, opts.search.n_angles)?;
        let r1 = min_output_radius(&input, &input, phi, default_radius_bracket(r, phi), &opts.search)?;
        let final_radius = r1 * growth;
        let admitted = final_radius <= T::one();
        trace.push(TraceStep { r, r1, final_radius, admitted });
        Ok(admitted)
    };
    let (mut lo, mut hi) = (T::zero(), T::one());
    if step(hi)? {
        lo = hi;
    } else {
        while hi - lo > opts.r_tol {
            let mid = T::lit(0.5) * (lo + hi);
            if step(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    Ok(ExploreReport {
        family,
        phi,
        d,
        n_angles: opts.search.n_angles,
        eta: opts.eta,
        r_max: lo,
        bisection_trace: trace,
    })
}

/// `R*(S_A, S_B)`: smallest phasing scale `R` such that every gated extremal
/// product decomposes over `T_R(S_A) × T_R(S_B)`.
pub fn rstar<T: Real>(
    s_a: &Discretization<T>,
    s_b: &Discretization<T>,
    phi: T,
    bracket: (T, T),
    opts: &SearchOptions<T>,
) -> Result<T> {
    bisect_min(bracket.0, bracket.1, opts.tol, |r| {
        all_separable(s_a, s_b, &s_a.phased(r), &s_b.phased(r), phi, opts.eps)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RStarReport<T> {
    pub original: T,
    pub symmetrized: T,
    pub tolerance: T,
    /// `symmetrized ≤ original + tolerance`.
    pub holds: bool,
}

/// Compare `R*` before and after replacing `S_A` by the hull of its Z-rotation orbits.
pub fn rstar_compare<T: Real>(
    s_a: &Discretization<T>,
    s_b: &Discretization<T>,
    phi: T,
    bracket: (T, T),
    opts: &SearchOptions<T>,
    tolerance: T,
) -> Result<RStarReport<T>> {
    let sym = symmetrize(s_a, opts.n_angles)?;
    let original = rstar(s_a, s_b, phi, bracket, opts)?;
    let symmetrized = rstar(&sym, s_b, phi, bracket, opts)?;
    Ok(RStarReport { original, symmetrized, tolerance, holds: symmetrized <= original + tolerance })
}
