//! Axially symmetric single-qubit state spaces and their extremal-point discretizations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::FeasibilityLp;
use crate::pauli::BlochOp;
use crate::scalar::Real;

/// Default number of sample angles per extremal circle.
pub const DEFAULT_N_ANGLES: usize = 40;

/// `Cyl(r)`: `x² + y² ≤ r²`, `|z| ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder<T> {
    pub r: T,
}

impl<T: Real> Cylinder<T> {
    pub fn new(r: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("cylinder radius must be >= 0 (got {r})")));
        }
        Ok(Self { r })
    }

    pub fn contains(&self, op: &BlochOp<T>, tol: T) -> bool {
        op.z.abs() <= T::one() + tol && op.radius() <= self.r + tol
    }
}

/// `B(r, h)`: convex hull of the radius-`r` discs at `z = ±h` and the poles `[0, 0, ±1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spindle<T> {
    pub r: T,
    pub h: T,
}

impl<T: Real> Spindle<T> {
    pub fn new(r: T, h: T) -> Result<Self> {
        if !(r >= T::zero()) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("spindle radius must be >= 0 (got {r})")));
        }
        if !(h >= T::zero() && h <= T::one()) {
            return Err(Error::InvalidArgument(format!("spindle height must lie in [0, 1] (got {h})")));
        }
        Ok(Self { r, h })
    }

    /// The spindle that just contains pure states of transverse radius `r`: `B(r, √(1 − r²))`.
    pub fn pure_envelope(r: T) -> Result<Self> {
        if !(r >= T::zero() && r <= T::one()) {
            return Err(Error::InvalidArgument(format!("pure-state radius must lie in [0, 1] (got {r})")));
        }
        Self::new(r, (T::one() - r * r).sqrt())
    }

    /// Largest transverse radius at height `z`.
    pub fn radius_at(&self, z: T) -> T {
        let az = z.abs();
        if az > T::one() {
            return -T::one();
        }
        if az <= self.h {
            self.r
        } else {
            self.r * (T::one() - az) / (T::one() - self.h)
        }
    }

    pub fn contains(&self, op: &BlochOp<T>, tol: T) -> bool {
        op.z.abs() <= T::one() + tol && op.radius() <= self.radius_at(op.z.max(-T::one()).min(T::one())) + tol
    }
}

/// Configuration form of a state space, as accepted in JSON.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateSpaceSpec {
    Cylinder {
        r: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_angles: Option<usize>,
    },
    Spindle {
        r: f64,
        h: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        n_angles: Option<usize>,
    },
}

impl StateSpaceSpec {
    pub fn n_angles(&self) -> usize {
        match *self {
            StateSpaceSpec::Cylinder { n_angles, .. } | StateSpaceSpec::Spindle { n_angles, .. } => {
                n_angles.unwrap_or(DEFAULT_N_ANGLES)
            }
        }
    }

    pub fn discretize(&self) -> Result<Discretization<f64>> {
        match *self {
            StateSpaceSpec::Cylinder { r, .. } => cylinder_extremals(r, self.n_angles(), 0.0),
            StateSpaceSpec::Spindle { r, h, .. } => spindle_extremals(r, h, self.n_angles(), 0.0),
        }
    }

    pub fn contains(&self, op: &BlochOp<f64>, tol: f64) -> Result<bool> {
        Ok(match *self {
            StateSpaceSpec::Cylinder { r, .. } => Cylinder::new(r)?.contains(op, tol),
            StateSpaceSpec::Spindle { r, h, .. } => Spindle::new(r, h)?.contains(op, tol),
        })
    }
}

/// Finite list of extremal points standing in for a compact state space.
///
/// Points are grouped in orbits of the cyclic rotation group of order
/// `symmetry_order` about the z axis; `representatives` holds one index per
/// orbit. A discretization with `symmetry_order == 1` has no known symmetry
/// and every point is its own representative.
#[derive(Debug, Clone, PartialEq)]
pub struct Discretization<T> {
    points: Vec<BlochOp<T>>,
    representatives: Vec<usize>,
    symmetry_order: usize,
}

/// Euclidean tolerance for merging coincident extremals.
pub const DEDUP_TOL: f64 = 1e-12;

impl<T: Real> Discretization<T> {
    /// Unstructured point set. Coincident points are merged.
    pub fn from_points(points: Vec<BlochOp<T>>) -> Self {
        let tol = T::lit(DEDUP_TOL);
        let mut out: Vec<BlochOp<T>> = Vec::with_capacity(points.len());
        for p in points {
            if !out.iter().any(|q| q.dist(&p) <= tol) {
                out.push(p);
            }
        }
        let representatives = (0..out.len()).collect();
        Self { points: out, representatives, symmetry_order: 1 }
    }

    /// Circles `(ρ, z)` sampled at `n_angles` uniform angles starting at `offset`.
    /// Circles with `ρ = 0` contribute a single axis point.
    pub fn from_circles(circles: &[(T, T)], n_angles: usize, offset: T) -> Result<Self> {
        if n_angles < 3 {
            return Err(Error::InvalidArgument(format!("n_angles must be >= 3 (got {n_angles})")));
        }
        let tol = T::lit(DEDUP_TOL);
        let step = T::TAU() / T::from_usize(n_angles).unwrap();
        let mut points = Vec::new();
        let mut representatives = Vec::new();
        let mut seen: Vec<(T, T)> = Vec::new();
        for &(rho, z) in circles {
            let rho = rho.max(T::zero());
            let key = if rho <= tol { (T::zero(), z) } else { (rho, z) };
            if seen.iter().any(|&(a, b)| (a - key.0).abs() <= tol && (b - key.1).abs() <= tol) {
                continue;
            }
            seen.push(key);
            representatives.push(points.len());
            if rho <= tol {
                points.push(BlochOp::new(T::zero(), T::zero(), z)?);
            } else {
                for k in 0..n_angles {
                    let a = offset + step * T::from_usize(k).unwrap();
                    points.push(BlochOp::from_polar(rho, a, z)?);
                }
            }
        }
        Ok(Self { points, representatives, symmetry_order: n_angles })
    }

    pub fn points(&self) -> &[BlochOp<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn representatives(&self) -> impl Iterator<Item = &BlochOp<T>> {
        self.representatives.iter().map(move |&i| &self.points[i])
    }

    pub fn symmetry_order(&self) -> usize {
        self.symmetry_order
    }

    /// Largest transverse radius among the points.
    pub fn max_radius(&self) -> T {
        self.points.iter().map(|p| p.radius()).fold(T::zero(), T::max)
    }

    /// Image under the phasing map `T_r` (orbit structure preserved).
    pub fn phased(&self, r: T) -> Self {
        Self {
            points: self.points.iter().map(|p| phasing(p, r)).collect(),
            representatives: self.representatives.clone(),
            symmetry_order: self.symmetry_order,
        }
    }

    /// Phase-one residual of writing `q` as a convex combination of the points.
    pub fn hull_residual(&self, q: &BlochOp<T>) -> T {
        let mut lp = FeasibilityLp::with_capacity(q.coeffs().to_vec(), self.points.len());
        for p in &self.points {
            lp.push_column(&p.coeffs());
        }
        lp.solve().residual_l1
    }

    pub fn hull_contains(&self, q: &BlochOp<T>, eps: T) -> bool {
        self.hull_residual(q) <= eps
    }
}

/// `2·n_angles` points `[r cos a_k, r sin a_k, ±1]`; the two poles when `r = 0`.
pub fn cylinder_extremals<T: Real>(r: T, n_angles: usize, offset: T) -> Result<Discretization<T>> {
    Cylinder::new(r)?;
    Discretization::from_circles(&[(r, T::one()), (r, -T::one())], n_angles, offset)
}

/// Circle points at `z = ±h` plus the poles, keeping only true extremals:
/// the poles are dropped when `h = 1` and the circles collapse when `r = 0`.
pub fn spindle_extremals<T: Real>(r: T, h: T, n_angles: usize, offset: T) -> Result<Discretization<T>> {
    Spindle::new(r, h)?;
    let tol = T::lit(DEDUP_TOL);
    let mut circles = Vec::new();
    if r > tol {
        circles.push((r, h));
        circles.push((r, -h));
    }
    if r <= tol || h < T::one() - tol {
        circles.push((T::zero(), T::one()));
        circles.push((T::zero(), -T::one()));
    }
    Discretization::from_circles(&circles, n_angles, offset)
}

/// Phasing map `T_r`: `[x, y, z] ↦ [r x, r y, z]`.
pub fn phasing<T: Real>(op: &BlochOp<T>, r: T) -> BlochOp<T> {
    BlochOp { x: op.x * r, y: op.y * r, z: op.z }
}

/// Convex hull of the Z-rotation orbits of `points`, rediscretized at `n_angles`.
///
/// The hull of a union of orbits is a solid of revolution whose profile is the
/// 2-D hull of `(±ρ_i, z_i)`; its extremal circles are the profile's vertices
/// with `ρ ≥ 0`.
pub fn symmetrize<T: Real>(points: &Discretization<T>, n_angles: usize) -> Result<Discretization<T>> {
    let mut profile: Vec<(T, T)> = Vec::with_capacity(2 * points.len());
    for p in points.points() {
        let rho = p.radius();
        profile.push((rho, p.z));
        profile.push((-rho, p.z));
    }
    let hull = convex_hull_2d(profile);
    let tol = T::lit(DEDUP_TOL);
    let circles: Vec<(T, T)> = hull
        .into_iter()
        .filter(|&(rho, _)| rho >= -tol)
        .map(|(rho, z)| (rho.max(T::zero()), z))
        .collect();
    Discretization::from_circles(&circles, n_angles, T::zero())
}

/// Andrew's monotone chain; returns strict vertices in counter-clockwise order.
fn convex_hull_2d<T: Real>(mut pts: Vec<(T, T)>) -> Vec<(T, T)> {
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup_by(|a, b| (a.0 - b.0).abs() <= T::lit(DEDUP_TOL) && (a.1 - b.1).abs() <= T::lit(DEDUP_TOL));
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: (T, T), a: (T, T), b: (T, T)| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let eps = T::lit(1e-14);
    let mut lower: Vec<(T, T)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(T, T)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Hausdorff distance between a radius-`r` disc and its inscribed `n`-gon.
pub fn polygon_gap<T: Real>(r: T, n_angles: usize) -> T {
    r * (T::one() - (T::PI() / T::from_usize(n_angles).unwrap()).cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn op(x: f64, y: f64, z: f64) -> BlochOp<f64> {
        BlochOp::new(x, y, z).unwrap()
    }

    fn has_point(d: &Discretization<f64>, p: BlochOp<f64>) -> bool {
        d.points().iter().any(|q| q.dist(&p) < 1e-12)
    }

    #[test]
    fn cylinder_examples() {
        let d = cylinder_extremals(0.0, 40, 0.0).unwrap();
        assert_eq!(d.len(), 2);
        assert!(has_point(&d, op(0.0, 0.0, 1.0)) && has_point(&d, op(0.0, 0.0, -1.0)));

        let d = cylinder_extremals(1.0, 4, 0.0).unwrap();
        assert_eq!(d.len(), 8);
        assert!(has_point(&d, op(1.0, 0.0, 1.0)));
        assert!(has_point(&d, op(0.0, 1.0, -1.0)));
        assert_eq!(d.representatives().count(), 2);
        assert!(cylinder_extremals(1.0, 2, 0.0).is_err());
        assert!(cylinder_extremals(-1.0, 8, 0.0).is_err());
    }

    #[test]
    fn cylinder_membership_within_gap() {
        let (r, n) = (0.7, 12);
        let d = cylinder_extremals(r, n, 0.0).unwrap();
        let gap = polygon_gap(r, n);
        for k in 0..25 {
            let a = 0.37 * k as f64;
            let z = ((k as f64) * 0.41).sin();
            // on the continuum boundary: inside once pulled in by the gap
            let outer = BlochOp::from_polar(r, a, z).unwrap();
            let inner = BlochOp::from_polar(r - gap - 1e-12, a, z).unwrap();
            assert!(Cylinder::new(r).unwrap().contains(&outer, 1e-12));
            assert!(d.hull_contains(&inner, 1e-10), "k={k}");
            let out = BlochOp::from_polar(r * 1.01, a, z).unwrap();
            assert!(!d.hull_contains(&out, 1e-10));
        }
    }

    #[test]
    fn spindle_examples() {
        let d = spindle_extremals(0.5, 1.0, 10, 0.0).unwrap();
        let c = cylinder_extremals(0.5, 10, 0.0).unwrap();
        assert_eq!(d.points(), c.points());

        let d = spindle_extremals(0.8, 0.6, 16, 0.0).unwrap();
        assert_eq!(d.len(), 34);
        assert!(has_point(&d, op(0.8, 0.0, 0.6)));
        assert!(has_point(&d, op(0.0, 0.0, 1.0)));
        assert!(has_point(&d, op(0.0, 0.0, -1.0)));

        let r: f64 = 0.3;
        let s = Spindle::pure_envelope(r).unwrap();
        let pure = BlochOp::pure(r.asin(), 1.2);
        assert!(s.contains(&pure, 1e-12));
        assert!((s.radius_at(pure.z) - r).abs() < 1e-12);
        assert!(Spindle::new(0.5, 1.5).is_err());
    }

    #[test]
    fn spindle_membership() {
        let s = Spindle::new(0.8, 0.6).unwrap();
        assert!(s.contains(&op(0.8, 0.0, 0.6), 1e-12));
        assert!(s.contains(&op(0.0, 0.0, 1.0), 1e-12));
        assert!(!s.contains(&op(0.5, 0.0, 0.9), 1e-12));
        assert!(s.contains(&op(0.2, 0.0, 0.9), 1e-12));
        let d = spindle_extremals(0.8, 0.6, 64, 0.0).unwrap();
        let gap = polygon_gap(0.8, 64);
        for k in 0..20 {
            let z = -1.0 + 0.1 * k as f64;
            let rho = (s.radius_at(z) - gap).max(0.0);
            let p = BlochOp::from_polar(rho, 0.3 * k as f64, z).unwrap();
            assert!(d.hull_contains(&p, 1e-10), "z={z}");
        }
    }

    #[test]
    fn spindle_inside_cylinder() {
        for &(r, h) in &[(0.8, 0.6), (0.11, (1.0f64 - 0.0121).sqrt()), (1.3, 0.0)] {
            let c = Cylinder::new(r).unwrap();
            for p in spindle_extremals(r, h, 24, 0.0).unwrap().points() {
                assert!(c.contains(p, 1e-12));
            }
        }
    }

    #[test]
    fn listed_points_are_extremal() {
        for d in [
            cylinder_extremals(0.5, 8, 0.0).unwrap(),
            spindle_extremals(0.8, 0.6, 8, 0.0).unwrap(),
            spindle_extremals(0.0, 0.3, 8, 0.0).unwrap(),
        ] {
            for (i, p) in d.points().iter().enumerate() {
                let others: Vec<_> = d.points().iter().enumerate().filter(|&(j, _)| j != i).map(|(_, q)| *q).collect();
                let rest = Discretization::from_points(others);
                assert!(!rest.hull_contains(p, 1e-9), "point {i} is not extremal");
            }
        }
    }

    #[test]
    fn phasing_examples() {
        let p = op(0.3, -0.2, 0.5);
        assert_eq!(phasing(&p, 1.0), p);
        assert_eq!(phasing(&op(1.0, 1.0, 0.5), 0.0), op(0.0, 0.0, 0.5));
    }

    #[test]
    fn dephasing_keeps_spaces_closed() {
        let c = Cylinder::new(0.4).unwrap();
        let s = Spindle::new(0.4, 0.7).unwrap();
        for p in spindle_extremals(0.4, 0.7, 12, 0.0).unwrap().points() {
            let q = phasing(p, 0.6);
            assert!(c.contains(&q, 1e-12) && s.contains(&q, 1e-12));
        }
    }

    #[test]
    fn symmetrize_single_point() {
        let seed = Discretization::from_points(vec![op(0.4, 0.0, 1.0)]);
        let s = symmetrize(&seed, 12).unwrap();
        assert_eq!(s.len(), 12);
        assert!(s.points().iter().all(|p| (p.radius() - 0.4).abs() < 1e-12 && p.z == 1.0));
    }

    #[test]
    fn symmetrize_fixed_point() {
        let c = cylinder_extremals(0.6, 20, 0.0).unwrap();
        let s = symmetrize(&c, 20).unwrap();
        assert_eq!(s.len(), c.len());
        for p in c.points() {
            assert!(s.points().iter().any(|q| q.dist(p) < 1e-12));
        }
    }

    #[test]
    fn symmetrize_drops_interior_orbits() {
        // the orbit at z = 0 lies inside the hull of the two outer circles
        let seed = Discretization::from_points(vec![op(0.5, 0.0, 1.0), op(0.0, 0.5, -1.0), op(0.2, 0.2, 0.0)]);
        let s = symmetrize(&seed, 10).unwrap();
        assert_eq!(s.len(), 20);
        // a spindle profile keeps its poles
        let s = symmetrize(&spindle_extremals(0.5, 0.5, 7, 0.1).unwrap(), 9).unwrap();
        assert_eq!(s.len(), 2 * 9 + 2);
    }

    #[test]
    fn symmetrized_contains_original() {
        let n = 24;
        let seed = Discretization::from_points(vec![
            op(0.5, 0.1, 1.0),
            op(-0.3, 0.2, 0.4),
            op(0.1, -0.6, -0.2),
            op(0.0, 0.0, -1.0),
        ]);
        let s = symmetrize(&seed, n).unwrap();
        for p in seed.points() {
            let shrink = (PI / n as f64).cos();
            let q = BlochOp::new(p.x * shrink, p.y * shrink, p.z).unwrap();
            assert!(s.hull_contains(&q, 1e-10));
        }
    }

    #[test]
    fn spec_json() {
        let s: StateSpaceSpec = serde_json::from_str(r#"{"kind":"spindle","r":0.8,"h":0.6}"#).unwrap();
        assert_eq!(s, StateSpaceSpec::Spindle { r: 0.8, h: 0.6, n_angles: None });
        assert_eq!(s.discretize().unwrap().len(), 82);
        let c: StateSpaceSpec = serde_json::from_str(r#"{"kind":"cylinder","r":0.1,"n_angles":8}"#).unwrap();
        assert_eq!(c.discretize().unwrap().len(), 16);
        assert!(c.contains(&op(0.1, 0.0, -1.0), 1e-12).unwrap());
    }

    proptest! {
        #[test]
        fn phasing_composes(x in -2.0..2.0f64, y in -2.0..2.0f64, z in -1.0..1.0f64, r in 0.0..3.0f64, s in 0.0..3.0f64) {
            let p = op(x, y, z);
            let a = phasing(&phasing(&p, s), r);
            let b = phasing(&p, r * s);
            prop_assert!(a.dist(&b) <= 1e-12);
        }
    }
}
