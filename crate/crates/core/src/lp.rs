//! Dense phase-one simplex for equality-form feasibility problems.
//!
//! Solves `min ‖A x − b‖₁ subject to x ≥ 0` by writing `A x + s⁺ − s⁻ = b`
//! with nonnegative slacks and minimizing `Σ s⁺ + s⁻`. The problem is feasible
//! exactly when the optimum is zero; the optimum itself measures how far from
//! feasible it is, which the radius bisections use directly.
//!
//! Sized for the decomposition problems here: a few dozen rows and up to ~10⁴
//! columns. Revised simplex with an explicit dense basis inverse, Dantzig
//! pricing, and Bland's rule after a run of degenerate pivots.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy)]
pub struct LpTolerances<T> {
    /// Smallest acceptable pivot element in the ratio test.
    pub pivot: T,
    /// Reduced costs above `-optimality` count as nonnegative.
    pub optimality: T,
}

impl<T: Real> Default for LpTolerances<T> {
    fn default() -> Self {
        let eps = T::epsilon();
        Self { pivot: eps.powf(T::lit(0.6)), optimality: eps.powf(T::lit(0.7)) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Optimal `‖A x − b‖₁`.
    pub residual_l1: T,
    /// Strictly positive structural variables as `(column, value)`, ascending by column.
    pub support: Vec<(usize, T)>,
    pub iterations: usize,
}

/// Column-major constraint matrix with `rows` rows.
#[derive(Debug, Clone)]
pub struct FeasibilityLp<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
    rhs: Vec<T>,
}

impl<T: Real> FeasibilityLp<T> {
    pub fn new(rhs: Vec<T>) -> Self {
        Self { rows: rhs.len(), cols: 0, data: Vec::new(), rhs }
    }

    pub fn with_capacity(rhs: Vec<T>, cols: usize) -> Self {
        let rows = rhs.len();
        Self { rows, cols: 0, data: Vec::with_capacity(rows * cols), rhs }
    }

    pub fn push_column(&mut self, col: &[T]) {
        assert_eq!(col.len(), self.rows, "column length must equal row count");
        self.data.extend_from_slice(col);
        self.cols += 1;
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    /// Replace the right-hand side, keeping the columns.
    pub fn set_rhs(&mut self, rhs: Vec<T>) {
        assert_eq!(rhs.len(), self.rows, "rhs length must equal row count");
        self.rhs = rhs;
    }

    pub fn solve(&self) -> LpSolution<T> {
        self.solve_with(LpTolerances::default(), 50_000)
    }

    pub fn solve_with(&self, tol: LpTolerances<T>, max_iter: usize) -> LpSolution<T> {
        Simplex::new(self, tol).run(max_iter)
    }
}

/// Variable indexing: `0..n` structural, `n..n+m` are `s⁺_i`, `n+m..n+2m` are `s⁻_i`.
struct Simplex<'a, T> {
    lp: &'a FeasibilityLp<T>,
    tol: LpTolerances<T>,
    m: usize,
    n: usize,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    binv: Vec<T>, // row-major m×m
    xb: Vec<T>,
}

const DEGENERATE_RUN_BEFORE_BLAND: usize = 40;
const REFACTOR_EVERY: usize = 64;

impl<'a, T: Real> Simplex<'a, T> {
    fn new(lp: &'a FeasibilityLp<T>, tol: LpTolerances<T>) -> Self {
        let m = lp.rows;
        let n = lp.cols;
        let mut basis = Vec::with_capacity(m);
        let mut is_basic = vec![false; n + 2 * m];
        let mut binv = vec![T::zero(); m * m];
        let mut xb = vec![T::zero(); m];
        for i in 0..m {
            let b = lp.rhs[i];
            let var = if b >= T::zero() { n + i } else { n + m + i };
            basis.push(var);
            is_basic[var] = true;
            binv[i * m + i] = if b >= T::zero() { T::one() } else { -T::one() };
            xb[i] = b.abs();
        }
        Self { lp, tol, m, n, basis, is_basic, binv, xb }
    }

    fn cost(&self, var: usize) -> T {
        if var < self.n {
            T::zero()
        } else {
            T::one()
        }
    }

    /// Writes column `var` of `[A | I | −I]` into `out`.
    fn column_into(&self, var: usize, out: &mut [T]) {
        if var < self.n {
            out.copy_from_slice(self.lp.column(var));
        } else {
            out.iter_mut().for_each(|v| *v = T::zero());
            if var < self.n + self.m {
                out[var - self.n] = T::one();
            } else {
                out[var - self.n - self.m] = -T::one();
            }
        }
    }

    fn objective(&self) -> T {
        self.basis.iter().zip(&self.xb).map(|(&v, &x)| self.cost(v) * x).sum()
    }

    /// Rebuilds the basis inverse and basic values from scratch (Gauss-Jordan, partial pivoting).
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut a = vec![T::zero(); m * m];
        let mut col = vec![T::zero(); m];
        for (k, &var) in self.basis.iter().enumerate() {
            self.column_into(var, &mut col);
            for i in 0..m {
                a[i * m + k] = col[i];
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for i in 0..m {
            inv[i * m + i] = T::one();
        }
        for c in 0..m {
            let p = (c..m)
                .max_by(|&i, &j| a[i * m + c].abs().partial_cmp(&a[j * m + c].abs()).unwrap())
                .unwrap();
            if a[p * m + c].abs() <= T::epsilon() {
                return false;
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for i in 0..m {
                if i == c {
                    continue;
                }
                let f = a[i * m + c];
                if f == T::zero() {
                    continue;
                }
                for k in 0..m {
                    let (ak, ik) = (a[c * m + k], inv[c * m + k]);
                    a[i * m + k] -= f * ak;
                    inv[i * m + k] -= f * ik;
                }
            }
        }
        self.binv = inv;
        for i in 0..m {
            let v: T = (0..m).map(|k| self.binv[i * m + k] * self.lp.rhs[k]).sum();
            self.xb[i] = v.max(T::zero());
        }
        true
    }

    fn run(mut self, max_iter: usize) -> LpSolution<T> {
        let (m, n) = (self.m, self.n);
        let total = n + 2 * m;
        let mut y = vec![T::zero(); m];
        let mut u = vec![T::zero(); m];
        let mut col = vec![T::zero(); m];
        let mut degenerate_run = 0usize;
        let mut status = LpStatus::IterationLimit;
        let mut iter = 0;
        while iter < max_iter {
            if iter > 0 && iter % REFACTOR_EVERY == 0 {
                self.refactor();
            }
            if self.objective() <= T::zero() {
                status = LpStatus::Optimal;
                break;
            }
            // duals y = c_B B^{-1}
            for (k, yk) in y.iter_mut().enumerate() {
                *yk = (0..m).map(|i| self.cost(self.basis[i]) * self.binv[i * m + k]).sum();
            }
            let bland = degenerate_run >= DEGENERATE_RUN_BEFORE_BLAND;
            let mut entering = None;
            let mut best = -self.tol.optimality;
            for var in 0..total {
                if self.is_basic[var] {
                    continue;
                }
                let d = if var < n {
                    -self.lp.column(var).iter().zip(&y).map(|(&a, &yk)| a * yk).sum::<T>()
                } else if var < n + m {
                    T::one() - y[var - n]
                } else {
                    T::one() + y[var - n - m]
                };
                if d < best {
                    entering = Some(var);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                status = LpStatus::Optimal;
                break;
            };
            self.column_into(q, &mut col);
            for i in 0..m {
                u[i] = (0..m).map(|k| self.binv[i * m + k] * col[k]).sum();
            }
            // ratio test; ties broken by smallest basic variable index (Bland)
            let mut leave: Option<usize> = None;
            let mut best_ratio = T::infinity();
            for i in 0..m {
                if u[i] > self.tol.pivot {
                    let r = self.xb[i] / u[i];
                    let better = match leave {
                        None => true,
                        Some(l) => r < best_ratio || (r == best_ratio && self.basis[i] < self.basis[l]),
                    };
                    if better {
                        best_ratio = r;
                        leave = Some(i);
                    }
                }
            }
            let Some(p) = leave else {
                // Unbounded direction cannot occur for a bounded-below objective; treat as optimal.
                status = LpStatus::Optimal;
                break;
            };
            if best_ratio <= T::zero() {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            let theta = best_ratio;
            for i in 0..m {
                if i != p {
                    self.xb[i] = (self.xb[i] - theta * u[i]).max(T::zero());
                }
            }
            self.xb[p] = theta;
            let pivot = u[p];
            for k in 0..m {
                self.binv[p * m + k] /= pivot;
            }
            for i in 0..m {
                if i == p || u[i] == T::zero() {
                    continue;
                }
                let f = u[i];
                for k in 0..m {
                    let v = self.binv[p * m + k];
                    self.binv[i * m + k] -= f * v;
                }
            }
            self.is_basic[self.basis[p]] = false;
            self.is_basic[q] = true;
            self.basis[p] = q;
            iter += 1;
        }
        self.refactor();
        let mut support: Vec<(usize, T)> = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|&(&v, &x)| v < n && x > T::zero())
            .map(|(&v, &x)| (v, x))
            .collect();
        support.sort_by_key(|&(v, _)| v);
        let residual_l1 = self.true_residual(&support);
        LpSolution { status, residual_l1, support, iterations: iter }
    }

    /// `‖A x − b‖₁` recomputed from the primal values, independent of the slack bookkeeping.
    fn true_residual(&self, support: &[(usize, T)]) -> T {
        let mut r: Vec<T> = self.lp.rhs.iter().map(|&b| -b).collect();
        for &(j, x) in support {
            for (ri, &a) in r.iter_mut().zip(self.lp.column(j)) {
                *ri += a * x;
            }
        }
        r.iter().map(|v| v.abs()).sum()
    }
}
