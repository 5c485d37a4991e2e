//! Primal-dual interior-point solver for small block-diagonal semidefinite programs.
//!
//! Primal: `min <C, X>` subject to `<A_i, X> = b_i`, `X ⪰ 0`.
//! Dual:   `max b·y` subject to `Z = C - Σ y_i A_i ⪰ 0`.
//!
//! `X`, `Z`, `C` and the `A_i` are block diagonal with Hermitian blocks over either
//! `f64` or `Complex64`. The search direction is HKM with a Mehrotra
//! predictor-corrector step, started from an infeasible point.

use nalgebra::{Cholesky, ComplexField, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::tensor::C64;

/// Scalars the solver accepts.
pub trait Field: ComplexField<RealField = f64> + Copy {}
impl Field for f64 {}
impl Field for C64 {}

#[derive(Clone, Debug)]
struct Entry<T> {
    block: usize,
    row: usize,
    col: usize,
    value: T,
}

/// A Hermitian block-diagonal matrix stored as its nonzero entries (both triangles).
#[derive(Clone, Debug, Default)]
pub struct SparseSym<T> {
    entries: Vec<Entry<T>>,
}

impl<T: Field> SparseSym<T> {
    pub fn new() -> Self {
        Self { entries: Vec::new() }
    }

    /// Adds `v` at `(i, j)` and `conj(v)` at `(j, i)`; on the diagonal only the real part is kept.
    pub fn add(&mut self, block: usize, i: usize, j: usize, v: T) {
        if i == j {
            self.entries.push(Entry { block, row: i, col: i, value: T::from_real(v.real()) });
        } else {
            self.entries.push(Entry { block, row: i, col: j, value: v });
            self.entries.push(Entry { block, row: j, col: i, value: v.conjugate() });
        }
    }

    /// Adds the whole Hermitian matrix `m` on `block`.
    pub fn add_dense(&mut self, block: usize, m: &DMatrix<T>) {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != T::zero() {
                    self.entries.push(Entry { block, row: i, col: j, value: v });
                }
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| Entry { value: e.value * T::from_real(factor), ..e.clone() })
            .collect();
        Self { entries }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn inner(&self, x: &[DMatrix<T>]) -> f64 {
        // <A, X> = Re Tr(A X) = Re Σ A[p,q] X[q,p]
        self.entries.iter().map(|e| (e.value * x[e.block][(e.col, e.row)]).real()).sum()
    }

    fn axpy_into(&self, alpha: f64, out: &mut [DMatrix<T>]) {
        for e in &self.entries {
            out[e.block][(e.row, e.col)] += e.value * T::from_real(alpha);
        }
    }

    fn frobenius_sq(&self) -> f64 {
        let mut blocks: std::collections::HashMap<(usize, usize, usize), T> = Default::default();
        for e in &self.entries {
            *blocks.entry((e.block, e.row, e.col)).or_insert(T::zero()) += e.value;
        }
        blocks.values().map(|v| v.modulus_squared()).sum()
    }
}

#[derive(Clone, Debug)]
pub struct SdpProblem<T> {
    pub block_sizes: Vec<usize>,
    pub c: Vec<DMatrix<T>>,
    pub constraints: Vec<SparseSym<T>>,
    pub b: Vec<f64>,
    /// Disjoint groups of constraint indices whose Schur entries vanish across
    /// groups. Constraints outside every group may couple to anything. When set,
    /// the Schur system is solved by block elimination.
    pub decoupled_groups: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
pub struct SdpSettings {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub step_fraction: f64,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 200, step_fraction: 0.95 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    /// Iteration cap or numerical breakdown before reaching the tolerance.
    Stalled,
}

#[derive(Clone, Debug)]
pub struct SdpSolution<T> {
    pub status: SdpStatus,
    pub primal_objective: f64,
    pub dual_objective: f64,
    pub x: Vec<DMatrix<T>>,
    pub y: Vec<f64>,
    pub z: Vec<DMatrix<T>>,
    pub iterations: usize,
    pub relative_gap: f64,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl<T> SdpSolution<T> {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

fn block_inner<T: Field>(a: &[DMatrix<T>], b: &[DMatrix<T>]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| p.iter().zip(q.iter()).map(|(u, v)| (u.conjugate() * *v).real()).sum::<f64>())
        .sum()
}

fn frob<T: Field>(a: &[DMatrix<T>]) -> f64 {
    a.iter().map(|m| m.iter().map(|v| v.modulus_squared()).sum::<f64>()).sum::<f64>().sqrt()
}

fn hermitize<T: Field>(m: &mut DMatrix<T>) {
    let n = m.nrows();
    for i in 0..n {
        m[(i, i)] = T::from_real(m[(i, i)].real());
        for j in (i + 1)..n {
            let avg = (m[(i, j)] + m[(j, i)].conjugate()) * T::from_real(0.5);
            m[(i, j)] = avg;
            m[(j, i)] = avg.conjugate();
        }
    }
}

/// Largest `α` with `M + α D ⪰ 0`, given a Cholesky factor of `M ≻ 0`. Any value
/// above `enough` is reported as infinite.
fn max_step<T: Field>(chol: &Cholesky<T, Dyn>, d: &DMatrix<T>) -> f64 {
    let l = chol.l();
    let n = l.nrows();
    // L^{-1} D L^{-H}
    let mut tmp = d.clone();
    if !l.solve_lower_triangular_mut(&mut tmp) {
        return 0.0;
    }
    let mut tmp = tmp.adjoint();
    if !l.solve_lower_triangular_mut(&mut tmp) {
        return 0.0;
    }
    hermitize(&mut tmp);
    if n == 0 {
        return 1.0;
    }
    let min = tmp.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if min >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min
    }
}

impl<T: Field> SdpProblem<T> {
    pub fn new(block_sizes: Vec<usize>) -> Self {
        let c = block_sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        Self { block_sizes, c, constraints: Vec::new(), b: Vec::new(), decoupled_groups: Vec::new() }
    }

    pub fn add_constraint(&mut self, a: SparseSym<T>, b: f64) -> usize {
        self.constraints.push(a);
        self.b.push(b);
        self.constraints.len() - 1
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    fn validate(&self) -> Result<()> {
        if self.c.len() != self.block_sizes.len() {
            return Err(Error::DimensionMismatch("cost blocks do not match block sizes".into()));
        }
        for (c, &n) in self.c.iter().zip(&self.block_sizes) {
            if c.nrows() != n || c.ncols() != n {
                return Err(Error::DimensionMismatch("cost block has the wrong size".into()));
            }
        }
        for a in &self.constraints {
            for e in &a.entries {
                if e.block >= self.block_sizes.len() || e.row >= self.block_sizes[e.block] || e.col >= self.block_sizes[e.block] {
                    return Err(Error::DimensionMismatch("constraint entry out of range".into()));
                }
            }
        }
        if self.b.len() != self.constraints.len() {
            return Err(Error::DimensionMismatch("right-hand side length".into()));
        }
        let mut seen = vec![false; self.constraints.len()];
        for &i in self.decoupled_groups.iter().flatten() {
            if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::DimensionMismatch("decoupled groups must be disjoint constraint indices".into()));
            }
        }
        Ok(())
    }

    /// `C - Σ y_i A_i`.
    pub fn dual_slack(&self, y: &[f64]) -> Vec<DMatrix<T>> {
        let mut z = self.c.clone();
        for (a, yi) in self.constraints.iter().zip(y) {
            a.axpy_into(-yi, &mut z);
        }
        z
    }

    pub fn solve(&self) -> Result<SdpSolution<T>> {
        self.solve_with(&SdpSettings::default())
    }

    pub fn solve_with(&self, settings: &SdpSettings) -> Result<SdpSolution<T>> {
        self.validate()?;
        Solver::new(self, *settings).run()
    }
}

struct Solver<'a, T: Field> {
    p: &'a SdpProblem<T>,
    settings: SdpSettings,
    /// For each block, the constraints touching it with their entries on that block.
    by_block: Vec<Vec<(usize, Vec<(usize, usize, T)>)>>,
    n_total: usize,
}

impl<'a, T: Field> Solver<'a, T> {
    fn new(p: &'a SdpProblem<T>, settings: SdpSettings) -> Self {
        let mut by_block: Vec<Vec<(usize, Vec<(usize, usize, T)>)>> = vec![Vec::new(); p.block_sizes.len()];
        for (i, a) in p.constraints.iter().enumerate() {
            let mut per: Vec<Vec<(usize, usize, T)>> = vec![Vec::new(); p.block_sizes.len()];
            for e in &a.entries {
                per[e.block].push((e.row, e.col, e.value));
            }
            for (k, list) in per.into_iter().enumerate() {
                if !list.is_empty() {
                    by_block[k].push((i, list));
                }
            }
        }
        let n_total = p.block_sizes.iter().sum();
        Self { p, settings, by_block, n_total }
    }

    fn residuals(&self, x: &[DMatrix<T>], y: &[f64], z: &[DMatrix<T>]) -> (DVector<f64>, Vec<DMatrix<T>>) {
        let rp = DVector::from_fn(self.p.b.len(), |i, _| self.p.b[i] - self.p.constraints[i].inner(x));
        let mut rd = self.p.dual_slack(y);
        for (r, zk) in rd.iter_mut().zip(z) {
            *r -= zk;
        }
        (rp, rd)
    }

    /// Schur complement `M_ij = Re Tr(A_i X A_j Z^{-1})`.
    fn schur_matrix(&self, x: &[DMatrix<T>], zinv: &[DMatrix<T>]) -> DMatrix<f64> {
        let m = self.p.constraints.len();
        let mut schur = DMatrix::<f64>::zeros(m, m);
        for (k, touching) in self.by_block.iter().enumerate() {
            let n = self.p.block_sizes[k];
            let xk = &x[k];
            let zk = &zinv[k];
            let total: usize = touching.iter().map(|(_, l)| l.len()).sum();
            for (j, aj) in touching {
                if aj.len() * total <= n * n * n {
                    // sparse-sparse: Σ_{(p,q,u)∈A_i} Σ_{(r,s,v)∈A_j} u v X[q,r] Zinv[s,p]
                    for (i, ai) in touching {
                        if i > j {
                            continue;
                        }
                        let mut acc = 0.0;
                        for &(pp, q, u) in ai {
                            for &(r, s, v) in aj {
                                acc += (u * v * xk[(q, r)] * zk[(s, pp)]).real();
                            }
                        }
                        schur[(*i, *j)] += acc;
                    }
                } else {
                    // dense: T = X A_j Z^{-1}
                    let mut xa = DMatrix::<T>::zeros(n, n);
                    for &(r, s, v) in aj {
                        for q in 0..n {
                            xa[(q, s)] += xk[(q, r)] * v;
                        }
                    }
                    let t = xa * zk;
                    for (i, ai) in touching {
                        if i > j {
                            continue;
                        }
                        let acc: f64 = ai.iter().map(|&(pp, q, u)| (u * t[(q, pp)]).real()).sum();
                        schur[(*i, *j)] += acc;
                    }
                }
            }
        }
        for j in 0..m {
            for i in 0..j {
                schur[(j, i)] = schur[(i, j)];
            }
        }
        schur
    }

    fn run(&self) -> Result<SdpSolution<T>> {
        let p = self.p;
        let m = p.constraints.len();
        let nb = p.block_sizes.len();
        let n_total = self.n_total.max(1) as f64;

        let norm_b = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let norm_c = frob(&p.c);
        let a_norms: Vec<f64> = p.constraints.iter().map(|a| a.frobenius_sq().sqrt()).collect();
        let max_a = a_norms.iter().cloned().fold(0.0, f64::max);
        let mut alpha0: f64 = 1.0;
        for (bi, an) in p.b.iter().zip(&a_norms) {
            alpha0 = alpha0.max((1.0 + bi.abs()) / (1.0 + an));
        }
        let alpha0 = alpha0 * n_total.sqrt();
        let beta0 = (1.0 + max_a.max(norm_c)) / n_total.sqrt();

        let mut x: Vec<DMatrix<T>> =
            p.block_sizes.iter().map(|&n| DMatrix::identity(n, n) * T::from_real(alpha0)).collect();
        let mut z: Vec<DMatrix<T>> =
            p.block_sizes.iter().map(|&n| DMatrix::identity(n, n) * T::from_real(beta0)).collect();
        let mut y = vec![0.0; m];

        let mut status = SdpStatus::Stalled;
        let mut iterations = 0;
        let (mut rel_gap, mut pinf, mut dinf) = (f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut pobj = 0.0;
        let mut dobj = 0.0;

        for iter in 0..self.settings.max_iterations {
            iterations = iter;
            let (rp, rd) = self.residuals(&x, &y, &z);
            pobj = block_inner(&p.c, &x);
            dobj = p.b.iter().zip(&y).map(|(b, y)| b * y).sum();
            let xz = block_inner(&x, &z);
            rel_gap = xz.abs() / (1.0 + pobj.abs() + dobj.abs());
            pinf = rp.norm() / (1.0 + norm_b);
            dinf = frob(&rd) / (1.0 + norm_c);
            let tol = self.settings.tolerance;
            if rel_gap < tol && pinf < tol && dinf < tol && (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()) < tol {
                status = SdpStatus::Optimal;
                break;
            }
            let mu = xz / n_total;

            let mut zinv = Vec::with_capacity(nb);
            let mut x_chol = Vec::with_capacity(nb);
            let mut z_chol = Vec::with_capacity(nb);
            let mut broken = false;
            for k in 0..nb {
                let (Some(cx), Some(cz)) = (Cholesky::new(x[k].clone()), Cholesky::new(z[k].clone())) else {
                    broken = true;
                    break;
                };
                let mut inv = cz.inverse();
                hermitize(&mut inv);
                zinv.push(inv);
                x_chol.push(cx);
                z_chol.push(cz);
            }
            if broken {
                break;
            }

            let schur = self.schur_matrix(&x, &zinv);
            let solver = if p.decoupled_groups.is_empty() {
                SchurSolver::new(schur)
            } else {
                SchurSolver::arrow(&schur, &p.decoupled_groups)
            };
            let Some(solver) = solver else { break };

            // X Rd Z^{-1} is shared by predictor and corrector
            let x_rd_zinv: Vec<DMatrix<T>> = (0..nb).map(|k| &x[k] * &rd[k] * &zinv[k]).collect();

            let direction = |rc_zinv: &[DMatrix<T>]| -> (Vec<DMatrix<T>>, Vec<f64>, Vec<DMatrix<T>>) {
                // M Δy = rp - <A_i, Rc Z^{-1} - X Rd Z^{-1}>
                let mut h: Vec<DMatrix<T>> = (0..nb).map(|k| &rc_zinv[k] - &x_rd_zinv[k]).collect();
                for hk in h.iter_mut() {
                    hermitize(hk);
                }
                let rhs = DVector::from_fn(m, |i, _| rp[i] - p.constraints[i].inner(&h));
                let dy = solver.solve(&rhs);
                let dy: Vec<f64> = dy.iter().copied().collect();
                let mut dz = rd.clone();
                for (a, d) in p.constraints.iter().zip(&dy) {
                    a.axpy_into(-d, &mut dz);
                }
                // ΔX = Rc Z^{-1} - X ΔZ Z^{-1}
                let dx: Vec<DMatrix<T>> = (0..nb)
                    .map(|k| {
                        let mut v = &rc_zinv[k] - &x[k] * &dz[k] * &zinv[k];
                        hermitize(&mut v);
                        v
                    })
                    .collect();
                (dx, dy, dz)
            };

            // predictor: Rc = -XZ, so Rc Z^{-1} = -X
            let rc_pred: Vec<DMatrix<T>> = x.iter().map(|xk| -xk.clone()).collect();
            let (dx_p, _, dz_p) = direction(&rc_pred);
            let ap = self.step(&x_chol, &dx_p);
            let ad = self.step(&z_chol, &dz_p);
            let mut trial = 0.0;
            for k in 0..nb {
                let xa = &x[k] + &dx_p[k] * T::from_real(ap);
                let za = &z[k] + &dz_p[k] * T::from_real(ad);
                trial += block_inner(std::slice::from_ref(&xa), std::slice::from_ref(&za));
            }
            let sigma = (trial / xz).clamp(0.0, 1.0).powi(3);

            // corrector: Rc = σμ I - XZ - ΔX_p ΔZ_p
            let rc_corr: Vec<DMatrix<T>> = (0..nb)
                .map(|k| {
                    let mut r = zinv[k].clone() * T::from_real(sigma * mu);
                    r -= &x[k];
                    r -= &dx_p[k] * &dz_p[k] * &zinv[k];
                    r
                })
                .collect();
            let (dx, dy, dz) = direction(&rc_corr);
            let ap = self.step(&x_chol, &dx);
            let ad = self.step(&z_chol, &dz);
            for k in 0..nb {
                x[k] += &dx[k] * T::from_real(ap);
                z[k] += &dz[k] * T::from_real(ad);
                hermitize(&mut x[k]);
                hermitize(&mut z[k]);
            }
            for (yi, d) in y.iter_mut().zip(&dy) {
                *yi += ad * d;
            }
            if ap < 1e-12 && ad < 1e-12 {
                break;
            }
            iterations = iter + 1;
        }

        Ok(SdpSolution {
            status,
            primal_objective: pobj,
            dual_objective: dobj,
            x,
            y,
            z,
            iterations,
            relative_gap: rel_gap,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
        })
    }

    fn step(&self, chols: &[Cholesky<T, Dyn>], d: &[DMatrix<T>]) -> f64 {
        let mut a = f64::INFINITY;
        for (c, dk) in chols.iter().zip(d) {
            a = a.min(max_step(c, dk));
        }
        (self.settings.step_fraction * a).min(1.0)
    }
}

/// Cholesky solve with an LU fallback for a numerically singular Schur matrix.
enum SchurSolver {
    Chol(Cholesky<f64, Dyn>),
    Lu(nalgebra::LU<f64, Dyn, Dyn>),
    Arrow(Box<Arrow>),
}

struct ArrowGroup {
    index: Vec<usize>,
    diag: SchurSolver,
    /// `M[c, g]`
    coupling: DMatrix<f64>,
    /// `M[g, g]^{-1} M[g, c]`
    w: DMatrix<f64>,
}

struct Arrow {
    groups: Vec<ArrowGroup>,
    rest: Vec<usize>,
    reduced: SchurSolver,
}

fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

impl SchurSolver {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        if m.iter().any(|v| !v.is_finite()) {
            return None;
        }
        if let Some(c) = Cholesky::new(m.clone()) {
            return Some(Self::Chol(c));
        }
        let scale = m.diagonal().iter().cloned().fold(0.0, f64::max).max(1e-300);
        let mut reg = m;
        for i in 0..reg.nrows() {
            reg[(i, i)] += 1e-13 * scale;
        }
        if let Some(c) = Cholesky::new(reg.clone()) {
            return Some(Self::Chol(c));
        }
        Some(Self::Lu(reg.lu()))
    }

    /// Block elimination for `[[D, B], [B^T, C]]` with `D` block diagonal over `groups`.
    fn arrow(m: &DMatrix<f64>, groups: &[Vec<usize>]) -> Option<Self> {
        let mut in_group = vec![false; m.nrows()];
        for &i in groups.iter().flatten() {
            in_group[i] = true;
        }
        let rest: Vec<usize> = (0..m.nrows()).filter(|&i| !in_group[i]).collect();
        let mut reduced = submatrix(m, &rest, &rest);
        let mut built = Vec::with_capacity(groups.len());
        for g in groups {
            let diag = Self::new(submatrix(m, g, g))?;
            let b = submatrix(m, g, &rest);
            let mut w = DMatrix::zeros(g.len(), rest.len());
            for j in 0..rest.len() {
                w.set_column(j, &diag.solve(&b.column(j).into_owned()));
            }
            let coupling = b.transpose();
            reduced -= &coupling * &w;
            built.push(ArrowGroup { index: g.clone(), diag, coupling, w });
        }
        let reduced = Self::new(reduced)?;
        Some(Self::Arrow(Box::new(Arrow { groups: built, rest, reduced })))
    }

    fn solve(&self, rhs: &DVector<f64>) -> DVector<f64> {
        match self {
            Self::Chol(c) => c.solve(rhs),
            Self::Lu(lu) => lu.solve(rhs).unwrap_or_else(|| DVector::zeros(rhs.len())),
            Self::Arrow(a) => {
                let mut r_rest = DVector::from_fn(a.rest.len(), |i, _| rhs[a.rest[i]]);
                let mut partial = Vec::with_capacity(a.groups.len());
                for g in &a.groups {
                    let t = g.diag.solve(&DVector::from_fn(g.index.len(), |i, _| rhs[g.index[i]]));
                    r_rest -= &g.coupling * &t;
                    partial.push(t);
                }
                let d_rest = a.reduced.solve(&r_rest);
                let mut out = DVector::zeros(rhs.len());
                for (i, &k) in a.rest.iter().enumerate() {
                    out[k] = d_rest[i];
                }
                for (g, t) in a.groups.iter().zip(partial) {
                    let d = t - &g.w * &d_rest;
                    for (i, &k) in g.index.iter().enumerate() {
                        out[k] = d[i];
                    }
                }
                out
            }
        }
    }
}
