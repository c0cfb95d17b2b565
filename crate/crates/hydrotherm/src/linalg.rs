//! Sparse storage and the two iterative solvers used per time step:
//! Jacobi-preconditioned CG for the symmetric pressure system and BiCGSTAB
//! for the advective temperature system.
//!
//! Every kernel here is deterministic by construction: reductions are summed
//! over fixed-size index blocks in block order and each matrix row is
//! accumulated sequentially, so results are bitwise identical for any worker
//! count. Parallelism only changes wall time.

use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Reduction/update block size. Fixed so that the summation tree does not
/// depend on how many threads execute the blocks.
const BLOCK: usize = 4096;
/// Rows per SpMV work unit.
const ROW_BLOCK: usize = 256;

/// Compressed sparse row matrix. Column indices are sorted within each row.
/// The structure arrays are shared so that per-step reassembly only touches
/// values.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Arc<Vec<usize>>,
    col_indices: Arc<Vec<u32>>,
    values: Vec<f64>,
    symmetric: bool,
}

impl CsrMatrix {
    /// Build from (row, col, value) triplets; duplicates are summed in input
    /// order.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
        symmetric: bool,
    ) -> Result<Self> {
        for &(r, c, _) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::config(format!(
                    "triplet ({r}, {c}) outside {n_rows}x{n_cols} matrix"
                )));
            }
        }
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_rows];
        for &(r, c, v) in triplets {
            per_row[r].push((c, v));
        }
        let mut row_offsets = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for row in &mut per_row {
            row.sort_by_key(|&(c, _)| c);
            let mut last: Option<usize> = None;
            for &(c, v) in row.iter() {
                if last == Some(c) {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_indices.push(c as u32);
                    values.push(v);
                    last = Some(c);
                }
            }
            row_offsets.push(col_indices.len());
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_offsets: Arc::new(row_offsets),
            col_indices: Arc::new(col_indices),
            values,
            symmetric,
        })
    }

    /// A zero-valued matrix over a prebuilt sparsity pattern.
    pub fn zeros_from_pattern(
        n_rows: usize,
        n_cols: usize,
        row_offsets: Arc<Vec<usize>>,
        col_indices: Arc<Vec<u32>>,
        symmetric: bool,
    ) -> Self {
        let nnz = col_indices.len();
        debug_assert_eq!(row_offsets.len(), n_rows + 1);
        CsrMatrix {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values: vec![0.0; nnz],
            symmetric,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn set_symmetric(&mut self, symmetric: bool) {
        self.symmetric = symmetric;
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value index of entry (row, col), if present in the pattern.
    pub fn find_entry(&self, row: usize, col: usize) -> Option<usize> {
        let lo = self.row_offsets[row];
        let hi = self.row_offsets[row + 1];
        self.col_indices[lo..hi]
            .binary_search(&(col as u32))
            .ok()
            .map(|p| lo + p)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.find_entry(row, col).map_or(0.0, |i| self.values[i])
    }

    /// y = A·x. Parallel over row blocks; each row's dot product is computed
    /// sequentially, so the result does not depend on the worker count.
    pub fn spmv(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols, "spmv dimension mismatch");
        assert_eq!(y.len(), self.n_rows, "spmv dimension mismatch");
        let offsets = self.row_offsets.as_slice();
        let cols = self.col_indices.as_slice();
        let vals = self.values.as_slice();
        let row_range = |row: usize| {
            let mut acc = 0.0;
            for k in offsets[row]..offsets[row + 1] {
                acc += vals[k] * x[cols[k] as usize];
            }
            acc
        };
        if self.n_rows <= ROW_BLOCK {
            for (row, yi) in y.iter_mut().enumerate() {
                *yi = row_range(row);
            }
        } else {
            y.par_chunks_mut(ROW_BLOCK).enumerate().for_each(|(b, yb)| {
                let base = b * ROW_BLOCK;
                for (i, yi) in yb.iter_mut().enumerate() {
                    *yi = row_range(base + i);
                }
            });
        }
    }

    /// Dump in Matrix Market coordinate format (1-based indices).
    pub fn write_matrix_market(&self, path: &std::path::Path) -> Result<()> {
        let ioerr = |e| Error::io(path.display().to_string(), e);
        let file = std::fs::File::create(path).map_err(ioerr)?;
        let mut w = std::io::BufWriter::new(file);
        let kind = if self.symmetric { "symmetric" } else { "general" };
        let mut run = || -> std::io::Result<()> {
            writeln!(w, "%%MatrixMarket matrix coordinate real {kind}")?;
            let mut nnz = 0usize;
            for row in 0..self.n_rows {
                for k in self.row_offsets[row]..self.row_offsets[row + 1] {
                    let col = self.col_indices[k] as usize;
                    if self.symmetric && col > row {
                        continue; // lower triangle only
                    }
                    nnz += 1;
                }
            }
            writeln!(w, "{} {} {}", self.n_rows, self.n_cols, nnz)?;
            for row in 0..self.n_rows {
                for k in self.row_offsets[row]..self.row_offsets[row + 1] {
                    let col = self.col_indices[k] as usize;
                    if self.symmetric && col > row {
                        continue;
                    }
                    writeln!(w, "{} {} {:.16e}", row + 1, col + 1, self.values[k])?;
                }
            }
            w.flush()
        };
        run().map_err(ioerr)
    }
}

/// Deterministic dot product: fixed-size block partial sums folded in block
/// order.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let block_sum =
        |ca: &[f64], cb: &[f64]| ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>();
    if a.len() <= BLOCK {
        block_sum(a, b)
    } else {
        let partials: Vec<f64> = a
            .par_chunks(BLOCK)
            .zip(b.par_chunks(BLOCK))
            .map(|(ca, cb)| block_sum(ca, cb))
            .collect();
        partials.iter().sum()
    }
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// y += alpha·x, elementwise.
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    assert_eq!(x.len(), y.len());
    if y.len() <= BLOCK {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    } else {
        y.par_chunks_mut(BLOCK)
            .zip(x.par_chunks(BLOCK))
            .for_each(|(yb, xb)| {
                for (yi, xi) in yb.iter_mut().zip(xb) {
                    *yi += alpha * xi;
                }
            });
    }
}

/// y[i] = f(y[i], a[i]), elementwise.
fn zip2_apply(y: &mut [f64], a: &[f64], f: impl Fn(f64, f64) -> f64 + Sync) {
    assert_eq!(y.len(), a.len());
    if y.len() <= BLOCK {
        for (yi, ai) in y.iter_mut().zip(a) {
            *yi = f(*yi, *ai);
        }
    } else {
        y.par_chunks_mut(BLOCK)
            .zip(a.par_chunks(BLOCK))
            .for_each(|(yb, ab)| {
                for (yi, ai) in yb.iter_mut().zip(ab) {
                    *yi = f(*yi, *ai);
                }
            });
    }
}

/// y[i] = f(y[i], a[i], b[i]), elementwise.
fn zip3_apply(y: &mut [f64], a: &[f64], b: &[f64], f: impl Fn(f64, f64, f64) -> f64 + Sync) {
    assert_eq!(y.len(), a.len());
    assert_eq!(y.len(), b.len());
    if y.len() <= BLOCK {
        for i in 0..y.len() {
            y[i] = f(y[i], a[i], b[i]);
        }
    } else {
        y.par_chunks_mut(BLOCK)
            .zip(a.par_chunks(BLOCK).zip(b.par_chunks(BLOCK)))
            .for_each(|(yb, (ab, bb))| {
                for i in 0..yb.len() {
                    yb[i] = f(yb[i], ab[i], bb[i]);
                }
            });
    }
}

/// Diagonal (Jacobi) preconditioner, stored as the inverse diagonal.
#[derive(Debug, Clone)]
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(a: &CsrMatrix) -> Result<Self> {
        let mut inv_diag = vec![0.0; a.n_rows()];
        for (row, slot) in inv_diag.iter_mut().enumerate() {
            let d = a.get(row, row);
            if d == 0.0 {
                return Err(Error::config(format!(
                    "jacobi preconditioner: zero diagonal at dof {row}"
                )));
            }
            *slot = 1.0 / d;
        }
        Ok(JacobiPreconditioner { inv_diag })
    }

    /// Identity scaling, for running a solver unpreconditioned.
    pub fn identity(n: usize) -> Self {
        JacobiPreconditioner {
            inv_diag: vec![1.0; n],
        }
    }

    pub fn apply(&self, r: &[f64], z: &mut [f64]) {
        let d = &self.inv_diag;
        assert_eq!(r.len(), d.len());
        if r.len() <= BLOCK {
            for i in 0..r.len() {
                z[i] = d[i] * r[i];
            }
        } else {
            z.par_chunks_mut(BLOCK)
                .zip(r.par_chunks(BLOCK).zip(d.par_chunks(BLOCK)))
                .for_each(|(zb, (rb, db))| {
                    for (zi, (ri, di)) in zb.iter_mut().zip(rb.iter().zip(db)) {
                        *zi = di * ri;
                    }
                });
        }
    }

    pub fn inv_diag(&self) -> &[f64] {
        &self.inv_diag
    }
}

/// Outcome of an iterative solve.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SolverReport {
    pub iterations: usize,
    /// True relative residual ‖b − A·x‖/‖b‖ at exit.
    pub residual: f64,
    pub converged: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Relative residual target.
    pub tol: f64,
    pub max_iterations: usize,
    pub preconditioned: bool,
}

impl SolverOptions {
    pub fn new(tol: f64, max_iterations: usize) -> Self {
        SolverOptions {
            tol,
            max_iterations,
            preconditioned: true,
        }
    }
}

fn finish(a: &CsrMatrix, b: &[f64], x: &[f64], iterations: usize, t0: Instant, tol: f64) -> SolverReport {
    let bnorm = norm2(b);
    let mut r = vec![0.0; b.len()];
    a.spmv(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let residual = if bnorm > 0.0 { norm2(&r) / bnorm } else { norm2(&r) };
    SolverReport {
        iterations,
        residual,
        converged: residual <= tol,
        wall_time_s: t0.elapsed().as_secs_f64(),
    }
}

/// Preconditioned conjugate gradients for symmetric positive definite
/// systems. `x` holds the initial guess on entry and the solution on exit.
pub fn cg(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: &SolverOptions) -> SolverReport {
    let t0 = Instant::now();
    let n = b.len();
    assert_eq!(a.n_rows(), n);
    assert_eq!(x.len(), n);
    let precond = if opts.preconditioned {
        JacobiPreconditioner::new(a).expect("cg requires a nonzero diagonal")
    } else {
        JacobiPreconditioner::identity(n)
    };

    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return finish(a, b, x, 0, t0, opts.tol);
    }

    let mut r = vec![0.0; n];
    a.spmv(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    let mut rnorm = norm2(&r);
    if rnorm / bnorm <= opts.tol {
        return finish(a, b, x, 0, t0, opts.tol);
    }

    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);

    for it in 1..=opts.max_iterations {
        a.spmv(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            // Not SPD (or numerically broke down); report honestly.
            return finish(a, b, x, it - 1, t0, opts.tol);
        }
        let alpha = rz / pap;
        axpy(alpha, &p, x);
        axpy(-alpha, &ap, &mut r);
        let rnorm_new = norm2(&r);
        if rnorm_new / bnorm <= opts.tol {
            return finish(a, b, x, it, t0, opts.tol);
        }
        // Divergence guard: the preconditioned residual should not grow.
        if rnorm_new > 10.0 * rnorm || !rnorm_new.is_finite() {
            return finish(a, b, x, it, t0, opts.tol);
        }
        rnorm = rnorm_new;
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        zip2_apply(&mut p, &z, |pi, zi| zi + beta * pi);
        rz = rz_new;
    }
    finish(a, b, x, opts.max_iterations, t0, opts.tol)
}

/// Preconditioned BiCGSTAB for nonsymmetric systems. `x` holds the initial
/// guess on entry and the solution on exit.
pub fn bicgstab(a: &CsrMatrix, b: &[f64], x: &mut [f64], opts: &SolverOptions) -> SolverReport {
    let t0 = Instant::now();
    let n = b.len();
    assert_eq!(a.n_rows(), n);
    assert_eq!(x.len(), n);
    let precond = if opts.preconditioned {
        match JacobiPreconditioner::new(a) {
            Ok(p) => p,
            Err(_) => JacobiPreconditioner::identity(n),
        }
    } else {
        JacobiPreconditioner::identity(n)
    };

    let bnorm = norm2(b);
    if bnorm == 0.0 {
        x.fill(0.0);
        return finish(a, b, x, 0, t0, opts.tol);
    }

    let mut r = vec![0.0; n];
    a.spmv(x, &mut r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    if norm2(&r) / bnorm <= opts.tol {
        return finish(a, b, x, 0, t0, opts.tol);
    }
    let r_shadow = r.clone();
    let mut rho = 1.0;
    let mut alpha = 1.0;
    let mut omega = 1.0;
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut phat = vec![0.0; n];
    let mut s = vec![0.0; n];
    let mut shat = vec![0.0; n];
    let mut t = vec![0.0; n];

    for it in 1..=opts.max_iterations {
        let rho_new = dot(&r_shadow, &r);
        if rho_new.abs() < f64::MIN_POSITIVE * 1e10 {
            return finish(a, b, x, it - 1, t0, opts.tol);
        }
        let beta = (rho_new / rho) * (alpha / omega);
        zip3_apply(&mut p, &r, &v, |pi, ri, vi| ri + beta * (pi - omega * vi));
        precond.apply(&p, &mut phat);
        a.spmv(&phat, &mut v);
        let denom = dot(&r_shadow, &v);
        if denom == 0.0 || !denom.is_finite() {
            return finish(a, b, x, it, t0, opts.tol);
        }
        alpha = rho_new / denom;
        zip3_apply(&mut s, &r, &v, |_, ri, vi| ri - alpha * vi);
        if norm2(&s) / bnorm <= opts.tol {
            axpy(alpha, &phat, x);
            return finish(a, b, x, it, t0, opts.tol);
        }
        precond.apply(&s, &mut shat);
        a.spmv(&shat, &mut t);
        let tt = dot(&t, &t);
        if tt == 0.0 {
            axpy(alpha, &phat, x);
            return finish(a, b, x, it, t0, opts.tol);
        }
        omega = dot(&t, &s) / tt;
        zip3_apply(x, &phat, &shat, |xi, pi, si| xi + alpha * pi + omega * si);
        zip3_apply(&mut r, &s, &t, |_, si, ti| si - omega * ti);
        if norm2(&r) / bnorm <= opts.tol {
            return finish(a, b, x, it, t0, opts.tol);
        }
        if omega == 0.0 || !omega.is_finite() {
            return finish(a, b, x, it, t0, opts.tol);
        }
        rho = rho_new;
    }
    finish(a, b, x, opts.max_iterations, t0, opts.tol)
}
