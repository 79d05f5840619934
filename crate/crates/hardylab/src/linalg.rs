//! Sparse symmetric matrices and the direct/iterative solvers behind the
//! shift-invert eigensolver.

use crate::error::{Error, Result};
use rayon::prelude::*;

/// Symmetric sparse matrix in CSR form. Both triangles are stored.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseOperator {
    /// Builds from (row, col, value) triplets; duplicate entries are summed.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, f64)]) -> Result<SparseOperator> {
        let mut t: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &t {
            if r >= dim || c >= dim {
                return Err(Error::InvalidArgument(format!(
                    "triplet index ({r},{c}) out of range for dim {dim}"
                )));
            }
        }
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] = col_idx.len();
                last = Some((r, c));
            }
        }
        for r in 0..dim {
            row_ptr[r + 1] = row_ptr[r + 1].max(row_ptr[r]);
        }
        let mut op = SparseOperator { dim, row_ptr, col_idx, values, symmetric: false };
        op.symmetric = op.check_symmetry();
        Ok(op)
    }

    pub fn identity(dim: usize) -> SparseOperator {
        SparseOperator {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            values: vec![1.0; dim],
            symmetric: true,
        }
    }

    pub fn diagonal(diag: &[f64]) -> SparseOperator {
        SparseOperator {
            dim: diag.len(),
            row_ptr: (0..=diag.len()).collect(),
            col_idx: (0..diag.len()).collect(),
            values: diag.to_vec(),
            symmetric: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    fn check_symmetry(&self) -> bool {
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                match self.get(c, r) {
                    Some(w) if (w - v).abs() <= 1e-12 * v.abs().max(w.abs()).max(1e-300) => {}
                    _ => return false,
                }
            }
        }
        true
    }

    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        self.col_idx[lo..hi]
            .binary_search(&c)
            .ok()
            .map(|k| self.values[lo + k])
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).unwrap_or(0.0)).collect()
    }

    /// y = A x, deterministic for any thread count (fixed per-row order).
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let chunk = 4096;
        y.par_chunks_mut(chunk).enumerate().for_each(|(ci, yc)| {
            let base = ci * chunk;
            for (k, yv) in yc.iter_mut().enumerate() {
                let r = base + k;
                let mut acc = 0.0;
                for t in self.row_ptr[r]..self.row_ptr[r + 1] {
                    acc += self.values[t] * x[self.col_idx[t]];
                }
                *yv = acc;
            }
        });
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        y
    }

    /// fᵀ A f.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        let af = self.matvec(f);
        f.iter().zip(&af).map(|(a, b)| a * b).sum()
    }

    /// A + shift·I.
    pub fn shifted(&self, shift: f64) -> SparseOperator {
        let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trip.push((r, self.col_idx[k], self.values[k]));
            }
        }
        for i in 0..self.dim {
            trip.push((i, i, shift));
        }
        SparseOperator::from_triplets(self.dim, &trip).expect("valid triplets")
    }

    /// alpha·A + beta·diag(d).
    pub fn scaled_plus_diagonal(&self, alpha: f64, beta: f64, d: &[f64]) -> SparseOperator {
        assert_eq!(d.len(), self.dim);
        let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(self.nnz() + self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                trip.push((r, self.col_idx[k], alpha * self.values[k]));
            }
        }
        for i in 0..self.dim {
            trip.push((i, i, beta * d[i]));
        }
        SparseOperator::from_triplets(self.dim, &trip).expect("valid triplets")
    }

    /// Half-bandwidth max|i−j| over stored entries.
    pub fn bandwidth(&self) -> usize {
        let mut bw = 0usize;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                bw = bw.max(r.abs_diff(self.col_idx[k]));
            }
        }
        bw
    }

    /// Coordinate-format text dump (row col value per line), for debugging.
    pub fn write_coordinate(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "% {} {} {}", self.dim, self.dim, self.nnz())?;
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(w, "{} {} {}", r, self.col_idx[k], self.values[k])?;
            }
        }
        Ok(())
    }

    /// Principal submatrix on the given (strictly increasing) index set.
    pub fn principal_submatrix(&self, keep: &[usize]) -> SparseOperator {
        let mut map = vec![usize::MAX; self.dim];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut trip = Vec::new();
        for (new_r, &old_r) in keep.iter().enumerate() {
            for k in self.row_ptr[old_r]..self.row_ptr[old_r + 1] {
                let c = map[self.col_idx[k]];
                if c != usize::MAX {
                    trip.push((new_r, c, self.values[k]));
                }
            }
        }
        SparseOperator::from_triplets(keep.len(), &trip).expect("valid triplets")
    }
}

// ---- dense banded Cholesky ----

/// Lower-banded LLᵀ factorization, used for shift-invert solves when the
/// profile fits in memory.
pub struct BandedCholesky {
    n: usize,
    bw: usize,
    /// row-major band: entry (i, j) with i−bw ≤ j ≤ i at band[i*(bw+1) + j−i+bw]
    band: Vec<f64>,
}

impl BandedCholesky {
    pub fn factor(a: &SparseOperator) -> Result<BandedCholesky> {
        let n = a.dim();
        let bw = a.bandwidth();
        let w = bw + 1;
        let mut band = vec![0.0f64; n * w];
        for r in 0..n {
            for k in a.row_ptr[r]..a.row_ptr[r + 1] {
                let c = a.col_idx[k];
                if c <= r {
                    band[r * w + (c + bw - r)] = a.values[k];
                }
            }
        }
        for i in 0..n {
            let j_lo = i.saturating_sub(bw);
            for j in j_lo..=i {
                let k_lo = j_lo.max(j.saturating_sub(bw));
                let mut sum = band[i * w + (j + bw - i)];
                // dot of band rows i and j over columns [k_lo, j)
                let oi = i * w + bw - i;
                let oj = j * w + bw - j;
                for k in k_lo..j {
                    sum -= band[oi + k] * band[oj + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::Convergence {
                            msg: format!("banded Cholesky breakdown at pivot {i}"),
                            residuals: vec![sum],
                        });
                    }
                    band[i * w + bw] = sum.sqrt();
                } else {
                    band[i * w + (j + bw - i)] = sum / band[j * w + bw];
                }
            }
        }
        Ok(BandedCholesky { n, bw, band })
    }

    pub fn solve_into(&self, b: &[f64], x: &mut Vec<f64>) {
        let (n, bw, w) = (self.n, self.bw, self.bw + 1);
        x.clear();
        x.extend_from_slice(b);
        // forward: L y = b
        for i in 0..n {
            let j_lo = i.saturating_sub(bw);
            let oi = i * w + bw - i;
            let mut sum = x[i];
            for j in j_lo..i {
                sum -= self.band[oi + j] * x[j];
            }
            x[i] = sum / self.band[i * w + bw];
        }
        // backward: Lᵀ x = y
        for i in (0..n).rev() {
            let xi = x[i] / self.band[i * w + bw];
            x[i] = xi;
            let j_lo = i.saturating_sub(bw);
            let oi = i * w + bw - i;
            for j in j_lo..i {
                x[j] -= self.band[oi + j] * xi;
            }
        }
    }
}

// ---- incomplete Cholesky + conjugate gradients ----

/// Zero-fill incomplete Cholesky preconditioner on the lower triangle.
pub struct IncompleteCholesky {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>, // strictly-lower entries per row, ascending
    values: Vec<f64>,
    diag: Vec<f64>,
}

impl IncompleteCholesky {
    pub fn factor(a: &SparseOperator) -> Result<IncompleteCholesky> {
        // Manteuffel diagonal shift loop for robustness on non-M-matrices
        let base: f64 = 0.0;
        let mut shift = base;
        for attempt in 0..8 {
            match Self::try_factor(a, shift) {
                Ok(ic) => return Ok(ic),
                Err(_) => {
                    let dmax = a.diag().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
                    shift = if attempt == 0 { 1e-3 * dmax } else { shift * 4.0 };
                }
            }
        }
        Err(Error::Convergence {
            msg: "incomplete Cholesky failed even with diagonal shifts".into(),
            residuals: vec![],
        })
    }

    fn try_factor(a: &SparseOperator, shift: f64) -> Result<IncompleteCholesky> {
        let n = a.dim();
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx: Vec<usize> = Vec::new();
        let mut values: Vec<f64> = Vec::new();
        let mut diag = vec![0.0f64; n];
        for r in 0..n {
            let lo = a.row_ptr[r];
            let hi = a.row_ptr[r + 1];
            let mut d = shift;
            let row_start = col_idx.len();
            for k in lo..hi {
                let c = a.col_idx[k];
                if c < r {
                    // L[r,c] = (A[r,c] − Σ_k L[r,k] L[c,k]) / L[c,c]
                    let mut sum = a.values[k];
                    let (mut p, mut q) = (row_start, row_ptr[c]);
                    let p_end = col_idx.len();
                    let q_end = row_ptr[c + 1];
                    while p < p_end && q < q_end {
                        match col_idx[p].cmp(&col_idx[q]) {
                            std::cmp::Ordering::Less => p += 1,
                            std::cmp::Ordering::Greater => q += 1,
                            std::cmp::Ordering::Equal => {
                                sum -= values[p] * values[q];
                                p += 1;
                                q += 1;
                            }
                        }
                    }
                    let v = sum / diag[c];
                    col_idx.push(c);
                    values.push(v);
                } else if c == r {
                    d += a.values[k];
                }
            }
            for k in row_start..col_idx.len() {
                d -= values[k] * values[k];
            }
            if d <= 0.0 {
                return Err(Error::Convergence {
                    msg: format!("IC(0) breakdown at row {r}"),
                    residuals: vec![d],
                });
            }
            diag[r] = d.sqrt();
            row_ptr[r + 1] = col_idx.len();
        }
        Ok(IncompleteCholesky { n, row_ptr, col_idx, values, diag })
    }

    /// z = (L Lᵀ)⁻¹ r.
    pub fn apply(&self, r: &[f64], z: &mut Vec<f64>) {
        z.clear();
        z.extend_from_slice(r);
        for i in 0..self.n {
            let mut sum = z[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                sum -= self.values[k] * z[self.col_idx[k]];
            }
            z[i] = sum / self.diag[i];
        }
        for i in (0..self.n).rev() {
            let zi = z[i] / self.diag[i];
            z[i] = zi;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                z[self.col_idx[k]] -= self.values[k] * zi;
            }
        }
    }
}

/// Direct or iterative SPD solver, chosen by the banded-profile memory cost.
pub enum SpdSolver {
    Banded(BandedCholesky),
    Pcg {
        a: SparseOperator,
        ic: IncompleteCholesky,
        tol: f64,
        max_iter: usize,
    },
}

/// Band profiles above this many stored entries fall back to PCG.
pub const BAND_BUDGET: usize = 150_000_000;

impl SpdSolver {
    pub fn factor(a: &SparseOperator) -> Result<SpdSolver> {
        if !a.is_symmetric() {
            return Err(Error::InvalidArgument("operator is not symmetric".into()));
        }
        let profile = a.dim().saturating_mul(a.bandwidth() + 1);
        if profile <= BAND_BUDGET {
            Ok(SpdSolver::Banded(BandedCholesky::factor(a)?))
        } else {
            let ic = IncompleteCholesky::factor(a)?;
            Ok(SpdSolver::Pcg { a: a.clone(), ic, tol: 1e-12, max_iter: 100_000 })
        }
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        match self {
            SpdSolver::Banded(ch) => {
                let mut x = Vec::new();
                ch.solve_into(b, &mut x);
                Ok(x)
            }
            SpdSolver::Pcg { a, ic, tol, max_iter } => pcg(a, ic, b, *tol, *max_iter),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn pcg(
    a: &SparseOperator,
    ic: &IncompleteCholesky,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>> {
    let n = b.len();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z = Vec::new();
    ic.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..max_iter {
        a.matvec_into(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= tol * bnorm {
            return Ok(x);
        }
        ic.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::Convergence {
        msg: "PCG did not reach tolerance".into(),
        residuals: vec![dot(&r, &r).sqrt() / bnorm],
    })
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL with
/// Wilkinson shifts; returns ascending eigenvalues and the rotation matrix
/// columns as eigenvectors.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = diag.len();
    assert!(n > 0 && off.len() + 1 == n);
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    // z[i][j]: i-th component of j-th eigenvector
    let mut z = vec![vec![0.0f64; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                break; // extremely defective input; keep best effort
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    // sort ascending
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&j| (0..n).map(|i| z[i][j]).collect())
        .collect();
    (vals, vecs)
}
