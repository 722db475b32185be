//! Dense complex linear-algebra helpers on top of nalgebra.
//!
//! Large complex products are routed through real GEMMs (four real products
//! per complex product), which is an order of magnitude faster than the
//! generic complex kernel for the N ≈ 10³ matrices used in the sweeps.

use nalgebra::DMatrix;

use crate::{CMatrix, Complex64};

/// Squared Frobenius norm.
pub fn frobenius_sq(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

fn split(m: &CMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

fn join(re: DMatrix<f64>, im: DMatrix<f64>) -> CMatrix {
    re.zip_map(&im, Complex64::new)
}

/// `a * b` computed with real GEMMs.
pub fn matmul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    assert_eq!(a.ncols(), b.nrows(), "matmul dimension mismatch");
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    let re = &ar * &br - &ai * &bi;
    let im = &ar * &bi + &ai * &br;
    join(re, im)
}

/// `a * aᴴ` computed with real GEMMs.
pub fn gram_rows(a: &CMatrix) -> CMatrix {
    let (ar, ai) = split(a);
    let art = ar.transpose();
    let ait = ai.transpose();
    let re = &ar * &art + &ai * &ait;
    let im = &ai * &art - &ar * &ait;
    join(re, im)
}

/// Numerical rank of a Hermitian positive semi-definite matrix via
/// diagonally pivoted Cholesky. Pivots below `rel_tol · max_diag` stop the
/// factorization.
pub fn psd_rank(gram: &CMatrix, rel_tol: f64) -> usize {
    let n = gram.nrows();
    assert_eq!(n, gram.ncols(), "psd_rank needs a square matrix");
    if n == 0 {
        return 0;
    }
    let mut diag: Vec<f64> = (0..n).map(|i| gram[(i, i)].re).collect();
    let max_diag = diag.iter().cloned().fold(0.0, f64::max);
    if max_diag <= 0.0 {
        return 0;
    }
    let tol = rel_tol * max_diag;
    let mut perm: Vec<usize> = (0..n).collect();
    // rows[i] is row i of the (permuted) Cholesky factor.
    let mut rows: Vec<Vec<Complex64>> = vec![Vec::with_capacity(n); n];
    for k in 0..n {
        let (piv, pval) = diag[k..]
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .map(|(i, &v)| (i + k, v))
            .unwrap();
        if pval <= tol {
            return k;
        }
        diag.swap(k, piv);
        perm.swap(k, piv);
        rows.swap(k, piv);
        let lkk = pval.sqrt();
        let pk = perm[k];
        let (head, tail) = rows.split_at_mut(k + 1);
        let row_k = &mut head[k];
        for (off, row_i) in tail.iter_mut().enumerate() {
            let i = k + 1 + off;
            let mut s = gram[(perm[i], pk)];
            for (a, b) in row_i.iter().zip(row_k.iter()) {
                s -= a * b.conj();
            }
            let v = s / lkk;
            row_i.push(v);
            diag[i] -= v.norm_sqr();
        }
        row_k.push(Complex64::new(lkk, 0.0));
    }
    n
}

/// Numerical row rank of `x` (rank of `x xᴴ`).
pub fn row_rank(x: &CMatrix) -> usize {
    if x.nrows() <= x.ncols() {
        psd_rank(&gram_rows(x), 1e-10)
    } else {
        psd_rank(&gram_rows(&x.adjoint()), 1e-10)
    }
}

/// Orthonormal basis for the span of the given columns (modified
/// Gram–Schmidt with one re-orthogonalization pass). Columns whose residual
/// falls below `rel_tol` of their original norm are dropped.
pub fn orthonormal_columns(cols: &[nalgebra::DVector<Complex64>], rel_tol: f64) -> CMatrix {
    let n = cols.first().map_or(0, |c| c.len());
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for c in cols {
        let norm0 = c.norm();
        if norm0 == 0.0 {
            continue;
        }
        let mut v = c.clone();
        for _ in 0..2 {
            for q in &basis {
                let proj = q.dotc(&v);
                v.axpy(-proj, q, Complex64::new(1.0, 0.0));
            }
        }
        let norm = v.norm();
        if norm > rel_tol * norm0 {
            basis.push(v / Complex64::new(norm, 0.0));
        }
    }
    let mut out = CMatrix::zeros(n, basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// Orthonormal basis (as columns, `L × r`) of the row space of `x`.
pub fn row_space_basis(x: &CMatrix, rel_tol: f64) -> CMatrix {
    let svd = x.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^H");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| smax > 0.0 && s > rel_tol * smax)
        .map(|(i, _)| i)
        .collect();
    let mut basis = CMatrix::zeros(x.ncols(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        let row = v_t.row(i).adjoint();
        basis.set_column(j, &row);
    }
    basis
}

/// Singular values in descending order.
pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = x.clone().svd(false, false).singular_values.iter().cloned().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Number of singular values above `rel_tol · σ_max`.
pub fn numerical_rank(x: &CMatrix, rel_tol: f64) -> usize {
    let s = singular_values(x);
    let smax = s.first().cloned().unwrap_or(0.0);
    s.iter().filter(|&&v| smax > 0.0 && v > rel_tol * smax).count()
}
