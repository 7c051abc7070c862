//! Small dense helpers on top of nalgebra. Everything here works on
//! dynamically sized matrices; dimensions in this crate stay below ~16.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Canonical basis vector `X_{i+1}` (zero-based index `i`).
pub fn basis(n: usize, i: usize) -> Vector {
    let mut v = Vector::zeros(n);
    v[i] = 1.0;
    v
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_vec(v: &Vector) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

pub fn commutator(a: &Mat, b: &Mat) -> Mat {
    a * b - b * a
}

/// `Diag(-1, 1, ..., 1)` of size `m`.
pub fn lorentz_j(m: usize) -> Mat {
    let mut j = Mat::identity(m, m);
    j[(0, 0)] = -1.0;
    j
}

/// `[[m, 0], [0ᵀ, corner]]`, i.e. `m ⊕ corner`.
pub fn extend_with_corner(m: &Mat, corner: f64) -> Mat {
    let k = m.nrows();
    let mut out = Mat::zeros(k + 1, k + 1);
    out.view_mut((0, 0), (k, k)).copy_from(m);
    out[(k, k)] = corner;
    out
}

pub fn block_diag(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = Mat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn diag(values: &[f64]) -> Mat {
    Mat::from_diagonal(&Vector::from_column_slice(values))
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn rank(m: &Mat, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = m.clone().singular_values();
    let largest = sv.iter().cloned().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > rel_tol * largest).count()
}

/// Number of (negative, zero, positive) eigenvalues of a symmetric matrix,
/// classified with an absolute threshold.
pub fn inertia(m: &Mat, threshold: f64) -> (usize, usize, usize) {
    let eig = symmetrize(m).symmetric_eigenvalues();
    let neg = eig.iter().filter(|e| **e < -threshold).count();
    let pos = eig.iter().filter(|e| **e > threshold).count();
    (neg, eig.len() - neg - pos, pos)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(m: &Mat) -> Mat {
    m.clone().exp()
}

/// Rows of a dense matrix as nested vectors (row-major), for JSON output.
pub fn to_rows(m: &Mat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}
