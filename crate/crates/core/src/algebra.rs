//! Almost abelian Lie algebras `g = a ⋊ R X_n`.
//!
//! All brackets are encoded by the associated matrix `A`:
//! `[X_n, X_j] = Σ_i A[i][j] X_i` for `j < n`, and the ideal
//! `a = span{X_1, ..., X_{n-1}}` is abelian. Vectors are column vectors of
//! components in the basis `{X_1, ..., X_n}`; indices are zero-based in code,
//! so `X_n` is slot `n - 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{lorentz_j, Mat, Vector};
use crate::metric::MetricCase;

#[derive(Debug, Clone, PartialEq)]
pub struct AlmostAbelianAlgebra {
    a: Mat,
}

/// The splitting of `A` adapted to each metric class.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Decomposition {
    /// Case (a): `A = S + T`, `S` symmetric and `T` skew.
    SymSkew {
        #[serde(serialize_with = "ser_mat")]
        s: Mat,
        #[serde(serialize_with = "ser_mat")]
        t: Mat,
    },
    /// Case (b): `A = S_L + T_L` with `S_Lᵀ = J S_L J` and `T_Lᵀ = -J T_L J`.
    J {
        #[serde(serialize_with = "ser_mat")]
        s_l: Mat,
        #[serde(serialize_with = "ser_mat")]
        t_l: Mat,
        #[serde(serialize_with = "ser_mat")]
        j: Mat,
    },
    /// Case (c): `A = [[A', b], [cᵀ, d]]` and `A' = S' + T'`.
    BlockC {
        #[serde(serialize_with = "ser_mat")]
        a_prime: Mat,
        b: Vec<f64>,
        c: Vec<f64>,
        d: f64,
        #[serde(serialize_with = "ser_mat")]
        s_prime: Mat,
        #[serde(serialize_with = "ser_mat")]
        t_prime: Mat,
    },
}

fn ser_mat<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&crate::linalg::to_rows(m), s)
}

impl Decomposition {
    /// Reassembles the associated matrix from its parts.
    pub fn recompose(&self) -> Mat {
        match self {
            Decomposition::SymSkew { s, t } => s + t,
            Decomposition::J { s_l, t_l, .. } => s_l + t_l,
            Decomposition::BlockC {
                a_prime, b, c, d, ..
            } => {
                let k = a_prime.nrows();
                let mut a = Mat::zeros(k + 1, k + 1);
                a.view_mut((0, 0), (k, k)).copy_from(a_prime);
                for i in 0..k {
                    a[(i, k)] = b[i];
                    a[(k, i)] = c[i];
                }
                a[(k, k)] = *d;
                a
            }
        }
    }
}

impl AlmostAbelianAlgebra {
    pub fn new(a: Mat) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::Input(format!(
                "associated matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if a.nrows() < 2 {
            return Err(Error::Input(format!(
                "dimension n = {} is below the minimum of 3",
                a.nrows() + 1
            )));
        }
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input(
                "associated matrix has non-finite entries".into(),
            ));
        }
        Ok(Self { a })
    }

    /// Builds the algebra from row-major rows, checking they form an
    /// `(n-1)×(n-1)` matrix.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Input(format!(
                "row {} of A has length {}, expected {}",
                bad,
                rows[bad].len(),
                m
            )));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        Self::new(Mat::from_row_slice(m, m, &flat))
    }

    /// Lie algebra dimension `n`.
    pub fn dim(&self) -> usize {
        self.a.nrows() + 1
    }

    pub fn matrix(&self) -> &Mat {
        &self.a
    }

    /// `[X_a, X_b]` for zero-based basis indices.
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vector {
        let n = self.dim();
        let last = n - 1;
        let mut out = Vector::zeros(n);
        if a == last && b != last {
            out.rows_mut(0, last).copy_from(&self.a.column(b));
        } else if b == last && a != last {
            out.rows_mut(0, last).copy_from(&(-self.a.column(a)));
        }
        out
    }

    /// Coefficient of `X_c` in `[X_a, X_b]`.
    pub fn structure_constant(&self, c: usize, a: usize, b: usize) -> f64 {
        let last = self.dim() - 1;
        if c == last {
            return 0.0;
        }
        if a == last && b != last {
            self.a[(c, b)]
        } else if b == last && a != last {
            -self.a[(c, a)]
        } else {
            0.0
        }
    }

    /// `[x, y]`. Only the `X_n` components of the arguments act, so
    /// `[x, y] = A (x_n y' - y_n x')` on the ideal.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::Input(format!(
                "bracket expects vectors of length {}, got {} and {}",
                n,
                x.len(),
                y.len()
            )));
        }
        Ok(self.bracket_unchecked(x, y))
    }

    pub(crate) fn bracket_unchecked(&self, x: &Vector, y: &Vector) -> Vector {
        let last = self.dim() - 1;
        let mix = y.rows(0, last) * x[last] - x.rows(0, last) * y[last];
        let mut out = Vector::zeros(last + 1);
        out.rows_mut(0, last).copy_from(&(&self.a * mix));
        out
    }

    /// `ad x` as an `n×n` matrix acting on column vectors.
    pub fn ad(&self, x: &Vector) -> Mat {
        let n = self.dim();
        let last = n - 1;
        let mut m = Mat::zeros(n, n);
        m.view_mut((0, 0), (last, last))
            .copy_from(&(&self.a * x[last]));
        let col = -(&self.a * x.rows(0, last));
        m.view_mut((0, last), (last, 1)).copy_from(&col);
        m
    }

    /// `[ad X_1, ..., ad X_n]`.
    pub fn ad_matrices(&self) -> Vec<Mat> {
        let n = self.dim();
        (0..n)
            .map(|i| self.ad(&crate::linalg::basis(n, i)))
            .collect()
    }

    /// `K(X, Y) = tr(ad X ad Y)`; only `K(X_n, X_n) = tr A²` survives.
    pub fn killing_form(&self) -> Mat {
        let n = self.dim();
        let mut k = Mat::zeros(n, n);
        k[(n - 1, n - 1)] = (&self.a * &self.a).trace();
        k
    }

    /// Mean curvature vector `H`, defined by `<H, X> = tr ad X`.
    pub fn mean_curvature(&self, case: MetricCase) -> Vector {
        let n = self.dim();
        let tr = self.a.trace();
        let mut h = Vector::zeros(n);
        match case {
            MetricCase::A => h[n - 1] = -tr,
            MetricCase::B => h[n - 1] = tr,
            MetricCase::C => h[n - 2] = tr,
        }
        h
    }

    pub fn decompose(&self, case: MetricCase) -> Decomposition {
        let a = &self.a;
        match case {
            MetricCase::A => {
                let at = a.transpose();
                Decomposition::SymSkew {
                    s: (a + &at) * 0.5,
                    t: (a - &at) * 0.5,
                }
            }
            MetricCase::B => {
                let j = lorentz_j(a.nrows());
                let mirrored = &j * a.transpose() * &j;
                Decomposition::J {
                    s_l: (a + &mirrored) * 0.5,
                    t_l: (a - &mirrored) * 0.5,
                    j,
                }
            }
            MetricCase::C => {
                let k = a.nrows() - 1;
                let a_prime = a.view((0, 0), (k, k)).into_owned();
                let at = a_prime.transpose();
                Decomposition::BlockC {
                    s_prime: (&a_prime + &at) * 0.5,
                    t_prime: (&a_prime - &at) * 0.5,
                    b: (0..k).map(|i| a[(i, k)]).collect(),
                    c: (0..k).map(|i| a[(k, i)]).collect(),
                    d: a[(k, k)],
                    a_prime,
                }
            }
        }
    }

    /// Change of generators `X̄ = X · (P ⊕ c)`. Returns `(c P⁻¹ A P, η̄)`.
    pub fn transform(&self, eta: &Mat, p: &Mat, cscale: f64) -> Result<(Self, Mat)> {
        let m = self.a.nrows();
        if p.shape() != (m, m) {
            return Err(Error::Input(format!("P must be {m}x{m}")));
        }
        if eta.shape() != (m + 1, m + 1) {
            return Err(Error::Input(format!("eta must be {0}x{0}", m + 1)));
        }
        if cscale == 0.0 || !cscale.is_finite() {
            return Err(Error::Input("scale c must be nonzero".into()));
        }
        let p_inv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Input("P is singular".into()))?;
        let a_bar = (&p_inv * &self.a * p) * cscale;
        let q = crate::linalg::extend_with_corner(p, cscale);
        let eta_bar = q.transpose() * eta * &q;
        Ok((Self { a: a_bar }, eta_bar))
    }
}
