//! The three Lorentzian inner-product classes on an almost abelian algebra
//! and the induced left-invariant metric on `R^n`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::algebra::AlmostAbelianAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{expm, extend_with_corner, inertia, Mat, Vector};

/// Restriction of the inner product to the abelian ideal: (a) Riemannian,
/// (b) Lorentzian, (c) degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricCase {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c")]
    C,
}

impl fmt::Display for MetricCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricCase::A => "a",
            MetricCase::B => "b",
            MetricCase::C => "c",
        })
    }
}

impl FromStr for MetricCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(MetricCase::A),
            "b" => Ok(MetricCase::B),
            "c" => Ok(MetricCase::C),
            other => Err(Error::Input(format!("unknown metric case {other:?}"))),
        }
    }
}

/// Gram matrix of the inner product in the basis `{X_1, ..., X_n}`.
pub fn eta_matrix(case: MetricCase, n: usize) -> Mat {
    let mut eta = Mat::identity(n, n);
    match case {
        MetricCase::A => eta[(n - 1, n - 1)] = -1.0,
        MetricCase::B => eta[(0, 0)] = -1.0,
        MetricCase::C => {
            eta[(n - 2, n - 2)] = 0.0;
            eta[(n - 1, n - 1)] = 0.0;
            eta[(n - 2, n - 1)] = 1.0;
            eta[(n - 1, n - 2)] = 1.0;
        }
    }
    eta
}

#[derive(Debug, Clone, PartialEq)]
pub struct LorentzianStructure {
    alg: AlmostAbelianAlgebra,
    case: MetricCase,
    eta: Mat,
}

/// Pseudo-orthonormal basis `e_a` (columns, X-basis components) with
/// `<e_a, e_b> = ε_a δ_ab`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalFrame {
    pub basis: Vec<Vector>,
    pub signs: Vec<f64>,
}

impl LorentzianStructure {
    pub fn new(alg: AlmostAbelianAlgebra, case: MetricCase) -> Self {
        let eta = eta_matrix(case, alg.dim());
        Self { alg, case, eta }
    }

    pub fn from_rows(case: MetricCase, rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self::new(AlmostAbelianAlgebra::from_rows(rows)?, case))
    }

    pub fn algebra(&self) -> &AlmostAbelianAlgebra {
        &self.alg
    }

    pub fn case(&self) -> MetricCase {
        self.case
    }

    pub fn eta(&self) -> &Mat {
        &self.eta
    }

    pub fn dim(&self) -> usize {
        self.alg.dim()
    }

    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<f64> {
        let n = self.dim();
        if x.len() != n || y.len() != n {
            return Err(Error::Input(format!(
                "inner product expects vectors of length {n}"
            )));
        }
        Ok(self.inner_unchecked(x, y))
    }

    pub(crate) fn inner_unchecked(&self, x: &Vector, y: &Vector) -> f64 {
        x.dot(&(&self.eta * y))
    }

    pub fn orthonormal_frame(&self) -> OrthonormalFrame {
        let n = self.dim();
        let unit = |i| crate::linalg::basis(n, i);
        match self.case {
            MetricCase::A | MetricCase::B => OrthonormalFrame {
                basis: (0..n).map(unit).collect(),
                signs: (0..n).map(|i| self.eta[(i, i)]).collect(),
            },
            MetricCase::C => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let mut basis: Vec<Vector> = (0..n - 2).map(unit).collect();
                basis.push((unit(n - 2) + unit(n - 1)) * s);
                basis.push((unit(n - 2) - unit(n - 1)) * s);
                let mut signs = vec![1.0; n];
                signs[n - 1] = -1.0;
                OrthonormalFrame { basis, signs }
            }
        }
    }

    /// `blockdiag(exp(-Aᵀ x_n), 1) · η · blockdiag(exp(-A x_n), 1)`; depends
    /// on `x` only through its last coordinate.
    pub fn coordinate_metric(&self, x: &[f64]) -> Result<Mat> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Input(format!("point must have {n} coordinates")));
        }
        let (_, coframe) = self.left_invariant_frame(x[n - 1]);
        let g = coframe.transpose() * &self.eta * &coframe;
        Ok(crate::linalg::symmetrize(&g))
    }

    /// `(frame, coframe)` at height `x_n`: the frame matrix has the
    /// coordinate components of `X_a` in column `a` (`exp(A x_n) ⊕ 1`),
    /// the coframe has the components of `ω^a` in row `a` (`exp(-A x_n) ⊕ 1`).
    pub fn left_invariant_frame(&self, x_n: f64) -> (Mat, Mat) {
        let a = self.alg.matrix();
        let frame = extend_with_corner(&expm(&(a * x_n)), 1.0);
        let coframe = extend_with_corner(&expm(&(a * -x_n)), 1.0);
        (frame, coframe)
    }

    /// `(negative, zero, positive)` eigenvalue counts of the coordinate metric.
    pub fn signature_at(&self, x: &[f64]) -> Result<(usize, usize, usize)> {
        Ok(inertia(&self.coordinate_metric(x)?, 1e-10))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis, diag, max_abs_diff};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn petrov(alpha: f64, beta: f64, lambdas: &[f64]) -> LorentzianStructure {
        let m = 2 + lambdas.len();
        let mut a = Mat::zeros(m, m);
        a[(0, 0)] = alpha;
        a[(1, 1)] = alpha;
        a[(0, 1)] = -beta;
        a[(1, 0)] = beta;
        for (i, l) in lambdas.iter().enumerate() {
            a[(2 + i, 2 + i)] = *l;
        }
        LorentzianStructure::new(AlmostAbelianAlgebra::new(a).unwrap(), MetricCase::B)
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_matrix(MetricCase::B, 4), diag(&[-1.0, 1.0, 1.0, 1.0]));
        assert_eq!(
            eta_matrix(MetricCase::C, 3),
            Mat::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0])
        );
        assert_eq!(eta_matrix(MetricCase::A, 3), diag(&[1.0, 1.0, -1.0]));
        for case in [MetricCase::A, MetricCase::B, MetricCase::C] {
            assert_eq!(inertia(&eta_matrix(case, 6), 1e-12), (1, 0, 5));
        }
    }

    #[test]
    fn case_parsing() {
        assert_eq!("b".parse::<MetricCase>().unwrap(), MetricCase::B);
        assert_eq!(" C ".parse::<MetricCase>().unwrap(), MetricCase::C);
        assert!("d".parse::<MetricCase>().is_err());
    }

    #[test]
    fn inner_examples() {
        let s = petrov(-0.5, 0.8, &[1.0]);
        assert_eq!(s.inner(&basis(4, 0), &basis(4, 0)).unwrap(), -1.0);
        assert_eq!(s.inner(&Vector::zeros(4), &basis(4, 2)).unwrap(), 0.0);
        assert!(s.inner(&basis(3, 0), &basis(4, 0)).is_err());
        let c = LorentzianStructure::new(
            AlmostAbelianAlgebra::new(Mat::zeros(3, 3)).unwrap(),
            MetricCase::C,
        );
        assert_eq!(c.inner(&basis(4, 2), &basis(4, 3)).unwrap(), 1.0);
    }

    #[test]
    fn frames_are_orthonormal() {
        let s = petrov(-0.5, 0.8, &[1.0]);
        assert_eq!(s.orthonormal_frame().signs, vec![-1.0, 1.0, 1.0, 1.0]);
        for case in [MetricCase::A, MetricCase::B, MetricCase::C] {
            let st = LorentzianStructure::new(
                AlmostAbelianAlgebra::new(Mat::identity(4, 4)).unwrap(),
                case,
            );
            let f = st.orthonormal_frame();
            assert_eq!(f.signs.iter().filter(|s| **s < 0.0).count(), 1);
            for a in 0..5 {
                for b in 0..5 {
                    let ip = st.inner(&f.basis[a], &f.basis[b]).unwrap();
                    let expected = if a == b { f.signs[a] } else { 0.0 };
                    assert!((ip - expected).abs() < 1e-15, "case {case} ({a},{b})");
                }
            }
        }
    }

    #[test]
    fn coordinate_metric_examples() {
        let s = petrov(-0.5, 3f64.sqrt() / 2.0, &[1.0]);
        assert_eq!(
            s.coordinate_metric(&[0.3, -2.0, 5.0, 0.0]).unwrap(),
            *s.eta()
        );

        let (al, be, xn) = (-0.5, 3f64.sqrt() / 2.0, 0.7);
        let g = s.coordinate_metric(&[0.0, 0.0, 0.0, xn]).unwrap();
        let e = (-2.0 * al * xn).exp();
        let (c2, s2) = ((2.0 * be * xn).cos(), (2.0 * be * xn).sin());
        assert!((g[(0, 0)] + e * c2).abs() < 1e-13);
        assert!((g[(0, 1)] + e * s2).abs() < 1e-13);
        assert!((g[(1, 1)] - e * c2).abs() < 1e-13);

        let d = LorentzianStructure::new(
            AlmostAbelianAlgebra::new(diag(&[0.4, -1.0, 2.0])).unwrap(),
            MetricCase::B,
        );
        let g = d.coordinate_metric(&[0.0, 0.0, 0.0, 0.3]).unwrap();
        assert!((g[(1, 1)] - (-2.0f64 * -1.0 * 0.3).exp()).abs() < 1e-14);
        assert!((g[(2, 2)] - (-2.0f64 * 2.0 * 0.3).exp()).abs() < 1e-14);
    }

    #[test]
    fn coordinate_metric_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        for case in [MetricCase::A, MetricCase::B, MetricCase::C] {
            let st = LorentzianStructure::from_rows(case, &rows).unwrap();
            for _ in 0..20 {
                let mut x: Vec<f64> = (0..5).map(|_| rng.random_range(-2.0..2.0)).collect();
                let g = st.coordinate_metric(&x).unwrap();
                assert_eq!(inertia(&g, 1e-10).0, 1);
                for v in x.iter_mut().take(4) {
                    *v += rng.random_range(-5.0..5.0);
                }
                assert_eq!(st.coordinate_metric(&x).unwrap(), g);

                let (frame, coframe) = st.left_invariant_frame(x[4]);
                let id = Mat::identity(5, 5);
                assert!(max_abs_diff(&(&frame * &coframe), &id) < 1e-12);
                // pullback Σ η_ab ω^a ω^b
                let pulled = coframe.transpose() * st.eta() * &coframe;
                assert!(max_abs_diff(&pulled, &g) < 1e-12);
            }
        }
        assert!(matches!(
            LorentzianStructure::from_rows(MetricCase::B, &rows)
                .unwrap()
                .coordinate_metric(&[0.0; 3]),
            Err(Error::Input(_))
        ));
    }

    #[test]
    fn frame_at_origin_is_identity() {
        let s = petrov(-1.0, 2.0, &[1.0, 1.0]);
        let (f, w) = s.left_invariant_frame(0.0);
        assert_eq!(f, Mat::identity(5, 5));
        assert_eq!(w, Mat::identity(5, 5));
    }
}
