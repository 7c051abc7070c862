//! Finite-difference Ricci tensor of a coordinate metric on `ℝⁿ`.
//!
//! Nothing here uses the Lie algebra: the metric is treated as an opaque
//! field `x ↦ g(x)`, differentiated in every coordinate direction with central
//! differences, and contracted through Christoffel symbols. It serves as an
//! independent check of the algebraic curvature engine.

use crate::error::{Error, Result};
use crate::linalg::{max_abs, max_abs_diff, Mat};
use crate::metric::LorentzianStructure;
use crate::petrov::PetrovSolution;

type Evaluator<'a> = Box<dyn Fn(&[f64]) -> Result<Mat> + Send + Sync + 'a>;

pub struct MetricField<'a> {
    n: usize,
    h: f64,
    evaluator: Evaluator<'a>,
}

pub const DEFAULT_STEP: f64 = 1e-3;

/// Reciprocal condition number below which the metric counts as singular.
const MIN_RCOND: f64 = 1e-12;

impl<'a> MetricField<'a> {
    pub fn new(
        n: usize,
        h: f64,
        evaluator: impl Fn(&[f64]) -> Result<Mat> + Send + Sync + 'a,
    ) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::Input(format!("step must be positive, got {h}")));
        }
        Ok(Self {
            n,
            h,
            evaluator: Box::new(evaluator),
        })
    }

    /// Metric of a left-invariant structure, through the matrix exponential.
    pub fn from_structure(s: &'a LorentzianStructure, h: f64) -> Result<Self> {
        Self::new(s.dim(), h, move |x| s.coordinate_metric(x))
    }

    /// Metric of a Petrov solution, through its trigonometric expansion.
    pub fn from_petrov(sol: &'a PetrovSolution, h: f64) -> Result<Self> {
        Self::new(sol.dim(), h, move |x| sol.metric_at(x))
    }

    pub fn minkowski(n: usize, h: f64) -> Result<Self> {
        Self::new(n, h, move |_| Ok(crate::linalg::lorentz_j(n)))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn with_step(self, h: f64) -> Result<Self> {
        Self::new(self.n, h, self.evaluator)
    }

    pub fn eval(&self, x: &[f64]) -> Result<Mat> {
        if x.len() != self.n {
            return Err(Error::Input(format!(
                "point must have {} coordinates",
                self.n
            )));
        }
        let g = (self.evaluator)(x)?;
        if g.shape() != (self.n, self.n) {
            return Err(Error::Input(
                "metric evaluator returned a matrix of the wrong size".into(),
            ));
        }
        Ok(g)
    }

    fn shifted(&self, x: &[f64], d: usize, sign: f64) -> Vec<f64> {
        let mut y = x.to_vec();
        y[d] += sign * self.h;
        y
    }

    /// `∂_d g` for every `d`, by central differences.
    pub fn metric_derivatives(&self, x: &[f64]) -> Result<Vec<Mat>> {
        (0..self.n)
            .map(|d| {
                let plus = self.eval(&self.shifted(x, d, 1.0))?;
                let minus = self.eval(&self.shifted(x, d, -1.0))?;
                Ok((plus - minus) / (2.0 * self.h))
            })
            .collect()
    }
}

/// `Γ^a_{bc}` as `gamma[a][(b, c)]`.
pub fn christoffel_fd(field: &MetricField, x: &[f64]) -> Result<Vec<Mat>> {
    let n = field.dim();
    let g = field.eval(x)?;
    let sv = g.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > MIN_RCOND * smax) {
        return Err(Error::Domain(format!(
            "metric is ill-conditioned at {x:?} (singular values {smin:e} .. {smax:e})"
        )));
    }
    let g_inv = g
        .try_inverse()
        .ok_or_else(|| Error::Domain(format!("metric is singular at {x:?}")))?;
    let dg = field.metric_derivatives(x)?;
    // Lowered symbols Γ_{d,bc}.
    let lower: Vec<Mat> = (0..n)
        .map(|d| {
            Mat::from_fn(n, n, |b, c| {
                0.5 * (dg[b][(d, c)] + dg[c][(d, b)] - dg[d][(b, c)])
            })
        })
        .collect();
    Ok((0..n)
        .map(|a| {
            Mat::from_fn(n, n, |b, c| {
                (0..n).map(|d| g_inv[(a, d)] * lower[d][(b, c)]).sum()
            })
        })
        .collect())
}

/// `R_{bc} = ∂_a Γ^a_{bc} - ∂_b Γ^a_{ac} + Γ^a_{ad} Γ^d_{bc} - Γ^a_{bd} Γ^d_{ac}`
/// in coordinates, with the outer derivatives again by central differences.
/// The result is not symmetrized.
pub fn ricci_fd(field: &MetricField, x: &[f64]) -> Result<Mat> {
    let n = field.dim();
    let gamma = christoffel_fd(field, x)?;
    let mut d_gamma = Vec::with_capacity(n);
    for e in 0..n {
        let plus = christoffel_fd(field, &field.shifted(x, e, 1.0))?;
        let minus = christoffel_fd(field, &field.shifted(x, e, -1.0))?;
        let h2 = 2.0 * field.step();
        d_gamma.push(
            plus.iter()
                .zip(&minus)
                .map(|(p, m)| (p - m) / h2)
                .collect::<Vec<Mat>>(),
        );
    }
    // d_gamma[e][a] = ∂_e Γ^a.
    let trace: Vec<f64> = (0..n)
        .map(|d| (0..n).map(|a| gamma[a][(a, d)]).sum())
        .collect();
    Ok(Mat::from_fn(n, n, |b, c| {
        let mut r = 0.0;
        for a in 0..n {
            r += d_gamma[a][a][(b, c)] - d_gamma[b][a][(a, c)];
            for d in 0..n {
                r -= gamma[a][(b, d)] * gamma[d][(a, c)];
            }
        }
        for d in 0..n {
            r += trace[d] * gamma[d][(b, c)];
        }
        r
    }))
}

/// Pulls a coordinate-basis tensor back to the left-invariant frame at `x`.
pub fn to_frame(s: &LorentzianStructure, coordinate: &Mat, x: &[f64]) -> Mat {
    let (frame, _) = s.left_invariant_frame(x[x.len() - 1]);
    frame.transpose() * coordinate * frame
}

/// Largest entry of `algebraic - frameᵀ · fd · frame`.
pub fn compare_frames(algebraic: &Mat, fd: &Mat, x: &[f64], s: &LorentzianStructure) -> f64 {
    max_abs_diff(algebraic, &to_frame(s, fd, x))
}

/// Errors at `h` and `h/2` and the observed order `log₂(e(h)/e(h/2))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Convergence {
    pub h: f64,
    pub error_h: f64,
    pub error_half: f64,
    pub order: f64,
}

pub fn convergence(
    s: &LorentzianStructure,
    algebraic: &Mat,
    x: &[f64],
    h: f64,
) -> Result<Convergence> {
    let coarse = MetricField::from_structure(s, h)?;
    let fine = MetricField::from_structure(s, h / 2.0)?;
    let error_h = compare_frames(algebraic, &ricci_fd(&coarse, x)?, x, s);
    let error_half = compare_frames(algebraic, &ricci_fd(&fine, x)?, x, s);
    Ok(Convergence {
        h,
        error_h,
        error_half,
        order: (error_h / error_half).log2(),
    })
}

/// `max |R - Rᵀ|`.
pub fn asymmetry(m: &Mat) -> f64 {
    max_abs(&(m - m.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::ricci_general;
    use crate::linalg::diag;
    use crate::metric::MetricCase;
    use crate::AlmostAbelianAlgebra;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-0.5..0.5)).collect()
    }

    #[test]
    fn minkowski_is_flat() {
        let f = MetricField::minkowski(4, DEFAULT_STEP).unwrap();
        let x = [0.3, -0.2, 0.1, 0.7];
        assert!(christoffel_fd(&f, &x)
            .unwrap()
            .iter()
            .all(|g| max_abs(g) < 1e-12));
        assert!(max_abs(&ricci_fd(&f, &x).unwrap()) < 1e-12);
    }

    #[test]
    fn petrov_derivatives_only_along_last_coordinate() {
        let p = PetrovSolution::build(&[2.0, 1.0]).unwrap();
        let f = MetricField::from_petrov(&p, DEFAULT_STEP).unwrap();
        let dg = f.metric_derivatives(&[0.1, 0.2, 0.3, 0.4, 0.2]).unwrap();
        for d in &dg[..4] {
            assert_eq!(max_abs(d), 0.0);
        }
        assert!(max_abs(&dg[4]) > 0.1);
    }

    #[test]
    fn christoffel_symmetric_in_lower_indices() {
        let s = LorentzianStructure::from_rows(
            MetricCase::A,
            &[
                vec![0.3, 1.0, 0.0],
                vec![-0.5, 0.2, 0.4],
                vec![0.1, 0.0, -0.7],
            ],
        )
        .unwrap();
        let f = MetricField::from_structure(&s, DEFAULT_STEP).unwrap();
        for g in christoffel_fd(&f, &[0.2, 0.1, -0.3, 0.4]).unwrap() {
            assert_eq!(g, g.transpose());
        }
    }

    #[test]
    fn petrov_fd_ricci_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = PetrovSolution::build(&[1.0]).unwrap();
        let f = MetricField::from_petrov(&p, DEFAULT_STEP).unwrap();
        for _ in 0..5 {
            let x = random_point(&mut rng, 4);
            assert!(max_abs(&ricci_fd(&f, &x).unwrap()) < 1e-4);
        }
    }

    #[test]
    fn flat_case_a_fd_ricci_vanishes() {
        let skew = Mat::from_row_slice(3, 3, &[0.0, 1.0, -0.5, -1.0, 0.0, 0.3, 0.5, -0.3, 0.0]);
        let s = LorentzianStructure::new(AlmostAbelianAlgebra::new(skew).unwrap(), MetricCase::A);
        let f = MetricField::from_structure(&s, DEFAULT_STEP).unwrap();
        assert!(max_abs(&ricci_fd(&f, &[0.1, 0.2, 0.3, 0.4]).unwrap()) < 1e-4);
    }

    #[test]
    fn diagonal_case_b_frame_value() {
        let s = LorentzianStructure::new(
            AlmostAbelianAlgebra::new(diag(&[1.0, -1.0, 0.0])).unwrap(),
            MetricCase::B,
        );
        let algebraic = ricci_general(&s);
        assert!((algebraic[(3, 3)] + 2.0).abs() < 1e-14);
        let f = MetricField::from_structure(&s, DEFAULT_STEP).unwrap();
        for x in [[0.0; 4], [0.3, -0.1, 0.2, 0.4]] {
            let fd = ricci_fd(&f, &x).unwrap();
            assert!((to_frame(&s, &fd, &x)[(3, 3)] + 2.0).abs() < 1e-3);
            assert!(compare_frames(&algebraic, &fd, &x, &s) < 1e-4);
        }
        // At x = 0 the frame is the coordinate basis.
        let fd = ricci_fd(&f, &[0.0; 4]).unwrap();
        assert_eq!(to_frame(&s, &fd, &[0.0; 4]), fd);
    }

    #[test]
    fn second_order_convergence() {
        let s = LorentzianStructure::from_rows(
            MetricCase::B,
            &[
                vec![0.5, 0.2, 0.0],
                vec![0.1, -0.4, 0.3],
                vec![0.0, 0.6, 0.2],
            ],
        )
        .unwrap();
        let algebraic = ricci_general(&s);
        let c = convergence(&s, &algebraic, &[0.1, -0.2, 0.3, 0.25], 1e-2).unwrap();
        assert!((c.order - 2.0).abs() < 0.2, "{c:?}");
        assert!(c.error_half < 1e-4);
    }

    #[test]
    fn fd_ricci_symmetric_and_homogeneous() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = LorentzianStructure::from_rows(
            MetricCase::C,
            &[
                vec![0.5, 0.2, 0.1],
                vec![0.1, -0.4, 0.3],
                vec![0.2, 0.6, 0.2],
            ],
        )
        .unwrap();
        let f = MetricField::from_structure(&s, DEFAULT_STEP).unwrap();
        let reference = to_frame(&s, &ricci_fd(&f, &[0.0; 4]).unwrap(), &[0.0; 4]);
        for _ in 0..5 {
            let x = random_point(&mut rng, 4);
            let fd = ricci_fd(&f, &x).unwrap();
            assert!(asymmetry(&fd) < 1e-5);
            assert!(max_abs_diff(&to_frame(&s, &fd, &x), &reference) < 1e-4);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(MetricField::minkowski(4, 0.0).is_err());
        let f = MetricField::new(3, 1e-3, |_| Ok(diag(&[1.0, 0.0, 1.0]))).unwrap();
        assert!(matches!(
            christoffel_fd(&f, &[0.0; 3]),
            Err(Error::Domain(_))
        ));
        let f = MetricField::minkowski(4, 1e-3).unwrap();
        assert!(ricci_fd(&f, &[0.0; 3]).is_err());
    }
}
