//! The generalized Petrov family `P(λ_3, ..., λ_{n-1})`.
//!
//! Given the diagonal exponents `λ`, the rotation parameters are fixed by the
//! vacuum conditions `2α + Σλ = 0` and `2α² - 2β² + Σλ² = 0`, with `α ≤ 0`
//! and `β > 0`. The associated matrix is `[[α, -β], [β, α]] ⊕ Diag(λ)` with
//! the case-(b) inner product.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::AlmostAbelianAlgebra;
use crate::error::{Error, Result};
use crate::linalg::{max_abs_diff, Mat};
use crate::metric::{LorentzianStructure, MetricCase};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PetrovSolution {
    lambdas: Vec<f64>,
    alpha: f64,
    beta: f64,
    /// All `λ` zero: the metric is Minkowski space (`α = β = 0`).
    degenerate: bool,
}

impl PetrovSolution {
    /// Solves for `(α, β)`. All-zero `λ` is rejected; see
    /// [`PetrovSolution::build_allowing_minkowski`].
    pub fn build(lambdas: &[f64]) -> Result<Self> {
        Self::build_with(lambdas, false)
    }

    /// Like [`PetrovSolution::build`] but returns the flat Minkowski member
    /// (tagged `degenerate`) for all-zero `λ`.
    pub fn build_allowing_minkowski(lambdas: &[f64]) -> Result<Self> {
        Self::build_with(lambdas, true)
    }

    fn build_with(lambdas: &[f64], allow_minkowski: bool) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::Input(
                "need at least one lambda (dimension n = len + 3 >= 4)".into(),
            ));
        }
        if lambdas.iter().any(|l| !l.is_finite()) {
            return Err(Error::Input("lambda values must be finite".into()));
        }
        let sum: f64 = lambdas.iter().sum();
        if sum < 0.0 {
            return Err(Error::Domain(format!(
                "sum of lambda is {sum} < 0, which forces alpha > 0; negate all lambda values \
                 (an isometric change of generators) to obtain alpha <= 0"
            )));
        }
        let degenerate = lambdas.iter().all(|l| *l == 0.0);
        if degenerate && !allow_minkowski {
            return Err(Error::Domain(
                "all lambda are zero: alpha = beta = 0 is flat Minkowski space, not a Petrov solution"
                    .into(),
            ));
        }
        let sum_sq: f64 = lambdas.iter().map(|l| l * l).sum();
        let alpha = -0.5 * sum;
        let beta = (alpha * alpha + 0.5 * sum_sq).sqrt();
        Ok(Self {
            lambdas: lambdas.to_vec(),
            alpha: alpha + 0.0,
            beta,
            degenerate,
        })
    }

    pub fn dim(&self) -> usize {
        self.lambdas.len() + 3
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Residuals of `2α + Σλ` and `2α² - 2β² + Σλ²`.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let sum: f64 = self.lambdas.iter().sum();
        let sum_sq: f64 = self.lambdas.iter().map(|l| l * l).sum();
        (
            2.0 * self.alpha + sum,
            2.0 * self.alpha * self.alpha - 2.0 * self.beta * self.beta + sum_sq,
        )
    }

    pub fn associated_matrix(&self) -> Mat {
        let m = self.dim() - 1;
        let mut a = Mat::zeros(m, m);
        a[(0, 0)] = self.alpha;
        a[(1, 1)] = self.alpha;
        a[(0, 1)] = -self.beta;
        a[(1, 0)] = self.beta;
        for (i, l) in self.lambdas.iter().enumerate() {
            a[(i + 2, i + 2)] = *l;
        }
        a
    }

    pub fn structure(&self) -> LorentzianStructure {
        let alg = AlmostAbelianAlgebra::new(self.associated_matrix())
            .expect("associated matrix is square with n >= 4");
        LorentzianStructure::new(alg, MetricCase::B)
    }

    /// Coordinate metric from its trigonometric expansion (no matrix
    /// exponential involved).
    pub fn metric_at(&self, x: &[f64]) -> Result<Mat> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::Input(format!("point must have {n} coordinates")));
        }
        let xn = x[n - 1];
        let scale = (-2.0 * self.alpha * xn).exp();
        let (s2, c2) = (2.0 * self.beta * xn).sin_cos();
        let mut g = Mat::zeros(n, n);
        g[(0, 0)] = -scale * c2;
        g[(1, 1)] = scale * c2;
        g[(0, 1)] = -scale * s2;
        g[(1, 0)] = -scale * s2;
        for (i, l) in self.lambdas.iter().enumerate() {
            g[(i + 2, i + 2)] = (-2.0 * l * xn).exp();
        }
        g[(n - 1, n - 1)] = 1.0;
        Ok(g)
    }

    /// For `n = 4`: rescale `x' = -2αx`, set `k² = 4α²` and compare with the
    /// classical Petrov line element at `samples` random points.
    pub fn to_classical_petrov(&self, samples: usize, seed: u64) -> Result<ClassicalReduction> {
        if self.dim() != 4 {
            return Err(Error::Domain(format!(
                "classical Petrov reduction needs n = 4, got n = {}",
                self.dim()
            )));
        }
        if self.degenerate {
            return Err(Error::Domain(
                "Minkowski member has no Petrov reduction".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..samples {
            let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
            let x_prime: Vec<f64> = x.iter().map(|v| -2.0 * self.alpha * v).collect();
            // k² ds² in primed coordinates pulled back by dx' = -2α dx is
            // (4α²/k²) · classical(x') = classical(x').
            let lhs = self.metric_at(&x)?;
            let rhs = classical_petrov_metric([x_prime[0], x_prime[1], x_prime[2], x_prime[3]]);
            worst = worst.max(max_abs_diff(&lhs, &rhs));
        }
        Ok(ClassicalReduction {
            k_squared: 4.0 * self.alpha * self.alpha,
            beta_over_abs_alpha: self.beta / self.alpha.abs(),
            max_deviation: worst,
            verified: worst < 1e-12,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassicalReduction {
    pub k_squared: f64,
    pub beta_over_abs_alpha: f64,
    pub max_deviation: f64,
    pub verified: bool,
}

/// Components of `k² ds²` for the classical four-dimensional Petrov metric
/// `e^{x₄}[cos(√3x₄)(-dx₁² + dx₂²) - 2 sin(√3x₄) dx₁dx₂] + e^{-2x₄}dx₃² + dx₄²`.
pub fn classical_petrov_metric(x: [f64; 4]) -> Mat {
    let x4 = x[3];
    let e = x4.exp();
    let (s, c) = (3f64.sqrt() * x4).sin_cos();
    Mat::from_row_slice(
        4,
        4,
        &[
            -e * c,
            -e * s,
            0.0,
            0.0,
            -e * s,
            e * c,
            0.0,
            0.0,
            0.0,
            0.0,
            (-2.0 * x4).exp(),
            0.0,
            0.0,
            0.0,
            0.0,
            1.0,
        ],
    )
}

/// `λ_3 > λ_4 > ... > λ_{n-1}` strictly; vacuous for a single `λ`.
pub fn is_simply_transitive(lambdas: &[f64]) -> bool {
    lambdas.windows(2).all(|w| w[0] > w[1])
}
