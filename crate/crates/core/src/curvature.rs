//! Levi-Civita connection, curvature operators and Ricci tensor of a
//! left-invariant Lorentzian metric, together with the flatness, local
//! symmetry and wave-type predicates built from them.
//!
//! Everything is expressed in the basis `{X_1, ..., X_n}`. An operator on the
//! algebra is an `n×n` matrix acting on component columns.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::algebra::Decomposition;
use crate::error::{Error, Result};
use crate::linalg::{basis, commutator, max_abs, max_abs_vec, rank, Mat, Vector};
use crate::metric::{LorentzianStructure, MetricCase};

/// `L_a = L_{X_a}`, with `∇_X Y = L_X Y` for left-invariant fields.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionOperators {
    pub l: Vec<Mat>,
}

impl ConnectionOperators {
    /// `L_x = Σ_a x_a L_a`.
    pub fn along(&self, x: &Vector) -> Mat {
        let n = self.l.len();
        let mut out = Mat::zeros(n, n);
        for (xa, la) in x.iter().zip(&self.l) {
            if *xa != 0.0 {
                out += la * *xa;
            }
        }
        out
    }
}

/// `R(X_a, X_b) = [L_a, L_b] - L_{[X_a, X_b]}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureOperators {
    n: usize,
    r: Vec<Mat>,
}

impl CurvatureOperators {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, a: usize, b: usize) -> &Mat {
        &self.r[a * self.n + b]
    }

    /// `R(x, y)` by bilinear expansion.
    pub fn eval(&self, x: &Vector, y: &Vector) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n, n);
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] != 0.0 {
                    out += self.get(a, b) * (x[a] * y[b]);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().map(max_abs).fold(0.0, f64::max)
    }
}

pub fn levi_civita(s: &LorentzianStructure) -> ConnectionOperators {
    let n = s.dim();
    let alg = s.algebra();
    let eta = s.eta();
    let eta_inv = eta
        .clone()
        .try_inverse()
        .expect("eta is nondegenerate by construction");
    // <X_c, [X_p, X_q]> for all c, p, q
    let br: Vec<Vector> = (0..n * n)
        .map(|k| eta * alg.bracket_basis(k / n, k % n))
        .collect();
    let lowered = |c: usize, p: usize, q: usize| br[p * n + q][c];
    let l = (0..n)
        .map(|a| {
            // column y, row z: <L_a X_y, X_z>
            let m = Mat::from_fn(n, n, |z, y| {
                0.5 * (-lowered(a, y, z) + lowered(y, z, a) + lowered(z, a, y))
            });
            &eta_inv * m
        })
        .collect();
    ConnectionOperators { l }
}

pub fn curvature_from(s: &LorentzianStructure, conn: &ConnectionOperators) -> CurvatureOperators {
    let n = s.dim();
    let alg = s.algebra();
    let mut r = Vec::with_capacity(n * n);
    for a in 0..n {
        for b in 0..n {
            let br = alg.bracket_basis(a, b);
            r.push(commutator(&conn.l[a], &conn.l[b]) - conn.along(&br));
        }
    }
    CurvatureOperators { n, r }
}

pub fn curvature(s: &LorentzianStructure) -> CurvatureOperators {
    curvature_from(s, &levi_civita(s))
}

/// Connection, curvature and Ricci tensor computed once for reuse.
#[derive(Debug, Clone)]
pub struct CurvaturePackage {
    pub connection: ConnectionOperators,
    pub curvature: CurvatureOperators,
    pub ricci: Mat,
}

impl CurvaturePackage {
    pub fn new(s: &LorentzianStructure) -> Self {
        let connection = levi_civita(s);
        let curvature = curvature_from(s, &connection);
        Self {
            ricci: ricci_general(s),
            connection,
            curvature,
        }
    }
}

/// Ricci tensor from the orthonormal-frame formula: a frame sum, a double
/// frame sum, the Killing form and the mean-curvature term.
pub fn ricci_general(s: &LorentzianStructure) -> Mat {
    let n = s.dim();
    let alg = s.algebra();
    let eta = s.eta();
    let frame = s.orthonormal_frame();
    let ads = alg.ad_matrices();

    let mut ric = Mat::zeros(n, n);
    for (e, eps) in frame.basis.iter().zip(&frame.signs) {
        // column p holds [X_p, e_a]
        let mut cols = Mat::zeros(n, n);
        for (p, ad) in ads.iter().enumerate() {
            cols.set_column(p, &(ad * e));
        }
        ric -= cols.transpose() * eta * &cols * (0.5 * eps);
    }
    for (ea, eps_a) in frame.basis.iter().zip(&frame.signs) {
        for (eb, eps_b) in frame.basis.iter().zip(&frame.signs) {
            let w = eta * alg.bracket_unchecked(ea, eb);
            ric += &w * w.transpose() * (0.25 * eps_a * eps_b);
        }
    }
    ric -= alg.killing_form() * 0.5;
    let h = alg.mean_curvature(s.case());
    let m = eta * alg.ad(&h);
    ric -= (&m + m.transpose()) * 0.5;
    ric
}

/// Ricci tensor from the block closed forms of each metric class.
pub fn ricci_closed_form(s: &LorentzianStructure) -> Mat {
    let n = s.dim();
    let mut ric = Mat::zeros(n, n);
    let k = n - 1;
    match s.algebra().decompose(s.case()) {
        Decomposition::SymSkew { s: sym, t } => {
            let upper = commutator(&sym, &t) + &sym * sym.trace();
            ric.view_mut((0, 0), (k, k)).copy_from(&upper);
            ric[(k, k)] = -(&sym * &sym).trace();
        }
        Decomposition::J { s_l, t_l, j } => {
            let upper = -(&j * (commutator(&s_l, &t_l) + &s_l * s_l.trace()));
            ric.view_mut((0, 0), (k, k)).copy_from(&upper);
            ric[(k, k)] = -(&s_l * &s_l).trace();
        }
        Decomposition::BlockC {
            b,
            c,
            d,
            s_prime,
            t_prime,
            ..
        } => {
            let h = n - 2;
            let b = Vector::from_vec(b);
            let c = Vector::from_vec(c);
            let tr = s_prime.trace();
            // Ric(X_i, X_n) = ½ [(tr S') b + A'ᵀ b]_i
            let mixed = (Mat::identity(h, h) * tr + &s_prime - &t_prime) * &b;
            let bb = b.dot(&b);
            ric.view_mut((0, 0), (h, h))
                .copy_from(&(-(&b * b.transpose())));
            for i in 0..h {
                ric[(i, n - 1)] = mixed[i];
                ric[(n - 1, i)] = mixed[i];
            }
            ric[(n - 2, n - 1)] = bb;
            ric[(n - 1, n - 2)] = bb;
            ric[(n - 1, n - 1)] =
                2.0 * d * tr - 2.0 * (&s_prime * &s_prime).trace() - 2.0 * b.dot(&c);
            ric *= 0.5;
        }
    }
    ric
}

/// Ricci tensor as the trace `Ric(X, Y) = Σ_c ε_c <R(e_c, X) Y, e_c>`.
pub fn ricci_from_curvature(s: &LorentzianStructure, r: &CurvatureOperators) -> Mat {
    let n = s.dim();
    let frame = s.orthonormal_frame();
    Mat::from_fn(n, n, |p, q| {
        frame
            .basis
            .iter()
            .zip(&frame.signs)
            .map(|(e, eps)| {
                let op = r.eval(e, &basis(n, p));
                eps * s.inner_unchecked(&(op * basis(n, q)), e)
            })
            .sum()
    })
}

/// Closed-form quantities whose vanishing characterizes Ricci-flatness or
/// flatness, keyed by name.
pub type ConditionValues = BTreeMap<String, f64>;

#[derive(Debug, Clone, Serialize)]
pub struct RicciFlatReport {
    pub ricci_flat: bool,
    pub max_ricci_entry: f64,
    /// Verdict of the closed-form conditions alone.
    pub closed_form: bool,
    pub conditions: ConditionValues,
    /// Case (b) only: whether `T_L = O` already holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_l_zero: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlatReport {
    pub flat: bool,
    pub max_curvature_entry: f64,
    pub closed_form: bool,
    pub conditions: ConditionValues,
}

/// Case (c) data normalized to `d ∈ {0, 1}` by `P = Diag(1, ..., 1, d)`,
/// `c = 1/d`, which preserves `η_c`.
pub(crate) struct NormalizedC {
    pub(crate) b: Vector,
    pub(crate) c: Vector,
    pub(crate) d: f64,
    pub(crate) s: Mat,
    pub(crate) t: Mat,
}

pub(crate) fn normalized_c(s: &LorentzianStructure) -> NormalizedC {
    match s.algebra().decompose(MetricCase::C) {
        Decomposition::BlockC {
            b,
            c,
            d,
            s_prime,
            t_prime,
            ..
        } => {
            let b = Vector::from_vec(b);
            let c = Vector::from_vec(c);
            if d == 0.0 {
                NormalizedC {
                    b,
                    c,
                    d,
                    s: s_prime,
                    t: t_prime,
                }
            } else {
                NormalizedC {
                    b,
                    c: c / (d * d),
                    d: 1.0,
                    s: s_prime / d,
                    t: t_prime / d,
                }
            }
        }
        _ => unreachable!("case (c) always yields a block decomposition"),
    }
}

fn ricci_conditions(s: &LorentzianStructure, tol: f64) -> (bool, ConditionValues, Option<bool>) {
    let mut v = ConditionValues::new();
    match s.case() {
        MetricCase::A => {
            let Decomposition::SymSkew { s: sym, .. } = s.algebra().decompose(MetricCase::A) else {
                unreachable!()
            };
            v.insert("max_abs_S".into(), max_abs(&sym));
            (max_abs(&sym) < tol, v, None)
        }
        MetricCase::B => {
            let Decomposition::J { s_l, t_l, .. } = s.algebra().decompose(MetricCase::B) else {
                unreachable!()
            };
            let tr = s_l.trace();
            let tr2 = (&s_l * &s_l).trace();
            let comm = max_abs(&commutator(&s_l, &t_l));
            v.insert("tr_S_L".into(), tr);
            v.insert("tr_S_L_squared".into(), tr2);
            v.insert("max_abs_commutator_S_L_T_L".into(), comm);
            let ok = tr.abs() < tol && tr2.abs() < tol && comm < tol;
            (ok, v, Some(max_abs(&t_l) < tol))
        }
        MetricCase::C => {
            let c = normalized_c(s);
            let bn = max_abs_vec(&c.b);
            let tr = c.s.trace();
            let tr2 = (&c.s * &c.s).trace();
            v.insert("max_abs_b".into(), bn);
            v.insert("d_normalized".into(), c.d);
            v.insert("tr_S_prime".into(), tr);
            v.insert("tr_S_prime_squared".into(), tr2);
            let ok = bn < tol && (tr2 - c.d * tr).abs() < tol;
            (ok, v, None)
        }
    }
}

pub fn is_ricci_flat(s: &LorentzianStructure, tol: f64) -> RicciFlatReport {
    let ric = ricci_general(s);
    let max_entry = max_abs(&ric);
    let (closed_form, conditions, t_l_zero) = ricci_conditions(s, tol);
    RicciFlatReport {
        ricci_flat: max_entry < tol,
        max_ricci_entry: max_entry,
        closed_form,
        conditions,
        t_l_zero,
    }
}

pub fn is_flat(s: &LorentzianStructure, tol: f64) -> FlatReport {
    let r = curvature(s);
    let max_entry = r.max_abs();
    let (rf, mut v, _) = ricci_conditions(s, tol);
    let closed_form = match s.case() {
        MetricCase::A => rf,
        MetricCase::B => {
            let Decomposition::J { s_l, .. } = s.algebra().decompose(MetricCase::B) else {
                unreachable!()
            };
            let sq = max_abs(&(&s_l * &s_l));
            let rk = rank(&s_l, 1e-10);
            v.insert("max_abs_S_L_squared".into(), sq);
            v.insert("rank_S_L".into(), rk as f64);
            rf && sq < tol && rk <= 1
        }
        MetricCase::C => {
            let c = normalized_c(s);
            if c.d == 0.0 {
                rf
            } else {
                let idem = max_abs(&(&c.s * &c.s - &c.s));
                let comm = max_abs(&commutator(&c.s, &c.t));
                v.insert("max_abs_S_prime_squared_minus_S_prime".into(), idem);
                v.insert("max_abs_commutator_S_prime_T_prime".into(), comm);
                rf && idem < tol && comm < tol
            }
        }
    };
    FlatReport {
        flat: max_entry < tol,
        max_curvature_entry: max_entry,
        closed_form,
        conditions: v,
    }
}

/// `(∇_Z R)(X, Y) = [L_Z, R(X, Y)] - R(L_Z X, Y) - R(X, L_Z Y)`.
pub fn covariant_derivative_of_curvature(
    conn: &ConnectionOperators,
    r: &CurvatureOperators,
    z: &Vector,
    x: &Vector,
    y: &Vector,
) -> Mat {
    let lz = conn.along(z);
    commutator(&lz, &r.eval(x, y)) - r.eval(&(&lz * x), y) - r.eval(x, &(&lz * y))
}

/// Largest violations of the algebraic curvature identities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetryResiduals {
    /// `R(X, Y) + R(Y, X)`.
    pub antisymmetry: f64,
    /// `⟨R(X, Y)Z, W⟩ + ⟨Z, R(X, Y)W⟩`.
    pub skew_adjointness: f64,
    /// First Bianchi identity.
    pub bianchi: f64,
}

pub fn symmetry_residuals(s: &LorentzianStructure, r: &CurvatureOperators) -> SymmetryResiduals {
    let n = s.dim();
    let mut out = SymmetryResiduals {
        antisymmetry: 0.0,
        skew_adjointness: 0.0,
        bianchi: 0.0,
    };
    for a in 0..n {
        for b in 0..n {
            out.antisymmetry = out.antisymmetry.max(max_abs(&(r.get(a, b) + r.get(b, a))));
            let m = s.eta() * r.get(a, b);
            out.skew_adjointness = out.skew_adjointness.max(max_abs(&(&m + m.transpose())));
            for c in 0..n {
                let cyc = r.get(a, b) * basis(n, c)
                    + r.get(b, c) * basis(n, a)
                    + r.get(c, a) * basis(n, b);
                out.bianchi = out.bianchi.max(max_abs_vec(&cyc));
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalSymmetryReport {
    pub locally_symmetric: bool,
    pub max_nabla_r_entry: f64,
}

pub fn is_locally_symmetric(s: &LorentzianStructure, tol: f64) -> LocalSymmetryReport {
    let n = s.dim();
    let conn = levi_civita(s);
    let r = curvature_from(s, &conn);
    let mut worst = 0.0_f64;
    for zi in 0..n {
        for xi in 0..n {
            for yi in (xi + 1)..n {
                let m = covariant_derivative_of_curvature(
                    &conn,
                    &r,
                    &basis(n, zi),
                    &basis(n, xi),
                    &basis(n, yi),
                );
                worst = worst.max(max_abs(&m));
            }
        }
    }
    LocalSymmetryReport {
        locally_symmetric: worst < tol,
        max_nabla_r_entry: worst,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Parallel,
    Recurrent,
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveReport {
    pub kind: WaveKind,
    pub null: bool,
    pub kind_ok: bool,
    pub transversally_flat: bool,
    /// `μ_a` with `L_a v = μ_a v`; all zero for a parallel field.
    pub recurrence: Vec<f64>,
    pub max_residual: f64,
    pub max_transverse_curvature: f64,
}

/// Basis of `v^⊥ = {x : <x, v> = 0}` with respect to the Lorentzian inner
/// product. Contains `v` itself when `v` is null.
pub fn orthogonal_complement(s: &LorentzianStructure, v: &Vector) -> Vec<Vector> {
    let n = s.dim();
    let w = s.eta() * v;
    let pivot = w.iamax();
    (0..n)
        .filter(|j| *j != pivot)
        .map(|j| {
            let mut x = basis(n, j);
            x[pivot] = -w[j] / w[pivot];
            x
        })
        .collect()
}

pub fn check_wave(
    s: &LorentzianStructure,
    v: &Vector,
    kind: WaveKind,
    tol: f64,
) -> Result<WaveReport> {
    let n = s.dim();
    if v.len() != n {
        return Err(Error::Input(format!("wave vector must have length {n}")));
    }
    if v.iter().all(|x| *x == 0.0) {
        return Err(Error::Input("wave vector must be nonzero".into()));
    }
    let conn = levi_civita(s);
    let r = curvature_from(s, &conn);
    let norm2 = v.dot(v);

    let mut recurrence = Vec::with_capacity(n);
    let mut residual = 0.0_f64;
    for la in &conn.l {
        let lv = la * v;
        let mu = match kind {
            WaveKind::Parallel => 0.0,
            WaveKind::Recurrent => lv.dot(v) / norm2,
        };
        residual = residual.max(max_abs_vec(&(lv - v * mu)));
        recurrence.push(mu);
    }

    let perp = orthogonal_complement(s, v);
    let mut transverse = 0.0_f64;
    for i in 0..perp.len() {
        for j in (i + 1)..perp.len() {
            transverse = transverse.max(max_abs(&r.eval(&perp[i], &perp[j])));
        }
    }

    Ok(WaveReport {
        kind,
        null: s.inner_unchecked(v, v).abs() < tol,
        kind_ok: residual < tol,
        transversally_flat: transverse < tol,
        recurrence,
        max_residual: residual,
        max_transverse_curvature: transverse,
    })
}
