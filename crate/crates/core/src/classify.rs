//! Ricci-flat non-flat families, normal-form templates, decomposability and
//! the finite symmetry groups of the generalized Petrov solutions.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Decomposition;
use crate::curvature::{curvature, is_flat, is_ricci_flat, normalized_c};
use crate::error::{Error, Result};
use crate::linalg::{basis, block_diag, diag, lorentz_j, max_abs_diff, to_rows, Mat};
use crate::metric::{LorentzianStructure, MetricCase};
use crate::petrov::{is_simply_transitive, PetrovSolution};

/// Canonical blocks for a `J`-symmetric operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NormalFormKind {
    Diagonal,
    /// `[[α, -β], [β, α]]`, `β > 0`.
    RotationI {
        alpha: f64,
        beta: f64,
    },
    /// `[[-1 + γ, -1], [1, 1 + γ]]`.
    JordanIi {
        gamma: f64,
    },
    /// `[[-δ, -δ, -1], [δ, δ, 1], [1, 1, 0]]`.
    NilpotentIii {
        delta: f64,
    },
}

impl NormalFormKind {
    fn block(&self) -> Result<Mat> {
        Ok(match *self {
            NormalFormKind::Diagonal => Mat::zeros(0, 0),
            NormalFormKind::RotationI { alpha, beta } => {
                if !(beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
                    return Err(Error::Input(format!(
                        "rotation block needs finite alpha and beta > 0, got beta = {beta}"
                    )));
                }
                Mat::from_row_slice(2, 2, &[alpha, -beta, beta, alpha])
            }
            NormalFormKind::JordanIi { gamma } => {
                if !gamma.is_finite() {
                    return Err(Error::Input("gamma must be finite".into()));
                }
                Mat::from_row_slice(2, 2, &[-1.0 + gamma, -1.0, 1.0, 1.0 + gamma])
            }
            NormalFormKind::NilpotentIii { delta } => {
                if !delta.is_finite() {
                    return Err(Error::Input("delta must be finite".into()));
                }
                Mat::from_row_slice(
                    3,
                    3,
                    &[-delta, -delta, -1.0, delta, delta, 1.0, 1.0, 1.0, 0.0],
                )
            }
        })
    }
}

/// `block ⊕ Diag(tail, 0, ..., 0)` of size `(n-1)×(n-1)`.
pub fn normal_form_template(kind: NormalFormKind, tail: &[f64], n: usize) -> Result<Mat> {
    let block = kind.block()?;
    let m = n
        .checked_sub(1)
        .filter(|m| *m >= 2)
        .ok_or_else(|| Error::Input("n must be at least 3".into()))?;
    let k = block.nrows();
    if k + tail.len() > m {
        return Err(Error::Input(format!(
            "block of size {k} plus {} diagonal entries does not fit in {m}×{m}",
            tail.len()
        )));
    }
    if tail.iter().any(|t| !t.is_finite()) {
        return Err(Error::Input("diagonal entries must be finite".into()));
    }
    let mut padded = tail.to_vec();
    padded.resize(m - k, 0.0);
    Ok(block_diag(&block, &diag(&padded)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "class")]
pub enum RicciFlatClass {
    NotRicciFlat,
    Flat,
    /// Rotation block `⊕ Diag(λ)`, normalized to `α ≤ 0`, `β > 0`.
    PetrovFamily {
        alpha: f64,
        beta: f64,
        lambda: Vec<f64>,
    },
    /// `S_L` equal to the nilpotent 3-block `⊕ O` (up to overall sign).
    PlaneWaveB {
        delta: f64,
    },
    /// Case (c) with `d = 1`, `b = 0` after rescaling.
    PlaneWaveC {
        #[serde(serialize_with = "ser_mat")]
        a_prime: Mat,
        c: Vec<f64>,
    },
    /// Ricci-flat and non-flat, but `A` is not in one of the canonical shapes.
    UnrecognizedPresentation,
}

fn ser_mat<S: serde::Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
    serde::Serialize::serialize(&to_rows(m), s)
}

pub fn classify_ricci_flat(s: &LorentzianStructure, tol: f64) -> RicciFlatClass {
    if !is_ricci_flat(s, tol).ricci_flat {
        return RicciFlatClass::NotRicciFlat;
    }
    if is_flat(s, tol).flat {
        return RicciFlatClass::Flat;
    }
    match s.case() {
        MetricCase::A => RicciFlatClass::UnrecognizedPresentation,
        MetricCase::B => {
            let s_l = match s.algebra().decompose(MetricCase::B) {
                Decomposition::J { s_l, .. } => s_l,
                _ => unreachable!("case (b) yields a J decomposition"),
            };
            match_petrov(&s_l, tol)
                .or_else(|| match_plane_wave_b(&s_l, tol))
                .unwrap_or(RicciFlatClass::UnrecognizedPresentation)
        }
        MetricCase::C => {
            let nc = normalized_c(s);
            if nc.d == 1.0 && nc.b.iter().all(|x| x.abs() < tol) {
                RicciFlatClass::PlaneWaveC {
                    a_prime: &nc.s + &nc.t,
                    c: nc.c.iter().copied().collect(),
                }
            } else {
                RicciFlatClass::UnrecognizedPresentation
            }
        }
    }
}

fn off_block_zero(m: &Mat, k: usize, tol: f64) -> bool {
    let size = m.nrows();
    (0..size).all(|i| {
        (0..size).all(|j| {
            let in_block = i < k && j < k;
            in_block || i == j && i >= k || m[(i, j)].abs() < tol
        })
    })
}

fn match_petrov(s_l: &Mat, tol: f64) -> Option<RicciFlatClass> {
    if s_l.nrows() < 3 || !off_block_zero(s_l, 2, tol) {
        return None;
    }
    let (a00, a01, a10, a11) = (s_l[(0, 0)], s_l[(0, 1)], s_l[(1, 0)], s_l[(1, 1)]);
    if (a00 - a11).abs() >= tol || (a01 + a10).abs() >= tol || a10.abs() < tol {
        return None;
    }
    let mut alpha = 0.5 * (a00 + a11);
    let mut lambda: Vec<f64> = (2..s_l.nrows()).map(|i| s_l[(i, i)]).collect();
    if alpha > 0.0 {
        alpha = -alpha;
        lambda.iter_mut().for_each(|l| *l = -*l);
    }
    Some(RicciFlatClass::PetrovFamily {
        alpha,
        beta: 0.5 * (a10 - a01).abs(),
        lambda,
    })
}

fn match_plane_wave_b(s_l: &Mat, tol: f64) -> Option<RicciFlatClass> {
    if s_l.nrows() < 3 || !off_block_zero(s_l, 3, tol) {
        return None;
    }
    let m = s_l.nrows();
    if (3..m).any(|i| s_l[(i, i)].abs() >= tol) {
        return None;
    }
    let sign = s_l[(2, 0)].signum();
    let delta = sign * s_l[(1, 0)];
    let template = normal_form_template(NormalFormKind::NilpotentIii { delta }, &[], m + 1).ok()?;
    (max_abs_diff(&(s_l * sign), &template) < tol).then_some(RicciFlatClass::PlaneWaveB { delta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposability {
    /// Nonzero `λ` in their original order.
    pub core: Vec<f64>,
    /// Number of zero `λ`, i.e. the dimension of the flat Euclidean factor.
    pub m: usize,
}

pub fn decomposability(lambdas: &[f64]) -> Decomposability {
    Decomposability {
        core: lambdas.iter().copied().filter(|l| *l != 0.0).collect(),
        m: lambdas.iter().filter(|l| **l == 0.0).count(),
    }
}

/// Largest deviation between the metric of `P(λ)` at `x` (coordinates
/// reordered so the zero-`λ` slots come last) and `metric(P(core)) ⊕ I_m`.
pub fn decomposition_split_error(lambdas: &[f64], x: &[f64]) -> Result<f64> {
    let full = PetrovSolution::build_allowing_minkowski(lambdas)?;
    let n = full.dim();
    if x.len() != n {
        return Err(Error::Input(format!("point must have {n} coordinates")));
    }
    let dec = decomposability(lambdas);
    let mut order = vec![0, 1];
    order.extend(
        (0..lambdas.len())
            .filter(|i| lambdas[*i] != 0.0)
            .map(|i| i + 2),
    );
    order.push(n - 1);
    order.extend(
        (0..lambdas.len())
            .filter(|i| lambdas[*i] == 0.0)
            .map(|i| i + 2),
    );

    let g = full.metric_at(x)?;
    let permuted = Mat::from_fn(n, n, |i, j| g[(order[i], order[j])]);
    let core_x: Vec<f64> = order[..n - dec.m].iter().map(|i| x[*i]).collect();
    let core_metric = if dec.core.is_empty() {
        diag(&[-1.0, 1.0, 1.0])
    } else {
        PetrovSolution::build(&dec.core)?.metric_at(&core_x)?
    };
    let expected = block_diag(&core_metric, &Mat::identity(dec.m, dec.m));
    Ok(max_abs_diff(&permuted, &expected))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CandidateSet {
    Gamma1,
    Gamma2,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupElement {
    #[serde(serialize_with = "ser_mat")]
    pub matrix: Mat,
    pub set: CandidateSet,
    pub is_isometry_sym: bool,
    pub is_automorphism: bool,
}

fn signs(bits: usize, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// `Diag(τ, τ, τ_3, ..., τ_n)`: `2^{n-1}` matrices.
pub fn gamma1(n: usize) -> Vec<Mat> {
    (0..1usize << (n - 1))
        .map(|bits| {
            let t = signs(bits, n - 1);
            let mut d = vec![t[0], t[0]];
            d.extend_from_slice(&t[1..]);
            diag(&d)
        })
        .collect()
}

/// `Diag(τ', -τ') ⊕ (anti-diagonal τ'_3, ..., τ'_{n-1}) ⊕ τ'_n`: `2^{n-1}` matrices.
pub fn gamma2(n: usize) -> Vec<Mat> {
    (0..1usize << (n - 1))
        .map(|bits| {
            let t = signs(bits, n - 1);
            let mut m = Mat::zeros(n, n);
            m[(0, 0)] = t[0];
            m[(1, 1)] = -t[0];
            for k in 2..n - 1 {
                m[(k, n - k)] = t[k - 1];
            }
            m[(n - 1, n - 1)] = t[n - 2];
            m
        })
        .collect()
}

/// Flags each candidate against the curvature and bracket of `s`.
pub fn test_candidates(
    s: &LorentzianStructure,
    candidates: &[(Mat, CandidateSet)],
    tol: f64,
) -> Vec<GroupElement> {
    let n = s.dim();
    let r = curvature(s);
    let scale = r.max_abs().max(1.0);
    let alg = s.algebra();
    let x: Vec<_> = (0..n).map(|i| basis(n, i)).collect();
    candidates
        .par_iter()
        .map(|(phi, set)| {
            let phi_inv = phi.transpose();
            let mut sym = true;
            let mut aut = true;
            for a in 0..n {
                for b in a + 1..n {
                    let (pa, pb) = (phi * &x[a], phi * &x[b]);
                    let lhs = r.eval(&pa, &pb);
                    let rhs = phi * r.get(a, b) * &phi_inv;
                    sym &= max_abs_diff(&lhs, &rhs) < tol * scale;
                    let br = phi * alg.bracket_basis(a, b) - alg.bracket_unchecked(&pa, &pb);
                    aut &= br.amax() < tol * scale;
                }
            }
            GroupElement {
                matrix: phi.clone(),
                set: *set,
                is_isometry_sym: sym,
                is_automorphism: aut && sym,
            }
        })
        .collect()
}

/// Elements of `Γ₁ ∪ Γ₂` that preserve the curvature operator of `P(λ)`,
/// flagged by whether they are also Lie algebra automorphisms. For `n = 4`
/// only `Γ₁` is searched.
pub fn enumerate_sym_group(sol: &PetrovSolution, tol: f64) -> Result<Vec<GroupElement>> {
    if sol.is_degenerate() {
        return Err(Error::Input(
            "Minkowski member has a continuous isotropy group".into(),
        ));
    }
    if !is_simply_transitive(sol.lambdas()) {
        return Err(Error::Input(format!(
            "lambda = {:?} is not strictly decreasing; the isotropy group is not finite",
            sol.lambdas()
        )));
    }
    let n = sol.dim();
    let mut candidates: Vec<(Mat, CandidateSet)> = gamma1(n)
        .into_iter()
        .map(|m| (m, CandidateSet::Gamma1))
        .collect();
    if n >= 5 {
        candidates.extend(gamma2(n).into_iter().map(|m| (m, CandidateSet::Gamma2)));
    }
    let elements = test_candidates(&sol.structure(), &candidates, tol);
    Ok(elements.into_iter().filter(|e| e.is_isometry_sym).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsotropyStructure {
    pub order: usize,
    pub abelian: bool,
    pub label: String,
    /// Closed under products and inverses.
    pub closed: bool,
    /// Only for the non-abelian case: whether the elements `r` and `s`
    /// exist in the group and satisfy `r⁴ = s² = (sr)² = 1`, `r² ≠ 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dihedral_relations: Option<bool>,
}

fn superscript(k: usize) -> String {
    if k == 1 {
        return String::new();
    }
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn key(m: &Mat) -> Vec<i8> {
    m.iter().map(|v| v.round() as i8).collect()
}

/// Order, commutativity and isomorphism label of the automorphism elements
/// among `elements`.
pub fn isotropy_structure(elements: &[GroupElement]) -> Result<IsotropyStructure> {
    let aut: Vec<&Mat> = elements
        .iter()
        .filter(|e| e.is_automorphism)
        .map(|e| &e.matrix)
        .collect();
    let n = aut
        .first()
        .map(|m| m.nrows())
        .ok_or_else(|| Error::Input("no automorphism elements given".into()))?;
    let keys: HashSet<Vec<i8>> = aut.iter().map(|m| key(m)).collect();
    let closed = aut.iter().all(|a| {
        keys.contains(&key(&a.transpose())) && aut.iter().all(|b| keys.contains(&key(&(*a * *b))))
    });
    let abelian = aut.iter().all(|a| {
        aut.iter()
            .all(|b| max_abs_diff(&(*a * *b), &(*b * *a)) == 0.0)
    });
    let order = keys.len();
    let (label, dihedral_relations) = if abelian {
        (format!("Z₂{}", superscript(n - 2)), None)
    } else {
        let label = if n == 5 {
            "Z₂×D₄".to_string()
        } else {
            format!("Z₂{}⋊D₄", superscript(n - 4))
        };
        (label, Some(n >= 5 && dihedral_relations_hold(n, &keys)))
    };
    Ok(IsotropyStructure {
        order,
        abelian,
        label,
        closed,
        dihedral_relations,
    })
}

/// The generators `r ∈ Γ₂'` and `s ∈ Γ₁'` of the dihedral factor.
pub fn dihedral_generators(n: usize) -> (Mat, Mat) {
    let mut r = Mat::zeros(n, n);
    r[(0, 0)] = 1.0;
    r[(1, 1)] = -1.0;
    for k in 2..n - 1 {
        r[(k, n - k)] = 1.0;
    }
    r[(n - 2, 2)] = -1.0;
    r[(n - 1, n - 1)] = -1.0;
    let mut d = vec![1.0; n];
    d[..3].fill(-1.0);
    (r, diag(&d))
}

fn dihedral_relations_hold(n: usize, keys: &HashSet<Vec<i8>>) -> bool {
    let (r, s) = dihedral_generators(n);
    let id = Mat::identity(n, n);
    let r2 = &r * &r;
    let sr = &s * &r;
    keys.contains(&key(&r))
        && keys.contains(&key(&s))
        && r2 != id
        && &r2 * &r2 == id
        && &s * &s == id
        && &sr * &sr == id
}

fn special_palindrome_with(lambdas: &[f64], eq: impl Fn(f64, f64) -> bool) -> bool {
    let len = lambdas.len();
    let half = len / 2;
    if half == 0 {
        return false;
    }
    let middle_ok = len.is_multiple_of(2) || eq(lambdas[half], 0.0);
    let pairs_ok = (0..half).all(|i| eq(lambdas[i], -lambdas[len - 1 - i]));
    let positive = lambdas[..half].iter().all(|k| *k > 0.0 && !eq(*k, 0.0));
    let descending = lambdas[..half]
        .windows(2)
        .all(|w| w[0] > w[1] && !eq(w[0], w[1]));
    middle_ok && pairs_ok && positive && descending
}

/// `λ = (κ₁, ..., κ_{h-1}, -κ_{h-1}, ..., -κ₁)` or the same with a middle
/// zero, `κ₁ > ... > κ_{h-1} > 0`. Exact comparison.
pub fn is_special_palindrome(lambdas: &[f64]) -> bool {
    special_palindrome_with(lambdas, |a, b| a == b)
}

/// [`is_special_palindrome`] with an absolute tolerance.
pub fn is_special_palindrome_tol(lambdas: &[f64], tol: f64) -> bool {
    special_palindrome_with(lambdas, |a, b| (a - b).abs() <= tol)
}

/// `Φᵀ J Φ = J` exactly, `J = Diag(-1, 1, ..., 1)`.
pub fn preserves_lorentz_form(phi: &Mat) -> bool {
    let j = lorentz_j(phi.nrows());
    phi.transpose() * &j * phi == j
}
