//! The quotient engine: radicals of semidefinite forms, induced operators,
//! contraction bounds, generator spectra, dual unitaries, and the fixed-point
//! construction of maximal positive subspaces.
//!
//! Everything starts from a PSD form F₀ = ⟨φ_i, Jφ_j⟩ sampled on a finite
//! family.  Dividing out the radical N = {v : v*F₀v = 0} leaves a genuine
//! Hilbert metric on the quotient; operators that move the family produce
//! mixed forms M_ij = ⟨φ_i, Jγφ_j⟩, and their least-squares representation
//! on the quotient — Γ = W*MW in whitened coordinates, W = V·Λ^{−1/2} — is
//! the induced operator.  The engine verifies the three structural facts the
//! whole construction rests on: induced operators of J-selfadjoint unitaries
//! contract, the induced operator of a product is the product of induced
//! operators, and the generator of an induced contraction semigroup has
//! spectrum in (−∞, 0], so that e^{itD} is a unitary one-parameter group on
//! the quotient.

use crate::kernels::{psd_report, FormMatrix, PsdVerdict, RADICAL_FLOOR};
use crate::linalg::{self, C64};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuotientError {
    /// The base form is indefinite: the positivity axiom fails and the
    /// quotient is undefined.
    #[error("form is indefinite (eig_min {eig_min:.3e}, eig_max {eig_max:.3e}): no quotient")]
    Radical { eig_min: f64, eig_max: f64 },
    /// A motion fails to map the radical into itself.
    #[error("{which} does not preserve the radical: violation {violation:.3e}")]
    Invariance { which: String, violation: f64 },
    /// The two-step generator estimates disagree: the family is not close
    /// enough to a one-parameter semigroup at this step size.
    #[error("generator estimates from δ and 2δ disagree by {disagreement:.3e} (allowed {allowed:.3e})")]
    Convergence { disagreement: f64, allowed: f64 },
    /// A quotient direction is annihilated by the motion: no logarithm.
    #[error("semigroup step has non-positive eigenvalue {0:.3e} on the quotient")]
    Degenerate(f64),
    /// The A/B selection is not a transversal of the θ-moved points.
    #[error("invalid A/B selection: {0}")]
    Partition(String),
    /// A reflection space violates its own invariants.
    #[error("invalid reflection space: {0}")]
    Space(String),
}

/// Default relative eigenvalue cut separating radical from quotient.
pub const RADICAL_TOL: f64 = 1e-9;

/// Orthonormal basis of the numerical radical of a PSD form: the eigenspace
/// of eigenvalues below tol·eig_max (with the absolute floor shared with
/// `FormMatrix`).  Indefinite forms are rejected — there is nothing to
/// divide by when the form takes negative values.
pub fn radical(form: &FormMatrix, tol: f64) -> Result<DMatrix<C64>, QuotientError> {
    let (eig_min, eig_max, verdict) = psd_report(form);
    if verdict == PsdVerdict::Indefinite {
        return Err(QuotientError::Radical { eig_min, eig_max });
    }
    let (eigs, vecs) = linalg::hermitian_eigen(&form.entries);
    let band = (tol * eig_max.abs()).max(RADICAL_FLOOR);
    let cols: Vec<usize> = (0..eigs.len()).filter(|&k| eigs[k].abs() <= band).collect();
    Ok(vecs.select_columns(&cols))
}

/// A PSD form together with its radical/quotient split.
///
/// `quotient_basis` columns are the eigenvectors with eigenvalue above the
/// radical band, so the induced metric is exactly diagonal in these
/// coordinates: `induced_metric` = diag(retained eigenvalues).  The gap
/// fields quantify how well-separated the cut is — the radical of the
/// underlying exact form is a sharp subspace, and a small gap would mean the
/// discretization cannot distinguish null directions from barely-positive
/// ones.
#[derive(Debug, Clone)]
pub struct QuotientModel {
    pub ambient_dim: usize,
    pub jform: FormMatrix,
    pub radical_basis: DMatrix<C64>,
    pub quotient_basis: DMatrix<C64>,
    /// Diagonal of the induced metric in quotient coordinates.
    pub induced_metric: DVector<f64>,
    /// Largest |eigenvalue| discarded into the radical (0 if none).
    pub discarded_abs_max: f64,
    /// Smallest eigenvalue retained in the quotient (∞ if empty).
    pub retained_min: f64,
}

impl QuotientModel {
    pub fn from_form(form: &FormMatrix, tol: f64) -> Result<Self, QuotientError> {
        let (eig_min, eig_max, verdict) = psd_report(form);
        if verdict == PsdVerdict::Indefinite {
            return Err(QuotientError::Radical { eig_min, eig_max });
        }
        let (eigs, vecs) = linalg::hermitian_eigen(&form.entries);
        let band = (tol * eig_max.abs()).max(RADICAL_FLOOR);
        let (mut rad_cols, mut quot_cols) = (Vec::new(), Vec::new());
        for k in 0..eigs.len() {
            if eigs[k].abs() <= band {
                rad_cols.push(k);
            } else {
                quot_cols.push(k);
            }
        }
        let discarded_abs_max = rad_cols.iter().map(|&k| eigs[k].abs()).fold(0.0, f64::max);
        let retained_min = quot_cols
            .iter()
            .map(|&k| eigs[k])
            .fold(f64::INFINITY, f64::min);
        Ok(QuotientModel {
            ambient_dim: form.dim(),
            jform: form.clone(),
            radical_basis: vecs.select_columns(&rad_cols),
            quotient_basis: vecs.select_columns(&quot_cols),
            induced_metric: DVector::from_iterator(
                quot_cols.len(),
                quot_cols.iter().map(|&k| eigs[k]),
            ),
            discarded_abs_max,
            retained_min,
        })
    }

    pub fn quotient_dim(&self) -> usize {
        self.quotient_basis.ncols()
    }

    /// Ratio of the smallest kept to the largest discarded eigenvalue; large
    /// values mean the radical cut is unambiguous.
    pub fn spectral_gap(&self) -> f64 {
        if self.quotient_dim() == 0 {
            return f64::INFINITY;
        }
        self.retained_min / self.discarded_abs_max.max(RADICAL_FLOOR)
    }

    /// The whitener W = V·Λ^{−1/2}: columns map quotient coordinates to the
    /// ambient space so that W*·F₀·W = I.
    pub fn whitener(&self) -> DMatrix<C64> {
        let mut w = self.quotient_basis.clone();
        for (j, lambda) in self.induced_metric.iter().enumerate() {
            let scale = C64::new(1.0 / lambda.sqrt(), 0.0);
            w.column_mut(j).scale_mut(scale.re);
        }
        w
    }

    /// Induced operator of a motion, from its mixed form M_ij = ⟨φ_i, Jγφ_j⟩,
    /// in whitened coordinates (where the induced metric is the identity, so
    /// spectral norm = induced-metric operator norm).
    pub fn whitened_rep(&self, mixed: &DMatrix<C64>) -> DMatrix<C64> {
        let w = self.whitener();
        w.adjoint() * mixed * &w
    }

    /// Spectral norm of a moved form restricted to the radical: nonzero
    /// values mean the motion leaks J-norm out of null directions.
    pub fn radical_violation(&self, moved_form: &FormMatrix) -> f64 {
        if self.radical_basis.ncols() == 0 {
            return 0.0;
        }
        let r = &self.radical_basis;
        linalg::spectral_norm(&(r.adjoint() * &moved_form.entries * r))
    }
}

/// The contraction bound for an induced operator, computed from the base
/// form F₀ and the moved form Fγ_ij = ⟨γφ_i, Jγφ_j⟩: gamma_norm is the
/// largest generalized eigenvalue of (Fγ, F₀) on the radical complement,
/// and the verdict checks gamma_norm ≤ 1 + tol — for J-selfadjoint unitary
/// motions the bound constant is exactly one.  The radical band is the one
/// F₀ was assembled with (its `tolerance`): whoever built the form knows its
/// noise floor, and whitening divides by the retained eigenvalues, so a band
/// below that floor turns noise into spurious contraction violations.
pub fn contraction_check(
    f0: &FormMatrix,
    fg: &FormMatrix,
    tol: f64,
) -> Result<(f64, bool), QuotientError> {
    let model = QuotientModel::from_form(f0, f0.tolerance)?;
    if model.quotient_dim() == 0 {
        return Ok((0.0, true));
    }
    let s = model.whitened_rep(&fg.entries);
    let (eigs, _) = linalg::hermitian_eigen(&s);
    let gamma_norm = eigs[eigs.len() - 1];
    Ok((gamma_norm, gamma_norm <= 1.0 + tol))
}

/// Data protocol for the product law: everything is expressed through forms
/// over one fixed family φ.  The motions must be J-selfadjoint with
/// nonnegative J-spectrum (true for the contraction semigroups this engine
/// serves), so that the induced operator of γ is recovered from the moved
/// form as Γ = sqrt(W*·Fγ·W), while the cross data
/// cross_ij = ⟨γ₂φ_i, Jγ₁φ_j⟩ directly represents the product:
/// W*·cross†·W = induced operator of γ₁γ₂.
pub struct SemigroupLawData<'a> {
    pub f0: &'a FormMatrix,
    pub fg1: &'a FormMatrix,
    pub fg2: &'a FormMatrix,
    pub fg1g2: &'a FormMatrix,
    pub cross: &'a DMatrix<C64>,
}

/// Operator-norm difference, in the induced metric, between the induced
/// operator of γ₁γ₂ and the product of the induced operators of γ₁ and γ₂.
/// Every moved form must vanish on the radical of F₀ (the motions must map
/// null directions to null directions) or the induced operators are not
/// well-defined in the first place.
pub fn semigroup_law_check(data: &SemigroupLawData, tol: f64) -> Result<f64, QuotientError> {
    let model = QuotientModel::from_form(data.f0, data.f0.tolerance)?;
    for (which, fg) in [
        ("γ₁", data.fg1),
        ("γ₂", data.fg2),
        ("γ₁γ₂", data.fg1g2),
    ] {
        let violation = model.radical_violation(fg);
        let scale = 1.0_f64.max(fg.eig_max.abs());
        if violation > tol * scale {
            return Err(QuotientError::Invariance { which: which.to_string(), violation });
        }
    }
    if model.quotient_dim() == 0 {
        return Ok(0.0);
    }
    let (gamma1, defect1) = linalg::psd_sqrt(&model.whitened_rep(&data.fg1.entries));
    let (gamma2, defect2) = linalg::psd_sqrt(&model.whitened_rep(&data.fg2.entries));
    debug_assert!(defect1 < 1e-6 && defect2 < 1e-6, "moved form not J-positive");
    let gamma12 = model.whitened_rep(&data.cross.adjoint());
    Ok(linalg::spectral_norm(&(gamma12 - gamma1 * gamma2)))
}

/// Generator data extracted from a three-point semigroup sample
/// {F(0), F(δ), F(2δ)}: eigenvalues λ_k (sorted ascending), the unitary
/// eigenbasis B of the step operator in whitened coordinates, and the
/// induced metric Λ — enough to evaluate the dual unitary group.
#[derive(Debug, Clone)]
pub struct GeneratorModel {
    pub lambdas: Vec<f64>,
    /// Unitary eigenbasis of the semigroup step, whitened coordinates.
    pub eigenbasis: DMatrix<C64>,
    /// Diagonal of the induced metric on the quotient.
    pub metric: DVector<f64>,
    /// Worst disagreement between the δ and 2δ eigenvalue estimates.
    pub richardson_gap: f64,
}

fn step_log_eigs(
    model: &QuotientModel,
    form: &FormMatrix,
    t: f64,
) -> Result<(Vec<f64>, DMatrix<C64>), QuotientError> {
    let s = model.whitened_rep(&form.entries);
    let (mus, vecs) = linalg::hermitian_eigen(&s);
    let mut lambdas = Vec::with_capacity(mus.len());
    for &mu in mus.iter() {
        if mu <= 0.0 {
            return Err(QuotientError::Degenerate(mu));
        }
        lambdas.push(mu.ln() / t);
    }
    Ok((lambdas, vecs))
}

/// Extract the generator spectrum of a contraction family from the grid
/// {0, δ, 2δ}: eigenvalues λ_k of the generalized problem
/// F(δ)·v = e^{λδ}·F(0)·v on the quotient, cross-checked against the same
/// quantity from the 2δ step (the two estimates agree exactly for a true
/// semigroup, so their gap measures data quality, not discretization order).
pub fn generator_model(
    f0: &FormMatrix,
    f_delta: &FormMatrix,
    f_2delta: &FormMatrix,
    delta: f64,
    tol: f64,
) -> Result<GeneratorModel, QuotientError> {
    assert!(delta > 0.0, "step must be positive");
    let model = QuotientModel::from_form(f0, f0.tolerance)?;
    if model.quotient_dim() == 0 {
        return Ok(GeneratorModel {
            lambdas: Vec::new(),
            eigenbasis: DMatrix::zeros(0, 0),
            metric: DVector::zeros(0),
            richardson_gap: 0.0,
        });
    }
    let (mut lambdas, vecs) = step_log_eigs(&model, f_delta, delta)?;
    let (mut check, _) = step_log_eigs(&model, f_2delta, 2.0 * delta)?;
    lambdas.sort_by(f64::total_cmp);
    check.sort_by(f64::total_cmp);
    let richardson_gap = lambdas
        .iter()
        .zip(&check)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let allowed = 10.0 * tol;
    if richardson_gap > allowed {
        return Err(QuotientError::Convergence { disagreement: richardson_gap, allowed });
    }
    // Re-derive the eigenbasis in the sorted order of the δ-step eigenvalues.
    let s = model.whitened_rep(&f_delta.entries);
    let (mus, basis) = linalg::hermitian_eigen(&s);
    debug_assert!(mus.iter().zip(mus.iter().skip(1)).all(|(a, b)| a <= b));
    let _ = vecs;
    Ok(GeneratorModel {
        lambdas,
        eigenbasis: basis,
        metric: model.induced_metric.clone(),
        richardson_gap,
    })
}

/// Sorted generator eigenvalues of the family (see `generator_model`).
pub fn generator_spectrum(
    f0: &FormMatrix,
    f_delta: &FormMatrix,
    f_2delta: &FormMatrix,
    delta: f64,
    tol: f64,
) -> Result<Vec<f64>, QuotientError> {
    Ok(generator_model(f0, f_delta, f_2delta, delta, tol)?.lambdas)
}

impl GeneratorModel {
    pub fn quotient_dim(&self) -> usize {
        self.lambdas.len()
    }

    /// The induced metric as a matrix on quotient coordinates.
    pub fn metric_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.metric.len(), self.metric.len(), |i, j| {
            if i == j {
                C64::new(self.metric[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }
}

/// The dual one-parameter unitary group U(t) = exp(it·D) built from the
/// generator spectrum, expressed in quotient coordinates: U(t) has
/// eigenvalues e^{iλ_k t} and preserves the induced metric exactly,
/// U(t)*·Λ·U(t) = Λ — the spectrum of the contraction generator is real, so
/// rotating it to the imaginary axis produces a unitary group.
pub fn dual_unitary(model: &GeneratorModel, t: f64) -> DMatrix<C64> {
    let n = model.quotient_dim();
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, model.lambdas[i] * t)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let b = &model.eigenbasis;
    let u_whitened = b * phases * b.adjoint();
    // Conjugate back from whitened to metric coordinates.
    let mut u = u_whitened;
    for i in 0..n {
        for j in 0..n {
            let scale = (model.metric[j] / model.metric[i]).sqrt();
            u[(i, j)] *= scale;
        }
    }
    u
}

/// A finite measure space with a measure-preserving involution θ: the
/// discrete stage for the fixed-point construction.  J f = f∘θ is then a
/// unitary period-2 operator on the weighted ℓ².
#[derive(Debug, Clone)]
pub struct FiniteReflectionSpace {
    pub weights: Vec<f64>,
    pub theta: Vec<usize>,
}

impl FiniteReflectionSpace {
    pub fn new(weights: Vec<f64>, theta: Vec<usize>) -> Result<Self, QuotientError> {
        let n = weights.len();
        if theta.len() != n {
            return Err(QuotientError::Space(format!(
                "θ permutes {} points but there are {} weights",
                theta.len(),
                n
            )));
        }
        for (i, &j) in theta.iter().enumerate() {
            if j >= n {
                return Err(QuotientError::Space(format!("θ({i}) = {j} out of range")));
            }
            if theta[j] != i {
                return Err(QuotientError::Space(format!(
                    "θ is not an involution at point {i}"
                )));
            }
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w > 0.0) {
                return Err(QuotientError::Space(format!("weight {w} at point {i}")));
            }
            let wj = weights[theta[i]];
            if (w - wj).abs() > 1e-12 * w.max(wj) {
                return Err(QuotientError::Space(format!(
                    "measure not θ-invariant at point {i}: {w} vs {wj}"
                )));
            }
        }
        Ok(FiniteReflectionSpace { weights, theta })
    }

    pub fn point_count(&self) -> usize {
        self.weights.len()
    }

    /// The matrix of J f = f∘θ on the weighted ℓ² (a symmetric permutation,
    /// unitary because the weights are θ-invariant).
    pub fn j_matrix(&self) -> DMatrix<f64> {
        let n = self.point_count();
        DMatrix::from_fn(n, n, |i, j| if self.theta[j] == i { 1.0 } else { 0.0 })
    }
}

/// The maximal positive subspace of a finite reflection space.
#[derive(Debug, Clone)]
pub struct PhillipsSubspace {
    /// Fixed points of θ, ascending.
    pub m0: Vec<usize>,
    /// Chosen transversal of the moved points, ascending.
    pub a: Vec<usize>,
    /// θ(A), the discarded half.
    pub b: Vec<usize>,
    /// Indicator basis of K₀ = span{e_i : i ∈ M₀ ∪ A}, M₀ columns first.
    pub indicators: DMatrix<f64>,
    /// The J-form restricted to K₀: diagonal, w_i on M₀ columns, 0 on A.
    pub jform_on_k0: FormMatrix,
}

/// Split the space along θ and build the positive subspace
/// K₀ = ℓ²(M₀ ∪ A): on it the J-form ⟨f, f∘θ⟩ collapses to ∑_{M₀} w|f|²,
/// which is PSD with radical exactly ℓ²(A) — the quotient lives entirely on
/// the fixed points.  `selection`, when given, must pick one point from each
/// θ-orbit of moved points; the default takes the lower index.
pub fn phillips_subspace(
    space: &FiniteReflectionSpace,
    selection: Option<&[usize]>,
) -> Result<PhillipsSubspace, QuotientError> {
    let n = space.point_count();
    let m0: Vec<usize> = (0..n).filter(|&i| space.theta[i] == i).collect();
    let a: Vec<usize> = match selection {
        None => (0..n).filter(|&i| space.theta[i] > i).collect(),
        Some(sel) => {
            let mut seen = vec![false; n];
            for &i in sel {
                if i >= n {
                    return Err(QuotientError::Partition(format!("point {i} out of range")));
                }
                if space.theta[i] == i {
                    return Err(QuotientError::Partition(format!(
                        "point {i} is θ-fixed, not in the moved set"
                    )));
                }
                if seen[i] || seen[space.theta[i]] {
                    return Err(QuotientError::Partition(format!(
                        "orbit of point {i} selected twice"
                    )));
                }
                seen[i] = true;
                seen[space.theta[i]] = true;
            }
            let uncovered = (0..n).find(|&i| space.theta[i] != i && !seen[i]);
            if let Some(i) = uncovered {
                return Err(QuotientError::Partition(format!(
                    "orbit of moved point {i} not covered"
                )));
            }
            let mut sorted = sel.to_vec();
            sorted.sort_unstable();
            sorted
        }
    };
    let b: Vec<usize> = a.iter().map(|&i| space.theta[i]).collect();
    let k = m0.len() + a.len();
    let mut indicators = DMatrix::<f64>::zeros(n, k);
    let mut diag = DVector::<f64>::zeros(k);
    for (col, &i) in m0.iter().chain(a.iter()).enumerate() {
        indicators[(i, col)] = 1.0;
        diag[col] = if space.theta[i] == i { space.weights[i] } else { 0.0 };
    }
    let jform_on_k0 = FormMatrix::from_real(DMatrix::from_diagonal(&diag), RADICAL_TOL);
    Ok(PhillipsSubspace { m0, a, b, indicators, jform_on_k0 })
}

/// Report of the reflection-symmetry and positivity axioms on a concrete
/// finite model: J² = id, the intertwining relation Jπ(g) = π(τ(g))J on the
/// sampled elements, positivity of the J-form on K₀, and invariance of K₀
/// under the sampled semigroup motions.
#[derive(Debug, Clone)]
pub struct PrAxiomReport {
    pub r1_defect: f64,
    pub r2_defect: f64,
    pub pr3_eig_min: f64,
    pub pr3_eig_max: f64,
    pub invariance_defect: f64,
    pub r1: bool,
    pub r2: bool,
    pub pr3: bool,
    pub k0_invariant: bool,
}

impl PrAxiomReport {
    pub fn all_pass(&self) -> bool {
        self.r1 && self.r2 && self.pr3 && self.k0_invariant
    }
}

/// Check the axioms on matrices: `pi_pairs` lists (π(g), π(τ(g))) for the
/// sampled group elements, `k0` spans the distinguished subspace, and
/// `motions` are the semigroup elements expected to preserve it.
pub fn pr_axiom_check(
    j: &DMatrix<C64>,
    pi_pairs: &[(DMatrix<C64>, DMatrix<C64>)],
    k0: &DMatrix<C64>,
    motions: &[DMatrix<C64>],
    tol: f64,
) -> PrAxiomReport {
    let n = j.nrows();
    let r1_defect = linalg::spectral_norm(&(j * j - DMatrix::<C64>::identity(n, n)));
    let r2_defect = pi_pairs
        .iter()
        .map(|(pi_g, pi_tau_g)| linalg::spectral_norm(&(j * pi_g - pi_tau_g * j)))
        .fold(0.0, f64::max);
    let form = FormMatrix::new(k0.adjoint() * j * k0, RADICAL_TOL);
    let (pr3_eig_min, pr3_eig_max, verdict) = psd_report(&form);
    let basis = linalg::orthonormal_columns(k0, 1e-12);
    let invariance_defect = motions
        .iter()
        .map(|m| {
            let moved = linalg::orthonormal_columns(&(m * k0), 1e-12);
            linalg::residual_outside_span(&basis, &moved)
        })
        .fold(0.0, f64::max);
    PrAxiomReport {
        r1_defect,
        r2_defect,
        pr3_eig_min,
        pr3_eig_max,
        invariance_defect,
        r1: r1_defect <= tol,
        r2: r2_defect <= tol,
        pr3: verdict != PsdVerdict::Indefinite,
        k0_invariant: invariance_defect <= tol,
    }
}
