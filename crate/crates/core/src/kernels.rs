//! Positive-definite kernels, quadrature, Gram-form assembly, and PSD
//! diagnostics.
//!
//! The two-point kernels |1−xy|^{s−1} and |x−y|^{s−1} on the interval, and
//! the Bergman-type kernel (1−z·w̄)^{−λ} on the disk, are sampled against
//! smooth compactly supported bump families to produce Gram matrices whose
//! spectra decide positivity.  A Gauss–Legendre tensor grid does the
//! integration; `FormMatrix` carries the assembled form together with its
//! spectral summary and the dimension of its numerical radical.  The module
//! also tabulates the two classical constants for the Cayley-type symmetric
//! spaces: the complementary-series radius `cayley_r` and the highest-weight
//! existence threshold `cayley_lpos`.

use crate::linalg::{self, C64};
use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    /// The kernel has a non-integrable pole at the requested point.
    #[error("kernel singularity at (x, y) = ({x}, {y})")]
    Singularity { x: f64, y: f64 },
    /// A symmetric-space tag carries a malformed parameter.
    #[error("invalid symmetric-space parameter: {0}")]
    Domain(String),
}

/// Nodes and weights of a quadrature rule on an interval.  Weights are
/// positive and sum to the interval length; nodes are strictly increasing
/// and strictly interior.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    interval: (f64, f64),
}

impl QuadratureRule {
    /// Gauss–Legendre rule of the given order on [lo, hi], by eigensolving
    /// the Jacobi matrix (Golub–Welsch): nodes are its eigenvalues, weights
    /// are 2·(first eigenvector component)², rescaled to the interval.
    pub fn gauss_legendre(order: usize, lo: f64, hi: f64) -> Self {
        assert!(order >= 1, "quadrature order must be positive");
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        let mut jacobi = DMatrix::<f64>::zeros(order, order);
        for k in 1..order {
            let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
            jacobi[(k - 1, k)] = b;
            jacobi[(k, k - 1)] = b;
        }
        let eig = nalgebra::SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..order)
            .map(|j| {
                let first = eig.eigenvectors[(0, j)];
                (eig.eigenvalues[j], 2.0 * first * first)
            })
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        QuadratureRule {
            nodes: pairs.iter().map(|&(t, _)| mid + half * t).collect(),
            weights: pairs.iter().map(|&(_, w)| half * w).collect(),
            interval: (lo, hi),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    /// ∫ f over the interval.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// The same rule mapped affinely onto [lo, hi].
    pub fn rescaled(&self, lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty interval [{lo}, {hi}]");
        let (slo, shi) = self.interval;
        let stretch = (hi - lo) / (shi - slo);
        QuadratureRule {
            nodes: self.nodes.iter().map(|&x| lo + (x - slo) * stretch).collect(),
            weights: self.weights.iter().map(|&w| w * stretch).collect(),
            interval: (lo, hi),
        }
    }
}

/// Normalized C∞ bump profile: exp(−1/(1−u²)) for |u| < 1, zero outside.
pub fn bump_profile(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (-1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// A family of translated C∞ bumps x ↦ exp(−1/(1−u²)), u = (x−cᵢ)/width.
/// Every member vanishes identically outside `support`, so the family can be
/// evaluated in closed form anywhere — in particular at points moved by a
/// group action — without interpolation error.
#[derive(Debug, Clone)]
pub struct BumpBasis {
    centers: Vec<f64>,
    width: f64,
    support: (f64, f64),
}

impl BumpBasis {
    /// The default family used throughout: 12 bumps, centers equi-spaced in
    /// [−0.8, 0.8], width 0.15 (support [−0.95, 0.95] ⊂ (−1,1)).
    pub fn standard() -> Self {
        Self::equispaced(12, 0.8, 0.15)
    }

    /// `count` bumps with centers equi-spaced in [−reach, reach].
    pub fn equispaced(count: usize, reach: f64, width: f64) -> Self {
        assert!(count >= 1);
        let centers = if count == 1 {
            vec![0.0]
        } else {
            (0..count)
                .map(|i| -reach + 2.0 * reach * i as f64 / (count - 1) as f64)
                .collect()
        };
        Self::new(centers, width)
    }

    pub fn new(centers: Vec<f64>, width: f64) -> Self {
        assert!(width > 0.0);
        assert!(!centers.is_empty());
        let lo = centers.iter().cloned().fold(f64::INFINITY, f64::min) - width;
        let hi = centers.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + width;
        BumpBasis { centers, width, support: (lo, hi) }
    }

    pub fn count(&self) -> usize {
        self.centers.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// Value of the i-th bump at x.
    pub fn eval(&self, i: usize, x: f64) -> f64 {
        bump_profile((x - self.centers[i]) / self.width)
    }

    /// Sample matrix B with B[a][i] = φ_i(node_a).
    pub fn eval_matrix(&self, nodes: &[f64]) -> DMatrix<f64> {
        DMatrix::from_fn(nodes.len(), self.count(), |a, i| self.eval(i, nodes[a]))
    }
}

/// Default spectral tolerance for assembled forms: Gram matrices of smooth
/// kernels are near-rank-deficient, so thresholds are relative to eig_max.
pub const FORM_TOL: f64 = 1e-9;

/// Absolute floor under the relative radical threshold, so the zero matrix
/// is classified as all-radical rather than dividing by its own scale.
pub const RADICAL_FLOOR: f64 = 1e-12;

/// Largest allowed Hermitian defect (relative) at `FormMatrix` construction.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// A Hermitian form sampled on a finite family, with its spectral summary.
///
/// `radical_dim` counts eigenvalues in the band |λ| ≤ max(tolerance·|eig_max|,
/// `RADICAL_FLOOR`) — the numerical radical of the form.
#[derive(Debug, Clone)]
pub struct FormMatrix {
    pub entries: DMatrix<C64>,
    pub tolerance: f64,
    pub eig_min: f64,
    pub eig_max: f64,
    pub radical_dim: usize,
}

impl FormMatrix {
    /// Wrap a Hermitian matrix, computing the spectral fields.  Panics if the
    /// input fails the Hermitian check (relative defect > 1e−12): that is a
    /// programming error in the assembly, not a data condition.
    pub fn new(entries: DMatrix<C64>, tolerance: f64) -> Self {
        let (herm, defect) = linalg::hermitian_part(&entries);
        let scale = 1.0_f64.max(herm.iter().map(|z| z.norm()).fold(0.0, f64::max));
        assert!(
            defect <= HERMITIAN_TOL * scale,
            "form matrix is not Hermitian: defect {defect:.3e} at scale {scale:.3e}"
        );
        let (eigs, _) = linalg::hermitian_eigen(&herm);
        let eig_min = eigs[0];
        let eig_max = eigs[eigs.len() - 1];
        let band = (tolerance * eig_max.abs()).max(RADICAL_FLOOR);
        let radical_dim = eigs.iter().filter(|l| l.abs() <= band).count();
        FormMatrix { entries: herm, tolerance, eig_min, eig_max, radical_dim }
    }

    pub fn from_real(entries: DMatrix<f64>, tolerance: f64) -> Self {
        Self::new(linalg::complexify(&entries), tolerance)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }
}

/// Verdict of the PSD test, with `Zero` for forms whose whole spectrum sits
/// inside the radical band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsdVerdict {
    Psd,
    Indefinite,
    Zero,
}

impl std::fmt::Display for PsdVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PsdVerdict::Psd => write!(f, "PSD"),
            PsdVerdict::Indefinite => write!(f, "indefinite"),
            PsdVerdict::Zero => write!(f, "zero"),
        }
    }
}

/// Spectral summary of a form: PSD iff eig_min ≥ −tol·max(1, |eig_max|).
pub fn psd_report(form: &FormMatrix) -> (f64, f64, PsdVerdict) {
    let verdict = if form.radical_dim == form.dim() {
        PsdVerdict::Zero
    } else if form.eig_min >= -form.tolerance * 1.0_f64.max(form.eig_max.abs()) {
        PsdVerdict::Psd
    } else {
        PsdVerdict::Indefinite
    };
    (form.eig_min, form.eig_max, verdict)
}

/// The interval kernel |1−xy|^{s−1}.  Positive definite on (−1,1) exactly
/// for 0 < s < 1; still evaluable for any s as long as xy ≠ 1.
pub fn kernel_j(x: f64, y: f64, s: f64) -> Result<f64, KernelError> {
    let h = 1.0 - x * y;
    if h == 0.0 && s < 1.0 {
        return Err(KernelError::Singularity { x, y });
    }
    Ok(h.abs().powf(s - 1.0))
}

/// The convolution kernel |x−y|^{s−1} (weakly singular on the diagonal for
/// s < 1).
pub fn kernel_a(x: f64, y: f64, s: f64) -> Result<f64, KernelError> {
    if x == y && s < 1.0 {
        return Err(KernelError::Singularity { x, y });
    }
    Ok((x - y).abs().powf(s - 1.0))
}

/// Gram matrix G_ij = (1 − z_i·conj(z_j))^{−λ} on points of the unit disk.
/// The base 1 − z·w̄ has positive real part for |z|,|w| < 1, so the principal
/// power keeps the matrix Hermitian; the form is PSD exactly when λ ≥ 0.
pub fn bergman_gram(points: &[C64], lambda: f64) -> FormMatrix {
    for z in points {
        assert!(z.norm() < 1.0, "Bergman point {z} outside the open disk");
    }
    let n = points.len();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        (C64::new(1.0, 0.0) - points[i] * points[j].conj()).powf(-lambda)
    });
    FormMatrix::new(entries, FORM_TOL)
}

/// Assemble the two-point form F_ij = ∬ φ_i(x)·K(x,y)·φ_j(y) dx dy by tensor
/// quadrature.  The basis support must sit inside the quadrature interval so
/// nothing escapes the grid.
///
/// Each entry is integrated on its own support rectangle
/// [cᵢ−w, cᵢ+w] × [cⱼ−w, cⱼ+w] with the template rule mapped onto the two
/// axes: a single global grid of any practical order under-resolves the
/// narrow bumps by several decades, while support-aligned panels of the
/// default order 80 are converged to machine precision.
pub fn gram_form<K>(
    basis: &BumpBasis,
    kernel: K,
    quad: &QuadratureRule,
) -> Result<FormMatrix, KernelError>
where
    K: Fn(f64, f64) -> Result<f64, KernelError>,
{
    gram_form_tagged(basis, kernel, quad, FORM_TOL)
}

/// `gram_form` with an explicit radical band for the resulting matrix, for
/// callers whose downstream quotient needs a band matched to their own noise
/// floor rather than the default.
pub fn gram_form_tagged<K>(
    basis: &BumpBasis,
    kernel: K,
    quad: &QuadratureRule,
    tolerance: f64,
) -> Result<FormMatrix, KernelError>
where
    K: Fn(f64, f64) -> Result<f64, KernelError>,
{
    let (lo, hi) = quad.interval();
    let (slo, shi) = basis.support();
    // The bumps vanish to all orders at the support edge, so a few ulps of
    // slack on the inclusion lose nothing.
    assert!(
        slo >= lo - 1e-12 && shi <= hi + 1e-12,
        "basis support [{slo}, {shi}] escapes the quadrature interval [{lo}, {hi}]"
    );
    let m = basis.count();
    let w = basis.width();
    // Per-bump panel rules and the weighted bump samples on them.  The bump
    // profile at its own panel nodes is the same for every bump, but the
    // kernel needs the actual node positions.
    let panels: Vec<QuadratureRule> = basis
        .centers()
        .iter()
        .map(|&c| quad.rescaled(c - w, c + w))
        .collect();
    let weighted: Vec<Vec<f64>> = panels
        .iter()
        .enumerate()
        .map(|(i, p)| {
            p.nodes()
                .iter()
                .zip(p.weights())
                .map(|(&x, &wq)| wq * basis.eval(i, x))
                .collect()
        })
        .collect();
    let mut form = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let mut acc = 0.0;
            for (a, &wa) in weighted[i].iter().enumerate() {
                let x = panels[i].nodes()[a];
                let mut row = 0.0;
                for (b, &wb) in weighted[j].iter().enumerate() {
                    row += wb * kernel(x, panels[j].nodes()[b])?;
                }
                acc += wa * row;
            }
            form[(i, j)] = acc;
            form[(j, i)] = acc;
        }
    }
    Ok(FormMatrix::from_real(form, tolerance))
}

/// Tags for the Cayley-type symmetric spaces appearing in the two constant
/// tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleySpace {
    /// SU(n,n)
    SuNn { n: u32 },
    /// SO*(4n)
    SoStar4n { n: u32 },
    /// Sp(n,ℝ)
    SpNr { n: u32 },
    /// SO₀(n,2)
    SoN2 { n: u32 },
    /// E₇(−25)
    E7Minus25,
}

impl CayleySpace {
    fn check_param(&self) -> Result<(), KernelError> {
        let n = match self {
            CayleySpace::SuNn { n }
            | CayleySpace::SoStar4n { n }
            | CayleySpace::SpNr { n }
            | CayleySpace::SoN2 { n } => *n,
            CayleySpace::E7Minus25 => return Ok(()),
        };
        if n == 0 {
            return Err(KernelError::Domain(format!("{self:?} needs n ≥ 1")));
        }
        Ok(())
    }
}

/// The complementary-series radius R: the invariant form twisted by the
/// standard intertwiner stays positive definite for |ν| < R (R = 0 marks an
/// empty complementary range for that family).
pub fn cayley_r(space: CayleySpace) -> Result<f64, KernelError> {
    space.check_param()?;
    Ok(match space {
        CayleySpace::SuNn { n } => {
            if n % 2 == 1 {
                f64::from(n)
            } else {
                0.0
            }
        }
        CayleySpace::SoStar4n { n } => f64::from(n),
        CayleySpace::SpNr { n } => {
            if n % 2 == 0 {
                f64::from(n) / 2.0
            } else {
                0.0
            }
        }
        CayleySpace::SoN2 { n } => match n % 4 {
            0 => 0.0,
            1 | 3 => 1.0,
            _ => 2.0,
        },
        CayleySpace::E7Minus25 => 3.0,
    })
}

/// The highest-weight existence threshold: the unitary highest-weight family
/// exists for ν ≤ this value.  Always at least `cayley_r`, so the whole
/// complementary range [−R, R] is covered.
pub fn cayley_lpos(space: CayleySpace) -> Result<f64, KernelError> {
    space.check_param()?;
    let value = match space {
        CayleySpace::SuNn { n } => f64::from(n),
        CayleySpace::SoStar4n { n } => f64::from(2 * n),
        CayleySpace::SpNr { n } => f64::from(n),
        CayleySpace::SoN2 { .. } => 2.0,
        CayleySpace::E7Minus25 => 3.0,
    };
    debug_assert!(value >= cayley_r(space)?);
    Ok(value)
}

/// The rank/multiplicity form of the existence threshold: −γ(r−1)d/2.
pub fn lpos_formula(gamma: f64, r: u32, d: u32) -> f64 {
    assert!(r >= 1, "rank must be positive");
    -gamma * f64::from(r - 1) * f64::from(d) / 2.0
}
