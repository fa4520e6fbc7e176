//! Small dense linear-algebra helpers shared by the model modules:
//! Hermitian eigensolves with sorted spectra, thin orthonormalization,
//! spectral norms, and PSD square roots.  Everything works on
//! `DMatrix<Complex<f64>>`; real symmetric data is promoted by the callers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub type C64 = Complex<f64>;

/// Promote a real matrix to complex entries.
pub fn complexify(m: &DMatrix<f64>) -> DMatrix<C64> {
    m.map(|x| C64::new(x, 0.0))
}

/// Hermitian part (A + Aᴴ)/2; the defect ‖A − Aᴴ‖∞ is returned alongside so
/// callers can enforce their own symmetry tolerance.
pub fn hermitian_part(a: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let adj = a.adjoint();
    let defect = (a - &adj).iter().map(|z| z.norm()).fold(0.0, f64::max);
    ((a + adj).scale(0.5), defect)
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted
/// ascending; columns of the returned matrix are the matching orthonormal
/// eigenvectors.
pub fn hermitian_eigen(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "hermitian_eigen needs a square matrix");
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let se = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[i].total_cmp(&se.eigenvalues[j]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &se.eigenvectors.column(i));
    }
    (values, vectors)
}

/// Largest singular value, computed as √λ_max(AᴴA).  Good enough for the
/// residual norms used here (matrices stay small).
pub fn spectral_norm(a: &DMatrix<C64>) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let gram = a.adjoint() * a;
    let (vals, _) = hermitian_eigen(&gram);
    vals[vals.len() - 1].max(0.0).sqrt()
}

/// Thin orthonormal basis for the column span, dropping directions below
/// `rank_tol` (relative to the largest column norm).
pub fn orthonormal_columns(a: &DMatrix<C64>, rank_tol: f64) -> DMatrix<C64> {
    let (n, m) = (a.nrows(), a.ncols());
    if m == 0 {
        return DMatrix::zeros(n, 0);
    }
    // Modified Gram–Schmidt with a second re-orthogonalization pass; QR in
    // nalgebra does not expose rank decisions for complex matrices directly.
    let scale = (0..m)
        .map(|j| a.column(j).norm())
        .fold(0.0_f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut basis: Vec<DVector<C64>> = Vec::new();
    for j in 0..m {
        let mut v: DVector<C64> = a.column(j).into_owned();
        for _ in 0..2 {
            for q in &basis {
                let coeff = q.dotc(&v);
                v -= q * coeff;
            }
        }
        if v.norm() > rank_tol * scale {
            let nrm = v.norm();
            basis.push(v.unscale(nrm));
        }
    }
    let mut out = DMatrix::zeros(n, basis.len());
    for (j, q) in basis.iter().enumerate() {
        out.set_column(j, q);
    }
    out
}

/// PSD square root of a Hermitian matrix; eigenvalues below zero are clamped
/// (they must be round-off for the inputs this is used on, and the largest
/// clamped magnitude is returned for diagnostics).
pub fn psd_sqrt(a: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
    let (vals, vecs) = hermitian_eigen(a);
    let clamped = vals.iter().map(|&v| (-v).max(0.0)).fold(0.0, f64::max);
    let sqrt_vals = DVector::from_iterator(vals.len(), vals.iter().map(|&v| v.max(0.0).sqrt()));
    let scaled = {
        let mut m = vecs.clone();
        for j in 0..m.ncols() {
            let s = C64::new(sqrt_vals[j], 0.0);
            let col = m.column(j) * s;
            m.set_column(j, &col);
        }
        m
    };
    (&scaled * vecs.adjoint(), clamped)
}

/// How far the columns of `moved` stick out of the span of the orthonormal
/// basis `q`: ‖(I − QQᴴ)·moved‖₂.  With unit columns this is the sine of the
/// largest principal angle between the spaces.
pub fn residual_outside_span(q: &DMatrix<C64>, moved: &DMatrix<C64>) -> f64 {
    let proj = q * (q.adjoint() * moved);
    spectral_norm(&(moved - proj))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigen_sorts_ascending_and_diagonalizes() {
        let a = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        let (vals, vecs) = hermitian_eigen(&a);
        assert!((vals[0] + 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let recon = &vecs
            * DMatrix::from_diagonal(&DVector::from_iterator(
                2,
                vals.iter().map(|&v| c(v, 0.0)),
            ))
            * vecs.adjoint();
        assert!(spectral_norm(&(recon - a)) < 1e-12);
    }

    #[test]
    fn eigen_handles_complex_hermitian() {
        // [[2, i],[−i, 2]] has eigenvalues 1 and 3.
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let (vals, _) = hermitian_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn psd_sqrt_squares_back() {
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let (s, clamped) = psd_sqrt(&a);
        assert!(clamped == 0.0);
        assert!(spectral_norm(&(&s * &s - a)) < 1e-12);
    }

    #[test]
    fn orthonormalize_drops_dependent_columns() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(1.0, 0.0),
                c(2.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
            ],
        );
        let q = orthonormal_columns(&a, 1e-12);
        assert_eq!(q.ncols(), 2);
        let gram = q.adjoint() * &q;
        assert!(spectral_norm(&(gram - DMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn span_residual_detects_motion() {
        let q = DMatrix::from_row_slice(2, 1, &[c(1.0, 0.0), c(0.0, 0.0)]);
        let inside = DMatrix::from_row_slice(2, 1, &[c(0.7, 0.1), c(0.0, 0.0)]);
        let outside = DMatrix::from_row_slice(2, 1, &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(residual_outside_span(&q, &inside) < 1e-15);
        assert!((residual_outside_span(&q, &outside) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spectral_norm_matches_hand_value() {
        let a = DMatrix::from_row_slice(2, 2, &[c(3.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-4.0, 0.0)]);
        assert!((spectral_norm(&a) - 4.0).abs() < 1e-12);
    }
}
