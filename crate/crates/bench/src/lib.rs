//! Shared fixture builders for the criterion benches.

use reflectlab_core::kernels::{BumpBasis, QuadratureRule};
use reflectlab_core::series::SeriesParameter;

/// The configuration every form bench runs against: mid-window parameter,
/// the standard bump family, and the default quadrature order.
pub fn form_fixture() -> (SeriesParameter, BumpBasis, QuadratureRule) {
    (
        SeriesParameter::new(0.5),
        BumpBasis::standard(),
        QuadratureRule::gauss_legendre(80, -1.0, 1.0),
    )
}
