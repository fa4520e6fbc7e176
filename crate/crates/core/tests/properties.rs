//! Randomized structure properties that span modules: group-calculus
//! algebra under random elements, kernel sign dichotomies, quotient
//! monotonicity, and the axioms of the positivity pipeline at form level.

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use reflectlab_core::kernels::{bergman_gram, psd_report, BumpBasis, PsdVerdict, QuadratureRule};
use reflectlab_core::linalg;
use reflectlab_core::quotient::{phillips_subspace, FiniteReflectionSpace, QuotientModel};
use reflectlab_core::series::{
    dual_spectrum, jform, moved_jform, selfadjoint_residual, SeriesParameter,
};
use reflectlab_core::sl2::{
    exp_lie, nbar_factor, point_action, semigroup_contains, tau, theta, zeta, GroupElement,
    LieElement, SEMIGROUP_TOL,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

/// Random unimodular matrices: pick three entries, solve for the fourth.
fn unimodular() -> impl Strategy<Value = GroupElement> {
    (0.2_f64..2.0, -2.0_f64..2.0, -2.0_f64..2.0, proptest::bool::ANY).prop_map(
        |(a, b, c, flip)| {
            let a = if flip { -a } else { a };
            GroupElement::new(a, b, c, (1.0 + b * c) / a).expect("unimodular by construction")
        },
    )
}

/// Random interior contraction-semigroup elements h_t · exp(Y), Y in the
/// open cone.
fn semigroup_element() -> impl Strategy<Value = GroupElement> {
    (-0.6_f64..0.6, 0.05_f64..1.0, -0.8_f64..0.8).prop_map(|(t, r, frac)| {
        GroupElement::h(t).mul(&exp_lie(&LieElement::q(r, r * frac)))
    })
}

proptest! {
    /// The two involutions are homomorphisms and commute with each other.
    #[test]
    fn twist_algebra_holds_on_random_elements(g1 in unimodular(), g2 in unimodular()) {
        prop_assert!(tau(&tau(&g1)).dist_inf(&g1) <= 1e-12);
        prop_assert!(tau(&g1.mul(&g2)).dist_inf(&tau(&g1).mul(&tau(&g2))) <= 1e-12);
        prop_assert!(theta(&tau(&g1)).dist_inf(&tau(&theta(&g1))) <= 1e-12);
    }

    /// The chart factorization of s·n̄_x is a cocycle: its scale component
    /// multiplies along products and its point component composes.
    #[test]
    fn chart_factorization_is_a_cocycle(
        s_el in semigroup_element(),
        r_el in semigroup_element(),
        x in -0.9_f64..0.9,
    ) {
        let at = |g: &GroupElement, x: f64| {
            nbar_factor(&g.mul(&GroupElement::nbar(x))).expect("chart-defined")
        };
        let through_r = at(&r_el, x);
        let through_sr = at(&s_el.mul(&r_el), x);
        let s_after = at(&s_el, through_r.y);
        prop_assert!(close(
            through_sr.a.abs(),
            (s_after.a * through_r.a).abs(),
            1e-10 * (1.0 + through_sr.a.abs()),
        ));
        prop_assert!(close(through_sr.y, s_after.y, 1e-10));
        // The point component is exactly the boundary action.
        prop_assert!(close(
            through_sr.y,
            point_action(&s_el.mul(&r_el), x).expect("no pole inside the interval"),
            1e-10,
        ));
    }

    /// Products of interior semigroup elements stay in the semigroup.
    #[test]
    fn interior_products_stay_interior(g1 in semigroup_element(), g2 in semigroup_element()) {
        prop_assert!(semigroup_contains(&g1.mul(&g2), SEMIGROUP_TOL));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Gram matrices of the disc kernel change sign with the exponent:
    /// nonnegative powers are positive semidefinite, negative powers are
    /// indefinite on any separated configuration.
    #[test]
    fn disc_kernel_sign_dichotomy(
        polar in proptest::collection::vec((0.15_f64..0.85, 0.0_f64..std::f64::consts::TAU), 2..6)
            .prop_filter("separated points", |pts| {
                let z: Vec<C64> = pts.iter().map(|&(r, a)| C64::from_polar(r, a)).collect();
                z.iter().enumerate().all(|(i, p)| {
                    z.iter().skip(i + 1).all(|q| (p - q).norm() >= 0.1)
                })
            }),
        lambda_pos in 0.0_f64..3.0,
        lambda_neg in -3.0_f64..-0.05,
    ) {
        let points: Vec<C64> = polar.iter().map(|&(r, a)| C64::from_polar(r, a)).collect();
        let (_, _, pos) = psd_report(&bergman_gram(&points, lambda_pos));
        let (_, _, neg) = psd_report(&bergman_gram(&points, lambda_neg));
        prop_assert!(matches!(pos, PsdVerdict::Psd | PsdVerdict::Zero));
        prop_assert!(matches!(neg, PsdVerdict::Indefinite));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// The positivity pipeline holds together at form level across the
    /// parameter window: the form is positive semidefinite, interior
    /// motions act selfadjointly in it, and no motion expands the quotient.
    #[test]
    fn pipeline_axioms_hold_across_the_window(
        s_val in 0.1_f64..0.9,
        t in -0.4_f64..0.4,
        r in 0.1_f64..0.8,
        frac in -0.6_f64..0.6,
    ) {
        let s = SeriesParameter::new(s_val);
        let basis = BumpBasis::standard();
        let quad = QuadratureRule::gauss_legendre(60, -1.0, 1.0);

        let form = jform(s, &basis, &quad).expect("form");
        let (eig_min, eig_max, verdict) = psd_report(&form);
        prop_assert!(matches!(verdict, PsdVerdict::Psd | PsdVerdict::Zero),
            "eig_min {eig_min:.3e} vs eig_max {eig_max:.3e}");

        let y = LieElement::q(r, r * frac);
        let interior = exp_lie(&y);
        prop_assert!(selfadjoint_residual(&interior, s, &basis, &quad).expect("residual") <= 1e-7);

        let g = GroupElement::h(t).mul(&interior);
        let moved = moved_jform(&g, s, &basis, &quad).expect("moved form");
        let (gamma, contractive) =
            reflectlab_core::quotient::contraction_check(&form, &moved.form, 1e-6)
                .expect("contraction check");
        prop_assert!(contractive, "gamma {gamma}");
    }
}

/// Adding a bump to the family never shrinks the quotient: the radical
/// complement can only grow with the span.
#[test]
fn enlarging_the_family_never_shrinks_the_quotient() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let quad = QuadratureRule::gauss_legendre(60, -1.0, 1.0);
    for _ in 0..20 {
        let s = SeriesParameter::new(rng.random_range(0.2..0.8));
        let n = rng.random_range(4..10usize);
        let mut centers: Vec<f64> = Vec::new();
        while centers.len() < n {
            let c = rng.random_range(-0.8..0.8);
            if centers.iter().all(|&p| (p - c as f64).abs() >= 0.12) {
                centers.push(c);
            }
        }
        centers.sort_by(f64::total_cmp);
        let small = BumpBasis::new(centers[..n - 1].to_vec(), 0.15);
        let large = BumpBasis::new(centers.clone(), 0.15);

        let dim = |basis: &BumpBasis| {
            let form = jform(s, basis, &quad).expect("form");
            QuotientModel::from_form(&form, form.tolerance)
                .expect("model")
                .quotient_dim()
        };
        let (d_small, d_large) = (dim(&small), dim(&large));
        assert!(
            d_small <= d_large,
            "quotient shrank from {d_small} to {d_large} when a bump was added"
        );
    }
}

/// The fixed-group chart coordinate is tanh across the whole wide range.
#[test]
fn chart_coordinate_is_tanh_far_into_the_group() {
    for i in 0..=200 {
        let t = -10.0 + 0.1 * i as f64;
        let z = zeta(&GroupElement::h(t)).expect("chart-defined");
        assert!(
            close(z, t.tanh(), 1e-12),
            "zeta(h_{t}) = {z} vs tanh = {}",
            t.tanh()
        );
    }
}

/// Every cone direction yields a nonpositive induced generator spectrum;
/// the mirrored direction completes the pair tested elsewhere.
#[test]
fn mirrored_cone_direction_also_has_nonpositive_spectrum() {
    let basis = BumpBasis::standard();
    let quad = QuadratureRule::gauss_legendre(80, -1.0, 1.0);
    let y = LieElement::q(1.0, -1.0);
    for &s in &[0.25, 0.5, 0.75] {
        let lambdas = dual_spectrum(&y, SeriesParameter::new(s), &basis, &quad, 2e-7, 1e-4)
            .expect("spectrum");
        let worst = lambdas.last().copied().unwrap_or(0.0);
        assert!(worst <= 1e-6, "s = {s}: top eigenvalue {worst:.3e}");
    }
}

/// The distinguished subspace of a finite reflection model is preserved by
/// every multiplication operator constant on the involution's orbits.
#[test]
fn orbit_constant_multipliers_preserve_the_distinguished_subspace() {
    let mut rng = ChaCha12Rng::seed_from_u64(23);
    for _ in 0..20 {
        let n = rng.random_range(2..24usize);
        let mut theta_map: Vec<usize> = (0..n).collect();
        let pairs = rng.random_range(0..=n / 2);
        for p in 0..pairs {
            let (i, j) = (2 * p, 2 * p + 1);
            theta_map[i] = j;
            theta_map[j] = i;
        }
        let mut weights = vec![0.0; n];
        for i in 0..n {
            if weights[i] == 0.0 {
                let w = rng.random_range(0.2..2.0);
                weights[i] = w;
                weights[theta_map[i]] = w;
            }
        }
        let space = FiniteReflectionSpace::new(weights, theta_map.clone()).expect("space");
        let sub = phillips_subspace(&space, None).expect("subspace");
        if sub.indicators.ncols() == 0 {
            continue;
        }

        let k0 = linalg::complexify(&sub.indicators);
        let basis = linalg::orthonormal_columns(&k0, 1e-12);
        let mut diag = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            if diag[i] == C64::new(0.0, 0.0) {
                let v = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
                diag[i] = v;
                diag[theta_map[i]] = v;
            }
        }
        let moved = nalgebra::DMatrix::from_fn(n, k0.ncols(), |i, j| diag[i] * k0[(i, j)]);
        let moved_basis = linalg::orthonormal_columns(&moved, 1e-12);
        let residual = linalg::residual_outside_span(&basis, &moved_basis);
        assert!(
            residual <= 1e-12,
            "orbit-constant multiplier moved the subspace by {residual:.3e}"
        );
    }
}
