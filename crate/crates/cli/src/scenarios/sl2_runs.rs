//! Scenarios driving the interval model: form positivity, contraction
//! under the semigroup, the induced generator spectrum, and the closed-form
//! identities behind the kernels.

use super::{rng, werr, write_csv, Outcome};
use crate::config::ResolvedConfig;
use crate::scenarios::ScenarioError;
use rand::Rng;
use reflectlab_core::kernels::{psd_report, BumpBasis, PsdVerdict, QuadratureRule};
use reflectlab_core::linalg;
use reflectlab_core::quotient::contraction_check;
use reflectlab_core::series::{
    dual_generator_model, jform, kernel_identity_check, moved_jform, SeriesParameter,
};
use reflectlab_core::sl2::{
    exp_lie, semigroup_contains, zeta, GroupElement, LieElement, SEMIGROUP_TOL,
};
use std::path::Path;

/// Eigenvalue panorama of the two-point form on a bump family: the window
/// 0 < s < 1 must come out positive semidefinite (modulo the quadrature
/// radical), anything outside goes indefinite.
pub(super) fn positivity(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let s = SeriesParameter::new(cfg.real("s"));
    let basis = BumpBasis::equispaced(cfg.count("bumps"), cfg.real("reach"), cfg.real("width"));
    let quad = QuadratureRule::gauss_legendre(cfg.count("quad_order"), -1.0, 1.0);
    let form = jform(s, &basis, &quad).map_err(werr(scen))?;
    let (eig_min, eig_max, verdict) = psd_report(&form);
    let (eigs, _) = linalg::hermitian_eigen(&form.entries);

    let mut outcome = Outcome::new();
    outcome.metric("eig_min", eig_min);
    outcome.metric("eig_max", eig_max);
    outcome.metric(
        "eig_ratio",
        if eig_max > 0.0 { eig_min / eig_max } else { 0.0 },
    );
    outcome.verdict("psd", matches!(verdict, PsdVerdict::Psd | PsdVerdict::Zero));
    outcome.verdict("inside_window", s.is_complementary());

    write_csv(
        out,
        "eigenvalues.csv",
        &["index", "eigenvalue"],
        eigs.iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), format!("{v:e}")]),
    )
    .map_err(werr(scen))?;
    outcome.artifact("eigenvalues.csv");
    Ok(outcome)
}

/// Random semigroup motions never expand the quotient form, and an almost
/// pure fixed-group motion drives the bound arbitrarily close to 1.
pub(super) fn contraction(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let s = SeriesParameter::new(cfg.real("s"));
    let basis = BumpBasis::standard();
    let quad = QuadratureRule::gauss_legendre(cfg.count("quad_order"), -1.0, 1.0);
    let f0 = jform(s, &basis, &quad).map_err(werr(scen))?;
    let draws = cfg.count("draws").max(1);
    let mut rng = rng(cfg.seed);

    let mut rows = Vec::with_capacity(draws);
    let mut gamma_max = f64::NEG_INFINITY;
    let mut gamma_min = f64::INFINITY;
    let mut boundary_gamma = 0.0;
    let mut all_contractive = true;
    for i in 0..draws {
        // Draw 0 is the sharpness witness: a motion that is almost purely
        // fixed-group (which acts isometrically on the quotient) with only
        // a whisper of cone flow, so its bound must sit just under 1.
        let (t_h, r, sigma) = if i == 0 {
            (0.35, 0.005, 0.001)
        } else {
            loop {
                let t_h = rng.random_range(-0.5..0.5);
                let r = rng.random_range(0.05..1.1);
                let sigma = r * rng.random_range(-0.85..0.85);
                let g = GroupElement::h(t_h).mul(&exp_lie(&LieElement::q(r, sigma)));
                if semigroup_contains(&g, SEMIGROUP_TOL) {
                    break (t_h, r, sigma);
                }
            }
        };
        let g = GroupElement::h(t_h).mul(&exp_lie(&LieElement::q(r, sigma)));
        let moved = moved_jform(&g, s, &basis, &quad).map_err(werr(scen))?;
        let (gamma, ok) = contraction_check(&f0, &moved.form, 1e-6).map_err(werr(scen))?;
        all_contractive &= ok;
        gamma_max = gamma_max.max(gamma);
        gamma_min = gamma_min.min(gamma);
        if i == 0 {
            boundary_gamma = gamma;
        }
        rows.push(vec![
            i.to_string(),
            format!("{t_h:.6}"),
            format!("{r:.6}"),
            format!("{sigma:.6}"),
            format!("{gamma:.12}"),
        ]);
    }

    let mut outcome = Outcome::new();
    outcome.metric("gamma_max", gamma_max);
    outcome.metric("gamma_min", gamma_min);
    outcome.metric("boundary_gamma", boundary_gamma);
    outcome.verdict("contractive", all_contractive);
    outcome.verdict("bound_sharp", boundary_gamma >= 0.99);
    write_csv(
        out,
        "contractions.csv",
        &["draw", "t_h", "r", "sigma", "gamma"],
        rows,
    )
    .map_err(werr(scen))?;
    outcome.artifact("contractions.csv");
    Ok(outcome)
}

/// Finite-difference generator of the induced one-parameter family for a
/// cone direction: every eigenvalue must be ≤ 0, and the two-step
/// Richardson probe must agree with the one-step value.
pub(super) fn dual_spectrum(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let s = SeriesParameter::new(cfg.real("s"));
    let y = match cfg.text("y") {
        "2X0" => LieElement::x0().scale(2.0),
        "q11" => LieElement::q(1.0, 1.0),
        other => {
            return Err(ScenarioError::new(
                scen,
                format!("unknown direction '{other}' (expected 2X0 or q11)"),
            ))
        }
    };
    let basis = BumpBasis::standard();
    let quad = QuadratureRule::gauss_legendre(cfg.count("quad_order"), -1.0, 1.0);
    let delta = cfg.real("delta");
    let tol = cfg.real("tol");
    let model = dual_generator_model(&y, s, &basis, &quad, delta, tol).map_err(werr(scen))?;

    let lambda_min = model.lambdas.first().copied().unwrap_or(0.0);
    let lambda_max = model.lambdas.last().copied().unwrap_or(0.0);
    let mut outcome = Outcome::new();
    outcome.metric("lambda_min", lambda_min);
    outcome.metric("lambda_max", lambda_max);
    outcome.metric("richardson_gap", model.richardson_gap);
    outcome.metric("quotient_dim", model.quotient_dim() as f64);
    outcome.verdict("spectrum_nonpositive", lambda_max <= 1e-6);
    outcome.verdict("difference_consistent", model.richardson_gap <= tol);

    write_csv(
        out,
        "spectrum.csv",
        &["index", "lambda"],
        model
            .lambdas
            .iter()
            .enumerate()
            .map(|(i, v)| vec![i.to_string(), format!("{v:e}")]),
    )
    .map_err(werr(scen))?;
    outcome.artifact("spectrum.csv");
    Ok(outcome)
}

/// The closed-form anchors: the ζ-chart of the fixed group is tanh, and the
/// two-point kernel factors through the group-side character.
pub(super) fn identities(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let t_max = cfg.real("t_max");
    let t_count = cfg.count("t_count").max(2);
    let pairs = cfg.count("pairs").max(1);
    let mut rng = rng(cfg.seed);

    let mut zeta_dev = 0.0_f64;
    let mut rows = Vec::with_capacity(t_count);
    for i in 0..t_count {
        let t = -t_max + 2.0 * t_max * i as f64 / (t_count - 1) as f64;
        let z = zeta(&GroupElement::h(t)).map_err(werr(scen))?;
        let dev = (z - t.tanh()).abs();
        zeta_dev = zeta_dev.max(dev);
        rows.push(vec![
            format!("{t:.6}"),
            format!("{z:.15}"),
            format!("{:.15}", t.tanh()),
            format!("{dev:e}"),
        ]);
    }

    let samples: Vec<(f64, f64)> = (0..pairs)
        .map(|_| {
            (
                rng.random_range(-0.99..0.99),
                rng.random_range(-0.99..0.99),
            )
        })
        .collect();
    let mut kernel_dev = 0.0_f64;
    for &s in &[0.3, 0.5, 0.8] {
        let dev = kernel_identity_check(SeriesParameter::new(s), &samples).map_err(werr(scen))?;
        kernel_dev = kernel_dev.max(dev);
    }

    let mut outcome = Outcome::new();
    outcome.metric("zeta_deviation", zeta_dev);
    outcome.metric("kernel_deviation", kernel_dev);
    outcome.verdict("zeta_is_tanh", zeta_dev <= 1e-12);
    outcome.verdict("kernel_factors", kernel_dev <= 1e-12);
    write_csv(out, "zeta.csv", &["t", "zeta", "tanh", "deviation"], rows)
        .map_err(werr(scen))?;
    outcome.artifact("zeta.csv");
    Ok(outcome)
}
