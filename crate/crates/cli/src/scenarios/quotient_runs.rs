//! Scenario over finite reflection models: the fixed-point subspace
//! carries the whole quotient, and fixed-point-free involutions leave
//! nothing behind.

use super::{rng, werr, write_csv, Outcome};
use crate::config::ResolvedConfig;
use crate::scenarios::ScenarioError;
use rand::seq::SliceRandom;
use rand::Rng;
use reflectlab_core::kernels::psd_report;
use reflectlab_core::quotient::{
    phillips_subspace, FiniteReflectionSpace, QuotientModel, RADICAL_TOL,
};
use std::path::Path;

pub(super) fn phillips(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let spaces = cfg.count("spaces").max(1);
    let max_points = cfg.count("max_points").clamp(2, 256);
    let mut rng = rng(cfg.seed);

    let mut psd_ok = true;
    let mut dims_ok = true;
    let mut fpf_trivial = true;
    let mut worst_eig_min = 0.0_f64;
    let mut fpf_count = 0usize;
    let mut rows = Vec::with_capacity(spaces);
    for trial in 0..spaces {
        // Every fifth space is fixed-point free: all points paired, none
        // held by the involution, so the quotient must collapse to zero.
        let fixed_point_free = trial % 5 == 0;
        let mut n = rng.random_range(2..=max_points);
        if fixed_point_free && n % 2 == 1 {
            n += 1;
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut theta: Vec<usize> = (0..n).collect();
        let paired = if fixed_point_free {
            n / 2
        } else {
            rng.random_range(0..=n / 2)
        };
        for p in 0..paired {
            let (i, j) = (order[2 * p], order[2 * p + 1]);
            theta[i] = j;
            theta[j] = i;
        }

        // Weights are constant along orbits, as the reflection symmetry of
        // the measure demands.
        let mut weights = vec![0.0; n];
        for i in 0..n {
            if weights[i] == 0.0 {
                let w = rng.random_range(0.1..2.0);
                weights[i] = w;
                weights[theta[i]] = w;
            }
        }

        let space = FiniteReflectionSpace::new(weights, theta).map_err(werr(scen))?;
        let sub = phillips_subspace(&space, None).map_err(werr(scen))?;
        let (eig_min, eig_max, _) = psd_report(&sub.jform_on_k0);
        worst_eig_min = worst_eig_min.min(eig_min / eig_max.max(1.0));
        psd_ok &= eig_min >= -1e-14 * eig_max.max(1.0);

        let model =
            QuotientModel::from_form(&sub.jform_on_k0, RADICAL_TOL).map_err(werr(scen))?;
        dims_ok &= model.quotient_dim() == sub.m0.len();
        if fixed_point_free {
            fpf_count += 1;
            fpf_trivial &= sub.m0.is_empty() && model.quotient_dim() == 0;
        }

        rows.push(vec![
            trial.to_string(),
            n.to_string(),
            sub.m0.len().to_string(),
            model.quotient_dim().to_string(),
            fixed_point_free.to_string(),
        ]);
    }

    let mut outcome = Outcome::new();
    outcome.metric("spaces", spaces as f64);
    outcome.metric("fixed_point_free_spaces", fpf_count as f64);
    outcome.metric("worst_eig_min_ratio", worst_eig_min);
    outcome.verdict("form_psd", psd_ok);
    outcome.verdict("dimension_is_fixed_point_count", dims_ok);
    outcome.verdict("fixed_point_free_collapses", fpf_trivial);
    write_csv(
        out,
        "spaces.csv",
        &["trial", "points", "fixed_points", "quotient_dim", "fixed_point_free"],
        rows,
    )
    .map_err(werr(scen))?;
    outcome.artifact("spaces.csv");
    Ok(outcome)
}
