//! Scenarios on the half-plane model: the reflected pairing through its
//! two independent evaluation routes, and the phase-averaging split of
//! invariant subspaces.

use super::{rng, werr, write_csv, Outcome};
use crate::config::ResolvedConfig;
use crate::scenarios::ScenarioError;
use nalgebra::DVector;
use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::Rng;
use reflectlab_core::heisenberg::{
    matched_grids, rp_form_direct, rp_form_reduced, uncorrelate, KernelTable, KernelTableSpec,
    TwoComponentVector,
};
use reflectlab_core::kernels::{bump_profile, QuadratureRule};
use std::path::{Path, PathBuf};

/// The reflected pairing of random bumps in the upper half plane, computed
/// once through the cached radial-kernel table and once through the
/// diagonalized (manifestly nonnegative) reduction.
pub(super) fn rp(cfg: &ResolvedConfig, out: &Path) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let funcs = cfg.count("funcs").max(1);
    let order = cfg.count("quad_order").max(10);
    let spec = KernelTableSpec {
        r_min: 1e-3,
        r_max: 16.0,
        len: cfg.count("table_len").max(256),
    };
    let table_tol = cfg.real("table_tol");
    let cache_dir = match cfg.text("cache_dir") {
        "" => out.join("cache"),
        dir => PathBuf::from(dir),
    };
    let table = KernelTable::load_or_build(&cache_dir, spec, table_tol).map_err(werr(scen))?;
    let template = QuadratureRule::gauss_legendre(order, -1.0, 1.0);
    let mut rng = rng(cfg.seed);

    let mut min_reduced = f64::INFINITY;
    let mut scale = 0.0_f64;
    let mut worst_gap = 0.0_f64;
    let mut rows = Vec::with_capacity(funcs);
    for i in 0..funcs {
        let cx = rng.random_range(-0.8..0.8);
        let wx = rng.random_range(0.2..0.6);
        let cy = rng.random_range(0.5..1.5);
        let wy = rng.random_range(0.15..0.45);
        let f = |x: f64, y: f64| bump_profile((x - cx) / wx) * bump_profile((y - cy) / wy);
        let support = (cx - wx, cx + wx, cy - wy, cy + wy);

        let direct = rp_form_direct(f, support, &template, &table).map_err(werr(scen))?;
        let reduced = rp_form_reduced(f, support, &template).map_err(werr(scen))?;
        let gap = (direct - reduced).abs() / reduced.abs().max(1e-30);
        min_reduced = min_reduced.min(reduced);
        scale = scale.max(reduced.abs());
        worst_gap = worst_gap.max(gap);
        rows.push(vec![
            i.to_string(),
            format!("{cx:.6}"),
            format!("{wx:.6}"),
            format!("{cy:.6}"),
            format!("{wy:.6}"),
            format!("{direct:e}"),
            format!("{reduced:e}"),
            format!("{gap:e}"),
        ]);
    }

    let mut outcome = Outcome::new();
    outcome.metric("min_reduced", min_reduced);
    outcome.metric("worst_route_gap", worst_gap);
    outcome.verdict("pairing_nonnegative", min_reduced >= -1e-12 * scale.max(1.0));
    outcome.verdict("routes_agree", worst_gap <= 1e-4);
    write_csv(
        out,
        "pairings.csv",
        &["func", "cx", "wx", "cy", "wy", "direct", "reduced", "rel_gap"],
        rows,
    )
    .map_err(werr(scen))?;
    outcome.artifact("pairings.csv");
    Ok(outcome)
}

/// Phase averaging splits random two-sided subspaces built from one-sided
/// pieces back into those pieces, exactly and without enlargement.
pub(super) fn uncorrelate_models(
    cfg: &ResolvedConfig,
    out: &Path,
) -> Result<Outcome, ScenarioError> {
    let scen = cfg.scenario.as_str();
    let draws = cfg.count("draws").max(1);
    let k = cfg.count("points").max(4);
    let hbar = cfg.real("hbar");
    let beta1 = cfg.real("beta1");

    let coords: Vec<f64> = (0..k).map(|i| -1.5 + 3.2 * i as f64 / k as f64).collect();
    let (a_grid, beta_grid) = matched_grids(hbar, beta1, k, 2 * k + 1);
    let mut rng = rng(cfg.seed);

    let mut worst_residual = 0.0_f64;
    let mut worst_defect = 0.0_f64;
    let mut dims_ok = true;
    let mut rows = Vec::with_capacity(draws);
    for draw in 0..draws {
        let dp = rng.random_range(1..=4.min(k / 2));
        let dm = rng.random_range(1..=4.min(k / 2));
        let mut idx: Vec<usize> = (0..k).collect();
        idx.shuffle(&mut rng);
        let plus_support = &idx[0..dp];
        let minus_support = &idx[dp..dp + dm];

        // dp plus-sided and dm minus-sided generators on their coordinate
        // supports...
        let mut gens: Vec<TwoComponentVector> = Vec::with_capacity(dp + dm);
        for _ in 0..dp {
            let mut plus = DVector::from_element(k, C64::new(0.0, 0.0));
            for &j in plus_support {
                plus[j] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            gens.push(TwoComponentVector::new(
                plus,
                DVector::from_element(k, C64::new(0.0, 0.0)),
            ));
        }
        for _ in 0..dm {
            let mut minus = DVector::from_element(k, C64::new(0.0, 0.0));
            for &j in minus_support {
                minus[j] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            gens.push(TwoComponentVector::new(
                DVector::from_element(k, C64::new(0.0, 0.0)),
                minus,
            ));
        }

        // ...then scrambled by a random invertible mix, so every basis
        // vector handed to the splitter straddles both sides and the
        // one-sided pieces are genuinely hidden.
        let d = dp + dm;
        let k0: Vec<TwoComponentVector> = (0..d)
            .map(|_| {
                let mut plus = DVector::from_element(k, C64::new(0.0, 0.0));
                let mut minus = DVector::from_element(k, C64::new(0.0, 0.0));
                for g in &gens {
                    let c = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    plus += &g.plus * c;
                    minus += &g.minus * c;
                }
                TwoComponentVector::new(plus, minus)
            })
            .collect();

        let split =
            uncorrelate(&k0, &coords, hbar, &a_grid, &beta_grid, 1e-9).map_err(werr(scen))?;
        worst_residual = worst_residual.max(split.residual);
        worst_defect = worst_defect.max(split.invariance_defect);
        dims_ok &= split.dplus.ncols() == dp && split.dminus.ncols() == dm && !split.enlarged;
        rows.push(vec![
            draw.to_string(),
            dp.to_string(),
            dm.to_string(),
            format!("{:e}", split.residual),
            format!("{:e}", split.invariance_defect),
        ]);
    }

    let mut outcome = Outcome::new();
    outcome.metric("draws", draws as f64);
    outcome.metric("worst_residual", worst_residual);
    outcome.metric("worst_invariance_defect", worst_defect);
    outcome.verdict("splits_exactly", worst_residual <= 1e-8);
    outcome.verdict("dimensions_exact", dims_ok);
    write_csv(
        out,
        "splits.csv",
        &["draw", "dim_plus", "dim_minus", "residual", "invariance_defect"],
        rows,
    )
    .map_err(werr(scen))?;
    outcome.artifact("splits.csv");
    Ok(outcome)
}
