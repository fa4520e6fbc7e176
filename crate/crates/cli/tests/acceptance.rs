//! Acceptance gate for the whole workspace: eleven independent checks, one
//! per release-blocking property, each printing a single pass/fail line
//! (visible with `--nocapture`).  The checks run serially behind one mutex
//! so the wall-clock budgets measure the work, not scheduler contention.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use reflectlab_cli::config::{resolve, ParamValue, ScenarioConfig};
use reflectlab_cli::report::Report;
use reflectlab_cli::run_scenario;
use reflectlab_core::kernels::{psd_report, BumpBasis, QuadratureRule};
use reflectlab_core::linalg;
use reflectlab_core::quotient::{semigroup_law_check, SemigroupLawData};
use reflectlab_core::series::{
    cross_jform, dual_generator_model, jform, moved_jform, SeriesParameter,
};
use reflectlab_core::sl2::{exp_lie, LieElement};
use std::sync::Mutex;
use std::time::{Duration, Instant};

static GATE: Mutex<()> = Mutex::new(());

fn serialized() -> std::sync::MutexGuard<'static, ()> {
    GATE.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn conclude(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {number:02} {name} failed: {detail}");
}

/// Run one scenario into a temp directory and hand back its report and
/// wall time.
fn run(scenario: &str, seed: u64, params: &[(&str, ParamValue)]) -> (Report, Duration) {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut request = ScenarioConfig::new(scenario);
    request.seed = seed;
    request.output_path = dir.path().join("out").display().to_string();
    for (key, value) in params {
        request.parameters.insert(key.to_string(), value.clone());
    }
    let resolved = resolve(&request).expect("valid configuration");
    let start = Instant::now();
    let report = run_scenario(&resolved).expect("scenario run");
    (report, start.elapsed())
}

fn verdict(report: &Report, name: &str) -> bool {
    *report
        .verdicts
        .get(name)
        .unwrap_or_else(|| panic!("report has no verdict '{name}'"))
}

fn metric(report: &Report, name: &str) -> f64 {
    *report
        .metrics
        .get(name)
        .unwrap_or_else(|| panic!("report has no metric '{name}'"))
}

#[test]
fn c01_kernel_form_positive_exactly_inside_the_window() {
    let _gate = serialized();
    let start = Instant::now();
    let basis = BumpBasis::equispaced(12, 0.8, 0.15);
    let quad = QuadratureRule::gauss_legendre(80, -1.0, 1.0);

    let mut worst_ratio = 0.0_f64;
    for &s in &[0.1, 0.25, 0.5, 0.75, 0.9] {
        let form = jform(SeriesParameter::new(s), &basis, &quad).expect("form");
        let (eig_min, eig_max, _) = psd_report(&form);
        assert!(eig_max > 0.0, "degenerate form at s = {s}");
        worst_ratio = worst_ratio.min(eig_min / eig_max);
    }
    let inside_ok = worst_ratio >= -1e-9;

    let outside = jform(SeriesParameter::new(3.0), &basis, &quad).expect("form");
    let (eig_min, eig_max, _) = psd_report(&outside);
    let outside_ok = eig_min < -1e-6 * eig_max;

    let elapsed = start.elapsed();
    conclude(
        1,
        "kernel form positive exactly inside the window",
        inside_ok && outside_ok && elapsed < Duration::from_secs(5),
        &format!(
            "worst inside ratio {worst_ratio:.3e}, outside ratio {:.3e}, {} ms",
            eig_min / eig_max,
            elapsed.as_millis()
        ),
    );
}

#[test]
fn c02_semigroup_motions_never_expand_the_quotient_form() {
    let _gate = serialized();
    let (report, elapsed) = run("sl2-contraction", 20260819, &[]);
    let gamma_max = metric(&report, "gamma_max");
    let boundary = metric(&report, "boundary_gamma");
    conclude(
        2,
        "semigroup motions never expand the quotient form",
        verdict(&report, "contractive")
            && verdict(&report, "bound_sharp")
            && gamma_max <= 1.0 + 1e-6
            && boundary >= 0.99
            && elapsed < Duration::from_secs(10),
        &format!(
            "gamma_max {gamma_max:.6}, boundary {boundary:.4}, {} ms over 20 draws",
            elapsed.as_millis()
        ),
    );
}

#[test]
fn c03_induced_generator_spectrum_stays_nonpositive() {
    let _gate = serialized();
    let start = Instant::now();
    let basis = BumpBasis::standard();
    let quad = QuadratureRule::gauss_legendre(80, -1.0, 1.0);
    let directions = [
        ("2X0", LieElement::x0().scale(2.0)),
        ("q11", LieElement::q(1.0, 1.0)),
    ];

    let mut worst_lambda = f64::NEG_INFINITY;
    let mut worst_gap = 0.0_f64;
    for (_, y) in &directions {
        for &s in &[0.25, 0.5, 0.75] {
            let model =
                dual_generator_model(y, SeriesParameter::new(s), &basis, &quad, 2e-7, 1e-4)
                    .expect("generator model");
            worst_lambda = worst_lambda.max(model.lambdas.last().copied().unwrap_or(0.0));
            worst_gap = worst_gap.max(model.richardson_gap);
        }
    }
    let elapsed = start.elapsed();
    conclude(
        3,
        "induced generator spectrum stays nonpositive",
        worst_lambda <= 1e-6 && worst_gap <= 1e-4 && elapsed < Duration::from_secs(10),
        &format!(
            "worst eigenvalue {worst_lambda:.3e}, worst consistency gap {worst_gap:.3e}, {} ms",
            elapsed.as_millis()
        ),
    );
}

#[test]
fn c04_induced_operators_compose_like_the_group() {
    let _gate = serialized();
    let basis = BumpBasis::standard();
    let quad = QuadratureRule::gauss_legendre(80, -1.0, 1.0);
    let s = SeriesParameter::new(0.5);
    let f0 = jform(s, &basis, &quad).expect("form");
    let mut rng = ChaCha12Rng::seed_from_u64(41);

    // Deep interior-cone motions: the comparison is then dominated by the
    // law itself rather than by what the bump family cannot resolve.
    let draw = |rng: &mut ChaCha12Rng| {
        let r = rng.random_range(0.8..1.2);
        let sigma = r * rng.random_range(-0.35..0.35);
        let t = rng.random_range(1.4..2.5);
        exp_lie(&LieElement::q(r, sigma).scale(t))
    };

    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let g1 = draw(&mut rng);
        let g2 = draw(&mut rng);
        let fg1 = moved_jform(&g1, s, &basis, &quad).expect("moved form");
        let fg2 = moved_jform(&g2, s, &basis, &quad).expect("moved form");
        let fg12 = moved_jform(&g1.mul(&g2), s, &basis, &quad).expect("moved form");
        let cross = linalg::complexify(&cross_jform(&g2, &g1, s, &basis, &quad).expect("cross"));
        let data = SemigroupLawData {
            f0: &f0,
            fg1: &fg1.form,
            fg2: &fg2.form,
            fg1g2: &fg12.form,
            cross: &cross,
        };
        worst = worst.max(semigroup_law_check(&data, 1e-6).expect("law check"));
    }
    conclude(
        4,
        "induced operators compose like the group",
        worst <= 1e-6,
        &format!("worst composition residual {worst:.3e} over 10 pairs"),
    );
}

#[test]
fn c05_closed_form_identities_hold_to_round_off() {
    let _gate = serialized();
    let (report, _) = run("sl2-identities", 20260819, &[]);
    let zeta_dev = metric(&report, "zeta_deviation");
    let kernel_dev = metric(&report, "kernel_deviation");
    conclude(
        5,
        "closed-form identities hold to round-off",
        verdict(&report, "zeta_is_tanh")
            && verdict(&report, "kernel_factors")
            && zeta_dev <= 1e-12
            && kernel_dev <= 1e-12,
        &format!("chart deviation {zeta_dev:.3e}, kernel deviation {kernel_dev:.3e}"),
    );
}

#[test]
fn c06_positivity_radius_table_is_reproduced_exactly() {
    let _gate = serialized();
    let (report, _) = run("cayley-table", 20260819, &[]);
    conclude(
        6,
        "positivity radius table is reproduced exactly",
        verdict(&report, "matches_anchor_rows") && verdict(&report, "threshold_covers_radius"),
        &format!(
            "{} rows, max radius {}, max threshold {}",
            metric(&report, "rows"),
            metric(&report, "max_radius"),
            metric(&report, "max_threshold")
        ),
    );
}

#[test]
fn c07_fixed_points_carry_the_whole_quotient() {
    let _gate = serialized();
    let (report, _) = run("phillips", 20260819, &[]);
    conclude(
        7,
        "fixed points carry the whole quotient",
        verdict(&report, "form_psd")
            && verdict(&report, "dimension_is_fixed_point_count")
            && verdict(&report, "fixed_point_free_collapses")
            && metric(&report, "spaces") == 50.0,
        &format!(
            "50 spaces, {} fixed-point free, worst eigenvalue ratio {:.3e}",
            metric(&report, "fixed_point_free_spaces"),
            metric(&report, "worst_eig_min_ratio")
        ),
    );
}

#[test]
fn c08_reflected_pairing_agrees_across_independent_routes() {
    let _gate = serialized();
    let (report, elapsed) = run("heisenberg-rp", 20260819, &[]);
    let gap = metric(&report, "worst_route_gap");
    conclude(
        8,
        "reflected pairing agrees across independent routes",
        verdict(&report, "pairing_nonnegative")
            && verdict(&report, "routes_agree")
            && gap <= 1e-4
            && elapsed < Duration::from_secs(30),
        &format!(
            "worst relative gap {gap:.3e}, min value {:.3e}, {} ms including table build",
            metric(&report, "min_reduced"),
            elapsed.as_millis()
        ),
    );
}

#[test]
fn c09_phase_averaging_recovers_the_one_sided_pieces() {
    let _gate = serialized();
    let (report, _) = run("heisenberg-uncorrelate", 20260819, &[]);
    let residual = metric(&report, "worst_residual");
    conclude(
        9,
        "phase averaging recovers the one-sided pieces",
        verdict(&report, "splits_exactly")
            && verdict(&report, "dimensions_exact")
            && residual <= 1e-8,
        &format!("worst split residual {residual:.3e} over 20 draws on 64-point models"),
    );
}

#[test]
fn c10_affine_model_behaves_end_to_end() {
    let _gate = serialized();
    let (qfield, _) = run("axb-qfield", 20260819, &[]);
    let (escape, _) = run("axb-escape", 20260819, &[]);
    let (deficiency, _) = run("axb-deficiency", 20260819, &[]);
    let (nogo, _) = run("axb-nogo", 20260819, &[]);

    let qfield_ok = qfield.all_verdicts_pass()
        && metric(&qfield, "worst_structure_dev") <= 1e-12
        && metric(&qfield, "worst_trace_dev") <= 1e-12;
    let escape_ok = verdict(&escape, "exact_at_zero_energy")
        && verdict(&escape, "free_flight_slope")
        && verdict(&escape, "finite_toward_wall")
        && verdict(&escape, "turning_point_quarter_period");
    let deficiency_ok = deficiency.all_verdicts_pass();
    let nogo_ok = nogo.all_verdicts_pass();

    conclude(
        10,
        "affine model behaves end to end",
        qfield_ok && escape_ok && deficiency_ok && nogo_ok,
        &format!(
            "projections {:.1e}, escape anchors pass, ends stable, dichotomy min violation {:.3}",
            metric(&qfield, "worst_structure_dev"),
            metric(&nogo, "min_violation_over_positive")
        ),
    );
}

#[test]
fn c11_reports_are_byte_identical_across_thread_counts() {
    let _gate = serialized();
    let bin = env!("CARGO_BIN_EXE_reflectlab");
    let dir = tempfile::tempdir().expect("temp dir");

    let mut blobs: Vec<Vec<u8>> = Vec::new();
    for (label, threads) in [("t1a", "1"), ("t1b", "1"), ("t2", "2"), ("t4", "4")] {
        let out = dir.path().join(label);
        let status = std::process::Command::new(bin)
            .args(["run", "sl2-identities", "--seed", "5"])
            .arg("--out")
            .arg(&out)
            .env("REFLECTLAB_THREADS", threads)
            .stdout(std::process::Stdio::null())
            .stderr(std::process::Stdio::null())
            .status()
            .expect("binary runs");
        assert!(status.success(), "run under {threads} threads failed");
        blobs.push(std::fs::read(out.join("report.json")).expect("report exists"));
    }
    let identical = blobs.iter().all(|b| *b == blobs[0]);
    conclude(
        11,
        "reports are byte-identical across thread counts",
        identical,
        &format!(
            "4 runs ({} bytes each) under 1, 1, 2, 4 threads",
            blobs[0].len()
        ),
    );
}
