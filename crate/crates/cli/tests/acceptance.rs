//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them).

use std::time::Instant;

use faer::{c64, Mat};
use rgmusic::datagen::{synthesize, NoiseModel, SnapshotMatrix, SourceConfig};
use rgmusic::doa::{sample_eigen, Localizer};
use rgmusic::inference::{
    bilinear_form_estimate, estimate_power_empirical, estimate_power_known, report_forced,
};
use rgmusic::rng::{role, stream};
use rgmusic::scatter::{
    equivalent_model, hermitian_spectral_norm, solve_fixed_point, solve_fixed_point_from,
};
use rgmusic::spectrum::{SpectralContext, TauMeasure};
use rgmusic::weightfn::WeightFunction;
use rgmusic_cli::config::{ExperimentConfig, Scenario};
use rgmusic_cli::runners::run_mse_sweep;

struct Criterion {
    name: &'static str,
    started: Instant,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            started: Instant::now(),
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if ok {
            self.notes.push(detail);
        } else {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        let status = if self.failures.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {}: {} ({:.1} s)",
            self.name,
            status,
            self.started.elapsed().as_secs_f64()
        );
        for n in &self.notes {
            println!("    ok: {n}");
        }
        for f in &self.failures {
            println!("    failed: {f}");
        }
        assert!(
            self.failures.is_empty(),
            "criterion {} failed:\n{}",
            self.name,
            self.failures.join("\n")
        );
    }
}

fn dirac_ctx() -> SpectralContext {
    let w = WeightFunction::maronna(0.2, 0.2).unwrap();
    SpectralContext::new(TauMeasure::dirac(1.0).unwrap(), w).unwrap()
}

fn fig1_sources() -> SourceConfig {
    SourceConfig::new(
        vec![10f64.to_radians(), 12f64.to_radians()],
        vec![1.0, 1.0],
        0.5,
    )
    .unwrap()
}

/// Criterion 1: closed-form spectral constants for ν = δ₁, α = 0.2, c = 0.2.
#[test]
fn criterion_1_closed_form_constants() {
    let mut c = Criterion::new("1 (closed-form spectral constants)");
    let ctx = dirac_ctx();
    let checks: [(&str, f64, f64); 5] = [
        ("gamma", ctx.gamma(), 1.25),
        ("S+", ctx.s_plus(), 2.645592241262894),
        ("p-", ctx.p_minus(), 0.2f64.sqrt()),
        ("Lambda(1)", ctx.spike_location(1.0).unwrap(), 2.4),
        (
            "w(1)",
            {
                let lam = ctx.spike_location(1.0).unwrap();
                let sys = ctx.delta_system();
                let sol = sys.solve_delta(lam).unwrap();
                sys.eigvec_weight_at(sol.delta).unwrap()
            },
            1.5,
        ),
    ];
    for (name, got, want) in checks {
        c.check(
            (got - want).abs() <= 1e-6,
            format!("{name} = {got:.9} (target {want:.9} ± 1e-6)"),
        );
    }
    c.finish();
}

/// Criterion 2: fixed-point residual and multi-start agreement on 100
/// random instances with N ≤ 50.
#[test]
fn criterion_2_fixed_point_contract() {
    let mut c = Criterion::new("2 (fixed-point contract)");
    let mut worst_residual = 0.0f64;
    let mut worst_gap = 0.0f64;
    for k in 0..100u64 {
        let mut rng = stream(0xf1bed, k, role::TAU);
        let n_dim = 4 + (k as usize * 7) % 47;
        let n = n_dim * (3 + (k as usize) % 5);
        let noise = match k % 3 {
            0 => NoiseModel::Gaussian,
            1 => NoiseModel::StudentT { beta: 4.0 },
            _ => NoiseModel::StudentT { beta: 100.0 },
        };
        let sources = if k % 2 == 0 {
            SourceConfig::empty()
        } else {
            SourceConfig::new(vec![0.3], vec![2.0], 0.5).unwrap()
        };
        let (y, _) = synthesize(&sources, noise, n_dim, n, &mut rng).unwrap();
        let w = WeightFunction::maronna(0.2, 0.5 / 1.2).unwrap();
        let a = solve_fixed_point(&y, &w, 1e-9, 5000).unwrap();
        let b = solve_fixed_point_from(&y, &w, y.sample_covariance(), 1e-9, 5000).unwrap();
        worst_residual = worst_residual.max(a.residual()).max(b.residual());
        let diff = a.matrix() - b.matrix();
        let gap = hermitian_spectral_norm(&diff) / hermitian_spectral_norm(a.matrix());
        worst_gap = worst_gap.max(gap);
    }
    c.check(
        worst_residual <= 1e-9,
        format!("worst residual {worst_residual:.3e} (<= 1e-9)"),
    );
    c.check(
        worst_gap <= 1e-8,
        format!("worst multi-start gap {worst_gap:.3e} (<= 1e-8)"),
    );
    c.finish();
}

/// Criterion 3: the paired-seed spectral gap to the equivalent model shrinks
/// from (50, 250) to (200, 1000) in at least 18 of 20 trials.
#[test]
fn criterion_3_equivalent_model_trend() {
    let mut c = Criterion::new("3 (asymptotic model equivalence trend)");
    let w_lim = WeightFunction::maronna(0.2, 0.2).unwrap();
    let measure = TauMeasure::student_t(100.0, 1_000_000, 0x5eed_0001).unwrap();
    let ctx = SpectralContext::new(measure, w_lim).unwrap();
    let gamma = ctx.gamma();
    let sources = fig1_sources();

    let gap_at = |n_dim: usize, n: usize, trial: u64| -> f64 {
        let mut rng = stream(0x7e5d, trial, role::NOISE);
        let (y, gt) = synthesize(
            &sources,
            NoiseModel::StudentT { beta: 100.0 },
            n_dim,
            n,
            &mut rng,
        )
        .unwrap();
        let est = solve_fixed_point(&y, &w_lim, 1e-9, 5000).unwrap();
        let s_n = equivalent_model(&sources, &gt, &w_lim, gamma);
        let diff = est.matrix() - &s_n;
        hermitian_spectral_norm(&diff) / hermitian_spectral_norm(&s_n)
    };

    let mut wins = 0;
    let mut examples = Vec::new();
    for trial in 0..20 {
        let small = gap_at(50, 250, trial);
        let large = gap_at(200, 1000, trial);
        if large < small {
            wins += 1;
        }
        if trial < 3 {
            examples.push(format!("trial {trial}: {small:.3} -> {large:.3}"));
        }
    }
    c.check(
        wins >= 18,
        format!("gap shrank in {wins}/20 paired trials (need >= 18); {}", examples.join(", ")),
    );
    c.finish();
}

/// Criterion 4: Figure-1 thresholds and spike detection counts.
#[test]
fn criterion_4_figure1_thresholds() {
    let mut c = Criterion::new("4 (figure-1 thresholds)");
    let w = WeightFunction::maronna(0.2, 0.2).unwrap();
    let measure = TauMeasure::student_t(100.0, 1_000_000, 0x5eed_0001).unwrap();
    let ctx = SpectralContext::new(measure, w).unwrap();

    let s_plus = ctx.s_plus();
    // The paper's annotation; the limiting value of the stated law is
    // ~0.3016 (verified by independent quadrature), see the ledger.
    c.check(
        (s_plus / 0.319 - 1.0).abs() <= 0.05,
        format!("S+ = {s_plus:.4} (target 0.319 ± 5%)"),
    );
    let edge = ctx.s_plus_mu();
    c.check(
        (edge / 0.27 - 1.0).abs() <= 0.10,
        format!("S+_mu = {edge:.4} (target 0.27 ± 10%)"),
    );

    let sources = fig1_sources();
    let mut exactly_two = 0;
    let trials = 50;
    for t in 0..trials {
        let mut rng = stream(0xf161, t, role::NOISE);
        let (y, _) = synthesize(
            &sources,
            NoiseModel::StudentT { beta: 100.0 },
            200,
            1000,
            &mut rng,
        )
        .unwrap();
        let est = solve_fixed_point(&y, &w, 1e-9, 5000).unwrap();
        let above = est.eigenvalues().iter().filter(|&&l| l > s_plus).count();
        if above == 2 {
            exactly_two += 1;
        }
    }
    c.check(
        exactly_two * 10 >= trials * 9,
        format!("exactly 2 eigenvalues above S+ in {exactly_two}/{trials} trials (need >= 90%)"),
    );
    c.finish();
}

fn mse_config(noise: &str, sweep: &str, out: &str) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::for_scenario(Scenario::Mse);
    cfg.out_dir = std::env::temp_dir().join(out);
    cfg.trials = 1000;
    let lines = format!("noise = {noise}\nsweep_db = {sweep}\n");
    let path = std::env::temp_dir().join(format!("{out}.cfg"));
    std::fs::write(&path, lines).unwrap();
    cfg.apply_file(&path).unwrap();
    cfg
}

/// Criterion 5: Figure-3 reproduction at 10 dB (Student-t(10)).
#[test]
fn criterion_5_figure3_reproduction() {
    let mut c = Criterion::new("5 (figure-3 MSE at 10 dB)");
    let mut cfg = mse_config("student_t", "10", "rg_acc_c5");
    cfg.student_beta = 10.0;
    let art = run_mse_sweep(&cfg).unwrap();
    let row = &art.rows[0];
    // Method::ALL order: music, robust_music, gmusic, emp_gmusic,
    // robust_gmusic, emp_robust_gmusic
    let music = row.mse[0];
    let gmusic = row.mse[2];
    let rgmusic = row.mse[4];
    for (name, got, target) in [
        ("robust G-MUSIC", rgmusic, 4.48e-6),
        ("G-MUSIC", gmusic, 2.50e-4),
        ("MUSIC", music, 9.21e-3),
    ] {
        let ratio = got / target;
        c.check(
            (1.0 / 3.0..=3.0).contains(&ratio),
            format!("{name} MSE = {got:.3e} (paper {target:.2e}, ratio {ratio:.2}, need within x3)"),
        );
    }
    c.check(
        rgmusic < gmusic && gmusic < music,
        format!(
            "ordering robust G-MUSIC ({rgmusic:.3e}) < G-MUSIC ({gmusic:.3e}) < MUSIC ({music:.3e})"
        ),
    );
    c.finish();
}

/// Criterion 6: Figure-4 reproduction (single outlier) at 15 and 30 dB.
#[test]
fn criterion_6_figure4_reproduction() {
    let mut c = Criterion::new("6 (figure-4 MSE gaps)");
    let cfg = mse_config("outlier", "15, 30", "rg_acc_c6");
    let art = run_mse_sweep(&cfg).unwrap();
    let (row15, row30) = (&art.rows[0], &art.rows[1]);
    let gap15 = row15.mse[2] / row15.mse[4];
    let gap30 = row30.mse[2] / row30.mse[4];
    c.check(
        gap15 >= 100.0,
        format!(
            "15 dB: G-MUSIC {:.3e} vs robust G-MUSIC {:.3e}, gap {gap15:.1}x (need >= 100x)",
            row15.mse[2], row15.mse[4]
        ),
    );
    c.check(
        gap30 < 10.0,
        format!(
            "30 dB: G-MUSIC {:.3e} vs robust G-MUSIC {:.3e}, gap {gap30:.1}x (need < 10x)",
            row30.mse[2], row30.mse[4]
        ),
    );
    c.finish();
}

/// Criterion 7: consistency of the power and bilinear-form estimators at
/// the figure-1 configuration.
#[test]
fn criterion_7_estimator_consistency() {
    let mut c = Criterion::new("7 (estimator consistency)");
    let w = WeightFunction::maronna(0.2, 0.2).unwrap();
    let measure = TauMeasure::student_t(100.0, 1_000_000, 0x5eed_0001).unwrap();
    let ctx = SpectralContext::new(measure, w).unwrap();
    let sources = fig1_sources();
    let (n_dim, n) = (200usize, 1000usize);

    // population projector onto span(a1, a2) = the p = 1 eigenspace of AA*:
    // Π = A (A*A)⁻¹ A*, with the 2×2 Gram inverted in closed form
    let a_mat = sources.steering_matrix(n_dim);
    let gram = a_mat.adjoint() * &a_mat;
    let det = gram[(0, 0)] * gram[(1, 1)] - gram[(0, 1)] * gram[(1, 0)];
    let gram_inv = Mat::from_fn(2, 2, |i, j| match (i, j) {
        (0, 0) => gram[(1, 1)] / det,
        (1, 1) => gram[(0, 0)] / det,
        (0, 1) => -gram[(0, 1)] / det,
        _ => -gram[(1, 0)] / det,
    });
    let proj = &a_mat * &gram_inv * a_mat.adjoint();
    let a1 = rgmusic::datagen::steering_vector(10f64.to_radians(), n_dim, 0.5);
    let mut target = c64::new(0.0, 0.0);
    for i in 0..n_dim {
        let mut row = c64::new(0.0, 0.0);
        for j in 0..n_dim {
            row += proj[(i, j)] * a1[j];
        }
        target += a1[i].conj() * row;
    }

    let mut err_known = Vec::new();
    let mut err_emp = Vec::new();
    let mut err_bilinear = Vec::new();
    for t in 0..50u64 {
        let mut rng = stream(0xc0517, t, role::NOISE);
        let (y, _) = synthesize(
            &sources,
            NoiseModel::StudentT { beta: 100.0 },
            n_dim,
            n,
            &mut rng,
        )
        .unwrap();
        let est = solve_fixed_point(&y, &w, 1e-9, 5000).unwrap();
        for k in 0..2 {
            let lam = est.eigenvalues()[k];
            if let Ok(p) = estimate_power_known(lam, &ctx) {
                err_known.push((p - 1.0).abs());
            }
            if let Ok(p) = estimate_power_empirical(lam, &est, &w) {
                err_emp.push((p - 1.0).abs());
            }
        }
        let report = report_forced(&est, &ctx, 2);
        let val = bilinear_form_estimate(
            a1.as_ref(),
            a1.as_ref(),
            &report.indices(),
            &est,
            &report.weights(),
        );
        err_bilinear.push((val - target).norm());
    }
    let median = |v: &mut Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v[v.len() / 2]
    };
    let mk = median(&mut err_known);
    let me = median(&mut err_emp);
    let mb = median(&mut err_bilinear);
    c.check(
        mk <= 0.15,
        format!("median |p_hat - 1| (known) = {mk:.3} over {} values (<= 0.15)", err_known.len()),
    );
    c.check(
        me <= 0.15,
        format!("median |p_hat - 1| (empirical) = {me:.3} over {} values (<= 0.15)", err_emp.len()),
    );
    c.check(
        mb <= 0.05,
        format!("median bilinear-form error = {mb:.3} (target a*Pi a = {:.3}, <= 0.05)", target.re),
    );
    c.finish();
}

/// Criterion 8: oracle equivalences with the constant-weight hook and the
/// Marchenko–Pastur density.
#[test]
fn criterion_8_oracle_equivalences() {
    let mut c = Criterion::new("8 (oracle equivalences)");

    // u ≡ 1 turns the scatter fixed point into the sample covariance
    let mut rng = stream(0x08ac1e, 0, role::NOISE);
    let sources = SourceConfig::new(
        vec![10f64.to_radians(), 12f64.to_radians()],
        vec![2.0, 2.0],
        0.5,
    )
    .unwrap();
    let (y, _) = synthesize(&sources, NoiseModel::StudentT { beta: 100.0 }, 16, 96, &mut rng)
        .unwrap();
    let c_n = y.aspect_ratio();
    let w1 = WeightFunction::constant_one(c_n).unwrap();
    let est = solve_fixed_point(&y, &w1, 1e-9, 100).unwrap();
    let cov = y.sample_covariance();
    let mut max_err = 0.0f64;
    for j in 0..16 {
        for i in 0..16 {
            max_err = max_err.max((est.matrix()[(i, j)] - cov[(i, j)]).norm());
        }
    }
    c.check(
        max_err <= 1e-12,
        format!("u==1 scatter vs sample covariance: max entry gap {max_err:.2e} (<= 1e-12)"),
    );

    // robust G-MUSIC with u ≡ 1, v ≡ 1 equals G-MUSIC on the same data
    let measure = TauMeasure::dirac(1.0).unwrap();
    let sys = rgmusic::spectrum::DeltaSystem::from_measure(&measure, &w1, 1.0);
    let report_r = rgmusic::inference::build_spike_report(
        est.eigenvalues(),
        &sys,
        f64::INFINITY,
        rgmusic::inference::Selection::Forced { l: 2 },
        rgmusic::inference::ReportMode::KnownNu,
    );
    let robust = Localizer::robust_gmusic(&est, &report_r, 0.5);
    let sample = sample_eigen(&y);
    let report_g = rgmusic::doa::gmusic_report_known(&sample.eigenvalues, &measure, c_n, 2);
    let gmusic = Localizer::gmusic(&sample, &report_g, 0.5);
    let mut max_gap = 0.0f64;
    for k in 0..=400 {
        let theta = (k as f64 * 0.45).to_radians();
        max_gap = max_gap.max((robust.eta(theta) - gmusic.eta(theta)).abs());
    }
    c.check(
        max_gap <= 1e-10,
        format!("robust G-MUSIC vs G-MUSIC under the constant hook: sup gap {max_gap:.2e} (<= 1e-10)"),
    );

    // limiting density vs closed-form Marchenko–Pastur
    let ctx = dirac_ctx();
    let a = (1.0 - 0.2f64.sqrt()).powi(2);
    let b = (1.0 + 0.2f64.sqrt()).powi(2);
    let grid: Vec<f64> = (0..80)
        .map(|k| a + 0.05 + (b - a - 0.1) * k as f64 / 79.0)
        .collect();
    let pts = ctx.limiting_density(&grid, 1e-4);
    let mut worst = 0.0f64;
    for p in &pts {
        let mp = ((b - p.x) * (p.x - a)).sqrt() / (2.0 * std::f64::consts::PI * 0.2 * p.x);
        worst = worst.max((p.density - mp).abs());
    }
    c.check(
        worst <= 1e-3,
        format!("Marchenko–Pastur pointwise density gap {worst:.2e} (<= 1e-3)"),
    );
    c.finish();
}
