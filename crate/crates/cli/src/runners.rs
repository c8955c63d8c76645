//! Monte Carlo experiment runners behind the CLI subcommands.
//!
//! Trials derive independent RNG streams from `(seed, trial index)` and are
//! aggregated by index, so results are identical for any worker count.

use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use rgmusic::datagen::{synthesize, SnapshotMatrix};
use rgmusic::doa::{
    gmusic_report_empirical, moment_tau_hats, sample_eigen, Localizer, LocalizationCurve, Method,
    SampleEigen,
};
use rgmusic::inference::{
    build_spike_report, detect_spikes_empirical, report_forced, report_forced_empirical,
    ReportMode, Selection, SpikeReport,
};
use rgmusic::rng::{role, stream};
use rgmusic::scatter::{solve_fixed_point, ScatterEstimate, DEFAULT_MAX_ITER, DEFAULT_TOL};
use rgmusic::snapshot_io::load_snapshots;
use rgmusic::spectrum::{DeltaSystem, SpectralContext};
use rgmusic::weightfn::WeightFunction;

use crate::config::{ConfigError, ExperimentConfig};
use crate::csvout::write_csv;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    /// Process exit code: 2 for configuration problems, 3 for numerical or
    /// output failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            _ => 3,
        }
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, RunError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if workers > 0 {
        b = b.num_threads(workers);
    }
    b.build()
        .map_err(|e| RunError::Numerical(format!("thread pool: {e}")))
}

fn comment(cfg: &ExperimentConfig) -> String {
    format!("config_hash={} seed={}", cfg.config_hash(), cfg.seed)
}

// ---------------------------------------------------------------------------
// shared per-trial machinery

/// Precomputed, power-independent solver state shared by all trials.
struct KnownContexts {
    ctx: SpectralContext,
    gsys: DeltaSystem,
}

impl KnownContexts {
    fn build(cfg: &ExperimentConfig) -> Result<Self, RunError> {
        let measure = cfg.known_measure();
        let w_limit = cfg.weight()?;
        let ctx = SpectralContext::new(measure.clone(), w_limit)
            .map_err(|e| RunError::Numerical(e.to_string()))?;
        let g_w = WeightFunction::constant_one(cfg.aspect_ratio())
            .map_err(|e| RunError::Numerical(e.to_string()))?;
        let gsys = DeltaSystem::from_measure(&measure, &g_w, 1.0);
        Ok(Self { ctx, gsys })
    }
}

/// The six localizers for one realization, in `Method::ALL` order. Robust
/// entries are `None` when the fixed point failed to converge.
fn build_localizers(
    y: &SnapshotMatrix,
    sample: &SampleEigen,
    est: Option<&ScatterEstimate>,
    known: &KnownContexts,
    w_cn: &WeightFunction,
    l: usize,
    spacing: f64,
) -> [Option<Localizer>; 6] {
    let c_n = y.aspect_ratio();

    let music = Some(Localizer::music(sample, l, spacing));

    let g_known_report = build_spike_report(
        &sample.eigenvalues,
        &known.gsys,
        f64::INFINITY,
        Selection::Forced { l },
        ReportMode::KnownNu,
    );
    let gmusic = Some(Localizer::gmusic(sample, &g_known_report, spacing));

    // moment-based scales, refined once with the first-pass power estimates
    let tau0 = moment_tau_hats(y, 0.0);
    let rep0 = gmusic_report_empirical(&sample.eigenvalues, &tau0, c_n, l);
    let power_sum: f64 = rep0.detected.iter().map(|d| d.power.max(0.0)).sum();
    let tau1 = moment_tau_hats(y, power_sum);
    let g_emp_report = gmusic_report_empirical(&sample.eigenvalues, &tau1, c_n, l);
    let gmusic_emp = Some(Localizer::gmusic(sample, &g_emp_report, spacing));

    let (robust_music, rg_known, rg_emp) = match est {
        Some(est) => {
            let rep_known = report_forced(est, &known.ctx, l);
            let rep_emp = report_forced_empirical(est, w_cn, l);
            (
                Some(Localizer::robust_music(est, l, spacing)),
                Some(Localizer::robust_gmusic(est, &rep_known, spacing)),
                Some(Localizer::robust_gmusic(est, &rep_emp, spacing)),
            )
        }
        None => (None, None, None),
    };

    [music, robust_music, gmusic, gmusic_emp, rg_known, rg_emp]
}

/// Estimate of `θ_1`: extract the `l` deepest minima and keep the one
/// closest to the true angle (ties toward the smaller angle).
fn theta1_estimate(loc: &Localizer, grid: &[f64], l: usize, theta1: f64) -> f64 {
    let curve = loc.curve(grid);
    let angles = loc.extract_angles(&curve, l);
    let mut best = angles[0];
    let mut best_dist = (angles[0] - theta1).abs();
    for &a in &angles[1..] {
        let d = (a - theta1).abs();
        if d < best_dist {
            best = a;
            best_dist = d;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// spectrum histogram

#[derive(Debug, Clone)]
pub struct SpectrumArtifacts {
    pub gamma: f64,
    pub s_plus: f64,
    pub s_plus_mu: f64,
    pub p_minus: f64,
    pub spike_locations: Vec<f64>,
    pub robust_eigs: Vec<Vec<f64>>,
    pub sample_eigs: Vec<Vec<f64>>,
    pub skipped_trials: usize,
}

/// Eigenvalue histogram data for `Ĉ_N` and `(1/n)YY*`, the limiting density
/// and the threshold markers. Writes `eigs.csv`, `density.csv`,
/// `thresholds.csv`.
pub fn run_spectrum_histogram(cfg: &ExperimentConfig) -> Result<SpectrumArtifacts, RunError> {
    cfg.validate()?;
    let known = KnownContexts::build(cfg)?;
    let sources = cfg.sources()?;
    let w_cn = cfg.weight()?;
    let noise = cfg.noise_model();

    let results: Vec<Option<(Vec<f64>, Vec<f64>)>> = pool(cfg.workers)?.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream(cfg.seed, t as u64, role::NOISE);
                let (y, _) = synthesize(&sources, noise, cfg.n_antennas, cfg.n_samples, &mut rng)
                    .ok()?;
                let est = solve_fixed_point(&y, &w_cn, DEFAULT_TOL, DEFAULT_MAX_ITER).ok()?;
                let sample = sample_eigen(&y);
                Some((est.eigenvalues().to_vec(), sample.eigenvalues))
            })
            .collect()
    });

    let mut robust_eigs = Vec::new();
    let mut sample_eigs = Vec::new();
    let mut skipped = 0usize;
    for r in results {
        match r {
            Some((re, se)) => {
                robust_eigs.push(re);
                sample_eigs.push(se);
            }
            None => skipped += 1,
        }
    }

    let spike_locations: Vec<f64> = cfg
        .powers_linear()
        .iter()
        .filter_map(|&p| known.ctx.spike_location(p))
        .collect();

    let art = SpectrumArtifacts {
        gamma: known.ctx.gamma(),
        s_plus: known.ctx.s_plus(),
        s_plus_mu: known.ctx.s_plus_mu(),
        p_minus: known.ctx.p_minus(),
        spike_locations,
        robust_eigs,
        sample_eigs,
        skipped_trials: skipped,
    };

    let cmt = comment(cfg);
    let mut rows = Vec::new();
    for (t, eigs) in art.robust_eigs.iter().enumerate() {
        for (i, e) in eigs.iter().enumerate() {
            rows.push(format!("{t},robust,{i},{e:.12e}"));
        }
    }
    for (t, eigs) in art.sample_eigs.iter().enumerate() {
        for (i, e) in eigs.iter().enumerate() {
            rows.push(format!("{t},sample,{i},{e:.12e}"));
        }
    }
    write_csv(
        &cfg.out_dir.join("eigs.csv"),
        &cmt,
        "trial,matrix,index,value",
        rows,
    )?;

    let hi = art
        .spike_locations
        .iter()
        .fold(art.s_plus, |acc, &l| acc.max(l))
        * 1.15;
    let grid: Vec<f64> = (0..400).map(|k| 1e-3 + (hi - 1e-3) * k as f64 / 399.0).collect();
    let density = known.ctx.limiting_density(&grid, cfg.density_eps);
    write_csv(
        &cfg.out_dir.join("density.csv"),
        &cmt,
        "x,density,converged",
        density
            .iter()
            .map(|p| format!("{:.8e},{:.12e},{}", p.x, p.density, p.converged)),
    )?;

    let mut rows = vec![
        format!("gamma,{:.12e}", art.gamma),
        format!("s_plus,{:.12e}", art.s_plus),
        format!("s_plus_mu,{:.12e}", art.s_plus_mu),
        format!("p_minus,{:.12e}", art.p_minus),
    ];
    for (j, lam) in art.spike_locations.iter().enumerate() {
        rows.push(format!("lambda_{},{:.12e}", j + 1, lam));
    }
    rows.push(format!("skipped_trials,{}", art.skipped_trials));
    write_csv(&cfg.out_dir.join("thresholds.csv"), &cmt, "name,value", rows)?;

    Ok(art)
}

// ---------------------------------------------------------------------------
// one-shot localization curves

#[derive(Debug, Clone)]
pub struct OneshotArtifacts {
    /// All six curves in `Method::ALL` order (`None` where the robust solve
    /// failed).
    pub curves: Vec<Option<LocalizationCurve>>,
    /// Extracted angles per available method.
    pub angles: Vec<(Method, Vec<f64>)>,
}

/// One synthetic realization of all localization functions on a common
/// grid. Writes `localization.csv`.
pub fn run_localization_oneshot(cfg: &ExperimentConfig) -> Result<OneshotArtifacts, RunError> {
    cfg.validate()?;
    let known = KnownContexts::build(cfg)?;
    let sources = cfg.sources()?;
    let w_cn = cfg.weight()?;
    let l = sources.n_sources();
    let grid = cfg.angle_grid();

    let mut rng = stream(cfg.seed, 0, role::NOISE);
    let (y, _) = synthesize(
        &sources,
        cfg.noise_model(),
        cfg.n_antennas,
        cfg.n_samples,
        &mut rng,
    )
    .map_err(|e| RunError::Numerical(e.to_string()))?;
    let sample = sample_eigen(&y);
    let est = solve_fixed_point(&y, &w_cn, DEFAULT_TOL, DEFAULT_MAX_ITER)
        .map_err(|e| RunError::Numerical(e.to_string()))?;
    let locs = build_localizers(&y, &sample, Some(&est), &known, &w_cn, l, cfg.spacing);

    let mut curves: Vec<Option<LocalizationCurve>> = Vec::new();
    let mut angles = Vec::new();
    for loc in locs.iter() {
        match loc {
            Some(loc) => {
                let curve = loc.curve(&grid);
                angles.push((loc.method(), loc.extract_angles(&curve, l)));
                curves.push(Some(curve));
            }
            None => curves.push(None),
        }
    }

    let selected: Vec<usize> = (0..Method::ALL.len())
        .filter(|&i| cfg.methods.contains(&Method::ALL[i]) && curves[i].is_some())
        .collect();
    let header = std::iter::once("theta_deg".to_string())
        .chain(selected.iter().map(|&i| Method::ALL[i].label().to_string()))
        .collect::<Vec<_>>()
        .join(",");
    let rows = (0..grid.len()).map(|k| {
        let mut fields = vec![format!("{:.6}", grid[k].to_degrees())];
        for &i in &selected {
            fields.push(format!("{:.12e}", curves[i].as_ref().unwrap().values[k]));
        }
        fields.join(",")
    });
    write_csv(
        &cfg.out_dir.join("localization.csv"),
        &comment(cfg),
        &header,
        rows,
    )?;

    Ok(OneshotArtifacts { curves, angles })
}

// ---------------------------------------------------------------------------
// MSE sweep

#[derive(Debug, Clone)]
pub struct MseRow {
    pub power_db: f64,
    /// Mean square error per method in `Method::ALL` order (radians²; NaN
    /// when every trial failed).
    pub mse: [f64; 6],
    pub fails: [usize; 6],
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct MseArtifacts {
    pub rows: Vec<MseRow>,
}

/// Monte Carlo mean square error of the `θ_1` estimate for each method, per
/// source power. Writes `mse.csv`.
pub fn run_mse_sweep(cfg: &ExperimentConfig) -> Result<MseArtifacts, RunError> {
    cfg.validate()?;
    let known = KnownContexts::build(cfg)?;
    let w_cn = cfg.weight()?;
    let noise = cfg.noise_model();
    let grid = cfg.mse_grid();
    let theta1 = cfg.angles_deg[0].to_radians();
    let n_sources = cfg.angles_deg.len();
    let pool = pool(cfg.workers)?;

    let mut rows = Vec::new();
    for (pi, &db) in cfg.sweep_db.iter().enumerate() {
        let p = 10f64.powf(db / 10.0);
        let sources = cfg.sources_with_powers(&vec![p; n_sources])?;
        let per_trial: Vec<[Option<f64>; 6]> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|t| {
                    let trial_id = (pi * cfg.trials + t) as u64;
                    let mut rng = stream(cfg.seed, trial_id, role::NOISE);
                    let y = match synthesize(
                        &sources,
                        noise,
                        cfg.n_antennas,
                        cfg.n_samples,
                        &mut rng,
                    ) {
                        Ok((y, _)) => y,
                        Err(_) => return [None; 6],
                    };
                    let sample = sample_eigen(&y);
                    let est = solve_fixed_point(&y, &w_cn, DEFAULT_TOL, DEFAULT_MAX_ITER).ok();
                    let locs = build_localizers(
                        &y,
                        &sample,
                        est.as_ref(),
                        &known,
                        &w_cn,
                        n_sources,
                        cfg.spacing,
                    );
                    locs.map(|loc| {
                        loc.map(|loc| theta1_estimate(&loc, &grid, n_sources, theta1))
                    })
                })
                .collect()
        });

        let mut sums = [0.0f64; 6];
        let mut counts = [0usize; 6];
        let mut fails = [0usize; 6];
        for trial in &per_trial {
            for m in 0..6 {
                match trial[m] {
                    Some(theta) => {
                        sums[m] += (theta - theta1) * (theta - theta1);
                        counts[m] += 1;
                    }
                    None => fails[m] += 1,
                }
            }
        }
        let mut mse = [f64::NAN; 6];
        for m in 0..6 {
            if counts[m] > 0 {
                mse[m] = sums[m] / counts[m] as f64;
            }
        }
        rows.push(MseRow {
            power_db: db,
            mse,
            fails,
            trials: cfg.trials,
        });
    }

    let header = {
        let mut h = vec!["power_db".to_string()];
        h.extend(Method::ALL.iter().map(|m| format!("mse_{}", m.label())));
        h.extend(Method::ALL.iter().map(|m| format!("fails_{}", m.label())));
        h.push("trials".to_string());
        h.join(",")
    };
    write_csv(
        &cfg.out_dir.join("mse.csv"),
        &comment(cfg),
        &header,
        rows.iter().map(|r| {
            let mut fields = vec![format!("{}", r.power_db)];
            fields.extend(r.mse.iter().map(|v| format!("{v:.12e}")));
            fields.extend(r.fails.iter().map(|f| format!("{f}")));
            fields.push(format!("{}", r.trials));
            fields.join(",")
        }),
    )?;

    Ok(MseArtifacts { rows })
}

// ---------------------------------------------------------------------------
// estimation on external data

#[derive(Debug, Clone)]
pub struct EstimateArtifacts {
    pub n_antennas: usize,
    pub n_samples: usize,
    pub report: SpikeReport,
    pub angles_deg: Vec<f64>,
    pub summary: String,
}

/// Full pipeline on an external snapshot file: robust scatter, empirical
/// spike report, robust G-MUSIC angles. Writes `spikes.csv`,
/// `localization.csv` and `angles.csv`.
pub fn run_estimate(cfg: &ExperimentConfig, input: &Path) -> Result<EstimateArtifacts, RunError> {
    let y = load_snapshots(input).map_err(|e| RunError::Config(ConfigError::Invalid(e.to_string())))?;
    let (n_dim, n) = (y.n_antennas(), y.n_samples());
    if n <= n_dim {
        return Err(RunError::Config(ConfigError::Invalid(format!(
            "need n > N, file has N = {n_dim}, n = {n}"
        ))));
    }
    let c_n = n_dim as f64 / n as f64;
    let w_cn = WeightFunction::maronna(cfg.alpha, c_n)
        .map_err(|e| RunError::Config(ConfigError::Invalid(e.to_string())))?;

    let est = solve_fixed_point(&y, &w_cn, DEFAULT_TOL, DEFAULT_MAX_ITER)
        .map_err(|e| RunError::Numerical(e.to_string()))?;
    let report = detect_spikes_empirical(&est, &w_cn, cfg.l_max, cfg.detection_margin);

    let grid = cfg.angle_grid();
    let mut angles_deg = Vec::new();
    let mut curve_rows = Vec::new();
    if !report.detected.is_empty() {
        let loc = Localizer::robust_gmusic(&est, &report, cfg.spacing);
        let curve = loc.curve(&grid);
        let angles = loc.extract_angles(&curve, report.detected.len());
        angles_deg = angles.iter().map(|a| a.to_degrees()).collect();
        curve_rows = curve
            .grid
            .iter()
            .zip(&curve.values)
            .map(|(t, v)| format!("{:.6},{:.12e}", t.to_degrees(), v))
            .collect();
    }

    let mut summary = String::new();
    summary.push_str(&format!(
        "loaded {} antennas x {} snapshots from {}\n",
        n_dim,
        n,
        input.display()
    ));
    summary.push_str(&format!(
        "fixed point converged in {} iterations (residual {:.2e}), gamma_hat = {:.6}\n",
        est.iterations(),
        est.residual(),
        est.gamma_hat()
    ));
    summary.push_str(&format!(
        "detection threshold S+ = {:.6}, detected {} source(s)\n",
        report.threshold,
        report.detected.len()
    ));
    for (j, d) in report.detected.iter().enumerate() {
        summary.push_str(&format!(
            "  source {}: eigenvalue {:.6}, power estimate {:.6} ({:.2} dB)\n",
            j + 1,
            d.lambda,
            d.power,
            10.0 * d.power.log10()
        ));
    }
    if !angles_deg.is_empty() {
        let joined = angles_deg
            .iter()
            .map(|a| format!("{a:.4}"))
            .collect::<Vec<_>>()
            .join(", ");
        summary.push_str(&format!("robust G-MUSIC angles (deg): {joined}\n"));
    }

    let cmt = comment(cfg);
    let mut spike_buf = Vec::new();
    report
        .write_csv(&mut spike_buf)
        .map_err(RunError::Io)?;
    let spike_text = String::from_utf8(spike_buf).expect("utf8 csv");
    let mut lines = spike_text.lines();
    let header = lines.next().unwrap_or("k,lambda,p_hat,w,flags").to_string();
    write_csv(
        &cfg.out_dir.join("spikes.csv"),
        &cmt,
        &header,
        lines.map(|s| s.to_string()),
    )?;
    write_csv(
        &cfg.out_dir.join("localization.csv"),
        &cmt,
        "theta_deg,value",
        curve_rows,
    )?;
    write_csv(
        &cfg.out_dir.join("angles.csv"),
        &cmt,
        "theta_deg",
        angles_deg.iter().map(|a| format!("{a:.6}")),
    )?;

    Ok(EstimateArtifacts {
        n_antennas: n_dim,
        n_samples: n,
        report,
        angles_deg,
        summary,
    })
}
