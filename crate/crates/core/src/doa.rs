//! Localization functions for direction-of-arrival estimation.
//!
//! Six variants share one evaluation core `η(θ) = 1 − Σ_k ω_k |a(θ)* u_k|²`:
//!
//! * MUSIC / robust MUSIC: `u_k` are the top-L eigenvectors of the sample
//!   covariance (resp. the robust scatter estimate) and `ω ≡ 1`, so `η` is
//!   the noise-subspace projector form `a*Πa`.
//! * G-MUSIC / robust G-MUSIC (and their empirical versions): `ω_k` are the
//!   eigenvector weights of the spiked-model estimators, with `v ≡ 1` for
//!   the sample-covariance baselines.

use faer::{c64, Mat, Side};
use std::io::Write;

use crate::datagen::{steering_vector, SnapshotMatrix};
use crate::inference::{build_spike_report, ReportMode, Selection, SpikeReport};
use crate::scatter::ScatterEstimate;
use crate::spectrum::{DeltaSystem, TauMeasure};
use crate::weightfn::WeightFunction;

/// The six localization methods, in the column order used by the CSV
/// outputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Music,
    RobustMusic,
    Gmusic,
    GmusicEmp,
    RobustGmusic,
    RobustGmusicEmp,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Music,
        Method::RobustMusic,
        Method::Gmusic,
        Method::GmusicEmp,
        Method::RobustGmusic,
        Method::RobustGmusicEmp,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::Music => "music",
            Method::RobustMusic => "robust_music",
            Method::Gmusic => "gmusic",
            Method::GmusicEmp => "emp_gmusic",
            Method::RobustGmusic => "robust_gmusic",
            Method::RobustGmusicEmp => "emp_robust_gmusic",
        }
    }

    pub fn parse(s: &str) -> Option<Method> {
        Method::ALL.iter().copied().find(|m| m.label() == s)
    }
}

/// A sampled localization function with its extracted minima.
#[derive(Debug, Clone)]
pub struct LocalizationCurve {
    pub method: Method,
    /// Angles in radians, strictly increasing.
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// Extracted minima in radians (empty until extraction runs).
    pub minima: Vec<f64>,
}

impl LocalizationCurve {
    /// Two-column CSV `theta_deg,value`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "theta_deg,value")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(out, "{:.6},{:.12e}", t.to_degrees(), v)?;
        }
        Ok(())
    }
}

/// Eigendecomposition of the sample covariance `(1/n) Y Y*`, eigenvalues
/// descending.
#[derive(Debug, Clone)]
pub struct SampleEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Mat<c64>,
}

pub fn sample_eigen(y: &SnapshotMatrix) -> SampleEigen {
    let cov = y.sample_covariance();
    let evd = cov
        .self_adjoint_eigen(Side::Lower)
        .expect("sample covariance eigendecomposition");
    let n = cov.nrows();
    let s = evd.S();
    let u = evd.U();
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Mat::zeros(n, n);
    for k in 0..n {
        let src = n - 1 - k;
        eigenvalues.push(s[src].re);
        for j in 0..n {
            eigenvectors[(j, k)] = u[(j, src)];
        }
    }
    SampleEigen {
        eigenvalues,
        eigenvectors,
    }
}

/// A localization function ready to evaluate at any angle: a weighted set of
/// subspace vectors plus the array spacing.
#[derive(Debug, Clone)]
pub struct Localizer {
    method: Method,
    basis: Mat<c64>,
    weights: Vec<f64>,
    clamp: bool,
    spacing: f64,
}

impl Localizer {
    fn from_columns(
        method: Method,
        source: &Mat<c64>,
        indices: &[usize],
        weights: Vec<f64>,
        clamp: bool,
        spacing: f64,
    ) -> Self {
        let mut basis = Mat::zeros(source.nrows(), indices.len());
        for (col, &k) in indices.iter().enumerate() {
            for j in 0..source.nrows() {
                basis[(j, col)] = source[(j, k)];
            }
        }
        Self {
            method,
            basis,
            weights,
            clamp,
            spacing,
        }
    }

    /// Classical MUSIC on the sample covariance.
    pub fn music(sample: &SampleEigen, n_sources: usize, spacing: f64) -> Self {
        let idx: Vec<usize> = (0..n_sources).collect();
        Self::from_columns(
            Method::Music,
            &sample.eigenvectors,
            &idx,
            vec![1.0; n_sources],
            true,
            spacing,
        )
    }

    /// MUSIC on the robust scatter estimate.
    pub fn robust_music(est: &ScatterEstimate, n_sources: usize, spacing: f64) -> Self {
        let idx: Vec<usize> = (0..n_sources).collect();
        Self::from_columns(
            Method::RobustMusic,
            est.eigenvectors(),
            &idx,
            vec![1.0; n_sources],
            true,
            spacing,
        )
    }

    /// Robust G-MUSIC from a spike report over the scatter eigenvectors.
    pub fn robust_gmusic(est: &ScatterEstimate, report: &SpikeReport, spacing: f64) -> Self {
        let method = match report.mode {
            ReportMode::KnownNu => Method::RobustGmusic,
            ReportMode::Empirical => Method::RobustGmusicEmp,
        };
        Self::from_columns(
            method,
            est.eigenvectors(),
            &report.indices(),
            report.weights(),
            false,
            spacing,
        )
    }

    /// G-MUSIC from a spike report over the sample-covariance eigenvectors.
    pub fn gmusic(sample: &SampleEigen, report: &SpikeReport, spacing: f64) -> Self {
        let method = match report.mode {
            ReportMode::KnownNu => Method::Gmusic,
            ReportMode::Empirical => Method::GmusicEmp,
        };
        Self::from_columns(
            method,
            &sample.eigenvectors,
            &report.indices(),
            report.weights(),
            false,
            spacing,
        )
    }

    /// Arbitrary weighted subspace (test hook).
    pub fn from_parts(
        method: Method,
        basis: Mat<c64>,
        weights: Vec<f64>,
        clamp: bool,
        spacing: f64,
    ) -> Self {
        Self {
            method,
            basis,
            weights,
            clamp,
            spacing,
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// `η(θ) = 1 − Σ_k ω_k |a(θ)* u_k|²`.
    pub fn eta(&self, theta: f64) -> f64 {
        let n = self.basis.nrows();
        let a = steering_vector(theta, n, self.spacing);
        let mut acc = 0.0;
        for (k, &wk) in self.weights.iter().enumerate() {
            let mut dot = c64::new(0.0, 0.0);
            for j in 0..n {
                dot += a[j].conj() * self.basis[(j, k)];
            }
            acc += wk * dot.norm_sqr();
        }
        let v = 1.0 - acc;
        if self.clamp {
            v.clamp(0.0, 1.0)
        } else {
            v
        }
    }

    /// Sample the localization function over a grid.
    pub fn curve(&self, grid: &[f64]) -> LocalizationCurve {
        LocalizationCurve {
            method: self.method,
            grid: grid.to_vec(),
            values: grid.iter().map(|&t| self.eta(t)).collect(),
            minima: Vec::new(),
        }
    }

    /// Extract the `n_sources` deepest minima of the sampled curve, each
    /// refined by golden-section search on the true function inside its
    /// bracketing grid cell (to ~1e-7 rad).
    pub fn extract_angles(&self, curve: &LocalizationCurve, n_sources: usize) -> Vec<f64> {
        let picks = grid_minima(&curve.grid, &curve.values, n_sources);
        let mut out: Vec<f64> = picks
            .into_iter()
            .map(|i| {
                if i == 0 || i + 1 == curve.grid.len() {
                    curve.grid[i]
                } else {
                    golden_min(
                        |t| self.eta(t),
                        curve.grid[i - 1],
                        curve.grid[i + 1],
                        1e-7,
                    )
                }
            })
            .collect();
        out.sort_by(|a, b| a.partial_cmp(b).unwrap());
        out
    }
}

/// Grid indices of the `n_sources` deepest strict local minima (padded by
/// duplicating the deepest when fewer exist; the global minimum if none).
fn grid_minima(grid: &[f64], values: &[f64], n_sources: usize) -> Vec<usize> {
    assert!(!grid.is_empty(), "empty grid");
    assert!(n_sources >= 1);
    let mut minima: Vec<usize> = Vec::new();
    for i in 1..grid.len().saturating_sub(1) {
        if values[i] < values[i - 1] && values[i] < values[i + 1] {
            minima.push(i);
        }
    }
    if minima.is_empty() {
        let gmin = (0..grid.len())
            .min_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap())
            .unwrap();
        minima.push(gmin);
    }
    minima.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    minima.truncate(n_sources);
    while minima.len() < n_sources {
        minima.push(minima[0]);
    }
    minima
}

/// Extract minima from a sampled curve alone: the deepest strict local
/// minima refined by parabolic interpolation through the bracketing cell.
pub fn extract_angles(curve: &LocalizationCurve, n_sources: usize) -> Vec<f64> {
    let picks = grid_minima(&curve.grid, &curve.values, n_sources);
    let mut out: Vec<f64> = picks
        .into_iter()
        .map(|i| {
            if i == 0 || i + 1 == curve.grid.len() {
                return curve.grid[i];
            }
            let (t0, t1, t2) = (curve.grid[i - 1], curve.grid[i], curve.grid[i + 1]);
            let (v0, v1, v2) = (
                curve.values[i - 1],
                curve.values[i],
                curve.values[i + 1],
            );
            let denom = v0 - 2.0 * v1 + v2;
            if denom <= 0.0 {
                return t1;
            }
            let h = 0.5 * (t2 - t0);
            (t1 + 0.5 * h * (v0 - v2) / denom).clamp(t0, t2)
        })
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, xtol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > xtol {
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    0.5 * (a + b)
}

// ---------------------------------------------------------------------------
// pointwise forms and the v≡1 baselines

/// `η̂(θ) = a(θ)* Π a(θ)` over the sample covariance noise subspace.
pub fn eta_music(theta: f64, sample: &SampleEigen, n_sources: usize, spacing: f64) -> f64 {
    Localizer::music(sample, n_sources, spacing).eta(theta)
}

/// `η̂_R(θ) = a(θ)* Π a(θ)` over the robust scatter noise subspace.
pub fn eta_robust_music(
    theta: f64,
    est: &ScatterEstimate,
    n_sources: usize,
    spacing: f64,
) -> f64 {
    Localizer::robust_music(est, n_sources, spacing).eta(theta)
}

/// `η̂_RG(θ) = 1 − Σ w_k |a(θ)* û_k|²` from a spike report.
pub fn eta_robust_gmusic(
    theta: f64,
    est: &ScatterEstimate,
    report: &SpikeReport,
    spacing: f64,
) -> f64 {
    Localizer::robust_gmusic(est, report, spacing).eta(theta)
}

/// `η̂_G(θ)` from a sample-covariance spike report.
pub fn eta_gmusic(
    theta: f64,
    sample: &SampleEigen,
    report: &SpikeReport,
    spacing: f64,
) -> f64 {
    Localizer::gmusic(sample, report, spacing).eta(theta)
}

/// Known-law G-MUSIC report: the spiked-model weights with `v ≡ 1`,
/// integrating against `ν`, over the top `l` sample eigenvalues.
pub fn gmusic_report_known(
    sample_eigenvalues: &[f64],
    measure: &TauMeasure,
    c: f64,
    l: usize,
) -> SpikeReport {
    let w = WeightFunction::constant_one(c).expect("0 < c < 1");
    let sys = DeltaSystem::from_measure(measure, &w, 1.0);
    build_spike_report(
        sample_eigenvalues,
        &sys,
        f64::INFINITY,
        Selection::Forced { l },
        ReportMode::KnownNu,
    )
}

/// Empirical G-MUSIC report: `v ≡ 1` with moment-based scale estimates.
pub fn gmusic_report_empirical(
    sample_eigenvalues: &[f64],
    tau_hats: &[f64],
    c_n: f64,
    l: usize,
) -> SpikeReport {
    let w = WeightFunction::constant_one(c_n).expect("0 < c_n < 1");
    let sys = DeltaSystem::from_tau_hats(tau_hats, 1.0, &w);
    build_spike_report(
        sample_eigenvalues,
        &sys,
        f64::INFINITY,
        Selection::Forced { l },
        ReportMode::Empirical,
    )
}

/// Moment-based scale estimates for the `v ≡ 1` baseline:
/// `τ̂_i = max(1e-6, ‖y_i‖²/N − Σ_l p̂_l / N)`.
pub fn moment_tau_hats(y: &SnapshotMatrix, power_sum_estimate: f64) -> Vec<f64> {
    let n_dim = y.n_antennas();
    let data = y.data();
    (0..y.n_samples())
        .map(|i| {
            let mut norm_sq = 0.0;
            for j in 0..n_dim {
                norm_sq += data[(j, i)].norm_sqr();
            }
            (norm_sq / n_dim as f64 - power_sum_estimate / n_dim as f64).max(1e-6)
        })
        .collect()
}
