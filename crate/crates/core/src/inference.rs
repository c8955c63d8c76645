//! Estimation from isolated eigenvalues: spike detection, source powers,
//! eigenvector-projection weights and bilinear forms, in a known-law and a
//! purely empirical variant.
//!
//! Both variants evaluate the same integral functionals, against the
//! limiting scale law `ν` or against the estimated scales `τ̂_i`; see
//! [`DeltaSystem`].

use faer::{c64, ColRef};
use std::io::Write;

use crate::scatter::ScatterEstimate;
use crate::spectrum::{
    empirical_s_plus, DeltaSystem, SpectralContext, SpectrumError,
};
use crate::weightfn::WeightFunction;

/// Default detection margin above the bound `S⁺`.
pub const DETECTION_MARGIN: f64 = 0.02;

/// Maximum iterations of the blind fixed-point fallback for `δ(λ̂)`.
pub const DELTA_FALLBACK_MAX_ITER: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    KnownNu,
    Empirical,
}

/// One detected (or forced) spike and its estimates.
#[derive(Debug, Clone, Copy)]
pub struct SpikeDetection {
    /// Index into the descending eigenvalue list.
    pub index: usize,
    pub lambda: f64,
    pub power: f64,
    pub weight: f64,
    /// `δ(λ̂)` had no admissible solution and the blind fixed-point value
    /// was used instead.
    pub delta_fallback: bool,
    /// The eigenvector-weight correction factor was positive.
    pub weight_valid: bool,
}

/// Detection outcome over the leading eigenvalues.
#[derive(Debug, Clone)]
pub struct SpikeReport {
    pub detected: Vec<SpikeDetection>,
    pub threshold: f64,
    pub mode: ReportMode,
}

impl SpikeReport {
    pub fn weights(&self) -> Vec<f64> {
        self.detected.iter().map(|d| d.weight).collect()
    }

    pub fn indices(&self) -> Vec<usize> {
        self.detected.iter().map(|d| d.index).collect()
    }

    /// CSV rows `k,lambda,p_hat,w,flags`.
    pub fn write_csv(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "k,lambda,p_hat,w,flags")?;
        for d in &self.detected {
            let mut flags = Vec::new();
            if d.delta_fallback {
                flags.push("delta_fallback");
            }
            if !d.weight_valid {
                flags.push("weight_invalid");
            }
            let flags = if flags.is_empty() {
                "-".to_string()
            } else {
                flags.join("|")
            };
            writeln!(
                out,
                "{},{:.12e},{:.12e},{:.12e},{}",
                d.index, d.lambda, d.power, d.weight, flags
            )?;
        }
        Ok(())
    }
}

/// How to pick eigenvalues for a report.
#[derive(Debug, Clone, Copy)]
pub enum Selection {
    /// Keep eigenvalues above `threshold·(1+margin)`, at most `l_max`.
    Threshold { l_max: usize, margin: f64 },
    /// Keep exactly the top `l` eigenvalues regardless of the threshold.
    Forced { l: usize },
}

/// Evaluate one eigenvalue against a δ-system, falling back to the blind
/// fixed point when no admissible solution exists.
fn spike_row(sys: &DeltaSystem, index: usize, lambda: f64) -> SpikeDetection {
    let (delta, fallback) = match sys.solve_delta(lambda) {
        Ok(sol) => (sol.delta, false),
        Err(_) => (sys.delta_picard(lambda, DELTA_FALLBACK_MAX_ITER).delta, true),
    };
    let power = sys.power_at(delta);
    let (weight, margin) = sys.eigvec_weight_at_blind(delta);
    SpikeDetection {
        index,
        lambda,
        power,
        weight,
        delta_fallback: fallback,
        weight_valid: margin > 0.0,
    }
}

/// Build a spike report from descending eigenvalues and a δ-system.
pub fn build_spike_report(
    eigenvalues: &[f64],
    sys: &DeltaSystem,
    threshold: f64,
    selection: Selection,
    mode: ReportMode,
) -> SpikeReport {
    let picked: Vec<usize> = match selection {
        Selection::Threshold { l_max, margin } => (0..eigenvalues.len().min(l_max))
            .filter(|&k| eigenvalues[k] > threshold * (1.0 + margin))
            .collect(),
        Selection::Forced { l } => (0..eigenvalues.len().min(l)).collect(),
    };
    SpikeReport {
        detected: picked
            .into_iter()
            .map(|k| spike_row(sys, k, eigenvalues[k]))
            .collect(),
        threshold,
        mode,
    }
}

/// Detect spikes of a scatter estimate against the known-law context.
pub fn detect_spikes(
    est: &ScatterEstimate,
    ctx: &SpectralContext,
    l_max: usize,
    margin: f64,
) -> SpikeReport {
    build_spike_report(
        est.eigenvalues(),
        ctx.delta_system(),
        ctx.s_plus(),
        Selection::Threshold { l_max, margin },
        ReportMode::KnownNu,
    )
}

/// Detect spikes using only the estimate's own `τ̂_i` and `γ̂_n`
/// (`w` must carry the finite-sample aspect ratio `c_n`).
pub fn detect_spikes_empirical(
    est: &ScatterEstimate,
    w: &WeightFunction,
    l_max: usize,
    margin: f64,
) -> SpikeReport {
    let sys = DeltaSystem::from_tau_hats(est.tau_hat(), est.gamma_hat(), w);
    build_spike_report(
        est.eigenvalues(),
        &sys,
        empirical_s_plus(w, est.gamma_hat()),
        Selection::Threshold { l_max, margin },
        ReportMode::Empirical,
    )
}

/// Forced-cardinality known-law report (blind mode used by the sweeps).
pub fn report_forced(est: &ScatterEstimate, ctx: &SpectralContext, l: usize) -> SpikeReport {
    build_spike_report(
        est.eigenvalues(),
        ctx.delta_system(),
        ctx.s_plus(),
        Selection::Forced { l },
        ReportMode::KnownNu,
    )
}

/// Forced-cardinality empirical report.
pub fn report_forced_empirical(
    est: &ScatterEstimate,
    w: &WeightFunction,
    l: usize,
) -> SpikeReport {
    let sys = DeltaSystem::from_tau_hats(est.tau_hat(), est.gamma_hat(), w);
    build_spike_report(
        est.eigenvalues(),
        &sys,
        empirical_s_plus(w, est.gamma_hat()),
        Selection::Forced { l },
        ReportMode::Empirical,
    )
}

/// Known-law power estimate `−c (δ(λ̂) ∫ v/(1+δ(λ̂)τv) dν)⁻¹`.
pub fn estimate_power_known(
    lambda_hat: f64,
    ctx: &SpectralContext,
) -> Result<f64, SpectrumError> {
    let sys = ctx.delta_system();
    let sol = sys.solve_delta(lambda_hat)?;
    Ok(sys.power_at(sol.delta))
}

/// Purely empirical power estimate from an arbitrary `τ̂` list.
pub fn estimate_power_from_taus(
    lambda_hat: f64,
    tau_hats: &[f64],
    gamma_hat: f64,
    w: &WeightFunction,
) -> Result<f64, SpectrumError> {
    let bound = empirical_s_plus(w, gamma_hat);
    if w.phi_inf().is_finite() && lambda_hat <= bound {
        return Err(SpectrumError::BelowThreshold {
            x: lambda_hat,
            bound,
        });
    }
    let sys = DeltaSystem::from_tau_hats(tau_hats, gamma_hat, w);
    let sol = sys.solve_delta(lambda_hat)?;
    Ok(sys.power_at(sol.delta))
}

/// Purely empirical power estimate from a converged scatter estimate.
pub fn estimate_power_empirical(
    lambda_hat: f64,
    est: &ScatterEstimate,
    w: &WeightFunction,
) -> Result<f64, SpectrumError> {
    estimate_power_from_taus(lambda_hat, est.tau_hat(), est.gamma_hat(), w)
}

/// Known-law eigenvector weight `w_k` at an isolated eigenvalue.
pub fn eigenvector_weight_known(
    lambda_hat: f64,
    ctx: &SpectralContext,
) -> Result<f64, SpectrumError> {
    let sys = ctx.delta_system();
    let sol = sys.solve_delta(lambda_hat)?;
    sys.eigvec_weight_at(sol.delta)
}

/// Purely empirical eigenvector weight `ŵ_k`.
pub fn eigenvector_weight_empirical(
    lambda_hat: f64,
    est: &ScatterEstimate,
    w: &WeightFunction,
) -> Result<f64, SpectrumError> {
    let sys = DeltaSystem::from_tau_hats(est.tau_hat(), est.gamma_hat(), w);
    let sol = sys.solve_delta(lambda_hat)?;
    sys.eigvec_weight_at(sol.delta)
}

/// Weighted bilinear form `Σ_{k∈group} w_k (a* û_k)(û_k* b)` estimating
/// `a* Π b` for the population eigenspace of a repeated power.
///
/// `weights[j]` pairs with `group[j]`.
pub fn bilinear_form_estimate(
    a: ColRef<'_, c64>,
    b: ColRef<'_, c64>,
    group: &[usize],
    est: &ScatterEstimate,
    weights: &[f64],
) -> c64 {
    assert_eq!(group.len(), weights.len());
    let u = est.eigenvectors();
    let mut acc = c64::new(0.0, 0.0);
    for (&k, &wk) in group.iter().zip(weights) {
        let mut au = c64::new(0.0, 0.0);
        let mut ub = c64::new(0.0, 0.0);
        for j in 0..u.nrows() {
            au += a[j].conj() * u[(j, k)];
            ub += u[(j, k)].conj() * b[j];
        }
        acc += au * ub * wk;
    }
    acc
}
