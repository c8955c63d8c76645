//! Synthetic array snapshots: steering vectors, impulsive noise scales and
//! the low-rank-signal-plus-noise model
//! `y_i = Σ_l √p_l a(θ_l) s_li + √τ_i w_i`.

use faer::{c64, Col, Mat};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StudentT};
use thiserror::Error;

use crate::rng::standard_complex;

#[derive(Debug, Error)]
pub enum DataGenError {
    #[error("invalid source configuration: {0}")]
    InvalidSources(String),
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("need at least as many antennas as sources (N = {n_antennas}, L = {n_sources})")]
    TooManySources { n_antennas: usize, n_sources: usize },
}

/// Source directions and powers for a uniform linear array.
#[derive(Debug, Clone)]
pub struct SourceConfig {
    angles: Vec<f64>,
    powers: Vec<f64>,
    spacing: f64,
}

impl SourceConfig {
    /// `angles` in radians (pairwise distinct), `powers` sorted
    /// non-increasing, `spacing` in wavelengths.
    pub fn new(angles: Vec<f64>, powers: Vec<f64>, spacing: f64) -> Result<Self, DataGenError> {
        if angles.len() != powers.len() {
            return Err(DataGenError::InvalidSources(format!(
                "{} angles vs {} powers",
                angles.len(),
                powers.len()
            )));
        }
        for (i, a) in angles.iter().enumerate() {
            for b in angles.iter().skip(i + 1) {
                if a == b {
                    return Err(DataGenError::InvalidSources(format!(
                        "duplicate angle {a}"
                    )));
                }
            }
        }
        if powers.windows(2).any(|p| p[0] < p[1]) {
            return Err(DataGenError::InvalidSources(
                "powers must be non-increasing".into(),
            ));
        }
        if powers.iter().any(|&p| p < 0.0) {
            return Err(DataGenError::InvalidSources("negative power".into()));
        }
        if !(spacing > 0.0) {
            return Err(DataGenError::InvalidSources(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        Ok(Self {
            angles,
            powers,
            spacing,
        })
    }

    /// No sources: pure noise.
    pub fn empty() -> Self {
        Self {
            angles: vec![],
            powers: vec![],
            spacing: 0.5,
        }
    }

    pub fn n_sources(&self) -> usize {
        self.angles.len()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn powers(&self) -> &[f64] {
        &self.powers
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// The scaled steering matrix `A = [√p_1 a(θ_1), …, √p_L a(θ_L)]`.
    pub fn steering_matrix(&self, n_antennas: usize) -> Mat<c64> {
        let mut a = Mat::zeros(n_antennas, self.angles.len());
        for (l, (&theta, &p)) in self.angles.iter().zip(&self.powers).enumerate() {
            let col = steering_vector(theta, n_antennas, self.spacing);
            let s = p.sqrt();
            for j in 0..n_antennas {
                a[(j, l)] = col[j] * s;
            }
        }
        a
    }
}

/// Law of the noise scales `τ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseModel {
    /// `τ_i = χ²(2N) / (2N)`: the snapshots are white complex Gaussian.
    Gaussian,
    /// `τ_i = t²(β−2)/β` with `t` Student-t with `beta > 2` degrees of
    /// freedom, normalized so `E[τ] = 1`.
    StudentT { beta: f64 },
    /// Deterministic scales: `τ_i = 1` except for the last `count` samples,
    /// which get `τ_i = value`.
    Outlier { count: usize, value: f64 },
}

impl NoiseModel {
    fn validate(&self, n_samples: usize) -> Result<(), DataGenError> {
        match *self {
            NoiseModel::Gaussian => Ok(()),
            NoiseModel::StudentT { beta } => {
                if beta > 2.0 {
                    Ok(())
                } else {
                    Err(DataGenError::InvalidNoise(format!(
                        "Student-t requires beta > 2, got {beta}"
                    )))
                }
            }
            NoiseModel::Outlier { count, value } => {
                if count == 0 || count > n_samples {
                    Err(DataGenError::InvalidNoise(format!(
                        "outlier count {count} out of range for n = {n_samples}"
                    )))
                } else if !(value > 0.0) {
                    Err(DataGenError::InvalidNoise(format!(
                        "outlier value must be positive, got {value}"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Law of the signal symbols `s_li`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalLaw {
    /// Standard complex Gaussian (default).
    #[default]
    Gaussian,
    /// QPSK symbols `(±1 ± i)/√2`.
    Qpsk,
}

/// A complex `N×n` matrix of snapshots, one observation per column.
#[derive(Debug, Clone)]
pub struct SnapshotMatrix {
    data: Mat<c64>,
}

impl SnapshotMatrix {
    pub fn new(data: Mat<c64>) -> Self {
        assert!(data.nrows() >= 1 && data.ncols() >= 1);
        Self { data }
    }

    pub fn n_antennas(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_samples(&self) -> usize {
        self.data.ncols()
    }

    /// Aspect ratio `c_n = N/n`.
    pub fn aspect_ratio(&self) -> f64 {
        self.n_antennas() as f64 / self.n_samples() as f64
    }

    pub fn data(&self) -> &Mat<c64> {
        &self.data
    }

    /// Sample covariance `(1/n) Y Y*`.
    pub fn sample_covariance(&self) -> Mat<c64> {
        let n = self.n_samples() as f64;
        let mut cov = &self.data * self.data.adjoint();
        let s = c64::new(1.0 / n, 0.0);
        for j in 0..cov.ncols() {
            for i in 0..cov.nrows() {
                cov[(i, j)] *= s;
            }
        }
        cov
    }
}

/// Everything the generator drew, kept for oracles and the equivalent-model
/// construction: the scales, the signal symbols (`L×n`) and the raw complex
/// Gaussian noise columns (`N×n`) from which `w_i = √N g_i/‖g_i‖` was built.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub taus: Vec<f64>,
    pub angles: Vec<f64>,
    pub powers: Vec<f64>,
    pub signals: Mat<c64>,
    pub noise: Mat<c64>,
}

/// Unit-norm steering vector of a ULA: entry `j` is
/// `N^{-1/2} exp(2πi d j sin θ)`.
pub fn steering_vector(theta: f64, n_antennas: usize, spacing: f64) -> Col<c64> {
    assert!(n_antennas >= 1 && spacing > 0.0);
    let scale = (n_antennas as f64).sqrt().recip();
    let step = 2.0 * std::f64::consts::PI * spacing * theta.sin();
    Col::from_fn(n_antennas, |j| {
        let phase = step * j as f64;
        c64::new(phase.cos() * scale, phase.sin() * scale)
    })
}

/// Draw `n` noise scales from the given model.
///
/// The Gaussian law needs the dimension `N` since `2Nτ_i` is chi-square with
/// `2N` degrees of freedom.
pub fn sample_tau<R: Rng + ?Sized>(
    model: NoiseModel,
    n_samples: usize,
    n_antennas: usize,
    rng: &mut R,
) -> Result<Vec<f64>, DataGenError> {
    model.validate(n_samples)?;
    let taus = match model {
        NoiseModel::Gaussian => {
            let k = 2.0 * n_antennas as f64;
            let chi = ChiSquared::new(k).expect("valid dof");
            (0..n_samples).map(|_| chi.sample(rng) / k).collect()
        }
        NoiseModel::StudentT { beta } => {
            let st = StudentT::new(beta).expect("valid beta");
            (0..n_samples)
                .map(|_| {
                    let t: f64 = st.sample(rng);
                    t * t * (beta - 2.0) / beta
                })
                .collect()
        }
        NoiseModel::Outlier { count, value } => {
            let mut taus = vec![1.0; n_samples];
            for t in taus.iter_mut().skip(n_samples - count) {
                *t = value;
            }
            taus
        }
    };
    Ok(taus)
}

/// Synthesize snapshots with Gaussian signal symbols.
pub fn synthesize<R: Rng + ?Sized>(
    sources: &SourceConfig,
    noise: NoiseModel,
    n_antennas: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<(SnapshotMatrix, GroundTruth), DataGenError> {
    synthesize_with_law(sources, noise, SignalLaw::Gaussian, n_antennas, n_samples, rng)
}

/// Synthesize snapshots with an explicit signal symbol law.
pub fn synthesize_with_law<R: Rng + ?Sized>(
    sources: &SourceConfig,
    noise: NoiseModel,
    law: SignalLaw,
    n_antennas: usize,
    n_samples: usize,
    rng: &mut R,
) -> Result<(SnapshotMatrix, GroundTruth), DataGenError> {
    let n_sources = sources.n_sources();
    if n_antennas < n_sources {
        return Err(DataGenError::TooManySources {
            n_antennas,
            n_sources,
        });
    }
    let taus = sample_tau(noise, n_samples, n_antennas, rng)?;

    let signals = Mat::from_fn(n_sources, n_samples, |_, _| match law {
        SignalLaw::Gaussian => standard_complex(rng),
        SignalLaw::Qpsk => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let re = if rng.gen::<bool>() { s } else { -s };
            let im = if rng.gen::<bool>() { s } else { -s };
            c64::new(re, im)
        }
    });
    let noise_cols = Mat::from_fn(n_antennas, n_samples, |_, _| standard_complex(rng));

    // y_i = A s_i + sqrt(tau_i) w_i, with w_i = sqrt(N) g_i / ||g_i||
    let a = sources.steering_matrix(n_antennas);
    let mut y = &a * &signals;
    let sqrt_n = (n_antennas as f64).sqrt();
    for i in 0..n_samples {
        let mut norm_sq = 0.0;
        for j in 0..n_antennas {
            norm_sq += noise_cols[(j, i)].norm_sqr();
        }
        let scale = taus[i].sqrt() * sqrt_n / norm_sq.sqrt();
        for j in 0..n_antennas {
            y[(j, i)] += noise_cols[(j, i)] * scale;
        }
    }

    Ok((
        SnapshotMatrix::new(y),
        GroundTruth {
            taus,
            angles: sources.angles().to_vec(),
            powers: sources.powers().to_vec(),
            signals,
            noise: noise_cols,
        },
    ))
}
