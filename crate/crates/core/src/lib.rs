//! Robust scatter estimation for low-rank signals buried in impulsive noise,
//! the spiked-spectrum analysis of the resulting estimator, and the robust
//! G-MUSIC family of direction-of-arrival estimators.
//!
//! The pipeline, end to end:
//!
//! 1. [`datagen`] synthesizes array snapshots `y_i = Σ_l √p_l a(θ_l) s_li + √τ_i w_i`
//!    with Gaussian, Student-t or outlier noise scales `τ_i`.
//! 2. [`scatter`] solves the Maronna fixed point
//!    `Z = (1/n) Σ u((1/N) y_i* Z⁻¹ y_i) y_i y_i*` and extracts the
//!    leave-one-out scale statistics `γ̂_n`, `τ̂_i`.
//! 3. [`spectrum`] solves the deterministic spectral equations: the scale `γ`,
//!    the Stieltjes-type map `δ(x)`, the detection bound `S⁺`, the bulk edge,
//!    the detectability threshold `p₋`, spike locations and the limiting
//!    density.
//! 4. [`inference`] turns isolated eigenvalues of the scatter estimate into
//!    source-power and eigenvector-projection estimates, with both known-law
//!    and purely empirical variants.
//! 5. [`doa`] builds the six localization functions (MUSIC, robust MUSIC,
//!    G-MUSIC, robust G-MUSIC and their empirical versions) and extracts
//!    angles from their minima.

pub mod datagen;
pub mod doa;
pub mod inference;
pub mod rng;
pub mod scatter;
pub mod snapshot_io;
pub mod spectrum;
pub mod weightfn;

pub use faer::c64;
pub use faer::{Col, Mat};

pub use datagen::{NoiseModel, SnapshotMatrix, SourceConfig};
pub use scatter::ScatterEstimate;
pub use spectrum::{SpectralContext, TauMeasure};
pub use weightfn::WeightFunction;
