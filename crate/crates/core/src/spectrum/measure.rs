//! Representations of the noise-scale law `ν` and integrals against it.

use rand::Rng;
use rand_distr::{Distribution, StudentT};
use thiserror::Error;

use crate::rng::{role, stream};

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("measure must carry at least one point")]
    Empty,
    #[error("all mass must lie on (0, ∞); found point {0}")]
    NonPositivePoint(f64),
    #[error("atom weights must be positive and sum to 1 (sum = {0})")]
    BadWeights(f64),
    #[error("∫ t ν(dt) must equal 1 within 1% for sampled measures, got {0}")]
    MeanOffUnit(f64),
}

#[derive(Debug, Clone)]
enum Repr {
    /// Finitely many weighted atoms, integrated exactly.
    Atoms(Vec<(f64, f64)>),
    /// A frozen set of Monte Carlo draws, integrated by sample mean.
    Samples(Vec<f64>),
}

/// The law `ν` of the noise scales, supporting `∫ f dν`.
///
/// Analytic laws are materialized once as a fixed-seed sample set so that
/// every downstream solve is deterministic.
#[derive(Debug, Clone)]
pub struct TauMeasure {
    repr: Repr,
}

impl TauMeasure {
    /// Point mass at `t0 > 0`.
    pub fn dirac(t0: f64) -> Result<Self, MeasureError> {
        Self::atoms(vec![(1.0, t0)])
    }

    /// Finite mixture `Σ w_i δ_{t_i}`; weights must sum to 1.
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Self, MeasureError> {
        if atoms.is_empty() {
            return Err(MeasureError::Empty);
        }
        let mut total = 0.0;
        for &(w, t) in &atoms {
            if !(t > 0.0) || !t.is_finite() {
                return Err(MeasureError::NonPositivePoint(t));
            }
            if !(w > 0.0) {
                return Err(MeasureError::BadWeights(w));
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(MeasureError::BadWeights(total));
        }
        Ok(Self {
            repr: Repr::Atoms(atoms),
        })
    }

    /// The Student-t impulsion law `τ = t²(β−2)/β`, materialized as
    /// `n_draws` fixed-seed samples rescaled to exact unit mean.
    pub fn student_t(beta: f64, n_draws: usize, seed: u64) -> Result<Self, MeasureError> {
        assert!(beta > 2.0, "Student-t law requires beta > 2, got {beta}");
        let mut rng = stream(seed, beta.to_bits(), role::MEASURE);
        let st = StudentT::new(beta).expect("valid beta");
        let draws = (0..n_draws)
            .map(|_| {
                let t: f64 = st.sample(&mut rng);
                t * t * (beta - 2.0) / beta
            })
            .collect();
        Self::from_draws(draws)
    }

    /// A sampled measure from an arbitrary sampler, rescaled to unit mean.
    pub fn analytic<R: Rng + ?Sized>(
        sampler: impl Fn(&mut R) -> f64,
        n_draws: usize,
        rng: &mut R,
    ) -> Result<Self, MeasureError> {
        let draws = (0..n_draws).map(|_| sampler(rng)).collect();
        Self::from_draws(draws)
    }

    fn from_draws(mut draws: Vec<f64>) -> Result<Self, MeasureError> {
        if draws.is_empty() {
            return Err(MeasureError::Empty);
        }
        for &d in &draws {
            if !(d > 0.0) || !d.is_finite() {
                return Err(MeasureError::NonPositivePoint(d));
            }
        }
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        for d in &mut draws {
            *d /= mean;
        }
        Ok(Self {
            repr: Repr::Samples(draws),
        })
    }

    /// An empirical sample set used as-is; the mean must already be 1
    /// within 1%.
    pub fn empirical(values: Vec<f64>) -> Result<Self, MeasureError> {
        if values.is_empty() {
            return Err(MeasureError::Empty);
        }
        for &v in &values {
            if !(v > 0.0) || !v.is_finite() {
                return Err(MeasureError::NonPositivePoint(v));
            }
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        if (mean - 1.0).abs() > 0.01 {
            return Err(MeasureError::MeanOffUnit(mean));
        }
        Ok(Self {
            repr: Repr::Samples(values),
        })
    }

    /// `∫ f dν`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        match &self.repr {
            Repr::Atoms(atoms) => atoms.iter().map(|&(w, t)| w * f(t)).sum(),
            Repr::Samples(values) => {
                values.iter().map(|&t| f(t)).sum::<f64>() / values.len() as f64
            }
        }
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|t| t)
    }

    /// Largest support point.
    pub fn max_point(&self) -> f64 {
        match &self.repr {
            Repr::Atoms(atoms) => atoms.iter().map(|&(_, t)| t).fold(f64::MIN, f64::max),
            Repr::Samples(values) => values.iter().copied().fold(f64::MIN, f64::max),
        }
    }

    /// Number of atoms / draws.
    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Atoms(atoms) => atoms.len(),
            Repr::Samples(values) => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The support points with their weights.
    pub(crate) fn points_and_weights(&self) -> (Vec<f64>, Option<Vec<f64>>) {
        match &self.repr {
            Repr::Atoms(atoms) => (
                atoms.iter().map(|&(_, t)| t).collect(),
                Some(atoms.iter().map(|&(w, _)| w).collect()),
            ),
            Repr::Samples(values) => (values.clone(), None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dirac_integrates_exactly() {
        let m = TauMeasure::dirac(1.0).unwrap();
        assert_eq!(m.integrate(|t| t * t + 1.0), 2.0);
        assert_eq!(m.mean(), 1.0);
        assert_eq!(m.max_point(), 1.0);
    }

    #[test]
    fn atom_mixture() {
        let m = TauMeasure::atoms(vec![(0.99, 1.0), (0.01, 100.0)]).unwrap();
        assert!((m.mean() - 1.99).abs() < 1e-12);
        assert_eq!(m.max_point(), 100.0);
    }

    #[test]
    fn student_t_measure_has_unit_mean() {
        let m = TauMeasure::student_t(100.0, 100_000, 7).unwrap();
        assert!((m.mean() - 1.0).abs() < 1e-12);
        assert_eq!(m.len(), 100_000);
        // deterministic given the seed
        let m2 = TauMeasure::student_t(100.0, 100_000, 7).unwrap();
        assert_eq!(m.integrate(|t| t * t), m2.integrate(|t| t * t));
    }

    #[test]
    fn empirical_rejects_off_unit_mean() {
        assert!(matches!(
            TauMeasure::empirical(vec![2.0, 2.0, 2.0]),
            Err(MeasureError::MeanOffUnit(_))
        ));
        assert!(TauMeasure::empirical(vec![0.5, 1.5]).is_ok());
    }

    #[test]
    fn rejects_nonpositive_points() {
        assert!(TauMeasure::dirac(0.0).is_err());
        assert!(TauMeasure::empirical(vec![1.0, -1.0]).is_err());
    }
}
