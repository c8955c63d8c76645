//! The robust weight function `u` and its derived scalar maps.
//!
//! Everything downstream is driven by one non-increasing weight
//! `u(x) = (1+α)/(α+x)` and the functions built from it:
//! `φ(x) = x·u(x)` (increasing, bounded by `φ∞ = 1+α`),
//! `g(x) = x/(1 − c·φ(x))`, `v = u ∘ g⁻¹` and `ψ(y) = y·v(y)`.
//! The aspect ratio `c` is a constructor argument: pass `N/n` for
//! finite-sample quantities or the limiting ratio for asymptotic ones.

use thiserror::Error;

/// Construction errors for [`WeightFunction`].
#[derive(Debug, Error, PartialEq)]
pub enum WeightError {
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("aspect ratio must satisfy 0 < c < 1/phi_inf = {limit}, got {c}")]
    InvalidAspectRatio { c: f64, limit: f64 },
}

/// The weight family. Sealed: only the shifted-inverse `u` used throughout
/// plus the constant-one hook that degrades the scatter estimator to the
/// sample covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightKind {
    /// `u(x) = (1 + alpha) / (alpha + x)` with `alpha > 0`.
    Maronna { alpha: f64 },
    /// `u ≡ 1`, so `v ≡ 1` as well. Used by the G-MUSIC baselines and as a
    /// test hook.
    ConstantOne,
}

/// A weight function `u` paired with an aspect ratio `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    kind: WeightKind,
    c: f64,
}

impl WeightFunction {
    /// Shifted-inverse weight `u(x) = (1+alpha)/(alpha+x)`.
    ///
    /// Requires `alpha > 0` and `0 < c < 1/(1+alpha)`.
    pub fn maronna(alpha: f64, c: f64) -> Result<Self, WeightError> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(WeightError::InvalidAlpha(alpha));
        }
        let limit = 1.0 / (1.0 + alpha);
        if !(c > 0.0 && c < limit) {
            return Err(WeightError::InvalidAspectRatio { c, limit });
        }
        Ok(Self {
            kind: WeightKind::Maronna { alpha },
            c,
        })
    }

    /// Constant weight `u ≡ 1`. Only `0 < c < 1` is required.
    pub fn constant_one(c: f64) -> Result<Self, WeightError> {
        if !(c > 0.0 && c < 1.0) {
            return Err(WeightError::InvalidAspectRatio { c, limit: 1.0 });
        }
        Ok(Self {
            kind: WeightKind::ConstantOne,
            c,
        })
    }

    /// Same weight family evaluated at a different aspect ratio
    /// (finite-sample `c_n` versus limiting `c`).
    pub fn with_aspect_ratio(self, c: f64) -> Result<Self, WeightError> {
        match self.kind {
            WeightKind::Maronna { alpha } => Self::maronna(alpha, c),
            WeightKind::ConstantOne => Self::constant_one(c),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.c
    }

    /// `u(x)`; non-increasing on `[0, ∞)`.
    pub fn u(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "u is defined on x >= 0, got {x}");
        match self.kind {
            WeightKind::Maronna { alpha } => (1.0 + alpha) / (alpha + x),
            WeightKind::ConstantOne => 1.0,
        }
    }

    /// `φ(x) = x·u(x)`; strictly increasing, bounded by [`Self::phi_inf`].
    pub fn phi(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "phi is defined on x >= 0, got {x}");
        match self.kind {
            WeightKind::Maronna { alpha } => x * (1.0 + alpha) / (alpha + x),
            WeightKind::ConstantOne => x,
        }
    }

    /// `φ∞ = lim_{x→∞} φ(x)`; `1+alpha` for the shifted-inverse weight,
    /// infinite for the constant hook.
    pub fn phi_inf(&self) -> f64 {
        match self.kind {
            WeightKind::Maronna { alpha } => 1.0 + alpha,
            WeightKind::ConstantOne => f64::INFINITY,
        }
    }

    /// `g(x) = x / (1 − c·φ(x))`, strictly increasing from `[0,∞)` onto `[0,∞)`
    /// in the admissible regime `c·φ∞ < 1`.
    pub fn g(&self, x: f64) -> f64 {
        assert!(x >= 0.0, "g is defined on x >= 0, got {x}");
        x / (1.0 - self.c * self.phi(x))
    }

    /// Inverse of [`Self::g`], in closed form.
    ///
    /// For the shifted-inverse weight, `y = g(x)` reduces to the quadratic
    /// `x² + (α − y(1 − c(1+α)))x − yα = 0` whose unique nonnegative root is
    /// returned. For the constant hook, `g(x) = x/(1−cx)` inverts to
    /// `y/(1+cy)`.
    pub fn g_inverse(&self, y: f64) -> f64 {
        assert!(y >= 0.0, "g_inverse is defined on y >= 0, got {y}");
        match self.kind {
            WeightKind::Maronna { alpha } => {
                let b = alpha - y * (1.0 - self.c * (1.0 + alpha));
                // product of roots is -y*alpha <= 0: exactly one root is >= 0
                0.5 * (-b + (b * b + 4.0 * y * alpha).sqrt())
            }
            WeightKind::ConstantOne => y / (1.0 + self.c * y),
        }
    }

    /// `v(y) = u(g⁻¹(y))`; non-increasing.
    pub fn v(&self, y: f64) -> f64 {
        self.u(self.g_inverse(y))
    }

    /// `ψ(y) = y·v(y)`; increasing with supremum [`Self::psi_inf`].
    pub fn psi(&self, y: f64) -> f64 {
        y * self.v(y)
    }

    /// `ψ∞ = φ∞ / (1 − c·φ∞)` (infinite for the constant hook).
    pub fn psi_inf(&self) -> f64 {
        match self.kind {
            WeightKind::Maronna { alpha } => {
                let phi_inf = 1.0 + alpha;
                phi_inf / (1.0 - self.c * phi_inf)
            }
            WeightKind::ConstantOne => f64::INFINITY,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w02() -> WeightFunction {
        WeightFunction::maronna(0.2, 0.2).unwrap()
    }

    /// Monotone bisection inverse of g, independent of the closed form.
    fn g_inverse_bisect(w: &WeightFunction, y: f64) -> f64 {
        let mut lo = 0.0;
        let mut hi = 1.0;
        while w.g(hi) < y {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if w.g(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn u_hand_values() {
        let w = w02();
        assert!((w.u(0.0) - 6.0).abs() < 1e-12);
        assert_eq!(w.u(1.0), 1.0);
        assert!((w.u(10.0) - 1.2 / 10.2).abs() < 1e-15);
    }

    #[test]
    fn phi_hand_values() {
        let w = w02();
        assert_eq!(w.phi(0.0), 0.0);
        assert_eq!(w.phi(1.0), 1.0);
        assert_eq!(w.phi_inf(), 1.2);
        assert!(w.phi(1e12) < w.phi_inf());
    }

    #[test]
    fn g_hand_values_and_round_trip() {
        let w = w02();
        assert_eq!(w.g(0.0), 0.0);
        assert!((w.g(1.0) - 1.25).abs() < 1e-15);
        assert!((w.g_inverse(1.25) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v_psi_hand_values() {
        let w = w02();
        assert!((w.v(0.0) - 6.0).abs() < 1e-12);
        assert!((w.v(1.25) - 1.0).abs() < 1e-12);
        assert!((w.psi_inf() - 1.2 / (1.0 - 0.2 * 1.2)).abs() < 1e-12);
        assert!((w.psi_inf() - 1.578947368421053).abs() < 1e-9);
    }

    #[test]
    fn monotonicity_on_random_grids() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let alpha = rng.gen_range(0.05..5.0);
            let c = rng.gen_range(0.01..0.99) / (1.0 + alpha);
            let w = WeightFunction::maronna(alpha, c).unwrap();
            let mut xs: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..1e4)).collect();
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for p in xs.windows(2) {
                if p[0] == p[1] {
                    continue;
                }
                assert!(w.u(p[0]) >= w.u(p[1]));
                assert!(w.phi(p[0]) < w.phi(p[1]));
                assert!(w.phi(p[1]) <= w.phi_inf());
                assert!(w.psi(w.g(p[0])) < w.psi(w.g(p[1])));
            }
        }
    }

    #[test]
    fn g_inverse_identity_to_1e6() {
        let w = w02();
        for k in 0..=60 {
            let x = 10f64.powf(-2.0 + 8.0 * k as f64 / 60.0).min(1e6);
            let y = w.g(x);
            let back = w.g_inverse(y);
            assert!(
                (back - x).abs() <= 1e-10 * x.max(1.0),
                "x={x}, back={back}"
            );
            let bis = g_inverse_bisect(&w, y);
            assert!((back - bis).abs() <= 1e-8 * x.max(1.0));
        }
    }

    #[test]
    fn psi_of_g_identity() {
        // ψ(g(x)) = φ(x) / (1 − c φ(x))
        let w = w02();
        for k in 0..200 {
            let x = 0.05 * k as f64;
            let lhs = w.psi(w.g(x));
            let rhs = w.phi(x) / (1.0 - 0.2 * w.phi(x));
            assert!((lhs - rhs).abs() < 1e-12 * rhs.max(1.0), "x={x}");
        }
    }

    #[test]
    fn constant_one_hook() {
        let w = WeightFunction::constant_one(0.2).unwrap();
        assert_eq!(w.u(3.0), 1.0);
        assert_eq!(w.v(17.0), 1.0);
        assert_eq!(w.psi(2.0), 2.0);
        assert!(w.phi_inf().is_infinite());
        let y = 3.7;
        assert!((w.g(w.g_inverse(y)) - y).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(
            WeightFunction::maronna(0.0, 0.2),
            Err(WeightError::InvalidAlpha(_))
        ));
        assert!(matches!(
            WeightFunction::maronna(-1.0, 0.2),
            Err(WeightError::InvalidAlpha(_))
        ));
        // c * phi_inf >= 1 is outside the admissible regime
        assert!(matches!(
            WeightFunction::maronna(0.2, 0.9),
            Err(WeightError::InvalidAspectRatio { .. })
        ));
        assert!(WeightFunction::maronna(0.2, 1.0 / 1.2 - 1e-9).is_ok());
    }

    #[test]
    #[should_panic(expected = "u is defined on x >= 0")]
    fn negative_input_is_a_domain_error() {
        w02().u(-1.0);
    }
}
