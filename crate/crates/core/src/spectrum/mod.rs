//! Deterministic spectral equations of the robust scatter estimator.
//!
//! Solves, for a noise-scale law `ν`, weight function and aspect ratio `c`:
//! the scale `γ`, the Stieltjes-type map `δ(x)` and its empirical plug-in
//! `δ̂(x)`, the detection bound `S⁺`, the bulk right edge `S⁺_μ`, the
//! detectability threshold `p₋`, spike locations `Λ(p)` and the limiting
//! spectral density.
//!
//! All scalar roots are found by bracketed bisection/interpolation; the
//! plain fixed-point iteration is kept as an independent cross-check and as
//! the blind fallback used when an eigenvalue lands where no solution
//! exists.

mod measure;

pub use measure::{MeasureError, TauMeasure};

use faer::c64;
use thiserror::Error;

use crate::weightfn::WeightFunction;

#[derive(Debug, Error)]
pub enum SpectrumError {
    #[error("x = {x} lies inside the spectrum support; delta(x) has no admissible real solution")]
    InsideSupport { x: f64 },
    #[error("failed to bracket a root of the gamma equation over [{lo}, {hi}]")]
    GammaBracketing { lo: f64, hi: f64 },
    #[error("x = {x} is not above the detection bound {bound}")]
    BelowThreshold { x: f64, bound: f64 },
    #[error("eigenvector weight undefined: correction factor {margin} is not positive")]
    WeightPastValidity { margin: f64 },
    #[error("spectral context requires a bounded weight (phi_inf < ∞)")]
    UnboundedWeight,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// A solved `δ(x)` together with the correction factor
/// `1 − (δ²/c)·∫ t²v²/(1+δtv)² dν` that enters the eigenvector weights
/// (positive exactly on the stable branch).
#[derive(Debug, Clone, Copy)]
pub struct DeltaSolution {
    pub delta: f64,
    pub margin: f64,
}

/// Result of the blind fixed-point iteration for `δ(x)`.
#[derive(Debug, Clone, Copy)]
pub struct PicardOutcome {
    pub delta: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// One grid point of the limiting density.
#[derive(Debug, Clone, Copy)]
pub struct DensityPoint {
    pub x: f64,
    pub density: f64,
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// scalar root helpers

/// Classic Brent root finder on a bracketing interval `[a, b]`.
fn brent_root(mut f: impl FnMut(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    let mut fb = f(b);
    assert!(
        fa * fb <= 0.0,
        "brent_root requires a sign change: f({a})={fa}, f({b})={fb}"
    );
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.abs() > fc.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 1e-300;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return b;
        }
        if e.abs() < tol || fa.abs() <= fb.abs() {
            d = m;
            e = m;
        } else {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let (qq, r) = (fa / fc, fb / fc);
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    b
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 > f2 {
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
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

// ---------------------------------------------------------------------------
// the ν-integral system shared by the known-law and empirical estimators

/// The law `ν` with precomputed weight values: atoms `t_i` with masses `w_i`,
/// `v_i = v(t_i γ)` and the products `t_i v_i`. Every quantity of the theory
/// is an integral of a rational function of these against `ν`, so the
/// known-ν estimators (integrating the limit law) and the purely empirical
/// ones (summing over `τ̂_i`) share this single implementation.
#[derive(Debug, Clone)]
pub struct DeltaSystem {
    tv: Vec<f64>,
    v: Vec<f64>,
    weights: Option<Vec<f64>>,
    c: f64,
    max_tv: f64,
}

impl DeltaSystem {
    /// Known-law system: atoms of `measure`, weighted by `v(tγ)` for the
    /// given weight function (whose aspect ratio is used as `c`).
    pub fn from_measure(measure: &TauMeasure, w: &WeightFunction, gamma: f64) -> Self {
        let (points, weights) = measure.points_and_weights();
        Self::build(points, weights, w, gamma)
    }

    /// Empirical system over the estimated scales `τ̂_i` and `γ̂_n`
    /// (pass the finite-sample aspect ratio `c_n` inside `w`).
    pub fn from_tau_hats(tau_hats: &[f64], gamma_hat: f64, w: &WeightFunction) -> Self {
        Self::build(tau_hats.to_vec(), None, w, gamma_hat)
    }

    fn build(points: Vec<f64>, weights: Option<Vec<f64>>, w: &WeightFunction, gamma: f64) -> Self {
        let v: Vec<f64> = points.iter().map(|&t| w.v(t * gamma)).collect();
        let tv: Vec<f64> = points.iter().zip(&v).map(|(&t, &vi)| t * vi).collect();
        let max_tv = tv.iter().copied().fold(f64::MIN, f64::max);
        Self {
            tv,
            v,
            weights,
            c: w.aspect_ratio(),
            max_tv,
        }
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.c
    }

    /// Left end of the admissible interval for `δ` on the right of the
    /// support: `δ ∈ (−1/max(t v), 0)`.
    pub fn delta_min(&self) -> f64 {
        -1.0 / self.max_tv
    }

    #[inline]
    fn mean(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        match &self.weights {
            Some(ws) => self
                .tv
                .iter()
                .zip(&self.v)
                .zip(ws)
                .map(|((&tv, &v), &w)| w * f(tv, v))
                .sum(),
            None => {
                let s: f64 = self
                    .tv
                    .iter()
                    .zip(&self.v)
                    .map(|(&tv, &v)| f(tv, v))
                    .sum();
                s / self.tv.len() as f64
            }
        }
    }

    /// `∫ t v / (1 + δ t v) dν`
    fn i_tv(&self, d: f64) -> f64 {
        self.mean(|tv, _| tv / (1.0 + d * tv))
    }

    /// `∫ v / (1 + δ t v) dν`
    fn i_v1(&self, d: f64) -> f64 {
        self.mean(|tv, v| v / (1.0 + d * tv))
    }

    /// `∫ v / (1 + δ t v)² dν`
    fn i_v2(&self, d: f64) -> f64 {
        self.mean(|tv, v| {
            let den = 1.0 + d * tv;
            v / (den * den)
        })
    }

    /// `∫ t² v² / (1 + δ t v)² dν`
    fn j2(&self, d: f64) -> f64 {
        self.mean(|tv, _| {
            let r = tv / (1.0 + d * tv);
            r * r
        })
    }

    /// `G(δ) = δ(−x + ∫ tv/(1+δtv) dν) − c`; its zero nearest the origin is
    /// `δ(x)`. `G` is strictly concave on `(δ_min, 0)`, with `G(0) = −c`.
    fn g_of(&self, d: f64, x: f64) -> f64 {
        if d == 0.0 {
            return -self.c;
        }
        d * (-x + self.i_tv(d)) - self.c
    }

    fn g_and_slope(&self, d: f64, x: f64) -> (f64, f64) {
        let i = self.i_tv(d);
        let j = self.j2(d);
        (d * (-x + i) - self.c, -x + i - d * j)
    }

    /// Solve `δ(x)` on the negative branch (the operating region `x` right
    /// of the bulk); falls back to the positive branch used left of the
    /// support. No fixed-point fallback: absence of a root is an error.
    pub fn solve_delta(&self, x: f64) -> Result<DeltaSolution, SpectrumError> {
        self.solve_delta_with_hint(x, None)
    }

    /// Same as [`Self::solve_delta`], optionally warm-started from a nearby
    /// solution (guarded Newton; falls back to the global search).
    pub fn solve_delta_with_hint(
        &self,
        x: f64,
        hint: Option<f64>,
    ) -> Result<DeltaSolution, SpectrumError> {
        if let Some(h) = hint {
            if let Some(sol) = self.newton_from(h, x) {
                return Ok(sol);
            }
        }
        match self.solve_negative_branch(x) {
            Ok(sol) => Ok(sol),
            Err(_) => self.solve_positive_branch(x),
        }
    }

    fn finish(&self, d: f64) -> DeltaSolution {
        let margin = 1.0 - d * d / self.c * self.j2(d);
        DeltaSolution { delta: d, margin }
    }

    fn newton_from(&self, hint: f64, x: f64) -> Option<DeltaSolution> {
        let dmin = self.delta_min();
        if !(hint > dmin && hint < 0.0) {
            return None;
        }
        let mut d = hint;
        for _ in 0..60 {
            let (g, slope) = self.g_and_slope(d, x);
            if slope >= 0.0 {
                return None;
            }
            let step = g / slope;
            let mut d_new = d - step;
            if !(d_new > dmin && d_new < 0.0) {
                d_new = if d_new <= dmin {
                    0.5 * (d + dmin)
                } else {
                    0.5 * d
                };
            }
            if (d_new - d).abs() <= 1e-13 * d.abs().max(1e-12) {
                let sol = self.finish(d_new);
                if sol.margin > 0.0 && self.g_of(d_new, x).abs() < 1e-9 * self.c {
                    return Some(sol);
                }
                return None;
            }
            d = d_new;
        }
        None
    }

    fn solve_negative_branch(&self, x: f64) -> Result<DeltaSolution, SpectrumError> {
        let dmin = self.delta_min() * (1.0 - 1e-12);
        // G is concave with G(0) = -c < 0 and G(δ_min+) = -∞: a root exists
        // iff the maximum is positive, and the rightmost root is the stable
        // branch.
        let (d_peak, g_peak) = golden_max(|d| self.g_of(d, x), dmin, 0.0, 90);
        if !(g_peak > 0.0) {
            return Err(SpectrumError::InsideSupport { x });
        }
        let root = brent_root(|d| self.g_of(d, x), d_peak, 0.0);
        Ok(self.finish(root))
    }

    fn solve_positive_branch(&self, x: f64) -> Result<DeltaSolution, SpectrumError> {
        // Left of the support the solution is positive. Scan in log scale for
        // the first sign change of G.
        let mut prev_d = 0.0f64;
        let mut prev_g = -self.c;
        let mut k = 0;
        let mut d = 1e-9;
        while k < 600 {
            let g = self.g_of(d, x);
            if prev_g < 0.0 && g >= 0.0 {
                let root = brent_root(|d| self.g_of(d, x), prev_d.max(1e-300), d);
                return Ok(self.finish(root));
            }
            prev_d = d;
            prev_g = g;
            d *= 1.1;
            k += 1;
        }
        Err(SpectrumError::InsideSupport { x })
    }

    /// The blind fixed-point iteration `δ ← c(−x + ∫ tv/(1+δtv) dν)⁻¹`, run
    /// until convergence or `max_iter`, returning the last iterate either
    /// way.
    pub fn delta_picard(&self, x: f64, max_iter: usize) -> PicardOutcome {
        let dmin = self.delta_min();
        let mut d = -self.c / x;
        for k in 0..max_iter {
            let denom = -x + self.i_tv(d);
            let mut next = self.c / denom;
            if !next.is_finite() {
                next = 0.5 * dmin;
            }
            if (next - d).abs() <= 1e-12 * d.abs().max(1e-12) {
                return PicardOutcome {
                    delta: next,
                    converged: true,
                    iterations: k + 1,
                };
            }
            d = next;
        }
        PicardOutcome {
            delta: d,
            converged: false,
            iterations: max_iter,
        }
    }

    /// Source-power functional `−c (δ ∫ v/(1+δtv) dν)⁻¹` evaluated at a
    /// solved `δ`.
    pub fn power_at(&self, delta: f64) -> f64 {
        -self.c / (delta * self.i_v1(delta))
    }

    /// Eigenvector weight
    /// `w = ∫v/(1+δtv)² dν / (∫v/(1+δtv) dν · (1 − (1/c)∫δ²t²v²/(1+δtv)² dν))`.
    ///
    /// Errors when the correction factor is not positive (eigenvalue too
    /// close to the detection threshold for the expansion to be valid).
    pub fn eigvec_weight_at(&self, delta: f64) -> Result<f64, SpectrumError> {
        let (w, margin) = self.eigvec_weight_at_blind(delta);
        if margin > 0.0 {
            Ok(w)
        } else {
            Err(SpectrumError::WeightPastValidity { margin })
        }
    }

    /// Weight computed regardless of validity; returns `(w, margin)`.
    pub fn eigvec_weight_at_blind(&self, delta: f64) -> (f64, f64) {
        let margin = 1.0 - delta * delta / self.c * self.j2(delta);
        let w = self.i_v2(delta) / (self.i_v1(delta) * margin);
        (w, margin)
    }

    /// The tangency point `δ*` solving `δ² ∫ t²v²/(1+δtv)² dν = c`: the
    /// unique point in `(δ_min, 0)` where the branch `δ(x)` terminates.
    /// Yields the bulk right edge and the detectability threshold in closed
    /// form:
    /// `S⁺_μ = ∫tv/(1+δ*tv) dν − δ* ∫t²v²/(1+δ*tv)² dν`, `p₋ = power(δ*)`.
    fn edge_tangency(&self) -> (f64, f64) {
        // H(δ) = δ² J₂(δ) − c is strictly decreasing on (δ_min, 0), from +∞
        // to −c.
        let dmin = self.delta_min();
        let h = |d: f64| d * d * self.j2(d) - self.c;
        let mut lo = dmin * (1.0 - 1e-12);
        while !(h(lo) > 0.0) {
            lo = 0.5 * (lo + dmin);
            if (lo - dmin).abs() < 1e-300 {
                break;
            }
        }
        let d_star = brent_root(h, lo, 0.0);
        let edge = self.i_tv(d_star) - d_star * self.j2(d_star);
        (edge, d_star)
    }

    /// `δ(z)` for complex `z` by damped fixed-point iteration (damping 0.5).
    pub fn delta_complex(
        &self,
        z: c64,
        init: Option<c64>,
        max_iter: usize,
    ) -> (c64, bool) {
        let mut d = init.unwrap_or(-c64::new(self.c, 0.0) / z);
        if d.im <= 0.0 {
            d = c64::new(d.re, 1e-6);
        }
        let one = c64::new(1.0, 0.0);
        for k in 0..max_iter {
            let i_tv = match &self.weights {
                Some(ws) => self
                    .tv
                    .iter()
                    .zip(ws)
                    .map(|(&tv, &w)| one / (one + d * tv) * (tv * w))
                    .sum::<c64>(),
                None => {
                    let s: c64 = self.tv.iter().map(|&tv| one / (one + d * tv) * tv).sum();
                    s / self.tv.len() as f64
                }
            };
            let target = c64::new(self.c, 0.0) / (-z + i_tv);
            let next = 0.5 * d + 0.5 * target;
            let delta_step = (next - d).norm();
            d = next;
            if !d.re.is_finite() || !d.im.is_finite() {
                return (d, false);
            }
            if delta_step <= 1e-12 * (1.0 + d.norm()) && k > 3 {
                return (d, true);
            }
        }
        (d, false)
    }
}

// ---------------------------------------------------------------------------
// gamma

/// Solve `1 = ∫ ψ_c(tγ) / (1 + c ψ_c(tγ)) ν(dt)` for `γ > 0`.
///
/// The right-hand side is increasing in `γ` with limits 0 and
/// `φ∞/(1 − cφ∞ + cφ∞) = φ∞ > 1`, so the root is unique.
pub fn solve_gamma(measure: &TauMeasure, w: &WeightFunction) -> Result<f64, SpectrumError> {
    let c = w.aspect_ratio();
    let rhs = |gamma: f64| -> f64 {
        measure.integrate(|t| {
            let psi = w.psi(t * gamma);
            psi / (1.0 + c * psi)
        }) - 1.0
    };
    let lo = 1e-12;
    if rhs(lo) > 0.0 {
        return Err(SpectrumError::GammaBracketing { lo, hi: lo });
    }
    let mut hi = 1.0;
    while rhs(hi) < 0.0 {
        hi *= 4.0;
        if hi > 1e12 {
            return Err(SpectrumError::GammaBracketing { lo, hi });
        }
    }
    Ok(brent_root(rhs, lo, hi))
}

// ---------------------------------------------------------------------------
// the solved context

/// Solver state for a `(ν, u, c)` triple: `γ`, the δ-system, and the
/// thresholds `S⁺` (detection bound), `S⁺_μ` (bulk right edge) and `p₋`
/// (detectability threshold, the power functional at the bulk edge).
#[derive(Debug, Clone)]
pub struct SpectralContext {
    measure: TauMeasure,
    weight: WeightFunction,
    gamma: f64,
    system: DeltaSystem,
    s_plus: f64,
    s_plus_mu: f64,
    p_minus: f64,
}

impl SpectralContext {
    /// Solve the context for a bounded weight function carrying the limiting
    /// aspect ratio `c`.
    pub fn new(measure: TauMeasure, weight: WeightFunction) -> Result<Self, SpectrumError> {
        if !weight.phi_inf().is_finite() {
            return Err(SpectrumError::UnboundedWeight);
        }
        let gamma = solve_gamma(&measure, &weight)?;
        let system = DeltaSystem::from_measure(&measure, &weight, gamma);
        let s_plus = s_plus_formula(&weight, gamma);
        let (s_plus_mu, d_star) = system.edge_tangency();
        let p_minus = system.power_at(d_star);
        Ok(Self {
            measure,
            weight,
            gamma,
            system,
            s_plus,
            s_plus_mu,
            p_minus,
        })
    }

    pub fn measure(&self) -> &TauMeasure {
        &self.measure
    }

    pub fn weight(&self) -> &WeightFunction {
        &self.weight
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.weight.aspect_ratio()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `S⁺ = φ∞ (1+√c)² / (γ (1−cφ∞))`: no non-informative eigenvalue
    /// exceeds this bound asymptotically.
    pub fn s_plus(&self) -> f64 {
        self.s_plus
    }

    /// Right edge of the support of the limiting bulk `μ`.
    pub fn s_plus_mu(&self) -> f64 {
        self.s_plus_mu
    }

    /// Detectability threshold: the infimum of powers whose spike escapes
    /// the bulk right edge.
    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn delta_system(&self) -> &DeltaSystem {
        &self.system
    }

    /// `δ(x)` outside the support.
    pub fn delta(&self, x: f64) -> Result<f64, SpectrumError> {
        Ok(self.system.solve_delta(x)?.delta)
    }

    /// Location `Λ(p)` of the spike for a source of power `p`, or `None`
    /// when `p ≤ p₋` (the spike does not separate from the bulk).
    pub fn spike_location(&self, p: f64) -> Option<f64> {
        if !(p > self.p_minus) {
            return None;
        }
        let edge = self.s_plus_mu;
        let lo = edge * (1.0 + 1e-12);
        let power_at = |sys: &DeltaSystem, x: f64, hint: &mut Option<f64>| -> f64 {
            let sol = sys
                .solve_delta_with_hint(x, *hint)
                .expect("x > bulk edge has a solution");
            *hint = Some(sol.delta);
            sys.power_at(sol.delta)
        };
        let mut hint = None;
        if power_at(&self.system, lo, &mut hint) >= p {
            return Some(lo);
        }
        let mut hi = self.s_plus.max(2.0 * edge);
        let mut hint_hi = hint;
        let mut k = 0;
        while power_at(&self.system, hi, &mut hint_hi) < p {
            hi *= 2.0;
            k += 1;
            if k > 200 {
                return None;
            }
        }
        let mut hint_brent = None;
        let root = brent_root(
            |x| power_at(&self.system, x, &mut hint_brent) - p,
            lo,
            hi,
        );
        Some(root)
    }

    /// Limiting spectral density along `grid`, by Stieltjes inversion at
    /// height `eps`: `f(x) = Im δ(x+iε) / (cπ)`. Points where the damped
    /// iteration fails to converge are flagged, not fatal.
    pub fn limiting_density(&self, grid: &[f64], eps: f64) -> Vec<DensityPoint> {
        assert!(eps > 0.0, "eps must be positive");
        let c = self.aspect_ratio();
        let mut out = Vec::with_capacity(grid.len());
        let mut warm: Option<c64> = None;
        for (k, &x) in grid.iter().enumerate() {
            let z = c64::new(x, eps);
            let (d, ok) = if k == 0 || warm.is_none() {
                // continuation in eps for the first point
                let mut e = (eps * 1e3).max(0.05);
                let mut d = None;
                let mut ok;
                loop {
                    let (di, oki) = self.system.delta_complex(c64::new(x, e), d, 5000);
                    d = Some(di);
                    ok = oki;
                    if e <= eps {
                        break;
                    }
                    e = (e * 0.25).max(eps);
                }
                (d.unwrap(), ok)
            } else {
                self.system.delta_complex(z, warm, 5000)
            };
            warm = if ok { Some(d) } else { None };
            out.push(DensityPoint {
                x,
                density: (d.im / (c * std::f64::consts::PI)).max(0.0),
                converged: ok,
            });
        }
        out
    }
}

fn s_plus_formula(w: &WeightFunction, gamma: f64) -> f64 {
    let c = w.aspect_ratio();
    let phi_inf = w.phi_inf();
    let root_c = c.sqrt();
    phi_inf * (1.0 + root_c) * (1.0 + root_c) / (gamma * (1.0 - c * phi_inf))
}

// ---------------------------------------------------------------------------
// spec-level free functions

/// `δ(x)` against a solved context.
pub fn solve_delta(x: f64, ctx: &SpectralContext) -> Result<f64, SpectrumError> {
    ctx.delta(x)
}

/// Empirical detection bound `Ŝ⁺ = φ∞ (1+√c_n)² / (γ̂_n (1−c_n φ∞))`.
pub fn empirical_s_plus(w: &WeightFunction, gamma_hat: f64) -> f64 {
    s_plus_formula(w, gamma_hat)
}

/// The empirical `δ̂(x)`: the negative solution of the δ-equation with the
/// sample sum over `τ̂_i` in place of the ν-integral. Requires `x` above the
/// empirical detection bound.
pub fn solve_delta_hat(
    x: f64,
    tau_hats: &[f64],
    gamma_hat: f64,
    w: &WeightFunction,
) -> Result<f64, SpectrumError> {
    if w.phi_inf().is_finite() {
        let bound = empirical_s_plus(w, gamma_hat);
        if x <= bound {
            return Err(SpectrumError::BelowThreshold { x, bound });
        }
    }
    let system = DeltaSystem::from_tau_hats(tau_hats, gamma_hat, w);
    Ok(system.solve_delta(x)?.delta)
}

/// `S⁺` of a solved context.
pub fn compute_s_plus(ctx: &SpectralContext) -> f64 {
    ctx.s_plus()
}

/// `p₋` of a solved context.
pub fn compute_p_minus(ctx: &SpectralContext) -> f64 {
    ctx.p_minus()
}

/// Spike location `Λ(p)`, or `None` below the detectability threshold.
pub fn compute_spike_location(p: f64, ctx: &SpectralContext) -> Option<f64> {
    ctx.spike_location(p)
}

/// Bulk right edge `S⁺_μ` of a solved context.
pub fn support_edge(ctx: &SpectralContext) -> f64 {
    ctx.s_plus_mu()
}
