//! The factorized local model, the diagonal ratio `f(θ) = P_Q / P_L`, the
//! resulting lower bound on the local content, and sampled certification of
//! `P_Q = w P_L + (1 - w) P_NL`.
//!
//! The local model assigns each party the independent distribution
//! `½ [1 + r sgn(cos θ) min(1, |cos θ / cos θ₀|)]`, where `θ₀` is the unique
//! polar angle at which the diagonal all-`+1` GHZ probability vanishes.
//! Because the model is a product over parties it is local without any
//! shared randomness.

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::minimize::{grid_then_golden, Minimum};
use crate::qcore::{
    diagonal_prob, ghz_probs_all_outcomes, joint_prob_ghz, GhzScenario, MeasurementContext,
    OutcomePattern,
};

/// Residuals below `-CERTIFY_TOLERANCE` count as a violation.
pub const CERTIFY_TOLERANCE: f64 = 1e-9;
/// Points of the deterministic diagonal sweep run by [`certify`].
pub const CERTIFY_DIAGONAL_POINTS: usize = 2001;
pub const DEFAULT_GRID_POINTS: usize = 10_000;
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;

/// Offset used for the one-sided limit of `f` at `θ₀`.
const LIMIT_DELTA: f64 = 1e-5;
/// Agreement required between the limit estimates at `δ` and `δ / 10`.
const LIMIT_STABILITY: f64 = 1e-6;
/// `|θ - θ₀|` below which `f(θ)` is replaced by its limit.
const THETA0_SNAP: f64 = 1e-9;

/// `cos θ` with values below machine epsilon treated as exactly zero, so that
/// `sgn(cos θ)` is `0` at `θ = π/2` despite `cos(π/2)` not rounding to zero.
fn cos_snapped(theta: f64) -> f64 {
    let c = theta.cos();
    if c.abs() < f64::EPSILON {
        0.0
    } else {
        c
    }
}

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Local model parameterized by `θ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalModel {
    scenario: GhzScenario,
    cos_theta0: f64,
    theta0: f64,
}

impl LocalModel {
    pub fn new(scenario: GhzScenario) -> Self {
        let alpha = scenario.alpha();
        // u = tan^{1/N} α, so u² = tan^{2/N} α.
        let u = if alpha == FRAC_PI_4 {
            1.0
        } else {
            alpha.tan().powf(1.0 / scenario.n() as f64)
        };
        let t = u * u;
        let cos_theta0 = -(1.0 - t) / (1.0 + t);
        // tan(θ₀/2) = 1/u; avoids the ill-conditioned arccos near -1.
        let theta0 = 2.0 * 1.0f64.atan2(u);
        Self {
            scenario,
            cos_theta0,
            theta0,
        }
    }

    pub fn scenario(&self) -> &GhzScenario {
        &self.scenario
    }

    pub fn cos_theta0(&self) -> f64 {
        self.cos_theta0
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// `|cos θ₀| - |cos θ|` without cancellation near `θ = θ₀` or `π - θ₀`.
    fn abs_cos_gap(&self, theta: f64, c: f64) -> f64 {
        if c < 0.0 {
            // cos θ - cos θ₀
            -2.0 * (0.5 * (theta + self.theta0)).sin() * (0.5 * (theta - self.theta0)).sin()
        } else {
            // cos(π - θ₀) - cos θ
            let mirrored = PI - self.theta0;
            -2.0 * (0.5 * (mirrored + theta)).sin() * (0.5 * (mirrored - theta)).sin()
        }
    }

    /// Single-party factor `1 + r sgn(cos θ) min(1, |cos θ / cos θ₀|)`, in `[0, 2]`.
    pub fn party_factor(&self, theta: f64, r: i8) -> f64 {
        let c = cos_snapped(theta);
        if c == 0.0 {
            return 1.0;
        }
        let s = f64::from(r) * sgn(c);
        if self.cos_theta0 == 0.0 {
            return 1.0 + s;
        }
        let gap = self.abs_cos_gap(theta, c);
        if gap <= 0.0 {
            // |cos θ| ≥ |cos θ₀|: saturated
            1.0 + s
        } else if s > 0.0 {
            2.0 - gap / self.cos_theta0.abs()
        } else {
            gap / self.cos_theta0.abs()
        }
    }

    /// Local probability on the diagonal, all outcomes `+1`.
    pub fn diagonal_local_prob(&self, theta: f64) -> f64 {
        (0.5 * self.party_factor(theta, 1)).powi(self.scenario.n() as i32)
    }
}

/// Polar angle `θ₀ ∈ [π/2, π]` at which the diagonal joint probability vanishes.
pub fn theta0(scenario: &GhzScenario) -> f64 {
    LocalModel::new(*scenario).theta0()
}

/// `P_L = 2^{-N} ∏_j [1 + r_j sgn(cos θ_j) min(1, |cos θ_j / cos θ₀|)]`.
///
/// Panics if `thetas` or `outcomes` do not have `n` entries.
pub fn local_prob(model: &LocalModel, thetas: &[f64], outcomes: &OutcomePattern) -> f64 {
    let n = model.scenario.n();
    assert_eq!(thetas.len(), n, "theta list length must equal n");
    assert_eq!(outcomes.len(), n, "outcome pattern length must equal n");
    thetas
        .iter()
        .zip(outcomes.signs())
        .map(|(&t, &r)| 0.5 * model.party_factor(t, r))
        .product()
}

/// Local probabilities of all `2^n` outcome patterns in
/// [`OutcomePattern::from_index`] order.
pub fn local_probs_all_outcomes(model: &LocalModel, thetas: &[f64], out: &mut Vec<f64>) {
    assert_eq!(
        thetas.len(),
        model.scenario.n(),
        "theta list length must equal n"
    );
    out.clear();
    out.push(1.0);
    for &theta in thetas {
        let plus = 0.5 * model.party_factor(theta, 1);
        let minus = 0.5 * model.party_factor(theta, -1);
        let len = out.len();
        out.resize(2 * len, 0.0);
        for i in (0..len).rev() {
            let v = out[i];
            out[2 * i] = v * plus;
            out[2 * i + 1] = v * minus;
        }
    }
}

fn raw_ratio(model: &LocalModel, theta: f64) -> f64 {
    let pq = diagonal_prob(&model.scenario, theta);
    let pl = model.diagonal_local_prob(theta);
    if pl > 0.0 {
        pq / pl
    } else if pq > 0.0 {
        f64::INFINITY
    } else {
        f64::NAN
    }
}

/// One-sided limit of `f` as `θ → θ₀⁻`. The local model vanishes identically
/// on `(θ₀, π]`, so only the left side carries information. The estimate is
/// Richardson-extrapolated from offsets `δ` and `δ/2`, then cross-checked at
/// `δ/10`; a non-converging sequence that grows is reported as `+∞`.
pub fn ratio_limit_at_theta0(scenario: &GhzScenario) -> f64 {
    let model = LocalModel::new(*scenario);
    let t0 = model.theta0();
    let estimate = |delta: f64| {
        let f1 = raw_ratio(&model, t0 - delta);
        let f2 = raw_ratio(&model, t0 - 0.5 * delta);
        (2.0 * f2 - f1, f1)
    };
    let (coarse, f_coarse) = estimate(LIMIT_DELTA);
    let (fine, f_fine) = estimate(LIMIT_DELTA / 10.0);
    if !coarse.is_finite() || !fine.is_finite() {
        return f64::INFINITY;
    }
    if (coarse - fine).abs() <= LIMIT_STABILITY * fine.abs().max(1.0) {
        // the coarse offset is less exposed to the rounding of θ₀ itself
        coarse.max(0.0)
    } else if f_fine > f_coarse {
        f64::INFINITY
    } else {
        fine.max(0.0)
    }
}

/// `f(θ) = P_Q(θ) / P_L(θ)` on the diagonal with all outcomes `+1`.
///
/// Returns `+∞` where only `P_L` vanishes and the left limit at `θ₀` where
/// both do.
pub fn ratio_f(scenario: &GhzScenario, theta: f64) -> f64 {
    let model = LocalModel::new(*scenario);
    let pl = model.diagonal_local_prob(theta);
    if pl == 0.0 && (theta - model.theta0()).abs() <= THETA0_SNAP {
        return ratio_limit_at_theta0(scenario);
    }
    let r = raw_ratio(&model, theta);
    if r.is_nan() {
        ratio_limit_at_theta0(scenario)
    } else {
        r
    }
}

/// Lower bound on the local content: the infimum of [`ratio_f`] over
/// `[0, π]`.
pub fn lower_bound(scenario: &GhzScenario, grid_points: usize, refine_tol: f64) -> f64 {
    lower_bound_detail(scenario, grid_points, refine_tol).value
}

/// Like [`lower_bound`] but also reports the minimizing angle.
pub fn lower_bound_detail(scenario: &GhzScenario, grid_points: usize, refine_tol: f64) -> Minimum {
    assert!(refine_tol > 0.0, "refine_tol must be positive");
    let model = LocalModel::new(*scenario);
    let searched = grid_then_golden(
        |t| raw_ratio(&model, t),
        0.0,
        PI,
        grid_points.max(3),
        refine_tol,
    );
    let limit = ratio_limit_at_theta0(scenario);
    if limit < searched.value {
        Minimum {
            x: model.theta0(),
            value: limit,
        }
    } else {
        searched
    }
}

/// Lower bound with the default grid and tolerance.
pub fn default_lower_bound(scenario: &GhzScenario) -> f64 {
    lower_bound(scenario, DEFAULT_GRID_POINTS, DEFAULT_REFINE_TOL)
}

/// Evidence that `P_Q - w P_L ≥ 0` on the sampled settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionCertificate {
    pub w: f64,
    /// Smallest observed `P_Q - w P_L`.
    pub min_residual: f64,
    pub samples: u64,
    pub seed: u64,
    pub violated: bool,
    /// Smallest observed `P_Q / P_L` over points with `P_L > 0`.
    pub min_ratio: f64,
}

struct Tally {
    min_residual: f64,
    min_ratio: f64,
}

impl Tally {
    fn new() -> Self {
        Self {
            min_residual: f64::INFINITY,
            min_ratio: f64::INFINITY,
        }
    }

    fn merge(&mut self, other: &Tally) {
        self.min_residual = self.min_residual.min(other.min_residual);
        self.min_ratio = self.min_ratio.min(other.min_ratio);
    }
}

struct Evaluator {
    scenario: GhzScenario,
    model: LocalModel,
    w: f64,
    pq: Vec<f64>,
    pl: Vec<f64>,
}

impl Evaluator {
    fn visit(&mut self, thetas: &[f64], tally: &mut Tally) {
        local_probs_all_outcomes(&self.model, thetas, &mut self.pl);
        for cos_phase in [-1.0, 1.0] {
            ghz_probs_all_outcomes(&self.scenario, thetas, cos_phase, &mut self.pq);
            for (&q, &l) in self.pq.iter().zip(&self.pl) {
                tally.min_residual = tally.min_residual.min(q - self.w * l);
                if l > 0.0 {
                    tally.min_ratio = tally.min_ratio.min(q / l);
                }
            }
        }
    }
}

/// Polar angles for sample `index`. Each index owns its own ChaCha stream,
/// so samples can be evaluated in any order with identical results.
pub fn sample_thetas(n: usize, seed: u64, index: u64, out: &mut Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    out.clear();
    out.extend((0..n).map(|_| rng.gen_range(0.0..=PI)));
}

/// Checks `P_Q - w P_L ≥ -CERTIFY_TOLERANCE` over a diagonal sweep and
/// `samples` random settings, for every outcome pattern and both extreme
/// phase sums `cos(Σφ) = ±1`.
pub fn certify(
    scenario: &GhzScenario,
    w: f64,
    samples: u64,
    seed: u64,
) -> Result<DecompositionCertificate> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Weight(w));
    }
    let n = scenario.n();
    let mut eval = Evaluator {
        scenario: *scenario,
        model: LocalModel::new(*scenario),
        w,
        pq: Vec::with_capacity(1 << n),
        pl: Vec::with_capacity(1 << n),
    };
    let mut tally = Tally::new();

    let mut thetas = vec![0.0; n];
    let last = (CERTIFY_DIAGONAL_POINTS - 1) as f64;
    let t0 = eval.model.theta0();
    let diagonal = (0..CERTIFY_DIAGONAL_POINTS)
        .map(|k| PI * k as f64 / last)
        .chain([t0 - 1e-6, t0 - 1e-4, t0 - 1e-2]);
    for theta in diagonal.filter(|t| (0.0..=PI).contains(t)) {
        thetas.fill(theta);
        eval.visit(&thetas, &mut tally);
    }

    let mut sampled = Tally::new();
    for index in 0..samples {
        sample_thetas(n, seed, index, &mut thetas);
        let mut one = Tally::new();
        eval.visit(&thetas, &mut one);
        sampled.merge(&one);
    }
    tally.merge(&sampled);

    Ok(DecompositionCertificate {
        w,
        min_residual: tally.min_residual,
        samples,
        seed,
        violated: tally.min_residual < -CERTIFY_TOLERANCE,
        min_ratio: tally.min_ratio,
    })
}

/// Outcome of [`certify_with_fallback`].
#[derive(Debug, Clone, PartialEq)]
pub struct FallbackOutcome {
    pub certificate: DecompositionCertificate,
    /// `true` when the requested weight failed and was lowered.
    pub lowered: bool,
}

/// Certifies `w`; if that fails, retries once at the smallest sampled ratio
/// `P_Q / P_L`, which is the largest weight the samples themselves support.
pub fn certify_with_fallback(
    scenario: &GhzScenario,
    w: f64,
    samples: u64,
    seed: u64,
) -> Result<FallbackOutcome> {
    let first = certify(scenario, w, samples, seed)?;
    if !first.violated {
        return Ok(FallbackOutcome {
            certificate: first,
            lowered: false,
        });
    }
    let lowered_w = first.min_ratio.clamp(0.0, w);
    let certificate = certify(scenario, lowered_w, samples, seed)?;
    Ok(FallbackOutcome {
        certificate,
        lowered: true,
    })
}

/// `P_NL = (P_Q - w P_L) / (1 - w)`.
pub fn nonlocal_prob(
    scenario: &GhzScenario,
    w: f64,
    context: &MeasurementContext,
    outcomes: &OutcomePattern,
) -> Result<f64> {
    if !(0.0..1.0).contains(&w) {
        return Err(Error::Weight(w));
    }
    let thetas: Vec<f64> = context.directions().iter().map(|d| d.theta()).collect();
    let model = LocalModel::new(*scenario);
    let pq = joint_prob_ghz(scenario, context, outcomes);
    let pl = local_prob(&model, &thetas, outcomes);
    Ok((pq - w * pl) / (1.0 - w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, FRAC_PI_8};

    fn sc(n: usize, alpha: f64) -> GhzScenario {
        GhzScenario::new(n, alpha).unwrap()
    }

    #[test]
    fn cos_theta0_formula_and_endpoints() {
        for n in 2..=12 {
            assert_eq!(LocalModel::new(sc(n, 0.0)).cos_theta0(), -1.0);
            assert_eq!(LocalModel::new(sc(n, FRAC_PI_4)).cos_theta0(), 0.0);
            for k in 1..10 {
                let alpha = FRAC_PI_4 * f64::from(k) / 10.0;
                let m = LocalModel::new(sc(n, alpha));
                let t = alpha.tan().powf(2.0 / n as f64);
                assert_abs_diff_eq!(m.cos_theta0(), -(1.0 - t) / (1.0 + t), epsilon = 1e-15);
                assert_abs_diff_eq!(m.theta0().cos(), m.cos_theta0(), epsilon = 1e-15);
                assert!((FRAC_PI_2..=PI).contains(&m.theta0()));
            }
        }
    }

    #[test]
    fn theta0_examples() {
        assert_eq!(theta0(&sc(2, 0.0)), PI);
        for n in 2..=12 {
            assert_abs_diff_eq!(theta0(&sc(n, FRAC_PI_4)), FRAC_PI_2, epsilon = 1e-15);
        }
        // cos θ₀ = -tan(π/4 - α) for two parties
        let t = theta0(&sc(2, FRAC_PI_6));
        assert_abs_diff_eq!(t.cos(), -0.267_949_192_431_122_7, epsilon = 1e-15);
        for k in 0..=20 {
            let alpha = FRAC_PI_4 * f64::from(k) / 20.0;
            let c = LocalModel::new(sc(2, alpha)).cos_theta0();
            assert_abs_diff_eq!(c, -(FRAC_PI_4 - alpha).tan(), epsilon = 1e-15);
        }
    }

    #[test]
    fn scarani_identity() {
        for k in 0..=40 {
            let alpha = FRAC_PI_4 * f64::from(k) / 40.0;
            let c = LocalModel::new(sc(2, alpha)).cos_theta0();
            assert_abs_diff_eq!(
                -c * (2.0 * alpha).cos(),
                1.0 - (2.0 * alpha).sin(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn local_prob_examples() {
        let m = LocalModel::new(sc(2, 0.0));
        assert_eq!(
            local_prob(&m, &[0.0, 0.0], &OutcomePattern::all_plus(2)),
            1.0
        );

        let m = LocalModel::new(sc(2, FRAC_PI_4));
        assert_eq!(
            local_prob(&m, &[FRAC_PI_3, FRAC_PI_3], &OutcomePattern::all_plus(2)),
            1.0
        );
        // cos θ = 0 gives a fair coin
        assert_eq!(
            local_prob(&m, &[FRAC_PI_2, FRAC_PI_2], &OutcomePattern::all_plus(2)),
            0.25
        );

        let m = LocalModel::new(sc(2, FRAC_PI_6));
        let p = local_prob(&m, &[m.theta0(), FRAC_PI_4], &OutcomePattern::all_plus(2));
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn local_model_reduces_to_product_state_at_alpha_zero() {
        let s = sc(3, 0.0);
        let m = LocalModel::new(s);
        let thetas = [0.4, 1.9, 2.8];
        let ctx = MeasurementContext::with_phase(&thetas, -1.0).unwrap();
        for r in OutcomePattern::all(3) {
            assert_abs_diff_eq!(
                local_prob(&m, &thetas, &r),
                joint_prob_ghz(&s, &ctx, &r),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn batched_local_matches_pointwise() {
        let m = LocalModel::new(sc(4, 0.3));
        let thetas = [0.1, 2.2, 1.6, 2.9];
        let mut out = Vec::new();
        local_probs_all_outcomes(&m, &thetas, &mut out);
        for (i, r) in OutcomePattern::all(4).enumerate() {
            assert_abs_diff_eq!(out[i], local_prob(&m, &thetas, &r), epsilon = 1e-16);
        }
    }

    #[test]
    fn ratio_examples() {
        assert_abs_diff_eq!(ratio_f(&sc(2, FRAC_PI_4), FRAC_PI_2), 0.0, epsilon = 1e-15);
        for alpha in [0.0, 0.2, FRAC_PI_6, FRAC_PI_4] {
            assert_abs_diff_eq!(
                ratio_f(&sc(2, alpha), 0.0),
                alpha.cos().powi(2),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn ratio_blows_up_at_theta0_for_three_parties() {
        let s = sc(3, PI / 12.0);
        let t0 = theta0(&s);
        let f3 = ratio_f(&s, t0 - 1e-3);
        let f4 = ratio_f(&s, t0 - 1e-4);
        assert!(f4 > 5.0 * f3, "{f3} {f4}");
        assert!(ratio_f(&s, t0 + 1e-3).is_infinite());
        assert!(ratio_f(&s, t0 + 1e-4).is_infinite());
        assert!(ratio_f(&s, t0).is_infinite());
    }

    #[test]
    fn removable_limit_for_two_parties() {
        for alpha in [0.05, PI / 12.0, FRAC_PI_8, FRAC_PI_6, 0.7] {
            let s = sc(2, alpha);
            let expected = 1.0 - (2.0 * alpha).sin();
            assert_abs_diff_eq!(ratio_limit_at_theta0(&s), expected, epsilon = 1e-8);
            assert_abs_diff_eq!(ratio_f(&s, theta0(&s)), expected, epsilon = 1e-8);
        }
    }

    #[test]
    fn lower_bound_examples() {
        let lb = default_lower_bound(&sc(2, PI / 12.0));
        assert_abs_diff_eq!(lb, 0.5, epsilon = 1e-6);
        let lb = default_lower_bound(&sc(3, PI / 12.0));
        assert!((lb - 0.28).abs() <= 0.005, "{lb}");
        for n in 2..=5 {
            assert!(default_lower_bound(&sc(n, 0.0)) >= 1.0 - 1e-6);
            assert!(default_lower_bound(&sc(n, FRAC_PI_4)) <= 1e-6);
        }
    }

    #[test]
    fn certify_examples() {
        let s = sc(2, FRAC_PI_6);
        let cert = certify(&s, 1.0 - FRAC_PI_3.sin(), 100_000, 0).unwrap();
        assert!(!cert.violated, "{cert:?}");
        let cert = certify(&s, 1.0, 10_000, 0).unwrap();
        assert!(cert.violated);
        for n in 2..=4 {
            let cert = certify(&sc(n, 0.4), 0.0, 2_000, 3).unwrap();
            assert!(!cert.violated);
            // P_Q alone; only round-off can push it below zero
            assert!(cert.min_residual >= -1e-15, "{cert:?}");
        }
        assert!(certify(&s, 1.5, 1, 0).is_err());
    }

    #[test]
    fn certificate_is_reproducible() {
        let s = sc(3, 0.3);
        let a = certify(&s, 0.2, 3_000, 42).unwrap();
        let b = certify(&s, 0.2, 3_000, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.min_residual.to_bits(), b.min_residual.to_bits());
    }

    #[test]
    fn sample_streams_are_order_independent() {
        let mut fwd = Vec::new();
        let mut buf = Vec::new();
        for i in 0..50 {
            sample_thetas(3, 9, i, &mut buf);
            fwd.push(buf.clone());
        }
        for i in (0..50).rev() {
            sample_thetas(3, 9, i, &mut buf);
            assert_eq!(buf, fwd[i as usize]);
        }
        assert_ne!(fwd[0], fwd[1]);
    }

    #[test]
    fn fallback_lowers_weight() {
        let s = sc(2, FRAC_PI_6);
        let out = certify_with_fallback(&s, 0.9, 5_000, 0).unwrap();
        assert!(out.lowered);
        assert!(out.certificate.w < 0.9);
        assert!(!out.certificate.violated);
    }

    #[test]
    fn nonlocal_examples() {
        let s = sc(3, 0.4);
        let ctx = MeasurementContext::from_angles(&[0.3, 1.2, 2.0], &[0.0, 1.0, 2.0]).unwrap();
        for r in OutcomePattern::all(3) {
            assert_eq!(
                nonlocal_prob(&s, 0.0, &ctx, &r).unwrap(),
                joint_prob_ghz(&s, &ctx, &r)
            );
        }

        let s = sc(2, PI / 12.0);
        let ctx = MeasurementContext::from_angles(&[0.7, 2.5], &[1.0, 0.3]).unwrap();
        let total: f64 = OutcomePattern::all(2)
            .map(|r| nonlocal_prob(&s, 0.5, &ctx, &r).unwrap())
            .sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);

        let s = sc(2, FRAC_PI_6);
        let t0 = theta0(&s);
        let ctx = MeasurementContext::with_phase(&[t0, t0], -1.0).unwrap();
        let p = nonlocal_prob(
            &s,
            1.0 - FRAC_PI_3.sin(),
            &ctx,
            &OutcomePattern::all_plus(2),
        )
        .unwrap();
        assert_abs_diff_eq!(p, 0.0, epsilon = 1e-15);

        assert!(nonlocal_prob(&s, 1.0, &ctx, &OutcomePattern::all_plus(2)).is_err());
    }

    #[test]
    fn zero_tracking_two_parties() {
        for k in 1..20 {
            let alpha = FRAC_PI_4 * f64::from(k) / 20.0;
            let s = sc(2, alpha);
            let m = LocalModel::new(s);
            for j in 1..40 {
                // tan(θ₁/2) tan(θ₂/2) = cot α zeroes the all-plus probability.
                let t1 = m.theta0() * f64::from(j) / 40.0;
                let t2 = 2.0 * (1.0 / (alpha.tan() * (0.5 * t1).tan())).atan();
                let ctx = MeasurementContext::with_phase(&[t1, t2], -1.0).unwrap();
                let r = OutcomePattern::all_plus(2);
                let pq = joint_prob_ghz(&s, &ctx, &r);
                assert!(pq.abs() <= 1e-12);
                let (c0, c1, c2) = (m.cos_theta0(), t1.cos(), t2.cos());
                if (c1 > c0 && c0 > c2) || (c2 > c0 && c0 > c1) {
                    assert!(local_prob(&m, &[t1, t2], &r) <= 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn local_normalization(
            (n, alpha, thetas) in (2usize..=6, 0.0..=FRAC_PI_4)
                .prop_flat_map(|(n, a)| (Just(n), Just(a), proptest::collection::vec(0.0..=PI, n)))
        ) {
            let m = LocalModel::new(sc(n, alpha));
            let total: f64 = OutcomePattern::all(n).map(|r| local_prob(&m, &thetas, &r)).sum();
            prop_assert!((total - 1.0).abs() <= 1e-12);
            for r in OutcomePattern::all(n) {
                let p = local_prob(&m, &thetas, &r);
                prop_assert!((0.0..=1.0).contains(&p));
            }
        }

        #[test]
        fn local_flip_is_reflection(
            (n, alpha, thetas, idx, party) in (2usize..=6, 0.0..=FRAC_PI_4).prop_flat_map(|(n, a)| (
                Just(n), Just(a), proptest::collection::vec(0.0..=PI, n), 0..(1usize << n), 0..n,
            ))
        ) {
            let m = LocalModel::new(sc(n, alpha));
            let r = OutcomePattern::from_index(n, idx);
            let mut flipped = r.signs().to_vec();
            flipped[party] = -flipped[party];
            let flipped = OutcomePattern::new(flipped).unwrap();
            let mut reflected = thetas.clone();
            reflected[party] = PI - reflected[party];
            let a = local_prob(&m, &thetas, &flipped);
            let b = local_prob(&m, &reflected, &r);
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
