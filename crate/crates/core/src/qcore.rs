//! Quantum joint probabilities for generalized GHZ states.
//!
//! Two independent routes are provided: a dense state-vector engine that
//! applies single-qubit projectors to `cos α |0…0⟩ + sin α |1…1⟩`, and the
//! closed-form expression in terms of the measurement angles. The dense
//! engine is the oracle for the closed form.
//!
//! Conventions: `σ_z |0⟩ = +|0⟩`; party `j` (0-based) occupies bit
//! `n - 1 - j` of the computational-basis index, so index `0b0…0` is
//! `|0…0⟩` and the first party is the most significant bit.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest party count supported by the closed-form route.
pub const MAX_PARTIES: usize = 12;
/// Largest party count supported by the dense state-vector route.
pub const DENSE_MAX_PARTIES: usize = 8;

/// Slack accepted on angle inputs before they are snapped to their range.
const ANGLE_SLACK: f64 = 1e-6;

/// Sign of the `cos(Σφ)` cross term in the closed form. Fixed by matching
/// the dense engine; at `Σφ = π` the cross term is `-sin 2α ∏ r_j sin θ_j / 2^N`.
pub const CROSS_TERM_SIGN: f64 = 1.0;

/// `(N, α)` for the state `cos α |0…0⟩ + sin α |1…1⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzScenario {
    n: usize,
    alpha: f64,
}

impl GhzScenario {
    /// Values of `alpha` within `1e-6` outside `[0, π/4]` are snapped to the
    /// nearest endpoint so that rounded decimal inputs such as `0.7853982`
    /// are accepted.
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        if !(2..=MAX_PARTIES).contains(&n) {
            return Err(Error::PartyCount(n));
        }
        if !(-ANGLE_SLACK..=FRAC_PI_4 + ANGLE_SLACK).contains(&alpha) {
            return Err(Error::Alpha(alpha));
        }
        Ok(Self {
            n,
            alpha: alpha.clamp(0.0, FRAC_PI_4),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of outcome patterns, `2^n`.
    pub fn outcome_count(&self) -> usize {
        1 << self.n
    }
}

/// Measurement direction on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDirection {
    theta: f64,
    phi: f64,
}

impl BlochDirection {
    /// `theta` must lie in `[0, π]`; `phi` is reduced modulo `2π`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(-ANGLE_SLACK..=PI + ANGLE_SLACK).contains(&theta) {
            return Err(Error::Theta(theta));
        }
        Ok(Self {
            theta: theta.clamp(0.0, PI),
            phi: phi.rem_euclid(2.0 * PI),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector `(sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }
}

/// One measurement direction per party.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementContext {
    directions: Vec<BlochDirection>,
}

impl MeasurementContext {
    pub fn new(directions: Vec<BlochDirection>) -> Self {
        Self { directions }
    }

    /// Context with the given polar angles and azimuths.
    pub fn from_angles(thetas: &[f64], phis: &[f64]) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::Dimension {
                expected: thetas.len(),
                got: phis.len(),
            });
        }
        let directions = thetas
            .iter()
            .zip(phis)
            .map(|(&t, &p)| BlochDirection::new(t, p))
            .collect::<Result<_>>()?;
        Ok(Self { directions })
    }

    /// Context with polar angles `thetas` and azimuths chosen so that
    /// `cos(Σφ) = cos_phase`, where `cos_phase` is `+1` or `-1`.
    pub fn with_phase(thetas: &[f64], cos_phase: f64) -> Result<Self> {
        let mut phis = vec![0.0; thetas.len()];
        if cos_phase < 0.0 {
            if let Some(first) = phis.first_mut() {
                *first = PI;
            }
        }
        Self::from_angles(thetas, &phis)
    }

    pub fn directions(&self) -> &[BlochDirection] {
        &self.directions
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn phase_sum(&self) -> f64 {
        self.directions.iter().map(|d| d.phi).sum()
    }
}

/// Outcome signs `r_j ∈ {+1, -1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomePattern {
    r: Vec<i8>,
}

impl OutcomePattern {
    pub fn new(r: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = r.iter().find(|&&x| x != 1 && x != -1) {
            return Err(Error::Outcome(bad));
        }
        Ok(Self { r })
    }

    pub fn all_plus(n: usize) -> Self {
        Self { r: vec![1; n] }
    }

    /// Pattern number `index` among the `2^n` patterns. A set bit `n - 1 - j`
    /// means party `j` saw `-1`, matching the basis-index convention.
    pub fn from_index(n: usize, index: usize) -> Self {
        let r = (0..n)
            .map(|j| {
                if (index >> (n - 1 - j)) & 1 == 1 {
                    -1
                } else {
                    1
                }
            })
            .collect();
        Self { r }
    }

    /// All `2^n` patterns in index order.
    pub fn all(n: usize) -> impl Iterator<Item = OutcomePattern> {
        (0..1usize << n).map(move |i| Self::from_index(n, i))
    }

    pub fn signs(&self) -> &[i8] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Pure state of `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Dimension {
                expected: len.next_power_of_two().max(2),
                got: len,
            });
        }
        let n = len.trailing_zeros() as usize;
        if n > DENSE_MAX_PARTIES {
            return Err(Error::DenseTooLarge(n));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Unsupported(format!(
                "state is not normalized (squared norm {norm})"
            )));
        }
        Ok(Self { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a single-qubit operator to party `party` in place.
    pub(crate) fn apply_single(&mut self, party: usize, op: &Matrix2<Complex64>) {
        apply_single(&mut self.amplitudes, self.n, party, op);
    }

    pub(crate) fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

fn apply_single(amps: &mut [Complex64], n: usize, party: usize, op: &Matrix2<Complex64>) {
    let stride = 1usize << (n - 1 - party);
    for base in 0..amps.len() {
        if base & stride != 0 {
            continue;
        }
        let a0 = amps[base];
        let a1 = amps[base | stride];
        amps[base] = op[(0, 0)] * a0 + op[(0, 1)] * a1;
        amps[base | stride] = op[(1, 0)] * a0 + op[(1, 1)] * a1;
    }
}

/// `cos α |0…0⟩ + sin α |1…1⟩` as a dense vector.
pub fn ghz_state(scenario: &GhzScenario) -> Result<StateVector> {
    let n = scenario.n;
    if n > DENSE_MAX_PARTIES {
        return Err(Error::DenseTooLarge(n));
    }
    let dim = 1usize << n;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    let (s, c) = scenario.alpha.sin_cos();
    amplitudes[0] = Complex64::new(c, 0.0);
    amplitudes[dim - 1] = Complex64::new(s, 0.0);
    Ok(StateVector { n, amplitudes })
}

/// Observable `n⃗ · σ⃗` for a direction.
pub fn spin_observable(direction: &BlochDirection) -> Matrix2<Complex64> {
    let [x, y, z] = direction.unit_vector();
    Matrix2::new(
        Complex64::new(z, 0.0),
        Complex64::new(x, -y),
        Complex64::new(x, y),
        Complex64::new(-z, 0.0),
    )
}

/// Projector `½ (I + r n⃗·σ⃗)` onto outcome `r` along `direction`.
pub fn projector(direction: &BlochDirection, outcome: i8) -> Matrix2<Complex64> {
    let r = f64::from(outcome.signum());
    let half = Complex64::new(0.5, 0.0);
    let identity = Matrix2::<Complex64>::identity();
    (identity + spin_observable(direction) * Complex64::new(r, 0.0)) * half
}

fn check_dims(n: usize, context: &MeasurementContext, outcomes: &OutcomePattern) -> Result<()> {
    if context.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: context.len(),
        });
    }
    if outcomes.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: outcomes.len(),
        });
    }
    Ok(())
}

/// `‖(Π_{r_1} ⊗ … ⊗ Π_{r_N}) |ψ⟩‖²` computed on the dense state.
pub fn joint_prob_dense(
    state: &StateVector,
    context: &MeasurementContext,
    outcomes: &OutcomePattern,
) -> Result<f64> {
    check_dims(state.n, context, outcomes)?;
    let mut projected = state.clone();
    for (party, (dir, &r)) in context.directions.iter().zip(&outcomes.r).enumerate() {
        projected.apply_single(party, &projector(dir, r));
    }
    Ok(projected.norm_sqr())
}

/// `⟨ψ| ⊗_j O_j |ψ⟩` for single-party operators `ops` on the dense state.
pub fn product_expectation(state: &StateVector, ops: &[Matrix2<Complex64>]) -> Result<Complex64> {
    if ops.len() != state.n {
        return Err(Error::Dimension {
            expected: state.n,
            got: ops.len(),
        });
    }
    let mut applied = state.amplitudes.clone();
    for (party, op) in ops.iter().enumerate() {
        apply_single(&mut applied, state.n, party, op);
    }
    Ok(state.inner(&applied))
}

/// Closed-form GHZ joint probability for arbitrary azimuths.
///
/// Panics if `context` or `outcomes` do not have `scenario.n()` entries.
pub fn joint_prob_ghz(
    scenario: &GhzScenario,
    context: &MeasurementContext,
    outcomes: &OutcomePattern,
) -> f64 {
    joint_prob_ghz_signed(scenario, context, outcomes, CROSS_TERM_SIGN)
}

/// [`joint_prob_ghz`] with an explicit cross-term sign. Only the self-test's
/// negative control passes anything other than [`CROSS_TERM_SIGN`].
#[doc(hidden)]
pub fn joint_prob_ghz_signed(
    scenario: &GhzScenario,
    context: &MeasurementContext,
    outcomes: &OutcomePattern,
    cross_sign: f64,
) -> f64 {
    check_dims(scenario.n, context, outcomes).expect("context/outcome length must equal n");
    let (sa, ca) = scenario.alpha.sin_cos();
    let mut up = 1.0;
    let mut down = 1.0;
    let mut cross = 1.0;
    for (dir, &r) in context.directions.iter().zip(&outcomes.r) {
        let r = f64::from(r);
        let (st, ct) = dir.theta.sin_cos();
        up *= 1.0 + r * ct;
        down *= 1.0 - r * ct;
        cross *= r * st;
    }
    let scale = (scenario.n as f64).exp2().recip();
    let phase = context.phase_sum().cos();
    scale * (ca * ca * up + sa * sa * down + cross_sign * 2.0 * sa * ca * phase * cross)
}

/// Closed-form probabilities of every outcome pattern, in
/// [`OutcomePattern::from_index`] order, for polar angles `thetas` and
/// `cos(Σφ) = cos_phase`. Writes `2^n` values into `out`.
pub fn ghz_probs_all_outcomes(
    scenario: &GhzScenario,
    thetas: &[f64],
    cos_phase: f64,
    out: &mut Vec<f64>,
) {
    assert_eq!(thetas.len(), scenario.n, "theta list length must equal n");
    let n = scenario.n;
    let dim = 1usize << n;
    // Products are expanded party by party; the pattern index grows by one
    // bit per party, most significant first.
    let mut up = Vec::with_capacity(dim);
    let mut down = Vec::with_capacity(dim);
    let mut cross = Vec::with_capacity(dim);
    up.push(1.0);
    down.push(1.0);
    cross.push(1.0);
    for &theta in thetas {
        let (st, ct) = theta.sin_cos();
        let len = up.len();
        up.resize(2 * len, 0.0);
        down.resize(2 * len, 0.0);
        cross.resize(2 * len, 0.0);
        // Descending so that slot i is read before slots 2i, 2i+1 are written.
        for i in (0..len).rev() {
            let (u, d, c) = (up[i], down[i], cross[i]);
            up[2 * i] = u * (1.0 + ct);
            up[2 * i + 1] = u * (1.0 - ct);
            down[2 * i] = d * (1.0 - ct);
            down[2 * i + 1] = d * (1.0 + ct);
            cross[2 * i] = c * st;
            cross[2 * i + 1] = -c * st;
        }
    }
    let (sa, ca) = scenario.alpha.sin_cos();
    let (cc, ss, cs) = (
        ca * ca,
        sa * sa,
        CROSS_TERM_SIGN * 2.0 * sa * ca * cos_phase,
    );
    let scale = (n as f64).exp2().recip();
    out.clear();
    out.extend((0..dim).map(|i| scale * (cc * up[i] + ss * down[i] + cs * cross[i])));
}

/// Joint probability on the diagonal `θ_1 = … = θ_N = θ`, all outcomes `+1`,
/// `Σφ = π`: `[cos α cos^N(θ/2) - sin α sin^N(θ/2)]²`.
pub fn diagonal_prob(scenario: &GhzScenario, theta: f64) -> f64 {
    let amp = diagonal_amplitude(scenario, theta);
    amp * amp
}

/// `cos α cos^N(θ/2) - sin α sin^N(θ/2)`; its sign changes once on `(0, π)`.
pub fn diagonal_amplitude(scenario: &GhzScenario, theta: f64) -> f64 {
    let (sh, ch) = (0.5 * theta).sin_cos();
    let n = scenario.n as i32;
    let (sa, ca) = scenario.alpha.sin_cos();
    ca * ch.powi(n) - sa * sh.powi(n)
}
