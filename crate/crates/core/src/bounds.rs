//! Upper bounds on the local content from Bell-type inequalities.
//!
//! Any inequality `P ≤ P_L*` with no-signaling maximum `P_NS*` and quantum
//! value `P_Q*` bounds the local weight by
//! `(P_NS* - P_Q*) / (P_NS* - P_L*)`. For `N ≥ 3` the constants of an
//! inequality maximally violated by GHZ states give a closed form. The MABK
//! family is handled numerically: its quantum maximum is searched over
//! measurement directions on the dense state.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ghz_state, GhzScenario, StateVector};

/// `quantum_max` above `1 + MABK_TOLERANCE` counts as a violation.
pub const MABK_TOLERANCE: f64 = 1e-6;
/// Largest party count accepted by [`mabk_quantum_max`].
pub const MABK_MAX_PARTIES: usize = 6;

/// Local bound, no-signaling maximum and quantum value of a Bell expression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityConstants {
    pub p_local: f64,
    pub p_ns: f64,
    pub p_quantum: f64,
}

/// `(P_NS* - P_Q*) / (P_NS* - P_L*)`, clamped to `[0, 1]`.
pub fn upper_from_inequality(c: &InequalityConstants) -> Result<f64> {
    if c.p_ns.is_nan() || c.p_local.is_nan() || c.p_ns <= c.p_local {
        return Err(Error::Constants(format!(
            "no-signaling maximum {} must exceed local bound {}",
            c.p_ns, c.p_local
        )));
    }
    Ok(((c.p_ns - c.p_quantum) / (c.p_ns - c.p_local)).clamp(0.0, 1.0))
}

/// Constants of the GHZ-tailored inequality for `n ≥ 3`: local bound 1,
/// no-signaling maximum `2^{n-2}`, quantum value
/// `√(2^{n-2} sin² 2α + cos² 2α)`.
pub fn chen_constants(scenario: &GhzScenario) -> Result<InequalityConstants> {
    if scenario.n() < 3 {
        return Err(Error::Unsupported(
            "the GHZ inequality bound needs at least three parties".into(),
        ));
    }
    let ns = ((scenario.n() - 2) as f64).exp2();
    let (s2, c2) = (2.0 * scenario.alpha()).sin_cos();
    Ok(InequalityConstants {
        p_local: 1.0,
        p_ns: ns,
        p_quantum: (ns * s2 * s2 + c2 * c2).sqrt(),
    })
}

/// Closed-form upper bound on the local content for `n ≥ 3`.
pub fn chen_upper(scenario: &GhzScenario) -> Result<f64> {
    upper_from_inequality(&chen_constants(scenario)?)
}

/// Upper bound implied by the MABK inequalities, where it is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MabkImplied {
    Zero,
    One,
    Unknown,
}

impl MabkImplied {
    pub fn as_str(&self) -> &'static str {
        match self {
            MabkImplied::Zero => "zero",
            MabkImplied::One => "one",
            MabkImplied::Unknown => "unknown",
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            MabkImplied::Zero => Some(0.0),
            MabkImplied::One => Some(1.0),
            MabkImplied::Unknown => None,
        }
    }
}

/// `Zero` for the maximally entangled state, `One` when
/// `sin 2α ≤ 1/√(2^{n-1})` (no MABK violation), `Unknown` otherwise.
pub fn mabk_implied(scenario: &GhzScenario) -> MabkImplied {
    if scenario.alpha() == FRAC_PI_4 {
        return MabkImplied::Zero;
    }
    let threshold = ((scenario.n() - 1) as f64).exp2().sqrt().recip();
    if (2.0 * scenario.alpha()).sin() <= threshold + 1e-12 {
        MabkImplied::One
    } else {
        MabkImplied::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MabkReport {
    /// Largest MABK value found; local models satisfy `≤ 1`.
    pub quantum_max: f64,
    pub violates: bool,
    pub implied_upper: MabkImplied,
    /// Best settings as `(θ, φ, θ', φ')` per party.
    pub settings: Vec<[f64; 4]>,
}

fn spin(theta: f64, phi: f64) -> Matrix2<Complex64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Matrix2::new(
        Complex64::new(ct, 0.0),
        Complex64::new(st * cp, -st * sp),
        Complex64::new(st * cp, st * sp),
        Complex64::new(-ct, 0.0),
    )
}

fn to_dynamic(m: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_iterator(2, 2, m.iter().copied())
}

/// MABK operator and its primed partner for per-party observable pairs
/// `(A_j, A'_j)`:
/// `M_k = ½ [M_{k-1} ⊗ (A_k + A'_k) + M'_{k-1} ⊗ (A_k - A'_k)]`, with `M'_k`
/// obtained by swapping every party's two observables; `M_1 = A_1`.
pub fn mabk_operator(pairs: &[(Matrix2<Complex64>, Matrix2<Complex64>)]) -> DMatrix<Complex64> {
    assert!(!pairs.is_empty(), "need at least one party");
    let half = Complex64::new(0.5, 0.0);
    let (a, ap) = &pairs[0];
    let mut m = to_dynamic(a);
    let mut mp = to_dynamic(ap);
    for (b, bp) in &pairs[1..] {
        let sum = to_dynamic(&(b + bp));
        let diff = to_dynamic(&(b - bp));
        let next = (m.kronecker(&sum) + mp.kronecker(&diff)) * half;
        // primed: swap M ↔ M', B ↔ B'
        let next_p = (mp.kronecker(&sum) - m.kronecker(&diff)) * half;
        m = next;
        mp = next_p;
    }
    m
}

/// `⟨ψ| M |ψ⟩` for settings given as `[θ, φ, θ', φ']` per party.
pub fn mabk_value(state: &StateVector, settings: &[[f64; 4]]) -> f64 {
    let pairs: Vec<_> = settings
        .iter()
        .map(|s| (spin(s[0], s[1]), spin(s[2], s[3])))
        .collect();
    let m = mabk_operator(&pairs);
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    (psi.adjoint() * m * psi)[(0, 0)].re
}

/// Coordinate ascent with a shrinking step over all `4n` angles.
fn climb(state: &StateVector, start: Vec<[f64; 4]>) -> (f64, Vec<[f64; 4]>) {
    let mut x = start;
    let mut best = mabk_value(state, &x);
    let mut step = 0.5;
    while step > 1e-9 {
        let mut improved = false;
        for j in 0..x.len() {
            for k in 0..4 {
                for dir in [1.0, -1.0] {
                    let old = x[j][k];
                    x[j][k] = old + dir * step;
                    let v = mabk_value(state, &x);
                    if v > best {
                        best = v;
                        improved = true;
                        break;
                    }
                    x[j][k] = old;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (best, x)
}

/// Multi-start numerical maximization of the MABK expression on the GHZ
/// state. Restart `i` draws its starting angles from ChaCha stream `i` of
/// `seed`, so the result depends only on `(scenario, restarts, seed)`.
pub fn mabk_quantum_max(scenario: &GhzScenario, restarts: usize, seed: u64) -> Result<MabkReport> {
    let n = scenario.n();
    if n > MABK_MAX_PARTIES {
        return Err(Error::DenseTooLarge(n));
    }
    let state = ghz_state(scenario)?;
    let mut best: Option<(f64, Vec<[f64; 4]>)> = None;
    for restart in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(restart as u64);
        let start: Vec<[f64; 4]> = (0..n)
            .map(|_| {
                [
                    rng.gen_range(0.0..std::f64::consts::PI),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                    rng.gen_range(0.0..std::f64::consts::PI),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                ]
            })
            .collect();
        let candidate = climb(&state, start);
        if best.as_ref().is_none_or(|(v, _)| candidate.0 > *v) {
            best = Some(candidate);
        }
    }
    let (quantum_max, settings) = best.expect("at least one restart");
    Ok(MabkReport {
        quantum_max,
        violates: quantum_max > 1.0 + MABK_TOLERANCE,
        implied_upper: mabk_implied(scenario),
        settings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

    fn sc(n: usize, alpha: f64) -> GhzScenario {
        GhzScenario::new(n, alpha).unwrap()
    }

    #[test]
    fn generic_formula() {
        let c = |l, ns, q| InequalityConstants {
            p_local: l,
            p_ns: ns,
            p_quantum: q,
        };
        assert_eq!(upper_from_inequality(&c(1.0, 2.0, 2.0)).unwrap(), 0.0);
        assert_eq!(upper_from_inequality(&c(1.0, 2.0, 1.0)).unwrap(), 1.0);
        let chsh = upper_from_inequality(&c(2.0, 4.0, 2.0 * SQRT_2)).unwrap();
        assert_abs_diff_eq!(chsh, (4.0 - 2.0 * SQRT_2) / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chsh, 0.585_786_437_626_905, epsilon = 1e-12);
        assert!(upper_from_inequality(&c(2.0, 2.0, 2.0)).is_err());
        assert!(upper_from_inequality(&c(2.0, 1.0, 2.0)).is_err());
    }

    #[test]
    fn chen_examples() {
        assert_eq!(chen_upper(&sc(3, 0.0)).unwrap(), 1.0);
        assert_abs_diff_eq!(
            chen_upper(&sc(3, FRAC_PI_4)).unwrap(),
            2.0 - SQRT_2,
            epsilon = 1e-12
        );
        assert!(chen_upper(&sc(2, 0.3)).is_err());
        let mut prev = 0.0;
        for n in 3..=12 {
            let v = chen_upper(&sc(n, FRAC_PI_4)).unwrap();
            let ns = ((n - 2) as f64).exp2();
            assert_abs_diff_eq!(v, (ns - ns.sqrt()) / (ns - 1.0), epsilon = 1e-12);
            assert!(v > prev);
            prev = v;
        }
        assert!(prev > 0.95);
    }

    #[test]
    fn chen_nonincreasing_in_alpha() {
        for n in 3..=8 {
            assert_eq!(chen_upper(&sc(n, 0.0)).unwrap(), 1.0);
            let vals: Vec<f64> = (0..=100)
                .map(|k| chen_upper(&sc(n, FRAC_PI_4 * f64::from(k) / 100.0)).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] <= w[0] + 1e-15));
        }
    }

    #[test]
    fn implied_rules() {
        assert_eq!(mabk_implied(&sc(3, FRAC_PI_4)), MabkImplied::Zero);
        assert_eq!(mabk_implied(&sc(3, PI / 12.0)), MabkImplied::One);
        assert_eq!(mabk_implied(&sc(3, 0.4)), MabkImplied::Unknown);
        assert_eq!(mabk_implied(&sc(2, 0.0)), MabkImplied::One);
    }

    #[test]
    fn operator_is_chsh_for_two_parties() {
        let z = spin(0.0, 0.0);
        let x = spin(FRAC_PI_2, 0.0);
        let b = spin(PI / 4.0, 0.0);
        let bp = spin(-PI / 4.0, 0.0);
        let m = mabk_operator(&[(z, x), (b, bp)]);
        let half = Complex64::new(0.5, 0.0);
        let expected = (to_dynamic(&z).kronecker(&to_dynamic(&(b + bp)))
            + to_dynamic(&x).kronecker(&to_dynamic(&(b - bp))))
            * half;
        assert!((m.clone() - expected).iter().all(|c| c.norm() < 1e-15));
        // Hermitian
        assert!((m.adjoint() - m).iter().all(|c| c.norm() < 1e-15));
    }

    #[test]
    fn tsirelson_settings_reach_sqrt2() {
        let state = ghz_state(&sc(2, FRAC_PI_4)).unwrap();
        let v = mabk_value(
            &state,
            &[[0.0, 0.0, FRAC_PI_2, 0.0], [PI / 4.0, 0.0, -PI / 4.0, 0.0]],
        );
        assert_abs_diff_eq!(v, SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn maximizer_is_deterministic() {
        let s = sc(3, 0.5);
        let a = mabk_quantum_max(&s, 3, 11).unwrap();
        let b = mabk_quantum_max(&s, 3, 11).unwrap();
        assert_eq!(a.quantum_max.to_bits(), b.quantum_max.to_bits());
    }

    #[test]
    fn maximizer_examples() {
        let r = mabk_quantum_max(&sc(2, FRAC_PI_4), 4, 0).unwrap();
        assert!(r.quantum_max >= SQRT_2 - 1e-4, "{}", r.quantum_max);
        assert!(r.quantum_max <= SQRT_2 + 1e-12);
        assert!(r.violates);

        let r = mabk_quantum_max(&sc(3, FRAC_PI_4), 4, 0).unwrap();
        assert_eq!(r.implied_upper, MabkImplied::Zero);
        assert!(r.quantum_max >= 2.0 - 1e-4, "{}", r.quantum_max);

        assert!(mabk_quantum_max(&sc(7, 0.1), 1, 0).is_err());
    }
}
