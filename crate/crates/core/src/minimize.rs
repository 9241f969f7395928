//! One-dimensional minimization on a closed interval.

/// `(√5 - 1) / 2`
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimum found by a search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minimum {
    pub x: f64,
    pub value: f64,
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`, stopping when
/// the bracket is narrower than `tol`. The returned point is the best of all
/// evaluated points, including the two ends of the initial bracket, so a
/// minimum that sits on the boundary is not lost. Infinite values are treated
/// as ordinary (large) values; NaN is treated as `+∞`.
pub fn golden_section<F>(mut f: F, lo: f64, hi: f64, tol: f64) -> Minimum
where
    F: FnMut(f64) -> f64,
{
    let mut eval = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = Minimum {
        x: a,
        value: eval(a),
    };
    let fb = eval(b);
    if fb < best.value {
        best = Minimum { x: b, value: fb };
    }

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    while (b - a) > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2);
        }
        // Bracket can no longer shrink in floating point.
        if x1 >= x2 && (b - a) <= 4.0 * f64::EPSILON * b.abs().max(1.0) {
            break;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best.value {
            best = Minimum { x, value: v };
        }
    }
    best
}

/// Grid scan of `f` over `[lo, hi]` with `points` samples, followed by
/// golden-section refinement of every local bracketing triple.
pub fn grid_then_golden<F>(f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Minimum
where
    F: Fn(f64) -> f64,
{
    assert!(points >= 3, "grid needs at least three points");
    let step = (hi - lo) / (points - 1) as f64;
    let xs: Vec<f64> = (0..points)
        .map(|k| {
            if k + 1 == points {
                hi
            } else {
                lo + step * k as f64
            }
        })
        .collect();
    let ys: Vec<f64> = xs
        .iter()
        .map(|&x| {
            let v = f(x);
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        })
        .collect();

    let mut best = Minimum {
        x: xs[0],
        value: ys[0],
    };
    for (&x, &y) in xs.iter().zip(&ys) {
        if y < best.value {
            best = Minimum { x, value: y };
        }
    }
    for k in 1..points - 1 {
        if ys[k].is_finite() && ys[k] <= ys[k - 1] && ys[k] <= ys[k + 1] {
            let m = golden_section(&f, xs[k - 1], xs[k + 1], tol);
            if m.value < best.value {
                best = m;
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let m = golden_section(|x| (x - 0.3).powi(2) + 1.0, -1.0, 2.0, 1e-10);
        assert!((m.x - 0.3).abs() < 1e-7);
        assert!((m.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_minimum_kept() {
        let m = golden_section(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(m.x, 0.0);
        let m = golden_section(|x| -x, 0.0, 1.0, 1e-10);
        assert_eq!(m.x, 1.0);
    }

    #[test]
    fn infinite_region_is_avoided() {
        let f = |x: f64| if x > 0.5 { f64::INFINITY } else { 1.0 - x };
        let m = golden_section(f, 0.0, 1.0, 1e-12);
        assert!((m.x - 0.5).abs() < 1e-9);
        let m = golden_section(|_| f64::NAN, 0.0, 1.0, 1e-6);
        assert!(m.value.is_infinite());
    }

    #[test]
    fn grid_finds_global_of_multimodal() {
        // two basins, the deeper one narrow
        let f = |x: f64| (5.0 * x).cos() + 0.1 * (x - 2.0).powi(2);
        let m = grid_then_golden(f, 0.0, std::f64::consts::PI, 1000, 1e-10);
        let brute = (0..=1_000_000)
            .map(|k| std::f64::consts::PI * k as f64 / 1e6)
            .map(f)
            .fold(f64::INFINITY, f64::min);
        assert!(m.value <= brute + 1e-12);
        assert!(m.value > brute - 1e-9);
    }
}
