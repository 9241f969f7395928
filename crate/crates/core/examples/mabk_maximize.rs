//! Numerically maximizes the MABK expression over local settings.
//!
//!     cargo run --release --example mabk_maximize

use std::f64::consts::FRAC_PI_4;

use ghz_epr2::bounds::mabk_quantum_max;
use ghz_epr2::GhzScenario;

fn main() -> ghz_epr2::Result<()> {
    for n in [2, 3] {
        for alpha in [0.1, 0.3, FRAC_PI_4] {
            let report = mabk_quantum_max(&GhzScenario::new(n, alpha)?, 6, 0)?;
            println!(
                "n={n} alpha={alpha:.4} max={:.6} violates={} implied={}",
                report.quantum_max,
                report.violates,
                report.implied_upper.as_str()
            );
        }
    }
    let best = mabk_quantum_max(&GhzScenario::new(2, FRAC_PI_4)?, 6, 0)?;
    for (k, s) in best.settings.iter().enumerate() {
        println!(
            "party {k}: theta={:.4} phi={:.4} theta'={:.4} phi'={:.4}",
            s[0], s[1], s[2], s[3]
        );
    }
    Ok(())
}
