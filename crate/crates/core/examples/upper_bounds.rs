//! Upper bounds on the local weight from a Bell inequality with known
//! local, no-signalling and quantum values.

use std::f64::consts::FRAC_PI_4;

use ghz_epr2::bounds::{chen_upper, mabk_implied, upper_from_inequality, InequalityConstants};
use ghz_epr2::epr2::default_lower_bound;
use ghz_epr2::GhzScenario;

fn main() -> ghz_epr2::Result<()> {
    // CHSH: local 2, no-signalling 4, quantum 2√2.
    let chsh = InequalityConstants {
        p_local: 2.0,
        p_ns: 4.0,
        p_quantum: 2.0 * 2f64.sqrt(),
    };
    println!(
        "CHSH at maximal violation: w <= {:.6}",
        upper_from_inequality(&chsh)?
    );

    println!(" n    alpha    lower     upper  mabk");
    for n in [3, 4, 6, 12] {
        for alpha in [0.1, 0.4, FRAC_PI_4] {
            let s = GhzScenario::new(n, alpha)?;
            let lower = if n <= 6 {
                format!("{:.6}", default_lower_bound(&s))
            } else {
                "-".to_string()
            };
            println!(
                "{n:2} {alpha:8.5} {lower:>8} {:9.6}  {}",
                chen_upper(&s)?,
                mabk_implied(&s).as_str()
            );
        }
    }
    Ok(())
}
