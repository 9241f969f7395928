//! Lower bound on the local weight as a function of α, one column per
//! party count. Output is whitespace-separated and plots directly.
//!
//!     cargo run --release --example lower_bound_curves > curves.dat

use std::f64::consts::FRAC_PI_4;

use ghz_epr2::epr2::default_lower_bound;
use ghz_epr2::GhzScenario;

fn main() -> ghz_epr2::Result<()> {
    let parties = [2, 3, 4, 5];
    print!("# alpha");
    for n in parties {
        print!("      N={n}");
    }
    println!();
    for k in 0..=40 {
        let alpha = if k == 40 {
            FRAC_PI_4
        } else {
            FRAC_PI_4 * f64::from(k) / 40.0
        };
        print!("{alpha:.5}");
        for n in parties {
            print!(" {:9.6}", default_lower_bound(&GhzScenario::new(n, alpha)?));
        }
        println!();
    }
    Ok(())
}
