//! The local model, its switching angle θ₀ and the ratio `P_Q / P_L`
//! along the diagonal.
//!
//!     cargo run --example local_model -- 4 0.3

use ghz_epr2::epr2::{ratio_f, ratio_limit_at_theta0, LocalModel};
use ghz_epr2::qcore::diagonal_prob;
use ghz_epr2::GhzScenario;

fn main() -> ghz_epr2::Result<()> {
    let mut args = std::env::args().skip(1);
    let n = args.next().and_then(|s| s.parse().ok()).unwrap_or(3);
    let alpha = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.3);
    let scenario = GhzScenario::new(n, alpha)?;
    let model = LocalModel::new(scenario);
    println!(
        "n={n} alpha={alpha} theta0={:.9} cos theta0={:.9}",
        model.theta0(),
        model.cos_theta0()
    );

    println!("   theta        P_Q          P_L        ratio");
    for k in 0..=12 {
        let theta = model.theta0() * f64::from(k) / 12.0;
        println!(
            "{theta:8.5} {:12.9} {:12.9} {:12.9}",
            diagonal_prob(&scenario, theta),
            model.diagonal_local_prob(theta),
            ratio_f(&scenario, theta)
        );
    }
    println!("limit at theta0: {:.9}", ratio_limit_at_theta0(&scenario));
    Ok(())
}
