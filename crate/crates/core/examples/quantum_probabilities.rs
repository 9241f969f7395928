//! GHZ joint probabilities: closed form against the dense state-vector oracle.
//!
//!     cargo run --example quantum_probabilities

use std::f64::consts::PI;

use ghz_epr2::qcore::{ghz_state, joint_prob_dense, joint_prob_ghz};
use ghz_epr2::{GhzScenario, MeasurementContext, OutcomePattern};

fn main() -> ghz_epr2::Result<()> {
    let scenario = GhzScenario::new(3, PI / 12.0)?;
    let state = ghz_state(&scenario)?;
    let ctx = MeasurementContext::from_angles(&[0.4, 1.1, 2.3], &[0.2, 1.7, 4.0])?;

    println!("outcome      closed        dense");
    let mut total = 0.0;
    for r in OutcomePattern::all(scenario.n()) {
        let closed = joint_prob_ghz(&scenario, &ctx, &r);
        let dense = joint_prob_dense(&state, &ctx, &r)?;
        total += closed;
        let label: String = r
            .signs()
            .iter()
            .map(|&x| if x > 0 { '+' } else { '-' })
            .collect();
        println!("{label:<10} {closed:.10} {dense:.10}");
    }
    println!("sum = {total:.15}");
    Ok(())
}
