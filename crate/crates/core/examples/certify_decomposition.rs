//! Checks that `P_Q - w P_L` stays nonnegative on random settings, then
//! shows a nonlocal-part probability for the certified weight.

use ghz_epr2::epr2::{certify, certify_with_fallback, default_lower_bound, nonlocal_prob};
use ghz_epr2::{GhzScenario, MeasurementContext, OutcomePattern};

fn main() -> ghz_epr2::Result<()> {
    let scenario = GhzScenario::new(3, 0.35)?;
    let w = default_lower_bound(&scenario);

    let cert = certify(&scenario, w, 50_000, 0)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&cert).expect("serializable")
    );

    // Too large a weight: the fallback lowers it to what the samples support.
    let fallback = certify_with_fallback(&scenario, (w + 0.1).min(1.0), 50_000, 0)?;
    println!(
        "w={:.6} lowered={} violated={}",
        fallback.certificate.w, fallback.lowered, fallback.certificate.violated
    );

    let ctx = MeasurementContext::from_angles(&[0.3, 0.9, 1.4], &[0.0, 0.5, 2.0])?;
    let r = OutcomePattern::all_plus(3);
    println!(
        "P_NL(+,+,+) = {:.9}",
        nonlocal_prob(&scenario, w, &ctx, &r)?
    );
    Ok(())
}
