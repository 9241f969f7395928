//! A small scan through the library API, rendered as CSV and SVG.

use std::f64::consts::FRAC_PI_4;

use ghz_epr2::cli::{compute_row, render_csv, render_svg};
use ghz_epr2::epr2::DEFAULT_GRID_POINTS;
use ghz_epr2::GhzScenario;

fn main() -> ghz_epr2::Result<()> {
    let mut rows = Vec::new();
    for n in [2, 3] {
        for k in 0..=4 {
            let s = GhzScenario::new(n, FRAC_PI_4 * f64::from(k) / 4.0)?;
            let (row, _) = compute_row(&s, 2_000, 0, DEFAULT_GRID_POINTS, &mut std::io::stderr())?;
            rows.push(row);
        }
    }
    print!("{}", render_csv(&rows));
    let path = std::env::temp_dir().join("ghz-epr2-scan.svg");
    std::fs::write(&path, render_svg(&rows)).expect("writable temp dir");
    eprintln!("chart written to {}", path.display());
    Ok(())
}
