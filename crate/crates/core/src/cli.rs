//! `ghz-epr2` command-line front end.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 usage error,
//! 3 certification failure.

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{chen_upper, mabk_implied, mabk_quantum_max, MabkImplied, MABK_MAX_PARTIES};
use crate::epr2::{
    certify, certify_with_fallback, local_prob, lower_bound, DecompositionCertificate,
    FallbackOutcome, LocalModel, DEFAULT_REFINE_TOL,
};
use crate::error::Error;
use crate::qcore::{
    diagonal_prob, ghz_state, joint_prob_dense, joint_prob_ghz, joint_prob_ghz_signed, GhzScenario,
    MeasurementContext, OutcomePattern, CROSS_TERM_SIGN, DENSE_MAX_PARTIES,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ghz-epr2",
    version,
    about = "Local content bounds for generalized GHZ states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bounds and certificate for a single (n, alpha)
    Point(PointArgs),
    /// Sweep alpha over [0, pi/4] for several party counts
    Scan(ScanArgs),
    /// Check P_Q - w P_L >= 0 on sampled settings
    Certify(CertifyArgs),
    /// Run the built-in consistency suites
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct AlphaArg {
    /// State parameter in radians
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "alpha_deg",
        conflicts_with = "alpha_deg"
    )]
    alpha: Option<f64>,
    /// State parameter in degrees
    #[arg(long, allow_hyphen_values = true)]
    alpha_deg: Option<f64>,
}

impl AlphaArg {
    fn radians(&self) -> f64 {
        match (self.alpha, self.alpha_deg) {
            (Some(a), _) => a,
            (None, Some(d)) => d.to_radians(),
            (None, None) => unreachable!("clap enforces one of --alpha/--alpha-deg"),
        }
    }
}

#[derive(Debug, Args)]
struct Common {
    /// Random settings checked by the certifier
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid points for the lower-bound search
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1000..))]
    grid_points: u64,
    /// Write output to FILE instead of standard output
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    alpha: AlphaArg,
    /// Restarts for the MABK maximizer
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Comma-separated party counts
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 51, value_parser = clap::value_parser!(u64).range(2..))]
    alpha_steps: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    alpha: AlphaArg,
    /// Local weight to certify
    #[arg(long, allow_hyphen_values = true)]
    w: f64,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    /// Reduced sample counts
    #[arg(long)]
    quick: bool,
    /// Negative control: flip the closed form's cross-term sign
    #[arg(long, hide = true)]
    flip_cross_sign: bool,
}

/// One line of a scan: bounds for a single `(n, α)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub n: usize,
    pub alpha: f64,
    pub w_lower: f64,
    pub w_upper_chen: Option<f64>,
    pub mabk_implied: MabkImplied,
    pub certified: bool,
}

/// Computes a scan row. The lower bound is certified with `samples` random
/// settings; if the diagonal minimum fails, the weight is lowered to the
/// smallest sampled ratio and a warning goes to `warn`.
pub fn compute_row(
    scenario: &GhzScenario,
    samples: u64,
    seed: u64,
    grid_points: usize,
    warn: &mut dyn Write,
) -> crate::Result<(ScanRow, FallbackOutcome)> {
    let w = lower_bound(scenario, grid_points, DEFAULT_REFINE_TOL);
    let outcome = certify_with_fallback(scenario, w.clamp(0.0, 1.0), samples, seed)?;
    if outcome.lowered {
        let _ = writeln!(
            warn,
            "warning: n={} alpha={} diagonal bound {} failed certification; lowered to {}",
            scenario.n(),
            scenario.alpha(),
            w,
            outcome.certificate.w
        );
    }
    let w_upper_chen = if scenario.n() >= 3 {
        Some(chen_upper(scenario)?)
    } else {
        None
    };
    let row = ScanRow {
        n: scenario.n(),
        alpha: scenario.alpha(),
        w_lower: outcome.certificate.w,
        w_upper_chen,
        mabk_implied: mabk_implied(scenario),
        certified: !outcome.certificate.violated,
    };
    Ok((row, outcome))
}

/// `x` with 9 significant digits in positional notation.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() {
            "0.00000000".into()
        } else {
            x.to_string()
        };
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (8 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding may carry into a new leading digit, e.g. 9.999999999 -> 10.00000000
    let digits = s
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count();
    if digits > 9 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn unit(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

pub const CSV_HEADER: &str = "n,alpha,w_lower,w_upper_chen,mabk_implied,certified";

pub fn render_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        let upper = r
            .w_upper_chen
            .map(|u| format_sig9(unit(u)))
            .unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n,
            format_sig9(r.alpha),
            format_sig9(unit(r.w_lower)),
            upper,
            r.mabk_implied.as_str(),
            r.certified
        );
    }
    s
}

fn clamped(row: &ScanRow) -> ScanRow {
    ScanRow {
        w_lower: unit(row.w_lower),
        w_upper_chen: row.w_upper_chen.map(unit),
        ..row.clone()
    }
}

pub fn render_json(rows: &[ScanRow]) -> String {
    let rows: Vec<ScanRow> = rows.iter().map(clamped).collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}

/// Static line chart of `w_lower` against `α`, one polyline per party count.
pub fn render_svg(rows: &[ScanRow]) -> String {
    const W: f64 = 800.0;
    const H: f64 = 600.0;
    const LEFT: f64 = 80.0;
    const RIGHT: f64 = 760.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 540.0;
    const COLORS: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];
    let px = |alpha: f64| LEFT + (RIGHT - LEFT) * alpha / FRAC_PI_4;
    let py = |w: f64| BOTTOM - (BOTTOM - TOP) * unit(w);

    let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
    ns.dedup();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{RIGHT}" y2="{BOTTOM}" stroke="black"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{LEFT}" y1="{BOTTOM}" x2="{LEFT}" y2="{TOP}" stroke="black"/>"#
    );
    for k in 0..=4 {
        let v = f64::from(k) / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="end">{v:.2}</text>"#,
            LEFT - 8.0,
            py(v) + 5.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" font-size="14" text-anchor="middle">{:.4}</text>"#,
            px(v * FRAC_PI_4),
            BOTTOM + 22.0,
            v * FRAC_PI_4
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.1}" y="{:.1}" font-size="16" text-anchor="middle">alpha (rad)</text>"#,
        0.5 * (LEFT + RIGHT),
        BOTTOM + 50.0
    );
    let _ = writeln!(
        s,
        r#"<text x="20" y="{:.1}" font-size="16" text-anchor="middle" transform="rotate(-90 20 {:.1})">w_lower</text>"#,
        0.5 * (TOP + BOTTOM),
        0.5 * (TOP + BOTTOM)
    );
    for (i, n) in ns.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = rows
            .iter()
            .filter(|r| r.n == *n)
            .map(|r| format!("{:.2},{:.2}", px(r.alpha), py(r.w_lower)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
            points.join(" ")
        );
        let ly = TOP + 20.0 + 22.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{ly:.1}" font-size="16" fill="{color}">N={n}</text>"#,
            RIGHT - 80.0
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Parses `args` (including the program name) and runs the command,
/// writing results to `out` (or `--out FILE`) and diagnostics to `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            let _ = writeln!(err, "{line}");
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Point(a) => cmd_point(a, out, err),
        Command::Scan(a) => cmd_scan(a, out, err),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Selftest(a) => Ok(cmd_selftest(a, out)),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Domain(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

enum CliError {
    Domain(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Domain(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn emit(target: &Option<PathBuf>, out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    match target {
        Some(path) => File::create(path)?.write_all(text.as_bytes())?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

#[derive(Serialize)]
struct PointReport {
    #[serde(flatten)]
    row: ScanRow,
    lowered: bool,
    certificate: DecompositionCertificate,
    mabk_quantum_max: Option<f64>,
}

fn cmd_point(a: PointArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let scenario = GhzScenario::new(a.n, a.alpha.radians())?;
    let (row, outcome) = compute_row(
        &scenario,
        a.common.samples,
        a.common.seed,
        a.common.grid_points as usize,
        err,
    )?;
    let mabk_quantum_max = if scenario.n() <= MABK_MAX_PARTIES {
        Some(mabk_quantum_max(&scenario, a.restarts, a.common.seed)?.quantum_max)
    } else {
        None
    };
    let report = PointReport {
        lowered: outcome.lowered,
        row: clamped(&row),
        certificate: outcome.certificate,
        mabk_quantum_max,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    emit(&a.common.out, out, &text)?;
    Ok(if row.certified {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    })
}

fn cmd_scan(a: ScanArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let steps = a.alpha_steps as usize;
    let mut scenarios = Vec::with_capacity(a.n.len() * steps);
    for &n in &a.n {
        for k in 0..steps {
            let alpha = if k + 1 == steps {
                FRAC_PI_4
            } else {
                FRAC_PI_4 * k as f64 / (steps - 1) as f64
            };
            scenarios.push(GhzScenario::new(n, alpha)?);
        }
    }
    let mut rows = Vec::with_capacity(scenarios.len());
    for s in &scenarios {
        let (row, _) = compute_row(
            s,
            a.common.samples,
            a.common.seed,
            a.common.grid_points as usize,
            err,
        )?;
        rows.push(row);
    }
    let text = match a.format {
        Format::Csv => render_csv(&rows),
        Format::Json => render_json(&rows),
        Format::Svg => render_svg(&rows),
    };
    emit(&a.common.out, out, &text)?;
    Ok(if rows.iter().all(|r| r.certified) {
        EXIT_OK
    } else {
        EXIT_UNCERTIFIED
    })
}

fn cmd_certify(a: CertifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let scenario = GhzScenario::new(a.n, a.alpha.radians())?;
    let cert = certify(&scenario, a.w, a.samples, a.seed)?;
    let mut text = serde_json::to_string_pretty(&cert).expect("certificate serializes");
    text.push('\n');
    emit(&a.out, out, &text)?;
    Ok(if cert.violated {
        EXIT_UNCERTIFIED
    } else {
        EXIT_OK
    })
}

/// Result of one self-test suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn random_context(rng: &mut ChaCha8Rng, n: usize) -> MeasurementContext {
    let thetas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=PI)).collect();
    let phis: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    MeasurementContext::from_angles(&thetas, &phis).expect("angles in range")
}

fn random_scenario(rng: &mut ChaCha8Rng, max_n: usize) -> GhzScenario {
    GhzScenario::new(rng.gen_range(2..=max_n), rng.gen_range(0.0..=FRAC_PI_4))
        .expect("valid scenario")
}

/// Closed form against the dense engine on random configurations.
pub fn suite_oracle_equivalence(cases: usize, cross_sign: f64) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let s = random_scenario(&mut rng, 6.min(DENSE_MAX_PARTIES));
        let ctx = random_context(&mut rng, s.n());
        let r = OutcomePattern::from_index(s.n(), rng.gen_range(0..s.outcome_count()));
        let dense = joint_prob_dense(&ghz_state(&s).expect("n <= 6"), &ctx, &r).expect("dims");
        let closed = joint_prob_ghz_signed(&s, &ctx, &r, cross_sign);
        worst = worst.max((dense - closed).abs());
    }
    SuiteResult {
        name: "oracle-equivalence",
        passed: worst <= 1e-10,
        detail: format!("{cases} cases, max |closed - dense| = {worst:.3e}"),
    }
}

/// Quantum and local distributions sum to one over outcome patterns.
pub fn suite_normalization(cases: usize) -> SuiteResult {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0_a11);
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let s = random_scenario(&mut rng, 6);
        let ctx = random_context(&mut rng, s.n());
        let thetas: Vec<f64> = ctx.directions().iter().map(|d| d.theta()).collect();
        let state = ghz_state(&s).expect("n <= 6");
        let model = LocalModel::new(s);
        let (mut dense, mut closed, mut local) = (0.0, 0.0, 0.0);
        for r in OutcomePattern::all(s.n()) {
            dense += joint_prob_dense(&state, &ctx, &r).expect("dims");
            closed += joint_prob_ghz(&s, &ctx, &r);
            local += local_prob(&model, &thetas, &r);
        }
        worst = worst
            .max((dense - 1.0).abs())
            .max((closed - 1.0).abs())
            .max((local - 1.0).abs());
    }
    SuiteResult {
        name: "normalization",
        passed: worst <= 1e-12,
        detail: format!("{cases} contexts, max |sum - 1| = {worst:.3e}"),
    }
}

/// `-cos θ₀ cos 2α = 1 - sin 2α` for two parties.
pub fn suite_scarani_identity(points: usize) -> SuiteResult {
    let mut worst: f64 = 0.0;
    for k in 0..=points {
        let alpha = FRAC_PI_4 * k as f64 / points as f64;
        let s = GhzScenario::new(2, alpha).expect("valid");
        let lhs = -LocalModel::new(s).cos_theta0() * (2.0 * alpha).cos();
        worst = worst.max((lhs - (1.0 - (2.0 * alpha).sin())).abs());
    }
    SuiteResult {
        name: "scarani-identity",
        passed: worst <= 1e-12,
        detail: format!("{} alpha values, max deviation = {worst:.3e}", points + 1),
    }
}

/// Three-party diagonal against `[cos(α - 3θ/2) + 3 cos(α + θ/2)]² / 16`.
pub fn suite_three_party_diagonal(points: usize) -> SuiteResult {
    let mut worst: f64 = 0.0;
    for i in 0..=10 {
        let alpha = FRAC_PI_4 * f64::from(i) / 10.0;
        let s = GhzScenario::new(3, alpha).expect("valid");
        for k in 0..=points {
            let theta = PI * k as f64 / points as f64;
            let v = (alpha - 1.5 * theta).cos() + 3.0 * (alpha + 0.5 * theta).cos();
            worst = worst.max((diagonal_prob(&s, theta) - v * v / 16.0).abs());
        }
    }
    SuiteResult {
        name: "three-party-diagonal",
        passed: worst <= 1e-12,
        detail: format!("11 x {} grid, max deviation = {worst:.3e}", points + 1),
    }
}

/// All self-test suites. `flip_cross_sign` runs the oracle suite against a
/// deliberately wrong closed form.
pub fn selftest_suites(quick: bool, flip_cross_sign: bool) -> Vec<SuiteResult> {
    let scale = if quick { 5 } else { 1 };
    let sign = if flip_cross_sign {
        -CROSS_TERM_SIGN
    } else {
        CROSS_TERM_SIGN
    };
    vec![
        suite_oracle_equivalence(1000 / scale, sign),
        suite_normalization(1000 / scale),
        suite_scarani_identity(200),
        suite_three_party_diagonal(1000 / scale),
    ]
}

fn cmd_selftest(a: SelftestArgs, out: &mut dyn Write) -> i32 {
    let suites = selftest_suites(a.quick, a.flip_cross_sign);
    for s in &suites {
        let _ = writeln!(
            out,
            "{} {}: {}",
            if s.passed { "PASS" } else { "FAIL" },
            s.name,
            s.detail
        );
    }
    if suites.iter().all(|s| s.passed) {
        EXIT_OK
    } else {
        EXIT_SELFTEST_FAILED
    }
}
