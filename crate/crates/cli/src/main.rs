use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};

use rrz_core::degree::{DegreeError, DegreeValue};
use rrz_core::divisor::{euler_at, ArakelovDivisor, DivisorError};
use rrz_core::figure::figure_data;
use rrz_core::h0::{
    self, dim_h0, generates, min_generating_set, tabulated_generating_set, H0Error, SearchOptions,
};
use rrz_core::h1::{self, certify_lambda, dim_h1, f_generators, inv_pow2};
use rrz_core::negabinary::{self, decode, encode, verify_bijection, NegabinaryWord};
use rrz_core::parse::{parse_place, parse_rational};
use rrz_core::verify::{self, Fault, SuiteReport, SuiteResult};
use rrz_core::RunConfig;

mod output;

use output::{emit, Format};

#[derive(Parser, Debug)]
#[command(
    name = "rrz",
    version,
    about = "Dimensions of H0 and H1 for Arakelov divisors on Spec Z over the absolute base"
)]
struct Cli {
    /// Precision cap in bits for odd-prime logarithm enclosures (at least 64 is used).
    #[arg(long, global = true, default_value_t = rrz_core::degree::DEFAULT_PRECISION_BITS)]
    precision: u32,
    /// Largest a for the exhaustive minimal-set search.
    #[arg(long, global = true, default_value_t = h0::DEFAULT_SEARCH_BUDGET)]
    budget: u64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Largest generator count for 2^k subset enumerations.
    #[arg(long, global = true, default_value_t = h1::DEFAULT_ENUMERATION_CAP)]
    enumeration_cap: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// dim H0 at a given deg2 (integer, p/q or finite decimal).
    DimH0 {
        #[arg(allow_hyphen_values = true)]
        deg2: String,
    },
    /// dim H1 at a given deg2.
    DimH1 {
        #[arg(allow_hyphen_values = true)]
        deg2: String,
    },
    /// Both sides of Riemann-Roch for a divisor.
    Euler {
        /// Finite place with multiplicity, as p:n. Repeatable.
        #[arg(long = "place", allow_hyphen_values = true)]
        places: Vec<String>,
        /// Archimedean coefficient in log2 units.
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        arch: String,
    },
    /// Exhaustive minimal generating set for [-a, a].
    MinGen {
        a: u64,
        /// List every minimal set.
        #[arg(long)]
        all: bool,
    },
    /// Check the tabulated sets, minimality and the construction.
    VerifyLemma33 {
        /// Check the construction on 16..=MAX.
        #[arg(long, default_value_t = 4096)]
        max: u64,
    },
    /// Base -2 words.
    Negabinary {
        #[command(subcommand)]
        op: NegabinaryOp,
    },
    /// Sample dim H0 - dim H1 - 1 against deg2.
    Figure {
        #[arg(allow_hyphen_values = true)]
        lo: String,
        #[arg(allow_hyphen_values = true)]
        hi: String,
        /// Samples per unit of deg2.
        #[arg(long, default_value_t = 8)]
        samples: u32,
        /// Write to this file; a `.svg` extension selects SVG output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Certify the circle families F(m).
    VerifyH1 {
        #[arg(long, default_value_t = 12)]
        max_m: u32,
    },
    /// Run every verification suite.
    VerifyAll {
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Subcommand, Debug)]
enum NegabinaryOp {
    /// Digits of q at the given width, lowest first.
    Encode {
        #[arg(allow_hyphen_values = true)]
        q: i128,
        #[arg(long)]
        width: u32,
    },
    /// Value of a digit string, lowest digit first ("1,0,1" or "101").
    Decode { digits: String },
    /// Exhaustive bijection check at width n.
    Verify { n: u32 },
}

enum Failure {
    /// Suite or certificate failed.
    Verification(String),
    Usage(String),
    Precision(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) | Failure::Runtime(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Precision(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m)
            | Failure::Usage(m)
            | Failure::Precision(m)
            | Failure::Runtime(m) => m,
        }
    }
}

impl From<DegreeError> for Failure {
    fn from(e: DegreeError) -> Self {
        match e {
            DegreeError::Precision { .. } => {
                Failure::Precision(format!("{e}; raise --precision to decide the comparison"))
            }
            DegreeError::NotPrime(_) => Failure::Usage(e.to_string()),
            DegreeError::TooLarge { .. } => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<DivisorError> for Failure {
    fn from(e: DivisorError) -> Self {
        match e {
            DivisorError::Degree(d) => d.into(),
            DivisorError::NotPrime(_) | DivisorError::BadScan(_) => Failure::Usage(e.to_string()),
            DivisorError::FormulaViolation { .. } => Failure::Verification(e.to_string()),
            DivisorError::Range(_) => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<H0Error> for Failure {
    fn from(e: H0Error) -> Self {
        match e {
            H0Error::BudgetExceeded { .. } | H0Error::OutOfRange { .. } | H0Error::ZeroTarget => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

fn usage(e: impl ToString) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> Failure {
    Failure::Runtime(e.to_string())
}

struct Ctx {
    config: RunConfig,
    format: Format,
}

impl Ctx {
    fn search(&self, all: bool) -> SearchOptions {
        SearchOptions {
            parallel_width: self.config.workers,
            report_all_minima: all,
            budget_a: self.config.search_budget_a,
            ..SearchOptions::default()
        }
    }

    fn degree(&self, input: &str) -> Result<DegreeValue, Failure> {
        Ok(DegreeValue::rational(parse_rational(input).map_err(usage)?)
            .with_precision(self.config.precision_bits))
    }
}

fn braces(set: &[i64]) -> String {
    let items: Vec<String> = set.iter().map(i64::to_string).collect();
    format!("{{{}}}", items.join(", "))
}

fn cmd_dim_h0(ctx: &Ctx, input: &str) -> Result<(), Failure> {
    let deg = ctx.degree(input)?;
    let dim = dim_h0(&deg)?;
    let a = h0::h0_interval_bound(&deg)?;
    let mut report = json!({
        "command": "dim-h0",
        "deg2": deg.to_string(),
        "dimension": dim,
        "a": a.to_string(),
        "n": a.bits(),
        "generators": Value::Null,
        "certificate": Value::Null,
    });
    let mut text = vec![
        format!("dim H0 = {dim}"),
        format!("deg2 = {deg}"),
        format!("a = floor(2^deg2) = {a}"),
        format!("n = {}", a.bits()),
    ];
    if let Some(a) = a
        .to_u64()
        .filter(|a| (1..=h0::MAX_CONSTRUCTION_A).contains(a))
    {
        let set = tabulated_generating_set(a)?;
        report["generators"] = json!(set);
        text.push(format!("generators = {}", braces(&set)));
        if a <= h0::MAX_CERTIFICATE_A {
            let cert = generates(&set, a)?.certificate().ok_or_else(|| {
                Failure::Verification(format!("{} does not generate [-{a}, {a}]", braces(&set)))
            })?;
            let verified = cert.verify();
            report["certificate"] = json!({ "targets": 2 * a + 1, "verified": verified });
            text.push(format!(
                "certificate: {} targets realized, verified = {verified}",
                2 * a + 1
            ));
            if !verified {
                return Err(Failure::Verification("certificate failed to verify".into()));
            }
        } else {
            text.push("certificate: skipped (interval too large)".into());
        }
    } else if a.is_zero() {
        report["generators"] = json!([]);
        text.push("generators = {} (H0 = {0})".into());
    }
    emit(ctx.format, &report, &text.join("\n"))
}

fn cmd_dim_h1(ctx: &Ctx, input: &str) -> Result<(), Failure> {
    let deg = ctx.degree(input)?;
    let dim = dim_h1(&deg)?;
    let mut report = json!({
        "command": "dim-h1",
        "deg2": deg.to_string(),
        "dimension": dim,
        "generators": Value::Null,
        "certified": Value::Null,
    });
    let mut text = vec![format!("dim H1 = {dim}"), format!("deg2 = {deg}")];
    if dim > 0 && dim as usize <= ctx.config.enumeration_cap {
        let family: Vec<String> = f_generators(dim as u32)
            .iter()
            .map(ToString::to_string)
            .collect();
        text.push(format!("generators = {{{}}} (mod 1)", family.join(", ")));
        report["generators"] = json!(family);
        // λ = 2^deg2 is exact when deg2 is an integer.
        if let Some(x) = deg.as_rational().filter(|x| x.is_integer()) {
            let e = (-x.to_integer())
                .to_u32()
                .ok_or_else(|| runtime("radius out of range"))?;
            let cert = certify_lambda(&inv_pow2(e), ctx.config.enumeration_cap).map_err(runtime)?;
            text.push(format!(
                "radius 2^{deg}: covering radius {}, generating = {}",
                cert.covering_radius, cert.generating
            ));
            report["certified"] = json!(cert.generating);
            if !cert.generating {
                return Err(Failure::Verification("F(m) does not generate".into()));
            }
        }
    }
    emit(ctx.format, &report, &text.join("\n"))
}

fn cmd_euler(ctx: &Ctx, places: &[String], arch: &str) -> Result<(), Failure> {
    let places = places
        .iter()
        .map(|p| parse_place(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let u = parse_rational(arch).map_err(usage)?;
    let d = ArakelovDivisor::new(places, u)?;
    let deg = d.deg2().with_precision(ctx.config.precision_bits);
    let e = euler_at(&deg)?;
    let report = json!({
        "command": "euler",
        "divisor": d.to_string(),
        "deg2": e.deg2,
        "deg2_approx": deg.approx_f64(),
        "h0": e.h0,
        "h1": e.h1,
        "chi": e.chi,
        "rhs": e.rhs,
    });
    let text = format!(
        "D = {d}\ndeg2 D = {} (≈ {:.6})\ndim H0 = {}\ndim H1 = {}\nchi = {}\nceil'(deg2 D) + 1 = {}",
        e.deg2,
        deg.approx_f64(),
        e.h0,
        e.h1,
        e.chi,
        e.rhs
    );
    emit(ctx.format, &report, &text)
}

fn cmd_min_gen(ctx: &Ctx, a: u64, all: bool) -> Result<(), Failure> {
    let found = min_generating_set(a, &ctx.search(all))?;
    let verified = found.certificate.verify();
    let report = json!({
        "command": "min-gen",
        "a": a,
        "size": found.size,
        "lower_bound": found.lower_bound,
        "set": found.set,
        "all_minima": found.all_minima,
        "candidates_examined": found.candidates_examined,
        "certificate_verified": verified,
    });
    let mut text = vec![
        format!("a = {a}"),
        format!(
            "minimum size = {} (counting bound {})",
            found.size, found.lower_bound
        ),
        format!("lexicographically first = {}", braces(&found.set)),
    ];
    if let Some(sets) = &found.all_minima {
        text.push(format!("{} minimal sets:", sets.len()));
        text.extend(sets.iter().map(|s| format!("  {}", braces(s))));
    }
    text.push(format!("certificate verified = {verified}"));
    emit(ctx.format, &report, &text.join("\n"))?;
    if verified {
        Ok(())
    } else {
        Err(Failure::Verification("certificate failed to verify".into()))
    }
}

fn suite_text(s: &SuiteResult) -> String {
    let mut out = format!(
        "{} {}: {} checks",
        if s.passed { "PASS" } else { "FAIL" },
        s.name,
        s.checks
    );
    for skip in &s.skipped {
        out.push_str(&format!("\n  skipped: {skip}"));
    }
    if let Some(f) = &s.first_failure {
        out.push_str(&format!("\n  first failure: {f}"));
    }
    out
}

fn finish_suites(ctx: &Ctx, command: &str, report: SuiteReport) -> Result<(), Failure> {
    let mut value = serde_json::to_value(&report).map_err(runtime)?;
    value["command"] = json!(command);
    let text: Vec<String> = report.suites.iter().map(suite_text).collect();
    let summary = format!(
        "{}\n{} of {} suites passed",
        text.join("\n"),
        report.suites.iter().filter(|s| s.passed).count(),
        report.suites.len()
    );
    emit(ctx.format, &value, &summary)?;
    match report.first_failure() {
        None if report.passed => Ok(()),
        Some((suite, failure)) => Err(Failure::Verification(format!("{suite}: {failure}"))),
        None => Err(Failure::Verification("verification failed".into())),
    }
}

fn single(s: SuiteResult) -> SuiteReport {
    SuiteReport {
        passed: s.passed,
        suites: vec![s],
    }
}

fn cmd_negabinary(ctx: &Ctx, op: &NegabinaryOp) -> Result<(), Failure> {
    match op {
        NegabinaryOp::Encode { q, width } => {
            let word = encode(*q, *width).map_err(usage)?;
            let report = json!({
                "command": "negabinary-encode",
                "q": q.to_string(),
                "width": width,
                "digits": word.digits(),
            });
            emit(ctx.format, &report, &word.to_string())
        }
        NegabinaryOp::Decode { digits } => {
            let parsed: Vec<u8> = if digits.contains(',') {
                digits
                    .trim_matches(|c| c == '(' || c == ')')
                    .split(',')
                    .map(|d| d.trim().parse::<u8>())
                    .collect::<Result<_, _>>()
                    .map_err(usage)?
            } else {
                digits
                    .chars()
                    .map(|c| {
                        c.to_digit(10)
                            .map(|d| d as u8)
                            .ok_or_else(|| usage(format!("bad digit {c:?}")))
                    })
                    .collect::<Result<_, _>>()?
            };
            let word = NegabinaryWord::from_digits(parsed).map_err(usage)?;
            let value = decode(&word);
            let report = json!({
                "command": "negabinary-decode",
                "digits": word.digits(),
                "value": value.to_string(),
            });
            emit(ctx.format, &report, &value.to_string())
        }
        NegabinaryOp::Verify { n } => {
            let cap = negabinary::DEFAULT_VERIFY_CAP.max(ctx.config.enumeration_cap as u32);
            let rep = verify_bijection(*n, cap).map_err(usage)?;
            let mut value = serde_json::to_value(&rep).map_err(runtime)?;
            value["command"] = json!("negabinary-verify");
            let text = format!(
                "Δ({n}) = [{}, {}]\n{} words, {} distinct values, {} outside\nbijective = {}",
                rep.interval.lo,
                rep.interval.hi,
                rep.words,
                rep.distinct_values,
                rep.out_of_range,
                rep.passed
            );
            emit(ctx.format, &value, &text)?;
            if rep.passed {
                Ok(())
            } else {
                Err(Failure::Verification(format!(
                    "width {n} is not a bijection"
                )))
            }
        }
    }
}

fn cmd_figure(
    ctx: &Ctx,
    lo: &str,
    hi: &str,
    samples: u32,
    output: Option<&PathBuf>,
) -> Result<(), Failure> {
    let lo: BigRational = parse_rational(lo).map_err(usage)?;
    let hi: BigRational = parse_rational(hi).map_err(usage)?;
    let series = figure_data(&lo, &hi, samples)?;
    let svg = output.is_some_and(|p| p.extension().is_some_and(|e| e == "svg"));
    let body = if svg {
        series.to_svg()
    } else {
        match ctx.format {
            Format::Json => {
                let mut v = series.to_json();
                v["command"] = json!("figure");
                serde_json::to_string_pretty(&v).map_err(runtime)? + "\n"
            }
            Format::Csv | Format::Text => series.to_csv(),
        }
    };
    match output {
        Some(path) => {
            std::fs::write(path, body)
                .map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))?;
            eprintln!(
                "wrote {} ({} samples, {} jumps)",
                path.display(),
                series.samples.len(),
                series.jump_points.len()
            );
        }
        None => print!("{body}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if cli.precision == 0 || cli.budget == 0 || cli.enumeration_cap == 0 {
        return Err(usage(
            "--precision, --budget and --enumeration-cap must be positive",
        ));
    }
    let workers = match cli.workers {
        Some(0) => return Err(usage("--workers must be positive")),
        Some(w) => w,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // Also the pool used by the Riemann-Roch scans.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    let ctx = Ctx {
        config: RunConfig {
            precision_bits: cli.precision,
            search_budget_a: cli.budget,
            enumeration_cap: cli.enumeration_cap,
            workers,
        },
        format: cli.format,
    };
    match &cli.command {
        Command::DimH0 { deg2 } => cmd_dim_h0(&ctx, deg2),
        Command::DimH1 { deg2 } => cmd_dim_h1(&ctx, deg2),
        Command::Euler { places, arch } => cmd_euler(&ctx, places, arch),
        Command::MinGen { a, all } => cmd_min_gen(&ctx, *a, *all),
        Command::VerifyLemma33 { max } => finish_suites(
            &ctx,
            "verify-lemma33",
            single(verify::h0_suite(&ctx.config, *max, Fault::None)),
        ),
        Command::Negabinary { op } => cmd_negabinary(&ctx, op),
        Command::Figure {
            lo,
            hi,
            samples,
            output,
        } => cmd_figure(&ctx, lo, hi, *samples, output.as_ref()),
        Command::VerifyH1 { max_m } => {
            if *max_m as usize > ctx.config.enumeration_cap {
                return Err(usage(format!(
                    "--max-m {max_m} exceeds the enumeration cap"
                )));
            }
            finish_suites(
                &ctx,
                "verify-h1",
                single(verify::h1_suite(*max_m, ctx.config.enumeration_cap)),
            )
        }
        Command::VerifyAll { inject_fault } => {
            let fault = if *inject_fault {
                Fault::FlipGolden
            } else {
                Fault::None
            };
            finish_suites(&ctx, "verify-all", verify::run_all(&ctx.config, fault))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
