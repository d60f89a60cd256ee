//! `qale`: file-driven front end for the exact QALE cohomology toolkit.
//!
//! Exit codes: 0 success, 2 hypothesis failure, 64 usage or input error,
//! 70 internal inconsistency.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qale_core::assembly::{cone_l2, ConeRule, ConeVariant, WeightSpec};
use qale_core::exact::Rational;
use qale_core::groupfile::parse_group_file;
use qale_core::homology::run_ladder_suite;
use qale_core::mckay::CohomTable;
use qale_core::oracle::{run_cm_suite, run_hardy_suite};
use qale_core::pipeline::{
    analyze, analyze_markdown, analyze_report, cohomology_markdown, cohomology_report, to_json,
    Model,
};
use qale_core::QaleError;

const EXIT_OK: u8 = 0;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_USAGE: u8 = 64;
const EXIT_INTERNAL: u8 = 70;

#[derive(Parser)]
#[command(
    name = "qale",
    about = "Exact singularity data of C^n/G and L2 cohomology of QALE resolutions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Markdown,
}

#[derive(Args)]
struct FileArgs {
    /// group description file (JSON)
    file: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Group order, conjugacy classes, strata and hypothesis validation
    Analyze(FileArgs),
    /// End, boundary and crepant L2 cohomology tables
    Cohomology {
        #[command(flatten)]
        file: FileArgs,
        /// su3 | sp2 | ends | auto (su3 when n=3, sp2 when n=4 symplectic)
        #[arg(long, default_value = "auto")]
        model: String,
    },
    /// Run only the validation findings; exit 2 when a hypothesis fails
    Validate { file: PathBuf },
    /// Weighted L2 cohomology of a cone by the lexicographic decision table
    Cone {
        #[arg(long)]
        k: usize,
        /// real dimension of the cone
        #[arg(long)]
        d: usize,
        /// radial weight exponent (rational, e.g. 3/2)
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        a: String,
        /// logarithmic weight exponent (rational)
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        b: String,
        /// use the relative (to the cross-section) cohomology table
        #[arg(long)]
        relative: bool,
        /// betti numbers of the link as deg:dim pairs, e.g. --betti 0:1,3:2
        #[arg(long, value_delimiter = ',')]
        betti: Vec<String>,
    },
    /// Randomized ladder-lemma, Hardy and cone-operator suites
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code_for(err: &QaleError) -> u8 {
    match err {
        QaleError::ParseError { .. }
        | QaleError::Io(_)
        | QaleError::DimensionMismatch(_)
        | QaleError::OrderTooLarge(_)
        | QaleError::MatrixTooLarge { .. } => EXIT_USAGE,
        QaleError::InternalInconsistency(_)
        | QaleError::DivisionByZero { .. }
        | QaleError::NotAComplex { .. } => EXIT_INTERNAL,
        _ => EXIT_HYPOTHESIS,
    }
}

fn max_order() -> usize {
    std::env::var("QALE_MAX_ORDER")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(qale_core::group::DEFAULT_MAX_ORDER)
}

fn parse_rational(text: &str) -> Result<Rational, String> {
    let bad = || format!("'{text}' is not a rational number");
    match text.split_once('/') {
        None => text
            .trim()
            .parse::<i64>()
            .map(|n| Rational::from_integer(n.into()))
            .map_err(|_| bad()),
        Some((n, d)) => {
            let num: i64 = n.trim().parse().map_err(|_| bad())?;
            let den: i64 = d.trim().parse().map_err(|_| bad())?;
            if den <= 0 {
                return Err(format!("'{text}' must have a positive denominator"));
            }
            Ok(Rational::new(num.into(), den.into()))
        }
    }
}

fn run() -> Result<u8, (u8, String)> {
    let cli = Cli::try_parse().map_err(|e| {
        let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        (code, e.to_string())
    })?;
    match cli.command {
        Command::Analyze(args) => {
            let gf = parse_group_file(&args.file).map_err(as_cli_err)?;
            let analysis = analyze(gf, max_order()).map_err(as_cli_err)?;
            let report = analyze_report(&analysis);
            match args.format {
                Format::Json => println!("{}", to_json(&report)),
                Format::Markdown => print!("{}", analyze_markdown(&report)),
            }
            if analysis.hypotheses_ok() {
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_HYPOTHESIS)
            }
        }
        Command::Cohomology { file, model } => {
            let model = Model::from_str(&model).map_err(|e| (EXIT_USAGE, e))?;
            let gf = parse_group_file(&file.file).map_err(as_cli_err)?;
            let analysis = analyze(gf, max_order()).map_err(as_cli_err)?;
            let report = cohomology_report(&analysis, model).map_err(as_cli_err)?;
            match file.format {
                Format::Json => println!("{}", to_json(&report)),
                Format::Markdown => print!("{}", cohomology_markdown(&report)),
            }
            Ok(EXIT_OK)
        }
        Command::Validate { file } => {
            let gf = parse_group_file(&file).map_err(as_cli_err)?;
            let analysis = analyze(gf, max_order()).map_err(as_cli_err)?;
            for f in &analysis.findings {
                println!(
                    "{}: {} ({})",
                    f.check,
                    if f.ok { "OK" } else { "FAIL" },
                    f.detail
                );
            }
            if analysis.hypotheses_ok() {
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_HYPOTHESIS)
            }
        }
        Command::Cone {
            k,
            d,
            a,
            b,
            relative,
            betti,
        } => {
            if d == 0 {
                return Err((EXIT_USAGE, "the cone dimension d must be positive".into()));
            }
            let a = parse_rational(&a).map_err(|e| (EXIT_USAGE, e))?;
            let b = parse_rational(&b).map_err(|e| (EXIT_USAGE, e))?;
            let mut table = CohomTable::new("H^*(V)", d - 1);
            for spec in &betti {
                let (deg, dim) = spec
                    .split_once(':')
                    .ok_or((EXIT_USAGE, format!("betti entry '{spec}' is not deg:dim")))?;
                let deg: usize = deg
                    .trim()
                    .parse()
                    .map_err(|_| (EXIT_USAGE, format!("bad degree in '{spec}'")))?;
                let dim: u64 = dim
                    .trim()
                    .parse()
                    .map_err(|_| (EXIT_USAGE, format!("bad dimension in '{spec}'")))?;
                if deg >= d {
                    return Err((
                        EXIT_USAGE,
                        format!("link degree {deg} must be below the cone dimension {d}"),
                    ));
                }
                table.set(deg, dim);
            }
            let variant = if relative {
                ConeVariant::Relative
            } else {
                ConeVariant::Absolute
            };
            let decision = cone_l2(k, d, &WeightSpec::new(a, b), &table, variant);
            let rule = match decision.rule {
                ConeRule::LexBelow => "lex-below",
                ConeRule::LexAbove => "lex-above",
                ConeRule::EdgeProof => "edge-proof",
                ConeRule::EdgeDual => "edge-dual",
            };
            let source = match (variant, decision.rule) {
                (ConeVariant::Absolute, ConeRule::LexAbove) => format!(" = b{k}(V)"),
                (ConeVariant::Relative, ConeRule::LexBelow) if k >= 1 => {
                    format!(" = b{}(V)", k - 1)
                }
                _ => String::new(),
            };
            println!("{}{} ({})", decision.value, source, rule);
            Ok(EXIT_OK)
        }
        Command::Selfcheck { seed } => {
            let ladder = run_ladder_suite(seed, 1000, 4);
            let hardy = run_hardy_suite(seed.wrapping_add(1), 100, 2048, 1e3);
            let cm = run_cm_suite(1e3);
            println!("ladder: {ladder}, hardy: {hardy}, cm: {cm}");
            if ladder.all_passed() && hardy.all_passed() && cm.all_passed() {
                Ok(EXIT_OK)
            } else {
                Ok(EXIT_INTERNAL)
            }
        }
    }
}

fn as_cli_err(e: QaleError) -> (u8, String) {
    (exit_code_for(&e), format!("error: {e}"))
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err((code, message)) => {
            if code == EXIT_OK {
                // help/version text goes to stdout
                println!("{message}");
            } else {
                eprintln!("{message}");
            }
            ExitCode::from(code)
        }
    }
}
