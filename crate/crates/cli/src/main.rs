mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use glulib::{Error, Field, Result, Strategy};
use serde_json::json;


use report::{Report, Status};

#[derive(Parser)]
#[command(name = "glulib", version, about = "Invariants and resolutions of glued semigroup rings")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    /// Include wall-clock timings (makes output run-dependent).
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    First,
    All,
    PreferSimple,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportArg {
    Text,
    M2,
}

#[derive(Clone, Copy, ValueEnum)]
enum AffineArg {
    Generators,
    Verify,
    Betti,
}

#[derive(Subcommand)]
enum Cmd {
    /// Frobenius number, Apéry set, type and classification.
    Analyze {
        gens: String,
        #[arg(long = "char", default_value_t = 32003)]
        char_: u64,
    },
    /// Gluing decomposition trees.
    Decompose {
        gens: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::First)]
        strategy: StrategyArg,
        /// Maximum number of trees for `--strategy all`.
        #[arg(long, default_value_t = glulib::gluing::DEFAULT_TREE_LIMIT)]
        limit: usize,
    },
    /// Betti numbers from the gluing formulas, optionally against the oracle.
    Betti {
        gens: String,
        #[arg(long)]
        graded: bool,
        #[arg(long)]
        oracle: bool,
        /// Field characteristic (0 for ℚ). With --oracle and no --char both
        /// GF(2) and GF(32003) are used.
        #[arg(long = "char")]
        char_: Option<u64>,
    },
    /// Hilbert series numerator.
    Hilbert {
        gens: String,
        /// Check the series expansion against membership up to this degree.
        #[arg(long)]
        expand: Option<u64>,
        #[arg(long = "char", default_value_t = 32003)]
        char_: u64,
    },
    /// Explicit minimal free resolution.
    Resolution {
        gens: String,
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 32003)]
        prime: u64,
        #[arg(long, default_value_t = 5)]
        trials: usize,
        #[arg(long, value_enum)]
        export: Option<ExportArg>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long = "char", default_value_t = 32003)]
        char_: u64,
    },
    /// Affine semigroups in ℕ^m read from FILE.
    Affine {
        file: PathBuf,
        #[arg(value_enum)]
        action: AffineArg,
        /// Inclusive box bound, comma-separated (default: twice the
        /// coordinatewise sum of all generators).
        #[arg(long)]
        bound: Option<String>,
        #[arg(long = "char", default_value_t = 32003)]
        char_: u64,
    },
}

fn name(cmd: &Cmd) -> &'static str {
    match cmd {
        Cmd::Analyze { .. } => "analyze",
        Cmd::Decompose { .. } => "decompose",
        Cmd::Betti { .. } => "betti",
        Cmd::Hilbert { .. } => "hilbert",
        Cmd::Resolution { .. } => "resolution",
        Cmd::Affine { .. } => "affine",
    }
}

fn input_json(cmd: &Cmd) -> serde_json::Value {
    match cmd {
        Cmd::Analyze { gens, char_ } => json!({"gens": gens, "char": char_}),
        Cmd::Decompose { gens, strategy, limit } => json!({
            "gens": gens,
            "strategy": match strategy {
                StrategyArg::First => "first",
                StrategyArg::All => "all",
                StrategyArg::PreferSimple => "prefer_simple",
            },
            "limit": limit,
        }),
        Cmd::Betti { gens, graded, oracle, char_ } => {
            json!({"gens": gens, "graded": graded, "oracle": oracle, "char": char_})
        }
        Cmd::Hilbert { gens, expand, char_ } => json!({"gens": gens, "expand": expand, "char": char_}),
        Cmd::Resolution { gens, verify, prime, trials, export, out, char_ } => json!({
            "gens": gens,
            "verify": verify,
            "prime": prime,
            "trials": trials,
            "export": export.map(|e| match e { ExportArg::Text => "text", ExportArg::M2 => "m2" }),
            "out": out.as_ref().map(|p| p.display().to_string()),
            "char": char_,
        }),
        Cmd::Affine { file, action, bound, char_ } => json!({
            "file": file.display().to_string(),
            "action": match action {
                AffineArg::Generators => "generators",
                AffineArg::Verify => "verify",
                AffineArg::Betti => "betti",
            },
            "bound": bound,
            "char": char_,
        }),
    }
}

fn run(cmd: &Cmd, r: &mut Report) -> Result<()> {
    use commands::*;
    match cmd {
        Cmd::Analyze { gens, char_ } => analyze(&parse_gens(gens)?, parse_field(*char_)?, r),
        Cmd::Decompose { gens, strategy, limit } => {
            let s = match strategy {
                StrategyArg::First => Strategy::First,
                StrategyArg::All => Strategy::All,
                StrategyArg::PreferSimple => Strategy::PreferSimple,
            };
            decompose(&parse_gens(gens)?, s, *limit, r)
        }
        Cmd::Betti { gens, graded, oracle, char_ } => {
            let fields = match (char_, oracle) {
                (Some(p), _) => vec![parse_field(*p)?],
                (None, true) => vec![Field::Prime(2), Field::Prime(32003)],
                (None, false) => vec![Field::DEFAULT],
            };
            betti(&parse_gens(gens)?, *graded, *oracle, &fields, r)
        }
        Cmd::Hilbert { gens, expand, char_ } => hilbert(&parse_gens(gens)?, *expand, parse_field(*char_)?, r),
        Cmd::Resolution { gens, verify, prime, trials, export, out, char_ } => {
            let o = ResolutionOpts {
                verify: *verify,
                prime: *prime,
                trials: *trials,
                export: export.map(|e| match e {
                    ExportArg::Text => ExportFormat::Text,
                    ExportArg::M2 => ExportFormat::M2,
                }),
                out: out.clone(),
                field: parse_field(*char_)?,
            };
            resolution(&parse_gens(gens)?, &o, r)
        }
        Cmd::Affine { file, action, bound, char_ } => {
            let src = std::fs::read_to_string(file)
                .map_err(|e| Error::Argument(format!("cannot read {}: {e}", file.display())))?;
            let input = parse_affine(&src)?;
            let bound = match bound {
                Some(b) => parse_gens(b)?,
                None => default_bound(&input),
            };
            let action = match action {
                AffineArg::Generators => AffineCommand::Generators,
                AffineArg::Verify => AffineCommand::Verify,
                AffineArg::Betti => AffineCommand::Betti,
            };
            affine_cmd(&input, action, &bound, parse_field(*char_)?, r)
        }
    }
}

fn configure_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("GLULIB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("GLULIB_THREADS must be a positive integer, got {v:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let command = name(&cli.cmd);
    let input = input_json(&cli.cmd);
    let mut r = Report::new(command, input.clone());
    let code = match run(&cli.cmd, &mut r) {
        Ok(()) => {
            if r.status == Status::Mismatch {
                eprintln!("MISMATCH: independent computations disagree; this is a bug or a counterexample");
                3
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Invariant(_)) {
                eprintln!("INVARIANT FAILURE: this is a bug or a counterexample");
            }
            let code = report::exit_code(&e);
            r = Report::error(command, input, &e);
            code
        }
    };
    if !cli.timings {
        r.timings_ms = None;
    }
    let out = match cli.format {
        Format::Json => r.to_json(),
        Format::Text if r.status == Status::Error => String::new(),
        Format::Text => {
            let mut s = r.text.clone();
            for w in &r.warnings {
                s.push_str(&format!("warning: {w}\n"));
            }
            if let Some(t) = &r.timings_ms {
                s.push_str(&format!("timings (ms): {t}\n"));
            }
            s
        }
    };
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code)
}
