//! Command-line front end: thin wrappers over the library with
//! deterministic text output.
//!
//! Exit codes: 0 on success, 1 on domain errors (scope or type
//! mismatches, failing law suites), 2 on usage errors (bad flags,
//! malformed input files).

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bindsig::laws::{run_law_suites, LawSuiteOptions};
use bindsig::models::{fold, swap_model, syntax_model};
use bindsig::scoped::{enumerate_terms, ScopedTerm, Subst};
use bindsig::sexpr;
use bindsig::signature::{lc_signature, parse_signature, BindingSignature, SigError};
use bindsig::typed::pcf::{beta_normalize, pcf_to_ulc, BetaError, DEFAULT_BETA_FUEL};
use bindsig::typed::{Context, TypeErrorKind, TypedTerm};
use bindsig::unscoped::{intersectionality_check, UnscopedTerm};

#[derive(Parser)]
#[command(name = "bindsig", version, about = "Signature-generic syntax with binders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Direction {
    Scoped,
    Unscoped,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Syntax,
    Swap,
}

#[derive(Subcommand)]
enum Command {
    /// Run the substitution, model, and representation law suites.
    Laws {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long = "max-nodes", default_value_t = 5)]
        max_nodes: usize,
    },
    /// Apply a substitution file to a term.
    Subst {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        /// Scope of the input term.
        #[arg(long)]
        scope: usize,
        /// The term, as an s-expression.
        term: String,
        /// File containing `(subst <target-scope> <term>...)`.
        subst_file: PathBuf,
    },
    /// Convert a term between the scoped and unscoped representations.
    Convert {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        #[arg(long, value_enum)]
        to: Direction,
        /// Scope of the input term (required for scoped input).
        #[arg(long)]
        scope: Option<usize>,
        term: String,
    },
    /// Fold a term into a built-in model.
    Fold {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        #[arg(long)]
        scope: usize,
        #[arg(long, value_enum, default_value = "syntax")]
        model: ModelKind,
        term: String,
    },
    /// Translate a typed term across type systems.
    Translate {
        /// Source language (only `pcf`).
        #[arg(long)]
        from: String,
        /// Target language (only `ulc`).
        #[arg(long)]
        to: String,
        /// File containing the typed term.
        #[arg(long)]
        term: PathBuf,
        /// Context as a list of types, e.g. `(nat bool)`.
        #[arg(long)]
        ctx: Option<String>,
        /// Reduce the image to β-normal form.
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = DEFAULT_BETA_FUEL)]
        fuel: u32,
    },
    /// List all terms up to a node bound, in enumeration order.
    Enumerate {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        #[arg(long)]
        scope: usize,
        #[arg(long = "max-nodes")]
        max_nodes: usize,
    },
    /// Compare closed-term counts against the scope-1 equalizer.
    IntersectCheck {
        /// Signature file, or the built-in name `lc`.
        sig: String,
        #[arg(long = "max-nodes", default_value_t = 6)]
        max_nodes: usize,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => m,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn domain(e: impl ToString) -> CliError {
    CliError::Domain(e.to_string())
}

/// Malformed input is a usage error; everything else about a term is a
/// domain error.
fn term_error(e: bindsig::scoped::TermError) -> CliError {
    match e {
        bindsig::scoped::TermError::Parse(p) => usage(p),
        other => domain(other),
    }
}

fn load_signature(spec: &str) -> Result<BindingSignature, CliError> {
    if spec == "lc" {
        return Ok(lc_signature());
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| usage(format!("cannot read signature `{spec}`: {e}")))?;
    parse_signature(&text).map_err(|e| match e {
        SigError::Parse(p) => usage(p),
        other => usage(other),
    })
}

fn parse_subst_file(
    sig: &BindingSignature,
    path: &PathBuf,
    source_scope: usize,
) -> Result<Subst, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read substitution `{}`: {e}", path.display())))?;
    let expr = sexpr::parse(&text).map_err(usage)?;
    let items = expr
        .as_list()
        .filter(|items| items.first().and_then(sexpr::Sexpr::as_atom) == Some("subst"))
        .ok_or_else(|| usage("expected `(subst <target-scope> <term>...)`"))?;
    let target: usize = items
        .get(1)
        .and_then(sexpr::Sexpr::as_atom)
        .and_then(|a| a.parse().ok())
        .ok_or_else(|| usage("expected a target scope after `subst`"))?;
    let entries = items[2..]
        .iter()
        .map(|e| ScopedTerm::parse(sig, &e.to_string(), target).map_err(term_error))
        .collect::<Result<Vec<_>, _>>()?;
    if entries.len() != source_scope {
        return Err(domain(format!(
            "substitution has {} entries, the term's scope is {source_scope}",
            entries.len()
        )));
    }
    Subst::new(entries, target).map_err(term_error)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Laws { sig, samples, seed, max_nodes } => {
            let sig = load_signature(&sig)?;
            let opts = LawSuiteOptions { samples, seed, max_nodes };
            let reports = run_law_suites(&sig, &opts);
            for report in &reports {
                println!("{report}");
            }
            if reports.iter().all(|r| r.passed()) {
                Ok(())
            } else {
                Err(domain("law suite failed"))
            }
        }
        Command::Subst { sig, scope, term, subst_file } => {
            let sig = load_signature(&sig)?;
            let term = ScopedTerm::parse(&sig, &term, scope).map_err(term_error)?;
            let subst = parse_subst_file(&sig, &subst_file, scope)?;
            let result = term.substitute(&subst).map_err(domain)?;
            println!("{result}");
            Ok(())
        }
        Command::Convert { sig, to, scope, term } => {
            let sig = load_signature(&sig)?;
            match to {
                Direction::Scoped => {
                    let term = UnscopedTerm::parse(&sig, &term).map_err(term_error)?;
                    let scoped = term.to_scoped();
                    println!("{scoped}");
                    println!("scope {}", scoped.scope());
                }
                Direction::Unscoped => {
                    let scope =
                        scope.ok_or_else(|| usage("--scope is required for scoped input"))?;
                    let term = ScopedTerm::parse(&sig, &term, scope).map_err(term_error)?;
                    println!("{}", term.to_unscoped());
                }
            }
            Ok(())
        }
        Command::Fold { sig, scope, model, term } => {
            let sig = load_signature(&sig)?;
            let term = ScopedTerm::parse(&sig, &term, scope).map_err(term_error)?;
            let result = match model {
                ModelKind::Syntax => fold(&syntax_model(&sig), &term),
                ModelKind::Swap => {
                    let model = swap_model(&sig).map_err(domain)?;
                    fold(&model, &term)
                }
            }
            .map_err(domain)?;
            println!("{result}");
            Ok(())
        }
        Command::Translate { from, to, term, ctx, normalize, fuel } => {
            if from != "pcf" || to != "ulc" {
                return Err(usage(format!(
                    "unsupported translation `{from}` -> `{to}`; only pcf -> ulc is available"
                )));
            }
            let pcf = bindsig::signature::pcf_signature();
            let ctx = match ctx {
                None => Context::empty(),
                Some(text) => {
                    let expr = sexpr::parse(&text).map_err(usage)?;
                    let items = expr
                        .as_list()
                        .ok_or_else(|| usage("--ctx expects a list of types, e.g. `(nat bool)`"))?;
                    let types = items
                        .iter()
                        .map(bindsig::signature::parse_type)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(usage)?;
                    Context::new(types)
                }
            };
            let text = fs::read_to_string(&term)
                .map_err(|e| usage(format!("cannot read term `{}`: {e}", term.display())))?;
            let typed = TypedTerm::parse(&pcf, &text, &ctx).map_err(|e| match &e.kind {
                TypeErrorKind::Parse(_) => usage(e.clone()),
                _ => domain(e),
            })?;
            let image = pcf_to_ulc(&typed).map_err(domain)?;
            if normalize {
                match beta_normalize(&image, fuel) {
                    Ok(normal) => println!("{normal}"),
                    Err(BetaError::OutOfFuel { .. }) => println!("FUEL-EXHAUSTED"),
                    Err(e @ BetaError::NotLambda(_)) => return Err(domain(e)),
                }
            } else {
                println!("{image}");
            }
            Ok(())
        }
        Command::Enumerate { sig, scope, max_nodes } => {
            let sig = load_signature(&sig)?;
            for term in enumerate_terms(&sig, scope, max_nodes) {
                println!("{term}");
            }
            Ok(())
        }
        Command::IntersectCheck { sig, max_nodes } => {
            let sig = load_signature(&sig)?;
            let report = intersectionality_check(&sig, max_nodes);
            print!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(domain("intersectionality check failed"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
