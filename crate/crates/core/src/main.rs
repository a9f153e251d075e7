use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use xpathsat::dtd::{self, Dtd, DtdFormat};
use xpathsat::oracle::{Bounds, Oracle, OracleVerdict};
use xpathsat::regex::{parse_content_model, ContentModel, SymbolMode};
use xpathsat::sat::{Checker, SatError};
use xpathsat::schema_graph::SchemaGraph;
use xpathsat::xpath::XPath;

/// Static satisfiability checking of XPath expressions under DTDs.
#[derive(Parser)]
#[command(name = "xpathsat", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every rule of a DTD (DF, DC, DC?+#, RW, MRW, MDF/DC).
    Classify {
        #[command(flatten)]
        dtd: DtdArgs,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether an expression selects a node in some valid document.
    Sat {
        #[command(flatten)]
        dtd: DtdArgs,
        #[arg(long)]
        xpath: String,
        /// Print every intermediate state.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Search for a witness document within bounds.
    Oracle {
        #[command(flatten)]
        dtd: DtdArgs,
        #[arg(long)]
        xpath: String,
        /// Maximum number of edges on a root-to-leaf path.
        #[arg(long, default_value_t = Bounds::DEFAULT_DEPTH)]
        depth: usize,
        /// Maximum same-labelled siblings introduced under one node
        /// [default: max(2, size of the expression)].
        #[arg(long)]
        rep: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Decide whether two content models denote the same language.
    Equiv {
        left: String,
        right: String,
        #[arg(long, value_enum, default_value_t = Symbols::Char)]
        symbols: Symbols,
        #[arg(long)]
        json: bool,
    },
    /// Print the simplified DTD (or content model) used for checking.
    Delta {
        #[command(flatten)]
        dtd: OptionalDtdArgs,
        /// A single content model instead of a DTD.
        #[arg(long, conflicts_with = "dtd")]
        model: Option<String>,
        #[arg(long, value_enum, default_value_t = Symbols::Char)]
        symbols: Symbols,
    },
    /// Print the schema graph of the simplified DTD.
    Graph {
        #[command(flatten)]
        dtd: DtdArgs,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct DtdArgs {
    /// DTD file.
    #[arg(long)]
    dtd: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
    /// Root label, overriding the file.
    #[arg(long)]
    root: Option<String>,
}

#[derive(Args)]
struct OptionalDtdArgs {
    #[arg(long)]
    dtd: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
    #[arg(long)]
    root: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// XML if the file starts with `<`, native otherwise.
    Auto,
    Native,
    Xml,
}

#[derive(Clone, Copy, ValueEnum)]
enum Symbols {
    /// Every letter is a label: `ab+c`.
    Char,
    /// Labels are whole names separated by `,` or spaces: `title, author+`.
    Word,
}

/// Errors that map to dedicated exit codes.
fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<SatError>() {
        Some(SatError::NotMrw(_)) => 3,
        Some(SatError::UnsupportedFragment(_)) => 4,
        _ => 2,
    }
}

fn load_dtd(path: &PathBuf, format: Format, root: Option<&str>) -> Result<Dtd> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let format = match format {
        Format::Native => DtdFormat::Native,
        Format::Xml => DtdFormat::Xml,
        Format::Auto if text.trim_start().starts_with('<') => DtdFormat::Xml,
        Format::Auto => DtdFormat::Native,
    };
    Dtd::parse(&text, format, root).with_context(|| format!("parsing {}", path.display()))
}

fn parse_model(text: &str, symbols: Symbols) -> Result<ContentModel> {
    let mode = match symbols {
        Symbols::Char => SymbolMode::SingleChar,
        Symbols::Word => SymbolMode::Whole,
    };
    parse_content_model(text, &mode).with_context(|| format!("parsing content model `{text}`"))
}

fn parse_xpath(text: &str) -> Result<XPath> {
    XPath::parse(text).with_context(|| format!("parsing expression `{text}`"))
}

fn write_json(out: &mut String, v: &serde_json::Value) -> Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn verdict_code(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Runs one command, collecting its standard output in `out`.
fn run(cli: Cli, out: &mut String) -> Result<ExitCode> {
    match cli.command {
        Command::Classify { dtd, json } => {
            let d = load_dtd(&dtd.dtd, dtd.format, dtd.root.as_deref())?;
            let c = d.classify();
            if json {
                write_json(out, &serde_json::to_value(&c)?)?;
            } else {
                writeln!(out, "{c}")?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sat { dtd, xpath, trace, json } => {
            let d = load_dtd(&dtd.dtd, dtd.format, dtd.root.as_deref())?;
            let p = parse_xpath(&xpath)?;
            let checker = Checker::new(&d)?;
            let v = checker.check_with(&p, trace)?;
            if json {
                let mut j = v.to_json();
                j["expression"] = p.to_arrow_string().into();
                write_json(out, &j)?;
            } else {
                for line in &v.trace {
                    writeln!(out, "{line}")?;
                }
                writeln!(out, "{} ({})", v.word(), v.algorithm)?;
                writeln!(out, "final state: {}", v.final_state)?;
                if let Some(f) = &v.failure {
                    writeln!(out, "reason: {}", f.reason)?;
                }
            }
            Ok(verdict_code(v.satisfiable))
        }
        Command::Oracle { dtd, xpath, depth, rep, json } => {
            if depth == 0 || rep == Some(0) {
                bail!("bounds must be at least 1");
            }
            let d = load_dtd(&dtd.dtd, dtd.format, dtd.root.as_deref())?;
            let p = parse_xpath(&xpath)?;
            let bounds = Bounds { depth, rep: rep.unwrap_or(Bounds::for_query(&p).rep) };
            let v = Oracle::new(&d).satisfiable(&p, bounds);
            let (word, witness) = match &v {
                OracleVerdict::Sat(t) => ("SAT", Some(t.to_string())),
                OracleVerdict::Unknown => ("UNKNOWN", None),
            };
            if json {
                write_json(
                    out,
                    &json!({
                        "verdict": word,
                        "witness": witness,
                        "bounds": { "depth": bounds.depth, "rep": bounds.rep },
                    }),
                )?;
            } else {
                writeln!(out, "{word}")?;
                if let Some(w) = witness {
                    writeln!(out, "witness: {w}")?;
                }
            }
            Ok(verdict_code(v.is_sat()))
        }
        Command::Equiv { left, right, symbols, json } => {
            let a = parse_model(&left, symbols)?;
            let b = parse_model(&right, symbols)?;
            let eq = a.equivalent(&b);
            if json {
                write_json(out, &json!({ "left": a.to_string(), "right": b.to_string(), "equivalent": eq }))?;
            } else {
                writeln!(out, "{}", if eq { "equivalent" } else { "not equivalent" })?;
            }
            Ok(verdict_code(eq))
        }
        Command::Delta { dtd, model, symbols } => {
            match (dtd.dtd, model) {
                (Some(path), None) => {
                    let d = load_dtd(&path, dtd.format, dtd.root.as_deref())?;
                    write!(out, "{}", d.delta().map_err(SatError::NotMrw)?)?;
                }
                (None, Some(text)) => {
                    let e = parse_model(&text, symbols)?;
                    if !dtd::is_mrw(&e) {
                        return Err(SatError::NotMrw(dtd::DtdError::NotMrw { label: "model".into(), model: e }).into());
                    }
                    writeln!(out, "{}", dtd::delta(&e))?;
                }
                _ => bail!("give exactly one of --dtd and --model"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Graph { dtd, json } => {
            let d = load_dtd(&dtd.dtd, dtd.format, dtd.root.as_deref())?;
            let g = Checker::new(&d)?;
            let g: &SchemaGraph = g.graph();
            if json {
                write_json(out, &g.to_json())?;
            } else {
                write!(out, "{}", g.to_text())?;
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let mut out = String::new();
    let code = match run(Cli::parse(), &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    };
    // A closed pipe, as in `| head`, is not an error.
    match io::stdout().lock().write_all(out.as_bytes()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            eprintln!("error: writing output: {e}");
            ExitCode::from(2)
        }
        _ => code,
    }
}
