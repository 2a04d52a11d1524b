//! `mdspline` command-line front end.
//!
//! Exit codes: 0 success, 1 internal failure, 2 validation error (including
//! malformed JSON and bad flags), 3 operator precondition error, 4 I/O error.

use std::fs;
use std::io::{self, Read, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mdspline::sample::{sample, Quantity};
use mdspline::transition::transitions_of;
use mdspline::{Error, ErrorKind, MDCurve, SpaceDocument};

#[derive(Parser)]
#[command(name = "mdspline", version, about = "Multi-degree spline spaces, bases and curves")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a document and print its dimension and partitions.
    Validate {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Report::Text)]
        format: Report,
    },
    /// Sample the basis, transition functions, basis derivatives or curve.
    Sample {
        file: PathBuf,
        /// basis, transitions, curve, derivative or derivative:R
        #[arg(long, default_value = "basis")]
        what: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Table::Csv)]
        format: Table,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Insert one knot at a parameter value.
    InsertKnot {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Raise the degree of one interval.
    Elevate {
        file: PathBuf,
        /// 0-based interval index.
        #[arg(long)]
        interval: usize,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Bezier segments of a curve as JSON.
    ToBezier {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Elevate every interval to the maximum degree.
    ToConventional {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the Bernstein coefficient tables of the transition functions.
    DumpTransitions {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the HTTP session service.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Check curve invariance on every insertion and elevation.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Report {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Table {
    Csv,
    Json,
}

enum Failure {
    Io(String),
    Core(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 4,
            Failure::Usage(_) => 2,
            Failure::Core(e) => match e.kind() {
                ErrorKind::Validation => 2,
                ErrorKind::Precondition => 3,
                ErrorKind::Internal => 1,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_document(path: &Path) -> Result<SpaceDocument, Failure> {
    let text = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Io(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?
    };
    SpaceDocument::from_json(&text).map_err(|e| match e {
        Error::Document(m) => Failure::Core(Error::Document(format!("{}: {m}", path.display()))),
        other => Failure::Core(other),
    })
}

fn write_output(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| Failure::Io(format!("stdout: {e}"))),
    }
}

/// The document's curve, or zero 1-D points on its space when it has none.
fn load_curve(doc: &SpaceDocument) -> Result<MDCurve, Failure> {
    if doc.has_curve() {
        return Ok(doc.to_curve()?);
    }
    let space = doc.to_space()?;
    Ok(MDCurve::new(&space, vec![vec![0.0]; space.dim()])?)
}

fn save_curve(curve: &MDCurve, with_points: bool) -> String {
    let doc = if with_points { SpaceDocument::from_curve(curve) } else { SpaceDocument::from_space(curve.space()) };
    doc.to_json() + "\n"
}

fn fmt_list(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

fn validate(file: &Path, format: Report) -> Outcome {
    let doc = read_document(file)?;
    let curve = doc.has_curve().then(|| doc.to_curve()).transpose()?;
    let space = doc.to_space()?;
    let p = mdspline::ExtendedPartitions::new(&space);
    let text = match format {
        Report::Json => {
            let v = serde_json::json!({
                "K": space.dim(),
                "partitions": { "s": p.s(), "t": p.t() },
                "breakpoints": space.breakpoints(),
                "degrees": space.degrees(),
                "continuities": space.continuities(),
                "geometric": space.is_geometric(),
                "control_points": curve.as_ref().map(|c| c.len()),
            });
            serde_json::to_string_pretty(&v).expect("plain json") + "\n"
        }
        Report::Text => {
            let mut t = format!("K = {}\ns = {}\nt = {}\n", space.dim(), fmt_list(p.s()), fmt_list(p.t()));
            t += &format!("degrees = {:?}\n", space.degrees());
            for i in 1..=space.q() {
                let kind = match space.connection(i) {
                    Some(m) if !m.is_identity() => "G",
                    _ => "C",
                };
                t += &format!("x_{i} = {}: {kind}^{}\n", space.x(i), space.continuity(i));
            }
            if let Some(c) = &curve {
                t += &format!("control points = {} (dimension {})\n", c.len(), c.dim());
            }
            t
        }
    };
    write_output(None, &text)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate { file, format } => validate(&file, format),
        Command::Sample { file, what, samples, format, out } => {
            let what: Quantity = what.parse().map_err(|_| Failure::Usage(format!("unknown --what {what:?}")))?;
            if samples < 2 {
                return Err(Failure::Usage("--samples must be at least 2".into()));
            }
            let doc = read_document(&file)?;
            if what == Quantity::Curve && !doc.has_curve() {
                return Err(Failure::Core(Error::Document("sampling a curve needs \"control_points\"".into())));
            }
            let curve = load_curve(&doc)?;
            let table = sample(curve.basis(), Some(&curve), what, samples)?;
            let text = match format {
                Table::Csv => table.to_csv(),
                Table::Json => table.to_json() + "\n",
            };
            write_output(out.as_deref(), &text)
        }
        Command::InsertKnot { file, x, out } => {
            let doc = read_document(&file)?;
            let curve = load_curve(&doc)?.insert_knot(x)?.curve;
            write_output(out.as_deref(), &save_curve(&curve, doc.has_curve()))
        }
        Command::Elevate { file, interval, times, out } => {
            let doc = read_document(&file)?;
            let curve = load_curve(&doc)?.elevate_degree(interval, times)?;
            write_output(out.as_deref(), &save_curve(&curve, doc.has_curve()))
        }
        Command::ToBezier { file, out } => {
            let curve = read_document(&file)?.to_curve()?;
            let text = serde_json::to_string_pretty(&curve.to_bezier()).expect("finite segments") + "\n";
            write_output(out.as_deref(), &text)
        }
        Command::ToConventional { file, out } => {
            let doc = read_document(&file)?;
            let curve = load_curve(&doc)?.to_conventional()?;
            write_output(out.as_deref(), &save_curve(&curve, doc.has_curve()))
        }
        Command::DumpTransitions { file, out } => {
            let space = read_document(&file)?.to_space()?;
            let dump = transitions_of(&space)?.dump();
            let text = serde_json::to_string_pretty(&dump).expect("finite coefficients") + "\n";
            write_output(out.as_deref(), &text)
        }
        Command::Serve { host, port, verify } => {
            let config = mdspline_service::Config { verify_invariance: verify || cfg!(debug_assertions) };
            let addr = SocketAddr::new(host, port);
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::Io(e.to_string()))?;
            eprintln!("listening on http://{addr}");
            rt.block_on(mdspline_service::serve(addr, config)).map_err(|e| Failure::Io(format!("{addr}: {e}")))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
