//! `ordlevel` command-line interface.
//!
//! Exit codes: 0 success, 2 bad input or violated surgery precondition,
//! 3 internal invariant breach or failed verification.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::barcode::{barcode, Rule};
use crate::boxsnake::{build_box_snake, Side, Snake};
use crate::domain::{Domain, OrderedSequence};
use crate::filtration::{beta0_balance_check, run_filtration, Direction};
use crate::flats::classify_flats;
use crate::io::{
    to_json, BarcodeDocument, BoxSnakeDocument, FlatsDocument, MergeTreeDocument,
    SequenceDocument, SurgeryDocument,
};
use crate::suite::{run_suite, Mode, Suite};

/// Seed used by `verify --random` when none is given and `ORDLEVEL_SEED` is
/// unset.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "ordlevel", version, about = "Sublevel/superlevel persistence of ordered sequences")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Persistence barcode.
    Barcode(BarcodeArgs),
    /// Merge tree of the sublevel or superlevel filtration.
    Mergetree(TreeArgs),
    /// Box snake segmentation.
    Boxsnake(InputArgs),
    /// Sequence with the order of levels reversed.
    Invert(InputArgs),
    /// Classified flats.
    Flats(InputArgs),
    /// Cut, glue, shift, circularize or linearize.
    #[command(subcommand)]
    Surgery(SurgeryCommand),
    /// Property suites against brute-force oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// JSON sequence document or CSV of values; `-` reads stdin.
    input: PathBuf,
    /// Overrides the document's domain.
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
}

#[derive(Debug, Args)]
struct BarcodeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = RuleArg::Elder)]
    rule: RuleArg,
    #[arg(long, value_enum, default_value_t = FiltrationArg::Sub)]
    filtration: FiltrationArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Debug, Args)]
struct TreeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = FiltrationArg::Sub)]
    filtration: FiltrationArg,
}

#[derive(Debug, Subcommand)]
enum SurgeryCommand {
    /// Cut a linear sequence between POSITION and POSITION+1.
    Cut { input: PathBuf, position: usize },
    /// Glue RIGHT after LEFT.
    Glue { left: PathBuf, right: PathBuf },
    /// Drop M samples on one side and append the M given samples on the other.
    Shift {
        input: PathBuf,
        #[arg(value_enum)]
        side: SideArg,
        /// Comma-separated new samples: values for value documents, ranks for
        /// rank documents.
        #[arg(allow_hyphen_values = true)]
        samples: String,
    },
    /// Join the two ends of a linear sequence.
    Circularize { input: PathBuf },
    /// Open a circular sequence between AT and AT+1 (default: N-1 and 0).
    Linearize {
        input: PathBuf,
        #[arg(long)]
        at: Option<usize>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "mode")]
struct ModeArgs {
    /// Exhaustive run: maximum length N and number of ranks M (default 4).
    #[arg(long, num_args = 1..=2, value_names = ["N", "M"])]
    exhaustive: Option<Vec<u64>>,
    /// Random run: number of trials and seed (default `ORDLEVEL_SEED` or 42).
    #[arg(long, num_args = 1..=2, value_names = ["TRIALS", "SEED"])]
    random: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[command(flatten)]
    mode: ModeArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DomainArg {
    Linear,
    Circular,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    Elder,
    Local,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FiltrationArg {
    Sub,
    Super,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
    Svg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SuiteArg {
    Trisection,
    Inversion,
    CircularSymmetry,
    LinearSymmetry,
    Oracle,
    #[value(name = "appendixB", alias = "appendix-b")]
    AppendixB,
}

impl From<DomainArg> for Domain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Linear => Domain::Linear,
            DomainArg::Circular => Domain::Circular,
        }
    }
}

impl From<RuleArg> for Rule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Elder => Rule::ElderLeftmost,
            RuleArg::Local => Rule::LocalNeighbor,
        }
    }
}

impl From<FiltrationArg> for Direction {
    fn from(f: FiltrationArg) -> Self {
        match f {
            FiltrationArg::Sub => Direction::Sub,
            FiltrationArg::Super => Direction::Super,
        }
    }
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Trisection => Suite::Trisection,
            SuiteArg::Inversion => Suite::Inversion,
            SuiteArg::CircularSymmetry => Suite::CircularSymmetry,
            SuiteArg::LinearSymmetry => Suite::LinearSymmetry,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::AppendixB => Suite::AppendixB,
        }
    }
}

/// A command failure with its exit code.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("invariant breach: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

/// A loaded input: document (for its name and shape) and sequence.
struct Loaded {
    doc: SequenceDocument,
    seq: OrderedSequence,
}

fn load(path: &Path, domain: Option<DomainArg>, stdin: &mut dyn Read) -> Result<Loaded, CliError> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s).map_err(input_err)?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))?
    };
    let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        || !text.trim_start().starts_with('{');
    let mut doc = if is_csv {
        SequenceDocument::from_csv(&text, Domain::Linear).map_err(input_err)?
    } else {
        serde_json::from_str(&text).map_err(|e| input_err(format!("schema violation: {e}")))?
    };
    if let Some(d) = domain {
        doc.domain = d.into();
    }
    let seq = doc.to_sequence().map_err(input_err)?;
    Ok(Loaded { doc, seq })
}

fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| input_err(format!("`{t}` is not a number"))))
        .collect()
}

fn resolve_mode(args: &ModeArgs) -> Result<Mode, CliError> {
    if let Some(v) = &args.exhaustive {
        let n = v[0] as usize;
        let m = v.get(1).copied().unwrap_or(4) as u32;
        if n == 0 || m == 0 {
            return Err(input_err("--exhaustive needs N >= 1 and M >= 1"));
        }
        return Ok(Mode::Exhaustive { n, m });
    }
    let v = args.random.as_ref().expect("clap enforces one mode");
    let seed = match v.get(1) {
        Some(&s) => s,
        None => match std::env::var("ORDLEVEL_SEED") {
            Ok(s) => s.trim().parse().map_err(|_| input_err("ORDLEVEL_SEED must be an integer"))?,
            Err(_) => DEFAULT_SEED,
        },
    };
    Ok(Mode::Random { trials: v[0] as usize, seed })
}

/// Parses `args` (including the program name) and runs the command, writing
/// the document to `out`.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            return out.write_all(e.render().to_string().as_bytes()).map_err(input_err);
        }
        Err(e) => return Err(CliError::Input(e.render().to_string())),
    };
    let text = execute(cli.command, stdin)?;
    out.write_all(text.as_bytes()).map_err(input_err)
}

fn execute(command: Command, stdin: &mut dyn Read) -> Result<String, CliError> {
    match command {
        Command::Barcode(a) => {
            let l = load(&a.input.input, a.input.domain, stdin)?;
            let direction: Direction = a.filtration.into();
            let f = run_filtration(&l.seq, direction);
            if !beta0_balance_check(&f) {
                return Err(CliError::Invariant("beta0 balance".into()));
            }
            let bc = barcode(&l.seq, a.rule.into(), direction);
            let doc = BarcodeDocument::new(&bc, l.seq.universe(), l.doc.name);
            Ok(match a.format {
                FormatArg::Json => to_json(&doc),
                FormatArg::Text => doc.to_text(),
                FormatArg::Svg => doc.to_svg(),
            })
        }
        Command::Mergetree(a) => {
            let l = load(&a.input.input, a.input.domain, stdin)?;
            let tree = run_filtration(&l.seq, a.filtration.into()).tree;
            Ok(to_json(&MergeTreeDocument { name: l.doc.name, tree }))
        }
        Command::Boxsnake(a) => {
            let l = load(&a.input, a.domain, stdin)?;
            let bs = build_box_snake(&l.seq);
            if !bs.alternates() {
                return Err(CliError::Invariant("box snake alternation".into()));
            }
            Ok(to_json(&BoxSnakeDocument { name: l.doc.name, box_snake: bs }))
        }
        Command::Invert(a) => {
            let l = load(&a.input, a.domain, stdin)?;
            Ok(to_json(&SequenceDocument::from_sequence(&l.seq.invert_order(), l.doc.name)))
        }
        Command::Flats(a) => {
            let l = load(&a.input, a.domain, stdin)?;
            Ok(to_json(&FlatsDocument { name: l.doc.name, domain: l.seq.domain(), flats: classify_flats(&l.seq) }))
        }
        Command::Surgery(s) => surgery(s, stdin).map(|d| to_json(&d)),
        Command::Verify(a) => {
            let report = run_suite(a.suite.into(), resolve_mode(&a.mode)?);
            let text = to_json(&report);
            if report.passed() {
                Ok(text)
            } else {
                Err(CliError::Invariant(text))
            }
        }
    }
}

fn surgery(command: SurgeryCommand, stdin: &mut dyn Read) -> Result<SurgeryDocument, CliError> {
    let single = |op: &str, snakes: Vec<Snake>, report| {
        let sequences = snakes.iter().map(|s| SequenceDocument::from_sequence(s.sequence(), None)).collect();
        let box_snakes = snakes.into_iter().map(|s| s.into_parts().1).collect();
        SurgeryDocument { operation: op.to_string(), sequences, box_snakes, report }
    };
    match command {
        SurgeryCommand::Cut { input, position } => {
            let l = load(&input, None, stdin)?;
            let (a, b, r) = Snake::new(l.seq).cut(position).map_err(input_err)?;
            Ok(single("cut", vec![a, b], Some(r)))
        }
        SurgeryCommand::Glue { left, right } => {
            let a = load(&left, None, stdin)?;
            let b = load(&right, None, stdin)?;
            let (g, r) = Snake::glue(Snake::new(a.seq), Snake::new(b.seq)).map_err(input_err)?;
            Ok(single("glue", vec![g], Some(r)))
        }
        SurgeryCommand::Shift { input, side, samples } => {
            let l = load(&input, None, stdin)?;
            let values = parse_samples(&samples)?;
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            let snake = Snake::new(l.seq);
            let moved = if l.doc.values.is_some() {
                if values.is_empty() {
                    snake
                } else {
                    let block = crate::domain::rank_quantize(&values, Domain::Linear).map_err(input_err)?;
                    snake.shift_with(side, Snake::new(block)).map_err(input_err)?
                }
            } else {
                let ranks = values
                    .iter()
                    .map(|&v| {
                        (v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64)
                            .then_some(v as u32)
                            .ok_or_else(|| input_err(format!("`{v}` is not a rank")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                snake.shift(side, ranks).map_err(input_err)?
            };
            Ok(single("shift", vec![moved], None))
        }
        SurgeryCommand::Circularize { input } => {
            let l = load(&input, None, stdin)?;
            let (c, r) = Snake::new(l.seq).glue_ends().map_err(input_err)?;
            Ok(single("circularize", vec![c], Some(r)))
        }
        SurgeryCommand::Linearize { input, at } => {
            let l = load(&input, None, stdin)?;
            let n = l.seq.len();
            let (c, r) = Snake::new(l.seq).linearize_at(at.unwrap_or(n - 1)).map_err(input_err)?;
            Ok(single("linearize", vec![c], Some(r)))
        }
    }
}

/// Entry point for the binary.
pub fn main() -> std::process::ExitCode {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(std::env::args_os(), &mut std::io::stdin(), &mut out) {
        Ok(()) => std::process::ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Input(msg) => eprintln!("{msg}"),
                CliError::Invariant(msg) => {
                    // failing reports still go to stdout
                    let _ = out.write_all(msg.as_bytes());
                    eprintln!("verification or invariant failure");
                }
            }
            std::process::ExitCode::from(e.exit_code())
        }
    }
}
