//! `tpa`: analyze truth-preserving loops from the command line.
//!
//! Every invocation prints one JSON report on stdout. Errors also go to
//! stderr in plain text. Exit codes: 0 success or arrow found, 1 property
//! fails or no arrow, 2 parse or usage error, 3 budget exceeded.

mod commands;
mod report;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use tpa_core::arrows::SearchLimits;

use commands::{ArrowArgs, CmdResult, GraphInput, Output, Subject};
use report::{Exit, Failure, Report};

#[derive(Parser, Debug)]
#[command(name = "tpa", version, about = "Truth-preservation orders, program denotations and loop isomorphism arrows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Target {
    /// Named function to analyze
    #[arg(long = "fn", value_name = "F", conflicts_with = "program", required_unless_present = "program")]
    function: Option<String>,
    /// Program whose denotation is analyzed
    #[arg(long, value_name = "P")]
    program: Option<String>,
}

impl Target {
    fn subject(&self) -> Subject<'_> {
        match (&self.function, &self.program) {
            (Some(f), _) => Subject::Fn(f),
            (None, Some(p)) => Subject::Program(p),
            (None, None) => unreachable!("clap requires one of --fn and --program"),
        }
    }

    fn echo(&self) -> Value {
        json!({"fn": self.function, "program": self.program})
    }
}

#[derive(Args, Debug)]
struct Limits {
    /// Largest source loop the arrow search accepts
    #[arg(long, default_value_t = SearchLimits::default().max_source)]
    max_source: usize,
    /// Largest target loop the arrow search accepts
    #[arg(long, default_value_t = SearchLimits::default().max_target)]
    max_target: usize,
    /// Candidate assignments tried per search
    #[arg(long, default_value_t = SearchLimits::default().max_nodes)]
    max_nodes: u64,
}

impl Limits {
    fn get(&self) -> SearchLimits {
        SearchLimits {
            max_source: self.max_source,
            max_target: self.max_target,
            max_nodes: self.max_nodes,
        }
    }

    fn echo(&self) -> Value {
        json!({"max_source": self.max_source, "max_target": self.max_target, "max_nodes": self.max_nodes})
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a program file and summarize its declarations
    Parse { file: PathBuf },
    /// Denote a program as a table over its state space
    Denote {
        file: PathBuf,
        #[arg(long)]
        program: String,
        /// Include one row per start state
        #[arg(long)]
        table: bool,
    },
    /// Walk the orbit of one start state while a condition holds
    Orbit {
        file: PathBuf,
        #[command(flatten)]
        target: Target,
        /// Condition name or expression
        #[arg(long)]
        cond: String,
        /// Start state, `x=1,y=2`, a bare integer, or `bottom`
        #[arg(long)]
        start: String,
    },
    /// Per-element orders, order m and limit l
    Order {
        file: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        cond: String,
        /// Report one state's order separately
        #[arg(long)]
        element: Option<String>,
    },
    /// Compare profiles under two conditions; the direction follows entailment
    Profile {
        file: PathBuf,
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        cond: String,
        #[arg(long)]
        cond2: String,
    },
    /// Verify or search an isomorphism arrow between two programs
    Arrow {
        file: PathBuf,
        /// Arrow type, 0 or 1
        #[arg(long, default_value_t = 0)]
        kind: u8,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Run the source program as a loop body under this condition
        #[arg(long)]
        from_cond: Option<String>,
        /// Run the target program as a loop body under this condition
        #[arg(long)]
        to_cond: Option<String>,
        /// Read the target program from another file
        #[arg(long)]
        to_file: Option<PathBuf>,
        /// Transform to verify, one `SOURCE -> TARGET` line per state
        #[arg(long, conflicts_with = "search")]
        map: Option<PathBuf>,
        /// Search for a transform (the default)
        #[arg(long)]
        search: bool,
        #[command(flatten)]
        limits: Limits,
    },
    /// Build the isomorphism graph over every program in the given files
    Graph {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Pairwise searches allowed before the graph is truncated
        #[arg(long, default_value_t = 1000)]
        budget: usize,
        /// Restrict the graph to these programs
        #[arg(long = "only", value_name = "PROGRAM")]
        only: Vec<String>,
        /// Run a program as a loop body, `PROGRAM=COND`
        #[arg(long = "cond", value_name = "PROGRAM=COND")]
        conds: Vec<String>,
        #[command(flatten)]
        limits: Limits,
    },
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn run(cmd: &Command) -> (&'static str, Value, CmdResult) {
    match cmd {
        Command::Parse { file } => (
            "parse",
            json!({"file": path_str(file)}),
            commands::load(file).and_then(|u| commands::cmd_parse(&u)),
        ),
        Command::Denote { file, program, table } => (
            "denote",
            json!({"file": path_str(file), "program": program, "table": table}),
            commands::load(file).and_then(|u| commands::cmd_denote(&u, program, *table)),
        ),
        Command::Orbit { file, target, cond, start } => {
            let mut inputs = target.echo();
            inputs["file"] = path_str(file).into();
            inputs["cond"] = cond.clone().into();
            inputs["start"] = start.clone().into();
            let out = commands::load(file).and_then(|u| commands::cmd_orbit(&u, target.subject(), cond, start));
            ("orbit", inputs, out)
        }
        Command::Order { file, target, cond, element } => {
            let mut inputs = target.echo();
            inputs["file"] = path_str(file).into();
            inputs["cond"] = cond.clone().into();
            inputs["element"] = element.clone().into();
            let out = commands::load(file)
                .and_then(|u| commands::cmd_order(&u, target.subject(), cond, element.as_deref()));
            ("order", inputs, out)
        }
        Command::Profile { file, target, cond, cond2 } => {
            let mut inputs = target.echo();
            inputs["file"] = path_str(file).into();
            inputs["cond"] = cond.clone().into();
            inputs["cond2"] = cond2.clone().into();
            let out = commands::load(file).and_then(|u| commands::cmd_profile(&u, target.subject(), cond, cond2));
            ("profile", inputs, out)
        }
        Command::Arrow {
            file,
            kind,
            from,
            to,
            from_cond,
            to_cond,
            to_file,
            map,
            search,
            limits,
        } => {
            let inputs = json!({
                "file": path_str(file),
                "kind": kind,
                "from": from,
                "to": to,
                "from_cond": from_cond,
                "to_cond": to_cond,
                "to_file": to_file.as_deref().map(path_str),
                "map": map.as_deref().map(path_str),
                "search": *search || map.is_none(),
                "limits": limits.echo(),
            });
            let out = (|| {
                let unit = commands::load(file)?;
                let other = to_file.as_deref().map(commands::load).transpose()?;
                commands::cmd_arrow(&ArrowArgs {
                    kind: *kind,
                    from_unit: &unit,
                    from,
                    from_cond: from_cond.as_deref(),
                    to_unit: other.as_ref().unwrap_or(&unit),
                    to,
                    to_cond: to_cond.as_deref(),
                    map: map.as_deref(),
                    limits: limits.get(),
                })
            })();
            ("arrow", inputs, out)
        }
        Command::Graph {
            files,
            budget,
            only,
            conds,
            limits,
        } => {
            let inputs = json!({
                "files": files.iter().map(|f| path_str(f)).collect::<Vec<_>>(),
                "budget": budget,
                "only": only,
                "cond": conds,
                "limits": limits.echo(),
            });
            let out = (|| {
                let mut cond_map = BTreeMap::new();
                for c in conds {
                    let (p, c) = c
                        .split_once('=')
                        .ok_or_else(|| Failure::usage(format!("expected PROGRAM=COND, got `{c}`")))?;
                    if cond_map.insert(p.trim().to_string(), c.trim().to_string()).is_some() {
                        return Err(Failure::usage(format!("two conditions given for `{}`", p.trim())));
                    }
                }
                let inputs = files
                    .iter()
                    .map(|f| commands::load(f).map(|unit| GraphInput { path: f.clone(), unit }))
                    .collect::<Result<Vec<_>, _>>()?;
                commands::cmd_graph(&inputs, only, &cond_map, *budget, &limits.get())
            })();
            ("graph", inputs, out)
        }
    }
}

fn emit(report: &Report) {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    // A closed pipe is not worth a panic.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            let message = e.kind().to_string();
            emit(&Report::new(
                "usage",
                json!({"args": std::env::args().skip(1).collect::<Vec<_>>()}),
                json!({"error": {"kind": "usage", "message": message}}),
                vec![message.clone()],
            ));
            return ExitCode::from(Exit::Usage as u8);
        }
    };
    let (command, inputs, out) = run(&cli.command);
    let exit = match out {
        Ok(Output { result, exit, diagnostics }) => {
            emit(&Report::new(command, inputs, result, diagnostics));
            exit
        }
        Err(Failure { exit, kind, message }) => {
            eprintln!("tpa {command}: {message}");
            emit(&Report::new(
                command,
                inputs,
                json!({"error": {"kind": kind, "message": message}}),
                vec![message],
            ));
            exit
        }
    };
    ExitCode::from(exit as u8)
}
