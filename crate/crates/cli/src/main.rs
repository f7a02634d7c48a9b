//! `coomforge`: solve, check and convert COOM models, or serve sessions.
//!
//! Exit status: 0 satisfiable (or clean), 1 unsatisfiable, 2 any error.

mod output;

use std::fmt::Write as _;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coomforge_core::interactive::{minimal_unsat_subset, BoundsError, IncrementalBounds};
use coomforge_core::parser::pretty_print;
use coomforge_core::solver::user_assumptions;
use coomforge_core::space::{load_explanations, serialize_facts_with, space_to_json, ExplanationMap};
use coomforge_core::{
    apply_user_input, enumerate, instantiate, parse_model, parse_user_input, validate_ast, CoomAst,
    ConfigurationSpace, Model, UserInputAst,
};
use coomforge_service::ServiceConfig;
use serde_json::json;

use output::Format;

#[derive(Parser)]
#[command(name = "coomforge", version, about = "COOM product configuration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a model, optionally under user input.
    Solve(SolveArgs),
    /// Parse and validate a model.
    Check { model: PathBuf },
    /// Print the model as facts, JSON, or normalised COOM.
    Convert(ConvertArgs),
    /// Run the HTTP session service.
    Serve(ServeArgs),
}

#[derive(Args)]
struct SolveArgs {
    model: PathBuf,
    #[arg(short = 'u', long)]
    user_input: Option<PathBuf>,
    #[arg(short = 'o', long, value_enum, default_value = "coom")]
    output: Format,
    /// Models to print; 0 prints all.
    #[arg(short = 'm', long, default_value_t = 1)]
    models: usize,
    /// Raise the bound on `*` features until a model is found.
    #[arg(long)]
    incremental_bounds: bool,
    /// Bound on `*` features (the first one tried with --incremental-bounds).
    #[arg(long, default_value_t = 1)]
    bound_start: u32,
    #[arg(long, default_value_t = 1)]
    bound_step: u32,
    #[arg(long, default_value_t = 64)]
    bound_cap: u32,
    /// Sidecar of constraint explanations, used to explain conflicts.
    #[arg(long)]
    explanations: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertFormat {
    Facts,
    Json,
    Coom,
}

#[derive(Args)]
struct ConvertArgs {
    model: PathBuf,
    #[arg(short = 'o', long, value_enum, default_value = "facts")]
    output: ConvertFormat,
    /// Bound on `*` features.
    #[arg(long, default_value_t = 1)]
    max_bound: u32,
    #[arg(long)]
    explanations: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "COOMFORGE_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: std::net::IpAddr,
    /// Minutes a session may sit unused before it is dropped.
    #[arg(long, default_value_t = 30)]
    idle_minutes: u64,
    /// Bound on `*` features for new sessions.
    #[arg(long, default_value_t = 4)]
    max_bound: u32,
    /// Static UI assets to serve next to the API.
    #[arg(long)]
    static_dir: Option<PathBuf>,
}

/// A failure that ends the run with status 2.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// Diagnostics already formatted one per line.
    #[error("{0}")]
    Diagnostics(String),
    #[error("{0}")]
    Other(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn diagnostics<E: std::fmt::Display>(path: &Path, errors: &[E]) -> CliError {
    let mut out = String::new();
    for (i, e) in errors.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(out, "{}:{e}", path.display());
    }
    CliError::Diagnostics(out)
}

fn load_model(path: &Path) -> Result<CoomAst, CliError> {
    let ast = parse_model(&read(path)?).map_err(|e| diagnostics(path, &e.0))?;
    let errors = validate_ast(&ast);
    if !errors.is_empty() {
        return Err(diagnostics(path, &errors));
    }
    Ok(ast)
}

fn load_input(path: Option<&Path>) -> Result<Option<UserInputAst>, CliError> {
    path.map(|p| parse_user_input(&read(p)?).map_err(|e| diagnostics(p, &e.0)))
        .transpose()
}

fn load_sidecar(path: Option<&Path>, space: &ConfigurationSpace) -> Result<ExplanationMap, CliError> {
    let Some(path) = path else {
        return Ok(ExplanationMap::default());
    };
    let (map, ignored) =
        load_explanations(space, &read(path)?).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))?;
    for w in ignored {
        eprintln!("warning: {}: {w}", path.display());
    }
    Ok(map)
}

fn space_for(ast: &CoomAst, bound: u32) -> Result<ConfigurationSpace, CliError> {
    instantiate(ast, bound).map_err(|e| CliError::Other(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve(args) => run_solve(&args),
        Command::Check { model } => load_model(&model).map(|_| ExitCode::SUCCESS),
        Command::Convert(args) => run_convert(&args),
        Command::Serve(args) => run_serve(&args),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}

fn run_convert(args: &ConvertArgs) -> Result<ExitCode, CliError> {
    let ast = load_model(&args.model)?;
    if args.output == ConvertFormat::Coom {
        print!("{}", pretty_print(&ast));
        return Ok(ExitCode::SUCCESS);
    }
    let space = space_for(&ast, args.max_bound)?;
    let expl = args
        .explanations
        .as_deref()
        .map(|p| load_sidecar(Some(p), &space))
        .transpose()?;
    match args.output {
        ConvertFormat::Facts => print!("{}", serialize_facts_with(&space, expl.as_ref())),
        _ => println!("{:#}", space_to_json(&space, expl.as_ref())),
    }
    Ok(ExitCode::SUCCESS)
}

/// Where `solve` ended up.
struct Outcome {
    space: ConfigurationSpace,
    models: Vec<Model>,
    /// `(bound, satisfiable)` per incremental step.
    bounds: Vec<(u32, bool)>,
    /// Why there is no model, when there is none.
    unsat: Option<String>,
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode, CliError> {
    let ast = load_model(&args.model)?;
    let input = load_input(args.user_input.as_deref())?;
    let outcome = if args.incremental_bounds {
        solve_incremental(args, &ast, input.as_ref())?
    } else {
        let space = space_for(&ast, args.bound_start)?;
        let user = input.as_ref().map(|i| apply_user_input(&space, i)).unwrap_or_default();
        for w in &user.warnings {
            eprintln!("{w}");
        }
        let assumptions = user_assumptions(&user);
        let models = enumerate(&space, &assumptions, args.models);
        let unsat = if models.is_empty() {
            Some(explain_conflict(args, &space, &assumptions)?)
        } else {
            None
        };
        Outcome {
            space,
            models,
            bounds: Vec::new(),
            unsat,
        }
    };
    print_outcome(args.output, &outcome);
    if let Some(why) = &outcome.unsat {
        eprintln!("{why}");
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn solve_incremental(args: &SolveArgs, ast: &CoomAst, input: Option<&UserInputAst>) -> Result<Outcome, CliError> {
    let params = IncrementalBounds {
        start: args.bound_start,
        step: args.bound_step,
        cap: args.bound_cap,
    };
    let mut bounds = Vec::new();
    // Progress goes out as each bound finishes, before the final output.
    let coom = args.output == Format::Coom;
    let result = params.solve(ast, input, |bound, sat| {
        if coom {
            println!("// bound {bound}: {}", if sat { "satisfiable" } else { "unsatisfiable" });
        }
        bounds.push((bound, sat));
    });
    match result {
        Ok(found) => {
            for w in &found.warnings {
                eprintln!("{w}");
            }
            let models = if args.models == 1 {
                vec![found.model]
            } else {
                let user = input.map(|i| apply_user_input(&found.space, i)).unwrap_or_default();
                enumerate(&found.space, &user_assumptions(&user), args.models)
            };
            Ok(Outcome {
                space: found.space,
                models,
                bounds,
                unsat: None,
            })
        }
        Err(BoundsError::BadParameters) => Err(CliError::Other(BoundsError::BadParameters.to_string())),
        Err(BoundsError::Space(e)) => Err(CliError::Other(e.to_string())),
        Err(e) => {
            let last = bounds.last().map_or(args.bound_start, |b| b.0);
            Ok(Outcome {
                space: space_for(ast, last)?,
                models: Vec::new(),
                bounds,
                unsat: Some(e.to_string()),
            })
        }
    }
}

/// Names the user choices and constraints behind an unsatisfiable result.
fn explain_conflict(
    args: &SolveArgs,
    space: &ConfigurationSpace,
    assumptions: &[coomforge_core::Assumption],
) -> Result<String, CliError> {
    if assumptions.is_empty() {
        return Ok("the model has no valid configuration".to_string());
    }
    let expl = load_sidecar(args.explanations.as_deref(), space)?;
    let numbered: Vec<_> = assumptions.iter().cloned().enumerate().map(|(i, a)| (i as u64, a)).collect();
    let mus = match minimal_unsat_subset(space, &numbered, &space.boolean_constraint_ids(), &expl) {
        Ok(m) => m,
        Err(e) => return Ok(e.to_string()),
    };
    let mut out = String::from("conflict between:");
    for id in &mus.assumption_ids {
        let _ = write!(out, "\n  user input: {}", numbered[*id as usize].1.describe(space));
    }
    for (c, m) in mus.constraint_ids.iter().zip(&mus.messages) {
        let _ = write!(out, "\n  constraint {c}: {m}");
    }
    if mus.constraint_ids.is_empty() && mus.assumption_ids.len() < 2 {
        out.push_str("\n  (the choice alone has no valid configuration)");
    }
    Ok(out)
}

fn print_outcome(format: Format, o: &Outcome) {
    match format {
        Format::Coom => {
            for (i, m) in o.models.iter().enumerate() {
                println!("// solution {}", i + 1);
                print!("{}", output::model_coom(&o.space, m));
            }
            if o.unsat.is_some() {
                println!("// unsatisfiable");
            } else {
                println!("// models: {}", o.models.len());
            }
        }
        Format::Facts => {
            for (bound, sat) in &o.bounds {
                println!("% bound {bound}: {}", if *sat { "satisfiable" } else { "unsatisfiable" });
            }
            for (i, m) in o.models.iter().enumerate() {
                println!("% solution {}", i + 1);
                print!("{}", output::model_facts(&o.space, m));
            }
            println!("% models: {}", o.models.len());
        }
        Format::Json => {
            let doc = json!({
                "satisfiable": o.unsat.is_none(),
                "bounds": o.bounds.iter().map(|(b, s)| json!({ "bound": b, "satisfiable": s })).collect::<Vec<_>>(),
                "models": o.models.iter().map(|m| output::model_json(&o.space, m)).collect::<Vec<_>>(),
            });
            println!("{doc:#}");
        }
    }
}

fn run_serve(args: &ServeArgs) -> Result<ExitCode, CliError> {
    let config = ServiceConfig {
        idle_timeout: Duration::from_secs(args.idle_minutes * 60),
        max_bound: args.max_bound,
        static_dir: args.static_dir.clone(),
    };
    let addr = SocketAddr::new(args.host, args.port);
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|e| CliError::Other(format!("cannot listen on {addr}: {e}")))?;
        eprintln!("listening on http://{}", listener.local_addr().map_err(|e| CliError::Other(e.to_string()))?);
        coomforge_service::serve(listener, config)
            .await
            .map_err(|e| CliError::Other(e.to_string()))
    })?;
    Ok(ExitCode::SUCCESS)
}
