use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};

use strata::metatheory::run_all_with;
use strata::movecheck::run_checks;
use strata::proofdoc::{check_document, parse_document, report_text};
use strata::random::Limits;
use strata::render::{project, scene_to_svg};
use strata_service::{router, Session, Sessions};

#[derive(Parser)]
#[command(name = "strata", version, about = "Diagram rewriting kernel and proof checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Serve sessions over HTTP on localhost.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Open a session on this document at startup.
        #[arg(long)]
        doc: Option<PathBuf>,
    },
    /// Replay a document's proof and print the per-step report.
    Check { file: PathBuf },
    /// Draw a named diagram of a document as SVG.
    Render {
        file: PathBuf,
        #[arg(long)]
        diagram: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the randomized law and move checks.
    Fuzz {
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 500)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn read(path: &PathBuf) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn check(file: &PathBuf) -> anyhow::Result<bool> {
    let doc = parse_document(&read(file)?)?;
    let report = check_document(&doc);
    print!("{}", report_text(&report));
    Ok(report.ok())
}

fn render(file: &PathBuf, name: &str, output: Option<&PathBuf>) -> anyhow::Result<()> {
    let doc = parse_document(&read(file)?)?;
    let d = doc.diagrams.get(name).ok_or_else(|| anyhow!("no diagram named `{name}`"))?;
    let svg = scene_to_svg(&project(&doc.signature, d)?);
    match output {
        Some(p) => std::fs::write(p, svg).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{svg}"),
    }
    Ok(())
}

fn fuzz(max_dim: usize, cases: usize, seed: u64) -> bool {
    let limits = Limits { max_dim: max_dim.max(1), ..Limits::default() };
    let mut ok = true;
    for r in run_all_with(seed, cases, limits) {
        ok &= r.failures.is_empty();
        println!("{:<55} {:>5} cases {:>3} failures {:>10.2?}", r.name, r.cases, r.failures.len(), r.elapsed);
        for (i, msg) in r.failures.iter().take(3) {
            println!("  case {i}: {msg}");
        }
    }
    for r in run_checks(seed, cases) {
        ok &= r.failures.is_empty();
        println!("{:<55} {:>5} cases {:>3} failures {:>10.2?}", r.name, r.cases, r.failures.len(), r.elapsed);
        for (s, msg) in r.failures.iter().take(3) {
            println!("  seed {s}: {msg}");
        }
    }
    ok
}

async fn serve(port: u16, doc: Option<PathBuf>) -> anyhow::Result<()> {
    let sessions = Arc::new(Sessions::default());
    if let Some(path) = doc {
        let session = Session::open(&read(&path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
        let id = sessions.insert(session);
        tracing::info!(session = %id, doc = %path.display(), "opened session");
    }
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, router(sessions)).await?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Serve { port, doc } => {
            tracing_subscriber::fmt().init();
            tokio::runtime::Runtime::new().map_err(anyhow::Error::from).and_then(|rt| rt.block_on(serve(port, doc))).map(|_| true)
        }
        Command::Check { file } => check(&file),
        Command::Render { file, diagram, output } => render(&file, &diagram, output.as_ref()).map(|_| true),
        Command::Fuzz { max_dim, cases, seed } => Ok(fuzz(max_dim, cases, seed)),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
