use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use hilbert_lab::commands::{run_command, Command};
use hilbert_lab::scene::parse_scene;

/// Hilbert geometry experiments driven by JSON scene files.
#[derive(Parser, Debug)]
#[command(name = "hilbert-lab", version)]
struct Args {
    /// One of: distance, orbit, limitset, core, isolation, quotient, checks, plot.
    command: String,
    #[arg(long)]
    scene: PathBuf,
    /// Report destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG destination; `plot` writes to stdout after the report when absent.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long)]
    word_len: Option<usize>,
    #[arg(long)]
    r: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
}

fn run(args: Args) -> Result<i32, String> {
    if let Ok(n) = std::env::var("HILBERT_LAB_THREADS") {
        let n: usize = n
            .parse()
            .map_err(|_| format!("HILBERT_LAB_THREADS must be a positive integer, got `{n}`"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string())?;
    }
    let command: Command = args.command.parse().map_err(|e| format!("{e}"))?;
    let text = std::fs::read_to_string(&args.scene)
        .map_err(|e| format!("{}: {e}", args.scene.display()))?;
    let mut scene = parse_scene(&text).map_err(|e| e.to_string())?;
    if let Some(n) = args.word_len {
        scene.config.word_len = n;
    }
    if let Some(r) = args.r {
        scene.config.r = r;
    }
    if let Some(w) = args.window {
        scene.config.window = w;
    }
    if let Some(s) = args.seed {
        scene.config.seed = s;
    }
    let start = Instant::now();
    let outcome = run_command(&scene, command, args.svg.is_some()).map_err(|e| e.to_string())?;
    eprintln!(
        "{} finished in {:.3}s",
        command.name(),
        start.elapsed().as_secs_f64()
    );
    let json = outcome.report.to_json();
    match &args.out {
        Some(p) => std::fs::write(p, &json).map_err(|e| format!("{}: {e}", p.display()))?,
        None => print!("{json}"),
    }
    if let Some(svg) = &outcome.svg {
        match &args.svg {
            Some(p) => std::fs::write(p, svg).map_err(|e| format!("{}: {e}", p.display()))?,
            None => print!("{svg}"),
        }
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
