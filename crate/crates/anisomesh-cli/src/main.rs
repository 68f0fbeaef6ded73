//! Command line driver: adaptive experiments, formula cross-checks, and
//! SVG rendering of stored meshes.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use anisomesh::experiment::{run_experiment, ExampleId, ExperimentSpec};
use anisomesh::interp_error::equivalence_check;
use anisomesh::mesh::{read_medit, read_sol_scalar};
use anisomesh::svg::render_svg;
use anisomesh::{Error, MetricKind};

#[derive(Parser)]
#[command(
    name = "anisomesh",
    version,
    about = "Anisotropic mesh adaptation for 2D finite element problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one adaptive experiment and write its artifacts.
    Run(RunArgs),
    /// Cross-check the interpolation error formulas against quadrature.
    Formulas {
        /// Number of random (Hessian, triangle) trials.
        #[arg(long, default_value_t = 10_000)]
        check: usize,
    },
    /// Render a stored mesh, optionally shaded by a solution, to SVG.
    Render(RenderArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Reference problem: ex1, ex2 or ex3.
    #[arg(long)]
    example: ExampleId,
    /// Metric kind: new-h1, new-l2, mod-hessian, huang-h1 or huang-l2.
    #[arg(long)]
    metric: MetricKind,
    /// Target number of elements.
    #[arg(long)]
    nbt: usize,
    /// Number of adaptation iterations.
    #[arg(long, default_value_t = 10)]
    iters: usize,
    /// Diffusion coefficient for ex1.
    #[arg(long)]
    kappa: Option<f64>,
    /// Layer sharpness for ex2.
    #[arg(long)]
    alpha: Option<f64>,
    /// Corner-layer exponent for ex3.
    #[arg(long)]
    beta: Option<f64>,
    /// Explicit flooring for the L² metrics.
    #[arg(long)]
    alpha0: Option<f64>,
    /// Explicit flooring for the H¹ and Hessian metrics.
    #[arg(long)]
    alpha1: Option<f64>,
    /// Output directory for report.csv and per-iteration artifacts.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RenderArgs {
    /// Mesh file in Medit format.
    mesh: PathBuf,
    /// Optional vertex scalar field in Medit .sol format.
    sol: Option<PathBuf>,
    /// Output SVG path.
    #[arg(short, long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::SolverBreakdown { .. } | Error::AdaptAborted { .. } => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: Cli) -> anisomesh::Result<()> {
    match cli.command {
        Command::Run(args) => run(args),
        Command::Formulas { check } => formulas(check),
        Command::Render(args) => render(args),
    }
}

fn run(args: RunArgs) -> anisomesh::Result<()> {
    let mut spec = ExperimentSpec::new(args.example, args.metric, args.nbt, args.out);
    spec.iterations = args.iters;
    if let Some(kappa) = args.kappa {
        spec.kappa = kappa;
    }
    if let Some(alpha) = args.alpha {
        spec.alpha = alpha;
    }
    if let Some(beta) = args.beta {
        spec.beta = beta;
    }
    spec.alpha0 = args.alpha0;
    spec.alpha1 = args.alpha1;

    let report = run_experiment(&spec)?;
    print!("{}", report.to_csv());
    eprintln!("artifacts written to {}", spec.out_dir.display());
    Ok(())
}

fn formulas(trials: usize) -> anisomesh::Result<()> {
    let dev = equivalence_check(trials, 0);
    println!("trials: {trials}");
    println!("h1 closed forms against each other: {:.3e}", dev.h1_forms);
    println!("h1 closed form against quadrature:  {:.3e}", dev.h1_oracle);
    println!("l2 closed form against quadrature:  {:.3e}", dev.l2_oracle);
    println!("max relative deviation: {:.3e}", dev.max());
    Ok(())
}

fn render(args: RenderArgs) -> anisomesh::Result<()> {
    let mesh = read_medit(&args.mesh).map_err(|e| annotate(e, &args.mesh))?;
    let field = match &args.sol {
        Some(path) => {
            let f = read_sol_scalar(path).map_err(|e| annotate(e, path))?;
            f.check_bound(&mesh)?;
            Some(f)
        }
        None => None,
    };
    std::fs::write(&args.out, render_svg(&mesh, field.as_ref()))?;
    eprintln!("wrote {}", args.out.display());
    Ok(())
}

/// Attach the offending path to bare IO errors.
fn annotate(e: Error, path: &std::path::Path) -> Error {
    match e {
        Error::Io(io) => Error::Io(std::io::Error::new(
            io.kind(),
            format!("{}: {io}", path.display()),
        )),
        other => other,
    }
}
