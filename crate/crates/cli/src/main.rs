//! Command-line front end: single runs and convergence studies.
//!
//! Exit codes: 0 on success, 2 on a configuration/validation error, 3 when a
//! run blows up (partial output is still written), 1 on I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use weakrbf::runner::{convergence_study, run, RunConfig};
use weakrbf::Error;

#[derive(Parser)]
#[command(
    name = "weakrbf",
    about = "Mesh-free RBF solvers for hyperbolic conservation laws",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single run and write solution.csv, series.csv and summary.json.
    Run(RunArgs),
    /// Run a refinement study over several node counts and write convergence.csv.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Problem name: advect-gauss | advect-cos2 | euler-smooth | advect-2d.
    #[arg(long)]
    problem: Option<String>,

    /// Boundary condition: periodic | inflow.
    #[arg(long)]
    bc: Option<String>,

    /// Discretization: strong | weak-analytical | weak-collocation.
    #[arg(long)]
    method: Option<String>,

    /// Kernel: gaussian | mq | iq | cubic | quintic | phs:`<k>` | phslog:`<k>`.
    #[arg(long)]
    kernel: Option<String>,

    /// Shape parameter for the smooth kernels (rejected for polyharmonic ones).
    #[arg(long)]
    eps: Option<f64>,

    /// Polynomial count P (degree P-1 is reproduced).
    #[arg(long = "P")]
    poly: Option<usize>,

    /// Number of nodes.
    #[arg(long = "N")]
    n: Option<usize>,

    /// Node placement: equidistant | random:`<seed>` | file:`<path>`.
    #[arg(long)]
    nodes: Option<String>,

    /// Assembly quadrature: trapezoid:J | gauss:J | lobatto:J | reference.
    #[arg(long)]
    quadrature: Option<String>,

    /// Numerical flux: upwind | godunov | central | rusanov.
    #[arg(long)]
    flux: Option<String>,

    /// CFL constant.
    #[arg(long)]
    cfl: Option<f64>,

    /// Final time.
    #[arg(long)]
    tend: Option<f64>,

    /// Time scheme: ssprk33 | euler.
    #[arg(long)]
    scheme: Option<String>,

    /// Comma-separated snapshot times.
    #[arg(long)]
    snapshots: Option<String>,

    /// Strong-method boundary enforcement: none | inject-inflow | inject-periodic.
    #[arg(long)]
    boundary_mode: Option<String>,

    /// Output directory for CSV/JSON files.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Also write a text dump of the assembled operators.
    #[arg(long)]
    dump_operators: bool,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    run: RunArgs,

    /// Comma-separated node counts, e.g. 20,40,80,160.
    #[arg(long = "Ns")]
    ns: String,
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, Error> {
        let mut config = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| -> Result<(), Error> {
            if let Some(v) = value {
                config.set(key, &v)?;
            }
            Ok(())
        };
        set("problem", self.problem)?;
        set("bc", self.bc)?;
        set("method", self.method)?;
        set("kernel", self.kernel)?;
        set("eps", self.eps.map(|v| v.to_string()))?;
        set("P", self.poly.map(|v| v.to_string()))?;
        set("N", self.n.map(|v| v.to_string()))?;
        set("nodes", self.nodes)?;
        set("quadrature", self.quadrature)?;
        set("flux", self.flux)?;
        set("cfl", self.cfl.map(|v| v.to_string()))?;
        set("tend", self.tend.map(|v| v.to_string()))?;
        set("scheme", self.scheme)?;
        set("snapshots", self.snapshots)?;
        set("boundary_mode", self.boundary_mode)?;
        if let Some(out) = self.out {
            config.out_dir = Some(out);
        }
        if self.dump_operators {
            config.dump_operators = true;
        }
        Ok(config)
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let config = match args.into_config() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code_for(&e));
                }
            };
            match run(&config) {
                Ok(outcome) => {
                    if let Some(info) = outcome.summary.blow_up {
                        eprintln!(
                            "blow-up at t = {:.6e} (stage {}); partial output written",
                            info.t, info.stage
                        );
                        return ExitCode::from(3);
                    }
                    println!(
                        "finished: {} steps, dt = {:.6e}, tau_q = {:.3e}",
                        outcome.summary.steps, outcome.summary.dt, outcome.summary.tau_q
                    );
                    if let Some((inf, two)) = outcome.summary.final_errors {
                        println!("errors: inf = {inf:.6e}, l2 = {two:.6e}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code_for(&e))
                }
            }
        }
        Command::Converge(args) => {
            let ns: Result<Vec<usize>, _> = args
                .ns
                .split(',')
                .map(|t| t.trim().parse::<usize>())
                .collect();
            let ns = match ns {
                Ok(ns) => ns,
                Err(_) => {
                    eprintln!("error: bad node-count list '{}'", args.ns);
                    return ExitCode::from(2);
                }
            };
            let config = match args.run.into_config() {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(exit_code_for(&e));
                }
            };
            match convergence_study(&config, &ns) {
                Ok(table) => {
                    println!("N,err_inf,err_2,order_inf,order_2");
                    for row in &table.rows {
                        println!(
                            "{},{:.6e},{:.6e},{},{}",
                            row.n,
                            row.err_inf,
                            row.err_2,
                            row.order_inf.map(|o| format!("{o:.3}")).unwrap_or_default(),
                            row.order_2.map(|o| format!("{o:.3}")).unwrap_or_default(),
                        );
                    }
                    println!(
                        "fit,,,{},{}",
                        table
                            .fit_order_inf
                            .map(|o| format!("{o:.3}"))
                            .unwrap_or_default(),
                        table
                            .fit_order_2
                            .map(|o| format!("{o:.3}"))
                            .unwrap_or_default(),
                    );
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    match e {
                        Error::BlowUp { .. } => ExitCode::from(3),
                        _ => ExitCode::from(exit_code_for(&e)),
                    }
                }
            }
        }
    }
}
