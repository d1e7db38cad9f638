use clap::{Parser, Subcommand};
use matrix_obstruction::cli::{cmd_compute, cmd_examples, RunConfig};
use matrix_obstruction::tol::Tolerances;

/// Decide unitary equivalence of normal matrix fields over triangulated
/// spaces via a twisted-cohomology obstruction class.
#[derive(Parser)]
#[command(name = "matrix-obstruction", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named end-to-end scenario ("circle", "cp1_chern",
    /// "twisted_circle", "mapping_torus", or "all") with pinned expected
    /// outputs; exits nonzero on mismatch.
    Examples {
        /// Scenario name or "all".
        name: String,
    },
    /// Compute the obstruction report for a (complex, field, field) triple.
    Compute {
        /// Complex spec: builtin string (e.g. builtin:circle:m=12) or a path
        /// to a complex file.
        #[arg(long)]
        complex: String,
        /// First field spec, e.g. builtin:cp1_projection:k=2.
        #[arg(long)]
        field_a: String,
        /// Second field spec.
        #[arg(long)]
        field_b: String,
        /// Output path for the JSON report (stdout when omitted).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        /// Minimal eigenvalue gap (absolute).
        #[arg(long)]
        tol_gap: Option<f64>,
        /// Relative normality tolerance.
        #[arg(long)]
        tol_norm: Option<f64>,
        /// Frame-matching threshold for edge transport (must stay < 1/2).
        #[arg(long)]
        match_threshold: Option<f64>,
        /// Maximal automatic subdivision retries.
        #[arg(long)]
        max_subdiv: Option<u32>,
        /// Default seed injected into `conjugated` field specs lacking one.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (defaults to the rayon global pool).
        #[arg(long)]
        jobs: Option<usize>,
    },
}

fn main() {
    let args = Args::parse();
    let code = match args.command {
        Command::Examples { name } => cmd_examples(&name, &Tolerances::default()),
        Command::Compute {
            complex,
            field_a,
            field_b,
            out,
            tol_gap,
            tol_norm,
            match_threshold,
            max_subdiv,
            seed,
            jobs,
        } => {
            let mut tolerances = Tolerances::default();
            if let Some(g) = tol_gap {
                tolerances.gap = g;
            }
            if let Some(n) = tol_norm {
                tolerances.normality = n;
            }
            if let Some(m) = match_threshold {
                tolerances.match_threshold = m;
            }
            if let Some(s) = max_subdiv {
                tolerances.max_subdiv_retries = s;
            }
            let cfg = RunConfig {
                complex,
                field_a,
                field_b,
                out,
                tolerances,
                seed,
                jobs,
            };
            cmd_compute(&cfg)
        }
    };
    std::process::exit(code);
}
