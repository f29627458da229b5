use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use clustercc_cli::commands::{self, Output};
use clustercc_cli::io::{read_json, CliError, CliResult};
use clustercc_cli::session::{Session, SessionJson};
use clustercc_core::rep::ChiMethod;
use clustercc_core::surface::MarkedSurface;
use clustercc_core::verify::SuiteConfig;

#[derive(Parser)]
#[command(
    name = "clustercc",
    version,
    about = "Exact cluster algebra, QP and CC-function computations"
)]
struct Cli {
    /// Print results as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Path-length truncation for QPs whose file omits `p`.
    #[arg(long, global = true, env = "CLUSTERCC_TRUNCATION")]
    truncation: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mutate an exchange matrix along a sequence of vertices.
    MutateMatrix {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seq: Vec<usize>,
    },
    /// Mutate a seed (or the initial seed of a matrix).
    MutateSeed {
        #[arg(long, conflicts_with = "seed")]
        matrix: Option<PathBuf>,
        #[arg(long)]
        seed: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "")]
        seq: Vec<usize>,
    },
    /// Entry j of the cluster reached by a mutation sequence.
    ClusterVar {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "")]
        seq: Vec<usize>,
        #[arg(long)]
        j: usize,
    },
    /// Mutate a QP at k: premutation followed by reduction.
    QpMutate {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Mutate a decorated representation at k.
    RepMutate {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// g-vector, restricted and (with --ext) extended.
    GVector {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        ext: Option<PathBuf>,
        #[arg(long)]
        rep: PathBuf,
    },
    /// E-invariant E(M), or E(M, N) with --other.
    EInvariant {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long)]
        other: Option<PathBuf>,
    },
    /// CC function; with --ext the coefficients come from the extended QP.
    Cc {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        ext: Option<PathBuf>,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// F-polynomial.
    FPoly {
        #[arg(long)]
        qp: PathBuf,
        #[arg(long)]
        rep: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
    },
    /// Whether Ker(B) meets the nonnegative orthant only at zero.
    KernelCone {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Compare two integer vectors in the order induced by B.
    OrderCompare {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        a: Vec<i64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        b: Vec<i64>,
        /// Entry bound for the integer cone search.
        #[arg(long, default_value_t = 10)]
        bound: u64,
    },
    /// Report the five matrix conditions and their implications.
    Conditions {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Signed adjacency matrix of a triangulation.
    SurfaceB {
        #[arg(long)]
        triangulation: PathBuf,
    },
    /// Build a triangulation with trivial kernel cone, with its certificate.
    SurfaceBuild {
        #[arg(long, default_value_t = 0)]
        genus: usize,
        /// Marked points on each boundary component.
        #[arg(long, value_delimiter = ',', required = true)]
        boundary: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        punctures: usize,
        /// Base triangulation with one marked point per boundary component.
        #[arg(long)]
        base: Option<PathBuf>,
    },
    /// Validate a triangulation and check the corank formula.
    SurfaceCheck {
        #[arg(long)]
        triangulation: PathBuf,
    },
    /// Bypasses of a gentle QP (or of a triangulation's QP) and their column identities.
    BypassScan {
        #[arg(long, conflicts_with = "triangulation")]
        qp: Option<PathBuf>,
        #[arg(long)]
        triangulation: Option<PathBuf>,
    },
    /// Run the randomized property suites.
    Verify {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[arg(long, default_value_t = 6)]
        max_dim: usize,
    },
    /// Serve a mutation session over JSON/HTTP.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        /// Session file; defaults to the two-triangle example.
        #[arg(long)]
        session: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Method {
    Auto,
    Fixedpoint,
    Pointcount,
}

impl From<Method> for ChiMethod {
    fn from(m: Method) -> Self {
        match m {
            Method::Auto => ChiMethod::Auto,
            Method::Fixedpoint => ChiMethod::Fixedpoint,
            Method::Pointcount => ChiMethod::Pointcount,
        }
    }
}

fn run(cli: &Cli) -> CliResult<Output> {
    let p = cli.truncation;
    match &cli.command {
        Command::MutateMatrix { matrix, seq } => commands::mutate_matrix(matrix, seq),
        Command::MutateSeed { matrix, seed, seq } => {
            commands::mutate_seed(matrix.as_deref(), seed.as_deref(), seq)
        }
        Command::ClusterVar { matrix, seq, j } => commands::cluster_var(matrix, seq, *j),
        Command::QpMutate { qp, k } => commands::qp_mutate(qp, *k, p),
        Command::RepMutate { qp, rep, k } => commands::rep_mutate(qp, rep, *k, p),
        Command::GVector { qp, ext, rep } => commands::g_vector(qp, ext.as_deref(), rep, p),
        Command::EInvariant { qp, rep, other } => commands::e_inv(qp, rep, other.as_deref(), p),
        Command::Cc {
            qp,
            ext,
            rep,
            method,
        } => commands::cc(qp, ext.as_deref(), rep, (*method).into(), p),
        Command::FPoly { qp, rep, method } => commands::f_poly(qp, rep, (*method).into(), p),
        Command::KernelCone { matrix } => commands::kernel_cone(matrix),
        Command::OrderCompare {
            matrix,
            a,
            b,
            bound,
        } => commands::order_cmp(matrix, a, b, *bound),
        Command::Conditions { matrix } => commands::conditions(matrix),
        Command::SurfaceB { triangulation } => commands::surface_b(triangulation),
        Command::SurfaceBuild {
            genus,
            boundary,
            punctures,
            base,
        } => {
            let s = MarkedSurface {
                genus: *genus,
                boundary: boundary.clone(),
                punctures: *punctures,
            };
            commands::surface_build(&s, base.as_deref())
        }
        Command::SurfaceCheck { triangulation } => commands::surface_check(triangulation),
        Command::BypassScan { qp, triangulation } => {
            commands::bypass_scan(qp.as_deref(), triangulation.as_deref(), p)
        }
        Command::Verify {
            seed,
            reps,
            max_dim,
        } => commands::verify(&SuiteConfig {
            seed: *seed,
            reps: *reps,
            max_total_dim: *max_dim,
        }),
        Command::Serve { .. } => unreachable!("handled in main"),
    }
}

fn serve(port: u16, session: Option<&PathBuf>, truncation: Option<usize>) -> CliResult<()> {
    let j: SessionJson = match session {
        Some(path) => read_json(path)?,
        None => clustercc_cli::default_session(),
    };
    let s = Session::load(&j, truncation)?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::new("Io", e.to_string()))?;
    rt.block_on(clustercc_cli::serve::serve(s, port, truncation))
        .map_err(|e| CliError::new("Io", e.to_string()))
}

fn fail(cli_json: bool, e: &CliError) -> ExitCode {
    if cli_json {
        println!("{}", serde_json::to_string(e).expect("error serializes"));
    } else {
        eprintln!("error: {e}");
        println!("{}", serde_json::to_string(e).expect("error serializes"));
    }
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Serve { port, session } = &cli.command {
        return match serve(*port, session.as_ref(), cli.truncation) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(cli.json, &e),
        };
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.json).expect("output serializes")
                );
            } else {
                println!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(cli.json, &e),
    }
}
