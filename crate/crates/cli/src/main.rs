use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coloc_cli::commands::{cmd_equivariant, cmd_lc, cmd_page, cmd_triangle, timed};
use coloc_cli::corpus::{cmd_check, suite_config};
use coloc_cli::job::{parse_window, BuilderSpec, JobSpec, TargetSpec};
use coloc_cli::suite::SuiteConfig;
use coloc_cli::{CliError, Format, Report};

/// Local cohomology, colocalization triangles and E2-pages in exact arithmetic.
#[derive(Parser)]
#[command(name = "coloc", version)]
struct Cli {
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: FormatArg,
    /// Leave wall time out of the report.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Machine,
}

#[derive(Args)]
struct JobArgs {
    /// Job file (JSON).
    job: PathBuf,
    /// Internal degree window, e.g. `-40:0`.
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    #[arg(long)]
    max_power: Option<u32>,
    #[arg(long)]
    stable_steps: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Local cohomology groups in the window.
    Lc(JobArgs),
    /// Cellular part, module and null part with the long exact sequence checked.
    Triangle(JobArgs),
    /// E2-page, collapse by position and the abutment.
    Page {
        #[command(flatten)]
        job: JobArgs,
        /// Target table (JSON) overriding the job's own.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// E2-page of a built-in equivariant example.
    Equivariant {
        /// Builder parameters (JSON); flags below override them.
        params: Option<PathBuf>,
        #[arg(long)]
        builder: Option<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
    },
    /// Golden corpus and the randomized invariant suites.
    Check {
        /// Suite configuration (JSON); the bundled one by default.
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_job(args: &JobArgs) -> Result<JobSpec, CliError> {
    let mut spec = JobSpec::from_json(&read(&args.job)?)?;
    if let Some(w) = &args.window {
        spec.window = parse_window(w)?;
    }
    if let Some(p) = args.max_power {
        spec.policy.max_power = p;
    }
    if let Some(s) = args.stable_steps {
        spec.policy.stable_steps = s;
    }
    Ok(spec)
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("COLOC_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Validation(format!("COLOC_THREADS=`{raw}` is not a positive integer"))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    configure_threads()?;
    let go = |f: &dyn Fn() -> Result<Report, CliError>| {
        if cli.no_timing {
            f()
        } else {
            timed(f)
        }
    };
    match &cli.command {
        Command::Lc(args) => {
            let spec = load_job(args)?;
            go(&|| cmd_lc(&spec))
        }
        Command::Triangle(args) => {
            let spec = load_job(args)?;
            go(&|| cmd_triangle(&spec))
        }
        Command::Page { job, target } => {
            let spec = load_job(job)?;
            let target: Option<TargetSpec> = match target {
                Some(path) => Some(
                    serde_json::from_str(&read(path)?)
                        .map_err(|e| CliError::Validation(format!("target file: {e}")))?,
                ),
                None => None,
            };
            go(&|| cmd_page(&spec, target.as_ref()))
        }
        Command::Equivariant {
            params,
            builder,
            n,
            window,
        } => {
            let mut spec = match params {
                Some(path) => BuilderSpec::from_json(&read(path)?)?,
                None => BuilderSpec {
                    builder: String::new(),
                    n: 0,
                    window: parse_window("-20:10")?,
                },
            };
            if let Some(b) = builder {
                spec.builder = b.clone();
            }
            if let Some(n) = n {
                spec.n = *n;
            }
            if let Some(w) = window {
                spec.window = parse_window(w)?;
            }
            go(&|| cmd_equivariant(&spec))
        }
        Command::Check { config } => {
            let cfg = match config {
                Some(path) => SuiteConfig::from_json(&read(path)?)?,
                None => suite_config(),
            };
            let mut r = cmd_check(&cfg);
            if cli.no_timing {
                r.seconds = None;
            }
            Ok(r)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Text => Format::Text,
        FormatArg::Machine => Format::Machine,
    };
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(format));
            ExitCode::from(report.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
