use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dematel_ism::micmac::ThresholdMode;
use dematel_ism::report::{
    emit_report, load_adjacency, load_factor_catalog, load_reachability, load_surveys, run_pipeline,
    AnalysisConfig, AnalysisSettings, InputSource, LambdaChoice, ReportError,
};

/// DEMATEL, ISM and MICMAC analysis of factor-influence systems.
#[derive(Parser)]
#[command(name = "dematel-ism", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write all tables into --out.
    Analyze(AnalyzeArgs),
    /// Load and check the inputs without running the analysis.
    Validate(ValidateArgs),
}

#[derive(Args)]
#[group(id = "input", multiple = false)]
struct InputArgs {
    /// Expert survey matrices (CSV with factor codes on both axes).
    #[arg(long, num_args = 1.., group = "input")]
    surveys: Vec<PathBuf>,
    /// Binary direct-influence matrix; skips DEMATEL.
    #[arg(long, group = "input")]
    adjacency: Option<PathBuf>,
    /// Reflexive, transitive 0/1 reachability matrix; skips DEMATEL and closure.
    #[arg(long, group = "input")]
    reachability: Option<PathBuf>,
}

impl InputArgs {
    fn source(self) -> Option<InputSource> {
        if let Some(p) = self.adjacency {
            Some(InputSource::Adjacency(p))
        } else if let Some(p) = self.reachability {
            Some(InputSource::Reachability(p))
        } else if !self.surveys.is_empty() {
            Some(InputSource::Surveys(self.surveys))
        } else {
            None
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Factor catalog CSV (code,group,name,description).
    #[arg(long)]
    factors: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Threshold on total influence for ISM adjacency, or "auto" for mean + std.
    #[arg(long)]
    lambda: Option<LambdaChoice>,
    /// Quadrant cuts: mean, midpoint, or <driving>,<dependence>.
    #[arg(long, default_value = "mean")]
    micmac_cuts: ThresholdMode,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Decimals in numeric output.
    #[arg(long, default_value_t = 3)]
    precision: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    factors: PathBuf,
    #[command(flatten)]
    input: InputArgs,
}

fn analyze(args: AnalyzeArgs) -> Result<(), ReportError> {
    let input = args
        .input
        .source()
        .ok_or_else(|| ReportError::Config("one of --surveys, --adjacency or --reachability is required".into()))?;
    let config = AnalysisConfig {
        factors: args.factors,
        input,
        settings: AnalysisSettings {
            lambda: args.lambda,
            micmac_mode: args.micmac_cuts,
            tol: args.tol,
            precision: args.precision,
        },
        out_dir: args.out,
    };
    let report = run_pipeline(&config)?;
    let written = emit_report(&report, &config.out_dir)?;
    println!(
        "{} factors, {} levels; wrote {} files to {}",
        report.catalog.len(),
        report.levels.len(),
        written.len(),
        config.out_dir.display()
    );
    Ok(())
}

fn validate(args: ValidateArgs) -> Result<(), ReportError> {
    let catalog = load_factor_catalog(&args.factors)?;
    println!(
        "{}: {} factors in {} groups",
        args.factors.display(),
        catalog.len(),
        catalog.groups().len()
    );
    match args.input.source() {
        Some(InputSource::Surveys(paths)) => {
            let surveys = load_surveys(&paths, &catalog)?;
            println!("{} surveys ok", surveys.len());
        }
        Some(InputSource::Adjacency(p)) => {
            let a = load_adjacency(&p, &catalog)?;
            println!("{}: adjacency ok, {} edges", p.display(), a.entries().count_ones());
        }
        Some(InputSource::Reachability(p)) => {
            let m = load_reachability(&p, &catalog)?;
            println!("{}: reachability ok, {} reachable pairs", p.display(), m.entries().count_ones());
        }
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Validate(args) => validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
