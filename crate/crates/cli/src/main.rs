use std::path::PathBuf;

use clap::{Parser, Subcommand};

use freefactor_cli::commands::{
    cmd_constancy, cmd_gog, cmd_homcount, cmd_measure, cmd_primitive, cmd_scan, cmd_selftest,
    CmdResult,
};
use freefactor_cli::job::{resolve_catalog, JobSpec};
use freefactor_cli::EXIT_ERROR;

/// Free-factor detection for free and virtually free groups via exact
/// homomorphism counting into finite witness groups.
#[derive(Parser)]
#[command(name = "freefactor", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON input file (schema depends on the subcommand)
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Comma-separated witness group names (default: built-in catalog)
    #[arg(long, global = true, conflicts_with = "max_order")]
    catalog: Option<String>,

    /// Keep only witness groups of at most this order
    #[arg(long, global = true)]
    max_order: Option<usize>,

    /// Backtracking node budget per counting run
    #[arg(long, global = true, default_value_t = 1_000_000_000)]
    budget_nodes: u64,

    /// Worker thread count (default: all cores, or FREEFACTOR_WORKERS)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Emit a single JSON document instead of tables
    #[arg(long, global = true)]
    json: bool,

    /// Cache directory for counting results (or FREEFACTOR_CACHE)
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Seed for generated corpora (selftest only)
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Count homomorphisms (or epimorphisms) under word constraints
    Homcount,
    /// Extension-count table of one witness group over Hom(H, P)
    Constancy,
    /// Walk the catalog for a witness refuting "H is a free factor"
    Scan,
    /// Whitehead primitivity verdict, cross-reported with the scan
    Primitive,
    /// Validate/normalize a graph of groups and present its fundamental group
    Gog,
    /// Word-value distribution and fixed-point statistics
    Measure,
    /// Run the built-in invariant suite at desk scale
    Selftest,
}

fn build_job(cli: &Cli) -> anyhow::Result<JobSpec> {
    let catalog = resolve_catalog(cli.catalog.as_deref(), cli.max_order)?;
    let cache_dir = cli
        .cache
        .clone()
        .or_else(|| std::env::var_os("FREEFACTOR_CACHE").map(PathBuf::from));
    let workers = cli.workers.or_else(|| {
        std::env::var("FREEFACTOR_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    let job = JobSpec {
        input: cli.input.clone(),
        catalog,
        budget_nodes: cli.budget_nodes,
        budget_wall: None,
        json: cli.json,
        workers,
        cache_dir,
        seed: cli.seed,
    };
    job.validate()?;
    Ok(job)
}

fn main() {
    let cli = Cli::parse();
    let exit = run(&cli);
    std::process::exit(exit);
}

fn run(cli: &Cli) -> i32 {
    let job = match build_job(cli) {
        Ok(job) => job,
        Err(e) => return fail(cli.json, &e),
    };
    if let Some(workers) = job.workers {
        // a failure here means a pool already exists, which is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global();
    }
    let result = match cli.command {
        Command::Homcount => cmd_homcount(&job),
        Command::Constancy => cmd_constancy(&job),
        Command::Scan => cmd_scan(&job),
        Command::Primitive => cmd_primitive(&job),
        Command::Gog => cmd_gog(&job),
        Command::Measure => cmd_measure(&job),
        Command::Selftest => cmd_selftest(&job),
    };
    match result {
        Ok(CmdResult {
            json,
            human,
            exit_code,
        }) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&json).expect("report serializes"));
            } else {
                print!("{human}");
            }
            exit_code
        }
        Err(e) => fail(cli.json, &e),
    }
}

fn fail(json: bool, e: &anyhow::Error) -> i32 {
    if json {
        let doc = serde_json::json!({"error": format!("{e:#}")});
        println!("{}", serde_json::to_string_pretty(&doc).expect("error serializes"));
    } else {
        eprintln!("error: {e:#}");
    }
    EXIT_ERROR
}
