use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use emdof::scenarios::{
    builtin, builtin_configs, builtin_names, run_sweep, write_outputs, ScenarioConfig, TableFormat,
};
use emdof::Error;

#[derive(Parser)]
#[command(
    name = "emdof",
    version,
    about = "Spectra and degrees of freedom of concentration operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Encoding of the spectrum, pattern and correlation tables.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Stop a sweep at the first failing scenario.
    #[arg(long, global = true)]
    fail_fast: bool,

    /// Override the node cap of every scenario.
    #[arg(long, global = true)]
    node_cap: Option<usize>,

    /// Override the seed of every scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenarios in one config file (or builtin name).
    Run { config: String },
    /// Run config files from directories, files or builtin names. With no
    /// targets, runs every builtin.
    Sweep { targets: Vec<String> },
    /// List the builtin scenario files.
    ListBuiltin,
    /// Print a builtin scenario file.
    Show { name: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn load_target(target: &str) -> Result<Vec<ScenarioConfig>, Error> {
    let path = Path::new(target);
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        files.sort();
        let mut out = Vec::new();
        for f in files {
            out.extend(load_file(&f)?);
        }
        Ok(out)
    } else if path.is_file() {
        load_file(path)
    } else if builtin(target).is_some() {
        builtin_configs(target)
    } else {
        Err(Error::Config(format!(
            "`{target}` is neither a config file, a directory nor a builtin"
        )))
    }
}

fn load_file(path: &Path) -> Result<Vec<ScenarioConfig>, Error> {
    let text =
        fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    ScenarioConfig::parse_many(&text).map_err(|e| match e {
        Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn run(cli: &Cli, targets: &[String]) -> Result<(), Error> {
    let mut configs = Vec::new();
    if targets.is_empty() {
        for name in builtin_names() {
            configs.extend(builtin_configs(name)?);
        }
    }
    for t in targets {
        configs.extend(load_target(t)?);
    }
    if let Some(seed) = cli.seed {
        configs.iter_mut().for_each(|c| c.seed = seed);
    }
    let format = match cli.format {
        Format::Csv => TableFormat::Csv,
        Format::Json => TableFormat::Json,
    };
    let results = run_sweep(&configs, cli.node_cap, cli.fail_fast);
    let mut first_error = None;
    for (cfg, result) in configs.iter().zip(&results) {
        match result {
            Ok(r) => {
                write_outputs(r, &cli.out, format)?;
                println!(
                    "{}: {} nodes, trace {:.6e}, shannon count {}, {:.2} s",
                    r.name(),
                    r.resolved.node_count,
                    r.spectrum.trace(),
                    r.dof.shannon_count,
                    r.runtime_seconds
                );
            }
            Err(e) => {
                eprintln!("{}: {e}", cfg.name);
                first_error.get_or_insert_with(|| e.clone());
            }
        }
    }
    if results.len() < configs.len() {
        eprintln!(
            "stopped after first failure; {} scenarios not run",
            configs.len() - results.len()
        );
    }
    first_error.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match &cli.command {
        Command::Run { config } => run(&cli, std::slice::from_ref(config)),
        Command::Sweep { targets } => run(&cli, targets),
        Command::ListBuiltin => {
            for name in builtin_names() {
                let n = builtin_configs(name).map(|c| c.len()).unwrap_or(0);
                println!("{name}\t{n}");
            }
            Ok(())
        }
        Command::Show { name } => match builtin(name) {
            Some(text) => {
                print!("{text}");
                Ok(())
            }
            None => Err(Error::Config(format!("unknown builtin `{name}`"))),
        },
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
