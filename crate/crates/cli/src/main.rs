use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fpe_cli::commands::{cmd_eval, cmd_info, cmd_sample, cmd_verify, VerifyOptions};
use fpe_cli::config::{load_config, ClassTag, RunConfig};
use fpe_cli::presets::{load_preset, preset_text, PRESET_FILES};

/// Exact similarity solutions of moving-boundary Fokker–Planck equations.
#[derive(Parser)]
#[command(name = "fpesim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write t, x, W, J, D1, D2 as CSV.
    #[command(alias = "run")]
    Eval(RunArgs),
    /// Run every verification check and print a pass/fail report.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Write per-step PDE diagnostics (s, mass, L1 to y) as CSV.
        #[arg(long, value_name = "PATH")]
        diagnostics: Option<PathBuf>,
        /// Skip the Monte Carlo check.
        #[arg(long)]
        no_sampling: bool,
    },
    /// Propagate sampled paths from the first to the last time and write the
    /// histogram against the exact density.
    Sample(RunArgs),
    /// Print the formulas and constraints of a class.
    Info {
        /// I, II or III
        class: ClassTag,
    },
    /// List the presets, or print one as TOML.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct RunArgs {
    /// One of fig1 .. fig5.
    #[arg(long, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Section of the config file to use (default: all).
    #[arg(long, requires = "config")]
    run: Option<String>,
    /// Output file (default: the run's `output` key, else stdout).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// PDE cells (multiple of 4).
    #[arg(long)]
    cells: Option<usize>,
    /// Monte Carlo paths.
    #[arg(long)]
    paths: Option<usize>,
}

enum Failure {
    Usage(String),
    Check,
    Runtime(String),
}

impl RunArgs {
    fn runs(&self) -> Result<Vec<RunConfig>, Failure> {
        let usage = |e: fpe_cli::config::ConfigError| Failure::Usage(e.to_string());
        let mut runs = match (&self.preset, &self.config) {
            (Some(name), _) => vec![load_preset(name).map_err(usage)?],
            (None, Some(path)) => load_config(path).map_err(usage)?,
            (None, None) => return Err(Failure::Usage("one of --preset or --config is required".into())),
        };
        if let Some(name) = &self.run {
            runs.retain(|r| &r.name == name);
            if runs.is_empty() {
                return Err(Failure::Usage(format!("no run named {name:?} in the config")));
            }
        }
        if self.out.is_some() && runs.len() > 1 {
            return Err(Failure::Usage("--out needs a single run; select one with --run".into()));
        }
        for r in &mut runs {
            if let Some(seed) = self.seed {
                r.seed = seed;
            }
            if let Some(cells) = self.cells {
                if cells < 16 || !cells.is_multiple_of(4) {
                    return Err(Failure::Usage(format!(
                        "--cells must be a multiple of 4 and at least 16, got {cells}"
                    )));
                }
                r.n_cells = cells;
            }
            if let Some(paths) = self.paths {
                r.n_paths = paths;
            }
        }
        Ok(runs)
    }

    fn destination(&self, run: &RunConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| run.output.as_ref().map(PathBuf::from))
    }
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let result = match path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            w.write_all(text.as_bytes())?;
            w.flush()
        }),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    };
    match result {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        other => other.map_err(|e| Failure::Runtime(format!("cannot write output: {e}"))),
    }
}

fn runtime(name: &str) -> impl Fn(fpe_similarity::Error) -> Failure + '_ {
    move |e| Failure::Runtime(format!("[{name}]: {e}"))
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval(args) => {
            let runs = args.runs()?;
            for run in &runs {
                let dest = args.destination(run);
                if dest.is_none() && runs.len() > 1 {
                    println!("# {}", run.name);
                }
                write_to(dest.as_deref(), &cmd_eval(run).map_err(runtime(&run.name))?)?;
            }
            Ok(())
        }
        Command::Verify { run: args, diagnostics, no_sampling } => {
            let runs = args.runs()?;
            if diagnostics.is_some() && runs.len() > 1 {
                return Err(Failure::Usage("--diagnostics needs a single run; select one with --run".into()));
            }
            let mut diag = match &diagnostics {
                Some(p) => Some(BufWriter::new(
                    File::create(p).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display())))?,
                )),
                None => None,
            };
            let mut reports = String::new();
            let mut all_passed = true;
            for run in &runs {
                let sink = diag.as_mut().map(|w| w as &mut dyn Write);
                let report =
                    cmd_verify(run, VerifyOptions { skip_sampling: no_sampling }, sink).map_err(runtime(&run.name))?;
                all_passed &= report.passed();
                reports.push_str(&format!("{report}\n"));
            }
            if let Some(mut w) = diag {
                w.flush().map_err(|e| Failure::Runtime(format!("cannot write diagnostics: {e}")))?;
            }
            write_to(args.out.as_deref(), &reports)?;
            if all_passed {
                Ok(())
            } else {
                Err(Failure::Check)
            }
        }
        Command::Sample(args) => {
            let runs = args.runs()?;
            for run in &runs {
                if run.n_paths == 0 {
                    return Err(Failure::Usage(format!("[{}]: n_paths is 0; set it or pass --paths", run.name)));
                }
                let (csv, distance) = cmd_sample(run).map_err(runtime(&run.name))?;
                eprintln!("[{}] L1 distance {distance:.4} with {} paths", run.name, run.n_paths);
                let dest = args.destination(run);
                if dest.is_none() && runs.len() > 1 {
                    println!("# {}", run.name);
                }
                write_to(dest.as_deref(), &csv)?;
            }
            Ok(())
        }
        Command::Info { class } => write_to(None, &cmd_info(class)),
        Command::Presets { name: None } => {
            let mut out = String::new();
            for (name, _) in PRESET_FILES {
                let run = load_preset(name).map_err(|e| Failure::Runtime(e.to_string()))?;
                out.push_str(&format!(
                    "{name}  alpha = {:<3} {}  t = {:?}\n",
                    run.alpha,
                    run.class_params(),
                    run.times
                ));
            }
            write_to(None, &out)
        }
        Command::Presets { name: Some(name) } => match preset_text(&name) {
            Some(text) => write_to(None, text),
            None => Err(Failure::Usage(format!("unknown preset {name:?}; available: fig1 .. fig5"))),
        },
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
