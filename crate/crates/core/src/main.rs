use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use meshlite::interp::RunOutcome;
use meshlite::runtime::render;
use meshlite::{compile, run, stdlib_examples, CheckedProgram, RunConfig};

#[derive(Parser)]
#[command(name = "meshlite", version, about = "Type-check and run meshlite programs on simulated processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    file: PathBuf,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    procs: u64,
    /// Override an untyped top-level variable, e.g. `--set n=32`.
    #[arg(long = "set", value_name = "NAME=VALUE", value_parser = parse_define)]
    defines: Vec<(String, i64)>,
    /// Directory that `readfile`/`writefile` paths are relative to.
    #[arg(long, default_value = ".")]
    workdir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Check a program without running it.
    Typecheck { file: PathBuf },
    /// Run a program.
    Run {
        #[command(flatten)]
        common: Common,
        /// Write the communication trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        scheduler_seed: u64,
    },
    /// Print the block layout of every distributed variable.
    DumpDist {
        #[command(flatten)]
        common: Common,
    },
    /// Regenerate the FFT input image and its expected transform.
    MakeFixtures {
        #[arg(long, default_value = "examples/fixtures")]
        out: PathBuf,
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_define(s: &str) -> Result<(String, i64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let value = value.trim().parse().map_err(|_| format!("`{value}` is not an integer"))?;
    Ok((name.trim().to_string(), value))
}

/// Exit statuses: 0 success, 1 program failure, 2 usage or I/O failure.
enum Failure {
    Program(String),
    Io(String),
}

impl From<Failure> for ExitCode {
    fn from(f: Failure) -> ExitCode {
        match f {
            Failure::Program(m) => {
                eprintln!("{m}");
                ExitCode::from(1)
            }
            Failure::Io(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
        }
    }
}

fn load(path: &Path) -> Result<CheckedProgram, Failure> {
    let source = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let name = path.display().to_string();
    compile(&source).map_err(|ds| Failure::Program(ds.iter().map(|d| d.render(&name)).collect::<Vec<_>>().join("\n")))
}

fn execute(common: &Common, seed: u64, layout_only: bool) -> Result<RunOutcome, Failure> {
    let program = load(&common.file)?;
    if !common.workdir.is_dir() {
        return Err(Failure::Io(format!("{}: not a directory", common.workdir.display())));
    }
    let config = RunConfig {
        procs: common.procs as usize,
        seed,
        workdir: common.workdir.clone(),
        defines: common.defines.iter().cloned().collect::<BTreeMap<_, _>>(),
        layout_only,
    };
    run(&program, &config).map_err(|f| {
        let msg = format!("{}: {f}", common.file.display());
        if f.error.is_io() {
            Failure::Io(msg)
        } else {
            Failure::Program(msg)
        }
    })
}

fn dump(out: &RunOutcome) -> String {
    let mut s = String::new();
    for (name, l) in &out.layouts {
        let shape = l.shape.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("x");
        let shape = if shape.is_empty() { "scalar".to_string() } else { shape };
        s.push_str(&format!("{name} [{shape}]"));
        if let Some(base) = &l.alias_of {
            s.push_str(&format!(" shares {base}"));
        }
        if l.replicated {
            s.push_str(&format!(" replicated on {} ranks\n", l.blocks.len()));
            continue;
        }
        s.push('\n');
        for b in &l.blocks {
            s.push_str(&format!("  {} -> owner {} low {} high {}\n", b.id, b.owner, b.low, b.high));
        }
    }
    s
}

fn main_inner(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Typecheck { file } => load(&file).map(|_| println!("ok")),
        Command::Run { common, trace, scheduler_seed } => {
            let out = execute(&common, scheduler_seed, false)?;
            if let Some(path) = trace {
                std::fs::write(&path, render(&out.trace)).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::DumpDist { common } => {
            print!("{}", dump(&execute(&common, 0, true)?));
            Ok(())
        }
        Command::MakeFixtures { out, n, seed } => stdlib_examples::make_fixtures(&out, n, seed).map_err(|e| {
            if e.is_io() {
                Failure::Io(e.to_string())
            } else {
                Failure::Program(e.to_string())
            }
        }),
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.into(),
    }
}
