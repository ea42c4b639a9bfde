//! Batch front-end: train, evaluate, diagnose, and sweep over the
//! registered PDE benchmarks. All artifacts are files; see `docs/config.md`
//! and `docs/formats.md` for the key and column references.

mod commands;
mod config;

use commands::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
usage: svsnn <command> [flags]

commands:
  train          --config <file> [--out <dir>] [--seed <n>] [--workers <n>]
  evaluate       --checkpoint <file> [--problem <id>] [--grid <AxB[xC]>] [--out <dir>]
  diagnose       --checkpoint <file> [--problem <id>] [--out <dir>] [--seed <n>] [--workers <n>]
  sweep          --config <file> [--out <dir>] [--seed <n>] [--workers <n>]
  list-problems

flags:
  --config <file>      run configuration (key = value with [section] headers)
  --checkpoint <file>  checkpoint.bin produced by train
  --problem <id>       problem id override (defaults to the checkpoint's)
  --grid <spec>        evaluation grid, e.g. 200x200 or 100x100x11
  --out <dir>          output directory (default runs/<command>)
  --seed <n>           run seed override
  --workers <n>        worker threads (default: all cores)
";

struct Args {
    config: Option<PathBuf>,
    checkpoint: Option<PathBuf>,
    problem: Option<String>,
    grid: Option<String>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    workers: Option<usize>,
}

fn parse_flags(rest: &[String]) -> Result<Args, String> {
    let mut args = Args {
        config: None,
        checkpoint: None,
        problem: None,
        grid: None,
        out: None,
        seed: None,
        workers: None,
    };
    let mut it = rest.iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .cloned()
                .ok_or_else(|| format!("flag {flag} needs a value"))
        };
        match flag.as_str() {
            "--config" => args.config = Some(PathBuf::from(value()?)),
            "--checkpoint" => args.checkpoint = Some(PathBuf::from(value()?)),
            "--problem" => args.problem = Some(value()?),
            "--grid" => args.grid = Some(value()?),
            "--out" => args.out = Some(PathBuf::from(value()?)),
            "--seed" => {
                args.seed = Some(value()?.parse().map_err(|_| "--seed needs an integer")?)
            }
            "--workers" => {
                args.workers =
                    Some(value()?.parse().map_err(|_| "--workers needs an integer")?)
            }
            other => return Err(format!("unknown flag {other}")),
        }
    }
    Ok(args)
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = argv.first() else {
        eprint!("{USAGE}");
        return ExitCode::from(1);
    };
    let args = match parse_flags(&argv[1..]) {
        Ok(a) => a,
        Err(m) => {
            eprintln!("error: {m}");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };

    if let Some(workers) = args.workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build_global();
    }

    let need = |opt: Option<PathBuf>, name: &str| -> Result<PathBuf, CliError> {
        opt.ok_or_else(|| CliError::Config(format!("{name} is required for this command")))
    };

    let result: Result<(), CliError> = match command.as_str() {
        "train" => need(args.config, "--config").and_then(|cfg| {
            let out = args.out.unwrap_or_else(|| commands::default_out_dir("train"));
            commands::cmd_train(&cfg, &out, args.seed)
        }),
        "evaluate" => need(args.checkpoint, "--checkpoint").and_then(|ck| {
            let out = args.out.unwrap_or_else(|| commands::default_out_dir("evaluate"));
            commands::cmd_evaluate(&ck, args.problem.as_deref(), args.grid.as_deref(), &out)
        }),
        "diagnose" => need(args.checkpoint, "--checkpoint").and_then(|ck| {
            let out = args.out.unwrap_or_else(|| commands::default_out_dir("diagnose"));
            commands::cmd_diagnose(&ck, args.problem.as_deref(), &out, args.seed.unwrap_or(0))
        }),
        "sweep" => need(args.config, "--config").and_then(|cfg| {
            let out = args.out.unwrap_or_else(|| commands::default_out_dir("sweep"));
            commands::cmd_sweep(&cfg, &out, args.workers.unwrap_or(1), args.seed)
        }),
        "list-problems" => {
            commands::cmd_list();
            Ok(())
        }
        other => {
            eprintln!("error: unknown command `{other}`");
            eprint!("{USAGE}");
            return ExitCode::from(1);
        }
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
