use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mbf::dedekind::{self, Method};
use mbf::intervals::{interval_size_alg2, upset_size_alg1};
use mbf::matrix::{load_matrix, save_matrix, IncidenceMatrix};
use mbf::poset::save_level;
use mbf::sweep::{run_sweep, SweepConfig, SweepOptions, SweepOutcome, THREADS_ENV};
use mbf::symmetry::{enumerate_classes, save_classes};
use mbf::truth_table::parse_with_arity;
use mbf::verify::{self, Status};
use mbf::{Error, PosetLevel};

/// Interval sizes and Dedekind numbers in the lattice of monotone Boolean functions.
#[derive(Parser)]
#[command(name = "mbf", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate D_n and write it as a `.dn` file.
    Gen {
        #[arg(short)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Build the interval table of D_n and write it as a `.mxm` file.
    Matrix {
        #[arg(short)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = parse_entry_width)]
        entry_width: u8,
        /// Also write a labelled CSV copy (small n only).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Enumerate permutation classes of D_n and write them as a `.rn` file.
    Classes {
        #[arg(short)]
        n: usize,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Size of the interval [from, to] in D_{base+2}.
    Interval {
        #[arg(long)]
        base: usize,
        /// Lower end, as a binary string or 0x-prefixed hex.
        #[arg(long)]
        from: String,
        /// Upper end, or `top`.
        #[arg(long, default_value = "top")]
        to: String,
        /// Interval table of D_base; built in memory when omitted.
        #[arg(long)]
        matrix: Option<PathBuf>,
    },
    /// Compute a Dedekind number exactly.
    Dedekind {
        #[arg(long, value_enum)]
        method: MethodArg,
        #[arg(short)]
        n: usize,
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        classes: Option<PathBuf>,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
    /// Sum #[x, top] * gamma(x) over a class file.
    Sweep {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        classes: PathBuf,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
        #[arg(long, default_value_t = 256)]
        chunk: usize,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Chunks between checkpoints.
        #[arg(long, default_value_t = 64)]
        checkpoint_every: usize,
        /// Per-class `(rep, #[rep, top])` records.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        stop_after: Option<u64>,
    },
    /// Run self-checks against known values and oracles.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Quick)]
        level: LevelArg,
        /// Interval table of D_5, reused instead of rebuilt.
        #[arg(long)]
        matrix5: Option<PathBuf>,
        /// Class file of D_7, needed for the d_8 check.
        #[arg(long)]
        classes7: Option<PathBuf>,
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Direct,
    Sumsq,
    Classes,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Quick,
    Standard,
    Full,
}

fn parse_entry_width(s: &str) -> Result<u8, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err("entry width must be 2 or 4".into()),
    }
}

enum Failure {
    Verification,
    Error(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io_or_format() { 3 } else { 2 })
        }
    }
}

fn level_for_matrix(path: Option<&Path>, base: usize) -> Result<(PosetLevel, mbf::IntervalMatrix), Error> {
    let level = PosetLevel::generate(base)?;
    let sq = match path {
        Some(p) => load_matrix(p)?,
        None => mbf::IntervalMatrix::for_arity(base)?,
    };
    sq.check_level(&level)?;
    Ok((level, sq))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen { n, out } => {
            let level = PosetLevel::generate(n)?;
            save_level(&level, &out)?;
            println!("{}", level.len());
        }
        Command::Matrix {
            n,
            out,
            entry_width,
            csv,
        } => {
            if n > mbf::matrix::MAX_MATRIX_ARITY {
                return Err(Error::ArityOutOfRange {
                    what: "matrix",
                    n,
                    min: 0,
                    max: mbf::matrix::MAX_MATRIX_ARITY,
                }
                .into());
            }
            let level = PosetLevel::generate(n)?;
            let sq = IncidenceMatrix::build(&level)?.square();
            if let Some(csv) = csv {
                let file = std::fs::File::create(csv).map_err(Error::from)?;
                sq.write_csv(&level, std::io::BufWriter::new(file))?;
            }
            save_matrix(&sq, &out, entry_width)?;
            println!("{}", sq.dim());
        }
        Command::Classes { n, out } => {
            let classes = enumerate_classes(n)?;
            save_classes(n, &classes, &out)?;
            println!("{}", classes.len());
        }
        Command::Interval {
            base,
            from,
            to,
            matrix,
        } => {
            let arity = base + 2;
            let x = parse_with_arity(&from, Some(arity))?;
            let (level, sq) = level_for_matrix(matrix.as_deref(), base)?;
            let count = if to == "top" {
                upset_size_alg1(&x, &sq, &level)?
            } else {
                let y = parse_with_arity(&to, Some(arity))?;
                interval_size_alg2(&x, &y, &sq, &level)?
            };
            println!("{count}");
        }
        Command::Dedekind {
            method,
            n,
            matrix,
            classes,
            threads,
        } => {
            let method = match method {
                MethodArg::Direct => Method::Direct,
                MethodArg::Sumsq => Method::SumSq,
                MethodArg::Classes => Method::Classes,
            };
            let inputs = dedekind::Inputs {
                matrix,
                classes,
                workers: threads,
            };
            println!("{}", dedekind::compute(method, n, &inputs)?);
        }
        Command::Sweep {
            base,
            matrix,
            classes,
            threads,
            chunk,
            checkpoint,
            checkpoint_every,
            out,
            stop_after,
        } => {
            let mut config = SweepConfig::new(base, matrix, classes);
            config.checkpoint = checkpoint;
            config.out = out;
            config.options = SweepOptions {
                workers: threads.unwrap_or_else(mbf::sweep::max_workers),
                chunk_size: chunk,
                checkpoint_every,
                stop_after_chunks: stop_after,
            };
            match run_sweep(&config)? {
                SweepOutcome::Complete(s) => {
                    if s.resumed_chunks > 0 {
                        eprintln!("resumed after {} of {} chunks", s.resumed_chunks, s.chunks);
                    }
                    println!("{}", s.total);
                }
                SweepOutcome::Interrupted { chunks_done } => {
                    eprintln!("stopped after {chunks_done} chunks");
                }
            }
        }
        Command::Verify {
            level,
            matrix5,
            classes7,
            threads,
        } => {
            let level = match level {
                LevelArg::Quick => verify::Level::Quick,
                LevelArg::Standard => verify::Level::Standard,
                LevelArg::Full => verify::Level::Full,
            };
            let inputs = verify::VerifyInputs {
                matrix5,
                classes7,
                workers: threads,
            };
            let checks = verify::verify(level, &inputs, &mut |c| {
                let tag = match c.status {
                    Status::Pass => "PASS",
                    Status::Fail => "FAIL",
                    Status::Skip => "SKIP",
                };
                println!("{tag} {} ({}) [{:.2}s]", c.name, c.detail, c.seconds);
            });
            let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
            println!("{} checks, {failed} failed", checks.len());
            if failed > 0 {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}
