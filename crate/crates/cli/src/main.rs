//! `dyadic`: exact Walsh–Fourier transforms, refinement cascades and the
//! divergence audit from the command line.
//!
//! Exit status is 0 on success, 1 for malformed input or I/O failure, and 2
//! when well-formed input violates a precondition (for example mask
//! coefficients that do not sum to 2 without `--normalize`).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dyadic::io::{self, CsvOptions};
use dyadic::refine::{self, Mask};
use dyadic::{theorem1, DyadicRational, StepFunction};
use num_bigint::BigUint;

#[derive(Parser, Debug)]
#[command(name = "dyadic", version, about = "Exact dyadic harmonic analysis")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    /// Add lossy decimal columns to step-function CSV output.
    #[arg(long, global = true)]
    float: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print w_k(x).
    Walsh { k: String, x: String },
    /// Walsh–Fourier transform of a step-function CSV.
    Transform {
        input: PathBuf,
        /// Use the O(N²) kernel sum instead of the fast transform.
        #[arg(long)]
        direct: bool,
    },
    /// Print the value table of a mask on [0, 1).
    Mask {
        mask: PathBuf,
        #[arg(long)]
        normalize: bool,
    },
    /// Emit T f0, ..., T^K f0, each preceded by a `# iterate k` line.
    Cascade {
        mask: PathBuf,
        #[arg(long)]
        k: usize,
        /// Start function (default χ_[0,1)).
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        normalize: bool,
    },
    /// The product Π m(2^{-j} y) on the window [0, 2^N).
    Phihat {
        mask: PathBuf,
        #[arg(long)]
        window: u32,
        #[arg(long)]
        normalize: bool,
    },
    /// Cascade approximation of the unit-integral refinable function.
    ///
    /// The CSV, in its coarsest representation, goes to the output; a
    /// support-check line goes to stderr.
    Solve {
        mask: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        start: Option<PathBuf>,
        #[arg(long)]
        normalize: bool,
    },
    /// Block values and partial sums for the divergent pairing.
    Theorem1 {
        #[arg(long = "nmax", default_value_t = 20)]
        n_max: u32,
        #[arg(long = "Nmax", default_value_t = 100)]
        big_n_max: u32,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exact inner product ∫ f conj(g).
    Pair { f: PathBuf, g: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

enum Failure {
    Input(String),
    Precondition(String),
}

impl From<dyadic::Error> for Failure {
    fn from(e: dyadic::Error) -> Self {
        if e.is_precondition() {
            Failure::Precondition(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn read(path: &Path) -> Outcome<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn read_step(path: &Path) -> Outcome<StepFunction> {
    io::parse_step_csv(&read(path)?).map_err(|e| with_path(path, e))
}

fn read_mask(path: &Path, normalize: bool) -> Outcome<Mask> {
    io::parse_mask(&read(path)?, normalize).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: dyadic::Error) -> Failure {
    match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        Failure::Precondition(m) => Failure::Precondition(format!("{}: {m}", path.display())),
    }
}

fn run(cli: &Cli) -> Outcome<String> {
    let opts = CsvOptions {
        float_columns: cli.float,
    };
    let out = match &cli.command {
        Command::Walsh { k, x } => {
            let k: BigUint = k
                .parse()
                .map_err(|_| Failure::Input(format!("k must be a non-negative integer, got {k:?}")))?;
            let x: DyadicRational = x.parse().map_err(|e| Failure::Input(format!("{e}")))?;
            format!("{}\n", dyadic::dyadic::walsh_big(&k, &x))
        }
        Command::Transform { input, direct } => {
            let f = read_step(input)?;
            let t = if *direct {
                dyadic::wft_direct(&f)
            } else {
                dyadic::wft(&f)
            };
            io::emit_step_csv(&t, opts)
        }
        Command::Mask { mask, normalize } => io::emit_mask_table_csv(&read_mask(mask, *normalize)?),
        Command::Cascade {
            mask,
            k,
            start,
            normalize,
        } => {
            let m = read_mask(mask, *normalize)?;
            let f0 = start_function(start.as_deref())?;
            refine::check_cascade_size(&m, &f0, *k)?;
            let mut out = String::new();
            for (i, f) in refine::cascade(&m, &f0, *k).iter().enumerate() {
                writeln!(out, "# iterate {}", i + 1).unwrap();
                out.push_str(&io::emit_step_csv(f, opts));
            }
            out
        }
        Command::Phihat {
            mask,
            window,
            normalize,
        } => {
            let m = read_mask(mask, *normalize)?;
            refine::check_window_size(&m, *window)?;
            io::emit_step_csv(&refine::phihat_window(&m, *window), opts)
        }
        Command::Solve {
            mask,
            k,
            start,
            normalize,
        } => {
            let m = read_mask(mask, *normalize)?;
            let f0 = start_function(start.as_deref())?;
            refine::check_cascade_size(&m, &f0, *k)?;
            let phi = refine::solve_refinable_from(&m, &f0, *k)?;
            let n = top_index_exponent(m.top_index());
            let s = f0.support_exp().max(0);
            let bound = n.max(s);
            let ok = refine::check_support(&phi, bound);
            eprintln!(
                "support check: supp ⊆ [0, 2^{bound}] ({})",
                if ok { "ok" } else { "FAILED" }
            );
            io::emit_step_csv(&phi.simplify(), opts)
        }
        Command::Theorem1 {
            n_max,
            big_n_max,
            format,
        } => {
            let r = theorem1::theorem1_report(*n_max, *big_n_max)?;
            match format {
                Format::Json => io::emit_theorem1_json(&r),
                Format::Csv => io::emit_theorem1_csv(&r),
            }
        }
        Command::Pair { f, g } => {
            let v = dyadic::inner(&read_step(f)?, &read_step(g)?)?;
            format!("{}\n", io::format_scalar(&v))
        }
    };
    Ok(out)
}

fn start_function(path: Option<&Path>) -> Outcome<StepFunction> {
    path.map_or_else(|| Ok(StepFunction::unit()), read_step)
}

/// Smallest `n >= 0` with `K <= 2^n`.
fn top_index_exponent(k: usize) -> i32 {
    if k <= 1 {
        0
    } else {
        (usize::BITS - (k - 1).leading_zeros()) as i32
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors count as malformed input; exit 2 is reserved for
            // precondition violations
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(text) => {
            let written = match &cli.output {
                Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
                None => {
                    print!("{text}");
                    Ok(())
                }
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Precondition(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
