use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use dsbs_cli::{
    check_rho, cmd_eval, cmd_figure, cmd_roots, cmd_verify, CliError, EvalFn, Point, RootsInput,
    VerifyOptions, ROOTS_SCAN_N,
};

#[derive(Parser)]
#[command(name = "dsbs", version, about = "Minimum relative entropy regions and envelopes of the doubly symmetric binary source")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at a point.
    Eval {
        #[arg(value_enum)]
        function: EvalFn,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, allow_negative_numbers = true)]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        b: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        s: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        t: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        /// Print a JSON object with full precision.
        #[arg(long)]
        json: bool,
    },
    /// Write the surface and curve data as CSV (and SVG).
    Figure {
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long, default_value = "figure")]
        out_dir: PathBuf,
        /// Also write SVG plots.
        #[arg(long)]
        svg: bool,
    },
    /// Certify every registered claim and write a JSON report.
    Verify {
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        /// Convexity and concavity tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Sample this many midpoint pairs instead of the default selection.
        #[arg(long)]
        pairs: Option<u64>,
        #[arg(long)]
        scan_n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Plant a counterexample for one claim id.
        #[arg(long)]
        inject_fault: Option<String>,
        #[arg(long, default_value = "verify_report.json")]
        out: PathBuf,
    },
    /// Solve the scalar root equation and count its roots.
    #[command(group(ArgGroup::new("direct").args(["theta", "v", "r"]).multiple(true)))]
    #[command(group(ArgGroup::new("exponents").args(["p", "q"]).multiple(true).conflicts_with("direct")))]
    Roots {
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        v: Option<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        #[arg(long, allow_negative_numbers = true)]
        q: Option<f64>,
        #[arg(long, default_value_t = 0.9)]
        rho: f64,
        #[arg(long, default_value_t = ROOTS_SCAN_N)]
        scan_n: usize,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Eval { function, rho, a, b, s, t, q, json } => {
            let params = check_rho(rho)?;
            print!("{}", cmd_eval(function, &Point { a, b, s, t, q }, &params, json)?);
            Ok(0)
        }
        Command::Figure { rho, grid, out_dir, svg } => {
            let params = check_rho(rho)?;
            let out = cmd_figure(&params, grid, &out_dir, svg)?;
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            println!(
                "phi - phi_tilde: min {}, max {}",
                dsbs_cli::fmt_g(out.min_gap),
                dsbs_cli::fmt_g(out.max_gap)
            );
            Ok(0)
        }
        Command::Verify { rho, grid, tol, pairs, scan_n, seed, inject_fault, out } => {
            let params = check_rho(rho)?;
            let opts = VerifyOptions {
                grid_n: dsbs_cli::check_grid(grid)?,
                tolerance: tol,
                pairs,
                scan_n,
                seed,
                inject_fault,
                out,
            };
            let res = cmd_verify(&params, &opts)?;
            print!("{}", res.summary);
            println!("report written to {}", opts.out.display());
            Ok(if res.passed { 0 } else { 1 })
        }
        Command::Roots { theta, v, r, p, q, rho, scan_n } => {
            let input = match (theta, v, r, p, q) {
                (Some(theta), Some(v), Some(r), None, None) => RootsInput::Direct { theta, v, r },
                (None, None, None, Some(p), Some(q)) => RootsInput::Exponents { p, q, rho },
                _ => {
                    return Err(CliError::Usage(
                        "give either --theta, --v and --r, or --p and --q (with --rho)".into(),
                    ))
                }
            };
            print!("{}", cmd_roots(input, scan_n)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
