//! `siegel-kit`: JSON front end to siegel-core.

mod commands;
mod io;
mod selftest;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use siegel_core::uduality::DEFAULT_BUDGET;

use crate::io::{CliError, Context, Outcome};

#[derive(Parser, Debug)]
#[command(name = "siegel-kit", version, about = "Exact symplectic lattice, Siegel group and duality computations")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Input: a file path, inline JSON, or `-` for standard input (the default).
    #[arg(long, short, global = true)]
    input: Option<String>,
    #[arg(long, short, global = true, value_enum, default_value_t = Format::Json)]
    output: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Tolerance override for floating-point checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Entry bound for enumerations.
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Maximum enumeration volume.
    #[arg(long, global = true, env = "SIEGELKIT_BUDGET", hide_env_values = true)]
    budget: Option<u128>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integral symplectic lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// The affine Siegel group.
    #[command(subcommand)]
    Aff(AffCmd),
    /// Tamings of symplectic forms.
    #[command(subcommand)]
    Taming(TamingCmd),
    /// Pointwise polarized field calculus.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Twisted cohomology and charge quantization.
    #[command(subcommand)]
    Cohomology(CohomologyCmd),
    /// U-duality groups of finite models.
    #[command(subcommand)]
    Uduality(UdualityCmd),
    /// Seeded run of the randomized property suite.
    Selftest {
        /// Cases per check.
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum LatticeCmd {
    /// Lattice type `t` of a Gram matrix.
    Type,
    /// Frobenius change of basis bringing the form to `Ω_t`.
    Frobenius,
    /// Membership of `gamma` in `Sp_t(2n, Z)`.
    Member,
    /// Isomorphism between two lattices `a` and `b`.
    Isom,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum AffCmd {
    /// Product `x·y`.
    Compose,
    /// Inverse of `x`.
    Inverse,
    /// Image of `point` under `x`.
    Act,
    /// Lattice representation of `x`.
    Rep,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum TamingCmd {
    /// Check the taming axioms for `J` against `omega`.
    Validate,
    /// Taming attached to a Siegel point `X + iY`.
    FromSiegel,
    /// Push-forward of `taming` by `gamma`.
    Push,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum FieldCmd {
    /// Polarized Hodge star at a frame.
    Star,
    /// Self-dual projection of `F`.
    Project,
    /// Self-duality residual of `F`.
    Residual,
    /// Stress contraction and Einstein right-hand side.
    Stress,
    /// Scalar-equation right-hand side along sampled directions.
    ScalarRhs,
    /// Duality transformation of `F` and `taming` by `gamma`.
    Transform,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum CohomologyCmd {
    /// Twisted cohomology groups of a complex.
    Compute,
    /// Cocycle basis of the charge lattice.
    ChargeLattice,
    /// Integrality verdict for a charge class.
    Dsz,
}

#[derive(Subcommand, Debug, Clone, Copy)]
pub enum UdualityCmd {
    /// Integer commutant of a holonomy group.
    Commutant,
    /// Centralizer elements with entries bounded by `--bound`.
    Centralizer,
    /// Classical U-duality group of a finite model, up to `--bound`.
    FiberProduct,
    /// Image of a gauge U-duality element under `ad`.
    Ad,
}

fn dispatch(command: &Command, ctx: &Context) -> Result<Outcome, CliError> {
    match command {
        Command::Lattice(c) => commands::lattice::run(*c, ctx),
        Command::Aff(c) => commands::aff::run(*c, ctx),
        Command::Taming(c) => commands::taming::run(*c, ctx),
        Command::Field(c) => commands::field::run(*c, ctx),
        Command::Cohomology(c) => commands::cohomology::run(*c, ctx),
        Command::Uduality(c) => commands::uduality::run(*c, ctx),
        Command::Selftest { cases } => Ok(selftest::run(ctx.seed, *cases)),
    }
}

fn main() -> ExitCode {
    // Usage errors are malformed requests (exit 1); clap would use 2, which
    // is reserved for validation failures.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = cli.global;
    let ctx = Context {
        input: g.input,
        seed: g.seed,
        tol: g.tol,
        bound: g.bound,
        budget: g.budget.unwrap_or(DEFAULT_BUDGET),
    };
    let text = g.output == Format::Text;
    match dispatch(&cli.command, &ctx) {
        Ok(outcome) => {
            match (&outcome.text, text) {
                (Some(t), true) => print!("{t}"),
                _ => io::emit(&outcome.value, text),
            }
            if outcome.accepted {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("siegel-kit: {e}");
            if let Some(report) = e.report() {
                io::emit(&report, text);
            }
            ExitCode::from(e.exit_code())
        }
    }
}
