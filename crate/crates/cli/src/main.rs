use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser)]
#[command(
    name = "arrangefree",
    version,
    about = "Freeness certificates for central hyperplane arrangements"
)]
struct Cli {
    /// Directory for persisted lattices (default: $ARRANGEFREE_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    /// Refuse lattice work on arrangements with more hyperplanes.
    #[arg(long, global = true, default_value_t = 64)]
    max_hyperplanes: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum Method {
    Addition,
    DivisionFlag,
    Inductive,
    Stair,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FamilyArg {
    Weyl,
    Shi,
    Catalan,
    IdealShi,
}

#[derive(Subcommand)]
enum Command {
    /// Characteristic polynomial and its reduced form.
    Chi {
        file: PathBuf,
        #[arg(long)]
        essentialize: bool,
    },
    /// Level sizes of the intersection lattice.
    Lattice {
        file: PathBuf,
        #[arg(long)]
        essentialize: bool,
    },
    /// Divisionality along one hyperplane (all of them without --h).
    Divisional {
        file: PathBuf,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        essentialize: bool,
    },
    /// Search for a combinatorial freeness certificate.
    Certify {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        #[arg(long, default_value_t = arrangefree::freecert::DEFAULT_BUDGET)]
        budget: u64,
        #[arg(long)]
        essentialize: bool,
    },
    /// Algebraic freeness verdict from Saito's criterion.
    Saito {
        file: PathBuf,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        essentialize: bool,
    },
    /// Emit a root-system arrangement file.
    Build {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long = "type")]
        type_label: String,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// `all`, `empty`, or comma-separated positive-root indices.
        #[arg(long, default_value = "empty")]
        ideal: String,
        #[arg(long, default_value = "+", value_parser = ["+", "-"])]
        sign: String,
        #[arg(long)]
        essentialize: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List the lower ideals of a positive root system.
    Ideals {
        #[arg(long = "type")]
        type_label: String,
        #[arg(long)]
        rank: usize,
    },
    /// Evidence for the global-divisionality addition conjectures.
    ProbeConjecture {
        file: PathBuf,
        #[arg(long)]
        h: usize,
        #[arg(long)]
        essentialize: bool,
    },
    /// Run the certificate searches and the Saito oracle and compare them.
    OracleCompare {
        #[arg(required_unless_present = "dir", conflicts_with = "dir")]
        file: Option<PathBuf>,
        /// Compare every `*.arr` file in a directory.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Write one report per input file here.
        #[arg(long, requires = "dir")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = arrangefree::freecert::DEFAULT_BUDGET)]
        budget: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cache = cli
        .cache
        .or_else(|| std::env::var_os("ARRANGEFREE_CACHE").map(PathBuf::from));
    if let Some(dir) = &cache {
        if let Err(e) = std::fs::create_dir_all(dir) {
            eprintln!("error: cache directory {}: {e}", dir.display());
            return ExitCode::from(2);
        }
    }
    arrangefree::lattice::LatticeCache::global().set_dir(cache);
    let ctx = commands::Context {
        max_hyperplanes: cli.max_hyperplanes,
    };
    let result = match cli.command {
        Command::Chi { file, essentialize } => ctx.chi(&file, essentialize),
        Command::Lattice { file, essentialize } => ctx.lattice(&file, essentialize),
        Command::Divisional {
            file,
            h,
            essentialize,
        } => ctx.divisional(&file, h, essentialize),
        Command::Certify {
            file,
            method,
            budget,
            essentialize,
        } => ctx.certify(&file, method, budget, essentialize),
        Command::Saito {
            file,
            bound,
            essentialize,
        } => ctx.saito(&file, bound, essentialize),
        Command::Build {
            family,
            type_label,
            rank,
            m,
            ideal,
            sign,
            essentialize,
            output,
        } => commands::build(
            family,
            &type_label,
            rank,
            m,
            &ideal,
            &sign,
            essentialize,
            output.as_deref(),
        ),
        Command::Ideals { type_label, rank } => commands::ideals(&type_label, rank),
        Command::ProbeConjecture {
            file,
            h,
            essentialize,
        } => ctx.probe(&file, h, essentialize),
        Command::OracleCompare {
            file,
            dir,
            out,
            budget,
        } => match (file, dir) {
            (Some(f), _) => ctx.oracle_compare(&f, budget),
            (None, Some(d)) => ctx.oracle_compare_dir(&d, out.as_deref(), budget),
            (None, None) => unreachable!("clap enforces one of FILE or --dir"),
        },
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
