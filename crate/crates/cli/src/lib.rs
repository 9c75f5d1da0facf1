//! The `riccati` command: print symbolic objects, integrate equations to CSV
//! and run verification checks with JSON reports.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub mod checks;
pub mod integrate;
pub mod params;
pub mod print;
pub mod report;

pub use params::Params;
pub use report::Entry;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

macro_rules! numerical_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Numerical(e.to_string())
            }
        }
    )*};
}

numerical_from!(
    riccati_core::numerics::NumericsError,
    riccati_core::superposition::SuperpositionError,
    riccati_core::projective::ProjectiveError,
    riccati_core::painleve::PainleveError,
    riccati_core::hierarchy::HierarchyError
);

#[derive(Debug, Parser)]
#[command(name = "riccati", version, about = "Riccati chains, projective vector fields and Painleve II")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print a symbolic object in canonical form.
    Print {
        #[command(subcommand)]
        what: print::PrintKind,
    },
    /// Integrate an equation and write `x,y0,y1,...` CSV.
    Integrate {
        /// hill, pvf, riccati, pii, pii-hamiltonian, cdis, or a polynomial
        /// monic in the top derivative of its one dependent variable.
        equation: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Run verification checks (or `all`) and write a JSON report.
    Verify {
        /// Check names, or `all`
        #[arg(required = true)]
        checks: Vec<String>,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Default, Args)]
struct Flags {
    /// Coefficient function, e.g. `trig:1;0.3,0` or `const:1`.
    #[arg(long, allow_hyphen_values = true)]
    v: Option<String>,
    /// Second coefficient function.
    #[arg(long, allow_hyphen_values = true)]
    w: Option<String>,
    /// Initial values, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    ics: Option<String>,
    /// `x0,x1`.
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Number of output samples.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// `+` or `-`.
    #[arg(long, allow_hyphen_values = true)]
    sign: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// File of `key = value` lines with the same keys; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn params(&self) -> Result<Params, CliError> {
        let mut flags = Params::new();
        let pairs = [
            ("v", &self.v),
            ("w", &self.w),
            ("ics", &self.ics),
            ("domain", &self.domain),
            ("grid", &self.grid),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("out", &self.out),
            ("alpha", &self.alpha),
            ("sign", &self.sign),
            ("k", &self.k),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                flags.set(k, v)?;
            }
        }
        let base = match &self.config {
            Some(path) => Params::from_config_file(path)?,
            None => Params::new(),
        };
        let p = base.overlay(&flags);
        p.validate()?;
        Ok(p)
    }
}

fn write_output(params: &Params, text: &str) -> Result<(), CliError> {
    match params.get("out") {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("riccati: {e}");
            e.exit_code()
        }
    }
}

fn execute(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Print { what } => {
            println!("{}", print::render(&what)?);
            Ok(0)
        }
        Command::Integrate { equation, flags } => {
            let params = flags.params()?;
            let out = integrate::run(&equation, &params)?;
            if let Some(x) = out.truncated_at {
                eprintln!("riccati: pole near x = {x}; output truncated");
            }
            write_output(&params, &out.csv)?;
            Ok(0)
        }
        Command::Verify { checks: names, flags } => {
            let params = flags.params()?;
            let selected = checks::select(&names)?;
            let outcome = checks::run_checks(&selected, &params);
            write_output(&params, &report::to_json(&outcome.entries))?;
            if outcome.numerical_failure {
                Ok(3)
            } else if outcome.entries.iter().all(|e| e.pass) {
                Ok(0)
            } else {
                Ok(1)
            }
        }
    }
}
