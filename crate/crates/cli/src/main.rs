mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use commands::Report;

#[derive(Parser, Debug)]
#[command(name = "giroux", version, about = "Bilinearized contact homology of free graded-commutative DGAs")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a presentation (degrees, ∂² = 0, action filtration) and its named augmentations.
    Validate { dga: PathBuf },
    /// Linearized homology H(V̂, ∂^ε₁) for one augmentation (the zero map by default).
    Homology {
        dga: PathBuf,
        #[arg(long, value_name = "AUG")]
        linearize: Option<String>,
    },
    /// Bilinearize with a pair of augmentations and print A^ε.
    Bilinearize {
        dga: PathBuf,
        #[arg(long, value_name = "AUG")]
        left: String,
        #[arg(long, value_name = "AUG")]
        right: String,
    },
    /// Decide whether A^ε has vanishing homology. Exit 0 when nonvanishing, 3 when vanishing.
    Criterion {
        dga: PathBuf,
        #[arg(long, value_name = "AUG")]
        left: String,
        #[arg(long, value_name = "AUG")]
        right: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        word_bound: u32,
    },
    /// Contact homology of the contact double of a convex surface. Exit 0 when tight, 3 when CH = 0.
    Surface {
        surface: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
        covers: u32,
    },
    /// The symmetric double built from one filling augmentation.
    Double {
        dga: PathBuf,
        #[arg(long, value_name = "AUG")]
        aug: String,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
        word_bound: u32,
    },
    /// Count N ≤ 1 gluing shapes in an inventory and compare with the bilinearized differential.
    Glue { inventory: PathBuf },
    /// Conley–Zehnder index, grading and parity data of an orbit model.
    Cz {
        orbit: PathBuf,
        /// ε_τ for the normal spectrum of the dividing-set orbit.
        #[arg(long, requires_all = ["eps_sigma", "cutoff"])]
        eps_tau: Option<String>,
        #[arg(long, requires = "eps_tau")]
        eps_sigma: Option<String>,
        /// The spectral cutoff Λ.
        #[arg(long, requires = "eps_tau")]
        cutoff: Option<String>,
        /// Require ε_σ < Λ < ε_τ with −ε_σ the only eigenvalue in (−Λ, Λ).
        #[arg(long, requires = "eps_tau")]
        small_eps: bool,
    },
    /// Search augmentations with degree 0 values on the grid {p/q : |p| ≤ P, 1 ≤ q ≤ Q}.
    Augmentations {
        dga: PathBuf,
        #[arg(long, num_args = 2, value_names = ["P", "Q"], default_values_t = [4, 2])]
        grid: Vec<i64>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Run the property suite.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Use reduced sizes.
        #[arg(long)]
        quick: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Homology { .. } => "homology",
            Command::Bilinearize { .. } => "bilinearize",
            Command::Criterion { .. } => "criterion",
            Command::Surface { .. } => "surface",
            Command::Double { .. } => "double",
            Command::Glue { .. } => "glue",
            Command::Cz { .. } => "cz",
            Command::Augmentations { .. } => "augmentations",
            Command::Selftest { .. } => "selftest",
        }
    }
}

fn run(cmd: &Command) -> Result<Report, commands::CliError> {
    match cmd {
        Command::Validate { dga } => commands::validate(dga),
        Command::Homology { dga, linearize } => commands::homology(dga, linearize.as_deref()),
        Command::Bilinearize { dga, left, right } => commands::bilinearize(dga, left, right),
        Command::Criterion { dga, left, right, word_bound } => commands::criterion(dga, left, right, *word_bound as usize),
        Command::Surface { surface, covers } => commands::surface(surface, *covers as usize),
        Command::Double { dga, aug, word_bound } => commands::double(dga, aug, *word_bound as usize),
        Command::Glue { inventory } => commands::glue(inventory),
        Command::Cz { orbit, eps_tau, eps_sigma, cutoff, small_eps } => {
            let spectrum = match (eps_tau, eps_sigma, cutoff) {
                (Some(t), Some(s), Some(c)) => Some((t.as_str(), s.as_str(), c.as_str(), *small_eps)),
                _ => None,
            };
            commands::cz(orbit, spectrum)
        }
        Command::Augmentations { dga, grid, cap } => commands::augmentations(dga, grid[0], grid[1], *cap),
        Command::Selftest { seed, quick } => Ok(commands::selftest(*seed, *quick)),
    }
}

fn main() -> ExitCode {
    // Usage errors are input errors; 2 is reserved for internal failures.
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { commands::EXIT_INPUT } else { commands::EXIT_OK });
        }
    };
    let name = cli.command.name();
    let (code, out) = match run(&cli.command) {
        Ok(r) => {
            let out = match cli.format {
                Format::Text => r.text,
                Format::Json => json!({"version": 1, "command": name, "report": r.json}).to_string(),
            };
            (r.exit, out)
        }
        Err(e) => {
            let out = match cli.format {
                Format::Text => {
                    eprintln!("error: {}", e.message);
                    String::new()
                }
                Format::Json => json!({"version": 1, "command": name, "error": e.to_json()}).to_string(),
            };
            (e.exit_code(), out)
        }
    };
    if !out.is_empty() {
        println!("{out}");
    }
    ExitCode::from(code)
}
