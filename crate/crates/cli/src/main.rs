use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qdt_cli::commands::{
    self, CliResult, Construction, Coproduct, Identity, PoissonArgs, Settings, Theorem,
};
use qdt_cli::report::Format;

#[derive(Parser)]
#[command(name = "qdt", version, about = "Exact checks for BV, L-infinity and quantum master equation structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Largest word length certified (default 4, or the manifest's value).
    #[arg(long, global = true, value_name = "N")]
    trunc_words: Option<usize>,

    /// Powers of hbar kept are 0..K (default 3, or the manifest's value).
    #[arg(long, global = true, value_name = "K")]
    hbar_cutoff: Option<usize>,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Record the time spent on each certificate (makes output nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Certify the axioms of the structure in a manifest.
    Check { manifest: PathBuf },
    /// Print a manifest in canonical form.
    Fmt { manifest: PathBuf },
    /// Build a BV algebra from a manifest and certify it.
    Construct {
        #[arg(value_enum)]
        construction: Construction,
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "shuffle")]
        coproduct: Coproduct,
    },
    /// Lift a first-order Maurer–Cartan seed order by order.
    SolveMc {
        manifest: PathBuf,
        #[arg(long, default_value = "t3")]
        ring: String,
        /// Seed term WORD,RING[,COEFF]; a random closed seed is drawn if absent.
        #[arg(long = "term")]
        terms: Vec<String>,
    },
    /// Lift a first-order quantum master equation seed order by order.
    SolveQme {
        manifest: PathBuf,
        #[arg(long, default_value = "t3")]
        ring: String,
        /// Seed term WORD,RING[,COEFF[,HBAR]]; a random closed seed is drawn if absent.
        #[arg(long = "term")]
        terms: Vec<String>,
        #[arg(long, value_enum)]
        construction: Option<Construction>,
        #[arg(long, value_enum, default_value = "shuffle")]
        coproduct: Coproduct,
    },
    /// Compare both sides of a representability statement on random instances.
    VerifyRepresentability {
        #[arg(value_enum)]
        theorem: Theorem,
        manifest: PathBuf,
        #[arg(long, default_value = "t3")]
        ring: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum)]
        construction: Option<Construction>,
        #[arg(long, value_enum, default_value = "shuffle")]
        coproduct: Coproduct,
    },
    /// Compose the morphisms induced by ring maps R0 -> R1 -> ... matching labels.
    ComposeMorphisms {
        /// Rings: k, t<n>, sq:a,b,... or artin-ring manifests.
        #[arg(required = true, num_args = 2..)]
        rings: Vec<String>,
    },
    /// Check an identity on random elements.
    IdentityCheck {
        #[arg(value_enum)]
        identity: Identity,
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "t3")]
        ring: String,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, value_enum)]
        construction: Option<Construction>,
        #[arg(long, value_enum, default_value = "shuffle")]
        coproduct: Coproduct,
        /// Number of coordinates, for `poisson`.
        #[arg(long)]
        dim: Option<usize>,
        /// Bivector field such as `z*d_x*d_y`, for `poisson`.
        #[arg(long)]
        s0: Option<String>,
        /// Function, for `poisson`.
        #[arg(long)]
        s1: Option<String>,
    },
}

enum Output {
    Report(qdt_cli::report::Report),
    Text(String),
}

fn run(cli: Cli) -> CliResult<Output> {
    let settings = Settings {
        words: cli.trunc_words,
        hbar: cli.hbar_cutoff,
        seed: cli.seed,
        timing: cli.timing,
    };
    let s = &settings;
    Ok(Output::Report(match cli.command {
        Command::Check { manifest } => commands::check(s, &manifest)?,
        Command::Fmt { manifest } => return Ok(Output::Text(commands::fmt(&manifest)?)),
        Command::Construct {
            construction,
            manifest,
            coproduct,
        } => commands::construct(s, construction, &manifest, coproduct)?,
        Command::SolveMc { manifest, ring, terms } => commands::solve_mc(s, &manifest, &ring, &terms)?,
        Command::SolveQme {
            manifest,
            ring,
            terms,
            construction,
            coproduct,
        } => commands::solve_qme(s, &manifest, construction, coproduct, &ring, &terms)?,
        Command::VerifyRepresentability {
            theorem,
            manifest,
            ring,
            count,
            construction,
            coproduct,
        } => commands::verify_representability(s, theorem, &manifest, construction, coproduct, &ring, count)?,
        Command::ComposeMorphisms { rings } => commands::compose_morphisms(s, &rings)?,
        Command::IdentityCheck {
            identity,
            manifest,
            ring,
            count,
            construction,
            coproduct,
            dim,
            s0,
            s1,
        } => commands::identity_check(
            s,
            identity,
            manifest.as_deref(),
            construction,
            coproduct,
            &ring,
            count,
            PoissonArgs { dim, s0, s1 },
        )?,
    }))
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
    let (format, out) = (cli.format, cli.out.clone());
    let (text, passed) = match run(cli) {
        Ok(Output::Report(r)) => (r.render(format), r.passed),
        Ok(Output::Text(t)) => (t, true),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, &text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if passed { 0 } else { 1 })
}
