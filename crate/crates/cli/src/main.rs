use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

mod commands;

#[derive(Parser, Debug)]
#[command(
    name = "formdiv",
    version,
    about = "Prime divisor classes of x² ± N·y² and a checked theorem catalog"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Worker threads for parallel kernels.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Admissible and forbidden classes mod 4N.
    Classes {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value = "plus")]
        sign: formdiv::Sign,
    },
    /// Smallest-b coprime representation of a value.
    Represent {
        #[arg(long)]
        value: u64,
        /// Uses x² ± N·y² unless --p and --q are given.
        #[arg(long, required_unless_present_all = ["p", "q"])]
        n: Option<u64>,
        #[arg(long, requires = "q")]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        q: Option<u64>,
        #[arg(long, default_value = "plus")]
        sign: formdiv::Sign,
        /// Largest b tried for minus forms.
        #[arg(long, default_value_t = formdiv::represent::DEFAULT_SEARCH_BOUND)]
        search_bound: u64,
    },
    /// Check catalog records against computation.
    Verify {
        /// Record id: 22, Th22, Note9, Scholion3.
        #[arg(long, conflicts_with = "all", required_unless_present = "all")]
        theorem: Option<String>,
        #[arg(long)]
        all: bool,
        /// Check the literal printed payload instead of the corrected one.
        #[arg(long)]
        as_printed: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Character tables of α against N mod P.
    Tables {
        #[arg(long, value_parser = ["9", "17"])]
        note: String,
        #[arg(long, default_value_t = 13, value_parser = clap::value_parser!(u64).range(3..=1000))]
        prime_max: u64,
    },
    /// Search a never-square family for square values.
    Scan {
        /// Two-variable family such as "4mn-(m+n)" or "28mn±13(m-n)".
        #[arg(
            long,
            conflicts_with = "corollary",
            required_unless_present = "corollary"
        )]
        family: Option<String>,
        /// Three-variable family such as 4abc-b-c.
        #[arg(long)]
        corollary: Option<String>,
        #[arg(long)]
        bound: Option<u64>,
        /// Scan even when the coefficient is not a forbidden class.
        #[arg(long)]
        as_printed: bool,
        /// Drop the gcd(m, A) = gcd(n, A) = 1 condition.
        #[arg(long)]
        ignore_coprimality: bool,
    },
    /// Every printed/computed difference from a full verification.
    Errata {
        #[command(flatten)]
        bounds: BoundArgs,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
struct BoundArgs {
    /// Prime bound for representation and survey claims.
    #[arg(long)]
    prime_bound: Option<u64>,
    #[arg(long)]
    harvest_bound: Option<u64>,
    /// Scan grid side for never-square families.
    #[arg(long)]
    bound: Option<u64>,
    /// Primes sampled per class in the symbol check.
    #[arg(long)]
    samples: Option<usize>,
}

impl BoundArgs {
    fn apply(&self) -> formdiv::Bounds {
        let mut b = formdiv::Bounds::default();
        if let Some(v) = self.prime_bound {
            b.prime_bound = v;
        }
        if let Some(v) = self.harvest_bound {
            b.harvest_bound = v;
        }
        if let Some(v) = self.bound {
            b.scan_bound = v;
        }
        if let Some(v) = self.samples {
            b.samples = v;
        }
        b
    }
}

/// What a command produced: payload, human rendering and outcome.
pub struct Rendered {
    pub payload: Value,
    pub text: String,
    pub ok: bool,
}

#[derive(Serialize)]
struct ReportEnvelope<'a> {
    tool: &'static str,
    version: &'static str,
    schema: u32,
    command: &'a str,
    parameters: Value,
    timestamp: String,
    payload: Value,
}

fn run(cli: &Cli) -> Result<(String, Value, Rendered), formdiv::Error> {
    use commands::*;
    let jobs = cli.jobs;
    let (name, params, out) = match &cli.command {
        Command::Classes { n, sign } => (
            "classes",
            serde_json::json!({ "n": n, "sign": sign }),
            classes(*n, *sign)?,
        ),
        Command::Represent {
            value,
            n,
            p,
            q,
            sign,
            search_bound,
        } => (
            "represent",
            serde_json::json!({ "value": value, "n": n, "p": p, "q": q, "sign": sign, "search_bound": search_bound }),
            represent(*value, *n, p.zip(*q), *sign, *search_bound)?,
        ),
        Command::Verify {
            theorem,
            all,
            as_printed,
            bounds,
        } => (
            "verify",
            serde_json::json!({ "theorem": theorem, "all": all, "as_printed": as_printed, "bounds": bounds, "jobs": jobs }),
            verify(theorem.as_deref(), *as_printed, bounds.apply(), jobs)?,
        ),
        Command::Tables { note, prime_max } => (
            "tables",
            serde_json::json!({ "note": note, "prime_max": prime_max }),
            tables(note, *prime_max)?,
        ),
        Command::Scan {
            family,
            corollary,
            bound,
            as_printed,
            ignore_coprimality,
        } => (
            "scan",
            serde_json::json!({
                "family": family, "corollary": corollary, "bound": bound,
                "as_printed": as_printed, "ignore_coprimality": ignore_coprimality
            }),
            scan(
                family.as_deref(),
                corollary.as_deref(),
                *bound,
                *as_printed,
                *ignore_coprimality,
                jobs,
            )?,
        ),
        Command::Errata { bounds } => (
            "errata",
            serde_json::json!({ "bounds": bounds, "jobs": jobs }),
            errata(bounds.apply(), jobs)?,
        ),
    };
    Ok((name.to_string(), params, out))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((command, parameters, out)) => {
            match cli.format {
                Format::Table => print!("{}", out.text),
                Format::Json => {
                    let env = ReportEnvelope {
                        tool: "formdiv",
                        version: env!("CARGO_PKG_VERSION"),
                        schema: 1,
                        command: &command,
                        parameters,
                        timestamp: chrono::Utc::now().to_rfc3339(),
                        payload: out.payload,
                    };
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&env).expect("serializable")
                    );
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
