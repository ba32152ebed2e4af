mod commands;
mod encode;
mod error;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heckelab::rootdata::GroupTag;
use serde_json::{json, Value};

use commands::{ChevalleyOp, Outcome, WeylOp};
use error::{CliError, CliResult};
use scenario::Scenario;

#[derive(Parser)]
#[command(name = "heckelab", version, about = "Exact computations in filtered Iwahori-Hecke algebras")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn parse_group(s: &str) -> Result<GroupTag, String> {
    s.parse().map_err(|e: heckelab::Error| e.to_string())
}

#[derive(Args)]
struct Common {
    /// SL2, GL2, GL3, GL4, Sp4 or GSp4.
    #[arg(long, global = true, default_value = "SL2", value_parser = parse_group)]
    group: GroupTag,
    /// Residue field size, a prime power up to 27.
    #[arg(long, global = true, default_value_t = 2)]
    q: u32,
    /// Filtration level of I_m.
    #[arg(long, global = true, default_value_t = 1)]
    m: usize,
    /// Working t-adic precision (defaults to a level-dependent value).
    #[arg(long, global = true)]
    prec: Option<i64>,
    /// Sweep size: Weyl length, labels per cell or grid points, depending on the command.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// JSON file describing the ring isomorphism Λ.
    #[arg(long, global = true)]
    lambda: Option<PathBuf>,
    /// JSON file describing the generic character.
    #[arg(long = "char", global = true)]
    chi: Option<PathBuf>,
    /// Write the JSON report here and print a summary instead.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Roots, coroots and the Cartan pairing.
    RootData,
    /// Length, decomposition or Ω class of an extended affine Weyl group element.
    Weyl {
        #[arg(long, value_enum, default_value = "length")]
        op: WeylOp,
        /// A word such as "s0 s1 rho1" or a JSON object {"lambda": [...], "weyl": [...]}.
        #[arg(long, default_value = "1")]
        weyl: String,
    },
    /// Matrix identities of the S and Ω representatives.
    Chevalley {
        #[arg(long, value_enum)]
        verify: Option<ChevalleyOp>,
    },
    /// The Hecke algebra H(G, I_m).
    Hecke {
        #[command(subcommand)]
        op: HeckeOp,
    },
    /// ζ_m and Kazhdan's map across a ring isomorphism Λ.
    Transfer {
        #[command(subcommand)]
        op: TransferOp,
    },
    /// Whittaker vectors, the Hecke action and κ.
    Whittaker {
        #[command(subcommand)]
        op: WhittakerOp,
    },
    /// Moy–Prasad filtrations and depth.
    Depth {
        #[command(subcommand)]
        op: DepthOp,
    },
    /// Run every suite that applies to the group.
    VerifyAll,
}

#[derive(Subcommand)]
enum HeckeOp {
    /// Volume of I_m w̃ I_m.
    Volume {
        #[arg(long)]
        weyl: String,
    },
    /// Presentation relations and the volume law.
    Verify,
    /// Product of two elements, each a JSON file or a Weyl word.
    Mul {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
}

#[derive(Subcommand)]
enum TransferOp {
    Zeta {
        #[arg(long)]
        element: String,
    },
    /// Kazhdan's map on a K_m-bi-invariant element (default e_K).
    Kaz {
        #[arg(long)]
        element: Option<String>,
        /// Antidominant cocharacter of the basis element t_λ, e.g. "-1,0".
        #[arg(long, allow_hyphen_values = true)]
        km: Option<String>,
    },
    Eisenstein {
        #[arg(long)]
        poly: PathBuf,
    },
    Verify,
}

#[derive(Subcommand)]
enum WhittakerOp {
    Act {
        #[arg(long)]
        element: String,
        /// A JSON vector file or a Weyl word for h at that element.
        #[arg(long)]
        vector: String,
    },
    Kappa {
        #[arg(long)]
        vector: String,
    },
    Verify,
}

#[derive(Subcommand)]
enum DepthOp {
    VerifyMpuc,
    Exponents {
        /// Simple root values at x, e.g. "1/2" or "1/4,1/4".
        #[arg(long)]
        x: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        plus: bool,
    },
    FromConductor {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        c: i64,
    },
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RootData => "root-data",
        Command::Weyl { .. } => "weyl",
        Command::Chevalley { .. } => "chevalley",
        Command::Hecke { .. } => "hecke",
        Command::Transfer { .. } => "transfer",
        Command::Whittaker { .. } => "whittaker",
        Command::Depth { .. } => "depth",
        Command::VerifyAll => "verify-all",
    }
}

fn dispatch(s: &Scenario, command: &Command) -> CliResult<Outcome> {
    match command {
        Command::RootData => commands::root_data(s),
        Command::Weyl { op, weyl } => commands::weyl(s, *op, weyl),
        Command::Chevalley { verify } => commands::chevalley(s, *verify),
        Command::Hecke { op } => match op {
            HeckeOp::Volume { weyl } => commands::hecke_volume(s, weyl),
            HeckeOp::Verify => commands::hecke_verify(s),
            HeckeOp::Mul { left, right } => commands::hecke_mul(s, left, right),
        },
        Command::Transfer { op } => match op {
            TransferOp::Zeta { element } => commands::transfer_zeta(s, element),
            TransferOp::Kaz { element, km } => commands::transfer_kaz(s, element.as_deref(), km.as_deref()),
            TransferOp::Eisenstein { poly } => commands::transfer_eisenstein(s, poly),
            TransferOp::Verify => commands::transfer_verify(s),
        },
        Command::Whittaker { op } => match op {
            WhittakerOp::Act { element, vector } => commands::whittaker_act(s, element, vector),
            WhittakerOp::Kappa { vector } => commands::whittaker_kappa(s, vector),
            WhittakerOp::Verify => commands::whittaker_verify(s),
        },
        Command::Depth { op } => match op {
            DepthOp::VerifyMpuc => commands::depth_mpuc(s),
            DepthOp::Exponents { x, r, plus } => commands::depth_exponents(s, x, r, *plus),
            DepthOp::FromConductor { n, c } => commands::depth_from_cond(*n, *c),
        },
        Command::VerifyAll => commands::verify_all(s),
    }
}

fn run(cli: &Cli) -> CliResult<bool> {
    let c = &cli.common;
    let s = Scenario {
        tag: c.group,
        q: c.q,
        m: c.m,
        prec: c.prec,
        budget: c.budget,
        lambda: c.lambda.clone(),
        chi: c.chi.clone(),
    };
    s.validate()?;
    let outcome = dispatch(&s, &cli.command)?;
    let mut doc = json!({
        "schema": encode::SCHEMA,
        "command": command_name(&cli.command),
        "scenario": { "group": s.tag.to_string(), "q": s.q, "m": s.m },
        "ok": outcome.failure.is_none(),
        "conventions": commands::conventions(&s)?,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut doc, outcome.body) {
        dst.extend(src);
    }
    let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
    match &c.out {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            println!("{}", outcome.summary);
        }
        None => println!("{text}"),
    }
    if let Some(f) = &outcome.failure {
        eprintln!("verification failed: {f}");
    }
    Ok(outcome.failure.is_none())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("heckelab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
