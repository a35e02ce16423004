//! `neron` command line: JSON in, JSON out.
//!
//! Exit status is 0 on success, 1 on a domain error (reported as
//! `{"error": code, "detail": message}` on stdout) and 2 on malformed input.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{cyclic_h1, GaloisError, GaloisLatticeModule, Presentation, Subgroup};
use crate::lattice::{smith_normal_form, FgAbelianGroup, IntegerMatrix, LatticeError};
use crate::padic::{norm_class, norm_class_oracle, PadicContext, PadicError};
use crate::torsor::{
    constancy_check, evaluate, verify_factorization, NormTorsorFamily, TorsorError,
};
use crate::torus::{component_group, norm_torus_spec, TameTorusSpec, TorusError};

#[derive(Parser, Debug)]
#[command(name = "neron", version, about = "Component groups, norm classes and torsor evaluation for tame norm tori")]
pub struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Smith normal form U·A·V = S of an integer matrix.
    #[command(after_help = r#"Example:
  neron snf --matrix '{"rows":2,"cols":2,"entries":[[2,4],[6,8]]}'"#)]
    Snf {
        /// Matrix JSON, inline or a file path.
        #[arg(long)]
        matrix: String,
    },
    /// Coinvariants of a lattice module under a subgroup.
    #[command(after_help = r#"Example:
  neron coinvariants --subgroup full --module '{"lattice_rank":1,"generators":[{"rows":1,"cols":1,"entries":[[-1]]}]}'"#)]
    Coinvariants {
        /// Module JSON, inline or a file path.
        #[arg(long)]
        module: String,
        #[arg(long, value_enum, default_value = "full")]
        subgroup: Subgroup,
    },
    /// Largest free quotient on which wild inertia acts trivially.
    #[command(after_help = r#"Example:
  neron tame-quotient --module '{"lattice_rank":2,"generators":[{"rows":2,"cols":2,"entries":[[0,1],[1,0]]}],"inertia":[0],"wild_inertia":[0]}'"#)]
    TameQuotient {
        #[arg(long)]
        module: String,
    },
    /// Component group of the Néron model of a tame torus.
    #[command(after_help = "Example (tame quadratic norm torus, order 2):\n  neron component-group --torus norm --e 2")]
    ComponentGroup {
        /// Built-in torus family.
        #[arg(long, value_parser = ["norm"], requires = "e", conflicts_with = "module")]
        torus: Option<String>,
        #[arg(long)]
        e: Option<usize>,
        /// Character module JSON, or {"torus":"norm","e":e}.
        #[arg(long)]
        module: Option<String>,
    },
    /// H¹ of a cyclic Frobenius action on a finitely generated abelian group.
    #[command(after_help = r#"Example (k^×/(k^×)^2 for trivial Frobenius on Z/2):
  neron h1 --group '{"free_rank":0,"invariant_factors":[2]}' --frobenius identity"#)]
    H1 {
        #[arg(long)]
        group: String,
        /// `identity` or a matrix JSON on the group's generators.
        #[arg(long, default_value = "identity")]
        frobenius: String,
    },
    /// Class of a in K^×/N(L^×) for L = Q_p(p^{1/e}).
    #[command(after_help = "Example:\n  neron norm-class --p 5 --e 2 --a 2 --precision 6")]
    NormClass(NormClassArgs),
    /// The same class found by exhaustive search over norms.
    #[command(after_help = "Example:\n  neron oracle-norm-class --p 5 --e 2 --a 2 --precision 6 --search-precision 3")]
    OracleNormClass {
        #[command(flatten)]
        args: NormClassArgs,
        #[arg(long, default_value_t = 3)]
        search_precision: u32,
    },
    /// Class of the fibre of a norm torsor over a point.
    #[command(after_help = r#"Example:
  neron eval-torsor --family '{"p":5,"precision":6,"e":2,"n_vars":1,"f":[{"c":1,"exp":[2]},{"c":1,"exp":[0]}]}' --point 1"#)]
    EvalTorsor {
        #[arg(long)]
        family: String,
        /// Comma-separated integer coordinates.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Vec<i128>,
    },
    /// Sample points and check that evaluation factors through reduction.
    #[command(after_help = "Example:\n  neron verify-diagram --family family.json --samples 10000 --seed 42")]
    VerifyDiagram {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Tabulate the special-fibre class over the whole unit locus.
    #[command(after_help = "Example:\n  neron constancy --family family.json")]
    Constancy {
        #[arg(long)]
        family: String,
    },
}

#[derive(Args, Debug)]
pub struct NormClassArgs {
    #[arg(long)]
    pub p: u64,
    #[arg(long)]
    pub e: u32,
    #[arg(long, allow_negative_numbers = true)]
    pub a: i128,
    #[arg(long, default_value_t = 6)]
    pub precision: u32,
}

/// Output of `coinvariants` and `tame-quotient`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientReport {
    pub group: FgAbelianGroup,
    pub projection: IntegerMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: String,
    pub detail: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Torus(#[from] TorusError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) => 2,
            _ => 1,
        }
    }

    /// Stable snake_case name of the innermost error.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Malformed(_) => "malformed_input",
            CliError::Lattice(e) => lattice_code(e),
            CliError::Galois(e) => galois_code(e),
            CliError::Torus(e) => torus_code(e),
            CliError::Padic(e) => padic_code(e),
            CliError::Torsor(e) => torsor_code(e),
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            error: self.code().to_string(),
            detail: self.to_string(),
        }
    }
}

fn lattice_code(e: &LatticeError) -> &'static str {
    match e {
        LatticeError::ShapeMismatch { .. } => "shape_mismatch",
        LatticeError::SubgroupViolation { .. } => "subgroup_violation",
        LatticeError::NotNormalForm(_) => "not_normal_form",
    }
}

fn galois_code(e: &GaloisError) -> &'static str {
    match e {
        GaloisError::DimensionMismatch { .. } => "dimension_mismatch",
        GaloisError::NotUnimodular { .. } => "not_unimodular",
        GaloisError::ClosureCapExceeded { .. } => "closure_cap_exceeded",
        GaloisError::IndexOutOfRange { .. } => "index_out_of_range",
        GaloisError::NotSubgroup { .. } => "not_subgroup",
        GaloisError::NotNormal { .. } => "not_normal",
        GaloisError::BadFrobenius { .. } => "bad_frobenius",
        GaloisError::FrobeniusNotNormalizing { .. } => "frobenius_not_normalizing",
        GaloisError::NotAnEndomorphism => "not_an_endomorphism",
        GaloisError::InfiniteOrder { .. } => "infinite_order",
        GaloisError::NoStabilization { .. } => "no_stabilization",
        GaloisError::DoesNotDescend => "does_not_descend",
        GaloisError::Lattice(e) => lattice_code(e),
    }
}

fn torus_code(e: &TorusError) -> &'static str {
    match e {
        TorusError::InvalidDegree => "invalid_degree",
        TorusError::TamenessViolation { .. } => "tameness_violation",
        TorusError::FrobeniusDoesNotDescend => "frobenius_does_not_descend",
        TorusError::Galois(e) => galois_code(e),
    }
}

fn padic_code(e: &PadicError) -> &'static str {
    match e {
        PadicError::WildPrime => "wild_prime",
        PadicError::NotPrime(_) => "not_prime",
        PadicError::PrecisionTooSmall(_) => "precision_too_small",
        PadicError::PrecisionTooLarge { .. } => "precision_too_large",
        PadicError::ContextMismatch => "context_mismatch",
        PadicError::PrecisionExhausted => "precision_exhausted",
        PadicError::NotAUnit => "not_a_unit",
        PadicError::DegreeIncompatible { .. } => "degree_incompatible",
        PadicError::InsufficientPrecision { .. } => "insufficient_precision",
        PadicError::SearchSpaceTooLarge { .. } => "search_space_too_large",
        PadicError::OracleInconclusive => "oracle_inconclusive",
        PadicError::Overflow => "overflow",
    }
}

fn torsor_code(e: &TorsorError) -> &'static str {
    match e {
        TorsorError::ArityMismatch { .. } => "arity_mismatch",
        TorsorError::CoefficientOverflow => "coefficient_overflow",
        TorsorError::SpecialFibreVanishing { .. } => "special_fibre_vanishing",
        TorsorError::EnumerationTooLarge { .. } => "enumeration_too_large",
        TorsorError::NoSamples => "no_samples",
        TorsorError::Padic(e) => padic_code(e),
    }
}

/// Inline JSON when the argument starts with `{`, otherwise a file to read.
fn load<T: for<'de> Deserialize<'de>>(arg: &str) -> Result<T, CliError> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).map_err(|e| CliError::Malformed(format!("{arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::Malformed(e.to_string()))
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("reports serialize")
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TorusInput {
    Builtin { torus: String, e: usize },
    Characters(GaloisLatticeModule),
}

fn torus_from_input(input: TorusInput) -> Result<TameTorusSpec, CliError> {
    match input {
        TorusInput::Builtin { torus, e } if torus == "norm" => Ok(norm_torus_spec(e)?),
        TorusInput::Builtin { torus, .. } => {
            Err(CliError::Malformed(format!("unknown torus family {torus:?}")))
        }
        TorusInput::Characters(m) => Ok(TameTorusSpec::new(m)?),
    }
}

/// Runs one command and returns its report as compact JSON.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Snf { matrix } => {
            let a: IntegerMatrix = load(matrix)?;
            Ok(to_json(&smith_normal_form(&a)))
        }
        Command::Coinvariants { module, subgroup } => {
            let m: GaloisLatticeModule = load(module)?;
            let co = m.coinvariants(*subgroup);
            Ok(to_json(&QuotientReport {
                group: co.group,
                projection: co.projection,
            }))
        }
        Command::TameQuotient { module } => {
            let m: GaloisLatticeModule = load(module)?;
            let q = m.largest_trivial_free_quotient();
            Ok(to_json(&QuotientReport {
                group: q.group,
                projection: q.projection,
            }))
        }
        Command::ComponentGroup { torus, e, module } => {
            let spec = match (torus, e, module) {
                (Some(t), Some(e), None) => torus_from_input(TorusInput::Builtin {
                    torus: t.clone(),
                    e: *e,
                })?,
                (None, None, Some(m)) => torus_from_input(load(m)?)?,
                _ => {
                    return Err(CliError::Malformed(
                        "give either --torus norm --e N or --module".into(),
                    ))
                }
            };
            Ok(to_json(&component_group(&spec)?.group))
        }
        Command::H1 { group, frobenius } => {
            let g: FgAbelianGroup = load(group)?;
            let f = if frobenius == "identity" {
                IntegerMatrix::identity(g.generator_count())
            } else {
                load(frobenius)?
            };
            Ok(to_json(&cyclic_h1(&Presentation::from(&g), &f)?))
        }
        Command::NormClass(args) => {
            let ctx = PadicContext::new(args.p, args.precision)?;
            Ok(to_json(&norm_class(&ctx.element(args.a), args.e)?))
        }
        Command::OracleNormClass {
            args,
            search_precision,
        } => {
            let ctx = PadicContext::new(args.p, args.precision)?;
            Ok(to_json(&norm_class_oracle(
                &ctx.element(args.a),
                args.e,
                *search_precision,
            )?))
        }
        Command::EvalTorsor { family, point } => {
            let fam: NormTorsorFamily = load(family)?;
            Ok(to_json(&evaluate(&fam, &fam.point(point))?))
        }
        Command::VerifyDiagram {
            family,
            samples,
            seed,
        } => {
            let fam: NormTorsorFamily = load(family)?;
            Ok(to_json(&verify_factorization(&fam, *samples, *seed)?))
        }
        Command::Constancy { family } => {
            let fam: NormTorsorFamily = load(family)?;
            Ok(to_json(&constancy_check(&fam)?))
        }
    }
}

/// Parses `args`, runs the command and writes its report.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(&cli.command) {
        Ok(mut text) => {
            text.push('\n');
            let written = match &cli.output {
                Some(path) => fs::write(path, &text),
                None => std::io::stdout().write_all(text.as_bytes()),
            };
            match written {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("neron: cannot write report: {e}");
                    ExitCode::from(2)
                }
            }
        }
        Err(err) => {
            println!("{}", serde_json::to_string(&err.report()).expect("reports serialize"));
            ExitCode::from(err.exit_code())
        }
    }
}
