//! `randtop`: run verification campaigns, apply operators to tensors, list
//! graded dimensions and export operator matrices.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use randtop_core::spans::{
    build_gbar, build_lie_components, kernel_span, operator_matrix, subalgebra_closure, OperatorKind,
};
use randtop_core::verify::{
    build_h, build_h_prime, verify_identity_suite, verify_inclusion_suite, verify_kert,
    verify_kert_prime, verify_kert_prime_modp, verify_kn, verify_pang, verify_witt,
    VerificationReport,
};
use randtop_core::{
    apply_cg, apply_partial, apply_partial_prime, apply_t, apply_t_prime, apply_tn_prime, comm,
    ring_parse, scomm, Error, Functional, RingSpec, Tensor,
};

#[derive(Parser)]
#[command(name = "randtop", version, about = "Random-to-top operators on tensor algebras")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(clap::Args)]
struct Common {
    /// Rank of the free module L.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    rank: u64,
    /// Base ring: qq, zz or fp:<prime>.
    #[arg(long)]
    ring: Option<String>,
    /// Prime for the characteristic-p campaign and families.
    #[arg(long)]
    p: Option<u64>,
    /// Highest degree considered.
    #[arg(long = "max-degree", default_value_t = 4)]
    max_degree: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write the output to this file (atomically) instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification campaign.
    Verify {
        #[arg(value_parser = ["kert", "kert-prime", "kert-prime-fp", "identities", "inclusions", "pang", "kn", "witt"])]
        campaign: String,
        #[command(flatten)]
        common: Common,
        /// Number of t′_p operators intersected by the kn campaign.
        #[arg(long = "N", default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        cases: u64,
    },
    /// Apply an operator to tensors given in bracket notation.
    Apply {
        #[arg(value_parser = ["t", "t-prime", "tN-prime", "partial", "partial-prime", "cg", "scomm", "comm"])]
        op: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        rank: u64,
        #[arg(long, default_value = "qq")]
        ring: String,
        /// Input tensor; give it twice for the brackets.
        #[arg(long, required = true, allow_hyphen_values = true)]
        input: Vec<String>,
        /// Functional as comma-separated values on the generators.
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
    },
    /// Print the graded dimensions of a family of spans.
    Dims {
        #[arg(long, value_parser = ["lie-signed", "lie-prime", "gbar", "gbar-prime", "h", "h-prime-p", "kernel-t", "kernel-t-prime"])]
        family: String,
        #[command(flatten)]
        common: Common,
    },
    /// Export the matrix of an operator on one degree as CSV.
    Matrix {
        #[arg(long, value_parser = ["t", "t-prime", "tN-prime"])]
        op: String,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
        rank: u64,
        #[arg(long, default_value = "qq")]
        ring: String,
        #[arg(long)]
        degree: usize,
        #[arg(long = "N", value_parser = clap::value_parser!(u64).range(1..))]
        n: Option<u64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Failure modes mapped onto exit codes.
enum Failure {
    Usage(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

/// Resolves `--ring` and `--p`; they must agree when both are given.
fn resolve_ring(ring: Option<&str>, p: Option<u64>) -> Result<RingSpec, Failure> {
    let from_p = p.map(RingSpec::prime_field).transpose()?;
    let from_ring = ring.map(ring_parse).transpose()?;
    match (from_ring, from_p) {
        (Some(r), Some(q)) if r != q => Err(usage(format!("--ring {r} disagrees with --p {}", q.characteristic()))),
        (Some(r), _) => Ok(r),
        (None, Some(q)) => Ok(q),
        (None, None) => Ok(RingSpec::Rational),
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Io(e.to_string()))
        }
        Some(path) => write_atomically(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
    }
}

fn write_atomically(path: &Path, text: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut file = tempfile::NamedTempFile::new_in(dir)?;
    file.write_all(text.as_bytes())?;
    file.as_file().sync_all()?;
    file.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn render_report(report: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json() + "\n",
        Format::Table => report.to_table(),
    }
}

fn cmd_verify(campaign: &str, c: &Common, n: usize, seed: u64, cases: usize) -> Result<bool, Failure> {
    let rank = c.rank as usize;
    let d = c.max_degree;
    let report = match campaign {
        "kert" => verify_kert(rank, resolve_ring(c.ring.as_deref(), c.p)?, d)?,
        "kert-prime" => verify_kert_prime(rank, resolve_ring(c.ring.as_deref(), c.p)?, d)?,
        "kert-prime-fp" => {
            let ring = resolve_ring(c.ring.as_deref(), c.p)?;
            let RingSpec::PrimeField(p) = ring else {
                return Err(usage("kert-prime-fp needs --p <prime> or --ring fp:<prime>"));
            };
            verify_kert_prime_modp(rank, p.get() as u64, d)?
        }
        "identities" => verify_identity_suite(rank, resolve_ring(c.ring.as_deref(), c.p)?, cases, seed)?,
        "inclusions" => verify_inclusion_suite(rank, resolve_ring(c.ring.as_deref(), c.p)?, d)?,
        "pang" | "kn" | "witt" => {
            if resolve_ring(c.ring.as_deref(), c.p)? != RingSpec::Rational {
                return Err(usage(format!("{campaign} runs over qq only")));
            }
            match campaign {
                "pang" => verify_pang(rank, d)?,
                "kn" => verify_kn(rank, n, d)?,
                _ => verify_witt(rank, d)?,
            }
        }
        other => return Err(usage(format!("unknown campaign {other}"))),
    };
    emit(&render_report(&report, c.format), c.output.as_deref())?;
    Ok(report.pass)
}

#[derive(Serialize)]
struct DimsOutput<'a> {
    family: &'a str,
    ring: String,
    rank: usize,
    max_degree: usize,
    first_degree: usize,
    dims: Vec<usize>,
}

fn cmd_dims(family: &str, c: &Common) -> Result<(), Failure> {
    let rank = c.rank as usize;
    let d = c.max_degree;
    let ring = resolve_ring(c.ring.as_deref(), c.p)?;
    let (first, dims) = match family {
        "lie-signed" | "lie-prime" => {
            if d == 0 {
                return Err(usage("lie families start in degree 1; use --max-degree >= 1"));
            }
            let tower = build_lie_components(rank, ring, family == "lie-signed", d)?;
            (1, tower.iter().enumerate().map(|(i, li)| li.dim(i + 1)).collect())
        }
        "gbar" => (0, build_gbar(rank, ring, true, d)?.dims()),
        "gbar-prime" => (0, build_gbar(rank, ring, false, d)?.dims()),
        "h" => (0, subalgebra_closure(&build_h(rank, ring, d)?, d)?.dims()),
        "h-prime-p" => {
            let RingSpec::PrimeField(p) = ring else {
                return Err(usage("h-prime-p needs --p <prime> or --ring fp:<prime>"));
            };
            (0, subalgebra_closure(&build_h_prime(rank, p, d)?, d)?.dims())
        }
        "kernel-t" => (0, kernel_span(&[OperatorKind::T], rank, ring, d)?.dims()),
        "kernel-t-prime" => (0, kernel_span(&[OperatorKind::TPrime], rank, ring, d)?.dims()),
        other => return Err(usage(format!("unknown family {other}"))),
    };
    let text = match c.format {
        Format::Table => {
            dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(",") + "\n"
        }
        Format::Json => {
            let out = DimsOutput { family, ring: ring.to_string(), rank, max_degree: d, first_degree: first, dims };
            serde_json::to_string_pretty(&out).expect("dims serialize") + "\n"
        }
    };
    emit(&text, c.output.as_deref())
}

fn cmd_apply(
    op: &str,
    rank: usize,
    ring: &str,
    inputs: &[String],
    g: Option<&str>,
    n: Option<u64>,
) -> Result<(), Failure> {
    let ring = ring_parse(ring)?;
    let tensors = inputs
        .iter()
        .map(|s| Tensor::parse(s, rank, ring))
        .collect::<Result<Vec<_>, _>>()?;
    let arity = if matches!(op, "scomm" | "comm") { 2 } else { 1 };
    if tensors.len() != arity {
        return Err(usage(format!("{op} takes {arity} --input value(s), got {}", tensors.len())));
    }
    let functional = || -> Result<Functional, Failure> {
        let text = g.ok_or_else(|| usage(format!("{op} needs --g")))?;
        let f = Functional::parse(text, ring)?;
        if f.rank() != rank {
            return Err(usage(format!("--g has {} values, rank is {rank}", f.rank())));
        }
        Ok(f)
    };
    let x = &tensors[0];
    let result = match op {
        "t" => apply_t(x),
        "t-prime" => apply_t_prime(x),
        "tN-prime" => {
            let n = n.ok_or_else(|| usage("tN-prime needs --N"))?;
            apply_tn_prime(x, n as usize)?
        }
        "partial" => apply_partial(&functional()?, x)?,
        "partial-prime" => apply_partial_prime(&functional()?, x)?,
        "cg" => apply_cg(&functional()?, x)?,
        "scomm" => scomm(x, &tensors[1])?,
        "comm" => comm(x, &tensors[1])?,
        other => return Err(usage(format!("unknown operator {other}"))),
    };
    emit(&format!("{result}\n"), None)
}

fn cmd_matrix(op: &str, rank: usize, ring: &str, degree: usize, n: Option<u64>, output: Option<&Path>) -> Result<(), Failure> {
    let ring = ring_parse(ring)?;
    let kind = match op {
        "t" => OperatorKind::T,
        "t-prime" => OperatorKind::TPrime,
        "tN-prime" => OperatorKind::TNPrime(n.ok_or_else(|| usage("tN-prime needs --N"))? as usize),
        other => return Err(usage(format!("unknown operator {other}"))),
    };
    let m = operator_matrix(kind, rank, ring, degree)?;
    emit(&m.to_csv(), output)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    match cli.command {
        Command::Verify { campaign, common, n, seed, cases } => {
            cmd_verify(&campaign, &common, n as usize, seed, cases as usize)
        }
        Command::Apply { op, rank, ring, input, g, n } => {
            cmd_apply(&op, rank as usize, &ring, &input, g.as_deref(), n).map(|()| true)
        }
        Command::Dims { family, common } => cmd_dims(&family, &common).map(|()| true),
        Command::Matrix { op, rank, ring, degree, n, output } => {
            cmd_matrix(&op, rank as usize, &ring, degree, n, output.as_deref()).map(|()| true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
