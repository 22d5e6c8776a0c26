//! Command definitions and their execution.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use mhs_core::oracle::{PrimeWindow, DEFAULT_WORK_BUDGET};
use mhs_core::prover::{all_proved, DEFAULT_MAX_MODULUS};
use mhs_core::ProofCertificate;

use crate::eval::Evaluator;
use crate::expr::{parse_congruence, parse_expr, parse_statement_file, Congruence};
use crate::files::{self, BasisCache, CACHE_ENV};

/// Process result; the exit code is the machine-readable verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// Proved, numeric check passed, or plain success.
    Success,
    /// Unproven, numeric failure, or certificate rejected.
    Negative,
    Error,
}

impl From<Outcome> for ExitCode {
    fn from(o: Outcome) -> ExitCode {
        ExitCode::from(match o {
            Outcome::Success => 0,
            Outcome::Negative => 1,
            Outcome::Error => 2,
        })
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mhs",
    version = concat!(env!("CARGO_PKG_VERSION"), " (format 1)"),
    about = "Expand prime-indexed quantities into multiple harmonic sums and prove supercongruences"
)]
pub struct Cli {
    /// Truncation order N: results are computed to O(p^N).
    #[arg(long, global = true, default_value_t = 6)]
    pub order: i64,
    /// Prime window for numeric checks, as LO..HI.
    #[arg(long, global = true, default_value = "11..97", value_parser = parse_window)]
    pub primes: PrimeWindow,
    /// Directory for cached relation bases (default ~/.cache/mhs).
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,
    /// Do not read or write the basis cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Bound on leaf evaluations per expansion and per direct sum.
    #[arg(long, global = true, default_value_t = DEFAULT_WORK_BUDGET)]
    pub work_budget: u64,
    /// Largest modulus power for which relation bases are built.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_MODULUS)]
    pub max_modulus: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Statements {
    /// A congruence such as "binp(2,1)*apery() = 2 mod p^5".
    pub congruence: Option<String>,
    /// File with one congruence per line; '#' starts a comment.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the expansion of an expression to O(p^N).
    Expand { expr: String },
    /// Print the largest n <= N for which expr == 0 mod p^n is proved.
    Valuation { expr: String },
    /// Prove congruences; exit 0 when all are proved, 1 otherwise.
    Prove {
        #[command(flatten)]
        input: Statements,
        /// Write the certificates to this file.
        #[arg(long)]
        certificate: Option<PathBuf>,
        /// Print only verdicts, not certificates.
        #[arg(long)]
        quiet: bool,
    },
    /// Check congruences numerically on the prime window.
    Verify {
        #[command(flatten)]
        input: Statements,
    },
    /// Build the relation basis mod p^n and optionally dump it.
    Identities {
        #[arg(long)]
        modulus: u32,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Replay a certificate file by pure arithmetic.
    VerifyCertificate { path: PathBuf },
}

pub fn parse_window(s: &str) -> Result<PrimeWindow, String> {
    let (lo, hi) = s.split_once("..").ok_or("expected LO..HI")?;
    let lo: u64 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u64 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty window {lo}..{hi}"));
    }
    if lo < 3 {
        return Err("the window must start at 3 or above".into());
    }
    Ok(PrimeWindow::new(lo, hi))
}

impl Cli {
    fn cache(&self) -> Option<BasisCache> {
        if self.no_cache {
            return None;
        }
        let dir = self
            .cache_dir
            .clone()
            .or_else(|| std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("mhs")))?;
        Some(BasisCache::new(dir))
    }

    fn evaluator(&self) -> Evaluator {
        Evaluator::new(files::prover(self.cache(), self.max_modulus), self.work_budget)
    }
}

fn statements(input: &Statements) -> anyhow::Result<Vec<(String, Congruence)>> {
    if let Some(c) = &input.congruence {
        return Ok(vec![(c.clone(), parse_congruence(c).with_context(|| format!("in {c:?}"))?)]);
    }
    let path = input.file.as_ref().expect("clap requires one input");
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let list = parse_statement_file(&text).with_context(|| format!("in {}", path.display()))?;
    if list.is_empty() {
        bail!("{} contains no congruences", path.display());
    }
    Ok(list.into_iter().map(|(ln, c)| (format!("{}:{ln}", path.display()), c)).collect())
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Expand { expr } => {
            let e = parse_expr(expr).with_context(|| format!("in {expr:?}"))?;
            let s = cli.evaluator().series(&e, cli.order)?;
            writeln!(out, "{s}")?;
            Ok(Outcome::Success)
        }
        Command::Valuation { expr } => {
            let e = parse_expr(expr).with_context(|| format!("in {expr:?}"))?;
            let mut ev = cli.evaluator();
            // an exact series is only searched up to the requested order
            let s = ev.series(&e, cli.order)?.with_order(cli.order);
            let v = ev.prover_mut().provable_valuation(&s)?;
            writeln!(out, "{v}")?;
            Ok(Outcome::Success)
        }
        Command::Prove { input, certificate, quiet } => {
            let list = statements(input)?;
            let mut ev = cli.evaluator();
            let mut all: Vec<ProofCertificate> = Vec::new();
            let mut every = true;
            for (label, c) in &list {
                let start = Instant::now();
                let (lhs, rhs) = ev.sides(c)?;
                let certs = ev.prover_mut().prove_supercongruence(&lhs, &rhs, c.modulus)?;
                let ok = all_proved(&certs);
                every &= ok;
                if !quiet {
                    writeln!(out, "{}", files::write_certificates(&certs).trim_end())?;
                }
                let verdict = if ok { "proved" } else { "unproven" };
                if list.len() > 1 {
                    writeln!(out, "{label}: {verdict} ({:.1}s)", start.elapsed().as_secs_f64())?;
                } else {
                    writeln!(out, "{verdict}")?;
                }
                all.extend(certs);
            }
            if let Some(path) = certificate {
                files::write_file(path, &files::write_certificates(&all))?;
            }
            Ok(if every { Outcome::Success } else { Outcome::Negative })
        }
        Command::Verify { input } => {
            let list = statements(input)?;
            let mut ev = cli.evaluator();
            let mut every = true;
            for (label, c) in &list {
                let report = ev.verify(c, cli.primes)?;
                every &= report.pass();
                if list.len() > 1 {
                    writeln!(out, "# {label}: {c}")?;
                }
                write!(out, "{}", report.table())?;
            }
            Ok(if every { Outcome::Success } else { Outcome::Negative })
        }
        Command::Identities { modulus, dump } => {
            let mut ev = cli.evaluator();
            let basis = ev.prover_mut().basis(*modulus)?;
            writeln!(out, "modulus: p^{modulus}")?;
            writeln!(out, "relations: {}", mhs_core::prover::relation_triples(*modulus).len())?;
            writeln!(out, "columns: {}", basis.columns().len())?;
            writeln!(out, "rank: {}", basis.rank())?;
            let free: Vec<String> = basis.free_columns().iter().map(|c| c.to_string()).collect();
            writeln!(out, "free: {}", free.join(" "))?;
            if let Some(path) = dump {
                files::write_file(path, &files::dump_basis(basis))?;
            }
            Ok(Outcome::Success)
        }
        Command::VerifyCertificate { path } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let replays = files::verify_certificates(&text)?;
            let mut every = true;
            for r in &replays {
                let status = match r.replayed {
                    Some(true) => "replayed",
                    Some(false) => "MISMATCH",
                    None => "unproven",
                };
                every &= r.ok();
                writeln!(out, "mod p^{}: {status}: {}", r.modulus, r.target)?;
            }
            writeln!(out, "{}", if every { "certificate valid" } else { "certificate rejected" })?;
            Ok(if every { Outcome::Success } else { Outcome::Negative })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Outcome, String) {
        let mut full = vec!["mhs", "--no-cache"];
        full.extend_from_slice(args);
        let cli = Cli::try_parse_from(full).unwrap();
        let mut buf = Vec::new();
        let o = run(&cli, &mut buf).unwrap();
        (o, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn windows() {
        assert_eq!(parse_window("11..61").unwrap(), PrimeWindow::new(11, 61));
        assert!(parse_window("61..11").is_err());
        assert!(parse_window("11").is_err());
        assert!(parse_window("2..11").is_err());
    }

    #[test]
    fn version_mentions_format() {
        let v = Cli::try_parse_from(["mhs", "--version"]).unwrap_err().to_string();
        assert!(v.contains(&format!("format {}", files::FORMAT_VERSION)), "{v}");
    }

    #[test]
    fn expand_and_valuation() {
        let (o, s) = run_args(&["expand", "curious(3,3)", "--order", "5"]);
        assert_eq!(o, Outcome::Success);
        assert_eq!(s.trim(), "-2 * p^2 * H(2,1) + 2 * p^4 * H(4,1) + O(p^5)");
        let (_, s) = run_args(&["expand", "rat(p^2)", "--order", "9"]);
        assert_eq!(s.trim(), "p^2");
        let (_, s) = run_args(&["valuation", "0", "--order", "5"]);
        assert_eq!(s.trim(), "5");
        let (_, s) = run_args(&["valuation", "p*H(1)+p^2*H(1,1)", "--order", "4"]);
        assert!(s.trim().parse::<i64>().unwrap() >= 3);
    }

    #[test]
    fn prove_and_refute() {
        let (o, s) = run_args(&["prove", "p*H(1) + p^2*H(1,1) = 0 mod p^3"]);
        assert_eq!(o, Outcome::Success);
        assert!(s.ends_with("proved\n") && s.contains("* R["), "{s}");
        let (o, s) = run_args(&["prove", "H(1) = 1 mod p^1", "--quiet"]);
        assert_eq!(o, Outcome::Negative);
        assert_eq!(s.trim(), "unproven");
    }
}
