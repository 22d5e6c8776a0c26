//! On-disk formats: the relation basis cache, basis dumps and certificates.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use mhs_core::arith::fmt_rational;
use mhs_core::prover::{
    parse_certificate_line, parse_provenance, relation_for, relation_triples, replay_combination,
    target_vector, Provenance,
};
use mhs_core::{BasisSource, ProofCertificate, Prover, RelationBasis};
use rayon::prelude::*;

use crate::eval::Evaluator;
use crate::expr::parse_expr;

/// Version of every file and stdout format this crate writes.
pub const FORMAT_VERSION: u32 = 1;

/// Environment variable overriding the basis cache directory.
pub const CACHE_ENV: &str = "MHS_CACHE_DIR";

/// All relations mod `p^n`, built on the rayon pool.
pub fn build_basis(n: u32) -> RelationBasis {
    let rels = relation_triples(n)
        .par_iter()
        .map(|t| relation_for(t, n).expect("triples are in range"))
        .collect();
    RelationBasis::from_relations(n, rels)
}

/// Stores the triples of an independent set of relations per modulus.
#[derive(Clone, Debug)]
pub struct BasisCache {
    dir: PathBuf,
}

impl BasisCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        BasisCache { dir: dir.into() }
    }

    pub fn path(&self, n: u32) -> PathBuf {
        self.dir.join(format!("basis-v{FORMAT_VERSION}-n{n}.txt"))
    }

    pub fn save(&self, basis: &RelationBasis) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let n = basis.modulus_power();
        let mut text = format!(
            "mhs-basis v{FORMAT_VERSION}\nmodulus: {n}\nfree: {}\nrows: {}\n",
            free_line(basis),
            basis.rows().len()
        );
        for r in basis.rows() {
            let _ = writeln!(text, "R[{}]", r.provenance);
        }
        // write then rename so readers never see a partial file
        let tmp = self.dir.join(format!(".basis-n{n}.{}.tmp", std::process::id()));
        fs::File::create(&tmp)?.write_all(text.as_bytes())?;
        fs::rename(tmp, self.path(n))
    }

    /// The cached basis, or `None` when absent, stale or damaged.
    pub fn load(&self, n: u32) -> Option<RelationBasis> {
        let text = fs::read_to_string(self.path(n)).ok()?;
        let mut lines = text.lines();
        if lines.next()? != format!("mhs-basis v{FORMAT_VERSION}") {
            return None;
        }
        if lines.next()?.strip_prefix("modulus: ")?.parse::<u32>().ok()? != n {
            return None;
        }
        let free = lines.next()?.strip_prefix("free: ")?.to_string();
        let count: usize = lines.next()?.strip_prefix("rows: ")?.parse().ok()?;
        let provs: Vec<Provenance> = lines.map(parse_provenance).collect::<Result<_, _>>().ok()?;
        if provs.len() != count {
            return None;
        }
        let rels = provs
            .par_iter()
            .map(|t| relation_for(t, n))
            .collect::<Result<Vec<_>, _>>()
            .ok()?;
        let basis = RelationBasis::from_relations(n, rels);
        // the stored rows must still be independent and span the same space
        (basis.rank() == count && free_line(&basis) == free).then_some(basis)
    }

    /// Cached basis, building and saving it on a miss.
    pub fn get(&self, n: u32) -> RelationBasis {
        if let Some(b) = self.load(n) {
            return b;
        }
        let b = build_basis(n);
        if let Err(e) = self.save(&b) {
            eprintln!("warning: could not write basis cache {}: {e}", self.path(n).display());
        }
        b
    }
}

fn free_line(basis: &RelationBasis) -> String {
    basis.free_columns().iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ")
}

/// Basis source for a [`Prover`]: parallel generation, through the cache when given.
pub fn basis_source(cache: Option<BasisCache>) -> BasisSource {
    BasisSource::new(move |n| match &cache {
        Some(c) => c.get(n),
        None => build_basis(n),
    })
}

pub fn prover(cache: Option<BasisCache>, max_modulus: u32) -> Prover {
    Prover::new().with_max_modulus(max_modulus).with_source(basis_source(cache))
}

/// Human-readable dump of a basis: every kept relation and the free columns.
pub fn dump_basis(basis: &RelationBasis) -> String {
    let mut out = format!(
        "mhs-basis-dump v{FORMAT_VERSION}\nmodulus: p^{}\ncolumns: {}\nrank: {}\n",
        basis.modulus_power(),
        basis.columns().len(),
        basis.rank()
    );
    out.push_str("free:");
    for c in basis.free_columns() {
        let _ = write!(out, " {c}");
    }
    out.push('\n');
    for r in basis.rows() {
        let _ = write!(out, "R[{}] =", r.provenance);
        let mut first = true;
        for (s, c) in r.coords.iter() {
            let sep = if first { " " } else { " + " };
            first = false;
            let _ = write!(out, "{sep}{} * hp{s}", fmt_rational(c));
        }
        if first {
            out.push_str(" 0");
        }
        out.push('\n');
    }
    out
}

/// Several certificates in one file, each introduced by its `target:` line.
pub fn write_certificates(certs: &[ProofCertificate]) -> String {
    let mut out = format!("mhs-certificate v{FORMAT_VERSION}\n");
    for c in certs {
        out.push('\n');
        out.push_str(&c.dump());
    }
    out
}

/// Outcome of replaying one certificate block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub target: String,
    pub modulus: i64,
    pub claimed_proved: bool,
    /// `Some(true)` when the combination reproduces the target exactly.
    pub replayed: Option<bool>,
}

impl Replay {
    pub fn ok(&self) -> bool {
        self.claimed_proved && self.replayed == Some(true)
    }
}

/// Replays every certificate in `text` using only relation generation and addition.
pub fn verify_certificates(text: &str) -> anyhow::Result<Vec<Replay>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or("");
    anyhow::ensure!(
        header == format!("mhs-certificate v{FORMAT_VERSION}"),
        "not a version {FORMAT_VERSION} certificate file (header {header:?})"
    );
    let mut blocks: Vec<Vec<&str>> = Vec::new();
    for l in lines {
        if l.starts_with("target:") {
            blocks.push(Vec::new());
        }
        blocks
            .last_mut()
            .ok_or_else(|| anyhow::anyhow!("entry before the first target line: {l}"))?
            .push(l);
    }
    anyhow::ensure!(!blocks.is_empty(), "no certificates in file");
    let mut ev = Evaluator::new(Prover::new().with_max_modulus(0), 0);
    let mut out = Vec::new();
    for b in blocks {
        let target = b[0].trim_start_matches("target:").trim().to_string();
        let modulus: i64 = b
            .get(1)
            .and_then(|l| l.strip_prefix("modulus: p^"))
            .ok_or_else(|| anyhow::anyhow!("missing modulus line after target {target}"))?
            .trim()
            .parse()?;
        let verdict = b
            .get(2)
            .and_then(|l| l.strip_prefix("verdict: "))
            .ok_or_else(|| anyhow::anyhow!("missing verdict line after target {target}"))?
            .trim();
        let claimed_proved = match verdict {
            "proved" => true,
            "unproven" => false,
            v => anyhow::bail!("unknown verdict {v:?}"),
        };
        let entries = b[3..]
            .iter()
            .map(|l| parse_certificate_line(l))
            .collect::<Result<Vec<_>, _>>()?;
        let replayed = if !claimed_proved {
            None
        } else if modulus <= 0 {
            Some(entries.is_empty())
        } else {
            let series = ev.series(&parse_expr(&target)?, modulus)?;
            let want = target_vector(&series, modulus)?;
            Some(replay_combination(&entries, modulus as u32)? == want)
        };
        out.push(Replay { target, modulus, claimed_proved, replayed });
    }
    Ok(out)
}

pub fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))
}
