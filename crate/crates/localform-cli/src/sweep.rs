//! Corpus sweep: every lifting law, the over-E universality criteria against
//! the native criteria on the lifted lattice, and Springer's theorem on pairs,
//! written as a deterministic verdict ledger.

use crate::input::field_arg;
use anyhow::Result;
use clap::Args;
use localform::corpus::{bong_corpus, ordered_map, CorpusBounds};
use localform::lift::{lift_lattice, lift_report, springer_check, ExtensionEmbedding};
use localform::padic::CATALOG;
use localform::universality::{is_n_universal, is_n_universal_over_ext};
use localform::{Error, Lattice};
use serde::Serialize;
use std::process::ExitCode;

#[derive(Args)]
pub struct SweepArgs {
    /// Base field of the corpus.
    #[arg(long, default_value = "Q2")]
    field: String,
    /// Extensions to lift into; defaults to every catalog field over the base.
    #[arg(long, value_delimiter = ',')]
    ext: Vec<String>,
    #[arg(long, default_value_t = 3)]
    max_rank: usize,
    /// BONG orders range over −window..=window.
    #[arg(long, default_value_t = 2)]
    window: i64,
    /// Largest n for the universality comparison.
    #[arg(long, default_value_t = 3)]
    n_max: usize,
    /// Also run Springer checks on pairs (M, N) with rank N ≤ 2 and orders in 0..=1.
    #[arg(long)]
    pairs: bool,
    /// Write the ledger here instead of standard output.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Serialize, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Status {
    Ok,
    Violation,
    Error,
}

#[derive(Serialize)]
struct Entry {
    lattice: Vec<String>,
    ext: String,
    check: String,
    status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<String>,
}

#[derive(Serialize)]
struct Ledger {
    field: String,
    extensions: Vec<String>,
    max_rank: usize,
    window: i64,
    n_max: usize,
    pairs: bool,
    lattices: usize,
    checks: usize,
    violations: usize,
    errors: usize,
    entries: Vec<Entry>,
}

fn entry(m: &Lattice, ext: &str, check: String, outcome: localform::Result<Option<String>>) -> Entry {
    let (status, detail) = match outcome {
        Ok(None) => (Status::Ok, None),
        Ok(Some(why)) => (Status::Violation, Some(why)),
        Err(Error::LawViolation(why)) => (Status::Violation, Some(why)),
        Err(e) => (Status::Error, Some(e.to_string())),
    };
    Entry { lattice: m.labels(), ext: ext.to_string(), check, status, detail }
}

fn lattice_checks(m: &Lattice, embs: &[ExtensionEmbedding], subs: &[Lattice], n_max: usize) -> Vec<Entry> {
    let mut out = Vec::new();
    for emb in embs {
        let ext = emb.ext().name();
        if m.field().is_dyadic() {
            let r = lift_report(m, emb).map(|r| {
                let bad: Vec<String> = r.laws.iter().filter(|l| !l.holds()).map(|l| l.law.clone()).collect();
                match (bad.is_empty(), r.norm_principle.holds()) {
                    (true, true) => None,
                    (_, np) => Some(format!("{}{}", bad.join("; "), if np { "" } else { " norm principle" })),
                }
            });
            out.push(entry(m, ext, "lift-laws".into(), r));
        }
        for n in 1..=n_max {
            let r = lift_lattice(m, emb).and_then(|mt| {
                let over = is_n_universal_over_ext(m, n, emb)?;
                let native = is_n_universal(&mt, n)?;
                Ok((over.verdict != native.verdict).then(|| {
                    format!("over E says {} ({}), lifted lattice says {} ({})", over.verdict, over.theorem_branch, native.verdict, native.theorem_branch)
                }))
            });
            out.push(entry(m, ext, format!("universal-{n}"), r));
        }
        if emb.degree() % 2 == 1 && !emb.is_identity() {
            for n in subs.iter().filter(|n| n.rank() <= m.rank()) {
                let r = springer_check(m, n, emb).map(|s| s.flip.then(|| format!("{s:?}")));
                out.push(entry(m, ext, format!("springer <{}>", n.labels().join(", ")), r));
            }
        }
    }
    out
}

pub fn run(json: bool, a: SweepArgs) -> Result<ExitCode> {
    let base = field_arg(&a.field)?;
    let names: Vec<String> = if a.ext.is_empty() {
        CATALOG.iter().map(|s| s.to_string()).collect()
    } else {
        a.ext.clone()
    };
    let mut embs = Vec::new();
    for name in &names {
        let ext = field_arg(name)?;
        match ExtensionEmbedding::new(&base, &ext) {
            Ok(e) => embs.push(e),
            // Unrelated catalog fields are skipped; explicit choices must embed.
            Err(_) if a.ext.is_empty() => {}
            Err(err) => return Err(err.into()),
        }
    }
    let corpus = bong_corpus(&base, CorpusBounds { min_rank: 1, max_rank: a.max_rank, window: a.window, normalized: true });
    let subs = if a.pairs {
        bong_corpus(&base, CorpusBounds { min_rank: 1, max_rank: 2, window: 1, normalized: true })
    } else {
        Vec::new()
    };
    let entries: Vec<Entry> =
        ordered_map(&corpus, |m| lattice_checks(m, &embs, &subs, a.n_max)).into_iter().flatten().collect();
    let count = |s: Status| entries.iter().filter(|e| e.status == s).count();
    let ledger = Ledger {
        field: base.name().to_string(),
        extensions: embs.iter().map(|e| e.ext().name().to_string()).collect(),
        max_rank: a.max_rank,
        window: a.window,
        n_max: a.n_max,
        pairs: a.pairs,
        lattices: corpus.len(),
        checks: entries.len(),
        violations: count(Status::Violation),
        errors: count(Status::Error),
        entries,
    };
    let text = serde_json::to_string_pretty(&ledger)?;
    let summary = format!(
        "{} lattices over {}, {} extensions, {} checks: {} violations, {} errors",
        ledger.lattices,
        ledger.field,
        ledger.extensions.len(),
        ledger.checks,
        ledger.violations,
        ledger.errors
    );
    match &a.out {
        Some(path) => {
            std::fs::write(path, text)?;
            if json {
                crate::say(&serde_json::json!({ "ledger": path, "checks": ledger.checks, "violations": ledger.violations, "errors": ledger.errors }).to_string())?;
            } else {
                crate::say(&summary)?;
            }
        }
        None => crate::say(&text)?,
    }
    if ledger.violations > 0 {
        eprintln!("{summary}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
