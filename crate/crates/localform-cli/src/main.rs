mod input;
mod sweep;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use input::{class_set, element, field_arg, lattice_arg};
use localform::lift::{lifted_defect, lifted_invariants, norm_principle_check, springer_check, ExtensionEmbedding};
use localform::representation::{lattice_represents, represents, space_represents};
use localform::spinor::{big_g, g_group, theta, theta_rel};
use localform::universality::{is_n_universal, is_n_universal_over_ext, universality_report};
use localform::{ClassSet, Dx, Error, Field, Lattice};
use serde::Serialize;
use serde_json::json;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "localform", version, about = "Quadratic lattices over local fields")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Working precision in π-adic digits (overrides LOCALFORM_PRECISION).
    #[arg(long, global = true)]
    precision: Option<i64>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Describe a field: degree, ramification and its square classes.
    Field(FieldOnly),
    /// Order of the relative quadratic defect of an element.
    Defect {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// The Hilbert symbol (a, b).
    Hilbert {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Subgroups of F×/F×².
    Subgroup {
        #[command(subcommand)]
        op: SubgroupCmd,
    },
    /// Good BONGs and their invariants.
    Bong {
        #[command(subcommand)]
        op: BongCmd,
    },
    /// g, G and spinor norm groups.
    Spinor {
        #[command(subcommand)]
        op: SpinorCmd,
    },
    /// Representation of lattices and spaces.
    Rep {
        #[command(subcommand)]
        op: RepCmd,
    },
    /// Lifting along an extension.
    Lift {
        #[command(subcommand)]
        op: LiftCmd,
    },
    /// Springer and norm-principle checks.
    Check {
        #[command(subcommand)]
        op: CheckCmd,
    },
    /// n-universality.
    Universal {
        #[command(subcommand)]
        op: UniversalCmd,
    },
    /// Run the corpus checks and write a verdict ledger.
    Sweep(sweep::SweepArgs),
}

#[derive(Args)]
struct FieldOnly {
    /// Catalog name, JSON tower spec, or path to a JSON spec.
    #[arg(long, default_value = "Q2")]
    field: String,
}

#[derive(Args)]
struct LatticeArgs {
    /// Field override; otherwise taken from the lattice JSON.
    #[arg(long)]
    field: Option<String>,
    /// Lattice JSON (inline or a path).
    #[arg(long, conflicts_with = "bong")]
    lattice: Option<String>,
    /// BONG entries, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    bong: Option<String>,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    m: LatticeArgs,
    /// The lattice N, as JSON (inline or a path).
    #[arg(long, conflicts_with = "sub_bong")]
    sub: Option<String>,
    /// BONG entries of N, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    sub_bong: Option<String>,
}

#[derive(Subcommand)]
enum SubgroupCmd {
    /// (1+𝔭^h)F×².
    Radical {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(long)]
        h: String,
    },
    /// The exponent h# dual to h.
    Hsharp {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(long)]
        h: String,
    },
    /// N(a).
    Norm {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// O×F×².
    Units(FieldOnly),
    /// H^⊥ for H generated by --gens.
    Complement {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
    },
    /// Product of two subgroups.
    Product(TwoGroups),
    /// Intersection of two subgroups.
    Intersect(TwoGroups),
    /// Whether the first subgroup contains the second.
    Contains(TwoGroups),
    /// Whether the subgroups are equal.
    Equals(TwoGroups),
}

#[derive(Args)]
struct TwoGroups {
    #[command(flatten)]
    f: FieldOnly,
    #[arg(long, allow_hyphen_values = true)]
    gens: String,
    #[arg(long = "with", allow_hyphen_values = true)]
    with: String,
}

#[derive(Subcommand)]
enum BongCmd {
    /// Check that the entries form a good BONG.
    Validate(LatticeArgs),
    /// R_i, α_i, norm, scale, volume and property A.
    Invariants(LatticeArgs),
    /// Jordan profile over a non-dyadic field.
    Profile(LatticeArgs),
}

#[derive(Subcommand)]
enum SpinorCmd {
    /// G(a).
    #[command(name = "G")]
    BigG {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// g(a) for a in 𝒜.
    #[command(name = "g")]
    SmallG {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// θ(M).
    Theta(LatticeArgs),
    /// θ(M/N).
    ThetaRel(PairArgs),
}

#[derive(Subcommand)]
enum RepCmd {
    /// Does M represent N?
    Test(PairArgs),
    /// Does the space [diag] represent [sub]?
    Space {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(long, allow_hyphen_values = true)]
        diag: String,
        #[arg(long, allow_hyphen_values = true)]
        sub: String,
    },
    /// Decide by the enumeration oracle (rank N ≤ 2).
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = localform::oracle::DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Subcommand)]
enum LiftCmd {
    /// Invariants of M before and after lifting, with every lifting law.
    Invariants {
        #[command(flatten)]
        m: LatticeArgs,
        #[arg(long)]
        ext: String,
    },
    /// d(c) and the lifted d(c).
    Defect {
        #[command(flatten)]
        f: FieldOnly,
        #[arg(long)]
        ext: String,
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
}

#[derive(Subcommand)]
enum CheckCmd {
    /// Representation and isometry before and after an odd-degree lift.
    Springer {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        ext: String,
    },
    /// N(θ(M̃)) ⊆ θ(M) and, with a sublattice, N(θ(M̃/Ñ)) ⊆ θ(M/N).
    Normprinciple {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        ext: String,
    },
}

#[derive(Subcommand)]
enum UniversalCmd {
    /// Decide n-universality, over the lattice's field or over --ext.
    Test {
        #[command(flatten)]
        m: LatticeArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ext: Option<String>,
    },
    /// Produce a rank-n lattice that M does not represent.
    Witness {
        #[command(flatten)]
        m: LatticeArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ext: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(p) = cli.precision {
        std::env::set_var("LOCALFORM_PRECISION", p.to_string());
    }
    if let Some(t) = cli.threads {
        std::env::set_var("RAYON_NUM_THREADS", t.to_string());
    }
    let json = cli.json;
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            let (code, kind) = classify(&err);
            if json {
                eprintln!("{}", json!({ "error": kind, "message": err.to_string() }));
            } else {
                eprintln!("error[{kind}]: {err:#}");
            }
            ExitCode::from(code)
        }
    }
}

/// Exit code and error kind: 2 usage, 3 law violation, 4 inconclusive oracle.
fn classify(err: &anyhow::Error) -> (u8, String) {
    match err.downcast_ref::<Error>() {
        Some(e) => {
            let name = format!("{e:?}");
            let kind = name.split(['(', ' ']).next().unwrap_or("Error").to_string();
            let code = match e {
                Error::LawViolation(_) => 3,
                Error::OracleInconclusive(_) => 4,
                Error::Parse(_) | Error::UnknownField(_) => 2,
                _ => 1,
            };
            (code, kind)
        }
        None => (2, "Usage".into()),
    }
}

/// Print either the text form or the JSON value.
fn emit(json: bool, text: impl FnOnce() -> String, value: impl Serialize) -> Result<ExitCode> {
    if json {
        say(&serde_json::to_string_pretty(&value)?)?;
    } else {
        say(&text())?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Write a line to standard output; a closed pipe ends output quietly.
pub(crate) fn say(s: &str) -> Result<()> {
    use std::io::Write;
    match writeln!(std::io::stdout().lock(), "{s}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn parse_h(s: &str) -> Result<Dx> {
    if s == "inf" {
        return Ok(Dx::INF);
    }
    match s.parse::<i64>() {
        Ok(v) => Ok(Dx::int(v)),
        Err(_) => bail!(Error::Parse(format!("expected an integer or 'inf', got '{s}'"))),
    }
}

fn labels(k: &Field, s: &ClassSet) -> Vec<String> {
    k.classes().labels(s)
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.cmd {
        Cmd::Field(f) => {
            let k = field_arg(&f.field)?;
            let t = k.classes();
            let classes: Vec<_> = t
                .all()
                .map(|c| json!({ "class": t.label(c), "defect": t.defect(c).to_string() }))
                .collect();
            let v = json!({
                "name": k.name(), "p": k.p(), "e": k.e_abs(), "f": k.f_abs(), "degree": k.degree(),
                "dyadic": k.is_dyadic(), "precision": k.working_precision(),
                "delta": t.label(t.delta_class()), "classes": classes,
            });
            emit(
                json,
                || {
                    let mut s = format!(
                        "{}: p={} e={} f={} degree={} precision={}\n|F×/F×²| = {}, Δ = {}",
                        k.name(),
                        k.p(),
                        k.e_abs(),
                        k.f_abs(),
                        k.degree(),
                        k.working_precision(),
                        t.len(),
                        t.label(t.delta_class())
                    );
                    for c in t.all() {
                        s += &format!("\n  {:<12} d={}", t.label(c), t.defect(c));
                    }
                    s
                },
                v,
            )
        }
        Cmd::Defect { f, x } => {
            let k = field_arg(&f.field)?;
            let t = k.classes();
            let c = t.canonical(&k, &element(&k, &x)?)?;
            let d = t.defect(c);
            emit(json, || format!("d={d}"), json!({ "x": x, "class": t.label(c), "d": d.to_string() }))
        }
        Cmd::Hilbert { f, a, b } => {
            let k = field_arg(&f.field)?;
            let t = k.classes();
            let (ca, cb) = (t.canonical(&k, &element(&k, &a)?)?, t.canonical(&k, &element(&k, &b)?)?);
            let h = t.hilbert(ca, cb);
            emit(json, || format!("({a},{b})={h}"), json!({ "a": a, "b": b, "hilbert": h }))
        }
        Cmd::Subgroup { op } => subgroup(json, op),
        Cmd::Bong { op } => bong(json, op),
        Cmd::Spinor { op } => spinor(json, op),
        Cmd::Rep { op } => rep(json, op),
        Cmd::Lift { op } => lift(json, op),
        Cmd::Check { op } => check(json, op),
        Cmd::Universal { op } => universal(json, op),
        Cmd::Sweep(args) => sweep::run(json, args),
    }
}

fn group_out(json: bool, k: &Field, s: &ClassSet) -> Result<ExitCode> {
    let l = labels(k, s);
    emit(json, || format!("{{{}}} (order {})", l.join(", "), l.len()), json!({ "order": l.len(), "classes": l }))
}

fn bool_out(json: bool, key: &str, v: bool) -> Result<ExitCode> {
    emit(json, || format!("{key}={v}"), json!({ key: v }))
}

fn subgroup(json: bool, op: SubgroupCmd) -> Result<ExitCode> {
    match op {
        SubgroupCmd::Radical { f, h } => {
            let k = field_arg(&f.field)?;
            let s = k.classes().radical_group(parse_h(&h)?)?;
            group_out(json, &k, &s)
        }
        SubgroupCmd::Hsharp { f, h } => {
            let k = field_arg(&f.field)?;
            let hs = k.classes().hsharp(parse_h(&h)?)?;
            emit(json, || format!("h#={hs}"), json!({ "h": h, "hsharp": hs.to_string() }))
        }
        SubgroupCmd::Norm { f, a } => {
            let k = field_arg(&f.field)?;
            let t = k.classes();
            let s = t.norm_group(t.canonical(&k, &element(&k, &a)?)?);
            group_out(json, &k, &s)
        }
        SubgroupCmd::Units(f) => {
            let k = field_arg(&f.field)?;
            group_out(json, &k, &k.classes().units())
        }
        SubgroupCmd::Complement { f, gens } => {
            let k = field_arg(&f.field)?;
            let s = k.classes().complement(&class_set(&k, &gens)?);
            group_out(json, &k, &s)
        }
        SubgroupCmd::Product(g) => {
            let k = field_arg(&g.f.field)?;
            group_out(json, &k, &class_set(&k, &g.gens)?.product(&class_set(&k, &g.with)?))
        }
        SubgroupCmd::Intersect(g) => {
            let k = field_arg(&g.f.field)?;
            group_out(json, &k, &class_set(&k, &g.gens)?.intersect(&class_set(&k, &g.with)?))
        }
        SubgroupCmd::Contains(g) => {
            let k = field_arg(&g.f.field)?;
            bool_out(json, "contains", class_set(&k, &g.with)?.is_subset(&class_set(&k, &g.gens)?))
        }
        SubgroupCmd::Equals(g) => {
            let k = field_arg(&g.f.field)?;
            bool_out(json, "equals", class_set(&k, &g.gens)? == class_set(&k, &g.with)?)
        }
    }
}

fn load(a: &LatticeArgs) -> Result<Lattice> {
    lattice_arg(a.field.as_deref(), a.lattice.as_deref(), a.bong.as_deref())
}

fn load_pair(p: &PairArgs) -> Result<(Lattice, Lattice)> {
    let m = load(&p.m)?;
    if p.sub.is_none() && p.sub_bong.is_none() {
        bail!(Error::Parse("missing --sub or --sub-bong".into()));
    }
    let n = lattice_arg(p.m.field.as_deref(), p.sub.as_deref(), p.sub_bong.as_deref())?;
    Ok((m, n))
}

fn load_pair_opt(p: &PairArgs) -> Result<(Lattice, Option<Lattice>)> {
    let m = load(&p.m)?;
    if p.sub.is_none() && p.sub_bong.is_none() {
        return Ok((m, None));
    }
    let n = lattice_arg(p.m.field.as_deref(), p.sub.as_deref(), p.sub_bong.as_deref())?;
    Ok((m, Some(n)))
}

fn bong(json: bool, op: BongCmd) -> Result<ExitCode> {
    match op {
        BongCmd::Validate(a) => {
            let m = load(&a)?;
            let l = m.labels();
            emit(json, || format!("good BONG <{}>", l.join(", ")), json!({ "good": true, "bong": l }))
        }
        BongCmd::Invariants(a) => {
            let m = load(&a)?;
            let t = m.table();
            let v = json!({ "bong": m.labels(), "invariants": t, "property_a": m.has_property_a() });
            emit(
                json,
                || {
                    let alpha: Vec<String> = t.alpha.iter().map(|x| x.to_string()).collect();
                    format!(
                        "BONG <{}>\nR = {:?}\nalpha = [{}]\nnorm ord = {}, scale ord = {}, volume ord = {}\nproperty A: {}",
                        m.labels().join(", "),
                        t.r,
                        alpha.join(", "),
                        t.norm_ord,
                        t.scale_ord,
                        t.volume_ord,
                        m.has_property_a()
                    )
                },
                v,
            )
        }
        BongCmd::Profile(a) => {
            let m = load(&a)?;
            let p = localform::bong::jordan_profile_nondyadic(&m)?;
            emit(
                json,
                || p.iter().map(|c| format!("scale {}: rank {} {:?}", c.scale, c.rank, c.kind)).collect::<Vec<_>>().join("\n"),
                &p,
            )
        }
    }
}

fn spinor_out(json: bool, k: &Field, g: &localform::spinor::SpinorGroup) -> Result<ExitCode> {
    let l = labels(k, &g.set);
    emit(
        json,
        || format!("{{{}}} (order {}, branch {})", l.join(", "), l.len(), g.branch),
        json!({ "classes": l, "order": l.len(), "provenance": g.provenance, "branch": g.branch }),
    )
}

fn spinor(json: bool, op: SpinorCmd) -> Result<ExitCode> {
    match op {
        SpinorCmd::BigG { f, a } => {
            let k = field_arg(&f.field)?;
            let a = k.classes().classify(&k, &element(&k, &a)?)?;
            group_out(json, &k, &big_g(&k, a)?)
        }
        SpinorCmd::SmallG { f, a } => {
            let k = field_arg(&f.field)?;
            let a = k.classes().classify(&k, &element(&k, &a)?)?;
            group_out(json, &k, &g_group(&k, a)?)
        }
        SpinorCmd::Theta(a) => {
            let m = load(&a)?;
            spinor_out(json, m.field(), &theta(&m)?)
        }
        SpinorCmd::ThetaRel(p) => {
            let (m, n) = load_pair(&p)?;
            spinor_out(json, m.field(), &theta_rel(&m, &n)?)
        }
    }
}

fn rep(json: bool, op: RepCmd) -> Result<ExitCode> {
    match op {
        RepCmd::Test(p) => {
            let (m, n) = load_pair(&p)?;
            if m.field().is_dyadic() {
                let d = lattice_represents(&m, &n)?;
                emit(
                    json,
                    || match d.failing {
                        None => "represents=true".into(),
                        Some((c, i)) => format!("represents=false (condition {c:?} at i={i})"),
                    },
                    &d,
                )
            } else {
                bool_out(json, "represents", represents(&m, &n)?)
            }
        }
        RepCmd::Space { f, diag, sub } => {
            let k = field_arg(&f.field)?;
            let cls = |s: &str| -> Result<Vec<_>> {
                s.split(',').map(|x| Ok(k.classes().classify(&k, &element(&k, x.trim())?)?)).collect()
            };
            bool_out(json, "represents", space_represents(&k, &cls(&sub)?, &cls(&diag)?)?)
        }
        RepCmd::Oracle { pair, budget } => {
            let (m, n) = load_pair(&pair)?;
            let k = m.field();
            let gm = localform::bong::bong_to_gram(k, m.bong())?;
            let gn = localform::bong::bong_to_gram(k, n.bong())?;
            let kk = localform::oracle::window_base(k, &gm, &gn)?;
            bool_out(json, "represents", localform::oracle::enum_oracle_represents(k, &gm, &gn, kk, budget)?)
        }
    }
}

fn embedding(base: &Arc<Field>, ext: &str) -> Result<ExtensionEmbedding> {
    Ok(ExtensionEmbedding::new(base, &field_arg(ext)?)?)
}

fn lift(json: bool, op: LiftCmd) -> Result<ExitCode> {
    match op {
        LiftCmd::Invariants { m, ext } => {
            let m = load(&m)?;
            let emb = embedding(m.field(), &ext)?;
            let r = lifted_invariants(&m, &emb)?;
            emit(
                json,
                || {
                    let mut s = format!(
                        "{} -> {} (e_rel={}, f_rel={})\nR = {:?} -> {:?}",
                        r.base_field, r.ext_field, r.e_rel, r.f_rel, r.base.r, r.lifted.r
                    );
                    let a: Vec<String> = r.base.alpha.iter().map(|x| x.to_string()).collect();
                    let at: Vec<String> = r.lifted.alpha.iter().map(|x| x.to_string()).collect();
                    s += &format!("\nalpha = [{}] -> [{}]", a.join(", "), at.join(", "));
                    for l in &r.laws {
                        s += &format!("\n  {}: {} ({} checked)", l.law, if l.holds() { "holds" } else { "FAILS" }, l.checked);
                    }
                    s
                },
                &r,
            )
        }
        LiftCmd::Defect { f, ext, x } => {
            let k = field_arg(&f.field)?;
            let emb = embedding(&k, &ext)?;
            let c = k.classes().canonical(&k, &element(&k, &x)?)?;
            let d = lifted_defect(c, &emb)?;
            emit(json, || format!("d={} d~={} case={:?}", d.d, d.d_tilde, d.case), &d)
        }
    }
}

fn check(json: bool, op: CheckCmd) -> Result<ExitCode> {
    match op {
        CheckCmd::Springer { pair, ext } => {
            let (m, n) = load_pair(&pair)?;
            let emb = embedding(m.field(), &ext)?;
            let r = springer_check(&m, &n, &emb)?;
            if r.flip {
                bail!(Error::LawViolation(format!("Springer flip: {r:?}")));
            }
            emit(
                json,
                || format!("represents: {} / {} (base / lifted), isometric: {:?} / {:?}, no flip", r.represents_base, r.represents_lifted, r.isometric_base, r.isometric_lifted),
                &r,
            )
        }
        CheckCmd::Normprinciple { pair, ext } => {
            let (m, n) = load_pair_opt(&pair)?;
            let emb = embedding(m.field(), &ext)?;
            let r = norm_principle_check(&m, &emb, n.as_ref())?;
            emit(
                json,
                || {
                    let mut s = format!(
                        "theta(M) = {{{}}}\ntheta(M~) = {{{}}}\nN(theta(M~)) = {{{}}} contained: {}",
                        r.theta.base_group.join(", "),
                        r.theta.lifted_group.join(", "),
                        r.theta.norm_image.join(", "),
                        r.theta.holds
                    );
                    if let Some(t) = &r.theta_rel {
                        s += &format!(
                            "\ntheta(M/N) = {{{}}}\ntheta(M~/N~) = {{{}}}\nN(theta(M~/N~)) = {{{}}} contained: {}",
                            t.base_group.join(", "),
                            t.lifted_group.join(", "),
                            t.norm_image.join(", "),
                            t.holds
                        );
                    }
                    for l in &r.laws {
                        s += &format!("\n  {}: {} ({} checked)", l.law, if l.holds() { "holds" } else { "FAILS" }, l.checked);
                    }
                    s
                },
                &r,
            )
        }
    }
}

fn universal(json: bool, op: UniversalCmd) -> Result<ExitCode> {
    let (m, n, ext, witness) = match op {
        UniversalCmd::Test { m, n, ext } => (m, n, ext, false),
        UniversalCmd::Witness { m, n, ext } => (m, n, ext, true),
    };
    let m = load(&m)?;
    let emb = ext.as_deref().map(|e| embedding(m.field(), e)).transpose()?;
    let v = if witness {
        universality_report(&m, n, emb.as_ref())?
    } else {
        match &emb {
            Some(emb) => is_n_universal_over_ext(&m, n, emb)?,
            None => is_n_universal(&m, n)?,
        }
    };
    emit(
        json,
        || {
            let mut s = format!("verdict={} branch=\"{}\"", v.verdict, v.theorem_branch);
            if v.exception_flag {
                s += " exception";
            }
            if let Some(w) = &v.witness {
                s += &format!("\nwitness <{}>", w.join(", "));
            }
            s
        },
        &v,
    )
}
