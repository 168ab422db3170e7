//! n-universality of a lattice over its own field and over a finite
//! extension, with counterexample search.
//!
//! The over-E criteria only read base-field invariants together with
//! (e_rel, f_rel); with (1, 1) they reduce to the criteria over F, so one
//! evaluator serves both.

use crate::bong::{jordan_profile_nondyadic, ComponentType, Lattice};
use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::lift::{lift_lattice, ExtensionEmbedding};
use crate::padic::Field;
use crate::representation::{lattice_isometric, represents, space_invariants, space_represents};
use crate::square_classes::ClassOrd;
use serde::Serialize;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UniversalityVerdict {
    pub verdict: bool,
    pub theorem_branch: String,
    /// BONG of a rank-n lattice that is not represented.
    pub witness: Option<Vec<String>>,
    /// Set when the lattice is n-universal over E but not over F and the
    /// case is one of the two known exceptions.
    pub exception_flag: bool,
}

fn verdict(ok: bool, branch: impl Into<String>) -> UniversalityVerdict {
    UniversalityVerdict { verdict: ok, theorem_branch: branch.into(), witness: None, exception_flag: false }
}

/// Relative ramification and inertia; (1, 1) means "over F".
#[derive(Clone, Copy, Debug)]
struct Rel {
    e: i64,
    f: i64,
}

impl Rel {
    fn f_even(self) -> bool {
        self.f % 2 == 0
    }
}

fn check_input(m: &Lattice, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::DomainError("n must be at least 1".into()));
    }
    if m.r(1) < 0 {
        return Err(Error::NotIntegral);
    }
    Ok(())
}

/// Decide whether M is n-universal over its own field.
pub fn is_n_universal(m: &Lattice, n: usize) -> Result<UniversalityVerdict> {
    check_input(m, n)?;
    evaluate(m, n, Rel { e: 1, f: 1 })
}

/// Decide whether M ⊗ O_E is n-universal, from the invariants of M.
pub fn is_n_universal_over_ext(m: &Lattice, n: usize, emb: &ExtensionEmbedding) -> Result<UniversalityVerdict> {
    check_input(m, n)?;
    if m.field().spec() != emb.base().spec() {
        return Err(Error::TowerMismatch(m.field().name().into(), emb.base().name().into()));
    }
    let mut v = evaluate(m, n, Rel { e: emb.e_rel(), f: emb.f_rel() })?;
    if v.verdict && !evaluate(m, n, Rel { e: 1, f: 1 })?.verdict {
        v.exception_flag = exception_case(m, n, emb.f_rel())?;
    }
    Ok(v)
}

fn evaluate(m: &Lattice, n: usize, rel: Rel) -> Result<UniversalityVerdict> {
    if m.field().is_dyadic() {
        match n {
            1 => Ok(dyadic_one(m, rel)),
            _ if n.is_multiple_of(2) => dyadic_even(m, n, rel),
            _ => Ok(dyadic_odd(m, n, rel)),
        }
    } else {
        nondyadic(m, n, rel)
    }
}

/// Whether an over-E/over-F discrepancy is one of the two exception cases.
fn exception_case(m: &Lattice, n: usize, f_rel: i64) -> Result<bool> {
    if f_rel % 2 != 0 {
        return Ok(false);
    }
    let field = m.field();
    if field.is_dyadic() {
        Ok(match n {
            1 => m.rank() >= 2 && space_is(field, &m.bong()[..2], Plane::A),
            2 => lattice_isometric(m, &reference(field, &[Plane::H, Plane::A])?)?,
            _ => false,
        })
    } else {
        let j0 = j0_kind(m)?;
        Ok(match n {
            1 => j0 == Some(ComponentType::A),
            2 => j0 == Some(ComponentType::HA),
            _ => false,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Plane {
    H,
    A,
}

fn neg_one(field: &Field) -> ClassOrd {
    field.classes().class_ord(field.classes().minus_one(field))
}

fn delta(field: &Field) -> ClassOrd {
    field.classes().class_ord(field.classes().delta_class())
}

/// Whether the binary space [a, b] is the hyperbolic plane or the
/// anisotropic plane [1, −Δ].
fn space_is(field: &Field, ab: &[ClassOrd], p: Plane) -> bool {
    let target = match p {
        Plane::H => [ClassOrd::ONE, neg_one(field)],
        Plane::A => [ClassOrd::ONE, neg_one(field).mul(delta(field))],
    };
    space_invariants(field, ab) == space_invariants(field, &target)
}

/// The lattice H = ½A(0,0) or A = ½A(2,2ρ), as BONG ⟨1, −1/4⟩ or
/// ⟨1, −Δ/4⟩, and orthogonal sums of these.
pub fn reference(field: &Arc<Field>, planes: &[Plane]) -> Result<Lattice> {
    let e = field.e2();
    let mut bong = Vec::new();
    for p in planes {
        let second = match p {
            Plane::H => neg_one(field),
            Plane::A => neg_one(field).mul(delta(field)),
        };
        bong.push(ClassOrd::ONE);
        bong.push(second.shift(-2 * e));
    }
    Lattice::from_bong(field, &bong)
}

/// The hyperbolic lattice 𝐇 and its orthogonal sums.
pub fn hyperbolic(field: &Arc<Field>, copies: usize) -> Result<Lattice> {
    reference(field, &vec![Plane::H; copies])
}

/// 𝐀, or 𝐇⊥𝐀 when `with_h` is set.
pub fn anisotropic(field: &Arc<Field>, with_h: bool) -> Result<Lattice> {
    if with_h {
        reference(field, &[Plane::H, Plane::A])
    } else {
        reference(field, &[Plane::A])
    }
}

/// Whether the ternary space [a_1, a_2, a_3] is isotropic.
fn isotropic3(field: &Field, abc: &[ClassOrd]) -> bool {
    space_represents(field, &[ClassOrd::ONE, neg_one(field)], abc).unwrap_or(false)
}

fn r_at(m: &Lattice, i: usize) -> Option<i64> {
    (i >= 1 && i <= m.rank()).then(|| m.r(i))
}

fn alpha_at(m: &Lattice, i: usize) -> Option<Dx> {
    (i >= 1 && i < m.rank()).then(|| m.alpha(i))
}

fn alpha_bound(e: i64, hi: i64, lo: i64) -> Dx {
    Dx::int(2 * (e - (hi - lo).div_euclid(2)) - 1)
}

fn dyadic_one(m: &Lattice, rel: Rel) -> UniversalityVerdict {
    let field = m.field();
    let e = field.e2();
    let rank = m.rank();
    if rank < 2 {
        return verdict(false, "n=1: m >= 2");
    }
    if m.r(1) != 0 {
        return verdict(false, "n=1: R_1 = 0");
    }
    let (r2, r3, r4) = (m.r(2), r_at(m, 3), r_at(m, 4));
    let a1 = m.alpha(1);
    if a1 == Dx::ZERO {
        let ab = &m.bong()[..2];
        let concl = space_is(field, ab, Plane::H) || (space_is(field, ab, Plane::A) && rel.f_even());
        let hyp_a = rank == 2 || r3 > Some(1) || (r3 == Some(1) && rel.e > 1);
        if hyp_a && !concl {
            return verdict(false, "n=1 (i)(a)");
        }
        let hyp_b = rank >= 3 && r3 == Some(1) && rel.e == 1 && (rank == 3 || r4 > Some(2 * e + 1));
        if hyp_b && !concl {
            return verdict(false, "n=1 (i)(b)");
        }
        return verdict(true, "n=1 (i)");
    }
    if a1 != Dx::int(1) || rel.e != 1 {
        return verdict(false, "n=1: alpha_1 = 0 or alpha_1 = e_rel = 1");
    }
    if rank < 3 {
        return verdict(false, "n=1 (ii): m >= 3");
    }
    let r3 = m.r(3);
    if r2 == 1 || r3 > 1 {
        let ok = rank >= 4 && m.alpha(3) <= alpha_bound(e, r3, r2);
        if !ok {
            return verdict(false, "n=1 (ii)(a)");
        }
    }
    let hyp_b = !rel.f_even() && r2 <= 0 && r3 <= 1 && (rank == 3 || m.r(4) - r3 > 2 * e);
    if hyp_b && !isotropic3(field, &m.bong()[..3]) {
        return verdict(false, "n=1 (ii)(b)");
    }
    verdict(true, "n=1 (ii)")
}

/// R_i = 0 at odd i and R_i = −2e at even i, for 1 ≤ i ≤ top.
fn alternating(m: &Lattice, top: usize) -> bool {
    let e = m.field().e2();
    (1..=top).all(|i| r_at(m, i) == Some(if i % 2 == 1 { 0 } else { -2 * e }))
}

fn dyadic_even(m: &Lattice, n: usize, rel: Rel) -> Result<UniversalityVerdict> {
    let field = m.field();
    let e = field.e2();
    let rank = m.rank();
    if !(rank >= n + 3 || (rank == n + 2 && rank == 4)) {
        return Ok(verdict(false, "even-n: m >= n+3 or m = n+2 = 4"));
    }
    if !alternating(m, n + 1) {
        return Ok(verdict(false, "even-n (i)"));
    }
    if rank == 4 && n == 2 {
        let hh = lattice_isometric(m, &reference(field, &[Plane::H, Plane::H])?)?;
        let ha = rel.f_even() && lattice_isometric(m, &reference(field, &[Plane::H, Plane::A])?)?;
        return Ok(verdict(hh || ha, "even-n (ii)"));
    }
    let a = m.alpha(n + 1);
    if !(a == Dx::ZERO || (a == Dx::int(1) && rel.e == 1)) {
        return Ok(verdict(false, "even-n (iii)(a)"));
    }
    let (rn2, rn3) = (m.r(n + 2), m.r(n + 3));
    if rn3 - rn2 > 2 * e {
        if rn2 != -2 * e {
            return Ok(verdict(false, "even-n (iii)(b)"));
        }
        let t = field.classes();
        let moreover = n >= 4 || (n == 2 && t.defect_of(m.prod(1, 4)) == Dx::int(2 * e) && !rel.f_even());
        if moreover && !(rn3 == 1 && rel.e == 1) {
            return Ok(verdict(false, "even-n (iii)(b)"));
        }
    }
    if rn3 - rn2 == 2 * e && rn2 == 2 - 2 * e {
        let t = field.classes();
        let c = neg_one(field).mul(m.prod(n + 1, n + 2));
        if t.defect_of(c) != Dx::int(2 * e - 1) {
            return Ok(verdict(false, "even-n (iii)(c)"));
        }
    }
    Ok(verdict(true, "even-n (iii)"))
}

fn dyadic_odd(m: &Lattice, n: usize, rel: Rel) -> UniversalityVerdict {
    let e = m.field().e2();
    let rank = m.rank();
    if rank < n + 3 {
        return verdict(false, "odd-n: m >= n+3");
    }
    let a = m.alpha(n);
    if !alternating(m, n) || !(a == Dx::ZERO || (a == Dx::int(1) && rel.e == 1)) {
        return verdict(false, "odd-n (i)");
    }
    let (rn1, rn2, rn3) = (m.r(n + 1), m.r(n + 2), m.r(n + 3));
    if a == Dx::ZERO && !(rn2 == 0 || (rn2 == 1 && rel.e == 1)) {
        return verdict(false, "odd-n (ii)");
    }
    if a == Dx::int(1) && (rn1 == 1 || rn2 > 1) && alpha_at(m, n + 2).is_none_or(|x| x > alpha_bound(e, rn2, rn1)) {
        return verdict(false, "odd-n (ii)");
    }
    if rn3 - rn2 > 2 * e {
        return verdict(false, "odd-n (iii)");
    }
    verdict(true, "odd-n")
}

/// Rank of the π^i-modular Jordan component.
fn jordan_rank(m: &Lattice, scale: i64) -> Result<usize> {
    Ok(jordan_profile_nondyadic(m)?.iter().find(|c| c.scale == scale).map_or(0, |c| c.rank))
}

fn j0_kind(m: &Lattice) -> Result<Option<ComponentType>> {
    Ok(jordan_profile_nondyadic(m)?.iter().find(|c| c.scale == 0).map(|c| c.kind))
}

fn nondyadic(m: &Lattice, n: usize, rel: Rel) -> Result<UniversalityVerdict> {
    let j0 = jordan_rank(m, 0)?;
    let j1 = jordan_rank(m, 1)?;
    let kind = j0_kind(m)?;
    let unram_odd = rel.e == 1 && !rel.f_even();
    let branch = match n {
        1 => {
            if kind == Some(ComponentType::H) || (kind == Some(ComponentType::A) && rel.f_even()) {
                Some("non-dyadic n=1 (a)")
            } else if kind == Some(ComponentType::A) && j1 >= 2 && unram_odd {
                Some("non-dyadic n=1 (b)")
            } else if j0 >= 3 {
                Some("non-dyadic n=1 (c)")
            } else {
                None
            }
        }
        2 => {
            if j0 == 3 && j1 >= 2 && rel.e == 1 {
                Some("non-dyadic n=2 (a)")
            } else if kind == Some(ComponentType::HH) || (kind == Some(ComponentType::HA) && rel.f_even()) {
                Some("non-dyadic n=2 (b)")
            } else if kind == Some(ComponentType::HA) && j1 >= 1 && unram_odd {
                Some("non-dyadic n=2 (c)")
            } else if j0 >= 5 {
                Some("non-dyadic n=2 (d)")
            } else {
                None
            }
        }
        _ => {
            if j0 == n + 1 && j1 >= 2 && rel.e == 1 {
                Some("non-dyadic n>=3 (a)")
            } else if j0 == n + 2 && j1 >= 1 && rel.e == 1 {
                Some("non-dyadic n>=3 (b)")
            } else if j0 >= n + 3 {
                Some("non-dyadic n>=3 (c)")
            } else {
                None
            }
        }
    };
    Ok(match branch {
        Some(b) => verdict(true, b),
        None => verdict(false, format!("non-dyadic n={}: no clause applies", n.min(3))),
    })
}

/// Bound on |S_i| in the witness family.
pub fn witness_window(field: &Field) -> i64 {
    4 * field.e2() + 4
}

/// Every integral rank-n good BONG with |S_i| ≤ 4e+4, in search order.
pub fn witness_family(field: &Arc<Field>, n: usize) -> Vec<Lattice> {
    let mut out = Vec::new();
    walk_family(field, n, &mut |l| {
        out.push(l.clone());
        false
    });
    out
}

/// Visit the witness family until `visit` returns true; returns the
/// lattice it stopped at.
fn walk_family(field: &Arc<Field>, n: usize, visit: &mut dyn FnMut(&Lattice) -> bool) -> Option<Lattice> {
    let e = field.e2();
    let w = witness_window(field);
    let nu = field.classes().n_units() as u16;
    let mut entries: Vec<ClassOrd> = (0..=w).flat_map(|r| (0..nu).map(move |u| ClassOrd::new(r, u))).collect();
    entries.extend((1..=w).flat_map(|r| (0..nu).map(move |u| ClassOrd::new(-r, u))));
    let mut cur = Vec::with_capacity(n);
    walk(field, n, e, &entries, &mut cur, visit)
}

fn walk(
    field: &Arc<Field>,
    n: usize,
    e: i64,
    entries: &[ClassOrd],
    cur: &mut Vec<ClassOrd>,
    visit: &mut dyn FnMut(&Lattice) -> bool,
) -> Option<Lattice> {
    for &c in entries {
        if cur.is_empty() && c.ord < 0 {
            continue;
        }
        if cur.last().is_some_and(|l| c.ord < l.ord - 2 * e) {
            continue;
        }
        cur.push(c);
        if let Ok(l) = Lattice::from_bong(field, cur) {
            if cur.len() == n {
                if visit(&l) {
                    return Some(l);
                }
            } else if let Some(found) = walk(field, n, e, entries, cur, visit) {
                return Some(found);
            }
        }
        cur.pop();
    }
    None
}

/// The first member of the witness family that `m` does not represent.
pub fn search_witness(m: &Lattice, n: usize) -> Result<Option<Lattice>> {
    let mut err = None;
    let found = walk_family(m.field(), n, &mut |cand| {
        if n > m.rank() {
            return true;
        }
        match represents(m, cand) {
            Ok(ok) => !ok,
            Err(e) => {
                err = Some(e);
                true
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// A rank-n integral lattice not represented by M (or by M ⊗ O_E when an
/// embedding is given). Fails with `VerdictMismatch` if M is n-universal
/// at that level and with `WitnessGap` if the family holds no witness.
pub fn find_counterexample(m: &Lattice, n: usize, emb: Option<&ExtensionEmbedding>) -> Result<Lattice> {
    let (v, target) = match emb {
        Some(emb) => (is_n_universal_over_ext(m, n, emb)?, lift_lattice(m, emb)?),
        None => (is_n_universal(m, n)?, m.clone()),
    };
    if v.verdict {
        return Err(Error::VerdictMismatch(format!("lattice is {n}-universal ({})", v.theorem_branch)));
    }
    search_witness(&target, n)?.ok_or_else(|| Error::WitnessGap(format!("rank {n} over {}", target.field().name())))
}

/// The verdict together with a verified witness when it is negative.
pub fn universality_report(m: &Lattice, n: usize, emb: Option<&ExtensionEmbedding>) -> Result<UniversalityVerdict> {
    let mut v = match emb {
        Some(emb) => is_n_universal_over_ext(m, n, emb)?,
        None => is_n_universal(m, n)?,
    };
    if !v.verdict {
        let w = find_counterexample(m, n, emb)?;
        v.witness = Some(w.labels());
    }
    Ok(v)
}
