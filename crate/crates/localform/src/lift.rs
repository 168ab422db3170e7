//! Finite extensions E/F: the embedding, the field norm, lifting of
//! lattices and their invariants, and computational checks of the lifting
//! laws, the local Springer theorem and the norm principles for spinor
//! norm groups.
//!
//! The base field is either Q_p or E itself. Every base element is then
//! π_F^v·u with u a p-adic unit, which embeds as p^v·u.

use crate::bong::{d_bracket2, jordan_profile_nondyadic, InvariantTable, Lattice};
use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::padic::{Field, PadicElement, Ring};
use crate::representation::{a_next_shifted, a_value, lattice_isometric, lattice_represents, represents};
use crate::spinor::{big_g, g_group, theta, theta_rel};
use crate::square_classes::{ClassOrd, ClassSet, SquareClass};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use std::sync::Arc;

/// The inclusion F ⊆ E with its ramification data and the field norm.
#[derive(Debug)]
pub struct ExtensionEmbedding {
    base: Arc<Field>,
    ext: Arc<Field>,
    e_rel: i64,
    f_rel: i64,
    degree: usize,
    /// Lift of the F-class `π^r·u` at index `2u + r`, r ∈ {0, 1}.
    lift_table: Vec<ClassOrd>,
    /// N_{E/F} on square classes, indexed by the E-class.
    norm_table: Vec<SquareClass>,
}

impl ExtensionEmbedding {
    pub fn new(base: &Arc<Field>, ext: &Arc<Field>) -> Result<ExtensionEmbedding> {
        let identity = base.spec() == ext.spec();
        if base.p() != ext.p() || (!identity && !base.spec().steps.is_empty()) {
            return Err(Error::TowerMismatch(base.name().into(), ext.name().into()));
        }
        let mut emb = ExtensionEmbedding {
            base: base.clone(),
            ext: ext.clone(),
            e_rel: (ext.e_abs() / base.e_abs()) as i64,
            f_rel: (ext.f_abs() / base.f_abs()) as i64,
            degree: ext.degree() / base.degree(),
            lift_table: Vec::new(),
            norm_table: Vec::new(),
        };
        let tb = base.classes();
        let te = ext.classes();
        for u in 0..tb.n_units() as u16 {
            for r in 0..2 {
                let x = emb.embed(&tb.element(base, ClassOrd::new(r, u)))?;
                emb.lift_table.push(te.classify(ext, &x)?);
            }
        }
        for c in te.all() {
            let y = emb.field_norm(&te.element(ext, te.class_ord(c)))?;
            emb.norm_table.push(tb.canonical(base, &y)?);
        }
        Ok(emb)
    }

    /// Build an embedding from two catalog names.
    pub fn from_catalog(base: &str, ext: &str) -> Result<ExtensionEmbedding> {
        ExtensionEmbedding::new(&crate::padic::catalog(base)?, &crate::padic::catalog(ext)?)
    }

    pub fn base(&self) -> &Arc<Field> {
        &self.base
    }
    pub fn ext(&self) -> &Arc<Field> {
        &self.ext
    }
    pub fn e_rel(&self) -> i64 {
        self.e_rel
    }
    pub fn f_rel(&self) -> i64 {
        self.f_rel
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn is_identity(&self) -> bool {
        self.degree == 1
    }

    /// The image of a base element in E.
    pub fn embed(&self, x: &PadicElement) -> Result<PadicElement> {
        if self.is_identity() {
            return Ok(x.clone());
        }
        Ok(match x {
            PadicElement::Zero => PadicElement::Zero,
            PadicElement::Approx { abs_prec } => PadicElement::Approx { abs_prec: abs_prec * self.e_rel },
            PadicElement::Nz { val, unit, prec, exact } => {
                let m = self.base.modulus();
                let signed = if unit[0] > m / 2 { unit[0] as i128 - m as i128 } else { unit[0] as i128 };
                let p = BigInt::from(self.base.p());
                let mut q = BigRational::from_integer(BigInt::from(signed));
                if *val >= 0 {
                    q *= BigRational::from_integer(p.pow(*val as u32));
                } else {
                    q /= BigRational::from_integer(p.pow((-*val) as u32));
                }
                match self.ext.rational(&q) {
                    PadicElement::Nz { val: v, unit: u, prec: p2, exact: ex } => {
                        let exact = *exact && ex;
                        let prec = if exact { p2 } else { p2.min(prec * self.e_rel) };
                        PadicElement::Nz { val: v, unit: u, prec, exact }
                    }
                    other => other,
                }
            }
        })
    }

    /// Lift of a base class modulo unit squares.
    pub fn lift_class(&self, c: ClassOrd) -> ClassOrd {
        if self.is_identity() {
            return c;
        }
        let r = c.ord.rem_euclid(2);
        let k = (c.ord - r) / 2;
        self.lift_table[2 * c.unit as usize + r as usize].shift(2 * k * self.e_rel)
    }

    /// Lift of a square class of F.
    pub fn lift_square_class(&self, c: SquareClass) -> SquareClass {
        let tb = self.base.classes();
        self.ext.classes().class(self.lift_class(tb.class_ord(c)))
    }

    /// N_{E/F}(x) as the determinant of multiplication by x.
    pub fn field_norm(&self, x: &PadicElement) -> Result<PadicElement> {
        if self.is_identity() {
            return Ok(x.clone());
        }
        match x {
            PadicElement::Zero => Ok(PadicElement::Zero),
            PadicElement::Approx { abs_prec } => Ok(PadicElement::Approx { abs_prec: abs_prec * self.f_rel }),
            PadicElement::Nz { val, unit, prec, .. } => {
                let base = &self.base;
                let nu = self.norm_of_ring(unit);
                let npi = self.norm_of_ring(self.ext.ring_pi());
                let rel = (prec / self.e_rel).min(self.ext.p_digits() as i64);
                let nu = base.normalize(0, base.ring_scalar(nu), rel, false);
                let npi = base.normalize(0, base.ring_scalar(npi), self.ext.p_digits() as i64, false);
                let out = base.mul(&base.pow(&npi, *val)?, &nu);
                if let PadicElement::Approx { .. } = out {
                    return Err(Error::PrecisionExhausted("norm lost all digits".into()));
                }
                Ok(out)
            }
        }
    }

    /// det of multiplication by `r` on O_E, reduced modulo the base modulus.
    fn norm_of_ring(&self, r: &[u64]) -> u64 {
        let ext = &self.ext;
        let n = ext.ring_len();
        let mut cols: Vec<Ring> = Vec::with_capacity(n);
        for k in 0..n {
            let mut b = ext.ring_zero();
            b[k] = 1;
            cols.push(ext.ring_mul(r, &b));
        }
        let a: Vec<Vec<BigInt>> = (0..n).map(|i| (0..n).map(|j| BigInt::from(cols[j][i])).collect()).collect();
        let m = BigInt::from(ext.modulus()).min(BigInt::from(self.base.modulus()));
        bareiss_det(a).mod_floor(&m).to_u64().expect("reduced determinant fits")
    }

    /// N_{E/F} on square classes.
    pub fn norm_class(&self, c: SquareClass) -> SquareClass {
        self.norm_table[c.0 as usize]
    }

    /// Image of a set of E-classes under the norm.
    pub fn norm_image(&self, s: &ClassSet) -> ClassSet {
        s.iter().map(|c| self.norm_class(c)).collect()
    }
}

/// Determinant of an integer matrix by fraction-free elimination.
fn bareiss_det(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// The lattice M ⊗ O_E relative to the lifted BONG.
pub fn lift_lattice(m: &Lattice, emb: &ExtensionEmbedding) -> Result<Lattice> {
    if m.field().spec() != emb.base().spec() {
        return Err(Error::TowerMismatch(m.field().name().into(), emb.base().name().into()));
    }
    let bong: Vec<ClassOrd> = m.bong().iter().map(|&c| emb.lift_class(c)).collect();
    let lifted = Lattice::from_bong(emb.ext(), &bong)
        .map_err(|err| Error::LawViolation(format!("lifted BONG is not good: {err}")))?;
    let (b, l) = (m.table(), lifted.table());
    let e = emb.e_rel();
    if l.scale_ord != b.scale_ord * e || l.norm_ord != b.norm_ord * e || l.volume_ord != b.volume_ord * e {
        return Err(Error::LawViolation("scale, norm or volume order does not scale by e_rel".into()));
    }
    if !m.field().is_dyadic() {
        let jb = jordan_profile_nondyadic(m)?;
        let jl = jordan_profile_nondyadic(&lifted)?;
        let ok = jb.len() == jl.len() && jb.iter().zip(&jl).all(|(x, y)| y.scale == x.scale * e && y.rank == x.rank);
        if !ok {
            return Err(Error::LawViolation("Jordan profile does not lift".into()));
        }
    }
    Ok(lifted)
}

/// Which equality case of the defect lifting law applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DefectCase {
    /// d(c) < 2e and e_rel odd.
    SmallOddRamification,
    /// d(c) = 2e and f_rel odd.
    DeltaOddInertia,
    /// d(c) = ∞.
    Square,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DefectLift {
    pub class: String,
    pub d: Dx,
    pub d_tilde: Dx,
    pub case: Option<DefectCase>,
}

/// d(c) over F against d̃(c) computed in E.
pub fn lifted_defect(c: SquareClass, emb: &ExtensionEmbedding) -> Result<DefectLift> {
    let base = emb.base();
    if !base.is_dyadic() {
        return Err(Error::NonDyadicField);
    }
    let tb = base.classes();
    let d = tb.defect(c);
    let d_tilde = emb.ext().classes().defect(emb.lift_square_class(c));
    let e = base.e2();
    let case = if d.is_inf() {
        Some(DefectCase::Square)
    } else if d == Dx::int(2 * e) {
        (emb.f_rel() % 2 == 1).then_some(DefectCase::DeltaOddInertia)
    } else {
        (emb.e_rel() % 2 == 1).then_some(DefectCase::SmallOddRamification)
    };
    let scaled = d.times(emb.e_rel());
    if d_tilde < scaled || (d_tilde == scaled) != case.is_some() {
        return Err(Error::LawViolation(format!(
            "defect lifting fails for {}: d = {d}, d~ = {d_tilde}, case {case:?}",
            tb.label(c)
        )));
    }
    Ok(DefectLift { class: tb.label(c).to_string(), d, d_tilde, case })
}

/// One law checked over a family of instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LawCheck {
    pub law: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl LawCheck {
    fn new(law: &str) -> LawCheck {
        LawCheck { law: law.to_string(), checked: 0, failures: Vec::new() }
    }
    fn check(&mut self, holds: bool, detail: impl FnOnce() -> String) {
        self.checked += 1;
        if !holds {
            self.failures.push(detail());
        }
    }
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

fn ensure(laws: &[LawCheck]) -> Result<()> {
    match laws.iter().find(|l| !l.holds()) {
        Some(l) => Err(Error::LawViolation(format!("{}: {}", l.law, l.failures.join("; ")))),
        None => Ok(()),
    }
}

/// Base and lifted invariants with every lifting law evaluated.
#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub base_field: String,
    pub ext_field: String,
    pub e_rel: i64,
    pub f_rel: i64,
    pub degree: usize,
    pub base_bong: Vec<String>,
    pub lifted_bong: Vec<String>,
    pub base: InvariantTable,
    pub lifted: InvariantTable,
    pub defects: Vec<DefectLift>,
    pub laws: Vec<LawCheck>,
    pub norm_principle: NormPrincipleReport,
}

impl LiftReport {
    pub fn holds(&self) -> bool {
        self.laws.iter().all(LawCheck::holds) && self.norm_principle.holds()
    }
}

/// Compute the lift report without failing on violated laws.
pub fn lift_report(m: &Lattice, emb: &ExtensionEmbedding) -> Result<LiftReport> {
    let base = m.field();
    if !base.is_dyadic() {
        return Err(Error::NonDyadicField);
    }
    let lifted = lift_lattice(m, emb)?;
    let (e_rel, f_rel) = (emb.e_rel(), emb.f_rel());
    let e = base.e2();
    let tb = base.classes();
    let rank = m.rank();

    let mut r_law = LawCheck::new("R~_i = R_i e_rel");
    for i in 1..=rank {
        r_law.check(lifted.r(i) == m.r(i) * e_rel, || format!("i = {i}"));
    }
    let mut a_ge = LawCheck::new("alpha~_i >= alpha_i e_rel, equality when e_rel is odd");
    let mut a_zero = LawCheck::new("alpha~_i = 0 iff alpha_i = 0");
    let mut a_one = LawCheck::new("alpha~_i = 1 iff alpha_i = 1 and e_rel = 1");
    for i in 1..rank {
        let (a, at) = (m.alpha(i), lifted.alpha(i));
        let scaled = a.times(e_rel);
        a_ge.check(at >= scaled && (e_rel % 2 == 0 || at == scaled), || format!("i = {i}: {at} vs {a}"));
        a_zero.check((at == Dx::ZERO) == (a == Dx::ZERO), || format!("i = {i}"));
        a_one.check((at == Dx::int(1)) == (a == Dx::int(1) && e_rel == 1), || format!("i = {i}"));
    }
    let mut t_law = LawCheck::new("T~_j >= T_j e_rel with the stated equality cases");
    let m1 = tb.minus_one(base);
    for i in 1..rank {
        for j in 0..rank {
            let (t, tt) = (m.table().tgrid[i - 1][j], lifted.table().tgrid[i - 1][j]);
            let scaled = t.times(e_rel);
            let equal_case = j == 0 || {
                let d = tb.defect(tb.mul(m1, tb.class(m.prod(j, j + 1))));
                (e_rel % 2 == 1 && d != Dx::int(2 * e)) || (f_rel % 2 == 1 && d == Dx::int(2 * e))
            };
            t_law.check(tt >= scaled && (!equal_case || tt == scaled), || format!("T_{j}^({i}): {tt} vs {t}"));
        }
    }
    let mut snv = LawCheck::new("scale, norm and volume orders scale by e_rel");
    let (bt, lt) = (m.table(), lifted.table());
    snv.check(
        lt.scale_ord == bt.scale_ord * e_rel && lt.norm_ord == bt.norm_ord * e_rel && lt.volume_ord == bt.volume_ord * e_rel,
        || "orders".into(),
    );
    let mut prop_a = LawCheck::new("property A is preserved");
    prop_a.check(!m.has_property_a() || lifted.has_property_a(), || "lifted lattice lacks property A".into());
    let mut theta_units = LawCheck::new("theta(M) in units implies theta(M~) in units");
    let th = theta(m)?.set;
    let tht = theta(&lifted)?.set;
    theta_units.check(!th.is_subset(&tb.units()) || tht.is_subset(&emb.ext().classes().units()), || "theta".into());

    let mut defect_law = LawCheck::new("d~(c) >= d(c) e_rel with equality exactly in cases (a), (b), (c)");
    let mut defects = Vec::new();
    for c in tb.all() {
        match lifted_defect(c, emb) {
            Ok(dl) => {
                defect_law.check(true, String::new);
                defects.push(dl);
            }
            Err(Error::LawViolation(s)) => defect_law.check(false, || s),
            Err(err) => return Err(err),
        }
    }
    let norm_principle = norm_principle_report(m, emb, None)?;
    Ok(LiftReport {
        base_field: base.name().into(),
        ext_field: emb.ext().name().into(),
        e_rel,
        f_rel,
        degree: emb.degree(),
        base_bong: m.labels(),
        lifted_bong: lifted.labels(),
        base: m.table().clone(),
        lifted: lifted.table().clone(),
        defects,
        laws: vec![r_law, a_ge, a_zero, a_one, t_law, snv, prop_a, theta_units, defect_law],
        norm_principle,
    })
}

/// The lift report, failing with `LawViolation` if any law is violated.
pub fn lifted_invariants(m: &Lattice, emb: &ExtensionEmbedding) -> Result<LiftReport> {
    let r = lift_report(m, emb)?;
    ensure(&r.laws)?;
    ensure(&r.norm_principle.laws)?;
    Ok(r)
}

/// For odd [E:F], check that each lifted comparison of the isometry and
/// representation conditions holds exactly when the base one does, and
/// that d[·] and A_i scale by e_rel.
pub fn lifted_pair_checks(m: &Lattice, n: &Lattice, emb: &ExtensionEmbedding) -> Result<Vec<LawCheck>> {
    if emb.degree().is_multiple_of(2) {
        return Err(Error::OddDegreeRequired);
    }
    if !m.field().is_dyadic() {
        return Err(Error::NonDyadicField);
    }
    let (mr, nr) = (m.rank(), n.rank());
    if nr > mr {
        return Err(Error::RankOrder(nr, mr));
    }
    let mt = lift_lattice(m, emb)?;
    let nt = lift_lattice(n, emb)?;
    let k = emb.e_rel();
    let e = m.field().e2();
    let et = emb.ext().e2();
    let one = ClassOrd::ONE;
    let one_t = emb.lift_class(one);
    let mut scaling = LawCheck::new("d~[a b] = d[a b] e_rel and A~_i = A_i e_rel");
    for i in 1..=mr {
        for j in 1..=nr {
            let (d, dt) = (d_bracket2(m, n, one, i, j)?, d_bracket2(&mt, &nt, one_t, i, j)?);
            scaling.check(dt == d.times(k), || format!("d[a_1,{i} b_1,{j}]"));
        }
    }
    let top = (mr - 1).min(nr);
    let a: Vec<Dx> = (1..=top).map(|i| a_value(m, n, i)).collect::<Result<_>>()?;
    let at: Vec<Dx> = (1..=top).map(|i| a_value(&mt, &nt, i)).collect::<Result<_>>()?;
    for i in 0..top {
        scaling.check(at[i] == a[i].times(k), || format!("A_{}", i + 1));
    }
    let mut fam = Vec::new();
    if mr == nr {
        let mut iso = LawCheck::new("isometry conditions are invariant under odd lifting");
        for i in 1..=nr {
            iso.check((mt.r(i) == nt.r(i)) == (m.r(i) == n.r(i)), || format!("R_{i} = S_{i}"));
        }
        for i in 1..nr {
            iso.check((mt.alpha(i) == nt.alpha(i)) == (m.alpha(i) == n.alpha(i)), || format!("alpha_{i} = beta_{i}"));
            let c = m.prod(1, i).mul(n.prod(1, i));
            let ct = mt.prod(1, i).mul(nt.prod(1, i));
            let lhs = emb.ext().classes().defect_of(ct) >= mt.alpha(i);
            let rhs = m.field().classes().defect_of(c) >= m.alpha(i);
            iso.check(lhs == rhs, || format!("d(a_1,{i} b_1,{i}) >= alpha_{i}"));
        }
        for i in 2..nr {
            let lhs = mt.alpha(i - 1) + mt.alpha(i) > Dx::int(2 * et);
            let rhs = m.alpha(i - 1) + m.alpha(i) > Dx::int(2 * e);
            iso.check(lhs == rhs, || format!("alpha_{} + alpha_{i} > 2e", i - 1));
        }
        fam.push(iso);
    }
    let mut rep = LawCheck::new("representation conditions are invariant under odd lifting");
    for i in 1..=nr {
        rep.check((mt.r(i) <= nt.r(i)) == (m.r(i) <= n.r(i)), || format!("R_{i} <= S_{i}"));
        if 1 < i && i < mr {
            let lhs = mt.r(i) + mt.r(i + 1) <= nt.r(i - 1) + nt.r(i);
            let rhs = m.r(i) + m.r(i + 1) <= n.r(i - 1) + n.r(i);
            rep.check(lhs == rhs, || format!("R_{i} + R_{} <= S_{} + S_{i}", i + 1, i - 1));
        }
    }
    for i in 1..=top {
        let lhs = d_bracket2(&mt, &nt, one_t, i, i)? >= at[i - 1];
        let rhs = d_bracket2(m, n, one, i, i)? >= a[i - 1];
        rep.check(lhs == rhs, || format!("d[a_1,{i} b_1,{i}] >= A_{i}"));
    }
    for i in 2..=(mr - 1).min(nr + 1) {
        rep.check((mt.r(i + 1) > nt.r(i - 1)) == (m.r(i + 1) > n.r(i - 1)), || format!("R_{} > S_{}", i + 1, i - 1));
        let (lhs, rhs) = if i == nr + 1 {
            (
                at[i - 2] + a_next_shifted(&mt, &nt)? > Dx::int(2 * et + mt.r(i)),
                a[i - 2] + a_next_shifted(m, n)? > Dx::int(2 * e + m.r(i)),
            )
        } else {
            (
                at[i - 2] + at[i - 1] > Dx::int(2 * et + mt.r(i) - nt.r(i)),
                a[i - 2] + a[i - 1] > Dx::int(2 * e + m.r(i) - n.r(i)),
            )
        };
        rep.check(lhs == rhs, || format!("A_{} + A_{i} > 2e + R_{i} - S_{i}", i - 1));
    }
    for i in 2..=mr.saturating_sub(2).min(nr + 1) {
        let chain = |l: &Lattice, s: &Lattice, ee: i64| {
            let upper = i == nr + 1 || s.r(i) >= l.r(i + 2);
            upper && l.r(i + 2) > s.r(i - 1) + 2 * ee && s.r(i - 1) >= l.r(i + 1)
        };
        rep.check(chain(&mt, &nt, et) == chain(m, n, e), || format!("chain (iv) at i = {i}"));
    }
    fam.push(rep);
    fam.push(scaling);
    Ok(fam)
}

/// Verdicts of the Springer comparison.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpringerReport {
    pub represents_base: bool,
    pub represents_lifted: bool,
    pub isometric_base: Option<bool>,
    pub isometric_lifted: Option<bool>,
    pub flip: bool,
}

/// Compare representation (and isometry for equal ranks) before and after
/// an odd-degree lift.
pub fn springer_check(m: &Lattice, n: &Lattice, emb: &ExtensionEmbedding) -> Result<SpringerReport> {
    if emb.degree().is_multiple_of(2) {
        return Err(Error::OddDegreeRequired);
    }
    let mt = lift_lattice(m, emb)?;
    let nt = lift_lattice(n, emb)?;
    let represents_base = represents(m, n)?;
    let represents_lifted = represents(&mt, &nt)?;
    let (isometric_base, isometric_lifted) = if m.rank() == n.rank() && m.field().is_dyadic() {
        (Some(lattice_isometric(m, n)?), Some(lattice_isometric(&mt, &nt)?))
    } else {
        (None, None)
    };
    let flip = represents_base != represents_lifted || isometric_base != isometric_lifted;
    Ok(SpringerReport { represents_base, represents_lifted, isometric_base, isometric_lifted, flip })
}

/// One inclusion N_{E/F}(θ̃) ⊆ θ with both sides listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormInclusion {
    pub base_group: Vec<String>,
    pub lifted_group: Vec<String>,
    pub norm_image: Vec<String>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormPrincipleReport {
    pub theta: NormInclusion,
    pub theta_rel: Option<NormInclusion>,
    pub laws: Vec<LawCheck>,
}

impl NormPrincipleReport {
    pub fn holds(&self) -> bool {
        self.theta.holds && self.theta_rel.as_ref().is_none_or(|r| r.holds) && self.laws.iter().all(LawCheck::holds)
    }
}

fn inclusion(emb: &ExtensionEmbedding, base_group: &ClassSet, lifted_group: &ClassSet) -> NormInclusion {
    let image = emb.norm_image(lifted_group);
    NormInclusion {
        base_group: emb.base().classes().labels(base_group),
        lifted_group: emb.ext().classes().labels(lifted_group),
        norm_image: emb.base().classes().labels(&image),
        holds: image.is_subset(base_group),
    }
}

/// The norm principles for θ(M) and, when N is given and represented,
/// θ(M/N), together with the supporting inclusions on every square class.
pub fn norm_principle_report(m: &Lattice, emb: &ExtensionEmbedding, n: Option<&Lattice>) -> Result<NormPrincipleReport> {
    let base = emb.base();
    if !base.is_dyadic() {
        return Err(Error::NonDyadicField);
    }
    let mt = lift_lattice(m, emb)?;
    let theta_incl = inclusion(emb, &theta(m)?.set, &theta(&mt)?.set);
    let theta_rel_incl = match n {
        Some(n) if lattice_represents(m, n)?.verdict => {
            let nt = lift_lattice(n, emb)?;
            Some(inclusion(emb, &theta_rel(m, n)?.set, &theta_rel(&mt, &nt)?.set))
        }
        _ => None,
    };
    Ok(NormPrincipleReport { theta: theta_incl, theta_rel: theta_rel_incl, laws: supporting_inclusions(emb)? })
}

/// The norm principles, failing with `LawViolation` on any violation.
pub fn norm_principle_check(m: &Lattice, emb: &ExtensionEmbedding, n: Option<&Lattice>) -> Result<NormPrincipleReport> {
    let r = norm_principle_report(m, emb, n)?;
    if !r.theta.holds {
        return Err(Error::LawViolation("N(theta(M~)) is not contained in theta(M)".into()));
    }
    if r.theta_rel.as_ref().is_some_and(|x| !x.holds) {
        return Err(Error::LawViolation("N(theta(M~/N~)) is not contained in theta(M/N)".into()));
    }
    ensure(&r.laws)?;
    Ok(r)
}

/// Inclusions that hold for the extension alone: filtration subgroups,
/// ⟨a⟩, N(a), g(a) and G(a) for every a in a window of orders.
pub fn supporting_inclusions(emb: &ExtensionEmbedding) -> Result<Vec<LawCheck>> {
    let base = emb.base();
    let ext = emb.ext();
    let (tb, te) = (base.classes(), ext.classes());
    let (e, et, k) = (base.e2(), ext.e2(), emb.e_rel());
    let mut filt = LawCheck::new("N((1+P^k)E^2) in (1+p^h)F^2 for k > (h-1) e_rel");
    for kk in 0..=2 * et + 2 {
        let h = (kk + k - 1).div_euclid(k);
        let img = emb.norm_image(&te.radical(Dx::int(kk)));
        filt.check(img.is_subset(&tb.radical(Dx::int(h))), || format!("k = {kk}, h = {h}"));
    }
    let mut pieces = LawCheck::new("N(<a~>) in <a>, N(N~(a)) in N(a), N(g~(a)) in g(a)");
    let mut gl = LawCheck::new("N(G~(a)) in G(a)");
    let mut gu = LawCheck::new("G(a) in units implies G~(a) in units");
    let delta_square = emb.lift_square_class(tb.delta_class()) == SquareClass(0);
    let bound = 4 * e + 2;
    for ord in -bound..=bound {
        for u in 0..tb.n_units() as u16 {
            let a = ClassOrd::new(ord, u);
            let at = emb.lift_class(a);
            let (ca, cat) = (tb.class(a), te.class(at));
            let gen = ClassSet::from_iter([SquareClass(0), ca]);
            let gen_t = ClassSet::from_iter([SquareClass(0), cat]);
            pieces.check(emb.norm_image(&gen_t).is_subset(&gen), || format!("<a>, a = {}", tb.label(ca)));
            pieces.check(
                emb.norm_image(&te.norm_group(cat)).is_subset(&tb.norm_group(ca)),
                || format!("N(a), a = {}", tb.label(ca)),
            );
            let in_a = crate::bong::scalar_alpha_phi(base, a).in_a;
            if in_a {
                let g = g_group(base, a)?;
                let gt = g_group(ext, at)?;
                pieces.check(emb.norm_image(&gt).is_subset(&g), || format!("g(a), a = {a:?}"));
            }
            let g = big_g(base, a)?;
            let gt = big_g(ext, at)?;
            gl.check(emb.norm_image(&gt).is_subset(&g), || format!("a = {a:?}"));
            if (in_a || !delta_square) && g.is_subset(&tb.units()) {
                gu.check(gt.is_subset(&te.units()), || format!("a = {a:?}"));
            }
        }
    }
    Ok(vec![filt, pieces, gl, gu])
}
