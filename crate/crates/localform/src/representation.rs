//! Quadratic space invariants, the lattice representation decision for
//! dyadic fields, and lattice isometry.

use crate::bong::{bong_to_gram, d_bracket2, Lattice};
use crate::oracle;
use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::padic::Field;
use crate::square_classes::{ClassOrd, SquareClass};
use serde::Serialize;

/// Dimension, discriminant class and Hasse invariant of a quadratic space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SpaceInvariants {
    pub dim: usize,
    pub disc: u16,
    pub hasse: i8,
}

/// Invariants of the diagonal space [a_1, …, a_k].
pub fn space_invariants(field: &Field, diag: &[ClassOrd]) -> SpaceInvariants {
    let t = field.classes();
    let cls: Vec<SquareClass> = diag.iter().map(|&c| t.class(c)).collect();
    let mut hasse = 1i8;
    for i in 0..cls.len() {
        for j in i + 1..cls.len() {
            hasse *= t.hilbert(cls[i], cls[j]);
        }
    }
    let disc = cls.iter().fold(SquareClass(0), |a, &b| t.mul(a, b));
    SpaceInvariants { dim: cls.len(), disc: disc.0, hasse }
}

/// Whether [u_1, …, u_k] embeds isometrically in [v_1, …, v_l].
pub fn space_represents(field: &Field, u: &[ClassOrd], v: &[ClassOrd]) -> Result<bool> {
    if u.len() > v.len() {
        return Err(Error::RankOrder(u.len(), v.len()));
    }
    let iv = space_invariants(field, v);
    let codim = v.len() - u.len();
    match codim {
        0 => Ok(space_invariants(field, u) == iv),
        1 | 2 => {
            // U ⊥ W ≅ V for some W of dimension codim and discriminant d(V)/d(U).
            let t = field.classes();
            let iu = space_invariants(field, u);
            let delta = t.class_ord(t.mul(SquareClass(iu.disc), SquareClass(iv.disc)));
            let candidates: Vec<Vec<ClassOrd>> = if codim == 1 {
                vec![vec![delta]]
            } else {
                t.all().map(|c| {
                    let c = t.class_ord(c);
                    vec![c, c.mul(delta)]
                })
                .collect()
            };
            Ok(candidates.into_iter().any(|w| {
                let mut full = u.to_vec();
                full.extend(w);
                space_invariants(field, &full) == iv
            }))
        }
        _ => Ok(true),
    }
}

/// The condition of the representation theorem that failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepCondition {
    Space,
    IChain,
    DBracket,
    Iii,
    Iv,
}

/// Verdict of the representation decision with the first failing condition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepDecision {
    pub verdict: bool,
    pub failing: Option<(RepCondition, usize)>,
    /// A_1, …, A_{min(m−1,n)}.
    pub a_values: Vec<Dx>,
}

impl RepDecision {
    fn fail(cond: RepCondition, i: usize, a_values: Vec<Dx>) -> RepDecision {
        RepDecision { verdict: false, failing: Some((cond, i)), a_values }
    }
}

fn neg_one(field: &Field) -> ClassOrd {
    field.classes().class_ord(field.classes().minus_one(field))
}

/// A_i for 1 ≤ i ≤ min(m−1, n).
pub fn a_value(m: &Lattice, n: &Lattice, i: usize) -> Result<Dx> {
    let (mr, nr) = (m.rank(), n.rank());
    if i == 0 || i > (mr - 1).min(nr) {
        return Err(Error::IndexOutOfRange(format!("A_{i} with m = {mr}, n = {nr}")));
    }
    let e = m.field().e2();
    let p1 = m.r(i + 1) - n.r(i);
    let mut v = (Dx::half(p1) + Dx::int(e)).min(Dx::int(p1) + d_bracket2(m, n, neg_one(m.field()), i + 1, i - 1)?);
    if i != 1 && i != mr - 1 {
        let p3 = m.r(i + 2) - n.r(i - 1);
        v = v.min(Dx::int(p3 + p1) + d_bracket2(m, n, ClassOrd::ONE, i + 2, i - 2)?);
    }
    Ok(v)
}

/// A_{n+1} + S_{n+1} for n ≤ m−2, which no longer involves S_{n+1}.
pub fn a_next_shifted(m: &Lattice, n: &Lattice) -> Result<Dx> {
    let (mr, nr) = (m.rank(), n.rank());
    let r2 = m.r(nr + 2);
    let mut v = Dx::int(r2) + d_bracket2(m, n, neg_one(m.field()), nr + 2, nr)?;
    if nr + 3 <= mr {
        let p3 = m.r(nr + 3) - n.r(nr);
        v = v.min(Dx::int(r2 + p3) + d_bracket2(m, n, ClassOrd::ONE, nr + 3, nr - 1)?);
    }
    Ok(v)
}

/// Decide whether the lattice M represents N (dyadic fields).
pub fn lattice_represents(m: &Lattice, n: &Lattice) -> Result<RepDecision> {
    let field = m.field();
    if !field.is_dyadic() {
        return Err(Error::NonDyadicField);
    }
    if n.field().spec() != field.spec() {
        return Err(Error::TowerMismatch(field.name().into(), n.field().name().into()));
    }
    let (mr, nr) = (m.rank(), n.rank());
    if nr > mr {
        return Err(Error::RankOrder(nr, mr));
    }
    let e = field.e2();
    let top = (mr - 1).min(nr);
    let a: Vec<Dx> = (1..=top).map(|i| a_value(m, n, i)).collect::<Result<_>>()?;
    if !space_represents(field, n.bong(), m.bong())? {
        return Ok(RepDecision::fail(RepCondition::Space, 0, a));
    }
    // (i)
    for i in 1..=nr {
        let ok = m.r(i) <= n.r(i) || (1 < i && i < mr && m.r(i) + m.r(i + 1) <= n.r(i - 1) + n.r(i));
        if !ok {
            return Ok(RepDecision::fail(RepCondition::IChain, i, a));
        }
    }
    // (ii)
    for i in 1..=top {
        if d_bracket2(m, n, ClassOrd::ONE, i, i)? < a[i - 1] {
            return Ok(RepDecision::fail(RepCondition::DBracket, i, a));
        }
    }
    // (iii)
    for i in 2..=(mr - 1).min(nr + 1) {
        let hyp = if i == nr + 1 {
            m.r(i + 1) > n.r(i - 1) && a[i - 2] + a_next_shifted(m, n)? > Dx::int(2 * e + m.r(i))
        } else {
            m.r(i + 1) > n.r(i - 1) && a[i - 2] + a[i - 1] > Dx::int(2 * e + m.r(i) - n.r(i))
        };
        if hyp && !space_represents(field, &n.bong()[..i - 1], &m.bong()[..i])? {
            return Ok(RepDecision::fail(RepCondition::Iii, i, a));
        }
    }
    // (iv)
    for i in 2..=(mr.saturating_sub(2)).min(nr + 1) {
        let upper = i == nr + 1 || n.r(i) >= m.r(i + 2);
        let hyp = upper && m.r(i + 2) > n.r(i - 1) + 2 * e && n.r(i - 1) >= m.r(i + 1);
        if hyp && !space_represents(field, &n.bong()[..i - 1], &m.bong()[..i + 1])? {
            return Ok(RepDecision::fail(RepCondition::Iv, i, a));
        }
    }
    Ok(RepDecision { verdict: true, failing: None, a_values: a })
}

/// Representation over any field: the decision procedure when the field
/// is dyadic, the enumeration oracle (rank N ≤ 2) otherwise.
pub fn represents(m: &Lattice, n: &Lattice) -> Result<bool> {
    if m.field().is_dyadic() {
        return Ok(lattice_represents(m, n)?.verdict);
    }
    if n.field().spec() != m.field().spec() {
        return Err(Error::TowerMismatch(m.field().name().into(), n.field().name().into()));
    }
    if n.rank() > m.rank() {
        return Err(Error::RankOrder(n.rank(), m.rank()));
    }
    let field = m.field();
    let gm = bong_to_gram(field, m.bong())?;
    let gn = bong_to_gram(field, n.bong())?;
    let k = oracle::window_base(field, &gm, &gn)?;
    oracle::enum_oracle_represents(field, &gm, &gn, k, oracle::DEFAULT_BUDGET)
}

/// Isometry: equal rank, volume and discriminant, isometric spaces, and a
/// representation (which is then onto).
pub fn lattice_isometric(m: &Lattice, n: &Lattice) -> Result<bool> {
    if m.rank() != n.rank() {
        return Ok(false);
    }
    let t = m.field().classes();
    if m.table().volume_ord != n.table().volume_ord || t.class(m.disc()) != t.class(n.disc()) {
        return Ok(false);
    }
    if !space_represents(m.field(), n.bong(), m.bong())? {
        return Ok(false);
    }
    Ok(lattice_represents(m, n)?.verdict)
}
