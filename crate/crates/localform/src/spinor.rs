//! The functions g and G on square classes and the integral spinor norm
//! groups θ(M) and θ(M/N).

use crate::bong::{minus_one_unit, scalar_alpha_phi, Lattice};
use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::padic::Field;
use crate::square_classes::{ClassOrd, ClassSet, SquareClass};
use serde::Serialize;

/// Which formula produced a spinor group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Provenance {
    SmallG,
    BigG,
    Theta,
    ThetaRel,
}

/// A subgroup of F×/F×² together with how it was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpinorGroup {
    #[serde(skip)]
    pub set: ClassSet,
    pub provenance: Provenance,
    pub branch: String,
}

fn dyadic(field: &Field) -> Result<()> {
    if field.is_dyadic() {
        Ok(())
    } else {
        Err(Error::NonDyadicField)
    }
}

fn neg(field: &Field, a: ClassOrd) -> ClassOrd {
    ClassOrd { ord: a.ord, unit: a.unit ^ minus_one_unit(field) }
}

/// g(a)F×² = O×F×² ∩ (1+𝔭^{α(a)})F×² ∩ N(−a) for a ∈ 𝒜.
pub fn g_group(field: &Field, a: ClassOrd) -> Result<ClassSet> {
    dyadic(field)?;
    let s = scalar_alpha_phi(field, a);
    if !s.in_a {
        return Err(Error::NotInA);
    }
    let t = field.classes();
    let na = t.norm_group(t.class(neg(field, a)));
    Ok(t.units().intersect(&t.radical(s.alpha)).intersect(&na))
}

/// G(a): ⟨a⟩g(φ_a)F×² for a ∈ 𝒮, N(−a) otherwise.
pub fn big_g(field: &Field, a: ClassOrd) -> Result<ClassSet> {
    dyadic(field)?;
    let t = field.classes();
    let s = scalar_alpha_phi(field, a);
    match s.phi {
        Some(phi) => {
            let gp = g_group(field, phi)?;
            Ok(ClassSet::from_iter([SquareClass(0), t.class(a)]).product(&gp))
        }
        None => Ok(t.norm_group(t.class(neg(field, a)))),
    }
}

/// Closed-form answers for G(a) ⊆ N(−c), G(a) ⊇ O×F×² and G(a) ⊆ O×F×².
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GInclusions {
    pub subset_nc: Option<bool>,
    pub contains_units: bool,
    pub subset_units: bool,
}

pub fn g_inclusion_tests(field: &Field, a: ClassOrd, c: Option<ClassOrd>) -> Result<GInclusions> {
    dyadic(field)?;
    let t = field.classes();
    let e = field.e2();
    let s = scalar_alpha_phi(field, a);
    let r = a.ord;
    let d_neg_a = t.defect_of(neg(field, a));
    let subset_nc = c.map(|c| {
        let neg_c = neg(field, c);
        if let Some(phi) = s.phi {
            let alpha_phi = scalar_alpha_phi(field, phi).alpha;
            let sym = t.hilbert(t.class(a), t.class(neg_c)) == 1;
            let d_neg_c = t.defect_of(neg_c);
            let case_a = s.in_h && d_neg_c >= Dx::int(2 * e);
            let lhs = d_neg_c.max(t.defect_of(c.mul(a)));
            let case_b = lhs.is_inf() || lhs + alpha_phi > Dx::int(2 * e);
            sym && (case_a || case_b)
        } else {
            let cls = t.class(neg_c);
            cls == SquareClass(0) || cls == t.class(neg(field, a))
        }
    });
    let contains_units = d_neg_a >= Dx::int(2 * e)
        && (r <= 4 - 2 * e || (e == 1 && field.f_abs() == 1 && r == 4));
    let subset_units = r % 2 == 0
        && if s.in_a {
            (d_neg_a == Dx::int(2 * e) && -r == 2 * e) || s.in_s
        } else {
            d_neg_a == Dx::int(2 * e) && 2 * e < -r
        };
    Ok(GInclusions { subset_nc, contains_units, subset_units })
}

/// γ(M, N) = min over 1 ≤ i ≤ m−2 of ⌊(R_{i+2} − S_i)/2⌋; `None` when m ≤ 2.
pub fn gamma(m: &Lattice, n: &Lattice) -> Option<i64> {
    (1..=m.rank().saturating_sub(2))
        .filter(|&i| i <= n.rank())
        .map(|i| (m.r(i + 2) - n.r(i)).div_euclid(2))
        .min()
}

/// θ(M) for a dyadic lattice.
pub fn theta(m: &Lattice) -> Result<SpinorGroup> {
    let field = m.field();
    dyadic(field)?;
    let t = field.classes();
    let rank = m.rank();
    if rank == 1 {
        return Ok(SpinorGroup { set: t.trivial(), provenance: Provenance::Theta, branch: "rank 1".into() });
    }
    if m.has_property_a() {
        let mut set = t.trivial();
        for i in 1..rank {
            set = set.product(&big_g(field, m.bong()[i].div(m.bong()[i - 1]))?);
        }
        if let Some(g) = gamma(m, m) {
            set = set.product(&t.radical(Dx::int(g)));
        }
        return Ok(SpinorGroup { set, provenance: Provenance::Theta, branch: "property A".into() });
    }
    let set = if theta_units_criterion(m)? { t.units() } else { t.full() };
    Ok(SpinorGroup { set, provenance: Provenance::Theta, branch: "not property A".into() })
}

/// The two conditions characterising θ(M) ⊆ O×F×².
pub fn theta_units_criterion(m: &Lattice) -> Result<bool> {
    let field = m.field();
    let t = field.classes();
    let e = field.e2();
    let units = t.units();
    for i in 1..m.rank() {
        if !big_g(field, m.bong()[i].div(m.bong()[i - 1]))?.is_subset(&units) {
            return Ok(false);
        }
    }
    for i in 1..=m.rank().saturating_sub(2) {
        if m.r(i) == m.r(i + 2) {
            let h = (m.r(i + 1) - m.r(i)).div_euclid(2);
            if (h - e).rem_euclid(2) != 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// ξ_i = ε_{1,i+1}·η_{1,i−1} (unit class).
fn xi(m: &Lattice, n: &Lattice, i: usize) -> u16 {
    m.prod(1, i + 1).unit ^ n.prod(1, i - 1).unit
}

/// θ(M/N), assuming N is represented by M.
pub fn theta_rel_unchecked(m: &Lattice, n: &Lattice) -> Result<SpinorGroup> {
    let field = m.field();
    dyadic(field)?;
    let t = field.classes();
    let (mr, nr) = (m.rank(), n.rank());
    if nr > mr {
        return Err(Error::RankOrder(nr, mr));
    }
    let group = |set: ClassSet, branch: &str| SpinorGroup {
        set,
        provenance: Provenance::ThetaRel,
        branch: branch.to_string(),
    };
    if mr - nr >= 3 {
        return Ok(group(t.full(), "m-n >= 3"));
    }
    let hyp_i = (1..=mr.saturating_sub(2)).all(|i| m.r(i + 2) > n.r(i));
    if hyp_i {
        let mut set = theta(m)?.set;
        for i in 1..mr {
            let gi = if i <= nr && (1..=i).map(|k| m.r(k) - n.r(k)).sum::<i64>().rem_euclid(2) == 0 {
                big_g(field, ClassOrd { ord: m.r(i + 1) - n.r(i), unit: xi(m, n, i) })?
            } else {
                let c = m.prod(1, i + 1).mul(n.prod(1, i - 1));
                t.norm_group(t.class(neg(field, c)))
            };
            set = set.product(&gi);
        }
        if mr > 2 {
            if let Some(g) = gamma(m, n) {
                set = set.product(&t.radical(Dx::int(g)));
            }
        }
        return Ok(group(set, "gamma product"));
    }
    let hyp_ii = (1..=mr.saturating_sub(2)).any(|j| m.r(j + 2) <= n.r(j));
    if !hyp_ii {
        return Err(Error::InternalBranchGap("neither the gamma-product nor the units-criterion case applies".into()));
    }
    let set = if theta_rel_units_criterion(m, n)? { t.units() } else { t.full() };
    Ok(group(set, "units criterion"))
}

/// θ(M/N) after verifying that M represents N.
pub fn theta_rel(m: &Lattice, n: &Lattice) -> Result<SpinorGroup> {
    if n.rank() > m.rank() {
        return Err(Error::RankOrder(n.rank(), m.rank()));
    }
    if !crate::representation::lattice_represents(m, n)?.verdict {
        return Err(Error::NotRepresented);
    }
    theta_rel_unchecked(m, n)
}

/// The four conditions characterising θ(M/N) ⊆ O×F×². Comparisons that
/// involve an index beyond the rank count as false.
pub fn theta_rel_units_criterion(m: &Lattice, n: &Lattice) -> Result<bool> {
    let field = m.field();
    let t = field.classes();
    let e = field.e2();
    let (mr, nr) = (m.rank(), n.rank());
    let rr = |i: usize| (1..=mr).contains(&i).then(|| m.r(i));
    let ss = |i: usize| (1..=nr).contains(&i).then(|| n.r(i));
    // (i) parity.
    let p0 = m.r(1).rem_euclid(2);
    if (1..=mr).any(|i| m.r(i).rem_euclid(2) != p0) || (1..=nr).any(|i| n.r(i).rem_euclid(2) != p0) {
        return Ok(false);
    }
    // (ii)
    for i in 1..=nr {
        let (Some(r2), Some(si)) = (rr(i + 2), ss(i)) else { continue };
        if r2 > si {
            continue;
        }
        let r1 = rr(i + 1).expect("i+1 < i+2 ≤ m");
        let s1 = ss(i + 1);
        let case_a = s1.is_some_and(|s1| {
            r1 + r2 == si + s1
                && (r2 - r1).rem_euclid(4) == (2 * e).rem_euclid(4)
                && (s1 - si).rem_euclid(4) == (2 * e).rem_euclid(4)
        });
        let case_b = r2 == si && (r2 - r1 == -2 * e || s1.is_some_and(|s1| s1 - si == -2 * e));
        if !(case_a || case_b) {
            return Ok(false);
        }
    }
    // (iii)
    let units = t.units();
    for i in 1..mr {
        let x = xi(m, n, i);
        if t.defect(t.class(neg(field, ClassOrd { ord: 0, unit: x }))) == Dx::int(2 * e) {
            continue;
        }
        if i > nr {
            return Ok(false);
        }
        let hi = match (i > 1).then(|| n.r(i - 1)) {
            Some(s) => s.max(m.r(i + 1)),
            None => m.r(i + 1),
        };
        let lo = match rr(i + 2).filter(|_| i != mr - 1) {
            Some(r) => n.r(i).min(r),
            None => n.r(i),
        };
        if !big_g(field, ClassOrd { ord: hi - lo, unit: x })?.is_subset(&units) {
            return Ok(false);
        }
    }
    // (iv)
    Ok(theta(m)?.set.is_subset(&units) && theta(n)?.set.is_subset(&units))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bong::{build_lattice, LatticeForm};
    use crate::padic::catalog;

    fn c(field: &Field, s: &str) -> ClassOrd {
        field.classes().classify(field, &field.parse(s).unwrap()).unwrap()
    }
    fn lat(name: &str, xs: &[&str]) -> Lattice {
        let k = catalog(name).unwrap();
        build_lattice(&k, &LatticeForm::Bong(xs.iter().map(|s| s.to_string()).collect())).unwrap()
    }

    #[test]
    fn g_of_one_over_q2() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let g = g_group(&k, c(&k, "1")).unwrap();
        assert_eq!(t.labels(&g), ["1", "5"]);
        assert_eq!(g_group(&k, c(&k, "-1/4")).unwrap(), t.units());
        assert_eq!(g_group(&k, c(&k, "1/16")), Err(Error::NotInA));
    }

    #[test]
    fn big_g_examples() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        assert_eq!(big_g(&k, c(&k, "-1/4")).unwrap(), t.units());
        for u in ["-16", "-80"] {
            assert_eq!(big_g(&k, c(&k, u)).unwrap(), t.units(), "{u}");
        }
        let a = c(&k, "1/64");
        assert_eq!(big_g(&k, a).unwrap(), t.norm_group(t.class(neg(&k, a))));
    }

    #[test]
    fn theta_examples() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        assert_eq!(theta(&lat("Q2", &["3"])).unwrap().set, t.trivial());
        assert_eq!(theta(&lat("Q2", &["1", "1", "1"])).unwrap().set, t.full());
        let hh = lat("Q2", &["1", "-1/4", "1", "-1/4"]);
        assert!(!hh.has_property_a());
        assert_eq!(theta(&hh).unwrap().set, t.units());
        let h4h = lat("Q2", &["1", "-1/4", "4", "-1"]);
        assert!(h4h.has_property_a());
        assert_eq!(theta(&h4h).unwrap().set, t.units());
    }

    #[test]
    fn theta_rel_branches() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let m = lat("Q2", &["1", "-1/4", "4", "-1"]);
        let n = lat("Q2", &["1"]);
        assert_eq!(theta_rel_unchecked(&m, &n).unwrap().set, t.full());
        let same = theta_rel_unchecked(&m, &m).unwrap();
        assert!(theta(&m).unwrap().set.is_subset(&same.set));
    }
}
