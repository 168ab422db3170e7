//! The square class group F×/F×², quadratic defects, the Hilbert pairing and
//! the subgroup algebra built on top of them.
//!
//! A class is stored as an index `unit | parity << unit_bits`, where `unit`
//! is an F₂-vector over a fixed basis of O×/O×². Products are XORs.

use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::padic::{Field, PadicElement, Ring};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// An element of F×/F×², as an index into the field's class table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct SquareClass(pub u16);

/// An element of F×/O×²: an exact order together with a unit square class.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassOrd {
    pub ord: i64,
    pub unit: u16,
}

impl ClassOrd {
    pub const ONE: ClassOrd = ClassOrd { ord: 0, unit: 0 };

    pub fn new(ord: i64, unit: u16) -> ClassOrd {
        ClassOrd { ord, unit }
    }
    pub fn mul(self, o: ClassOrd) -> ClassOrd {
        ClassOrd { ord: self.ord + o.ord, unit: self.unit ^ o.unit }
    }
    pub fn inv(self) -> ClassOrd {
        ClassOrd { ord: -self.ord, unit: self.unit }
    }
    pub fn div(self, o: ClassOrd) -> ClassOrd {
        self.mul(o.inv())
    }
    /// Multiply by π^k.
    pub fn shift(self, k: i64) -> ClassOrd {
        ClassOrd { ord: self.ord + k, unit: self.unit }
    }
}

/// A set of square classes (at most 256).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ClassSet(pub [u64; 4]);

impl ClassSet {
    pub fn empty() -> ClassSet {
        ClassSet([0; 4])
    }
    pub fn full(n: usize) -> ClassSet {
        let mut s = ClassSet::empty();
        for i in 0..n {
            s.insert(SquareClass(i as u16));
        }
        s
    }
    pub fn trivial() -> ClassSet {
        ClassSet::singleton(SquareClass(0))
    }
    pub fn singleton(c: SquareClass) -> ClassSet {
        let mut s = ClassSet::empty();
        s.insert(c);
        s
    }
    pub fn insert(&mut self, c: SquareClass) {
        self.0[c.0 as usize / 64] |= 1 << (c.0 % 64);
    }
    pub fn contains(&self, c: SquareClass) -> bool {
        self.0[c.0 as usize / 64] >> (c.0 % 64) & 1 == 1
    }
    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn iter(&self) -> impl Iterator<Item = SquareClass> + '_ {
        (0..256u16).filter(move |&i| self.contains(SquareClass(i))).map(SquareClass)
    }
    pub fn intersect(&self, o: &ClassSet) -> ClassSet {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a &= b;
        }
        r
    }
    pub fn union(&self, o: &ClassSet) -> ClassSet {
        let mut r = *self;
        for (a, b) in r.0.iter_mut().zip(o.0) {
            *a |= b;
        }
        r
    }
    pub fn is_subset(&self, o: &ClassSet) -> bool {
        self.intersect(o) == *self
    }
    /// `{xy : x ∈ self, y ∈ o}`.
    pub fn product(&self, o: &ClassSet) -> ClassSet {
        let mut r = ClassSet::empty();
        for x in self.iter() {
            for y in o.iter() {
                r.insert(SquareClass(x.0 ^ y.0));
            }
        }
        r
    }
    /// The subgroup generated by the set.
    pub fn closure(&self) -> ClassSet {
        let mut r = ClassSet::trivial();
        for x in self.iter() {
            if !r.contains(x) {
                r = r.product(&ClassSet::from_iter([SquareClass(0), x]));
            }
        }
        r
    }
    pub fn is_subgroup(&self) -> bool {
        self.contains(SquareClass(0)) && self.product(self) == *self
    }
}

impl FromIterator<SquareClass> for ClassSet {
    fn from_iter<I: IntoIterator<Item = SquareClass>>(it: I) -> ClassSet {
        let mut s = ClassSet::empty();
        for c in it {
            s.insert(c);
        }
        s
    }
}

impl fmt::Debug for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|c| c.0)).finish()
    }
}

/// Per-field tables for the square class group, computed once at field
/// construction.
#[derive(Debug)]
pub struct ClassTable {
    dyadic: bool,
    e: i64,
    /// Relative precision (π-digits) that determines a unit's square class.
    k: i64,
    unit_bits: u32,
    keys: HashMap<u128, u16>,
    unit_reps: Vec<Ring>,
    unit_labels: Vec<String>,
    labels: Vec<String>,
    defects: Vec<Dx>,
    /// pairing[i] is the bit mask of generators j with (g_i, g_j) = −1;
    /// generators are the unit basis vectors followed by π.
    pairing: Vec<u32>,
    delta: PadicElement,
    delta_class: u16,
    rho: Option<PadicElement>,
}

impl ClassTable {
    pub(crate) fn build(field: &Field) -> Result<ClassTable> {
        let dyadic = field.is_dyadic();
        let e = field.e2();
        let k = if dyadic { 2 * e + 1 } else { 1 };
        let fq = field.residue_field();
        let q_p = field.e_abs() == 1 && field.f_abs() == 1;

        let mut units: Vec<Ring> = field
            .residues_mod(k as usize)
            .into_iter()
            .filter(|x| !fq.is_zero(&field.residue(x)))
            .collect();
        let digits = (k as u32).div_ceil(field.e_abs() as u32);
        if q_p {
            units.sort_by_key(|x| x[0]);
        } else {
            units.sort_by_cached_key(|x| {
                let s = field.fmt_ring(x, digits);
                (s.len(), s)
            });
        }

        let mut keys: HashMap<u128, u16> = HashMap::new();
        let mut members: Vec<(Ring, u16)> = Vec::new();
        for x in &units {
            let sq = field.ring_mul(x, x);
            let key = field.key_mod(&sq, k);
            if keys.insert(key, 0).is_none() {
                members.push((sq, 0));
            }
        }
        let mut bits = 0u32;
        let mut unit_reps: Vec<Option<Ring>> = vec![None; 1];
        for g in &units {
            if keys.contains_key(&field.key_mod(g, k)) {
                continue;
            }
            let bit = 1u16 << bits;
            bits += 1;
            unit_reps.resize(1 << bits, None);
            let snapshot = members.clone();
            for (y, v) in snapshot {
                let z = field.ring_mul(&y, g);
                let key = field.key_mod(&z, k);
                if keys.insert(key, v ^ bit).is_none() {
                    members.push((z, v ^ bit));
                }
            }
        }
        for x in &units {
            let v = keys[&field.key_mod(x, k)] as usize;
            if unit_reps[v].is_none() {
                unit_reps[v] = Some(x.clone());
            }
        }
        let unit_reps: Vec<Ring> = unit_reps.into_iter().map(|r| r.expect("every class is reached")).collect();
        let expected = if dyadic { field.degree() as u32 + 1 } else { 1 };
        if bits != expected {
            return Err(Error::InternalBranchGap(format!(
                "unit square class rank {bits}, expected {expected}"
            )));
        }
        let n_units = 1usize << bits;

        let mut defects = vec![Dx::ZERO; 2 * n_units];
        for (v, rep) in unit_reps.iter().enumerate() {
            let (t, _) = field.improve_square(rep);
            defects[v] = if v == 0 {
                Dx::INF
            } else if dyadic {
                Dx::int(t)
            } else {
                Dx::ZERO
            };
        }

        let (delta, rho) = if dyadic {
            let r = fq
                .elements()
                .find(|x| fq.trace(x) == 1)
                .expect("a residue of trace 1 exists");
            let rho = field.from_ring(field.lift_residue(&r), true);
            let d = field.sub(&field.one(), &field.mul(&field.int(4), &rho));
            (d, Some(rho))
        } else {
            (field.from_ring(unit_reps[1].clone(), true), None)
        };

        let mut table = ClassTable {
            dyadic,
            e,
            k,
            unit_bits: bits,
            keys,
            unit_reps,
            unit_labels: vec![],
            labels: vec![],
            defects,
            pairing: vec![],
            delta_class: 0,
            delta,
            rho,
        };
        table.delta_class = table.classify(field, &table.delta)?.unit;
        if dyadic && table.defects[table.delta_class as usize] != Dx::int(2 * e) {
            return Err(Error::InternalBranchGap("delta has the wrong defect".into()));
        }

        table.unit_labels = if q_p {
            let mut labels = vec![String::new(); n_units];
            let mut left = n_units;
            let mut n = 1i64;
            while left > 0 {
                if n % field.p() as i64 != 0 {
                    let c = table.classify(field, &field.int(n))?;
                    if labels[c.unit as usize].is_empty() {
                        labels[c.unit as usize] = n.to_string();
                        left -= 1;
                    }
                }
                n += 1;
            }
            labels
        } else {
            table.unit_reps.iter().map(|r| field.fmt_ring(r, digits)).collect()
        };
        table.labels = (0..2 * n_units)
            .map(|id| {
                let u = &table.unit_labels[id % n_units];
                if id < n_units {
                    u.clone()
                } else if q_p {
                    (u.parse::<i64>().unwrap() * field.p() as i64).to_string()
                } else if u == "1" {
                    "pi".to_string()
                } else if u.contains(['+', '-']) {
                    format!("pi*({u})")
                } else {
                    format!("pi*{u}")
                }
            })
            .collect();

        let gens: Vec<SquareClass> = (0..bits)
            .map(|b| SquareClass(1 << b))
            .chain([SquareClass(n_units as u16)])
            .collect();
        let mut pairing = vec![0u32; gens.len()];
        for (i, g) in gens.iter().enumerate() {
            let ng = table.norm_group_search(field, *g)?;
            for (j, h) in gens.iter().enumerate() {
                if !ng.contains(*h) {
                    pairing[i] |= 1 << j;
                }
            }
        }
        table.pairing = pairing;
        Ok(table)
    }

    pub fn is_dyadic(&self) -> bool {
        self.dyadic
    }
    /// Number of classes in F×/F×².
    pub fn len(&self) -> usize {
        2 << self.unit_bits
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    /// Number of unit classes O×F×²/F×².
    pub fn n_units(&self) -> usize {
        1 << self.unit_bits
    }
    pub fn unit_bits(&self) -> u32 {
        self.unit_bits
    }
    /// Relative precision needed to classify an element.
    pub fn precision_needed(&self) -> i64 {
        self.k
    }
    pub fn all(&self) -> impl Iterator<Item = SquareClass> {
        (0..self.len() as u16).map(SquareClass)
    }
    pub fn full(&self) -> ClassSet {
        ClassSet::full(self.len())
    }
    pub fn trivial(&self) -> ClassSet {
        ClassSet::trivial()
    }
    /// The unit classes O×F×²/F×².
    pub fn units(&self) -> ClassSet {
        ClassSet::full(self.n_units())
    }
    pub fn delta(&self) -> &PadicElement {
        &self.delta
    }
    pub fn delta_class(&self) -> SquareClass {
        SquareClass(self.delta_class)
    }
    pub fn delta_unit(&self) -> u16 {
        self.delta_class
    }
    pub fn rho(&self) -> Option<&PadicElement> {
        self.rho.as_ref()
    }
    pub fn unit_rep(&self, unit: u16) -> &Ring {
        &self.unit_reps[unit as usize]
    }
    pub fn label(&self, c: SquareClass) -> &str {
        &self.labels[c.0 as usize]
    }
    pub fn labels(&self, s: &ClassSet) -> Vec<String> {
        s.iter().map(|c| self.labels[c.0 as usize].clone()).collect()
    }
    pub fn parity(&self, c: SquareClass) -> i64 {
        (c.0 >> self.unit_bits) as i64 & 1
    }
    pub fn unit_of(&self, c: SquareClass) -> u16 {
        c.0 & ((1 << self.unit_bits) - 1)
    }
    pub fn class(&self, c: ClassOrd) -> SquareClass {
        SquareClass(c.unit | ((c.ord.rem_euclid(2) as u16) << self.unit_bits))
    }
    /// The representative element with the smallest non-negative order.
    pub fn class_ord(&self, c: SquareClass) -> ClassOrd {
        ClassOrd { ord: self.parity(c), unit: self.unit_of(c) }
    }
    pub fn mul(&self, a: SquareClass, b: SquareClass) -> SquareClass {
        SquareClass(a.0 ^ b.0)
    }
    /// The class of −1.
    pub fn minus_one(&self, field: &Field) -> SquareClass {
        self.class(self.classify(field, &field.int(-1)).expect("-1 is a unit"))
    }
    /// An element with the given order and unit class.
    pub fn element(&self, field: &Field, c: ClassOrd) -> PadicElement {
        field.from_unit(c.ord, self.unit_reps[c.unit as usize].clone())
    }

    /// Order and unit square class of a nonzero element.
    pub fn classify(&self, field: &Field, x: &PadicElement) -> Result<ClassOrd> {
        match x {
            PadicElement::Zero => Err(Error::DegenerateForm),
            PadicElement::Approx { abs_prec } => Err(Error::PrecisionExhausted(format!(
                "element vanishes modulo pi^{abs_prec}"
            ))),
            PadicElement::Nz { val, unit, prec, .. } => {
                if *prec < self.k {
                    return Err(Error::PrecisionExhausted(format!(
                        "relative precision {prec} below {}",
                        self.k
                    )));
                }
                let key = field.key_mod(unit, self.k);
                let u = self.keys.get(&key).ok_or_else(|| {
                    Error::InternalBranchGap("unit missing from the class table".into())
                })?;
                Ok(ClassOrd { ord: *val, unit: *u })
            }
        }
    }
    pub fn canonical(&self, field: &Field, x: &PadicElement) -> Result<SquareClass> {
        Ok(self.class(self.classify(field, x)?))
    }

    /// d(c), computed on the class representative.
    pub fn defect(&self, c: SquareClass) -> Dx {
        if self.parity(c) == 1 {
            Dx::ZERO
        } else {
            self.defects[c.0 as usize]
        }
    }
    pub fn defect_checked(&self, c: SquareClass) -> Result<Dx> {
        if !self.dyadic {
            return Err(Error::NonDyadicField);
        }
        Ok(self.defect(c))
    }
    pub fn defect_of(&self, c: ClassOrd) -> Dx {
        self.defect(self.class(c))
    }

    /// Hilbert symbol as a sign.
    pub fn hilbert(&self, a: SquareClass, b: SquareClass) -> i8 {
        let av = self.gen_vector(a);
        let bv = self.gen_vector(b);
        let mut acc = 0u32;
        for (i, row) in self.pairing.iter().enumerate() {
            if av >> i & 1 == 1 {
                acc ^= (row & bv).count_ones() & 1;
            }
        }
        if acc == 0 {
            1
        } else {
            -1
        }
    }
    fn gen_vector(&self, c: SquareClass) -> u32 {
        c.0 as u32
    }

    /// N(a) = {c : (a, c) = 1}.
    pub fn norm_group(&self, a: SquareClass) -> ClassSet {
        self.all().filter(|&c| self.hilbert(a, c) == 1).collect()
    }

    /// N(a) computed directly as the group generated by values z² − a·x².
    pub fn norm_group_search(&self, field: &Field, a: SquareClass) -> Result<ClassSet> {
        let target = if a.0 == 0 { self.len() } else { self.len() / 2 };
        let ao = self.class_ord(a);
        let a_ring = if ao.ord == 0 {
            self.unit_reps[ao.unit as usize].clone()
        } else {
            field.ring_mul(field.ring_pi(), &self.unit_reps[ao.unit as usize])
        };
        let mut found = ClassSet::trivial();
        let max_l = (4 * self.e + 8) as usize;
        for l in 1..=max_l {
            let res = field.residues_mod(l);
            let mut add = |v: Ring| -> Result<()> {
                if field.ring_is_zero(&v) {
                    return Ok(());
                }
                let c = self.canonical(field, &field.from_ring(v, true))?;
                if !found.contains(c) {
                    found = found.union(&ClassSet::singleton(c)).closure();
                }
                Ok(())
            };
            for z in &res {
                add(field.ring_sub(&field.ring_mul(z, z), &a_ring))?;
            }
            for x in &res {
                let x = field.ring_mul(x, field.ring_pi());
                let ax2 = field.ring_mul(&a_ring, &field.ring_mul(&x, &x));
                add(field.ring_sub(&field.ring_one(), &ax2))?;
            }
            if found.len() >= target {
                return Ok(found);
            }
        }
        Err(Error::InternalBranchGap(format!(
            "norm group search for class {} stalled at {} classes",
            a.0,
            found.len()
        )))
    }

    /// Hilbert-orthogonal complement of a subgroup.
    pub fn complement(&self, h: &ClassSet) -> ClassSet {
        self.all().filter(|&c| h.iter().all(|x| self.hilbert(c, x) == 1)).collect()
    }

    /// (1+𝔭^h)F×² = {a : d(a) ≥ h}.
    pub fn radical(&self, h: Dx) -> ClassSet {
        if h <= Dx::ZERO {
            return self.full();
        }
        self.all().filter(|&c| self.defect(c) >= h).collect()
    }
    pub fn radical_group(&self, h: Dx) -> Result<ClassSet> {
        if !self.dyadic {
            return Err(Error::NonDyadicField);
        }
        Ok(self.radical(h))
    }

    /// The exponent h# with ((1+𝔭^{h#})F×²)^⊥ = (1+𝔭^h)F×².
    pub fn hsharp(&self, h: Dx) -> Result<Dx> {
        hsharp(self.e, h)
    }
}

/// The h ↦ h# table for ramification index `e`.
pub fn hsharp(e: i64, h: Dx) -> Result<Dx> {
    if h.is_inf() {
        return Ok(Dx::ZERO);
    }
    let v = h
        .as_int()
        .filter(|v| (0..=2 * e).contains(v))
        .ok_or_else(|| Error::DomainError(format!("h = {h} outside {{0..{}}} ∪ {{inf}}", 2 * e)))?;
    Ok(match v {
        0 => Dx::INF,
        _ if v == 2 * e => Dx::int(1),
        1 => Dx::int(2 * e),
        _ if v % 2 == 1 => Dx::int(2 * e + 2 - v),
        _ => Dx::int(2 * e + 1 - v),
    })
}

/// A subgroup of F×/F×² bound to its field, for the checked public algebra.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub field: Arc<Field>,
    pub set: ClassSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubgroupOp {
    Product,
    Intersect,
    Complement,
    Contains,
    Equals,
}

#[derive(Clone, Debug)]
pub enum SubgroupResult {
    Group(Subgroup),
    Bool(bool),
}

impl Subgroup {
    pub fn new(field: Arc<Field>, set: ClassSet) -> Subgroup {
        Subgroup { field, set }
    }
    pub fn labels(&self) -> Vec<String> {
        self.field.classes().labels(&self.set)
    }
    fn same_field(&self, o: &Subgroup) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) || self.field.spec() == o.field.spec() {
            Ok(())
        } else {
            Err(Error::TowerMismatch(self.field.name().into(), o.field.name().into()))
        }
    }
}

/// Product, intersection, complement, containment and equality of subgroups.
pub fn subgroup_algebra(op: SubgroupOp, h1: &Subgroup, h2: Option<&Subgroup>) -> Result<SubgroupResult> {
    let t = h1.field.classes();
    let other = || -> Result<&Subgroup> {
        let h2 = h2.ok_or_else(|| Error::DomainError("second subgroup required".into()))?;
        h1.same_field(h2)?;
        Ok(h2)
    };
    let group = |s: ClassSet| SubgroupResult::Group(Subgroup::new(h1.field.clone(), s));
    Ok(match op {
        SubgroupOp::Product => group(h1.set.product(&other()?.set)),
        SubgroupOp::Intersect => group(h1.set.intersect(&other()?.set)),
        SubgroupOp::Complement => group(t.complement(&h1.set)),
        SubgroupOp::Contains => SubgroupResult::Bool(other()?.set.is_subset(&h1.set)),
        SubgroupOp::Equals => SubgroupResult::Bool(h1.set == other()?.set),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::catalog;

    #[test]
    fn q2_classes_and_labels() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        assert_eq!(t.len(), 8);
        let labels: Vec<&str> = t.all().map(|c| t.label(c)).collect();
        assert_eq!(labels, ["1", "3", "5", "7", "2", "6", "10", "14"]);
        let five = t.canonical(&k, &k.int(5)).unwrap();
        assert_eq!(five, t.delta_class());
        assert_eq!(t.canonical(&k, &k.int(12)).unwrap(), t.canonical(&k, &k.int(3)).unwrap());
        assert_eq!(t.canonical(&k, &k.int(9)).unwrap(), SquareClass(0));
    }

    #[test]
    fn q2_defects() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let d = |n: i64| t.defect(t.canonical(&k, &k.int(n)).unwrap());
        assert_eq!(d(1), Dx::INF);
        assert_eq!(d(3), Dx::int(1));
        assert_eq!(d(-1), Dx::int(1));
        assert_eq!(d(5), Dx::int(2));
        assert_eq!(d(2), Dx::ZERO);
    }

    #[test]
    fn q2_hilbert_values() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let c = |n: i64| t.canonical(&k, &k.int(n)).unwrap();
        assert_eq!(t.hilbert(c(2), c(5)), -1);
        assert_eq!(t.hilbert(c(3), c(-1)), -1);
        assert_eq!(t.hilbert(c(-1), c(-1)), -1);
        assert_eq!(t.hilbert(c(2), c(7)), 1);
        let n = t.norm_group(c(-1));
        let mut want: Vec<String> = ["1", "5", "2", "10"].iter().map(|s| s.to_string()).collect();
        want.sort();
        let mut got = t.labels(&n);
        got.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn class_counts() {
        for (name, n) in [("Q2", 8), ("Q2u2", 16), ("Q2r2", 16), ("Q2i", 16), ("Q2r3", 32), ("Q2u3", 32), ("Q3", 4), ("Q5", 4)] {
            assert_eq!(catalog(name).unwrap().classes().len(), n, "{name}");
        }
    }

    #[test]
    fn hsharp_table() {
        assert_eq!(hsharp(1, Dx::ZERO).unwrap(), Dx::INF);
        assert_eq!(hsharp(1, Dx::int(2)).unwrap(), Dx::int(1));
        assert_eq!(hsharp(3, Dx::int(4)).unwrap(), Dx::int(3));
        assert_eq!(hsharp(3, Dx::int(3)).unwrap(), Dx::int(5));
        assert_eq!(hsharp(3, Dx::int(1)).unwrap(), Dx::int(6));
        assert_eq!(hsharp(3, Dx::INF).unwrap(), Dx::ZERO);
        assert!(hsharp(1, Dx::int(3)).is_err());
        assert!(hsharp(1, Dx::half(1)).is_err());
    }

    #[test]
    fn radical_q2() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let r2 = t.radical(Dx::int(2));
        assert_eq!(t.labels(&r2), ["1", "5"]);
        assert_eq!(t.radical(Dx::ZERO), t.full());
        assert_eq!(t.radical(Dx::INF), t.trivial());
    }

    #[test]
    fn closure_and_product() {
        let s = ClassSet::from_iter([SquareClass(1), SquareClass(2)]);
        assert_eq!(s.closure().len(), 4);
        assert!(s.closure().is_subgroup());
        assert!(!s.is_subgroup());
    }
}
