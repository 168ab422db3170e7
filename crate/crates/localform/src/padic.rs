//! Local fields as explicit towers over Q_p, with fixed-precision element
//! arithmetic.
//!
//! The ring of integers is `W[Π]/(E(Π))` where `W = Z_p[ζ]/(g(ζ))` is the
//! unramified part and `E` is Eisenstein (or `Π − p` when there is no
//! ramified step). An integral element is stored as its coefficient grid in
//! the basis `ζ^i Π^j` (`i < f`, `j < e`), reduced mod `p^N`.

use crate::error::{Error, Result};
use crate::square_classes::ClassTable;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

/// Total degree cap for towers.
pub const DEGREE_CAP: usize = 6;

/// Raw ring element, coefficient of `ζ^i Π^j` at index `j*f + i`.
pub type Ring = Vec<u64>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Step {
    Unramified { deg: usize },
    /// Monic Eisenstein polynomial, coefficients listed from the leading one
    /// down to the constant term.
    Eisenstein { coeffs: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerSpec {
    pub p: u64,
    #[serde(default)]
    pub steps: Vec<Step>,
}

/// Names resolvable without a JSON spec.
pub const CATALOG: &[&str] = &[
    "Q2", "Q2u2", "Q2u3", "Q2r2", "Q2rm2", "Q2i", "Q2r3", "Q3", "Q3u2", "Q3r2", "Q5",
];

/// Catalog fields of residue characteristic 2.
pub const DYADIC_CATALOG: &[&str] = &["Q2", "Q2u2", "Q2u3", "Q2r2", "Q2rm2", "Q2i", "Q2r3"];

fn eis(c: &[&str]) -> Step {
    Step::Eisenstein { coeffs: c.iter().map(|s| s.to_string()).collect() }
}

/// The tower behind a catalog name.
pub fn catalog_spec(name: &str) -> Option<TowerSpec> {
    let (p, steps) = match name {
        "Q2" => (2, vec![]),
        "Q2u2" => (2, vec![Step::Unramified { deg: 2 }]),
        "Q2u3" => (2, vec![Step::Unramified { deg: 3 }]),
        "Q2r2" => (2, vec![eis(&["1", "0", "-2"])]),
        "Q2rm2" => (2, vec![eis(&["1", "0", "2"])]),
        // x^2+1 is not Eisenstein; its root minus one satisfies y^2+2y+2.
        "Q2i" => (2, vec![eis(&["1", "2", "2"])]),
        "Q2r3" => (2, vec![eis(&["1", "0", "0", "-2"])]),
        "Q3" => (3, vec![]),
        "Q3u2" => (3, vec![Step::Unramified { deg: 2 }]),
        "Q3r2" => (3, vec![eis(&["1", "0", "-3"])]),
        "Q5" => (5, vec![]),
        _ => return None,
    };
    Some(TowerSpec { p, steps })
}

static CACHE: OnceLock<Mutex<HashMap<String, Arc<Field>>>> = OnceLock::new();

/// Look up (and memoize) a catalog field.
pub fn catalog(name: &str) -> Result<Arc<Field>> {
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(f) = cache.lock().unwrap().get(name) {
        return Ok(f.clone());
    }
    let spec = catalog_spec(name).ok_or_else(|| Error::UnknownField(name.to_string()))?;
    let f = Field::construct(name, &spec)?;
    cache.lock().unwrap().insert(name.to_string(), f.clone());
    Ok(f)
}

#[inline]
fn mulm(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}
#[inline]
fn addm(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    (s % m as u128) as u64
}
#[inline]
fn subm(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (g, x, _) = egcd(a as i128, m as i128);
    if g != 1 {
        return None;
    }
    Some(x.rem_euclid(m as i128) as u64)
}

fn egcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = egcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// The residue field `F_p[ζ]/(g)`, elements as coefficient vectors.
#[derive(Clone, Debug)]
pub struct Fq {
    pub p: u64,
    pub f: usize,
    pub g: Vec<u64>,
}

impl Fq {
    pub fn q(&self) -> u64 {
        self.p.pow(self.f as u32)
    }
    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.f]
    }
    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = 1;
        v
    }
    pub fn from_index(&self, mut k: u64) -> Vec<u64> {
        let mut v = self.zero();
        for c in v.iter_mut() {
            *c = k % self.p;
            k /= self.p;
        }
        v
    }
    pub fn index(&self, v: &[u64]) -> u64 {
        v.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }
    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.q()).map(move |k| self.from_index(k))
    }
    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }
    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + y) % self.p).collect()
    }
    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| (x + self.p - y) % self.p).collect()
    }
    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        poly_mulmod(a, b, &self.g, self.p)
    }
    pub fn pow(&self, a: &[u64], mut n: u64) -> Vec<u64> {
        let mut r = self.one();
        let mut b = a.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            n >>= 1;
        }
        r
    }
    pub fn inv(&self, a: &[u64]) -> Vec<u64> {
        self.pow(a, self.q() - 2)
    }
    /// A square root, if one exists (always in characteristic 2).
    pub fn sqrt(&self, a: &[u64]) -> Option<Vec<u64>> {
        if self.p == 2 {
            return Some(self.pow(a, self.q() / 2));
        }
        self.elements().find(|s| self.mul(s, s) == a)
    }
    /// Absolute trace to F_p.
    pub fn trace(&self, a: &[u64]) -> u64 {
        let mut t = self.zero();
        let mut c = a.to_vec();
        for _ in 0..self.f {
            t = self.add(&t, &c);
            c = self.pow(&c, self.p);
        }
        t[0]
    }
}

/// Multiply two polynomials of length `deg g` modulo the monic `g`, with
/// coefficients modulo `m`.
fn poly_mulmod(a: &[u64], b: &[u64], g: &[u64], m: u64) -> Vec<u64> {
    let f = g.len() - 1;
    if f == 1 {
        return vec![mulm(a[0], b[0], m)];
    }
    let mut t = vec![0u64; 2 * f - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            t[i + j] = addm(t[i + j], mulm(x, y, m), m);
        }
    }
    for d in (f..2 * f - 1).rev() {
        let c = t[d];
        if c == 0 {
            continue;
        }
        t[d] = 0;
        for k in 0..f {
            t[d - f + k] = subm(t[d - f + k], mulm(c, g[k] % m, m), m);
        }
    }
    t.truncate(f);
    t
}

/// Monic irreducible polynomials over F_p of degree f, in lexicographic order
/// of their low coefficients; the first one is the fixed residue modulus.
fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1];
    }
    let total = p.pow(f as u32);
    for k in 0..total {
        let mut g: Vec<u64> = (0..f).map(|i| (k / p.pow(i as u32)) % p).collect();
        g.push(1);
        if g[0] != 0 && is_irreducible(&g, p) {
            return g;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], p).unwrap();
    while r.len() > db && !r.is_empty() {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let c = lead * inv_lead % p;
            let shift = r.len() - 1 - db;
            for (i, &bc) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * bc % p) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len() - 1;
    for d in 1..=f / 2 {
        for k in 0..p.pow(d as u32) {
            let mut h: Vec<u64> = (0..d).map(|i| (k / p.pow(i as u32)) % p).collect();
            h.push(1);
            if poly_rem(g, &h, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn vp_big(x: &BigInt, p: u64) -> i64 {
    let pb = BigInt::from(p);
    let mut v = 0;
    let mut y = x.clone();
    while !y.is_zero() && (&y % &pb).is_zero() {
        y /= &pb;
        v += 1;
    }
    v
}

/// A finite-precision element of a local field.
///
/// `Nz` stands for `π^val · u` with `u` a unit known modulo `π^prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PadicElement {
    /// Exact zero.
    Zero,
    /// Known to vanish modulo `π^abs_prec`, value otherwise unknown.
    Approx { abs_prec: i64 },
    Nz { val: i64, unit: Ring, prec: i64, exact: bool },
}

impl PadicElement {
    pub fn is_exact_zero(&self) -> bool {
        matches!(self, PadicElement::Zero)
    }
    /// ord(x), `None` meaning ∞.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match self {
            PadicElement::Zero => Ok(None),
            PadicElement::Approx { abs_prec } => Err(Error::PrecisionExhausted(format!(
                "all digits below pi^{abs_prec} vanish"
            ))),
            PadicElement::Nz { val, .. } => Ok(Some(*val)),
        }
    }
    /// Valuation of a nonzero element (errors otherwise).
    pub fn ord(&self) -> Result<i64> {
        self.valuation()?.ok_or(Error::DivisionByZero)
    }
    pub fn abs_precision(&self) -> Option<i64> {
        match self {
            PadicElement::Zero => None,
            PadicElement::Approx { abs_prec } => Some(*abs_prec),
            PadicElement::Nz { val, prec, .. } => Some(val + prec),
        }
    }
}

/// A local field given as an explicit tower over Q_p.
pub struct Field {
    name: String,
    spec: TowerSpec,
    p: u64,
    f: usize,
    e: usize,
    nd: u32,
    modulus: u64,
    work: i64,
    fq: Fq,
    /// Eisenstein coefficients `c_0..c_{e-1}` (monic, leading term omitted).
    eis: Vec<u64>,
    has_eis: bool,
    /// `p = Π^e · U`.
    u: Ring,
    u_inv: Ring,
    u_exact: bool,
    pi: Ring,
    classes: OnceLock<ClassTable>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({}, p={}, e={}, f={})", self.name, self.p, self.e, self.f)
    }
}

fn working_precision_override() -> Option<i64> {
    std::env::var("LOCALFORM_PRECISION").ok().and_then(|s| s.trim().parse().ok())
}

impl Field {
    /// Build a field from a tower description; the square-class table is
    /// computed here once.
    pub fn construct(name: &str, spec: &TowerSpec) -> Result<Arc<Field>> {
        Self::construct_with_precision(name, spec, working_precision_override())
    }

    pub fn construct_with_precision(
        name: &str,
        spec: &TowerSpec,
        precision: Option<i64>,
    ) -> Result<Arc<Field>> {
        let p = spec.p;
        if !is_prime(p) {
            return Err(Error::InvalidPolynomial(format!("{p} is not prime")));
        }
        let mut f = 1;
        let mut eis_q: Option<Vec<BigRational>> = None;
        let mut seen_eis = false;
        for st in &spec.steps {
            match st {
                Step::Unramified { deg } => {
                    if seen_eis || f != 1 {
                        return Err(Error::InvalidPolynomial(
                            "at most one unramified step, placed before the Eisenstein step".into(),
                        ));
                    }
                    if *deg == 0 {
                        return Err(Error::InvalidPolynomial("degree 0 step".into()));
                    }
                    f = *deg;
                }
                Step::Eisenstein { coeffs } => {
                    if seen_eis {
                        return Err(Error::InvalidPolynomial("at most one Eisenstein step".into()));
                    }
                    seen_eis = true;
                    let mut cs = Vec::new();
                    for c in coeffs {
                        cs.push(parse_rational(c)?);
                    }
                    eis_q = Some(cs);
                }
            }
        }
        let e = match &eis_q {
            Some(cs) => {
                if cs.len() < 3 {
                    return Err(Error::InvalidPolynomial(
                        "Eisenstein step needs degree at least 2".into(),
                    ));
                }
                if !cs[0].is_one() {
                    return Err(Error::InvalidPolynomial("Eisenstein polynomial must be monic".into()));
                }
                cs.len() - 1
            }
            None => 1,
        };
        if e * f > DEGREE_CAP {
            return Err(Error::UnsupportedDegree(e * f, DEGREE_CAP));
        }
        let work = precision.unwrap_or(6 * e as i64 + 12);
        if work < 2 * e as i64 + 2 {
            return Err(Error::PrecisionExhausted(format!("working precision {work} too small")));
        }
        let max_nd = (62.0 / (p as f64).log2()).floor() as u32;
        let want = (work as u32).div_ceil(e as u32) + 4;
        let nd = want.min(max_nd);
        if (nd as i64) * (e as i64) < work {
            return Err(Error::PrecisionExhausted(format!(
                "working precision {work} does not fit machine words for p = {p}"
            )));
        }
        let modulus = p.pow(nd);
        let g = first_irreducible(p, f);
        let fq = Fq { p, f, g: g.clone() };
        let mut eis = vec![0u64; e];
        let mut eis_over_p = vec![0u64; e];
        match &eis_q {
            Some(cs) => {
                // cs[0] is the leading 1; cs[e-k] multiplies y^k.
                for k in 0..e {
                    let c = &cs[e - k];
                    let v = if c.is_zero() { i64::MAX } else { vp_big(c.numer(), p) - vp_big(c.denom(), p) };
                    if v < 1 || (k == 0 && v != 1) {
                        return Err(Error::InvalidPolynomial(format!(
                            "coefficient {c} of y^{k} breaks the Eisenstein condition"
                        )));
                    }
                    eis[k] = rational_mod(c, p, modulus)?;
                    eis_over_p[k] = rational_mod(&(c / BigRational::from_integer(BigInt::from(p))), p, modulus)?;
                }
            }
            None => eis[0] = modulus - p,
        }
        let mut field = Field {
            name: name.to_string(),
            spec: spec.clone(),
            p,
            f,
            e,
            nd,
            modulus,
            work,
            fq,
            eis,
            has_eis: eis_q.is_some(),
            u: vec![],
            u_inv: vec![],
            u_exact: true,
            pi: vec![],
            classes: OnceLock::new(),
        };
        // Π as a ring element.
        let mut pi = field.ring_zero();
        if e == 1 {
            pi[0] = p % modulus;
        } else {
            pi[f] = 1;
        }
        field.pi = pi;
        // V = Σ (c_k/p) Π^k, U = −1/V.
        if field.has_eis {
            let mut v = field.ring_zero();
            for k in 0..e {
                v[k * f] = eis_over_p[k];
            }
            let u_inv = field.ring_neg(&v);
            let u = field.ring_inv_unit(&u_inv);
            field.u_exact = {
                let one = field.ring_one();
                u == one || u == field.ring_neg(&one)
            };
            field.u = u;
            field.u_inv = u_inv;
        } else {
            field.u = field.ring_one();
            field.u_inv = field.ring_one();
        }
        let field = Arc::new(field);
        let table = ClassTable::build(&field)?;
        let _ = field.classes.set(table);
        Ok(field)
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn spec(&self) -> &TowerSpec {
        &self.spec
    }
    pub fn p(&self) -> u64 {
        self.p
    }
    /// Absolute ramification index.
    pub fn e_abs(&self) -> usize {
        self.e
    }
    /// Absolute inertia degree.
    pub fn f_abs(&self) -> usize {
        self.f
    }
    pub fn degree(&self) -> usize {
        self.e * self.f
    }
    pub fn is_dyadic(&self) -> bool {
        self.p == 2
    }
    /// ord(2): e for dyadic fields, 0 otherwise.
    pub fn e2(&self) -> i64 {
        if self.is_dyadic() {
            self.e as i64
        } else {
            0
        }
    }
    pub fn residue_field(&self) -> &Fq {
        &self.fq
    }
    pub fn has_eisenstein(&self) -> bool {
        self.has_eis
    }
    /// Contract precision in π-digits.
    pub fn working_precision(&self) -> i64 {
        self.work
    }
    /// Capacity of stored digits in π-digits.
    pub fn capacity(&self) -> i64 {
        self.nd as i64 * self.e as i64
    }
    pub fn modulus(&self) -> u64 {
        self.modulus
    }
    pub fn p_digits(&self) -> u32 {
        self.nd
    }
    pub fn classes(&self) -> &ClassTable {
        self.classes.get().expect("class table is built at construction")
    }

    // ---------------------------------------------------------------- ring

    pub fn ring_len(&self) -> usize {
        self.e * self.f
    }
    pub fn ring_zero(&self) -> Ring {
        vec![0; self.e * self.f]
    }
    pub fn ring_one(&self) -> Ring {
        let mut r = self.ring_zero();
        r[0] = 1;
        r
    }
    pub fn ring_scalar(&self, c: u64) -> Ring {
        let mut r = self.ring_zero();
        r[0] = c % self.modulus;
        r
    }
    pub fn ring_pi(&self) -> &Ring {
        &self.pi
    }
    /// The generator ζ of the unramified part (1 when f = 1).
    pub fn ring_zeta(&self) -> Ring {
        let mut r = self.ring_zero();
        if self.f > 1 {
            r[1] = 1;
        } else {
            r[0] = 1;
        }
        r
    }
    pub fn ring_is_zero(&self, x: &[u64]) -> bool {
        x.iter().all(|&c| c == 0)
    }
    pub fn ring_add(&self, x: &[u64], y: &[u64]) -> Ring {
        x.iter().zip(y).map(|(&a, &b)| addm(a, b, self.modulus)).collect()
    }
    pub fn ring_sub(&self, x: &[u64], y: &[u64]) -> Ring {
        x.iter().zip(y).map(|(&a, &b)| subm(a, b, self.modulus)).collect()
    }
    pub fn ring_neg(&self, x: &[u64]) -> Ring {
        x.iter().map(|&a| if a == 0 { 0 } else { self.modulus - a }).collect()
    }
    pub fn ring_scale(&self, x: &[u64], c: u64) -> Ring {
        x.iter().map(|&a| mulm(a, c, self.modulus)).collect()
    }
    pub fn ring_mul(&self, x: &[u64], y: &[u64]) -> Ring {
        let (e, f, m) = (self.e, self.f, self.modulus);
        if e == 1 {
            return poly_mulmod(x, y, &self.fq.g, m);
        }
        let mut t = vec![vec![0u64; f]; 2 * e - 1];
        for j1 in 0..e {
            let a = &x[j1 * f..(j1 + 1) * f];
            if a.iter().all(|&c| c == 0) {
                continue;
            }
            for j2 in 0..e {
                let b = &y[j2 * f..(j2 + 1) * f];
                if b.iter().all(|&c| c == 0) {
                    continue;
                }
                let pr = poly_mulmod(a, b, &self.fq.g, m);
                for i in 0..f {
                    t[j1 + j2][i] = addm(t[j1 + j2][i], pr[i], m);
                }
            }
        }
        for j in (e..2 * e - 1).rev() {
            let row = std::mem::take(&mut t[j]);
            if row.iter().all(|&c| c == 0) {
                continue;
            }
            for k in 0..e {
                let c = self.eis[k];
                if c == 0 {
                    continue;
                }
                for i in 0..f {
                    t[j - e + k][i] = subm(t[j - e + k][i], mulm(row[i], c, m), m);
                }
            }
        }
        let mut out = Vec::with_capacity(e * f);
        for row in t.into_iter().take(e) {
            out.extend(row);
        }
        out
    }
    pub fn ring_pow(&self, x: &[u64], mut n: u64) -> Ring {
        let mut r = self.ring_one();
        let mut b = x.to_vec();
        while n > 0 {
            if n & 1 == 1 {
                r = self.ring_mul(&r, &b);
            }
            b = self.ring_mul(&b, &b);
            n >>= 1;
        }
        r
    }
    fn vp(&self, c: u64) -> i64 {
        if c == 0 {
            return self.nd as i64;
        }
        let mut v = 0;
        let mut c = c;
        while c.is_multiple_of(self.p) {
            c /= self.p;
            v += 1;
        }
        v
    }
    /// π-adic order of a ring element, capped at the storage capacity.
    pub fn ring_ord(&self, x: &[u64]) -> i64 {
        let (e, f) = (self.e, self.f);
        let mut best = self.capacity();
        for j in 0..e {
            let v = x[j * f..(j + 1) * f].iter().map(|&c| self.vp(c)).min().unwrap();
            if v < self.nd as i64 {
                best = best.min(e as i64 * v + j as i64);
            }
        }
        best
    }
    /// Divide by Π^t, assuming ord(x) ≥ t. Returns the quotient and the
    /// number of p-adic digits of storage that became unreliable.
    pub fn ring_div_pi(&self, x: &[u64], t: i64) -> (Ring, u32) {
        if t == 0 {
            return (x.to_vec(), 0);
        }
        let (e, f) = (self.e, self.f);
        let q = (t / e as i64) as u32;
        let r = (t % e as i64) as usize;
        let mut y = x.to_vec();
        let mut loss = 0;
        if r > 0 {
            let mut hi = self.ring_zero();
            let mut lo = self.ring_zero();
            for j in 0..e {
                for i in 0..f {
                    let c = y[j * f + i];
                    if j >= r {
                        hi[(j - r) * f + i] = c;
                    } else {
                        lo[(e + j - r) * f + i] = self.div_exact(c, self.p);
                    }
                }
            }
            y = self.ring_add(&hi, &self.ring_mul(&lo, &self.u));
            loss += 1;
        }
        if q > 0 {
            let pq = self.p.pow(q);
            for c in y.iter_mut() {
                *c = self.div_exact(*c, pq);
            }
            y = self.ring_mul(&y, &self.ring_pow(&self.u, q as u64));
            loss += q;
        }
        (y, loss)
    }
    /// Divide a residue by a power of p that divides it, reading the residue
    /// as a signed value so that small negative integers stay exact.
    fn div_exact(&self, c: u64, d: u64) -> u64 {
        debug_assert!(c.is_multiple_of(d));
        let m = self.modulus;
        if c > m / 2 {
            let r = (m - c) / d;
            if r == 0 {
                0
            } else {
                m - r
            }
        } else {
            c / d
        }
    }
    /// Inverse of a unit by Newton iteration (exact modulo p^N).
    pub fn ring_inv_unit(&self, x: &[u64]) -> Ring {
        let res = self.residue(x);
        assert!(!self.fq.is_zero(&res), "ring_inv_unit on a non-unit");
        let mut r = self.lift_residue(&self.fq.inv(&res));
        let two = self.ring_scalar(2);
        let mut digits = 1;
        while digits < self.capacity() {
            let xr = self.ring_mul(x, &r);
            r = self.ring_mul(&r, &self.ring_sub(&two, &xr));
            digits *= 2;
        }
        // One extra step absorbs the p = 2 case where 2 − xr is not a unit
        // correction at the first stage.
        let xr = self.ring_mul(x, &r);
        self.ring_mul(&r, &self.ring_sub(&two, &xr))
    }
    /// Residue of an integral element in F_q.
    pub fn residue(&self, x: &[u64]) -> Vec<u64> {
        x[..self.f].iter().map(|&c| c % self.p).collect()
    }
    /// Lift of a residue using the fixed representatives 0..p−1.
    pub fn lift_residue(&self, r: &[u64]) -> Ring {
        let mut x = self.ring_zero();
        x[..self.f].copy_from_slice(r);
        x
    }
    /// Canonical key of `x mod π^k`.
    pub fn key_mod(&self, x: &[u64], k: i64) -> u128 {
        let (e, f) = (self.e as i64, self.f);
        let mut key: u128 = 0;
        for j in 0..self.e {
            let m = if k > j as i64 { (k - j as i64 + e - 1) / e } else { 0 };
            if m == 0 {
                continue;
            }
            let pm = self.p.pow(m as u32) as u128;
            for i in 0..f {
                key = key * pm + (x[j * f + i] as u128 % pm);
            }
        }
        key
    }
    /// All residues mod π^k as digit sums `Σ r_t Π^t`, in lexicographic
    /// digit order (lowest digit varies slowest).
    pub fn residues_mod(&self, k: usize) -> Vec<Ring> {
        let q = self.fq.q();
        let mut pis = vec![self.ring_one()];
        for t in 1..k {
            pis.push(self.ring_mul(&pis[t - 1], &self.pi));
        }
        let mut out = vec![self.ring_zero()];
        for t in 0..k {
            let mut next = Vec::with_capacity(out.len() * q as usize);
            for x in &out {
                for d in 0..q {
                    let r = self.fq.from_index(d);
                    let term = self.ring_mul(&self.lift_residue(&r), &pis[t]);
                    next.push(self.ring_add(x, &term));
                }
            }
            out = next;
        }
        out
    }

    // ------------------------------------------------------------ elements

    /// Build an element from `π^offset · x` where `x` is known modulo
    /// `π^prec` (absolute, relative to the offset).
    pub fn normalize(&self, offset: i64, x: Ring, prec: i64, exact: bool) -> PadicElement {
        let prec = prec.min(self.capacity());
        if self.ring_is_zero(&x) && exact {
            return PadicElement::Zero;
        }
        let t = self.ring_ord(&x);
        if t >= prec {
            return PadicElement::Approx { abs_prec: offset + prec };
        }
        let (u, loss) = self.ring_div_pi(&x, t);
        let cap = self.e as i64 * (self.nd as i64 - loss as i64);
        PadicElement::Nz { val: offset + t, unit: u, prec: (prec - t).min(cap), exact }
    }
    pub fn zero(&self) -> PadicElement {
        PadicElement::Zero
    }
    pub fn one(&self) -> PadicElement {
        self.int(1)
    }
    /// The uniformizer.
    pub fn uniformizer(&self) -> PadicElement {
        PadicElement::Nz { val: 1, unit: self.ring_one(), prec: self.capacity(), exact: true }
    }
    pub fn pi_pow(&self, k: i64) -> PadicElement {
        PadicElement::Nz { val: k, unit: self.ring_one(), prec: self.capacity(), exact: true }
    }
    pub fn zeta(&self) -> PadicElement {
        self.from_ring(self.ring_zeta(), true)
    }
    /// An integral element from its ring representation.
    pub fn from_ring(&self, x: Ring, exact: bool) -> PadicElement {
        self.normalize(0, x, self.capacity(), exact)
    }
    /// `π^val · unit` for a unit ring element.
    pub fn from_unit(&self, val: i64, unit: Ring) -> PadicElement {
        PadicElement::Nz { val, unit, prec: self.capacity(), exact: true }
    }
    pub fn int(&self, n: i64) -> PadicElement {
        self.rational(&BigRational::from_integer(BigInt::from(n)))
    }
    pub fn rational(&self, q: &BigRational) -> PadicElement {
        if q.is_zero() {
            return PadicElement::Zero;
        }
        let p = self.p;
        let vn = vp_big(q.numer(), p);
        let vd = vp_big(q.denom(), p);
        let pb = BigInt::from(p);
        let n1 = q.numer() / pb.pow(vn as u32);
        let d1 = q.denom() / pb.pow(vd as u32);
        let m = BigInt::from(self.modulus);
        let nm = n1.mod_floor(&m).to_u64().unwrap();
        let dm = d1.mod_floor(&m).to_u64().unwrap();
        let c = mulm(nm, inv_mod(dm, self.modulus).unwrap(), self.modulus);
        let v = vn - vd;
        let mut unit = self.ring_scalar(c);
        if v > 0 {
            unit = self.ring_mul(&unit, &self.ring_pow(&self.u, v as u64));
        } else if v < 0 {
            unit = self.ring_mul(&unit, &self.ring_pow(&self.u_inv, (-v) as u64));
        }
        let small = n1.abs() < BigInt::from(self.modulus / 2);
        let exact = d1.is_one() && small && (v == 0 || self.u_exact);
        PadicElement::Nz { val: v * self.e as i64, unit, prec: self.capacity(), exact }
    }

    pub fn neg(&self, x: &PadicElement) -> PadicElement {
        match x {
            PadicElement::Nz { val, unit, prec, exact } => {
                PadicElement::Nz { val: *val, unit: self.ring_neg(unit), prec: *prec, exact: *exact }
            }
            other => other.clone(),
        }
    }

    pub fn add(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        use PadicElement::*;
        match (x, y) {
            (Zero, o) | (o, Zero) => o.clone(),
            (Approx { abs_prec: a }, Approx { abs_prec: b }) => Approx { abs_prec: (*a).min(*b) },
            (Approx { abs_prec: a }, Nz { val, unit, prec, .. })
            | (Nz { val, unit, prec, .. }, Approx { abs_prec: a }) => {
                if *val < *a {
                    Nz { val: *val, unit: unit.clone(), prec: (*prec).min(a - val), exact: false }
                } else {
                    Approx { abs_prec: (*a).min(val + prec) }
                }
            }
            (
                Nz { val: v1, unit: u1, prec: p1, exact: e1 },
                Nz { val: v2, unit: u2, prec: p2, exact: e2 },
            ) => {
                let (v1, u1, p1, v2, u2, p2) =
                    if v1 <= v2 { (*v1, u1, *p1, *v2, u2, *p2) } else { (*v2, u2, *p2, *v1, u1, *p1) };
                let d = v2 - v1;
                let prec = p1.min(d + p2);
                let s = if d >= self.capacity() {
                    u1.clone()
                } else {
                    let shifted = self.ring_mul(u2, &self.ring_pow(&self.pi, d as u64));
                    self.ring_add(u1, &shifted)
                };
                self.normalize(v1, s, prec, *e1 && *e2)
            }
        }
    }
    pub fn sub(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        self.add(x, &self.neg(y))
    }
    pub fn mul(&self, x: &PadicElement, y: &PadicElement) -> PadicElement {
        use PadicElement::*;
        match (x, y) {
            (Zero, _) | (_, Zero) => Zero,
            (Approx { abs_prec: a }, Approx { abs_prec: b }) => Approx { abs_prec: a + b },
            (Approx { abs_prec: a }, Nz { val, .. }) | (Nz { val, .. }, Approx { abs_prec: a }) => {
                Approx { abs_prec: a + val }
            }
            (
                Nz { val: v1, unit: u1, prec: p1, exact: e1 },
                Nz { val: v2, unit: u2, prec: p2, exact: e2 },
            ) => Nz {
                val: v1 + v2,
                unit: self.ring_mul(u1, u2),
                prec: (*p1).min(*p2),
                exact: *e1 && *e2,
            },
        }
    }
    pub fn inv(&self, x: &PadicElement) -> Result<PadicElement> {
        match x {
            PadicElement::Zero => Err(Error::DivisionByZero),
            PadicElement::Approx { abs_prec } => Err(Error::PrecisionExhausted(format!(
                "inverse of an element vanishing modulo pi^{abs_prec}"
            ))),
            PadicElement::Nz { val, unit, prec, exact } => {
                let one = self.ring_one();
                let is_pm1 = *unit == one || *unit == self.ring_neg(&one);
                Ok(PadicElement::Nz {
                    val: -val,
                    unit: self.ring_inv_unit(unit),
                    prec: *prec,
                    exact: *exact && is_pm1,
                })
            }
        }
    }
    pub fn div(&self, x: &PadicElement, y: &PadicElement) -> Result<PadicElement> {
        Ok(self.mul(x, &self.inv(y)?))
    }
    pub fn pow(&self, x: &PadicElement, n: i64) -> Result<PadicElement> {
        let base = if n < 0 { self.inv(x)? } else { x.clone() };
        let mut r = self.one();
        for _ in 0..n.unsigned_abs() {
            r = self.mul(&r, &base);
        }
        Ok(r)
    }

    /// Square root when one exists at the working precision.
    pub fn sqrt_try(&self, x: &PadicElement) -> Result<Option<PadicElement>> {
        let (val, unit, prec) = match x {
            PadicElement::Zero => return Ok(Some(PadicElement::Zero)),
            PadicElement::Approx { abs_prec } => {
                return Err(Error::PrecisionExhausted(format!("sqrt of O(pi^{abs_prec})")))
            }
            PadicElement::Nz { val, unit, prec, .. } => (*val, unit, *prec),
        };
        if val.rem_euclid(2) == 1 {
            return Ok(None);
        }
        let need = 2 * self.e2() + 1;
        if prec < need {
            return Err(Error::PrecisionExhausted(format!(
                "relative precision {prec} below the square threshold {need}"
            )));
        }
        let x0 = match self.approx_sqrt_unit(unit) {
            Some(r) => r,
            None => return Ok(None),
        };
        // Newton steps z ← z − (z² − u)/(2z) on raw ring elements; the root
        // of a unit known modulo π^prec is determined modulo π^(prec − e).
        let e = self.e2();
        let two_unit = if self.is_dyadic() { self.u.clone() } else { self.ring_scalar(2) };
        let mut z = x0;
        for _ in 0..64 {
            let err = self.ring_sub(&self.ring_mul(&z, &z), unit);
            if self.ring_ord(&err) >= self.capacity() - e - 1 {
                break;
            }
            let (q, _) = self.ring_div_pi(&err, e);
            let corr = self.ring_mul(&q, &self.ring_inv_unit(&self.ring_mul(&two_unit, &z)));
            z = self.ring_sub(&z, &corr);
        }
        let z = PadicElement::Nz { val: 0, unit: z, prec: prec - e, exact: false };
        let root = self.mul(&z, &self.pi_pow(val / 2));
        Ok(Some(root))
    }

    /// For a unit `u`, run digit improvement on `u − x²`. Returns the final
    /// order of `u − x²` (capped at `2e+1`) and the improving `x`.
    ///
    /// Over a non-dyadic field the loop stops after one step, with order 0 for
    /// non-squares.
    pub fn improve_square(&self, u: &[u64]) -> (i64, Ring) {
        let e = self.e2();
        let top = 2 * e + 1;
        let fq = &self.fq;
        let ur = self.residue(u);
        let s = match fq.sqrt(&ur) {
            Some(s) => s,
            None => return (0, self.ring_zero()),
        };
        let mut x = self.lift_residue(&s);
        let four_inv = self.ring_pow(&self.u_inv, 2);
        loop {
            let diff = self.ring_sub(u, &self.ring_mul(&x, &x));
            let t = self.ring_ord(&diff).min(top);
            if t >= top {
                return (top, x);
            }
            if t % 2 == 1 {
                return (t, x);
            }
            let (q, _) = self.ring_div_pi(&diff, t);
            if t < 2 * e {
                let r = fq.sqrt(&self.residue(&q)).expect("char 2 residue fields are perfect");
                let step = self.ring_mul(&self.lift_residue(&r), &self.ring_pow(&self.pi, (t / 2) as u64));
                x = self.ring_add(&x, &step);
            } else {
                // u/x² = 1 + 4w with w = q / (U² x²).
                let x2inv = self.ring_inv_unit(&self.ring_mul(&x, &x));
                let w = self.ring_mul(&self.ring_mul(&q, &x2inv), &four_inv);
                let wr = self.residue(&w);
                let sol = fq.elements().find(|s| fq.add(&fq.mul(s, s), s) == wr);
                match sol {
                    None => return (t, x),
                    Some(s) => {
                        let two_s = self.ring_scale(&self.lift_residue(&s), 2);
                        x = self.ring_mul(&x, &self.ring_add(&self.ring_one(), &two_s));
                    }
                }
            }
        }
    }

    /// An `x` with `ord(u − x²) ≥ 2e+1`, when the unit `u` is a square.
    pub fn approx_sqrt_unit(&self, u: &[u64]) -> Option<Ring> {
        let (t, x) = self.improve_square(u);
        if t > 2 * self.e2() {
            Some(x)
        } else {
            None
        }
    }

    // ------------------------------------------------------------- parsing

    /// Parse an element expression: integers, rationals, `pi`, `z` (the
    /// unramified generator), `delta`, `rho`, with `+ - * / ^` and brackets.
    pub fn parse(&self, s: &str) -> Result<PadicElement> {
        let toks = tokenize(s)?;
        let mut ps = Parser { toks: &toks, pos: 0, field: self };
        let v = ps.expr()?;
        if ps.pos != toks.len() {
            return Err(Error::Parse(format!("trailing input in {s:?}")));
        }
        Ok(v)
    }

    /// Human-readable form of a ring element in the basis ζ^i Π^j.
    pub fn fmt_ring(&self, x: &[u64], digits: u32) -> String {
        let m = self.p.pow(digits.min(self.nd));
        let sym = |c: u64| -> i128 {
            let c = (c % m) as i128;
            if c > m as i128 / 2 {
                c - m as i128
            } else {
                c
            }
        };
        let mut terms = Vec::new();
        for j in 0..self.e {
            for i in 0..self.f {
                let c = sym(x[j * self.f + i]);
                if c == 0 {
                    continue;
                }
                let mut mon = Vec::new();
                if i > 0 {
                    mon.push(if i == 1 { "z".to_string() } else { format!("z^{i}") });
                }
                if j > 0 {
                    mon.push(if j == 1 { "pi".to_string() } else { format!("pi^{j}") });
                }
                let t = if mon.is_empty() {
                    c.to_string()
                } else if c == 1 {
                    mon.join("*")
                } else if c == -1 {
                    format!("-{}", mon.join("*"))
                } else {
                    format!("{c}*{}", mon.join("*"))
                };
                terms.push(t);
            }
        }
        if terms.is_empty() {
            return "0".into();
        }
        let mut s = terms[0].clone();
        for t in &terms[1..] {
            if let Some(rest) = t.strip_prefix('-') {
                s.push('-');
                s.push_str(rest);
            } else {
                s.push('+');
                s.push_str(t);
            }
        }
        s
    }

    pub fn fmt_element(&self, x: &PadicElement) -> String {
        match x {
            PadicElement::Zero => "0".into(),
            PadicElement::Approx { abs_prec } => format!("O(pi^{abs_prec})"),
            PadicElement::Nz { val, unit, prec, .. } => {
                let digits = (*prec as u32).div_ceil(self.e as u32).max(1);
                let u = self.fmt_ring(unit, digits);
                let u = if u.contains(['+', '-']) && *val != 0 { format!("({u})") } else { u };
                match *val {
                    0 => u,
                    1 => format!("pi*{u}"),
                    v => format!("pi^{v}*{u}"),
                }
            }
        }
    }
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(BigRational::new(n, d))
}

fn rational_mod(c: &BigRational, p: u64, m: u64) -> Result<u64> {
    let mb = BigInt::from(m);
    let d = c.denom().mod_floor(&mb).to_u64().unwrap();
    let dinv = inv_mod(d, m)
        .ok_or_else(|| Error::InvalidPolynomial(format!("denominator of {c} divisible by {p}")))?;
    let n = c.numer().mod_floor(&mb).to_u64().unwrap();
    Ok(mulm(n, dinv, m))
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = cs[st..i].iter().collect();
            out.push(Tok::Num(txt.parse().unwrap()));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < cs.len() && cs[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    field: &'a Field,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn expr(&mut self) -> Result<PadicElement> {
        let f = self.field;
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                v = f.add(&v, &t);
            } else if self.eat('-') {
                let t = self.term()?;
                v = f.sub(&v, &t);
            } else {
                return Ok(v);
            }
        }
    }
    fn term(&mut self) -> Result<PadicElement> {
        let f = self.field;
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                let t = self.unary()?;
                v = f.mul(&v, &t);
            } else if self.eat('/') {
                let t = self.unary()?;
                v = f.div(&v, &t)?;
            } else {
                return Ok(v);
            }
        }
    }
    fn unary(&mut self) -> Result<PadicElement> {
        if self.eat('-') {
            let v = self.unary()?;
            return Ok(self.field.neg(&v));
        }
        let b = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let n = match self.peek() {
                Some(Tok::Num(n)) => n.to_i64().ok_or_else(|| Error::Parse("exponent too big".into()))?,
                _ => return Err(Error::Parse("expected exponent".into())),
            };
            self.pos += 1;
            return self.field.pow(&b, if neg { -n } else { n });
        }
        Ok(b)
    }
    fn atom(&mut self) -> Result<PadicElement> {
        let f = self.field;
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(f.rational(&BigRational::from_integer(n)))
            }
            Some(Tok::Ident(id)) => {
                self.pos += 1;
                match id.as_str() {
                    "pi" => Ok(f.uniformizer()),
                    "z" => Ok(f.zeta()),
                    "delta" | "Delta" => Ok(f.classes().delta().clone()),
                    "rho" => f.classes().rho().cloned().ok_or(Error::NonDyadicField),
                    _ => Err(Error::Parse(format!("unknown symbol {id}"))),
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing )".into()));
                }
                Ok(v)
            }
            t => Err(Error::Parse(format!("unexpected token {t:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negligible(k: &Field, x: &PadicElement) -> bool {
        x.abs_precision().is_none_or(|a| a >= k.working_precision())
    }

    #[test]
    fn catalog_degrees() {
        for (name, e, f) in [
            ("Q2", 1, 1),
            ("Q2u2", 1, 2),
            ("Q2u3", 1, 3),
            ("Q2r2", 2, 1),
            ("Q2rm2", 2, 1),
            ("Q2i", 2, 1),
            ("Q2r3", 3, 1),
            ("Q3", 1, 1),
            ("Q3u2", 1, 2),
            ("Q3r2", 2, 1),
            ("Q5", 1, 1),
        ] {
            let k = catalog(name).unwrap();
            assert_eq!((k.e_abs(), k.f_abs()), (e, f), "{name}");
            assert_eq!(k.ring_ord(k.ring_pi()), 1);
        }
    }

    #[test]
    fn valuations_of_small_integers() {
        let q2 = catalog("Q2").unwrap();
        assert_eq!(q2.int(2).valuation().unwrap(), Some(1));
        assert_eq!(q2.int(12).valuation().unwrap(), Some(2));
        let r2 = catalog("Q2r2").unwrap();
        assert_eq!(r2.int(2).valuation().unwrap(), Some(2));
        assert_eq!(r2.int(6).valuation().unwrap(), Some(2));
        let r3 = catalog("Q2r3").unwrap();
        assert_eq!(r3.int(4).valuation().unwrap(), Some(6));
        let i = catalog("Q2i").unwrap();
        assert_eq!(i.int(2).valuation().unwrap(), Some(2));
        assert_eq!(PadicElement::Zero.valuation().unwrap(), None);
    }

    #[test]
    fn exact_cancellation() {
        let k = catalog("Q2").unwrap();
        let s = k.add(&k.int(1), &k.int(-1));
        assert!(s.is_exact_zero());
        let a = k.inv(&k.int(3)).unwrap();
        let b = k.neg(&a);
        assert!(matches!(k.add(&a, &b), PadicElement::Approx { .. }));
        assert!(k.add(&a, &b).valuation().is_err());
    }

    #[test]
    fn pi_times_inverse() {
        for name in CATALOG {
            let k = catalog(name).unwrap();
            let pi = k.uniformizer();
            let r = k.mul(&pi, &k.inv(&pi).unwrap());
            assert_eq!(r, k.one());
        }
    }

    #[test]
    fn inverse_round_trip() {
        for name in CATALOG {
            let k = catalog(name).unwrap();
            let x = k.parse("3+z+pi").unwrap();
            let y = k.inv(&x).unwrap();
            let one = k.mul(&x, &y);
            let d = k.sub(&one, &k.one());
            assert!(negligible(&k, &d), "{name}: {d:?}");
        }
    }

    #[test]
    fn eisenstein_relation_holds() {
        // pi^2 = 2 in Q2r2 and (pi+1)^2 = -1 in Q2i.
        let r2 = catalog("Q2r2").unwrap();
        let pi = r2.uniformizer();
        assert_eq!(r2.sub(&r2.mul(&pi, &pi), &r2.int(2)), PadicElement::Zero);
        let qi = catalog("Q2i").unwrap();
        let i = qi.parse("pi+1").unwrap();
        let s = qi.add(&qi.mul(&i, &i), &qi.one());
        assert!(negligible(&qi, &s));
    }

    #[test]
    fn sqrt_of_nine() {
        let k = catalog("Q2").unwrap();
        let r = k.sqrt_try(&k.int(9)).unwrap().unwrap();
        let diff = k.sub(&k.mul(&r, &r), &k.int(9));
        assert!(negligible(&k, &diff), "{r:?} {diff:?}");
        assert!(k.sqrt_try(&k.int(3)).unwrap().is_none());
        assert!(k.sqrt_try(&k.int(2)).unwrap().is_none());
        let k3 = catalog("Q3").unwrap();
        assert!(k3.sqrt_try(&k3.int(7)).unwrap().is_some());
        assert!(k3.sqrt_try(&k3.int(2)).unwrap().is_none());
    }

    #[test]
    fn invalid_towers_rejected() {
        let bad = TowerSpec { p: 2, steps: vec![eis(&["1", "0", "1"])] };
        assert!(matches!(Field::construct("bad", &bad), Err(Error::InvalidPolynomial(_))));
        let big = TowerSpec { p: 2, steps: vec![Step::Unramified { deg: 7 }] };
        assert!(matches!(Field::construct("big", &big), Err(Error::UnsupportedDegree(7, 6))));
        let notprime = TowerSpec { p: 4, steps: vec![] };
        assert!(Field::construct("np", &notprime).is_err());
    }

    #[test]
    fn ord_of_sum_with_distinct_valuations() {
        let k = catalog("Q2r3").unwrap();
        let a = k.parse("pi^2*(1+pi)").unwrap();
        let b = k.parse("pi^5").unwrap();
        assert_eq!(k.add(&a, &b).ord().unwrap(), 2);
    }
}
