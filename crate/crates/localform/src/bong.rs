//! Lattices given by good BONGs, their invariant tables, and conversions
//! from Jordan blocks and Gram matrices.
//!
//! A BONG entry only matters modulo unit squares, so lattices store each
//! entry as a [`ClassOrd`].

use crate::error::{Error, Result};
use crate::ext::Dx;
use crate::padic::{Field, PadicElement};
use crate::square_classes::{ClassOrd, ClassTable, SquareClass};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Rank cap for Gram-matrix input.
pub const GRAM_RANK_CAP: usize = 4;

/// Invariants of a lattice relative to a good BONG. Indices are 1-based in
/// the accessors and 0-based in the vectors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantTable {
    pub r: Vec<i64>,
    pub alpha: Vec<Dx>,
    /// `tgrid[i-1][j]` is T_j^{(i)} for 1 ≤ i ≤ m−1, 0 ≤ j ≤ m−1.
    pub tgrid: Vec<Vec<Dx>>,
    pub unit_parts: Vec<u16>,
    pub norm_ord: i64,
    pub scale_ord: i64,
    pub volume_ord: i64,
}

impl InvariantTable {
    pub fn rank(&self) -> usize {
        self.r.len()
    }
    /// R_i (1-based).
    pub fn r_at(&self, i: usize) -> i64 {
        self.r[i - 1]
    }
    /// α_i (1-based, 1 ≤ i ≤ m−1).
    pub fn alpha_at(&self, i: usize) -> Dx {
        self.alpha[i - 1]
    }
}

/// A lattice relative to a validated good BONG.
#[derive(Clone, Debug)]
pub struct Lattice {
    field: Arc<Field>,
    bong: Vec<ClassOrd>,
    table: InvariantTable,
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Lattice) -> bool {
        self.field.spec() == o.field.spec() && self.bong == o.bong
    }
}

impl Lattice {
    pub fn from_bong(field: &Arc<Field>, bong: &[ClassOrd]) -> Result<Lattice> {
        let table = validate_good_bong(field, bong)?;
        Ok(Lattice { field: field.clone(), bong: bong.to_vec(), table })
    }
    pub fn from_elements(field: &Arc<Field>, diag: &[PadicElement]) -> Result<Lattice> {
        let t = field.classes();
        let bong = diag.iter().map(|x| t.classify(field, x)).collect::<Result<Vec<_>>>()?;
        Lattice::from_bong(field, &bong)
    }
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }
    pub fn bong(&self) -> &[ClassOrd] {
        &self.bong
    }
    pub fn table(&self) -> &InvariantTable {
        &self.table
    }
    pub fn rank(&self) -> usize {
        self.bong.len()
    }
    pub fn r(&self, i: usize) -> i64 {
        self.bong[i - 1].ord
    }
    pub fn alpha(&self, i: usize) -> Dx {
        self.table.alpha[i - 1]
    }
    /// a_i as an element.
    pub fn entry(&self, i: usize) -> PadicElement {
        self.field.classes().element(&self.field, self.bong[i - 1])
    }
    /// Square class of a_i·…·a_j (1-based, empty product is 1).
    pub fn prod(&self, i: usize, j: usize) -> ClassOrd {
        prod(&self.bong, i, j)
    }
    /// Discriminant class a_1⋯a_m.
    pub fn disc(&self) -> ClassOrd {
        self.prod(1, self.rank())
    }
    /// Property A: R_i < R_{i+2} for all i.
    pub fn has_property_a(&self) -> bool {
        (0..self.rank().saturating_sub(2)).all(|i| self.bong[i].ord < self.bong[i + 2].ord)
    }
    /// The lattice scaled by c.
    pub fn scaled(&self, c: ClassOrd) -> Result<Lattice> {
        let b: Vec<ClassOrd> = self.bong.iter().map(|x| x.mul(c)).collect();
        Lattice::from_bong(&self.field, &b)
    }
    /// BONG entries as strings.
    pub fn labels(&self) -> Vec<String> {
        self.bong.iter().map(|&c| self.field.fmt_element(&self.field.classes().element(&self.field, c))).collect()
    }
    /// d[c·a_{i,j}] for the lattice's own BONG.
    pub fn d_bracket(&self, c: ClassOrd, i: usize, j: usize) -> Result<Dx> {
        d_bracket(self.field.classes(), &self.bong, &self.table.alpha, c, i, j)
    }
}

/// Product a_i⋯a_j of BONG classes (1-based, inclusive).
pub fn prod(bong: &[ClassOrd], i: usize, j: usize) -> ClassOrd {
    let mut c = ClassOrd::ONE;
    for k in i..=j {
        if k >= 1 && k <= bong.len() {
            c = c.mul(bong[k - 1]);
        }
    }
    c
}

fn minus(t: &ClassTable, c: ClassOrd, m1: u16) -> SquareClass {
    t.class(ClassOrd { ord: c.ord, unit: c.unit ^ m1 })
}

/// Unit class of −1, derived from the table without a field handle.
pub(crate) fn minus_one_unit(field: &Field) -> u16 {
    field.classes().minus_one(field).0
}

/// Check the good-BONG conditions and compute the invariant table.
pub fn validate_good_bong(field: &Field, bong: &[ClassOrd]) -> Result<InvariantTable> {
    let t = field.classes();
    let e = field.e2();
    let m = bong.len();
    if m == 0 {
        return Err(Error::DegenerateForm);
    }
    let m1 = minus_one_unit(field);
    let r: Vec<i64> = bong.iter().map(|c| c.ord).collect();
    // d(−a_j a_{j+1}) for 1 ≤ j ≤ m−1 (0-based j).
    let dpair: Vec<Dx> = (0..m.saturating_sub(1))
        .map(|j| t.defect(minus(t, bong[j].mul(bong[j + 1]), m1)))
        .collect();
    for i in 0..m.saturating_sub(1) {
        let diff = r[i + 1] - r[i];
        if diff + 2 * e < 0 {
            return Err(Error::NotAGoodBong {
                index: i + 1,
                condition: format!("R_{0}-R_{1}+2e = {2} < 0", i + 2, i + 1, diff + 2 * e),
            });
        }
        if Dx::int(diff) + dpair[i] < Dx::ZERO {
            return Err(Error::NotAGoodBong {
                index: i + 1,
                condition: format!("R_{0}-R_{1}+d(-a_{1}a_{0}) < 0", i + 2, i + 1),
            });
        }
        if i + 2 < m && r[i] > r[i + 2] {
            return Err(Error::NotAGoodBong {
                index: i + 1,
                condition: format!("R_{0} > R_{1}", i + 1, i + 3),
            });
        }
    }
    let mut tgrid = Vec::with_capacity(m.saturating_sub(1));
    let mut alpha = Vec::with_capacity(m.saturating_sub(1));
    for i in 1..m {
        let mut row = Vec::with_capacity(m);
        row.push(Dx::half(r[i] - r[i - 1]) + Dx::int(e));
        for j in 1..m {
            let v = if j <= i {
                Dx::int(r[i] - r[j - 1]) + dpair[j - 1]
            } else {
                Dx::int(r[j] - r[i - 1]) + dpair[j - 1]
            };
            row.push(v);
        }
        alpha.push(row.iter().copied().min().unwrap());
        tgrid.push(row);
    }
    // Cross-check against the two-term form with d[−a_{i,i+1}].
    for i in 1..m {
        let c = ClassOrd { ord: 0, unit: m1 };
        let db = d_bracket(t, bong, &alpha, c, i, i + 1)?;
        let two = (Dx::half(r[i] - r[i - 1]) + Dx::int(e)).min(Dx::int(r[i] - r[i - 1]) + db);
        if two != alpha[i - 1] {
            return Err(Error::LawViolation(format!(
                "alpha_{i} = {} from the T-grid but {two} from the two-term form",
                alpha[i - 1]
            )));
        }
    }
    let volume_ord = r.iter().sum();
    let scale_ord = if m >= 2 { r[0].min((r[0] + r[1]).div_euclid(2)) } else { r[0] };
    Ok(InvariantTable {
        unit_parts: bong.iter().map(|c| c.unit).collect(),
        norm_ord: r[0],
        scale_ord,
        volume_ord,
        r,
        alpha,
        tgrid,
    })
}

/// d[c·a_{i,j}] = min{d(c·a_{i,j}), α_{i−1}, α_j}, dropping α_{i−1} when
/// i−1 ∈ {0, m} and α_j when j ∈ {0, m}.
pub fn d_bracket(t: &ClassTable, bong: &[ClassOrd], alpha: &[Dx], c: ClassOrd, i: usize, j: usize) -> Result<Dx> {
    let m = bong.len();
    if i == 0 || i - 1 > j || j > m {
        return Err(Error::IndexOutOfRange(format!("d[c a_{{{i},{j}}}] with m = {m}")));
    }
    let mut v = t.defect_of(c.mul(prod(bong, i, j)));
    if i - 1 != 0 && i - 1 != m {
        v = v.min(alpha[i - 2]);
    }
    if j != 0 && j != m {
        v = v.min(alpha[j - 1]);
    }
    Ok(v)
}

/// d[c·a_{1,i}·b_{1,j}] for a pair of lattices.
pub fn d_bracket2(m_lat: &Lattice, n_lat: &Lattice, c: ClassOrd, i: usize, j: usize) -> Result<Dx> {
    let (m, n) = (m_lat.rank(), n_lat.rank());
    if i > m || j > n {
        return Err(Error::IndexOutOfRange(format!("d[c a_{{1,{i}}} b_{{1,{j}}}] with m = {m}, n = {n}")));
    }
    let t = m_lat.field.classes();
    let mut v = t.defect_of(c.mul(m_lat.prod(1, i)).mul(n_lat.prod(1, j)));
    if i != 0 && i != m {
        v = v.min(m_lat.alpha(i));
    }
    if j != 0 && j != n {
        v = v.min(n_lat.alpha(j));
    }
    Ok(v)
}

/// Membership data for a scalar a ∈ F×.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarData {
    pub in_a: bool,
    pub in_h: bool,
    pub in_s: bool,
    /// S = e − R/2.
    pub s_value: Dx,
    /// α(a) = min{R/2 + e, R + d(−a)}.
    pub alpha: Dx,
    pub phi: Option<ClassOrd>,
}

/// 𝒜/ℋ/𝒮 membership, α(a) and φ_a.
pub fn scalar_alpha_phi(field: &Field, a: ClassOrd) -> ScalarData {
    let t = field.classes();
    let e = field.e2();
    let r = a.ord;
    let d_neg = t.defect(minus(t, a, minus_one_unit(field)));
    let alpha = (Dx::half(r) + Dx::int(e)).min(Dx::int(r) + d_neg);
    let in_a = r + 2 * e >= 0 && Dx::int(r) + d_neg >= Dx::ZERO;
    let in_h = r == -2 * e && d_neg.is_inf();
    let s_value = Dx::int(e) - Dx::half(r);
    let in_s = in_a && d_neg > s_value;
    let phi = in_s.then(|| {
        if r > 2 * e {
            a.shift(-2 * e)
        } else {
            let fl = s_value.doubled().div_euclid(4);
            a.shift(-r - 2 * fl)
        }
    });
    ScalarData { in_a, in_h, in_s, s_value, alpha, phi }
}

/// φ_a, or `PhiUndefined` when a ∉ 𝒮.
pub fn phi(field: &Field, a: ClassOrd) -> Result<ClassOrd> {
    scalar_alpha_phi(field, a).phi.ok_or(Error::PhiUndefined)
}

// ------------------------------------------------------------------ input

/// A lattice description in one of three forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeForm {
    Bong(Vec<String>),
    Blocks(Vec<Block>),
    Gram(Vec<Vec<String>>),
}

/// A Jordan-type block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Block {
    /// ⟨c⟩.
    Unary(String),
    /// π^r·𝐇.
    Hplane(i64),
    /// π^r·𝐀.
    Aplane(i64),
    /// π^scale times the binary lattice with Gram [[a, 1], [1, b]].
    A { a: String, b: String, scale: i64 },
}

/// Field plus form, as read from lattice JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub field: serde_json::Value,
    pub form: LatticeForm,
}

/// Build a lattice over `field` from any of the three input forms.
pub fn build_lattice(field: &Arc<Field>, form: &LatticeForm) -> Result<Lattice> {
    match form {
        LatticeForm::Bong(xs) => {
            let diag = xs.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()?;
            Lattice::from_elements(field, &diag)
        }
        LatticeForm::Gram(rows) => {
            let g = parse_gram(field, rows)?;
            Lattice::from_bong(field, &gram_to_bong(field, &g)?)
        }
        LatticeForm::Blocks(blocks) => from_blocks(field, blocks),
    }
}

pub fn parse_gram(field: &Field, rows: &[Vec<String>]) -> Result<Vec<Vec<PadicElement>>> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse("Gram matrix must be square".into()));
    }
    rows.iter().map(|r| r.iter().map(|s| field.parse(s)).collect()).collect()
}

fn block_bong(field: &Arc<Field>, b: &Block) -> Result<Vec<ClassOrd>> {
    let t = field.classes();
    let quarter = field.inv(&field.int(4))?;
    let plane = |r: i64, c: &PadicElement| -> Result<Vec<ClassOrd>> {
        let x = field.pi_pow(r);
        let y = field.neg(&field.mul(&field.mul(&x, c), &quarter));
        Ok(vec![t.classify(field, &x)?, t.classify(field, &y)?])
    };
    match b {
        Block::Unary(s) => Ok(vec![t.classify(field, &field.parse(s)?)?]),
        Block::Hplane(r) => plane(*r, &field.one()),
        Block::Aplane(r) => plane(*r, t.delta()),
        Block::A { a, b, scale } => {
            let g = block_gram(field, b_a(a, b, *scale))?;
            gram_to_bong(field, &g)
        }
    }
}

fn b_a<'a>(a: &'a str, b: &'a str, s: i64) -> (&'a str, &'a str, i64) {
    (a, b, s)
}

fn block_gram(field: &Field, (a, b, s): (&str, &str, i64)) -> Result<Vec<Vec<PadicElement>>> {
    let p = field.pi_pow(s);
    Ok(vec![
        vec![field.mul(&p, &field.parse(a)?), p.clone()],
        vec![p.clone(), field.mul(&p, &field.parse(b)?)],
    ])
}

/// The Gram matrix of a block in the standard basis.
pub fn block_gram_matrix(field: &Field, b: &Block) -> Result<Vec<Vec<PadicElement>>> {
    let half = field.inv(&field.int(2))?;
    let plane = |r: i64, diag: (PadicElement, PadicElement)| -> Vec<Vec<PadicElement>> {
        let p = field.pi_pow(r);
        let off = field.mul(&p, &half);
        vec![vec![field.mul(&p, &diag.0), off.clone()], vec![off, field.mul(&p, &diag.1)]]
    };
    Ok(match b {
        Block::Unary(s) => vec![vec![field.parse(s)?]],
        Block::Hplane(r) => plane(*r, (PadicElement::Zero, PadicElement::Zero)),
        Block::Aplane(r) => {
            let rho = field.classes().rho().cloned().ok_or(Error::NonDyadicField)?;
            plane(*r, (field.one(), rho))
        }
        Block::A { a, b, scale } => block_gram(field, (a, b, *scale))?,
    })
}

/// Block-diagonal Gram matrix of a list of blocks.
pub fn blocks_gram(field: &Field, blocks: &[Block]) -> Result<Vec<Vec<PadicElement>>> {
    let parts = blocks.iter().map(|b| block_gram_matrix(field, b)).collect::<Result<Vec<_>>>()?;
    let n: usize = parts.iter().map(|p| p.len()).sum();
    let mut g = vec![vec![PadicElement::Zero; n]; n];
    let mut off = 0;
    for p in parts {
        for (i, row) in p.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                g[off + i][off + j] = x.clone();
            }
        }
        off += p.len();
    }
    Ok(g)
}

fn from_blocks(field: &Arc<Field>, blocks: &[Block]) -> Result<Lattice> {
    if blocks.is_empty() {
        return Err(Error::DegenerateForm);
    }
    let parts = blocks.iter().map(|b| block_bong(field, b)).collect::<Result<Vec<_>>>()?;
    if let Some(l) = merge_blocks(field, &parts) {
        return Ok(l);
    }
    let g = blocks_gram(field, blocks)?;
    if g.len() > GRAM_RANK_CAP {
        return Err(Error::UnsupportedLattice(
            "no interleaving of block BONGs is a good BONG".into(),
        ));
    }
    let bong = gram_to_bong(field, &g)
        .map_err(|_| Error::UnsupportedLattice("no good BONG found for the block sum".into()))?;
    Lattice::from_bong(field, &bong)
}

/// Interleave block BONGs (each kept in order) so that every chosen entry
/// generates the norm of what remains, returning the first good BONG.
fn merge_blocks(field: &Arc<Field>, parts: &[Vec<ClassOrd>]) -> Option<Lattice> {
    fn go(
        field: &Arc<Field>,
        parts: &[Vec<ClassOrd>],
        pos: &mut Vec<usize>,
        acc: &mut Vec<ClassOrd>,
    ) -> Option<Lattice> {
        let heads: Vec<(usize, i64)> = parts
            .iter()
            .enumerate()
            .filter(|(k, p)| pos[*k] < p.len())
            .map(|(k, p)| (k, p[pos[k]].ord))
            .collect();
        if heads.is_empty() {
            return Lattice::from_bong(field, acc).ok();
        }
        let min = heads.iter().map(|h| h.1).min().unwrap();
        for &(k, o) in &heads {
            if o != min {
                continue;
            }
            acc.push(parts[k][pos[k]]);
            pos[k] += 1;
            if let Some(l) = go(field, parts, pos, acc) {
                return Some(l);
            }
            pos[k] -= 1;
            acc.pop();
        }
        None
    }
    let mut pos = vec![0; parts.len()];
    go(field, parts, &mut pos, &mut Vec::new())
}

// ------------------------------------------------------------ Gram path

/// Lower bound for ord(x): the valuation, the known-zero bound, or ∞.
fn ord_lb(x: &PadicElement) -> i64 {
    match x {
        PadicElement::Zero => i64::MAX,
        PadicElement::Approx { abs_prec } => *abs_prec,
        PadicElement::Nz { val, .. } => *val,
    }
}

fn norm_order(field: &Field, g: &[Vec<PadicElement>]) -> Result<i64> {
    let two = field.int(2);
    let mut best = i64::MAX;
    let mut approx_floor = i64::MAX;
    for (i, row) in g.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let v = if i == j {
                x.clone()
            } else if j > i {
                field.mul(&two, x)
            } else {
                continue;
            };
            match v {
                PadicElement::Approx { abs_prec } => approx_floor = approx_floor.min(abs_prec),
                _ => best = best.min(ord_lb(&v)),
            }
        }
    }
    if approx_floor <= best {
        return Err(Error::PrecisionExhausted("norm of a Gram matrix is not determined".into()));
    }
    Ok(best)
}

fn quad(field: &Field, g: &[Vec<PadicElement>], x: &[PadicElement]) -> (PadicElement, Vec<PadicElement>) {
    let n = g.len();
    let gx: Vec<PadicElement> = (0..n)
        .map(|i| (0..n).fold(PadicElement::Zero, |acc, j| field.add(&acc, &field.mul(&g[i][j], &x[j]))))
        .collect();
    let q = (0..n).fold(PadicElement::Zero, |acc, i| field.add(&acc, &field.mul(&x[i], &gx[i])));
    (q, gx)
}

/// Candidate norm-generating vectors: primitive vectors with coordinates in
/// a residue system mod π, simplest first.
fn candidates(field: &Field, n: usize) -> Vec<Vec<PadicElement>> {
    let res: Vec<PadicElement> = field
        .residues_mod(1)
        .into_iter()
        .map(|r| field.from_ring(r, true))
        .collect();
    let q = res.len();
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    let total = q.pow(n as u32);
    for mut k in 0..total {
        let mut idx = vec![0; n];
        for c in idx.iter_mut() {
            *c = k % q;
            k /= q;
        }
        if idx.iter().all(|&c| c == 0) {
            continue;
        }
        let weight = idx.iter().filter(|&&c| c != 0).count();
        out.push((weight, idx));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.iter().rev().cmp(b.1.iter().rev())));
    out.into_iter().map(|(_, idx)| idx.into_iter().map(|c| res[c].clone()).collect()).collect()
}

/// Extract a good BONG from a Gram matrix by choosing norm generators and
/// projecting, backtracking over the choices.
pub fn gram_to_bong(field: &Field, g: &[Vec<PadicElement>]) -> Result<Vec<ClassOrd>> {
    let n = g.len();
    if n == 0 {
        return Err(Error::DegenerateForm);
    }
    if n > GRAM_RANK_CAP {
        return Err(Error::UnsupportedLattice(format!("Gram rank {n} exceeds {GRAM_RANK_CAP}")));
    }
    let mut budget = 4000usize;
    let mut acc = Vec::new();
    match gram_search(field, g, &mut acc, &mut budget)? {
        Some(b) => Ok(b),
        None => Err(Error::UnsupportedLattice("no good BONG found by the bounded search".into())),
    }
}

fn gram_search(
    field: &Field,
    g: &[Vec<PadicElement>],
    acc: &mut Vec<ClassOrd>,
    budget: &mut usize,
) -> Result<Option<Vec<ClassOrd>>> {
    let t = field.classes();
    let n = g.len();
    if n == 0 {
        return Ok(validate_good_bong(field, acc).is_ok().then(|| acc.clone()));
    }
    // Prune as soon as the partial sequence stops being good.
    if acc.len() >= 2 && validate_good_bong(field, acc).is_err() {
        return Ok(None);
    }
    if *budget == 0 {
        return Ok(None);
    }
    *budget -= 1;
    let n0 = norm_order(field, g)?;
    if n0 == i64::MAX {
        return Err(Error::DegenerateForm);
    }
    if n == 1 {
        acc.push(t.classify(field, &g[0][0])?);
        let r = gram_search(field, &[], acc, budget)?;
        acc.pop();
        return Ok(r);
    }
    // Collect norm generators with their projected Gram and projected norm.
    let mut options = Vec::new();
    for x in candidates(field, n) {
        let (q, gx) = quad(field, g, &x);
        if ord_lb(&q) != n0 || !matches!(q, PadicElement::Nz { .. }) {
            continue;
        }
        let piv = (0..n).find(|&i| x[i].valuation().ok().flatten() == Some(0)).unwrap();
        let qinv = field.inv(&q)?;
        let keep: Vec<usize> = (0..n).filter(|&i| i != piv).collect();
        let proj: Vec<Vec<PadicElement>> = keep
            .iter()
            .map(|&j| {
                keep.iter()
                    .map(|&k| field.sub(&g[j][k], &field.mul(&field.mul(&gx[j], &gx[k]), &qinv)))
                    .collect()
            })
            .collect();
        let pn = match norm_order(field, &proj) {
            Ok(v) => v,
            Err(_) => continue,
        };
        options.push((pn, t.classify(field, &q)?, proj));
    }
    options.sort_by(|a, b| b.0.cmp(&a.0));
    let mut seen = std::collections::HashSet::new();
    for (_, c, proj) in options {
        if !seen.insert((c, proj.iter().flatten().map(|x| format!("{x:?}")).collect::<Vec<_>>())) {
            continue;
        }
        acc.push(c);
        let r = gram_search(field, &proj, acc, budget)?;
        acc.pop();
        if r.is_some() {
            return Ok(r);
        }
    }
    Ok(None)
}

/// A Gram matrix of a lattice with the given good BONG, built as
/// x_1, y_j + t_j x_1 over a Gram matrix of the projected lattice.
pub fn bong_to_gram(field: &Field, bong: &[ClassOrd]) -> Result<Vec<Vec<PadicElement>>> {
    let t = field.classes();
    let m = bong.len();
    let a1 = t.element(field, bong[0]);
    if m == 1 {
        return Ok(vec![vec![a1]]);
    }
    let sub = bong_to_gram(field, &bong[1..])?;
    let k = m - 1;
    let a1inv = field.inv(&a1)?;
    let e = field.e2();
    // Candidates for t_j: π^{-e}·(residues mod π^{2e}), with ord(2t) ≥ 0.
    let cands: Vec<PadicElement> = field
        .residues_mod((2 * e).max(1) as usize)
        .into_iter()
        .map(|r| field.mul(&field.from_ring(r, true), &field.pi_pow(-e)))
        .collect();
    let two = field.int(2);
    let integral = |x: &PadicElement| ord_lb(x) >= 0;
    // Per-coordinate diagonal condition.
    let per: Vec<Vec<PadicElement>> = (0..k)
        .map(|j| {
            let gj = field.mul(&sub[j][j], &a1inv);
            cands
                .iter()
                .filter(|tj| integral(&field.mul(&two, tj)) && integral(&field.add(&gj, &field.mul(tj, tj))))
                .cloned()
                .collect()
        })
        .collect();
    let mut choice: Vec<usize> = vec![0; k];
    if per.iter().any(|p| p.is_empty()) {
        return Err(Error::UnsupportedLattice("no integral completion of the BONG".into()));
    }
    loop {
        let tv: Vec<&PadicElement> = (0..k).map(|j| &per[j][choice[j]]).collect();
        let ok = (0..k).all(|j| {
            (j + 1..k).all(|l| {
                let v = field.add(&field.mul(&sub[j][l], &a1inv), &field.mul(tv[j], tv[l]));
                integral(&field.mul(&two, &v))
            })
        });
        if ok {
            let mut g = vec![vec![PadicElement::Zero; m]; m];
            g[0][0] = a1.clone();
            for j in 0..k {
                let v = field.mul(tv[j], &a1);
                g[0][j + 1] = v.clone();
                g[j + 1][0] = v;
                for l in 0..k {
                    g[j + 1][l + 1] = field.add(&sub[j][l], &field.mul(&field.mul(tv[j], tv[l]), &a1));
                }
            }
            return Ok(g);
        }
        let mut d = 0;
        loop {
            if d == k {
                return Err(Error::UnsupportedLattice("no integral completion of the BONG".into()));
            }
            choice[d] += 1;
            if choice[d] < per[d].len() {
                break;
            }
            choice[d] = 0;
            d += 1;
        }
    }
}

// ------------------------------------------------------- non-dyadic profile

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ComponentType {
    H,
    A,
    HH,
    HA,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanComponent {
    pub scale: i64,
    pub rank: usize,
    /// Unit class of the component's discriminant divided by π^{scale·rank}.
    pub disc_unit: u16,
    pub kind: ComponentType,
}

/// Jordan components of a lattice over a non-dyadic field.
pub fn jordan_profile_nondyadic(l: &Lattice) -> Result<Vec<JordanComponent>> {
    let field = l.field();
    if field.is_dyadic() {
        return Err(Error::NonDyadicExpected);
    }
    let t = field.classes();
    let m1 = minus_one_unit(field);
    let delta = t.delta_unit();
    let mut out: Vec<JordanComponent> = Vec::new();
    for c in l.bong() {
        match out.last_mut() {
            Some(comp) if comp.scale == c.ord => {
                comp.rank += 1;
                comp.disc_unit ^= c.unit;
            }
            _ => out.push(JordanComponent { scale: c.ord, rank: 1, disc_unit: c.unit, kind: ComponentType::Other }),
        }
    }
    for comp in &mut out {
        comp.kind = match comp.rank {
            2 if comp.disc_unit ^ m1 == 0 => ComponentType::H,
            2 if comp.disc_unit ^ m1 == delta => ComponentType::A,
            4 if comp.disc_unit == 0 => ComponentType::HH,
            4 if comp.disc_unit == delta => ComponentType::HA,
            _ => ComponentType::Other,
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::catalog;

    fn lat(name: &str, xs: &[&str]) -> Result<Lattice> {
        let k = catalog(name).unwrap();
        build_lattice(&k, &LatticeForm::Bong(xs.iter().map(|s| s.to_string()).collect()))
    }

    #[test]
    fn hyperbolic_plane_invariants() {
        let h = lat("Q2", &["1", "-1/4"]).unwrap();
        assert_eq!(h.table().r, vec![0, -2]);
        assert_eq!(h.alpha(1), Dx::ZERO);
        let one_one = lat("Q2", &["1", "1"]).unwrap();
        assert_eq!(one_one.alpha(1), Dx::int(1));
    }

    #[test]
    fn rejects_bad_gap() {
        let err = lat("Q2", &["1", "pi^-4"]).unwrap_err();
        assert!(matches!(err, Error::NotAGoodBong { index: 1, .. }));
    }

    #[test]
    fn property_a_examples() {
        assert!(lat("Q2", &["1", "-1/4"]).unwrap().has_property_a());
        assert!(!lat("Q2", &["1", "1", "1"]).unwrap().has_property_a());
        let l = lat("Q2", &["1", "-1/4", "4", "-1"]).unwrap();
        assert_eq!(l.table().r, vec![0, -2, 2, 0]);
        assert!(l.has_property_a());
    }

    #[test]
    fn scalar_examples() {
        let k = catalog("Q2").unwrap();
        let t = k.classes();
        let c = |s: &str| t.classify(&k, &k.parse(s).unwrap()).unwrap();
        let h = scalar_alpha_phi(&k, c("-1/4"));
        assert!(h.in_h && h.in_s && h.in_a);
        assert_eq!(h.alpha, Dx::ZERO);
        assert_eq!(h.phi, Some(c("-1/4")));
        let s = scalar_alpha_phi(&k, c("64"));
        assert_eq!(s.phi, Some(c("16")));
        assert_eq!(scalar_alpha_phi(&k, c("16")).alpha, Dx::int(3));
        assert!(phi(&k, c("3")).is_err() || scalar_alpha_phi(&k, c("3")).in_s);
    }

    #[test]
    fn d_bracket_boundaries() {
        let l = lat("Q2", &["1", "1"]).unwrap();
        let k = l.field().clone();
        let m1 = ClassOrd { ord: 0, unit: minus_one_unit(&k) };
        assert_eq!(l.d_bracket(m1, 1, 2).unwrap(), Dx::int(1));
        assert_eq!(l.d_bracket(ClassOrd::ONE, 2, 1).unwrap(), Dx::int(1));
        assert!(l.d_bracket(ClassOrd::ONE, 3, 1).is_err());
    }

    #[test]
    fn blocks_and_gram_agree() {
        for name in ["Q2", "Q2r2", "Q2u2"] {
            let k = catalog(name).unwrap();
            for blocks in [
                vec![Block::Hplane(0)],
                vec![Block::Aplane(0)],
                vec![Block::Hplane(0), Block::Hplane(1)],
                vec![Block::Unary("1".into()), Block::Aplane(1)],
            ] {
                let a = build_lattice(&k, &LatticeForm::Blocks(blocks.clone())).unwrap();
                let g = blocks_gram(&k, &blocks).unwrap();
                let b = Lattice::from_bong(&k, &gram_to_bong(&k, &g).unwrap()).unwrap();
                assert_eq!(a.table().r, b.table().r, "{name} {blocks:?}");
                assert_eq!(a.table().alpha, b.table().alpha, "{name} {blocks:?}");
            }
        }
    }

    #[test]
    fn gram_roundtrip() {
        let l = lat("Q2", &["1", "-1/4", "4", "-1"]).unwrap();
        let k = l.field().clone();
        let g = bong_to_gram(&k, l.bong()).unwrap();
        let back = Lattice::from_bong(&k, &gram_to_bong(&k, &g).unwrap()).unwrap();
        assert_eq!(back.table().r, l.table().r);
        assert_eq!(back.table().alpha, l.table().alpha);
    }

    #[test]
    fn nondyadic_profile() {
        let k = catalog("Q3").unwrap();
        let g = |rows: &[&[&str]]| {
            LatticeForm::Gram(rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect())
        };
        let h = build_lattice(&k, &g(&[&["1", "0"], &["0", "-1"]])).unwrap();
        assert_eq!(jordan_profile_nondyadic(&h).unwrap()[0].kind, ComponentType::H);
        let a = build_lattice(&k, &g(&[&["1", "0"], &["0", "-delta"]])).unwrap();
        assert_eq!(jordan_profile_nondyadic(&a).unwrap()[0].kind, ComponentType::A);
        let d = build_lattice(&k, &g(&[&["1", "0"], &["0", "3"]])).unwrap();
        let p = jordan_profile_nondyadic(&d).unwrap();
        assert_eq!((p[0].scale, p[0].rank, p[1].scale, p[1].rank), (0, 1, 1, 1));
    }
}
