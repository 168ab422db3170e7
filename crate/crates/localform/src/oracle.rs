//! Representation by direct search: look for X over 𝒪 with XᵀG_M X = G_N,
//! one π-adic digit at a time.
//!
//! A branch is cut as soon as an entry of XᵀG_M X − G_N is nonzero in the
//! digits that later choices can no longer change. A branch is accepted
//! once the residual is small enough for Newton refinement to converge to
//! an exact solution: with A = XᵀG, Z integral such that AZ = π^h I, the
//! correction Y = −½π^{−h}Z·E reduces the residual from order t to at least
//! 2(t − h − e) + o where o is the least order of an entry of G. This is an
//! improvement whenever t > 2h + 2e − o, so such an X lifts to a true
//! representation.

use crate::error::{Error, Result};
use crate::padic::{Field, Fq, PadicElement, Ring};
use serde::Serialize;

/// Outcome of a bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SearchOutcome {
    /// A liftable approximate representation was found.
    Found,
    /// Every branch was cut before the depth limit.
    Refuted,
    /// Some branch reached the depth limit undecided.
    Open,
    /// The node budget ran out.
    Budget,
}

/// Default node budget per search.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

struct Problem<'a> {
    field: &'a Field,
    m: usize,
    n: usize,
    g: Vec<Vec<Ring>>,
    h: Vec<Vec<Ring>>,
    /// Least order of an entry of G (after scaling).
    o_off: i64,
    /// Least order of Q on the lattice.
    o_norm: i64,
    digits: Vec<Ring>,
    pis: Vec<Ring>,
    budget: u64,
    nodes: u64,
}

fn scaled_ring(field: &Field, x: &PadicElement, s: i64) -> Result<Ring> {
    match x {
        PadicElement::Zero => Ok(field.ring_zero()),
        PadicElement::Approx { .. } => Err(Error::PrecisionExhausted("Gram entry with unknown order".into())),
        PadicElement::Nz { val, unit, .. } => {
            let k = val + s;
            debug_assert!(k >= 0);
            Ok(field.ring_mul(&field.ring_pow(field.ring_pi(), k as u64), unit))
        }
    }
}

fn min_ord(field: &Field, xs: &[&Ring]) -> i64 {
    xs.iter().map(|x| field.ring_ord(x)).min().unwrap_or(i64::MAX)
}

impl<'a> Problem<'a> {
    fn new(field: &'a Field, gm: &[Vec<PadicElement>], gn: &[Vec<PadicElement>], budget: u64) -> Result<Problem<'a>> {
        let mut low = 0i64;
        for x in gm.iter().chain(gn).flatten() {
            if let Some(v) = x.valuation()? {
                low = low.min(v);
            }
        }
        let s = -low;
        let conv = |g: &[Vec<PadicElement>]| -> Result<Vec<Vec<Ring>>> {
            g.iter().map(|row| row.iter().map(|x| scaled_ring(field, x, s)).collect()).collect()
        };
        let g = conv(gm)?;
        let h = conv(gn)?;
        let flat: Vec<&Ring> = g.iter().flatten().collect();
        let o_off = min_ord(field, &flat);
        let o_norm = (0..g.len())
            .flat_map(|a| (0..g.len()).map(move |b| (a, b)))
            .map(|(a, b)| if a == b { field.ring_ord(&g[a][a]) } else { field.ring_ord(&g[a][b]) + field.e2() })
            .min()
            .unwrap_or(0);
        let q = field.residue_field().q();
        let digits = (0..q).map(|d| field.lift_residue(&field.residue_field().from_index(d))).collect();
        Ok(Problem {
            field,
            m: g.len(),
            n: h.len(),
            g,
            h,
            o_off,
            o_norm,
            digits,
            pis: vec![field.ring_one()],
            budget,
            nodes: 0,
        })
    }

    fn pi_pow(&mut self, k: usize) -> Ring {
        while self.pis.len() <= k {
            let next = self.field.ring_mul(self.pis.last().unwrap(), self.field.ring_pi());
            self.pis.push(next);
        }
        self.pis[k].clone()
    }

    fn bilinear(&self, x: &[Ring], y: &[Ring]) -> Ring {
        let f = self.field;
        let mut acc = f.ring_zero();
        for a in 0..self.m {
            let mut row = f.ring_zero();
            for b in 0..self.m {
                row = f.ring_add(&row, &f.ring_mul(&self.g[a][b], &y[b]));
            }
            acc = f.ring_add(&acc, &f.ring_mul(&x[a], &row));
        }
        acc
    }

    fn residual(&self, cols: &[Vec<Ring>], i: usize, j: usize) -> i64 {
        let v = self.bilinear(&cols[i], &cols[j]);
        self.field.ring_ord(&self.field.ring_sub(&v, &self.h[i][j]))
    }

    /// Largest elementary divisor order of the n×m matrix A = XᵀG.
    fn top_divisor(&self, cols: &[Vec<Ring>]) -> i64 {
        let f = self.field;
        let a: Vec<Vec<Ring>> = (0..self.n)
            .map(|i| {
                (0..self.m)
                    .map(|b| {
                        let mut acc = f.ring_zero();
                        for c in 0..self.m {
                            acc = f.ring_add(&acc, &f.ring_mul(&cols[i][c], &self.g[c][b]));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let d_top = minors_min_ord(f, &a, self.n);
        let d_below = if self.n == 1 { 0 } else { minors_min_ord(f, &a, self.n - 1) };
        if d_top >= f.capacity() {
            return i64::MAX / 4;
        }
        d_top - d_below
    }

    fn accepts(&self, cols: &[Vec<Ring>]) -> bool {
        let e = self.field.e2();
        let mut t = i64::MAX;
        for i in 0..self.n {
            for j in i..self.n {
                t = t.min(self.residual(cols, i, j));
            }
        }
        if t >= self.field.capacity() {
            return true;
        }
        let h = self.top_divisor(cols);
        t > 2 * h + 2 * e - self.o_off && t >= h + e
    }

    /// Depth-first search; `cols` hold X modulo π^k for columns ≥ j and
    /// modulo π^{k+1} for columns < j.
    fn dfs(&mut self, cols: &mut Vec<Vec<Ring>>, k: usize, j: usize, limit: usize) -> SearchOutcome {
        if j == self.n {
            if self.accepts(cols) {
                return SearchOutcome::Found;
            }
            if k + 1 >= limit {
                return SearchOutcome::Open;
            }
            return self.dfs(cols, k + 1, 0, limit);
        }
        let pk = self.pi_pow(k);
        let q = self.digits.len();
        let total = (q as u64).pow(self.m as u32);
        let saved = cols[j].clone();
        let mut open = false;
        for code in 0..total {
            self.nodes += 1;
            if self.nodes > self.budget {
                cols[j] = saved;
                return SearchOutcome::Budget;
            }
            let mut c = code;
            for a in 0..self.m {
                let d = &self.digits[(c % q as u64) as usize];
                c /= q as u64;
                cols[j][a] = self.field.ring_add(&saved[a], &self.field.ring_mul(d, &pk));
            }
            if k == 0 && !self.independent_mod_pi(cols, j) {
                continue;
            }
            if !self.consistent(cols, k as i64 + 1, j) {
                continue;
            }
            match self.dfs(cols, k, j + 1, limit) {
                SearchOutcome::Found => return SearchOutcome::Found,
                SearchOutcome::Budget => {
                    cols[j] = saved;
                    return SearchOutcome::Budget;
                }
                SearchOutcome::Open => open = true,
                SearchOutcome::Refuted => {}
            }
        }
        cols[j] = saved;
        if open {
            SearchOutcome::Open
        } else {
            SearchOutcome::Refuted
        }
    }

    /// Whether the residues of columns 0..=j are linearly independent.
    fn independent_mod_pi(&self, cols: &[Vec<Ring>], j: usize) -> bool {
        let fq = self.field.residue_field();
        let red: Vec<Vec<Vec<u64>>> =
            (0..=j).map(|i| cols[i].iter().map(|x| self.field.residue(x)).collect()).collect();
        rank_mod_pi(fq, red) == j + 1
    }

    /// Residual digits fixed once columns 0..=j are known modulo π^k1.
    fn consistent(&self, cols: &[Vec<Ring>], k1: i64, j: usize) -> bool {
        let f = self.field;
        // ord(x_iᵀG) bounds every change B(x_i, π^{k1} y) still to come.
        let row_ord = |i: usize| -> i64 {
            let v = (0..self.m)
                .map(|b| {
                    let mut acc = f.ring_zero();
                    for c in 0..self.m {
                        acc = f.ring_add(&acc, &f.ring_mul(&cols[i][c], &self.g[c][b]));
                    }
                    f.ring_ord(&acc)
                })
                .min()
                .unwrap();
            v.min(k1 + self.o_off)
        };
        let rj = row_ord(j);
        let fixed_diag = (k1 + f.e2() + rj).min(2 * k1 + self.o_norm);
        if self.residual(cols, j, j) < fixed_diag {
            return false;
        }
        (0..j).all(|i| {
            let fixed = (k1 + rj.min(row_ord(i))).min(2 * k1 + self.o_off);
            self.residual(cols, i, j) >= fixed
        })
    }
}

/// Least order of the r×r minors of a small matrix.
fn minors_min_ord(f: &Field, a: &[Vec<Ring>], r: usize) -> i64 {
    let rows = a.len();
    let cols = a[0].len();
    let mut best = f.capacity();
    for rs in combinations(rows, r) {
        for cs in combinations(cols, r) {
            let sub: Vec<Vec<Ring>> = rs.iter().map(|&i| cs.iter().map(|&j| a[i][j].clone()).collect()).collect();
            best = best.min(f.ring_ord(&det(f, &sub)));
        }
    }
    best
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

fn det(f: &Field, a: &[Vec<Ring>]) -> Ring {
    let n = a.len();
    if n == 1 {
        return a[0][0].clone();
    }
    let mut acc = f.ring_zero();
    for c in 0..n {
        let minor: Vec<Vec<Ring>> = a[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let term = f.ring_mul(&a[0][c], &det(f, &minor));
        acc = if c % 2 == 0 { f.ring_add(&acc, &term) } else { f.ring_sub(&acc, &term) };
    }
    acc
}

/// Rank over the residue field of a list of residue vectors.
fn rank_mod_pi(fq: &Fq, mut rows: Vec<Vec<Vec<u64>>>) -> usize {
    let mut rank = 0;
    let width = rows.first().map_or(0, |r| r.len());
    for col in 0..width {
        let Some(piv) = (rank..rows.len()).find(|&i| !fq.is_zero(&rows[i][col])) else { continue };
        rows.swap(rank, piv);
        let inv = fq.inv(&rows[rank][col]);
        for i in 0..rows.len() {
            if i != rank && !fq.is_zero(&rows[i][col]) {
                let c = fq.mul(&rows[i][col], &inv);
                for k in 0..width {
                    let v = fq.sub(&rows[i][k], &fq.mul(&c, &rows[rank][k]));
                    rows[i][k] = v;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn ord_or_inf(x: &PadicElement) -> Result<i64> {
    Ok(x.valuation()?.unwrap_or(i64::MAX))
}

/// Order of the norm ideal of a Gram matrix: least order of Q(x_a) and 2B(x_a, x_b).
pub fn norm_order(field: &Field, g: &[Vec<PadicElement>]) -> Result<i64> {
    let two = field.int(2);
    let mut best = i64::MAX;
    for (a, row) in g.iter().enumerate() {
        for (b, x) in row.iter().enumerate() {
            let v = if a == b { ord_or_inf(x)? } else { ord_or_inf(&field.mul(&two, x))? };
            best = best.min(v);
        }
    }
    Ok(best)
}

/// Gram matrices of the lattices N' ⊇ N of the same rank whose norm lies in
/// 𝔭^{norm}, for N of rank 1 or 2. N = N'T with T upper triangular, diagonal
/// (π^{a_1}, π^{a_2}) and corner reduced modulo π^{a_2}.
pub fn superlattice_grams(field: &Field, gn: &[Vec<PadicElement>], norm: i64) -> Result<Vec<Vec<Vec<PadicElement>>>> {
    let e = field.e2();
    let n = gn.len();
    let ok = |g: &[Vec<PadicElement>]| -> Result<bool> { Ok(norm_order(field, g)? >= norm) };
    let mut out = Vec::new();
    match n {
        1 => {
            let v = gn[0][0].ord()?;
            for a in 0..=((v - norm).max(0) / 2) {
                let g = vec![vec![field.mul(&gn[0][0], &field.pi_pow(-2 * a))]];
                if ok(&g)? {
                    out.push(g);
                }
            }
        }
        2 => {
            let det = field.sub(&field.mul(&gn[0][0], &gn[1][1]), &field.mul(&gn[0][1], &gn[1][0]));
            let total = ((det.ord()? - 2 * norm + 2 * e).max(0)) / 2;
            for a1 in 0..=total {
                for a2 in 0..=(total - a1) {
                    for t in field.residues_mod(a2 as usize) {
                        let t = field.from_ring(t, true);
                        // T^{-1} = [[π^{-a1}, −t π^{-a1-a2}], [0, π^{-a2}]].
                        let u = [
                            [field.pi_pow(-a1), field.neg(&field.mul(&t, &field.pi_pow(-a1 - a2)))],
                            [PadicElement::Zero, field.pi_pow(-a2)],
                        ];
                        let mut g = vec![vec![PadicElement::Zero; 2]; 2];
                        for (i, row) in g.iter_mut().enumerate() {
                            for (j, slot) in row.iter_mut().enumerate() {
                                let mut acc = PadicElement::Zero;
                                for (k, grow) in gn.iter().enumerate() {
                                    for (l, x) in grow.iter().enumerate() {
                                        acc = field.add(&acc, &field.mul(&field.mul(&u[k][i], x), &u[l][j]));
                                    }
                                }
                                *slot = acc;
                            }
                        }
                        if ok(&g)? {
                            out.push(g);
                        }
                    }
                }
            }
        }
        _ => return Err(Error::UnsupportedLattice(format!("oracle supports rank N ≤ 2, got {n}"))),
    }
    Ok(out)
}

/// Search for X with XᵀG_M X = G_N and X of full rank modulo π.
pub fn search_primitive(
    field: &Field,
    gm: &[Vec<PadicElement>],
    gn: &[Vec<PadicElement>],
    limit: usize,
    budget: u64,
) -> Result<(SearchOutcome, u64)> {
    if gn.len() > gm.len() {
        return Err(Error::RankOrder(gn.len(), gm.len()));
    }
    let mut p = Problem::new(field, gm, gn, budget)?;
    let mut cols = vec![vec![field.ring_zero(); p.m]; p.n];
    let out = p.dfs(&mut cols, 0, 0, limit.max(1));
    Ok((out, p.nodes))
}

/// Search for any representation: a primitive representation of some
/// lattice N' ⊇ N.
pub fn search(field: &Field, gm: &[Vec<PadicElement>], gn: &[Vec<PadicElement>], limit: usize, budget: u64) -> Result<SearchOutcome> {
    if gn.len() > gm.len() {
        return Err(Error::RankOrder(gn.len(), gm.len()));
    }
    let mut left = budget;
    let mut worst = SearchOutcome::Refuted;
    for g in superlattice_grams(field, gn, norm_order(field, gm)?)? {
        let (out, used) = search_primitive(field, gm, &g, limit, left)?;
        left = left.saturating_sub(used);
        match out {
            SearchOutcome::Found => return Ok(SearchOutcome::Found),
            SearchOutcome::Budget => return Ok(SearchOutcome::Budget),
            SearchOutcome::Open => worst = SearchOutcome::Open,
            SearchOutcome::Refuted => {}
        }
    }
    Ok(worst)
}

/// Window base K = ord(vol M) + ord(vol N) + 4e + 3, with both volumes
/// taken after the common rescaling that makes every Gram entry integral
/// with some entry a unit.
pub fn window_base(field: &Field, gm: &[Vec<PadicElement>], gn: &[Vec<PadicElement>]) -> Result<usize> {
    let mut low = i64::MAX;
    for x in gm.iter().chain(gn).flatten() {
        if let Some(v) = x.valuation()? {
            low = low.min(v);
        }
    }
    let s = if low == i64::MAX { 0 } else { -low };
    let vol = |g: &[Vec<PadicElement>]| -> Result<i64> {
        let rows: Vec<Vec<Ring>> = g.iter().map(|r| r.iter().map(|x| scaled_ring(field, x, s)).collect()).collect::<Result<_>>()?;
        Ok(field.ring_ord(&det(field, &rows)))
    };
    Ok((vol(gm)? + vol(gn)? + 4 * field.e2() + 3).max(1) as usize)
}

/// Run the search at depths K, K+1, K+2. A `Found` or `Refuted` outcome is
/// a proof, so the first one obtained is returned; if every depth stays
/// open the result is `OracleInconclusive`.
pub fn enum_oracle_represents(
    field: &Field,
    gm: &[Vec<PadicElement>],
    gn: &[Vec<PadicElement>],
    k: usize,
    budget: u64,
) -> Result<bool> {
    let mut trail = Vec::new();
    for limit in k..k + 3 {
        let out = search(field, gm, gn, limit, budget)?;
        match out {
            SearchOutcome::Found => return Ok(true),
            SearchOutcome::Refuted => return Ok(false),
            _ => trail.push(format!("K={limit}: {out:?}")),
        }
    }
    Err(Error::OracleInconclusive(trail.join(", ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bong::parse_gram;
    use crate::padic::catalog;

    fn gram(f: &Field, rows: &[&[&str]]) -> Vec<Vec<PadicElement>> {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        parse_gram(f, &rows).unwrap()
    }

    #[test]
    fn sums_of_two_squares() {
        let k = catalog("Q2").unwrap();
        let m = gram(&k, &[&["1", "0"], &["0", "1"]]);
        assert!(!enum_oracle_represents(&k, &m, &gram(&k, &[&["3"]]), 3, DEFAULT_BUDGET).unwrap());
        for limit in 3..=5 {
            assert_eq!(search(&k, &m, &gram(&k, &[&["3"]]), limit, DEFAULT_BUDGET).unwrap(), SearchOutcome::Refuted);
        }
        assert!(enum_oracle_represents(&k, &m, &gram(&k, &[&["5"]]), 3, DEFAULT_BUDGET).unwrap());
        assert!(enum_oracle_represents(&k, &m, &gram(&k, &[&["2"]]), 3, DEFAULT_BUDGET).unwrap());
        assert!(enum_oracle_represents(&k, &m, &m, 3, DEFAULT_BUDGET).unwrap());
    }

    #[test]
    fn hyperbolic_plane_represents_units() {
        let k = catalog("Q2").unwrap();
        let h = gram(&k, &[&["0", "1/2"], &["1/2", "0"]]);
        for c in ["1", "3", "5", "7", "2", "6", "10", "14"] {
            assert!(enum_oracle_represents(&k, &h, &gram(&k, &[&[c]]), 5, DEFAULT_BUDGET).unwrap(), "{c}");
        }
    }
}
