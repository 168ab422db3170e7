//! Finite families of lattices given by good BONGs, and an order-preserving
//! map over them that runs on the rayon pool when the `parallel` feature is
//! enabled.

use crate::bong::Lattice;
use crate::padic::Field;
use crate::square_classes::ClassOrd;
use std::sync::Arc;

/// Bounds for a BONG corpus.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusBounds {
    pub min_rank: usize,
    pub max_rank: usize,
    /// Orders range over −window..=window.
    pub window: i64,
    /// Require R_1 ∈ {0, 1} and a trivial unit part in the first entry.
    pub normalized: bool,
}

/// Every good BONG within the bounds, in lexicographic order of
/// (rank, orders, unit parts).
pub fn bong_corpus(field: &Arc<Field>, b: CorpusBounds) -> Vec<Lattice> {
    let nu = field.classes().n_units() as u16;
    let entries: Vec<ClassOrd> =
        (-b.window..=b.window).flat_map(|r| (0..nu).map(move |u| ClassOrd::new(r, u))).collect();
    let mut out = Vec::new();
    for rank in b.min_rank.max(1)..=b.max_rank {
        let mut cur = Vec::with_capacity(rank);
        extend(field, &entries, rank, b, &mut cur, &mut out);
    }
    out
}

fn extend(field: &Arc<Field>, entries: &[ClassOrd], rank: usize, b: CorpusBounds, cur: &mut Vec<ClassOrd>, out: &mut Vec<Lattice>) {
    if cur.len() == rank {
        if let Ok(l) = Lattice::from_bong(field, cur) {
            out.push(l);
        }
        return;
    }
    let e = field.e2();
    for &c in entries {
        if cur.is_empty() && b.normalized && (!(0..=1).contains(&c.ord) || c.unit != 0) {
            continue;
        }
        // Good BONGs satisfy R_{i+1} ≥ R_i − 2e.
        if let Some(last) = cur.last() {
            if c.ord < last.ord - 2 * e {
                continue;
            }
        }
        cur.push(c);
        if Lattice::from_bong(field, cur).is_ok() {
            extend(field, entries, rank, b, cur, out);
        }
        cur.pop();
    }
}

/// Map `f` over `items`, keeping the input order.
#[cfg(feature = "parallel")]
pub fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Map `f` over `items`, keeping the input order.
#[cfg(not(feature = "parallel"))]
pub fn ordered_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Sequential map, for comparisons against [`ordered_map`].
pub fn sequential_map<T, R>(items: &[T], f: impl Fn(&T) -> R) -> Vec<R> {
    items.iter().map(f).collect()
}
