//! Integer homology of graded complexes via Smith normal form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::complex::{ChainComplex, SparseMatrix};
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<BigInt>>;

pub fn to_big(a: &[Vec<i64>]) -> Matrix {
    a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snf {
    /// Nonzero diagonal entries, each dividing the next.
    pub factors: Vec<BigInt>,
    pub d: Matrix,
    pub u: Matrix,
    pub v: Matrix,
}

/// `U · M · V = D` with `U`, `V` unimodular and `D` diagonal.
pub fn smith_normal_form(m: &Matrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let factors = reduce(&mut d, rows, cols, Some(&mut u), Some(&mut v));
    Snf { factors, d, u, v }
}

/// Nonzero invariant factors of a dense matrix (no transforms).
pub fn dense_invariant_factors(mut m: Matrix) -> Vec<BigInt> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    reduce(&mut m, rows, cols, None, None)
}

fn swap_cols(a: &mut Matrix, i: usize, j: usize) {
    for r in a.iter_mut() {
        r.swap(i, j);
    }
}

/// `row_i += q * row_j`.
fn add_row(a: &mut Matrix, i: usize, j: usize, q: &BigInt) {
    let src = a[j].clone();
    for (x, y) in a[i].iter_mut().zip(&src) {
        if !y.is_zero() {
            *x += q * y;
        }
    }
}

/// `col_i += q * col_j`.
fn add_col(a: &mut Matrix, i: usize, j: usize, q: &BigInt) {
    for r in a.iter_mut() {
        if !r[j].is_zero() {
            let y = q * &r[j];
            r[i] += y;
        }
    }
}

fn reduce(a: &mut Matrix, rows: usize, cols: usize, mut u: Option<&mut Matrix>, mut v: Option<&mut Matrix>) -> Vec<BigInt> {
    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if let Some(u) = u.as_deref_mut() {
            u.swap(t, pi);
        }
        swap_cols(a, t, pj);
        if let Some(v) = v.as_deref_mut() {
            swap_cols(v, t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = -a[i][t].div_floor(&a[t][t]);
                add_row(a, i, t, &q);
                if let Some(u) = u.as_deref_mut() {
                    add_row(u, i, t, &q);
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = -a[t][j].div_floor(&a[t][t]);
                add_col(a, j, t, &q);
                if let Some(v) = v.as_deref_mut() {
                    add_col(v, j, t, &q);
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                // A smaller remainder appeared in row or column t; move it to the pivot.
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    if let Some(u) = u.as_deref_mut() {
                        u.swap(t, best.0);
                    }
                } else if best.1 != t {
                    swap_cols(a, t, best.1);
                    if let Some(v) = v.as_deref_mut() {
                        swap_cols(v, t, best.1);
                    }
                }
                continue;
            }
            // Divisibility: fold any offending row into row t and repeat.
            let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
            match offending {
                Some(i) => {
                    let one = BigInt::one();
                    add_row(a, t, i, &one);
                    if let Some(u) = u.as_deref_mut() {
                        add_row(u, t, i, &one);
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -&*x;
            }
            if let Some(u) = u.as_deref_mut() {
                for x in u[t].iter_mut() {
                    *x = -&*x;
                }
            }
        }
        factors.push(a[t][t].clone());
        t += 1;
    }
    factors
}

/// Nonzero invariant factors of a sparse matrix: eliminates on unit
/// pivots first, then finishes the remainder densely.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    let n_rows = m.rows;
    let n_cols = m.n_cols();
    let mut rows: Vec<BTreeMap<usize, i64>> = vec![BTreeMap::new(); n_rows];
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_cols];
    for (c, col) in m.cols.iter().enumerate() {
        for &(r, v) in col {
            if v != 0 {
                *rows[r].entry(c).or_insert(0) += v;
            }
        }
    }
    for (r, row) in rows.iter_mut().enumerate() {
        row.retain(|_, v| *v != 0);
        for &c in row.keys() {
            col_rows[c].insert(r);
        }
    }
    let mut alive_rows: BTreeSet<usize> = (0..n_rows).collect();
    let mut alive_cols: BTreeSet<usize> = (0..n_cols).collect();
    let mut units = 0usize;
    'outer: loop {
        // Cheapest unit pivot by fill-in estimate.
        let mut best: Option<(usize, usize, usize)> = None;
        for &r in &alive_rows {
            for (&c, &v) in &rows[r] {
                if v.abs() == 1 {
                    let cost = (rows[r].len() - 1) * (col_rows[c].len() - 1);
                    if best.is_none_or(|b| cost < b.2) {
                        best = Some((r, c, cost));
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        let pivot_row = rows[pr].clone();
        let pv = pivot_row[&pc];
        let targets: Vec<usize> = col_rows[pc].iter().copied().filter(|&r| r != pr).collect();
        // Stage updates so an overflow leaves the matrix untouched.
        let mut staged = Vec::with_capacity(targets.len());
        for &r in &targets {
            let q = rows[r][&pc] * pv;
            let mut new = rows[r].clone();
            for (&c, &x) in &pivot_row {
                let Some(d) = q.checked_mul(x) else { break 'outer };
                let e = new.entry(c).or_insert(0);
                let Some(s) = e.checked_sub(d) else { break 'outer };
                *e = s;
            }
            new.retain(|_, v| *v != 0);
            staged.push((r, new));
        }
        for (r, new) in staged {
            for &c in rows[r].keys() {
                col_rows[c].remove(&r);
            }
            for &c in new.keys() {
                col_rows[c].insert(r);
            }
            rows[r] = new;
        }
        for &c in pivot_row.keys() {
            col_rows[c].remove(&pr);
        }
        rows[pr].clear();
        alive_rows.remove(&pr);
        alive_cols.remove(&pc);
        units += 1;
    }
    let rr: Vec<usize> = alive_rows.iter().copied().filter(|&r| !rows[r].is_empty()).collect();
    let cc: Vec<usize> = alive_cols.iter().copied().filter(|&c| !col_rows[c].is_empty()).collect();
    let col_pos: BTreeMap<usize, usize> = cc.iter().enumerate().map(|(k, &c)| (c, k)).collect();
    let mut dense = vec![vec![BigInt::zero(); cc.len()]; rr.len()];
    for (k, &r) in rr.iter().enumerate() {
        for (&c, &v) in &rows[r] {
            dense[k][col_pos[&c]] = BigInt::from(v);
        }
    }
    let mut out = vec![BigInt::one(); units];
    out.extend(dense_invariant_factors(dense));
    out.sort();
    out
}

/// Rank over the rationals by fraction-free Gaussian elimination.
pub fn rational_rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in rank + 1..rows {
            for k in c + 1..cols {
                let x = (&a[rank][c] * &a[r][k] - &a[r][c] * &a[rank][k]) / &prev;
                a[r][k] = x;
            }
            a[r][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Invariant factors greater than one, in divisibility order.
    pub torsion: Vec<BigInt>,
}

impl HomologyGroup {
    pub fn is_zero(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

impl fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.betti == 1 {
            parts.push("Z".to_string());
        } else if self.betti > 1 {
            parts.push(format!("Z^{}", self.betti));
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" ⊕ "))
        }
    }
}

/// Homology groups keyed by `(sector, j, i)`; zero groups are omitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Homology<S: Ord> {
    pub groups: BTreeMap<(S, i64, i64), HomologyGroup>,
}

impl<S: Ord + Clone> Homology<S> {
    /// Moves every group from `(i, j)` to `(i + di, j + dj)`.
    pub fn shifted(&self, di: i64, dj: i64) -> Homology<S> {
        Homology {
            groups: self.groups.iter().map(|((s, j, i), g)| ((s.clone(), j + dj, i + di), g.clone())).collect(),
        }
    }

    /// Keeps only sectors in `keep`.
    pub fn restricted(&self, keep: impl Fn(&S) -> bool) -> Homology<S> {
        Homology { groups: self.groups.iter().filter(|((s, _, _), _)| keep(s)).map(|(k, g)| (k.clone(), g.clone())).collect() }
    }
}

/// Homology of every block. With `cross_check`, ranks are recomputed over
/// the rationals and compared with the Smith normal form.
pub fn homology<S: Ord + Clone + Send + Sync>(
    c: &ChainComplex<S>,
    label: impl Fn(&S) -> String + Sync,
    cross_check: bool,
) -> Result<Homology<S>> {
    c.check_d_squared(&label)?;
    let per_block: Vec<Vec<((S, i64, i64), HomologyGroup)>> = c
        .blocks
        .par_iter()
        .map(|b| -> Result<Vec<_>> {
            let mut factors: BTreeMap<i64, Vec<BigInt>> = BTreeMap::new();
            for (&i, m) in &b.maps {
                let f = invariant_factors(m);
                if cross_check {
                    let q = rational_rank(&to_big(&m.to_dense()));
                    if q != f.len() {
                        return Err(Error::Invariant(format!(
                            "rank mismatch in sector {}, j = {}, i = {i}: Smith form {} vs rational {q}",
                            label(&b.s),
                            b.j,
                            f.len()
                        )));
                    }
                }
                factors.insert(i, f);
            }
            let mut out = Vec::new();
            for (&i, gens) in &b.levels {
                let out_rank = factors.get(&i).map_or(0, Vec::len);
                let incoming = factors.get(&(i + 2));
                let in_rank = incoming.map_or(0, Vec::len);
                let betti = gens.len() - out_rank - in_rank;
                let torsion: Vec<BigInt> =
                    incoming.map(|f| f.iter().filter(|d| !d.is_one()).cloned().collect()).unwrap_or_default();
                let g = HomologyGroup { betti, torsion };
                if !g.is_zero() {
                    out.push(((b.s.clone(), b.j, i), g));
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Homology { groups: per_block.into_iter().flatten().collect() })
}
