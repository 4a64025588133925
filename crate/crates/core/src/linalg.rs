//! Exact sparse linear algebra over the rationals.
//!
//! Elimination is fraction-free: every working row is an integer row kept
//! primitive (content divided out, leading coefficient positive). Rows are
//! inserted in index order and each row pivots on its first surviving column,
//! so echelon forms, ranks and null-space bases are fully determined by the
//! input. Rank and null space are computed per connected block (rows and
//! columns linked through nonzero entries); blocks are independent, so they
//! are processed in parallel and reassembled in a fixed order.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Sparse vector: strictly increasing indices, no stored zeros.
pub type SparseVec = Vec<(usize, Rational)>;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Render as `n/d` (or `n` when the denominator is one).
pub fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Rational::new(n, d))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

/// Add `scale * other` into `acc`, both sorted sparse vectors.
pub fn axpy(acc: &SparseVec, scale: &Rational, other: &SparseVec) -> SparseVec {
    let mut out = Vec::with_capacity(acc.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < acc.len() || j < other.len() {
        let take_a = j >= other.len() || (i < acc.len() && acc[i].0 < other[j].0);
        let take_b = i >= acc.len() || (j < other.len() && other[j].0 < acc[i].0);
        if take_a {
            out.push(acc[i].clone());
            i += 1;
        } else if take_b {
            let v = scale * &other[j].1;
            if !v.is_zero() {
                out.push((other[j].0, v));
            }
            j += 1;
        } else {
            let v = &acc[i].1 + scale * &other[j].1;
            if !v.is_zero() {
                out.push((acc[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn sparse_dot(a: &SparseVec, b: &SparseVec) -> Rational {
    let (mut i, mut j) = (0, 0);
    let mut acc = Rational::zero();
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += &a[i].1 * &b[j].1;
                i += 1;
                j += 1;
            }
        }
    }
    acc
}

pub fn sparse_from_dense(v: &[Rational]) -> SparseVec {
    v.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect()
}

pub fn dense_from_sparse(v: &SparseVec, len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, x) in v {
        out[*i] = x.clone();
    }
    out
}

/// Sort by index, merge duplicates and drop zeros.
pub fn normalize_sparse(mut entries: Vec<(usize, Rational)>) -> SparseVec {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<SparseVec>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, Rational::one())]).collect();
        SparseMatrix { nrows: n, ncols: n, rows }
    }

    /// Build from sparse rows; entries are sorted, merged and cleaned.
    pub fn from_rows(ncols: usize, rows: Vec<SparseVec>) -> Result<Self> {
        let rows: Vec<SparseVec> = rows.into_iter().map(normalize_sparse).collect();
        for r in &rows {
            if let Some((c, _)) = r.last() {
                if *c >= ncols {
                    return Err(Error::DimensionMismatch { expected: ncols, found: c + 1 });
                }
            }
        }
        Ok(SparseMatrix { nrows: rows.len(), ncols, rows })
    }

    pub fn from_triplets(nrows: usize, ncols: usize, triplets: Vec<(usize, usize, Rational)>) -> Result<Self> {
        let mut rows: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); nrows];
        for (r, c, v) in triplets {
            if r >= nrows {
                return Err(Error::DimensionMismatch { expected: nrows, found: r + 1 });
            }
            rows[r].push((c, v));
        }
        Self::from_rows(ncols, rows)
    }

    pub fn from_dense(rows: &[Vec<Rational>]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        SparseMatrix { nrows: rows.len(), ncols, rows: rows.iter().map(|r| sparse_from_dense(r)).collect() }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[SparseVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn get(&self, r: usize, c: usize) -> Rational {
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(k) => self.rows[r][k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|r| dense_from_sparse(r, self.ncols)).collect()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<SparseVec> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (c, v) in r {
                cols[*c].push((i, v.clone()));
            }
        }
        SparseMatrix { nrows: self.ncols, ncols: self.nrows, rows: cols }
    }

    pub fn neg(&self) -> SparseMatrix {
        let rows = self.rows.iter().map(|r| r.iter().map(|(c, v)| (*c, -v)).collect()).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: other.nrows });
        }
        let one = Rational::one();
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| axpy(a, &one, b)).collect();
        Ok(SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows })
    }

    pub fn scale(&self, s: &Rational) -> SparseMatrix {
        if s.is_zero() {
            return SparseMatrix::zeros(self.nrows, self.ncols);
        }
        let rows = self.rows.iter().map(|r| r.iter().map(|(c, v)| (*c, v * s)).collect()).collect();
        SparseMatrix { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.nrows {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: other.nrows });
        }
        let rows = self
            .rows
            .par_iter()
            .map(|r| {
                let mut acc: SparseVec = Vec::new();
                for (k, v) in r {
                    acc = axpy(&acc, v, &other.rows[*k]);
                }
                acc
            })
            .collect();
        Ok(SparseMatrix { nrows: self.nrows, ncols: other.ncols, rows })
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<Vec<Rational>> {
        if v.len() != self.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: v.len() });
        }
        Ok(self.rows.iter().map(|r| r.iter().fold(Rational::zero(), |acc, (c, x)| acc + x * &v[*c])).collect())
    }

    pub fn mul_sparse_vec(&self, v: &SparseVec) -> SparseVec {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(i, r)| {
                let d = sparse_dot(r, v);
                (!d.is_zero()).then_some((i, d))
            })
            .collect()
    }

    /// Row vector times matrix: `vᵀ M`.
    pub fn vec_mul(&self, v: &SparseVec) -> SparseVec {
        let mut acc: SparseVec = Vec::new();
        for (i, x) in v {
            acc = axpy(&acc, x, &self.rows[*i]);
        }
        acc
    }

    pub fn select_rows(&self, idx: &[usize]) -> SparseMatrix {
        SparseMatrix { nrows: idx.len(), ncols: self.ncols, rows: idx.iter().map(|&i| self.rows[i].clone()).collect() }
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> SparseMatrix {
        let map: HashMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let out = rows
            .iter()
            .map(|&r| {
                normalize_sparse(self.rows[r].iter().filter_map(|(c, v)| map.get(c).map(|&k| (k, v.clone()))).collect())
            })
            .collect();
        SparseMatrix { nrows: rows.len(), ncols: cols.len(), rows: out }
    }

    /// `[self | other]`
    pub fn hstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.nrows != other.nrows {
            return Err(Error::DimensionMismatch { expected: self.nrows, found: other.nrows });
        }
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut r = a.clone();
                r.extend(b.iter().map(|(c, v)| (c + self.ncols, v.clone())));
                r
            })
            .collect();
        Ok(SparseMatrix { nrows: self.nrows, ncols: self.ncols + other.ncols, rows })
    }

    pub fn vstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.ncols != other.ncols {
            return Err(Error::DimensionMismatch { expected: self.ncols, found: other.ncols });
        }
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        Ok(SparseMatrix { nrows: self.nrows + other.nrows, ncols: self.ncols, rows })
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.nrows == self.ncols && self.transpose() == self.neg()
    }
}

// ---------------------------------------------------------------------------
// Fraction-free elimination core

type IntRow = Vec<(usize, BigInt)>;

fn to_primitive(row: &SparseVec) -> IntRow {
    if row.is_empty() {
        return Vec::new();
    }
    let lcm = row.iter().fold(BigInt::one(), |acc, (_, v)| acc.lcm(v.denom()));
    let ints: IntRow = row.iter().map(|(c, v)| (*c, (v * Rational::from_integer(lcm.clone())).to_integer())).collect();
    make_primitive(ints)
}

fn make_primitive(mut row: IntRow) -> IntRow {
    if row.is_empty() {
        return row;
    }
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    let negate = row[0].1.is_negative();
    if !g.is_one() || negate {
        let g = if negate { -g } else { g };
        for e in row.iter_mut() {
            e.1 = &e.1 / &g;
        }
    }
    row
}

/// `p * row - a * piv` where `a = row[col]`, `p = piv[col]`; eliminates `col`.
fn eliminate(row: &IntRow, piv: &IntRow, col: usize) -> IntRow {
    let a = &row[row.binary_search_by_key(&col, |e| e.0).unwrap()].1;
    let p = &piv[piv.binary_search_by_key(&col, |e| e.0).unwrap()].1;
    let g = a.gcd(p);
    let (a, p) = (a / &g, p / &g);
    let mut out = Vec::with_capacity(row.len() + piv.len());
    let (mut i, mut j) = (0, 0);
    while i < row.len() || j < piv.len() {
        let take_r = j >= piv.len() || (i < row.len() && row[i].0 < piv[j].0);
        let take_p = i >= row.len() || (j < piv.len() && piv[j].0 < row[i].0);
        if take_r {
            out.push((row[i].0, &p * &row[i].1));
            i += 1;
        } else if take_p {
            out.push((piv[j].0, -(&a * &piv[j].1)));
            j += 1;
        } else {
            let v = &p * &row[i].1 - &a * &piv[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    make_primitive(out)
}

/// Incremental row echelon form. Pivot rows are indexed by their leading column.
#[derive(Default)]
struct Echelon {
    pivots: BTreeMap<usize, usize>,
    rows: Vec<IntRow>,
}

impl Echelon {
    /// Reduce `row` against every pivot row whose pivot column it touches,
    /// skipping the entry at `keep` (used during back substitution).
    fn reduce(&self, mut row: IntRow, keep: Option<usize>) -> IntRow {
        let mut i = 0;
        while i < row.len() {
            let c = row[i].0;
            match self.pivots.get(&c) {
                Some(&k) if Some(c) != keep => row = eliminate(&row, &self.rows[k], c),
                _ => i += 1,
            }
        }
        row
    }

    /// Returns true when the row was independent and became a pivot row.
    fn insert(&mut self, row: IntRow) -> bool {
        let r = self.reduce(row, None);
        match r.first() {
            None => false,
            Some(&(lead, _)) => {
                self.pivots.insert(lead, self.rows.len());
                self.rows.push(r);
                true
            }
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduced row echelon form: rows ordered by pivot column, pivot entry 1.
    fn into_rref(self) -> Vec<(usize, SparseVec)> {
        let mut done = Echelon::default();
        let order: Vec<(usize, usize)> = self.pivots.iter().rev().map(|(&c, &k)| (c, k)).collect();
        for (c, k) in order {
            let r = done.reduce(self.rows[k].clone(), Some(c));
            done.pivots.insert(c, done.rows.len());
            done.rows.push(r);
        }
        done.pivots
            .iter()
            .map(|(&c, &k)| {
                let row = &done.rows[k];
                let lead = Rational::from_integer(row[0].1.clone());
                (c, row.iter().map(|(j, v)| (*j, Rational::from_integer(v.clone()) / &lead)).collect())
            })
            .collect()
    }
}

fn echelon_of(rows: &[SparseVec]) -> Echelon {
    let mut e = Echelon::default();
    for r in rows {
        e.insert(to_primitive(r));
    }
    e
}

/// Connected blocks of the row/column incidence graph: (row indices, column indices).
fn blocks(m: &SparseMatrix) -> Vec<(Vec<usize>, Vec<usize>)> {
    let n = m.nrows + m.ncols;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (i, r) in m.rows.iter().enumerate() {
        for (c, _) in r {
            let (a, b) = (find(&mut parent, i), find(&mut parent, m.nrows + c));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }
    let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        let g = groups.entry(root).or_default();
        if i < m.nrows {
            g.0.push(i);
        } else {
            g.1.push(i - m.nrows);
        }
    }
    groups.into_values().filter(|g| !g.0.is_empty()).collect()
}

pub fn rank(m: &SparseMatrix) -> usize {
    let bl = blocks(m);
    bl.par_iter().map(|(rows, _)| echelon_of(&rows.iter().map(|&r| m.rows[r].clone()).collect::<Vec<_>>()).rank()).sum()
}

/// Reduced row echelon form as (pivot column, normalized row) pairs in pivot order.
pub fn rref(m: &SparseMatrix) -> Vec<(usize, SparseVec)> {
    echelon_of(&m.rows).into_rref()
}

/// Right null-space basis. One vector per free column, in increasing order of
/// the free column; each has a 1 at its free column and is zero on all other
/// free columns.
pub fn nullspace(m: &SparseMatrix) -> Vec<SparseVec> {
    null_basis(m).into_iter().map(|p| p.1).collect()
}

/// [`nullspace`] with each vector tagged by its free column.
pub fn null_basis(m: &SparseMatrix) -> Vec<(usize, SparseVec)> {
    let bl = blocks(m);
    let mut touched = vec![false; m.ncols];
    let mut parts: Vec<(usize, SparseVec)> = bl
        .par_iter()
        .flat_map_iter(|(rows, cols)| {
            let rr = echelon_of(&rows.iter().map(|&r| m.rows[r].clone()).collect::<Vec<_>>()).into_rref();
            null_from_rref(&rr, cols)
        })
        .collect();
    for (_, cols) in &bl {
        for &c in cols {
            touched[c] = true;
        }
    }
    // Columns with no entries at all are free with a unit null vector.
    parts.extend(touched.iter().enumerate().filter(|(_, t)| !**t).map(|(c, _)| (c, vec![(c, Rational::one())])));
    parts.sort_by_key(|p| p.0);
    parts
}

fn null_from_rref(rr: &[(usize, SparseVec)], cols: &[usize]) -> Vec<(usize, SparseVec)> {
    let pivots: std::collections::BTreeSet<usize> = rr.iter().map(|p| p.0).collect();
    let mut by_free: BTreeMap<usize, Vec<(usize, Rational)>> = BTreeMap::new();
    for &c in cols {
        if !pivots.contains(&c) {
            by_free.insert(c, vec![(c, Rational::one())]);
        }
    }
    for (p, row) in rr {
        for (c, v) in row {
            if c != p {
                if let Some(vec) = by_free.get_mut(c) {
                    vec.push((*p, -v));
                }
            }
        }
    }
    by_free.into_iter().map(|(c, v)| (c, normalize_sparse(v))).collect()
}

/// Left null space: vectors `v` with `vᵀ m = 0`.
pub fn left_nullspace(m: &SparseMatrix) -> Vec<SparseVec> {
    nullspace(&m.transpose())
}

pub fn invert(m: &SparseMatrix) -> Result<SparseMatrix> {
    let n = m.nrows;
    if m.ncols != n {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols });
    }
    let aug = m.hstack(&SparseMatrix::identity(n))?;
    let rr = rref(&aug);
    let full = rr.len() == n && rr.iter().enumerate().all(|(i, (p, _))| *p == i);
    if !full {
        return Err(Error::SingularMatrix { rank: rank(m), dim: n });
    }
    let rows = rr
        .into_iter()
        .map(|(_, row)| row.into_iter().filter(|(c, _)| *c >= n).map(|(c, v)| (c - n, v)).collect())
        .collect();
    Ok(SparseMatrix { nrows: n, ncols: n, rows })
}

/// Solve `a x = b` for the matrix `x`, setting every free variable to zero.
pub fn solve(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    let n = a.ncols;
    let aug = a.hstack(b)?;
    let rr = rref(&aug);
    let mut rows: Vec<SparseVec> = vec![Vec::new(); n];
    for (p, row) in rr {
        if p >= n {
            return Err(Error::Unsolvable);
        }
        rows[p] = row.into_iter().filter(|(c, _)| *c >= n).map(|(c, v)| (c - n, v)).collect();
    }
    Ok(SparseMatrix { nrows: n, ncols: b.ncols, rows })
}

/// Indices of the rows kept by a first-come greedy scan for a row basis.
pub fn independent_rows(rows: &[SparseVec]) -> Vec<usize> {
    let mut e = Echelon::default();
    rows.iter().enumerate().filter_map(|(i, r)| e.insert(to_primitive(r)).then_some(i)).collect()
}

/// Incrementally maintained row span, for repeated membership queries.
#[derive(Default)]
pub struct RowSpan {
    ech: Echelon,
}

impl RowSpan {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rows(rows: &[SparseVec]) -> Self {
        RowSpan { ech: echelon_of(rows) }
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.ech.reduce(to_primitive(v), None).is_empty()
    }

    pub fn insert(&mut self, v: &SparseVec) -> bool {
        self.ech.insert(to_primitive(v))
    }

    pub fn dim(&self) -> usize {
        self.ech.rank()
    }
}

pub fn span_contains(rows: &[Vec<Rational>], v: &[Rational]) -> Result<bool> {
    for r in rows {
        if r.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: v.len(), found: r.len() });
        }
    }
    let base = SparseMatrix::from_dense(rows);
    let mut ext = rows.to_vec();
    ext.push(v.to_vec());
    let ext = SparseMatrix::from_dense(&ext);
    let base_rank = if rows.is_empty() { 0 } else { rank(&base) };
    Ok(rank(&ext) == base_rank)
}

/// True when the two row sets span the same space.
pub fn same_span(a: &[SparseVec], b: &[SparseVec]) -> bool {
    let sa = RowSpan::from_rows(a);
    let sb = RowSpan::from_rows(b);
    sa.dim() == sb.dim() && b.iter().all(|v| sa.contains(v))
}
