//! Binary support matrices and matrices over GF(2^m).
//!
//! All indices are 0-based in the API. Serialized forms (bitstrings, the
//! 1-based sets in JSON files) are handled in [`crate::artifact`].

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};

/// Exhaustive ξ enumeration walks every column subset.
pub const XI_MAX_COLS: usize = 20;

/// A dense 0/1 matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BinaryMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        BinaryMatrix {
            rows,
            cols,
            bits: vec![true; rows * cols],
        }
    }

    /// Builds from rows of 0/1 values. Rejects ragged or empty input and
    /// entries other than 0 and 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        if r == 0 || c == 0 {
            return Err(Error::DimensionMismatch("empty binary matrix".into()));
        }
        let mut bits = Vec::with_capacity(r * c);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            for &b in row {
                match b {
                    0 => bits.push(false),
                    1 => bits.push(true),
                    _ => return Err(Error::Parse(format!("entry {b} is not 0 or 1"))),
                }
            }
        }
        Ok(BinaryMatrix {
            rows: r,
            cols: c,
            bits,
        })
    }

    /// Rows from row supports (each a list of column indices).
    pub fn from_row_supports(supports: &[Vec<usize>], cols: usize) -> Result<Self> {
        let mut m = Self::zeros(supports.len(), cols);
        for (i, s) in supports.iter().enumerate() {
            for &j in s {
                if j >= cols {
                    return Err(Error::IndexOutOfRange {
                        index: j,
                        bound: cols,
                    });
                }
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.cols..(i + 1) * self.cols]
    }

    /// `R_A(i)`: column indices of the ones in row `i`.
    pub fn row_support(&self, i: usize) -> Vec<usize> {
        (0..self.cols).filter(|&j| self.get(i, j)).collect()
    }

    /// `C_A(j)`: row indices of the ones in column `j`.
    pub fn col_support(&self, j: usize) -> Vec<usize> {
        (0..self.rows).filter(|&i| self.get(i, j)).collect()
    }

    pub fn row_weight(&self, i: usize) -> usize {
        self.row(i).iter().filter(|&&b| b).count()
    }

    pub fn col_weight(&self, j: usize) -> usize {
        (0..self.rows).filter(|&i| self.get(i, j)).count()
    }

    pub fn col_weights(&self) -> Vec<usize> {
        (0..self.cols).map(|j| self.col_weight(j)).collect()
    }

    pub fn ones_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Column supports as row bitmasks. Requires `rows <= 64`.
    pub fn col_masks(&self) -> Result<Vec<u64>> {
        if self.rows > 64 {
            return Err(Error::TooLarge {
                what: "row count for bitmask",
                size: self.rows as u128,
                limit: 64,
            });
        }
        Ok((0..self.cols)
            .map(|j| {
                (0..self.rows)
                    .filter(|&i| self.get(i, j))
                    .fold(0u64, |m, i| m | 1 << i)
            })
            .collect())
    }

    /// Row supports as column bitmasks. Requires `cols <= 128`.
    pub fn row_masks(&self) -> Result<Vec<u128>> {
        if self.cols > 128 {
            return Err(Error::TooLarge {
                what: "column count for bitmask",
                size: self.cols as u128,
                limit: 128,
            });
        }
        Ok((0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .filter(|&j| self.get(i, j))
                    .fold(0u128, |m, j| m | 1 << j)
            })
            .collect())
    }

    /// Vertical concatenation.
    pub fn stack(&self, below: &BinaryMatrix) -> Result<BinaryMatrix> {
        if self.cols != below.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot stack {} columns on {}",
                self.cols, below.cols
            )));
        }
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&below.bits);
        Ok(BinaryMatrix {
            rows: self.rows + below.rows,
            cols: self.cols,
            bits,
        })
    }

    /// Each column repeated `times` times in place.
    pub fn replicate_columns(&self, times: usize) -> BinaryMatrix {
        let mut out = Self::zeros(self.rows, self.cols * times);
        for i in 0..self.rows {
            for j in 0..self.cols * times {
                out.set(i, j, self.get(i, j / times));
            }
        }
        out
    }

    pub fn profile(&self) -> RowProfile {
        supports_and_weights(self)
    }
}

/// Row/column statistics of a binary matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowProfile {
    pub row_supports: Vec<Vec<usize>>,
    pub col_supports: Vec<Vec<usize>>,
    /// `w_min(A)`
    pub w_min: usize,
    /// `Γ_A(i)` for every row
    pub repetition: Vec<usize>,
    /// `Γ(A)`: largest repetition among minimal rows
    pub gamma: usize,
    /// `Φ_A`: indices of minimal rows, ascending
    pub minimal_rows: Vec<usize>,
}

pub fn supports_and_weights(a: &BinaryMatrix) -> RowProfile {
    let row_supports: Vec<Vec<usize>> = (0..a.rows).map(|i| a.row_support(i)).collect();
    let col_supports = (0..a.cols).map(|j| a.col_support(j)).collect();
    let w_min = row_supports.iter().map(Vec::len).min().unwrap_or(0);
    let mut counts: HashMap<&[usize], usize> = HashMap::new();
    for s in &row_supports {
        *counts.entry(s.as_slice()).or_default() += 1;
    }
    let repetition: Vec<usize> = row_supports.iter().map(|s| counts[s.as_slice()]).collect();
    let minimal_rows: Vec<usize> = (0..a.rows)
        .filter(|&i| row_supports[i].len() == w_min)
        .collect();
    let gamma = minimal_rows
        .iter()
        .map(|&i| repetition[i])
        .max()
        .unwrap_or(0);
    RowProfile {
        row_supports,
        col_supports,
        w_min,
        repetition,
        gamma,
        minimal_rows,
    }
}

/// For every subset size `i` in `0..=cols`: the minimum number of rows
/// covered by `i` columns and the first subset (as a column bitmask, in
/// increasing mask order) attaining it.
pub fn min_cover_by_size(col_masks: &[u64]) -> Vec<(usize, u64)> {
    let c = col_masks.len();
    let mut best = vec![(usize::MAX, 0u64); c + 1];
    let mut union = vec![0u64; 1usize << c];
    best[0] = (0, 0);
    for mask in 1usize..(1 << c) {
        let low = mask.trailing_zeros() as usize;
        union[mask] = union[mask & (mask - 1)] | col_masks[low];
        let size = mask.count_ones() as usize;
        let cover = union[mask].count_ones() as usize;
        if cover < best[size].0 {
            best[size] = (cover, mask as u64);
        }
    }
    best
}

/// `ξ_A(i)` for `i = 1..=cols`, returned at index `i - 1`.
pub fn xi_profile(a: &BinaryMatrix) -> Result<Vec<usize>> {
    if a.cols > XI_MAX_COLS {
        return Err(Error::TooLarge {
            what: "columns for exhaustive covering profile",
            size: a.cols as u128,
            limit: XI_MAX_COLS as u128,
        });
    }
    let masks = a.col_masks()?;
    Ok(min_cover_by_size(&masks)[1..]
        .iter()
        .map(|&(v, _)| v)
        .collect())
}

pub fn mask_to_indices(mask: u128) -> Vec<usize> {
    (0..128).filter(|&b| mask >> b & 1 == 1).collect()
}

/// Outcome of a Hall-condition check on a bipartite graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HallOutcome {
    /// `matching[u]` is the right vertex matched to left vertex `u`.
    Matching(Vec<usize>),
    /// Left vertices `S` (ascending) with `|N(S)| < |S|`.
    Violation(Vec<usize>),
}

/// Finds a matching saturating every left vertex, or a Hall violator.
///
/// `adjacency[u]` lists the right neighbours of left vertex `u`; right
/// vertices are `0..right_count`. Left vertices are processed in
/// ascending order, and each tries a free neighbour (lowest index first)
/// before attempting an augmenting path.
pub fn hall_matching(adjacency: &[Vec<usize>], right_count: usize) -> HallOutcome {
    let mut adj: Vec<Vec<usize>> = adjacency.to_vec();
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    let mut match_right: Vec<Option<usize>> = vec![None; right_count];
    let mut match_left: Vec<Option<usize>> = vec![None; adj.len()];
    for u in 0..adj.len() {
        if let Some(&v) = adj[u].iter().find(|&&v| match_right[v].is_none()) {
            match_right[v] = Some(u);
            match_left[u] = Some(v);
            continue;
        }
        let mut visited = vec![false; right_count];
        if !augment(u, &adj, &mut match_right, &mut match_left, &mut visited) {
            // Left vertices reachable by alternating paths from u: u plus
            // the partners of every visited (necessarily matched) right vertex.
            let mut s: Vec<usize> = visited
                .iter()
                .enumerate()
                .filter(|(_, &seen)| seen)
                .filter_map(|(v, _)| match_right[v])
                .collect();
            s.push(u);
            s.sort_unstable();
            return HallOutcome::Violation(s);
        }
    }
    HallOutcome::Matching(match_left.into_iter().map(|v| v.unwrap()).collect())
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_right: &mut [Option<usize>],
    match_left: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &v in &adj[u] {
        if visited[v] {
            continue;
        }
        visited[v] = true;
        let free = match match_right[v] {
            None => true,
            Some(w) => augment(w, adj, match_right, match_left, visited),
        };
        if free {
            match_right[v] = Some(u);
            match_left[u] = Some(v);
            return true;
        }
    }
    false
}

/// A dense matrix over GF(2^m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

impl FieldMatrix {
    pub fn zeros(field: FieldSpec, rows: usize, cols: usize) -> Self {
        FieldMatrix {
            field,
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn from_rows(field: FieldSpec, rows: Vec<Vec<FieldElement>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != c {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {c}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|e| !field.contains(**e)) {
                return Err(Error::ElementOutOfRange {
                    value: bad.value() as u64,
                    m: field.degree(),
                });
            }
            data.extend(row);
        }
        Ok(FieldMatrix {
            field,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<FieldElement>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Rank of the submatrix formed by the columns in `cols`.
    pub fn rank_of_columns(&self, cols: &[usize]) -> Result<usize> {
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.cols) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                bound: self.cols,
            });
        }
        let mut work: Vec<FieldElement> = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            work.extend(cols.iter().map(|&j| self.get(i, j)));
        }
        Ok(row_reduce(&self.field, &mut work, self.rows, cols.len()).len())
    }

    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        row_reduce(&self.field, &mut work, self.rows, self.cols).len()
    }

    /// `x · A` for a row vector `x` of length `rows`.
    pub fn left_mul(&self, x: &[FieldElement]) -> Result<Vec<FieldElement>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} times {}x{} matrix",
                x.len(),
                self.rows,
                self.cols
            )));
        }
        let f = &self.field;
        let mut out = vec![FieldElement::ZERO; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(xi, self.get(i, j)));
            }
        }
        Ok(out)
    }
}

/// Gauss-Jordan elimination in place on a row-major `rows x cols` buffer.
/// Pivot for each column is the first remaining row with a nonzero entry.
/// Returns the pivot column of each pivot row, in order.
pub(crate) fn row_reduce(
    f: &FieldSpec,
    a: &mut [FieldElement],
    rows: usize,
    cols: usize,
) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i * cols + c].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(a[r * cols + c]).expect("pivot is nonzero");
        for j in c..cols {
            a[r * cols + j] = f.mul(a[r * cols + j], inv);
        }
        for i in 0..rows {
            if i == r {
                continue;
            }
            let factor = a[i * cols + c];
            if factor.is_zero() {
                continue;
            }
            for j in c..cols {
                let sub = f.mul(factor, a[r * cols + j]);
                a[i * cols + j] = f.add(a[i * cols + j], sub);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Solves `A y = b` for square nonsingular `A` (row-major, `n x n`).
pub(crate) fn solve_square(
    f: &FieldSpec,
    a: &[FieldElement],
    b: &[FieldElement],
) -> Result<Vec<FieldElement>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let mut aug = Vec::with_capacity(n * (n + 1));
    for i in 0..n {
        aug.extend_from_slice(&a[i * n..(i + 1) * n]);
        aug.push(b[i]);
    }
    let pivots = row_reduce(f, &mut aug, n, n + 1);
    if pivots.len() < n || pivots[..n].iter().enumerate().any(|(i, &c)| c != i) {
        return Err(Error::Singular);
    }
    Ok((0..n).map(|i| aug[i * (n + 1) + n]).collect())
}
