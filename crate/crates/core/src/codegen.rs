//! Generator synthesis and the verifiers that certify it.
//!
//! A generator must be zero wherever the indicator matrix is zero, give
//! every `alpha` columns of a bucket full rank `alpha` (group
//! decodability), and give every `n - d + 1` columns rank `k` (distance
//! `d`). Feasibility of the last requirement depends only on the support
//! pattern; the two covering conditions below decide it without a field.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::combinatorics::{binomial, Combinations};
use crate::design::CodeDesign;
use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};
use crate::matrix::{
    hall_matching, mask_to_indices, min_cover_by_size, BinaryMatrix, FieldMatrix, HallOutcome,
    XI_MAX_COLS,
};

/// Exhaustive column-subset checks run only up to this many columns.
pub const EXHAUSTIVE_MAX_N: usize = 14;
/// Exhaustive row-subset checks run only up to this many rows.
pub const EXHAUSTIVE_MAX_K: usize = 14;
/// Cap on the number of column subsets a rank verifier will enumerate.
pub const SUBSET_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Covering conditions on the support only.
    Structural,
    /// Covering conditions plus the rank verifiers on the generator.
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthesisConfig {
    pub seed: u64,
    pub retry_budget: u32,
    pub verify_level: VerifyLevel,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            seed: 0,
            retry_budget: 256,
            verify_level: VerifyLevel::Full,
        }
    }
}

/// A `k x n` generator together with the binary pattern it is supported by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorMatrix {
    matrix: FieldMatrix,
    support: BinaryMatrix,
    claimed_delta: i64,
}

impl GeneratorMatrix {
    /// Fails if `matrix` has a nonzero entry where `support` is zero.
    pub fn new(matrix: FieldMatrix, support: BinaryMatrix, claimed_delta: i64) -> Result<Self> {
        if matrix.rows() != support.rows() || matrix.cols() != support.cols() {
            return Err(Error::DimensionMismatch(format!(
                "generator is {}x{}, support is {}x{}",
                matrix.rows(),
                matrix.cols(),
                support.rows(),
                support.cols()
            )));
        }
        if let Some((i, j)) = support_violation(&matrix, &support) {
            return Err(Error::VerificationFailed(format!(
                "entry ({}, {}) is nonzero outside the support",
                i + 1,
                j + 1
            )));
        }
        Ok(GeneratorMatrix {
            matrix,
            support,
            claimed_delta,
        })
    }

    pub fn matrix(&self) -> &FieldMatrix {
        &self.matrix
    }

    pub fn support(&self) -> &BinaryMatrix {
        &self.support
    }

    pub fn claimed_delta(&self) -> i64 {
        self.claimed_delta
    }

    pub fn field(&self) -> &FieldSpec {
        self.matrix.field()
    }

    pub fn k(&self) -> usize {
        self.matrix.rows()
    }

    pub fn n(&self) -> usize {
        self.matrix.cols()
    }
}

/// First nonzero entry of `g` where `m` is zero.
pub fn support_violation(g: &FieldMatrix, m: &BinaryMatrix) -> Option<(usize, usize)> {
    (0..g.rows())
        .flat_map(|i| (0..g.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| !m.get(i, j) && !g.get(i, j).is_zero())
}

/// Result of the column covering check: every `ℓ + δ` columns cover at
/// least `ℓ` rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverCheck {
    Pass,
    /// `columns` (0-based, `ℓ + δ` of them) cover fewer than `ell` rows.
    Violated {
        ell: usize,
        columns: Vec<usize>,
    },
}

impl CoverCheck {
    pub fn passed(&self) -> bool {
        matches!(self, CoverCheck::Pass)
    }
}

/// Result of the row-union check: every nonempty row set `I` has
/// `|⋃ R_M(i)| >= n - k + |I| - δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowUnionCheck {
    Pass,
    Violated { rows: Vec<usize> },
}

impl RowUnionCheck {
    pub fn passed(&self) -> bool {
        matches!(self, RowUnionCheck::Pass)
    }
}

fn cover_check_from_profile(
    best: &[(usize, u64)],
    k: usize,
    n: usize,
    delta: usize,
) -> Option<(usize, usize)> {
    (1..=k)
        .take_while(|&l| l + delta <= n)
        .find(|&l| best[l + delta].0 < l)
        .map(|l| (l, l + delta))
}

/// Column covering check on an arbitrary support matrix.
///
/// Enumerates all column subsets when `n <= 14`. Wider matrices are
/// accepted when their columns come in identical consecutive blocks (an
/// indicator matrix), where the check reduces to the block matrix.
pub fn check_condition2(m: &BinaryMatrix, delta: usize) -> Result<CoverCheck> {
    let (k, n) = (m.rows(), m.cols());
    if n <= EXHAUSTIVE_MAX_N {
        let best = min_cover_by_size(&m.col_masks()?);
        return Ok(match cover_check_from_profile(&best, k, n, delta) {
            None => CoverCheck::Pass,
            Some((ell, size)) => CoverCheck::Violated {
                ell,
                columns: mask_to_indices(best[size].1 as u128),
            },
        });
    }
    match split_indicator(m) {
        Some((m0, beta)) if m0.cols() <= XI_MAX_COLS => {
            check_condition2_indicator(&m0, beta, delta)
        }
        _ => Err(Error::TooLarge {
            what: "columns for exhaustive covering check",
            size: n as u128,
            limit: EXHAUSTIVE_MAX_N as u128,
        }),
    }
}

/// Column covering check for the indicator matrix of `(M0, beta)`, using
/// `ξ_M(ℓ) = ξ_M0(⌈ℓ/β⌉)`.
pub fn check_condition2_indicator(
    m0: &BinaryMatrix,
    beta: usize,
    delta: usize,
) -> Result<CoverCheck> {
    let (k, t) = (m0.rows(), m0.cols());
    if t > XI_MAX_COLS {
        return Err(Error::TooLarge {
            what: "buckets for covering check",
            size: t as u128,
            limit: XI_MAX_COLS as u128,
        });
    }
    let n = t * beta;
    let best0 = min_cover_by_size(&m0.col_masks()?);
    let lifted: Vec<(usize, u64)> = (0..=n).map(|l| best0[l.div_ceil(beta)]).collect();
    Ok(match cover_check_from_profile(&lifted, k, n, delta) {
        None => CoverCheck::Pass,
        Some((ell, size)) => {
            let buckets = mask_to_indices(lifted[size].1 as u128);
            let columns = buckets
                .iter()
                .flat_map(|&b| b * beta..(b + 1) * beta)
                .take(size)
                .collect();
            CoverCheck::Violated { ell, columns }
        }
    })
}

/// Detects an indicator matrix: returns `(M0, beta)` for the largest
/// `beta > 1` such that columns come in identical runs of `beta`.
pub fn split_indicator(m: &BinaryMatrix) -> Option<(BinaryMatrix, usize)> {
    let n = m.cols();
    (2..=n)
        .rev()
        .filter(|b| n.is_multiple_of(*b))
        .find_map(|beta| {
            let same = (0..n).all(|j| {
                let base = j - j % beta;
                (0..m.rows()).all(|i| m.get(i, j) == m.get(i, base))
            });
            if !same {
                return None;
            }
            let t = n / beta;
            let mut m0 = BinaryMatrix::zeros(m.rows(), t);
            for i in 0..m.rows() {
                for b in 0..t {
                    m0.set(i, b, m.get(i, b * beta));
                }
            }
            Some((m0, beta))
        })
}

/// Row-union check over every nonempty row subset (`k <= 14`).
pub fn check_condition3(m: &BinaryMatrix, delta: usize) -> Result<RowUnionCheck> {
    let (k, n) = (m.rows(), m.cols());
    if k > EXHAUSTIVE_MAX_K {
        return Err(Error::TooLarge {
            what: "rows for exhaustive row-union check",
            size: k as u128,
            limit: EXHAUSTIVE_MAX_K as u128,
        });
    }
    let rows = m.row_masks()?;
    let mut union = vec![0u128; 1 << k];
    for mask in 1usize..(1 << k) {
        let low = mask.trailing_zeros() as usize;
        union[mask] = union[mask & (mask - 1)] | rows[low];
        let need = n as i64 - k as i64 + mask.count_ones() as i64 - delta as i64;
        if (union[mask].count_ones() as i64) < need {
            return Ok(RowUnionCheck::Violated {
                rows: mask_to_indices(mask as u128),
            });
        }
    }
    Ok(RowUnionCheck::Pass)
}

/// Matching between all rows of `m` and the given columns (edges where `m`
/// is one), as used to show some `k` of them carry a nonsingular minor.
pub fn support_matching(m: &BinaryMatrix, columns: &[usize]) -> HallOutcome {
    let adj: Vec<Vec<usize>> = (0..m.rows())
        .map(|i| {
            columns
                .iter()
                .enumerate()
                .filter(|(_, &j)| m.get(i, j))
                .map(|(c, _)| c)
                .collect()
        })
        .collect();
    hall_matching(&adj, columns.len())
}

/// Contributing bucket and the information symbols it covers.
pub type Partition = Vec<(usize, Vec<usize>)>;

/// Extends `positions` (inside bucket `bucket`) to `k` columns whose
/// support admits a perfect matching: greedily adds buckets that read new
/// information symbols, taking as many leading positions from each as it
/// contributes. Returns the partition of `[k]` (per contributing bucket)
/// and the extended column set, ascending.
pub fn covering_extension(
    design: &CodeDesign,
    bucket: usize,
    positions: &[usize],
) -> Result<(Partition, Vec<usize>)> {
    let span = design.bucket(bucket);
    if positions.len() != design.alpha() || positions.iter().any(|p| !span.contains(p)) {
        return Err(Error::InvalidParams(format!(
            "need {} positions inside bucket {}",
            design.alpha(),
            bucket + 1
        )));
    }
    let mut covered = vec![false; design.k()];
    let mut parts = Vec::new();
    let mut j0: Vec<usize> = positions.to_vec();
    for b in std::iter::once(bucket).chain((0..design.t()).filter(|&b| b != bucket)) {
        let new: Vec<usize> = design
            .support(b)
            .iter()
            .copied()
            .filter(|&i| !covered[i])
            .collect();
        if new.is_empty() {
            continue;
        }
        for &i in &new {
            covered[i] = true;
        }
        if b != bucket {
            j0.extend(design.bucket(b).take(new.len()));
        }
        parts.push((b, new));
        if covered.iter().all(|&c| c) {
            break;
        }
    }
    j0.sort_unstable();
    Ok((parts, j0))
}

/// Outcome of the group decodability verifier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GdcCheck {
    Pass,
    /// Nonzero generator entry where the indicator matrix is zero.
    SupportViolation {
        row: usize,
        col: usize,
    },
    /// `alpha` columns of one bucket with rank below `alpha`.
    BucketRankDeficient {
        bucket: usize,
        columns: Vec<usize>,
    },
}

impl GdcCheck {
    pub fn passed(&self) -> bool {
        matches!(self, GdcCheck::Pass)
    }
}

/// Checks support containment and full rank of every `alpha`-subset of
/// every bucket.
pub fn verify_gdc(g: &GeneratorMatrix, design: &CodeDesign) -> Result<GdcCheck> {
    verify_gdc_matrix(g.matrix(), design)
}

/// [`verify_gdc`] on a bare matrix, for callers that have not yet
/// established support containment.
pub fn verify_gdc_matrix(g: &FieldMatrix, design: &CodeDesign) -> Result<GdcCheck> {
    if g.rows() != design.k() || g.cols() != design.n() {
        return Err(Error::DimensionMismatch(format!(
            "generator is {}x{}, design needs {}x{}",
            g.rows(),
            g.cols(),
            design.k(),
            design.n()
        )));
    }
    if let Some((row, col)) = support_violation(g, design.indicator()) {
        return Ok(GdcCheck::SupportViolation { row, col });
    }
    let alpha = design.alpha();
    for b in 0..design.t() {
        let base = design.bucket(b).start;
        for sub in Combinations::new(design.beta(), alpha) {
            let cols: Vec<usize> = sub.iter().map(|&c| base + c).collect();
            if g.rank_of_columns(&cols)? != alpha {
                return Ok(GdcCheck::BucketRankDeficient {
                    bucket: b,
                    columns: cols,
                });
            }
        }
    }
    Ok(GdcCheck::Pass)
}

/// Outcome of exact distance verification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistanceCheck {
    Confirmed,
    /// These `n - d + 1` columns have rank below `k`, so the distance is smaller.
    BelowClaim {
        columns: Vec<usize>,
    },
    /// Every `n - d` columns already have rank `k`, so the distance is larger.
    AboveClaim,
}

impl DistanceCheck {
    pub fn passed(&self) -> bool {
        matches!(self, DistanceCheck::Confirmed)
    }
}

/// Confirms the code generated by `g` has minimum distance exactly `d`:
/// all `(n-d+1)`-column subsets have rank `k` and some `(n-d)`-subset does not.
pub fn verify_distance_exact(g: &GeneratorMatrix, d: usize) -> Result<DistanceCheck> {
    verify_distance_matrix(g.matrix(), d)
}

/// [`verify_distance_exact`] on a bare matrix.
pub fn verify_distance_matrix(g: &FieldMatrix, d: usize) -> Result<DistanceCheck> {
    let (k, n) = (g.rows(), g.cols());
    if d == 0 || d > n {
        return Err(Error::InvalidParams(format!(
            "distance {d} outside 1..={n}"
        )));
    }
    let all = n - d + 1;
    let total = binomial(n as u64, all as u64) + binomial(n as u64, all as u64 - 1);
    if total > SUBSET_LIMIT {
        return Err(Error::TooLarge {
            what: "column subsets for distance verification",
            size: total,
            limit: SUBSET_LIMIT,
        });
    }
    if let Some(columns) = first_deficient_subset(g, all) {
        return Ok(DistanceCheck::BelowClaim { columns });
    }
    if all - 1 < k || first_deficient_subset(g, all - 1).is_some() {
        Ok(DistanceCheck::Confirmed)
    } else {
        Ok(DistanceCheck::AboveClaim)
    }
}

/// Lexicographically first `size`-subset of columns with rank below `k`.
///
/// Depth-first over subsets in lexicographic order, keeping a reduced
/// basis of the current prefix. A prefix that already has rank `k` cannot
/// extend to a deficient subset, so its whole subtree is skipped; a prefix
/// that can no longer reach rank `k` yields its smallest completion.
pub(crate) fn first_deficient_subset(g: &FieldMatrix, size: usize) -> Option<Vec<usize>> {
    let (k, n) = (g.rows(), g.cols());
    if size > n {
        return None;
    }
    if size < k {
        return Some((0..size).collect());
    }
    let f = g.field();
    let cols: Vec<Vec<FieldElement>> = (0..n)
        .map(|j| (0..k).map(|i| g.get(i, j)).collect())
        .collect();
    (0..=n - size).into_par_iter().find_map_first(|first| {
        let mut chosen = vec![first];
        let mut basis = Vec::with_capacity(k);
        push_if_independent(f, &mut basis, &cols[first]);
        deficient_dfs(f, &cols, k, size, first + 1, &mut chosen, &mut basis)
    })
}

type Basis = Vec<(usize, Vec<FieldElement>)>;

fn push_if_independent(f: &FieldSpec, basis: &mut Basis, col: &[FieldElement]) -> bool {
    let mut v = col.to_vec();
    for (pivot, b) in basis.iter() {
        let c = v[*pivot];
        if !c.is_zero() {
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
    }
    match v.iter().position(|x| !x.is_zero()) {
        Some(pivot) => {
            let inv = f.inv(v[pivot]).expect("nonzero");
            v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
            basis.push((pivot, v));
            true
        }
        None => false,
    }
}

fn deficient_dfs(
    f: &FieldSpec,
    cols: &[Vec<FieldElement>],
    k: usize,
    size: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    basis: &mut Basis,
) -> Option<Vec<usize>> {
    if basis.len() == k {
        return None;
    }
    let need = size - chosen.len();
    if basis.len() + need < k {
        let mut out = chosen.clone();
        out.extend(start..start + need);
        return Some(out);
    }
    for c in start..=cols.len() - need {
        chosen.push(c);
        let added = push_if_independent(f, basis, &cols[c]);
        let found = deficient_dfs(f, cols, k, size, c + 1, chosen, basis);
        if added {
            basis.pop();
        }
        chosen.pop();
        if found.is_some() {
            return found;
        }
    }
    None
}

#[cfg(test)]
pub(crate) fn rank_below(g: &FieldMatrix, cols: &[usize], k: usize) -> bool {
    cols.len() < k || g.rank_of_columns(cols).expect("indices in range") < k
}

#[cfg(test)]
const CHUNK: u128 = 2048;

/// First `size`-subset of `0..n` (lexicographic) satisfying `pred`,
/// searched in parallel chunks.
#[cfg(test)]
pub(crate) fn find_subset<F>(n: usize, size: usize, pred: F) -> Option<Vec<usize>>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let total = binomial(n as u64, size as u64);
    if total == 0 {
        return None;
    }
    let chunks = total.div_ceil(CHUNK);
    (0..chunks as u64).into_par_iter().find_map_first(|c| {
        let start = c as u128 * CHUNK;
        let mut it = Combinations::starting_at(n, size, start);
        let mut left = CHUNK.min(total - start);
        while left > 0 {
            let cur = it.current()?;
            if pred(cur) {
                return Some(cur.to_vec());
            }
            it.step();
            left -= 1;
        }
        None
    })
}

/// Samples a generator supported by the design's indicator matrix that is
/// group decodable and meets the design's achievable distance.
pub fn synthesize_generator(
    design: &CodeDesign,
    field: &FieldSpec,
    cfg: &SynthesisConfig,
) -> Result<GeneratorMatrix> {
    synthesize_for_distance(design, field, cfg, design.achievable_distance())
}

/// As [`synthesize_generator`] with an explicit target distance.
///
/// Every support entry is drawn uniformly from the nonzero field elements;
/// draws repeat (deterministically from `cfg.seed`) until both rank
/// verifiers pass or the budget runs out.
pub fn synthesize_for_distance(
    design: &CodeDesign,
    field: &FieldSpec,
    cfg: &SynthesisConfig,
    target: usize,
) -> Result<GeneratorMatrix> {
    if cfg.retry_budget == 0 {
        return Err(Error::InvalidParams(
            "retry budget must be at least 1".into(),
        ));
    }
    let (k, n) = (design.k(), design.n());
    let singleton = n - k + 1;
    if target == 0 || target > singleton {
        return Err(Error::InvalidParams(format!(
            "target distance {target} outside 1..={singleton}"
        )));
    }
    let delta = singleton - target;
    if let CoverCheck::Violated { ell, columns } =
        check_condition2_indicator(design.incidence(), design.beta(), delta)?
    {
        return Err(Error::StructurallyInfeasible {
            target,
            ell,
            columns,
        });
    }
    let threshold = binomial(n as u64 - 1, k as u64 - 1);
    if (field.order() as u128) <= threshold {
        log::warn!(
            "field of size {} does not exceed C(n-1, k-1) = {threshold}; a suitable generator may not exist",
            field.order()
        );
    }

    let m = design.indicator();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut last = String::new();
    for _ in 0..cfg.retry_budget {
        let mut g = FieldMatrix::zeros(field.clone(), k, n);
        for i in 0..k {
            for j in 0..n {
                if m.get(i, j) {
                    let v = rng.gen_range(1..field.order());
                    g.set(i, j, field.element(v)?);
                }
            }
        }
        match verify_gdc_matrix(&g, design)? {
            GdcCheck::Pass => {}
            other => {
                last = format!("{other:?}");
                continue;
            }
        }
        match verify_distance_matrix(&g, target)? {
            DistanceCheck::Confirmed => {
                return GeneratorMatrix::new(g, m.clone(), delta as i64);
            }
            other => last = format!("distance check: {other:?}"),
        }
    }
    Err(Error::RetriesExhausted {
        attempts: cfg.retry_budget,
        last,
    })
}

/// Field-free feasibility of the design's achievable distance, via both
/// covering conditions. The row-union form needs `k <= 14`; above that
/// only the column form runs.
pub fn structural_check(design: &CodeDesign) -> Result<(CoverCheck, Option<RowUnionCheck>)> {
    structural_check_at(design, design.delta0().max(0) as usize)
}

/// [`structural_check`] at an arbitrary `delta`.
pub fn structural_check_at(
    design: &CodeDesign,
    delta: usize,
) -> Result<(CoverCheck, Option<RowUnionCheck>)> {
    let c2 = check_condition2_indicator(design.incidence(), design.beta(), delta)?;
    let c3 = if design.k() <= EXHAUSTIVE_MAX_K && design.n() <= 128 {
        Some(check_condition3(design.indicator(), delta)?)
    } else {
        None
    };
    Ok((c2, c3))
}

/// All entries one on the support; handy for hand-built fixtures.
pub fn unit_generator(design: &CodeDesign, field: &FieldSpec) -> FieldMatrix {
    let m = design.indicator();
    let mut g = FieldMatrix::zeros(field.clone(), design.k(), design.n());
    for i in 0..design.k() {
        for j in 0..design.n() {
            if m.get(i, j) {
                g.set(i, j, FieldElement::ONE);
            }
        }
    }
    g
}
