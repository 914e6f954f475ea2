//! Parameter validation, distance bounds and the incidence-matrix
//! construction behind bound-achieving group decodable codes.
//!
//! A design fixes which `alpha` information symbols feed each of the `t`
//! buckets (the columns of the `k x t` incidence matrix `M0`) and expands
//! it to the `k x n` indicator matrix `M` that every generator must
//! respect.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::combinatorics::{binomial, ceil_div, colex_subsets, Combinations};
use crate::error::{Error, Result};
use crate::matrix::{min_cover_by_size, BinaryMatrix};

/// Largest `n` accepted by the exhaustive δ0 oracle.
pub const DELTA0_EXHAUSTIVE_MAX_N: usize = 14;
const BALANCE_RETRIES: u64 = 32;

/// Validated `(alpha, beta, k, t)` with the derived `t*alpha = s*k + r` and `n = t*beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub alpha: usize,
    pub beta: usize,
    pub k: usize,
    pub t: usize,
    pub s: usize,
    pub r: usize,
    pub n: usize,
}

pub fn validate_params(alpha: usize, beta: usize, k: usize, t: usize) -> Result<DesignParams> {
    if alpha == 0 || beta == 0 || k == 0 || t == 0 {
        return Err(Error::InvalidParams(
            "alpha, beta, k and t must be positive".into(),
        ));
    }
    if alpha >= k.min(beta) {
        return Err(Error::InvalidParams("alpha must be < min(k, beta)".into()));
    }
    let total = t
        .checked_mul(alpha)
        .ok_or_else(|| Error::InvalidParams("t * alpha overflows".into()))?;
    if total < k {
        return Err(Error::InvalidParams("t * alpha must be >= k".into()));
    }
    let n = t
        .checked_mul(beta)
        .ok_or_else(|| Error::InvalidParams("t * beta overflows".into()))?;
    Ok(DesignParams {
        alpha,
        beta,
        k,
        t,
        s: total / k,
        r: total % k,
        n,
    })
}

impl DesignParams {
    /// `⌈(k - r) / C(t, s)⌉`, the repetition a bound-achieving `M0` must have.
    pub fn required_gamma(&self) -> usize {
        let c = binomial(self.t as u64, self.s as u64);
        ceil_div_u128((self.k - self.r) as u128, c) as usize
    }

    pub fn gdc_bound(&self) -> usize {
        self.s * self.beta + 1 - self.required_gamma()
    }

    pub fn singleton(&self) -> usize {
        self.n - self.k + 1
    }
}

fn ceil_div_u128(a: u128, b: u128) -> u128 {
    a.div_ceil(b)
}

/// Upper bound on the minimum distance of any `(alpha, beta, k, t)` group
/// decodable code: `s*beta - ⌈(k-r)/C(t,s)⌉ + 1`.
pub fn gdc_bound(alpha: usize, beta: usize, k: usize, t: usize) -> Result<usize> {
    Ok(validate_params(alpha, beta, k, t)?.gdc_bound())
}

/// Distance bound for codes with `(alpha, delta)` locality:
/// `n - k + 1 - (⌈k/alpha⌉ - 1)(delta - 1)`.
pub fn lrc_bound(n: usize, k: usize, alpha: usize, delta: usize) -> Result<i64> {
    if alpha == 0 || alpha > k || delta < 2 || k > n {
        return Err(Error::InvalidParams(format!(
            "lrc bound needs 1 <= alpha <= k <= n and delta >= 2 (n={n}, k={k}, alpha={alpha}, delta={delta})"
        )));
    }
    let groups = ceil_div(k as u64, alpha as u64) as i64;
    Ok(n as i64 - k as i64 + 1 - (groups - 1) * (delta as i64 - 1))
}

/// Constructs a `k x t` incidence matrix with every column of weight
/// `alpha`, `w_min = s` and `Γ = ⌈(k-r)/C(t,s)⌉`.
pub fn construct_m0(alpha: usize, k: usize, t: usize) -> Result<BinaryMatrix> {
    // beta only matters through alpha < beta
    let p = validate_params(alpha, alpha + 1, k, t)?;
    let (s, r) = (p.s, p.r);
    let patterns = binomial(t as u64, s as u64);
    let m0 = if ((k - r) as u128) <= patterns {
        distinct_rows_balanced(alpha, k, t, s, r)?
    } else {
        let patterns = patterns as usize;
        let (u, v) = ((k - r) / patterns, (k - r) % patterns);
        let mut m1_rows = Vec::with_capacity(u * patterns);
        for pat in colex_subsets(t, s) {
            for _ in 0..u {
                m1_rows.push(pat.clone());
            }
        }
        let m1 = BinaryMatrix::from_row_supports(&m1_rows, t)?;
        let per_column = u * binomial(t as u64 - 1, s as u64 - 1) as usize;
        let remaining = alpha.checked_sub(per_column).ok_or_else(|| {
            Error::ConstructionFailed(format!(
                "repeated patterns already put {per_column} > alpha ones in each column"
            ))
        })?;
        if r + v == 0 {
            m1
        } else if v == 0 {
            m1.stack(&round_robin(r, t, s + 1)?)?
        } else {
            m1.stack(&distinct_rows_balanced(remaining, r + v, t, s, r)?)?
        }
    };
    check_m0_properties(&m0, &p)?;
    Ok(m0)
}

/// `rows x t` matrix whose row `i` has ones at `(i*weight + j) mod t`.
fn round_robin(rows: usize, t: usize, weight: usize) -> Result<BinaryMatrix> {
    let supports: Vec<Vec<usize>> = (0..rows)
        .map(|i| (0..weight).map(|j| (i * weight + j) % t).collect())
        .collect();
    BinaryMatrix::from_row_supports(&supports, t)
}

/// `rows x t` matrix with `rows - r` pairwise distinct weight-`s` rows, `r`
/// weight-`(s+1)` rows and every column of weight `col_weight`.
fn distinct_rows_balanced(
    col_weight: usize,
    rows: usize,
    t: usize,
    s: usize,
    r: usize,
) -> Result<BinaryMatrix> {
    let light = rows - r;
    let mut last_err = None;
    for attempt in 0..=BALANCE_RETRIES {
        let supports = if attempt == 0 {
            let mut sup: Vec<Vec<usize>> = colex_subsets(t, s).into_iter().take(light).collect();
            sup.extend((0..r).map(|i| (0..=s).map(|j| (i + j) % t).collect::<Vec<_>>()));
            sup
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(attempt);
            let mut pats = colex_subsets(t, s);
            pats.shuffle(&mut rng);
            let mut sup: Vec<Vec<usize>> = pats.into_iter().take(light).collect();
            let cols: Vec<usize> = (0..t).collect();
            for _ in 0..r {
                let mut pick: Vec<usize> = cols.choose_multiple(&mut rng, s + 1).copied().collect();
                pick.sort_unstable();
                sup.push(pick);
            }
            sup
        };
        let m = BinaryMatrix::from_row_supports(&supports, t)?;
        match balance_columns(&m, col_weight) {
            Ok(b) => return Ok(b),
            Err(e @ Error::BalanceStall { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("at least one attempt ran"))
}

/// Moves ones between columns until each column has weight `alpha`,
/// preserving every row weight and keeping the weight-`s` rows pairwise
/// distinct.
///
/// Rows must all have weight `s` or `s + 1` where `s = ⌊ones / rows⌋`, the
/// weight-`s` rows must be distinct, and the total must be `cols * alpha`.
pub fn balance_columns(m0: &BinaryMatrix, alpha: usize) -> Result<BinaryMatrix> {
    let (k, t) = (m0.rows(), m0.cols());
    let total = m0.ones_count();
    if total != t * alpha {
        return Err(Error::InvalidParams(format!(
            "matrix has {total} ones, balancing to column weight {alpha} needs {}",
            t * alpha
        )));
    }
    let s = total / k;
    let weights: Vec<usize> = (0..k).map(|i| m0.row_weight(i)).collect();
    if weights.iter().any(|&w| w != s && w != s + 1) {
        return Err(Error::InvalidParams(format!(
            "row weights must be {s} or {}",
            s + 1
        )));
    }
    let light: Vec<usize> = (0..k).filter(|&i| weights[i] == s).collect();
    let heavy: Vec<usize> = (0..k).filter(|&i| weights[i] == s + 1).collect();
    let mut seen = std::collections::HashSet::new();
    if !light.iter().all(|&i| seen.insert(m0.row(i).to_vec())) {
        return Err(Error::InvalidParams(
            "minimum-weight rows must be pairwise distinct".into(),
        ));
    }

    let mut m = m0.clone();
    let mut col = m.col_weights();
    loop {
        let Some(j1) = (0..t).find(|&j| col[j] < alpha) else {
            return Ok(m);
        };
        let j2 = (0..t)
            .find(|&j| col[j] > alpha)
            .expect("a deficit column implies a surplus column");

        let heavy_move = heavy
            .iter()
            .copied()
            .find(|&i| !m.get(i, j1) && m.get(i, j2));
        let mover = heavy_move.or_else(|| {
            light.iter().copied().find(|&l| {
                if m.get(l, j1) || !m.get(l, j2) {
                    return false;
                }
                let mut candidate = m.row(l).to_vec();
                candidate[j1] = true;
                candidate[j2] = false;
                !light
                    .iter()
                    .any(|&o| o != l && m.row(o) == candidate.as_slice())
            })
        });
        let Some(i) = mover else {
            return Err(Error::BalanceStall {
                deficit: j1,
                surplus: j2,
            });
        };
        m.set(i, j1, true);
        m.set(i, j2, false);
        col[j1] += 1;
        col[j2] -= 1;
    }
}

fn check_m0_properties(m0: &BinaryMatrix, p: &DesignParams) -> Result<()> {
    let prof = m0.profile();
    let gamma = p.required_gamma();
    if m0.rows() != p.k || m0.cols() != p.t {
        return Err(Error::ConstructionFailed(format!(
            "incidence matrix is {}x{}, expected {}x{}",
            m0.rows(),
            m0.cols(),
            p.k,
            p.t
        )));
    }
    if let Some(j) = (0..p.t).find(|&j| m0.col_weight(j) != p.alpha) {
        return Err(Error::ConstructionFailed(format!(
            "column {j} has weight {} instead of {}",
            m0.col_weight(j),
            p.alpha
        )));
    }
    if prof.w_min != p.s || prof.gamma != gamma {
        return Err(Error::ConstructionFailed(format!(
            "w_min = {}, Γ = {} (expected {} and {gamma})",
            prof.w_min, prof.gamma, p.s
        )));
    }
    Ok(())
}

/// `M0` with each column repeated `beta` times.
pub fn indicator_matrix(m0: &BinaryMatrix, beta: usize) -> BinaryMatrix {
    m0.replicate_columns(beta)
}

/// `δ0 = n - w_min(M0)*beta - k + Γ(M0)` with `n = t*beta`.
pub fn delta0_closed_form(m0: &BinaryMatrix, beta: usize) -> i64 {
    let p = m0.profile();
    let n = (m0.cols() * beta) as i64;
    n - (p.w_min * beta) as i64 - m0.rows() as i64 + p.gamma as i64
}

/// Smallest `δ` in `0..=n-k` with `ξ_M(ℓ + δ) >= ℓ` for all `ℓ` in `1..=k`,
/// by enumerating every column subset of `M`.
pub fn delta0_exhaustive(m: &BinaryMatrix) -> Result<usize> {
    let (k, n) = (m.rows(), m.cols());
    if n > DELTA0_EXHAUSTIVE_MAX_N {
        return Err(Error::TooLarge {
            what: "columns for exhaustive delta0",
            size: n as u128,
            limit: DELTA0_EXHAUSTIVE_MAX_N as u128,
        });
    }
    if k > n {
        return Err(Error::InvalidParams(format!("k = {k} exceeds n = {n}")));
    }
    let xi = min_cover_by_size(&m.col_masks()?);
    (0..=n - k)
        .find(|&d| (1..=k).all(|l| xi[l + d].0 >= l))
        .ok_or_else(|| {
            Error::InvalidParams("no delta in 0..=n-k satisfies the covering condition".into())
        })
}

/// Distance bounds and the distance of the constructed design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct BoundReport {
    pub gdc_bound: usize,
    pub lrc_bound: i64,
    pub singleton: usize,
    pub delta0: i64,
    pub achieved_d: i64,
}

/// Validated combinatorial skeleton of a group decodable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeDesign {
    params: DesignParams,
    supports: Vec<Vec<usize>>,
    incidence: BinaryMatrix,
    indicator: BinaryMatrix,
}

impl CodeDesign {
    /// Full construction: validate, build `M0`, expand to `M`.
    pub fn build(alpha: usize, beta: usize, k: usize, t: usize) -> Result<Self> {
        let params = validate_params(alpha, beta, k, t)?;
        let m0 = construct_m0(alpha, k, t)?;
        Self::from_incidence(params, m0)
    }

    /// Wraps an arbitrary incidence matrix, checking it is `k x t`, has
    /// column weight `alpha` and no empty row.
    pub fn from_incidence(params: DesignParams, m0: BinaryMatrix) -> Result<Self> {
        let p = validate_params(params.alpha, params.beta, params.k, params.t)?;
        if p != params {
            return Err(Error::InvalidParams(format!(
                "derived s, r, n ({}, {}, {}) disagree with the given ({}, {}, {})",
                p.s, p.r, p.n, params.s, params.r, params.n
            )));
        }
        if m0.rows() != p.k || m0.cols() != p.t {
            return Err(Error::DimensionMismatch(format!(
                "incidence matrix is {}x{}, expected {}x{}",
                m0.rows(),
                m0.cols(),
                p.k,
                p.t
            )));
        }
        if let Some(j) = (0..p.t).find(|&j| m0.col_weight(j) != p.alpha) {
            return Err(Error::InvalidParams(format!(
                "bucket {} reads {} information symbols, expected alpha = {}",
                j + 1,
                m0.col_weight(j),
                p.alpha
            )));
        }
        if let Some(i) = (0..p.k).find(|&i| m0.row_weight(i) == 0) {
            return Err(Error::InvalidParams(format!(
                "information symbol {} is not read by any bucket",
                i + 1
            )));
        }
        let supports = (0..p.t).map(|j| m0.col_support(j)).collect();
        let indicator = indicator_matrix(&m0, p.beta);
        Ok(CodeDesign {
            params: p,
            supports,
            incidence: m0,
            indicator,
        })
    }

    pub fn params(&self) -> &DesignParams {
        &self.params
    }

    pub fn alpha(&self) -> usize {
        self.params.alpha
    }

    pub fn beta(&self) -> usize {
        self.params.beta
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn t(&self) -> usize {
        self.params.t
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    /// `S_i`: information indices (0-based, ascending) read by bucket `i`.
    pub fn support(&self, bucket: usize) -> &[usize] {
        &self.supports[bucket]
    }

    pub fn supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    /// `J_i`: code positions (0-based) of bucket `i`.
    pub fn bucket(&self, bucket: usize) -> Range<usize> {
        bucket * self.params.beta..(bucket + 1) * self.params.beta
    }

    pub fn bucket_of(&self, position: usize) -> usize {
        position / self.params.beta
    }

    /// `M0`
    pub fn incidence(&self) -> &BinaryMatrix {
        &self.incidence
    }

    /// `M`
    pub fn indicator(&self) -> &BinaryMatrix {
        &self.indicator
    }

    pub fn delta0(&self) -> i64 {
        delta0_closed_form(&self.incidence, self.params.beta)
    }

    /// `w_min(M0)*beta - Γ(M0) + 1`, the best distance this support allows.
    pub fn achievable_distance(&self) -> usize {
        let prof = self.incidence.profile();
        prof.w_min * self.params.beta + 1 - prof.gamma
    }

    pub fn bound_report(&self) -> BoundReport {
        let p = &self.params;
        BoundReport {
            gdc_bound: p.gdc_bound(),
            lrc_bound: lrc_bound(p.n, p.k, p.alpha, p.beta - p.alpha + 1)
                .expect("validated parameters satisfy the lrc preconditions"),
            singleton: p.singleton(),
            delta0: self.delta0(),
            achieved_d: self.achievable_distance() as i64,
        }
    }
}

/// Calls `visit` once for every `k x t` incidence matrix with column
/// weight `alpha` and no empty row, up to a permutation of the columns
/// (columns are emitted as non-decreasing indices into the colex list of
/// `alpha`-subsets). Row statistics such as `w_min` and `Γ` are invariant
/// under column permutations, so this covers every matrix for them.
/// Returns the number of matrices visited.
pub fn for_each_incidence_up_to_column_order(
    k: usize,
    t: usize,
    alpha: usize,
    mut visit: impl FnMut(&BinaryMatrix),
) -> Result<u64> {
    if k > 64 || alpha > k {
        return Err(Error::InvalidParams(format!(
            "cannot enumerate k={k}, alpha={alpha}"
        )));
    }
    let cols: Vec<u64> = Combinations::new(k, alpha)
        .map(|c| c.iter().fold(0u64, |m, &i| m | 1 << i))
        .collect();
    let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut chosen = Vec::with_capacity(t);
    let mut count = 0;
    #[allow(clippy::too_many_arguments)]
    fn rec(
        cols: &[u64],
        start: usize,
        t: usize,
        alpha: usize,
        k: usize,
        full: u64,
        cover: u64,
        chosen: &mut Vec<usize>,
        count: &mut u64,
        visit: &mut dyn FnMut(&BinaryMatrix),
    ) {
        let left = t - chosen.len();
        let uncovered = (full & !cover).count_ones() as usize;
        if uncovered > left * alpha {
            return;
        }
        if left == 0 {
            let mut m = BinaryMatrix::zeros(k, t);
            for (j, &c) in chosen.iter().enumerate() {
                for i in 0..k {
                    if cols[c] >> i & 1 == 1 {
                        m.set(i, j, true);
                    }
                }
            }
            *count += 1;
            visit(&m);
            return;
        }
        for c in start..cols.len() {
            chosen.push(c);
            rec(
                cols,
                c,
                t,
                alpha,
                k,
                full,
                cover | cols[c],
                chosen,
                count,
                visit,
            );
            chosen.pop();
        }
    }
    rec(
        &cols,
        0,
        t,
        alpha,
        k,
        full,
        0,
        &mut chosen,
        &mut count,
        &mut visit,
    );
    Ok(count)
}
