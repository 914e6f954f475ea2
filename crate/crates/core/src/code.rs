//! Encoding, group decoding, local repair and global decoding.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::codegen::{
    first_deficient_subset, synthesize_generator, verify_distance_exact, verify_gdc, DistanceCheck,
    GdcCheck, GeneratorMatrix, SynthesisConfig, SUBSET_LIMIT,
};
use crate::combinatorics::binomial;
use crate::design::CodeDesign;
use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};
use crate::matrix::{solve_square, FieldMatrix};

/// Largest message space the codeword-enumeration oracle will walk.
pub const ENUMERATION_LIMIT: u64 = 1 << 24;

/// A verified group decodable code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GdcCode {
    design: CodeDesign,
    field: FieldSpec,
    generator: GeneratorMatrix,
    d: usize,
}

impl GdcCode {
    /// Runs the full pipeline: construct the design, pick the smallest
    /// field above `C(n-1, k-1)`, synthesize and verify a generator.
    pub fn build(
        alpha: usize,
        beta: usize,
        k: usize,
        t: usize,
        cfg: &SynthesisConfig,
    ) -> Result<Self> {
        let design = CodeDesign::build(alpha, beta, k, t)?;
        let field = FieldSpec::for_params(design.n(), design.k())?;
        Self::build_with_field(design, field, cfg)
    }

    pub fn build_with_field(
        design: CodeDesign,
        field: FieldSpec,
        cfg: &SynthesisConfig,
    ) -> Result<Self> {
        let generator = synthesize_generator(&design, &field, cfg)?;
        let d = design.achievable_distance();
        Ok(GdcCode {
            design,
            field,
            generator,
            d,
        })
    }

    /// Wraps an existing generator after running both verifiers against
    /// the claimed distance.
    pub fn from_parts(
        design: CodeDesign,
        generator: FieldMatrix,
        claimed_d: usize,
    ) -> Result<Self> {
        let field = generator.field().clone();
        let n = design.n();
        let k = design.k();
        if claimed_d == 0 || claimed_d > n - k + 1 {
            return Err(Error::VerificationFailed(format!(
                "claimed distance {claimed_d} outside 1..={}",
                n - k + 1
            )));
        }
        let delta = (n - k + 1 - claimed_d) as i64;
        let generator = GeneratorMatrix::new(generator, design.indicator().clone(), delta)?;
        match verify_gdc(&generator, &design)? {
            GdcCheck::Pass => {}
            GdcCheck::SupportViolation { row, col } => {
                return Err(Error::VerificationFailed(format!(
                    "entry ({}, {}) lies outside the support",
                    row + 1,
                    col + 1
                )))
            }
            GdcCheck::BucketRankDeficient { bucket, columns } => {
                return Err(Error::VerificationFailed(format!(
                    "bucket {} columns {:?} are not full rank",
                    bucket + 1,
                    one_based(&columns)
                )))
            }
        }
        match verify_distance_exact(&generator, claimed_d)? {
            DistanceCheck::Confirmed => {}
            DistanceCheck::BelowClaim { columns } => {
                return Err(Error::VerificationFailed(format!(
                    "columns {:?} have rank below k, distance is less than {claimed_d}",
                    one_based(&columns)
                )))
            }
            DistanceCheck::AboveClaim => {
                return Err(Error::VerificationFailed(format!(
                    "distance exceeds the claimed {claimed_d}"
                )))
            }
        }
        Ok(GdcCode {
            design,
            field,
            generator,
            d: claimed_d,
        })
    }

    pub fn design(&self) -> &CodeDesign {
        &self.design
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    /// Verified minimum distance.
    pub fn distance(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.design.n()
    }

    pub fn k(&self) -> usize {
        self.design.k()
    }

    fn g(&self) -> &FieldMatrix {
        self.generator.matrix()
    }

    fn check_message(&self, x: &[FieldElement]) -> Result<()> {
        if x.len() != self.k() {
            return Err(Error::DimensionMismatch(format!(
                "message has {} symbols, code dimension is {}",
                x.len(),
                self.k()
            )));
        }
        if let Some(bad) = x.iter().find(|e| !self.field.contains(**e)) {
            return Err(Error::ElementOutOfRange {
                value: bad.value() as u64,
                m: self.field.degree(),
            });
        }
        Ok(())
    }

    /// `x · G`, split into buckets.
    pub fn encode(&self, x: &[FieldElement]) -> Result<Codeword> {
        self.check_message(x)?;
        Ok(Codeword {
            symbols: self.g().left_mul(x)?,
            beta: self.design.beta(),
        })
    }

    /// Recovers `ψ_{S_i}(x)` from at least `alpha` symbols of bucket `i`.
    /// Uses the `alpha` lowest positions supplied.
    pub fn group_decode(
        &self,
        bucket: usize,
        have: &BTreeMap<usize, FieldElement>,
    ) -> Result<Vec<FieldElement>> {
        if bucket >= self.design.t() {
            return Err(Error::IndexOutOfRange {
                index: bucket,
                bound: self.design.t(),
            });
        }
        let span = self.design.bucket(bucket);
        if let Some(&p) = have.keys().find(|p| !span.contains(p)) {
            return Err(Error::WrongBucket {
                position: p,
                bucket,
            });
        }
        let alpha = self.design.alpha();
        if have.len() < alpha {
            return Err(Error::InsufficientSymbols {
                have: have.len(),
                need: alpha,
            });
        }
        let rows = self.design.support(bucket);
        let used: Vec<(usize, FieldElement)> =
            have.iter().take(alpha).map(|(&p, &v)| (p, v)).collect();
        // Equation for column p: sum over l in S_i of y_l * G[l][p] = c_p
        let mut a = Vec::with_capacity(alpha * alpha);
        for &(p, _) in &used {
            a.extend(rows.iter().map(|&l| self.g().get(l, p)));
        }
        let b: Vec<FieldElement> = used.iter().map(|&(_, v)| v).collect();
        solve_square(&self.field, &a, &b)
    }

    /// Rebuilds the symbol at `position` from `alpha` other symbols of its bucket.
    pub fn repair_symbol(
        &self,
        position: usize,
        helpers: &BTreeMap<usize, FieldElement>,
    ) -> Result<FieldElement> {
        if position >= self.n() {
            return Err(Error::IndexOutOfRange {
                index: position,
                bound: self.n(),
            });
        }
        let bucket = self.design.bucket_of(position);
        if helpers.contains_key(&position) {
            return Err(Error::InvalidParams(format!(
                "position {} cannot help repair itself",
                position + 1
            )));
        }
        let y = self.group_decode(bucket, helpers)?;
        let f = &self.field;
        Ok(self
            .design
            .support(bucket)
            .iter()
            .zip(&y)
            .fold(FieldElement::ZERO, |acc, (&l, &yl)| {
                f.add(acc, f.mul(yl, self.g().get(l, position)))
            }))
    }

    /// Recovers the message from any set of symbols whose generator
    /// columns have rank `k`.
    pub fn decode_global(&self, have: &BTreeMap<usize, FieldElement>) -> Result<Vec<FieldElement>> {
        if let Some(&p) = have.keys().find(|&&p| p >= self.n()) {
            return Err(Error::IndexOutOfRange {
                index: p,
                bound: self.n(),
            });
        }
        let positions: Vec<usize> = have.keys().copied().collect();
        let chosen = self.independent_columns(&positions);
        let k = self.k();
        if chosen.len() < k {
            return Err(Error::RankDeficient {
                rank: chosen.len(),
                k,
            });
        }
        // x · G_J = c_J  <=>  G_J^T x^T = c_J^T
        let mut a = Vec::with_capacity(k * k);
        for &p in &chosen {
            a.extend((0..k).map(|l| self.g().get(l, p)));
        }
        let b: Vec<FieldElement> = chosen.iter().map(|p| have[p]).collect();
        solve_square(&self.field, &a, &b)
    }

    /// Fills in every missing position: local repair where the bucket has
    /// `alpha` known symbols, one global decode for the rest.
    pub fn fill_erasures(&self, have: &BTreeMap<usize, FieldElement>) -> Result<Vec<FieldElement>> {
        let mut out = Vec::with_capacity(self.n());
        let mut global: Option<Codeword> = None;
        for p in 0..self.n() {
            if let Some(&v) = have.get(&p) {
                out.push(v);
                continue;
            }
            let b = self.design.bucket_of(p);
            let helpers: BTreeMap<usize, FieldElement> = self
                .design
                .bucket(b)
                .filter_map(|q| have.get(&q).map(|&v| (q, v)))
                .take(self.design.alpha())
                .collect();
            if helpers.len() == self.design.alpha() {
                out.push(self.repair_symbol(p, &helpers)?);
                continue;
            }
            if global.is_none() {
                global = Some(self.encode(&self.decode_global(have)?)?);
            }
            out.push(global.as_ref().expect("set above").symbols()[p]);
        }
        Ok(out)
    }

    /// Greedy maximal independent subset of the given columns, scanned in
    /// ascending order.
    pub fn independent_columns(&self, positions: &[usize]) -> Vec<usize> {
        let k = self.k();
        let f = &self.field;
        let mut sorted = positions.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut chosen = Vec::new();
        // reduced basis vectors, each scaled to 1 at its pivot row
        let mut basis: Vec<(usize, Vec<FieldElement>)> = Vec::with_capacity(k);
        for p in sorted {
            if chosen.len() == k {
                break;
            }
            let mut v: Vec<FieldElement> = (0..k).map(|l| self.g().get(l, p)).collect();
            for (pivot, b) in &basis {
                let c = v[*pivot];
                if !c.is_zero() {
                    for (x, &y) in v.iter_mut().zip(b) {
                        *x = f.sub(*x, f.mul(c, y));
                    }
                }
            }
            if let Some(pivot) = v.iter().position(|x| !x.is_zero()) {
                let inv = f.inv(v[pivot]).expect("nonzero");
                v.iter_mut().for_each(|x| *x = f.mul(*x, inv));
                basis.push((pivot, v));
                chosen.push(p);
            }
        }
        chosen
    }

    /// Minimum Hamming weight over nonzero codewords.
    pub fn min_distance(&self, method: DistanceMethod) -> Result<usize> {
        match method {
            DistanceMethod::RankSubsets => min_distance_by_rank(self.g()),
            DistanceMethod::EnumerateCodewords => min_distance_by_enumeration(self.g()),
        }
    }
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

/// `d = n - k + 1 - δ*`, where `δ*` is the least `δ` for which every
/// `k + δ` columns have rank `k`.
fn min_distance_by_rank(g: &FieldMatrix) -> Result<usize> {
    let (k, n) = (g.rows(), g.cols());
    if g.rank() < k {
        return Err(Error::RankDeficient { rank: g.rank(), k });
    }
    for size in k..=n {
        let count = binomial(n as u64, size as u64);
        if count > SUBSET_LIMIT {
            return Err(Error::TooLarge {
                what: "column subsets for rank distance",
                size: count,
                limit: SUBSET_LIMIT,
            });
        }
        if first_deficient_subset(g, size).is_none() {
            return Ok(n - size + 1);
        }
    }
    unreachable!("the full column set has rank k")
}

/// Walks every nonzero message in lexicographic order.
fn min_distance_by_enumeration(g: &FieldMatrix) -> Result<usize> {
    let f = g.field();
    let (k, n) = (g.rows(), g.cols());
    let space = (f.order() as u128)
        .checked_pow(k as u32)
        .unwrap_or(u128::MAX);
    if space > ENUMERATION_LIMIT as u128 {
        return Err(Error::TooLarge {
            what: "messages for codeword enumeration",
            size: space,
            limit: ENUMERATION_LIMIT as u128,
        });
    }
    let q = f.order() as u32;
    let mut x = vec![0u32; k];
    let mut best = usize::MAX;
    let mut cw = vec![FieldElement::ZERO; n];
    loop {
        // increment x as a base-q counter, most significant digit first
        let mut i = k;
        loop {
            if i == 0 {
                return if best == usize::MAX {
                    Err(Error::RankDeficient { rank: 0, k })
                } else {
                    Ok(best)
                };
            }
            i -= 1;
            x[i] += 1;
            if x[i] < q {
                break;
            }
            x[i] = 0;
        }
        cw.iter_mut().for_each(|c| *c = FieldElement::ZERO);
        for (l, &xl) in x.iter().enumerate() {
            if xl == 0 {
                continue;
            }
            let xl = f.element(xl as u64)?;
            for (j, c) in cw.iter_mut().enumerate() {
                *c = f.add(*c, f.mul(xl, g.get(l, j)));
            }
        }
        let w = cw.iter().filter(|c| !c.is_zero()).count();
        if w == 0 {
            // nonzero message mapping to zero: generator not full rank
            return Err(Error::RankDeficient { rank: g.rank(), k });
        }
        best = best.min(w);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    RankSubsets,
    EnumerateCodewords,
}

/// `ψ_S(x)`: the coordinates of `x` indexed by `s`, in ascending order.
pub fn project(s: &[usize], x: &[FieldElement]) -> Result<Vec<FieldElement>> {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    sorted
        .iter()
        .map(|&i| {
            x.get(i).copied().ok_or(Error::IndexOutOfRange {
                index: i,
                bound: x.len(),
            })
        })
        .collect()
}

/// `n` code symbols, `beta` per bucket.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    symbols: Vec<FieldElement>,
    beta: usize,
}

impl Codeword {
    pub fn new(symbols: Vec<FieldElement>, beta: usize) -> Result<Self> {
        if beta == 0 || !symbols.len().is_multiple_of(beta) {
            return Err(Error::DimensionMismatch(format!(
                "{} symbols do not split into buckets of {beta}",
                symbols.len()
            )));
        }
        Ok(Codeword { symbols, beta })
    }

    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn beta(&self) -> usize {
        self.beta
    }

    pub fn bucket(&self, i: usize) -> &[FieldElement] {
        &self.symbols[i * self.beta..(i + 1) * self.beta]
    }

    pub fn buckets(&self) -> impl Iterator<Item = &[FieldElement]> {
        self.symbols.chunks(self.beta)
    }

    /// The surviving symbols after erasing `pattern`.
    pub fn survivors(&self, pattern: &ErasurePattern) -> BTreeMap<usize, FieldElement> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(p, _)| !pattern.contains(*p))
            .map(|(p, &v)| (p, v))
            .collect()
    }

    pub fn restrict(&self, positions: &[usize]) -> BTreeMap<usize, FieldElement> {
        positions.iter().map(|&p| (p, self.symbols[p])).collect()
    }
}

/// Set of erased code positions (0-based).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ErasurePattern {
    erased: BTreeSet<usize>,
}

impl ErasurePattern {
    pub fn new(erased: impl IntoIterator<Item = usize>, n: usize) -> Result<Self> {
        let erased: BTreeSet<usize> = erased.into_iter().collect();
        if let Some(&p) = erased.iter().find(|&&p| p >= n) {
            return Err(Error::IndexOutOfRange { index: p, bound: n });
        }
        Ok(ErasurePattern { erased })
    }

    pub fn contains(&self, p: usize) -> bool {
        self.erased.contains(&p)
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.erased.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.erased.len()
    }

    pub fn is_empty(&self) -> bool {
        self.erased.is_empty()
    }
}
