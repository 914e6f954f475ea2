//! Batch storage simulation: one symbol per node, erase some nodes,
//! rebuild them and count the traffic.
//!
//! Repair is local first. An erased symbol whose bucket still holds at
//! least `alpha` of its original symbols is rebuilt from the `alpha`
//! lowest surviving positions of that bucket. Everything else falls back
//! to one global decode over all original survivors, which transfers `k`
//! symbols once and serves every remaining erased position.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::code::{Codeword, ErasurePattern, GdcCode};
use crate::error::{Error, Result};
use crate::galois::FieldElement;

#[derive(Debug, Clone)]
pub struct Layout {
    code: GdcCode,
    node_of: Vec<usize>,
}

impl Layout {
    pub fn code(&self) -> &GdcCode {
        &self.code
    }

    /// Node holding code position `p`.
    pub fn node_of(&self, p: usize) -> usize {
        self.node_of[p]
    }

    pub fn node_count(&self) -> usize {
        self.node_of.len()
    }

    /// Nodes grouped by bucket.
    pub fn bucket_nodes(&self) -> Vec<Vec<usize>> {
        let d = self.code.design();
        (0..d.t())
            .map(|b| d.bucket(b).map(|p| self.node_of[p]).collect())
            .collect()
    }
}

/// Node `j` stores symbol `j`.
pub fn build_layout(code: &GdcCode) -> Layout {
    Layout {
        node_of: (0..code.n()).collect(),
        code: code.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RepairPath {
    Local,
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairRecord {
    pub position: usize,
    pub path: RepairPath,
    pub helpers: Vec<usize>,
}

/// Outcome of one erasure pattern. Positions are 0-based in memory and
/// 1-based once serialized.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RepairStats {
    pub erased: Vec<usize>,
    pub repairs: Vec<RepairRecord>,
    pub symbols_transferred: usize,
    pub unrecoverable: Vec<usize>,
}

impl RepairStats {
    pub fn repaired(&self) -> usize {
        self.repairs.len()
    }

    pub fn local_repairs(&self) -> usize {
        self.repairs
            .iter()
            .filter(|r| r.path == RepairPath::Local)
            .count()
    }

    pub fn global_repairs(&self) -> usize {
        self.repairs
            .iter()
            .filter(|r| r.path == RepairPath::Global)
            .count()
    }

    pub fn helpers_contacted(&self) -> Vec<usize> {
        self.repairs.iter().map(|r| r.helpers.len()).collect()
    }

    pub fn fully_recovered(&self) -> bool {
        self.unrecoverable.is_empty()
    }
}

#[derive(Serialize, Deserialize)]
struct RecordRepr {
    position: usize,
    path: RepairPath,
    helpers: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct StatsRepr {
    erased: Vec<usize>,
    repaired: usize,
    local_repairs: usize,
    global_repairs: usize,
    helpers_contacted: Vec<usize>,
    symbols_transferred: usize,
    unrecoverable: Vec<usize>,
    repairs: Vec<RecordRepr>,
}

fn plus_one(v: &[usize]) -> Vec<usize> {
    v.iter().map(|p| p + 1).collect()
}

fn minus_one(v: Vec<usize>) -> std::result::Result<Vec<usize>, String> {
    v.into_iter()
        .map(|p| {
            p.checked_sub(1)
                .ok_or_else(|| "positions are 1-based".to_string())
        })
        .collect()
}

impl Serialize for RepairStats {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        StatsRepr {
            erased: plus_one(&self.erased),
            repaired: self.repaired(),
            local_repairs: self.local_repairs(),
            global_repairs: self.global_repairs(),
            helpers_contacted: self.helpers_contacted(),
            symbols_transferred: self.symbols_transferred,
            unrecoverable: plus_one(&self.unrecoverable),
            repairs: self
                .repairs
                .iter()
                .map(|r| RecordRepr {
                    position: r.position + 1,
                    path: r.path,
                    helpers: plus_one(&r.helpers),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RepairStats {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StatsRepr::deserialize(d)?;
        let repairs = r
            .repairs
            .into_iter()
            .map(|x| {
                Ok(RepairRecord {
                    position: x.position.checked_sub(1).ok_or("positions are 1-based")?,
                    path: x.path,
                    helpers: minus_one(x.helpers)?,
                })
            })
            .collect::<std::result::Result<Vec<_>, String>>()
            .map_err(D::Error::custom)?;
        Ok(RepairStats {
            erased: minus_one(r.erased).map_err(D::Error::custom)?,
            repairs,
            symbols_transferred: r.symbols_transferred,
            unrecoverable: minus_one(r.unrecoverable).map_err(D::Error::custom)?,
        })
    }
}

/// Deterministic message used when the caller supplies no data.
pub fn sample_message(code: &GdcCode, seed: u64) -> Vec<FieldElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = code.field();
    (0..code.k())
        .map(|_| f.element(rng.gen_range(0..f.order())).expect("in range"))
        .collect()
}

/// Runs a pattern against the codeword of [`sample_message`] with seed 0.
pub fn inject_and_repair(layout: &Layout, pattern: &ErasurePattern) -> Result<RepairStats> {
    let cw = layout.code.encode(&sample_message(&layout.code, 0))?;
    inject_and_repair_codeword(layout, &cw, pattern).map(|(stats, _)| stats)
}

/// Erases `pattern` from `codeword`, repairs what it can and checks each
/// rebuilt symbol against the original. Returns the stats and the
/// rebuilt symbols.
pub fn inject_and_repair_codeword(
    layout: &Layout,
    codeword: &Codeword,
    pattern: &ErasurePattern,
) -> Result<(RepairStats, BTreeMap<usize, FieldElement>)> {
    let code = &layout.code;
    let design = code.design();
    if codeword.len() != code.n() {
        return Err(Error::DimensionMismatch(format!(
            "codeword has {} symbols, code length is {}",
            codeword.len(),
            code.n()
        )));
    }
    if let Some(p) = pattern.positions().find(|&p| p >= code.n()) {
        return Err(Error::IndexOutOfRange {
            index: p,
            bound: code.n(),
        });
    }
    let survivors = codeword.survivors(pattern);
    let mut stats = RepairStats {
        erased: pattern.positions().collect(),
        ..RepairStats::default()
    };
    let mut rebuilt = BTreeMap::new();
    let mut pending = Vec::new();

    for p in pattern.positions() {
        let b = design.bucket_of(p);
        let helpers: BTreeMap<usize, FieldElement> = design
            .bucket(b)
            .filter(|q| survivors.contains_key(q))
            .take(design.alpha())
            .map(|q| (q, survivors[&q]))
            .collect();
        if helpers.len() < design.alpha() {
            pending.push(p);
            continue;
        }
        let v = code.repair_symbol(p, &helpers)?;
        check_rebuilt(codeword, p, v)?;
        rebuilt.insert(p, v);
        stats.symbols_transferred += helpers.len();
        stats.repairs.push(RepairRecord {
            position: p,
            path: RepairPath::Local,
            helpers: helpers.into_keys().collect(),
        });
    }

    if !pending.is_empty() {
        let all: Vec<usize> = survivors.keys().copied().collect();
        let chosen = code.independent_columns(&all);
        if chosen.len() < code.k() {
            stats.unrecoverable = pending;
        } else {
            let have = codeword.restrict(&chosen);
            let x = code.decode_global(&have)?;
            let full = code.encode(&x)?;
            stats.symbols_transferred += chosen.len();
            for p in pending {
                let v = full.symbols()[p];
                check_rebuilt(codeword, p, v)?;
                rebuilt.insert(p, v);
                stats.repairs.push(RepairRecord {
                    position: p,
                    path: RepairPath::Global,
                    helpers: chosen.clone(),
                });
            }
            stats.repairs.sort_by_key(|r| r.position);
        }
    }
    Ok((stats, rebuilt))
}

fn check_rebuilt(codeword: &Codeword, p: usize, v: FieldElement) -> Result<()> {
    if codeword.symbols()[p] != v {
        return Err(Error::VerificationFailed(format!(
            "position {} rebuilt as {:x}, stored value was {:x}",
            p + 1,
            v,
            codeword.symbols()[p]
        )));
    }
    Ok(())
}

/// One independent read path for an information symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadOption {
    /// 1-based bucket index once serialized; 0-based here.
    pub bucket: usize,
    pub symbols_needed: usize,
}

/// Buckets from which `x_j` can be read by group decoding.
pub fn hot_read_options(layout: &Layout, j: usize) -> Result<Vec<ReadOption>> {
    let design = layout.code.design();
    if j >= design.k() {
        return Err(Error::IndexOutOfRange {
            index: j,
            bound: design.k(),
        });
    }
    Ok((0..design.t())
        .filter(|&b| design.support(b).contains(&j))
        .map(|bucket| ReadOption {
            bucket,
            symbols_needed: design.alpha(),
        })
        .collect())
}

/// A scenario file: a code artifact and the erasure patterns to replay.
/// Patterns hold 1-based positions, as written on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub code: String,
    pub patterns: Vec<Vec<usize>>,
    #[serde(default)]
    pub message_seed: u64,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Runs every pattern against the given code.
    pub fn run(&self, code: &GdcCode) -> Result<Vec<RepairStats>> {
        let layout = build_layout(code);
        let cw = code.encode(&sample_message(code, self.message_seed))?;
        self.patterns
            .iter()
            .map(|pat| {
                let zero_based = pat
                    .iter()
                    .map(|&p| {
                        p.checked_sub(1)
                            .ok_or_else(|| Error::Parse("positions are 1-based".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let pattern = ErasurePattern::new(zero_based, code.n())?;
                inject_and_repair_codeword(&layout, &cw, &pattern).map(|(s, _)| s)
            })
            .collect()
    }
}
