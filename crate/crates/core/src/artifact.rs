//! On-disk formats. Every entry point here takes untrusted text.
//!
//! Positions and indices are 1-based on disk and 0-based in memory.
//! Field elements are lowercase hex, zero-padded to the field's width.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::code::{ErasurePattern, GdcCode};
use crate::design::{validate_params, CodeDesign, DesignParams};
use crate::error::{Error, Result};
use crate::galois::{FieldElement, FieldSpec};
use crate::matrix::{BinaryMatrix, FieldMatrix};

pub const ARTIFACT_VERSION: u32 = 1;

/// Parses one row such as `"0110"`.
pub fn parse_bitstring(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Parse(format!("bitstring contains {other:?}"))),
        })
        .collect()
}

pub fn parse_binary_matrix(rows: &[String]) -> Result<BinaryMatrix> {
    let parsed = rows
        .iter()
        .map(|r| parse_bitstring(r))
        .collect::<Result<Vec<_>>>()?;
    BinaryMatrix::from_rows(&parsed)
}

pub fn binary_matrix_rows(m: &BinaryMatrix) -> Vec<String> {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect()
        })
        .collect()
}

pub fn format_symbol(field: &FieldSpec, e: FieldElement) -> String {
    format!("{:0w$x}", e, w = field.hex_width())
}

pub fn parse_symbol(field: &FieldSpec, s: &str) -> Result<FieldElement> {
    let digits = s
        .strip_prefix("0x")
        .or_else(|| s.strip_prefix("0X"))
        .unwrap_or(s);
    if digits.is_empty() || digits.len() > 16 {
        return Err(Error::Parse(format!("{s:?} is not a hex symbol")));
    }
    let v = u64::from_str_radix(digits, 16).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    field.element(v)
}

/// Whitespace- or comma-separated hex symbols.
pub fn parse_symbol_stream(field: &FieldSpec, text: &str) -> Result<Vec<FieldElement>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| parse_symbol(field, t))
        .collect()
}

pub fn format_symbol_stream(field: &FieldSpec, xs: &[FieldElement]) -> String {
    xs.iter()
        .map(|&x| format_symbol(field, x))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Bytes per symbol in raw mode.
pub fn symbol_bytes(field: &FieldSpec) -> Result<usize> {
    match field.degree() {
        8 => Ok(1),
        16 => Ok(2),
        m => Err(Error::InvalidParams(format!(
            "raw byte streams need GF(2^8) or GF(2^16), this code uses GF(2^{m})"
        ))),
    }
}

/// Whole-byte symbols: one byte for m = 8, two big-endian bytes for m = 16.
pub fn bytes_to_symbols(field: &FieldSpec, bytes: &[u8]) -> Result<Vec<FieldElement>> {
    let w = symbol_bytes(field)?;
    if !bytes.len().is_multiple_of(w) {
        return Err(Error::Parse(format!(
            "{} bytes do not form whole {w}-byte symbols",
            bytes.len()
        )));
    }
    bytes
        .chunks(w)
        .map(|c| field.element(c.iter().fold(0u64, |acc, &b| (acc << 8) | b as u64)))
        .collect()
}

pub fn symbols_to_bytes(field: &FieldSpec, xs: &[FieldElement]) -> Result<Vec<u8>> {
    let w = symbol_bytes(field)?;
    let mut out = Vec::with_capacity(xs.len() * w);
    for x in xs {
        let v = x.value();
        if w == 2 {
            out.push((v >> 8) as u8);
        }
        out.push(v as u8);
    }
    Ok(out)
}

/// JSON array of 1-based positions.
pub fn parse_erasures(text: &str, n: usize) -> Result<ErasurePattern> {
    let raw: Vec<usize> = serde_json::from_str(text)?;
    erasures_from_one_based(&raw, n)
}

pub fn erasures_from_one_based(raw: &[usize], n: usize) -> Result<ErasurePattern> {
    let zero = raw
        .iter()
        .map(|&p| {
            p.checked_sub(1)
                .ok_or_else(|| Error::Parse("positions are 1-based".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    ErasurePattern::new(zero, n)
}

pub fn format_erasures(p: &ErasurePattern) -> String {
    let v: Vec<usize> = p.positions().map(|x| x + 1).collect();
    serde_json::to_string(&v).expect("integers serialize")
}

/// On-disk form of a [`CodeDesign`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub alpha: usize,
    pub beta: usize,
    pub k: usize,
    pub t: usize,
    pub s: usize,
    pub r: usize,
    pub n: usize,
    #[serde(rename = "S")]
    pub supports: Vec<Vec<usize>>,
    #[serde(rename = "M0")]
    pub m0: Vec<String>,
}

impl DesignFile {
    pub fn from_design(d: &CodeDesign) -> Self {
        let p = d.params();
        DesignFile {
            alpha: p.alpha,
            beta: p.beta,
            k: p.k,
            t: p.t,
            s: p.s,
            r: p.r,
            n: p.n,
            supports: d
                .supports()
                .iter()
                .map(|s| s.iter().map(|i| i + 1).collect())
                .collect(),
            m0: binary_matrix_rows(d.incidence()),
        }
    }

    /// Validates the parameters, `M0`, and that `S` agrees with `M0`.
    pub fn to_design(&self) -> Result<CodeDesign> {
        let params = DesignParams {
            alpha: self.alpha,
            beta: self.beta,
            k: self.k,
            t: self.t,
            s: self.s,
            r: self.r,
            n: self.n,
        };
        validate_params(self.alpha, self.beta, self.k, self.t)?;
        let m0 = parse_binary_matrix(&self.m0)?;
        let design = CodeDesign::from_incidence(params, m0)?;
        let expected: Vec<Vec<usize>> = design
            .supports()
            .iter()
            .map(|s| s.iter().map(|i| i + 1).collect())
            .collect();
        if expected != self.supports {
            return Err(Error::Parse(format!(
                "S = {:?} does not match the columns of M0, which give {:?}",
                self.supports, expected
            )));
        }
        Ok(design)
    }
}

pub fn parse_design(text: &str) -> Result<CodeDesign> {
    serde_json::from_str::<DesignFile>(text)?.to_design()
}

pub fn design_to_json(d: &CodeDesign) -> String {
    to_pretty(&DesignFile::from_design(d))
}

fn to_pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("in-memory values serialize");
    s.push('\n');
    s
}

/// A stored code: design, field, generator and the claimed distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeArtifactFile {
    pub version: u32,
    pub design: DesignFile,
    pub field: FieldSpec,
    #[serde(rename = "G")]
    pub g: Vec<Vec<String>>,
    pub claimed_d: usize,
    pub seed: u64,
}

impl CodeArtifactFile {
    pub fn from_code(code: &GdcCode, seed: u64) -> Self {
        let f = code.field();
        CodeArtifactFile {
            version: ARTIFACT_VERSION,
            design: DesignFile::from_design(code.design()),
            field: f.clone(),
            g: code
                .generator()
                .matrix()
                .to_rows()
                .iter()
                .map(|row| row.iter().map(|&e| format_symbol(f, e)).collect())
                .collect(),
            claimed_d: code.distance(),
            seed,
        }
    }

    /// Syntax only; nothing is verified.
    pub fn parse(text: &str) -> Result<Self> {
        let a: CodeArtifactFile = serde_json::from_str(text)?;
        if a.version != ARTIFACT_VERSION {
            return Err(Error::Parse(format!(
                "artifact version {} is not supported (expected {ARTIFACT_VERSION})",
                a.version
            )));
        }
        Ok(a)
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    pub fn generator(&self) -> Result<FieldMatrix> {
        let rows = self
            .g
            .iter()
            .map(|row| row.iter().map(|s| parse_symbol(&self.field, s)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let g = FieldMatrix::from_rows(self.field.clone(), rows)?;
        if g.rows() != self.design.k || g.cols() != self.design.n {
            return Err(Error::DimensionMismatch(format!(
                "G is {}x{}, design needs {}x{}",
                g.rows(),
                g.cols(),
                self.design.k,
                self.design.n
            )));
        }
        Ok(g)
    }

    /// Rebuilds and verifies the code. Any failed check rejects the file.
    pub fn load(&self) -> Result<GdcCode> {
        let design = self.design.to_design()?;
        let g = self.generator()?;
        GdcCode::from_parts(design, g, self.claimed_d)
    }
}

/// Parses and fully verifies an artifact.
pub fn load_artifact(text: &str) -> Result<GdcCode> {
    CodeArtifactFile::parse(text)?.load()
}

/// Codeword on disk: symbols grouped by bucket, `null` for erased.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodewordFile {
    pub buckets: Vec<Vec<Option<String>>>,
}

impl CodewordFile {
    pub fn from_symbols(field: &FieldSpec, beta: usize, symbols: &[Option<FieldElement>]) -> Self {
        CodewordFile {
            buckets: symbols
                .chunks(beta)
                .map(|b| {
                    b.iter()
                        .map(|s| s.map(|e| format_symbol(field, e)))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        to_pretty(self)
    }

    /// Known symbols keyed by 0-based position, checked against the
    /// code's bucket shape.
    pub fn to_map(&self, code: &GdcCode) -> Result<BTreeMap<usize, FieldElement>> {
        let d = code.design();
        if self.buckets.len() != d.t() {
            return Err(Error::DimensionMismatch(format!(
                "{} buckets given, code has {}",
                self.buckets.len(),
                d.t()
            )));
        }
        let mut out = BTreeMap::new();
        for (b, bucket) in self.buckets.iter().enumerate() {
            if bucket.len() != d.beta() {
                return Err(Error::DimensionMismatch(format!(
                    "bucket {} holds {} symbols, expected {}",
                    b + 1,
                    bucket.len(),
                    d.beta()
                )));
            }
            for (j, s) in bucket.iter().enumerate() {
                if let Some(s) = s {
                    out.insert(b * d.beta() + j, parse_symbol(code.field(), s)?);
                }
            }
        }
        Ok(out)
    }
}

pub fn parse_codeword(text: &str, code: &GdcCode) -> Result<BTreeMap<usize, FieldElement>> {
    serde_json::from_str::<CodewordFile>(text)?.to_map(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::SynthesisConfig;

    fn small() -> GdcCode {
        GdcCode::build(2, 3, 3, 2, &SynthesisConfig::default()).unwrap()
    }

    #[test]
    fn bitstrings() {
        assert_eq!(parse_bitstring("0110").unwrap(), vec![0, 1, 1, 0]);
        assert!(parse_bitstring("01a").is_err());
        let m = parse_binary_matrix(&["10".into(), "01".into()]).unwrap();
        assert_eq!(binary_matrix_rows(&m), vec!["10", "01"]);
        assert!(parse_binary_matrix(&["10".into(), "1".into()]).is_err());
        assert!(parse_binary_matrix(&[]).is_err());
    }

    #[test]
    fn symbols() {
        let f = FieldSpec::canonical(13).unwrap();
        assert_eq!(format_symbol(&f, f.element(0x1a).unwrap()), "001a");
        assert_eq!(parse_symbol(&f, "0x1A").unwrap().value(), 0x1a);
        assert!(parse_symbol(&f, "2000").is_err());
        assert!(parse_symbol(&f, "").is_err());
        assert!(parse_symbol(&f, "-1").is_err());
        let xs = parse_symbol_stream(&f, "1 2,\n 1fff").unwrap();
        assert_eq!(format_symbol_stream(&f, &xs), "0001 0002 1fff");
    }

    #[test]
    fn raw_bytes() {
        let f8 = FieldSpec::canonical(8).unwrap();
        let xs = bytes_to_symbols(&f8, &[0, 255, 7]).unwrap();
        assert_eq!(symbols_to_bytes(&f8, &xs).unwrap(), vec![0, 255, 7]);
        let f16 = FieldSpec::canonical(16).unwrap();
        let xs = bytes_to_symbols(&f16, &[1, 2, 3, 4]).unwrap();
        assert_eq!(xs[0].value(), 0x0102);
        assert_eq!(symbols_to_bytes(&f16, &xs).unwrap(), vec![1, 2, 3, 4]);
        assert!(bytes_to_symbols(&f16, &[1]).is_err());
        assert!(bytes_to_symbols(&FieldSpec::canonical(13).unwrap(), &[1, 2]).is_err());
    }

    #[test]
    fn erasures() {
        let p = parse_erasures("[3, 1]", 6).unwrap();
        assert_eq!(p.positions().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(format_erasures(&p), "[1,3]");
        assert!(parse_erasures("[0]", 6).is_err());
        assert!(parse_erasures("[7]", 6).is_err());
        assert!(parse_erasures("{}", 6).is_err());
    }

    #[test]
    fn design_round_trip() {
        let d = CodeDesign::build(4, 6, 6, 3).unwrap();
        let js = design_to_json(&d);
        let v: serde_json::Value = serde_json::from_str(&js).unwrap();
        assert_eq!(
            v["S"],
            serde_json::json!([[1, 2, 3, 4], [1, 2, 5, 6], [3, 4, 5, 6]])
        );
        assert_eq!(parse_design(&js).unwrap(), d);
    }

    #[test]
    fn design_rejects_mismatched_support() {
        let d = CodeDesign::build(2, 3, 3, 2).unwrap();
        let mut f = DesignFile::from_design(&d);
        f.supports.swap(0, 1);
        assert!(f.to_design().is_err());
        let mut f = DesignFile::from_design(&d);
        f.n = 7;
        assert!(f.to_design().is_err());
    }

    #[test]
    fn artifact_round_trip_is_byte_identical() {
        let c = small();
        let a = CodeArtifactFile::from_code(&c, 0);
        let text = a.to_json();
        let back = CodeArtifactFile::parse(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let loaded = load_artifact(&text).unwrap();
        assert_eq!(loaded.generator().matrix(), c.generator().matrix());
        assert_eq!(loaded.distance(), 3);
    }

    #[test]
    fn artifact_rejects_tampering() {
        let c = small();
        let mut a = CodeArtifactFile::from_code(&c, 0);
        a.claimed_d = 4;
        assert!(a.load().is_err());
        let mut a = CodeArtifactFile::from_code(&c, 0);
        // put a nonzero entry where the support forbids it
        let (i, j) = (0..c.k())
            .flat_map(|i| (0..c.n()).map(move |j| (i, j)))
            .find(|&(i, j)| !c.design().indicator().get(i, j))
            .unwrap();
        a.g[i][j] = "1".into();
        assert!(a.load().is_err());
        let mut a = CodeArtifactFile::from_code(&c, 0);
        a.version = 9;
        assert!(CodeArtifactFile::parse(&a.to_json()).is_err());
        assert!(CodeArtifactFile::parse("{").is_err());
    }

    #[test]
    fn codeword_file() {
        let c = small();
        let x = vec![FieldElement::ONE; 3];
        let cw = c.encode(&x).unwrap();
        let mut syms: Vec<_> = cw.symbols().iter().map(|&s| Some(s)).collect();
        syms[1] = None;
        let file = CodewordFile::from_symbols(c.field(), 3, &syms);
        let map = parse_codeword(&file.to_json(), &c).unwrap();
        assert_eq!(map.len(), 5);
        assert!(!map.contains_key(&1));
        assert!(parse_codeword(r#"{"buckets":[["1"]]}"#, &c).is_err());
    }
}
