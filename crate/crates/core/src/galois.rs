//! Arithmetic in binary extension fields GF(2^m), 1 <= m <= 30.
//!
//! Elements are polynomials over GF(2) packed into the low `m` bits of a
//! `u32`. Fields with `m <= 16` carry log/antilog tables; larger fields
//! fall back to carry-less multiplication with modular reduction.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::combinatorics::binomial;
use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 30;
const TABLE_DEGREE: u32 = 16;

/// Lowest-weight irreducible polynomial of each degree, ties broken by the
/// smallest integer encoding. Index `m - 1`.
const CANONICAL_POLYS: [u32; MAX_DEGREE as usize] = [
    0x3, 0x7, 0xb, 0x13, 0x25, 0x43, 0x83, 0x11b, 0x203, 0x409, 0x805, 0x1009, 0x201b, 0x4021,
    0x8003, 0x1002b, 0x20009, 0x40009, 0x80027, 0x100009, 0x200005, 0x400003, 0x800021, 0x100001b,
    0x2000009, 0x400001b, 0x8000027, 0x10000003, 0x20000005, 0x40000003,
];

/// A symbol of some GF(2^m). Carries no reference to its field; operations
/// go through [`FieldSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::LowerHex for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(&self.0, f)
    }
}

struct Tables {
    // exp has length 2 * (q - 1) so log sums never need a reduction
    exp: Vec<u32>,
    log: Vec<u32>,
}

/// GF(2^m) defined by an irreducible reduction polynomial.
#[derive(Clone)]
pub struct FieldSpec {
    m: u32,
    poly: u32,
    tables: Option<Arc<Tables>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("m", &self.m)
            .field("poly", &format_args!("{:#x}", self.poly))
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m && self.poly == other.poly
    }
}

impl Eq for FieldSpec {}

impl FieldSpec {
    /// Builds GF(2^m) from `poly`, rejecting polynomials that are not
    /// irreducible of degree exactly `m`.
    pub fn new(m: u32, poly: u64) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(Error::InvalidDegree(m));
        }
        if poly >> m != 1 || !is_irreducible(poly) {
            return Err(Error::InvalidPolynomial { m, poly });
        }
        let mut field = FieldSpec {
            m,
            poly: poly as u32,
            tables: None,
        };
        if m <= TABLE_DEGREE {
            field.tables = Some(Arc::new(field.build_tables()));
        }
        Ok(field)
    }

    /// GF(2^m) with the shipped canonical polynomial for degree `m`.
    pub fn canonical(m: u32) -> Result<Self> {
        if !(1..=MAX_DEGREE).contains(&m) {
            return Err(Error::InvalidDegree(m));
        }
        Self::new(m, CANONICAL_POLYS[m as usize - 1] as u64)
    }

    /// Smallest field with more than `C(n-1, k-1)` elements.
    pub fn for_params(n: usize, k: usize) -> Result<Self> {
        Self::canonical(degree_for_params(n, k)?)
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn poly(&self) -> u32 {
        self.poly
    }

    pub fn order(&self) -> u64 {
        1u64 << self.m
    }

    /// Number of hex digits needed to print any element.
    pub fn hex_width(&self) -> usize {
        self.m.div_ceil(4) as usize
    }

    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >> self.m != 0 {
            return Err(Error::ElementOutOfRange { value, m: self.m });
        }
        Ok(FieldElement(value as u32))
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        (a.0 as u64) >> self.m == 0
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.order() as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        FieldElement(a.0 ^ b.0)
    }

    /// Subtraction coincides with addition in characteristic 2.
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, b)
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.tables {
            Some(t) => FieldElement(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => FieldElement(self.clmul_reduce(a.0, b.0)),
        }
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        match &self.tables {
            Some(t) => {
                let q1 = (self.order() - 1) as u32;
                let l = t.log[a.0 as usize];
                Ok(FieldElement(t.exp[((q1 - l) % q1) as usize]))
            }
            // a^(q-2)
            None => Ok(self.pow(a, self.order() - 2)),
        }
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, mut e: u64) -> FieldElement {
        let mut base = a;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn clmul_reduce(&self, a: u32, b: u32) -> u32 {
        let mut prod: u64 = 0;
        let (a, mut b) = (a as u64, b as u64);
        let mut shift = 0;
        while b != 0 {
            if b & 1 == 1 {
                prod ^= a << shift;
            }
            b >>= 1;
            shift += 1;
        }
        poly_mod(prod, self.poly as u64) as u32
    }

    fn build_tables(&self) -> Tables {
        let q1 = (self.order() - 1) as usize;
        let g = (2..self.order() as u32)
            .find(|&g| self.is_generator(g))
            .unwrap_or(1);
        let mut exp = vec![0u32; 2 * q1.max(1)];
        let mut log = vec![0u32; q1 + 1];
        let mut x = 1u32;
        for i in 0..q1 {
            exp[i] = x;
            exp[i + q1] = x;
            log[x as usize] = i as u32;
            x = self.clmul_reduce(x, g);
        }
        Tables { exp, log }
    }

    fn is_generator(&self, g: u32) -> bool {
        let q1 = self.order() - 1;
        prime_factors(q1).into_iter().all(|p| {
            let mut acc = 1u32;
            let mut base = g;
            let mut e = q1 / p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = self.clmul_reduce(acc, base);
                }
                base = self.clmul_reduce(base, base);
                e >>= 1;
            }
            acc != 1
        })
    }
}

/// Smallest `m` with `2^m > C(n-1, k-1)`.
pub fn degree_for_params(n: usize, k: usize) -> Result<u32> {
    if k == 0 || k > n {
        return Err(Error::InvalidParams(format!(
            "need 1 <= k <= n, got n={n}, k={k}"
        )));
    }
    let b = binomial(n as u64 - 1, k as u64 - 1);
    if b >= 1u128 << MAX_DEGREE {
        return Err(Error::FieldOverflow { binomial: b });
    }
    let mut m = 1;
    while (1u128 << m) <= b {
        m += 1;
    }
    Ok(m)
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

fn poly_mod(mut a: u64, b: u64) -> u64 {
    let db = poly_degree(b);
    while a != 0 && poly_degree(a) >= db {
        a ^= b << (poly_degree(a) - db);
    }
    a
}

/// Trial division by every polynomial of degree 1..=deg/2.
pub fn is_irreducible(p: u64) -> bool {
    let d = poly_degree(p);
    if d < 1 {
        return false;
    }
    for dd in 1..=d / 2 {
        for q in (1u64 << dd)..(1u64 << (dd + 1)) {
            if poly_mod(p, q) == 0 {
                return false;
            }
        }
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Serialize, Deserialize)]
struct FieldSpecRepr {
    m: u32,
    poly: String,
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecRepr {
            m: self.m,
            poly: format!("{:#x}", self.poly),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FieldSpecRepr::deserialize(d)?;
        let digits = repr
            .poly
            .strip_prefix("0x")
            .or_else(|| repr.poly.strip_prefix("0X"))
            .unwrap_or(&repr.poly);
        let poly = u64::from_str_radix(digits, 16).map_err(serde::de::Error::custom)?;
        FieldSpec::new(repr.m, poly).map_err(serde::de::Error::custom)
    }
}
