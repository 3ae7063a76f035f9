//! Arithmetic in `Z/l^N` and in quotient rings `(Z/l^N)[x]/(P)`.
//!
//! A [`QuotientRing`] carries the local factorization of its modulus
//! polynomial: the irreducible factors of `P` mod `l` are grouped with their
//! full multiplicity into pairwise-coprime blocks, and each block is
//! Hensel-lifted to the working level `N`. Blocks of multiplicity one are
//! unramified discrete valuation rings; blocks of higher multiplicity are
//! retained whole and flagged as possibly non-maximal orders.

pub mod constants;
pub mod factor;
pub mod poly;

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

pub use constants::{c_constant, c_constant_pentagonal};

/// Largest modulus `l^N` we allow; products of two residues must fit `u128`.
const MAX_MODULUS: u64 = 1 << 62;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("{0} is not prime")]
    CompositeEll(u64),
    #[error("truncation level must be at least 1")]
    LevelZero,
    #[error("modulus {ell}^{level} exceeds the supported range")]
    ModulusTooLarge { ell: u64, level: u32 },
    #[error("modulus polynomial must be monic")]
    NotMonic,
    #[error("modulus polynomial must have degree at least 1")]
    DegreeZero,
    #[error("constant term of the modulus polynomial is divisible by {0}")]
    ConstantTermNotUnit(u64),
    #[error("frobenius scalar {q} is not a unit mod {ell}")]
    ScalarNotUnit { q: u64, ell: u64 },
    #[error("ring spec parse error at byte {pos}: {msg}")]
    SpecParse { pos: usize, msg: String },
}

/// The coefficient ring `Z/l^N`, as a prime together with a truncation level.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    ell: u64,
    level: u32,
    modulus: u64,
}

impl fmt::Debug for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}^{}", self.ell, self.level)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimePower {
    pub fn new(ell: u64, level: u32) -> Result<Self, RingError> {
        if !is_prime(ell) {
            return Err(RingError::CompositeEll(ell));
        }
        if level == 0 {
            return Err(RingError::LevelZero);
        }
        let mut modulus: u64 = 1;
        for _ in 0..level {
            modulus = modulus
                .checked_mul(ell)
                .filter(|&m| m <= MAX_MODULUS)
                .ok_or(RingError::ModulusTooLarge { ell, level })?;
        }
        Ok(Self { ell, level, modulus })
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Same prime, different truncation level.
    pub fn at_level(&self, level: u32) -> Self {
        debug_assert!(level >= 1);
        let mut modulus = 1u64;
        for _ in 0..level {
            modulus *= self.ell;
        }
        Self { ell: self.ell, level, modulus }
    }

    pub fn reduce_i128(&self, x: i128) -> u64 {
        let m = self.modulus as i128;
        (((x % m) + m) % m) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a as u128 + b as u128;
        (s % self.modulus as u128) as u64
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        let m = self.modulus as u128;
        ((a as u128 + m - b as u128 % m) % m) as u64
    }

    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a % self.modulus
        }
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1u64 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.ell != 0
    }

    /// Inverse of a unit; `None` when `l` divides `a`.
    pub fn inverse(&self, a: u64) -> Option<u64> {
        let a = a % self.modulus;
        if !self.is_unit(a) {
            return None;
        }
        // extended Euclid on (a, modulus)
        let (mut r0, mut r1) = (a as i128, self.modulus as i128);
        let (mut s0, mut s1) = (1i128, 0i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Some(self.reduce_i128(s0))
    }

    /// `l`-adic valuation of a residue, capped at `level` (the valuation of 0).
    pub fn valuation(&self, a: u64) -> u32 {
        let mut a = a % self.modulus;
        if a == 0 {
            return self.level;
        }
        let mut v = 0;
        while a % self.ell == 0 {
            a /= self.ell;
            v += 1;
        }
        v
    }

    /// `l^k` for `k <= level`.
    pub fn ell_pow(&self, k: u32) -> u64 {
        debug_assert!(k <= self.level);
        let mut r = 1u64;
        for _ in 0..k {
            r *= self.ell;
        }
        r
    }
}

impl Serialize for PrimePower {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            ell: u64,
            level: u32,
        }
        Repr { ell: self.ell, level: self.level }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PrimePower {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            ell: u64,
            level: u32,
        }
        let r = Repr::deserialize(deserializer)?;
        PrimePower::new(r.ell, r.level).map_err(serde::de::Error::custom)
    }
}

/// Polynomial with coefficients in `Z/l^N`, stored by ascending degree with
/// trailing zeros trimmed. The zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({:?})", self.coeffs)
    }
}

impl Poly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64], pp: &PrimePower) -> Self {
        Self::new(coeffs.iter().map(|&c| pp.reduce_i128(c as i128)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Self { coeffs: vec![1] }
    }

    pub fn x() -> Self {
        Self { coeffs: vec![0, 1] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports degree 0 for display purposes,
    /// callers that care must check `is_zero` first.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    pub fn constant_term(&self) -> u64 {
        self.coeffs.first().copied().unwrap_or(0)
    }

    pub fn reduced(&self, modulus: u64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c % modulus).collect())
    }

    pub fn eval(&self, x: u64, pp: &PrimePower) -> u64 {
        let mut acc = 0u64;
        for &c in self.coeffs.iter().rev() {
            acc = pp.add(pp.mul(acc, x), c);
        }
        acc
    }

    /// Balanced-coefficient display, e.g. `x^2-x+1` for `l = 3`.
    pub fn display(&self, pp: &PrimePower) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let m = pp.modulus();
        let mut parts: Vec<String> = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let balanced: i64 = if c > m / 2 { c as i64 - m as i64 } else { c as i64 };
            let (sign, mag) = if balanced < 0 { ("-", -balanced) } else { ("+", balanced) };
            let term = match (i, mag) {
                (0, v) => format!("{v}"),
                (1, 1) => "x".to_string(),
                (1, v) => format!("{v}x"),
                (d, 1) => format!("x^{d}"),
                (d, v) => format!("{v}x^{d}"),
            };
            if parts.is_empty() {
                parts.push(if sign == "-" { format!("-{term}") } else { term });
            } else {
                parts.push(format!("{sign}{term}"));
            }
        }
        parts.concat()
    }
}

/// One pairwise-coprime block of the local factorization of `P`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalBlock {
    /// Monic lift of `irreducible^multiplicity` to level `N`.
    pub lift: Poly,
    /// The irreducible factor of `P` mod `l` (coefficients reduced mod `l`).
    pub irreducible: Poly,
    pub multiplicity: u32,
    pub residue_degree: u32,
}

impl LocalBlock {
    /// Size of the residue field `F_{l^d}` at this maximal ideal.
    pub fn residue_field_size(&self, ell: u64) -> u64 {
        ell.pow(self.residue_degree)
    }

    /// Multiplicity-one blocks are unramified DVRs; anything else may be a
    /// non-maximal order and is handled by generic (enumeration) paths.
    pub fn is_maximal_order(&self) -> bool {
        self.multiplicity == 1
    }
}

/// The ring `R = (Z/l^N)[x]/(P)` with its local factorization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuotientRing {
    base: PrimePower,
    modulus_poly: Poly,
    frobenius_scalar: u64,
    blocks: Vec<LocalBlock>,
}

impl QuotientRing {
    pub fn base(&self) -> PrimePower {
        self.base
    }

    pub fn ell(&self) -> u64 {
        self.base.ell()
    }

    pub fn level(&self) -> u32 {
        self.base.level()
    }

    pub fn modulus_poly(&self) -> &Poly {
        &self.modulus_poly
    }

    pub fn degree(&self) -> usize {
        self.modulus_poly.degree()
    }

    pub fn frobenius_scalar(&self) -> u64 {
        self.frobenius_scalar
    }

    pub fn blocks(&self) -> &[LocalBlock] {
        &self.blocks
    }

    pub fn residue_field_sizes(&self) -> Vec<u64> {
        self.blocks.iter().map(|b| b.residue_field_size(self.ell())).collect()
    }

    pub fn all_blocks_maximal(&self) -> bool {
        self.blocks.iter().all(LocalBlock::is_maximal_order)
    }

    /// Number of elements `l^(N * deg P)`.
    pub fn size_exponent(&self) -> u32 {
        self.level() * self.degree() as u32
    }

    /// `P(q)` is a unit mod `l`: the regime where the twist decoration is
    /// forced to vanish and the linear model applies.
    pub fn scalar_avoids_modulus(&self) -> bool {
        let pq = self.modulus_poly.eval(self.frobenius_scalar, &self.base);
        self.base.is_unit(pq)
    }

    /// Canonical short label for a block, e.g. `x-1`, or `(x-1)^2` for a
    /// multiplicity block.
    pub fn block_label(&self, idx: usize) -> String {
        let b = &self.blocks[idx];
        let ell_pp = self.base.at_level(1);
        let g = b.irreducible.display(&ell_pp);
        if b.multiplicity == 1 {
            g
        } else {
            format!("({g})^{}", b.multiplicity)
        }
    }

    /// The normalizing constant for this ring: product over residue fields of
    /// `prod_i (1 - Q^-i)`, with total truncation error below `tol`.
    pub fn c_constant(&self, tol: f64) -> f64 {
        let per = tol / self.blocks.len() as f64;
        self.residue_field_sizes()
            .iter()
            .map(|&q| c_constant(q, per))
            .product()
    }
}

/// Constructs the quotient ring, factoring `P` mod `l` and Hensel-lifting the
/// pairwise-coprime blocks to level `N`.
pub fn build_ring(ell: u64, level: u32, p: &Poly, q: u64) -> Result<QuotientRing, RingError> {
    let pp = PrimePower::new(ell, level)?;
    let p = p.reduced(pp.modulus());
    if p.is_zero() || p.degree() == 0 {
        return Err(RingError::DegreeZero);
    }
    if !p.is_monic() {
        return Err(RingError::NotMonic);
    }
    if !pp.is_unit(p.constant_term()) {
        return Err(RingError::ConstantTermNotUnit(ell));
    }
    let q = q % pp.modulus();
    if !pp.is_unit(q) {
        return Err(RingError::ScalarNotUnit { q, ell });
    }
    let blocks = factor::local_blocks(&p, &pp);
    debug_assert!({
        let prod = blocks.iter().fold(Poly::one(), |acc, b| {
            Poly::new(poly::mul(&acc.coeffs, &b.lift.coeffs, pp.modulus()))
        });
        prod == p
    });
    Ok(QuotientRing { base: pp, modulus_poly: p, frobenius_scalar: q, blocks })
}

/// Parses the CLI ring specification string
/// `ell=<int>;level=<int>;P=<comma-separated ascending coefficients>;q=<int>`.
pub fn parse_ring_spec(spec: &str) -> Result<QuotientRing, RingError> {
    let mut pos = 0usize;
    let mut fields = Vec::new();
    for part in spec.split(';') {
        fields.push((pos, part));
        pos += part.len() + 1;
    }
    if fields.len() != 4 {
        return Err(RingError::SpecParse {
            pos: spec.len(),
            msg: format!("expected 4 ';'-separated fields, found {}", fields.len()),
        });
    }
    fn field<'a>(
        (pos, part): (usize, &'a str),
        key: &str,
    ) -> Result<(usize, &'a str), RingError> {
        match part.split_once('=') {
            Some((k, v)) if k == key => Ok((pos + key.len() + 1, v)),
            Some((k, _)) => Err(RingError::SpecParse {
                pos,
                msg: format!("expected field '{key}', found '{k}'"),
            }),
            None => Err(RingError::SpecParse { pos, msg: format!("missing '=' in field '{key}'") }),
        }
    }
    fn parse_int<T: std::str::FromStr>(pos: usize, s: &str, what: &str) -> Result<T, RingError> {
        s.trim().parse().map_err(|_| RingError::SpecParse {
            pos,
            msg: format!("invalid {what}: '{s}'"),
        })
    }

    let (epos, ev) = field(fields[0], "ell")?;
    let ell: u64 = parse_int(epos, ev, "prime")?;
    let (lpos, lv) = field(fields[1], "level")?;
    let level: u32 = parse_int(lpos, lv, "level")?;
    let (ppos, pv) = field(fields[2], "P")?;
    let mut coeffs = Vec::new();
    let mut cpos = ppos;
    for c in pv.split(',') {
        coeffs.push(parse_int::<i64>(cpos, c, "coefficient")?);
        cpos += c.len() + 1;
    }
    let (qpos, qv) = field(fields[3], "q")?;
    let q: u64 = parse_int(qpos, qv, "frobenius scalar")?;

    let pp = PrimePower::new(ell, level)?;
    let p = Poly::from_i64(&coeffs, &pp);
    build_ring(ell, level, &p, q)
}

/// Canonical spec string for a ring (round-trips through [`parse_ring_spec`]).
pub fn ring_spec_string(ring: &QuotientRing) -> String {
    let coeffs: Vec<String> =
        ring.modulus_poly().coeffs.iter().map(|c| c.to_string()).collect();
    format!(
        "ell={};level={};P={};q={}",
        ring.ell(),
        ring.level(),
        coeffs.join(","),
        ring.frobenius_scalar()
    )
}
