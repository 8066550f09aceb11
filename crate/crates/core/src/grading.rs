//! Z₂ⁿ degrees, the sign rule, and coordinate layouts.
//!
//! A [`Degree`] is an n-tuple of bits stored in a single word, first
//! component in the most significant position so that numeric order on the
//! word is lexicographic order on the tuple. Every commutation sign in the
//! crate reduces to [`Degree::pairing`].

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg};
use core::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported n.
pub const MAX_N: u8 = 16;

/// An element of Z₂ⁿ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree {
    n: u8,
    bits: u16,
}

impl Degree {
    /// Builds a degree from its components (each taken mod 2).
    pub fn new(components: &[u8]) -> Result<Self> {
        let n = components.len();
        if n == 0 || n > MAX_N as usize {
            return Err(Error::Argument(format!("degree length must be in 1..={MAX_N}, got {n}")));
        }
        let mut bits = 0u16;
        for &c in components {
            bits = (bits << 1) | u16::from(c & 1);
        }
        Ok(Self { n: n as u8, bits })
    }

    pub(crate) fn from_bits(n: u8, bits: u16) -> Self {
        debug_assert!(n >= 1 && n <= MAX_N);
        Self { n, bits }
    }

    pub fn zero(n: u8) -> Self {
        Self::from_bits(n, 0)
    }

    pub fn n(&self) -> u8 {
        self.n
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    /// The k-th component (0-based).
    pub fn component(&self, k: usize) -> u8 {
        ((self.bits >> (self.n as usize - 1 - k)) & 1) as u8
    }

    pub fn components(&self) -> Vec<u8> {
        (0..self.n as usize).map(|k| self.component(k)).collect()
    }

    /// Underlying parity: sum of the components mod 2.
    pub fn parity(&self) -> u8 {
        (self.bits.count_ones() & 1) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == 1
    }

    /// ⟨a, b⟩ mod 2. Lengths must agree; checked in debug builds only.
    #[inline]
    pub fn pairing(&self, other: &Degree) -> u8 {
        debug_assert_eq!(self.n, other.n);
        ((self.bits & other.bits).count_ones() & 1) as u8
    }

    /// (−1)^⟨a, b⟩.
    pub fn scalar_sign(&self, other: &Degree) -> Result<Sign> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { left: self.n as usize, right: other.n as usize });
        }
        Ok(Sign::from_parity(self.pairing(other)))
    }

    /// Degree of `k` copies of `self`.
    pub fn times(&self, k: u32) -> Degree {
        if k % 2 == 0 { Degree::zero(self.n) } else { *self }
    }
}

impl Add for Degree {
    type Output = Degree;
    fn add(self, rhs: Degree) -> Degree {
        debug_assert_eq!(self.n, rhs.n);
        Degree { n: self.n, bits: self.bits ^ rhs.bits }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for k in 0..self.n as usize {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.component(k))?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Degree {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bits = parse_tuple(s)?;
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Argument(format!("degree components must be 0 or 1: {s}")));
        }
        let bits: Vec<u8> = bits.into_iter().map(|b| b as u8).collect();
        Degree::new(&bits)
    }
}

fn parse_tuple(s: &str) -> Result<Vec<usize>> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Argument(format!("expected a parenthesized tuple: {s}")))?;
    inner
        .split(',')
        .map(|c| c.trim().parse::<usize>().map_err(|_| Error::Argument(format!("bad tuple entry `{c}`"))))
        .collect()
}

/// A sign ±1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(p: u8) -> Self {
        if p & 1 == 0 { Sign::Plus } else { Sign::Minus }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs { Sign::Plus } else { Sign::Minus }
    }
}

impl Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// (−1)^⟨a, b⟩; see [`Degree::scalar_sign`].
pub fn scalar_sign(a: &Degree, b: &Degree) -> Result<Sign> {
    a.scalar_sign(b)
}

pub fn parity(d: &Degree) -> u8 {
    d.parity()
}

/// All 2ⁿ degrees: even-parity ones lexicographically, then odd-parity ones
/// lexicographically.
pub fn standard_order(n: u8) -> Result<Vec<Degree>> {
    if n == 0 || n > MAX_N {
        return Err(Error::Argument(format!("n must be in 1..={MAX_N}, got {n}")));
    }
    let total = 1u32 << n;
    let all = (0..total).map(|b| Degree::from_bits(n, b as u16));
    let (even, odd): (Vec<_>, Vec<_>) = all.partition(|d| d.parity() == 0);
    Ok(even.into_iter().chain(odd).collect())
}

/// Cached standard order for one n, with the inverse lookup table.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct StandardOrder {
    n: u8,
    order: Vec<Degree>,
    rank: Vec<u16>,
}

impl StandardOrder {
    fn new(n: u8) -> Result<Self> {
        let order = standard_order(n)?;
        let mut rank = alloc::vec![0u16; order.len()];
        for (i, d) in order.iter().enumerate() {
            rank[d.bits() as usize] = i as u16;
        }
        Ok(Self { n, order, rank })
    }

    fn rank(&self, d: &Degree) -> usize {
        self.rank[d.bits() as usize] as usize
    }
}

/// Number of coordinates per nonzero degree, in standard order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeSignature {
    pub n: u8,
    pub q: Vec<usize>,
}

/// Canonical layout derived from a validated signature.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: u8,
    /// Nonzero degrees in standard order.
    pub degrees: Vec<Degree>,
    /// Coordinate count per entry of `degrees`.
    pub counts: Vec<usize>,
    /// Offset of each degree group among the nonzero-degree coordinates.
    pub offsets: Vec<usize>,
}

impl DegreeSignature {
    pub fn new(n: u8, q: Vec<usize>) -> Self {
        Self { n, q }
    }

    pub fn validate(&self) -> Result<Layout> {
        let order = standard_order(self.n).map_err(|e| Error::Signature(e.to_string()))?;
        let expected = order.len() - 1;
        if self.q.len() != expected {
            return Err(Error::Signature(format!(
                "n={} needs {} entries in q, found {}",
                self.n,
                expected,
                self.q.len()
            )));
        }
        let mut offsets = Vec::with_capacity(expected);
        let mut acc = 0;
        for &c in &self.q {
            offsets.push(acc);
            acc += c;
        }
        Ok(Layout { n: self.n, degrees: order[1..].to_vec(), counts: self.q.clone(), offsets })
    }
}

impl fmt::Display for DegreeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} q=(", self.n)?;
        for (i, c) in self.q.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for DegreeSignature {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut n = None;
        let mut q = None;
        for part in s.split_whitespace() {
            if let Some(v) = part.strip_prefix("n=") {
                n = Some(v.parse::<u8>().map_err(|_| Error::Signature(format!("bad n `{v}`")))?);
            } else if let Some(v) = part.strip_prefix("q=") {
                q = Some(parse_tuple(v).map_err(|e| Error::Signature(e.to_string()))?);
            } else {
                return Err(Error::Signature(format!("unexpected `{part}`")));
            }
        }
        match (n, q) {
            (Some(n), Some(q)) => Ok(DegreeSignature { n, q }),
            _ => Err(Error::Signature(format!("expected `n=<int> q=(...)`, got `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coordinate {
    pub name: String,
    pub degree: Degree,
}

/// An ordered coordinate system: degree-zero coordinates first, then the
/// nonzero-degree ones grouped by degree in standard order.
#[derive(Clone, PartialEq, Eq)]
pub struct CoordinateSystem {
    std: StandardOrder,
    coords: Vec<Coordinate>,
    /// Count per degree, indexed by standard-order position.
    counts: Vec<usize>,
    /// Index of the first coordinate of each degree.
    offsets: Vec<usize>,
}

impl CoordinateSystem {
    /// Builds a system from named coordinates. Input order is kept within
    /// each degree; groups are rearranged into standard order.
    pub fn new(n: u8, coords: Vec<(String, Degree)>) -> Result<Self> {
        let std = StandardOrder::new(n)?;
        for (name, d) in &coords {
            if d.n() != n {
                return Err(Error::DimensionMismatch { left: n as usize, right: d.n() as usize });
            }
            if name.is_empty() {
                return Err(Error::Argument("empty coordinate name".into()));
            }
        }
        for (i, (a, _)) in coords.iter().enumerate() {
            if coords[..i].iter().any(|(b, _)| b == a) {
                return Err(Error::Argument(format!("duplicate coordinate name `{a}`")));
            }
        }
        let mut coords: Vec<Coordinate> =
            coords.into_iter().map(|(name, degree)| Coordinate { name, degree }).collect();
        coords.sort_by_key(|c| std.rank(&c.degree));
        let mut counts = alloc::vec![0usize; std.order.len()];
        for c in &coords {
            counts[std.rank(&c.degree)] += 1;
        }
        let mut offsets = Vec::with_capacity(counts.len());
        let mut acc = 0;
        for &c in &counts {
            offsets.push(acc);
            acc += c;
        }
        Ok(Self { std, coords, counts, offsets })
    }

    /// Canonical system for p|q with generated names: `x1..xp` for degree
    /// zero and `xi{j}_{a}` for the a-th coordinate of the j-th nonzero degree.
    pub fn from_signature(p: usize, sig: &DegreeSignature) -> Result<Self> {
        let layout = sig.validate()?;
        let mut coords = Vec::new();
        for i in 1..=p {
            coords.push((format!("x{i}"), Degree::zero(sig.n)));
        }
        for (j, (d, &count)) in layout.degrees.iter().zip(&layout.counts).enumerate() {
            for a in 1..=count {
                coords.push((format!("xi{}_{}", j + 1, a), *d));
            }
        }
        Self::new(sig.n, coords)
    }

    pub fn n(&self) -> u8 {
        self.std.n
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.coords
    }

    pub fn degree(&self, i: usize) -> Degree {
        self.coords[i].degree
    }

    pub fn name(&self, i: usize) -> &str {
        &self.coords[i].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c.name == name)
    }

    /// Whether the coordinate squares to zero (odd underlying parity).
    pub fn is_odd(&self, i: usize) -> bool {
        self.coords[i].degree.is_odd()
    }

    /// All 2ⁿ degrees in standard order.
    pub fn standard_order(&self) -> &[Degree] {
        &self.std.order
    }

    /// Position of a degree in the standard order.
    pub fn degree_rank(&self, d: &Degree) -> usize {
        self.std.rank(d)
    }

    /// Coordinate count per degree, in standard order (entry 0 is p).
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Indices of the coordinates of the given degree.
    pub fn indices_of_degree(&self, d: &Degree) -> core::ops::Range<usize> {
        let r = self.std.rank(d);
        self.offsets[r]..self.offsets[r] + self.counts[r]
    }

    /// Number of degree-zero coordinates.
    pub fn p(&self) -> usize {
        self.counts[0]
    }

    pub fn signature(&self) -> DegreeSignature {
        DegreeSignature { n: self.std.n, q: self.counts[1..].to_vec() }
    }
}

impl fmt::Debug for CoordinateSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}:{}", c.name, c.degree)?;
        }
        f.write_str("]")
    }
}
