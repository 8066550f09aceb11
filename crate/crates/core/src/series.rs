//! The truncated Z₂ⁿ-graded formal power series ring.
//!
//! A [`JetAlgebra`] is the quotient of the free graded-commutative series
//! ring on a [`CoordinateSystem`] by every monomial of total exponent above
//! `cap`. Products that overflow the cap are dropped, never reported.
//! Coefficients are exact rationals.
//!
//! Monomials are kept in canonical form: factors in coordinate order. The
//! sign of every reordering is computed from [`Degree::pairing`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::grading::{CoordinateSystem, Degree};
use crate::Rational;

pub(crate) fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// The jet algebra: coordinates plus a total-degree truncation order.
#[derive(Clone, PartialEq, Eq)]
pub struct JetAlgebra {
    coords: CoordinateSystem,
    cap: u32,
}

impl JetAlgebra {
    pub fn new(coords: CoordinateSystem, cap: u32) -> Arc<Self> {
        Arc::new(Self { coords, cap })
    }

    pub fn coords(&self) -> &CoordinateSystem {
        &self.coords
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn n(&self) -> u8 {
        self.coords.n()
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Same coordinates, different truncation order.
    pub fn with_cap(&self, cap: u32) -> Arc<Self> {
        Arc::new(Self { coords: self.coords.clone(), cap })
    }

    /// Dimension p|q as (p, counts per nonzero degree in standard order).
    pub fn dimension(&self) -> (usize, Vec<usize>) {
        (self.coords.p(), self.coords.counts()[1..].to_vec())
    }
}

impl fmt::Debug for JetAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "JetAlgebra(cap={}, {:?})", self.cap, self.coords)
    }
}

pub(crate) fn same_algebra(a: &Arc<JetAlgebra>, b: &Arc<JetAlgebra>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Exponent vector of a canonical monomial.
///
/// Ordered by total degree, then lexicographically descending on the
/// exponent vector, so that `x` sorts before `z` when `x` is the earlier
/// coordinate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    total: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn one(len: usize) -> Self {
        Self { total: 0, exps: vec![0; len] }
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        let total = exps.iter().sum();
        Self { total, exps }
    }

    pub fn var(len: usize, i: usize) -> Self {
        let mut m = Self::one(len);
        m.exps[i] = 1;
        m.total = 1;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exps[i]
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn is_one(&self) -> bool {
        self.total == 0
    }

    pub fn degree(&self, coords: &CoordinateSystem) -> Degree {
        let mut d = Degree::zero(coords.n());
        for (i, &e) in self.exps.iter().enumerate() {
            if e % 2 == 1 {
                d = d + coords.degree(i);
            }
        }
        d
    }

    /// Total exponent of nonzero-degree coordinates.
    pub fn j_order(&self, coords: &CoordinateSystem) -> u32 {
        self.exps.iter().enumerate().filter(|(i, _)| !coords.degree(*i).is_zero()).map(|(_, &e)| e).sum()
    }

    /// Whether an odd coordinate appears squared (the monomial is zero).
    fn vanishes(&self, coords: &CoordinateSystem) -> bool {
        self.exps.iter().enumerate().any(|(i, &e)| e >= 2 && coords.is_odd(i))
    }

    pub(crate) fn with_exponent(&self, i: usize, e: u32) -> Monomial {
        let mut m = self.clone();
        m.total = m.total - m.exps[i] + e;
        m.exps[i] = e;
        m
    }

    /// Sum of the degrees of the factors strictly before coordinate `i`.
    pub(crate) fn degree_before(&self, coords: &CoordinateSystem, i: usize) -> Degree {
        let mut d = Degree::zero(coords.n());
        for (j, &e) in self.exps[..i].iter().enumerate() {
            if e % 2 == 1 {
                d = d + coords.degree(j);
            }
        }
        d
    }

    /// Canonical product `self · other` with its reordering sign parity.
    /// `None` when the product vanishes or exceeds `cap`.
    pub(crate) fn mul(&self, other: &Monomial, coords: &CoordinateSystem, cap: u32) -> Option<(Monomial, u8)> {
        if self.total + other.total > cap {
            return None;
        }
        let len = self.exps.len();
        let mut exps = Vec::with_capacity(len);
        for i in 0..len {
            let e = self.exps[i] + other.exps[i];
            if e >= 2 && coords.is_odd(i) {
                return None;
            }
            exps.push(e);
        }
        // Factor j of `other` moves left past every factor of `self` with index > j.
        let mut suffix = Degree::zero(coords.n());
        let mut parity = 0u8;
        for j in (0..len).rev() {
            if other.exps[j] % 2 == 1 {
                parity ^= suffix.pairing(&coords.degree(j));
            }
            if self.exps[j] % 2 == 1 {
                suffix = suffix + coords.degree(j);
            }
        }
        Some((Monomial { total: self.total + other.total, exps }, parity))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total.cmp(&other.total).then_with(|| other.exps.cmp(&self.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.exps)
    }
}

/// An element of a jet algebra.
#[derive(Clone)]
pub struct Series {
    alg: Arc<JetAlgebra>,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Series {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.alg, &other.alg) && self.terms == other.terms
    }
}

impl Eq for Series {}

impl Series {
    pub fn zero(alg: &Arc<JetAlgebra>) -> Self {
        Self { alg: alg.clone(), terms: BTreeMap::new() }
    }

    pub fn one(alg: &Arc<JetAlgebra>) -> Self {
        Self::constant(alg, Rational::one())
    }

    pub fn constant(alg: &Arc<JetAlgebra>, c: Rational) -> Self {
        let mut s = Self::zero(alg);
        s.add_term(Monomial::one(alg.len()), c);
        s
    }

    /// The i-th coordinate function (zero if `cap` is 0).
    pub fn coordinate(alg: &Arc<JetAlgebra>, i: usize) -> Self {
        let mut s = Self::zero(alg);
        if alg.cap() >= 1 {
            s.add_term(Monomial::var(alg.len(), i), Rational::one());
        }
        s
    }

    pub fn var(alg: &Arc<JetAlgebra>, name: &str) -> Result<Self> {
        let i = alg.coords().index_of(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(Self::coordinate(alg, i))
    }

    /// Builds `c · m`, dropping it if it is zero in the quotient.
    pub fn monomial(alg: &Arc<JetAlgebra>, m: Monomial, c: Rational) -> Result<Self> {
        if m.exps.len() != alg.len() {
            return Err(Error::Arity { expected: alg.len(), found: m.exps.len() });
        }
        let mut s = Self::zero(alg);
        if m.total <= alg.cap && !m.vanishes(alg.coords()) {
            s.add_term(m, c);
        }
        Ok(s)
    }

    pub fn algebra(&self) -> &Arc<JetAlgebra> {
        &self.alg
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · m` in place; `m` must already be canonical and within cap.
    pub(crate) fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check(&self, other: &Series) -> Result<()> {
        if same_algebra(&self.alg, &other.alg) { Ok(()) } else { Err(Error::AlgebraMismatch) }
    }

    pub fn checked_add(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(&self.alg);
        }
        Series { alg: self.alg.clone(), terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    /// Graded-commutative product, truncated at `cap`.
    pub fn checked_mul(&self, other: &Series) -> Result<Series> {
        self.check(other)?;
        let coords = self.alg.coords();
        let cap = self.alg.cap;
        let mut out = Series::zero(&self.alg);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some((m, parity)) = m1.mul(m2, coords, cap) {
                    let c = c1 * c2;
                    out.add_term(m, if parity == 1 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Series {
        let mut acc = Series::one(&self.alg);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Left coordinate derivation ∂/∂uⁱ.
    ///
    /// On a canonical monomial, the factor uⁱ is reached by moving the
    /// derivation past the factors to its left, which costs
    /// (−1)^⟨deg uⁱ, degree of those factors⟩. Exact on the stored
    /// representative; as a jet it is accurate up to total degree cap−1.
    pub fn partial(&self, i: usize) -> Series {
        let coords = self.alg.coords();
        let di = coords.degree(i);
        let mut out = Series::zero(&self.alg);
        for (m, c) in &self.terms {
            let e = m.exps[i];
            if e == 0 {
                continue;
            }
            let parity = di.pairing(&m.degree_before(coords, i));
            let c = c * rat(e as i64);
            out.add_term(m.with_exponent(i, e - 1), if parity == 1 { -c } else { c });
        }
        out
    }

    pub fn partial_by_name(&self, name: &str) -> Result<Series> {
        let i = self.alg.coords().index_of(name).ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(self.partial(i))
    }

    /// The unique G with ∂G/∂uⁱ = self and G|_{uⁱ=0} = 0, for an even
    /// coordinate uⁱ. Terms pushed past `cap` are dropped.
    pub(crate) fn antiderivative(&self, i: usize) -> Series {
        let coords = self.alg.coords();
        let di = coords.degree(i);
        debug_assert!(!di.is_odd());
        let mut out = Series::zero(&self.alg);
        for (m, c) in &self.terms {
            if m.total + 1 > self.alg.cap {
                continue;
            }
            let e = m.exps[i];
            let parity = di.pairing(&m.degree_before(coords, i));
            let c = c / rat(e as i64 + 1);
            out.add_term(m.with_exponent(i, e + 1), if parity == 1 { -c } else { c });
        }
        out
    }

    /// Substitutes zero for coordinate `i`.
    pub fn set_zero(&self, i: usize) -> Series {
        Series {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.exps[i] == 0).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Constant coefficient (evaluation at the basepoint).
    pub fn epsilon(&self) -> Rational {
        self.coefficient(&Monomial::one(self.alg.len()))
    }

    /// Position in the 𝒥-adic filtration; `None` stands for ∞ (zero series).
    pub fn j_order(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.j_order(self.alg.coords())).min()
    }

    /// Largest total degree present; `None` for zero.
    pub fn max_total(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.total).max()
    }

    /// Drops every monomial of total degree above `k`.
    pub fn truncated(&self, k: u32) -> Series {
        Series {
            alg: self.alg.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.total <= k).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    /// Reinterprets the series in an algebra with the same coordinates and a
    /// different cap, dropping what no longer fits.
    pub fn recast(&self, alg: &Arc<JetAlgebra>) -> Result<Series> {
        if alg.coords() != self.alg.coords() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Series {
            alg: alg.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.total <= alg.cap).map(|(m, c)| (m.clone(), c.clone())).collect(),
        })
    }

    pub fn homogeneous_part(&self, d: &Degree) -> Series {
        let coords = self.alg.coords();
        Series {
            alg: self.alg.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree(coords) == *d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// True when every monomial has degree `d` (vacuously for zero).
    pub fn is_homogeneous(&self, d: &Degree) -> bool {
        let coords = self.alg.coords();
        self.terms.keys().all(|m| m.degree(coords) == *d)
    }

    /// The common degree of all monomials; `None` for zero or inhomogeneous.
    pub fn degree(&self) -> Option<Degree> {
        let coords = self.alg.coords();
        let mut it = self.terms.keys().map(|m| m.degree(coords));
        let first = it.next()?;
        if it.all(|d| d == first) { Some(first) } else { None }
    }

    /// Splits into homogeneous components.
    pub fn components(&self) -> BTreeMap<Degree, Series> {
        let coords = self.alg.coords();
        let mut out: BTreeMap<Degree, Series> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(m.degree(coords))
                .or_insert_with(|| Series::zero(&self.alg))
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Multiplicative inverse: ε(f)⁻¹·Σ_{k≤cap}(−h)ᵏ for f = ε(f)(1 + h).
    ///
    /// Any f with ε(f) ≠ 0 is a unit of the quotient, homogeneous or not,
    /// since h has no constant term and h^{cap+1} = 0.
    pub fn invert(&self) -> Result<Series> {
        let e = self.epsilon();
        if e.is_zero() {
            return Err(Error::NonUnit);
        }
        let e_inv = e.recip();
        let mut minus_h = self.scale(&e_inv);
        minus_h.add_term(Monomial::one(self.alg.len()), -Rational::one());
        minus_h = -&minus_h;
        let mut acc = Series::one(&self.alg);
        let mut power = Series::one(&self.alg);
        for _ in 0..self.alg.cap {
            power = &power * &minus_h;
            if power.is_zero() {
                break;
            }
            acc = &acc + &power;
        }
        Ok(acc.scale(&e_inv))
    }

    /// Pullback along a coordinate tuple: replaces the i-th coordinate of
    /// this series' algebra by `images[i]`, computed in the images' algebra.
    pub fn substitute(&self, images: &[Series]) -> Result<Series> {
        let Some(first) = images.first() else {
            return Err(Error::Argument("empty substitution needs an explicit source algebra".into()));
        };
        let source = first.alg.clone();
        self.substitute_in(&source, images)
    }

    /// [`Series::substitute`] with the source algebra given explicitly, which
    /// also covers targets without coordinates.
    pub fn substitute_in(&self, source: &Arc<JetAlgebra>, images: &[Series]) -> Result<Series> {
        let target = self.alg.coords();
        if images.len() != target.len() {
            return Err(Error::Arity { expected: target.len(), found: images.len() });
        }
        check_images(target, source, images)?;
        Ok(substitute_unchecked(self, images, source))
    }
}

/// Validates a pullback tuple against target coordinates.
pub(crate) fn check_images(target: &CoordinateSystem, source: &Arc<JetAlgebra>, images: &[Series]) -> Result<()> {
    if target.n() != source.n() {
        return Err(Error::DimensionMismatch { left: target.n() as usize, right: source.n() as usize });
    }
    for (i, img) in images.iter().enumerate() {
        if !same_algebra(img.algebra(), source) {
            return Err(Error::AlgebraMismatch);
        }
        let d = target.degree(i);
        if !img.is_homogeneous(&d) {
            return Err(Error::DegreeMismatch { expected: d });
        }
        if d.is_zero() && !img.epsilon().is_zero() {
            return Err(Error::Basepoint(target.name(i).into()));
        }
    }
    Ok(())
}

pub(crate) fn substitute_unchecked(f: &Series, images: &[Series], source: &Arc<JetAlgebra>) -> Series {
    let mut powers: Vec<Vec<Series>> = images.iter().map(|img| vec![Series::one(source), img.clone()]).collect();
    let mut out = Series::zero(source);
    for (m, c) in &f.terms {
        let mut prod = Series::constant(source, c.clone());
        for (i, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            while powers[i].len() <= e as usize {
                let next = powers[i].last().unwrap() * &images[i];
                powers[i].push(next);
            }
            prod = &prod * &powers[i][e as usize];
            if prod.is_zero() {
                break;
            }
        }
        for (m, c) in prod.terms {
            out.add_term(m, c);
        }
    }
    out
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Series> for &Series {
            type Output = Series;
            /// # Panics
            /// If the operands live in different jet algebras.
            fn $method(self, rhs: &Series) -> Series {
                self.$checked(rhs).expect(concat!("Series::", stringify!($method), ": algebra mismatch"))
            }
        }
        impl $tr<Series> for Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series { alg: self.alg.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

pub(crate) fn fmt_rational(c: &Rational) -> alloc::string::String {
    if c.denom().is_one() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) }
}

pub(crate) fn fmt_monomial(m: &Monomial, coords: &CoordinateSystem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, &e) in m.exps.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        f.write_str(coords.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: `coef*name^k*...` terms joined by ` + ` / ` - `, ordered
/// by total degree, coefficient omitted when it is ±1 on a nonconstant
/// monomial.
impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let coords = self.alg.coords();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let a = c.abs();
            if m.is_one() {
                f.write_str(&fmt_rational(&a))?;
            } else {
                if !a.is_one() {
                    write!(f, "{}*", fmt_rational(&a))?;
                }
                fmt_monomial(m, coords, f)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series({self})")
    }
}
