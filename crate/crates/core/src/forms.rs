//! Vector fields and differential forms over a jet algebra.
//!
//! A form is stored as a sum of `word · f`, where the word is a product of
//! differentials du^a in coordinate order and the coefficient f sits on the
//! right. The generator du^a has degree deg uᵃ and form degree 1; it squares
//! to zero exactly when deg uᵃ has even parity, otherwise its powers are
//! unbounded.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::grading::{CoordinateSystem, Degree};
use crate::morphism::Morphism;
use crate::series::{fmt_rational, same_algebra, JetAlgebra, Monomial, Series};
use crate::Rational;

/// A vector field Σ aᵇ ∂_{uᵇ}, coefficients on the left.
#[derive(Clone, PartialEq, Eq)]
pub struct VectorField {
    alg: Arc<JetAlgebra>,
    coeffs: Vec<Series>,
}

impl VectorField {
    pub fn new(alg: &Arc<JetAlgebra>, coeffs: Vec<Series>) -> Result<Self> {
        if coeffs.len() != alg.len() {
            return Err(Error::Arity { expected: alg.len(), found: coeffs.len() });
        }
        if coeffs.iter().any(|c| !same_algebra(c.algebra(), alg)) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self { alg: alg.clone(), coeffs })
    }

    /// The coordinate field ∂_{uⁱ}.
    pub fn partial(alg: &Arc<JetAlgebra>, i: usize) -> Self {
        let mut coeffs = vec![Series::zero(alg); alg.len()];
        coeffs[i] = Series::one(alg);
        Self { alg: alg.clone(), coeffs }
    }

    pub fn algebra(&self) -> &Arc<JetAlgebra> {
        &self.alg
    }

    pub fn coefficients(&self) -> &[Series] {
        &self.coeffs
    }

    /// γ with every aᵇ homogeneous of degree γ + deg uᵇ; `None` when no such
    /// γ exists. The zero field has degree 0.
    pub fn degree(&self) -> Option<Degree> {
        let coords = self.alg.coords();
        let mut found = None;
        for (b, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let g = c.degree()? + coords.degree(b);
            match found {
                None => found = Some(g),
                Some(h) if h != g => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or_else(|| Degree::zero(self.alg.n())))
    }

    /// Xf = Σ aᵇ ∂_{uᵇ} f.
    pub fn apply(&self, f: &Series) -> Result<Series> {
        if !same_algebra(f.algebra(), &self.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = Series::zero(&self.alg);
        for (b, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                out = &out + &(a * &f.partial(b));
            }
        }
        Ok(out)
    }

    /// Evaluation pairing with a 1-form Σ duᵇ·c_b, giving Σ aᵇ c_b.
    pub fn pair(&self, omega: &Form) -> Result<Series> {
        if !same_algebra(&omega.alg, &self.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let mut out = Series::zero(&self.alg);
        for (w, c) in &omega.terms {
            if w.total() != 1 {
                return Err(Error::Argument("pairing needs a 1-form".into()));
            }
            let b = w.exponents().iter().position(|&e| e == 1).expect("word of length one");
            out = &out + &(&self.coeffs[b] * c);
        }
        Ok(out)
    }

    /// [X, Y] = X∘Y − (−1)^⟨deg X, deg Y⟩ Y∘X, evaluated on coordinates.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        if !same_algebra(&other.alg, &self.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let (dx, dy) = (self.degree().ok_or(Error::Inhomogeneous)?, other.degree().ok_or(Error::Inhomogeneous)?);
        let swap = dx.pairing(&dy) == 1;
        let coeffs = (0..self.alg.len())
            .map(|b| {
                let xy = self.apply(&other.coeffs[b])?;
                let yx = other.apply(&self.coeffs[b])?;
                Ok(if swap { &xy + &yx } else { &xy - &yx })
            })
            .collect::<Result<_>>()?;
        Ok(VectorField { alg: self.alg.clone(), coeffs })
    }

    pub fn truncated(&self, k: u32) -> VectorField {
        VectorField { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|c| c.truncated(k)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Series::is_zero)
    }
}

impl core::ops::Add for &VectorField {
    type Output = VectorField;
    fn add(self, rhs: &VectorField) -> VectorField {
        VectorField { alg: self.alg.clone(), coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl core::ops::Neg for &VectorField {
    type Output = VectorField;
    fn neg(self) -> VectorField {
        VectorField { alg: self.alg.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.alg.coords();
        let mut first = true;
        for (b, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({a})*∂{}", coords.name(b))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Whether du^a commutes with itself (odd coordinate) rather than squaring
/// to zero.
fn symmetric_generator(coords: &CoordinateSystem, a: usize) -> bool {
    coords.is_odd(a)
}

/// Z₂ⁿ-degree of a word.
fn word_degree(w: &Monomial, coords: &CoordinateSystem) -> Degree {
    w.degree(coords)
}

/// Canonical product of two words with its sign parity; `None` if an
/// antisymmetric generator repeats.
fn word_mul(w1: &Monomial, w2: &Monomial, coords: &CoordinateSystem) -> Option<(Monomial, u8)> {
    let len = coords.len();
    let (e1, e2) = (w1.exponents(), w2.exponents());
    let mut exps = Vec::with_capacity(len);
    for a in 0..len {
        let e = e1[a] + e2[a];
        if e >= 2 && !symmetric_generator(coords, a) {
            return None;
        }
        exps.push(e);
    }
    // Each block du^j of w2 moves left past the generators of w1 with larger index;
    // one swap of du^a, du^j costs ⟨a, j⟩ + 1.
    let mut parity = 0u32;
    for j in 0..len {
        if e2[j] == 0 {
            continue;
        }
        for a in j + 1..len {
            if e1[a] != 0 {
                let swap = coords.degree(a).pairing(&coords.degree(j)) as u32 + 1;
                parity += e2[j] * e1[a] * swap;
            }
        }
    }
    Some((Monomial::from_exponents(exps), (parity % 2) as u8))
}

/// A differential form with exact rational coefficients.
#[derive(Clone)]
pub struct Form {
    alg: Arc<JetAlgebra>,
    form_cap: u32,
    terms: BTreeMap<Monomial, Series>,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        same_algebra(&self.alg, &other.alg) && self.terms == other.terms
    }
}

impl Eq for Form {}

impl Form {
    /// The zero form; `form_cap` bounds the form degree of words.
    pub fn zero(alg: &Arc<JetAlgebra>, form_cap: u32) -> Self {
        Self { alg: alg.clone(), form_cap, terms: BTreeMap::new() }
    }

    /// A function as a 0-form, with `form_cap` equal to the algebra's cap.
    pub fn function(f: &Series) -> Self {
        Self::function_with_cap(f, f.algebra().cap())
    }

    pub fn function_with_cap(f: &Series, form_cap: u32) -> Self {
        let mut out = Self::zero(f.algebra(), form_cap);
        out.add_term(Monomial::one(f.algebra().len()), f.clone());
        out
    }

    /// The generator duⁱ.
    pub fn generator(alg: &Arc<JetAlgebra>, form_cap: u32, i: usize) -> Result<Self> {
        Self::word(alg, form_cap, Monomial::var(alg.len(), i), Series::one(alg))
    }

    /// `word · f` with the word given by its exponents in coordinate order.
    pub fn word(alg: &Arc<JetAlgebra>, form_cap: u32, word: Monomial, f: Series) -> Result<Self> {
        let coords = alg.coords();
        if word.exponents().len() != alg.len() {
            return Err(Error::Shape);
        }
        if !same_algebra(f.algebra(), alg) {
            return Err(Error::AlgebraMismatch);
        }
        if word.total() > form_cap {
            return Err(Error::CapExceeded(alloc::format!("form degree {} above form cap {form_cap}", word.total())));
        }
        let mut out = Self::zero(alg, form_cap);
        if word.exponents().iter().enumerate().all(|(a, &e)| e <= 1 || symmetric_generator(coords, a)) {
            out.add_term(word, f);
        }
        Ok(out)
    }

    pub fn algebra(&self) -> &Arc<JetAlgebra> {
        &self.alg
    }

    pub fn form_cap(&self) -> u32 {
        self.form_cap
    }

    pub fn with_form_cap(&self, form_cap: u32) -> Result<Form> {
        if self.terms.keys().any(|w| w.total() > form_cap) {
            return Err(Error::CapExceeded(alloc::format!("form does not fit form cap {form_cap}")));
        }
        Ok(Form { alg: self.alg.clone(), form_cap, terms: self.terms.clone() })
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Series)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, word: &Monomial) -> Series {
        self.terms.get(word).cloned().unwrap_or_else(|| Series::zero(&self.alg))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Monomial, f: Series) {
        if f.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(f);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &f;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Form degree |ω| when all words have the same length.
    pub fn form_degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(Monomial::total);
        let first = it.next().unwrap_or(0);
        it.all(|k| k == first).then_some(first)
    }

    /// Z₂ⁿ-degree when homogeneous.
    pub fn degree(&self) -> Option<Degree> {
        let coords = self.alg.coords();
        let mut found = None;
        for (w, f) in &self.terms {
            let d = f.degree()? + word_degree(w, coords);
            match found {
                None => found = Some(d),
                Some(h) if h != d => return None,
                _ => {}
            }
        }
        Some(found.unwrap_or_else(|| Degree::zero(self.alg.n())))
    }

    /// Smallest 𝒥-order among the coefficients; `None` for zero.
    pub fn j_order(&self) -> Option<u32> {
        self.terms.values().filter_map(Series::j_order).min()
    }

    fn check(&self, other: &Form) -> Result<()> {
        if same_algebra(&self.alg, &other.alg) { Ok(()) } else { Err(Error::AlgebraMismatch) }
    }

    pub fn checked_add(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let mut out = self.clone();
        out.form_cap = self.form_cap.max(other.form_cap);
        for (w, f) in &other.terms {
            out.add_term(w.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Form) -> Result<Form> {
        self.checked_add(&-other)
    }

    pub fn scale(&self, c: &Rational) -> Form {
        let mut out = Form::zero(&self.alg, self.form_cap);
        for (w, f) in &self.terms {
            out.add_term(w.clone(), f.scale(c));
        }
        out
    }

    /// Coefficients truncated to total degree ≤ k.
    pub fn truncated(&self, k: u32) -> Form {
        let mut out = Form::zero(&self.alg, self.form_cap);
        for (w, f) in &self.terms {
            out.add_term(w.clone(), f.truncated(k));
        }
        out
    }

    /// α ∧ β. The coefficient of α moves right past the word of β at
    /// (−1)^⟨deg coefficient, deg word⟩, then the words merge.
    pub fn wedge(&self, other: &Form) -> Result<Form> {
        self.check(other)?;
        let coords = self.alg.coords();
        let form_cap = self.form_cap.max(other.form_cap);
        let mut out = Form::zero(&self.alg, form_cap);
        for (w1, f1) in &self.terms {
            let parts = f1.components();
            for (w2, f2) in &other.terms {
                let Some((w, parity)) = word_mul(w1, w2, coords) else { continue };
                if w.total() > form_cap {
                    return Err(Error::CapExceeded(alloc::format!("wedge reaches form degree {} above form cap {form_cap}", w.total())));
                }
                let d2 = word_degree(w2, coords);
                let mut coeff = Series::zero(&self.alg);
                for (g, part) in &parts {
                    let prod = part * f2;
                    coeff = if (g.pairing(&d2) as u8 + parity) % 2 == 1 { &coeff - &prod } else { &coeff + &prod };
                }
                out.add_term(w, coeff);
            }
        }
        Ok(out)
    }

    /// d(word·f) = (−1)^{|word|} word ∧ df.
    pub fn exterior_derivative(&self) -> Result<Form> {
        let coords = self.alg.coords();
        let mut out = Form::zero(&self.alg, self.form_cap);
        for (w, f) in &self.terms {
            for i in 0..self.alg.len() {
                let df = f.partial(i);
                if df.is_zero() {
                    continue;
                }
                let Some((word, parity)) = word_mul(w, &Monomial::var(self.alg.len(), i), coords) else { continue };
                if word.total() > self.form_cap {
                    return Err(Error::CapExceeded(alloc::format!("d reaches form degree {} above form cap {}", word.total(), self.form_cap)));
                }
                let neg = (w.total() + parity as u32) % 2 == 1;
                out.add_term(word, if neg { -df } else { df });
            }
        }
        Ok(out)
    }

    /// Pullback along Φ: replaces each dv by d(Φ*v) and the coefficient by
    /// its pullback.
    pub fn pullback(&self, phi: &Morphism) -> Result<Form> {
        if !same_algebra(&self.alg, phi.target()) {
            return Err(Error::AlgebraMismatch);
        }
        let src = phi.source();
        let diffs: Vec<Form> =
            phi.pullbacks().iter().map(|p| differential_with_cap(p, self.form_cap)).collect::<Result<_>>()?;
        let mut out = Form::zero(src, self.form_cap);
        for (w, f) in &self.terms {
            let mut acc = Form::function_with_cap(&Series::one(src), self.form_cap);
            for (b, &e) in w.exponents().iter().enumerate() {
                for _ in 0..e {
                    acc = acc.wedge(&diffs[b])?;
                }
            }
            acc = acc.wedge(&Form::function_with_cap(&phi.pullback(f)?, self.form_cap))?;
            out = out.checked_add(&acc)?;
        }
        Ok(out)
    }

    /// Zero-section restriction along η: drops every term containing dη and
    /// sets η = 0 in the coefficients.
    pub fn restrict_zero(&self, eta: usize) -> Form {
        let mut out = Form::zero(&self.alg, self.form_cap);
        for (w, f) in &self.terms {
            if w.exponent(eta) == 0 {
                out.add_term(w.clone(), f.set_zero(eta));
            }
        }
        out
    }

    /// Homotopy operator along an even coordinate η of nonzero degree.
    ///
    /// Terms without dη map to zero. A term σ∧dη·f (after moving dη to the
    /// end of its word) maps to σ·F with F the antiderivative of f in η
    /// vanishing at η = 0. Coefficients must leave one order of headroom
    /// below the cap.
    pub fn homotopy_k(&self, eta: usize) -> Result<Form> {
        let coords = self.alg.coords();
        if eta >= coords.len() {
            return Err(Error::Argument(alloc::format!("coordinate index {eta} out of range")));
        }
        let d_eta = coords.degree(eta);
        if d_eta.is_zero() || d_eta.is_odd() {
            return Err(Error::UnsupportedVariable(coords.name(eta).into()));
        }
        let cap = self.alg.cap();
        let mut out = Form::zero(&self.alg, self.form_cap);
        for (w, f) in &self.terms {
            if w.exponent(eta) == 0 {
                continue;
            }
            if f.max_total() == Some(cap) {
                return Err(Error::CapExceeded(alloc::format!("antiderivative in {} needs total degree {}", coords.name(eta), cap + 1)));
            }
            let mut parity = 0u32;
            for b in eta + 1..coords.len() {
                let e = w.exponent(b);
                if e != 0 {
                    parity += e * (d_eta.pairing(&coords.degree(b)) as u32 + 1);
                }
            }
            let big_f = f.antiderivative(eta);
            out.add_term(w.with_exponent(eta, 0), if parity % 2 == 1 { -big_f } else { big_f });
        }
        Ok(out)
    }
}

impl core::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form { alg: self.alg.clone(), form_cap: self.form_cap, terms: self.terms.iter().map(|(w, f)| (w.clone(), -f)).collect() }
    }
}

/// df = Σ duⁱ·∂_{uⁱ} f, with form cap equal to the algebra's cap.
pub fn differential(f: &Series) -> Form {
    differential_with_cap(f, f.algebra().cap().max(1)).expect("form cap at least one")
}

pub fn differential_with_cap(f: &Series, form_cap: u32) -> Result<Form> {
    Form::function_with_cap(f, form_cap).exterior_derivative()
}

fn fmt_word(w: &Monomial, coords: &CoordinateSystem, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, &e) in w.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        if !first {
            f.write_str("*")?;
        }
        first = false;
        write!(f, "d{}", coords.name(i))?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

/// Canonical text: terms ordered by word, `dx*dz*coef` when the coefficient
/// is a single term, `dx*dz*(…)` otherwise; 0-form parts print as series.
impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let coords = self.alg.coords();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if w.is_one() {
                write!(f, "{c}")?;
                continue;
            }
            let single = c.len() == 1;
            let neg = single && c.terms().next().is_some_and(|(_, v)| v.is_negative());
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            fmt_word(w, coords, f)?;
            if single {
                let (m, v) = c.terms().next().expect("one term");
                let a = v.abs();
                if !a.is_one() {
                    write!(f, "*{}", fmt_rational(&a))?;
                }
                if !m.is_one() {
                    f.write_str("*")?;
                    crate::series::fmt_monomial(m, coords, f)?;
                }
            } else {
                write!(f, "*({c})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Form({self})")
    }
}
