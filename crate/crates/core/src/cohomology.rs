//! Weight-graded de Rham cohomology and explicit potentials.
//!
//! Every coordinate and every differential generator has weight 1, so d
//! preserves weight and the complex splits into finite pieces (k, w) that
//! are handled by exact elimination over ℚ.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::Form;
use crate::grading::CoordinateSystem;
use crate::matrix::QMatrix;
use crate::morphism::Domain;
use crate::series::{JetAlgebra, Monomial, Series};
use crate::Rational;

/// Exponent vectors of the given total, with entries bounded by `bound(i)`.
fn exponent_vectors(len: usize, total: u32, bound: &dyn Fn(usize) -> u32) -> Vec<Monomial> {
    fn go(i: usize, left: u32, cur: &mut Vec<u32>, bound: &dyn Fn(usize) -> u32, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            if left == 0 {
                out.push(Monomial::from_exponents(cur.clone()));
            }
            return;
        }
        for e in 0..=left.min(bound(i)) {
            cur[i] = e;
            go(i + 1, left - e, cur, bound, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    go(0, total, &mut vec![0; len], bound, &mut out);
    out.sort();
    out
}

/// Words of form degree k.
fn words(coords: &CoordinateSystem, k: u32) -> Vec<Monomial> {
    exponent_vectors(coords.len(), k, &|i| if coords.is_odd(i) { u32::MAX } else { 1 })
}

/// Nonvanishing coefficient monomials of total degree t.
fn monomials(coords: &CoordinateSystem, t: u32) -> Vec<Monomial> {
    exponent_vectors(coords.len(), t, &|i| if coords.is_odd(i) { 1 } else { u32::MAX })
}

/// Basis of the (k, w) piece: pairs (word, coefficient monomial).
struct Piece {
    basis: Vec<(Monomial, Monomial)>,
    index: BTreeMap<(Monomial, Monomial), usize>,
}

impl Piece {
    fn new(coords: &CoordinateSystem, k: u32, w: u32) -> Self {
        let mut basis = Vec::new();
        if k <= w {
            for word in words(coords, k) {
                for m in monomials(coords, w - k) {
                    basis.push((word.clone(), m));
                }
            }
        }
        let index = basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        Self { basis, index }
    }

    fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a form lying in this piece.
    fn vector(&self, form: &Form) -> Result<Vec<Rational>> {
        let mut v = vec![Rational::zero(); self.dim()];
        for (word, f) in form.terms() {
            for (m, c) in f.terms() {
                let i = self.index.get(&(word.clone(), m.clone())).ok_or_else(|| Error::Internal("term outside its weight piece".into()))?;
                v[*i] = c.clone();
            }
        }
        Ok(v)
    }

    fn form(&self, alg: &Arc<JetAlgebra>, form_cap: u32, v: &[Rational]) -> Result<Form> {
        let mut out = Form::zero(alg, form_cap);
        for ((word, m), c) in self.basis.iter().zip(v) {
            if !c.is_zero() {
                out = out.checked_add(&Form::word(alg, form_cap, word.clone(), Series::monomial(alg, m.clone(), c.clone())?)?)?;
            }
        }
        Ok(out)
    }
}

/// Matrix of d from piece (k, w) to piece (k+1, w).
fn d_matrix(alg: &Arc<JetAlgebra>, form_cap: u32, from: &Piece, to: &Piece) -> Result<QMatrix> {
    let mut m = QMatrix::zeros(to.dim(), from.dim());
    for (j, (word, mono)) in from.basis.iter().enumerate() {
        let f = Form::word(alg, form_cap, word.clone(), Series::monomial(alg, mono.clone(), Rational::one())?)?;
        let col = to.vector(&f.exterior_derivative()?)?;
        for (i, c) in col.into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

/// dim H^k_w for one (k, w) cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CohomologyCell {
    pub k: u32,
    pub w: u32,
    pub dim: usize,
}

/// Cohomology dimensions for 0 ≤ k ≤ k_max, 0 ≤ w ≤ w_max, row-major in k.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeRhamTable {
    pub k_max: u32,
    pub w_max: u32,
    pub cells: Vec<CohomologyCell>,
}

impl DeRhamTable {
    /// Σ_w dim H^k_w.
    pub fn total(&self, k: u32) -> usize {
        self.cells.iter().filter(|c| c.k == k).map(|c| c.dim).sum()
    }
}

/// Weight-graded de Rham cohomology of the domain's coordinates. The
/// domain's own cap is not used: the computation runs in an algebra whose
/// cap is `w_max`, so each weight piece is represented without truncation.
pub fn derham_ranks(dom: &Domain, k_max: u32, w_max: u32) -> Result<DeRhamTable> {
    let alg = dom.with_cap(w_max);
    let coords = alg.coords();
    let form_cap = k_max + 1;
    let mut cells = Vec::new();
    let mut per_w: Vec<Vec<usize>> = Vec::new();
    for w in 0..=w_max {
        let pieces: Vec<Piece> = (0..=k_max + 1).map(|k| Piece::new(coords, k, w)).collect();
        let ranks = (0..=k_max).map(|k| Ok(d_matrix(&alg, form_cap, &pieces[k as usize], &pieces[k as usize + 1])?.rank())).collect::<Result<Vec<_>>>()?;
        let dims = (0..=k_max)
            .map(|k| {
                let prev = if k == 0 { 0 } else { ranks[k as usize - 1] };
                pieces[k as usize].dim() - ranks[k as usize] - prev
            })
            .collect();
        per_w.push(dims);
    }
    for k in 0..=k_max {
        for w in 0..=w_max {
            cells.push(CohomologyCell { k, w, dim: per_w[w as usize][k as usize] });
        }
    }
    Ok(DeRhamTable { k_max, w_max, cells })
}

/// A form η with dη = ω, found by exact solving in each weight piece with
/// free variables set to zero.
pub fn find_potential(omega: &Form) -> Result<Form> {
    let alg = omega.algebra();
    let coords = alg.coords();
    if !omega.exterior_derivative()?.is_zero() {
        return Err(Error::NotClosed);
    }
    let mut parts: BTreeMap<(u32, u32), Form> = BTreeMap::new();
    for (word, f) in omega.terms() {
        if word.total() == 0 {
            return Err(Error::NoPotential);
        }
        for (m, c) in f.terms() {
            if m.total() == alg.cap() {
                return Err(Error::CapExceeded(alloc::format!("potential needs coefficients of total degree {}", alg.cap() + 1)));
            }
            let key = (word.total(), word.total() + m.total());
            let term = Form::word(alg, omega.form_cap(), word.clone(), Series::monomial(alg, m.clone(), c.clone())?)?;
            let entry = parts.entry(key).or_insert_with(|| Form::zero(alg, omega.form_cap()));
            *entry = entry.checked_add(&term)?;
        }
    }
    let mut eta = Form::zero(alg, omega.form_cap());
    for ((k, w), part) in &parts {
        let from = Piece::new(coords, k - 1, *w);
        let to = Piece::new(coords, *k, *w);
        let m = d_matrix(alg, omega.form_cap(), &from, &to)?;
        let x = m.solve(&to.vector(part)?).ok_or(Error::NoPotential)?;
        eta = eta.checked_add(&from.form(alg, omega.form_cap(), &x)?)?;
    }
    if eta.exterior_derivative()? != *omega {
        return Err(Error::Internal("potential failed verification".into()));
    }
    Ok(eta)
}
