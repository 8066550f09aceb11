//! Local structure of morphisms: inverse function theorem, immersion and
//! submersion normal forms, constant-rank factorization.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grading::{CoordinateSystem, Degree};
use crate::matrix::{QMatrix, RankProfile};
use crate::morphism::{compose, pair_morphism, product_domain, Domain, Morphism};
use crate::series::{JetAlgebra, Monomial, Series};
use num_traits::Zero;

/// A morphism together with its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordinateChange {
    pub forward: Morphism,
    pub inverse: Morphism,
}

impl CoordinateChange {
    pub fn new(forward: Morphism) -> Result<Self> {
        let inverse = invert_morphism(&forward)?;
        Ok(Self { forward, inverse })
    }
}

/// Inverse of a morphism whose tangent blocks are all invertible.
///
/// Writing φ*(v) = L·u + H(u) with L linear, the inverse pullback G solves
/// G = L⁻¹(v − H(G)); each fixed-point pass fixes one more total degree.
pub fn invert_morphism(phi: &Morphism) -> Result<Morphism> {
    let (src, tgt) = (phi.source(), phi.target());
    if src.coords().counts() != tgt.coords().counts() {
        return Err(Error::DimensionsDiffer);
    }
    let tm = phi.tangent_map();
    for (d, b) in tm.degrees.iter().zip(&tm.blocks) {
        if b.rank() != b.rows() {
            return Err(Error::NotLocallyInvertible(*d));
        }
    }
    let n = src.len();
    let mut lin = QMatrix::zeros(n, n);
    let mut higher = Vec::with_capacity(n);
    for (i, img) in phi.pullbacks().iter().enumerate() {
        let mut h = img.clone();
        for j in 0..n {
            let m = Monomial::var(n, j);
            let c = img.coefficient(&m);
            if !c.is_zero() {
                h.add_term(m, -c.clone());
                lin[(i, j)] = c;
            }
        }
        higher.push(h);
    }
    let lin_inv = lin.inverse().ok_or(Error::Internal("linear part singular".into()))?;
    let apply_inv = |rhs: &[Series]| -> Vec<Series> {
        (0..n)
            .map(|j| {
                let mut acc = Series::zero(tgt);
                for (i, r) in rhs.iter().enumerate() {
                    let c = &lin_inv[(j, i)];
                    if !c.is_zero() {
                        acc = &acc + &r.scale(c);
                    }
                }
                acc
            })
            .collect()
    };
    let v: Vec<Series> = (0..n).map(|i| Series::coordinate(tgt, i)).collect();
    let mut g = apply_inv(&v);
    for _ in 0..src.cap() {
        let rhs: Vec<Series> =
            v.iter().zip(&higher).map(|(vi, hi)| hi.substitute_in(tgt, &g).map(|h| vi - &h)).collect::<Result<_>>()?;
        let next = apply_inv(&rhs);
        if next == g {
            break;
        }
        g = next;
    }
    let inv = Morphism::new(tgt, src, g)?;
    if compose(&inv, phi)? != Morphism::identity(tgt) || compose(phi, &inv)? != Morphism::identity(src) {
        return Err(Error::Internal("inverse failed verification".into()));
    }
    Ok(inv)
}

fn complement(len: usize, chosen: &[usize]) -> Vec<usize> {
    (0..len).filter(|i| !chosen.contains(i)).collect()
}

/// Domain whose coordinates are the given coordinates of `dom`.
fn sub_domain(dom: &Domain, indices: &[usize]) -> Result<Domain> {
    let cs = dom.coords();
    let coords = indices.iter().map(|&i| (String::from(cs.name(i)), cs.degree(i))).collect();
    Ok(JetAlgebra::new(CoordinateSystem::new(dom.n(), coords)?, dom.cap()))
}

/// Projection `dom → sub_domain(dom, indices)`.
fn coordinate_projection(dom: &Domain, indices: &[usize]) -> Result<Morphism> {
    let sub = sub_domain(dom, indices)?;
    let pullbacks = indices.iter().map(|&i| Series::coordinate(dom, i)).collect();
    Morphism::new(dom, &sub, pullbacks)
}

/// Per-degree pivot selection on the tangent blocks, mapped back to
/// coordinate indices. `by_rows` selects independent rows (target
/// coordinates), otherwise independent columns (source coordinates).
fn select_pivots(phi: &Morphism, by_rows: bool) -> Vec<usize> {
    let tm = phi.tangent_map();
    let cs = if by_rows { phi.target().coords() } else { phi.source().coords() };
    let mut out = Vec::new();
    for (d, b) in tm.degrees.iter().zip(&tm.blocks) {
        let base = cs.indices_of_degree(d).start;
        let local = if by_rows { b.independent_rows() } else { b.independent_columns() };
        out.extend(local.into_iter().map(|k| base + k));
    }
    out
}

fn dims_le(a: &CoordinateSystem, b: &CoordinateSystem) -> bool {
    a.counts().iter().zip(b.counts()).all(|(x, y)| x <= y)
}

/// Result of [`submersion_normal_form`]: in the coordinates given by τ,
/// φ becomes the projection V × E → V.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmersionNormalForm {
    /// τ: U → V × E, with its inverse.
    pub tau: CoordinateChange,
    /// Source coordinates kept by the projection (one invertible minor per
    /// degree block); the remaining source coordinates span E.
    pub pivot_columns: Vec<usize>,
    /// φ∘τ⁻¹, equal to the projection onto V.
    pub certificate: Morphism,
}

pub fn submersion_normal_form(phi: &Morphism) -> Result<SubmersionNormalForm> {
    if !dims_le(phi.target().coords(), phi.source().coords()) {
        return Err(Error::DimensionOrder);
    }
    if !phi.tangent_map().is_surjective() {
        return Err(Error::NotSubmersion);
    }
    let src = phi.source();
    let pivot_columns = select_pivots(phi, false);
    let rest = complement(src.len(), &pivot_columns);
    let to_e = coordinate_projection(src, &rest)?;
    let psi = pair_morphism(phi, &to_e)?;
    let tau = CoordinateChange::new(psi)?;
    let certificate = compose(&tau.inverse, phi)?;
    let (_, proj, _) = product_domain(phi.target(), to_e.target())?;
    if certificate != proj {
        return Err(Error::Internal("submersion certificate failed".into()));
    }
    Ok(SubmersionNormalForm { tau, pivot_columns, certificate })
}

/// Result of [`immersion_normal_form`]: after σ, φ becomes the inclusion
/// U → U × E, u ↦ (u, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImmersionNormalForm {
    /// σ: V → U × E, with its inverse.
    pub sigma: CoordinateChange,
    /// Target coordinates matched with the source (one invertible minor per
    /// degree block); the remaining target coordinates span E.
    pub pivot_rows: Vec<usize>,
    /// σ∘φ, equal to the inclusion.
    pub certificate: Morphism,
}

pub fn immersion_normal_form(phi: &Morphism) -> Result<ImmersionNormalForm> {
    if !dims_le(phi.source().coords(), phi.target().coords()) {
        return Err(Error::DimensionOrder);
    }
    if !phi.tangent_map().is_injective() {
        return Err(Error::NotImmersion);
    }
    let (src, tgt) = (phi.source(), phi.target());
    let pivot_rows = select_pivots(phi, true);
    let rest = complement(tgt.len(), &pivot_rows);
    let e = sub_domain(tgt, &rest)?;
    let (prod, pi_u, pi_e) = product_domain(src, &e)?;
    let mut pullbacks = Vec::with_capacity(tgt.len());
    for (i, img) in phi.pullbacks().iter().enumerate() {
        let mut p = pi_u.pullback(img)?;
        if let Some(k) = rest.iter().position(|&r| r == i) {
            p = &p + &pi_e.pullbacks()[k];
        }
        pullbacks.push(p);
    }
    let extended = Morphism::new(&prod, tgt, pullbacks)?;
    let inv = invert_morphism(&extended)?;
    let sigma = CoordinateChange { forward: inv, inverse: extended };
    let certificate = compose(phi, &sigma.forward)?;
    let mut incl = alloc::vec![Series::zero(src); prod.len()];
    for (k, img) in pi_u.pullbacks().iter().enumerate() {
        let idx = img.terms().next().and_then(|(m, _)| m.exponents().iter().position(|&x| x == 1)).expect("coordinate");
        incl[idx] = Series::coordinate(src, k);
    }
    if certificate != Morphism::new(src, &prod, incl)? {
        return Err(Error::Internal("immersion certificate failed".into()));
    }
    Ok(ImmersionNormalForm { sigma, pivot_rows, certificate })
}

/// φ = φ₂∘φ₁ with φ₁: U → W a submersion and φ₂: W → V an immersion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantRankFactorization {
    pub profile: RankProfile,
    pub w: Domain,
    pub phi1: Morphism,
    pub phi2: Morphism,
    /// Section ψ: W → U of φ₁ with φ₂ = φ∘ψ.
    pub section: Morphism,
    /// Target coordinates whose pullbacks define φ₁.
    pub selected_rows: Vec<usize>,
    /// Source coordinates of the invertible minor.
    pub selected_cols: Vec<usize>,
}

/// Factorization through W = ℝ^{r|s}. Returns `Ok(None)` when the graded
/// Jacobian is not of constant rank.
pub fn constant_rank_factor(phi: &Morphism) -> Result<Option<ConstantRankFactorization>> {
    let Some(cr) = phi.jacobian().constant_rank_decompose()? else { return Ok(None) };
    let (src, tgt) = (phi.source(), phi.target());
    let mut selected_rows: Vec<usize> = cr.pivots.iter().map(|&(i, _)| i).collect();
    let mut selected_cols: Vec<usize> = cr.pivots.iter().map(|&(_, j)| j).collect();
    selected_rows.sort_unstable();
    selected_cols.sort_unstable();
    let w = sub_domain(tgt, &selected_rows)?;
    // sub_domain keeps the order of `selected_rows`, which is already grouped by degree.
    let phi1_pullbacks = selected_rows.iter().map(|&i| phi.pullbacks()[i].clone()).collect();
    let phi1 = Morphism::new(src, &w, phi1_pullbacks)?;
    let rest = complement(src.len(), &selected_cols);
    let to_e = coordinate_projection(src, &rest)?;
    let big = pair_morphism(&phi1, &to_e)?;
    let big_inv = invert_morphism(&big)?;
    let (prod, pi_w, _) = product_domain(&w, to_e.target())?;
    let mut incl = alloc::vec![Series::zero(&w); prod.len()];
    for (k, img) in pi_w.pullbacks().iter().enumerate() {
        let idx = img.terms().next().and_then(|(m, _)| m.exponents().iter().position(|&x| x == 1)).expect("coordinate");
        incl[idx] = Series::coordinate(&w, k);
    }
    let iota = Morphism::new(&w, &prod, incl)?;
    let section = compose(&iota, &big_inv)?;
    let phi2 = compose(&section, phi)?;
    if compose(&phi1, &phi2)? != *phi {
        return Err(Error::Internal("constant-rank certificate failed".into()));
    }
    Ok(Some(ConstantRankFactorization { profile: cr.profile, w, phi1, phi2, section, selected_rows, selected_cols }))
}

/// Degrees of a domain's coordinates.
pub fn coordinate_degrees(dom: &Domain) -> Vec<Degree> {
    dom.coords().coords().iter().map(|c| c.degree).collect()
}
