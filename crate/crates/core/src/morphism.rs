//! Morphisms of formal superdomains, given by their coordinate pullbacks.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::grading::{CoordinateSystem, Degree};
use crate::matrix::{scalar_rank, GradedMatrix, QMatrix, RankProfile};
use crate::series::{check_images, same_algebra, substitute_unchecked, JetAlgebra, Series};

/// A formal superdomain at the origin, truncated at the algebra's cap.
pub type Domain = Arc<JetAlgebra>;

/// A basepoint-preserving morphism `source → target`: one homogeneous
/// pullback per target coordinate, each a series over the source.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    source: Domain,
    target: Domain,
    pullbacks: Vec<Series>,
}

fn check_compatible(a: &Domain, b: &Domain) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch { left: a.n() as usize, right: b.n() as usize });
    }
    if a.cap() != b.cap() {
        return Err(Error::Argument(alloc::format!("cap mismatch: {} vs {}", a.cap(), b.cap())));
    }
    Ok(())
}

impl Morphism {
    pub fn new(source: &Domain, target: &Domain, pullbacks: Vec<Series>) -> Result<Self> {
        check_compatible(source, target)?;
        if pullbacks.len() != target.len() {
            return Err(Error::Arity { expected: target.len(), found: pullbacks.len() });
        }
        check_images(target.coords(), source, &pullbacks)?;
        Ok(Self { source: source.clone(), target: target.clone(), pullbacks })
    }

    pub fn identity(dom: &Domain) -> Self {
        let pullbacks = (0..dom.len()).map(|i| Series::coordinate(dom, i)).collect();
        Self { source: dom.clone(), target: dom.clone(), pullbacks }
    }

    pub fn source(&self) -> &Domain {
        &self.source
    }

    pub fn target(&self) -> &Domain {
        &self.target
    }

    pub fn pullbacks(&self) -> &[Series] {
        &self.pullbacks
    }

    /// φ*(f) for a series f over the target.
    pub fn pullback(&self, f: &Series) -> Result<Series> {
        if !same_algebra(f.algebra(), &self.target) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(substitute_unchecked(f, &self.pullbacks, &self.source))
    }

    /// `phi ∘ self`: first `self`, then `phi`. Pullbacks are
    /// (φ∘ψ)* = ψ*∘φ*.
    pub fn then(&self, phi: &Morphism) -> Result<Morphism> {
        compose(self, phi)
    }

    /// Graded Jacobian: entry (i, j) is (−1)^⟨deg vⁱ + deg uʲ, deg vⁱ⟩·∂_{uʲ}ψ*(vⁱ),
    /// rows indexed by target coordinates vⁱ, columns by source coordinates uʲ.
    pub fn jacobian(&self) -> GradedMatrix {
        let src = self.source.coords();
        let tgt = self.target.coords();
        let rows: Vec<Degree> = (0..tgt.len()).map(|i| tgt.degree(i)).collect();
        let cols: Vec<Degree> = (0..src.len()).map(|j| src.degree(j)).collect();
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for (i, v) in rows.iter().enumerate() {
            for (j, u) in cols.iter().enumerate() {
                let d = self.pullbacks[i].partial(j);
                entries.push(if (*v + *u).pairing(v) == 1 { -d } else { d });
            }
        }
        GradedMatrix::new(&self.source, rows, cols, entries).expect("shapes agree by construction")
    }

    pub fn tangent_map(&self) -> TangentMap {
        let blocks = self.jacobian().diagonal_blocks();
        TangentMap { degrees: blocks.iter().map(|(d, _)| *d).collect(), blocks: blocks.into_iter().map(|(_, b)| b).collect() }
    }

    pub fn classify(&self) -> Classification {
        self.tangent_map().classify()
    }

    /// ∂_c ψ*(f) − Σ_b ∂_c ψ*(v^b)·ψ*(∂_{v^b} f), truncated below the cap.
    pub fn chain_rule_residual(&self, f: &Series, c: usize) -> Result<Series> {
        if c >= self.source.len() {
            return Err(Error::Argument(alloc::format!("source coordinate index {c} out of range")));
        }
        let lhs = self.pullback(f)?.partial(c);
        let mut rhs = Series::zero(&self.source);
        for (b, img) in self.pullbacks.iter().enumerate() {
            let term = &img.partial(c) * &self.pullback(&f.partial(b))?;
            rhs = &rhs + &term;
        }
        Ok((&lhs - &rhs).truncated(self.source.cap().saturating_sub(1)))
    }
}

/// `phi ∘ psi` for ψ: M → N and φ: N → S.
pub fn compose(psi: &Morphism, phi: &Morphism) -> Result<Morphism> {
    if !same_algebra(&psi.target, &phi.source) {
        return Err(Error::DomainMismatch);
    }
    let pullbacks = phi.pullbacks.iter().map(|f| substitute_unchecked(f, &psi.pullbacks, &psi.source)).collect();
    Ok(Morphism { source: psi.source.clone(), target: phi.target.clone(), pullbacks })
}

/// Compares Jac(φ∘ψ) with ψ*(Jac φ)·Jac ψ below the cap. Returns the
/// equality flag and the truncated difference.
pub fn jacobian_multiplicativity_check(psi: &Morphism, phi: &Morphism) -> Result<(bool, GradedMatrix)> {
    let comp = compose(psi, phi)?;
    let outer = phi.jacobian().map(|e| psi.pullback(e))?;
    let outer = if outer.nrows() * outer.ncols() == 0 {
        GradedMatrix::zeros(&psi.source, outer.row_degrees().to_vec(), outer.col_degrees().to_vec())
    } else {
        outer
    };
    let rhs = outer.matmul(&psi.jacobian())?;
    let diff = comp.jacobian().sub(&rhs)?.truncated(psi.source.cap().saturating_sub(1));
    Ok((diff.is_zero(), diff))
}

/// Product M₁ × M₂ with its two projections. Coordinates are concatenated
/// and regrouped by degree; a name already used is suffixed with `'`.
pub fn product_domain(m1: &Domain, m2: &Domain) -> Result<(Domain, Morphism, Morphism)> {
    check_compatible(m1, m2)?;
    let mut names: Vec<String> = Vec::new();
    let mut entries = Vec::new();
    for c in m1.coords().coords().iter().chain(m2.coords().coords()) {
        let mut name = c.name.clone();
        while names.contains(&name) {
            name.push('\'');
        }
        names.push(name.clone());
        entries.push((name, c.degree));
    }
    let prod = JetAlgebra::new(CoordinateSystem::new(m1.n(), entries)?, m1.cap());
    let coord = |k: usize| {
        let i = prod.coords().index_of(&names[k]).expect("name registered");
        Series::coordinate(&prod, i)
    };
    let pi1 = Morphism { source: prod.clone(), target: m1.clone(), pullbacks: (0..m1.len()).map(coord).collect() };
    let pi2 = Morphism { source: prod.clone(), target: m2.clone(), pullbacks: (m1.len()..m1.len() + m2.len()).map(coord).collect() };
    Ok((prod, pi1, pi2))
}

/// The morphism h: N → M₁ × M₂ with π₁∘h = f₁ and π₂∘h = f₂.
pub fn pair_morphism(f1: &Morphism, f2: &Morphism) -> Result<Morphism> {
    if !same_algebra(&f1.source, &f2.source) {
        return Err(Error::DomainMismatch);
    }
    let (prod, pi1, pi2) = product_domain(&f1.target, &f2.target)?;
    let mut pullbacks = alloc::vec![Series::zero(&f1.source); prod.len()];
    for (pi, f) in [(&pi1, f1), (&pi2, f2)] {
        for (k, img) in pi.pullbacks.iter().enumerate() {
            let idx = img.terms().next().map(|(m, _)| m.exponents().iter().position(|&e| e == 1).expect("coordinate"));
            pullbacks[idx.expect("coordinate image")] = f.pullbacks[k].clone();
        }
    }
    Ok(Morphism { source: f1.source.clone(), target: prod, pullbacks })
}

/// Tangent map at the basepoint: one scalar block per degree, in standard
/// order, rows indexed by target coordinates of that degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TangentMap {
    pub degrees: Vec<Degree>,
    pub blocks: Vec<QMatrix>,
}

/// Local type of a morphism at the basepoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PointKind {
    DiffeoCandidate,
    Immersion,
    Submersion,
    None,
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointKind::DiffeoCandidate => "diffeo-candidate",
            PointKind::Immersion => "immersion",
            PointKind::Submersion => "submersion",
            PointKind::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub kind: PointKind,
    pub rank: RankProfile,
}

impl TangentMap {
    pub fn rank(&self) -> RankProfile {
        scalar_rank(&self.blocks)
    }

    pub fn is_injective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.cols())
    }

    pub fn is_surjective(&self) -> bool {
        self.blocks.iter().all(|b| b.rank() == b.rows())
    }

    pub fn classify(&self) -> Classification {
        let kind = match (self.is_injective(), self.is_surjective()) {
            (true, true) => PointKind::DiffeoCandidate,
            (true, false) => PointKind::Immersion,
            (false, true) => PointKind::Submersion,
            (false, false) => PointKind::None,
        };
        Classification { kind, rank: self.rank() }
    }

    /// Blockwise product `self · inner`, i.e. the tangent map of the
    /// composite when `inner` is applied first.
    pub fn after(&self, inner: &TangentMap) -> Result<TangentMap> {
        if self.degrees != inner.degrees {
            return Err(Error::Shape);
        }
        let blocks = self.blocks.iter().zip(&inner.blocks).map(|(a, b)| a.mul(b)).collect::<Result<_>>()?;
        Ok(TangentMap { degrees: self.degrees.clone(), blocks })
    }
}

impl fmt::Display for TangentMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (d, b)) in self.degrees.iter().zip(&self.blocks).enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "B{d} = {b:?}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{ ")?;
        for (i, img) in self.pullbacks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ; ")?;
            }
            write!(f, "{} := {}", self.target.coords().name(i), img)?;
        }
        f.write_str(" }")
    }
}
