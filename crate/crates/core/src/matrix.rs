//! Graded matrices over jet algebras and plain matrices over ℚ.
//!
//! A [`GradedMatrix`] carries a degree per row and per column. It has
//! degree zero when entry (i, j) is homogeneous of degree rᵢ + cⱼ; products
//! of such matrices are plain ring products, the sign bookkeeping already
//! lives inside the entries.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grading::Degree;
use crate::series::{same_algebra, JetAlgebra, Series};
use crate::Rational;

/// Dense matrix over ℚ.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape);
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &QMatrix) -> Result<QMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape);
        }
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else { continue };
            m.swap_rows(r, p);
            let inv = m[(r, c)].recip();
            for j in c..m.cols {
                m[(r, j)] = &m[(r, j)] * &inv;
            }
            for i in 0..m.rows {
                if i != r && !m[(i, c)].is_zero() {
                    let f = m[(i, c)].clone();
                    for j in c..m.cols {
                        let delta = &f * &m[(r, j)];
                        m[(i, j)] = &m[(i, j)] - delta;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Indices of a maximal set of linearly independent columns (the pivot
    /// columns of the row echelon form, lowest indices first).
    pub fn independent_columns(&self) -> Vec<usize> {
        self.rref().1
    }

    pub fn independent_rows(&self) -> Vec<usize> {
        self.transpose().rref().1
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// One solution of `self · x = b` (free variables set to zero), if any.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        debug_assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Rational::zero(); self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red[(r, self.cols)].clone();
        }
        Some(x)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> QMatrix {
        let mut out = QMatrix::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)].clone();
            }
        }
        out
    }
}

impl core::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&crate::series::fmt_rational(&self[(i, j)]))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Graded rank r|s₁,…,s_N.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankProfile {
    pub r: usize,
    pub s: Vec<usize>,
}

impl RankProfile {
    /// Per-degree ranks in standard order (entry 0 is r).
    pub fn per_degree(&self) -> Vec<usize> {
        let mut v = vec![self.r];
        v.extend_from_slice(&self.s);
        v
    }

    pub fn from_per_degree(v: &[usize]) -> Self {
        Self { r: v[0], s: v[1..].to_vec() }
    }
}

impl fmt::Display for RankProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|", self.r)?;
        for (i, s) in self.s.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Rank of a block-diagonal scalar matrix given by its diagonal blocks in
/// standard degree order. Empty blocks have rank 0.
pub fn scalar_rank(blocks: &[QMatrix]) -> RankProfile {
    let ranks: Vec<usize> = blocks.iter().map(QMatrix::rank).collect();
    RankProfile::from_per_degree(&ranks)
}

/// A matrix of series with row and column degrees.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedMatrix {
    alg: Arc<JetAlgebra>,
    row_degrees: Vec<Degree>,
    col_degrees: Vec<Degree>,
    entries: Vec<Series>,
}

/// Output of [`GradedMatrix::constant_rank_decompose`]: G₁·Z·G₂ is the
/// canonical blockwise `[[I, 0], [0, 0]]` form with ranks `profile`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstantRank {
    pub profile: RankProfile,
    pub g1: GradedMatrix,
    pub g2: GradedMatrix,
    /// Pivot positions (row, column) in the order they were chosen.
    pub pivots: Vec<(usize, usize)>,
}

impl GradedMatrix {
    pub fn new(
        alg: &Arc<JetAlgebra>,
        row_degrees: Vec<Degree>,
        col_degrees: Vec<Degree>,
        entries: Vec<Series>,
    ) -> Result<Self> {
        if entries.len() != row_degrees.len() * col_degrees.len() {
            return Err(Error::Shape);
        }
        let n = alg.n();
        if row_degrees.iter().chain(&col_degrees).any(|d| d.n() != n) {
            return Err(Error::Shape);
        }
        if entries.iter().any(|e| !same_algebra(e.algebra(), alg)) {
            return Err(Error::AlgebraMismatch);
        }
        Ok(Self { alg: alg.clone(), row_degrees, col_degrees, entries })
    }

    pub fn from_rows(alg: &Arc<JetAlgebra>, row_degrees: Vec<Degree>, col_degrees: Vec<Degree>, rows: Vec<Vec<Series>>) -> Result<Self> {
        if rows.len() != row_degrees.len() || rows.iter().any(|r| r.len() != col_degrees.len()) {
            return Err(Error::Shape);
        }
        Self::new(alg, row_degrees, col_degrees, rows.into_iter().flatten().collect())
    }

    pub fn zeros(alg: &Arc<JetAlgebra>, row_degrees: Vec<Degree>, col_degrees: Vec<Degree>) -> Self {
        let entries = vec![Series::zero(alg); row_degrees.len() * col_degrees.len()];
        Self { alg: alg.clone(), row_degrees, col_degrees, entries }
    }

    pub fn identity(alg: &Arc<JetAlgebra>, degrees: Vec<Degree>) -> Self {
        let n = degrees.len();
        let mut m = Self::zeros(alg, degrees.clone(), degrees);
        for i in 0..n {
            m.entries[i * n + i] = Series::one(alg);
        }
        m
    }

    /// Lifts a scalar matrix to constant series.
    pub fn from_scalar(alg: &Arc<JetAlgebra>, row_degrees: Vec<Degree>, col_degrees: Vec<Degree>, m: &QMatrix) -> Result<Self> {
        if m.rows() != row_degrees.len() || m.cols() != col_degrees.len() {
            return Err(Error::Shape);
        }
        let entries = m.data.iter().map(|c| Series::constant(alg, c.clone())).collect();
        Self::new(alg, row_degrees, col_degrees, entries)
    }

    pub fn algebra(&self) -> &Arc<JetAlgebra> {
        &self.alg
    }

    pub fn row_degrees(&self) -> &[Degree] {
        &self.row_degrees
    }

    pub fn col_degrees(&self) -> &[Degree] {
        &self.col_degrees
    }

    pub fn nrows(&self) -> usize {
        self.row_degrees.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_degrees.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &Series {
        &self.entries[i * self.ncols() + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Series) {
        let c = self.ncols();
        self.entries[i * c + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Series] {
        let c = self.ncols();
        &self.entries[i * c..(i + 1) * c]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Series::is_zero)
    }

    /// Entry (i, j) homogeneous of degree rᵢ + cⱼ for all i, j.
    pub fn is_degree_zero(&self) -> bool {
        (0..self.nrows()).all(|i| {
            (0..self.ncols()).all(|j| self.get(i, j).is_homogeneous(&(self.row_degrees[i] + self.col_degrees[j])))
        })
    }

    pub fn map(&self, f: impl Fn(&Series) -> Result<Series>) -> Result<GradedMatrix> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        let alg = entries.first().map_or_else(|| self.alg.clone(), |e| e.algebra().clone());
        GradedMatrix::new(&alg, self.row_degrees.clone(), self.col_degrees.clone(), entries)
    }

    pub fn truncated(&self, k: u32) -> GradedMatrix {
        GradedMatrix {
            alg: self.alg.clone(),
            row_degrees: self.row_degrees.clone(),
            col_degrees: self.col_degrees.clone(),
            entries: self.entries.iter().map(|e| e.truncated(k)).collect(),
        }
    }

    pub fn sub(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.row_degrees != other.row_degrees || self.col_degrees != other.col_degrees {
            return Err(Error::Shape);
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.checked_sub(b)).collect::<Result<_>>()?;
        Ok(GradedMatrix { alg: self.alg.clone(), row_degrees: self.row_degrees.clone(), col_degrees: self.col_degrees.clone(), entries })
    }

    pub fn matmul(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.col_degrees != other.row_degrees {
            return Err(Error::Shape);
        }
        if !same_algebra(&self.alg, &other.alg) {
            return Err(Error::AlgebraMismatch);
        }
        let (m, k, p) = (self.nrows(), self.ncols(), other.ncols());
        let mut out = GradedMatrix::zeros(&self.alg, self.row_degrees.clone(), other.col_degrees.clone());
        for i in 0..m {
            for j in 0..p {
                let mut acc = Series::zero(&self.alg);
                for l in 0..k {
                    let (a, b) = (self.get(i, l), other.get(l, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Entrywise augmentation.
    pub fn epsilon(&self) -> QMatrix {
        QMatrix { rows: self.nrows(), cols: self.ncols(), data: self.entries.iter().map(Series::epsilon).collect() }
    }

    /// ε-reduced diagonal blocks, one per degree of the standard order:
    /// rows of degree γ against columns of degree γ.
    pub fn diagonal_blocks(&self) -> Vec<(Degree, QMatrix)> {
        let eps = self.epsilon();
        let order = crate::grading::standard_order(self.alg.n()).expect("n validated by the algebra");
        order
            .into_iter()
            .map(|d| {
                let rows: Vec<usize> = (0..self.nrows()).filter(|&i| self.row_degrees[i] == d).collect();
                let cols: Vec<usize> = (0..self.ncols()).filter(|&j| self.col_degrees[j] == d).collect();
                (d, eps.select(&rows, &cols))
            })
            .collect()
    }

    fn check_square_deg0(&self) -> Result<()> {
        if self.nrows() != self.ncols() {
            return Err(Error::NotSquare);
        }
        if !self.is_degree_zero() {
            return Err(Error::NotDegreeZero);
        }
        Ok(())
    }

    /// A square degree-zero matrix is invertible iff every ε-reduced
    /// diagonal block is an invertible scalar matrix.
    pub fn is_invertible_deg0(&self) -> Result<bool> {
        self.check_square_deg0()?;
        Ok(self.diagonal_blocks().iter().all(|(_, b)| b.is_square() && b.rank() == b.rows()))
    }

    /// Inverse via T = D(𝕀 + Z), T⁻¹ = (𝕀 + Σ_{k≥1}(−Z)ᵏ)·D⁻¹, where D is the
    /// constant part. Z has entries without constant term, so the series
    /// stops after `cap` steps.
    pub fn neumann_inverse(&self) -> Result<GradedMatrix> {
        if !self.is_invertible_deg0()? {
            return Err(Error::Singular);
        }
        let d_inv = self.epsilon().inverse().ok_or(Error::Singular)?;
        let d_inv = GradedMatrix::from_scalar(&self.alg, self.col_degrees.clone(), self.row_degrees.clone(), &d_inv)?;
        let id = GradedMatrix::identity(&self.alg, self.col_degrees.clone());
        let z = d_inv.matmul(self)?.sub(&id)?;
        let minus_z = z.map(|e| Ok(-e))?;
        let mut acc = id.clone();
        let mut power = id;
        for _ in 0..self.alg.cap() {
            power = power.matmul(&minus_z)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        acc.matmul(&d_inv)
    }

    fn add(&self, other: &GradedMatrix) -> Result<GradedMatrix> {
        if self.row_degrees != other.row_degrees || self.col_degrees != other.col_degrees {
            return Err(Error::Shape);
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.checked_add(b)).collect::<Result<_>>()?;
        Ok(GradedMatrix { alg: self.alg.clone(), row_degrees: self.row_degrees.clone(), col_degrees: self.col_degrees.clone(), entries })
    }

    /// (Aᵍᵗ)ᵢⱼ = (−1)^⟨rⱼ + cᵢ, cᵢ⟩·Aⱼᵢ with row and column degrees swapped.
    /// With this sign the graded Jacobian is the graded transpose of the
    /// derivative matrix (∂_{uʲ} vⁱ) whose rows are indexed by u.
    pub fn graded_transpose(&self) -> GradedMatrix {
        let (m, p) = (self.nrows(), self.ncols());
        let mut out = GradedMatrix::zeros(&self.alg, self.col_degrees.clone(), self.row_degrees.clone());
        for i in 0..p {
            for j in 0..m {
                let c = self.col_degrees[i];
                let e = self.get(j, i);
                let v = if (self.row_degrees[j] + c).pairing(&c) == 1 { -e } else { e.clone() };
                out.set(i, j, v);
            }
        }
        out
    }

    /// Canonical constant-rank form for these row/column degrees: for every
    /// degree γ, the k-th row and k-th column of degree γ meet in a 1 for
    /// k < s_γ; everything else is zero.
    pub fn canonical_form(alg: &Arc<JetAlgebra>, row_degrees: &[Degree], col_degrees: &[Degree], profile: &RankProfile) -> GradedMatrix {
        let mut out = GradedMatrix::zeros(alg, row_degrees.to_vec(), col_degrees.to_vec());
        let per = profile.per_degree();
        let order = crate::grading::standard_order(alg.n()).expect("valid n");
        for (d, &s) in order.iter().zip(&per) {
            let rows: Vec<usize> = (0..row_degrees.len()).filter(|&i| row_degrees[i] == *d).collect();
            let cols: Vec<usize> = (0..col_degrees.len()).filter(|&j| col_degrees[j] == *d).collect();
            for k in 0..s.min(rows.len()).min(cols.len()) {
                out.set(rows[k], cols[k], Series::one(alg));
            }
        }
        out
    }

    /// Graded elimination with unit pivots only.
    ///
    /// Pivots are searched degree block by degree block in standard order,
    /// row-major inside a block, lowest indices first. When no unit pivot
    /// remains, the untouched part must be exactly zero; otherwise the
    /// matrix is reported as not of constant rank (`Ok(None)`).
    pub fn constant_rank_decompose(&self) -> Result<Option<ConstantRank>> {
        if !self.is_degree_zero() {
            return Err(Error::NotDegreeZero);
        }
        let (m, p) = (self.nrows(), self.ncols());
        let alg = &self.alg;
        let order = crate::grading::standard_order(alg.n())?;
        let mut work = self.clone();
        let mut g1 = GradedMatrix::identity(alg, self.row_degrees.clone());
        let mut g2 = GradedMatrix::identity(alg, self.col_degrees.clone());
        let mut used_rows = vec![false; m];
        let mut used_cols = vec![false; p];
        let mut pivots = Vec::new();

        loop {
            let pivot = order.iter().find_map(|d| {
                (0..m).filter(|&i| !used_rows[i] && self.row_degrees[i] == *d).find_map(|i| {
                    (0..p)
                        .filter(|&j| !used_cols[j] && self.col_degrees[j] == *d)
                        .find(|&j| !work.get(i, j).epsilon().is_zero())
                        .map(|j| (i, j))
                })
            });
            let Some((i, j)) = pivot else { break };
            let u = work.get(i, j).invert()?;
            for l in 0..p {
                work.set(i, l, &u * work.get(i, l));
            }
            for l in 0..m {
                g1.set(i, l, &u * g1.get(i, l));
            }
            for k in 0..m {
                if k == i {
                    continue;
                }
                let c = work.get(k, j).clone();
                if c.is_zero() {
                    continue;
                }
                for l in 0..p {
                    let v = work.get(k, l) - &(&c * work.get(i, l));
                    work.set(k, l, v);
                }
                for l in 0..m {
                    let v = g1.get(k, l) - &(&c * g1.get(i, l));
                    g1.set(k, l, v);
                }
            }
            for l in 0..p {
                if l == j {
                    continue;
                }
                let c = work.get(i, l).clone();
                if c.is_zero() {
                    continue;
                }
                for k in 0..m {
                    let v = work.get(k, l) - &(work.get(k, j) * &c);
                    work.set(k, l, v);
                }
                for k in 0..p {
                    let v = g2.get(k, l) - &(g2.get(k, j) * &c);
                    g2.set(k, l, v);
                }
            }
            used_rows[i] = true;
            used_cols[j] = true;
            pivots.push((i, j));
        }

        let residual_zero = (0..m)
            .filter(|&i| !used_rows[i])
            .all(|i| (0..p).filter(|&j| !used_cols[j]).all(|j| work.get(i, j).is_zero()));
        if !residual_zero {
            return Ok(None);
        }

        // Move pivots to the front of their degree groups.
        let mut per_degree: BTreeMap<usize, usize> = BTreeMap::new();
        let rank_of = |d: &Degree| order.iter().position(|x| x == d).expect("degree in order");
        let mut row_perm: Vec<usize> = (0..m).collect();
        let mut col_perm: Vec<usize> = (0..p).collect();
        for d in &order {
            let rows: Vec<usize> = (0..m).filter(|&i| self.row_degrees[i] == *d).collect();
            let cols: Vec<usize> = (0..p).filter(|&j| self.col_degrees[j] == *d).collect();
            let piv: Vec<(usize, usize)> = pivots.iter().copied().filter(|&(i, _)| self.row_degrees[i] == *d).collect();
            per_degree.insert(rank_of(d), piv.len());
            let row_seq: Vec<usize> =
                piv.iter().map(|&(i, _)| i).chain(rows.iter().copied().filter(|i| !piv.iter().any(|&(pi, _)| pi == *i))).collect();
            let col_seq: Vec<usize> =
                piv.iter().map(|&(_, j)| j).chain(cols.iter().copied().filter(|j| !piv.iter().any(|&(_, pj)| pj == *j))).collect();
            for (slot, src) in rows.iter().zip(row_seq) {
                row_perm[*slot] = src;
            }
            for (slot, src) in cols.iter().zip(col_seq) {
                col_perm[*slot] = src;
            }
        }
        let g1 = permute_rows(&g1, &row_perm);
        let g2 = permute_cols(&g2, &col_perm);
        let ranks: Vec<usize> = (0..order.len()).map(|r| per_degree.get(&r).copied().unwrap_or(0)).collect();
        Ok(Some(ConstantRank { profile: RankProfile::from_per_degree(&ranks), g1, g2, pivots }))
    }
}

fn permute_rows(a: &GradedMatrix, perm: &[usize]) -> GradedMatrix {
    let mut out = a.clone();
    for (t, &src) in perm.iter().enumerate() {
        for l in 0..a.ncols() {
            out.set(t, l, a.get(src, l).clone());
        }
    }
    out
}

fn permute_cols(a: &GradedMatrix, perm: &[usize]) -> GradedMatrix {
    let mut out = a.clone();
    for (t, &src) in perm.iter().enumerate() {
        for k in 0..a.nrows() {
            out.set(k, t, a.get(k, src).clone());
        }
    }
    out
}

impl fmt::Debug for GradedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rows {:?} cols {:?} [", self.row_degrees, self.col_degrees)?;
        for i in 0..self.nrows() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.ncols() {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}
