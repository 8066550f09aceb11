//! Seeded random generators for series, forms, morphisms, and matrices.

use rand::Rng;
use zjet::{CoordinateSystem, Degree, Domain, Form, GradedMatrix, JetAlgebra, Monomial, Morphism, QMatrix, Rational, Series};

/// Test configurations: one coordinate per degree class at n = 1 and n = 2,
/// and a mixed n = 3 system.
pub fn configurations() -> Vec<Domain> {
    vec![
        domain(1, &[("x", "(0)"), ("t", "(1)")], 4),
        domain(2, &[("x", "(0,0)"), ("z", "(1,1)"), ("a", "(0,1)"), ("b", "(1,0)")], 4),
        domain(3, &[("x", "(0,0,0)"), ("z", "(0,1,1)"), ("a", "(0,0,1)"), ("c", "(1,1,1)")], 3),
    ]
}

pub fn domain(n: u8, coords: &[(&str, &str)], cap: u32) -> Domain {
    let cs = coords.iter().map(|(name, d)| (name.to_string(), d.parse::<Degree>().expect("degree literal"))).collect();
    JetAlgebra::new(CoordinateSystem::new(n, cs).expect("coordinate system"), cap)
}

fn coefficient<R: Rng>(rng: &mut R) -> Rational {
    let mut c = 0;
    while c == 0 {
        c = rng.gen_range(-4i64..=4);
    }
    Rational::from_integer(c.into())
}

/// A monomial that does not vanish in `dom`, of total degree at most `max_total`.
pub fn monomial<R: Rng>(rng: &mut R, dom: &Domain, max_total: u32) -> Monomial {
    let coords = dom.coords();
    let mut exps = vec![0u32; dom.len()];
    let target = rng.gen_range(0..=max_total);
    let mut total = 0;
    for _ in 0..target {
        let i = rng.gen_range(0..dom.len());
        if coords.is_odd(i) && exps[i] == 1 {
            continue;
        }
        exps[i] += 1;
        total += 1;
    }
    debug_assert!(total <= max_total);
    Monomial::from_exponents(exps)
}

pub fn series<R: Rng>(rng: &mut R, dom: &Domain, max_terms: usize) -> Series {
    let mut s = Series::zero(dom);
    for _ in 0..rng.gen_range(0..=max_terms) {
        let m = monomial(rng, dom, dom.cap());
        s = &s + &Series::monomial(dom, m, coefficient(rng)).expect("nonvanishing monomial");
    }
    s
}

/// A homogeneous series of degree `d` with about `terms` terms, all of
/// total degree in `min_total..=cap`.
pub fn homogeneous<R: Rng>(rng: &mut R, dom: &Domain, d: &Degree, terms: usize, min_total: u32) -> Series {
    let coords = dom.coords();
    let mut s = Series::zero(dom);
    let mut found = 0;
    for _ in 0..terms * 40 {
        if found == terms {
            break;
        }
        let m = monomial(rng, dom, dom.cap());
        if m.total() < min_total || m.degree(coords) != *d {
            continue;
        }
        s = &s + &Series::monomial(dom, m, coefficient(rng)).expect("nonvanishing monomial");
        found += 1;
    }
    s
}

/// A basepoint-preserving morphism with random homogeneous images.
pub fn morphism<R: Rng>(rng: &mut R, source: &Domain, target: &Domain) -> Morphism {
    let pullbacks = (0..target.len())
        .map(|i| {
            let d = target.coords().degree(i);
            homogeneous(rng, source, &d, 3, if d.is_zero() { 1 } else { 0 })
        })
        .collect();
    Morphism::new(source, target, pullbacks).expect("homogeneous images")
}

fn scalar_block<R: Rng>(rng: &mut R, size: usize) -> QMatrix {
    let rows = (0..size).map(|_| (0..size).map(|_| Rational::from_integer(rng.gen_range(-3i64..=3).into())).collect()).collect();
    QMatrix::from_rows(rows).expect("rectangular")
}

/// Square scalar block of full rank.
pub fn invertible_block<R: Rng>(rng: &mut R, size: usize) -> QMatrix {
    loop {
        let m = scalar_block(rng, size);
        if m.rank() == size {
            return m;
        }
    }
}

/// Square scalar block of rank < size.
pub fn singular_block<R: Rng>(rng: &mut R, size: usize) -> QMatrix {
    let mut m = scalar_block(rng, size);
    let i = rng.gen_range(0..size);
    let j = rng.gen_range(0..size);
    for c in 0..size {
        m[(i, c)] = if i == j { Rational::from_integer(0.into()) } else { m[(j, c)].clone() * Rational::from_integer(2.into()) };
    }
    m
}

/// Endomorphism with prescribed linear blocks (one per degree in standard
/// order, each square of the block size) plus random terms of total ≥ 2.
pub fn with_linear_part<R: Rng>(rng: &mut R, dom: &Domain, blocks: &[QMatrix]) -> Morphism {
    let coords = dom.coords();
    let mut pullbacks = Vec::with_capacity(dom.len());
    for i in 0..dom.len() {
        let d = coords.degree(i);
        let rank = coords.degree_rank(&d);
        let range = coords.indices_of_degree(&d);
        let (start, block) = (range.start, &blocks[rank]);
        let mut img = homogeneous(rng, dom, &d, 2, 2);
        for j in range {
            let c = &block[(i - start, j - start)];
            img = &img + &Series::coordinate(dom, j).scale(c);
        }
        pullbacks.push(img);
    }
    Morphism::new(dom, dom, pullbacks).expect("homogeneous images")
}

fn block_sizes(dom: &Domain) -> Vec<usize> {
    dom.coords().counts().to_vec()
}

pub fn invertible_morphism<R: Rng>(rng: &mut R, dom: &Domain) -> Morphism {
    let blocks: Vec<QMatrix> = block_sizes(dom).into_iter().map(|s| invertible_block(rng, s)).collect();
    with_linear_part(rng, dom, &blocks)
}

/// Endomorphism whose tangent block in one nonempty degree is singular.
pub fn singular_morphism<R: Rng>(rng: &mut R, dom: &Domain) -> Morphism {
    let sizes = block_sizes(dom);
    let nonempty: Vec<usize> = (0..sizes.len()).filter(|&k| sizes[k] > 0).collect();
    let bad = nonempty[rng.gen_range(0..nonempty.len())];
    let blocks: Vec<QMatrix> =
        sizes.iter().enumerate().map(|(k, &s)| if k == bad { singular_block(rng, s) } else { invertible_block(rng, s) }).collect();
    with_linear_part(rng, dom, &blocks)
}

/// Degree-zero square matrix over `dom` with the given row/column degrees.
pub fn degree_zero_matrix<R: Rng>(rng: &mut R, dom: &Domain, degrees: &[Degree], terms: usize) -> GradedMatrix {
    let rows = degrees
        .iter()
        .map(|r| {
            degrees
                .iter()
                .map(|c| {
                    let mut e = homogeneous(rng, dom, &(*r + *c), terms, 1);
                    if r == c && rng.gen_bool(0.8) {
                        e = &e + &Series::constant(dom, Rational::from_integer(rng.gen_range(-2i64..=2).into()));
                    }
                    e
                })
                .collect()
        })
        .collect();
    GradedMatrix::from_rows(dom, degrees.to_vec(), degrees.to_vec(), rows).expect("shape")
}

/// Random word of form degree `k`: antisymmetric generators appear at most once.
pub fn word<R: Rng>(rng: &mut R, dom: &Domain, k: u32) -> Monomial {
    let coords = dom.coords();
    let mut exps = vec![0u32; dom.len()];
    let mut placed = 0;
    let mut guard = 0;
    while placed < k && guard < 1000 {
        guard += 1;
        let i = rng.gen_range(0..dom.len());
        if !coords.is_odd(i) && exps[i] == 1 {
            continue;
        }
        exps[i] += 1;
        placed += 1;
    }
    Monomial::from_exponents(exps)
}

/// Random k-form; `homogeneous_degree` restricts every term to one total
/// Z₂ⁿ-degree.
pub fn form<R: Rng>(rng: &mut R, dom: &Domain, form_cap: u32, k: u32, terms: usize, homogeneous_degree: Option<Degree>) -> Form {
    let coords = dom.coords();
    let mut out = Form::zero(dom, form_cap);
    for _ in 0..rng.gen_range(1..=terms) {
        let w = word(rng, dom, k);
        if w.total() != k {
            continue;
        }
        let f = match homogeneous_degree {
            Some(d) => homogeneous(rng, dom, &(d + w.degree(coords)), 2, 0),
            None => series(rng, dom, 2),
        };
        out = out.checked_add(&Form::word(dom, form_cap, w, f).expect("word fits")).expect("same algebra");
    }
    out
}
