use std::sync::Arc;

use proptest::prelude::*;
use zjet::{
    compose, derham_ranks, differential, find_potential, invert_morphism, jacobian_multiplicativity_check, CoordinateSystem, Degree,
    Form, GradedMatrix, JetAlgebra, Monomial, Morphism, Rational, Series, VectorField,
};

const CAP: u32 = 4;

/// n=2 with one coordinate of each degree: x:(0,0), z:(1,1), a:(0,1), b:(1,0).
fn alg(cap: u32) -> Arc<JetAlgebra> {
    let coords = ["x:(0,0)", "z:(1,1)", "a:(0,1)", "b:(1,0)"]
        .iter()
        .map(|s| {
            let (n, d) = s.split_once(':').unwrap();
            (n.to_string(), d.parse::<Degree>().unwrap())
        })
        .collect();
    JetAlgebra::new(CoordinateSystem::new(2, coords).unwrap(), cap)
}

type Terms = Vec<([u32; 4], i64)>;

fn terms(max_terms: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((prop::array::uniform4(0u32..3), -4i64..5), 0..max_terms)
}

fn build(r: &Arc<JetAlgebra>, t: &Terms) -> Series {
    let mut s = Series::zero(r);
    for (e, c) in t {
        s = &s + &Series::monomial(r, Monomial::from_exponents(e.to_vec()), Rational::from_integer((*c).into())).unwrap();
    }
    s
}

fn deg(r: &Arc<JetAlgebra>, i: usize) -> Degree {
    r.coords().degree(i)
}

/// A morphism r → r whose i-th pullback is the degree-matched part of the
/// given terms, with constants removed.
fn morphism(r: &Arc<JetAlgebra>, parts: &[Terms]) -> Morphism {
    let pullbacks = (0..r.len())
        .map(|i| {
            let s = build(r, &parts[i]).homogeneous_part(&deg(r, i));
            &s - &Series::constant(r, s.epsilon())
        })
        .collect();
    Morphism::new(r, r, pullbacks).unwrap()
}

/// Like [`morphism`], with linear part scale·identity so every tangent block is invertible.
fn invertible(r: &Arc<JetAlgebra>, parts: &[Terms], scale: i64) -> Morphism {
    let base = morphism(r, parts);
    let pullbacks = base
        .pullbacks()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut higher = p.clone();
            for j in 0..r.len() {
                let c = p.coefficient(&Monomial::var(r.len(), j));
                higher = &higher - &Series::coordinate(r, j).scale(&c);
            }
            &higher + &Series::coordinate(r, i).scale(&Rational::from_integer(scale.into()))
        })
        .collect();
    Morphism::new(r, r, pullbacks).unwrap()
}

fn morphism_parts() -> impl Strategy<Value = Vec<Terms>> {
    prop::collection::vec(terms(5), 4)
}

/// Form of form degree k: each entry is (word exponents, coefficient terms).
fn form(r: &Arc<JetAlgebra>, k: u32, pieces: &[([u32; 4], Terms)], form_cap: u32) -> Form {
    let mut out = Form::zero(r, form_cap);
    for (w, t) in pieces {
        // Words of the wrong length fall back to a fixed word of length k.
        let fixed = [[0, 0, 0, 0], [1, 0, 0, 0], [1, 1, 0, 0], [1, 1, 1, 0]];
        let w = if w.iter().sum::<u32>() == k { *w } else { fixed[k as usize] };
        let f = build(r, t);
        out = out.checked_add(&Form::word(r, form_cap, Monomial::from_exponents(w.to_vec()), f).unwrap()).unwrap();
    }
    out
}

fn form_pieces() -> impl Strategy<Value = Vec<([u32; 4], Terms)>> {
    prop::collection::vec((prop::array::uniform4(0u32..2), terms(4)), 0..4)
}

/// Keeps only the terms of ω whose total degree is `d`.
fn homogeneous_form(omega: &Form, d: &Degree) -> Form {
    let r = omega.algebra();
    let coords = r.coords();
    let mut out = Form::zero(r, omega.form_cap());
    for (w, f) in omega.terms() {
        let part = f.homogeneous_part(&(*d + w.degree(coords)));
        out = out.checked_add(&Form::word(r, omega.form_cap(), w.clone(), part).unwrap()).unwrap();
    }
    out
}

fn any_degree() -> impl Strategy<Value = Degree> {
    (0u8..2, 0u8..2).prop_map(|(a, b)| Degree::new(&[a, b]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in terms(6), b in terms(6), c in terms(6)) {
        let r = alg(CAP);
        let (a, b, c) = (build(&r, &a), build(&r, &b), build(&r, &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
    }

    #[test]
    fn graded_commutativity(a in terms(6), b in terms(6), da in any_degree(), db in any_degree()) {
        let r = alg(CAP);
        let a = build(&r, &a).homogeneous_part(&da);
        let b = build(&r, &b).homogeneous_part(&db);
        let ab = &a * &b;
        let ba = &b * &a;
        prop_assert_eq!(ab, if da.pairing(&db) == 1 { -ba } else { ba });
    }

    #[test]
    fn leibniz(a in terms(6), b in terms(6), da in any_degree(), i in 0usize..4) {
        let r = alg(CAP);
        let a = build(&r, &a).homogeneous_part(&da);
        let b = build(&r, &b);
        let lhs = (&a * &b).partial(i);
        let sign = deg(&r, i).pairing(&da) == 1;
        let second = &a * &b.partial(i);
        let rhs = &(&a.partial(i) * &b) + &(if sign { -second } else { second });
        prop_assert_eq!(lhs.truncated(CAP - 1), rhs.truncated(CAP - 1));
    }

    #[test]
    fn series_inverse(a in terms(6), c in 1i64..5) {
        let r = alg(CAP);
        let f = &build(&r, &a) + &Series::constant(&r, Rational::from_integer(c.into()) - build(&r, &a).epsilon());
        let g = f.invert().unwrap();
        prop_assert_eq!(&f * &g, Series::one(&r));
    }

    #[test]
    fn chain_rule_and_multiplicativity(p in morphism_parts(), q in morphism_parts(), f in terms(6), c in 0usize..4) {
        let r = alg(CAP);
        let psi = morphism(&r, &p);
        let phi = morphism(&r, &q);
        prop_assert!(psi.chain_rule_residual(&build(&r, &f), c).unwrap().is_zero());
        let (ok, _) = jacobian_multiplicativity_check(&psi, &phi).unwrap();
        prop_assert!(ok);
        prop_assert!(psi.jacobian().is_degree_zero());
        let tm = compose(&psi, &phi).unwrap().tangent_map();
        prop_assert_eq!(tm, phi.tangent_map().after(&psi.tangent_map()).unwrap());
    }

    #[test]
    fn composition_laws(p in morphism_parts(), q in morphism_parts(), s in morphism_parts()) {
        let r = alg(CAP);
        let (f, g, h) = (morphism(&r, &p), morphism(&r, &q), morphism(&r, &s));
        prop_assert_eq!(compose(&compose(&f, &g).unwrap(), &h).unwrap(), compose(&f, &compose(&g, &h).unwrap()).unwrap());
        let id = Morphism::identity(&r);
        prop_assert_eq!(compose(&id, &f).unwrap(), f.clone());
        prop_assert_eq!(compose(&f, &id).unwrap(), f);
    }

    #[test]
    fn inverse_function_theorem(p in morphism_parts(), scale in prop::sample::select(vec![-2i64, -1, 1, 3])) {
        let r = alg(CAP);
        let phi = invertible(&r, &p, scale);
        let inv = invert_morphism(&phi).unwrap();
        prop_assert_eq!(compose(&phi, &inv).unwrap(), Morphism::identity(&r));
        prop_assert_eq!(compose(&inv, &phi).unwrap(), Morphism::identity(&r));
    }

    #[test]
    fn neumann_round_trip(p in morphism_parts(), scale in prop::sample::select(vec![-2i64, 1, 3])) {
        let r = alg(CAP);
        let j = invertible(&r, &p, scale).jacobian();
        let inv = j.neumann_inverse().unwrap();
        let degrees: Vec<Degree> = (0..r.len()).map(|i| deg(&r, i)).collect();
        prop_assert_eq!(j.matmul(&inv).unwrap(), GradedMatrix::identity(&r, degrees.clone()));
        prop_assert_eq!(inv.matmul(&j).unwrap(), GradedMatrix::identity(&r, degrees));
    }

    #[test]
    fn double_transpose_sign(p in morphism_parts()) {
        let r = alg(CAP);
        let j = morphism(&r, &p).jacobian();
        let tt = j.graded_transpose().graded_transpose();
        for i in 0..j.nrows() {
            for k in 0..j.ncols() {
                let flip = (j.row_degrees()[i] + j.col_degrees()[k]).parity() == 1;
                let e = j.get(i, k);
                prop_assert_eq!(tt.get(i, k), &if flip { -e } else { e.clone() });
            }
        }
    }

    #[test]
    fn d_squared(k in 0u32..3, pieces in form_pieces()) {
        let r = alg(CAP);
        let w = form(&r, k, &pieces, 4);
        prop_assert!(w.exterior_derivative().unwrap().exterior_derivative().unwrap().is_zero());
    }

    #[test]
    fn d_filtration(k in 0u32..3, pieces in form_pieces()) {
        let r = alg(CAP);
        let w = form(&r, k, &pieces, 4);
        let dw = w.exterior_derivative().unwrap();
        if let (Some(a), Some(b)) = (w.j_order(), dw.j_order()) {
            prop_assert!(b + 1 >= a);
        }
    }

    #[test]
    fn deligne_commutation(p1 in form_pieces(), p2 in form_pieces(), k1 in 0u32..3, k2 in 0u32..2, d1 in any_degree(), d2 in any_degree()) {
        let r = alg(CAP);
        let a = homogeneous_form(&form(&r, k1, &p1, 4), &d1);
        let b = homogeneous_form(&form(&r, k2, &p2, 4), &d2);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        let flip = (d1.pairing(&d2) as u32 + k1 * k2) % 2 == 1;
        prop_assert_eq!(ab, if flip { -&ba } else { ba });
    }

    #[test]
    fn graded_derivation(p1 in form_pieces(), p2 in form_pieces(), k1 in 0u32..2, k2 in 0u32..2) {
        let r = alg(CAP);
        let a = form(&r, k1, &p1, 4);
        let b = form(&r, k2, &p2, 4);
        let lhs = a.wedge(&b).unwrap().exterior_derivative().unwrap();
        let second = a.wedge(&b.exterior_derivative().unwrap()).unwrap();
        let rhs = a.exterior_derivative().unwrap().wedge(&b).unwrap().checked_add(&if k1 % 2 == 1 { -&second } else { second }).unwrap();
        prop_assert_eq!(lhs.truncated(CAP - 1), rhs.truncated(CAP - 1));
    }

    #[test]
    fn pullback_naturality(p in morphism_parts(), p1 in form_pieces(), p2 in form_pieces(), k in 0u32..3) {
        let r = alg(CAP);
        let phi = morphism(&r, &p);
        let w = form(&r, k, &p1, 4);
        let lhs = w.pullback(&phi).unwrap().exterior_derivative().unwrap();
        let rhs = w.exterior_derivative().unwrap().pullback(&phi).unwrap();
        prop_assert_eq!(lhs.truncated(CAP - 1), rhs.truncated(CAP - 1));
        let a = form(&r, 1, &p1, 4);
        let b = form(&r, 1, &p2, 4);
        prop_assert_eq!(a.wedge(&b).unwrap().pullback(&phi).unwrap(), a.pullback(&phi).unwrap().wedge(&b.pullback(&phi).unwrap()).unwrap());
    }

    #[test]
    fn pairing_with_differential(x in prop::collection::vec(terms(4), 4), f in terms(6)) {
        let r = alg(CAP);
        let field = VectorField::new(&r, x.iter().map(|t| build(&r, t)).collect()).unwrap();
        let f = build(&r, &f);
        prop_assert_eq!(field.pair(&differential(&f)).unwrap(), field.apply(&f).unwrap());
    }

    #[test]
    fn bracket_laws(x in prop::collection::vec(terms(4), 4), y in prop::collection::vec(terms(4), 4), z in prop::collection::vec(terms(4), 4),
                    dx in any_degree(), dy in any_degree(), dz in any_degree()) {
        let r = alg(CAP);
        let field = |t: &[Terms], g: Degree| {
            VectorField::new(&r, t.iter().enumerate().map(|(b, s)| build(&r, s).homogeneous_part(&(g + deg(&r, b)))).collect()).unwrap()
        };
        let (fx, fy, fz) = (field(&x, dx), field(&y, dy), field(&z, dz));
        let xy = fx.bracket(&fy).unwrap();
        let yx = fy.bracket(&fx).unwrap();
        let anti = if dx.pairing(&dy) == 1 { &xy + &(-&yx) } else { &xy + &yx };
        prop_assert!(anti.truncated(CAP - 1).is_zero());
        // [X,[Y,Z]] = [[X,Y],Z] + (−1)^⟨x,y⟩ [Y,[X,Z]]
        let lhs = fx.bracket(&fy.bracket(&fz).unwrap()).unwrap();
        let t1 = xy.bracket(&fz).unwrap();
        let t2 = fy.bracket(&fx.bracket(&fz).unwrap()).unwrap();
        let rhs = &t1 + &(if dx.pairing(&dy) == 1 { -&t2 } else { t2 });
        prop_assert_eq!(lhs.truncated(CAP - 2), rhs.truncated(CAP - 2));
    }

    #[test]
    fn homotopy_identity(pieces in form_pieces(), k in 1u32..3) {
        let r = alg(5);
        let eta = 1;
        let w = form(&r, k, &pieces, 4).truncated(3);
        let kw = w.homotopy_k(eta).unwrap();
        let lhs = kw.exterior_derivative().unwrap().checked_sub(&w.exterior_derivative().unwrap().homotopy_k(eta).unwrap()).unwrap();
        let diff = w.checked_sub(&w.restrict_zero(eta)).unwrap();
        prop_assert_eq!(lhs, if k % 2 == 0 { -&diff } else { diff });
    }

    #[test]
    fn potentials_of_exact_forms(k in 0u32..2, pieces in form_pieces()) {
        let r = alg(CAP);
        let base = form(&r, k, &pieces, 4).truncated(CAP - 1);
        let base = if k == 0 { base.checked_sub(&Form::function(&Series::constant(&r, base.coefficient(&Monomial::one(4)).epsilon()))).unwrap() } else { base };
        let omega = base.exterior_derivative().unwrap();
        prop_assume!(!omega.is_zero());
        let eta = find_potential(&omega).unwrap();
        prop_assert_eq!(eta.exterior_derivative().unwrap(), omega);
    }
}

#[test]
fn poincare_small_domains() {
    let r = alg(CAP);
    let t = derham_ranks(&r, 2, 4).unwrap();
    assert_eq!(t.total(0), 1);
    assert_eq!(t.total(1), 0);
    assert_eq!(t.total(2), 0);
    assert!(t.cells.iter().all(|c| c.dim == 0 || (c.k == 0 && c.w == 0)));
}
