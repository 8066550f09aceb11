//! Randomized invariant suite behind `check all`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zjet::{
    compose, derham_ranks, differential_with_cap, invert_morphism, jacobian_multiplicativity_check, Degree, Domain, Error, Form, GradedMatrix,
    Morphism, Series,
};

use crate::random;
use crate::roundtrip;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    /// A few cases per configuration.
    Quick,
    /// Many cases per configuration.
    Full,
}

impl Scale {
    fn cases(self) -> usize {
        match self {
            Scale::Quick => 5,
            Scale::Full => 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub passed: bool,
}

pub fn summary(results: &[CheckResult]) -> String {
    let lines: Vec<String> =
        results.iter().map(|r| format!("{} {} ({} cases)", if r.passed { "PASS" } else { "FAIL" }, r.name, r.cases)).collect();
    let passed = results.iter().filter(|r| r.passed).count();
    format!("{}\n{passed}/{} checks passed", lines.join("\n"), results.len())
}

fn degrees(dom: &Domain) -> Vec<Degree> {
    dom.coords().standard_order().to_vec()
}

fn homogeneous_parts<R: Rng>(rng: &mut R, dom: &Domain) -> (Series, Degree) {
    let ds = degrees(dom);
    let d = ds[rng.gen_range(0..ds.len())];
    (random::homogeneous(rng, dom, &d, 4, 0), d)
}

fn ring_laws<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let (a, da) = homogeneous_parts(rng, dom);
    let (b, db) = homogeneous_parts(rng, dom);
    let c = random::series(rng, dom, 5);
    let assoc = &(&a * &b) * &c == &a * &(&b * &c);
    let distrib = &a * &(&b + &c) == &(&a * &b) + &(&a * &c);
    let ba = &b * &a;
    let comm = &a * &b == if da.pairing(&db) == 1 { -ba } else { ba };
    let i = rng.gen_range(0..dom.len());
    let cap = dom.cap();
    let lhs = (&a * &c).partial(i);
    let second = &a * &c.partial(i);
    let rhs = &(&a.partial(i) * &c) + &(if dom.coords().degree(i).pairing(&da) == 1 { -second } else { second });
    assoc && distrib && comm && lhs.truncated(cap - 1) == rhs.truncated(cap - 1)
}

fn chain_rule<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let psi = random::morphism(rng, dom, dom);
    let phi = random::morphism(rng, dom, dom);
    let f = random::series(rng, dom, 4);
    let residual_zero = (0..dom.len()).all(|c| psi.chain_rule_residual(&f, c).map(|r| r.is_zero()).unwrap_or(false));
    residual_zero && jacobian_multiplicativity_check(&psi, &phi).map(|(ok, _)| ok).unwrap_or(false)
}

fn neumann<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let ds: Vec<Degree> = dom.coords().coords().iter().map(|c| c.degree).collect();
    let t = random::degree_zero_matrix(rng, dom, &ds, 2);
    match t.is_invertible_deg0() {
        Ok(true) => t
            .neumann_inverse()
            .and_then(|inv| t.matmul(&inv))
            .map(|p| p == GradedMatrix::identity(dom, ds.clone()))
            .unwrap_or(false),
        Ok(false) => t.neumann_inverse() == Err(Error::Singular),
        Err(_) => false,
    }
}

fn inverse_function<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let phi = random::invertible_morphism(rng, dom);
    let id = Morphism::identity(dom);
    let ok = match invert_morphism(&phi) {
        Ok(inv) => compose(&phi, &inv).ok() == Some(id.clone()) && compose(&inv, &phi).ok() == Some(id),
        Err(_) => false,
    };
    let bad = random::singular_morphism(rng, dom);
    ok && matches!(invert_morphism(&bad), Err(Error::NotLocallyInvertible(_)))
}

fn exterior<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let fc = dom.cap();
    let k = rng.gen_range(0..3);
    let omega = random::form(rng, dom, fc, k, 3, None);
    let dd = omega.exterior_derivative().and_then(|d| d.exterior_derivative()).map(|x| x.is_zero()).unwrap_or(false);
    let phi = random::morphism(rng, dom, dom);
    let natural = match (omega.exterior_derivative().and_then(|d| d.pullback(&phi)), omega.pullback(&phi).and_then(|p| p.exterior_derivative())) {
        (Ok(a), Ok(b)) => a.truncated(dom.cap() - 1) == b.truncated(dom.cap() - 1),
        _ => false,
    };
    dd && natural
}

fn homotopy<R: Rng>(rng: &mut R) -> bool {
    let dom = random::domain(2, &[("x", "(0,0)"), ("z", "(1,1)"), ("a", "(0,1)")], 5);
    let eta = 1;
    let k = rng.gen_range(1..3u32);
    let omega = random::form(rng, &dom, 5, k, 3, None).truncated(3);
    let check = || -> Result<bool, Error> {
        let dk = omega.homotopy_k(eta)?.exterior_derivative()?;
        let kd = omega.exterior_derivative()?.homotopy_k(eta)?;
        let lhs = dk.checked_sub(&kd)?;
        let rest = omega.checked_sub(&omega.restrict_zero(eta))?;
        let rhs = if k % 2 == 1 { rest } else { -&rest };
        Ok(lhs == rhs)
    };
    check().unwrap_or(false)
}

fn poincare(dom: &Domain) -> bool {
    match derham_ranks(dom, 2, 3) {
        Ok(t) => t.total(0) == 1 && (1..=2).all(|k| t.total(k) == 0),
        Err(_) => false,
    }
}

fn round_trip<R: Rng>(rng: &mut R, dom: &Domain) -> bool {
    let s = random::series(rng, dom, 5);
    let f = differential_with_cap(&s, dom.cap()).unwrap_or_else(|_| Form::zero(dom, dom.cap()));
    roundtrip::series(&s.to_string(), dom).as_ref() == Ok(&s) && roundtrip::form(&f.to_string(), dom, dom.cap()).as_ref() == Ok(&f)
}

/// Runs every check on every configuration with a fixed seed.
pub fn run_all(seed: u64, scale: Scale) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let configs = random::configurations();
    let n = scale.cases();
    let mut out = Vec::new();
    let mut per_config = |name: &'static str, rng: &mut ChaCha8Rng, f: &dyn Fn(&mut ChaCha8Rng, &Domain) -> bool| {
        let mut passed = true;
        for dom in &configs {
            for _ in 0..n {
                passed &= f(rng, dom);
            }
        }
        out.push(CheckResult { name, cases: n * configs.len(), passed });
    };
    per_config("ring-laws", &mut rng, &|r, d| ring_laws(r, d));
    per_config("chain-rule", &mut rng, &|r, d| chain_rule(r, d));
    per_config("neumann-inverse", &mut rng, &|r, d| neumann(r, d));
    per_config("inverse-function", &mut rng, &|r, d| inverse_function(r, d));
    per_config("exterior-calculus", &mut rng, &|r, d| exterior(r, d));
    per_config("round-trip", &mut rng, &|r, d| round_trip(r, d));
    let mut passed = true;
    for _ in 0..n {
        passed &= homotopy(&mut rng);
    }
    out.push(CheckResult { name: "homotopy", cases: n, passed });
    out.push(CheckResult { name: "poincare", cases: configs.len(), passed: configs.iter().all(poincare) });
    out
}
