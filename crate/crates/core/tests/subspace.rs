mod common;

use std::collections::BTreeSet;

use common::{ctx, fp_span};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankdec::subspace::{all_subspaces, random_subspace};
use rankdec::{Ctx, FieldElement, Subspace};

fn set(u: &Subspace) -> BTreeSet<FieldElement> {
    u.elements().collect()
}

fn dual_by_search(f: &Ctx, u: &Subspace) -> BTreeSet<FieldElement> {
    let e = u.base_e();
    let gens: Vec<FieldElement> = u.fp_basis();
    f.elements()
        .filter(|&x| gens.iter().all(|&g| f.trace_rel(f.mul(x, g), e).unwrap().is_zero()))
        .collect()
}

fn products_by_search(f: &Ctx, u: &Subspace, v: &Subspace) -> BTreeSet<FieldElement> {
    let gens: Vec<FieldElement> = u.elements().flat_map(|a| v.elements().map(move |b| (a, b))).map(|(a, b)| f.mul(a, b)).collect();
    fp_span(f, &gens)
}

#[test]
fn reference_spaces_in_f16_and_f32() {
    let f = ctx(2, 1, 4);
    let l = f.x();
    let l2 = f.mul(l, l);
    let u = Subspace::span(&f, &[f.one(), l], 1).unwrap();
    let v = Subspace::span(&f, &[l, l2], 1).unwrap();
    let meet = u.intersect(&v).unwrap();
    assert_eq!(meet.dim(), 1);
    assert!(meet.contains(l));
    assert_eq!(u.scale(l).unwrap(), v);

    let f = ctx(2, 1, 5);
    let l = f.elements_of_degree(5).unwrap()[0];
    let a = Subspace::geometric(&f, l, 2).unwrap();
    let b = Subspace::geometric(&f, l, 3).unwrap();
    assert_eq!(a.product(&b).unwrap().dim(), 4);
}

#[test]
fn geometric_space_in_subfield() {
    let f = ctx(2, 1, 6);
    let l = f.elements_of_degree(3).unwrap()[0];
    let u = Subspace::geometric(&f, l, 2).unwrap();
    assert_eq!(u.dim(), 2);
    assert!(u.elements().all(|x| f.is_in_subfield(x, 3)));
}

#[test]
fn subfield_dual_in_f16() {
    let f = ctx(2, 1, 4);
    for l in f.elements_of_degree(2).unwrap() {
        let (holds, c) = rankdec::subspace::verify_dual_subfield(&f, l, 1).unwrap();
        assert!(holds);
        assert!(c.is_some());
    }
}

#[test]
fn duals_match_search_for_every_plane_in_f16() {
    let f = ctx(2, 1, 4);
    for u in all_subspaces(&f, 2).unwrap() {
        assert_eq!(set(&u.dual()), dual_by_search(&f, &u));
    }
    assert_eq!(all_subspaces(&f, 2).unwrap().len(), 35);
}

#[test]
fn subspace_counts_are_gaussian_binomials() {
    let f = ctx(2, 1, 5);
    let counts: Vec<usize> = (0..=5).map(|d| all_subspaces(&f, d).unwrap().len()).collect();
    assert_eq!(counts, [1, 31, 155, 155, 31, 1]);
    let f = ctx(3, 1, 3);
    assert_eq!(all_subspaces(&f, 1).unwrap().len(), 13);
}

#[test]
fn relative_structure() {
    let f = ctx(2, 1, 6);
    let u = Subspace::subfield(&f, 3, 3).unwrap();
    assert_eq!((u.dim(), u.dim_fq()), (1, 3));
    assert_eq!(u.with_base(1).unwrap().dim(), 3);
    let w = Subspace::span(&f, &[f.x()], 2).unwrap();
    assert!(w.is_subfield_linear(2).unwrap());
    assert!(!w.is_subfield_linear(3).unwrap());
    assert!(w.with_base(3).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dual_matches_trace_search(seed in any::<u64>(), shape in prop::sample::select(vec![(2u64, 6usize, 1usize), (2, 6, 2), (2, 6, 3), (3, 4, 1), (3, 4, 2), (5, 3, 1)])) {
        let (p, m, e) = shape;
        let f = ctx(p, 1, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = (seed as usize) % (m / e + 1);
        let u = random_subspace(&f, e, dim, &mut rng).unwrap();
        prop_assert_eq!(set(&u.dual()), dual_by_search(&f, &u));
        prop_assert_eq!(u.dual().dim() + u.dim(), m / e);
    }

    #[test]
    fn lattice_operations_match_sets(seed in any::<u64>(), d1 in 0usize..=4, d2 in 0usize..=4) {
        let f = ctx(2, 1, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subspace(&f, 1, d1, &mut rng).unwrap();
        let v = random_subspace(&f, 1, d2, &mut rng).unwrap();
        let both: BTreeSet<_> = set(&u).intersection(&set(&v)).copied().collect();
        prop_assert_eq!(set(&u.intersect(&v).unwrap()), both);
        let gens: Vec<_> = u.basis().iter().chain(v.basis()).copied().collect();
        prop_assert_eq!(set(&u.sum(&v).unwrap()), fp_span(&f, &gens));
        prop_assert_eq!(u.sum(&v).unwrap().dim() + u.intersect(&v).unwrap().dim(), d1 + d2);
    }

    #[test]
    fn product_matches_pairwise_span(seed in any::<u64>(), d1 in 1usize..=3, d2 in 1usize..=3) {
        let f = ctx(3, 1, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subspace(&f, 1, d1, &mut rng).unwrap();
        let v = random_subspace(&f, 1, d2, &mut rng).unwrap();
        let prod = u.product(&v).unwrap();
        prop_assert_eq!(set(&prod), products_by_search(&f, &u, &v));
        prop_assert_eq!(prod, v.product(&u).unwrap());
    }

    #[test]
    fn scaling_and_witness(seed in any::<u64>(), c in 1u64..64, d in 1usize..=5) {
        let f = ctx(2, 1, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subspace(&f, 1, d, &mut rng).unwrap();
        let c = FieldElement::from_raw(c);
        let v = u.scale(c).unwrap();
        let expected: BTreeSet<_> = u.elements().map(|x| f.mul(c, x)).collect();
        prop_assert_eq!(set(&v), expected);
        let w = v.scalar_witness(&u).unwrap().expect("a scalar exists");
        prop_assert_eq!(u.scale(w).unwrap(), v);
    }

    #[test]
    fn record_roundtrip(seed in any::<u64>(), d in 0usize..=3) {
        let f = ctx(2, 1, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_subspace(&f, 2, d, &mut rng).unwrap();
        let json = serde_json::to_string(&u.to_record()).unwrap();
        let back = Subspace::from_record(&f, &serde_json::from_str(&json).unwrap()).unwrap();
        prop_assert_eq!(back, u);
    }
}
