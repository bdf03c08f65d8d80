use proptest::prelude::*;

use qdt_core::algebra::{Ambient, Elem, GradedAlgebra};
use qdt_core::bv::BvInfty;
use qdt_core::constructions::ce_bv_from_dg_lie;
use qdt_core::conv::ConvMap;
use qdt_core::fixtures;
use qdt_core::linfty::{quillen_bijection_check, DgLie, LInfty};
use qdt_core::morphism::{
    check_bv_morphism, compose_bv_morphisms, linfty_morphism_check, linfty_morphism_to_bvinfty,
    ring_map_to_bv_morphism, theorem_first_bijection_check, OrderConvention,
};
use qdt_core::random::{self, rng};
use qdt_core::scalar::{q, sign_pow};
use qdt_core::tensor::{TensorAlgebra, TensorWord};
use qdt_core::{ArtinRing, CoproductKind, GradedVectorSpace, RingMap, SymAlgebra, SymWord};

fn small() -> impl Strategy<Value = i64> {
    -3i64..=3
}

fn sym3() -> SymAlgebra {
    SymAlgebra::new(GradedVectorSpace::new([("a", 1), ("b", 2), ("c", 0)]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sym_product_graded_commutative_and_associative(
        x in prop::collection::vec(0usize..3, 0..3),
        y in prop::collection::vec(0usize..3, 0..3),
        z in prop::collection::vec(0usize..3, 0..3),
    ) {
        let alg = sym3();
        let ring = ArtinRing::ground();
        let amb = Ambient::new(&alg, &ring);
        let e = |w: &[usize]| {
            let labels: Vec<&str> = w.iter().map(|&i| ["a", "b", "c"][i]).collect();
            alg.word(&labels).unwrap()
        };
        let (ex, ey, ez) = (e(&x), e(&y), e(&z));
        let deg = |w: &Elem<SymWord>| w.terms().next().map(|(t, _)| alg.degree(&t.basis)).unwrap_or(0);
        if !ex.is_zero() && !ey.is_zero() {
            let s = sign_pow(deg(&ex) * deg(&ey));
            prop_assert_eq!(amb.mul(&ex, &ey), amb.mul(&ey, &ex).scale(&s));
        }
        prop_assert_eq!(amb.mul(&amb.mul(&ex, &ey), &ez), amb.mul(&ex, &amb.mul(&ey, &ez)));
    }

    #[test]
    fn shuffle_graded_commutative(
        x in prop::collection::vec(0usize..3, 0..4),
        y in prop::collection::vec(0usize..3, 0..4),
    ) {
        let space = GradedVectorSpace::new([("a", 1), ("b", 2), ("c", 0)]).unwrap();
        let t = TensorAlgebra::new(space, CoproductKind::Shuffle);
        let ring = ArtinRing::ground();
        let amb = Ambient::new(&t, &ring);
        let (wx, wy) = (TensorWord(x), TensorWord(y));
        let s = sign_pow(t.degree(&wx) * t.degree(&wy));
        let (ex, ey) = (Elem::basis(wx), Elem::basis(wy));
        prop_assert_eq!(amb.mul(&ex, &ey), amb.mul(&ey, &ex).scale(&s));
    }

    #[test]
    fn ce_certifies_iff_jacobi(c in prop::collection::vec(small(), 9)) {
        // an arbitrary bracket on a 3-dim degree-zero space
        let space = GradedVectorSpace::new([("x", 0), ("y", 0), ("z", 0)]).unwrap();
        let pairs = [(0, 1), (0, 2), (1, 2)];
        let mut br = Vec::new();
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..3 {
                if c[3 * p + k] != 0 {
                    br.push((i, j, k, q(c[3 * p + k])));
                }
            }
        }
        let g = DgLie::unchecked(space, &[], &br).unwrap();
        let rep = ce_bv_from_dg_lie(&g, 4).unwrap().certify();
        prop_assert_eq!(rep.delta_squared.holds, g.check_axioms().holds);
        prop_assert!(rep.delta_order.holds && rep.commute.holds && rep.delta_unit.holds);
    }

    #[test]
    fn theorem_first_on_arbitrary_elements(seed in any::<u64>(), terms in 1usize..4) {
        let l = LInfty::from_dg_lie(&fixtures::heis3());
        let v = BvInfty::from_linfty(&l, 4, 3).unwrap();
        let ring = ArtinRing::truncated_polynomial(3);
        let s = random::random_qme_element(&v, &ring, &mut rng(seed), terms);
        let rep = theorem_first_bijection_check(&v, &ring, &s).unwrap();
        prop_assert!(rep.bijection_holds(), "{:?}", rep);
        prop_assert!(rep.morphism.order.holds && rep.morphism.unit.holds);
    }

    #[test]
    fn quillen_on_arbitrary_elements(cs in prop::collection::vec(small(), 4)) {
        let l = LInfty::from_dg_lie(&fixtures::mc_dg_lie());
        let ring = ArtinRing::truncated_polynomial(3);
        // x, c are the generators of degree zero in g[1]
        let mut s = Elem::zero();
        for (k, c) in cs.iter().enumerate() {
            s.add_assign(&Elem::term(SymWord(vec![k % 2]), 0, 1 + k / 2, q(*c)));
        }
        let rep = quillen_bijection_check(&l, &ring, &s, 3).unwrap();
        prop_assert!(rep.bijection_holds(), "{:?}", rep);
    }

    #[test]
    fn qme_forms_agree(seed in any::<u64>(), terms in 1usize..5) {
        let bv = ce_bv_from_dg_lie(&fixtures::sl2(), 4).unwrap();
        let ring = ArtinRing::truncated_polynomial(3);
        let s = random::random_qme_element(bv.as_infty(), &ring, &mut rng(seed), terms);
        let exp = bv.as_infty().qme_exp_check(&ring, &s).unwrap().holds;
        prop_assert_eq!(exp, bv.qme_residual(&ring, &s).unwrap().is_zero());
        prop_assert!(bv.conjugation_identity_check(&ring, &s).unwrap().holds);
    }

    #[test]
    fn ring_maps_are_functorial(a in small(), b in small(), c in small()) {
        prop_assume!(a != 0 && c != 0);
        let (r4, r3, r2) = (
            ArtinRing::truncated_polynomial(4),
            ArtinRing::truncated_polynomial(3),
            ArtinRing::truncated_polynomial(2),
        );
        // t ↦ a t + b t², then t ↦ c t
        let f = RingMap::new(&r4, &r3, vec![
            vec![(0, q(1))],
            vec![(1, q(a)), (2, q(b))],
            vec![(2, q(a * a))],
            vec![],
        ]).unwrap();
        let g = RingMap::new(&r3, &r2, vec![vec![(0, q(1))], vec![(1, q(c))], vec![]]).unwrap();
        let pf = ring_map_to_bv_morphism(&f, &r4, &r3).unwrap();
        let pg = ring_map_to_bv_morphism(&g, &r3, &r2).unwrap();
        prop_assert!(check_bv_morphism(&pf, OrderConvention::Strict).holds());
        let composite = compose_bv_morphisms(&pf, &pg).unwrap();
        let direct = ring_map_to_bv_morphism(&f.then(&g), &r4, &r2).unwrap();
        for w in 0..r2.dim() {
            prop_assert_eq!(composite.map().get(&w), direct.map().get(&w));
        }
    }

    #[test]
    fn linfty_and_bvinfty_morphism_checks_agree(cs in prop::collection::vec(small(), 6)) {
        let a = LInfty::from_dg_lie(&fixtures::abelian2());
        let h = LInfty::from_dg_lie(&fixtures::heis3());
        let mut f = ConvMap::zero();
        for (i, chunk) in cs.chunks(3).enumerate() {
            let mut img = Elem::zero();
            for (j, c) in chunk.iter().enumerate() {
                img.add_assign(&Elem::term(SymWord(vec![j]), 0, 0, q(*c)));
            }
            f.set(SymWord(vec![i]), img);
        }
        let linfty = linfty_morphism_check(&a, &h, &f, 3).unwrap().holds;
        let phi = linfty_morphism_to_bvinfty(&a, &h, &f, 3).unwrap();
        prop_assert_eq!(linfty, check_bv_morphism(&phi, OrderConvention::Strict).holds());
        // images of a, b commute in heis3 exactly when the x, y block is singular
        prop_assert_eq!(linfty, cs[0] * cs[4] == cs[1] * cs[3]);
    }

    #[test]
    fn composition_is_associative(seed in any::<u64>()) {
        let h = LInfty::from_dg_lie(&fixtures::heis3());
        let mut r = rng(seed);
        let fs: Vec<_> = (0..3)
            .map(|_| linfty_morphism_to_bvinfty(&h, &h, &random::random_heis3_endomorphism(&mut r), 3).unwrap())
            .collect();
        let left = compose_bv_morphisms(&compose_bv_morphisms(&fs[0], &fs[1]).unwrap(), &fs[2]).unwrap();
        let right = compose_bv_morphisms(&fs[0], &compose_bv_morphisms(&fs[1], &fs[2]).unwrap()).unwrap();
        for w in fs[2].source().algebra().basis_up_to(3) {
            prop_assert_eq!(left.map().get(&w), right.map().get(&w));
        }
    }
}
