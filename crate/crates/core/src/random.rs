//! Seeded random instances: QME and Maurer–Cartan elements, solutions built
//! by the perturbative solvers, first-order corruptions of those solutions,
//! and Lie algebra maps for morphism batteries.
use std::collections::BTreeMap;

use num::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Elem, GradedAlgebra, Term};
use crate::bv::{qme_solve_perturbative, BvInfty, QmeOutcome};
use crate::constructions::{
    embed_length_one, from_hbar_mc_element, hbar_dg_lie, length_one_part, to_hbar_mc_element, BiDgLieData,
};
use crate::conv::ConvMap;
use crate::error::Result;
use crate::linalg::kernel_columns;
use crate::linfty::{mc_solve_perturbative, LInfty, McOutcome};
use crate::ring::ArtinRing;
use crate::scalar::{frac, Q};
use crate::sym::SymWord;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nonzero rational `p/q` with `|p| ≤ 3`, `1 ≤ q ≤ 3`.
pub fn coefficient(rng: &mut impl Rng) -> Q {
    let p = *[-3, -2, -1, 1, 2, 3].choose(rng).expect("nonempty");
    frac(p, rng.gen_range(1..=3))
}

fn order_one(ring: &ArtinRing) -> Vec<usize> {
    (0..ring.dim()).filter(|&r| ring.order(r) == 1).collect()
}

/// Basis of the kernel of the linear map sending the `j`-th unknown to
/// `images[j]`.
fn kernel_of<B: Clone + Ord>(images: &[Elem<B>]) -> Vec<Vec<Q>> {
    let mut rows: BTreeMap<Term<B>, usize> = BTreeMap::new();
    for e in images {
        for (t, _) in e.terms() {
            let n = rows.len();
            rows.entry(t.clone()).or_insert(n);
        }
    }
    let cols: Vec<Vec<Q>> = images
        .iter()
        .map(|e| {
            let mut c = vec![Q::zero(); rows.len()];
            for (t, x) in e.terms() {
                c[rows[t]] = x.clone();
            }
            c
        })
        .collect();
    kernel_columns(&cols, rows.len())
}

fn combine<B: Clone + Ord>(units: &[Elem<B>], coeffs: &[Q]) -> Elem<B> {
    let mut out = Elem::zero();
    for (u, c) in units.iter().zip(coeffs) {
        out.add_scaled(u, c);
    }
    out
}

/// The pairs `(j, b)` with `|b| + 2j = 2`, `j < K`: the slots of a QME element.
pub fn qme_slots<A: GradedAlgebra>(v: &BvInfty<A>) -> Vec<(i32, A::Basis)>
where
    A::Basis: 'static,
{
    let alg = v.algebra();
    (0..v.hbar_cutoff() as i32)
        .flat_map(|j| {
            v.basis()
                .into_iter()
                .filter(move |b| alg.degree(b) + 2 * j as i64 == 2)
                .map(move |b| (j, b))
        })
        .collect()
}

/// A random degree-two element of `V[[ħ]] ⊗ m` with up to `terms` terms.
pub fn random_qme_element<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    rng: &mut impl Rng,
    terms: usize,
) -> Elem<A::Basis>
where
    A::Basis: 'static,
{
    let slots = qme_slots(v);
    let mut out = Elem::zero();
    if slots.is_empty() || ring.dim() < 2 {
        return out;
    }
    for _ in 0..terms {
        let (j, b) = slots.choose(rng).expect("nonempty").clone();
        let r = rng.gen_range(1..ring.dim());
        out.add_term(Term { hbar: j, ring: r, basis: b }, coefficient(rng));
    }
    out
}

/// A random `d̂`-closed first-order seed on the order-one part of `m`.
pub fn random_qme_seed<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    rng: &mut impl Rng,
) -> Elem<A::Basis>
where
    A::Basis: 'static,
{
    let units: Vec<Elem<A::Basis>> = qme_slots(v)
        .into_iter()
        .map(|(j, b)| Elem::term(b, j, 0, Q::from_integer(1.into())))
        .collect();
    let images: Vec<_> = units.iter().map(|u| v.dhat().apply(u)).collect();
    let kernel = kernel_of(&images);
    let mut out = Elem::zero();
    if kernel.is_empty() {
        return out;
    }
    for r in order_one(ring) {
        let mut coeffs = vec![Q::zero(); units.len()];
        for k in &kernel {
            let c = if rng.gen_bool(0.7) { coefficient(rng) } else { Q::zero() };
            for (x, y) in coeffs.iter_mut().zip(k) {
                *x += &c * y;
            }
        }
        out.add_assign(&combine(&units, &coeffs).with_ring(r));
    }
    out
}

/// A QME solution lifted from a random closed seed, or `None` if the seed is
/// obstructed.
pub fn random_qme_solution<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    rng: &mut impl Rng,
) -> Result<Option<Elem<A::Basis>>>
where
    A::Basis: 'static,
{
    let seed = random_qme_seed(v, ring, rng);
    Ok(match qme_solve_perturbative(v, ring, &seed)? {
        QmeOutcome::Solved(s) => Some(s),
        QmeOutcome::Obstructed(_) => None,
    })
}

/// Adds `c ħ^j b ⊗ r` with `d̂(ħ^j b) ≠ 0` and `r` of order one. The QME
/// residual then changes by `c d̂(ħ^j b) r` in its order-one part, so a
/// solution stops being one. `None` if `d̂` vanishes on every slot.
pub fn corrupt_qme<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    rng: &mut impl Rng,
    s: &Elem<A::Basis>,
) -> Option<Elem<A::Basis>>
where
    A::Basis: 'static,
{
    let slots: Vec<_> = qme_slots(v)
        .into_iter()
        .filter(|(j, b)| !v.dhat().on_basis(b).hbar_shift(*j).is_zero())
        .collect();
    let (j, b) = slots.choose(rng)?.clone();
    let r = *order_one(ring).choose(rng)?;
    Some(s.add(&Elem::term(b, j, r, coefficient(rng))))
}

fn mc_slots(l: &LInfty) -> Vec<SymWord> {
    let alg = l.shifted_algebra();
    (0..l.space().dim())
        .filter(|&i| alg.generator_degree(i) == 0)
        .map(|i| SymWord(vec![i]))
        .collect()
}

fn l1(l: &LInfty, x: &Elem<SymWord>) -> Elem<SymWord> {
    l.codifferential()
        .to_operator(l.shifted_algebra())
        .apply(x)
        .filter(|t| t.basis.len() == 1)
}

/// A random `l_1`-closed first-order Maurer–Cartan seed.
pub fn random_mc_seed(l: &LInfty, ring: &ArtinRing, rng: &mut impl Rng) -> Elem<SymWord> {
    let units: Vec<Elem<SymWord>> = mc_slots(l).into_iter().map(Elem::basis).collect();
    let images: Vec<_> = units.iter().map(|u| l1(l, u)).collect();
    let kernel = kernel_of(&images);
    let mut out = Elem::zero();
    for r in order_one(ring) {
        let mut coeffs = vec![Q::zero(); units.len()];
        for k in &kernel {
            let c = coefficient(rng);
            for (x, y) in coeffs.iter_mut().zip(k) {
                *x += &c * y;
            }
        }
        out.add_assign(&combine(&units, &coeffs).with_ring(r));
    }
    out
}

pub fn random_mc_solution(l: &LInfty, ring: &ArtinRing, rng: &mut impl Rng) -> Result<Option<Elem<SymWord>>> {
    let seed = random_mc_seed(l, ring, rng);
    Ok(match mc_solve_perturbative(l, ring, &seed)? {
        McOutcome::Solved(s) => Some(s),
        McOutcome::Obstructed(_) => None,
    })
}

/// Adds `c e ⊗ r` with `l_1 e ≠ 0` and `r` of order one.
pub fn corrupt_mc(l: &LInfty, ring: &ArtinRing, rng: &mut impl Rng, s: &Elem<SymWord>) -> Option<Elem<SymWord>> {
    let slots: Vec<_> = mc_slots(l)
        .into_iter()
        .filter(|w| !l1(l, &Elem::basis(w.clone())).is_zero())
        .collect();
    let w = slots.choose(rng)?.clone();
    let r = *order_one(ring).choose(rng)?;
    Some(s.add(&Elem::term(w, 0, r, coefficient(rng))))
}

/// A random solution of the quantum master equation of a bi-dg Lie algebra
/// modulo `ħ^K`, as a length-one element of `S(g[-1]) ⊗ R[[ħ]]`.
pub fn random_bidg_qm_solution(
    b: &BiDgLieData,
    ring: &ArtinRing,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Option<Elem<SymWord>>> {
    let l = LInfty::from_dg_lie(&hbar_dg_lie(b, k)?);
    Ok(random_mc_solution(&l, ring, rng)?.map(|x| embed_length_one(&from_hbar_mc_element(b, &x))))
}

/// A first-order corruption of a bi-dg QM element, through `g[[ħ]]/ħ^K`.
pub fn corrupt_bidg_qm(
    b: &BiDgLieData,
    ring: &ArtinRing,
    k: usize,
    rng: &mut impl Rng,
    s: &Elem<SymWord>,
) -> Result<Option<Elem<SymWord>>> {
    let l = LInfty::from_dg_lie(&hbar_dg_lie(b, k)?);
    let flat = to_hbar_mc_element(b, k, &length_one_part(b, s)?)?;
    Ok(corrupt_mc(&l, ring, rng, &flat).map(|x| embed_length_one(&from_hbar_mc_element(b, &x))))
}

/// A random Lie algebra endomorphism of `heis3`: `x, y` go anywhere and
/// `z ↦ det z`, where `det` is the determinant of the `x, y` block.
pub fn random_heis3_endomorphism(rng: &mut impl Rng) -> ConvMap<SymWord, SymWord> {
    let a: Vec<Q> = (0..3).map(|_| small(rng)).collect();
    let b: Vec<Q> = (0..3).map(|_| small(rng)).collect();
    let det = &a[0] * &b[1] - &a[1] * &b[0];
    let img = |c: &[Q]| {
        let mut e = Elem::zero();
        for (i, x) in c.iter().enumerate() {
            e.add_term(Term { hbar: 0, ring: 0, basis: SymWord(vec![i]) }, x.clone());
        }
        e
    };
    let mut f = ConvMap::zero();
    f.set(SymWord(vec![0]), img(&a));
    f.set(SymWord(vec![1]), img(&b));
    f.set(SymWord(vec![2]), img(&[Q::zero(), Q::zero(), det]));
    f
}

/// Breaks the endomorphism by shifting the image of `z`.
pub fn corrupt_heis3_endomorphism(rng: &mut impl Rng, f: &ConvMap<SymWord, SymWord>) -> ConvMap<SymWord, SymWord> {
    let mut g = f.clone();
    g.add_at(&SymWord(vec![2]), &Elem::basis(SymWord(vec![2])).scale(&coefficient(rng)));
    g
}

/// A rational in `[-2, 2]`, zero allowed.
fn small(rng: &mut impl Rng) -> Q {
    if rng.gen_bool(0.2) {
        Q::zero()
    } else {
        coefficient(rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn seeds_are_closed_and_deterministic() {
        let l = LInfty::from_dg_lie(&fixtures::mc_dg_lie());
        let ring = ArtinRing::truncated_polynomial(3);
        let s1 = random_mc_seed(&l, &ring, &mut rng(3));
        let s2 = random_mc_seed(&l, &ring, &mut rng(3));
        assert_eq!(s1, s2);
        assert!(!s1.is_zero());
        assert!(l1(&l, &s1).is_zero());
        let sol = random_mc_solution(&l, &ring, &mut rng(3)).unwrap().unwrap();
        assert!(l.mc_is_solution(&ring, &sol).unwrap());
        let bad = corrupt_mc(&l, &ring, &mut rng(4), &sol).unwrap();
        assert!(!l.mc_is_solution(&ring, &bad).unwrap());
    }

    #[test]
    fn qme_seeds_are_closed() {
        let l = LInfty::from_dg_lie(&fixtures::heis3());
        let v = BvInfty::from_linfty(&l, 4, 3).unwrap();
        let ring = ArtinRing::truncated_polynomial(3);
        let mut r = rng(5);
        for _ in 0..5 {
            let seed = random_qme_seed(&v, &ring, &mut r);
            assert!(v.dhat().apply(&seed).is_zero());
            let e = random_qme_element(&v, &ring, &mut r, 3);
            v.validate_qme_element(&ring, &e).unwrap();
        }
    }
}
