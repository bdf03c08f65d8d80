//! The graded symmetric algebra `S(V)` on a finite graded basis, viewed both as
//! a commutative algebra (concatenation with Koszul signs) and as a
//! cocommutative coalgebra (shuffle coproduct, or the trivial one).
//!
//! Words are stored in normal form: factors sorted by `(degree, declaration
//! index)`. A word with a repeated odd factor is zero.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::{Ambient, Coalgebra, Elem, GradedAlgebra, Operator, Term};
use crate::error::{Error, Result};
use crate::graded::{koszul_sign_unchecked, GradedVectorSpace};
use crate::report::Verdict;
use crate::scalar::{q, Q};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SymWord(pub Vec<usize>);

impl SymWord {
    pub fn empty() -> Self {
        SymWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[usize] {
        &self.0
    }
}

/// Which conilpotent cocommutative coproduct the algebra carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoproductKind {
    #[default]
    Shuffle,
    /// `δ(1) = 1⊗1`, `δ(a) = a⊗1 + 1⊗a` on the augmentation ideal.
    Trivial,
}

#[derive(Clone, Debug)]
pub struct SymAlgebra {
    space: Arc<GradedVectorSpace>,
    rank: Vec<usize>,
    coproduct: CoproductKind,
}

impl SymAlgebra {
    pub fn new(space: GradedVectorSpace) -> Self {
        Self::with_coproduct(space, CoproductKind::Shuffle)
    }

    pub fn with_coproduct(space: GradedVectorSpace, coproduct: CoproductKind) -> Self {
        let mut order: Vec<usize> = (0..space.dim()).collect();
        order.sort_by_key(|&i| (space.degree(i), i));
        let mut rank = vec![0; space.dim()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        Self {
            space: Arc::new(space),
            rank,
            coproduct,
        }
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn coproduct_kind(&self) -> CoproductKind {
        self.coproduct
    }

    pub fn generator_degree(&self, i: usize) -> i64 {
        self.space.degree(i)
    }

    pub fn word_degree(&self, w: &SymWord) -> i64 {
        w.0.iter().map(|&i| self.space.degree(i)).sum()
    }

    /// Sorts factors into normal form. Returns `None` if the product vanishes.
    pub fn normalize(&self, factors: &[usize]) -> Option<(SymWord, i64)> {
        let mut v = factors.to_vec();
        let mut sign = 1i64;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && self.rank[v[j - 1]] > self.rank[v[j]] {
                if self.space.degree(v[j - 1]) * self.space.degree(v[j]) % 2 != 0 {
                    sign = -sign;
                }
                v.swap(j - 1, j);
                j -= 1;
            }
        }
        for w in v.windows(2) {
            if w[0] == w[1] && self.space.degree(w[0]) % 2 != 0 {
                return None;
            }
        }
        Some((SymWord(v), sign))
    }

    pub fn generator(&self, i: usize) -> SymWord {
        SymWord(vec![i])
    }

    /// The element `x_1 x_2 ... x_n` for the given labels, in normal form.
    pub fn word(&self, labels: &[&str]) -> Result<Elem<SymWord>> {
        let idx = labels
            .iter()
            .map(|l| self.space.index_of(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(match self.normalize(&idx) {
            Some((w, s)) => Elem::term(w, 0, 0, q(s)),
            None => Elem::zero(),
        })
    }

    fn degrees_of(&self, factors: &[usize]) -> Vec<i64> {
        factors.iter().map(|&i| self.space.degree(i)).collect()
    }

    /// All ways of splitting the positions of `w` into `(I, I^c)`, `|I| = k`,
    /// with the Koszul sign of moving `w_I` to the front.
    pub fn splittings(&self, w: &SymWord, k: usize) -> Vec<(SymWord, SymWord, i64)> {
        let n = w.len();
        let degs = self.degrees_of(&w.0);
        let mut out = Vec::new();
        for subset in subsets(n, k) {
            let mut perm = subset.clone();
            perm.extend((0..n).filter(|i| !subset.contains(i)));
            let sign = koszul_sign_unchecked(&perm, &degs);
            let left = SymWord(subset.iter().map(|&i| w.0[i]).collect());
            let right = SymWord(perm[k..].iter().map(|&i| w.0[i]).collect());
            out.push((left, right, sign));
        }
        out
    }

    /// Product of two elements without ħ or ring structure.
    pub fn mul_elems(&self, x: &Elem<SymWord>, y: &Elem<SymWord>) -> Elem<SymWord> {
        let ring = crate::ring::ArtinRing::ground();
        Ambient::new(self, &ring).mul(x, y)
    }
}

/// `k`-element subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

impl GradedAlgebra for SymAlgebra {
    type Basis = SymWord;

    fn degree(&self, b: &SymWord) -> i64 {
        self.word_degree(b)
    }

    fn unit(&self) -> SymWord {
        SymWord::empty()
    }

    fn multiply(&self, a: &SymWord, b: &SymWord) -> Vec<(SymWord, Q)> {
        let mut f = a.0.clone();
        f.extend_from_slice(&b.0);
        match self.normalize(&f) {
            Some((w, s)) => vec![(w, q(s))],
            None => vec![],
        }
    }

    fn size(&self, b: &SymWord) -> usize {
        b.len()
    }

    fn basis_up_to(&self, max_len: usize) -> Vec<SymWord> {
        let mut gens: Vec<usize> = (0..self.space.dim()).collect();
        gens.sort_by_key(|&i| self.rank[i]);
        let mut out = vec![SymWord::empty()];
        let mut layer = vec![SymWord::empty()];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &layer {
                let last_rank = w.0.last().map(|&i| self.rank[i]);
                for &g in &gens {
                    let r = self.rank[g];
                    let ok = match last_rank {
                        None => true,
                        Some(lr) => r > lr || (r == lr && self.space.degree(g) % 2 == 0),
                    };
                    if ok {
                        let mut v = w.0.clone();
                        v.push(g);
                        next.push(SymWord(v));
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn label(&self, b: &SymWord) -> String {
        if b.is_empty() {
            return "1".into();
        }
        b.0.iter()
            .map(|&i| self.space.label(i).to_string())
            .collect::<Vec<_>>()
            .join("·")
    }
}

impl Coalgebra for SymAlgebra {
    fn coproduct(&self, b: &SymWord) -> Vec<(SymWord, SymWord, Q)> {
        match self.coproduct {
            CoproductKind::Trivial => {
                if b.is_empty() {
                    vec![(SymWord::empty(), SymWord::empty(), Q::one())]
                } else {
                    vec![
                        (b.clone(), SymWord::empty(), Q::one()),
                        (SymWord::empty(), b.clone(), Q::one()),
                    ]
                }
            }
            CoproductKind::Shuffle => {
                let mut acc: BTreeMap<(SymWord, SymWord), Q> = BTreeMap::new();
                for k in 0..=b.len() {
                    for (l, r, s) in self.splittings(b, k) {
                        *acc.entry((l, r)).or_insert_with(Q::zero) += q(s);
                    }
                }
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((l, r), c)| (l, r, c))
                    .collect()
            }
        }
    }

    fn weight(&self, b: &SymWord) -> usize {
        match self.coproduct {
            CoproductKind::Shuffle => b.len(),
            CoproductKind::Trivial => usize::from(!b.is_empty()),
        }
    }
}

/// An operator on `S(V)` in normal form: `D(w) = Σ_I ± f(w_I) · w_{I^c}`,
/// summing over sub-multisets `w_I` of positions on which the symbol `f` is
/// defined, with the Koszul sign of moving `w_I` to the front.
///
/// With `f` supported on words of length `k` landing in `V` this is the
/// coderivation extension of a corestriction `S^k(V) -> V`; in general an
/// operator whose symbol is supported in lengths `<= k` has order `<= k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordOperator {
    degree: i64,
    symbol: BTreeMap<SymWord, Elem<SymWord>>,
}

impl WordOperator {
    pub fn new(degree: i64) -> Self {
        Self {
            degree,
            symbol: BTreeMap::new(),
        }
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn symbol(&self) -> &BTreeMap<SymWord, Elem<SymWord>> {
        &self.symbol
    }

    pub fn is_zero(&self) -> bool {
        self.symbol.is_empty()
    }

    /// Adds `value` to the symbol on the normal-form word `w`.
    pub fn add(&mut self, alg: &SymAlgebra, w: &SymWord, value: &Elem<SymWord>) -> Result<()> {
        let wd = alg.word_degree(w);
        for (t, _) in value.terms() {
            let d = alg.word_degree(&t.basis) + 2 * t.hbar as i64;
            if d - wd != self.degree {
                return Err(Error::DegreeMismatch(format!(
                    "symbol on {} has degree {}, operator degree {}",
                    alg.label(w),
                    d - wd,
                    self.degree
                )));
            }
        }
        let entry = self.symbol.entry(w.clone()).or_default();
        entry.add_assign(value);
        if entry.is_zero() {
            self.symbol.remove(w);
        }
        Ok(())
    }

    /// Sets the symbol on a product of generators given in any order; the
    /// value is adjusted by the normalization sign.
    pub fn add_unordered(
        &mut self,
        alg: &SymAlgebra,
        factors: &[usize],
        value: &Elem<SymWord>,
    ) -> Result<()> {
        match alg.normalize(factors) {
            Some((w, s)) => self.add(alg, &w, &value.scale(&q(s))),
            None => {
                if value.is_zero() {
                    Ok(())
                } else {
                    Err(Error::Precondition(
                        "symbol on a vanishing word must be zero".into(),
                    ))
                }
            }
        }
    }

    pub fn value(&self, w: &SymWord) -> Elem<SymWord> {
        self.symbol.get(w).cloned().unwrap_or_default()
    }

    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.symbol.keys().map(|w| w.len()).collect();
        a.sort();
        a.dedup();
        a
    }

    /// Restriction of the symbol to words of one length.
    pub fn component(&self, arity: usize) -> WordOperator {
        WordOperator {
            degree: self.degree,
            symbol: self
                .symbol
                .iter()
                .filter(|(w, _)| w.len() == arity)
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
        }
    }

    pub fn plus(&self, other: &WordOperator) -> WordOperator {
        let mut out = self.clone();
        for (w, v) in &other.symbol {
            let e = out.symbol.entry(w.clone()).or_default();
            e.add_assign(v);
            if e.is_zero() {
                out.symbol.remove(w);
            }
        }
        out
    }

    pub fn scaled(&self, s: &Q) -> WordOperator {
        WordOperator {
            degree: self.degree,
            symbol: self
                .symbol
                .iter()
                .map(|(w, v)| (w.clone(), v.scale(s)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// True if every symbol value lies in `V` (word length one).
    pub fn lands_in_generators(&self) -> bool {
        self.symbol
            .values()
            .all(|v| v.terms().all(|(t, _)| t.basis.len() == 1 && t.hbar == 0))
    }

    pub fn extend(&self, alg: &SymAlgebra, w: &SymWord) -> Elem<SymWord> {
        let mut out = Elem::zero();
        for k in self.arities() {
            if k > w.len() {
                break;
            }
            for (left, right, sign) in alg.splittings(w, k) {
                let Some(val) = self.symbol.get(&left) else {
                    continue;
                };
                for (t, c) in val.terms() {
                    for (b, bc) in alg.multiply(&t.basis, &right) {
                        out.add_term(
                            Term {
                                hbar: t.hbar,
                                ring: t.ring,
                                basis: b,
                            },
                            c * bc * q(sign),
                        );
                    }
                }
            }
        }
        out
    }

    pub fn to_operator(&self, alg: &Arc<SymAlgebra>) -> Operator<SymWord> {
        let me = self.clone();
        let alg = alg.clone();
        Operator::new(self.degree, move |w| me.extend(&alg, w))
    }
}

/// A coderivation of `S(V)` given by its corestriction `S^{>0}(V) -> V`.
pub type Coderivation = WordOperator;

/// Checks `D(D(w)) = 0` for every word of length at most `max_len`.
pub fn check_codifferential(alg: &Arc<SymAlgebra>, d: &WordOperator, max_len: usize) -> Verdict {
    if d.degree() % 2 == 0 && !d.is_zero() {
        return Verdict::fail(format!("degree {} is not odd", d.degree()));
    }
    let op = d.to_operator(alg);
    for w in alg.basis_up_to(max_len) {
        let dd = op.apply(&op.on_basis(&w));
        if !dd.is_zero() {
            let ring = crate::ring::ArtinRing::ground();
            let amb = Ambient::new(alg.as_ref(), &ring);
            return Verdict::fail(format!("D²({}) = {}", alg.label(&w), amb.format(&dd)));
        }
    }
    Verdict::pass()
}

type Tensor2 = BTreeMap<(SymWord, SymWord, i32, usize), Q>;

/// Checks that `F ∈ S(V) ⊗ R` is grouplike, `ΔF = F ⊗_R F` and `ε(F) = 1`,
/// i.e. that it is a coaugmented coalgebra map `R* -> S(V)`.
pub fn check_grouplike(amb: &Ambient<'_, SymAlgebra>, f: &Elem<SymWord>) -> Verdict {
    let counit = f.filter(|t| t.basis.is_empty());
    if counit != amb.one() {
        return Verdict::fail(format!("counit of F is {}", amb.format(&counit)));
    }
    let mut lhs: Tensor2 = BTreeMap::new();
    for (t, c) in f.terms() {
        for (l, r, cc) in amb.alg.coproduct(&t.basis) {
            *lhs.entry((l, r, t.hbar, t.ring)).or_insert_with(Q::zero) += c * cc;
        }
    }
    let mut rhs: Tensor2 = BTreeMap::new();
    for (t1, c1) in f.terms() {
        for (t2, c2) in f.terms() {
            for (r, rc) in amb.ring.mul(t1.ring, t2.ring) {
                *rhs
                    .entry((t1.basis.clone(), t2.basis.clone(), t1.hbar + t2.hbar, *r))
                    .or_insert_with(Q::zero) += c1 * c2 * rc;
            }
        }
    }
    lhs.retain(|_, c| !c.is_zero());
    rhs.retain(|_, c| !c.is_zero());
    if lhs == rhs {
        return Verdict::pass();
    }
    let key = lhs
        .keys()
        .chain(rhs.keys())
        .find(|k| lhs.get(*k) != rhs.get(*k))
        .cloned()
        .unwrap();
    Verdict::fail(format!(
        "ΔF ≠ F⊗F at {} ⊗ {} (ring {})",
        amb.alg.label(&key.0),
        amb.alg.label(&key.1),
        amb.ring.label(key.3)
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::ArtinRing;

    fn odd2() -> SymAlgebra {
        SymAlgebra::new(GradedVectorSpace::new([("x", 1), ("y", 1)]).unwrap())
    }

    fn mixed() -> SymAlgebra {
        SymAlgebra::new(
            GradedVectorSpace::new([("a", 0), ("b", 1), ("c", -1), ("e", 2)]).unwrap(),
        )
    }

    #[test]
    fn normalization() {
        let s = odd2();
        assert_eq!(s.normalize(&[1, 0]), Some((SymWord(vec![0, 1]), -1)));
        assert_eq!(s.normalize(&[0, 0]), None);
        let m = mixed();
        // a a is fine (even), sorted by degree: c(-1) a(0) b(1) e(2)
        assert_eq!(m.normalize(&[0, 0]).unwrap().1, 1);
        let (w, _) = m.normalize(&[3, 1, 0, 2]).unwrap();
        assert_eq!(w, SymWord(vec![2, 0, 1, 3]));
        // idempotent
        assert_eq!(m.normalize(&w.0), Some((w.clone(), 1)));
    }

    #[test]
    fn coproduct_small_cases() {
        let s = odd2();
        let one = SymWord::empty();
        assert_eq!(s.coproduct(&one), vec![(one.clone(), one.clone(), q(1))]);
        let x = SymWord(vec![0]);
        let mut c = s.coproduct(&x);
        c.sort();
        assert_eq!(
            c,
            vec![(one.clone(), x.clone(), q(1)), (x.clone(), one.clone(), q(1))]
        );
        // Δ(xy) = xy⊗1 + x⊗y - y⊗x + 1⊗xy for odd x, y
        let y = SymWord(vec![1]);
        let xy = SymWord(vec![0, 1]);
        let mut c = s.coproduct(&xy);
        c.sort();
        let mut expected = vec![
            (xy.clone(), one.clone(), q(1)),
            (x.clone(), y.clone(), q(1)),
            (y.clone(), x.clone(), q(-1)),
            (one.clone(), xy.clone(), q(1)),
        ];
        expected.sort();
        assert_eq!(c, expected);
    }

    type T3 = BTreeMap<(SymWord, SymWord, SymWord), Q>;

    fn coassoc_check(s: &SymAlgebra, w: &SymWord) {
        let mut left: T3 = BTreeMap::new();
        let mut right: T3 = BTreeMap::new();
        for (a, b, c) in s.coproduct(w) {
            for (a1, a2, c1) in s.coproduct(&a) {
                *left.entry((a1, a2, b.clone())).or_insert_with(Q::zero) += &c * c1;
            }
            for (b1, b2, c2) in s.coproduct(&b) {
                *right.entry((a.clone(), b1, b2)).or_insert_with(Q::zero) += &c * c2;
            }
        }
        left.retain(|_, c| !c.is_zero());
        right.retain(|_, c| !c.is_zero());
        assert_eq!(left, right, "coassociativity on {}", s.label(w));
    }

    #[test]
    fn coassociative_and_cocommutative_exhaustive() {
        for s in [odd2(), mixed()] {
            for w in s.basis_up_to(4) {
                coassoc_check(&s, &w);
                let mut swapped: BTreeMap<(SymWord, SymWord), Q> = BTreeMap::new();
                for (a, b, c) in s.coproduct(&w) {
                    let sign = crate::scalar::sign_pow(s.word_degree(&a) * s.word_degree(&b));
                    *swapped.entry((b, a)).or_insert_with(Q::zero) += c * sign;
                }
                let orig: BTreeMap<(SymWord, SymWord), Q> =
                    s.coproduct(&w).into_iter().map(|(a, b, c)| ((a, b), c)).collect();
                swapped.retain(|_, c| !c.is_zero());
                assert_eq!(orig, swapped, "cocommutativity on {}", s.label(&w));
                // counit
                let left: Vec<_> = s
                    .coproduct(&w)
                    .into_iter()
                    .filter(|(a, _, _)| a.is_empty())
                    .collect();
                assert_eq!(left, vec![(SymWord::empty(), w.clone(), q(1))]);
            }
        }
    }

    #[test]
    fn basis_enumeration() {
        let s = odd2();
        assert_eq!(s.basis_up_to(4).len(), 4); // 1, x, y, xy
        let m = mixed();
        let b = m.basis_up_to(2);
        // 1 + 4 + (pairs: c c? c odd no; 4 choose 2 = 6 distinct + squares of evens a,e = 2)
        assert_eq!(b.len(), 1 + 4 + 8);
    }

    #[test]
    fn derivation_on_length_two() {
        let s = Arc::new(mixed());
        // l1: c -> a (degree 1), b -> e
        let mut d = WordOperator::new(1);
        d.add(&s, &SymWord(vec![2]), &Elem::basis(SymWord(vec![0]))).unwrap();
        d.add(&s, &SymWord(vec![1]), &Elem::basis(SymWord(vec![3]))).unwrap();
        let op = d.to_operator(&s);
        // D(c b) = D(c) b + (-1)^{|c|} c D(b) = a b - c e
        let (cb, sign) = s.normalize(&[2, 1]).unwrap();
        assert_eq!(sign, 1);
        let expected = s
            .word(&["a", "b"])
            .unwrap()
            .sub(&s.word(&["c", "e"]).unwrap());
        assert_eq!(op.on_basis(&cb), expected);
        assert!(WordOperator::new(1).to_operator(&s).on_basis(&cb).is_zero());
        assert!(d.add(&s, &SymWord(vec![0]), &Elem::basis(SymWord(vec![0]))).is_err());
    }

    /// co-Leibniz: Δ∘D = (D⊗1 + 1⊗D)∘Δ for random corestrictions.
    #[test]
    fn co_leibniz() {
        use rand::{Rng, SeedableRng};
        let s = Arc::new(mixed());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let words = s.basis_up_to(3);
        for _ in 0..10 {
            let mut d = WordOperator::new(1);
            for w in words.iter().filter(|w| !w.is_empty() && w.len() <= 2) {
                for g in 0..4 {
                    if s.generator_degree(g) - s.word_degree(w) == 1 && rng.gen_bool(0.5) {
                        let c = q(rng.gen_range(-3..=3));
                        d.add(&s, w, &Elem::basis(SymWord(vec![g])).scale(&c)).unwrap();
                    }
                }
            }
            let op = d.to_operator(&s);
            for w in &words {
                let mut lhs: BTreeMap<(SymWord, SymWord), Q> = BTreeMap::new();
                for (t, c) in op.on_basis(w).terms() {
                    for (a, b, cc) in s.coproduct(&t.basis) {
                        *lhs.entry((a, b)).or_insert_with(Q::zero) += c * cc;
                    }
                }
                let mut rhs: BTreeMap<(SymWord, SymWord), Q> = BTreeMap::new();
                for (a, b, c) in s.coproduct(w) {
                    for (t, ca) in op.on_basis(&a).terms() {
                        *rhs.entry((t.basis.clone(), b.clone())).or_insert_with(Q::zero) += &c * ca;
                    }
                    let sign = crate::scalar::sign_pow(s.word_degree(&a));
                    for (t, cb) in op.on_basis(&b).terms() {
                        *rhs.entry((a.clone(), t.basis.clone())).or_insert_with(Q::zero) +=
                            &c * cb * &sign;
                    }
                }
                lhs.retain(|_, c| !c.is_zero());
                rhs.retain(|_, c| !c.is_zero());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn codifferential_checks() {
        let s = Arc::new(mixed());
        assert!(check_codifferential(&s, &WordOperator::new(1), 4).holds);
        // c -> a and a -> b: D²(c) = b ≠ 0
        let mut d = WordOperator::new(1);
        d.add(&s, &SymWord(vec![2]), &Elem::basis(SymWord(vec![0]))).unwrap();
        d.add(&s, &SymWord(vec![0]), &Elem::basis(SymWord(vec![1]))).unwrap();
        let v = check_codifferential(&s, &d, 2);
        assert!(!v.holds);
        assert!(v.witness.unwrap().contains("D²(c)"));
    }

    #[test]
    fn exponential_is_grouplike() {
        let s = mixed();
        let r = ArtinRing::truncated_polynomial(4);
        let amb = Ambient::new(&s, &r);
        let x = Elem::term(SymWord(vec![0]), 0, 1, q(1))
            .add(&Elem::term(SymWord(vec![3]), 0, 2, q(3)));
        let e = amb.exp(&x).unwrap();
        assert!(check_grouplike(&amb, &e).holds);
        let broken = e.add(&Elem::term(SymWord(vec![0, 0]), 0, 3, q(1)));
        assert!(!check_grouplike(&amb, &broken).holds);
        // exponential of a non-primitive element is not grouplike
        let y = Elem::term(SymWord(vec![0, 0]), 0, 1, q(1));
        assert!(!check_grouplike(&amb, &amb.exp(&y).unwrap()).holds);
    }
}
