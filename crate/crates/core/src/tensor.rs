//! The tensor algebra `T(V)` with the shuffle product. Words keep their
//! order; there is no normal form beyond the sequence itself.
//!
//! As a coalgebra it carries either the unshuffle coproduct, which is
//! cocommutative and conilpotent, or the trivial one.
use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::{Coalgebra, GradedAlgebra};
use crate::graded::{koszul_sign_unchecked, GradedVectorSpace};
use crate::scalar::{q, Q};
use crate::sym::{subsets, CoproductKind};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct TensorWord(pub Vec<usize>);

impl TensorWord {
    pub fn empty() -> Self {
        TensorWord(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct TensorAlgebra {
    space: Arc<GradedVectorSpace>,
    coproduct: CoproductKind,
}

impl TensorAlgebra {
    pub fn new(space: GradedVectorSpace, coproduct: CoproductKind) -> Self {
        Self {
            space: Arc::new(space),
            coproduct,
        }
    }

    pub fn space(&self) -> &GradedVectorSpace {
        &self.space
    }

    pub fn coproduct_kind(&self) -> CoproductKind {
        self.coproduct
    }

    fn degrees_of(&self, w: &[usize]) -> Vec<i64> {
        w.iter().map(|&i| self.space.degree(i)).collect()
    }

    /// `a ⧢ b` as a list of signed words; terms are not merged.
    pub fn shuffle(&self, a: &TensorWord, b: &TensorWord) -> Vec<(TensorWord, i64)> {
        let (p, n) = (a.len(), a.len() + b.len());
        let concat: Vec<usize> = a.0.iter().chain(b.0.iter()).copied().collect();
        let degs = self.degrees_of(&concat);
        let mut out = Vec::new();
        for slots in subsets(n, p) {
            // perm[pos] = index into `concat` of the factor placed at `pos`.
            let mut perm = vec![0; n];
            let (mut ia, mut ib) = (0, p);
            for (pos, slot) in perm.iter_mut().enumerate() {
                if slots.contains(&pos) {
                    *slot = ia;
                    ia += 1;
                } else {
                    *slot = ib;
                    ib += 1;
                }
            }
            let sign = koszul_sign_unchecked(&perm, &degs);
            out.push((TensorWord(perm.iter().map(|&i| concat[i]).collect()), sign));
        }
        out
    }
}

impl GradedAlgebra for TensorAlgebra {
    type Basis = TensorWord;

    fn degree(&self, b: &TensorWord) -> i64 {
        b.0.iter().map(|&i| self.space.degree(i)).sum()
    }

    fn unit(&self) -> TensorWord {
        TensorWord::empty()
    }

    fn multiply(&self, a: &TensorWord, b: &TensorWord) -> Vec<(TensorWord, Q)> {
        let mut acc: BTreeMap<TensorWord, Q> = BTreeMap::new();
        for (w, s) in self.shuffle(a, b) {
            *acc.entry(w).or_insert_with(Q::zero) += q(s);
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    fn size(&self, b: &TensorWord) -> usize {
        b.len()
    }

    fn basis_up_to(&self, n: usize) -> Vec<TensorWord> {
        let mut out = vec![TensorWord::empty()];
        let mut layer = vec![TensorWord::empty()];
        for _ in 0..n {
            let mut next = Vec::new();
            for w in &layer {
                for g in 0..self.space.dim() {
                    let mut v = w.0.clone();
                    v.push(g);
                    next.push(TensorWord(v));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    fn label(&self, b: &TensorWord) -> String {
        if b.is_empty() {
            return "1".into();
        }
        b.0.iter()
            .map(|&i| self.space.label(i).to_string())
            .collect::<Vec<_>>()
            .join("⊗")
    }
}

impl Coalgebra for TensorAlgebra {
    fn coproduct(&self, b: &TensorWord) -> Vec<(TensorWord, TensorWord, Q)> {
        match self.coproduct {
            CoproductKind::Trivial => {
                if b.is_empty() {
                    vec![(TensorWord::empty(), TensorWord::empty(), Q::one())]
                } else {
                    vec![
                        (b.clone(), TensorWord::empty(), Q::one()),
                        (TensorWord::empty(), b.clone(), Q::one()),
                    ]
                }
            }
            CoproductKind::Shuffle => {
                let n = b.len();
                let degs = self.degrees_of(&b.0);
                let mut acc: BTreeMap<(TensorWord, TensorWord), Q> = BTreeMap::new();
                for k in 0..=n {
                    for subset in subsets(n, k) {
                        let mut perm = subset.clone();
                        perm.extend((0..n).filter(|i| !subset.contains(i)));
                        let sign = koszul_sign_unchecked(&perm, &degs);
                        let left = TensorWord(perm[..k].iter().map(|&i| b.0[i]).collect());
                        let right = TensorWord(perm[k..].iter().map(|&i| b.0[i]).collect());
                        *acc.entry((left, right)).or_insert_with(Q::zero) += q(sign);
                    }
                }
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((l, r), c)| (l, r, c))
                    .collect()
            }
        }
    }

    fn weight(&self, b: &TensorWord) -> usize {
        match self.coproduct {
            CoproductKind::Shuffle => b.len(),
            CoproductKind::Trivial => usize::from(!b.is_empty()),
        }
    }
}
