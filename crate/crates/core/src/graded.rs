//! Graded vector spaces on finite named bases, sparse vectors and linear maps,
//! and the Koszul sign rule.
//!
//! Degrees are plain integers. Differentials have degree `+1`, BV operators
//! degree `-1`. The shift convention is `V[n]^p = V^{p+n}`: an element of
//! degree `q` in `V` has degree `q - n` in `V[n]`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{format_rational, one, Q};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisElement {
    pub label: String,
    pub degree: i64,
}

/// A finite-dimensional graded vector space with an ordered named basis.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedVectorSpace {
    basis: Vec<BasisElement>,
    index: HashMap<String, usize>,
}

impl fmt::Debug for GradedVectorSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .basis
            .iter()
            .map(|b| format!("{}:{}", b.label, b.degree))
            .collect();
        write!(f, "GradedVectorSpace[{}]", items.join(", "))
    }
}

impl GradedVectorSpace {
    pub fn new<S: Into<String>>(basis: impl IntoIterator<Item = (S, i64)>) -> Result<Self> {
        let mut out = Vec::new();
        let mut index = HashMap::new();
        for (label, degree) in basis {
            let label = label.into();
            if index.insert(label.clone(), out.len()).is_some() {
                return Err(Error::DuplicateLabel(label));
            }
            out.push(BasisElement { label, degree });
        }
        Ok(Self { basis: out, index })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.basis[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.basis[i].label
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Dimension of the degree-`p` component.
    pub fn dim_in_degree(&self, p: i64) -> usize {
        self.basis.iter().filter(|b| b.degree == p).count()
    }

    /// Per-degree dimensions, sorted by degree.
    pub fn dimensions(&self) -> BTreeMap<i64, usize> {
        let mut m = BTreeMap::new();
        for b in &self.basis {
            *m.entry(b.degree).or_insert(0) += 1;
        }
        m
    }

    /// `V[n]`: same labels, every degree lowered by `n`.
    pub fn shift(&self, n: i64) -> Self {
        Self {
            basis: self
                .basis
                .iter()
                .map(|b| BasisElement {
                    label: b.label.clone(),
                    degree: b.degree - n,
                })
                .collect(),
            index: self.index.clone(),
        }
    }

    /// `V*` with dual basis `x*` in degree `-deg(x)`. Dualizing a dual strips the star.
    pub fn dual(&self) -> Self {
        let basis: Vec<BasisElement> = self
            .basis
            .iter()
            .map(|b| BasisElement {
                label: match b.label.strip_suffix('*') {
                    Some(orig) => orig.to_string(),
                    None => format!("{}*", b.label),
                },
                degree: -b.degree,
            })
            .collect();
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, b)| (b.label.clone(), i))
            .collect();
        Self { basis, index }
    }
}

/// A sparse vector with exact coefficients, indexed by basis position.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct GradedVector {
    coeffs: BTreeMap<usize, Q>,
}

impl fmt::Debug for GradedVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| format!("{}*e{}", format_rational(c), i))
            .collect();
        write!(f, "[{}]", items.join(" + "))
    }
}

impl GradedVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(i: usize) -> Self {
        let mut v = Self::zero();
        v.add_term(i, one());
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut v = Self::zero();
        for (i, c) in terms {
            v.add_term(i, c);
        }
        v
    }

    pub fn add_term(&mut self, i: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.coeffs.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Q)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_term(*i, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|(i, c)| (*i, c * s)).collect(),
        }
    }

    /// The common degree of all nonzero terms, if there is one.
    pub fn homogeneous_degree(&self, space: &GradedVectorSpace) -> Option<i64> {
        let mut degs = self.coeffs.keys().map(|&i| space.degree(i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }
}

/// A homogeneous linear map between graded spaces, stored as sparse
/// `(source index, target index) -> coefficient` entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedLinearMap {
    source: Arc<GradedVectorSpace>,
    target: Arc<GradedVectorSpace>,
    degree: i64,
    entries: BTreeMap<(usize, usize), Q>,
}

impl GradedLinearMap {
    pub fn zero(source: Arc<GradedVectorSpace>, target: Arc<GradedVectorSpace>, degree: i64) -> Self {
        Self {
            source,
            target,
            degree,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(space: Arc<GradedVectorSpace>) -> Self {
        let mut m = Self::zero(space.clone(), space.clone(), 0);
        for i in 0..space.dim() {
            m.entries.insert((i, i), one());
        }
        m
    }

    pub fn from_entries(
        source: Arc<GradedVectorSpace>,
        target: Arc<GradedVectorSpace>,
        degree: i64,
        entries: impl IntoIterator<Item = (usize, usize, Q)>,
    ) -> Result<Self> {
        let mut m = Self::zero(source, target, degree);
        for (s, t, c) in entries {
            m.set(s, t, c)?;
        }
        Ok(m)
    }

    /// Sets the coefficient of target `t` in the image of source `s`.
    pub fn set(&mut self, s: usize, t: usize, c: Q) -> Result<()> {
        if s >= self.source.dim() || t >= self.target.dim() {
            return Err(Error::SpaceMismatch(format!("entry ({s}, {t}) out of range")));
        }
        let ds = self.source.degree(s);
        let dt = self.target.degree(t);
        if dt - ds != self.degree {
            return Err(Error::DegreeMismatch(format!(
                "entry {} -> {} has degree {}, map has degree {}",
                self.source.label(s),
                self.target.label(t),
                dt - ds,
                self.degree
            )));
        }
        if c.is_zero() {
            self.entries.remove(&(s, t));
        } else {
            self.entries.insert((s, t), c);
        }
        Ok(())
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn source(&self) -> &Arc<GradedVectorSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GradedVectorSpace> {
        &self.target
    }

    pub fn entry(&self, s: usize, t: usize) -> Q {
        self.entries.get(&(s, t)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Q)> {
        self.entries.iter()
    }

    pub fn apply(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for ((s, t), c) in &self.entries {
            let vs = v.coeff(*s);
            if !vs.is_zero() {
                out.add_term(*t, c * vs);
            }
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedLinearMap) -> Result<Self> {
        if inner.target != self.source {
            return Err(Error::SpaceMismatch("compose: inner target != outer source".into()));
        }
        let mut acc: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for ((s, m), c1) in &inner.entries {
            for ((m2, t), c2) in self.entries.range((*m, 0)..=(*m, usize::MAX)) {
                debug_assert_eq!(m, m2);
                *acc.entry((*s, *t)).or_insert_with(Q::zero) += c1 * c2;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(Self {
            source: inner.source.clone(),
            target: self.target.clone(),
            degree: self.degree + inner.degree,
            entries: acc,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::SpaceMismatch("add: different source or target".into()));
        }
        if self.degree != other.degree && !self.entries.is_empty() && !other.entries.is_empty() {
            return Err(Error::DegreeMismatch(format!(
                "add: degrees {} and {}",
                self.degree, other.degree
            )));
        }
        let mut out = if self.entries.is_empty() { other.clone() } else { self.clone() };
        let src = if self.entries.is_empty() { self } else { other };
        for (k, c) in &src.entries {
            let e = out.entries.entry(*k).or_insert_with(Q::zero);
            *e += c;
            if e.is_zero() {
                out.entries.remove(k);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = self.clone();
        out.entries = self
            .entries
            .iter()
            .map(|(k, c)| (*k, c * s))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Koszul sign of reordering a sequence of homogeneous factors.
///
/// `perm[i]` is the original position of the factor placed at position `i`.
/// Every pair of factors whose relative order is inverted contributes
/// `(-1)^{p q}` for their degrees `p, q`.
pub fn koszul_sign(perm: &[usize], degrees: &[i64]) -> Result<i64> {
    if perm.len() != degrees.len() {
        return Err(Error::LengthMismatch {
            expected: degrees.len(),
            got: perm.len(),
        });
    }
    let mut seen = vec![false; perm.len()];
    for &p in perm {
        if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(koszul_sign_unchecked(perm, degrees))
}

pub(crate) fn koszul_sign_unchecked(perm: &[usize], degrees: &[i64]) -> i64 {
    let mut odd_swaps = 0i64;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] * degrees[perm[j]] % 2 != 0 {
                odd_swaps += 1;
            }
        }
    }
    if odd_swaps % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Applies `second` after `first`: the resulting sequence places the original
/// factor `first[second[i]]` at position `i`.
pub fn then_permutation(first: &[usize], second: &[usize]) -> Vec<usize> {
    second.iter().map(|&i| first[i]).collect()
}

/// Degrees as seen after reordering by `perm`.
pub fn permute_degrees(perm: &[usize], degrees: &[i64]) -> Vec<i64> {
    perm.iter().map(|&i| degrees[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    fn heis3() -> GradedVectorSpace {
        GradedVectorSpace::new([("x", 0), ("y", 0), ("z", 0)]).unwrap()
    }

    fn mixed() -> GradedVectorSpace {
        GradedVectorSpace::new([("a", -1), ("b", 0), ("c", 2), ("d", 2)]).unwrap()
    }

    #[test]
    fn shift_examples() {
        let v = GradedVectorSpace::new([("x", 2)]).unwrap();
        assert_eq!(v.shift(0), v);
        assert_eq!(v.shift(1).basis()[0].degree, 1);
        let h = heis3();
        assert_eq!(h.shift(3).shift(-3), h);
    }

    #[test]
    fn dual_examples() {
        let v = GradedVectorSpace::new([("x", 1)]).unwrap();
        assert_eq!(v.dual().basis()[0].degree, -1);
        assert_eq!(v.dual().basis()[0].label, "x*");
        assert_eq!(v.dual().dual(), v);
        let h = heis3();
        for p in -4..=4 {
            assert_eq!(
                h.shift(2).dual().dim_in_degree(p),
                h.dual().dim_in_degree(p - 2)
            );
        }
    }

    #[test]
    fn dual_shift_functoriality() {
        for v in [heis3(), mixed()] {
            for n in -3..=3 {
                assert_eq!(v.shift(n).dual(), v.dual().shift(-n));
            }
        }
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(GradedVectorSpace::new([("x", 0), ("x", 1)]).is_err());
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 3, -2]).unwrap(), 1);
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]).unwrap(), -1);
        // x1 x2 x3 -> x3 x1 x2 with degrees (1,1,2)
        assert_eq!(koszul_sign(&[2, 0, 1], &[1, 1, 2]).unwrap(), 1);
        assert!(koszul_sign(&[0, 1], &[1]).is_err());
        assert!(koszul_sign(&[0, 0], &[1, 1]).is_err());
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn degree_sequences(n: usize) -> Vec<Vec<i64>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for s in degree_sequences(n - 1) {
            for d in -2..=2 {
                let mut t = s.clone();
                t.push(d);
                out.push(t);
            }
        }
        out
    }

    #[test]
    fn koszul_sign_is_multiplicative_exhaustive() {
        // Only parities matter; degrees {-2..2} cover both parities with signs.
        for n in 0..=4 {
            let perms = permutations(n);
            for degs in degree_sequences(n) {
                for tau in &perms {
                    let after_tau = permute_degrees(tau, &degs);
                    let s_tau = koszul_sign(tau, &degs).unwrap();
                    for sigma in &perms {
                        let comp = then_permutation(tau, sigma);
                        assert_eq!(
                            koszul_sign(&comp, &degs).unwrap(),
                            koszul_sign(sigma, &after_tau).unwrap() * s_tau
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn koszul_sign_is_multiplicative_length5_parities() {
        let perms = permutations(5);
        for mask in 0..32u32 {
            let degs: Vec<i64> = (0..5).map(|i| ((mask >> i) & 1) as i64).collect();
            for tau in perms.iter().step_by(7) {
                let after_tau = permute_degrees(tau, &degs);
                let s_tau = koszul_sign(tau, &degs).unwrap();
                for sigma in &perms {
                    let comp = then_permutation(tau, sigma);
                    assert_eq!(
                        koszul_sign(&comp, &degs).unwrap(),
                        koszul_sign(sigma, &after_tau).unwrap() * s_tau
                    );
                }
            }
        }
    }

    fn dense(m: &GradedLinearMap) -> Vec<Vec<Q>> {
        let (ns, nt) = (m.source().dim(), m.target().dim());
        (0..nt)
            .map(|t| (0..ns).map(|s| m.entry(s, t)).collect())
            .collect()
    }

    #[test]
    fn linear_map_plumbing() {
        let h = Arc::new(heis3());
        let id = GradedLinearMap::identity(h.clone());
        let f = GradedLinearMap::from_entries(
            h.clone(),
            h.clone(),
            0,
            [(0, 1, q(2)), (1, 2, q(-3)), (2, 2, q(1))],
        )
        .unwrap();
        let g = GradedLinearMap::from_entries(
            h.clone(),
            h.clone(),
            0,
            [(0, 0, q(1)), (1, 0, q(4)), (2, 1, q(5))],
        )
        .unwrap();
        assert_eq!(id.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&id).unwrap(), f);
        let zero = GradedLinearMap::zero(h.clone(), h.clone(), 0);
        assert!(zero.apply(&GradedVector::basis(1)).is_zero());

        // dense matrix multiply oracle
        let (a, b) = (dense(&f), dense(&g));
        let fg = dense(&f.compose(&g).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Q::zero();
                for k in 0..3 {
                    s += &a[i][k] * &b[k][j];
                }
                assert_eq!(fg[i][j], s);
            }
        }
        let sum = f.add(&g).unwrap();
        assert_eq!(sum.entry(0, 0), q(1));
        assert_eq!(sum.entry(2, 2), q(1));
        assert_eq!(f.scale(&q(0)), zero);
    }

    #[test]
    fn degree_checked_entries() {
        let v = Arc::new(mixed());
        let mut m = GradedLinearMap::zero(v.clone(), v.clone(), 1);
        assert!(m.set(0, 1, q(1)).is_ok());
        assert!(m.set(1, 2, q(1)).is_err());
        let n = GradedLinearMap::zero(v.clone(), v.clone(), 2);
        let mut n = n;
        n.set(1, 2, q(1)).unwrap();
        assert_eq!(n.compose(&m).unwrap().degree(), 3);
        assert_eq!(n.compose(&m).unwrap().entry(0, 2), q(1));
    }
}
