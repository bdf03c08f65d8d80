//! Finite-dimensional local parameter rings `(R, m)` and their duals.
//!
//! The basis always starts with the unit `1`; the remaining basis elements
//! span the maximal ideal `m`. The basis must be adapted to the `m`-adic
//! filtration: every power `m^k` is spanned by the basis elements it contains.
//! Monomial bases of truncated polynomial rings have this property.

use num::{One, Zero};

use crate::algebra::{Coalgebra, GradedAlgebra};
use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::scalar::{format_rational, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArtinRing {
    labels: Vec<String>,
    table: Vec<Vec<Vec<(usize, Q)>>>,
    order: Vec<usize>,
    nilpotency: usize,
}

impl ArtinRing {
    /// Builds a ring from products of maximal-ideal basis elements.
    ///
    /// `labels[0]` is the unit. `products` lists `(i, j, k, c)` meaning
    /// `e_i e_j` has coefficient `c` on `e_k`, for `i, j >= 1`; missing entries
    /// are zero. Products are symmetrized from whichever of `(i, j)`, `(j, i)` is given.
    pub fn new<S: Into<String>>(
        labels: impl IntoIterator<Item = S>,
        products: impl IntoIterator<Item = (usize, usize, usize, Q)>,
    ) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let n = labels.len();
        if n == 0 {
            return Err(Error::Precondition("ring needs a unit".into()));
        }
        let mut table = vec![vec![Vec::new(); n]; n];
        for i in 0..n {
            table[0][i] = vec![(i, Q::one())];
            table[i][0] = vec![(i, Q::one())];
        }
        let mut given = vec![vec![false; n]; n];
        for (i, j, k, c) in products {
            if i == 0 || j == 0 || i >= n || j >= n || k >= n {
                return Err(Error::Precondition(format!(
                    "ring product entry ({i}, {j}, {k}) out of range"
                )));
            }
            if k == 0 {
                return Err(Error::axiom(
                    "m is an ideal",
                    format!("{} * {} has a unit component", labels[i], labels[j]),
                ));
            }
            add_entry(&mut table[i][j], k, c);
            given[i][j] = true;
        }
        for i in 1..n {
            for j in 1..n {
                if !given[i][j] && given[j][i] {
                    table[i][j] = table[j][i].clone();
                }
            }
        }
        let mut ring = Self {
            labels,
            table,
            order: vec![0; n],
            nilpotency: 1,
        };
        ring.check_axioms()?;
        ring.compute_filtration()?;
        Ok(ring)
    }

    /// The ground field `k` itself (`m = 0`).
    pub fn ground() -> Self {
        Self::new(["1"], []).expect("ground field")
    }

    /// `k[t]/(t^n)` with monomial basis `1, t, ..., t^{n-1}`.
    pub fn truncated_polynomial(n: usize) -> Self {
        assert!(n >= 1);
        let labels: Vec<String> = (0..n)
            .map(|i| match i {
                0 => "1".to_string(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            })
            .collect();
        let mut products = Vec::new();
        for i in 1..n {
            for j in 1..n {
                if i + j < n {
                    products.push((i, j, i + j, Q::one()));
                }
            }
        }
        Self::new(labels, products).expect("truncated polynomial ring")
    }

    /// `k ⊕ m` with `m² = 0`, `m` spanned by the given labels.
    pub fn square_zero<S: Into<String>>(generators: impl IntoIterator<Item = S>) -> Self {
        let mut labels = vec!["1".to_string()];
        labels.extend(generators.into_iter().map(Into::into));
        Self::new(labels, []).expect("square-zero ring")
    }

    fn check_axioms(&self) -> Result<()> {
        let n = self.dim();
        for i in 1..n {
            for j in 1..n {
                if normalize(&self.table[i][j]) != normalize(&self.table[j][i]) {
                    return Err(Error::axiom(
                        "commutativity",
                        format!("{} * {}", self.labels[i], self.labels[j]),
                    ));
                }
                for k in 1..n {
                    let left = self.mul_vec(&self.table[i][j], k);
                    let right = self.vec_mul(i, &self.table[j][k]);
                    if normalize(&left) != normalize(&right) {
                        return Err(Error::axiom(
                            "associativity",
                            format!("({} {} {})", self.labels[i], self.labels[j], self.labels[k]),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn mul_vec(&self, v: &[(usize, Q)], k: usize) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (i, c) in v {
            for (r, d) in &self.table[*i][k] {
                add_entry(&mut out, *r, c * d);
            }
        }
        out
    }

    fn vec_mul(&self, i: usize, v: &[(usize, Q)]) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (j, c) in v {
            for (r, d) in &self.table[i][*j] {
                add_entry(&mut out, *r, c * d);
            }
        }
        out
    }

    fn compute_filtration(&mut self) -> Result<()> {
        let n = self.dim();
        // current power m^k as a list of spanning vectors (dense, length n)
        let mut power: Vec<Vec<Q>> = (1..n).map(|i| unit_vec(n, i)).collect();
        let mut k = 1;
        let mut order = vec![0usize; n];
        while rank(&power, n) > 0 {
            if k > n + 1 {
                return Err(Error::axiom("nilpotency of m", "m^k never vanishes"));
            }
            let r = rank(&power, n);
            let mut inside = 0;
            for (i, ord) in order.iter_mut().enumerate().skip(1) {
                let mut with = power.clone();
                with.push(unit_vec(n, i));
                if rank(&with, n) == r {
                    *ord = k;
                    inside += 1;
                }
            }
            if inside != r {
                return Err(Error::Precondition(format!(
                    "basis is not adapted to the m-adic filtration at m^{k}"
                )));
            }
            let mut next = Vec::new();
            for v in &power {
                for j in 1..n {
                    let mut w = vec![Q::zero(); n];
                    for (i, c) in v.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        for (r, d) in &self.table[i][j] {
                            w[*r] += c * d;
                        }
                    }
                    if w.iter().any(|x| !x.is_zero()) {
                        next.push(w);
                    }
                }
            }
            power = next;
            k += 1;
        }
        self.order = order;
        self.nilpotency = k;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn mul(&self, i: usize, j: usize) -> &[(usize, Q)] {
        &self.table[i][j]
    }

    /// `m`-adic order of a basis element: the largest `k` with `e_i ∈ m^k`.
    pub fn order(&self, i: usize) -> usize {
        self.order[i]
    }

    /// The smallest `M` with `m^M = 0`.
    pub fn nilpotency(&self) -> usize {
        self.nilpotency
    }

    /// Nonzero products of maximal-ideal basis elements as `(i, j, k, c)`.
    pub fn structure_constants(&self) -> Vec<(usize, usize, usize, Q)> {
        let mut out = Vec::new();
        for i in 1..self.dim() {
            for j in 1..self.dim() {
                for (k, c) in &self.table[i][j] {
                    out.push((i, j, *k, c.clone()));
                }
            }
        }
        out
    }

    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        for (i, j, k, c) in self.structure_constants() {
            if i <= j {
                parts.push(format!(
                    "{}*{} = {}*{}",
                    self.labels[i],
                    self.labels[j],
                    format_rational(&c),
                    self.labels[k]
                ));
            }
        }
        format!("R[{}]{{{}}}", self.labels.join(","), parts.join("; "))
    }
}

fn unit_vec(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

fn add_entry(v: &mut Vec<(usize, Q)>, k: usize, c: Q) {
    if c.is_zero() {
        return;
    }
    if let Some(pos) = v.iter().position(|(i, _)| *i == k) {
        v[pos].1 += c;
        if v[pos].1.is_zero() {
            v.remove(pos);
        }
    } else {
        v.push((k, c));
    }
}

fn normalize(v: &[(usize, Q)]) -> Vec<(usize, Q)> {
    let mut out: Vec<(usize, Q)> = Vec::new();
    for (k, c) in v {
        add_entry(&mut out, *k, c.clone());
    }
    out.sort_by_key(|(k, _)| *k);
    out
}

/// A unital ring homomorphism `f: R -> S` given by images of `R`'s basis.
#[derive(Clone, Debug)]
pub struct RingMap {
    pub images: Vec<Vec<(usize, Q)>>,
}

impl RingMap {
    /// Validates that `f` is a local homomorphism `source -> target`.
    pub fn new(source: &ArtinRing, target: &ArtinRing, images: Vec<Vec<(usize, Q)>>) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::LengthMismatch {
                expected: source.dim(),
                got: images.len(),
            });
        }
        let map = Self {
            images: images.iter().map(|v| normalize(v)).collect(),
        };
        if map.images[0] != vec![(0, Q::one())] {
            return Err(Error::axiom("f(1) = 1", format!("{:?}", map.images[0])));
        }
        for (i, img) in map.images.iter().enumerate().skip(1) {
            if img.iter().any(|(k, _)| *k == 0) {
                return Err(Error::axiom(
                    "locality f(m) ⊆ m",
                    format!("f({}) has a unit component", source.label(i)),
                ));
            }
        }
        for i in 1..source.dim() {
            for j in 1..source.dim() {
                let lhs = map.apply_vec(source.mul(i, j));
                let mut rhs = Vec::new();
                for (a, ca) in &map.images[i] {
                    for (b, cb) in &map.images[j] {
                        for (k, ck) in target.mul(*a, *b) {
                            add_entry(&mut rhs, *k, ca * cb * ck);
                        }
                    }
                }
                if normalize(&lhs) != normalize(&rhs) {
                    return Err(Error::axiom(
                        "multiplicativity",
                        format!("f({} {})", source.label(i), source.label(j)),
                    ));
                }
            }
        }
        Ok(map)
    }

    /// The map sending each basis label to the same label in the target, or
    /// to zero if the target lacks it (e.g. `k[t]/(t^n) -> k[t]/(t^m)`).
    pub fn by_label(source: &ArtinRing, target: &ArtinRing) -> Result<Self> {
        let images = (0..source.dim())
            .map(|i| match target.index_of(source.label(i)) {
                Ok(j) => vec![(j, Q::one())],
                Err(_) => vec![],
            })
            .collect();
        Self::new(source, target, images)
    }

    pub fn apply_vec(&self, v: &[(usize, Q)]) -> Vec<(usize, Q)> {
        let mut out = Vec::new();
        for (i, c) in v {
            for (k, d) in &self.images[*i] {
                add_entry(&mut out, *k, c * d);
            }
        }
        normalize(&out)
    }

    /// `g ∘ self`.
    pub fn then(&self, g: &RingMap) -> RingMap {
        RingMap {
            images: self.images.iter().map(|v| g.apply_vec(v)).collect(),
        }
    }
}

/// The dual `R*` of a local ring, as a commutative algebra with zero
/// multiplication on `m*` and the coproduct dual to the multiplication of `R`.
#[derive(Clone, Debug)]
pub struct DualRing {
    pub ring: ArtinRing,
}

impl DualRing {
    pub fn new(ring: ArtinRing) -> Self {
        Self { ring }
    }
}

impl GradedAlgebra for DualRing {
    type Basis = usize;

    fn degree(&self, _b: &usize) -> i64 {
        0
    }

    fn unit(&self) -> usize {
        0
    }

    fn multiply(&self, a: &usize, b: &usize) -> Vec<(usize, Q)> {
        match (*a, *b) {
            (0, x) | (x, 0) => vec![(x, Q::one())],
            _ => vec![],
        }
    }

    fn size(&self, b: &usize) -> usize {
        self.ring.order(*b)
    }

    fn basis_up_to(&self, n: usize) -> Vec<usize> {
        (0..self.ring.dim())
            .filter(|&i| self.ring.order(i) <= n)
            .collect()
    }

    fn label(&self, b: &usize) -> String {
        format!("{}*", self.ring.label(*b))
    }
}

impl Coalgebra for DualRing {
    fn coproduct(&self, b: &usize) -> Vec<(usize, usize, Q)> {
        let n = self.ring.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for (k, c) in self.ring.mul(i, j) {
                    if k == b {
                        out.push((i, j, c.clone()));
                    }
                }
            }
        }
        out
    }

    fn weight(&self, b: &usize) -> usize {
        self.ring.order(*b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn truncated_polynomial_filtration() {
        let r = ArtinRing::truncated_polynomial(3);
        assert_eq!(r.dim(), 3);
        assert_eq!(r.nilpotency(), 3);
        assert_eq!((r.order(0), r.order(1), r.order(2)), (0, 1, 2));
        assert_eq!(r.mul(1, 1), &[(2, q(1))]);
        assert!(r.mul(1, 2).is_empty());
        assert_eq!(ArtinRing::ground().nilpotency(), 1);
    }

    #[test]
    fn square_zero_ring() {
        let r = ArtinRing::square_zero(["s", "t"]);
        assert_eq!(r.nilpotency(), 2);
        assert!(r.structure_constants().is_empty());
        let dual = DualRing::new(r);
        // (m*)^2 = 0 from the dualized structure constants
        for i in 1..3 {
            for j in 1..3 {
                assert!(dual.multiply(&i, &j).is_empty());
            }
        }
    }

    #[test]
    fn rejects_bad_rings() {
        // t*t = 1 is not local
        assert!(ArtinRing::new(["1", "t"], [(1, 1, 0, q(1))]).is_err());
        // t*t = t is idempotent, never nilpotent
        assert!(ArtinRing::new(["1", "t"], [(1, 1, 1, q(1))]).is_err());
        // non-associative: a*a = b, a*b = a
        assert!(ArtinRing::new(["1", "a", "b"], [(1, 1, 2, q(1)), (1, 2, 1, q(1))]).is_err());
        // basis {1, t, t + t^2} of k[t]/(t^3) is not adapted: m^2 = span(t^2)
        let non_adapted = [
            (1, 1, 2, q(1)),
            (1, 1, 1, q(-1)),
            (1, 2, 2, q(1)),
            (1, 2, 1, q(-1)),
            (2, 2, 2, q(1)),
            (2, 2, 1, q(-1)),
        ];
        assert!(ArtinRing::new(["1", "u", "v"], non_adapted).is_err());
    }

    #[test]
    fn dual_coproduct_is_transpose_of_multiplication() {
        let r = ArtinRing::truncated_polynomial(3);
        let dual = DualRing::new(r);
        let mut cop = dual.coproduct(&2);
        cop.sort();
        assert_eq!(cop, vec![(0, 2, q(1)), (1, 1, q(1)), (2, 0, q(1))]);
        assert_eq!(dual.weight(&2), 2);
    }

    #[test]
    fn ring_maps() {
        let r4 = ArtinRing::truncated_polynomial(4);
        let r3 = ArtinRing::truncated_polynomial(3);
        let r2 = ArtinRing::truncated_polynomial(2);
        let f = RingMap::by_label(&r4, &r3).unwrap();
        let g = RingMap::by_label(&r3, &r2).unwrap();
        let h = RingMap::by_label(&r4, &r2).unwrap();
        assert_eq!(f.then(&g).images, h.images);
        // t -> 1 + t is not local
        assert!(RingMap::new(&r3, &r3, vec![vec![(0, q(1))], vec![(0, q(1)), (1, q(1))], vec![]]).is_err());
        // k[t]/t^2 -> k[t]/t^3 by label is not multiplicative (t*t = 0 but t^2 != 0)
        assert!(RingMap::by_label(&r2, &r3).is_err());
    }
}
