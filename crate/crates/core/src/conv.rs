//! Convolution products on `Hom(C, A)` for a conilpotent coalgebra `C` and a
//! graded commutative algebra `A`, with exponentials and logarithms.
//!
//! A map is stored as a table on the basis of `C` up to a fixed size; the table
//! domain is closed under coproduct factors, so products, `exp` and `log` are
//! computed exactly on it.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::One;

use crate::algebra::{Ambient, Coalgebra, Elem, GradedAlgebra, Operator, Term};
use crate::error::{Error, Result};
use crate::scalar::{q, sign_pow, Q};

/// A linear map `C -> A ⊗ k[ħ, ħ⁻¹] ⊗ R`, given on basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvMap<CB: Ord, AB: Ord> {
    table: BTreeMap<CB, Elem<AB>>,
}

impl<CB: Ord, AB: Ord> Default for ConvMap<CB, AB> {
    fn default() -> Self {
        Self {
            table: BTreeMap::new(),
        }
    }
}

impl<CB: Clone + Ord, AB: Clone + Ord> ConvMap<CB, AB> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn get(&self, w: &CB) -> Elem<AB> {
        self.table.get(w).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, w: CB, v: Elem<AB>) {
        if v.is_zero() {
            self.table.remove(&w);
        } else {
            self.table.insert(w, v);
        }
    }

    pub fn add_at(&mut self, w: &CB, v: &Elem<AB>) {
        let e = self.table.entry(w.clone()).or_default();
        e.add_assign(v);
        if e.is_zero() {
            self.table.remove(w);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CB, &Elem<AB>)> {
        self.table.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    pub fn map_values(&self, f: impl Fn(&CB, &Elem<AB>) -> Elem<AB>) -> Self {
        let mut out = Self::zero();
        for (w, v) in &self.table {
            out.set(w.clone(), f(w, v));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, v) in &other.table {
            out.add_at(w, v);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&q(-1)))
    }

    pub fn scale(&self, s: &Q) -> Self {
        self.map_values(|_, v| v.scale(s))
    }

    pub fn hbar_shift(&self, k: i32) -> Self {
        self.map_values(|_, v| v.hbar_shift(k))
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.table.values().filter_map(|v| v.min_hbar()).min()
    }

    /// The `ħ^k` coefficient of every value.
    pub fn hbar_coefficient(&self, k: i32) -> Self {
        self.map_values(|_, v| v.hbar_coefficient(k))
    }

    /// Restriction to basis elements satisfying `keep`.
    pub fn restrict(&self, keep: impl Fn(&CB) -> bool) -> Self {
        Self {
            table: self
                .table
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, v)| (w.clone(), v.clone()))
                .collect(),
        }
    }

    /// First basis element on which the two maps differ.
    pub fn first_difference(&self, other: &Self) -> Option<CB> {
        self.table
            .keys()
            .chain(other.table.keys())
            .find(|w| self.table.get(*w) != other.table.get(*w))
            .cloned()
    }
}

/// `Hom(C, A)` with the convolution product, restricted to basis elements of
/// `C` of size at most `max_size`.
pub struct Convolution<'a, C: Coalgebra, A: GradedAlgebra> {
    pub source: &'a C,
    pub target: Ambient<'a, A>,
    domain: Vec<C::Basis>,
}

const SERIES_CAP: usize = 64;

impl<'a, C: Coalgebra, A: GradedAlgebra> Convolution<'a, C, A>
where
    A::Basis: 'static,
    C::Basis: 'static,
{
    pub fn new(source: &'a C, target: Ambient<'a, A>, max_size: usize) -> Self {
        let domain = source.basis_up_to(max_size);
        Self {
            source,
            target,
            domain,
        }
    }

    pub fn domain(&self) -> &[C::Basis] {
        &self.domain
    }

    fn max_weight(&self) -> usize {
        self.domain
            .iter()
            .map(|w| self.source.weight(w))
            .max()
            .unwrap_or(0)
    }

    /// The unit `e`: counit followed by the unit of `A`.
    pub fn unit(&self) -> ConvMap<C::Basis, A::Basis> {
        let mut m = ConvMap::zero();
        m.set(self.source.unit(), self.target.one());
        m
    }

    /// `(f ⋆ g)(w) = Σ (-1)^{|g||w'|} f(w') g(w'')` over `Δw = Σ w' ⊗ w''`.
    pub fn eval_product(
        &self,
        f: &ConvMap<C::Basis, A::Basis>,
        g: &ConvMap<C::Basis, A::Basis>,
        w: &C::Basis,
    ) -> Elem<A::Basis> {
        let mut out = Elem::zero();
        for (w1, w2, c) in self.source.coproduct(w) {
            let (Some(fv), Some(gv)) = (f.table.get(&w1), g.table.get(&w2)) else {
                continue;
            };
            let d1 = self.source.degree(&w1);
            let d2 = self.source.degree(&w2);
            let [g_even, g_odd] = split_by_map_parity(&self.target, gv, d2);
            if !g_even.is_zero() {
                out.add_scaled(&self.target.mul(fv, &g_even), &c);
            }
            if !g_odd.is_zero() {
                out.add_scaled(&self.target.mul(fv, &g_odd), &(&c * sign_pow(d1)));
            }
        }
        out
    }

    pub fn product(
        &self,
        f: &ConvMap<C::Basis, A::Basis>,
        g: &ConvMap<C::Basis, A::Basis>,
    ) -> ConvMap<C::Basis, A::Basis> {
        let mut out = ConvMap::zero();
        for w in &self.domain {
            out.set(w.clone(), self.eval_product(f, g, w));
        }
        out
    }

    /// `exp(f) = Σ f^{⋆n} / n!`; requires `f(1) = 0`.
    pub fn exp(&self, f: &ConvMap<C::Basis, A::Basis>) -> Result<ConvMap<C::Basis, A::Basis>> {
        if !f.get(&self.source.unit()).is_zero() {
            return Err(Error::Precondition("exp needs f(1) = 0".into()));
        }
        let mut out = self.unit();
        let mut power = self.unit();
        let bound = self.max_weight();
        for n in 1..=bound.min(SERIES_CAP) {
            power = self.product(&power, f);
            if power.is_zero() {
                break;
            }
            out = out.add(&power.scale(&(Q::one() / crate::scalar::factorial(n))));
        }
        Ok(out)
    }

    /// `log(F) = Σ (-1)^{n+1} (F - e)^{⋆n} / n`; requires `F(1) = 1`.
    pub fn log(&self, big_f: &ConvMap<C::Basis, A::Basis>) -> Result<ConvMap<C::Basis, A::Basis>> {
        let x = big_f.sub(&self.unit());
        if !x.get(&self.source.unit()).is_zero() {
            return Err(Error::Precondition("log needs F(1) = 1".into()));
        }
        let mut out = ConvMap::zero();
        let mut power = self.unit();
        for n in 1..=self.max_weight().min(SERIES_CAP) {
            power = self.product(&power, &x);
            if power.is_zero() {
                break;
            }
            out = out.add(&power.scale(&(sign_pow(n as i64 + 1) / q(n as i64))));
        }
        Ok(out)
    }

    /// `P ∘ f` for an operator `P` on the target.
    pub fn post_compose(
        &self,
        p: &Operator<A::Basis>,
        f: &ConvMap<C::Basis, A::Basis>,
    ) -> ConvMap<C::Basis, A::Basis> {
        f.map_values(|_, v| p.apply(v))
    }

    /// `f ∘ P` for an operator `P` on the source. `P` must not raise size
    /// beyond the domain.
    pub fn pre_compose(
        &self,
        f: &ConvMap<C::Basis, A::Basis>,
        p: &Operator<C::Basis>,
    ) -> ConvMap<C::Basis, A::Basis> {
        let mut out = ConvMap::zero();
        for w in &self.domain {
            out.set(w.clone(), apply_map(f, &p.on_basis(w)));
        }
        out
    }

    /// The map `R* -> A` corresponding to an element of `A ⊗ R` when `C = R*`.
    pub fn table_from_fn(&self, f: impl Fn(&C::Basis) -> Elem<A::Basis>) -> ConvMap<C::Basis, A::Basis> {
        let mut out = ConvMap::zero();
        for w in &self.domain {
            out.set(w.clone(), f(w));
        }
        out
    }
}

/// Splits `v = f(w)` into the parts on which `f` acts with even and odd degree.
fn split_by_map_parity<A: GradedAlgebra>(
    amb: &Ambient<'_, A>,
    v: &Elem<A::Basis>,
    source_degree: i64,
) -> [Elem<A::Basis>; 2]
where
    A::Basis: 'static,
{
    let [even, odd] = amb.split_parity(v);
    if source_degree.rem_euclid(2) == 0 {
        [even, odd]
    } else {
        [odd, even]
    }
}

/// Applies a map to an element of the source (ħ and ring factors carried along).
pub fn apply_map<CB: Clone + Ord, AB: Clone + Ord>(f: &ConvMap<CB, AB>, x: &Elem<CB>) -> Elem<AB> {
    let mut out = Elem::zero();
    for (t, c) in x.terms() {
        debug_assert_eq!(t.ring, 0);
        if let Some(v) = f.table.get(&t.basis) {
            out.add_scaled(&v.hbar_shift(t.hbar), c);
        }
    }
    out
}

/// Identifies an element of `A ⊗ R` with a map `R* -> A`.
pub fn element_to_dual_map<AB: Clone + Ord>(x: &Elem<AB>) -> ConvMap<usize, AB> {
    let mut out = ConvMap::zero();
    for (t, c) in x.terms() {
        let mut e = Elem::zero();
        e.add_term(
            Term {
                hbar: t.hbar,
                ring: 0,
                basis: t.basis.clone(),
            },
            c.clone(),
        );
        out.add_at(&t.ring, &e);
    }
    out
}

/// Inverse of [`element_to_dual_map`].
pub fn dual_map_to_element<AB: Clone + Ord>(f: &ConvMap<usize, AB>) -> Elem<AB> {
    let mut out = Elem::zero();
    for (r, v) in f.iter() {
        out.add_assign(&v.with_ring(*r));
    }
    out
}

/// The convolution algebra `hom(C, A)` as a graded commutative algebra in its
/// own right, with basis `δ_w ⊗ b` of degree `|b| - |w|`.
///
/// The coalgebra side is cut at size `max_size`; products of basis maps are
/// read off the transposed coproduct.
pub struct ConvolutionAlgebra<C: Coalgebra, A: GradedAlgebra> {
    pub source: Arc<C>,
    pub target: Arc<A>,
    max_size: usize,
    cotable: BTreeMap<(C::Basis, C::Basis), Vec<(C::Basis, Q)>>,
}

impl<C: Coalgebra, A: GradedAlgebra> ConvolutionAlgebra<C, A> {
    pub fn new(source: Arc<C>, target: Arc<A>, max_size: usize) -> Self {
        let mut cotable: BTreeMap<(C::Basis, C::Basis), Vec<(C::Basis, Q)>> = BTreeMap::new();
        for w in source.basis_up_to(max_size) {
            for (w1, w2, c) in source.coproduct(&w) {
                cotable.entry((w1, w2)).or_default().push((w.clone(), c));
            }
        }
        Self {
            source,
            target,
            max_size,
            cotable,
        }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    /// Converts between a table map and an element of this algebra.
    pub fn from_map(&self, f: &ConvMap<C::Basis, A::Basis>) -> Elem<(C::Basis, A::Basis)> {
        let mut out = Elem::zero();
        for (w, v) in f.iter() {
            for (t, c) in v.terms() {
                out.add_term(
                    Term {
                        hbar: t.hbar,
                        ring: t.ring,
                        basis: (w.clone(), t.basis.clone()),
                    },
                    c.clone(),
                );
            }
        }
        out
    }

    pub fn to_map(&self, x: &Elem<(C::Basis, A::Basis)>) -> ConvMap<C::Basis, A::Basis> {
        let mut out = ConvMap::zero();
        for (t, c) in x.terms() {
            let (w, b) = &t.basis;
            out.add_at(w, &Elem::term(b.clone(), t.hbar, t.ring, c.clone()));
        }
        out
    }

    /// `Φ ↦ P ∘ Φ` for an operator on the target.
    pub fn post_operator(&self, p: Operator<A::Basis>) -> Operator<(C::Basis, A::Basis)>
    where
        A::Basis: 'static,
        C::Basis: 'static,
    {
        Operator::new(p.degree(), move |(w, b): &(C::Basis, A::Basis)| {
            p.on_basis(b).map_basis(|b2| (w.clone(), b2.clone()))
        })
    }

    /// `Φ ↦ Φ ∘ P` for an operator on the source, via its transpose on the
    /// truncated basis. `P` must preserve the truncation.
    pub fn pre_operator(&self, p: &Operator<C::Basis>) -> Operator<(C::Basis, A::Basis)>
    where
        A::Basis: 'static,
        C::Basis: 'static,
    {
        let mut transpose: BTreeMap<C::Basis, Vec<(C::Basis, i32, Q)>> = BTreeMap::new();
        for w in self.source.basis_up_to(self.max_size) {
            for (t, c) in p.on_basis(&w).terms() {
                transpose
                    .entry(t.basis.clone())
                    .or_default()
                    .push((w.clone(), t.hbar, c.clone()));
            }
        }
        Operator::new(p.degree(), move |(w, b): &(C::Basis, A::Basis)| {
            let mut out = Elem::zero();
            for (w2, h, c) in transpose.get(w).map(|v| v.as_slice()).unwrap_or(&[]) {
                out.add_term(
                    Term {
                        hbar: *h,
                        ring: 0,
                        basis: (w2.clone(), b.clone()),
                    },
                    c.clone(),
                );
            }
            out
        })
    }
}

impl<C: Coalgebra, A: GradedAlgebra> GradedAlgebra for ConvolutionAlgebra<C, A> {
    type Basis = (C::Basis, A::Basis);

    fn degree(&self, (w, b): &Self::Basis) -> i64 {
        self.target.degree(b) - self.source.degree(w)
    }

    fn unit(&self) -> Self::Basis {
        (self.source.unit(), self.target.unit())
    }

    fn multiply(&self, (w1, b1): &Self::Basis, (w2, b2): &Self::Basis) -> Vec<(Self::Basis, Q)> {
        let Some(targets) = self.cotable.get(&(w1.clone(), w2.clone())) else {
            return vec![];
        };
        let prod = self.target.multiply(b1, b2);
        if prod.is_empty() {
            return vec![];
        }
        let g_deg = self.target.degree(b2) - self.source.degree(w2);
        let sign = sign_pow(g_deg * self.source.degree(w1));
        let mut out = Vec::new();
        for (w, c) in targets {
            for (b, bc) in &prod {
                out.push(((w.clone(), b.clone()), c * bc * &sign));
            }
        }
        out
    }

    fn size(&self, (w, _): &Self::Basis) -> usize {
        self.source.size(w)
    }

    fn basis_up_to(&self, n: usize) -> Vec<Self::Basis> {
        let ws = self.source.basis_up_to(n.min(self.max_size));
        let bs = self.target.basis_up_to(n);
        let mut out = Vec::new();
        for w in &ws {
            for b in &bs {
                out.push((w.clone(), b.clone()));
            }
        }
        out
    }

    fn label(&self, (w, b): &Self::Basis) -> String {
        format!("[{} ↦ {}]", self.source.label(w), self.target.label(b))
    }
}

/// A morphism of coaugmented coalgebras `S(V) -> S(W)`, given by its
/// corestriction `S^{>0}(V) -> W` of degree zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoalgebraMorphism<CB: Ord, AB: Ord> {
    pub corestriction: ConvMap<CB, AB>,
}

impl<CB: Clone + Ord + 'static, AB: Clone + Ord + 'static> CoalgebraMorphism<CB, AB> {
    pub fn new(corestriction: ConvMap<CB, AB>) -> Self {
        Self { corestriction }
    }

    /// The induced map `exp(f)`, computed on the domain of the convolution.
    pub fn induced<C, A>(&self, conv: &Convolution<'_, C, A>) -> Result<ConvMap<CB, AB>>
    where
        C: Coalgebra<Basis = CB>,
        A: GradedAlgebra<Basis = AB>,
        CB: std::hash::Hash + std::fmt::Debug + Send + Sync,
        AB: std::hash::Hash + std::fmt::Debug + Send + Sync,
    {
        conv.exp(&self.corestriction)
    }
}
