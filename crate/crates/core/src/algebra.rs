//! Graded commutative algebras, optionally with a conilpotent coproduct, their
//! elements with coefficients in `k[ħ, ħ⁻¹] ⊗ R`, and linear operators on them.
//!
//! Every element is a finite sparse sum of terms `c · ħ^h · b ⊗ r` with `b` a
//! basis element of the algebra, `h` an integer power of `ħ` (`|ħ| = 2`) and
//! `r` a basis element of an Artin ring `R`. Both `ħ` and `R` are even, so they
//! never contribute Koszul signs. All arithmetic is exact and untruncated; the
//! `ħ`-cutoff and word-length bounds only enter when results are compared.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::ring::ArtinRing;
use crate::scalar::{factorial, format_rational, sign_pow, Q};

/// A graded commutative (up to Koszul sign) unital algebra on a countable
/// basis, filtered by an integer size (word length, m-adic order, ...).
pub trait GradedAlgebra: Send + Sync {
    type Basis: Clone + Ord + Hash + Debug + Send + Sync;

    fn degree(&self, b: &Self::Basis) -> i64;

    fn unit(&self) -> Self::Basis;

    fn is_unit(&self, b: &Self::Basis) -> bool {
        *b == self.unit()
    }

    fn multiply(&self, a: &Self::Basis, b: &Self::Basis) -> Vec<(Self::Basis, Q)>;

    /// Filtration size of a basis element; products of sizes `p` and `q` have size `p + q`.
    fn size(&self, b: &Self::Basis) -> usize;

    /// All basis elements of size at most `n`, in canonical order.
    fn basis_up_to(&self, n: usize) -> Vec<Self::Basis>;

    fn label(&self, b: &Self::Basis) -> String;
}

/// A conilpotent cocommutative coproduct compatible with the unit, whose
/// counit is the projection onto the unit.
pub trait Coalgebra: GradedAlgebra {
    /// The chosen coproduct, as `(left, right, coefficient)` triples.
    fn coproduct(&self, b: &Self::Basis) -> Vec<(Self::Basis, Self::Basis, Q)>;

    /// Coradical weight: the reduced coproduct iterated `weight(b)` times kills `b`.
    fn weight(&self, b: &Self::Basis) -> usize;
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Term<B> {
    pub hbar: i32,
    pub ring: usize,
    pub basis: B,
}

/// A finite element of `A ⊗ k[ħ, ħ⁻¹] ⊗ R`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Elem<B: Ord>(BTreeMap<Term<B>, Q>);

impl<B: Ord> Default for Elem<B> {
    fn default() -> Self {
        Self(BTreeMap::new())
    }
}

impl<B: Clone + Ord> Elem<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: B) -> Self {
        Self::term(b, 0, 0, Q::one())
    }

    pub fn term(b: B, hbar: i32, ring: usize, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(Term { hbar, ring, basis: b }, c);
        e
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (B, Q)>) -> Self {
        let mut e = Self::zero();
        for (b, c) in pairs {
            e.add_term(Term { hbar: 0, ring: 0, basis: b }, c);
        }
        e
    }

    pub fn add_term(&mut self, t: Term<B>, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&t) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.0.remove(&t);
                }
            }
            None => {
                self.0.insert(t, c);
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (t, c) in &other.0 {
            self.add_term(t.clone(), c * s);
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (t, c) in &other.0 {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        Self(self.0.iter().map(|(t, c)| (t.clone(), c * s)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Term<B>, &Q)> {
        self.0.iter()
    }

    pub fn coeff(&self, t: &Term<B>) -> Q {
        self.0.get(t).cloned().unwrap_or_else(Q::zero)
    }

    /// Multiplies by `ħ^k`.
    pub fn hbar_shift(&self, k: i32) -> Self {
        Self(
            self.0
                .iter()
                .map(|(t, c)| {
                    (
                        Term {
                            hbar: t.hbar + k,
                            ring: t.ring,
                            basis: t.basis.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect(),
        )
    }

    pub fn min_hbar(&self) -> Option<i32> {
        self.0.keys().map(|t| t.hbar).min()
    }

    pub fn max_hbar(&self) -> Option<i32> {
        self.0.keys().map(|t| t.hbar).max()
    }

    /// Drops every term with `ħ`-power `>= cutoff`.
    pub fn truncate_hbar(&self, cutoff: i32) -> Self {
        self.filter(|t| t.hbar < cutoff)
    }

    pub fn filter(&self, keep: impl Fn(&Term<B>) -> bool) -> Self {
        Self(
            self.0
                .iter()
                .filter(|(t, _)| keep(t))
                .map(|(t, c)| (t.clone(), c.clone()))
                .collect(),
        )
    }

    /// The coefficient of `ħ^k` as an element with `ħ`-power zero.
    pub fn hbar_coefficient(&self, k: i32) -> Self {
        self.filter(|t| t.hbar == k).hbar_shift(-k)
    }

    /// The coefficient of the ring basis element `r`, placed at ring index 0.
    pub fn ring_coefficient(&self, r: usize) -> Self {
        Self(
            self.0
                .iter()
                .filter(|(t, _)| t.ring == r)
                .map(|(t, c)| {
                    (
                        Term {
                            hbar: t.hbar,
                            ring: 0,
                            basis: t.basis.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect(),
        )
    }

    /// Tensors with the ring basis element `r`; the element must be `R`-free.
    pub fn with_ring(&self, r: usize) -> Self {
        Self(
            self.0
                .iter()
                .map(|(t, c)| {
                    debug_assert_eq!(t.ring, 0);
                    (
                        Term {
                            hbar: t.hbar,
                            ring: r,
                            basis: t.basis.clone(),
                        },
                        c.clone(),
                    )
                })
                .collect(),
        )
    }

    pub fn map_basis<C: Clone + Ord>(&self, f: impl Fn(&B) -> C) -> Elem<C> {
        let mut out = Elem::zero();
        for (t, c) in &self.0 {
            out.add_term(
                Term {
                    hbar: t.hbar,
                    ring: t.ring,
                    basis: f(&t.basis),
                },
                c.clone(),
            );
        }
        out
    }
}

type OpFn<B> = dyn Fn(&B) -> Elem<B> + Send + Sync;

/// A `k[ħ] ⊗ R`-linear operator, given by its values on basis elements.
///
/// `degree` is the total degree with `|ħ| = 2`. Values are memoized.
#[derive(Clone)]
pub struct Operator<B: Ord> {
    degree: i64,
    f: Arc<OpFn<B>>,
    cache: Arc<Mutex<HashMap<B, Elem<B>>>>,
}

impl<B: Clone + Ord + Hash + Send + Sync + 'static> Operator<B> {
    pub fn new(degree: i64, f: impl Fn(&B) -> Elem<B> + Send + Sync + 'static) -> Self {
        Self {
            degree,
            f: Arc::new(f),
            cache: Arc::new(Mutex::new(HashMap::new())),
        }
    }

    pub fn zero(degree: i64) -> Self {
        Self::new(degree, |_| Elem::zero())
    }

    pub fn identity() -> Self {
        Self::new(0, |b: &B| Elem::basis(b.clone()))
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn on_basis(&self, b: &B) -> Elem<B> {
        if let Some(v) = self.cache.lock().unwrap().get(b) {
            return v.clone();
        }
        let v = (self.f)(b);
        self.cache.lock().unwrap().insert(b.clone(), v.clone());
        v
    }

    pub fn apply(&self, x: &Elem<B>) -> Elem<B> {
        let mut out = Elem::zero();
        for (t, c) in x.terms() {
            let img = self.on_basis(&t.basis);
            for (t2, c2) in img.terms() {
                debug_assert_eq!(t2.ring, 0, "operators are k-linear");
                out.add_term(
                    Term {
                        hbar: t.hbar + t2.hbar,
                        ring: t.ring,
                        basis: t2.basis.clone(),
                    },
                    c * c2,
                );
            }
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let (a, b) = (self.clone(), inner.clone());
        Self::new(self.degree + inner.degree, move |x| a.apply(&b.on_basis(x)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        Self::new(self.degree, move |x| a.on_basis(x).add(&b.on_basis(x)))
    }

    pub fn scaled(&self, s: Q) -> Self {
        let a = self.clone();
        Self::new(self.degree, move |x| a.on_basis(x).scale(&s))
    }

    /// `ħ^k · self`; raises the total degree by `2k`.
    pub fn hbar_times(&self, k: i32) -> Self {
        let a = self.clone();
        Self::new(self.degree + 2 * k as i64, move |x| a.on_basis(x).hbar_shift(k))
    }

    /// Graded commutator `[self, other] = self∘other - (-1)^{|self||other|} other∘self`.
    pub fn commutator(&self, other: &Self) -> Self {
        let s = sign_pow(self.degree * other.degree);
        self.compose(other).plus(&other.compose(self).scaled(-s))
    }

    pub fn sum(degree: i64, ops: &[Self]) -> Self {
        let ops = ops.to_vec();
        Self::new(degree, move |x| {
            let mut out = Elem::zero();
            for o in &ops {
                out.add_assign(&o.on_basis(x));
            }
            out
        })
    }
}

/// The ambient algebra `A ⊗ k[ħ, ħ⁻¹] ⊗ R` in which products are taken.
pub struct Ambient<'a, A: GradedAlgebra> {
    pub alg: &'a A,
    pub ring: &'a ArtinRing,
}

impl<'a, A: GradedAlgebra> Clone for Ambient<'a, A> {
    fn clone(&self) -> Self {
        Self { alg: self.alg, ring: self.ring }
    }
}

const SERIES_CAP: usize = 64;

impl<'a, A: GradedAlgebra> Ambient<'a, A>
where
    A::Basis: 'static,
{
    pub fn new(alg: &'a A, ring: &'a ArtinRing) -> Self {
        Self { alg, ring }
    }

    pub fn one(&self) -> Elem<A::Basis> {
        Elem::basis(self.alg.unit())
    }

    pub fn mul(&self, x: &Elem<A::Basis>, y: &Elem<A::Basis>) -> Elem<A::Basis> {
        let mut out = Elem::zero();
        for (t1, c1) in x.terms() {
            for (t2, c2) in y.terms() {
                let ring_prod = self.ring.mul(t1.ring, t2.ring);
                if ring_prod.is_empty() {
                    continue;
                }
                let prod = self.alg.multiply(&t1.basis, &t2.basis);
                if prod.is_empty() {
                    continue;
                }
                let c = c1 * c2;
                for (r, rc) in ring_prod {
                    for (b, bc) in &prod {
                        out.add_term(
                            Term {
                                hbar: t1.hbar + t2.hbar,
                                ring: *r,
                                basis: b.clone(),
                            },
                            &c * rc * bc,
                        );
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, x: &Elem<A::Basis>, n: usize) -> Elem<A::Basis> {
        let mut acc = self.one();
        for _ in 0..n {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// `Σ x^n / n!`; `x` must be nilpotent.
    pub fn exp(&self, x: &Elem<A::Basis>) -> Result<Elem<A::Basis>> {
        let mut out = self.one();
        let mut power = self.one();
        for n in 1..=SERIES_CAP {
            power = self.mul(&power, x);
            if power.is_zero() {
                return Ok(out);
            }
            out.add_scaled(&power, &(Q::one() / factorial(n)));
        }
        Err(Error::NotNilpotent(SERIES_CAP))
    }

    pub fn parity(&self, b: &A::Basis) -> i64 {
        self.alg.degree(b).rem_euclid(2)
    }

    /// Splits an element into its even and odd parts.
    pub fn split_parity(&self, x: &Elem<A::Basis>) -> [Elem<A::Basis>; 2] {
        [
            x.filter(|t| self.parity(&t.basis) == 0),
            x.filter(|t| self.parity(&t.basis) == 1),
        ]
    }

    /// Total degree of a homogeneous element (`|ħ| = 2`), `None` if inhomogeneous or zero.
    pub fn total_degree(&self, x: &Elem<A::Basis>) -> Option<i64> {
        let mut it = x.terms().map(|(t, _)| self.alg.degree(&t.basis) + 2 * t.hbar as i64);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// `[...[[P, L_{v_1}], L_{v_2}], ..., L_{v_n}](x)` for an operator `P` of
    /// parity `op_parity`. Inhomogeneous arguments are split by parity.
    pub fn iterated_commutator(
        &self,
        op: &dyn Fn(&Elem<A::Basis>) -> Elem<A::Basis>,
        op_parity: i64,
        args: &[Elem<A::Basis>],
        x: &Elem<A::Basis>,
    ) -> Elem<A::Basis> {
        let split: Vec<[Elem<A::Basis>; 2]> = args.iter().map(|v| self.split_parity(v)).collect();
        let mut out = Elem::zero();
        let n = args.len();
        for mask in 0..(1u32 << n) {
            let mut homog = Vec::with_capacity(n);
            let mut parities = Vec::with_capacity(n);
            let mut skip = false;
            for (i, parts) in split.iter().enumerate() {
                let p = ((mask >> i) & 1) as usize;
                if parts[p].is_zero() {
                    skip = true;
                    break;
                }
                homog.push(&parts[p]);
                parities.push(p as i64);
            }
            if skip {
                continue;
            }
            out.add_assign(&self.commutator_rec(op, op_parity, &homog, &parities, x));
        }
        out
    }

    fn commutator_rec(
        &self,
        op: &dyn Fn(&Elem<A::Basis>) -> Elem<A::Basis>,
        op_parity: i64,
        args: &[&Elem<A::Basis>],
        parities: &[i64],
        x: &Elem<A::Basis>,
    ) -> Elem<A::Basis> {
        let Some((last, rest)) = args.split_last() else {
            return op(x);
        };
        let (last_p, rest_p) = parities.split_last().unwrap();
        let inner_parity = op_parity + rest_p.iter().sum::<i64>();
        let first = self.commutator_rec(op, op_parity, rest, rest_p, &self.mul(last, x));
        let second = self.mul(last, &self.commutator_rec(op, op_parity, rest, rest_p, x));
        first.sub(&second.scale(&sign_pow(inner_parity * last_p)))
    }

    pub fn format(&self, x: &Elem<A::Basis>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = x
            .terms()
            .map(|(t, c)| {
                let mut s = format_rational(c);
                if t.hbar != 0 {
                    s.push_str(&format!("*h^{}", t.hbar));
                }
                s.push('*');
                s.push_str(&self.alg.label(&t.basis));
                if t.ring != 0 {
                    s.push_str(&format!("*{}", self.ring.label(t.ring)));
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}
