//! dg-BV and BV∞-algebras: operator order, antibrackets, derived brackets, the
//! quantum master equation in its two forms, the conjugation identity, and an
//! order-by-order QME solver.
//!
//! A BV∞ structure is a family `Δ_n` of operators of degree `3 - 2n` with
//! `d̂ = Σ ħ^{n-1} Δ_n` of total degree one. A dg-BV algebra is the case
//! `Δ_1 = d`, `Δ_2 = Δ`. All operators are defined on every basis element, so
//! products are never truncated; the word-length bound `max_size` only limits
//! which basis elements certificates range over.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::{Ambient, Elem, GradedAlgebra, Operator, Term};
use crate::error::{Error, Result};
use crate::graded::GradedVectorSpace;
use crate::linalg::solve_columns;
use crate::linfty::LInfty;
use crate::report::Verdict;
use crate::ring::ArtinRing;
use crate::scalar::{factorial, sign_pow, Q};
use crate::sym::{SymAlgebra, SymWord, WordOperator};

/// A BV∞-algebra on a graded commutative algebra.
pub struct BvInfty<A: GradedAlgebra> {
    alg: Arc<A>,
    ops: BTreeMap<usize, Operator<A::Basis>>,
    dhat: Operator<A::Basis>,
    max_size: usize,
    hbar_cutoff: usize,
}

impl<A: GradedAlgebra> Clone for BvInfty<A> {
    fn clone(&self) -> Self {
        Self {
            alg: self.alg.clone(),
            ops: self.ops.clone(),
            dhat: self.dhat.clone(),
            max_size: self.max_size,
            hbar_cutoff: self.hbar_cutoff,
        }
    }
}

/// One verdict per BV∞ axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvInftyReport {
    pub unit: Verdict,
    pub square_zero: Verdict,
    /// `(n, Δ_n has order ≤ n)`.
    pub orders: Vec<(usize, Verdict)>,
}

impl BvInftyReport {
    pub fn holds(&self) -> bool {
        self.unit.holds && self.square_zero.holds && self.orders.iter().all(|(_, v)| v.holds)
    }

    pub fn entries(&self) -> Vec<(String, &Verdict)> {
        let mut out = vec![("dhat(1) = 0".to_string(), &self.unit), ("dhat^2 = 0".to_string(), &self.square_zero)];
        for (n, v) in &self.orders {
            out.push((format!("Delta_{n} has order <= {n}"), v));
        }
        out
    }

    pub fn first_failure(&self) -> Option<(String, &Verdict)> {
        self.entries().into_iter().find(|(_, v)| !v.holds)
    }
}

impl<A: GradedAlgebra> BvInfty<A>
where
    A::Basis: 'static,
{
    /// `ops` lists `(n, Δ_n)`; each `Δ_n` must have degree `3 - 2n`.
    pub fn new(
        alg: Arc<A>,
        ops: Vec<(usize, Operator<A::Basis>)>,
        max_size: usize,
        hbar_cutoff: usize,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, op) in ops {
            if n == 0 {
                return Err(Error::Precondition("Δ_0 is not allowed".into()));
            }
            let expected = 3 - 2 * n as i64;
            if op.degree() != expected {
                return Err(Error::DegreeMismatch(format!(
                    "Δ_{n} has degree {}, expected {expected}",
                    op.degree()
                )));
            }
            if map.insert(n, op).is_some() {
                return Err(Error::Precondition(format!("Δ_{n} given twice")));
            }
        }
        let parts: Vec<Operator<A::Basis>> = map
            .iter()
            .map(|(n, op)| op.hbar_times(*n as i32 - 1))
            .collect();
        let dhat = Operator::sum(1, &parts);
        Ok(Self {
            alg,
            ops: map,
            dhat,
            max_size,
            hbar_cutoff,
        })
    }

    pub fn algebra(&self) -> &Arc<A> {
        &self.alg
    }

    pub fn ambient<'a>(&'a self, ring: &'a ArtinRing) -> Ambient<'a, A> {
        Ambient::new(self.alg.as_ref(), ring)
    }

    pub fn op(&self, n: usize) -> Option<&Operator<A::Basis>> {
        self.ops.get(&n)
    }

    pub fn orders(&self) -> Vec<usize> {
        self.ops.keys().copied().collect()
    }

    /// `d̂ = Σ ħ^{n-1} Δ_n`.
    pub fn dhat(&self) -> &Operator<A::Basis> {
        &self.dhat
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn hbar_cutoff(&self) -> usize {
        self.hbar_cutoff
    }

    pub fn basis(&self) -> Vec<A::Basis> {
        self.alg.basis_up_to(self.max_size)
    }

    fn format(&self, x: &Elem<A::Basis>) -> String {
        let ground = ArtinRing::ground();
        self.ambient(&ground).format(x)
    }

    /// `d̂(1) = 0`, `d̂² = 0` and `Δ_n` of order `≤ n` on words up to `max_size`.
    pub fn certify(&self) -> BvInftyReport {
        let unit_val = self.dhat.on_basis(&self.alg.unit());
        let unit = Verdict::from_bool(unit_val.is_zero(), || {
            format!("d̂(1) = {}", self.format(&unit_val))
        });
        let mut square_zero = Verdict::pass();
        for b in self.basis() {
            let dd = self.dhat.apply(&self.dhat.on_basis(&b));
            if !dd.is_zero() {
                square_zero = Verdict::fail(format!(
                    "d̂²({}) = {}",
                    self.alg.label(&b),
                    self.format(&dd)
                ));
                break;
            }
        }
        let orders = self
            .ops
            .iter()
            .map(|(n, op)| (*n, operator_order_check(self.alg.as_ref(), op, *n, self.max_size)))
            .collect();
        BvInftyReport {
            unit,
            square_zero,
            orders,
        }
    }

    /// Checks that `S ∈ V[[ħ]]² ⊗ m` with `ħ`-powers below the cutoff.
    pub fn validate_qme_element(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<()> {
        for (t, _) in s.terms() {
            let deg = self.alg.degree(&t.basis) + 2 * t.hbar as i64;
            if deg != 2 {
                return Err(Error::DegreeMismatch(format!(
                    "term {} of S has total degree {deg}, expected 2",
                    self.ambient(ring).format(&Elem::term(t.basis.clone(), t.hbar, t.ring, Q::one()))
                )));
            }
            if t.hbar < 0 || t.hbar as usize >= self.hbar_cutoff {
                return Err(Error::Truncation(format!(
                    "ħ^{} outside the window [0, {})",
                    t.hbar, self.hbar_cutoff
                )));
            }
            if t.ring == 0 {
                return Err(Error::Precondition(
                    "coefficients of S must lie in the maximal ideal".into(),
                ));
            }
        }
        Ok(())
    }

    /// `[...[d̂, L_{v_1}], ..., L_{v_n}](1)`, the derived bracket multiplied
    /// back by `ħ^{n-1}`.
    pub fn derived_bracket_raw(&self, ring: &ArtinRing, args: &[Elem<A::Basis>]) -> Elem<A::Basis> {
        let amb = self.ambient(ring);
        let d = self.dhat.clone();
        amb.iterated_commutator(&move |x| d.apply(x), 1, args, &amb.one())
    }

    /// `{v_1, ..., v_n} = ħ^{-(n-1)} [...[d̂, L_{v_1}], ..., L_{v_n}](1)`.
    /// A surviving negative power of `ħ` means some `Δ_k` violates its order bound.
    pub fn derived_bracket(&self, ring: &ArtinRing, args: &[Elem<A::Basis>]) -> Result<Elem<A::Basis>> {
        let n = args.len() as i32;
        let v = self.derived_bracket_raw(ring, args).hbar_shift(-(n - 1).max(0));
        if v.min_hbar().is_some_and(|h| h < 0) {
            return Err(Error::NegativeHbar(format!(
                "derived bracket of arity {n} has {}",
                self.ambient(ring).format(&v.filter(|t| t.hbar < 0))
            )));
        }
        Ok(v)
    }

    /// `Σ_{n≥1} {S, ..., S}_n / n!`, finite since `m` is nilpotent.
    pub fn bvinfty_qme_residual(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Elem<A::Basis>> {
        self.validate_qme_element(ring, s)?;
        let mut out = Elem::zero();
        let mut args = Vec::new();
        // the n-fold bracket has coefficients in m^n
        for n in 1..ring.nilpotency() {
            args.push(s.clone());
            let b = self.derived_bracket(ring, &args)?;
            out.add_scaled(&b, &(Q::one() / factorial(n)));
        }
        Ok(out)
    }

    /// `e^{S/ħ}` in the Laurent window `V((ħ)) ⊗ R`.
    pub fn exp_over_hbar(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Elem<A::Basis>> {
        self.ambient(ring).exp(&s.hbar_shift(-1))
    }

    /// `d̂ e^{S/ħ} = 0`.
    pub fn qme_exp_check(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Verdict> {
        self.validate_qme_element(ring, s)?;
        let e = self.exp_over_hbar(ring, s)?;
        let v = self.dhat.apply(&e);
        Ok(Verdict::from_bool(v.is_zero(), || {
            format!("d̂ e^(S/h) = {}", self.ambient(ring).format(&v))
        }))
    }

    /// `e^{-S/ħ} ∘ d̂ ∘ e^{S/ħ} = d̂ + Σ_{n≥1} {S^n, -}/n! + ħ⁻¹ (Σ_{n≥1} {S^n}/n!)`,
    /// applied to every basis element up to `max_size`.
    pub fn conjugation_identity_check(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Verdict> {
        self.validate_qme_element(ring, s)?;
        let amb = self.ambient(ring);
        let e = self.exp_over_hbar(ring, s)?;
        let e_inv = self.exp_over_hbar(ring, &s.neg())?;
        let residual = self.bvinfty_qme_residual(ring, s)?;
        for b in self.basis() {
            let bb = Elem::basis(b.clone());
            let lhs = amb.mul(&e_inv, &self.dhat.apply(&amb.mul(&e, &bb)));
            let mut rhs = self.dhat.on_basis(&b);
            let mut args = Vec::new();
            for n in 1..ring.nilpotency() {
                args.push(s.clone());
                let mut full = args.clone();
                full.push(bb.clone());
                let br = self.derived_bracket(ring, &full)?;
                rhs.add_scaled(&br, &(Q::one() / factorial(n)));
            }
            rhs.add_assign(&amb.mul(&residual, &bb).hbar_shift(-1));
            if lhs != rhs {
                return Ok(Verdict::fail(format!(
                    "on {}: conjugated d̂ gives {}, bracket side gives {}",
                    self.alg.label(&b),
                    amb.format(&lhs),
                    amb.format(&rhs)
                )));
            }
        }
        Ok(Verdict::pass())
    }
}

impl BvInfty<SymAlgebra> {
    /// The BV∞-algebra `S(g[-1])` of an L∞-algebra: `Δ_n` is the arity-`n`
    /// component of its codifferential, read on `S(g[-1])`.
    pub fn from_linfty(l: &LInfty, max_size: usize, hbar_cutoff: usize) -> Result<Self> {
        let alg = Arc::new(SymAlgebra::new(l.space().shift(-1)));
        let mut ops = Vec::new();
        for n in l.codifferential().arities() {
            let mut op = WordOperator::new(3 - 2 * n as i64);
            for (w, v) in l.bracket(n).symbol() {
                op.add(&alg, w, v)?;
            }
            ops.push((n, op.to_operator(&alg)));
        }
        Self::new(alg, ops, max_size, hbar_cutoff)
    }
}

/// A dg-BV algebra `(V, d, Δ)`.
pub struct BvAlgebra<A: GradedAlgebra> {
    inner: BvInfty<A>,
    d: Operator<A::Basis>,
    delta: Operator<A::Basis>,
}

impl<A: GradedAlgebra> Clone for BvAlgebra<A> {
    fn clone(&self) -> Self {
        Self {
            inner: self.inner.clone(),
            d: self.d.clone(),
            delta: self.delta.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvReport {
    pub d_squared: Verdict,
    pub delta_squared: Verdict,
    pub commute: Verdict,
    pub delta_unit: Verdict,
    pub d_derivation: Verdict,
    pub delta_order: Verdict,
}

impl BvReport {
    pub fn entries(&self) -> [(&'static str, &Verdict); 6] {
        [
            ("d^2 = 0", &self.d_squared),
            ("Delta^2 = 0", &self.delta_squared),
            ("[Delta, d] = 0", &self.commute),
            ("Delta(1) = 0", &self.delta_unit),
            ("d is a derivation", &self.d_derivation),
            ("Delta has order <= 2", &self.delta_order),
        ]
    }

    pub fn holds(&self) -> bool {
        self.entries().iter().all(|(_, v)| v.holds)
    }

    pub fn first_failure(&self) -> Option<(&'static str, &Verdict)> {
        self.entries().into_iter().find(|(_, v)| !v.holds)
    }
}

impl<A: GradedAlgebra> BvAlgebra<A>
where
    A::Basis: 'static,
{
    pub fn new(
        alg: Arc<A>,
        d: Operator<A::Basis>,
        delta: Operator<A::Basis>,
        max_size: usize,
        hbar_cutoff: usize,
    ) -> Result<Self> {
        let inner = BvInfty::new(
            alg,
            vec![(1, d.clone()), (2, delta.clone())],
            max_size,
            hbar_cutoff,
        )?;
        Ok(Self { inner, d, delta })
    }

    pub fn as_infty(&self) -> &BvInfty<A> {
        &self.inner
    }

    pub fn algebra(&self) -> &Arc<A> {
        self.inner.algebra()
    }

    pub fn d(&self) -> &Operator<A::Basis> {
        &self.d
    }

    pub fn delta(&self) -> &Operator<A::Basis> {
        &self.delta
    }

    pub fn max_size(&self) -> usize {
        self.inner.max_size
    }

    fn first_nonzero(&self, name: &str, f: impl Fn(&A::Basis) -> Elem<A::Basis>) -> Verdict {
        for w in self.inner.basis() {
            let v = f(&w);
            if !v.is_zero() {
                return Verdict::fail(format!(
                    "{name}({}) = {}",
                    self.algebra().label(&w),
                    self.inner.format(&v)
                ));
            }
        }
        Verdict::pass()
    }

    pub fn certify(&self) -> BvReport {
        let n = self.max_size();
        let alg = self.algebra().as_ref();
        let unit_val = self.delta.on_basis(&alg.unit());
        let d_unit = self.d.on_basis(&alg.unit());
        let d_order = operator_order_check(alg, &self.d, 1, n);
        let d_derivation = if d_unit.is_zero() {
            d_order
        } else {
            Verdict::fail(format!("d(1) = {}", self.inner.format(&d_unit)))
        };
        BvReport {
            d_squared: self.first_nonzero("d²", |w| self.d.apply(&self.d.on_basis(w))),
            delta_squared: self.first_nonzero("Δ²", |w| self.delta.apply(&self.delta.on_basis(w))),
            commute: self.first_nonzero("[Δ,d]", |w| {
                self.delta
                    .apply(&self.d.on_basis(w))
                    .add(&self.d.apply(&self.delta.on_basis(w)))
            }),
            delta_unit: Verdict::from_bool(unit_val.is_zero(), || {
                format!("Δ(1) = {}", self.inner.format(&unit_val))
            }),
            d_derivation,
            delta_order: operator_order_check(alg, &self.delta, 2, n),
        }
    }

    /// `{a, b} = (-1)^{|a|} (Δ(ab) - (Δa)b - (-1)^{|a|} a(Δb))`.
    pub fn antibracket(&self, ring: &ArtinRing, a: &Elem<A::Basis>, b: &Elem<A::Basis>) -> Elem<A::Basis> {
        antibracket(&self.inner.ambient(ring), &self.delta, a, b)
    }

    /// `dS + ħΔS + ½{S, S}`, computed without expanding any exponential.
    pub fn qme_residual(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Elem<A::Basis>> {
        self.inner.validate_qme_element(ring, s)?;
        let mut out = self.d.apply(s);
        out.add_assign(&self.delta.apply(s).hbar_shift(1));
        out.add_scaled(&self.antibracket(ring, s, s), &Q::new(1.into(), 2.into()));
        Ok(out)
    }

    /// `e^{-S/ħ} ∘ d̂ ∘ e^{S/ħ} = d̂ + {S, -} + ħ⁻¹(d̂S + ½{S, S})`, with the
    /// antibracket on the right.
    pub fn conjugation_identity_check(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<Verdict> {
        let residual = self.qme_residual(ring, s)?;
        let amb = self.inner.ambient(ring);
        let e = self.inner.exp_over_hbar(ring, s)?;
        let e_inv = self.inner.exp_over_hbar(ring, &s.neg())?;
        for b in self.inner.basis() {
            let bb = Elem::basis(b.clone());
            let lhs = amb.mul(&e_inv, &self.inner.dhat.apply(&amb.mul(&e, &bb)));
            let rhs = self
                .inner
                .dhat
                .on_basis(&b)
                .add(&self.antibracket(ring, s, &bb))
                .add(&amb.mul(&residual, &bb).hbar_shift(-1));
            if lhs != rhs {
                return Ok(Verdict::fail(format!(
                    "on {}: {} vs {}",
                    self.algebra().label(&b),
                    amb.format(&lhs),
                    amb.format(&rhs)
                )));
            }
        }
        Ok(Verdict::pass())
    }
}

/// `{a, b} = (-1)^{|a|} (Δ(ab) - (Δa)b - (-1)^{|a|} a(Δb))`; inhomogeneous `a`
/// is split by parity.
pub fn antibracket<A: GradedAlgebra>(
    amb: &Ambient<'_, A>,
    delta: &Operator<A::Basis>,
    a: &Elem<A::Basis>,
    b: &Elem<A::Basis>,
) -> Elem<A::Basis>
where
    A::Basis: 'static,
{
    let mut out = Elem::zero();
    for (p, part) in amb.split_parity(a).iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        let sa = sign_pow(p as i64);
        let v = delta
            .apply(&amb.mul(part, b))
            .sub(&amb.mul(&delta.apply(part), b))
            .sub(&amb.mul(part, &delta.apply(b)).scale(&sa));
        out.add_scaled(&v, &sa);
    }
    out
}

/// The sign relating the binary derived bracket of a dg-BV algebra to the
/// antibracket: `{a, b}_derived = (-1)^{|a|} {a, b}`.
pub fn derived_to_antibracket_sign(a_degree: i64) -> i64 {
    if a_degree.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Checks that every `(n+1)`-fold commutator `[...[P, L_{v_0}], ..., L_{v_n}]`
/// vanishes on basis elements, over all tuples of non-unit basis elements `v_i`
/// and arguments `x` whose sizes add up to at most `max_size`. The verdict is
/// a certificate up to that size.
pub fn operator_order_check<A: GradedAlgebra>(
    alg: &A,
    op: &Operator<A::Basis>,
    n: usize,
    max_size: usize,
) -> Verdict
where
    A::Basis: 'static,
{
    let ground = ArtinRing::ground();
    let amb = Ambient::new(alg, &ground);
    let basis = alg.basis_up_to(max_size);
    let test: Vec<&A::Basis> = basis.iter().filter(|b| !alg.is_unit(b)).collect();
    let parity = op.degree().rem_euclid(2);
    let p = op.clone();
    let f = move |x: &Elem<A::Basis>| p.apply(x);
    let mut tuple: Vec<usize> = Vec::new();
    fn rec<A: GradedAlgebra>(
        alg: &A,
        amb: &Ambient<'_, A>,
        f: &dyn Fn(&Elem<A::Basis>) -> Elem<A::Basis>,
        parity: i64,
        test: &[&A::Basis],
        basis: &[A::Basis],
        tuple: &mut Vec<usize>,
        n: usize,
        budget: usize,
    ) -> Option<String>
    where
        A::Basis: 'static,
    {
        if tuple.len() == n + 1 {
            let args: Vec<Elem<A::Basis>> =
                tuple.iter().map(|&i| Elem::basis(test[i].clone())).collect();
            for x in basis.iter().filter(|x| alg.size(x) <= budget) {
                let v = amb.iterated_commutator(f, parity, &args, &Elem::basis(x.clone()));
                if !v.is_zero() {
                    let names: Vec<String> = tuple.iter().map(|&i| alg.label(test[i])).collect();
                    return Some(format!(
                        "commutator with L_{} on {} = {}",
                        names.join(", L_"),
                        alg.label(x),
                        amb.format(&v)
                    ));
                }
            }
            return None;
        }
        let start = tuple.last().copied().unwrap_or(0);
        for i in start..test.len() {
            let s = alg.size(test[i]);
            if s > budget {
                continue;
            }
            tuple.push(i);
            let r = rec(alg, amb, f, parity, test, basis, tuple, n, budget - s);
            tuple.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    match rec(alg, &amb, &f, parity, &test, &basis, &mut tuple, n, max_size) {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(w),
    }
}

/// Assembles the derived brackets `l_n = [...[d̂, L_{v_1}], ..., L_{v_n}](1)`
/// into a codifferential on `S(V)` (with `V` playing the role of `g[1]`) over
/// basis elements of size at most `max_size`, and checks `D² = 0` on words of
/// length at most `max_len` whose total size fits. Also checks that the failure
/// of `l_n` to be a derivation in its last slot is `l_{n+1}`.
pub fn derived_brackets_linfty_check<A: GradedAlgebra>(
    v: &BvInfty<A>,
    max_arity: usize,
    max_len: usize,
) -> Result<Verdict>
where
    A::Basis: 'static,
{
    if max_len > max_arity {
        return Err(Error::Truncation(format!(
            "word length {max_len} needs brackets up to arity {max_len}, only {max_arity} requested"
        )));
    }
    let alg = v.algebra().as_ref();
    let ground = ArtinRing::ground();
    let amb = v.ambient(&ground);
    let basis = v.basis();
    let index: BTreeMap<A::Basis, usize> =
        basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
    let space = GradedVectorSpace::new(basis.iter().map(|b| (alg.label(b), alg.degree(b))))?;
    let sv = Arc::new(SymAlgebra::new(space));
    let word_size = |w: &SymWord| -> usize { w.factors().iter().map(|&i| alg.size(&basis[i])).sum() };
    let words: Vec<SymWord> = sv
        .basis_up_to(max_len)
        .into_iter()
        .filter(|w| !w.is_empty() && word_size(w) <= v.max_size())
        .collect();
    let mut codiff = WordOperator::new(1);
    for w in &words {
        let args: Vec<Elem<A::Basis>> =
            w.factors().iter().map(|&i| Elem::basis(basis[i].clone())).collect();
        let raw = v.derived_bracket_raw(&ground, &args);
        let n = args.len() as i32;
        if raw.min_hbar().is_some_and(|h| h < n - 1) {
            return Ok(Verdict::fail(format!(
                "bracket on {} has a negative power of ħ after dividing by ħ^{}",
                sv.label(w),
                n - 1
            )));
        }
        let mut val = Elem::zero();
        for (t, c) in raw.terms() {
            let Some(&j) = index.get(&t.basis) else {
                return Err(Error::Truncation(format!(
                    "bracket on {} leaves the words of size {}",
                    sv.label(w),
                    v.max_size()
                )));
            };
            val.add_term(
                Term {
                    hbar: t.hbar,
                    ring: 0,
                    basis: SymWord(vec![j]),
                },
                c.clone(),
            );
        }
        codiff.add(&sv, w, &val)?;
    }
    let op = codiff.to_operator(&sv);
    for w in words.iter().filter(|w| w.len() <= max_len) {
        let dd = op.apply(&op.on_basis(w));
        if !dd.is_zero() {
            return Ok(Verdict::fail(format!(
                "D²({}) = {}",
                sv.label(w),
                Ambient::new(sv.as_ref(), &ground).format(&dd)
            )));
        }
    }
    // l_n(v, ab) = l_n(v, a) b + (-1)^{p|a|} a l_n(v, b) + l_{n+1}(v, a, b)
    let nonunit: Vec<&A::Basis> = basis.iter().filter(|b| !alg.is_unit(b)).collect();
    for w in words.iter().filter(|w| w.len() < max_arity) {
        let vs: Vec<Elem<A::Basis>> =
            w.factors().iter().map(|&i| Elem::basis(basis[i].clone())).collect();
        let used = word_size(w);
        let p = 1 + w.factors().iter().map(|&i| alg.degree(&basis[i])).sum::<i64>();
        for a in &nonunit {
            for b in &nonunit {
                if used + alg.size(a) + alg.size(b) > v.max_size() {
                    continue;
                }
                let (ea, eb) = (Elem::basis((*a).clone()), Elem::basis((*b).clone()));
                let with = |x: &Elem<A::Basis>| {
                    let mut args = vs.clone();
                    args.push(x.clone());
                    v.derived_bracket_raw(&ground, &args)
                };
                let lhs = with(&amb.mul(&ea, &eb));
                let mut args3 = vs.clone();
                args3.push(ea.clone());
                args3.push(eb.clone());
                let rhs = amb
                    .mul(&with(&ea), &eb)
                    .add(&amb.mul(&ea, &with(&eb)).scale(&sign_pow(p * alg.degree(a))))
                    .add(&v.derived_bracket_raw(&ground, &args3));
                if lhs != rhs {
                    return Ok(Verdict::fail(format!(
                        "derivation defect of l_{} on ({}; {}, {})",
                        vs.len() + 1,
                        sv.label(w),
                        alg.label(a),
                        alg.label(b)
                    )));
                }
            }
        }
    }
    Ok(Verdict::pass())
}

/// Result of the order-by-order QME solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QmeOutcome<B: Ord> {
    Solved(Elem<B>),
    Obstructed(QmeObstruction<B>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmeObstruction<B: Ord> {
    /// m-adic order at which lifting failed.
    pub order: usize,
    pub ring_element: usize,
    /// The lift through order `order - 1`.
    pub partial: Elem<B>,
    /// `Σ {S^n}/n!` of the partial lift.
    pub residual: Elem<B>,
}

/// Lifts a first-order seed `S_1` with `d̂ S_1 = 0` along the m-adic filtration.
/// At each order `k` and ring basis element of order `k` the linear equation
/// `d̂ S_k = -(residual)_k` is solved jointly in all `ħ`-powers below the
/// cutoff, over basis elements of size at most `max_size`; free variables are
/// set to zero. Every solution is re-validated with `qme_exp_check`.
pub fn qme_solve_perturbative<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    seed: &Elem<A::Basis>,
) -> Result<QmeOutcome<A::Basis>>
where
    A::Basis: 'static,
{
    v.validate_qme_element(ring, seed)?;
    if let Some((t, _)) = seed.terms().find(|(t, _)| ring.order(t.ring) != 1) {
        return Err(Error::Precondition(format!(
            "seed has a component on {} outside m/m²",
            ring.label(t.ring)
        )));
    }
    let lin = v.dhat.apply(seed);
    if !lin.is_zero() {
        return Err(Error::Precondition(format!(
            "seed is not d̂-closed: d̂ S_1 = {}",
            v.ambient(ring).format(&lin)
        )));
    }
    let alg = v.algebra();
    let unknowns: Vec<(i32, A::Basis)> = (0..v.hbar_cutoff() as i32)
        .flat_map(|j| {
            v.basis()
                .into_iter()
                .filter(move |b| alg.degree(b) + 2 * j as i64 == 2)
                .map(move |b| (j, b))
        })
        .collect();
    let images: Vec<Elem<A::Basis>> = unknowns
        .iter()
        .map(|(j, b)| v.dhat.on_basis(b).hbar_shift(*j))
        .collect();
    let mut s = seed.clone();
    for k in 2..ring.nilpotency() {
        let residual = v.bvinfty_qme_residual(ring, &s)?;
        for r in (0..ring.dim()).filter(|&r| ring.order(r) == k) {
            let target = residual.ring_coefficient(r);
            if target.is_zero() {
                continue;
            }
            let mut rows: BTreeMap<(i32, A::Basis), usize> = BTreeMap::new();
            for e in images.iter().chain(std::iter::once(&target)) {
                for (t, _) in e.terms() {
                    let n = rows.len();
                    rows.entry((t.hbar, t.basis.clone())).or_insert(n);
                }
            }
            let column = |e: &Elem<A::Basis>| {
                let mut c = vec![Q::zero(); rows.len()];
                for (t, x) in e.terms() {
                    c[rows[&(t.hbar, t.basis.clone())]] = x.clone();
                }
                c
            };
            let cols: Vec<Vec<Q>> = images.iter().map(column).collect();
            let rhs: Vec<Q> = column(&target).into_iter().map(|c| -c).collect();
            let Some(x) = solve_columns(&cols, &rhs) else {
                return Ok(QmeOutcome::Obstructed(QmeObstruction {
                    order: k,
                    ring_element: r,
                    partial: s,
                    residual,
                }));
            };
            for ((j, b), c) in unknowns.iter().zip(x) {
                s.add_term(
                    Term {
                        hbar: *j,
                        ring: r,
                        basis: b.clone(),
                    },
                    c,
                );
            }
        }
    }
    let residual = v.bvinfty_qme_residual(ring, &s)?;
    if !residual.is_zero() {
        return Err(Error::axiom(
            "QME lift",
            format!("residual {}", v.ambient(ring).format(&residual)),
        ));
    }
    let check = v.qme_exp_check(ring, &s)?;
    if let Some(w) = check.witness {
        return Err(Error::axiom("QME lift", w));
    }
    Ok(QmeOutcome::Solved(s))
}
