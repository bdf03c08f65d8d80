//! BV∞-morphisms `φ: V -> V'[[ħ]]`, their composition through
//! `exp(φ/ħ)`, the embedding of local rings as BV∞-algebras `(R*, 0)`, and
//! the two representability statements for the quantum master equation.
use std::sync::Arc;

use crate::algebra::{Ambient, Coalgebra, Elem, GradedAlgebra};
use crate::bv::BvInfty;
use crate::conv::{apply_map, element_to_dual_map, ConvMap, Convolution, ConvolutionAlgebra};
use crate::error::{Error, Result};
use crate::linfty::LInfty;
use crate::report::Verdict;
use crate::ring::{ArtinRing, DualRing, RingMap};
use crate::scalar::Q;
use crate::sym::{SymAlgebra, SymWord};

/// Which order bound condition (3) imposes on `φ_n`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OrderConvention {
    /// `φ_n` has order `≤ n + 1`: `φ_n(m^{n+2}) = 0`.
    #[default]
    Generalized,
    /// `φ_n` has order `≤ n`: `φ_n(m^{n+1}) = 0`, the stricter notion under
    /// which `φ/ħ` is a morphism in the sense of Cieliebak–Latschev.
    Strict,
}

/// A degree-two map `φ = Σ ħ^n φ_n: V -> V'[[ħ]]` between BV∞-algebras,
/// tabulated on the basis of `V` up to its size bound.
pub struct BvMorphism<A: GradedAlgebra, B: GradedAlgebra> {
    source: BvInfty<A>,
    target: BvInfty<B>,
    phi: ConvMap<A::Basis, B::Basis>,
    hbar_cutoff: usize,
}

impl<A: GradedAlgebra, B: GradedAlgebra> Clone for BvMorphism<A, B> {
    fn clone(&self) -> Self {
        Self {
            source: self.source.clone(),
            target: self.target.clone(),
            phi: self.phi.clone(),
            hbar_cutoff: self.hbar_cutoff,
        }
    }
}

/// One verdict per condition of the definition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BvMorphismReport {
    /// `φ(1) = 0`.
    pub unit: Verdict,
    /// `d̂' ∘ exp(φ/ħ) = exp(φ/ħ) ∘ d̂`.
    pub intertwining: Verdict,
    /// `φ_n` kills the appropriate power of the augmentation ideal.
    pub order: Verdict,
}

impl BvMorphismReport {
    pub fn holds(&self) -> bool {
        self.unit.holds && self.intertwining.holds && self.order.holds
    }

    pub fn entries(&self) -> [(&'static str, &Verdict); 3] {
        [
            ("phi(1) = 0", &self.unit),
            ("exp intertwines d-hat", &self.intertwining),
            ("order condition", &self.order),
        ]
    }
}

impl<A: GradedAlgebra, B: GradedAlgebra> BvMorphism<A, B>
where
    A::Basis: 'static,
    B::Basis: 'static,
{
    /// Checks that `φ` has total degree two, `ħ`-powers in `[0, K)`, and is
    /// tabulated only on basis elements within the source size bound.
    pub fn new(
        source: BvInfty<A>,
        target: BvInfty<B>,
        phi: ConvMap<A::Basis, B::Basis>,
        hbar_cutoff: usize,
    ) -> Result<Self> {
        let (sa, ta) = (source.algebra().clone(), target.algebra().clone());
        for (w, v) in phi.iter() {
            if sa.size(w) > source.max_size() {
                return Err(Error::Truncation(format!(
                    "φ is given on {}, beyond size {}",
                    sa.label(w),
                    source.max_size()
                )));
            }
            for (t, _) in v.terms() {
                let deg = ta.degree(&t.basis) + 2 * t.hbar as i64 - sa.degree(w);
                if deg != 2 {
                    return Err(Error::DegreeMismatch(format!(
                        "φ({}) ∋ ħ^{} {} has degree {deg}, expected 2",
                        sa.label(w),
                        t.hbar,
                        ta.label(&t.basis)
                    )));
                }
                if t.hbar < 0 || t.hbar as usize >= hbar_cutoff {
                    return Err(Error::Truncation(format!(
                        "φ({}) has ħ^{} outside [0, {hbar_cutoff})",
                        sa.label(w),
                        t.hbar
                    )));
                }
                if t.ring != 0 {
                    return Err(Error::Precondition("φ must have ground coefficients".into()));
                }
            }
        }
        Ok(Self {
            source,
            target,
            phi,
            hbar_cutoff,
        })
    }

    pub fn source(&self) -> &BvInfty<A> {
        &self.source
    }

    pub fn target(&self) -> &BvInfty<B> {
        &self.target
    }

    pub fn map(&self) -> &ConvMap<A::Basis, B::Basis> {
        &self.phi
    }

    pub fn hbar_cutoff(&self) -> usize {
        self.hbar_cutoff
    }

    /// `φ_n`, with the `ħ^n` factor removed.
    pub fn component(&self, n: usize) -> ConvMap<A::Basis, B::Basis> {
        self.phi.hbar_coefficient(n as i32)
    }

    pub fn max_component(&self) -> usize {
        self.phi
            .iter()
            .filter_map(|(_, v)| v.max_hbar())
            .max()
            .unwrap_or(0)
            .max(0) as usize
    }
}

impl<A: Coalgebra, B: GradedAlgebra> BvMorphism<A, B>
where
    A::Basis: 'static,
    B::Basis: 'static,
{
    /// `exp(φ/ħ)` in the convolution algebra `Hom(V, V'((ħ)))`.
    pub fn exp_over_hbar(&self) -> Result<ConvMap<A::Basis, B::Basis>> {
        let ground = ArtinRing::ground();
        let conv = Convolution::new(
            self.source.algebra().as_ref(),
            self.target.ambient(&ground),
            self.source.max_size(),
        );
        conv.exp(&self.phi.hbar_shift(-1))
    }
}

/// `v` maps every product of `k` elements of the augmentation ideal, within
/// the size bound, to zero.
fn kills_ideal_power<A: GradedAlgebra, O: Clone + Ord>(
    alg: &A,
    max_size: usize,
    k: usize,
    v: &dyn Fn(&Elem<A::Basis>) -> Elem<O>,
    describe: &dyn Fn(&Elem<O>) -> String,
) -> Option<String>
where
    A::Basis: 'static,
{
    let ground = ArtinRing::ground();
    let amb = Ambient::new(alg, &ground);
    let gens: Vec<A::Basis> = alg
        .basis_up_to(max_size)
        .into_iter()
        .filter(|b| !alg.is_unit(b))
        .collect();
    #[allow(clippy::too_many_arguments)]
    fn rec<A: GradedAlgebra, O: Clone + Ord>(
        amb: &Ambient<'_, A>,
        alg: &A,
        gens: &[A::Basis],
        start: usize,
        left: usize,
        budget: usize,
        acc: &Elem<A::Basis>,
        names: &mut Vec<String>,
        v: &dyn Fn(&Elem<A::Basis>) -> Elem<O>,
        describe: &dyn Fn(&Elem<O>) -> String,
    ) -> Option<String>
    where
        A::Basis: 'static,
    {
        if acc.is_zero() {
            return None;
        }
        if left == 0 {
            let out = v(acc);
            return (!out.is_zero()).then(|| format!("on {}: {}", names.join("·"), describe(&out)));
        }
        for i in start..gens.len() {
            let s = alg.size(&gens[i]);
            if s > budget {
                continue;
            }
            names.push(alg.label(&gens[i]));
            let next = amb.mul(acc, &Elem::basis(gens[i].clone()));
            let r = rec(amb, alg, gens, i, left - 1, budget - s, &next, names, v, describe);
            names.pop();
            if r.is_some() {
                return r;
            }
        }
        None
    }
    rec(
        &amb,
        alg,
        &gens,
        0,
        k,
        max_size,
        &amb.one(),
        &mut Vec::new(),
        v,
        describe,
    )
}

/// Checks the three defining conditions of a BV∞-morphism on the source
/// basis up to its size bound. The intertwining equation is compared only on
/// basis elements whose image under `d̂` stays within that bound.
pub fn check_bv_morphism<A: Coalgebra, B: GradedAlgebra>(
    phi: &BvMorphism<A, B>,
    convention: OrderConvention,
) -> BvMorphismReport
where
    A::Basis: 'static,
    B::Basis: 'static,
{
    let src = phi.source.algebra().clone();
    let ground = ArtinRing::ground();
    let tamb = phi.target.ambient(&ground);
    let n_max = phi.source.max_size();

    let u = phi.phi.get(&src.unit());
    let unit = Verdict::from_bool(u.is_zero(), || format!("φ(1) = {}", tamb.format(&u)));

    let intertwining = match phi.exp_over_hbar() {
        Err(e) => Verdict::fail(e.to_string()),
        Ok(e) => {
            let conv = Convolution::new(src.as_ref(), tamb.clone(), n_max);
            let lhs = conv.post_compose(phi.target.dhat(), &e);
            let mut verdict = Verdict::pass();
            for w in conv.domain() {
                let dw = phi.source.dhat().on_basis(w);
                if dw.terms().any(|(t, _)| src.size(&t.basis) > n_max) {
                    continue;
                }
                let l = lhs.get(w);
                let r = apply_map(&e, &dw);
                if l != r {
                    verdict = Verdict::fail(format!(
                        "on {}: d̂'∘exp(φ/ħ) = {}, exp(φ/ħ)∘d̂ = {}",
                        src.label(w),
                        tamb.format(&l),
                        tamb.format(&r)
                    ));
                    break;
                }
            }
            verdict
        }
    };

    let offset = match convention {
        OrderConvention::Generalized => 2,
        OrderConvention::Strict => 1,
    };
    let mut order = Verdict::pass();
    for n in 0..=phi.max_component() {
        let comp = phi.component(n);
        if comp.is_zero() {
            continue;
        }
        let f = |x: &Elem<A::Basis>| apply_map(&comp, x);
        let describe = |x: &Elem<B::Basis>| tamb.format(x);
        if let Some(w) = kills_ideal_power(src.as_ref(), n_max, n + offset, &f, &describe) {
            order = Verdict::fail(format!("φ_{n} does not vanish on m^{}: {w}", n + offset));
            break;
        }
    }
    BvMorphismReport {
        unit,
        intertwining,
        order,
    }
}

/// `ħ log` of the identity: the unit for composition.
pub fn identity_morphism<A: Coalgebra>(v: &BvInfty<A>) -> Result<BvMorphism<A, A>>
where
    A::Basis: 'static,
{
    let ground = ArtinRing::ground();
    let conv = Convolution::new(v.algebra().as_ref(), v.ambient(&ground), v.max_size());
    let id = conv.table_from_fn(|w| Elem::basis(w.clone()));
    let phi = conv.log(&id)?.hbar_shift(1);
    BvMorphism::new(v.clone(), v.clone(), phi, v.hbar_cutoff().max(2))
}

/// `ħ log(exp(φ/ħ) ∘ exp(ψ/ħ))` for `ψ: U -> V` and `φ: V -> W`. Fails if a
/// negative power of `ħ` survives, or if `exp(ψ/ħ)` leaves the tabulated
/// part of `V`.
pub fn compose_bv_morphisms<U: Coalgebra, V: Coalgebra, W: GradedAlgebra>(
    phi: &BvMorphism<V, W>,
    psi: &BvMorphism<U, V>,
) -> Result<BvMorphism<U, W>>
where
    U::Basis: 'static,
    V::Basis: 'static,
    W::Basis: 'static,
{
    let ground = ArtinRing::ground();
    let e_phi = phi.exp_over_hbar()?;
    let e_psi = psi.exp_over_hbar()?;
    let mid = phi.source.algebra().clone();
    let n_mid = phi.source.max_size();
    let conv = Convolution::new(
        psi.source.algebra().as_ref(),
        phi.target.ambient(&ground),
        psi.source.max_size(),
    );
    let mut composite = ConvMap::zero();
    for w in conv.domain() {
        let x = e_psi.get(w);
        if let Some((t, _)) = x.terms().find(|(t, _)| mid.size(&t.basis) > n_mid) {
            return Err(Error::Truncation(format!(
                "exp(ψ/ħ)({}) reaches {}, beyond size {n_mid}",
                psi.source.algebra().label(w),
                mid.label(&t.basis)
            )));
        }
        composite.set(w.clone(), apply_map(&e_phi, &x));
    }
    let log = conv.log(&composite)?;
    if let Some(h) = log.min_hbar() {
        if h < -1 {
            return Err(Error::NegativeHbar(format!(
                "log of the composite has ħ^{h}; the inputs are not BV∞-morphisms"
            )));
        }
    }
    let pole = log.hbar_coefficient(-1);
    if let Some((w, v)) = pole.iter().find(|(_, v)| !v.is_zero()) {
        return Err(Error::NegativeHbar(format!(
            "ħ⁻¹ coefficient of the log on {} is {}",
            psi.source.algebra().label(w),
            phi.target.ambient(&ground).format(v)
        )));
    }
    let out = log.hbar_shift(1);
    let top = out
        .iter()
        .filter_map(|(_, v)| v.max_hbar())
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let cutoff = phi.hbar_cutoff.max(psi.hbar_cutoff).max(top + 1);
    BvMorphism::new(psi.source.clone(), phi.target.clone(), out, cutoff)
}

/// The BV∞-algebra `(R*, 0)`: the dual coalgebra of `R`, multiplication zero
/// on `m*`, and `d̂ = 0`.
pub fn clalg_embed(ring: &ArtinRing) -> BvInfty<DualRing> {
    BvInfty::new(
        Arc::new(DualRing::new(ring.clone())),
        vec![],
        ring.nilpotency().max(1),
        2,
    )
    .expect("no operators to validate")
}

/// Checks that `R*` is what the embedding needs: `(m*)² = 0`, the coproduct
/// is counital and coassociative, and it is the transpose of the
/// multiplication of `R`.
pub fn check_dual_ring(ring: &ArtinRing) -> Verdict {
    let dual = DualRing::new(ring.clone());
    let n = ring.dim();
    for i in 1..n {
        for j in 1..n {
            if !dual.multiply(&i, &j).is_empty() {
                return Verdict::fail(format!("{}·{} ≠ 0", dual.label(&i), dual.label(&j)));
            }
        }
    }
    for k in 0..n {
        let cop = dual.coproduct(&k);
        for i in 0..n {
            for j in 0..n {
                let from_cop: Q = cop
                    .iter()
                    .filter(|(a, b, _)| *a == i && *b == j)
                    .map(|(_, _, c)| c.clone())
                    .sum();
                let from_mul: Q = ring
                    .mul(i, j)
                    .iter()
                    .filter(|(m, _)| *m == k)
                    .map(|(_, c)| c.clone())
                    .sum();
                if from_cop != from_mul {
                    return Verdict::fail(format!(
                        "coproduct of {} disagrees with r_{i}·r_{j}",
                        dual.label(&k)
                    ));
                }
            }
        }
        let counit: Q = cop
            .iter()
            .filter(|(a, b, _)| *a == 0 && *b == k)
            .map(|(_, _, c)| c.clone())
            .sum();
        if counit != Q::from_integer(1.into()) {
            return Verdict::fail(format!("counit fails on {}", dual.label(&k)));
        }
        // coassociativity is associativity of R read backwards
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut left = Q::from_integer(0.into());
                    let mut right = Q::from_integer(0.into());
                    for (m, x) in ring.mul(a, b) {
                        for (p, y) in ring.mul(*m, c) {
                            if *p == k {
                                left += x * y;
                            }
                        }
                    }
                    for (m, x) in ring.mul(b, c) {
                        for (p, y) in ring.mul(a, *m) {
                            if *p == k {
                                right += x * y;
                            }
                        }
                    }
                    if left != right {
                        return Verdict::fail(format!(
                            "coassociativity fails on {}",
                            dual.label(&k)
                        ));
                    }
                }
            }
        }
    }
    Verdict::pass()
}

/// The dual `f*: S* -> R*` of a local homomorphism `f: R -> S`.
pub fn dual_ring_map(f: &RingMap, source: &ArtinRing, target: &ArtinRing) -> ConvMap<usize, usize> {
    let mut out = ConvMap::zero();
    for j in 0..target.dim() {
        out.set(j, Elem::zero());
    }
    for i in 0..source.dim() {
        for (j, c) in &f.images[i] {
            out.add_at(j, &Elem::term(i, 0, 0, c.clone()));
        }
    }
    out
}

/// `φ = ħ(f* - e): S* -> R*` for a local homomorphism `f: R -> S`.
pub fn ring_map_to_bv_morphism(
    f: &RingMap,
    source: &ArtinRing,
    target: &ArtinRing,
) -> Result<BvMorphism<DualRing, DualRing>> {
    RingMap::new(source, target, f.images.clone())?;
    let r_star = clalg_embed(source);
    let s_star = clalg_embed(target);
    let mut phi = dual_ring_map(f, source, target);
    phi.add_at(&0, &Elem::term(0, 0, 0, Q::from_integer((-1).into())));
    BvMorphism::new(s_star, r_star, phi.hbar_shift(1), 2)
}

/// Both sides of the first representability theorem for one `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremFirstReport {
    /// `d̂ e^{S/ħ} = 0`.
    pub qme: Verdict,
    /// `S: (R*, 0) -> (V, d̂)` is a BV∞-morphism.
    pub morphism: BvMorphismReport,
}

impl TheoremFirstReport {
    pub fn bijection_holds(&self) -> bool {
        self.qme.holds == self.morphism.holds()
    }
}

/// Reads `S ∈ V[[ħ]]² ⊗ m` as a map `R* -> V[[ħ]]` and compares the QME with
/// the morphism conditions.
pub fn theorem_first_bijection_check<A: GradedAlgebra>(
    v: &BvInfty<A>,
    ring: &ArtinRing,
    s: &Elem<A::Basis>,
) -> Result<TheoremFirstReport>
where
    A::Basis: 'static,
{
    let qme = v.qme_exp_check(ring, s)?;
    let map = element_to_dual_map(s);
    let k = s.max_hbar().unwrap_or(0).max(0) as usize + 1;
    let phi = BvMorphism::new(clalg_embed(ring), v.clone(), map, k.max(v.hbar_cutoff()))?;
    Ok(TheoremFirstReport {
        qme,
        morphism: check_bv_morphism(&phi, OrderConvention::Generalized),
    })
}

/// The functor `QM_V` on local rings, evaluated at `R`: membership and the
/// action of ring maps.
pub struct QmFunctorRing<'a, A: GradedAlgebra> {
    v: &'a BvInfty<A>,
}

pub fn qm_functor_ring<A: GradedAlgebra>(v: &BvInfty<A>) -> QmFunctorRing<'_, A> {
    QmFunctorRing { v }
}

impl<A: GradedAlgebra> QmFunctorRing<'_, A>
where
    A::Basis: 'static,
{
    /// `S ∈ QM_V(R)`.
    pub fn contains(&self, ring: &ArtinRing, s: &Elem<A::Basis>) -> Result<bool> {
        Ok(self.v.qme_exp_check(ring, s)?.holds)
    }

    /// `QM_V(f): QM_V(R) -> QM_V(R')`, applying `f` to coefficients.
    pub fn push_forward(&self, f: &RingMap, s: &Elem<A::Basis>) -> Elem<A::Basis> {
        let mut out = Elem::zero();
        for (t, c) in s.terms() {
            for (j, d) in &f.images[t.ring] {
                out.add_assign(&Elem::term(t.basis.clone(), t.hbar, *j, c * d));
            }
        }
        out
    }
}

/// Validates the shape of `S = Σ ħ^n S_n` in `hom(S(g[-1]), V)`: `S(1) = 0`,
/// `S_n` of degree `2 - 2n`, and `S_n` zero on words longer than `n + 1`.
pub fn validate_linfty_qm_element<B: GradedAlgebra>(
    g_alg: &SymAlgebra,
    v: &BvInfty<B>,
    s: &ConvMap<SymWord, B::Basis>,
) -> Result<()>
where
    B::Basis: 'static,
{
    for (w, val) in s.iter() {
        if val.is_zero() {
            continue;
        }
        if w.is_empty() {
            return Err(Error::Precondition("S must vanish on 1".into()));
        }
        for (t, _) in val.terms() {
            if t.hbar < 0 {
                return Err(Error::NegativeHbar(format!("S on {}", g_alg.label(w))));
            }
            let deg = v.algebra().degree(&t.basis) + 2 * t.hbar as i64 - g_alg.word_degree(w);
            if deg != 2 {
                return Err(Error::DegreeMismatch(format!(
                    "S_{} on {} has degree {}, expected {}",
                    t.hbar,
                    g_alg.label(w),
                    deg - 2 * t.hbar as i64,
                    2 - 2 * t.hbar as i64
                )));
            }
            if w.len() > t.hbar as usize + 1 {
                return Err(Error::Precondition(format!(
                    "S_{} is nonzero on the word {} of length {}",
                    t.hbar,
                    g_alg.label(w),
                    w.len()
                )));
            }
            if t.ring != 0 {
                return Err(Error::Precondition("S must have ground coefficients".into()));
            }
        }
    }
    Ok(())
}

/// `D̂ e^{S/ħ}` in the convolution BV∞-algebra `hom(S(g[-1]), V)`, where
/// `D̂(Φ) = d̂_V ∘ Φ - (-1)^{|Φ|} Φ ∘ d̂_g` and `d̂_g = D_1 + ħD_2 + ⋯`.
pub fn qm_functor_linfty<B: GradedAlgebra>(
    v: &BvInfty<B>,
    l: &LInfty,
    s: &ConvMap<SymWord, B::Basis>,
    max_len: usize,
) -> Result<ConvMap<SymWord, B::Basis>>
where
    B::Basis: 'static,
{
    let ce = BvInfty::from_linfty(l, max_len, max_len + 1)?;
    validate_linfty_qm_element(ce.algebra(), v, s)?;
    let hom = ConvolutionAlgebra::new(ce.algebra().clone(), v.algebra().clone(), max_len);
    let ground = ArtinRing::ground();
    let amb = Ambient::new(&hom, &ground);
    let e = amb.exp(&hom.from_map(s).hbar_shift(-1))?;
    let post = hom.post_operator(v.dhat().clone());
    let pre = hom.pre_operator(ce.dhat());
    // e^{S/ħ} has total degree zero, so the sign in D̂ is -1.
    let out = post.apply(&e).sub(&pre.apply(&e));
    Ok(hom.to_map(&out))
}

/// Both sides of the second representability theorem for one `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremSecondReport {
    /// `D̂ e^{S/ħ} = 0` in `hom(S(g[-1]), V)`.
    pub qme: Verdict,
    /// `S: (S(g[-1]), d̂_g) -> (V, d̂_V)` is a BV∞-morphism.
    pub morphism: BvMorphismReport,
}

impl TheoremSecondReport {
    pub fn bijection_holds(&self) -> bool {
        self.qme.holds == self.morphism.holds()
    }
}

pub fn theorem_second_bijection_check<B: GradedAlgebra>(
    v: &BvInfty<B>,
    l: &LInfty,
    s: &ConvMap<SymWord, B::Basis>,
    max_len: usize,
) -> Result<TheoremSecondReport>
where
    B::Basis: 'static,
{
    let residual = qm_functor_linfty(v, l, s, max_len)?;
    let ground = ArtinRing::ground();
    let tamb = v.ambient(&ground);
    let ce = BvInfty::from_linfty(l, max_len, max_len + 1)?;
    let qme = match residual.iter().find(|(_, x)| !x.is_zero()) {
        None => Verdict::pass(),
        Some((w, x)) => Verdict::fail(format!(
            "D̂ e^{{S/ħ}} on {} = {}",
            ce.algebra().label(w),
            tamb.format(x)
        )),
    };
    let top = s
        .iter()
        .filter_map(|(_, x)| x.max_hbar())
        .max()
        .unwrap_or(0)
        .max(0) as usize;
    let phi = BvMorphism::new(ce, v.clone(), s.clone(), top + 1)?;
    Ok(TheoremSecondReport {
        qme,
        morphism: check_bv_morphism(&phi, OrderConvention::Generalized),
    })
}

/// An L∞-morphism `g -> h` given by its components `F_n: S^n(g[1]) -> h[1]`,
/// tabulated on words of `S^{>0}(g[1])` with values on generators of `h[1]`.
pub type LInftyMorphism = ConvMap<SymWord, SymWord>;

/// `D_h ∘ exp(F) = exp(F) ∘ D_g` on `S(g[1])` up to word length `max_len`.
pub fn linfty_morphism_check(g: &LInfty, h: &LInfty, f: &LInftyMorphism, max_len: usize) -> Result<Verdict> {
    let ground = ArtinRing::ground();
    let (ga, ha) = (g.shifted_algebra(), h.shifted_algebra());
    let conv = Convolution::new(ga.as_ref(), Ambient::new(ha.as_ref(), &ground), max_len);
    let big_f = conv.exp(f)?;
    let dg = g.codifferential().to_operator(ga);
    let dh = h.codifferential().to_operator(ha);
    let lhs = conv.post_compose(&dh, &big_f);
    let rhs = conv.pre_compose(&big_f, &dg);
    Ok(match lhs.first_difference(&rhs) {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(format!(
            "on {}: D_h∘F = {}, F∘D_g = {}",
            ga.label(&w),
            Ambient::new(ha.as_ref(), &ground).format(&lhs.get(&w)),
            Ambient::new(ha.as_ref(), &ground).format(&rhs.get(&w))
        )),
    })
}

/// `φ = Σ_{n≥1} ħ^n F_n` as a map `S(g[-1]) -> S(h[-1])[[ħ]]` between the
/// Chevalley–Eilenberg BV∞-algebras.
pub fn linfty_morphism_to_bvinfty(
    g: &LInfty,
    h: &LInfty,
    f: &LInftyMorphism,
    max_len: usize,
) -> Result<BvMorphism<SymAlgebra, SymAlgebra>> {
    let src = BvInfty::from_linfty(g, max_len, max_len + 1)?;
    let tgt = BvInfty::from_linfty(h, max_len, max_len + 1)?;
    let mut phi = ConvMap::zero();
    for (w, v) in f.iter() {
        if w.is_empty() {
            if v.is_zero() {
                continue;
            }
            return Err(Error::Precondition("F must vanish on 1".into()));
        }
        if w.len() > max_len {
            continue;
        }
        if v.terms().any(|(t, _)| t.basis.len() != 1 || t.hbar != 0) {
            return Err(Error::Precondition(format!(
                "F on {} must land in h[1]",
                g.shifted_algebra().label(w)
            )));
        }
        phi.set(w.clone(), v.hbar_shift(w.len() as i32));
    }
    BvMorphism::new(src, tgt, phi, max_len + 1)
}

/// The identity `F_1 = id` of an L∞-algebra.
pub fn linfty_identity(g: &LInfty) -> LInftyMorphism {
    let mut f = ConvMap::zero();
    for i in 0..g.space().dim() {
        f.set(SymWord(vec![i]), Elem::basis(SymWord(vec![i])));
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graded::GradedVectorSpace;
    use crate::linfty::DgLie;
    use crate::scalar::q;

    fn same_on<A: GradedAlgebra, B: Clone + Ord>(
        alg: &A,
        n: usize,
        a: &ConvMap<A::Basis, B>,
        b: &ConvMap<A::Basis, B>,
    ) -> bool {
        alg.basis_up_to(n).iter().all(|w| a.get(w) == b.get(w))
    }

    fn ce(g: &DgLie, n: usize) -> (LInfty, BvInfty<SymAlgebra>) {
        let l = LInfty::from_dg_lie(g);
        let v = BvInfty::from_linfty(&l, n, n + 1).unwrap();
        (l, v)
    }

    fn gen(l: &LInfty, s: &str) -> SymWord {
        SymWord(vec![l.space().index_of(s).unwrap()])
    }

    #[test]
    fn dual_rings_embed() {
        for r in [
            ArtinRing::ground(),
            ArtinRing::truncated_polynomial(4),
            ArtinRing::square_zero(["s", "t"]),
        ] {
            assert!(check_dual_ring(&r).holds, "{}", r.describe());
            assert!(clalg_embed(&r).certify().holds());
        }
    }

    #[test]
    fn ring_map_gives_morphism() {
        let (r3, r2) = (ArtinRing::truncated_polynomial(3), ArtinRing::truncated_polynomial(2));
        let f = RingMap::by_label(&r3, &r2).unwrap();
        let phi = ring_map_to_bv_morphism(&f, &r3, &r2).unwrap();
        let rep = check_bv_morphism(&phi, OrderConvention::Strict);
        assert!(rep.holds(), "{rep:?}");
        // exp(φ/ħ) = exp(f* - e) = f*, since (m*)² = 0
        let e = phi.exp_over_hbar().unwrap();
        let dual = DualRing::new(r2.clone());
        assert!(same_on(&dual, 3, &e, &dual_ring_map(&f, &r3, &r2)));
        assert_eq!(phi.max_component(), 1);
    }

    #[test]
    fn ring_functoriality() {
        let (r4, r3, r2) = (
            ArtinRing::truncated_polynomial(4),
            ArtinRing::truncated_polynomial(3),
            ArtinRing::truncated_polynomial(2),
        );
        let f = RingMap::by_label(&r4, &r3).unwrap();
        let g = RingMap::by_label(&r3, &r2).unwrap();
        let pf = ring_map_to_bv_morphism(&f, &r4, &r3).unwrap();
        let pg = ring_map_to_bv_morphism(&g, &r3, &r2).unwrap();
        let composite = compose_bv_morphisms(&pf, &pg).unwrap();
        let direct = ring_map_to_bv_morphism(&f.then(&g), &r4, &r2).unwrap();
        let dual = DualRing::new(r2.clone());
        assert!(same_on(&dual, 4, composite.map(), direct.map()));

        // a map into k[s,t]/(s², st, t²) that is not by label
        let r = ArtinRing::square_zero(["s", "t"]);
        let h = RingMap::new(&r3, &r, vec![vec![(0, q(1))], vec![(1, q(2)), (2, q(-1))], vec![]]).unwrap();
        let ph = ring_map_to_bv_morphism(&h, &r3, &r).unwrap();
        assert!(check_bv_morphism(&ph, OrderConvention::Strict).holds());
        let two = compose_bv_morphisms(&pf, &ph).unwrap();
        let direct = ring_map_to_bv_morphism(&f.then(&h), &r4, &r).unwrap();
        assert!(same_on(&DualRing::new(r), 4, two.map(), direct.map()));
    }

    #[test]
    fn identity_is_a_unit() {
        let (_, v) = ce(&fixtures::heis3(), 3);
        let id = identity_morphism(&v).unwrap();
        assert!(check_bv_morphism(&id, OrderConvention::Strict).holds());
        // ħ log id is ħ times the projection onto generators
        let alg = v.algebra().clone();
        for w in alg.basis_up_to(3) {
            let expect = if w.len() == 1 {
                Elem::term(w.clone(), 1, 0, q(1))
            } else {
                Elem::zero()
            };
            assert_eq!(id.map().get(&w), expect, "{}", alg.label(&w));
        }
        let (r3, r2) = (ArtinRing::truncated_polynomial(3), ArtinRing::truncated_polynomial(2));
        let p = ring_map_to_bv_morphism(&RingMap::by_label(&r3, &r2).unwrap(), &r3, &r2).unwrap();
        let dual = DualRing::new(r2.clone());
        let left = compose_bv_morphisms(&identity_morphism(p.target()).unwrap(), &p).unwrap();
        let right = compose_bv_morphisms(&p, &identity_morphism(p.source()).unwrap()).unwrap();
        assert!(same_on(&dual, 3, left.map(), p.map()));
        assert!(same_on(&dual, 3, right.map(), p.map()));
    }

    #[test]
    fn order_condition_separates_conventions() {
        let g = DgLie::from_labels(GradedVectorSpace::new([("c", -1)]).unwrap(), &[], &[], true).unwrap();
        let (_, v) = ce(&g, 3);
        let c2 = SymWord(vec![0, 0]);
        let c3 = SymWord(vec![0, 0, 0]);
        let mut phi = ConvMap::zero();
        phi.set(c2.clone(), Elem::term(c2.clone(), 1, 0, q(1)));
        let m = BvMorphism::new(v.clone(), v.clone(), phi, 3).unwrap();
        let gen = check_bv_morphism(&m, OrderConvention::Generalized);
        assert!(gen.holds(), "{gen:?}");
        let strict = check_bv_morphism(&m, OrderConvention::Strict);
        assert!(strict.unit.holds && strict.intertwining.holds);
        assert!(strict.order.witness.unwrap().contains("φ_1"));

        let mut phi = ConvMap::zero();
        phi.set(c3.clone(), Elem::term(c3, 1, 0, q(1)));
        let m = BvMorphism::new(v.clone(), v.clone(), phi, 3).unwrap();
        assert!(!check_bv_morphism(&m, OrderConvention::Generalized).order.holds);

        let mut bad = ConvMap::zero();
        bad.set(c2.clone(), Elem::term(c2.clone(), 0, 0, q(1)));
        assert!(matches!(
            BvMorphism::new(v.clone(), v.clone(), bad, 3),
            Err(Error::DegreeMismatch(_))
        ));
        let mut unit = ConvMap::zero();
        unit.set(SymWord::empty(), Elem::term(SymWord::empty(), 1, 0, q(1)));
        let m = BvMorphism::new(v.clone(), v, unit, 3).unwrap();
        assert!(!check_bv_morphism(&m, OrderConvention::Generalized).unit.holds);
    }

    #[test]
    fn theorem_first_on_ce() {
        let (l, v) = ce(&fixtures::heis3(), 4);
        let r = ArtinRing::truncated_polynomial(3);
        let alg = v.algebra().clone();
        let solution = alg.word(&["x", "z"]).unwrap().with_ring(1);
        let rep = theorem_first_bijection_check(&v, &r, &solution).unwrap();
        assert!(rep.qme.holds && rep.morphism.holds(), "{rep:?}");
        let not = alg
            .word(&["x", "y"])
            .unwrap()
            .with_ring(1)
            .add(&Elem::term(SymWord::empty(), 1, 1, q(1)));
        let rep = theorem_first_bijection_check(&v, &r, &not).unwrap();
        assert!(!rep.qme.holds && !rep.morphism.intertwining.holds, "{rep:?}");
        assert!(rep.bijection_holds());
        assert!(theorem_first_bijection_check(&v, &r, &Elem::basis(gen(&l, "x"))).is_err());

        let qm = qm_functor_ring(&v);
        assert!(qm.contains(&r, &solution).unwrap());
        assert!(!qm.contains(&r, &not).unwrap());
        let r2 = ArtinRing::truncated_polynomial(2);
        let f = RingMap::by_label(&r, &r2).unwrap();
        assert!(qm.contains(&r2, &qm.push_forward(&f, &solution)).unwrap());
        // the truncation of a non-solution can be a solution
        let pushed = qm.push_forward(&f, &not);
        assert_eq!(qm.contains(&r2, &pushed).unwrap(), v.qme_exp_check(&r2, &pushed).unwrap().holds);
    }

    #[test]
    fn theorem_second_identity_and_failure() {
        let (l, v) = ce(&fixtures::heis3(), 3);
        let mut s = ConvMap::zero();
        for i in 0..3 {
            let w = SymWord(vec![i]);
            s.set(w.clone(), Elem::term(w, 1, 0, q(1)));
        }
        let rep = theorem_second_bijection_check(&v, &l, &s, 3).unwrap();
        assert!(rep.qme.holds && rep.morphism.holds(), "{rep:?}");

        let abelian = DgLie::from_labels(
            GradedVectorSpace::new([("x", 0), ("y", 0), ("z", 0)]).unwrap(),
            &[],
            &[],
            true,
        )
        .unwrap();
        let (_, flat) = ce(&abelian, 3);
        let rep = theorem_second_bijection_check(&flat, &l, &s, 3).unwrap();
        assert!(!rep.qme.holds && !rep.morphism.holds(), "{rep:?}");
        assert!(rep.bijection_holds());

        let mut wrong = ConvMap::zero();
        wrong.set(SymWord(vec![0, 1]), Elem::term(SymWord(vec![0, 1]), 0, 0, q(1)));
        assert!(theorem_second_bijection_check(&v, &l, &wrong, 3).is_err());
    }

    #[test]
    fn linfty_morphisms() {
        let h = LInfty::from_dg_lie(&fixtures::heis3());
        let id = linfty_identity(&h);
        assert!(linfty_morphism_check(&h, &h, &id, 3).unwrap().holds);
        let phi = linfty_morphism_to_bvinfty(&h, &h, &id, 3).unwrap();
        assert!(check_bv_morphism(&phi, OrderConvention::Strict).holds());

        let a = LInfty::from_dg_lie(&fixtures::abelian2());
        let include = |b: &str| {
            let mut f = ConvMap::zero();
            f.set(gen(&a, "a"), Elem::basis(gen(&h, "x")));
            f.set(gen(&a, "b"), Elem::basis(gen(&h, b)));
            f
        };
        for (target, expect) in [("z", true), ("y", false)] {
            let f = include(target);
            assert_eq!(linfty_morphism_check(&a, &h, &f, 3).unwrap().holds, expect);
            let phi = linfty_morphism_to_bvinfty(&a, &h, &f, 3).unwrap();
            assert_eq!(check_bv_morphism(&phi, OrderConvention::Strict).holds(), expect);
        }

        let g = LInfty::from_dg_lie(&fixtures::graded_dg_lie());
        let mut f = linfty_identity(&g);
        let w = gen(&g, "w");
        f.set(SymWord(vec![w.0[0], w.0[0]]), Elem::basis(w));
        assert!(!linfty_morphism_check(&g, &g, &f, 3).unwrap().holds);
        let phi = linfty_morphism_to_bvinfty(&g, &g, &f, 3).unwrap();
        let rep = check_bv_morphism(&phi, OrderConvention::Strict);
        assert!(rep.unit.holds && rep.order.holds && !rep.intertwining.holds);
    }

    #[test]
    fn composite_of_linfty_morphisms_keeps_weights() {
        let a = LInfty::from_dg_lie(&fixtures::abelian2());
        let h = LInfty::from_dg_lie(&fixtures::heis3());
        let mut f = ConvMap::zero();
        f.set(gen(&a, "a"), Elem::basis(gen(&h, "x")));
        f.set(gen(&a, "b"), Elem::basis(gen(&h, "z")));
        let inc = linfty_morphism_to_bvinfty(&a, &h, &f, 3).unwrap();
        let id = linfty_morphism_to_bvinfty(&h, &h, &linfty_identity(&h), 3).unwrap();
        let c = compose_bv_morphisms(&id, &inc).unwrap();
        assert!(same_on(inc.source().algebra().as_ref(), 3, c.map(), inc.map()));
        for (w, v) in c.map().iter() {
            for (t, _) in v.terms() {
                assert_eq!(t.hbar as usize, w.len());
            }
        }
    }
}
