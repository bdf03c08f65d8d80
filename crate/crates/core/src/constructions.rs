//! BV algebras built from classical data: Chevalley–Eilenberg complexes of
//! Lie algebras and Lie bialgebras, symmetric algebras of bi-dg-Lie algebras,
//! and the bar-type algebra `T(A[-1])` of an associative algebra.
//!
//! Every construction takes the word-length bound `N` up to which its axioms
//! are certified.
use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::algebra::{Elem, Operator, Term};
use crate::bv::{BvAlgebra, BvReport};
use crate::error::{Error, Result};
use crate::graded::{koszul_sign, GradedVector, GradedVectorSpace};
use crate::linfty::{quillen_bijection_check, DgLie, GElem, LInfty, QuillenReport};
use crate::ring::ArtinRing;
use crate::report::Verdict;
use crate::scalar::{format_rational, q, Q};
use crate::sym::{CoproductKind, SymAlgebra, SymWord, WordOperator};
use crate::tensor::{TensorAlgebra, TensorWord};

/// ħ-cutoff given to the constructed algebras.
pub const DEFAULT_HBAR_CUTOFF: usize = 4;

fn parity_sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn shifted_algebra(space: &GradedVectorSpace) -> Arc<SymAlgebra> {
    Arc::new(SymAlgebra::new(space.shift(-1)))
}

fn generator_elem(v: &GradedVector) -> Elem<SymWord> {
    Elem::from_pairs(v.iter().map(|(j, c)| (SymWord(vec![*j]), c.clone())))
}

/// The derivation of `S(g[-1])` extending `d` on generators.
fn internal_differential(alg: &Arc<SymAlgebra>, g: &DgLie) -> Result<WordOperator> {
    let mut op = WordOperator::new(1);
    for i in 0..g.dim() {
        let val = generator_elem(&g.d_basis(i));
        if !val.is_zero() {
            op.add(alg, &SymWord(vec![i]), &val)?;
        }
    }
    Ok(op)
}

/// `Δ(x_1⋯x_n) = Σ_{i<j} (-1)^{|x_1|+⋯+|x_i|+ε} x_1⋯[x_i,x_j]⋯x̂_j⋯x_n`,
/// where `ε` is the Koszul sign of reordering to `x_1⋯x_i x_j x_{i+1}⋯x̂_j⋯x_n`
/// and degrees are taken in `g[-1]`.
pub fn ce_delta_on_word(alg: &SymAlgebra, g: &DgLie, w: &SymWord) -> Elem<SymWord> {
    let f = w.factors();
    let n = f.len();
    let degs: Vec<i64> = f.iter().map(|&i| alg.generator_degree(i)).collect();
    let mut out = Elem::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            let br = g.bracket_basis(f[i], f[j]);
            if br.is_zero() {
                continue;
            }
            let mut perm: Vec<usize> = (0..=i).collect();
            perm.push(j);
            perm.extend(((i + 1)..n).filter(|&k| k != j));
            let eps = koszul_sign(&perm, &degs).expect("perm is a permutation");
            let sign = eps * parity_sign(degs[..=i].iter().sum());
            for (k, c) in br.iter() {
                let mut factors = f[..i].to_vec();
                factors.push(*k);
                factors.extend(perm[i + 2..].iter().map(|&p| f[p]));
                if let Some((word, s)) = alg.normalize(&factors) {
                    out.add_term(
                        Term {
                            hbar: 0,
                            ring: 0,
                            basis: word,
                        },
                        c * q(sign * s),
                    );
                }
            }
        }
    }
    out
}

fn ce_delta(alg: &Arc<SymAlgebra>, g: &DgLie) -> Operator<SymWord> {
    let (alg, g) = (alg.clone(), g.clone());
    Operator::new(-1, move |w| ce_delta_on_word(&alg, &g, w))
}

/// The Chevalley–Eilenberg complex `S(g[-1])` with its internal differential
/// and the BV operator built from the bracket.
///
/// The input is not re-certified: corrupted constants give an object whose
/// [`BvAlgebra::certify`] reports the failure.
pub fn ce_bv_from_dg_lie(g: &DgLie, max_size: usize) -> Result<BvAlgebra<SymAlgebra>> {
    let alg = shifted_algebra(g.space());
    let d = internal_differential(&alg, g)?.to_operator(&alg);
    let delta = ce_delta(&alg, g);
    BvAlgebra::new(alg, d, delta, max_size, DEFAULT_HBAR_CUTOFF)
}

/// Elements of `Λ²g`, keyed by `(j, k)` with `j < k`.
pub type Wedge2 = BTreeMap<(usize, usize), Q>;

fn wedge_add(w: &mut Wedge2, a: usize, b: usize, c: Q) {
    if a == b || c.is_zero() {
        return;
    }
    let (key, c) = if a < b { ((a, b), c) } else { ((b, a), -c) };
    let e = w.entry(key).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        w.remove(&key);
    }
}

fn format_wedge(space: &GradedVectorSpace, w: &Wedge2) -> String {
    if w.is_empty() {
        return "0".into();
    }
    w.iter()
        .map(|((a, b), c)| {
            format!(
                "{}*{}∧{}",
                format_rational(c),
                space.label(*a),
                space.label(*b)
            )
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A Lie bialgebra concentrated in degree zero: a Lie bracket together with
/// a cobracket `δ: g -> Λ²g`.
#[derive(Clone, Debug)]
pub struct LieBialgebraData {
    lie: DgLie,
    cobracket: BTreeMap<usize, Wedge2>,
}

impl LieBialgebraData {
    /// `cobracket` lists `(i, j, k, c)` for `δ(e_i) ∋ c e_j∧e_k`.
    pub fn new(lie: DgLie, cobracket: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let b = Self::unchecked(lie, cobracket)?;
        if let Some(w) = b.check_axioms().witness {
            return Err(Error::axiom("Lie bialgebra", w));
        }
        Ok(b)
    }

    /// Checks only shapes and degrees.
    pub fn unchecked(lie: DgLie, cobracket: &[(usize, usize, usize, Q)]) -> Result<Self> {
        let n = lie.dim();
        if (0..n).any(|i| lie.degree(i) != 0) || !lie.is_differential_zero() {
            return Err(Error::Precondition(
                "Lie bialgebras are supported in degree zero with d = 0".into(),
            ));
        }
        let mut table: BTreeMap<usize, Wedge2> = BTreeMap::new();
        for (i, j, k, c) in cobracket {
            if *i >= n || *j >= n || *k >= n {
                return Err(Error::Precondition("cobracket index out of range".into()));
            }
            wedge_add(table.entry(*i).or_default(), *j, *k, c.clone());
        }
        table.retain(|_, w| !w.is_empty());
        Ok(Self {
            lie,
            cobracket: table,
        })
    }

    pub fn from_labels(
        lie: DgLie,
        cobracket: &[(&str, &str, &str, Q)],
        certify: bool,
    ) -> Result<Self> {
        let sp = lie.space().clone();
        let entries = cobracket
            .iter()
            .map(|(a, b, c, x)| Ok((sp.index_of(a)?, sp.index_of(b)?, sp.index_of(c)?, x.clone())))
            .collect::<Result<Vec<_>>>()?;
        if certify {
            Self::new(lie, &entries)
        } else {
            Self::unchecked(lie, &entries)
        }
    }

    pub fn lie(&self) -> &DgLie {
        &self.lie
    }

    pub fn cobracket(&self, i: usize) -> Wedge2 {
        self.cobracket.get(&i).cloned().unwrap_or_default()
    }

    fn cobracket_vec(&self, v: &GradedVector) -> Wedge2 {
        let mut out = Wedge2::new();
        for (i, c) in v.iter() {
            for ((a, b), x) in self.cobracket(*i) {
                wedge_add(&mut out, a, b, c * x);
            }
        }
        out
    }

    /// `ad_x(a∧b) = [x,a]∧b + a∧[x,b]`.
    fn ad_wedge(&self, x: usize, w: &Wedge2) -> Wedge2 {
        let mut out = Wedge2::new();
        for ((a, b), c) in w {
            for (m, cm) in self.lie.bracket_basis(x, *a).iter() {
                wedge_add(&mut out, *m, *b, c * cm);
            }
            for (m, cm) in self.lie.bracket_basis(x, *b).iter() {
                wedge_add(&mut out, *a, *m, c * cm);
            }
        }
        out
    }

    /// The Lie algebra `g*` whose bracket is dual to `δ`; co-Jacobi for `δ`
    /// is Jacobi for `g*`.
    pub fn dual_lie(&self) -> Result<DgLie> {
        let entries: Vec<_> = self
            .cobracket
            .iter()
            .flat_map(|(i, w)| w.iter().map(move |((a, b), c)| (*a, *b, *i, c.clone())))
            .collect();
        DgLie::unchecked(self.lie.space().dual(), &[], &entries)
    }

    /// Jacobi, co-Jacobi and the cocycle condition
    /// `δ[x,y] = ad_x δ(y) - ad_y δ(x)`.
    pub fn check_axioms(&self) -> Verdict {
        let jacobi = self.lie.check_axioms();
        if !jacobi.holds {
            return jacobi;
        }
        let co_jacobi = match self.dual_lie() {
            Ok(d) => d.check_axioms(),
            Err(e) => Verdict::fail(e.to_string()),
        };
        if !co_jacobi.holds {
            return Verdict::fail(format!(
                "co-Jacobi: {}",
                co_jacobi.witness.unwrap_or_default()
            ));
        }
        let sp = self.lie.space();
        for x in 0..self.lie.dim() {
            for y in (x + 1)..self.lie.dim() {
                let lhs = self.cobracket_vec(&self.lie.bracket_basis(x, y));
                let mut rhs = self.ad_wedge(x, &self.cobracket(y));
                for ((a, b), c) in self.ad_wedge(y, &self.cobracket(x)) {
                    wedge_add(&mut rhs, a, b, -c);
                }
                if lhs != rhs {
                    return Verdict::fail(format!(
                        "cocycle on ({}, {}): δ[x,y] = {}, ad_x δy - ad_y δx = {}",
                        sp.label(x),
                        sp.label(y),
                        format_wedge(sp, &lhs),
                        format_wedge(sp, &rhs)
                    ));
                }
            }
        }
        Verdict::pass()
    }

    /// `[-,-] ∘ δ` on each basis element; empty when involutive.
    pub fn involutivity_defect(&self) -> Vec<(usize, GradedVector)> {
        let mut out = Vec::new();
        for (i, w) in &self.cobracket {
            let mut v = GradedVector::zero();
            for ((a, b), c) in w {
                v = v.add(&self.lie.bracket_basis(*a, *b).scale(c));
            }
            if !v.is_zero() {
                out.push((*i, v));
            }
        }
        out
    }

    pub fn involutive(&self) -> bool {
        self.involutivity_defect().is_empty()
    }
}

/// The result of the Lie bialgebra construction: the algebra and its
/// certification. Without involutivity `[Δ, d] ≠ 0` and the report carries
/// the witness.
#[derive(Clone)]
pub struct IblBv {
    pub bv: BvAlgebra<SymAlgebra>,
    pub involutive: bool,
    pub report: BvReport,
}

impl IblBv {
    pub fn is_bv(&self) -> bool {
        self.report.holds()
    }

    /// The `[Δ, d]` witness, if the two fail to commute.
    pub fn diagnostic(&self) -> Option<&str> {
        self.report.commute.witness.as_deref()
    }
}

/// `S(g[-1])` with the Chevalley–Eilenberg `Δ` of the bracket and `d` the
/// derivation extending the cobracket.
pub fn ce_bv_from_ibl(b: &LieBialgebraData, max_size: usize) -> Result<IblBv> {
    if let Some(w) = b.check_axioms().witness {
        return Err(Error::axiom("Lie bialgebra", w));
    }
    let alg = shifted_algebra(b.lie.space());
    let mut d = WordOperator::new(1);
    for (i, w) in &b.cobracket {
        let mut val = Elem::zero();
        for ((a, c), x) in w {
            if let Some((word, s)) = alg.normalize(&[*a, *c]) {
                val.add_term(
                    Term {
                        hbar: 0,
                        ring: 0,
                        basis: word,
                    },
                    x * q(s),
                );
            }
        }
        d.add(&alg, &SymWord(vec![*i]), &val)?;
    }
    let bv = BvAlgebra::new(
        alg.clone(),
        d.to_operator(&alg),
        ce_delta(&alg, &b.lie),
        max_size,
        DEFAULT_HBAR_CUTOFF,
    )?;
    let report = bv.certify();
    Ok(IblBv {
        bv,
        involutive: b.involutive(),
        report,
    })
}

/// The 2-dimensional bialgebra `[h, e] = e`, `δ(e) = h∧e`; not involutive.
pub fn non_involutive_bialgebra() -> LieBialgebraData {
    let lie = DgLie::from_labels(
        GradedVectorSpace::new([("h", 0), ("e", 0)]).expect("basis"),
        &[],
        &[("h", "e", "e", q(1))],
        true,
    )
    .expect("Lie algebra");
    LieBialgebraData::from_labels(lie, &[("e", "h", "e", q(1))], true).expect("bialgebra")
}

/// `[h, e] = e` with a central `c` and `δ(h) = e∧c`; involutive because
/// `[e, c] = 0`.
pub fn involutive_bialgebra() -> LieBialgebraData {
    let lie = DgLie::from_labels(
        GradedVectorSpace::new([("h", 0), ("e", 0), ("c", 0)]).expect("basis"),
        &[],
        &[("h", "e", "e", q(1))],
        true,
    )
    .expect("Lie algebra");
    LieBialgebraData::from_labels(lie, &[("h", "e", "c", q(1))], true).expect("bialgebra")
}

/// A graded Lie algebra with two commuting differentials: `d` of degree 1
/// and `Δ` of degree -1, both derivations of the bracket.
#[derive(Clone, Debug)]
pub struct BiDgLieData {
    lie: DgLie,
    delta: BTreeMap<usize, GradedVector>,
}

impl BiDgLieData {
    /// `delta` lists `(i, j, c)` for `Δ e_i ∋ c e_j`.
    pub fn new(lie: DgLie, delta: &[(usize, usize, Q)]) -> Result<Self> {
        let b = Self::unchecked(lie, delta)?;
        if let Some(w) = b.check_axioms().witness {
            return Err(Error::axiom("bi-dg-Lie", w));
        }
        Ok(b)
    }

    pub fn unchecked(lie: DgLie, delta: &[(usize, usize, Q)]) -> Result<Self> {
        let sp = lie.space().clone();
        let mut table: BTreeMap<usize, GradedVector> = BTreeMap::new();
        for (i, j, c) in delta {
            if *i >= sp.dim() || *j >= sp.dim() {
                return Err(Error::Precondition("Δ index out of range".into()));
            }
            if sp.degree(*j) != sp.degree(*i) - 1 {
                return Err(Error::DegreeMismatch(format!(
                    "Δ({}) ∋ {} does not lower degree by one",
                    sp.label(*i),
                    sp.label(*j)
                )));
            }
            table.entry(*i).or_default().add_term(*j, c.clone());
        }
        table.retain(|_, v| !v.is_zero());
        Ok(Self { lie, delta: table })
    }

    pub fn from_labels(lie: DgLie, delta: &[(&str, &str, Q)], certify: bool) -> Result<Self> {
        let sp = lie.space().clone();
        let entries = delta
            .iter()
            .map(|(a, b, c)| Ok((sp.index_of(a)?, sp.index_of(b)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        if certify {
            Self::new(lie, &entries)
        } else {
            Self::unchecked(lie, &entries)
        }
    }

    pub fn lie(&self) -> &DgLie {
        &self.lie
    }

    pub fn delta_basis(&self, i: usize) -> GradedVector {
        self.delta.get(&i).cloned().unwrap_or_default()
    }

    pub fn delta_vec(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (i, c) in v.iter() {
            out = out.add(&self.delta_basis(*i).scale(c));
        }
        out
    }

    /// `Δ` extended `k[ħ] ⊗ R`-linearly.
    pub fn delta_elem(&self, x: &GElem) -> GElem {
        let mut out = Elem::zero();
        for (t, c) in x.terms() {
            for (j, dc) in self.delta_basis(t.basis).iter() {
                out.add_term(
                    Term {
                        hbar: t.hbar,
                        ring: t.ring,
                        basis: *j,
                    },
                    c * dc,
                );
            }
        }
        out
    }

    /// The dg-Lie axioms for `d`, then `Δ² = 0`, `dΔ + Δd = 0` and
    /// `Δ[x,y] = [Δx,y] + (-1)^{|x|}[x,Δy]`.
    pub fn check_axioms(&self) -> Verdict {
        let base = self.lie.check_axioms();
        if !base.holds {
            return base;
        }
        let sp = self.lie.space();
        let fmt = |v: &GradedVector| crate::linfty::format_vector(sp, v);
        let e = GradedVector::basis;
        for i in 0..self.lie.dim() {
            let dd = self.delta_vec(&self.delta_basis(i));
            if !dd.is_zero() {
                return Verdict::fail(format!("Δ²({}) = {}", sp.label(i), fmt(&dd)));
            }
            let c = self
                .delta_vec(&self.lie.d_basis(i))
                .add(&self.lie.d_vec(&self.delta_basis(i)));
            if !c.is_zero() {
                return Verdict::fail(format!("(dΔ + Δd)({}) = {}", sp.label(i), fmt(&c)));
            }
            for j in 0..self.lie.dim() {
                let lhs = self.delta_vec(&self.lie.bracket_basis(i, j));
                let rhs = self
                    .lie
                    .bracket_vec(&self.delta_basis(i), &e(j))
                    .add(
                        &self
                            .lie
                            .bracket_vec(&e(i), &self.delta_basis(j))
                            .scale(&crate::scalar::sign_pow(self.lie.degree(i))),
                    );
                if lhs != rhs {
                    return Verdict::fail(format!(
                        "Δ is not a derivation on ({}, {}): {} vs {}",
                        sp.label(i),
                        sp.label(j),
                        fmt(&lhs),
                        fmt(&rhs)
                    ));
                }
            }
        }
        Verdict::pass()
    }
}

/// `{x, y_1⋯y_m} = Σ_k (-1)^{(|x|+1)(|y_1|+⋯+|y_{k-1}|)} y_1⋯[x,y_k]⋯y_m`
/// for a generator `x`, degrees in `g[-1]`.
fn schouten_generator(alg: &SymAlgebra, g: &DgLie, x: usize, w: &[usize]) -> Elem<SymWord> {
    let dx = alg.generator_degree(x);
    let mut out = Elem::zero();
    let mut prefix = 0i64;
    for k in 0..w.len() {
        let sign = parity_sign((dx + 1) * prefix);
        for (m, c) in g.bracket_basis(x, w[k]).iter() {
            let mut factors = w[..k].to_vec();
            factors.push(*m);
            factors.extend_from_slice(&w[k + 1..]);
            if let Some((word, s)) = alg.normalize(&factors) {
                out.add_term(
                    Term {
                        hbar: 0,
                        ring: 0,
                        basis: word,
                    },
                    c * q(sign * s),
                );
            }
        }
        prefix += alg.generator_degree(w[k]);
    }
    out
}

fn left_multiply(alg: &SymAlgebra, x: usize, y: &Elem<SymWord>) -> Elem<SymWord> {
    let mut out = Elem::zero();
    for (t, c) in y.terms() {
        let mut factors = vec![x];
        factors.extend_from_slice(t.basis.factors());
        if let Some((word, s)) = alg.normalize(&factors) {
            out.add_term(
                Term {
                    hbar: t.hbar,
                    ring: t.ring,
                    basis: word,
                },
                c * q(s),
            );
        }
    }
    out
}

/// `Δ(x·w) = (Δx)·w + (-1)^{|x|} x·Δ(w) + (-1)^{|x|} {x, w}`, unrolled from
/// the first factor of a normal-form word.
fn bidg_delta_on_word(alg: &SymAlgebra, b: &BiDgLieData, w: &SymWord) -> Elem<SymWord> {
    let f = w.factors();
    let Some((&x, rest)) = f.split_first() else {
        return Elem::zero();
    };
    let sign = q(parity_sign(alg.generator_degree(x)));
    let mut out = Elem::zero();
    for (j, c) in b.delta_basis(x).iter() {
        let mut factors = vec![*j];
        factors.extend_from_slice(rest);
        if let Some((word, s)) = alg.normalize(&factors) {
            out.add_term(
                Term {
                    hbar: 0,
                    ring: 0,
                    basis: word,
                },
                c * q(s),
            );
        }
    }
    let inner = bidg_delta_on_word(alg, b, &SymWord(rest.to_vec()));
    out.add_scaled(&left_multiply(alg, x, &inner), &sign);
    out.add_scaled(&schouten_generator(alg, &b.lie, x, rest), &sign);
    out
}

/// `S(g[-1])` with `d` extended as a derivation and `Δ` determined by the
/// Schouten extension of the bracket.
pub fn bv_from_bi_dg_lie(b: &BiDgLieData, max_size: usize) -> Result<BvAlgebra<SymAlgebra>> {
    let alg = shifted_algebra(b.lie.space());
    let d = internal_differential(&alg, &b.lie)?.to_operator(&alg);
    let delta = {
        let (alg, b) = (alg.clone(), b.clone());
        Operator::new(-1, move |w| bidg_delta_on_word(&alg, &b, w))
    };
    BvAlgebra::new(alg, d, delta, max_size, DEFAULT_HBAR_CUTOFF)
}

/// Checks that `g -> S(g[-1])[1]`, `x ↦ x`, intertwines `d`, `Δ` and takes
/// the bracket to the antibracket.
pub fn bidg_inclusion_check(b: &BiDgLieData, bv: &BvAlgebra<SymAlgebra>) -> Verdict {
    let ring = crate::ring::ArtinRing::ground();
    let sp = b.lie.space();
    let gen = |i: usize| Elem::basis(SymWord(vec![i]));
    for i in 0..b.lie.dim() {
        let dv = bv.d().apply(&gen(i));
        if dv != generator_elem(&b.lie.d_basis(i)) {
            return Verdict::fail(format!("d({}) is not preserved", sp.label(i)));
        }
        let delta = bv.delta().apply(&gen(i));
        if delta != generator_elem(&b.delta_basis(i)) {
            return Verdict::fail(format!("Δ({}) is not preserved", sp.label(i)));
        }
        for j in 0..b.lie.dim() {
            let ab = bv.antibracket(&ring, &gen(i), &gen(j));
            if ab != generator_elem(&b.lie.bracket_basis(i, j)) {
                return Verdict::fail(format!(
                    "{{{0}, {1}}} differs from [{0}, {1}]",
                    sp.label(i),
                    sp.label(j)
                ));
            }
        }
    }
    Verdict::pass()
}

/// A 4-dimensional bi-dg-Lie algebra with `d` and `Δ` both nonzero:
/// `p` (0), `q` (1), `r` (-1), `s` (0), `p` acting by -1 on the others,
/// `d r = s`, `Δ q = s`.
pub fn bidg_fixture() -> BiDgLieData {
    let lie = DgLie::from_labels(
        GradedVectorSpace::new([("p", 0), ("q", 1), ("r", -1), ("s", 0)]).expect("basis"),
        &[("r", "s", q(1))],
        &[
            ("p", "q", "q", q(-1)),
            ("p", "r", "r", q(-1)),
            ("p", "s", "s", q(-1)),
        ],
        true,
    )
    .expect("dg-Lie");
    BiDgLieData::from_labels(lie, &[("q", "s", q(1))], true).expect("bi-dg-Lie")
}

/// A finite-dimensional graded associative algebra with an optional
/// differential.
#[derive(Clone, Debug)]
pub struct AssociativeAlgebraData {
    space: Arc<GradedVectorSpace>,
    mult: BTreeMap<(usize, usize), GradedVector>,
    d: BTreeMap<usize, GradedVector>,
}

impl AssociativeAlgebraData {
    /// `mult` lists `(i, j, k, c)` for `e_i·e_j ∋ c e_k`; `d` lists
    /// `(i, j, c)` for `d e_i ∋ c e_j`.
    pub fn new(
        space: GradedVectorSpace,
        mult: &[(usize, usize, usize, Q)],
        d: &[(usize, usize, Q)],
    ) -> Result<Self> {
        let a = Self::unchecked(space, mult, d)?;
        if let Some(w) = a.check_axioms().witness {
            return Err(Error::axiom("dg-associative", w));
        }
        Ok(a)
    }

    /// Checks only indices and degrees.
    pub fn unchecked(
        space: GradedVectorSpace,
        mult: &[(usize, usize, usize, Q)],
        d: &[(usize, usize, Q)],
    ) -> Result<Self> {
        let n = space.dim();
        let mut table: BTreeMap<(usize, usize), GradedVector> = BTreeMap::new();
        for (i, j, k, c) in mult {
            if *i >= n || *j >= n || *k >= n {
                return Err(Error::Precondition("product index out of range".into()));
            }
            if space.degree(*k) != space.degree(*i) + space.degree(*j) {
                return Err(Error::DegreeMismatch(format!(
                    "{}·{} ∋ {} has the wrong degree",
                    space.label(*i),
                    space.label(*j),
                    space.label(*k)
                )));
            }
            table.entry((*i, *j)).or_default().add_term(*k, c.clone());
        }
        let mut dmap: BTreeMap<usize, GradedVector> = BTreeMap::new();
        for (i, j, c) in d {
            if *i >= n || *j >= n {
                return Err(Error::Precondition("differential index out of range".into()));
            }
            if space.degree(*j) != space.degree(*i) + 1 {
                return Err(Error::DegreeMismatch(format!(
                    "d({}) ∋ {} does not raise degree by one",
                    space.label(*i),
                    space.label(*j)
                )));
            }
            dmap.entry(*i).or_default().add_term(*j, c.clone());
        }
        table.retain(|_, v| !v.is_zero());
        dmap.retain(|_, v| !v.is_zero());
        Ok(Self {
            space: Arc::new(space),
            mult: table,
            d: dmap,
        })
    }

    pub fn from_labels(
        space: GradedVectorSpace,
        mult: &[(&str, &str, &str, Q)],
        d: &[(&str, &str, Q)],
        certify: bool,
    ) -> Result<Self> {
        let m = mult
            .iter()
            .map(|(a, b, c, x)| {
                Ok((space.index_of(a)?, space.index_of(b)?, space.index_of(c)?, x.clone()))
            })
            .collect::<Result<Vec<_>>>()?;
        let dd = d
            .iter()
            .map(|(a, b, x)| Ok((space.index_of(a)?, space.index_of(b)?, x.clone())))
            .collect::<Result<Vec<_>>>()?;
        if certify {
            Self::new(space, &m, &dd)
        } else {
            Self::unchecked(space, &m, &dd)
        }
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn product(&self, i: usize, j: usize) -> GradedVector {
        self.mult.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn d_basis(&self, i: usize) -> GradedVector {
        self.d.get(&i).cloned().unwrap_or_default()
    }

    fn mul_vec(&self, u: &GradedVector, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                out = out.add(&self.product(*i, *j).scale(&(a * b)));
            }
        }
        out
    }

    fn d_vec(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (i, c) in v.iter() {
            out = out.add(&self.d_basis(*i).scale(c));
        }
        out
    }

    /// Associativity, `d² = 0` and the Leibniz rule on basis elements.
    pub fn check_axioms(&self) -> Verdict {
        let sp = self.space.as_ref();
        let fmt = |v: &GradedVector| crate::linfty::format_vector(sp, v);
        let e = GradedVector::basis;
        let n = sp.dim();
        for i in 0..n {
            let dd = self.d_vec(&self.d_basis(i));
            if !dd.is_zero() {
                return Verdict::fail(format!("d²({}) = {}", sp.label(i), fmt(&dd)));
            }
            for j in 0..n {
                let lhs = self.d_vec(&self.product(i, j));
                let rhs = self.mul_vec(&self.d_basis(i), &e(j)).add(
                    &self
                        .mul_vec(&e(i), &self.d_basis(j))
                        .scale(&crate::scalar::sign_pow(sp.degree(i))),
                );
                if lhs != rhs {
                    return Verdict::fail(format!(
                        "Leibniz on ({}, {}): {} vs {}",
                        sp.label(i),
                        sp.label(j),
                        fmt(&lhs),
                        fmt(&rhs)
                    ));
                }
                for k in 0..n {
                    let left = self.mul_vec(&self.product(i, j), &e(k));
                    let right = self.mul_vec(&e(i), &self.product(j, k));
                    if left != right {
                        return Verdict::fail(format!(
                            "({0}·{1})·{2} = {3} but {0}·({1}·{2}) = {4}",
                            sp.label(i),
                            sp.label(j),
                            sp.label(k),
                            fmt(&left),
                            fmt(&right)
                        ));
                    }
                }
            }
        }
        Verdict::pass()
    }
}

fn tensor_term(w: Vec<usize>, c: Q) -> (Term<TensorWord>, Q) {
    (
        Term {
            hbar: 0,
            ring: 0,
            basis: TensorWord(w),
        },
        c,
    )
}

/// `Δ(a_1⊗⋯⊗a_n) = Σ_i (-1)^{|a_1|+⋯+|a_i|} a_1⊗⋯⊗(a_i·a_{i+1})⊗⋯⊗a_n`,
/// degrees in `A[-1]`.
fn bar_delta_on_word(alg: &TensorAlgebra, a: &AssociativeAlgebraData, w: &TensorWord) -> Elem<TensorWord> {
    let f = &w.0;
    let mut out = Elem::zero();
    let mut prefix = 0i64;
    for i in 0..f.len().saturating_sub(1) {
        prefix += alg.space().degree(f[i]);
        let sign = q(parity_sign(prefix));
        for (m, c) in a.product(f[i], f[i + 1]).iter() {
            let mut v = f[..i].to_vec();
            v.push(*m);
            v.extend_from_slice(&f[i + 2..]);
            let (t, c) = tensor_term(v, c * &sign);
            out.add_term(t, c);
        }
    }
    out
}

/// `d` extended to tensor words as a derivation, degrees in `A[-1]`.
fn bar_d_on_word(alg: &TensorAlgebra, a: &AssociativeAlgebraData, w: &TensorWord) -> Elem<TensorWord> {
    let f = &w.0;
    let mut out = Elem::zero();
    let mut prefix = 0i64;
    for i in 0..f.len() {
        let sign = q(parity_sign(prefix));
        for (m, c) in a.d_basis(f[i]).iter() {
            let mut v = f.clone();
            v[i] = *m;
            let (t, c) = tensor_term(v, c * &sign);
            out.add_term(t, c);
        }
        prefix += alg.space().degree(f[i]);
    }
    out
}

/// `T(A[-1])` with the shuffle product, the chosen coproduct, `d` from `A`
/// and `Δ` built from the multiplication. Nonassociative input is accepted;
/// the failure then shows up in [`BvAlgebra::certify`] as `Δ² ≠ 0`.
pub fn bar_bv_from_associative(
    a: &AssociativeAlgebraData,
    max_size: usize,
    coproduct: CoproductKind,
) -> Result<BvAlgebra<TensorAlgebra>> {
    let alg = Arc::new(TensorAlgebra::new(a.space.shift(-1), coproduct));
    let d = {
        let (alg, a) = (alg.clone(), a.clone());
        Operator::new(1, move |w| bar_d_on_word(&alg, &a, w))
    };
    let delta = {
        let (alg, a) = (alg.clone(), a.clone());
        Operator::new(-1, move |w| bar_delta_on_word(&alg, &a, w))
    };
    BvAlgebra::new(alg, d, delta, max_size, DEFAULT_HBAR_CUTOFF)
}

/// The ground field, one basis element `e` with `e·e = e`.
pub fn ground_field_algebra() -> AssociativeAlgebraData {
    AssociativeAlgebraData::from_labels(
        GradedVectorSpace::new([("e", 0)]).expect("basis"),
        &[("e", "e", "e", q(1))],
        &[],
        true,
    )
    .expect("associative")
}

/// Dual numbers `k[ε]/(ε²)` with unit `e`.
pub fn dual_numbers() -> AssociativeAlgebraData {
    AssociativeAlgebraData::from_labels(
        GradedVectorSpace::new([("e", 0), ("eps", 0)]).expect("basis"),
        &[
            ("e", "e", "e", q(1)),
            ("e", "eps", "eps", q(1)),
            ("eps", "e", "eps", q(1)),
        ],
        &[],
        true,
    )
    .expect("associative")
}

/// A unital dg algebra: `e` (0), `a` (-1), `b` (0), `d a = b`, all products
/// of `a, b` zero.
pub fn dg_associative_fixture() -> AssociativeAlgebraData {
    AssociativeAlgebraData::from_labels(
        GradedVectorSpace::new([("e", 0), ("a", -1), ("b", 0)]).expect("basis"),
        &[
            ("e", "e", "e", q(1)),
            ("e", "a", "a", q(1)),
            ("a", "e", "a", q(1)),
            ("e", "b", "b", q(1)),
            ("b", "e", "b", q(1)),
        ],
        &[("a", "b", q(1))],
        true,
    )
    .expect("dg-associative")
}

/// `u·u = v`, `u·v = u`, other products zero: `(u·u)·u = 0` but
/// `u·(u·u) = u`.
pub fn nonassociative_fixture() -> AssociativeAlgebraData {
    AssociativeAlgebraData::from_labels(
        GradedVectorSpace::new([("u", 0), ("v", 0)]).expect("basis"),
        &[("u", "u", "v", q(1)), ("u", "v", "u", q(1))],
        &[],
        false,
    )
    .expect("shapes")
}

/// Reads `S ∈ S(g[-1]) ⊗ R[[ħ]]` as an element of `g[[ħ]] ⊗ R`, failing
/// unless every word has length one.
pub fn length_one_part(b: &BiDgLieData, s: &Elem<SymWord>) -> Result<GElem> {
    let sp = b.lie.space();
    let mut out = Elem::zero();
    for (t, c) in s.terms() {
        if t.basis.len() != 1 {
            let labels: Vec<&str> = t.basis.factors().iter().map(|&i| sp.label(i)).collect();
            return Err(Error::Precondition(format!(
                "S has a term on the word {} outside the length-one part",
                labels.join("·")
            )));
        }
        out.add_term(
            Term {
                hbar: t.hbar,
                ring: t.ring,
                basis: t.basis.factors()[0],
            },
            c.clone(),
        );
    }
    Ok(out)
}

/// `g ⊗ R[[ħ]] -> S(g[-1]) ⊗ R[[ħ]]` onto length-one words.
pub fn embed_length_one(s: &GElem) -> Elem<SymWord> {
    s.map_basis(|i| SymWord(vec![*i]))
}

fn validate_qm_element(b: &BiDgLieData, s: &GElem) -> Result<()> {
    let sp = b.lie.space();
    for (t, _) in s.terms() {
        let deg = sp.degree(t.basis) + 2 * t.hbar as i64;
        if deg != 1 {
            return Err(Error::DegreeMismatch(format!(
                "term {}·ħ^{} of S has degree {deg} in g[[ħ]], expected 1",
                sp.label(t.basis),
                t.hbar
            )));
        }
        if t.hbar < 0 {
            return Err(Error::NegativeHbar(format!("ħ^{} in S", t.hbar)));
        }
        if t.ring == 0 {
            return Err(Error::Precondition(
                "coefficients of S must lie in the maximal ideal".into(),
            ));
        }
    }
    Ok(())
}

/// `dS + ħΔS + ½[S, S]` computed inside `g`, for `S` in the length-one part
/// of `S(g[-1])`.
pub fn qm_bidg_residual(b: &BiDgLieData, ring: &ArtinRing, s: &Elem<SymWord>) -> Result<GElem> {
    let s = length_one_part(b, s)?;
    validate_qm_element(b, &s)?;
    let mut out = b.lie.d_elem(&s);
    out.add_assign(&b.delta_elem(&s).hbar_shift(1));
    out.add_scaled(&b.lie.bracket_elem(ring, &s, &s), &Q::new(1.into(), 2.into()));
    Ok(out)
}

/// Compares [`qm_bidg_residual`] with the quantum master equation residual of
/// the ambient BV algebra [`bv_from_bi_dg_lie`] on the same `S`.
pub fn qm_ambient_agreement(
    b: &BiDgLieData,
    bv: &BvAlgebra<SymAlgebra>,
    ring: &ArtinRing,
    s: &Elem<SymWord>,
) -> Result<Verdict> {
    let inside = embed_length_one(&qm_bidg_residual(b, ring, s)?);
    let ambient = bv.qme_residual(ring, s)?;
    let amb = bv.as_infty().ambient(ring);
    Ok(Verdict::from_bool(inside == ambient, || {
        format!(
            "in g: {}; in S(g[-1]): {}",
            amb.format(&inside),
            amb.format(&ambient)
        )
    }))
}

/// The dg-Lie algebra `g[[ħ]]/(ħ^K)` with differential `d + ħΔ`, on the basis
/// `e_i ħ^j` (index `i + j·dim g`, label `e_i` or `e_i·h^j`).
pub fn hbar_dg_lie(b: &BiDgLieData, k: usize) -> Result<DgLie> {
    let sp = b.lie.space();
    let n = sp.dim();
    let basis: Vec<(String, i64)> = (0..k)
        .flat_map(|j| {
            (0..n).map(move |i| {
                let label = if j == 0 {
                    sp.label(i).to_string()
                } else {
                    format!("{}·h^{}", sp.label(i), j)
                };
                (label, sp.degree(i) + 2 * j as i64)
            })
        })
        .collect();
    let space = GradedVectorSpace::new(basis)?;
    let mut d = Vec::new();
    for j in 0..k {
        for (i, ci, c) in b.lie.differential_entries() {
            d.push((i + j * n, ci + j * n, c));
        }
        if j + 1 < k {
            for i in 0..n {
                for (t, c) in b.delta_basis(i).iter() {
                    d.push((i + j * n, t + (j + 1) * n, c.clone()));
                }
            }
        }
    }
    let mut bracket = Vec::new();
    for (x, y, z, c) in b.lie.bracket_entries() {
        for j1 in 0..k {
            for j2 in 0..k - j1 {
                if x == y && j2 < j1 {
                    continue;
                }
                bracket.push((x + j1 * n, y + j2 * n, z + (j1 + j2) * n, c.clone()));
            }
        }
    }
    DgLie::new(space, &d, &bracket)
}

/// `S ∈ g[[ħ]] ⊗ m` as a length-one element of `S((g[[ħ]]/ħ^K)[1])`.
pub fn to_hbar_mc_element(b: &BiDgLieData, k: usize, s: &GElem) -> Result<Elem<SymWord>> {
    let n = b.lie.dim();
    let mut out = Elem::zero();
    for (t, c) in s.terms() {
        if t.hbar < 0 || t.hbar as usize >= k {
            return Err(Error::Truncation(format!("ħ^{} outside [0, {k})", t.hbar)));
        }
        out.add_term(
            Term {
                hbar: 0,
                ring: t.ring,
                basis: SymWord(vec![t.basis + t.hbar as usize * n]),
            },
            c.clone(),
        );
    }
    Ok(out)
}

/// Inverse of [`to_hbar_mc_element`] on length-one words.
pub fn from_hbar_mc_element(b: &BiDgLieData, x: &Elem<SymWord>) -> GElem {
    let n = b.lie.dim();
    let mut out = Elem::zero();
    for (t, c) in x.terms() {
        let idx = t.basis.factors()[0];
        out.add_term(
            Term {
                hbar: (idx / n) as i32,
                ring: t.ring,
                basis: idx % n,
            },
            c.clone(),
        );
    }
    out
}

/// Checks `QM_g(R) = MC_{g[[ħ]]}(R)` on one element: the residual in `g`,
/// truncated at `ħ^K`, equals the Maurer–Cartan residual of `S` in
/// `g[[ħ]]/(ħ^K)`.
pub fn qm_mc_agreement(b: &BiDgLieData, ring: &ArtinRing, s: &Elem<SymWord>, k: usize) -> Result<Verdict> {
    let qm = qm_bidg_residual(b, ring, s)?.truncate_hbar(k as i32);
    let l = LInfty::from_dg_lie(&hbar_dg_lie(b, k)?);
    let mc = l.emce_residual(ring, &to_hbar_mc_element(b, k, &length_one_part(b, s)?)?)?;
    let mc = from_hbar_mc_element(b, &mc);
    let sp = b.lie.space();
    Ok(Verdict::from_bool(qm == mc, || {
        format!(
            "QM residual {} vs MC residual {}",
            crate::linfty::format_gelem(sp, ring, &qm),
            crate::linfty::format_gelem(sp, ring, &mc)
        )
    }))
}

/// Quillen's comparison for `g[[ħ]]/(ħ^K)`: `S` solves the quantum master
/// equation iff `exp(S)` is a dg-coalgebra morphism into `S(g[1][[ħ]])`.
pub fn qm_quillen_check(
    b: &BiDgLieData,
    ring: &ArtinRing,
    s: &Elem<SymWord>,
    k: usize,
    word_length: usize,
) -> Result<QuillenReport> {
    let l = LInfty::from_dg_lie(&hbar_dg_lie(b, k)?);
    let x = to_hbar_mc_element(b, k, &length_one_part(b, s)?)?;
    quillen_bijection_check(&l, ring, &x, word_length)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GradedAlgebra;
    use crate::bv::BvInfty;
    use crate::fixtures;
    use crate::linfty::LInfty;

    fn dg_fixture() -> DgLie {
        fixtures::graded_dg_lie()
    }

    fn all_lie() -> Vec<DgLie> {
        let mut v: Vec<DgLie> = fixtures::LIE_NAMES
            .iter()
            .map(|n| fixtures::lie_by_name(n).unwrap())
            .collect();
        v.push(dg_fixture());
        v
    }

    #[test]
    fn abelian_delta_vanishes() {
        let bv = ce_bv_from_dg_lie(&fixtures::abelian2(), 4).unwrap();
        for w in bv.algebra().basis_up_to(4) {
            assert!(bv.delta().on_basis(&w).is_zero());
        }
    }

    #[test]
    fn heis3_pairs() {
        let bv = ce_bv_from_dg_lie(&fixtures::heis3(), 4).unwrap();
        let alg = bv.algebra();
        let xy = alg.word(&["x", "y"]).unwrap();
        assert_eq!(bv.delta().apply(&xy), alg.word(&["z"]).unwrap().scale(&q(-1)));
        assert!(bv.delta().apply(&alg.word(&["x", "z"]).unwrap()).is_zero());
        let xyz = alg.word(&["x", "y", "z"]).unwrap();
        // -z·z vanishes since z is odd in g[-1]
        assert!(bv.delta().apply(&xyz).is_zero());
    }

    #[test]
    fn pairs_formula_matches_coderivation_path() {
        for g in all_lie() {
            let bv = ce_bv_from_dg_lie(&g, 4).unwrap();
            let via_l = BvInfty::from_linfty(&LInfty::from_dg_lie(&g), 4, 3).unwrap();
            for w in bv.algebra().basis_up_to(4) {
                let d1 = via_l.op(1).map(|o| o.on_basis(&w)).unwrap_or_default();
                let d2 = via_l.op(2).map(|o| o.on_basis(&w)).unwrap_or_default();
                assert_eq!(bv.d().on_basis(&w), d1, "d on {}", bv.algebra().label(&w));
                assert_eq!(bv.delta().on_basis(&w), d2, "Δ on {}", bv.algebra().label(&w));
            }
        }
    }

    #[test]
    fn fixtures_certify() {
        for g in all_lie() {
            let r = ce_bv_from_dg_lie(&g, 4).unwrap().certify();
            assert!(r.holds(), "{:?}", r.first_failure());
        }
    }

    /// Every single-constant perturbation: BV axioms hold iff the input is a
    /// dg-Lie algebra.
    #[test]
    fn corrupted_constants() {
        let mut seen_fail = 0;
        for g in all_lie() {
            let space = (**g.space()).clone();
            let n = g.dim();
            for i in 0..n {
                for j in i..n {
                    for k in 0..n {
                        if space.degree(k) != space.degree(i) + space.degree(j)
                            || (i == j && space.degree(i) % 2 == 0)
                        {
                            continue;
                        }
                        let mut br = g.bracket_entries();
                        br.push((i, j, k, q(1)));
                        let bad = DgLie::unchecked(space.clone(), &g.differential_entries(), &br)
                            .unwrap();
                        let axioms = bad.check_axioms().holds;
                        let r = ce_bv_from_dg_lie(&bad, 4).unwrap().certify();
                        assert_eq!(axioms, r.holds(), "{:?}", r.first_failure());
                        seen_fail += usize::from(!axioms);
                    }
                }
            }
        }
        assert!(seen_fail > 0);
    }

    #[test]
    fn zero_cobracket_reduces_to_ce() {
        let b = LieBialgebraData::new(fixtures::sl2(), &[]).unwrap();
        let out = ce_bv_from_ibl(&b, 4).unwrap();
        assert!(out.involutive && out.is_bv());
        let plain = ce_bv_from_dg_lie(&fixtures::sl2(), 4).unwrap();
        for w in plain.algebra().basis_up_to(4) {
            assert!(out.bv.d().on_basis(&w).is_zero());
            assert_eq!(out.bv.delta().on_basis(&w), plain.delta().on_basis(&w));
        }
    }

    #[test]
    fn non_involutive_bialgebra_has_witness() {
        let b = non_involutive_bialgebra();
        assert!(b.check_axioms().holds);
        let defect = b.involutivity_defect();
        assert_eq!(defect, vec![(1, GradedVector::basis(1))]);
        let out = ce_bv_from_ibl(&b, 4).unwrap();
        assert!(!out.involutive);
        assert!(out.report.d_squared.holds && out.report.delta_squared.holds);
        assert!(!out.report.commute.holds);
        assert!(out.diagnostic().unwrap().contains("[Δ,d]"));
    }

    #[test]
    fn involutive_bialgebra_certifies() {
        let b = involutive_bialgebra();
        assert!(b.involutive());
        let out = ce_bv_from_ibl(&b, 4).unwrap();
        assert!(out.is_bv(), "{:?}", out.report.first_failure());
        assert!(!out.bv.d().on_basis(&SymWord(vec![0])).is_zero());
    }

    #[test]
    fn rejects_broken_cocycle() {
        let err = LieBialgebraData::from_labels(fixtures::sl2(), &[("e", "e", "f", q(1))], true)
            .unwrap_err();
        assert!(err.to_string().contains("cocycle"), "{err}");
    }

    #[test]
    fn commutation_iff_involutive() {
        let cases = [
            non_involutive_bialgebra(),
            involutive_bialgebra(),
            LieBialgebraData::new(fixtures::aff2(), &[(0, 0, 1, q(1))]).unwrap(),
            LieBialgebraData::new(fixtures::abelian2(), &[(0, 0, 1, q(1))]).unwrap(),
        ];
        for b in cases {
            let out = ce_bv_from_ibl(&b, 4).unwrap();
            assert_eq!(out.involutive, out.report.commute.holds);
        }
    }
    #[test]
    fn bidg_without_delta_matches_ce() {
        for g in all_lie() {
            let b = BiDgLieData::new(g.clone(), &[]).unwrap();
            let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
            let ce = ce_bv_from_dg_lie(&g, 4).unwrap();
            for w in bv.algebra().basis_up_to(4) {
                assert_eq!(bv.delta().on_basis(&w), ce.delta().on_basis(&w));
                assert_eq!(bv.d().on_basis(&w), ce.d().on_basis(&w));
            }
            assert!(bidg_inclusion_check(&b, &bv).holds);
        }
    }

    #[test]
    fn bidg_heis3_by_hand() {
        let b = BiDgLieData::new(fixtures::heis3(), &[]).unwrap();
        let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
        let alg = bv.algebra();
        // Δ(x·y) = Δx·y - x·Δy - {x, y} with {x, y} = z
        let xy = alg.word(&["x", "y"]).unwrap();
        assert_eq!(bv.delta().apply(&xy), alg.word(&["z"]).unwrap().scale(&q(-1)));
        let abelian = BiDgLieData::new(fixtures::abelian2(), &[]).unwrap();
        let triv = bv_from_bi_dg_lie(&abelian, 4).unwrap();
        assert!(triv.algebra().basis_up_to(4).iter().all(|w| triv.delta().on_basis(w).is_zero()));
    }

    #[test]
    fn bidg_fixture_certifies() {
        let b = bidg_fixture();
        let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
        let r = bv.certify();
        assert!(r.holds(), "{:?}", r.first_failure());
        assert!(bidg_inclusion_check(&b, &bv).holds);
        let alg = bv.algebra();
        assert!(!bv.d().apply(&alg.word(&["r"]).unwrap()).is_zero());
        assert!(!bv.delta().apply(&alg.word(&["q"]).unwrap()).is_zero());
    }

    #[test]
    fn bidg_corrupted_delta() {
        let b = bidg_fixture();
        let g = b.lie().clone();
        let sp = g.space().clone();
        let mut seen_fail = 0;
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                if sp.degree(j) != sp.degree(i) - 1 {
                    continue;
                }
                let mut entries = vec![(1, 3, q(1))];
                entries.push((i, j, q(1)));
                let bad = BiDgLieData::unchecked(g.clone(), &entries).unwrap();
                let axioms = bad.check_axioms().holds;
                let bv = bv_from_bi_dg_lie(&bad, 4).unwrap();
                let ok = bv.certify().holds() && bidg_inclusion_check(&bad, &bv).holds;
                assert_eq!(axioms, ok, "Δ{} ∋ {}", sp.label(i), sp.label(j));
                seen_fail += usize::from(!axioms);
            }
        }
        assert!(seen_fail > 0);
    }
    #[test]
    fn bar_ground_field() {
        let bv = bar_bv_from_associative(&ground_field_algebra(), 4, CoproductKind::Shuffle).unwrap();
        let ee = Elem::basis(TensorWord(vec![0, 0]));
        assert_eq!(bv.delta().apply(&ee), Elem::basis(TensorWord(vec![0])).scale(&q(-1)));
        let r = bv.certify();
        assert!(r.holds(), "{:?}", r.first_failure());
    }

    #[test]
    fn bar_dual_numbers_both_coproducts() {
        for cop in [CoproductKind::Shuffle, CoproductKind::Trivial] {
            let bv = bar_bv_from_associative(&dual_numbers(), 4, cop).unwrap();
            assert!(bv.delta().on_basis(&TensorWord(vec![1, 1])).is_zero());
            let r = bv.certify();
            assert!(r.holds(), "{:?}", r.first_failure());
        }
        let bv = bar_bv_from_associative(&dg_associative_fixture(), 4, CoproductKind::Shuffle).unwrap();
        let r = bv.certify();
        assert!(r.holds(), "{:?}", r.first_failure());
    }

    #[test]
    fn bar_nonassociative_witness() {
        let a = nonassociative_fixture();
        let assoc = a.check_axioms();
        assert!(!assoc.holds);
        assert!(assoc.witness.unwrap().contains("(u·u)·u"));
        let bv = bar_bv_from_associative(&a, 4, CoproductKind::Shuffle).unwrap();
        let r = bv.certify();
        assert!(!r.delta_squared.holds);
        assert!(r.delta_squared.witness.as_deref().unwrap().starts_with("Δ²(u⊗u⊗u)"));
    }

    /// Single-constant perturbations of the dual numbers: Δ² = 0 iff associative.
    #[test]
    fn bar_delta_squared_iff_associative() {
        let a = dual_numbers();
        let sp = (**a.space()).clone();
        let base = [(0, 0, 0, q(1)), (0, 1, 1, q(1)), (1, 0, 1, q(1))];
        let mut seen_fail = 0;
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    let mut m = base.to_vec();
                    m.push((i, j, k, q(1)));
                    let bad = AssociativeAlgebraData::unchecked(sp.clone(), &m, &[]).unwrap();
                    let assoc = bad.check_axioms().holds;
                    let bv = bar_bv_from_associative(&bad, 4, CoproductKind::Shuffle).unwrap();
                    assert_eq!(assoc, bv.certify().delta_squared.holds);
                    seen_fail += usize::from(!assoc);
                }
            }
        }
        assert!(seen_fail > 0);
    }
    fn sample_qm_elements() -> Vec<(ArtinRing, Elem<SymWord>)> {
        let b = bidg_fixture();
        let sp = b.lie().space().clone();
        let (qi, ri) = (sp.index_of("q").unwrap(), sp.index_of("r").unwrap());
        let t3 = ArtinRing::truncated_polynomial(3);
        let sq = ArtinRing::square_zero(["a", "b"]);
        vec![
            (t3.clone(), Elem::zero()),
            (t3.clone(), Elem::term(SymWord(vec![qi]), 0, 1, q(1))),
            (
                t3.clone(),
                Elem::term(SymWord(vec![qi]), 0, 1, q(2)).add(&Elem::term(SymWord(vec![ri]), 1, 2, q(-3))),
            ),
            (
                sq,
                Elem::term(SymWord(vec![qi]), 0, 1, q(1)).add(&Elem::term(SymWord(vec![ri]), 1, 2, q(5))),
            ),
        ]
    }

    #[test]
    fn qm_residual_zero_and_agreement() {
        let b = bidg_fixture();
        let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
        let t3 = ArtinRing::truncated_polynomial(3);
        assert!(qm_bidg_residual(&b, &t3, &Elem::zero()).unwrap().is_zero());
        for (ring, s) in sample_qm_elements() {
            assert!(qm_ambient_agreement(&b, &bv, &ring, &s).unwrap().holds);
            assert!(qm_mc_agreement(&b, &ring, &s, 3).unwrap().holds);
        }
        // q t: dq = 0, Δq = s, [q, q] = 0, so the residual is ħ s t
        let (_, s1) = &sample_qm_elements()[1];
        let r = qm_bidg_residual(&b, &t3, s1).unwrap();
        assert_eq!(r, Elem::term(3, 1, 1, q(1)));
    }

    #[test]
    fn qm_rejects_longer_words() {
        let b = bidg_fixture();
        let t3 = ArtinRing::truncated_polynomial(3);
        let s = Elem::term(SymWord(vec![0, 1]), 0, 1, q(1));
        assert!(matches!(qm_bidg_residual(&b, &t3, &s), Err(Error::Precondition(_))));
    }

    #[test]
    fn qm_with_odd_bracket_matches_ambient() {
        // x (1), y (2), [x, x] = y, Δ = 0: S = x t gives ½[S,S] = y t²
        let g = DgLie::from_labels(
            GradedVectorSpace::new([("x", 1), ("y", 2)]).unwrap(),
            &[],
            &[("x", "x", "y", q(1))],
            true,
        )
        .unwrap();
        let b = BiDgLieData::new(g, &[]).unwrap();
        let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
        let t3 = ArtinRing::truncated_polynomial(3);
        let s = Elem::term(SymWord(vec![0]), 0, 1, q(1));
        let r = qm_bidg_residual(&b, &t3, &s).unwrap();
        assert_eq!(r, Elem::term(1, 0, 2, Q::new(1.into(), 2.into())));
        assert!(qm_ambient_agreement(&b, &bv, &t3, &s).unwrap().holds);
        assert!(qm_mc_agreement(&b, &t3, &s, 3).unwrap().holds);
        let rep = qm_quillen_check(&b, &t3, &s, 3, 3).unwrap();
        assert!(rep.bijection_holds() && !rep.maurer_cartan.holds);
    }

    #[test]
    fn qm_quillen_on_solution() {
        let b = bidg_fixture();
        let bv = bv_from_bi_dg_lie(&b, 4).unwrap();
        let t3 = ArtinRing::truncated_polynomial(3);
        // S = q t - r ħ t: ħΔ(q t) = ħ s t cancels d(-r ħ t) = -ħ s t
        let s = Elem::term(SymWord(vec![1]), 0, 1, q(1)).add(&Elem::term(SymWord(vec![2]), 1, 1, q(-1)));
        assert!(qm_bidg_residual(&b, &t3, &s).unwrap().is_zero());
        assert!(bv.qme_residual(&t3, &s).unwrap().is_zero());
        let rep = qm_quillen_check(&b, &t3, &s, 3, 3).unwrap();
        assert!(rep.bijection_holds() && rep.maurer_cartan.holds && rep.morphism.holds);
        let bad = s.add(&Elem::term(SymWord(vec![1]), 0, 2, q(1)).add(&Elem::term(SymWord(vec![2]), 1, 1, q(1))));
        let rep = qm_quillen_check(&b, &t3, &bad, 3, 3).unwrap();
        assert!(rep.bijection_holds() && !rep.maurer_cartan.holds && !rep.morphism.holds);
    }
}
