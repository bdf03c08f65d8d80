//! dg-Lie and L∞-algebras, the (extended) Maurer–Cartan equation over Artin
//! rings, and the checks that identify its solutions with morphisms of
//! dg-coalgebras.
//!
//! An L∞-algebra on `g` is stored as a codifferential `D` on `S(g[1])` in
//! normal form. Elements of `g ⊗ R` are written either over the basis of `g`
//! (`Elem<usize>`) or as length-one words of `S(g[1])`; the coordinates agree.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::Zero;

use crate::algebra::{Ambient, Coalgebra, Elem, GradedAlgebra, Term};
use crate::conv::{dual_map_to_element, element_to_dual_map, ConvMap, Convolution};
use crate::error::{Error, Result};
use crate::graded::{GradedVector, GradedVectorSpace};
use crate::linalg::solve_columns;
use crate::report::Verdict;
use crate::ring::{ArtinRing, DualRing};
use crate::scalar::{factorial, format_rational, frac, q, sign_pow, Q};
use crate::sym::{check_codifferential, check_grouplike, SymAlgebra, SymWord, WordOperator};

/// An element of `g ⊗ k[ħ] ⊗ R` over the basis of `g`.
pub type GElem = Elem<usize>;

pub(crate) fn format_vector(space: &GradedVectorSpace, v: &GradedVector) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.iter()
        .map(|(i, c)| format!("{}*{}", format_rational(c), space.label(*i)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub(crate) fn format_gelem(space: &GradedVectorSpace, ring: &ArtinRing, x: &GElem) -> String {
    if x.is_zero() {
        return "0".into();
    }
    x.terms()
        .map(|(t, c)| {
            let mut s = format!("{}*{}", format_rational(c), space.label(t.basis));
            if t.hbar != 0 {
                s.push_str(&format!("*h^{}", t.hbar));
            }
            if t.ring != 0 {
                s.push_str(&format!("*{}", ring.label(t.ring)));
            }
            s
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A finite-dimensional dg-Lie algebra given by structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgLie {
    space: Arc<GradedVectorSpace>,
    d: BTreeMap<usize, GradedVector>,
    bracket: BTreeMap<(usize, usize), GradedVector>,
}

impl DgLie {
    /// Builds and certifies a dg-Lie algebra. `d` lists `(i, j, c)` for
    /// `d e_i ∋ c e_j`; `bracket` lists `(i, j, k, c)` for `[e_i, e_j] ∋ c e_k`,
    /// each unordered pair at most once (the other order follows by symmetry).
    pub fn new(
        space: GradedVectorSpace,
        d: &[(usize, usize, Q)],
        bracket: &[(usize, usize, usize, Q)],
    ) -> Result<Self> {
        let g = Self::unchecked(space, d, bracket)?;
        let v = g.check_axioms();
        if let Some(w) = v.witness {
            return Err(Error::axiom("dg-Lie", w));
        }
        Ok(g)
    }

    /// Like [`DgLie::new`] but only checks degrees and symmetry; used for
    /// deliberately corrupted inputs.
    pub fn unchecked(
        space: GradedVectorSpace,
        d: &[(usize, usize, Q)],
        bracket: &[(usize, usize, usize, Q)],
    ) -> Result<Self> {
        let n = space.dim();
        let check_index = |i: usize| {
            if i < n {
                Ok(())
            } else {
                Err(Error::Precondition(format!("basis index {i} out of range")))
            }
        };
        let mut dmap: BTreeMap<usize, GradedVector> = BTreeMap::new();
        for (i, j, c) in d {
            check_index(*i)?;
            check_index(*j)?;
            if space.degree(*j) != space.degree(*i) + 1 {
                return Err(Error::DegreeMismatch(format!(
                    "d({}) ∋ {} does not raise degree by one",
                    space.label(*i),
                    space.label(*j)
                )));
            }
            dmap.entry(*i).or_default().add_term(*j, c.clone());
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut table: BTreeMap<(usize, usize), GradedVector> = BTreeMap::new();
        for (i, j, k, c) in bracket {
            check_index(*i)?;
            check_index(*j)?;
            check_index(*k)?;
            let (di, dj) = (space.degree(*i), space.degree(*j));
            if space.degree(*k) != di + dj {
                return Err(Error::DegreeMismatch(format!(
                    "[{}, {}] ∋ {} has the wrong degree",
                    space.label(*i),
                    space.label(*j),
                    space.label(*k)
                )));
            }
            if i == j && di % 2 == 0 && !c.is_zero() {
                return Err(Error::Precondition(format!(
                    "[{0}, {0}] must vanish for even {0}",
                    space.label(*i)
                )));
            }
            if seen.contains(&(*j, *i)) && i != j {
                return Err(Error::Precondition(format!(
                    "bracket of {} and {} given in both orders",
                    space.label(*i),
                    space.label(*j)
                )));
            }
            seen.insert((*i, *j));
            table.entry((*i, *j)).or_default().add_term(*k, c.clone());
            if i != j {
                let s = -sign_pow(di * dj);
                table.entry((*j, *i)).or_default().add_term(*k, c * s);
            }
        }
        dmap.retain(|_, v| !v.is_zero());
        table.retain(|_, v| !v.is_zero());
        Ok(Self {
            space: Arc::new(space),
            d: dmap,
            bracket: table,
        })
    }

    /// Label-based constructor; see [`DgLie::new`].
    pub fn from_labels(
        space: GradedVectorSpace,
        d: &[(&str, &str, Q)],
        bracket: &[(&str, &str, &str, Q)],
        certify: bool,
    ) -> Result<Self> {
        let d = d
            .iter()
            .map(|(a, b, c)| Ok((space.index_of(a)?, space.index_of(b)?, c.clone())))
            .collect::<Result<Vec<_>>>()?;
        let br = bracket
            .iter()
            .map(|(a, b, k, c)| {
                Ok((
                    space.index_of(a)?,
                    space.index_of(b)?,
                    space.index_of(k)?,
                    c.clone(),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        if certify {
            Self::new(space, &d, &br)
        } else {
            Self::unchecked(space, &d, &br)
        }
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.space.degree(i)
    }

    pub fn d_basis(&self, i: usize) -> GradedVector {
        self.d.get(&i).cloned().unwrap_or_default()
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> GradedVector {
        self.bracket.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn is_differential_zero(&self) -> bool {
        self.d.is_empty()
    }

    /// Nonzero differential entries `(i, j, c)`.
    pub fn differential_entries(&self) -> Vec<(usize, usize, Q)> {
        self.d
            .iter()
            .flat_map(|(i, v)| v.iter().map(move |(j, c)| (*i, *j, c.clone())))
            .collect()
    }

    /// Bracket entries `(i, j, k, c)` with `i <= j`.
    pub fn bracket_entries(&self) -> Vec<(usize, usize, usize, Q)> {
        self.bracket
            .iter()
            .filter(|((i, j), _)| i <= j)
            .flat_map(|((i, j), v)| v.iter().map(move |(k, c)| (*i, *j, *k, c.clone())))
            .collect()
    }

    pub fn d_vec(&self, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (i, c) in v.iter() {
            out = out.add(&self.d_basis(*i).scale(c));
        }
        out
    }

    pub fn bracket_vec(&self, u: &GradedVector, v: &GradedVector) -> GradedVector {
        let mut out = GradedVector::zero();
        for (i, a) in u.iter() {
            for (j, b) in v.iter() {
                if let Some(w) = self.bracket.get(&(*i, *j)) {
                    out = out.add(&w.scale(&(a * b)));
                }
            }
        }
        out
    }

    /// `d` extended `k[ħ] ⊗ R`-linearly.
    pub fn d_elem(&self, x: &GElem) -> GElem {
        let mut out = Elem::zero();
        for (t, c) in x.terms() {
            for (j, dc) in self.d_basis(t.basis).iter() {
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

    /// The bracket extended `k[ħ] ⊗ R`-bilinearly (both are even, so no signs).
    pub fn bracket_elem(&self, ring: &ArtinRing, x: &GElem, y: &GElem) -> GElem {
        let mut out = Elem::zero();
        for (t1, c1) in x.terms() {
            for (t2, c2) in y.terms() {
                let Some(w) = self.bracket.get(&(t1.basis, t2.basis)) else {
                    continue;
                };
                for (r, rc) in ring.mul(t1.ring, t2.ring) {
                    for (k, kc) in w.iter() {
                        out.add_term(
                            Term {
                                hbar: t1.hbar + t2.hbar,
                                ring: *r,
                                basis: *k,
                            },
                            c1 * c2 * rc * kc,
                        );
                    }
                }
            }
        }
        out
    }

    /// `[x, [y, z]] - [[x, y], z] - (-1)^{|x||y|} [y, [x, z]]` on basis elements.
    pub fn jacobiator(&self, x: usize, y: usize, z: usize) -> GradedVector {
        let e = GradedVector::basis;
        let lhs = self.bracket_vec(&e(x), &self.bracket_basis(y, z));
        let a = self.bracket_vec(&self.bracket_basis(x, y), &e(z));
        let b = self
            .bracket_vec(&e(y), &self.bracket_basis(x, z))
            .scale(&sign_pow(self.degree(x) * self.degree(y)));
        lhs.add(&a.scale(&q(-1))).add(&b.scale(&q(-1)))
    }

    /// Brute-force check of `d² = 0`, the Leibniz rule and the Jacobi identity.
    pub fn check_axioms(&self) -> Verdict {
        let n = self.dim();
        let lab = |i: usize| self.space.label(i).to_string();
        for i in 0..n {
            let dd = self.d_vec(&self.d_basis(i));
            if !dd.is_zero() {
                return Verdict::fail(format!(
                    "d²({}) = {}",
                    lab(i),
                    format_vector(&self.space, &dd)
                ));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let e = GradedVector::basis;
                let lhs = self.d_vec(&self.bracket_basis(i, j));
                let rhs = self.bracket_vec(&self.d_basis(i), &e(j)).add(
                    &self
                        .bracket_vec(&e(i), &self.d_basis(j))
                        .scale(&sign_pow(self.degree(i))),
                );
                let diff = lhs.add(&rhs.scale(&q(-1)));
                if !diff.is_zero() {
                    return Verdict::fail(format!(
                        "Leibniz fails on ({}, {}): {}",
                        lab(i),
                        lab(j),
                        format_vector(&self.space, &diff)
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let jac = self.jacobiator(i, j, k);
                    if !jac.is_zero() {
                        return Verdict::fail(format!(
                            "Jacobiator({}, {}, {}) = {}",
                            lab(i),
                            lab(j),
                            lab(k),
                            format_vector(&self.space, &jac)
                        ));
                    }
                }
            }
        }
        Verdict::pass()
    }
}

/// An L∞-algebra on `g`, as a codifferential on `S(g[1])`.
#[derive(Clone, Debug)]
pub struct LInfty {
    space: Arc<GradedVectorSpace>,
    alg: Arc<SymAlgebra>,
    codiff: WordOperator,
}

impl LInfty {
    /// `codiff` is given by its corestriction on words of `S(g[1])`; it is not
    /// checked to square to zero (see [`LInfty::check`]).
    pub fn new(space: GradedVectorSpace, codiff: WordOperator) -> Result<Self> {
        let alg = Arc::new(SymAlgebra::new(space.shift(1)));
        Self::with_algebra(Arc::new(space), alg, codiff)
    }

    fn with_algebra(
        space: Arc<GradedVectorSpace>,
        alg: Arc<SymAlgebra>,
        codiff: WordOperator,
    ) -> Result<Self> {
        if codiff.degree() != 1 {
            return Err(Error::DegreeMismatch(format!(
                "codifferential has degree {}",
                codiff.degree()
            )));
        }
        if !codiff.lands_in_generators() {
            return Err(Error::Precondition(
                "brackets must take values in g[1]".into(),
            ));
        }
        if codiff.symbol().contains_key(&SymWord::empty()) {
            return Err(Error::Precondition("curvature term l_0 is not allowed".into()));
        }
        Ok(Self { space, alg, codiff })
    }

    /// `l_1 = d`, `l_2(x, y) = (-1)^{|x|} [x, y]` with `|x|` the degree in `g[1]`.
    pub fn from_dg_lie(g: &DgLie) -> Self {
        let alg = Arc::new(SymAlgebra::new(g.space.shift(1)));
        let mut codiff = WordOperator::new(1);
        let gen = |k: usize| SymWord(vec![k]);
        for (i, v) in &g.d {
            let val = Elem::from_pairs(v.iter().map(|(j, c)| (gen(*j), c.clone())));
            codiff.add(&alg, &gen(*i), &val).expect("degree checked");
        }
        for ((i, j), v) in &g.bracket {
            let Some((w, s)) = alg.normalize(&[*i, *j]) else {
                continue;
            };
            if w.0 != vec![*i, *j] {
                continue;
            }
            let sign = sign_pow(alg.generator_degree(*i)) * q(s);
            let val = Elem::from_pairs(v.iter().map(|(k, c)| (gen(*k), c * &sign)));
            codiff.add(&alg, &w, &val).expect("degree checked");
        }
        Self {
            space: g.space.clone(),
            alg,
            codiff,
        }
    }

    pub fn space(&self) -> &Arc<GradedVectorSpace> {
        &self.space
    }

    /// `S(g[1])`.
    pub fn shifted_algebra(&self) -> &Arc<SymAlgebra> {
        &self.alg
    }

    pub fn codifferential(&self) -> &WordOperator {
        &self.codiff
    }

    pub fn bracket(&self, n: usize) -> WordOperator {
        self.codiff.component(n)
    }

    pub fn max_arity(&self) -> usize {
        self.codiff.arities().last().copied().unwrap_or(0)
    }

    /// `D² = 0` on words of length at most `n`.
    pub fn check(&self, n: usize) -> Verdict {
        check_codifferential(&self.alg, &self.codiff, n)
    }

    /// Elements of `g ⊗ R` as length-one words and back.
    pub fn to_shifted(&self, x: &GElem) -> Elem<SymWord> {
        x.map_basis(|i| SymWord(vec![*i]))
    }

    pub fn from_shifted(&self, x: &Elem<SymWord>) -> Result<GElem> {
        let mut out = Elem::zero();
        for (t, c) in x.terms() {
            if t.basis.len() != 1 {
                return Err(Error::Precondition(format!(
                    "{} is not a generator",
                    self.alg.label(&t.basis)
                )));
            }
            out.add_term(
                Term {
                    hbar: t.hbar,
                    ring: t.ring,
                    basis: t.basis.0[0],
                },
                c.clone(),
            );
        }
        Ok(out)
    }

    /// `l_n(x_1, ..., x_n)` for elements of `g[1] ⊗ R`.
    pub fn l(&self, ring: &ArtinRing, args: &[Elem<SymWord>]) -> Elem<SymWord> {
        let amb = Ambient::new(self.alg.as_ref(), ring);
        let mut prod = amb.one();
        for a in args {
            prod = amb.mul(&prod, a);
        }
        let op = self.bracket(args.len()).to_operator(&self.alg);
        op.apply(&prod).filter(|t| t.basis.len() == 1)
    }

    /// Checks that `S` is a degree-one element of `g ⊗ m`.
    pub fn validate_mc_element(&self, s: &Elem<SymWord>) -> Result<()> {
        for (t, _) in s.terms() {
            if t.basis.len() != 1 || t.hbar != 0 {
                return Err(Error::Precondition(format!(
                    "{} is not an element of g ⊗ m",
                    self.alg.label(&t.basis)
                )));
            }
            if t.ring == 0 {
                return Err(Error::Precondition(
                    "coefficients must lie in the maximal ideal".into(),
                ));
            }
            if self.alg.word_degree(&t.basis) != 0 {
                return Err(Error::DegreeMismatch(format!(
                    "{} has degree {} in g, expected 1",
                    self.alg.label(&t.basis),
                    self.alg.word_degree(&t.basis) + 1
                )));
            }
        }
        Ok(())
    }

    /// `Σ_{n≥1} l_n(S, ..., S) / n!`, finite because `m` is nilpotent.
    pub fn emce_residual(&self, ring: &ArtinRing, s: &Elem<SymWord>) -> Result<Elem<SymWord>> {
        self.validate_mc_element(s)?;
        Ok(self.emce_unchecked(ring, s))
    }

    fn emce_unchecked(&self, ring: &ArtinRing, s: &Elem<SymWord>) -> Elem<SymWord> {
        let amb = Ambient::new(self.alg.as_ref(), ring);
        let op = self.codiff.to_operator(&self.alg);
        let mut out = Elem::zero();
        let mut power = amb.one();
        for n in 1.. {
            power = amb.mul(&power, s);
            if power.is_zero() {
                break;
            }
            let ln = op.apply(&power).filter(|t| t.basis.len() == 1);
            out.add_scaled(&ln, &(Q::from_integer(1.into()) / factorial(n)));
        }
        out
    }

    pub fn mc_is_solution(&self, ring: &ArtinRing, s: &Elem<SymWord>) -> Result<bool> {
        Ok(self.emce_residual(ring, s)?.is_zero())
    }

    pub fn format(&self, ring: &ArtinRing, x: &Elem<SymWord>) -> String {
        Ambient::new(self.alg.as_ref(), ring).format(x)
    }
}

/// Outcome of comparing the Maurer–Cartan equation with the coalgebra
/// morphism condition for `exp(S): R* -> S(g[1])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuillenReport {
    /// `Σ l_n(S^n)/n! = 0`.
    pub maurer_cartan: Verdict,
    /// `exp(S)` is grouplike and `D ∘ exp(S) = 0`.
    pub morphism: Verdict,
    /// `D(exp S) = (Σ l_n(S^n)/n!) · exp S`.
    pub projection_identity: Verdict,
}

impl QuillenReport {
    pub fn bijection_holds(&self) -> bool {
        self.maurer_cartan.holds == self.morphism.holds && self.projection_identity.holds
    }
}

/// Checks that `F ∈ S(g[1]) ⊗ R`, read as a map `R* -> S(g[1])`, is a morphism
/// of coaugmented dg-coalgebras `(R*, 0) -> (S(g[1]), D)`.
pub fn dg_coalgebra_morphism_check(l: &LInfty, ring: &ArtinRing, f: &Elem<SymWord>) -> Verdict {
    let amb = Ambient::new(l.alg.as_ref(), ring);
    let grouplike = check_grouplike(&amb, f);
    if !grouplike.holds {
        return grouplike;
    }
    let df = l.codiff.to_operator(&l.alg).apply(f);
    Verdict::from_bool(df.is_zero(), || format!("D∘exp(S) = {}", amb.format(&df)))
}

/// Compares `S ∈ MC_g(R)` with `exp(S)` being a dg-coalgebra morphism. The
/// exponential is the convolution exponential in `Hom(R*, S(g[1]))`; words of
/// length up to `word_length` are certified, which must reach the nilpotency
/// order of `m`.
pub fn quillen_bijection_check(
    l: &LInfty,
    ring: &ArtinRing,
    s: &Elem<SymWord>,
    word_length: usize,
) -> Result<QuillenReport> {
    if word_length < ring.nilpotency() {
        return Err(Error::Truncation(format!(
            "word length {} is below the nilpotency order {} of m; exp(S) would be cut",
            word_length,
            ring.nilpotency()
        )));
    }
    let residual = l.emce_residual(ring, s)?;
    let f = convolution_exp(l.alg.as_ref(), ring, s)?;
    let amb = Ambient::new(l.alg.as_ref(), ring);
    let maurer_cartan = Verdict::from_bool(residual.is_zero(), || {
        format!("Σ l_n(S^n)/n! = {}", amb.format(&residual))
    });
    let morphism = dg_coalgebra_morphism_check(l, ring, &f);
    let df = l.codiff.to_operator(&l.alg).apply(&f);
    let rhs = amb.mul(&residual, &f);
    let projection_identity = Verdict::from_bool(df == rhs, || {
        format!("D(exp S) - res·exp S = {}", amb.format(&df.sub(&rhs)))
    });
    Ok(QuillenReport {
        maurer_cartan,
        morphism,
        projection_identity,
    })
}

/// `exp(S)` in `Hom(R*, A)` with the convolution product, returned as an
/// element of `A ⊗ R`.
pub fn convolution_exp(alg: &SymAlgebra, ring: &ArtinRing, s: &Elem<SymWord>) -> Result<Elem<SymWord>> {
    let dual = DualRing::new(ring.clone());
    let ground = ArtinRing::ground();
    let conv = Convolution::new(&dual, Ambient::new(alg, &ground), ring.nilpotency());
    let f = element_to_dual_map(s);
    Ok(dual_map_to_element(&conv.exp(&f)?))
}

/// The truncated dg-Lie algebra `Coder(S(h[1]))` of coderivations with
/// components of arity at most `max_len`, for a Lie algebra `h` in degree 0.
///
/// Its basis element `w → e` is the corestriction sending the word `w` to the
/// generator `e`; the bracket is the commutator of coderivations and the
/// differential is `[Q, -]` with `Q = -[-, -]` on `S²(h[1])`.
pub struct CoderivationAlgebra {
    pub h: DgLie,
    pub h_alg: Arc<SymAlgebra>,
    pub max_len: usize,
    pub basis: Vec<(SymWord, usize)>,
    pub lie: DgLie,
    q: WordOperator,
}

impl CoderivationAlgebra {
    pub fn new(h: &DgLie, max_len: usize) -> Result<Self> {
        if (0..h.dim()).any(|i| h.degree(i) != 0) || !h.is_differential_zero() {
            return Err(Error::Precondition(
                "the coderivation algebra is built for an ordinary Lie algebra".into(),
            ));
        }
        if max_len < 2 {
            return Err(Error::Truncation("need words of length at least 2".into()));
        }
        let hl = LInfty::from_dg_lie(h);
        let h_alg = hl.alg.clone();
        let mut basis = Vec::new();
        let mut labels = Vec::new();
        for w in h_alg.basis_up_to(max_len) {
            if w.is_empty() {
                continue;
            }
            for e in 0..h.dim() {
                let deg = h_alg.generator_degree(e) - h_alg.word_degree(&w);
                labels.push((format!("{}→{}", h_alg.label(&w), h.space.label(e)), deg));
                basis.push((w.clone(), e));
            }
        }
        let space = GradedVectorSpace::new(labels)?;
        let index: BTreeMap<(SymWord, usize), usize> =
            basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let ops: Vec<WordOperator> = basis
            .iter()
            .map(|(w, e)| {
                let mut op = WordOperator::new(h_alg.generator_degree(*e) - h_alg.word_degree(w));
                op.add(&h_alg, w, &Elem::basis(SymWord(vec![*e])))
                    .expect("degree by construction");
                op
            })
            .collect();
        let mut bracket = Vec::new();
        for a in 0..basis.len() {
            for b in a..basis.len() {
                let c = coderivation_bracket(&h_alg, &ops[a], &ops[b], max_len);
                for (w, v) in c.symbol() {
                    for (t, coef) in v.terms() {
                        let k = index[&(w.clone(), t.basis.0[0])];
                        bracket.push((a, b, k, coef.clone()));
                    }
                }
            }
        }
        let q_op = hl.codiff.clone();
        let q_vec = Self::vector_of(&index, &q_op);
        let mut d = Vec::new();
        for (a, op) in ops.iter().enumerate() {
            let mut c = WordOperator::new(op.degree() + 1);
            for (qi, qc) in q_vec.iter() {
                c = c.plus(&coderivation_bracket(&h_alg, &ops[*qi], op, max_len).scaled(qc));
            }
            for (w, v) in c.symbol() {
                for (t, coef) in v.terms() {
                    d.push((a, index[&(w.clone(), t.basis.0[0])], coef.clone()));
                }
            }
        }
        let lie = DgLie::new(space, &d, &bracket)?;
        Ok(Self {
            h: h.clone(),
            h_alg,
            max_len,
            basis,
            lie,
            q: q_op,
        })
    }

    fn vector_of(index: &BTreeMap<(SymWord, usize), usize>, op: &WordOperator) -> GradedVector {
        let mut v = GradedVector::zero();
        for (w, val) in op.symbol() {
            for (t, c) in val.terms() {
                v.add_term(index[&(w.clone(), t.basis.0[0])], c.clone());
            }
        }
        v
    }

    pub fn index_of(&self, w: &SymWord, e: usize) -> Option<usize> {
        self.basis.iter().position(|(w2, e2)| w2 == w && *e2 == e)
    }

    /// The element `Q = -[-, -]`.
    pub fn q_element(&self) -> GElem {
        let index: BTreeMap<(SymWord, usize), usize> =
            self.basis.iter().cloned().enumerate().map(|(i, b)| (b, i)).collect();
        let v = Self::vector_of(&index, &self.q);
        Elem::from_pairs(v.iter().map(|(i, c)| (*i, c.clone())))
    }

    /// The deformed bracket `[x, y]' = [x, y] + S(x, y)` on `h ⊗ R` encoded by
    /// `S ∈ g¹ ⊗ m`, where `Q + S` is the deformed codifferential.
    pub fn deformed_bracket(&self, s: &GElem) -> Result<BTreeMap<(usize, usize), GElem>> {
        let mut table: BTreeMap<(usize, usize), GElem> = BTreeMap::new();
        for i in 0..self.h.dim() {
            for j in 0..self.h.dim() {
                let v = self.h.bracket_basis(i, j);
                let e = Elem::from_pairs(v.iter().map(|(k, c)| (*k, c.clone())));
                if !e.is_zero() {
                    table.insert((i, j), e);
                }
            }
        }
        for (t, c) in s.terms() {
            let (w, e) = &self.basis[t.basis];
            if w.len() != 2 {
                return Err(Error::Precondition(format!(
                    "deformation component {} is not binary",
                    self.lie.space.label(t.basis)
                )));
            }
            let (i, j) = (w.0[0], w.0[1]);
            let term = Elem::term(*e, t.hbar, t.ring, -c.clone());
            table.entry((i, j)).or_default().add_assign(&term);
            if i != j {
                table.entry((j, i)).or_default().add_assign(&term.neg());
            }
        }
        table.retain(|_, v| !v.is_zero());
        Ok(table)
    }
}

/// Corestriction of `[f, g] = f ∘ ĝ - (-1)^{|f||g|} g ∘ f̂` on words up to `max_len`.
pub fn coderivation_bracket(
    alg: &SymAlgebra,
    f: &WordOperator,
    g: &WordOperator,
    max_len: usize,
) -> WordOperator {
    let sign = sign_pow(f.degree() * g.degree());
    let mut out = WordOperator::new(f.degree() + g.degree());
    let mut touched: Vec<SymWord> = Vec::new();
    let fa = f.arities();
    let ga = g.arities();
    for a in &fa {
        for b in &ga {
            let len = a + b - 1;
            if len <= max_len {
                touched.extend(alg.basis_up_to(len).into_iter().filter(|w| w.len() == len));
            }
        }
    }
    touched.sort();
    touched.dedup();
    for w in touched {
        let mut v = Elem::zero();
        for (t, c) in g.extend(alg, &w).terms() {
            v.add_scaled(&f.value(&t.basis), c);
        }
        for (t, c) in f.extend(alg, &w).terms() {
            v.add_scaled(&g.value(&t.basis), &(c * &sign * q(-1)));
        }
        if !v.is_zero() {
            out.add(alg, &w, &v).expect("degree of a bracket");
        }
    }
    out
}

/// Jacobi identity for the deformed bracket and the Maurer–Cartan equation for
/// the corresponding `S`, which must agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationReport {
    pub jacobi: Verdict,
    pub maurer_cartan: Verdict,
}

impl DeformationReport {
    pub fn agree(&self) -> bool {
        self.jacobi.holds == self.maurer_cartan.holds
    }
}

pub fn deformed_bracket_check(
    coder: &CoderivationAlgebra,
    ring: &ArtinRing,
    s: &GElem,
) -> Result<DeformationReport> {
    let table = coder.deformed_bracket(s)?;
    let n = coder.h.dim();
    let br = |x: &GElem, y: &GElem| -> GElem {
        let mut out = Elem::zero();
        for (t1, c1) in x.terms() {
            for (t2, c2) in y.terms() {
                let Some(v) = table.get(&(t1.basis, t2.basis)) else {
                    continue;
                };
                for (t3, c3) in v.terms() {
                    for (r, rc) in ring.mul(t1.ring, t2.ring) {
                        for (r2, rc2) in ring.mul(*r, t3.ring) {
                            out.add_term(
                                Term {
                                    hbar: t1.hbar + t2.hbar + t3.hbar,
                                    ring: *r2,
                                    basis: t3.basis,
                                },
                                c1 * c2 * c3 * rc * rc2,
                            );
                        }
                    }
                }
            }
        }
        out
    };
    let mut jacobi = Verdict::pass();
    'outer: for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (x, y, z) = (Elem::basis(i), Elem::basis(j), Elem::basis(k));
                let jac = br(&x, &br(&y, &z))
                    .add(&br(&y, &br(&z, &x)))
                    .add(&br(&z, &br(&x, &y)));
                if !jac.is_zero() {
                    let sp = coder.h.space.clone();
                    jacobi = Verdict::fail(format!(
                        "deformed Jacobiator({}, {}, {}) = {}",
                        sp.label(i),
                        sp.label(j),
                        sp.label(k),
                        format_gelem(&sp, ring, &jac)
                    ));
                    break 'outer;
                }
            }
        }
    }
    let l = LInfty::from_dg_lie(&coder.lie);
    let res = l.emce_residual(ring, &l.to_shifted(s))?;
    let maurer_cartan = Verdict::from_bool(res.is_zero(), || {
        format!("dS + ½[S,S] = {}", l.format(ring, &res))
    });
    Ok(DeformationReport {
        jacobi,
        maurer_cartan,
    })
}

/// `DS + ½[S, S]` in the convolution dg-Lie algebra `hom(S(g'[1]), g)`,
/// evaluated on words of `S(g'[1])` up to `max_len`.
///
/// `S` sends words of `S^{>0}(g'[1])` to `g`, with `|S(w)| = |w| + 1`. The
/// differential is `DS = d ∘ S - S ∘ D'`, the standard one on
/// `hom(S(g'[1]), g[1])` transported along the identity on coordinates, and
/// `[S, T](w) = Σ (-1)^{|T||w'|} [S(w'), T(w'')]`.
pub fn chuang_lazarev_residual(
    g: &DgLie,
    source: &LInfty,
    s: &ConvMap<SymWord, usize>,
    max_len: usize,
) -> Result<ConvMap<SymWord, usize>> {
    let alg = source.alg.clone();
    for (w, v) in s.iter() {
        if w.is_empty() {
            return Err(Error::Precondition("S must vanish on the unit word".into()));
        }
        for (t, _) in v.terms() {
            if g.degree(t.basis) != alg.word_degree(w) + 1 || t.hbar != 0 || t.ring != 0 {
                return Err(Error::DegreeMismatch(format!(
                    "S({}) ∋ {} has the wrong degree",
                    alg.label(w),
                    g.space.label(t.basis)
                )));
            }
        }
    }
    let ground = ArtinRing::ground();
    let dprime = source.codiff.to_operator(&alg);
    let mut out = ConvMap::zero();
    for w in alg.basis_up_to(max_len) {
        if w.is_empty() {
            continue;
        }
        let mut v = g.d_elem(&s.get(&w));
        for (t, c) in dprime.on_basis(&w).terms() {
            v.add_scaled(&s.get(&t.basis), &-c.clone());
        }
        for (w1, w2, c) in alg.coproduct(&w) {
            if w1.is_empty() || w2.is_empty() {
                continue;
            }
            let b = g.bracket_elem(&ground, &s.get(&w1), &s.get(&w2));
            v.add_scaled(&b, &(c * sign_pow(alg.word_degree(&w1)) * frac(1, 2)));
        }
        out.set(w, v);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChuangLazarevReport {
    pub maurer_cartan: Verdict,
    pub morphism: Verdict,
}

impl ChuangLazarevReport {
    pub fn bijection_holds(&self) -> bool {
        self.maurer_cartan.holds == self.morphism.holds
    }
}

/// Compares the Maurer–Cartan equation in `hom(S(g'[1]), g)` with the induced
/// coalgebra map `exp(S): S(g'[1]) -> S(g[1])` commuting with codifferentials.
pub fn chuang_lazarev_check(
    g: &DgLie,
    source: &LInfty,
    s: &ConvMap<SymWord, usize>,
    max_len: usize,
) -> Result<ChuangLazarevReport> {
    let residual = chuang_lazarev_residual(g, source, s, max_len)?;
    let maurer_cartan = match residual.iter().next() {
        None => Verdict::pass(),
        Some((w, v)) => Verdict::fail(format!(
            "(DS + ½[S,S])({}) = {}",
            source.alg.label(w),
            format_gelem(&g.space, &ArtinRing::ground(), v)
        )),
    };
    let target = LInfty::from_dg_lie(g);
    let ground = ArtinRing::ground();
    let conv = Convolution::new(
        source.alg.as_ref(),
        Ambient::new(target.alg.as_ref(), &ground),
        max_len,
    );
    let mut corestriction = ConvMap::zero();
    for (w, v) in s.iter() {
        corestriction.set(w.clone(), v.map_basis(|i| SymWord(vec![*i])));
    }
    let f = conv.exp(&corestriction)?;
    let lhs = conv.post_compose(&target.codiff.to_operator(&target.alg), &f);
    let rhs = conv.pre_compose(&f, &source.codiff.to_operator(&source.alg));
    let morphism = match lhs.first_difference(&rhs) {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(format!(
            "D∘F ≠ F∘D' on {}: {} vs {}",
            source.alg.label(&w),
            Ambient::new(target.alg.as_ref(), &ground).format(&lhs.get(&w)),
            Ambient::new(target.alg.as_ref(), &ground).format(&rhs.get(&w))
        )),
    };
    Ok(ChuangLazarevReport {
        maurer_cartan,
        morphism,
    })
}

/// Result of the order-by-order Maurer–Cartan solver.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum McOutcome {
    Solved(Elem<SymWord>),
    Obstructed(McObstruction),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct McObstruction {
    /// m-adic order at which lifting failed.
    pub order: usize,
    /// Ring basis element whose component could not be killed.
    pub ring_element: usize,
    /// The lift through order `order - 1`.
    pub partial: Elem<SymWord>,
    /// `Σ l_n(S^n)/n!` of the partial lift.
    pub residual: Elem<SymWord>,
}

/// Lifts a first-order seed `S_1 ∈ g¹ ⊗ m/m²` with `l_1 S_1 = 0` order by
/// order along the m-adic filtration, solving `l_1 S_k = -(residual)_k`
/// exactly. Free variables are set to zero, so each correction is supported on
/// the leftmost pivot columns of `l_1: g¹ -> g²`.
pub fn mc_solve_perturbative(l: &LInfty, ring: &ArtinRing, seed: &Elem<SymWord>) -> Result<McOutcome> {
    l.validate_mc_element(seed)?;
    if let Some((t, _)) = seed.terms().find(|(t, _)| ring.order(t.ring) != 1) {
        return Err(Error::Precondition(format!(
            "seed has a component on {} outside m/m²",
            ring.label(t.ring)
        )));
    }
    let op = l.codiff.to_operator(&l.alg);
    let l1_seed = op.apply(seed).filter(|t| t.basis.len() == 1);
    if !l1_seed.is_zero() {
        return Err(Error::Precondition(format!(
            "seed is not l_1-closed: l_1(S_1) = {}",
            l.format(ring, &l1_seed)
        )));
    }
    let alg = l.alg.as_ref();
    let unknowns: Vec<usize> = (0..alg.space().dim())
        .filter(|&i| alg.generator_degree(i) == 0)
        .collect();
    let rows: Vec<usize> = (0..alg.space().dim())
        .filter(|&i| alg.generator_degree(i) == 1)
        .collect();
    let columns: Vec<Vec<Q>> = unknowns
        .iter()
        .map(|&j| {
            let img = op.on_basis(&SymWord(vec![j]));
            rows.iter()
                .map(|&r| img.coeff(&Term {
                    hbar: 0,
                    ring: 0,
                    basis: SymWord(vec![r]),
                }))
                .collect()
        })
        .collect();
    let mut s = seed.clone();
    for k in 2..ring.nilpotency() {
        let residual = l.emce_unchecked(ring, &s);
        for b in (0..ring.dim()).filter(|&b| ring.order(b) == k) {
            let rb = residual.ring_coefficient(b);
            let rhs: Vec<Q> = rows
                .iter()
                .map(|&r| {
                    -rb.coeff(&Term {
                        hbar: 0,
                        ring: 0,
                        basis: SymWord(vec![r]),
                    })
                })
                .collect();
            let solution = if rhs.iter().all(|c| c.is_zero()) {
                Some(vec![Q::zero(); unknowns.len()])
            } else {
                solve_columns(&columns, &rhs)
            };
            let Some(x) = solution else {
                return Ok(McOutcome::Obstructed(McObstruction {
                    order: k,
                    ring_element: b,
                    partial: s,
                    residual,
                }));
            };
            for (j, c) in unknowns.iter().zip(x) {
                s.add_term(
                    Term {
                        hbar: 0,
                        ring: b,
                        basis: SymWord(vec![*j]),
                    },
                    c,
                );
            }
        }
    }
    let check = l.emce_unchecked(ring, &s);
    if !check.is_zero() {
        return Err(Error::axiom(
            "Maurer–Cartan lift",
            format!("lifted element has residual {}", l.format(ring, &check)),
        ));
    }
    Ok(McOutcome::Solved(s))
}
