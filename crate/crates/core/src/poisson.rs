//! Polynomial multivector fields on `k^n`, the Schouten bracket and the
//! divergence of the standard volume form, and the unimodular Poisson check
//! `[S0, S0] = 0`, `Δ(S0) + [S1, S0] = 0`.
//!
//! A multivector field is a polynomial in even coordinates `x_i` and odd
//! symbols `ξ_i = ∂/∂x_i` of degree 1. The Schouten bracket is computed twice:
//! directly by the odd Poisson bracket formula on superpolynomials, and as the
//! antibracket of `Δ = Σ ∂²/∂x_i∂ξ_i` on the symmetric algebra of
//! `span(x_i, ξ_i)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::{One, Zero};

use crate::algebra::{Ambient, Elem, Operator};
use crate::bv::antibracket;
use crate::error::{Error, Result};
use crate::graded::GradedVectorSpace;
use crate::report::Verdict;
use crate::ring::ArtinRing;
use crate::scalar::{format_rational, q, Q};
use crate::sym::{SymAlgebra, SymWord, WordOperator};

pub const MAX_DIM: usize = 3;
pub const MAX_POLY_DEGREE: u32 = 3;

/// `x^α ξ_S` with `S` strictly increasing.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Monomial {
    pub powers: Vec<u32>,
    pub odd: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polyvector {
    dim: usize,
    terms: BTreeMap<Monomial, Q>,
}

fn merge_sign(a: &[usize], b: &[usize]) -> Option<(Vec<usize>, i64)> {
    // sign of sorting the concatenation a ++ b of two increasing lists
    let mut inversions = 0usize;
    for x in a {
        if b.contains(x) {
            return None;
        }
        inversions += b.iter().filter(|y| *y < x).count();
    }
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    Some((out, if inversions % 2 == 0 { 1 } else { -1 }))
}

impl Polyvector {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Q) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], vec![], c);
        p
    }

    pub fn x(dim: usize, i: usize) -> Self {
        let mut powers = vec![0; dim];
        powers[i] = 1;
        let mut p = Self::zero(dim);
        p.add_term(powers, vec![], Q::one());
        p
    }

    pub fn xi(dim: usize, i: usize) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], vec![i], Q::one());
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add_term(&mut self, powers: Vec<u32>, odd: Vec<usize>, c: Q) {
        if c.is_zero() {
            return;
        }
        let m = Monomial { powers, odd };
        let e = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.powers.clone(), m.odd.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(m.powers.clone(), m.odd.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let Some((odd, s)) = merge_sign(&m1.odd, &m2.odd) else {
                    continue;
                };
                let powers = m1.powers.iter().zip(&m2.powers).map(|(a, b)| a + b).collect();
                out.add_term(powers, odd, c1 * c2 * q(s));
            }
        }
        out
    }

    /// The multivector degree, if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|m| m.odd.len());
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn poly_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.powers.iter().sum()).max().unwrap_or(0)
    }

    pub fn d_x(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if m.powers[i] == 0 {
                continue;
            }
            let mut p = m.powers.clone();
            p[i] -= 1;
            out.add_term(p, m.odd.clone(), c * q(m.powers[i] as i64));
        }
        out
    }

    /// Left derivative: `ξ_i` is first moved to the front.
    pub fn d_xi_left(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some(pos) = m.odd.iter().position(|&j| j == i) {
                let mut odd = m.odd.clone();
                odd.remove(pos);
                out.add_term(m.powers.clone(), odd, if pos % 2 == 0 { c.clone() } else { -c });
            }
        }
        out
    }

    /// Right derivative: `ξ_i` is first moved to the end.
    pub fn d_xi_right(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            if let Some(pos) = m.odd.iter().position(|&j| j == i) {
                let after = m.odd.len() - 1 - pos;
                let mut odd = m.odd.clone();
                odd.remove(pos);
                out.add_term(m.powers.clone(), odd, if after % 2 == 0 { c.clone() } else { -c });
            }
        }
        out
    }

    /// Divergence with respect to `dx_1 ∧ ... ∧ dx_n`: `Σ ∂_{x_i} ∂_{ξ_i}`.
    pub fn divergence(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            out = out.add(&self.d_xi_left(i).d_x(i));
        }
        out
    }

    /// Schouten bracket as the odd Poisson bracket
    /// `[P, Q] = Σ_i (P ∂⃖_{x_i})(∂_{ξ_i} Q) - (P ∂⃖_{ξ_i})(∂_{x_i} Q)`.
    pub fn schouten(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            out = out
                .add(&self.d_x(i).mul(&other.d_xi_left(i)))
                .add(&self.d_xi_right(i).mul(&other.d_x(i)).scale(&-Q::one()));
        }
        out
    }

    /// Parses sums of products such as `z*d_x*d_y - 2*x^2*d_z`; coordinates are
    /// `x, y, z` and `d_x, d_y, d_z` are the odd symbols.
    pub fn parse(dim: usize, s: &str) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::Precondition(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        let names = ["x", "y", "z"];
        let mut out = Self::zero(dim);
        let cleaned = s.replace(' ', "").replace("+-", "-");
        if cleaned.is_empty() || cleaned == "0" {
            return Ok(out);
        }
        let mut summands = Vec::new();
        let mut cur = String::new();
        for ch in cleaned.chars() {
            if (ch == '+' || ch == '-') && !cur.is_empty() && !cur.ends_with('^') {
                summands.push(std::mem::take(&mut cur));
            }
            cur.push(ch);
        }
        summands.push(cur);
        for summand in summands {
            let (sign, body) = match summand.strip_prefix('-') {
                Some(b) => (-Q::one(), b),
                None => (Q::one(), summand.strip_prefix('+').unwrap_or(&summand)),
            };
            let mut p = Self::constant(dim, sign);
            for factor in body.split('*') {
                let f = if let Some(name) = factor.strip_prefix("d_") {
                    let i = names[..dim]
                        .iter()
                        .position(|n| *n == name)
                        .ok_or_else(|| Error::UnknownLabel(factor.into()))?;
                    Self::xi(dim, i)
                } else if let Some(i) = names[..dim].iter().position(|n| factor.split('^').next() == Some(*n)) {
                    let e: u32 = match factor.split_once('^') {
                        Some((_, e)) => e.parse().map_err(|_| Error::UnknownLabel(factor.into()))?,
                        None => 1,
                    };
                    let mut powers = vec![0; dim];
                    powers[i] = e;
                    let mut m = Self::zero(dim);
                    m.add_term(powers, vec![], Q::one());
                    m
                } else {
                    Self::constant(dim, crate::scalar::parse_rational(factor)?)
                };
                p = p.mul(&f);
            }
            out = out.add(&p);
        }
        Ok(out)
    }
}

impl fmt::Display for Polyvector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let names = ["x", "y", "z"];
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut s = format_rational(c);
                for (i, p) in m.powers.iter().enumerate() {
                    match p {
                        0 => {}
                        1 => s.push_str(&format!("*{}", names[i])),
                        _ => s.push_str(&format!("*{}^{}", names[i], p)),
                    }
                }
                for i in &m.odd {
                    s.push_str(&format!("*d_{}", names[*i]));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The symmetric algebra on `x_i` (degree 0) and `ξ_i` (degree 1) with the
/// divergence as a BV operator.
pub struct PolyvectorBv {
    dim: usize,
    alg: Arc<SymAlgebra>,
    delta: Operator<SymWord>,
}

impl PolyvectorBv {
    pub fn new(dim: usize) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::Precondition(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        let names = ["x", "y", "z"];
        let mut basis: Vec<(String, i64)> = (0..dim).map(|i| (names[i].to_string(), 0)).collect();
        basis.extend((0..dim).map(|i| (format!("d_{}", names[i]), 1)));
        let alg = Arc::new(SymAlgebra::new(GradedVectorSpace::new(basis)?));
        let mut sym = WordOperator::new(-1);
        for i in 0..dim {
            sym.add_unordered(&alg, &[i, dim + i], &Elem::basis(SymWord::empty()))?;
        }
        let delta = sym.to_operator(&alg);
        Ok(Self { dim, alg, delta })
    }

    pub fn algebra(&self) -> &Arc<SymAlgebra> {
        &self.alg
    }

    pub fn delta(&self) -> &Operator<SymWord> {
        &self.delta
    }

    pub fn to_sym(&self, p: &Polyvector) -> Elem<SymWord> {
        let mut out = Elem::zero();
        for (m, c) in p.terms() {
            let mut factors = Vec::new();
            for (i, e) in m.powers.iter().enumerate() {
                factors.extend(std::iter::repeat(i).take(*e as usize));
            }
            factors.extend(m.odd.iter().map(|i| self.dim + i));
            if let Some((w, s)) = self.alg.normalize(&factors) {
                out.add_scaled(&Elem::basis(w), &(c * q(s)));
            }
        }
        out
    }

    pub fn schouten(&self, a: &Polyvector, b: &Polyvector) -> Elem<SymWord> {
        let ground = ArtinRing::ground();
        let amb = Ambient::new(self.alg.as_ref(), &ground);
        antibracket(&amb, &self.delta, &self.to_sym(a), &self.to_sym(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonReport {
    /// `[S0, S0] = 0`.
    pub poisson: Verdict,
    /// `Δ(S0) + [S1, S0] = 0`.
    pub unimodular: Verdict,
    /// The second Schouten path gives the same brackets and divergence.
    pub cross_validated: bool,
}

impl PoissonReport {
    pub fn holds(&self) -> bool {
        self.poisson.holds && self.unimodular.holds
    }
}

/// Checks that `S0` (a bivector field) and `S1` (a function) define a
/// unimodular Poisson structure, cross-validating every bracket through the
/// BV antibracket path.
pub fn unimodular_poisson_check(s0: &Polyvector, s1: &Polyvector) -> Result<PoissonReport> {
    let dim = s0.dim();
    if s1.dim() != dim {
        return Err(Error::SpaceMismatch("S0 and S1 live in different dimensions".into()));
    }
    if s0.poly_degree() > MAX_POLY_DEGREE || s1.poly_degree() > MAX_POLY_DEGREE {
        return Err(Error::Precondition(format!(
            "polynomial degree above {MAX_POLY_DEGREE}"
        )));
    }
    if s0.degree().is_some_and(|d| d != 2) {
        return Err(Error::DegreeMismatch("S0 must be a bivector field".into()));
    }
    if s1.degree().is_some_and(|d| d != 0) {
        return Err(Error::DegreeMismatch("S1 must be a function".into()));
    }
    let bv = PolyvectorBv::new(dim)?;
    let jac = s0.schouten(s0);
    let uni = s0.divergence().add(&s1.schouten(s0));
    let jac2 = bv.schouten(s0, s0);
    let uni2 = bv.delta().apply(&bv.to_sym(s0)).add(&bv.schouten(s1, s0));
    let cross_validated = bv.to_sym(&jac) == jac2 && bv.to_sym(&uni) == uni2;
    Ok(PoissonReport {
        poisson: Verdict::from_bool(jac.is_zero(), || format!("[S0, S0] = {jac}")),
        unimodular: Verdict::from_bool(uni.is_zero(), || format!("Δ(S0) + [S1, S0] = {uni}")),
        cross_validated,
    })
}

/// Named examples with their expected outcome.
pub fn examples() -> Vec<(&'static str, Polyvector, Polyvector, bool)> {
    let p = |dim, s: &str| Polyvector::parse(dim, s).expect("example parses");
    vec![
        ("zero", p(2, "0"), p(2, "0"), true),
        ("symplectic-plane", p(2, "d_x*d_y"), p(2, "0"), true),
        ("heis3-coadjoint", p(3, "z*d_x*d_y"), p(3, "0"), true),
        ("aff2-coadjoint", p(2, "y*d_x*d_y"), p(2, "0"), false),
    ]
}
