use std::fmt;
use std::path::Path;
use std::sync::OnceLock;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;

use qdt_core::bv::{derived_brackets_linfty_check, qme_solve_perturbative, QmeOutcome};
use qdt_core::constructions::{
    bar_bv_from_associative, bidg_inclusion_check, bv_from_bi_dg_lie, ce_bv_from_dg_lie, ce_bv_from_ibl,
    qm_mc_agreement, qm_quillen_check,
};
use qdt_core::conv::ConvMap;
use qdt_core::linfty::{chuang_lazarev_check, mc_solve_perturbative, quillen_bijection_check, McOutcome};
use qdt_core::morphism::{
    check_bv_morphism, check_dual_ring, compose_bv_morphisms, identity_morphism, linfty_identity,
    linfty_morphism_check, linfty_morphism_to_bvinfty, ring_map_to_bv_morphism, theorem_first_bijection_check,
    theorem_second_bijection_check,
};
use qdt_core::poisson::{examples, unimodular_poisson_check, Polyvector};
use qdt_core::random::{self, rng};
use qdt_core::scalar::parse_rational;
use qdt_core::{
    ArtinRing, Bounds, BvAlgebra, BvInfty, BvMorphism, Certificate, CoproductKind, Elem, Error,
    GradedAlgebra, LInfty, OrderConvention, RingMap, SymAlgebra, SymWord, TensorAlgebra, TensorWord, Term,
    Verdict,
};

use crate::manifest::{Kind, Loaded, Manifest, ManifestError};
use crate::report::Report;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Manifest(ManifestError),
    Kernel(Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(s) => write!(f, "{s}"),
            CliError::Manifest(e) => write!(f, "{e}"),
            CliError::Kernel(e) => write!(f, "{e}"),
        }
    }
}

impl From<ManifestError> for CliError {
    fn from(e: ManifestError) -> Self {
        CliError::Manifest(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Kernel(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(s: impl Into<String>) -> CliError {
    CliError::Usage(s.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Construction {
    Ce,
    Ibl,
    BiDg,
    Ttw,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::Ce => "ce",
            Construction::Ibl => "ibl",
            Construction::BiDg => "bi-dg",
            Construction::Ttw => "ttw",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Coproduct {
    Shuffle,
    Trivial,
}

impl From<Coproduct> for CoproductKind {
    fn from(c: Coproduct) -> Self {
        match c {
            Coproduct::Shuffle => CoproductKind::Shuffle,
            Coproduct::Trivial => CoproductKind::Trivial,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Theorem {
    Quillen,
    ChuangLazarev,
    TheoremFirst,
    TheoremSecond,
    CorollaryBidg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Identity {
    BigFormula,
    QmeForms,
    DerivedBrackets,
    Poisson,
}

/// Options shared by all commands.
#[derive(Clone, Debug)]
pub struct Settings {
    pub words: Option<usize>,
    pub hbar: Option<usize>,
    pub seed: u64,
    pub timing: bool,
}

impl Settings {
    fn n(&self, m: Option<&Manifest>) -> usize {
        self.words.or(m.and_then(Manifest::word_length)).unwrap_or(4)
    }

    fn k(&self, m: Option<&Manifest>) -> usize {
        self.hbar.or(m.and_then(Manifest::hbar_cutoff)).unwrap_or(3)
    }
}

struct Ctx<'a> {
    settings: &'a Settings,
    report: Report,
}

impl<'a> Ctx<'a> {
    fn new(settings: &'a Settings, command: &str, subject: impl Into<String>) -> Self {
        Self {
            settings,
            report: Report::new(command, subject),
        }
    }

    fn cert(&mut self, name: impl Into<String>, bounds: Bounds, f: impl FnOnce() -> CliResult<Verdict>) -> CliResult<()> {
        let start = Instant::now();
        let verdict = f()?;
        let mut c = Certificate::new(name, verdict, bounds);
        if self.settings.timing {
            c.elapsed_ms = Some(start.elapsed().as_millis() as u64);
        }
        self.report.push(c);
        Ok(())
    }

    fn finish(self) -> Report {
        self.report.finish()
    }
}

/// Worker pool for batteries; `QME_KERNEL_THREADS` overrides the size.
fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = std::env::var("QME_KERNEL_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
            b = b.num_threads(n.max(1));
        }
        b.build().expect("thread pool")
    })
}

/// Maps `f` over `items` in parallel, keeping the input order.
fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    pool().install(|| items.par_iter().map(f).collect())
}

fn load(path: &Path, certify: bool) -> CliResult<(Manifest, Loaded)> {
    let m = Manifest::read(path)?;
    let l = m.load(certify)?;
    Ok((m, l))
}

/// `k`, `t<n>` for `k[t]/(t^n)`, `sq:a,b,...` for a square-zero extension,
/// or the path of an `artin-ring` manifest.
pub fn parse_ring(spec: &str) -> CliResult<ArtinRing> {
    if spec == "k" {
        return Ok(ArtinRing::ground());
    }
    if let Some(n) = spec.strip_prefix('t').and_then(|s| s.parse::<usize>().ok()) {
        if n == 0 {
            return Err(usage("t0 is not a ring"));
        }
        return Ok(ArtinRing::truncated_polynomial(n));
    }
    if let Some(g) = spec.strip_prefix("sq:") {
        let gens: Vec<&str> = g.split(',').filter(|s| !s.is_empty()).collect();
        if gens.is_empty() {
            return Err(usage("sq: needs at least one generator"));
        }
        return Ok(ArtinRing::square_zero(gens));
    }
    let (m, l) = load(Path::new(spec), true)?;
    match l {
        Loaded::ArtinRing(r) => Ok(r),
        _ => Err(usage(format!("{spec} is a {} manifest, not an artin-ring", m.kind.name()))),
    }
}

fn lie_of(loaded: &Loaded, what: &str) -> CliResult<LInfty> {
    match loaded {
        Loaded::DgLie(g) => Ok(LInfty::from_dg_lie(g)),
        Loaded::Linfty(l) => Ok(l.clone()),
        other => Err(usage(format!("{what} needs a dg-lie or linfty manifest, got {}", other.kind().name()))),
    }
}

pub enum AnyBv {
    Sym(BvInfty<SymAlgebra>, Option<BvAlgebra<SymAlgebra>>),
    Tensor(BvAlgebra<TensorAlgebra>),
}

macro_rules! on_bv {
    ($x:expr, $v:ident, $full:ident => $body:expr) => {
        match $x {
            AnyBv::Sym($v, $full) => {
                let $full = $full.as_ref();
                $body
            }
            AnyBv::Tensor(b) => {
                let $v = b.as_infty();
                let $full = Some(b);
                $body
            }
        }
    };
}

fn with_cutoff<A: GradedAlgebra>(bv: BvAlgebra<A>, k: usize) -> CliResult<BvAlgebra<A>>
where
    A::Basis: 'static,
{
    Ok(BvAlgebra::new(bv.algebra().clone(), bv.d().clone(), bv.delta().clone(), bv.max_size(), k)?)
}

fn sym(bv: BvAlgebra<SymAlgebra>) -> AnyBv {
    AnyBv::Sym(bv.as_infty().clone(), Some(bv))
}

fn default_construction(kind: Kind) -> Option<Construction> {
    match kind {
        Kind::DgLie | Kind::Linfty => Some(Construction::Ce),
        Kind::LieBialgebra => Some(Construction::Ibl),
        Kind::BiDgLie => Some(Construction::BiDg),
        Kind::Associative => Some(Construction::Ttw),
        _ => None,
    }
}

/// The BV or BV∞-algebra a manifest describes, directly or by a construction.
fn build_bv(
    loaded: &Loaded,
    construction: Option<Construction>,
    n: usize,
    k: usize,
    coproduct: Coproduct,
) -> CliResult<AnyBv> {
    let kind = loaded.kind();
    let c = match (construction, kind) {
        (None, Kind::Bv | Kind::BvInfty) => None,
        (Some(_), Kind::Bv | Kind::BvInfty) => {
            return Err(usage(format!("a {} manifest is already a BV structure", kind.name())));
        }
        (c, _) => Some(c.or(default_construction(kind)).ok_or_else(|| {
            usage(format!("no BV structure is built from a {} manifest", kind.name()))
        })?),
    };
    Ok(match (c, loaded) {
        (None, Loaded::Bv(bv)) => sym(with_cutoff(bv.clone(), k)?),
        (None, Loaded::BvInfty(v)) => AnyBv::Sym(v.clone(), None),
        (Some(Construction::Ce), Loaded::DgLie(g)) => sym(with_cutoff(ce_bv_from_dg_lie(g, n)?, k)?),
        (Some(Construction::Ce), Loaded::Linfty(l)) => AnyBv::Sym(BvInfty::from_linfty(l, n, k)?, None),
        (Some(Construction::Ibl), Loaded::LieBialgebra(b)) => sym(with_cutoff(ce_bv_from_ibl(b, n)?.bv, k)?),
        (Some(Construction::BiDg), Loaded::BiDgLie(b)) => sym(with_cutoff(bv_from_bi_dg_lie(b, n)?, k)?),
        (Some(Construction::Ttw), Loaded::Associative(a)) => {
            AnyBv::Tensor(with_cutoff(bar_bv_from_associative(a, n, coproduct.into())?, k)?)
        }
        (Some(c), l) => {
            return Err(usage(format!(
                "construction {} does not apply to a {} manifest",
                c.name(),
                l.kind().name()
            )))
        }
        (None, _) => unreachable!("handled above"),
    })
}

/// Generator labels to basis elements.
pub trait Words: GradedAlgebra {
    fn parse_word(&self, labels: &[&str]) -> CliResult<Elem<Self::Basis>>;
}

impl Words for SymAlgebra {
    fn parse_word(&self, labels: &[&str]) -> CliResult<Elem<SymWord>> {
        Ok(self.word(labels)?)
    }
}

impl Words for TensorAlgebra {
    fn parse_word(&self, labels: &[&str]) -> CliResult<Elem<TensorWord>> {
        let idx = labels
            .iter()
            .map(|l| self.space().index_of(l))
            .collect::<qdt_core::Result<Vec<_>>>()?;
        Ok(Elem::basis(TensorWord(idx)))
    }
}

/// `WORD,RING[,COEFF[,HBAR]]` with `WORD` generator labels joined by `*`
/// (`1` for the unit).
fn parse_terms<A: Words>(alg: &A, ring: &ArtinRing, terms: &[String]) -> CliResult<Elem<A::Basis>> {
    let mut out = Elem::zero();
    for t in terms {
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if !(2..=4).contains(&parts.len()) {
            return Err(usage(format!("term `{t}`: expected WORD,RING[,COEFF[,HBAR]]")));
        }
        let labels: Vec<&str> = if parts[0] == "1" { Vec::new() } else { parts[0].split('*').collect() };
        let w = alg.parse_word(&labels)?;
        let r = ring.index_of(parts[1])?;
        let c = match parts.get(2) {
            Some(c) => parse_rational(c)?,
            None => qdt_core::scalar::one(),
        };
        let h: i32 = match parts.get(3) {
            Some(h) => h.parse().map_err(|_| usage(format!("term `{t}`: bad ħ power `{h}`")))?,
            None => 0,
        };
        for (term, wc) in w.terms() {
            out.add_term(
                Term {
                    hbar: h,
                    ring: r,
                    basis: term.basis.clone(),
                },
                wc * &c,
            );
        }
    }
    Ok(out)
}

// check ---------------------------------------------------------------------

pub fn check(settings: &Settings, path: &Path) -> CliResult<Report> {
    let (m, loaded) = load(path, false)?;
    let n = settings.n(Some(&m));
    let mut ctx = Ctx::new(settings, "check", m.display_name());
    ctx.report.detail("kind", m.kind.name());
    match &loaded {
        Loaded::DgLie(g) => ctx.cert("dg-lie axioms", Bounds::default(), || Ok(g.check_axioms()))?,
        Loaded::Linfty(l) => ctx.cert("L-infinity relations", Bounds::words(n), || Ok(l.check(n)))?,
        Loaded::LieBialgebra(b) => {
            ctx.cert("lie-bialgebra axioms", Bounds::default(), || Ok(b.check_axioms()))?;
            ctx.report.detail("involutive", b.involutive().to_string());
        }
        Loaded::BiDgLie(b) => ctx.cert("bi-dg-lie axioms", Bounds::default(), || Ok(b.check_axioms()))?,
        Loaded::Associative(a) => {
            ctx.cert("dg-associative axioms", Bounds::default(), || Ok(a.check_axioms()))?;
            let bar = bar_bv_from_associative(a, n, CoproductKind::Shuffle)?;
            let rep = bar.certify();
            for (name, v) in rep.entries() {
                ctx.cert(format!("bar construction: {name}"), Bounds::words(n), || Ok(v.clone()))?;
            }
        }
        Loaded::Bv(bv) => {
            let rep = bv.certify();
            for (name, v) in rep.entries() {
                ctx.cert(name, Bounds::words(n), || Ok(v.clone()))?;
            }
        }
        Loaded::BvInfty(v) => {
            let rep = v.certify();
            for (name, verdict) in rep.entries() {
                ctx.cert(name, Bounds::words(n), || Ok(verdict.clone()))?;
            }
        }
        Loaded::ArtinRing(r) => {
            ctx.cert("dual coalgebra", Bounds::default().with_nilpotency(r.nilpotency()), || {
                Ok(check_dual_ring(r))
            })?;
            ctx.report.detail("ring", r.describe());
        }
    }
    Ok(ctx.finish())
}

pub fn fmt(path: &Path) -> CliResult<String> {
    Ok(Manifest::read(path)?.emit())
}

// construct -----------------------------------------------------------------

pub fn construct(settings: &Settings, which: Construction, path: &Path, coproduct: Coproduct) -> CliResult<Report> {
    // Nonassociative input is accepted; the failure shows up as Δ² ≠ 0.
    let m = Manifest::read(path)?;
    let loaded = m.load(m.kind != Kind::Associative)?;
    let (n, k) = (settings.n(Some(&m)), settings.k(Some(&m)));
    let bounds = Bounds::words(n).with_hbar(k);
    let mut ctx = Ctx::new(settings, "construct", format!("{}({})", which.name(), m.display_name()));
    let bv = build_bv(&loaded, Some(which), n, k, coproduct)?;
    if let (Construction::Ibl, Loaded::LieBialgebra(b)) = (which, &loaded) {
        ctx.report.detail("involutive", b.involutive().to_string());
    }
    on_bv!(&bv, v, full => {
        ctx.report.detail("basis elements", v.basis().len().to_string());
        match full {
            Some(full) => {
                let rep = full.certify();
                for (name, verdict) in rep.entries() {
                    ctx.cert(name, bounds.clone(), || Ok(verdict.clone()))?;
                }
            }
            None => {
                let rep = v.certify();
                for (name, verdict) in rep.entries() {
                    ctx.cert(name, bounds.clone(), || Ok(verdict.clone()))?;
                }
            }
        }
    });
    if let (AnyBv::Sym(_, Some(full)), Loaded::BiDgLie(b)) = (&bv, &loaded) {
        ctx.cert("bi-dg-lie embeds as length-one words", bounds.clone(), || Ok(bidg_inclusion_check(b, full)))?;
    }
    Ok(ctx.finish())
}

// solvers -------------------------------------------------------------------

pub fn solve_mc(settings: &Settings, path: &Path, ring: &str, terms: &[String]) -> CliResult<Report> {
    let (m, loaded) = load(path, true)?;
    let l = lie_of(&loaded, "solve-mc")?;
    let ring = parse_ring(ring)?;
    let seed = if terms.is_empty() {
        random::random_mc_seed(&l, &ring, &mut rng(settings.seed))
    } else {
        let alg = l.shifted_algebra().as_ref();
        parse_terms(alg, &ring, terms)?
    };
    let bounds = Bounds::default().with_nilpotency(ring.nilpotency());
    let mut ctx = Ctx::new(settings, "solve-mc", m.display_name());
    ctx.report.detail("ring", ring.describe());
    ctx.report.detail("seed", l.format(&ring, &seed));
    match mc_solve_perturbative(&l, &ring, &seed)? {
        McOutcome::Solved(s) => {
            ctx.report.detail("solution", l.format(&ring, &s));
            ctx.cert("maurer-cartan equation", bounds, || {
                let r = l.emce_residual(&ring, &s)?;
                Ok(Verdict::from_bool(r.is_zero(), || l.format(&ring, &r)))
            })?;
        }
        McOutcome::Obstructed(o) => {
            ctx.report.detail("partial lift", l.format(&ring, &o.partial));
            ctx.cert("maurer-cartan equation", bounds, || {
                Ok(Verdict::fail(format!(
                    "obstructed at order {} on {}: residual {}",
                    o.order,
                    ring.label(o.ring_element),
                    l.format(&ring, &o.residual)
                )))
            })?;
        }
    }
    Ok(ctx.finish())
}

#[allow(clippy::too_many_arguments)]
pub fn solve_qme(
    settings: &Settings,
    path: &Path,
    construction: Option<Construction>,
    coproduct: Coproduct,
    ring: &str,
    terms: &[String],
) -> CliResult<Report> {
    let (m, loaded) = load(path, true)?;
    let (n, k) = (settings.n(Some(&m)), settings.k(Some(&m)));
    let ring = parse_ring(ring)?;
    let bv = build_bv(&loaded, construction, n, k, coproduct)?;
    let mut ctx = Ctx::new(settings, "solve-qme", m.display_name());
    ctx.report.detail("ring", ring.describe());
    let bounds = Bounds::words(n).with_hbar(k).with_nilpotency(ring.nilpotency());
    on_bv!(&bv, v, _full => {
        let amb = v.ambient(&ring);
        let seed = if terms.is_empty() {
            random::random_qme_seed(v, &ring, &mut rng(settings.seed))
        } else {
            parse_terms(v.algebra().as_ref(), &ring, terms)?
        };
        ctx.report.detail("seed", amb.format(&seed));
        match qme_solve_perturbative(v, &ring, &seed)? {
            QmeOutcome::Solved(s) => {
                ctx.report.detail("solution", amb.format(&s));
                ctx.cert("quantum master equation", bounds, || Ok(v.qme_exp_check(&ring, &s)?))?;
            }
            QmeOutcome::Obstructed(o) => {
                ctx.report.detail("partial lift", amb.format(&o.partial));
                ctx.cert("quantum master equation", bounds, || {
                    Ok(Verdict::fail(format!(
                        "obstructed at order {} on {}: residual {}",
                        o.order,
                        ring.label(o.ring_element),
                        amb.format(&o.residual)
                    )))
                })?;
            }
        }
    });
    Ok(ctx.finish())
}

// representability ----------------------------------------------------------

/// Draws up to `count` values from `f`, trying at most `10 * count` seeds.
fn draw<T>(count: usize, base: u64, mut f: impl FnMut(u64) -> CliResult<Option<T>>) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for i in 0..(10 * count as u64).max(1) {
        if out.len() == count {
            break;
        }
        if let Some(x) = f(base.wrapping_add(i))? {
            out.push(x);
        }
    }
    Ok(out)
}

/// Pass/fail outcomes of a battery: how many of each instance class agree on
/// both sides, and the first disagreement.
struct Battery {
    name: &'static str,
    valid: Vec<(bool, bool)>,
    corrupted: Vec<(bool, bool)>,
    other: Vec<(bool, bool)>,
    disagreement: Option<String>,
}

impl Battery {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            valid: Vec::new(),
            corrupted: Vec::new(),
            other: Vec::new(),
            disagreement: None,
        }
    }

    fn note(&mut self, class: &str, i: usize, sides: (bool, bool), detail: impl FnOnce() -> String) {
        if sides.0 != sides.1 && self.disagreement.is_none() {
            self.disagreement = Some(format!("{class} instance {i}: {}", detail()));
        }
        match class {
            "valid" => self.valid.push(sides),
            "corrupted" => self.corrupted.push(sides),
            _ => self.other.push(sides),
        }
    }

    fn emit(self, ctx: &mut Ctx, bounds: Bounds, expect_valid: usize) -> CliResult<()> {
        let total = self.valid.len() + self.corrupted.len() + self.other.len();
        let name = self.name;
        ctx.report.detail(
            format!("{name}: instances"),
            format!(
                "{} valid, {} corrupted, {} other",
                self.valid.len(),
                self.corrupted.len(),
                self.other.len()
            ),
        );
        let solutions = self.valid.iter().chain(&self.corrupted).chain(&self.other).filter(|s| s.0).count();
        ctx.report.detail(format!("{name}: solutions"), format!("{solutions} of {total}"));
        let dis = self.disagreement.clone();
        ctx.cert(format!("{name}: both sides agree"), bounds.clone(), || {
            Ok(match dis {
                Some(w) => Verdict::fail(w),
                None if total == 0 => Verdict::fail("no instances"),
                None => Verdict::pass(),
            })
        })?;
        if expect_valid > 0 {
            let v = &self.valid;
            ctx.cert(format!("{name}: valid instances satisfy both sides"), bounds.clone(), || {
                Ok(if v.len() < expect_valid {
                    Verdict::fail(format!("drew {} of {expect_valid} valid instances", v.len()))
                } else if let Some(i) = v.iter().position(|s| !(s.0 && s.1)) {
                    Verdict::fail(format!("valid instance {i} fails"))
                } else {
                    Verdict::pass()
                })
            })?;
        }
        if !self.corrupted.is_empty() {
            let c = &self.corrupted;
            ctx.cert(format!("{name}: corrupted instances fail both sides"), bounds, || {
                Ok(match c.iter().position(|s| s.0 || s.1) {
                    Some(i) => Verdict::fail(format!("corrupted instance {i} passes a side")),
                    None => Verdict::pass(),
                })
            })?;
        }
        Ok(())
    }
}

/// Degree-preserving random linear endomorphism of `g[1]`.
fn random_linear(l: &LInfty, r: &mut impl Rng) -> ConvMap<SymWord, SymWord> {
    let sp = l.space();
    let mut f = ConvMap::zero();
    for i in 0..sp.dim() {
        let mut img = Elem::zero();
        for j in 0..sp.dim() {
            if sp.degree(j) == sp.degree(i) && r.gen_bool(0.6) {
                img.add_assign(&Elem::term(SymWord(vec![j]), 0, 0, random::coefficient(r)));
            }
        }
        f.set(SymWord(vec![i]), img);
    }
    f
}

fn to_cl_map(f: &ConvMap<SymWord, SymWord>) -> ConvMap<SymWord, usize> {
    let mut out = ConvMap::zero();
    for (w, v) in f.iter() {
        out.set(w.clone(), v.map_basis(|b| b.0[0]));
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn verify_representability(
    settings: &Settings,
    theorem: Theorem,
    path: &Path,
    construction: Option<Construction>,
    coproduct: Coproduct,
    ring: &str,
    count: usize,
) -> CliResult<Report> {
    let (m, loaded) = load(path, true)?;
    let (n, k) = (settings.n(Some(&m)), settings.k(Some(&m)));
    let ring = parse_ring(ring)?;
    let seed = settings.seed;
    let mut ctx = Ctx::new(settings, "verify-representability", m.display_name());
    ctx.report.detail("ring", ring.describe());
    let len = n.max(ring.nilpotency());
    match theorem {
        Theorem::Quillen => {
            let l = lie_of(&loaded, "quillen")?;
            let valid = draw(count, seed, |s| Ok(random::random_mc_solution(&l, &ring, &mut rng(s))?))?;
            let corrupted: Vec<_> = valid
                .iter()
                .enumerate()
                .filter_map(|(i, s)| random::corrupt_mc(&l, &ring, &mut rng(seed ^ (1 << 32) ^ i as u64), s))
                .collect();
            let mut b = Battery::new("quillen");
            for (class, set) in [("valid", &valid), ("corrupted", &corrupted)] {
                let reps = par_map(set, |s| quillen_bijection_check(&l, &ring, s, len));
                for (i, rep) in reps.into_iter().enumerate() {
                    let rep = rep?;
                    let ok = rep.projection_identity.holds;
                    b.note(class, i, (rep.maurer_cartan.holds, rep.morphism.holds && ok), || format!("{rep:?}"));
                }
            }
            b.emit(&mut ctx, Bounds::words(len).with_nilpotency(ring.nilpotency()), count)?;
        }
        Theorem::TheoremFirst => {
            let bv = build_bv(&loaded, construction, n, k, coproduct)?;
            on_bv!(&bv, v, _full => {
                let valid = draw(count, seed, |s| Ok(random::random_qme_solution(v, &ring, &mut rng(s))?))?;
                let corrupted: Vec<_> = valid
                    .iter()
                    .enumerate()
                    .filter_map(|(i, s)| random::corrupt_qme(v, &ring, &mut rng(seed ^ (1 << 32) ^ i as u64), s))
                    .collect();
                let mut r = rng(seed ^ (2 << 32));
                let other: Vec<_> = (0..count).map(|i| random::random_qme_element(v, &ring, &mut r, 1 + i % 4)).collect();
                let mut b = Battery::new("theorem-first");
                for (class, set) in [("valid", &valid), ("corrupted", &corrupted), ("other", &other)] {
                    let reps = par_map(set, |s| theorem_first_bijection_check(v, &ring, s));
                    for (i, rep) in reps.into_iter().enumerate() {
                        let rep = rep?;
                        b.note(class, i, (rep.qme.holds, rep.morphism.holds()), || format!("{rep:?}"));
                    }
                }
                b.emit(&mut ctx, Bounds::words(n).with_hbar(k).with_nilpotency(ring.nilpotency()), count)?;
            });
        }
        Theorem::TheoremSecond => {
            let l = lie_of(&loaded, "theorem-second")?;
            let v = BvInfty::from_linfty(&l, n, k)?;
            let mut r = rng(seed);
            let mut maps = vec![linfty_identity(&l)];
            maps.extend((0..count).map(|_| random_linear(&l, &mut r)));
            let reps = par_map(&maps, |f| -> CliResult<_> {
                let phi = linfty_morphism_to_bvinfty(&l, &l, f, n)?;
                let rep = theorem_second_bijection_check(&v, &l, phi.map(), n)?;
                let oracle = linfty_morphism_check(&l, &l, f, n)?;
                Ok((rep, oracle))
            });
            let mut b = Battery::new("theorem-second");
            let mut oracle_mismatch = None;
            for (i, res) in reps.into_iter().enumerate() {
                let (rep, oracle) = res?;
                if oracle.holds != rep.qme.holds && oracle_mismatch.is_none() {
                    oracle_mismatch = Some(format!("instance {i}: L∞ morphism equation {}", oracle.holds));
                }
                b.note(if i == 0 { "valid" } else { "other" }, i, (rep.qme.holds, rep.morphism.holds()), || {
                    format!("{rep:?}")
                });
            }
            let bounds = Bounds::words(n).with_hbar(k);
            b.emit(&mut ctx, bounds.clone(), 1)?;
            ctx.cert("theorem-second: agrees with the L-infinity morphism equation", bounds, || {
                Ok(oracle_mismatch.map_or_else(Verdict::pass, Verdict::fail))
            })?;
        }
        Theorem::ChuangLazarev => {
            let Loaded::DgLie(g) = &loaded else {
                return Err(usage("chuang-lazarev needs a dg-lie manifest"));
            };
            let l = LInfty::from_dg_lie(g);
            let mut r = rng(seed);
            let mut maps = vec![to_cl_map(&linfty_identity(&l))];
            maps.extend((0..count).map(|_| to_cl_map(&random_linear(&l, &mut r))));
            let reps = par_map(&maps, |s| chuang_lazarev_check(g, &l, s, n));
            let mut b = Battery::new("chuang-lazarev");
            for (i, rep) in reps.into_iter().enumerate() {
                let rep = rep?;
                b.note(if i == 0 { "valid" } else { "other" }, i, (rep.maurer_cartan.holds, rep.morphism.holds), || {
                    format!("{rep:?}")
                });
            }
            b.emit(&mut ctx, Bounds::words(n), 1)?;
        }
        Theorem::CorollaryBidg => {
            let Loaded::BiDgLie(bd) = &loaded else {
                return Err(usage("corollary-bidg needs a bi-dg-lie manifest"));
            };
            let valid = draw(count, seed, |s| Ok(random::random_bidg_qm_solution(bd, &ring, k, &mut rng(s))?))?;
            let mut corrupted = Vec::new();
            for (i, s) in valid.iter().enumerate() {
                if let Some(c) = random::corrupt_bidg_qm(bd, &ring, k, &mut rng(seed ^ (1 << 32) ^ i as u64), s)? {
                    corrupted.push(c);
                }
            }
            let mut b = Battery::new("corollary-bidg");
            let mut agreement = Verdict::pass();
            for (class, set) in [("valid", &valid), ("corrupted", &corrupted)] {
                let reps = par_map(set, |s| -> CliResult<_> {
                    Ok((qm_quillen_check(bd, &ring, s, k, len)?, qm_mc_agreement(bd, &ring, s, k)?))
                });
                for (i, res) in reps.into_iter().enumerate() {
                    let (rep, agree) = res?;
                    agreement = agreement.and(agree);
                    let ok = rep.projection_identity.holds;
                    b.note(class, i, (rep.maurer_cartan.holds, rep.morphism.holds && ok), || format!("{rep:?}"));
                }
            }
            let bounds = Bounds::words(len).with_hbar(k).with_nilpotency(ring.nilpotency());
            b.emit(&mut ctx, bounds.clone(), count)?;
            ctx.cert("corollary-bidg: quantum master equation is maurer-cartan in g[[hbar]]", bounds, || {
                Ok(agreement)
            })?;
        }
    }
    Ok(ctx.finish())
}

// morphisms -----------------------------------------------------------------

fn same_map<A: GradedAlgebra, B: GradedAlgebra>(x: &BvMorphism<A, B>, y: &BvMorphism<A, B>) -> Verdict
where
    A::Basis: 'static,
    B::Basis: 'static,
{
    let alg = x.source().algebra();
    match alg
        .basis_up_to(x.source().max_size())
        .into_iter()
        .find(|w| x.map().get(w) != y.map().get(w))
    {
        None => Verdict::pass(),
        Some(w) => Verdict::fail(format!("maps differ on {}", alg.label(&w))),
    }
}

/// Composes the morphisms `R_i* -> R_{i+1}*` induced by the label-matching
/// ring maps `R_0 -> R_1 -> ...`.
pub fn compose_morphisms(settings: &Settings, specs: &[String]) -> CliResult<Report> {
    if specs.len() < 2 {
        return Err(usage("compose-morphisms needs at least two rings"));
    }
    let rings = specs.iter().map(|s| parse_ring(s)).collect::<CliResult<Vec<_>>>()?;
    let maps = rings
        .windows(2)
        .map(|w| RingMap::by_label(&w[0], &w[1]))
        .collect::<qdt_core::Result<Vec<_>>>()?;
    let morph = (0..maps.len())
        .map(|i| ring_map_to_bv_morphism(&maps[i], &rings[i], &rings[i + 1]))
        .collect::<qdt_core::Result<Vec<_>>>()?;
    let mut ctx = Ctx::new(settings, "compose-morphisms", specs.join(" -> "));
    let nil = rings.iter().map(ArtinRing::nilpotency).max().unwrap_or(1);
    let bounds = Bounds::default().with_nilpotency(nil);
    let tag = |i: usize| format!("{} -> {}", specs[i], specs[i + 1]);
    for (i, m) in morph.iter().enumerate() {
        ctx.cert(format!("morphism {}", tag(i)), bounds.clone(), || {
            let rep = check_bv_morphism(m, OrderConvention::Generalized);
            Ok(rep.entries().into_iter().fold(Verdict::pass(), |acc, (_, v)| acc.and(v.clone())))
        })?;
        ctx.cert(format!("units around {}", tag(i)), bounds.clone(), || {
            let l = compose_bv_morphisms(&identity_morphism(m.target())?, m)?;
            let r = compose_bv_morphisms(m, &identity_morphism(m.source())?)?;
            Ok(same_map(&l, m).and(same_map(&r, m)))
        })?;
    }
    // A ring map R -> S gives S* -> R*, so the composite is built leftwards.
    let mut acc = morph[0].clone();
    let mut ring_acc = maps[0].clone();
    for i in 1..morph.len() {
        let next = compose_bv_morphisms(&acc, &morph[i]);
        ring_acc = ring_acc.then(&maps[i]);
        let direct = ring_map_to_bv_morphism(&ring_acc, &rings[0], &rings[i + 1])?;
        let name = format!("functoriality {} -> {}", specs[0], specs[i + 1]);
        match next {
            Ok(c) => {
                ctx.cert(name, bounds.clone(), || Ok(same_map(&c, &direct)))?;
                acc = c;
            }
            Err(e) => {
                ctx.cert(name, bounds.clone(), || Ok(Verdict::fail(e.to_string())))?;
                return Ok(ctx.finish());
            }
        }
    }
    for i in 0..morph.len().saturating_sub(2) {
        let (a, b, c) = (&morph[i], &morph[i + 1], &morph[i + 2]);
        ctx.cert(format!("associativity {} -> {}", specs[i], specs[i + 3]), bounds.clone(), || {
            let left = compose_bv_morphisms(&compose_bv_morphisms(a, b)?, c)?;
            let right = compose_bv_morphisms(a, &compose_bv_morphisms(b, c)?)?;
            Ok(same_map(&left, &right))
        })?;
    }
    let ground = ArtinRing::ground();
    let amb = acc.target().ambient(&ground);
    let src = acc.source().algebra().clone();
    let composite: Vec<String> = src
        .basis_up_to(acc.source().max_size())
        .iter()
        .map(|w| format!("{} ↦ {}", src.label(w), amb.format(&acc.map().get(w))))
        .collect();
    ctx.report.detail("composite", composite.join("; "));
    Ok(ctx.finish())
}

// identities ----------------------------------------------------------------

/// Alternates random elements with solver outputs.
fn qme_battery<A: GradedAlgebra>(v: &BvInfty<A>, ring: &ArtinRing, seed: u64, count: usize) -> Vec<Elem<A::Basis>>
where
    A::Basis: 'static,
{
    let mut r = rng(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 1 {
                if let Ok(Some(s)) = random::random_qme_solution(v, ring, &mut r) {
                    return s;
                }
            }
            random::random_qme_element(v, ring, &mut r, 1 + i % 4)
        })
        .collect()
}

fn first_failure(vs: Vec<CliResult<Verdict>>) -> CliResult<Verdict> {
    for (i, v) in vs.into_iter().enumerate() {
        let v = v?;
        if !v.holds {
            return Ok(Verdict::fail(format!("element {i}: {}", v.witness.unwrap_or_default())));
        }
    }
    Ok(Verdict::pass())
}

pub struct PoissonArgs {
    pub dim: Option<usize>,
    pub s0: Option<String>,
    pub s1: Option<String>,
}

#[allow(clippy::too_many_arguments)]
pub fn identity_check(
    settings: &Settings,
    identity: Identity,
    path: Option<&Path>,
    construction: Option<Construction>,
    coproduct: Coproduct,
    ring: &str,
    count: usize,
    poisson: PoissonArgs,
) -> CliResult<Report> {
    if identity == Identity::Poisson {
        return poisson_check(settings, poisson);
    }
    let path = path.ok_or_else(|| usage("this identity needs a manifest"))?;
    let (m, loaded) = load(path, true)?;
    let (n, k) = (settings.n(Some(&m)), settings.k(Some(&m)));
    let ring = parse_ring(ring)?;
    let bv = build_bv(&loaded, construction, n, k, coproduct)?;
    let mut ctx = Ctx::new(settings, "identity-check", m.display_name());
    let bounds = Bounds::words(n).with_hbar(k).with_nilpotency(ring.nilpotency());
    on_bv!(&bv, v, full => {
        match identity {
            Identity::BigFormula => {
                let els = qme_battery(v, &ring, settings.seed, count);
                ctx.report.detail("elements", els.len().to_string());
                ctx.cert("conjugation identity", bounds, || {
                    first_failure(par_map(&els, |s| match full {
                        Some(f) => Ok(f.conjugation_identity_check(&ring, s)?),
                        None => Ok(v.conjugation_identity_check(&ring, s)?),
                    }))
                })?;
            }
            Identity::QmeForms => {
                let els = qme_battery(v, &ring, settings.seed, count);
                ctx.report.detail("elements", els.len().to_string());
                let results = par_map(&els, |s| -> CliResult<_> {
                    let exp = v.qme_exp_check(&ring, s)?.holds;
                    let derived = v.bvinfty_qme_residual(&ring, s)?.is_zero();
                    let anti = match full {
                        Some(f) => Some(f.qme_residual(&ring, s)?.is_zero()),
                        None => None,
                    };
                    Ok((exp, derived, anti))
                });
                let results = results.into_iter().collect::<CliResult<Vec<_>>>()?;
                let solutions = results.iter().filter(|r| r.0).count();
                ctx.report.detail("solutions", format!("{solutions} of {}", results.len()));
                ctx.cert("exponential form agrees with derived brackets", bounds.clone(), || {
                    Ok(match results.iter().position(|r| r.0 != r.1) {
                        Some(i) => Verdict::fail(format!("element {i}")),
                        None => Verdict::pass(),
                    })
                })?;
                if full.is_some() {
                    ctx.cert("exponential form agrees with the antibracket form", bounds, || {
                        Ok(match results.iter().position(|r| Some(r.0) != r.2) {
                            Some(i) => Verdict::fail(format!("element {i}")),
                            None => Verdict::pass(),
                        })
                    })?;
                }
            }
            Identity::DerivedBrackets => {
                ctx.cert("derived brackets form an L-infinity algebra", Bounds::words(n), || {
                    Ok(derived_brackets_linfty_check(v, n, n)?)
                })?;
            }
            Identity::Poisson => unreachable!("handled above"),
        }
    });
    Ok(ctx.finish())
}

fn poisson_check(settings: &Settings, args: PoissonArgs) -> CliResult<Report> {
    let mut ctx = Ctx::new(settings, "identity-check", "unimodular-poisson");
    match (args.s0, args.s1) {
        (None, None) => {
            for (name, s0, s1, expected) in examples() {
                ctx.cert(format!("example {name}"), Bounds::default(), || {
                    let rep = unimodular_poisson_check(&s0, &s1)?;
                    let holds = rep.holds() == expected && rep.cross_validated;
                    Ok(Verdict::from_bool(holds, || format!("expected {expected}, got {rep:?}")))
                })?;
            }
        }
        (Some(s0), s1) => {
            let dim = args.dim.ok_or_else(|| usage("--dim is required with --s0"))?;
            let p0 = Polyvector::parse(dim, &s0)?;
            let p1 = Polyvector::parse(dim, s1.as_deref().unwrap_or("0"))?;
            let rep = unimodular_poisson_check(&p0, &p1)?;
            ctx.cert("[S0, S0] = 0", Bounds::default(), || Ok(rep.poisson.clone()))?;
            ctx.cert("divergence condition", Bounds::default(), || Ok(rep.unimodular.clone()))?;
            ctx.cert("antibracket path agrees", Bounds::default(), || {
                Ok(Verdict::from_bool(rep.cross_validated, || "bracket paths differ".into()))
            })?;
        }
        (None, Some(_)) => return Err(usage("--s1 needs --s0")),
    }
    Ok(ctx.finish())
}

