//! TOML manifests describing algebraic structures.
//!
//! A manifest names its `kind`, lists a graded basis and gives structure
//! constants as entries `{ args = [...], value = [...], coeff = "p/q" }`.
//! Coefficients are strings so that rationals stay exact.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use qdt_core::algebra::Ambient;
use qdt_core::constructions::{AssociativeAlgebraData, BiDgLieData, LieBialgebraData};
use qdt_core::scalar::{format_rational, parse_rational};
use qdt_core::{
    ArtinRing, BvAlgebra, BvInfty, DgLie, Elem, GradedVectorSpace, LInfty, SymAlgebra,
    SymWord, WordOperator, Q,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    DgLie,
    Linfty,
    LieBialgebra,
    BiDgLie,
    Associative,
    Bv,
    BvInfty,
    ArtinRing,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::DgLie => "dg-lie",
            Kind::Linfty => "linfty",
            Kind::LieBialgebra => "lie-bialgebra",
            Kind::BiDgLie => "bi-dg-lie",
            Kind::Associative => "associative",
            Kind::Bv => "bv",
            Kind::BvInfty => "bv-infty",
            Kind::ArtinRing => "artin-ring",
        }
    }

    fn blocks(self) -> &'static [&'static str] {
        match self {
            Kind::DgLie => &["differential", "bracket"],
            Kind::Linfty => &["brackets"],
            Kind::LieBialgebra => &["bracket", "cobracket"],
            Kind::BiDgLie => &["differential", "bracket", "delta"],
            Kind::Associative => &["differential", "product"],
            Kind::Bv => &["differential", "delta"],
            Kind::BvInfty => &["operators"],
            Kind::ArtinRing => &["product"],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisEntry {
    pub label: String,
    #[serde(default)]
    pub degree: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Labels {
    One(String),
    Many(Vec<String>),
}

impl Labels {
    fn as_vec(&self) -> Vec<&str> {
        match self {
            Labels::One(s) => vec![s.as_str()],
            Labels::Many(v) => v.iter().map(String::as_str).collect(),
        }
    }

    fn canonical(&self) -> Labels {
        match self {
            Labels::Many(v) if v.len() == 1 => Labels::One(v[0].clone()),
            other => other.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    /// Only meaningful in `bv-infty` manifests: the operator `Δ_n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    pub args: Labels,
    pub value: Labels,
    #[serde(default = "default_coeff")]
    pub coeff: String,
}

fn default_coeff() -> String {
    "1".into()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Structure {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub differential: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bracket: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cobracket: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub product: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<Entry>,
}

impl Structure {
    fn blocks(&self) -> [(&'static str, &Vec<Entry>); 7] {
        [
            ("differential", &self.differential),
            ("bracket", &self.bracket),
            ("brackets", &self.brackets),
            ("cobracket", &self.cobracket),
            ("delta", &self.delta),
            ("product", &self.product),
            ("operators", &self.operators),
        ]
    }

    fn blocks_mut(&mut self) -> [&mut Vec<Entry>; 7] {
        [
            &mut self.differential,
            &mut self.bracket,
            &mut self.brackets,
            &mut self.cobracket,
            &mut self.delta,
            &mut self.product,
            &mut self.operators,
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_length: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar_cutoff: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub structure: Structure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

#[derive(Debug)]
pub enum ManifestError {
    Io(String),
    Syntax(String),
    Semantic(String),
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ManifestError::Io(s) => write!(f, "cannot read manifest: {s}"),
            ManifestError::Syntax(s) => write!(f, "manifest syntax error: {s}"),
            ManifestError::Semantic(s) => write!(f, "invalid manifest: {s}"),
        }
    }
}

impl std::error::Error for ManifestError {}

type MResult<T> = std::result::Result<T, ManifestError>;

fn semantic(e: impl fmt::Display) -> ManifestError {
    ManifestError::Semantic(e.to_string())
}

/// A structure loaded from a manifest.
#[derive(Clone)]
pub enum Loaded {
    DgLie(DgLie),
    Linfty(LInfty),
    LieBialgebra(LieBialgebraData),
    BiDgLie(BiDgLieData),
    Associative(AssociativeAlgebraData),
    Bv(BvAlgebra<SymAlgebra>),
    BvInfty(BvInfty<SymAlgebra>),
    ArtinRing(ArtinRing),
}

impl Manifest {
    pub fn parse(text: &str) -> MResult<Self> {
        let m: Manifest = toml::from_str(text).map_err(|e| ManifestError::Syntax(e.to_string()))?;
        m.validate_shape()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> MResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ManifestError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Canonical TOML: reduced coefficients, single labels unwrapped.
    pub fn emit(&self) -> String {
        let mut m = self.clone();
        for block in m.structure.blocks_mut() {
            for e in block.iter_mut() {
                e.args = e.args.canonical();
                e.value = e.value.canonical();
                if let Ok(c) = parse_rational(&e.coeff) {
                    e.coeff = format_rational(&c);
                }
            }
        }
        toml::to_string(&m).expect("manifests serialize")
    }

    pub fn word_length(&self) -> Option<usize> {
        self.truncation.as_ref().and_then(|t| t.word_length)
    }

    pub fn hbar_cutoff(&self) -> Option<usize> {
        self.truncation.as_ref().and_then(|t| t.hbar_cutoff)
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    fn validate_shape(&self) -> MResult<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(semantic(format!(
                "format_version {} is not supported (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        let allowed = self.kind.blocks();
        for (name, block) in self.structure.blocks() {
            if !block.is_empty() && !allowed.contains(&name) {
                return Err(semantic(format!("block `{name}` is not allowed in a {} manifest", self.kind.name())));
            }
            for (i, e) in block.iter().enumerate() {
                parse_rational(&e.coeff)
                    .map_err(|_| semantic(format!("{name}[{i}]: malformed rational `{}`", e.coeff)))?;
                if e.order.is_some() != (self.kind == Kind::BvInfty) {
                    return Err(semantic(format!("{name}[{i}]: `order` is required exactly in bv-infty operators")));
                }
            }
        }
        Ok(())
    }

    fn space(&self) -> MResult<GradedVectorSpace> {
        if self.kind == Kind::ArtinRing {
            if let Some(b) = self.basis.iter().find(|b| b.degree != 0) {
                return Err(semantic(format!("ring basis element `{}` must have degree 0", b.label)));
            }
        }
        GradedVectorSpace::new(self.basis.iter().map(|b| (b.label.clone(), b.degree))).map_err(semantic)
    }

    /// Builds the structure. With `certify` the axioms of the kind are checked
    /// and a failure is a semantic error carrying the witness; without it only
    /// labels, arities and degrees are checked.
    pub fn load(&self, certify: bool) -> MResult<Loaded> {
        let space = self.space()?;
        let s = &self.structure;
        Ok(match self.kind {
            Kind::DgLie => Loaded::DgLie(dg_lie(space, s, certify)?),
            Kind::Linfty => Loaded::Linfty(linfty(space, s, certify, self.word_length().unwrap_or(4))?),
            Kind::LieBialgebra => {
                let lie = dg_lie(space.clone(), s, certify)?;
                let co = s
                    .cobracket
                    .iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let [a] = arity::<1>("cobracket", i, &e.args)?;
                        let [b, c] = arity::<2>("cobracket", i, &e.value)?;
                        Ok((idx(&space, a)?, idx(&space, b)?, idx(&space, c)?, coeff(e)))
                    })
                    .collect::<MResult<Vec<_>>>()?;
                Loaded::LieBialgebra(if certify {
                    LieBialgebraData::new(lie, &co)
                } else {
                    LieBialgebraData::unchecked(lie, &co)
                }
                .map_err(semantic)?)
            }
            Kind::BiDgLie => {
                let lie = dg_lie(space.clone(), s, certify)?;
                let delta = unary(&space, "delta", &s.delta)?;
                Loaded::BiDgLie(if certify {
                    BiDgLieData::new(lie, &delta)
                } else {
                    BiDgLieData::unchecked(lie, &delta)
                }
                .map_err(semantic)?)
            }
            Kind::Associative => {
                let d = unary(&space, "differential", &s.differential)?;
                let m = binary(&space, "product", &s.product)?;
                Loaded::Associative(if certify {
                    AssociativeAlgebraData::new(space, &m, &d)
                } else {
                    AssociativeAlgebraData::unchecked(space, &m, &d)
                }
                .map_err(semantic)?)
            }
            Kind::Bv => {
                let n = self.word_length().unwrap_or(4);
                let k = self.hbar_cutoff().unwrap_or(3);
                let bv = bv(space, s, n, k)?;
                if certify {
                    if let Some((name, v)) = bv.certify().first_failure() {
                        return Err(semantic(format!(
                            "BV axiom `{name}` fails; witness: {}",
                            v.witness.clone().unwrap_or_default()
                        )));
                    }
                }
                Loaded::Bv(bv)
            }
            Kind::BvInfty => {
                let n = self.word_length().unwrap_or(4);
                let k = self.hbar_cutoff().unwrap_or(3);
                let v = bv_infty(space, s, n, k)?;
                if certify {
                    if let Some((name, verdict)) = v.certify().first_failure() {
                        return Err(semantic(format!(
                            "BV∞ axiom `{name}` fails; witness: {}",
                            verdict.witness.clone().unwrap_or_default()
                        )));
                    }
                }
                Loaded::BvInfty(v)
            }
            Kind::ArtinRing => Loaded::ArtinRing(artin_ring(self, s)?),
        })
    }
}

fn coeff(e: &Entry) -> Q {
    parse_rational(&e.coeff).expect("validated at parse time")
}

fn idx(space: &GradedVectorSpace, label: &str) -> MResult<usize> {
    space.index_of(label).map_err(semantic)
}

fn arity<'a, const N: usize>(block: &str, i: usize, l: &'a Labels) -> MResult<[&'a str; N]> {
    let v = l.as_vec();
    v.clone()
        .try_into()
        .map_err(|_| semantic(format!("{block}[{i}]: expected {N} label(s), got {}", v.len())))
}

fn unary(space: &GradedVectorSpace, block: &str, es: &[Entry]) -> MResult<Vec<(usize, usize, Q)>> {
    es.iter()
        .enumerate()
        .map(|(i, e)| {
            let [a] = arity::<1>(block, i, &e.args)?;
            let [b] = arity::<1>(block, i, &e.value)?;
            Ok((idx(space, a)?, idx(space, b)?, coeff(e)))
        })
        .collect()
}

fn binary(space: &GradedVectorSpace, block: &str, es: &[Entry]) -> MResult<Vec<(usize, usize, usize, Q)>> {
    es.iter()
        .enumerate()
        .map(|(i, e)| {
            let [a, b] = arity::<2>(block, i, &e.args)?;
            let [c] = arity::<1>(block, i, &e.value)?;
            Ok((idx(space, a)?, idx(space, b)?, idx(space, c)?, coeff(e)))
        })
        .collect()
}

fn dg_lie(space: GradedVectorSpace, s: &Structure, certify: bool) -> MResult<DgLie> {
    let d = unary(&space, "differential", &s.differential)?;
    let br = binary(&space, "bracket", &s.bracket)?;
    if certify {
        DgLie::new(space, &d, &br)
    } else {
        DgLie::unchecked(space, &d, &br)
    }
    .map_err(semantic)
}

/// The element of `alg` named by a list of generator labels; `[]` is the unit.
fn word(alg: &SymAlgebra, l: &Labels) -> MResult<Elem<SymWord>> {
    alg.word(&l.as_vec()).map_err(semantic)
}

fn generators(alg: &SymAlgebra, block: &str, i: usize, l: &Labels) -> MResult<Vec<usize>> {
    let v = l.as_vec();
    if v.is_empty() {
        return Err(semantic(format!("{block}[{i}]: empty argument list")));
    }
    v.iter().map(|x| alg.space().index_of(x).map_err(semantic)).collect()
}

/// `l_n` given on `g[1]`: each entry is a value of the codifferential on a word.
fn linfty(space: GradedVectorSpace, s: &Structure, certify: bool, n: usize) -> MResult<LInfty> {
    let alg = SymAlgebra::new(space.shift(1));
    let mut codiff = WordOperator::new(1);
    for (i, e) in s.brackets.iter().enumerate() {
        let args = generators(&alg, "brackets", i, &e.args)?;
        let [v] = arity::<1>("brackets", i, &e.value)?;
        let value = alg.word(&[v]).map_err(semantic)?.scale(&coeff(e));
        codiff
            .add_unordered(&alg, &args, &value)
            .map_err(|err| semantic(format!("brackets[{i}]: {err}")))?;
    }
    let l = LInfty::new(space, codiff).map_err(semantic)?;
    if certify {
        if let Some(w) = l.check(n).witness {
            return Err(semantic(format!("L∞ relations fail; witness: {w}")));
        }
    }
    Ok(l)
}

/// `d` is a derivation given on generators; `Δ` is given by its values on
/// generators and on products of two generators.
fn bv(space: GradedVectorSpace, s: &Structure, n: usize, k: usize) -> MResult<BvAlgebra<SymAlgebra>> {
    let alg = Arc::new(SymAlgebra::new(space));
    let mut d = WordOperator::new(1);
    for (i, e) in s.differential.iter().enumerate() {
        let args = generators(&alg, "differential", i, &e.args)?;
        if args.len() != 1 {
            return Err(semantic(format!("differential[{i}]: expected one generator")));
        }
        let value = word(&alg, &e.value)?.scale(&coeff(e));
        d.add_unordered(&alg, &args, &value)
            .map_err(|err| semantic(format!("differential[{i}]: {err}")))?;
    }
    let ground = ArtinRing::ground();
    let amb = Ambient::new(alg.as_ref(), &ground);
    let mut on_gen: Vec<Elem<SymWord>> = vec![Elem::zero(); alg.space().dim()];
    let mut pairs = Vec::new();
    for (i, e) in s.delta.iter().enumerate() {
        let args = generators(&alg, "delta", i, &e.args)?;
        let value = word(&alg, &e.value)?.scale(&coeff(e));
        match args.len() {
            1 => on_gen[args[0]].add_assign(&value),
            2 => pairs.push((args, value)),
            _ => return Err(semantic(format!("delta[{i}]: Δ is given on one or two generators"))),
        }
    }
    let mut delta = WordOperator::new(-1);
    for (g, v) in on_gen.iter().enumerate() {
        if !v.is_zero() {
            delta.add_unordered(&alg, &[g], v).map_err(semantic)?;
        }
    }
    // Symbol on xy: Δ(xy) - Δ(x)y - (-1)^|x| xΔ(y).
    for (args, value) in pairs {
        let (x, y) = (Elem::basis(SymWord(vec![args[0]])), Elem::basis(SymWord(vec![args[1]])));
        let sign = if alg.space().degree(args[0]) % 2 == 0 { Q::from_integer(1.into()) } else { Q::from_integer((-1).into()) };
        let mut sym = value;
        sym.add_assign(&amb.mul(&on_gen[args[0]], &y).scale(&Q::from_integer((-1).into())));
        sym.add_assign(&amb.mul(&x, &on_gen[args[1]]).scale(&-sign));
        delta.add_unordered(&alg, &args, &sym).map_err(semantic)?;
    }
    BvAlgebra::new(alg.clone(), d.to_operator(&alg), delta.to_operator(&alg), n, k).map_err(semantic)
}

/// Each `Δ_n` is given by its symbol: values on words of length at most `n`.
fn bv_infty(space: GradedVectorSpace, s: &Structure, n: usize, k: usize) -> MResult<BvInfty<SymAlgebra>> {
    let alg = Arc::new(SymAlgebra::new(space));
    let mut ops: std::collections::BTreeMap<usize, WordOperator> = Default::default();
    for (i, e) in s.operators.iter().enumerate() {
        let order = e.order.expect("validated at parse time");
        if order == 0 {
            return Err(semantic(format!("operators[{i}]: order must be at least 1")));
        }
        let args = generators(&alg, "operators", i, &e.args)?;
        if args.len() > order {
            return Err(semantic(format!(
                "operators[{i}]: Δ_{order} has order at most {order}, symbol given on {} generators",
                args.len()
            )));
        }
        let value = word(&alg, &e.value)?.scale(&coeff(e));
        ops.entry(order)
            .or_insert_with(|| WordOperator::new(3 - 2 * order as i64))
            .add_unordered(&alg, &args, &value)
            .map_err(|err| semantic(format!("operators[{i}]: {err}")))?;
    }
    let ops = ops.into_iter().map(|(o, w)| (o, w.to_operator(&alg))).collect();
    BvInfty::new(alg, ops, n, k).map_err(semantic)
}

fn artin_ring(m: &Manifest, s: &Structure) -> MResult<ArtinRing> {
    let labels: Vec<String> = m.basis.iter().map(|b| b.label.clone()).collect();
    let space = m.space()?;
    let products = binary(&space, "product", &s.product)?;
    ArtinRing::new(labels, products).map_err(semantic)
}

impl Loaded {
    pub fn kind(&self) -> Kind {
        match self {
            Loaded::DgLie(_) => Kind::DgLie,
            Loaded::Linfty(_) => Kind::Linfty,
            Loaded::LieBialgebra(_) => Kind::LieBialgebra,
            Loaded::BiDgLie(_) => Kind::BiDgLie,
            Loaded::Associative(_) => Kind::Associative,
            Loaded::Bv(_) => Kind::Bv,
            Loaded::BvInfty(_) => Kind::BvInfty,
            Loaded::ArtinRing(_) => Kind::ArtinRing,
        }
    }
}

