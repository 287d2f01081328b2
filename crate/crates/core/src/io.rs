//! JSON documents, label resolution and deterministic reports.

use crate::ainfty::{AInftyCategory, AInftyError, CategoryBuilder};
use crate::bimodule::{Bimodule, BimoduleError, ValueSpec};
use crate::chains::{ChainError, ChainMap, FreeComplex, Generator, HomologyProfile};
use crate::hocolim::{DgDiagram, GlobalizedDiagram, HocolimError, LocalToGlobalInput, SpaceWithCover, StrictDiagram};
use crate::lemmas::{Certificate, Generation, Instance, LemmaError};
use crate::linalg::{sv_add, SparseVec};
use crate::quotient::{adjoin_cones, ConeSpec, DirectedSystem, QuotientError};
use crate::simplicial::{cone_point, nerve_of_poset, Poset, SimplicialError, SimplicialSet};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::de::{DeserializeOwned, Error as _};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

pub const FORMAT_VERSION: u64 = 1;

pub const KINDS: [&str; 11] = [
    "complex",
    "map",
    "category",
    "bimodule",
    "poset",
    "simplicial",
    "diagram",
    "space-with-cover",
    "directed-system",
    "local-to-global",
    "pipeline",
];

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("document has no `kind`; expected one of: {}", KINDS.join(", "))]
    MissingKind,
    #[error("unknown kind `{0}`; expected one of: {}", KINDS.join(", "))]
    UnknownKind(String),
    #[error("unsupported format_version {0}; expected {}", FORMAT_VERSION)]
    Version(String),
    #[error("dangling label `{label}`: no {kind} document has that label")]
    Dangling { label: String, kind: &'static str },
    #[error("duplicate document label `{0}`")]
    DuplicateLabel(String),
    #[error("{what} `{name}` is not declared")]
    Unknown { what: &'static str, name: String },
    #[error("{0}")]
    Invalid(String),
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Category(#[from] AInftyError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Hocolim(#[from] HocolimError),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Lemma(#[from] LemmaError),
}

pub fn ser_bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

pub fn ser_sparse<S: Serializer>(v: &SparseVec, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(v.iter().map(|(k, x)| (k.to_string(), x.to_string())))
}

/// Strict decimal integer: optional minus sign, then digits.
pub fn parse_coeff(s: &str) -> Option<BigInt> {
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.is_empty() || !body.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

mod coeff {
    use super::*;

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        parse_coeff(&s).ok_or_else(|| D::Error::custom(format!("coefficient {s:?} is not a decimal integer string")))
    }
}

/// `[target_id, source_id, "coeff"]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry(pub String, pub String, #[serde(with = "coeff")] pub BigInt);

/// `[id, "coeff"]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term(pub String, #[serde(with = "coeff")] pub BigInt);

/// `[[vertices], "coeff"]`: a simplicial chain term.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplexTerm(pub Vec<usize>, #[serde(with = "coeff")] pub BigInt);

pub trait Payload: Serialize + DeserializeOwned + Clone {
    const KIND: &'static str;
    fn label(&self) -> &str;
    fn from_document(doc: &Document) -> Option<&Self>;
    fn into_document(self) -> Document;
}

/// A reference to another document: its label, or the document inline.
#[derive(Clone, Debug, PartialEq)]
pub enum Ref<T> {
    Label(String),
    Inline(Box<T>),
}

impl<T> Ref<T> {
    pub fn inline(t: T) -> Self {
        Ref::Inline(Box::new(t))
    }
}

impl<T: Payload> Serialize for Ref<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Ref::Label(l) => s.serialize_str(l),
            Ref::Inline(t) => t.serialize(s),
        }
    }
}

impl<'de, T: Payload> Deserialize<'de> for Ref<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::String(s) => Ok(Ref::Label(s)),
            Value::Object(mut m) => {
                if let Some(k) = m.remove("kind") {
                    if k.as_str() != Some(T::KIND) {
                        return Err(D::Error::custom(format!("inline document of kind {k} where {} is expected", T::KIND)));
                    }
                }
                m.remove("format_version");
                serde_json::from_value(Value::Object(m)).map(|t| Ref::Inline(Box::new(t))).map_err(D::Error::custom)
            }
            _ => Err(D::Error::custom(format!("expected a label or an inline {} document", T::KIND))),
        }
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDoc {
    pub id: String,
    pub parity: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub label: String,
    pub generators: Vec<GeneratorDoc>,
    #[serde(default)]
    pub differential: Vec<Entry>,
}

fn parity(p: u8, id: &str) -> Result<u8, DocError> {
    match p {
        0 | 1 => Ok(p),
        _ => Err(DocError::Invalid(format!("generator `{id}` has parity {p}; parities are 0 or 1"))),
    }
}

fn index_of(c: &FreeComplex, id: &str) -> Result<usize, DocError> {
    c.index_of(id).ok_or_else(|| DocError::Unknown { what: "generator", name: format!("{id} in {}", c.label()) })
}

impl ComplexDoc {
    pub fn build(&self) -> Result<FreeComplex, DocError> {
        let mut gens = Vec::with_capacity(self.generators.len());
        for g in &self.generators {
            gens.push(Generator::new(g.id.clone(), parity(g.parity, &g.id)?));
        }
        let shell = FreeComplex::new(self.label.clone(), gens.clone(), [])?;
        let mut entries = Vec::with_capacity(self.differential.len());
        for Entry(t, s, c) in &self.differential {
            entries.push((index_of(&shell, t)?, index_of(&shell, s)?, c.clone()));
        }
        Ok(FreeComplex::new(self.label.clone(), gens, entries)?)
    }

    pub fn from_complex(c: &FreeComplex) -> Self {
        let id = |i: usize| c.generator(i).id.clone();
        ComplexDoc {
            label: c.label().to_string(),
            generators: c.generators().iter().map(|g| GeneratorDoc { id: g.id.clone(), parity: g.parity }).collect(),
            differential: c.entries().into_iter().map(|(t, s, x)| Entry(id(t), id(s), x)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub label: String,
    pub source: Ref<ComplexDoc>,
    pub target: Ref<ComplexDoc>,
    #[serde(default)]
    pub parity_shift: u8,
    #[serde(default)]
    pub entries: Vec<Entry>,
    /// Identity of `source`; `entries` must then be empty.
    #[serde(default, skip_serializing_if = "is_false")]
    pub identity: bool,
}

impl MapDoc {
    pub fn from_map(label: impl Into<String>, f: &ChainMap, source: Ref<ComplexDoc>, target: Ref<ComplexDoc>) -> Self {
        MapDoc {
            label: label.into(),
            source,
            target,
            parity_shift: f.parity_shift,
            entries: f
                .entries()
                .into_iter()
                .map(|(t, s, x)| Entry(f.target.generator(t).id.clone(), f.source.generator(s).id.clone(), x))
                .collect(),
            identity: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectDoc {
    pub name: String,
    pub unit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    pub source: String,
    pub target: String,
    pub generators: Vec<GeneratorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MuDoc {
    pub word: Vec<String>,
    pub output: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub cycle: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CertificateDoc {
    Member,
    ZeroObject,
    Cone,
    Retract { through: String, section: Vec<Term>, retraction: Vec<Term> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedDoc {
    pub object: String,
    pub certificate: CertificateDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryDoc {
    pub label: String,
    #[serde(default)]
    pub directed: bool,
    pub objects: Vec<ObjectDoc>,
    /// `[greater, lesser]` pairs.
    #[serde(default)]
    pub order: Vec<(String, String)>,
    #[serde(default)]
    pub homs: Vec<HomDoc>,
    #[serde(default)]
    pub mu: Vec<MuDoc>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub explicit_units: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cones: Vec<ConeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subcategory: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generated: Vec<GeneratedDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub local: Vec<String>,
}

fn sparse_by_name(c: &AInftyCategory, terms: &[Term]) -> Result<SparseVec, DocError> {
    let mut v = SparseVec::new();
    for Term(id, x) in terms {
        sv_add(&mut v, c.gen_id(id)?, x);
    }
    Ok(v)
}

fn object(c: &AInftyCategory, name: &str) -> Result<usize, DocError> {
    c.object_id(name).map_err(|_| DocError::Unknown { what: "object", name: format!("{name} in {}", c.label()) })
}

impl CategoryDoc {
    pub fn build(&self) -> Result<AInftyCategory, DocError> {
        let mut b = CategoryBuilder::new(self.label.clone());
        for o in &self.objects {
            b.object_with_unit(o.name.clone(), o.unit.clone())?;
        }
        for (g, l) in &self.order {
            let (g, l) = (b.object_id(g)?, b.object_id(l)?);
            b.order(g, l);
        }
        for h in &self.homs {
            let (s, t) = (b.object_id(&h.source)?, b.object_id(&h.target)?);
            for g in &h.generators {
                b.gen(g.id.clone(), s, t, parity(g.parity, &g.id)?)?;
            }
        }
        for m in &self.mu {
            let word = m.word.iter().map(|g| b.gen_id(g)).collect::<Result<Vec<_>, _>>()?;
            let mut out = SparseVec::new();
            for Term(id, x) in &m.output {
                sv_add(&mut out, b.gen_id(id)?, x);
            }
            if word.is_empty() {
                return Err(DocError::Invalid("mu entry with an empty word".into()));
            }
            b.mu_big(word, out);
        }
        if self.explicit_units {
            b.explicit_units();
        }
        Ok(b.build(self.directed)?)
    }

    /// Omits unit products that the builder fills in by itself.
    pub fn from_category(c: &AInftyCategory) -> Self {
        let name = |x: usize| c.objects()[x].clone();
        let mut homs: Vec<HomDoc> = Vec::new();
        for g in c.gens().iter().enumerate().filter(|(g, _)| !c.is_unit(*g)).map(|(_, g)| g) {
            let (s, t) = (name(g.src), name(g.tgt));
            let doc = GeneratorDoc { id: g.id.clone(), parity: g.parity };
            match homs.iter_mut().find(|h| h.source == s && h.target == t) {
                Some(h) => h.generators.push(doc),
                None => homs.push(HomDoc { source: s, target: t, generators: vec![doc] }),
            }
        }
        let standard = |w: &[usize], out: &SparseVec| {
            if w.len() != 2 || out.len() != 1 {
                return false;
            }
            let (g, x) = out.iter().next().expect("one term");
            if c.is_unit(w[0]) && w[1] == *g && c.gen(*g).src == c.gen(w[0]).tgt {
                return x.is_one();
            }
            let sign = if c.gen(*g).parity == 0 { BigInt::one() } else { -BigInt::one() };
            c.is_unit(w[1]) && w[0] == *g && *x == sign
        };
        let mu = c
            .mu_entries()
            .filter(|(w, out)| !standard(w, out))
            .map(|(w, out)| MuDoc { word: c.names(w), output: out.iter().map(|(g, x)| Term(c.gen(*g).id.clone(), x.clone())).collect() })
            .collect();
        CategoryDoc {
            label: c.label().to_string(),
            directed: c.is_directed(),
            objects: (0..c.n_objects()).map(|x| ObjectDoc { name: name(x), unit: c.gen(c.unit(x)).id.clone() }).collect(),
            order: c.order_relations().iter().map(|(g, l)| (name(*g), name(*l))).collect(),
            homs,
            mu,
            explicit_units: false,
            cones: vec![],
            subcategory: vec![],
            generated: vec![],
            local: vec![],
        }
    }

    /// The category with its cones adjoined, plus subcategory and generation data.
    pub fn instance(&self) -> Result<Instance, DocError> {
        let base = self.build()?;
        let (category, summands) = if self.cones.is_empty() {
            (base, BTreeMap::new())
        } else {
            let mut specs = Vec::new();
            for c in &self.cones {
                let spec = ConeSpec::new(&base, sparse_by_name(&base, &c.cycle)?)?;
                specs.push(match &c.name {
                    Some(n) => spec.named(n.clone()),
                    None => spec,
                });
            }
            let cc = adjoin_cones(&base, &specs)?;
            (cc.category, cc.summands)
        };
        let objs = |names: &[String]| names.iter().map(|n| object(&category, n)).collect::<Result<Vec<_>, _>>();
        let a = objs(&self.subcategory)?;
        let local = objs(&self.local)?;
        let mut generated: Vec<Generation> = a.iter().map(|x| Generation { object: *x, certificate: Certificate::Member }).collect();
        for g in &self.generated {
            let o = object(&category, &g.object)?;
            let certificate = match &g.certificate {
                CertificateDoc::Member => Certificate::Member,
                CertificateDoc::ZeroObject => Certificate::ZeroObject,
                CertificateDoc::Cone => Certificate::Cone,
                CertificateDoc::Retract { through, section, retraction } => Certificate::Retract {
                    through: object(&category, through)?,
                    section: sparse_by_name(&category, section)?,
                    retraction: sparse_by_name(&category, retraction)?,
                },
            };
            if !(certificate == Certificate::Member && a.contains(&o)) {
                generated.push(Generation { object: o, certificate });
            }
        }
        Ok(Instance { label: self.label.clone(), category: Arc::new(category), cones: summands, a, generated, local })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueDoc {
    pub id: String,
    pub left: String,
    pub right: String,
    pub parity: u8,
}

/// `word` is `k` left letters, one value, then `l` right letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub k: usize,
    pub l: usize,
    pub word: Vec<String>,
    pub output: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BimoduleDoc {
    pub label: String,
    pub left: Ref<CategoryDoc>,
    pub right: Ref<CategoryDoc>,
    pub values: Vec<ValueDoc>,
    #[serde(default)]
    pub actions: Vec<ActionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetDoc {
    pub label: String,
    pub elements: Vec<String>,
    /// `[a, b]` for each covering relation `a < b`.
    #[serde(default)]
    pub hasse: Vec<(String, String)>,
}

impl PosetDoc {
    pub fn build(&self) -> Result<Poset, DocError> {
        let els: Vec<&str> = self.elements.iter().map(String::as_str).collect();
        let rels: Vec<(&str, &str)> = self.hasse.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        Ok(Poset::from_names(&els, &rels)?)
    }

    pub fn from_poset(label: impl Into<String>, p: &Poset) -> Self {
        let e = &p.elements;
        PosetDoc {
            label: label.into(),
            elements: e.clone(),
            hasse: p.hasse().into_iter().map(|(a, b)| (e[a].clone(), e[b].clone())).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplicialDoc {
    pub label: String,
    pub vertices: Vec<String>,
    /// Sorted vertex lists; faces are added automatically.
    #[serde(default)]
    pub simplices: Vec<Vec<usize>>,
    /// Adjoin a cone point after every other vertex.
    #[serde(default, skip_serializing_if = "is_false")]
    pub cone: bool,
}

impl SimplicialDoc {
    pub fn build(&self) -> Result<SimplicialSet, DocError> {
        for s in &self.simplices {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(DocError::Invalid(format!("simplex {s:?} is not a sorted vertex list")));
            }
        }
        let x = SimplicialSet::from_vertex_lists(self.label.clone(), self.vertices.clone(), &self.simplices)?;
        Ok(if self.cone { cone_point(&x).with_label(self.label.clone()) } else { x })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub from: String,
    pub to: String,
    /// Missing means the identity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<Ref<MapDoc>>,
}

/// Value of a diagram on the top cell of a nondegenerate simplex of dimension at least 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellDoc {
    pub simplex: Vec<String>,
    pub map: Ref<MapDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramDoc {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Ref<SimplicialDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poset: Option<Ref<PosetDoc>>,
    /// One complex per vertex, in vertex order.
    pub complexes: Vec<Ref<ComplexDoc>>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub higher: Vec<CellDoc>,
    /// Solve for every higher cell not listed in `higher`.
    #[serde(default, skip_serializing_if = "is_false")]
    pub coherent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub global: Option<Ref<ComplexDoc>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub to_global: Vec<Ref<MapDoc>>,
}

#[derive(Clone, Debug)]
pub struct BuiltDiagram {
    pub label: String,
    pub dg: DgDiagram,
    pub strict: Option<StrictDiagram>,
    pub poset: Option<Poset>,
    pub global: Option<(Arc<FreeComplex>, Vec<ChainMap>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub element: String,
    pub simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub label: String,
    pub space: Ref<SimplicialDoc>,
    pub poset: Ref<PosetDoc>,
    pub pieces: Vec<PieceDoc>,
    /// Compute the fundamental cycle of a closed oriented pseudomanifold.
    #[serde(default = "yes")]
    pub manifold: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fundamental: Vec<SimplexTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub label: String,
    pub category: Ref<CategoryDoc>,
    pub stages: Vec<String>,
    /// `cycles[i] ∈ hom(stages[i + 1], stages[i])`.
    pub cycles: Vec<Vec<Term>>,
    pub probe: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalToGlobalDoc {
    pub label: String,
    pub poset: Ref<PosetDoc>,
    pub cc: Ref<DiagramDoc>,
    pub k: Ref<DiagramDoc>,
    pub a: Ref<DiagramDoc>,
    pub oc_local: Vec<Ref<MapDoc>>,
    pub unit_local: Vec<Ref<MapDoc>>,
    pub oc_global: Ref<MapDoc>,
    pub unit_global: Ref<MapDoc>,
    /// Unit cycle in the global complex of `a`.
    pub unit: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    /// Command-line arguments after the program name; relative paths resolve against the pipeline file.
    pub args: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineDoc {
    pub label: String,
    pub steps: Vec<StepDoc>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    Complex(ComplexDoc),
    Map(MapDoc),
    Category(CategoryDoc),
    Bimodule(BimoduleDoc),
    Poset(PosetDoc),
    Simplicial(SimplicialDoc),
    Diagram(DiagramDoc),
    SpaceWithCover(CoverDoc),
    DirectedSystem(SystemDoc),
    LocalToGlobal(LocalToGlobalDoc),
    Pipeline(PipelineDoc),
}

macro_rules! payload {
    ($($t:ty => $variant:ident, $kind:literal;)*) => {
        $(impl Payload for $t {
            const KIND: &'static str = $kind;
            fn label(&self) -> &str {
                &self.label
            }
            fn from_document(doc: &Document) -> Option<&Self> {
                match doc {
                    Document::$variant(x) => Some(x),
                    _ => None,
                }
            }
            fn into_document(self) -> Document {
                Document::$variant(self)
            }
        })*

        impl Document {
            pub fn kind(&self) -> &'static str {
                match self {
                    $(Document::$variant(_) => $kind,)*
                }
            }

            pub fn label(&self) -> &str {
                match self {
                    $(Document::$variant(x) => &x.label,)*
                }
            }

            fn payload(&self) -> Value {
                match self {
                    $(Document::$variant(x) => serde_json::to_value(x),)*
                }
                .expect("documents serialize")
            }

            fn from_payload(kind: &str, v: Value) -> Result<Document, DocError> {
                match kind {
                    $($kind => Ok(Document::$variant(deserialize_at(v)?)),)*
                    other => Err(DocError::UnknownKind(other.to_string())),
                }
            }
        }
    };
}

payload! {
    ComplexDoc => Complex, "complex";
    MapDoc => Map, "map";
    CategoryDoc => Category, "category";
    BimoduleDoc => Bimodule, "bimodule";
    PosetDoc => Poset, "poset";
    SimplicialDoc => Simplicial, "simplicial";
    DiagramDoc => Diagram, "diagram";
    CoverDoc => SpaceWithCover, "space-with-cover";
    SystemDoc => DirectedSystem, "directed-system";
    LocalToGlobalDoc => LocalToGlobal, "local-to-global";
    PipelineDoc => Pipeline, "pipeline";
}

fn deserialize_at<T: DeserializeOwned>(v: Value) -> Result<T, DocError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let p = e.path().to_string();
        let path = if p == "." { "$".to_string() } else { format!("$.{p}") };
        DocError::Schema { path, message: e.into_inner().to_string() }
    })
}

/// Parses and validates one document. Self-contained kinds are built once to check them.
pub fn parse_document(text: &str) -> Result<Document, DocError> {
    let v: Value = serde_json::from_str(text).map_err(|e| DocError::Json(e.to_string()))?;
    let Value::Object(mut obj) = v else {
        return Err(DocError::Schema { path: "$".into(), message: "a document is a JSON object".into() });
    };
    let kind = match obj.remove("kind") {
        Some(Value::String(k)) => k,
        Some(_) | None => return Err(DocError::MissingKind),
    };
    if !KINDS.contains(&kind.as_str()) {
        return Err(DocError::UnknownKind(kind));
    }
    match obj.remove("format_version") {
        Some(Value::Number(n)) if n.as_u64() == Some(FORMAT_VERSION) => {}
        Some(other) => return Err(DocError::Version(other.to_string())),
        None => return Err(DocError::Version("missing".into())),
    }
    let doc = Document::from_payload(&kind, Value::Object(obj))?;
    match &doc {
        Document::Complex(c) => drop(c.build()?),
        Document::Category(c) => drop(c.instance()?),
        Document::Poset(p) => drop(p.build()?),
        Document::Simplicial(s) => drop(s.build()?),
        _ => {}
    }
    Ok(doc)
}

pub fn emit_document(doc: &Document) -> String {
    let mut m = Map::new();
    m.insert("kind".into(), Value::String(doc.kind().into()));
    m.insert("format_version".into(), Value::from(FORMAT_VERSION));
    if let Value::Object(p) = doc.payload() {
        m.extend(p);
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Documents by label; every cross-reference is resolved here.
#[derive(Clone, Debug, Default)]
pub struct Registry {
    docs: Vec<Document>,
    by_label: HashMap<String, usize>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, doc: Document) -> Result<(), DocError> {
        if self.by_label.contains_key(doc.label()) {
            return Err(DocError::DuplicateLabel(doc.label().to_string()));
        }
        self.by_label.insert(doc.label().to_string(), self.docs.len());
        self.docs.push(doc);
        Ok(())
    }

    pub fn documents(&self) -> &[Document] {
        &self.docs
    }

    pub fn get<T: Payload>(&self, r: &Ref<T>) -> Result<T, DocError> {
        match r {
            Ref::Inline(t) => Ok((**t).clone()),
            Ref::Label(l) => self
                .by_label
                .get(l)
                .and_then(|i| T::from_document(&self.docs[*i]))
                .cloned()
                .ok_or_else(|| DocError::Dangling { label: l.clone(), kind: T::KIND }),
        }
    }

    pub fn complex(&self, r: &Ref<ComplexDoc>) -> Result<Arc<FreeComplex>, DocError> {
        Ok(Arc::new(self.get(r)?.build()?))
    }

    fn map_with(&self, r: &Ref<MapDoc>, linear: bool) -> Result<ChainMap, DocError> {
        let m = self.get(r)?;
        let (src, tgt) = (self.complex(&m.source)?, self.complex(&m.target)?);
        if m.identity {
            if src != tgt || !m.entries.is_empty() || m.parity_shift != 0 {
                return Err(DocError::Invalid(format!("identity map `{}` must have equal ends and no entries", m.label)));
            }
            return Ok(ChainMap::identity(src));
        }
        let mut entries = Vec::with_capacity(m.entries.len());
        for Entry(t, s, x) in &m.entries {
            entries.push((index_of(&tgt, t)?, index_of(&src, s)?, x.clone()));
        }
        Ok(match linear {
            true => ChainMap::new_linear(src, tgt, m.parity_shift, entries)?,
            false => ChainMap::new(src, tgt, m.parity_shift, entries)?,
        })
    }

    pub fn map(&self, r: &Ref<MapDoc>) -> Result<ChainMap, DocError> {
        self.map_with(r, false)
    }

    pub fn category(&self, r: &Ref<CategoryDoc>) -> Result<AInftyCategory, DocError> {
        self.get(r)?.build()
    }

    pub fn bimodule(&self, r: &Ref<BimoduleDoc>) -> Result<Bimodule, DocError> {
        let b = self.get(r)?;
        let left = Arc::new(self.category(&b.left)?);
        let right = Arc::new(self.category(&b.right)?);
        let values: Vec<ValueSpec> = b
            .values
            .iter()
            .map(|v| Ok(ValueSpec { id: v.id.clone(), left: v.left.clone(), right: v.right.clone(), parity: parity(v.parity, &v.id)? }))
            .collect::<Result<_, DocError>>()?;
        let mut actions = Vec::new();
        for a in &b.actions {
            if a.word.len() != a.k + a.l + 1 || !b.values.iter().any(|v| v.id == a.word[a.k]) {
                return Err(DocError::Invalid(format!("action word {:?} does not have a value at position {}", a.word, a.k)));
            }
            actions.push((a.word.clone(), a.output.iter().map(|Term(id, x)| (id.clone(), x.clone())).collect()));
        }
        Ok(Bimodule::from_data(&b.label, left, right, &values, &actions)?)
    }

    pub fn poset(&self, r: &Ref<PosetDoc>) -> Result<Poset, DocError> {
        self.get(r)?.build()
    }

    pub fn simplicial(&self, r: &Ref<SimplicialDoc>) -> Result<SimplicialSet, DocError> {
        self.get(r)?.build()
    }

    pub fn diagram(&self, r: &Ref<DiagramDoc>) -> Result<BuiltDiagram, DocError> {
        let d = self.get(r)?;
        let complexes = d.complexes.iter().map(|c| self.complex(c)).collect::<Result<Vec<_>, _>>()?;
        let (base, poset) = match (&d.base, &d.poset) {
            (Some(b), None) => (self.simplicial(b)?, None),
            (None, Some(p)) => {
                let p = self.poset(p)?;
                (nerve_of_poset(&p), Some(p))
            }
            _ => return Err(DocError::Invalid(format!("diagram `{}` needs exactly one of `base` and `poset`", d.label))),
        };
        let vertex = |name: &str| {
            (0..base.count(0)).find(|v| base.name(0, *v) == name).ok_or_else(|| DocError::Unknown { what: "vertex", name: name.into() })
        };
        let edge_map = |e: &EdgeDoc, a: usize, b: usize| -> Result<ChainMap, DocError> {
            match &e.map {
                Some(m) => self.map(m),
                None if complexes.get(a) == complexes.get(b) && a < complexes.len() => Ok(ChainMap::identity(complexes[a].clone())),
                None => Err(DocError::Invalid(format!("edge {} -> {} has no map and different ends", e.from, e.to))),
            }
        };
        let mut given: BTreeMap<(usize, usize), ChainMap> = BTreeMap::new();
        let edges: Vec<ChainMap> = match &poset {
            Some(p) => {
                let mut covering = BTreeMap::new();
                for e in &d.edges {
                    let (a, b) = (vertex(&e.from)?, vertex(&e.to)?);
                    covering.insert((a, b), edge_map(e, a, b)?);
                }
                for (a, b) in p.hasse() {
                    if !covering.contains_key(&(a, b)) {
                        return Err(DocError::Invalid(format!("no map on the covering relation {} < {}", p.elements[a], p.elements[b])));
                    }
                }
                StrictDiagram::over_poset(p, complexes.clone(), &covering)?.edges
            }
            None => {
                let mut by_edge: Vec<Option<ChainMap>> = vec![None; base.count(1)];
                for e in &d.edges {
                    let (a, b) = (vertex(&e.from)?, vertex(&e.to)?);
                    let k = (0..base.count(1))
                        .find(|k| base.vertices(1, *k) == [a, b])
                        .ok_or_else(|| DocError::Unknown { what: "edge", name: format!("{} -> {}", e.from, e.to) })?;
                    by_edge[k] = Some(edge_map(e, a, b)?);
                }
                by_edge
                    .into_iter()
                    .enumerate()
                    .map(|(k, m)| m.ok_or_else(|| DocError::Invalid(format!("no map on edge {}", base.name(1, k)))))
                    .collect::<Result<_, _>>()?
            }
        };
        for cell in &d.higher {
            let vs = cell.simplex.iter().map(|v| vertex(v)).collect::<Result<Vec<_>, _>>()?;
            let q = vs.len().saturating_sub(1);
            let k = (q >= 2 && q <= base.dim())
                .then(|| (0..base.count(q)).find(|k| base.vertices(q, *k) == vs))
                .flatten()
                .ok_or_else(|| DocError::Unknown { what: "simplex", name: format!("{:?}", cell.simplex) })?;
            given.insert((q, k), self.map_with(&cell.map, true)?);
        }
        let (dg, strict) = if d.coherent || !given.is_empty() {
            (DgDiagram::complete(base, complexes, edges, &given, d.seed)?, None)
        } else {
            let s = StrictDiagram::new(base, complexes, edges)?;
            (s.to_dg()?, Some(s))
        };
        let global = match &d.global {
            Some(g) => Some((self.complex(g)?, d.to_global.iter().map(|m| self.map(m)).collect::<Result<Vec<_>, _>>()?)),
            None => None,
        };
        Ok(BuiltDiagram { label: d.label, dg, strict, poset, global })
    }

    pub fn cover(&self, r: &Ref<CoverDoc>) -> Result<SpaceWithCover, DocError> {
        let c = self.get(r)?;
        let space = self.simplicial(&c.space)?;
        let poset = self.poset(&c.poset)?;
        let mut pieces: Vec<Option<Vec<Vec<usize>>>> = vec![None; poset.len()];
        for p in &c.pieces {
            let i = poset.index(&p.element).ok_or_else(|| DocError::Unknown { what: "poset element", name: p.element.clone() })?;
            if pieces[i].replace(p.simplices.clone()).is_some() {
                return Err(DocError::Invalid(format!("piece `{}` is listed twice", p.element)));
            }
        }
        let pieces: Vec<Vec<Vec<usize>>> = pieces
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| DocError::Invalid(format!("no piece for `{}`", poset.elements[i]))))
            .collect::<Result<_, _>>()?;
        let manual = !c.fundamental.is_empty();
        let mut cover = SpaceWithCover::new(space, poset, &pieces, c.manifold && !manual)?;
        if manual {
            let x = &cover.space;
            let off = x.chain_offsets();
            let mut cycle = SparseVec::new();
            for SimplexTerm(vs, coeff) in &c.fundamental {
                let n = vs.len().saturating_sub(1);
                let k = (n <= x.dim())
                    .then(|| (0..x.count(n)).find(|k| x.vertices(n, *k) == *vs))
                    .flatten()
                    .ok_or_else(|| DocError::Unknown { what: "simplex", name: format!("{vs:?}") })?;
                sv_add(&mut cycle, off[n] + k, coeff);
            }
            cover = cover.with_fundamental(cycle)?;
        }
        Ok(cover)
    }

    /// The category, the system, and the probe object.
    pub fn system(&self, r: &Ref<SystemDoc>) -> Result<(AInftyCategory, DirectedSystem, usize), DocError> {
        let s = self.get(r)?;
        let c = self.category(&s.category)?;
        if s.cycles.len() + 1 != s.stages.len() {
            return Err(DocError::Invalid(format!(
                "{} stages need {} connecting cycles",
                s.stages.len(),
                s.stages.len().saturating_sub(1)
            )));
        }
        let stages = s.stages.iter().map(|n| object(&c, n)).collect::<Result<Vec<_>, _>>()?;
        let cycles = s.cycles.iter().map(|t| sparse_by_name(&c, t)).collect::<Result<Vec<_>, _>>()?;
        let probe = object(&c, &s.probe)?;
        Ok((c, DirectedSystem { stages, cycles }, probe))
    }

    pub fn local_to_global(&self, r: &Ref<LocalToGlobalDoc>) -> Result<LocalToGlobalInput, DocError> {
        let l = self.get(r)?;
        let globalized = |r: &Ref<DiagramDoc>| -> Result<GlobalizedDiagram, DocError> {
            let d = self.diagram(r)?;
            let (Some(diagram), Some((global, to_global))) = (d.strict, d.global) else {
                return Err(DocError::Invalid(format!("diagram `{}` must be strict and carry `global` and `to_global`", d.label)));
            };
            Ok(GlobalizedDiagram { diagram, global, to_global })
        };
        let a = globalized(&l.a)?;
        let maps = |v: &[Ref<MapDoc>]| v.iter().map(|m| self.map(m)).collect::<Result<Vec<_>, _>>();
        let mut unit = SparseVec::new();
        for Term(id, x) in &l.unit {
            sv_add(&mut unit, index_of(&a.global, id)?, x);
        }
        Ok(LocalToGlobalInput {
            poset: self.poset(&l.poset)?,
            cc: globalized(&l.cc)?,
            k: globalized(&l.k)?,
            a,
            oc_local: maps(&l.oc_local)?,
            unit_local: maps(&l.unit_local)?,
            oc_global: self.map(&l.oc_global)?,
            unit_global: self.map(&l.unit_global)?,
            unit,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Computed,
    Pass,
    Undetermined,
    Fail,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Computed | Verdict::Pass => 0,
            Verdict::Fail | Verdict::Undetermined => 1,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Verdict of a sequence of reports: the worst one.
    pub fn combine(self, other: Verdict) -> Verdict {
        self.max(other)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub verdict: Verdict,
    pub results: Map<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), verdict: Verdict::Computed, results: Map::new() }
    }

    pub fn put(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(key.to_string(), serde_json::to_value(value).expect("report values serialize"));
    }

    pub fn render(&self, format: Format, color: bool) -> String {
        match format {
            Format::Json => {
                let mut m = Map::new();
                m.insert("format_version".into(), Value::from(FORMAT_VERSION));
                m.insert("command".into(), Value::String(self.command.clone()));
                m.insert("verdict".into(), serde_json::to_value(self.verdict).expect("verdict"));
                m.insert("results".into(), Value::Object(self.results.clone()));
                let mut s = serde_json::to_string_pretty(&Value::Object(m)).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let v = serde_json::to_value(self.verdict).expect("verdict");
                let v = v.as_str().unwrap_or_default();
                let shown = match (color, self.verdict) {
                    (false, _) => v.to_string(),
                    (true, Verdict::Computed | Verdict::Pass) => format!("\x1b[32m{v}\x1b[0m"),
                    (true, _) => format!("\x1b[31m{v}\x1b[0m"),
                };
                let mut s = format!("sector-algebra report\ncommand: {}\nverdict: {shown}\n", self.command);
                for (k, val) in &self.results {
                    text_entry(&mut s, 0, k, val);
                }
                s
            }
        }
    }
}

pub fn emit_report(r: &Report, format: Format) -> String {
    r.render(format, false)
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| scalar_leaf(x)) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn scalar_leaf(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn text_entry(out: &mut String, depth: usize, key: &str, v: &Value) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(v) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}:");
    text_value(out, depth + 1, v);
}

fn text_value(out: &mut String, depth: usize, v: &Value) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                text_entry(out, depth, k, x);
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => {
                        let _ = writeln!(out, "{pad}- {s}");
                    }
                    None => {
                        let _ = writeln!(out, "{pad}-");
                        text_value(out, depth + 1, x);
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", scalar(other).unwrap_or_default());
        }
    }
}

/// Homology profile in report form.
pub fn profile_value(h: &HomologyProfile) -> Value {
    let part = |p: usize| {
        serde_json::json!({
            "free_rank": h.parity[p].free_rank,
            "torsion": h.parity[p].torsion.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        })
    };
    serde_json::json!({ "summary": h.to_string(), "parity0": part(0), "parity1": part(1) })
}

/// Nonzero coefficients of a chain in basis order.
pub fn chain_value(c: &FreeComplex, v: &SparseVec) -> Vec<(String, String)> {
    v.iter().filter(|(_, x)| !x.is_zero()).map(|(g, x)| (c.generator(*g).id.clone(), x.to_string())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CIRCLE: &str = r#"{
        "kind": "complex", "format_version": 1, "label": "circle",
        "generators": [{"id": "v", "parity": 0}, {"id": "w", "parity": 0}, {"id": "a", "parity": 1}, {"id": "b", "parity": 1}],
        "differential": [["w", "a", "1"], ["v", "a", "-1"], ["v", "b", "1"], ["w", "b", "-1"]]
    }"#;

    #[test]
    fn minimal_complex_parses() {
        let d = parse_document(CIRCLE).unwrap();
        let Document::Complex(c) = &d else { panic!("kind") };
        assert_eq!(c.build().unwrap().homology(), HomologyProfile::free(1, 1));
    }

    #[test]
    fn square_nonzero_names_the_pair() {
        let bad = r#"{"kind": "complex", "format_version": 1, "label": "bad",
            "generators": [{"id": "x", "parity": 0}, {"id": "y", "parity": 1}, {"id": "z", "parity": 0}],
            "differential": [["y", "x", "1"], ["z", "y", "1"]]}"#;
        let e = parse_document(bad).unwrap_err().to_string();
        assert!(e.contains("d^2") && e.contains("on z") && e.contains("d(d(x))"), "{e}");
    }

    #[test]
    fn unknown_kind_lists_the_kinds() {
        let e = parse_document(r#"{"kind": "sheaf", "format_version": 1}"#).unwrap_err().to_string();
        assert!(e.contains("sheaf"));
        for k in KINDS {
            assert!(e.contains(k), "{e}");
        }
    }

    #[test]
    fn schema_errors_carry_a_path() {
        let bad = CIRCLE.replace(r#"["v", "b", "1"]"#, r#"["v", "b", "1.5"]"#);
        match parse_document(&bad) {
            Err(DocError::Schema { path, .. }) => assert_eq!(path, "$.differential[2][2]"),
            other => panic!("{other:?}"),
        }
        let e = parse_document(&CIRCLE.replace(r#""format_version": 1"#, r#""format_version": 7"#)).unwrap_err();
        assert!(matches!(e, DocError::Version(_)));
        let e = parse_document(&CIRCLE.replace("\"generators\"", "\"gens\"")).unwrap_err();
        assert!(matches!(e, DocError::Schema { .. }));
    }

    #[test]
    fn coefficients_are_strict_decimal_strings() {
        assert_eq!(parse_coeff("-12"), Some(BigInt::from(-12)));
        assert_eq!(parse_coeff("123456789012345678901234567890").map(|x| x.to_string()).as_deref(), Some("123456789012345678901234567890"));
        for bad in ["", "-", "+1", "1_0", "0x1", " 1", "1e3"] {
            assert!(parse_coeff(bad).is_none(), "{bad}");
        }
    }

    #[test]
    fn documents_round_trip() {
        let d = parse_document(CIRCLE).unwrap();
        assert_eq!(parse_document(&emit_document(&d)).unwrap(), d);
        for (_, c) in crate::library::example_library() {
            let doc = Document::Category(CategoryDoc::from_category(&c));
            let again = parse_document(&emit_document(&doc)).unwrap();
            assert_eq!(again, doc);
            let Document::Category(cd) = again else { unreachable!() };
            let rebuilt = cd.build().unwrap();
            assert_eq!(CategoryDoc::from_category(&rebuilt), cd);
            assert!(rebuilt.check_ainfty(4).passed());
        }
    }

    #[test]
    fn dangling_labels_are_reported() {
        let mut reg = Registry::new();
        reg.insert(parse_document(CIRCLE).unwrap()).unwrap();
        let m = MapDoc {
            label: "f".into(),
            source: Ref::Label("circle".into()),
            target: Ref::Label("disk".into()),
            parity_shift: 0,
            entries: vec![],
            identity: false,
        };
        assert!(matches!(reg.map(&Ref::inline(m.clone())), Err(DocError::Dangling { .. })));
        let id = MapDoc { target: Ref::Label("circle".into()), identity: true, ..m };
        assert!(reg.map(&Ref::inline(id)).unwrap().is_quasi_iso().unwrap());
        assert!(matches!(reg.insert(parse_document(CIRCLE).unwrap()), Err(DocError::DuplicateLabel(_))));
    }

    #[test]
    fn empty_report_is_header_only() {
        let r = Report::new("homology");
        assert_eq!(emit_report(&r, Format::Text), "sector-algebra report\ncommand: homology\nverdict: computed\n");
        assert_eq!(
            emit_report(&r, Format::Json),
            "{\n  \"format_version\": 1,\n  \"command\": \"homology\",\n  \"verdict\": \"computed\",\n  \"results\": {}\n}\n"
        );
    }

    #[test]
    fn witnesses_print_in_basis_order() {
        let Document::Complex(c) = parse_document(CIRCLE).unwrap() else { unreachable!() };
        let c = c.build().unwrap();
        let v = SparseVec::from([(3, BigInt::from(1)), (2, BigInt::from(1))]);
        let mut r = Report::new("x");
        r.put("witness", chain_value(&c, &v));
        assert_eq!(emit_report(&r, Format::Text).lines().skip(3).collect::<Vec<_>>(), ["witness:", "  - [a, 1]", "  - [b, 1]"]);
    }
}
