//! A∞-bimodules stored as collage categories, bar tensor products, collapse maps and
//! Hochschild complexes.
//!
//! A bimodule `B` over `(C, D)` is encoded by the category with objects `C ⊔ D`, the homs of `C` and
//! `D`, and `B(X, Y)` placed as hom from `X ∈ C` to `Y ∈ D` with parity shifted by one. The bimodule
//! relations are then the A∞ relations of this collage, and the action `μ^{k|1|ℓ}` is its `μ` on
//! words `(c_1, …, c_k, b, d_1, …, d_ℓ)` read in path order.

use crate::ainfty::{AInftyCategory, AInftyError, AInftyFunctor, CategoryBuilder, Report, Violation};
use crate::chains::{ChainError, ChainMap, FreeComplex, Generator};
use crate::linalg::{sv_add, SparseVec};
use crate::words::{dangerous, letter_complex, longest_path, quotient_model, Finiteness, PathBound, WordError};
use num_bigint::BigInt;
use num_traits::One;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BimoduleError {
    #[error("categories `{0}` and `{1}` do not match")]
    CategoryMismatch(String, String),
    #[error("functor is not a naive inclusion: {0}")]
    NotInclusion(String),
    #[error("bimodule `{0}` is not a diagonal bimodule")]
    NotDiagonal(String),
    #[error("value `{0}` is not declared")]
    UnknownValue(String),
    #[error("action word {0:?} must contain exactly one value")]
    BadActionWord(Vec<String>),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Category(#[from] AInftyError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// What a collage generator stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Left(usize),
    Right(usize),
    Value,
}

#[derive(Clone, Debug)]
pub struct Bimodule {
    label: String,
    pub left: Arc<AInftyCategory>,
    pub right: Arc<AInftyCategory>,
    collage: Arc<AInftyCategory>,
    left_obj: Vec<usize>,
    right_obj: Vec<usize>,
    left_gen: Vec<usize>,
    right_gen: Vec<usize>,
    roles: Vec<Role>,
    /// For diagonal bimodules, the generator of the category behind each value.
    diagonal: Option<Vec<Option<usize>>>,
}

/// Collage under construction: both categories are copied in with prefixed names.
pub struct CollageBuilder {
    pub builder: CategoryBuilder,
    left: Arc<AInftyCategory>,
    right: Arc<AInftyCategory>,
    pub left_obj: Vec<usize>,
    pub right_obj: Vec<usize>,
    pub left_gen: Vec<usize>,
    pub right_gen: Vec<usize>,
}

pub(crate) fn copy_category(b: &mut CategoryBuilder, c: &AInftyCategory, prefix: &str) -> Result<(Vec<usize>, Vec<usize>), AInftyError> {
    let mut objs = Vec::new();
    let mut gens = vec![usize::MAX; c.gens().len()];
    for (x, name) in c.objects().iter().enumerate() {
        let u = c.unit(x);
        let o = b.object_with_unit(format!("{prefix}{name}"), format!("{prefix}{}", c.gen(u).id))?;
        let bu = b.unit(o);
        b.set_display(bu, c.gen(u).display.clone());
        gens[u] = bu;
        objs.push(o);
    }
    for (g, info) in c.gens().iter().enumerate() {
        if c.is_unit(g) {
            continue;
        }
        gens[g] = b.gen_displayed(format!("{prefix}{}", info.id), info.display.clone(), objs[info.src], objs[info.tgt], info.parity)?;
    }
    for (g, l) in c.order_relations() {
        b.order(objs[*g], objs[*l]);
    }
    for (w, out) in c.mu_entries() {
        let w2: Vec<usize> = w.iter().map(|g| gens[*g]).collect();
        let out2: SparseVec = out.iter().map(|(h, x)| (gens[*h], x.clone())).collect();
        b.mu_big(w2, out2);
    }
    Ok((objs, gens))
}

pub(crate) fn build_any(b: CategoryBuilder) -> Result<AInftyCategory, AInftyError> {
    match b.clone().build(true) {
        Err(AInftyError::NotDirected(..)) => b.build(false),
        r => r,
    }
}

impl CollageBuilder {
    pub fn new(label: &str, left: Arc<AInftyCategory>, right: Arc<AInftyCategory>) -> Result<Self, AInftyError> {
        let mut b = CategoryBuilder::new(label);
        let (left_obj, left_gen) = copy_category(&mut b, &left, "L:")?;
        let (right_obj, right_gen) = copy_category(&mut b, &right, "R:")?;
        for x in &left_obj {
            for y in &right_obj {
                b.order(*x, *y);
            }
        }
        Ok(CollageBuilder { builder: b, left, right, left_obj, right_obj, left_gen, right_gen })
    }

    /// Adds a value of `B(x, y)` with the given value parity.
    pub fn value(&mut self, id: &str, display: &str, x: usize, y: usize, parity: u8) -> Result<usize, AInftyError> {
        self.builder.gen_displayed(id, display, self.left_obj[x], self.right_obj[y], (parity + 1) & 1)
    }

    pub fn finish(self, diagonal: Option<Vec<Option<usize>>>) -> Result<Bimodule, AInftyError> {
        let label = self.builder_label();
        let collage = build_any(self.builder)?;
        let mut roles = vec![Role::Value; collage.gens().len()];
        for (g, h) in self.left_gen.iter().enumerate() {
            roles[*h] = Role::Left(g);
        }
        for (g, h) in self.right_gen.iter().enumerate() {
            roles[*h] = Role::Right(g);
        }
        Ok(Bimodule {
            label,
            left: self.left,
            right: self.right,
            collage: Arc::new(collage),
            left_obj: self.left_obj,
            right_obj: self.right_obj,
            left_gen: self.left_gen,
            right_gen: self.right_gen,
            roles,
            diagonal,
        })
    }

    fn builder_label(&self) -> String {
        format!("{}|{}", self.left.label(), self.right.label())
    }
}

/// Value declared for [`Bimodule::from_data`].
#[derive(Clone, Debug)]
pub struct ValueSpec {
    pub id: String,
    pub left: String,
    pub right: String,
    pub parity: u8,
}

impl Bimodule {
    /// Wraps a collage whose left and right parts are copies of the given categories.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        label: String,
        left: Arc<AInftyCategory>,
        right: Arc<AInftyCategory>,
        collage: AInftyCategory,
        left_obj: Vec<usize>,
        right_obj: Vec<usize>,
        left_gen: Vec<usize>,
        right_gen: Vec<usize>,
    ) -> Bimodule {
        let mut roles = vec![Role::Value; collage.gens().len()];
        for (i, h) in left_gen.iter().enumerate() {
            roles[*h] = Role::Left(i);
        }
        for (i, h) in right_gen.iter().enumerate() {
            roles[*h] = Role::Right(i);
        }
        Bimodule { label, left, right, collage: Arc::new(collage), left_obj, right_obj, left_gen, right_gen, roles, diagonal: None }
    }

    /// Builds a bimodule from values and action words; each word is `left letters, value, right letters`.
    pub fn from_data(
        label: &str,
        left: Arc<AInftyCategory>,
        right: Arc<AInftyCategory>,
        values: &[ValueSpec],
        actions: &[(Vec<String>, Vec<(String, BigInt)>)],
    ) -> Result<Bimodule, BimoduleError> {
        let mut cb = CollageBuilder::new(label, left.clone(), right.clone())?;
        let mut value_ids = HashMap::new();
        for v in values {
            if left.gen_id(&v.id).is_ok() || right.gen_id(&v.id).is_ok() {
                return Err(AInftyError::Duplicate(v.id.clone()).into());
            }
            let g = cb.value(&v.id, &v.id, left.object_id(&v.left)?, right.object_id(&v.right)?, v.parity)?;
            value_ids.insert(v.id.clone(), g);
        }
        for (word, out) in actions {
            let pos: Vec<usize> = (0..word.len()).filter(|i| value_ids.contains_key(&word[*i])).collect();
            if pos.len() != 1 {
                return Err(BimoduleError::BadActionWord(word.clone()));
            }
            let p = pos[0];
            let mut w = Vec::new();
            for (i, name) in word.iter().enumerate() {
                let g = match i.cmp(&p) {
                    std::cmp::Ordering::Less => cb.left_gen[left.gen_id(name)?],
                    std::cmp::Ordering::Equal => value_ids[name],
                    std::cmp::Ordering::Greater => cb.right_gen[right.gen_id(name)?],
                };
                w.push(g);
            }
            let mut o = SparseVec::new();
            for (name, c) in out {
                let g = *value_ids.get(name).ok_or_else(|| BimoduleError::UnknownValue(name.clone()))?;
                sv_add(&mut o, g, c);
            }
            cb.builder.mu_big(w, o);
        }
        let mut b = cb.finish(None)?;
        b.label = label.to_string();
        Ok(b)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn collage(&self) -> &Arc<AInftyCategory> {
        &self.collage
    }

    pub fn role(&self, g: usize) -> Role {
        self.roles[g]
    }

    pub fn left_object(&self, x: usize) -> usize {
        self.left_obj[x]
    }

    pub fn right_object(&self, y: usize) -> usize {
        self.right_obj[y]
    }

    pub fn left_letter(&self, g: usize) -> usize {
        self.left_gen[g]
    }

    pub fn right_letter(&self, g: usize) -> usize {
        self.right_gen[g]
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal.is_some()
    }

    /// Collage generators spanning `B(x, y)`.
    pub fn values(&self, x: usize, y: usize) -> &[usize] {
        self.collage.hom_gens(self.left_obj[x], self.right_obj[y])
    }

    pub fn value_parity(&self, g: usize) -> u8 {
        (self.collage.gen(g).parity + 1) & 1
    }

    pub fn value_count(&self) -> usize {
        self.roles.iter().filter(|r| **r == Role::Value).count()
    }

    /// `B(x, y)` as a complex; generator order matches [`Bimodule::values`].
    pub fn value_complex(&self, x: usize, y: usize) -> Arc<FreeComplex> {
        let hom = self.collage.hom_complex(self.left_obj[x], self.right_obj[y]);
        let gens = hom.generators().iter().map(|g| Generator::new(g.id.clone(), (g.parity + 1) & 1)).collect();
        let label = format!("{}({},{})", self.label, self.left.objects()[x], self.right.objects()[y]);
        Arc::new(FreeComplex::new(label, gens, hom.entries()).expect("parity shift keeps d² = 0"))
    }

    /// Bimodule relations on every word of length at most `max_len` that contains a value.
    pub fn check(&self, max_len: usize) -> Report {
        let mut report = self.collage.check_strict_units();
        for w in self.collage.composable_words(max_len) {
            if !w.iter().any(|g| self.roles[*g] == Role::Value) {
                continue;
            }
            let r = self.collage.relation(&w);
            if !r.is_empty() {
                report.violations.push(Violation {
                    kind: "bimodule".into(),
                    word: self.collage.names(&w),
                    residual: r.iter().map(|(g, c)| (self.collage.gen(*g).id.clone(), c.to_string())).collect(),
                });
            }
        }
        report
    }

    /// Value generators with every action and differential removed.
    pub fn zero_like(&self) -> Result<Bimodule, BimoduleError> {
        let cb = CollageBuilder::new(&self.collage.label().to_string(), self.left.clone(), self.right.clone())?;
        Ok(cb.finish(None)?.with_label(format!("0({})", self.label)))
    }
}

/// `C(X, Y)` as a bimodule over `(C, C)`, using `μ_Δ(a…, m, d_1…d_ℓ) = (-1)^{Σ‖d_i‖} μ(a…, m, d…)`.
pub fn diagonal_bimodule(c: &Arc<AInftyCategory>) -> Result<Bimodule, BimoduleError> {
    let mut cb = CollageBuilder::new(&format!("Δ{}", c.label()), c.clone(), c.clone())?;
    let mut value = Vec::with_capacity(c.gens().len());
    let mut origin = Vec::new();
    for info in c.gens() {
        let g = cb.value(&info.id, &info.display, info.src, info.tgt, info.parity)?;
        value.push(g);
        origin.resize(g + 1, None);
        origin[g] = Some(value.len() - 1);
    }
    let entries: Vec<(Vec<usize>, SparseVec)> = c.mu_entries().map(|(w, o)| (w.clone(), o.clone())).collect();
    for (w, out) in entries {
        for j in 0..w.len() {
            let right_deg: usize = w[j + 1..].iter().map(|g| c.gen(*g).reduced() as usize).sum();
            let mut word = Vec::with_capacity(w.len());
            word.extend(w[..j].iter().map(|g| cb.left_gen[*g]));
            word.push(value[w[j]]);
            word.extend(w[j + 1..].iter().map(|g| cb.right_gen[*g]));
            let sign = if right_deg % 2 == 1 { -BigInt::one() } else { BigInt::one() };
            let o: SparseVec = out.iter().map(|(h, x)| (value[*h], x * &sign)).collect();
            cb.builder.mu_big(word, o);
        }
    }
    origin.resize(cb.builder.n_gens(), None);
    Ok(cb.finish(Some(origin))?.with_label(format!("Δ({})", c.label())))
}

fn inclusion_data(f: &AInftyFunctor) -> Result<(Vec<usize>, HashMap<usize, usize>), BimoduleError> {
    if !f.is_naive_inclusion() {
        return Err(BimoduleError::NotInclusion(f.source.label().to_string()));
    }
    let mut seen = BTreeMap::new();
    for (x, y) in f.object_map.iter().enumerate() {
        if seen.insert(*y, x).is_some() {
            return Err(BimoduleError::NotInclusion(format!("object map of {} is not injective", f.source.label())));
        }
    }
    let inverse = f.gen_map.iter().enumerate().map(|(g, v)| (*v.keys().next().unwrap(), g)).collect();
    Ok((f.object_map.clone(), inverse))
}

/// `(g, h)^* B` for naive inclusions `g` into the left and `h` into the right category.
pub fn pullback_bimodule(g: &AInftyFunctor, h: &AInftyFunctor, b: &Bimodule) -> Result<Bimodule, BimoduleError> {
    if !same_category(&g.target, &b.left) || !same_category(&h.target, &b.right) {
        return Err(BimoduleError::CategoryMismatch(g.target.label().into(), b.left.label().into()));
    }
    let (gobj, ginv) = inclusion_data(g)?;
    let (hobj, hinv) = inclusion_data(h)?;
    let mut cb = CollageBuilder::new(&format!("pullback({})", b.label), g.source.clone(), h.source.clone())?;
    let coll = b.collage();
    let mut vmap: HashMap<usize, usize> = HashMap::new();
    for (x, gx) in gobj.iter().enumerate() {
        for (y, hy) in hobj.iter().enumerate() {
            for v in b.values(*gx, *hy) {
                let info = coll.gen(*v);
                let nv = cb.value(&info.id, &info.display, x, y, b.value_parity(*v))?;
                vmap.insert(*v, nv);
            }
        }
    }
    'entries: for (w, out) in coll.mu_entries() {
        if !w.iter().any(|l| b.roles[*l] == Role::Value) {
            continue;
        }
        let mut word = Vec::with_capacity(w.len());
        for l in w {
            let m = match b.roles[*l] {
                Role::Left(c) => ginv.get(&c).map(|x| cb.left_gen[*x]),
                Role::Right(c) => hinv.get(&c).map(|x| cb.right_gen[*x]),
                Role::Value => vmap.get(l).copied(),
            };
            match m {
                Some(m) => word.push(m),
                None => continue 'entries,
            }
        }
        let o: SparseVec = out.iter().filter_map(|(v, x)| vmap.get(v).map(|nv| (*nv, x.clone()))).collect();
        cb.builder.mu_big(word, o);
    }
    Ok(cb.finish(None)?.with_label(format!("pullback({})", b.label)))
}

/// Structural equality of two categories.
pub fn same_category(a: &AInftyCategory, b: &AInftyCategory) -> bool {
    a.objects() == b.objects() && a.gens() == b.gens() && a.mu_entries().eq(b.mu_entries())
}

/// Origin of a generator of the merged collage used for a bar tensor product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Merged {
    Left(usize),
    Middle(usize),
    Right(usize),
    P(usize),
    Q(usize),
}

#[derive(Clone, Debug)]
pub struct TensorProduct {
    pub bimodule: Arc<Bimodule>,
    pub merged: Arc<AInftyCategory>,
    pub merged_roles: Vec<Merged>,
    /// Word in `merged` behind each collage generator of `bimodule`.
    pub words: Vec<Vec<usize>>,
    pub finiteness: BTreeMap<(usize, usize), Finiteness>,
    pub reduced: bool,
}

impl TensorProduct {
    pub fn is_exact(&self) -> bool {
        self.finiteness.values().all(|f| f.is_exact())
    }

    /// Display form `p|c…|q` of a value.
    pub fn display(&self, g: usize) -> String {
        self.bimodule.collage().gen(g).display.clone()
    }
}

/// Reduced or unreduced bar model of `P ⊗_C Q`; `cutoff` bounds the number of bar letters of `C`.
pub fn bar_tensor(p: &Bimodule, q: &Bimodule, reduced: bool, cutoff: Option<usize>) -> Result<TensorProduct, BimoduleError> {
    if !same_category(&p.right, &q.left) {
        return Err(BimoduleError::CategoryMismatch(p.right.label().into(), q.left.label().into()));
    }
    let (c0, c, c1) = (p.left.clone(), p.right.clone(), q.right.clone());
    let mut b = CategoryBuilder::new(format!("{}⊗{}", p.label, q.label));
    let (o0, g0) = copy_category(&mut b, &c0, "0:")?;
    let (o1, g1) = copy_category(&mut b, &c, "1:")?;
    let (o2, g2) = copy_category(&mut b, &c1, "2:")?;
    for (a, bb) in [(&o0, &o1), (&o1, &o2), (&o0, &o2)] {
        for x in a.iter() {
            for y in bb.iter() {
                b.order(*x, *y);
            }
        }
    }
    let n_copied = b.n_gens();
    let mut roles: Vec<Merged> = vec![Merged::Left(0); n_copied];
    for (i, h) in g0.iter().enumerate() {
        roles[*h] = Merged::Left(i);
    }
    for (i, h) in g1.iter().enumerate() {
        roles[*h] = Merged::Middle(i);
    }
    for (i, h) in g2.iter().enumerate() {
        roles[*h] = Merged::Right(i);
    }
    let mut pv = HashMap::new();
    for (v, info) in p.collage.gens().iter().enumerate() {
        if p.roles[v] == Role::Value {
            let x = p.left_obj.iter().position(|o| *o == info.src).unwrap();
            let y = p.right_obj.iter().position(|o| *o == info.tgt).unwrap();
            let g = b.gen_displayed(format!("P:{}", info.id), info.display.clone(), o0[x], o1[y], info.parity)?;
            roles.push(Merged::P(v));
            pv.insert(v, g);
        }
    }
    let mut qv = HashMap::new();
    for (v, info) in q.collage.gens().iter().enumerate() {
        if q.roles[v] == Role::Value {
            let x = q.left_obj.iter().position(|o| *o == info.src).unwrap();
            let y = q.right_obj.iter().position(|o| *o == info.tgt).unwrap();
            let g = b.gen_displayed(format!("Q:{}", info.id), info.display.clone(), o1[x], o2[y], info.parity)?;
            roles.push(Merged::Q(v));
            qv.insert(v, g);
        }
    }
    let tp = |g: usize| match p.roles[g] {
        Role::Left(i) => g0[i],
        Role::Right(i) => g1[i],
        Role::Value => pv[&g],
    };
    let tq = |g: usize| match q.roles[g] {
        Role::Left(i) => g1[i],
        Role::Right(i) => g2[i],
        Role::Value => qv[&g],
    };
    for (w, out) in p.collage.mu_entries() {
        if w.iter().any(|g| p.roles[*g] == Role::Value) {
            b.mu_big(w.iter().map(|g| tp(*g)).collect(), out.iter().map(|(h, x)| (tp(*h), x.clone())).collect());
        }
    }
    for (w, out) in q.collage.mu_entries() {
        if w.iter().any(|g| q.roles[*g] == Role::Value) {
            b.mu_big(w.iter().map(|g| tq(*g)).collect(), out.iter().map(|(h, x)| (tq(*h), x.clone())).collect());
        }
    }
    let merged = Arc::new(build_any(b)?);
    let n = merged.n_objects();
    let interior: Vec<bool> = (0..n).map(|o| o1.contains(&o)).collect();
    let keep: Vec<bool> = (0..n).map(|o| !interior[o]).collect();
    let label = format!("{}⊗{}", p.label, q.label);
    let model = quotient_model(&merged, &interior, &keep, reduced, cutoff.map(|k| k + 1), &label)?;
    let om = &model.object_map;
    let left_obj: Vec<usize> = o0.iter().map(|o| om[*o].unwrap()).collect();
    let right_obj: Vec<usize> = o2.iter().map(|o| om[*o].unwrap()).collect();
    let left_gen: Vec<usize> = g0.iter().map(|g| model.generator_of_letter(*g).unwrap()).collect();
    let right_gen: Vec<usize> = g2.iter().map(|g| model.generator_of_letter(*g).unwrap()).collect();
    let mut finiteness = BTreeMap::new();
    for (x, lo) in left_obj.iter().enumerate() {
        for (z, ro) in right_obj.iter().enumerate() {
            finiteness.insert((x, z), model.finiteness[&(*lo, *ro)]);
        }
    }
    let bimodule = Bimodule::assemble(label, c0, c1, model.category, left_obj, right_obj, left_gen, right_gen);
    Ok(TensorProduct { bimodule: Arc::new(bimodule), merged, merged_roles: roles, words: model.words, finiteness, reduced })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Degree-0 bimodule morphism all of whose components contract a word with one `μ` of the target.
///
/// On `(a…, w, d_1…d_ℓ)` the component is `(-1)^{t(w) + Σ‖d_i‖} μ_T(a…, expand(w), d…)`; its linear
/// part is `w ↦ (-1)^{|w|+1}` times the component on `(w)`.
#[derive(Clone, Debug)]
pub struct ContractionMorphism {
    pub source: Arc<Bimodule>,
    pub target: Arc<Bimodule>,
    expand: BTreeMap<usize, Vec<usize>>,
    twist: BTreeMap<usize, u8>,
}

/// Canonical map `P ⊗_C Δ → P` (right) or `Δ ⊗_C Q → Q` (left).
pub fn collapse_map(
    module: &Arc<Bimodule>,
    side: Side,
    reduced: bool,
    cutoff: Option<usize>,
) -> Result<(TensorProduct, ContractionMorphism), BimoduleError> {
    let tensor = match side {
        Side::Right => {
            let diag = diagonal_bimodule(&module.right)?;
            bar_tensor(module, &diag, reduced, cutoff)?
        }
        Side::Left => {
            let diag = diagonal_bimodule(&module.left)?;
            bar_tensor(&diag, module, reduced, cutoff)?
        }
    };
    let src = tensor.bimodule.clone();
    let diag_origin = |v: usize| -> usize {
        // value generators of a diagonal carry the generator id of the category
        let info = match side {
            Side::Right => module.right.gen_id(&tensor.merged.gen(v).id[2..]),
            Side::Left => module.left.gen_id(&tensor.merged.gen(v).id[2..]),
        };
        info.expect("diagonal value names a generator")
    };
    let mut expand = BTreeMap::new();
    let mut twist = BTreeMap::new();
    let merged = &tensor.merged;
    for (g, role) in src.roles.iter().enumerate() {
        if *role != Role::Value {
            continue;
        }
        let word = &tensor.words[g];
        let mut letters = Vec::with_capacity(word.len());
        let mut t = 0usize;
        for l in word {
            let m = match (tensor.merged_roles[*l], side) {
                (Merged::P(v), Side::Right) => v,
                (Merged::Middle(c), Side::Right) => module.right_gen[c],
                (Merged::Q(_), Side::Right) => module.right_gen[diag_origin(*l)],
                (Merged::P(_), Side::Left) => module.left_gen[diag_origin(*l)],
                (Merged::Middle(c), Side::Left) => {
                    t += merged.gen(*l).reduced() as usize;
                    module.left_gen[c]
                }
                (Merged::Q(v), Side::Left) => {
                    t += 1 + module.value_parity(v) as usize;
                    v
                }
                _ => unreachable!("tensor words start in P and end in Q"),
            };
            letters.push(m);
        }
        expand.insert(g, letters);
        twist.insert(g, (t % 2) as u8);
    }
    let morphism = ContractionMorphism { source: src, target: module.clone(), expand, twist };
    Ok((tensor, morphism))
}

/// Multiplication `ι^*Δ_D ⊗_C ι^*Δ_D → Δ_D` for a naive inclusion `ι: C → D`.
pub fn composition_map(
    iota: &AInftyFunctor,
    reduced: bool,
    cutoff: Option<usize>,
) -> Result<(TensorProduct, ContractionMorphism), BimoduleError> {
    let d = iota.target.clone();
    let delta = Arc::new(diagonal_bimodule(&d)?);
    let id = AInftyFunctor::identity(d.clone());
    let p = pullback_bimodule(&id, iota, &delta)?;
    let q = pullback_bimodule(iota, &id, &delta)?;
    let tensor = bar_tensor(&p, &q, reduced, cutoff)?;
    let src = tensor.bimodule.clone();
    let image = |c: usize| *iota.gen_map[c].keys().next().expect("naive inclusion");
    let mut expand = BTreeMap::new();
    let mut twist = BTreeMap::new();
    for (g, role) in src.roles.iter().enumerate() {
        if *role != Role::Value {
            continue;
        }
        let mut letters = Vec::new();
        for l in &tensor.words[g] {
            let m = match tensor.merged_roles[*l] {
                Merged::P(v) => delta.collage.gen_id(&p.collage.gen(v).id)?,
                Merged::Middle(c) => delta.right_gen[image(c)],
                Merged::Q(v) => delta.right_gen[d.gen_id(&q.collage.gen(v).id)?],
                _ => unreachable!("tensor words start in P and end in Q"),
            };
            letters.push(m);
        }
        expand.insert(g, letters);
        twist.insert(g, 0);
    }
    let morphism = ContractionMorphism { source: src, target: delta, expand, twist };
    Ok((tensor, morphism))
}

impl ContractionMorphism {
    fn translate(&self, g: usize) -> usize {
        match self.source.roles[g] {
            Role::Left(c) => self.target.left_gen[c],
            Role::Right(c) => self.target.right_gen[c],
            Role::Value => unreachable!(),
        }
    }

    /// The component on a source word `(a…, w, d…)`; empty if the word holds no value.
    pub fn component(&self, word: &[usize]) -> SparseVec {
        let Some(v) = word.iter().position(|g| self.source.roles[*g] == Role::Value) else {
            return SparseVec::new();
        };
        let w = word[v];
        let mut letters: Vec<usize> = word[..v].iter().map(|g| self.translate(*g)).collect();
        letters.extend_from_slice(&self.expand[&w]);
        letters.extend(word[v + 1..].iter().map(|g| self.translate(*g)));
        let d: usize = word[v + 1..].iter().map(|g| self.source.collage.gen(*g).reduced() as usize).sum();
        let sign = (self.twist[&w] as usize + d) % 2 == 1;
        let mut out = self.target.collage.mu(&letters).cloned().unwrap_or_default();
        if sign {
            for c in out.values_mut() {
                *c = -c.clone();
            }
        }
        out
    }

    /// `w ↦ (-1)^{|w|+1} φ(w)` from `source(x, y)` to `target(x, y)`.
    pub fn linear_part(&self, x: usize, y: usize) -> Result<ChainMap, ChainError> {
        let s = self.source.value_complex(x, y);
        let t = self.target.value_complex(x, y);
        let tgens = self.target.values(x, y);
        let tpos: HashMap<usize, usize> = tgens.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let mut entries = Vec::new();
        for (i, g) in self.source.values(x, y).iter().enumerate() {
            let odd = (self.source.value_parity(*g) + 1) % 2 == 1;
            for (h, c) in self.component(&[*g]) {
                entries.push((tpos[&h], i, if odd { -c } else { c }));
            }
        }
        ChainMap::new(s, t, 0, entries)
    }

    /// Morphism relation on every source word of length at most `max_len`:
    /// `Σ ± φ(…μ(…)…) + Σ (-1)^{‖left‖ + ‖right‖} μ(left, φ(…), right) = 0`.
    pub fn check_closed(&self, max_len: usize) -> Report {
        let src = &self.source.collage;
        let tgt = &self.target.collage;
        let mut report = Report::default();
        for w in src.composable_words(max_len) {
            let vals = w.iter().filter(|g| self.source.roles[**g] == Role::Value).count();
            if vals != 1 {
                continue;
            }
            let v = w.iter().position(|g| self.source.roles[*g] == Role::Value).unwrap();
            let red: Vec<usize> = w.iter().map(|g| src.gen(*g).reduced() as usize).collect();
            let mut acc = SparseVec::new();
            let mut left = 0usize;
            for i in 0..w.len() {
                for j in i + 1..=w.len().min(i + src.max_arity()) {
                    if let Some(inner) = src.mu(&w[i..j]) {
                        for (h, c) in inner {
                            let mut w2 = w[..i].to_vec();
                            w2.push(*h);
                            w2.extend_from_slice(&w[j..]);
                            let c = if left % 2 == 1 { -c.clone() } else { c.clone() };
                            for (o, x) in self.component(&w2) {
                                sv_add(&mut acc, o, &(x * &c));
                            }
                        }
                    }
                    if i <= v && v < j {
                        let phi = self.component(&w[i..j]);
                        if phi.is_empty() {
                            continue;
                        }
                        let right: usize = red[j..].iter().sum();
                        let mut parts: Vec<SparseVec> =
                            w[..i].iter().map(|g| SparseVec::from([(self.translate(*g), BigInt::one())])).collect();
                        parts.push(phi);
                        parts.extend(w[j..].iter().map(|g| SparseVec::from([(self.translate(*g), BigInt::one())])));
                        let odd = (left + right) % 2 == 1;
                        for (o, x) in tgt.mu_multi(&parts) {
                            sv_add(&mut acc, o, &if odd { -x } else { x });
                        }
                    }
                }
                left += red[i];
            }
            if !acc.is_empty() {
                report.violations.push(Violation {
                    kind: "morphism".into(),
                    word: src.names(&w),
                    residual: acc.iter().map(|(g, c)| (tgt.gen(*g).id.clone(), c.to_string())).collect(),
                });
            }
        }
        report
    }

    /// Whether every linear part is a quasi-isomorphism.
    pub fn is_quasi_iso(&self) -> Result<bool, ChainError> {
        for x in 0..self.source.left.n_objects() {
            for y in 0..self.source.right.n_objects() {
                if !self.linear_part(x, y)?.is_quasi_iso()? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Generator-matching map between word complexes: each source id maps to the target id.
pub fn inclusion_by_ids(source: &Arc<FreeComplex>, target: &Arc<FreeComplex>) -> Result<ChainMap, ChainError> {
    let mut entries = Vec::new();
    for (i, g) in source.generators().iter().enumerate() {
        let j = target.index_of(&g.id).ok_or(ChainError::Mismatch)?;
        entries.push((j, i, BigInt::one()));
    }
    ChainMap::new(source.clone(), target.clone(), 0, entries)
}

/// Hochschild complex with cyclic words `(m, c_1, …, c_p)`, `m ∈ M(X_p, X_0)`, `c_i ∈ C(X_{i-1}, X_i)`.
#[derive(Clone, Debug)]
pub struct HochschildComplex {
    pub complex: Arc<FreeComplex>,
    pub words: Vec<(usize, Vec<usize>)>,
    pub finiteness: Finiteness,
}

/// Bound on `p` for cyclic words and the depth past which graded pieces are acyclic.
pub fn hochschild_bound(m: &Bimodule, reduced: &[bool]) -> (Option<usize>, Option<usize>) {
    let c = &m.left;
    let n = c.n_objects();
    let letters = |u: usize, v: usize| {
        let g = c.hom_gens(u, v);
        if reduced[u] && u == v {
            g.len() > 1
        } else {
            !g.is_empty()
        }
    };
    let mut edges = vec![Vec::new(); n];
    let mut danger = vec![Vec::new(); n];
    for u in 0..n {
        for v in 0..n {
            if letters(u, v) {
                edges[u].push(v);
                if dangerous(&letter_complex(c, u, v, reduced[u])) {
                    danger[u].push(v);
                }
            }
        }
    }
    let mut all = PathBound::NoPath;
    let mut cert = PathBound::NoPath;
    for u in 0..n {
        let starts: Vec<bool> = (0..n).map(|x| x == u).collect();
        let ends: Vec<bool> = (0..n).map(|v| !m.values(v, u).is_empty()).collect();
        let dends: Vec<bool> = (0..n).map(|v| dangerous(&m.value_complex(v, u))).collect();
        all = all.max_with(longest_path(&edges, &starts, &ends));
        cert = cert.max_with(longest_path(&danger, &starts, &dends));
    }
    let p = |b: PathBound| b.nodes().map(|k| k.saturating_sub(1));
    (p(all), p(cert))
}

pub fn hochschild_complex(
    m: &Bimodule,
    reduced: bool,
    cutoff: Option<usize>,
    min_depth: usize,
) -> Result<HochschildComplex, BimoduleError> {
    hochschild_complex_normalized(m, &vec![reduced; m.left.n_objects()], cutoff, min_depth)
}

/// Hochschild complex normalized only at the objects flagged in `reduced`; units of the other
/// objects stay available as letters.
pub fn hochschild_complex_normalized(
    m: &Bimodule,
    reduced: &[bool],
    cutoff: Option<usize>,
    min_depth: usize,
) -> Result<HochschildComplex, BimoduleError> {
    if !same_category(&m.left, &m.right) {
        return Err(BimoduleError::CategoryMismatch(m.left.label().into(), m.right.label().into()));
    }
    let (longest, certified) = hochschild_bound(m, reduced);
    let (depth, finiteness) = match (longest, certified, cutoff) {
        (Some(l), _, None) => (l, Finiteness::Exact),
        (Some(l), _, Some(c)) if c >= l => (l, Finiteness::Exact),
        (None, Some(l), c) if c.map_or(true, |c| c >= l) => {
            let d = l.max(min_depth);
            (d, Finiteness::Certified { depth: d })
        }
        (_, _, Some(c)) => (c, Finiteness::Truncated { cutoff: c }),
        (None, _, None) => return Err(WordError::InfiniteModel { from: m.label.clone(), to: m.label.clone() }.into()),
    };
    let c = m.left.clone();
    let coll = m.collage.clone();
    let mut words: Vec<(usize, Vec<usize>)> = Vec::new();
    for x in 0..c.n_objects() {
        for y in 0..c.n_objects() {
            for v in m.values(x, y) {
                // letters run from y = X_0 to x = X_p
                let mut stack: Vec<(usize, Vec<usize>)> = vec![(y, Vec::new())];
                while let Some((o, w)) = stack.pop() {
                    if o == x {
                        words.push((*v, w.clone()));
                    }
                    if w.len() == depth {
                        continue;
                    }
                    for z in 0..c.n_objects() {
                        for g in c.hom_gens(o, z) {
                            if reduced[o] && c.is_unit(*g) {
                                continue;
                            }
                            let mut w2 = w.clone();
                            w2.push(*g);
                            stack.push((z, w2));
                        }
                    }
                }
            }
        }
    }
    words.sort_by(|a, b| (a.1.len(), a).cmp(&(b.1.len(), b)));
    let lookup: HashMap<(usize, Vec<usize>), usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
    let id = |(v, w): &(usize, Vec<usize>)| -> String {
        if w.is_empty() {
            return coll.gen(*v).id.clone();
        }
        let mut parts = vec![coll.gen(*v).id.clone()];
        parts.extend(w.iter().map(|g| c.gen(*g).id.clone()));
        format!("[{}]", parts.join("|"))
    };
    let parity = |(v, w): &(usize, Vec<usize>)| -> u8 {
        let s: usize = w.iter().map(|g| c.gen(*g).reduced() as usize).sum::<usize>() + m.value_parity(*v) as usize;
        (s % 2) as u8
    };
    let gens: Vec<Generator> = words.iter().map(|w| Generator::new(id(w), parity(w))).collect();
    let mut entries = Vec::new();
    for (k, (v, w)) in words.iter().enumerate() {
        let p = w.len();
        let red: Vec<usize> = w.iter().map(|g| c.gen(*g).reduced() as usize).collect();
        let mdeg = m.value_parity(*v) as usize;
        // contractions among the letters
        let mut left = mdeg;
        for i in 0..p {
            for j in i + 1..=p.min(i + c.max_arity()) {
                if let Some(out) = c.mu(&w[i..j]) {
                    for (h, x) in out {
                        if c.is_unit(*h) && reduced[c.gen(*h).src] {
                            continue;
                        }
                        let mut w2 = w[..i].to_vec();
                        w2.push(*h);
                        w2.extend_from_slice(&w[j..]);
                        let j2 = lookup[&(*v, w2)];
                        entries.push((j2, k, if left % 2 == 1 { -x.clone() } else { x.clone() }));
                    }
                }
            }
            left += red[i];
        }
        // contractions through the module letter: tail c_{j+1..p}, m, head c_{1..i}
        for i in 0..=p {
            for j in i..=p {
                if (p - j) + 1 + i > coll.max_arity() {
                    continue;
                }
                let mut cw: Vec<usize> = w[j..].iter().map(|g| m.left_gen[*g]).collect();
                cw.push(*v);
                cw.extend(w[..i].iter().map(|g| m.right_gen[*g]));
                let Some(out) = coll.mu(&cw) else { continue };
                let tail: usize = red[j..].iter().sum();
                let before: usize = mdeg + red[..j].iter().sum::<usize>();
                let odd = (tail * before) % 2 == 1;
                for (h, x) in out {
                    let key = (*h, w[i..j].to_vec());
                    let j2 = lookup[&key];
                    entries.push((j2, k, if odd { -x.clone() } else { x.clone() }));
                }
            }
        }
    }
    let complex = FreeComplex::new(format!("HH({})", m.label), gens, entries)?;
    Ok(HochschildComplex { complex: Arc::new(complex), words, finiteness })
}

/// The right action `m ↦ (-1)^{|m|+1} μ(m, u)` of a cycle `u ∈ hom(x, x)` on `M(w, x)`.
pub fn right_action_map(m: &Bimodule, w: usize, x: usize, u: &SparseVec) -> Result<ChainMap, ChainError> {
    let cx = m.value_complex(w, x);
    let vals = m.values(w, x);
    let pos: HashMap<usize, usize> = vals.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let mut entries = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        let odd = m.value_parity(*v) == 0;
        let parts = vec![SparseVec::from([(*v, BigInt::one())]), u.iter().map(|(g, c)| (m.right_gen[*g], c.clone())).collect()];
        for (h, c) in m.collage.mu_multi(&parts) {
            entries.push((pos[&h], i, if odd { -c } else { c }));
        }
    }
    ChainMap::new(cx.clone(), cx, 0, entries)
}

/// Whether `x ↦ x · u` is homotopic to the identity on `M(w, x)`, with an explicit homotopy.
pub fn unit_homotopy(m: &Bimodule, w: usize, x: usize, u: &SparseVec) -> Result<Option<ChainMap>, ChainError> {
    let act = right_action_map(m, w, x, u)?;
    let id = ChainMap::identity(act.source.clone());
    let diff = act.scaled_sum(&id, &BigInt::one(), &-BigInt::one());
    Ok(crate::chains::null_homotopy(&diff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{example_library, linear_category, mu3_category, random_directed_dg, unit_category};

    #[test]
    fn diagonals_satisfy_bimodule_relations() {
        for (name, c) in example_library() {
            let d = diagonal_bimodule(&Arc::new(c)).unwrap();
            let r = d.check(5);
            assert!(r.passed(), "{name}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn a2_tensor_has_three_words() {
        let c = Arc::new(linear_category(2));
        let d = diagonal_bimodule(&c).unwrap();
        let t = bar_tensor(&d, &d, true, None).unwrap();
        assert!(t.is_exact());
        let cx = t.bimodule.value_complex(0, 1);
        assert_eq!(cx.rank(), 3);
        assert_eq!(cx.homology(), crate::chains::HomologyProfile::free(1, 0));
        let labels: Vec<String> = t.bimodule.values(0, 1).iter().map(|g| t.display(*g)).collect();
        assert!(labels.contains(&"[e_X|a|e_Y]".to_string()), "{labels:?}");
        assert!(t.bimodule.check(4).passed());
    }

    #[test]
    fn collapse_maps_are_closed_quasi_isos() {
        let mut cats = vec![unit_category(), linear_category(2), linear_category(3), mu3_category()];
        cats.push(random_directed_dg(3, 3, 2));
        for c in cats {
            let c = Arc::new(c);
            let d = Arc::new(diagonal_bimodule(&c).unwrap());
            for side in [Side::Right, Side::Left] {
                let (_, f) = collapse_map(&d, side, true, None).unwrap();
                let r = f.check_closed(4);
                assert!(r.passed(), "{} {side:?}: {:?}", c.label(), r.violations.first());
                assert!(f.is_quasi_iso().unwrap(), "{} {side:?}", c.label());
            }
        }
    }

    #[test]
    fn hochschild_of_a2_is_rank_two() {
        let c = Arc::new(linear_category(2));
        let d = diagonal_bimodule(&c).unwrap();
        let hh = hochschild_complex(&d, true, None, 0).unwrap();
        assert_eq!(hh.complex.rank(), 2);
        assert_eq!(hh.complex.homology(), crate::chains::HomologyProfile::free(2, 0));
    }

    #[test]
    fn hochschild_of_random_categories_squares_to_zero() {
        for seed in 0..10 {
            let c = Arc::new(random_directed_dg(seed, 3, 2));
            let d = diagonal_bimodule(&c).unwrap();
            assert!(hochschild_complex(&d, true, None, 0).is_ok());
            assert!(hochschild_complex(&d, false, Some(3), 0).is_ok());
        }
        let d = diagonal_bimodule(&Arc::new(mu3_category())).unwrap();
        assert!(hochschild_complex(&d, true, None, 0).is_ok());
    }
}
