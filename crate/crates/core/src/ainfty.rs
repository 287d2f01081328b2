//! Finite strictly unital A∞-categories with sparse higher products.
//!
//! Signs follow the forward-composition convention with reduced degrees `‖a‖ = |a| + 1`:
//! for every composable word `(a_1, …, a_k)`,
//! `Σ (-1)^{‖a_1‖+…+‖a_i‖} μ(a_1, …, a_i, μ(a_{i+1}, …, a_{i+j}), …, a_k) = 0`,
//! with `μ^1` the differential of the hom complexes. Strict units satisfy
//! `μ²(e, x) = x` and `μ²(x, e) = (-1)^{|x|} x`.

use crate::chains::{ChainError, FreeComplex, Generator, HomologyBasis, HomologyProfile};
use crate::linalg::{sv_add, SparseVec};
use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AInftyError {
    #[error("unknown object `{0}`")]
    UnknownObject(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("duplicate name `{0}`")]
    Duplicate(String),
    #[error("word {0:?} is not composable")]
    NotComposable(Vec<String>),
    #[error("output {output} of word {word:?} lies in the wrong hom space")]
    WrongHom { word: Vec<String>, output: String },
    #[error("output {output} of word {word:?} has the wrong parity")]
    WrongParity { word: Vec<String>, output: String },
    #[error("unit of `{0}` must be a parity-0 endomorphism")]
    BadUnit(String),
    #[error("directedness violated on hom({0}, {1})")]
    NotDirected(String, String),
    #[error("order relation is cyclic at `{0}`")]
    CyclicOrder(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenInfo {
    pub id: String,
    /// Name used when the generator appears as a letter of a word.
    pub display: String,
    pub src: usize,
    pub tgt: usize,
    pub parity: u8,
}

impl GenInfo {
    /// Reduced degree `|g| + 1` mod 2.
    pub fn reduced(&self) -> u8 {
        (self.parity + 1) & 1
    }
}

#[derive(Clone, Debug)]
pub struct AInftyCategory {
    label: String,
    objects: Vec<String>,
    object_index: BTreeMap<String, usize>,
    order: Vec<(usize, usize)>,
    greater: Vec<BTreeSet<usize>>,
    gens: Vec<GenInfo>,
    gen_index: BTreeMap<String, usize>,
    hom: BTreeMap<(usize, usize), Vec<usize>>,
    local: Vec<usize>,
    hom_cx: BTreeMap<(usize, usize), Arc<FreeComplex>>,
    units: Vec<usize>,
    mu: BTreeMap<Vec<usize>, SparseVec>,
    max_arity: usize,
    directed: bool,
}

/// Incremental construction of an [`AInftyCategory`].
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    label: String,
    objects: Vec<String>,
    object_index: BTreeMap<String, usize>,
    order: Vec<(usize, usize)>,
    gens: Vec<GenInfo>,
    gen_index: BTreeMap<String, usize>,
    units: Vec<usize>,
    mu: BTreeMap<Vec<usize>, SparseVec>,
    implicit_units: bool,
}

impl CategoryBuilder {
    pub fn new(label: impl Into<String>) -> Self {
        CategoryBuilder { label: label.into(), implicit_units: true, ..Default::default() }
    }

    /// Adds an object together with its unit generator `e_<name>`.
    pub fn object(&mut self, name: impl Into<String>) -> usize {
        let name = name.into();
        let unit = format!("e_{name}");
        self.object_with_unit(name, unit).expect("fresh object")
    }

    pub fn object_with_unit(&mut self, name: impl Into<String>, unit: impl Into<String>) -> Result<usize, AInftyError> {
        let name = name.into();
        if self.object_index.contains_key(&name) {
            return Err(AInftyError::Duplicate(name));
        }
        let i = self.objects.len();
        self.objects.push(name.clone());
        self.object_index.insert(name, i);
        let u = self.gen(unit, i, i, 0)?;
        self.units.push(u);
        Ok(i)
    }

    pub fn object_id(&self, name: &str) -> Result<usize, AInftyError> {
        self.object_index.get(name).copied().ok_or_else(|| AInftyError::UnknownObject(name.to_string()))
    }

    pub fn gen_id(&self, name: &str) -> Result<usize, AInftyError> {
        self.gen_index.get(name).copied().ok_or_else(|| AInftyError::UnknownGenerator(name.to_string()))
    }

    pub fn unit(&self, obj: usize) -> usize {
        self.units[obj]
    }

    /// Declares `greater > lesser` in the object order.
    pub fn order(&mut self, greater: usize, lesser: usize) {
        self.order.push((greater, lesser));
    }

    pub fn gen(&mut self, id: impl Into<String>, src: usize, tgt: usize, parity: u8) -> Result<usize, AInftyError> {
        let id = id.into();
        if self.gen_index.contains_key(&id) {
            return Err(AInftyError::Duplicate(id));
        }
        let i = self.gens.len();
        self.gen_index.insert(id.clone(), i);
        self.gens.push(GenInfo { display: id.clone(), id, src, tgt, parity: parity & 1 });
        Ok(i)
    }

    pub fn gen_displayed(
        &mut self,
        id: impl Into<String>,
        display: impl Into<String>,
        src: usize,
        tgt: usize,
        parity: u8,
    ) -> Result<usize, AInftyError> {
        let g = self.gen(id, src, tgt, parity)?;
        self.gens[g].display = display.into();
        Ok(g)
    }

    pub fn set_display(&mut self, g: usize, display: impl Into<String>) {
        self.gens[g].display = display.into();
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn n_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn generator(&self, g: usize) -> &GenInfo {
        &self.gens[g]
    }

    /// Adds `output` to μ(word); repeated calls accumulate.
    pub fn mu(&mut self, word: &[usize], output: &[(usize, i64)]) {
        let e = self.mu.entry(word.to_vec()).or_default();
        for (g, c) in output {
            sv_add(e, *g, &BigInt::from(*c));
        }
    }

    pub fn mu_big(&mut self, word: Vec<usize>, output: SparseVec) {
        let e = self.mu.entry(word).or_default();
        for (g, c) in output {
            sv_add(e, g, &c);
        }
    }

    pub fn has_mu(&self, word: &[usize]) -> bool {
        self.mu.contains_key(word)
    }

    pub fn differential(&mut self, g: usize, output: &[(usize, i64)]) {
        self.mu(&[g], output);
    }

    /// Keep unit products exactly as entered instead of completing them.
    pub fn explicit_units(&mut self) {
        self.implicit_units = false;
    }

    pub fn build(mut self, directed: bool) -> Result<AInftyCategory, AInftyError> {
        if self.implicit_units {
            for g in 0..self.gens.len() {
                let info = self.gens[g].clone();
                let el = self.units[info.src];
                let er = self.units[info.tgt];
                let left = vec![el, g];
                if !self.mu.contains_key(&left) {
                    self.mu.insert(left, SparseVec::from([(g, BigInt::one())]));
                }
                let right = vec![g, er];
                if !self.mu.contains_key(&right) {
                    let c = if info.parity == 0 { BigInt::one() } else { -BigInt::one() };
                    self.mu.insert(right, SparseVec::from([(g, c)]));
                }
            }
        }
        AInftyCategory::assemble(self, directed)
    }
}

impl AInftyCategory {
    fn assemble(b: CategoryBuilder, directed: bool) -> Result<Self, AInftyError> {
        let n = b.objects.len();
        let names = |w: &[usize]| w.iter().map(|g| b.gens[*g].id.clone()).collect::<Vec<_>>();
        for (x, u) in b.units.iter().enumerate() {
            let g = &b.gens[*u];
            if g.src != x || g.tgt != x || g.parity != 0 {
                return Err(AInftyError::BadUnit(b.objects[x].clone()));
            }
        }
        let mut mu = BTreeMap::new();
        let mut max_arity = 1;
        for (word, out) in b.mu {
            if word.is_empty() {
                return Err(AInftyError::NotComposable(vec![]));
            }
            for w in word.windows(2) {
                if b.gens[w[0]].tgt != b.gens[w[1]].src {
                    return Err(AInftyError::NotComposable(names(&word)));
                }
            }
            let src = b.gens[word[0]].src;
            let tgt = b.gens[*word.last().unwrap()].tgt;
            let parity = (word.iter().map(|g| b.gens[*g].parity as usize).sum::<usize>() + word.len()) % 2;
            for h in out.keys() {
                let info = &b.gens[*h];
                if info.src != src || info.tgt != tgt {
                    return Err(AInftyError::WrongHom { word: names(&word), output: info.id.clone() });
                }
                if info.parity as usize != parity {
                    return Err(AInftyError::WrongParity { word: names(&word), output: info.id.clone() });
                }
            }
            if out.is_empty() {
                continue;
            }
            max_arity = max_arity.max(word.len());
            mu.insert(word, out);
        }

        // transitive closure of the order
        let mut greater: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (g, l) in &b.order {
            greater[*l].insert(*g);
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                let above: Vec<usize> = greater[x].iter().copied().collect();
                for y in above {
                    let more: Vec<usize> = greater[y].iter().copied().collect();
                    for z in more {
                        changed |= greater[x].insert(z);
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for x in 0..n {
            if greater[x].contains(&x) {
                return Err(AInftyError::CyclicOrder(b.objects[x].clone()));
            }
        }

        let mut hom: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let mut local = vec![0; b.gens.len()];
        for (i, g) in b.gens.iter().enumerate() {
            let list = hom.entry((g.src, g.tgt)).or_default();
            local[i] = list.len();
            list.push(i);
        }
        let mut hom_cx = BTreeMap::new();
        for ((x, y), list) in &hom {
            let gens: Vec<Generator> = list.iter().map(|g| Generator::new(b.gens[*g].id.clone(), b.gens[*g].parity)).collect();
            let mut entries = Vec::new();
            for (s, g) in list.iter().enumerate() {
                if let Some(out) = mu.get(&vec![*g]) {
                    for (h, c) in out {
                        entries.push((local[*h], s, c.clone()));
                    }
                }
            }
            let label = format!("hom({},{})", b.objects[*x], b.objects[*y]);
            hom_cx.insert((*x, *y), Arc::new(FreeComplex::new(label, gens, entries)?));
        }

        let cat = AInftyCategory {
            label: b.label,
            objects: b.objects,
            object_index: b.object_index,
            order: b.order,
            greater,
            gens: b.gens,
            gen_index: b.gen_index,
            hom,
            local,
            hom_cx,
            units: b.units,
            mu,
            max_arity,
            directed,
        };
        if directed {
            for ((x, y), list) in &cat.hom {
                let ok = if x == y { list.len() == 1 } else { cat.greater_than(*x, *y) };
                if !ok {
                    return Err(AInftyError::NotDirected(cat.objects[*x].clone(), cat.objects[*y].clone()));
                }
            }
        }
        Ok(cat)
    }

    /// Full subcategory on `objs`, keeping generator ids.
    pub fn full_subcategory(&self, objs: &[usize], label: impl Into<String>) -> Result<AInftyCategory, AInftyError> {
        let mut b = CategoryBuilder::new(label);
        let mut omap = BTreeMap::new();
        let mut gmap = BTreeMap::new();
        for x in objs {
            let u = self.units[*x];
            let o = b.object_with_unit(self.objects[*x].clone(), self.gens[u].id.clone())?;
            b.set_display(b.unit(o), self.gens[u].display.clone());
            omap.insert(*x, o);
            gmap.insert(u, b.unit(o));
        }
        for (g, info) in self.gens.iter().enumerate() {
            if gmap.contains_key(&g) {
                continue;
            }
            if let (Some(s), Some(t)) = (omap.get(&info.src), omap.get(&info.tgt)) {
                gmap.insert(g, b.gen_displayed(info.id.clone(), info.display.clone(), *s, *t, info.parity)?);
            }
        }
        for (g, l) in &self.order {
            if let (Some(g), Some(l)) = (omap.get(g), omap.get(l)) {
                b.order(*g, *l);
            }
        }
        for (w, out) in &self.mu {
            let Some(w2) = w.iter().map(|g| gmap.get(g).copied()).collect::<Option<Vec<_>>>() else { continue };
            b.mu_big(w2, out.iter().map(|(h, c)| (gmap[h], c.clone())).collect());
        }
        b.explicit_units();
        b.build(self.directed)
    }

    /// A builder preloaded with this category's objects, order, generators and products.
    pub fn to_builder(&self) -> CategoryBuilder {
        CategoryBuilder {
            label: self.label.clone(),
            objects: self.objects.clone(),
            object_index: self.object_index.clone(),
            order: self.order.clone(),
            gens: self.gens.clone(),
            gen_index: self.gen_index.clone(),
            units: self.units.clone(),
            mu: self.mu.clone(),
            implicit_units: false,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    pub fn object_id(&self, name: &str) -> Result<usize, AInftyError> {
        self.object_index.get(name).copied().ok_or_else(|| AInftyError::UnknownObject(name.to_string()))
    }

    pub fn order_relations(&self) -> &[(usize, usize)] {
        &self.order
    }

    /// `x > y` in the transitive closure of the declared order.
    pub fn greater_than(&self, x: usize, y: usize) -> bool {
        self.greater[y].contains(&x)
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn gens(&self) -> &[GenInfo] {
        &self.gens
    }

    pub fn gen(&self, g: usize) -> &GenInfo {
        &self.gens[g]
    }

    pub fn gen_id(&self, name: &str) -> Result<usize, AInftyError> {
        self.gen_index.get(name).copied().ok_or_else(|| AInftyError::UnknownGenerator(name.to_string()))
    }

    pub fn unit(&self, x: usize) -> usize {
        self.units[x]
    }

    pub fn is_unit(&self, g: usize) -> bool {
        self.units[self.gens[g].src] == g
    }

    pub fn hom_gens(&self, x: usize, y: usize) -> &[usize] {
        self.hom.get(&(x, y)).map_or(&[], |v| v.as_slice())
    }

    /// Position of a generator inside its hom complex.
    pub fn local_index(&self, g: usize) -> usize {
        self.local[g]
    }

    pub fn hom_complex(&self, x: usize, y: usize) -> Arc<FreeComplex> {
        self.hom_cx
            .get(&(x, y))
            .cloned()
            .unwrap_or_else(|| Arc::new(FreeComplex::zero(format!("hom({},{})", self.objects[x], self.objects[y]))))
    }

    pub fn mu(&self, word: &[usize]) -> Option<&SparseVec> {
        self.mu.get(word)
    }

    pub fn mu_entries(&self) -> impl Iterator<Item = (&Vec<usize>, &SparseVec)> {
        self.mu.iter()
    }

    pub fn max_arity(&self) -> usize {
        self.max_arity
    }

    pub fn names(&self, word: &[usize]) -> Vec<String> {
        word.iter().map(|g| self.gens[*g].id.clone()).collect()
    }

    /// Converts a combination of generators of hom(x, y) from global to local indices.
    pub fn to_local(&self, v: &SparseVec) -> SparseVec {
        v.iter().map(|(g, c)| (self.local[*g], c.clone())).collect()
    }

    pub fn to_global(&self, x: usize, y: usize, v: &SparseVec) -> SparseVec {
        let list = self.hom_gens(x, y);
        v.iter().map(|(i, c)| (list[*i], c.clone())).collect()
    }

    /// μ applied multilinearly to a word of combinations.
    pub fn mu_multi(&self, word: &[SparseVec]) -> SparseVec {
        let mut out = SparseVec::new();
        let mut idx = Vec::with_capacity(word.len());
        self.mu_multi_rec(word, &mut idx, &BigInt::one(), &mut out);
        out
    }

    fn mu_multi_rec(&self, word: &[SparseVec], idx: &mut Vec<usize>, coeff: &BigInt, out: &mut SparseVec) {
        if idx.len() == word.len() {
            if let Some(v) = self.mu(idx) {
                for (h, c) in v {
                    sv_add(out, *h, &(c * coeff));
                }
            }
            return;
        }
        let k = idx.len();
        for (g, c) in &word[k] {
            idx.push(*g);
            self.mu_multi_rec(word, idx, &(coeff * c), out);
            idx.pop();
        }
    }

    /// All composable words of generators of length `1..=max_len`.
    pub fn composable_words(&self, max_len: usize) -> Vec<Vec<usize>> {
        let mut out_by_src: Vec<Vec<usize>> = vec![Vec::new(); self.objects.len()];
        for (i, g) in self.gens.iter().enumerate() {
            out_by_src[g.src].push(i);
        }
        let mut out = Vec::new();
        let mut stack: Vec<Vec<usize>> = (0..self.gens.len()).map(|g| vec![g]).collect();
        stack.reverse();
        while let Some(w) = stack.pop() {
            if w.len() < max_len {
                let t = self.gens[*w.last().unwrap()].tgt;
                for g in out_by_src[t].iter().rev() {
                    let mut w2 = w.clone();
                    w2.push(*g);
                    stack.push(w2);
                }
            }
            out.push(w);
        }
        out
    }

    /// Left-hand side of the A∞ relation on a composable word.
    pub fn relation(&self, word: &[usize]) -> SparseVec {
        let k = word.len();
        let mut out = SparseVec::new();
        let mut sign_exp = 0u8;
        let mut buf = Vec::with_capacity(k);
        for i in 0..k {
            let sign = if sign_exp == 0 { BigInt::one() } else { -BigInt::one() };
            for j in 1..=(k - i).min(self.max_arity) {
                let Some(inner) = self.mu(&word[i..i + j]) else { continue };
                for (h, c) in inner {
                    buf.clear();
                    buf.extend_from_slice(&word[..i]);
                    buf.push(*h);
                    buf.extend_from_slice(&word[i + j..]);
                    if let Some(outer) = self.mu(&buf) {
                        let coeff = &sign * c;
                        for (g, x) in outer {
                            sv_add(&mut out, *g, &(x * &coeff));
                        }
                    }
                }
            }
            sign_exp ^= self.gens[word[i]].reduced();
        }
        out
    }

    pub fn check_ainfty(&self, max_len: usize) -> Report {
        let mut report = self.check_strict_units();
        for w in self.composable_words(max_len) {
            let r = self.relation(&w);
            if !r.is_empty() {
                report.violations.push(Violation { kind: "relation".into(), word: self.names(&w), residual: self.residual(&r) });
            }
        }
        report
    }

    fn residual(&self, v: &SparseVec) -> Vec<(String, String)> {
        v.iter().map(|(g, c)| (self.gens[*g].id.clone(), c.to_string())).collect()
    }

    /// Strict unit clauses on every generator, and vanishing of other products involving units.
    pub fn check_strict_units(&self) -> Report {
        let mut report = Report::default();
        for (g, info) in self.gens.iter().enumerate() {
            let el = self.units[info.src];
            let er = self.units[info.tgt];
            let left = self.mu(&[el, g]).cloned().unwrap_or_default();
            if left != SparseVec::from([(g, BigInt::one())]) {
                let mut r = left.clone();
                sv_add(&mut r, g, &-BigInt::one());
                report.violations.push(Violation { kind: "unit".into(), word: self.names(&[el, g]), residual: self.residual(&r) });
            }
            let sign = if info.parity == 0 { BigInt::one() } else { -BigInt::one() };
            let right = self.mu(&[g, er]).cloned().unwrap_or_default();
            if right != SparseVec::from([(g, sign.clone())]) {
                let mut r = right.clone();
                sv_add(&mut r, g, &-sign);
                report.violations.push(Violation { kind: "unit".into(), word: self.names(&[g, er]), residual: self.residual(&r) });
            }
        }
        for (word, out) in &self.mu {
            if word.len() != 2 && word.iter().any(|g| self.is_unit(*g)) {
                report.violations.push(Violation { kind: "unit".into(), word: self.names(word), residual: self.residual(out) });
            }
        }
        report
    }

    pub fn cohomology_category(&self) -> CohomologyTable {
        cohomology_category(self)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: String,
    pub word: Vec<String>,
    pub residual: Vec<(String, String)>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub violations: Vec<Violation>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A strict functor given on objects and by first-order components on generators.
#[derive(Clone, Debug)]
pub struct AInftyFunctor {
    pub source: Arc<AInftyCategory>,
    pub target: Arc<AInftyCategory>,
    pub object_map: Vec<usize>,
    pub gen_map: Vec<SparseVec>,
}

impl AInftyFunctor {
    pub fn identity(c: Arc<AInftyCategory>) -> Self {
        let object_map = (0..c.n_objects()).collect();
        let gen_map = (0..c.gens().len()).map(|g| SparseVec::from([(g, BigInt::one())])).collect();
        AInftyFunctor { source: c.clone(), target: c, object_map, gen_map }
    }

    /// Inclusion matching objects and generators by name.
    pub fn inclusion_by_name(source: Arc<AInftyCategory>, target: Arc<AInftyCategory>) -> Result<Self, AInftyError> {
        let object_map = source.objects().iter().map(|o| target.object_id(o)).collect::<Result<Vec<_>, _>>()?;
        let gen_map = source
            .gens()
            .iter()
            .map(|g| target.gen_id(&g.id).map(|h| SparseVec::from([(h, BigInt::one())])))
            .collect::<Result<Vec<_>, _>>()?;
        let f = AInftyFunctor { source, target, object_map, gen_map };
        f.validate()?;
        Ok(f)
    }

    /// Whether every generator maps to a distinct generator with coefficient one.
    pub fn is_naive_inclusion(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.gen_map.iter().all(|v| v.len() == 1 && v.values().next().is_some_and(|c| c.is_one()) && seen.insert(*v.keys().next().unwrap()))
    }

    pub fn validate(&self) -> Result<(), AInftyError> {
        for (g, img) in self.gen_map.iter().enumerate() {
            let info = self.source.gen(g);
            for h in img.keys() {
                let t = self.target.gen(*h);
                if t.src != self.object_map[info.src] || t.tgt != self.object_map[info.tgt] {
                    return Err(AInftyError::WrongHom { word: vec![info.id.clone()], output: t.id.clone() });
                }
                if t.parity != info.parity {
                    return Err(AInftyError::WrongParity { word: vec![info.id.clone()], output: t.id.clone() });
                }
            }
        }
        for x in 0..self.source.n_objects() {
            let e = self.source.unit(x);
            let te = self.target.unit(self.object_map[x]);
            if self.gen_map[e] != SparseVec::from([(te, BigInt::one())]) {
                return Err(AInftyError::BadUnit(self.source.objects()[x].clone()));
            }
        }
        Ok(())
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (g, c) in v {
            for (h, x) in &self.gen_map[*g] {
                sv_add(&mut out, *h, &(c * x));
            }
        }
        out
    }

    /// Checks `F μ(w) = μ(F w)` on all composable words up to `max_len`.
    pub fn check_strict(&self, max_len: usize) -> Report {
        let mut report = Report::default();
        for w in self.source.composable_words(max_len) {
            let lhs = self.apply(&self.source.mu(&w).cloned().unwrap_or_default());
            let imgs: Vec<SparseVec> = w.iter().map(|g| self.gen_map[*g].clone()).collect();
            let mut diff = self.target.mu_multi(&imgs);
            for (h, c) in lhs {
                sv_add(&mut diff, h, &-c);
            }
            if !diff.is_empty() {
                report.violations.push(Violation {
                    kind: "functor".into(),
                    word: self.source.names(&w),
                    residual: diff.iter().map(|(g, c)| (self.target.gen(*g).id.clone(), c.to_string())).collect(),
                });
            }
        }
        report
    }
}

/// Homology classes of every hom complex with the induced composition.
#[derive(Clone, Debug, Serialize)]
pub struct CohomologyTable {
    pub homs: Vec<HomEntry>,
    pub products: Vec<ProductEntry>,
    /// Pairs of classes whose product depended on the representative.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomEntry {
    pub source: String,
    pub target: String,
    pub profile: HomologyProfile,
    /// Class labels `(parity, index)` with representatives as generator-coefficient lists.
    pub classes: Vec<ClassEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassEntry {
    pub parity: u8,
    pub order: String,
    pub representative: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProductEntry {
    pub objects: [String; 3],
    pub left: (u8, usize),
    pub right: (u8, usize),
    /// Coordinates of `(-1)^{|x|} μ²(x, y)` in the class basis of the outer hom.
    pub coordinates: Vec<String>,
}

/// Product on cycles `x · y = (-1)^{|x|} μ²(x, y)`, a dg-style composition.
pub fn cycle_product(c: &AInftyCategory, x: &SparseVec, y: &SparseVec) -> SparseVec {
    let px = x.keys().next().map_or(0, |g| c.gen(*g).parity);
    let mut v = c.mu_multi(&[x.clone(), y.clone()]);
    if px == 1 {
        for val in v.values_mut() {
            *val = -std::mem::take(val);
        }
    }
    v
}

pub fn homology_bases(c: &AInftyCategory) -> BTreeMap<(usize, usize), HomologyBasis> {
    let mut out = BTreeMap::new();
    for x in 0..c.n_objects() {
        for y in 0..c.n_objects() {
            out.insert((x, y), c.hom_complex(x, y).homology_basis());
        }
    }
    out
}

pub fn cohomology_category(c: &AInftyCategory) -> CohomologyTable {
    let bases = homology_bases(c);
    let n = c.n_objects();
    let mut homs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            let hc = c.hom_complex(x, y);
            if hc.rank() == 0 {
                continue;
            }
            let hb = &bases[&(x, y)];
            let mut classes = Vec::new();
            for p in 0..2 {
                for k in 0..hb.count(p) {
                    let rep = c.to_global(x, y, hb.representative(p, k));
                    classes.push(ClassEntry {
                        parity: p as u8,
                        order: hb.order(p, k).to_string(),
                        representative: rep.iter().map(|(g, v)| (c.gen(*g).id.clone(), v.to_string())).collect(),
                    });
                }
            }
            homs.push(HomEntry { source: c.objects()[x].clone(), target: c.objects()[y].clone(), profile: hc.homology(), classes });
        }
    }
    let mut products = Vec::new();
    let mut failures = Vec::new();
    let reps = |x: usize, y: usize, p: usize, k: usize| c.to_global(x, y, bases[&(x, y)].representative(p, k));
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let (bxy, byz, bxz) = (&bases[&(x, y)], &bases[&(y, z)], &bases[&(x, z)]);
                for p in 0..2 {
                    for i in 0..bxy.count(p) {
                        for q in 0..2 {
                            for j in 0..byz.count(q) {
                                let a = reps(x, y, p, i);
                                let b = reps(y, z, q, j);
                                let prod = cycle_product(c, &a, &b);
                                let coords = bxz.classify((p + q) % 2, &c.to_local(&prod));
                                // representative independence: product with boundaries is a boundary
                                for (side, (s, t), other) in [(0, (x, y), &b), (1, (y, z), &a)] {
                                    for g in c.hom_gens(s, t) {
                                        let dg = c.mu(&[*g]).cloned().unwrap_or_default();
                                        if dg.is_empty() {
                                            continue;
                                        }
                                        let shifted = if side == 0 { cycle_product(c, &dg, other) } else { cycle_product(c, other, &dg) };
                                        if !bxz.is_boundary((p + q) % 2, &c.to_local(&shifted)) {
                                            failures.push(format!("{}·{} via {}", c.objects()[x], c.objects()[z], c.gen(*g).id));
                                        }
                                    }
                                }
                                products.push(ProductEntry {
                                    objects: [c.objects()[x].clone(), c.objects()[y].clone(), c.objects()[z].clone()],
                                    left: (p as u8, i),
                                    right: (q as u8, j),
                                    coordinates: coords.iter().map(|v| v.to_string()).collect(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    CohomologyTable { homs, products, failures }
}

/// Checks associativity of the cohomology-level product on all triples of basis classes.
pub fn cohomology_associative(c: &AInftyCategory) -> bool {
    let bases = homology_bases(c);
    let n = c.n_objects();
    let class = |x: usize, y: usize, p: usize, v: &SparseVec| -> Vec<BigInt> { bases[&(x, y)].classify(p, &c.to_local(v)) };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    for p in 0..2 {
                        for i in 0..bases[&(x, y)].count(p) {
                            let a = c.to_global(x, y, bases[&(x, y)].representative(p, i));
                            for q in 0..2 {
                                for j in 0..bases[&(y, z)].count(q) {
                                    let b = c.to_global(y, z, bases[&(y, z)].representative(q, j));
                                    for r in 0..2 {
                                        for k in 0..bases[&(z, w)].count(r) {
                                            let d = c.to_global(z, w, bases[&(z, w)].representative(r, k));
                                            let left = cycle_product(c, &cycle_product(c, &a, &b), &d);
                                            let right = cycle_product(c, &a, &cycle_product(c, &b, &d));
                                            let par = (p + q + r) % 2;
                                            if class(x, w, par, &left) != class(x, w, par, &right) {
                                                return false;
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    true
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}
