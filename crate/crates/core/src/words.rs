//! Complexes of composable words whose intermediate objects lie in a chosen set.
//!
//! A word `(g_1, …, g_L)` from `s` to `t` passes through objects `O_1, …, O_{L-1}`, all of which
//! must be interior. Its parity is `Σ‖g_i‖ + 1` and its differential contracts every subword with
//! `μ`, signed by the reduced degrees to its left. Quotients, bar tensors and module quotients are
//! all instances. In reduced mode a unit may not occur strictly inside a word.

use crate::ainfty::{AInftyCategory, AInftyError, CategoryBuilder};
use crate::chains::{ChainError, FreeComplex, Generator};
use crate::linalg::{sv_add, SparseVec};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("words from `{from}` to `{to}` have unbounded length and no exactness certificate; a cutoff is required")]
    InfiniteModel { from: String, to: String },
    #[error("a product of certified words from `{from}` to `{to}` leaves the certified range; a cutoff is required")]
    Unclosed { from: String, to: String },
    #[error(transparent)]
    Category(#[from] AInftyError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// How a word complex relates to the full (possibly infinite) one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Finiteness {
    /// Every word is present.
    Exact,
    /// Words of depth above `depth` were dropped; the dropped graded pieces are acyclic.
    Certified { depth: usize },
    /// Words of depth above `cutoff` were dropped with no guarantee.
    Truncated { cutoff: usize },
}

impl Finiteness {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Finiteness::Truncated { .. })
    }

    pub fn depth(&self) -> Option<usize> {
        match self {
            Finiteness::Exact => None,
            Finiteness::Certified { depth } => Some(*depth),
            Finiteness::Truncated { cutoff } => Some(*cutoff),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DepthBound {
    /// Largest depth of any word, if bounded.
    pub longest: Option<usize>,
    /// Depth beyond which every graded piece is acyclic, if that could be shown.
    pub certified: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum PathBound {
    NoPath,
    Max(usize),
    Unbounded,
}

impl PathBound {
    pub(crate) fn max_with(self, other: PathBound) -> PathBound {
        use PathBound::*;
        match (self, other) {
            (Unbounded, _) | (_, Unbounded) => Unbounded,
            (NoPath, x) | (x, NoPath) => x,
            (Max(a), Max(b)) => Max(a.max(b)),
        }
    }

    pub(crate) fn nodes(self) -> Option<usize> {
        match self {
            PathBound::NoPath => Some(0),
            PathBound::Max(m) => Some(m),
            PathBound::Unbounded => None,
        }
    }
}

/// Longest node count of a path `v_1 → … → v_m` with `starts[v_1]` and `ends[v_m]`.
pub(crate) fn longest_path(edges: &[Vec<usize>], starts: &[bool], ends: &[bool]) -> PathBound {
    let n = edges.len();
    let mut fwd = starts.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|v| starts[*v]).collect();
    while let Some(v) = stack.pop() {
        for w in &edges[v] {
            if !fwd[*w] {
                fwd[*w] = true;
                stack.push(*w);
            }
        }
    }
    let mut back = ends.to_vec();
    let mut changed = true;
    while changed {
        changed = false;
        for v in 0..n {
            if !back[v] && edges[v].iter().any(|w| back[*w]) {
                back[v] = true;
                changed = true;
            }
        }
    }
    let live: Vec<bool> = (0..n).map(|v| fwd[v] && back[v]).collect();
    if !live.iter().any(|x| *x) {
        return PathBound::NoPath;
    }
    // memoised longest path to an end; state 1 marks nodes on the current stack
    let mut state = vec![0u8; n];
    let mut best = vec![0usize; n];
    fn visit(v: usize, edges: &[Vec<usize>], live: &[bool], ends: &[bool], state: &mut [u8], best: &mut [usize]) -> bool {
        state[v] = 1;
        let mut b = if ends[v] { 1 } else { 0 };
        for w in &edges[v] {
            if !live[*w] {
                continue;
            }
            match state[*w] {
                1 => return false,
                0 => {
                    if !visit(*w, edges, live, ends, state, best) {
                        return false;
                    }
                }
                _ => {}
            }
            if best[*w] > 0 {
                b = b.max(best[*w] + 1);
            }
        }
        best[v] = b;
        state[v] = 2;
        true
    }
    let mut out = 0;
    for v in 0..n {
        if live[v] && state[v] == 0 && !visit(v, edges, &live, ends, &mut state, &mut best) {
            return PathBound::Unbounded;
        }
        if live[v] && starts[v] {
            out = out.max(best[v]);
        }
    }
    PathBound::Max(out)
}

/// hom(u, v), or hom(u, u) divided by the unit when `drop_unit`.
pub fn letter_complex(cat: &AInftyCategory, u: usize, v: usize, drop_unit: bool) -> FreeComplex {
    let full = cat.hom_complex(u, v);
    if !(drop_unit && u == v) {
        return (*full).clone();
    }
    let unit = cat.local_index(cat.unit(u));
    let keep: Vec<usize> = (0..full.rank()).filter(|i| *i != unit).collect();
    let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(a, b)| (*b, a)).collect();
    let gens = keep.iter().map(|i| full.generator(*i).clone()).collect();
    let entries: Vec<(usize, usize, BigInt)> =
        full.entries().into_iter().filter_map(|(t, s, c)| Some((*pos.get(&t)?, *pos.get(&s)?, c))).collect();
    FreeComplex::new(format!("{}/unit", full.label()), gens, entries).expect("quotient by a cycle")
}

pub(crate) fn dangerous(cx: &FreeComplex) -> bool {
    cx.rank() > 0 && !cx.is_acyclic()
}

/// Identifier of a word built from generator ids; single letters keep their own id.
pub fn word_id(cat: &AInftyCategory, w: &[usize]) -> String {
    if w.len() == 1 {
        return cat.gen(w[0]).id.clone();
    }
    let parts: Vec<&str> = w.iter().map(|g| cat.gen(*g).id.as_str()).collect();
    format!("[{}]", parts.join("|"))
}

pub fn word_display(cat: &AInftyCategory, w: &[usize]) -> String {
    if w.len() == 1 {
        return cat.gen(w[0]).display.clone();
    }
    let parts: Vec<&str> = w.iter().map(|g| cat.gen(*g).display.as_str()).collect();
    format!("[{}]", parts.join("|"))
}

pub fn word_parity(cat: &AInftyCategory, w: &[usize]) -> u8 {
    let s: usize = w.iter().map(|g| cat.gen(*g).reduced() as usize).sum();
    ((s + 1) % 2) as u8
}

/// A word complex together with its basis words.
#[derive(Clone, Debug)]
pub struct WordComplex {
    pub complex: Arc<FreeComplex>,
    pub words: Vec<Vec<usize>>,
    pub labels: Vec<String>,
    pub finiteness: Finiteness,
    lookup: HashMap<Vec<usize>, usize>,
}

impl WordComplex {
    pub fn index_of(&self, w: &[usize]) -> Option<usize> {
        self.lookup.get(w).copied()
    }
}

/// Words in `cat` with intermediate objects in `interior`.
#[derive(Clone, Copy)]
pub struct LinearWords<'a> {
    pub cat: &'a AInftyCategory,
    pub interior: &'a [bool],
    pub reduced: bool,
}

impl<'a> LinearWords<'a> {
    pub fn new(cat: &'a AInftyCategory, interior: &'a [bool], reduced: bool) -> Self {
        LinearWords { cat, interior, reduced }
    }

    fn has_letters(&self, u: usize, v: usize, inner: bool) -> bool {
        let gens = self.cat.hom_gens(u, v);
        if inner && self.reduced && u == v {
            gens.len() > 1
        } else {
            !gens.is_empty()
        }
    }

    /// Bounds on the depth (number of intermediate objects) of words from `s` to `t`.
    pub fn bound(&self, s: usize, t: usize) -> DepthBound {
        let n = self.cat.n_objects();
        let edges = |keep: &dyn Fn(usize, usize, bool) -> bool| -> (Vec<Vec<usize>>, Vec<bool>, Vec<bool>) {
            let mut e = vec![Vec::new(); n];
            let mut starts = vec![false; n];
            let mut ends = vec![false; n];
            for u in (0..n).filter(|u| self.interior[*u]) {
                starts[u] = keep(s, u, false);
                ends[u] = keep(u, t, false);
                for v in (0..n).filter(|v| self.interior[*v]) {
                    if keep(u, v, true) {
                        e[u].push(v);
                    }
                }
            }
            (e, starts, ends)
        };
        let (e, st, en) = edges(&|u, v, inner| self.has_letters(u, v, inner));
        let longest = longest_path(&e, &st, &en).nodes();
        let mut cache: BTreeMap<(usize, usize, bool), bool> = BTreeMap::new();
        let mut danger = |u: usize, v: usize, inner: bool| -> bool {
            *cache.entry((u, v, inner)).or_insert_with(|| dangerous(&letter_complex(self.cat, u, v, inner && self.reduced)))
        };
        let mut table = BTreeMap::new();
        for u in 0..n {
            for v in 0..n {
                for inner in [false, true] {
                    table.insert((u, v, inner), danger(u, v, inner));
                }
            }
        }
        let (e, st, en) = edges(&|u, v, inner| table[&(u, v, inner)]);
        let certified = longest_path(&e, &st, &en).nodes();
        DepthBound { longest, certified }
    }

    /// All words from `s` to `t` of depth at most `max_depth`, shortest first.
    pub fn words(&self, s: usize, t: usize, max_depth: usize) -> Vec<Vec<usize>> {
        let n = self.cat.n_objects();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(s, Vec::new())];
        while let Some((o, w)) = stack.pop() {
            for v in 0..n {
                for g in self.cat.hom_gens(o, v) {
                    let mut w2 = w.clone();
                    w2.push(*g);
                    if v == t {
                        out.push(w2.clone());
                    }
                    let depth = w2.len();
                    if self.interior[v] && depth <= max_depth {
                        if self.reduced && !w.is_empty() && self.cat.is_unit(*g) {
                            continue;
                        }
                        stack.push((v, w2));
                    }
                }
            }
        }
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out.dedup();
        out
    }

    /// Chooses the depth from the bound and an optional cutoff.
    pub fn plan(&self, s: usize, t: usize, cutoff: Option<usize>) -> Result<(usize, Finiteness), WordError> {
        let b = self.bound(s, t);
        let plan = match (b.longest, b.certified, cutoff) {
            (Some(m), _, None) => (m, Finiteness::Exact),
            (Some(m), _, Some(c)) if c >= m => (m, Finiteness::Exact),
            (None, Some(l), None) => (l, Finiteness::Certified { depth: l }),
            (None, Some(l), Some(c)) if c >= l => (l, Finiteness::Certified { depth: l }),
            (_, _, Some(c)) => (c, Finiteness::Truncated { cutoff: c }),
            (None, None, None) => {
                return Err(WordError::InfiniteModel { from: self.cat.objects()[s].clone(), to: self.cat.objects()[t].clone() })
            }
        };
        Ok(plan)
    }

    pub fn complex(&self, s: usize, t: usize, cutoff: Option<usize>) -> Result<WordComplex, WordError> {
        let (depth, fin) = self.plan(s, t, cutoff)?;
        self.complex_at(s, t, depth, fin)
    }

    pub fn complex_at(&self, s: usize, t: usize, depth: usize, fin: Finiteness) -> Result<WordComplex, WordError> {
        let words = self.words(s, t, depth);
        let lookup: HashMap<Vec<usize>, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let gens: Vec<Generator> = words.iter().map(|w| Generator::new(word_id(self.cat, w), word_parity(self.cat, w))).collect();
        let mut entries = Vec::new();
        for (i, w) in words.iter().enumerate() {
            for (w2, c) in contract(self.cat, &[w.as_slice()], self.reduced) {
                let j = lookup.get(&w2).copied().expect("contraction stays inside the word basis");
                entries.push((j, i, c));
            }
        }
        let label = format!("words({},{})", self.cat.objects()[s], self.cat.objects()[t]);
        let complex = Arc::new(FreeComplex::new(label, gens, entries)?);
        let labels = words.iter().map(|w| word_display(self.cat, w)).collect();
        Ok(WordComplex { complex, words, labels, finiteness: fin, lookup })
    }
}

/// Σ over subwords of the concatenation that meet every factor's junction, contracted with μ.
pub fn contract(cat: &AInftyCategory, factors: &[&[usize]], reduced: bool) -> Vec<(Vec<usize>, BigInt)> {
    let whole: Vec<usize> = factors.iter().flat_map(|w| w.iter().copied()).collect();
    let total = whole.len();
    let first = factors[0].len();
    let last = factors[factors.len() - 1].len();
    let arity = cat.max_arity();
    let mut acc: BTreeMap<Vec<usize>, BigInt> = BTreeMap::new();
    let mut sign_before = 0usize;
    for i in 0..first {
        let lo = (i + 1).max(total - last + 1);
        let hi = total.min(i + arity);
        for j in lo..=hi {
            if let Some(out) = cat.mu(&whole[i..j]) {
                for (h, c) in out {
                    let new_len = total - (j - i) + 1;
                    if reduced && i > 0 && i < new_len - 1 && cat.is_unit(*h) {
                        continue;
                    }
                    let mut w = whole[..i].to_vec();
                    w.push(*h);
                    w.extend_from_slice(&whole[j..]);
                    let c = if sign_before % 2 == 1 { -c.clone() } else { c.clone() };
                    *acc.entry(w).or_default() += c;
                }
            }
        }
        sign_before += cat.gen(whole[i]).reduced() as usize;
    }
    acc.into_iter().filter(|(_, c)| *c != BigInt::from(0)).collect()
}

/// The category of words between `keep` objects through `interior` objects.
#[derive(Clone, Debug)]
pub struct QuotientModel {
    pub category: AInftyCategory,
    /// Basis word of each generator of `category`.
    pub words: Vec<Vec<usize>>,
    /// Object of `category` for each kept object of the source.
    pub object_map: Vec<Option<usize>>,
    pub finiteness: BTreeMap<(usize, usize), Finiteness>,
}

impl QuotientModel {
    pub fn is_exact(&self) -> bool {
        self.finiteness.values().all(|f| f.is_exact())
    }

    pub fn is_truncated(&self) -> bool {
        !self.is_exact()
    }

    pub fn generator_of_letter(&self, g: usize) -> Option<usize> {
        self.words.iter().position(|w| w.len() == 1 && w[0] == g)
    }
}

pub fn quotient_model(
    cat: &AInftyCategory,
    interior: &[bool],
    keep: &[bool],
    reduced: bool,
    cutoff: Option<usize>,
    label: &str,
) -> Result<QuotientModel, WordError> {
    let lw = LinearWords::new(cat, interior, reduced);
    let n = cat.n_objects();
    let mut b = CategoryBuilder::new(label);
    let mut object_map = vec![None; n];
    for x in (0..n).filter(|x| keep[*x]) {
        let unit = cat.gen(cat.unit(x));
        let o = b.object_with_unit(cat.objects()[x].clone(), unit.id.clone())?;
        object_map[x] = Some(o);
    }
    for x in 0..n {
        for y in 0..n {
            if let (Some(a), Some(c)) = (object_map[x], object_map[y]) {
                if cat.greater_than(x, y) {
                    b.order(a, c);
                }
            }
        }
    }
    let mut words: Vec<Vec<usize>> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut finiteness = BTreeMap::new();
    for x in 0..n {
        for y in 0..n {
            let (Some(a), Some(c)) = (object_map[x], object_map[y]) else { continue };
            let wc = lw.complex(x, y, cutoff)?;
            finiteness.insert((a, c), wc.finiteness);
            for w in &wc.words {
                let g = if w.len() == 1 && cat.is_unit(w[0]) {
                    b.unit(a)
                } else {
                    b.gen_displayed(word_id(cat, w), word_display(cat, w), a, c, word_parity(cat, w))?
                };
                index.insert(w.clone(), g);
            }
        }
    }
    words.resize(b.n_gens(), Vec::new());
    for (w, g) in &index {
        words[*g] = w.clone();
    }
    let depth_ok = |w: &[usize], x: usize, y: usize| -> bool {
        match finiteness.get(&(object_map[x].unwrap(), object_map[y].unwrap())) {
            Some(Finiteness::Truncated { cutoff }) => w.len() <= cutoff + 1,
            _ => true,
        }
    };
    let to_output = |out: Vec<(Vec<usize>, BigInt)>, x: usize, y: usize| -> Result<SparseVec, WordError> {
        let mut v = SparseVec::new();
        for (w, c) in out {
            if !depth_ok(&w, x, y) {
                continue;
            }
            let g = *index.get(&w).ok_or_else(|| WordError::Unclosed { from: cat.objects()[x].clone(), to: cat.objects()[y].clone() })?;
            sv_add(&mut v, g, &c);
        }
        Ok(v)
    };
    // tuples of generators, grouped by source object, with middle letters bounded by the arity
    let arity = cat.max_arity();
    let mut by_src: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (g, w) in words.iter().enumerate() {
        by_src.entry(cat.gen(w[0]).src).or_default().push(g);
    }
    let src_of = |g: usize| cat.gen(words[g][0]).src;
    let tgt_of = |g: usize| cat.gen(*words[g].last().unwrap()).tgt;
    let mut stack: Vec<(Vec<usize>, usize)> = (0..words.len()).map(|g| (vec![g], 0)).collect();
    while let Some((tuple, middle)) = stack.pop() {
        let k = tuple.len();
        let skip_unit = k >= 3 && tuple.iter().any(|g| words[*g].len() == 1 && cat.is_unit(words[*g][0]));
        if !skip_unit {
            let parts: Vec<&[usize]> = tuple.iter().map(|g| words[*g].as_slice()).collect();
            let out = contract(cat, &parts, reduced);
            let (x, y) = (src_of(tuple[0]), tgt_of(tuple[k - 1]));
            let v = to_output(out, x, y)?;
            if !v.is_empty() {
                b.mu_big(tuple.clone(), v);
            }
        }
        if k + 1 > arity {
            continue;
        }
        let last = *tuple.last().unwrap();
        let middle_next = if k >= 2 { middle + words[last].len() } else { 0 };
        if middle_next + 2 > arity {
            continue;
        }
        if let Some(next) = by_src.get(&tgt_of(last)) {
            for g in next {
                let mut t = tuple.clone();
                t.push(*g);
                stack.push((t, middle_next));
            }
        }
    }
    let category = match b.clone().build(true) {
        Ok(c) => c,
        Err(AInftyError::NotDirected(..)) => b.build(false)?,
        Err(e) => return Err(e.into()),
    };
    Ok(QuotientModel { category, words, object_map, finiteness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::{linear_category, mu3_category};

    #[test]
    fn quotient_of_a3_by_middle_object() {
        let c = linear_category(3);
        let y = c.object_id("Y").unwrap();
        let interior: Vec<bool> = (0..3).map(|i| i == y).collect();
        let keep = vec![true, false, true];
        let q = quotient_model(&c, &interior, &keep, true, None, "A3/Y").unwrap();
        assert!(q.is_exact());
        assert!(q.category.check_ainfty(4).passed());
        let hx = q.category.hom_complex(0, 1);
        // basis ab, [a|b] with d[a|b] = -ab up to sign: acyclic
        assert_eq!(hx.rank(), 2);
        assert!(hx.is_acyclic());
    }

    #[test]
    fn longest_path_detects_cycles() {
        let edges = vec![vec![1], vec![0]];
        assert_eq!(longest_path(&edges, &[true, false], &[false, true]), PathBound::Unbounded);
        let edges = vec![vec![1], vec![2], vec![]];
        assert_eq!(longest_path(&edges, &[true, false, false], &[false, false, true]), PathBound::Max(3));
        assert_eq!(longest_path(&edges, &[false, false, true], &[true, false, false]), PathBound::NoPath);
    }

    #[test]
    fn quotients_of_mu3_satisfy_relations() {
        let c = mu3_category();
        for mask in 1..15u32 {
            let interior: Vec<bool> = (0..4).map(|i| mask & (1 << i) != 0).collect();
            let keep: Vec<bool> = vec![true; 4];
            let q = quotient_model(&c, &interior, &keep, true, None, "q").unwrap();
            let r = q.category.check_ainfty(5);
            assert!(r.passed(), "mask {mask}: {:?}", r.violations.first());
        }
    }
}
