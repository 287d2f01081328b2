//! Quotients by object subsets, cones of closed morphisms, localization and wrapped colimits.

use crate::ainfty::{AInftyCategory, AInftyError, CategoryBuilder};
use crate::bimodule::{build_any, Bimodule, BimoduleError};
use crate::chains::{ChainError, ChainMap, HomologyProfile};
use crate::linalg::{sv_add, SparseVec};
use crate::words::{quotient_model, Finiteness, LinearWords, QuotientModel, WordComplex, WordError};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuotientError {
    #[error("morphism {0} is not a parity-0 cycle")]
    NotCycle(String),
    #[error("morphism {0} does not lie in a single hom space")]
    NotHomogeneous(String),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Category(#[from] AInftyError),
    #[error(transparent)]
    Bimodule(#[from] BimoduleError),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

fn mask(n: usize, objs: &[usize]) -> Vec<bool> {
    (0..n).map(|x| objs.contains(&x)).collect()
}

/// `C/A` on all objects of `C`.
pub fn quotient_category(c: &AInftyCategory, a: &[usize], reduced: bool, cutoff: Option<usize>) -> Result<QuotientModel, QuotientError> {
    let n = c.n_objects();
    let label = if a.is_empty() { c.label().to_string() } else { format!("{}/{}", c.label(), names(c, a)) };
    Ok(quotient_model(c, &mask(n, a), &vec![true; n], reduced, cutoff, &label)?)
}

fn names(c: &AInftyCategory, objs: &[usize]) -> String {
    let v: Vec<&str> = objs.iter().map(|x| c.objects()[*x].as_str()).collect();
    format!("{{{}}}", v.join(","))
}

/// `M/A` for the right action: a bimodule over `(left, C/A)`.
pub fn quotient_module(
    m: &Bimodule,
    a: &[usize],
    reduced: bool,
    cutoff: Option<usize>,
) -> Result<(Bimodule, Arc<QuotientModel>), QuotientError> {
    let q = Arc::new(quotient_category(&m.right, a, reduced, cutoff)?);
    let coll = m.collage();
    let n = coll.n_objects();
    let interior: Vec<bool> = (0..n).map(|o| a.iter().any(|x| m.right_object(*x) == o)).collect();
    let label = format!("{}/{}", m.label(), names(&m.right, a));
    let model = quotient_model(coll, &interior, &vec![true; n], reduced, cutoff, &label)?;
    let om = &model.object_map;
    let left_obj: Vec<usize> = (0..m.left.n_objects()).map(|x| om[m.left_object(x)].unwrap()).collect();
    let right_obj: Vec<usize> = (0..m.right.n_objects()).map(|y| om[m.right_object(y)].unwrap()).collect();
    let left_gen: Vec<usize> = (0..m.left.gens().len()).map(|g| model.generator_of_letter(m.left_letter(g)).unwrap()).collect();
    // words of right letters correspond to generators of C/A
    let index: HashMap<&Vec<usize>, usize> = model.words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut right_gen = Vec::with_capacity(q.words.len());
    for w in &q.words {
        let lifted: Vec<usize> = w.iter().map(|g| m.right_letter(*g)).collect();
        right_gen.push(index[&lifted]);
    }
    let module =
        Bimodule::assemble(label, m.left.clone(), Arc::new(q.category.clone()), model.category, left_obj, right_obj, left_gen, right_gen);
    Ok((module, q))
}

/// A cone `Cone(c)` of a parity-0 cycle `c ∈ hom(source, target)`.
#[derive(Clone, Debug)]
pub struct ConeSpec {
    pub name: String,
    pub source: usize,
    pub target: usize,
    pub cycle: SparseVec,
}

impl ConeSpec {
    /// Cone of a cycle given as a combination of generators of a single hom space.
    pub fn new(c: &AInftyCategory, cycle: SparseVec) -> Result<ConeSpec, QuotientError> {
        let label = cycle_label(c, &cycle);
        let first = *cycle.keys().next().ok_or_else(|| QuotientError::NotHomogeneous(label.clone()))?;
        let (s, t) = (c.gen(first).src, c.gen(first).tgt);
        if cycle.keys().any(|g| c.gen(*g).src != s || c.gen(*g).tgt != t) {
            return Err(QuotientError::NotHomogeneous(label));
        }
        let name = match cycle.iter().next() {
            Some((g, x)) if cycle.len() == 1 && x.is_one() => format!("Cone({})", c.gen(*g).id),
            _ => format!("Cone({label})"),
        };
        Ok(ConeSpec { name, source: s, target: t, cycle })
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

fn cycle_label(c: &AInftyCategory, v: &SparseVec) -> String {
    let parts: Vec<String> = v.iter().map(|(g, x)| format!("{x}{}", c.gen(*g).id)).collect();
    parts.join("+")
}

#[derive(Clone, Debug)]
struct Twisted {
    name: String,
    summands: Vec<(usize, u8)>,
    /// components `(i, j, g, coeff)` of the twisting differential
    delta: Vec<(usize, usize, usize, BigInt)>,
}

/// Component generator from summand `i` of one twisted object to summand `j` of another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Comp {
    s: usize,
    i: usize,
    t: usize,
    j: usize,
    g: usize,
}

/// The category `C` enlarged by cone objects, with strict units on every cone.
#[derive(Clone, Debug)]
pub struct ConeCategory {
    pub category: AInftyCategory,
    pub base_objects: Vec<usize>,
    pub cone_objects: Vec<usize>,
    /// `(source, target)` of the cycle behind each cone object.
    pub summands: BTreeMap<usize, (usize, usize)>,
}

pub fn adjoin_cones(c: &AInftyCategory, w: &[ConeSpec]) -> Result<ConeCategory, QuotientError> {
    for spec in w {
        let mut d = SparseVec::new();
        for (g, x) in &spec.cycle {
            if c.gen(*g).parity != 0 {
                return Err(QuotientError::NotCycle(cycle_label(c, &spec.cycle)));
            }
            if let Some(out) = c.mu(&[*g]) {
                for (h, y) in out {
                    sv_add(&mut d, *h, &(x * y));
                }
            }
        }
        if !d.is_empty() {
            return Err(QuotientError::NotCycle(cycle_label(c, &spec.cycle)));
        }
    }
    let mut objs: Vec<Twisted> =
        (0..c.n_objects()).map(|x| Twisted { name: c.objects()[x].clone(), summands: vec![(x, 0)], delta: vec![] }).collect();
    for spec in w {
        let delta = spec.cycle.iter().map(|(g, x)| (0, 1, *g, x.clone())).collect();
        objs.push(Twisted { name: spec.name.clone(), summands: vec![(spec.source, 1), (spec.target, 0)], delta });
    }
    let n0 = c.n_objects();
    let comp_id = |k: &Comp| -> String {
        let g = &c.gen(k.g).id;
        if k.s < n0 && k.t < n0 {
            return g.clone();
        }
        let end = |o: usize, i: usize| if o < n0 { objs[o].name.clone() } else { format!("{}#{}", objs[o].name, i) };
        format!("{}>{}:{}", end(k.s, k.i), end(k.t, k.j), g)
    };
    // old component basis and its rebased replacement
    let mut comps: Vec<Comp> = Vec::new();
    for s in 0..objs.len() {
        for t in 0..objs.len() {
            for (i, (a, _)) in objs[s].summands.iter().enumerate() {
                for (j, (b, _)) in objs[t].summands.iter().enumerate() {
                    for g in c.hom_gens(*a, *b) {
                        comps.push(Comp { s, i, t, j, g: *g });
                    }
                }
            }
        }
    }
    let parity = |k: &Comp| -> u8 { (c.gen(k.g).parity + objs[k.s].summands[k.i].1 + objs[k.t].summands[k.j].1) & 1 };
    let mut b = CategoryBuilder::new(format!("{}+cones", c.label()));
    let mut new_of: HashMap<Comp, usize> = HashMap::new();
    let mut units_old: Vec<Vec<Comp>> = Vec::new();
    for (o, tw) in objs.iter().enumerate() {
        let first = Comp { s: o, i: 0, t: o, j: 0, g: c.unit(tw.summands[0].0) };
        let unit_id = if o < n0 { c.gen(c.unit(o)).id.clone() } else { format!("e_{}", tw.name) };
        let ob = b.object_with_unit(tw.name.clone(), unit_id)?;
        new_of.insert(first, b.unit(ob));
        units_old.push((0..tw.summands.len()).map(|i| Comp { s: o, i, t: o, j: i, g: c.unit(tw.summands[i].0) }).collect());
    }
    for k in &comps {
        if new_of.contains_key(k) {
            continue;
        }
        let g = b.gen(comp_id(k), k.s, k.t, parity(k))?;
        new_of.insert(*k, g);
    }
    for (gr, le) in c.order_relations() {
        b.order(*gr, *le);
    }
    let old_of: HashMap<usize, Comp> = new_of.iter().map(|(k, v)| (*v, *k)).collect();
    // new generator -> combination of old components (the unit of a cone is the sum of its summand units)
    let expand = |g: usize| -> Vec<(Comp, BigInt)> {
        let k = old_of[&g];
        if k.s == k.t && k.i == 0 && k.j == 0 && c.is_unit(k.g) {
            return units_old[k.s].iter().map(|u| (*u, BigInt::one())).collect();
        }
        vec![(k, BigInt::one())]
    };
    // old component output -> new basis: ẽ_0 = e_T − Σ_{i>0} ẽ_i
    let contract_out = |v: BTreeMap<Comp, BigInt>| -> SparseVec {
        let mut out = SparseVec::new();
        for (k, x) in v {
            sv_add(&mut out, new_of[&k], &x);
            if k.s == k.t && k.i == 0 && k.j == 0 && c.is_unit(k.g) && objs[k.s].summands.len() > 1 {
                for u in &units_old[k.s][1..] {
                    sv_add(&mut out, new_of[u], &-x.clone());
                }
            }
        }
        out
    };
    let arity = c.max_arity();
    let mu_old = |word: &[Comp]| -> BTreeMap<Comp, BigInt> { twisted_mu(c, &objs, word) };
    let mut by_src: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    let n_new = b.n_gens();
    let src_of: Vec<usize> = (0..n_new).map(|g| old_of[&g].s).collect();
    let tgt_of: Vec<usize> = (0..n_new).map(|g| old_of[&g].t).collect();
    for g in 0..n_new {
        by_src.entry(src_of[g]).or_default().push(g);
    }
    let mut stack: Vec<Vec<usize>> = (0..n_new).map(|g| vec![g]).collect();
    while let Some(tuple) = stack.pop() {
        // multilinear expansion over the rebased units
        let mut acc: BTreeMap<Comp, BigInt> = BTreeMap::new();
        let parts: Vec<Vec<(Comp, BigInt)>> = tuple.iter().map(|g| expand(*g)).collect();
        let mut idx = vec![0usize; parts.len()];
        'outer: loop {
            let word: Vec<Comp> = idx.iter().zip(&parts).map(|(i, p)| p[*i].0).collect();
            if word.windows(2).all(|p| p[0].t == p[1].s) {
                for (k, x) in mu_old(&word) {
                    *acc.entry(k).or_default() += x;
                }
            }
            for pos in (0..idx.len()).rev() {
                idx[pos] += 1;
                if idx[pos] < parts[pos].len() {
                    continue 'outer;
                }
                idx[pos] = 0;
            }
            break;
        }
        acc.retain(|_, x| !x.is_zero());
        let out = contract_out(acc);
        if !out.is_empty() {
            b.mu_big(tuple.clone(), out);
        }
        if tuple.len() < arity {
            for g in by_src.get(&tgt_of[*tuple.last().unwrap()]).into_iter().flatten() {
                let mut t = tuple.clone();
                t.push(*g);
                stack.push(t);
            }
        }
    }
    b.explicit_units();
    let category = build_any(b)?;
    let summands = w.iter().enumerate().map(|(i, s)| (n0 + i, (s.source, s.target))).collect();
    Ok(ConeCategory { category, base_objects: (0..n0).collect(), cone_objects: (n0..objs.len()).collect(), summands })
}

/// `μ_Tw` on old component generators: insert the twisting differential at every slot.
fn twisted_mu(c: &AInftyCategory, objs: &[Twisted], word: &[Comp]) -> BTreeMap<Comp, BigInt> {
    #[derive(Clone)]
    struct Path {
        letters: Vec<usize>,
        shifts: Vec<u8>,
        coeff: BigInt,
        start: usize,
        at: usize,
    }
    let limit = c.max_arity();
    let k = word.len();
    let extend = |paths: Vec<Path>, obj: usize| -> Vec<Path> {
        let mut out = Vec::new();
        let mut frontier = paths;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for p in &frontier {
                if p.letters.len() >= limit {
                    continue;
                }
                for (i, j, g, x) in &objs[obj].delta {
                    if *i == p.at {
                        let mut q = p.clone();
                        q.letters.push(*g);
                        q.shifts.push(objs[obj].summands[*i].1);
                        q.coeff *= x;
                        q.at = *j;
                        next.push(q);
                    }
                }
            }
            out.extend(frontier);
            frontier = next;
        }
        out
    };
    let t0 = word[0].s;
    let seeds =
        (0..objs[t0].summands.len()).map(|p| Path { letters: vec![], shifts: vec![], coeff: BigInt::one(), start: p, at: p }).collect();
    let mut paths = extend(seeds, t0);
    for x in word {
        paths = paths
            .into_iter()
            .filter(|p| p.at == x.i && p.letters.len() < limit)
            .map(|mut p| {
                p.letters.push(x.g);
                p.shifts.push(objs[x.s].summands[x.i].1);
                p.at = x.j;
                p
            })
            .collect();
        paths = extend(paths, x.t);
    }
    let tk = word[k - 1].t;
    let mut out = BTreeMap::new();
    for p in paths {
        let Some(v) = c.mu(&p.letters) else { continue };
        let odd = p.shifts.iter().filter(|s| **s == 1).count() % 2 == 1;
        for (h, x) in v {
            let comp = Comp { s: t0, i: p.start, t: tk, j: p.at, g: *h };
            let val = if odd { -(x * &p.coeff) } else { x * &p.coeff };
            *out.entry(comp).or_insert_with(BigInt::zero) += val;
        }
    }
    out
}

/// Localized hom `C_{W^{-1}}(x, y)` between ordinary objects.
#[derive(Clone, Debug, Serialize)]
pub struct LocalizedHom {
    pub source: String,
    pub target: String,
    pub finiteness: Finiteness,
    pub rank: usize,
    pub homology: HomologyProfile,
    /// Homology one step past the cutoff, for truncated models.
    pub next_homology: Option<HomologyProfile>,
    /// Whether adding one more word length keeps homology unchanged (inclusion is a quasi-isomorphism).
    pub stabilized: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct Localization {
    pub cones: ConeCategory,
    pub homs: BTreeMap<(usize, usize), WordComplex>,
    pub report: Vec<LocalizedHom>,
}

pub fn localize(c: &AInftyCategory, w: &[ConeSpec], reduced: bool, cutoff: Option<usize>) -> Result<Localization, QuotientError> {
    let cones = adjoin_cones(c, w)?;
    let cat = &cones.category;
    let n = cat.n_objects();
    let interior = mask(n, &cones.cone_objects);
    let lw = LinearWords::new(cat, &interior, reduced);
    let mut homs = BTreeMap::new();
    let mut report = Vec::new();
    for x in cones.base_objects.clone() {
        for y in cones.base_objects.clone() {
            let wc = lw.complex(x, y, cutoff)?;
            let (next_homology, stabilized) = match wc.finiteness {
                Finiteness::Truncated { cutoff } => {
                    let next = lw.complex_at(x, y, cutoff + 1, Finiteness::Truncated { cutoff: cutoff + 1 })?;
                    let inc = crate::bimodule::inclusion_by_ids(&wc.complex, &next.complex)?;
                    (Some(next.complex.homology()), Some(inc.is_quasi_iso()?))
                }
                _ => (None, None),
            };
            report.push(LocalizedHom {
                source: cat.objects()[x].clone(),
                target: cat.objects()[y].clone(),
                finiteness: wc.finiteness,
                rank: wc.complex.rank(),
                homology: wc.complex.homology(),
                next_homology,
                stabilized,
            });
            homs.insert((x, y), wc);
        }
    }
    Ok(Localization { cones, homs, report })
}

/// One row of a forced-truncation scan of a localized hom.
#[derive(Clone, Debug, Serialize)]
pub struct StabilizationStep {
    pub cutoff: usize,
    pub rank: usize,
    pub homology: HomologyProfile,
    /// Whether the inclusion into the model at `cutoff + 1` is a quasi-isomorphism.
    pub stable: bool,
}

/// Localized hom `(x, y)` truncated at every cutoff up to `max_cutoff`, ignoring any certificate.
pub fn stabilization_scan(
    loc: &Localization,
    x: usize,
    y: usize,
    reduced: bool,
    max_cutoff: usize,
) -> Result<Vec<StabilizationStep>, QuotientError> {
    let cat = &loc.cones.category;
    let interior = mask(cat.n_objects(), &loc.cones.cone_objects);
    let lw = LinearWords::new(cat, &interior, reduced);
    let at = |l: usize| lw.complex_at(x, y, l, Finiteness::Truncated { cutoff: l });
    let mut steps = Vec::new();
    let mut cur = at(0)?;
    for l in 0..=max_cutoff {
        let next = at(l + 1)?;
        let inc = crate::bimodule::inclusion_by_ids(&cur.complex, &next.complex)?;
        steps.push(StabilizationStep {
            cutoff: l,
            rank: cur.complex.rank(),
            homology: cur.complex.homology(),
            stable: inc.is_quasi_iso()?,
        });
        cur = next;
    }
    Ok(steps)
}

/// First cutoff from which every later step of the scan is stable.
pub fn stabilized_at(steps: &[StabilizationStep]) -> Option<usize> {
    let last_bad = steps.iter().rposition(|s| !s.stable);
    match last_bad {
        None => steps.first().map(|s| s.cutoff),
        Some(i) if i + 1 < steps.len() => Some(steps[i + 1].cutoff),
        Some(_) => None,
    }
}

/// Finite directed system `L⁽⁰⁾ ← L⁽¹⁾ ← …` with connecting cycles `c_i ∈ hom(L⁽ⁱ⁺¹⁾, L⁽ⁱ⁾)`.
#[derive(Clone, Debug)]
pub struct DirectedSystem {
    pub stages: Vec<usize>,
    pub cycles: Vec<SparseVec>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WrappedColimit {
    pub profiles: Vec<HomologyProfile>,
    /// Matrices of the connecting maps on the free part of homology, per parity.
    pub maps: Vec<[Vec<Vec<String>>; 2]>,
    pub isomorphisms: Vec<bool>,
    pub colimit: HomologyProfile,
    pub stabilized: bool,
}

/// `x ↦ μ²(c, x)` from `hom(a, k)` to `hom(b, k)` for a cycle `c ∈ hom(b, a)`.
pub fn precompose_map(o: &AInftyCategory, c: &SparseVec, a: usize, b: usize, k: usize) -> Result<ChainMap, ChainError> {
    let src = o.hom_complex(a, k);
    let tgt = o.hom_complex(b, k);
    let mut entries = Vec::new();
    for (i, g) in o.hom_gens(a, k).iter().enumerate() {
        let out = o.mu_multi(&[c.clone(), SparseVec::from([(*g, BigInt::one())])]);
        for (h, x) in out {
            entries.push((o.local_index(h), i, x));
        }
    }
    ChainMap::new(src, tgt, 0, entries)
}

/// Matrix of a chain map on the free parts of homology bases.
pub fn homology_matrix(f: &ChainMap) -> [Vec<Vec<BigInt>>; 2] {
    let sb = f.source.homology_basis();
    let tb = f.target.homology_basis();
    let mut out: [Vec<Vec<BigInt>>; 2] = [Vec::new(), Vec::new()];
    for p in 0..2 {
        let free_t: Vec<usize> = (0..tb.count(p)).filter(|k| tb.order(p, *k).is_zero()).collect();
        for k in (0..sb.count(p)).filter(|k| sb.order(p, *k).is_zero()) {
            let img = f.apply(sb.representative(p, k));
            let coords = tb.classify(p, &img);
            out[p].push(free_t.iter().map(|i| coords[*i].clone()).collect());
        }
    }
    out
}

pub fn wrapped_colimit(o: &AInftyCategory, sys: &DirectedSystem, k: usize) -> Result<WrappedColimit, QuotientError> {
    let mut profiles = Vec::new();
    let mut maps = Vec::new();
    let mut isos = Vec::new();
    for (i, s) in sys.stages.iter().enumerate() {
        profiles.push(o.hom_complex(*s, k).homology());
        if i + 1 < sys.stages.len() {
            let c = &sys.cycles[i];
            let spec = ConeSpec::new(o, c.clone())?;
            if spec.source != sys.stages[i + 1] || spec.target != *s {
                return Err(QuotientError::NotHomogeneous(cycle_label(o, c)));
            }
            adjoin_cones(o, &[spec])?;
            let f = precompose_map(o, c, *s, sys.stages[i + 1], k)?;
            let m = homology_matrix(&f);
            maps.push(m.map(|rows| rows.into_iter().map(|r| r.into_iter().map(|x| x.to_string()).collect()).collect()));
            isos.push(f.is_quasi_iso()?);
        }
    }
    let stabilized = isos.len() >= 2 && isos[isos.len() - 2..].iter().all(|x| *x) || isos.len() == 1 && isos[0];
    Ok(WrappedColimit { colimit: profiles.last().cloned().unwrap_or_default(), profiles, maps, isomorphisms: isos, stabilized })
}

/// The functor `C → C/A` as a map of categories sharing generator ids.
pub fn quotient_inclusion(c: &Arc<AInftyCategory>, q: &Arc<AInftyCategory>) -> Result<crate::ainfty::AInftyFunctor, AInftyError> {
    crate::ainfty::AInftyFunctor::inclusion_by_name(c.clone(), q.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::big;
    use crate::library::{linear_category, mu3_category};

    #[test]
    fn a3_quotient_by_middle_is_acyclic_between_ends() {
        let c = linear_category(3);
        let q = quotient_category(&c, &[1], true, None).unwrap();
        assert!(q.category.check_ainfty(4).passed());
        let h = q.category.hom_complex(0, 2);
        assert_eq!(h.rank(), 2);
        assert!(h.is_acyclic());
        let hy = q.category.hom_complex(0, 1);
        assert!(hy.is_acyclic());
    }

    #[test]
    fn cones_satisfy_relations() {
        let c = linear_category(2);
        let a = c.gen_id("a").unwrap();
        let spec = ConeSpec::new(&c, SparseVec::from([(a, big(1))])).unwrap();
        let cc = adjoin_cones(&c, &[spec]).unwrap();
        let r = cc.category.check_ainfty(4);
        assert!(r.passed(), "{:?}", r.violations.first());
        let e = c.unit(0);
        let id = ConeSpec::new(&c, SparseVec::from([(e, big(1))])).unwrap();
        let cc = adjoin_cones(&c, &[id]).unwrap();
        assert!(cc.category.check_ainfty(4).passed());
        let z = cc.cone_objects[0];
        for x in 0..cc.category.n_objects() {
            assert!(cc.category.hom_complex(x, z).is_acyclic());
        }
        let m = mu3_category();
        let g = m.gen_id("a").unwrap();
        let cc = adjoin_cones(&m, &[ConeSpec::new(&m, SparseVec::from([(g, big(1))])).unwrap()]).unwrap();
        let r = cc.category.check_ainfty(4);
        assert!(r.passed(), "{:?}", r.violations.first());
    }
}

#[cfg(test)]
mod localization_tests {
    use super::*;
    use crate::ainfty::big;
    use crate::bimodule::composition_map;
    use crate::library::linear_category;

    fn crafted() -> (AInftyCategory, usize) {
        let mut b = CategoryBuilder::new("wrap");
        let l1 = b.object("L1");
        let l0 = b.object("L0");
        let k = b.object("K");
        b.order(l1, l0);
        b.order(l0, k);
        let c = b.gen("c", l1, l0, 0).unwrap();
        let u = b.gen("u", l0, k, 0).unwrap();
        b.gen("u'", l0, k, 0).unwrap();
        let v = b.gen("v", l1, k, 0).unwrap();
        b.mu(&[c, u], &[(v, 1)]);
        (b.build(true).unwrap(), c)
    }

    #[test]
    fn empty_localization_is_the_category() {
        let c = linear_category(3);
        let l = localize(&c, &[], true, None).unwrap();
        assert_eq!(l.cones.category.gens(), c.gens());
        for ((x, y), wc) in &l.homs {
            assert_eq!(wc.complex.rank(), c.hom_gens(*x, *y).len());
            assert!(wc.finiteness.is_exact());
        }
    }

    #[test]
    fn inverting_an_identity_changes_nothing() {
        let c = linear_category(2);
        let spec = ConeSpec::new(&c, SparseVec::from([(c.unit(0), big(1))])).unwrap();
        let l = localize(&c, &[spec], true, Some(2)).unwrap();
        for r in &l.report {
            let (x, y) = (c.object_id(&r.source).unwrap(), c.object_id(&r.target).unwrap());
            assert_eq!(r.homology, c.hom_complex(x, y).homology());
        }
        let steps = stabilization_scan(&l, 0, 1, true, 3).unwrap();
        assert!(stabilized_at(&steps).unwrap() <= 2);
    }

    #[test]
    fn localization_matches_the_wrapped_colimit() {
        let (o, c) = crafted();
        let (l1, l0, k) = (0, 1, 2);
        let cycle = SparseVec::from([(c, big(1))]);
        let loc = localize(&o, &[ConeSpec::new(&o, cycle.clone()).unwrap()], true, None).unwrap();
        let w = wrapped_colimit(&o, &DirectedSystem { stages: vec![l0, l1], cycles: vec![cycle] }, k).unwrap();
        assert_eq!(loc.homs[&(l0, k)].complex.homology(), w.colimit);
        assert_eq!(w.colimit, HomologyProfile::free(1, 0));
        let steps = stabilization_scan(&loc, l0, k, true, 3).unwrap();
        assert!(stabilized_at(&steps).is_some_and(|s| s <= 3));
    }

    #[test]
    fn cone_of_a_matches_the_mapping_cone_sequence() {
        // hom(Cone(a), Y) = hom(X, Y)[1] ⊕ hom(Y, Y) with differential μ²(a, −): an isomorphism Z → Z
        let c = linear_category(2);
        let a = c.gen_id("a").unwrap();
        let cc = adjoin_cones(&c, &[ConeSpec::new(&c, SparseVec::from([(a, big(1))])).unwrap()]).unwrap();
        let z = cc.cone_objects[0];
        let h = cc.category.hom_complex(z, 1);
        assert_eq!(h.rank(), 2);
        assert!(h.is_acyclic());
        assert_eq!(cc.category.hom_complex(z, 0).homology(), HomologyProfile::free(0, 1));
        assert_eq!(cc.category.hom_complex(z, z).homology(), HomologyProfile::free(1, 0));
    }

    #[test]
    fn composition_through_a_quotient_is_closed() {
        let c = Arc::new(linear_category(3));
        let q = Arc::new(quotient_category(&c, &[1], true, None).unwrap().category);
        let iota = quotient_inclusion(&c, &q).unwrap();
        let (t, f) = composition_map(&iota, true, None).unwrap();
        assert!(t.is_exact());
        let r = f.check_closed(4);
        assert!(r.passed(), "{:?}", r.violations.first());
        assert!(f.is_quasi_iso().unwrap());
    }
}
