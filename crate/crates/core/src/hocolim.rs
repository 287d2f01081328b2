//! Homotopy-coherent diagrams of complexes over finite simplicial sets, their homotopy colimits,
//! homology hypercovers, and the chain-level local-to-global comparison.

use crate::adams::{cube_words, cubical_chains, pushforward_word, top_cell, word_index, AdamsError, Letter};
use crate::chains::{cone, tensor_complexes, ChainError, ChainMap, FreeComplex, Generator};
use crate::linalg::{smith_normal_form, solve_with, sv_add, IntMatrix, SparseVec};
use crate::simplicial::{nerve_of_poset, Barycentric, Poset, Simplex, SimplicialError, SimplicialSet};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HocolimError {
    #[error("diagram is incoherent at {simplex}: {clause}")]
    DiagramIncoherent { simplex: String, clause: String },
    #[error("expected {expected} {what}, got {got}")]
    Shape { what: &'static str, expected: usize, got: usize },
    #[error("back-face map of {0} is not a quasi-isomorphism")]
    BackFace(String),
    #[error("no coherent filler over {0}")]
    Obstructed(String),
    #[error("no path from {0} to {1} in the poset")]
    NoPath(String, String),
    #[error("pieces are not monotone: {0} <= {1} but the first piece is not contained in the second")]
    NotMonotone(String, String),
    #[error("invalid fundamental cycle: {0}")]
    FundamentalCycle(String),
    #[error("space is not connected")]
    Disconnected,
    #[error("square {0} does not commute")]
    NonCommuting(String),
    #[error("unknown simplex {0:?}")]
    UnknownSimplex(Vec<usize>),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
    #[error(transparent)]
    Adams(#[from] AdamsError),
}

fn cube(q: usize) -> Result<Arc<FreeComplex>, HocolimError> {
    Ok(Arc::new(cubical_chains(q)?))
}

fn basis(i: usize) -> SparseVec {
    SparseVec::from([(i, BigInt::one())])
}

/// A map `K → N_dg(Ch)`, stored through the values `f_σ(- ⊗ top cell)` on nondegenerate simplices;
/// all other cells are forced by the composition and face clauses.
#[derive(Clone, Debug)]
pub struct DgDiagram {
    base: SimplicialSet,
    complexes: Vec<Arc<FreeComplex>>,
    tops: Vec<Vec<ChainMap>>,
}

impl DgDiagram {
    /// From top-cell values: `tops[q - 1][k]` is a linear map `A_{σ(0)} → A_{σ(q)}` of parity `q - 1`.
    pub fn from_top_cells(base: SimplicialSet, complexes: Vec<Arc<FreeComplex>>, tops: Vec<Vec<ChainMap>>) -> Result<Self, HocolimError> {
        let d = DgDiagram { base, complexes, tops };
        d.check_shapes()?;
        for q in 1..=d.base.dim() {
            for k in 0..d.base.count(q) {
                d.check_chain_map(q, k)?;
            }
        }
        Ok(d)
    }

    /// From the full maps `f_σ : A_{σ(0)} ⊗ C(F(Δ^q)) → A_{σ(q)}`, checking both clauses.
    pub fn new(base: SimplicialSet, complexes: Vec<Arc<FreeComplex>>, maps: Vec<Vec<ChainMap>>) -> Result<Self, HocolimError> {
        let mut tops = Vec::new();
        for (qi, level) in maps.iter().enumerate() {
            let q = qi + 1;
            let m = 3usize.pow(q as u32 - 1);
            let top = word_index(&top_cell(q - 1));
            let mut row = Vec::new();
            for (k, f) in level.iter().enumerate() {
                let v = base.vertices(q, k);
                let (a, b) = (complexes.get(v[0]), complexes.get(v[q]));
                let (Some(a), Some(b)) = (a, b) else {
                    return Err(HocolimError::Shape { what: "vertex complexes", expected: base.count(0), got: complexes.len() });
                };
                if f.source.rank() != a.rank() * m || f.target.as_ref() != b.as_ref() || f.parity_shift != 0 {
                    return Err(HocolimError::DiagramIncoherent {
                        simplex: base.name(q, k).to_string(),
                        clause: "map has the wrong source, target or parity".into(),
                    });
                }
                let cols = (0..a.rank()).map(|i| f.column(i * m + top).clone()).collect();
                row.push(ChainMap::from_columns(a.clone(), b.clone(), ((q - 1) % 2) as u8, cols)?);
            }
            tops.push(row);
        }
        let d = DgDiagram::from_top_cells(base, complexes, tops)?;
        for (qi, level) in maps.iter().enumerate() {
            let q = qi + 1;
            let words = cube_words(q - 1);
            for (k, f) in level.iter().enumerate() {
                let a = &d.complexes[d.base.vertex(q, k, 0)];
                for i in 0..a.rank() {
                    for (j, w) in words.iter().enumerate() {
                        if *f.column(i * words.len() + j) != d.eval(q, k, &basis(i), w) {
                            let clause = if w.contains(&Letter::One) { "composition clause" } else { "face clause" };
                            return Err(HocolimError::DiagramIncoherent {
                                simplex: d.base.name(q, k).to_string(),
                                clause: format!("{clause} fails on cell {}", crate::adams::word_id(w)),
                            });
                        }
                    }
                }
            }
        }
        Ok(d)
    }

    /// Strict diagram via the tautological functor: edge maps, all higher top cells zero.
    pub fn strict(base: SimplicialSet, complexes: Vec<Arc<FreeComplex>>, edges: Vec<ChainMap>) -> Result<Self, HocolimError> {
        let mut tops = if base.dim() == 0 { vec![] } else { vec![edges] };
        for q in 2..=base.dim() {
            let row = (0..base.count(q))
                .map(|k| {
                    let v = base.vertices(q, k);
                    ChainMap::zero(complexes[v[0]].clone(), complexes[v[q]].clone(), ((q - 1) % 2) as u8)
                })
                .collect();
            tops.push(row);
        }
        Self::from_top_cells(base, complexes, tops)
    }

    /// Coherent completion: solves for every missing top cell in increasing dimension, adding a
    /// seeded random exact perturbation `dY + Yd` when `seed` is given.
    pub fn complete(
        base: SimplicialSet,
        complexes: Vec<Arc<FreeComplex>>,
        edges: Vec<ChainMap>,
        given: &BTreeMap<(usize, usize), ChainMap>,
        seed: Option<u64>,
    ) -> Result<Self, HocolimError> {
        let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
        let tops = if base.dim() == 0 { vec![] } else { vec![edges] };
        let mut d = DgDiagram { base, complexes, tops };
        if d.base.dim() >= 1 {
            check_len("edge maps", d.base.count(1), d.tops[0].len())?;
        }
        for q in 2..=d.base.dim() {
            let mut row = Vec::new();
            for k in 0..d.base.count(q) {
                let v = d.base.vertices(q, k);
                let (a, b) = (d.complexes[v[0]].clone(), d.complexes[v[q]].clone());
                let parity = ((q - 1) % 2) as u8;
                let h = match given.get(&(q, k)) {
                    Some(h) => h.clone(),
                    None => {
                        let rhs = ChainMap::from_columns(
                            a.clone(),
                            b.clone(),
                            (q % 2) as u8,
                            (0..a.rank()).map(|i| d.boundary_term(q, k, i)).collect(),
                        )?;
                        let mut h = match crate::chains::solve_homotopy_equation(&a, &b, parity, -1, &rhs) {
                            Some(h) => h,
                            None => d.fill_with_inner_face(q, k, &row, given)?,
                        };
                        if let Some(rng) = rng.as_mut() {
                            let y = random_map(rng, &a, &b, (q % 2) as u8)?;
                            h = h.scaled_sum(&y.homotopy_boundary(), &BigInt::one(), &BigInt::one());
                        }
                        h
                    }
                };
                row.push(h);
            }
            d.tops.push(row);
        }
        d.check_shapes()?;
        for q in 1..=d.base.dim() {
            for k in 0..d.base.count(q) {
                d.check_chain_map(q, k)?;
            }
        }
        Ok(d)
    }

    /// Pullback along a simplicial map `g: Y → base`, given by the images of the nondegenerate
    /// simplices of Y.
    pub fn pullback(&self, y: &SimplicialSet, images: &[Vec<Simplex>]) -> Result<DgDiagram, HocolimError> {
        let complexes: Vec<Arc<FreeComplex>> =
            (0..y.count(0)).map(|v| self.complexes[self.base.simplex_vertex(&images[0][v], 0)].clone()).collect();
        let mut tops = Vec::new();
        for q in 1..=y.dim() {
            let mut row = Vec::new();
            for k in 0..y.count(q) {
                let s = &images[q][k];
                let v = y.vertices(q, k);
                let (a, b) = (complexes[v[0]].clone(), complexes[v[q]].clone());
                let cols = (0..a.rank()).map(|i| self.eval_simplex(s, &basis(i), &top_cell(q - 1))).collect();
                row.push(ChainMap::from_columns(a, b, ((q - 1) % 2) as u8, cols)?);
            }
            tops.push(row);
        }
        DgDiagram::from_top_cells(y.clone(), complexes, tops)
    }

    pub fn base(&self) -> &SimplicialSet {
        &self.base
    }

    pub fn complex(&self, v: usize) -> &Arc<FreeComplex> {
        &self.complexes[v]
    }

    pub fn complexes(&self) -> &[Arc<FreeComplex>] {
        &self.complexes
    }

    pub fn top(&self, q: usize, k: usize) -> &ChainMap {
        &self.tops[q - 1][k]
    }

    /// The full map `f_σ` for the nondegenerate `q`-simplex `k`.
    pub fn map(&self, q: usize, k: usize) -> Result<ChainMap, HocolimError> {
        let v = self.base.vertices(q, k);
        let a = &self.complexes[v[0]];
        let c = cube(q)?;
        let src = Arc::new(tensor_complexes(a, &c)?);
        let words = cube_words(q - 1);
        let mut cols = Vec::with_capacity(src.rank());
        for i in 0..a.rank() {
            for w in &words {
                cols.push(self.eval(q, k, &basis(i), w));
            }
        }
        Ok(ChainMap::from_columns(src, self.complexes[v[q]].clone(), 0, cols)?)
    }

    /// `f_σ(x ⊗ w)` on a nondegenerate simplex.
    pub fn eval(&self, q: usize, k: usize, x: &SparseVec, w: &[Letter]) -> SparseVec {
        if x.is_empty() {
            return SparseVec::new();
        }
        if let Some(j) = w.iter().position(|l| *l == Letter::One) {
            let v = j + 1;
            let y = self.eval(v, self.base.front(q, k, v), x, &w[..j]);
            return self.eval(q - v, self.base.back(q, k, v), &y, &w[j + 1..]);
        }
        if let Some(j) = w.iter().position(|l| *l == Letter::Zero) {
            let mut rest = w.to_vec();
            rest.remove(j);
            return self.eval(q - 1, self.base.face(q, k, j + 1), x, &rest);
        }
        self.tops[q - 1][k].apply(x)
    }

    /// `f_s(x ⊗ w)` on any simplex; degenerate simplices act through the pushforward of cells.
    pub fn eval_simplex(&self, s: &Simplex, x: &SparseVec, w: &[Letter]) -> SparseVec {
        if s.base_dim == 0 {
            return if w.contains(&Letter::I) { SparseVec::new() } else { x.clone() };
        }
        if !s.is_degenerate() {
            return self.eval(s.base_dim, s.base, x, w);
        }
        match pushforward_word(&s.surj, w) {
            Some(v) => self.eval(s.base_dim, s.base, x, &v),
            None => SparseVec::new(),
        }
    }

    /// Horn filling: corrects the top cell of an inner face `d_j σ` by a cycle so that σ fills.
    /// Only faces not used by an already filled `q`-simplex are eligible.
    fn fill_with_inner_face(
        &mut self,
        q: usize,
        k: usize,
        filled: &[ChainMap],
        given: &BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<ChainMap, HocolimError> {
        let v = self.base.vertices(q, k);
        let (a, b) = (self.complexes[v[0]].clone(), self.complexes[v[q]].clone());
        for j in 1..q {
            let tau = self.base.face(q, k, j);
            let used = (0..filled.len()).any(|o| self.base.faces_of(q, o).contains(&tau));
            if used || given.contains_key(&(q - 1, tau)) {
                continue;
            }
            let kappa: i64 = if (j - 1) % 2 == 0 { -1 } else { 1 };
            let pc = ((q - 2) % 2) as u8;
            let ph = ((q - 1) % 2) as u8;
            let uc = hom_index(&a, &b, pc);
            let uh = hom_index(&a, &b, ph);
            let e1 = hom_index(&a, &b, pc + 1);
            let e2 = hom_index(&a, &b, ph + 1);
            let mut m = IntMatrix::zeros(e1.len() + e2.len(), uc.len() + uh.len());
            add_operator(&mut m, 0, &e1, 0, &uc, &a, &b);
            add_operator(&mut m, e1.len(), &e2, uc.len(), &uh, &a, &b);
            for (&(t, s), &col) in &uc {
                let sign = if a.parity(s) == 0 { -kappa } else { kappa };
                m.add_at(e1.len() + e2[&(t, s)], col, &BigInt::from(sign));
            }
            let mut rhs = vec![BigInt::zero(); e1.len() + e2.len()];
            for i in 0..a.rank() {
                for (t, c) in self.boundary_term(q, k, i) {
                    rhs[e1.len() + e2[&(t, i)]] += c;
                }
            }
            let Some(sol) = solve_with(&smith_normal_form(&m), &rhs) else { continue };
            let c_entries = uc.iter().map(|(&(t, s), &col)| (t, s, sol[col].clone()));
            let correction = ChainMap::new_linear(a.clone(), b.clone(), pc, c_entries)?;
            let old = self.tops[q - 2][tau].clone();
            self.tops[q - 2][tau] = old.scaled_sum(&correction, &BigInt::one(), &BigInt::one());
            let h_entries = uh.iter().map(|(&(t, s), &col)| (t, s, sol[uc.len() + col].clone()));
            return Ok(ChainMap::new_linear(a, b, ph, h_entries)?);
        }
        Err(HocolimError::Obstructed(self.base.name(q, k).to_string()))
    }

    fn check_shapes(&self) -> Result<(), HocolimError> {
        check_len("vertex complexes", self.base.count(0), self.complexes.len())?;
        check_len("top-cell levels", self.base.dim(), self.tops.len())?;
        for q in 1..=self.base.dim() {
            check_len("top cells", self.base.count(q), self.tops[q - 1].len())?;
            for k in 0..self.base.count(q) {
                let v = self.base.vertices(q, k);
                let h = &self.tops[q - 1][k];
                if h.source.as_ref() != self.complexes[v[0]].as_ref()
                    || h.target.as_ref() != self.complexes[v[q]].as_ref()
                    || h.parity_shift != ((q - 1) % 2) as u8
                {
                    return Err(HocolimError::DiagramIncoherent {
                        simplex: self.base.name(q, k).to_string(),
                        clause: "top cell has the wrong source, target or parity".into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `(-1)^{|x|} f_σ(x ⊗ ∂(top))` for a basis vector x.
    fn boundary_term(&self, q: usize, k: usize, i: usize) -> SparseVec {
        let a = &self.complexes[self.base.vertex(q, k, 0)];
        let sign = if a.parity(i) == 0 { BigInt::one() } else { -BigInt::one() };
        let mut out = SparseVec::new();
        for (w, c) in crate::adams::cube_boundary(&top_cell(q - 1)) {
            for (t, x) in self.eval(q, k, &basis(i), &w) {
                sv_add(&mut out, t, &(&sign * BigInt::from(c) * x));
            }
        }
        out
    }

    fn check_chain_map(&self, q: usize, k: usize) -> Result<(), HocolimError> {
        let h = &self.tops[q - 1][k];
        let a = &h.source;
        for i in 0..a.rank() {
            let mut lhs = h.target.apply_d(h.column(i));
            for (t, c) in h.apply(a.d_gen(i)) {
                sv_add(&mut lhs, t, &-c);
            }
            let rhs = self.boundary_term(q, k, i);
            for (t, c) in rhs {
                sv_add(&mut lhs, t, &-c);
            }
            if let Some((t, c)) = lhs.iter().next() {
                return Err(HocolimError::DiagramIncoherent {
                    simplex: self.base.name(q, k).to_string(),
                    clause: format!("not a chain map: coefficient {c} on {} from {}", h.target.generator(*t).id, a.generator(i).id),
                });
            }
        }
        Ok(())
    }
}

/// Entries `(target, source)` of a linear map of the given parity.
fn hom_index(a: &FreeComplex, b: &FreeComplex, parity: u8) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for s in 0..a.rank() {
        for t in 0..b.rank() {
            if b.parity(t) == (a.parity(s) + parity) & 1 {
                let n = out.len();
                out.insert((t, s), n);
            }
        }
    }
    out
}

/// Adds the matrix of `F ↦ d F - F d` into `m`.
fn add_operator(
    m: &mut IntMatrix,
    row_off: usize,
    rows: &BTreeMap<(usize, usize), usize>,
    col_off: usize,
    cols: &BTreeMap<(usize, usize), usize>,
    a: &FreeComplex,
    b: &FreeComplex,
) {
    for (&(t, s), &col) in cols {
        for (t2, x) in b.d_gen(t) {
            m.add_at(row_off + rows[&(*t2, s)], col_off + col, x);
        }
    }
    for s0 in 0..a.rank() {
        for (s, x) in a.d_gen(s0) {
            for t in 0..b.rank() {
                if let Some(col) = cols.get(&(t, *s)) {
                    m.add_at(row_off + rows[&(t, s0)], col_off + col, &-x);
                }
            }
        }
    }
}

fn check_len(what: &'static str, expected: usize, got: usize) -> Result<(), HocolimError> {
    if expected != got {
        return Err(HocolimError::Shape { what, expected, got });
    }
    Ok(())
}

fn random_map(rng: &mut ChaCha8Rng, a: &Arc<FreeComplex>, b: &Arc<FreeComplex>, parity: u8) -> Result<ChainMap, HocolimError> {
    let mut entries = Vec::new();
    for s in 0..a.rank() {
        for t in 0..b.rank() {
            if b.parity(t) == (a.parity(s) + parity) & 1 {
                entries.push((t, s, BigInt::from(rng.gen_range(-1i64..=1))));
            }
        }
    }
    Ok(ChainMap::new_linear(a.clone(), b.clone(), parity, entries)?)
}

/// A strict diagram: one chain map per nondegenerate edge, commuting on 2-simplices.
#[derive(Clone, Debug)]
pub struct StrictDiagram {
    pub base: SimplicialSet,
    pub complexes: Vec<Arc<FreeComplex>>,
    pub edges: Vec<ChainMap>,
}

impl StrictDiagram {
    pub fn new(base: SimplicialSet, complexes: Vec<Arc<FreeComplex>>, edges: Vec<ChainMap>) -> Result<Self, HocolimError> {
        check_len("vertex complexes", base.count(0), complexes.len())?;
        check_len("edge maps", base.count(1), edges.len())?;
        for (e, f) in edges.iter().enumerate() {
            let (s, t) = (base.vertex(1, e, 0), base.vertex(1, e, 1));
            if f.source.as_ref() != complexes[s].as_ref() || f.target.as_ref() != complexes[t].as_ref() || f.parity_shift != 0 {
                return Err(HocolimError::DiagramIncoherent {
                    simplex: base.name(1, e).to_string(),
                    clause: "edge map has the wrong shape".into(),
                });
            }
            f.check_chain_map()
                .map_err(|err| HocolimError::DiagramIncoherent { simplex: base.name(1, e).to_string(), clause: err.to_string() })?;
        }
        for k in 0..base.count(2) {
            let f = |i: usize| &edges[base.face(2, k, i)];
            if !f(2).then(f(0))?.equals(f(1)) {
                return Err(HocolimError::DiagramIncoherent {
                    simplex: base.name(2, k).to_string(),
                    clause: "edge maps do not commute".into(),
                });
            }
        }
        Ok(StrictDiagram { base, complexes, edges })
    }

    /// Over the nerve of a poset from maps on covering relations, composed along Hasse paths.
    pub fn over_poset(
        p: &Poset,
        complexes: Vec<Arc<FreeComplex>>,
        covering: &BTreeMap<(usize, usize), ChainMap>,
    ) -> Result<Self, HocolimError> {
        let nerve = nerve_of_poset(p);
        let mut edges = Vec::new();
        for e in 0..nerve.count(1) {
            let (a, b) = (nerve.vertex(1, e, 0), nerve.vertex(1, e, 1));
            edges.push(compose_path(p, &complexes, covering, a, b)?);
        }
        StrictDiagram::new(nerve, complexes, edges)
    }

    pub fn to_dg(&self) -> Result<DgDiagram, HocolimError> {
        DgDiagram::strict(self.base.clone(), self.complexes.clone(), self.edges.clone())
    }

    /// Map along the edge from `a` to `b` (identity when equal).
    pub fn edge_between(&self, a: usize, b: usize) -> Option<&ChainMap> {
        (0..self.base.count(1)).find(|e| self.base.vertex(1, *e, 0) == a && self.base.vertex(1, *e, 1) == b).map(|e| &self.edges[e])
    }
}

fn compose_path(
    p: &Poset,
    complexes: &[Arc<FreeComplex>],
    covering: &BTreeMap<(usize, usize), ChainMap>,
    a: usize,
    b: usize,
) -> Result<ChainMap, HocolimError> {
    let mut prev: BTreeMap<usize, usize> = BTreeMap::new();
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        if x == b {
            break;
        }
        for (&(s, t), _) in covering.range((x, 0)..(x + 1, 0)) {
            if s == x && p.le(t, b) && !prev.contains_key(&t) {
                prev.insert(t, x);
                queue.push_back(t);
            }
        }
    }
    let mut path = vec![b];
    while *path.last().expect("nonempty") != a {
        let last = *path.last().expect("nonempty");
        match prev.get(&last) {
            Some(x) => path.push(*x),
            None => return Err(HocolimError::NoPath(p.elements[a].clone(), p.elements[b].clone())),
        }
    }
    path.reverse();
    let mut f = ChainMap::identity(complexes[a].clone());
    for w in path.windows(2) {
        f = f.then(&covering[&(w[0], w[1])])?;
    }
    Ok(f)
}

/// Which model of the homotopy colimit to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HocolimMode {
    Direct,
    Barycentric,
}

#[derive(Clone, Debug, Serialize)]
pub struct Summand {
    pub name: String,
    pub dim: usize,
    pub offset: usize,
    pub rank: usize,
    #[serde(skip)]
    pub simplex: Simplex,
}

/// `⊕_σ p(σ)[dim σ]` with its twisted differential.
#[derive(Clone, Debug)]
pub struct Hocolim {
    pub complex: Arc<FreeComplex>,
    pub summands: Vec<Summand>,
    pub coefficients: Vec<Arc<FreeComplex>>,
    index: HashMap<Simplex, usize>,
}

/// Sign `(m + 1)(n + p + 1)` mod 2 of a length-`m` face chain out of an `n`-simplex on parity `p`.
pub fn chain_sign(m: usize, n: usize, p: u8) -> bool {
    (m + 1) * (n + p as usize + 1) % 2 == 1
}

/// Face chains `S_0 ⊋ S_1 ⊋ ⋯ ⊋ S_m` of codimension one each, with `Σ i_j` for the removed slots.
pub fn face_chains(n: usize) -> Vec<(Vec<Vec<usize>>, usize)> {
    let mut out = Vec::new();
    fn rec(cur: &mut Vec<Vec<usize>>, acc: usize, out: &mut Vec<(Vec<Vec<usize>>, usize)>) {
        let last = cur.last().expect("nonempty").clone();
        if last.len() < 2 {
            return;
        }
        for i in 0..last.len() {
            let mut next = last.clone();
            next.remove(i);
            cur.push(next);
            out.push((cur.clone(), acc + i));
            rec(cur, acc + i, out);
            cur.pop();
        }
    }
    rec(&mut vec![(0..=n).collect()], 0, &mut out);
    out
}

type Term<'a> = dyn Fn(usize, &[Vec<usize>], &SparseVec) -> Result<Option<(usize, SparseVec)>, HocolimError> + 'a;

fn assemble(label: String, summands: Vec<(String, usize, Simplex, Arc<FreeComplex>)>, term: &Term) -> Result<Hocolim, HocolimError> {
    let mut gens = Vec::new();
    let mut out = Vec::new();
    let mut coefficients = Vec::new();
    let mut index = HashMap::new();
    for (i, (name, dim, simplex, a)) in summands.into_iter().enumerate() {
        let offset = gens.len();
        for g in a.generators() {
            gens.push(Generator::new(format!("{name}:{}", g.id), g.parity + (dim % 2) as u8));
        }
        index.insert(simplex.clone(), i);
        out.push(Summand { name, dim, offset, rank: a.rank(), simplex });
        coefficients.push(a);
    }
    let mut entries = Vec::new();
    for (si, s) in out.iter().enumerate() {
        let a = &coefficients[si];
        let chains = face_chains(s.dim);
        for x in 0..a.rank() {
            let src = s.offset + x;
            let internal = if s.dim % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            for (t, c) in a.d_gen(x) {
                entries.push((s.offset + t, src, &internal * c));
            }
            let bx = basis(x);
            for (sets, sum) in &chains {
                let m = sets.len() - 1;
                let Some((ti, v)) = term(si, sets, &bx)? else { continue };
                let negative = (sum % 2 == 1) ^ chain_sign(m, s.dim, a.parity(x));
                let t_off = out[ti].offset;
                for (t, c) in v {
                    entries.push((t_off + t, src, if negative { -c } else { c }));
                }
            }
        }
    }
    let complex = Arc::new(FreeComplex::new(label, gens, entries)?);
    Ok(Hocolim { complex, summands: out, coefficients, index })
}

impl Hocolim {
    pub fn summand_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Inclusion of a summand; a chain map for vertex summands.
    pub fn inclusion(&self, summand: usize) -> Result<ChainMap, HocolimError> {
        let s = &self.summands[summand];
        let entries = (0..s.rank).map(|i| (s.offset + i, i, BigInt::one()));
        Ok(ChainMap::new(self.coefficients[summand].clone(), self.complex.clone(), 0, entries)?)
    }

    pub fn vertex_inclusion(&self, v: usize) -> Result<ChainMap, HocolimError> {
        let s = self.summand_of(&Simplex::nondegenerate(0, v)).ok_or(HocolimError::UnknownSimplex(vec![v]))?;
        self.inclusion(s)
    }

    /// Summand-wise map `self → other` sending σ to `images(σ)` with identical coefficients.
    pub fn map_along(&self, other: &Hocolim, images: impl Fn(&Simplex) -> Simplex) -> Result<ChainMap, HocolimError> {
        let mut entries = Vec::new();
        for (i, s) in self.summands.iter().enumerate() {
            let img = images(&s.simplex);
            let j = other.summand_of(&img).ok_or_else(|| HocolimError::UnknownSimplex(img.surj.clone()))?;
            if self.coefficients[i].as_ref() != other.coefficients[j].as_ref() {
                return Err(ChainError::Mismatch.into());
            }
            for x in 0..s.rank {
                entries.push((other.summands[j].offset + x, s.offset + x, BigInt::one()));
            }
        }
        Ok(ChainMap::new(self.complex.clone(), other.complex.clone(), 0, entries)?)
    }

    /// Levelwise map between strict diagrams over the same base.
    pub fn levelwise(&self, other: &Hocolim, base: &SimplicialSet, maps: &[ChainMap]) -> Result<ChainMap, HocolimError> {
        let mut entries = Vec::new();
        for s in &self.summands {
            let j = other.summand_of(&s.simplex).ok_or_else(|| HocolimError::UnknownSimplex(s.simplex.surj.clone()))?;
            let g = &maps[base.simplex_vertex(&s.simplex, 0)];
            for x in 0..s.rank {
                for (t, c) in g.column(x) {
                    entries.push((other.summands[j].offset + t, s.offset + x, c.clone()));
                }
            }
        }
        Ok(ChainMap::new(self.complex.clone(), other.complex.clone(), 0, entries)?)
    }

    /// Map to a single complex on vertex summands, zero elsewhere.
    pub fn augmentation(&self, target: &Arc<FreeComplex>, base: &SimplicialSet, maps: &[ChainMap]) -> Result<ChainMap, HocolimError> {
        let mut entries = Vec::new();
        for s in &self.summands {
            if s.dim != 0 {
                continue;
            }
            let g = &maps[base.simplex_vertex(&s.simplex, 0)];
            for x in 0..s.rank {
                for (t, c) in g.column(x) {
                    entries.push((*t, s.offset + x, c.clone()));
                }
            }
        }
        Ok(ChainMap::new(self.complex.clone(), target.clone(), 0, entries)?)
    }
}

/// Normalized homotopy colimit of a diagram over its base (direct mode).
pub fn hocolim(p: &DgDiagram) -> Result<Hocolim, HocolimError> {
    let x = p.base();
    let simplices: Vec<Simplex> = (0..=x.dim()).flat_map(|n| (0..x.count(n)).map(move |k| Simplex::nondegenerate(n, k))).collect();
    direct_over(p, simplices, format!("hocolim_{}", x.label()))
}

fn direct_over(p: &DgDiagram, simplices: Vec<Simplex>, label: String) -> Result<Hocolim, HocolimError> {
    let x = p.base();
    let lookup: HashMap<Simplex, usize> = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
    let summands = simplices.iter().map(|s| (x.simplex_name(s), s.dim(), s.clone(), p.complex(x.simplex_vertex(s, 0)).clone())).collect();
    let term = |si: usize, sets: &[Vec<usize>], v: &SparseVec| -> Result<Option<(usize, SparseVec)>, HocolimError> {
        let s = &simplices[si];
        let firsts: Vec<usize> = sets.iter().map(|t| t[0]).collect();
        let image = x.simplex_compose(s, &firsts);
        let target = x.simplex_compose(s, sets.last().expect("nonempty"));
        let Some(&ti) = lookup.get(&target) else { return Ok(None) };
        let m = sets.len() - 1;
        Ok(Some((ti, p.eval_simplex(&image, v, &top_cell(m - 1)))))
    };
    assemble(label, summands, &term)
}

/// Homotopy colimit in the generalized sense for a diagram on `bX`, after checking that every
/// back-face map `p(σ) → p(σ|0⋯n-1)` is a quasi-isomorphism.
pub fn hocolim_barycentric(x: &SimplicialSet, b: &Barycentric, p: &DgDiagram) -> Result<Hocolim, HocolimError> {
    check_len("vertices of the subdivision", b.set.count(0), p.base().count(0))?;
    for (n, k) in b.cell.iter().copied().filter(|(n, _)| *n > 0) {
        let sets = vec![(0..=n).collect::<Vec<_>>(), (0..n).collect()];
        let (_, e) = b.chain_index[&((n, k), sets)];
        if !p.top(1, e).is_quasi_iso()? {
            return Err(HocolimError::BackFace(x.name(n, k).to_string()));
        }
    }
    let summands = b
        .cell
        .iter()
        .enumerate()
        .map(|(v, (n, k))| (x.name(*n, *k).to_string(), *n, Simplex::nondegenerate(*n, *k), p.complex(v).clone()))
        .collect();
    let term = |si: usize, sets: &[Vec<usize>], v: &SparseVec| -> Result<Option<(usize, SparseVec)>, HocolimError> {
        let top = b.cell[si];
        let (m, j) = b.chain_index[&(top, sets.to_vec())];
        let last = sets.last().expect("nonempty");
        let target = b.vertex(last.len() - 1, x.subface(top.0, top.1, last));
        Ok(Some((target, p.eval(m, j, v, &top_cell(m - 1)))))
    };
    assemble(format!("hocolim_b{}", x.label()), summands, &term)
}

/// Build the homotopy colimit in either mode; barycentric mode pulls the diagram back along `r`.
pub fn hocolim_with_mode(p: &DgDiagram, mode: HocolimMode) -> Result<Hocolim, HocolimError> {
    match mode {
        HocolimMode::Direct => hocolim(p),
        HocolimMode::Barycentric => {
            let b = crate::simplicial::barycentric_subdivision(p.base());
            let pr = p.pullback(&b.set, &b.r)?;
            hocolim_barycentric(p.base(), &b, &pr)
        }
    }
}

/// Two-term classical formula for a strict diagram: only the first edge transports coefficients.
pub fn classical_hocolim(s: &StrictDiagram) -> Result<FreeComplex, HocolimError> {
    let x = &s.base;
    let mut gens = Vec::new();
    let mut offsets = vec![vec![0; 0]; x.dim() + 1];
    for n in 0..=x.dim() {
        for k in 0..x.count(n) {
            offsets[n].push(gens.len());
            let a = &s.complexes[x.vertex(n, k, 0)];
            for g in a.generators() {
                gens.push(Generator::new(format!("{}:{}", x.name(n, k), g.id), g.parity + (n % 2) as u8));
            }
        }
    }
    let mut entries = Vec::new();
    for n in 0..=x.dim() {
        for k in 0..x.count(n) {
            let a = &s.complexes[x.vertex(n, k, 0)];
            let off = offsets[n][k];
            let sign = if n % 2 == 0 { 1 } else { -1 };
            for g in 0..a.rank() {
                for (t, c) in a.d_gen(g) {
                    entries.push((off + t, off + g, BigInt::from(sign) * c));
                }
                if n == 0 {
                    continue;
                }
                let first = x.front(n, k, 1);
                for (t, c) in s.edges[first].column(g) {
                    entries.push((offsets[n - 1][x.face(n, k, 0)] + t, off + g, c.clone()));
                }
                for i in 1..=n {
                    let c = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                    entries.push((offsets[n - 1][x.face(n, k, i)] + g, off + g, c));
                }
            }
        }
    }
    Ok(FreeComplex::new(format!("classical_hocolim_{}", x.label()), gens, entries)?)
}

fn sub_complex(c: &FreeComplex, keep: &[usize], label: String) -> Result<FreeComplex, HocolimError> {
    let pos: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, g)| (*g, i)).collect();
    let gens = keep.iter().map(|g| c.generator(*g).clone()).collect();
    let mut entries = Vec::new();
    for (i, g) in keep.iter().enumerate() {
        for (t, x) in c.d_gen(*g) {
            let Some(j) = pos.get(t) else {
                return Err(ChainError::IndexOutOfRange(*t).into());
            };
            entries.push((*j, i, x.clone()));
        }
    }
    Ok(FreeComplex::new(label, gens, entries)?)
}

fn dense_d(c: &FreeComplex) -> IntMatrix {
    let mut m = IntMatrix::zeros(c.rank(), c.rank());
    for (t, s, x) in c.entries() {
        m.add_at(t, s, &x);
    }
    m
}

/// Solve `d y = z` over the integers with mixed parity allowed.
pub fn boundary_preimage(c: &FreeComplex, z: &SparseVec) -> Option<SparseVec> {
    let mut b = vec![BigInt::zero(); c.rank()];
    for (i, x) in z {
        b[*i] = x.clone();
    }
    let y = solve_with(&smith_normal_form(&dense_d(c)), &b)?;
    Some(y.into_iter().enumerate().filter(|(_, x)| !x.is_zero()).collect())
}

/// Report on the unnormalized model truncated at simplices of dimension at most `max_dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalizationReport {
    pub max_dim: usize,
    pub total_rank: usize,
    pub normalized_rank: usize,
    /// The unnormalized differential has no components between nondegenerate and degenerate summands.
    pub splits: bool,
    /// Every cycle of the degenerate part below the top dimension bounds within the truncation.
    pub degenerate_acyclic: bool,
    pub homology_agrees: bool,
}

pub fn hocolim_unnormalized(p: &DgDiagram, max_dim: usize) -> Result<Hocolim, HocolimError> {
    let x = p.base();
    let simplices: Vec<Simplex> = (0..=max_dim).flat_map(|n| x.all_simplices(n)).collect();
    direct_over(p, simplices, format!("hocolim_unnormalized_{}", x.label()))
}

pub fn normalization_report(p: &DgDiagram, max_dim: usize) -> Result<NormalizationReport, HocolimError> {
    let normalized = hocolim(p)?;
    let full = hocolim_unnormalized(p, max_dim)?;
    let c = &full.complex;
    let degenerate: Vec<bool> = full.summands.iter().flat_map(|s| std::iter::repeat_n(s.simplex.is_degenerate(), s.rank)).collect();
    let splits = c.entries().iter().all(|(t, s, _)| degenerate[*t] == degenerate[*s]);
    let nondeg: Vec<usize> = (0..c.rank()).filter(|g| !degenerate[*g]).collect();
    let restricted = sub_complex(c, &nondeg, "normalized part".into())?;
    let same = restricted.entries() == normalized.complex.entries() && restricted.rank() == normalized.complex.rank();
    let deg_dim = |bound: usize| -> Vec<usize> {
        full.summands.iter().filter(|s| s.simplex.is_degenerate() && s.dim <= bound).flat_map(|s| s.offset..s.offset + s.rank).collect()
    };
    let mut acyclic = splits;
    if splits && max_dim >= 1 {
        let lower = deg_dim(max_dim - 1);
        let upper = deg_dim(max_dim);
        let low_c = sub_complex(c, &lower, "degenerate below top".into())?;
        let up_c = sub_complex(c, &upper, "degenerate".into())?;
        let up_pos: HashMap<usize, usize> = upper.iter().enumerate().map(|(i, g)| (*g, i)).collect();
        let hb = low_c.homology_basis();
        'outer: for par in 0..2 {
            for k in 0..hb.count(par) {
                let z: SparseVec = hb.representative(par, k).iter().map(|(i, x)| (up_pos[&lower[*i]], x.clone())).collect();
                if boundary_preimage(&up_c, &z).is_none() {
                    acyclic = false;
                    break 'outer;
                }
            }
        }
    }
    Ok(NormalizationReport {
        max_dim,
        total_rank: c.rank(),
        normalized_rank: normalized.complex.rank(),
        splits,
        degenerate_acyclic: acyclic,
        homology_agrees: splits && acyclic && same,
    })
}

/// Simplicial cochains with `δ = Σ (-1)^i d_i^*`, graded by dimension mod 2.
pub fn cochains(x: &SimplicialSet) -> Result<FreeComplex, HocolimError> {
    let off = x.chain_offsets();
    let mut gens = Vec::new();
    for n in 0..=x.dim() {
        for k in 0..x.count(n) {
            gens.push(Generator::new(format!("{}*", x.name(n, k)), (n % 2) as u8));
        }
    }
    let mut entries = Vec::new();
    for n in 1..=x.dim() {
        for k in 0..x.count(n) {
            for i in 0..=n {
                let c = if i % 2 == 0 { 1 } else { -1 };
                entries.push((off[n] + k, off[n - 1] + x.face(n, k, i), BigInt::from(c)));
            }
        }
    }
    Ok(FreeComplex::new(format!("C*({})", x.label()), gens, entries)?)
}

/// Whether a class `c` of `target` is hit by `phi: H → target` on homology; returns a cycle `z`
/// with `phi(z) - c` a boundary.
pub fn hit_class(h: &FreeComplex, phi: &ChainMap, target: &FreeComplex, c: &SparseVec) -> Option<SparseVec> {
    let (nh, nt) = (h.rank(), target.rank());
    let mut m = IntMatrix::zeros(nh + nt, nh + nt);
    for (t, s, x) in h.entries() {
        m.add_at(t, s, &x);
    }
    for (t, s, x) in phi.entries() {
        m.add_at(nh + t, s, &x);
    }
    for (t, s, x) in target.entries() {
        m.add_at(nh + t, nh + s, &x);
    }
    let mut b = vec![BigInt::zero(); nh + nt];
    for (i, x) in c {
        b[nh + i] = x.clone();
    }
    let sol = solve_with(&smith_normal_form(&m), &b)?;
    Some(sol.into_iter().take(nh).enumerate().filter(|(_, x)| !x.is_zero()).collect())
}

/// The generator of top-dimensional cycles of a closed oriented pseudomanifold.
pub fn fundamental_cycle(x: &SimplicialSet) -> Result<SparseVec, HocolimError> {
    let n = x.dim();
    let off = x.chain_offsets();
    let mut m = IntMatrix::zeros(x.count(n.saturating_sub(1)), x.count(n));
    if n == 0 {
        return Err(HocolimError::FundamentalCycle("space has dimension 0".into()));
    }
    for k in 0..x.count(n) {
        for i in 0..=n {
            let c = if i % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            m.add_at(x.face(n, k, i), k, &c);
        }
    }
    let sm = smith_normal_form(&m);
    let r = sm.rank();
    if x.count(n) - r != 1 {
        return Err(HocolimError::FundamentalCycle(format!("top cycles have rank {}", x.count(n) - r)));
    }
    let col = sm.v.column(r);
    if !col.iter().all(|c| c.abs().is_one()) {
        return Err(HocolimError::FundamentalCycle("top cycle is not supported on every simplex with unit coefficients".into()));
    }
    Ok(col.into_iter().enumerate().map(|(k, c)| (off[n] + k, c)).collect())
}

/// A finite simplicial complex with a monotone family of subcomplexes indexed by a poset.
#[derive(Clone, Debug)]
pub struct SpaceWithCover {
    pub space: SimplicialSet,
    pub poset: Poset,
    pub pieces: Vec<Vec<Vec<bool>>>,
    pub fundamental: Option<SparseVec>,
}

impl SpaceWithCover {
    /// Pieces are generated by vertex lists; `manifold` computes the fundamental cycle.
    pub fn new(space: SimplicialSet, poset: Poset, pieces: &[Vec<Vec<usize>>], manifold: bool) -> Result<Self, HocolimError> {
        check_len("pieces", poset.len(), pieces.len())?;
        let by_vertices: HashMap<Vec<usize>, (usize, usize)> =
            (0..=space.dim()).flat_map(|n| (0..space.count(n)).map(move |k| (n, k))).map(|(n, k)| (space.vertices(n, k), (n, k))).collect();
        let mut masks = Vec::new();
        for gens in pieces {
            let mut mask: Vec<Vec<bool>> = (0..=space.dim()).map(|n| vec![false; space.count(n)]).collect();
            let mut stack: Vec<(usize, usize)> = Vec::new();
            for s in gens {
                let mut v = s.clone();
                v.sort();
                stack.push(*by_vertices.get(&v).ok_or(HocolimError::UnknownSimplex(v.clone()))?);
            }
            while let Some((n, k)) = stack.pop() {
                if mask[n][k] {
                    continue;
                }
                mask[n][k] = true;
                if n > 0 {
                    stack.extend(space.faces_of(n, k).iter().map(|f| (n - 1, *f)));
                }
            }
            masks.push(mask);
        }
        for a in 0..poset.len() {
            for b in 0..poset.len() {
                if poset.le(a, b) && masks[a].iter().flatten().zip(masks[b].iter().flatten()).any(|(x, y)| *x && !*y) {
                    return Err(HocolimError::NotMonotone(poset.elements[a].clone(), poset.elements[b].clone()));
                }
            }
        }
        let fundamental = if manifold { Some(fundamental_cycle(&space)?) } else { None };
        Ok(SpaceWithCover { space, poset, pieces: masks, fundamental })
    }

    pub fn with_fundamental(mut self, cycle: SparseVec) -> Result<Self, HocolimError> {
        let c = self.space.chains()?;
        let top = self.space.chain_offsets()[self.space.dim()];
        if cycle.keys().any(|g| *g < top) || !c.apply_d(&cycle).is_empty() || cycle.is_empty() {
            return Err(HocolimError::FundamentalCycle("not a nonzero top-dimensional cycle".into()));
        }
        self.fundamental = Some(cycle);
        Ok(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HypercoverMode {
    /// Chains: does the homotopy colimit hit the fundamental class?
    Fundamental,
    /// Cochains supported on piece interiors: does it hit the unit?
    Unit,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypercoverReport {
    pub mode: HypercoverMode,
    pub verdict: bool,
    pub hocolim_rank: usize,
    /// Nonzero coefficients of the preimage cycle, keyed by hocolim generator.
    pub witness: Option<Vec<(String, String)>>,
}

pub fn hypercover_check(s: &SpaceWithCover, mode: HypercoverMode) -> Result<HypercoverReport, HocolimError> {
    let x = &s.space;
    let off = &x.chain_offsets();
    let (global, class, local): (Arc<FreeComplex>, SparseVec, Vec<Vec<usize>>) = match mode {
        HypercoverMode::Fundamental => {
            let c = s.fundamental.clone().ok_or_else(|| HocolimError::FundamentalCycle("no fundamental cycle supplied".into()))?;
            let local = s
                .pieces
                .iter()
                .map(|m| (0..=x.dim()).flat_map(|n| (0..x.count(n)).filter(move |k| m[n][*k]).map(move |k| off[n] + k)).collect())
                .collect();
            (Arc::new(x.chains()?), c, local)
        }
        HypercoverMode::Unit => {
            if !connected(x) {
                return Err(HocolimError::Disconnected);
            }
            let unit = (0..x.count(0)).map(|v| (v, BigInt::one())).collect();
            let local = s.pieces.iter().map(|m| interior(x, m).into_iter().collect()).collect();
            (Arc::new(cochains(x)?), unit, local)
        }
    };
    let subs: Vec<Arc<FreeComplex>> = local
        .iter()
        .enumerate()
        .map(|(i, keep)| Ok(Arc::new(sub_complex(&global, keep, format!("piece {}", s.poset.elements[i]))?)))
        .collect::<Result<_, HocolimError>>()?;
    let incl = |i: usize, into: &[usize], of: &Arc<FreeComplex>| -> Result<ChainMap, HocolimError> {
        let pos: HashMap<usize, usize> = into.iter().enumerate().map(|(j, g)| (*g, j)).collect();
        let entries = local[i].iter().enumerate().map(|(j, g)| (pos[g], j, BigInt::one()));
        Ok(ChainMap::new(subs[i].clone(), of.clone(), 0, entries)?)
    };
    let mut covering = BTreeMap::new();
    for (a, b) in s.poset.hasse() {
        covering.insert((a, b), incl(a, &local[b], &subs[b])?);
    }
    let diagram = StrictDiagram::over_poset(&s.poset, subs.clone(), &covering)?;
    let all: Vec<usize> = (0..global.rank()).collect();
    let to_global: Vec<ChainMap> = (0..subs.len()).map(|i| incl(i, &all, &global)).collect::<Result<_, _>>()?;
    let h = hocolim(&diagram.to_dg()?)?;
    let phi = h.augmentation(&global, &diagram.base, &to_global)?;
    let z = hit_class(&h.complex, &phi, &global, &class);
    Ok(HypercoverReport { mode, verdict: z.is_some(), hocolim_rank: h.complex.rank(), witness: z.map(|z| named(&h.complex, &z)) })
}

fn named(c: &FreeComplex, v: &SparseVec) -> Vec<(String, String)> {
    v.iter().map(|(g, x)| (c.generator(*g).id.clone(), x.to_string())).collect()
}

fn connected(x: &SimplicialSet) -> bool {
    let n = x.count(0);
    if n == 0 {
        return false;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            i = p[i];
        }
        i
    }
    for e in 0..x.count(1) {
        let (a, b) = (root(&mut parent, x.vertex(1, e, 0)), root(&mut parent, x.vertex(1, e, 1)));
        parent[a] = b;
    }
    let r = root(&mut parent, 0);
    (0..n).all(|v| root(&mut parent, v) == r)
}

/// Generators of the cochains of X supported on simplices all of whose cofaces lie in the piece.
fn interior(x: &SimplicialSet, mask: &[Vec<bool>]) -> Vec<usize> {
    let off = x.chain_offsets();
    let mut inside: Vec<Vec<bool>> = mask.to_vec();
    for n in (0..x.dim()).rev() {
        for k in 0..x.count(n + 1) {
            if !inside[n + 1][k] {
                for f in x.faces_of(n + 1, k) {
                    inside[n][*f] = false;
                }
            }
        }
    }
    (0..=x.dim()).flat_map(|n| (0..x.count(n)).filter(|k| inside[n][*k]).map(|k| off[n] + k).collect::<Vec<_>>()).collect()
}

/// A strict diagram over `N(Σ)` together with its global complex and compatible maps to it.
#[derive(Clone, Debug)]
pub struct GlobalizedDiagram {
    pub diagram: StrictDiagram,
    pub global: Arc<FreeComplex>,
    pub to_global: Vec<ChainMap>,
}

#[derive(Clone, Debug)]
pub struct LocalToGlobalInput {
    pub poset: Poset,
    pub cc: GlobalizedDiagram,
    pub k: GlobalizedDiagram,
    pub a: GlobalizedDiagram,
    pub oc_local: Vec<ChainMap>,
    pub unit_local: Vec<ChainMap>,
    pub oc_global: ChainMap,
    pub unit_global: ChainMap,
    /// Cycle of the global A representing the unit.
    pub unit: SparseVec,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalToGlobalReport {
    pub local_quasi_isos: Vec<(String, bool)>,
    pub hocolim_quasi_iso: bool,
    pub unit_is_cycle: bool,
    pub unit_hit_from_hocolim: bool,
    /// `None` when a hypothesis fails and no conclusion is drawn.
    pub conclusion: Option<bool>,
    /// A cycle of the global CC whose image is homologous to the unit's image in K.
    pub witness: Option<Vec<(String, String)>>,
}

pub fn local_to_global_check(input: &LocalToGlobalInput) -> Result<LocalToGlobalReport, HocolimError> {
    let p = &input.poset;
    let base = &input.cc.diagram.base;
    check_len("local maps", p.len(), input.oc_local.len())?;
    check_len("local unit maps", p.len(), input.unit_local.len())?;
    let square = |name: String, f: &ChainMap, g: &ChainMap| -> Result<(), HocolimError> {
        match f.equals(g) && f.target.as_ref() == g.target.as_ref() {
            true => Ok(()),
            false => Err(HocolimError::NonCommuting(name)),
        }
    };
    for sys in [&input.cc, &input.k, &input.a] {
        for v in 0..p.len() {
            for w in 0..p.len() {
                if v == w || !p.le(v, w) {
                    continue;
                }
                let e = sys.diagram.edge_between(v, w).ok_or(HocolimError::NoPath(p.elements[v].clone(), p.elements[w].clone()))?;
                square(
                    format!("{} -> {} -> global of {}", p.elements[v], p.elements[w], sys.global.label()),
                    &e.then(&sys.to_global[w])?,
                    &sys.to_global[v],
                )?;
            }
        }
    }
    for v in 0..p.len() {
        let el = &p.elements[v];
        square(
            format!("local to global at {el}"),
            &input.oc_local[v].then(&input.k.to_global[v])?,
            &input.cc.to_global[v].then(&input.oc_global)?,
        )?;
        square(
            format!("unit to global at {el}"),
            &input.unit_local[v].then(&input.k.to_global[v])?,
            &input.a.to_global[v].then(&input.unit_global)?,
        )?;
        for w in 0..p.len() {
            if v == w || !p.le(v, w) {
                continue;
            }
            let (ecc, ek, ea) = (
                input.cc.diagram.edge_between(v, w).expect("checked"),
                input.k.diagram.edge_between(v, w).expect("checked"),
                input.a.diagram.edge_between(v, w).expect("checked"),
            );
            let tag = format!("{el} -> {}", p.elements[w]);
            square(format!("local maps along {tag}"), &ecc.then(&input.oc_local[w])?, &input.oc_local[v].then(ek)?)?;
            square(format!("unit maps along {tag}"), &ea.then(&input.unit_local[w])?, &input.unit_local[v].then(ek)?)?;
        }
    }
    let local_quasi_isos: Vec<(String, bool)> = input
        .oc_local
        .iter()
        .enumerate()
        .map(|(v, f)| Ok((p.elements[v].clone(), f.is_quasi_iso()?)))
        .collect::<Result<_, HocolimError>>()?;
    let h_cc = hocolim(&input.cc.diagram.to_dg()?)?;
    let h_k = hocolim(&input.k.diagram.to_dg()?)?;
    let h_a = hocolim(&input.a.diagram.to_dg()?)?;
    let h_oc = h_cc.levelwise(&h_k, base, &input.oc_local)?;
    let h_unit = h_a.levelwise(&h_k, base, &input.unit_local)?;
    let hocolim_quasi_iso = h_oc.is_quasi_iso()?;
    let unit_is_cycle = input.a.global.apply_d(&input.unit).is_empty();
    let phi_a = h_a.augmentation(&input.a.global, base, &input.a.to_global)?;
    let y = if unit_is_cycle { hit_class(&h_a.complex, &phi_a, &input.a.global, &input.unit) } else { None };
    let mut report = LocalToGlobalReport {
        local_quasi_isos,
        hocolim_quasi_iso,
        unit_is_cycle,
        unit_hit_from_hocolim: y.is_some(),
        conclusion: None,
        witness: None,
    };
    let hypotheses = report.local_quasi_isos.iter().all(|(_, ok)| *ok) && unit_is_cycle;
    let Some(y) = y.filter(|_| hypotheses) else {
        return Ok(report);
    };
    let target = h_unit.apply(&y);
    let Some(x) = hit_class(&h_cc.complex, &h_oc, &h_k.complex, &target) else {
        report.conclusion = Some(false);
        return Ok(report);
    };
    let phi_cc = h_cc.augmentation(&input.cc.global, base, &input.cc.to_global)?;
    let w = phi_cc.apply(&x);
    let mut diff = input.oc_global.apply(&w);
    for (g, c) in input.unit_global.apply(&input.unit) {
        sv_add(&mut diff, g, &-c);
    }
    let certified = boundary_preimage(&input.k.global, &diff).is_some();
    report.conclusion = Some(certified);
    report.witness = certified.then(|| named(&input.cc.global, &w));
    Ok(report)
}

/// Whether the mapping cone of a map between homotopy colimits is acyclic.
pub fn is_quasi_iso(f: &ChainMap) -> Result<bool, HocolimError> {
    Ok(cone(f)?.is_acyclic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::HomologyProfile;
    use crate::simplicial::{barycentric_subdivision, cone_point, cone_star};
    use proptest::prelude::*;

    fn z(label: &str) -> Arc<FreeComplex> {
        Arc::new(FreeComplex::new(label, vec![Generator::new("e", 0)], []).unwrap())
    }

    /// `Z --2--> Z` in even and odd degree plus a free acyclic pair.
    fn small(label: &str, rank: usize) -> Arc<FreeComplex> {
        let mut gens = Vec::new();
        let mut entries = Vec::new();
        for i in 0..rank {
            gens.push(Generator::new(format!("a{i}"), (i % 2) as u8));
        }
        gens.push(Generator::new("u", 0));
        gens.push(Generator::new("v", 1));
        entries.push((rank + 1, rank, BigInt::from(1)));
        Arc::new(FreeComplex::new(label, gens, entries).unwrap())
    }

    fn scalar(a: &Arc<FreeComplex>, b: &Arc<FreeComplex>, c: i64) -> ChainMap {
        let entries = (0..a.rank().min(b.rank())).map(|i| (i, i, BigInt::from(c)));
        ChainMap::new(a.clone(), b.clone(), 0, entries).unwrap()
    }

    fn constant(x: &SimplicialSet, a: &Arc<FreeComplex>) -> DgDiagram {
        let edges = (0..x.count(1)).map(|_| ChainMap::identity(a.clone())).collect();
        DgDiagram::strict(x.clone(), vec![a.clone(); x.count(0)], edges).unwrap()
    }

    #[test]
    fn constant_diagram_over_a_point() {
        let h = hocolim(&constant(&SimplicialSet::standard_simplex(0), &z("Z"))).unwrap();
        assert_eq!(h.complex.homology(), HomologyProfile::free(1, 0));
        assert_eq!(h.complex.rank(), 1);
    }

    #[test]
    fn face_chain_counts() {
        assert_eq!(face_chains(1).len(), 2);
        assert_eq!(face_chains(2).len(), 3 + 6);
        assert!(face_chains(0).is_empty());
    }

    #[test]
    fn mapping_cylinder_over_an_edge() {
        let a = small("A", 2);
        let b = small("B", 2);
        let f = scalar(&a, &b, 2);
        let x = SimplicialSet::standard_simplex(1);
        let d = DgDiagram::strict(x.clone(), vec![a.clone(), b.clone()], vec![f]).unwrap();
        let h = hocolim(&d).unwrap();
        assert_eq!(h.summands.len(), 3);
        assert_eq!(h.complex.homology(), b.homology());
        assert!(h.vertex_inclusion(1).unwrap().is_quasi_iso().unwrap());
        assert!(!h.vertex_inclusion(0).unwrap().is_quasi_iso().unwrap());
    }

    #[test]
    fn strict_diagrams_match_the_classical_formula() {
        let x = SimplicialSet::standard_simplex(3);
        let a = small("A", 3);
        let m = |c| scalar(&a, &a, c);
        let scale = [1i64, 2, -1, 3];
        let edges: Vec<ChainMap> = (0..x.count(1))
            .map(|e| {
                let (s, t) = (x.vertex(1, e, 0), x.vertex(1, e, 1));
                m((s + 1..=t).map(|i| scale[i]).product())
            })
            .collect();
        let s = StrictDiagram::new(x, vec![a.clone(); 4], edges).unwrap();
        let h = hocolim(&s.to_dg().unwrap()).unwrap();
        let c = classical_hocolim(&s).unwrap();
        assert_eq!(h.complex.entries(), c.entries());
        assert_eq!(h.complex.generators(), c.generators());
    }

    #[test]
    fn non_commuting_edges_are_rejected() {
        let x = SimplicialSet::standard_simplex(2);
        let a = small("A", 1);
        let edges = vec![scalar(&a, &a, 2), scalar(&a, &a, 3), scalar(&a, &a, 5)];
        assert!(matches!(StrictDiagram::new(x.clone(), vec![a.clone(); 3], edges.clone()), Err(HocolimError::DiagramIncoherent { .. })));
        assert!(matches!(DgDiagram::strict(x, vec![a; 3], edges), Err(HocolimError::DiagramIncoherent { .. })));
    }

    fn coherent(x: &SimplicialSet, seed: u64) -> DgDiagram {
        // every vertex gets the same complex; edges are identity plus d h + h d for random odd h
        let a = small("A", 3);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges = (0..x.count(1))
            .map(|_| {
                let h = random_map(&mut rng, &a, &a, 1).unwrap();
                ChainMap::identity(a.clone()).scaled_sum(&h.homotopy_boundary(), &BigInt::one(), &BigInt::one())
            })
            .collect();
        DgDiagram::complete(x.clone(), vec![a; x.count(0)], edges, &BTreeMap::new(), Some(seed)).unwrap()
    }

    #[test]
    fn coherent_completion_yields_valid_diagrams() {
        let x = SimplicialSet::standard_simplex(3);
        let d = coherent(&x, 7);
        for q in 1..=3 {
            for k in 0..x.count(q) {
                d.map(q, k).unwrap().check_chain_map().unwrap();
            }
        }
        let maps: Vec<Vec<ChainMap>> = (1..=3).map(|q| (0..x.count(q)).map(|k| d.map(q, k).unwrap()).collect()).collect();
        let again = DgDiagram::new(x.clone(), d.complexes().to_vec(), maps.clone()).unwrap();
        assert!(again.top(3, 0).equals(d.top(3, 0)));
        let mut broken = maps;
        let k0 = broken[1][0].clone();
        let col = k0.column(0).clone();
        let mut cols: Vec<SparseVec> = (0..k0.source.rank()).map(|i| k0.column(i).clone()).collect();
        let mut bumped = col;
        sv_add(&mut bumped, 0, &BigInt::one());
        cols[0] = bumped;
        broken[1][0] = ChainMap::from_columns(k0.source.clone(), k0.target.clone(), 0, cols).unwrap();
        assert!(matches!(DgDiagram::new(x, d.complexes().to_vec(), broken), Err(HocolimError::DiagramIncoherent { .. })));
    }

    #[test]
    fn barycentric_and_direct_agree_on_pullbacks() {
        for x in [SimplicialSet::standard_simplex(2), SimplicialSet::boundary_simplex(2), SimplicialSet::horn(3, 1)] {
            let d = coherent(&x, 3);
            let direct = hocolim(&d).unwrap();
            let bary = hocolim_with_mode(&d, HocolimMode::Barycentric).unwrap();
            assert_eq!(direct.complex.entries(), bary.complex.entries(), "{}", x.label());
        }
    }

    #[test]
    fn generalized_diagram_of_simplex_cochains() {
        // σ ↦ C*(Δ^{dim σ}) with restriction along faces: every map is a quasi-isomorphism
        let k = SimplicialSet::boundary_simplex(2);
        let x = cone_point(&k);
        let b = barycentric_subdivision(&x);
        let d = simplex_cochain_diagram(&b);
        let h = hocolim_barycentric(&x, &b, &d).unwrap();
        let star = b.vertex(0, cone_star(&k));
        assert!(h.inclusion(star).unwrap().is_quasi_iso().unwrap());
        assert_eq!(h.complex.homology(), HomologyProfile::free(1, 0));
    }

    fn simplex_cochain_diagram(b: &Barycentric) -> DgDiagram {
        let complexes: Vec<Arc<FreeComplex>> =
            b.cell.iter().map(|(n, _)| Arc::new(cochains(&SimplicialSet::standard_simplex(*n)).unwrap())).collect();
        let edges = b.chains[1]
            .iter()
            .map(|((n, _), sets)| {
                let keep = &sets[1];
                let big = SimplicialSet::standard_simplex(*n);
                let small_n = keep.len() - 1;
                let small = SimplicialSet::standard_simplex(small_n);
                let (ob, os) = (big.chain_offsets(), small.chain_offsets());
                let mut entries = Vec::new();
                for m in 0..=small_n {
                    for j in 0..small.count(m) {
                        let verts: Vec<usize> = small.vertices(m, j).iter().map(|v| keep[*v]).collect();
                        let i = (0..big.count(m)).find(|i| big.vertices(m, *i) == verts).unwrap();
                        entries.push((os[m] + j, ob[m] + i, BigInt::one()));
                    }
                }
                entries
            })
            .collect::<Vec<_>>();
        let edge_maps = (0..b.set.count(1))
            .map(|e| {
                let (s, t) = (b.set.vertex(1, e, 0), b.set.vertex(1, e, 1));
                ChainMap::new(complexes[s].clone(), complexes[t].clone(), 0, edges[e].clone()).unwrap()
            })
            .collect();
        DgDiagram::strict(b.set.clone(), complexes, edge_maps).unwrap()
    }

    #[test]
    fn terminal_vertex_of_a_cone_is_final() {
        for k in [
            SimplicialSet::empty(),
            SimplicialSet::standard_simplex(0),
            SimplicialSet::boundary_simplex(1),
            SimplicialSet::boundary_simplex(2),
        ] {
            let x = cone_point(&k);
            for seed in 0..3 {
                let d = coherent(&x, seed);
                let h = hocolim(&d).unwrap();
                assert!(h.vertex_inclusion(cone_star(&k)).unwrap().is_quasi_iso().unwrap(), "{} seed {seed}", x.label());
            }
        }
    }

    #[test]
    fn terminal_object_of_a_poset_is_cofinal() {
        let p = Poset::from_names(&["a", "b", "c", "t"], &[("a", "c"), ("b", "c"), ("c", "t"), ("a", "t")]).unwrap();
        let x = nerve_of_poset(&p);
        let d = coherent(&x, 11);
        let h = hocolim(&d).unwrap();
        let t = p.terminal().unwrap();
        assert!(h.vertex_inclusion(t).unwrap().is_quasi_iso().unwrap());
    }

    #[test]
    fn unnormalized_model_splits_with_acyclic_degenerate_part() {
        let d = constant(&SimplicialSet::standard_simplex(1), &z("Z"));
        let r = normalization_report(&d, 3).unwrap();
        assert!(r.splits && r.degenerate_acyclic && r.homology_agrees, "{r:?}");
        assert!(r.total_rank <= 60);
        let d2 = coherent(&SimplicialSet::standard_simplex(2), 5);
        let r2 = normalization_report(&d2, 2).unwrap();
        assert!(r2.splits && r2.degenerate_acyclic && r2.homology_agrees, "{r2:?}");
    }

    fn circle() -> SimplicialSet {
        let edges: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        SimplicialSet::complex("hexagon", 6, &edges).unwrap()
    }

    fn arc(vs: &[usize]) -> Vec<Vec<usize>> {
        vs.windows(2).map(|w| w.to_vec()).collect()
    }

    fn two_arcs(second: &[usize]) -> Vec<Vec<Vec<usize>>> {
        let first = [0, 1, 2, 3];
        let a = arc(&first);
        let b = arc(second);
        let both: Vec<Vec<usize>> = a.iter().filter(|e| b.contains(e)).cloned().collect();
        let mut both_pts: Vec<Vec<usize>> = first.iter().filter(|v| second.contains(v)).map(|v| vec![*v]).collect();
        both_pts.extend(both);
        // element order of nonempty_subsets(2): {1}, {2}, {1,2}
        vec![a, b, both_pts]
    }

    #[test]
    fn circle_covered_by_two_arcs() {
        let p = Poset::nonempty_subsets(2);
        let cover = SpaceWithCover::new(circle(), p.clone(), &two_arcs(&[2, 3, 4, 5, 0, 1]), true).unwrap();
        for mode in [HypercoverMode::Fundamental, HypercoverMode::Unit] {
            let r = hypercover_check(&cover, mode).unwrap();
            assert!(r.verdict && r.witness.is_some(), "{mode:?}");
        }
        let shrunk = SpaceWithCover::new(circle(), p, &two_arcs(&[3, 4, 5]), true).unwrap();
        for mode in [HypercoverMode::Fundamental, HypercoverMode::Unit] {
            assert!(!hypercover_check(&shrunk, mode).unwrap().verdict, "{mode:?}");
        }
    }

    #[test]
    fn single_piece_cover_returns_the_fundamental_cycle() {
        let x = circle();
        let all: Vec<Vec<usize>> = (0..6).map(|i| vec![i, (i + 1) % 6]).collect();
        let cover = SpaceWithCover::new(x, Poset::chain(1), &[all], true).unwrap();
        let r = hypercover_check(&cover, HypercoverMode::Fundamental).unwrap();
        assert!(r.verdict);
        assert_eq!(r.witness.unwrap().len(), 6);
    }

    #[test]
    fn non_monotone_pieces_are_rejected() {
        let p = Poset::nonempty_subsets(2);
        let pieces = vec![arc(&[0, 1, 2]), arc(&[2, 3, 4]), arc(&[4, 5])];
        assert!(matches!(SpaceWithCover::new(circle(), p, &pieces, true), Err(HocolimError::NotMonotone(..))));
    }

    fn torus() -> SimplicialSet {
        let v = |i: usize, j: usize| (i % 3) * 3 + (j % 3);
        let tris: Vec<Vec<usize>> = (0..3)
            .flat_map(|i| {
                (0..3).flat_map(move |j| [vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)], vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]])
            })
            .collect();
        SimplicialSet::complex("T2", 9, &tris).unwrap()
    }

    fn band(rows: &[usize]) -> Vec<Vec<usize>> {
        let v = |i: usize, j: usize| (i % 3) * 3 + (j % 3);
        rows.iter()
            .flat_map(|&i| {
                (0..3).flat_map(move |j| [vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)], vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]])
            })
            .collect()
    }

    #[test]
    fn torus_covered_by_two_annuli() {
        let a = band(&[0, 1]);
        let b = band(&[1, 2]);
        let both: Vec<Vec<usize>> = a.iter().filter(|t| b.contains(t)).cloned().collect();
        let x = torus();
        assert_eq!(x.chains().unwrap().homology(), HomologyProfile::free(2, 2));
        let both_full = {
            // the two annuli also share the circle at row 0
            let mut s = both.clone();
            s.extend((0..3).map(|j| vec![j, (j + 1) % 3]));
            s
        };
        let cover = SpaceWithCover::new(x, Poset::nonempty_subsets(2), &[a, b, both_full], true).unwrap();
        let r = hypercover_check(&cover, HypercoverMode::Fundamental).unwrap();
        assert!(r.verdict);
    }

    fn globalized(p: &Poset, local: Vec<Arc<FreeComplex>>, global: Arc<FreeComplex>, to_global: Vec<ChainMap>) -> GlobalizedDiagram {
        let covering = p.hasse().into_iter().map(|(a, b)| ((a, b), ChainMap::identity(local[a].clone()))).collect();
        GlobalizedDiagram { diagram: StrictDiagram::over_poset(p, local, &covering).unwrap(), global, to_global }
    }

    fn rank_one_input(oc: &[i64], oc_global: i64) -> LocalToGlobalInput {
        let p = Poset::chain(oc.len());
        let (cc, k, a) = (z("CC"), z("K"), z("A"));
        let n = oc.len();
        let ids = |c: &Arc<FreeComplex>| vec![ChainMap::identity(c.clone()); n];
        LocalToGlobalInput {
            poset: p.clone(),
            cc: globalized(&p, vec![cc.clone(); n], cc.clone(), ids(&cc)),
            k: globalized(&p, vec![k.clone(); n], k.clone(), ids(&k)),
            a: globalized(&p, vec![a.clone(); n], a.clone(), ids(&a)),
            oc_local: oc.iter().map(|c| scalar(&cc, &k, *c)).collect(),
            unit_local: vec![scalar(&a, &k, 1); n],
            oc_global: scalar(&cc, &k, oc_global),
            unit_global: scalar(&a, &k, 1),
            unit: basis(0),
        }
    }

    #[test]
    fn identity_data_passes_with_the_generator() {
        let r = local_to_global_check(&rank_one_input(&[1], 1)).unwrap();
        assert_eq!(r.conclusion, Some(true));
        assert_eq!(r.witness, Some(vec![("e".to_string(), "1".to_string())]));
    }

    #[test]
    fn failed_local_hypothesis_draws_no_conclusion() {
        let r = local_to_global_check(&rank_one_input(&[2, 2], 2)).unwrap();
        assert!(r.local_quasi_isos.iter().all(|(_, ok)| !ok));
        assert_eq!(r.conclusion, None);
        assert!(r.witness.is_none());
        assert!(matches!(local_to_global_check(&rank_one_input(&[1, 3], 1)), Err(HocolimError::NonCommuting(_))));
    }

    #[test]
    fn hochschild_complex_into_a_padded_target() {
        use crate::bimodule::{diagonal_bimodule, hochschild_complex};
        let a2 = Arc::new(crate::library::linear_category(2));
        let cc = hochschild_complex(&diagonal_bimodule(&a2).unwrap(), true, None, 0).unwrap().complex;
        let pad = Arc::new(cone(&ChainMap::identity(z("P"))).unwrap());
        let k = Arc::new(cc.direct_sum(&pad, "K").unwrap());
        let oc = ChainMap::new(cc.clone(), k.clone(), 0, (0..cc.rank()).map(|i| (i, i, BigInt::one()))).unwrap();
        let rep = cc.homology_basis().representative(0, 0).clone();
        let a = z("A");
        let unit = ChainMap::from_columns(a.clone(), k.clone(), 0, vec![rep]).unwrap();
        unit.check_chain_map().unwrap();
        let p = Poset::chain(2);
        let input = LocalToGlobalInput {
            poset: p.clone(),
            cc: globalized(&p, vec![cc.clone(); 2], cc.clone(), vec![ChainMap::identity(cc.clone()); 2]),
            k: globalized(&p, vec![k.clone(); 2], k.clone(), vec![ChainMap::identity(k.clone()); 2]),
            a: globalized(&p, vec![a.clone(); 2], a.clone(), vec![ChainMap::identity(a.clone()); 2]),
            oc_local: vec![oc.clone(); 2],
            unit_local: vec![unit.clone(); 2],
            oc_global: oc,
            unit_global: unit,
            unit: basis(0),
        };
        let r = local_to_global_check(&input).unwrap();
        assert!(r.hocolim_quasi_iso && r.unit_hit_from_hocolim);
        assert_eq!(r.conclusion, Some(true));
        assert!(r.witness.is_some());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn every_hocolim_squares_to_zero(seed in 0u64..1000, shape in 0usize..4) {
            let x = match shape {
                0 => SimplicialSet::standard_simplex(3),
                1 => SimplicialSet::boundary_simplex(3),
                2 => cone_point(&SimplicialSet::boundary_simplex(2)),
                _ => SimplicialSet::horn(3, 2),
            };
            let d = coherent(&x, seed);
            prop_assert!(hocolim(&d).is_ok());
            prop_assert!(hocolim_with_mode(&d, HocolimMode::Barycentric).is_ok());
        }
    }
}
