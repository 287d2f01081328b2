//! Finite-rank Z/2-graded free chain complexes over the integers.

use crate::linalg::{invariant_factors, smith_normal_form, solve_with, sv_add, IntMatrix, Smith, SparseMatrix, SparseVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("duplicate generator id `{0}`")]
    DuplicateGenerator(String),
    #[error("differential entry {target} <- {from} does not change parity")]
    ParityMismatch { target: String, from: String },
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("d^2 != 0: coefficient {coeff} on {target} in d(d({from}))")]
    SquareNonzero { target: String, from: String, coeff: String },
    #[error("map entry {target} <- {from} has the wrong parity for shift {shift}")]
    MapParity { target: String, from: String, shift: u8 },
    #[error("not a chain map: mismatch {coeff} on {target} for source {from}")]
    NotChainMap { target: String, from: String, coeff: String },
    #[error("map must have parity shift 0")]
    OddMap,
    #[error("composition of maps between mismatched complexes")]
    Mismatch,
    #[error("not a quasi-isomorphism")]
    NotQuasiIso,
    #[error("complex is not acyclic")]
    NotAcyclic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generator {
    pub id: String,
    pub parity: u8,
}

impl Generator {
    pub fn new(id: impl Into<String>, parity: u8) -> Self {
        Generator { id: id.into(), parity: parity & 1 }
    }
}

/// Z/2-graded free complex. The differential is stored column-wise: `d[g]` lists `(h, d[h,g])`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeComplex {
    label: String,
    gens: Vec<Generator>,
    index: BTreeMap<String, usize>,
    d: Vec<SparseVec>,
}

impl FreeComplex {
    pub fn new(
        label: impl Into<String>,
        gens: Vec<Generator>,
        entries: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self, ChainError> {
        let mut index = BTreeMap::new();
        for (i, g) in gens.iter().enumerate() {
            if index.insert(g.id.clone(), i).is_some() {
                return Err(ChainError::DuplicateGenerator(g.id.clone()));
            }
        }
        let mut d = vec![SparseVec::new(); gens.len()];
        for (t, s, c) in entries {
            if t >= gens.len() {
                return Err(ChainError::IndexOutOfRange(t));
            }
            if s >= gens.len() {
                return Err(ChainError::IndexOutOfRange(s));
            }
            if c.is_zero() {
                continue;
            }
            if gens[t].parity == gens[s].parity {
                return Err(ChainError::ParityMismatch { target: gens[t].id.clone(), from: gens[s].id.clone() });
            }
            sv_add(&mut d[s], t, &c);
        }
        let cx = FreeComplex { label: label.into(), gens, index, d };
        cx.check_square()?;
        Ok(cx)
    }

    pub fn zero(label: impl Into<String>) -> Self {
        FreeComplex { label: label.into(), gens: vec![], index: BTreeMap::new(), d: vec![] }
    }

    fn check_square(&self) -> Result<(), ChainError> {
        for s in 0..self.gens.len() {
            let dd = self.apply_d(&self.d[s]);
            if let Some((t, c)) = dd.iter().next() {
                return Err(ChainError::SquareNonzero {
                    target: self.gens[*t].id.clone(),
                    from: self.gens[s].id.clone(),
                    coeff: c.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn rank(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn generator(&self, i: usize) -> &Generator {
        &self.gens[i]
    }

    pub fn parity(&self, i: usize) -> u8 {
        self.gens[i].parity
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// d applied to one generator.
    pub fn d_gen(&self, g: usize) -> &SparseVec {
        &self.d[g]
    }

    pub fn apply_d(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (g, c) in v {
            for (h, x) in &self.d[*g] {
                sv_add(&mut out, *h, &(c * x));
            }
        }
        out
    }

    /// All entries `(target, source, coeff)` of the differential in basis order.
    pub fn entries(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for (s, col) in self.d.iter().enumerate() {
            for (t, c) in col {
                out.push((*t, s, c.clone()));
            }
        }
        out.sort_by(|a, b| (a.1, a.0).cmp(&(b.1, b.0)));
        out
    }

    /// Indices of generators in each parity, in basis order.
    pub fn parity_indices(&self) -> [Vec<usize>; 2] {
        let mut out = [Vec::new(), Vec::new()];
        for (i, g) in self.gens.iter().enumerate() {
            out[g.parity as usize].push(i);
        }
        out
    }

    /// Matrix of the differential from parity `p` to parity `1 - p`, in parity-local indices.
    pub fn d_block(&self, p: usize) -> SparseMatrix {
        let idx = self.parity_indices();
        let local: BTreeMap<usize, usize> = idx[1 - p].iter().enumerate().map(|(k, g)| (*g, k)).collect();
        let mut m = SparseMatrix { rows: idx[1 - p].len(), cols: idx[p].len(), entries: vec![] };
        for (col, g) in idx[p].iter().enumerate() {
            for (h, c) in &self.d[*g] {
                m.entries.push((local[h], col, c.clone()));
            }
        }
        m
    }

    pub fn homology(&self) -> HomologyProfile {
        let idx = self.parity_indices();
        let f0 = invariant_factors(&self.d_block(0));
        let f1 = invariant_factors(&self.d_block(1));
        let ranks = [f0.len(), f1.len()];
        let mut out = HomologyProfile::default();
        for p in 0..2 {
            let incoming = if p == 0 { &f1 } else { &f0 };
            out.parity[p] = ParityHomology {
                free_rank: idx[p].len() - ranks[p] - ranks[1 - p],
                torsion: incoming.iter().filter(|x| !x.is_one()).cloned().collect(),
            };
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_zero()
    }

    /// Complex with all parities flipped and the differential negated.
    pub fn shift(&self) -> FreeComplex {
        FreeComplex {
            label: format!("{}[1]", self.label),
            gens: self.gens.iter().map(|g| Generator::new(g.id.clone(), g.parity ^ 1)).collect(),
            index: self.index.clone(),
            d: self.d.iter().map(|col| col.iter().map(|(h, c)| (*h, -c)).collect()).collect(),
        }
    }

    pub fn direct_sum(&self, other: &FreeComplex, label: impl Into<String>) -> Result<FreeComplex, ChainError> {
        let n = self.rank();
        let gens: Vec<Generator> = self.gens.iter().chain(other.gens.iter()).cloned().collect();
        let mut entries = self.entries();
        entries.extend(other.entries().into_iter().map(|(t, s, c)| (t + n, s + n, c)));
        FreeComplex::new(label, gens, entries)
    }

    /// Homology with explicit cycle representatives and a classifier for cycles.
    pub fn homology_basis(&self) -> HomologyBasis {
        let idx = self.parity_indices();
        let mut parts: Vec<ParityBasis> = Vec::new();
        for p in 0..2 {
            let dp = self.d_block(p).to_dense();
            let dq = self.d_block(1 - p).to_dense();
            let sm = smith_normal_form(&dp);
            let r = sm.rank();
            let n = idx[p].len();
            let k = n - r;
            // kernel coordinates of the image of the incoming differential
            let coord = sm.v_inv.row_block(r, n);
            let b = coord.mul(&dq);
            let sb = smith_normal_form(&b);
            let kernel = sm.v.col_block(r, n);
            let gens_in_kernel = sb.u_inv.clone();
            let mut classes = Vec::new();
            for i in 0..k {
                let order = if i < sb.rank() { sb.diag[i].clone() } else { BigInt::zero() };
                if order.is_one() {
                    continue;
                }
                let col = gens_in_kernel.column(i);
                let chain_local = kernel.mul_vec(&col);
                let mut rep = SparseVec::new();
                for (j, x) in chain_local.iter().enumerate() {
                    sv_add(&mut rep, idx[p][j], x);
                }
                classes.push(ClassData { slot: i, order, representative: rep });
            }
            parts.push(ParityBasis { indices: idx[p].clone(), classify: sb.u.mul(&coord), classes });
        }
        HomologyBasis { parts: [parts.remove(0), parts.remove(0)] }
    }
}

impl fmt::Display for FreeComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.label, self.rank())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ParityHomology {
    pub free_rank: usize,
    #[serde(serialize_with = "crate::io::ser_bigint_vec")]
    pub torsion: Vec<BigInt>,
}

impl ParityHomology {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HomologyProfile {
    pub parity: [ParityHomology; 2],
}

impl HomologyProfile {
    pub fn free(r0: usize, r1: usize) -> Self {
        HomologyProfile { parity: [ParityHomology { free_rank: r0, torsion: vec![] }, ParityHomology { free_rank: r1, torsion: vec![] }] }
    }

    pub fn is_zero(&self) -> bool {
        self.parity[0].is_zero() && self.parity[1].is_zero()
    }

    pub fn total_free_rank(&self) -> usize {
        self.parity[0].free_rank + self.parity[1].free_rank
    }
}

impl fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..2 {
            if p == 1 {
                write!(f, ", ")?;
            }
            let h = &self.parity[p];
            let mut parts = Vec::new();
            if h.free_rank > 0 {
                parts.push(if h.free_rank == 1 { "Z".to_string() } else { format!("Z^{}", h.free_rank) });
            }
            for t in &h.torsion {
                parts.push(format!("Z/{t}"));
            }
            if parts.is_empty() {
                parts.push("0".into());
            }
            write!(f, "H{p} = {}", parts.join(" + "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct ClassData {
    slot: usize,
    order: BigInt,
    representative: SparseVec,
}

#[derive(Clone, Debug)]
struct ParityBasis {
    indices: Vec<usize>,
    classify: IntMatrix,
    classes: Vec<ClassData>,
}

/// Homology generators per parity: torsion classes first, then free classes.
#[derive(Clone, Debug)]
pub struct HomologyBasis {
    parts: [ParityBasis; 2],
}

impl HomologyBasis {
    pub fn count(&self, p: usize) -> usize {
        self.parts[p].classes.len()
    }

    /// Order of the k-th class in parity p (0 for free classes).
    pub fn order(&self, p: usize, k: usize) -> &BigInt {
        &self.parts[p].classes[k].order
    }

    pub fn representative(&self, p: usize, k: usize) -> &SparseVec {
        &self.parts[p].classes[k].representative
    }

    /// Coordinates of a cycle of parity p in the class basis; torsion coordinates reduced mod order.
    pub fn classify(&self, p: usize, cycle: &SparseVec) -> Vec<BigInt> {
        let part = &self.parts[p];
        let local: Vec<BigInt> = part.indices.iter().map(|g| cycle.get(g).cloned().unwrap_or_default()).collect();
        let y = part.classify.mul_vec(&local);
        part.classes
            .iter()
            .map(|c| {
                let v = y[c.slot].clone();
                if c.order.is_zero() {
                    v
                } else {
                    v.mod_floor(&c.order)
                }
            })
            .collect()
    }

    pub fn is_boundary(&self, p: usize, cycle: &SparseVec) -> bool {
        self.classify(p, cycle).iter().all(|x| x.is_zero())
    }
}

/// Parity of a homogeneous sparse vector, if it is nonzero and homogeneous.
pub fn homogeneous_parity(c: &FreeComplex, v: &SparseVec) -> Option<u8> {
    let mut p = None;
    for g in v.keys() {
        let q = c.parity(*g);
        match p {
            None => p = Some(q),
            Some(x) if x != q => return None,
            _ => {}
        }
    }
    p
}

/// Linear map between free complexes; `entries[g]` lists the image of source generator g.
#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<FreeComplex>,
    pub target: Arc<FreeComplex>,
    pub parity_shift: u8,
    entries: Vec<SparseVec>,
}

pub type Homotopy = ChainMap;

impl ChainMap {
    /// Build without verifying the chain-map identity (homotopies, pre-homomorphisms).
    pub fn new_linear(
        source: Arc<FreeComplex>,
        target: Arc<FreeComplex>,
        parity_shift: u8,
        entries: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self, ChainError> {
        let mut cols = vec![SparseVec::new(); source.rank()];
        for (t, s, c) in entries {
            if s >= source.rank() {
                return Err(ChainError::IndexOutOfRange(s));
            }
            if t >= target.rank() {
                return Err(ChainError::IndexOutOfRange(t));
            }
            if c.is_zero() {
                continue;
            }
            if target.parity(t) != (source.parity(s) + parity_shift) & 1 {
                return Err(ChainError::MapParity {
                    target: target.generator(t).id.clone(),
                    from: source.generator(s).id.clone(),
                    shift: parity_shift,
                });
            }
            sv_add(&mut cols[s], t, &c);
        }
        Ok(ChainMap { source, target, parity_shift: parity_shift & 1, entries: cols })
    }

    /// Build and verify `d f = (-1)^shift f d`.
    pub fn new(
        source: Arc<FreeComplex>,
        target: Arc<FreeComplex>,
        parity_shift: u8,
        entries: impl IntoIterator<Item = (usize, usize, BigInt)>,
    ) -> Result<Self, ChainError> {
        let m = Self::new_linear(source, target, parity_shift, entries)?;
        m.check_chain_map()?;
        Ok(m)
    }

    pub fn from_columns(
        source: Arc<FreeComplex>,
        target: Arc<FreeComplex>,
        parity_shift: u8,
        cols: Vec<SparseVec>,
    ) -> Result<Self, ChainError> {
        let entries: Vec<(usize, usize, BigInt)> =
            cols.into_iter().enumerate().flat_map(|(s, col)| col.into_iter().map(move |(t, c)| (t, s, c))).collect();
        Self::new_linear(source, target, parity_shift, entries)
    }

    pub fn identity(c: Arc<FreeComplex>) -> Self {
        let cols = (0..c.rank()).map(|i| SparseVec::from([(i, BigInt::one())])).collect();
        ChainMap { source: c.clone(), target: c, parity_shift: 0, entries: cols }
    }

    pub fn zero(source: Arc<FreeComplex>, target: Arc<FreeComplex>, parity_shift: u8) -> Self {
        let n = source.rank();
        ChainMap { source, target, parity_shift, entries: vec![SparseVec::new(); n] }
    }

    pub fn check_chain_map(&self) -> Result<(), ChainError> {
        let sign = if self.parity_shift == 0 { BigInt::one() } else { -BigInt::one() };
        for g in 0..self.source.rank() {
            let lhs = self.target.apply_d(&self.entries[g]);
            let rhs = self.apply(self.source.d_gen(g));
            let mut diff = lhs;
            for (h, c) in rhs {
                sv_add(&mut diff, h, &(-(&sign * c)));
            }
            if let Some((t, c)) = diff.iter().next() {
                return Err(ChainError::NotChainMap {
                    target: self.target.generator(*t).id.clone(),
                    from: self.source.generator(g).id.clone(),
                    coeff: c.to_string(),
                });
            }
        }
        Ok(())
    }

    pub fn column(&self, g: usize) -> &SparseVec {
        &self.entries[g]
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (g, c) in v {
            for (h, x) in &self.entries[*g] {
                sv_add(&mut out, *h, &(c * x));
            }
        }
        out
    }

    pub fn entries(&self) -> Vec<(usize, usize, BigInt)> {
        let mut out = Vec::new();
        for (s, col) in self.entries.iter().enumerate() {
            for (t, c) in col {
                out.push((*t, s, c.clone()));
            }
        }
        out
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ChainMap) -> Result<ChainMap, ChainError> {
        if self.target.as_ref() != other.source.as_ref() {
            return Err(ChainError::Mismatch);
        }
        let cols = self.entries.iter().map(|col| other.apply(col)).collect();
        Ok(ChainMap {
            source: self.source.clone(),
            target: other.target.clone(),
            parity_shift: (self.parity_shift + other.parity_shift) & 1,
            entries: cols,
        })
    }

    pub fn scaled_sum(&self, other: &ChainMap, a: &BigInt, b: &BigInt) -> ChainMap {
        let cols = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| {
                let mut v = SparseVec::new();
                for (h, c) in x {
                    sv_add(&mut v, *h, &(a * c));
                }
                for (h, c) in y {
                    sv_add(&mut v, *h, &(b * c));
                }
                v
            })
            .collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), parity_shift: self.parity_shift, entries: cols }
    }

    /// `d h + h d` for a map h of odd parity, as a map of even parity.
    pub fn homotopy_boundary(&self) -> ChainMap {
        let cols = (0..self.source.rank())
            .map(|g| {
                let mut v = self.target.apply_d(&self.entries[g]);
                for (h, c) in self.apply(self.source.d_gen(g)) {
                    sv_add(&mut v, h, &c);
                }
                v
            })
            .collect();
        ChainMap { source: self.source.clone(), target: self.target.clone(), parity_shift: (self.parity_shift + 1) & 1, entries: cols }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|c| c.is_empty())
    }

    pub fn equals(&self, other: &ChainMap) -> bool {
        self.entries == other.entries
    }

    pub fn is_quasi_iso(&self) -> Result<bool, ChainError> {
        Ok(cone(self)?.is_acyclic())
    }
}

/// Mapping cone: source generators shifted, then target generators; `d = [[-d_A, 0], [f, d_B]]`.
pub fn cone(f: &ChainMap) -> Result<FreeComplex, ChainError> {
    if f.parity_shift != 0 {
        return Err(ChainError::OddMap);
    }
    f.check_chain_map()?;
    let a = &f.source;
    let b = &f.target;
    let n = a.rank();
    let mut gens = Vec::with_capacity(n + b.rank());
    for g in a.generators() {
        gens.push(Generator::new(format!("src:{}", g.id), g.parity ^ 1));
    }
    for g in b.generators() {
        gens.push(Generator::new(format!("tgt:{}", g.id), g.parity));
    }
    let mut entries = Vec::new();
    for (t, s, c) in a.entries() {
        entries.push((t, s, -c));
    }
    for (t, s, c) in f.entries() {
        entries.push((t + n, s, c));
    }
    for (t, s, c) in b.entries() {
        entries.push((t + n, s + n, c));
    }
    FreeComplex::new(format!("cone({}->{})", a.label(), b.label()), gens, entries)
}

/// Tensor product with the Koszul sign `d(x⊗y) = dx⊗y + (-1)^{|x|} x⊗dy`.
pub fn tensor_complexes(c: &FreeComplex, d: &FreeComplex) -> Result<FreeComplex, ChainError> {
    let m = d.rank();
    let mut gens = Vec::with_capacity(c.rank() * m);
    for x in c.generators() {
        for y in d.generators() {
            gens.push(Generator::new(format!("{}|{}", x.id, y.id), x.parity ^ y.parity));
        }
    }
    let mut entries = Vec::new();
    for i in 0..c.rank() {
        for j in 0..m {
            let src = i * m + j;
            for (h, a) in c.d_gen(i) {
                entries.push((h * m + j, src, a.clone()));
            }
            let sign = if c.parity(i) == 0 { BigInt::one() } else { -BigInt::one() };
            for (h, a) in d.d_gen(j) {
                entries.push((i * m + h, src, &sign * a));
            }
        }
    }
    FreeComplex::new(format!("{}⊗{}", c.label(), d.label()), gens, entries)
}

/// A contraction `s` with `d s + s d = id` and `s s = 0`, when the complex is acyclic.
pub fn contraction(c: &Arc<FreeComplex>) -> Result<Homotopy, ChainError> {
    let idx = c.parity_indices();
    let smiths: Vec<Smith> = (0..2).map(|p| smith_normal_form(&c.d_block(p).to_dense())).collect();
    for p in 0..2 {
        if !smiths[p].diag.iter().all(|x| x.is_one()) {
            return Err(ChainError::NotAcyclic);
        }
        if smiths[p].rank() + smiths[1 - p].rank() != idx[p].len() {
            return Err(ChainError::NotAcyclic);
        }
    }
    let mut entries = Vec::new();
    for p in 0..2 {
        // s: C_{1-p} -> C_p, inverting d_p on cycles of C_{1-p} and vanishing on the complement
        let sp = &smiths[p];
        let sq = &smiths[1 - p];
        let r = sp.rank();
        let rq = sq.rank();
        let nq = idx[1 - p].len();
        let proj = sq.v.col_block(rq, nq).mul(&sq.v_inv.row_block(rq, nq));
        let s_mat = sp.v.col_block(0, r).mul(&sp.u.row_block(0, r)).mul(&proj);
        for i in 0..s_mat.rows() {
            for j in 0..s_mat.cols() {
                let x = s_mat.get(i, j);
                if !x.is_zero() {
                    entries.push((idx[p][i], idx[1 - p][j], x.clone()));
                }
            }
        }
    }
    let s = ChainMap::new_linear(c.clone(), c.clone(), 1, entries)?;
    let db = s.homotopy_boundary();
    if !db.equals(&ChainMap::identity(c.clone())) {
        return Err(ChainError::NotAcyclic);
    }
    Ok(s)
}

/// Homotopy inverse data for a quasi-isomorphism `f: A -> B`.
#[derive(Clone, Debug)]
pub struct HomotopyInverse {
    pub g: ChainMap,
    pub h_src: Homotopy,
    pub h_tgt: Homotopy,
}

pub fn homotopy_inverse(f: &ChainMap) -> Result<HomotopyInverse, ChainError> {
    let cn = Arc::new(cone(f)?);
    if !cn.is_acyclic() {
        return Err(ChainError::NotQuasiIso);
    }
    let s = contraction(&cn)?;
    let n = f.source.rank();
    let mut g = Vec::new();
    let mut h_src = Vec::new();
    let mut h_tgt = Vec::new();
    for (t, src, c) in s.entries() {
        match (t < n, src < n) {
            (true, false) => g.push((t, src - n, c)),
            (true, true) => h_src.push((t, src, c)),
            (false, false) => h_tgt.push((t - n, src - n, -c)),
            (false, true) => {}
        }
    }
    let g = ChainMap::new(f.target.clone(), f.source.clone(), 0, g)?;
    let h_src = ChainMap::new_linear(f.source.clone(), f.source.clone(), 1, h_src)?;
    let h_tgt = ChainMap::new_linear(f.target.clone(), f.target.clone(), 1, h_tgt)?;
    let one = BigInt::one();
    let fg = g.then(f)?.scaled_sum(&ChainMap::identity(f.target.clone()), &one, &-&one);
    let gf = f.then(&g)?.scaled_sum(&ChainMap::identity(f.source.clone()), &one, &-&one);
    if !fg.equals(&h_tgt.homotopy_boundary()) || !gf.equals(&h_src.homotopy_boundary()) {
        return Err(ChainError::NotQuasiIso);
    }
    Ok(HomotopyInverse { g, h_src, h_tgt })
}

/// Solve `d_B F + sign · F d_A = rhs` for a linear map `F` of the given parity, where
/// `rhs` is a linear map of parity `parity + 1`.
pub fn solve_homotopy_equation(
    source: &Arc<FreeComplex>,
    target: &Arc<FreeComplex>,
    parity: u8,
    sign: i64,
    rhs: &ChainMap,
) -> Option<ChainMap> {
    let (na, nb) = (source.rank(), target.rank());
    let mut unknowns = Vec::new();
    let mut unknown_index = BTreeMap::new();
    for a in 0..na {
        for b in 0..nb {
            if target.parity(b) == (source.parity(a) + parity) & 1 {
                unknown_index.insert((b, a), unknowns.len());
                unknowns.push((b, a));
            }
        }
    }
    let mut eq_index = BTreeMap::new();
    for a in 0..na {
        for b in 0..nb {
            if target.parity(b) == (source.parity(a) + parity + 1) & 1 {
                let k = eq_index.len();
                eq_index.insert((b, a), k);
            }
        }
    }
    let mut m = IntMatrix::zeros(eq_index.len(), unknowns.len());
    for (u, (b, a)) in unknowns.iter().enumerate() {
        // contribution of F[b,a] to (d_B F)[b', a] = d_B[b', b] F[b, a]
        for (b2, x) in target.d_gen(*b) {
            m.add_at(eq_index[&(*b2, *a)], u, x);
        }
    }
    let sgn = BigInt::from(sign);
    for a0 in 0..na {
        // (F d_A)[b, a0] = sum_a F[b, a] d_A[a, a0]
        for (a, x) in source.d_gen(a0) {
            for b in 0..nb {
                if let Some(u) = unknown_index.get(&(b, *a)) {
                    m.add_at(eq_index[&(b, a0)], *u, &(&sgn * x));
                }
            }
        }
    }
    let mut rhs_vec = vec![BigInt::zero(); eq_index.len()];
    for (t, s, c) in rhs.entries() {
        rhs_vec[*eq_index.get(&(t, s))?] += c;
    }
    let sm = smith_normal_form(&m);
    let x = solve_with(&sm, &rhs_vec)?;
    let entries = unknowns.iter().zip(x).map(|((b, a), c)| (*b, *a, c));
    let f = ChainMap::new_linear(source.clone(), target.clone(), parity, entries).ok()?;
    Some(f)
}

/// A homotopy `h` with `phi = d h + h d`, if `phi` is null-homotopic.
pub fn null_homotopy(phi: &ChainMap) -> Option<Homotopy> {
    if phi.parity_shift != 0 {
        return None;
    }
    let h = solve_homotopy_equation(&phi.source, &phi.target, 1, 1, phi)?;
    h.homotopy_boundary().equals(phi).then_some(h)
}

/// Integer solution `y` of `d y = z` in a complex, if `z` is a boundary.
pub fn find_preimage(c: &FreeComplex, z: &SparseVec) -> Option<SparseVec> {
    let Some(p) = homogeneous_parity(c, z) else {
        return Some(SparseVec::new());
    };
    let q = (1 - p) as usize;
    let idx = c.parity_indices();
    let block = c.d_block(q).to_dense();
    let local: BTreeMap<usize, usize> = idx[p as usize].iter().enumerate().map(|(k, g)| (*g, k)).collect();
    let mut b = vec![BigInt::zero(); idx[p as usize].len()];
    for (g, x) in z {
        b[local[g]] = x.clone();
    }
    let sol = solve_with(&smith_normal_form(&block), &b)?;
    let mut y = SparseVec::new();
    for (k, x) in sol.iter().enumerate() {
        sv_add(&mut y, idx[q][k], x);
    }
    Some(y)
}

pub fn is_cycle(c: &FreeComplex, v: &SparseVec) -> bool {
    c.apply_d(v).is_empty()
}

/// Whether every coefficient of `v` is divisible by `n` (used in torsion diagnostics).
pub fn divisible_by(v: &SparseVec, n: &BigInt) -> bool {
    v.values().all(|x| x.is_multiple_of(n))
}

pub fn max_abs(v: &SparseVec) -> BigInt {
    v.values().map(|x| x.abs()).max().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn times(n: i64) -> FreeComplex {
        FreeComplex::new("x", vec![Generator::new("a", 0), Generator::new("b", 1)], [(1, 0, int(n))]).unwrap()
    }

    #[test]
    fn rejects_nonzero_square() {
        // a -> b -> c would need three parities; in Z/2 a -> b -> a' with nonzero composite
        let gens = vec![Generator::new("a", 0), Generator::new("b", 1), Generator::new("c", 0)];
        let err = FreeComplex::new("bad", gens, [(1, 0, int(1)), (2, 1, int(1))]).unwrap_err();
        assert!(matches!(err, ChainError::SquareNonzero { .. }));
    }

    #[test]
    fn torsion_and_free_parts() {
        let h = times(2).homology();
        assert!(h.parity[0].is_zero());
        assert_eq!(h.parity[1].torsion, vec![int(2)]);
        let single = FreeComplex::new("pt", vec![Generator::new("p", 0)], []).unwrap();
        assert_eq!(single.homology(), HomologyProfile::free(1, 0));
    }

    #[test]
    fn cone_of_times_two() {
        let z = Arc::new(FreeComplex::new("Z", vec![Generator::new("x", 0)], []).unwrap());
        let f = ChainMap::new(z.clone(), z.clone(), 0, [(0, 0, int(2))]).unwrap();
        let h = cone(&f).unwrap().homology();
        assert_eq!(h.parity[0].torsion, vec![int(2)]);
        assert!(!f.is_quasi_iso().unwrap());
        assert!(matches!(homotopy_inverse(&f), Err(ChainError::NotQuasiIso)));
    }

    #[test]
    fn inverse_of_inclusion_into_acyclic_sum() {
        let z = Arc::new(FreeComplex::new("Z", vec![Generator::new("x", 0)], []).unwrap());
        let gens = vec![Generator::new("x", 0), Generator::new("u", 0), Generator::new("v", 1)];
        let big = Arc::new(FreeComplex::new("Z+acyc", gens, [(2, 1, int(1))]).unwrap());
        let f = ChainMap::new(z.clone(), big.clone(), 0, [(0, 0, int(1))]).unwrap();
        let inv = homotopy_inverse(&f).unwrap();
        assert_eq!(inv.g.column(0), &SparseVec::from([(0, int(1))]));
        assert!(inv.g.column(1).is_empty());
        assert!(!inv.h_tgt.is_zero());
    }

    #[test]
    fn basis_classifies_torsion() {
        let c = times(6);
        let hb = c.homology_basis();
        assert_eq!(hb.count(1), 1);
        assert_eq!(hb.order(1, 0), &int(6));
        let b = SparseVec::from([(1, int(6))]);
        assert!(hb.is_boundary(1, &b));
        assert_eq!(hb.classify(1, &SparseVec::from([(1, int(7))])), vec![int(1)]);
    }

    #[test]
    fn find_preimage_solves() {
        let c = times(3);
        assert_eq!(find_preimage(&c, &SparseVec::from([(1, int(6))])), Some(SparseVec::from([(0, int(2))])));
        assert_eq!(find_preimage(&c, &SparseVec::from([(1, int(2))])), None);
    }
}
