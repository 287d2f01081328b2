//! Finite simplicial sets presented by their nondegenerate simplices, posets and their nerves,
//! terminal-vertex cones, barycentric subdivision, and exhaustive horn-extension diagnostics.

use crate::chains::{ChainError, FreeComplex, Generator};
use num_bigint::BigInt;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("face {face} of simplex {name} (dimension {dim}) is out of range")]
    FaceOutOfRange { name: String, dim: usize, face: usize },
    #[error("simplex {name} has {got} faces, expected {expected}")]
    FaceCount { name: String, got: usize, expected: usize },
    #[error("simplicial identity d_{i} d_{j} = d_{jm} d_{i} fails on {name}", jm = j - 1)]
    Identity { name: String, i: usize, j: usize },
    #[error("relation {0} <= {1} and {1} <= {0} between distinct elements")]
    NotAntisymmetric(String, String),
    #[error("unknown element or vertex `{0}`")]
    Unknown(String),
    #[error("simplex {0:?} is listed twice")]
    Duplicate(Vec<usize>),
    #[error("dimension bound {0} exceeds the search cap of 4")]
    DimensionBound(usize),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A finite simplicial set given by its nondegenerate simplices and their faces. Faces of
/// nondegenerate simplices are required to be nondegenerate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialSet {
    label: String,
    names: Vec<Vec<String>>,
    faces: Vec<Vec<Vec<usize>>>,
}

/// A simplex of any dimension in Eilenberg–Zilber normal form: a nondegenerate base simplex and a
/// monotone surjection from `[dim]` onto `[base_dim]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Simplex {
    pub base_dim: usize,
    pub base: usize,
    pub surj: Vec<usize>,
}

impl Simplex {
    pub fn nondegenerate(dim: usize, idx: usize) -> Self {
        Simplex { base_dim: dim, base: idx, surj: (0..=dim).collect() }
    }

    pub fn dim(&self) -> usize {
        self.surj.len() - 1
    }

    pub fn is_degenerate(&self) -> bool {
        self.dim() != self.base_dim
    }
}

impl SimplicialSet {
    /// `higher[n - 1]` lists the `n`-simplices as (name, faces `d_0..d_n`).
    pub fn new(label: impl Into<String>, vertices: Vec<String>, higher: Vec<Vec<(String, Vec<usize>)>>) -> Result<Self, SimplicialError> {
        let mut names = vec![vertices];
        let mut faces = vec![vec![vec![]; names[0].len()]];
        for level in higher {
            let n = names.len();
            let mut nm = Vec::new();
            let mut fc = Vec::new();
            for (name, f) in level {
                if f.len() != n + 1 {
                    return Err(SimplicialError::FaceCount { name, got: f.len(), expected: n + 1 });
                }
                if let Some(face) = f.iter().find(|x| **x >= names[n - 1].len()) {
                    return Err(SimplicialError::FaceOutOfRange { name, dim: n, face: *face });
                }
                nm.push(name);
                fc.push(f);
            }
            names.push(nm);
            faces.push(fc);
        }
        while names.len() > 1 && names.last().is_some_and(|l| l.is_empty()) {
            names.pop();
            faces.pop();
        }
        let s = SimplicialSet { label: label.into(), names, faces };
        s.check_identities()?;
        Ok(s)
    }

    fn check_identities(&self) -> Result<(), SimplicialError> {
        for n in 2..self.names.len() {
            for k in 0..self.names[n].len() {
                for j in 1..=n {
                    for i in 0..j {
                        let a = self.face(n - 1, self.face(n, k, j), i);
                        let b = self.face(n - 1, self.face(n, k, i), j - 1);
                        if a != b {
                            return Err(SimplicialError::Identity { name: self.names[n][k].clone(), i, j });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Simplicial set whose simplices are determined by their vertex lists.
    pub fn from_vertex_lists(label: impl Into<String>, vertices: Vec<String>, simplices: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        let mut by_dim: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new()];
        for v in 0..vertices.len() {
            by_dim[0].insert(vec![v]);
        }
        for s in simplices {
            if let Some(v) = s.iter().find(|v| **v >= vertices.len()) {
                return Err(SimplicialError::Unknown(v.to_string()));
            }
            close_up(s, &mut by_dim);
        }
        let index: Vec<HashMap<Vec<usize>, usize>> =
            by_dim.iter().map(|l| l.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect()).collect();
        let mut higher = Vec::new();
        for n in 1..by_dim.len() {
            let level = by_dim[n]
                .iter()
                .map(|s| {
                    let name = s.iter().map(|v| vertices[*v].as_str()).collect::<Vec<_>>().join(",");
                    let f = (0..=n)
                        .map(|i| {
                            let mut t = s.clone();
                            t.remove(i);
                            index[n - 1][&t]
                        })
                        .collect();
                    (format!("[{name}]"), f)
                })
                .collect();
            higher.push(level);
        }
        SimplicialSet::new(label, vertices, higher)
    }

    /// Ordered simplicial complex on `n_vertices` vertices named `0, 1, …`.
    pub fn complex(label: impl Into<String>, n_vertices: usize, simplices: &[Vec<usize>]) -> Result<Self, SimplicialError> {
        let vertices = (0..n_vertices).map(|v| v.to_string()).collect();
        let mut sorted = Vec::new();
        for s in simplices {
            let mut t = s.clone();
            t.sort();
            t.dedup();
            sorted.push(t);
        }
        Self::from_vertex_lists(label, vertices, &sorted)
    }

    pub fn standard_simplex(n: usize) -> Self {
        Self::complex(format!("Δ^{n}"), n + 1, &[(0..=n).collect()]).expect("standard simplex")
    }

    pub fn boundary_simplex(n: usize) -> Self {
        let facets: Vec<Vec<usize>> =
            (0..=n).map(|i| (0..=n).filter(|v| *v != i).collect()).filter(|f: &Vec<usize>| !f.is_empty()).collect();
        Self::complex(format!("∂Δ^{n}"), n + 1, &facets).expect("boundary")
    }

    pub fn horn(n: usize, i: usize) -> Self {
        let facets: Vec<Vec<usize>> = (0..=n).filter(|j| *j != i).map(|j| (0..=n).filter(|v| *v != j).collect()).collect();
        Self::complex(format!("Λ^{n}_{i}"), n + 1, &facets).expect("horn")
    }

    pub fn empty() -> Self {
        SimplicialSet { label: "∅".into(), names: vec![vec![]], faces: vec![vec![]] }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Top dimension with a nondegenerate simplex (0 for the empty set).
    pub fn dim(&self) -> usize {
        self.names.len() - 1
    }

    pub fn count(&self, n: usize) -> usize {
        self.names.get(n).map_or(0, |l| l.len())
    }

    pub fn name(&self, n: usize, k: usize) -> &str {
        &self.names[n][k]
    }

    pub fn find(&self, name: &str) -> Option<(usize, usize)> {
        self.names.iter().enumerate().find_map(|(n, l)| l.iter().position(|x| x == name).map(|k| (n, k)))
    }

    pub fn total_count(&self) -> usize {
        self.names.iter().map(|l| l.len()).sum()
    }

    /// `d_i` of the nondegenerate `n`-simplex `k`.
    pub fn face(&self, n: usize, k: usize, i: usize) -> usize {
        self.faces[n][k][i]
    }

    pub fn faces_of(&self, n: usize, k: usize) -> &[usize] {
        &self.faces[n][k]
    }

    pub fn vertex(&self, n: usize, k: usize, j: usize) -> usize {
        if n == 0 {
            k
        } else if j < n {
            self.vertex(n - 1, self.face(n, k, n), j)
        } else {
            self.vertex(n - 1, self.face(n, k, 0), j - 1)
        }
    }

    pub fn vertices(&self, n: usize, k: usize) -> Vec<usize> {
        (0..=n).map(|j| self.vertex(n, k, j)).collect()
    }

    /// Face of a nondegenerate simplex spanned by the sorted vertex positions `keep`.
    pub fn subface(&self, n: usize, k: usize, keep: &[usize]) -> usize {
        let mut cur = k;
        let mut dim = n;
        for p in (0..=n).rev() {
            if !keep.contains(&p) {
                cur = self.face(dim, cur, p);
                dim -= 1;
            }
        }
        cur
    }

    pub fn front(&self, n: usize, k: usize, m: usize) -> usize {
        self.subface(n, k, &(0..=m).collect::<Vec<_>>())
    }

    pub fn back(&self, n: usize, k: usize, m: usize) -> usize {
        self.subface(n, k, &(m..=n).collect::<Vec<_>>())
    }

    /// Normal form of the simplex `σ ∘ map` for a monotone `map: [p] → [n]`.
    pub fn compose(&self, n: usize, k: usize, map: &[usize]) -> Simplex {
        let image: Vec<usize> = map.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let base = self.subface(n, k, &image);
        let surj = map.iter().map(|v| image.iter().position(|x| x == v).expect("in image")).collect();
        Simplex { base_dim: image.len() - 1, base, surj }
    }

    pub fn simplex_face(&self, s: &Simplex, i: usize) -> Simplex {
        let mut surj = s.surj.clone();
        let v = surj.remove(i);
        if surj.contains(&v) {
            return Simplex { base_dim: s.base_dim, base: s.base, surj };
        }
        let base = self.face(s.base_dim, s.base, v);
        let surj = surj.into_iter().map(|x| if x > v { x - 1 } else { x }).collect();
        Simplex { base_dim: s.base_dim - 1, base, surj }
    }

    /// Restriction of a simplex along a monotone map into its vertex set.
    pub fn simplex_compose(&self, s: &Simplex, map: &[usize]) -> Simplex {
        let inner: Vec<usize> = map.iter().map(|j| s.surj[*j]).collect();
        self.compose(s.base_dim, s.base, &inner)
    }

    pub fn simplex_vertex(&self, s: &Simplex, j: usize) -> usize {
        self.vertex(s.base_dim, s.base, s.surj[j])
    }

    pub fn simplex_name(&self, s: &Simplex) -> String {
        if s.is_degenerate() {
            let surj = s.surj.iter().map(|x| x.to_string()).collect::<String>();
            format!("s{surj}{}", self.name(s.base_dim, s.base))
        } else {
            self.name(s.base_dim, s.base).to_string()
        }
    }

    /// Every simplex of dimension `n`, degenerate ones included.
    pub fn all_simplices(&self, n: usize) -> Vec<Simplex> {
        let mut out = Vec::new();
        for m in 0..=n.min(self.dim()) {
            for surj in surjections(n, m) {
                for k in 0..self.count(m) {
                    out.push(Simplex { base_dim: m, base: k, surj: surj.clone() });
                }
            }
        }
        out
    }

    /// Simplicial chains with `d = Σ (-1)^i d_i`, graded by dimension mod 2.
    pub fn chains(&self) -> Result<FreeComplex, SimplicialError> {
        let mut gens = Vec::new();
        let mut offset = Vec::new();
        for n in 0..=self.dim() {
            offset.push(gens.len());
            for k in 0..self.count(n) {
                gens.push(Generator::new(self.name(n, k), (n % 2) as u8));
            }
        }
        let mut entries = Vec::new();
        for n in 1..=self.dim() {
            for k in 0..self.count(n) {
                for i in 0..=n {
                    let s = if i % 2 == 0 { 1 } else { -1 };
                    entries.push((offset[n - 1] + self.face(n, k, i), offset[n] + k, BigInt::from(s)));
                }
            }
        }
        Ok(FreeComplex::new(format!("C({})", self.label), gens, entries)?)
    }

    /// Generator offset of each dimension in [`SimplicialSet::chains`].
    pub fn chain_offsets(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut acc = 0;
        for n in 0..=self.dim() {
            out.push(acc);
            acc += self.count(n);
        }
        out
    }

    /// Sub-simplicial set on the marked simplices, which must be closed under faces; also returns
    /// the index of each kept simplex in the restriction.
    pub fn restrict(
        &self,
        keep: &[Vec<bool>],
        label: impl Into<String>,
    ) -> Result<(SimplicialSet, Vec<Vec<Option<usize>>>), SimplicialError> {
        let mut new_index: Vec<Vec<Option<usize>>> = Vec::new();
        for n in 0..=self.dim() {
            let mut c = 0;
            let row = (0..self.count(n))
                .map(|k| {
                    if keep.get(n).and_then(|r| r.get(k)).copied().unwrap_or(false) {
                        c += 1;
                        Some(c - 1)
                    } else {
                        None
                    }
                })
                .collect();
            new_index.push(row);
        }
        let vertices = (0..self.count(0)).filter(|v| new_index[0][*v].is_some()).map(|v| self.names[0][v].clone()).collect();
        let mut higher = Vec::new();
        for n in 1..=self.dim() {
            let mut level = Vec::new();
            for k in 0..self.count(n) {
                if new_index[n][k].is_none() {
                    continue;
                }
                let mut f = Vec::new();
                for &x in &self.faces[n][k] {
                    match new_index[n - 1][x] {
                        Some(y) => f.push(y),
                        None => return Err(SimplicialError::Unknown(self.names[n - 1][x].clone())),
                    }
                }
                level.push((self.names[n][k].clone(), f));
            }
            higher.push(level);
        }
        Ok((SimplicialSet::new(label, vertices, higher)?, new_index))
    }
}

fn close_up(s: &[usize], by_dim: &mut Vec<BTreeSet<Vec<usize>>>) {
    let n = s.len() - 1;
    while by_dim.len() <= n {
        by_dim.push(BTreeSet::new());
    }
    if !by_dim[n].insert(s.to_vec()) || n == 0 {
        return;
    }
    for i in 0..=n {
        let mut t = s.to_vec();
        t.remove(i);
        close_up(&t, by_dim);
    }
}

/// Monotone surjections `[n] → [m]`, in lexicographic order.
pub fn surjections(n: usize, m: usize) -> Vec<Vec<usize>> {
    if m > n {
        return vec![];
    }
    let mut out = Vec::new();
    let mut cur = vec![0];
    fn rec(n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n + 1 {
            if *cur.last().expect("nonempty") == m {
                out.push(cur.clone());
            }
            return;
        }
        let last = *cur.last().expect("nonempty");
        for next in [last, last + 1] {
            if next <= m && m - next <= n - cur.len() {
                cur.push(next);
                rec(n, m, cur, out);
                cur.pop();
            }
        }
    }
    rec(n, m, &mut cur, &mut out);
    out
}

/// Finite partial order given by a reflexive-transitive closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Poset {
    pub elements: Vec<String>,
    le: Vec<Vec<bool>>,
}

impl Poset {
    /// From covering (or any generating) relations `a ≤ b`.
    pub fn new(elements: Vec<String>, relations: &[(usize, usize)]) -> Result<Self, SimplicialError> {
        let n = elements.len();
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in relations {
            if a >= n || b >= n {
                return Err(SimplicialError::Unknown(format!("{a} <= {b}")));
            }
            le[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if le[i][k] {
                    for j in 0..n {
                        if le[k][j] {
                            le[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if le[i][j] && le[j][i] {
                    return Err(SimplicialError::NotAntisymmetric(elements[i].clone(), elements[j].clone()));
                }
            }
        }
        Ok(Poset { elements, le })
    }

    pub fn from_names(elements: &[&str], relations: &[(&str, &str)]) -> Result<Self, SimplicialError> {
        let names: Vec<String> = elements.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| names.iter().position(|x| x == s).ok_or_else(|| SimplicialError::Unknown(s.into()));
        let rel = relations.iter().map(|(a, b)| Ok((idx(a)?, idx(b)?))).collect::<Result<Vec<_>, SimplicialError>>()?;
        Poset::new(names, &rel)
    }

    /// Chain `a_0 < a_1 < … < a_n`.
    pub fn chain(n: usize) -> Self {
        let rel: Vec<(usize, usize)> = (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        Poset::new((0..n).map(|i| i.to_string()).collect(), &rel).expect("chain")
    }

    /// Nonempty subsets of `{1..m}` ordered by reverse inclusion.
    pub fn nonempty_subsets(m: usize) -> Self {
        let subsets: Vec<u32> = (1..(1u32 << m)).collect();
        let names = subsets
            .iter()
            .map(|s| format!("{{{}}}", (0..m).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let mut rel = Vec::new();
        for (i, a) in subsets.iter().enumerate() {
            for (j, b) in subsets.iter().enumerate() {
                if i != j && a & b == *b {
                    rel.push((i, j));
                }
            }
        }
        Poset::new(names, &rel).expect("subset poset")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a][b]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|x| x == name)
    }

    pub fn terminal(&self) -> Option<usize> {
        (0..self.len()).find(|t| (0..self.len()).all(|x| self.le(x, *t)))
    }

    /// Covering relations, in a stable order.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.le(a, b) && !(0..n).any(|c| c != a && c != b && self.le(a, c) && self.le(c, b)) {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Nerve: `n`-simplices are chains `σ_0 < ⋯ < σ_n`.
pub fn nerve_of_poset(p: &Poset) -> SimplicialSet {
    let mut chains = Vec::new();
    fn extend(p: &Poset, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        let last = *cur.last().expect("nonempty");
        for next in 0..p.len() {
            if next != last && p.le(last, next) {
                cur.push(next);
                extend(p, cur, out);
                cur.pop();
            }
        }
    }
    for v in 0..p.len() {
        extend(p, &mut vec![v], &mut chains);
    }
    SimplicialSet::from_vertex_lists(format!("N({})", p.elements.join(" ")), p.elements.clone(), &chains).expect("nerve")
}

/// Position of each nondegenerate simplex of `N(Σ)` as its chain of poset elements.
pub fn nerve_chain(nerve: &SimplicialSet, n: usize, k: usize) -> Vec<usize> {
    nerve.vertices(n, k)
}

/// `K^▷`: adds a terminal vertex `∗` and the cone `σ∗` on every simplex.
pub fn cone_point(k: &SimplicialSet) -> SimplicialSet {
    let mut vertices: Vec<String> = k.names[0].clone();
    let star = vertices.len();
    vertices.push("∗".to_string());
    let top = if k.count(0) == 0 { 0 } else { k.dim() + 1 };
    let mut higher: Vec<Vec<(String, Vec<usize>)>> = vec![vec![]; top];
    // index of σ in the new set of its dimension; cones σ∗ follow after the old simplices
    let old = |n: usize| k.count(n);
    for n in 1..=top {
        let level = &mut higher[n - 1];
        if n <= k.dim() && k.count(0) > 0 {
            for j in 0..k.count(n) {
                level.push((k.names[n][j].clone(), k.faces[n][j].clone()));
            }
        }
        for j in 0..old(n - 1) {
            let name = format!("{}∗", k.names[n - 1][j]);
            let mut f = Vec::with_capacity(n + 1);
            if n == 1 {
                f.push(star);
            } else {
                for i in 0..n {
                    f.push(old(n - 1) + k.faces[n - 1][j][i]);
                }
            }
            let own = j;
            f.push(own);
            level.push((name, f));
        }
    }
    SimplicialSet::new(format!("{}▷", k.label), vertices, higher).expect("cone")
}

/// Index of the cone point and of the cones `σ∗` in [`cone_point`].
pub fn cone_index(k: &SimplicialSet, n: usize, j: usize) -> (usize, usize) {
    let offset = if n + 1 <= k.dim() && k.count(0) > 0 { k.count(n + 1) } else { 0 };
    (n + 1, offset + j)
}

pub fn cone_star(k: &SimplicialSet) -> usize {
    k.count(0)
}

/// Barycentric subdivision: a `p`-simplex is a chain `Δ^{a_p} ↪ ⋯ ↪ Δ^{a_0} → X` of face
/// inclusions, recorded as the top simplex and the nested position sets.
#[derive(Clone, Debug)]
pub struct Barycentric {
    pub set: SimplicialSet,
    /// Simplex `(dim, idx)` of X at each vertex of bX.
    pub cell: Vec<(usize, usize)>,
    pub vertex_of_cell: BTreeMap<(usize, usize), usize>,
    /// For each nondegenerate `p`-simplex: top simplex and position sets `S_0 ⊋ S_1 ⊋ ⋯ ⊋ S_p`.
    pub chains: Vec<Vec<((usize, usize), Vec<Vec<usize>>)>>,
    pub chain_index: HashMap<((usize, usize), Vec<Vec<usize>>), (usize, usize)>,
    /// Image under `r: bX → X`.
    pub r: Vec<Vec<Simplex>>,
}

pub fn barycentric_subdivision(x: &SimplicialSet) -> Barycentric {
    let mut cell = Vec::new();
    for n in 0..=x.dim() {
        for k in 0..x.count(n) {
            cell.push((n, k));
        }
    }
    let vertex_of_cell: BTreeMap<(usize, usize), usize> = cell.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let mut chains: Vec<Vec<((usize, usize), Vec<Vec<usize>>)>> = vec![];
    for &(n, k) in &cell {
        let full: Vec<usize> = (0..=n).collect();
        let mut stack = vec![vec![full]];
        while let Some(ch) = stack.pop() {
            let p = ch.len() - 1;
            while chains.len() <= p {
                chains.push(vec![]);
            }
            chains[p].push(((n, k), ch.clone()));
            let last = ch.last().expect("nonempty");
            for sub in proper_nonempty_subsets(last) {
                let mut next = ch.clone();
                next.push(sub);
                stack.push(next);
            }
        }
    }
    for level in chains.iter_mut() {
        level.sort();
    }
    let mut chain_index = HashMap::new();
    for (p, level) in chains.iter().enumerate() {
        for (j, c) in level.iter().enumerate() {
            chain_index.insert(c.clone(), (p, j));
        }
    }
    let vertex_names: Vec<String> = cell.iter().map(|(n, k)| format!("b{}", x.name(*n, *k))).collect();
    let mut higher = Vec::new();
    for p in 1..chains.len() {
        let level = chains[p]
            .iter()
            .map(|(top, sets)| {
                let f = (0..=p)
                    .map(|i| {
                        let (t, s) = bary_face(x, *top, sets, i);
                        chain_index[&(t, s)].1
                    })
                    .collect();
                let name = format!("b{}{}", x.name(top.0, top.1), sets[1..].iter().map(|s| format!("⊃{:?}", s)).collect::<String>());
                (name, f)
            })
            .collect();
        higher.push(level);
    }
    let set = SimplicialSet::new(format!("b{}", x.label), vertex_names, higher).expect("subdivision");
    let r = chains
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|((n, k), sets)| {
                    let map: Vec<usize> = sets.iter().map(|s| s[0]).collect();
                    x.compose(*n, *k, &map)
                })
                .collect()
        })
        .collect();
    Barycentric { set, cell, vertex_of_cell, chains, chain_index, r }
}

fn bary_face(x: &SimplicialSet, top: (usize, usize), sets: &[Vec<usize>], i: usize) -> ((usize, usize), Vec<Vec<usize>>) {
    if i == 0 {
        let s1 = &sets[1];
        let new_top = (s1.len() - 1, x.subface(top.0, top.1, s1));
        let rel = sets[1..].iter().map(|s| s.iter().map(|v| s1.iter().position(|w| w == v).expect("nested")).collect()).collect();
        (new_top, rel)
    } else {
        let mut s = sets.to_vec();
        s.remove(i);
        (top, s)
    }
}

fn proper_nonempty_subsets(s: &[usize]) -> Vec<Vec<usize>> {
    let m = s.len();
    (1..(1u64 << m) - 1).map(|mask| (0..m).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect()).collect()
}

impl Barycentric {
    /// Vertex of bX for the nondegenerate simplex `(n, k)` of X.
    pub fn vertex(&self, n: usize, k: usize) -> usize {
        self.vertex_of_cell[&(n, k)]
    }
}

/// Three-valued verdict for bounded searches.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HornRow {
    pub n: usize,
    pub i: usize,
    pub inner: bool,
    pub horn_maps: usize,
    pub unfilled: usize,
    pub fills: bool,
    /// Names of the faces of the first horn without a filler.
    pub witness: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HomotopyCategory {
    /// Relation `p ≤ q` iff there is a 1-simplex from p to q.
    Poset {
        relations: Vec<(String, String)>,
    },
    /// Morphism classes of edges up to the 2-simplex relation.
    Category {
        morphisms: Vec<(String, String, Vec<String>)>,
    },
    NotQuasiCategory,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilteredRow {
    pub shape: String,
    pub maps: usize,
    pub extended: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub label: String,
    pub max_dim: usize,
    pub horns: Vec<HornRow>,
    pub inner_horns: Verdict,
    pub boundary_extension: Verdict,
    pub edge_relation_transitive: bool,
    pub homotopy_category: HomotopyCategory,
    pub filtered: Vec<FilteredRow>,
    pub beyond_bound: Verdict,
}

const SEARCH_CAP: usize = 200_000;

/// Tuples `(x_j)_{j ∈ faces}` of `(n-1)`-simplices that are compatible as faces of an `n`-simplex.
fn compatible_face_tuples(x: &SimplicialSet, n: usize, faces: &[usize]) -> Vec<BTreeMap<usize, Simplex>> {
    let cands = x.all_simplices(n - 1);
    let mut out = Vec::new();
    let mut cur: BTreeMap<usize, Simplex> = BTreeMap::new();
    fn rec(
        x: &SimplicialSet,
        faces: &[usize],
        pos: usize,
        cands: &[Simplex],
        cur: &mut BTreeMap<usize, Simplex>,
        out: &mut Vec<BTreeMap<usize, Simplex>>,
    ) {
        if out.len() > SEARCH_CAP {
            return;
        }
        if pos == faces.len() {
            out.push(cur.clone());
            return;
        }
        let k = faces[pos];
        for c in cands {
            // d_j x_k = d_{k-1} x_j for j < k
            let ok = cur.iter().all(|(j, xj)| *j >= k || x.simplex_face(c, *j) == x.simplex_face(xj, k - 1));
            if ok {
                cur.insert(k, c.clone());
                rec(x, faces, pos + 1, cands, cur, out);
                cur.remove(&k);
            }
        }
    }
    rec(x, faces, 0, &cands, &mut cur, &mut out);
    out
}

fn extension_rows(x: &SimplicialSet, n: usize, omit: Option<usize>) -> (usize, usize, Option<Vec<String>>) {
    let faces: Vec<usize> = (0..=n).filter(|j| Some(*j) != omit).collect();
    let filled: BTreeSet<Vec<Simplex>> = x.all_simplices(n).iter().map(|y| faces.iter().map(|j| x.simplex_face(y, *j)).collect()).collect();
    let tuples = compatible_face_tuples(x, n, &faces);
    let mut unfilled = 0;
    let mut witness = None;
    for t in &tuples {
        let key: Vec<Simplex> = t.values().cloned().collect();
        if !filled.contains(&key) {
            unfilled += 1;
            if witness.is_none() {
                witness = Some(key.iter().map(|s| x.simplex_name(s)).collect());
            }
        }
    }
    (tuples.len(), unfilled, witness)
}

/// Simplicial maps `K → X`, as images of the nondegenerate simplices of K.
fn simplicial_maps(k: &SimplicialSet, x: &SimplicialSet) -> Option<Vec<Vec<Vec<Simplex>>>> {
    let mut out = Vec::new();
    let order: Vec<(usize, usize)> = (0..=k.dim()).flat_map(|n| (0..k.count(n)).map(move |j| (n, j))).collect();
    let cands: Vec<Vec<Simplex>> = (0..=k.dim()).map(|n| x.all_simplices(n)).collect();
    let mut cur: Vec<Vec<Option<Simplex>>> = (0..=k.dim()).map(|n| vec![None; k.count(n)]).collect();
    fn rec(
        k: &SimplicialSet,
        x: &SimplicialSet,
        order: &[(usize, usize)],
        pos: usize,
        cands: &[Vec<Simplex>],
        cur: &mut Vec<Vec<Option<Simplex>>>,
        out: &mut Vec<Vec<Vec<Simplex>>>,
    ) -> bool {
        if out.len() > SEARCH_CAP {
            return false;
        }
        if pos == order.len() {
            out.push(cur.iter().map(|l| l.iter().map(|s| s.clone().expect("assigned")).collect()).collect());
            return true;
        }
        let (n, j) = order[pos];
        for c in &cands[n] {
            let ok = n == 0
                || (0..=n).all(|i| {
                    let f = k.face(n, j, i);
                    cur[n - 1][f].as_ref().is_some_and(|img| *img == x.simplex_face(c, i))
                });
            if ok {
                cur[n][j] = Some(c.clone());
                if !rec(k, x, order, pos + 1, cands, cur, out) {
                    return false;
                }
                cur[n][j] = None;
            }
        }
        true
    }
    rec(k, x, &order, 0, &cands, &mut cur, &mut out).then_some(out)
}

/// Whether a map `K → X` extends over `K^▷`.
fn extends_to_cone(k: &SimplicialSet, x: &SimplicialSet, map: &[Vec<Simplex>]) -> bool {
    if k.count(0) == 0 {
        return x.count(0) > 0;
    }
    let order: Vec<(usize, usize)> = (0..=k.dim()).flat_map(|n| (0..k.count(n)).map(move |j| (n, j))).collect();
    let cands: Vec<Vec<Simplex>> = (0..=k.dim() + 1).map(|n| x.all_simplices(n)).collect();
    for star in 0..x.count(0) {
        let star_s = Simplex::nondegenerate(0, star);
        let mut cone: Vec<Vec<Option<Simplex>>> = (0..=k.dim()).map(|n| vec![None; k.count(n)]).collect();
        fn rec(
            k: &SimplicialSet,
            x: &SimplicialSet,
            map: &[Vec<Simplex>],
            order: &[(usize, usize)],
            pos: usize,
            cands: &[Vec<Simplex>],
            star: &Simplex,
            cone: &mut Vec<Vec<Option<Simplex>>>,
        ) -> bool {
            if pos == order.len() {
                return true;
            }
            let (n, j) = order[pos];
            for c in &cands[n + 1] {
                // faces of σ∗: d_i = (d_i σ)∗ for i ≤ n (or ∗ when n = 0), d_{n+1} = σ
                if x.simplex_face(c, n + 1) != map[n][j] {
                    continue;
                }
                let ok = if n == 0 {
                    x.simplex_face(c, 0) == *star
                } else {
                    (0..=n).all(|i| cone[n - 1][k.face(n, j, i)].as_ref().is_some_and(|f| *f == x.simplex_face(c, i)))
                };
                if ok {
                    cone[n][j] = Some(c.clone());
                    if rec(k, x, map, order, pos + 1, cands, star, cone) {
                        return true;
                    }
                    cone[n][j] = None;
                }
            }
            false
        }
        if rec(k, x, map, &order, 0, &cands, &star_s, &mut cone) {
            return true;
        }
    }
    false
}

pub fn simplicial_structure_report(
    x: &SimplicialSet,
    max_dim: usize,
    shapes: &[SimplicialSet],
) -> Result<StructureReport, SimplicialError> {
    if max_dim > 4 {
        return Err(SimplicialError::DimensionBound(max_dim));
    }
    let mut horns = Vec::new();
    let mut inner_ok = true;
    for n in 1..=max_dim {
        for i in 0..=n {
            let (maps, unfilled, witness) = extension_rows(x, n, Some(i));
            let inner = 0 < i && i < n;
            if inner && unfilled > 0 {
                inner_ok = false;
            }
            horns.push(HornRow { n, i, inner, horn_maps: maps, unfilled, fills: unfilled == 0, witness });
        }
    }
    let mut boundary_ok = true;
    for n in 2..=max_dim {
        if extension_rows(x, n, None).1 > 0 {
            boundary_ok = false;
        }
    }
    let nv = x.count(0);
    let edge = |p: usize, q: usize| p == q || (0..x.count(1)).any(|e| x.vertex(1, e, 0) == p && x.vertex(1, e, 1) == q);
    let rel: Vec<Vec<bool>> = (0..nv).map(|p| (0..nv).map(|q| edge(p, q)).collect()).collect();
    let transitive = (0..nv).all(|p| (0..nv).all(|q| (0..nv).all(|r| !(rel[p][q] && rel[q][r]) || rel[p][r])));
    let homotopy_category = if boundary_ok && transitive {
        let mut relations = Vec::new();
        for p in 0..nv {
            for q in 0..nv {
                if rel[p][q] {
                    relations.push((x.name(0, p).to_string(), x.name(0, q).to_string()));
                }
            }
        }
        HomotopyCategory::Poset { relations }
    } else if inner_ok {
        HomotopyCategory::Category { morphisms: edge_classes(x) }
    } else {
        HomotopyCategory::NotQuasiCategory
    };
    let mut filtered = Vec::new();
    for k in shapes {
        let row = match simplicial_maps(k, x) {
            None => FilteredRow { shape: k.label().to_string(), maps: SEARCH_CAP, extended: 0, verdict: Verdict::Undetermined },
            Some(maps) => {
                let extended = maps.iter().filter(|m| extends_to_cone(k, x, m)).count();
                let verdict = if extended == maps.len() { Verdict::True } else { Verdict::False };
                FilteredRow { shape: k.label().to_string(), maps: maps.len(), extended, verdict }
            }
        };
        filtered.push(row);
    }
    let inner_horns = if inner_ok { Verdict::Undetermined } else { Verdict::False };
    let boundary_extension = if boundary_ok { Verdict::Undetermined } else { Verdict::False };
    Ok(StructureReport {
        label: x.label().to_string(),
        max_dim,
        horns,
        inner_horns,
        boundary_extension,
        edge_relation_transitive: transitive,
        homotopy_category,
        filtered,
        beyond_bound: Verdict::Undetermined,
    })
}

/// Edges (degenerate ones included) grouped by `f ~ g` iff some 2-simplex has faces `(s_0 y, g, f)`.
fn edge_classes(x: &SimplicialSet) -> Vec<(String, String, Vec<String>)> {
    let edges = x.all_simplices(1);
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn root(p: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for t in x.all_simplices(2) {
        let d0 = x.simplex_face(&t, 0);
        if !d0.is_degenerate() {
            continue;
        }
        let f = edges.iter().position(|e| *e == x.simplex_face(&t, 2)).expect("edge");
        let g = edges.iter().position(|e| *e == x.simplex_face(&t, 1)).expect("edge");
        let (a, b) = (root(&mut parent, f), root(&mut parent, g));
        parent[a] = b;
    }
    let mut classes: BTreeMap<(usize, usize, usize), Vec<String>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        let r = root(&mut parent, i);
        let key = (x.simplex_vertex(e, 0), x.simplex_vertex(e, 1), r);
        classes.entry(key).or_default().push(x.simplex_name(e));
    }
    classes.into_iter().map(|((p, q, _), names)| (x.name(0, p).to_string(), x.name(0, q).to_string(), names)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::HomologyProfile;

    fn torus() -> SimplicialSet {
        let v = |i: usize, j: usize| (i % 3) * 3 + (j % 3);
        let mut tris = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                tris.push(vec![v(i, j), v(i + 1, j), v(i + 1, j + 1)]);
                tris.push(vec![v(i, j), v(i, j + 1), v(i + 1, j + 1)]);
            }
        }
        SimplicialSet::complex("T2", 9, &tris).unwrap()
    }

    #[test]
    fn classical_surfaces() {
        let circle = SimplicialSet::complex("S1", 3, &[vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(circle.chains().unwrap().homology(), HomologyProfile::free(1, 1));
        let sphere = SimplicialSet::boundary_simplex(3);
        assert_eq!(sphere.chains().unwrap().homology(), HomologyProfile::free(2, 0));
        let t = torus();
        assert_eq!((t.count(0), t.count(1), t.count(2)), (9, 27, 18));
        assert_eq!(t.chains().unwrap().homology(), HomologyProfile::free(2, 2));
    }

    #[test]
    fn nerves_of_small_posets() {
        let one = nerve_of_poset(&Poset::chain(1));
        assert_eq!((one.dim(), one.count(0)), (0, 1));
        let two = nerve_of_poset(&Poset::chain(2));
        assert_eq!((two.count(0), two.count(1), two.dim()), (2, 1, 1));
        let sub = nerve_of_poset(&Poset::nonempty_subsets(2));
        assert_eq!((sub.count(0), sub.count(1), sub.dim()), (3, 2, 1));
    }

    #[test]
    fn cones_on_small_sets() {
        let pt = cone_point(&SimplicialSet::standard_simplex(0));
        assert_eq!((pt.count(0), pt.count(1), pt.dim()), (2, 1, 1));
        let b = cone_point(&SimplicialSet::boundary_simplex(1));
        assert_eq!((b.count(0), b.count(1), b.dim()), (3, 2, 1));
        let e = cone_point(&SimplicialSet::empty());
        assert_eq!((e.count(0), e.dim()), (1, 0));
        let tri = cone_point(&SimplicialSet::standard_simplex(1));
        assert_eq!((tri.count(0), tri.count(1), tri.count(2)), (3, 3, 1));
        assert_eq!(tri.chains().unwrap().homology(), HomologyProfile::free(1, 0));
        let star = cone_star(&SimplicialSet::standard_simplex(1));
        let (n, j) = cone_index(&SimplicialSet::standard_simplex(1), 1, 0);
        assert_eq!(tri.vertices(n, j), vec![0, 1, star]);
    }

    #[test]
    fn subdivision_of_an_interval() {
        assert_eq!(barycentric_subdivision(&SimplicialSet::standard_simplex(0)).set.total_count(), 1);
        let b = barycentric_subdivision(&SimplicialSet::standard_simplex(1));
        assert_eq!((b.set.count(0), b.set.count(1), b.set.dim()), (3, 2, 1));
        let images: Vec<(bool, usize)> = b.r[1].iter().map(|s| (s.is_degenerate(), s.base_dim)).collect();
        assert_eq!(images, vec![(true, 0), (false, 1)]);
        let b2 = barycentric_subdivision(&SimplicialSet::standard_simplex(2));
        assert_eq!((b2.set.count(0), b2.set.count(1), b2.set.count(2)), (7, 12, 6));
        assert_eq!(b2.set.chains().unwrap().homology(), HomologyProfile::free(1, 0));
    }

    #[test]
    fn degenerate_faces_follow_the_identities() {
        let x = SimplicialSet::standard_simplex(2);
        for n in 2..5 {
            for s in x.all_simplices(n) {
                for j in 1..=n {
                    for i in 0..j {
                        let a = x.simplex_face(&x.simplex_face(&s, j), i);
                        let b = x.simplex_face(&x.simplex_face(&s, i), j - 1);
                        assert_eq!(a, b);
                    }
                }
            }
        }
        assert_eq!(x.all_simplices(2).len(), 10);
    }

    #[test]
    fn horn_filling_on_nerves_and_boundaries() {
        let p = Poset::from_names(&["a", "b", "c"], &[("a", "b"), ("b", "c")]).unwrap();
        let r = simplicial_structure_report(&nerve_of_poset(&p), 3, &[]).unwrap();
        assert!(r.horns.iter().filter(|h| h.inner).all(|h| h.fills));
        assert_eq!(r.inner_horns, Verdict::Undetermined);
        match r.homotopy_category {
            HomotopyCategory::Poset { relations } => assert_eq!(relations.len(), 6),
            other => panic!("{other:?}"),
        }
        let b = simplicial_structure_report(&SimplicialSet::boundary_simplex(2), 2, &[]).unwrap();
        let row = b.horns.iter().find(|h| h.n == 2 && h.i == 1).unwrap();
        assert!(!row.fills);
        assert_eq!(b.inner_horns, Verdict::False);
        assert!(simplicial_structure_report(&SimplicialSet::boundary_simplex(2), 5, &[]).is_err());
    }

    #[test]
    fn simplices_are_filtered_by_their_last_vertex() {
        let shapes = vec![SimplicialSet::empty(), SimplicialSet::standard_simplex(0), SimplicialSet::boundary_simplex(1)];
        for n in 0..3 {
            let r = simplicial_structure_report(&SimplicialSet::standard_simplex(n), 2, &shapes).unwrap();
            assert!(r.filtered.iter().all(|f| f.verdict == Verdict::True), "{:?}", r.filtered);
        }
        let two_points = SimplicialSet::boundary_simplex(1);
        let r = simplicial_structure_report(&two_points, 2, &shapes).unwrap();
        assert_eq!(r.filtered[2].verdict, Verdict::False);
    }

    #[test]
    fn restriction_keeps_a_subcomplex() {
        let x = SimplicialSet::standard_simplex(2);
        let keep = vec![vec![true, true, false], vec![true, false, false], vec![false]];
        let (sub, idx) = x.restrict(&keep, "edge").unwrap();
        assert_eq!((sub.count(0), sub.count(1)), (2, 1));
        assert_eq!(idx[0], vec![Some(0), Some(1), None]);
        let bad = vec![vec![true, false, false], vec![true, false, false], vec![false]];
        assert!(x.restrict(&bad, "bad").is_err());
    }

    #[test]
    fn surjection_counts() {
        assert_eq!(surjections(3, 1).len(), 3);
        assert_eq!(surjections(4, 2).len(), 6);
        assert_eq!(surjections(2, 2), vec![vec![0, 1, 2]]);
    }
}
