//! Morse flow lines on simplices and the cubes of broken flow lines between the first and last vertex.
//!
//! The simplex `Δ^n` carries coordinates `0 = x_0 ≤ x_1 ≤ ⋯ ≤ x_n ≤ 1`; vertex `i` is the point with
//! `x_j = 0` for `j ≤ n - i` and `x_j = 1` otherwise. Flow lines of `-V_n` run from vertex `n` at
//! `t = -∞` to vertex `0` at `t = +∞` and are parameterized by `b ∈ [0, ∞]^{n-1}`.

use crate::chains::{tensor_complexes, ChainError, ChainMap, FreeComplex, Generator};
use num_bigint::BigInt;
use num_traits::One;
use ode_solvers::{DVector, Dopri5, OutputType, System};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

/// Residual bound for flow lines against the vector field.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;
/// Distance below which a trajectory endpoint counts as having reached a vertex.
pub const VERTEX_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdamsError {
    #[error("cube coordinates must have length n - 1 = {expected}, got {got}")]
    Length { expected: usize, got: usize },
    #[error("cube coordinate {0} is negative or not a number")]
    Negative(f64),
    #[error("flow line is broken at vertex {0}; use the broken evaluation")]
    BrokenInput(usize),
    #[error("simplex dimension must be at least 1")]
    Dimension,
    #[error("index {index} out of range for n = {n}")]
    Index { index: usize, n: usize },
    #[error("simplicial map {0:?} is not monotone and endpoint-preserving")]
    NotEndpointPreserving(Vec<usize>),
    #[error("start point {0:?} is not strictly inside the chart")]
    StartOutside(Vec<f64>),
    #[error("step control failed: {0}")]
    StepControl(String),
    #[error("trajectory did not approach a vertex (distance {0:e})")]
    NoLimit(f64),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

/// A point of `[0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Ext {
    Finite(f64),
    Infinite(InfinitySymbol),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InfinitySymbol {
    #[serde(rename = "inf")]
    Inf,
}

impl Ext {
    pub const INF: Ext = Ext::Infinite(InfinitySymbol::Inf);

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match self {
            Ext::Finite(x) => Some(*x),
            Ext::Infinite(_) => None,
        }
    }

    pub fn parse(s: &str) -> Option<Ext> {
        match s.trim() {
            "inf" | "∞" => Some(Ext::INF),
            t => t.parse::<f64>().ok().map(Ext::Finite),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(x) => write!(f, "{}", sig12(*x)),
            Ext::Infinite(_) => write!(f, "inf"),
        }
    }
}

/// Point of the cube `[0, ∞]^{n-1}` parameterizing broken flow lines on `Δ^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubePoint {
    pub n: usize,
    pub b: Vec<Ext>,
}

impl CubePoint {
    pub fn new(n: usize, b: Vec<Ext>) -> Result<Self, AdamsError> {
        if n == 0 {
            return Err(AdamsError::Dimension);
        }
        if b.len() != n - 1 {
            return Err(AdamsError::Length { expected: n - 1, got: b.len() });
        }
        for x in &b {
            if let Ext::Finite(v) = x {
                if v.is_nan() || *v < 0.0 {
                    return Err(AdamsError::Negative(*v));
                }
            }
        }
        Ok(CubePoint { n, b })
    }

    pub fn finite(n: usize, b: &[f64]) -> Result<Self, AdamsError> {
        Self::new(n, b.iter().map(|x| Ext::Finite(*x)).collect())
    }

    /// Vertices `k` (1-based) where the flow line breaks.
    pub fn breaks(&self) -> Vec<usize> {
        self.b.iter().enumerate().filter(|(_, x)| x.is_infinite()).map(|(i, _)| i + 1).collect()
    }
}

/// The solution of `f(0) = 1/2`, `f' = sin(π f)`: `f(x) = (2/π) arctan(e^{πx})`.
pub fn flow_profile(x: f64) -> f64 {
    if x > 0.0 {
        1.0 - 2.0 / PI * (-PI * x).exp().atan()
    } else {
        2.0 / PI * (PI * x).exp().atan()
    }
}

pub fn flow_profile_derivative(x: f64) -> f64 {
    1.0 / (PI * x).cosh()
}

/// `F_n = Σ cos(π x_i)`.
pub fn morse_function(x: &[f64]) -> f64 {
    x.iter().map(|xi| (PI * xi).cos()).sum()
}

/// `V_n = Σ sin(π x_i) ∂/∂x_i`.
pub fn vector_field(x: &[f64]) -> Vec<f64> {
    x.iter().map(|xi| (PI * xi).sin()).collect()
}

pub fn vertex(n: usize, i: usize) -> Vec<f64> {
    (1..=n).map(|j| if j <= n - i { 0.0 } else { 1.0 }).collect()
}

/// Closest vertex and its Euclidean distance.
pub fn nearest_vertex(x: &[f64]) -> (usize, f64) {
    let n = x.len();
    (0..=n)
        .map(|i| {
            let d = vertex(n, i).iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (i, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("n + 1 vertices")
}

/// An unbroken flow line `ℓ(t) = (f(a_n - t), …, f(a_1 - t))`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowLine {
    pub n: usize,
    pub anchors: Vec<f64>,
}

impl FlowLine {
    /// Anchors from finite cube coordinates, normalized by `a_n = 0`.
    pub fn from_b(n: usize, b: &[f64]) -> Self {
        let mut anchors = vec![0.0; n];
        for i in (0..n.saturating_sub(1)).rev() {
            anchors[i] = anchors[i + 1] + b[i];
        }
        FlowLine { n, anchors }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.anchors.iter().rev().map(|a| flow_profile(a - t)).collect()
    }

    pub fn velocity(&self, t: f64) -> Vec<f64> {
        self.anchors.iter().rev().map(|a| -flow_profile_derivative(a - t)).collect()
    }

    /// `max_i |ℓ'(t) + V_n(ℓ(t))|` with `ℓ'` from a central difference at step `h`.
    pub fn residual(&self, t: f64, h: f64) -> f64 {
        let (p, m) = (self.eval(t + h), self.eval(t - h));
        let v = vector_field(&self.eval(t));
        p.iter().zip(&m).zip(&v).map(|((p, m), v)| ((p - m) / (2.0 * h) + v).abs()).fold(0.0, f64::max)
    }
}

pub fn flow_line(n: usize, b: &CubePoint, t: f64) -> Result<Vec<f64>, AdamsError> {
    if b.n != n {
        return Err(AdamsError::Length { expected: n.saturating_sub(1), got: b.b.len() });
    }
    if let Some(k) = b.breaks().first() {
        return Err(AdamsError::BrokenInput(*k));
    }
    let bs: Vec<f64> = b.b.iter().filter_map(Ext::finite).collect();
    Ok(FlowLine::from_b(n, &bs).eval(t))
}

/// One unbroken piece of a broken flow line, running through the face `Δ^{[from..to]}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPiece {
    pub from: usize,
    pub to: usize,
    pub line: FlowLine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BrokenFlowLine {
    pub n: usize,
    pub pieces: Vec<FlowPiece>,
}

impl BrokenFlowLine {
    /// Point of `Δ^n` on piece `k` at time `t`.
    pub fn eval(&self, k: usize, t: f64) -> Vec<f64> {
        let piece = &self.pieces[k];
        let n = self.n;
        let inner = piece.line.eval(t);
        let mut x = vec![0.0; n];
        for (j, xj) in x.iter_mut().enumerate() {
            let j1 = j + 1;
            *xj = if j1 <= n - piece.to {
                0.0
            } else if j1 > n - piece.from {
                1.0
            } else {
                inner[j1 - (n - piece.to) - 1]
            };
        }
        x
    }
}

pub fn broken_flow_line(b: &CubePoint) -> BrokenFlowLine {
    let mut cuts = vec![0];
    cuts.extend(b.breaks());
    cuts.push(b.n);
    let pieces = cuts
        .windows(2)
        .map(|w| {
            let (p, q) = (w[0], w[1]);
            let inner: Vec<f64> = (p + 1..q).map(|k| b.b[k - 1].finite().expect("finite between breaks")).collect();
            FlowPiece { from: p, to: q, line: FlowLine::from_b(q - p, &inner) }
        })
        .collect();
    BrokenFlowLine { n: b.n, pieces }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Along `-V_n`, towards vertex 0.
    Forward,
    /// Along `V_n`, towards vertex n.
    Backward,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub horizon: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions { horizon: 20.0, rtol: 1e-12, atol: 1e-14 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub limit_vertex: usize,
    pub distance: f64,
}

struct Field {
    sign: f64,
}

impl System<f64, DVector<f64>> for Field {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        for i in 0..y.len() {
            dy[i] = self.sign * (PI * y[i]).sin();
        }
    }
}

pub fn integrate_flow(start: &[f64], direction: Direction, opts: FlowOptions) -> Result<Trajectory, AdamsError> {
    let inside = start.iter().all(|x| *x > 0.0 && *x < 1.0) && start.windows(2).all(|w| w[0] <= w[1]);
    if start.is_empty() || !inside {
        return Err(AdamsError::StartOutside(start.to_vec()));
    }
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Backward => 1.0,
    };
    let y0 = DVector::from_vec(start.to_vec());
    let mut solver = Dopri5::new(Field { sign }, 0.0, opts.horizon, 0.0, y0, opts.rtol, opts.atol);
    solver.set_output(OutputType::Sparse);
    solver.integrate().map_err(|e| AdamsError::StepControl(e.to_string()))?;
    let times = solver.x_out().clone();
    let points: Vec<Vec<f64>> = solver.y_out().iter().map(|y| y.iter().copied().collect()).collect();
    let last = points.last().ok_or_else(|| AdamsError::StepControl("no accepted steps".into()))?;
    let (limit_vertex, distance) = nearest_vertex(last);
    if distance > VERTEX_TOLERANCE {
        return Err(AdamsError::NoLimit(distance));
    }
    Ok(Trajectory { times, points, limit_vertex, distance })
}

struct Profile;

impl System<f64, DVector<f64>> for Profile {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        dy[0] = (PI * y[0]).sin();
    }
}

/// Numerical solution of `f' = sin(π f)`, `f(0) = 1/2`, at `x`.
pub fn integrate_profile(x: f64) -> Result<f64, AdamsError> {
    if x == 0.0 {
        return Ok(0.5);
    }
    let mut solver = Dopri5::new(Profile, 0.0, x, 0.0, DVector::from_vec(vec![0.5]), 1e-13, 1e-15);
    solver.set_output(OutputType::Sparse);
    solver.integrate().map_err(|e| AdamsError::StepControl(e.to_string()))?;
    Ok(solver.y_out().last().map(|y| y[0]).unwrap_or(0.5))
}

/// Number of negative eigenvalues of the finite-difference Hessian of `F_n` at vertex `i`.
pub fn morse_index(n: usize, i: usize, h: f64) -> Result<usize, AdamsError> {
    if n == 0 {
        return Err(AdamsError::Dimension);
    }
    if i > n {
        return Err(AdamsError::Index { index: i, n });
    }
    let p = vertex(n, i);
    let at = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut q = p.clone();
        q[di] += si * h;
        q[dj] += sj * h;
        morse_function(&q)
    };
    let mut hess = vec![vec![0.0; n]; n];
    for a in 0..n {
        for b in 0..n {
            hess[a][b] = if a == b {
                let mut q = p.clone();
                q[a] += h;
                let fp = morse_function(&q);
                q[a] -= 2.0 * h;
                let fm = morse_function(&q);
                (fp - 2.0 * morse_function(&p) + fm) / (h * h)
            } else {
                (at(a, 1.0, b, 1.0) - at(a, 1.0, b, -1.0) - at(a, -1.0, b, 1.0) + at(a, -1.0, b, -1.0)) / (4.0 * h * h)
            };
        }
    }
    Ok(negative_inertia(hess))
}

/// Negative inertia of a symmetric matrix by symmetric Gaussian elimination.
fn negative_inertia(mut m: Vec<Vec<f64>>) -> usize {
    let n = m.len();
    let mut neg = 0;
    for k in 0..n {
        let piv = m[k][k];
        if piv < 0.0 {
            neg += 1;
        }
        if piv.abs() < 1e-12 {
            continue;
        }
        for i in k + 1..n {
            let f = m[i][k] / piv;
            for j in k..n {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    neg
}

/// Cells of the cube `[0, ∞]^{n-1}`: `0` is `b = 0`, `1` is `b = ∞`, `I` the interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    Zero,
    One,
    I,
}

impl Letter {
    fn symbol(self) -> char {
        match self {
            Letter::Zero => '0',
            Letter::One => '1',
            Letter::I => 'I',
        }
    }
}

pub type Word = Vec<Letter>;

pub fn word_id(w: &[Letter]) -> String {
    format!("[{}]", w.iter().map(|l| l.symbol()).collect::<String>())
}

pub fn parse_word(s: &str) -> Option<Word> {
    let inner = s.strip_prefix('[')?.strip_suffix(']')?;
    inner
        .chars()
        .map(|c| match c {
            '0' => Some(Letter::Zero),
            '1' => Some(Letter::One),
            'I' => Some(Letter::I),
            _ => None,
        })
        .collect()
}

/// All words of length `m` in base-3 order with the first letter most significant.
pub fn cube_words(m: usize) -> Vec<Word> {
    let total = 3usize.pow(m as u32);
    (0..total)
        .map(|mut k| {
            let mut w = vec![Letter::Zero; m];
            for slot in w.iter_mut().rev() {
                *slot = [Letter::Zero, Letter::One, Letter::I][k % 3];
                k /= 3;
            }
            w
        })
        .collect()
}

pub fn word_index(w: &[Letter]) -> usize {
    w.iter().fold(0, |acc, l| {
        acc * 3
            + match l {
                Letter::Zero => 0,
                Letter::One => 1,
                Letter::I => 2,
            }
    })
}

pub fn top_cell(m: usize) -> Word {
    vec![Letter::I; m]
}

/// Cubical boundary: `∂` replaces the `I` at position `j` by `1` minus `0`, with sign `(-1)^{#I before j}`.
pub fn cube_boundary(w: &[Letter]) -> Vec<(Word, i64)> {
    let mut out = Vec::new();
    let mut seen = 0;
    for (j, l) in w.iter().enumerate() {
        if *l == Letter::I {
            let s = if seen % 2 == 0 { 1 } else { -1 };
            let mut hi = w.to_vec();
            hi[j] = Letter::One;
            let mut lo = w.to_vec();
            lo[j] = Letter::Zero;
            out.push((hi, s));
            out.push((lo, -s));
            seen += 1;
        }
    }
    out
}

/// Cubical chains on the cube of broken flow lines of `Δ^n`; rank `3^{n-1}`.
pub fn cubical_chains(n: usize) -> Result<FreeComplex, AdamsError> {
    if n == 0 {
        return Err(AdamsError::Dimension);
    }
    let words = cube_words(n - 1);
    let gens = words.iter().map(|w| Generator::new(word_id(w), (w.iter().filter(|l| **l == Letter::I).count() % 2) as u8)).collect();
    let mut entries = Vec::new();
    for (s, w) in words.iter().enumerate() {
        for (v, c) in cube_boundary(w) {
            entries.push((word_index(&v), s, BigInt::from(c)));
        }
    }
    Ok(FreeComplex::new(format!("C(F(Δ^{n}))"), gens, entries)?)
}

/// Concatenation `F(Δ^{[0..k]}) × F(Δ^{[k..n]}) → F(Δ^n)` on cells: `u ⊗ v ↦ u 1 v`.
pub fn product_word(u: &[Letter], v: &[Letter]) -> Word {
    let mut w = u.to_vec();
    w.push(Letter::One);
    w.extend_from_slice(v);
    w
}

/// Inclusion of the face missing vertex `k`: insert `b_k = 0`.
pub fn face_word(w: &[Letter], k: usize) -> Word {
    let mut out = w.to_vec();
    out.insert(k - 1, Letter::Zero);
    out
}

/// Image of a cell under `f_*` for a monotone endpoint-preserving `f: Δ^r → Δ^q`, given as vertex images.
/// Target coordinate `s` is the sum of the source coordinates over `f^{-1}(s)`.
pub fn pushforward_word(f: &[usize], w: &[Letter]) -> Option<Word> {
    let r = f.len() - 1;
    let q = f[r];
    let mut used = vec![false; w.len()];
    let mut out = Vec::with_capacity(q.saturating_sub(1));
    for s in 1..q {
        let pre: Vec<usize> = (1..r).filter(|j| f[*j] == s).collect();
        let letters: Vec<Letter> = pre.iter().map(|j| w[j - 1]).collect();
        for j in &pre {
            used[j - 1] = true;
        }
        let n_i = letters.iter().filter(|l| **l == Letter::I).count();
        let has_inf = letters.contains(&Letter::One);
        out.push(match (has_inf, n_i) {
            (true, 0) => Letter::One,
            (false, 0) => Letter::Zero,
            (false, 1) => Letter::I,
            _ => return None,
        });
    }
    for (j, l) in w.iter().enumerate() {
        if !used[j] && *l == Letter::I {
            return None;
        }
    }
    Some(out)
}

pub fn check_endpoint_preserving(f: &[usize]) -> Result<(usize, usize), AdamsError> {
    let ok = f.len() >= 2 && f[0] == 0 && f.windows(2).all(|w| w[0] <= w[1]) && f[f.len() - 1] >= 1;
    if !ok {
        return Err(AdamsError::NotEndpointPreserving(f.to_vec()));
    }
    Ok((f.len() - 1, f[f.len() - 1]))
}

/// Structure maps between cubical chain complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CubeMapKind {
    Product { k: usize, n: usize },
    Face { k: usize, n: usize },
    Pushforward { f: Vec<usize> },
}

/// The structure map as an exact chain map, verified against both boundaries.
pub fn cube_structure_map(kind: &CubeMapKind) -> Result<ChainMap, AdamsError> {
    let one = BigInt::one;
    let map = match kind {
        CubeMapKind::Product { k, n } => {
            if *k == 0 || k >= n {
                return Err(AdamsError::Index { index: *k, n: *n });
            }
            let a = cubical_chains(*k)?;
            let b = cubical_chains(n - k)?;
            let src = Arc::new(tensor_complexes(&a, &b)?);
            let tgt = Arc::new(cubical_chains(*n)?);
            let (wa, wb) = (cube_words(k - 1), cube_words(n - k - 1));
            let mut entries = Vec::new();
            for (i, u) in wa.iter().enumerate() {
                for (j, v) in wb.iter().enumerate() {
                    entries.push((word_index(&product_word(u, v)), i * wb.len() + j, one()));
                }
            }
            ChainMap::new(src, tgt, 0, entries)?
        }
        CubeMapKind::Face { k, n } => {
            if *k == 0 || k >= n {
                return Err(AdamsError::Index { index: *k, n: *n });
            }
            let src = Arc::new(cubical_chains(n - 1)?);
            let tgt = Arc::new(cubical_chains(*n)?);
            let entries = cube_words(n - 2).iter().enumerate().map(|(s, w)| (word_index(&face_word(w, *k)), s, one())).collect::<Vec<_>>();
            ChainMap::new(src, tgt, 0, entries)?
        }
        CubeMapKind::Pushforward { f } => {
            let (r, q) = check_endpoint_preserving(f)?;
            let src = Arc::new(cubical_chains(r)?);
            let tgt = Arc::new(cubical_chains(q)?);
            let entries = cube_words(r - 1)
                .iter()
                .enumerate()
                .filter_map(|(s, w)| pushforward_word(f, w).map(|v| (word_index(&v), s, one())))
                .collect::<Vec<_>>();
            ChainMap::new(src, tgt, 0, entries)?
        }
    };
    Ok(map)
}

/// Decimal rendering with 12 significant digits.
pub fn sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{:.11}", x);
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chains::HomologyProfile;
    use proptest::prelude::*;

    #[test]
    fn profile_is_one_half_at_zero() {
        assert_eq!(flow_profile(0.0), 0.5);
        assert!((flow_profile(20.0) - 1.0).abs() < 1e-12);
        assert!(flow_profile(-20.0).abs() < 1e-12);
    }

    #[test]
    fn profile_matches_numerical_integration() {
        for x in [-10.0, -3.0, -1.0, -0.25, 0.5, 1.0, 2.5, 10.0] {
            let num = integrate_profile(x).unwrap();
            assert!((num - flow_profile(x)).abs() < 1e-9, "x = {x}: {num} vs {}", flow_profile(x));
        }
    }

    #[test]
    fn profile_solves_its_equation_on_a_grid() {
        let worst = (0..10_000)
            .map(|k| -10.0 + 20.0 * k as f64 / 9_999.0)
            .map(|x| (flow_profile_derivative(x) - (PI * flow_profile(x)).sin()).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn flow_lines_follow_the_field() {
        let l = FlowLine::from_b(1, &[]);
        assert_eq!(l.eval(l.anchors[0]), vec![0.5]);
        let b = CubePoint::finite(2, &[3.0]).unwrap();
        let line = FlowLine::from_b(2, &[3.0]);
        for k in 0..41 {
            let t = -10.0 + 0.5 * k as f64;
            assert_eq!(flow_line(2, &b, t).unwrap(), line.eval(t));
            assert!(line.residual(t, 1e-5) < RESIDUAL_TOLERANCE);
        }
        let diag = FlowLine::from_b(2, &[0.0]);
        for t in [-3.0, 0.0, 0.7, 4.0] {
            let x = diag.eval(t);
            assert_eq!(x[0], x[1]);
        }
    }

    #[test]
    fn broken_input_is_rejected() {
        let b = CubePoint::new(3, vec![Ext::Finite(1.0), Ext::INF]).unwrap();
        assert_eq!(flow_line(3, &b, 0.0), Err(AdamsError::BrokenInput(2)));
        let broken = broken_flow_line(&b);
        assert_eq!(broken.pieces.len(), 2);
        let late = broken.eval(0, 30.0);
        assert!(nearest_vertex(&late).0 == 0);
        let early = broken.eval(0, -30.0);
        assert_eq!(nearest_vertex(&early).0, 2);
        assert_eq!(nearest_vertex(&broken.eval(1, 30.0)).0, 2);
        assert_eq!(nearest_vertex(&broken.eval(1, -30.0)).0, 3);
    }

    #[test]
    fn integration_reaches_the_expected_vertices() {
        let line = FlowLine::from_b(2, &[1.0]);
        let start = line.eval(0.0);
        let back = integrate_flow(&start, Direction::Backward, FlowOptions::default()).unwrap();
        assert_eq!(back.limit_vertex, 2);
        let fwd = integrate_flow(&start, Direction::Forward, FlowOptions::default()).unwrap();
        assert_eq!(fwd.limit_vertex, 0);
        for (t, p) in fwd.times.iter().zip(&fwd.points) {
            let exact = line.eval(*t);
            assert!(exact.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-8), "t = {t}");
        }
        for (t, p) in back.times.iter().zip(&back.points) {
            let exact = line.eval(-*t);
            assert!(exact.iter().zip(p).all(|(a, b)| (a - b).abs() < 1e-8), "t = {t}");
        }
        assert!(integrate_flow(&[0.0, 0.5], Direction::Forward, FlowOptions::default()).is_err());
    }

    #[test]
    fn morse_index_counts_down_from_n() {
        for n in 1..=3 {
            for i in 0..=n {
                assert_eq!(morse_index(n, i, 1e-4).unwrap(), n - i, "n = {n}, vertex {i}");
            }
        }
    }

    #[test]
    fn cubical_ranks_and_homology() {
        for n in 1..=5 {
            let c = cubical_chains(n).unwrap();
            assert_eq!(c.rank(), 3usize.pow(n as u32 - 1));
            assert_eq!(c.homology(), HomologyProfile::free(1, 0));
        }
        assert_eq!(cubical_chains(1).unwrap().entries().len(), 0);
    }

    #[test]
    fn structure_maps_are_chain_maps() {
        for n in 2..=5 {
            for k in 1..n {
                cube_structure_map(&CubeMapKind::Product { k, n }).unwrap();
                let face = cube_structure_map(&CubeMapKind::Face { k, n }).unwrap();
                let coface: Vec<usize> = (0..n).map(|v| if v < k { v } else { v + 1 }).collect();
                let push = cube_structure_map(&CubeMapKind::Pushforward { f: coface }).unwrap();
                assert!(face.equals(&push));
            }
        }
    }

    #[test]
    fn faces_compose_to_the_double_face() {
        let n = 4;
        for j in 1..n - 1 {
            for k in j + 1..n {
                let inner = cube_structure_map(&CubeMapKind::Face { k: j, n: n - 1 }).unwrap();
                let outer = cube_structure_map(&CubeMapKind::Face { k, n }).unwrap();
                let composite = inner.then(&outer).unwrap();
                for (s, w) in cube_words(n - 3).iter().enumerate() {
                    let mut direct = w.clone();
                    direct.insert(j - 1, Letter::Zero);
                    direct.insert(k - 1, Letter::Zero);
                    assert_eq!(composite.column(s), &[(word_index(&direct), BigInt::one())].into_iter().collect());
                }
            }
        }
    }

    #[test]
    fn product_of_top_cells_is_the_broken_face() {
        for n in 2..=5 {
            let p = cube_structure_map(&CubeMapKind::Product { k: 1, n }).unwrap();
            let top_src = p.source.index_of(&format!("[]|{}", word_id(&top_cell(n - 2)))).unwrap();
            let mut expected = vec![Letter::One];
            expected.extend(top_cell(n - 2));
            let col = p.column(top_src);
            assert_eq!(col.len(), 1);
            assert_eq!(p.target.generator(*col.keys().next().unwrap()).id, word_id(&expected));
        }
    }

    #[test]
    fn collapsing_an_edge_of_the_triangle() {
        for f in [vec![0, 0, 1], vec![0, 1, 1]] {
            let m = cube_structure_map(&CubeMapKind::Pushforward { f }).unwrap();
            assert_eq!(m.source.rank(), 3);
            assert_eq!(m.target.rank(), 1);
            let images: Vec<usize> = (0..3).map(|s| m.column(s).len()).collect();
            assert_eq!(images, vec![1, 1, 0]);
        }
        assert!(cube_structure_map(&CubeMapKind::Pushforward { f: vec![1, 1, 2] }).is_err());
    }

    #[test]
    fn sig12_renders_twelve_digits() {
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(123.456), "123.456000000");
        assert_eq!(sig12(0.0), "0.00000000000");
    }

    fn monotone_map() -> impl Strategy<Value = Vec<usize>> {
        (1usize..5, 1usize..4).prop_flat_map(|(r, q)| {
            proptest::collection::vec(0..=q, r - 1).prop_map(move |mut inner| {
                inner.sort();
                let mut f = vec![0];
                f.extend(inner);
                f.push(q);
                f
            })
        })
    }

    proptest! {
        #[test]
        fn pushforwards_are_chain_maps_and_compose(f in monotone_map(), g in monotone_map()) {
            let m = cube_structure_map(&CubeMapKind::Pushforward { f: f.clone() });
            prop_assert!(m.is_ok());
            let q = f[f.len() - 1];
            let r2 = g.len() - 1;
            if r2 == q {
                let mg = cube_structure_map(&CubeMapKind::Pushforward { f: g.clone() }).unwrap();
                let gf: Vec<usize> = f.iter().map(|v| g[*v]).collect();
                let direct = cube_structure_map(&CubeMapKind::Pushforward { f: gf }).unwrap();
                prop_assert!(m.unwrap().then(&mg).unwrap().equals(&direct));
            }
        }

        #[test]
        fn distinct_cube_points_give_distinct_lines(b1 in proptest::collection::vec(0.0f64..6.0, 2), b2 in proptest::collection::vec(0.0f64..6.0, 2)) {
            let gap = b1.iter().zip(&b2).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            prop_assume!(gap > 1e-3);
            let x = FlowLine::from_b(3, &b1).eval(0.0);
            let y = FlowLine::from_b(3, &b2).eval(0.0);
            let dist = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            prop_assert!(dist > 1e-9);
        }
    }
}
