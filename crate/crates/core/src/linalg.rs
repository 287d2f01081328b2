//! Dense and sparse integer matrices, Smith normal form, and integer linear solving.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// Sparse integer vector keyed by basis index. Zero coefficients are never stored.
pub type SparseVec = BTreeMap<usize, BigInt>;

pub fn sv_add(v: &mut SparseVec, idx: usize, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    let remove = match v.get_mut(&idx) {
        Some(x) => {
            *x += c;
            x.is_zero()
        }
        None => {
            v.insert(idx, c.clone());
            false
        }
    };
    if remove {
        v.remove(&idx);
    }
}

pub fn sv_add_scaled(v: &mut SparseVec, w: &SparseVec, c: &BigInt) {
    if c.is_zero() {
        return;
    }
    for (i, x) in w {
        sv_add(v, *i, &(x * c));
    }
}

pub fn sv_scale(v: &SparseVec, c: &BigInt) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(i, x)| (*i, x * c)).collect()
}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, x) in row.iter().enumerate() {
                m.data[i * c + j] = BigInt::from(*x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: BigInt) {
        self.data[i * self.cols + j] = x;
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &BigInt) {
        self.data[i * self.cols + j] += x;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = BigInt::zero();
                for (j, x) in v.iter().enumerate() {
                    if !x.is_zero() {
                        let a = self.get(i, j);
                        if !a.is_zero() {
                            acc += a * x;
                        }
                    }
                }
                acc
            })
            .collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn row(&self, i: usize) -> Vec<BigInt> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    /// Rows `range` as a new matrix.
    pub fn row_block(&self, from: usize, to: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(to - from, self.cols);
        for i in from..to {
            for j in 0..self.cols {
                m.data[(i - from) * self.cols + j] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn col_block(&self, from: usize, to: usize) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, to - from);
        for i in 0..self.rows {
            for j in from..to {
                m.data[i * (to - from) + (j - from)] = self.get(i, j).clone();
            }
        }
        m
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.data[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        m
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let delta = s * q;
                self.data[dst * self.cols + j] -= delta;
            }
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = &self.data[i * self.cols + src];
            if !s.is_zero() {
                let delta = s * q;
                self.data[i * self.cols + dst] -= delta;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let x = &mut self.data[i * self.cols + j];
            *x = -std::mem::take(x);
        }
    }
}

/// Smith decomposition `u * m * v = s` with the inverses of `u` and `v` tracked alongside.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
    pub v_inv: IntMatrix,
    /// Nonzero invariant factors d_1 | d_2 | ... ; their count is the rank.
    pub diag: Vec<BigInt>,
    pub rows: usize,
    pub cols: usize,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.diag.len()
    }

    pub fn s_matrix(&self) -> IntMatrix {
        let mut s = IntMatrix::zeros(self.rows, self.cols);
        for (i, d) in self.diag.iter().enumerate() {
            s.set(i, i, d.clone());
        }
        s
    }
}

fn floor_div(a: &BigInt, b: &BigInt) -> BigInt {
    a.div_floor(b)
}

/// Smith normal form with smallest-magnitude pivoting, ties broken by (row, column).
pub fn smith_normal_form(m: &IntMatrix) -> Smith {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);
    let mut diag = Vec::new();

    let n = r.min(c);
    't: for t in 0..n {
        loop {
            // pivot search on the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = a.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    match best {
                        None => best = Some((i, j)),
                        Some((bi, bj)) => {
                            if x.abs() < a.get(bi, bj).abs() {
                                best = Some((i, j));
                            }
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else { break 't };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            u_inv.swap_cols(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let p = a.get(t, t).clone();
            let mut clean = true;
            for i in t + 1..r {
                if a.get(i, t).is_zero() {
                    continue;
                }
                let q = floor_div(a.get(i, t), &p);
                a.row_sub(i, t, &q);
                u.row_sub(i, t, &q);
                u_inv.col_sub(t, i, &(-&q));
                if !a.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if a.get(t, j).is_zero() {
                    continue;
                }
                let q = floor_div(a.get(t, j), &p);
                a.col_sub(j, t, &q);
                v.col_sub(j, t, &q);
                v_inv.row_sub(t, j, &(-&q));
                if !a.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let mut bad_row = None;
            'scan: for i in t + 1..r {
                for j in t + 1..c {
                    if !a.get(i, j).is_zero() && !a.get(i, j).is_multiple_of(&p) {
                        bad_row = Some(i);
                        break 'scan;
                    }
                }
            }
            if let Some(i) = bad_row {
                let minus_one = -BigInt::one();
                a.row_sub(t, i, &minus_one);
                u.row_sub(t, i, &minus_one);
                u_inv.col_sub(i, t, &BigInt::one());
                continue;
            }
            break;
        }
        if a.get(t, t).is_negative() {
            a.negate_row(t);
            u.negate_row(t);
            u_inv.negate_col(t);
        }
        diag.push(a.get(t, t).clone());
    }
    Smith { u, u_inv, v, v_inv, diag, rows: r, cols: c }
}

/// Normalize a list of nonzero diagonal entries into a divisibility chain.
pub fn normalize_diagonal(mut d: Vec<BigInt>) -> Vec<BigInt> {
    for x in d.iter_mut() {
        *x = x.abs();
    }
    let n = d.len();
    for i in 0..n {
        for j in i + 1..n {
            let g = d[i].gcd(&d[j]);
            if g != d[i] {
                let l = d[i].lcm(&d[j]);
                d[i] = g;
                d[j] = l;
            }
        }
    }
    d
}

/// Sparse matrix given as a list of `(row, col, value)` entries.
#[derive(Clone, Debug, Default)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, BigInt)>,
}

impl SparseMatrix {
    pub fn to_dense(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.rows, self.cols);
        for (i, j, x) in &self.entries {
            m.add_at(*i, *j, x);
        }
        m
    }
}

/// Nonzero invariant factors of a sparse matrix, computed without tracking transforms.
pub fn invariant_factors(m: &SparseMatrix) -> Vec<BigInt> {
    let mut rows: BTreeMap<usize, SparseVec> = BTreeMap::new();
    let mut col_index: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (i, j, x) in &m.entries {
        sv_add(rows.entry(*i).or_default(), *j, x);
    }
    rows.retain(|_, r| !r.is_empty());
    for (i, r) in &rows {
        for j in r.keys() {
            col_index.entry(*j).or_default().insert(*i);
        }
    }
    let mut pivots = Vec::new();

    // row[dst] -= q * row[src], maintaining the column index
    fn row_sub(
        rows: &mut BTreeMap<usize, SparseVec>,
        col_index: &mut BTreeMap<usize, BTreeSet<usize>>,
        dst: usize,
        src: usize,
        q: &BigInt,
    ) {
        let src_row = rows[&src].clone();
        let dst_row = rows.get_mut(&dst).expect("row present");
        for (j, x) in &src_row {
            let had = dst_row.contains_key(j);
            sv_add(dst_row, *j, &(-(x * q)));
            let has = dst_row.contains_key(j);
            if had && !has {
                col_index.get_mut(j).map(|s| s.remove(&dst));
            } else if !had && has {
                col_index.entry(*j).or_default().insert(dst);
            }
        }
    }

    loop {
        let mut best: Option<(usize, usize, BigInt)> = None;
        for (i, r) in &rows {
            for (j, x) in r {
                let ax = x.abs();
                let better = match &best {
                    None => true,
                    Some((bi, bj, bx)) => ax < *bx || (ax == *bx && (*i, *j) < (*bi, *bj)),
                };
                if better {
                    best = Some((*i, *j, ax));
                }
            }
            if let Some((_, _, bx)) = &best {
                if bx.is_one() {
                    break;
                }
            }
        }
        let Some((pr, pc, _)) = best else { break };
        let p = rows[&pr][&pc].clone();
        let others: Vec<usize> = col_index[&pc].iter().copied().filter(|i| *i != pr).collect();
        let mut col_clean = true;
        for i in others {
            let q = floor_div(&rows[&i][&pc], &p);
            row_sub(&mut rows, &mut col_index, i, pr, &q);
            if rows[&i].contains_key(&pc) {
                col_clean = false;
            }
            if rows[&i].is_empty() {
                rows.remove(&i);
            }
        }
        if !col_clean {
            continue;
        }
        // column c holds only the pivot; column operations touch row pr alone
        let row_p: Vec<(usize, BigInt)> = rows[&pr].iter().filter(|(j, _)| **j != pc).map(|(j, x)| (*j, x.clone())).collect();
        let mut row_clean = true;
        for (j, x) in row_p {
            let rem = x.mod_floor(&p);
            let row = rows.get_mut(&pr).unwrap();
            row.remove(&j);
            col_index.get_mut(&j).map(|s| s.remove(&pr));
            if !rem.is_zero() {
                row.insert(j, rem);
                col_index.entry(j).or_default().insert(pr);
                row_clean = false;
            }
        }
        if !row_clean {
            continue;
        }
        pivots.push(p);
        rows.remove(&pr);
        col_index.remove(&pc);
    }
    normalize_diagonal(pivots)
}

pub fn rank_sparse(m: &SparseMatrix) -> usize {
    invariant_factors(m).len()
}

/// Solve `a * x = b` over the integers, returning one solution if any exists.
pub fn solve(a: &IntMatrix, b: &[BigInt]) -> Option<Vec<BigInt>> {
    let sm = smith_normal_form(a);
    solve_with(&sm, b)
}

pub fn solve_with(sm: &Smith, b: &[BigInt]) -> Option<Vec<BigInt>> {
    assert_eq!(b.len(), sm.rows);
    let y = sm.u.mul_vec(b);
    let r = sm.rank();
    let mut z = vec![BigInt::zero(); sm.cols];
    for (i, yi) in y.iter().enumerate() {
        if i < r {
            let (q, rem) = yi.div_rem(&sm.diag[i]);
            if !rem.is_zero() {
                return None;
            }
            z[i] = q;
        } else if !yi.is_zero() {
            return None;
        }
    }
    Some(sm.v.mul_vec(&z))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(m: &IntMatrix) -> Smith {
        let sm = smith_normal_form(m);
        assert_eq!(sm.u.mul(m).mul(&sm.v), sm.s_matrix());
        assert_eq!(sm.u.mul(&sm.u_inv), IntMatrix::identity(m.rows()));
        assert_eq!(sm.v.mul(&sm.v_inv), IntMatrix::identity(m.cols()));
        for w in sm.diag.windows(2) {
            assert!(w[1].is_multiple_of(&w[0]));
        }
        sm
    }

    #[test]
    fn small_examples() {
        let sm = check(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(sm.diag, vec![BigInt::from(2), BigInt::from(4)]);
        let sm = check(&IntMatrix::identity(2));
        assert_eq!(sm.diag, vec![BigInt::one(), BigInt::one()]);
        let sm = check(&IntMatrix::zeros(3, 2));
        assert!(sm.diag.is_empty());
    }

    #[test]
    fn sparse_factors_match_dense() {
        let m = IntMatrix::from_rows(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let dense = check(&m).diag;
        let mut sp = SparseMatrix { rows: 3, cols: 3, entries: vec![] };
        for i in 0..3 {
            for j in 0..3 {
                sp.entries.push((i, j, m.get(i, j).clone()));
            }
        }
        assert_eq!(invariant_factors(&sp), dense);
    }

    #[test]
    fn solve_detects_divisibility() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert!(solve(&a, &[BigInt::from(1), BigInt::from(3)]).is_none());
        let x = solve(&a, &[BigInt::from(4), BigInt::from(3)]).unwrap();
        assert_eq!(x, vec![BigInt::from(2), BigInt::from(1)]);
    }
}
