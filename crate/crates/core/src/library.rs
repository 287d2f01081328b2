//! Curated A∞-categories and a seeded generator of directed dg categories.

use crate::ainfty::{AInftyCategory, CategoryBuilder};
use crate::linalg::{sv_add, SparseVec};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// One object with only its unit.
pub fn unit_category() -> AInftyCategory {
    let mut b = CategoryBuilder::new("unit");
    b.object("pt");
    b.build(true).expect("unit category")
}

/// Path category of the linear quiver with `n` vertices: one morphism `X_i → X_j` for each `i < j`.
pub fn linear_category(n: usize) -> AInftyCategory {
    let label = format!("A{n}");
    let mut b = CategoryBuilder::new(label);
    let names: Vec<String> = match n {
        2 => vec!["X".into(), "Y".into()],
        3 => vec!["X".into(), "Y".into(), "Z".into()],
        _ => (0..n).map(|i| format!("X{i}")).collect(),
    };
    let objs: Vec<usize> = names.iter().map(|s| b.object(s.clone())).collect();
    for w in objs.windows(2) {
        b.order(w[0], w[1]);
    }
    let mut arrow = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            let id = match (n, i, j) {
                (2, 0, 1) => "a".to_string(),
                (3, 0, 1) => "a".to_string(),
                (3, 1, 2) => "b".to_string(),
                (3, 0, 2) => "ab".to_string(),
                _ => format!("a{i}{j}"),
            };
            arrow.insert((i, j), b.gen(id, objs[i], objs[j], 0).expect("fresh"));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                b.mu(&[arrow[&(i, j)], arrow[&(j, k)]], &[(arrow[&(i, k)], 1)]);
            }
        }
    }
    b.build(true).expect("linear category")
}

/// Four objects with a non-associative μ² corrected by μ³.
pub fn mu3_category() -> AInftyCategory {
    let mut b = CategoryBuilder::new("mu3");
    let x: Vec<usize> = (0..4).map(|i| b.object(format!("X{i}"))).collect();
    for w in x.windows(2) {
        b.order(w[0], w[1]);
    }
    let a = b.gen("a", x[0], x[1], 0).unwrap();
    let bb = b.gen("b", x[1], x[2], 0).unwrap();
    let c = b.gen("c", x[2], x[3], 0).unwrap();
    let p = b.gen("p", x[0], x[2], 0).unwrap();
    let r = b.gen("r", x[1], x[3], 0).unwrap();
    let q = b.gen("q", x[0], x[3], 0).unwrap();
    let q2 = b.gen("q'", x[0], x[3], 0).unwrap();
    let m = b.gen("m", x[0], x[3], 1).unwrap();
    b.differential(m, &[(q2, 1), (q, -1)]);
    b.mu(&[a, bb], &[(p, 1)]);
    b.mu(&[bb, c], &[(r, 1)]);
    b.mu(&[p, c], &[(q, 1)]);
    b.mu(&[a, r], &[(q2, 1)]);
    b.mu(&[a, bb, c], &[(m, 1)]);
    b.build(true).expect("mu3 category")
}

/// The collection `O, O(1), O(2)` on the projective line: morphism ranks 2, 2, 3.
pub fn exceptional_collection() -> AInftyCategory {
    let mut b = CategoryBuilder::new("exceptional");
    let l: Vec<usize> = (1..=3).map(|i| b.object(format!("L{i}"))).collect();
    b.order(l[0], l[1]);
    b.order(l[1], l[2]);
    let xs: Vec<usize> = (0..2).map(|i| b.gen(format!("x{i}"), l[0], l[1], 0).unwrap()).collect();
    let ys: Vec<usize> = (0..2).map(|i| b.gen(format!("y{i}"), l[1], l[2], 0).unwrap()).collect();
    let zs: Vec<usize> = (0..3).map(|i| b.gen(format!("z{i}"), l[0], l[2], 0).unwrap()).collect();
    for i in 0..2 {
        for j in 0..2 {
            b.mu(&[xs[i], ys[j]], &[(zs[i + j], 1)]);
        }
    }
    b.build(true).expect("exceptional collection")
}

/// Named curated categories.
pub fn example_library() -> Vec<(String, AInftyCategory)> {
    let mut out = vec![("unit".to_string(), unit_category())];
    for n in 1..=5 {
        out.push((format!("A{n}"), linear_category(n)));
    }
    out.push(("mu3".into(), mu3_category()));
    out.push(("exceptional".into(), exceptional_collection()));
    out
}

pub fn library_member(name: &str) -> Option<AInftyCategory> {
    example_library().into_iter().find(|(n, _)| n == name).map(|(_, c)| c)
}

/// Quiver arrow with an optional differential given as a combination of paths.
#[derive(Clone, Debug)]
pub struct Arrow {
    pub id: String,
    pub src: usize,
    pub tgt: usize,
    pub parity: u8,
    pub d: Vec<(Vec<usize>, i64)>,
}

/// dg path category of an acyclic quiver; `μ²(p, q) = (-1)^{|p|} pq` and `d` extends by Leibniz.
pub fn path_category(label: &str, objects: &[String], order: &[(usize, usize)], arrows: &[Arrow]) -> AInftyCategory {
    let mut b = CategoryBuilder::new(label);
    let objs: Vec<usize> = objects.iter().map(|o| b.object(o.clone())).collect();
    for (g, l) in order {
        b.order(objs[*g], objs[*l]);
    }
    // all paths, by depth-first extension
    let mut paths: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..arrows.len()).rev().map(|a| vec![a]).collect();
    while let Some(p) = stack.pop() {
        let t = arrows[*p.last().unwrap()].tgt;
        for (a, ar) in arrows.iter().enumerate().rev() {
            if ar.src == t {
                let mut q = p.clone();
                q.push(a);
                stack.push(q);
            }
        }
        paths.push(p);
    }
    paths.sort_by(|x, y| (x.len(), x).cmp(&(y.len(), y)));
    let parity = |p: &[usize]| (p.iter().map(|a| arrows[*a].parity as usize).sum::<usize>() % 2) as u8;
    let mut gid = BTreeMap::new();
    for p in &paths {
        let id = p.iter().map(|a| arrows[*a].id.as_str()).collect::<Vec<_>>().join(".");
        let g = b.gen(id, objs[arrows[p[0]].src], objs[arrows[*p.last().unwrap()].tgt], parity(p)).unwrap();
        gid.insert(p.clone(), g);
    }
    for p in &paths {
        let mut dv = SparseVec::new();
        let mut sign = 1i64;
        for (i, a) in p.iter().enumerate() {
            for (q, c) in &arrows[*a].d {
                let mut w = p[..i].to_vec();
                w.extend_from_slice(q);
                w.extend_from_slice(&p[i + 1..]);
                sv_add(&mut dv, gid[&w], &BigInt::from(sign * c));
            }
            if arrows[*a].parity == 1 {
                sign = -sign;
            }
        }
        if !dv.is_empty() {
            let g = gid[p];
            b.mu_big(vec![g], dv);
        }
    }
    for p in &paths {
        for q in &paths {
            if arrows[*p.last().unwrap()].tgt != arrows[q[0]].src {
                continue;
            }
            let mut w = p.clone();
            w.extend_from_slice(q);
            let c = if parity(p) == 1 { -1 } else { 1 };
            b.mu(&[gid[p], gid[q]], &[(gid[&w], c)]);
        }
    }
    b.build(true).expect("path category")
}

/// Seeded directed dg category on `n_objects ≤ 5` objects with every hom of rank at most `max_rank`.
pub fn random_directed_dg(seed: u64, n_objects: usize, max_rank: usize) -> AInftyCategory {
    let n = n_objects.clamp(1, 5);
    let max_rank = max_rank.clamp(1, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let objects: Vec<String> = (0..n).map(|i| format!("X{i}")).collect();
    let order: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    let mut arrows: Vec<Arrow> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let count = rng.gen_range(0..=2);
            for _ in 0..count {
                let parity = rng.gen_range(0..2u8);
                let candidate = Arrow { id: format!("g{}", arrows.len()), src: i, tgt: j, parity, d: vec![] };
                arrows.push(candidate);
                if max_hom_rank(&arrows, n) > max_rank {
                    arrows.pop();
                }
            }
        }
    }
    // promote some arrows to carry a differential into paths of closed arrows
    let closed: Vec<bool> = arrows.iter().map(|_| rng.gen_bool(0.6)).collect();
    for k in 0..arrows.len() {
        if closed[k] {
            continue;
        }
        let a = arrows[k].clone();
        let targets: Vec<Vec<usize>> = paths_between(&arrows, a.src, a.tgt)
            .into_iter()
            .filter(|p| p.iter().all(|x| closed[*x]))
            .filter(|p| (p.iter().map(|x| arrows[*x].parity as usize).sum::<usize>() % 2) as u8 != a.parity)
            .collect();
        let mut d = Vec::new();
        for p in targets {
            let c: i64 = rng.gen_range(-2..=2);
            if c != 0 {
                d.push((p, c));
            }
        }
        arrows[k].d = d;
    }
    for (k, a) in arrows.iter_mut().enumerate() {
        a.id = format!("g{k}");
    }
    path_category(&format!("random-{seed}-{n}-{max_rank}"), &objects, &order, &arrows)
}

fn paths_between(arrows: &[Arrow], s: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..arrows.len()).rev().filter(|a| arrows[*a].src == s).map(|a| vec![a]).collect();
    while let Some(p) = stack.pop() {
        let end = arrows[*p.last().unwrap()].tgt;
        if end == t {
            out.push(p.clone());
        }
        for (a, ar) in arrows.iter().enumerate().rev() {
            if ar.src == end {
                let mut q = p.clone();
                q.push(a);
                stack.push(q);
            }
        }
    }
    out
}

fn max_hom_rank(arrows: &[Arrow], n: usize) -> usize {
    let mut best = 0;
    for s in 0..n {
        for t in 0..n {
            best = best.max(paths_between(arrows, s, t).len());
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_passes_checks() {
        for (name, c) in example_library() {
            let r = c.check_ainfty(6);
            assert!(r.passed(), "{name}: {:?}", r.violations.first());
        }
    }

    #[test]
    fn mu3_has_triple_product() {
        let c = mu3_category();
        assert!(c.mu_entries().any(|(w, _)| w.len() == 3));
        assert_eq!(c.max_arity(), 3);
    }

    #[test]
    fn random_is_deterministic_and_valid() {
        for seed in 0..20 {
            let c = random_directed_dg(seed, 1 + (seed as usize % 5), 1 + (seed as usize % 3));
            assert!(c.check_ainfty(4).passed(), "seed {seed}");
            let c2 = random_directed_dg(seed, 1 + (seed as usize % 5), 1 + (seed as usize % 3));
            assert_eq!(c.gens(), c2.gens());
        }
        let c = random_directed_dg(0, 1, 3);
        assert_eq!(c.gens().len(), 1);
    }
}
