//! Edge-path fundamental group and best-effort presentation simplification.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;

use super::snf::{smith_normal_form, IntMatrix};
use super::{SimplicialComplex, TopologyError};

/// A word is a sequence of letters; letter `k > 0` is generator `k−1`,
/// letter `−k` its inverse.
pub type Word = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl GroupPresentation {
    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty()
    }
}

/// Edge-path presentation of π₁ together with its simplified form. Both
/// present isomorphic groups; the simplification is best-effort and makes
/// no claim when it does not reach the trivial presentation.
#[derive(Debug, Clone)]
pub struct FundamentalGroup {
    pub raw: GroupPresentation,
    pub simplified: GroupPresentation,
}

fn inverse(w: &[i64]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

fn free_reduce(w: &[i64]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Free reduction plus cancellation across the ends (relators are cyclic).
fn cyclic_reduce(w: &[i64]) -> Word {
    let mut out = free_reduce(w);
    while out.len() >= 2 && *out.first().unwrap() == -*out.last().unwrap() {
        out.pop();
        out.remove(0);
        out = free_reduce(&out);
    }
    out
}

/// Spanning-tree presentation: generators are the 1-simplices outside a
/// breadth-first spanning tree, relators the boundaries of 2-simplices.
pub fn pi1(sc: &SimplicialComplex, basepoint: usize) -> Result<FundamentalGroup, TopologyError> {
    let vertices: Vec<usize> = sc.simplices(0).iter().map(|s| s[0]).collect();
    if !vertices.contains(&basepoint) {
        return Err(TopologyError::BadComplex(format!(
            "basepoint {basepoint} is not a vertex"
        )));
    }
    let edges: Vec<(usize, usize)> =
        sc.simplices(1).iter().map(|s| (s[0], s[1])).collect();

    let mut adj: BTreeMap<usize, Vec<usize>> =
        vertices.iter().map(|&v| (v, Vec::new())).collect();
    for &(a, b) in &edges {
        adj.get_mut(&a).unwrap().push(b);
        adj.get_mut(&b).unwrap().push(a);
    }

    // breadth-first spanning tree from the basepoint
    let mut tree: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    seen.insert(basepoint);
    let mut queue = VecDeque::from([basepoint]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                tree.insert((v.min(w), v.max(w)));
                queue.push_back(w);
            }
        }
    }
    if seen.len() != vertices.len() {
        let mut components = vec![seen.iter().copied().collect::<Vec<_>>()];
        let mut left: BTreeSet<usize> =
            vertices.iter().copied().filter(|v| !seen.contains(v)).collect();
        while let Some(&start) = left.iter().next() {
            let mut comp = BTreeSet::from([start]);
            let mut q = VecDeque::from([start]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[&v] {
                    if comp.insert(w) {
                        q.push_back(w);
                    }
                }
            }
            left.retain(|v| !comp.contains(v));
            components.push(comp.into_iter().collect());
        }
        return Err(TopologyError::Disconnected(components));
    }

    let loose: Vec<(usize, usize)> =
        edges.iter().copied().filter(|e| !tree.contains(e)).collect();
    let index: BTreeMap<(usize, usize), usize> =
        loose.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // oriented traversal min→max is the positive letter
    let letter = |from: usize, to: usize| -> Option<i64> {
        let key = (from.min(to), from.max(to));
        let g = *index.get(&key)?;
        Some(if from < to { g as i64 + 1 } else { -(g as i64 + 1) })
    };

    let relators: Vec<Word> = sc
        .simplices(2)
        .iter()
        .map(|s| {
            let (a, b, c) = (s[0], s[1], s[2]);
            [(a, b), (b, c), (c, a)]
                .into_iter()
                .filter_map(|(x, y)| letter(x, y))
                .collect::<Word>()
        })
        .map(|w| cyclic_reduce(&w))
        .filter(|w| !w.is_empty())
        .collect();

    let raw = GroupPresentation {
        generators: loose.iter().map(|&(a, b)| format!("x{a}_{b}")).collect(),
        relators,
    };
    let simplified = simplify(&raw);
    Ok(FundamentalGroup { raw, simplified })
}

/// Tietze simplification: repeatedly eliminate a generator that occurs
/// exactly once in some relator, preferring short relators, with free and
/// cyclic reduction between steps. Terminates because each round removes a
/// generator; the result presents the same group.
pub fn simplify(p: &GroupPresentation) -> GroupPresentation {
    let mut generators = p.generators.clone();
    let mut relators: Vec<Word> = p
        .relators
        .iter()
        .map(|w| cyclic_reduce(w))
        .filter(|w| !w.is_empty())
        .collect();
    loop {
        relators.sort();
        relators.dedup();
        // shortest relator owning a single-occurrence generator
        let mut choice: Option<(usize, usize)> = None; // (relator, position)
        for (ri, r) in relators.iter().enumerate() {
            let pos = r.iter().enumerate().find_map(|(i, &l)| {
                let once = r.iter().filter(|&&x| x.abs() == l.abs()).count() == 1;
                once.then_some(i)
            });
            if let Some(pi) = pos {
                let better = match choice {
                    None => true,
                    Some((bi, _)) => r.len() < relators[bi].len(),
                };
                if better {
                    choice = Some((ri, pi));
                }
            }
        }
        let Some((ri, pi)) = choice else { break };
        let r = relators.remove(ri);
        let g = r[pi].abs();
        // rotate the occurrence to the front: r = ±g · w, so g = w⁻¹ or w
        let mut rot = r.clone();
        rot.rotate_left(pi);
        let expr: Word = if rot[0] > 0 { inverse(&rot[1..]) } else { rot[1..].to_vec() };
        let expand = |w: &Word| -> Word {
            let mut out = Vec::new();
            for &l in w {
                if l == g {
                    out.extend_from_slice(&expr);
                } else if l == -g {
                    out.extend(inverse(&expr));
                } else {
                    out.push(l);
                }
            }
            out
        };
        relators = relators
            .iter()
            .map(expand)
            .map(|w| cyclic_reduce(&w))
            .filter(|w| !w.is_empty())
            .collect();
        generators.remove((g - 1) as usize);
        for w in &mut relators {
            for l in w {
                if l.abs() > g {
                    *l -= l.signum();
                }
            }
        }
    }
    relators.sort();
    relators.dedup();
    GroupPresentation { generators, relators }
}

/// Rank and torsion of the abelianization, from the Smith form of the
/// exponent-sum matrix.
pub fn abelianization(p: &GroupPresentation) -> (usize, Vec<BigInt>) {
    let g = p.generators.len();
    let mut m = IntMatrix::zero(p.relators.len(), g);
    for (i, r) in p.relators.iter().enumerate() {
        for &l in r {
            *m.at_mut(i, (l.abs() - 1) as usize) += BigInt::from(l.signum());
        }
    }
    let d = smith_normal_form(&m);
    (g - d.rank(), d.torsion())
}
