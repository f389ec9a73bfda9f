//! Integer homology and fundamental groups of cell posets.
//!
//! The complex is replaced by its barycentric subdivision: vertices are
//! cells, simplices are chains of the face relation. For a regular poset
//! this has the same homotopy type, so exact integer linear algebra on
//! simplicial chains answers questions about the original space. Homology
//! here is unreduced.

mod presentation;
mod snf;

pub use presentation::{
    abelianization, pi1, simplify, FundamentalGroup, GroupPresentation, Word,
};
pub use snf::{det_bareiss, smith_normal_form, IntMatrix, SmithDecomposition};

use std::collections::BTreeSet;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cells::{check_regularity, ComplexPoset};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("poset fails regularity; first violation: {0}")]
    Irregular(String),
    #[error("space is disconnected; components: {0:?}")]
    Disconnected(Vec<Vec<usize>>),
    #[error("bad simplicial data: {0}")]
    BadComplex(String),
}

/// Finite abstract simplicial complex; each simplex is a strictly
/// increasing vertex list, closed under taking faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Vec<usize>>>,
}

impl SimplicialComplex {
    pub fn from_facets(facets: &[Vec<usize>]) -> Result<Self, TopologyError> {
        if facets.is_empty() {
            return Err(TopologyError::BadComplex("no facets".into()));
        }
        let mut closed: BTreeSet<Vec<usize>> = BTreeSet::new();
        for facet in facets {
            if facet.is_empty() {
                return Err(TopologyError::BadComplex("empty facet".into()));
            }
            let mut f = facet.clone();
            f.sort_unstable();
            f.dedup();
            if f.len() != facet.len() {
                return Err(TopologyError::BadComplex(format!(
                    "facet {facet:?} repeats a vertex"
                )));
            }
            for mask in 1u32..(1 << f.len()) {
                let sub: Vec<usize> = f
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                closed.insert(sub);
            }
        }
        Ok(Self::from_simplex_set(closed))
    }

    fn from_simplex_set(set: BTreeSet<Vec<usize>>) -> Self {
        let top = set.iter().map(Vec::len).max().unwrap_or(0);
        let mut by_dim = vec![Vec::new(); top];
        for s in set {
            by_dim[s.len() - 1].push(s);
        }
        for level in &mut by_dim {
            level.sort();
        }
        Self { by_dim }
    }

    pub fn dim(&self) -> usize {
        self.by_dim.len() - 1
    }

    /// Simplices of dimension `k`, sorted; empty slice above the dimension.
    pub fn simplices(&self, k: usize) -> &[Vec<usize>] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=self.dim())
            .map(|k| {
                let n = self.simplices(k).len() as i64;
                if k % 2 == 0 { n } else { -n }
            })
            .sum()
    }

    /// Matrix of ∂_k: C_k → C_{k−1} with orientation from vertex order.
    pub fn boundary_matrix(&self, k: usize) -> IntMatrix {
        if k == 0 {
            return IntMatrix::zero(0, self.simplices(0).len());
        }
        let rows = self.simplices(k - 1);
        let cols = self.simplices(k);
        let mut m = IntMatrix::zero(rows.len(), cols.len());
        for (c, s) in cols.iter().enumerate() {
            for drop in 0..s.len() {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != drop)
                    .map(|(_, &v)| v)
                    .collect();
                let r = rows.binary_search(&face).expect("complex closed under faces");
                *m.at_mut(r, c) = BigInt::from(if drop % 2 == 0 { 1 } else { -1 });
            }
        }
        m
    }
}

/// Order complex of an arbitrary strict relation on `0..n`: simplices are
/// the pairwise-related subsets. Every element is a vertex.
pub fn order_complex_of_pairs(
    n: usize,
    strict: &BTreeSet<(usize, usize)>,
) -> SimplicialComplex {
    let mut ups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in strict {
        ups[a].push(b);
    }
    let mut chains: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut stack: Vec<usize> = Vec::new();
    fn grow(
        stack: &mut Vec<usize>,
        ups: &[Vec<usize>],
        strict: &BTreeSet<(usize, usize)>,
        chains: &mut BTreeSet<Vec<usize>>,
    ) {
        let mut simplex = stack.clone();
        simplex.sort_unstable();
        chains.insert(simplex);
        let last = *stack.last().unwrap();
        for &next in &ups[last] {
            if stack.iter().all(|&c| strict.contains(&(c, next))) {
                stack.push(next);
                grow(stack, ups, strict, chains);
                stack.pop();
            }
        }
    }
    for v in 0..n {
        stack.push(v);
        grow(&mut stack, &ups, strict, &mut chains);
        stack.pop();
    }
    SimplicialComplex::from_simplex_set(chains)
}

/// Barycentric subdivision of the cell poset. Refuses irregular posets,
/// whose subdivision need not match the space.
pub fn order_complex(cx: &ComplexPoset) -> Result<SimplicialComplex, TopologyError> {
    let report = check_regularity(cx);
    if let Some(first) = report.violations.first() {
        return Err(TopologyError::Irregular(format!(
            "{first:?} ({} violations total)",
            report.violations.len()
        )));
    }
    let strict: BTreeSet<(usize, usize)> = cx
        .boundary_pairs()
        .iter()
        .map(|&(a, b)| (a.0, b.0))
        .collect();
    Ok(order_complex_of_pairs(cx.cells().len(), &strict))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Torsion coefficients d_1 | d_2 | …, each > 1.
    pub torsion: Vec<BigInt>,
}

/// Unreduced integer homology in every degree up to `sc.dim()`.
pub fn homology(sc: &SimplicialComplex) -> Vec<HomologyGroup> {
    let dim = sc.dim();
    let decomps: Vec<_> = (0..=dim + 1)
        .map(|k| smith_normal_form(&sc.boundary_matrix(k)))
        .collect();
    (0..=dim)
        .map(|k| HomologyGroup {
            betti: sc.simplices(k).len() - decomps[k].rank() - decomps[k + 1].rank(),
            torsion: decomps[k + 1].torsion(),
        })
        .collect()
}

/// Counts feeding the two rank bounds: the cycle rank `n = E − V + 1` of
/// the 1-skeleton, the bound `(q+g−1)·V + n`, and the number of generators
/// left after simplifying π₁ of the subdivision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankReport {
    pub vertices: usize,
    pub edges: usize,
    pub cycle_rank: i64,
    pub bk_bound: i64,
    pub pi1_generators: usize,
}

pub fn rank_report(cx: &ComplexPoset, g: u32) -> Result<RankReport, TopologyError> {
    let v = cx.cells().iter().filter(|c| c.dim() == 0).count();
    let e = cx.cells().iter().filter(|c| c.dim() == 1).count();
    let n = e as i64 - v as i64 + 1;
    let sc = order_complex(cx)?;
    let basepoint = sc.simplices(0)[0][0];
    let group = pi1(&sc, basepoint)?;
    Ok(RankReport {
        vertices: v,
        edges: e,
        cycle_rank: n,
        bk_bound: (cx.q() as i64 + g as i64 - 1) * v as i64 + n,
        pi1_generators: group.simplified.generators.len(),
    })
}
