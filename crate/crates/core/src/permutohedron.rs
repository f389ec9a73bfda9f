//! Ordered set partitions and the face lattice of the permutohedron.
//!
//! The permutohedron `P^{q-1}` is the convex hull of the `q!` points
//! `P_pi = sum_k (k - (q+1)/2) e_{pi_k}` for permutations `pi` of
//! `{1, .., q}`. Its faces of codimension `s - 1` correspond to ordered
//! partitions `J = (J_1, .., J_s)` of `{1, .., q}`: the face `tau_J` has
//! vertex set `{P_pi}` where `pi` runs over the sequences whose first
//! `|J_1|` entries are the elements of `J_1` in some order, the next
//! `|J_2|` entries those of `J_2`, and so on. Refining a partition
//! (splitting blocks in place into ordered sub-blocks) passes to a face of
//! smaller dimension; the face lattice is the refinement order.
//!
//! No convex-hull computation is performed anywhere: faces are manipulated
//! purely combinatorially, and vertex coordinates (exact rationals with
//! denominator dividing 2) are produced only on request.

use std::collections::BTreeSet;

use itertools::Itertools;
use num_rational::Rational64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("q must be at least 1")]
    EmptyGroundSet,
    #[error("block {0} is empty")]
    EmptyBlock(usize),
    #[error("label {0} out of range 1..={1}")]
    LabelOutOfRange(u32, u32),
    #[error("label {0} appears more than once")]
    DuplicateLabel(u32),
    #[error("labels {0:?} are not covered by any block")]
    MissingLabels(Vec<u32>),
    #[error("sequence is not a permutation of 1..={0}")]
    NotAPermutation(u32),
}

/// An ordered partition `(J_1, .., J_s)` of `{1, .., q}`.
///
/// Blocks are stored with their elements sorted ascending; the order *of*
/// the blocks is significant data (it is the level order of the saddles).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrderedPartition {
    q: u32,
    blocks: Vec<Vec<u32>>,
}

impl OrderedPartition {
    /// Validates and canonicalizes (sorts each block ascending).
    pub fn new(q: u32, blocks: Vec<Vec<u32>>) -> Result<Self, PartitionError> {
        if q == 0 {
            return Err(PartitionError::EmptyGroundSet);
        }
        let mut seen = vec![false; q as usize + 1];
        for (i, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(PartitionError::EmptyBlock(i));
            }
            for &x in block {
                if x == 0 || x > q {
                    return Err(PartitionError::LabelOutOfRange(x, q));
                }
                if seen[x as usize] {
                    return Err(PartitionError::DuplicateLabel(x));
                }
                seen[x as usize] = true;
            }
        }
        let missing: Vec<u32> = (1..=q).filter(|&x| !seen[x as usize]).collect();
        if !missing.is_empty() {
            return Err(PartitionError::MissingLabels(missing));
        }
        let blocks = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        Ok(Self { q, blocks })
    }

    /// The one-block partition `({1, .., q})`.
    pub fn coarsest(q: u32) -> Result<Self, PartitionError> {
        Self::new(q, vec![(1..=q).collect()])
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Index of the block containing `label`, if in range.
    pub fn block_of(&self, label: u32) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&label).is_ok())
    }
}

/// Strict refinement: `fine != coarse` and `fine` is obtained from `coarse`
/// by replacing each block, in place, by an ordered sequence of non-empty
/// sub-blocks partitioning it.
pub fn refines(fine: &OrderedPartition, coarse: &OrderedPartition) -> bool {
    fine != coarse && refines_or_equal(fine, coarse)
}

/// Reflexive refinement order.
pub fn refines_or_equal(fine: &OrderedPartition, coarse: &OrderedPartition) -> bool {
    if fine.q != coarse.q {
        return false;
    }
    let mut fine_blocks = fine.blocks.iter();
    for cb in &coarse.blocks {
        let target: BTreeSet<u32> = cb.iter().copied().collect();
        let mut filled = 0usize;
        while filled < target.len() {
            let Some(fb) = fine_blocks.next() else {
                return false;
            };
            if !fb.iter().all(|x| target.contains(x)) {
                return false;
            }
            // fine blocks are pairwise disjoint, so counting suffices
            filled += fb.len();
        }
        if filled != target.len() {
            return false;
        }
    }
    fine_blocks.next().is_none()
}

/// Exact coordinates of the vertex `P_pi = sum_k (k - (q+1)/2) e_{pi_k}`.
pub fn vertex_point(perm: &[u32]) -> Result<Vec<Rational64>, PartitionError> {
    let q = perm.len() as u32;
    if q == 0 {
        return Err(PartitionError::EmptyGroundSet);
    }
    let mut seen = vec![false; q as usize + 1];
    for &x in perm {
        if x == 0 || x > q || seen[x as usize] {
            return Err(PartitionError::NotAPermutation(q));
        }
        seen[x as usize] = true;
    }
    let mut point = vec![Rational64::default(); q as usize];
    let center = Rational64::new(q as i64 + 1, 2);
    for (k, &p) in perm.iter().enumerate() {
        point[p as usize - 1] = Rational64::from_integer(k as i64 + 1) - center;
    }
    Ok(point)
}

/// Vertex set of the face `tau_J`, as permutations in lexicographic order.
///
/// These are exactly the sequences placing the elements of `J_k` (in any
/// order) on the k-th consecutive run of positions; there are
/// `prod_k |J_k|!` of them.
pub fn face_vertices(partition: &OrderedPartition) -> Vec<Vec<u32>> {
    let per_block: Vec<Vec<Vec<u32>>> = partition
        .blocks()
        .iter()
        .map(|b| {
            b.iter()
                .copied()
                .permutations(b.len())
                .collect()
        })
        .collect();
    let mut vertices: Vec<Vec<u32>> = per_block
        .iter()
        .multi_cartesian_product()
        .map(|choice| choice.into_iter().flatten().copied().collect())
        .collect();
    vertices.sort_unstable();
    vertices
}

/// A face of `P^{q-1}` together with its dimension and vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutohedronFace {
    pub partition: OrderedPartition,
    pub dim: usize,
    pub vertices: Vec<Vec<u32>>,
}

impl PermutohedronFace {
    pub fn new(partition: OrderedPartition) -> Self {
        let dim = partition.q() as usize - partition.block_count();
        let vertices = face_vertices(&partition);
        Self { partition, dim, vertices }
    }
}

/// All faces of `P^{q-1}`, i.e. all ordered partitions of `{1, .., q}`,
/// sorted by the lexicographic order on block lists.
pub fn enumerate_faces(q: u32) -> Result<Vec<PermutohedronFace>, PartitionError> {
    let partitions = ordered_partitions_of(&(1..=q).collect::<Vec<_>>());
    if partitions.is_empty() {
        return Err(PartitionError::EmptyGroundSet);
    }
    let mut faces: Vec<PermutohedronFace> = partitions
        .into_iter()
        .map(|blocks| {
            let p = OrderedPartition::new(q, blocks).expect("generated partition is valid");
            PermutohedronFace::new(p)
        })
        .collect();
    faces.sort_by(|a, b| a.partition.cmp(&b.partition));
    Ok(faces)
}

/// All ordered partitions of the (sorted, duplicate-free) ground set.
pub(crate) fn ordered_partitions_of(ground: &[u32]) -> Vec<Vec<Vec<u32>>> {
    if ground.is_empty() {
        return vec![];
    }
    let mut out = Vec::new();
    // choose the first block as any non-empty subset, recurse on the rest
    let n = ground.len();
    for mask in 1u32..(1 << n) {
        let mut first = Vec::new();
        let mut rest = Vec::new();
        for (i, &x) in ground.iter().enumerate() {
            if mask & (1 << i) != 0 {
                first.push(x);
            } else {
                rest.push(x);
            }
        }
        if rest.is_empty() {
            out.push(vec![first]);
        } else {
            for mut tail in ordered_partitions_of(&rest) {
                let mut blocks = Vec::with_capacity(tail.len() + 1);
                blocks.push(first.clone());
                blocks.append(&mut tail);
                out.push(blocks);
            }
        }
    }
    out
}

/// All refinements of `partition` (including itself), each obtained by
/// replacing every block with an ordered partition of that block. Sorted.
pub fn refinements_of(partition: &OrderedPartition) -> Vec<OrderedPartition> {
    let per_block: Vec<Vec<Vec<Vec<u32>>>> = partition
        .blocks()
        .iter()
        .map(|b| ordered_partitions_of(b))
        .collect();
    let mut out: Vec<OrderedPartition> = per_block
        .iter()
        .multi_cartesian_product()
        .map(|choice| {
            let blocks: Vec<Vec<u32>> = choice.into_iter().flatten().cloned().collect();
            OrderedPartition::new(partition.q(), blocks).expect("refinement is valid")
        })
        .collect();
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn part(q: u32, blocks: &[&[u32]]) -> OrderedPartition {
        OrderedPartition::new(q, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// Independent Fubini-number oracle: a(n) = sum_j C(n,j) a(n-j).
    fn fubini(n: u64) -> u64 {
        fn binom(n: u64, k: u64) -> u64 {
            if k > n {
                return 0;
            }
            let mut acc = 1u64;
            for i in 0..k {
                acc = acc * (n - i) / (i + 1);
            }
            acc
        }
        if n == 0 {
            return 1;
        }
        (1..=n).map(|j| binom(n, j) * fubini(n - j)).sum()
    }

    #[test]
    fn validation_rejects_bad_partitions() {
        assert!(OrderedPartition::new(2, vec![vec![1], vec![]]).is_err());
        assert!(OrderedPartition::new(2, vec![vec![1, 2], vec![2]]).is_err());
        assert!(OrderedPartition::new(3, vec![vec![1], vec![2]]).is_err());
        assert!(OrderedPartition::new(2, vec![vec![1, 3]]).is_err());
        assert!(OrderedPartition::new(0, vec![]).is_err());
    }

    #[test]
    fn blocks_are_sorted_ascending() {
        let p = OrderedPartition::new(3, vec![vec![3, 1], vec![2]]).unwrap();
        assert_eq!(p.blocks(), &[vec![1, 3], vec![2]]);
        assert_eq!(p.block_of(3), Some(0));
        assert_eq!(p.block_of(2), Some(1));
    }

    #[test]
    fn refinement_examples() {
        let fine = part(2, &[&[1], &[2]]);
        let fine_rev = part(2, &[&[2], &[1]]);
        let coarse = part(2, &[&[1, 2]]);
        assert!(refines(&fine, &coarse));
        assert!(refines(&fine_rev, &coarse));
        assert!(!refines(&fine, &fine_rev));
        assert!(!refines(&fine, &fine));
        assert!(refines_or_equal(&fine, &fine));
        // splitting must stay in place
        let f = part(3, &[&[2], &[1], &[3]]);
        let c = part(3, &[&[1, 2], &[3]]);
        assert!(refines(&f, &c));
        let g = part(3, &[&[2], &[3], &[1]]);
        assert!(!refines(&g, &c));
    }

    #[test]
    fn refinement_is_a_partial_order_q4() {
        let faces = enumerate_faces(4).unwrap();
        let parts: Vec<&OrderedPartition> = faces.iter().map(|f| &f.partition).collect();
        for a in &parts {
            assert!(!refines(a, a));
            for b in &parts {
                if refines(a, b) {
                    assert!(!refines(b, a), "antisymmetry failed");
                }
                for c in &parts {
                    if refines(a, b) && refines(b, c) {
                        assert!(refines(a, c), "transitivity failed");
                    }
                }
            }
        }
    }

    #[test]
    fn vertex_point_examples() {
        assert_eq!(vertex_point(&[1]).unwrap(), vec![Rational64::new(0, 1)]);
        assert_eq!(
            vertex_point(&[1, 2]).unwrap(),
            vec![Rational64::new(-1, 2), Rational64::new(1, 2)]
        );
        assert_eq!(
            vertex_point(&[2, 1, 3]).unwrap(),
            vec![
                Rational64::from_integer(0),
                Rational64::from_integer(-1),
                Rational64::from_integer(1)
            ]
        );
        assert!(vertex_point(&[1, 1]).is_err());
        assert!(vertex_point(&[]).is_err());
    }

    #[test]
    fn face_vertices_examples() {
        let edge = part(3, &[&[2], &[1, 3]]);
        assert_eq!(face_vertices(&edge), vec![vec![2, 1, 3], vec![2, 3, 1]]);
        let vertex = part(3, &[&[2], &[1], &[3]]);
        assert_eq!(face_vertices(&vertex), vec![vec![2, 1, 3]]);
        let hexagon = part(3, &[&[1, 2, 3]]);
        assert_eq!(face_vertices(&hexagon).len(), 6);
    }

    #[test]
    fn face_counts_match_fubini_up_to_q6() {
        for q in 1..=6u32 {
            let faces = enumerate_faces(q).unwrap();
            assert_eq!(faces.len() as u64, fubini(q as u64), "q={q}");
            // top face has all q! vertices, each vertex face exactly one
            let top = faces.iter().find(|f| f.partition.block_count() == 1).unwrap();
            assert_eq!(top.vertices.len() as u64, (1..=q as u64).product::<u64>());
            for f in &faces {
                assert_eq!(f.dim, q as usize - f.partition.block_count());
                let expect: usize = f
                    .partition
                    .blocks()
                    .iter()
                    .map(|b| (1..=b.len()).product::<usize>())
                    .product();
                assert_eq!(f.vertices.len(), expect);
            }
        }
    }

    #[test]
    fn q3_face_census() {
        let faces = enumerate_faces(3).unwrap();
        assert_eq!(faces.len(), 13);
        let by_dim = |d: usize| faces.iter().filter(|f| f.dim == d).count();
        assert_eq!(by_dim(0), 6);
        assert_eq!(by_dim(1), 6);
        assert_eq!(by_dim(2), 1);
    }

    /// The interval below a face is the face lattice of a product of
    /// permutohedra, one per block: check count and order structure.
    #[test]
    fn interval_below_face_is_a_product_q4() {
        for q in 1..=4u32 {
            for face in enumerate_faces(q).unwrap() {
                let refs = refinements_of(&face.partition);
                let expect: u64 = face
                    .partition
                    .blocks()
                    .iter()
                    .map(|b| fubini(b.len() as u64))
                    .product();
                assert_eq!(refs.len() as u64, expect);
                for r in &refs {
                    assert!(refines_or_equal(r, &face.partition));
                }
                // the refinement order restricted to the interval is the
                // product order: blockwise refinement of induced partitions
                for a in &refs {
                    for b in &refs {
                        let blockwise = face.partition.blocks().iter().all(|cb| {
                            let induced = |p: &OrderedPartition| -> Vec<Vec<u32>> {
                                p.blocks()
                                    .iter()
                                    .filter(|fb| fb.iter().all(|x| cb.contains(x)))
                                    .cloned()
                                    .collect()
                            };
                            let (ia, ib) = (induced(a), induced(b));
                            let qa = cb.len() as u32;
                            let relabel = |bs: Vec<Vec<u32>>| -> OrderedPartition {
                                let map: std::collections::BTreeMap<u32, u32> = cb
                                    .iter()
                                    .enumerate()
                                    .map(|(i, &x)| (x, i as u32 + 1))
                                    .collect();
                                OrderedPartition::new(
                                    qa,
                                    bs.iter()
                                        .map(|b| b.iter().map(|x| map[x]).collect())
                                        .collect(),
                                )
                                .unwrap()
                            };
                            refines_or_equal(&relabel(ia), &relabel(ib))
                        });
                        assert_eq!(refines_or_equal(a, b), blockwise);
                    }
                }
            }
        }
    }
}
