//! Exhaustive molecule enumeration for fixed `(p, q, r)`.
//!
//! For every framing, every way of grouping each block's saddles into atoms,
//! every valid atom structure on each group, and every annulus matching, the
//! assembled molecule is validated and deduplicated by canonical key. Each
//! stage is a finite product, so the whole search is exact.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::molecule::{
    atom_boundary, atom_validate, canonical_key, molecule_validate, Annulus, Atom, CanonicalKey,
    CircleRef, FramedMolecule, LowerEnd, PlacedAtom, SectorKind, UpperEnd,
};
use crate::permutohedron::{ordered_partitions_of, OrderedPartition};

use super::CellsError;

/// All valid atoms whose saddle set is exactly `saddles`.
///
/// Boundary walks stay within a single sector kind exactly when every edge
/// joins two slots whose incoming corners have opposite kinds, so the
/// pairings to try are precisely the bijections between the two slot
/// classes; connectivity is the only remaining filter.
pub(crate) fn atoms_on(saddles: &[u32]) -> Vec<Atom> {
    let m = saddles.len();
    let mut out = Vec::new();
    for mask in 0u32..(1 << m) {
        let sector0: Vec<SectorKind> = (0..m)
            .map(|i| if mask & (1 << i) != 0 { SectorKind::Up } else { SectorKind::Down })
            .collect();
        let mut down_slots = Vec::new();
        let mut up_slots = Vec::new();
        for (a, &s0) in sector0.iter().enumerate() {
            for j in 0..4usize {
                let kind = if j % 2 == 0 { s0 } else { s0.flip() };
                match kind {
                    SectorKind::Down => down_slots.push(4 * a + j),
                    SectorKind::Up => up_slots.push(4 * a + j),
                }
            }
        }
        for perm in up_slots.iter().permutations(up_slots.len()) {
            let pairs: Vec<(usize, usize)> =
                down_slots.iter().copied().zip(perm.into_iter().copied()).collect();
            let atom = Atom::new(saddles.to_vec(), &pairs, &sector0)
                .expect("slot bijection is a perfect matching");
            if atom_validate(&atom).is_valid() {
                out.push(atom);
            }
        }
    }
    out
}

/// Unordered partitions of the sorted set `elems` into non-empty groups;
/// groups and the group lists are kept sorted for determinism.
pub(crate) fn set_partitions(elems: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let Some((&first, rest)) = elems.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for sub in set_partitions(rest) {
        for i in 0..sub.len() {
            let mut grouping = sub.clone();
            grouping[i].insert(0, first);
            grouping.sort_by_key(|g| g[0]);
            out.push(grouping);
        }
        let mut grouping = sub;
        grouping.insert(0, vec![first]);
        out.push(grouping);
    }
    out.sort();
    out
}

pub(crate) fn enumerate_molecules(
    p: u32,
    q: u32,
    r: u32,
) -> Result<Vec<FramedMolecule>, CellsError> {
    let ground: Vec<u32> = (1..=q).collect();
    let mut by_key: BTreeMap<CanonicalKey, FramedMolecule> = BTreeMap::new();
    for blocks in ordered_partitions_of(&ground) {
        let framing = OrderedPartition::new(q, blocks).expect("generated partition");
        // per block: every grouping into atom supports × every atom choice
        let per_block: Vec<Vec<Vec<PlacedAtom>>> = framing
            .blocks()
            .iter()
            .enumerate()
            .map(|(b, blk)| {
                let mut options = Vec::new();
                for grouping in set_partitions(blk) {
                    let per_group: Vec<Vec<Atom>> =
                        grouping.iter().map(|g| atoms_on(g)).collect();
                    if per_group.iter().any(Vec::is_empty) {
                        continue;
                    }
                    for combo in per_group.iter().multi_cartesian_product() {
                        options.push(
                            combo
                                .into_iter()
                                .map(|a| PlacedAtom { block: b, atom: a.clone() })
                                .collect(),
                        );
                    }
                }
                options
            })
            .collect();
        for assignment in per_block.iter().multi_cartesian_product() {
            let atoms: Vec<PlacedAtom> =
                assignment.into_iter().flatten().cloned().collect();
            complete_with_annuli(p, r, &framing, atoms, &mut by_key)?;
        }
    }
    Ok(by_key.into_values().collect())
}

/// Extends a fixed atom layout by every legal annulus matching, keeping the
/// molecules that validate.
fn complete_with_annuli(
    p: u32,
    r: u32,
    framing: &OrderedPartition,
    atoms: Vec<PlacedAtom>,
    by_key: &mut BTreeMap<CanonicalKey, FramedMolecule>,
) -> Result<(), CellsError> {
    let boundaries = atoms
        .iter()
        .map(|pa| atom_boundary(&pa.atom))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CellsError::Integrity(format!("enumerated atom has no boundary: {e}")))?;
    let mut downs: Vec<(CircleRef, usize)> = Vec::new();
    let mut ups: Vec<(CircleRef, usize)> = Vec::new();
    for (ai, circles) in boundaries.iter().enumerate() {
        for (ci, c) in circles.iter().enumerate() {
            let slot = (CircleRef { atom: ai, circle: ci }, atoms[ai].block);
            match c.kind {
                SectorKind::Down => downs.push(slot),
                SectorKind::Up => ups.push(slot),
            }
        }
    }
    let (p, r) = (p as usize, r as usize);
    if downs.len() < p || ups.len() < r || downs.len() - p != ups.len() - r {
        return Ok(());
    }

    let q = framing.q();
    let min_labels: Vec<u32> = (q + 1..=q + p as u32).collect();
    let max_labels: Vec<u32> = (q + p as u32 + 1..=q + (p + r) as u32).collect();

    // assign each down circle a minimum or an earlier up circle, then cap
    // the leftover up circles with the maxima in every order
    fn assign(
        k: usize,
        downs: &[(CircleRef, usize)],
        ups: &[(CircleRef, usize)],
        min_used: &mut [bool],
        up_used: &mut [bool],
        annuli: &mut Vec<Annulus>,
        finish: &mut dyn FnMut(&[Annulus], &[bool]) -> Result<(), CellsError>,
        min_labels: &[u32],
    ) -> Result<(), CellsError> {
        if k == downs.len() {
            if min_used.iter().any(|u| !u) {
                return Ok(());
            }
            return finish(annuli, up_used);
        }
        let (down_ref, down_block) = downs[k];
        for i in 0..min_labels.len() {
            if min_used[i] {
                continue;
            }
            min_used[i] = true;
            annuli.push(Annulus {
                lower: LowerEnd::Min(min_labels[i]),
                upper: UpperEnd::Circle(down_ref),
            });
            assign(k + 1, downs, ups, min_used, up_used, annuli, finish, min_labels)?;
            annuli.pop();
            min_used[i] = false;
        }
        for j in 0..ups.len() {
            if up_used[j] || ups[j].1 >= down_block {
                continue;
            }
            up_used[j] = true;
            annuli.push(Annulus {
                lower: LowerEnd::Circle(ups[j].0),
                upper: UpperEnd::Circle(down_ref),
            });
            assign(k + 1, downs, ups, min_used, up_used, annuli, finish, min_labels)?;
            annuli.pop();
            up_used[j] = false;
        }
        Ok(())
    }

    let mut finish = |annuli: &[Annulus], up_used: &[bool]| -> Result<(), CellsError> {
        let free_ups: Vec<CircleRef> = ups
            .iter()
            .enumerate()
            .filter(|(j, _)| !up_used[*j])
            .map(|(_, &(c, _))| c)
            .collect();
        if free_ups.len() != r {
            return Ok(());
        }
        for label_order in max_labels.iter().permutations(r) {
            let mut all = annuli.to_vec();
            for (&up_ref, &label) in free_ups.iter().zip(label_order) {
                all.push(Annulus {
                    lower: LowerEnd::Circle(up_ref),
                    upper: UpperEnd::Max(label),
                });
            }
            let molecule = FramedMolecule::new(
                p as u32,
                r as u32,
                framing.clone(),
                atoms.clone(),
                all,
            )?;
            if molecule_validate(&molecule).is_valid() {
                let key = canonical_key(&molecule)?;
                by_key.entry(key).or_insert(molecule);
            }
        }
        Ok(())
    };

    let mut min_used = vec![false; p];
    let mut up_used = vec![false; ups.len()];
    let mut annuli = Vec::new();
    assign(
        0,
        &downs,
        &ups,
        &mut min_used,
        &mut up_used,
        &mut annuli,
        &mut finish,
        &min_labels,
    )
}
