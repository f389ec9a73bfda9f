//! Level-circle surgery: the refinement map on molecules.
//!
//! Splitting a framing block into ordered sub-blocks perturbs the function
//! so the block's saddles spread over consecutive critical values. The
//! effect on an atom is simulated by sweeping a family of level circles
//! upward through it:
//!
//! * the sweep starts at the atom's Down boundary circles, *reversed* —
//!   level circles are oriented with the sublevel region on the left, which
//!   traverses Down sectors backward (prong `s+1` to prong `s`) and Up
//!   sectors forward (prong `s` to `s+1`);
//! * crossing one saddle excises its two Down-sector passages and
//!   reconnects the four strand ends through its two Up sectors, changing
//!   the circle count by exactly one;
//! * at each sub-block, the circles meeting the sub-block pinch onto the new
//!   critical level: cutting their passages at the sub-block's saddles
//!   leaves strands which are precisely the edges of the new atoms, and the
//!   cut circles are the new atoms' Down boundary circles. Circles created
//!   by the sub-block's surgeries are its Up boundary circles; circles not
//!   meeting the sub-block pass through as annuli;
//! * after the last sub-block the family must coincide with the atom's Up
//!   boundary circles.
//!
//! Tags on the swept circles record where each original boundary circle
//! ends up and which internal annuli appear, so a whole molecule can be
//! rethreaded through [`split_molecule`].

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::molecule::{
    atom_boundary, atom_validate, molecule_validate, Annulus, Atom, AtomError, AtomViolation,
    BoundaryCircle, CircleRef, Corner, FramedMolecule, LowerEnd, MoleculeViolation, PlacedAtom,
    SectorKind, UpperEnd,
};
use crate::permutohedron::{refines_or_equal, OrderedPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("atom is invalid: {0:?}")]
    InvalidAtom(Vec<AtomViolation>),
    #[error("parts do not form an ordered partition of the atom's saddles")]
    BadPartition,
    #[error("fine partition does not refine the molecule's framing")]
    NotARefinement,
    #[error("molecule is invalid: {0:?}")]
    InvalidMolecule(Vec<MoleculeViolation>),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("internal surgery inconsistency: {0}")]
    Integrity(String),
}

/// A boundary circle of a new atom produced by a sweep: `atom` indexes the
/// sub-block's atom list, `circle` its canonical boundary order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct NewCircle {
    pub stage: usize,
    pub atom: usize,
    pub circle: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tag {
    OrigDown(usize),
    Created(NewCircle),
    Pending,
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// New atoms per sub-block, each list sorted by least saddle.
    pub stages: Vec<Vec<Atom>>,
    /// Circle-count change of each individual saddle surgery, in processing
    /// order; every entry is +1 or -1.
    pub deltas: Vec<i64>,
    /// Where each original Down circle (by canonical boundary index) lands.
    pub down_destinations: BTreeMap<usize, NewCircle>,
    /// Which new Up circle each original Up circle continues.
    pub up_sources: BTreeMap<usize, NewCircle>,
    /// Annuli internal to the split: Up circle of an earlier stage matched
    /// to a Down circle of a later one.
    pub internal_annuli: Vec<(NewCircle, NewCircle)>,
}

/// Sweeps `atom` through the ordered partition `parts` of its saddles.
pub fn sweep_atom(atom: &Atom, parts: &[Vec<u32>]) -> Result<SweepOutcome, SurgeryError> {
    let report = atom_validate(atom);
    if !report.is_valid() {
        return Err(SurgeryError::InvalidAtom(report.violations));
    }
    let mut claimed: BTreeSet<u32> = BTreeSet::new();
    for part in parts {
        if part.is_empty() {
            return Err(SurgeryError::BadPartition);
        }
        for &s in part {
            if !claimed.insert(s) {
                return Err(SurgeryError::BadPartition);
            }
        }
    }
    if claimed != atom.saddles().iter().copied().collect() {
        return Err(SurgeryError::BadPartition);
    }

    let circles0 = atom_boundary(atom)?;
    let mut state: Vec<(Tag, Vec<Corner>)> = circles0
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == SectorKind::Down)
        .map(|(i, c)| {
            let mut passages = c.corners.clone();
            passages.reverse();
            (Tag::OrigDown(i), passages)
        })
        .collect();

    let mut out = SweepOutcome {
        stages: Vec::with_capacity(parts.len()),
        deltas: Vec::new(),
        down_destinations: BTreeMap::new(),
        up_sources: BTreeMap::new(),
        internal_annuli: Vec::new(),
    };

    for (stage, block) in parts.iter().enumerate() {
        let block_set: BTreeSet<u32> = block.iter().copied().collect();

        // strands of the pinched circles = edges of the new atoms
        let mut strand_edges: Vec<((u32, u8), (u32, u8))> = Vec::new();
        for (_, passages) in &state {
            let hits: Vec<usize> = (0..passages.len())
                .filter(|&j| block_set.contains(&passages[j].saddle))
                .collect();
            for (k, &j) in hits.iter().enumerate() {
                let jn = hits[(k + 1) % hits.len()];
                let from = passages[j]; // exits at prong `sector`
                let to = passages[jn]; // enters at prong `sector + 1`
                strand_edges
                    .push(((from.saddle, from.sector), (to.saddle, (to.sector + 1) % 4)));
            }
        }

        // group the sub-block's saddles by strand connectivity
        let labels: Vec<u32> = block_set.iter().copied().collect();
        let idx_of = |s: u32| labels.binary_search(&s).expect("block saddle");
        let mut comp: Vec<usize> = (0..labels.len()).collect();
        fn find(comp: &mut Vec<usize>, i: usize) -> usize {
            if comp[i] != i {
                let root = find(comp, comp[i]);
                comp[i] = root;
            }
            comp[i]
        }
        for &((a, _), (b, _)) in &strand_edges {
            let (ra, rb) = (find(&mut comp, idx_of(a)), find(&mut comp, idx_of(b)));
            comp[ra] = rb;
        }
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        for (i, &label) in labels.iter().enumerate() {
            groups.entry(find(&mut comp, i)).or_default().push(label);
        }
        let mut groups: Vec<Vec<u32>> = groups.into_values().collect();
        groups.sort_by_key(|g| g[0]);
        let group_of = |s: u32| -> usize {
            groups.iter().position(|g| g.binary_search(&s).is_ok()).expect("grouped")
        };

        let stage_atoms: Vec<Atom> = groups
            .iter()
            .enumerate()
            .map(|(gi, saddles)| {
                let slot = |s: u32, rot: u8| -> usize {
                    4 * saddles.binary_search(&s).expect("component saddle") + rot as usize
                };
                let pairs: Vec<(usize, usize)> = strand_edges
                    .iter()
                    .filter(|((a, _), _)| group_of(*a) == gi)
                    .map(|&((a, ar), (b, br))| (slot(a, ar), slot(b, br)))
                    .collect();
                let sector0: Vec<SectorKind> = saddles
                    .iter()
                    .map(|&s| {
                        let pos = atom.position_of(s).expect("own saddle");
                        atom.sector_kind(pos, 0)
                    })
                    .collect();
                Atom::new(saddles.clone(), &pairs, &sector0)
                    .map_err(|e| SurgeryError::Integrity(format!("new atom malformed: {e}")))
            })
            .collect::<Result<_, _>>()?;
        for a in &stage_atoms {
            let rep = atom_validate(a);
            if !rep.is_valid() {
                return Err(SurgeryError::Integrity(format!(
                    "new atom violates invariants: {:?}",
                    rep.violations
                )));
            }
        }
        let stage_bounds: Vec<Vec<BoundaryCircle>> = stage_atoms
            .iter()
            .map(|a| atom_boundary(a).map_err(SurgeryError::from))
            .collect::<Result<_, _>>()?;

        // circles meeting the sub-block are the new atoms' Down circles
        let mut down_targets: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (tag, passages) in &state {
            let restricted: Vec<Corner> = passages
                .iter()
                .copied()
                .filter(|c| block_set.contains(&c.saddle))
                .collect();
            if restricted.is_empty() {
                continue;
            }
            let gi = group_of(restricted[0].saddle);
            let mut rev = restricted;
            rev.reverse();
            let norm = BoundaryCircle::normalized(SectorKind::Down, rev);
            let ci = stage_bounds[gi].binary_search(&norm).map_err(|_| {
                SurgeryError::Integrity(format!(
                    "pinched circle does not appear as a Down boundary of stage {stage}"
                ))
            })?;
            if !down_targets.insert((gi, ci)) {
                return Err(SurgeryError::Integrity(
                    "two circles pinched onto the same Down boundary".into(),
                ));
            }
            let dest = NewCircle { stage, atom: gi, circle: ci };
            match tag {
                Tag::OrigDown(i) => {
                    out.down_destinations.insert(*i, dest);
                }
                Tag::Created(c) => out.internal_annuli.push((*c, dest)),
                Tag::Pending => {
                    return Err(SurgeryError::Integrity("pending tag across stages".into()))
                }
            }
        }
        let total_downs: usize = stage_bounds
            .iter()
            .map(|b| b.iter().filter(|c| c.kind == SectorKind::Down).count())
            .sum();
        if down_targets.len() != total_downs {
            return Err(SurgeryError::Integrity(
                "new Down boundary circles not exhausted by pinched circles".into(),
            ));
        }

        // per-saddle surgeries, ascending label order within the sub-block
        for &v in block_set.iter() {
            let pos = atom.position_of(v).expect("own saddle");
            let d = atom.down_sector_start(pos);
            let p1 = Corner { saddle: v, sector: d };
            let p2 = Corner { saddle: v, sector: d + 2 };
            let u1 = Corner { saddle: v, sector: d + 1 };
            let u2 = Corner { saddle: v, sector: (d + 3) % 4 };
            let locate = |state: &Vec<(Tag, Vec<Corner>)>, c: Corner| -> Option<(usize, usize)> {
                state.iter().enumerate().find_map(|(ci, (_, ps))| {
                    ps.iter().position(|&x| x == c).map(|pi| (ci, pi))
                })
            };
            let (ci1, pi1) = locate(&state, p1)
                .ok_or_else(|| SurgeryError::Integrity(format!("passage {p1:?} missing")))?;
            let (ci2, pi2) = locate(&state, p2)
                .ok_or_else(|| SurgeryError::Integrity(format!("passage {p2:?} missing")))?;
            let cyclic_segment = |ps: &[Corner], after: usize, before: usize| -> Vec<Corner> {
                // entries strictly after `after` and strictly before `before`
                let n = ps.len();
                let mut seg = Vec::new();
                let mut j = (after + 1) % n;
                while j != before {
                    seg.push(ps[j]);
                    j = (j + 1) % n;
                }
                seg
            };
            if ci1 == ci2 {
                let ps = state[ci1].1.clone();
                let x = cyclic_segment(&ps, pi1, pi2);
                let y = cyclic_segment(&ps, pi2, pi1);
                let mut c1 = vec![u1];
                c1.extend(y);
                let mut c2 = vec![u2];
                c2.extend(x);
                state[ci1] = (Tag::Pending, c1);
                state.push((Tag::Pending, c2));
                out.deltas.push(1);
            } else {
                let a = cyclic_segment(&state[ci1].1, pi1, pi1);
                let b = cyclic_segment(&state[ci2].1, pi2, pi2);
                let mut merged = vec![u1];
                merged.extend(b);
                merged.push(u2);
                merged.extend(a);
                let (keep, drop) = (ci1.min(ci2), ci1.max(ci2));
                state[keep] = (Tag::Pending, merged);
                state.remove(drop);
                out.deltas.push(-1);
            }
        }

        // circles created this stage are the new atoms' Up circles
        let mut up_targets: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (tag, passages) in state.iter_mut() {
            if *tag != Tag::Pending {
                continue;
            }
            let restricted: Vec<Corner> = passages
                .iter()
                .copied()
                .filter(|c| block_set.contains(&c.saddle))
                .collect();
            if restricted.is_empty() {
                return Err(SurgeryError::Integrity(
                    "surgered circle lost all sub-block passages".into(),
                ));
            }
            let gi = group_of(restricted[0].saddle);
            let norm = BoundaryCircle::normalized(SectorKind::Up, restricted);
            let ci = stage_bounds[gi].binary_search(&norm).map_err(|_| {
                SurgeryError::Integrity(format!(
                    "created circle does not appear as an Up boundary of stage {stage}"
                ))
            })?;
            if !up_targets.insert((gi, ci)) {
                return Err(SurgeryError::Integrity(
                    "two created circles claim the same Up boundary".into(),
                ));
            }
            *tag = Tag::Created(NewCircle { stage, atom: gi, circle: ci });
        }
        let total_ups: usize = stage_bounds
            .iter()
            .map(|b| b.iter().filter(|c| c.kind == SectorKind::Up).count())
            .sum();
        if up_targets.len() != total_ups {
            return Err(SurgeryError::Integrity(
                "new Up boundary circles not exhausted by created circles".into(),
            ));
        }

        out.stages.push(stage_atoms);
    }

    // the final family must be the original Up boundary
    let expected_ups: Vec<usize> = circles0
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind == SectorKind::Up)
        .map(|(i, _)| i)
        .collect();
    if state.len() != expected_ups.len() {
        return Err(SurgeryError::Integrity(format!(
            "sweep finished with {} circles, atom has {} Up circles",
            state.len(),
            expected_ups.len()
        )));
    }
    for (tag, passages) in &state {
        let norm = BoundaryCircle::normalized(SectorKind::Up, passages.clone());
        let idx = circles0.binary_search(&norm).map_err(|_| {
            SurgeryError::Integrity("final circle is not an original Up boundary".into())
        })?;
        let Tag::Created(c) = tag else {
            return Err(SurgeryError::Integrity("final circle has no creation tag".into()));
        };
        if out.up_sources.insert(idx, *c).is_some() {
            return Err(SurgeryError::Integrity("original Up circle matched twice".into()));
        }
    }

    Ok(out)
}

/// Applies a framing refinement to a whole molecule: every atom is swept
/// through its induced ordered partition and the annuli are rethreaded.
pub fn split_molecule(
    m: &FramedMolecule,
    fine: &OrderedPartition,
) -> Result<FramedMolecule, SurgeryError> {
    let report = molecule_validate(m);
    if !report.is_valid() {
        return Err(SurgeryError::InvalidMolecule(report.violations));
    }
    if !refines_or_equal(fine, m.framing()) {
        return Err(SurgeryError::NotARefinement);
    }

    // sweep every atom through the fine blocks meeting it
    let mut outcomes: Vec<(SweepOutcome, Vec<usize>)> = Vec::with_capacity(m.atoms().len());
    for pa in m.atoms() {
        let mut parts: Vec<Vec<u32>> = Vec::new();
        let mut part_blocks: Vec<usize> = Vec::new();
        for (g, fb) in fine.blocks().iter().enumerate() {
            let part: Vec<u32> = fb
                .iter()
                .copied()
                .filter(|s| pa.atom.position_of(*s).is_some())
                .collect();
            if !part.is_empty() {
                parts.push(part);
                part_blocks.push(g);
            }
        }
        outcomes.push((sweep_atom(&pa.atom, &parts)?, part_blocks));
    }

    // lay out the new atoms and index them
    let mut new_atoms: Vec<PlacedAtom> = Vec::new();
    let mut global: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    for (old, (outcome, part_blocks)) in outcomes.iter().enumerate() {
        for (stage, atoms) in outcome.stages.iter().enumerate() {
            for (j, atom) in atoms.iter().enumerate() {
                global.insert((old, stage, j), new_atoms.len());
                new_atoms.push(PlacedAtom { block: part_blocks[stage], atom: atom.clone() });
            }
        }
    }
    let resolve = |old: usize, nc: &NewCircle| -> CircleRef {
        CircleRef { atom: global[&(old, nc.stage, nc.atom)], circle: nc.circle }
    };

    let mut annuli: Vec<Annulus> = Vec::new();
    for ann in m.annuli() {
        let lower = match ann.lower {
            LowerEnd::Min(label) => LowerEnd::Min(label),
            LowerEnd::Circle(c) => {
                let src = outcomes[c.atom].0.up_sources.get(&c.circle).ok_or_else(|| {
                    SurgeryError::Integrity("annulus lower end lost in sweep".into())
                })?;
                LowerEnd::Circle(resolve(c.atom, src))
            }
        };
        let upper = match ann.upper {
            UpperEnd::Max(label) => UpperEnd::Max(label),
            UpperEnd::Circle(c) => {
                let dst =
                    outcomes[c.atom].0.down_destinations.get(&c.circle).ok_or_else(|| {
                        SurgeryError::Integrity("annulus upper end lost in sweep".into())
                    })?;
                UpperEnd::Circle(resolve(c.atom, dst))
            }
        };
        annuli.push(Annulus { lower, upper });
    }
    for (old, (outcome, _)) in outcomes.iter().enumerate() {
        for (src, dst) in &outcome.internal_annuli {
            annuli.push(Annulus {
                lower: LowerEnd::Circle(resolve(old, src)),
                upper: UpperEnd::Circle(resolve(old, dst)),
            });
        }
    }

    let result = FramedMolecule::new(m.p(), m.r(), fine.clone(), new_atoms, annuli)
        .map_err(|e| SurgeryError::Integrity(format!("assembled molecule malformed: {e}")))?;
    let report = molecule_validate(&result);
    if !report.is_valid() {
        return Err(SurgeryError::Integrity(format!(
            "split molecule violates invariants: {:?}",
            report.violations
        )));
    }
    Ok(result)
}
