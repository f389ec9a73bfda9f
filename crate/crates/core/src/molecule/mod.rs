//! Framed numbered molecules: leveled atoms joined by annuli.
//!
//! A molecule encodes a Morse function with numbered critical points up to
//! fiberwise equivalence. Saddles `1..=q` are grouped by critical value into
//! the blocks of an ordered partition (the *framing*); each block's level
//! set decomposes into atoms. Minima carry labels `q+1..=q+p`, maxima
//! `q+p+1..=q+p+r`. Every boundary circle of every atom is capped by exactly
//! one annulus: a Down circle connects to a minimum or to an Up circle of an
//! atom at a strictly earlier block, an Up circle to a maximum or to a Down
//! circle of a strictly later block. The union must be connected, and the
//! parameters must fit a closed orientable surface:
//! `genus = (2 - p + q - r) / 2` a non-negative integer.

mod atom;
mod canonical;

pub use atom::{
    atom_boundary, atom_validate, Atom, AtomError, AtomReport, AtomViolation, BoundaryCircle,
    Corner, SectorKind, Slot,
};
pub use canonical::{canonical_key, CanonicalKey};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::permutohedron::OrderedPartition;

/// Genus of the closed surface carrying `p` minima, `q` saddles, `r`
/// maxima, if one exists.
pub fn genus(p: u32, q: u32, r: u32) -> Option<u32> {
    let chi = p as i64 - q as i64 + r as i64;
    let doubled = 2 - chi;
    if doubled < 0 || doubled % 2 != 0 {
        None
    } else {
        Some((doubled / 2) as u32)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoleculeError {
    #[error("atom index {0} out of range")]
    AtomIndexOutOfRange(usize),
    #[error("block index {0} out of range")]
    BlockIndexOutOfRange(usize),
    #[error(transparent)]
    Atom(#[from] AtomError),
    #[error("molecule is not valid here: {0}")]
    Invalid(String),
}

/// An atom placed at a framing block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedAtom {
    pub block: usize,
    pub atom: Atom,
}

/// Reference to one boundary circle: `circle` indexes the canonical
/// [`atom_boundary`] order of the atom at position `atom`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircleRef {
    pub atom: usize,
    pub circle: usize,
}

/// Lower end of an annulus: a minimum or the Up circle it grows out of.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LowerEnd {
    Min(u32),
    Circle(CircleRef),
}

/// Upper end of an annulus: a maximum or the Down circle it runs into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UpperEnd {
    Max(u32),
    Circle(CircleRef),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annulus {
    pub lower: LowerEnd,
    pub upper: UpperEnd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FramedMolecule {
    p: u32,
    r: u32,
    framing: OrderedPartition,
    atoms: Vec<PlacedAtom>,
    annuli: Vec<Annulus>,
}

impl FramedMolecule {
    /// Structural construction; deep invariants are checked by
    /// [`molecule_validate`] so that invalid molecules remain representable.
    pub fn new(
        p: u32,
        r: u32,
        framing: OrderedPartition,
        atoms: Vec<PlacedAtom>,
        annuli: Vec<Annulus>,
    ) -> Result<Self, MoleculeError> {
        for pa in &atoms {
            if pa.block >= framing.block_count() {
                return Err(MoleculeError::BlockIndexOutOfRange(pa.block));
            }
        }
        let circle_atom_ok = |c: &CircleRef| c.atom < atoms.len();
        for a in &annuli {
            if let LowerEnd::Circle(c) = &a.lower {
                if !circle_atom_ok(c) {
                    return Err(MoleculeError::AtomIndexOutOfRange(c.atom));
                }
            }
            if let UpperEnd::Circle(c) = &a.upper {
                if !circle_atom_ok(c) {
                    return Err(MoleculeError::AtomIndexOutOfRange(c.atom));
                }
            }
        }
        Ok(Self { p, r, framing, atoms, annuli })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.framing.q()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// The ordered partition of saddles by level.
    pub fn framing(&self) -> &OrderedPartition {
        &self.framing
    }

    pub fn atoms(&self) -> &[PlacedAtom] {
        &self.atoms
    }

    pub fn annuli(&self) -> &[Annulus] {
        &self.annuli
    }

    pub fn genus(&self) -> Option<u32> {
        genus(self.p, self.q(), self.r)
    }

    pub fn min_labels(&self) -> std::ops::RangeInclusive<u32> {
        self.q() + 1..=self.q() + self.p
    }

    pub fn max_labels(&self) -> std::ops::RangeInclusive<u32> {
        self.q() + self.p + 1..=self.q() + self.p + self.r
    }

    /// Boundary circles of every atom, in canonical order.
    pub fn boundaries(&self) -> Result<Vec<Vec<BoundaryCircle>>, MoleculeError> {
        self.atoms
            .iter()
            .map(|pa| atom_boundary(&pa.atom).map_err(MoleculeError::from))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MoleculeViolation {
    /// `(2 - p + q - r)` negative or odd.
    BadGenus { p: u32, q: u32, r: u32 },
    AtomInvalid { atom: usize, violation: AtomViolation },
    SaddleOutOfRange { atom: usize, label: u32 },
    /// The saddles of the atoms assigned to this block do not partition it.
    BlockCoverage { block: usize },
    BadCircleRef { annulus: usize },
    /// Lower ends must be Up circles, upper ends Down circles.
    WrongCircleKind { annulus: usize },
    /// An annulus joins circles whose blocks are not strictly increasing.
    Monotonicity { annulus: usize },
    UnmatchedCircle { atom: usize, circle: usize },
    DoublyMatchedCircle { atom: usize, circle: usize },
    BadExtremumLabel { label: u32 },
    UnusedExtremum { label: u32 },
    DuplicateExtremum { label: u32 },
    Disconnected,
}

impl std::fmt::Display for MoleculeViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MoleculeReport {
    pub violations: Vec<MoleculeViolation>,
}

impl MoleculeReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports every violated molecule invariant (empty report = valid).
pub fn molecule_validate(m: &FramedMolecule) -> MoleculeReport {
    let mut v = Vec::new();
    let (p, q, r) = (m.p(), m.q(), m.r());
    if genus(p, q, r).is_none() {
        v.push(MoleculeViolation::BadGenus { p, q, r });
    }

    // atoms: individually valid, saddle labels in range, blocks covered
    let mut block_cover: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); m.framing().block_count()];
    let mut coverage_ok = vec![true; m.framing().block_count()];
    for (i, pa) in m.atoms().iter().enumerate() {
        for violation in atom_validate(&pa.atom).violations {
            v.push(MoleculeViolation::AtomInvalid { atom: i, violation });
        }
        for &s in pa.atom.saddles() {
            if s == 0 || s > q {
                v.push(MoleculeViolation::SaddleOutOfRange { atom: i, label: s });
            } else if !block_cover[pa.block].insert(s) {
                coverage_ok[pa.block] = false;
            }
        }
    }
    for (b, blk) in m.framing().blocks().iter().enumerate() {
        let want: BTreeSet<u32> = blk.iter().copied().collect();
        if !coverage_ok[b] || block_cover[b] != want {
            v.push(MoleculeViolation::BlockCoverage { block: b });
        }
    }

    // annuli need computable boundaries; atom violations already reported
    let Ok(boundaries) = m.boundaries() else {
        return MoleculeReport { violations: v };
    };

    let mut lower_seen: BTreeMap<CircleRef, usize> = BTreeMap::new();
    let mut upper_seen: BTreeMap<CircleRef, usize> = BTreeMap::new();
    let mut mins_seen: BTreeMap<u32, usize> = BTreeMap::new();
    let mut maxs_seen: BTreeMap<u32, usize> = BTreeMap::new();
    for (i, ann) in m.annuli().iter().enumerate() {
        match ann.lower {
            LowerEnd::Min(label) => {
                if !m.min_labels().contains(&label) {
                    v.push(MoleculeViolation::BadExtremumLabel { label });
                } else {
                    *mins_seen.entry(label).or_default() += 1;
                }
            }
            LowerEnd::Circle(c) => match boundaries[c.atom].get(c.circle) {
                None => v.push(MoleculeViolation::BadCircleRef { annulus: i }),
                Some(circle) => {
                    if circle.kind != SectorKind::Up {
                        v.push(MoleculeViolation::WrongCircleKind { annulus: i });
                    }
                    *lower_seen.entry(c).or_default() += 1;
                }
            },
        }
        match ann.upper {
            UpperEnd::Max(label) => {
                if !m.max_labels().contains(&label) {
                    v.push(MoleculeViolation::BadExtremumLabel { label });
                } else {
                    *maxs_seen.entry(label).or_default() += 1;
                }
            }
            UpperEnd::Circle(c) => match boundaries[c.atom].get(c.circle) {
                None => v.push(MoleculeViolation::BadCircleRef { annulus: i }),
                Some(circle) => {
                    if circle.kind != SectorKind::Down {
                        v.push(MoleculeViolation::WrongCircleKind { annulus: i });
                    }
                    *upper_seen.entry(c).or_default() += 1;
                }
            },
        }
        // a circle-circle annulus must climb strictly in the level order
        if let (LowerEnd::Circle(lo), UpperEnd::Circle(hi)) = (&ann.lower, &ann.upper) {
            if m.atoms()[lo.atom].block >= m.atoms()[hi.atom].block {
                v.push(MoleculeViolation::Monotonicity { annulus: i });
            }
        }
    }

    // perfect matching on circles and extrema
    for (ai, circles) in boundaries.iter().enumerate() {
        for (ci, circle) in circles.iter().enumerate() {
            let r = CircleRef { atom: ai, circle: ci };
            let count = match circle.kind {
                SectorKind::Up => lower_seen.get(&r).copied().unwrap_or(0),
                SectorKind::Down => upper_seen.get(&r).copied().unwrap_or(0),
            };
            match count {
                0 => v.push(MoleculeViolation::UnmatchedCircle { atom: ai, circle: ci }),
                1 => {}
                _ => v.push(MoleculeViolation::DoublyMatchedCircle { atom: ai, circle: ci }),
            }
        }
    }
    for label in m.min_labels() {
        match mins_seen.get(&label).copied().unwrap_or(0) {
            0 => v.push(MoleculeViolation::UnusedExtremum { label }),
            1 => {}
            _ => v.push(MoleculeViolation::DuplicateExtremum { label }),
        }
    }
    for label in m.max_labels() {
        match maxs_seen.get(&label).copied().unwrap_or(0) {
            0 => v.push(MoleculeViolation::UnusedExtremum { label }),
            1 => {}
            _ => v.push(MoleculeViolation::DuplicateExtremum { label }),
        }
    }

    if !is_connected(m) {
        v.push(MoleculeViolation::Disconnected);
    }

    MoleculeReport { violations: v }
}

/// Connectivity of the union of atoms, annuli and extremum caps.
fn is_connected(m: &FramedMolecule) -> bool {
    // nodes: atoms 0..n, then extrema keyed by label
    let n = m.atoms().len();
    let extrema: Vec<u32> = m.min_labels().chain(m.max_labels()).collect();
    if n == 0 {
        return extrema.len() <= 1;
    }
    let node_of_extremum = |label: u32| -> Option<usize> {
        extrema.iter().position(|&l| l == label).map(|i| n + i)
    };
    let total = n + extrema.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); total];
    for ann in m.annuli() {
        let lo = match ann.lower {
            LowerEnd::Min(label) => node_of_extremum(label),
            LowerEnd::Circle(c) => Some(c.atom),
        };
        let hi = match ann.upper {
            UpperEnd::Max(label) => node_of_extremum(label),
            UpperEnd::Circle(c) => Some(c.atom),
        };
        if let (Some(a), Some(b)) = (lo, hi) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; total];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count == total
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use SectorKind::{Down, Up};

    fn partition(q: u32, blocks: &[&[u32]]) -> OrderedPartition {
        OrderedPartition::new(q, blocks.iter().map(|b| b.to_vec()).collect()).unwrap()
    }

    /// Sphere molecule: one saddle, one minimum, two maxima.
    pub(crate) fn sphere_molecule() -> FramedMolecule {
        let atom = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        // circles: 0 = Down [(1,1),(1,3)], 1 = Up [(1,0)], 2 = Up [(1,2)]
        FramedMolecule::new(
            1,
            2,
            partition(1, &[&[1]]),
            vec![PlacedAtom { block: 0, atom }],
            vec![
                Annulus {
                    lower: LowerEnd::Min(2),
                    upper: UpperEnd::Circle(CircleRef { atom: 0, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Max(3),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 2 }),
                    upper: UpperEnd::Max(4),
                },
            ],
        )
        .unwrap()
    }

    /// Torus molecule with framing ({1},{2}).
    pub(crate) fn torus_two_level_molecule() -> FramedMolecule {
        let lower = Atom::new(vec![1], &[(0, 3), (1, 2)], &[Down]).unwrap();
        // circles: 0 = Down [(1,0),(1,2)], 1 = Up [(1,1)], 2 = Up [(1,3)]
        let upper = Atom::new(vec![2], &[(0, 1), (2, 3)], &[Down]).unwrap();
        // circles: 0 = Down [(2,0)], 1 = Down [(2,2)], 2 = Up [(2,1),(2,3)]
        FramedMolecule::new(
            1,
            1,
            partition(2, &[&[1], &[2]]),
            vec![
                PlacedAtom { block: 0, atom: lower },
                PlacedAtom { block: 1, atom: upper },
            ],
            vec![
                Annulus {
                    lower: LowerEnd::Min(3),
                    upper: UpperEnd::Circle(CircleRef { atom: 0, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Circle(CircleRef { atom: 1, circle: 1 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 2 }),
                    upper: UpperEnd::Circle(CircleRef { atom: 1, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 1, circle: 2 }),
                    upper: UpperEnd::Max(4),
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn genus_arithmetic() {
        assert_eq!(genus(1, 1, 2), Some(0));
        assert_eq!(genus(1, 2, 1), Some(1));
        assert_eq!(genus(1, 3, 2), Some(1));
        assert_eq!(genus(2, 1, 1), Some(0));
        assert_eq!(genus(1, 1, 1), None); // odd
        assert_eq!(genus(2, 1, 3), None); // negative
    }

    #[test]
    fn sphere_molecule_is_valid() {
        let m = sphere_molecule();
        let report = molecule_validate(&m);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(m.genus(), Some(0));
        assert_eq!(m.framing().blocks(), &[vec![1]]);
    }

    #[test]
    fn torus_two_level_molecule_is_valid() {
        let report = molecule_validate(&torus_two_level_molecule());
        assert!(report.is_valid(), "{:?}", report.violations);
    }

    #[test]
    fn same_atom_annulus_violates_monotonicity() {
        let atom = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let m = FramedMolecule::new(
            1,
            2,
            partition(1, &[&[1]]),
            vec![PlacedAtom { block: 0, atom }],
            vec![
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Circle(CircleRef { atom: 0, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 2 }),
                    upper: UpperEnd::Max(3),
                },
            ],
        )
        .unwrap();
        let report = molecule_validate(&m);
        assert!(report
            .violations
            .contains(&MoleculeViolation::Monotonicity { annulus: 0 }));
        assert!(report
            .violations
            .contains(&MoleculeViolation::UnusedExtremum { label: 2 }));
    }

    #[test]
    fn impossible_parameters_are_flagged() {
        let atom = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let m = FramedMolecule::new(
            1,
            1,
            partition(1, &[&[1]]),
            vec![PlacedAtom { block: 0, atom }],
            vec![],
        )
        .unwrap();
        let report = molecule_validate(&m);
        assert!(report
            .violations
            .contains(&MoleculeViolation::BadGenus { p: 1, q: 1, r: 1 }));
    }

    #[test]
    fn unmatched_and_double_matched_circles_are_flagged() {
        let atom = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let m = FramedMolecule::new(
            1,
            2,
            partition(1, &[&[1]]),
            vec![PlacedAtom { block: 0, atom }],
            vec![
                Annulus {
                    lower: LowerEnd::Min(2),
                    upper: UpperEnd::Circle(CircleRef { atom: 0, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Max(3),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Max(4),
                },
            ],
        )
        .unwrap();
        let report = molecule_validate(&m);
        assert!(report
            .violations
            .contains(&MoleculeViolation::DoublyMatchedCircle { atom: 0, circle: 1 }));
        assert!(report
            .violations
            .contains(&MoleculeViolation::UnmatchedCircle { atom: 0, circle: 2 }));
    }

    #[test]
    fn disconnected_molecule_is_flagged() {
        // two sphere components sharing no annulus
        let a1 = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let a2 = Atom::new(vec![2], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let m = FramedMolecule::new(
            2,
            4,
            partition(2, &[&[1], &[2]]),
            vec![
                PlacedAtom { block: 0, atom: a1 },
                PlacedAtom { block: 1, atom: a2 },
            ],
            vec![
                Annulus {
                    lower: LowerEnd::Min(3),
                    upper: UpperEnd::Circle(CircleRef { atom: 0, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 1 }),
                    upper: UpperEnd::Max(5),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 0, circle: 2 }),
                    upper: UpperEnd::Max(6),
                },
                Annulus {
                    lower: LowerEnd::Min(4),
                    upper: UpperEnd::Circle(CircleRef { atom: 1, circle: 0 }),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 1, circle: 1 }),
                    upper: UpperEnd::Max(7),
                },
                Annulus {
                    lower: LowerEnd::Circle(CircleRef { atom: 1, circle: 2 }),
                    upper: UpperEnd::Max(8),
                },
            ],
        )
        .unwrap();
        let report = molecule_validate(&m);
        assert!(report.violations.contains(&MoleculeViolation::Disconnected));
    }
}
