//! Atoms: ribbon-graph neighborhoods of connected saddle level components.
//!
//! An atom with `n` saddles is a connected 4-valent ribbon graph: each
//! saddle carries four half-edge *slots* `0..4` in counterclockwise rotation
//! order, and a perfect matching (the *pairing*) glues the `4n` slots into
//! `2n` edges. The corner between slots `t` and `t+1 (mod 4)` is *sector*
//! `t`; sector kinds alternate Down/Up around every saddle (the four
//! quadrants of a saddle point below/above the critical value).
//!
//! Thickening the graph produces a compact surface whose boundary circles
//! are the face walks of the ribbon structure. The walk convention used
//! throughout: standing in corner `(a, t)`, leave along slot `t+1`, cross
//! that edge to the paired slot `(b, u)`, and land in corner `(b, u)`. This
//! traverses every corner exactly once, with the thickened surface on the
//! left. An atom is valid only if every walk meets corners of a single kind;
//! the all-Down circles are the level circles just below the critical value,
//! the all-Up circles those just above.

use std::collections::BTreeSet;

use thiserror::Error;

/// Which side of the critical value a sector (or boundary circle) lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SectorKind {
    Down,
    Up,
}

impl SectorKind {
    pub fn flip(self) -> Self {
        match self {
            SectorKind::Down => SectorKind::Up,
            SectorKind::Up => SectorKind::Down,
        }
    }
}

/// Half-edge slot, encoded as `4 * saddle_position + rotation`.
pub type Slot = usize;

/// A corner passage: sector `sector` at the saddle with label `saddle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Corner {
    pub saddle: u32,
    pub sector: u8,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtomError {
    #[error("atom has no saddles")]
    NoSaddles,
    #[error("saddle label {0} repeated")]
    DuplicateSaddle(u32),
    #[error("expected one sector assignment per saddle")]
    SectorCountMismatch,
    #[error("slot {0} out of range for {1} saddles")]
    SlotOutOfRange(Slot, usize),
    #[error("slot {0} is paired more than once or with itself")]
    BadPairing(Slot),
    #[error("slot {0} left unpaired")]
    UnpairedSlot(Slot),
    #[error("boundary walk through {0:?} mixes Down and Up sectors")]
    MixedBoundaryWalk(Vec<Corner>),
}

/// See the module docs for the slot/sector conventions.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Atom {
    saddles: Vec<u32>,
    pairing: Vec<Slot>,
    sectors: Vec<[SectorKind; 4]>,
}

impl Atom {
    /// Builds an atom with alternating sectors fixed by each saddle's
    /// sector-0 kind.
    pub fn new(
        saddles: Vec<u32>,
        pairs: &[(Slot, Slot)],
        sector0: &[SectorKind],
    ) -> Result<Self, AtomError> {
        if sector0.len() != saddles.len() {
            return Err(AtomError::SectorCountMismatch);
        }
        let sectors = sector0
            .iter()
            .map(|&k| [k, k.flip(), k, k.flip()])
            .collect();
        Self::with_sector_table(saddles, pairs, sectors)
    }

    /// Builds an atom from an explicit sector table. Non-alternating tables
    /// are representable and flagged by [`atom_validate`].
    pub fn with_sector_table(
        saddles: Vec<u32>,
        pairs: &[(Slot, Slot)],
        sectors: Vec<[SectorKind; 4]>,
    ) -> Result<Self, AtomError> {
        if saddles.is_empty() {
            return Err(AtomError::NoSaddles);
        }
        let mut sorted = saddles.clone();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(AtomError::DuplicateSaddle(w[0]));
            }
        }
        if sectors.len() != saddles.len() {
            return Err(AtomError::SectorCountMismatch);
        }
        let n_slots = 4 * saddles.len();
        let mut pairing = vec![usize::MAX; n_slots];
        for &(a, b) in pairs {
            if a >= n_slots {
                return Err(AtomError::SlotOutOfRange(a, saddles.len()));
            }
            if b >= n_slots {
                return Err(AtomError::SlotOutOfRange(b, saddles.len()));
            }
            if a == b || pairing[a] != usize::MAX || pairing[b] != usize::MAX {
                return Err(AtomError::BadPairing(if a == b { a } else { b }));
            }
            pairing[a] = b;
            pairing[b] = a;
        }
        if let Some(s) = pairing.iter().position(|&p| p == usize::MAX) {
            return Err(AtomError::UnpairedSlot(s));
        }
        // store saddles ascending; remap slots accordingly
        if sorted != saddles {
            let mut order: Vec<usize> = (0..saddles.len()).collect();
            order.sort_by_key(|&i| saddles[i]);
            let mut new_pos = vec![0usize; saddles.len()];
            for (new, &old) in order.iter().enumerate() {
                new_pos[old] = new;
            }
            let remap = |s: Slot| -> Slot { 4 * new_pos[s / 4] + s % 4 };
            let mut new_pairing = vec![0usize; n_slots];
            for s in 0..n_slots {
                new_pairing[remap(s)] = remap(pairing[s]);
            }
            let mut new_sectors = vec![[SectorKind::Down; 4]; saddles.len()];
            for (old, &sec) in sectors.iter().enumerate() {
                new_sectors[new_pos[old]] = sec;
            }
            return Ok(Self { saddles: sorted, pairing: new_pairing, sectors: new_sectors });
        }
        Ok(Self { saddles, pairing, sectors })
    }

    pub fn saddles(&self) -> &[u32] {
        &self.saddles
    }

    pub fn saddle_count(&self) -> usize {
        self.saddles.len()
    }

    pub fn pairing(&self) -> &[Slot] {
        &self.pairing
    }

    pub fn sectors(&self) -> &[[SectorKind; 4]] {
        &self.sectors
    }

    pub fn position_of(&self, label: u32) -> Option<usize> {
        self.saddles.binary_search(&label).ok()
    }

    pub fn sector_kind(&self, pos: usize, sector: u8) -> SectorKind {
        self.sectors[pos][sector as usize]
    }

    /// `V - E = n - 2n` for the thickened surface.
    pub fn euler_characteristic(&self) -> i64 {
        -(self.saddles.len() as i64)
    }

    /// The sector index `d` such that sectors `d` and `d+2` at `pos` are
    /// Down (requires alternating sectors).
    pub fn down_sector_start(&self, pos: usize) -> u8 {
        if self.sectors[pos][0] == SectorKind::Down {
            0
        } else {
            1
        }
    }

    /// Re-roots the rotation at each saddle: new slot `(a, t)` is old slot
    /// `(a, (t + shift[a]) % 4)`. Produces an isomorphic atom.
    pub fn shifted(&self, shifts: &[u8]) -> Atom {
        assert_eq!(shifts.len(), self.saddles.len());
        let n_slots = self.pairing.len();
        let old_of = |a: usize, t: usize| 4 * a + (t + shifts[a] as usize) % 4;
        let new_of = |slot: Slot| {
            let (a, t) = (slot / 4, slot % 4);
            4 * a + (t + 4 - shifts[a] as usize) % 4
        };
        let mut pairing = vec![0usize; n_slots];
        for a in 0..self.saddles.len() {
            for t in 0..4 {
                pairing[4 * a + t] = new_of(self.pairing[old_of(a, t)]);
            }
        }
        let sectors = self
            .sectors
            .iter()
            .enumerate()
            .map(|(a, sec)| {
                let mut out = [SectorKind::Down; 4];
                for (t, slot) in out.iter_mut().enumerate() {
                    *slot = sec[(t + shifts[a] as usize) % 4];
                }
                out
            })
            .collect();
        Atom { saddles: self.saddles.clone(), pairing, sectors }
    }

    fn next_corner(&self, pos: usize, sector: u8) -> (usize, u8) {
        let out_slot = 4 * pos + (sector as usize + 1) % 4;
        let in_slot = self.pairing[out_slot];
        (in_slot / 4, (in_slot % 4) as u8)
    }

    fn is_connected(&self) -> bool {
        let n = self.saddles.len();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(a) = stack.pop() {
            for t in 0..4 {
                let b = self.pairing[4 * a + t] / 4;
                if !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// One boundary circle of the thickened atom: a cyclic corner sequence in
/// walk order, rotated to its lexicographically least phase.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryCircle {
    pub kind: SectorKind,
    pub corners: Vec<Corner>,
}

impl BoundaryCircle {
    pub(crate) fn normalized(kind: SectorKind, corners: Vec<Corner>) -> Self {
        Self { kind, corners: least_rotation(corners) }
    }
}

/// Rotates a cyclic sequence to its lexicographically least phase.
pub(crate) fn least_rotation<T: Clone + Ord>(seq: Vec<T>) -> Vec<T> {
    if seq.len() <= 1 {
        return seq;
    }
    let n = seq.len();
    let best = (0..n)
        .min_by(|&i, &j| {
            (0..n)
                .map(|k| (&seq[(i + k) % n], &seq[(j + k) % n]))
                .find_map(|(a, b)| match a.cmp(b) {
                    std::cmp::Ordering::Equal => None,
                    o => Some(o),
                })
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap();
    (0..n).map(|k| seq[(best + k) % n].clone()).collect()
}

/// Boundary circles of the thickened atom, sorted Down first and then by
/// corner sequence. Circle indices elsewhere (annulus endpoints, molecule
/// JSON) refer to positions in this list.
pub fn atom_boundary(atom: &Atom) -> Result<Vec<BoundaryCircle>, AtomError> {
    let n = atom.saddle_count();
    let mut visited = vec![[false; 4]; n];
    let mut circles = Vec::new();
    for start_pos in 0..n {
        for start_sector in 0..4u8 {
            if visited[start_pos][start_sector as usize] {
                continue;
            }
            let mut corners = Vec::new();
            let mut kinds = BTreeSet::new();
            let (mut pos, mut sector) = (start_pos, start_sector);
            loop {
                visited[pos][sector as usize] = true;
                corners.push(Corner { saddle: atom.saddles[pos], sector });
                kinds.insert(atom.sector_kind(pos, sector));
                let (np, ns) = atom.next_corner(pos, sector);
                if (np, ns) == (start_pos, start_sector) {
                    break;
                }
                (pos, sector) = (np, ns);
            }
            if kinds.len() != 1 {
                return Err(AtomError::MixedBoundaryWalk(corners));
            }
            let kind = kinds.into_iter().next().unwrap();
            circles.push(BoundaryCircle::normalized(kind, corners));
        }
    }
    circles.sort();
    Ok(circles)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AtomViolation {
    NonAlternatingSectors { saddle: u32 },
    Disconnected,
    MixedBoundaryWalk { corners: Vec<Corner> },
}

impl std::fmt::Display for AtomViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::NonAlternatingSectors { saddle } => {
                write!(f, "sectors at saddle {saddle} do not alternate Down/Up")
            }
            Self::Disconnected => write!(f, "underlying graph is disconnected"),
            Self::MixedBoundaryWalk { corners } => {
                write!(f, "boundary walk through {corners:?} mixes Down and Up")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomReport {
    pub violations: Vec<AtomViolation>,
}

impl AtomReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reports every violated atom invariant (empty report = valid atom).
pub fn atom_validate(atom: &Atom) -> AtomReport {
    let mut violations = Vec::new();
    for (pos, sec) in atom.sectors().iter().enumerate() {
        let alternating = sec[1] == sec[0].flip() && sec[2] == sec[0] && sec[3] == sec[1];
        if !alternating {
            violations.push(AtomViolation::NonAlternatingSectors { saddle: atom.saddles[pos] });
        }
    }
    if !atom.is_connected() {
        violations.push(AtomViolation::Disconnected);
    }
    if violations.is_empty() {
        // walk classification only makes sense once sectors alternate
        if let Err(AtomError::MixedBoundaryWalk(corners)) = atom_boundary(atom) {
            violations.push(AtomViolation::MixedBoundaryWalk { corners });
        }
    }
    AtomReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SectorKind::{Down, Up};

    fn corners(c: &[(u32, u8)]) -> Vec<Corner> {
        c.iter().map(|&(saddle, sector)| Corner { saddle, sector }).collect()
    }

    #[test]
    fn one_saddle_loops_give_three_single_kind_circles() {
        // pairing {0-1, 2-3}: the atom with one circle below, two above
        let atom = Atom::new(vec![1], &[(0, 1), (2, 3)], &[Up]).unwrap();
        let circles = atom_boundary(&atom).unwrap();
        assert_eq!(circles.len(), 3);
        assert_eq!(
            circles,
            vec![
                BoundaryCircle { kind: Down, corners: corners(&[(1, 1), (1, 3)]) },
                BoundaryCircle { kind: Up, corners: corners(&[(1, 0)]) },
                BoundaryCircle { kind: Up, corners: corners(&[(1, 2)]) },
            ]
        );
        assert_eq!(atom.euler_characteristic(), -1);
    }

    #[test]
    fn crossing_pairing_mixes_kinds() {
        let atom = Atom::new(vec![1], &[(0, 2), (1, 3)], &[Down]).unwrap();
        match atom_boundary(&atom) {
            Err(AtomError::MixedBoundaryWalk(walk)) => assert_eq!(walk.len(), 4),
            other => panic!("expected mixed walk, got {other:?}"),
        }
        assert!(!atom_validate(&atom).is_valid());
    }

    #[test]
    fn parallel_saddles_on_a_cylinder() {
        // 2 saddles, 4 boundary circles, 2 down / 2 up
        let atom =
            Atom::new(vec![1, 2], &[(0, 5), (1, 4), (2, 7), (3, 6)], &[Down, Down]).unwrap();
        let circles = atom_boundary(&atom).unwrap();
        assert_eq!(circles.len(), 4);
        let downs: Vec<_> = circles.iter().filter(|c| c.kind == Down).collect();
        let ups: Vec<_> = circles.iter().filter(|c| c.kind == Up).collect();
        assert_eq!((downs.len(), ups.len()), (2, 2));
        assert_eq!(downs[0].corners, corners(&[(1, 0), (2, 0)]));
        assert_eq!(downs[1].corners, corners(&[(1, 2), (2, 2)]));
        assert_eq!(atom.euler_characteristic(), -2);
    }

    #[test]
    fn two_saddles_on_a_torus_level() {
        // single down circle and single up circle: thickening has genus 1
        let atom =
            Atom::new(vec![1, 2], &[(0, 5), (1, 6), (2, 7), (3, 4)], &[Down, Down]).unwrap();
        let circles = atom_boundary(&atom).unwrap();
        assert_eq!(circles.len(), 2);
        assert_eq!(circles[0].kind, Down);
        assert_eq!(circles[0].corners, corners(&[(1, 0), (2, 2), (1, 2), (2, 0)]));
        assert_eq!(circles[1].kind, Up);
        assert_eq!(circles[1].corners, corners(&[(1, 1), (2, 3), (1, 3), (2, 1)]));
    }

    #[test]
    fn disconnected_atom_is_flagged() {
        let atom =
            Atom::new(vec![1, 2], &[(0, 1), (2, 3), (4, 5), (6, 7)], &[Down, Down]).unwrap();
        let report = atom_validate(&atom);
        assert!(report.violations.contains(&AtomViolation::Disconnected));
    }

    #[test]
    fn non_alternating_sectors_are_flagged() {
        let atom = Atom::with_sector_table(
            vec![1],
            &[(0, 1), (2, 3)],
            vec![[Down, Down, Up, Up]],
        )
        .unwrap();
        let report = atom_validate(&atom);
        assert_eq!(
            report.violations,
            vec![AtomViolation::NonAlternatingSectors { saddle: 1 }]
        );
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            Atom::new(vec![], &[], &[]),
            Err(AtomError::NoSaddles)
        ));
        assert!(Atom::new(vec![1, 1], &[(0, 1), (2, 3), (4, 5), (6, 7)], &[Down, Down]).is_err());
        assert!(matches!(
            Atom::new(vec![1], &[(0, 1), (2, 2)], &[Down]),
            Err(AtomError::BadPairing(2))
        ));
        assert!(matches!(
            Atom::new(vec![1], &[(0, 1)], &[Down]),
            Err(AtomError::UnpairedSlot(2))
        ));
        assert!(matches!(
            Atom::new(vec![1], &[(0, 9), (1, 2)], &[Down]),
            Err(AtomError::SlotOutOfRange(9, 1))
        ));
    }

    #[test]
    fn saddles_are_stored_ascending() {
        let a = Atom::new(vec![3, 1], &[(0, 5), (1, 4), (2, 7), (3, 6)], &[Down, Up]).unwrap();
        assert_eq!(a.saddles(), &[1, 3]);
        // slot 0 belonged to saddle 3 and must now live at position 1
        assert_eq!(a.sectors()[1][0], Down);
        assert_eq!(a.sectors()[0][0], Up);
        assert_eq!(a.pairing()[4], 1);
    }

    #[test]
    fn boundary_commutes_with_rotation_shifts() {
        let atom =
            Atom::new(vec![1, 2], &[(0, 5), (1, 6), (2, 7), (3, 4)], &[Down, Down]).unwrap();
        for s0 in 0..4u8 {
            for s1 in 0..4u8 {
                let shifted = atom.shifted(&[s0, s1]);
                assert!(atom_validate(&shifted).is_valid());
                let expected: BTreeSet<BoundaryCircle> = atom_boundary(&atom)
                    .unwrap()
                    .into_iter()
                    .map(|c| {
                        let corners = c
                            .corners
                            .into_iter()
                            .map(|Corner { saddle, sector }| {
                                let shift = if saddle == 1 { s0 } else { s1 };
                                Corner { saddle, sector: (sector + 4 - shift) % 4 }
                            })
                            .collect();
                        BoundaryCircle::normalized(c.kind, corners)
                    })
                    .collect();
                let got: BTreeSet<BoundaryCircle> =
                    atom_boundary(&shifted).unwrap().into_iter().collect();
                assert_eq!(got, expected);
            }
        }
    }
}
