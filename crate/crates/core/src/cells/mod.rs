//! The polyhedral complex `K_{p,q,r}` of fiberwise-equivalence classes.
//!
//! Cells are canonical framed molecules; a cell with `s` framing blocks has
//! dimension `q - s`. The boundary relation is generated by the refinement
//! map: `τ ≺ σ` exactly when `τ` arises from `σ` by splitting the framing
//! (applied through level-circle surgery). Every cell carries the
//! permutohedron face of its framing — the projection `r₀` — and the checks
//! here verify that the stored poset is regular and that `r₀` behaves as a
//! dimension-preserving branched covering.

mod enumerate;
mod surgery;

pub use surgery::{split_molecule, sweep_atom, NewCircle, SurgeryError, SweepOutcome};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::molecule::{
    canonical_key, genus, molecule_validate, CanonicalKey, FramedMolecule, MoleculeError,
};
use crate::permutohedron::{
    ordered_partitions_of, refinements_of, refines, refines_or_equal, OrderedPartition,
    PartitionError, PermutohedronFace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CellsError {
    #[error("invalid parameters p={p}, q={q}, r={r}: {reason}")]
    BadParameters { p: u32, q: u32, r: u32, reason: String },
    #[error("no cell with id {0}")]
    NoSuchCell(CellId),
    #[error("partition does not refine the cell's framing")]
    NotARefinement,
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
    #[error(transparent)]
    Molecule(#[from] MoleculeError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("complex integrity failure: {0}")]
    Integrity(String),
}

/// Stable index of a cell within its complex (position in the key-sorted
/// cell list).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub usize);

impl std::fmt::Display for CellId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One equivalence class: a canonical framed molecule together with its id.
/// Dimension and the `r₀` label are derived from the framing, so the
/// invariants `dim = q - s` and `face = framing` hold by construction.
#[derive(Debug, Clone)]
pub struct Cell {
    pub id: CellId,
    pub molecule: FramedMolecule,
}

impl Cell {
    pub fn dim(&self) -> u32 {
        self.molecule.q() - self.molecule.framing().block_count() as u32
    }

    /// The ordered partition labelling the permutohedron face under `r₀`.
    pub fn face(&self) -> &OrderedPartition {
        self.molecule.framing()
    }

    /// The full permutohedron face (the image `r₀(σ)`).
    pub fn permutohedron_face(&self) -> PermutohedronFace {
        PermutohedronFace::new(self.face().clone())
    }
}

/// The face poset of `K_{p,q,r}`.
#[derive(Debug, Clone)]
pub struct ComplexPoset {
    p: u32,
    q: u32,
    r: u32,
    cells: Vec<Cell>,
    /// `(τ, σ)` with `τ` in the boundary of `σ`; transitively closed because
    /// refinement chains compose.
    boundary: BTreeSet<(CellId, CellId)>,
    by_key: BTreeMap<CanonicalKey, CellId>,
}

fn validate_params(p: u32, q: u32, r: u32) -> Result<u32, CellsError> {
    if p == 0 || q == 0 || r == 0 {
        return Err(CellsError::BadParameters {
            p,
            q,
            r,
            reason: "each of p, q, r must be at least 1".into(),
        });
    }
    genus(p, q, r).ok_or_else(|| CellsError::BadParameters {
        p,
        q,
        r,
        reason: format!(
            "genus (2 - {p} + {q} - {r}) / 2 is not a non-negative integer"
        ),
    })
}

/// All cells for the given parameters, deduplicated by canonical key and
/// sorted by it (ids are positions in this order).
pub fn enumerate_cells(p: u32, q: u32, r: u32) -> Result<Vec<Cell>, CellsError> {
    validate_params(p, q, r)?;
    let molecules = enumerate::enumerate_molecules(p, q, r)?;
    Ok(molecules
        .into_iter()
        .enumerate()
        .map(|(i, molecule)| Cell { id: CellId(i), molecule })
        .collect())
}

/// Builds the face poset: enumerates the cells and derives every boundary
/// pair by splitting each cell's framing through all proper refinements.
pub fn build_complex(p: u32, q: u32, r: u32) -> Result<ComplexPoset, CellsError> {
    let cells = enumerate_cells(p, q, r)?;
    let mut by_key = BTreeMap::new();
    for cell in &cells {
        by_key.insert(canonical_key(&cell.molecule)?, cell.id);
    }
    let mut cx = ComplexPoset { p, q, r, cells, boundary: BTreeSet::new(), by_key };
    let mut pairs = BTreeSet::new();
    for cell in &cx.cells {
        for fine in refinements_of(cell.face()) {
            if &fine == cell.face() {
                continue;
            }
            let tau = cx.split_cell(cell.id, &fine)?;
            pairs.insert((tau, cell.id));
        }
    }
    cx.boundary = pairs;
    Ok(cx)
}

impl ComplexPoset {
    /// Reassembles a poset from serialized parts. Molecules are validated
    /// and keys must be distinct; the boundary relation is taken as given
    /// (so corrupted posets remain representable for the checkers).
    pub fn from_parts(
        p: u32,
        q: u32,
        r: u32,
        molecules: Vec<FramedMolecule>,
        boundary: &[(usize, usize)],
    ) -> Result<Self, CellsError> {
        validate_params(p, q, r)?;
        let mut by_key = BTreeMap::new();
        let mut cells = Vec::with_capacity(molecules.len());
        for (i, molecule) in molecules.into_iter().enumerate() {
            if molecule.q() != q || molecule.p() != p || molecule.r() != r {
                return Err(CellsError::Integrity(format!(
                    "cell {i} has parameters ({}, {}, {}), expected ({p}, {q}, {r})",
                    molecule.p(),
                    molecule.q(),
                    molecule.r()
                )));
            }
            let report = molecule_validate(&molecule);
            if !report.is_valid() {
                return Err(CellsError::Integrity(format!(
                    "cell {i} is not a valid molecule: {:?}",
                    report.violations
                )));
            }
            let key = canonical_key(&molecule)?;
            if by_key.insert(key, CellId(i)).is_some() {
                return Err(CellsError::Integrity(format!(
                    "cell {i} duplicates another cell's canonical key"
                )));
            }
            cells.push(Cell { id: CellId(i), molecule });
        }
        let n = cells.len();
        let mut pairs = BTreeSet::new();
        for &(a, b) in boundary {
            if a >= n || b >= n {
                return Err(CellsError::Integrity(format!(
                    "boundary pair ({a}, {b}) references a missing cell"
                )));
            }
            if a == b {
                return Err(CellsError::Integrity(format!("boundary pair ({a}, {b}) is reflexive")));
            }
            pairs.insert((CellId(a), CellId(b)));
        }
        Ok(Self { p, q, r, cells, boundary: pairs, by_key })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn genus(&self) -> u32 {
        genus(self.p, self.q, self.r).expect("validated at construction")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> Result<&Cell, CellsError> {
        self.cells.get(id.0).ok_or(CellsError::NoSuchCell(id))
    }

    pub fn boundary_pairs(&self) -> &BTreeSet<(CellId, CellId)> {
        &self.boundary
    }

    /// Strict order: `a` lies in the boundary of `b`.
    pub fn precedes(&self, a: CellId, b: CellId) -> bool {
        self.boundary.contains(&(a, b))
    }

    /// All cells in the closed cell of `id`, including `id` itself.
    pub fn closure(&self, id: CellId) -> BTreeSet<CellId> {
        let mut out: BTreeSet<CellId> = self
            .boundary
            .iter()
            .filter(|(_, sigma)| *sigma == id)
            .map(|(tau, _)| *tau)
            .collect();
        out.insert(id);
        out
    }

    /// The refinement map `δ`: the cell reached from `id` by splitting its
    /// framing into `fine`. Identity when `fine` equals the framing.
    pub fn split_cell(&self, id: CellId, fine: &OrderedPartition) -> Result<CellId, CellsError> {
        let cell = self.cell(id)?;
        if !refines_or_equal(fine, cell.face()) {
            return Err(CellsError::NotARefinement);
        }
        let split = split_molecule(&cell.molecule, fine)?;
        let key = canonical_key(&split)?;
        self.by_key.get(&key).copied().ok_or_else(|| {
            CellsError::Integrity(format!(
                "split of cell {id} by {:?} is missing from the enumeration",
                fine.blocks()
            ))
        })
    }

    /// Connectivity of the underlying cell adjacency graph.
    pub fn is_connected(&self) -> bool {
        let n = self.cells.len();
        if n <= 1 {
            return true;
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(a, b) in &self.boundary {
            adj[a.0].push(b.0);
            adj[b.0].push(a.0);
        }
        let mut seen = vec![false; n];
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
        count == n
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.cells
            .iter()
            .map(|c| if c.dim() % 2 == 0 { 1 } else { -1 })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RegularityViolation {
    /// δ failed on a legal refinement of this cell's framing.
    SplitFailed { cell: CellId, fine: OrderedPartition, reason: String },
    /// δ by the cell's own framing did not return the cell.
    IdentityBroken { cell: CellId },
    /// Two distinct refinements reached the same cell.
    NotInjective { cell: CellId, fine_a: OrderedPartition, fine_b: OrderedPartition },
    /// Stored closure differs from the δ image.
    ClosureMismatch { cell: CellId, missing: Vec<CellId>, extra: Vec<CellId> },
    /// Refinement order and stored poset order disagree on a pair.
    OrderMismatch { cell: CellId, fine_a: OrderedPartition, fine_b: OrderedPartition },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegularityReport {
    pub violations: Vec<RegularityViolation>,
}

impl RegularityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that every closed cell, ordered by the stored boundary relation,
/// is order-isomorphic (via δ) to the face lattice of its permutohedron
/// face, and that δ is injective on each cell's refinements.
pub fn check_regularity(cx: &ComplexPoset) -> RegularityReport {
    let mut v = Vec::new();
    for cell in cx.cells() {
        let refs = refinements_of(cell.face());
        let mut targets: BTreeMap<&OrderedPartition, CellId> = BTreeMap::new();
        for fine in &refs {
            match cx.split_cell(cell.id, fine) {
                Ok(t) => {
                    targets.insert(fine, t);
                }
                Err(e) => v.push(RegularityViolation::SplitFailed {
                    cell: cell.id,
                    fine: fine.clone(),
                    reason: e.to_string(),
                }),
            }
        }
        if targets.get(cell.face()) != Some(&cell.id) {
            v.push(RegularityViolation::IdentityBroken { cell: cell.id });
        }
        let mut seen: BTreeMap<CellId, &OrderedPartition> = BTreeMap::new();
        for (fine, t) in &targets {
            if let Some(prev) = seen.insert(*t, fine) {
                v.push(RegularityViolation::NotInjective {
                    cell: cell.id,
                    fine_a: prev.clone(),
                    fine_b: (*fine).clone(),
                });
            }
        }
        let image: BTreeSet<CellId> = targets.values().copied().collect();
        let stored = cx.closure(cell.id);
        if image != stored {
            v.push(RegularityViolation::ClosureMismatch {
                cell: cell.id,
                missing: image.difference(&stored).copied().collect(),
                extra: stored.difference(&image).copied().collect(),
            });
        }
        // order isomorphism onto the refinement interval
        for a in &refs {
            for b in &refs {
                let (Some(&ta), Some(&tb)) = (targets.get(a), targets.get(b)) else {
                    continue;
                };
                let in_lattice = refines_or_equal(a, b);
                let in_poset = ta == tb || cx.precedes(ta, tb);
                if in_lattice != in_poset {
                    v.push(RegularityViolation::OrderMismatch {
                        cell: cell.id,
                        fine_a: a.clone(),
                        fine_b: b.clone(),
                    });
                }
            }
        }
    }
    RegularityReport { violations: v }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoveringViolation {
    /// The closure's `r₀` labels do not biject with the faces of the cell's
    /// permutohedron face.
    ClosureFaceMismatch { cell: CellId },
    /// A coarsening of the cell's face has no coface mapping onto it.
    NoLift { cell: CellId, face: OrderedPartition },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoveringReport {
    pub violations: Vec<CoveringViolation>,
}

impl CoveringReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that `r₀` is a branched covering onto the permutohedron. Dimension
/// preservation holds by construction (`dim = q - s` on both sides), so the
/// content is: (a) per cell, the closure carries each face of `r₀(σ)` exactly
/// once; (b) every coarsening of a cell's face lifts to a coface.
pub fn check_branched_covering(cx: &ComplexPoset) -> CoveringReport {
    let mut v = Vec::new();
    let ground: Vec<u32> = (1..=cx.q()).collect();
    let all_faces: Vec<OrderedPartition> = ordered_partitions_of(&ground)
        .into_iter()
        .map(|blocks| OrderedPartition::new(cx.q(), blocks).expect("generated partition"))
        .collect();
    for cell in cx.cells() {
        let labels: BTreeSet<&OrderedPartition> =
            cx.closure(cell.id).iter().map(|&t| cx.cells()[t.0].face()).collect();
        let expected: BTreeSet<OrderedPartition> =
            refinements_of(cell.face()).into_iter().collect();
        let same = labels.len() == cx.closure(cell.id).len()
            && labels.len() == expected.len()
            && labels.iter().all(|l| expected.contains(*l));
        if !same {
            v.push(CoveringViolation::ClosureFaceMismatch { cell: cell.id });
        }
        for coarse in &all_faces {
            if !refines(cell.face(), coarse) {
                continue;
            }
            let lifted = cx
                .boundary_pairs()
                .iter()
                .any(|&(t, s)| t == cell.id && cx.cells()[s.0].face() == coarse);
            if !lifted {
                v.push(CoveringViolation::NoLift { cell: cell.id, face: coarse.clone() });
            }
        }
    }
    CoveringReport { violations: v }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransitivityViolation {
    /// `δ_{τ''} σ ≠ δ_{τ''} δ_{τ'} σ` for the named chain.
    Broken { cell: CellId, mid: OrderedPartition, fine: OrderedPartition },
    SplitFailed { cell: CellId, fine: OrderedPartition, reason: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitivityReport {
    pub violations: Vec<TransitivityViolation>,
    /// Number of (cell, mid, fine) chains actually checked.
    pub checked: usize,
    pub exhaustive: bool,
}

impl TransitivityReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `δ` transitivity over refinement chains `fine ≤ mid ≤ framing`.
/// All chains are checked when their number is at most `cap`; otherwise a
/// seeded sample of `cap` chains is drawn.
pub fn check_delta_transitivity(cx: &ComplexPoset, seed: u64, cap: usize) -> TransitivityReport {
    let mut chains: Vec<(CellId, OrderedPartition, OrderedPartition)> = Vec::new();
    for cell in cx.cells() {
        for mid in refinements_of(cell.face()) {
            for fine in refinements_of(&mid) {
                chains.push((cell.id, mid.clone(), fine));
            }
        }
    }
    let exhaustive = chains.len() <= cap;
    if !exhaustive {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // partial Fisher-Yates: draw `cap` distinct chains
        let n = chains.len();
        for i in 0..cap {
            let j = i + (rng.next_u64() as usize) % (n - i);
            chains.swap(i, j);
        }
        chains.truncate(cap);
    }
    let mut v = Vec::new();
    let mut checked = 0;
    for (id, mid, fine) in &chains {
        let direct = match cx.split_cell(*id, fine) {
            Ok(t) => t,
            Err(e) => {
                v.push(TransitivityViolation::SplitFailed {
                    cell: *id,
                    fine: fine.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let staged = cx
            .split_cell(*id, mid)
            .and_then(|m| cx.split_cell(m, fine));
        match staged {
            Ok(t) if t == direct => {}
            Ok(_) => v.push(TransitivityViolation::Broken {
                cell: *id,
                mid: mid.clone(),
                fine: fine.clone(),
            }),
            Err(e) => v.push(TransitivityViolation::SplitFailed {
                cell: *id,
                fine: mid.clone(),
                reason: e.to_string(),
            }),
        }
        checked += 1;
    }
    TransitivityReport { violations: v, checked, exhaustive }
}

/// DOT rendering of the 1-skeleton: dim-0 cells as nodes, dim-1 cells as
/// edges between the vertices of their closure.
pub fn skeleton_dot(cx: &ComplexPoset) -> String {
    let mut s = String::from("graph skeleton {\n");
    for cell in cx.cells().iter().filter(|c| c.dim() == 0) {
        let _ = writeln!(s, "  c{} [label=\"{}\"];", cell.id, cell.id);
    }
    for cell in cx.cells().iter().filter(|c| c.dim() == 1) {
        let mut ends: Vec<CellId> = cx.closure(cell.id).into_iter().collect();
        ends.retain(|&t| t != cell.id);
        match ends[..] {
            [a, b] => {
                let _ = writeln!(s, "  c{a} -- c{b} [label=\"{}\"];", cell.id);
            }
            [a] => {
                let _ = writeln!(s, "  c{a} -- c{a} [label=\"{}\"];", cell.id);
            }
            _ => {
                // malformed edge cell; render isolated so the defect is visible
                let _ = writeln!(s, "  c{} [shape=box, label=\"{}!\"];", cell.id, cell.id);
            }
        }
    }
    s.push_str("}\n");
    s
}
