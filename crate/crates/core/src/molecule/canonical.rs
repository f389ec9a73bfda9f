//! Canonical keys for framed molecules.
//!
//! Two molecules represent the same cell iff they differ by re-listing
//! atoms/annuli and by re-rooting the rotation at saddles (cyclic slot
//! shifts, the only isomorphisms fixing every numbered critical point and
//! the orientation). The key is the lexicographically least byte encoding
//! over all shift assignments, with atoms listed in the canonical order
//! (block, least saddle) and annuli sorted.

use super::{
    atom_boundary, BoundaryCircle, Corner, FramedMolecule, LowerEnd, MoleculeError, SectorKind,
    UpperEnd,
};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn push_u32(w: &mut Vec<u8>, x: u32) {
    w.extend_from_slice(&x.to_be_bytes());
}

/// Isomorphism-invariant key; requires resolvable atom boundaries and
/// circle references.
pub fn canonical_key(m: &FramedMolecule) -> Result<CanonicalKey, MoleculeError> {
    let atoms = m.atoms();
    let boundaries = m.boundaries()?;
    for (i, ann) in m.annuli().iter().enumerate() {
        let check = |c: &super::CircleRef| -> Result<(), MoleculeError> {
            if c.circle >= boundaries[c.atom].len() {
                return Err(MoleculeError::Invalid(format!(
                    "annulus {i} references circle {} of atom {} which has only {}",
                    c.circle,
                    c.atom,
                    boundaries[c.atom].len()
                )));
            }
            Ok(())
        };
        if let LowerEnd::Circle(c) = &ann.lower {
            check(c)?;
        }
        if let UpperEnd::Circle(c) = &ann.upper {
            check(c)?;
        }
    }

    let mut order: Vec<usize> = (0..atoms.len()).collect();
    order.sort_by_key(|&i| (atoms[i].block, atoms[i].atom.saddles()[0]));
    let mut pos_of = vec![0usize; atoms.len()];
    for (pos, &orig) in order.iter().enumerate() {
        pos_of[orig] = pos;
    }

    // per-saddle shift counter, grouped by atom
    let counts: Vec<usize> = atoms.iter().map(|pa| pa.atom.saddle_count()).collect();
    let offsets: Vec<usize> = counts
        .iter()
        .scan(0usize, |acc, &c| {
            let o = *acc;
            *acc += c;
            Some(o)
        })
        .collect();
    let total: usize = counts.iter().sum();

    let mut best: Option<Vec<u8>> = None;
    let mut counter = vec![0u8; total];
    loop {
        let bytes = encode(m, &order, &pos_of, &boundaries, &counter, &offsets, &counts)?;
        if best.as_ref().is_none_or(|b| bytes < *b) {
            best = Some(bytes);
        }
        let mut i = 0;
        loop {
            if i == total {
                return Ok(CanonicalKey(best.expect("at least one encoding")));
            }
            counter[i] += 1;
            if counter[i] < 4 {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
    }
}

fn encode(
    m: &FramedMolecule,
    order: &[usize],
    pos_of: &[usize],
    boundaries: &[Vec<BoundaryCircle>],
    counter: &[u8],
    offsets: &[usize],
    counts: &[usize],
) -> Result<Vec<u8>, MoleculeError> {
    let atoms = m.atoms();
    let mut w = Vec::new();
    push_u32(&mut w, m.p());
    push_u32(&mut w, m.q());
    push_u32(&mut w, m.r());
    push_u32(&mut w, m.framing().block_count() as u32);
    for block in m.framing().blocks() {
        push_u32(&mut w, block.len() as u32);
        for &x in block {
            push_u32(&mut w, x);
        }
    }

    // circle_maps[orig_atom][orig_circle] = circle index in the shifted atom
    let mut circle_maps: Vec<Vec<usize>> = vec![Vec::new(); atoms.len()];
    push_u32(&mut w, atoms.len() as u32);
    for &orig in order {
        let pa = &atoms[orig];
        let shifts = &counter[offsets[orig]..offsets[orig] + counts[orig]];
        let shifted = pa.atom.shifted(shifts);
        let shifted_circles = atom_boundary(&shifted)?;
        circle_maps[orig] = boundaries[orig]
            .iter()
            .map(|c| {
                let corners: Vec<Corner> = c
                    .corners
                    .iter()
                    .map(|&Corner { saddle, sector }| {
                        let p = pa.atom.position_of(saddle).expect("own saddle");
                        Corner { saddle, sector: (sector + 4 - shifts[p]) % 4 }
                    })
                    .collect();
                let norm = BoundaryCircle::normalized(c.kind, corners);
                shifted_circles
                    .binary_search(&norm)
                    .expect("shift permutes boundary circles")
            })
            .collect();

        push_u32(&mut w, pa.block as u32);
        push_u32(&mut w, shifted.saddle_count() as u32);
        for &s in shifted.saddles() {
            push_u32(&mut w, s);
        }
        for sec in shifted.sectors() {
            w.push(match sec[0] {
                SectorKind::Down => 0,
                SectorKind::Up => 1,
            });
        }
        for (slot, &mate) in shifted.pairing().iter().enumerate() {
            if slot < mate {
                push_u32(&mut w, slot as u32);
                push_u32(&mut w, mate as u32);
            }
        }
    }

    let mut chunks: Vec<Vec<u8>> = m
        .annuli()
        .iter()
        .map(|ann| {
            let mut c = Vec::new();
            match ann.lower {
                LowerEnd::Min(label) => {
                    c.push(0u8);
                    push_u32(&mut c, label);
                }
                LowerEnd::Circle(cr) => {
                    c.push(2u8);
                    push_u32(&mut c, pos_of[cr.atom] as u32);
                    push_u32(&mut c, circle_maps[cr.atom][cr.circle] as u32);
                }
            }
            match ann.upper {
                UpperEnd::Max(label) => {
                    c.push(1u8);
                    push_u32(&mut c, label);
                }
                UpperEnd::Circle(cr) => {
                    c.push(2u8);
                    push_u32(&mut c, pos_of[cr.atom] as u32);
                    push_u32(&mut c, circle_maps[cr.atom][cr.circle] as u32);
                }
            }
            c
        })
        .collect();
    chunks.sort_unstable();
    push_u32(&mut w, chunks.len() as u32);
    for c in chunks {
        w.extend_from_slice(&c);
    }
    Ok(w)
}
