//! JSON wire formats and their conversions to and from the domain types.
//!
//! These DTOs define the files the command-line tool exchanges: face
//! lattices, complexes with their cells and boundary pairs, topology
//! reports, and twist-word inputs. Field order is fixed by declaration, so
//! serialization of the same value is byte-stable.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cells::{CellsError, ComplexPoset};
use crate::molecule::{
    genus, Annulus, Atom, CircleRef, FramedMolecule, LowerEnd, MoleculeError,
    PlacedAtom, SectorKind, UpperEnd,
};
use crate::permutohedron::{OrderedPartition, PartitionError, PermutohedronFace};
use crate::topology::{FundamentalGroup, HomologyGroup, RankReport};
use crate::winding::{CriticalSetup, SeparatingCurve, TwistLetter, TwistWord, WindingError};

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("malformed document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Molecule(#[from] MoleculeError),
    #[error(transparent)]
    Cells(#[from] CellsError),
    #[error(transparent)]
    Winding(#[from] WindingError),
}

// ---------------------------------------------------------------- faces

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaceDto {
    pub partition: Vec<Vec<u32>>,
    pub dim: usize,
    pub vertices: Vec<Vec<u32>>,
}

pub fn faces_to_dto(faces: &[PermutohedronFace]) -> Vec<FaceDto> {
    faces
        .iter()
        .map(|f| FaceDto {
            partition: f.partition.blocks().to_vec(),
            dim: f.dim,
            vertices: f.vertices.clone(),
        })
        .collect()
}

// ------------------------------------------------------------- molecule

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorKindDto {
    Down,
    Up,
}

impl From<SectorKind> for SectorKindDto {
    fn from(k: SectorKind) -> Self {
        match k {
            SectorKind::Down => Self::Down,
            SectorKind::Up => Self::Up,
        }
    }
}

impl From<SectorKindDto> for SectorKind {
    fn from(k: SectorKindDto) -> Self {
        match k {
            SectorKindDto::Down => Self::Down,
            SectorKindDto::Up => Self::Up,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomDto {
    pub saddles: Vec<u32>,
    /// Each glued slot pair once, lesser slot first.
    pub pairing: Vec<(usize, usize)>,
    /// Kind of sector 0 at each saddle, in `saddles` order.
    pub sector0: Vec<SectorKindDto>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircleRefDto {
    pub atom: usize,
    pub circle: usize,
}

/// Far end of an annulus: another boundary circle or an extremum label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AnnulusEndDto {
    Circle(CircleRefDto),
    Min { min: u32 },
    Max { max: u32 },
}

/// `from` is the circle end of the annulus nearest the atoms: the down
/// circle for a minimum cap, the lower atom's up circle otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnulusDto {
    pub from: CircleRefDto,
    pub to: AnnulusEndDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeDto {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub framing: Vec<Vec<u32>>,
    pub atoms: Vec<AtomDto>,
    pub annuli: Vec<AnnulusDto>,
}

fn circle_ref_dto(c: &CircleRef) -> CircleRefDto {
    CircleRefDto { atom: c.atom, circle: c.circle }
}

fn circle_ref(c: CircleRefDto) -> CircleRef {
    CircleRef { atom: c.atom, circle: c.circle }
}

pub fn molecule_to_dto(m: &FramedMolecule) -> Result<MoleculeDto, SchemaError> {
    let atoms = m
        .atoms()
        .iter()
        .map(|pa| {
            let a = &pa.atom;
            let pairing = a
                .pairing()
                .iter()
                .enumerate()
                .filter(|&(s, &t)| s < t)
                .map(|(s, &t)| (s, t))
                .collect();
            AtomDto {
                saddles: a.saddles().to_vec(),
                pairing,
                sector0: (0..a.saddle_count())
                    .map(|pos| a.sector_kind(pos, 0).into())
                    .collect(),
            }
        })
        .collect();
    let annuli = m
        .annuli()
        .iter()
        .map(|a| match (&a.lower, &a.upper) {
            (LowerEnd::Min(label), UpperEnd::Circle(c)) => Ok(AnnulusDto {
                from: circle_ref_dto(c),
                to: AnnulusEndDto::Min { min: *label },
            }),
            (LowerEnd::Circle(c), UpperEnd::Max(label)) => Ok(AnnulusDto {
                from: circle_ref_dto(c),
                to: AnnulusEndDto::Max { max: *label },
            }),
            (LowerEnd::Circle(lo), UpperEnd::Circle(hi)) => Ok(AnnulusDto {
                from: circle_ref_dto(lo),
                to: AnnulusEndDto::Circle(circle_ref_dto(hi)),
            }),
            (LowerEnd::Min(lo), UpperEnd::Max(hi)) => Err(SchemaError::Invalid(format!(
                "annulus joins extrema {lo} and {hi} without touching an atom"
            ))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(MoleculeDto {
        p: m.p(),
        q: m.q(),
        r: m.r(),
        framing: m.framing().blocks().to_vec(),
        atoms,
        annuli,
    })
}

pub fn molecule_from_dto(dto: &MoleculeDto) -> Result<FramedMolecule, SchemaError> {
    let framing = OrderedPartition::new(dto.q, dto.framing.clone())?;
    let atoms = dto
        .atoms
        .iter()
        .map(|a| {
            let kinds: Vec<SectorKind> = a.sector0.iter().map(|&k| k.into()).collect();
            let atom = Atom::new(a.saddles.clone(), &a.pairing, &kinds)
                .map_err(MoleculeError::from)?;
            let block = framing.block_of(atom.saddles()[0]).ok_or_else(|| {
                SchemaError::Invalid(format!(
                    "atom saddle {} is outside the framing",
                    atom.saddles()[0]
                ))
            })?;
            Ok(PlacedAtom { block, atom })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    let annuli = dto
        .annuli
        .iter()
        .map(|a| match a.to {
            AnnulusEndDto::Min { min } => Annulus {
                lower: LowerEnd::Min(min),
                upper: UpperEnd::Circle(circle_ref(a.from)),
            },
            AnnulusEndDto::Max { max } => Annulus {
                lower: LowerEnd::Circle(circle_ref(a.from)),
                upper: UpperEnd::Max(max),
            },
            AnnulusEndDto::Circle(hi) => Annulus {
                lower: LowerEnd::Circle(circle_ref(a.from)),
                upper: UpperEnd::Circle(circle_ref(hi)),
            },
        })
        .collect();
    Ok(FramedMolecule::new(dto.p, dto.r, framing, atoms, annuli)?)
}

// -------------------------------------------------------------- complex

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexParamsDto {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub genus: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellDto {
    pub id: usize,
    pub dim: u32,
    pub face: Vec<Vec<u32>>,
    pub molecule: MoleculeDto,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDto {
    pub params: ComplexParamsDto,
    pub cells: Vec<CellDto>,
    /// Pairs (finer cell id, coarser cell id), i.e. smaller dimension first.
    pub boundary: Vec<(usize, usize)>,
}

pub fn complex_to_dto(cx: &ComplexPoset) -> Result<ComplexDto, SchemaError> {
    let cells = cx
        .cells()
        .iter()
        .map(|c| {
            Ok(CellDto {
                id: c.id.0,
                dim: c.dim(),
                face: c.face().blocks().to_vec(),
                molecule: molecule_to_dto(&c.molecule)?,
            })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    Ok(ComplexDto {
        params: ComplexParamsDto { p: cx.p(), q: cx.q(), r: cx.r(), genus: cx.genus() },
        cells,
        boundary: cx.boundary_pairs().iter().map(|&(a, b)| (a.0, b.0)).collect(),
    })
}

pub fn complex_from_dto(dto: &ComplexDto) -> Result<ComplexPoset, SchemaError> {
    let params = &dto.params;
    let expected_genus = genus(params.p, params.q, params.r).ok_or_else(|| {
        SchemaError::Invalid(format!(
            "parameters ({}, {}, {}) have no integer genus",
            params.p, params.q, params.r
        ))
    })?;
    if params.genus != expected_genus {
        return Err(SchemaError::Invalid(format!(
            "declared genus {} does not match parameters (expected {expected_genus})",
            params.genus
        )));
    }
    let mut molecules = Vec::with_capacity(dto.cells.len());
    for (i, cell) in dto.cells.iter().enumerate() {
        if cell.id != i {
            return Err(SchemaError::Invalid(format!(
                "cell ids must be 0..n in order; found {} at position {i}",
                cell.id
            )));
        }
        let m = molecule_from_dto(&cell.molecule)?;
        if cell.face != m.framing().blocks() {
            return Err(SchemaError::Invalid(format!(
                "cell {i}: face does not match the molecule framing"
            )));
        }
        let dim = m.q() - m.framing().block_count() as u32;
        if cell.dim != dim {
            return Err(SchemaError::Invalid(format!(
                "cell {i}: declared dim {} but the framing gives {dim}",
                cell.dim
            )));
        }
        molecules.push(m);
    }
    Ok(ComplexPoset::from_parts(
        params.p,
        params.q,
        params.r,
        molecules,
        &dto.boundary,
    )?)
}

// ------------------------------------------------------ topology reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyOutDto {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
}

pub fn homology_to_dto(groups: &[HomologyGroup]) -> Result<HomologyOutDto, SchemaError> {
    let torsion = groups
        .iter()
        .map(|g| {
            g.torsion
                .iter()
                .map(|d| {
                    d.to_u64().ok_or_else(|| {
                        SchemaError::Invalid(format!("torsion coefficient {d} exceeds u64"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(HomologyOutDto { betti: groups.iter().map(|g| g.betti).collect(), torsion })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1CountsDto {
    pub generators: usize,
    pub relators: usize,
    pub simplified_generators: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pi1OutDto {
    pub pi1: Pi1CountsDto,
}

pub fn pi1_to_dto(group: &FundamentalGroup) -> Pi1OutDto {
    Pi1OutDto {
        pi1: Pi1CountsDto {
            generators: group.raw.generators.len(),
            relators: group.raw.relators.len(),
            simplified_generators: group.simplified.generators.len(),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReportDto {
    #[serde(rename = "V")]
    pub v: usize,
    #[serde(rename = "E")]
    pub e: usize,
    pub n: i64,
    pub bk_bound: i64,
    pub pi1_generator_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankOutDto {
    pub rank_report: RankReportDto,
}

pub fn rank_to_dto(report: &RankReport) -> RankOutDto {
    RankOutDto {
        rank_report: RankReportDto {
            v: report.vertices,
            e: report.edges,
            n: report.cycle_rank,
            bk_bound: report.bk_bound,
            pi1_generator_count: report.pi1_generators,
        },
    }
}

// -------------------------------------------------------------- winding

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDto {
    pub name: String,
    pub enclosed: Vec<u32>,
    pub genus: u32,
    pub intersections: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetupDto {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub curves: Vec<CurveDto>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordLetterDto {
    pub curve: String,
    pub power: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionDto {
    pub curve: String,
    pub value: i64,
    pub in_gamma_f_possible: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsOutDto {
    #[serde(rename = "B")]
    pub b: Vec<i64>,
    #[serde(rename = "B_abs")]
    pub b_abs: Vec<u8>,
    pub obstructions: Vec<ObstructionDto>,
}

/// Parses the critical setup and its named curve dictionary; every curve
/// is validated against the setup and names must be distinct.
pub fn setup_from_dto(
    dto: &SetupDto,
) -> Result<(CriticalSetup, BTreeMap<String, SeparatingCurve>), SchemaError> {
    let setup = CriticalSetup::new(dto.p, dto.q, dto.r)?;
    let mut curves = BTreeMap::new();
    for c in &dto.curves {
        let enclosed: BTreeSet<u32> = c.enclosed.iter().copied().collect();
        if enclosed.len() != c.enclosed.len() {
            return Err(SchemaError::Invalid(format!(
                "curve `{}` repeats an enclosed point",
                c.name
            )));
        }
        let curve = SeparatingCurve {
            name: c.name.clone(),
            enclosed,
            genus_enclosed: c.genus,
            intersections: c.intersections.clone(),
        };
        curve.validate(&setup)?;
        if curves.insert(c.name.clone(), curve).is_some() {
            return Err(SchemaError::Invalid(format!(
                "curve name `{}` declared twice",
                c.name
            )));
        }
    }
    Ok((setup, curves))
}

/// Resolves a word of (curve name, power) letters against the dictionary.
pub fn word_from_dto(
    letters: &[WordLetterDto],
    curves: &BTreeMap<String, SeparatingCurve>,
) -> Result<TwistWord, SchemaError> {
    let resolved = letters
        .iter()
        .map(|l| {
            let curve = curves.get(&l.curve).ok_or_else(|| {
                SchemaError::Invalid(format!("word uses undeclared curve `{}`", l.curve))
            })?;
            Ok(TwistLetter { curve: curve.clone(), power: l.power })
        })
        .collect::<Result<Vec<_>, SchemaError>>()?;
    Ok(TwistWord { letters: resolved })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::build_complex;
    use crate::molecule::canonical_key;
    use crate::molecule::tests::{sphere_molecule, torus_two_level_molecule};
    use crate::permutohedron::enumerate_faces;

    #[test]
    fn face_dto_round_trips_and_serializes_stably() {
        let faces = enumerate_faces(2).unwrap();
        let dto = faces_to_dto(&faces);
        let json = serde_json::to_string(&dto).unwrap();
        let expected = concat!(
            "[{\"partition\":[[1],[2]],\"dim\":0,\"vertices\":[[1,2]]},",
            "{\"partition\":[[1,2]],\"dim\":1,\"vertices\":[[1,2],[2,1]]},",
            "{\"partition\":[[2],[1]],\"dim\":0,\"vertices\":[[2,1]]}]"
        );
        assert_eq!(json, expected);
        let back: Vec<FaceDto> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, dto);
    }

    #[test]
    fn molecule_dto_round_trips() {
        for m in [sphere_molecule(), torus_two_level_molecule()] {
            let dto = molecule_to_dto(&m).unwrap();
            let text = serde_json::to_string(&dto).unwrap();
            let reparsed: MoleculeDto = serde_json::from_str(&text).unwrap();
            let back = molecule_from_dto(&reparsed).unwrap();
            assert_eq!(canonical_key(&back).unwrap(), canonical_key(&m).unwrap());
            assert_eq!(back.annuli().len(), m.annuli().len());
        }
    }

    #[test]
    fn annulus_ends_parse_all_three_forms() {
        let min: AnnulusEndDto = serde_json::from_str(r#"{"min":3}"#).unwrap();
        assert_eq!(min, AnnulusEndDto::Min { min: 3 });
        let max: AnnulusEndDto = serde_json::from_str(r#"{"max":4}"#).unwrap();
        assert_eq!(max, AnnulusEndDto::Max { max: 4 });
        let circle: AnnulusEndDto =
            serde_json::from_str(r#"{"atom":1,"circle":0}"#).unwrap();
        assert_eq!(
            circle,
            AnnulusEndDto::Circle(CircleRefDto { atom: 1, circle: 0 })
        );
    }

    #[test]
    fn complex_dto_round_trips() {
        let cx = build_complex(1, 2, 1).unwrap();
        let dto = complex_to_dto(&cx).unwrap();
        assert_eq!(dto.params.genus, 1);
        assert_eq!(dto.cells.len(), 3);
        assert_eq!(dto.boundary.len(), 2);
        let text = serde_json::to_string_pretty(&dto).unwrap();
        let reparsed: ComplexDto = serde_json::from_str(&text).unwrap();
        let back = complex_from_dto(&reparsed).unwrap();
        assert_eq!(back.cells().len(), cx.cells().len());
        assert_eq!(back.boundary_pairs(), cx.boundary_pairs());
        for (a, b) in back.cells().iter().zip(cx.cells()) {
            assert_eq!(
                canonical_key(&a.molecule).unwrap(),
                canonical_key(&b.molecule).unwrap()
            );
        }
    }

    #[test]
    fn complex_dto_rejects_inconsistencies() {
        let cx = build_complex(1, 2, 1).unwrap();
        let dto = complex_to_dto(&cx).unwrap();

        let mut wrong_genus = dto.clone();
        wrong_genus.params.genus = 0;
        assert!(matches!(
            complex_from_dto(&wrong_genus),
            Err(SchemaError::Invalid(_))
        ));

        let mut wrong_id = dto.clone();
        wrong_id.cells[1].id = 5;
        assert!(matches!(
            complex_from_dto(&wrong_id),
            Err(SchemaError::Invalid(_))
        ));

        let mut wrong_dim = dto.clone();
        wrong_dim.cells[0].dim += 1;
        assert!(matches!(
            complex_from_dto(&wrong_dim),
            Err(SchemaError::Invalid(_))
        ));

        let mut wrong_face = dto;
        wrong_face.cells[0].face = if wrong_face.cells[0].face.len() == 1 {
            vec![vec![1], vec![2]]
        } else {
            vec![vec![1, 2]]
        };
        assert!(complex_from_dto(&wrong_face).is_err());
    }

    #[test]
    fn report_dtos_use_the_agreed_keys() {
        let report = crate::topology::RankReport {
            vertices: 2,
            edges: 1,
            cycle_rank: 0,
            bk_bound: 4,
            pi1_generators: 0,
        };
        let json = serde_json::to_string(&rank_to_dto(&report)).unwrap();
        assert_eq!(
            json,
            r#"{"rank_report":{"V":2,"E":1,"n":0,"bk_bound":4,"pi1_generator_count":0}}"#
        );
        let out = InvariantsOutDto { b: vec![1], b_abs: vec![0], obstructions: vec![] };
        let json = serde_json::to_string(&out).unwrap();
        assert_eq!(json, r#"{"B":[1],"B_abs":[0],"obstructions":[]}"#);
    }

    #[test]
    fn setup_and_word_parsing() {
        let dto = SetupDto {
            p: 1,
            q: 2,
            r: 1,
            curves: vec![CurveDto {
                name: "a".into(),
                enclosed: vec![1, 2],
                genus: 0,
                intersections: vec![1, 0, 0],
            }],
        };
        let (setup, curves) = setup_from_dto(&dto).unwrap();
        assert_eq!(setup.point_count(), 4);
        assert_eq!(curves.len(), 1);

        let word = word_from_dto(
            &[WordLetterDto { curve: "a".into(), power: 2 }],
            &curves,
        )
        .unwrap();
        assert_eq!(word.letters.len(), 1);
        assert!(matches!(
            word_from_dto(&[WordLetterDto { curve: "b".into(), power: 1 }], &curves),
            Err(SchemaError::Invalid(_))
        ));

        let mut dup = dto.clone();
        dup.curves.push(dup.curves[0].clone());
        assert!(matches!(setup_from_dto(&dup), Err(SchemaError::Invalid(_))));

        let mut bad = dto;
        bad.curves[0].intersections.pop();
        assert!(matches!(
            setup_from_dto(&bad),
            Err(SchemaError::Winding(WindingError::WrongArcCount { .. }))
        ));
    }
}
