//! Integer-time cross sections along the last lattice axis.
//!
//! Each cell shows up twice: its bottom face at display time
//! `a_n - 1` and its top at `a_n`. Both pieces carry the cell id as label,
//! so equal labels in consecutive slices belong to the same cell.

use crate::error::{Error, Result};
use crate::generator::FractalMesh;
use crate::index_sets::{Family, FractalKind};
use crate::lattice::AffinePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Bottom,
    Top,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Bottom => "bottom",
            Role::Top => "top",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PieceShape {
    /// `2^{n-1}` corners of a parallelotope face.
    Facet,
    /// `n` corners of a simplex face.
    SimplexFacet,
    Point,
}

impl PieceShape {
    pub fn name(self) -> &'static str {
        match self {
            PieceShape::Facet => "facet",
            PieceShape::SimplexFacet => "simplex_facet",
            PieceShape::Point => "point",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlicePiece {
    pub label: u64,
    pub role: Role,
    pub shape: PieceShape,
    /// Projected vertices: the last ambient coordinate is dropped.
    pub vertices: Vec<AffinePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    /// 0-based display time.
    pub time: usize,
    pub pieces: Vec<SlicePiece>,
}

impl Slice {
    /// Ambient dimension of the projected pieces, if any.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.pieces.first().and_then(|p| p.vertices.first()).map(AffinePoint::dim)
    }

    pub fn count(&self, role: Role) -> usize {
        self.pieces.iter().filter(|p| p.role == role).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceSeries {
    pub kind: FractalKind,
    /// The sliced lattice axis (1-based); always the last one.
    pub axis: usize,
    pub slices: Vec<Slice>,
}

fn project(p: &AffinePoint) -> AffinePoint {
    let c = p.coords();
    AffinePoint::new(c[..c.len() - 1].to_vec())
}

/// Cuts `mesh` at every integer time `0..=side` along the last axis.
/// Within a slice, bottoms come first, then tops, each in cell-id order.
pub fn slice_series(mesh: &FractalMesh) -> Result<SliceSeries> {
    if mesh.cells().is_empty() {
        return Err(Error::Domain("cannot slice an empty mesh".into()));
    }
    let kind = *mesh.kind();
    let n = kind.n();
    let side = kind.side();
    let last_bit = 1usize << (n - 1);

    let mut bottoms: Vec<Vec<SlicePiece>> = vec![Vec::new(); side + 1];
    let mut tops: Vec<Vec<SlicePiece>> = vec![Vec::new(); side + 1];
    for cell in mesh.cells() {
        let t = cell.base[n - 1] - 1;
        let (bottom, top) = match kind.family() {
            Family::Sponge => {
                let pick = |want: usize| -> Vec<AffinePoint> {
                    cell.vertices
                        .iter()
                        .enumerate()
                        .filter(|(c, _)| c & last_bit == want)
                        .map(|(_, v)| project(v))
                        .collect()
                };
                (
                    SlicePiece {
                        label: cell.id,
                        role: Role::Bottom,
                        shape: PieceShape::Facet,
                        vertices: pick(0),
                    },
                    SlicePiece {
                        label: cell.id,
                        role: Role::Top,
                        shape: PieceShape::Facet,
                        vertices: pick(last_bit),
                    },
                )
            }
            Family::Simplex => (
                SlicePiece {
                    label: cell.id,
                    role: Role::Bottom,
                    shape: PieceShape::SimplexFacet,
                    vertices: cell.vertices[..n].iter().map(project).collect(),
                },
                SlicePiece {
                    label: cell.id,
                    role: Role::Top,
                    shape: PieceShape::Point,
                    vertices: vec![project(&cell.vertices[n])],
                },
            ),
        };
        bottoms[t].push(bottom);
        tops[t + 1].push(top);
    }
    let slices = bottoms
        .into_iter()
        .zip(tops)
        .enumerate()
        .map(|(time, (mut pieces, top))| {
            pieces.extend(top);
            Slice { time, pieces }
        })
        .collect();
    Ok(SliceSeries { kind, axis: n, slices })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LabelPair {
    pub label: u64,
    pub bottom: usize,
    pub top: usize,
}

/// For every label, the times of its bottom and top pieces, sorted by label.
pub fn pair_labels(series: &SliceSeries) -> Vec<LabelPair> {
    use std::collections::BTreeMap;
    let mut seen: BTreeMap<u64, (Option<usize>, Option<usize>)> = BTreeMap::new();
    for slice in &series.slices {
        for piece in &slice.pieces {
            let entry = seen.entry(piece.label).or_default();
            match piece.role {
                Role::Bottom => entry.0 = Some(slice.time),
                Role::Top => entry.1 = Some(slice.time),
            }
        }
    }
    seen.into_iter()
        .filter_map(|(label, (b, t))| Some(LabelPair { label, bottom: b?, top: t? }))
        .collect()
}
