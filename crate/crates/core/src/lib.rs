//! Discrete centro-affine lattices and the affine fractals they generate.
//!
//! A lattice is grown from a frame (a base point and its forward
//! neighbours) either by the structure equation `r_ij = r_i + r_j - r` or
//! by transporting frames with commuting transition matrices. Coloured
//! cells are picked by digit rules (base 3 for carpets and sponges, base 2
//! for triangles and simplices), assembled into meshes, sliced along the
//! last axis and exported to SVG, OBJ or JSON. All geometry is exact
//! rational arithmetic until the exporters round to decimals.

pub mod cli;
pub mod error;
pub mod export;
pub mod generator;
pub mod index_sets;
pub mod lattice;
pub mod linalg;
pub mod rational;
pub mod slicer;

pub use error::{Error, Result};
pub use export::{export_json, export_obj, export_svg, import_frame, import_json, Artifact, ExportStyle, Geometry};
pub use generator::{
    assemble_mesh, assemble_mesh_by_transport, default_frame, generate_points_matrix,
    generate_points_recurrence, verify_structure, CellGeometry, FractalMesh, PointLattice,
    StructureViolation,
};
pub use index_sets::{
    count_closed_form, enumerate_cells, is_member, simplex_member, sponge_member, triangle_block_matrix,
    CellIndex, CellSet, Family, FractalKind,
};
pub use lattice::{
    canonical_matrices, check_compatibility, check_hyperplane_criterion, check_self_similarity,
    compute_invariants_affine, compute_invariants_centroaffine, double_step, frame_transport,
    interior_sites, invariants_at,
    structure_step, AffinePoint, Frame, FrameMode, InvariantTable, LatticeIndex, Neighborhood,
    TransitionFamily, TransitionMatrix,
};
pub use linalg::Matrix;
pub use rational::Rational;
pub use slicer::{pair_labels, slice_series, LabelPair, PieceShape, Role, Slice, SlicePiece, SliceSeries};
