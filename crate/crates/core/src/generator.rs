//! Lattice point generation (structure-equation recurrence and matrix
//! transport) and assembly of coloured cells into meshes.

use crate::error::{Error, Result};
use crate::index_sets::{enumerate_cells, CellIndex, Family, FractalKind};
use crate::lattice::{
    double_step, structure_step, AffinePoint, Frame, FrameMode, LatticeIndex, TransitionFamily,
};
use crate::linalg::Matrix;

/// Iterates every index of the box `[1, extent_1] x ... x [1, extent_n]`
/// in lexicographic order.
pub fn box_indices(extent: &[usize]) -> impl Iterator<Item = LatticeIndex> + '_ {
    let empty = extent.is_empty() || extent.contains(&0);
    let mut current = if empty { None } else { Some(vec![1usize; extent.len()]) };
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let mut next = out.clone();
        let mut axis = extent.len();
        loop {
            if axis == 0 {
                current = None;
                break;
            }
            axis -= 1;
            if next[axis] < extent[axis] {
                next[axis] += 1;
                current = Some(next);
                break;
            }
            next[axis] = 1;
        }
        Some(LatticeIndex::new(out).expect("box indices start at 1"))
    })
}

/// Points of a lattice over a finite index box, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointLattice {
    extent: Vec<usize>,
    points: Vec<AffinePoint>,
}

impl PointLattice {
    /// `points` are in lexicographic index order (last axis fastest).
    pub fn from_points(extent: Vec<usize>, points: Vec<AffinePoint>) -> Result<PointLattice> {
        if extent.is_empty() || extent.contains(&0) {
            return Err(Error::Domain("lattice extent must be positive on every axis".into()));
        }
        let total: usize = extent.iter().product();
        if points.len() != total {
            return Err(Error::Structure(format!(
                "extent {:?} needs {total} points, got {}",
                extent,
                points.len()
            )));
        }
        let d = points[0].dim();
        if points.iter().any(|p| p.dim() != d) {
            return Err(Error::Structure("lattice points differ in dimension".into()));
        }
        Ok(PointLattice { extent, points })
    }

    pub fn dimension(&self) -> usize {
        self.extent.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn offset(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.extent.len() {
            return None;
        }
        let mut off = 0;
        for (&c, &e) in coords.iter().zip(&self.extent) {
            if c < 1 || c > e {
                return None;
            }
            off = off * e + (c - 1);
        }
        Some(off)
    }

    /// Point at 1-based coordinates, if inside the box.
    pub fn get(&self, coords: &[usize]) -> Option<&AffinePoint> {
        self.offset(coords).map(|o| &self.points[o])
    }

    pub fn point(&self, idx: &LatticeIndex) -> Option<&AffinePoint> {
        self.get(idx.coords())
    }

    pub fn points(&self) -> &[AffinePoint] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = (LatticeIndex, &AffinePoint)> {
        box_indices(&self.extent).zip(self.points.iter())
    }

    /// Copy with the point at `idx` replaced.
    pub fn with_point(&self, idx: &LatticeIndex, p: AffinePoint) -> Result<PointLattice> {
        let off = self
            .offset(idx.coords())
            .ok_or_else(|| Error::Domain(format!("{idx} lies outside the lattice")))?;
        if p.dim() != self.ambient_dim() {
            return Err(Error::Structure("replacement point has wrong dimension".into()));
        }
        let mut out = self.clone();
        out.points[off] = p;
        Ok(out)
    }

    pub fn map_points<F>(&self, f: F) -> Result<PointLattice>
    where
        F: Fn(&AffinePoint) -> Result<AffinePoint>,
    {
        let points = self.points.iter().map(f).collect::<Result<_>>()?;
        PointLattice::from_points(self.extent.clone(), points)
    }

    /// The frame at the origin index; mode follows from the ambient dimension.
    pub fn frame(&self) -> Result<Frame> {
        let n = self.dimension();
        let mode = FrameMode::for_ambient(n, self.ambient_dim()).ok_or_else(|| {
            Error::Structure(format!(
                "ambient dimension {} does not fit a {n}-dimensional lattice",
                self.ambient_dim()
            ))
        })?;
        if self.extent.iter().any(|&e| e < 2) {
            return Err(Error::Domain("lattice too small to hold a frame".into()));
        }
        let origin = LatticeIndex::origin(n);
        let base = self.point(&origin).expect("origin").clone();
        let neighbors = (0..n)
            .map(|i| self.point(&origin.step(i, 1)).expect("in box").clone())
            .collect();
        Frame::new(base, neighbors, mode)
    }
}

fn check_extent(frame: &Frame, extent: &[usize]) -> Result<()> {
    if extent.len() != frame.dimension() {
        return Err(Error::Structure(format!(
            "extent has {} axes, frame has {}",
            extent.len(),
            frame.dimension()
        )));
    }
    if let Some(e) = extent.iter().find(|&&e| e < 2) {
        return Err(Error::Domain(format!("extent must be >= 2 on every axis, found {e}")));
    }
    Ok(())
}

/// Fills the box from the frame with `r_ij = r_i + r_j - r` and
/// `r_ii = 2 r_i - r`, visiting indices by increasing coordinate sum
/// (ties lexicographic).
pub fn generate_points_recurrence(frame: &Frame, extent: &[usize]) -> Result<PointLattice> {
    check_extent(frame, extent)?;
    let n = extent.len();
    let mut order: Vec<LatticeIndex> = box_indices(extent).collect();
    order.sort_by(|a, b| {
        let sa: usize = a.coords().iter().sum();
        let sb: usize = b.coords().iter().sum();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });

    let total = order.len();
    let mut slots: Vec<Option<AffinePoint>> = vec![None; total];
    let offset = |c: &[usize]| c.iter().zip(extent).fold(0, |off, (&c, &e)| off * e + (c - 1));
    let back = |idx: &LatticeIndex, axis: usize, steps: usize| {
        let mut c = idx.coords().to_vec();
        c[axis] -= steps;
        c
    };

    for idx in &order {
        let raised: Vec<usize> = (0..n).filter(|&i| idx.coords()[i] >= 2).collect();
        let point = match raised.as_slice() {
            [] => frame.base().clone(),
            [i] if idx.coords()[*i] == 2 => frame.neighbors()[*i].clone(),
            [i] => {
                let r = slots[offset(&back(idx, *i, 2))].as_ref().expect("filled earlier");
                let r_i = slots[offset(&back(idx, *i, 1))].as_ref().expect("filled earlier");
                double_step(r, r_i)?
            }
            [i, j, ..] => {
                let ci = back(idx, *i, 1);
                let cj = back(idx, *j, 1);
                let mut cij = ci.clone();
                cij[*j] -= 1;
                let r = slots[offset(&cij)].as_ref().expect("filled earlier");
                let r_i = slots[offset(&ci)].as_ref().expect("filled earlier");
                let r_j = slots[offset(&cj)].as_ref().expect("filled earlier");
                structure_step(r, r_i, r_j)?
            }
        };
        slots[offset(idx.coords())] = Some(point);
    }
    let points = slots.into_iter().map(|p| p.expect("box fully filled")).collect();
    PointLattice::from_points(extent.to_vec(), points)
}

/// Fills the box by transporting frames with the matrix family. The sweep
/// is an odometer: each step costs one frame-times-matrix product, taken
/// from the cached frame at the start of the current line.
pub fn generate_points_matrix(
    frame: &Frame,
    family: &TransitionFamily,
    extent: &[usize],
) -> Result<PointLattice> {
    check_extent(frame, extent)?;
    if family.dimension() != frame.dimension() {
        return Err(Error::Structure(format!(
            "frame has {} neighbors but the family has {} matrices",
            frame.dimension(),
            family.dimension()
        )));
    }
    let n = extent.len();
    let total: usize = extent.iter().product();
    let mut points = Vec::with_capacity(total);
    let mut line_start: Vec<Matrix> = vec![frame.columns(); n];
    let mut current = frame.columns();
    let mut idx = vec![1usize; n];
    loop {
        points.push(AffinePoint::new(current.column(0)));
        let Some(axis) = (0..n).rev().find(|&l| idx[l] < extent[l]) else {
            break;
        };
        idx[axis] += 1;
        for later in idx.iter_mut().skip(axis + 1) {
            *later = 1;
        }
        current = line_start[axis]
            .mul(family.get(axis).entries())
            .expect("frame fits family");
        for slot in line_start.iter_mut().skip(axis) {
            *slot = current.clone();
        }
    }
    PointLattice::from_points(extent.to_vec(), points)
}

/// One coloured cell with its corner points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellGeometry {
    pub id: u64,
    pub base: CellIndex,
    /// Sponge cells: the `2^n` corners in binary-counter order (bit `b` of
    /// the corner number is the offset along axis `b+1`). Simplex cells:
    /// the anchor followed by anchor + `e_1`, ..., anchor + `e_n`.
    pub vertices: Vec<AffinePoint>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FractalMesh {
    kind: FractalKind,
    frame: Frame,
    cells: Vec<CellGeometry>,
}

impl FractalMesh {
    pub fn new(kind: FractalKind, frame: Frame, cells: Vec<CellGeometry>) -> Result<FractalMesh> {
        if frame.dimension() != kind.n() {
            return Err(Error::Structure("frame dimension differs from mesh kind".into()));
        }
        let d = frame.ambient_dim();
        let nv = kind.cell_vertex_count();
        for c in &cells {
            if c.base.len() != kind.n() || c.vertices.len() != nv {
                return Err(Error::Structure(format!("cell {} has the wrong shape", c.id)));
            }
            if c.vertices.iter().any(|v| v.dim() != d) {
                return Err(Error::Structure(format!("cell {} has wrong point dimension", c.id)));
            }
        }
        Ok(FractalMesh { kind, frame, cells })
    }

    pub fn kind(&self) -> &FractalKind {
        &self.kind
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn cells(&self) -> &[CellGeometry] {
        &self.cells
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.ambient_dim()
    }
}

/// Lattice offsets of a cell's corners, in the stored vertex order.
pub fn corner_offsets(family: Family, n: usize) -> Vec<Vec<usize>> {
    match family {
        Family::Sponge => (0..1usize << n)
            .map(|c| (0..n).map(|b| (c >> b) & 1).collect())
            .collect(),
        Family::Simplex => std::iter::once(vec![0; n])
            .chain((0..n).map(|i| {
                let mut o = vec![0; n];
                o[i] = 1;
                o
            }))
            .collect(),
    }
}

/// Builds one cell per member of `S_m`, ids 1.. in anchor order.
pub fn assemble_mesh(kind: &FractalKind, lattice: &PointLattice) -> Result<FractalMesh> {
    if lattice.dimension() != kind.n() {
        return Err(Error::Structure(format!(
            "lattice dimension {} does not match n = {}",
            lattice.dimension(),
            kind.n()
        )));
    }
    let need = kind.point_extent();
    if let Some(&e) = lattice.extent().iter().find(|&&e| e < need) {
        return Err(Error::Domain(format!(
            "lattice extent {e} too small; level {} needs {need} points per axis",
            kind.m()
        )));
    }
    let offsets = corner_offsets(kind.family(), kind.n());
    let cells = enumerate_cells(kind)
        .members()
        .iter()
        .enumerate()
        .map(|(k, anchor)| {
            let vertices = offsets
                .iter()
                .map(|off| {
                    let c: Vec<usize> = anchor.iter().zip(off).map(|(a, o)| a + o).collect();
                    lattice.get(&c).expect("extent checked").clone()
                })
                .collect();
            CellGeometry { id: k as u64 + 1, base: anchor.clone(), vertices }
        })
        .collect();
    FractalMesh::new(*kind, lattice.frame()?, cells)
}

/// Per-cell generation without materialising the point box: each cell's
/// frame is `seed * M_1^{a_1-1} ... M_n^{a_n-1}` from cached matrix
/// powers, and the remaining corners follow from the structure equation.
pub fn assemble_mesh_by_transport(kind: &FractalKind, frame: &Frame) -> Result<FractalMesh> {
    let n = kind.n();
    if frame.dimension() != n {
        return Err(Error::Structure("frame dimension differs from mesh kind".into()));
    }
    let family = TransitionFamily::canonical(n)?;
    let side = kind.side();
    let powers: Vec<Vec<Matrix>> = family
        .matrices()
        .iter()
        .map(|m| {
            let mut acc = Matrix::identity(n + 1);
            let mut out = Vec::with_capacity(side);
            for _ in 0..side {
                out.push(acc.clone());
                acc = acc.mul(m.entries()).expect("square");
            }
            out
        })
        .collect();
    let seed = frame.columns();
    let offsets = corner_offsets(kind.family(), n);
    let cells = enumerate_cells(kind)
        .members()
        .iter()
        .enumerate()
        .map(|(k, anchor)| {
            let mut cols = seed.clone();
            for (axis, &a) in anchor.iter().enumerate() {
                if a > 1 {
                    cols = cols.mul(&powers[axis][a - 1]).expect("fits");
                }
            }
            let base = AffinePoint::new(cols.column(0));
            let edges: Vec<AffinePoint> = (1..=n)
                .map(|j| AffinePoint::new(cols.column(j)).sub(&base))
                .collect::<Result<_>>()?;
            let vertices = offsets
                .iter()
                .map(|off| {
                    off.iter()
                        .zip(&edges)
                        .filter(|(&o, _)| o == 1)
                        .try_fold(base.clone(), |acc, (_, e)| acc.add(e))
                })
                .collect::<Result<_>>()?;
            Ok(CellGeometry { id: k as u64 + 1, base: anchor.clone(), vertices })
        })
        .collect::<Result<_>>()?;
    FractalMesh::new(*kind, frame.clone(), cells)
}

/// A site and axis pair (1-based) where `r_ij - r_i - r_j + r != 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StructureViolation {
    pub site: LatticeIndex,
    pub axes: (usize, usize),
}

/// Checks the mixed structure equation on every unit 2-face of the box.
pub fn verify_structure(lattice: &PointLattice) -> Vec<StructureViolation> {
    let n = lattice.dimension();
    let mut out = Vec::new();
    for (site, r) in lattice.iter() {
        for i in 0..n {
            for j in i + 1..n {
                let (Some(r_i), Some(r_j), Some(r_ij)) = (
                    lattice.point(&site.step(i, 1)),
                    lattice.point(&site.step(j, 1)),
                    lattice.point(&site.step(i, 1).step(j, 1)),
                ) else {
                    continue;
                };
                let ok = structure_step(r, r_i, r_j).map(|p| p == *r_ij).unwrap_or(false);
                if !ok {
                    out.push(StructureViolation { site: site.clone(), axes: (i + 1, j + 1) });
                }
            }
        }
    }
    out
}

/// The seed frames used when none is supplied: the carpet, sponge,
/// triangle and pyramid seeds for n = 2, 3 and the standard basis
/// (base at the origin, `r_i = e_i`) from n = 4 on.
pub fn default_frame(family: Family, n: usize) -> Result<Frame> {
    let p = AffinePoint::from_ints;
    let (base, neighbors) = match (family, n) {
        (_, 0 | 1) => {
            return Err(Error::Domain(format!("dimension n must be >= 2, got {n}")));
        }
        // r(1,1) = [0 0], r(2,1) = [0 2], r(1,2) = [1 1]
        (Family::Sponge, 2) => (p(&[0, 0]), vec![p(&[0, 2]), p(&[1, 1])]),
        (Family::Sponge, 3) => (
            p(&[0, 0, 0]),
            vec![p(&[1, 1, 0]), p(&[0, 2, 0]), p(&[0, 0, 3])],
        ),
        // r(1,1) = [0 0], r(2,1) = [-2 -1], r(1,2) = [1 -2]
        (Family::Simplex, 2) => (p(&[0, 0]), vec![p(&[-2, -1]), p(&[1, -2])]),
        (Family::Simplex, 3) => (
            p(&[0, 0, 0]),
            vec![p(&[-1, -1, -1]), p(&[1, -1, -1]), p(&[1, 1, -1])],
        ),
        (_, n) => {
            let neighbors = (0..n)
                .map(|i| {
                    let mut c = vec![0i64; n];
                    c[i] = 1;
                    p(&c)
                })
                .collect();
            (AffinePoint::origin(n), neighbors)
        }
    };
    Frame::new(base, neighbors, FrameMode::Affine)
}
