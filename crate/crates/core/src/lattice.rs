//! Discrete centro-affine lattices: frames, transition matrices, the
//! structure-equation steps, and the determinant-ratio invariants.
//!
//! A frame at lattice site `k` is the row-block `(r, r_1, ..., r_n)` of
//! position vectors, where `r_i` is the point at `k + e_i`. Transition
//! matrices act on the right: the frame at `k + e_i` is `frame(k) * M_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::generator::PointLattice;
use crate::linalg::Matrix;
use crate::rational::{int, Rational};

/// Address `(k_1, ..., k_n)` of a lattice point. Coordinates are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeIndex(Vec<usize>);

impl LatticeIndex {
    pub fn new(coords: Vec<usize>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Structure("lattice index has no coordinates".into()));
        }
        if let Some(pos) = coords.iter().position(|&c| c == 0) {
            return Err(Error::Domain(format!(
                "lattice coordinate {} is 0; indices start at 1",
                pos + 1
            )));
        }
        Ok(LatticeIndex(coords))
    }

    pub fn origin(n: usize) -> Self {
        LatticeIndex(vec![1; n])
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.len()
    }

    /// The index shifted forward by `steps` along 0-based `axis`.
    pub fn step(&self, axis: usize, steps: usize) -> Self {
        let mut c = self.0.clone();
        c[axis] += steps;
        LatticeIndex(c)
    }
}

impl fmt::Display for LatticeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A point of the ambient space with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffinePoint(Vec<Rational>);

impl AffinePoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        AffinePoint(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        AffinePoint(coords.iter().map(|&v| int(v)).collect())
    }

    pub fn origin(dim: usize) -> Self {
        AffinePoint(vec![Rational::zero(); dim])
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<Rational> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    fn check_dim(&self, other: &AffinePoint) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Structure(format!(
                "points of dimension {} and {} cannot be combined",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &AffinePoint) -> Result<AffinePoint> {
        self.check_dim(other)?;
        Ok(AffinePoint(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &AffinePoint) -> Result<AffinePoint> {
        self.check_dim(other)?;
        Ok(AffinePoint(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn scale(&self, factor: &Rational) -> AffinePoint {
        AffinePoint(self.0.iter().map(|a| a * factor).collect())
    }

    /// Image under `x -> linear * x + translation`.
    pub fn map_affine(&self, linear: &Matrix, translation: &[Rational]) -> Result<AffinePoint> {
        if linear.cols() != self.dim() || linear.rows() != translation.len() {
            return Err(Error::Structure("affine map does not fit point dimension".into()));
        }
        let coords = (0..linear.rows())
            .map(|i| {
                linear
                    .row(i)
                    .iter()
                    .zip(&self.0)
                    .fold(translation[i].clone(), |acc, (a, x)| acc + a * x)
            })
            .collect();
        Ok(AffinePoint(coords))
    }
}

/// `r_ij = r_i + r_j - r`: the structure equation for mixed steps.
pub fn structure_step(r: &AffinePoint, r_i: &AffinePoint, r_j: &AffinePoint) -> Result<AffinePoint> {
    r_i.add(r_j)?.sub(r)
}

/// `r_ii = 2 r_i - r`: the structure equation along a single axis.
pub fn double_step(r: &AffinePoint, r_i: &AffinePoint) -> Result<AffinePoint> {
    r_i.scale(&int(2)).sub(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FrameMode {
    /// Points live in an `(n+1)`-dimensional space; invariants are
    /// preserved by linear maps fixing the origin.
    CentroAffine,
    /// Points live in `n`-dimensional space (a hyperplane off the origin
    /// after lifting); invariants are preserved by all affine maps.
    Affine,
}

impl FrameMode {
    pub fn ambient_dim(self, n: usize) -> usize {
        match self {
            FrameMode::CentroAffine => n + 1,
            FrameMode::Affine => n,
        }
    }

    pub fn for_ambient(n: usize, ambient: usize) -> Option<FrameMode> {
        if ambient == n {
            Some(FrameMode::Affine)
        } else if ambient == n + 1 {
            Some(FrameMode::CentroAffine)
        } else {
            None
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FrameMode::CentroAffine => "centroaffine",
            FrameMode::Affine => "affine",
        }
    }
}

/// A base point together with its `n` forward neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    base: AffinePoint,
    neighbors: Vec<AffinePoint>,
    mode: FrameMode,
}

impl Frame {
    /// Validates dimensions and linear independence eagerly.
    pub fn new(base: AffinePoint, neighbors: Vec<AffinePoint>, mode: FrameMode) -> Result<Frame> {
        let n = neighbors.len();
        if n == 0 {
            return Err(Error::Structure("frame needs at least one neighbor".into()));
        }
        let ambient = mode.ambient_dim(n);
        if base.dim() != ambient {
            return Err(Error::Structure(format!(
                "{} frame with {} neighbors needs points of dimension {}, base has {}",
                mode.name(),
                n,
                ambient,
                base.dim()
            )));
        }
        if let Some(k) = neighbors.iter().position(|p| p.dim() != ambient) {
            return Err(Error::Structure(format!(
                "neighbor {} has dimension {}, expected {}",
                k + 1,
                neighbors[k].dim(),
                ambient
            )));
        }
        let frame = Frame { base, neighbors, mode };
        frame.check_independence()?;
        Ok(frame)
    }

    pub(crate) fn from_columns_unchecked(columns: &Matrix, mode: FrameMode) -> Frame {
        let base = AffinePoint(columns.column(0));
        let neighbors = (1..columns.cols()).map(|j| AffinePoint(columns.column(j))).collect();
        Frame { base, neighbors, mode }
    }

    fn check_independence(&self) -> Result<()> {
        let vectors: Vec<Vec<Rational>> = match self.mode {
            FrameMode::Affine => self
                .neighbors
                .iter()
                .map(|p| p.sub(&self.base).map(AffinePoint::into_coords))
                .collect::<Result<_>>()?,
            FrameMode::CentroAffine => std::iter::once(&self.base)
                .chain(&self.neighbors)
                .map(|p| p.coords().to_vec())
                .collect(),
        };
        for k in 0..vectors.len() {
            let cols: Vec<&[Rational]> = vectors[..=k].iter().map(Vec::as_slice).collect();
            let m = Matrix::from_columns(&cols).expect("uniform dimension");
            if m.rank() <= k {
                let what = match (self.mode, k) {
                    (FrameMode::CentroAffine, 0) => "base vector r is zero".to_string(),
                    (FrameMode::CentroAffine, k) => {
                        format!("neighbor r_{k} depends linearly on the preceding vectors")
                    }
                    (FrameMode::Affine, k) => format!(
                        "edge vector r_{} - r depends linearly on the preceding edge vectors",
                        k + 1
                    ),
                };
                return Err(Error::DegenerateFrame(what));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &AffinePoint {
        &self.base
    }

    pub fn neighbors(&self) -> &[AffinePoint] {
        &self.neighbors
    }

    pub fn mode(&self) -> FrameMode {
        self.mode
    }

    /// Lattice dimension `n`.
    pub fn dimension(&self) -> usize {
        self.neighbors.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    /// The frame as a `d x (n+1)` matrix with columns `r, r_1, ..., r_n`.
    pub fn columns(&self) -> Matrix {
        let cols: Vec<&[Rational]> = std::iter::once(&self.base)
            .chain(&self.neighbors)
            .map(AffinePoint::coords)
            .collect();
        Matrix::from_columns(&cols).expect("uniform dimension")
    }

    pub fn map_affine(&self, linear: &Matrix, translation: &[Rational]) -> Result<Frame> {
        let base = self.base.map_affine(linear, translation)?;
        let neighbors = self
            .neighbors
            .iter()
            .map(|p| p.map_affine(linear, translation))
            .collect::<Result<_>>()?;
        Frame::new(base, neighbors, self.mode)
    }
}

/// One of the matrices `M_i` moving a frame one step along axis `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionMatrix {
    axis: usize,
    entries: Matrix,
}

impl TransitionMatrix {
    /// `axis` is 1-based: `M_1` moves along the first lattice axis. The
    /// first column must be the unit vector with its 1 in row `axis + 1`.
    pub fn new(axis: usize, entries: Matrix) -> Result<TransitionMatrix> {
        if !entries.is_square() || entries.rows() < 2 {
            return Err(Error::Structure(format!(
                "transition matrix must be square of size >= 2, got {}x{}",
                entries.rows(),
                entries.cols()
            )));
        }
        let size = entries.rows();
        if axis == 0 || axis >= size {
            return Err(Error::Domain(format!(
                "axis {axis} out of range for a {size}x{size} transition matrix"
            )));
        }
        for row in 0..size {
            let expected = if row == axis { Rational::one() } else { Rational::zero() };
            if entries[(row, 0)] != expected {
                return Err(Error::Precondition(format!(
                    "first column of M{axis} must be the unit vector e{}",
                    axis + 1
                )));
            }
        }
        if entries.determinant().is_zero() {
            return Err(Error::Precondition(format!("M{axis} is degenerate")));
        }
        Ok(TransitionMatrix { axis, entries })
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.rows()
    }
}

/// The canonical family for `r_ij = r_i + r_j - r` in dimension `n`:
/// first row `(0, -1, ..., -1)`, row `i+1` equal to `(1, 1, ..., 2, ..., 1)`
/// with the 2 on the diagonal, unit rows elsewhere.
pub fn canonical_matrices(n: usize) -> Result<Vec<TransitionMatrix>> {
    if n < 2 {
        return Err(Error::Domain(format!("lattice dimension must be >= 2, got {n}")));
    }
    (1..=n)
        .map(|axis| {
            let mut m = Matrix::zeros(n + 1, n + 1);
            for c in 1..=n {
                m[(0, c)] = int(-1);
            }
            for r in 1..=n {
                if r == axis {
                    for c in 0..=n {
                        m[(r, c)] = int(1);
                    }
                    m[(r, r)] = int(2);
                } else {
                    m[(r, r)] = int(1);
                }
            }
            TransitionMatrix::new(axis, m)
        })
        .collect()
}

fn check_same_size(matrices: &[TransitionMatrix]) -> Result<()> {
    if let Some(first) = matrices.first() {
        if let Some(bad) = matrices.iter().find(|m| m.size() != first.size()) {
            return Err(Error::Structure(format!(
                "matrix M{} has size {}, expected {}",
                bad.axis,
                bad.size(),
                first.size()
            )));
        }
    }
    Ok(())
}

/// Compatibility for constant families: every pair commutes exactly.
pub fn check_compatibility(matrices: &[TransitionMatrix]) -> Result<bool> {
    check_same_size(matrices)?;
    for (i, a) in matrices.iter().enumerate() {
        for b in &matrices[i + 1..] {
            let ab = a.entries.mul(&b.entries).expect("same size");
            let ba = b.entries.mul(&a.entries).expect("same size");
            if ab != ba {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff every column of every matrix sums to exactly 1, i.e. the
/// lattice stays in a hyperplane that misses the origin.
pub fn check_hyperplane_criterion(matrices: &[TransitionMatrix]) -> bool {
    matrices.iter().all(|m| {
        let e = &m.entries;
        (0..e.cols()).all(|c| (0..e.rows()).map(|r| &e[(r, c)]).sum::<Rational>().is_one())
    })
}

/// A validated family `M_1, ..., M_n`: right sizes, axes in order, the
/// column symmetry `(ei)_{A,k+1} = (ek)_{A,i+1}`, pairwise commutation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionFamily {
    matrices: Vec<TransitionMatrix>,
}

impl TransitionFamily {
    pub fn new(matrices: Vec<TransitionMatrix>) -> Result<TransitionFamily> {
        let n = matrices.len();
        if n == 0 {
            return Err(Error::Structure("empty transition family".into()));
        }
        check_same_size(&matrices)?;
        if matrices[0].size() != n + 1 {
            return Err(Error::Structure(format!(
                "{n} matrices must each be {}x{}",
                n + 1,
                n + 1
            )));
        }
        for (k, m) in matrices.iter().enumerate() {
            if m.axis != k + 1 {
                return Err(Error::Structure(format!(
                    "matrix in position {} is M{}",
                    k + 1,
                    m.axis
                )));
            }
        }
        for i in 0..n {
            for k in i + 1..n {
                for row in 0..=n {
                    if matrices[i].entries[(row, k + 1)] != matrices[k].entries[(row, i + 1)] {
                        return Err(Error::Precondition(format!(
                            "column {} of M{} differs from column {} of M{}",
                            k + 2,
                            i + 1,
                            i + 2,
                            k + 1
                        )));
                    }
                }
            }
        }
        if !check_compatibility(&matrices)? {
            return Err(Error::Precondition(
                "transition matrices do not commute (compatibility condition fails)".into(),
            ));
        }
        Ok(TransitionFamily { matrices })
    }

    pub fn canonical(n: usize) -> Result<TransitionFamily> {
        TransitionFamily::new(canonical_matrices(n)?)
    }

    pub fn matrices(&self) -> &[TransitionMatrix] {
        &self.matrices
    }

    pub fn dimension(&self) -> usize {
        self.matrices.len()
    }

    /// `M_axis` for 0-based `axis`.
    pub fn get(&self, axis: usize) -> &TransitionMatrix {
        &self.matrices[axis]
    }

    pub fn into_matrices(self) -> Vec<TransitionMatrix> {
        self.matrices
    }
}

fn check_frame_fits(frame: &Frame, family: &TransitionFamily) -> Result<()> {
    if frame.dimension() != family.dimension() {
        return Err(Error::Structure(format!(
            "frame has {} neighbors but the family has {} matrices",
            frame.dimension(),
            family.dimension()
        )));
    }
    Ok(())
}

/// Moves `frame` by `exponents` steps per axis:
/// `(r, r_1, ..., r_n) * M_1^{e_1} * ... * M_n^{e_n}`.
pub fn frame_transport(frame: &Frame, family: &TransitionFamily, exponents: &[i64]) -> Result<Frame> {
    check_frame_fits(frame, family)?;
    if exponents.len() != family.dimension() {
        return Err(Error::Structure(format!(
            "expected {} exponents, got {}",
            family.dimension(),
            exponents.len()
        )));
    }
    if let Some(e) = exponents.iter().find(|&&e| e < 0) {
        return Err(Error::Domain(format!(
            "negative exponent {e}: backward transport is not supported"
        )));
    }
    let mut columns = frame.columns();
    for (m, &e) in family.matrices.iter().zip(exponents) {
        if e > 0 {
            columns = columns.mul(&m.entries.pow(e as u64)).expect("fits");
        }
    }
    Ok(Frame::from_columns_unchecked(&columns, frame.mode))
}

/// The points `{r, r_i, r_ii, r_ij (i<j)}` around one lattice site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    base: AffinePoint,
    forward: Vec<AffinePoint>,
    double: Vec<AffinePoint>,
    mixed: BTreeMap<(usize, usize), AffinePoint>,
}

impl Neighborhood {
    /// `forward[i]` is `r_i`, `double[i]` is `r_ii`, `mixed[(i, j)]` with
    /// `i < j` is `r_ij`; all axes 0-based.
    pub fn new(
        base: AffinePoint,
        forward: Vec<AffinePoint>,
        double: Vec<AffinePoint>,
        mixed: BTreeMap<(usize, usize), AffinePoint>,
    ) -> Result<Neighborhood> {
        let n = forward.len();
        if n == 0 || double.len() != n {
            return Err(Error::Structure(
                "neighborhood needs one forward and one double step per axis".into(),
            ));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !mixed.contains_key(&(i, j)) {
                    return Err(Error::Structure(format!(
                        "neighborhood lacks the mixed point r_{}{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        if mixed.len() != n * (n - 1) / 2 {
            return Err(Error::Structure("unexpected mixed points in neighborhood".into()));
        }
        let d = base.dim();
        let all_same = forward
            .iter()
            .chain(&double)
            .chain(mixed.values())
            .all(|p| p.dim() == d);
        if !all_same {
            return Err(Error::Structure("neighborhood points differ in dimension".into()));
        }
        Ok(Neighborhood { base, forward, double, mixed })
    }

    /// Reads the stencil at `site` out of a lattice.
    pub fn from_lattice(lattice: &PointLattice, site: &LatticeIndex) -> Result<Neighborhood> {
        let n = lattice.dimension();
        if site.dimension() != n {
            return Err(Error::Structure("site dimension does not match lattice".into()));
        }
        let fetch = |idx: LatticeIndex| -> Result<AffinePoint> {
            lattice.point(&idx).cloned().ok_or_else(|| {
                Error::Domain(format!("lattice has no point at {idx}; stencil does not fit"))
            })
        };
        let base = fetch(site.clone())?;
        let forward = (0..n).map(|i| fetch(site.step(i, 1))).collect::<Result<_>>()?;
        let double = (0..n).map(|i| fetch(site.step(i, 2))).collect::<Result<_>>()?;
        let mut mixed = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                mixed.insert((i, j), fetch(site.step(i, 1).step(j, 1))?);
            }
        }
        Neighborhood::new(base, forward, double, mixed)
    }

    pub fn dimension(&self) -> usize {
        self.forward.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn base(&self) -> &AffinePoint {
        &self.base
    }

    pub fn forward(&self, i: usize) -> &AffinePoint {
        &self.forward[i]
    }

    /// `r_ij` (or `r_ii` when `i == j`).
    pub fn second(&self, i: usize, j: usize) -> &AffinePoint {
        if i == j {
            &self.double[i]
        } else {
            &self.mixed[&(i.min(j), i.max(j))]
        }
    }

    pub fn map_affine(&self, linear: &Matrix, translation: &[Rational]) -> Result<Neighborhood> {
        let map = |p: &AffinePoint| p.map_affine(linear, translation);
        Ok(Neighborhood {
            base: map(&self.base)?,
            forward: self.forward.iter().map(map).collect::<Result<_>>()?,
            double: self.double.iter().map(map).collect::<Result<_>>()?,
            mixed: self
                .mixed
                .iter()
                .map(|(k, p)| Ok((*k, map(p)?)))
                .collect::<Result<_>>()?,
        })
    }
}

/// The coefficients `(ei)_{A,B}`: one `(n+1)x(n+1)` table per axis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantTable {
    tables: Vec<Matrix>,
}

impl InvariantTable {
    pub fn new(tables: Vec<Matrix>) -> Result<InvariantTable> {
        let n = tables.len();
        if n == 0 || tables.iter().any(|t| t.rows() != n + 1 || t.cols() != n + 1) {
            return Err(Error::Structure(format!(
                "an invariant table for {n} axes needs {n} matrices of size {}x{}",
                n + 1,
                n + 1
            )));
        }
        Ok(InvariantTable { tables })
    }

    pub fn dimension(&self) -> usize {
        self.tables.len()
    }

    /// Table of axis `i` (0-based), i.e. the matrix `M_{i+1}`.
    pub fn axis(&self, i: usize) -> &Matrix {
        &self.tables[i]
    }

    pub fn tables(&self) -> &[Matrix] {
        &self.tables
    }

    pub fn to_matrices(&self) -> Result<Vec<TransitionMatrix>> {
        self.tables
            .iter()
            .enumerate()
            .map(|(i, t)| TransitionMatrix::new(i + 1, t.clone()))
            .collect()
    }
}

/// Invariants of a lattice lying in `n`-space (the hyperplane case).
///
/// Each interior entry is a ratio of `n x n` determinants of edge vectors
/// `r_l - r`; the diagonal column uses `r_ii - r_i` and adds 1 back. The
/// first row comes from the column sums being 1, the first column is the
/// unit vector `e_{i+1}`.
pub fn compute_invariants_affine(nb: &Neighborhood) -> Result<InvariantTable> {
    let n = nb.dimension();
    if nb.ambient_dim() != n {
        return Err(Error::Structure(format!(
            "affine invariants need points of dimension {n}, got {}",
            nb.ambient_dim()
        )));
    }
    let edges: Vec<Vec<Rational>> = (0..n)
        .map(|l| nb.forward(l).sub(nb.base()).map(AffinePoint::into_coords))
        .collect::<Result<_>>()?;
    let cols: Vec<&[Rational]> = edges.iter().map(Vec::as_slice).collect();
    let basis = Matrix::from_columns(&cols).expect("square");
    let denom = basis.determinant();
    if denom.is_zero() {
        return Err(Error::DegenerateFrame(
            "edge vectors r_i - r are linearly dependent".into(),
        ));
    }

    let mut tables = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = Matrix::zeros(n + 1, n + 1);
        t[(i + 1, 0)] = Rational::one();
        for j in 0..n {
            let (target, shift) = if j == i {
                (nb.second(i, i).sub(nb.forward(i))?, Some(i))
            } else {
                (nb.second(i, j).sub(nb.base())?, None)
            };
            let target = target.into_coords();
            let mut interior_sum = Rational::zero();
            for l in 0..n {
                let mut coeff = basis.with_column(l, &target).determinant() / &denom;
                if shift == Some(l) {
                    coeff += Rational::one();
                }
                interior_sum += &coeff;
                t[(l + 1, j + 1)] = coeff;
            }
            t[(0, j + 1)] = Rational::one() - interior_sum;
        }
        tables.push(t);
    }
    InvariantTable::new(tables)
}

/// Invariants of a lattice in `(n+1)`-space: every entry is
/// `[r, ..., target_B in slot A, ..., r_n] / [r, r_1, ..., r_n]` where
/// `target_B` is the `B`-th column of the next frame along the axis.
pub fn compute_invariants_centroaffine(nb: &Neighborhood) -> Result<InvariantTable> {
    let n = nb.dimension();
    if nb.ambient_dim() != n + 1 {
        return Err(Error::Structure(format!(
            "centro-affine invariants need points of dimension {}, got {}",
            n + 1,
            nb.ambient_dim()
        )));
    }
    let cols: Vec<&[Rational]> = std::iter::once(nb.base())
        .chain(nb.forward.iter())
        .map(AffinePoint::coords)
        .collect();
    let frame = Matrix::from_columns(&cols).expect("square");
    let denom = frame.determinant();
    if denom.is_zero() {
        return Err(Error::DegenerateFrame(
            "vectors r, r_1, ..., r_n are linearly dependent".into(),
        ));
    }

    let mut tables = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = Matrix::zeros(n + 1, n + 1);
        for b in 0..=n {
            let target = if b == 0 { nb.forward(i) } else { nb.second(i, b - 1) };
            for a in 0..=n {
                t[(a, b)] = frame.with_column(a, target.coords()).determinant() / &denom;
            }
        }
        tables.push(t);
    }
    InvariantTable::new(tables)
}

/// Invariants at one site, choosing the affine or centro-affine formula
/// from the lattice's ambient dimension.
pub fn invariants_at(lattice: &PointLattice, site: &LatticeIndex) -> Result<InvariantTable> {
    let nb = Neighborhood::from_lattice(lattice, site)?;
    match FrameMode::for_ambient(lattice.dimension(), lattice.ambient_dim()) {
        Some(FrameMode::Affine) => compute_invariants_affine(&nb),
        Some(FrameMode::CentroAffine) => compute_invariants_centroaffine(&nb),
        None => Err(Error::Structure(format!(
            "lattice of dimension {} in ambient dimension {} has no invariants",
            lattice.dimension(),
            lattice.ambient_dim()
        ))),
    }
}

/// Sites whose full stencil (including `r_ii`) lies inside the lattice box.
pub fn interior_sites(lattice: &PointLattice) -> Vec<LatticeIndex> {
    let inner: Vec<usize> = lattice.extent().iter().map(|&e| e.saturating_sub(2)).collect();
    if inner.contains(&0) {
        return Vec::new();
    }
    crate::generator::box_indices(&inner).collect()
}

/// True iff the invariant tables agree at every interior site.
pub fn check_self_similarity(lattice: &PointLattice) -> Result<bool> {
    if let Some(e) = lattice.extent().iter().find(|&&e| e < 3) {
        return Err(Error::Domain(format!(
            "self-similarity needs extent >= 3 on every axis, found {e}"
        )));
    }
    let mut reference: Option<InvariantTable> = None;
    for site in interior_sites(lattice) {
        let table = invariants_at(lattice, &site)?;
        match &reference {
            None => reference = Some(table),
            Some(r) if *r != table => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}
