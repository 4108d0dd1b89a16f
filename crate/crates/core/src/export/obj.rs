use std::collections::HashMap;
use std::io::Write;

use num_traits::Signed;

use super::{Geometry, Layout};
use crate::error::Result;
use crate::lattice::AffinePoint;
use crate::linalg::Matrix;
use crate::rational::{format_sig6, Rational};

/// Outward faces of a tetrahedron `v0..v3` with positive orientation.
const TET_FACES: [[usize; 3]; 4] = [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];

fn orientation(origin: &AffinePoint, edges: [&AffinePoint; 3]) -> Rational {
    let cols: Vec<Vec<Rational>> = edges
        .iter()
        .map(|e| e.sub(origin).expect("same dimension").into_coords())
        .collect();
    let refs: Vec<&[Rational]> = cols.iter().map(Vec::as_slice).collect();
    Matrix::from_columns(&refs).expect("3x3").determinant()
}

/// Six quads of a parallelepiped whose corners are in counter order.
fn box_faces(v: &[AffinePoint]) -> Vec<Vec<usize>> {
    let mut faces = Vec::with_capacity(6);
    for a in 0..3 {
        let (b, c) = ((a + 1) % 3, (a + 2) % 3);
        for side in 0..2 {
            let corner = |sb: usize, sc: usize| (side << a) | (sb << b) | (sc << c);
            // (a, b, c) is a cyclic permutation, so this loop has normal +e_a.
            let mut f = vec![corner(0, 0), corner(1, 0), corner(1, 1), corner(0, 1)];
            if side == 0 {
                f.reverse();
            }
            faces.push(f);
        }
    }
    if orientation(&v[0], [&v[1], &v[2], &v[4]]).is_negative() {
        faces.iter_mut().for_each(|f| f.reverse());
    }
    faces
}

fn tet_faces(v: &[AffinePoint]) -> Vec<Vec<usize>> {
    let flip = orientation(&v[0], [&v[1], &v[2], &v[3]]).is_negative();
    TET_FACES
        .iter()
        .map(|f| {
            let mut f = f.to_vec();
            if flip {
                f.reverse();
            }
            f
        })
        .collect()
}

/// Writes 3D geometry as Wavefront OBJ (`v`, `g`, `f`, `p` records).
/// Vertices are shared by exact coordinates, numbered by first use.
pub fn export_obj<W: Write>(geom: Geometry<'_>, mut out: W) -> Result<()> {
    geom.require_dim(3, "OBJ")?;
    let pieces = geom.pieces();

    let mut ids: HashMap<&AffinePoint, usize> = HashMap::new();
    let mut order: Vec<&AffinePoint> = Vec::new();
    let mut refs: Vec<Vec<usize>> = Vec::with_capacity(pieces.len());
    for piece in &pieces {
        let r = piece
            .vertices
            .iter()
            .map(|v| {
                *ids.entry(v).or_insert_with(|| {
                    order.push(v);
                    order.len()
                })
            })
            .collect();
        refs.push(r);
    }

    writeln!(out, "# affine-fractals")?;
    for v in &order {
        let c: Vec<String> = v.coords().iter().map(format_sig6).collect();
        writeln!(out, "v {}", c.join(" "))?;
    }
    for (piece, r) in pieces.iter().zip(&refs) {
        match piece.role {
            Some(role) => writeln!(out, "g c{}_{}", piece.label, role.name())?,
            None => writeln!(out, "g c{}", piece.label)?,
        }
        let faces = match piece.layout {
            Layout::Box => box_faces(piece.vertices),
            Layout::Simplex => tet_faces(piece.vertices),
            Layout::Point => {
                writeln!(out, "p {}", r[0])?;
                continue;
            }
        };
        for f in faces {
            let idx: Vec<String> = f.iter().map(|&k| r[k].to_string()).collect();
            writeln!(out, "f {}", idx.join(" "))?;
        }
    }
    Ok(())
}
