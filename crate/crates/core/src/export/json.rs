//! Canonical JSON documents. Rationals travel as `{"num": "..", "den": ".."}`
//! strings so no precision is lost; object keys come out sorted because
//! `serde_json::Map` is ordered.

use std::io::{Read, Write};

use num_bigint::BigInt;
use num_traits::Zero;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::generator::{CellGeometry, FractalMesh, PointLattice};
use crate::index_sets::{CellIndex, Family, FractalKind};
use crate::lattice::{AffinePoint, Frame, FrameMode, InvariantTable};
use crate::linalg::Matrix;
use crate::rational::{parse_bigint, Rational};
use crate::slicer::{PieceShape, Role, Slice, SlicePiece, SliceSeries};

pub const SCHEMA_VERSION: u64 = 1;

/// Every value that can be written to (and read back from) JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Artifact {
    Lattice(PointLattice),
    Mesh(FractalMesh),
    Slices(SliceSeries),
    Invariants(InvariantTable),
}

impl Artifact {
    fn name(&self) -> &'static str {
        match self {
            Artifact::Lattice(_) => "lattice",
            Artifact::Mesh(_) => "mesh",
            Artifact::Slices(_) => "slices",
            Artifact::Invariants(_) => "invariants",
        }
    }
}

fn rational(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

fn point(p: &AffinePoint) -> Value {
    Value::Array(p.coords().iter().map(rational).collect())
}

fn matrix(m: &Matrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(rational).collect()))
            .collect(),
    )
}

fn frame(f: &Frame) -> Value {
    json!({
        "mode": f.mode().name(),
        "base": point(f.base()),
        "neighbors": f.neighbors().iter().map(point).collect::<Vec<_>>(),
    })
}

fn to_value(artifact: &Artifact) -> Result<Value> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("artifact".into(), json!(artifact.name()));
    let (kind, n, m, fr): (Option<Family>, usize, Option<usize>, Option<Value>) = match artifact {
        Artifact::Lattice(l) => (None, l.dimension(), None, l.frame().ok().map(|f| frame(&f))),
        Artifact::Mesh(mesh) => (
            Some(mesh.kind().family()),
            mesh.kind().n(),
            Some(mesh.kind().m()),
            Some(frame(mesh.frame())),
        ),
        Artifact::Slices(s) => (Some(s.kind.family()), s.kind.n(), Some(s.kind.m()), None),
        Artifact::Invariants(t) => (None, t.dimension(), None, None),
    };
    doc.insert("kind".into(), kind.map_or(Value::Null, |k| json!(k.name())));
    doc.insert("n".into(), json!(n));
    doc.insert("m".into(), m.map_or(Value::Null, |m| json!(m)));
    doc.insert("frame".into(), fr.unwrap_or(Value::Null));

    match artifact {
        Artifact::Lattice(l) => {
            doc.insert("extent".into(), json!(l.extent()));
            let points: Vec<Value> = l
                .iter()
                .map(|(idx, p)| json!({ "index": idx.coords(), "coords": point(p) }))
                .collect();
            doc.insert("points".into(), Value::Array(points));
        }
        Artifact::Mesh(mesh) => {
            let cells: Vec<Value> = mesh
                .cells()
                .iter()
                .map(|c| {
                    json!({
                        "id": c.id,
                        "base": &c.base[..],
                        "vertices": c.vertices.iter().map(point).collect::<Vec<_>>(),
                    })
                })
                .collect();
            doc.insert("cells".into(), Value::Array(cells));
        }
        Artifact::Slices(s) => {
            doc.insert("axis".into(), json!(s.axis));
            let slices: Vec<Value> = s
                .slices
                .iter()
                .map(|sl| {
                    let pieces: Vec<Value> = sl
                        .pieces
                        .iter()
                        .map(|p| {
                            json!({
                                "label": p.label,
                                "role": p.role.name(),
                                "shape": p.shape.name(),
                                "vertices": p.vertices.iter().map(point).collect::<Vec<_>>(),
                            })
                        })
                        .collect();
                    json!({ "time": sl.time, "pieces": pieces })
                })
                .collect();
            doc.insert("slices".into(), Value::Array(slices));
        }
        Artifact::Invariants(t) => {
            doc.insert(
                "invariants".into(),
                Value::Array(t.tables().iter().map(matrix).collect()),
            );
        }
    }
    Ok(Value::Object(doc))
}

/// Writes the canonical document followed by a newline.
pub fn export_json<W: Write>(artifact: &Artifact, mut out: W) -> Result<()> {
    let value = to_value(artifact)?;
    serde_json::to_writer(&mut out, &value).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

// ---- reading -------------------------------------------------------------

fn parse_document<R: Read>(source: R) -> Result<Value> {
    serde_json::from_reader(source).map_err(|e| {
        Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string())
    })
}

fn field<'v>(v: &'v Value, key: &str, path: &str) -> Result<&'v Value> {
    v.get(key)
        .ok_or_else(|| Error::parse(path, format!("missing key \"{key}\"")))
}

fn array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>> {
    v.as_array().ok_or_else(|| Error::parse(path, "expected an array"))
}

fn uint(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| Error::parse(path, "expected a non-negative integer"))
}

fn string<'v>(v: &'v Value, path: &str) -> Result<&'v str> {
    v.as_str().ok_or_else(|| Error::parse(path, "expected a string"))
}

fn read_rational(v: &Value, path: &str) -> Result<Rational> {
    if let Some(i) = v.as_i64() {
        return Ok(Rational::from_integer(BigInt::from(i)));
    }
    let Some(obj) = v.as_object() else {
        return Err(Error::parse(path, "expected {\"num\", \"den\"} or an integer"));
    };
    let part = |key: &str| -> Result<BigInt> {
        let raw = obj
            .get(key)
            .ok_or_else(|| Error::parse(path, format!("missing \"{key}\"")))?;
        let parsed = match raw {
            Value::String(s) => parse_bigint(s),
            Value::Number(n) => n.as_i64().map(BigInt::from),
            _ => None,
        };
        parsed.ok_or_else(|| Error::parse(format!("{path}.{key}"), "expected an integer string"))
    };
    let (num, den) = (part("num")?, part("den")?);
    if den.is_zero() {
        return Err(Error::parse(format!("{path}.den"), "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn read_point(v: &Value, path: &str) -> Result<AffinePoint> {
    let coords = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| read_rational(c, &format!("{path}[{i}]")))
        .collect::<Result<_>>()?;
    Ok(AffinePoint::new(coords))
}

fn read_points(v: &Value, path: &str) -> Result<Vec<AffinePoint>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, p)| read_point(p, &format!("{path}[{i}]")))
        .collect()
}

fn read_indices(v: &Value, path: &str) -> Result<Vec<usize>> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, c)| uint(c, &format!("{path}[{i}]")))
        .collect()
}

fn read_frame(v: &Value, path: &str) -> Result<Frame> {
    let base = read_point(field(v, "base", path)?, &format!("{path}.base"))?;
    let neighbors = read_points(field(v, "neighbors", path)?, &format!("{path}.neighbors"))?;
    let mode = match v.get("mode") {
        Some(m) => match string(m, &format!("{path}.mode"))? {
            "affine" => FrameMode::Affine,
            "centroaffine" => FrameMode::CentroAffine,
            other => {
                return Err(Error::parse(
                    format!("{path}.mode"),
                    format!("unknown mode '{other}' (expected affine or centroaffine)"),
                ))
            }
        },
        // Without a mode the ambient dimension decides: n for affine, n + 1
        // for centro-affine frames.
        None if base.dim() == neighbors.len() + 1 => FrameMode::CentroAffine,
        None => FrameMode::Affine,
    };
    Frame::new(base, neighbors, mode)
}

fn read_matrix(v: &Value, path: &str) -> Result<Matrix> {
    let rows = array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let rp = format!("{path}[{i}]");
            array(row, &rp)?
                .iter()
                .enumerate()
                .map(|(j, x)| read_rational(x, &format!("{rp}[{j}]")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows).ok_or_else(|| Error::parse(path, "rows differ in length"))
}

fn read_kind(doc: &Value) -> Result<FractalKind> {
    let family: Family = string(field(doc, "kind", "$")?, "$.kind")?
        .parse()
        .map_err(|e: Error| Error::parse("$.kind", e.to_string()))?;
    let n = uint(field(doc, "n", "$")?, "$.n")?;
    let m = uint(field(doc, "m", "$")?, "$.m")?;
    FractalKind::new(family, n, m)
}

/// Reads back any document written by [`export_json`].
pub fn import_json<R: Read>(source: R) -> Result<Artifact> {
    let doc = parse_document(source)?;
    let version = uint(field(&doc, "schema_version", "$")?, "$.schema_version")?;
    if version as u64 != SCHEMA_VERSION {
        return Err(Error::parse("$.schema_version", format!("unsupported version {version}")));
    }
    match string(field(&doc, "artifact", "$")?, "$.artifact")? {
        "lattice" => {
            let extent = read_indices(field(&doc, "extent", "$")?, "$.extent")?;
            let entries = array(field(&doc, "points", "$")?, "$.points")?;
            let points = entries
                .iter()
                .enumerate()
                .map(|(i, e)| read_point(field(e, "coords", "$.points")?, &format!("$.points[{i}].coords")))
                .collect::<Result<_>>()?;
            Ok(Artifact::Lattice(PointLattice::from_points(extent, points)?))
        }
        "mesh" => {
            let kind = read_kind(&doc)?;
            let fr = read_frame(field(&doc, "frame", "$")?, "$.frame")?;
            let cells = array(field(&doc, "cells", "$")?, "$.cells")?
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let p = format!("$.cells[{i}]");
                    Ok(CellGeometry {
                        id: uint(field(c, "id", &p)?, &format!("{p}.id"))? as u64,
                        base: CellIndex::new(read_indices(field(c, "base", &p)?, &format!("{p}.base"))?)?,
                        vertices: read_points(field(c, "vertices", &p)?, &format!("{p}.vertices"))?,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(Artifact::Mesh(FractalMesh::new(kind, fr, cells)?))
        }
        "slices" => {
            let kind = read_kind(&doc)?;
            let axis = uint(field(&doc, "axis", "$")?, "$.axis")?;
            let slices = array(field(&doc, "slices", "$")?, "$.slices")?
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let p = format!("$.slices[{i}]");
                    let pieces = array(field(s, "pieces", &p)?, &format!("{p}.pieces"))?
                        .iter()
                        .enumerate()
                        .map(|(k, pc)| {
                            let pp = format!("{p}.pieces[{k}]");
                            let role = match string(field(pc, "role", &pp)?, &pp)? {
                                "bottom" => Role::Bottom,
                                "top" => Role::Top,
                                other => return Err(Error::parse(pp, format!("unknown role '{other}'"))),
                            };
                            let shape = match string(field(pc, "shape", &pp)?, &pp)? {
                                "facet" => PieceShape::Facet,
                                "simplex_facet" => PieceShape::SimplexFacet,
                                "point" => PieceShape::Point,
                                other => return Err(Error::parse(pp, format!("unknown shape '{other}'"))),
                            };
                            Ok(SlicePiece {
                                label: uint(field(pc, "label", &pp)?, &pp)? as u64,
                                role,
                                shape,
                                vertices: read_points(field(pc, "vertices", &pp)?, &format!("{pp}.vertices"))?,
                            })
                        })
                        .collect::<Result<_>>()?;
                    Ok(Slice { time: uint(field(s, "time", &p)?, &format!("{p}.time"))?, pieces })
                })
                .collect::<Result<_>>()?;
            Ok(Artifact::Slices(SliceSeries { kind, axis, slices }))
        }
        "invariants" => {
            let tables = array(field(&doc, "invariants", "$")?, "$.invariants")?
                .iter()
                .enumerate()
                .map(|(i, t)| read_matrix(t, &format!("$.invariants[{i}]")))
                .collect::<Result<_>>()?;
            Ok(Artifact::Invariants(InvariantTable::new(tables)?))
        }
        other => Err(Error::parse("$.artifact", format!("unknown artifact '{other}'"))),
    }
}

/// Reads a frame document `{"mode", "base", "neighbors"}`; coordinates may
/// be integers or `{"num", "den"}` objects. Independence is checked here.
pub fn import_frame<R: Read>(source: R) -> Result<Frame> {
    let doc = parse_document(source)?;
    read_frame(&doc, "$")
}
