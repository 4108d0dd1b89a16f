//! SVG, OBJ and canonical JSON output, plus frame import.

mod json;
mod obj;
mod svg;

pub use json::{export_json, import_frame, import_json, Artifact, SCHEMA_VERSION};
pub use obj::export_obj;
pub use svg::export_svg;

use crate::error::{Error, Result};
use crate::generator::FractalMesh;
use crate::index_sets::Family;
use crate::lattice::AffinePoint;
use crate::slicer::{PieceShape, Role, Slice};

/// Drawing options for SVG output.
#[derive(Clone, Debug, PartialEq)]
pub struct ExportStyle {
    pub fill: String,
    pub stroke: String,
    /// In user units (the geometry's own coordinates).
    pub stroke_width: f64,
    /// Fraction of the larger bounding-box side added on every edge.
    pub padding: f64,
    pub labels: bool,
}

impl Default for ExportStyle {
    fn default() -> Self {
        ExportStyle {
            fill: "#3b5b92".into(),
            stroke: "#102040".into(),
            stroke_width: 0.02,
            padding: 0.05,
            labels: false,
        }
    }
}

fn valid_hex(color: &str) -> bool {
    color.len() == 7
        && color.starts_with('#')
        && color[1..].chars().all(|c| c.is_ascii_hexdigit())
}

impl ExportStyle {
    pub fn validate(&self) -> Result<()> {
        for (name, c) in [("fill", &self.fill), ("stroke", &self.stroke)] {
            if !valid_hex(c) {
                return Err(Error::Domain(format!("{name} color '{c}' is not #rrggbb")));
            }
        }
        if !(self.padding >= 0.0 && self.padding.is_finite()) {
            return Err(Error::Domain(format!("padding must be >= 0, got {}", self.padding)));
        }
        if !(self.stroke_width >= 0.0 && self.stroke_width.is_finite()) {
            return Err(Error::Domain("stroke width must be >= 0".into()));
        }
        Ok(())
    }

    /// Applies one `KEY=VALUE` override; on error the style is unchanged.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Domain(format!("invalid {what} value '{value}'"));
        let mut next = self.clone();
        match key {
            "fill" => next.fill = value.to_string(),
            "stroke" => next.stroke = value.to_string(),
            "stroke_width" | "stroke-width" => {
                next.stroke_width = value.parse().map_err(|_| bad("stroke_width"))?
            }
            "padding" => next.padding = value.parse().map_err(|_| bad("padding"))?,
            "labels" => {
                next.labels = match value {
                    "on" | "true" | "1" => true,
                    "off" | "false" | "0" => false,
                    _ => return Err(bad("labels")),
                }
            }
            other => return Err(Error::Domain(format!("unknown style key '{other}'"))),
        }
        next.validate()?;
        *self = next;
        Ok(())
    }
}

/// Something flat or solid enough to draw: a whole mesh or one slice.
#[derive(Clone, Copy, Debug)]
pub enum Geometry<'a> {
    Mesh(&'a FractalMesh),
    Slice(&'a Slice),
}

/// How the vertex list of a piece is laid out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Layout {
    /// Parallelotope corners in binary-counter order.
    Box,
    /// Simplex corners, anchor first.
    Simplex,
    Point,
}

pub(crate) struct Piece<'a> {
    pub label: u64,
    pub role: Option<Role>,
    pub layout: Layout,
    pub vertices: &'a [AffinePoint],
}

impl<'a> Geometry<'a> {
    /// `None` for an empty slice, which fits any target dimension.
    pub fn ambient_dim(&self) -> Option<usize> {
        match self {
            Geometry::Mesh(m) => Some(m.ambient_dim()),
            Geometry::Slice(s) => s.ambient_dim(),
        }
    }

    pub(crate) fn pieces(&self) -> Vec<Piece<'a>> {
        match *self {
            Geometry::Mesh(mesh) => {
                let layout = match mesh.kind().family() {
                    Family::Sponge => Layout::Box,
                    Family::Simplex => Layout::Simplex,
                };
                mesh.cells()
                    .iter()
                    .map(|c| Piece { label: c.id, role: None, layout, vertices: &c.vertices })
                    .collect()
            }
            Geometry::Slice(slice) => slice
                .pieces
                .iter()
                .map(|p| Piece {
                    label: p.label,
                    role: Some(p.role),
                    layout: match p.shape {
                        PieceShape::Facet => Layout::Box,
                        PieceShape::SimplexFacet => Layout::Simplex,
                        PieceShape::Point => Layout::Point,
                    },
                    vertices: &p.vertices,
                })
                .collect(),
        }
    }

    pub(crate) fn require_dim(&self, want: usize, format: &str) -> Result<()> {
        match self.ambient_dim() {
            Some(d) if d != want => Err(Error::Domain(format!(
                "{format} output needs {want}-dimensional geometry, got dimension {d}"
            ))),
            _ => Ok(()),
        }
    }
}
