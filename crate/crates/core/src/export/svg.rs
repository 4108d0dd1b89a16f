use std::io::Write;

use super::{ExportStyle, Geometry, Layout};
use crate::error::Result;
use crate::rational::{format_f64_sig6, format_sig6, to_f64, Rational};

/// Parallelotope corners 0,1,3,2 walk the face boundary; counter order
/// would draw a bow tie.
const QUAD_CYCLE: [usize; 4] = [0, 1, 3, 2];

fn xy(p: &[Rational]) -> String {
    // y is negated so that the picture keeps mathematical orientation.
    format!("{},{}", format_sig6(&p[0]), format_sig6(&-&p[1]))
}

/// Writes 2D geometry as an SVG 1.1 document: one `<polygon>` per cell or
/// face (point pieces become `<circle>`s), in stored order, inside a single
/// root group.
pub fn export_svg<W: Write>(geom: Geometry<'_>, style: &ExportStyle, mut out: W) -> Result<()> {
    style.validate()?;
    geom.require_dim(2, "SVG")?;
    let pieces = geom.pieces();

    let mut bounds: Option<[Rational; 4]> = None;
    for v in pieces.iter().flat_map(|p| p.vertices) {
        let (x, y) = (&v.coords()[0], -&v.coords()[1]);
        match &mut bounds {
            None => bounds = Some([x.clone(), y.clone(), x.clone(), y]),
            Some(b) => {
                if *x < b[0] {
                    b[0] = x.clone();
                }
                if y < b[1] {
                    b[1] = y.clone();
                }
                if *x > b[2] {
                    b[2] = x.clone();
                }
                if y > b[3] {
                    b[3] = y;
                }
            }
        }
    }
    let (min_x, min_y, width, height) = match &bounds {
        Some([x0, y0, x1, y1]) => (to_f64(x0), to_f64(y0), to_f64(&(x1 - x0)), to_f64(&(y1 - y0))),
        None => (0.0, 0.0, 1.0, 1.0),
    };
    let span = width.max(height);
    let pad = style.padding * if span > 0.0 { span } else { 1.0 };

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        format_f64_sig6(min_x - pad),
        format_f64_sig6(min_y - pad),
        format_f64_sig6(width + 2.0 * pad),
        format_f64_sig6(height + 2.0 * pad),
    )?;
    writeln!(
        out,
        r#"<g fill="{}" stroke="{}" stroke-width="{}">"#,
        style.fill,
        style.stroke,
        format_f64_sig6(style.stroke_width)
    )?;

    let font_size = format_f64_sig6(if span > 0.0 { span / 40.0 } else { 0.1 });
    for piece in &pieces {
        let role = piece.role.map(|r| format!(r#" class="{}""#, r.name())).unwrap_or_default();
        match piece.layout {
            Layout::Point => {
                let c = piece.vertices[0].coords();
                writeln!(
                    out,
                    r#"<circle id="c{}"{role} cx="{}" cy="{}" r="{}"/>"#,
                    piece.label,
                    format_sig6(&c[0]),
                    format_sig6(&-&c[1]),
                    format_f64_sig6((style.stroke_width * 2.0).max(span / 200.0)),
                )?;
            }
            layout => {
                let order: Vec<usize> = if layout == Layout::Box && piece.vertices.len() == 4 {
                    QUAD_CYCLE.to_vec()
                } else {
                    (0..piece.vertices.len()).collect()
                };
                let pts: Vec<String> =
                    order.iter().map(|&k| xy(piece.vertices[k].coords())).collect();
                writeln!(
                    out,
                    r#"<polygon id="c{}"{role} points="{}"/>"#,
                    piece.label,
                    pts.join(" ")
                )?;
            }
        }
        if style.labels {
            let k = Rational::from_integer((piece.vertices.len() as i64).into());
            let sum_x: Rational = piece.vertices.iter().map(|v| &v.coords()[0]).sum();
            let sum_y: Rational = piece.vertices.iter().map(|v| &v.coords()[1]).sum();
            writeln!(
                out,
                r#"<text x="{}" y="{}" font-size="{font_size}" stroke="none" fill="{}" text-anchor="middle">{}</text>"#,
                format_sig6(&(sum_x / &k)),
                format_sig6(&-(sum_y / &k)),
                style.stroke,
                piece.label
            )?;
        }
    }
    writeln!(out, "</g>")?;
    writeln!(out, "</svg>")?;
    Ok(())
}
