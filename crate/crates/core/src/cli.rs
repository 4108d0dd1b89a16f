//! Command-line front end.
//!
//! Every invocation prints exactly one JSON object on stdout. Exit codes:
//! 0 success, 1 a `verify` check failed, 2 invalid arguments or input,
//! 3 validation failure (degenerate frame, invalid matrix family), 4 I/O.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::export::{self, Artifact, ExportStyle, Geometry};
use crate::generator::{
    assemble_mesh, assemble_mesh_by_transport, default_frame, generate_points_matrix,
    generate_points_recurrence, verify_structure, FractalMesh, PointLattice,
};
use crate::index_sets::{count_closed_form, enumerate_cells, Family, FractalKind};
use crate::lattice::{
    check_compatibility, check_hyperplane_criterion, check_self_similarity, interior_sites,
    invariants_at, Frame, InvariantTable, TransitionFamily, TransitionMatrix,
};
use crate::slicer::{pair_labels, slice_series, SliceSeries};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub const MAX_N: usize = 6;
pub const MAX_M: usize = 6;
/// Largest point box (or cell count with `--cells-only`) we will build.
pub const MAX_POINTS: u128 = 10_000_000;
/// Enumeration cross-check in `count` only runs up to this many cells.
pub const MAX_ENUMERATED: u128 = 1_000_000;

#[derive(Parser, Debug)]
#[command(name = "affine-fractals", version, about = "Affine carpets, sponges and Sierpinski simplices from discrete centro-affine lattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a fractal mesh and write it as SVG, OBJ or JSON.
    Generate {
        #[command(flatten)]
        opts: Opts,
        /// Write the point lattice instead of the mesh (JSON only).
        #[arg(long)]
        lattice: bool,
    },
    /// Cut a mesh at integer times along its last axis.
    Slice {
        #[command(flatten)]
        opts: Opts,
    },
    /// Print the invariant table and self-similarity verdict of a lattice.
    Invariants {
        #[command(flatten)]
        opts: Opts,
        /// Lattice JSON file; give it twice to test equivalence.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Check commutation, hyperplane, structure and count identities.
    Verify {
        #[command(flatten)]
        opts: Opts,
        /// Invariants JSON file holding the matrices to check.
        #[arg(long)]
        matrices: Option<PathBuf>,
    },
    /// Closed-form cell count, cross-checked by enumeration when small.
    Count {
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct Opts {
    /// sponge | simplex
    #[arg(long)]
    kind: Option<String>,
    /// Lattice dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Recursion level.
    #[arg(long)]
    m: Option<usize>,
    /// Frame JSON file, or "default".
    #[arg(long)]
    frame: Option<String>,
    /// svg | obj | json
    #[arg(long)]
    format: Option<String>,
    #[arg(short = 'o', long = "output")]
    output: Option<PathBuf>,
    /// Also write the slice series (generate only).
    #[arg(long)]
    slice: bool,
    /// Transport a frame to every cell instead of filling the point box.
    #[arg(long = "cells-only")]
    cells_only: bool,
    /// Style overrides, KEY=VALUE (fill, stroke, stroke_width, padding, labels).
    #[arg(long, num_args = 1..)]
    style: Vec<String>,
    /// JSON file with the same keys as the flags.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<String>,
    n: Option<usize>,
    m: Option<usize>,
    frame: Option<String>,
    format: Option<String>,
    #[serde(alias = "o")]
    output: Option<PathBuf>,
    slice: Option<bool>,
    #[serde(alias = "cells-only")]
    cells_only: Option<bool>,
    style: Option<BTreeMap<String, String>>,
}

/// A command failure carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DegenerateFrame(_) | Error::Precondition(_) => EXIT_VALIDATION,
            Error::Io(_) => EXIT_IO,
            Error::Structure(_) | Error::Domain(_) | Error::Parse { .. } => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = Result<(i32, Value), Failure>;

/// Settings after merging the config file under the flags.
#[derive(Debug)]
struct RunConfig {
    family: Family,
    n: Option<usize>,
    m: usize,
    frame: Option<String>,
    format: Option<String>,
    output: Option<PathBuf>,
    slice: bool,
    cells_only: bool,
    style: ExportStyle,
}

impl RunConfig {
    fn resolve(opts: &Opts) -> Result<RunConfig, Failure> {
        let file = match &opts.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Failure {
                    code: EXIT_IO,
                    message: format!("cannot read config {}: {e}", path.display()),
                })?;
                serde_json::from_str::<ConfigFile>(&text)
                    .map_err(|e| Failure::invalid(format!("bad config {}: {e}", path.display())))?
            }
            None => ConfigFile::default(),
        };
        let family: Family = opts
            .kind
            .clone()
            .or(file.kind)
            .unwrap_or_else(|| "sponge".into())
            .parse()?;
        let n = opts.n.or(file.n);
        let m = opts.m.or(file.m).unwrap_or(1);
        if let Some(n) = n {
            if !(2..=MAX_N).contains(&n) {
                return Err(Failure::invalid(format!("--n must be in 2..={MAX_N}, got {n}")));
            }
        }
        if !(1..=MAX_M).contains(&m) {
            return Err(Failure::invalid(format!("--m must be in 1..={MAX_M}, got {m}")));
        }
        let mut style = ExportStyle::default();
        for (k, v) in file.style.unwrap_or_default() {
            style.set(&k, &v)?;
        }
        for kv in &opts.style {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Failure::invalid(format!("style '{kv}' is not KEY=VALUE")))?;
            style.set(k, v)?;
        }
        let format = opts.format.clone().or(file.format);
        if let Some(f) = &format {
            if !matches!(f.as_str(), "svg" | "obj" | "json") {
                return Err(Failure::invalid(format!("unknown format '{f}'")));
            }
        }
        Ok(RunConfig {
            family,
            n,
            m,
            frame: opts.frame.clone().or(file.frame),
            format,
            output: opts.output.clone().or(file.output),
            slice: opts.slice || file.slice.unwrap_or(false),
            cells_only: opts.cells_only || file.cells_only.unwrap_or(false),
            style,
        })
    }

    fn n(&self) -> Result<usize, Failure> {
        self.n.ok_or_else(|| Failure::invalid("--n is required"))
    }

    fn kind(&self) -> Result<FractalKind, Failure> {
        Ok(FractalKind::new(self.family, self.n()?, self.m)?)
    }

    fn frame(&self) -> Result<Frame, Failure> {
        let n = self.n()?;
        let frame = match self.frame.as_deref() {
            None | Some("default") => default_frame(self.family, n)?,
            Some(path) => {
                let file = fs::File::open(path).map_err(|e| Failure {
                    code: EXIT_IO,
                    message: format!("cannot open frame {path}: {e}"),
                })?;
                export::import_frame(std::io::BufReader::new(file))?
            }
        };
        if frame.dimension() != n {
            return Err(Failure::invalid(format!(
                "frame has {} neighbors but --n is {n}",
                frame.dimension()
            )));
        }
        Ok(frame)
    }

    fn default_stem(&self) -> Result<String, Failure> {
        Ok(format!("{}_n{}_m{}", self.family.name(), self.n()?, self.m))
    }
}

fn box_points(kind: &FractalKind) -> u128 {
    (kind.point_extent() as u128).pow(kind.n() as u32)
}

fn build_mesh(cfg: &RunConfig) -> Result<(FractalMesh, Option<PointLattice>), Failure> {
    let kind = cfg.kind()?;
    let frame = cfg.frame()?;
    if cfg.cells_only {
        let cells = count_closed_form(&kind).to_u128().unwrap_or(u128::MAX);
        if cells > MAX_POINTS {
            return Err(Failure::invalid(format!(
                "{cells} cells exceed the desk-scale limit of {MAX_POINTS}"
            )));
        }
        return Ok((assemble_mesh_by_transport(&kind, &frame)?, None));
    }
    let points = box_points(&kind);
    if points > MAX_POINTS {
        return Err(Failure::invalid(format!(
            "point box of {points} points exceeds {MAX_POINTS}; use --cells-only"
        )));
    }
    let lattice = generate_points_recurrence(&frame, &vec![kind.point_extent(); kind.n()])?;
    Ok((assemble_mesh(&kind, &lattice)?, Some(lattice)))
}

/// Writes through a temporary sibling file and renames it into place.
fn write_atomic<F>(path: &Path, fill: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> crate::Result<()>,
{
    let io_fail = |e: std::io::Error| Failure {
        code: EXIT_IO,
        message: format!("cannot write {}: {e}", path.display()),
    };
    let mut tmp_name = path.file_name().map(OsString::from).unwrap_or_default();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let file = fs::File::create(&tmp).map_err(io_fail)?;
    let mut buf = std::io::BufWriter::new(file);
    let result = fill(&mut buf).map_err(Failure::from).and_then(|_| buf.flush().map_err(io_fail));
    drop(buf);
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(e);
    }
    fs::rename(&tmp, path).map_err(io_fail)
}

fn write_geometry(path: &Path, format: &str, geom: Geometry<'_>, style: &ExportStyle) -> Result<(), Failure> {
    match format {
        "svg" => geom.require_dim(2, "SVG")?,
        "obj" => geom.require_dim(3, "OBJ")?,
        _ => {}
    }
    write_atomic(path, |w| match format {
        "svg" => export::export_svg(geom, style, w),
        "obj" => export::export_obj(geom, w),
        _ => unreachable!("json handled by caller"),
    })
}

fn write_artifact(path: &Path, artifact: &Artifact) -> Result<(), Failure> {
    write_atomic(path, |w| export::export_json(artifact, w))
}

fn default_format(dim: usize) -> &'static str {
    match dim {
        2 => "svg",
        3 => "obj",
        _ => "json",
    }
}

fn cmd_generate(cfg: &RunConfig, lattice_only: bool) -> CmdResult {
    let start = Instant::now();
    let kind = cfg.kind()?;
    if lattice_only {
        if cfg.format.as_deref().is_some_and(|f| f != "json") {
            return Err(Failure::invalid("--lattice output is JSON only"));
        }
        let frame = cfg.frame()?;
        if box_points(&kind) > MAX_POINTS {
            return Err(Failure::invalid("point box exceeds the desk-scale limit"));
        }
        let lattice = generate_points_recurrence(&frame, &vec![kind.point_extent(); kind.n()])?;
        let path = cfg
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}_lattice.json", cfg.default_stem().unwrap_or_default())));
        let points = lattice.len();
        write_artifact(&path, &Artifact::Lattice(lattice))?;
        return Ok((
            EXIT_OK,
            json!({
                "command": "generate",
                "points": points,
                "output": path.display().to_string(),
                "elapsed_ms": start.elapsed().as_millis() as u64,
            }),
        ));
    }

    let (mesh, _) = build_mesh(cfg)?;
    let format = cfg
        .format
        .clone()
        .unwrap_or_else(|| default_format(mesh.ambient_dim()).to_string());
    let path = cfg
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.{format}", cfg.default_stem().unwrap_or_default())));
    if format == "json" {
        write_artifact(&path, &Artifact::Mesh(mesh.clone()))?;
    } else {
        write_geometry(&path, &format, Geometry::Mesh(&mesh), &cfg.style)?;
    }
    let mut report = json!({
        "command": "generate",
        "kind": kind.family().name(),
        "n": kind.n(),
        "m": kind.m(),
        "cells": mesh.cells().len(),
        "format": format,
        "output": path.display().to_string(),
    });
    if cfg.slice {
        // Slice files take the slice dimension's natural format.
        let sliced = write_slices(cfg, &mesh, &path.with_extension(""), None)?;
        report["slice"] = sliced;
    }
    report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    Ok((EXIT_OK, report))
}

fn suffixed(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem.file_name().map(OsString::from).unwrap_or_default();
    name.push(suffix);
    stem.with_file_name(name)
}

fn write_slices(
    cfg: &RunConfig,
    mesh: &FractalMesh,
    stem: &Path,
    format: Option<&str>,
) -> Result<Value, Failure> {
    let series = slice_series(mesh)?;
    let format = format.unwrap_or(default_format(mesh.ambient_dim() - 1)).to_string();
    let mut files = Vec::new();
    let mut per_slice = Vec::new();
    for slice in &series.slices {
        let path = suffixed(stem, &format!("_t{}.{format}", slice.time));
        if format == "json" {
            let one = SliceSeries { kind: series.kind, axis: series.axis, slices: vec![slice.clone()] };
            write_artifact(&path, &Artifact::Slices(one))?;
        } else {
            write_geometry(&path, &format, Geometry::Slice(slice), &cfg.style)?;
        }
        per_slice.push(json!({
            "time": slice.time,
            "file": path.display().to_string(),
            "bottom": slice.count(crate::slicer::Role::Bottom),
            "top": slice.count(crate::slicer::Role::Top),
        }));
        files.push(path.display().to_string());
    }
    let pairs = pair_labels(&series);
    let manifest_path = suffixed(stem, "_manifest.json");
    let manifest = json!({
        "schema_version": export::SCHEMA_VERSION,
        "kind": series.kind.family().name(),
        "n": series.kind.n(),
        "m": series.kind.m(),
        "axis": series.axis,
        "slices": per_slice,
        "pairs": pairs.iter().map(|p| json!({"label": p.label, "bottom": p.bottom, "top": p.top})).collect::<Vec<_>>(),
    });
    write_atomic(&manifest_path, |w| {
        serde_json::to_writer(&mut *w, &manifest).map_err(|e| Error::Io(e.into()))?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(json!({
        "slices": series.slices.len(),
        "format": format,
        "files": files,
        "manifest": manifest_path.display().to_string(),
        "pairs": pairs.len(),
    }))
}

fn cmd_slice(cfg: &RunConfig) -> CmdResult {
    let start = Instant::now();
    let (mesh, _) = build_mesh(cfg)?;
    let stem = match &cfg.output {
        Some(p) => p.with_extension(""),
        None => PathBuf::from(cfg.default_stem()?),
    };
    let mut report = write_slices(cfg, &mesh, &stem, cfg.format.as_deref())?;
    report["command"] = json!("slice");
    report["cells"] = json!(mesh.cells().len());
    report["elapsed_ms"] = json!(start.elapsed().as_millis() as u64);
    Ok((EXIT_OK, report))
}

fn read_lattice(path: &Path) -> Result<PointLattice, Failure> {
    let file = fs::File::open(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("cannot open {}: {e}", path.display()),
    })?;
    match export::import_json(std::io::BufReader::new(file))? {
        Artifact::Lattice(l) => Ok(l),
        _ => Err(Failure::invalid(format!("{} is not a lattice document", path.display()))),
    }
}

fn table_json(table: &InvariantTable) -> Result<Value, Failure> {
    let mut buf = Vec::new();
    export::export_json(&Artifact::Invariants(table.clone()), &mut buf)?;
    let doc: Value = serde_json::from_slice(&buf).expect("own output parses");
    Ok(doc["invariants"].clone())
}

fn cmd_invariants(cfg: &RunConfig, inputs: &[PathBuf]) -> CmdResult {
    let lattices: Vec<PointLattice> = if inputs.is_empty() {
        let kind = cfg.kind()?;
        if box_points(&kind) > MAX_POINTS {
            return Err(Failure::invalid("point box exceeds the desk-scale limit"));
        }
        vec![generate_points_recurrence(&cfg.frame()?, &vec![kind.point_extent(); kind.n()])?]
    } else if inputs.len() <= 2 {
        inputs.iter().map(|p| read_lattice(p)).collect::<Result<_, _>>()?
    } else {
        return Err(Failure::invalid("invariants takes one or two --input files"));
    };

    let first = &lattices[0];
    let site = interior_sites(first)
        .into_iter()
        .next()
        .ok_or_else(|| Failure::invalid("lattice needs extent >= 3 on every axis"))?;
    let table = invariants_at(first, &site)?;
    let mut report = json!({
        "command": "invariants",
        "n": first.dimension(),
        "site": site.coords(),
        "invariants": table_json(&table)?,
        "self_similar": check_self_similarity(first)?,
    });
    if let Some(second) = lattices.get(1) {
        report["equivalent"] = json!(equivalent(first, second)?);
    }
    Ok((EXIT_OK, report))
}

/// Two lattices are equivalent iff their tables agree at every common site.
fn equivalent(a: &PointLattice, b: &PointLattice) -> Result<bool, Failure> {
    if a.dimension() != b.dimension() {
        return Ok(false);
    }
    let inner_b = interior_sites(b);
    for site in interior_sites(a).into_iter().filter(|s| inner_b.contains(s)) {
        if invariants_at(a, &site)? != invariants_at(b, &site)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn cmd_verify(cfg: &RunConfig, matrices_path: Option<&Path>) -> CmdResult {
    let mut checks: Vec<Value> = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        checks.push(json!({ "name": name, "pass": pass, "detail": detail }));
    };

    let (raw_tables, n) = match matrices_path {
        Some(path) => {
            let file = fs::File::open(path).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("cannot open {}: {e}", path.display()),
            })?;
            match export::import_json(std::io::BufReader::new(file))? {
                Artifact::Invariants(t) => {
                    let n = t.dimension();
                    (t.tables().to_vec(), n)
                }
                _ => return Err(Failure::invalid("--matrices expects an invariants document")),
            }
        }
        None => {
            let n = cfg.n()?;
            let ms = crate::lattice::canonical_matrices(n)?;
            (ms.into_iter().map(|m| m.entries().clone()).collect(), n)
        }
    };
    if !(2..=MAX_N).contains(&n) {
        return Err(Failure::invalid(format!("matrix family dimension {n} out of range")));
    }

    let matrices: Result<Vec<TransitionMatrix>, Error> = raw_tables
        .iter()
        .enumerate()
        .map(|(i, t)| TransitionMatrix::new(i + 1, t.clone()))
        .collect();
    let matrices = match matrices {
        Ok(ms) => {
            push("matrix_structure", true, format!("{n} nondegenerate matrices with unit first columns"));
            Some(ms)
        }
        Err(e) => {
            push("matrix_structure", false, e.to_string());
            None
        }
    };

    if let Some(ms) = &matrices {
        let commute = check_compatibility(ms)?;
        push("commutation", commute, "pairwise Mi*Mj == Mj*Mi".into());
        let hyper = check_hyperplane_criterion(ms);
        push("hyperplane", hyper, "every column sums to 1".into());

        let residual = match TransitionFamily::new(ms.clone()) {
            Ok(family) => {
                let frame = default_frame(cfg.family, n)?;
                let lattice = generate_points_matrix(&frame, &family, &vec![4; n])?;
                let bad = verify_structure(&lattice);
                (bad.is_empty(), format!("{} violating faces in a 4^{n} box", bad.len()))
            }
            Err(e) => (false, e.to_string()),
        };
        push("structure_residual", residual.0, residual.1);
    }

    for level in 1..=cfg.m {
        let kind = FractalKind::new(cfg.family, n, level)?;
        let closed = count_closed_form(&kind);
        let name = format!("count_m{level}");
        match closed.to_u128() {
            Some(c) if c <= MAX_ENUMERATED => {
                let enumerated = enumerate_cells(&kind).len();
                push(&name, enumerated as u128 == c, format!("closed form {c}, enumerated {enumerated}"));
            }
            _ => push(&name, true, format!("closed form {closed}, enumeration skipped")),
        }
    }

    let pass = checks.iter().all(|c| c["pass"] == json!(true));
    let code = if pass { EXIT_OK } else { EXIT_CHECK_FAILED };
    Ok((
        code,
        json!({ "command": "verify", "n": n, "pass": pass, "checks": checks }),
    ))
}

fn cmd_count(cfg: &RunConfig) -> CmdResult {
    let kind = cfg.kind()?;
    let closed = count_closed_form(&kind);
    let closed_json = match closed.to_u64() {
        Some(v) => json!(v),
        None => json!(closed.to_string()),
    };
    let mut report = json!({
        "command": "count",
        "kind": kind.family().name(),
        "n": kind.n(),
        "m": kind.m(),
        "closed_form": closed_json,
    });
    if closed.to_u128().is_some_and(|c| c <= MAX_ENUMERATED) {
        let enumerated = enumerate_cells(&kind).len();
        report["enumerated"] = json!(enumerated);
        report["agree"] = json!(closed.to_u128() == Some(enumerated as u128));
    }
    Ok((EXIT_OK, report))
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Generate { opts, lattice } => cmd_generate(&RunConfig::resolve(&opts)?, lattice),
        Command::Slice { opts } => cmd_slice(&RunConfig::resolve(&opts)?),
        Command::Invariants { opts, input } => cmd_invariants(&RunConfig::resolve(&opts)?, &input),
        Command::Verify { opts, matrices } => {
            cmd_verify(&RunConfig::resolve(&opts)?, matrices.as_deref())
        }
        Command::Count { opts } => cmd_count(&RunConfig::resolve(&opts)?),
    }
}

/// Runs one invocation, writing the JSON report to `stdout`; returns the
/// exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else {
                let _ = writeln!(
                    stdout,
                    "{}",
                    json!({ "error": e.kind().to_string(), "message": e.to_string(), "exit_code": EXIT_INVALID })
                );
                eprint!("{e}");
            }
            return if code == 0 { EXIT_OK } else { EXIT_INVALID };
        }
    };
    let (code, report) = match dispatch(cli) {
        Ok(r) => r,
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.code, json!({ "error": f.message, "exit_code": f.code }))
        }
    };
    let _ = writeln!(stdout, "{report}");
    code
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}
