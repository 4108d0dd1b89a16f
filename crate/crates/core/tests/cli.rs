mod common;

use std::fs;
use std::path::Path;
use std::process::Command;

use affine_fractals::*;
use common::*;
use serde_json::Value;

struct Run {
    code: i32,
    report: Value,
}

fn run(dir: &Path, args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_affine-fractals"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert_eq!(stdout.lines().count(), 1, "stdout must be one JSON line: {stdout}");
    Run { code: out.status.code().unwrap(), report: serde_json::from_str(&stdout).unwrap() }
}

fn ok(dir: &Path, args: &[&str]) -> Value {
    let r = run(dir, args);
    assert_eq!(r.code, 0, "{args:?} -> {}", r.report);
    r.report
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

fn lines_starting(text: &str, prefix: &str) -> usize {
    text.lines().filter(|l| l.starts_with(prefix)).count()
}

fn write_lattice(dir: &Path, name: &str, lattice: PointLattice) {
    let mut buf = Vec::new();
    export_json(&Artifact::Lattice(lattice), &mut buf).unwrap();
    fs::write(dir.join(name), buf).unwrap();
}

fn table_from_report(report: &Value) -> Vec<Dense> {
    report["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| {
            m.as_array()
                .unwrap()
                .iter()
                .map(|row| {
                    row.as_array()
                        .unwrap()
                        .iter()
                        .map(|x| {
                            let num: i64 = x["num"].as_str().unwrap().parse().unwrap();
                            let den: i64 = x["den"].as_str().unwrap().parse().unwrap();
                            q(num, den)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

#[test]
fn generate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = ok(d, &["generate", "--kind", "sponge", "--n", "2", "--m", "3", "--format", "svg", "-o", "carpet.svg"]);
    assert_eq!(r["cells"], 512);
    assert_eq!(read(d, "carpet.svg").matches("<polygon").count(), 512);

    let r = ok(d, &["generate", "--kind", "simplex", "--n", "3", "--m", "1", "--format", "obj", "-o", "pyr.obj"]);
    assert_eq!(r["cells"], 4);
    assert_eq!(lines_starting(&read(d, "pyr.obj"), "f "), 16);
    assert_eq!(lines_starting(&read(d, "pyr.obj"), "g "), 4);

    let r = ok(d, &["generate", "--kind", "sponge", "--n", "4", "--m", "1", "--format", "json", "-o", "s.json"]);
    assert_eq!(r["cells"], 48);
    let doc: Value = serde_json::from_str(&read(d, "s.json")).unwrap();
    assert_eq!(doc["cells"].as_array().unwrap().len(), 48);
}

#[test]
fn default_names_and_idempotence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--kind", "simplex", "--n", "2", "--m", "4"]);
    let first = fs::read(d.join("simplex_n2_m4.svg")).unwrap();
    ok(d, &["generate", "--kind", "simplex", "--n", "2", "--m", "4"]);
    assert_eq!(fs::read(d.join("simplex_n2_m4.svg")).unwrap(), first);
    ok(d, &["generate", "--kind", "sponge", "--n", "3", "--m", "1"]);
    assert!(d.join("sponge_n3_m1.obj").exists());
    // No temporary files are left behind.
    let leftovers: Vec<_> = fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".tmp"))
        .collect();
    assert!(leftovers.is_empty(), "{leftovers:?}");
}

#[test]
fn cells_only_matches_box_generation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--kind", "sponge", "--n", "3", "--m", "2", "-o", "a.obj"]);
    ok(d, &["generate", "--kind", "sponge", "--n", "3", "--m", "2", "--cells-only", "-o", "b.obj"]);
    assert_eq!(read(d, "a.obj"), read(d, "b.obj"));
}

#[test]
fn desk_scale_guards() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = run(d, &["generate", "--kind", "sponge", "--n", "5", "--m", "3"]);
    assert_eq!(r.code, 2);
    assert!(r.report["error"].as_str().unwrap().contains("--cells-only"));
    let r = run(d, &["generate", "--kind", "sponge", "--n", "6", "--m", "3", "--cells-only"]);
    assert_eq!(r.code, 2);
    assert_eq!(run(d, &["count", "--kind", "sponge", "--n", "7", "--m", "1"]).code, 2);
    assert_eq!(run(d, &["count", "--kind", "sponge", "--n", "2", "--m", "7"]).code, 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(run(d, &["frobnicate"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "torus", "--n", "2"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "sponge"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "3", "--format", "svg"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "2", "--format", "png"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "2", "--style", "fill"]).code, 2);

    fs::write(d.join("flat.json"), r#"{"mode":"affine","base":[0,0],"neighbors":[[1,1],[2,2]]}"#).unwrap();
    let r = run(d, &["generate", "--kind", "sponge", "--n", "2", "--frame", "flat.json"]);
    assert_eq!(r.code, 3);
    assert!(r.report["error"].as_str().unwrap().contains("r_2"));

    fs::write(d.join("broken.json"), "{").unwrap();
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "2", "--frame", "broken.json"]).code, 2);
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "2", "--frame", "missing.json"]).code, 4);
    assert_eq!(run(d, &["generate", "--kind", "sponge", "--n", "2", "-o", "no/such/dir/x.svg"]).code, 4);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r##"{"kind":"simplex","n":2,"m":2,"format":"svg","output":"tri.svg","style":{"fill":"#ff0000"}}"##,
    )
    .unwrap();
    let r = ok(d, &["generate", "--config", "cfg.json", "--m", "3", "--style", "labels=on"]);
    assert_eq!(r["cells"], 27);
    let text = read(d, "tri.svg");
    assert_eq!(text.matches("<polygon").count(), 27);
    assert_eq!(text.matches("<text").count(), 27);
    assert!(text.contains("#ff0000"));

    fs::write(d.join("bad.json"), r#"{"colour":"red"}"#).unwrap();
    assert_eq!(run(d, &["generate", "--config", "bad.json"]).code, 2);
}

#[test]
fn slice_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = ok(d, &["slice", "--kind", "sponge", "--n", "4", "--m", "1"]);
    assert_eq!(r["slices"], 4);
    assert_eq!(r["pairs"], 48);
    for t in 0..4 {
        assert!(d.join(format!("sponge_n4_m1_t{t}.obj")).exists());
    }
    let manifest: Value = serde_json::from_str(&read(d, "sponge_n4_m1_manifest.json")).unwrap();
    let pairs = manifest["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 48);
    assert!(pairs.iter().all(|p| p["top"].as_u64().unwrap() == p["bottom"].as_u64().unwrap() + 1));

    let r = ok(d, &["slice", "--kind", "sponge", "--n", "3", "--m", "1", "-o", "menger.svg"]);
    assert_eq!(r["files"].as_array().unwrap().len(), 4);
    assert_eq!(read(d, "menger_t1.svg").matches("<polygon").count(), 12);
    assert!(d.join("menger_manifest.json").exists());

    let r = ok(d, &["slice", "--kind", "simplex", "--n", "4", "--m", "1"]);
    assert_eq!(r["files"].as_array().unwrap().len(), 3);
    let t1 = read(d, "simplex_n4_m1_t1.obj");
    assert_eq!(lines_starting(&t1, "p "), 4);
    assert_eq!(lines_starting(&t1, "f "), 4);

    ok(d, &["generate", "--kind", "sponge", "--n", "3", "--m", "1", "-o", "cube.obj", "--slice"]);
    assert!(d.join("cube_t3.svg").exists());
    assert!(d.join("cube_manifest.json").exists());

    let r = ok(d, &["slice", "--kind", "sponge", "--n", "2", "--m", "1"]);
    assert_eq!(r["format"], "json");
}

#[test]
fn invariants_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["generate", "--kind", "sponge", "--n", "2", "--m", "1", "--lattice", "-o", "carpet.json"]);
    let r = ok(d, &["invariants", "--input", "carpet.json"]);
    assert_eq!(table_from_report(&r), reference_carpet_matrices());
    assert_eq!(r["self_similar"], true);

    let frame = default_frame(Family::Sponge, 2).unwrap();
    let lattice = generate_points_recurrence(&frame, &[4, 4]).unwrap();
    let l = Matrix::from_int_rows(&[&[2, 1], &[1, 1]]);
    let b = [qi(7), qi(-3)];
    write_lattice(d, "mapped.json", lattice.map_points(|p| p.map_affine(&l, &b)).unwrap());
    let r = ok(d, &["invariants", "--input", "carpet.json", "--input", "mapped.json"]);
    assert_eq!(r["equivalent"], true);

    let idx = LatticeIndex::new(vec![2, 3]).unwrap();
    let moved = lattice.get(&[2, 3]).unwrap().add(&AffinePoint::from_ints(&[1, 0])).unwrap();
    write_lattice(d, "bent.json", lattice.with_point(&idx, moved).unwrap());
    let r = ok(d, &["invariants", "--input", "bent.json"]);
    assert_eq!(r["self_similar"], false);
    let r = ok(d, &["invariants", "--input", "carpet.json", "--input", "bent.json"]);
    assert_eq!(r["equivalent"], false);

    let sponge = ok(d, &["invariants", "--kind", "sponge", "--n", "3", "--m", "1"]);
    assert_eq!(table_from_report(&sponge), reference_sponge_matrices());

    let flat = PointLattice::from_points(vec![3, 3], vec![AffinePoint::from_ints(&[0, 0]); 9]).unwrap();
    write_lattice(d, "flat.json", flat);
    assert_eq!(run(d, &["invariants", "--input", "flat.json"]).code, 3);
}

#[test]
fn verify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for n in ["2", "3", "4"] {
        let r = ok(d, &["verify", "--n", n]);
        assert_eq!(r["pass"], true);
    }
    let r = ok(d, &["verify", "--kind", "sponge", "--n", "3", "--m", "3"]);
    let details: Vec<String> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("count_"))
        .map(|c| c["detail"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(details.len(), 3);
    for (detail, expected) in details.iter().zip(["20", "400", "8000"]) {
        assert!(detail.contains(&format!("closed form {expected}, enumerated {expected}")), "{detail}");
    }

    // An invariants file for the canonical carpet, then a tampered copy.
    ok(d, &["generate", "--kind", "sponge", "--n", "2", "--m", "1", "--lattice", "-o", "carpet.json"]);
    let r = ok(d, &["invariants", "--input", "carpet.json"]);
    let table = InvariantTable::new(table_from_report(&r).iter().map(to_matrix).collect()).unwrap();
    let mut buf = Vec::new();
    export_json(&Artifact::Invariants(table.clone()), &mut buf).unwrap();
    fs::write(d.join("good.json"), &buf).unwrap();
    assert_eq!(ok(d, &["verify", "--matrices", "good.json"])["pass"], true);

    let mut rows: Vec<Dense> = table.tables().iter().map(from_matrix).collect();
    rows[0][2][2] = qi(2);
    let tampered = InvariantTable::new(rows.iter().map(to_matrix).collect()).unwrap();
    let mut buf = Vec::new();
    export_json(&Artifact::Invariants(tampered), &mut buf).unwrap();
    fs::write(d.join("tampered.json"), &buf).unwrap();
    let r = run(d, &["verify", "--matrices", "tampered.json"]);
    assert_eq!(r.code, 1);
    assert_eq!(r.report["pass"], false);
    let failed: Vec<&str> = r.report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"hyperplane"), "{failed:?}");
    assert!(failed.contains(&"commutation"), "{failed:?}");
}

#[test]
fn count_examples() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = ok(d, &["count", "--kind", "sponge", "--n", "4", "--m", "2"]);
    assert_eq!((r["closed_form"].as_u64(), r["enumerated"].as_u64(), &r["agree"]), (Some(2304), Some(2304), &Value::Bool(true)));
    let r = ok(d, &["count", "--kind", "simplex", "--n", "5", "--m", "3"]);
    assert_eq!(r["closed_form"], 216);
    assert_eq!(r["agree"], true);
    let r = ok(d, &["count", "--kind", "sponge", "--n", "2", "--m", "1"]);
    assert_eq!(r["closed_form"], 8);
    // Too many cells to enumerate: closed form only.
    let r = ok(d, &["count", "--kind", "sponge", "--n", "6", "--m", "6"]);
    assert_eq!(r["closed_form"].as_u64(), Some(256u64.pow(6)));
    assert!(r.get("enumerated").is_none());
}

#[test]
fn in_process_entry_point_matches_binary() {
    let mut out = Vec::new();
    let code = affine_fractals::cli::run(["affine-fractals", "count", "--kind", "simplex", "--n", "2", "--m", "6"], &mut out);
    assert_eq!(code, 0);
    let report: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(report["closed_form"], 729);
}
