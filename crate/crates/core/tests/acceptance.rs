mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use affine_fractals::*;
use common::*;
use num_bigint::BigUint;

type Outcome = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn cells(kind: &FractalKind) -> Vec<Vec<usize>> {
    enumerate_cells(kind).members().iter().map(|c| c.to_vec()).collect()
}

fn mesh(family: Family, n: usize, m: usize) -> FractalMesh {
    let kind = FractalKind::new(family, n, m).unwrap();
    assemble_mesh_by_transport(&kind, &default_frame(family, n).unwrap()).unwrap()
}

fn sponge_s1_exact() -> Outcome {
    let got = cells(&FractalKind::sponge(3, 1).unwrap());
    let mut listed: Vec<Vec<usize>> = REFERENCE_SPONGE_S1.iter().map(|a| a.to_vec()).collect();
    listed.sort();
    ensure(got == listed, || format!("enumerated {got:?}"))
}

fn counts() -> Outcome {
    let cases: &[(Family, usize, u64, usize)] = &[
        (Family::Sponge, 2, 8, 3),
        (Family::Sponge, 3, 20, 3),
        (Family::Sponge, 4, 48, 2),
        (Family::Simplex, 2, 3, 6),
        (Family::Simplex, 3, 4, 2),
        (Family::Simplex, 4, 5, 2),
    ];
    for &(family, n, base, max_m) in cases {
        for m in 1..=max_m {
            let kind = FractalKind::new(family, n, m).unwrap();
            let expected = BigUint::from(base).pow(m as u32);
            let closed = count_closed_form(&kind);
            let enumerated = enumerate_cells(&kind).len();
            ensure(closed == expected && BigUint::from(enumerated) == expected, || {
                format!("{} n={n} m={m}: closed {closed}, enumerated {enumerated}, expected {expected}", family.name())
            })?;
        }
    }
    Ok(())
}

fn invariant_recovery() -> Outcome {
    for (n, reference) in [(2, reference_carpet_matrices()), (3, reference_sponge_matrices())] {
        let lattice = generate_points_recurrence(&default_frame(Family::Sponge, n).unwrap(), &vec![3; n]).unwrap();
        let nb = Neighborhood::from_lattice(&lattice, &LatticeIndex::new(vec![1; n]).unwrap()).unwrap();
        let table = compute_invariants_affine(&nb).map_err(|e| e.to_string())?;
        let got: Vec<Dense> = table.tables().iter().map(from_matrix).collect();
        ensure(got == reference, || format!("n={n}: recovered {got:?}"))?;
    }
    Ok(())
}

fn compatibility_and_hyperplane() -> Outcome {
    for n in 2..=6 {
        let ms = canonical_matrices(n).map_err(|e| e.to_string())?;
        let dense: Vec<Dense> = ms.iter().map(|m| from_matrix(m.entries())).collect();
        ensure(dense == canonical_oracle(n), || format!("n={n}: matrices differ from the oracle"))?;
        for a in &dense {
            for b in &dense {
                ensure(mat_mul(a, b) == mat_mul(b, a), || format!("n={n}: oracle commutation fails"))?;
            }
            for j in 0..=n {
                let sum = a.iter().fold(qi(0), |acc, row| acc + &row[j]);
                ensure(sum == qi(1), || format!("n={n}: column {j} sums to {sum}"))?;
            }
        }
        ensure(check_compatibility(&ms).map_err(|e| e.to_string())?, || format!("n={n}: not compatible"))?;
        ensure(check_hyperplane_criterion(&ms), || format!("n={n}: hyperplane check fails"))?;
    }
    Ok(())
}

fn method_equivalence() -> Outcome {
    let mut rng = rng(0x5eed_0005);
    for trial in 0..20 {
        let n = 2 + trial % 3;
        let m = 1 + (trial / 3) % 2;
        let frame = random_affine_frame(&mut rng, n);
        let family = TransitionFamily::canonical(n).unwrap();
        for f in [Family::Sponge, Family::Simplex] {
            let kind = FractalKind::new(f, n, m).unwrap();
            let extent = vec![kind.point_extent(); n];
            let a = generate_points_recurrence(&frame, &extent).map_err(|e| e.to_string())?;
            let b = generate_points_matrix(&frame, &family, &extent).map_err(|e| e.to_string())?;
            ensure(a == b, || format!("trial {trial}: {} n={n} m={m} differs", f.name()))?;
        }
    }
    Ok(())
}

fn affine_invariance() -> Outcome {
    let mut rng = rng(0x5eed_0006);
    for trial in 0..100 {
        let n = 2 + trial % 2;
        let frame = random_affine_frame(&mut rng, n);
        let (l, b) = random_affine_map(&mut rng, n);
        let lattice = generate_points_recurrence(&frame, &vec![3; n]).unwrap();
        let mapped = lattice.map_points(|p| p.map_affine(&l, &b)).unwrap();
        for site in interior_sites(&lattice) {
            let before = invariants_at(&lattice, &site).map_err(|e| e.to_string())?;
            let after = invariants_at(&mapped, &site).map_err(|e| e.to_string())?;
            ensure(before == after, || format!("trial {trial}: tables change at {:?}", site.coords()))?;
        }
        let regenerated = generate_points_recurrence(&frame.map_affine(&l, &b).unwrap(), &vec![3; n]).unwrap();
        ensure(regenerated == mapped, || format!("trial {trial}: generation does not commute"))?;
    }
    Ok(())
}

fn triangle_cross_check() -> Outcome {
    for m in 1..=6 {
        let a = triangle_block_matrix(m).map_err(|e| e.to_string())?;
        let ones: Vec<Vec<usize>> = a
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().enumerate().filter(|(_, &x)| x == 1).map(move |(j, _)| vec![i + 1, j + 1]))
            .collect();
        let got = cells(&FractalKind::simplex(2, m).unwrap());
        ensure(ones == got, || format!("m={m}: block matrix and enumeration differ"))?;
        if m == 2 {
            let mut listed: Vec<Vec<usize>> = REFERENCE_TRIANGLE_S2.iter().map(|a| a.to_vec()).collect();
            listed.sort();
            ensure(got == listed, || format!("m=2: enumerated {got:?}"))?;
        }
    }
    Ok(())
}

fn slicing() -> Outcome {
    let mut by_last: BTreeMap<usize, usize> = BTreeMap::new();
    for a in index_box(4, 3).into_iter().filter(|a| sponge_oracle(a, 1)) {
        *by_last.entry(a[3]).or_default() += 1;
    }
    let anchors: Vec<usize> = by_last.values().copied().collect();
    ensure(anchors == [20, 8, 20], || format!("oracle anchor counts {anchors:?}"))?;

    let roles = |s: &SliceSeries| -> Vec<(usize, usize)> {
        s.slices.iter().map(|sl| (sl.count(Role::Bottom), sl.count(Role::Top))).collect()
    };
    let sponge = slice_series(&mesh(Family::Sponge, 4, 1)).map_err(|e| e.to_string())?;
    let expected = vec![(anchors[0], 0), (anchors[1], anchors[0]), (anchors[2], anchors[1]), (0, anchors[2])];
    ensure(roles(&sponge) == expected, || format!("sponge slices {:?}", roles(&sponge)))?;

    let simplex = slice_series(&mesh(Family::Simplex, 4, 1)).map_err(|e| e.to_string())?;
    ensure(roles(&simplex) == [(4, 0), (1, 4), (0, 1)], || format!("simplex slices {:?}", roles(&simplex)))?;
    for sl in &simplex.slices {
        for piece in &sl.pieces {
            let shape = match piece.role {
                Role::Bottom => (PieceShape::SimplexFacet, 4),
                Role::Top => (PieceShape::Point, 1),
            };
            ensure((piece.shape, piece.vertices.len()) == shape, || format!("t={}: bad piece", sl.time))?;
        }
    }

    for (series, total) in [(&sponge, 48), (&simplex, 5)] {
        let mut seen: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for sl in &series.slices {
            for piece in &sl.pieces {
                seen.entry(piece.label).or_default().push(sl.time);
            }
        }
        ensure(seen.len() == total, || format!("{} labels, expected {total}", seen.len()))?;
        for (label, mut times) in seen {
            times.sort();
            ensure(times.len() == 2 && times[1] == times[0] + 1, || format!("label {label} at {times:?}"))?;
        }
        ensure(pair_labels(series).len() == total, || "pair_labels misses cells".into())?;
    }
    Ok(())
}

fn export_fidelity() -> Outcome {
    let err = |e: Error| e.to_string();
    let carpet = mesh(Family::Sponge, 2, 3);
    let mut svg = Vec::new();
    export_svg(Geometry::Mesh(&carpet), &ExportStyle::default(), &mut svg).map_err(err)?;
    let polygons = String::from_utf8_lossy(&svg).matches("<polygon").count();
    ensure(polygons == 512, || format!("{polygons} polygons"))?;

    let pyramid = mesh(Family::Simplex, 3, 2);
    let mut obj = Vec::new();
    export_obj(Geometry::Mesh(&pyramid), &mut obj).map_err(err)?;
    let text = String::from_utf8_lossy(&obj);
    let faces: Vec<&str> = text.lines().filter(|l| l.starts_with("f ")).collect();
    ensure(faces.len() == 64 && faces.iter().all(|f| f.split_whitespace().count() == 4), || {
        format!("{} faces", faces.len())
    })?;

    let lattice = generate_points_recurrence(&random_affine_frame(&mut rng(9), 3), &[3, 3, 3]).unwrap();
    let nb = Neighborhood::from_lattice(&lattice, &LatticeIndex::new(vec![1, 1, 1]).unwrap()).unwrap();
    let table = compute_invariants_affine(&nb).map_err(err)?;
    let series = slice_series(&mesh(Family::Sponge, 3, 1)).map_err(err)?;
    let artifacts = [
        Artifact::Lattice(lattice),
        Artifact::Invariants(table),
        Artifact::Mesh(pyramid.clone()),
        Artifact::Slices(series),
    ];
    for artifact in &artifacts {
        let mut first = Vec::new();
        export_json(artifact, &mut first).map_err(err)?;
        let back = import_json(first.as_slice()).map_err(err)?;
        ensure(&back == artifact, || "JSON round trip is lossy".into())?;
        let mut second = Vec::new();
        export_json(&back, &mut second).map_err(err)?;
        ensure(first == second, || "JSON re-export differs".into())?;
    }

    let mut svg2 = Vec::new();
    export_svg(Geometry::Mesh(&mesh(Family::Sponge, 2, 3)), &ExportStyle::default(), &mut svg2).map_err(err)?;
    let mut obj2 = Vec::new();
    export_obj(Geometry::Mesh(&mesh(Family::Simplex, 3, 2)), &mut obj2).map_err(err)?;
    ensure(svg == svg2 && obj == obj2, || "repeated runs differ".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("sponge level-1 cells match the reference list", sponge_s1_exact),
        ("enumerated counts equal closed forms", counts),
        ("carpet and sponge invariants recovered exactly", invariant_recovery),
        ("canonical matrices commute and have unit column sums", compatibility_and_hyperplane),
        ("recurrence and matrix generation agree", method_equivalence),
        ("invariants and generation are affine invariant", affine_invariance),
        ("triangle block matrix equals simplex enumeration", triangle_cross_check),
        ("4D sponge and simplex slices", slicing),
        ("export counts, round trips and determinism", export_fidelity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("PASS {}: {name} ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} ({secs:.2}s): {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
