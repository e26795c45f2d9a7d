//! End-to-end acceptance battery. Every check prints one status line to
//! stderr (bypassing the test harness capture) and then asserts.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use petgraph::graph::DiGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyskel::complex::{Complex, FaceId};
use polyskel::driver::{run, ProblemSpec, RunReport, Verdict};
use polyskel::geometry::{point, Aabb, Polyhedron, Vec3};
use polyskel::grid::{build_dyadic, DyadicGridSpec};
use polyskel::io::{read_report_jsonl, write_report_jsonl, Mesh, ReportLine};
use polyskel::measure::{
    hausdorff_distance, lsc_probe, sample_set, CellValue, DensityField, DensityKind,
};
use polyskel::projection::{erode, erode_carried, ff_cascade, optimal_center, CascadeConfig};
use polyskel::simplicial::SimplicialSet;
use polyskel::skeleton::{
    admissible, optimize, quasiminimality_probe, Certificate, ConstraintOracle, OptimizeConfig, ProbeConfig, Skeleton,
};

fn status(criterion: u32, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("criterion {criterion} ({name}): {verdict} {detail}\n");
    let _ = std::io::stderr().write_all(line.as_bytes());
}

struct Timed {
    report: RunReport,
    elapsed: Duration,
}

fn timed_run(text: &str) -> Timed {
    let spec = ProblemSpec::from_toml(text).unwrap();
    let t = Instant::now();
    let report = run(&spec).unwrap();
    Timed { report, elapsed: t.elapsed() }
}

fn l_domain() -> &'static Timed {
    static RUN: OnceLock<Timed> = OnceLock::new();
    RUN.get_or_init(|| timed_run(include_str!("../../../configs/l_domain.toml")))
}

fn steiner() -> &'static Timed {
    static RUN: OnceLock<Timed> = OnceLock::new();
    RUN.get_or_init(|| timed_run(include_str!("../../../configs/steiner.toml")))
}

fn diagonal_axis() -> &'static Timed {
    static RUN: OnceLock<Timed> = OnceLock::new();
    RUN.get_or_init(|| timed_run(include_str!("../../../configs/diagonal_axis.toml")))
}

fn diagonal_patch() -> &'static Timed {
    static RUN: OnceLock<Timed> = OnceLock::new();
    RUN.get_or_init(|| timed_run(include_str!("../../../configs/diagonal_patch.toml")))
}

fn grid2(nx: usize, ny: usize, stride: f64) -> Complex {
    build_dyadic(&DyadicGridSpec::block(2, stride, Vec3::zeros(), [nx, ny, 1])).unwrap()
}

fn vertex(c: &Complex, p: &[f64]) -> FaceId {
    c.nearest_vertex_face(&point(p))
}

fn edge_between(c: &Complex, a: &[f64], b: &[f64]) -> FaceId {
    let mut vs = vec![c.face(vertex(c, a)).vertices[0], c.face(vertex(c, b)).vertices[0]];
    vs.sort_unstable();
    c.face_by_vertices(&vs).unwrap()
}

fn all_faces(c: &Complex, d: usize) -> Skeleton {
    Skeleton::new(d, c.faces_of_dim(d).to_vec())
}

#[test]
fn criterion_1_l_domain_geodesic() {
    let Timed { report, elapsed } = l_domain();
    let last = report.final_stride().unwrap();
    let s = last.stride;
    let j = report.final_value;
    let in_band = j >= 4.0 - 1e-9 && j <= 4.0 + 8.0 * s + 1e-9;
    // the optimum runs along the hole's side x = 1, one stride away at most
    let hugs = sample_set(&report.final_set, s / 4.0).iter().all(|p| (p[0] - 1.0).abs() <= s + 1e-9);
    let fast = elapsed.as_secs_f64() < 60.0;
    let pass = in_band && hugs && fast && report.oracle_holds && (s - 1.0 / 16.0).abs() < 1e-12;
    let values: Vec<String> = report.strides.iter().map(|r| format!("{}", r.value)).collect();
    status(
        1,
        "L-domain geodesic",
        pass,
        &format!("J per stride [{}], band [4, {}], hugs x=1 {hugs}, {:.1}s", values.join(", "), 4.0 + 8.0 * s, elapsed.as_secs_f64()),
    );
    assert!(pass);
}

fn petgraph_min_cut(c: &Complex, h: &DensityField, s: FaceId, t: FaceId) -> f64 {
    let cells = c.cells();
    let mut g: DiGraph<(), f64> = DiGraph::new();
    let nodes: HashMap<FaceId, _> = cells.iter().map(|&cell| (cell, g.add_node(()))).collect();
    for &e in c.faces_of_dim(1) {
        let f = c.face(e);
        if f.cells.len() != 2 {
            continue;
        }
        let (a, b) = (f.cells[0], f.cells[1]);
        let w = h.eval(&c.face(a).polyhedron.centroid()).min(h.eval(&c.face(b).polyhedron.centroid())) * f.measure;
        g.add_edge(nodes[&a], nodes[&b], w);
        g.add_edge(nodes[&b], nodes[&a], w);
    }
    petgraph::algo::ford_fulkerson(&g, nodes[&s], nodes[&t]).0
}

#[test]
fn criterion_2_separation_is_min_cut() {
    let t = Instant::now();
    let c = grid2(6, 6, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut mismatches = Vec::new();
    for instance in 0..20 {
        let mut cells = Vec::new();
        for i in 0..6 {
            for j in 0..6 {
                cells.push(CellValue { index: vec![i, j], value: rng.gen_range(4..=12) as f64 / 4.0 });
            }
        }
        let h = DensityField::new(DensityKind::Cellwise { origin: vec![0.0, 0.0], stride: 1.0, cells, default: 1.0 }).unwrap();
        let a = rng.gen_range(0..36);
        let b = loop {
            let b = rng.gen_range(0..36);
            if b != a {
                break b;
            }
        };
        let (s, t) = (c.cells()[a], c.cells()[b]);
        let oracle = ConstraintOracle::Separation { pairs: vec![(s, t)] };
        let cfg = OptimizeConfig { seed: instance, ..Default::default() };
        let out = optimize(&c, &all_faces(&c, 1), &oracle, &h, &cfg).unwrap();
        let flow = petgraph_min_cut(&c, &h, s, t);
        if out.value != flow {
            mismatches.push((instance, out.value, flow));
        }
    }
    let elapsed = t.elapsed().as_secs_f64();
    let pass = mismatches.is_empty() && elapsed < 30.0;
    status(2, "separation equals min cut", pass, &format!("20 instances, mismatches {mismatches:?}, {elapsed:.1}s"));
    assert!(pass);
}

/// Rectilinear Steiner length by brute force over the edges of the Hanan grid.
fn hanan_steiner(terminals: &[[f64; 2]]) -> f64 {
    let mut xs: Vec<f64> = terminals.iter().map(|t| t[0]).collect();
    let mut ys: Vec<f64> = terminals.iter().map(|t| t[1]).collect();
    for v in [&mut xs, &mut ys] {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
    }
    let id = |i: usize, j: usize| i * ys.len() + j;
    let mut edges = Vec::new();
    for i in 0..xs.len() {
        for j in 0..ys.len() {
            if i + 1 < xs.len() {
                edges.push((id(i, j), id(i + 1, j), xs[i + 1] - xs[i]));
            }
            if j + 1 < ys.len() {
                edges.push((id(i, j), id(i, j + 1), ys[j + 1] - ys[j]));
            }
        }
    }
    assert!(edges.len() <= 24);
    let term: Vec<usize> = terminals
        .iter()
        .map(|t| id(xs.iter().position(|&x| x == t[0]).unwrap(), ys.iter().position(|&y| y == t[1]).unwrap()))
        .collect();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << edges.len()) {
        let mut parent: Vec<usize> = (0..xs.len() * ys.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        let mut len = 0.0;
        for (k, &(a, b, w)) in edges.iter().enumerate() {
            if mask >> k & 1 == 1 {
                len += w;
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
        let root = find(&mut parent, term[0]);
        if len < best && term.iter().all(|&t| find(&mut parent, t) == root) {
            best = len;
        }
    }
    best
}

#[test]
fn criterion_3_rectilinear_steiner() {
    let terminals = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
    let expected = hanan_steiner(&terminals);
    // whole 1-skeleton of the unit square at stride 1/8 as the start
    let c = grid2(8, 8, 0.125);
    let oracle = ConstraintOracle::Connectivity { terminals: terminals.iter().map(|t| vertex(&c, t)).collect() };
    let out = optimize(&c, &all_faces(&c, 1), &oracle, &DensityField::default(), &OptimizeConfig::default()).unwrap();
    let Timed { report, .. } = steiner();
    let stride = report.final_stride().unwrap().stride;
    let pass = expected == 2.0 && out.value == expected && report.final_value == expected && stride == 0.125;
    status(
        3,
        "rectilinear Steiner",
        pass,
        &format!("Hanan oracle {expected}, optimizer {}, driver {} at stride {stride}", out.value, report.final_value),
    );
    assert!(pass);
}

#[test]
fn criterion_4_oriented_patch_benefit() {
    let axis = diagonal_axis();
    let patch = diagonal_patch();
    let s = axis.report.final_stride().unwrap().stride;
    let axis_ok = (axis.report.final_value - 2.0).abs() <= s + 1e-9;
    let bound = 1.1 * 2f64.sqrt();
    let last = patch.report.final_stride().unwrap();
    let merged = last.patches > 0 && last.merge.as_ref().is_some_and(|m| m.validity);
    let patch_ok = patch.report.final_value <= bound && merged && patch.report.oracle_holds;
    let elapsed = (axis.elapsed + patch.elapsed).as_secs_f64();
    let pass = axis_ok && patch_ok && elapsed < 120.0;
    status(
        4,
        "oriented patch benefit",
        pass,
        &format!(
            "axis-only {} (2 +- {s}), with patch {:.5} (bound {bound:.5}), {elapsed:.1}s",
            axis.report.final_value, patch.report.final_value
        ),
    );
    assert!(pass);
}

fn random_segment(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]) -> Vec<Vec3> {
    (0..2).map(|_| random_point(rng, lo, hi)).collect()
}

fn random_point(rng: &mut ChaCha8Rng, lo: &[f64], hi: &[f64]) -> Vec3 {
    let c: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| rng.gen_range(*a..*b)).collect();
    point(&c)
}

fn mean_cv(xs: &[f64]) -> (f64, f64) {
    let m = xs.iter().sum::<f64>() / xs.len() as f64;
    let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64;
    (m, var.sqrt() / m)
}

#[test]
fn criterion_5_optimal_center() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    // (label, n, face box, dimension of E); each shape fixes the rotondity
    let groups: [(&str, usize, [f64; 3], usize); 4] = [
        ("unit square", 2, [1.0, 1.0, 0.0], 1),
        ("2x1 rectangle", 2, [2.0, 1.0, 0.0], 1),
        ("unit cube, segments", 3, [1.0, 1.0, 1.0], 1),
        ("unit cube, triangles", 3, [1.0, 1.0, 1.0], 2),
    ];
    let mut contract_ok = true;
    let mut bound_ok = true;
    let mut lines = Vec::new();
    let mut cv_ok = true;
    for (g, (label, n, size, d)) in groups.iter().enumerate() {
        let hi = &size[..*n];
        let lo = vec![0.0; *n];
        let face = Polyhedron::axis_box(*n, &lo, hi).unwrap();
        let rot = face.shape_stats().rotondity;
        let margin: Vec<f64> = hi.iter().map(|h| h * 0.05).collect();
        let inner_lo: Vec<f64> = margin.clone();
        let inner_hi: Vec<f64> = hi.iter().zip(&margin).map(|(h, m)| h - m).collect();
        let mut ks = Vec::new();
        for i in 0..25 {
            let pieces: Vec<Vec<Vec3>> = (0..3)
                .map(|_| {
                    if *d == 1 {
                        random_segment(&mut rng, &inner_lo, &inner_hi)
                    } else {
                        (0..3).map(|_| random_point(&mut rng, &inner_lo, &inner_hi)).collect()
                    }
                })
                .collect();
            let e = SimplicialSet::from_simplices(*n, *d, &pieces).unwrap();
            let choice = optimal_center(&face, &e, (g * 100 + i) as u64).unwrap();
            contract_ok &= choice.measure <= 2.0 * choice.mean;
            let ratio = choice.measure / e.measure();
            let k_emp = ratio * rot.powi(2 * *d as i32);
            bound_ok &= ratio <= k_emp * rot.powi(-2 * *d as i32) * (1.0 + 1e-12);
            ks.push(k_emp);
        }
        let (m, cv) = mean_cv(&ks);
        cv_ok &= cv < 0.5;
        lines.push(format!("{label}: R {rot:.3}, K_emp mean {m:.3} cv {:.0}%", cv * 100.0));
    }
    let pass = contract_ok && bound_ok && cv_ok;
    status(5, "optimal center", pass, &format!("100 instances; {}", lines.join("; ")));
    assert!(pass);
}

fn sets_match(a: &SimplicialSet, b: &SimplicialSet, spacing: f64) -> bool {
    (a.measure() - b.measure()).abs() <= 1e-9 * a.measure().max(1.0)
        && hausdorff_distance(&sample_set(a, spacing), &sample_set(b, spacing)) <= 1e-9
}

#[test]
fn criterion_6_cascade_and_erosion() {
    let mut failures: Vec<String> = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (d, n) in [(1usize, 2usize), (1, 3), (2, 3)] {
        let (c, hi) = if n == 2 {
            (grid2(3, 3, 1.0), vec![3.0, 3.0])
        } else {
            (build_dyadic(&DyadicGridSpec::block(3, 1.0, Vec3::zeros(), [2, 2, 2])).unwrap(), vec![2.0, 2.0, 2.0])
        };
        let lo = vec![0.05; n];
        let hi: Vec<f64> = hi.iter().map(|h| h - 0.05).collect();
        for trial in 0..50 {
            let tag = format!("(d={d}, n={n}) #{trial}");
            let count = rng.gen_range(1..=3);
            let pieces: Vec<Vec<Vec3>> = (0..count).map(|_| (0..=d).map(|_| random_point(&mut rng, &lo, &hi)).collect()).collect();
            let e = SimplicialSet::from_simplices(n, d, &pieces).unwrap();
            let cfg = CascadeConfig { seed: trial, ..Default::default() };
            let cascade = ff_cascade(&c, &e, d, &cfg).unwrap();
            if cascade.carried.iter().any(|p| c.face(p.face).dim > d) {
                failures.push(format!("{tag}: cascade left the skeleton"));
            }
            let again = ff_cascade(&c, &cascade.set, d, &cfg).unwrap();
            if !sets_match(&again.set, &cascade.set, 0.05) || again.ledger.iter().any(|l| (l.ratio - 1.0).abs() > 1e-9) {
                failures.push(format!("{tag}: cascade not idempotent"));
            }
            let er = erode_carried(&c, &cascade.carried, d).unwrap();
            if er.measure_after > er.measure_before + 1e-9 {
                failures.push(format!("{tag}: erosion increased the measure"));
            }
            let fixed = erode(&c, &er.skeleton.to_set(&c), d).unwrap();
            if fixed.skeleton != er.skeleton {
                failures.push(format!("{tag}: erosion output is not a fixed point"));
            }
            // random unions of d-faces are left alone
            let faces: Vec<FaceId> = c.faces_of_dim(d).iter().copied().filter(|_| rng.gen_bool(0.2)).collect();
            let skel = Skeleton::new(d, faces).to_set(&c);
            let image = ff_cascade(&c, &skel, d, &cfg).unwrap();
            let ratio = if skel.measure() > 0.0 { image.set.measure() / skel.measure() } else { 1.0 };
            if (ratio - 1.0).abs() > 1e-9 || !sets_match(&image.set, &skel, 0.05) {
                failures.push(format!("{tag}: skeleton set moved (ratio {ratio})"));
            }
        }
    }
    let pass = failures.is_empty();
    status(6, "cascade and erosion invariants", pass, &format!("150 inputs, failures {failures:?}"));
    assert!(pass);
}

fn staircase(steps: usize) -> SimplicialSet {
    let mut pts = vec![point(&[0.0, 0.0])];
    let h = 1.0 / steps as f64;
    for k in 0..steps {
        pts.push(point(&[(k + 1) as f64 * h, k as f64 * h]));
        pts.push(point(&[(k + 1) as f64 * h, (k + 1) as f64 * h]));
    }
    SimplicialSet::polyline(2, &pts).unwrap()
}

#[test]
fn criterion_7_lower_semicontinuity() {
    let tol = 1e-9;
    let sequence: Vec<SimplicialSet> = (0..7).map(|k| staircase(1 << k)).collect();
    let limit = SimplicialSet::polyline(2, &[point(&[0.0, 0.0]), point(&[1.0, 1.0])]).unwrap();
    let window = Aabb { min: point(&[-0.5, -0.5]), max: point(&[1.5, 1.5]) };
    let lsc = lsc_probe(&sequence, &limit, &DensityField::default(), &[window], tol);
    let w = &lsc.windows[0];
    let staircase_ok = lsc.margin >= 0.58 - tol && (w.limit - 2f64.sqrt()).abs() < 1e-9 && (w.liminf - 2.0).abs() < 1e-9;

    let mut margins = Vec::new();
    let mut driver_ok = true;
    for (name, t) in [("L-domain", l_domain()), ("Steiner", steiner()), ("diagonal axis", diagonal_axis()), ("diagonal patch", diagonal_patch())] {
        let m = t.report.lsc.as_ref().map(|l| l.margin);
        driver_ok &= m.is_some_and(|m| m >= 0.0);
        margins.push(format!("{name} {m:?}"));
    }
    let pass = staircase_ok && driver_ok;
    status(
        7,
        "lower semicontinuity",
        pass,
        &format!("staircase limit {:.5} liminf {:.5} margin {:.5}; driver margins [{}]", w.limit, w.liminf, lsc.margin, margins.join(", ")),
    );
    assert!(pass);
}

#[test]
fn criterion_8_quasiminimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut certified = 0;
    let mut recorded = 0;
    for instance in 0..20u64 {
        let (nx, ny) = if instance % 2 == 0 { (2, 2) } else { (3, 2) };
        let c = grid2(nx, ny, 1.0);
        let (oracle, frozen) = if instance % 4 == 3 {
            let cells = c.cells();
            let a = rng.gen_range(0..cells.len());
            let b = (a + rng.gen_range(1..cells.len())) % cells.len();
            (ConstraintOracle::Separation { pairs: vec![(cells[a], cells[b])] }, Vec::new())
        } else {
            let verts = c.faces_of_dim(0);
            let mut terms = BTreeSet::new();
            let k = rng.gen_range(2..=3);
            while terms.len() < k {
                terms.insert(verts[rng.gen_range(0..verts.len())]);
            }
            let terms: Vec<FaceId> = terms.into_iter().collect();
            (ConstraintOracle::Connectivity { terminals: terms.clone() }, terms)
        };
        let init = all_faces(&c, 1).with_frozen(frozen);
        let out = optimize(&c, &init, &oracle, &DensityField::default(), &OptimizeConfig::default()).unwrap();
        assert_eq!(out.certificate, Certificate::Exhaustive);
        certified += 1;
        let rep = quasiminimality_probe(&c, &out.skeleton, &oracle, &ProbeConfig::new(200, instance)).unwrap();
        recorded += rep.records.len();
        if let Some(m) = rep.max_ratio {
            worst = worst.max(m);
        }
    }
    // a straight path with one edge hanging off its middle
    let c = grid2(3, 2, 1.0);
    let ends = vec![vertex(&c, &[0.0, 1.0]), vertex(&c, &[3.0, 1.0])];
    let oracle = ConstraintOracle::Connectivity { terminals: ends.clone() };
    let mut faces: Vec<FaceId> = (0..3).map(|i| edge_between(&c, &[i as f64, 1.0], &[i as f64 + 1.0, 1.0])).collect();
    faces.push(edge_between(&c, &[1.0, 1.0], &[1.0, 2.0]));
    let planted = Skeleton::new(1, faces).with_frozen(ends);
    assert!(admissible(&c, &planted, &oracle).unwrap());
    let rep = quasiminimality_probe(&c, &planted, &oracle, &ProbeConfig::new(200, 1)).unwrap();
    let detected = rep.max_ratio.unwrap_or(0.0);
    let pass = certified == 20 && recorded > 0 && worst <= 1.0 && detected > 1.0;
    status(
        8,
        "quasiminimality probe",
        pass,
        &format!("20 certified optima, {recorded} deformations, max ratio {worst}; hanging edge ratio {detected}"),
    );
    assert!(pass);
}

#[test]
fn criterion_9_flat_sheet() {
    let c = build_dyadic(&DyadicGridSpec::block(3, 1.0, Vec3::zeros(), [2, 2, 2])).unwrap();
    let ring = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [2.0, 1.0], [2.0, 2.0], [1.0, 2.0], [0.0, 2.0], [0.0, 1.0]];
    let frame: Vec<FaceId> = (0..8)
        .map(|k| {
            let (a, b) = (ring[k], ring[(k + 1) % 8]);
            edge_between(&c, &[a[0], a[1], 1.0], &[b[0], b[1], 1.0])
        })
        .collect();
    let oracle = ConstraintOracle::Spanning { boundary: frame };
    let centroid_z = |f: FaceId| c.face(f).polyhedron.centroid()[2];
    // start from a dome: the boundary of the upper layer without the sheet
    let mut parity: HashMap<FaceId, usize> = HashMap::new();
    for &cell in c.cells().iter().filter(|&&cell| centroid_z(cell) > 1.0) {
        for &f in &c.face(cell).children {
            *parity.entry(f).or_default() += 1;
        }
    }
    let dome: Vec<FaceId> = parity.into_iter().filter(|&(f, k)| k % 2 == 1 && (centroid_z(f) - 1.0).abs() > 1e-9).map(|(f, _)| f).collect();
    let init = Skeleton::new(2, dome);
    let init_area = init.measure(&c);
    assert!(admissible(&c, &init, &oracle).unwrap());
    let out = optimize(&c, &init, &oracle, &DensityField::default(), &OptimizeConfig::default()).unwrap();
    let sheet: Vec<FaceId> = out.skeleton.face_ids.iter().copied().filter(|&f| c.face(f).dim == 2).collect();
    let flat = sheet.iter().all(|&f| (centroid_z(f) - 1.0).abs() < 1e-12);
    let pass = out.value == 4.0 && out.hausdorff == 4.0 && flat && sheet.len() == 4;
    status(9, "flat sheet", pass, &format!("start area {init_area}, result H2 {} on {} squares, flat {flat}", out.hausdorff, sheet.len()));
    assert!(pass);
}

#[test]
fn converged_runs_have_a_converged_verdict() {
    assert_eq!(l_domain().report.verdict, Verdict::Converged);
}

#[test]
fn exported_artifacts_round_trip() {
    for (name, t) in [("L-domain", l_domain()), ("Steiner", steiner()), ("diagonal axis", diagonal_axis()), ("diagonal patch", diagonal_patch())] {
        let r = &t.report;
        for set in r.sequence.iter().chain([&r.final_set]) {
            let mesh = Mesh::from_set(set);
            let back = Mesh::from_off(&mesh.to_off()).unwrap();
            assert_eq!(back, mesh, "{name}");
            assert!((back.to_set().unwrap().measure() - set.measure()).abs() <= 1e-9 * set.measure().max(1.0), "{name}");
        }
        let mut buf = Vec::new();
        write_report_jsonl(&mut buf, r).unwrap();
        let lines = read_report_jsonl(buf.as_slice()).unwrap();
        assert_eq!(lines.len(), r.strides.len() + 1, "{name}");
        for (line, s) in lines.iter().zip(&r.strides) {
            assert!(matches!(line, ReportLine::Stride(x) if x == s), "{name}: stride {} changed", s.index);
        }
        match lines.last() {
            Some(ReportLine::Summary(sum)) => {
                assert_eq!(sum.final_set, r.final_set, "{name}");
                assert_eq!(sum.final_skeleton, r.final_skeleton, "{name}");
            }
            other => panic!("{name}: {other:?}"),
        }
    }
}
