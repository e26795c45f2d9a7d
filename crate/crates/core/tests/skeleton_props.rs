use std::collections::BTreeSet;

use proptest::prelude::*;

use polyskel::complex::{Complex, FaceId};
use polyskel::geometry::Vec3;
use polyskel::grid::{build_dyadic, DyadicGridSpec};
use polyskel::measure::{CellValue, DensityField, DensityKind};
use polyskel::skeleton::{admissible, core_decompose, optimize, Certificate, ConstraintOracle, OptimizeConfig, Skeleton};

fn grid(nx: usize, ny: usize) -> Complex {
    build_dyadic(&DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [nx, ny, 1])).unwrap()
}

#[derive(Clone, Debug)]
enum Problem {
    Connect(Vec<usize>),
    Separate(Vec<(usize, usize)>),
}

/// A small grid (at most 17 edges) and an oracle on it, by vertex or cell index.
fn instance() -> impl Strategy<Value = (usize, usize, Problem)> {
    prop_oneof![Just((2usize, 2usize)), Just((3, 2)), Just((2, 3))].prop_flat_map(|(nx, ny)| {
        let verts = (nx + 1) * (ny + 1);
        let cells = nx * ny;
        let connect = prop::collection::btree_set(0..verts, 2..=3).prop_map(|s| Problem::Connect(s.into_iter().collect()));
        let separate = prop::collection::vec((0..cells, 0..cells), 1..=3)
            .prop_map(|ps| Problem::Separate(ps.into_iter().filter(|(a, b)| a != b).collect()))
            .prop_filter("no pairs", |p| matches!(p, Problem::Separate(ps) if !ps.is_empty()));
        (Just(nx), Just(ny), prop_oneof![connect, separate])
    })
}

fn oracle(c: &Complex, p: &Problem) -> ConstraintOracle {
    match p {
        Problem::Connect(vs) => ConstraintOracle::Connectivity { terminals: vs.iter().map(|&v| c.faces_of_dim(0)[v]).collect() },
        Problem::Separate(ps) => ConstraintOracle::Separation { pairs: ps.iter().map(|&(a, b)| (c.cells()[a], c.cells()[b])).collect() },
    }
}

fn start(c: &Complex, p: &Problem) -> Skeleton {
    let s = Skeleton::new(1, c.faces_of_dim(1).to_vec());
    match p {
        Problem::Connect(vs) => s.with_frozen(vs.iter().map(|&v| c.faces_of_dim(0)[v]).collect()),
        Problem::Separate(_) => s,
    }
}

fn cellwise(nx: usize, ny: usize, values: &[u8], scale: f64) -> DensityField {
    let mut cells = Vec::new();
    for i in 0..nx {
        for j in 0..ny {
            let v = values[(i * ny + j) % values.len()];
            cells.push(CellValue { index: vec![i as i64, j as i64], value: scale * (4 + v % 9) as f64 / 4.0 });
        }
    }
    DensityField::new(DensityKind::Cellwise { origin: vec![0.0, 0.0], stride: 1.0, cells, default: scale }).unwrap()
}

fn d_faces(s: &Skeleton, c: &Complex) -> Vec<FaceId> {
    s.face_ids.iter().copied().filter(|&f| c.face(f).dim == s.dim).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn outcomes_are_admissible_and_modes_agree((nx, ny, p) in instance(), values in prop::collection::vec(any::<u8>(), 1..12), seed in any::<u64>()) {
        let c = grid(nx, ny);
        let o = oracle(&c, &p);
        let h = cellwise(nx, ny, &values, 1.0);
        let init = start(&c, &p);
        let exact = optimize(&c, &init, &o, &h, &OptimizeConfig { seed, ..Default::default() }).unwrap();
        prop_assert_eq!(exact.certificate, Certificate::Exhaustive);
        prop_assert!(admissible(&c, &exact.skeleton, &o).unwrap());
        let local = optimize(&c, &init, &o, &h, &OptimizeConfig { seed, exhaustive_cap: 0, ..Default::default() }).unwrap();
        prop_assert_eq!(local.certificate, Certificate::Local);
        prop_assert!(admissible(&c, &local.skeleton, &o).unwrap());
        prop_assert_eq!(local.value, exact.value);
    }

    #[test]
    fn dropping_a_pair_never_raises_the_optimum((nx, ny) in prop_oneof![Just((2usize, 2usize)), Just((3, 2)), Just((2, 3))], pairs in prop::collection::vec((0usize..4, 1usize..4).prop_map(|(a, k)| (a, (a + k) % 4)), 2..4), seed in any::<u64>()) {
        let c = grid(nx, ny);
        let all = Problem::Separate(pairs.clone());
        let fewer = Problem::Separate(pairs[1..].to_vec());
        let cfg = OptimizeConfig { seed, ..Default::default() };
        let h = DensityField::default();
        let all = optimize(&c, &start(&c, &all), &oracle(&c, &all), &h, &cfg).unwrap();
        let fewer = optimize(&c, &start(&c, &fewer), &oracle(&c, &fewer), &h, &cfg).unwrap();
        prop_assert_eq!(all.certificate, Certificate::Exhaustive);
        prop_assert!(fewer.value <= all.value, "{} > {}", fewer.value, all.value);
    }

    #[test]
    fn scaling_the_density_keeps_the_argmin((nx, ny, p) in instance(), values in prop::collection::vec(any::<u8>(), 1..12), k in 0usize..4) {
        let scale = [1.5, 2.0, 3.0, 10.0][k];
        let c = grid(nx, ny);
        let o = oracle(&c, &p);
        let init = start(&c, &p);
        let cfg = OptimizeConfig::default();
        let base = optimize(&c, &init, &o, &cellwise(nx, ny, &values, 1.0), &cfg).unwrap();
        let scaled = optimize(&c, &init, &o, &cellwise(nx, ny, &values, scale), &cfg).unwrap();
        prop_assert_eq!(d_faces(&base.skeleton, &c), d_faces(&scaled.skeleton, &c));
        prop_assert!((scaled.value - scale * base.value).abs() <= 1e-9 * scaled.value.max(1.0));
    }

    #[test]
    fn cores_partition_the_maximal_faces(nx in 1usize..4, ny in 1usize..4, picks in prop::collection::vec(any::<prop::sample::Index>(), 0..12)) {
        let c = grid(nx, ny);
        let pool: Vec<FaceId> = (0..=1).flat_map(|k| c.faces_of_dim(k).to_vec()).collect();
        let faces: Vec<FaceId> = picks.iter().map(|i| pool[i.index(pool.len())]).collect();
        let skel = Skeleton::new(1, faces);
        let cores = core_decompose(&c, &skel);
        let mut seen = BTreeSet::new();
        for level in &cores.levels {
            for &f in level {
                prop_assert!(seen.insert(f), "face {} listed twice", f);
            }
        }
        let maximal: BTreeSet<FaceId> = skel
            .face_ids
            .iter()
            .copied()
            .filter(|&f| !skel.face_ids.iter().any(|&g| g != f && c.is_subface(f, g)))
            .collect();
        prop_assert_eq!(seen, maximal);
        for (l, level) in cores.levels.iter().enumerate() {
            prop_assert!(level.iter().all(|&f| c.face(f).dim == l));
        }
    }
}
