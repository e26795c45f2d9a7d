use nalgebra::Rotation3;
use proptest::prelude::*;

use polyskel::geometry::{point, Polyhedron, Vec3};
use polyskel::grid::{build_dyadic, DyadicGridSpec};

fn cloud(n: usize) -> impl Strategy<Value = Vec<Vec3>> {
    prop::collection::vec(prop::collection::vec(-2.0..2.0f64, n), n + 1..n + 8)
        .prop_map(|pts| pts.iter().map(|p| point(p)).collect())
}

fn full_dim(n: usize) -> impl Strategy<Value = Polyhedron> {
    cloud(n).prop_filter_map("degenerate hull", move |pts| {
        Polyhedron::from_vertices(n, &pts).ok().filter(|p| p.dim == n && p.shape_stats().inner_radius > 1e-3)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dyadic_cubes_have_exact_radii(n in 2usize..=3, k in -4i32..4, z in prop::array::uniform3(-5i64..5)) {
        let r = 2f64.powi(k);
        let spec = DyadicGridSpec { index_set: vec![z], ..DyadicGridSpec::block(n, r, Vec3::zeros(), [1, 1, 1]) };
        let cube = spec.cube(&z);
        let s = cube.shape_stats();
        let sn = (n as f64).sqrt();
        prop_assert!((s.outer_radius - r * sn / 2.0).abs() < 1e-9 * r.max(1.0));
        prop_assert!((s.inner_radius - r / 2.0).abs() < 1e-9 * r.max(1.0));
        prop_assert!((s.rotondity - 1.0 / sn).abs() < 1e-9);
    }

    #[test]
    fn points_lie_in_exactly_one_subface(p in full_dim(3), picks in prop::collection::vec((any::<prop::sample::Index>(), prop::collection::vec(0.05..1.0f64, 8)), 40)) {
        let lattice = p.face_lattice();
        for (idx, weights) in picks {
            let face = &lattice.faces[idx.index(lattice.faces.len())].polyhedron;
            let w: Vec<f64> = weights.iter().cycle().take(face.vertices.len()).copied().collect();
            let total: f64 = w.iter().sum();
            let q = face.vertices.iter().zip(&w).fold(Vec3::zeros(), |a, (v, x)| a + v * (x / total));
            let hits = lattice.faces.iter().filter(|f| f.polyhedron.contains_relint(&q, 1e-9)).count();
            prop_assert_eq!(hits, 1);
        }
    }

    #[test]
    fn rotondity_is_a_similarity_invariant(
        p in full_dim(3),
        angles in prop::array::uniform3(-3.0..3.0f64),
        scale in 0.1..10.0f64,
        shift in prop::array::uniform3(-5.0..5.0f64),
    ) {
        let s = p.shape_stats();
        prop_assert!((0.0..=1.0).contains(&s.rotondity));
        let rot = Rotation3::from_euler_angles(angles[0], angles[1], angles[2]).into_inner();
        let q = p.transformed(&rot, scale, &Vec3::from(shift));
        prop_assert!((q.shape_stats().rotondity - s.rotondity).abs() < 1e-9);
    }

    #[test]
    fn planar_rotondity_is_in_range(p in full_dim(2), angle in -3.0..3.0f64) {
        let s = p.shape_stats();
        prop_assert!((0.0..=1.0).contains(&s.rotondity));
        let rot = Rotation3::from_euler_angles(0.0, 0.0, angle).into_inner();
        let q = p.transformed(&rot, 2.5, &Vec3::new(1.0, -1.0, 0.0));
        prop_assert!((q.shape_stats().rotondity - s.rotondity).abs() < 1e-9);
    }

    #[test]
    fn cached_stats_match_recomputation(n in 2usize..=3, k in -2i32..2, angle in -1.0..1.0f64, picks in prop::collection::vec(prop::array::uniform3(0i64..3), 1..10)) {
        let mut index_set: Vec<[i64; 3]> = picks.into_iter().map(|mut z| { if n == 2 { z[2] = 0; } z }).collect();
        index_set.sort();
        index_set.dedup();
        let spec = DyadicGridSpec { index_set, ..DyadicGridSpec::block(n, 2f64.powi(k), Vec3::new(0.3, -0.2, 0.0), [1, 1, 1]) }
            .with_planar_rotation(angle);
        let c = build_dyadic(&spec).unwrap();
        let fresh = c.recompute_stats();
        prop_assert!((fresh.min_rotondity - c.stats.min_rotondity).abs() < 1e-12);
        prop_assert!((fresh.max_outer_radius - c.stats.max_outer_radius).abs() < 1e-12);
        let direct = c.faces.iter().map(|f| f.stats.rotondity).fold(f64::INFINITY, f64::min);
        prop_assert!((direct - c.stats.min_rotondity).abs() < 1e-12);
    }
}
