use proptest::prelude::*;

use polyskel::geometry::Vec3;
use polyskel::complex::{Complex, PeriodicTopology};
use polyskel::grid::{build_dyadic, build_periodic, carve_region, merge, DyadicGridSpec, MergeConfig, Obstacle};

fn index_set(n: usize) -> impl Strategy<Value = Vec<[i64; 3]>> {
    prop::collection::vec(prop::array::uniform3(-2i64..3), 1..14).prop_map(move |mut zs| {
        if n == 2 {
            zs.iter_mut().for_each(|z| z[2] = 0);
        }
        zs.sort();
        zs.dedup();
        zs
    })
}

fn grid_spec() -> impl Strategy<Value = DyadicGridSpec> {
    (2usize..=3, -3i32..3, prop::array::uniform3(-3.0..3.0f64), -3.0..3.0f64).prop_flat_map(|(n, k, o, angle)| {
        index_set(n).prop_map(move |zs| {
            let origin = Vec3::new(o[0], o[1], if n == 3 { o[2] } else { 0.0 });
            DyadicGridSpec { index_set: zs, ..DyadicGridSpec::block(n, 2f64.powi(k), origin, [1, 1, 1]) }
                .with_planar_rotation(angle)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn built_grids_validate(spec in grid_spec()) {
        let c = build_dyadic(&spec).unwrap();
        prop_assert!(c.validate().passed());
        let expected = spec.index_set.len() as f64 * spec.stride.powi(spec.n as i32);
        prop_assert!((c.volume() - expected).abs() < 1e-9 * expected.max(1.0));
        prop_assert!((c.stats.min_rotondity - 1.0 / (spec.n as f64).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn periodic_grids_validate(m in 3usize..6, k in -1i32..2) {
        let r = 2f64.powi(k);
        let spec = DyadicGridSpec::block(2, r, Vec3::zeros(), [m, m, 1]);
        let c = build_periodic(&spec, &PeriodicTopology::new([m as f64 * r, 0.0, 0.0])).unwrap();
        prop_assert!(c.validate().passed());
        prop_assert_eq!(c.cells().len(), m * m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn planar_merges_keep_union_and_boundary(angle in 0.05..1.52f64, dx in -0.3..0.3f64, dy in -0.3..0.3f64) {
        let spec = DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [8, 8, 1]);
        let full = build_dyadic(&spec).unwrap();
        let hole = Obstacle::Box { min: [2.5, 2.5, 0.0], max: [5.5, 5.5, 0.0] };
        let outer = carve_region(&full, &[hole], 0.4).unwrap();
        let center = Vec3::new(4.0 + dx, 4.0 + dy, 0.0);
        let (s, c) = angle.sin_cos();
        // 2x2 patch of unit squares centered on `center`
        let origin = center - Vec3::new(c - s, s + c, 0.0);
        let patch = build_dyadic(
            &DyadicGridSpec { index_set: vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]], ..DyadicGridSpec::block(2, 1.0, origin, [1, 1, 1]) }
                .with_planar_rotation(angle),
        )
        .unwrap();
        let (merged, report) = merge(&outer, &[patch], &MergeConfig::default()).unwrap();
        prop_assert!(report.validity, "{:?}", report);
        prop_assert!(merged.validate().passed());
        prop_assert!((merged.volume() - 64.0).abs() < 64.0 * 1e-6);
        prop_assert!(report.boundary_preserved);
        prop_assert!(report.measured_min_rotondity >= 0.02);
        prop_assert!(report.outer_radius_ratio.is_finite() && report.outer_radius_ratio > 0.0);
        let mut merged_bd: Vec<[i64; 2]> = boundary_keys(&merged);
        let mut full_bd: Vec<[i64; 2]> = boundary_keys(&full);
        merged_bd.sort();
        full_bd.sort();
        prop_assert_eq!(merged_bd, full_bd);
    }
}

/// Boundary edges of a planar complex as doubled midpoints, for comparison
/// across complexes with different face ids.
fn boundary_keys(c: &Complex) -> Vec<[i64; 2]> {
    c.boundary_faces()
        .into_iter()
        .filter(|&f| c.face(f).dim == 1)
        .map(|f| {
            let m = c.face(f).polyhedron.centroid();
            [(m[0] * 2.0).round() as i64, (m[1] * 2.0).round() as i64]
        })
        .collect()
}
