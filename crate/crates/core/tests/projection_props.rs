use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyskel::geometry::{point, Polyhedron, Vec3};
use polyskel::grid::{build_dyadic, DyadicGridSpec};
use polyskel::projection::{
    apply_map, erode, ff_cascade, magnetic_lipschitz_bound, magnetic_project, optimal_center, radial_project,
    CascadeConfig, ConeRegion, MapStage,
};
use polyskel::simplicial::SimplicialSet;

fn unit(v: Vec3) -> Vec3 {
    v / v.norm()
}

#[test]
fn magnetic_projection_respects_its_lipschitz_bound() {
    let configs = [
        (2, 1.0, 0.3, 0.25, vec![point(&[1.0, 0.0])]),
        (2, 0.5, 0.8, 0.1, vec![unit(point(&[1.0, 1.0]))]),
        (3, 1.0, 0.4, 0.2, vec![point(&[1.0, 0.0, 0.0]), point(&[0.0, 1.0, 0.0])]),
        (3, 2.0, 0.2, 0.5, vec![unit(point(&[1.0, 2.0, 0.0]))]),
    ];
    for (k, (n, radius, aperture, rho, basis)) in configs.into_iter().enumerate() {
        let cone = ConeRegion::new(Vec3::zeros(), radius, aperture, basis, n);
        let bound = magnetic_lipschitz_bound(&cone, rho);
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let reach = radius + 2.0 * rho;
        let sample = |rng: &mut ChaCha8Rng| {
            let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-reach..reach)).collect();
            point(&c)
        };
        let mut worst: f64 = 0.0;
        for i in 0..100_000 {
            let p = sample(&mut rng);
            // half of the pairs are close together to probe local stretching
            let q = if i % 2 == 0 {
                sample(&mut rng)
            } else {
                let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.01..0.01)).collect();
                p + point(&c)
            };
            let d = (p - q).norm();
            if d > 1e-9 {
                worst = worst.max((magnetic_project(&cone, rho, &p) - magnetic_project(&cone, rho, &q)).norm() / d);
            }
        }
        assert!(worst <= bound + 1e-6, "config {k}: {worst} > {bound}");
    }
}

fn polytope(n: usize) -> impl Strategy<Value = Polyhedron> {
    prop::collection::vec(prop::collection::vec(-1.0..1.0f64, n), n + 2..n + 8).prop_filter_map("thin hull", move |pts| {
        let pts: Vec<Vec3> = pts.iter().map(|p| point(p)).collect();
        Polyhedron::from_vertices(n, &pts).ok().filter(|p| p.dim == n && p.shape_stats().rotondity > 0.1)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn radial_projection_lands_on_the_boundary(p in polytope(3), seed in any::<u64>()) {
        let s = p.shape_stats();
        let (r, rot) = (s.inner_radius, s.rotondity);
        let diam = 2.0 * s.outer_radius;
        let bound = 4.0 / rot * diam / r;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lo = p.bbox().min;
        let hi = p.bbox().max;
        let offset = loop {
            let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if v.norm() <= 1.0 {
                break v * (r / 2.0);
            }
        };
        let center = s.center() + offset;
        let mut inside = Vec::new();
        while inside.len() < 400 {
            let q = Vec3::new(rng.gen_range(lo[0]..hi[0]), rng.gen_range(lo[1]..hi[1]), rng.gen_range(lo[2]..hi[2]));
            if p.contains(&q, 0.0) && (q - center).norm() >= r / 4.0 {
                inside.push(q);
            }
        }
        let images: Vec<Vec3> = inside.iter().map(|q| radial_project(&p, &center, q).unwrap()).collect();
        for img in &images {
            let depth = p.half_spaces.iter().map(|h| h.signed_distance(img)).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(depth.abs() < 1e-9);
        }
        let mut worst: f64 = 0.0;
        for i in 0..inside.len() {
            for j in i + 1..inside.len() {
                let d = (inside[i] - inside[j]).norm();
                if d > 1e-9 {
                    worst = worst.max((images[i] - images[j]).norm() / d);
                }
            }
        }
        prop_assert!(worst <= bound, "{} > {}", worst, bound);
    }

    #[test]
    fn optimal_center_is_at_most_twice_the_mean(p in polytope(2), seed in any::<u64>(), a in prop::array::uniform2(-0.5..0.5f64), b in prop::array::uniform2(-0.5..0.5f64)) {
        let c = p.shape_stats().center();
        let e = SimplicialSet::polyline(2, &[c + point(&a) * 0.5, c + point(&b) * 0.5]);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        prop_assume!(e.measure() > 1e-6);
        if let Ok(choice) = optimal_center(&p, &e, seed) {
            prop_assert!(choice.measure <= 2.0 * choice.mean);
        }
    }

    #[test]
    fn halving_the_tolerance_refines_within_the_old_one(
        angle in 0.1..1.4f64,
        aperture in 0.2..0.9f64,
        y0 in 0.3..0.7f64,
        y1 in 0.3..0.7f64,
    ) {
        let cone = ConeRegion::new(point(&[0.5, 0.5]), 0.4, aperture, vec![point(&[angle.cos(), angle.sin()])], 2);
        let stage = MapStage::Magnetic { region: cone, rho: 0.2 };
        let e = SimplicialSet::polyline(2, &[point(&[0.0, y0]), point(&[1.0, y1])]).unwrap();
        let tol = 1e-3;
        let (coarse, _) = apply_map(&stage, &e, tol).unwrap();
        let (fine, _) = apply_map(&stage, &e, tol / 2.0).unwrap();
        prop_assert!((coarse.measure() - fine.measure()).abs() < tol * fine.measure().max(1.0));
    }
}

fn cube_grid() -> polyskel::complex::Complex {
    build_dyadic(&DyadicGridSpec::block(3, 0.5, Vec3::zeros(), [3, 3, 3])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cascade_is_idempotent_and_erosion_is_a_fixed_point(
        d in 1usize..=2,
        pts in prop::collection::vec(prop::array::uniform3(0.02..1.48f64), 3),
        seed in any::<u64>(),
    ) {
        let c = cube_grid();
        let simplex: Vec<Vec3> = pts[..=d].iter().map(|p| Vec3::from(*p)).collect();
        let e = SimplicialSet::from_simplices(3, d, &[simplex]);
        prop_assume!(e.is_ok());
        let e = e.unwrap();
        prop_assume!(e.measure() > 1e-4);
        let cfg = CascadeConfig { seed, ..Default::default() };
        let once = ff_cascade(&c, &e, d, &cfg).unwrap();
        prop_assert!(once.carried.iter().all(|p| c.face(p.face).dim <= d));
        let twice = ff_cascade(&c, &once.set, d, &cfg).unwrap();
        prop_assert!((twice.set.measure() - once.set.measure()).abs() <= 1e-9 * once.set.measure().max(1.0));
        prop_assert!(twice.ledger.iter().all(|l| (l.ratio - 1.0).abs() <= 1e-9));

        let er = erode(&c, &once.set, d).unwrap();
        prop_assert!(er.measure_after <= er.measure_before + 1e-9);
        prop_assert!(er.skeleton.face_ids.iter().all(|&f| c.face(f).dim == d));
        let again = erode(&c, &er.skeleton.to_set(&c), d).unwrap();
        prop_assert_eq!(again.skeleton, er.skeleton);
    }
}
