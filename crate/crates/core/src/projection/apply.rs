//! Images of simplicial sets under map stages.

use serde::{Deserialize, Serialize};

use super::cascade::radial_image_of;
use super::maps::MapStage;
use crate::error::{Error, Result};
use crate::geometry::clip::Piece;
use crate::geometry::{simplex_volume, Vec3, TOL};
use crate::simplicial::SimplicialSet;

pub const DEFAULT_MAP_TOL: f64 = 1e-4;
pub const MAX_SUBDIVISION_DEPTH: u32 = 12;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ApplyReport {
    /// Deepest refinement level used.
    pub levels: u32,
    /// Preimage measure of simplices whose images degenerated.
    pub collapsed: f64,
    pub measure_before: f64,
    pub measure_after: f64,
}

fn bisect(s: &[Vec3]) -> [Vec<Vec3>; 2] {
    let mut best = (0, 1);
    let mut len = -1.0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let l = (s[i] - s[j]).norm();
            if l > len {
                len = l;
                best = (i, j);
            }
        }
    }
    let mid = (s[best.0] + s[best.1]) * 0.5;
    let mut a = s.to_vec();
    let mut b = s.to_vec();
    a[best.1] = mid;
    b[best.0] = mid;
    [a, b]
}

fn image(stage: &MapStage, s: &[Vec3]) -> Result<Vec<Vec3>> {
    s.iter().map(|p| stage.eval(p)).collect()
}

/// Image of a set under one stage.
///
/// Affine stages map simplices exactly. Radial stages are projective on the
/// cone sectors of their face and are also mapped exactly. Other stages are
/// approximated by mapping vertices of a longest-edge bisection, refined
/// uniformly until the image measure changes by less than `tol` (relative)
/// between levels.
pub fn apply_map(stage: &MapStage, e: &SimplicialSet, tol: f64) -> Result<(SimplicialSet, ApplyReport)> {
    let mut out = SimplicialSet::new(e.n, e.dim);
    let mut rep = ApplyReport { measure_before: e.measure(), ..Default::default() };
    for s in &e.simplices {
        let v = s.vertices();
        let g = s.generation + 1;
        match stage {
            MapStage::Identity => out.simplices.push(s.clone()),
            _ if stage.is_affine() => {
                let img = image(stage, &v)?;
                if e.dim > 0 && simplex_volume(&img) <= TOL.geo * TOL.geo {
                    rep.collapsed += simplex_volume(&v);
                } else {
                    out.push_unchecked(&img, s.patch, g);
                }
            }
            MapStage::Radial { polyhedron, center, .. } if v.iter().all(|p| polyhedron.contains(p, TOL.geo)) => {
                let mut kept = 0.0;
                for img in radial_image_of(polyhedron, center, &Piece::from_simplex(&v))? {
                    if img.dim == e.dim {
                        kept += img.measure();
                        out.push_piece(&img, g);
                    }
                }
                if kept == 0.0 {
                    rep.collapsed += simplex_volume(&v);
                }
            }
            _ => {
                let mut level = vec![v.clone()];
                let mut prev = simplex_volume(&image(stage, &v)?);
                let scale = simplex_volume(&v);
                let mut depth = 0;
                let mut calm = 0;
                loop {
                    depth += 1;
                    if depth > MAX_SUBDIVISION_DEPTH {
                        return Err(Error::SubdivisionLimit { depth: MAX_SUBDIVISION_DEPTH as usize });
                    }
                    level = level.iter().flat_map(|t| bisect(t)).collect();
                    let mut m = 0.0;
                    for t in &level {
                        m += simplex_volume(&image(stage, t)?);
                    }
                    // Two quiet levels in a row, so a chord that happens to keep
                    // its length for one bisection does not stop the refinement.
                    if (m - prev).abs() < tol * m.max(scale * 1e-3) {
                        calm += 1;
                    } else {
                        calm = 0;
                    }
                    prev = m;
                    if calm >= 2 {
                        break;
                    }
                }
                rep.levels = rep.levels.max(depth);
                for t in &level {
                    let img = image(stage, t)?;
                    if e.dim > 0 && simplex_volume(&img) <= TOL.geo * TOL.geo {
                        rep.collapsed += simplex_volume(t);
                    } else {
                        out.push_unchecked(&img, s.patch, g);
                    }
                }
            }
        }
    }
    rep.measure_after = out.measure();
    Ok((out, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{point, Polyhedron};
    use crate::projection::maps::ConeRegion;
    use nalgebra::Matrix3;

    fn seg() -> SimplicialSet {
        SimplicialSet::polyline(2, &[point(&[0.1, 0.3]), point(&[0.8, 0.6])]).unwrap()
    }

    #[test]
    fn affine_and_identity() {
        let e = seg();
        let (id, _) = apply_map(&MapStage::Identity, &e, DEFAULT_MAP_TOL).unwrap();
        assert_eq!(id.simplices[0].points, e.simplices[0].points);
        let st = MapStage::Affine { linear: Matrix3::identity() * 2.0, translation: point(&[1.0, 0.0]) };
        let (img, rep) = apply_map(&st, &e, DEFAULT_MAP_TOL).unwrap();
        assert_eq!(rep.levels, 0);
        assert!((img.measure() - 2.0 * e.measure()).abs() < 1e-12);
    }

    #[test]
    fn radial_matches_dense_polyline() {
        let sq = Polyhedron::axis_box(2, &[0., 0.], &[1., 1.]).unwrap();
        let c = point(&[0.45, 0.55]);
        let st = MapStage::Radial { face: 0, polyhedron: sq.clone(), center: c };
        let e = seg();
        let (img, _) = apply_map(&st, &e, DEFAULT_MAP_TOL).unwrap();
        let (a, b) = (point(&[0.1, 0.3]), point(&[0.8, 0.6]));
        let steps = 1000;
        let mut oracle = 0.0;
        let mut last = st.eval(&a).unwrap();
        for i in 1..=steps {
            let q = st.eval(&(a + (b - a) * (i as f64 / steps as f64))).unwrap();
            oracle += (q - last).norm();
            last = q;
        }
        assert!((img.measure() - oracle).abs() <= DEFAULT_MAP_TOL * oracle, "{} vs {oracle}", img.measure());
    }

    #[test]
    fn magnetic_refines_and_converges() {
        let cone = ConeRegion::new(point(&[0.5, 0.5]), 0.4, 0.5, vec![point(&[1., 0.])], 2);
        let st = MapStage::Magnetic { region: cone, rho: 0.2 };
        let e = SimplicialSet::polyline(2, &[point(&[0.0, 0.55]), point(&[1.0, 0.62])]).unwrap();
        let (coarse, _) = apply_map(&st, &e, 1e-3).unwrap();
        let (fine, rep) = apply_map(&st, &e, 5e-4).unwrap();
        assert!(rep.levels >= 1);
        assert!((coarse.measure() - fine.measure()).abs() < 1e-3 * fine.measure());
    }
}
