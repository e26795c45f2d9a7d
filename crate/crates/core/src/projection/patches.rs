//! Greedy fitting of flat cone patches to a set.

use serde::{Deserialize, Serialize};

use super::maps::ConeRegion;
use crate::geometry::{orthonormalize, Vec3};
use crate::simplicial::{Simplex, SimplicialSet};

/// Ring width of fitted patches relative to their radius.
const RING_RATIO: f64 = 0.1;
const MAX_CENTER_LEVELS: u32 = 4;

/// A ball where the set is nearly flat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatchFit {
    pub center: [f64; 3],
    /// Orthonormal basis of the tangent plane.
    pub plane: Vec<[f64; 3]>,
    pub radius: f64,
    pub aperture: f64,
    /// Ring width as a fraction of the radius.
    pub rho: f64,
    /// Fraction of the measure in the enlarged ball lying outside the cone.
    pub leakage: f64,
}

impl PatchFit {
    pub fn cone(&self, n: usize) -> ConeRegion {
        ConeRegion::new(
            Vec3::from(self.center),
            self.radius * (1.0 + self.rho),
            self.aperture,
            self.plane.iter().map(|b| Vec3::from(*b)).collect(),
            n,
        )
    }

    /// First tangent direction.
    pub fn direction(&self) -> Vec3 {
        Vec3::from(self.plane[0])
    }
}

/// Splits a simplex at edge midpoints (segments into 2, triangles into 4).
fn refine(s: &[Vec3]) -> Vec<Vec<Vec3>> {
    let m = |i: usize, j: usize| (s[i] + s[j]) * 0.5;
    match s.len() {
        2 => vec![vec![s[0], m(0, 1)], vec![m(0, 1), s[1]]],
        3 => vec![
            vec![s[0], m(0, 1), m(0, 2)],
            vec![m(0, 1), s[1], m(1, 2)],
            vec![m(0, 2), m(1, 2), s[2]],
            vec![m(0, 1), m(1, 2), m(0, 2)],
        ],
        _ => vec![s.to_vec()],
    }
}

/// Measure of `s ∩ B(x, r)` and of the part of it outside the cone,
/// estimated on a subdivision of resolution about r / 16.
fn ball_masses(s: &[Vec3], cone: &ConeRegion, depth: u32) -> (f64, f64) {
    let r = cone.radius;
    let diam = s.iter().flat_map(|a| s.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    let c = s.iter().fold(Vec3::zeros(), |a, p| a + p) / s.len() as f64;
    let dist = (c - cone.apex).norm();
    if dist - diam > r {
        return (0.0, 0.0);
    }
    let vol = crate::geometry::simplex_volume(s);
    let all_in = s.iter().all(|p| (p - cone.apex).norm() <= r);
    let flat = s.iter().all(|p| (p - cone.project_to_plane(p)).norm() <= 1e-12);
    if all_in && flat {
        return (vol, 0.0);
    }
    if diam <= r / 16.0 || depth >= 10 {
        if dist > r {
            return (0.0, 0.0);
        }
        return (vol, if cone.contains(&c) { 0.0 } else { vol });
    }
    refine(s).iter().map(|t| ball_masses(t, cone, depth + 1)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

fn tangent_basis(s: &Simplex) -> Vec<Vec3> {
    let v = s.vertices();
    let dirs: Vec<Vec3> = v[1..].iter().map(|p| p - v[0]).collect();
    orthonormalize(&dirs, 1e-12)
}

/// Greedily selects disjoint balls centered on simplex barycenters where the
/// set is flat up to leakage `epsilon`, until `max_patches` are found or the
/// balls cover a `1 - epsilon` fraction of the set.
pub fn fit_patches(e: &SimplicialSet, epsilon: f64, max_patches: usize) -> Vec<PatchFit> {
    let mut fits: Vec<PatchFit> = Vec::new();
    if e.is_empty() {
        return fits;
    }
    let total = e.measure();
    let diam = e.bbox().diagonal();
    let simplices: Vec<Vec<Vec3>> = e.simplices.iter().map(|s| s.vertices()).collect();
    let mut candidates: Vec<(Vec<Vec3>, usize)> = simplices.iter().cloned().zip(0..).collect();
    for _ in 0..MAX_CENTER_LEVELS {
        let mut order: Vec<usize> = (0..candidates.len()).collect();
        order.sort_by(|&a, &b| {
            let (ma, mb) = (crate::geometry::simplex_volume(&candidates[a].0), crate::geometry::simplex_volume(&candidates[b].0));
            mb.partial_cmp(&ma).unwrap().then(a.cmp(&b))
        });
        for i in order {
            if fits.len() >= max_patches || covered(e, &fits) >= (1.0 - epsilon) * total {
                return fits;
            }
            let (pts, owner) = &candidates[i];
            let x = pts.iter().fold(Vec3::zeros(), |a, p| a + p) / pts.len() as f64;
            let basis = tangent_basis(&e.simplices[*owner]);
            let mut r = diam / 2.0;
            while r > diam * 1e-3 {
                let outer = r * (1.0 + RING_RATIO);
                let disjoint = fits.iter().all(|f| {
                    (Vec3::from(f.center) - x).norm() >= outer + f.radius * (1.0 + f.rho)
                });
                if disjoint {
                    let cone = ConeRegion::new(x, outer, epsilon, basis.clone(), e.n);
                    let (mass, leak) = simplices
                        .iter()
                        .map(|s| ball_masses(s, &cone, 0))
                        .fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
                    if mass > 0.0 && leak <= epsilon * mass {
                        fits.push(PatchFit {
                            center: [x[0], x[1], x[2]],
                            plane: basis.iter().map(|b| [b[0], b[1], b[2]]).collect(),
                            radius: r,
                            aperture: epsilon,
                            rho: RING_RATIO,
                            leakage: leak / mass,
                        });
                        break;
                    }
                }
                r *= 0.8;
            }
        }
        candidates = candidates.iter().flat_map(|(s, o)| refine(s).into_iter().map(move |t| (t, *o))).collect();
    }
    fits
}

/// Measure of the set inside the union of the (disjoint) patch balls.
fn covered(e: &SimplicialSet, fits: &[PatchFit]) -> f64 {
    fits.iter()
        .map(|f| {
            let ball = ConeRegion::new(Vec3::from(f.center), f.radius, 1.0, vec![], e.n);
            e.simplices.iter().map(|s| ball_mass(&s.vertices(), &ball, 0)).sum::<f64>()
        })
        .sum()
}

fn ball_mass(s: &[Vec3], ball: &ConeRegion, depth: u32) -> f64 {
    let r = ball.radius;
    let diam = s.iter().flat_map(|a| s.iter().map(move |b| (a - b).norm())).fold(0.0, f64::max);
    let c = s.iter().fold(Vec3::zeros(), |a, p| a + p) / s.len() as f64;
    let dist = (c - ball.apex).norm();
    let vol = crate::geometry::simplex_volume(s);
    if dist - diam > r {
        return 0.0;
    }
    if s.iter().all(|p| (p - ball.apex).norm() <= r) {
        return vol;
    }
    if diam <= r / 16.0 || depth >= 10 {
        return if dist <= r { vol } else { 0.0 };
    }
    refine(s).iter().map(|t| ball_mass(t, ball, depth + 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn flat_triangle_is_one_patch() {
        let t = vec![point(&[0., 0., 0.]), point(&[1., 0., 0.]), point(&[0., 1., 0.])];
        let e = SimplicialSet::from_simplices(3, 2, &[t]).unwrap();
        let f = fit_patches(&e, 0.1, 1);
        assert_eq!(f.len(), 1);
        assert_eq!(f[0].leakage, 0.0);
    }

    #[test]
    fn two_distant_triangles() {
        let a = vec![point(&[0., 0., 0.]), point(&[1., 0., 0.]), point(&[0., 1., 0.])];
        let b = vec![point(&[0., 0., 10.]), point(&[1., 0., 10.]), point(&[0., 1., 10.])];
        let e = SimplicialSet::from_simplices(3, 2, &[a, b]).unwrap();
        assert_eq!(fit_patches(&e, 0.1, 2).len(), 2);
    }

    #[test]
    fn square_boundary_gets_a_patch_per_side() {
        let e = SimplicialSet::polyline(
            2,
            &[point(&[0., 0.]), point(&[1., 0.]), point(&[1., 1.]), point(&[0., 1.]), point(&[0., 0.])],
        )
        .unwrap();
        let fits = fit_patches(&e, 0.1, 4);
        assert_eq!(fits.len(), 4);
        for f in &fits {
            assert!(f.leakage <= 0.1);
        }
        let mut dirs: Vec<bool> = fits.iter().map(|f| f.direction()[0].abs() > 0.5).collect();
        dirs.sort();
        assert_eq!(dirs, vec![false, false, true, true]);
    }

    #[test]
    fn diagonal_segment_patch_spans_it() {
        let e = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 1.])]).unwrap();
        let f = fit_patches(&e, 0.1, 1);
        assert_eq!(f.len(), 1);
        assert!((f[0].radius - 2f64.sqrt() / 2.0).abs() < 1e-12);
    }
}
