//! Pointwise maps: magnetic projections, Lipschitz extensions and radial
//! projections, plus their composition into piecewise maps.

use nalgebra::Matrix3;

use crate::error::{Error, Result};
use crate::geometry::{Aabb, Polyhedron, Vec3, TOL};

/// Region with a distance function and a retraction onto itself.
pub trait Region {
    fn distance(&self, p: &Vec3) -> f64;
    /// Retraction onto the region, the identity on it.
    fn retract(&self, p: &Vec3) -> Vec3;
}

impl Region for Aabb {
    fn distance(&self, p: &Vec3) -> f64 {
        (self.retract(p) - p).norm()
    }

    fn retract(&self, p: &Vec3) -> Vec3 {
        p.sup(&self.min).inf(&self.max)
    }
}

/// Closed ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallRegion {
    pub center: Vec3,
    pub radius: f64,
}

impl Region for BallRegion {
    fn distance(&self, p: &Vec3) -> f64 {
        ((p - self.center).norm() - self.radius).max(0.0)
    }

    fn retract(&self, p: &Vec3) -> Vec3 {
        let v = p - self.center;
        let l = v.norm();
        if l <= self.radius {
            *p
        } else {
            self.center + v * (self.radius / l)
        }
    }
}

/// `{y in B(apex, radius) : d(y, H) <= aperture * |y - apex|}` for the
/// plane H through the apex spanned by `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeRegion {
    pub apex: Vec3,
    pub radius: f64,
    pub aperture: f64,
    /// Orthonormal basis of H's direction.
    pub basis: Vec<Vec3>,
    /// Ambient dimension.
    pub n: usize,
}

impl ConeRegion {
    pub fn new(apex: Vec3, radius: f64, aperture: f64, basis: Vec<Vec3>, n: usize) -> Self {
        ConeRegion { apex, radius, aperture, basis, n }
    }

    /// Orthogonal projection onto H.
    pub fn project_to_plane(&self, p: &Vec3) -> Vec3 {
        let v = p - self.apex;
        self.apex + self.basis.iter().map(|b| b * b.dot(&v)).fold(Vec3::zeros(), |a, x| a + x)
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let v = p - self.apex;
        let l = v.norm();
        l <= self.radius + TOL.geo && (p - self.project_to_plane(p)).norm() <= self.aperture * l + TOL.geo
    }

    /// Hausdorff distance between H ∩ K and K.
    pub fn plane_gap(&self) -> f64 {
        self.radius * self.aperture.min(1.0)
    }
}

impl ConeRegion {
    /// Nearest point of K; K is rotationally symmetric about H, so it lies in
    /// the half-plane spanned by the in-plane and normal components of p.
    pub fn nearest(&self, p: &Vec3) -> Vec3 {
        let v = p - self.apex;
        let a = self.project_to_plane(p) - self.apex;
        let b = v - a;
        let (alpha, beta) = (a.norm(), b.norm());
        let ahat = if alpha > 0.0 { a / alpha } else { self.basis[0] };
        let bhat = if beta > 0.0 { b / beta } else { Vec3::zeros() };
        let theta = self.aperture.min(1.0).asin();
        let r = (alpha * alpha + beta * beta).sqrt();
        let phi = beta.atan2(alpha);
        let (s, t) = if phi <= theta {
            if r <= self.radius {
                (alpha, beta)
            } else {
                (self.radius * phi.cos(), self.radius * phi.sin())
            }
        } else {
            let along = (r * (phi - theta).cos()).clamp(0.0, self.radius);
            (along * theta.cos(), along * theta.sin())
        };
        self.apex + ahat * s + bhat * t
    }
}

impl Region for ConeRegion {
    fn distance(&self, p: &Vec3) -> f64 {
        (self.nearest(p) - p).norm()
    }

    /// Projection onto H ∩ K followed by projection onto the convex fiber of
    /// K above that point. Unlike the nearest point this is 1-Lipschitz after
    /// composing with the orthogonal projection onto H.
    fn retract(&self, p: &Vec3) -> Vec3 {
        let a = self.project_to_plane(p) - self.apex;
        let la = a.norm();
        let q = if la > self.radius { a * (self.radius / la) } else { a };
        let lq = q.norm();
        let u = self.aperture.min(1.0);
        let cone = if u >= 1.0 { f64::INFINITY } else { u * lq / (1.0 - u * u).sqrt() };
        let fiber = cone.min((self.radius * self.radius - lq * lq).max(0.0).sqrt());
        let b = (p - self.apex) - a;
        let lb = b.norm();
        let b = if lb > fiber { b * (fiber / lb) } else { b };
        self.apex + q + b
    }
}

/// `(1 - d(x,K)/rho) f(retract(x)) + (d(x,K)/rho) x` inside the rho-ring
/// around K, `f` on K and the identity outside.
pub fn ring_extension(f: impl Fn(&Vec3) -> Vec3, k: &dyn Region, rho: f64, x: &Vec3) -> Vec3 {
    let dist = k.distance(x);
    if dist >= rho {
        return *x;
    }
    let s = dist / rho;
    f(&k.retract(x)) * (1.0 - s) + x * s
}

/// Magnetic projection onto the cone's plane: orthogonal projection on K,
/// identity outside the rho-neighbourhood of K.
pub fn magnetic_project(region: &ConeRegion, rho: f64, p: &Vec3) -> Vec3 {
    ring_extension(|q| region.project_to_plane(q), region, rho, p)
}

/// Lipschitz bound for [`magnetic_project`].
pub fn magnetic_lipschitz_bound(region: &ConeRegion, rho: f64) -> f64 {
    2.0 + region.plane_gap() / rho
}

/// Extension of `f` inside the ball `B(center, radius)` that is the identity
/// on the concentric ball of radius `ratio * radius`.
pub fn hole_extension(f: impl Fn(&Vec3) -> Vec3, center: &Vec3, radius: f64, ratio: f64, y: &Vec3) -> Vec3 {
    let v = y - center;
    let l = v.norm();
    if l <= ratio * radius {
        return *y;
    }
    if l >= radius {
        return f(y);
    }
    let pi = center + v * (radius / l);
    let u = (pi - y).norm() / (radius * (1.0 - ratio));
    y * u + f(&pi) * (1.0 - u)
}

/// Intersection of the ray from `center` through `p` with the boundary of `face`.
pub fn radial_project(face: &Polyhedron, center: &Vec3, p: &Vec3) -> Result<Vec3> {
    let dir = p - center;
    if dir.norm() <= TOL.geo {
        return Err(Error::CenterHit);
    }
    let mut t = f64::INFINITY;
    for h in &face.half_spaces {
        let den = h.normal.dot(&dir);
        if den > 1e-15 {
            t = t.min((h.offset - h.normal.dot(center)) / den);
        }
    }
    if !t.is_finite() {
        return Err(Error::UnboundedRegion);
    }
    let q = center + dir * t;
    // Points already on the boundary come back unchanged.
    if face.half_spaces.iter().any(|h| h.signed_distance(p).abs() <= TOL.geo) {
        return Ok(*p);
    }
    Ok(q)
}

/// One stage of a piecewise map.
#[derive(Clone, Debug)]
pub enum MapStage {
    Identity,
    Affine { linear: Matrix3<f64>, translation: Vec3 },
    Magnetic { region: ConeRegion, rho: f64 },
    /// Radial projection of one face from a center; identity off the face.
    Radial { face: usize, polyhedron: Polyhedron, center: Vec3 },
    Ring { region: ConeRegion, rho: f64, linear: Matrix3<f64>, translation: Vec3 },
    Hole { center: Vec3, radius: f64, ratio: f64, linear: Matrix3<f64>, translation: Vec3 },
}

impl MapStage {
    pub fn eval(&self, p: &Vec3) -> Result<Vec3> {
        Ok(match self {
            MapStage::Identity => *p,
            MapStage::Affine { linear, translation } => linear * p + translation,
            MapStage::Magnetic { region, rho } => magnetic_project(region, *rho, p),
            MapStage::Radial { polyhedron, center, .. } => {
                if polyhedron.contains(p, TOL.geo) {
                    radial_project(polyhedron, center, p)?
                } else {
                    *p
                }
            }
            MapStage::Ring { region, rho, linear, translation } => {
                ring_extension(|q| linear * q + translation, region, *rho, p)
            }
            MapStage::Hole { center, radius, ratio, linear, translation } => {
                hole_extension(|q| linear * q + translation, center, *radius, *ratio, p)
            }
        })
    }

    pub fn is_affine(&self) -> bool {
        matches!(self, MapStage::Identity | MapStage::Affine { .. })
    }

    /// Box outside of which the stage is the identity, if bounded.
    pub fn support(&self) -> Option<Aabb> {
        let ball = |c: &Vec3, r: f64| Aabb { min: c - Vec3::repeat(r), max: c + Vec3::repeat(r) };
        match self {
            MapStage::Identity => Some(Aabb { min: Vec3::repeat(f64::INFINITY), max: Vec3::repeat(f64::NEG_INFINITY) }),
            MapStage::Affine { .. } => None,
            MapStage::Magnetic { region, rho } | MapStage::Ring { region, rho, .. } => {
                Some(ball(&region.apex, region.radius + rho))
            }
            MapStage::Radial { polyhedron, .. } => Some(polyhedron.bbox()),
            MapStage::Hole { .. } => None,
        }
    }
}

/// Ordered composition of stages.
#[derive(Clone, Debug, Default)]
pub struct PiecewiseMap {
    pub stages: Vec<MapStage>,
}

impl PiecewiseMap {
    pub fn identity() -> Self {
        PiecewiseMap { stages: Vec::new() }
    }

    pub fn push(&mut self, stage: MapStage) {
        self.stages.push(stage);
    }

    pub fn eval(&self, p: &Vec3) -> Result<Vec3> {
        let mut q = *p;
        for s in &self.stages {
            q = s.eval(&q)?;
        }
        Ok(q)
    }

    /// Union of stage supports; `None` when some stage moves unbounded regions.
    pub fn support(&self) -> Option<Aabb> {
        let mut acc = Aabb { min: Vec3::repeat(f64::INFINITY), max: Vec3::repeat(f64::NEG_INFINITY) };
        for s in &self.stages {
            let b = s.support()?;
            acc = Aabb { min: acc.min.inf(&b.min), max: acc.max.sup(&b.max) };
        }
        Some(acc)
    }
}

/// Outcome of [`blend_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlendReport {
    pub sup_distance: f64,
    /// Smallest distance from a moved sample (or its images) to the domain boundary.
    pub support_clearance: f64,
    pub pass: bool,
}

/// Checks that the straight-line blend between `phi` and `f` is an admissible
/// deformation of the open box `domain`: `|phi - f|_inf < rho` on the samples
/// and the rho-neighbourhood of both supports stays inside the domain.
pub fn blend_check(phi: &PiecewiseMap, f: &PiecewiseMap, rho: f64, domain: &Aabb, samples: &[Vec3]) -> Result<BlendReport> {
    let n = (0..3).filter(|&i| domain.max[i] > domain.min[i]).count();
    let clearance = |p: &Vec3| -> f64 {
        (0..n).map(|i| (p[i] - domain.min[i]).min(domain.max[i] - p[i])).fold(f64::INFINITY, f64::min)
    };
    let mut sup: f64 = 0.0;
    let mut support_clearance = f64::INFINITY;
    for p in samples {
        let a = phi.eval(p)?;
        let b = f.eval(p)?;
        sup = sup.max((a - b).norm());
        for (img, moved) in [(a, (a - p).norm() > TOL.geo), (b, (b - p).norm() > TOL.geo)] {
            if moved {
                support_clearance = support_clearance.min(clearance(p)).min(clearance(&img));
            }
        }
    }
    let pass = sup < rho && support_clearance > rho;
    Ok(BlendReport { sup_distance: sup, support_clearance, pass })
}

/// Regular sample grid over a box, `per_axis` points along each used axis.
pub fn grid_samples(domain: &Aabb, n: usize, per_axis: usize) -> Vec<Vec3> {
    let mut out = vec![Vec3::zeros()];
    for a in 0..n {
        let mut next = Vec::with_capacity(out.len() * per_axis);
        for p in &out {
            for i in 0..per_axis {
                let mut q = *p;
                q[a] = domain.min[a] + (domain.max[a] - domain.min[a]) * (i as f64 + 0.5) / per_axis as f64;
                next.push(q);
            }
        }
        out = next;
    }
    out
}
