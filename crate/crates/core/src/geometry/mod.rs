//! Convex polyhedra in R^2 and R^3, their face lattices and shape statistics.
//!
//! Points are stored as `Vec3` for both ambient dimensions; planar data keeps
//! `z = 0` and carries its ambient dimension explicitly.

pub mod ball;
pub mod clip;
pub mod lp;
mod polyhedron;

pub use polyhedron::{
    affine_hull, intersects, polyhedron_distance, vertex_enumeration, AffineHull, FaceLattice,
    HalfSpace, LatticeFace, Polyhedron, ShapeStats,
};

pub type Vec3 = nalgebra::Vector3<f64>;

/// Single tolerance policy for coordinate comparisons, deduplication and
/// membership tests.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub geo: f64,
}

pub const TOL: Tolerance = Tolerance { geo: 1e-9 };

impl Tolerance {
    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.geo
    }

    pub fn le(&self, a: f64, b: f64) -> bool {
        a <= b + self.geo
    }

    pub fn same_point(&self, a: &Vec3, b: &Vec3) -> bool {
        (a - b).norm() <= self.geo
    }
}

pub fn point(coords: &[f64]) -> Vec3 {
    let mut p = Vec3::zeros();
    for (i, c) in coords.iter().take(3).enumerate() {
        p[i] = *c;
    }
    p
}

/// Gram-Schmidt on `vectors`, dropping directions with residual below `eps`.
pub fn orthonormalize(vectors: &[Vec3], eps: f64) -> Vec<Vec3> {
    let mut basis: Vec<Vec3> = Vec::new();
    for v in vectors {
        let mut w = *v;
        for b in &basis {
            w -= b * b.dot(&w);
        }
        // second pass for numerical stability
        for b in &basis {
            w -= b * b.dot(&w);
        }
        let norm = w.norm();
        if norm > eps {
            basis.push(w / norm);
            if basis.len() == 3 {
                break;
            }
        }
    }
    basis
}

/// Orthonormal completion of `basis` inside the first `n` coordinates.
pub fn orthogonal_complement(basis: &[Vec3], n: usize) -> Vec<Vec3> {
    let mut all: Vec<Vec3> = basis.to_vec();
    let mut out = Vec::new();
    for i in 0..n {
        let mut e = Vec3::zeros();
        e[i] = 1.0;
        let mut w = e;
        for b in &all {
            w -= b * b.dot(&w);
        }
        for b in &all {
            w -= b * b.dot(&w);
        }
        let norm = w.norm();
        if norm > 1e-6 {
            let u = w / norm;
            all.push(u);
            out.push(u);
        }
    }
    out
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn from_points<'a>(pts: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut min = Vec3::repeat(f64::INFINITY);
        let mut max = Vec3::repeat(f64::NEG_INFINITY);
        for p in pts {
            min = min.inf(p);
            max = max.sup(p);
        }
        Aabb { min, max }
    }

    pub fn overlaps(&self, other: &Aabb, slack: f64) -> bool {
        (0..3).all(|i| self.min[i] <= other.max[i] + slack && other.min[i] <= self.max[i] + slack)
    }

    pub fn contains(&self, p: &Vec3, slack: f64) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] - slack && p[i] <= self.max[i] + slack)
    }

    pub fn diagonal(&self) -> f64 {
        (self.max - self.min).norm()
    }
}

/// d-dimensional volume of the simplex spanned by `pts` (d = pts.len() - 1).
pub fn simplex_volume(pts: &[Vec3]) -> f64 {
    match pts.len() {
        0 => 0.0,
        1 => 1.0,
        2 => (pts[1] - pts[0]).norm(),
        3 => 0.5 * (pts[1] - pts[0]).cross(&(pts[2] - pts[0])).norm(),
        4 => (pts[1] - pts[0]).dot(&(pts[2] - pts[0]).cross(&(pts[3] - pts[0]))).abs() / 6.0,
        _ => panic!("simplex with {} vertices", pts.len()),
    }
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Distance from `p` to the triangle `abc` in R^3.
pub fn point_triangle_distance(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let n = (b - a).cross(&(c - a));
    let nn = n.norm();
    if nn < 1e-300 {
        return point_segment_distance(p, a, b)
            .min(point_segment_distance(p, b, c))
            .min(point_segment_distance(p, a, c));
    }
    let n = n / nn;
    let q = p - n * n.dot(&(p - a));
    let inside = [(a, b), (b, c), (c, a)]
        .iter()
        .all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= -1e-15);
    if inside {
        (p - q).norm()
    } else {
        point_segment_distance(p, a, b)
            .min(point_segment_distance(p, b, c))
            .min(point_segment_distance(p, a, c))
    }
}

/// Distance from `p` to a simplex of 1, 2 or 3 vertices.
pub fn point_simplex_distance(p: &Vec3, s: &[Vec3]) -> f64 {
    match s.len() {
        1 => (p - s[0]).norm(),
        2 => point_segment_distance(p, &s[0], &s[1]),
        3 => point_triangle_distance(p, &s[0], &s[1], &s[2]),
        _ => panic!("unsupported simplex size {}", s.len()),
    }
}

/// Closest distance between segments `[a, b]` and `[c, d]`.
pub fn segment_segment_distance(a: &Vec3, b: &Vec3, c: &Vec3, d: &Vec3) -> f64 {
    let u = b - a;
    let v = d - c;
    let w = a - c;
    let aa = u.dot(&u);
    let bb = u.dot(&v);
    let cc = v.dot(&v);
    let dd = u.dot(&w);
    let ee = v.dot(&w);
    let den = aa * cc - bb * bb;
    let mut best = point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b));
    if den > 1e-18 * aa.max(1e-300) * cc.max(1e-300) {
        let s = (bb * ee - cc * dd) / den;
        let t = (aa * ee - bb * dd) / den;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            best = best.min((a + u * s - (c + v * t)).norm());
        }
    }
    best
}
