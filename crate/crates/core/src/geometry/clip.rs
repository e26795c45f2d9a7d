//! Clipping of low-dimensional convex pieces (points, segments, planar
//! polygons) by half-spaces, and convex set differences between pieces.

use super::{simplex_volume, HalfSpace, Vec3, TOL};

/// Convex piece of dimension 0, 1 or 2 embedded in R^3.
/// Polygons keep their vertices in cyclic order.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub dim: usize,
    pub points: Vec<Vec3>,
}

impl Piece {
    pub fn new(dim: usize, points: Vec<Vec3>) -> Self {
        Piece { dim, points }
    }

    /// Piece spanned by a simplex given as `dim + 1` points.
    pub fn from_simplex(points: &[Vec3]) -> Self {
        Piece { dim: points.len() - 1, points: points.to_vec() }
    }

    pub fn measure(&self) -> f64 {
        match self.dim {
            0 => 1.0,
            1 => (self.points[1] - self.points[0]).norm(),
            _ => self.triangles().iter().map(|t| simplex_volume(t)).sum(),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        match self.dim {
            2 => {
                let mut acc = Vec3::zeros();
                let mut area = 0.0;
                for t in self.triangles() {
                    let a = simplex_volume(&t);
                    acc += (t[0] + t[1] + t[2]) / 3.0 * a;
                    area += a;
                }
                if area > 0.0 {
                    acc / area
                } else {
                    self.vertex_mean()
                }
            }
            _ => self.vertex_mean(),
        }
    }

    pub fn vertex_mean(&self) -> Vec3 {
        self.points.iter().fold(Vec3::zeros(), |a, p| a + p) / self.points.len() as f64
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                d = d.max((self.points[i] - self.points[j]).norm());
            }
        }
        d
    }

    /// Fan triangulation of a polygon; segments and points return themselves.
    pub fn triangles(&self) -> Vec<Vec<Vec3>> {
        if self.dim < 2 {
            return vec![self.points.clone()];
        }
        let p = &self.points;
        (1..p.len() - 1).map(|i| vec![p[0], p[i], p[i + 1]]).collect()
    }

    /// Simplices of dimension `dim` covering the piece.
    pub fn simplices(&self) -> Vec<Vec<Vec3>> {
        self.triangles()
    }

    /// Unit normal of a polygon's plane.
    pub fn plane_normal(&self) -> Option<Vec3> {
        if self.dim != 2 {
            return None;
        }
        let c = self.vertex_mean();
        let mut acc = Vec3::zeros();
        for i in 0..self.points.len() {
            let a = self.points[i] - c;
            let b = self.points[(i + 1) % self.points.len()] - c;
            acc += a.cross(&b);
        }
        let n = acc.norm();
        (n > 0.0).then(|| acc / n)
    }

    /// Half-spaces cutting the piece out of its own affine hull.
    pub fn in_hull_half_spaces(&self) -> Vec<HalfSpace> {
        match self.dim {
            1 => {
                let t = (self.points[1] - self.points[0]).normalize();
                vec![
                    HalfSpace { normal: -t, offset: -t.dot(&self.points[0]) },
                    HalfSpace { normal: t, offset: t.dot(&self.points[1]) },
                ]
            }
            2 => {
                let Some(nrm) = self.plane_normal() else { return vec![] };
                let c = self.vertex_mean();
                let k = self.points.len();
                let mut out = Vec::with_capacity(k);
                for i in 0..k {
                    let a = self.points[i];
                    let b = self.points[(i + 1) % k];
                    let m = (b - a).cross(&nrm);
                    let len = m.norm();
                    if len <= TOL.geo {
                        continue;
                    }
                    let mut m = m / len;
                    if m.dot(&(c - a)) > 0.0 {
                        m = -m;
                    }
                    out.push(HalfSpace { normal: m, offset: m.dot(&a) });
                }
                out
            }
            _ => vec![],
        }
    }

    pub fn is_degenerate(&self) -> bool {
        match self.dim {
            0 => false,
            1 => self.measure() <= TOL.geo,
            _ => {
                if self.points.len() < 3 {
                    return true;
                }
                let d = self.diameter();
                d <= TOL.geo || self.measure() <= 1e-12 * d * d
            }
        }
    }
}

fn flip(h: &HalfSpace) -> HalfSpace {
    HalfSpace { normal: -h.normal, offset: -h.offset }
}

fn dedup_cyclic(points: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(points.len());
    for p in points {
        if out.last().is_none_or(|q| !TOL.same_point(&p, q)) {
            out.push(p);
        }
    }
    while out.len() > 1 && TOL.same_point(&out[0], out.last().unwrap()) {
        out.pop();
    }
    out
}

/// Part of `piece` on the side `normal . x <= offset` (within tolerance);
/// `None` when that part is empty or degenerate.
pub fn clip(piece: &Piece, h: &HalfSpace) -> Option<Piece> {
    let eps = TOL.geo;
    match piece.dim {
        0 => (h.signed_distance(&piece.points[0]) <= eps).then(|| piece.clone()),
        1 => {
            let (a, b) = (piece.points[0], piece.points[1]);
            let (da, db) = (h.signed_distance(&a), h.signed_distance(&b));
            if da <= eps && db <= eps {
                return Some(piece.clone());
            }
            if da > eps && db > eps {
                return None;
            }
            let x = a + (b - a) * (da / (da - db));
            let out = if da > eps { Piece::new(1, vec![x, b]) } else { Piece::new(1, vec![a, x]) };
            (!out.is_degenerate()).then_some(out)
        }
        _ => {
            let p = &piece.points;
            let k = p.len();
            let dist: Vec<f64> = p.iter().map(|q| h.signed_distance(q)).collect();
            if dist.iter().all(|&d| d <= eps) {
                return Some(piece.clone());
            }
            if dist.iter().all(|&d| d > -eps) {
                return None;
            }
            let mut out = Vec::with_capacity(k + 2);
            for i in 0..k {
                let j = (i + 1) % k;
                let (dc, dn) = (dist[i], dist[j]);
                if dc <= eps {
                    out.push(p[i]);
                }
                if (dc < -eps && dn > eps) || (dc > eps && dn < -eps) {
                    out.push(p[i] + (p[j] - p[i]) * (dc / (dc - dn)));
                }
            }
            let out = Piece::new(2, dedup_cyclic(out));
            (!out.is_degenerate()).then_some(out)
        }
    }
}

/// Successive clipping against every half-space.
pub fn clip_all(piece: &Piece, half_spaces: &[HalfSpace]) -> Option<Piece> {
    let mut cur = piece.clone();
    for h in half_spaces {
        cur = clip(&cur, h)?;
    }
    Some(cur)
}

/// `region \ cutter` as a list of convex pieces; both must share an affine hull.
pub fn difference(region: &Piece, cutter: &Piece) -> Vec<Piece> {
    let mut out = Vec::new();
    let mut rest = region.clone();
    for h in cutter.in_hull_half_spaces() {
        if let Some(outside) = clip(&rest, &flip(&h)) {
            out.push(outside);
        }
        match clip(&rest, &h) {
            Some(inside) => rest = inside,
            None => return out,
        }
    }
    out
}

/// `region` minus the union of `cutters`.
pub fn difference_all(region: &Piece, cutters: &[Piece]) -> Vec<Piece> {
    let mut pieces = vec![region.clone()];
    for c in cutters {
        let mut next = Vec::new();
        for p in &pieces {
            next.extend(difference(p, c));
        }
        pieces = next;
        if pieces.is_empty() {
            break;
        }
    }
    pieces
}
