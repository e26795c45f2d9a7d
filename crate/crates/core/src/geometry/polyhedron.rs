use std::collections::{BTreeSet, HashMap};

use super::ball::min_enclosing_ball;
use super::lp::{LinearProgram, LpOutcome};
use super::{orthogonal_complement, orthonormalize, simplex_volume, Aabb, Vec3, TOL};
use crate::error::{Error, Result};

/// Points `x` with `normal . x <= offset`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: Vec3,
    pub offset: f64,
}

impl HalfSpace {
    /// Builds a half-space from an arbitrary (nonzero) normal, rescaling to unit length.
    pub fn new(normal: Vec3, offset: f64) -> Self {
        let norm = normal.norm();
        assert!(norm > 0.0, "half-space normal must be nonzero");
        HalfSpace { normal: normal / norm, offset: offset / norm }
    }

    pub fn from_coeffs(coeffs: &[f64], offset: f64) -> Self {
        HalfSpace::new(super::point(coeffs), offset)
    }

    pub fn signed_distance(&self, p: &Vec3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    pub fn contains(&self, p: &Vec3, slack: f64) -> bool {
        self.signed_distance(p) <= slack
    }

    fn same_as(&self, other: &HalfSpace) -> bool {
        (self.normal - other.normal).norm() < 1e-9 && (self.offset - other.offset).abs() < 1e-9
    }
}

/// Affine subspace given by a base point and an orthonormal basis of its direction.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineHull {
    pub base: Vec3,
    pub basis: Vec<Vec3>,
}

impl AffineHull {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn to_local(&self, p: &Vec3) -> Vec<f64> {
        let d = p - self.base;
        self.basis.iter().map(|b| b.dot(&d)).collect()
    }

    pub fn from_local(&self, y: &[f64]) -> Vec3 {
        let mut p = self.base;
        for (b, c) in self.basis.iter().zip(y) {
            p += b * *c;
        }
        p
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, p: &Vec3) -> Vec3 {
        let y = self.to_local(p);
        self.from_local(&y)
    }

    pub fn distance(&self, p: &Vec3) -> f64 {
        (p - self.project(p)).norm()
    }
}

/// Affine hull of `points` inside R^n; the standard basis is used when full-dimensional.
pub fn affine_hull(points: &[Vec3], n: usize) -> AffineHull {
    let base = points.first().copied().unwrap_or_else(Vec3::zeros);
    let scale = points
        .iter()
        .map(|p| (p - base).norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let dirs: Vec<Vec3> = points.iter().skip(1).map(|p| p - base).collect();
    let mut basis = orthonormalize(&dirs, TOL.geo * scale);
    if basis.len() >= n {
        basis = (0..n)
            .map(|i| {
                let mut e = Vec3::zeros();
                e[i] = 1.0;
                e
            })
            .collect();
    }
    AffineHull { base, basis }
}

/// Inner radius, outer radius and rotondity of a compact set.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShapeStats {
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub rotondity: f64,
    pub inscribed_center: [f64; 3],
}

impl ShapeStats {
    pub fn center(&self) -> Vec3 {
        Vec3::from(self.inscribed_center)
    }
}

/// Compact convex polyhedron of dimension `dim` in R^`ambient_dim`, kept in
/// both half-space and vertex form. Half-spaces live in the direction space of
/// the affine hull and are inclusion-minimal.
#[derive(Clone, Debug, PartialEq)]
pub struct Polyhedron {
    pub ambient_dim: usize,
    pub dim: usize,
    pub vertices: Vec<Vec3>,
    pub half_spaces: Vec<HalfSpace>,
    pub hull: AffineHull,
}

fn dedup_points(points: &[Vec3]) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::new();
    for p in points {
        if !out.iter().any(|q| TOL.same_point(p, q)) {
            out.push(*p);
        }
    }
    out
}

fn lex_cmp(a: &Vec3, b: &Vec3) -> std::cmp::Ordering {
    for i in 0..3 {
        match a[i].partial_cmp(&b[i]).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

fn feasibility_lp(n: usize, hs: &[HalfSpace], objective: Vec<f64>) -> LpOutcome {
    let mut lp = LinearProgram::new(objective);
    for h in hs {
        lp.le((0..n).map(|i| h.normal[i]).collect(), h.offset);
    }
    lp.solve()
}

/// All extreme points of a bounded, nonempty intersection of half-spaces in R^n.
pub fn vertex_enumeration(n: usize, half_spaces: &[HalfSpace]) -> Result<Vec<Vec3>> {
    if !(1..=3).contains(&n) {
        return Err(Error::DimensionMismatch(format!("ambient dimension {n} not supported")));
    }
    if let LpOutcome::Infeasible = feasibility_lp(n, half_spaces, vec![0.0; n]) {
        return Err(Error::EmptyRegion);
    }
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut c = vec![0.0; n];
            c[i] = sign;
            if let LpOutcome::Unbounded = feasibility_lp(n, half_spaces, c) {
                return Err(Error::UnboundedRegion);
            }
        }
    }
    let m = half_spaces.len();
    let mut found: Vec<Vec3> = Vec::new();
    let mut idx: Vec<usize> = (0..n).collect();
    if m < n {
        return Err(Error::UnboundedRegion);
    }
    loop {
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        let mut b = nalgebra::DVector::<f64>::zeros(n);
        for (r, &h) in idx.iter().enumerate() {
            for c in 0..n {
                a[(r, c)] = half_spaces[h].normal[c];
            }
            b[r] = half_spaces[h].offset;
        }
        if a.determinant().abs() > 1e-12 {
            if let Some(x) = a.lu().solve(&b) {
                let p = super::point(x.as_slice());
                if half_spaces.iter().all(|h| h.contains(&p, 1e-9)) && !found.iter().any(|q| TOL.same_point(&p, q)) {
                    found.push(p);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                found.sort_by(lex_cmp);
                if found.is_empty() {
                    return Err(Error::EmptyRegion);
                }
                return Ok(found);
            }
            i -= 1;
            if idx[i] < m - n + i {
                idx[i] += 1;
                for j in i + 1..n {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Convex hull inside the local coordinates of an affine hull.
/// Returns extreme vertex indices (into `local`) and local half-spaces `(a, b)`.
fn local_hull(local: &[Vec<f64>], k: usize) -> (Vec<usize>, Vec<(Vec<f64>, f64)>) {
    let eps = 1e-10;
    match k {
        0 => (vec![0], vec![]),
        1 => {
            let (mut lo, mut hi) = (0, 0);
            for (i, y) in local.iter().enumerate() {
                if y[0] < local[lo][0] {
                    lo = i;
                }
                if y[0] > local[hi][0] {
                    hi = i;
                }
            }
            (
                vec![lo, hi],
                vec![(vec![-1.0], -local[lo][0]), (vec![1.0], local[hi][0])],
            )
        }
        2 => {
            let mut order: Vec<usize> = (0..local.len()).collect();
            order.sort_by(|&a, &b| {
                local[a][0]
                    .partial_cmp(&local[b][0])
                    .unwrap()
                    .then(local[a][1].partial_cmp(&local[b][1]).unwrap())
            });
            let cross = |o: usize, a: usize, b: usize| {
                (local[a][0] - local[o][0]) * (local[b][1] - local[o][1])
                    - (local[a][1] - local[o][1]) * (local[b][0] - local[o][0])
            };
            let mut lower: Vec<usize> = Vec::new();
            for &p in &order {
                while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= eps {
                    lower.pop();
                }
                lower.push(p);
            }
            let mut upper: Vec<usize> = Vec::new();
            for &p in order.iter().rev() {
                while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= eps {
                    upper.pop();
                }
                upper.push(p);
            }
            lower.pop();
            upper.pop();
            lower.extend(upper);
            let ring = lower;
            let mut hs = Vec::new();
            for i in 0..ring.len() {
                let a = &local[ring[i]];
                let b = &local[ring[(i + 1) % ring.len()]];
                let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
                let len = (dx * dx + dy * dy).sqrt();
                // CCW ring: outward normal is (dy, -dx)
                let nrm = vec![dy / len, -dx / len];
                let off = nrm[0] * a[0] + nrm[1] * a[1];
                hs.push((nrm, off));
            }
            (ring, hs)
        }
        3 => {
            let m = local.len();
            let v = |i: usize| Vec3::new(local[i][0], local[i][1], local[i][2]);
            let scale = local
                .iter()
                .map(|y| v(0).metric_distance(&Vec3::new(y[0], y[1], y[2])))
                .fold(0.0, f64::max)
                .max(1e-12);
            let mut planes: Vec<(Vec3, f64)> = Vec::new();
            for i in 0..m {
                for j in i + 1..m {
                    for l in j + 1..m {
                        let nrm = (v(j) - v(i)).cross(&(v(l) - v(i)));
                        if nrm.norm() < 1e-12 * scale * scale {
                            continue;
                        }
                        let mut nrm = nrm.normalize();
                        let mut off = nrm.dot(&v(i));
                        let mut pos = false;
                        let mut neg = false;
                        for q in 0..m {
                            let s = nrm.dot(&v(q)) - off;
                            if s > eps * scale {
                                pos = true;
                            }
                            if s < -eps * scale {
                                neg = true;
                            }
                        }
                        if pos && neg {
                            continue;
                        }
                        if pos {
                            nrm = -nrm;
                            off = -off;
                        }
                        if !planes
                            .iter()
                            .any(|(p, o)| (p - nrm).norm() < 1e-9 && (o - off).abs() < 1e-9 * scale)
                        {
                            planes.push((nrm, off));
                        }
                    }
                }
            }
            let mut verts = Vec::new();
            for q in 0..m {
                let tight: Vec<Vec3> = planes
                    .iter()
                    .filter(|(p, o)| (p.dot(&v(q)) - o).abs() <= eps * scale)
                    .map(|(p, _)| *p)
                    .collect();
                if orthonormalize(&tight, 1e-9).len() == 3 {
                    verts.push(q);
                }
            }
            let hs = planes
                .into_iter()
                .map(|(p, o)| (vec![p[0], p[1], p[2]], o))
                .collect();
            (verts, hs)
        }
        _ => unreachable!("dimension above 3"),
    }
}

impl Polyhedron {
    /// Polyhedron of a bounded, nonempty half-space intersection in R^n.
    /// Redundant half-spaces are pruned with one LP per constraint.
    pub fn from_half_spaces(n: usize, half_spaces: &[HalfSpace]) -> Result<Self> {
        let vertices = vertex_enumeration(n, half_spaces)?;
        let hull = affine_hull(&vertices, n);
        if hull.dim() < n {
            return Polyhedron::from_vertices(n, &vertices);
        }
        let mut hs: Vec<HalfSpace> = Vec::new();
        for h in half_spaces {
            if !hs.iter().any(|g| g.same_as(h)) {
                hs.push(*h);
            }
        }
        let mut i = 0;
        while i < hs.len() {
            let others: Vec<HalfSpace> = hs
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, h)| *h)
                .collect();
            let obj: Vec<f64> = (0..n).map(|c| hs[i].normal[c]).collect();
            let redundant = match feasibility_lp(n, &others, obj) {
                LpOutcome::Optimal { value, .. } => value <= hs[i].offset + 1e-9,
                _ => false,
            };
            if redundant {
                hs.remove(i);
            } else {
                i += 1;
            }
        }
        Ok(Polyhedron { ambient_dim: n, dim: n, vertices, half_spaces: hs, hull })
    }

    /// Convex hull of a finite point set in R^n (any dimension k <= n).
    pub fn from_vertices(n: usize, points: &[Vec3]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let pts = dedup_points(points);
        let hull = affine_hull(&pts, n);
        let k = hull.dim();
        let local: Vec<Vec<f64>> = pts.iter().map(|p| hull.to_local(p)).collect();
        let (vidx, local_hs) = local_hull(&local, k);
        let mut vertices: Vec<Vec3> = vidx.iter().map(|&i| pts[i]).collect();
        if k != 2 {
            vertices.sort_by(lex_cmp);
        }
        let half_spaces = local_hs
            .into_iter()
            .map(|(a, b)| {
                let mut normal = Vec3::zeros();
                for (coef, dir) in a.iter().zip(&hull.basis) {
                    normal += dir * *coef;
                }
                HalfSpace { normal, offset: b + normal.dot(&hull.base) }
            })
            .collect();
        Ok(Polyhedron { ambient_dim: n, dim: k, vertices, half_spaces, hull })
    }

    /// Axis-aligned box `[lo, hi]` in R^n.
    pub fn axis_box(n: usize, lo: &[f64], hi: &[f64]) -> Result<Self> {
        let mut hs = Vec::new();
        for i in 0..n {
            let mut e = Vec3::zeros();
            e[i] = 1.0;
            hs.push(HalfSpace::new(e, hi[i]));
            hs.push(HalfSpace::new(-e, -lo[i]));
        }
        Polyhedron::from_half_spaces(n, &hs)
    }

    pub fn is_singleton(&self) -> bool {
        self.dim == 0
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    pub fn centroid(&self) -> Vec3 {
        self.vertices.iter().fold(Vec3::zeros(), |a, p| a + p) / self.vertices.len() as f64
    }

    /// Membership in the polyhedron (hull and half-spaces) with slack.
    pub fn contains(&self, p: &Vec3, slack: f64) -> bool {
        self.hull.distance(p) <= slack && self.half_spaces.iter().all(|h| h.contains(p, slack))
    }

    /// Membership in the relative interior, requiring clearance `margin` from
    /// every boundary hyperplane.
    pub fn contains_relint(&self, p: &Vec3, margin: f64) -> bool {
        self.hull.distance(p) <= TOL.geo.max(margin.abs() * 1e-3)
            && self.half_spaces.iter().all(|h| h.signed_distance(p) < -margin)
    }

    /// Vertices in cyclic order for 2-dimensional polyhedra (local CCW).
    pub fn cyclic_vertices(&self) -> Vec<Vec3> {
        if self.dim != 2 {
            return self.vertices.clone();
        }
        let c = self.centroid();
        let mut v = self.vertices.clone();
        v.sort_by(|a, b| {
            let la = self.hull.to_local(&(a - c + self.hull.base));
            let lb = self.hull.to_local(&(b - c + self.hull.base));
            la[1].atan2(la[0]).partial_cmp(&lb[1].atan2(lb[0])).unwrap()
        });
        v
    }

    /// Triangulation into `dim`-simplices.
    pub fn simplices(&self) -> Vec<Vec<Vec3>> {
        match self.dim {
            0 => vec![vec![self.vertices[0]]],
            1 => vec![vec![self.vertices[0], self.vertices[1]]],
            2 => {
                let v = self.cyclic_vertices();
                (1..v.len() - 1).map(|i| vec![v[0], v[i], v[i + 1]]).collect()
            }
            3 => {
                let apex = self.vertices[0];
                let mut out = Vec::new();
                for h in &self.half_spaces {
                    if h.signed_distance(&apex).abs() <= 1e-9 {
                        continue;
                    }
                    let facet: Vec<Vec3> = self
                        .vertices
                        .iter()
                        .filter(|p| h.signed_distance(p).abs() <= 1e-9)
                        .copied()
                        .collect();
                    if let Ok(f) = Polyhedron::from_vertices(self.ambient_dim, &facet) {
                        for tri in f.simplices() {
                            out.push(vec![apex, tri[0], tri[1], tri[2]]);
                        }
                    }
                }
                out
            }
            _ => unreachable!(),
        }
    }

    /// k-dimensional measure (counting measure for a point).
    pub fn measure(&self) -> f64 {
        self.simplices().iter().map(|s| simplex_volume(s)).sum()
    }

    /// Vertex-index sets of every nonempty subface, the polyhedron itself included.
    pub fn subface_vertex_sets(&self) -> Vec<Vec<usize>> {
        let scale = self.bbox().diagonal().max(1.0);
        let tight: Vec<Vec<bool>> = self
            .vertices
            .iter()
            .map(|v| {
                self.half_spaces
                    .iter()
                    .map(|h| h.signed_distance(v).abs() <= 1e-9 * scale)
                    .collect()
            })
            .collect();
        let all: Vec<usize> = (0..self.vertices.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue = vec![all.clone()];
        seen.insert(all);
        let mut out = Vec::new();
        while let Some(face) = queue.pop() {
            for h in 0..self.half_spaces.len() {
                let sub: Vec<usize> = face.iter().copied().filter(|&v| tight[v][h]).collect();
                if !sub.is_empty() && sub.len() < face.len() && seen.insert(sub.clone()) {
                    queue.push(sub);
                }
            }
            out.push(face);
        }
        out.sort_by(|a, b| b.len().cmp(&a.len()).then(a.cmp(b)));
        out
    }

    /// Face lattice with parent/child incidence between consecutive dimensions.
    pub fn face_lattice(&self) -> FaceLattice {
        let sets = self.subface_vertex_sets();
        let mut faces: Vec<LatticeFace> = sets
            .into_iter()
            .map(|vs| {
                let pts: Vec<Vec3> = vs.iter().map(|&i| self.vertices[i]).collect();
                let poly = Polyhedron::from_vertices(self.ambient_dim, &pts)
                    .expect("subface of a valid polyhedron");
                LatticeFace {
                    dim: poly.dim,
                    vertex_indices: vs,
                    polyhedron: poly,
                    children: vec![],
                    parents: vec![],
                }
            })
            .collect();
        faces.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.vertex_indices.cmp(&b.vertex_indices)));
        let index: HashMap<Vec<usize>, usize> = faces
            .iter()
            .enumerate()
            .map(|(i, f)| (f.vertex_indices.clone(), i))
            .collect();
        let _ = index;
        for i in 0..faces.len() {
            for j in 0..faces.len() {
                if faces[j].dim + 1 == faces[i].dim
                    && faces[j]
                        .vertex_indices
                        .iter()
                        .all(|v| faces[i].vertex_indices.contains(v))
                {
                    faces[i].children.push(j);
                    faces[j].parents.push(i);
                }
            }
        }
        let mut by_dim = vec![Vec::new(); self.dim + 1];
        for (i, f) in faces.iter().enumerate() {
            by_dim[f.dim].push(i);
        }
        FaceLattice { faces, by_dim }
    }

    /// Outer radius (minimal enclosing ball), inner radius (Chebyshev center
    /// within the affine hull) and their ratio.
    pub fn shape_stats(&self) -> ShapeStats {
        if self.dim == 1 {
            let (a, b) = (self.vertices[0], self.vertices[1]);
            let c = (a + b) / 2.0;
            let r = (b - a).norm() / 2.0;
            return ShapeStats { outer_radius: r, inner_radius: r, rotondity: 1.0, inscribed_center: [c[0], c[1], c[2]] };
        }
        let ball = min_enclosing_ball(&self.vertices).expect("nonempty");
        if self.dim == 0 || ball.radius <= TOL.geo {
            let c = self.vertices[0];
            return ShapeStats {
                outer_radius: ball.radius,
                inner_radius: 0.0,
                rotondity: 1.0,
                inscribed_center: [c[0], c[1], c[2]],
            };
        }
        let k = self.dim;
        let mut lp = LinearProgram::new({
            let mut c = vec![0.0; k + 1];
            c[k] = 1.0;
            c
        });
        for h in &self.half_spaces {
            let a: Vec<f64> = self.hull.basis.iter().map(|b| h.normal.dot(b)).collect();
            let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let rhs = h.offset - h.normal.dot(&self.hull.base);
            let mut row = a;
            row.push(norm);
            lp.le(row, rhs);
        }
        let (inner, center) = match lp.solve() {
            LpOutcome::Optimal { x, value } => (value.max(0.0), self.hull.from_local(&x[..k])),
            _ => (0.0, self.centroid()),
        };
        ShapeStats {
            outer_radius: ball.radius,
            inner_radius: inner,
            rotondity: (inner / ball.radius).clamp(0.0, 1.0),
            inscribed_center: [center[0], center[1], center[2]],
        }
    }

    /// Image under `x -> scale * rotation * x + translation`.
    pub fn transformed(&self, rotation: &nalgebra::Matrix3<f64>, scale: f64, translation: &Vec3) -> Polyhedron {
        let pts: Vec<Vec3> = self
            .vertices
            .iter()
            .map(|p| rotation * p * scale + translation)
            .collect();
        Polyhedron::from_vertices(self.ambient_dim, &pts).expect("similar image of a polyhedron")
    }

    /// Directions orthogonal to the affine hull inside R^n.
    pub fn normal_space(&self) -> Vec<Vec3> {
        orthogonal_complement(&self.hull.basis, self.ambient_dim)
    }

    /// Euclidean distance from `p` to the polyhedron.
    pub fn distance_to(&self, p: &Vec3) -> f64 {
        if self.contains(p, 0.0) {
            return 0.0;
        }
        match self.dim {
            0 => (p - self.vertices[0]).norm(),
            1 => super::point_segment_distance(p, &self.vertices[0], &self.vertices[1]),
            _ => {
                // nearest point of the hull-projection if inside, else on a facet
                let q = self.hull.project(p);
                if self.half_spaces.iter().all(|h| h.contains(&q, 0.0)) {
                    return (p - q).norm();
                }
                self.simplices()
                    .iter()
                    .flat_map(|s| simplex_facets(s))
                    .map(|f| super::point_simplex_distance(p, &f))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }
}

fn simplex_facets(s: &[Vec3]) -> Vec<Vec<Vec3>> {
    (0..s.len())
        .map(|skip| s.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, p)| *p).collect())
        .collect()
}

/// Distance between two convex polyhedra of dimension at most 3.
pub fn polyhedron_distance(a: &Polyhedron, b: &Polyhedron) -> f64 {
    if intersects(a, b) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for v in &a.vertices {
        best = best.min(b.distance_to(v));
    }
    for v in &b.vertices {
        best = best.min(a.distance_to(v));
    }
    let edges = |p: &Polyhedron| -> Vec<(Vec3, Vec3)> {
        if p.dim < 1 {
            return vec![];
        }
        let mut out = Vec::new();
        for s in p.simplices() {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    out.push((s[i], s[j]));
                }
            }
        }
        out
    };
    let ea = edges(a);
    let eb = edges(b);
    for (p, q) in &ea {
        for (r, s) in &eb {
            best = best.min(super::segment_segment_distance(p, q, r, s));
        }
    }
    best
}

/// Whether two polyhedra share at least one point (LP feasibility).
pub fn intersects(a: &Polyhedron, b: &Polyhedron) -> bool {
    let n = a.ambient_dim.max(b.ambient_dim);
    let mut lp = LinearProgram::new(vec![0.0; n]);
    for p in [a, b] {
        for h in &p.half_spaces {
            lp.le((0..n).map(|i| h.normal[i]).collect(), h.offset + 1e-12);
        }
        for u in p.normal_space() {
            lp.eq((0..n).map(|i| u[i]).collect(), u.dot(&p.hull.base));
        }
    }
    !matches!(lp.solve(), LpOutcome::Infeasible)
}

/// One subface inside a [`FaceLattice`].
#[derive(Clone, Debug)]
pub struct LatticeFace {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    pub polyhedron: Polyhedron,
    /// Indices of faces one dimension lower contained in this face.
    pub children: Vec<usize>,
    /// Indices of faces one dimension higher containing this face.
    pub parents: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    pub faces: Vec<LatticeFace>,
    pub by_dim: Vec<Vec<usize>>,
}

impl FaceLattice {
    pub fn count(&self, dim: usize) -> usize {
        self.by_dim.get(dim).map_or(0, |v| v.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(|v| v.len()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    fn unit_square() -> Polyhedron {
        Polyhedron::axis_box(2, &[0., 0.], &[1., 1.]).unwrap()
    }

    #[test]
    fn square_vertices() {
        let hs = vec![
            HalfSpace::from_coeffs(&[1., 0.], 1.),
            HalfSpace::from_coeffs(&[-1., 0.], 0.),
            HalfSpace::from_coeffs(&[0., 1.], 1.),
            HalfSpace::from_coeffs(&[0., -1.], 0.),
        ];
        let v = vertex_enumeration(2, &hs).unwrap();
        assert_eq!(v.len(), 4);
        for c in [[0., 0.], [1., 0.], [0., 1.], [1., 1.]] {
            assert!(v.iter().any(|p| TOL.same_point(p, &point(&c))));
        }
    }

    #[test]
    fn cube_corners() {
        let cube = Polyhedron::axis_box(3, &[0., 0., 0.], &[1., 1., 1.]).unwrap();
        assert_eq!(cube.vertices.len(), 8);
        assert_eq!(cube.half_spaces.len(), 6);
    }

    #[test]
    fn simplex_vertices() {
        let hs = vec![
            HalfSpace::from_coeffs(&[-1., 0.], 0.),
            HalfSpace::from_coeffs(&[0., -1.], 0.),
            HalfSpace::from_coeffs(&[1., 1.], 1.),
        ];
        let v = vertex_enumeration(2, &hs).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn unbounded_and_empty() {
        let hs = vec![HalfSpace::from_coeffs(&[1., 0.], 1.), HalfSpace::from_coeffs(&[0., 1.], 1.)];
        assert!(matches!(vertex_enumeration(2, &hs), Err(Error::UnboundedRegion)));
        let hs = vec![
            HalfSpace::from_coeffs(&[1., 0.], 0.),
            HalfSpace::from_coeffs(&[-1., 0.], -1.),
            HalfSpace::from_coeffs(&[0., 1.], 1.),
            HalfSpace::from_coeffs(&[0., -1.], 1.),
        ];
        assert!(matches!(vertex_enumeration(2, &hs), Err(Error::EmptyRegion)));
    }

    #[test]
    fn redundant_constraints_are_pruned() {
        let hs = vec![
            HalfSpace::from_coeffs(&[1., 0.], 1.),
            HalfSpace::from_coeffs(&[-1., 0.], 0.),
            HalfSpace::from_coeffs(&[0., 1.], 1.),
            HalfSpace::from_coeffs(&[0., -1.], 0.),
            HalfSpace::from_coeffs(&[1., 1.], 5.),
            HalfSpace::from_coeffs(&[1., 0.], 1.),
        ];
        let p = Polyhedron::from_half_spaces(2, &hs).unwrap();
        assert_eq!(p.half_spaces.len(), 4);
    }

    #[test]
    fn lattice_counts() {
        assert_eq!(unit_square().face_lattice().counts(), vec![4, 4, 1]);
        let cube = Polyhedron::axis_box(3, &[0., 0., 0.], &[1., 1., 1.]).unwrap();
        assert_eq!(cube.face_lattice().counts(), vec![8, 12, 6, 1]);
        let tri = Polyhedron::from_vertices(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[0., 1.])]).unwrap();
        assert_eq!(tri.face_lattice().counts(), vec![3, 3, 1]);
    }

    #[test]
    fn each_facet_on_one_half_space() {
        let cube = Polyhedron::axis_box(3, &[0., 0., 0.], &[1., 1., 1.]).unwrap();
        let lat = cube.face_lattice();
        for &f in &lat.by_dim[2] {
            let face = &lat.faces[f];
            let hits = cube
                .half_spaces
                .iter()
                .filter(|h| face.polyhedron.vertices.iter().all(|v| h.signed_distance(v).abs() < 1e-9))
                .count();
            assert_eq!(hits, 1);
        }
    }

    #[test]
    fn shape_stats_examples() {
        let s = unit_square().shape_stats();
        assert!((s.outer_radius - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((s.inner_radius - 0.5).abs() < 1e-9);
        assert!((s.rotondity - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        let h = 3f64.sqrt() / 2.0;
        let tri = Polyhedron::from_vertices(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[0.5, h])]).unwrap();
        assert!((tri.shape_stats().rotondity - 0.5).abs() < 1e-9);
        let single = Polyhedron::from_vertices(2, &[point(&[0.3, 0.2])]).unwrap();
        assert_eq!(single.shape_stats().rotondity, 1.0);
    }

    #[test]
    fn lower_dimensional_stats() {
        // a unit square face in R^3 has rotondity 1/sqrt(2) inside its own plane
        let f = Polyhedron::from_vertices(
            3,
            &[point(&[0., 0., 1.]), point(&[1., 0., 1.]), point(&[0., 1., 1.]), point(&[1., 1., 1.])],
        )
        .unwrap();
        assert_eq!(f.dim, 2);
        let s = f.shape_stats();
        assert!((s.rotondity - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        let e = Polyhedron::from_vertices(3, &[point(&[0., 0., 0.]), point(&[0., 0., 2.])]).unwrap();
        assert!((e.shape_stats().rotondity - 1.0).abs() < 1e-9);
    }

    #[test]
    fn measures() {
        assert!((unit_square().measure() - 1.0).abs() < 1e-12);
        let cube = Polyhedron::axis_box(3, &[0., 0., 0.], &[2., 1., 1.]).unwrap();
        assert!((cube.measure() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn distances() {
        let a = unit_square();
        let b = Polyhedron::axis_box(2, &[3., 0.], &[4., 1.]).unwrap();
        assert!((polyhedron_distance(&a, &b) - 2.0).abs() < 1e-12);
        let c = Polyhedron::axis_box(2, &[0.5, 0.5], &[2., 2.]).unwrap();
        assert_eq!(polyhedron_distance(&a, &c), 0.0);
        assert!((a.distance_to(&point(&[2., 2.])) - 2f64.sqrt()).abs() < 1e-12);
    }
}
