//! Polyhedral complexes: a deduplicated store of subfaces shared between
//! equal-dimensional cells, with incidence, shape statistics and validation.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lp::{LinearProgram, LpOutcome};
use crate::geometry::{affine_hull, Aabb, Polyhedron, ShapeStats, Vec3, TOL};

pub type FaceId = usize;

/// Translation-periodic identification on some axes. A zero period leaves
/// the axis open.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicTopology {
    pub period: [f64; 3],
    pub origin: [f64; 3],
}

impl PeriodicTopology {
    pub fn new(period: [f64; 3]) -> Self {
        PeriodicTopology { period, origin: [0.0; 3] }
    }

    /// Representative of `p` in the fundamental domain and the lattice shift
    /// `k` such that `p = reduced + k * period`.
    pub fn reduce(&self, p: &Vec3) -> (Vec3, [i64; 3]) {
        let mut q = *p;
        let mut k = [0i64; 3];
        for i in 0..3 {
            let per = self.period[i];
            if per <= 0.0 {
                continue;
            }
            let t = (p[i] - self.origin[i]) / per;
            let mut f = t.floor();
            let frac = (t - f) * per;
            if per - frac <= TOL.geo {
                f += 1.0;
            }
            k[i] = f as i64;
            q[i] = p[i] - f * per;
            if (q[i] - self.origin[i]).abs() <= TOL.geo {
                q[i] = self.origin[i];
            }
        }
        (q, k)
    }
}

/// Subface of a complex.
#[derive(Clone, Debug)]
pub struct Face {
    pub dim: usize,
    /// Sorted global vertex ids (periodic complexes use reduced vertices).
    pub vertices: Vec<usize>,
    /// Identification key: vertex ids with lattice shifts relative to the face representative.
    pub key: Vec<(usize, [i64; 3])>,
    pub polyhedron: Polyhedron,
    pub stats: ShapeStats,
    pub measure: f64,
    /// Faces one dimension lower in this face's boundary.
    pub children: Vec<FaceId>,
    /// Faces one dimension higher containing this face.
    pub parents: Vec<FaceId>,
    /// Top-dimensional cells containing this face.
    pub cells: Vec<FaceId>,
    /// Number of (cell, subface) incidences; exceeds `cells.len()` when a
    /// periodic cell meets itself.
    pub incidence: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexStats {
    pub max_outer_radius: f64,
    pub min_inner_radius: f64,
    pub min_rotondity: f64,
}

/// Outcome of [`Complex::validate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    /// Face pairs whose relative interiors intersect.
    pub face_violations: Vec<(FaceId, FaceId)>,
    /// Offending member pairs (cells), one entry per pair.
    pub violating_pairs: Vec<(FaceId, FaceId)>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.face_violations.is_empty()
    }
}

/// Finite collection of equal-dimensional polyhedra sharing subfaces.
#[derive(Clone, Debug)]
pub struct Complex {
    pub ambient_dim: usize,
    pub dim: usize,
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Face>,
    pub by_dim: Vec<Vec<FaceId>>,
    pub stats: ComplexStats,
    pub periodic: Option<PeriodicTopology>,
    vertex_faces: Vec<FaceId>,
    key_index: HashMap<Vec<(usize, [i64; 3])>, FaceId>,
    bucket: CellBuckets,
}

#[derive(Clone, Debug, Default)]
struct CellBuckets {
    origin: Vec3,
    size: f64,
    map: HashMap<[i64; 3], Vec<FaceId>>,
}

impl CellBuckets {
    fn key(&self, p: &Vec3) -> [i64; 3] {
        let f = |i: usize| ((p[i] - self.origin[i]) / self.size).floor() as i64;
        [f(0), f(1), f(2)]
    }

    fn build(faces: &[Face], cells: &[FaceId]) -> Self {
        if cells.is_empty() {
            return CellBuckets { origin: Vec3::zeros(), size: 1.0, map: HashMap::new() };
        }
        let mut diam: Vec<f64> = cells.iter().map(|&c| faces[c].polyhedron.bbox().diagonal()).collect();
        diam.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let size = diam[diam.len() / 2].max(1e-6);
        let all = Aabb::from_points(cells.iter().flat_map(|&c| faces[c].polyhedron.vertices.iter()));
        let mut b = CellBuckets { origin: all.min, size, map: HashMap::new() };
        for &c in cells {
            let bb = faces[c].polyhedron.bbox();
            let (lo, hi) = (b.key(&bb.min.add_scalar(-1e-9)), b.key(&bb.max.add_scalar(1e-9)));
            for x in lo[0]..=hi[0] {
                for y in lo[1]..=hi[1] {
                    for z in lo[2]..=hi[2] {
                        b.map.entry([x, y, z]).or_default().push(c);
                    }
                }
            }
        }
        b
    }

    fn query(&self, bb: &Aabb) -> Vec<FaceId> {
        let (lo, hi) = (self.key(&bb.min.add_scalar(-1e-9)), self.key(&bb.max.add_scalar(1e-9)));
        let mut out = Vec::new();
        let span = (hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1);
        if span > 4 * self.map.len() as i64 + 64 {
            let mut all: Vec<FaceId> = self.map.values().flatten().copied().collect();
            all.sort_unstable();
            all.dedup();
            return all;
        }
        for x in lo[0]..=hi[0] {
            for y in lo[1]..=hi[1] {
                for z in lo[2]..=hi[2] {
                    if let Some(v) = self.map.get(&[x, y, z]) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Tolerance-deduplicating point store.
#[derive(Default)]
pub(crate) struct VertexStore {
    pub points: Vec<Vec3>,
    map: HashMap<[i64; 3], Vec<usize>>,
}

impl VertexStore {
    const CELL: f64 = 1e-6;

    fn cell(p: &Vec3) -> [i64; 3] {
        [
            (p[0] / Self::CELL).floor() as i64,
            (p[1] / Self::CELL).floor() as i64,
            (p[2] / Self::CELL).floor() as i64,
        ]
    }

    pub fn insert(&mut self, p: &Vec3) -> usize {
        let c = Self::cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.map.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) {
                        for &i in ids {
                            if TOL.same_point(&self.points[i], p) {
                                return i;
                            }
                        }
                    }
                }
            }
        }
        let id = self.points.len();
        self.points.push(*p);
        self.map.entry(c).or_default().push(id);
        id
    }
}

pub(crate) fn lex_cmp(a: &Vec3, b: &Vec3) -> std::cmp::Ordering {
    for i in 0..3 {
        match a[i].partial_cmp(&b[i]).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

struct RawFace {
    key: Vec<(usize, [i64; 3])>,
    poly: Polyhedron,
    children: HashSet<usize>,
    cells: HashSet<usize>,
    incidence: usize,
}

impl Complex {
    /// Builds the complex generated by `cells` (all of equal dimension) with
    /// every subface deduplicated across cells.
    pub fn from_polyhedra(
        ambient_dim: usize,
        cells: Vec<Polyhedron>,
        periodic: Option<PeriodicTopology>,
    ) -> Result<Complex> {
        let dim = cells.first().map_or(ambient_dim, |c| c.dim);
        if let Some(bad) = cells.iter().find(|c| c.dim != dim) {
            return Err(Error::DimensionMismatch(format!(
                "complex members must share dimension {dim}, found {}",
                bad.dim
            )));
        }
        let mut store = VertexStore::default();
        let mut raw: Vec<RawFace> = Vec::new();
        let mut index: HashMap<Vec<(usize, [i64; 3])>, usize> = HashMap::new();

        for cell in cells.into_iter() {
            let sets = cell.subface_vertex_sets();
            let mut local_ids: Vec<usize> = Vec::with_capacity(sets.len());
            let mut dims: Vec<usize> = Vec::with_capacity(sets.len());
            for vs in &sets {
                let pts: Vec<Vec3> = vs.iter().map(|&i| cell.vertices[i]).collect();
                // representative translation: lexicographically smallest vertex in the fundamental domain
                let shift = match &periodic {
                    Some(t) => {
                        let lo = pts.iter().min_by(|a, b| lex_cmp(a, b)).unwrap();
                        t.reduce(lo).1
                    }
                    None => [0; 3],
                };
                let mut key: Vec<(usize, [i64; 3])> = pts
                    .iter()
                    .map(|p| match &periodic {
                        Some(t) => {
                            let (q, k) = t.reduce(p);
                            (store.insert(&q), [k[0] - shift[0], k[1] - shift[1], k[2] - shift[2]])
                        }
                        None => (store.insert(p), [0; 3]),
                    })
                    .collect();
                key.sort_unstable();
                let fid = match index.get(&key) {
                    Some(&f) => f,
                    None => {
                        let poly = if vs.len() == cell.vertices.len() && periodic.is_none() {
                            cell.clone()
                        } else {
                            let rep: Vec<Vec3> = match &periodic {
                                Some(t) => pts
                                    .iter()
                                    .map(|p| {
                                        let mut q = *p;
                                        for i in 0..3 {
                                            q[i] -= shift[i] as f64 * t.period[i];
                                        }
                                        q
                                    })
                                    .collect(),
                                None => pts.clone(),
                            };
                            Polyhedron::from_vertices(ambient_dim, &rep)?
                        };
                        raw.push(RawFace {
                            key: key.clone(),
                            poly,
                            children: HashSet::new(),
                            cells: HashSet::new(),
                            incidence: 0,
                        });
                        index.insert(key, raw.len() - 1);
                        raw.len() - 1
                    }
                };
                local_ids.push(fid);
                dims.push(raw[fid].poly.dim);
            }
            let cell_fid = local_ids[0];
            for (a, va) in sets.iter().enumerate() {
                raw[local_ids[a]].cells.insert(cell_fid);
                raw[local_ids[a]].incidence += 1;
                for (b, vb) in sets.iter().enumerate() {
                    if dims[b] + 1 == dims[a] && vb.iter().all(|v| va.contains(v)) {
                        let child = local_ids[b];
                        raw[local_ids[a]].children.insert(child);
                    }
                }
            }
        }

        // canonical numbering: vertices lexicographically, faces by (dim, key)
        let mut vorder: Vec<usize> = (0..store.points.len()).collect();
        vorder.sort_by(|&a, &b| lex_cmp(&store.points[a], &store.points[b]));
        let mut vnew = vec![0; vorder.len()];
        for (new, &old) in vorder.iter().enumerate() {
            vnew[old] = new;
        }
        let vertices: Vec<Vec3> = vorder.iter().map(|&i| store.points[i]).collect();
        for f in raw.iter_mut() {
            for e in f.key.iter_mut() {
                e.0 = vnew[e.0];
            }
            f.key.sort_unstable();
        }
        let mut forder: Vec<usize> = (0..raw.len()).collect();
        forder.sort_by(|&a, &b| raw[a].poly.dim.cmp(&raw[b].poly.dim).then_with(|| raw[a].key.cmp(&raw[b].key)));
        let mut fnew = vec![0; forder.len()];
        for (new, &old) in forder.iter().enumerate() {
            fnew[old] = new;
        }
        let mut faces: Vec<Face> = forder
            .iter()
            .map(|&old| {
                let r = &raw[old];
                let mut vs: Vec<usize> = r.key.iter().map(|e| e.0).collect();
                vs.sort_unstable();
                vs.dedup();
                let mut children: Vec<FaceId> = r.children.iter().map(|&c| fnew[c]).collect();
                children.sort_unstable();
                let mut fcells: Vec<FaceId> = r.cells.iter().map(|&c| fnew[c]).collect();
                fcells.sort_unstable();
                let stats = r.poly.shape_stats();
                let measure = r.poly.measure();
                Face {
                    dim: r.poly.dim,
                    vertices: vs,
                    key: r.key.clone(),
                    polyhedron: r.poly.clone(),
                    stats,
                    measure,
                    children,
                    parents: vec![],
                    cells: fcells,
                    incidence: r.incidence,
                }
            })
            .collect();
        for i in 0..faces.len() {
            for c in faces[i].children.clone() {
                faces[c].parents.push(i);
            }
        }
        let mut by_dim = vec![Vec::new(); dim + 1];
        for (i, f) in faces.iter().enumerate() {
            by_dim[f.dim].push(i);
        }
        let mut vertex_faces = vec![usize::MAX; vertices.len()];
        for &f in &by_dim[0] {
            vertex_faces[faces[f].vertices[0]] = f;
        }
        let key_index = faces.iter().enumerate().map(|(i, f)| (f.key.clone(), i)).collect();
        let bucket = CellBuckets::build(&faces, &by_dim[dim]);
        let mut cx = Complex {
            ambient_dim,
            dim,
            vertices,
            faces,
            by_dim,
            stats: ComplexStats { max_outer_radius: 0.0, min_inner_radius: 0.0, min_rotondity: 1.0 },
            periodic,
            vertex_faces,
            key_index,
            bucket,
        };
        cx.stats = cx.recompute_stats();
        Ok(cx)
    }

    /// Aggregate statistics over every subface, computed from scratch.
    pub fn recompute_stats(&self) -> ComplexStats {
        let mut s = ComplexStats {
            max_outer_radius: 0.0,
            min_inner_radius: f64::INFINITY,
            min_rotondity: 1.0,
        };
        for f in &self.faces {
            s.max_outer_radius = s.max_outer_radius.max(f.stats.outer_radius);
            s.min_rotondity = s.min_rotondity.min(f.stats.rotondity);
            if f.dim > 0 {
                s.min_inner_radius = s.min_inner_radius.min(f.stats.inner_radius);
            }
        }
        if !s.min_inner_radius.is_finite() {
            s.min_inner_radius = 0.0;
        }
        s
    }

    pub fn cells(&self) -> &[FaceId] {
        &self.by_dim[self.dim]
    }

    pub fn cell_polyhedra(&self) -> Vec<Polyhedron> {
        self.cells().iter().map(|&c| self.faces[c].polyhedron.clone()).collect()
    }

    pub fn face(&self, id: FaceId) -> &Face {
        &self.faces[id]
    }

    pub fn faces_of_dim(&self, k: usize) -> &[FaceId] {
        self.by_dim.get(k).map_or(&[], |v| v.as_slice())
    }

    /// 0-face id of global vertex `v`.
    pub fn vertex_face(&self, v: usize) -> FaceId {
        self.vertex_faces[v]
    }

    /// Face with the given identification key, if any.
    pub fn face_by_key(&self, key: &[(usize, [i64; 3])]) -> Option<FaceId> {
        self.key_index.get(key).copied()
    }

    /// Face spanned by exactly these (non-periodic) vertex ids.
    pub fn face_by_vertices(&self, vertices: &[usize]) -> Option<FaceId> {
        let mut key: Vec<(usize, [i64; 3])> = vertices.iter().map(|&v| (v, [0; 3])).collect();
        key.sort_unstable();
        key.dedup();
        self.face_by_key(&key)
    }

    /// The face and all of its subfaces.
    pub fn closure(&self, id: FaceId) -> Vec<FaceId> {
        let mut out = vec![id];
        let mut i = 0;
        while i < out.len() {
            for &c in &self.faces[out[i]].children {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Whether `sub` is a subface of `sup` (or equal).
    pub fn is_subface(&self, sub: FaceId, sup: FaceId) -> bool {
        if sub == sup {
            return true;
        }
        let (a, b) = (&self.faces[sub], &self.faces[sup]);
        if a.dim >= b.dim {
            return false;
        }
        if self.periodic.is_none() {
            return a.vertices.iter().all(|v| b.vertices.binary_search(v).is_ok());
        }
        b.children.iter().any(|&c| self.is_subface(sub, c))
    }

    /// 0-face nearest to `p`.
    pub fn nearest_vertex_face(&self, p: &Vec3) -> FaceId {
        let mut best = (f64::INFINITY, 0);
        for (i, q) in self.vertices.iter().enumerate() {
            let d = (p - q).norm();
            if d < best.0 - 1e-12 {
                best = (d, i);
            }
        }
        self.vertex_faces[best.1]
    }

    /// Cells whose bounding boxes meet `bb`.
    pub fn cells_overlapping(&self, bb: &Aabb) -> Vec<FaceId> {
        self.bucket
            .query(bb)
            .into_iter()
            .filter(|&c| self.faces[c].polyhedron.bbox().overlaps(bb, 1e-9))
            .collect()
    }

    /// Cell containing `p` (closed), if any.
    pub fn locate(&self, p: &Vec3) -> Option<FaceId> {
        let bb = Aabb { min: *p, max: *p };
        self.cells_overlapping(&bb)
            .into_iter()
            .find(|&c| self.faces[c].polyhedron.contains(p, 1e-9))
    }

    /// Total measure of the cells.
    pub fn volume(&self) -> f64 {
        self.cells().iter().map(|&c| self.faces[c].measure).sum()
    }

    /// Facets contained in exactly one cell.
    pub fn boundary_faces(&self) -> Vec<FaceId> {
        if self.dim == 0 {
            return vec![];
        }
        self.by_dim[self.dim - 1]
            .iter()
            .copied()
            .filter(|&f| self.faces[f].incidence == 1)
            .collect()
    }

    /// Pairs of cells sharing a facet, with that facet.
    pub fn interior_facets(&self) -> Vec<(FaceId, FaceId, FaceId)> {
        if self.dim == 0 {
            return vec![];
        }
        self.by_dim[self.dim - 1]
            .iter()
            .filter(|&&f| self.faces[f].cells.len() == 2)
            .map(|&f| (self.faces[f].cells[0], self.faces[f].cells[1], f))
            .collect()
    }

    /// Checks that subfaces of distinct members have disjoint relative interiors.
    pub fn validate(&self) -> ValidationReport {
        let n = self.faces.len();
        let boxes: Vec<Aabb> = self.faces.iter().map(|f| f.polyhedron.bbox()).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| boxes[a].min[0].partial_cmp(&boxes[b].min[0]).unwrap());
        let scale = self.stats.max_outer_radius.max(1e-3);
        let slack = 1e-9 * scale.max(1.0);
        let mut violations = Vec::new();
        for (oi, &a) in order.iter().enumerate() {
            for &b in &order[oi + 1..] {
                if boxes[b].min[0] > boxes[a].max[0] + slack {
                    break;
                }
                if !boxes[a].overlaps(&boxes[b], slack) {
                    continue;
                }
                let (fa, fb) = (&self.faces[a], &self.faces[b]);
                if fa.cells.iter().any(|c| fb.cells.binary_search(c).is_ok()) {
                    continue;
                }
                if self.is_subface(a, b) || self.is_subface(b, a) {
                    continue;
                }
                if relint_intersect(&fa.polyhedron, &fb.polyhedron, slack) {
                    violations.push((a.min(b), a.max(b)));
                }
            }
        }
        violations.sort_unstable();
        let mut pairs: Vec<(FaceId, FaceId)> = violations
            .iter()
            .map(|&(a, b)| {
                let (ca, cb) = (self.faces[a].cells[0], self.faces[b].cells[0]);
                (ca.min(cb), ca.max(cb))
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        ValidationReport { face_violations: violations, violating_pairs: pairs }
    }

    /// Connected components of the cells under facet adjacency.
    pub fn cell_components(&self) -> usize {
        let cells = self.cells();
        let pos: HashMap<FaceId, usize> = cells.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut parent: Vec<usize> = (0..cells.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for (a, b, _) in self.interior_facets() {
            let (ra, rb) = (find(&mut parent, pos[&a]), find(&mut parent, pos[&b]));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..cells.len()).filter(|&i| find(&mut parent, i) == i).count()
    }

    /// Number of faces of each dimension.
    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(|v| v.len()).collect()
    }

    /// Faces grouped by vertex id: for each vertex, the faces containing it.
    pub fn vertex_star(&self) -> Vec<Vec<FaceId>> {
        let mut star = vec![Vec::new(); self.vertices.len()];
        for (i, f) in self.faces.iter().enumerate() {
            for &v in &f.vertices {
                star[v].push(i);
            }
        }
        star
    }

    /// Histogram of face dimensions over an id set, keyed by dimension.
    pub fn dim_histogram(&self, ids: &[FaceId]) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &i in ids {
            *h.entry(self.faces[i].dim).or_insert(0) += 1;
        }
        h
    }
}

/// Whether the relative interiors of two polyhedra intersect.
pub fn relint_intersect(a: &Polyhedron, b: &Polyhedron, tol: f64) -> bool {
    // cheap separations first
    for (p, q) in [(a, b), (b, a)] {
        for h in &p.half_spaces {
            if q.vertices.iter().all(|v| h.signed_distance(v) >= -tol) {
                return false;
            }
        }
        for u in p.normal_space() {
            let c = u.dot(&p.hull.base);
            let s: Vec<f64> = q.vertices.iter().map(|v| u.dot(v) - c).collect();
            let inside = s.iter().all(|x| x.abs() <= tol);
            if !inside && (s.iter().all(|&x| x >= -tol) || s.iter().all(|&x| x <= tol)) {
                return false;
            }
        }
    }
    let n = a.ambient_dim.max(b.ambient_dim);
    let mut obj = vec![0.0; n + 1];
    obj[n] = 1.0;
    let mut lp = LinearProgram::new(obj);
    for p in [a, b] {
        for h in &p.half_spaces {
            let mut row: Vec<f64> = (0..n).map(|i| h.normal[i]).collect();
            row.push(1.0);
            lp.le(row, h.offset);
        }
        for u in p.normal_space() {
            let mut row: Vec<f64> = (0..n).map(|i| u[i]).collect();
            row.push(0.0);
            lp.eq(row, u.dot(&p.hull.base));
        }
    }
    let mut cap = vec![0.0; n + 1];
    cap[n] = 1.0;
    lp.le(cap, 1.0);
    match lp.solve() {
        LpOutcome::Optimal { value, .. } => value > tol,
        _ => false,
    }
}

/// Rank of a point set's affine hull.
pub fn affine_rank(points: &[Vec3], n: usize) -> usize {
    affine_hull(points, n).dim()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x: f64, y: f64, s: f64) -> Polyhedron {
        Polyhedron::axis_box(2, &[x, y], &[x + s, y + s]).unwrap()
    }

    #[test]
    fn shared_edge_passes() {
        let c = Complex::from_polyhedra(2, vec![sq(0., 0., 1.), sq(1., 0., 1.)], None).unwrap();
        assert!(c.validate().passed());
        assert_eq!(c.counts(), vec![6, 7, 2]);
        assert_eq!(c.boundary_faces().len(), 6);
    }

    #[test]
    fn half_overlap_fails_once() {
        let c = Complex::from_polyhedra(2, vec![sq(0., 0., 1.), sq(0.5, 0., 1.)], None).unwrap();
        let r = c.validate();
        assert!(!r.passed());
        assert_eq!(r.violating_pairs.len(), 1);
    }

    #[test]
    fn half_edge_contact_fails() {
        let c = Complex::from_polyhedra(2, vec![sq(0., 0., 1.), sq(1., 0., 0.5)], None).unwrap();
        assert!(!c.validate().passed());
    }

    #[test]
    fn boundary_of_block() {
        let cells = vec![sq(0., 0., 1.), sq(1., 0., 1.), sq(0., 1., 1.), sq(1., 1., 1.)];
        let c = Complex::from_polyhedra(2, cells, None).unwrap();
        assert_eq!(c.boundary_faces().len(), 8);
        let single = Complex::from_polyhedra(2, vec![sq(0., 0., 1.)], None).unwrap();
        assert_eq!(single.boundary_faces().len(), 4);
    }

    #[test]
    fn aggregate_stats_match_recomputation() {
        let c = Complex::from_polyhedra(2, vec![sq(0., 0., 1.), sq(1., 0., 1.)], None).unwrap();
        assert_eq!(c.stats, c.recompute_stats());
        assert!((c.stats.min_rotondity - 1.0 / 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn torus_identifications() {
        let t = PeriodicTopology::new([1.0, 1.0, 0.0]);
        let c = Complex::from_polyhedra(2, vec![sq(0., 0., 1.)], Some(t)).unwrap();
        assert_eq!(c.counts(), vec![1, 2, 1]);
        assert!(c.boundary_faces().is_empty());
    }

    #[test]
    fn reduce_wraps_upper_end() {
        let t = PeriodicTopology::new([2.0, 0.0, 0.0]);
        let (q, k) = t.reduce(&Vec3::new(2.0, 5.0, 0.0));
        assert_eq!(q[0], 0.0);
        assert_eq!(k[0], 1);
        assert_eq!(q[1], 5.0);
    }
}
