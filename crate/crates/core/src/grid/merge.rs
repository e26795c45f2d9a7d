//! Filling the gap between a holed outer grid and the rotated patches placed
//! in its holes. Planar gaps use a constrained Delaunay triangulation of the
//! two boundary rings; spatial gaps are tetrahedralized in `delaunay3`.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use spade::{ConstrainedDelaunayTriangulation, Point2, Triangulation};

use super::{delaunay3, DyadicGridSpec};
use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};
use crate::geometry::{Polyhedron, Vec3, TOL};

#[derive(Clone, Debug, PartialEq)]
pub struct MergeConfig {
    /// Minimal accepted rotondity of the cells created by the merge.
    pub rotondity_floor: f64,
    /// Refinement steps allowed in the planar gap triangulation.
    pub max_refinements: usize,
    /// Jitter seeds tried by the spatial tetrahedralization.
    pub seeds: u64,
    /// Frame of the outer grid, used to detect patches aligned with it.
    pub lattice: Option<DyadicGridSpec>,
}

impl Default for MergeConfig {
    fn default() -> Self {
        MergeConfig { rotondity_floor: 0.02, max_refinements: 400, seeds: 8, lattice: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergeReport {
    pub gap_cell_count: usize,
    /// Minimal rotondity over gap cells and re-split boundary cells.
    pub measured_min_rotondity: f64,
    pub measured_max_outer_radius: f64,
    /// Max outer radius of the merge over that of its inputs.
    pub outer_radius_ratio: f64,
    pub presplit_cells: usize,
    /// Relative mismatch between the filled volume and hole minus patches.
    pub union_error: f64,
    pub boundary_preserved: bool,
    pub validity: bool,
}

impl MergeReport {
    fn identity(outer: &Complex) -> Self {
        MergeReport {
            gap_cell_count: 0,
            measured_min_rotondity: outer.stats.min_rotondity,
            measured_max_outer_radius: outer.stats.max_outer_radius,
            outer_radius_ratio: 1.0,
            presplit_cells: 0,
            union_error: 0.0,
            boundary_preserved: true,
            validity: true,
        }
    }
}

/// Merges `patches` into the holes of `outer`.
pub fn merge(outer: &Complex, patches: &[Complex], cfg: &MergeConfig) -> Result<(Complex, MergeReport)> {
    if patches.is_empty() {
        return Ok((outer.clone(), MergeReport::identity(outer)));
    }
    if patches.iter().any(|p| p.ambient_dim != outer.ambient_dim || p.dim != outer.dim) {
        return Err(Error::DimensionMismatch("patches must match the outer grid's dimension".into()));
    }
    if let Some(lattice) = &cfg.lattice {
        if let Some(res) = aligned_fill(outer, patches, lattice) {
            return res;
        }
    }
    match outer.ambient_dim {
        2 => merge_planar(outer, patches, cfg),
        3 => delaunay3::merge_spatial(outer, patches, cfg),
        n => Err(Error::DimensionMismatch(format!("merge in dimension {n}"))),
    }
}

pub(crate) fn face_point_key(points: &[Vec3]) -> Vec<[i64; 3]> {
    let q = |x: f64| (x * 1e7).round() as i64;
    let mut k: Vec<[i64; 3]> = points.iter().map(|p| [q(p[0]), q(p[1]), q(p[2])]).collect();
    k.sort_unstable();
    k
}

/// Boundary facets of a complex as coordinate keys.
pub(crate) fn boundary_keys(c: &Complex) -> BTreeSet<Vec<[i64; 3]>> {
    c.boundary_faces()
        .into_iter()
        .map(|f| face_point_key(&c.faces[f].polyhedron.vertices))
        .collect()
}

pub(crate) fn finish_report(
    outer: &Complex,
    patches: &[Complex],
    merged: &Complex,
    new_cells: &[Polyhedron],
    gap_cells: usize,
    presplit: usize,
    union_error: f64,
    filled_boundary: &BTreeSet<Vec<[i64; 3]>>,
) -> MergeReport {
    let min_rot = new_cells
        .iter()
        .map(|p| p.shape_stats().rotondity)
        .fold(1.0, f64::min);
    let input_max = patches
        .iter()
        .map(|p| p.stats.max_outer_radius)
        .fold(outer.stats.max_outer_radius, f64::max);
    let expected: BTreeSet<Vec<[i64; 3]>> = boundary_keys(outer)
        .into_iter()
        .filter(|k| !filled_boundary.contains(k))
        .collect();
    let boundary_preserved = boundary_keys(merged) == expected;
    let validity = merged.validate().passed() && union_error < 1e-6;
    MergeReport {
        gap_cell_count: gap_cells,
        measured_min_rotondity: min_rot,
        measured_max_outer_radius: merged.stats.max_outer_radius,
        outer_radius_ratio: merged.stats.max_outer_radius / input_max.max(1e-300),
        presplit_cells: presplit,
        union_error,
        boundary_preserved,
        validity,
    }
}

/// Dyadic fill when every patch cell is a cube of the outer lattice.
fn aligned_fill(
    outer: &Complex,
    patches: &[Complex],
    lattice: &DyadicGridSpec,
) -> Option<Result<(Complex, MergeReport)>> {
    let n = outer.ambient_dim;
    let index_of_cell = |p: &Polyhedron| -> Option<[i64; 3]> {
        let z = lattice.index_of(&p.centroid());
        let cube = lattice.cube(&z);
        let same = cube.vertices.len() == p.vertices.len()
            && cube.vertices.iter().zip(&p.vertices).all(|(a, b)| (a - b).norm() <= 1e-9);
        same.then_some(z)
    };
    let mut outer_idx = HashSet::new();
    for &c in outer.cells() {
        outer_idx.insert(index_of_cell(&outer.faces[c].polyhedron)?);
    }
    let mut patch_idx = HashSet::new();
    for p in patches {
        for &c in p.cells() {
            patch_idx.insert(index_of_cell(&p.faces[c].polyhedron)?);
        }
    }
    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for z in &outer_idx {
        for i in 0..n {
            lo[i] = lo[i].min(z[i]);
            hi[i] = hi[i].max(z[i]);
        }
    }
    let mut region: HashSet<[i64; 3]> = HashSet::new();
    let mut queue: VecDeque<[i64; 3]> = patch_idx.iter().copied().collect();
    region.extend(patch_idx.iter().copied());
    while let Some(z) = queue.pop_front() {
        if outer_idx.contains(&z) {
            return Some(Err(Error::Config("patch overlaps the outer grid".into())));
        }
        for i in 0..n {
            for s in [-1, 1] {
                let mut w = z;
                w[i] += s;
                if outer_idx.contains(&w) || region.contains(&w) {
                    continue;
                }
                if w[i] < lo[i] || w[i] > hi[i] {
                    return Some(Err(Error::Config("patch does not lie in a hole of the outer grid".into())));
                }
                region.insert(w);
                queue.push_back(w);
            }
        }
    }
    let mut gap: Vec<[i64; 3]> = region.difference(&patch_idx).copied().collect();
    gap.sort_unstable();
    let gap_cells: Vec<Polyhedron> = gap.iter().map(|z| lattice.cube(z)).collect();
    let mut cells = outer.cell_polyhedra();
    for p in patches {
        cells.extend(p.cell_polyhedra());
    }
    cells.extend(gap_cells.iter().cloned());
    let merged = match Complex::from_polyhedra(n, cells, None) {
        Ok(m) => m,
        Err(e) => return Some(Err(e)),
    };
    // hole facets are the outer boundary facets that now lie between two cells
    let merged_boundary = boundary_keys(&merged);
    let filled: BTreeSet<Vec<[i64; 3]>> = boundary_keys(outer)
        .into_iter()
        .filter(|k| !merged_boundary.contains(k))
        .collect();
    let report = finish_report(outer, patches, &merged, &gap_cells, gap.len(), 0, 0.0, &filled);
    Some(Ok((merged, report)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct Owner {
    /// 0 for the outer complex, `i + 1` for patch `i`.
    complex: usize,
    cell: FaceId,
}

#[derive(Clone, Debug)]
struct RingEdge {
    a: Vec3,
    b: Vec3,
    owner: Owner,
    splits: Vec<f64>,
}

impl RingEdge {
    fn sub_edges(&self) -> Vec<(Vec3, Vec3)> {
        let mut ts = vec![0.0];
        ts.extend(self.splits.iter().copied());
        ts.push(1.0);
        ts.windows(2)
            .map(|w| (self.a + (self.b - self.a) * w[0], self.a + (self.b - self.a) * w[1]))
            .collect()
    }
}

/// Boundary edges of a planar complex, oriented with their cell on the left.
fn oriented_boundary(c: &Complex) -> Vec<(usize, usize, FaceId)> {
    c.boundary_faces()
        .into_iter()
        .map(|f| {
            let face = &c.faces[f];
            let (a, b) = (face.vertices[0], face.vertices[1]);
            let cell = face.cells[0];
            let m = c.faces[cell].polyhedron.centroid();
            let (pa, pb) = (c.vertices[a], c.vertices[b]);
            if cross2(&(pb - pa), &(m - pa)) >= 0.0 {
                (a, b, cell)
            } else {
                (b, a, cell)
            }
        })
        .collect()
}

fn cross2(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

/// Splits oriented boundary edges into closed loops, taking the leftmost
/// turn at pinch vertices; returns loops as edge index lists.
fn trace_loops(c: &Complex, edges: &[(usize, usize, FaceId)]) -> Vec<Vec<usize>> {
    let mut out_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.0).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    let mut loops = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut lp = vec![start];
        used[start] = true;
        let mut cur = start;
        loop {
            let (a, b, _) = edges[cur];
            let dir = c.vertices[b] - c.vertices[a];
            let cands: Vec<usize> = out_of.get(&b).map_or(vec![], |v| v.iter().copied().filter(|&e| !used[e]).collect());
            let next = cands.into_iter().max_by(|&x, &y| {
                let turn = |e: usize| {
                    let d = c.vertices[edges[e].1] - c.vertices[edges[e].0];
                    cross2(&dir, &d).atan2(dir[0] * d[0] + dir[1] * d[1])
                };
                turn(x).partial_cmp(&turn(y)).unwrap()
            });
            match next {
                Some(e) => {
                    used[e] = true;
                    lp.push(e);
                    cur = e;
                }
                None => break,
            }
        }
        loops.push(lp);
    }
    loops
}

/// Even-odd test of `p` against a set of segments.
pub(crate) fn parity_inside(p: &Vec3, segs: &[(Vec3, Vec3)]) -> bool {
    let mut inside = false;
    for (a, b) in segs {
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

fn circumcenter2(a: &Vec3, b: &Vec3, c: &Vec3) -> Option<Vec3> {
    let d = 2.0 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]));
    if d.abs() < 1e-300 {
        return None;
    }
    let (a2, b2, c2) = (a.norm_squared(), b.norm_squared(), c.norm_squared());
    let x = (a2 * (b[1] - c[1]) + b2 * (c[1] - a[1]) + c2 * (a[1] - b[1])) / d;
    let y = (a2 * (c[0] - b[0]) + b2 * (a[0] - c[0]) + c2 * (b[0] - a[0])) / d;
    Some(Vec3::new(x, y, 0.0))
}

struct HoleGroup {
    edges: Vec<(Vec3, Vec3)>,
    edge_faces: Vec<FaceId>,
    patches: Vec<usize>,
}

fn merge_planar(outer: &Complex, patches: &[Complex], cfg: &MergeConfig) -> Result<(Complex, MergeReport)> {
    let oriented = oriented_boundary(outer);
    let loops = trace_loops(outer, &oriented);
    // hole loops run clockwise; group them by shared vertices
    let mut hole_edges: Vec<usize> = Vec::new();
    for lp in &loops {
        let area: f64 = lp
            .iter()
            .map(|&e| cross2(&outer.vertices[oriented[e].0], &outer.vertices[oriented[e].1]))
            .sum();
        if area < 0.0 {
            hole_edges.extend(lp.iter().copied());
        }
    }
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while let Some(&q) = p.get(&r) {
            if q == r {
                break;
            }
            r = q;
        }
        p.insert(x, r);
        r
    }
    for &e in &hole_edges {
        let (a, b) = (oriented[e].0, oriented[e].1);
        parent.entry(a).or_insert(a);
        parent.entry(b).or_insert(b);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent.insert(ra, rb);
        }
    }
    let mut groups: Vec<HoleGroup> = Vec::new();
    let mut group_of_root: HashMap<usize, usize> = HashMap::new();
    for &e in &hole_edges {
        let r = find(&mut parent, oriented[e].0);
        let g = *group_of_root.entry(r).or_insert_with(|| {
            groups.push(HoleGroup { edges: vec![], edge_faces: vec![], patches: vec![] });
            groups.len() - 1
        });
        groups[g].edges.push((outer.vertices[oriented[e].0], outer.vertices[oriented[e].1]));
        groups[g].edge_faces.push(e);
    }
    let patch_rings: Vec<Vec<(usize, usize, FaceId)>> = patches.iter().map(oriented_boundary).collect();
    for (pi, p) in patches.iter().enumerate() {
        let probe = p.faces[p.cells()[0]].polyhedron.centroid();
        match groups.iter().position(|g| parity_inside(&probe, &g.edges)) {
            Some(g) => groups[g].patches.push(pi),
            None => return Err(Error::Config(format!("patch {pi} does not lie in a hole of the outer grid"))),
        }
    }

    let mut gap_cells: Vec<Polyhedron> = Vec::new();
    let mut ring_all: Vec<RingEdge> = Vec::new();
    let mut hole_area = 0.0;
    let mut filled: BTreeSet<Vec<[i64; 3]>> = BTreeSet::new();
    for g in groups.iter().filter(|g| !g.patches.is_empty()) {
        let mut ring: Vec<RingEdge> = g
            .edge_faces
            .iter()
            .map(|&e| RingEdge {
                a: outer.vertices[oriented[e].0],
                b: outer.vertices[oriented[e].1],
                owner: Owner { complex: 0, cell: oriented[e].2 },
                splits: vec![],
            })
            .collect();
        for (a, b) in &g.edges {
            filled.insert(face_point_key(&[*a, *b]));
            hole_area -= cross2(a, b) / 2.0;
        }
        let mut patch_segs: Vec<Vec<(Vec3, Vec3)>> = Vec::new();
        for &pi in &g.patches {
            let p = &patches[pi];
            let segs: Vec<(Vec3, Vec3)> = patch_rings[pi]
                .iter()
                .map(|&(a, b, _)| (p.vertices[a], p.vertices[b]))
                .collect();
            for &(a, b, cell) in &patch_rings[pi] {
                ring.push(RingEdge {
                    a: p.vertices[a],
                    b: p.vertices[b],
                    owner: Owner { complex: pi + 1, cell },
                    splits: vec![],
                });
            }
            patch_segs.push(segs);
        }
        let in_gap = |q: &Vec3| parity_inside(q, &g.edges) && patch_segs.iter().all(|s| !parity_inside(q, s));
        let mut steiner: Vec<Vec3> = Vec::new();
        let mut iter = 0;
        let tris = loop {
            let tris = triangulate_gap(&ring, &steiner, &in_gap);
            let worst = tris
                .iter()
                .enumerate()
                .map(|(i, t)| (i, t.1))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
            let Some((wi, wr)) = worst else { break tris };
            if wr >= cfg.rotondity_floor {
                break tris;
            }
            if iter >= cfg.max_refinements {
                return Err(Error::MergeDegenerate { min_rotondity: wr, floor: cfg.rotondity_floor });
            }
            iter += 1;
            let t = &tris[wi].0;
            if !refine_once(&mut ring, &mut steiner, t, &in_gap) {
                return Err(Error::MergeDegenerate { min_rotondity: wr, floor: cfg.rotondity_floor });
            }
        };
        for (t, _) in tris {
            gap_cells.push(Polyhedron::from_vertices(2, &t)?);
        }
        ring_all.extend(ring);
    }
    let patch_area: f64 = patches.iter().map(|p| p.volume()).sum();
    let gap_area: f64 = gap_cells.iter().map(|p| p.measure()).sum();
    let union_error = (gap_area - (hole_area - patch_area)).abs() / hole_area.max(1e-300);

    // cells whose ring edges were split are re-cut into a cone from their centroid
    let mut split_edges: HashMap<Owner, Vec<&RingEdge>> = HashMap::new();
    for e in ring_all.iter().filter(|e| !e.splits.is_empty()) {
        split_edges.entry(e.owner).or_default().push(e);
    }
    let mut cells: Vec<Polyhedron> = Vec::new();
    let mut new_cells: Vec<Polyhedron> = gap_cells.clone();
    let mut presplit = 0;
    let sources: Vec<&Complex> = std::iter::once(outer).chain(patches.iter()).collect();
    for (ci, cx) in sources.iter().enumerate() {
        for &cell in cx.cells() {
            let poly = &cx.faces[cell].polyhedron;
            match split_edges.get(&Owner { complex: ci, cell }) {
                None => cells.push(poly.clone()),
                Some(edges) => {
                    presplit += 1;
                    let cone = cone_polygon(poly, edges)?;
                    new_cells.extend(cone.iter().cloned());
                    cells.extend(cone);
                }
            }
        }
    }
    cells.extend(gap_cells.iter().cloned());
    let merged = Complex::from_polyhedra(2, cells, None)?;
    let report = finish_report(outer, patches, &merged, &new_cells, gap_cells.len(), presplit, union_error, &filled);
    Ok((merged, report))
}

/// Triangles of the constrained Delaunay triangulation of the ring lying in the gap,
/// with their rotondity.
fn triangulate_gap(ring: &[RingEdge], steiner: &[Vec3], in_gap: &dyn Fn(&Vec3) -> bool) -> Vec<(Vec<Vec3>, f64)> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut pts: Vec<Vec3> = Vec::new();
    let mut insert = |cdt: &mut ConstrainedDelaunayTriangulation<Point2<f64>>, p: &Vec3| {
        let h = cdt.insert(Point2::new(p[0], p[1])).expect("finite coordinates");
        if h.index() >= pts.len() {
            pts.resize(h.index() + 1, Vec3::zeros());
        }
        pts[h.index()] = *p;
        h
    };
    let mut constraints = Vec::new();
    for e in ring {
        for (a, b) in e.sub_edges() {
            let ha = insert(&mut cdt, &a);
            let hb = insert(&mut cdt, &b);
            constraints.push((ha, hb));
        }
    }
    for s in steiner {
        insert(&mut cdt, s);
    }
    for (a, b) in constraints {
        if a != b && cdt.can_add_constraint(a, b) {
            cdt.add_constraint(a, b);
        }
    }
    let mut out = Vec::new();
    for f in cdt.inner_faces() {
        let t: Vec<Vec3> = f.vertices().iter().map(|v| pts[v.fix().index()]).collect();
        let c = (t[0] + t[1] + t[2]) / 3.0;
        if !in_gap(&c) {
            continue;
        }
        let rot = match Polyhedron::from_vertices(2, &t) {
            Ok(p) if p.dim == 2 => p.shape_stats().rotondity,
            _ => 0.0,
        };
        out.push((t, rot));
    }
    out.sort_by_key(|a| face_point_key(&a.0));
    out
}

/// One refinement step for a bad triangle: split an encroached ring edge, or
/// insert the circumcenter as an interior vertex.
fn refine_once(ring: &mut [RingEdge], steiner: &mut Vec<Vec3>, t: &[Vec3], in_gap: &dyn Fn(&Vec3) -> bool) -> bool {
    let cc = circumcenter2(&t[0], &t[1], &t[2]);
    let split = |e: &mut RingEdge, a: Vec3, b: Vec3| -> bool {
        let len = (e.b - e.a).norm();
        let ta = (a - e.a).norm() / len;
        let tb = (b - e.a).norm() / len;
        let mid = 0.5 * (ta + tb);
        if (tb - ta).abs() * len < 1e-6 {
            return false;
        }
        e.splits.push(mid);
        e.splits.sort_by(|x, y| x.partial_cmp(y).unwrap());
        true
    };
    if let Some(cc) = cc {
        let mut enc: Option<(usize, Vec3, Vec3, f64)> = None;
        for (i, e) in ring.iter().enumerate() {
            for (a, b) in e.sub_edges() {
                let r = (b - a).norm() / 2.0;
                let d = (cc - (a + b) / 2.0).norm();
                if d < r - 1e-12 && enc.as_ref().is_none_or(|x| r > x.3) {
                    enc = Some((i, a, b, r));
                }
            }
        }
        if let Some((i, a, b, _)) = enc {
            return split(&mut ring[i], a, b);
        }
        if in_gap(&cc) && steiner.iter().all(|s| (s - cc).norm() > 1e-9) {
            steiner.push(cc);
            return true;
        }
    }
    // otherwise split the longest ring sub-edge touching the triangle
    let mut best: Option<(usize, Vec3, Vec3, f64)> = None;
    for (i, e) in ring.iter().enumerate() {
        for (a, b) in e.sub_edges() {
            let touches = t.iter().any(|p| TOL.same_point(p, &a) || TOL.same_point(p, &b));
            let len = (b - a).norm();
            if touches && best.as_ref().is_none_or(|x| len > x.3) {
                best = Some((i, a, b, len));
            }
        }
    }
    match best {
        Some((i, a, b, _)) => split(&mut ring[i], a, b),
        None => false,
    }
}

/// Cone from the centroid over the boundary of a convex polygon whose edges
/// carry extra vertices.
fn cone_polygon(poly: &Polyhedron, edges: &[&RingEdge]) -> Result<Vec<Polyhedron>> {
    let ring = poly.cyclic_vertices();
    let c = poly.centroid();
    let mut boundary: Vec<Vec3> = Vec::new();
    for i in 0..ring.len() {
        let (u, v) = (ring[i], ring[(i + 1) % ring.len()]);
        boundary.push(u);
        for e in edges {
            if TOL.same_point(&e.a, &u) && TOL.same_point(&e.b, &v) {
                boundary.extend(e.splits.iter().map(|t| e.a + (e.b - e.a) * *t));
            } else if TOL.same_point(&e.a, &v) && TOL.same_point(&e.b, &u) {
                boundary.extend(e.splits.iter().rev().map(|t| e.a + (e.b - e.a) * *t));
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..boundary.len() {
        let tri = [c, boundary[i], boundary[(i + 1) % boundary.len()]];
        out.push(Polyhedron::from_vertices(2, &tri)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_dyadic, carve_region, DyadicGridSpec, Obstacle};

    fn outer_with_hole() -> (Complex, DyadicGridSpec) {
        let spec = DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [8, 8, 1]);
        let full = build_dyadic(&spec).unwrap();
        let hole = Obstacle::Box { min: [2.5, 2.5, 0.0], max: [5.5, 5.5, 0.0] };
        // removes the central 4x4 block
        (carve_region(&full, &[hole], 0.4).unwrap(), spec)
    }

    #[test]
    fn empty_patch_list_is_identity() {
        let (outer, _) = outer_with_hole();
        let (m, r) = merge(&outer, &[], &MergeConfig::default()).unwrap();
        assert_eq!(m.cells().len(), outer.cells().len());
        assert_eq!(r.gap_cell_count, 0);
    }

    #[test]
    fn rotated_patch_merges() {
        let (outer, _) = outer_with_hole();
        assert_eq!(outer.cells().len(), 48);
        let c = Vec3::new(4.0, 4.0, 0.0);
        let angle = std::f64::consts::FRAC_PI_4;
        let (s, co) = angle.sin_cos();
        let origin = c - Vec3::new(co - s, s + co, 0.0);
        let patch_spec = DyadicGridSpec {
            index_set: vec![[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 0]],
            ..DyadicGridSpec::block(2, 1.0, origin, [1, 1, 1])
        }
        .with_planar_rotation(angle);
        let patch = build_dyadic(&patch_spec).unwrap();
        let (m, r) = merge(&outer, &[patch], &MergeConfig::default()).unwrap();
        assert!(r.validity, "{r:?}");
        assert!(r.boundary_preserved);
        assert!(r.measured_min_rotondity >= 0.02);
        assert!((m.volume() - 64.0).abs() < 1e-9);
    }

    #[test]
    fn rotated_cube_in_a_spatial_hole() {
        let spec = DyadicGridSpec::block(3, 1.0, Vec3::zeros(), [6, 6, 6]);
        let full = build_dyadic(&spec).unwrap();
        let hole = Obstacle::Box { min: [2.2, 2.2, 2.2], max: [3.8, 3.8, 3.8] };
        let outer = carve_region(&full, &[hole], 0.1).unwrap();
        assert_eq!(outer.cells().len(), 216 - 8);
        let rot = nalgebra::Rotation3::from_euler_angles(0.3, 0.2, 0.5).into_inner();
        let c = Vec3::new(3.0, 3.0, 3.0);
        let origin = c - rot * Vec3::new(0.4, 0.4, 0.4);
        let patch = build_dyadic(&DyadicGridSpec {
            n: 3,
            stride: 0.8,
            origin,
            rotation: rot,
            index_set: vec![[0, 0, 0]],
        })
        .unwrap();
        let (m, r) = merge(&outer, &[patch], &MergeConfig::default()).unwrap();
        assert!(r.validity, "{r:?}");
        assert!(r.boundary_preserved);
        assert!((m.volume() - 216.0).abs() < 1e-6);
    }

    #[test]
    fn aligned_patch_fills_with_squares() {
        let (outer, spec) = outer_with_hole();
        let patch = build_dyadic(&DyadicGridSpec {
            index_set: vec![[3, 3, 0], [4, 3, 0], [3, 4, 0], [4, 4, 0]],
            ..spec.clone()
        })
        .unwrap();
        let cfg = MergeConfig { lattice: Some(spec), ..Default::default() };
        let (m, r) = merge(&outer, &[patch], &cfg).unwrap();
        assert_eq!(r.gap_cell_count, 12);
        assert!((r.measured_min_rotondity - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        assert!(r.validity && r.boundary_preserved);
        assert_eq!(m.cells().len(), 64);
    }
}
