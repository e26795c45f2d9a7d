//! Dimension-descending radial projection of a set onto the d-skeleton of a
//! complex, and erosion of the result into whole subfaces.
//!
//! Radial projection from a center is projective on each cone spanned by the
//! center and one facet, so every piece is clipped into these sectors and its
//! vertices are mapped. Images are exact convex pieces lying in the facets.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maps::{MapStage, PiecewiseMap};
use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};
use crate::geometry::clip::{clip_all, difference_all, Piece};
use crate::geometry::{point_simplex_distance, HalfSpace, Polyhedron, Vec3, TOL};
use crate::simplicial::SimplicialSet;
use crate::skeleton::Skeleton;

/// Default number of candidate centers.
pub const CENTER_CANDIDATES: usize = 64;
/// Relative uncovered measure below which a face counts as fully covered.
pub const COVER_EPS: f64 = 1e-6;

/// A convex piece of the set together with the smallest face containing it,
/// in that face's coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Carried {
    pub face: FaceId,
    pub piece: Piece,
    pub generation: u32,
}

#[derive(Clone, Debug, PartialEq)]
struct Facet {
    half_space: HalfSpace,
    /// Facet vertices, cyclic when the facet is a polygon.
    vertices: Vec<Vec3>,
}

fn facets(poly: &Polyhedron) -> Vec<Facet> {
    let k = poly.dim;
    let mut out = Vec::new();
    for h in &poly.half_spaces {
        let verts: Vec<Vec3> =
            poly.vertices.iter().filter(|p| h.signed_distance(p).abs() <= 1e-9).copied().collect();
        if verts.len() < k {
            continue;
        }
        let verts = if k == 3 {
            match Polyhedron::from_vertices(poly.ambient_dim, &verts) {
                Ok(f) => f.cyclic_vertices(),
                Err(_) => continue,
            }
        } else {
            verts
        };
        out.push(Facet { half_space: *h, vertices: verts });
    }
    out
}

/// Unit normal of the plane of a 2-dimensional polyhedron.
fn plane_normal(poly: &Polyhedron) -> Vec3 {
    let b = &poly.hull.basis;
    b[0].cross(&b[1]).normalize()
}

/// Half-spaces cutting out the cone over `facet` with apex `center`.
fn sector(poly: &Polyhedron, facet: &Facet, center: &Vec3) -> Vec<HalfSpace> {
    let mut hs = vec![facet.half_space];
    let inward = |m: Vec3, reference: &Vec3| -> HalfSpace {
        let m = if m.dot(&(reference - center)) > 0.0 { -m } else { m };
        HalfSpace::new(m, m.dot(center))
    };
    match poly.dim {
        2 => {
            let nrm = plane_normal(poly);
            let (a, b) = (facet.vertices[0], facet.vertices[1]);
            hs.push(inward(nrm.cross(&(a - center)), &b));
            hs.push(inward(nrm.cross(&(b - center)), &a));
        }
        3 => {
            let v = &facet.vertices;
            let g = v.iter().fold(Vec3::zeros(), |a, p| a + p) / v.len() as f64;
            for i in 0..v.len() {
                let m = (v[i] - center).cross(&(v[(i + 1) % v.len()] - center));
                if m.norm() > 1e-14 {
                    hs.push(inward(m, &g));
                }
            }
        }
        _ => {}
    }
    hs
}

fn central(h: &HalfSpace, center: &Vec3, p: &Vec3) -> Vec3 {
    let den = h.normal.dot(&(p - center));
    if den <= 0.0 {
        return *p;
    }
    center + (p - center) * ((h.offset - h.normal.dot(center)) / den)
}

fn dedup_points(pts: Vec<Vec3>) -> Vec<Vec3> {
    let mut out: Vec<Vec3> = Vec::with_capacity(pts.len());
    for p in pts {
        if !out.iter().any(|q| (p - q).norm() <= TOL.geo) {
            out.push(p);
        }
    }
    out
}

fn piece_distance(center: &Vec3, piece: &Piece) -> f64 {
    piece.simplices().iter().map(|s| point_simplex_distance(center, s)).fold(f64::INFINITY, f64::min)
}

/// Radial image of a piece of `poly` seen from `center`, split by facet.
/// Pieces of lower dimension than the face keep their dimension (degenerate
/// images are dropped); full-dimensional pieces are flattened to their
/// extent in the facet.
fn radial_image(poly: &Polyhedron, facets: &[Facet], center: &Vec3, piece: &Piece) -> Result<Vec<Piece>> {
    if piece_distance(center, piece) <= TOL.geo {
        return Err(Error::CenterHit);
    }
    let k = poly.dim;
    let mut out = Vec::new();
    if k == 1 {
        // Segment face: everything beyond the center goes to the far vertex.
        let dir = piece.vertex_mean() - center;
        for f in facets {
            if f.half_space.normal.dot(&dir) > 0.0 {
                out.push(Piece::new(0, vec![f.vertices[0]]));
            }
        }
        return Ok(out);
    }
    for f in facets {
        let Some(part) = clip_all(piece, &sector(poly, f, center)) else { continue };
        let pts: Vec<Vec3> = part.points.iter().map(|p| central(&f.half_space, center, p)).collect();
        if part.dim < k {
            let img = Piece::new(part.dim, if part.dim == 2 { dedup_points(pts) } else { pts });
            if img.dim == 2 && img.points.len() < 3 {
                continue;
            }
            if !img.is_degenerate() {
                out.push(img);
            }
        } else {
            // k == 2: flatten onto the edge.
            let (a, b) = (f.vertices[0], f.vertices[1]);
            let t = (b - a).normalize();
            let lo = pts.iter().map(|p| (p - a).dot(&t)).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| (p - a).dot(&t)).fold(f64::NEG_INFINITY, f64::max);
            if hi - lo > TOL.geo {
                out.push(Piece::new(1, vec![a + t * lo, a + t * hi]));
            } else {
                out.push(Piece::new(0, vec![a + t * lo]));
            }
        }
    }
    Ok(out)
}

/// Radial image of one simplicial piece; exposed for the public `apply_map`.
pub(crate) fn radial_image_of(poly: &Polyhedron, center: &Vec3, piece: &Piece) -> Result<Vec<Piece>> {
    radial_image(poly, &facets(poly), center, piece)
}

/// Face lookups with cached closures and periodic shifts.
pub(crate) struct Locator<'a> {
    complex: &'a Complex,
    closures: HashMap<FaceId, Vec<FaceId>>,
    shifts: Vec<Vec3>,
}

impl<'a> Locator<'a> {
    pub(crate) fn new(complex: &'a Complex) -> Self {
        let mut shifts = vec![Vec3::zeros()];
        if let Some(t) = &complex.periodic {
            for a in 0..complex.ambient_dim {
                let mut next = Vec::new();
                for s in &shifts {
                    for m in [-1.0, 1.0] {
                        let mut q = *s;
                        q[a] += m * t.period[a];
                        next.push(q);
                    }
                }
                shifts.extend(next);
            }
        }
        Locator { complex, closures: HashMap::new(), shifts }
    }

    fn closure(&mut self, f: FaceId) -> &[FaceId] {
        let cx = self.complex;
        self.closures.entry(f).or_insert_with(|| cx.closure(f))
    }

    /// Smallest face in the closure of `scope` (other than `exclude`)
    /// containing all points, with the translation into that face's frame.
    pub(crate) fn carrier(&mut self, scope: FaceId, exclude: Option<FaceId>, pts: &[Vec3]) -> Option<(FaceId, Vec3)> {
        let shifts = self.shifts.clone();
        let cx = self.complex;
        let closure = self.closure(scope).to_vec();
        let scale = 1.0 + cx.face(scope).stats.outer_radius;
        for tol in [1e-9, 1e-7, 1e-5] {
            for &f in &closure {
                if Some(f) == exclude {
                    continue;
                }
                let poly = &cx.face(f).polyhedron;
                for s in &shifts {
                    if pts.iter().all(|p| poly.contains(&(p - s), tol * scale)) {
                        return Some((f, *s));
                    }
                }
            }
        }
        None
    }
}

fn translate(piece: &Piece, s: &Vec3) -> Piece {
    Piece::new(piece.dim, piece.points.iter().map(|p| p - s).collect())
}

/// Splits a set into convex pieces carried by faces of the complex.
pub fn distribute(complex: &Complex, e: &SimplicialSet) -> Result<Vec<Carried>> {
    let mut loc = Locator::new(complex);
    let mut out = Vec::new();
    let mut lost = 0.0;
    for s in &e.simplices {
        let piece = Piece::from_simplex(&s.vertices());
        let total = piece.measure();
        let mut kept = 0.0;
        let bb = crate::geometry::Aabb::from_points(&piece.points);
        for cell in complex.cells_overlapping(&bb) {
            let Some(part) = clip_all(&piece, &complex.face(cell).polyhedron.half_spaces) else { continue };
            if part.is_degenerate() && part.dim > 0 {
                continue;
            }
            let Some((f, shift)) = loc.carrier(cell, None, &part.points) else { continue };
            if complex.face(f).cells.first() != Some(&cell) {
                continue;
            }
            kept += part.measure();
            out.push(Carried { face: f, piece: translate(&part, &shift), generation: s.generation });
        }
        if e.dim > 0 {
            lost += (total - kept).max(0.0);
        } else if kept == 0.0 {
            lost += 1.0;
        }
    }
    let scale = e.measure().max(1.0);
    if lost > 1e-9 * scale {
        return Err(Error::OutsideComplex { measure: lost });
    }
    Ok(out)
}

/// Result of [`optimal_center`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterChoice {
    pub center: [f64; 3],
    /// Projected measure at the chosen center.
    pub measure: f64,
    /// Mean projected measure over accepted candidates.
    pub mean: f64,
    pub accepted: usize,
    pub rejected: usize,
}

impl CenterChoice {
    pub fn point(&self) -> Vec3 {
        Vec3::from(self.center)
    }
}

fn image_measure(poly: &Polyhedron, facets: &[Facet], center: &Vec3, pieces: &[Piece]) -> Result<f64> {
    let mut m = 0.0;
    for p in pieces {
        for img in radial_image(poly, facets, center, p)? {
            if img.dim == p.dim {
                m += img.measure();
            }
        }
    }
    Ok(m)
}

fn choose_center(poly: &Polyhedron, facets: &[Facet], pieces: &[Piece], rng: &mut ChaCha8Rng, candidates: usize) -> Result<CenterChoice> {
    let stats = poly.shape_stats();
    let c0 = stats.center();
    let radius = stats.inner_radius / 2.0;
    let clearance = stats.inner_radius / 100.0;
    let k = poly.dim;
    let mut best: Option<(Vec3, f64)> = None;
    let mut sum = 0.0;
    let mut accepted = 0;
    let mut rejected = 0;
    for _ in 0..candidates {
        let local = loop {
            let v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                break v;
            }
        };
        let mut c = c0;
        for (b, x) in poly.hull.basis.iter().zip(&local) {
            c += b * (x * radius);
        }
        if pieces.iter().any(|p| piece_distance(&c, p) < clearance) {
            rejected += 1;
            continue;
        }
        let m = match image_measure(poly, facets, &c, pieces) {
            Ok(m) => m,
            Err(Error::CenterHit) => {
                rejected += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        sum += m;
        accepted += 1;
        if best.is_none_or(|(_, b)| m < b) {
            best = Some((c, m));
        }
    }
    let Some((c, m)) = best else { return Err(Error::NoCenterFound { candidates }) };
    Ok(CenterChoice { center: [c[0], c[1], c[2]], measure: m, mean: sum / accepted as f64, accepted, rejected })
}

/// Center in the half-size inscribed ball of `face` minimising the measure of
/// the radial image of `e`, chosen among `CENTER_CANDIDATES` seeded samples.
pub fn optimal_center(face: &Polyhedron, e: &SimplicialSet, seed: u64) -> Result<CenterChoice> {
    if e.dim >= face.dim {
        return Err(Error::DimensionMismatch(format!("set of dimension {} in a {}-face", e.dim, face.dim)));
    }
    let pieces: Vec<Piece> = e.pieces();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    choose_center(face, &facets(face), &pieces, &mut rng, CENTER_CANDIDATES)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub seed: u64,
    pub candidates: usize,
}

impl Default for CascadeConfig {
    fn default() -> Self {
        CascadeConfig { seed: 0, candidates: CENTER_CANDIDATES }
    }
}

/// Measure change over one level of the cascade.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub faces: usize,
    pub measure_before: f64,
    pub measure_after: f64,
    pub ratio: f64,
}

/// Per-face projection record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub level: usize,
    pub face: FaceId,
    pub rotondity: f64,
    pub before: f64,
    pub after: f64,
    pub ratio: f64,
    pub mean: f64,
    /// `ratio * rotondity^(2d)`.
    pub k_emp: f64,
}

#[derive(Clone, Debug)]
pub struct Cascade {
    pub set: SimplicialSet,
    pub carried: Vec<Carried>,
    pub map: PiecewiseMap,
    pub ledger: Vec<LevelRecord>,
    pub centers: Vec<CenterRecord>,
}

fn face_seed(seed: u64, face: FaceId) -> u64 {
    seed ^ (face as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn pieces_measure(c: &[Carried], d: usize) -> f64 {
    c.iter().filter(|p| p.piece.dim == d).map(|p| p.piece.measure()).sum()
}

/// Pushes a set into the d-skeleton by radially projecting, level by level
/// from the top dimension down to d + 1, the content of each face from a
/// sampled center.
pub fn ff_cascade(complex: &Complex, e: &SimplicialSet, d: usize, cfg: &CascadeConfig) -> Result<Cascade> {
    if e.dim != d || d >= complex.dim {
        return Err(Error::DimensionMismatch(format!(
            "cascade of a {}-set to the {d}-skeleton of a {}-complex",
            e.dim, complex.dim
        )));
    }
    let mut carried = distribute(complex, e)?;
    let mut loc = Locator::new(complex);
    let mut map = PiecewiseMap::identity();
    let mut ledger = Vec::new();
    let mut centers = Vec::new();
    for k in (d + 1..=complex.dim).rev() {
        let before = pieces_measure(&carried, d);
        let mut groups: BTreeMap<FaceId, Vec<Carried>> = BTreeMap::new();
        let mut rest = Vec::with_capacity(carried.len());
        for c in carried {
            if complex.face(c.face).dim == k {
                groups.entry(c.face).or_default().push(c);
            } else {
                rest.push(c);
            }
        }
        let touched = groups.len();
        for (fid, content) in groups {
            let poly = &complex.face(fid).polyhedron;
            let fc = facets(poly);
            let pieces: Vec<Piece> = content.iter().map(|c| c.piece.clone()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(face_seed(cfg.seed, fid));
            let choice = choose_center(poly, &fc, &pieces, &mut rng, cfg.candidates)?;
            let center = choice.point();
            let content_measure: f64 = pieces.iter().map(|p| p.measure()).sum();
            let mut after = 0.0;
            for c in content {
                for img in radial_image(poly, &fc, &center, &c.piece)? {
                    let Some((f, shift)) = loc.carrier(fid, Some(fid), &img.points) else {
                        return Err(Error::InvalidPolyhedron(format!("radial image escaped the boundary of face {fid}")));
                    };
                    after += img.measure();
                    rest.push(Carried { face: f, piece: translate(&img, &shift), generation: c.generation + 1 });
                }
            }
            let rot = complex.face(fid).stats.rotondity;
            let ratio = if content_measure > 0.0 { after / content_measure } else { 1.0 };
            centers.push(CenterRecord {
                level: k,
                face: fid,
                rotondity: rot,
                before: content_measure,
                after,
                ratio,
                mean: choice.mean,
                k_emp: ratio * rot.powi(2 * d as i32),
            });
            map.push(MapStage::Radial { face: fid, polyhedron: poly.clone(), center });
        }
        carried = rest;
        let after = pieces_measure(&carried, d);
        ledger.push(LevelRecord {
            level: k,
            faces: touched,
            measure_before: before,
            measure_after: after,
            ratio: if before > 0.0 { after / before } else { 1.0 },
        });
    }
    carried.sort_by_key(|c| c.face);
    let mut set = SimplicialSet::new(e.n, d);
    for c in &carried {
        set.push_piece(&c.piece, c.generation);
    }
    Ok(Cascade { set, carried, map, ledger, centers })
}

/// Outcome of [`erode`].
#[derive(Clone, Debug, PartialEq)]
pub struct Erosion {
    pub skeleton: Skeleton,
    /// Lower-dimensional faces left behind by collapsed content.
    pub lower: Vec<FaceId>,
    /// Faces whose content was partial and got projected away.
    pub collapsed: Vec<FaceId>,
    pub measure_before: f64,
    pub measure_after: f64,
}

/// Uncovered parts of a face and their total measure.
fn uncovered(poly: &Polyhedron, pieces: &[Piece]) -> (Vec<Piece>, f64) {
    match poly.dim {
        1 => {
            let (a, b) = (poly.vertices[0], poly.vertices[1]);
            let len = (b - a).norm();
            let t = (b - a) / len;
            let mut iv: Vec<(f64, f64)> = pieces
                .iter()
                .filter(|p| p.dim == 1)
                .map(|p| {
                    let (u, v) = ((p.points[0] - a).dot(&t), (p.points[1] - a).dot(&t));
                    (u.min(v).max(0.0), u.max(v).min(len))
                })
                .collect();
            iv.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
            let mut gaps = Vec::new();
            let mut cur = 0.0;
            for (lo, hi) in iv {
                if lo > cur {
                    gaps.push((cur, lo));
                }
                cur = f64::max(cur, hi);
            }
            if cur < len {
                gaps.push((cur, len));
            }
            let total = gaps.iter().map(|g| g.1 - g.0).sum();
            (gaps.into_iter().map(|(lo, hi)| Piece::new(1, vec![a + t * lo, a + t * hi])).collect(), total)
        }
        2 => {
            let face = Piece::new(2, poly.cyclic_vertices());
            let cutters: Vec<Piece> = pieces.iter().filter(|p| p.dim == 2).cloned().collect();
            let parts = difference_all(&face, &cutters);
            let total = parts.iter().map(|p| p.measure()).sum();
            (parts, total)
        }
        _ => (Vec::new(), 0.0),
    }
}

/// Turns a set lying in the d-skeleton into a union of whole d-faces: fully
/// covered faces are kept, partially covered ones are radially emptied onto
/// their boundary from a center in an uncovered region.
pub fn erode(complex: &Complex, e: &SimplicialSet, d: usize) -> Result<Erosion> {
    let carried = distribute(complex, e)?;
    erode_carried(complex, &carried, d)
}

pub fn erode_carried(complex: &Complex, carried: &[Carried], d: usize) -> Result<Erosion> {
    let mut content: BTreeMap<FaceId, Vec<Piece>> = BTreeMap::new();
    for c in carried {
        let dim = complex.face(c.face).dim;
        if dim > d {
            return Err(Error::DimensionMismatch(format!("piece carried by a {dim}-face, above the {d}-skeleton")));
        }
        content.entry(c.face).or_default().push(c.piece.clone());
    }
    let before = pieces_measure(carried, d);
    let mut loc = Locator::new(complex);
    let mut kept = Vec::new();
    let mut lower = Vec::new();
    let mut collapsed = Vec::new();
    for j in (0..=d).rev() {
        let faces: Vec<FaceId> = content.keys().copied().filter(|&f| complex.face(f).dim == j).collect();
        for fid in faces {
            let pieces = content.remove(&fid).unwrap_or_default();
            let face = complex.face(fid);
            if j == 0 {
                lower.push(fid);
                continue;
            }
            let relevant: Vec<Piece> = pieces.into_iter().filter(|p| p.dim == j).collect();
            if relevant.is_empty() {
                continue;
            }
            let (gaps, gap) = uncovered(&face.polyhedron, &relevant);
            if gap < COVER_EPS * face.measure {
                if j == d {
                    kept.push(fid);
                } else {
                    lower.push(fid);
                }
                continue;
            }
            collapsed.push(fid);
            let widest = gaps
                .iter()
                .max_by(|a, b| a.measure().partial_cmp(&b.measure()).unwrap())
                .expect("a partially covered face has a gap");
            let center = widest.centroid();
            let fc = facets(&face.polyhedron);
            for p in &relevant {
                for img in radial_image(&face.polyhedron, &fc, &center, p)? {
                    let Some((f, shift)) = loc.carrier(fid, Some(fid), &img.points) else {
                        return Err(Error::InvalidPolyhedron(format!("erosion image escaped face {fid}")));
                    };
                    content.entry(f).or_default().push(translate(&img, &shift));
                }
            }
        }
    }
    let skeleton = Skeleton::new(d, kept);
    let keep_closure: std::collections::BTreeSet<FaceId> =
        skeleton.face_ids.iter().flat_map(|&f| complex.closure(f)).collect();
    lower.retain(|f| !keep_closure.contains(f));
    lower.sort_unstable();
    lower.dedup();
    let after = skeleton.measure(complex);
    Ok(Erosion { skeleton, lower, collapsed, measure_before: before, measure_after: after })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use crate::grid::{build_dyadic, DyadicGridSpec};

    fn grid2(m: usize) -> Complex {
        build_dyadic(&DyadicGridSpec::block(2, 1.0, point(&[0., 0.]), [m, m, 1])).unwrap()
    }

    fn edge(cx: &Complex, a: [f64; 2], b: [f64; 2]) -> FaceId {
        let va = cx.nearest_vertex_face(&point(&a));
        let vb = cx.nearest_vertex_face(&point(&b));
        let (va, vb) = (cx.face(va).vertices[0], cx.face(vb).vertices[0]);
        cx.face_by_vertices(&[va.min(vb), va.max(vb)]).unwrap()
    }

    #[test]
    fn diagonal_segment_lands_on_edges() {
        let cx = grid2(1);
        let e = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 1.])]).unwrap();
        let out = ff_cascade(&cx, &e, 1, &CascadeConfig::default()).unwrap();
        assert!(out.carried.iter().all(|c| cx.face(c.face).dim <= 1));
        let m = out.set.measure();
        // The image of the diagonal covers two opposite corners' edge pairs.
        assert!((2.0 - 1e-9..=4.0 + 1e-9).contains(&m), "{m}");
        assert_eq!(out.ledger.len(), 1);
        let again = ff_cascade(&cx, &out.set, 1, &CascadeConfig::default()).unwrap();
        assert_eq!(again.set, out.set);
    }

    #[test]
    fn skeleton_sets_are_fixed() {
        let cx = grid2(2);
        let e = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[1., 2.])]).unwrap();
        let out = ff_cascade(&cx, &e, 1, &CascadeConfig::default()).unwrap();
        assert!((out.set.measure() - 3.0).abs() < 1e-12);
        assert!(out.ledger.iter().all(|l| (l.ratio - 1.0).abs() < 1e-12));
    }

    #[test]
    fn small_triangle_stays_local() {
        let cx = build_dyadic(&DyadicGridSpec::block(3, 1.0, point(&[0., 0., 0.]), [2, 2, 2])).unwrap();
        let t = vec![point(&[0.2, 0.2, 0.3]), point(&[0.6, 0.3, 0.4]), point(&[0.3, 0.7, 0.6])];
        let e = SimplicialSet::from_simplices(3, 2, &[t]).unwrap();
        let out = ff_cascade(&cx, &e, 2, &CascadeConfig::default()).unwrap();
        let cell = cx.locate(&point(&[0.5, 0.5, 0.5])).unwrap();
        let closure = cx.closure(cell);
        assert!(out.carried.iter().all(|c| closure.contains(&c.face) && cx.face(c.face).dim <= 2));
        assert!(out.set.measure() > 0.0);
    }

    #[test]
    fn erosion_examples() {
        let cx = grid2(3);
        let three = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[2., 0.]), point(&[2., 1.])]).unwrap();
        let er = erode(&cx, &three, 1).unwrap();
        assert_eq!(er.skeleton.face_ids.len(), 3);
        let mut e = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[2., 0.])]).unwrap();
        e.push(&[point(&[0., 1.]), point(&[0., 1.5])]).unwrap();
        let er = erode(&cx, &e, 1).unwrap();
        assert_eq!(er.skeleton.face_ids, {
            let mut v = vec![edge(&cx, [0., 0.], [1., 0.]), edge(&cx, [1., 0.], [2., 0.])];
            v.sort();
            v
        });
        assert!(er.measure_after < er.measure_before);
        let again = erode(&cx, &er.skeleton.to_set(&cx), 1).unwrap();
        assert_eq!(again.skeleton, er.skeleton);
        let empty = erode(&cx, &SimplicialSet::new(2, 1), 1).unwrap();
        assert!(empty.skeleton.face_ids.is_empty());
    }

    #[test]
    fn optimal_center_beats_twice_the_mean() {
        let sq = Polyhedron::axis_box(2, &[0., 0.], &[1., 1.]).unwrap();
        let e = SimplicialSet::polyline(2, &[point(&[0.1, 0.5]), point(&[0.9, 0.5])]).unwrap();
        let c = optimal_center(&sq, &e, 7).unwrap();
        assert!(c.measure <= 2.0 * c.mean);
        assert!(c.accepted > 0);
        let boundary = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[1., 1.])]).unwrap();
        let c = optimal_center(&sq, &boundary, 7).unwrap();
        assert!((c.measure - 2.0).abs() < 1e-12);
    }

    #[test]
    fn outside_pieces_are_reported() {
        let cx = grid2(1);
        let e = SimplicialSet::polyline(2, &[point(&[0.5, 0.5]), point(&[1.5, 0.5])]).unwrap();
        assert!(matches!(ff_cascade(&cx, &e, 1, &CascadeConfig::default()), Err(Error::OutsideComplex { .. })));
    }
}
