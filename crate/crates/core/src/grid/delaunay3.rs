//! Bowyer-Watson Delaunay tetrahedralization and the spatial gap fill built on it.
//!
//! Grid vertices are highly cospherical, so the combinatorics are computed on a
//! jittered copy of the points; the resulting tetrahedra use the exact
//! coordinates and flat ones are discarded.

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::merge::{face_point_key, MergeConfig, MergeReport};
use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};
use crate::geometry::{simplex_volume, Aabb, Polyhedron, Vec3};

struct Tet {
    v: [usize; 4],
    center: Vec3,
    r2: f64,
    alive: bool,
}

fn circumsphere(p: &[Vec3; 4]) -> Option<(Vec3, f64)> {
    let a = p[1] - p[0];
    let b = p[2] - p[0];
    let c = p[3] - p[0];
    let m = nalgebra::Matrix3::new(a[0], a[1], a[2], b[0], b[1], b[2], c[0], c[1], c[2]);
    let rhs = Vec3::new(a.norm_squared(), b.norm_squared(), c.norm_squared()) * 0.5;
    let x = m.lu().solve(&rhs)?;
    let center = p[0] + x;
    Some((center, x.norm_squared()))
}

/// Delaunay tetrahedra (vertex index quadruples) of a point set.
pub fn delaunay_tetrahedra(points: &[Vec3]) -> Vec<[usize; 4]> {
    if points.len() < 4 {
        return vec![];
    }
    let bb = Aabb::from_points(points);
    let c = (bb.min + bb.max) / 2.0;
    let s = bb.diagonal().max(1e-9) * 50.0;
    let mut pts: Vec<Vec3> = points.to_vec();
    let base = pts.len();
    pts.push(c + Vec3::new(0.0, 0.0, 3.0 * s));
    pts.push(c + Vec3::new(-2.0 * s, -s, -s));
    pts.push(c + Vec3::new(2.0 * s, -s, -s));
    pts.push(c + Vec3::new(0.0, 2.0 * s, -s));
    let mk = |v: [usize; 4], pts: &[Vec3]| -> Option<Tet> {
        let (center, r2) = circumsphere(&[pts[v[0]], pts[v[1]], pts[v[2]], pts[v[3]]])?;
        Some(Tet { v, center, r2, alive: true })
    };
    let mut tets = vec![mk([base, base + 1, base + 2, base + 3], &pts).expect("super tetrahedron")];
    for i in 0..base {
        let p = pts[i];
        let bad: Vec<usize> = tets
            .iter()
            .enumerate()
            .filter(|(_, t)| t.alive && (p - t.center).norm_squared() < t.r2 * (1.0 + 1e-12))
            .map(|(k, _)| k)
            .collect();
        let mut faces: HashMap<[usize; 3], usize> = HashMap::new();
        for &k in &bad {
            let v = tets[k].v;
            for skip in 0..4 {
                let mut f = [0; 3];
                let mut j = 0;
                for (q, &x) in v.iter().enumerate() {
                    if q != skip {
                        f[j] = x;
                        j += 1;
                    }
                }
                f.sort_unstable();
                *faces.entry(f).or_insert(0) += 1;
            }
            tets[k].alive = false;
        }
        let mut boundary: Vec<[usize; 3]> = faces.into_iter().filter(|(_, n)| *n == 1).map(|(f, _)| f).collect();
        boundary.sort_unstable();
        for f in boundary {
            if let Some(t) = mk([f[0], f[1], f[2], i], &pts) {
                tets.push(t);
            }
        }
        if tets.len() > 8 * (base + 16) * 8 {
            tets.retain(|t| t.alive);
        }
    }
    let mut out: Vec<[usize; 4]> = tets
        .into_iter()
        .filter(|t| t.alive && t.v.iter().all(|&x| x < base))
        .map(|t| {
            let mut v = t.v;
            v.sort_unstable();
            v
        })
        .collect();
    out.sort_unstable();
    out
}

/// Ray parity test against a triangle soup.
pub(crate) fn inside_surface(p: &Vec3, tris: &[[Vec3; 3]]) -> bool {
    let dir = Vec3::new(0.5773502691, 0.5773713, 0.57753).normalize();
    let mut inside = false;
    for t in tris {
        let e1 = t[1] - t[0];
        let e2 = t[2] - t[0];
        let h = dir.cross(&e2);
        let a = e1.dot(&h);
        if a.abs() < 1e-14 {
            continue;
        }
        let f = 1.0 / a;
        let s = p - t[0];
        let u = f * s.dot(&h);
        if !(0.0..=1.0).contains(&u) {
            continue;
        }
        let q = s.cross(&e1);
        let v = f * dir.dot(&q);
        if v < 0.0 || u + v > 1.0 {
            continue;
        }
        if f * e2.dot(&q) > 1e-12 {
            inside = !inside;
        }
    }
    inside
}

fn square_triangles(poly: &Polyhedron) -> Vec<[Vec3; 3]> {
    poly.simplices().into_iter().map(|t| [t[0], t[1], t[2]]).collect()
}

struct Surface {
    faces: Vec<FaceId>,
    tris: Vec<[Vec3; 3]>,
}

/// Boundary facets grouped into connected surfaces (sharing edges).
fn boundary_surfaces(c: &Complex) -> Vec<Surface> {
    let bf = c.boundary_faces();
    let mut edge_owner: HashMap<FaceId, Vec<usize>> = HashMap::new();
    for (i, &f) in bf.iter().enumerate() {
        for &e in &c.faces[f].children {
            edge_owner.entry(e).or_default().push(i);
        }
    }
    let mut comp = vec![usize::MAX; bf.len()];
    let mut ncomp = 0;
    for s in 0..bf.len() {
        if comp[s] != usize::MAX {
            continue;
        }
        let mut stack = vec![s];
        comp[s] = ncomp;
        while let Some(i) = stack.pop() {
            for e in &c.faces[bf[i]].children {
                for &j in &edge_owner[e] {
                    if comp[j] == usize::MAX {
                        comp[j] = ncomp;
                        stack.push(j);
                    }
                }
            }
        }
        ncomp += 1;
    }
    let mut out: Vec<Surface> = (0..ncomp).map(|_| Surface { faces: vec![], tris: vec![] }).collect();
    for (i, &f) in bf.iter().enumerate() {
        out[comp[i]].faces.push(f);
        out[comp[i]].tris.extend(square_triangles(&c.faces[f].polyhedron));
    }
    out
}

/// Volume enclosed by boundary facets, using normals pointing away from the owner cells.
fn enclosed_volume(c: &Complex, faces: &[FaceId]) -> f64 {
    let mut v = 0.0;
    for &f in faces {
        let face = &c.faces[f];
        let cell = &c.faces[face.cells[0]].polyhedron;
        let u = face.polyhedron.normal_space()[0];
        let x = face.polyhedron.centroid();
        // outward normal of the enclosed region points into the owner cell
        let n = if u.dot(&(cell.centroid() - x)) > 0.0 { u } else { -u };
        v += x.dot(&n) * face.measure / 3.0;
    }
    v.abs()
}

struct Attempt {
    cells: Vec<Polyhedron>,
    new_cells: Vec<Polyhedron>,
    gap: usize,
    presplit: usize,
    gap_volume: f64,
}

pub(crate) fn merge_spatial(outer: &Complex, patches: &[Complex], cfg: &MergeConfig) -> Result<(Complex, MergeReport)> {
    let surfaces = boundary_surfaces(outer);
    let envelope = surfaces
        .iter()
        .enumerate()
        .max_by(|a, b| {
            let d = |s: &Surface| Aabb::from_points(s.tris.iter().flat_map(|t| t.iter())).diagonal();
            d(a.1).partial_cmp(&d(b.1)).unwrap()
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut holes: Vec<(usize, Vec<usize>)> = Vec::new();
    for (pi, p) in patches.iter().enumerate() {
        let probe = p.faces[p.cells()[0]].polyhedron.centroid();
        let h = surfaces
            .iter()
            .enumerate()
            .find(|(i, s)| *i != envelope && inside_surface(&probe, &s.tris))
            .map(|(i, _)| i)
            .ok_or_else(|| Error::Config(format!("patch {pi} does not lie in a hole of the outer grid")))?;
        match holes.iter_mut().find(|(s, _)| *s == h) {
            Some(e) => e.1.push(pi),
            None => holes.push((h, vec![pi])),
        }
    }
    let patch_surfaces: Vec<Vec<Surface>> = patches.iter().map(boundary_surfaces).collect();
    let hole_volume: f64 = holes.iter().map(|(h, _)| enclosed_volume(outer, &surfaces[*h].faces)).sum();
    let patch_volume: f64 = patches.iter().map(|p| p.volume()).sum();
    let mut filled: BTreeSet<Vec<[i64; 3]>> = BTreeSet::new();
    for (h, _) in &holes {
        for &f in &surfaces[*h].faces {
            filled.insert(face_point_key(&outer.faces[f].polyhedron.vertices));
        }
    }

    let mut last_err = None;
    let mut best: Option<(Complex, MergeReport)> = None;
    for seed in 0..cfg.seeds.max(1) {
        let attempt = match try_fill(outer, patches, &surfaces, &patch_surfaces, &holes, seed) {
            Some(a) => a,
            None => continue,
        };
        let union_error = (attempt.gap_volume - (hole_volume - patch_volume)).abs() / hole_volume.max(1e-300);
        let merged = Complex::from_polyhedra(3, attempt.cells, None)?;
        let mut report = super::merge::finish_report(
            outer,
            patches,
            &merged,
            &attempt.new_cells,
            attempt.gap,
            attempt.presplit,
            union_error,
            &filled,
        );
        report.validity &= union_error < 1e-6;
        if report.measured_min_rotondity < cfg.rotondity_floor {
            last_err = Some(Error::MergeDegenerate {
                min_rotondity: report.measured_min_rotondity,
                floor: cfg.rotondity_floor,
            });
            continue;
        }
        if report.validity {
            return Ok((merged, report));
        }
        if best.is_none() {
            best = Some((merged, report));
        }
    }
    if let Some(b) = best {
        return Ok(b);
    }
    Err(last_err.unwrap_or(Error::MergeDegenerate { min_rotondity: 0.0, floor: cfg.rotondity_floor }))
}

fn try_fill(
    outer: &Complex,
    patches: &[Complex],
    surfaces: &[Surface],
    patch_surfaces: &[Vec<Surface>],
    holes: &[(usize, Vec<usize>)],
    seed: u64,
) -> Option<Attempt> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0000 + seed);
    let mut gap_cells: Vec<Polyhedron> = Vec::new();
    // ring face (complex index, face id) -> chosen diagonal triangles
    let mut ring_split: HashMap<(usize, FaceId), Vec<[Vec3; 3]>> = HashMap::new();
    let mut gap_volume = 0.0;
    for (h, pis) in holes {
        let hole = &surfaces[*h];
        let mut ring_faces: Vec<(usize, FaceId)> = hole.faces.iter().map(|&f| (0usize, f)).collect();
        let mut patch_tris: Vec<[Vec3; 3]> = Vec::new();
        for &pi in pis {
            for s in &patch_surfaces[pi] {
                ring_faces.extend(s.faces.iter().map(|&f| (pi + 1, f)));
                patch_tris.extend(s.tris.iter().copied());
            }
        }
        let cx = |k: usize| if k == 0 { outer } else { &patches[k - 1] };
        let mut pts: Vec<Vec3> = Vec::new();
        let mut index: HashMap<Vec<[i64; 3]>, usize> = HashMap::new();
        for &(k, f) in &ring_faces {
            for v in &cx(k).faces[f].polyhedron.vertices {
                let key = face_point_key(&[*v]);
                index.entry(key).or_insert_with(|| {
                    pts.push(*v);
                    pts.len() - 1
                });
            }
        }
        let scale = Aabb::from_points(&pts).diagonal();
        let jittered: Vec<Vec3> = pts
            .iter()
            .map(|p| p + Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 1e-6 * scale)
            .collect();
        let tets = delaunay_tetrahedra(&jittered);
        let mut kept: Vec<[usize; 4]> = Vec::new();
        for t in tets {
            let q = [pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]];
            let vol = simplex_volume(&q);
            if vol <= 1e-9 * scale.powi(3) {
                continue;
            }
            let c = (q[0] + q[1] + q[2] + q[3]) / 4.0;
            if inside_surface(&c, &hole.tris) && !inside_surface(&c, &patch_tris) {
                kept.push(t);
                gap_volume += vol;
            }
        }
        // every ring square must appear as two triangles of kept tetrahedra
        let mut tri_faces: BTreeSet<[usize; 3]> = BTreeSet::new();
        for t in &kept {
            for skip in 0..4 {
                let mut f: Vec<usize> = t.iter().enumerate().filter(|(i, _)| *i != skip).map(|(_, &x)| x).collect();
                f.sort_unstable();
                tri_faces.insert([f[0], f[1], f[2]]);
            }
        }
        for &(k, f) in &ring_faces {
            let verts = &cx(k).faces[f].polyhedron.vertices;
            let ids: Vec<usize> = verts.iter().map(|v| index[&face_point_key(&[*v])]).collect();
            let mut tris = Vec::new();
            for a in 0..ids.len() {
                for b in a + 1..ids.len() {
                    for c in b + 1..ids.len() {
                        let mut key = [ids[a], ids[b], ids[c]];
                        key.sort_unstable();
                        if tri_faces.contains(&key) {
                            tris.push([verts[a], verts[b], verts[c]]);
                        }
                    }
                }
            }
            let area: f64 = tris.iter().map(|t| simplex_volume(t)).sum();
            if (area - cx(k).faces[f].measure).abs() > 1e-9 * cx(k).faces[f].measure.max(1.0) {
                return None;
            }
            if verts.len() > 3 {
                ring_split.insert((k, f), tris);
            }
        }
        for t in kept {
            let q = [pts[t[0]], pts[t[1]], pts[t[2]], pts[t[3]]];
            gap_cells.push(Polyhedron::from_vertices(3, &q).ok()?);
        }
    }
    // cells touching a split ring face are coned from their centroid
    let mut cells = Vec::new();
    let mut new_cells = gap_cells.clone();
    let mut presplit = 0;
    let sources: Vec<&Complex> = std::iter::once(outer).chain(patches.iter()).collect();
    for (k, cx) in sources.iter().enumerate() {
        for &cell in cx.cells() {
            let face = &cx.faces[cell];
            let facets: Vec<FaceId> = face.children.clone();
            if !facets.iter().any(|f| ring_split.contains_key(&(k, *f))) {
                cells.push(face.polyhedron.clone());
                continue;
            }
            presplit += 1;
            let c = face.polyhedron.centroid();
            for f in facets {
                match ring_split.get(&(k, f)) {
                    Some(tris) => {
                        for t in tris {
                            let p = Polyhedron::from_vertices(3, &[c, t[0], t[1], t[2]]).ok()?;
                            new_cells.push(p.clone());
                            cells.push(p);
                        }
                    }
                    None => {
                        let mut v = cx.faces[f].polyhedron.vertices.clone();
                        v.push(c);
                        let p = Polyhedron::from_vertices(3, &v).ok()?;
                        new_cells.push(p.clone());
                        cells.push(p);
                    }
                }
            }
        }
    }
    let gap = gap_cells.len();
    cells.extend(gap_cells);
    Some(Attempt { cells, new_cells, gap, presplit, gap_volume })
}
