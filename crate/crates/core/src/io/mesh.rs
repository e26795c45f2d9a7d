//! OFF meshes for skeletons and simplicial sets. Points, edges and polygons
//! are all written as faces, with 1, 2 and k vertex indices respectively.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use crate::complex::{Complex, VertexStore};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::simplicial::SimplicialSet;
use crate::skeleton::{core_decompose, Skeleton};

/// Vertex list and faces by vertex index.
#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    /// Ambient dimension.
    pub n: usize,
    /// Dimension of the exported set.
    pub dim: usize,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Vec<usize>>,
}

fn lex(a: &[f64; 3], b: &[f64; 3]) -> Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])).then(a[2].total_cmp(&b[2]))
}

/// Rotates a polygon so its smallest index comes first, keeping the cyclic
/// order; edges and points are sorted.
fn normalize(face: &mut [usize]) {
    if face.len() <= 2 {
        face.sort_unstable();
    } else if let Some(k) = (0..face.len()).min_by_key(|&i| face[i]) {
        face.rotate_left(k);
    }
}

impl Mesh {
    /// Builds a mesh from faces given by their points in cyclic order.
    /// Coincident points are merged and vertices sorted lexicographically.
    pub fn from_polygons(n: usize, dim: usize, polygons: &[Vec<Vec3>]) -> Mesh {
        let mut store = VertexStore::default();
        let raw: Vec<Vec<usize>> = polygons.iter().map(|poly| poly.iter().map(|p| store.insert(p)).collect()).collect();
        let points: Vec<[f64; 3]> = store.points.iter().map(|p| [p[0], p[1], p[2]]).collect();
        let mut order: Vec<usize> = (0..points.len()).collect();
        order.sort_by(|&a, &b| lex(&points[a], &points[b]).then(a.cmp(&b)));
        let mut rank = vec![0; points.len()];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let vertices = order.iter().map(|&i| points[i]).collect();
        let mut faces: Vec<Vec<usize>> = raw
            .into_iter()
            .map(|f| {
                let mut f: Vec<usize> = f.into_iter().map(|i| rank[i]).collect();
                normalize(&mut f);
                f
            })
            .collect();
        faces.sort();
        Mesh { n, dim, vertices, faces }
    }

    pub fn from_set(set: &SimplicialSet) -> Mesh {
        let polys: Vec<Vec<Vec3>> = set.simplices.iter().map(|s| s.vertices()).collect();
        Mesh::from_polygons(set.n, set.dim, &polys)
    }

    /// Maximal faces of a skeleton, each as one polygon, edge or point.
    pub fn from_skeleton(complex: &Complex, skeleton: &Skeleton) -> Mesh {
        let cores = core_decompose(complex, skeleton);
        let polys: Vec<Vec<Vec3>> =
            cores.levels.iter().flatten().map(|&f| complex.face(f).polyhedron.cyclic_vertices()).collect();
        Mesh::from_polygons(complex.ambient_dim, skeleton.dim, &polys)
    }

    /// All k-faces of a complex, for k = `dim`.
    pub fn from_complex(complex: &Complex, dim: usize) -> Mesh {
        let polys: Vec<Vec<Vec3>> =
            complex.faces_of_dim(dim).iter().map(|&f| complex.face(f).polyhedron.cyclic_vertices()).collect();
        Mesh::from_polygons(complex.ambient_dim, dim, &polys)
    }

    /// Faces as sets of vertex coordinates, independent of numbering.
    pub fn face_set(&self) -> BTreeSet<Vec<[u64; 3]>> {
        self.faces
            .iter()
            .map(|f| {
                let mut k: Vec<[u64; 3]> = f.iter().map(|&i| self.vertices[i].map(|x| (x + 0.0).to_bits())).collect();
                k.sort_unstable();
                k
            })
            .collect()
    }

    /// Faces of the mesh dimension as a simplicial set; polygons are fanned
    /// and lower-dimensional faces are skipped.
    pub fn to_set(&self) -> Result<SimplicialSet> {
        let mut set = SimplicialSet::new(self.n, self.dim);
        for f in self.faces.iter().filter(|f| f.len() > self.dim) {
            let pts: Vec<Vec3> = f.iter().map(|&i| Vec3::from(self.vertices[i])).collect();
            match self.dim {
                2 if pts.len() > 3 => {
                    for i in 1..pts.len() - 1 {
                        set.push(&[pts[0], pts[i], pts[i + 1]])?;
                    }
                }
                _ if pts.len() == self.dim + 1 => set.push(&pts)?,
                _ => {}
            }
        }
        Ok(set)
    }

    pub fn to_off(&self) -> String {
        let mut s = String::new();
        s.push_str("OFF\n");
        let _ = writeln!(s, "# dim {} {}", self.n, self.dim);
        let _ = writeln!(s, "{} {} 0", self.vertices.len(), self.faces.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{} {} {}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = write!(s, "{}", f.len());
            for i in f {
                let _ = write!(s, " {i}");
            }
            s.push('\n');
        }
        s
    }

    pub fn from_off(text: &str) -> Result<Mesh> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut dims: Option<(usize, usize)> = None;
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter_map(|(no, l)| {
            if let Some(rest) = l.strip_prefix('#') {
                let t: Vec<&str> = rest.split_whitespace().collect();
                if t.len() == 3 && t[0] == "dim" {
                    if let (Ok(n), Ok(d)) = (t[1].parse(), t[2].parse()) {
                        dims = Some((n, d));
                    }
                }
                None
            } else if l.is_empty() {
                None
            } else {
                Some((no, l.to_string()))
            }
        });
        let mut last = 0;
        let mut next = |what: &str| -> Result<(usize, String)> {
            let item = lines.next().ok_or_else(|| err(last + 1, format!("file ended before {what}")))?;
            last = item.0;
            Ok(item)
        };
        let (no, header) = next("the OFF header")?;
        if header != "OFF" {
            return Err(err(no, format!("expected OFF header, found {header:?}")));
        }
        let (no, counts) = next("the counts line")?;
        let c: Vec<usize> = counts
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| err(no, format!("bad count {t:?}"))))
            .collect::<Result<_>>()?;
        if c.len() != 3 {
            return Err(err(no, "counts line needs vertex, face and edge counts".into()));
        }
        let mut vertices = Vec::with_capacity(c[0]);
        for k in 0..c[0] {
            let (no, l) = next(&format!("vertex {k} of {}", c[0]))?;
            let xs: Vec<f64> =
                l.split_whitespace().map(|t| t.parse().map_err(|_| err(no, format!("bad coordinate {t:?}")))).collect::<Result<_>>()?;
            if xs.len() != 3 {
                return Err(err(no, format!("vertex needs 3 coordinates, got {}", xs.len())));
            }
            vertices.push([xs[0], xs[1], xs[2]]);
        }
        let mut faces = Vec::with_capacity(c[1]);
        for k in 0..c[1] {
            let (no, l) = next(&format!("face {k} of {}", c[1]))?;
            let ids: Vec<usize> =
                l.split_whitespace().map(|t| t.parse().map_err(|_| err(no, format!("bad index {t:?}")))).collect::<Result<_>>()?;
            let Some((&len, rest)) = ids.split_first() else { return Err(err(no, "empty face line".into())) };
            if len == 0 || rest.len() != len {
                return Err(err(no, format!("face declares {len} indices but lists {}", rest.len())));
            }
            if let Some(&bad) = rest.iter().find(|&&i| i >= vertices.len()) {
                return Err(err(no, format!("vertex index {bad} out of range")));
            }
            faces.push(rest.to_vec());
        }
        if let Some((no, _)) = lines.next() {
            return Err(err(no, "trailing data after the last face".into()));
        }
        let (n, dim) = dims.unwrap_or_else(|| (3, faces.iter().map(|f| f.len().min(3) - 1).max().unwrap_or(0)));
        Ok(Mesh { n, dim, vertices, faces })
    }
}

pub fn export_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    std::fs::write(path, mesh.to_off())?;
    Ok(())
}

pub fn import_mesh(path: &Path) -> Result<Mesh> {
    Mesh::from_off(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;
    use crate::grid::{build_dyadic, DyadicGridSpec};

    fn grid() -> Complex {
        build_dyadic(&DyadicGridSpec::block(2, 0.25, Vec3::zeros(), [4, 4, 1])).unwrap()
    }

    #[test]
    fn skeleton_round_trips() {
        let c = grid();
        let skel = Skeleton::new(1, c.faces_of_dim(1).iter().copied().step_by(3).collect());
        let mesh = Mesh::from_skeleton(&c, &skel);
        let back = Mesh::from_off(&mesh.to_off()).unwrap();
        assert_eq!(back, mesh);
        assert_eq!(back.face_set(), mesh.face_set());
        assert!((back.to_set().unwrap().measure() - skel.measure(&c)).abs() < 1e-12);
    }

    #[test]
    fn vertices_are_sorted_and_deduplicated() {
        let polys = vec![
            vec![point(&[1.0, 0.0]), point(&[0.0, 0.0])],
            vec![point(&[0.0, 0.0]), point(&[0.0, 1.0])],
        ];
        let m = Mesh::from_polygons(2, 1, &polys);
        assert_eq!(m.vertices, vec![[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]]);
        assert_eq!(m.faces, vec![vec![0, 1], vec![0, 2]]);
    }

    #[test]
    fn empty_mesh_is_valid() {
        let m = Mesh::from_set(&SimplicialSet::new(2, 1));
        let text = m.to_off();
        assert!(text.contains("0 0 0"));
        let back = Mesh::from_off(&text).unwrap();
        assert!(back.faces.is_empty());
        assert_eq!((back.n, back.dim), (2, 1));
    }

    #[test]
    fn truncated_files_report_the_line() {
        let c = grid();
        let text = Mesh::from_complex(&c, 1).to_off();
        let cut: Vec<&str> = text.lines().take(10).collect();
        match Mesh::from_off(&cut.join("\n")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 11),
            other => panic!("{other:?}"),
        }
        match Mesh::from_off("OFF\n1 0 0\n0 0 zero\n") {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("zero"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polygons_keep_their_cycle() {
        let c = build_dyadic(&DyadicGridSpec::block(3, 1.0, Vec3::zeros(), [1, 1, 1])).unwrap();
        let m = Mesh::from_complex(&c, 2);
        assert_eq!(m.faces.len(), 6);
        let set = m.to_set().unwrap();
        assert!((set.measure() - 6.0).abs() < 1e-12);
    }
}
