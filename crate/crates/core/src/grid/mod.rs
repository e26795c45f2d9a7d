//! Dyadic grids, carved holes, merged rotated patches and periodic grids.

mod delaunay3;
mod merge;

pub use merge::{merge, MergeConfig, MergeReport};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, PeriodicTopology};
use crate::error::{Error, Result};
use crate::geometry::{polyhedron_distance, HalfSpace, Polyhedron, Vec3};

/// Grid of congruent cubes `origin + R (r z + [0, r]^n)` for `z` in an index set.
#[derive(Clone, Debug, PartialEq)]
pub struct DyadicGridSpec {
    pub n: usize,
    pub stride: f64,
    pub origin: Vec3,
    /// Columns are the frame's orthonormal axes.
    pub rotation: Matrix3<f64>,
    pub index_set: Vec<[i64; 3]>,
}

impl DyadicGridSpec {
    /// Axis-aligned block of `counts` cubes starting at `origin`.
    pub fn block(n: usize, stride: f64, origin: Vec3, counts: [usize; 3]) -> Self {
        let mut index_set = Vec::new();
        let cz = if n == 3 { counts[2] } else { 1 };
        for i in 0..counts[0] as i64 {
            for j in 0..counts[1] as i64 {
                for k in 0..cz as i64 {
                    index_set.push([i, j, k]);
                }
            }
        }
        DyadicGridSpec { n, stride, origin, rotation: Matrix3::identity(), index_set }
    }

    /// Planar frame rotated by `angle` radians about the origin point.
    pub fn with_planar_rotation(mut self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        self.rotation = Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0);
        self
    }

    fn check(&self) -> Result<()> {
        if !(2..=3).contains(&self.n) {
            return Err(Error::DimensionMismatch(format!("grid dimension {} not in {{2,3}}", self.n)));
        }
        if !(self.stride > 0.0) {
            return Err(Error::Config(format!("stride must be positive, got {}", self.stride)));
        }
        if self.index_set.is_empty() {
            return Err(Error::Config("empty index set".into()));
        }
        let g = self.rotation.transpose() * self.rotation;
        if (g - Matrix3::identity()).abs().max() > 1e-12 {
            return Err(Error::Config("grid frame is not orthonormal".into()));
        }
        if self.n == 2 && (self.rotation[(2, 2)] - 1.0).abs() > 1e-12 {
            return Err(Error::Config("planar grid frame must fix the z axis".into()));
        }
        Ok(())
    }

    /// Cube with lattice index `z` as a polyhedron.
    pub fn cube(&self, z: &[i64; 3]) -> Polyhedron {
        let n = self.n;
        let r = self.stride;
        let axes: Vec<Vec3> = (0..n).map(|i| self.rotation.column(i).into_owned()).collect();
        let corner = |bits: usize| -> Vec3 {
            let mut p = self.origin;
            for i in 0..n {
                let t = (z[i] as f64 + ((bits >> i) & 1) as f64) * r;
                p += axes[i] * t;
            }
            p
        };
        let mut vertices: Vec<Vec3> = (0..1usize << n).map(corner).collect();
        vertices.sort_by(crate::complex::lex_cmp);
        let mut half_spaces = Vec::with_capacity(2 * n);
        for (i, a) in axes.iter().enumerate() {
            let lo = a.dot(&self.origin) + z[i] as f64 * r;
            half_spaces.push(HalfSpace { normal: *a, offset: lo + r });
            half_spaces.push(HalfSpace { normal: -a, offset: -lo });
        }
        let hull = crate::geometry::affine_hull(&vertices, n);
        Polyhedron { ambient_dim: n, dim: n, vertices, half_spaces, hull }
    }

    pub fn cubes(&self) -> Vec<Polyhedron> {
        self.index_set.iter().map(|z| self.cube(z)).collect()
    }

    /// Lattice index of the cube whose closure contains `p`, preferring the lower index on ties.
    pub fn index_of(&self, p: &Vec3) -> [i64; 3] {
        let q = self.rotation.transpose() * (p - self.origin) / self.stride;
        let mut z = [0i64; 3];
        for i in 0..self.n {
            z[i] = (q[i] - 1e-9).floor() as i64;
        }
        z
    }
}

/// One cube per index; the result is always a valid complex.
pub fn build_dyadic(spec: &DyadicGridSpec) -> Result<Complex> {
    spec.check()?;
    Complex::from_polyhedra(spec.n, spec.cubes(), None)
}

/// Dyadic grid on a flat torus. Only axis-aligned frames are supported and
/// each period must be an integer multiple of the stride.
pub fn build_periodic(spec: &DyadicGridSpec, topology: &PeriodicTopology) -> Result<Complex> {
    spec.check()?;
    if (spec.rotation - Matrix3::identity()).abs().max() > 1e-12 {
        return Err(Error::Config("periodic grids require an axis-aligned frame".into()));
    }
    for axis in 0..spec.n {
        let p = topology.period[axis];
        if p <= 0.0 {
            continue;
        }
        let q = p / spec.stride;
        if (q - q.round()).abs() > 1e-9 || q.round() < 1.0 {
            return Err(Error::PeriodMismatch { axis, period: p, stride: spec.stride });
        }
    }
    let mut topo = topology.clone();
    for i in 0..3 {
        if topo.period[i] > 0.0 && topo.origin == [0.0; 3] {
            topo.origin[i] = spec.origin[i];
        }
    }
    Complex::from_polyhedra(spec.n, spec.cubes(), Some(topo))
}

/// Region that carved grids keep clear of.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    Ball { center: [f64; 3], radius: f64 },
    Box { min: [f64; 3], max: [f64; 3] },
    #[serde(skip)]
    Polytope(Polyhedron),
    Union { parts: Vec<Obstacle> },
}

impl Obstacle {
    /// Euclidean distance from a polyhedron to the obstacle.
    pub fn distance(&self, cell: &Polyhedron) -> f64 {
        match self {
            Obstacle::Ball { center, radius } => (cell.distance_to(&Vec3::from(*center)) - radius).max(0.0),
            Obstacle::Box { min, max } => {
                let n = cell.ambient_dim;
                match Polyhedron::axis_box(n, &min[..n], &max[..n]) {
                    Ok(b) => polyhedron_distance(cell, &b),
                    Err(_) => f64::INFINITY,
                }
            }
            Obstacle::Polytope(p) => polyhedron_distance(cell, p),
            Obstacle::Union { parts } => parts.iter().map(|o| o.distance(cell)).fold(f64::INFINITY, f64::min),
        }
    }

    /// Whether `p` lies in the (closed) obstacle.
    pub fn contains(&self, p: &Vec3) -> bool {
        match self {
            Obstacle::Ball { center, radius } => (p - Vec3::from(*center)).norm() <= *radius,
            Obstacle::Box { min, max } => (0..3).all(|i| p[i] >= min[i] && p[i] <= max[i]),
            Obstacle::Polytope(q) => q.contains(p, 1e-12),
            Obstacle::Union { parts } => parts.iter().any(|o| o.contains(p)),
        }
    }
}

/// Keeps the cubes whose distance to every obstacle is at least `clearance`.
/// Cubes at exactly the clearance distance are kept.
pub fn carve_region(background: &Complex, obstacles: &[Obstacle], clearance: f64) -> Result<Complex> {
    if obstacles.is_empty() {
        return Ok(background.clone());
    }
    let kept: Vec<Polyhedron> = background
        .cells()
        .iter()
        .map(|&c| &background.faces[c].polyhedron)
        .filter(|cell| obstacles.iter().all(|o| o.distance(cell) >= clearance - 1e-12))
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::ClearanceUnsatisfiable("every cell lies within the clearance of an obstacle".into()));
    }
    let out = Complex::from_polyhedra(background.ambient_dim, kept, background.periodic.clone())?;
    if background.cell_components() == 1 && out.cell_components() > 1 {
        return Err(Error::ClearanceUnsatisfiable(format!(
            "carving splits the grid into {} components",
            out.cell_components()
        )));
    }
    Ok(out)
}

/// Drops the cells whose centroid lies inside an obstacle. On a grid aligned
/// with box obstacles this removes exactly the cells covering them.
pub fn excise(background: &Complex, obstacles: &[Obstacle]) -> Result<Complex> {
    if obstacles.is_empty() {
        return Ok(background.clone());
    }
    let kept: Vec<Polyhedron> = background
        .cells()
        .iter()
        .map(|&c| &background.faces[c].polyhedron)
        .filter(|cell| {
            let p = cell.centroid();
            !obstacles.iter().any(|o| o.contains(&p))
        })
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::ClearanceUnsatisfiable("obstacles cover every cell".into()));
    }
    Complex::from_polyhedra(background.ambient_dim, kept, background.periodic.clone())
}

/// Band of cubes along a line in the plane: `cells` cubes along `direction`
/// starting at `start`, one row on each side of the line.
pub fn oriented_band(start: Vec3, direction: Vec3, cells: usize, stride: f64) -> DyadicGridSpec {
    let t = direction.normalize();
    let angle = t[1].atan2(t[0]);
    let mut index_set = Vec::new();
    for i in 0..cells as i64 {
        for j in [-1i64, 0] {
            index_set.push([i, j, 0]);
        }
    }
    DyadicGridSpec { n: 2, stride, origin: start, rotation: Matrix3::identity(), index_set }
        .with_planar_rotation(angle)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn single_and_block() {
        let c = build_dyadic(&DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [1, 1, 1])).unwrap();
        assert_eq!(c.counts(), vec![4, 4, 1]);
        let c = build_dyadic(&DyadicGridSpec::block(2, 0.5, Vec3::zeros(), [4, 4, 1])).unwrap();
        assert_eq!(c.cells().len(), 16);
        assert_eq!(c.vertices.len(), 25);
        assert!(c.validate().passed());
    }

    #[test]
    fn rotated_pair_shares_an_edge() {
        let spec = DyadicGridSpec {
            index_set: vec![[0, 0, 0], [1, 0, 0]],
            ..DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [1, 1, 1])
        }
        .with_planar_rotation(std::f64::consts::PI / 6.0);
        let c = build_dyadic(&spec).unwrap();
        assert_eq!(c.interior_facets().len(), 1);
        assert!(c.validate().passed());
        for &cell in c.cells() {
            assert!((c.faces[cell].stats.rotondity - 1.0 / 2f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn cube_stats_in_three_dimensions() {
        let c = build_dyadic(&DyadicGridSpec::block(3, 0.25, Vec3::zeros(), [2, 2, 2])).unwrap();
        let cell = &c.faces[c.cells()[0]];
        assert!((cell.stats.outer_radius - 0.25 * 3f64.sqrt() / 2.0).abs() < 1e-9);
        assert!((cell.stats.inner_radius - 0.125).abs() < 1e-9);
        assert!((cell.stats.rotondity - 1.0 / 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(c.counts(), vec![27, 54, 36, 8]);
    }

    #[test]
    fn torus_counts() {
        let spec = DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [4, 4, 1]);
        let c = build_periodic(&spec, &PeriodicTopology::new([4.0, 4.0, 0.0])).unwrap();
        assert_eq!(c.cells().len(), 16);
        assert_eq!(c.vertices.len(), 16);
        let spec = DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [1, 1, 1]);
        let c = build_periodic(&spec, &PeriodicTopology::new([1.0, 1.0, 0.0])).unwrap();
        assert_eq!((c.cells().len(), c.vertices.len()), (1, 1));
        let spec = DyadicGridSpec::block(2, 2.0, Vec3::zeros(), [1, 1, 1]);
        assert!(matches!(
            build_periodic(&spec, &PeriodicTopology::new([3.0, 2.0, 0.0])),
            Err(Error::PeriodMismatch { .. })
        ));
    }

    #[test]
    fn carving() {
        let bg = build_dyadic(&DyadicGridSpec::block(2, 1.0, Vec3::zeros(), [8, 8, 1])).unwrap();
        let ball = Obstacle::Ball { center: [4.0, 4.0, 0.0], radius: 1.0 };
        let carved = carve_region(&bg, &[ball], 1.0).unwrap();
        for &c in bg.cells() {
            let p = &bg.faces[c].polyhedron;
            let d = p.distance_to(&point(&[4.0, 4.0]));
            let kept = carved.cells().iter().any(|&k| carved.faces[k].polyhedron.vertices == p.vertices);
            assert_eq!(kept, d >= 2.0 - 1e-12);
        }
        assert_eq!(carve_region(&bg, &[], 1.0).unwrap().cells().len(), 64);
        let all = Obstacle::Box { min: [-1.0, -1.0, 0.0], max: [9.0, 9.0, 0.0] };
        assert!(matches!(carve_region(&bg, &[all], 0.5), Err(Error::ClearanceUnsatisfiable(_))));
    }
}
