//! Finite soups of d-simplices, the sets that projections act on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::clip::Piece;
use crate::geometry::{simplex_volume, Aabb, Vec3, TOL};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simplex {
    pub points: Vec<[f64; 3]>,
    /// Patch the simplex was fitted to, if any.
    pub patch: Option<usize>,
    /// Number of map stages applied so far.
    pub generation: u32,
}

impl Simplex {
    pub fn vertices(&self) -> Vec<Vec3> {
        self.points.iter().map(|p| Vec3::from(*p)).collect()
    }

    pub fn volume(&self) -> f64 {
        simplex_volume(&self.vertices())
    }

    pub fn barycenter(&self) -> Vec3 {
        let v = self.vertices();
        v.iter().fold(Vec3::zeros(), |a, p| a + p) / v.len() as f64
    }
}

/// Set of d-simplices in R^n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimplicialSet {
    pub n: usize,
    pub dim: usize,
    pub simplices: Vec<Simplex>,
}

impl SimplicialSet {
    pub fn new(n: usize, dim: usize) -> Self {
        SimplicialSet { n, dim, simplices: Vec::new() }
    }

    /// Builds a set from vertex lists, rejecting degenerate simplices.
    pub fn from_simplices(n: usize, dim: usize, simplices: &[Vec<Vec3>]) -> Result<Self> {
        let mut s = SimplicialSet::new(n, dim);
        for t in simplices {
            s.push(t)?;
        }
        Ok(s)
    }

    pub fn push(&mut self, points: &[Vec3]) -> Result<()> {
        if points.len() != self.dim + 1 {
            return Err(Error::DimensionMismatch(format!(
                "{}-simplex needs {} points, got {}",
                self.dim,
                self.dim + 1,
                points.len()
            )));
        }
        if self.dim > 0 && simplex_volume(points) <= TOL.geo {
            return Err(Error::InvalidPolyhedron("degenerate simplex".into()));
        }
        self.push_unchecked(points, None, 0);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, points: &[Vec3], patch: Option<usize>, generation: u32) {
        self.simplices.push(Simplex {
            points: points.iter().map(|p| [p[0], p[1], p[2]]).collect(),
            patch,
            generation,
        });
    }

    /// Adds the fan triangulation of a convex piece of this set's dimension.
    pub fn push_piece(&mut self, piece: &Piece, generation: u32) {
        if piece.dim != self.dim {
            return;
        }
        for t in piece.simplices() {
            if self.dim == 0 || simplex_volume(&t) > TOL.geo * TOL.geo {
                self.push_unchecked(&t, None, generation);
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    /// Total d-dimensional measure.
    pub fn measure(&self) -> f64 {
        self.simplices.iter().map(|s| s.volume()).sum()
    }

    pub fn pieces(&self) -> Vec<Piece> {
        self.simplices.iter().map(|s| Piece::from_simplex(&s.vertices())).collect()
    }

    pub fn bbox(&self) -> Aabb {
        let pts: Vec<Vec3> = self.simplices.iter().flat_map(|s| s.vertices()).collect();
        Aabb::from_points(&pts)
    }

    /// Shortest edge over all simplices.
    pub fn shortest_edge(&self) -> f64 {
        let mut m = f64::INFINITY;
        for s in &self.simplices {
            let v = s.vertices();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    m = m.min((v[i] - v[j]).norm());
                }
            }
        }
        m
    }

    /// Polyline through consecutive points as a 1-dimensional set.
    pub fn polyline(n: usize, points: &[Vec3]) -> Result<Self> {
        let mut s = SimplicialSet::new(n, 1);
        for w in points.windows(2) {
            s.push(w)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::point;

    #[test]
    fn measures_and_rejection() {
        let s = SimplicialSet::polyline(2, &[point(&[0., 0.]), point(&[1., 0.]), point(&[1., 2.])]).unwrap();
        assert!((s.measure() - 3.0).abs() < 1e-12);
        let mut t = SimplicialSet::new(2, 2);
        assert!(t.push(&[point(&[0., 0.]), point(&[1., 0.]), point(&[2., 0.])]).is_err());
        t.push(&[point(&[0., 0.]), point(&[1., 0.]), point(&[0., 1.])]).unwrap();
        assert!((t.measure() - 0.5).abs() < 1e-12);
    }
}
