//! Skeletons of a complex and their optimisation under constraint oracles.

mod flow;
mod optimize;
mod oracle;
mod probe;

pub use optimize::{optimize, repair, Certificate, MoveKind, MoveRecord, OptimizationOutcome, OptimizeConfig};
pub use oracle::{admissible, ConstraintOracle, Predicate};
pub use probe::{quasiminimality_probe, DeformationKind, ProbeConfig, ProbeRecord, QuasiReport};

use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId};
use crate::simplicial::SimplicialSet;

/// Union of d-dimensional subfaces of a complex. Frozen faces are never
/// removed by the optimiser.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skeleton {
    pub dim: usize,
    pub face_ids: Vec<FaceId>,
    pub frozen_ids: Vec<FaceId>,
}

impl Skeleton {
    pub fn new(dim: usize, mut face_ids: Vec<FaceId>) -> Self {
        face_ids.sort_unstable();
        face_ids.dedup();
        Skeleton { dim, face_ids, frozen_ids: Vec::new() }
    }

    pub fn with_frozen(mut self, mut frozen: Vec<FaceId>) -> Self {
        frozen.sort_unstable();
        frozen.dedup();
        self.frozen_ids = frozen;
        self
    }

    pub fn contains(&self, f: FaceId) -> bool {
        self.face_ids.binary_search(&f).is_ok()
    }

    pub fn measure(&self, complex: &Complex) -> f64 {
        crate::measure::skeleton_measure(complex, &self.face_ids, self.dim)
    }

    /// The skeleton as a simplicial set (d-faces only).
    pub fn to_set(&self, complex: &Complex) -> SimplicialSet {
        let mut s = SimplicialSet::new(complex.ambient_dim, self.dim);
        for &f in &self.face_ids {
            let face = complex.face(f);
            if face.dim == self.dim {
                for t in face.polyhedron.simplices() {
                    s.push_unchecked(&t, None, 0);
                }
            }
        }
        s
    }
}

/// Maximal faces of a skeleton grouped by dimension: `levels[l]` holds the
/// l-faces not contained in any higher-dimensional face of the skeleton.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cores {
    pub levels: Vec<Vec<FaceId>>,
}

impl Cores {
    pub fn level(&self, l: usize) -> &[FaceId] {
        self.levels.get(l).map_or(&[], |v| v.as_slice())
    }

    pub fn total(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }
}

pub fn core_decompose(complex: &Complex, skel: &Skeleton) -> Cores {
    let mut covered = std::collections::HashSet::new();
    for &f in &skel.face_ids {
        for g in complex.closure(f) {
            if g != f {
                covered.insert(g);
            }
        }
    }
    let mut levels = vec![Vec::new(); skel.dim + 1];
    for &f in &skel.face_ids {
        if !covered.contains(&f) {
            let l = complex.faces[f].dim;
            if l <= skel.dim {
                levels[l].push(f);
            }
        }
    }
    Cores { levels }
}
