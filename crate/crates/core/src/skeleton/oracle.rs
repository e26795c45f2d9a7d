//! Constraint oracles and the compiled checker the optimiser evaluates them with.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};

use super::Skeleton;

pub type Predicate = Arc<dyn Fn(&Complex, &Skeleton) -> bool + Send + Sync>;

/// Admissibility predicate over skeletons of a fixed complex.
#[derive(Clone)]
pub enum ConstraintOracle {
    /// Every terminal face lies in one connected component of the skeleton.
    Connectivity { terminals: Vec<FaceId> },
    /// Each pair of top cells lies in different components of the dual graph
    /// whose edges are the facets outside the skeleton. Needs `d = n - 1`.
    Separation { pairs: Vec<(FaceId, FaceId)> },
    /// The skeleton carries a cycle winding around the given periodic axis.
    Periodic { axis: usize },
    /// The mod-2 boundary of the skeleton's d-faces is exactly `boundary`.
    Spanning { boundary: Vec<FaceId> },
    Custom { name: String, predicate: Predicate },
}

impl fmt::Debug for ConstraintOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintOracle::Connectivity { terminals } => f.debug_struct("Connectivity").field("terminals", terminals).finish(),
            ConstraintOracle::Separation { pairs } => f.debug_struct("Separation").field("pairs", pairs).finish(),
            ConstraintOracle::Periodic { axis } => f.debug_struct("Periodic").field("axis", axis).finish(),
            ConstraintOracle::Spanning { boundary } => f.debug_struct("Spanning").field("boundary", boundary).finish(),
            ConstraintOracle::Custom { name, .. } => f.debug_struct("Custom").field("name", name).finish(),
        }
    }
}

impl ConstraintOracle {
    pub fn name(&self) -> &str {
        match self {
            ConstraintOracle::Connectivity { .. } => "connectivity",
            ConstraintOracle::Separation { .. } => "separation",
            ConstraintOracle::Periodic { .. } => "periodic",
            ConstraintOracle::Spanning { .. } => "spanning",
            ConstraintOracle::Custom { name, .. } => name,
        }
    }

    /// Whether supersets of admissible skeletons stay admissible.
    pub fn is_monotone(&self) -> bool {
        matches!(
            self,
            ConstraintOracle::Connectivity { .. } | ConstraintOracle::Separation { .. } | ConstraintOracle::Periodic { .. }
        )
    }
}

/// Whether `skel` satisfies the oracle. Lower-dimensional faces of the
/// skeleton take part (they can connect terminals or carry cycles).
pub fn admissible(complex: &Complex, skel: &Skeleton, oracle: &ConstraintOracle) -> Result<bool> {
    for &f in skel.face_ids.iter().chain(&skel.frozen_ids) {
        if f >= complex.faces.len() {
            return Err(Error::Config(format!("face id {f} outside the complex")));
        }
        if complex.faces[f].dim > skel.dim {
            return Err(Error::DimensionMismatch(format!(
                "face {f} has dimension {} above the skeleton dimension {}",
                complex.faces[f].dim, skel.dim
            )));
        }
    }
    let lower: Vec<FaceId> = skel
        .face_ids
        .iter()
        .chain(&skel.frozen_ids)
        .copied()
        .filter(|&f| complex.faces[f].dim < skel.dim)
        .collect();
    let space = Space::new(complex, skel.dim, oracle, &skel.frozen_ids, &[], lower)?;
    let mut on = space.frozen.clone();
    for &f in &skel.face_ids {
        if let Some(i) = space.local(f) {
            on[i] = true;
        }
    }
    Ok(space.check(&on))
}

/// Union-find with integer offsets along one axis and lazy reset.
#[derive(Default)]
pub(crate) struct Dsu {
    parent: Vec<usize>,
    offset: Vec<i64>,
    stamp: Vec<u32>,
    generation: u32,
}

impl Dsu {
    pub fn new(n: usize) -> Self {
        Dsu { parent: vec![0; n], offset: vec![0; n], stamp: vec![0; n], generation: 0 }
    }

    pub fn reset(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = u32::MAX);
            self.generation = 1;
        }
    }

    fn touch(&mut self, x: usize) {
        if self.stamp[x] != self.generation {
            self.stamp[x] = self.generation;
            self.parent[x] = x;
            self.offset[x] = 0;
        }
    }

    /// Root of `x` and the offset of `x` relative to it.
    pub fn find(&mut self, x: usize) -> (usize, i64) {
        self.touch(x);
        let mut path = Vec::new();
        let mut r = x;
        while self.parent[r] != r {
            path.push(r);
            r = self.parent[r];
        }
        // compress, accumulating offsets from the top down
        let mut acc = 0;
        for &y in path.iter().rev() {
            acc += self.offset[y];
            self.offset[y] = acc;
            self.parent[y] = r;
        }
        (r, if x == r { 0 } else { self.offset[x] })
    }

    pub fn union(&mut self, a: usize, b: usize) {
        self.union_offset(a, b, 0);
    }

    /// Joins with `pos(b) = pos(a) + delta`; returns true when the two were
    /// already joined with a different offset.
    pub fn union_offset(&mut self, a: usize, b: usize, delta: i64) -> bool {
        let (ra, oa) = self.find(a);
        let (rb, ob) = self.find(b);
        if ra == rb {
            return ob - oa != delta;
        }
        self.parent[rb] = ra;
        self.offset[rb] = oa + delta - ob;
        false
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a).0 == self.find(b).0
    }
}

enum Prepared {
    Connect { groups: Vec<Vec<usize>>, extra: Vec<Vec<usize>> },
    Separate { facet_cells: Vec<Option<(usize, usize)>>, pairs: Vec<(usize, usize)> },
    Periodic { edges: Vec<Vec<(usize, usize, i64)>>, extra: Vec<(usize, usize, i64)> },
    Spanning { children: Vec<Vec<FaceId>>, target: Vec<FaceId> },
    Custom,
}

/// The d-faces of a complex as a 0..m index space together with a compiled
/// oracle. Face ids of one dimension are contiguous, so local index
/// `i` is face `offset + i`.
pub(crate) struct Space<'a> {
    pub complex: &'a Complex,
    pub d: usize,
    pub offset: FaceId,
    pub m: usize,
    pub verts: Vec<Vec<usize>>,
    pub frozen: Vec<bool>,
    pub forbidden: Vec<bool>,
    /// Lower-dimensional faces always present.
    pub extra: Vec<FaceId>,
    oracle: &'a ConstraintOracle,
    prepared: Prepared,
    scratch: RefCell<Dsu>,
}

fn edge_shift(key: &[(usize, [i64; 3])], a: usize, b: usize, axis: usize) -> i64 {
    let k = |v: usize| key.iter().find(|e| e.0 == v).map_or(0, |e| e.1[axis]);
    k(b) - k(a)
}

impl<'a> Space<'a> {
    pub fn new(
        complex: &'a Complex,
        d: usize,
        oracle: &'a ConstraintOracle,
        frozen: &[FaceId],
        forbidden: &[FaceId],
        extra: Vec<FaceId>,
    ) -> Result<Self> {
        let n = complex.dim;
        if d >= n {
            return Err(Error::DimensionMismatch(format!("skeleton dimension {d} must be below the complex dimension {n}")));
        }
        let ids = complex.faces_of_dim(d);
        let offset = ids.first().copied().unwrap_or(0);
        let m = ids.len();
        debug_assert!(ids.iter().enumerate().all(|(i, &f)| f == offset + i));
        let verts: Vec<Vec<usize>> = ids.iter().map(|&f| complex.faces[f].vertices.clone()).collect();
        let mut frozen_mask = vec![false; m];
        let mut extra = extra;
        for &f in frozen {
            if complex.faces[f].dim == d {
                frozen_mask[f - offset] = true;
            } else if complex.faces[f].dim < d {
                extra.push(f);
            } else {
                return Err(Error::DimensionMismatch(format!("frozen face {f} has dimension above {d}")));
            }
        }
        extra.sort_unstable();
        extra.dedup();
        let mut forbidden_mask = vec![false; m];
        for &f in forbidden {
            if complex.faces[f].dim == d && !frozen_mask[f - offset] {
                forbidden_mask[f - offset] = true;
            }
        }
        let cells = complex.cells();
        let cell0 = cells.first().copied().unwrap_or(0);
        let prepared = match oracle {
            ConstraintOracle::Connectivity { terminals } => {
                for &t in terminals {
                    if t >= complex.faces.len() || complex.faces[t].dim > d {
                        return Err(Error::Config(format!("terminal {t} is not a face of dimension at most {d}")));
                    }
                }
                Prepared::Connect {
                    groups: terminals.iter().map(|&t| complex.faces[t].vertices.clone()).collect(),
                    extra: extra.iter().map(|&f| complex.faces[f].vertices.clone()).collect(),
                }
            }
            ConstraintOracle::Separation { pairs } => {
                if d + 1 != n {
                    return Err(Error::DimensionMismatch(format!(
                        "separation needs d = n - 1, got d = {d}, n = {n}"
                    )));
                }
                let mut local_pairs = Vec::new();
                for &(a, b) in pairs {
                    for c in [a, b] {
                        if c >= complex.faces.len() || complex.faces[c].dim != n {
                            return Err(Error::Config(format!("separated face {c} is not a top cell")));
                        }
                    }
                    local_pairs.push((a - cell0, b - cell0));
                }
                let facet_cells = ids
                    .iter()
                    .map(|&f| {
                        let c = &complex.faces[f].cells;
                        (c.len() == 2).then(|| (c[0] - cell0, c[1] - cell0))
                    })
                    .collect();
                Prepared::Separate { facet_cells, pairs: local_pairs }
            }
            ConstraintOracle::Periodic { axis } => {
                let axis = *axis;
                if !complex.periodic.as_ref().is_some_and(|t| axis < 3 && t.period[axis] > 0.0) {
                    return Err(Error::Config(format!("axis {axis} is not periodic in this complex")));
                }
                let face_edges = |f: FaceId| -> Vec<(usize, usize, i64)> {
                    let face = &complex.faces[f];
                    let edge_ids: Vec<FaceId> = match face.dim {
                        0 => vec![],
                        1 => vec![f],
                        _ => complex.closure(f).into_iter().filter(|&e| complex.faces[e].dim == 1).collect(),
                    };
                    edge_ids
                        .into_iter()
                        .map(|e| {
                            let ek = &complex.faces[e].key;
                            let (a, b) = (ek[0].0, ek[ek.len() - 1].0);
                            if face.dim == 1 {
                                (a, b, ek[ek.len() - 1].1[axis] - ek[0].1[axis])
                            } else {
                                (a, b, edge_shift(&face.key, a, b, axis))
                            }
                        })
                        .collect()
                };
                Prepared::Periodic {
                    edges: ids.iter().map(|&f| face_edges(f)).collect(),
                    extra: extra.iter().flat_map(|&f| face_edges(f)).collect(),
                }
            }
            ConstraintOracle::Spanning { boundary } => {
                if d == 0 {
                    return Err(Error::DimensionMismatch("spanning needs d >= 1".into()));
                }
                let mut target = boundary.clone();
                target.sort_unstable();
                target.dedup();
                if target.iter().any(|&f| f >= complex.faces.len() || complex.faces[f].dim + 1 != d) {
                    return Err(Error::Config(format!("spanning boundary must consist of {}-faces", d - 1)));
                }
                Prepared::Spanning {
                    children: ids.iter().map(|&f| complex.faces[f].children.clone()).collect(),
                    target,
                }
            }
            ConstraintOracle::Custom { .. } => Prepared::Custom,
        };
        let scratch = RefCell::new(Dsu::new(complex.vertices.len().max(cells.len())));
        Ok(Space {
            complex,
            d,
            offset,
            m,
            verts,
            frozen: frozen_mask,
            forbidden: forbidden_mask,
            extra,
            oracle,
            prepared,
            scratch,
        })
    }

    pub fn local(&self, f: FaceId) -> Option<usize> {
        (f >= self.offset && f < self.offset + self.m && self.complex.faces[f].dim == self.d).then(|| f - self.offset)
    }

    pub fn global(&self, i: usize) -> FaceId {
        self.offset + i
    }

    pub fn oracle(&self) -> &ConstraintOracle {
        self.oracle
    }

    pub fn selected(&self, on: &[bool]) -> Vec<FaceId> {
        (0..self.m).filter(|&i| on[i]).map(|i| self.global(i)).collect()
    }

    /// Skeleton made of the selected d-faces, their closures and the extras.
    pub fn skeleton(&self, on: &[bool]) -> Skeleton {
        let mut ids: Vec<FaceId> = Vec::new();
        for f in self.selected(on).into_iter().chain(self.extra.iter().copied()) {
            ids.extend(self.complex.closure(f));
        }
        let frozen: Vec<FaceId> = (0..self.m)
            .filter(|&i| self.frozen[i])
            .map(|i| self.global(i))
            .chain(self.extra.iter().copied())
            .collect();
        Skeleton::new(self.d, ids).with_frozen(frozen)
    }

    pub fn check(&self, on: &[bool]) -> bool {
        match &self.prepared {
            Prepared::Connect { groups, extra } => {
                if groups.len() < 2 {
                    return true;
                }
                let mut dsu = self.scratch.borrow_mut();
                dsu.reset();
                for (i, vs) in self.verts.iter().enumerate() {
                    if on[i] {
                        for w in vs.windows(2) {
                            dsu.union(w[0], w[1]);
                        }
                    }
                }
                for vs in groups.iter().chain(extra) {
                    for w in vs.windows(2) {
                        dsu.union(w[0], w[1]);
                    }
                }
                let r = dsu.find(groups[0][0]).0;
                groups[1..].iter().all(|g| dsu.find(g[0]).0 == r)
            }
            Prepared::Separate { facet_cells, pairs } => {
                let mut dsu = self.scratch.borrow_mut();
                dsu.reset();
                for (i, fc) in facet_cells.iter().enumerate() {
                    if let (false, Some((a, b))) = (on[i], fc) {
                        dsu.union(*a, *b);
                    }
                }
                pairs.iter().all(|&(a, b)| !dsu.same(a, b))
            }
            Prepared::Periodic { edges, extra } => {
                let mut dsu = self.scratch.borrow_mut();
                dsu.reset();
                let mut wraps = false;
                for (a, b, s) in extra {
                    wraps |= dsu.union_offset(*a, *b, *s);
                }
                for (i, es) in edges.iter().enumerate() {
                    if on[i] {
                        for (a, b, s) in es {
                            wraps |= dsu.union_offset(*a, *b, *s);
                        }
                    }
                }
                wraps
            }
            Prepared::Spanning { children, target } => {
                let mut odd: Vec<FaceId> = Vec::new();
                for (i, cs) in children.iter().enumerate() {
                    if on[i] {
                        odd.extend_from_slice(cs);
                    }
                }
                odd.sort_unstable();
                let mut bd = Vec::with_capacity(target.len());
                let mut k = 0;
                while k < odd.len() {
                    let mut j = k;
                    while j < odd.len() && odd[j] == odd[k] {
                        j += 1;
                    }
                    if (j - k) % 2 == 1 {
                        bd.push(odd[k]);
                    }
                    k = j;
                }
                bd == *target
            }
            Prepared::Custom => match self.oracle {
                ConstraintOracle::Custom { predicate, .. } => predicate(self.complex, &self.skeleton(on)),
                _ => unreachable!(),
            },
        }
    }

    /// Vertices joined to the terminals' component; only meaningful for connectivity.
    pub fn components(&self, on: &[bool]) -> Vec<usize> {
        let nv = self.complex.vertices.len();
        let mut dsu = Dsu::new(nv);
        dsu.reset();
        for (i, vs) in self.verts.iter().enumerate() {
            if on[i] {
                for w in vs.windows(2) {
                    dsu.union(w[0], w[1]);
                }
            }
        }
        if let Prepared::Connect { groups, extra } = &self.prepared {
            for vs in groups.iter().chain(extra) {
                for w in vs.windows(2) {
                    dsu.union(w[0], w[1]);
                }
            }
        }
        (0..nv).map(|v| dsu.find(v).0).collect()
    }

    pub fn terminal_vertices(&self) -> Vec<usize> {
        match &self.prepared {
            Prepared::Connect { groups, .. } => groups.iter().map(|g| g[0]).collect(),
            _ => vec![],
        }
    }

    pub fn separation_data(&self) -> Option<(&[Option<(usize, usize)>], &[(usize, usize)])> {
        match &self.prepared {
            Prepared::Separate { facet_cells, pairs } => Some((facet_cells, pairs)),
            _ => None,
        }
    }
}
