//! Minimisation of the weighted d-measure over admissible skeletons.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};
use crate::measure::{weighted_polyhedron, DensityField};

use super::flow::min_cut;
use super::oracle::{ConstraintOracle, Dsu, Space};
use super::{core_decompose, Cores, Skeleton};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Largest number of free d-faces searched exhaustively.
    pub exhaustive_cap: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Largest number of (d+1)-faces whose joint boundary a swap toggles.
    pub swap_cells: usize,
    /// Probability of adding a neighbouring face when building a restart.
    pub superset_probability: f64,
    /// d-faces the optimiser may not add.
    pub forbidden: Vec<FaceId>,
    /// Also log candidate moves that were tried and rejected.
    pub log_rejected: bool,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            exhaustive_cap: 22,
            restarts: 16,
            seed: 0,
            swap_cells: 4,
            superset_probability: 0.5,
            forbidden: Vec::new(),
            log_rejected: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Exhaustive,
    Local,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Removal,
    Collapse,
    Swap,
    Reroute,
    Cut,
    Relabel,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::Removal => "removal",
            MoveKind::Collapse => "collapse",
            MoveKind::Swap => "swap",
            MoveKind::Reroute => "reroute",
            MoveKind::Cut => "cut",
            MoveKind::Relabel => "relabel",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub iter: usize,
    pub kind: MoveKind,
    pub face: FaceId,
    pub delta: f64,
    pub accepted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OptimizationOutcome {
    pub skeleton: Skeleton,
    /// Weighted measure of the skeleton's d-faces.
    pub value: f64,
    /// Unweighted d-measure.
    pub hausdorff: f64,
    pub cores: Cores,
    pub moves: Vec<MoveRecord>,
    pub certificate: Certificate,
    pub free_faces: usize,
    /// Restart that produced the returned skeleton (0 is the initial one).
    pub best_restart: usize,
}

/// Weight of every d-face of the complex, indexed by local d-face index.
pub(crate) fn face_weights(space: &Space, h: &DensityField) -> Vec<f64> {
    let n = space.complex.ambient_dim;
    (0..space.m)
        .map(|i| weighted_polyhedron(&space.complex.faces[space.global(i)].polyhedron, h, n).0)
        .collect()
}

fn value_of(w: &[f64], on: &[bool]) -> f64 {
    w.iter().zip(on).filter(|(_, &o)| o).map(|(x, _)| x).sum()
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Separate a cell (local index) from every cell of a list.
type CutStep = (usize, Vec<usize>);

fn separated_cells(pairs: &[(usize, usize)]) -> Vec<usize> {
    let mut cells: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    cells.sort_unstable();
    cells.dedup();
    cells
}

fn partners(pairs: &[(usize, usize)], c: usize) -> Vec<usize> {
    pairs.iter().filter_map(|&(a, b)| if a == c { Some(b) } else if b == c { Some(a) } else { None }).collect()
}

/// Incidence between d-faces and (d+1)-faces in local indices.
struct Incidence {
    /// (d+1)-faces containing each d-face.
    up: Vec<Vec<usize>>,
    /// d-faces bounding each (d+1)-face.
    down: Vec<Vec<usize>>,
    /// d = 1 only: edges at each vertex.
    vertex_edges: Vec<Vec<usize>>,
}

impl Incidence {
    fn new(space: &Space) -> Self {
        let c = space.complex;
        let upper = c.faces_of_dim(space.d + 1);
        let mut up = vec![Vec::new(); space.m];
        let down: Vec<Vec<usize>> = upper
            .iter()
            .map(|&s| c.faces[s].children.iter().filter_map(|&f| space.local(f)).collect())
            .collect();
        for (s, ch) in down.iter().enumerate() {
            for &i in ch {
                up[i].push(s);
            }
        }
        let mut vertex_edges = Vec::new();
        if space.d == 1 {
            vertex_edges = vec![Vec::new(); c.vertices.len()];
            for (i, vs) in space.verts.iter().enumerate() {
                for &v in vs {
                    if !vertex_edges[v].contains(&i) {
                        vertex_edges[v].push(i);
                    }
                }
            }
        }
        Incidence { up, down, vertex_edges }
    }
}

struct Search<'s, 'a> {
    space: &'s Space<'a>,
    w: &'s [f64],
    inc: &'s Incidence,
    cfg: &'s OptimizeConfig,
    moves: Vec<MoveRecord>,
    iter: usize,
    /// Order in which removals visit faces; restarts shuffle it.
    order: Vec<usize>,
    /// Cut plan of a restart; `None` tries the deterministic plans.
    plan: Option<Vec<CutStep>>,
}

impl<'s, 'a> Search<'s, 'a> {
    fn new(space: &'s Space<'a>, w: &'s [f64], inc: &'s Incidence, cfg: &'s OptimizeConfig) -> Self {
        Search { space, w, inc, cfg, moves: Vec::new(), iter: 0, order: (0..space.m).collect(), plan: None }
    }

    fn eps(&self, on: &[bool]) -> f64 {
        1e-12 * (1.0 + value_of(self.w, on))
    }

    fn log(&mut self, kind: MoveKind, face: usize, delta: f64, accepted: bool) {
        self.iter += 1;
        if accepted || self.cfg.log_rejected {
            self.moves.push(MoveRecord { iter: self.iter, kind, face: self.space.global(face), delta, accepted });
        }
    }

    /// Toggles `faces`, keeps the result when admissible.
    fn try_toggle(&mut self, on: &mut [bool], faces: &[usize], kind: MoveKind, delta: f64) -> bool {
        for &f in faces {
            on[f] = !on[f];
        }
        let ok = self.space.check(on);
        if !ok {
            for &f in faces {
                on[f] = !on[f];
            }
        }
        self.log(kind, faces.first().copied().unwrap_or(0), delta, ok);
        ok
    }

    fn removals(&mut self, on: &mut [bool]) -> bool {
        let mut changed = false;
        for k in 0..self.order.len() {
            let i = self.order[k];
            if on[i] && !self.space.frozen[i] {
                changed |= self.try_toggle(on, &[i], MoveKind::Removal, -self.w[i]);
            }
        }
        changed
    }

    fn collapses(&mut self, on: &mut [bool]) -> bool {
        let mut changed = false;
        let eps = self.eps(on);
        for i in 0..self.space.m {
            if !on[i] || self.space.frozen[i] {
                continue;
            }
            for s in self.inc.up[i].clone() {
                let added: Vec<usize> = self.inc.down[s].iter().copied().filter(|&j| j != i && !on[j]).collect();
                if added.iter().any(|&j| self.space.forbidden[j]) {
                    continue;
                }
                let delta = added.iter().map(|&j| self.w[j]).sum::<f64>() - self.w[i];
                if delta < -eps {
                    let mut toggled = vec![i];
                    toggled.extend(added);
                    if self.try_toggle(on, &toggled, MoveKind::Collapse, delta) {
                        changed = true;
                        break;
                    }
                }
            }
        }
        changed
    }

    /// Odd part of the joint boundary of a set of (d+1)-faces.
    fn joint_boundary(&self, set: &[usize]) -> Vec<usize> {
        let mut all: Vec<usize> = set.iter().flat_map(|&s| self.inc.down[s].iter().copied()).collect();
        all.sort_unstable();
        let mut out = Vec::new();
        let mut k = 0;
        while k < all.len() {
            let mut j = k;
            while j < all.len() && all[j] == all[k] {
                j += 1;
            }
            if (j - k) % 2 == 1 {
                out.push(all[k]);
            }
            k = j;
        }
        // facets on the outer boundary never separate anything, so a swap
        // under separation only moves cells between regions
        if let Some((facet_cells, _)) = self.space.separation_data() {
            out.retain(|&f| facet_cells[f].is_some());
        }
        out
    }

    fn swap_delta(&self, on: &[bool], bd: &[usize]) -> Option<f64> {
        let mut delta = 0.0;
        for &f in bd {
            if on[f] {
                if self.space.frozen[f] {
                    return None;
                }
                delta -= self.w[f];
            } else {
                if self.space.forbidden[f] {
                    return None;
                }
                delta += self.w[f];
            }
        }
        Some(delta)
    }

    fn neighbours(&self, s: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.inc.down[s].iter().flat_map(|&f| self.inc.up[f].iter().copied()).filter(|&t| t != s).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn swaps(&mut self, on: &mut [bool]) -> bool {
        if self.cfg.swap_cells == 0 {
            return false;
        }
        let mut anchors: Vec<usize> = (0..self.space.m).filter(|&i| on[i]).flat_map(|i| self.inc.up[i].iter().copied()).collect();
        anchors.sort_unstable();
        anchors.dedup();
        let mut changed = false;
        let eps = self.eps(on);
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for a in anchors {
            let mut level: Vec<Vec<usize>> = vec![vec![a]];
            for size in 1..=self.cfg.swap_cells {
                let mut next = Vec::new();
                for set in &level {
                    if !seen.insert(set.clone()) {
                        continue;
                    }
                    let bd = self.joint_boundary(set);
                    if let Some(delta) = self.swap_delta(on, &bd) {
                        if delta < -eps && self.try_toggle(on, &bd, MoveKind::Swap, delta) {
                            changed = true;
                        }
                    }
                    if size < self.cfg.swap_cells {
                        for &s in set {
                            for t in self.neighbours(s) {
                                if set.binary_search(&t).is_err() {
                                    let mut grown = set.clone();
                                    grown.push(t);
                                    grown.sort_unstable();
                                    next.push(grown);
                                }
                            }
                        }
                    }
                }
                next.sort_unstable();
                next.dedup();
                level = next;
            }
        }
        changed
    }

    /// Cheapest path of edges from any vertex satisfying `source` to any
    /// vertex satisfying `target`; edges already selected are free.
    fn shortest_path(&self, on: &[bool], source: impl Fn(usize) -> bool, target: impl Fn(usize) -> bool) -> Option<Vec<usize>> {
        let nv = self.space.complex.vertices.len();
        let mut dist = vec![f64::INFINITY; nv];
        let mut pred: Vec<Option<(usize, usize)>> = vec![None; nv];
        let mut heap = BinaryHeap::new();
        for v in 0..nv {
            if source(v) {
                dist[v] = 0.0;
                heap.push(HeapItem(0.0, v));
            }
        }
        while let Some(HeapItem(dv, v)) = heap.pop() {
            if dv > dist[v] {
                continue;
            }
            if target(v) {
                let mut path = Vec::new();
                let mut x = v;
                while let Some((e, p)) = pred[x] {
                    path.push(e);
                    x = p;
                }
                return Some(path);
            }
            for &e in &self.inc.vertex_edges[v] {
                if !on[e] && self.space.forbidden[e] {
                    continue;
                }
                let vs = &self.space.verts[e];
                let u = if vs[0] == v { vs[vs.len() - 1] } else { vs[0] };
                let nd = dv + if on[e] { 0.0 } else { self.w[e] };
                if nd < dist[u] {
                    dist[u] = nd;
                    pred[u] = Some((e, v));
                    heap.push(HeapItem(nd, u));
                }
            }
        }
        None
    }

    /// Chains of selected edges between branch points and terminals.
    fn key_paths(&self, on: &[bool]) -> Vec<(Vec<usize>, usize, usize)> {
        let mut deg: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for i in 0..self.space.m {
            if on[i] {
                for &v in &self.space.verts[i] {
                    deg.entry(v).or_default().push(i);
                }
            }
        }
        let terminals: HashSet<usize> = self.space.terminal_vertices().into_iter().collect();
        let is_key = |v: usize| terminals.contains(&v) || deg.get(&v).map_or(0, |e| e.len()) != 2;
        let mut used = vec![false; self.space.m];
        let mut paths = Vec::new();
        for (&v, edges) in &deg {
            if !is_key(v) {
                continue;
            }
            for &e0 in edges {
                if used[e0] {
                    continue;
                }
                let mut path = vec![e0];
                used[e0] = true;
                let mut cur = v;
                let mut e = e0;
                loop {
                    let vs = &self.space.verts[e];
                    let nxt = if vs[0] == cur { vs[vs.len() - 1] } else { vs[0] };
                    cur = nxt;
                    if is_key(cur) {
                        break;
                    }
                    match deg[&cur].iter().copied().find(|&f| f != e && !used[f]) {
                        Some(f) => {
                            used[f] = true;
                            path.push(f);
                            e = f;
                        }
                        None => break,
                    }
                }
                paths.push((path, v, cur));
            }
        }
        paths.sort_by_key(|p| p.0.iter().copied().min());
        paths
    }

    fn reroutes(&mut self, on: &mut [bool]) -> bool {
        if self.space.d != 1 || !matches!(self.space.oracle(), ConstraintOracle::Connectivity { .. }) {
            return false;
        }
        for (path, u, v) in self.key_paths(on) {
            if path.iter().any(|&e| self.space.frozen[e]) {
                continue;
            }
            let removed: f64 = path.iter().map(|&e| self.w[e]).sum();
            for &e in &path {
                on[e] = false;
            }
            if self.space.check(on) {
                self.log(MoveKind::Reroute, path[0], -removed, true);
                return true;
            }
            let comp = self.space.components(on);
            let (cu, cv) = (comp[u], comp[v]);
            let found = self.shortest_path(on, |x| comp[x] == cu, |x| comp[x] == cv);
            let mut accepted = false;
            if let Some(q) = found {
                let added: Vec<usize> = q.into_iter().filter(|&e| !on[e]).collect();
                let delta = added.iter().map(|&e| self.w[e]).sum::<f64>() - removed;
                if delta < -self.eps(on) {
                    for &e in &added {
                        on[e] = true;
                    }
                    if self.space.check(on) {
                        self.log(MoveKind::Reroute, path[0], delta, true);
                        accepted = true;
                    } else {
                        for &e in &added {
                            on[e] = false;
                        }
                    }
                }
            }
            if accepted {
                return true;
            }
            for &e in &path {
                on[e] = true;
            }
            self.log(MoveKind::Reroute, path[0], 0.0, false);
        }
        false
    }

    /// Minimum cuts taken step by step; edges already cut are free for the
    /// later steps.
    fn cut_selection(&self, plan: &[CutStep]) -> Option<Vec<bool>> {
        let (facet_cells, _) = self.space.separation_data()?;
        let ncells = self.space.complex.cells().len();
        let sink = ncells;
        let big = self.w.iter().sum::<f64>() * 2.0 + 1.0;
        let mut on = self.space.frozen.clone();
        let mut edges = Vec::new();
        let mut edge_face = Vec::new();
        for (source, targets) in plan {
            edges.clear();
            edge_face.clear();
            for (i, fc) in facet_cells.iter().enumerate() {
                if let Some((a, b)) = fc {
                    let cap = if on[i] {
                        0.0
                    } else if self.space.forbidden[i] {
                        big
                    } else {
                        self.w[i]
                    };
                    edges.push((*a, *b, cap));
                    edge_face.push(i);
                }
            }
            let real = edges.len();
            for &t in targets {
                edges.push((t, sink, f64::INFINITY));
            }
            let (_, cut) = min_cut(ncells + 1, &edges, *source, sink);
            for k in cut.into_iter().filter(|&k| k < real) {
                on[edge_face[k]] = true;
            }
        }
        Some(on)
    }

    /// Deterministic cut plans: the pairs in every rotation of their order
    /// and its reverse, and for each separated cell the cut isolating it from
    /// all its partners followed by the remaining pairs.
    fn cut_plans(&self) -> Vec<Vec<CutStep>> {
        let Some((_, pairs)) = self.space.separation_data() else { return Vec::new() };
        let k = pairs.len();
        let step = |p: usize| (pairs[p].0, vec![pairs[p].1]);
        let mut plans: Vec<Vec<CutStep>> = Vec::new();
        for r in 0..k {
            let fwd: Vec<usize> = (0..k).map(|i| (i + r) % k).collect();
            plans.push(fwd.iter().map(|&p| step(p)).collect());
            plans.push(fwd.iter().rev().map(|&p| step(p)).collect());
        }
        for c in separated_cells(pairs) {
            let mut plan = vec![(c, partners(pairs, c))];
            plan.extend((0..k).filter(|&p| pairs[p].0 != c && pairs[p].1 != c).map(step));
            plans.push(plan);
        }
        plans.sort();
        plans.dedup();
        plans
    }

    /// Random cut plan for a restart.
    fn random_plan(&self, rng: &mut ChaCha8Rng) -> Option<Vec<CutStep>> {
        let (_, pairs) = self.space.separation_data()?;
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.shuffle(rng);
        let mut plan = Vec::new();
        let cells = separated_cells(pairs);
        if rng.gen_bool(0.5) {
            if let Some(&c) = cells.choose(rng) {
                plan.push((c, partners(pairs, c)));
            }
        }
        plan.extend(order.into_iter().map(|p| (pairs[p].0, vec![pairs[p].1])));
        Some(plan)
    }

    fn cuts(&mut self, on: &mut [bool]) -> bool {
        let plans = match &self.plan {
            Some(p) => vec![p.clone()],
            None => self.cut_plans(),
        };
        let mut best: Option<(f64, Vec<bool>)> = None;
        for plan in plans {
            let Some(cand) = self.cut_selection(&plan) else { return false };
            if cand.iter().zip(self.space.forbidden.iter()).any(|(&c, &f)| c && f) || !self.space.check(&cand) {
                continue;
            }
            let v = value_of(self.w, &cand);
            if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
                best = Some((v, cand));
            }
        }
        let Some((v, cand)) = best else { return false };
        let delta = v - value_of(self.w, on);
        if delta < -self.eps(on) {
            on.copy_from_slice(&cand);
            let first = cand.iter().position(|&c| c).unwrap_or(0);
            self.log(MoveKind::Cut, first, delta, true);
            return true;
        }
        false
    }

    /// Region of every cell: cells joined through unselected facets share one.
    fn regions(&self, on: &[bool], facet_cells: &[Option<(usize, usize)>]) -> Vec<usize> {
        let ncells = self.space.complex.cells().len();
        let mut uf = Dsu::new(ncells);
        uf.reset();
        for (f, fc) in facet_cells.iter().enumerate() {
            if let Some((a, b)) = fc {
                if !on[f] {
                    uf.union(*a, *b);
                }
            }
        }
        (0..ncells).map(|c| uf.find(c).0).collect()
    }

    /// Drops selected facets, heaviest first, while the selection stays
    /// admissible. Under separation each drop merges two regions.
    fn prune(&self, on: &mut [bool]) {
        let mut sel: Vec<usize> = (0..self.space.m).filter(|&i| on[i] && !self.space.frozen[i]).collect();
        sel.sort_by(|&a, &b| self.w[b].total_cmp(&self.w[a]).then(a.cmp(&b)));
        for f in sel {
            on[f] = false;
            if !self.space.check(on) {
                on[f] = true;
            }
        }
    }

    /// Moves one cell into a neighbouring region or into a region of its
    /// own, then merges regions greedily. The pair is kept when the total
    /// drops, so a move that only pays off after a merge is still found.
    fn relabels(&mut self, on: &mut [bool]) -> bool {
        let Some((facet_cells, _)) = self.space.separation_data() else { return false };
        let ncells = self.space.complex.cells().len();
        let mut around: Vec<Vec<(usize, usize)>> = vec![Vec::new(); ncells];
        for (f, fc) in facet_cells.iter().enumerate() {
            if let Some((a, b)) = *fc {
                around[a].push((f, b));
                around[b].push((f, a));
            }
        }
        let fresh = usize::MAX;
        let current = value_of(self.w, on);
        let region = self.regions(on, facet_cells);
        for c in 0..ncells {
            let mut targets: Vec<usize> = around[c].iter().map(|&(_, o)| region[o]).filter(|&r| r != region[c]).collect();
            targets.sort_unstable();
            targets.dedup();
            targets.push(fresh);
            for t in targets {
                let flips: Vec<usize> = around[c].iter().filter(|&&(f, o)| on[f] != (t == fresh || region[o] != t)).map(|&(f, _)| f).collect();
                if flips.is_empty() || self.swap_delta(on, &flips).is_none() {
                    continue;
                }
                let mut trial = on.to_vec();
                for &f in &flips {
                    trial[f] = !trial[f];
                }
                if !self.space.check(&trial) {
                    continue;
                }
                self.prune(&mut trial);
                let delta = value_of(self.w, &trial) - current;
                let accepted = delta < -self.eps(on);
                self.log(MoveKind::Relabel, flips[0], delta, accepted);
                if accepted {
                    on.copy_from_slice(&trial);
                    return true;
                }
            }
        }
        false
    }

    fn local_search(&mut self, on: &mut [bool]) {
        self.cuts(on);
        loop {
            if self.removals(on) {
                continue;
            }
            if self.reroutes(on) {
                continue;
            }
            if self.collapses(on) {
                continue;
            }
            if self.swaps(on) {
                continue;
            }
            if self.relabels(on) {
                continue;
            }
            break;
        }
    }

    /// Random admissible variation of `init` used as a restart.
    fn randomize(&self, init: &[bool], rng: &mut ChaCha8Rng) -> Vec<bool> {
        let p = self.cfg.superset_probability.clamp(0.0, 1.0);
        let mut on = init.to_vec();
        let mut near: Vec<usize> = (0..self.space.m).filter(|&i| init[i]).flat_map(|i| self.inc.up[i].iter().copied()).collect();
        near.sort_unstable();
        near.dedup();
        if self.space.oracle().is_monotone() {
            let mut faces: Vec<usize> = near.iter().flat_map(|&s| self.inc.down[s].iter().copied()).collect();
            faces.sort_unstable();
            faces.dedup();
            for f in faces {
                if !on[f] && !self.space.forbidden[f] && rng.gen_bool(p) {
                    on[f] = true;
                }
            }
        } else {
            for s in near {
                if rng.gen_bool(p) {
                    let bd = self.inc.down[s].clone();
                    if self.swap_delta(&on, &bd).is_some() {
                        for f in bd {
                            on[f] = !on[f];
                        }
                    }
                }
            }
        }
        if self.space.check(&on) {
            on
        } else {
            init.to_vec()
        }
    }

    fn exhaustive(&self, start: &[bool]) -> Vec<bool> {
        let free: Vec<usize> = (0..self.space.m).filter(|&i| !self.space.frozen[i] && !self.space.forbidden[i]).collect();
        let k = free.len();
        let mut best: Option<(f64, Vec<FaceId>)> = None;
        let consider = |on: &[bool], best: &mut Option<(f64, Vec<FaceId>)>| {
            let v = value_of(self.w, on);
            let better = match best {
                None => true,
                Some((bv, ids)) => v < *bv || (v == *bv && self.space.selected(on) < *ids),
            };
            if better && self.space.check(on) {
                *best = Some((v, self.space.selected(on)));
            }
        };
        let start: Vec<bool> = start.iter().zip(&self.space.forbidden).map(|(&s, &f)| s && !f).collect();
        consider(&start, &mut best);
        let mut on = self.space.frozen.clone();
        let mut running = value_of(self.w, &on);
        let slack = 1e-9 * (1.0 + self.w.iter().sum::<f64>());
        for step in 0..(1u64 << k) {
            if step > 0 {
                let bit = step.trailing_zeros() as usize;
                let f = free[bit];
                on[f] = !on[f];
                running += if on[f] { self.w[f] } else { -self.w[f] };
            }
            if best.as_ref().is_none_or(|(bv, _)| running <= bv + slack) {
                consider(&on, &mut best);
            }
        }
        let mut out = vec![false; self.space.m];
        if let Some((_, ids)) = best {
            for f in ids {
                out[f - self.space.offset] = true;
            }
        }
        out
    }
}

fn lex_better(a: (f64, Vec<FaceId>), b: &(f64, Vec<FaceId>)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

/// Minimises the weighted d-measure over skeletons admissible for `oracle`
/// that contain the frozen faces of `init`. Lower-dimensional faces of
/// `init` that are not frozen carry no d-measure and are dropped.
pub fn optimize(
    complex: &Complex,
    init: &Skeleton,
    oracle: &ConstraintOracle,
    h: &DensityField,
    cfg: &OptimizeConfig,
) -> Result<OptimizationOutcome> {
    let space = Space::new(complex, init.dim, oracle, &init.frozen_ids, &cfg.forbidden, Vec::new())?;
    let mut start = space.frozen.clone();
    for &f in &init.face_ids {
        if let Some(i) = space.local(f) {
            start[i] = true;
        }
    }
    if !space.check(&start) {
        return Err(Error::InitInadmissible);
    }
    let w = face_weights(&space, h);
    let inc = Incidence::new(&space);
    let mut search = Search::new(&space, &w, &inc, cfg);
    let free_faces = (0..space.m).filter(|&i| !space.frozen[i] && !space.forbidden[i]).count();

    let (on, certificate, best_restart) = if free_faces <= cfg.exhaustive_cap {
        // a local pass first gives a tight bound that prunes the enumeration
        let mut bound = start.clone();
        search.local_search(&mut bound);
        (search.exhaustive(&bound), Certificate::Exhaustive, 0)
    } else {
        let mut best_on = start.clone();
        search.local_search(&mut best_on);
        let mut best = (value_of(&w, &best_on), space.selected(&best_on));
        let mut best_restart = 0;
        for r in 1..cfg.restarts.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut on = search.randomize(&start, &mut rng);
            search.order.shuffle(&mut rng);
            search.plan = search.random_plan(&mut rng);
            search.local_search(&mut on);
            let cand = (value_of(&w, &on), space.selected(&on));
            if lex_better(cand.clone(), &best) {
                best = cand;
                best_on = on;
                best_restart = r;
            }
        }
        (best_on, Certificate::Local, best_restart)
    };
    if !space.check(&on) {
        // every accepted move was checked; this only guards against oracle impurity
        return Err(Error::InitInadmissible);
    }
    let skeleton = space.skeleton(&on);
    let value = value_of(&w, &on);
    let hausdorff = (0..space.m).filter(|&i| on[i]).map(|i| complex.faces[space.global(i)].measure).sum();
    let cores = core_decompose(complex, &skeleton);
    Ok(OptimizationOutcome {
        skeleton,
        value,
        hausdorff,
        cores,
        moves: search.moves,
        certificate,
        free_faces,
        best_restart,
    })
}

/// Makes `skel` admissible: drops forbidden faces and adds cheap faces back.
/// Connectivity in d = 1 reconnects terminals along shortest paths and
/// separation adds minimum cuts; other oracles fall back to every allowed face.
pub fn repair(
    complex: &Complex,
    skel: &Skeleton,
    oracle: &ConstraintOracle,
    h: &DensityField,
    forbidden: &[FaceId],
) -> Result<Skeleton> {
    let space = Space::new(complex, skel.dim, oracle, &skel.frozen_ids, forbidden, Vec::new())?;
    let mut on = space.frozen.clone();
    for &f in &skel.face_ids {
        if let Some(i) = space.local(f) {
            on[i] = !space.forbidden[i];
        }
    }
    if space.check(&on) {
        return Ok(space.skeleton(&on));
    }
    let w = face_weights(&space, h);
    let inc = Incidence::new(&space);
    let cfg = OptimizeConfig::default();
    let search = Search::new(&space, &w, &inc, &cfg);
    if space.d == 1 && matches!(oracle, ConstraintOracle::Connectivity { .. }) {
        let terms = space.terminal_vertices();
        while !space.check(&on) {
            let comp = space.components(&on);
            let c0 = comp[terms[0]];
            let Some(&other) = terms.iter().find(|&&t| comp[t] != c0) else { break };
            let co = comp[other];
            match search.shortest_path(&on, |x| comp[x] == c0, |x| comp[x] == co) {
                Some(path) => path.into_iter().for_each(|e| on[e] = true),
                None => return Err(Error::InitInadmissible),
            }
        }
    } else if let Some(cut) = search.cut_plans().first().and_then(|plan| search.cut_selection(plan)) {
        for (o, c) in on.iter_mut().zip(cut) {
            *o |= c;
        }
    }
    if !space.check(&on) {
        on = (0..space.m).map(|i| space.frozen[i] || !space.forbidden[i]).collect();
    }
    if space.check(&on) {
        Ok(space.skeleton(&on))
    } else {
        Err(Error::InitInadmissible)
    }
}
