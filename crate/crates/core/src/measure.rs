//! Hausdorff measures of PL sets, weighted functionals and Hausdorff distances.

use std::collections::HashMap;

use rstar::RTree;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId};
use crate::error::{Error, Result};
use crate::geometry::clip::{clip_all, Piece};
use crate::geometry::{simplex_volume, Aabb, HalfSpace, Polyhedron, Vec3};
use crate::simplicial::SimplicialSet;

const QUAD_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellValue {
    pub index: Vec<i64>,
    pub value: f64,
}

fn one() -> f64 {
    1.0
}

/// How a density is specified.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    Constant {
        value: f64,
    },
    /// Piecewise-linear profile in the distance to `center`, given as
    /// `[radius, value]` knots; constant beyond the end knots.
    Radial {
        center: Vec<f64>,
        profile: Vec<[f64; 2]>,
    },
    /// Constant on the open cells of an axis-aligned grid. On shared cell
    /// boundaries the smallest adjacent value is used, which keeps the field
    /// lower semicontinuous. Points outside every listed cell get `default`.
    Cellwise {
        origin: Vec<f64>,
        stride: f64,
        cells: Vec<CellValue>,
        #[serde(default = "one")]
        default: f64,
    },
}

/// Density h with values in [1, M].
#[derive(Clone, Debug)]
pub struct DensityField {
    kind: DensityKind,
    table: HashMap<[i64; 3], f64>,
    max: f64,
}

impl Default for DensityField {
    fn default() -> Self {
        DensityField::constant(1.0).unwrap()
    }
}

impl DensityField {
    pub fn new(kind: DensityKind) -> Result<Self> {
        let values: Vec<f64> = match &kind {
            DensityKind::Constant { value } => vec![*value],
            DensityKind::Radial { profile, .. } => {
                if profile.is_empty() {
                    return Err(Error::Config("radial density needs at least one knot".into()));
                }
                if profile.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return Err(Error::Config("radial knots must have increasing radii".into()));
                }
                profile.iter().map(|k| k[1]).collect()
            }
            DensityKind::Cellwise { stride, cells, default, .. } => {
                if !(*stride > 0.0) {
                    return Err(Error::Config("cellwise density needs a positive stride".into()));
                }
                cells.iter().map(|c| c.value).chain(std::iter::once(*default)).collect()
            }
        };
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(Error::Config(format!("density value {bad} outside [1, inf)")));
        }
        let mut table = HashMap::new();
        if let DensityKind::Cellwise { cells, .. } = &kind {
            for c in cells {
                let mut key = [0i64; 3];
                for (k, v) in key.iter_mut().zip(&c.index) {
                    *k = *v;
                }
                table.insert(key, c.value);
            }
        }
        let max = values.iter().cloned().fold(1.0, f64::max);
        Ok(DensityField { kind, table, max })
    }

    pub fn constant(value: f64) -> Result<Self> {
        DensityField::new(DensityKind::Constant { value })
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    /// (1, M)
    pub fn bounds(&self) -> (f64, f64) {
        (1.0, self.max)
    }

    pub fn eval(&self, p: &Vec3) -> f64 {
        match &self.kind {
            DensityKind::Constant { value } => *value,
            DensityKind::Radial { center, profile } => {
                let mut c = Vec3::zeros();
                for (i, v) in center.iter().take(3).enumerate() {
                    c[i] = *v;
                }
                radial_profile(profile, (p - c).norm())
            }
            DensityKind::Cellwise { origin, stride, default, .. } => {
                let mut choices: Vec<Vec<i64>> = Vec::with_capacity(origin.len());
                for (i, o) in origin.iter().take(3).enumerate() {
                    let q = (p[i] - o) / stride;
                    let r = q.round();
                    if (q - r).abs() <= 1e-9 {
                        choices.push(vec![r as i64 - 1, r as i64]);
                    } else {
                        choices.push(vec![q.floor() as i64]);
                    }
                }
                let mut best: Option<f64> = None;
                let mut idx = vec![0usize; choices.len()];
                loop {
                    let mut key = [0i64; 3];
                    for a in 0..choices.len() {
                        key[a] = choices[a][idx[a]];
                    }
                    if let Some(v) = self.table.get(&key) {
                        best = Some(best.map_or(*v, |b: f64| b.min(*v)));
                    }
                    let mut a = 0;
                    while a < idx.len() {
                        idx[a] += 1;
                        if idx[a] < choices[a].len() {
                            break;
                        }
                        idx[a] = 0;
                        a += 1;
                    }
                    if a == idx.len() {
                        break;
                    }
                }
                best.unwrap_or(*default)
            }
        }
    }

    pub fn constant_value(&self) -> Option<f64> {
        match &self.kind {
            DensityKind::Constant { value } => Some(*value),
            _ => None,
        }
    }

    /// Checks `h(y) <= (1 + modulus(|x - y|)) h(x)` over all sample pairs.
    pub fn spot_check_modulus(&self, modulus: impl Fn(f64) -> f64, samples: &[Vec3]) -> ModulusCheck {
        let vals: Vec<f64> = samples.iter().map(|p| self.eval(p)).collect();
        let mut worst = f64::NEG_INFINITY;
        let mut pairs = 0;
        for i in 0..samples.len() {
            for j in 0..samples.len() {
                if i == j {
                    continue;
                }
                let bound = (1.0 + modulus((samples[i] - samples[j]).norm())) * vals[i];
                worst = worst.max(vals[j] - bound);
                pairs += 1;
            }
        }
        ModulusCheck { pairs, worst_excess: worst, pass: worst <= 1e-12 }
    }

    /// Cellwise cell boxes overlapping `bb`, as (half-spaces, owner index).
    fn cells_over(&self, bb: &Aabb, n: usize) -> Vec<([i64; 3], Vec<HalfSpace>)> {
        let DensityKind::Cellwise { origin, stride, .. } = &self.kind else { return vec![] };
        let mut lo = [0i64; 3];
        let mut hi = [0i64; 3];
        for a in 0..n {
            let o = origin.get(a).copied().unwrap_or(0.0);
            lo[a] = ((bb.min[a] - o) / stride + 1e-9).floor() as i64 - 1;
            hi[a] = ((bb.max[a] - o) / stride - 1e-9).floor() as i64 + 1;
        }
        let mut out = Vec::new();
        let mut idx = lo;
        loop {
            let mut hs = Vec::with_capacity(2 * n);
            for a in 0..n {
                let o = origin.get(a).copied().unwrap_or(0.0);
                let mut e = Vec3::zeros();
                e[a] = 1.0;
                hs.push(HalfSpace { normal: -e, offset: -(o + idx[a] as f64 * stride) });
                hs.push(HalfSpace { normal: e, offset: o + (idx[a] + 1) as f64 * stride });
            }
            out.push((idx, hs));
            let mut a = 0;
            while a < n {
                idx[a] += 1;
                if idx[a] <= hi[a] {
                    break;
                }
                idx[a] = lo[a];
                a += 1;
            }
            if a == n {
                break;
            }
        }
        out
    }

    fn owner(&self, p: &Vec3, n: usize) -> [i64; 3] {
        let DensityKind::Cellwise { origin, stride, .. } = &self.kind else { return [0; 3] };
        let mut k = [0i64; 3];
        for a in 0..n {
            let o = origin.get(a).copied().unwrap_or(0.0);
            k[a] = ((p[a] - o) / stride + 1e-9).floor() as i64;
        }
        k
    }
}

fn radial_profile(profile: &[[f64; 2]], r: f64) -> f64 {
    if r <= profile[0][0] {
        return profile[0][1];
    }
    for w in profile.windows(2) {
        if r <= w[1][0] {
            let t = (r - w[0][0]) / (w[1][0] - w[0][0]);
            return w[0][1] + t * (w[1][1] - w[0][1]);
        }
    }
    profile[profile.len() - 1][1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusCheck {
    pub pairs: usize,
    pub worst_excess: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ItemMeasure {
    pub index: usize,
    pub hausdorff: f64,
    pub weighted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub hausdorff: f64,
    pub weighted: f64,
    pub items: Vec<ItemMeasure>,
    pub error_bound: f64,
}

pub fn hausdorff_measure(e: &SimplicialSet) -> f64 {
    e.measure()
}

/// Measure of a skeleton given by face ids; faces of other dimensions are null.
pub fn skeleton_measure(complex: &Complex, faces: &[FaceId], d: usize) -> f64 {
    faces.iter().map(|&f| complex.face(f)).filter(|f| f.dim == d).map(|f| f.measure).sum()
}

pub fn weighted_measure(e: &SimplicialSet, h: &DensityField) -> f64 {
    e.simplices.iter().map(|s| weighted_simplex(&s.vertices(), h, e.n).0).sum()
}

pub fn measure_report(e: &SimplicialSet, h: &DensityField) -> MeasureReport {
    let mut items = Vec::with_capacity(e.len());
    let mut err = 0.0;
    for (i, s) in e.simplices.iter().enumerate() {
        let v = s.vertices();
        let (w, eb) = weighted_simplex(&v, h, e.n);
        err += eb;
        items.push(ItemMeasure { index: i, hausdorff: simplex_volume(&v), weighted: w });
    }
    finish(items, err)
}

pub fn skeleton_report(complex: &Complex, faces: &[FaceId], d: usize, h: &DensityField) -> MeasureReport {
    let mut items = Vec::new();
    let mut err = 0.0;
    for &f in faces {
        let face = complex.face(f);
        if face.dim != d {
            continue;
        }
        let (w, eb) = weighted_polyhedron(&face.polyhedron, h, complex.ambient_dim);
        err += eb;
        items.push(ItemMeasure { index: f, hausdorff: face.measure, weighted: w });
    }
    finish(items, err)
}

fn finish(items: Vec<ItemMeasure>, error_bound: f64) -> MeasureReport {
    MeasureReport {
        hausdorff: items.iter().map(|i| i.hausdorff).sum(),
        weighted: items.iter().map(|i| i.weighted).sum(),
        items,
        error_bound,
    }
}

/// Weighted measure of one polyhedral face.
pub fn weighted_polyhedron(poly: &Polyhedron, h: &DensityField, n: usize) -> (f64, f64) {
    if let Some(c) = h.constant_value() {
        return (c * poly.measure(), 0.0);
    }
    if matches!(h.kind, DensityKind::Cellwise { .. }) && poly.dim <= 2 {
        return weighted_piece(&polyhedron_piece(poly), h, n);
    }
    poly.simplices().iter().map(|s| weighted_simplex(s, h, n)).fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1))
}

/// Convex piece spanned by a polyhedron of dimension at most 2.
pub fn polyhedron_piece(poly: &Polyhedron) -> Piece {
    Piece::new(poly.dim, poly.cyclic_vertices())
}

/// Weighted measure of a simplex and an error estimate.
pub fn weighted_simplex(pts: &[Vec3], h: &DensityField, n: usize) -> (f64, f64) {
    if let Some(c) = h.constant_value() {
        return (c * simplex_volume(pts), 0.0);
    }
    if pts.len() == 1 {
        return (h.eval(&pts[0]), 0.0);
    }
    if matches!(h.kind, DensityKind::Cellwise { .. }) && pts.len() <= 3 {
        return weighted_piece(&Piece::from_simplex(pts), h, n);
    }
    let f = |p: &Vec3| h.eval(p);
    let coarse = quadrature(pts, &f);
    adaptive(pts, &f, coarse, QUAD_TOL * coarse.abs().max(f64::MIN_POSITIVE), 0)
}

/// Splits a piece along the density's cells so every part sees a constant value.
fn weighted_piece(piece: &Piece, h: &DensityField, n: usize) -> (f64, f64) {
    if piece.dim == 0 {
        return (h.eval(&piece.points[0]), 0.0);
    }
    let bb = Aabb::from_points(&piece.points);
    let mut total = 0.0;
    for (key, hs) in h.cells_over(&bb, n) {
        let Some(part) = clip_all(piece, &hs) else { continue };
        let c = part.centroid();
        // Parts on a shared cell boundary are kept by both cells; count them once.
        if h.owner(&c, n) != key {
            continue;
        }
        total += h.eval(&c) * part.measure();
    }
    (total, 0.0)
}

/// Degree-3 Gauss rule on a simplex.
fn quadrature(pts: &[Vec3], f: &impl Fn(&Vec3) -> f64) -> f64 {
    let vol = simplex_volume(pts);
    match pts.len() {
        2 => {
            let (a, b) = (pts[0], pts[1]);
            let s = (0.6f64).sqrt();
            let at = |t: f64| a + (b - a) * (0.5 * (1.0 + t));
            vol * (5.0 * f(&at(-s)) + 8.0 * f(&at(0.0)) + 5.0 * f(&at(s))) / 18.0
        }
        3 => {
            let c = (pts[0] + pts[1] + pts[2]) / 3.0;
            let mut acc = -27.0 / 48.0 * f(&c);
            for i in 0..3 {
                let p = pts[i] * 0.6 + (pts[(i + 1) % 3] + pts[(i + 2) % 3]) * 0.2;
                acc += 25.0 / 48.0 * f(&p);
            }
            vol * acc
        }
        4 => {
            let c = (pts[0] + pts[1] + pts[2] + pts[3]) / 4.0;
            let mut acc = -0.8 * f(&c);
            for i in 0..4 {
                let others: Vec3 = (0..4).filter(|&j| j != i).map(|j| pts[j]).sum();
                acc += 0.45 * f(&(pts[i] * 0.5 + others / 6.0));
            }
            vol * acc
        }
        _ => vol * f(&pts[0]),
    }
}

fn midpoint_split(pts: &[Vec3]) -> Vec<Vec<Vec3>> {
    let m = |i: usize, j: usize| (pts[i] + pts[j]) * 0.5;
    match pts.len() {
        2 => vec![vec![pts[0], m(0, 1)], vec![m(0, 1), pts[1]]],
        3 => {
            let (a, b, c) = (m(0, 1), m(1, 2), m(0, 2));
            vec![vec![pts[0], a, c], vec![a, pts[1], b], vec![c, b, pts[2]], vec![a, b, c]]
        }
        _ => {
            // Longest-edge bisection for tetrahedra.
            let mut best = (0, 1);
            let mut len = 0.0;
            for i in 0..4 {
                for j in i + 1..4 {
                    let l = (pts[i] - pts[j]).norm();
                    if l > len {
                        len = l;
                        best = (i, j);
                    }
                }
            }
            let mid = m(best.0, best.1);
            let mut a = pts.to_vec();
            let mut b = pts.to_vec();
            a[best.1] = mid;
            b[best.0] = mid;
            vec![a, b]
        }
    }
}

fn adaptive(pts: &[Vec3], f: &impl Fn(&Vec3) -> f64, whole: f64, tol: f64, depth: u32) -> (f64, f64) {
    let parts = midpoint_split(pts);
    let vals: Vec<f64> = parts.iter().map(|p| quadrature(p, f)).collect();
    let fine: f64 = vals.iter().sum();
    let diff = (fine - whole).abs();
    let cap = match pts.len() {
        2 => 24,
        3 => 10,
        _ => 14,
    };
    if diff <= tol || depth >= cap {
        return (fine, diff);
    }
    let share = tol / parts.len() as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    for (p, v) in parts.iter().zip(vals) {
        let (a, e) = adaptive(p, f, v, share, depth + 1);
        total += a;
        err += e;
    }
    (total, err)
}

/// Part of a set inside an axis-aligned box.
pub fn restrict_to_box(e: &SimplicialSet, window: &Aabb) -> SimplicialSet {
    let hs = box_half_spaces(window, e.n);
    let mut out = SimplicialSet::new(e.n, e.dim);
    for s in &e.simplices {
        let piece = Piece::from_simplex(&s.vertices());
        if let Some(part) = clip_all(&piece, &hs) {
            out.push_piece(&part, s.generation);
        }
    }
    out
}

pub fn box_half_spaces(window: &Aabb, n: usize) -> Vec<HalfSpace> {
    let mut hs = Vec::new();
    for a in 0..n {
        let mut e = Vec3::zeros();
        e[a] = 1.0;
        hs.push(HalfSpace { normal: -e, offset: -window.min[a] });
        hs.push(HalfSpace { normal: e, offset: window.max[a] });
    }
    hs
}

/// Points on a set with spacing at most `spacing`.
pub fn sample_set(e: &SimplicialSet, spacing: f64) -> Vec<Vec3> {
    let mut out = Vec::new();
    for s in &e.simplices {
        sample_simplex(&s.vertices(), spacing, &mut out);
    }
    out
}

/// Points on the union of skeleton faces.
pub fn sample_faces(complex: &Complex, faces: &[FaceId], spacing: f64) -> Vec<Vec3> {
    let mut out = Vec::new();
    for &f in faces {
        for s in complex.face(f).polyhedron.simplices() {
            sample_simplex(&s, spacing, &mut out);
        }
    }
    out
}

/// Default sampling spacing: a tenth of the shortest edge.
pub fn default_spacing(e: &SimplicialSet) -> f64 {
    e.shortest_edge() / 10.0
}

fn sample_simplex(pts: &[Vec3], spacing: f64, out: &mut Vec<Vec3>) {
    let longest = pts
        .iter()
        .flat_map(|a| pts.iter().map(move |b| (a - b).norm()))
        .fold(0.0, f64::max);
    let m = ((longest / spacing).ceil() as usize).max(1);
    match pts.len() {
        1 => out.push(pts[0]),
        2 => out.extend((0..=m).map(|i| pts[0] + (pts[1] - pts[0]) * (i as f64 / m as f64))),
        3 => {
            for i in 0..=m {
                for j in 0..=m - i {
                    let (u, v) = (i as f64 / m as f64, j as f64 / m as f64);
                    out.push(pts[0] + (pts[1] - pts[0]) * u + (pts[2] - pts[0]) * v);
                }
            }
        }
        _ => {
            for i in 0..=m {
                for j in 0..=m - i {
                    for k in 0..=m - i - j {
                        let (u, v, w) = (i as f64 / m as f64, j as f64 / m as f64, k as f64 / m as f64);
                        out.push(pts[0] + (pts[1] - pts[0]) * u + (pts[2] - pts[0]) * v + (pts[3] - pts[0]) * w);
                    }
                }
            }
        }
    }
}

fn directed(a: &[Vec3], b: &[Vec3]) -> f64 {
    let tree = RTree::bulk_load(b.iter().map(|p| [p[0], p[1], p[2]]).collect());
    a.iter()
        .map(|p| {
            let q = [p[0], p[1], p[2]];
            let r = tree.nearest_neighbor(q).expect("nonempty cloud");
            (0..3).map(|i| (r[i] - q[i]).powi(2)).sum::<f64>()
        })
        .fold(0.0, f64::max)
        .sqrt()
}

/// Symmetric Hausdorff distance between point clouds; infinite when exactly
/// one cloud is empty and zero when both are.
pub fn hausdorff_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => 0.0,
        (true, false) | (false, true) => f64::INFINITY,
        _ => directed(a, b).max(directed(b, a)),
    }
}

/// Hausdorff distance between the parts of both clouds inside `k`.
pub fn local_hausdorff(k: &Aabb, a: &[Vec3], b: &[Vec3]) -> f64 {
    let inside = |c: &[Vec3]| -> Vec<Vec3> { c.iter().filter(|p| k.contains(p, 1e-12)).copied().collect() };
    hausdorff_distance(&inside(a), &inside(b))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LscWindow {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub limit: f64,
    pub liminf: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LscReport {
    pub tol: f64,
    pub windows: Vec<LscWindow>,
    /// Smallest margin over all windows.
    pub margin: f64,
    pub pass: bool,
}

/// Compares `J(limit ∩ V)` with the liminf of `J(E_k ∩ V)` on each window.
///
/// The liminf is estimated by the minimum over the second half of the
/// sequence. The margin is `liminf - J(limit ∩ V) + tol`, so a window passes
/// when the margin is nonnegative.
pub fn lsc_probe(sequence: &[SimplicialSet], limit: &SimplicialSet, h: &DensityField, windows: &[Aabb], tol: f64) -> LscReport {
    let tail = &sequence[sequence.len() / 2..];
    let mut out = Vec::with_capacity(windows.len());
    for w in windows {
        let lim = weighted_measure(&restrict_to_box(limit, w), h);
        let liminf = tail
            .iter()
            .map(|e| weighted_measure(&restrict_to_box(e, w), h))
            .fold(f64::INFINITY, f64::min);
        let margin = liminf - lim + tol;
        out.push(LscWindow {
            min: [w.min[0], w.min[1], w.min[2]],
            max: [w.max[0], w.max[1], w.max[2]],
            limit: lim,
            liminf,
            margin,
            pass: margin >= 0.0,
        });
    }
    let margin = out.iter().map(|w| w.margin).fold(f64::INFINITY, f64::min);
    LscReport { tol, pass: out.iter().all(|w| w.pass), windows: out, margin }
}
