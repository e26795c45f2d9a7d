//! Minimizing sequences over refining grids: approximate, project, erode,
//! optimise, and check convergence on nested windows.

use std::collections::HashSet;

use log::{debug, info};
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId, PeriodicTopology};
use crate::error::{Error, Result};
use crate::geometry::{point, Aabb, Vec3};
use crate::grid::{build_dyadic, build_periodic, carve_region, excise, merge, oriented_band, DyadicGridSpec, MergeConfig, MergeReport, Obstacle};
use crate::measure::{lsc_probe, local_hausdorff, sample_set, DensityField, DensityKind, LscReport};
use crate::projection::{erode_carried, ff_cascade, fit_patches, CascadeConfig, LevelRecord, CENTER_CANDIDATES};
use crate::simplicial::SimplicialSet;
use crate::skeleton::{
    admissible, optimize, quasiminimality_probe, repair, Certificate, ConstraintOracle, MoveRecord, OptimizeConfig, ProbeConfig,
    QuasiReport, Skeleton,
};

/// Axis-aligned box removed from the domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleSpec {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    /// Ambient dimension.
    pub n: usize,
    /// Dimension of the sought set.
    pub d: usize,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    #[serde(default)]
    pub holes: Vec<HoleSpec>,
    /// Period per axis, 0 for open axes. Periodic axes span `min..max`.
    #[serde(default)]
    pub periods: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    /// Initial set as polylines (d = 1).
    #[serde(default)]
    pub polylines: Vec<Vec<Vec<f64>>>,
    /// Initial set as d-simplices given by their vertices.
    #[serde(default)]
    pub simplices: Vec<Vec<Vec<f64>>>,
    /// Points whose nearest grid vertices must stay connected.
    #[serde(default)]
    pub terminals: Vec<Vec<f64>>,
    /// Pairs of points whose cells must stay separated.
    #[serde(default)]
    pub separate: Vec<[Vec<f64>; 2]>,
    /// Closed polygon whose grid edges (or endpoints) form the spanning boundary.
    #[serde(default)]
    pub frame: Vec<Vec<f64>>,
    /// Merge grids rotated along the flat parts of the current set.
    #[serde(default)]
    pub oriented_patches: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    Connectivity,
    Separation,
    Periodic,
    Spanning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSpec {
    pub kind: OracleKind,
    /// Periodic axis for the periodic oracle.
    #[serde(default)]
    pub axis: usize,
}

fn default_true() -> bool {
    true
}
fn default_restarts() -> usize {
    16
}
fn default_cap() -> usize {
    22
}
fn default_swap() -> usize {
    4
}
fn default_patch_eps() -> f64 {
    0.1
}
fn default_patches() -> usize {
    4
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    /// Stride of the first grid, in domain units.
    pub initial_stride: f64,
    /// Number of halvings after the first grid.
    pub refinements: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_cap")]
    pub exhaustive_cap: usize,
    #[serde(default = "default_swap")]
    pub swap_cells: usize,
    #[serde(default = "default_true")]
    pub stop_on_convergence: bool,
    #[serde(default = "default_patch_eps")]
    pub patch_epsilon: f64,
    #[serde(default = "default_patches")]
    pub max_patches: usize,
}

impl ScheduleSpec {
    pub fn strides(&self) -> Vec<f64> {
        (0..=self.refinements).map(|k| self.initial_stride / (1u64 << k) as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Largest change of the weighted measure between converged strides.
    pub energy: f64,
    /// Largest local Hausdorff distance between converged strides.
    pub distance: f64,
    /// Slack of the semicontinuity probe.
    pub lsc: f64,
    pub probe_trials: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { energy: 1e-9, distance: 1e-9, lsc: 1e-9, probe_trials: 200 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    #[serde(default)]
    pub value: u64,
}

fn default_density() -> DensityKind {
    DensityKind::Constant { value: 1.0 }
}

/// Complete description of a minimisation problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub domain: DomainSpec,
    #[serde(default)]
    pub input: InputSpec,
    pub oracle: OracleSpec,
    #[serde(default = "default_density")]
    pub density: DensityKind,
    pub schedule: ScheduleSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: SeedSpec,
}

fn vec3(c: &[f64]) -> Vec3 {
    point(c)
}

impl ProblemSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: ProblemSpec = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let dom = &self.domain;
        let n = dom.n;
        if !(2..=3).contains(&n) {
            return Err(Error::Config(format!("ambient dimension {n} not in 2..=3")));
        }
        if dom.d >= n {
            return Err(Error::DimensionMismatch(format!("d = {} must be below n = {n}", dom.d)));
        }
        if dom.min.len() != n || dom.max.len() != n || dom.min.iter().zip(&dom.max).any(|(a, b)| !(a < b)) {
            return Err(Error::Config("domain min/max must have n increasing coordinates".into()));
        }
        for h in &dom.holes {
            if h.min.len() != n || h.max.len() != n {
                return Err(Error::Config("hole corners must have n coordinates".into()));
            }
        }
        if let Some(p) = &dom.periods {
            if p.len() != n {
                return Err(Error::Config("periods must have n entries".into()));
            }
        }
        if !(self.schedule.initial_stride > 0.0) {
            return Err(Error::Config("initial_stride must be positive".into()));
        }
        let inside = |p: &Vec<f64>, what: &str| -> Result<()> {
            if p.len() != n || p.iter().enumerate().any(|(i, x)| *x < dom.min[i] - 1e-12 || *x > dom.max[i] + 1e-12) {
                return Err(Error::Config(format!("{what} point {p:?} outside the domain")));
            }
            Ok(())
        };
        let inp = &self.input;
        for p in inp.polylines.iter().flatten().chain(inp.simplices.iter().flatten()) {
            inside(p, "input")?;
        }
        for p in &inp.terminals {
            inside(p, "terminal")?;
        }
        for p in inp.separate.iter().flatten() {
            inside(p, "separation")?;
        }
        for p in &inp.frame {
            inside(p, "frame")?;
        }
        for s in &inp.simplices {
            if s.len() != dom.d + 1 {
                return Err(Error::DimensionMismatch(format!("input simplex with {} vertices in a d = {} problem", s.len(), dom.d)));
            }
        }
        if !inp.polylines.is_empty() && dom.d != 1 {
            return Err(Error::DimensionMismatch("polylines need d = 1".into()));
        }
        match self.oracle.kind {
            OracleKind::Connectivity if inp.terminals.len() < 2 => {
                return Err(Error::Config("connectivity needs at least two terminals".into()))
            }
            OracleKind::Separation if inp.separate.is_empty() => return Err(Error::Config("separation needs point pairs".into())),
            OracleKind::Spanning if inp.frame.len() < 2 => return Err(Error::Config("spanning needs a frame".into())),
            OracleKind::Periodic => {
                let ok = dom.periods.as_ref().is_some_and(|p| self.oracle.axis < n && p[self.oracle.axis] > 0.0);
                if !ok {
                    return Err(Error::Config("periodic oracle needs a positive period on its axis".into()));
                }
            }
            _ => {}
        }
        DensityField::new(self.density.clone())?;
        Ok(())
    }

    pub fn density(&self) -> Result<DensityField> {
        DensityField::new(self.density.clone())
    }

    pub fn domain_box(&self) -> Aabb {
        Aabb { min: vec3(&self.domain.min), max: vec3(&self.domain.max) }
    }

    /// Initial set, empty when the input only has constraint data.
    pub fn input_set(&self) -> Result<SimplicialSet> {
        let mut e = SimplicialSet::new(self.domain.n, self.domain.d);
        for line in &self.input.polylines {
            for w in line.windows(2) {
                e.push(&[vec3(&w[0]), vec3(&w[1])])?;
            }
        }
        for s in &self.input.simplices {
            let pts: Vec<Vec3> = s.iter().map(|p| vec3(p)).collect();
            e.push(&pts)?;
        }
        Ok(e)
    }

    /// Nested windows at 90%, 75% and 50% of the domain about its center.
    pub fn windows(&self) -> Vec<Aabb> {
        let b = self.domain_box();
        let c = (b.min + b.max) / 2.0;
        let half = (b.max - b.min) / 2.0;
        [0.9, 0.75, 0.5].iter().map(|&f| Aabb { min: c - half * f, max: c + half * f }).collect()
    }
}

/// Per-stride entries of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrideRecord {
    pub index: usize,
    pub stride: f64,
    pub cells: usize,
    /// Weighted measure of the optimised skeleton.
    pub value: f64,
    pub hausdorff: f64,
    /// Change of `value` against the previous stride.
    pub delta_value: Option<f64>,
    /// Local Hausdorff distance to the previous solution on each window.
    pub window_distances: Vec<f64>,
    pub cascade: Vec<LevelRecord>,
    pub cascade_max_ratio: f64,
    pub erosion_before: f64,
    pub erosion_after: f64,
    pub certificate: Certificate,
    pub free_faces: usize,
    pub accepted_moves: usize,
    pub patches: usize,
    pub merge: Option<MergeReport>,
    /// Counts of maximal faces per dimension.
    pub core_counts: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    NotConverged,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub strides: Vec<StrideRecord>,
    pub verdict: Verdict,
    /// Stride index at which convergence was declared.
    pub converged_at: Option<usize>,
    pub final_value: f64,
    pub final_skeleton: Skeleton,
    pub final_set: SimplicialSet,
    /// Solutions of every stride, as simplicial sets.
    pub sequence: Vec<SimplicialSet>,
    /// Whether the final skeleton satisfies the oracle.
    pub oracle_holds: bool,
    pub lsc: Option<LscReport>,
    pub quasi: Option<QuasiReport>,
    /// Moves of the last optimisation.
    pub moves: Vec<MoveRecord>,
    /// Lower strata are frozen from the previous stride rather than the limit.
    pub cores_from_previous_stride: bool,
}

impl RunReport {
    pub fn final_stride(&self) -> Option<&StrideRecord> {
        self.strides.last()
    }

    /// Turns a non-converged verdict into an error.
    pub fn into_result(self) -> Result<Self> {
        match self.verdict {
            Verdict::Converged => Ok(self),
            Verdict::NotConverged => Err(Error::NotConverged { strides: self.strides.len() }),
        }
    }
}

/// Problem data mapped onto one grid.
pub struct Discretized {
    pub complex: Complex,
    pub oracle: ConstraintOracle,
    pub frozen: Vec<FaceId>,
    pub forbidden: Vec<FaceId>,
    pub patches: usize,
    pub merge: Option<MergeReport>,
}

fn counts_for(spec: &ProblemSpec, stride: f64) -> Result<[usize; 3]> {
    let mut counts = [1usize; 3];
    for i in 0..spec.domain.n {
        let q = (spec.domain.max[i] - spec.domain.min[i]) / stride;
        if (q - q.round()).abs() > 1e-9 {
            return Err(Error::Config(format!("domain extent on axis {i} is not a multiple of stride {stride}")));
        }
        counts[i] = q.round() as usize;
    }
    Ok(counts)
}

/// Grid for one stride, with rotated patches merged along the flat parts of
/// `current` when the problem asks for them.
pub fn build_grid(spec: &ProblemSpec, stride: f64, current: Option<&SimplicialSet>) -> Result<(Complex, usize, Option<MergeReport>)> {
    let n = spec.domain.n;
    let block = DyadicGridSpec::block(n, stride, vec3(&spec.domain.min), counts_for(spec, stride)?);
    let background = match &spec.domain.periods {
        Some(p) if p.iter().any(|&x| x > 0.0) => {
            let mut period = [0.0; 3];
            period[..n].copy_from_slice(p);
            let mut topo = PeriodicTopology::new(period);
            topo.origin[..n].copy_from_slice(&spec.domain.min);
            build_periodic(&block, &topo)?
        }
        _ => build_dyadic(&block)?,
    };
    let holes: Vec<Obstacle> = spec
        .domain
        .holes
        .iter()
        .map(|h| {
            let (mut lo, mut hi) = ([0.0; 3], [0.0; 3]);
            lo[..n].copy_from_slice(&h.min);
            hi[..n].copy_from_slice(&h.max);
            Obstacle::Box { min: lo, max: hi }
        })
        .collect();
    let mut complex = excise(&background, &holes)?;
    let mut merged = None;
    let mut patches = 0;
    if let (true, Some(e), 2) = (spec.input.oriented_patches, current, n) {
        let fits = fit_patches(e, spec.schedule.patch_epsilon, spec.schedule.max_patches);
        let mut bands = Vec::new();
        let mut parts = Vec::new();
        for fit in fits.iter().filter(|f| f.plane.len() == 1) {
            let t = fit.direction();
            let cells = (2.0 * fit.radius / stride).ceil().max(1.0) as usize;
            let band_stride = 2.0 * fit.radius / cells as f64;
            let origin = Vec3::from(fit.center) - t * fit.radius;
            let band = build_dyadic(&oriented_band(origin, t, cells, band_stride))?;
            for &c in band.cells() {
                parts.push(Obstacle::Polytope(band.faces[c].polyhedron.clone()));
            }
            bands.push(band);
        }
        if !bands.is_empty() {
            let outer = carve_region(&complex, &[Obstacle::Union { parts }], 2.0 * stride)?;
            let cfg = MergeConfig { lattice: Some(block.clone()), ..Default::default() };
            let (m, report) = merge(&outer, &bands, &cfg)?;
            patches = bands.len();
            complex = m;
            merged = Some(report);
        }
    }
    Ok((complex, patches, merged))
}

/// Maps the problem's constraint data onto `complex`.
pub fn discretize(spec: &ProblemSpec, complex: Complex, patches: usize, merge: Option<MergeReport>) -> Result<Discretized> {
    let d = spec.domain.d;
    let inp = &spec.input;
    let mut exempt: Vec<FaceId> = Vec::new();
    let mut frozen = Vec::new();
    let oracle = match spec.oracle.kind {
        OracleKind::Connectivity => {
            let terminals: Vec<FaceId> = inp.terminals.iter().map(|p| complex.nearest_vertex_face(&vec3(p))).collect();
            frozen.extend(terminals.iter().copied());
            exempt.extend(terminals.iter().copied());
            ConstraintOracle::Connectivity { terminals }
        }
        OracleKind::Separation => {
            let mut pairs = Vec::new();
            for [a, b] in &inp.separate {
                let ca = complex.locate(&vec3(a)).ok_or_else(|| Error::Config(format!("point {a:?} outside the grid")))?;
                let cb = complex.locate(&vec3(b)).ok_or_else(|| Error::Config(format!("point {b:?} outside the grid")))?;
                pairs.push((ca, cb));
            }
            ConstraintOracle::Separation { pairs }
        }
        OracleKind::Periodic => ConstraintOracle::Periodic { axis: spec.oracle.axis },
        OracleKind::Spanning => {
            let boundary = frame_faces(&complex, d, &inp.frame)?;
            for &f in &boundary {
                exempt.extend(complex.closure(f));
            }
            ConstraintOracle::Spanning { boundary }
        }
    };
    let forbidden = if complex.periodic.is_some() { Vec::new() } else { boundary_faces_excluding(&complex, d, &exempt) };
    Ok(Discretized { complex, oracle, frozen, forbidden, patches, merge })
}

/// Faces of the complex along a closed frame polygon: its corners for
/// d = 1, the edges lying on its sides for d = 2.
fn frame_faces(complex: &Complex, d: usize, frame: &[Vec<f64>]) -> Result<Vec<FaceId>> {
    let pts: Vec<Vec3> = frame.iter().map(|p| vec3(p)).collect();
    if d == 1 {
        return Ok(pts.iter().map(|p| complex.nearest_vertex_face(p)).collect());
    }
    let on_frame = |p: &Vec3| {
        (0..pts.len()).any(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            crate::geometry::point_segment_distance(p, &a, &b) < 1e-9
        })
    };
    let out: Vec<FaceId> = complex
        .faces_of_dim(d - 1)
        .iter()
        .copied()
        .filter(|&f| {
            let poly = &complex.faces[f].polyhedron;
            poly.vertices.iter().all(&on_frame) && on_frame(&poly.centroid())
        })
        .collect();
    if out.is_empty() {
        return Err(Error::Config("frame meets no grid faces".into()));
    }
    Ok(out)
}

/// d-faces touching the boundary of the complex anywhere outside `exempt`.
/// Sets live in the open domain, so such faces are never added.
fn boundary_faces_excluding(complex: &Complex, d: usize, exempt: &[FaceId]) -> Vec<FaceId> {
    let exempt: HashSet<FaceId> = exempt.iter().copied().collect();
    let mut on_boundary: HashSet<FaceId> = HashSet::new();
    for f in complex.boundary_faces() {
        on_boundary.extend(complex.closure(f));
    }
    complex
        .faces_of_dim(d)
        .iter()
        .copied()
        .filter(|&f| complex.closure(f).iter().any(|g| on_boundary.contains(g) && !exempt.contains(g)))
        .collect()
}

fn sample_spacing(stride: f64) -> f64 {
    stride / 4.0
}

/// Runs the minimizing sequence over the stride schedule.
pub fn run(spec: &ProblemSpec) -> Result<RunReport> {
    spec.validate()?;
    let d = spec.domain.d;
    let h = spec.density()?;
    let seed = spec.seed.value;
    let windows = spec.windows();
    let input = spec.input_set()?;
    let mut current: Option<SimplicialSet> = (!input.is_empty()).then_some(input);
    let mut records: Vec<StrideRecord> = Vec::new();
    let mut sequence: Vec<SimplicialSet> = Vec::new();
    let mut last: Option<(Discretized, Skeleton, Vec<MoveRecord>)> = None;
    let mut converged_at = None;
    let mut prev_samples: Option<Vec<Vec3>> = None;
    for (k, stride) in spec.schedule.strides().into_iter().enumerate() {
        let (complex, patches, merge_report) = build_grid(spec, stride, current.as_ref())?;
        let disc = discretize(spec, complex, patches, merge_report)?;
        let cx = &disc.complex;
        let stride_seed = seed ^ ((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));

        let (mut init, cascade, cascade_max, er_before, er_after) = match &current {
            Some(e) => {
                let casc = ff_cascade(cx, e, d, &CascadeConfig { seed: stride_seed, candidates: CENTER_CANDIDATES })?;
                let er = erode_carried(cx, &casc.carried, d)?;
                let max_ratio = casc.ledger.iter().map(|l| l.ratio).fold(1.0, f64::max);
                let mut ids = er.skeleton.face_ids.clone();
                ids.extend(&er.lower);
                (Skeleton::new(d, ids), casc.ledger, max_ratio, er.measure_before, er.measure_after)
            }
            None => (Skeleton::new(d, vec![]), Vec::new(), 1.0, 0.0, 0.0),
        };
        init = init.with_frozen(disc.frozen.clone());
        let init = repair(cx, &init, &disc.oracle, &h, &disc.forbidden)?;
        let cfg = OptimizeConfig {
            exhaustive_cap: spec.schedule.exhaustive_cap,
            restarts: spec.schedule.restarts,
            seed: stride_seed,
            swap_cells: spec.schedule.swap_cells,
            forbidden: disc.forbidden.clone(),
            ..Default::default()
        };
        let out = optimize(cx, &init, &disc.oracle, &h, &cfg)?;
        let set = out.skeleton.to_set(cx);
        let samples = sample_set(&set, sample_spacing(stride));
        let window_distances: Vec<f64> = match &prev_samples {
            Some(p) => windows.iter().map(|w| local_hausdorff(w, p, &samples)).collect(),
            None => Vec::new(),
        };
        let delta_value = records.last().map(|r: &StrideRecord| out.value - r.value);
        info!(
            "stride {k} ({stride}): J = {:.6}, cells = {}, certificate = {:?}",
            out.value,
            cx.cells().len(),
            out.certificate
        );
        records.push(StrideRecord {
            index: k,
            stride,
            cells: cx.cells().len(),
            value: out.value,
            hausdorff: out.hausdorff,
            delta_value,
            window_distances: window_distances.clone(),
            cascade,
            cascade_max_ratio: cascade_max,
            erosion_before: er_before,
            erosion_after: er_after,
            certificate: out.certificate,
            free_faces: out.free_faces,
            accepted_moves: out.moves.len(),
            patches: disc.patches,
            merge: disc.merge.clone(),
            core_counts: out.cores.levels.iter().map(|l| l.len()).collect(),
        });
        let settled = delta_value.is_some_and(|dv| dv.abs() < spec.tolerances.energy)
            && window_distances.iter().all(|&x| x < spec.tolerances.distance);
        debug!("stride {k}: delta = {delta_value:?}, distances = {window_distances:?}");
        sequence.push(set.clone());
        current = Some(set);
        prev_samples = Some(samples);
        last = Some((disc, out.skeleton, out.moves));
        if settled && converged_at.is_none() {
            converged_at = Some(k);
            if spec.schedule.stop_on_convergence {
                break;
            }
        }
    }
    let (disc, skeleton, moves) = last.expect("schedule has at least one stride");
    let final_set = current.unwrap_or_else(|| SimplicialSet::new(spec.domain.n, d));
    let oracle_holds = admissible(&disc.complex, &skeleton, &disc.oracle)?;
    let verdict = if converged_at.is_some() { Verdict::Converged } else { Verdict::NotConverged };
    let lsc = Some(lsc_probe(&sequence, &final_set, &h, &windows, spec.tolerances.lsc));
    let quasi = match verdict {
        Verdict::Converged => {
            let pc = ProbeConfig { forbidden: disc.forbidden.clone(), ..ProbeConfig::new(spec.tolerances.probe_trials, seed) };
            Some(quasiminimality_probe(&disc.complex, &skeleton, &disc.oracle, &pc)?)
        }
        Verdict::NotConverged => None,
    };
    Ok(RunReport {
        seed,
        final_value: records.last().map_or(0.0, |r| r.value),
        strides: records,
        verdict,
        converged_at,
        final_skeleton: skeleton,
        final_set,
        sequence,
        oracle_holds,
        lsc,
        quasi,
        moves,
        cores_from_previous_stride: true,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeRow {
    pub delta: f64,
    pub samples: usize,
    /// Worst probed ratio at scales up to `delta`, minus one.
    pub excess: f64,
}

/// Worst probe ratio minus one at dyadic scales, from the finest probed
/// window up to the largest. Empty unless the run converged.
pub fn gauge_report(report: &RunReport) -> Vec<GaugeRow> {
    let Some(quasi) = (report.verdict == Verdict::Converged).then_some(report.quasi.as_ref()).flatten() else {
        return Vec::new();
    };
    let scales: Vec<f64> = quasi.records.iter().map(|r| r.scale).collect();
    let Some(top) = scales.iter().copied().reduce(f64::max) else { return Vec::new() };
    let bottom = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rows = Vec::new();
    let mut delta = top;
    while delta >= bottom * (1.0 - 1e-12) {
        let hits: Vec<f64> = quasi.records.iter().filter(|r| r.scale <= delta * (1.0 + 1e-12)).map(|r| r.ratio).collect();
        if !hits.is_empty() {
            let worst = hits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            rows.push(GaugeRow { delta, samples: hits.len(), excess: worst - 1.0 });
        }
        delta /= 2.0;
    }
    rows.reverse();
    rows
}
