//! Random local deformations of a skeleton and the measure ratios they achieve.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{Complex, FaceId};
use crate::error::Result;
use crate::geometry::Aabb;

use super::oracle::{ConstraintOracle, Space};
use super::Skeleton;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub trials: usize,
    pub seed: u64,
    /// Windows are a random cell grown by up to this many rings of neighbours.
    pub max_rings: usize,
    /// d-faces a deformation may not add.
    pub forbidden: Vec<FaceId>,
}

impl ProbeConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        ProbeConfig { trials, seed, max_rings: 2, forbidden: Vec::new() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeformationKind {
    Removal,
    Collapse,
    Swap,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub cell: FaceId,
    pub kind: DeformationKind,
    /// Diameter of the window the deformation acts in.
    pub scale: f64,
    pub before: f64,
    pub after: f64,
    /// `before / after`; infinite when the deformation removes everything.
    pub ratio: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuasiReport {
    pub trials: usize,
    /// Deformations that were inadmissible, touched fixed faces or changed nothing.
    pub skipped: usize,
    pub records: Vec<ProbeRecord>,
    pub max_ratio: Option<f64>,
}

/// Applies `trials` random local deformations to `skel` and reports the
/// ratio of the d-measure inside each window before and after. Images that
/// break the oracle, remove frozen faces or add forbidden ones are skipped,
/// as are windows where both measures vanish.
pub fn quasiminimality_probe(
    complex: &Complex,
    skel: &Skeleton,
    oracle: &ConstraintOracle,
    cfg: &ProbeConfig,
) -> Result<QuasiReport> {
    let mut report = QuasiReport { trials: cfg.trials, ..Default::default() };
    if cfg.trials == 0 {
        return Ok(report);
    }
    let lower: Vec<FaceId> = skel.face_ids.iter().copied().filter(|&f| complex.faces[f].dim < skel.dim).collect();
    let space = Space::new(complex, skel.dim, oracle, &skel.frozen_ids, &cfg.forbidden, lower)?;
    let mut on = space.frozen.clone();
    for &f in &skel.face_ids {
        if let Some(i) = space.local(f) {
            on[i] = true;
        }
    }
    let cells = complex.cells();
    let star = complex.vertex_star();
    let upper = complex.faces_of_dim(skel.dim + 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let selected: Vec<usize> = (0..space.m).filter(|&i| on[i]).collect();
    for _ in 0..cfg.trials {
        // window: a cell near the skeleton grown by vertex-adjacent rings
        let seed_cell = match selected.choose(&mut rng) {
            Some(&i) => *complex.faces[space.global(i)].cells.choose(&mut rng).unwrap(),
            None => cells[rng.gen_range(0..cells.len())],
        };
        let rings = rng.gen_range(0..=cfg.max_rings);
        let mut window: BTreeSet<FaceId> = BTreeSet::from([seed_cell]);
        for _ in 0..rings {
            let grown: Vec<FaceId> = window
                .iter()
                .flat_map(|&c| complex.faces[c].vertices.iter())
                .flat_map(|&v| star[v].iter().copied())
                .filter(|&f| complex.faces[f].dim == complex.dim)
                .collect();
            window.extend(grown);
        }
        let in_window = |f: FaceId| complex.faces[f].cells.iter().any(|c| window.contains(c));
        let faces: Vec<usize> = (0..space.m).filter(|&i| in_window(space.global(i))).collect();
        let uppers: Vec<FaceId> = upper.iter().copied().filter(|&s| in_window(s)).collect();
        let present: Vec<usize> = faces.iter().copied().filter(|&i| on[i]).collect();

        let kind = match rng.gen_range(0..3) {
            0 => DeformationKind::Removal,
            1 => DeformationKind::Collapse,
            _ => DeformationKind::Swap,
        };
        let mut image = on.clone();
        match kind {
            DeformationKind::Removal => {
                for &i in &present {
                    if rng.gen_bool(0.5) {
                        image[i] = false;
                    }
                }
                if let (true, Some(&i)) = (image == on, present.choose(&mut rng)) {
                    image[i] = false;
                }
            }
            DeformationKind::Collapse => {
                if let Some(&i) = present.choose(&mut rng) {
                    let f = space.global(i);
                    let parents: Vec<FaceId> = complex.faces[f].parents.iter().copied().filter(|s| uppers.contains(s)).collect();
                    if let Some(&s) = parents.choose(&mut rng) {
                        image[i] = false;
                        for &c in &complex.faces[s].children {
                            if c != f {
                                image[c - space.offset] = true;
                            }
                        }
                    }
                }
            }
            DeformationKind::Swap => {
                if let Some(&s0) = uppers.choose(&mut rng) {
                    let mut set = vec![s0];
                    let size = rng.gen_range(1..=4);
                    while set.len() < size {
                        let mut nb: Vec<FaceId> = set
                            .iter()
                            .flat_map(|&s| complex.faces[s].children.iter())
                            .flat_map(|&c| complex.faces[c].parents.iter().copied())
                            .filter(|t| uppers.contains(t) && !set.contains(t))
                            .collect();
                        nb.sort_unstable();
                        nb.dedup();
                        match nb.choose(&mut rng) {
                            Some(&t) => set.push(t),
                            None => break,
                        }
                    }
                    for s in set {
                        for &c in &complex.faces[s].children {
                            let j = c - space.offset;
                            image[j] = !image[j];
                        }
                    }
                }
            }
        }
        let changed: Vec<usize> = (0..space.m).filter(|&i| image[i] != on[i]).collect();
        let fixed_violation = changed.iter().any(|&i| (on[i] && space.frozen[i]) || (!on[i] && space.forbidden[i]));
        if changed.is_empty() || fixed_violation || !space.check(&image) {
            report.skipped += 1;
            continue;
        }
        let measure = |sel: &[bool]| -> f64 {
            faces.iter().filter(|&&i| sel[i]).map(|&i| complex.faces[space.global(i)].measure).sum()
        };
        let (before, after) = (measure(&on), measure(&image));
        if before == 0.0 && after == 0.0 {
            report.skipped += 1;
            continue;
        }
        let ratio = if after == 0.0 { f64::INFINITY } else { before / after };
        let corners: Vec<_> = window
            .iter()
            .flat_map(|&c| {
                let b = complex.faces[c].polyhedron.bbox();
                [b.min, b.max]
            })
            .collect();
        let bb = Aabb::from_points(&corners);
        report.records.push(ProbeRecord {
            cell: seed_cell,
            kind,
            scale: (bb.max - bb.min).norm(),
            before,
            after,
            ratio,
        });
        report.max_ratio = Some(report.max_ratio.map_or(ratio, |m: f64| m.max(ratio)));
    }
    Ok(report)
}
