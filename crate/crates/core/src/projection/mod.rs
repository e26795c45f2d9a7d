//! Projections of simplicial sets onto skeletons of a complex.

mod apply;
mod cascade;
mod maps;
mod patches;

pub use apply::{apply_map, ApplyReport, DEFAULT_MAP_TOL, MAX_SUBDIVISION_DEPTH};
pub use cascade::{
    distribute, erode, erode_carried, ff_cascade, optimal_center, Carried, Cascade, CascadeConfig, CenterChoice,
    CenterRecord, Erosion, LevelRecord, CENTER_CANDIDATES, COVER_EPS,
};
pub use maps::{
    blend_check, grid_samples, hole_extension, magnetic_lipschitz_bound, magnetic_project, radial_project,
    ring_extension, BallRegion, BlendReport, ConeRegion, MapStage, PiecewiseMap, Region,
};
pub use patches::{fit_patches, PatchFit};
