//! Weak* basins of measures, Milnor basins of compact sets, and parallel
//! grid estimates of their Lebesgue measure.

mod attractor;
mod classify;
mod grid;
mod scan;

pub use attractor::{simplex_vertices, AttractorSpec};
pub use classify::{
    classify_point, classify_trace, milnor_fraction, milnor_fractions, visit_frequencies,
    BasinParams, Classification, DEFAULT_MILNOR_THRESHOLD,
};
pub use grid::Grid;
pub use scan::{
    grid_scan, map_cells, observability_check, optimal_point_scan, BasinMode, BasinQuery,
    BasinScanResult, BasinTarget, CellData, CellResult, ObservabilityReport, ObservabilityRow,
    ScanKind, Verdict,
};
