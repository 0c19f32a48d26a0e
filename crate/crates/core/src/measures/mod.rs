//! Probability measures, the weak* metric `dist*`, and limit-set estimates
//! for empirical measures.

mod checks;
mod limit_set;
mod measure;
mod metric;
mod spec;

pub use checks::{
    check_empirical_recursion, check_metric_axioms, random_measure, MetricAxiomsReport,
    RecursionReport, KERNEL_TOL,
};
pub use limit_set::{
    limit_set_estimate, trace_checkpoints, CheckpointTrace, Cluster, LimitSetEstimate,
};
pub use measure::{
    empirical_measure, periodic_points, EmpiricalMeasure, Measure, MERGE_TOL, PERIOD_TOL,
};
pub use metric::{weak_star_distance, Harmonic, Signature, TestFunction, WeakStarMetric};
pub use spec::measure_from_spec;
