//! Named systems, potentials, reference measures and attractors.

mod bumps;
mod registry;

pub use bumps::{may_leonard_system, prop43_potential, smoothstep, vertex_well, OrbitSeed, Prop43};
pub use registry::{
    build_scenario, Scenario, CONSTRUCTION_CHECK_HORIZON, CONSTRUCTION_CHECK_SAMPLES,
    HETEROCLINIC_EXCLUSION_RADIUS, MATRIX_FAMILY_NAMES, SCENARIO_NAMES,
};
