//! Certified approximations of co-c.e. spheres and cells.
//!
//! Candidates come from the grid construction pushed through a sampler of
//! the homeomorphism; nothing about them is trusted. A candidate is
//! accepted once every condition of its checklist answers `Yes`, and the
//! output is then within `3 · 2^-k` (spheres) or `7 · 2^-k` (cells) of the
//! set in the Hausdorff sense.

pub mod certificate;
pub mod check;
pub mod grid;
pub mod oracle;
pub mod sampler;
pub mod search;
pub mod seed;
pub mod witness;

pub use certificate::{
    parse_certificate, verify, verify_certificate, Body, Certificate, VerifyError, VerifyOptions, VerifySummary,
    CELL_KIND, SPHERE_KIND,
};
pub use check::{check, CheckReport, Condition, Status, Target};
pub use grid::{boundary_facets, cell_box, cell_box_f64, grid_mesh, Facet};
pub use oracle::{verify_approximation, OracleReport};
pub use sampler::{Corruption, Sampler, SamplerSpec};
pub use search::{
    approximate_cell, approximate_sphere, bound, output_balls, Certified, CertifiedApproximator, PartialReport,
    Provenance, SearchConfig, SearchOutcome,
};
pub use seed::{seed_cell_candidate, seed_spherical_candidate};
pub use witness::{derive_heuristic, CellWitness, FaceSets, SphereWitness, Witness, WitnessKind};
