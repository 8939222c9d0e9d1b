//! Concrete quadrangles: classical quadrics, Kantor–Knuth coset geometries
//! and Tits quadrangles.

pub mod kantor;
pub mod quadric;
pub mod tits;

pub use kantor::{build_kantor_knuth, verify_4gonal_family, CosetModel, FamilyReport, Gel, KkLine, KkPoint};
pub use quadric::{build_elliptic, build_parabolic, parabolic_section, QuadricKind, QuadricModel};
pub use tits::{
    build_counterexample_morphism, build_tits_t2, projection_scenario, standard_conic, ProjectionReport,
    ProjectionScenario, TitsModel,
};
