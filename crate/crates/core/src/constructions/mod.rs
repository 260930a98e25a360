//! Generators and analytic verifiers for the three constructions: the
//! tangent half-planes showing compactness is needed, the elevated planar
//! regions showing k-unboundedness is needed, and the cube family showing
//! the bound `√(1/(r−k))` is tight. Random premise-satisfying instances live
//! in [`random`].

pub mod aronov;
pub mod compactness;
pub mod cube;
pub mod random;
pub mod reports;

pub use aronov::{aronov_elevated_family, aronov_min_max, aronov_polygons, aronov_profile, AronovParams};
pub use compactness::{compactness_family, continuum_objective, piercing_line};
pub use cube::{cube_claims_report, cube_instance, CubeInstance, CubeReport, CubeReportConfig};
pub use random::{random_colorful_instance, random_helly_instance, random_kflat_instance, KflatInstance};
pub use reports::{
    aronov_claims_report, compactness_claims_report, AronovReport, AronovReportConfig, CompactnessReport,
    CompactnessReportConfig,
};

use serde::Serialize;

/// One verified claim: a measured value compared against a target.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Claim {
    pub fn new(
        name: impl Into<String>,
        passed: bool,
        value: f64,
        target: f64,
        tolerance: f64,
        detail: impl Into<String>,
    ) -> Self {
        Claim {
            name: name.into(),
            passed,
            value,
            target,
            tolerance,
            detail: detail.into(),
        }
    }
}
