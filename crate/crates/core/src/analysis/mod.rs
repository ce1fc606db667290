//! Hypothesis audits, Fenchel–Moreau verification runs, boundary-supported
//! domains, and outer normal cone witnesses.

pub mod catalog;
mod gamma;
mod normal;
mod verify;

pub use catalog::{BoundFn, CatalogFn, IndicatorSet, Param};
pub use gamma::{gamma_audit, GammaAudit, GAMMA_TOL};
pub use normal::{check_normal_witness, normal_cone_witness, NormalConeConfig, NormalWitnessCheck};
pub use verify::{
    boundary_domain_probe, gap_threshold, verify_fenchel_moreau, verify_gridfn, BoundaryVerdict,
    FMVerdict, LevelReport, LevelTiming, Status, VerifyConfig,
};

use crate::value::ExtReal;

/// Something that can be sampled on a grid: a catalog entry or any closure.
pub trait FnSource: Sync {
    fn eval(&self, x: &[f64]) -> ExtReal;

    fn describe(&self) -> String {
        "custom".to_string()
    }

    /// Known hypothesis status, if any.
    fn gamma_flag(&self) -> Option<bool> {
        None
    }
}

impl<F> FnSource for F
where
    F: Fn(&[f64]) -> ExtReal + Sync,
{
    fn eval(&self, x: &[f64]) -> ExtReal {
        self(x)
    }
}
