//! Campaign steps. Each step is independent of the others, produces its
//! check rows and artifacts in memory, and is named after the checks it
//! feeds so that module errors can be attributed.

mod blowup;
mod bochner;
mod grid;
mod martin;
mod roots;
mod shoot;

use std::fmt::Display;

use thiserror::Error;

use crate::config::{Campaign, ExperimentConfig};
use crate::report::{Artifact, CheckRow};

#[derive(Debug, Default)]
pub struct StepOutput {
    pub rows: Vec<CheckRow>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("check {check} failed to run: {message}")]
pub struct CheckError {
    pub check: String,
    pub message: String,
}

pub(crate) trait Checked<T> {
    fn check(self, name: &str) -> Result<T, CheckError>;
}

impl<T, E: Display> Checked<T> for Result<T, E> {
    fn check(self, name: &str) -> Result<T, CheckError> {
        self.map_err(|e| CheckError {
            check: name.to_string(),
            message: e.to_string(),
        })
    }
}

pub type StepFn = fn(&ExperimentConfig, u64) -> Result<StepOutput, CheckError>;

#[derive(Clone, Copy)]
pub struct Step {
    pub name: &'static str,
    pub run: StepFn,
}

/// Steps of one concrete campaign, in report order.
pub fn steps(campaign: Campaign) -> Vec<Step> {
    let table: &[(&'static str, StepFn)] = match campaign {
        Campaign::Roots => &[
            ("roots.indicial_sweep", roots::indicial_sweep),
            ("roots.hardy_sweep", roots::hardy_sweep),
            ("roots.instance", roots::instance),
        ],
        Campaign::Shoot => &[
            ("shoot.yukawa", shoot::yukawa),
            ("shoot.planar", shoot::planar),
            ("shoot.nonlinear", shoot::nonlinear),
            ("shoot.riccati", shoot::riccati),
        ],
        Campaign::Blowup => &[
            ("blowup.fixed_points", blowup::fixed_points),
            ("blowup.yukawa", blowup::yukawa_translation),
        ],
        Campaign::Martin => &[("martin.kernel", martin::kernel)],
        Campaign::Grid => &[("grid.solves", grid::solves), ("grid.equality", grid::equality)],
        Campaign::Bochner => &[("bochner.refinement", bochner::refinement)],
        Campaign::All => return Campaign::ALL_PARTS.iter().flat_map(|&c| steps(c)).collect(),
    };
    table.iter().map(|&(name, run)| Step { name, run }).collect()
}
