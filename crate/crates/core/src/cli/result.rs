//! Result documents written by every subcommand.
//!
//! Each is a JSON object `{"command": ..., "status": ..., ...}`; the status
//! decides the exit code.

use serde::{Deserialize, Serialize};

use crate::cohomology::ConstrainedViolation;
use crate::function::RationalFunction;
use crate::lattice::LatticeWindow;
use crate::oracle::DualCertificate;
use crate::rational::{self, Rational};
use crate::star::{PremiseConvention, SearchReport, StarViolation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CERTIFICATE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Pick by instance kind and number of transformations.
    #[default]
    Auto,
    Single,
    TwoStep,
    ThreeStep,
    LinearOracle,
    AxisInduction,
}

/// A failing commutation check: `T_i T_j x ≠ T_j T_i x`. Transformation
/// indices are 1-based like in star certificates; `x` is a domain index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutationWitness {
    pub i: usize,
    pub j: usize,
    pub x: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum Outcome {
    Valid {
        size: usize,
        transforms: usize,
    },
    /// Condition (*) holds. `bound` is absent for lattice windows, where
    /// only the top mixed difference is checked.
    Pass {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bound: Option<usize>,
        #[serde(default)]
        convention: PremiseConvention,
    },
    Decomposed {
        method: Method,
        parts: Vec<RationalFunction>,
    },
    WindowDecomposed {
        parts: Vec<LatticeWindow>,
    },
    Violation {
        certificate: StarViolation,
    },
    /// The mixed difference of a lattice window is nonzero at `point`.
    WindowViolation {
        point: Vec<usize>,
        #[serde(with = "rational::as_string")]
        value: Rational,
    },
    Infeasible {
        certificate: DualCertificate,
    },
    Solved {
        solution: RationalFunction,
        #[serde(with = "rational::as_string")]
        bound_c: Rational,
    },
    Obstructed {
        certificate: ConstrainedViolation,
    },
    Searched {
        report: SearchReport,
    },
    Verified {
        /// Status of the certificate that was re-checked.
        checked: String,
    },
    Rejected {
        reason: String,
    },
    InputError {
        message: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        witness: Option<CommutationWitness>,
    },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Valid { .. }
            | Outcome::Pass { .. }
            | Outcome::Decomposed { .. }
            | Outcome::WindowDecomposed { .. }
            | Outcome::Solved { .. }
            | Outcome::Verified { .. } => EXIT_OK,
            Outcome::Searched { report } if report.candidates.is_empty() => EXIT_OK,
            Outcome::Violation { .. }
            | Outcome::WindowViolation { .. }
            | Outcome::Infeasible { .. }
            | Outcome::Obstructed { .. }
            | Outcome::Searched { .. }
            | Outcome::Rejected { .. } => EXIT_CERTIFICATE,
            Outcome::InputError { .. } => EXIT_INPUT,
        }
    }

    pub fn status(&self) -> &'static str {
        match self {
            Outcome::Valid { .. } => "valid",
            Outcome::Pass { .. } => "pass",
            Outcome::Decomposed { .. } => "decomposed",
            Outcome::WindowDecomposed { .. } => "window-decomposed",
            Outcome::Violation { .. } => "violation",
            Outcome::WindowViolation { .. } => "window-violation",
            Outcome::Infeasible { .. } => "infeasible",
            Outcome::Solved { .. } => "solved",
            Outcome::Obstructed { .. } => "obstructed",
            Outcome::Searched { .. } => "searched",
            Outcome::Verified { .. } => "verified",
            Outcome::Rejected { .. } => "rejected",
            Outcome::InputError { .. } => "input-error",
        }
    }

    pub(crate) fn input(message: impl Into<String>) -> Self {
        Outcome::InputError {
            message: message.into(),
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        self.outcome.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
