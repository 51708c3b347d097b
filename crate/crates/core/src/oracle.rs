//! Ground-truth decomposability by exact linear algebra. Unknowns are one
//! coefficient per class of each part's invariance partition; the function is
//! decomposable iff the resulting system is consistent.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::function::RationalFunction;
use crate::linalg::{self, Solution};
use crate::orbits::{invariance_classes, Partition};
use crate::rational::Rational;
use crate::system::{CommutingSystem, Decomposition, Transformation};

/// A linear functional on value tables that vanishes on every invariance
/// kernel yet pairs nonzero with the target function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub weights: RationalFunction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CertificateDefect {
    Length,
    /// Nonzero pairing with the indicator of class `class` of part `part`.
    KernelPairing {
        part: usize,
        class: usize,
    },
    /// The functional vanishes on the target too.
    ZeroOnTarget,
}

impl DualCertificate {
    /// Checks the certificate against arbitrary kernel partitions.
    pub fn verify_partitions(&self, partitions: &[Partition], f: &RationalFunction) -> Result<(), CertificateDefect> {
        if self.weights.len() != f.len() || partitions.iter().any(|p| p.len() != f.len()) {
            return Err(CertificateDefect::Length);
        }
        for (part, p) in partitions.iter().enumerate() {
            let mut sums = vec![Rational::zero(); p.num_classes()];
            for x in 0..f.len() {
                sums[p.class_of(x)] += &self.weights[x];
            }
            if let Some(class) = sums.iter().position(|s| !s.is_zero()) {
                return Err(CertificateDefect::KernelPairing { part, class });
            }
        }
        if self.weights.pairing(f).is_zero() {
            return Err(CertificateDefect::ZeroOnTarget);
        }
        Ok(())
    }

    /// Re-checks the certificate from scratch against the system's kernels.
    pub fn verify(&self, system: &CommutingSystem, f: &RationalFunction) -> Result<(), CertificateDefect> {
        let bases: Vec<Vec<RationalFunction>> = system.transforms().iter().map(kernel_basis).collect();
        if self.weights.len() != f.len() {
            return Err(CertificateDefect::Length);
        }
        for (part, basis) in bases.iter().enumerate() {
            if let Some(class) = basis.iter().position(|b| !self.weights.pairing(b).is_zero()) {
                return Err(CertificateDefect::KernelPairing { part, class });
            }
        }
        if self.weights.pairing(f).is_zero() {
            return Err(CertificateDefect::ZeroOnTarget);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Feasible(Decomposition),
    Infeasible(DualCertificate),
}

impl OracleOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, OracleOutcome::Feasible(_))
    }
}

/// Indicators of the invariance classes of `t`; they span the `t`-invariant
/// functions.
pub fn kernel_basis(t: &Transformation) -> Vec<RationalFunction> {
    invariance_classes(t)
        .classes()
        .iter()
        .map(|members| RationalFunction::indicator(t.len(), members))
        .collect()
}

/// Decides whether `f` is a sum of functions, the `j`-th constant on the
/// classes of `partitions[j]`.
pub fn decompose_over_partitions(partitions: &[Partition], f: &RationalFunction) -> OracleOutcome {
    let size = f.len();
    let mut offsets = Vec::with_capacity(partitions.len());
    let mut cols = 0;
    for p in partitions {
        assert_eq!(p.len(), size, "partition on a different domain");
        offsets.push(cols);
        cols += p.num_classes();
    }
    let matrix: Vec<Vec<Rational>> = (0..size)
        .map(|x| {
            let mut row = vec![Rational::zero(); cols];
            for (p, &off) in partitions.iter().zip(&offsets) {
                row[off + p.class_of(x)] = Rational::one();
            }
            row
        })
        .collect();
    match linalg::solve(&matrix, f.values(), cols) {
        Solution::Point(coeffs) => {
            let parts = partitions
                .iter()
                .zip(&offsets)
                .map(|(p, &off)| RationalFunction::from_fn(size, |x| coeffs[off + p.class_of(x)].clone()))
                .collect();
            OracleOutcome::Feasible(Decomposition::new(parts))
        }
        Solution::Inconsistent(weights) => OracleOutcome::Infeasible(DualCertificate {
            weights: RationalFunction::new(weights),
        }),
    }
}

pub fn oracle_decompose(system: &CommutingSystem, f: &RationalFunction) -> OracleOutcome {
    let partitions: Vec<Partition> = system.transforms().iter().map(invariance_classes).collect();
    decompose_over_partitions(&partitions, f)
}

/// Dimension of the sum of the invariance kernels.
pub fn decomposable_dimension(system: &CommutingSystem) -> usize {
    let rows: Vec<Vec<Rational>> = system
        .transforms()
        .iter()
        .flat_map(kernel_basis)
        .map(RationalFunction::into_values)
        .collect();
    linalg::rank(&rows, system.size())
}
