//! Constructive decompositions for two and three commuting transformations.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cohomology::solve_transfer_pair;
use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::orbits::{find_relation, joint_partition, power_grid, prescribing_relation, Relation};
use crate::star::two::{compatibility_violation, mixed_violation};
use crate::star::{check_star, StarViolation};
use crate::system::{
    delta, is_invariant, validate_system, verify_decomposition, Decomposition, Domain, Transformation,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum DecompOutcome {
    Decomposed(Decomposition),
    Violation(StarViolation),
}

impl DecompOutcome {
    pub fn is_decomposed(&self) -> bool {
        matches!(self, DecompOutcome::Decomposed(_))
    }

    pub fn decomposition(&self) -> Option<&Decomposition> {
        match self {
            DecompOutcome::Decomposed(d) => Some(d),
            DecompOutcome::Violation(_) => None,
        }
    }

    pub fn violation(&self) -> Option<&StarViolation> {
        match self {
            DecompOutcome::Decomposed(_) => None,
            DecompOutcome::Violation(v) => Some(v),
        }
    }
}

/// How the relation to the class representative is chosen when building
/// the `S`-invariant part. The result does not depend on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WitnessSearch {
    /// First common point of the two power grids, scanning `x`'s grid in
    /// row-major order.
    #[default]
    Grid,
    /// The smallest relation in the order of [`find_relation`].
    Minimal,
}

fn grid_relation(s: &Transformation, t: &Transformation, x: usize, x0: usize, bound: usize) -> Option<Relation> {
    let g0 = power_grid(s, t, x0, bound);
    let mut first = HashMap::new();
    for (k2, row) in g0.iter().enumerate() {
        for (n2, &p) in row.iter().enumerate() {
            first.entry(p).or_insert((k2, n2));
        }
    }
    let gx = power_grid(s, t, x, bound);
    gx.iter().enumerate().find_map(|(k, row)| {
        row.iter()
            .enumerate()
            .find_map(|(n, p)| first.get(p).map(|&(k2, n2)| Relation { k, n, k2, n2 }))
    })
}

/// Decomposes `f = g + h` with `g` `S`-invariant and `h` `T`-invariant, or
/// reports why no such decomposition exists.
///
/// With `x0` the representative of the joint class of `x` and
/// `T^k S^n x = T^{k2} S^{n2} x0`, the part is
/// `g(x) = f(T^{k2} x0) − f(T^k x) + f(x)`.
pub fn decompose_two(
    s: &Transformation,
    t: &Transformation,
    f: &RationalFunction,
    bound: usize,
) -> Result<DecompOutcome> {
    decompose_two_with(s, t, f, bound, WitnessSearch::Grid)
}

pub fn decompose_two_with(
    s: &Transformation,
    t: &Transformation,
    f: &RationalFunction,
    bound: usize,
    witnesses: WitnessSearch,
) -> Result<DecompOutcome> {
    let domain = Domain::new(f.len())?;
    let system = validate_system(vec![s.clone(), t.clone()], domain)?;
    if let Some(v) = mixed_violation(s, t, f) {
        return Ok(DecompOutcome::Violation(v));
    }
    if let Some(v) = compatibility_violation(s, t, f, bound, true) {
        return Ok(DecompOutcome::Violation(v));
    }
    let classes = joint_partition(f.len(), [s, t].into_iter());
    let mut g = RationalFunction::zero(f.len());
    for x in 0..f.len() {
        let x0 = classes.representative_of(x);
        let rel = match witnesses {
            WitnessSearch::Grid => grid_relation(s, t, x, x0, bound),
            WitnessSearch::Minimal => find_relation(s, t, x, x0, bound),
        }
        .ok_or(Error::BoundExhausted { bound })?;
        let value = &f[t.apply_pow(x0, rel.k2)] - &f[t.apply_pow(x, rel.k)] + &f[x];
        g.set(x, value);
    }
    let h = f - &g;
    let d = Decomposition::new(vec![g, h]);
    verify_decomposition(&system, f, &d)
        .map_err(|defect| Error::InternalContract(format!("two-part construction failed: {defect:?}")))?;
    Ok(DecompOutcome::Decomposed(d))
}

/// Which kinds of prescribed points a joint `(T, S, U)` class contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrescribedBranch {
    Neither,
    /// Only `(S, T)`-prescribed points.
    StOnly,
    /// Only `(U, T)`-prescribed points.
    UtOnly,
    Both,
}

impl PrescribedBranch {
    fn classify(st: bool, ut: bool) -> Self {
        match (st, ut) {
            (false, false) => PrescribedBranch::Neither,
            (true, false) => PrescribedBranch::StOnly,
            (false, true) => PrescribedBranch::UtOnly,
            (true, true) => PrescribedBranch::Both,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeTrace {
    pub outcome: DecompOutcome,
    /// One entry per joint class, in class order; empty on a violation.
    pub branches: Vec<PrescribedBranch>,
}

/// Decomposes `f = g + h + l` with `g`, `h`, `l` invariant under `T`, `S`,
/// `U` respectively, whenever Condition (*) holds.
pub fn decompose_three(
    t: &Transformation,
    s: &Transformation,
    u: &Transformation,
    f: &RationalFunction,
    bound: usize,
) -> Result<DecompOutcome> {
    decompose_three_traced(t, s, u, f, bound).map(|trace| trace.outcome)
}

/// [`decompose_three`] together with the prescribed-point branch of every
/// joint class.
///
/// Steps: `F = Δ_T f` splits as `H + L` (`S`- and `U`-invariant); then
/// `Δ_T h = H + χ` and `Δ_T l = L + λ` with `h` `S`-invariant, `l`
/// `U`-invariant and `χ`, `λ` the forced corrections. On each class the
/// corrections must cancel, which makes `g = f − h − l` `T`-invariant.
pub fn decompose_three_traced(
    t: &Transformation,
    s: &Transformation,
    u: &Transformation,
    f: &RationalFunction,
    bound: usize,
) -> Result<ThreeTrace> {
    let domain = Domain::new(f.len())?;
    let system = validate_system(vec![t.clone(), s.clone(), u.clone()], domain)?;
    domain.check_function(f)?;
    if let Some(v) = check_star(&system, f, bound).into_violation() {
        return Ok(ThreeTrace {
            outcome: DecompOutcome::Violation(v),
            branches: Vec::new(),
        });
    }
    let big_f = delta(t, f);
    let (big_h, big_l) = match decompose_two(s, u, &big_f, bound)? {
        DecompOutcome::Decomposed(d) => {
            let mut parts = d.parts.into_iter();
            (parts.next().expect("two parts"), parts.next().expect("two parts"))
        }
        DecompOutcome::Violation(v) => {
            return Err(Error::InternalContract(format!(
                "Δ_T f has no (S, U) decomposition although Condition (*) holds: {v:?}"
            )))
        }
    };
    let hs = solve_transfer_pair(t, s, &big_h)?;
    let lu = solve_transfer_pair(t, u, &big_l)?;
    let (chi, lambda) = (&hs.correction, &lu.correction);

    let classes = joint_partition(f.len(), [t, s, u].into_iter());
    let mut branches = Vec::with_capacity(classes.num_classes());
    for members in classes.classes() {
        let st = members.iter().any(|&x| prescribing_relation(s, t, x, bound).is_some());
        let ut = members.iter().any(|&x| prescribing_relation(u, t, x, bound).is_some());
        let branch = PrescribedBranch::classify(st, ut);
        branches.push(branch);
        if branch != PrescribedBranch::Both {
            // Every point of a finite domain is prescribed; anything else
            // means the exponent bound is too small for this domain.
            return Err(Error::InternalContract(format!(
                "class of {} has branch {branch:?}; finite classes are always prescribed on both sides",
                members[0]
            )));
        }
        let x0 = members[0];
        for &x in &members {
            if chi[x] != chi[x0] {
                return Err(Error::InternalContract(format!(
                    "χ is not constant on the class of {x0}"
                )));
            }
            if &chi[x] + &lambda[x] != num_traits::Zero::zero() {
                return Err(Error::InternalContract(format!("χ + λ ≠ 0 at {x}")));
            }
        }
    }

    let g = &(f - &hs.solution) - &lu.solution;
    let d = Decomposition::new(vec![g, hs.solution, lu.solution]);
    verify_decomposition(&system, f, &d)
        .map_err(|defect| Error::InternalContract(format!("three-part construction failed: {defect:?}")))?;
    debug_assert!(is_invariant(t, &d.parts[0]));
    Ok(ThreeTrace {
        outcome: DecompOutcome::Decomposed(d),
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_decompose;
    use crate::system::CommutingSystem;

    fn flip(bit: usize) -> Transformation {
        Transformation::new((0..8).map(|x| x ^ (1 << bit)).collect()).unwrap()
    }

    #[test]
    fn s_invariant_function() {
        let s = Transformation::translation(4, 2);
        let t = Transformation::translation(4, 1);
        let f = RationalFunction::from_integers(&[0, 1, 0, 1]);
        let out = decompose_two(&s, &t, &f, 8).unwrap();
        let d = out.decomposition().unwrap();
        assert!(is_invariant(&t, &d.parts[1]));
        assert!(d.parts[1].values().iter().all(|v| *v == d.parts[1][0]));
        assert_eq!(&d.parts[0] + &d.parts[1], f);
    }

    #[test]
    fn identity_on_z4_has_no_decomposition() {
        let s = Transformation::translation(4, 2);
        let t = Transformation::translation(4, 1);
        let f = RationalFunction::from_integers(&[0, 1, 2, 3]);
        let out = decompose_two(&s, &t, &f, 8).unwrap();
        let v = out.violation().unwrap();
        let system = CommutingSystem::from_images(vec![s.image().to_vec(), t.image().to_vec()]).unwrap();
        assert_eq!(v.replay(&system, &f), Ok(()));
        assert!(!oracle_decompose(&system, &f).is_feasible());
    }

    #[test]
    fn witness_choice_does_not_matter() {
        let s = Transformation::new(vec![1, 2, 0, 4, 5, 3]).unwrap();
        let t = Transformation::new(vec![3, 4, 5, 0, 1, 2]).unwrap();
        let f = RationalFunction::from_integers(&[1, 4, 2, 6, 9, 7]);
        let a = decompose_two_with(&s, &t, &f, 12, WitnessSearch::Grid).unwrap();
        let b = decompose_two_with(&s, &t, &f, 12, WitnessSearch::Minimal).unwrap();
        assert!(a.is_decomposed());
        assert_eq!(a, b);
    }

    #[test]
    fn three_zero() {
        let f = RationalFunction::zero(8);
        let out = decompose_three(&flip(0), &flip(1), &flip(2), &f, 16).unwrap();
        assert!(out.decomposition().unwrap().parts.iter().all(RationalFunction::is_zero));
    }

    #[test]
    fn three_cube_sum_of_parts() {
        let a = [3, -1, 4, 1];
        let b = [5, 9, -2, 6];
        let c = [5, 3, 5, 8];
        // Part j ignores bit j.
        let f = RationalFunction::from_fn(8, |x| {
            let (x0, x1, x2) = (x & 1, x >> 1 & 1, x >> 2 & 1);
            crate::rational::int(a[x1 + 2 * x2] + b[x0 + 2 * x2] + c[x0 + 2 * x1])
        });
        let (t, s, u) = (flip(0), flip(1), flip(2));
        let out = decompose_three(&t, &s, &u, &f, 16).unwrap();
        let system =
            CommutingSystem::from_images(vec![t.image().to_vec(), s.image().to_vec(), u.image().to_vec()]).unwrap();
        assert_eq!(verify_decomposition(&system, &f, out.decomposition().unwrap()), Ok(()));
    }

    #[test]
    fn three_cube_point_indicator_violates() {
        let f = RationalFunction::indicator(8, &[0]);
        let (t, s, u) = (flip(0), flip(1), flip(2));
        let out = decompose_three(&t, &s, &u, &f, 16).unwrap();
        let system =
            CommutingSystem::from_images(vec![t.image().to_vec(), s.image().to_vec(), u.image().to_vec()]).unwrap();
        assert_eq!(out.violation().unwrap().replay(&system, &f), Ok(()));
        assert!(!oracle_decompose(&system, &f).is_feasible());
    }
}
