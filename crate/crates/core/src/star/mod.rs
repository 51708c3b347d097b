//! Condition (*): for every partition of the transformation indices into
//! blocks, every choice of a distinguished index `h_j` per block, exponents
//! `k_j ≥ 1` and point `z`, if each non-distinguished `i` in block `j`
//! satisfies `T_{h_j}^{k_j} T_i^{l_i} z = T_i^{l_i'} z` for some `l_i, l_i'`,
//! then `Δ_{T_{h_1}^{k_1}} ⋯ Δ_{T_{h_N}^{k_N}} f (z) = 0`.
//!
//! Enumeration order is fixed: partitions with more blocks first, then
//! lexicographic by block list; then distinguished tuples, then exponent
//! vectors, lexicographically; `z` ascending innermost. Exponents that give
//! the same map as a smaller exponent are skipped, which never changes the
//! first violation.

pub mod abelian;
mod engine;
pub mod naive;
pub mod search;
pub mod two;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::orbits::default_bound;
use crate::rational::{self, Rational};
use crate::system::{CommutingSystem, Transformation};

pub use abelian::{check_star_abelian, Modulus};
pub use search::{search_counterexample, Candidate, SearchConfig, SearchReport};
pub use two::{check_two_symmetric, two_sided_check, TwoSidedCheck};

/// Lower end of the premise exponents `l_i, l_i'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PremiseConvention {
    /// `l_i, l_i' ≥ 0`.
    #[default]
    Natural,
    /// `l_i, l_i' ≥ 1`.
    Positive,
}

impl PremiseConvention {
    pub fn min_exponent(self) -> usize {
        match self {
            PremiseConvention::Natural => 0,
            PremiseConvention::Positive => 1,
        }
    }
}

/// One instance of the premises and conclusion of Condition (*).
///
/// Indices are 0-based here and 1-based on the wire. `l` and `l2` are indexed
/// by transformation; their entries at distinguished indices are unused and
/// left at zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "wire::Instance", try_from = "wire::Instance")]
pub struct StarInstance {
    pub blocks: Vec<Vec<usize>>,
    pub distinguished: Vec<usize>,
    pub k: Vec<usize>,
    pub l: Vec<usize>,
    pub l2: Vec<usize>,
    pub z: usize,
}

impl StarInstance {
    pub fn arity(&self) -> usize {
        self.l.len()
    }

    pub fn is_all_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// Checks that the blocks partition `0..n`, that each distinguished index
    /// lies in its block and that every `k_j` is positive.
    pub fn check_shape(&self, n: usize) -> Result<()> {
        let bad = |msg: &str| Err(Error::Precondition(format!("malformed instance: {msg}")));
        if self.l.len() != n || self.l2.len() != n {
            return bad("premise exponent arrays must have one entry per transformation");
        }
        if self.blocks.len() != self.distinguished.len() || self.blocks.len() != self.k.len() {
            return bad("blocks, distinguished and k differ in length");
        }
        let mut seen = vec![false; n];
        for (block, &h) in self.blocks.iter().zip(&self.distinguished) {
            if block.is_empty() {
                return bad("empty block");
            }
            for &i in block {
                if i >= n || seen[i] {
                    return bad("blocks are not disjoint subsets of the indices");
                }
                seen[i] = true;
            }
            if !block.contains(&h) {
                return bad("distinguished index outside its block");
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("blocks do not cover every index");
        }
        if self.k.contains(&0) {
            return bad("exponents k must be positive");
        }
        Ok(())
    }

    /// `(h, k, i)` for every premise, block by block.
    pub fn premises(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.blocks
            .iter()
            .zip(&self.distinguished)
            .zip(&self.k)
            .flat_map(|((block, &h), &k)| block.iter().filter(move |&&i| i != h).map(move |&i| (h, k, i)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// All blocks are singletons: a plain mixed difference is nonzero.
    MixedDeltaNonzero,
    /// Some block has premises: a compatibility requirement fails.
    CompatibilityFailure,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StarViolation {
    pub instance: StarInstance,
    #[serde(with = "rational::as_string")]
    pub value: Rational,
    pub kind: ViolationKind,
}

impl StarViolation {
    pub(crate) fn new(instance: StarInstance, value: Rational) -> Self {
        let kind = if instance.is_all_singletons() {
            ViolationKind::MixedDeltaNonzero
        } else {
            ViolationKind::CompatibilityFailure
        };
        StarViolation { instance, value, kind }
    }

    /// Re-evaluates premises by iterating the maps and the conclusion by
    /// inclusion–exclusion, independently of the search that produced it.
    pub fn replay(&self, system: &CommutingSystem, f: &RationalFunction) -> Result<()> {
        let inst = &self.instance;
        inst.check_shape(system.len())?;
        system.domain().check_element(inst.z)?;
        system.domain().check_function(f)?;
        for (h, k, i) in inst.premises() {
            let (th, ti) = (system.transform(h), system.transform(i));
            if th.apply_pow(ti.apply_pow(inst.z, inst.l[i]), k) != ti.apply_pow(inst.z, inst.l2[i]) {
                return Err(Error::Precondition(format!("premise for index {} fails", i + 1)));
            }
        }
        let maps: Vec<(&Transformation, usize)> = inst
            .distinguished
            .iter()
            .zip(&inst.k)
            .map(|(&h, &k)| (system.transform(h), k))
            .collect();
        let value = inclusion_exclusion(inst.z, &maps, |x| Some(f[x].clone())).expect("finite domain");
        self.check_value(value)
    }

    pub(crate) fn check_value(&self, value: Rational) -> Result<()> {
        if value.is_zero() {
            return Err(Error::Precondition("conclusion holds at z; not a violation".into()));
        }
        if value != self.value {
            return Err(Error::Precondition(format!(
                "recomputed value {} differs from recorded {}",
                rational::format(&value),
                rational::format(&self.value)
            )));
        }
        let expected = if self.instance.is_all_singletons() {
            ViolationKind::MixedDeltaNonzero
        } else {
            ViolationKind::CompatibilityFailure
        };
        if self.kind != expected {
            return Err(Error::Precondition("violation kind does not match the blocks".into()));
        }
        Ok(())
    }
}

/// Anything a map of the form `T^k` can be: a table or a partial shift.
pub(crate) trait PowerMap {
    fn image_of(&self, x: usize) -> Option<usize>;
}

impl PowerMap for (&Transformation, usize) {
    fn image_of(&self, x: usize) -> Option<usize> {
        Some(self.0.apply_pow(x, self.1))
    }
}

/// `Σ_{S ⊆ blocks} (−1)^{N−|S|} f(Π_{j∈S} T_{h_j}^{k_j} z)`; `None` if some
/// point leaves the domain.
pub(crate) fn inclusion_exclusion<M: PowerMap>(
    z: usize,
    maps: &[M],
    value: impl Fn(usize) -> Option<Rational>,
) -> Option<Rational> {
    let count = maps.len();
    let mut total = Rational::zero();
    for subset in 0u64..(1u64 << count) {
        let mut x = z;
        for (j, m) in maps.iter().enumerate() {
            if subset >> j & 1 == 1 {
                x = m.image_of(x)?;
            }
        }
        let v = value(x)?;
        if (count - subset.count_ones() as usize).is_multiple_of(2) {
            total += v;
        } else {
            total -= v;
        }
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum StarVerdict {
    Pass,
    Violation(StarViolation),
}

impl StarVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, StarVerdict::Pass)
    }

    pub fn violation(&self) -> Option<&StarViolation> {
        match self {
            StarVerdict::Pass => None,
            StarVerdict::Violation(v) => Some(v),
        }
    }

    pub fn into_violation(self) -> Option<StarViolation> {
        match self {
            StarVerdict::Pass => None,
            StarVerdict::Violation(v) => Some(v),
        }
    }
}

impl From<Option<StarViolation>> for StarVerdict {
    fn from(v: Option<StarViolation>) -> Self {
        v.map_or(StarVerdict::Pass, StarVerdict::Violation)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarOptions {
    pub bound: usize,
    pub convention: PremiseConvention,
    /// Restrict the search to the all-singleton partition.
    pub singletons_only: bool,
}

impl StarOptions {
    pub fn new(bound: usize) -> Self {
        StarOptions {
            bound,
            convention: PremiseConvention::Natural,
            singletons_only: false,
        }
    }
}

/// Condition (*) with exponents `k, l, l' ≤ bound` and `l, l' ≥ 0`.
pub fn check_star(system: &CommutingSystem, f: &RationalFunction, bound: usize) -> StarVerdict {
    check_star_with(system, f, StarOptions::new(bound))
}

pub fn check_star_default(system: &CommutingSystem, f: &RationalFunction) -> StarVerdict {
    check_star(system, f, default_bound(system.size()))
}

pub fn check_star_with(system: &CommutingSystem, f: &RationalFunction, options: StarOptions) -> StarVerdict {
    assert_eq!(system.size(), f.len(), "function and system on different domains");
    let model = engine::ExplicitModel::new(system, options.bound, options.convention);
    let hit = engine::search(&model, f, options.singletons_only);
    hit.map(|hit| {
        let (l, l2) = model.witness_exponents(&hit);
        StarViolation::new(
            StarInstance {
                blocks: hit.blocks,
                distinguished: hit.distinguished,
                k: hit.k,
                l,
                l2,
                z: hit.z,
            },
            hit.value,
        )
    })
    .into()
}

/// The all-singleton part of Condition (*): every mixed difference
/// `Δ_{T_1^{k_1}} ⋯ Δ_{T_n^{k_n}} f` with `1 ≤ k_j ≤ bound` vanishes.
pub fn check_mixed_differences(system: &CommutingSystem, f: &RationalFunction, bound: usize) -> StarVerdict {
    check_star_with(
        system,
        f,
        StarOptions {
            singletons_only: true,
            ..StarOptions::new(bound)
        },
    )
}

/// Verdicts under both premise conventions. With `bound ≥ N` they always
/// agree, since every point `T^l z` with `l ≥ 0` also equals some `T^{l'} z`
/// with `1 ≤ l' ≤ N` after one more step; disagreements are reported rather
/// than assumed away.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConventionReport {
    pub natural: StarVerdict,
    pub positive: StarVerdict,
}

impl ConventionReport {
    pub fn agree(&self) -> bool {
        self.natural.is_pass() == self.positive.is_pass()
    }
}

pub fn check_star_conventions(system: &CommutingSystem, f: &RationalFunction, bound: usize) -> ConventionReport {
    let run = |convention| {
        check_star_with(
            system,
            f,
            StarOptions {
                convention,
                ..StarOptions::new(bound)
            },
        )
    };
    ConventionReport {
        natural: run(PremiseConvention::Natural),
        positive: run(PremiseConvention::Positive),
    }
}

/// Set partitions of `0..n`, each as sorted blocks ordered by smallest
/// element, in enumeration order.
pub fn ordered_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn grow(i: usize, max: usize, labels: &mut [usize], out: &mut Vec<Vec<Vec<usize>>>) {
        if i == labels.len() {
            let count = labels.iter().max().map_or(0, |m| m + 1);
            let mut blocks = vec![Vec::new(); count];
            for (x, &b) in labels.iter().enumerate() {
                blocks[b].push(x);
            }
            out.push(blocks);
            return;
        }
        for b in 0..=max {
            labels[i] = b;
            grow(i + 1, max.max(b + 1), labels, out);
        }
    }
    if n > 0 {
        labels[0] = 0;
        grow(1, 1, &mut labels, &mut out);
    }
    out.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    out
}

/// Converts a scaled integer back to a rational.
pub(crate) fn unscale(value: BigInt, denom: &BigInt) -> Rational {
    Rational::new(value, denom.clone())
}

mod wire {
    use serde::{Deserialize, Serialize};

    /// [`super::StarInstance`] with 1-based transformation indices.
    #[derive(Serialize, Deserialize)]
    pub struct Instance {
        blocks: Vec<Vec<usize>>,
        distinguished: Vec<usize>,
        k: Vec<usize>,
        l: Vec<usize>,
        l2: Vec<usize>,
        z: usize,
    }

    impl From<super::StarInstance> for Instance {
        fn from(s: super::StarInstance) -> Self {
            Instance {
                blocks: s
                    .blocks
                    .into_iter()
                    .map(|b| b.into_iter().map(|i| i + 1).collect())
                    .collect(),
                distinguished: s.distinguished.into_iter().map(|h| h + 1).collect(),
                k: s.k,
                l: s.l,
                l2: s.l2,
                z: s.z,
            }
        }
    }

    impl TryFrom<Instance> for super::StarInstance {
        type Error = String;

        fn try_from(w: Instance) -> Result<Self, String> {
            let shift = |i: usize| {
                i.checked_sub(1)
                    .ok_or_else(|| "transformation indices start at 1".to_string())
            };
            Ok(super::StarInstance {
                blocks: w
                    .blocks
                    .into_iter()
                    .map(|b| b.into_iter().map(shift).collect::<Result<_, _>>())
                    .collect::<Result<_, _>>()?,
                distinguished: w.distinguished.into_iter().map(shift).collect::<Result<_, _>>()?,
                k: w.k,
                l: w.l,
                l2: w.l2,
                z: w.z,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn system(images: Vec<Vec<usize>>) -> CommutingSystem {
        CommutingSystem::from_images(images).unwrap()
    }

    #[test]
    fn partition_order() {
        let p = ordered_partitions(3);
        assert_eq!(p.len(), 5);
        assert_eq!(p[0], vec![vec![0], vec![1], vec![2]]);
        assert_eq!(p[1], vec![vec![0], vec![1, 2]]);
        assert_eq!(p[2], vec![vec![0, 1], vec![2]]);
        assert_eq!(p[3], vec![vec![0, 2], vec![1]]);
        assert_eq!(p[4], vec![vec![0, 1, 2]]);
        assert_eq!(ordered_partitions(4).len(), 15);
    }

    #[test]
    fn zero_passes() {
        let s = system(vec![vec![1, 0, 2], vec![0, 1, 2]]);
        assert!(check_star(&s, &RationalFunction::zero(3), 6).is_pass());
    }

    #[test]
    fn swap_swap_violates_with_singletons() {
        let s = system(vec![vec![1, 0], vec![1, 0]]);
        let f = RationalFunction::from_integers(&[0, 1]);
        let v = check_star(&s, &f, 4).into_violation().unwrap();
        assert_eq!(v.instance.blocks, vec![vec![0], vec![1]]);
        assert_eq!(v.instance.k, vec![1, 1]);
        assert_eq!(v.instance.z, 0);
        assert_eq!(v.value, int(-2));
        assert_eq!(v.kind, ViolationKind::MixedDeltaNonzero);
        assert_eq!(v.replay(&s, &f), Ok(()));
    }

    #[test]
    fn swap_swap_block_with_even_power_holds() {
        // Block {1,2}, h = 1, k = 2: T²S⁰z = S⁰z holds and Δ_{T²} f = 0.
        let s = system(vec![vec![1, 0], vec![1, 0]]);
        let f = RationalFunction::from_integers(&[0, 1]);
        let inst = StarInstance {
            blocks: vec![vec![0, 1]],
            distinguished: vec![0],
            k: vec![2],
            l: vec![0, 0],
            l2: vec![0, 0],
            z: 0,
        };
        let v = StarViolation::new(inst, int(1));
        assert!(v.replay(&s, &f).is_err());
    }

    #[test]
    fn sum_of_invariant_parts_passes() {
        let s = system(vec![vec![1, 0, 3, 2], vec![2, 3, 0, 1]]);
        let f = RationalFunction::from_integers(&[5, 5, 7, 7]);
        let g = RationalFunction::from_integers(&[1, 2, 1, 2]);
        assert!(check_star_default(&s, &(&f + &g)).is_pass());
    }

    #[test]
    fn violations_replay_exhaustively_on_three_points() {
        let maps: Vec<Vec<usize>> = (0..27).map(|c| vec![c % 3, c / 3 % 3, c / 9]).collect();
        for a in &maps {
            for b in &maps {
                let Ok(s) = CommutingSystem::from_images(vec![a.clone(), b.clone()]) else {
                    continue;
                };
                for bits in 0..8i64 {
                    let f = RationalFunction::from_integers(&[bits & 1, bits >> 1 & 1, bits >> 2 & 1]);
                    if let Some(v) = check_star(&s, &f, 6).into_violation() {
                        assert_eq!(v.replay(&s, &f), Ok(()));
                    }
                }
            }
        }
    }

    #[test]
    fn wire_indices_are_one_based() {
        let inst = StarInstance {
            blocks: vec![vec![0, 1]],
            distinguished: vec![0],
            k: vec![1],
            l: vec![0, 0],
            l2: vec![0, 1],
            z: 0,
        };
        let text = serde_json::to_string(&inst).unwrap();
        assert!(text.contains(r#""blocks":[[1,2]]"#), "{text}");
        let back: StarInstance = serde_json::from_str(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn conventions_agree_on_small_example() {
        let s = system(vec![vec![1, 2, 0], vec![2, 0, 1]]);
        let f = RationalFunction::from_integers(&[3, 1, 4]);
        assert!(check_star_conventions(&s, &f, 6).agree());
    }
}
