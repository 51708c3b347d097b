//! Randomised search for systems of four or more transformations where
//! Condition (*) holds but no invariant decomposition exists.
//!
//! For each trial the linear space `V` of functions passing Condition (*) is
//! computed exactly as the common kernel of all conclusion functionals whose
//! premises hold. `V` always contains the decomposable space `D`; a trial is
//! interesting only when `V ≠ D`, and then a random element of `V` is run
//! through the oracle.

use std::collections::{BTreeMap, HashSet};

use fixedbitset::FixedBitSet;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::{ExplicitModel, Model};
use super::naive::naive_star_violation;
use super::{check_star, check_star_conventions, ordered_partitions, PremiseConvention};
use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::generate::{random_family, random_function, random_system, SystemFamily};
use crate::linalg;
use crate::oracle::{decomposable_dimension, oracle_decompose, DualCertificate, OracleOutcome};
use crate::orbits::default_bound;
use crate::rational::{int, Rational};
use crate::system::{CommutingSystem, Transformation};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub max_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub workers: usize,
    /// Exponent bound; `2N` per instance when absent.
    pub bound: Option<usize>,
}

impl SearchConfig {
    pub fn new(n: usize, max_size: usize, trials: usize, seed: u64) -> Self {
        SearchConfig {
            n,
            max_size,
            trials,
            seed,
            workers: 1,
            bound: None,
        }
    }
}

/// A doubly verified instance: Condition (*) holds (fast and literal
/// checkers agree) yet the oracle proves `f` is not decomposable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub trial: usize,
    pub family: SystemFamily,
    pub transforms: Vec<Transformation>,
    pub f: RationalFunction,
    pub bound: usize,
    pub dual: DualCertificate,
    pub star_pass: StarPassRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarPassRecord {
    pub bound: usize,
    pub convention: PremiseConvention,
    pub fast_checker: bool,
    pub literal_checker: bool,
}

impl Candidate {
    /// Re-runs both verdicts from scratch.
    pub fn verify(&self) -> Result<()> {
        let system = CommutingSystem::from_images(self.transforms.iter().map(|t| t.image().to_vec()).collect())?;
        system.domain().check_function(&self.f)?;
        self.dual
            .verify(&system, &self.f)
            .map_err(|d| Error::Precondition(format!("dual certificate rejected: {d:?}")))?;
        if let Some(v) = check_star(&system, &self.f, self.bound).into_violation() {
            return Err(Error::Precondition(format!("Condition (*) fails: {v:?}")));
        }
        if naive_star_violation(&system, &self.f, self.bound, self.star_pass.convention).is_some() {
            return Err(Error::Precondition("literal checker finds a violation".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub trial: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct SearchReport {
    pub n: usize,
    pub max_size: usize,
    pub trials: usize,
    pub seed: u64,
    pub tried: usize,
    /// Trials where the passing space equals the decomposable space.
    pub tight: usize,
    /// Trials where a function was sampled from a larger passing space.
    pub sampled: usize,
    pub convention_disagreements: usize,
    pub family_counts: BTreeMap<String, usize>,
    #[serde(with = "integer_keys")]
    pub size_counts: BTreeMap<usize, usize>,
    pub anomalies: Vec<Anomaly>,
    pub candidates: Vec<Candidate>,
}

impl SearchReport {
    /// Star-pass but oracle-infeasible instances.
    pub fn discrepancies(&self) -> usize {
        self.candidates.len()
    }
}

enum TrialOutcome {
    Tight,
    Sampled,
    Candidate(Box<Candidate>),
    Anomaly(String),
}

struct TrialResult {
    family: SystemFamily,
    size: usize,
    disagreement: bool,
    outcome: TrialOutcome,
}

/// Map keys travel as strings in JSON; parse them back explicitly so the
/// report also deserializes from buffered input (flattened or tagged).
mod integer_keys {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<usize, usize>, s: S) -> Result<S::Ok, S::Error> {
        map.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<usize, usize>, D::Error> {
        BTreeMap::<String, usize>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| k.parse().map(|k| (k, v)).map_err(serde::de::Error::custom))
            .collect()
    }
}

pub fn search_counterexample(config: &SearchConfig) -> Result<SearchReport> {
    if config.max_size == 0 {
        return Err(Error::Precondition("max_size must be positive".into()));
    }
    if config.n == 0 {
        return Err(Error::Precondition("at least one transformation is needed".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers.max(1))
        .build()
        .map_err(|e| Error::Precondition(format!("worker pool: {e}")))?;
    let results: Vec<TrialResult> = pool.install(|| {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(config, t))
            .collect()
    });
    let mut report = SearchReport {
        n: config.n,
        max_size: config.max_size,
        trials: config.trials,
        seed: config.seed,
        ..SearchReport::default()
    };
    for (trial, r) in results.into_iter().enumerate() {
        report.tried += 1;
        *report.family_counts.entry(r.family.name().to_string()).or_default() += 1;
        *report.size_counts.entry(r.size).or_default() += 1;
        report.convention_disagreements += usize::from(r.disagreement);
        match r.outcome {
            TrialOutcome::Tight => report.tight += 1,
            TrialOutcome::Sampled => report.sampled += 1,
            TrialOutcome::Candidate(c) => {
                report.sampled += 1;
                report.candidates.push(*c);
            }
            TrialOutcome::Anomaly(message) => report.anomalies.push(Anomaly { trial, message }),
        }
    }
    Ok(report)
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(config: &SearchConfig, trial: usize) -> TrialResult {
    let mut rng = trial_rng(config.seed, trial);
    let family = random_family(&mut rng);
    let system = random_system(&mut rng, config.n, config.max_size, family);
    let size = system.size();
    let bound = config.bound.unwrap_or_else(|| default_bound(size));
    let probe = random_function(&mut rng, size);
    let mut disagreement = !check_star_conventions(&system, &probe, bound).agree();
    let outcome = match passing_space(&system, bound) {
        PassingSpace::EqualsDecomposable => TrialOutcome::Tight,
        PassingSpace::Basis(basis) => {
            let f = sample(&mut rng, &basis, size);
            let conventions = check_star_conventions(&system, &f, bound);
            disagreement |= !conventions.agree();
            if !conventions.natural.is_pass() {
                TrialOutcome::Anomaly("sampled function from the passing space fails Condition (*)".into())
            } else {
                match oracle_decompose(&system, &f) {
                    OracleOutcome::Feasible(_) => TrialOutcome::Sampled,
                    OracleOutcome::Infeasible(dual) => {
                        let candidate = Candidate {
                            trial,
                            family,
                            transforms: system.transforms().to_vec(),
                            f,
                            bound,
                            dual,
                            star_pass: StarPassRecord {
                                bound,
                                convention: PremiseConvention::Natural,
                                fast_checker: true,
                                literal_checker: true,
                            },
                        };
                        match candidate.verify() {
                            Ok(()) => TrialOutcome::Candidate(Box::new(candidate)),
                            Err(e) => TrialOutcome::Anomaly(format!("candidate failed re-verification: {e}")),
                        }
                    }
                }
            }
        }
    };
    TrialResult {
        family,
        size,
        disagreement,
        outcome,
    }
}

fn sample(rng: &mut ChaCha8Rng, basis: &[Vec<Rational>], size: usize) -> RationalFunction {
    loop {
        let coeffs: Vec<i64> = basis.iter().map(|_| rng.gen_range(-3..=3)).collect();
        if coeffs.iter().all(|&c| c == 0) {
            continue;
        }
        return RationalFunction::from_fn(size, |x| {
            basis
                .iter()
                .zip(&coeffs)
                .fold(Rational::zero(), |acc, (b, &c)| acc + &b[x] * int(c))
        });
    }
}

/// The space of functions passing Condition (*).
pub enum PassingSpace {
    EqualsDecomposable,
    /// A basis of a space strictly larger than the decomposable one.
    Basis(Vec<Vec<Rational>>),
}

const PRIME: u64 = (1 << 61) - 1;

/// Incremental row echelon form over `GF(2^61 − 1)`.
struct ModRank {
    rows: Vec<(usize, Vec<u64>)>,
}

impl ModRank {
    fn mul(a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % PRIME as u128) as u64
    }

    fn inverse(a: u64) -> u64 {
        let (mut base, mut exp, mut acc) = (a, PRIME - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = Self::mul(acc, base);
            }
            base = Self::mul(base, base);
            exp >>= 1;
        }
        acc
    }

    fn insert(&mut self, row: &[i64]) -> bool {
        let mut v: Vec<u64> = row.iter().map(|&x| x.rem_euclid(PRIME as i64) as u64).collect();
        for (pivot, r) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                for (a, &b) in v.iter_mut().zip(r) {
                    *a = (*a + PRIME - Self::mul(c, b)) % PRIME;
                }
            }
        }
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = Self::inverse(v[pivot]);
        for a in &mut v {
            *a = Self::mul(*a, inv);
        }
        self.rows.push((pivot, v));
        true
    }
}

/// Integer conclusion functionals of every enumerated instance whose
/// premises hold; `visit` returns `false` to stop early.
fn for_each_conclusion(system: &CommutingSystem, bound: usize, mut visit: impl FnMut(&[i64]) -> bool) {
    let model = ExplicitModel::new(system, bound, PremiseConvention::Natural);
    let size = system.size();
    let identity: Vec<Vec<i64>> = (0..size)
        .map(|x| (0..size).map(|y| i64::from(x == y)).collect())
        .collect();
    let mut full = FixedBitSet::with_capacity(size);
    full.insert_range(..);

    struct Walk<'a, F: FnMut(&[i64]) -> bool> {
        model: &'a ExplicitModel<'a>,
        /// `premises[h][p][i]`.
        premises: Vec<Vec<Vec<FixedBitSet>>>,
        visit: F,
        stopped: bool,
    }

    impl<F: FnMut(&[i64]) -> bool> Walk<'_, F> {
        fn go(&mut self, blocks: &[Vec<usize>], hs: &[usize], depth: usize, m: &[Vec<i64>], mask: &FixedBitSet) {
            if self.stopped {
                return;
            }
            if depth == blocks.len() {
                for z in mask.ones() {
                    if !(self.visit)(&m[z]) {
                        self.stopped = true;
                        return;
                    }
                }
                return;
            }
            let h = hs[depth];
            for (p, power) in self.model.powers(h).iter().enumerate() {
                let mut next_mask = mask.clone();
                for &i in blocks[depth].iter().filter(|&&i| i != h) {
                    next_mask.intersect_with(&self.premises[h][p][i]);
                }
                if next_mask.is_clear() {
                    continue;
                }
                let next: Vec<Vec<i64>> = (0..m.len())
                    .map(|x| {
                        let y = power.image[x].expect("total map");
                        m[y].iter().zip(&m[x]).map(|(a, b)| a - b).collect()
                    })
                    .collect();
                self.go(blocks, hs, depth + 1, &next, &next_mask);
                if self.stopped {
                    return;
                }
            }
        }
    }

    let n = system.len();
    let premises = (0..n)
        .map(|h| {
            (0..model.powers(h).len())
                .map(|p| (0..n).map(|i| model.premise(h, p, i)).collect())
                .collect()
        })
        .collect();
    let mut walk = Walk {
        model: &model,
        premises,
        visit: &mut visit,
        stopped: false,
    };
    for blocks in ordered_partitions(system.len()) {
        let mut idx = vec![0usize; blocks.len()];
        loop {
            let hs: Vec<usize> = blocks.iter().zip(&idx).map(|(b, &i)| b[i]).collect();
            walk.go(&blocks, &hs, 0, &identity, &full);
            if walk.stopped {
                return;
            }
            let mut j = blocks.len();
            let mut advanced = false;
            while j > 0 {
                j -= 1;
                idx[j] += 1;
                if idx[j] < blocks[j].len() {
                    advanced = true;
                    break;
                }
                idx[j] = 0;
            }
            if !advanced {
                break;
            }
        }
    }
}

/// Computes the space of functions passing Condition (*) with the given
/// bound, stopping as soon as it is known to equal the decomposable space.
pub fn passing_space(system: &CommutingSystem, bound: usize) -> PassingSpace {
    let size = system.size();
    let target = size - decomposable_dimension(system);
    let mut modp = ModRank { rows: Vec::new() };
    let mut rows: HashSet<Vec<i64>> = HashSet::new();
    let mut rank = 0;
    if target == 0 {
        return PassingSpace::EqualsDecomposable;
    }
    for_each_conclusion(system, bound, |row| {
        if rows.insert(row.to_vec()) && modp.insert(row) {
            rank += 1;
        }
        rank < target
    });
    if rank >= target {
        return PassingSpace::EqualsDecomposable;
    }
    let exact: Vec<Vec<Rational>> = rows.into_iter().map(|r| r.into_iter().map(int).collect()).collect();
    if linalg::rank(&exact, size) >= target {
        return PassingSpace::EqualsDecomposable;
    }
    PassingSpace::Basis(linalg::nullspace(&exact, size))
}
