//! The enumeration behind Condition (*) checks, shared by the explicit and
//! the arithmetic (translation) models.

use std::cell::RefCell;
use std::collections::HashMap;
use std::ops::Sub;

use fixedbitset::FixedBitSet;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{ordered_partitions, unscale, PremiseConvention};
use crate::function::RationalFunction;
use crate::rational::Rational;
use crate::system::CommutingSystem;

/// A map `T_h^k`, partial when the domain is a window.
pub(crate) struct Power {
    pub k: usize,
    pub image: Vec<Option<usize>>,
}

pub(crate) trait Model {
    fn size(&self) -> usize;
    fn arity(&self) -> usize;
    /// Candidate exponents for `T_h`, one per distinct map, ascending in `k`.
    fn powers(&self, h: usize) -> &[Power];
    /// Points `z` at which the premise for `(T_h^{k}, T_i)` holds.
    fn premise(&self, h: usize, power: usize, i: usize) -> FixedBitSet;
}

pub(crate) struct Hit {
    pub blocks: Vec<Vec<usize>>,
    pub distinguished: Vec<usize>,
    pub powers: Vec<usize>,
    pub k: Vec<usize>,
    pub z: usize,
    pub value: Rational,
}

/// Keeps the first exponent for every distinct map among `T^1, …, T^bound`.
pub(crate) fn distinct_powers(bound: usize, mut image: impl FnMut(usize) -> Vec<Option<usize>>) -> Vec<Power> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for k in 1..=bound {
        let img = image(k);
        if seen.insert(img.clone()) {
            out.push(Power { k, image: img });
        }
    }
    out
}

trait Scalar: Clone + Zero + Into<BigInt>
where
    for<'a> &'a Self: Sub<&'a Self, Output = Self>,
{
}

impl Scalar for i128 {}
impl Scalar for BigInt {}

struct Engine<'m, M: Model> {
    model: &'m M,
    cache: RefCell<HashMap<(usize, usize, usize), FixedBitSet>>,
    full: FixedBitSet,
}

impl<'m, M: Model> Engine<'m, M> {
    fn block_mask(&self, block: &[usize], h: usize, p: usize) -> FixedBitSet {
        let mut mask = self.full.clone();
        for &i in block.iter().filter(|&&i| i != h) {
            let mut cache = self.cache.borrow_mut();
            let premise = cache.entry((h, p, i)).or_insert_with(|| self.model.premise(h, p, i));
            mask.intersect_with(premise);
        }
        mask
    }

    fn run<S: Scalar>(&self, values: Vec<Option<S>>, denom: &BigInt, singletons_only: bool) -> Option<Hit>
    where
        for<'a> &'a S: Sub<&'a S, Output = S>,
    {
        let n = self.model.arity();
        for blocks in ordered_partitions(n) {
            if singletons_only && blocks.len() != n {
                continue;
            }
            let mut tuple = vec![0usize; blocks.len()];
            loop {
                let distinguished: Vec<usize> = blocks.iter().zip(&tuple).map(|(b, &t)| b[t]).collect();
                let mut chosen = Vec::with_capacity(blocks.len());
                if let Some((z, v)) = self.dfs(&blocks, &distinguished, 0, &values, &self.full, &mut chosen) {
                    let k = distinguished
                        .iter()
                        .zip(&chosen)
                        .map(|(&h, &p)| self.model.powers(h)[p].k)
                        .collect();
                    return Some(Hit {
                        blocks,
                        distinguished,
                        powers: chosen,
                        k,
                        z,
                        value: unscale(v.into(), denom),
                    });
                }
                if !advance(&mut tuple, &blocks) {
                    break;
                }
            }
        }
        None
    }

    fn dfs<S: Scalar>(
        &self,
        blocks: &[Vec<usize>],
        distinguished: &[usize],
        depth: usize,
        phi: &[Option<S>],
        mask: &FixedBitSet,
        chosen: &mut Vec<usize>,
    ) -> Option<(usize, S)>
    where
        for<'a> &'a S: Sub<&'a S, Output = S>,
    {
        if depth == blocks.len() {
            return mask.ones().find_map(|z| match &phi[z] {
                Some(v) if !v.is_zero() => Some((z, v.clone())),
                _ => None,
            });
        }
        let h = distinguished[depth];
        for (p, power) in self.model.powers(h).iter().enumerate() {
            let mut next_mask = self.block_mask(&blocks[depth], h, p);
            next_mask.intersect_with(mask);
            if next_mask.is_clear() {
                continue;
            }
            let next: Vec<Option<S>> = (0..phi.len())
                .map(|x| match (power.image[x].and_then(|y| phi[y].as_ref()), &phi[x]) {
                    (Some(a), Some(b)) => Some(a - b),
                    _ => None,
                })
                .collect();
            if next.iter().all(|v| v.as_ref().is_none_or(Zero::is_zero)) {
                continue;
            }
            chosen.push(p);
            if let Some(found) = self.dfs(blocks, distinguished, depth + 1, &next, &next_mask, chosen) {
                return Some(found);
            }
            chosen.pop();
        }
        None
    }
}

/// Odometer over distinguished tuples, last block fastest.
fn advance(tuple: &mut [usize], blocks: &[Vec<usize>]) -> bool {
    for j in (0..tuple.len()).rev() {
        tuple[j] += 1;
        if tuple[j] < blocks[j].len() {
            return true;
        }
        tuple[j] = 0;
    }
    false
}

/// First violation in enumeration order, if any.
pub(crate) fn search<M: Model>(model: &M, f: &RationalFunction, singletons_only: bool) -> Option<Hit> {
    assert_eq!(model.size(), f.len());
    let mut full = FixedBitSet::with_capacity(model.size());
    full.insert_range(..);
    let engine = Engine {
        model,
        cache: RefCell::new(HashMap::new()),
        full,
    };
    let (denom, numers) = f.scaled_integers();
    // Each difference at most doubles magnitudes; stay well inside i128.
    let depth = model.arity() as u64;
    let max_bits = numers.iter().map(|v| v.abs().bits()).max().unwrap_or(0);
    if max_bits + depth < 120 {
        let values = numers.iter().map(|v| Some(i128::try_from(v).expect("fits"))).collect();
        engine.run::<i128>(values, &denom, singletons_only)
    } else {
        engine.run::<BigInt>(numers.into_iter().map(Some).collect(), &denom, singletons_only)
    }
}

/// The explicit model: a validated system, exponents up to `bound`.
pub(crate) struct ExplicitModel<'s> {
    system: &'s CommutingSystem,
    convention: PremiseConvention,
    powers: Vec<Vec<Power>>,
    /// `orbit[i][z]`: points `T_i^{l} z` with `l` in the premise range.
    orbit: Vec<Vec<Vec<usize>>>,
}

impl<'s> ExplicitModel<'s> {
    pub fn new(system: &'s CommutingSystem, bound: usize, convention: PremiseConvention) -> Self {
        let size = system.size();
        let powers = system
            .transforms()
            .iter()
            .map(|t| {
                let mut current = t.clone();
                distinct_powers(bound, |k| {
                    if k > 1 {
                        current = t.compose(&current);
                    }
                    current.image().iter().map(|&y| Some(y)).collect()
                })
            })
            .collect();
        let lmin = convention.min_exponent();
        let orbit = system
            .transforms()
            .iter()
            .map(|t| {
                (0..size)
                    .map(|z| (lmin..=bound.max(lmin)).map(|l| t.apply_pow(z, l)).collect())
                    .collect()
            })
            .collect();
        ExplicitModel {
            system,
            convention,
            powers,
            orbit,
        }
    }

    /// Smallest `(l, l')` by `(l + l', l)` for every premise of the hit.
    pub fn witness_exponents(&self, hit: &Hit) -> (Vec<usize>, Vec<usize>) {
        let n = self.system.len();
        let (mut l, mut l2) = (vec![0; n], vec![0; n]);
        let lmin = self.convention.min_exponent();
        for ((block, &h), &p) in hit.blocks.iter().zip(&hit.distinguished).zip(&hit.powers) {
            let image = &self.powers[h][p].image;
            for &i in block.iter().filter(|&&i| i != h) {
                let orbit = &self.orbit[i][hit.z];
                let span = orbit.len() - 1;
                let pair = (0..=2 * span)
                    .flat_map(|total| (total.saturating_sub(span)..=total.min(span)).map(move |a| (a, total - a)))
                    .find(|&(a, b)| image[orbit[a]] == Some(orbit[b]))
                    .expect("premise holds at the violating point");
                l[i] = pair.0 + lmin;
                l2[i] = pair.1 + lmin;
            }
        }
        (l, l2)
    }
}

impl Model for ExplicitModel<'_> {
    fn size(&self) -> usize {
        self.system.size()
    }

    fn arity(&self) -> usize {
        self.system.len()
    }

    fn powers(&self, h: usize) -> &[Power] {
        &self.powers[h]
    }

    fn premise(&self, h: usize, p: usize, i: usize) -> FixedBitSet {
        let size = self.size();
        let image = &self.powers[h][p].image;
        let mut out = FixedBitSet::with_capacity(size);
        let mut targets = FixedBitSet::with_capacity(size);
        for z in 0..size {
            let orbit = &self.orbit[i][z];
            targets.clear();
            for &y in orbit {
                targets.insert(y);
            }
            if orbit.iter().any(|&y| image[y].is_some_and(|w| targets.contains(w))) {
                out.insert(z);
            }
        }
        out
    }
}
