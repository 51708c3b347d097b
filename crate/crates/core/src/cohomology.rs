//! Transfer equations `Δ_T h = g` and their variants with an invariant
//! correction term, with an auxiliary invariance constraint, and with a
//! sup-norm bound.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::orbits::{invariance_classes, joint_partition, Partition};
use crate::rational::{self, Rational};
use crate::system::{delta, is_invariant, Transformation};

/// A cycle of `T` along which `g` does not sum to zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleViolation {
    /// Cycle points in `T`-order, starting from the smallest.
    pub cycle: Vec<usize>,
    #[serde(with = "rational::as_string")]
    pub sum: Rational,
}

/// `Δ_T solution = G + correction`, with `correction` `T`-invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferSolution {
    pub solution: RationalFunction,
    pub correction: RationalFunction,
}

/// Witness that `Σ_{i<k} G(T^i x) ≠ 0` although `T^k S^l x = S^{l2} x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstrainedViolation {
    pub x: usize,
    pub k: usize,
    pub l: usize,
    pub l2: usize,
    #[serde(with = "rational::as_string")]
    pub sum: Rational,
}

impl ConstrainedViolation {
    /// Re-checks the relation and recomputes the sum.
    pub fn replays(&self, t: &Transformation, s: &Transformation, g: &RationalFunction) -> bool {
        let lhs = t.apply_pow(s.apply_pow(self.x, self.l), self.k);
        let rhs = s.apply_pow(self.x, self.l2);
        let sum = (0..self.k).fold(Rational::zero(), |acc, i| acc + &g[t.apply_pow(self.x, i)]);
        self.k > 0 && lhs == rhs && sum == self.sum && !sum.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedTransfer {
    pub solution: RationalFunction,
    /// Largest absolute partial sum `|Σ_{i<m} G(T^i x)|` over all `x` and `m`.
    #[serde(with = "rational::as_string")]
    pub bound_c: Rational,
}

/// The cycle reached from `start`, rotated to begin at its smallest point.
pub fn cycle_from(t: &Transformation, start: usize) -> Vec<usize> {
    let mut seen = vec![false; t.len()];
    let mut x = start;
    while !seen[x] {
        seen[x] = true;
        x = t.apply(x);
    }
    let mut cycle = vec![x];
    let mut y = t.apply(x);
    while y != x {
        cycle.push(y);
        y = t.apply(y);
    }
    let min_at = (0..cycle.len()).min_by_key(|&i| cycle[i]).unwrap_or(0);
    cycle.rotate_left(min_at);
    cycle
}

fn sum_over(points: &[usize], g: &RationalFunction) -> Rational {
    points.iter().fold(Rational::zero(), |acc, &x| acc + &g[x])
}

/// The defining formula for a single point: given `T^m x = T^n x0`,
/// `h(x) = Σ_{i<n} g(T^i x0) − Σ_{j<m} g(T^j x)`.
pub fn transfer_by_witness(
    t: &Transformation,
    g: &RationalFunction,
    x: usize,
    x0: usize,
    m: usize,
    n: usize,
) -> Rational {
    debug_assert_eq!(t.apply_pow(x, m), t.apply_pow(x0, n));
    let forward = (0..n).fold(Rational::zero(), |acc, i| acc + &g[t.apply_pow(x0, i)]);
    let back = (0..m).fold(Rational::zero(), |acc, j| acc + &g[t.apply_pow(x, j)]);
    forward - back
}

/// Solves `Δ_T h = g`, normalised by `h = 0` at class representatives.
///
/// The result agrees with [`transfer_by_witness`] for every valid witness.
/// Fails with the first (by class) cycle whose `g`-sum is nonzero.
pub fn solve_transfer(
    t: &Transformation,
    g: &RationalFunction,
) -> std::result::Result<RationalFunction, CycleViolation> {
    assert_eq!(t.len(), g.len(), "transformation and function on different domains");
    let size = t.len();
    let classes = invariance_classes(t);
    let mut value: Vec<Option<Rational>> = vec![None; size];
    for class in 0..classes.num_classes() {
        let x0 = classes.representative(class);
        let mut x = x0;
        let mut acc = Rational::zero();
        while value[x].is_none() {
            value[x] = Some(acc.clone());
            acc += &g[x];
            x = t.apply(x);
        }
        // The walk from x0 closed the unique cycle of this class at x.
        let cycle = cycle_from(t, x);
        let sum = sum_over(&cycle, g);
        if !sum.is_zero() {
            return Err(CycleViolation { cycle, sum });
        }
    }
    // Remaining points: h(x) = h(Tx) − g(x), resolved along forward orbits.
    let mut stack = Vec::new();
    for start in 0..size {
        let mut x = start;
        while value[x].is_none() {
            stack.push(x);
            x = t.apply(x);
        }
        while let Some(y) = stack.pop() {
            let v = value[t.apply(y)].as_ref().expect("forward value resolved") - &g[y];
            value[y] = Some(v);
        }
    }
    Ok(RationalFunction::new(value.into_iter().map(Option::unwrap).collect()))
}

/// `−(cycle average of G)` per class: the only `T`-invariant correction that
/// makes `Δ_T g = G + γ` solvable.
fn forced_correction(t: &Transformation, big_g: &RationalFunction) -> RationalFunction {
    let classes = invariance_classes(t);
    let per_class: Vec<Rational> = (0..classes.num_classes())
        .map(|c| {
            let cycle = cycle_from(t, classes.representative(c));
            -(sum_over(&cycle, big_g) / Rational::from_integer(cycle.len().into()))
        })
        .collect();
    RationalFunction::from_fn(t.len(), |x| per_class[classes.class_of(x)].clone())
}

/// Finds `(g, γ)` with `Δ_T g = G + γ` and `γ` `T`-invariant. On a finite
/// domain every class carries a cycle, so `γ` is always the forced value.
pub fn solve_transfer_mod_invariant(t: &Transformation, big_g: &RationalFunction) -> TransferSolution {
    let correction = forced_correction(t, big_g);
    let solution = solve_transfer(t, &(big_g + &correction)).expect("corrected cycle sums vanish");
    TransferSolution { solution, correction }
}

fn require_invariant(s: &Transformation, big_g: &RationalFunction) -> Result<()> {
    if s.len() != big_g.len() {
        return Err(Error::FunctionLength {
            len: big_g.len(),
            size: s.len(),
        });
    }
    if let Some(x) = (0..s.len()).find(|&x| big_g[s.apply(x)] != big_g[x]) {
        return Err(Error::Precondition(format!("G is not S-invariant at x = {x}")));
    }
    Ok(())
}

fn require_commuting(t: &Transformation, s: &Transformation) -> Result<()> {
    if t.len() != s.len() {
        return Err(Error::TransformLength {
            transform: 1,
            len: s.len(),
            size: t.len(),
        });
    }
    match t.commutation_witness(s) {
        Some(x) => Err(Error::NotCommuting { i: 0, j: 1, x }),
        None => Ok(()),
    }
}

/// `T` acting on the classes of `S`, with the class partition.
fn quotient_by(t: &Transformation, s: &Transformation) -> (Partition, Transformation) {
    let classes = invariance_classes(s);
    let q = classes.quotient(t).expect("commuting maps preserve invariance classes");
    (classes, q)
}

/// `(g, γ)` with `Δ_T g = G + γ`, `g` and `γ` `S`-invariant and `γ`
/// `T`-invariant; solved on the quotient by the classes of `S`.
pub fn solve_transfer_pair(
    t: &Transformation,
    s: &Transformation,
    big_g: &RationalFunction,
) -> Result<TransferSolution> {
    require_commuting(t, s)?;
    require_invariant(s, big_g)?;
    let (classes, q) = quotient_by(t, s);
    let reduced = solve_transfer_mod_invariant(&q, &classes.restrict(big_g));
    Ok(TransferSolution {
        solution: classes.lift(&reduced.solution),
        correction: classes.lift(&reduced.correction),
    })
}

/// Smallest `(l, l2)`, ordered by `(l + l2, l)`, with `S^l y = S^{l2} x`.
fn s_relation(s: &Transformation, y: usize, x: usize) -> (usize, usize) {
    let size = s.len();
    let ys: Vec<usize> = std::iter::successors(Some(y), |&p| Some(s.apply(p)))
        .take(2 * size + 1)
        .collect();
    let xs: Vec<usize> = std::iter::successors(Some(x), |&p| Some(s.apply(p)))
        .take(2 * size + 1)
        .collect();
    for total in 0..=4 * size {
        for l in total.saturating_sub(2 * size)..=total.min(2 * size) {
            if ys[l] == xs[total - l] {
                return (l, total - l);
            }
        }
    }
    unreachable!("points of one invariance class share a forward orbit")
}

/// Solves `Δ_T g = G` with `g` `S`-invariant. Fails with a relation
/// `T^k S^l x = S^{l2} x` along which `G` does not sum to zero.
pub fn solve_transfer_constrained(
    t: &Transformation,
    s: &Transformation,
    big_g: &RationalFunction,
) -> Result<std::result::Result<RationalFunction, ConstrainedViolation>> {
    require_commuting(t, s)?;
    require_invariant(s, big_g)?;
    let (classes, q) = quotient_by(t, s);
    Ok(match solve_transfer(&q, &classes.restrict(big_g)) {
        Ok(reduced) => Ok(classes.lift(&reduced)),
        Err(violation) => {
            let x = classes.representative(violation.cycle[0]);
            let k = violation.cycle.len();
            let (l, l2) = s_relation(s, t.apply_pow(x, k), x);
            Err(ConstrainedViolation {
                x,
                k,
                l,
                l2,
                sum: violation.sum,
            })
        }
    })
}

/// `max |Σ_{i<m} G(T^i x)|` over all `x` and `m ≤ horizon`.
pub fn partial_sum_bound(t: &Transformation, big_g: &RationalFunction, horizon: usize) -> Rational {
    let mut best = Rational::zero();
    for x in 0..t.len() {
        let mut y = x;
        let mut acc = Rational::zero();
        for _ in 0..horizon {
            acc += &big_g[y];
            y = t.apply(y);
            if acc.abs() > best {
                best = acc.abs();
            }
        }
    }
    best
}

/// Solves `Δ_T H = G`, `Δ_S H = 0` with `‖H‖∞ ≤ C`, where `C` is the largest
/// absolute partial sum of `G` along `T`-orbits (horizon `2N`).
///
/// Within a joint class any two values of `H` differ by a difference of two
/// partial sums, so recentering each class at its midrange keeps every value
/// within `C`.
pub fn solve_bounded_transfer(
    t: &Transformation,
    s: &Transformation,
    big_g: &RationalFunction,
) -> Result<std::result::Result<BoundedTransfer, ConstrainedViolation>> {
    let mut h = match solve_transfer_constrained(t, s, big_g)? {
        Ok(h) => h,
        Err(v) => return Ok(Err(v)),
    };
    let bound_c = partial_sum_bound(t, big_g, 2 * t.len());
    let joint = joint_partition(t.len(), [t, s].into_iter());
    for members in joint.classes() {
        let max = members.iter().map(|&x| &h[x]).max().expect("nonempty class").clone();
        let min = members.iter().map(|&x| &h[x]).min().expect("nonempty class").clone();
        let shift = (max + min) / Rational::from_integer(2.into());
        for &x in &members {
            let v = &h[x] - &shift;
            h.set(x, v);
        }
    }
    debug_assert!(delta(t, &h) == *big_g && is_invariant(s, &h));
    Ok(Ok(BoundedTransfer { solution: h, bound_c }))
}
