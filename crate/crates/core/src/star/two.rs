//! The two-transformation conditions: the mixed difference `Δ_S Δ_T f = 0`
//! together with compatibility on either side,
//! `f(T^k x) = f(T^{k'} x)` whenever `T^k S^n x = T^{k'} S^{n'} x`, or the
//! mirror statement with the roles of `S` and `T` exchanged.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{StarInstance, StarVerdict, StarViolation};
use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::orbits::power_grid;
use crate::system::Transformation;

/// Outcomes of the three checks making up [`check_two_symmetric`]. Indices
/// refer to the system `(S, T)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoSidedCheck {
    pub mixed: Option<StarViolation>,
    pub t_side: Option<StarViolation>,
    pub s_side: Option<StarViolation>,
}

impl TwoSidedCheck {
    /// Decomposable iff the mixed check passes together with either side.
    pub fn t_verdict(&self) -> StarVerdict {
        self.mixed.clone().or_else(|| self.t_side.clone()).into()
    }

    pub fn s_verdict(&self) -> StarVerdict {
        self.mixed.clone().or_else(|| self.s_side.clone()).into()
    }
}

/// First `x` with `Δ_S Δ_T f (x) ≠ 0`, as a singleton-block instance.
pub(crate) fn mixed_violation(s: &Transformation, t: &Transformation, f: &RationalFunction) -> Option<StarViolation> {
    (0..f.len()).find_map(|z| {
        let value = &f[s.apply(t.apply(z))] - &f[s.apply(z)] - &f[t.apply(z)] + &f[z];
        (!num_traits::Zero::is_zero(&value)).then(|| {
            StarViolation::new(
                StarInstance {
                    blocks: vec![vec![0], vec![1]],
                    distinguished: vec![0, 1],
                    k: vec![1, 1],
                    l: vec![0, 0],
                    l2: vec![0, 0],
                    z,
                },
                value,
            )
        })
    })
}

/// Compatibility along `T` (`t_side`) or along `S`. Grid points
/// `T^k S^n x` are visited with the compared exponent outermost; the first
/// revisit of a point whose compared power disagrees in `f` is reported.
pub(crate) fn compatibility_violation(
    s: &Transformation,
    t: &Transformation,
    f: &RationalFunction,
    bound: usize,
    t_side: bool,
) -> Option<StarViolation> {
    for x in 0..f.len() {
        let grid = power_grid(s, t, x, bound);
        // (compared, other) exponent pairs.
        let at = |a: usize, b: usize| if t_side { grid[a][b] } else { grid[b][a] };
        let compared = |a: usize| if t_side { grid[a][0] } else { grid[0][a] };
        let mut first: HashMap<usize, (usize, usize)> = HashMap::new();
        for a in 0..=bound {
            for b in 0..=bound {
                let p = at(a, b);
                let (a0, b0) = *first.entry(p).or_insert((a, b));
                if f[compared(a)] != f[compared(a0)] {
                    let (cmp, other) = if t_side { (1, 0) } else { (0, 1) };
                    let mut l = vec![0, 0];
                    let mut l2 = vec![0, 0];
                    l[other] = b;
                    l2[other] = b0;
                    let z = compared(a0);
                    let instance = StarInstance {
                        blocks: vec![vec![0, 1]],
                        distinguished: vec![cmp],
                        k: vec![a - a0],
                        l,
                        l2,
                        z,
                    };
                    return Some(StarViolation::new(instance, &f[compared(a)] - &f[z]));
                }
            }
        }
    }
    None
}

pub fn two_sided_check(
    s: &Transformation,
    t: &Transformation,
    f: &RationalFunction,
    bound: usize,
) -> Result<TwoSidedCheck> {
    if s.len() != t.len() || s.len() != f.len() {
        return Err(Error::FunctionLength {
            len: f.len(),
            size: s.len(),
        });
    }
    if let Some(x) = s.commutation_witness(t) {
        return Err(Error::NotCommuting { i: 0, j: 1, x });
    }
    Ok(TwoSidedCheck {
        mixed: mixed_violation(s, t, f),
        t_side: compatibility_violation(s, t, f, bound, true),
        s_side: compatibility_violation(s, t, f, bound, false),
    })
}

/// Passes iff `Δ_S Δ_T f = 0` and both compatibility conditions hold.
pub fn check_two_symmetric(
    s: &Transformation,
    t: &Transformation,
    f: &RationalFunction,
    bound: usize,
) -> Result<StarVerdict> {
    let check = two_sided_check(s, t, f, bound)?;
    Ok(check.mixed.or(check.t_side).or(check.s_side).into())
}
