//! A deliberately literal Condition (*) checker used to re-verify results of
//! the optimised search. It enumerates every exponent without deduplication
//! and decides each premise by trying all exponent pairs.

use num_traits::Zero;

use super::{PremiseConvention, StarInstance, StarViolation};
use crate::function::RationalFunction;
use crate::rational::Rational;
use crate::system::CommutingSystem;

fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for mut p in set_partitions(n - 1) {
        for b in 0..p.len() {
            let mut q = p.clone();
            q[b].push(n - 1);
            out.push(q);
        }
        p.push(vec![n - 1]);
        out.push(p);
    }
    out
}

/// Some violation of Condition (*) with all exponents in range, if any.
pub fn naive_star_violation(
    system: &CommutingSystem,
    f: &RationalFunction,
    bound: usize,
    convention: PremiseConvention,
) -> Option<StarViolation> {
    let n = system.len();
    let size = system.size();
    // pow[j][k][x] = T_j^k x by repeated application.
    let pow: Vec<Vec<Vec<usize>>> = system
        .transforms()
        .iter()
        .map(|t| {
            let mut rows = vec![(0..size).collect::<Vec<_>>()];
            for k in 1..=bound {
                let prev = &rows[k - 1];
                rows.push(prev.iter().map(|&x| t.apply(x)).collect());
            }
            rows
        })
        .collect();
    let lmin = convention.min_exponent();
    let premise = |h: usize, k: usize, i: usize, z: usize| -> Option<(usize, usize)> {
        for l in lmin..=bound.max(lmin) {
            for l2 in lmin..=bound.max(lmin) {
                if pow[h][k][pow[i][l][z]] == pow[i][l2][z] {
                    return Some((l, l2));
                }
            }
        }
        None
    };
    for blocks in set_partitions(n) {
        let count = blocks.len();
        let mut hs = vec![0usize; count];
        loop {
            let distinguished: Vec<usize> = blocks.iter().zip(&hs).map(|(b, &i)| b[i]).collect();
            let mut ks = vec![1usize; count];
            loop {
                for z in 0..size {
                    let mut l = vec![0; n];
                    let mut l2 = vec![0; n];
                    let holds = blocks.iter().zip(&distinguished).zip(&ks).all(|((block, &h), &k)| {
                        block.iter().filter(|&&i| i != h).all(|&i| match premise(h, k, i, z) {
                            Some((a, b)) => {
                                l[i] = a;
                                l2[i] = b;
                                true
                            }
                            None => false,
                        })
                    });
                    if !holds {
                        continue;
                    }
                    let mut value = Rational::zero();
                    for subset in 0u32..(1 << count) {
                        let mut x = z;
                        for j in 0..count {
                            if subset >> j & 1 == 1 {
                                x = pow[distinguished[j]][ks[j]][x];
                            }
                        }
                        if (count as u32 - subset.count_ones()).is_multiple_of(2) {
                            value += &f[x];
                        } else {
                            value -= &f[x];
                        }
                    }
                    if !value.is_zero() {
                        let instance = StarInstance {
                            blocks: blocks
                                .iter()
                                .map(|b| {
                                    let mut b = b.clone();
                                    b.sort_unstable();
                                    b
                                })
                                .collect(),
                            distinguished: distinguished.clone(),
                            k: ks.clone(),
                            l,
                            l2,
                            z,
                        };
                        return Some(StarViolation::new(instance, value));
                    }
                }
                if !step(&mut ks, |_| bound, 1) {
                    break;
                }
            }
            if !step(&mut hs, |j| blocks[j].len() - 1, 0) {
                break;
            }
        }
    }
    None
}

fn step(digits: &mut [usize], max: impl Fn(usize) -> usize, min: usize) -> bool {
    for j in (0..digits.len()).rev() {
        if digits[j] < max(j) {
            digits[j] += 1;
            return true;
        }
        digits[j] = min;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::star::check_star;

    #[test]
    fn partitions_are_counted_by_bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn agrees_with_fast_checker_on_small_systems() {
        let maps: Vec<Vec<usize>> = (0..27).map(|c| vec![c % 3, c / 3 % 3, c / 9]).collect();
        for a in maps.iter().step_by(2) {
            for b in maps.iter().step_by(3) {
                let Ok(s) = CommutingSystem::from_images(vec![a.clone(), b.clone()]) else {
                    continue;
                };
                for bits in 0..8i64 {
                    let f = RationalFunction::from_integers(&[bits & 1, bits >> 1 & 1, -(bits >> 2 & 1)]);
                    let naive = naive_star_violation(&s, &f, 6, PremiseConvention::Natural);
                    assert_eq!(naive.is_none(), check_star(&s, &f, 6).is_pass());
                    if let Some(v) = naive {
                        assert_eq!(v.replay(&s, &f), Ok(()));
                    }
                }
            }
        }
    }
}
