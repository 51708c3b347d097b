//! Random commuting systems and functions for tests and the counterexample
//! miner. Pure random map pairs rarely commute, so every family is built to
//! commute by construction (and is still validated).

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::function::RationalFunction;
use crate::orbits::invariance_classes;
use crate::rational::{int, ratio, Rational};
use crate::system::{CommutingSystem, Decomposition, Transformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemFamily {
    /// Translations of a product of cyclic groups.
    Translations,
    /// Powers of a single random map.
    Powers,
    /// Maps acting independently on the factors of a product set.
    Products,
    /// Each map drawn from the common centraliser of the previous ones.
    Centralizer,
}

impl SystemFamily {
    pub const ALL: [SystemFamily; 4] = [
        SystemFamily::Translations,
        SystemFamily::Powers,
        SystemFamily::Products,
        SystemFamily::Centralizer,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemFamily::Translations => "translations",
            SystemFamily::Powers => "powers",
            SystemFamily::Products => "products",
            SystemFamily::Centralizer => "centralizer",
        }
    }
}

pub fn random_map<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Transformation {
    Transformation::new((0..size).map(|_| rng.gen_range(0..size)).collect()).expect("in range")
}

/// A random system of `n` maps on at most `max_size` points.
pub fn random_system<R: Rng + ?Sized>(rng: &mut R, n: usize, max_size: usize, family: SystemFamily) -> CommutingSystem {
    assert!(max_size >= 1);
    let maps = match family {
        SystemFamily::Translations => translations(rng, n, max_size),
        SystemFamily::Powers => {
            let size = rng.gen_range(1..=max_size);
            let m = random_map(rng, size);
            (0..n).map(|_| m.power(rng.gen_range(0..=size))).collect()
        }
        SystemFamily::Products => products(rng, n, max_size),
        SystemFamily::Centralizer => {
            let size = rng.gen_range(1..=max_size);
            centralizer_chain(rng, n, size)
        }
    };
    CommutingSystem::from_images(maps.into_iter().map(|t| t.image().to_vec()).collect())
        .expect("commuting by construction")
}

pub fn random_family<R: Rng + ?Sized>(rng: &mut R) -> SystemFamily {
    *SystemFamily::ALL.choose(rng).expect("nonempty")
}

fn translations<R: Rng + ?Sized>(rng: &mut R, n: usize, max_size: usize) -> Vec<Transformation> {
    // Mixed-radix factors m_1 ⋯ m_r ≤ max_size.
    let mut factors = Vec::new();
    let mut size = 1;
    while factors.is_empty() || (size * 2 <= max_size && rng.gen_bool(0.5)) {
        let m = rng.gen_range(1..=max_size / size);
        factors.push(m);
        size *= m;
    }
    let decode = |mut x: usize| {
        factors
            .iter()
            .map(|&m| {
                let d = x % m;
                x /= m;
                d
            })
            .collect::<Vec<_>>()
    };
    let encode = |digits: &[usize]| digits.iter().zip(&factors).rev().fold(0, |acc, (&d, &m)| acc * m + d);
    (0..n)
        .map(|_| {
            let shift: Vec<usize> = factors.iter().map(|&m| rng.gen_range(0..m)).collect();
            let image = (0..size)
                .map(|x| {
                    let digits: Vec<usize> = decode(x)
                        .iter()
                        .zip(&shift)
                        .zip(&factors)
                        .map(|((d, s), m)| (d + s) % m)
                        .collect();
                    encode(&digits)
                })
                .collect();
            Transformation::new(image).expect("in range")
        })
        .collect()
}

fn products<R: Rng + ?Sized>(rng: &mut R, n: usize, max_size: usize) -> Vec<Transformation> {
    let a = rng.gen_range(1..=max_size);
    let b = rng.gen_range(1..=(max_size / a).max(1));
    let (m1, m2) = (random_map(rng, a), random_map(rng, b));
    (0..n)
        .map(|_| {
            let (p, q) = (m1.power(rng.gen_range(0..=a)), m2.power(rng.gen_range(0..=b)));
            Transformation::new((0..a * b).map(|x| p.apply(x / b) * b + q.apply(x % b)).collect()).expect("in range")
        })
        .collect()
}

/// A random map commuting with every map in `with`, found by backtracking
/// with propagation along `C(M x) = M(C(x))`. Falls back to the identity
/// after `budget` assignments.
pub fn random_commuting_map<R: Rng + ?Sized>(
    rng: &mut R,
    size: usize,
    with: &[Transformation],
    budget: usize,
) -> Transformation {
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(rng);
    let choices: Vec<Vec<usize>> = (0..size)
        .map(|_| {
            let mut c: Vec<usize> = (0..size).collect();
            c.shuffle(rng);
            c
        })
        .collect();
    let mut assignment = vec![usize::MAX; size];
    let mut steps = 0;
    if extend(0, &order, &choices, with, &mut assignment, &mut steps, budget) {
        Transformation::new(assignment).expect("in range")
    } else {
        Transformation::identity(size)
    }
}

fn assign(x: usize, y: usize, with: &[Transformation], assignment: &mut [usize], trail: &mut Vec<usize>) -> bool {
    let mut queue = vec![(x, y)];
    while let Some((x, y)) = queue.pop() {
        if assignment[x] != usize::MAX {
            if assignment[x] != y {
                return false;
            }
            continue;
        }
        assignment[x] = y;
        trail.push(x);
        for m in with {
            queue.push((m.apply(x), m.apply(y)));
        }
    }
    true
}

fn extend(
    at: usize,
    order: &[usize],
    choices: &[Vec<usize>],
    with: &[Transformation],
    assignment: &mut [usize],
    steps: &mut usize,
    budget: usize,
) -> bool {
    let Some(pos) = (at..order.len()).find(|&i| assignment[order[i]] == usize::MAX) else {
        return true;
    };
    let x = order[pos];
    for &y in &choices[x] {
        *steps += 1;
        if *steps > budget {
            return false;
        }
        let mut trail = Vec::new();
        if assign(x, y, with, assignment, &mut trail)
            && extend(pos + 1, order, choices, with, assignment, steps, budget)
        {
            return true;
        }
        for z in trail {
            assignment[z] = usize::MAX;
        }
    }
    false
}

fn centralizer_chain<R: Rng + ?Sized>(rng: &mut R, n: usize, size: usize) -> Vec<Transformation> {
    let mut maps = Vec::with_capacity(n);
    for _ in 0..n {
        let next = if maps.is_empty() {
            random_map(rng, size)
        } else {
            random_commuting_map(rng, size, &maps, 20 * size * size)
        };
        maps.push(next);
    }
    maps
}

/// Small rationals: mostly integers in `[-4, 4]`, occasionally halves and
/// thirds.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let numer = rng.gen_range(-4..=4);
    match rng.gen_range(0..6) {
        0 => ratio(numer, 2),
        1 => ratio(numer, 3),
        _ => int(numer),
    }
}

pub fn random_function<R: Rng + ?Sized>(rng: &mut R, size: usize) -> RationalFunction {
    RationalFunction::from_fn(size, |_| random_rational(rng))
}

/// A random function constant on the invariance classes of `t`.
pub fn random_invariant<R: Rng + ?Sized>(rng: &mut R, t: &Transformation) -> RationalFunction {
    let classes = invariance_classes(t);
    let values: Vec<Rational> = (0..classes.num_classes()).map(|_| random_rational(rng)).collect();
    RationalFunction::from_fn(t.len(), |x| values[classes.class_of(x)].clone())
}

/// `f = Σ_j f_j` with random `T_j`-invariant parts `f_j`.
pub fn random_decomposable<R: Rng + ?Sized>(
    rng: &mut R,
    system: &CommutingSystem,
) -> (RationalFunction, Decomposition) {
    let parts: Vec<RationalFunction> = system.transforms().iter().map(|t| random_invariant(rng, t)).collect();
    let f = parts
        .iter()
        .fold(RationalFunction::zero(system.size()), |acc, p| &acc + p);
    (f, Decomposition::new(parts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::system::verify_decomposition;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_family_commutes_and_respects_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for family in SystemFamily::ALL {
            for n in 1..=4 {
                for _ in 0..50 {
                    let s = random_system(&mut rng, n, 8, family);
                    assert_eq!(s.len(), n);
                    assert!(s.size() <= 8);
                }
            }
        }
    }

    #[test]
    fn centraliser_maps_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let m = random_map(&mut rng, 7);
            let c = random_commuting_map(&mut rng, 7, std::slice::from_ref(&m), 1000);
            assert_eq!(m.commutation_witness(&c), None);
        }
    }

    #[test]
    fn decomposable_functions_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let family = random_family(&mut rng);
            let s = random_system(&mut rng, 3, 8, family);
            let (f, d) = random_decomposable(&mut rng, &s);
            assert_eq!(verify_decomposition(&s, &f, &d), Ok(()));
        }
    }
}
