//! Domains, transformations, difference operators and validated systems of
//! pairwise-commuting transformations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RationalFunction;

/// The finite set `{0, …, size-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    size: usize,
}

impl Domain {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn check_element(&self, x: usize) -> Result<()> {
        if x < self.size {
            Ok(())
        } else {
            Err(Error::Element { x, size: self.size })
        }
    }

    pub fn check_function(&self, f: &RationalFunction) -> Result<()> {
        if f.len() == self.size {
            Ok(())
        } else {
            Err(Error::FunctionLength {
                len: f.len(),
                size: self.size,
            })
        }
    }
}

/// A self-map of `0..len`, stored as its image table. Neither injectivity nor
/// surjectivity is assumed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Transformation {
    image: Vec<usize>,
}

impl TryFrom<Vec<usize>> for Transformation {
    type Error = Error;

    fn try_from(image: Vec<usize>) -> Result<Self> {
        Transformation::new(image)
    }
}

impl From<Transformation> for Vec<usize> {
    fn from(t: Transformation) -> Vec<usize> {
        t.image
    }
}

impl Transformation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let size = image.len();
        if let Some((x, &value)) = image.iter().enumerate().find(|(_, &v)| v >= size) {
            return Err(Error::Range {
                transform: 0,
                x,
                value,
                size,
            });
        }
        Ok(Transformation { image })
    }

    pub fn identity(size: usize) -> Self {
        Transformation {
            image: (0..size).collect(),
        }
    }

    /// `x ↦ x + shift (mod size)`.
    pub fn translation(size: usize, shift: usize) -> Self {
        Transformation {
            image: (0..size).map(|x| (x + shift) % size).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.image[x]
    }

    pub fn apply_pow(&self, mut x: usize, k: usize) -> usize {
        for _ in 0..k {
            x = self.image[x];
        }
        x
    }

    /// `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &Transformation) -> Transformation {
        Transformation {
            image: other.image.iter().map(|&y| self.image[y]).collect(),
        }
    }

    pub fn power(&self, k: usize) -> Transformation {
        let mut acc = Transformation::identity(self.len());
        for _ in 0..k {
            acc = self.compose(&acc);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(x, &y)| x == y)
    }

    /// First `x` with `self(other(x)) != other(self(x))`.
    pub fn commutation_witness(&self, other: &Transformation) -> Option<usize> {
        (0..self.len()).find(|&x| self.apply(other.apply(x)) != other.apply(self.apply(x)))
    }

    /// The shift operator: `f ↦ f ∘ T`.
    pub fn pull_back(&self, f: &RationalFunction) -> RationalFunction {
        RationalFunction::from_fn(self.len(), |x| f[self.apply(x)].clone())
    }
}

/// A domain together with transformations that commute pairwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommutingSystem {
    domain: Domain,
    transforms: Vec<Transformation>,
}

/// Checks lengths, ranges and pairwise commutativity. The first failing pair
/// `(i, j)`, `i < j`, and the smallest `x` are reported.
pub fn validate_system(transforms: Vec<Transformation>, domain: Domain) -> Result<CommutingSystem> {
    let size = domain.size();
    for (index, t) in transforms.iter().enumerate() {
        if t.len() != size {
            return Err(Error::TransformLength {
                transform: index,
                len: t.len(),
                size,
            });
        }
    }
    for i in 0..transforms.len() {
        for j in i + 1..transforms.len() {
            if let Some(x) = transforms[i].commutation_witness(&transforms[j]) {
                return Err(Error::NotCommuting { i, j, x });
            }
        }
    }
    Ok(CommutingSystem { domain, transforms })
}

impl CommutingSystem {
    /// Builds a system from raw image tables, reporting range errors with the
    /// offending transformation index.
    pub fn from_images(images: Vec<Vec<usize>>) -> Result<Self> {
        let size = images.first().map_or(0, Vec::len);
        let domain = Domain::new(size)?;
        let mut transforms = Vec::with_capacity(images.len());
        for (index, image) in images.into_iter().enumerate() {
            if image.len() != size {
                return Err(Error::TransformLength {
                    transform: index,
                    len: image.len(),
                    size,
                });
            }
            let t = Transformation::new(image).map_err(|e| match e {
                Error::Range { x, value, size, .. } => Error::Range {
                    transform: index,
                    x,
                    value,
                    size,
                },
                other => other,
            })?;
            transforms.push(t);
        }
        validate_system(transforms, domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn size(&self) -> usize {
        self.domain.size()
    }

    pub fn len(&self) -> usize {
        self.transforms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transforms.is_empty()
    }

    pub fn transforms(&self) -> &[Transformation] {
        &self.transforms
    }

    pub fn transform(&self, j: usize) -> &Transformation {
        &self.transforms[j]
    }

    /// `T_1^{k_1} ⋯ T_n^{k_n} x`.
    pub fn apply_word(&self, exponents: &[usize], x: usize) -> Result<usize> {
        apply_word(self, exponents, x)
    }

    pub fn mixed_delta(&self, powers: &[usize], f: &RationalFunction) -> Result<RationalFunction> {
        mixed_delta(self, powers, f)
    }
}

pub fn apply_word(system: &CommutingSystem, exponents: &[usize], x: usize) -> Result<usize> {
    if exponents.len() != system.len() {
        return Err(Error::Arity {
            expected: system.len(),
            got: exponents.len(),
        });
    }
    system.domain.check_element(x)?;
    Ok(exponents
        .iter()
        .zip(&system.transforms)
        .fold(x, |y, (&k, t)| t.apply_pow(y, k)))
}

/// `(Δ_T f)(x) = f(Tx) - f(x)`.
pub fn delta(t: &Transformation, f: &RationalFunction) -> RationalFunction {
    assert_eq!(t.len(), f.len(), "transformation and function on different domains");
    RationalFunction::from_fn(f.len(), |x| &f[t.apply(x)] - &f[x])
}

/// `Δ_{T^k} f`.
pub fn delta_pow(t: &Transformation, k: usize, f: &RationalFunction) -> RationalFunction {
    assert_eq!(t.len(), f.len(), "transformation and function on different domains");
    RationalFunction::from_fn(f.len(), |x| &f[t.apply_pow(x, k)] - &f[x])
}

/// `Δ_{T_1^{k_1}} ⋯ Δ_{T_n^{k_n}} f`; a zero power skips its factor.
pub fn mixed_delta(system: &CommutingSystem, powers: &[usize], f: &RationalFunction) -> Result<RationalFunction> {
    if powers.len() != system.len() {
        return Err(Error::Arity {
            expected: system.len(),
            got: powers.len(),
        });
    }
    system.domain.check_function(f)?;
    Ok(powers
        .iter()
        .zip(&system.transforms)
        .filter(|(&k, _)| k > 0)
        .fold(f.clone(), |acc, (&k, t)| delta_pow(t, k, &acc)))
}

pub fn is_invariant(t: &Transformation, f: &RationalFunction) -> bool {
    (0..f.len()).all(|x| f[t.apply(x)] == f[x])
}

/// Parts `f_1, …, f_n` where part `j` is invariant under `T_j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    pub parts: Vec<RationalFunction>,
}

impl Decomposition {
    pub fn new(parts: Vec<RationalFunction>) -> Self {
        Decomposition { parts }
    }
}

/// Why a candidate decomposition was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionDefect {
    PartCount { expected: usize, got: usize },
    PartLength { part: usize },
    SumMismatch { x: usize },
    NotInvariant { part: usize, x: usize },
}

pub fn verify_decomposition(
    system: &CommutingSystem,
    f: &RationalFunction,
    decomposition: &Decomposition,
) -> std::result::Result<(), DecompositionDefect> {
    let parts = &decomposition.parts;
    if parts.len() != system.len() {
        return Err(DecompositionDefect::PartCount {
            expected: system.len(),
            got: parts.len(),
        });
    }
    let size = system.size();
    if f.len() != size {
        return Err(DecompositionDefect::SumMismatch { x: f.len().min(size) });
    }
    if let Some(part) = parts.iter().position(|p| p.len() != size) {
        return Err(DecompositionDefect::PartLength { part });
    }
    for x in 0..size {
        let total = parts
            .iter()
            .fold(num_traits::Zero::zero(), |acc: crate::Rational, p| acc + &p[x]);
        if total != f[x] {
            return Err(DecompositionDefect::SumMismatch { x });
        }
    }
    for (part, (p, t)) in parts.iter().zip(system.transforms()).enumerate() {
        if let Some(x) = (0..size).find(|&x| p[t.apply(x)] != p[x]) {
            return Err(DecompositionDefect::NotInvariant { part, x });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn sys(images: Vec<Vec<usize>>) -> CommutingSystem {
        CommutingSystem::from_images(images).unwrap()
    }

    #[test]
    fn identity_system_is_valid() {
        let domain = Domain::new(3).unwrap();
        assert!(validate_system(vec![Transformation::identity(3)], domain).is_ok());
    }

    #[test]
    fn translations_commute() {
        let domain = Domain::new(4).unwrap();
        let ts = vec![Transformation::translation(4, 1), Transformation::translation(4, 2)];
        assert!(validate_system(ts, domain).is_ok());
    }

    #[test]
    fn swap_and_cycle_do_not_commute_at_zero() {
        let err = CommutingSystem::from_images(vec![vec![1, 0, 2], vec![1, 2, 0]]).unwrap_err();
        assert_eq!(err, Error::NotCommuting { i: 0, j: 1, x: 0 });
    }

    #[test]
    fn range_and_length_errors() {
        let err = CommutingSystem::from_images(vec![vec![0, 1], vec![0, 2]]).unwrap_err();
        assert_eq!(
            err,
            Error::Range {
                transform: 1,
                x: 1,
                value: 2,
                size: 2
            }
        );
        let err = CommutingSystem::from_images(vec![vec![0, 1], vec![0]]).unwrap_err();
        assert!(matches!(err, Error::TransformLength { transform: 1, .. }));
        assert_eq!(CommutingSystem::from_images(vec![]).unwrap_err(), Error::EmptyDomain);
    }

    #[test]
    fn apply_word_examples() {
        let s = sys(vec![vec![1, 2, 3, 0]]);
        assert_eq!(s.apply_word(&[0], 2).unwrap(), 2);
        assert_eq!(s.apply_word(&[3], 2).unwrap(), 1);
        let s = sys(vec![vec![1, 2, 3, 0], vec![2, 3, 0, 1]]);
        assert_eq!(s.apply_word(&[1, 1], 0).unwrap(), 3);
        let t = s.transform(0);
        let u = s.transform(1);
        assert_eq!(t.apply(u.apply(0)), 3);
        assert!(s.apply_word(&[1], 0).is_err());
        assert!(s.apply_word(&[1, 1], 4).is_err());
    }

    #[test]
    fn delta_examples() {
        let t = Transformation::translation(3, 1);
        assert!(delta(&t, &RationalFunction::constant(3, int(5))).is_zero());
        let f = RationalFunction::from_integers(&[0, 1, 2]);
        assert_eq!(delta(&t, &f), RationalFunction::from_integers(&[1, 1, -2]));
    }

    #[test]
    fn deltas_commute_for_commuting_maps() {
        let t = Transformation::translation(6, 1);
        let s = Transformation::translation(6, 3);
        let f = RationalFunction::from_integers(&[3, -1, 4, 1, -5, 9]);
        assert_eq!(delta(&t, &delta(&s, &f)), delta(&s, &delta(&t, &f)));
    }

    #[test]
    fn mixed_delta_annihilates_sum_of_invariants() {
        let s = sys(vec![vec![2, 3, 0, 1], vec![1, 0, 3, 2]]);
        let g = RationalFunction::from_integers(&[1, 7, 1, 7]);
        let h = RationalFunction::from_integers(&[4, 4, -2, -2]);
        let f = &g + &h;
        assert_eq!(s.mixed_delta(&[0, 0], &f).unwrap(), f);
        assert!(s.mixed_delta(&[1, 1], &f).unwrap().is_zero());
    }

    #[test]
    fn invariance_examples() {
        let t = Transformation::new(vec![1, 1, 3, 3]).unwrap();
        assert!(is_invariant(&t, &RationalFunction::constant(4, int(2))));
        assert!(is_invariant(&t, &RationalFunction::indicator(4, &[0, 1])));
        let swap = Transformation::new(vec![1, 0]).unwrap();
        assert!(!is_invariant(&swap, &RationalFunction::from_integers(&[0, 1])));
    }

    #[test]
    fn verify_decomposition_examples() {
        let s = sys(vec![vec![2, 3, 0, 1], vec![1, 2, 3, 0]]);
        let zero = RationalFunction::zero(4);
        let d = Decomposition::new(vec![zero.clone(), zero.clone()]);
        assert_eq!(verify_decomposition(&s, &zero, &d), Ok(()));

        let f = RationalFunction::from_integers(&[5, 2, 5, 2]);
        let d = Decomposition::new(vec![f.clone(), zero.clone()]);
        assert_eq!(verify_decomposition(&s, &f, &d), Ok(()));

        // move one unit of value between the parts at a single point
        let bump = RationalFunction::indicator(4, &[0]);
        let d = Decomposition::new(vec![&f + &bump, -&bump]);
        assert_eq!(
            verify_decomposition(&s, &f, &d),
            Err(DecompositionDefect::NotInvariant { part: 0, x: 0 })
        );
        let d = Decomposition::new(vec![f.clone(), bump]);
        assert_eq!(
            verify_decomposition(&s, &f, &d),
            Err(DecompositionDefect::SumMismatch { x: 0 })
        );
    }
}
