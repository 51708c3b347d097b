use std::ops::{Add, Index, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::rational::{self, Literal, Rational};

/// An exact rational-valued function on a domain `0..N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    values: Vec<Rational>,
}

impl RationalFunction {
    pub fn new(values: Vec<Rational>) -> Self {
        RationalFunction { values }
    }

    pub fn zero(size: usize) -> Self {
        Self::constant(size, Rational::zero())
    }

    pub fn constant(size: usize, value: Rational) -> Self {
        RationalFunction {
            values: vec![value; size],
        }
    }

    pub fn from_integers(values: &[i64]) -> Self {
        RationalFunction {
            values: values.iter().map(|&v| rational::int(v)).collect(),
        }
    }

    /// The 0/1 indicator of `members`.
    pub fn indicator(size: usize, members: &[usize]) -> Self {
        let mut f = Self::zero(size);
        for &x in members {
            f.values[x] = Rational::one();
        }
        f
    }

    pub fn from_fn(size: usize, mut value: impl FnMut(usize) -> Rational) -> Self {
        RationalFunction {
            values: (0..size).map(&mut value).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn set(&mut self, x: usize, value: Rational) {
        self.values[x] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<usize> {
        self.values.iter().position(|v| !v.is_zero())
    }

    /// `max |f(x)|`, zero on the empty domain.
    pub fn sup_norm(&self) -> Rational {
        self.values.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
    }

    pub fn scaled(&self, factor: &Rational) -> Self {
        RationalFunction {
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// `Σ_x self(x)·other(x)`.
    pub fn pairing(&self, other: &RationalFunction) -> Rational {
        assert_eq!(self.len(), other.len(), "pairing of functions on different domains");
        self.values
            .iter()
            .zip(&other.values)
            .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
    }

    /// Common denominator `D` and integer numerators `D·f(x)`.
    pub fn scaled_integers(&self) -> (BigInt, Vec<BigInt>) {
        let denom = self.values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let numers = self.values.iter().map(|v| v.numer() * (&denom / v.denom())).collect();
        (denom, numers)
    }
}

impl Index<usize> for RationalFunction {
    type Output = Rational;

    fn index(&self, x: usize) -> &Rational {
        &self.values[x]
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;

    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        assert_eq!(self.len(), rhs.len(), "sum of functions on different domains");
        RationalFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;

    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        assert_eq!(self.len(), rhs.len(), "difference of functions on different domains");
        RationalFunction {
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;

    fn neg(self) -> RationalFunction {
        RationalFunction {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.values.iter().map(rational::format))
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let literals = Vec::<Literal>::deserialize(d)?;
        let values = literals
            .into_iter()
            .map(Literal::into_rational)
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        Ok(RationalFunction { values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn scaled_integers_use_lcm() {
        let f = RationalFunction::new(vec![ratio(1, 2), ratio(-1, 3), ratio(2, 1)]);
        let (d, nums) = f.scaled_integers();
        assert_eq!(d, BigInt::from(6));
        assert_eq!(nums, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(12)]);
    }

    #[test]
    fn json_uses_strings() {
        let f = RationalFunction::new(vec![ratio(1, 2), ratio(3, 1)]);
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"["1/2","3"]"#);
        let back: RationalFunction = serde_json::from_str(r#"["1/2", 3]"#).unwrap();
        assert_eq!(back, f);
    }
}
