//! Condition (**): translations `T_i x = x + a_i` on `Z_m` or on a window of
//! `Z`, where the premises reduce to divisibility, "`a_i` divides `k·a_h`"
//! meaning `n·a_i = k·a_h` for some natural `n`.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::engine::{distinct_powers, search, Model, Power};
use super::{inclusion_exclusion, PowerMap, StarInstance, StarVerdict, StarViolation};
use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::system::{CommutingSystem, Transformation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modulus {
    /// The cyclic group `Z_m`.
    Finite(usize),
    /// The integers, observed through a window `0..L`.
    Infinite,
}

/// Explicit translation maps `x ↦ x + a_i mod m`.
pub fn translation_system(modulus: usize, shifts: &[i64]) -> Result<CommutingSystem> {
    let reduced = reduce_shifts(modulus, shifts)?;
    CommutingSystem::from_images(
        reduced
            .iter()
            .map(|&a| Transformation::translation(modulus, a).image().to_vec())
            .collect(),
    )
}

fn reduce_shifts(modulus: usize, shifts: &[i64]) -> Result<Vec<usize>> {
    if modulus == 0 {
        return Err(Error::Shifts("modulus must be positive".into()));
    }
    shifts
        .iter()
        .enumerate()
        .map(|(i, &a)| {
            usize::try_from(a)
                .ok()
                .filter(|&a| a < modulus)
                .ok_or_else(|| Error::Shifts(format!("shift {} = {a} outside [0, {modulus})", i + 1)))
        })
        .collect()
}

/// Smallest natural `n` with `n·a = b`, in `Z_m` or in `Z`.
fn divides(modulus: Modulus, a: i64, b: i64) -> Option<usize> {
    match modulus {
        Modulus::Finite(m) => {
            let m = m as i64;
            (0..m).find(|n| (n * a - b).rem_euclid(m) == 0).map(|n| n as usize)
        }
        Modulus::Infinite => {
            if a == 0 {
                (b == 0).then_some(0)
            } else if b % a == 0 && b / a >= 0 {
                Some((b / a) as usize)
            } else {
                None
            }
        }
    }
}

struct ShiftModel {
    modulus: Modulus,
    size: usize,
    shifts: Vec<i64>,
    powers: Vec<Vec<Power>>,
}

impl ShiftModel {
    fn new(modulus: Modulus, shifts: &[i64], size: usize, k_bound: usize) -> Self {
        let powers = shifts
            .iter()
            .map(|&a| {
                distinct_powers(k_bound, |k| {
                    let step = a * k as i64;
                    (0..size as i64)
                        .map(|x| match modulus {
                            Modulus::Finite(m) => Some((x + step).rem_euclid(m as i64) as usize),
                            Modulus::Infinite => usize::try_from(x + step).ok().filter(|&y| y < size),
                        })
                        .collect()
                })
            })
            .collect();
        ShiftModel {
            modulus,
            size,
            shifts: shifts.to_vec(),
            powers,
        }
    }
}

impl Model for ShiftModel {
    fn size(&self) -> usize {
        self.size
    }

    fn arity(&self) -> usize {
        self.shifts.len()
    }

    fn powers(&self, h: usize) -> &[Power] {
        &self.powers[h]
    }

    fn premise(&self, h: usize, p: usize, i: usize) -> FixedBitSet {
        let k = self.powers[h][p].k as i64;
        let mut mask = FixedBitSet::with_capacity(self.size);
        if divides(self.modulus, self.shifts[i], k * self.shifts[h]).is_some() {
            mask.insert_range(..);
        }
        mask
    }
}

/// Condition (**) with `k_j ≤ m` on `Z_m`, or `k_j ≤ L` on a window of
/// length `L`. On windows the conclusion is checked wherever all its points
/// fall inside the window.
pub fn check_star_abelian(modulus: Modulus, shifts: &[i64], f: &RationalFunction) -> Result<StarVerdict> {
    check_star_abelian_bounded(modulus, shifts, f, f.len())
}

pub fn check_star_abelian_bounded(
    modulus: Modulus,
    shifts: &[i64],
    f: &RationalFunction,
    k_bound: usize,
) -> Result<StarVerdict> {
    if shifts.is_empty() {
        return Err(Error::Shifts("at least one shift is required".into()));
    }
    match modulus {
        Modulus::Finite(m) => {
            reduce_shifts(m, shifts)?;
            if f.len() != m {
                return Err(Error::FunctionLength { len: f.len(), size: m });
            }
        }
        Modulus::Infinite => {
            if let Some(i) = shifts.iter().position(|&a| a == 0) {
                return Err(Error::Shifts(format!("shift {} is zero", i + 1)));
            }
            if f.is_empty() {
                return Err(Error::EmptyDomain);
            }
        }
    }
    let model = ShiftModel::new(modulus, shifts, f.len(), k_bound);
    let hit = search(&model, f, false);
    Ok(hit
        .map(|hit| {
            let n = shifts.len();
            let mut l2 = vec![0; n];
            for ((block, &h), &k) in hit.blocks.iter().zip(&hit.distinguished).zip(&hit.k) {
                for &i in block.iter().filter(|&&i| i != h) {
                    l2[i] = divides(modulus, shifts[i], k as i64 * shifts[h]).expect("premise holds");
                }
            }
            StarViolation::new(
                StarInstance {
                    blocks: hit.blocks,
                    distinguished: hit.distinguished,
                    k: hit.k,
                    l: vec![0; n],
                    l2,
                    z: hit.z,
                },
                hit.value,
            )
        })
        .into())
}

struct WindowShift {
    step: i64,
    len: usize,
}

impl PowerMap for WindowShift {
    fn image_of(&self, x: usize) -> Option<usize> {
        usize::try_from(x as i64 + self.step).ok().filter(|&y| y < self.len)
    }
}

/// Replays a violation on a window of `Z`: premises as integer identities,
/// the conclusion from window values.
pub fn replay_z_window(v: &StarViolation, shifts: &[i64], f: &RationalFunction) -> Result<()> {
    let inst = &v.instance;
    inst.check_shape(shifts.len())?;
    for (h, k, i) in inst.premises() {
        let lhs = k as i64 * shifts[h] + inst.l[i] as i64 * shifts[i];
        if lhs != inst.l2[i] as i64 * shifts[i] {
            return Err(Error::Precondition(format!("premise for index {} fails", i + 1)));
        }
    }
    let maps: Vec<WindowShift> = inst
        .distinguished
        .iter()
        .zip(&inst.k)
        .map(|(&h, &k)| WindowShift {
            step: k as i64 * shifts[h],
            len: f.len(),
        })
        .collect();
    let value = inclusion_exclusion(inst.z, &maps, |x| (x < f.len()).then(|| f[x].clone()))
        .ok_or_else(|| Error::Precondition("conclusion leaves the window".into()))?;
    v.check_value(value)
}

/// Replays a violation found on `Z_m` against the explicit translations.
pub fn replay_cyclic(v: &StarViolation, modulus: usize, shifts: &[i64], f: &RationalFunction) -> Result<()> {
    v.replay(&translation_system(modulus, shifts)?, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use crate::star::check_star;

    #[test]
    fn identity_on_z_with_unit_shifts() {
        let f = RationalFunction::from_fn(10, |x| int(x as i64));
        let v = check_star_abelian(Modulus::Infinite, &[1, 1], &f)
            .unwrap()
            .into_violation()
            .unwrap();
        assert_eq!(v.instance.blocks, vec![vec![0, 1]]);
        assert_eq!(v.instance.k, vec![1]);
        assert_eq!(v.value, int(1));
        assert_eq!(replay_z_window(&v, &[1, 1], &f), Ok(()));
    }

    #[test]
    fn identity_with_shifts_two_and_three() {
        let f = RationalFunction::from_fn(20, |x| int(x as i64));
        let v = check_star_abelian(Modulus::Infinite, &[2, 3], &f)
            .unwrap()
            .into_violation()
            .unwrap();
        assert_eq!(v.instance.blocks, vec![vec![0, 1]]);
        assert_eq!(v.instance.distinguished, vec![0]);
        assert_eq!(v.instance.k, vec![3]);
        assert_eq!(v.value, int(6));
        assert_eq!(replay_z_window(&v, &[2, 3], &f), Ok(()));
    }

    #[test]
    fn constants_pass() {
        let f = RationalFunction::constant(10, int(3));
        assert!(check_star_abelian(Modulus::Infinite, &[1, 1], &f).unwrap().is_pass());
        let g = RationalFunction::constant(6, int(3));
        assert!(check_star_abelian(Modulus::Finite(6), &[2, 3], &g).unwrap().is_pass());
    }

    #[test]
    fn cyclic_sum_of_periodic_parts_passes() {
        // Z_6 with shifts 2 and 3: parts of period 2 and period 3.
        let f = RationalFunction::from_fn(6, |x| int([4, -1][x % 2] + [0, 7, 2][x % 3]));
        assert!(check_star_abelian(Modulus::Finite(6), &[2, 3], &f).unwrap().is_pass());
    }

    #[test]
    fn agrees_with_explicit_maps() {
        let f = RationalFunction::from_integers(&[0, 1, 0, 0, 2, 0]);
        let shifts = [2, 4];
        let a = check_star_abelian(Modulus::Finite(6), &shifts, &f).unwrap();
        let system = translation_system(6, &shifts).unwrap();
        let b = check_star(&system, &f, 12);
        let (va, vb) = (a.violation().unwrap(), b.violation().unwrap());
        assert_eq!(va.instance.blocks, vb.instance.blocks);
        assert_eq!(va.instance.k, vb.instance.k);
        assert_eq!(va.instance.z, vb.instance.z);
        assert_eq!(replay_cyclic(va, 6, &shifts, &f), Ok(()));
    }

    #[test]
    fn malformed_shifts() {
        let f = RationalFunction::zero(4);
        assert!(matches!(
            check_star_abelian(Modulus::Finite(4), &[5], &f),
            Err(Error::Shifts(_))
        ));
        assert!(matches!(
            check_star_abelian(Modulus::Finite(4), &[], &f),
            Err(Error::Shifts(_))
        ));
        assert!(matches!(
            check_star_abelian(Modulus::Infinite, &[0, 1], &f),
            Err(Error::Shifts(_))
        ));
    }
}
