//! Finite windows of `Z^d` with the coordinate unit shifts, which are
//! pairwise unrelated: `T^n S^k x = T^m S^l x` forces `n = m`, `k = l`. On
//! such windows a vanishing mixed difference is the only obstruction, and
//! the decomposition is built by induction on the number of axes.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::oracle::{decompose_over_partitions, OracleOutcome};
use crate::orbits::Partition;
use crate::rational::{self, Rational};
use crate::star::abelian::check_star_abelian;
use crate::star::{Modulus, StarVerdict};

/// Values on `0 ≤ x_j < dims[j]`, stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticeWindow {
    dims: Vec<usize>,
    values: RationalFunction,
}

#[derive(Deserialize)]
struct WindowWire {
    dims: Vec<usize>,
    values: RationalFunction,
}

impl<'de> Deserialize<'de> for LatticeWindow {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = WindowWire::deserialize(d)?;
        LatticeWindow::new(w.dims, w.values.into_values()).map_err(serde::de::Error::custom)
    }
}

impl LatticeWindow {
    /// Every extent must be at least 2.
    pub fn new(dims: Vec<usize>, values: Vec<Rational>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Window("at least one axis is required".into()));
        }
        if let Some(j) = dims.iter().position(|&w| w < 2) {
            return Err(Error::Window(format!("axis {} has extent {} < 2", j + 1, dims[j])));
        }
        let expected: usize = dims.iter().product();
        if values.len() != expected {
            return Err(Error::Window(format!(
                "expected {expected} values, got {}",
                values.len()
            )));
        }
        Ok(LatticeWindow {
            dims,
            values: RationalFunction::new(values),
        })
    }

    /// Internal windows may have extent 1 along axes already differenced.
    fn raw(dims: Vec<usize>, values: Vec<Rational>) -> Self {
        debug_assert_eq!(values.len(), dims.iter().product::<usize>());
        LatticeWindow {
            dims,
            values: RationalFunction::new(values),
        }
    }

    pub fn from_fn(dims: Vec<usize>, mut value: impl FnMut(&[usize]) -> Rational) -> Result<Self> {
        let count = dims.iter().product();
        let mut coords = vec![0; dims.len()];
        let values = (0..count)
            .map(|i| {
                decode_into(&dims, i, &mut coords);
                value(&coords)
            })
            .collect();
        LatticeWindow::new(dims, values)
    }

    pub fn zeros(dims: Vec<usize>) -> Result<Self> {
        let count = dims.iter().product();
        LatticeWindow::new(dims, vec![Rational::zero(); count])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &RationalFunction {
        &self.values
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.dims).fold(0, |acc, (&c, &w)| {
            debug_assert!(c < w);
            acc * w + c
        })
    }

    pub fn coords(&self, index: usize) -> Vec<usize> {
        let mut c = vec![0; self.dims.len()];
        decode_into(&self.dims, index, &mut c);
        c
    }

    pub fn get(&self, coords: &[usize]) -> &Rational {
        &self.values[self.index(coords)]
    }

    fn stride(&self, axis: usize) -> usize {
        self.dims[axis + 1..].iter().product()
    }

    /// `Δ_j f` on the window shortened by one along `axis`.
    fn difference(&self, axis: usize) -> LatticeWindow {
        let mut dims = self.dims.clone();
        dims[axis] -= 1;
        let stride = self.stride(axis);
        let values = (0..dims.iter().product())
            .map(|i| {
                let mut c = vec![0; dims.len()];
                decode_into(&dims, i, &mut c);
                let at = self.index(&c);
                &self.values[at + stride] - &self.values[at]
            })
            .collect();
        LatticeWindow::raw(dims, values)
    }

    /// Restriction to `offset + [0, dims)`.
    pub fn restrict(&self, offset: &[usize], dims: &[usize]) -> Result<LatticeWindow> {
        if offset.len() != self.rank() || dims.len() != self.rank() {
            return Err(Error::Window("restriction has the wrong number of axes".into()));
        }
        if (0..self.rank()).any(|j| offset[j] + dims[j] > self.dims[j]) {
            return Err(Error::Window("restriction leaves the window".into()));
        }
        LatticeWindow::from_fn(dims.to_vec(), |c| {
            let shifted: Vec<usize> = c.iter().zip(offset).map(|(a, b)| a + b).collect();
            self.get(&shifted).clone()
        })
    }

    /// True iff `f(x + e_axis) = f(x)` wherever both points lie in the window.
    pub fn is_axis_invariant(&self, axis: usize) -> bool {
        self.difference(axis).values.is_zero()
    }

    fn add(&self, other: &LatticeWindow) -> LatticeWindow {
        LatticeWindow::raw(self.dims.clone(), (&self.values + &other.values).into_values())
    }

    fn sub(&self, other: &LatticeWindow) -> LatticeWindow {
        LatticeWindow::raw(self.dims.clone(), (&self.values - &other.values).into_values())
    }
}

fn decode_into(dims: &[usize], mut index: usize, coords: &mut [usize]) {
    for j in (0..dims.len()).rev() {
        coords[j] = index % dims[j];
        index /= dims[j];
    }
}

/// True iff no nonzero `(p, q)` gives `p·v = q·w`, i.e. the vectors are not
/// parallel.
pub fn unrelated_check(v: &[i64], w: &[i64]) -> Result<bool> {
    if v.len() != w.len() {
        return Err(Error::Shifts(format!(
            "vectors have {} and {} coordinates",
            v.len(),
            w.len()
        )));
    }
    if v.iter().all(|&a| a == 0) || w.iter().all(|&a| a == 0) {
        return Err(Error::Shifts("shift vectors must be nonzero".into()));
    }
    let n = v.len();
    Ok((0..n).any(|i| (i + 1..n).any(|j| i128::from(v[i]) * i128::from(w[j]) != i128::from(v[j]) * i128::from(w[i]))))
}

/// First point at which `Δ_1 ⋯ Δ_d f` is evaluable and nonzero.
pub fn lattice_mixed_delta_witness(f: &LatticeWindow) -> Option<Vec<usize>> {
    let mixed = (0..f.rank()).fold(f.clone(), |acc, axis| acc.difference(axis));
    mixed.values.first_nonzero().map(|i| mixed.coords(i))
}

pub fn lattice_mixed_delta_zero(f: &LatticeWindow) -> bool {
    lattice_mixed_delta_witness(f).is_none()
}

/// `Δ_1 ⋯ Δ_d f` at `point`, or `None` when it is not evaluable there.
pub fn lattice_mixed_delta_at(f: &LatticeWindow, point: &[usize]) -> Option<Rational> {
    if point.len() != f.rank() || point.iter().zip(&f.dims).any(|(&p, &w)| p + 1 >= w) {
        return None;
    }
    let mixed = (0..f.rank()).fold(f.clone(), |acc, axis| acc.difference(axis));
    Some(mixed.get(point).clone())
}

/// Splits `f` into parts `f_1, …, f_d`, part `j` constant along axis `j`,
/// lifting from the hyperplanes `x_j = 0`.
pub fn lattice_decompose(f: &LatticeWindow) -> Result<Vec<LatticeWindow>> {
    lattice_decompose_from(f, &vec![0; f.rank()])
}

/// As [`lattice_decompose`], lifting along axis `j` from `x_j = base[j]`.
pub fn lattice_decompose_from(f: &LatticeWindow, base: &[usize]) -> Result<Vec<LatticeWindow>> {
    if base.len() != f.rank() {
        return Err(Error::Window("one base coordinate per axis is required".into()));
    }
    if let Some(j) = (0..f.rank()).find(|&j| base[j] >= f.dims[j]) {
        return Err(Error::Window(format!("base {} outside axis {}", base[j], j + 1)));
    }
    if let Some(x) = lattice_mixed_delta_witness(f) {
        return Err(Error::Precondition(format!("mixed difference is nonzero at {x:?}")));
    }
    Ok(decompose_axes(f, f.rank(), base))
}

/// Decomposes along the first `r` axes: `f = Σ_{j<r} f_j`, `f_j` constant
/// along axis `j`. Requires `Δ_1 ⋯ Δ_r f = 0`.
fn decompose_axes(f: &LatticeWindow, r: usize, base: &[usize]) -> Vec<LatticeWindow> {
    if r == 1 {
        return vec![f.clone()];
    }
    let axis = r - 1;
    let big_f = f.difference(axis);
    let lower = decompose_axes(&big_f, r - 1, base);
    let mut parts: Vec<LatticeWindow> = lower.iter().map(|fj| lift(fj, f.dims(), axis, base[axis])).collect();
    let sum = parts.iter().fold(
        LatticeWindow::raw(f.dims.clone(), vec![Rational::zero(); f.len()]),
        |acc, p| acc.add(p),
    );
    parts.push(f.sub(&sum));
    parts
}

/// The function with `Δ_axis (lift) = g` vanishing on `x_axis = base`.
fn lift(g: &LatticeWindow, dims: &[usize], axis: usize, base: usize) -> LatticeWindow {
    let count = dims.iter().product();
    let mut coords = vec![0; dims.len()];
    let values = (0..count)
        .map(|i| {
            decode_into(dims, i, &mut coords);
            let x = coords[axis];
            let mut c = coords.clone();
            let mut acc = Rational::zero();
            if x >= base {
                for t in base..x {
                    c[axis] = t;
                    acc += g.get(&c);
                }
            } else {
                for t in x..base {
                    c[axis] = t;
                    acc -= g.get(&c);
                }
            }
            acc
        })
        .collect();
    LatticeWindow::raw(dims.to_vec(), values)
}

/// Classes of points on a common line parallel to `axis`.
pub fn axis_lines(dims: &[usize], axis: usize) -> Partition {
    let window = LatticeWindow::raw(dims.to_vec(), vec![Rational::zero(); dims.iter().product()]);
    let labels: Vec<usize> = (0..window.len())
        .map(|i| {
            let mut c = window.coords(i);
            c[axis] = 0;
            window.index(&c)
        })
        .collect();
    Partition::from_labels(&labels)
}

/// Linear feasibility of `f = Σ_j f_j` with `f_j` constant on lines along
/// axis `j`, decided independently of the inductive construction.
pub fn lattice_oracle(f: &LatticeWindow) -> OracleOutcome {
    let partitions: Vec<Partition> = (0..f.rank()).map(|j| axis_lines(f.dims(), j)).collect();
    decompose_over_partitions(&partitions, f.values())
}

/// Sum and per-axis invariance, exactly.
pub fn verify_lattice_parts(f: &LatticeWindow, parts: &[LatticeWindow]) -> bool {
    parts.len() == f.rank()
        && parts.iter().all(|p| p.dims == f.dims)
        && parts.iter().enumerate().all(|(j, p)| p.is_axis_invariant(j))
        && parts
            .iter()
            .fold(RationalFunction::zero(f.len()), |acc, p| &acc + &p.values)
            == f.values
}

/// Residue classes `x mod |a_i|` on a window of `Z`: the invariance classes
/// of the shift by `a_i` as seen through the window.
pub fn z_window_partitions(length: usize, shifts: &[i64]) -> Result<Vec<Partition>> {
    shifts
        .iter()
        .map(|&a| {
            if a == 0 {
                return Err(Error::Shifts("shifts on Z must be nonzero".into()));
            }
            let m = a.unsigned_abs() as usize;
            Ok(Partition::from_labels(&(0..length).map(|x| x % m).collect::<Vec<_>>()))
        })
        .collect()
}

pub fn z_window_oracle(shifts: &[i64], f: &RationalFunction) -> Result<OracleOutcome> {
    Ok(decompose_over_partitions(&z_window_partitions(f.len(), shifts)?, f))
}

/// `Δ_{T_1} ⋯ Δ_{T_n} f` at every evaluable point of a window of `Z`.
pub fn z_window_mixed_delta_zero(shifts: &[i64], f: &RationalFunction) -> bool {
    let len = f.len() as i64;
    let n = shifts.len();
    (0..len).all(|z| {
        let mut total = Rational::zero();
        for subset in 0u32..(1 << n) {
            let x = z + (0..n).filter(|&j| subset >> j & 1 == 1).map(|j| shifts[j]).sum::<i64>();
            if !(0..len).contains(&x) {
                return true;
            }
            if (n as u32 - subset.count_ones()).is_multiple_of(2) {
                total += &f[x as usize];
            } else {
                total -= &f[x as usize];
            }
        }
        total.is_zero()
    })
}

/// The identity function on a window of `Z` with two unit shifts: every
/// mixed difference vanishes, yet Condition (**) fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub length: usize,
    pub shifts: Vec<i64>,
    pub f: RationalFunction,
    pub mixed_delta_vanishes: bool,
    pub verdict: StarVerdict,
}

pub fn z_window_counterexample(length: usize) -> Result<CounterexampleRecord> {
    let f = RationalFunction::from_fn(length, |x| rational::int(x as i64));
    let shifts = vec![1, 1];
    Ok(CounterexampleRecord {
        length,
        mixed_delta_vanishes: z_window_mixed_delta_zero(&shifts, &f),
        verdict: check_star_abelian(Modulus::Infinite, &shifts, &f)?,
        shifts,
        f,
    })
}
