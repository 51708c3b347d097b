//! Dense Gauss–Jordan elimination over the rationals.

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Outcome of solving `A v = b` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solution {
    /// A solution vector (free variables set to zero).
    Point(Vec<Rational>),
    /// A row combination `y` with `yᵀA = 0` and `yᵀb ≠ 0`.
    Inconsistent(Vec<Rational>),
}

fn pivot_cost(q: &Rational) -> (u64, u64) {
    (q.denom().bits(), q.numer().bits())
}

struct Reduced {
    rows: Vec<Vec<Rational>>,
    pivots: Vec<(usize, usize)>,
}

/// Reduces the first `cols` columns of `rows` to reduced row echelon form,
/// applying each row operation to the trailing columns as well. Among
/// candidate pivots the one with the smallest denominator is chosen.
fn reduce(mut rows: Vec<Vec<Rational>>, cols: usize) -> Reduced {
    let mut pivots = Vec::new();
    let mut next = 0;
    for c in 0..cols {
        if next == rows.len() {
            break;
        }
        let Some(p) = (next..rows.len())
            .filter(|&r| !rows[r][c].is_zero())
            .min_by_key(|&r| pivot_cost(&rows[r][c]))
        else {
            continue;
        };
        rows.swap(next, p);
        let inv = Rational::one() / &rows[next][c];
        for v in rows[next].iter_mut().filter(|v| !v.is_zero()) {
            *v *= &inv;
        }
        let pivot_row = std::mem::take(&mut rows[next]);
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row.is_empty() || row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        rows[next] = pivot_row;
        pivots.push((next, c));
        next += 1;
    }
    Reduced { rows, pivots }
}

/// Solves `A v = b`. Rows of `a` must all have length `cols`.
pub fn solve(a: &[Vec<Rational>], b: &[Rational], cols: usize) -> Solution {
    assert_eq!(a.len(), b.len(), "row count mismatch");
    let m = a.len();
    let augmented: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            debug_assert_eq!(row.len(), cols);
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let reduced = reduce(augmented, cols);
    let rank = reduced.pivots.len();
    if reduced.rows[rank..].iter().any(|r| !r[cols].is_zero()) {
        // Repeat with the multipliers tracked to extract the certificate.
        let tracked: Vec<Vec<Rational>> = a
            .iter()
            .zip(b)
            .enumerate()
            .map(|(i, (row, rhs))| {
                let mut r = row.clone();
                r.push(rhs.clone());
                r.extend((0..m).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
                r
            })
            .collect();
        let reduced = reduce(tracked, cols);
        let rank = reduced.pivots.len();
        let row = reduced.rows[rank..]
            .iter()
            .find(|r| !r[cols].is_zero())
            .expect("inconsistency is independent of the tracking columns");
        return Solution::Inconsistent(row[cols + 1..].to_vec());
    }
    let mut v = vec![Rational::zero(); cols];
    for &(r, c) in &reduced.pivots {
        v[c] = reduced.rows[r][cols].clone();
    }
    Solution::Point(v)
}

pub fn rank(rows: &[Vec<Rational>], cols: usize) -> usize {
    reduce(rows.to_vec(), cols).pivots.len()
}

/// A basis of `{v : row · v = 0 for every row}`.
pub fn nullspace(rows: &[Vec<Rational>], cols: usize) -> Vec<Vec<Rational>> {
    let reduced = reduce(rows.to_vec(), cols);
    let mut is_pivot = vec![None; cols];
    for &(r, c) in &reduced.pivots {
        is_pivot[c] = Some(r);
    }
    (0..cols)
        .filter(|&c| is_pivot[c].is_none())
        .map(|free| {
            let mut v = vec![Rational::zero(); cols];
            v[free] = Rational::one();
            for &(r, c) in &reduced.pivots {
                v[c] = -reduced.rows[r][free].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn m(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn mul(a: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
        a.iter()
            .map(|r| r.iter().zip(v).fold(Rational::zero(), |s, (x, y)| s + x * y))
            .collect()
    }

    #[test]
    fn solves_consistent_system() {
        let a = m(&[&[2, 1, 0], &[0, 3, 1], &[2, 4, 1]]);
        let b = vec![int(1), int(2), int(3)];
        match solve(&a, &b, 3) {
            Solution::Point(v) => assert_eq!(mul(&a, &v), b),
            other => panic!("expected a solution, got {other:?}"),
        }
    }

    #[test]
    fn certificate_for_inconsistent_system() {
        let a = m(&[&[1, 1], &[1, 1]]);
        let b = vec![int(0), ratio(1, 2)];
        let Solution::Inconsistent(y) = solve(&a, &b, 2) else {
            panic!("expected inconsistency")
        };
        for c in 0..2 {
            let s = a.iter().zip(&y).fold(Rational::zero(), |s, (r, w)| s + &r[c] * w);
            assert!(s.is_zero());
        }
        let yb = y.iter().zip(&b).fold(Rational::zero(), |s, (w, v)| s + w * v);
        assert!(!yb.is_zero());
    }

    #[test]
    fn nullspace_and_rank() {
        let a = m(&[&[1, -1, 0, 0], &[0, 1, -1, 0]]);
        assert_eq!(rank(&a, 4), 2);
        let ns = nullspace(&a, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(mul(&a, v).iter().all(Zero::is_zero));
        }
        assert_eq!(nullspace(&[], 3).len(), 3);
    }
}
