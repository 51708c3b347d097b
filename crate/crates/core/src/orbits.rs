//! Invariance classes, joint orbit classes and power relations between
//! points. Class representatives are always the smallest member, which makes
//! every construction built on them reproducible.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::RationalFunction;
use crate::system::{CommutingSystem, Transformation};

/// Default exponent bound for relation searches on a domain of `size`
/// points. Any power sequence `T^k x` has preperiod plus period at most
/// `size`, so all relations reduce to exponents below `size`.
pub fn default_bound(size: usize) -> usize {
    2 * size
}

/// A partition of `0..N` into classes numbered by ascending representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    class_of: Vec<usize>,
    representative: Vec<usize>,
}

impl Partition {
    /// Components of the undirected graph on `0..size` with the given edges.
    pub fn from_edges(size: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut uf = UnionFind::<usize>::new(size);
        for (a, b) in edges {
            uf.union(a, b);
        }
        let mut root_class = HashMap::new();
        let mut class_of = Vec::with_capacity(size);
        let mut representative = Vec::new();
        for x in 0..size {
            let root = uf.find(x);
            let class = *root_class.entry(root).or_insert_with(|| {
                representative.push(x);
                representative.len() - 1
            });
            class_of.push(class);
        }
        Partition {
            class_of,
            representative,
        }
    }

    /// Builds a partition from explicit class labels (any labelling).
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut ids = HashMap::new();
        let mut class_of = Vec::with_capacity(labels.len());
        let mut representative = Vec::new();
        for (x, label) in labels.iter().enumerate() {
            let class = *ids.entry(label).or_insert_with(|| {
                representative.push(x);
                representative.len() - 1
            });
            class_of.push(class);
        }
        Partition {
            class_of,
            representative,
        }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.representative.len()
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    pub fn class_ids(&self) -> &[usize] {
        &self.class_of
    }

    pub fn representative(&self, class: usize) -> usize {
        self.representative[class]
    }

    pub fn representative_of(&self, x: usize) -> usize {
        self.representative[self.class_of[x]]
    }

    pub fn same_class(&self, x: usize, y: usize) -> bool {
        self.class_of[x] == self.class_of[y]
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_classes()];
        for (x, &c) in self.class_of.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// First pair `(x, representative)` on which `f` is not constant.
    pub fn non_constant_witness(&self, f: &RationalFunction) -> Option<(usize, usize)> {
        (0..self.len()).find_map(|x| {
            let r = self.representative_of(x);
            (f[x] != f[r]).then_some((x, r))
        })
    }

    pub fn is_constant_on_classes(&self, f: &RationalFunction) -> bool {
        self.non_constant_witness(f).is_none()
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        (0..self.len()).all(|x| coarser.same_class(x, self.representative_of(x)))
    }

    /// The map induced by `t` on classes, if `t` sends classes into classes.
    pub fn quotient(&self, t: &Transformation) -> Option<Transformation> {
        let mut image = vec![usize::MAX; self.num_classes()];
        for x in 0..self.len() {
            let (c, d) = (self.class_of[x], self.class_of[t.apply(x)]);
            if image[c] == usize::MAX {
                image[c] = d;
            } else if image[c] != d {
                return None;
            }
        }
        Transformation::new(image).ok()
    }

    /// Values at class representatives.
    pub fn restrict(&self, f: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.representative.iter().map(|&r| f[r].clone()).collect())
    }

    /// Extends a function on classes to a class-constant function on points.
    pub fn lift(&self, g: &RationalFunction) -> RationalFunction {
        RationalFunction::from_fn(self.len(), |x| g[self.class_of[x]].clone())
    }
}

/// Weakly connected components of the functional graph `x → Tx`.
pub fn invariance_classes(t: &Transformation) -> Partition {
    Partition::from_edges(t.len(), (0..t.len()).map(|x| (x, t.apply(x))))
}

/// Components of the graph with edges `x -- T_j x` for `j` in `subset`.
pub fn joint_classes(system: &CommutingSystem, subset: &[usize]) -> Result<Partition> {
    if subset.is_empty() {
        return Err(Error::Precondition("joint classes need a nonempty subset".into()));
    }
    if let Some(&j) = subset.iter().find(|&&j| j >= system.len()) {
        return Err(Error::Precondition(format!("no transformation with index {j}")));
    }
    Ok(joint_partition(
        system.size(),
        subset.iter().map(|&j| system.transform(j)),
    ))
}

pub(crate) fn joint_partition<'a>(size: usize, maps: impl Iterator<Item = &'a Transformation> + Clone) -> Partition {
    Partition::from_edges(size, maps.flat_map(|t| (0..size).map(move |x| (x, t.apply(x)))))
}

/// Exponents witnessing `T^k S^n x = T^{k2} S^{n2} y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Relation {
    pub k: usize,
    pub n: usize,
    pub k2: usize,
    pub n2: usize,
}

impl Relation {
    pub fn total(&self) -> usize {
        self.k + self.n + self.k2 + self.n2
    }

    pub fn swapped(&self) -> Relation {
        Relation {
            k: self.k2,
            n: self.n2,
            k2: self.k,
            n2: self.n,
        }
    }

    pub fn holds(&self, s: &Transformation, t: &Transformation, x: usize, y: usize) -> bool {
        t.apply_pow(s.apply_pow(x, self.n), self.k) == t.apply_pow(s.apply_pow(y, self.n2), self.k2)
    }
}

/// `grid[k][n] = T^k S^n x` for `k, n ≤ bound`.
pub(crate) fn power_grid(s: &Transformation, t: &Transformation, x: usize, bound: usize) -> Vec<Vec<usize>> {
    let mut grid = Vec::with_capacity(bound + 1);
    let mut row_start = x;
    for _ in 0..=bound {
        let mut row = Vec::with_capacity(bound + 1);
        let mut p = row_start;
        for _ in 0..=bound {
            row.push(p);
            p = s.apply(p);
        }
        grid.push(row);
        row_start = t.apply(row_start);
    }
    grid
}

/// Smallest relation `T^k S^n x = T^{k2} S^{n2} y` with all exponents at most
/// `bound`, ordered by `(k+n+k2+n2, k, n, k2, n2)`.
pub fn find_relation(s: &Transformation, t: &Transformation, x: usize, y: usize, bound: usize) -> Option<Relation> {
    if x == y {
        return Some(Relation {
            k: 0,
            n: 0,
            k2: 0,
            n2: 0,
        });
    }
    let classes = joint_partition(s.len(), [s, t].into_iter());
    if !classes.same_class(x, y) {
        return None;
    }
    let gx = power_grid(s, t, x, bound);
    let gy = power_grid(s, t, y, bound);
    for total in 0..=4 * bound {
        for k in 0..=total.min(bound) {
            for n in 0..=(total - k).min(bound) {
                let rest = total - k - n;
                if rest > 2 * bound {
                    continue;
                }
                let target = gx[k][n];
                for k2 in rest.saturating_sub(bound)..=rest.min(bound) {
                    let n2 = rest - k2;
                    if gy[k2][n2] == target {
                        return Some(Relation { k, n, k2, n2 });
                    }
                }
            }
        }
    }
    None
}

/// Points `x` with `T^k S^l x = T^{k'} S^{l'} x` for some `k > k'`, each with
/// its smallest witness (same ordering as [`find_relation`]).
pub fn prescribed_points(s: &Transformation, t: &Transformation, bound: usize) -> Vec<(usize, Relation)> {
    (0..t.len())
        .filter_map(|x| prescribing_relation(s, t, x, bound).map(|r| (x, r)))
        .collect()
}

pub fn prescribing_relation(s: &Transformation, t: &Transformation, x: usize, bound: usize) -> Option<Relation> {
    let g = power_grid(s, t, x, bound);
    for total in 1..=4 * bound {
        for k in 1..=total.min(bound) {
            for n in 0..=(total - k).min(bound) {
                let rest = total - k - n;
                for k2 in rest.saturating_sub(bound)..=rest.min(bound).min(k - 1) {
                    let n2 = rest - k2;
                    if n2 <= bound && g[k][n] == g[k2][n2] {
                        return Some(Relation { k, n, k2, n2 });
                    }
                }
            }
        }
    }
    None
}
