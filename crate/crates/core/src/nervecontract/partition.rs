use std::collections::HashMap;

use num_traits::{One, Zero};

use super::NerveError;
use crate::chains::{BoxCell, Extent, Rational};

/// One cell of a shifted partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShiftedCell {
    /// Lattice index of the shifted cube this cell was clipped from; may be
    /// `-1` or `n` for slivers at the cube boundary.
    pub lattice: Vec<i64>,
    /// Grid cell whose color this cell takes: the lattice index clamped
    /// into `0..n`, which is the nearest original cube.
    pub provenance: Vec<usize>,
    pub bounds: BoxCell,
}

/// A tiling of `[0,1]^d` by shifted, clipped cubes of side `1/n` in which at
/// most `d + 1` closed cells share a point.
///
/// Layers along the last axis are exact. Inside the layer with index `j`
/// along axis `f`, every transverse axis `e < f` is translated by
/// `j * δ / p_f`, where `p_f` is the `f`-th prime. Each layer is therefore a
/// translate of a lower-dimensional shifted partition.
#[derive(Clone, Debug)]
pub struct ShiftedPartition {
    d: usize,
    n: usize,
    delta: Rational,
    primes: Vec<i128>,
    cells: Vec<ShiftedCell>,
    neighbors: Vec<Vec<usize>>,
    max_multiplicity: usize,
}

/// `1/(8n)`: inside the admissible range with room for every prime shift.
pub fn default_delta(n: usize) -> Rational {
    Rational::new(1, 8 * n as i128)
}

fn first_primes(count: usize) -> Vec<i128> {
    let mut primes: Vec<i128> = Vec::with_capacity(count);
    let mut candidate = 2;
    while primes.len() < count {
        if primes.iter().all(|p| candidate % p != 0) {
            primes.push(candidate);
        }
        candidate += 1;
    }
    primes
}

fn floor_int(x: Rational) -> i64 {
    x.floor().to_integer() as i64
}

fn ceil_int(x: Rational) -> i64 {
    x.ceil().to_integer() as i64
}

pub fn build_shifted_partition(
    d: usize,
    n: usize,
    delta: Rational,
) -> Result<ShiftedPartition, NerveError> {
    if d == 0 || n == 0 {
        return Err(NerveError::EmptyParameter);
    }
    let limit = Rational::new(1, 4 * n as i128);
    if delta <= Rational::zero() || delta >= limit {
        return Err(NerveError::DeltaOutOfRange {
            delta: crate::chains::fmt_rational(&delta),
        });
    }
    let primes = first_primes(d);
    let mut cells = Vec::new();
    let mut lattice = vec![0i64; d];
    let mut offsets = vec![Rational::zero(); d];
    enumerate(
        d,
        n,
        &delta,
        &primes,
        d,
        &mut lattice,
        &mut offsets,
        &mut cells,
    );
    let neighbors = neighbor_lists(n, &cells);
    let mut p = ShiftedPartition {
        d,
        n,
        delta,
        primes,
        cells,
        neighbors,
        max_multiplicity: 0,
    };
    p.verify_tiling()?;
    p.max_multiplicity = p.scan_multiplicity();
    if p.max_multiplicity > d + 1 {
        return Err(NerveError::NotSimple {
            multiplicity: p.max_multiplicity,
            limit: d + 1,
        });
    }
    Ok(p)
}

/// Fills axes `axis-1, ..., 0`; `offsets[e]` is the accumulated translation
/// of axis `e` from the layers chosen so far.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    d: usize,
    n: usize,
    delta: &Rational,
    primes: &[i128],
    axis: usize,
    lattice: &mut Vec<i64>,
    offsets: &mut Vec<Rational>,
    out: &mut Vec<ShiftedCell>,
) {
    if axis == 0 {
        let inv = Rational::new(1, n as i128);
        let extents = (0..d)
            .map(|e| {
                let lo = Rational::from_integer(lattice[e] as i128) * inv + offsets[e];
                let lo = lo.max(Rational::zero());
                let hi = (Rational::from_integer(lattice[e] as i128 + 1) * inv + offsets[e])
                    .min(Rational::one());
                Extent::Interval(lo, hi)
            })
            .collect();
        out.push(ShiftedCell {
            lattice: lattice.clone(),
            provenance: lattice
                .iter()
                .map(|&i| i.clamp(0, n as i64 - 1) as usize)
                .collect(),
            bounds: BoxCell::new(extents).expect("clipped cell is a nondegenerate box"),
        });
        return;
    }
    let e = axis - 1;
    let nr = Rational::from_integer(n as i128);
    let o = offsets[e];
    // cells [i/n + o, (i+1)/n + o] meeting (0, 1) in positive length
    let first = floor_int(-o * nr);
    let last = ceil_int((Rational::one() - o) * nr) - 1;
    for i in first..=last {
        lattice[e] = i;
        let step = Rational::from_integer(i as i128) * delta / Rational::from_integer(primes[e]);
        for t in offsets.iter_mut().take(e) {
            *t += step;
        }
        enumerate(d, n, delta, primes, e, lattice, offsets, out);
        for t in offsets.iter_mut().take(e) {
            *t -= step;
        }
    }
}

/// Cells sharing at least one point. Every cell is registered in the grid
/// buckets its closed box meets, so intersecting cells share a bucket.
fn neighbor_lists(n: usize, cells: &[ShiftedCell]) -> Vec<Vec<usize>> {
    let nr = Rational::from_integer(n as i128);
    let bucket_range = |x: &Rational| floor_int(x * nr).clamp(0, n as i64 - 1);
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (idx, cell) in cells.iter().enumerate() {
        let ranges: Vec<(i64, i64)> = cell
            .bounds
            .extents()
            .iter()
            .map(|e| (bucket_range(e.lo()), bucket_range(e.hi())))
            .collect();
        for key in product(&ranges) {
            buckets.entry(key).or_default().push(idx);
        }
    }
    let mut neighbors = vec![Vec::new(); cells.len()];
    for members in buckets.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in &members[a + 1..] {
                if cells[i].bounds.intersects(&cells[j].bounds) {
                    neighbors[i].push(j);
                    neighbors[j].push(i);
                }
            }
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }
    neighbors
}

/// All integer vectors with `lo_i <= v_i <= hi_i`.
fn product(ranges: &[(i64, i64)]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(ranges.len())];
    for &(lo, hi) in ranges {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (lo..=hi).map(move |v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// Cartesian product of per-axis value lists.
fn grid_points(axes: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::with_capacity(axes.len())];
    for values in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut p = prefix.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

impl ShiftedPartition {
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    /// Translation denominators `p_1 < ... < p_d`.
    pub fn primes(&self) -> &[i128] {
        &self.primes
    }

    pub fn cells(&self) -> &[ShiftedCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Indices of the cells whose closed boxes meet cell `i`, excluding `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Largest number of closed cells sharing a point.
    pub fn max_multiplicity(&self) -> usize {
        self.max_multiplicity
    }

    pub fn total_volume(&self) -> Rational {
        self.cells
            .iter()
            .fold(Rational::zero(), |acc, c| acc + c.bounds.volume())
    }

    /// Linear grid index of the provenance cell, axis 0 fastest.
    pub fn provenance_index(&self, i: usize) -> usize {
        self.cells[i]
            .provenance
            .iter()
            .rev()
            .fold(0, |acc, &c| acc * self.n + c)
    }

    /// Number of closed cells containing `point`, found among cell `near`
    /// and its neighbors; `point` must lie in cell `near`.
    pub fn multiplicity_near(&self, near: usize, point: &[Rational]) -> usize {
        1 + self.neighbors[near]
            .iter()
            .filter(|&&j| self.cells[j].bounds.contains_point(point))
            .count()
    }

    fn verify_tiling(&self) -> Result<(), NerveError> {
        let total = self.total_volume();
        if !total.is_one() {
            return Err(NerveError::NotTiling(format!(
                "total volume {}",
                crate::chains::fmt_rational(&total)
            )));
        }
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                if self.cells[i].bounds.interiors_overlap(&self.cells[j].bounds) {
                    return Err(NerveError::NotTiling(format!("cells {i} and {j} overlap")));
                }
            }
        }
        Ok(())
    }

    /// A common point of pairwise-meeting boxes can be taken at the maximum
    /// of their lower corners, so it suffices to test, inside each cell, the
    /// points whose coordinates are lower corners of that cell or a neighbor.
    fn scan_multiplicity(&self) -> usize {
        let mut best = 0;
        for (i, cell) in self.cells.iter().enumerate() {
            let axes: Vec<Vec<Rational>> = (0..self.d)
                .map(|a| {
                    let own = cell.bounds.extent(a);
                    let mut values: Vec<Rational> = std::iter::once(i)
                        .chain(self.neighbors[i].iter().copied())
                        .map(|j| *self.cells[j].bounds.extent(a).lo())
                        .filter(|x| own.contains(x))
                        .collect();
                    values.sort();
                    values.dedup();
                    values
                })
                .collect();
            for point in grid_points(&axes) {
                best = best.max(self.multiplicity_near(i, &point));
            }
        }
        best
    }
}
