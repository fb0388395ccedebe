use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{BoxCell, ChainError, Extent, Rational};

/// Coefficient ring of a chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    #[default]
    Mod2,
    Integer,
}

impl Ring {
    fn normalize(self, c: i64) -> i64 {
        match self {
            Ring::Mod2 => c.rem_euclid(2),
            Ring::Integer => c,
        }
    }
}

/// A formal sum of `k`-dimensional boxes in `[0,1]^d`, kept canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RectChain {
    ambient: usize,
    dim: usize,
    ring: Ring,
    terms: BTreeMap<BoxCell, i64>,
}

impl RectChain {
    pub fn zero(ambient: usize, dim: usize, ring: Ring) -> Self {
        RectChain {
            ambient,
            dim,
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// `[Q]`: the cube with coefficient one.
    pub fn fundamental(ambient: usize, ring: Ring) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(BoxCell::unit_cube(ambient), 1);
        RectChain {
            ambient,
            dim: ambient,
            ring,
            terms,
        }
    }

    pub fn from_terms<I>(ambient: usize, dim: usize, ring: Ring, terms: I) -> Result<Self, ChainError>
    where
        I: IntoIterator<Item = (BoxCell, i64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        for (cell, _) in &terms {
            if cell.ambient_dim() != ambient {
                return Err(ChainError::AmbientMismatch {
                    expected: ambient,
                    found: cell.ambient_dim(),
                });
            }
            if cell.dim() != dim {
                return Err(ChainError::DimensionMismatch {
                    expected: dim,
                    found: cell.dim(),
                });
            }
        }
        Ok(Self::from_terms_unchecked(ambient, dim, ring, terms))
    }

    pub(crate) fn from_terms_unchecked<I>(ambient: usize, dim: usize, ring: Ring, terms: I) -> Self
    where
        I: IntoIterator<Item = (BoxCell, i64)>,
    {
        RectChain {
            ambient,
            dim,
            ring,
            terms: canonicalize(ring, terms),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BoxCell, i64)> {
        self.terms.iter().map(|(c, &v)| (c, v))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Same as [`RectChain::is_zero`].
    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn coefficient(&self, cell: &BoxCell) -> i64 {
        self.terms.get(cell).copied().unwrap_or(0)
    }

    pub fn max_abs_coefficient(&self) -> i64 {
        self.terms.values().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// `‖c‖ = Σ |α_σ| vol_k σ`.
    pub fn volume(&self) -> Rational {
        self.terms
            .iter()
            .map(|(c, &v)| c.volume() * Rational::from_integer(v.abs() as i128))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Re-canonicalizes; a no-op on chains built through the public API.
    pub fn canonical(&self) -> RectChain {
        Self::from_terms_unchecked(
            self.ambient,
            self.dim,
            self.ring,
            self.terms.iter().map(|(c, &v)| (c.clone(), v)),
        )
    }

    pub fn to_ring(&self, ring: Ring) -> RectChain {
        Self::from_terms_unchecked(
            self.ambient,
            self.dim,
            ring,
            self.terms.iter().map(|(c, &v)| (c.clone(), v)),
        )
    }

    pub fn scaled(&self, factor: i64) -> RectChain {
        Self::from_terms_unchecked(
            self.ambient,
            self.dim,
            self.ring,
            self.terms.iter().map(|(c, &v)| (c.clone(), v * factor)),
        )
    }

    /// Drops every cell lying in `∂Q`, giving the representative mod `∂Q`.
    pub fn reduce_rel(&self) -> RectChain {
        RectChain {
            ambient: self.ambient,
            dim: self.dim,
            ring: self.ring,
            terms: self
                .terms
                .iter()
                .filter(|(c, _)| !c.in_cube_boundary())
                .map(|(c, &v)| (c.clone(), v))
                .collect(),
        }
    }

    /// Cubical boundary. Each interval axis at position `p` among the interval
    /// axes contributes `(-1)^p (top face - bottom face)`. With `relative`,
    /// faces inside `∂Q` are discarded.
    pub fn boundary(&self, relative: bool) -> Result<RectChain, ChainError> {
        if self.dim == 0 {
            return Err(ChainError::PointBoundary);
        }
        let mut out = Vec::with_capacity(self.terms.len() * 2 * self.dim);
        for (cell, &coef) in &self.terms {
            for (pos, axis) in cell.interval_axes().enumerate() {
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let e = cell.extent(axis);
                let top = cell.with_extent(axis, Extent::Fixed(*e.hi()));
                let bottom = cell.with_extent(axis, Extent::Fixed(*e.lo()));
                for (face, s) in [(top, sign), (bottom, -sign)] {
                    if relative && face.in_cube_boundary() {
                        continue;
                    }
                    out.push((face, s * coef));
                }
            }
        }
        Ok(Self::from_terms_unchecked(self.ambient, self.dim - 1, self.ring, out))
    }

    /// `∂c ⊂ ∂Q`. Every 0-chain qualifies.
    pub fn is_relative_cycle(&self) -> bool {
        self.dim == 0 || self.boundary(true).map(|b| b.is_zero()).unwrap_or(false)
    }

    /// Equality of classes modulo `∂Q`.
    pub fn eq_mod_boundary(&self, other: &RectChain) -> bool {
        (self - other).reduce_rel().is_zero()
    }

    fn check_compatible(&self, other: &RectChain) {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        assert_eq!(self.dim, other.dim, "chain dimension mismatch");
        assert_eq!(self.ring, other.ring, "coefficient ring mismatch");
    }
}

impl Add for &RectChain {
    type Output = RectChain;

    fn add(self, rhs: &RectChain) -> RectChain {
        self.check_compatible(rhs);
        let terms = self
            .terms
            .iter()
            .chain(rhs.terms.iter())
            .map(|(c, &v)| (c.clone(), v));
        RectChain::from_terms_unchecked(self.ambient, self.dim, self.ring, terms)
    }
}

impl Sub for &RectChain {
    type Output = RectChain;

    fn sub(self, rhs: &RectChain) -> RectChain {
        self.check_compatible(rhs);
        let terms = self
            .terms
            .iter()
            .map(|(c, &v)| (c.clone(), v))
            .chain(rhs.terms.iter().map(|(c, &v)| (c.clone(), -v)));
        RectChain::from_terms_unchecked(self.ambient, self.dim, self.ring, terms)
    }
}

impl Neg for &RectChain {
    type Output = RectChain;

    fn neg(self) -> RectChain {
        self.scaled(-1)
    }
}

impl Add for RectChain {
    type Output = RectChain;
    fn add(self, rhs: RectChain) -> RectChain {
        &self + &rhs
    }
}

impl Sub for RectChain {
    type Output = RectChain;
    fn sub(self, rhs: RectChain) -> RectChain {
        &self - &rhs
    }
}

impl Neg for RectChain {
    type Output = RectChain;
    fn neg(self) -> RectChain {
        self.scaled(-1)
    }
}

/// Canonical form of a sum of boxes.
///
/// Cells are grouped by their plane (which axes are pinned, and where). Inside
/// a group the boxes are refined to the grid of all their breakpoints and the
/// coefficients summed per grid slot. Breakpoints across which the coefficient
/// function is continuous are then removed, which leaves the grid of genuine
/// discontinuities: this grid depends only on the coefficient function, so the
/// output is unique.
fn canonicalize<I>(ring: Ring, terms: I) -> BTreeMap<BoxCell, i64>
where
    I: IntoIterator<Item = (BoxCell, i64)>,
{
    let mut groups: HashMap<Vec<Option<Rational>>, Vec<(BoxCell, i64)>> = HashMap::new();
    for (cell, coef) in terms {
        let coef = ring.normalize(coef);
        if coef == 0 {
            continue;
        }
        let key = cell
            .extents()
            .iter()
            .map(|e| match e {
                Extent::Fixed(c) => Some(*c),
                Extent::Interval(..) => None,
            })
            .collect();
        groups.entry(key).or_default().push((cell, coef));
    }

    let mut out = BTreeMap::new();
    for (plane, members) in groups {
        canonicalize_plane(ring, &plane, members, &mut out);
    }
    out
}

fn canonicalize_plane(
    ring: Ring,
    plane: &[Option<Rational>],
    members: Vec<(BoxCell, i64)>,
    out: &mut BTreeMap<BoxCell, i64>,
) {
    let axes: Vec<usize> = plane
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_none())
        .map(|(a, _)| a)
        .collect();

    if axes.is_empty() {
        let total = ring.normalize(members.iter().map(|(_, v)| v).sum());
        if total != 0 {
            out.insert(members[0].0.clone(), total);
        }
        return;
    }
    if members.len() == 1 {
        let (cell, v) = members.into_iter().next().unwrap();
        out.insert(cell, v);
        return;
    }

    let mut breaks: Vec<Vec<Rational>> = axes
        .iter()
        .map(|&a| {
            let mut b: Vec<Rational> = members
                .iter()
                .flat_map(|(c, _)| [*c.extent(a).lo(), *c.extent(a).hi()])
                .collect();
            b.sort_unstable();
            b.dedup();
            b
        })
        .collect();

    let mut slots: HashMap<Vec<u32>, i64> = HashMap::new();
    for (cell, coef) in &members {
        let ranges: Vec<(u32, u32)> = axes
            .iter()
            .zip(&breaks)
            .map(|(&a, b)| {
                let e = cell.extent(a);
                let lo = b.binary_search(e.lo()).unwrap() as u32;
                let hi = b.binary_search(e.hi()).unwrap() as u32;
                (lo, hi)
            })
            .collect();
        let mut idx: Vec<u32> = ranges.iter().map(|r| r.0).collect();
        'odometer: loop {
            *slots.entry(idx.clone()).or_insert(0) += coef;
            for j in 0..idx.len() {
                idx[j] += 1;
                if idx[j] < ranges[j].1 {
                    continue 'odometer;
                }
                idx[j] = ranges[j].0;
            }
            break;
        }
    }
    slots.retain(|_, v| {
        *v = ring.normalize(*v);
        *v != 0
    });

    for j in 0..axes.len() {
        let nbreaks = breaks[j].len();
        let nslots = nbreaks - 1;
        let mut essential = vec![false; nbreaks];
        let mut probe = Vec::new();
        for (key, &v) in &slots {
            let s = key[j] as usize;
            probe.clone_from(key);
            let right = if s + 1 < nslots {
                probe[j] = (s + 1) as u32;
                slots.get(&probe).copied().unwrap_or(0)
            } else {
                0
            };
            if right != v {
                essential[s + 1] = true;
            }
            let left = if s > 0 {
                probe[j] = (s - 1) as u32;
                slots.get(&probe).copied().unwrap_or(0)
            } else {
                0
            };
            if left != v {
                essential[s] = true;
            }
        }
        if essential.iter().all(|&e| e) {
            continue;
        }
        // old slot s -> (#essential breakpoints <= breaks[s]) - 1
        let mut remap = Vec::with_capacity(nslots);
        let mut count: i64 = 0;
        for &e in essential.iter().take(nslots) {
            if e {
                count += 1;
            }
            remap.push(count - 1);
        }
        let mut merged: HashMap<Vec<u32>, i64> = HashMap::with_capacity(slots.len());
        for (mut key, v) in slots.drain() {
            let s = remap[key[j] as usize];
            debug_assert!(s >= 0);
            key[j] = s as u32;
            let prev = merged.insert(key, v);
            debug_assert!(prev.is_none() || prev == Some(v));
        }
        slots = merged;
        breaks[j] = breaks[j]
            .iter()
            .zip(&essential)
            .filter(|(_, &e)| e)
            .map(|(b, _)| *b)
            .collect();
    }

    for (key, v) in slots {
        let mut extents: Vec<Extent> = plane
            .iter()
            .map(|p| match p {
                Some(c) => Extent::Fixed(*c),
                None => Extent::Interval(Rational::zero(), Rational::zero()),
            })
            .collect();
        for (j, &a) in axes.iter().enumerate() {
            let s = key[j] as usize;
            extents[a] = Extent::Interval(breaks[j][s], breaks[j][s + 1]);
        }
        out.insert(BoxCell::from_extents_unchecked(extents), v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn bx(lo: &[(i128, i128)], hi: &[(i128, i128)]) -> BoxCell {
        let lo: Vec<_> = lo.iter().map(|&(p, q)| r(p, q)).collect();
        let hi: Vec<_> = hi.iter().map(|&(p, q)| r(p, q)).collect();
        BoxCell::from_bounds(&lo, &hi).unwrap()
    }

    #[test]
    fn empty_chain_has_zero_volume() {
        assert_eq!(RectChain::zero(2, 1, Ring::Mod2).volume(), r(0, 1));
    }

    #[test]
    fn integer_volume_uses_absolute_coefficients() {
        let seg = bx(&[(0, 1), (1, 4)], &[(1, 2), (1, 4)]);
        let c = RectChain::from_terms(2, 1, Ring::Integer, [(seg, 3)]).unwrap();
        assert_eq!(c.volume(), r(3, 2));
    }

    #[test]
    fn relative_boundary_drops_cube_faces() {
        let b = bx(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]);
        let c = RectChain::from_terms(2, 2, Ring::Mod2, [(b, 1)]).unwrap();
        let d = c.boundary(true).unwrap();
        let expected = RectChain::from_terms(
            2,
            1,
            Ring::Mod2,
            [
                (bx(&[(1, 2), (0, 1)], &[(1, 2), (1, 2)]), 1),
                (bx(&[(0, 1), (1, 2)], &[(1, 2), (1, 2)]), 1),
            ],
        )
        .unwrap();
        assert_eq!(d, expected);
    }

    #[test]
    fn absolute_boundary_of_small_square() {
        let b = bx(&[(1, 4), (1, 4)], &[(1, 2), (1, 2)]);
        let c = RectChain::from_terms(2, 2, Ring::Mod2, [(b, 1)]).unwrap();
        let d = c.boundary(false).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.volume(), r(1, 1));
    }

    #[test]
    fn overlapping_boxes_merge_and_cancel() {
        let a = bx(&[(0, 1), (0, 1)], &[(1, 2), (1, 1)]);
        let b = bx(&[(1, 2), (0, 1)], &[(1, 1), (1, 1)]);
        let c = RectChain::from_terms(2, 2, Ring::Integer, [(a.clone(), 1), (b, 1)]).unwrap();
        assert_eq!(c, RectChain::fundamental(2, Ring::Integer));

        let m = RectChain::from_terms(2, 2, Ring::Mod2, [(a.clone(), 1), (a, 1)]).unwrap();
        assert!(m.is_zero());
    }

    #[test]
    fn overlap_refines_into_unique_pieces() {
        let a = bx(&[(0, 1), (0, 1)], &[(1, 2), (1, 2)]);
        let b = bx(&[(1, 4), (1, 4)], &[(3, 4), (3, 4)]);
        let c = RectChain::from_terms(2, 2, Ring::Mod2, [(a, 1), (b, 1)]).unwrap();
        // symmetric difference of the two squares
        assert_eq!(c.volume(), r(1, 4) + r(1, 4) - r(2, 16));
    }

    #[test]
    fn point_boundary_is_an_error() {
        let p = BoxCell::new(vec![Extent::Fixed(r(1, 2))]).unwrap();
        let c = RectChain::from_terms(1, 0, Ring::Mod2, [(p, 1)]).unwrap();
        assert_eq!(c.boundary(false), Err(ChainError::PointBoundary));
        assert!(c.is_relative_cycle());
    }

    fn arb_box(d: usize, k: usize) -> impl Strategy<Value = BoxCell> {
        (
            proptest::sample::subsequence((0..d).collect::<Vec<_>>(), k),
            proptest::collection::vec((0i128..8, 1i128..8), d),
            proptest::collection::vec(1i128..8, d),
        )
            .prop_map(move |(axes, spans, fixed)| {
                let extents = (0..d)
                    .map(|a| {
                        if axes.contains(&a) {
                            let (lo, len) = spans[a];
                            let lo = lo.min(7);
                            let hi = (lo + len).min(8);
                            let lo = if hi == lo { lo - 1 } else { lo };
                            Extent::Interval(r(lo, 8), r(hi, 8))
                        } else {
                            Extent::Fixed(r(fixed[a], 8))
                        }
                    })
                    .collect();
                BoxCell::new(extents).unwrap()
            })
    }

    fn arb_chain(d: usize, k: usize, ring: Ring) -> impl Strategy<Value = RectChain> {
        proptest::collection::vec((arb_box(d, k), -2i64..3), 0..6).prop_map(move |terms| {
            RectChain::from_terms(d, k, ring, terms).unwrap()
        })
    }

    proptest! {
        #[test]
        fn boundary_of_boundary_vanishes(c in arb_chain(3, 2, Ring::Integer), rel in any::<bool>()) {
            let dd = c.boundary(rel).unwrap().boundary(rel).unwrap();
            prop_assert!(dd.is_zero());
        }

        #[test]
        fn boundary_of_boundary_vanishes_mod2(c in arb_chain(4, 3, Ring::Mod2), rel in any::<bool>()) {
            let dd = c.boundary(rel).unwrap().boundary(rel).unwrap();
            prop_assert!(dd.is_zero());
        }

        #[test]
        fn canonicalization_is_idempotent(c in arb_chain(3, 2, Ring::Mod2)) {
            let again = c.canonical();
            prop_assert_eq!(&again, &c);
            prop_assert_eq!(again.volume(), c.volume());
        }

        #[test]
        fn sum_is_order_independent(a in arb_chain(2, 1, Ring::Integer), b in arb_chain(2, 1, Ring::Integer)) {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert!((&(&a + &b) - &b) == a);
        }
    }
}
