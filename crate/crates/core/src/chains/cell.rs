use std::fmt;

use num_traits::{One, Zero};

use super::{ChainError, Rational};

/// Extent of a box along one axis.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extent {
    Fixed(Rational),
    Interval(Rational, Rational),
}

impl Extent {
    pub fn lo(&self) -> &Rational {
        match self {
            Extent::Fixed(c) => c,
            Extent::Interval(lo, _) => lo,
        }
    }

    pub fn hi(&self) -> &Rational {
        match self {
            Extent::Fixed(c) => c,
            Extent::Interval(_, hi) => hi,
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Extent::Interval(..))
    }

    pub fn length(&self) -> Rational {
        self.hi() - self.lo()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lo() <= x && x <= self.hi()
    }

    /// Closed intersection, collapsing to `Fixed` when the overlap is a point.
    pub fn intersect(&self, other: &Extent) -> Option<Extent> {
        let lo = self.lo().max(other.lo());
        let hi = self.hi().min(other.hi());
        match lo.cmp(hi) {
            std::cmp::Ordering::Greater => None,
            std::cmp::Ordering::Equal => Some(Extent::Fixed(*lo)),
            std::cmp::Ordering::Less => Some(Extent::Interval(*lo, *hi)),
        }
    }
}

/// An axis-aligned box in `[0,1]^d`: every axis is either pinned to a value or
/// spans a nondegenerate interval. Its dimension is the number of spanning axes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoxCell {
    extents: Vec<Extent>,
}

impl BoxCell {
    pub fn new(extents: Vec<Extent>) -> Result<Self, ChainError> {
        let zero = Rational::zero();
        let one = Rational::one();
        for (axis, e) in extents.iter().enumerate() {
            match e {
                Extent::Fixed(c) if *c < zero || *c > one => {
                    return Err(ChainError::OutOfCube { axis })
                }
                Extent::Interval(lo, hi) if lo >= hi => {
                    return Err(ChainError::EmptyInterval { axis })
                }
                Extent::Interval(lo, hi) if *lo < zero || *hi > one => {
                    return Err(ChainError::OutOfCube { axis })
                }
                _ => {}
            }
        }
        Ok(BoxCell { extents })
    }

    /// Builds a box from per-axis bounds; axes with `lo == hi` become fixed.
    pub fn from_bounds(lo: &[Rational], hi: &[Rational]) -> Result<Self, ChainError> {
        let extents = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| {
                if l == h {
                    Extent::Fixed(*l)
                } else {
                    Extent::Interval(*l, *h)
                }
            })
            .collect();
        BoxCell::new(extents)
    }

    /// The full cube `[0,1]^d`.
    pub fn unit_cube(d: usize) -> Self {
        BoxCell {
            extents: vec![Extent::Interval(Rational::zero(), Rational::one()); d],
        }
    }

    pub(crate) fn from_extents_unchecked(extents: Vec<Extent>) -> Self {
        BoxCell { extents }
    }

    pub fn extents(&self) -> &[Extent] {
        &self.extents
    }

    pub fn extent(&self, axis: usize) -> &Extent {
        &self.extents[axis]
    }

    pub fn ambient_dim(&self) -> usize {
        self.extents.len()
    }

    pub fn dim(&self) -> usize {
        self.extents.iter().filter(|e| e.is_interval()).count()
    }

    pub fn interval_axes(&self) -> impl Iterator<Item = usize> + '_ {
        self.extents
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_interval())
            .map(|(a, _)| a)
    }

    /// `dim`-dimensional volume: the product of interval lengths.
    pub fn volume(&self) -> Rational {
        self.extents
            .iter()
            .filter(|e| e.is_interval())
            .fold(Rational::one(), |acc, e| acc * e.length())
    }

    /// True when the cell lies inside a facet of the cube.
    pub fn in_cube_boundary(&self) -> bool {
        self.extents.iter().any(|e| match e {
            Extent::Fixed(c) => c.is_zero() || c.is_one(),
            Extent::Interval(..) => false,
        })
    }

    pub(crate) fn with_extent(&self, axis: usize, extent: Extent) -> BoxCell {
        let mut extents = self.extents.clone();
        extents[axis] = extent;
        BoxCell { extents }
    }

    /// Closed intersection of two boxes (possibly lower-dimensional).
    pub fn intersect(&self, other: &BoxCell) -> Option<BoxCell> {
        let extents = self
            .extents
            .iter()
            .zip(&other.extents)
            .map(|(a, b)| a.intersect(b))
            .collect::<Option<Vec<_>>>()?;
        Some(BoxCell { extents })
    }

    pub fn intersects(&self, other: &BoxCell) -> bool {
        self.extents
            .iter()
            .zip(&other.extents)
            .all(|(a, b)| a.lo() <= b.hi() && b.lo() <= a.hi())
    }

    /// Interiors (relative to `R^d`) overlap.
    pub fn interiors_overlap(&self, other: &BoxCell) -> bool {
        self.extents
            .iter()
            .zip(&other.extents)
            .all(|(a, b)| a.lo() < b.hi() && b.lo() < a.hi())
    }

    pub fn contains_point(&self, p: &[Rational]) -> bool {
        self.extents.iter().zip(p).all(|(e, x)| e.contains(x))
    }

    pub fn center(&self) -> Vec<Rational> {
        let two = Rational::from_integer(2);
        self.extents
            .iter()
            .map(|e| (e.lo() + e.hi()) / two)
            .collect()
    }
}

impl fmt::Display for BoxCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.extents.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match e {
                Extent::Fixed(c) => write!(f, "F {}", fmt_rational(c))?,
                Extent::Interval(lo, hi) => {
                    write!(f, "I {} {}", fmt_rational(lo), fmt_rational(hi))?
                }
            }
        }
        Ok(())
    }
}

/// Always `p/q`, including integers (`1/1`).
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i128 = p.trim().parse().ok()?;
            let q: i128 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.trim().parse::<i128>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn rejects_degenerate_and_outside() {
        assert!(BoxCell::new(vec![Extent::Interval(r(1, 2), r(1, 2))]).is_err());
        assert!(BoxCell::new(vec![Extent::Interval(r(1, 2), r(3, 2))]).is_err());
        assert!(BoxCell::new(vec![Extent::Fixed(r(-1, 2))]).is_err());
    }

    #[test]
    fn volume_is_product_of_lengths() {
        let c = BoxCell::new(vec![
            Extent::Interval(r(0, 1), r(1, 3)),
            Extent::Interval(r(0, 1), r(1, 1)),
        ])
        .unwrap();
        assert_eq!(c.volume(), r(1, 3));
        assert_eq!(c.dim(), 2);
        let p = BoxCell::new(vec![Extent::Fixed(r(1, 3)), Extent::Fixed(r(1, 2))]).unwrap();
        assert_eq!(p.volume(), r(1, 1));
    }

    #[test]
    fn intersection_collapses_to_faces() {
        let a = BoxCell::from_bounds(&[r(0, 1), r(0, 1)], &[r(1, 2), r(1, 2)]).unwrap();
        let b = BoxCell::from_bounds(&[r(1, 2), r(1, 4)], &[r(1, 1), r(1, 1)]).unwrap();
        let i = a.intersect(&b).unwrap();
        assert_eq!(i.dim(), 1);
        assert_eq!(i.volume(), r(1, 4));
        assert!(!a.interiors_overlap(&b));
    }

    #[test]
    fn rational_text_round_trip() {
        assert_eq!(parse_rational("3/6"), Some(r(1, 2)));
        assert_eq!(parse_rational("2"), Some(r(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(fmt_rational(&r(2, 4)), "1/2");
        assert_eq!(fmt_rational(&r(1, 1)), "1/1");
    }
}
