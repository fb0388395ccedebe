//! The economical filling operator for rectilinear relative cycles.
//!
//! For a relative `k`-cycle `z` the filling sweeps along one axis `a`: cut `z`
//! at a generic level `x_a = t` into `z0` (below) and `z1` (above), fill the
//! section `z_t` inside the slice cube recursively, and set
//!
//! ```text
//! H(z) = I_0(z0) + I_1(z1) - H(z_t) x [0,1]
//! ```
//!
//! where `I_0`, `I_1` sweep a chain onto the facets `x_a = 0` and `x_a = 1`.
//! The level `t` is taken in the slab of smallest section volume, so
//! `‖z_t‖ <= ‖z‖_∥` and by induction `‖H(z)‖ <= ‖z‖`.

use num_traits::{One, Zero};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{BoxCell, Extent, FillError, Rational, RectChain, Ring};

/// Which facet a cone sweeps onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// `I_0`: onto `x_a = 0`.
    Lower,
    /// `I_1`: onto `x_a = 1`.
    Upper,
}

/// How the sweep axis is chosen at each level of the recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AxisRule {
    /// Lowest-numbered axis still available.
    #[default]
    First,
    /// Available axis with the largest volume orthogonal to it.
    MaxPerpendicular,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FillOptions {
    pub axis_rule: AxisRule,
}

/// One slab between consecutive breakpoints of a chain along an axis, with
/// the (constant) volume of the section through it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slab {
    pub lo: Rational,
    pub hi: Rational,
    pub volume: Rational,
}

impl Slab {
    pub fn midpoint(&self) -> Rational {
        (self.lo + self.hi) / Rational::from_integer(2)
    }
}

/// Result of cutting a chain at `x_a = t`.
#[derive(Clone, Debug)]
pub struct Section {
    /// `z_t`, a `(k-1)`-chain pinned at `x_a = t`.
    pub slice: RectChain,
    /// `z0`, supported in `x_a <= t`.
    pub lower: RectChain,
    /// `z1`, supported in `x_a >= t`.
    pub upper: RectChain,
}

fn check_axis(c: &RectChain, axis: usize) -> Result<(), FillError> {
    if axis >= c.ambient_dim() {
        return Err(FillError::BadAxis {
            axis,
            d: c.ambient_dim(),
        });
    }
    Ok(())
}

/// `(-1)^p` with `p` the number of interval axes of `cell` below `axis`.
fn orientation(cell: &BoxCell, axis: usize, ring: Ring) -> i64 {
    match ring {
        Ring::Mod2 => 1,
        Ring::Integer => {
            if cell.interval_axes().filter(|&b| b < axis).count() % 2 == 0 {
                1
            } else {
                -1
            }
        }
    }
}

/// Section volume as a function of `x_a`, slab by slab.
pub fn section_profile(z: &RectChain, axis: usize) -> Vec<Slab> {
    let mut breaks = vec![Rational::zero(), Rational::one()];
    for (cell, _) in z.terms() {
        let e = cell.extent(axis);
        breaks.push(*e.lo());
        breaks.push(*e.hi());
    }
    breaks.sort_unstable();
    breaks.dedup();

    let mut slabs: Vec<Slab> = breaks
        .windows(2)
        .map(|w| Slab {
            lo: w[0],
            hi: w[1],
            volume: Rational::zero(),
        })
        .collect();
    for (cell, coef) in z.terms() {
        if let Extent::Interval(lo, hi) = cell.extent(axis) {
            let cross = cell.volume() / (hi - lo) * Rational::from_integer(coef.abs() as i128);
            for s in slabs.iter_mut().filter(|s| s.lo >= *lo && s.hi <= *hi) {
                s.volume += cross;
            }
        }
    }
    slabs
}

/// Cuts `z` at the generic level `x_axis = t`.
pub fn section_and_split(z: &RectChain, axis: usize, t: Rational) -> Result<Section, FillError> {
    check_axis(z, axis)?;
    if z.dim() == 0 {
        return Err(FillError::PointSection);
    }
    let non_generic = || FillError::NonGenericSection {
        axis,
        t: super::fmt_rational(&t),
    };
    if t <= Rational::zero() || t >= Rational::one() {
        return Err(non_generic());
    }
    let (d, k, ring) = (z.ambient_dim(), z.dim(), z.ring());
    let mut slice = Vec::new();
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (cell, coef) in z.terms() {
        match cell.extent(axis) {
            Extent::Fixed(c) => {
                if *c == t {
                    return Err(non_generic());
                }
                if *c < t {
                    lower.push((cell.clone(), coef));
                } else {
                    upper.push((cell.clone(), coef));
                }
            }
            Extent::Interval(lo, hi) => {
                if *lo == t || *hi == t {
                    return Err(non_generic());
                }
                if *hi < t {
                    lower.push((cell.clone(), coef));
                } else if *lo > t {
                    upper.push((cell.clone(), coef));
                } else {
                    lower.push((cell.with_extent(axis, Extent::Interval(*lo, t)), coef));
                    upper.push((cell.with_extent(axis, Extent::Interval(t, *hi)), coef));
                    let sign = orientation(cell, axis, ring);
                    slice.push((cell.with_extent(axis, Extent::Fixed(t)), sign * coef));
                }
            }
        }
    }
    Ok(Section {
        slice: RectChain::from_terms_unchecked(d, k - 1, ring, slice),
        lower: RectChain::from_terms_unchecked(d, k, ring, lower),
        upper: RectChain::from_terms_unchecked(d, k, ring, upper),
    })
}

/// Sweeps `y` onto a facet of the cube along `axis`.
///
/// A cell pinned at `x_a = c` becomes the box spanning `[0, c]` (lower) or
/// `[c, 1]` (upper); cells already spanning `axis` sweep to zero volume and
/// are dropped. In the integer ring both cones satisfy
/// `∂I(y) = y - I(∂y)` modulo `∂Q`; modulo 2 the signs disappear.
pub fn cone_project(y: &RectChain, axis: usize, side: Side) -> Result<RectChain, FillError> {
    check_axis(y, axis)?;
    let ring = y.ring();
    let mut out = Vec::with_capacity(y.len());
    for (cell, coef) in y.terms() {
        let e = cell.extent(axis);
        let touches = match side {
            Side::Lower => e.hi().is_one(),
            Side::Upper => e.lo().is_zero(),
        };
        if touches {
            return Err(FillError::TouchesOppositeFacet { axis, side });
        }
        let Extent::Fixed(c) = e else { continue };
        let sign = orientation(cell, axis, ring);
        match side {
            Side::Lower if c.is_zero() => {}
            Side::Upper if c.is_one() => {}
            Side::Lower => out.push((
                cell.with_extent(axis, Extent::Interval(Rational::zero(), *c)),
                sign * coef,
            )),
            Side::Upper => out.push((
                cell.with_extent(axis, Extent::Interval(*c, Rational::one())),
                -sign * coef,
            )),
        }
    }
    Ok(RectChain::from_terms_unchecked(
        y.ambient_dim(),
        y.dim() + 1,
        ring,
        out,
    ))
}

/// Product with the full interval along `axis`: `u x [0,1]`.
pub fn extrude(u: &RectChain, axis: usize) -> RectChain {
    let ring = u.ring();
    let out = u.terms().filter_map(|(cell, coef)| match cell.extent(axis) {
        Extent::Fixed(_) => Some((
            cell.with_extent(axis, Extent::Interval(Rational::zero(), Rational::one())),
            orientation(cell, axis, ring) * coef,
        )),
        Extent::Interval(..) => None,
    });
    RectChain::from_terms_unchecked(u.ambient_dim(), u.dim() + 1, ring, out)
}

/// Fills a relative cycle with default options.
pub fn fill(z: &RectChain) -> Result<RectChain, FillError> {
    fill_with(z, &FillOptions::default())
}

/// `H(z)` with `∂H(z) = z (mod ∂Q)` and `‖H(z)‖ <= ‖z‖`.
pub fn fill_with(z: &RectChain, opts: &FillOptions) -> Result<RectChain, FillError> {
    let (d, k) = (z.ambient_dim(), z.dim());
    if k >= d {
        return Err(FillError::DimensionTooHigh { k, d });
    }
    if !z.is_relative_cycle() {
        return Err(FillError::NotRelativeCycle);
    }
    let axes: Vec<usize> = (0..d).collect();
    Ok(fill_rec(&z.reduce_rel(), &axes, opts))
}

fn perpendicular_volume(z: &RectChain, axis: usize) -> Rational {
    z.terms()
        .filter(|(c, _)| !c.extent(axis).is_interval())
        .map(|(c, v)| c.volume() * Rational::from_integer(v.abs() as i128))
        .fold(Rational::zero(), |a, b| a + b)
}

fn fill_rec(z: &RectChain, axes: &[usize], opts: &FillOptions) -> RectChain {
    let (d, k, ring) = (z.ambient_dim(), z.dim(), z.ring());
    if z.is_zero() {
        return RectChain::zero(d, k + 1, ring);
    }
    let axis = match opts.axis_rule {
        AxisRule::First => axes[0],
        AxisRule::MaxPerpendicular => {
            let mut best = axes[0];
            let mut best_vol = perpendicular_volume(z, best);
            for &a in &axes[1..] {
                let v = perpendicular_volume(z, a);
                if v > best_vol {
                    best = a;
                    best_vol = v;
                }
            }
            best
        }
    };
    let rest: Vec<usize> = axes.iter().copied().filter(|&a| a != axis).collect();

    if k == 0 {
        // Each point goes to the nearer facet.
        let half = Rational::new(1, 2);
        let (near0, near1): (Vec<_>, Vec<_>) = z
            .terms()
            .map(|(c, v)| (c.clone(), v))
            .partition(|(c, _)| *c.extent(axis).lo() <= half);
        let near0 = RectChain::from_terms_unchecked(d, 0, ring, near0);
        let near1 = RectChain::from_terms_unchecked(d, 0, ring, near1);
        let h0 = cone_project(&near0, axis, Side::Lower).expect("points below 1/2");
        let h1 = cone_project(&near1, axis, Side::Upper).expect("points above 1/2");
        return &h0 + &h1;
    }

    let profile = section_profile(z, axis);
    let slab = profile
        .iter()
        .min_by(|a, b| a.volume.cmp(&b.volume).then(a.lo.cmp(&b.lo)))
        .expect("profile covers [0,1]");
    let t = slab.midpoint();
    let sec = section_and_split(z, axis, t).expect("slab midpoints are generic");
    let filled_slice = fill_rec(&sec.slice, &rest, opts);
    let h0 = cone_project(&sec.lower, axis, Side::Lower).expect("lower part stays below t");
    let h1 = cone_project(&sec.upper, axis, Side::Upper).expect("upper part stays above t");
    &(&h0 + &h1) - &extrude(&filled_slice, axis)
}

const DENOMINATORS: [i128; 7] = [2, 3, 4, 5, 6, 8, 12];

/// Relative boundary of a random `(k+1)`-chain of `size` boxes; a relative
/// `k`-cycle by construction. Deterministic per seed.
pub fn random_relative_cycle(seed: u64, d: usize, k: usize, size: usize, ring: Ring) -> RectChain {
    assert!(k < d, "need k < d");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::with_capacity(size);
    for _ in 0..size {
        let q = DENOMINATORS[rng.gen_range(0..DENOMINATORS.len())];
        let spanning = sample(&mut rng, d, k + 1).into_vec();
        let extents = (0..d)
            .map(|a| {
                if spanning.contains(&a) {
                    let lo = rng.gen_range(0..q);
                    let hi = rng.gen_range(lo + 1..=q);
                    Extent::Interval(Rational::new(lo, q), Rational::new(hi, q))
                } else {
                    Extent::Fixed(Rational::new(rng.gen_range(1..q), q))
                }
            })
            .collect();
        let coef = match ring {
            Ring::Mod2 => 1,
            Ring::Integer => *[-2i64, -1, 1, 2].get(rng.gen_range(0..4)).unwrap(),
        };
        terms.push((BoxCell::from_extents_unchecked(extents), coef));
    }
    let body = RectChain::from_terms_unchecked(d, k + 1, ring, terms);
    body.boundary(true).expect("k + 1 >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::{any, prop_assert, prop_assert_eq, proptest};

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn chain(d: usize, k: usize, ring: Ring, cells: Vec<Vec<Extent>>) -> RectChain {
        RectChain::from_terms(
            d,
            k,
            ring,
            cells.into_iter().map(|e| (BoxCell::new(e).unwrap(), 1)),
        )
        .unwrap()
    }

    fn iv(lo: (i128, i128), hi: (i128, i128)) -> Extent {
        Extent::Interval(r(lo.0, lo.1), r(hi.0, hi.1))
    }

    fn fx(c: (i128, i128)) -> Extent {
        Extent::Fixed(r(c.0, c.1))
    }

    fn vertical_third() -> RectChain {
        chain(2, 1, Ring::Mod2, vec![vec![fx((1, 3)), iv((0, 1), (1, 1))]])
    }

    #[test]
    fn section_missing_every_cell() {
        let z = vertical_third();
        let s = section_and_split(&z, 0, r(1, 6)).unwrap();
        assert!(s.slice.is_zero());
        assert!(s.lower.is_zero());
        assert_eq!(s.upper, z);
    }

    #[test]
    fn section_splits_crossing_segment() {
        let z = chain(2, 1, Ring::Mod2, vec![vec![iv((0, 1), (1, 1)), fx((1, 2))]]);
        let s = section_and_split(&z, 0, r(1, 3)).unwrap();
        assert_eq!(
            s.slice,
            chain(2, 0, Ring::Mod2, vec![vec![fx((1, 3)), fx((1, 2))]])
        );
        assert_eq!(
            s.lower,
            chain(2, 1, Ring::Mod2, vec![vec![iv((0, 1), (1, 3)), fx((1, 2))]])
        );
        assert_eq!(
            s.upper,
            chain(2, 1, Ring::Mod2, vec![vec![iv((1, 3), (1, 1)), fx((1, 2))]])
        );
    }

    #[test]
    fn section_rejects_breakpoints() {
        let z = vertical_third();
        assert!(matches!(
            section_and_split(&z, 0, r(1, 3)),
            Err(FillError::NonGenericSection { .. })
        ));
        assert!(section_and_split(&z, 1, r(1, 1)).is_err());
    }

    #[test]
    fn sweep_profile_integrates_to_parallel_volume() {
        let square = chain(
            2,
            2,
            Ring::Mod2,
            vec![vec![iv((1, 4), (1, 2)), iv((1, 4), (1, 2))]],
        );
        let z = square.boundary(false).unwrap();
        let profile = section_profile(&z, 0);
        let integral = profile
            .iter()
            .fold(Rational::zero(), |a, s| a + s.volume * (s.hi - s.lo));
        assert_eq!(integral, r(1, 2));
        let nonempty: Vec<_> = profile.iter().filter(|s| !s.volume.is_zero()).collect();
        assert_eq!(nonempty.len(), 1);
        assert_eq!(nonempty[0].hi - nonempty[0].lo, r(1, 4));
        assert_eq!(nonempty[0].volume, r(2, 1));
    }

    #[test]
    fn cones_of_vertical_segment() {
        let y = vertical_third();
        let up = cone_project(&y, 0, Side::Upper).unwrap();
        assert_eq!(
            up,
            chain(2, 2, Ring::Mod2, vec![vec![iv((1, 3), (1, 1)), iv((0, 1), (1, 1))]])
        );
        assert_eq!(up.volume(), r(2, 3));
        let down = cone_project(&y, 0, Side::Lower).unwrap();
        assert_eq!(down.volume(), r(1, 3));
    }

    #[test]
    fn cone_rejects_opposite_facet() {
        let y = chain(2, 1, Ring::Mod2, vec![vec![iv((1, 2), (1, 1)), fx((1, 2))]]);
        assert!(cone_project(&y, 0, Side::Lower).is_err());
        assert!(cone_project(&y, 0, Side::Upper).is_ok());
    }

    #[test]
    fn fill_zero_is_zero() {
        let z = RectChain::zero(3, 1, Ring::Mod2);
        let h = fill(&z).unwrap();
        assert!(h.is_zero());
        assert_eq!(h.dim(), 2);
    }

    #[test]
    fn fill_vertical_segment_sweeps_right() {
        let h = fill(&vertical_third()).unwrap();
        assert_eq!(
            h,
            chain(2, 2, Ring::Mod2, vec![vec![iv((1, 3), (1, 1)), iv((0, 1), (1, 1))]])
        );
        assert_eq!(h.volume(), r(2, 3));
    }

    #[test]
    fn fill_square_boundary_recovers_square() {
        let square = chain(
            2,
            2,
            Ring::Mod2,
            vec![vec![iv((1, 4), (1, 2)), iv((1, 4), (1, 2))]],
        );
        let z = square.boundary(true).unwrap();
        assert_eq!(z.volume(), r(1, 1));
        let h = fill(&z).unwrap();
        assert_eq!(h, square);
        assert_eq!(h.volume(), r(1, 16));
    }

    #[test]
    fn fill_rejects_non_cycles_and_top_dimension() {
        let seg = chain(2, 1, Ring::Mod2, vec![vec![iv((1, 4), (1, 2)), fx((1, 2))]]);
        assert_eq!(fill(&seg), Err(FillError::NotRelativeCycle));
        let q = RectChain::fundamental(2, Ring::Mod2);
        assert!(matches!(fill(&q), Err(FillError::DimensionTooHigh { .. })));
    }

    #[test]
    fn points_fill_to_nearest_facet() {
        let z = chain(1, 0, Ring::Mod2, vec![vec![fx((1, 4))], vec![fx((5, 6))]]);
        let h = fill(&z).unwrap();
        assert_eq!(h.volume(), r(1, 4) + r(1, 6));
        assert!(h.boundary(true).unwrap().eq_mod_boundary(&z));
    }

    #[test]
    fn generator_is_deterministic_and_varied() {
        let a = random_relative_cycle(1, 2, 1, 1, Ring::Mod2);
        let b = random_relative_cycle(1, 2, 1, 1, Ring::Mod2);
        assert_eq!(a, b);
        assert!(a.is_relative_cycle());
        let mut seen = std::collections::HashSet::new();
        for seed in 0..100 {
            let c = random_relative_cycle(seed, 2, 1, 2, Ring::Mod2);
            seen.insert(super::super::dump_chain(&c));
        }
        assert!(seen.len() >= 90, "only {} distinct", seen.len());
    }

    /// Random chain whose cells stay off every facet.
    fn interior_chain(seed: u64, d: usize, k: usize, ring: Ring) -> RectChain {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let terms: Vec<_> = (0..3)
            .map(|_| {
                let q = 10;
                let spanning = sample(&mut rng, d, k).into_vec();
                let extents = (0..d)
                    .map(|a| {
                        if spanning.contains(&a) {
                            let lo = rng.gen_range(1..q - 1);
                            let hi = rng.gen_range(lo + 1..q);
                            Extent::Interval(r(lo, q), r(hi, q))
                        } else {
                            Extent::Fixed(r(rng.gen_range(1..q), q))
                        }
                    })
                    .collect();
                (BoxCell::new(extents).unwrap(), rng.gen_range(1..3))
            })
            .collect();
        RectChain::from_terms(d, k, ring, terms).unwrap()
    }

    fn check_cone_identity(y: &RectChain, axis: usize, side: Side) {
        let iy = cone_project(y, axis, side).unwrap();
        assert!(iy.volume() <= y.volume());
        let lhs = iy.boundary(true).unwrap();
        let rhs = if y.dim() == 0 {
            y.clone()
        } else {
            let idy = cone_project(&y.boundary(false).unwrap(), axis, side).unwrap();
            y - &idy
        };
        assert!(lhs.eq_mod_boundary(&rhs));
    }

    #[test]
    fn cone_identities_on_random_segments() {
        for seed in 0..100u64 {
            for ring in [Ring::Mod2, Ring::Integer] {
                let y = interior_chain(seed, 3, (seed % 3) as usize, ring);
                for axis in 0..3 {
                    check_cone_identity(&y, axis, Side::Lower);
                    check_cone_identity(&y, axis, Side::Upper);
                    let diff = &cone_project(&y, axis, Side::Lower).unwrap()
                        - &cone_project(&y, axis, Side::Upper).unwrap();
                    assert_eq!(diff, extrude(&y, axis));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn fill_contract_holds(seed in any::<u64>(), d in 2usize..5, size in 1usize..4, int in any::<bool>()) {
            let ring = if int { Ring::Integer } else { Ring::Mod2 };
            let k = (seed as usize) % d;
            let z = random_relative_cycle(seed, d, k, size, ring);
            let h = fill(&z).unwrap();
            prop_assert!(h.boundary(true).unwrap().eq_mod_boundary(&z));
            prop_assert!(h.volume() <= z.volume());
        }

        #[test]
        fn fill_is_odd(seed in any::<u64>(), size in 1usize..4) {
            let z = random_relative_cycle(seed, 3, 1, size, Ring::Integer);
            prop_assert_eq!(fill(&(-&z)).unwrap(), -&fill(&z).unwrap());
        }

        #[test]
        fn split_preserves_volume(seed in any::<u64>(), num in 1i128..97) {
            let z = random_relative_cycle(seed, 3, 2, 2, Ring::Mod2);
            // denominators of generated cells divide 120; 97 is prime
            let t = Rational::new(num, 97);
            let s = section_and_split(&z, 0, t).unwrap();
            prop_assert_eq!(s.lower.volume() + s.upper.volume(), z.volume());
            prop_assert!(s.lower.boundary(true).unwrap().eq_mod_boundary(&s.slice));
            prop_assert!(s.upper.boundary(true).unwrap().eq_mod_boundary(&(-&s.slice)));
        }

        #[test]
        fn max_perpendicular_rule_also_fills(seed in any::<u64>()) {
            let z = random_relative_cycle(seed, 3, 1, 3, Ring::Integer);
            let opts = FillOptions { axis_rule: AxisRule::MaxPerpendicular };
            let h = fill_with(&z, &opts).unwrap();
            prop_assert!(h.boundary(true).unwrap().eq_mod_boundary(&z));
            prop_assert!(h.volume() <= z.volume());
        }
    }
}
