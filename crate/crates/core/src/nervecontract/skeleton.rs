use num_traits::{One, Zero};

use super::{Part, ShiftedPartition};
use crate::chains::Rational;

/// One axis of an elementary cell: a breakpoint or the open gap between two.
#[derive(Clone, Copy)]
enum Piece {
    At(Rational),
    Gap(Rational, Rational),
}

/// `(d - k)`-dimensional measure of the points of `part` that lie in at
/// least `k + 1` closed partition cells and in the interior of the cube.
///
/// In a simple partition this is the codimension-`k` skeleton of the part's
/// cells. Faces inside `∂Q` are left out: clipped slivers put arbitrarily
/// short cells against the cube boundary, and the filling arguments work
/// modulo `∂Q` anyway. For `k = d` the measure counts points.
pub fn skeleton_volume(p: &ShiftedPartition, part: &Part, k: usize) -> Rational {
    let d = p.d();
    assert!(k <= d, "codimension {k} exceeds dimension {d}");
    let mut total = Rational::zero();
    for &c in &part.cells {
        let cell = &p.cells()[c].bounds;
        let local: Vec<usize> = std::iter::once(c)
            .chain(p.neighbors(c).iter().copied())
            .collect();
        let earlier: Vec<usize> = p
            .neighbors(c)
            .iter()
            .copied()
            .filter(|&j| j < c && part.cells.binary_search(&j).is_ok())
            .collect();
        // breakpoints of every nearby cell inside this cell, per axis
        let axes: Vec<Vec<Piece>> = (0..d)
            .map(|a| {
                let own = cell.extent(a);
                let mut marks: Vec<Rational> = local
                    .iter()
                    .flat_map(|&j| {
                        let e = p.cells()[j].bounds.extent(a);
                        [*e.lo(), *e.hi()]
                    })
                    .filter(|x| own.contains(x))
                    .collect();
                marks.sort();
                marks.dedup();
                let mut pieces: Vec<Piece> = marks.iter().map(|&x| Piece::At(x)).collect();
                pieces.extend(marks.windows(2).map(|w| Piece::Gap(w[0], w[1])));
                pieces
            })
            .collect();
        for combo in combos(&axes) {
            let fixed = combo.iter().filter(|x| matches!(x, Piece::At(_))).count();
            if fixed != k {
                continue;
            }
            let point: Vec<Rational> = combo
                .iter()
                .map(|x| match x {
                    Piece::At(v) => *v,
                    Piece::Gap(lo, hi) => (lo + hi) / Rational::from_integer(2),
                })
                .collect();
            if point.iter().any(|x| x.is_zero() || x.is_one()) {
                continue;
            }
            if p.multiplicity_near(c, &point) < k + 1 {
                continue;
            }
            if earlier
                .iter()
                .any(|&j| p.cells()[j].bounds.contains_point(&point))
            {
                continue;
            }
            total += combo
                .iter()
                .map(|x| match x {
                    Piece::At(_) => Rational::one(),
                    Piece::Gap(lo, hi) => hi - lo,
                })
                .fold(Rational::one(), |acc, l| acc * l);
        }
    }
    total
}

fn combos(axes: &[Vec<Piece>]) -> Vec<Vec<Piece>> {
    let mut out = vec![Vec::with_capacity(axes.len())];
    for options in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |x| {
                    let mut v = prefix.clone();
                    v.push(*x);
                    v
                })
            })
            .collect();
    }
    out
}

/// Total `(d - k)`-volume of the codimension-`k` faces of one grid cube of
/// side `1/n`, by listing its `3^d` faces.
pub fn cube_face_volume_direct(d: usize, k: usize, n: usize) -> Rational {
    let side = Rational::new(1, n as i128);
    let mut total = Rational::zero();
    for code in 0..3usize.pow(d as u32) {
        // base-3 digit per axis: 0 bottom, 1 top, 2 spanning
        let spanning = (0..d).filter(|a| code / 3usize.pow(*a as u32) % 3 == 2).count();
        if d - spanning == k {
            total += (0..spanning).fold(Rational::one(), |acc, _| acc * side);
        }
    }
    total
}
