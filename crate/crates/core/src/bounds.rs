//! The explicit constants of the waist-type bound, evaluated exactly.
//!
//! * `g(d,k) = C(d,k) 2^(2k-1)` bounds the codimension-`k` skeleton of a part
//!   of the shifted partition by `g(d,k) ‖C_i‖ n^k`.
//! * `h(d,1) = (m+1)! C(d,m) 2^(2m-1)` is the large-`n` limit of the
//!   contraction volume per unit `α`; `f = 1/h` up to an unspecified `O(1/n)`.
//! * The coefficient `((m+1)! C(d,m) 4^m)^-1` is half of `1/h`; both are
//!   reported and the mismatch is flagged.

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::chains::Rational;
use crate::exact::Exact;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("need 0 <= m < d, got d = {d}, m = {m}")]
    MOutOfRange { d: usize, m: usize },
    #[error("need 0 <= k <= d, got d = {d}, k = {k}")]
    KOutOfRange { d: usize, k: usize },
}

pub(crate) fn factorial(k: usize) -> Rational {
    (1..=k as i128).fold(Rational::one(), |a, i| a * Rational::from_integer(i))
}

fn binomial(d: usize, k: usize) -> Rational {
    let mut c = Rational::one();
    for i in 0..k {
        c = c * Rational::from_integer((d - i) as i128) / Rational::from_integer(i as i128 + 1);
    }
    c
}

pub(crate) fn pow(base: Rational, exp: i64) -> Rational {
    if exp >= 0 {
        (0..exp).fold(Rational::one(), |a, _| a * base)
    } else {
        Rational::one() / pow(base, -exp)
    }
}

/// `g(d,k) = C(d,k) 2^(2k-1)`.
pub fn g(d: usize, k: usize) -> Result<Rational, BoundsError> {
    if k > d {
        return Err(BoundsError::KOutOfRange { d, k });
    }
    Ok(binomial(d, k) * pow(Rational::from_integer(2), 2 * k as i64 - 1))
}

/// `C(d,k) 2^k n^(k-d)`: total `(d-k)`-volume of the codimension-`k` faces
/// of one grid cube of side `1/n`.
pub fn cube_face_volume(d: usize, k: usize, n: u64) -> Rational {
    binomial(d, k)
        * pow(Rational::from_integer(2), k as i64)
        * pow(Rational::from_integer(n as i128), k as i64 - d as i64)
}

/// `n^(d-1) - d^2 n^(d-2)`, the two-color lower bound from prior work.
pub fn prior_two_color(d: usize, n: u64) -> Rational {
    let n = Rational::from_integer(n as i128);
    let d_sq = Rational::from_integer((d * d) as i128);
    pow(n, d as i64 - 1) - d_sq * pow(n, d as i64 - 2)
}

/// `Σ_{k=1..m} (k+1)! g(d,k) n^(k-m)`: the contraction-volume bound per unit
/// `α` obtained by unrolling the rectilinear recursion from `S(·,m+1) = 0`.
pub fn h_unrolled(d: usize, m: usize, n: u64) -> Rational {
    let n = Rational::from_integer(n as i128);
    (1..=m).fold(Rational::zero(), |acc, k| {
        acc + factorial(k + 1) * g(d, k).expect("k <= m < d") * pow(n, k as i64 - m as i64)
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsTable {
    pub d: usize,
    pub m: usize,
    /// `None` stands for `n = ∞`.
    pub n: Option<u64>,
    /// `(h_eq4)^-1`, valid only asymptotically.
    pub f_eq5: Rational,
    pub f_remark: Rational,
    /// `g(d,k)` for `k = 0..=d`.
    pub g: Vec<Rational>,
    pub h_eq4: Rational,
    pub h_unrolled: Option<Rational>,
    /// `1 + h_eq4`; approximate, from `‖X_i‖ <= ‖C_i‖ + h α`.
    pub f_bar: Rational,
    pub prior_2color: Option<Rational>,
    /// `f_eq5` drops an unspecified `O(1/n)` term.
    pub asymptotic: bool,
    pub remark_discrepancy: bool,
}

pub fn bound_table(d: usize, m: usize, n: Option<u64>) -> Result<BoundsTable, BoundsError> {
    if m >= d {
        return Err(BoundsError::MOutOfRange { d, m });
    }
    let two = Rational::from_integer(2);
    let h_eq4 = factorial(m + 1) * binomial(d, m) * pow(two, 2 * m as i64 - 1);
    let f_remark =
        Rational::one() / (factorial(m + 1) * binomial(d, m) * pow(Rational::from_integer(4), m as i64));
    let f_eq5 = Rational::one() / h_eq4;
    Ok(BoundsTable {
        d,
        m,
        n,
        f_eq5,
        f_remark,
        g: (0..=d).map(|k| g(d, k).unwrap()).collect(),
        h_eq4,
        h_unrolled: n.map(|n| h_unrolled(d, m, n)),
        f_bar: Rational::one() + h_eq4,
        prior_2color: n.map(|n| prior_two_color(d, n)),
        asymptotic: true,
        remark_discrepancy: f_remark != f_eq5,
    })
}

impl BoundsTable {
    /// Size guaranteed by the asymptotic coefficient: `f_eq5 n^(d-m)`.
    pub fn asymptotic_size(&self, n: u64) -> Rational {
        self.f_eq5 * pow(Rational::from_integer(n as i128), (self.d - self.m) as i64)
    }

    /// Smallest `α = max_i ‖C_i‖ n^m` compatible with some `‖X_i‖ >= 1`:
    /// `1 / (n^-m + h_unrolled(n))`.
    pub fn alpha_floor(&self) -> Option<Rational> {
        let n = self.n?;
        let h = self.h_unrolled?;
        let base = pow(Rational::from_integer(n as i128), -(self.m as i64));
        Some(Rational::one() / (base + h))
    }

    pub fn to_json(&self) -> BoundsJson {
        BoundsJson {
            d: self.d,
            m: self.m,
            n: self.n,
            f_eq5: self.f_eq5.into(),
            f_remark: self.f_remark.into(),
            g: self.g.iter().map(Exact::from).collect(),
            h_eq4: self.h_eq4.into(),
            h_unrolled: self.h_unrolled.map(Exact::from),
            f_bar: self.f_bar.into(),
            f_bar_approximate: true,
            prior_2color: self.prior_2color.map(Exact::from),
            asymptotic: self.asymptotic,
            remark_discrepancy: self.remark_discrepancy,
        }
    }

    /// Aligned plain-text rendering.
    pub fn to_text(&self) -> String {
        let n = self.n.map_or("inf".to_string(), |n| n.to_string());
        let mut rows: Vec<(String, String)> = vec![
            ("d".into(), self.d.to_string()),
            ("m".into(), self.m.to_string()),
            ("n".into(), n),
            ("f_eq5 (asymptotic)".into(), show(&self.f_eq5)),
            ("f_remark".into(), show(&self.f_remark)),
            ("h_eq4".into(), show(&self.h_eq4)),
        ];
        if let Some(h) = &self.h_unrolled {
            rows.push(("h_unrolled(n)".into(), show(h)));
        }
        rows.push(("f_bar (approx)".into(), show(&self.f_bar)));
        for (k, g) in self.g.iter().enumerate() {
            rows.push((format!("g(d,{k})"), show(g)));
        }
        if let Some(p) = &self.prior_2color {
            rows.push(("prior_2color".into(), show(p)));
        }
        rows.push(("remark_discrepancy".into(), self.remark_discrepancy.to_string()));
        let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        rows.iter()
            .map(|(k, v)| format!("{k:<width$}  {v}\n"))
            .collect()
    }
}

fn show(r: &Rational) -> String {
    let e = Exact::from(r);
    format!("{:<12} ({:.6})", e.exact, e.approx)
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundsJson {
    pub d: usize,
    pub m: usize,
    pub n: Option<u64>,
    pub f_eq5: Exact,
    pub f_remark: Exact,
    pub g: Vec<Exact>,
    pub h_eq4: Exact,
    pub h_unrolled: Option<Exact>,
    pub f_bar: Exact,
    pub f_bar_approximate: bool,
    pub prior_2color: Option<Exact>,
    pub asymptotic: bool,
    pub remark_discrepancy: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn planar_two_color_constants() {
        let t = bound_table(2, 1, None).unwrap();
        assert_eq!(t.h_eq4, r(8, 1));
        assert_eq!(t.f_eq5, r(1, 8));
        assert_eq!(t.f_remark, r(1, 16));
        assert!(t.remark_discrepancy);
    }

    #[test]
    fn three_dim_three_color_constants() {
        let t = bound_table(3, 2, None).unwrap();
        assert_eq!(t.h_eq4, r(144, 1));
        assert_eq!(t.f_eq5, r(1, 144));
    }

    #[test]
    fn skeleton_constant() {
        assert_eq!(g(3, 1).unwrap(), r(6, 1));
        assert_eq!(g(2, 0).unwrap(), r(1, 2));
        assert!(g(2, 3).is_err());
    }

    #[test]
    fn remark_constant_is_half_of_asymptotic() {
        for d in 1..7 {
            for m in 0..d {
                let t = bound_table(d, m, Some(5)).unwrap();
                assert_eq!(t.f_remark * r(2, 1), t.f_eq5);
                assert!(t.f_eq5 > r(0, 1) && t.g.iter().all(|g| *g > r(0, 1)));
            }
        }
    }

    #[test]
    fn prior_bound_in_the_plane() {
        for n in 1..20u64 {
            assert_eq!(prior_two_color(2, n), Rational::from_integer(n as i128 - 4));
        }
    }

    #[test]
    fn unrolled_h_tends_to_asymptotic_h() {
        let t = bound_table(3, 2, None).unwrap();
        let big = h_unrolled(3, 2, 1_000_000);
        assert!(big > t.h_eq4);
        assert!(big - t.h_eq4 < r(1, 1000));
        // k = m term only
        assert_eq!(h_unrolled(2, 1, 7), r(8, 1));
    }

    #[test]
    fn rejects_m_at_least_d() {
        assert!(bound_table(2, 2, None).is_err());
    }
}
