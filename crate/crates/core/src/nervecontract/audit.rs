use num_traits::{One, Zero};
use serde::Serialize;

use super::{
    build_shifted_partition, contraction, default_delta, face_chains, mono_parts, nerve,
    skeleton_volume, ContractionFamily, FaceChains, Nerve, NerveError, Parts, ShiftedPartition,
};
use crate::bounds::{factorial, g, pow};
use crate::chains::{fmt_rational, FillOptions, RectChain, Rational, Ring};
use crate::gridcolor::GridColoring;
use crate::Exact;

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// Shift parameter; `None` uses [`default_delta`].
    pub delta: Option<Rational>,
    pub ring: Ring,
    pub fill: FillOptions,
    /// Also measure every part's skeleton against `g(d,k)`.
    pub skeleton_checks: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            delta: None,
            ring: Ring::Mod2,
            fill: FillOptions::default(),
            skeleton_checks: true,
        }
    }
}

/// Exact identities of the pipeline. A report only exists when all hold;
/// a failure surfaces as [`NerveError::IdentityFailed`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityFlags {
    pub eq2: bool,
    pub eq3: bool,
    pub dxi_zero: bool,
    pub sum_is_q: bool,
}

/// `S(i_0,k) ≤ (k+1)! g(d,k) α n^(k-m) + S(i_0,k+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecursionCheck {
    pub part: usize,
    pub k: usize,
    pub s: Rational,
    pub bound: Rational,
    pub holds: bool,
}

/// `skeleton_volume(part, k) ≤ g(d,k) ‖part‖ n^k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonCheck {
    pub part: usize,
    pub k: usize,
    pub volume: Rational,
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub ring: Ring,
    pub delta: Rational,
    pub part_count: usize,
    pub nerve_dim: usize,
    /// `max_i ‖C_i‖ n^m`.
    pub alpha: Rational,
    /// `1 / (n^-m + h)`, with `h` the unrolled recursion constant: the value
    /// `α` must reach once some `‖X_i‖ ≥ 1`.
    pub alpha_floor: Rational,
    pub h_unrolled: Rational,
    /// `s_table[i][k - 1] = S(i, k)` for `k = 1..=m+1`.
    pub s_table: Vec<Vec<Rational>>,
    pub x_chains: Vec<RectChain>,
    pub x_volumes: Vec<Rational>,
    pub max_x_volume: Rational,
    pub identities: IdentityFlags,
    pub recursion_checks: Vec<RecursionCheck>,
    /// `S(i, 1) ≤ h α` for every part.
    pub h_check: bool,
    /// `‖X_i‖ ≤ ‖C_i‖ + S(i, 1)` for every part.
    pub x_volume_check: bool,
    pub skeleton_checks: Vec<SkeletonCheck>,
}

impl AuditReport {
    /// Every inequality in the report holds.
    pub fn bounds_hold(&self) -> bool {
        self.h_check
            && self.x_volume_check
            && self.alpha >= self.alpha_floor
            && self.recursion_checks.iter().all(|c| c.holds)
            && self.skeleton_checks.iter().all(|c| c.holds)
    }
}

/// Runs the whole pipeline on a coloring with `m + 1 = num_colors` colors.
pub fn certify(coloring: &GridColoring, opts: &CertifyOptions) -> Result<AuditReport, NerveError> {
    let delta = opts.delta.unwrap_or_else(|| default_delta(coloring.n()));
    let p = build_shifted_partition(coloring.d(), coloring.n(), delta)?;
    let parts = mono_parts(&p, coloring)?;
    let m = coloring.m();
    let nv = nerve(&p, &parts, Some(m))?;
    let faces = face_chains(&p, &parts, &nv, opts.ring)?;
    faces.check_compatibility(&nv)?;
    let family = contraction(&faces, &nv, &opts.fill)?;
    family.check_contraction(&faces, &nv)?;
    let mut report = assemble_and_audit(&p, &parts, &nv, &faces, &family, m)?;
    if opts.skeleton_checks {
        report.skeleton_checks = skeleton_checks(&p, &parts);
    }
    Ok(report)
}

/// Skeleton volume of every part in every codimension `1..=d`.
pub(crate) fn skeleton_checks(p: &ShiftedPartition, parts: &Parts) -> Vec<SkeletonCheck> {
    let n = Rational::from_integer(p.n() as i128);
    let mut out = Vec::new();
    for part in parts.iter() {
        for k in 1..=p.d() {
            let volume = skeleton_volume(p, part, k);
            let bound = g(p.d(), k).expect("k <= d") * part.volume * pow(n, k as i64);
            out.push(SkeletonCheck {
                part: part.id,
                k,
                holds: volume <= bound,
                volume,
                bound,
            });
        }
    }
    out
}

/// Assembles `X_i = C_i - Σ_j F(i, j)`, checks `∂X_i ≡ 0` and
/// `Σ_i X_i = [Q]`, and tabulates the contraction volumes
/// `S(i_0, k) = Σ ‖F(i_0, ..., i_k)‖` over ordered tuples.
pub fn assemble_and_audit(
    p: &ShiftedPartition,
    parts: &Parts,
    nv: &Nerve,
    faces: &FaceChains,
    family: &ContractionFamily,
    m: usize,
) -> Result<AuditReport, NerveError> {
    let d = p.d();
    let ring = faces.ring();
    let n = Rational::from_integer(p.n() as i128);

    let mut x_chains = Vec::with_capacity(parts.len());
    for part in parts.iter() {
        let i = part.id;
        let mut x = faces.get(&[i]);
        for &j in nv.cofaces(&[i]) {
            x = x - family.get(&[i, j]);
        }
        if !x.boundary(true)?.is_zero() {
            return Err(NerveError::IdentityFailed {
                identity: "dXi_zero",
                simplex: vec![i],
            });
        }
        x_chains.push(x);
    }
    let sum = x_chains
        .iter()
        .fold(RectChain::zero(d, d, ring), |acc, x| &acc + x);
    if sum != RectChain::fundamental(d, ring) {
        return Err(NerveError::IdentityFailed {
            identity: "sum_is_Q",
            simplex: Vec::new(),
        });
    }
    let x_volumes: Vec<Rational> = x_chains.iter().map(RectChain::volume).collect();
    let max_x_volume = x_volumes.iter().copied().max().unwrap_or_else(Rational::zero);
    // [Q] is not a boundary, so some X_i is a nonzero multiple of it
    if max_x_volume < Rational::one() {
        return Err(NerveError::IdentityFailed {
            identity: "max_X_volume",
            simplex: Vec::new(),
        });
    }

    let c_volumes: Vec<Rational> = parts.iter().map(|q| faces.get(&[q.id]).volume()).collect();
    let max_c = c_volumes.iter().copied().max().unwrap_or_else(Rational::zero);
    let alpha = max_c * pow(n, m as i64);

    // S(i, k) for k = 1..=m+1; each sorted simplex stands for k! orderings
    let mut s_table = vec![vec![Rational::zero(); m + 1]; parts.len()];
    for k in 1..=m + 1 {
        for simplex in nv.simplices(k) {
            let v = family.get(simplex).volume() * factorial(k);
            for &i in simplex {
                s_table[i][k - 1] += v;
            }
        }
    }

    let top_k = m.min(d);
    let coefficient = |k: usize| factorial(k + 1) * g(d, k).expect("k <= d") * pow(n, k as i64 - m as i64);
    let h_unrolled = (1..=top_k).fold(Rational::zero(), |acc, k| acc + coefficient(k));
    let mut recursion_checks = Vec::new();
    for (i, row) in s_table.iter().enumerate() {
        for k in 1..=top_k {
            let bound = coefficient(k) * alpha + row[k];
            recursion_checks.push(RecursionCheck {
                part: i,
                k,
                s: row[k - 1],
                holds: row[k - 1] <= bound,
                bound,
            });
        }
    }
    let h_check = s_table.iter().all(|row| row[0] <= h_unrolled * alpha);
    let x_volume_check = (0..parts.len()).all(|i| x_volumes[i] <= c_volumes[i] + s_table[i][0]);
    let alpha_floor = Rational::one() / (pow(n, -(m as i64)) + h_unrolled);

    Ok(AuditReport {
        d,
        n: p.n(),
        m,
        ring,
        delta: *p.delta(),
        part_count: parts.len(),
        nerve_dim: nv.dim().unwrap_or(0),
        alpha,
        alpha_floor,
        h_unrolled,
        s_table,
        x_chains,
        x_volumes,
        max_x_volume,
        identities: IdentityFlags {
            eq2: true,
            eq3: true,
            dxi_zero: true,
            sum_is_q: true,
        },
        recursion_checks,
        h_check,
        x_volume_check,
        skeleton_checks: Vec::new(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyJson {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub ring: Ring,
    pub delta: String,
    pub parts: usize,
    pub nerve_dim: usize,
    pub alpha: Exact,
    pub alpha_floor: Exact,
    pub h_unrolled: Exact,
    #[serde(rename = "S_table")]
    pub s_table: Vec<Vec<Exact>>,
    pub x_volumes: Vec<Exact>,
    #[serde(rename = "max_X_volume")]
    pub max_x_volume: Exact,
    pub identities: IdentitiesJson,
    pub recursion_checks: Vec<CheckJson>,
    pub h_check: bool,
    pub x_volume_check: bool,
    pub g_checks: Vec<CheckJson>,
    pub bounds_hold: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitiesJson {
    pub eq2: &'static str,
    pub eq3: &'static str,
    #[serde(rename = "dXi_zero")]
    pub dxi_zero: &'static str,
    #[serde(rename = "sum_is_Q")]
    pub sum_is_q: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckJson {
    pub part: usize,
    pub k: usize,
    pub value: Exact,
    pub bound: Exact,
    pub holds: bool,
}

fn status(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "failed"
    }
}

impl AuditReport {
    pub fn to_json(&self) -> CertifyJson {
        CertifyJson {
            d: self.d,
            n: self.n,
            m: self.m,
            ring: self.ring,
            delta: fmt_rational(&self.delta),
            parts: self.part_count,
            nerve_dim: self.nerve_dim,
            alpha: self.alpha.into(),
            alpha_floor: self.alpha_floor.into(),
            h_unrolled: self.h_unrolled.into(),
            s_table: self
                .s_table
                .iter()
                .map(|row| row.iter().map(Exact::from).collect())
                .collect(),
            x_volumes: self.x_volumes.iter().map(Exact::from).collect(),
            max_x_volume: self.max_x_volume.into(),
            identities: IdentitiesJson {
                eq2: status(self.identities.eq2),
                eq3: status(self.identities.eq3),
                dxi_zero: status(self.identities.dxi_zero),
                sum_is_q: status(self.identities.sum_is_q),
            },
            recursion_checks: self
                .recursion_checks
                .iter()
                .map(|c| CheckJson {
                    part: c.part,
                    k: c.k,
                    value: c.s.into(),
                    bound: c.bound.into(),
                    holds: c.holds,
                })
                .collect(),
            h_check: self.h_check,
            x_volume_check: self.x_volume_check,
            g_checks: self
                .skeleton_checks
                .iter()
                .map(|c| CheckJson {
                    part: c.part,
                    k: c.k,
                    value: c.volume.into(),
                    bound: c.bound.into(),
                    holds: c.holds,
                })
                .collect(),
            bounds_hold: self.bounds_hold(),
        }
    }
}
