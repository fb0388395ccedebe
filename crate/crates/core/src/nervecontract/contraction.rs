use std::collections::BTreeMap;

use super::nerve::{insertion_sign, sort_with_sign, with_vertex};
use super::{FaceChains, Nerve, NerveError, Simplex};
use crate::chains::{fill_with, FillOptions, RectChain, Ring};

/// Chains `F(σ)` of dimension `d - k + 1` on the simplices with `k ≥ 1`.
#[derive(Clone, Debug)]
pub struct ContractionFamily {
    d: usize,
    ring: Ring,
    chains: BTreeMap<Simplex, RectChain>,
}

impl ContractionFamily {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    /// `F(i_0, ..., i_k)` for any ordering, antisymmetric over `Z`; zero off
    /// the nerve.
    pub fn get(&self, indices: &[usize]) -> RectChain {
        let dim = (self.d + 2).saturating_sub(indices.len());
        match sort_with_sign(indices) {
            Some((sorted, sign)) => match self.chains.get(&sorted) {
                Some(c) if sign == 1 => c.clone(),
                Some(c) => -c,
                None => RectChain::zero(self.d, dim, self.ring),
            },
            None => RectChain::zero(self.d, dim, self.ring),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Simplex, &RectChain)> {
        self.chains.iter()
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }
}

/// `C(σ) - Σ_j sign(σ, j) F(σ ∪ {j})`: the chain that `F(σ)` must fill.
fn fill_target(
    faces: &FaceChains,
    nerve: &Nerve,
    chains: &BTreeMap<Simplex, RectChain>,
    simplex: &[usize],
) -> RectChain {
    let mut target = faces.get(simplex);
    for &j in nerve.cofaces(simplex) {
        let upper = &chains[&with_vertex(simplex, j)];
        target = target - upper.scaled(insertion_sign(simplex, j));
    }
    target
}

/// Builds `F` by descending induction on simplex dimension so that
/// `∂F(σ) ≡ C(σ) - Σ_j F(σ ∪ {j})` modulo `∂Q` on every simplex with at
/// least two vertices. Each filling target is checked to be a relative cycle
/// first; antisymmetry of the upper level makes it one.
pub fn contraction(
    faces: &FaceChains,
    nerve: &Nerve,
    opts: &FillOptions,
) -> Result<ContractionFamily, NerveError> {
    let d = faces.ambient_dim();
    let mut chains: BTreeMap<Simplex, RectChain> = BTreeMap::new();
    let top = nerve.dim().unwrap_or(0);
    for k in (1..=top).rev() {
        for simplex in nerve.simplices(k) {
            let target = fill_target(faces, nerve, &chains, simplex);
            if !target.is_relative_cycle() {
                return Err(NerveError::IdentityFailed {
                    identity: "fill-target-cycle",
                    simplex: simplex.clone(),
                });
            }
            let filled = fill_with(&target, opts).map_err(|source| NerveError::Fill {
                simplex: simplex.clone(),
                source,
            })?;
            chains.insert(simplex.clone(), filled);
        }
    }
    Ok(ContractionFamily {
        d,
        ring: faces.ring(),
        chains,
    })
}

impl ContractionFamily {
    /// `∂F(σ) - C(σ) + Σ_j sign(σ, j) F(σ ∪ {j})` modulo `∂Q`.
    pub fn contraction_residual(&self, faces: &FaceChains, nerve: &Nerve, simplex: &[usize]) -> RectChain {
        let f = self.get(simplex);
        let target = fill_target(faces, nerve, &self.chains, simplex);
        let boundary = f.boundary(true).expect("filling chains have positive dimension");
        (boundary - target).reduce_rel()
    }

    pub fn check_contraction(&self, faces: &FaceChains, nerve: &Nerve) -> Result<(), NerveError> {
        for simplex in self.chains.keys() {
            if !self.contraction_residual(faces, nerve, simplex).is_zero() {
                return Err(NerveError::IdentityFailed {
                    identity: "eq3",
                    simplex: simplex.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcolor::GridColoring;
    use crate::nervecontract::{
        build_shifted_partition, default_delta, face_chains, mono_parts, nerve,
    };
    use crate::search::random_coloring;

    fn family(g: &GridColoring, ring: Ring) -> (FaceChains, Nerve, ContractionFamily) {
        let p = build_shifted_partition(g.d(), g.n(), default_delta(g.n())).unwrap();
        let parts = mono_parts(&p, g).unwrap();
        let nv = nerve(&p, &parts, Some(g.m())).unwrap();
        let fc = face_chains(&p, &parts, &nv, ring).unwrap();
        let f = contraction(&fc, &nv, &FillOptions::default()).unwrap();
        (fc, nv, f)
    }

    #[test]
    fn half_half_fills_the_wall() {
        let g = GridColoring::from_fn(2, 4, 2, |c| u32::from(c[0] >= 2)).unwrap();
        for ring in [Ring::Mod2, Ring::Integer] {
            let (fc, nv, f) = family(&g, ring);
            assert_eq!(f.len(), 1);
            let wall = fc.get(&[0, 1]);
            let filled = f.get(&[0, 1]);
            assert_eq!(filled.dim(), 2);
            assert!(filled.boundary(true).unwrap().eq_mod_boundary(&wall));
            assert!(filled.volume() <= wall.volume());
            f.check_contraction(&fc, &nv).unwrap();
        }
    }

    #[test]
    fn single_part_has_empty_family() {
        let g = GridColoring::uniform(2, 3, 1, 0).unwrap();
        let (_, _, f) = family(&g, Ring::Mod2);
        assert!(f.is_empty());
    }

    #[test]
    fn integer_family_is_antisymmetric() {
        let g = random_coloring(2, 4, 2, 3).unwrap();
        let (_, nv, f) = family(&g, Ring::Integer);
        for s in nv.simplices(1) {
            assert_eq!(f.get(&[s[1], s[0]]), -&f.get(s));
        }
    }

    #[test]
    fn contraction_residual_with_three_colors() {
        for seed in 0..3 {
            let g = random_coloring(3, 2, 3, seed).unwrap();
            for ring in [Ring::Mod2, Ring::Integer] {
                let (fc, nv, f) = family(&g, ring);
                f.check_contraction(&fc, &nv).unwrap();
            }
        }
    }
}
