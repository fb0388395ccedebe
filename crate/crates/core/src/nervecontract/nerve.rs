use std::collections::BTreeMap;

use super::{NerveError, Parts, ShiftedPartition};
use crate::chains::{BoxCell, RectChain, Ring};

/// Part indices in ascending order.
pub type Simplex = Vec<usize>;

/// Nerve of the covering of the cube by parts: a simplex for every set of
/// parts whose closed unions share a point.
#[derive(Clone, Debug)]
pub struct Nerve {
    d: usize,
    levels: Vec<Vec<Simplex>>,
    /// Intersection pieces of the member boxes, each with the cell of the
    /// first member part that contains it.
    pieces: BTreeMap<Simplex, BTreeMap<BoxCell, usize>>,
    cofaces: BTreeMap<Simplex, Vec<usize>>,
}

/// `(-1)^{#{x in σ : x > j}}`: the sign of moving `j` from the end of
/// `σ ∪ {j}` into sorted position.
pub(crate) fn insertion_sign(simplex: &[usize], j: usize) -> i64 {
    if simplex.iter().filter(|&&x| x > j).count() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub(crate) fn with_vertex(simplex: &[usize], j: usize) -> Simplex {
    let mut out = simplex.to_vec();
    let pos = out.partition_point(|&x| x < j);
    out.insert(pos, j);
    out
}

/// Sorts `indices`, returning the permutation sign, or `None` on repeats.
pub(crate) fn sort_with_sign(indices: &[usize]) -> Option<(Simplex, i64)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((v, sign))
    }
}

/// Builds the nerve by extending each simplex with larger part indices.
/// With `max_dim`, a simplex above that dimension is an error: in a simple
/// partition colored with `m + 1` colors the nerve has dimension at most `m`.
pub fn nerve(
    p: &ShiftedPartition,
    parts: &Parts,
    max_dim: Option<usize>,
) -> Result<Nerve, NerveError> {
    let mut pieces: BTreeMap<Simplex, BTreeMap<BoxCell, usize>> = BTreeMap::new();
    let mut level: Vec<Simplex> = Vec::new();
    for part in parts.iter() {
        let simplex = vec![part.id];
        let own = part
            .cells
            .iter()
            .map(|&c| (p.cells()[c].bounds.clone(), c))
            .collect();
        pieces.insert(simplex.clone(), own);
        level.push(simplex);
    }
    let mut levels = Vec::new();
    let mut cofaces: BTreeMap<Simplex, Vec<usize>> = BTreeMap::new();
    while !level.is_empty() {
        let mut next: BTreeMap<Simplex, BTreeMap<BoxCell, usize>> = BTreeMap::new();
        for simplex in &level {
            let top = *simplex.last().expect("simplices are nonempty");
            for (piece, &anchor) in &pieces[simplex] {
                // a cell meeting the piece meets the anchor cell containing it
                for &c in p.neighbors(anchor) {
                    let j = parts.part_of[c];
                    if j <= top {
                        continue;
                    }
                    if let Some(meet) = piece.intersect(&p.cells()[c].bounds) {
                        let mut grown = simplex.clone();
                        grown.push(j);
                        next.entry(grown).or_default().insert(meet, anchor);
                    }
                }
            }
        }
        for grown in next.keys() {
            let k = grown.len() - 1;
            if let Some(max) = max_dim {
                if k > max {
                    return Err(NerveError::DimensionExceeded {
                        simplex: grown.clone(),
                        dim: k,
                        max,
                    });
                }
            }
            for (pos, &j) in grown.iter().enumerate() {
                let mut face = grown.clone();
                face.remove(pos);
                cofaces.entry(face).or_default().push(j);
            }
        }
        levels.push(std::mem::take(&mut level));
        level = next.keys().cloned().collect();
        pieces.extend(next);
    }
    for list in cofaces.values_mut() {
        list.sort_unstable();
    }
    Ok(Nerve {
        d: p.d(),
        levels,
        pieces,
        cofaces,
    })
}

impl Nerve {
    /// Largest simplex dimension; `None` for the empty nerve.
    pub fn dim(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    /// Simplices with `k + 1` vertices.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.levels.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.levels.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.pieces.contains_key(simplex)
    }

    /// Vertices `j` not in `simplex` with `simplex ∪ {j}` in the nerve.
    pub fn cofaces(&self, simplex: &[usize]) -> &[usize] {
        self.cofaces.get(simplex).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Closed intersection pieces of `simplex`, one per tuple of member cells.
    pub fn pieces(&self, simplex: &[usize]) -> impl Iterator<Item = &BoxCell> {
        self.pieces.get(simplex).into_iter().flat_map(|m| m.keys())
    }
}

/// The chains `C(σ)` on every nerve simplex.
#[derive(Clone, Debug)]
pub struct FaceChains {
    d: usize,
    ring: Ring,
    chains: BTreeMap<Simplex, RectChain>,
}

/// Union of the full-dimensional intersection pieces of `simplex` as a
/// chain with coefficient one.
fn support_chain(d: usize, nerve: &Nerve, simplex: &[usize]) -> Result<RectChain, NerveError> {
    let dim = d + 1 - simplex.len();
    let pieces = nerve
        .pieces(simplex)
        .filter(|b| b.dim() == dim)
        .map(|b| (b.clone(), 1));
    let chain = RectChain::from_terms(d, dim, Ring::Integer, pieces)?;
    if chain.max_abs_coefficient() > 1 {
        return Err(NerveError::OverlappingPieces {
            simplex: simplex.to_vec(),
        });
    }
    Ok(chain.to_ring(Ring::Mod2))
}

/// The part of `y` inside the boxes of a part, cell by cell.
fn restrict(y: &RectChain, boxes: &[BoxCell]) -> RectChain {
    let mut terms = Vec::new();
    for (cell, coef) in y.terms() {
        for b in boxes {
            if let Some(piece) = cell.intersect(b) {
                if piece.dim() == y.dim() {
                    terms.push((piece, coef));
                }
            }
        }
    }
    RectChain::from_terms(y.ambient_dim(), y.dim(), y.ring(), terms)
        .expect("pieces keep the dimension of the restricted chain")
}

/// Face chains `C(σ) = ∩_{i∈σ} C_i`, of dimension `d - k` for `|σ| = k + 1`.
///
/// Over `Z/2` these are unions of intersection pieces. Over `Z`, `C(i)` is
/// the part with coefficient one and `C(σ ∪ {j})` for `j > max σ` is the
/// piece of `∂C(σ)` lying in part `j`; the signs then satisfy
/// `∂C(σ) ≡ Σ_j sign(σ, j) C(σ ∪ {j})` with [`insertion_sign`]. The integer
/// chains are checked to have the same support as the `Z/2` ones.
pub fn face_chains(
    p: &ShiftedPartition,
    parts: &Parts,
    nerve: &Nerve,
    ring: Ring,
) -> Result<FaceChains, NerveError> {
    let d = p.d();
    let mut chains: BTreeMap<Simplex, RectChain> = BTreeMap::new();
    for simplex in nerve.iter() {
        let support = support_chain(d, nerve, simplex)?;
        let chain = match ring {
            Ring::Mod2 => support,
            Ring::Integer => {
                let chain = if simplex.len() == 1 {
                    RectChain::from_terms(
                        d,
                        d,
                        Ring::Integer,
                        parts.get(simplex[0]).boxes.iter().map(|b| (b.clone(), 1)),
                    )?
                } else {
                    let (&j, base) = simplex.split_last().expect("nonempty");
                    let lower = &chains[base];
                    if lower.dim() == 0 {
                        RectChain::zero(d, 0, Ring::Integer)
                    } else {
                        restrict(&lower.boundary(true)?, &parts.get(j).boxes)
                    }
                };
                if chain.max_abs_coefficient() > 1 || chain.to_ring(Ring::Mod2) != support {
                    return Err(NerveError::IdentityFailed {
                        identity: "face-chain-support",
                        simplex: simplex.clone(),
                    });
                }
                chain
            }
        };
        chains.insert(simplex.clone(), chain);
    }
    Ok(FaceChains { d, ring, chains })
}

impl FaceChains {
    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn ambient_dim(&self) -> usize {
        self.d
    }

    /// `C(i_0, ..., i_k)` for any ordering, antisymmetric over `Z`; zero off
    /// the nerve.
    pub fn get(&self, indices: &[usize]) -> RectChain {
        let dim = (self.d + 1).saturating_sub(indices.len());
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

    /// `∂C(σ) - Σ_j sign(σ, j) C(σ ∪ {j})` modulo `∂Q`; zero chains mean
    /// the face chains are compatible with the boundary. `None` for points.
    pub fn compatibility_residual(&self, nerve: &Nerve, simplex: &[usize]) -> Option<RectChain> {
        let c = self.chains.get(simplex)?;
        if c.dim() == 0 {
            return None;
        }
        let mut residual = c.boundary(true).expect("positive dimension");
        for &j in nerve.cofaces(simplex) {
            let next = &self.chains[&with_vertex(simplex, j)];
            residual = residual - next.scaled(insertion_sign(simplex, j));
        }
        Some(residual.reduce_rel())
    }

    /// Checks the boundary compatibility on every simplex.
    pub fn check_compatibility(&self, nerve: &Nerve) -> Result<(), NerveError> {
        for simplex in self.chains.keys() {
            if let Some(r) = self.compatibility_residual(nerve, simplex) {
                if !r.is_zero() {
                    return Err(NerveError::IdentityFailed {
                        identity: "eq2",
                        simplex: simplex.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}
