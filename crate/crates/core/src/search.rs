//! Colorings with small monochromatic components: explicit constructions,
//! simulated annealing, and exhaustive minimization for tiny grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridcolor::{components_with, GridColoring, GridError, GridTopology};
use crate::unionfind::UnionFind;

/// Default cap on `num_colors^(n^d)` for [`exhaustive_min`].
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("{num_colors}^{cells} colorings exceed the budget of {budget}")]
    BudgetExceeded {
        num_colors: u32,
        cells: usize,
        budget: u64,
    },
    #[error("invalid schedule: {0}")]
    BadSchedule(&'static str),
    #[error("stripe width must be at least 1")]
    BadWidth,
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Search objective: largest component first, then how many components
/// attain it. Smaller is better.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Objective {
    pub max_size: usize,
    pub max_count: usize,
}

pub fn objective(topo: &GridTopology, g: &GridColoring) -> Objective {
    let r = components_with(topo, g);
    Objective {
        max_size: r.max_size,
        max_count: r.max_count(),
    }
}

/// `color(c) = floor((c_1 + ... + c_j) / w) mod num_colors` with
/// `j = min(num_colors, d)`.
pub fn stripe_construction(
    d: usize,
    n: usize,
    num_colors: u32,
    w: usize,
) -> Result<GridColoring, SearchError> {
    if w == 0 {
        return Err(SearchError::BadWidth);
    }
    let j = (num_colors as usize).min(d);
    Ok(GridColoring::from_fn(d, n, num_colors, |c| {
        ((c[..j].iter().sum::<usize>() / w) % num_colors as usize) as u32
    })?)
}

/// I.i.d. uniform colors, deterministic per seed.
pub fn random_coloring(
    d: usize,
    n: usize,
    num_colors: u32,
    seed: u64,
) -> Result<GridColoring, SearchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(GridColoring::from_fn(d, n, num_colors, |_| {
        rng.gen_range(0..num_colors)
    })?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub d: usize,
    pub n: usize,
    pub num_colors: u32,
    pub seed: u64,
    pub initial_temperature: f64,
    /// Geometric cooling factor per step, in `(0, 1)`.
    pub decay: f64,
    pub steps: usize,
}

impl SearchConfig {
    pub fn new(d: usize, n: usize, num_colors: u32, seed: u64, steps: usize) -> Self {
        SearchConfig {
            d,
            n,
            num_colors,
            seed,
            initial_temperature: 2.0,
            decay: (1e-3f64).powf(1.0 / steps.max(1) as f64),
            steps,
        }
    }

    fn validate(&self) -> Result<(), SearchError> {
        if self.steps == 0 {
            return Err(SearchError::BadSchedule("steps must be at least 1"));
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(SearchError::BadSchedule("decay must lie in (0, 1)"));
        }
        // rejects NaN too
        if self.initial_temperature.is_nan() || self.initial_temperature < 0.0 {
            return Err(SearchError::BadSchedule("temperature must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TracePoint {
    pub step: usize,
    pub best: Objective,
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub coloring: GridColoring,
    pub objective: Objective,
    pub initial_objective: Objective,
    /// Best-so-far objective, recorded at each improvement.
    pub trace: Vec<TracePoint>,
}

/// Energy seen by the Metropolis rule. The sum of squared component sizes
/// gives the walk a slope on the plateaus of the max-size objective.
fn energy(topo: &GridTopology, g: &GridColoring) -> (Objective, f64) {
    let r = components_with(topo, g);
    let obj = Objective {
        max_size: r.max_size,
        max_count: r.max_count(),
    };
    let total = g.len() as f64;
    let spread: f64 = r.sizes().map(|s| (s * s) as f64).sum::<f64>() / (total * total);
    let e = obj.max_size as f64 + 0.5 * obj.max_count as f64 / total + 0.5 * spread;
    (obj, e)
}

/// Simulated annealing over single-cell recolorings, starting from
/// [`random_coloring`] with the configured seed.
pub fn anneal(cfg: &SearchConfig) -> Result<AnnealResult, SearchError> {
    cfg.validate()?;
    let start = random_coloring(cfg.d, cfg.n, cfg.num_colors, cfg.seed)?;
    anneal_from(cfg, start)
}

/// Simulated annealing from a given coloring.
pub fn anneal_from(cfg: &SearchConfig, start: GridColoring) -> Result<AnnealResult, SearchError> {
    cfg.validate()?;
    let topo = GridTopology::new(start.d(), start.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut current = start;
    let (initial_objective, mut current_e) = energy(&topo, &current);
    let mut best = current.clone();
    let mut best_obj = initial_objective;
    let mut trace = vec![TracePoint {
        step: 0,
        best: best_obj,
    }];
    if current.num_colors() < 2 {
        return Ok(AnnealResult {
            coloring: best,
            objective: best_obj,
            initial_objective,
            trace,
        });
    }

    let mut temperature = cfg.initial_temperature;
    for step in 1..=cfg.steps {
        let cell = rng.gen_range(0..current.len());
        let old = current.color(cell);
        let shift = rng.gen_range(1..current.num_colors());
        current.set_color(cell, (old + shift) % current.num_colors());
        let (obj, e) = energy(&topo, &current);
        let accept = e <= current_e
            || (temperature > 0.0 && rng.gen::<f64>() < ((current_e - e) / temperature).exp());
        if accept {
            current_e = e;
            if obj < best_obj || (obj == best_obj && current.cells() < best.cells()) {
                if obj < best_obj {
                    trace.push(TracePoint { step, best: obj });
                }
                best_obj = obj;
                best.clone_from(&current);
            }
        } else {
            current.set_color(cell, old);
        }
        temperature *= cfg.decay;
    }
    Ok(AnnealResult {
        coloring: best,
        objective: best_obj,
        initial_objective,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExhaustiveResult {
    /// Minimum over all colorings of the largest component.
    pub value: usize,
    /// Lexicographically least coloring attaining `value`.
    pub witness: GridColoring,
    /// Colorings actually visited (cell 0 pinned to color 0).
    pub visited: u64,
}

/// Exact `min_coloring max_component` by enumeration.
///
/// Permuting colors preserves component sizes, so cell 0 is pinned to color 0;
/// this divides the work by `num_colors` and keeps the lexicographically least
/// witness. Chunks run in parallel and merge by `(value, index)`.
pub fn exhaustive_min(
    d: usize,
    n: usize,
    num_colors: u32,
    budget: u64,
) -> Result<ExhaustiveResult, SearchError> {
    let topo = GridTopology::new(d, n)?;
    if num_colors == 0 {
        return Err(GridError::EmptyParameter.into());
    }
    let cells = n.pow(d as u32);
    let over = SearchError::BudgetExceeded {
        num_colors,
        cells,
        budget,
    };
    let total = (num_colors as u64)
        .checked_pow(cells as u32)
        .filter(|&t| t <= budget)
        .ok_or(over)?;
    let visited = total / num_colors as u64;

    let edges: Vec<(usize, usize)> = (0..cells)
        .flat_map(|i| {
            topo.neighbors(i)
                .iter()
                .map(move |&j| (i, j as usize))
                .filter(|(i, j)| i < j)
                .collect::<Vec<_>>()
        })
        .collect();

    let decode = |mut index: u64, out: &mut [u32]| {
        // cell 0 is the most significant digit and stays 0
        for c in out.iter_mut().skip(1).rev() {
            *c = (index % num_colors as u64) as u32;
            index /= num_colors as u64;
        }
        out[0] = 0;
    };
    let max_component = |colors: &[u32], uf: &mut UnionFind, sizes: &mut Vec<usize>| {
        *uf = UnionFind::new(colors.len());
        for &(i, j) in &edges {
            if colors[i] == colors[j] {
                uf.union(i, j);
            }
        }
        sizes.clear();
        sizes.resize(colors.len(), 0);
        let mut best = 0;
        for i in 0..colors.len() {
            let r = uf.find(i);
            sizes[r] += 1;
            best = best.max(sizes[r]);
        }
        best
    };

    const CHUNK: u64 = 1 << 12;
    let chunks = visited.div_ceil(CHUNK);
    let (value, index) = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut colors = vec![0u32; cells];
            let mut uf = UnionFind::new(cells);
            let mut sizes = Vec::new();
            let mut best = (usize::MAX, u64::MAX);
            for index in chunk * CHUNK..((chunk + 1) * CHUNK).min(visited) {
                decode(index, &mut colors);
                let v = max_component(&colors, &mut uf, &mut sizes);
                if v < best.0 {
                    best = (v, index);
                }
            }
            best
        })
        .min()
        .expect("at least one coloring");

    let mut colors = vec![0u32; cells];
    decode(index, &mut colors);
    Ok(ExhaustiveResult {
        value,
        witness: GridColoring::new(d, n, num_colors, colors)?,
        visited,
    })
}

/// One CSV row of search output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchRow {
    pub d: usize,
    pub n: usize,
    pub num_colors: u32,
    pub method: String,
    pub objective: usize,
    pub seed: Option<u64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridcolor::components;

    #[test]
    fn stripes_in_one_dimension_are_blocks() {
        let g = stripe_construction(1, 7, 2, 3).unwrap();
        assert_eq!(g.cells(), &[0, 0, 0, 1, 1, 1, 0]);
    }

    #[test]
    fn width_two_stripes_stay_small() {
        let g = stripe_construction(2, 6, 2, 2).unwrap();
        assert!(components(&g).max_size <= 12);
    }

    #[test]
    fn width_one_stripes_reconnect_diagonally() {
        // the checkerboard: each color class is one king-connected component
        let g = stripe_construction(2, 6, 2, 1).unwrap();
        assert_eq!(components(&g).max_size, 18);
    }

    #[test]
    fn zero_width_rejected() {
        assert_eq!(stripe_construction(2, 4, 2, 0), Err(SearchError::BadWidth));
    }

    #[test]
    fn random_colorings_are_reproducible() {
        let a = random_coloring(2, 8, 3, 5).unwrap();
        assert_eq!(a, random_coloring(2, 8, 3, 5).unwrap());
        assert_ne!(a, random_coloring(2, 8, 3, 6).unwrap());
    }

    #[test]
    fn random_histogram_is_roughly_uniform() {
        let g = random_coloring(2, 32, 2, 1).unwrap();
        let ones = g.cells().iter().filter(|&&c| c == 1).count() as f64;
        // 1024 fair coins: sigma = 16
        assert!((ones - 512.0).abs() < 5.0 * 16.0);
    }

    #[test]
    fn exhaustive_small_cases() {
        let r = exhaustive_min(1, 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.witness.cells(), &[0, 1, 0]);
        let r = exhaustive_min(2, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, 2);
        assert_eq!(r.witness.cells(), &[0, 0, 1, 1]);
        assert_eq!(r.visited, 8);
        let r = exhaustive_min(2, 3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, 3);
        assert_eq!(r.witness.cells(), &[0, 0, 0, 1, 1, 1, 0, 0, 0]);
        let r = exhaustive_min(3, 2, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.value, 4);
    }

    #[test]
    fn exhaustive_respects_budget() {
        assert!(matches!(
            exhaustive_min(2, 5, 2, DEFAULT_BUDGET),
            Err(SearchError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn anneal_trivial_grid() {
        let cfg = SearchConfig::new(2, 1, 2, 3, 10);
        let r = anneal(&cfg).unwrap();
        assert_eq!(r.objective.max_size, 1);
    }

    #[test]
    fn anneal_is_deterministic_and_monotone() {
        let cfg = SearchConfig::new(2, 6, 2, 9, 2000);
        let a = anneal(&cfg).unwrap();
        let b = anneal(&cfg).unwrap();
        assert_eq!(a.coloring, b.coloring);
        assert!(a.objective <= a.initial_objective);
        assert!(a.trace.windows(2).all(|w| w[1].best < w[0].best));
        let topo = GridTopology::new(2, 6).unwrap();
        assert_eq!(objective(&topo, &a.coloring), a.objective);
    }

    #[test]
    fn anneal_rejects_bad_schedule() {
        let mut cfg = SearchConfig::new(2, 4, 2, 0, 10);
        cfg.decay = 1.5;
        assert!(anneal(&cfg).is_err());
        cfg.decay = 0.5;
        cfg.steps = 0;
        assert!(anneal(&cfg).is_err());
    }

    #[test]
    fn anneal_matches_stripes_on_eight_grid() {
        let topo = GridTopology::new(2, 8).unwrap();
        let stripe = objective(&topo, &stripe_construction(2, 8, 2, 2).unwrap());
        assert_eq!(stripe.max_size, 15);
        for seed in 0..3 {
            let a = anneal(&SearchConfig::new(2, 8, 2, seed, 10_000)).unwrap();
            assert!(a.objective.max_size <= stripe.max_size, "seed {seed}: {:?}", a.objective);
        }
    }
}
