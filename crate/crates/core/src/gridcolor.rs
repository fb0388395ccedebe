//! Colorings of the `n^d` grid of subcubes and their monochromatic components.
//!
//! Two cells are adjacent when their closed cubes intersect, i.e. when their
//! coordinates differ by at most one on every axis (king moves).

use serde::Serialize;
use thiserror::Error;

use crate::unionfind::UnionFind;

/// Refuse grids larger than this many cells.
pub const MAX_CELLS: usize = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("dimension, subdivision and color count must all be at least 1")]
    EmptyParameter,
    #[error("grid of {n}^{d} cells is too large")]
    TooLarge { d: usize, n: usize },
    #[error("expected {expected} cell colors, found {found}")]
    WrongLength { expected: usize, found: usize },
    #[error("cell {index} has color {color}, but only {num_colors} colors exist")]
    ColorOutOfRange {
        index: usize,
        color: u32,
        num_colors: u32,
    },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: missing header \"d n num_colors\"")]
    MissingHeader { line: usize },
    #[error("line {line}: header must be three integers \"d n num_colors\"")]
    BadHeader { line: usize },
    #[error("line {line}: token {token:?} is not a nonnegative integer")]
    NotInteger { line: usize, token: String },
    #[error("line {line}: color {color} out of range for {num_colors} colors")]
    ColorOutOfRange {
        line: usize,
        color: u32,
        num_colors: u32,
    },
    #[error("expected {expected} cell colors, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Per-axis coordinates of a grid cell, each in `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex(pub Vec<usize>);

impl CellIndex {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    /// Closed cubes intersect: every coordinate differs by at most one.
    pub fn adjacent(&self, other: &CellIndex) -> bool {
        self != other
            && self
                .0
                .iter()
                .zip(&other.0)
                .all(|(a, b)| a.abs_diff(*b) <= 1)
    }
}

/// One color per cell, stored row-major with axis 1 varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridColoring {
    d: usize,
    n: usize,
    num_colors: u32,
    cells: Vec<u32>,
}

fn cell_count(d: usize, n: usize) -> Result<usize, GridError> {
    if d == 0 || n == 0 {
        return Err(GridError::EmptyParameter);
    }
    n.checked_pow(d as u32)
        .filter(|&c| c <= MAX_CELLS)
        .ok_or(GridError::TooLarge { d, n })
}

impl GridColoring {
    pub fn new(d: usize, n: usize, num_colors: u32, cells: Vec<u32>) -> Result<Self, GridError> {
        let expected = cell_count(d, n)?;
        if num_colors == 0 {
            return Err(GridError::EmptyParameter);
        }
        if cells.len() != expected {
            return Err(GridError::WrongLength {
                expected,
                found: cells.len(),
            });
        }
        if let Some((index, &color)) = cells.iter().enumerate().find(|(_, &c)| c >= num_colors) {
            return Err(GridError::ColorOutOfRange {
                index,
                color,
                num_colors,
            });
        }
        Ok(GridColoring {
            d,
            n,
            num_colors,
            cells,
        })
    }

    pub fn uniform(d: usize, n: usize, num_colors: u32, color: u32) -> Result<Self, GridError> {
        Self::new(d, n, num_colors, vec![color; cell_count(d, n)?])
    }

    pub fn from_fn<F>(d: usize, n: usize, num_colors: u32, mut f: F) -> Result<Self, GridError>
    where
        F: FnMut(&[usize]) -> u32,
    {
        let len = cell_count(d, n)?;
        let mut coords = vec![0usize; d];
        let mut cells = Vec::with_capacity(len);
        for _ in 0..len {
            cells.push(f(&coords));
            for c in coords.iter_mut() {
                *c += 1;
                if *c < n {
                    break;
                }
                *c = 0;
            }
        }
        Self::new(d, n, num_colors, cells)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_colors(&self) -> u32 {
        self.num_colors
    }

    /// The theorem's `m` (= colors - 1).
    pub fn m(&self) -> usize {
        self.num_colors as usize - 1
    }

    pub fn cells(&self) -> &[u32] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn color(&self, index: usize) -> u32 {
        self.cells[index]
    }

    pub fn color_at(&self, cell: &CellIndex) -> u32 {
        self.cells[self.index_of(cell)]
    }

    pub fn set_color(&mut self, index: usize, color: u32) {
        assert!(color < self.num_colors, "color out of range");
        self.cells[index] = color;
    }

    pub fn index_of(&self, cell: &CellIndex) -> usize {
        cell.0
            .iter()
            .rev()
            .fold(0, |acc, &c| {
                debug_assert!(c < self.n);
                acc * self.n + c
            })
    }

    pub fn cell_index(&self, mut index: usize) -> CellIndex {
        let mut coords = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            coords.push(index % self.n);
            index /= self.n;
        }
        CellIndex(coords)
    }

    /// Serializes in the coloring file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.d, self.n, self.num_colors);
        for row in self.cells.chunks(self.n) {
            let line: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Parses `d n num_colors` followed by `n^d` whitespace-separated colors.
pub fn parse_coloring(text: &str) -> Result<GridColoring, ParseError> {
    let mut tokens = text
        .lines()
        .enumerate()
        .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)));

    let mut header = [0usize; 3];
    let mut header_line = 1;
    for slot in header.iter_mut() {
        let (line, tok) = tokens.next().ok_or(ParseError::MissingHeader { line: header_line })?;
        header_line = line;
        *slot = tok.parse().map_err(|_| ParseError::BadHeader { line })?;
    }
    let [d, n, num_colors] = header;
    let num_colors = u32::try_from(num_colors).map_err(|_| ParseError::BadHeader { line: header_line })?;
    let expected = cell_count(d, n)?;
    if num_colors == 0 {
        return Err(GridError::EmptyParameter.into());
    }

    let mut cells = Vec::with_capacity(expected);
    for (line, tok) in tokens {
        let color: u32 = tok.parse().map_err(|_| ParseError::NotInteger {
            line,
            token: tok.to_string(),
        })?;
        if color >= num_colors {
            return Err(ParseError::ColorOutOfRange {
                line,
                color,
                num_colors,
            });
        }
        cells.push(color);
    }
    if cells.len() != expected {
        return Err(ParseError::WrongCount {
            expected,
            found: cells.len(),
        });
    }
    Ok(GridColoring::new(d, n, num_colors, cells)?)
}

/// Precomputed king-move neighborhoods for an `n^d` grid.
#[derive(Clone, Debug)]
pub struct GridTopology {
    d: usize,
    n: usize,
    neighbors: Vec<Vec<u32>>,
}

impl GridTopology {
    pub fn new(d: usize, n: usize) -> Result<Self, GridError> {
        let len = cell_count(d, n)?;
        let offsets: Vec<Vec<i64>> = (0..3usize.pow(d as u32))
            .map(|mut code| {
                (0..d)
                    .map(|_| {
                        let o = (code % 3) as i64 - 1;
                        code /= 3;
                        o
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|o| o.iter().any(|&x| x != 0))
            .collect();
        let strides: Vec<i64> = (0..d).map(|a| (n as i64).pow(a as u32)).collect();
        let mut neighbors = Vec::with_capacity(len);
        let mut coords = vec![0i64; d];
        for index in 0..len {
            let mut list = Vec::new();
            'offsets: for off in &offsets {
                let mut j = index as i64;
                for a in 0..d {
                    let c = coords[a] + off[a];
                    if c < 0 || c >= n as i64 {
                        continue 'offsets;
                    }
                    j += off[a] * strides[a];
                }
                list.push(j as u32);
            }
            neighbors.push(list);
            for c in coords.iter_mut() {
                *c += 1;
                if *c < n as i64 {
                    break;
                }
                *c = 0;
            }
        }
        Ok(GridTopology { d, n, neighbors })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, index: usize) -> &[u32] {
        &self.neighbors[index]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
pub struct FacetTouch {
    pub lower: bool,
    pub upper: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub color: u32,
    pub size: usize,
    /// Per axis: contains a cell with coordinate `0` / `n-1`.
    pub facets: Vec<FacetTouch>,
}

impl Component {
    pub fn spanned_axes(&self) -> impl Iterator<Item = usize> + '_ {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.lower && f.upper)
            .map(|(a, _)| a)
    }
}

/// Monochromatic components, labelled in order of their smallest cell index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub d: usize,
    pub n: usize,
    pub num_colors: u32,
    pub component_id: Vec<usize>,
    pub components: Vec<Component>,
    pub max_size: usize,
}

impl ComponentReport {
    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.components.iter().map(|c| c.size)
    }

    /// How many components attain `max_size`.
    pub fn max_count(&self) -> usize {
        self.sizes().filter(|&s| s == self.max_size).count()
    }

    pub fn to_json(&self) -> ComponentsJson {
        ComponentsJson {
            d: self.d,
            n: self.n,
            num_colors: self.num_colors,
            max_component: self.max_size,
            components: self
                .components
                .iter()
                .map(|c| ComponentJson {
                    color: c.color,
                    size: c.size,
                    spans: c.spanned_axes().map(|a| a + 1).collect(),
                })
                .collect(),
        }
    }
}

/// Serialized component report; `spans` lists 1-based axes.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentsJson {
    pub d: usize,
    pub n: usize,
    pub num_colors: u32,
    pub max_component: usize,
    pub components: Vec<ComponentJson>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentJson {
    pub color: u32,
    pub size: usize,
    pub spans: Vec<usize>,
}

pub fn components(g: &GridColoring) -> ComponentReport {
    let topo = GridTopology::new(g.d, g.n).expect("coloring dimensions already validated");
    components_with(&topo, g)
}

/// As [`components`], reusing a precomputed topology.
pub fn components_with(topo: &GridTopology, g: &GridColoring) -> ComponentReport {
    assert_eq!((topo.d, topo.n), (g.d, g.n), "topology does not match coloring");
    let len = g.len();
    let mut uf = UnionFind::new(len);
    for i in 0..len {
        let c = g.cells[i];
        for &j in topo.neighbors(i) {
            let j = j as usize;
            if j > i && g.cells[j] == c {
                uf.union(i, j);
            }
        }
    }
    let (component_id, count) = uf.labels();
    let mut components: Vec<Component> = Vec::with_capacity(count);
    let mut coords = vec![0usize; g.d];
    for (i, &label) in component_id.iter().enumerate() {
        if label == components.len() {
            components.push(Component {
                color: g.cells[i],
                size: 0,
                facets: vec![FacetTouch::default(); g.d],
            });
        }
        let comp = &mut components[label];
        comp.size += 1;
        for (f, &c) in comp.facets.iter_mut().zip(&coords) {
            f.lower |= c == 0;
            f.upper |= c == g.n - 1;
        }
        for c in coords.iter_mut() {
            *c += 1;
            if *c < g.n {
                break;
            }
            *c = 0;
        }
    }
    let max_size = components.iter().map(|c| c.size).max().unwrap_or(0);
    ComponentReport {
        d: g.d,
        n: g.n,
        num_colors: g.num_colors,
        component_id,
        components,
        max_size,
    }
}

/// A component touching both opposite facets of an axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Spanning {
    pub component: usize,
    pub axis: usize,
}

pub fn spanning_report(r: &ComponentReport) -> Vec<Spanning> {
    r.components
        .iter()
        .enumerate()
        .flat_map(|(component, c)| c.spanned_axes().map(move |axis| Spanning { component, axis }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_files() {
        let g = parse_coloring("2 2 2 \n 0 0 1 1").unwrap();
        assert_eq!((g.d(), g.n(), g.num_colors()), (2, 2, 2));
        assert_eq!(g.color_at(&CellIndex(vec![1, 0])), 0);
        assert_eq!(g.color_at(&CellIndex(vec![0, 1])), 1);
        let line = parse_coloring("1 3 1 \n 0 0 0").unwrap();
        assert_eq!(line.cells(), &[0, 0, 0]);
    }

    #[test]
    fn rejects_malformed_files() {
        assert_eq!(
            parse_coloring("2 2 2 \n 0 0 1 2"),
            Err(ParseError::ColorOutOfRange {
                line: 2,
                color: 2,
                num_colors: 2
            })
        );
        assert_eq!(
            parse_coloring("2 2 2\n0 0 1"),
            Err(ParseError::WrongCount {
                expected: 4,
                found: 3
            })
        );
        assert!(matches!(
            parse_coloring("2 2 2\n0 0\n1 x"),
            Err(ParseError::NotInteger { line: 3, .. })
        ));
        assert!(matches!(
            parse_coloring(""),
            Err(ParseError::MissingHeader { .. })
        ));
        assert!(matches!(
            parse_coloring("2 two 2\n"),
            Err(ParseError::BadHeader { line: 1 })
        ));
    }

    #[test]
    fn text_round_trip() {
        let g = GridColoring::from_fn(3, 3, 4, |c| (c[0] * 7 + c[1] * 3 + c[2]) as u32 % 4).unwrap();
        assert_eq!(parse_coloring(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn index_is_axis_one_fastest() {
        let g = GridColoring::uniform(3, 4, 1, 0).unwrap();
        assert_eq!(g.index_of(&CellIndex(vec![1, 0, 0])), 1);
        assert_eq!(g.index_of(&CellIndex(vec![0, 1, 0])), 4);
        assert_eq!(g.index_of(&CellIndex(vec![0, 0, 1])), 16);
        for i in 0..g.len() {
            assert_eq!(g.index_of(&g.cell_index(i)), i);
        }
    }

    #[test]
    fn single_color_is_one_component() {
        let r = components(&GridColoring::uniform(2, 2, 1, 0).unwrap());
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.max_size, 4);
        assert_eq!(spanning_report(&r).len(), 2);
    }

    #[test]
    fn checkerboard_diagonals_touch() {
        let g = GridColoring::new(2, 2, 2, vec![0, 1, 1, 0]).unwrap();
        let r = components(&g);
        assert_eq!(r.components.len(), 2);
        assert!(r.sizes().all(|s| s == 2));
    }

    #[test]
    fn diagonal_stripes_of_width_two() {
        // sizes from a BFS over the 6x6 grid
        let g = GridColoring::from_fn(2, 6, 2, |c| ((c[0] + c[1]) / 2 % 2) as u32).unwrap();
        let r = components(&g);
        let mut sizes: Vec<usize> = r.sizes().collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 3, 5, 7, 9, 11]);
        assert_eq!(r.max_size, 11);
    }

    #[test]
    fn left_column_spans_second_axis() {
        let g = GridColoring::from_fn(2, 3, 2, |c| u32::from(c[0] != 0)).unwrap();
        let r = components(&g);
        let spans = spanning_report(&r);
        assert_eq!(
            spans,
            vec![
                Spanning { component: 0, axis: 1 },
                Spanning { component: 1, axis: 1 }
            ]
        );
        assert_eq!(r.components[0].color, 0);
        assert_eq!(r.components[0].size, 3);
        assert_eq!(r.components[1].size, 6);
        let json = serde_json::to_value(r.to_json()).unwrap();
        assert_eq!(json["components"][0]["spans"], serde_json::json!([2]));
    }

    #[test]
    fn adjacency_is_symmetric_and_bounded() {
        for d in 1..=3 {
            let topo = GridTopology::new(d, 4).unwrap();
            let g = GridColoring::uniform(d, 4, 1, 0).unwrap();
            for i in 0..g.len() {
                assert!(topo.neighbors(i).len() < 3usize.pow(d as u32));
                for &j in topo.neighbors(i) {
                    assert!(topo.neighbors(j as usize).contains(&(i as u32)));
                    assert!(g.cell_index(i).adjacent(&g.cell_index(j as usize)));
                }
            }
        }
    }

    #[test]
    fn components_are_sound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let g = GridColoring::from_fn(3, 4, 3, |_| 0).unwrap();
            let cells: Vec<u32> = (0..g.len()).map(|_| rng.gen_range(0..3)).collect();
            let g = GridColoring::new(3, 4, 3, cells).unwrap();
            let r = components(&g);
            assert_eq!(r.sizes().sum::<usize>(), g.len());
            for i in 0..g.len() {
                for j in 0..g.len() {
                    let (a, b) = (g.cell_index(i), g.cell_index(j));
                    if g.color(i) == g.color(j) && a.adjacent(&b) {
                        assert_eq!(r.component_id[i], r.component_id[j]);
                    }
                }
                assert_eq!(r.components[r.component_id[i]].color, g.color(i));
            }
        }
    }
}
