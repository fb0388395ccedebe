use num_traits::Zero;

use super::{NerveError, ShiftedPartition};
use crate::chains::{BoxCell, Rational};
use crate::gridcolor::GridColoring;
use crate::unionfind::UnionFind;

/// A monochromatic connected union of partition cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub id: usize,
    pub color: u32,
    /// Partition cell indices, ascending.
    pub cells: Vec<usize>,
    pub boxes: Vec<BoxCell>,
    pub volume: Rational,
}

/// Parts of a colored partition, with the owning part of every cell.
#[derive(Clone, Debug)]
pub struct Parts {
    pub parts: Vec<Part>,
    pub part_of: Vec<usize>,
}

impl Parts {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn get(&self, id: usize) -> &Part {
        &self.parts[id]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Part> {
        self.parts.iter()
    }
}

/// Colors every partition cell by its provenance and joins same-colored
/// cells whose closed boxes meet. Parts are numbered by smallest cell index.
pub fn mono_parts(p: &ShiftedPartition, g: &GridColoring) -> Result<Parts, NerveError> {
    if g.d() != p.d() || g.n() != p.n() {
        return Err(NerveError::GridMismatch {
            d: p.d(),
            n: p.n(),
            found_d: g.d(),
            found_n: g.n(),
        });
    }
    let colors: Vec<u32> = (0..p.len()).map(|i| g.color(p.provenance_index(i))).collect();
    let mut uf = UnionFind::new(p.len());
    for (i, &color) in colors.iter().enumerate() {
        for &j in p.neighbors(i) {
            if j > i && colors[j] == color {
                uf.union(i, j);
            }
        }
    }
    let (labels, count) = uf.labels();
    let mut parts: Vec<Part> = (0..count)
        .map(|id| Part {
            id,
            color: 0,
            cells: Vec::new(),
            boxes: Vec::new(),
            volume: Rational::zero(),
        })
        .collect();
    for (i, &label) in labels.iter().enumerate() {
        let part = &mut parts[label];
        let cell = &p.cells()[i].bounds;
        part.color = colors[i];
        part.cells.push(i);
        part.volume += cell.volume();
        part.boxes.push(cell.clone());
    }
    Ok(Parts {
        parts,
        part_of: labels,
    })
}
