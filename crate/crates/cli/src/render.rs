use cubecolor_core::gridcolor::{CellIndex, GridColoring};

use crate::ImageFormat;

/// A 2-dimensional view: `colors[y * width + x]`, with `x` along the first
/// free axis and `y` along the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plane {
    pub width: usize,
    pub height: usize,
    pub colors: Vec<u32>,
}

/// Parses `x3=0,x4=5` (1-based axes) and extracts the plane of the two
/// remaining axes.
pub fn slice_plane(g: &GridColoring, spec: Option<&str>) -> Result<Plane, String> {
    let (d, n) = (g.d(), g.n());
    if d < 2 {
        return Err(format!("render needs d >= 2, got d = {d}"));
    }
    let mut fixed: Vec<Option<usize>> = vec![None; d];
    for item in spec.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (axis, value) = item
            .split_once('=')
            .ok_or_else(|| format!("bad slice item {item:?}, expected xA=V"))?;
        let axis: usize = axis
            .trim()
            .strip_prefix('x')
            .and_then(|a| a.parse().ok())
            .filter(|a| (1..=d).contains(a))
            .ok_or_else(|| format!("bad slice axis in {item:?}; axes are x1..x{d}"))?;
        let value: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|v| *v < n)
            .ok_or_else(|| format!("bad slice value in {item:?}; cells are 0..{}", n - 1))?;
        if fixed[axis - 1].replace(value).is_some() {
            return Err(format!("axis x{axis} fixed twice"));
        }
    }
    let free: Vec<usize> = (0..d).filter(|&a| fixed[a].is_none()).collect();
    if free.len() != 2 {
        return Err(format!(
            "slice must leave exactly two free axes, leaves {}",
            free.len()
        ));
    }
    let mut colors = Vec::with_capacity(n * n);
    let mut coords: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    for y in 0..n {
        for x in 0..n {
            coords[free[0]] = x;
            coords[free[1]] = y;
            colors.push(g.color_at(&CellIndex(coords.clone())));
        }
    }
    Ok(Plane {
        width: n,
        height: n,
        colors,
    })
}

const PALETTE: [[u8; 3]; 10] = [
    [31, 119, 180],
    [255, 127, 14],
    [44, 160, 44],
    [214, 39, 40],
    [148, 103, 189],
    [140, 86, 75],
    [227, 119, 194],
    [127, 127, 127],
    [188, 189, 34],
    [23, 190, 207],
];

fn rgb(color: u32) -> [u8; 3] {
    match PALETTE.get(color as usize) {
        Some(c) => *c,
        None => {
            let c = color.wrapping_mul(2_654_435_761);
            [(c >> 24) as u8, (c >> 16) as u8, (c >> 8) as u8]
        }
    }
}

/// Binary PGM (P5) with evenly spaced gray levels, or PPM (P6) with a
/// fixed palette; one pixel per cell.
pub fn encode(plane: &Plane, num_colors: u32, format: ImageFormat) -> Vec<u8> {
    let magic = match format {
        ImageFormat::Pgm => "P5",
        ImageFormat::Ppm => "P6",
    };
    let mut out = format!("{magic}\n{} {}\n255\n", plane.width, plane.height).into_bytes();
    for &c in &plane.colors {
        match format {
            ImageFormat::Pgm => {
                let level = if num_colors <= 1 {
                    0
                } else {
                    c as u64 * 255 / (num_colors as u64 - 1)
                };
                out.push(level as u8);
            }
            ImageFormat::Ppm => out.extend_from_slice(&rgb(c)),
        }
    }
    out
}
