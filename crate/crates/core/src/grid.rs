//! Uniform spatial grid over the ULD bounding box. Loaded placements are
//! registered in every half-open cubic cell their box intersects, so
//! collision and support checks only need to look at nearby candidates.

use crate::geometry::{Point, Size};
use crate::model::Item;

/// Cell edge length is the mean item edge, kept as an exact rational
/// sum / (3 * item count) so cell indexing stays integer-exact. The
/// division is strength-reduced to a reciprocal multiplication: cell
/// lookups sit on the hottest path of every feasibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellSize {
    /// Sum of all item edge lengths.
    num: i64,
    /// 3 * number of items.
    den: i64,
    /// floor(2^64 / num), for exact floor division by `num`.
    reciprocal: u128,
}

impl CellSize {
    fn new(num: i64, den: i64) -> CellSize {
        debug_assert!(num > 0 && den > 0);
        CellSize {
            num,
            den,
            reciprocal: u128::from(u64::MAX) / num as u128 + 1,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// floor(value / cell_size), exact for non-negative values.
    #[inline]
    fn cell_of(&self, value: i64) -> i64 {
        debug_assert!(value >= 0);
        let a = value as u64 * self.den as u64;
        let mut q = ((a as u128 * self.reciprocal) >> 64) as u64;
        // The reciprocal estimate is off by at most one.
        if (q + 1) * self.num as u64 <= a {
            q += 1;
        }
        if q * self.num as u64 > a {
            q -= 1;
        }
        q as i64
    }
}

/// Mean edge length over all items and dimensions. Errors on an empty set.
pub fn mean_edge(items: &[Item]) -> Result<CellSize, EmptyItemSet> {
    mean_edge_of(items.iter().map(|i| i.size))
}

/// Mean edge length over an iterator of sizes.
pub fn mean_edge_of(sizes: impl Iterator<Item = Size>) -> Result<CellSize, EmptyItemSet> {
    let mut num = 0i64;
    let mut count = 0i64;
    for s in sizes {
        num += s.iter().sum::<i64>();
        count += 1;
    }
    if count == 0 {
        return Err(EmptyItemSet);
    }
    Ok(CellSize::new(num, 3 * count))
}

#[derive(Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot compute mean edge of an empty item set")]
pub struct EmptyItemSet;

/// One registration: the placement index plus its box, kept inline so
/// collision scans stay cache-local.
#[derive(Debug, Clone, Copy)]
struct CellEntry {
    index: u32,
    min: [i32; 3],
    max: [i32; 3],
}

#[derive(Debug, Clone)]
pub struct Grid {
    cell: CellSize,
    dims: [usize; 3],
    /// Registrations per cell, in registration order.
    cells: Vec<Vec<CellEntry>>,
    /// Deduplication stamps, one per registered placement.
    stamps: Vec<u32>,
    generation: u32,
}

impl Grid {
    pub fn new(bounding_box: Size, cell: CellSize) -> Grid {
        let mut dims = [1usize; 3];
        for d in 0..3 {
            if bounding_box[d] > 0 {
                dims[d] = cell.cell_of(bounding_box[d] - 1) as usize + 1;
            }
        }
        Grid {
            cell,
            dims,
            cells: vec![Vec::new(); dims[0] * dims[1] * dims[2]],
            stamps: Vec::new(),
            generation: 0,
        }
    }

    pub fn cell_size(&self) -> CellSize {
        self.cell
    }

    /// Drop all registrations, keeping the allocated cell buffers for the
    /// next run over the same ULD.
    pub fn clear(&mut self) {
        for cell in &mut self.cells {
            cell.clear();
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Inclusive cell index ranges intersected by the half-open box
    /// [position, position + size), clamped to the grid. A zero-extent
    /// query (size 0 in some dimension) yields the cell of `position`.
    pub fn cells_for_box(&self, position: Point, size: Size) -> [(usize, usize); 3] {
        let mut r = [(0usize, 0usize); 3];
        for d in 0..3 {
            let lo = self.cell.cell_of(position[d]);
            let hi = self.cell.cell_of(position[d] + (size[d] - 1).max(0));
            let max = self.dims[d] as i64 - 1;
            r[d] = (
                lo.clamp(0, max) as usize,
                hi.clamp(0, max) as usize,
            );
        }
        r
    }

    fn cell_index(&self, ix: usize, iy: usize, iz: usize) -> usize {
        (ix * self.dims[1] + iy) * self.dims[2] + iz
    }

    /// Register placement `index` with the given box.
    pub fn register(&mut self, index: u32, position: Point, size: Size) {
        let entry = CellEntry {
            index,
            min: [position[0] as i32, position[1] as i32, position[2] as i32],
            max: [
                (position[0] + size[0]) as i32,
                (position[1] + size[1]) as i32,
                (position[2] + size[2]) as i32,
            ],
        };
        let r = self.cells_for_box(position, size);
        for ix in r[0].0..=r[0].1 {
            for iy in r[1].0..=r[1].1 {
                for iz in r[2].0..=r[2].1 {
                    let c = self.cell_index(ix, iy, iz);
                    self.cells[c].push(entry);
                }
            }
        }
        if self.stamps.len() <= index as usize {
            self.stamps.resize(index as usize + 1, 0);
        }
    }

    /// Collect the distinct placement indices registered in cells
    /// intersecting the query box, in first-encounter order.
    pub fn query_box(&mut self, position: Point, size: Size, out: &mut Vec<u32>) {
        out.clear();
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamps.fill(0);
            self.generation = 1;
        }
        let r = self.cells_for_box(position, size);
        for ix in r[0].0..=r[0].1 {
            for iy in r[1].0..=r[1].1 {
                for iz in r[2].0..=r[2].1 {
                    let c = self.cell_index(ix, iy, iz);
                    for entry in &self.cells[c] {
                        let stamp = &mut self.stamps[entry.index as usize];
                        if *stamp != self.generation {
                            *stamp = self.generation;
                            out.push(entry.index);
                        }
                    }
                }
            }
        }
    }

    /// Candidates for the collision check: placements near the box itself.
    pub fn candidates_colliding(&mut self, position: Point, size: Size, out: &mut Vec<u32>) {
        self.query_box(position, size, out);
    }

    /// Strict open-box collision query against the registered boxes,
    /// resolved entirely inside the grid's cache-local entries.
    pub fn any_box_collides(&self, position: Point, size: Size) -> bool {
        let qmin = [position[0] as i32, position[1] as i32, position[2] as i32];
        let qmax = [
            (position[0] + size[0]) as i32,
            (position[1] + size[1]) as i32,
            (position[2] + size[2]) as i32,
        ];
        let r = self.cells_for_box(position, size);
        for ix in r[0].0..=r[0].1 {
            for iy in r[1].0..=r[1].1 {
                for iz in r[2].0..=r[2].1 {
                    let c = self.cell_index(ix, iy, iz);
                    for e in &self.cells[c] {
                        if qmin[0] < e.max[0]
                            && e.min[0] < qmax[0]
                            && qmin[1] < e.max[1]
                            && e.min[1] < qmax[1]
                            && qmin[2] < e.max[2]
                            && e.min[2] < qmax[2]
                        {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Candidates for the support check: placements intersecting the slab
    /// [z - padding - eps, z) under the footprint. With integer
    /// coordinates, eps is realized by extending the slab one unit down.
    pub fn candidates_below(
        &mut self,
        position: Point,
        size: Size,
        max_padding_height: i64,
        out: &mut Vec<u32>,
    ) {
        let z_lo = (position[2] - max_padding_height - 1).max(0);
        let z_hi = position[2]; // half-open: cells up to floor((z-1)/cell)
        let query_pos = [position[0], position[1], z_lo];
        let query_size = [size[0], size[1], (z_hi - z_lo).max(0)];
        self.query_box(query_pos, query_size, out);
    }
}
