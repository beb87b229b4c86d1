//! Checks deciding whether an item may be loaded at a point: wall
//! exceedance, collision, weight capacity, and the combined non-floating /
//! stackability check. Each check exists in a grid-backed fast form and,
//! with the grid disabled, a naive full-scan form.

use crate::geometry::{
    base_area_overlap, fits_bounding_box, triple_base_area_overlap, Point, Size,
};
use crate::grid::Grid;
use crate::model::{CornerSupportMode, PackingParams, Placement, Uld};

/// Strict open-box intersection: touching faces or edges is not a
/// collision.
pub fn collides(a_pos: Point, a_size: Size, b_pos: Point, b_size: Size) -> bool {
    (0..3).all(|d| b_pos[d] < a_pos[d] + a_size[d] && a_pos[d] < b_pos[d] + b_size[d])
}

/// Outcome of the non-floating and stackability check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportReport {
    pub directly_supported: bool,
    pub supported_area: i64,
    pub supported_corners: u8,
    pub verdict: bool,
}

/// Budget of extreme-point checks; the deterministic stop criterion.
#[derive(Debug, Clone, Copy)]
pub struct CheckBudget {
    pub used: u64,
    pub max: u64,
    /// While false the counter still runs but never aborts (used to
    /// guarantee a minimum number of search iterations).
    pub enforced: bool,
}

impl CheckBudget {
    pub fn new(max: u64) -> CheckBudget {
        CheckBudget {
            used: 0,
            max,
            enforced: true,
        }
    }

    pub fn exhausted(&self) -> bool {
        self.used >= self.max
    }

    fn consume(&mut self) -> Result<(), BudgetExhausted> {
        if self.enforced && self.used >= self.max {
            return Err(BudgetExhausted);
        }
        self.used += 1;
        Ok(())
    }
}

/// Signal that the check budget ran out; the caller stops iterating.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BudgetExhausted;

/// Mutable per-ULD loading state: accepted placements, the accelerating
/// grid, and running totals.
#[derive(Debug, Clone)]
pub struct LoadState<'a> {
    pub uld: &'a Uld,
    pub packing: &'a PackingParams,
    pub placements: Vec<Placement>,
    grid: Option<Grid>,
    pub loaded_weight: i64,
    scratch: Vec<u32>,
    support_buf: Vec<SupportEntry>,
}

// (top, insertion order, pos, size, stackable)
type SupportEntry = (i64, u32, Point, Size, bool);

impl<'a> LoadState<'a> {
    pub fn new(uld: &'a Uld, packing: &'a PackingParams, grid: Option<Grid>) -> LoadState<'a> {
        LoadState {
            uld,
            packing,
            placements: Vec::new(),
            grid,
            loaded_weight: 0,
            scratch: Vec::new(),
            support_buf: Vec::new(),
        }
    }

    /// Accept a placement (item or dummy) without further checks.
    pub fn place(&mut self, placement: Placement) {
        let index = self.placements.len() as u32;
        if let Some(grid) = &mut self.grid {
            grid.register(index, placement.position, placement.size);
        }
        if !placement.is_dummy() {
            self.loaded_weight += placement.weight;
        }
        self.placements.push(placement);
    }

    /// Whether a box at `position` collides with any placement.
    pub fn collides_any(&mut self, position: Point, size: Size) -> bool {
        match &self.grid {
            Some(grid) => grid.any_box_collides(position, size),
            None => self
                .placements
                .iter()
                .any(|p| collides(position, size, p.position, p.size)),
        }
    }

    /// Non-floating and stackability check for a box at `position`.
    ///
    /// The candidate set is restricted to placements whose top surface
    /// lies within padding reach below the box and whose footprint
    /// properly overlaps it; a full-footprint floor of height 0 is
    /// always considered. Iterating from the highest surface down, the
    /// supported area is accumulated with a pairwise subtraction so that
    /// area hidden under a higher (stackable or not) surface is not
    /// counted twice; the result never exceeds the exact union area.
    pub fn support(&mut self, position: Point, size: Size) -> SupportReport {
        let slab_lo = position[2] - self.packing.max_padding_height;
        let bottom = position[2];

        // The ULD floor is a virtual entry. Ties in top height break by
        // insertion order so grid-backed and naive scans agree.
        let mut relevant = std::mem::take(&mut self.support_buf);
        relevant.clear();
        if 0 >= slab_lo && 0 <= bottom {
            let b = self.uld.bounding_box;
            relevant.push((0, 0, [0, 0, 0], [b[0], b[1], 0], true));
        }
        let consider = |relevant: &mut Vec<SupportEntry>, seq: u32, p: &Placement| {
            let top = p.top();
            if top >= slab_lo
                && top <= bottom
                && base_area_overlap(position, size, p.position, p.size) > 0
            {
                relevant.push((top, seq + 1, p.position, p.size, p.stackable));
            }
        };
        match &mut self.grid {
            Some(grid) => {
                grid.candidates_below(
                    position,
                    size,
                    self.packing.max_padding_height,
                    &mut self.scratch,
                );
                for &i in &self.scratch {
                    consider(&mut relevant, i, &self.placements[i as usize]);
                }
            }
            None => {
                for (i, p) in self.placements.iter().enumerate() {
                    consider(&mut relevant, i as u32, p);
                }
            }
        }
        relevant.sort_unstable_by_key(|r| (std::cmp::Reverse(r.0), r.1));

        let mut directly_supported = false;
        let mut total_area = 0i64;
        let mut corner_mask = 0u8;
        let mut stacking_violation = false;
        let corners = [
            [position[0], position[1]],
            [position[0] + size[0], position[1]],
            [position[0], position[1] + size[1]],
            [position[0] + size[0], position[1] + size[1]],
        ];
        for (idx, &(top, _, lpos, lsize, stackable)) in relevant.iter().enumerate() {
            let rests_directly = top == bottom;
            if !stackable {
                if rests_directly {
                    // Stackability violation: nothing may rest on a
                    // non-stackable item.
                    stacking_violation = true;
                    break;
                }
                continue;
            }
            if rests_directly {
                directly_supported = true;
                for (c, corner) in corners.iter().enumerate() {
                    if lpos[0] <= corner[0]
                        && corner[0] <= lpos[0] + lsize[0]
                        && lpos[1] <= corner[1]
                        && corner[1] <= lpos[1] + lsize[1]
                    {
                        corner_mask |= 1 << c;
                    }
                }
            }
            let mut additional = base_area_overlap(position, size, lpos, lsize);
            for &(_, _, jpos, jsize, _) in &relevant[..idx] {
                additional -=
                    triple_base_area_overlap(position, size, lpos, lsize, jpos, jsize);
            }
            if additional > 0 {
                total_area += additional;
            }
        }
        self.support_buf = relevant;

        let corners_supported = count_bits(corner_mask);
        let base_area = (size[0] * size[1]) as f64;
        let area_ok = total_area as f64 >= self.packing.min_item_overlap * base_area - 1e-6;
        let verdict = !stacking_violation
            && match self.packing.corner_support_mode {
                CornerSupportMode::Full => {
                    directly_supported && (corners_supported == 4 || area_ok)
                }
                CornerSupportMode::CornersOnly => directly_supported && corners_supported == 4,
            };
        SupportReport {
            directly_supported,
            supported_area: total_area,
            supported_corners: corners_supported,
            verdict,
        }
    }

    /// Whether an item of oriented `size` and `weight` can be loaded at
    /// `position`: bounding box, tilted facets, weight capacity, no
    /// collision, and sufficient support. Consumes one unit of the check
    /// budget.
    pub fn can_load_at(
        &mut self,
        size: Size,
        weight: i64,
        position: Point,
        budget: &mut CheckBudget,
    ) -> Result<bool, BudgetExhausted> {
        budget.consume()?;
        if !fits_bounding_box(position, size, self.uld.bounding_box) {
            return Ok(false);
        }
        for plane in self.uld.tilted_planes() {
            if !plane.box_inside(position, size) {
                return Ok(false);
            }
        }
        if self.loaded_weight + weight > self.uld.weight_capacity {
            return Ok(false);
        }
        if self.collides_any(position, size) {
            return Ok(false);
        }
        Ok(self.support(position, size).verdict)
    }

    pub fn loaded_volume(&self) -> i64 {
        self.placements
            .iter()
            .filter(|p| !p.is_dummy())
            .map(Placement::volume)
            .sum()
    }

    /// Reclaim the grid for reuse by a later run.
    pub fn take_grid(&mut self) -> Option<Grid> {
        self.grid.take()
    }
}

fn count_bits(mask: u8) -> u8 {
    mask.count_ones() as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Orientation, Placed};

    fn placement(pos: Point, size: Size, stackable: bool) -> Placement {
        Placement {
            placed: Placed::Item(0),
            orientation: Orientation::IDENTITY,
            position: pos,
            size,
            stackable,
            weight: 1,
        }
    }

    fn state<'a>(uld: &'a Uld, packing: &'a PackingParams) -> LoadState<'a> {
        LoadState::new(uld, packing, None)
    }

    #[test]
    fn touching_boxes_do_not_collide() {
        assert!(!collides([0, 0, 0], [2, 2, 2], [2, 0, 0], [2, 2, 2]));
        assert!(collides([0, 0, 0], [2, 2, 2], [1, 1, 1], [2, 2, 2]));
        assert!(collides([0, 0, 0], [4, 1, 1], [3, 0, 0], [4, 1, 1]));
    }

    #[test]
    fn floor_supports_full_footprint() {
        let uld = Uld::cuboid("c", [10, 10, 10], 1000).unwrap();
        let packing = PackingParams::default();
        let mut st = state(&uld, &packing);
        let rep = st.support([0, 0, 0], [4, 4, 2]);
        assert!(rep.directly_supported);
        assert_eq!(rep.supported_area, 16);
        assert_eq!(rep.supported_corners, 4);
        assert!(rep.verdict);
    }

    #[test]
    fn stacked_supports_only_count_visible_area() {
        // Three loaded items, candidate on top; the padding height equals
        // the gap between the candidate and the lowest item. The pairwise
        // subtraction credits only the topmost support's footprint.
        let uld = Uld::cuboid("c", [50, 10, 25], 10_000).unwrap();
        let mut packing = PackingParams::default();
        packing.max_padding_height = 10;
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [40, 10, 5], true)); // item 1
        st.place(placement([20, 0, 5], [20, 10, 5], true)); // item 2
        st.place(placement([20, 0, 10], [20, 10, 5], true)); // item 3
        let rep = st.support([0, 0, 15], [40, 10, 5]); // item 4
        assert!(rep.directly_supported);
        assert_eq!(rep.supported_area, 20 * 10); // item 3's footprint only
    }

    #[test]
    fn overlap_threshold_controls_verdict() {
        let uld = Uld::cuboid("c", [20, 10, 20], 10_000).unwrap();
        let mut packing = PackingParams::default();
        packing.max_padding_height = 0;
        // Support covers exactly half the candidate footprint.
        packing.min_item_overlap = 0.9;
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [5, 10, 4], true));
        let rep = st.support([0, 0, 4], [10, 10, 4]);
        assert!(rep.directly_supported);
        assert_eq!(rep.supported_area, 50);
        assert!(!rep.verdict);

        packing.min_item_overlap = 0.5;
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [5, 10, 4], true));
        assert!(st.support([0, 0, 4], [10, 10, 4]).verdict);
    }

    #[test]
    fn resting_on_non_stackable_is_rejected() {
        let uld = Uld::cuboid("c", [20, 10, 20], 10_000).unwrap();
        let packing = PackingParams::default();
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [10, 10, 4], false));
        let rep = st.support([0, 0, 4], [10, 10, 4]);
        assert!(!rep.verdict);
        // Even full side support elsewhere cannot save it.
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [10, 10, 4], false));
        st.place(placement([10, 0, 0], [10, 10, 4], true));
        let rep = st.support([5, 0, 4], [10, 10, 4]);
        assert!(!rep.verdict);
    }

    #[test]
    fn non_stackable_between_blocks_support_area() {
        // A non-stackable surface above a stackable one hides its area.
        let uld = Uld::cuboid("c", [20, 10, 30], 10_000).unwrap();
        let mut packing = PackingParams::default();
        packing.max_padding_height = 6;
        packing.min_item_overlap = 0.9;
        let mut st = state(&uld, &packing);
        st.place(placement([0, 0, 0], [20, 10, 4], true)); // stackable, top 4
        st.place(placement([0, 0, 4], [10, 10, 2], false)); // non-stackable, top 6
        // Candidate bottom at 8: direct rest on nothing? top 6 < 8, padding 6
        // reaches both tops (4 and 6). No direct support -> verdict false,
        // but area should only credit the uncovered half of the floor item.
        let rep = st.support([0, 0, 8], [20, 10, 4]);
        assert!(!rep.directly_supported);
        assert_eq!(rep.supported_area, 10 * 10);
        assert!(!rep.verdict);
    }

    #[test]
    fn corners_only_mode_requires_four_corners() {
        let uld = Uld::cuboid("c", [20, 20, 20], 10_000).unwrap();
        let mut packing = PackingParams::default();
        packing.corner_support_mode = CornerSupportMode::CornersOnly;
        packing.max_padding_height = 0;
        let mut st = state(&uld, &packing);
        // Two pedestals under the left corners only.
        st.place(placement([0, 0, 0], [2, 20, 4], true));
        let rep = st.support([0, 0, 4], [10, 10, 4]);
        assert!(rep.directly_supported);
        assert!(!rep.verdict);
        // Full floor rest passes.
        let rep = st.support([4, 0, 0], [10, 10, 4]);
        assert_eq!(rep.supported_corners, 4);
        assert!(rep.verdict);
    }

    #[test]
    fn can_load_at_checks_all_constraints() {
        let uld = Uld::cuboid("c", [10, 10, 10], 50).unwrap();
        let packing = PackingParams::default();
        let mut budget = CheckBudget::new(100);
        let mut st = state(&uld, &packing);
        assert_eq!(
            st.can_load_at([10, 10, 10], 50, [0, 0, 0], &mut budget),
            Ok(true)
        );
        // Exceeds remaining weight capacity.
        assert_eq!(
            st.can_load_at([10, 10, 10], 51, [0, 0, 0], &mut budget),
            Ok(false)
        );
        // Wall exceedance.
        assert_eq!(
            st.can_load_at([10, 10, 10], 1, [1, 0, 0], &mut budget),
            Ok(false)
        );
        assert_eq!(budget.used, 3);
    }

    #[test]
    fn budget_exhaustion_signals() {
        let uld = Uld::cuboid("c", [10, 10, 10], 50).unwrap();
        let packing = PackingParams::default();
        let mut st = state(&uld, &packing);
        let mut budget = CheckBudget::new(1);
        assert!(st.can_load_at([1, 1, 1], 0, [0, 0, 0], &mut budget).is_ok());
        assert_eq!(
            st.can_load_at([1, 1, 1], 0, [0, 0, 0], &mut budget),
            Err(BudgetExhausted)
        );
        // Unenforced budgets keep counting but never abort.
        budget.enforced = false;
        assert!(st.can_load_at([1, 1, 1], 0, [0, 0, 0], &mut budget).is_ok());
        assert_eq!(budget.used, 2);
    }
}
