//! The insertion heuristic: adapt the ULD with edge/substructure dummy
//! items, build the ordered loading list, and greedily load each item at
//! the first feasible extreme point.

use rand::Rng;

use crate::extreme_points::{generate_new_points, move_point, EpStore};
use crate::feasibility::{BudgetExhausted, CheckBudget, LoadState};
use crate::grid::{self, Grid};
use crate::model::{
    AlgoParams, Item, Orientation, PackingParams, Placed, Placement, Uld, Z,
};
use crate::ordering::{build_order, SortCriterion};

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("ULD {0} does not allow a substructure")]
pub struct SubstructureNotAllowed(pub String);

/// Dummy placements blocking the ULD edge and, optionally, modelling a
/// substructure: four non-stackable frames of height edge_offset - 1
/// along the floor perimeter, plus one stackable raised floor of height
/// edge_offset covering the interior when a substructure is used.
pub fn adapt_uld(
    uld: &Uld,
    use_substructure: bool,
) -> Result<Vec<Placement>, SubstructureNotAllowed> {
    if use_substructure && !uld.substructure_allowed {
        return Err(SubstructureNotAllowed(uld.id.clone()));
    }
    let mut dummies = Vec::new();
    let [bx, by, _] = uld.bounding_box;
    let e = uld.edge_width;
    let off = uld.edge_offset;
    let frame = |pos, size| Placement {
        placed: Placed::EdgeDummy,
        orientation: Orientation::IDENTITY,
        position: pos,
        size,
        stackable: false,
        weight: 0,
    };
    if e > 0 && off > 0 {
        // Items may overlap the edge at height >= edge_offset: the frames
        // stop one unit short so such items do not rest on them.
        let h = off - 1;
        dummies.push(frame([0, 0, 0], [bx, e, h]));
        dummies.push(frame([0, by - e, 0], [bx, e, h]));
        if by > 2 * e {
            dummies.push(frame([0, e, 0], [e, by - 2 * e, h]));
            dummies.push(frame([bx - e, e, 0], [e, by - 2 * e, h]));
        }
    }
    if use_substructure && off > 0 {
        dummies.push(Placement {
            placed: Placed::SubstructureDummy,
            orientation: Orientation::IDENTITY,
            position: [e, e, 0],
            size: [bx - 2 * e, by - 2 * e, off],
            stackable: true,
            weight: 0,
        });
    }
    Ok(dummies)
}

/// Result of one insertion run.
#[derive(Debug, Clone)]
pub struct InsertionResult {
    pub placements: Vec<Placement>,
    /// Original indices of the items loaded in this run.
    pub loaded: Vec<usize>,
    /// The run was cut short by the check budget.
    pub budget_exhausted: bool,
}

/// One greedy first-fit pass over the item list (Algorithm-1 shape):
/// initialize the extreme points at the origin, adapt the ULD, build the
/// ordered list, then load every item at the first feasible (possibly
/// moved) extreme point and orientation, regenerating points after each
/// success.
#[allow(clippy::too_many_arguments)]
pub fn load_single_uld(
    items: &[Item],
    available: &[usize],
    uld: &Uld,
    packing: &PackingParams,
    algo: &AlgoParams,
    criterion: SortCriterion,
    randomization: f64,
    use_substructure: bool,
    rng: &mut impl Rng,
    budget: &mut CheckBudget,
) -> Result<InsertionResult, SubstructureNotAllowed> {
    load_single_uld_cached(
        items,
        available,
        uld,
        packing,
        algo,
        criterion,
        randomization,
        use_substructure,
        rng,
        budget,
        &mut None,
    )
}

/// `load_single_uld` with a reusable grid slot: repeated runs over the
/// same ULD and item set (the search loop) skip re-allocating the cell
/// buffers.
#[allow(clippy::too_many_arguments)]
pub fn load_single_uld_cached(
    items: &[Item],
    available: &[usize],
    uld: &Uld,
    packing: &PackingParams,
    algo: &AlgoParams,
    criterion: SortCriterion,
    randomization: f64,
    use_substructure: bool,
    rng: &mut impl Rng,
    budget: &mut CheckBudget,
    grid_cache: &mut Option<Grid>,
) -> Result<InsertionResult, SubstructureNotAllowed> {
    let mut store = EpStore::init(uld, algo.ep_sort_order);
    let dummies = adapt_uld(uld, use_substructure)?;

    let grid = if algo.variant.no_grid {
        None
    } else {
        grid::mean_edge_of(available.iter().map(|&i| items[i].size))
            .ok()
            .map(|cell| match grid_cache.take() {
                Some(mut g) if g.cell_size() == cell => {
                    g.clear();
                    g
                }
                _ => Grid::new(uld.bounding_box, cell),
            })
    };
    let mut state = LoadState::new(uld, packing, grid);
    for dummy in dummies {
        let points = generate_new_points(&state.placements, &dummy, uld, &algo.variant);
        state.place(dummy);
        store.extend(points, uld);
    }

    let order = build_order(items, available, criterion, randomization, rng);
    let critical = uld.critical_plane();
    let mut loaded_flags = vec![false; items.len()];
    let mut loaded = Vec::new();

    let mut oriented: Vec<(Orientation, [i64; 3])> = Vec::new();
    'entries: for entry in &order {
        if loaded_flags[entry.item] {
            continue;
        }
        let item = &items[entry.item];
        oriented.clear();
        oriented.extend(
            entry
                .orientations
                .iter()
                .map(|&o| (o, o.apply(item.size))),
        );
        let mut point_idx = 0;
        while let Some(ep) = store.get(point_idx) {
            point_idx += 1;
            for &(orientation, size) in &oriented {
                let mut position = ep.coords;
                if ep.movable && algo.variant.moving_enabled() {
                    if let Some(critical) = critical {
                        if let Some(moved) = move_point(ep.coords, size[Z], critical) {
                            position = moved.position;
                        }
                    }
                }
                match state.can_load_at(size, item.weight, position, budget) {
                    Ok(true) => {
                        let placement = Placement {
                            placed: Placed::Item(entry.item),
                            orientation,
                            position,
                            size,
                            stackable: item.stackable,
                            weight: item.weight,
                        };
                        let points =
                            generate_new_points(&state.placements, &placement, uld, &algo.variant);
                        state.place(placement);
                        store.extend(points, uld);
                        loaded_flags[entry.item] = true;
                        loaded.push(entry.item);
                        continue 'entries;
                    }
                    Ok(false) => {}
                    Err(BudgetExhausted) => {
                        *grid_cache = state.take_grid();
                        return Ok(InsertionResult {
                            placements: state.placements,
                            loaded,
                            budget_exhausted: true,
                        });
                    }
                }
            }
        }
    }
    *grid_cache = state.take_grid();
    Ok(InsertionResult {
        placements: state.placements,
        loaded,
        budget_exhausted: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EpSortOrder, UldLoad};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn item(id: &str, size: [i64; 3]) -> Item {
        Item {
            id: id.into(),
            size,
            weight: 1,
            rotatable: true,
            tiltable: true,
            stackable: true,
        }
    }

    fn run(
        items: &[Item],
        uld: &Uld,
        use_substructure: bool,
    ) -> InsertionResult {
        let packing = PackingParams::default();
        let algo = AlgoParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut budget = CheckBudget::new(1_000_000);
        let avail: Vec<usize> = (0..items.len()).collect();
        load_single_uld(
            items,
            &avail,
            uld,
            &packing,
            &algo,
            SortCriterion::CumulatedVolume,
            0.0,
            use_substructure,
            &mut rng,
            &mut budget,
        )
        .unwrap()
    }

    #[test]
    fn no_edge_means_no_dummies() {
        let uld = Uld::cuboid("c", [10, 10, 10], 100).unwrap();
        assert!(adapt_uld(&uld, false).unwrap().is_empty());
    }

    #[test]
    fn edge_frames_have_reduced_height() {
        let mut uld = Uld::cuboid("c", [100, 100, 100], 1000).unwrap();
        uld.edge_width = 10;
        uld.edge_offset = 10;
        let dummies = adapt_uld(&uld, false).unwrap();
        assert_eq!(dummies.len(), 4);
        assert!(dummies.iter().all(|d| d.size[Z] == 9 && !d.stackable));
    }

    #[test]
    fn substructure_adds_a_stackable_interior_dummy() {
        let mut uld = Uld::cuboid("c", [100, 100, 100], 1000).unwrap();
        uld.edge_width = 10;
        uld.edge_offset = 10;
        uld.substructure_allowed = true;
        let dummies = adapt_uld(&uld, true).unwrap();
        assert_eq!(dummies.len(), 5);
        let sub = dummies.last().unwrap();
        assert_eq!(sub.placed, Placed::SubstructureDummy);
        assert!(sub.stackable);
        assert_eq!(sub.position, [10, 10, 0]);
        assert_eq!(sub.size, [80, 80, 10]);
        // Frames stay either way.
        assert_eq!(
            dummies.iter().filter(|d| d.placed == Placed::EdgeDummy).count(),
            4
        );
    }

    #[test]
    fn substructure_requires_permission() {
        let mut uld = Uld::cuboid("c", [100, 100, 100], 1000).unwrap();
        uld.edge_width = 10;
        uld.edge_offset = 10;
        assert!(adapt_uld(&uld, true).is_err());
    }

    #[test]
    fn empty_item_set_loads_nothing() {
        let uld = Uld::cuboid("c", [10, 10, 10], 100).unwrap();
        let result = run(&[], &uld, false);
        assert!(result.placements.is_empty());
        assert!(result.loaded.is_empty());
    }

    #[test]
    fn unit_cube_fills_unit_uld() {
        let uld = Uld::cuboid("c", [4, 4, 4], 100).unwrap();
        let items = vec![item("a", [4, 4, 4])];
        let result = run(&items, &uld, false);
        assert_eq!(result.loaded, vec![0]);
        assert_eq!(result.placements[0].position, [0, 0, 0]);
        let load = UldLoad {
            uld_type: 0,
            substructure_used: false,
            placements: result.placements,
        };
        assert!((load.utilization(&uld) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identical_boxes_tile_the_uld() {
        let uld = Uld::cuboid("c", [10, 10, 10], 10_000).unwrap();
        let items: Vec<Item> = (0..8).map(|i| item(&format!("b{i}"), [5, 5, 5])).collect();
        let result = run(&items, &uld, false);
        assert_eq!(result.loaded.len(), 8);
    }

    #[test]
    fn items_load_above_the_edge_dummies() {
        let mut uld = Uld::cuboid("c", [40, 40, 40], 10_000).unwrap();
        uld.edge_width = 5;
        uld.edge_offset = 10;
        // Interior is 30x30; a 40x40 footprint only fits at z >= 10, but
        // nothing supports it there without a substructure.
        let items = vec![item("wide", [40, 40, 5])];
        let result = run(&items, &uld, false);
        assert!(result.loaded.is_empty());
        // A 30x30 item lands on the interior floor at (5, 5, 0).
        let items = vec![item("fit", [30, 30, 5])];
        let result = run(&items, &uld, false);
        assert_eq!(result.loaded, vec![0]);
        let p = result
            .placements
            .iter()
            .find(|p| !p.is_dummy())
            .unwrap();
        assert_eq!(p.position, [5, 5, 0]);
    }

    #[test]
    fn substructure_carries_edge_overlapping_items() {
        // Interior floor is 190x190; an almost-full-footprint item keeps
        // 92.6% support on the substructure top, so it may overlap the
        // edge at the offset height.
        let mut uld = Uld::cuboid("c", [200, 200, 40], 100_000).unwrap();
        uld.edge_width = 5;
        uld.edge_offset = 10;
        uld.substructure_allowed = true;
        let items = vec![item("wide", [195, 200, 5])];
        let result = run(&items, &uld, false);
        assert!(result.loaded.is_empty());
        let result = run(&items, &uld, true);
        assert_eq!(result.loaded, vec![0]);
        let p = result.placements.iter().find(|p| !p.is_dummy()).unwrap();
        assert_eq!(p.position, [5, 0, 10]);
    }

    #[test]
    fn moved_point_admits_item_under_a_tilted_facet() {
        // Cross-section like the critical-point example: a 45-degree cut
        // above the origin-side wall. A tall item at a point on the cut
        // facet only fits after moving in +y.
        let vertices = vec![
            [0, 0, 0],
            [10, 0, 0],
            [10, 60, 0],
            [0, 60, 0],
            [0, 0, 20],
            [10, 0, 20],
            [0, 20, 40],
            [10, 20, 40],
            [0, 60, 40],
            [10, 60, 40],
        ];
        let facets = vec![
            vec![0, 1, 2, 3],
            vec![6, 7, 9, 8],
            vec![0, 1, 5, 4],
            vec![2, 3, 8, 9],
            vec![0, 3, 8, 6, 4],
            vec![1, 2, 9, 7, 5],
            vec![4, 5, 7, 6],
        ];
        let uld = Uld::new("t", vertices, facets, 10_000, 22_000).unwrap();

        // First fill the floor to height 20 with two wide slabs, then a
        // tall item that exceeds the cut at its generated point.
        let items = vec![
            Item { id: "slab1".into(), size: [10, 60, 10], weight: 1, rotatable: false, tiltable: false, stackable: true },
            Item { id: "slab2".into(), size: [10, 60, 10], weight: 1, rotatable: false, tiltable: false, stackable: true },
            Item { id: "tall".into(), size: [10, 20, 15], weight: 1, rotatable: false, tiltable: false, stackable: true },
        ];
        let packing = PackingParams::default();
        let algo = AlgoParams {
            ep_sort_order: EpSortOrder::Zyx,
            ..AlgoParams::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut budget = CheckBudget::new(100_000);
        let avail = vec![0, 1, 2];
        let result = load_single_uld(
            &items,
            &avail,
            &uld,
            &packing,
            &algo,
            SortCriterion::CumulatedVolume,
            0.0,
            false,
            &mut rng,
            &mut budget,
        )
        .unwrap();
        assert_eq!(result.loaded.len(), 3, "{:#?}", result.placements);
        let tall = result
            .placements
            .iter()
            .find(|p| p.placed == Placed::Item(2))
            .unwrap();
        // At z = 20 the cut facet requires y >= z + height - 20 = 15.
        assert_eq!(tall.position, [0, 15, 20]);

        // Without moving, the item cannot be placed against the facet.
        let algo_no_move = AlgoParams {
            variant: crate::model::VariantFlags {
                no_moving: true,
                ..Default::default()
            },
            ..algo
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut budget = CheckBudget::new(100_000);
        let result = load_single_uld(
            &items,
            &avail,
            &uld,
            &packing,
            &algo_no_move,
            SortCriterion::CumulatedVolume,
            0.0,
            false,
            &mut rng,
            &mut budget,
        )
        .unwrap();
        let tall = result
            .placements
            .iter()
            .find(|p| p.placed == Placed::Item(2));
        assert!(
            tall.map_or(true, |p| p.position != [0, 15, 20]),
            "no-moving variant should not reach the moved position"
        );
    }

    #[test]
    fn determinism_bitwise_for_fixed_seed() {
        let uld = Uld::cuboid("c", [20, 20, 20], 10_000).unwrap();
        let items: Vec<Item> = (0..12)
            .map(|i| item(&format!("i{i}"), [3 + (i % 4), 4, 5]))
            .collect();
        let packing = PackingParams::default();
        let algo = AlgoParams::default();
        let avail: Vec<usize> = (0..items.len()).collect();
        let mut results = Vec::new();
        for _ in 0..2 {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut budget = CheckBudget::new(1_000_000);
            let r = load_single_uld(
                &items,
                &avail,
                &uld,
                &packing,
                &algo,
                SortCriterion::StackabilityCumulatedVolume,
                0.5,
                false,
                &mut rng,
                &mut budget,
            )
            .unwrap();
            results.push(r.placements);
        }
        assert_eq!(results[0], results[1]);
    }
}
