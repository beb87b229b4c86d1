//! Sequential multi-ULD loading: pick the next ULD group by the
//! fewest-fitting-groups rule, fill it with the randomized greedy search,
//! and finally try to reload the last ULD into a smaller one.

use rand::Rng;

use crate::feasibility::CheckBudget;
use crate::insertion::load_single_uld;
use crate::model::{AlgoParams, Item, PackingParams, Solution, Uld, UldType};
use crate::ordering::SortCriterion;
use crate::rgs::{run_rgs, FitContext, RgsInput, RgsOutcome};

/// Identical ULD types folded into one group with pooled availability.
#[derive(Debug, Clone)]
pub struct UldGroup {
    /// Index of the representative entry in the instance ULD-type list.
    pub uld_type: usize,
    /// None = unlimited.
    pub count: Option<u32>,
}

fn same_uld(a: &Uld, b: &Uld) -> bool {
    a.vertices == b.vertices
        && a.facets == b.facets
        && a.weight_capacity == b.weight_capacity
        && a.volume_capacity == b.volume_capacity
        && a.edge_width == b.edge_width
        && a.edge_offset == b.edge_offset
        && a.substructure_allowed == b.substructure_allowed
}

/// Fold the instance ULD list into groups of identical ULDs.
pub fn build_groups(uld_types: &[UldType]) -> Vec<UldGroup> {
    let mut groups: Vec<UldGroup> = Vec::new();
    for (ti, t) in uld_types.iter().enumerate() {
        match groups
            .iter_mut()
            .find(|g| same_uld(&uld_types[g.uld_type].uld, &t.uld))
        {
            Some(g) => {
                g.count = match (g.count, t.count) {
                    (Some(a), Some(b)) => Some(a + b),
                    _ => None,
                };
            }
            None => groups.push(UldGroup {
                uld_type: ti,
                count: t.count,
            }),
        }
    }
    groups
}

/// Whether the item, alone, can be loaded into the (adapted) ULD in some
/// admissible orientation at some extreme point. Runs the real insertion
/// machinery so edge dummies, tilted facets, moving, and weight capacity
/// all apply.
pub fn item_fits_uld(item: &Item, uld: &Uld, packing: &PackingParams, algo: &AlgoParams) -> bool {
    let single = std::slice::from_ref(item);
    let substructure_options: &[bool] = if uld.substructure_allowed {
        &[false, true]
    } else {
        &[false]
    };
    for &b in substructure_options {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let mut budget = CheckBudget::new(1_000_000);
        // Single-item probe: a grid never pays off here.
        let mut probe = AlgoParams {
            max_ep_checks: 1_000_000,
            ..*algo
        };
        probe.variant.no_grid = true;
        let result = load_single_uld(
            single,
            &[0],
            uld,
            packing,
            &probe,
            SortCriterion::CumulatedVolume,
            0.0,
            b,
            &mut rng,
            &mut budget,
        );
        if matches!(result, Ok(r) if !r.loaded.is_empty()) {
            return true;
        }
    }
    false
}

use rand::SeedableRng;

/// Fit matrix: `fits[group][item]`.
pub fn fit_matrix(
    items: &[Item],
    uld_types: &[UldType],
    groups: &[UldGroup],
    packing: &PackingParams,
    algo: &AlgoParams,
) -> Vec<Vec<bool>> {
    groups
        .iter()
        .map(|g| {
            let uld = &uld_types[g.uld_type].uld;
            items
                .iter()
                .map(|item| item_fits_uld(item, uld, packing, algo))
                .collect()
        })
        .collect()
}

/// The group selection rule: among the groups that fit the most
/// constrained items (smallest number of fitting groups), pick the one
/// with the highest cumulative volume of individually fitting items; ties
/// break by the highest ULD volume.
pub fn select_next_uld(
    items: &[Item],
    remaining: &[usize],
    uld_types: &[UldType],
    groups: &[UldGroup],
    available: &[usize],
    fits: &[Vec<bool>],
) -> Option<usize> {
    let fit_count = |i: usize| available.iter().filter(|&&g| fits[g][i]).count();
    let loadable: Vec<usize> = remaining
        .iter()
        .copied()
        .filter(|&i| fit_count(i) > 0)
        .collect();
    if loadable.is_empty() {
        return None;
    }
    let m = loadable.iter().map(|&i| fit_count(i)).min().unwrap();
    let mut candidates: Vec<usize> = available
        .iter()
        .copied()
        .filter(|&g| {
            loadable
                .iter()
                .any(|&i| fit_count(i) == m && fits[g][i])
        })
        .collect();
    candidates.sort_by_key(|&g| {
        let fitting_volume: i64 = remaining
            .iter()
            .filter(|&&i| fits[g][i])
            .map(|&i| items[i].volume())
            .sum();
        let uld_volume = uld_types[groups[g].uld_type].uld.volume_capacity;
        // Highest fitting volume, then highest ULD volume, then index.
        (
            std::cmp::Reverse(fitting_volume),
            std::cmp::Reverse(uld_volume),
            g,
        )
    });
    candidates.first().copied()
}

/// Result of a full multi-ULD solve.
#[derive(Debug, Clone)]
pub struct FleetOutcome {
    pub solution: Solution,
    /// Winning sorting criterion per load, parallel to `solution.loads`.
    pub load_criteria: Vec<SortCriterion>,
    pub total_checks: u64,
    pub total_iterations: u32,
}

/// Load all items into the available ULDs (Algorithm-7 shape): select a
/// group, run the search, remove loaded items and the consumed ULD,
/// repeat; then try to reload the final ULD into the smallest available
/// strictly smaller one that takes all its items.
pub fn load_fleet(
    items: &[Item],
    uld_types: &[UldType],
    packing: &PackingParams,
    algo: &AlgoParams,
    rng: &mut impl Rng,
) -> FleetOutcome {
    let groups = build_groups(uld_types);
    let fits = fit_matrix(items, uld_types, &groups, packing, algo);
    let mut counts: Vec<Option<u32>> = groups.iter().map(|g| g.count).collect();

    let mut remaining: Vec<usize> = (0..items.len()).collect();
    let mut loads = Vec::new();
    let mut scores = Vec::new();
    let mut criteria = Vec::new();
    let mut total_checks = 0;
    let mut total_iterations = 0;
    let mut last_group: Option<usize> = None;

    loop {
        if remaining.is_empty() {
            break;
        }
        let available: Vec<usize> = (0..groups.len())
            .filter(|&g| counts[g].map_or(true, |c| c > 0))
            .collect();
        if available.is_empty() {
            break;
        }
        let Some(chosen) =
            select_next_uld(items, &remaining, uld_types, &groups, &available, &fits)
        else {
            break; // nothing left that fits anywhere
        };
        let fit = FitContext {
            group_count: available.len(),
            fits_per_item: (0..items.len())
                .map(|i| available.iter().filter(|&&g| fits[g][i]).count())
                .collect(),
        };
        let uld = &uld_types[groups[chosen].uld_type].uld;
        let input = RgsInput {
            items,
            available: &remaining,
            uld,
            uld_type: groups[chosen].uld_type,
            packing,
            algo,
            fit: &fit,
        };
        let outcome = run_rgs(&input, rng).expect("substructure use follows the ULD flag");
        total_checks += outcome.checks_used;
        total_iterations += outcome.iterations;
        if outcome.load.item_count() == 0 {
            // Defensive: the selected group should always take an item.
            break;
        }
        let loaded = outcome.load.item_indices();
        remaining.retain(|i| !loaded.contains(i));
        if let Some(c) = &mut counts[chosen] {
            *c -= 1;
        }
        loads.push(outcome.load);
        scores.push(outcome.score);
        criteria.push(outcome.criterion);
        last_group = Some(chosen);
    }

    // Reload the last ULD into the smallest strictly smaller available
    // ULD that takes all of its items.
    if let (Some(last_group), Some(last_load)) = (last_group, loads.last()) {
        let last_items = last_load.item_indices();
        let last_volume = uld_types[groups[last_group].uld_type]
            .uld
            .volume_capacity;
        let mut candidates: Vec<usize> = (0..groups.len())
            .filter(|&g| counts[g].map_or(true, |c| c > 0))
            .filter(|&g| uld_types[groups[g].uld_type].uld.volume_capacity < last_volume)
            .collect();
        candidates.sort_by_key(|&g| (uld_types[groups[g].uld_type].uld.volume_capacity, g));
        for g in candidates {
            if !last_items.iter().all(|&i| fits[g][i]) {
                continue;
            }
            let uld = &uld_types[groups[g].uld_type].uld;
            let fit = FitContext {
                group_count: 1,
                fits_per_item: (0..items.len()).map(|i| usize::from(fits[g][i])).collect(),
            };
            let input = RgsInput {
                items,
                available: &last_items,
                uld,
                uld_type: groups[g].uld_type,
                packing,
                algo,
                fit: &fit,
            };
            let outcome: RgsOutcome = run_rgs(&input, rng).expect("substructure flag respected");
            total_checks += outcome.checks_used;
            total_iterations += outcome.iterations;
            if outcome.load.item_count() == last_items.len() {
                *loads.last_mut().unwrap() = outcome.load;
                *scores.last_mut().unwrap() = outcome.score;
                *criteria.last_mut().unwrap() = outcome.criterion;
                break;
            }
        }
    }

    FleetOutcome {
        solution: Solution {
            loads,
            unloaded: remaining,
            scores,
        },
        load_criteria: criteria,
        total_checks,
        total_iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    fn item(id: &str, size: [i64; 3], weight: i64) -> Item {
        Item {
            id: id.into(),
            size,
            weight,
            rotatable: true,
            tiltable: false,
            stackable: true,
        }
    }

    fn cuboid_type(id: &str, dims: [i64; 3], weight_cap: i64, count: Option<u32>) -> UldType {
        UldType {
            uld: Uld::cuboid(id, dims, weight_cap).unwrap(),
            count,
        }
    }

    fn fast_algo() -> AlgoParams {
        AlgoParams {
            max_rgs_iters: 15,
            max_ep_checks: 200_000,
            ..AlgoParams::default()
        }
    }

    #[test]
    fn unit_item_fits_any_uld() {
        let uld = Uld::cuboid("c", [10, 10, 10], 100).unwrap();
        let it = item("a", [1, 1, 1], 1);
        assert!(item_fits_uld(&it, &uld, &PackingParams::default(), &fast_algo()));
    }

    #[test]
    fn oversize_item_fits_nothing() {
        let uld = Uld::cuboid("c", [10, 10, 10], 100).unwrap();
        let it = item("a", [11, 1, 1], 1);
        // Tiltable so every orientation is probed.
        let mut it = it;
        it.tiltable = true;
        assert!(!item_fits_uld(&it, &uld, &PackingParams::default(), &fast_algo()));
    }

    #[test]
    fn overweight_item_excluded_by_capacity() {
        let light = Uld::cuboid("c", [10, 10, 10], 5).unwrap();
        let heavy = Uld::cuboid("d", [10, 10, 10], 50).unwrap();
        let it = item("a", [2, 2, 2], 10);
        let packing = PackingParams::default();
        assert!(!item_fits_uld(&it, &light, &packing, &fast_algo()));
        assert!(item_fits_uld(&it, &heavy, &packing, &fast_algo()));
    }

    #[test]
    fn identical_types_fold_into_one_group() {
        let types = vec![
            cuboid_type("a", [10, 10, 10], 100, Some(1)),
            cuboid_type("b", [10, 10, 10], 100, Some(2)),
            cuboid_type("c", [20, 10, 10], 100, Some(1)),
        ];
        let groups = build_groups(&types);
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].count, Some(3));
    }

    #[test]
    fn constrained_item_forces_its_group() {
        // One oversize-ish item fits only the big ULD; the small one has
        // more total fitting volume but cannot be selected first.
        let items = vec![
            item("big", [18, 9, 9], 1),
            item("s1", [5, 5, 5], 1),
            item("s2", [5, 5, 5], 1),
        ];
        let types = vec![
            cuboid_type("small", [10, 10, 10], 1000, Some(5)),
            cuboid_type("large", [20, 10, 10], 1000, Some(5)),
        ];
        let groups = build_groups(&types);
        let packing = PackingParams::default();
        let algo = fast_algo();
        let fits = fit_matrix(&items, &types, &groups, &packing, &algo);
        assert_eq!(fits[0], vec![false, true, true]);
        assert_eq!(fits[1], vec![true, true, true]);
        let chosen = select_next_uld(&items, &[0, 1, 2], &types, &groups, &[0, 1], &fits);
        assert_eq!(chosen, Some(1));
    }

    #[test]
    fn volume_tie_breaks_by_uld_volume() {
        let items = vec![item("a", [4, 4, 4], 1)];
        let types = vec![
            cuboid_type("small", [5, 5, 5], 1000, Some(1)),
            cuboid_type("large", [8, 8, 8], 1000, Some(1)),
        ];
        let groups = build_groups(&types);
        let packing = PackingParams::default();
        let algo = fast_algo();
        let fits = fit_matrix(&items, &types, &groups, &packing, &algo);
        let chosen = select_next_uld(&items, &[0], &types, &groups, &[0, 1], &fits);
        assert_eq!(chosen, Some(1));
    }

    #[test]
    fn fleet_solve_conserves_items() {
        let mut items = Vec::new();
        for i in 0..9 {
            items.push(item(&format!("i{i}"), [4 + (i % 3), 5, 5], 2));
        }
        items.push(item("nofit", [40, 40, 40], 1));
        let types = vec![
            cuboid_type("a", [10, 10, 10], 1000, Some(2)),
            cuboid_type("b", [12, 12, 12], 1000, None),
        ];
        let packing = PackingParams::default();
        let algo = fast_algo();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let outcome = load_fleet(&items, &types, &packing, &algo, &mut rng);
        let mut seen: Vec<usize> = outcome.solution.unloaded.clone();
        for load in &outcome.solution.loads {
            seen.extend(load.item_indices());
        }
        seen.sort();
        assert_eq!(seen, (0..items.len()).collect::<Vec<_>>());
        assert!(outcome.solution.unloaded.contains(&9));
    }

    #[test]
    fn last_uld_reloads_into_smaller_type() {
        // Nine big items fill the large ULD; one small leftover first
        // lands in another large one, then reloads into the small type.
        let mut items: Vec<Item> = (0..8).map(|i| item(&format!("b{i}"), [10, 10, 5], 1)).collect();
        items.push(item("tiny", [3, 3, 3], 1));
        let types = vec![
            cuboid_type("large", [20, 10, 20], 1000, None),
            cuboid_type("small", [4, 4, 4], 1000, None),
        ];
        let packing = PackingParams::default();
        let algo = fast_algo();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let outcome = load_fleet(&items, &types, &packing, &algo, &mut rng);
        assert!(outcome.solution.unloaded.is_empty());
        let last = outcome.solution.loads.last().unwrap();
        assert_eq!(last.uld_type, 1, "leftover should reload into the small ULD");
        assert_eq!(outcome.solution.loaded_item_count(), 9);
    }
}
