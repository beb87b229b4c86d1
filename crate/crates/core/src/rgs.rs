//! The randomized greedy search: repeat the insertion heuristic over
//! sorting criteria, substructure options, and randomization degrees,
//! score each candidate load, keep the strictly best one, and finally
//! close holes in it.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::feasibility::CheckBudget;
use crate::holes::close_holes;
use crate::insertion::{load_single_uld_cached, SubstructureNotAllowed};
use crate::model::{AlgoParams, Item, PackingParams, Uld, UldLoad, X, Y};
use crate::ordering::SortCriterion;

/// Solution quality of one load.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Score {
    /// Weight-balance score S_w in [0, 1].
    pub weight_balance: f64,
    /// Volume score S_v: loaded volume over the ULD's volume capacity.
    pub volume: f64,
    /// Difficulty of the still-unloaded items.
    pub penalty: f64,
    /// Combined score S.
    pub combined: f64,
}

/// How many ULD groups exist and into how many each item fits; feeds the
/// remaining-item difficulty penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct FitContext {
    pub group_count: usize,
    /// Parallel to the instance item list.
    pub fits_per_item: Vec<usize>,
}

impl FitContext {
    /// Single-ULD setting: one group, every item fits it.
    pub fn single_uld(item_count: usize) -> FitContext {
        FitContext {
            group_count: 1,
            fits_per_item: vec![1; item_count],
        }
    }
}

/// Normalized center-of-gravity deviation along a horizontal axis,
/// clipped to 0 inside the tolerance band. Empty or weightless loads
/// have no deviation.
pub fn cog_deviation(load: &UldLoad, uld: &Uld, axis: usize, max_cog_deviation: f64) -> f64 {
    debug_assert!(axis == X || axis == Y);
    let Some(cog) = load.center_of_gravity() else {
        return 0.0;
    };
    let half = uld.bounding_box[axis] as f64 / 2.0;
    let deviation = ((cog[axis] - half) / half).abs();
    if deviation > max_cog_deviation {
        deviation
    } else {
        0.0
    }
}

/// Combined score: weight-balance and volume terms weighted by their
/// importances, minus the normalized difficulty of the items left over.
pub fn score(
    load: &UldLoad,
    uld: &Uld,
    items: &[Item],
    candidates: &[usize],
    remaining: &[usize],
    fit: &FitContext,
    packing: &PackingParams,
) -> Score {
    let dev_x = cog_deviation(load, uld, X, packing.max_cog_deviation);
    let dev_y = cog_deviation(load, uld, Y, packing.max_cog_deviation);
    let weight_balance = 1.0 - (dev_x + dev_y) / 2.0;
    let volume = load.loaded_volume() as f64 / uld.volume_capacity as f64;

    let difficulty = |i: usize| {
        (fit.group_count - fit.fits_per_item[i].min(fit.group_count)) as f64
            * items[i].volume() as f64
    };
    let denominator: f64 = candidates.iter().map(|&i| difficulty(i)).sum();
    let penalty = if denominator > 0.0 {
        remaining.iter().map(|&i| difficulty(i)).sum::<f64>() / denominator
    } else {
        0.0
    };

    let combined = packing.weight_balance_importance * weight_balance
        + packing.volume_importance() * volume
        - penalty;
    Score {
        weight_balance,
        volume,
        penalty,
        combined,
    }
}

/// Outcome of a search over one ULD.
#[derive(Debug, Clone)]
pub struct RgsOutcome {
    pub load: UldLoad,
    pub score: Score,
    /// Criterion that produced the kept solution.
    pub criterion: SortCriterion,
    pub iterations: u32,
    pub checks_used: u64,
    pub hole_moves: u32,
}

/// Inputs for one search over one ULD.
pub struct RgsInput<'a> {
    pub items: &'a [Item],
    pub available: &'a [usize],
    pub uld: &'a Uld,
    pub uld_type: usize,
    pub packing: &'a PackingParams,
    pub algo: &'a AlgoParams,
    pub fit: &'a FitContext,
}

/// Run the search: every sorting criterion, with and without a
/// substructure when the ULD allows one, inner iterations splitting the
/// maximum evenly (remainders to the earliest cells) with the first
/// iteration per cell unrandomized. The shared check budget is enforced
/// once the minimum iteration count has completed. The best load is
/// refined by hole closing at the end.
pub fn run_rgs(input: &RgsInput, rng: &mut impl Rng) -> Result<RgsOutcome, SubstructureNotAllowed> {
    let RgsInput {
        items,
        available,
        uld,
        uld_type,
        packing,
        algo,
        fit,
    } = *input;

    let substructure_options: &[bool] = if uld.substructure_allowed {
        &[false, true]
    } else {
        &[false]
    };
    let cells = substructure_options.len() * SortCriterion::ALL.len();
    let per_cell = algo.max_rgs_iters as usize / cells;
    let extra = algo.max_rgs_iters as usize % cells;

    let mut budget = CheckBudget::new(algo.max_ep_checks);
    budget.enforced = false;
    let mut completed: u32 = 0;
    let mut best: Option<(Score, UldLoad, SortCriterion)> = None;
    let mut grid_cache = None;

    'search: for (bi, &use_substructure) in substructure_options.iter().enumerate() {
        for (ci, &criterion) in SortCriterion::ALL.iter().enumerate() {
            let cell_index = bi * SortCriterion::ALL.len() + ci;
            let iterations = per_cell + usize::from(cell_index < extra);
            for j in 1..=iterations {
                if completed >= algo.min_rgs_iters {
                    budget.enforced = true;
                    if budget.exhausted() {
                        break 'search;
                    }
                }
                let randomization = if j == 1 {
                    0.0
                } else {
                    algo.randomization_degree
                };
                let result = load_single_uld_cached(
                    items,
                    available,
                    uld,
                    packing,
                    algo,
                    criterion,
                    randomization,
                    use_substructure,
                    rng,
                    &mut budget,
                    &mut grid_cache,
                )?;
                completed += 1;
                let load = UldLoad {
                    uld_type,
                    substructure_used: use_substructure,
                    placements: result.placements,
                };
                let remaining: Vec<usize> = available
                    .iter()
                    .copied()
                    .filter(|i| !result.loaded.contains(i))
                    .collect();
                let s = score(&load, uld, items, available, &remaining, fit, packing);
                // Loading something always beats loading nothing (the
                // volume objective is lexicographically first); an empty
                // load's vacuously perfect weight balance must not win.
                // Among equals the comparison is strictly greater, so
                // exact ties keep the earlier candidate.
                let better = match &best {
                    None => true,
                    Some((bs, bl, _)) => {
                        let (new_filled, best_filled) =
                            (load.item_count() > 0, bl.item_count() > 0);
                        new_filled > best_filled
                            || (new_filled == best_filled && s.combined > bs.combined)
                    }
                };
                if better {
                    best = Some((s, load, criterion));
                }
            }
        }
    }

    let (_, mut load, criterion) = best.expect("at least one iteration runs");
    let hole_moves = close_holes(&mut load, uld, packing, algo.hole_close_max_iters);
    // Re-evaluate for reporting; selection used the pre-refinement score.
    let remaining: Vec<usize> = {
        let loaded = load.item_indices();
        available
            .iter()
            .copied()
            .filter(|i| !loaded.contains(i))
            .collect()
    };
    let final_score = score(&load, uld, items, available, &remaining, fit, packing);
    Ok(RgsOutcome {
        load,
        score: final_score,
        criterion,
        iterations: completed,
        checks_used: budget.used,
        hole_moves,
    })
}
