//! Builds the ordered loading list: identical-item clustering, similar
//! groups by realizable height and stackability, the five sorting
//! criteria, Shaw-style randomization, and per-group orientation
//! determination.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Item, Orientation, Tilt, Z};

/// The five group sorting criteria, in the order the search applies them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortCriterion {
    StackabilityCumulatedVolume,
    StackabilityHighestVolume,
    CumulatedVolume,
    HighestVolume,
    Random,
}

impl SortCriterion {
    pub const ALL: [SortCriterion; 5] = [
        SortCriterion::StackabilityCumulatedVolume,
        SortCriterion::StackabilityHighestVolume,
        SortCriterion::CumulatedVolume,
        SortCriterion::HighestVolume,
        SortCriterion::Random,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SortCriterion::StackabilityCumulatedVolume => "stackability-cumulated-volume",
            SortCriterion::StackabilityHighestVolume => "stackability-highest-volume",
            SortCriterion::CumulatedVolume => "cumulated-volume",
            SortCriterion::HighestVolume => "highest-volume",
            SortCriterion::Random => "random",
        }
    }

    fn stackability_first(self) -> bool {
        matches!(
            self,
            SortCriterion::StackabilityCumulatedVolume | SortCriterion::StackabilityHighestVolume
        )
    }

    fn uses_cumulated(self) -> bool {
        matches!(
            self,
            SortCriterion::StackabilityCumulatedVolume | SortCriterion::CumulatedVolume
        )
    }
}

/// Items equal in weight, flags, and size multiset. Non-tiltable items
/// additionally share their fixed height, so every member realizes the
/// same similar groups.
#[derive(Debug, Clone, PartialEq)]
pub struct IdenticalGroup {
    /// Indices into the instance item list, in input order.
    pub members: Vec<usize>,
    pub size_sorted: [i64; 3],
    /// Set for non-tiltable groups only.
    pub fixed_height: Option<i64>,
    pub weight: i64,
    pub rotatable: bool,
    pub tiltable: bool,
    pub stackable: bool,
    pub member_volume: i64,
}

impl IdenticalGroup {
    pub fn cumulated_volume(&self) -> i64 {
        self.member_volume * self.members.len() as i64
    }

    /// Heights this group can realize under an admissible tilt.
    pub fn realizable_heights(&self) -> Vec<i64> {
        match self.fixed_height {
            Some(h) => vec![h],
            None => {
                let mut v = self.size_sorted.to_vec();
                v.dedup();
                v
            }
        }
    }
}

/// A similar group: identical groups sharing a realizable height and
/// stackability.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarGroup {
    pub height: i64,
    pub stackable: bool,
    /// Indices into the identical-group list.
    pub groups: Vec<usize>,
}

impl SimilarGroup {
    fn cumulated_volume(&self, identical: &[IdenticalGroup]) -> i64 {
        self.groups.iter().map(|&g| identical[g].cumulated_volume()).sum()
    }

    fn highest_volume(&self, identical: &[IdenticalGroup]) -> i64 {
        self.groups
            .iter()
            .map(|&g| identical[g].member_volume)
            .max()
            .unwrap_or(0)
    }
}

/// Cluster items into identical groups and assign them to similar groups.
/// Every item of `subset` (indices into `items`) lands in exactly one
/// identical group; an identical group joins every similar group whose
/// height it can realize (up to three).
pub fn build_groups(items: &[Item], subset: &[usize]) -> (Vec<IdenticalGroup>, Vec<SimilarGroup>) {
    let mut identical: Vec<IdenticalGroup> = Vec::new();
    for &idx in subset {
        let item = &items[idx];
        let mut size_sorted = item.size;
        size_sorted.sort();
        let fixed_height = (!item.tiltable).then_some(item.size[Z]);
        let found = identical.iter_mut().find(|g| {
            g.size_sorted == size_sorted
                && g.fixed_height == fixed_height
                && g.weight == item.weight
                && g.rotatable == item.rotatable
                && g.tiltable == item.tiltable
                && g.stackable == item.stackable
        });
        match found {
            Some(g) => g.members.push(idx),
            None => identical.push(IdenticalGroup {
                members: vec![idx],
                size_sorted,
                fixed_height,
                weight: item.weight,
                rotatable: item.rotatable,
                tiltable: item.tiltable,
                stackable: item.stackable,
                member_volume: item.volume(),
            }),
        }
    }

    let mut similar: Vec<SimilarGroup> = Vec::new();
    for (gi, group) in identical.iter().enumerate() {
        for h in group.realizable_heights() {
            match similar
                .iter_mut()
                .find(|s| s.height == h && s.stackable == group.stackable)
            {
                Some(s) => s.groups.push(gi),
                None => similar.push(SimilarGroup {
                    height: h,
                    stackable: group.stackable,
                    groups: vec![gi],
                }),
            }
        }
    }
    (identical, similar)
}

/// Position (0-based) drawn by the Shaw rule from `remaining` candidates:
/// ceil(y^(1/rho) * remaining), clamped into range. `y` is uniform in
/// [0, 1].
pub fn shaw_position(y: f64, rho: f64, remaining: usize) -> usize {
    debug_assert!(rho > 0.0 && rho <= 1.0);
    let pos = (y.powf(1.0 / rho) * remaining as f64).ceil() as usize;
    pos.clamp(1, remaining) - 1
}

/// Shaw-style reordering: draw elements one by one, each from the position
/// given by `shaw_position` within the not-yet-drawn rest. rho -> 0 keeps
/// the input order, rho = 1 is a uniform shuffle.
pub fn randomize<T>(mut sorted: Vec<T>, rho: f64, rng: &mut impl Rng) -> Vec<T> {
    let mut out = Vec::with_capacity(sorted.len());
    while !sorted.is_empty() {
        let y: f64 = rng.gen();
        out.push(sorted.remove(shaw_position(y, rho, sorted.len())));
    }
    out
}

fn sort_keyed<T, K: Ord>(list: &mut Vec<T>, mut key: impl FnMut(&T) -> K) {
    // Non-ascending by key; stable, so prior (input) order breaks ties.
    list.sort_by_key(|t| std::cmp::Reverse(key(t)));
}

/// An entry of the loading list: an item together with the orientation set
/// realizing its similar group's height.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadListEntry {
    pub item: usize,
    pub orientations: Vec<Orientation>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("item cannot realize height {height} under any admissible tilt")]
pub struct HeightUnrealizable {
    pub height: i64,
}

/// The orientation set O for an item within a similar group of the given
/// height: one canonical tilt realizing the height, plus the rotated
/// variant when it changes the footprint.
pub fn orientations_for(item: &Item, height: i64) -> Result<Vec<Orientation>, HeightUnrealizable> {
    let tilts: &[Tilt] = if item.tiltable {
        &Tilt::ALL
    } else {
        &[Tilt::None]
    };
    let tilt = tilts
        .iter()
        .copied()
        .find(|t| t.apply(item.size)[Z] == height)
        .ok_or(HeightUnrealizable { height })?;
    let base = tilt.apply(item.size);
    let mut out = vec![Orientation {
        tilt,
        rotated: false,
    }];
    if item.rotatable && base[0] != base[1] {
        out.push(Orientation {
            tilt,
            rotated: true,
        });
    }
    Ok(out)
}

/// Build the ordered loading list for one insertion run: sort similar
/// groups and the identical groups within them by the criterion, apply
/// Shaw randomization (degree 0 skips it; for the stackability criteria
/// it runs separately inside the stackable and non-stackable sublists),
/// then unpack into (item, orientations) pairs.
pub fn build_order(
    items: &[Item],
    subset: &[usize],
    criterion: SortCriterion,
    rho: f64,
    rng: &mut impl Rng,
) -> Vec<LoadListEntry> {
    let (identical, similar) = build_groups(items, subset);

    let mut similar_order: Vec<usize> = (0..similar.len()).collect();
    if criterion == SortCriterion::Random {
        // Fisher-Yates; the Shaw pass below applies on top.
        for i in (1..similar_order.len()).rev() {
            similar_order.swap(i, rng.gen_range(0..=i));
        }
    } else {
        let key = |&si: &usize| {
            let s = &similar[si];
            if criterion.uses_cumulated() {
                s.cumulated_volume(&identical)
            } else {
                s.highest_volume(&identical)
            }
        };
        sort_keyed(&mut similar_order, key);
    }
    if criterion.stackability_first() {
        sort_keyed(&mut similar_order, |&si| similar[si].stackable);
    }

    let randomize_level = |list: Vec<usize>, rng: &mut _| {
        if rho > 0.0 {
            randomize(list, rho, rng)
        } else {
            list
        }
    };
    similar_order = if criterion.stackability_first() {
        let (stackable, rest): (Vec<usize>, Vec<usize>) = similar_order
            .into_iter()
            .partition(|&si| similar[si].stackable);
        let mut v = randomize_level(stackable, rng);
        v.extend(randomize_level(rest, rng));
        v
    } else {
        randomize_level(similar_order, rng)
    };

    let mut order = Vec::new();
    for si in similar_order {
        let group = &similar[si];
        let mut inner: Vec<usize> = group.groups.clone();
        if criterion == SortCriterion::Random {
            for i in (1..inner.len()).rev() {
                inner.swap(i, rng.gen_range(0..=i));
            }
        } else if criterion.uses_cumulated() {
            sort_keyed(&mut inner, |&g| identical[g].cumulated_volume());
        } else {
            sort_keyed(&mut inner, |&g| identical[g].member_volume);
        }
        let inner = randomize_level(inner, rng);
        for gi in inner {
            for &item_idx in &identical[gi].members {
                let orientations = orientations_for(&items[item_idx], group.height)
                    .expect("group membership guarantees a realizing tilt");
                order.push(LoadListEntry {
                    item: item_idx,
                    orientations,
                });
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn idx(items: &[Item]) -> Vec<usize> {
        (0..items.len()).collect()
    }

    fn item(id: &str, size: [i64; 3], weight: i64, r: bool, t: bool, st: bool) -> Item {
        Item {
            id: id.into(),
            size,
            weight,
            rotatable: r,
            tiltable: t,
            stackable: st,
        }
    }

    #[test]
    fn permuted_sizes_form_one_identical_group() {
        let items = vec![
            item("a", [2, 3, 5], 4, true, true, true),
            item("b", [5, 3, 2], 4, true, true, true),
        ];
        let (identical, _) = build_groups(&items, &idx(&items));
        assert_eq!(identical.len(), 1);
        assert_eq!(identical[0].members, vec![0, 1]);
    }

    #[test]
    fn differing_weight_or_flags_split_groups() {
        let items = vec![
            item("a", [2, 3, 5], 4, true, true, true),
            item("b", [2, 3, 5], 7, true, true, true),
            item("c", [2, 3, 5], 4, true, true, false),
        ];
        let (identical, _) = build_groups(&items, &idx(&items));
        assert_eq!(identical.len(), 3);
    }

    #[test]
    fn tiltable_item_joins_three_similar_groups() {
        let items = vec![item("a", [2, 3, 5], 1, true, true, true)];
        let (_, similar) = build_groups(&items, &idx(&items));
        let mut heights: Vec<i64> = similar.iter().map(|s| s.height).collect();
        heights.sort();
        assert_eq!(heights, vec![2, 3, 5]);
    }

    #[test]
    fn non_tiltable_item_joins_only_its_height() {
        let items = vec![item("a", [2, 3, 5], 1, true, false, true)];
        let (_, similar) = build_groups(&items, &idx(&items));
        assert_eq!(similar.len(), 1);
        assert_eq!(similar[0].height, 5);
    }

    #[test]
    fn cumulated_volume_sorts_non_ascending() {
        let items = vec![
            item("a", [1, 1, 10], 1, false, false, true),
            item("b", [1, 1, 30], 1, false, false, true),
            item("c", [1, 1, 20], 1, false, false, true),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let order = build_order(&items, &idx(&items), SortCriterion::CumulatedVolume, 0.0, &mut rng);
        let vols: Vec<i64> = order.iter().map(|e| items[e.item].volume()).collect();
        assert_eq!(vols, vec![30, 20, 10]);
    }

    #[test]
    fn stackability_criteria_put_stackable_groups_first() {
        let items = vec![
            item("a", [1, 1, 9], 1, false, false, false),
            item("b", [1, 1, 2], 1, false, false, true),
            item("c", [1, 1, 7], 1, false, false, false),
            item("d", [1, 1, 4], 1, false, false, true),
        ];
        for rho in [0.0, 0.5, 1.0] {
            for seed in 0..20 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let order = build_order(
                    &items,
                    &idx(&items),
                    SortCriterion::StackabilityCumulatedVolume,
                    rho,
                    &mut rng,
                );
                let flags: Vec<bool> =
                    order.iter().map(|e| items[e.item].stackable).collect();
                let first_non = flags.iter().position(|&f| !f).unwrap();
                assert!(
                    flags[first_non..].iter().all(|&f| !f),
                    "boundary violated: {flags:?}"
                );
            }
        }
    }

    #[test]
    fn random_criterion_is_seed_reproducible() {
        let items: Vec<Item> = (0..8)
            .map(|i| item(&format!("i{i}"), [1, 1, 1 + i], 1, false, false, true))
            .collect();
        let a = build_order(
            &items,
            &idx(&items),
            SortCriterion::Random,
            0.5,
            &mut ChaCha8Rng::seed_from_u64(7),
        );
        let b = build_order(
            &items,
            &idx(&items),
            SortCriterion::Random,
            0.5,
            &mut ChaCha8Rng::seed_from_u64(7),
        );
        assert_eq!(a, b);
    }

    #[test]
    fn shaw_position_boundaries() {
        // y = 1 draws the last remaining element.
        assert_eq!(shaw_position(1.0, 0.5, 5), 4);
        // y = 0 is clamped to the first.
        assert_eq!(shaw_position(0.0, 0.5, 5), 0);
        // rho -> 0 keeps the input order for any y < 1.
        for y in [0.1, 0.5, 0.9, 0.999] {
            assert_eq!(shaw_position(y, 1e-6, 5), 0);
        }
    }

    #[test]
    fn randomize_is_a_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rho in [0.1, 0.5, 1.0] {
            let out = randomize((0..10).collect::<Vec<_>>(), rho, &mut rng);
            let mut sorted = out.clone();
            sorted.sort();
            assert_eq!(sorted, (0..10).collect::<Vec<_>>());
        }
    }

    #[test]
    fn orientations_examples() {
        // Cube: one tilt, rotation redundant.
        let cube = item("c", [2, 2, 2], 1, true, true, true);
        assert_eq!(orientations_for(&cube, 2).unwrap().len(), 1);
        // All-different: unique tilt, both rotations.
        let it = item("d", [2, 3, 5], 1, true, true, true);
        let o = orientations_for(&it, 3).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].tilt, Tilt::AcrossX);
        assert!(!o[0].rotated && o[1].rotated);
        // Two equal dimensions matching the height: either tilt works,
        // one is picked; the footprint (2, 5) still admits rotation.
        let it = item("e", [2, 2, 5], 1, true, true, true);
        let o = orientations_for(&it, 2).unwrap();
        assert_eq!(o.len(), 2);
        assert_eq!(o[0].tilt.apply([2, 2, 5])[Z], 2);
        // Unrealizable height errors.
        assert!(orientations_for(&it, 3).is_err());
    }

    #[test]
    fn tiltable_cube_unequal_item_appears_three_times() {
        let items = vec![item("a", [1, 2, 3], 1, true, true, true)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let order = build_order(&items, &idx(&items), SortCriterion::CumulatedVolume, 0.0, &mut rng);
        assert_eq!(order.len(), 3);
        let mut heights: Vec<i64> = order
            .iter()
            .map(|e| e.orientations[0].apply([1, 2, 3])[Z])
            .collect();
        heights.sort();
        assert_eq!(heights, vec![1, 2, 3]);
    }

    #[test]
    fn identical_group_members_stay_consecutive() {
        let items = vec![
            item("a1", [2, 2, 2], 1, false, false, true),
            item("b", [3, 3, 2], 1, false, false, true),
            item("a2", [2, 2, 2], 1, false, false, true),
        ];
        for seed in 0..30 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let order = build_order(&items, &idx(&items), SortCriterion::HighestVolume, 0.9, &mut rng);
            let pos_a1 = order.iter().position(|e| e.item == 0).unwrap();
            let pos_a2 = order.iter().position(|e| e.item == 2).unwrap();
            assert_eq!(pos_a1.abs_diff(pos_a2), 1, "group split: {order:?}");
        }
    }

    #[test]
    fn single_non_tiltable_item_yields_one_entry() {
        let items = vec![item("a", [4, 3, 2], 1, false, false, true)];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let order = build_order(&items, &idx(&items), SortCriterion::HighestVolume, 0.5, &mut rng);
        assert_eq!(order.len(), 1);
        assert_eq!(order[0].orientations, vec![Orientation::IDENTITY]);
    }
}
