//! Independent feasibility checker. Re-derives every packing constraint
//! from the instance and the placements alone, using brute-force corner
//! containment and an exact union-of-footprints support computation, so
//! solver output is validated through a different code path than the one
//! that produced it.

use serde::{Deserialize, Serialize};

use crate::geometry::base_area_overlap;
use crate::model::{
    apply_orientation, CornerSupportMode, Instance, PackingParams, Placed, Placement, Solution,
    Uld, UldLoad, X, Y, Z,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    OutsideUld {
        item: String,
        position: [i64; 3],
    },
    EdgeOverlapBelowOffset {
        item: String,
        position: [i64; 3],
        min_height: i64,
    },
    InsideSubstructure {
        item: String,
        position: [i64; 3],
    },
    Collision {
        first: String,
        second: String,
    },
    Floating {
        item: String,
        supported_area: i64,
        required_area: f64,
    },
    RestsOnNonStackable {
        item: String,
        below: String,
    },
    WeightCapacityExceeded {
        loaded: i64,
        capacity: i64,
    },
    VolumeCapacityExceeded {
        loaded: i64,
        capacity: i64,
    },
    BadOrientation {
        item: String,
    },
    DuplicateItem {
        item: String,
    },
    UnknownItem {
        index: usize,
    },
}

/// Soft flag: the CoG tolerance is reported, not enforced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CogFlag {
    pub load: usize,
    pub axis: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub cog_flags: Vec<CogFlag>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact support of a box at `position`: per footprint cell, the highest
/// surface within padding reach decides; a non-stackable surface blocks
/// the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSupport {
    pub directly_supported: bool,
    pub supported_area: i64,
    pub supported_corners: u8,
}

impl ExactSupport {
    pub fn verdict(&self, packing: &PackingParams, base_area: i64) -> bool {
        let area_ok = self.supported_area as f64
            >= packing.min_item_overlap * base_area as f64 - 1e-6;
        match packing.corner_support_mode {
            CornerSupportMode::Full => {
                self.directly_supported && (self.supported_corners == 4 || area_ok)
            }
            CornerSupportMode::CornersOnly => {
                self.directly_supported && self.supported_corners == 4
            }
        }
    }
}

pub fn exact_support(
    others: &[Placement],
    uld: &Uld,
    packing: &PackingParams,
    position: [i64; 3],
    size: [i64; 3],
) -> ExactSupport {
    let bottom = position[Z];
    let slab_lo = bottom - packing.max_padding_height;
    let foot_min = [position[X], position[Y]];
    let foot_max = [position[X] + size[X], position[Y] + size[Y]];

    // (top, clipped rect, stackable)
    let mut entries: Vec<(i64, [i64; 2], [i64; 2], bool)> = Vec::new();
    let mut push = |top: i64, pos: [i64; 3], sz: [i64; 3], stackable: bool| {
        if top < slab_lo || top > bottom {
            return;
        }
        let lo = [pos[X].max(foot_min[0]), pos[Y].max(foot_min[1])];
        let hi = [
            (pos[X] + sz[X]).min(foot_max[0]),
            (pos[Y] + sz[Y]).min(foot_max[1]),
        ];
        if lo[0] < hi[0] && lo[1] < hi[1] {
            entries.push((top, lo, hi, stackable));
        }
    };
    let b = uld.bounding_box;
    push(0, [0, 0, 0], [b[X], b[Y], 0], true);
    for p in others {
        push(p.top(), p.position, p.size, p.stackable);
    }

    let mut xs: Vec<i64> = entries.iter().flat_map(|e| [e.1[0], e.2[0]]).collect();
    let mut ys: Vec<i64> = entries.iter().flat_map(|e| [e.1[1], e.2[1]]).collect();
    xs.sort();
    xs.dedup();
    ys.sort();
    ys.dedup();

    let mut supported_area = 0i64;
    let mut direct_area = 0i64;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let covering = entries
                .iter()
                .filter(|e| e.1[0] <= xw[0] && xw[1] <= e.2[0] && e.1[1] <= yw[0] && yw[1] <= e.2[1]);
            let top = covering.clone().map(|e| e.0).max();
            let Some(top) = top else { continue };
            let blocked = covering
                .clone()
                .any(|e| e.0 == top && !e.3);
            if blocked {
                continue;
            }
            let cell = (xw[1] - xw[0]) * (yw[1] - yw[0]);
            supported_area += cell;
            if top == bottom {
                direct_area += cell;
            }
        }
    }

    let corners = [
        [foot_min[0], foot_min[1]],
        [foot_max[0], foot_min[1]],
        [foot_min[0], foot_max[1]],
        [foot_max[0], foot_max[1]],
    ];
    let mut corner_count = 0u8;
    for c in corners {
        let on_floor = bottom == 0 && c[0] <= b[X] && c[1] <= b[Y];
        let resting = on_floor
            || others.iter().any(|p| {
                p.stackable
                    && p.top() == bottom
                    && p.position[X] <= c[0]
                    && c[0] <= p.position[X] + p.size[X]
                    && p.position[Y] <= c[1]
                    && c[1] <= p.position[Y] + p.size[Y]
            });
        if resting {
            corner_count += 1;
        }
    }

    ExactSupport {
        directly_supported: direct_area > 0,
        supported_area,
        supported_corners: corner_count,
    }
}

fn corners_of(p: &Placement) -> impl Iterator<Item = [i64; 3]> + '_ {
    (0..8).map(move |mask| {
        let mut c = p.position;
        for d in 0..3 {
            if mask & (1 << d) != 0 {
                c[d] += p.size[d];
            }
        }
        c
    })
}

fn item_name(instance: &Instance, p: &Placement) -> String {
    match p.placed {
        Placed::Item(i) => instance
            .items
            .get(i)
            .map(|it| it.id.clone())
            .unwrap_or_else(|| format!("#{i}")),
        Placed::EdgeDummy => "<edge dummy>".to_string(),
        Placed::SubstructureDummy => "<substructure>".to_string(),
    }
}

fn validate_load(
    instance: &Instance,
    load_index: usize,
    load: &UldLoad,
    report: &mut ValidationReport,
) {
    let Some(uld_type) = instance.ulds.get(load.uld_type) else {
        report.violations.push(Violation::UnknownItem {
            index: load.uld_type,
        });
        return;
    };
    let uld = &uld_type.uld;
    let packing = &instance.packing;

    for (pi, p) in load.placements.iter().enumerate() {
        let Placed::Item(item_index) = p.placed else {
            continue;
        };
        let name = item_name(instance, p);
        let Some(item) = instance.items.get(item_index) else {
            report.violations.push(Violation::UnknownItem { index: item_index });
            continue;
        };

        // Orientation, size, and flags must be consistent with the item.
        let consistent = apply_orientation(item, p.orientation)
            .map(|s| s == p.size)
            .unwrap_or(false)
            && p.stackable == item.stackable
            && p.weight == item.weight;
        if !consistent {
            report.violations.push(Violation::BadOrientation { item: name.clone() });
        }

        // Containment: all eight corners against every facet half-space.
        let inside = corners_of(p).all(|c| uld.planes.iter().all(|plane| plane.eval(c) >= 0));
        if !inside {
            report.violations.push(Violation::OutsideUld {
                item: name.clone(),
                position: p.position,
            });
        }

        // Edge rule: footprints overlapping the perimeter ring may only
        // sit at or above the offset height.
        let e = uld.edge_width;
        if e > 0 {
            let inside_ring = p.position[X] >= e
                && p.position[Y] >= e
                && p.position[X] + p.size[X] <= uld.bounding_box[X] - e
                && p.position[Y] + p.size[Y] <= uld.bounding_box[Y] - e;
            if !inside_ring && p.position[Z] < uld.edge_offset {
                report.violations.push(Violation::EdgeOverlapBelowOffset {
                    item: name.clone(),
                    position: p.position,
                    min_height: uld.edge_offset,
                });
            }
        }
        if load.substructure_used && p.position[Z] < uld.edge_offset {
            report.violations.push(Violation::InsideSubstructure {
                item: name.clone(),
                position: p.position,
            });
        }

        // Collisions with every other placement (dummy frames may overlap
        // each other by construction).
        for (qi, q) in load.placements.iter().enumerate() {
            if qi <= pi && !q.is_dummy() {
                continue;
            }
            if qi == pi {
                continue;
            }
            if crate::feasibility::collides(p.position, p.size, q.position, q.size) {
                report.violations.push(Violation::Collision {
                    first: name.clone(),
                    second: item_name(instance, q),
                });
            }
        }

        // Floating: exact oracle over all other placements.
        let others: Vec<Placement> = load
            .placements
            .iter()
            .enumerate()
            .filter(|&(qi, _)| qi != pi)
            .map(|(_, q)| *q)
            .collect();
        let support = exact_support(&others, uld, packing, p.position, p.size);
        if !support.verdict(packing, p.size[X] * p.size[Y]) {
            report.violations.push(Violation::Floating {
                item: name.clone(),
                supported_area: support.supported_area,
                required_area: packing.min_item_overlap * (p.size[X] * p.size[Y]) as f64,
            });
        }

        // Stacking: the item must not rest on any non-stackable surface.
        for q in &others {
            if !q.stackable
                && q.top() == p.position[Z]
                && base_area_overlap(p.position, p.size, q.position, q.size) > 0
            {
                report.violations.push(Violation::RestsOnNonStackable {
                    item: name.clone(),
                    below: item_name(instance, q),
                });
            }
        }
    }

    let loaded_weight = load.loaded_weight();
    if loaded_weight > uld.weight_capacity {
        report.violations.push(Violation::WeightCapacityExceeded {
            loaded: loaded_weight,
            capacity: uld.weight_capacity,
        });
    }
    let loaded_volume = load.loaded_volume();
    if loaded_volume > uld.volume_capacity {
        report.violations.push(Violation::VolumeCapacityExceeded {
            loaded: loaded_volume,
            capacity: uld.volume_capacity,
        });
    }

    for axis in [X, Y] {
        let dev = crate::rgs::cog_deviation(load, uld, axis, packing.max_cog_deviation);
        if dev > 0.0 {
            report.cog_flags.push(CogFlag {
                load: load_index,
                axis,
                deviation: dev,
            });
        }
    }
}

/// Validate a full solution against its instance.
pub fn validate(instance: &Instance, solution: &Solution) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen = vec![false; instance.items.len()];
    for (li, load) in solution.loads.iter().enumerate() {
        for idx in load.item_indices() {
            if idx >= instance.items.len() {
                report.violations.push(Violation::UnknownItem { index: idx });
            } else if seen[idx] {
                report.violations.push(Violation::DuplicateItem {
                    item: instance.items[idx].id.clone(),
                });
            } else {
                seen[idx] = true;
            }
        }
        validate_load(instance, li, load, &mut report);
    }
    report
}
