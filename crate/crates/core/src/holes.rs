//! Post-processing that closes horizontal holes: detect empty space
//! beside an item towards the ULD center, grow the set of items that must
//! move together, and binary-search the farthest feasible centerward
//! shift.

use crate::feasibility::{collides, LoadState};
use crate::geometry::{base_area_overlap, fits_bounding_box, Point};
use crate::model::{PackingParams, Placement, Uld, UldLoad, X, Y, Z};

/// A horizontal move direction: axis (x or y) and sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Direction {
    pub axis: usize,
    pub sign: i64,
}

fn centerward(placement: &Placement, uld: &Uld, axis: usize) -> Direction {
    let sign = if 2 * placement.position[axis] + placement.size[axis] < uld.bounding_box[axis] {
        1
    } else {
        -1
    };
    Direction { axis, sign }
}

/// Whether the placement at `idx` has a hole in the centerward direction
/// along `axis`: the one-unit strip over its full cross-section is empty
/// and some other real item lies strictly between it and the wall.
fn hole_towards(load: &UldLoad, uld: &Uld, idx: usize, axis: usize) -> Option<Direction> {
    let p = &load.placements[idx];
    let dir = centerward(p, uld, axis);
    let (strip_min, strip_size) = {
        let mut min = p.position;
        let mut size = p.size;
        if dir.sign > 0 {
            min[axis] = p.position[axis] + p.size[axis];
        } else {
            min[axis] = p.position[axis] - 1;
        }
        size[axis] = 1;
        (min, size)
    };
    if strip_min[axis] < 0 || strip_min[axis] + 1 > uld.bounding_box[axis] {
        return None;
    }
    let strip_empty = load
        .placements
        .iter()
        .enumerate()
        .all(|(j, other)| j == idx || !collides(strip_min, strip_size, other.position, other.size));
    if !strip_empty {
        return None;
    }
    let cross = |a: &Placement, b: &Placement| {
        (0..3).filter(|&d| d != axis).all(|d| {
            a.position[d] < b.position[d] + b.size[d] && b.position[d] < a.position[d] + a.size[d]
        })
    };
    let blocked = load.placements.iter().enumerate().any(|(j, other)| {
        if j == idx || other.is_dummy() || !cross(p, other) {
            return false;
        }
        if dir.sign > 0 {
            other.position[axis] >= p.position[axis] + p.size[axis] + 1
        } else {
            other.position[axis] + other.size[axis] <= p.position[axis] - 1
        }
    });
    blocked.then_some(dir)
}

/// All (placement index, direction) pairs with a hole, in placement order.
pub fn find_holes(load: &UldLoad, uld: &Uld) -> Vec<(usize, Direction)> {
    let mut out = Vec::new();
    for (idx, p) in load.placements.iter().enumerate() {
        if p.is_dummy() {
            continue;
        }
        for axis in [X, Y] {
            if let Some(dir) = hole_towards(load, uld, idx, axis) {
                out.push((idx, dir));
            }
        }
    }
    out
}

fn bbox_of(load: &UldLoad, set: &[usize]) -> (Point, Point) {
    let mut min = [i64::MAX; 3];
    let mut max = [i64::MIN; 3];
    for &i in set {
        let p = &load.placements[i];
        for d in 0..3 {
            min[d] = min[d].min(p.position[d]);
            max[d] = max[d].max(p.position[d] + p.size[d]);
        }
    }
    (min, max)
}

/// The closure of items that must move together with `start`: everything
/// intersecting the growing bounding box or resting (directly or within
/// padding reach) on its top. Returns an empty set when the closure picks
/// up an item loaded lower than the start item, so the identical set is
/// not produced once per member.
pub fn movable_set(
    load: &UldLoad,
    start: usize,
    packing: &PackingParams,
) -> Vec<usize> {
    let start_z = load.placements[start].position[Z];
    let mut set = vec![start];
    loop {
        let (bmin, bmax) = bbox_of(load, &set);
        let bsize = [bmax[0] - bmin[0], bmax[1] - bmin[1], bmax[2] - bmin[2]];
        let mut added = false;
        for (j, p) in load.placements.iter().enumerate() {
            if p.is_dummy() || set.contains(&j) {
                continue;
            }
            let intersects = collides(bmin, bsize, p.position, p.size);
            let supported = base_area_overlap(bmin, bsize, p.position, p.size) > 0
                && p.position[Z] >= bmax[Z]
                && p.position[Z] <= bmax[Z] + packing.max_padding_height;
            if intersects || supported {
                if p.position[Z] < start_z {
                    return Vec::new();
                }
                set.push(j);
                added = true;
            }
        }
        if !added {
            return set;
        }
    }
}

/// Largest shift for which no member of `set` collides with anything
/// outside it or leaves the ULD.
fn collision_limit(load: &UldLoad, uld: &Uld, set: &[usize], dir: Direction) -> i64 {
    let mut limit = i64::MAX;
    for &i in set {
        let p = &load.placements[i];
        // Walls.
        limit = limit.min(if dir.sign > 0 {
            uld.bounding_box[dir.axis] - (p.position[dir.axis] + p.size[dir.axis])
        } else {
            p.position[dir.axis]
        });
        // Tilted facets: slack shrinks by |n_axis| per unit step when the
        // normal opposes the direction.
        for plane in uld.tilted_planes() {
            let step = plane.normal[dir.axis] * dir.sign;
            if step < 0 {
                let slack = plane.eval(plane.critical_corner(p.position, p.size));
                limit = limit.min(slack / (-step));
            }
        }
        // Items and dummies outside the moved set.
        for (j, other) in load.placements.iter().enumerate() {
            if set.contains(&j) {
                continue;
            }
            let cross = (0..3).filter(|&d| d != dir.axis).all(|d| {
                other.position[d] < p.position[d] + p.size[d]
                    && p.position[d] < other.position[d] + other.size[d]
            });
            if !cross {
                continue;
            }
            let gap = if dir.sign > 0 {
                other.position[dir.axis] - (p.position[dir.axis] + p.size[dir.axis])
            } else {
                p.position[dir.axis] - (other.position[dir.axis] + other.size[dir.axis])
            };
            if gap >= 0 {
                limit = limit.min(gap);
            }
        }
    }
    limit.max(0)
}

/// Whether the load stays feasible when `set` is shifted by `offset`.
fn shifted_feasible(
    load: &UldLoad,
    uld: &Uld,
    packing: &PackingParams,
    set: &[usize],
    dir: Direction,
    offset: i64,
) -> bool {
    let mut placements = load.placements.clone();
    for &i in set {
        placements[i].position[dir.axis] += dir.sign * offset;
    }
    for &i in set {
        let p = &placements[i];
        if !fits_bounding_box(p.position, p.size, uld.bounding_box) {
            return false;
        }
        for plane in uld.tilted_planes() {
            if !plane.box_inside(p.position, p.size) {
                return false;
            }
        }
    }
    // Collisions can only involve moved members.
    for &i in set {
        let p = placements[i];
        for (j, other) in placements.iter().enumerate() {
            if j != i && !set.contains(&j) && collides(p.position, p.size, other.position, other.size)
            {
                return false;
            }
        }
    }
    // Support must hold for every real item in the shifted scene: moved
    // members may have slid off their supports, and a moved non-stackable
    // member may have arrived underneath an unmoved item.
    for (i, p) in placements.iter().enumerate() {
        if p.is_dummy() {
            continue;
        }
        let mut others = LoadState::new(uld, packing, None);
        for (j, q) in placements.iter().enumerate() {
            if j != i {
                others.place(*q);
            }
        }
        if !others.support(p.position, p.size).verdict {
            return false;
        }
    }
    true
}

/// Move `set` as far as feasible towards the hole: binary search on the
/// interval bounded by the collision-only limit. Returns the applied
/// offset (possibly 0).
pub fn slide(
    load: &mut UldLoad,
    uld: &Uld,
    packing: &PackingParams,
    set: &[usize],
    dir: Direction,
) -> i64 {
    if set.is_empty() {
        return 0;
    }
    let limit = collision_limit(load, uld, set, dir);
    if limit == 0 {
        return 0;
    }
    let feasible = |offset: i64| shifted_feasible(load, uld, packing, set, dir, offset);
    let mut best = 0;
    let (mut lo, mut hi) = (0i64, limit);
    if feasible(limit) {
        best = limit;
    } else {
        while lo < hi {
            let mid = (lo + hi + 1) / 2;
            if mid == limit || !feasible(mid) {
                hi = mid - 1;
            } else {
                lo = mid;
            }
        }
        best = best.max(lo);
    }
    if best > 0 {
        for &i in set {
            load.placements[i].position[dir.axis] += dir.sign * best;
        }
    }
    best
}

/// Repeatedly close holes, one direction at a time, until a full sweep
/// moves nothing or the iteration cap is reached. Only positions change;
/// item set, orientations, and z-coordinates are preserved.
pub fn close_holes(
    load: &mut UldLoad,
    uld: &Uld,
    packing: &PackingParams,
    max_iters: u32,
) -> u32 {
    let mut moves = 0;
    for _ in 0..max_iters {
        let mut moved_this_sweep = false;
        for idx in 0..load.placements.len() {
            if load.placements[idx].is_dummy() {
                continue;
            }
            for axis in [X, Y] {
                if let Some(dir) = hole_towards(load, uld, idx, axis) {
                    let set = movable_set(load, idx, packing);
                    if set.is_empty() {
                        continue;
                    }
                    if slide(load, uld, packing, &set, dir) > 0 {
                        moved_this_sweep = true;
                        moves += 1;
                    }
                }
            }
        }
        if !moved_this_sweep {
            break;
        }
    }
    moves
}
