//! Candidate loading positions: the extreme-point store, point generation
//! by projection with surface extension and blocking items, and the rule
//! for moving critical points along tilted facets.

use crate::geometry::{FacetPlane, Point};
use crate::model::{EpSortOrder, Placement, Uld, VariantFlags, X, Y, Z};

/// A candidate loading position. `movable` marks points lying directly on
/// a ULD facet with normal (0, n2 > 0, n3 <= 0); only those may be moved
/// away from the origin in y-direction against the critical facet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtremePoint {
    pub coords: Point,
    pub movable: bool,
}

/// Ordered set of extreme points, iterated in ascending lexicographic
/// order of the configured axis permutation.
#[derive(Debug, Clone)]
pub struct EpStore {
    order: EpSortOrder,
    points: Vec<ExtremePoint>,
}

impl EpStore {
    /// A store holding only the origin.
    pub fn init(uld: &Uld, order: EpSortOrder) -> EpStore {
        let mut store = EpStore {
            order,
            points: Vec::new(),
        };
        store.insert([0, 0, 0], uld);
        store
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in consumption order.
    pub fn iter(&self) -> impl Iterator<Item = &ExtremePoint> {
        self.points.iter()
    }

    pub fn get(&self, idx: usize) -> Option<ExtremePoint> {
        self.points.get(idx).copied()
    }

    /// Insert a point, deduplicating by exact coordinates. A duplicate
    /// keeps its facet linkage if either copy has it.
    pub fn insert(&mut self, coords: Point, uld: &Uld) {
        let movable = on_movable_facet(coords, uld);
        let key = self.order.key(coords);
        match self
            .points
            .binary_search_by(|p| self.order.key(p.coords).cmp(&key))
        {
            Ok(i) => self.points[i].movable |= movable,
            Err(i) => self.points.insert(i, ExtremePoint { coords, movable }),
        }
    }

    pub fn extend(&mut self, coords: impl IntoIterator<Item = Point>, uld: &Uld) {
        for c in coords {
            self.insert(c, uld);
        }
    }
}

/// Whether a point lies directly on a facet from which moving is allowed
/// (n1 = 0, n2 > 0, n3 <= 0). Moving additionally requires the ULD to have
/// a critical facet at all.
fn on_movable_facet(p: Point, uld: &Uld) -> bool {
    if uld.critical_plane().is_none() {
        return false;
    }
    uld.planes.iter().any(|plane| {
        plane.normal[X] == 0
            && plane.normal[Y] > 0
            && plane.normal[Z] <= 0
            && plane.eval(p) == 0
    })
}

/// A critical extreme point moved in +y so that an item of height
/// `item_height` fits against the critical facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovedPoint {
    pub position: Point,
    /// The exact (possibly fractional) shift; the integer position is the
    /// ceiling, the smallest integral move keeping the item inside.
    pub exact_shift: f64,
}

/// Moving rule: place the item's top y-side corner onto the critical
/// facet. Returns None when no move is needed (the item already fits on
/// the feasible side).
pub fn move_point(point: Point, item_height: i64, critical: &FacetPlane) -> Option<MovedPoint> {
    debug_assert!(
        critical.normal[X] == 0 && critical.normal[Y] > 0 && critical.normal[Z] < 0,
        "not a critical facet: {critical:?}"
    );
    let n2 = critical.normal[Y];
    let n3 = critical.normal[Z];
    let numer = critical.offset - n2 * point[Y] - n3 * (point[Z] + item_height);
    if numer <= 0 {
        return None;
    }
    let shift = div_ceil(numer, n2);
    Some(MovedPoint {
        position: [point[X], point[Y] + shift, point[Z]],
        exact_shift: numer as f64 / n2 as f64,
    })
}

fn div_ceil(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    a.div_euclid(b) + i64::from(a.rem_euclid(b) != 0)
}

/// Coordinate at which a projection along `-d` exits the ULD: 0 for the
/// axis-parallel wall, or further inside when a tilted facet with
/// n_d > 0 cuts the ray first.
fn wall_exit(p: Point, d: usize, uld: &Uld) -> i64 {
    let mut bound = 0;
    for plane in uld.tilted_planes() {
        let nd = plane.normal[d];
        if nd <= 0 {
            continue;
        }
        let mut rest = plane.offset;
        for k in 0..3 {
            if k != d {
                rest -= plane.normal[k] * p[k];
            }
        }
        bound = bound.max(div_ceil(rest, nd));
    }
    bound
}

/// The projection subroutine: walk from `p` towards the origin along axis
/// `d`, emitting a candidate point on the surface of every loaded item the
/// ray passes over (surface extension), skipping items shadowed by the
/// blocking set, and stopping at the first directly hit item or the wall.
pub fn project(
    p: Point,
    d: usize,
    loaded: &[Placement],
    uld: &Uld,
    variant: &VariantFlags,
) -> Vec<Point> {
    let mut order: Vec<usize> = (0..loaded.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(loaded[i].position[d] + loaded[i].size[d]));
    project_ordered(p, d, loaded, &order, uld, variant)
}

/// `project` with the non-ascending end-position order precomputed by the
/// caller (it is shared between the two projections along each axis).
fn project_ordered(
    p: Point,
    d: usize,
    loaded: &[Placement],
    order: &[usize],
    uld: &Uld,
    variant: &VariantFlags,
) -> Vec<Point> {
    let (t, u) = match d {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };

    let mut result = Vec::new();
    let mut point = p;
    let mut blocking: Vec<usize> = Vec::new();

    for &i in order {
        let item = &loaded[i];
        let end = |a: usize| item.position[a] + item.size[a];
        // Irrelevant: beyond the start in projection direction, or on the
        // origin side of the start in a non-projection direction.
        if item.position[d] >= p[d] || end(t) <= p[t] || end(u) <= p[u] {
            continue;
        }
        if variant.crainic_mimic {
            if p[t] >= item.position[t]
                && p[u] >= item.position[u]
                && end(d) <= p[d]
                && (d != Z || item.stackable)
            {
                point[d] = end(d);
                result.push(point);
                return result;
            }
            continue;
        }
        if variant.blocking_enabled() {
            let shadowed = blocking.iter().any(|&b| {
                let bp = &loaded[b].position;
                (item.position[t] >= bp[t] || p[t] >= bp[t])
                    && (item.position[u] >= bp[u] || p[u] >= bp[u])
            });
            if shadowed {
                continue;
            }
        }
        if end(d) <= p[d] && (d != Z || item.stackable) {
            point[d] = end(d);
            result.push(point);
        }
        // Directly hit: everything further towards the origin is shadowed.
        if p[t] >= item.position[t] && p[u] >= item.position[u] {
            return result;
        }
        blocking.push(i);
    }

    point[d] = wall_exit(p, d, uld);
    result.push(point);
    result
}

/// New extreme points generated by loading `placed` (Algorithm 3): six
/// projections from the far corners, skipping top-corner projections for
/// non-stackable items, plus the point on top of a stackable item.
///
/// `loaded` are the previously accepted placements (without `placed`).
pub fn generate_new_points(
    loaded: &[Placement],
    placed: &Placement,
    uld: &Uld,
    variant: &VariantFlags,
) -> Vec<Point> {
    let mut out = Vec::new();
    let e = placed.position;
    let s = placed.size;
    let mut orders: [Option<Vec<usize>>; 3] = [None, None, None];
    for j in 0..3 {
        if !placed.stackable && j == Z {
            continue;
        }
        for d in 0..3 {
            if d == j {
                continue;
            }
            let mut p = e;
            p[j] += s[j];
            if !variant.crainic_mimic {
                // Start further from the origin so the ray passes over
                // more loaded items.
                p[d] += s[d];
            }
            let order = orders[d].get_or_insert_with(|| {
                let mut order: Vec<usize> = (0..loaded.len()).collect();
                order.sort_by_key(|&i| {
                    std::cmp::Reverse(loaded[i].position[d] + loaded[i].size[d])
                });
                order
            });
            out.extend(project_ordered(p, d, loaded, order, uld, variant));
        }
    }
    if placed.stackable && !variant.crainic_mimic {
        out.push([e[X], e[Y], e[Z] + s[Z]]);
    }
    out
}
