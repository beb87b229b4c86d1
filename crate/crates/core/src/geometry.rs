//! Plane and facet arithmetic, containment tests, and footprint overlap
//! areas. Coordinates are integer length units, so all containment and
//! overlap checks are exact.

use serde::{Deserialize, Serialize};

pub type Point = [i64; 3];
pub type Size = [i64; 3];

pub fn add(a: Point, b: Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn volume(s: Size) -> i64 {
    s[0] * s[1] * s[2]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn dot(a: Point, b: Point) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A facet's plane in the form normal . p >= offset for the ULD interior,
/// with an integer normal pointing inward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacetPlane {
    pub normal: [i64; 3],
    pub offset: i64,
}

impl FacetPlane {
    /// Derive the plane from a facet's vertex list, oriented so the given
    /// interior point is on the non-negative side. Returns None when the
    /// polygon is degenerate or the vertices are not coplanar.
    pub fn from_polygon(points: &[Point], interior: [f64; 3]) -> Option<FacetPlane> {
        if points.len() < 3 {
            return None;
        }
        let mut normal = [0i64; 3];
        for i in 1..points.len() - 1 {
            let n = cross(sub(points[i], points[0]), sub(points[i + 1], points[0]));
            if n != [0, 0, 0] {
                normal = n;
                break;
            }
        }
        if normal == [0, 0, 0] {
            return None;
        }
        let g = gcd(gcd(normal[0], normal[1]), normal[2]);
        normal = [normal[0] / g, normal[1] / g, normal[2] / g];
        let mut offset = dot(normal, points[0]);
        // All vertices must lie on the plane.
        if points.iter().any(|&p| dot(normal, p) != offset) {
            return None;
        }
        let side = normal[0] as f64 * interior[0]
            + normal[1] as f64 * interior[1]
            + normal[2] as f64 * interior[2]
            - offset as f64;
        if side < 0.0 {
            normal = [-normal[0], -normal[1], -normal[2]];
            offset = -offset;
        }
        Some(FacetPlane { normal, offset })
    }

    /// Signed slack of a point: >= 0 means inside or on the facet.
    pub fn eval(&self, p: Point) -> i64 {
        dot(self.normal, p) - self.offset
    }

    /// The axis this facet is orthogonal to, when axis-parallel.
    pub fn axis(&self) -> Option<usize> {
        let mut axis = None;
        for d in 0..3 {
            if self.normal[d] != 0 {
                if axis.is_some() {
                    return None;
                }
                axis = Some(d);
            }
        }
        axis
    }

    #[inline]
    pub fn tilted(&self) -> bool {
        self.axis().is_none()
    }

    /// The item corner minimizing normal . corner: the only corner that
    /// needs checking for half-space containment.
    pub fn critical_corner(&self, position: Point, size: Size) -> Point {
        let mut c = position;
        for d in 0..3 {
            if self.normal[d] < 0 {
                c[d] += size[d];
            }
        }
        c
    }

    /// Whether a box placed at `position` lies inside this facet's
    /// half-space.
    pub fn box_inside(&self, position: Point, size: Size) -> bool {
        self.eval(self.critical_corner(position, size)) >= 0
    }
}

/// Wall-exceedance check against the non-tilted facets: the box must not
/// protrude past the bounding box in any dimension.
pub fn fits_bounding_box(position: Point, size: Size, bounding_box: Size) -> bool {
    (0..3).all(|d| position[d] + size[d] <= bounding_box[d])
}

/// Whether a box lies inside a tilted facet's half-space.
pub fn inside_tilted_facet(position: Point, size: Size, plane: &FacetPlane) -> bool {
    debug_assert!(plane.tilted());
    plane.box_inside(position, size)
}

fn overlap_1d(a_min: i64, a_max: i64, b_min: i64, b_max: i64) -> i64 {
    (a_max.min(b_max) - a_min.max(b_min)).max(0)
}

/// Area of the x-y intersection of two footprints given as (min, size).
pub fn base_area_overlap(a_pos: Point, a_size: Size, b_pos: Point, b_size: Size) -> i64 {
    overlap_1d(a_pos[0], a_pos[0] + a_size[0], b_pos[0], b_pos[0] + b_size[0])
        * overlap_1d(a_pos[1], a_pos[1] + a_size[1], b_pos[1], b_pos[1] + b_size[1])
}

/// Area of the x-y intersection of three footprints.
pub fn triple_base_area_overlap(
    a_pos: Point,
    a_size: Size,
    b_pos: Point,
    b_size: Size,
    c_pos: Point,
    c_size: Size,
) -> i64 {
    let mut area = 1;
    for d in 0..2 {
        let lo = a_pos[d].max(b_pos[d]).max(c_pos[d]);
        let hi = (a_pos[d] + a_size[d])
            .min(b_pos[d] + b_size[d])
            .min(c_pos[d] + c_size[d]);
        area *= (hi - lo).max(0);
    }
    area
}

pub fn centroid(points: &[Point]) -> [f64; 3] {
    let n = points.len() as f64;
    let mut c = [0.0; 3];
    for p in points {
        for d in 0..3 {
            c[d] += p[d] as f64;
        }
    }
    [c[0] / n, c[1] / n, c[2] / n]
}

/// Volume of a convex polytope given by vertices and facet vertex-index
/// lists, via signed tetrahedra against the origin.
pub fn convex_volume(vertices: &[Point], facets: &[Vec<usize>]) -> f64 {
    let interior = centroid(vertices);
    let mut six_v = 0.0;
    for facet in facets {
        let pts: Vec<Point> = facet.iter().map(|&i| vertices[i]).collect();
        let Some(plane) = FacetPlane::from_polygon(&pts, interior) else {
            continue;
        };
        // Fan triangulation, wound so triangle normals point outward
        // (against the stored inward normal).
        for i in 1..pts.len() - 1 {
            let (mut b, mut c) = (pts[i], pts[i + 1]);
            let n = cross(sub(b, pts[0]), sub(c, pts[0]));
            if dot(n, plane.normal) > 0 {
                std::mem::swap(&mut b, &mut c);
            }
            six_v += dot(pts[0], cross(b, c)) as f64;
        }
    }
    six_v / 6.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounding_box_exact_fit_is_inside() {
        assert!(fits_bounding_box([0, 0, 0], [5, 5, 5], [5, 5, 5]));
        assert!(!fits_bounding_box([1, 0, 0], [5, 5, 5], [5, 5, 5]));
        assert!(fits_bounding_box([2, 3, 0], [3, 2, 5], [5, 5, 5]));
    }

    // Oracle: a box is inside a half-space iff all 8 corners are.
    fn inside_by_corners(pos: Point, size: Size, plane: &FacetPlane) -> bool {
        for dx in [0, size[0]] {
            for dy in [0, size[1]] {
                for dz in [0, size[2]] {
                    if plane.eval([pos[0] + dx, pos[1] + dy, pos[2] + dz]) < 0 {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn tilted_facet_check_matches_examples() {
        // Plane y - z = -1.
        let plane = FacetPlane {
            normal: [0, 1, -1],
            offset: -1,
        };
        assert!(inside_tilted_facet([0, 0, 0], [1, 1, 1], &plane));
        assert!(!inside_tilted_facet([0, 0, 0], [1, 1, 2], &plane));
    }

    #[test]
    fn critical_corner_matches_corner_enumeration() {
        let planes = [
            FacetPlane { normal: [0, 1, -1], offset: -1 },
            FacetPlane { normal: [0, -2, -3], offset: -40 },
            FacetPlane { normal: [0, 3, 1], offset: 2 },
            FacetPlane { normal: [1, -1, 2], offset: -5 },
        ];
        let mut k = 0i64;
        for plane in &planes {
            for _ in 0..200 {
                k = k.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let r = |shift: u32, m: i64| (k >> shift).rem_euclid(m);
                let pos = [r(5, 12), r(11, 12), r(17, 12)];
                let size = [1 + r(23, 6), 1 + r(29, 6), 1 + r(35, 6)];
                assert_eq!(
                    plane.box_inside(pos, size),
                    inside_by_corners(pos, size, plane),
                    "plane {plane:?} pos {pos:?} size {size:?}"
                );
            }
        }
    }

    #[test]
    fn base_area_overlap_examples() {
        let p = |x, y| [x, y, 0];
        assert_eq!(base_area_overlap(p(0, 0), [2, 2, 1], p(0, 0), [2, 2, 1]), 4);
        // Touching edges do not overlap.
        assert_eq!(base_area_overlap(p(0, 0), [2, 2, 1], p(2, 0), [2, 2, 1]), 0);
        assert_eq!(base_area_overlap(p(0, 0), [3, 3, 1], p(1, 1), [3, 3, 1]), 4);
    }

    #[test]
    fn triple_overlap_examples() {
        let p = |x, y| [x, y, 0];
        let unit = [1, 1, 1];
        assert_eq!(
            triple_base_area_overlap(p(0, 0), unit, p(0, 0), unit, p(0, 0), unit),
            1
        );
        assert_eq!(
            triple_base_area_overlap(p(0, 0), unit, p(5, 5), unit, p(0, 0), unit),
            0
        );
        assert_eq!(
            triple_base_area_overlap(
                p(0, 0),
                [4, 4, 1],
                p(2, 0),
                [4, 4, 1],
                p(3, 0),
                [2, 4, 1]
            ),
            4
        );
    }

    #[test]
    fn overlap_is_symmetric_and_bounded() {
        let a = ([1, 2, 0], [4, 3, 1]);
        let b = ([2, 0, 0], [5, 4, 1]);
        let ab = base_area_overlap(a.0, a.1, b.0, b.1);
        let ba = base_area_overlap(b.0, b.1, a.0, a.1);
        assert_eq!(ab, ba);
        assert!(ab <= (a.1[0] * a.1[1]).min(b.1[0] * b.1[1]));
    }

    #[test]
    fn cuboid_volume_matches_formula() {
        let uld = crate::model::Uld::cuboid("c", [7, 5, 3], 100).unwrap();
        assert!((convex_volume(&uld.vertices, &uld.facets) - 105.0).abs() < 1e-9);
    }
}
