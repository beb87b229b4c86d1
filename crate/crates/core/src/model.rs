//! Domain types shared by every solver stage: items, ULDs, placements,
//! loads, and the packing/algorithm parameter sets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, FacetPlane, Point, Size};

/// Axis indices used throughout: 0 = x (length), 1 = y (width), 2 = z (height).
pub const X: usize = 0;
pub const Y: usize = 1;
pub const Z: usize = 2;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("orientation {0:?} not admissible for item (rotatable={1}, tiltable={2})")]
    InadmissibleOrientation(Orientation, bool, bool),
    #[error("item {0}: tiltable items must be rotatable")]
    TiltableNotRotatable(String),
    #[error("item {0}: size components must be >= 1")]
    NonPositiveSize(String),
    #[error("ULD {id}: {reason}")]
    InvalidUld { id: String, reason: String },
}

/// A cuboid cargo piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub id: String,
    /// Original (untilted, unrotated) size: length, width, height.
    pub size: Size,
    #[serde(default)]
    pub weight: i64,
    #[serde(default)]
    pub rotatable: bool,
    #[serde(default)]
    pub tiltable: bool,
    #[serde(default = "default_true")]
    pub stackable: bool,
}

fn default_true() -> bool {
    true
}

impl Item {
    pub fn volume(&self) -> i64 {
        self.size[X] * self.size[Y] * self.size[Z]
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.size.iter().any(|&s| s < 1) {
            return Err(ModelError::NonPositiveSize(self.id.clone()));
        }
        if self.tiltable && !self.rotatable {
            return Err(ModelError::TiltableNotRotatable(self.id.clone()));
        }
        Ok(())
    }
}

/// Tilt component of an orientation. The tilt is applied to the item's
/// original size before any rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tilt {
    None,
    AcrossX,
    AcrossY,
}

impl Tilt {
    pub const ALL: [Tilt; 3] = [Tilt::None, Tilt::AcrossX, Tilt::AcrossY];

    /// Size permutation convention: across_x swaps width/height,
    /// across_y swaps length/height.
    pub fn apply(self, s: Size) -> Size {
        match self {
            Tilt::None => s,
            Tilt::AcrossX => [s[X], s[Z], s[Y]],
            Tilt::AcrossY => [s[Z], s[Y], s[X]],
        }
    }
}

/// An item orientation: tilt first, then an optional 90-degree rotation
/// around the vertical axis (swapping length and width).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Orientation {
    pub tilt: Tilt,
    pub rotated: bool,
}

impl Orientation {
    pub const IDENTITY: Orientation = Orientation {
        tilt: Tilt::None,
        rotated: false,
    };

    pub fn apply(self, s: Size) -> Size {
        let t = self.tilt.apply(s);
        if self.rotated {
            [t[Y], t[X], t[Z]]
        } else {
            t
        }
    }

    pub fn admissible(self, rotatable: bool, tiltable: bool) -> bool {
        (self.tilt == Tilt::None || tiltable) && (!self.rotated || rotatable)
    }
}

/// Oriented size of an item, checking admissibility against its flags.
pub fn apply_orientation(item: &Item, orientation: Orientation) -> Result<Size, ModelError> {
    if !orientation.admissible(item.rotatable, item.tiltable) {
        return Err(ModelError::InadmissibleOrientation(
            orientation,
            item.rotatable,
            item.tiltable,
        ));
    }
    Ok(orientation.apply(item.size))
}

/// All orientations admissible for the item's flags: 1 for fixed items,
/// 2 for rotatable-only, 6 for tiltable items.
pub fn admissible_orientations(item: &Item) -> Vec<Orientation> {
    let mut out = Vec::new();
    for tilt in Tilt::ALL {
        if tilt != Tilt::None && !item.tiltable {
            continue;
        }
        for rotated in [false, true] {
            if rotated && !item.rotatable {
                continue;
            }
            out.push(Orientation { tilt, rotated });
        }
    }
    out
}

/// A convex container given by vertices and facets, with derived planes
/// and bounding box.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Uld {
    pub id: String,
    pub vertices: Vec<Point>,
    /// Facets as lists of vertex indices.
    pub facets: Vec<Vec<usize>>,
    pub weight_capacity: i64,
    pub volume_capacity: i64,
    #[serde(default)]
    pub edge_width: i64,
    #[serde(default)]
    pub edge_offset: i64,
    #[serde(default)]
    pub substructure_allowed: bool,
    /// Derived; recomputed on load.
    #[serde(skip)]
    pub planes: Vec<FacetPlane>,
    /// Derived: the non-axis-parallel planes, kept separately for the
    /// per-check containment test.
    #[serde(skip)]
    pub tilted: Vec<FacetPlane>,
    #[serde(skip)]
    pub bounding_box: Size,
}

impl Uld {
    pub fn new(
        id: impl Into<String>,
        vertices: Vec<Point>,
        facets: Vec<Vec<usize>>,
        weight_capacity: i64,
        volume_capacity: i64,
    ) -> Result<Self, ModelError> {
        let mut uld = Uld {
            id: id.into(),
            vertices,
            facets,
            weight_capacity,
            volume_capacity,
            edge_width: 0,
            edge_offset: 0,
            substructure_allowed: false,
            planes: Vec::new(),
            tilted: Vec::new(),
            bounding_box: [0; 3],
        };
        uld.finalize()?;
        Ok(uld)
    }

    /// Axis-aligned cuboid container.
    pub fn cuboid(
        id: impl Into<String>,
        dims: Size,
        weight_capacity: i64,
    ) -> Result<Self, ModelError> {
        let [l, w, h] = dims;
        let vertices = vec![
            [0, 0, 0],
            [l, 0, 0],
            [l, w, 0],
            [0, w, 0],
            [0, 0, h],
            [l, 0, h],
            [l, w, h],
            [0, w, h],
        ];
        let facets = vec![
            vec![0, 1, 2, 3], // floor
            vec![4, 5, 6, 7], // ceiling
            vec![0, 1, 5, 4], // y = 0
            vec![3, 2, 6, 7], // y = w
            vec![0, 3, 7, 4], // x = 0
            vec![1, 2, 6, 5], // x = l
        ];
        Uld::new(id, vertices, facets, weight_capacity, l * w * h)
    }

    /// Recompute planes/bounding box and check the supported-shape rules.
    pub fn finalize(&mut self) -> Result<(), ModelError> {
        let err = |reason: &str| ModelError::InvalidUld {
            id: self.id.clone(),
            reason: reason.to_string(),
        };
        if self.vertices.is_empty() || self.facets.len() < 6 {
            return Err(err("need at least six facets"));
        }
        for d in 0..3 {
            let min = self.vertices.iter().map(|v| v[d]).min().unwrap();
            if min != 0 {
                return Err(err("vertex set must touch 0 in every dimension"));
            }
            self.bounding_box[d] = self.vertices.iter().map(|v| v[d]).max().unwrap();
        }
        let centroid = geometry::centroid(&self.vertices);
        self.planes = Vec::with_capacity(self.facets.len());
        for facet in &self.facets {
            if facet.len() < 3 || facet.iter().any(|&i| i >= self.vertices.len()) {
                return Err(err("facet must reference at least three valid vertices"));
            }
            let pts: Vec<Point> = facet.iter().map(|&i| self.vertices[i]).collect();
            let plane = FacetPlane::from_polygon(&pts, centroid)
                .ok_or_else(|| err("degenerate or non-planar facet"))?;
            self.planes.push(plane);
        }
        // Exactly two facets parallel to each coordinate plane; all other
        // facets must be orthogonal to the y-z plane (normal x-component 0).
        let mut axis_pairs = [0usize; 3];
        let mut tilted = 0usize;
        for p in &self.planes {
            match p.axis() {
                Some(d) => axis_pairs[d] += 1,
                None => {
                    tilted += 1;
                    if p.normal[X] != 0 {
                        return Err(err("tilted facets must be orthogonal to the y-z plane"));
                    }
                }
            }
        }
        if axis_pairs != [2, 2, 2] {
            return Err(err(
                "need exactly two facets parallel to each coordinate plane",
            ));
        }
        self.tilted = self.planes.iter().filter(|p| p.tilted()).copied().collect();
        if tilted > 2 {
            return Err(err("at most two tilted facets are supported"));
        }
        // Convexity: every vertex on the inner side of every facet plane.
        for v in &self.vertices {
            for p in &self.planes {
                if p.eval(*v) < 0 {
                    return Err(err("vertex outside a facet half-space (non-convex?)"));
                }
            }
        }
        Ok(())
    }

    pub fn tilted_planes(&self) -> impl Iterator<Item = &FacetPlane> {
        self.tilted.iter()
    }

    /// The unique tilted facet with n1 = 0, n2 > 0, n3 < 0, if present.
    /// Extreme points are moved in +y against this facet.
    pub fn critical_plane(&self) -> Option<&FacetPlane> {
        self.tilted_planes()
            .find(|p| p.normal[Y] > 0 && p.normal[Z] < 0)
    }

    /// Volume of the convex hull; equals the bounding-box volume for cuboids.
    pub fn hull_volume(&self) -> f64 {
        geometry::convex_volume(&self.vertices, &self.facets)
    }
}

/// Parameters defining what constitutes a feasible packing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PackingParams {
    /// Maximum height of a gap that padding material may fill.
    pub max_padding_height: i64,
    /// Minimum supported fraction of an item's base area, in [0, 1].
    pub min_item_overlap: f64,
    /// Maximum normalized deviation of the CoG from the geometric center.
    pub max_cog_deviation: f64,
    /// Weight-balance importance in scoring; volume importance is
    /// max(0, 1 - weight_balance_importance).
    pub weight_balance_importance: f64,
    pub corner_support_mode: CornerSupportMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CornerSupportMode {
    /// Non-floating when directly supported and (4 corners rest or the
    /// supported area reaches the minimum overlap).
    #[default]
    Full,
    /// Non-floating only when all four bottom corners rest.
    CornersOnly,
}

impl Default for PackingParams {
    fn default() -> Self {
        PackingParams {
            max_padding_height: 10,
            min_item_overlap: 0.9,
            max_cog_deviation: 0.1,
            weight_balance_importance: 0.5,
            corner_support_mode: CornerSupportMode::Full,
        }
    }
}

impl PackingParams {
    pub fn volume_importance(&self) -> f64 {
        (1.0 - self.weight_balance_importance).max(0.0)
    }
}

/// Order in which extreme points are consumed: ascending lexicographic by
/// the given axis permutation (most significant first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpSortOrder {
    /// Bottom-to-top loading (z, y, x); the default.
    Zyx,
    /// Stack-building loading (x, y, z); used for multi-drop style packing.
    Xyz,
}

impl Default for EpSortOrder {
    fn default() -> Self {
        EpSortOrder::Zyx
    }
}

impl EpSortOrder {
    pub fn key(self, p: Point) -> [i64; 3] {
        match self {
            EpSortOrder::Zyx => [p[Z], p[Y], p[X]],
            EpSortOrder::Xyz => [p[X], p[Y], p[Z]],
        }
    }
}

/// Algorithm-specific parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoParams {
    /// Budget of extreme-point checks per ULD solve; the deterministic
    /// stop criterion.
    pub max_ep_checks: u64,
    pub min_rgs_iters: u32,
    pub max_rgs_iters: u32,
    /// Degree of randomization in (0, 1].
    pub randomization_degree: f64,
    pub ep_sort_order: EpSortOrder,
    pub rng_seed: u64,
    pub hole_close_max_iters: u32,
    #[serde(flatten)]
    pub variant: VariantFlags,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            max_ep_checks: 20_000_000,
            min_rgs_iters: 10,
            max_rgs_iters: 500,
            randomization_degree: 0.5,
            ep_sort_order: EpSortOrder::Zyx,
            rng_seed: 0,
            hole_close_max_iters: 100,
            variant: VariantFlags::default(),
        }
    }
}

/// Ablation switches for the algorithm-component experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct VariantFlags {
    /// Disable the spatial grid; feasibility checks scan all placements.
    pub no_grid: bool,
    /// Disable the blocking-item filter in the projection routine.
    pub no_blocking: bool,
    /// Disable moving of critical extreme points.
    pub no_moving: bool,
    /// Generate at most one extreme point per projection (directly hit
    /// item or wall), original start corners, no top point, no moving.
    pub crainic_mimic: bool,
}

impl Default for VariantFlags {
    fn default() -> Self {
        VariantFlags {
            no_grid: false,
            no_blocking: false,
            no_moving: false,
            crainic_mimic: false,
        }
    }
}

impl VariantFlags {
    pub fn moving_enabled(&self) -> bool {
        !self.no_moving && !self.crainic_mimic
    }

    pub fn blocking_enabled(&self) -> bool {
        !self.no_blocking && !self.crainic_mimic
    }
}

/// What occupies a placement slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placed {
    /// Index into the instance item list.
    Item(usize),
    /// Non-stackable blocker over the ULD edge (height edge_offset - 1).
    EdgeDummy,
    /// Stackable raised floor (height edge_offset).
    SubstructureDummy,
}

impl Placed {
    pub fn is_dummy(self) -> bool {
        !matches!(self, Placed::Item(_))
    }
}

/// An item (or dummy) fixed at a position inside one ULD.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub placed: Placed,
    pub orientation: Orientation,
    /// Min corner.
    pub position: Point,
    /// Oriented size.
    pub size: Size,
    pub stackable: bool,
    pub weight: i64,
}

impl Placement {
    pub fn end_position(&self) -> Point {
        [
            self.position[X] + self.size[X],
            self.position[Y] + self.size[Y],
            self.position[Z] + self.size[Z],
        ]
    }

    pub fn top(&self) -> i64 {
        self.position[Z] + self.size[Z]
    }

    pub fn volume(&self) -> i64 {
        self.size[X] * self.size[Y] * self.size[Z]
    }

    pub fn is_dummy(&self) -> bool {
        self.placed.is_dummy()
    }
}

/// One loaded ULD: placements (dummies included) plus derived totals over
/// real items only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UldLoad {
    /// Index into the instance ULD-type list.
    pub uld_type: usize,
    pub substructure_used: bool,
    pub placements: Vec<Placement>,
}

impl UldLoad {
    pub fn empty(uld_type: usize, substructure_used: bool) -> Self {
        UldLoad {
            uld_type,
            substructure_used,
            placements: Vec::new(),
        }
    }

    pub fn real_placements(&self) -> impl Iterator<Item = &Placement> {
        self.placements.iter().filter(|p| !p.is_dummy())
    }

    pub fn loaded_volume(&self) -> i64 {
        self.real_placements().map(Placement::volume).sum()
    }

    pub fn loaded_weight(&self) -> i64 {
        self.real_placements().map(|p| p.weight).sum()
    }

    pub fn item_count(&self) -> usize {
        self.real_placements().count()
    }

    pub fn item_indices(&self) -> Vec<usize> {
        self.real_placements()
            .filter_map(|p| match p.placed {
                Placed::Item(i) => Some(i),
                _ => None,
            })
            .collect()
    }

    /// Center of gravity over real items (each item's CoG is its center).
    /// None for empty or weightless loads.
    pub fn center_of_gravity(&self) -> Option<[f64; 3]> {
        let total: i64 = self.loaded_weight();
        if total <= 0 {
            return None;
        }
        let mut acc = [0.0; 3];
        for p in self.real_placements() {
            for d in 0..3 {
                acc[d] += p.weight as f64 * (p.position[d] as f64 + p.size[d] as f64 / 2.0);
            }
        }
        Some([
            acc[0] / total as f64,
            acc[1] / total as f64,
            acc[2] / total as f64,
        ])
    }

    pub fn utilization(&self, uld: &Uld) -> f64 {
        self.loaded_volume() as f64 / uld.volume_capacity as f64
    }
}

/// Result of a full multi-ULD solve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Solution {
    pub loads: Vec<UldLoad>,
    /// Indices of items that could not be loaded anywhere.
    pub unloaded: Vec<usize>,
    /// Per-load combined scores, parallel to `loads`.
    pub scores: Vec<crate::rgs::Score>,
}

impl Solution {
    pub fn loaded_item_count(&self) -> usize {
        self.loads.iter().map(UldLoad::item_count).sum()
    }
}

/// A problem instance: items, ULD types with availability, parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub items: Vec<Item>,
    pub ulds: Vec<UldType>,
    #[serde(default)]
    pub packing: PackingParams,
    #[serde(default)]
    pub algo: AlgoParams,
}

/// A ULD type with its availability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UldType {
    #[serde(flatten)]
    pub uld: Uld,
    /// None = unlimited.
    pub count: Option<u32>,
}

impl Instance {
    pub fn validate(&self) -> Result<(), ModelError> {
        for item in &self.items {
            item.validate()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(size: Size, rotatable: bool, tiltable: bool) -> Item {
        Item {
            id: "i".into(),
            size,
            weight: 1,
            rotatable,
            tiltable,
            stackable: true,
        }
    }

    #[test]
    fn rotation_swaps_length_and_width() {
        let it = item([2, 3, 5], true, false);
        let s = apply_orientation(
            &it,
            Orientation {
                tilt: Tilt::None,
                rotated: true,
            },
        )
        .unwrap();
        assert_eq!(s, [3, 2, 5]);
    }

    #[test]
    fn identity_orientation_keeps_size() {
        let it = item([2, 3, 5], false, false);
        assert_eq!(
            apply_orientation(&it, Orientation::IDENTITY).unwrap(),
            [2, 3, 5]
        );
    }

    #[test]
    fn tilt_across_x_moves_width_to_height() {
        let it = item([2, 3, 5], true, true);
        let s = apply_orientation(
            &it,
            Orientation {
                tilt: Tilt::AcrossX,
                rotated: false,
            },
        )
        .unwrap();
        assert_eq!(s, [2, 5, 3]);
    }

    #[test]
    fn all_orientations_permute_the_size_multiset() {
        let it = item([2, 3, 5], true, true);
        for o in admissible_orientations(&it) {
            let mut s = apply_orientation(&it, o).unwrap();
            s.sort();
            assert_eq!(s, [2, 3, 5]);
        }
    }

    #[test]
    fn six_orientations_give_each_axis_assignment() {
        // Enumerate all 6 orientations of (2,3,5): the height axis takes
        // each original dimension exactly twice.
        let it = item([2, 3, 5], true, true);
        let orients = admissible_orientations(&it);
        assert_eq!(orients.len(), 6);
        let mut heights: Vec<i64> = orients
            .iter()
            .map(|&o| apply_orientation(&it, o).unwrap()[Z])
            .collect();
        heights.sort();
        assert_eq!(heights, [2, 2, 3, 3, 5, 5]);
    }

    #[test]
    fn orientation_counts_follow_flags() {
        assert_eq!(admissible_orientations(&item([1, 2, 3], false, false)).len(), 1);
        assert_eq!(admissible_orientations(&item([1, 2, 3], true, false)).len(), 2);
        assert_eq!(admissible_orientations(&item([1, 2, 3], true, true)).len(), 6);
    }

    #[test]
    fn inadmissible_orientation_rejected() {
        let it = item([1, 2, 3], false, false);
        assert!(apply_orientation(
            &it,
            Orientation {
                tilt: Tilt::AcrossX,
                rotated: false
            }
        )
        .is_err());
    }

    #[test]
    fn tiltable_requires_rotatable() {
        let mut it = item([1, 2, 3], false, false);
        it.tiltable = true;
        assert!(it.validate().is_err());
    }

    #[test]
    fn cuboid_uld_validates() {
        let uld = Uld::cuboid("c", [10, 8, 6], 1000).unwrap();
        assert_eq!(uld.bounding_box, [10, 8, 6]);
        assert_eq!(uld.planes.len(), 6);
        assert!(uld.critical_plane().is_none());
        assert!((uld.hull_volume() - 480.0).abs() < 1e-6);
    }

    #[test]
    fn uld_must_touch_origin() {
        let mut uld = Uld::cuboid("c", [4, 4, 4], 100).unwrap();
        for v in &mut uld.vertices {
            v[0] += 1;
        }
        assert!(uld.finalize().is_err());
    }
}
