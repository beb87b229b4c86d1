//! Seeded synthetic instance generators: single-container instances in
//! the classic benchmark distribution (one cuboid container, weakly
//! heterogeneous item types filling roughly the container volume) and
//! air-cargo style multi-ULD instances over the bundled wide-body ULD
//! shape set. All generation is deterministic in the seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::io::br::{BrInstance, BrItemType};
use crate::model::{Instance, Item, Uld, UldType};

/// The classic single-container dimensions.
pub const CONTAINER: [i64; 3] = [587, 233, 220];

/// One synthetic single-container instance with `type_count` box types:
/// dimensions drawn uniformly from [30,120] x [25,100] x [20,80], all
/// orientations allowed, counts chosen so each type contributes an equal
/// volume share and the total just reaches the container volume.
pub fn br_like_instance(seed: u64, number: u32, type_count: usize) -> BrInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let container_volume: i64 = CONTAINER.iter().product();
    let share = container_volume / type_count as i64;
    let mut types: Vec<BrItemType> = (0..type_count)
        .map(|_| {
            let dims = [
                rng.gen_range(30..=120),
                rng.gen_range(25..=100),
                rng.gen_range(20..=80),
            ];
            let volume: i64 = dims.iter().product();
            BrItemType {
                dims,
                vertical: [true, true, true],
                count: ((share / volume).max(1)) as u32,
            }
        })
        .collect();
    let mut total: i64 = types
        .iter()
        .map(|t| t.count as i64 * t.dims.iter().product::<i64>())
        .sum();
    let mut ti = 0;
    while total < container_volume {
        types[ti].count += 1;
        total += types[ti].dims.iter().product::<i64>();
        ti = (ti + 1) % types.len();
    }
    BrInstance {
        number,
        seed: seed as i64,
        container: CONTAINER,
        types,
    }
}

/// A full synthetic group: `per_group` instances of `type_count` types.
pub fn br_like_group(master_seed: u64, type_count: usize, per_group: usize) -> Vec<BrInstance> {
    (0..per_group)
        .map(|i| {
            let seed = master_seed
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add((type_count as u64) << 32)
                .wrapping_add(i as u64);
            br_like_instance(seed, i as u32 + 1, type_count)
        })
        .collect()
}

/// The bundled wide-body ULD shape set: cuboid pallets and containers
/// plus contoured shapes with one lower cut, one upper cut, and two upper
/// cuts. Dimensions in cm, weight capacities in kg.
pub fn b777_uld_types() -> Vec<UldType> {
    let mut out = Vec::new();
    // Lower-deck container, contoured base on the far side.
    out.push(UldType {
        uld: Uld::new(
            "AKE",
            vec![
                [0, 0, 0],
                [156, 0, 0],
                [156, 103, 0],
                [0, 103, 0],
                [0, 153, 50],
                [156, 153, 50],
                [0, 0, 163],
                [156, 0, 163],
                [156, 153, 163],
                [0, 153, 163],
            ],
            vec![
                vec![0, 1, 2, 3],
                vec![3, 2, 5, 4],
                vec![4, 5, 8, 9],
                vec![0, 1, 7, 6],
                vec![6, 7, 8, 9],
                vec![0, 3, 4, 9, 6],
                vec![1, 2, 5, 8, 7],
            ],
            1588,
            3_695_484,
        )
        .expect("AKE geometry is valid"),
        count: None,
    });
    // Lower-deck container, upper cut on the origin side (critical facet).
    out.push(UldType {
        uld: Uld::new(
            "AKW",
            vec![
                [0, 0, 0],
                [156, 0, 0],
                [156, 153, 0],
                [0, 153, 0],
                [0, 0, 113],
                [156, 0, 113],
                [0, 50, 163],
                [156, 50, 163],
                [156, 153, 163],
                [0, 153, 163],
            ],
            vec![
                vec![0, 1, 2, 3],
                vec![0, 1, 5, 4],
                vec![4, 5, 7, 6],
                vec![6, 7, 8, 9],
                vec![2, 3, 9, 8],
                vec![0, 3, 9, 6, 4],
                vec![1, 2, 8, 7, 5],
            ],
            1588,
            3_695_484,
        )
        .expect("AKW geometry is valid"),
        count: None,
    });
    // Main-deck container with two upper cuts.
    out.push(UldType {
        uld: Uld::new(
            "AMJ",
            vec![
                [0, 0, 0],
                [318, 0, 0],
                [318, 244, 0],
                [0, 244, 0],
                [0, 0, 184],
                [318, 0, 184],
                [0, 60, 244],
                [318, 60, 244],
                [0, 184, 244],
                [318, 184, 244],
                [0, 244, 184],
                [318, 244, 184],
            ],
            vec![
                vec![0, 1, 2, 3],
                vec![0, 1, 5, 4],
                vec![4, 5, 7, 6],
                vec![6, 7, 9, 8],
                vec![8, 9, 11, 10],
                vec![2, 3, 10, 11],
                vec![0, 3, 10, 8, 6, 4],
                vec![1, 2, 11, 9, 7, 5],
            ],
            6804,
            17_787_648,
        )
        .expect("AMJ geometry is valid"),
        count: None,
    });
    for (id, dims, cap) in [
        ("PMC", [318, 244, 163], 6804),
        ("PAG", [318, 224, 163], 6033),
        ("AKH", [156, 153, 114], 1134),
    ] {
        out.push(UldType {
            uld: Uld::cuboid(id, dims, cap).expect("cuboid is valid"),
            count: None,
        });
    }
    out
}

/// Synthetic air-cargo items: parcel-shaped pieces (footprints wider
/// than they are tall) with an occasional bulky one, density-derived
/// weights, a non-stackable share, and mixed orientation freedom. The
/// size mix is tuned so a filled lower-deck container holds a few dozen
/// items.
pub fn air_cargo_items(seed: u64, count: usize) -> Vec<Item> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA1C);
    (0..count)
        .map(|i| {
            let bulky = rng.gen_bool(0.08);
            let size = if bulky {
                [
                    rng.gen_range(80..=150),
                    rng.gen_range(80..=150),
                    rng.gen_range(60..=110),
                ]
            } else {
                [
                    rng.gen_range(30..=110),
                    rng.gen_range(30..=110),
                    rng.gen_range(20..=80),
                ]
            };
            let volume: i64 = size.iter().product();
            let density = rng.gen_range(80.0..280.0); // kg per m^3
            let weight = ((volume as f64 / 1e6) * density).ceil() as i64;
            let tiltable = rng.gen_bool(0.6);
            let rotatable = tiltable || rng.gen_bool(0.9);
            let stackable = rng.gen_bool(0.75);
            Item {
                id: format!("i{:03}", i + 1),
                size,
                weight,
                rotatable,
                tiltable,
                stackable,
            }
        })
        .collect()
}

/// Multi-ULD instance over the bundled shape set. `edge` applies an edge
/// width/offset of 10 and allows substructures; `unlimited` controls
/// the per-type availability.
pub fn air_cargo_instance(seed: u64, item_count: usize, edge: bool, unlimited: bool) -> Instance {
    let mut ulds = b777_uld_types();
    for t in &mut ulds {
        if edge {
            t.uld.edge_width = 10;
            t.uld.edge_offset = 10;
            t.uld.substructure_allowed = true;
        }
        t.count = if unlimited { None } else { Some(1) };
    }
    Instance {
        name: format!("air{}-{}", item_count, seed),
        items: air_cargo_items(seed, item_count),
        ulds,
        packing: Default::default(),
        algo: Default::default(),
    }
}

/// The same shape set as shipped in the bundled geometry file, for users
/// authoring their own instance documents.
pub fn bundled_uld_geometry_json() -> &'static str {
    include_str!("../assets/b777_ulds.json")
}
