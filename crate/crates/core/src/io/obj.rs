//! Wavefront OBJ export of a solution: one shell mesh per loaded ULD and
//! a box mesh per placement, offset so multiple ULDs sit side by side.

use crate::model::{Instance, Placed, Solution};

fn push_box(out: &mut String, base: &mut usize, min: [f64; 3], max: [f64; 3]) {
    for z in [min[2], max[2]] {
        for y in [min[1], max[1]] {
            for x in [min[0], max[0]] {
                out.push_str(&format!("v {x} {y} {z}\n"));
            }
        }
    }
    let b = *base;
    for quad in [
        [0, 1, 3, 2], // bottom
        [4, 5, 7, 6], // top
        [0, 1, 5, 4],
        [2, 3, 7, 6],
        [0, 2, 6, 4],
        [1, 3, 7, 5],
    ] {
        out.push_str(&format!(
            "f {} {} {} {}\n",
            b + quad[0],
            b + quad[1],
            b + quad[2],
            b + quad[3]
        ));
    }
    *base += 8;
}

/// ASCII mesh of the whole solution for offline viewing.
pub fn export_scene(instance: &Instance, solution: &Solution) -> String {
    let mut out = String::from("# packing scene\n");
    let mut base = 1usize;
    let mut x_offset = 0.0f64;
    for (li, load) in solution.loads.iter().enumerate() {
        let uld = &instance.ulds[load.uld_type].uld;
        out.push_str(&format!("o uld_{li}_{}\n", uld.id));
        for v in &uld.vertices {
            out.push_str(&format!(
                "v {} {} {}\n",
                v[0] as f64 + x_offset,
                v[1],
                v[2]
            ));
        }
        for facet in &uld.facets {
            out.push('f');
            for &vi in facet {
                out.push_str(&format!(" {}", base + vi));
            }
            out.push('\n');
        }
        base += uld.vertices.len();
        for (pi, p) in load.placements.iter().enumerate() {
            let name = match p.placed {
                Placed::Item(i) => format!("item_{}", instance.items[i].id),
                Placed::EdgeDummy => format!("edge_dummy_{pi}"),
                Placed::SubstructureDummy => "substructure".to_string(),
            };
            out.push_str(&format!("o load{li}_{name}\n"));
            let min = [
                p.position[0] as f64 + x_offset,
                p.position[1] as f64,
                p.position[2] as f64,
            ];
            let max = [
                (p.position[0] + p.size[0]) as f64 + x_offset,
                (p.position[1] + p.size[1]) as f64,
                (p.position[2] + p.size[2]) as f64,
            ];
            push_box(&mut out, &mut base, min, max);
        }
        x_offset += uld.bounding_box[0] as f64 * 1.5;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{
        AlgoParams, Item, Orientation, PackingParams, Placement, Uld, UldLoad, UldType,
    };

    #[test]
    fn scene_counts_vertices_per_box() {
        let instance = Instance {
            name: "t".into(),
            items: vec![Item {
                id: "a".into(),
                size: [5, 5, 5],
                weight: 1,
                rotatable: false,
                tiltable: false,
                stackable: true,
            }],
            ulds: vec![UldType {
                uld: Uld::cuboid("c", [10, 10, 10], 100).unwrap(),
                count: Some(1),
            }],
            packing: PackingParams::default(),
            algo: AlgoParams::default(),
        };
        let solution = Solution {
            loads: vec![UldLoad {
                uld_type: 0,
                substructure_used: false,
                placements: vec![Placement {
                    placed: Placed::Item(0),
                    orientation: Orientation::IDENTITY,
                    position: [0, 0, 0],
                    size: [5, 5, 5],
                    stackable: true,
                    weight: 1,
                }],
            }],
            unloaded: vec![],
            scores: vec![],
        };
        let obj = export_scene(&instance, &solution);
        let vertices = obj.lines().filter(|l| l.starts_with("v ")).count();
        // 8 hull vertices + 8 box vertices.
        assert_eq!(vertices, 16);
        let empty = export_scene(
            &instance,
            &Solution {
                loads: vec![],
                unloaded: vec![0],
                scores: vec![],
            },
        );
        assert!(!empty.lines().any(|l| l.starts_with("v ")));
    }
}
