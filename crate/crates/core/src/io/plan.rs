//! Load-plan serialization: per load the ULD, substructure flag,
//! placements (dummies included), and metrics, plus the unloaded
//! remainder. Plans re-validate from the instance file alone.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Instance, Orientation, Placed, Placement, Solution, UldLoad, X, Y};
use crate::rgs::Score;
use crate::validate::validate;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("schema violation at {path}: {source}")]
    Schema {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("plan references unknown item id `{0}`")]
    UnknownItem(String),
    #[error("plan references unknown ULD type {0}")]
    UnknownUldType(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanPlacement {
    /// Item id; None for dummy placements.
    pub item: Option<String>,
    pub dummy: Option<String>,
    pub orientation: Orientation,
    pub position: [i64; 3],
    pub size: [i64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanLoadMetrics {
    pub utilization: f64,
    pub loaded_volume: i64,
    pub loaded_weight: i64,
    pub center_of_gravity: Option<[f64; 3]>,
    pub cog_deviation: [f64; 2],
    pub score: Score,
    /// Verdict of the independent validator at write time.
    pub valid: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanLoad {
    pub uld_id: String,
    pub uld_type: usize,
    pub substructure: bool,
    pub placements: Vec<PlanPlacement>,
    pub metrics: PlanLoadMetrics,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanDoc {
    pub schema_version: u32,
    pub instance: String,
    pub seed: u64,
    pub loads: Vec<PlanLoad>,
    pub unloaded: Vec<String>,
}

/// Serialize a solution, embedding per-load metrics and validator
/// verdicts. Output is deterministic for identical solutions.
pub fn write_plan(instance: &Instance, solution: &Solution, seed: u64) -> String {
    let loads = solution
        .loads
        .iter()
        .enumerate()
        .map(|(li, load)| {
            let uld = &instance.ulds[load.uld_type].uld;
            let placements = load
                .placements
                .iter()
                .map(|p| PlanPlacement {
                    item: match p.placed {
                        Placed::Item(i) => Some(instance.items[i].id.clone()),
                        _ => None,
                    },
                    dummy: match p.placed {
                        Placed::Item(_) => None,
                        Placed::EdgeDummy => Some("edge".into()),
                        Placed::SubstructureDummy => Some("substructure".into()),
                    },
                    orientation: p.orientation,
                    position: p.position,
                    size: p.size,
                })
                .collect();
            let single = Solution {
                loads: vec![load.clone()],
                unloaded: vec![],
                scores: vec![],
            };
            let report = validate(instance, &single);
            PlanLoad {
                uld_id: uld.id.clone(),
                uld_type: load.uld_type,
                substructure: load.substructure_used,
                placements,
                metrics: PlanLoadMetrics {
                    utilization: load.utilization(uld),
                    loaded_volume: load.loaded_volume(),
                    loaded_weight: load.loaded_weight(),
                    center_of_gravity: load.center_of_gravity(),
                    cog_deviation: [
                        crate::rgs::cog_deviation(load, uld, X, instance.packing.max_cog_deviation),
                        crate::rgs::cog_deviation(load, uld, Y, instance.packing.max_cog_deviation),
                    ],
                    score: solution.scores.get(li).copied().unwrap_or(Score {
                        weight_balance: 0.0,
                        volume: 0.0,
                        penalty: 0.0,
                        combined: 0.0,
                    }),
                    valid: report.is_valid(),
                },
            }
        })
        .collect();
    let doc = PlanDoc {
        schema_version: super::json::SCHEMA_VERSION,
        instance: instance.name.clone(),
        seed,
        loads,
        unloaded: solution
            .unloaded
            .iter()
            .map(|&i| instance.items[i].id.clone())
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plans are serializable");
    out.push('\n');
    out
}

pub fn parse_plan(text: &str) -> Result<PlanDoc, PlanError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| PlanError::Schema {
        path: e.path().to_string(),
        source: e.into_inner(),
    })
}

/// Reconstruct an in-memory solution from a plan document, resolving item
/// ids against the instance.
pub fn plan_to_solution(plan: &PlanDoc, instance: &Instance) -> Result<Solution, PlanError> {
    let index_of = |id: &str| {
        instance
            .items
            .iter()
            .position(|it| it.id == id)
            .ok_or_else(|| PlanError::UnknownItem(id.to_string()))
    };
    let mut loads = Vec::new();
    for pl in &plan.loads {
        if pl.uld_type >= instance.ulds.len() {
            return Err(PlanError::UnknownUldType(pl.uld_type));
        }
        let mut placements = Vec::new();
        for pp in &pl.placements {
            let placed = match (&pp.item, pp.dummy.as_deref()) {
                (Some(id), _) => Placed::Item(index_of(id)?),
                (None, Some("substructure")) => Placed::SubstructureDummy,
                (None, _) => Placed::EdgeDummy,
            };
            let (stackable, weight) = match placed {
                Placed::Item(i) => (instance.items[i].stackable, instance.items[i].weight),
                Placed::EdgeDummy => (false, 0),
                Placed::SubstructureDummy => (true, 0),
            };
            placements.push(Placement {
                placed,
                orientation: pp.orientation,
                position: pp.position,
                size: pp.size,
                stackable,
                weight,
            });
        }
        loads.push(UldLoad {
            uld_type: pl.uld_type,
            substructure_used: pl.substructure,
            placements,
        });
    }
    let unloaded = plan
        .unloaded
        .iter()
        .map(|id| index_of(id))
        .collect::<Result<Vec<_>, _>>()?;
    let scores = plan.loads.iter().map(|l| l.metrics.score).collect();
    Ok(Solution {
        loads,
        unloaded,
        scores,
    })
}
