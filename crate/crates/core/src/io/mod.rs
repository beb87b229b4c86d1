//! Instance and plan file formats.

pub mod br;
pub mod json;
pub mod obj;
pub mod plan;

pub use br::{br_to_instance, parse_br, write_br, BrError, BrInstance, BrItemType};
pub use json::{parse_instance_json, write_instance_json, JsonError};
pub use obj::export_scene;
pub use plan::{parse_plan, plan_to_solution, write_plan, PlanDoc, PlanError};
