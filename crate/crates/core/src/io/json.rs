//! Versioned JSON interchange format for instances: items with all flags,
//! ULDs as vertex/facet polytopes with capacities and edge geometry, and
//! both parameter sets.

use serde::Deserialize;
use thiserror::Error;

use crate::model::Instance;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("schema violation at {path}: {source}")]
    Schema {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported schema_version {0} (expected {SCHEMA_VERSION})")]
    Version(u32),
    #[error("invalid instance: {0}")]
    Model(#[from] crate::model::ModelError),
}

#[derive(Deserialize)]
struct VersionProbe {
    #[serde(default = "default_version")]
    schema_version: u32,
}

fn default_version() -> u32 {
    0
}

/// Parse and fully validate an instance document. ULD planes and bounding
/// boxes are derived here; geometry outside the supported shape family is
/// rejected.
pub fn parse_instance_json(text: &str) -> Result<Instance, JsonError> {
    let probe: VersionProbe = serde_json::from_str(text).map_err(|e| JsonError::Schema {
        path: ".".into(),
        source: e,
    })?;
    if probe.schema_version != SCHEMA_VERSION {
        return Err(JsonError::Version(probe.schema_version));
    }
    let de = &mut serde_json::Deserializer::from_str(text);
    let mut instance: Instance =
        serde_path_to_error::deserialize(de).map_err(|e| JsonError::Schema {
            path: e.path().to_string(),
            source: e.into_inner(),
        })?;
    for t in &mut instance.ulds {
        t.uld.finalize()?;
    }
    instance.validate()?;
    Ok(instance)
}

/// Serialize an instance; `parse_instance_json` restores it losslessly.
pub fn write_instance_json(instance: &Instance) -> String {
    let mut value = serde_json::to_value(instance).expect("instances are serializable");
    value
        .as_object_mut()
        .expect("instance serializes to an object")
        .insert("schema_version".into(), SCHEMA_VERSION.into());
    let mut out = serde_json::to_string_pretty(&value).expect("instances are serializable");
    out.push('\n');
    out
}
