//! Versioned JSON scenario documents.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{MissionSpace, NoiseSpec, Scenario, Terrain, Threat, UavShape};
use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TerrainDoc {
    cell_size: f64,
    width: usize,
    height: usize,
    heights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseSpec>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    version: u32,
    terrain: TerrainDoc,
    threats: Vec<Threat>,
    start: Vec3,
    target: Vec3,
    mission_space: MissionSpace,
    uav: UavShape,
    safe_height: f64,
}

fn to_doc(s: &Scenario) -> ScenarioDoc {
    ScenarioDoc {
        version: SCENARIO_VERSION,
        terrain: TerrainDoc {
            cell_size: s.terrain.cell_size(),
            width: s.terrain.nx(),
            height: s.terrain.ny(),
            heights: s.terrain.heights().to_vec(),
            noise: s.terrain.noise().cloned(),
        },
        threats: s.threats.clone(),
        start: s.start,
        target: s.target,
        mission_space: s.mission_space,
        uav: s.uav,
        safe_height: s.safe_height,
    }
}

pub fn scenario_to_json(s: &Scenario) -> String {
    serde_json::to_string_pretty(&to_doc(s)).expect("scenario serialises")
}

/// Parses and validates a scenario document.
pub fn scenario_from_json(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(|e| {
        // serde names the missing/unknown field in its message
        Error::schema("document", e.to_string())
    })?;
    if doc.version != SCENARIO_VERSION {
        return Err(Error::schema(
            "version",
            format!("unsupported version {}", doc.version),
        ));
    }
    let t = doc.terrain;
    let mut terrain = Terrain::from_grid(t.width, t.height, t.cell_size, t.heights)?;
    if let Some(n) = t.noise {
        terrain = terrain.with_noise(n);
    }
    let s = Scenario {
        terrain,
        threats: doc.threats,
        start: doc.start,
        target: doc.target,
        mission_space: doc.mission_space,
        uav: doc.uav,
        safe_height: doc.safe_height,
    };
    s.validate()?;
    Ok(s)
}

pub fn save_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, scenario_to_json(s)).map_err(|e| Error::io(path, e))
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    scenario_from_json(&text)
}

/// SHA-256 over the canonical compact serialisation.
pub fn scenario_digest(s: &Scenario) -> String {
    let compact = serde_json::to_vec(&to_doc(s)).expect("scenario serialises");
    hex::encode(Sha256::digest(&compact))
}
