#![allow(dead_code)]

use evoplanner::scenario::{load_scenario, scenario_digest, Scenario};

pub const REFERENCE_DIGEST: &str = "3d3a7332c8f1c5dcc97cd114031199a9398d28870c3ee3b4539d29062bc7f980";

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

/// Medium density, hills relief, generator seed 1.
pub fn reference_scenario() -> Scenario {
    let s = load_scenario(fixture("reference_scenario.json")).expect("reference fixture loads");
    assert_eq!(scenario_digest(&s), REFERENCE_DIGEST, "reference fixture changed");
    s
}

pub mod oracle;
