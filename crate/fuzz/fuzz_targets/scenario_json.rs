#![no_main]

use evoplanner::scenario::{scenario_digest, scenario_from_json, scenario_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = scenario_from_json(text) {
        // Anything the loader accepts must survive a save/load cycle.
        let again = scenario_from_json(&scenario_to_json(&s)).expect("saved scenario reloads");
        assert_eq!(scenario_digest(&s), scenario_digest(&again));
    }
});
