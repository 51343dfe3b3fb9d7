#![no_main]

use evoplanner::genome::{decode, encode, PlannerGenome};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = text.parse::<PlannerGenome>() {
        assert_eq!(g.to_string(), text.trim());
        assert_eq!(encode(&decode(g)).unwrap(), g);
    }
});
