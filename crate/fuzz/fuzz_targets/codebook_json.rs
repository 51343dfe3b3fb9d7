#![no_main]

use evoplanner::genome::{decode_with, Codebook, PlannerGenome};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cb) = Codebook::from_json(text) {
        // An accepted codebook resolves every genome.
        for g in [PlannerGenome::ZEROS, PlannerGenome(u64::MAX), PlannerGenome(0x5555_5555_5555_5555)] {
            cb.resolve(&decode_with(g, &cb));
        }
    }
});
