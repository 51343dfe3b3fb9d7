#![no_main]

use evoplanner::genome::{describe, parse_describe};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_describe(text) {
        assert_eq!(parse_describe(&describe(g)).unwrap(), g);
    }
});
