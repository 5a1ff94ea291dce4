#![no_main]

//! Input is a group spec on the first line followed by a set file.

use distdoubling::cli::parse::{format_set, parse_group_spec, parse_set};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (spec, body) = text.split_once('\n').unwrap_or((text, ""));
    let Ok(g) = parse_group_spec(spec, 4096) else { return };
    if let Ok(set) = parse_set(&g, body) {
        let round = parse_set(&g, &format_set(&set)).unwrap();
        assert_eq!(round, set);
    }
});
