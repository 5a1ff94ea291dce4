#![no_main]

//! Input is a group spec on the first line followed by a candidates file.

use distdoubling::cli::parse::{parse_candidates, parse_group_spec};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let (spec, body) = text.split_once('\n').unwrap_or((text, ""));
    let Ok(g) = parse_group_spec(spec, 1024) else { return };
    if let Ok(list) = parse_candidates(&g, body) {
        assert!(!list.is_empty());
        for h in &list {
            assert_eq!(g.order() % h.order(), 0);
            assert!(h.members().contains(0));
        }
    }
});
