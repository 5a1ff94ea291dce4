#![no_main]

use distdoubling::cli::parse::parse_group_spec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = parse_group_spec(text, 1 << 16) {
        assert!(g.order() <= 1 << 16);
        assert_eq!(g.moduli().iter().product::<usize>(), g.order());
        // the display form parses back to the same group
        let again = parse_group_spec(&g.to_string(), 1 << 16).unwrap();
        assert_eq!(again.moduli(), g.moduli());
    }
});
