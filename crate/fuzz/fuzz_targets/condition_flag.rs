#![no_main]

use libfuzzer_sys::fuzz_target;
use relnodes::io::{parse_condition, parse_name_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((name, value)) = parse_condition(text) {
        assert!(value.is_finite());
        assert!(!name.is_empty());
    }
    let _ = parse_name_list(text);
});
